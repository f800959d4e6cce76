//! Binary rings, weakly divisible rings and the coefficient-box sieve for
//! ultra-weakly divisible binary forms.

pub mod binring;
pub mod error;
pub mod factor;
pub mod forms;
pub mod irreducible;
pub mod linalg;
pub mod localdata;
pub mod modp;
pub mod mpoly;
pub mod reduce;
pub mod roots;
pub mod sieve;
mod ser;
pub mod weakdiv;

pub use error::{Error, Result};
pub use forms::BinaryForm;
