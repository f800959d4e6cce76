//! Command-line driver. Forms are read as `n;a_0,...,a_n`, one per line, from
//! positional arguments, `--input`, or stdin.

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use wdring::binring::{canonical_basis_ring, ring_disc, RingPresentation};
use wdring::factor::factor_integer;
use wdring::localdata::{
    classify_order, count_restricted_sudo_maximal, dedekind_kummer, FileProfiles, FormProfiles, PartFactor,
    PrimeClass, ProfileSource,
};
use wdring::modp::{count_h, double_root_profile, factor_modp, is_prime, singular_density};
use wdring::reduce::{canonical_key, gram_profile, is_normally_minkowski_reduced, rho_from_profile};
use wdring::roots::Precision;
use wdring::sieve::{run_sieve, SieveConfig};
use wdring::weakdiv::{find_witness, is_uwd, max_witness, weakly_divisible_ring, WeakDivWitness};
use wdring::BinaryForm;

#[derive(Parser)]
#[command(name = "wdring", version, about = "Binary rings, weak divisibility and the UWD sieve")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct FormInput {
    /// Forms as `n;a_0,...,a_n`. Read from --input or stdin when omitted.
    forms: Vec<String>,
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Discriminant of each form.
    Disc(FormInput),
    /// Factorisation over F_p and the double-root profile.
    FactorModp {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        input: FormInput,
    },
    /// Number of monic irreducible polynomials of degree f over F_p.
    Hpf {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        f: u32,
    },
    /// Exhaustive counts of V_n(F_p) and W_n(F_p) as CSV.
    Density {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u64>,
    },
    /// Structure table of R_f, or of R'_(f,m,l) with --m and --l.
    Ring {
        #[arg(long)]
        m: Option<BigInt>,
        #[arg(long)]
        l: Option<BigInt>,
        #[command(flatten)]
        input: FormInput,
    },
    /// Least witness l for weak divisibility by m.
    Weakdiv {
        #[arg(long)]
        m: BigInt,
        #[command(flatten)]
        input: FormInput,
    },
    /// Ultra weak divisibility, one JSON line per prime with p^2 | disc.
    Uwd(FormInput),
    /// Dedekind-Kummer splitting at p as CSV.
    Dedekind {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        input: FormInput,
    },
    /// Local classification of R'_(f,m,l); the maximal witness is used by default.
    Classify {
        #[arg(long, requires = "l")]
        m: Option<BigInt>,
        #[arg(long, requires = "m")]
        l: Option<BigInt>,
        #[command(flatten)]
        input: FormInput,
    },
    /// Partial sums of restricted sudo-maximal order counts as CSV.
    CountOrders {
        /// Profile file with lines `p: (e,f,max);...`.
        #[arg(long, conflicts_with = "form")]
        profiles: Option<PathBuf>,
        /// Form whose local data supplies the profiles.
        #[arg(long)]
        form: Option<String>,
        #[arg(long)]
        x: usize,
    },
    /// Gram-Schmidt profile, reduced verdict and dedupe key.
    Reduce {
        #[arg(long, default_value = "1")]
        m: BigInt,
        #[arg(long, default_value = "0")]
        l: BigInt,
        #[arg(long, value_enum, default_value = "doubledouble")]
        precision: PrecisionArg,
        #[command(flatten)]
        input: FormInput,
    },
    /// Run the coefficient-box sieve from a TOML config.
    Sieve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out` from the config.
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PrecisionArg {
    Double,
    Doubledouble,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Doubledouble => Precision::DoubleDouble,
        }
    }
}

fn parse_lines(text: &str) -> Result<Vec<BinaryForm>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.parse::<BinaryForm>().with_context(|| format!("parsing form {l:?}")))
        .collect()
}

impl FormInput {
    fn read(&self) -> Result<Vec<BinaryForm>> {
        if !self.forms.is_empty() {
            return parse_lines(&self.forms.join("\n"));
        }
        let text = match &self.input {
            Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
            None => {
                let mut s = String::new();
                io::stdin().lock().read_to_string(&mut s)?;
                s
            }
        };
        parse_lines(&text)
    }
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn emit_ring(out: &mut impl Write, f: &BinaryForm, r: &RingPresentation) -> Result<()> {
    for i in 0..r.n {
        for j in 0..r.n {
            let coeffs: Vec<String> = r.structure[i][j].iter().map(ToString::to_string).collect();
            let row = json!({
                "form": f.to_string(),
                "basis": format!("{}*{}", r.basis_names[i], r.basis_names[j]),
                "row": i,
                "col": j,
                "coeffs": coeffs,
            });
            writeln!(out, "{row}")?;
        }
    }
    let row = json!({ "form": f.to_string(), "basis_names": r.basis_names, "disc": ring_disc(r).to_string() });
    writeln!(out, "{row}")?;
    Ok(())
}

fn witness_for(f: &BinaryForm, m: &Option<BigInt>, l: &Option<BigInt>) -> Result<WeakDivWitness> {
    match (m, l) {
        (Some(m), Some(l)) => Ok(WeakDivWitness { m: m.clone(), l: l.clone() }),
        _ => {
            let fac = factor_integer(&f.discriminant())?;
            Ok(max_witness(f, &fac)?.witness())
        }
    }
}

fn class_name(c: &PrimeClass) -> String {
    match c {
        PrimeClass::Maximal => "maximal".into(),
        PrimeClass::PseudoMaximal(d) => format!("pseudo-{:?}:{}", d.case, d.index_exponent),
        PrimeClass::Other => "other".into(),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    match cli.cmd {
        Cmd::Disc(input) => {
            for f in input.read()? {
                writeln!(out, "{}", json!({ "form": f.to_string(), "disc": f.discriminant().to_string() }))?;
            }
        }
        Cmd::FactorModp { p, input } => {
            if !is_prime(p) {
                bail!("{p} is not prime");
            }
            for f in input.read()? {
                let fm = factor_modp(&f, p)?;
                let prof = double_root_profile(&f, p)?;
                writeln!(out, "{}", json!({ "form": f.to_string(), "factorization": fm, "profile": prof }))?;
            }
        }
        Cmd::Hpf { p, f } => {
            if !is_prime(p) || f == 0 {
                bail!("need a prime p and f >= 1");
            }
            writeln!(out, "{}", count_h(p, f))?;
        }
        Cmd::Density { n, p } => {
            writeln!(out, "n,p,V,W,c_p_num,c_p_den")?;
            for p in p {
                let d = singular_density(n, p)?;
                writeln!(out, "{},{},{},{},{},{}", d.n, d.p, d.v, d.w, d.c_p.numer(), d.c_p.denom())?;
            }
        }
        Cmd::Ring { m, l, input } => {
            for f in input.read()? {
                let r = match (&m, &l) {
                    (None, None) => canonical_basis_ring(&f)?,
                    (Some(m), l) => {
                        let l = l.clone().unwrap_or_default();
                        weakly_divisible_ring(&f, &WeakDivWitness { m: m.clone(), l })?
                    }
                    (None, Some(_)) => bail!("--l needs --m"),
                };
                emit_ring(&mut out, &f, &r)?;
            }
        }
        Cmd::Weakdiv { m, input } => {
            for f in input.read()? {
                let w = find_witness(&f, &m)?;
                let l = w.map(|w| w.l.to_string());
                writeln!(out, "{}", json!({ "form": f.to_string(), "m": m.to_string(), "l": l }))?;
            }
        }
        Cmd::Uwd(input) => {
            for f in input.read()? {
                let fac = factor_integer(&f.discriminant())?;
                let rep = is_uwd(&f, &fac)?;
                let mw = if rep.is_uwd { max_witness(&f, &fac).ok() } else { None };
                let base = json!({
                    "form": f.to_string(),
                    "is_uwd": rep.is_uwd,
                    "m_f": mw.as_ref().map(|w| w.m_f.to_string()),
                    "l_f": mw.as_ref().map(|w| w.l_f.to_string()),
                });
                if rep.per_prime.is_empty() {
                    let mut row = base.clone();
                    row["p"] = serde_json::Value::Null;
                    writeln!(out, "{row}")?;
                }
                for (p, prof, verdict) in &rep.per_prime {
                    let mut row = base.clone();
                    row["p"] = json!(p);
                    row["valuation"] = json!(fac.valuation(*p));
                    row["profile"] = serde_json::to_value(prof)?;
                    row["verdict"] = serde_json::to_value(verdict)?;
                    writeln!(out, "{row}")?;
                }
            }
        }
        Cmd::Dedekind { p, input } => {
            if !is_prime(p) {
                bail!("{p} is not prime");
            }
            writeln!(out, "form,p,factor,e,f,locally_maximal,nominal")?;
            for f in input.read()? {
                let prof = dedekind_kummer(&f, p)?;
                for part in &prof.parts {
                    let factor = match &part.factor {
                        PartFactor::Affine(g) => g.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
                        PartFactor::Infinity => "inf".into(),
                    };
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        csv_quote(&f.to_string()),
                        p,
                        factor,
                        part.e,
                        part.f,
                        part.locally_maximal,
                        part.nominal
                    )?;
                }
            }
        }
        Cmd::Classify { m, l, input } => {
            writeln!(out, "form,m,l,primes,sudo_maximal,restricted_sudo_maximal")?;
            for f in input.read()? {
                let w = witness_for(&f, &m, &l)?;
                let fac = factor_integer(&f.discriminant())?;
                let c = classify_order(&f, &w, &fac)?;
                let primes: Vec<String> = c.per_prime.iter().map(|(p, k)| format!("{p}={}", class_name(k))).collect();
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    csv_quote(&f.to_string()),
                    w.m,
                    w.l,
                    primes.join(" "),
                    c.sudo_maximal,
                    c.restricted_sudo_maximal
                )?;
            }
        }
        Cmd::CountOrders { profiles, form, x } => {
            let src: Box<dyn ProfileSource> = match (profiles, form) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    Box::new(text.parse::<FileProfiles>()?)
                }
                (None, Some(f)) => Box::new(FormProfiles { form: f.parse()? }),
                _ => bail!("give exactly one of --profiles or --form"),
            };
            let series = count_restricted_sudo_maximal(src.as_ref(), x)?;
            writeln!(out, "x,orders,zeta_power_{}", series.zeta_exponent)?;
            for i in 1..=x {
                writeln!(out, "{i},{},{}", series.orders[i], series.zeta_power[i])?;
            }
        }
        Cmd::Reduce { m, l, precision, input } => {
            for f in input.read()? {
                let w = WeakDivWitness { m: m.clone(), l: l.clone() };
                if !w.is_valid_for(&f) {
                    bail!("({m}, {l}) is not a weak divisibility witness for {f}");
                }
                let g = f.translate(&l);
                let prof = gram_profile(&g, &m, precision.into())?;
                let reduced = is_normally_minkowski_reduced(&prof);
                let row = json!({
                    "form": f.to_string(),
                    "t": prof.t,
                    "r": prof.r,
                    "s": prof.s,
                    "rho": rho_from_profile(&prof),
                    "reduced": reduced,
                    "key": reduced.then(|| canonical_key(&f, &w).to_string()),
                });
                writeln!(out, "{row}")?;
            }
        }
        Cmd::Sieve { config, out: stem } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = SieveConfig::from_toml(&text)?;
            if stem.is_some() {
                cfg.out = stem;
            }
            let report = run_sieve(&cfg)?;
            match &cfg.out {
                Some(stem) => {
                    report.write(stem)?;
                    writeln!(out, "{}", report.summary_json())?;
                }
                None => write!(out, "{}", report.to_csv())?,
            }
            out.flush()?;
            if report.truncated {
                eprintln!("budget of {} candidates exhausted; box needs {}", cfg.budget, report.needed);
                return Ok(ExitCode::from(2));
            }
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
