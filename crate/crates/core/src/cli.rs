//! The `invar` command line. Exit codes: 0 success, 1 verification failure
//! or non-co-exact input, 2 malformed input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arith::{fmt_gauss, fmt_rat, GaussRat};
use crate::bergman::bergman_coefficients;
use crate::chern::{chern_invariant, Partition};
use crate::fourier::{eval_phi, random_phi};
use crate::invariant::{canonicalize, Invariant, RestrictionList};
use crate::jets::{Cap, JetPoly, Potential};
use crate::solver::{decompose, SolverError};
use crate::verify::{self, CheckRecord, JetSettings, VerifyError};

#[derive(Parser, Debug)]
#[command(
    name = "invar",
    version,
    about = "Exact local Kähler invariants: decomposition and Bergman coefficients"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the canonical form of an invariant.
    Canon {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Split a co-exact invariant into Chern polynomials and divergences.
    Decompose {
        input: PathBuf,
        /// Restriction list as `a,b;a,b;…`, one pair per factor.
        #[arg(long)]
        restrict: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the Chern invariant of a partition.
    Chern {
        #[arg(long)]
        partition: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Bergman kernel coefficients a_0..a_J at the origin.
    Bergman {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        order: u32,
        #[arg(long, conflicts_with_all = ["symbolic", "fubini_study"])]
        potential: Option<PathBuf>,
        #[arg(long, conflicts_with = "fubini_study")]
        symbolic: bool,
        #[arg(long)]
        fubini_study: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Integrate an invariant against random trigonometric polynomials.
    Oracle {
        input: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        mode_bound: i32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a verification suite and print a JSON-lines report.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        mode_bound: i32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    A1,
    A2,
    A3,
    Linear,
    ChernIntegrals,
    Roundtrip,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn malformed(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        Failure::malformed(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::malformed(format!("{}: {}", path.display(), e)))
}

fn read_invariant(path: &Path) -> Result<Invariant, Failure> {
    Invariant::from_json(&read(path)?)
        .map_err(|e| Failure::malformed(format!("{}: {}", path.display(), e)))
}

fn emit(text: &str, out_path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match out_path {
        Some(p) => std::fs::write(p, format!("{}\n", text))
            .map_err(|e| Failure::malformed(format!("{}: {}", p.display(), e))),
        None => writeln!(out, "{}", text).map_err(|e| Failure::malformed(e.to_string())),
    }
}

fn parse_restriction(s: &str) -> Result<RestrictionList, Failure> {
    let mut entries = Vec::new();
    for pair in s.split(';').filter(|p| !p.trim().is_empty()) {
        let mut it = pair.split(',').map(|x| x.trim().parse::<u8>());
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) => entries.push((a, b)),
            _ => {
                return Err(Failure::malformed(format!(
                    "bad restriction pair `{}`",
                    pair
                )))
            }
        }
    }
    RestrictionList::new(entries).map_err(|e| Failure::malformed(e.to_string()))
}

fn jet_poly_json(p: &JetPoly, n: usize) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let factors: Vec<Value> = m
                .factors()
                .iter()
                .map(|(v, e)| json!({"alpha": v.alpha(n), "beta": v.beta(n), "power": e}))
                .collect();
            json!({"factors": factors, "re": fmt_rat(&c.re), "im": fmt_rat(&c.im)})
        })
        .collect();
    Value::Array(terms)
}

fn gauss_json(c: &GaussRat) -> Value {
    json!({"re": fmt_rat(&c.re), "im": fmt_rat(&c.im)})
}

fn report(records: &[CheckRecord], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    for r in records {
        let _ = writeln!(out, "{}", r.to_json_line());
    }
    let failed = records.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(
        err,
        "{} checks, {} passed, {} failed",
        records.len(),
        records.len() - failed,
        failed
    );
    for r in records.iter().filter(|r| !r.passed()) {
        let _ = writeln!(
            err,
            "FAILED {} (dim {}, seed {:?}): {} != {}",
            r.check, r.dim, r.seed, r.lhs, r.rhs
        );
    }
    if failed == 0 {
        0
    } else {
        1
    }
}

fn run_verify(
    suite: Suite,
    dim: Option<usize>,
    order: Option<u32>,
    trials: usize,
    seed: u64,
    mode_bound: i32,
) -> Result<Vec<CheckRecord>, VerifyError> {
    let cfg = JetSettings::default();
    let dims = |default: &[usize]| dim.map(|d| vec![d]).unwrap_or_else(|| default.to_vec());
    match suite {
        Suite::A1 => dims(&[1, 2, 3])
            .into_iter()
            .map(|n| verify::check_a1(n, cfg))
            .collect(),
        Suite::A2 => dims(&[1, 2])
            .into_iter()
            .map(|n| verify::check_a2(n, cfg))
            .collect(),
        Suite::A3 => {
            let n = dim.unwrap_or(2);
            (0..trials as u64)
                .map(|t| verify::check_a3(n, seed + t, cfg))
                .collect()
        }
        Suite::Linear => {
            let top = order.unwrap_or(5);
            let mut out = Vec::new();
            for n in dims(&[1, 2]) {
                for j in 1..=top {
                    out.push(verify::check_linear(n, j, cfg)?);
                }
            }
            Ok(out)
        }
        Suite::ChernIntegrals => {
            let top = order.unwrap_or(4) as usize;
            let mut out = Vec::new();
            for sigma in 1..=top {
                for p in Partition::all(sigma) {
                    let ns = dim
                        .map(|d| vec![d])
                        .unwrap_or_else(|| vec![sigma - 1, sigma]);
                    for n in ns.into_iter().filter(|&n| n > 0) {
                        out.push(verify::check_chern_integral(
                            &p, n, trials, mode_bound, seed,
                        )?);
                    }
                }
            }
            Ok(out)
        }
        Suite::Roundtrip => (0..trials as u64)
            .map(|t| verify::check_roundtrip(seed + t))
            .collect(),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Canon {
            input,
            out: out_path,
            format,
        } => {
            let c = canonicalize(&read_invariant(&input)?);
            let text = match format {
                Format::Json => c.to_json_pretty(),
                Format::Text => c.to_string(),
            };
            emit(&text, out_path.as_deref(), out)?;
            Ok(0)
        }
        Command::Decompose {
            input,
            restrict,
            out: out_path,
        } => {
            let l = read_invariant(&input)?;
            let list = restrict.as_deref().map(parse_restriction).transpose()?;
            match decompose(&l, list.as_ref()) {
                Ok(d) => {
                    emit(&d.to_json_pretty(), out_path.as_deref(), out)?;
                    Ok(0)
                }
                Err(SolverError::NotCoexact { residue }) => {
                    let _ = writeln!(err, "not co-exact; local residue: {}", residue);
                    let _ = writeln!(err, "{}", residue.to_json());
                    Ok(1)
                }
                Err(e) => Err(Failure::malformed(e.to_string())),
            }
        }
        Command::Chern { partition, format } => {
            let p: Partition = partition
                .parse()
                .map_err(|e: crate::chern::ChernError| Failure::malformed(e.to_string()))?;
            let i = chern_invariant(&p);
            let text = match format {
                Format::Json => i.to_json_pretty(),
                Format::Text => format!("I{} = {}", p, i),
            };
            emit(&text, None, out)?;
            Ok(0)
        }
        Command::Bergman {
            dim,
            order,
            potential,
            symbolic,
            fubini_study,
            format,
        } => {
            let bad = |e: crate::bergman::BergmanError| Failure::malformed(e.to_string());
            let jet = |e: crate::jets::JetError| Failure::malformed(e.to_string());
            let (source, pot) = if symbolic {
                ("symbolic", Potential::symbolic(dim).map_err(jet)?)
            } else if fubini_study {
                (
                    "fubini-study",
                    Potential::fubini_study(dim, 2 * order + 2).map_err(jet)?,
                )
            } else if let Some(path) = potential {
                let p = Potential::from_json(&read(&path)?).map_err(jet)?;
                if p.n() != dim {
                    return Err(Failure::malformed(format!(
                        "potential has n = {}, expected --dim {}",
                        p.n(),
                        dim
                    )));
                }
                ("potential", p)
            } else {
                return Err(Failure::malformed(
                    "one of --potential, --symbolic, --fubini-study is required",
                ));
            };
            let (values, texts): (Vec<Value>, Vec<String>) = if pot.is_symbolic() {
                let a: Vec<JetPoly> = bergman_coefficients(&pot, order, Cap::NONE).map_err(bad)?;
                (
                    a.iter().map(|p| jet_poly_json(p, dim)).collect(),
                    a.iter().map(|p| p.to_string()).collect(),
                )
            } else {
                let a: Vec<GaussRat> = bergman_coefficients(&pot, order, Cap::NONE).map_err(bad)?;
                (
                    a.iter().map(gauss_json).collect(),
                    a.iter().map(fmt_gauss).collect(),
                )
            };
            let text = match format {
                Format::Json => serde_json::to_string_pretty(
                    &json!({"dim": dim, "order": order, "source": source, "coefficients": values}),
                )
                .expect("json value"),
                Format::Text => texts
                    .iter()
                    .enumerate()
                    .map(|(j, t)| format!("a{} = {}", j, t))
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            emit(&text, None, out)?;
            Ok(0)
        }
        Command::Oracle {
            input,
            dim,
            trials,
            mode_bound,
            seed,
        } => {
            if mode_bound < 1 {
                return Err(Failure::malformed("--mode-bound must be at least 1"));
            }
            let l = read_invariant(&input)?;
            let mut zero = 0;
            for t in 0..trials {
                let s = seed.wrapping_add(t as u64);
                let v = eval_phi(&l, &random_phi(dim, mode_bound, s))
                    .map_err(|e| Failure::malformed(e.to_string()))?;
                if crate::arith::Coeff::is_zero(&v) {
                    zero += 1;
                }
                let _ = writeln!(
                    out,
                    "{}",
                    json!({"trial": t, "seed": s, "dim": dim, "value": fmt_gauss(&v)})
                );
            }
            let _ = writeln!(
                err,
                "{} of {} integrals vanish (units of (2π)^{})",
                zero,
                trials,
                2 * dim
            );
            Ok(0)
        }
        Command::Verify {
            suite,
            dim,
            order,
            trials,
            seed,
            mode_bound,
        } => {
            let records = run_verify(suite, dim, order, trials, seed, mode_bound)?;
            Ok(report(&records, out, err))
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e);
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point for the binary.
pub fn main_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(args.iter().copied(), &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn bergman_fubini_study_text() {
        let (code, out, _) = run(&[
            "invar",
            "bergman",
            "--dim",
            "1",
            "--order",
            "3",
            "--fubini-study",
            "--format",
            "text",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "a0 = 1\na1 = 1\na2 = 0\na3 = 0");
    }

    #[test]
    fn verify_a1_reports_json_lines() {
        let (code, out, err) = run(&["invar", "verify", "a1", "--dim", "2"]);
        assert_eq!(code, 0, "{}", err);
        let v: Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
        assert_eq!(v["check"], "a1 == S/2");
        assert_eq!(v["status"], "pass");
        assert!(err.contains("1 passed"));
    }

    #[test]
    fn chern_and_restriction_parsing() {
        let (code, out, _) = run(&["invar", "chern", "--partition", "2", "--format", "text"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("I[2] = "));
        assert!(parse_restriction("2,2;1,2").is_ok());
        assert!(parse_restriction("2,2;x").is_err());
        assert!(parse_restriction("3,2").is_err());
    }

    #[test]
    fn malformed_input_exits_2() {
        let dir = std::env::temp_dir().join(format!("invar-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(&path, "{not json").unwrap();
        let (code, _, err) = run(&["invar", "canon", path.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(err.contains("error"));
        let (code, _, _) = run(&["invar", "bergman", "--dim", "1", "--order", "2"]);
        assert_eq!(code, 2);
    }
}
