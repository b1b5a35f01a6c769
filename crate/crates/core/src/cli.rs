//! Command-line front end. Every subcommand emits rows as JSON lines or CSV
//! with the same field set; rows are produced in sorted order.
//!
//! Exit status: 0 success, 1 usage or input error, 2 budget exceeded,
//! 3 a checked identity or congruence failed.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::charsums::GaussTable;
use crate::congruence::{padic_count_report, CongruenceFamily};
use crate::counting::{koblitz_count_with, projective_points, DeformationFamily, POINT_BUDGET};
use crate::error::Error;
use crate::ffield::FieldSpec;
use crate::katz::{hyp_direct, hyp_fourier, HypIndexParams};
use crate::padic::{gamma_reflection, gamma_shift, gauss_multiplication, padic_gamma, RationalInZp};
use crate::weights::{landau_properties, valuation_identity, WeightSystem};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "HYPCOUNT_THREADS";

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "hypcount", version, about = "Point counts, character sums and hypergeometric congruences over finite fields")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Write rows here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, env = THREADS_ENV, global = true)]
    pub threads: Option<usize>,
    /// Cap on enumerated projective points per fibre.
    #[arg(long, default_value_t = POINT_BUDGET as u64, global = true)]
    pub budget: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exhaustive count and Koblitz's formula for x_1^d+…+x_n^d − dλ·x^h.
    Count {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: u32,
        #[arg(long)]
        d: u32,
        /// Number of variables; must match the length of --h when given.
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated exponents h_1,…,h_n.
        #[arg(long)]
        h: String,
        /// A value, an inclusive range a..b, or "all".
        #[arg(long, default_value = "all")]
        lambda: String,
    },
    /// Congruence sweeps against exhaustive counts.
    Verify {
        #[arg(long)]
        family: String,
        /// Degree for the zero-dimensional family.
        #[arg(long, default_value_t = 3)]
        d: u64,
        /// A prime or an inclusive range a..b; inadmissible values are skipped.
        #[arg(long)]
        p: String,
        #[arg(long, default_value = "all")]
        lambda: String,
    },
    /// The p-adic point-count formula for x^d + y^d − dλxy^{d−1} mod p^k.
    PadicCount {
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 3)]
        d: u64,
        #[arg(long, default_value = "all")]
        lambda: String,
    },
    /// All Gauss sums g(a/(q−1)) of a field.
    GaussTable {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: u32,
    },
    /// Katz hypergeometric sum by direct summation and by Fourier expansion.
    KatzH {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: u32,
        /// Comma-separated numerator character indices.
        #[arg(long, default_value = "")]
        alpha: String,
        #[arg(long, default_value = "")]
        beta: String,
        /// Representation index of t in F_q^*.
        #[arg(long)]
        t: u64,
    },
    /// Landau function table, or the valuation identity when --p and --n are given.
    Landau {
        /// Sparse weights such as "3:1,1:-3".
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, requires = "n")]
        p: Option<u64>,
        #[arg(long, requires = "p")]
        n: Option<u64>,
    },
    /// Morita's p-adic gamma function and its identities at one argument.
    PadicGamma {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Integer or a/b.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Factor for the multiplication formula.
        #[arg(long, default_value_t = 2)]
        m: i64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<Report, Failure>;

struct Report {
    rows: Vec<Value>,
    failed: bool,
}

fn to_rows<T: Serialize>(rows: &[T]) -> Vec<Value> {
    rows.iter().map(|r| serde_json::to_value(r).expect("serializable")).collect()
}

fn parse_list(s: &str) -> std::result::Result<Vec<i64>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::Usage(format!("cannot parse {t:?} as an integer"))))
        .collect()
}

fn parse_range(s: &str) -> std::result::Result<Option<(u64, u64)>, Failure> {
    let bad = || Failure::Usage(format!("expected a value, a..b or all, got {s:?}"));
    if s == "all" {
        return Ok(None);
    }
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok(Some((a, b)))
}

fn lambda_values(s: &str, all: Vec<u64>) -> std::result::Result<Vec<u64>, Failure> {
    Ok(match parse_range(s)? {
        None => all,
        Some((a, b)) => (a..=b).collect(),
    })
}

fn prime_values(s: &str) -> std::result::Result<Vec<u64>, Failure> {
    match parse_range(s)? {
        None => Err(Failure::Usage("--p needs a prime or a range".into())),
        Some((a, b)) if a == b && !(a > 2 && crate::arith::is_prime(a)) => {
            Err(Failure::Usage(format!("{a} is not an odd prime")))
        }
        Some((a, b)) => Ok((a..=b).filter(|&p| p > 2 && crate::arith::is_prime(p)).collect()),
    }
}

fn field(p: u64, f: u32) -> std::result::Result<FieldSpec, Failure> {
    Ok(FieldSpec::new(p, f, None)?)
}

fn run_count(
    cfg: &RunConfig,
    p: u64,
    f: u32,
    d: u32,
    n: Option<usize>,
    h: &str,
    lambda: &str,
    log: &mut dyn Write,
) -> Outcome {
    let h: Vec<u32> = parse_list(h)?
        .into_iter()
        .map(|x| u32::try_from(x).map_err(|_| Failure::Usage(format!("bad exponent {x}"))))
        .collect::<std::result::Result<_, _>>()?;
    if let Some(n) = n {
        if n != h.len() {
            return Err(Failure::Usage(format!("--n {n} but --h has {} entries", h.len())));
        }
    }
    let spec = field(p, f)?;
    let base = DeformationFamily::new(d, h, 0)?;
    let needed = projective_points(spec.order(), base.n());
    if needed > cfg.budget as u128 {
        return Err(Failure::Budget(
            Error::BudgetExceeded { needed, limit: cfg.budget as u128 }.to_string(),
        ));
    }
    let table = GaussTable::new(&spec);
    let lambdas = lambda_values(lambda, (1..spec.order()).collect())?;
    let mut reports = Vec::new();
    for lam in lambdas {
        let fam = base.with_lambda(lam as i64);
        match koblitz_count_with(&fam, &spec, &table, cfg.budget as u128) {
            Ok(r) => reports.push(r),
            Err(e @ (Error::Precondition(_) | Error::NotDivisor { .. })) => {
                let _ = writeln!(log, "skipping λ = {lam}: {e}");
            }
            Err(e) => return Err(e.into()),
        }
    }
    let failed = reports.iter().any(|r| !r.matches());
    Ok(Report { rows: to_rows(&reports), failed })
}

fn run_verify(family: &str, d: u64, p: &str, lambda: &str, log: &mut dyn Write) -> Outcome {
    let mut fam: CongruenceFamily = family.parse()?;
    if let CongruenceFamily::ZeroDimensional { .. } = fam {
        fam = CongruenceFamily::ZeroDimensional { d };
    }
    let mut rows = Vec::new();
    for p in prime_values(p)? {
        if let Err(reason) = fam.admissible(p) {
            let _ = writeln!(log, "skipping p = {p}: {reason}");
            continue;
        }
        let all = fam.all_lambdas(p);
        let lambdas: Vec<u64> = lambda_values(lambda, all.clone())?
            .into_iter()
            .filter(|l| {
                let ok = all.contains(&(l % p));
                if !ok {
                    let _ = writeln!(log, "skipping p = {p}, λ = {l}: outside the family's range");
                }
                ok
            })
            .collect();
        if lambdas.is_empty() {
            continue;
        }
        rows.extend(fam.sweep(p, &lambdas)?);
    }
    let failed = rows.iter().any(|r| r.failed());
    Ok(Report { rows: to_rows(&rows), failed })
}

fn run_padic_count(p: &str, k: u32, d: u64, lambda: &str, log: &mut dyn Write) -> Outcome {
    let mut rows = Vec::new();
    for p in prime_values(p)? {
        if (p - 1) % d != 0 {
            let _ = writeln!(log, "skipping p = {p}: need an odd prime with {d} | p − 1");
            continue;
        }
        let lambdas: Vec<u64> = lambda_values(lambda, (1..p).collect())?
            .into_iter()
            .filter(|l| l % p != 0)
            .collect();
        let part: Vec<_> = lambdas
            .par_iter()
            .map(|&l| padic_count_report(p, k, d, l as i64))
            .collect::<crate::error::Result<_>>()?;
        rows.extend(part);
    }
    let failed = rows.iter().any(|r| !r.matches && !r.singular);
    Ok(Report { rows: to_rows(&rows), failed })
}

#[derive(Serialize)]
struct GaussRow {
    a: u64,
    re: f64,
    im: f64,
    abs: f64,
}

fn run_gauss_table(p: u64, f: u32) -> Outcome {
    let spec = field(p, f)?;
    let table = GaussTable::new(&spec);
    let rows: Vec<GaussRow> = table
        .values()
        .iter()
        .enumerate()
        .map(|(a, g)| GaussRow { a: a as u64, re: g.re, im: g.im, abs: g.norm() })
        .collect();
    Ok(Report { rows: to_rows(&rows), failed: false })
}

#[derive(Serialize)]
struct KatzRow {
    q: u64,
    alpha: Vec<i64>,
    beta: Vec<i64>,
    t: u64,
    direct_re: f64,
    direct_im: f64,
    fourier_re: f64,
    fourier_im: f64,
    difference: f64,
    tolerance: f64,
}

fn run_katz(p: u64, f: u32, alpha: &str, beta: &str, t: u64) -> Outcome {
    let spec = field(p, f)?;
    let (alpha, beta) = (parse_list(alpha)?, parse_list(beta)?);
    let t_elt = spec.element(t)?;
    let params = HypIndexParams::new(&spec, &alpha, &beta, t_elt)?;
    let direct = hyp_direct(&spec, &params)?;
    let fourier = hyp_fourier(&spec, &GaussTable::new(&spec), &params)?;
    let q = spec.order();
    let tolerance = 1e-6 * (q as f64).powf((alpha.len() + beta.len()) as f64 / 2.0);
    let difference = (direct - fourier).norm();
    let row = KatzRow {
        q,
        alpha,
        beta,
        t,
        direct_re: direct.re,
        direct_im: direct.im,
        fourier_re: fourier.re,
        fourier_im: fourier.im,
        difference,
        tolerance,
    };
    Ok(Report { rows: to_rows(&[row]), failed: difference >= tolerance })
}

#[derive(Serialize)]
struct LandauRow {
    gamma: String,
    x: String,
    value: i64,
    jump: bool,
}

#[derive(Serialize)]
struct ValuationRow {
    gamma: String,
    p: u64,
    n: u64,
    lhs: i64,
    rhs: i64,
    holds: bool,
}

fn run_landau(gamma: &str, p: Option<u64>, n: Option<u64>) -> Outcome {
    let g = WeightSystem::parse(gamma)?;
    if let (Some(p), Some(n)) = (p, n) {
        if p < 2 || !crate::arith::is_prime(p) {
            return Err(Failure::Usage(format!("{p} is not a prime")));
        }
        let (lhs, rhs) = valuation_identity(&g, p, n)?;
        let row = ValuationRow { gamma: g.to_string(), p, n, lhs, rhs, holds: lhs == rhs };
        return Ok(Report { rows: to_rows(&[row]), failed: lhs != rhs });
    }
    let report = landau_properties(&g);
    let rows: Vec<LandauRow> = report
        .intervals
        .iter()
        .map(|i| LandauRow {
            gamma: g.to_string(),
            x: i.start.clone(),
            value: i.value,
            jump: report.discontinuities.contains(&i.start),
        })
        .collect();
    Ok(Report { rows: to_rows(&rows), failed: !report.all_hold() })
}

#[derive(Serialize)]
struct GammaRow {
    p: u64,
    k: u32,
    x: String,
    residue: u64,
    shift_holds: bool,
    reflection_holds: bool,
    r: u64,
    m: i64,
    multiplication_holds: bool,
}

fn run_padic_gamma(p: u64, k: u32, x: &str, m: i64) -> Outcome {
    let x = RationalInZp::parse(x, p)?;
    let value = padic_gamma(p, k, x)?;
    let shift = gamma_shift(p, k, x)?;
    let (refl, r) = gamma_reflection(p, k, x)?;
    let mult = gauss_multiplication(p, k, m, x)?;
    let row = GammaRow {
        p,
        k,
        x: x.to_string(),
        residue: value.residue(),
        shift_holds: shift.holds,
        reflection_holds: refl.holds,
        r,
        m,
        multiplication_holds: mult.holds,
    };
    let failed = !(shift.holds && refl.holds && mult.holds);
    Ok(Report { rows: to_rows(&[row]), failed })
}

fn csv_field(v: &Value) -> String {
    let raw = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        _ => v.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

fn write_rows(rows: &[Value], format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Json => {
            for r in rows {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
        }
        Format::Csv => {
            let Some(Value::Object(first)) = rows.first() else { return Ok(()) };
            let keys: Vec<&String> = first.keys().collect();
            writeln!(out, "{}", keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","))?;
            for r in rows {
                let line: Vec<String> =
                    keys.iter().map(|k| csv_field(r.get(k.as_str()).unwrap_or(&Value::Null))).collect();
                writeln!(out, "{}", line.join(","))?;
            }
        }
    }
    Ok(())
}

fn dispatch(cfg: &RunConfig, log: &mut dyn Write) -> Outcome {
    match &cfg.command {
        Command::Count { p, f, d, n, h, lambda } => run_count(cfg, *p, *f, *d, *n, h, lambda, log),
        Command::Verify { family, d, p, lambda } => run_verify(family, *d, p, lambda, log),
        Command::PadicCount { p, k, d, lambda } => run_padic_count(p, *k, *d, lambda, log),
        Command::GaussTable { p, f } => run_gauss_table(*p, *f),
        Command::KatzH { p, f, alpha, beta, t } => run_katz(*p, *f, alpha, beta, *t),
        Command::Landau { gamma, p, n } => run_landau(gamma, *p, *n),
        Command::PadicGamma { p, k, x, m } => run_padic_gamma(*p, *k, x, *m),
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit status. Rows go to `out` unless `--out` is given;
/// diagnostics go to `log`.
pub fn run<I, T>(args: I, out: &mut dyn Write, log: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(log, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let work = || {
        let mut notes = Vec::new();
        let outcome = dispatch(&cfg, &mut notes);
        (outcome, notes)
    };
    let (outcome, notes) = match cfg.threads {
        Some(0) => (Err(Failure::Usage("--threads must be positive".into())), Vec::new()),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(work),
            Err(e) => (Err(Failure::Usage(e.to_string())), Vec::new()),
        },
        None => work(),
    };
    let _ = log.write_all(&notes);
    let report = match outcome {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(log, "error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Budget(msg)) => {
            let _ = writeln!(log, "error: {msg}");
            return EXIT_BUDGET;
        }
    };
    let written = match &cfg.out {
        Some(path) => File::create(path).and_then(|mut f| write_rows(&report.rows, cfg.format, &mut f)),
        None => write_rows(&report.rows, cfg.format, out),
    };
    if let Err(e) = written {
        let _ = writeln!(log, "error: {e}");
        return EXIT_USAGE;
    }
    if report.failed {
        let _ = writeln!(log, "assertion failed in at least one row");
        return EXIT_ASSERTION;
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut log = Vec::new();
        let code = run(std::iter::once("hypcount").chain(args.iter().copied()), &mut out, &mut log);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(log).unwrap())
    }

    #[test]
    fn ranges() {
        assert!(parse_range("all").unwrap().is_none());
        assert_eq!(parse_range("3..7").unwrap(), Some((3, 7)));
        assert_eq!(parse_range("5").unwrap(), Some((5, 5)));
        assert!(parse_range("7..3").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn count_row() {
        let (code, out, _) = call(&["count", "--p", "7", "--d", "3", "--n", "3", "--h", "1,1,1", "--lambda", "2"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["n_brute"], v["n_koblitz_rounded"]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["count", "--p", "7"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["count", "--p", "7", "--d", "3", "--h", "1,1,1", "--budget", "10"]).0, EXIT_BUDGET);
        assert_eq!(call(&["landau", "--gamma", "3:1,1:-3"]).0, 0);
        assert_eq!(call(&["landau", "--gamma", "5:1,2:1,3:-2,1:-1"]).0, EXIT_ASSERTION);
        assert_eq!(call(&["landau", "--gamma", "1:1,5:1,3:-2"]).0, EXIT_USAGE);
    }

    #[test]
    fn csv_and_json_fields_agree() {
        let (_, json, _) = call(&["gauss-table", "--p", "7"]);
        let (_, csv, _) = call(&["gauss-table", "--p", "7", "--format", "csv"]);
        let v: Value = serde_json::from_str(json.lines().next().unwrap()).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        let mut header: Vec<String> = csv.lines().next().unwrap().split(',').map(String::from).collect();
        header.sort();
        assert_eq!(keys, header);
        assert_eq!(csv.lines().count(), 7);
    }

    fn json_rows(out: &str) -> Vec<Value> {
        out.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let args = ["count", "--p", "13", "--d", "4", "--h", "1,1,1,1", "--format", "csv"];
        let one = call(&[&args[..], &["--threads", "1"]].concat());
        let many = call(&[&args[..], &["--threads", "4"]].concat());
        let again = call(&[&args[..], &["--threads", "4"]].concat());
        assert_eq!(one.0, 0);
        assert_eq!(one.1, many.1);
        assert_eq!(many.1, again.1);
    }

    #[test]
    fn count_rows_agree() {
        let (code, out, _) = call(&["count", "--p", "7", "--d", "3", "--h", "1,1,1"]);
        assert_eq!(code, 0);
        let rows = json_rows(&out);
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r["n_brute"] == r["n_koblitz_rounded"]));
    }

    #[test]
    fn verify_sweeps_succeed() {
        for args in [
            &["verify", "--family", "dwork3", "--p", "7..19"][..],
            &["verify", "--family", "legendre", "--p", "5..13"],
            &["verify", "--family", "zerodim", "--p", "7"],
            &["verify", "--family", "dwork4", "--p", "13"],
        ] {
            let (code, out, log) = call(args);
            assert_eq!(code, 0, "{args:?}: {log}");
            assert!(!out.is_empty());
        }
    }

    #[test]
    fn padic_count_rows_match() {
        let (code, out, _) = call(&["padic-count", "--p", "7", "--k", "2"]);
        assert_eq!(code, 0);
        assert!(json_rows(&out).iter().filter(|r| r["singular"] == false).all(|r| r["matches"] == true));
    }

    #[test]
    fn more_exit_codes() {
        assert_eq!(call(&["verify", "--family", "cubic", "--p", "7"]).0, EXIT_USAGE);
        assert_eq!(call(&["gauss-table", "--p", "8"]).0, EXIT_USAGE);
        let big = ["count", "--p", "31", "--d", "3", "--h", "1,1,1", "--budget", "500"];
        assert_eq!(call(&big).0, EXIT_BUDGET);
    }

    #[test]
    fn out_file_receives_rows() {
        let dir = std::env::temp_dir().join(format!("hypcount-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("table.csv");
        let (code, out, _) = call(&["gauss-table", "--p", "5", "--format", "csv", "--out", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 5);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn katz_landau_and_gamma_rows() {
        let (code, out, _) = call(&["katz-h", "--p", "7", "--alpha", "1,2", "--beta", "3", "--t", "2"]);
        assert_eq!((code, json_rows(&out).len()), (0, 1));
        let (code, out, _) = call(&["landau", "--gamma", "3:1,1:-3", "--p", "3", "--n", "9"]);
        assert_eq!((code, json_rows(&out).len()), (0, 1));
        assert_eq!(call(&["padic-gamma", "--p", "7", "--x", "1/2"]).0, 0);
    }
}
