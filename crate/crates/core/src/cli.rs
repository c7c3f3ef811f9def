//! Command-line front end: classify a shift pair, sweep parameter grids
//! to CSV, evaluate threshold curves, run the scripted check suites, and
//! apply measure functionals — all on the exact track, with rationals
//! written as `p/q` strings everywhere a number appears.
//!
//! Exit-code contract: `0` success/PASS, `1` mathematical FAIL or
//! certification mismatch, `2` usage or input error.  Output is
//! byte-identical across runs given identical arguments and seeds.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::families::curves::{self, Curve};
use crate::families::figure0::{classify_figure0, region_label, Figure0Params};
use crate::families::verify::run_verify;
use crate::measures::{Measure1D, Trilean};
use crate::numerics::scalar::{parse_rat, rat_to_string, Rat, Scalar};
use crate::shift1::Status;
use crate::shift2::WeightField;

/// Exact-arithmetic decision procedures for one- and two-variable
/// weighted shifts.
#[derive(Parser, Debug)]
#[command(name = "shiftlab", version, about, disable_help_subcommand = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the payload to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a shift pair against the threshold curves and the generic
    /// testers; emits a JSON record with certificates
    Classify(ClassifyArgs),
    /// Sweep a rational parameter grid and emit CSV region data (or curve
    /// samples with --curves-only)
    Sweep(SweepArgs),
    /// Evaluate a threshold curve at a point, or locate the h1/h21
    /// crossing a_int; emits JSON
    Threshold(ThresholdArgs),
    /// Run a named check suite and report PASS/FAIL
    Verify(VerifyArgs),
    /// Evaluate a functional of a measure file, or transform the measure;
    /// emits JSON
    Measure(MeasureArgs),
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Parametric family name (currently `figure0`)
    #[arg(long, conflicts_with = "field", required_unless_present = "field")]
    pub family: Option<String>,
    /// Family parameter `a` as an exact rational `p/q`
    #[arg(long, conflicts_with = "a_sq")]
    pub a: Option<String>,
    /// Family parameter `κ` as an exact rational `p/q`
    #[arg(long, conflicts_with = "kappa_sq")]
    pub kappa: Option<String>,
    /// Squared parameter `a²` (for points with irrational `a`)
    #[arg(long)]
    pub a_sq: Option<String>,
    /// Squared parameter `κ²`
    #[arg(long)]
    pub kappa_sq: Option<String>,
    /// Weight-field JSON file (generic input instead of a family)
    #[arg(long, value_name = "PATH")]
    pub field: Option<PathBuf>,
    /// Truncation depth for the subnormality pipeline on --field inputs
    #[arg(long, default_value_t = 6)]
    pub depth: u32,
    /// Tester window for --field inputs (default: as large as the stored
    /// rectangle allows)
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Range for `a`: `lo:hi:step` in exact rationals, or a single value
    #[arg(long)]
    pub a: String,
    /// Range for `κ`: `lo:hi:step` in exact rationals, or a single value
    #[arg(long, required_unless_present = "curves_only")]
    pub kappa: Option<String>,
    /// Emit curve samples `a,h1,h21,h2,hinf` instead of region cells
    #[arg(long)]
    pub curves_only: bool,
    /// Fractional digits for --curves-only decimals
    #[arg(long, default_value_t = 12)]
    pub digits: usize,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    /// Curve token: h1 | h2 | h21 | hinf | a_int
    pub curve: String,
    /// Evaluation point `a` as an exact rational (curve tokens only)
    #[arg(long, conflicts_with = "a_sq")]
    pub a: Option<String>,
    /// Evaluation point as its exact square `a²`
    #[arg(long)]
    pub a_sq: Option<String>,
    /// Bisection tolerance for a_int
    #[arg(long, default_value = "1/1000000000")]
    pub tol: String,
    /// Fractional digits for the decimal rendering
    #[arg(long, default_value_t = 12)]
    pub digits: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Check suite: firstmain | powhyp | thm1 | pro1 | tc_propagation |
    /// equivalent | four | thm4 | conjecture
    pub name: String,
    /// Instance count for the randomized suites (per-suite default
    /// otherwise)
    #[arg(long)]
    pub instances: Option<usize>,
    /// RNG seed for the randomized suites (per-suite default otherwise)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Emit the report as JSON instead of text
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    /// Measure JSON file
    #[arg(long, value_name = "PATH")]
    pub file: PathBuf,
    /// Functional or transform: mass | moment | inv-t-norm | inv-t-part |
    /// t-weight | power
    #[arg(long)]
    pub op: String,
    /// Moment order for --op moment
    #[arg(long)]
    pub k: Option<u32>,
    /// Drop count for --op t-weight
    #[arg(long)]
    pub j: Option<u32>,
    /// Normalizer γ for --op t-weight (defaults to the j-th moment)
    #[arg(long)]
    pub gamma: Option<String>,
    /// Exponent for --op power
    #[arg(long)]
    pub l: Option<u32>,
    /// Fractional digits for decimal renderings
    #[arg(long, default_value_t = 12)]
    pub digits: usize,
}

/// Parse `args` and execute: `(exit code, stdout payload, stderr payload)`.
/// The binary wrapper prints the payloads; keeping them as strings makes
/// every command reproducible byte-for-byte and directly testable.
pub fn run<I, T>(args: I) -> (u8, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    (0, rendered, String::new())
                }
                _ => (2, String::new(), rendered),
            };
        }
    };
    match dispatch(&cli.command) {
        Ok((payload, code)) => match &cli.out {
            Some(path) => match std::fs::write(path, &payload) {
                Ok(()) => (code, String::new(), String::new()),
                Err(e) => (
                    2,
                    String::new(),
                    format!("error: cannot write {}: {e}\n", path.display()),
                ),
            },
            None => (code, payload, String::new()),
        },
        Err(e) => (exit_code(&e), String::new(), format!("error: {e}\n")),
    }
}

/// Exit-code contract: input/usage problems are `2`, failed or
/// uncertifiable mathematics is `1`.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invalid(_)
        | Error::Parse(_)
        | Error::Io(_)
        | Error::Domain(_)
        | Error::OutOfRect(_) => 2,
        Error::Mismatch(_) | Error::Undecided(_) | Error::Precision(_) | Error::Infinite(_) => 1,
    }
}

fn dispatch(cmd: &Command) -> Result<(String, u8)> {
    match cmd {
        Command::Classify(a) => Ok((run_classify(a)?, 0)),
        Command::Sweep(a) => Ok((run_sweep(a)?, 0)),
        Command::Threshold(a) => Ok((run_threshold(a)?, 0)),
        Command::Verify(a) => run_verify_cmd(a),
        Command::Measure(a) => Ok((run_measure(a)?, 0)),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always render");
    s.push('\n');
    s
}

// ---- classify ----

/// Parse a parameter given either directly (`name`) or as its exact
/// square (`name_sq`); returns the square.
fn square_of(
    direct: &Option<String>,
    squared: &Option<String>,
    name: &str,
) -> Result<Rat> {
    match (direct, squared) {
        (Some(v), None) => {
            let r = parse_rat(v)?;
            Ok(&r * &r)
        }
        (None, Some(v)) => parse_rat(v),
        (None, None) => Err(Error::Invalid(format!(
            "missing parameter: give --{name} or --{name}-sq"
        ))),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with forbids this"),
    }
}

fn run_classify(args: &ClassifyArgs) -> Result<String> {
    if let Some(path) = &args.field {
        return classify_field(path, args.depth, args.window);
    }
    match args.family.as_deref() {
        Some("figure0") => {
            let a_sq = square_of(&args.a, &args.a_sq, "a")?;
            let kappa_sq = square_of(&args.kappa, &args.kappa_sq, "kappa")?;
            let p = Figure0Params::from_squares(a_sq, kappa_sq)?;
            let record = classify_figure0(&p)?;
            let v = serde_json::to_value(&record)
                .map_err(|e| Error::Invalid(format!("cannot serialize record: {e}")))?;
            Ok(pretty(&v))
        }
        Some(other) => Err(Error::Invalid(format!(
            "unknown family `{other}`; available: figure0"
        ))),
        None => Err(Error::Invalid(
            "give --family <name> or --field <path>".into(),
        )),
    }
}

fn status_str(s: &Status) -> &'static str {
    match s {
        Status::Holds => "holds",
        Status::Fails => "fails",
        Status::Undecided => "undecided",
    }
}

fn trilean_str(t: Trilean) -> &'static str {
    match t {
        Trilean::True => "true",
        Trilean::False => "false",
        Trilean::Undecided => "undecided",
    }
}

/// Classify a generic weight field loaded from JSON: tensor screen, then
/// the subnormality pipeline, then the k-hyponormality testers.
fn classify_field(path: &PathBuf, depth: u32, window: Option<usize>) -> Result<String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let json: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let field = WeightField::from_json(&json)?;
    let (r1, r2) = field.rect();

    let commuting = field.check_commuting()?;
    if commuting.status == Trilean::False {
        return Err(Error::Invalid(format!(
            "the field does not commute: {}",
            commuting.detail
        )));
    }

    let mut certificates = vec![format!("commutativity audit: {}", commuting.detail)];
    let tensor = field.is_tensor_form();

    // Window sized to the stored rectangle unless the caller pins it; the
    // k-hyponormality tester needs a margin of 2k+1 on each side.
    let win = |k: usize| -> usize {
        window.unwrap_or_else(|| r1.min(r2).saturating_sub(2 * k + 1).max(1))
    };
    let v1 = field.is_k_hyponormal_pair(1, win(1))?;
    let v2 = field.is_k_hyponormal_pair(2, win(2))?;
    certificates.push(format!("k=1 tester: {}", v1.detail));
    certificates.push(format!("k=2 tester: {}", v2.detail));

    // The pipeline needs measure attachments; a bare rectangle simply
    // leaves subnormality undecided.  A certification mismatch inside the
    // pipeline is still a hard error.
    let subnormal = match crate::shift2::tc::subnormal_backext2(&field, depth) {
        Ok(rep) => {
            certificates.push(format!("subnormality pipeline: {}", rep.detail));
            rep.subnormal
        }
        Err(Error::Mismatch(m)) => return Err(Error::Mismatch(m)),
        Err(e) => {
            certificates.push(format!("subnormality pipeline unavailable: {e}"));
            Trilean::Undecided
        }
    };

    let label = if tensor == Trilean::True {
        "H_inf (tensor)"
    } else if subnormal == Trilean::True {
        "H_inf"
    } else if v1.status == Status::Fails {
        "not_H1"
    } else if v2.status == Status::Fails {
        "H1_not_H2"
    } else {
        "H2_window"
    };
    if label.starts_with("H_inf") && v1.status == Status::Fails {
        return Err(Error::Mismatch(format!(
            "subnormality certified but the k=1 tester fails: {}",
            v1.detail
        )));
    }

    let mut root = serde_json::Map::new();
    root.insert("family".into(), "field".into());
    root.insert("source".into(), path.display().to_string().into());
    root.insert("rect".into(), serde_json::json!([r1, r2]));
    root.insert("commuting".into(), trilean_str(commuting.status).into());
    root.insert("tensor_form".into(), trilean_str(tensor).into());
    root.insert("label".into(), label.into());
    root.insert(
        "k_hypo".into(),
        serde_json::json!({
            "k1": status_str(&v1.status),
            "k2": status_str(&v2.status),
        }),
    );
    root.insert("subnormal".into(), trilean_str(subnormal).into());
    root.insert(
        "certificates".into(),
        serde_json::Value::Array(certificates.into_iter().map(Into::into).collect()),
    );
    Ok(pretty(&serde_json::Value::Object(root)))
}

// ---- sweep ----

/// Parse `lo:hi:step` (or a single value) into the inclusive sample list.
fn parse_range(text: &str, what: &str) -> Result<Vec<Rat>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![parse_rat(v)?]),
        [lo, hi, step] => {
            let lo = parse_rat(lo)?;
            let hi = parse_rat(hi)?;
            let step = parse_rat(step)?;
            if step <= Rat::from_integer(0.into()) {
                return Err(Error::Invalid(format!(
                    "range step for {what} must be positive; got {step}"
                )));
            }
            if lo > hi {
                return Err(Error::Invalid(format!(
                    "empty range for {what}: {} > {}",
                    rat_to_string(&lo),
                    rat_to_string(&hi)
                )));
            }
            let mut out = Vec::new();
            let mut v = lo;
            while v <= hi {
                out.push(v.clone());
                v += &step;
            }
            Ok(out)
        }
        _ => Err(Error::Parse(format!(
            "range for {what} must be `lo:hi:step` or a single rational; got `{text}`"
        ))),
    }
}

fn run_sweep(args: &SweepArgs) -> Result<String> {
    let a_samples = parse_range(&args.a, "a")?;
    if args.curves_only {
        let mut out = String::from("a,h1,h21,h2,hinf\n");
        for a in &a_samples {
            let a_sq = a * a;
            let cell = |c: Curve| -> String {
                match c.value(&a_sq) {
                    Ok(v) => v.to_decimal(args.digits),
                    Err(_) => String::new(),
                }
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                rat_to_string(a),
                cell(Curve::H1),
                cell(Curve::H21),
                cell(Curve::H2),
                cell(Curve::HInf),
            ));
        }
        return Ok(out);
    }
    let kappa_text = args
        .kappa
        .as_ref()
        .ok_or_else(|| Error::Invalid("region sweeps need --kappa".into()))?;
    let k_samples = parse_range(kappa_text, "kappa")?;
    let mut out = String::from("a,kappa,in_h1,in_h2,in_hinf,power21_in_h1,label\n");
    for a in &a_samples {
        for k in &k_samples {
            let r = region_label(&(a * a), &(k * k))?;
            out.push_str(&format!(
                "{},{},{},{},{},{},\"{}\"\n",
                rat_to_string(a),
                rat_to_string(k),
                r.in_h1,
                r.in_h2,
                r.in_hinf,
                r.power21_in_h1,
                r.label,
            ));
        }
    }
    Ok(out)
}

// ---- threshold ----

fn run_threshold(args: &ThresholdArgs) -> Result<String> {
    let mut root = serde_json::Map::new();
    root.insert("curve".into(), args.curve.clone().into());
    if args.curve == "a_int" {
        let tol = parse_rat(&args.tol)?;
        let value_sq = curves::a_int_sq(&tol)?;
        let value = curves::a_int(&tol)?;
        root.insert("tol".into(), rat_to_string(&tol).into());
        root.insert("value_sq".into(), rat_to_string(&value_sq).into());
        root.insert("value".into(), value.to_decimal(args.digits).into());
    } else {
        let curve = Curve::parse(&args.curve)?;
        let a_sq = square_of(&args.a, &args.a_sq, "a")?;
        if let Some(a) = &args.a {
            root.insert("a".into(), rat_to_string(&parse_rat(a)?).into());
        }
        root.insert("a_sq".into(), rat_to_string(&a_sq).into());
        let value_sq = curve.value_sq(&a_sq)?;
        let value = curve.value(&a_sq)?;
        root.insert("value_sq".into(), rat_to_string(&value_sq).into());
        root.insert("value".into(), value.to_decimal(args.digits).into());
    }
    Ok(pretty(&serde_json::Value::Object(root)))
}

// ---- verify ----

fn run_verify_cmd(args: &VerifyArgs) -> Result<(String, u8)> {
    let report = run_verify(&args.name, args.instances, args.seed)?;
    let code = if report.pass { 0 } else { 1 };
    if args.json {
        let v = serde_json::to_value(&report)
            .map_err(|e| Error::Invalid(format!("cannot serialize report: {e}")))?;
        return Ok((pretty(&v), code));
    }
    let mut out = String::new();
    for line in &report.lines {
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&format!(
        "{}: {}\n",
        report.name,
        if report.pass { "PASS" } else { "FAIL" }
    ));
    Ok((out, code))
}

// ---- measure ----

/// Scalar as JSON: exact values carry `"exact"`, enclosures carry
/// endpoint strings; both carry a decimal rendering.
fn scalar_json(s: &Scalar, digits: usize) -> serde_json::Value {
    let mut m = serde_json::Map::new();
    match s.as_exact() {
        Some(r) => {
            m.insert("exact".into(), rat_to_string(r).into());
        }
        None => {
            m.insert("lo".into(), rat_to_string(s.lo()).into());
            m.insert("hi".into(), rat_to_string(s.hi()).into());
        }
    }
    m.insert("decimal".into(), s.to_decimal(digits).into());
    serde_json::Value::Object(m)
}

fn need<T: Copy>(v: &Option<T>, flag: &str, op: &str) -> Result<T> {
    v.ok_or_else(|| Error::Invalid(format!("--op {op} needs --{flag}")))
}

fn run_measure(args: &MeasureArgs) -> Result<String> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| Error::Io(format!("{}: {e}", args.file.display())))?;
    let json: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", args.file.display())))?;
    let mu = Measure1D::from_json(&json)?;

    let mut root = serde_json::Map::new();
    root.insert("op".into(), args.op.clone().into());
    match args.op.as_str() {
        "mass" => {
            root.insert("value".into(), scalar_json(&mu.total_mass(), args.digits));
        }
        "moment" => {
            let k = need(&args.k, "k", "moment")?;
            root.insert("k".into(), k.into());
            root.insert("value".into(), scalar_json(&mu.moment(k), args.digits));
        }
        "inv-t-norm" => match mu.inv_t_norm()? {
            crate::measures::Norm::Finite(v) => {
                root.insert("finite".into(), true.into());
                root.insert("value".into(), scalar_json(&v, args.digits));
            }
            crate::measures::Norm::Infinite => {
                root.insert("finite".into(), false.into());
            }
        },
        "inv-t-part" => {
            root.insert("measure".into(), mu.inv_t_part()?.to_json()?);
        }
        "t-weight" => {
            let j = need(&args.j, "j", "t-weight")?;
            let gamma = match &args.gamma {
                Some(g) => Scalar::from(parse_rat(g)?),
                None => mu.moment(j),
            };
            root.insert("j".into(), j.into());
            root.insert("gamma".into(), gamma.to_decimal(args.digits).into());
            root.insert("measure".into(), mu.t_weight(j, &gamma)?.to_json()?);
        }
        "power" => {
            let l = need(&args.l, "l", "power")?;
            root.insert("l".into(), l.into());
            root.insert("measure".into(), mu.power(l)?.to_json()?);
        }
        other => {
            return Err(Error::Invalid(format!(
                "unknown measure op `{other}`; available: mass, moment, inv-t-norm, inv-t-part, t-weight, power"
            )));
        }
    }
    Ok(pretty(&serde_json::Value::Object(root)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (u8, String, String) {
        run(args.iter().copied())
    }

    // ==== argument handling and exit codes ====

    #[test]
    fn usage_errors_exit_2() {
        let (code, out, err) = run_str(&["shiftlab", "nonsense"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(!err.is_empty());

        let (code, _, err) = run_str(&["shiftlab", "classify"]);
        assert_eq!(code, 2, "classify with no input must be a usage error");
        assert!(!err.is_empty());

        let (code, _, _) = run_str(&["shiftlab", "--help"]);
        assert_eq!(code, 0);
    }

    #[test]
    fn unknown_verify_suite_exits_2() {
        let (code, _, err) = run_str(&["shiftlab", "verify", "nope"]);
        assert_eq!(code, 2);
        assert!(err.contains("unknown check suite"));
    }

    #[test]
    fn bad_rational_exits_2() {
        let (code, _, err) = run_str(&[
            "shiftlab", "classify", "--family", "figure0", "--a", "zebra", "--kappa", "1/2",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("parse error") || err.contains("invalid input"));
    }

    // ==== classify ====

    #[test]
    fn classify_family_labels() {
        let (code, out, _) = run_str(&[
            "shiftlab", "classify", "--family", "figure0", "--a", "1/2", "--kappa", "1/2",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["label"], "H_inf");
        assert_eq!(v["params"]["a_sq"], "1/4");

        let (code, out, _) = run_str(&[
            "shiftlab", "classify", "--family", "figure0", "--a", "17/20", "--kappa", "99/100",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["label"], "H1_only, power21_not_H1");
    }

    #[test]
    fn classify_accepts_squared_parameters() {
        // a = 1/√2 is irrational; its square is exact.
        let (code, out, _) = run_str(&[
            "shiftlab", "classify", "--family", "figure0", "--a-sq", "1/2", "--kappa-sq", "9/13",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["label"], "H2_only");
    }

    // ==== sweep ====

    #[test]
    fn sweep_emits_region_csv() {
        let (code, out, _) = run_str(&[
            "shiftlab", "sweep", "--a", "1/2:1/2:1", "--kappa", "1/2:1:1/4",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "a,kappa,in_h1,in_h2,in_hinf,power21_in_h1,label");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "1/2,1/2,true,true,true,true,\"H_inf\"");
        assert!(lines[3].starts_with("1/2,1,"));
    }

    #[test]
    fn sweep_single_cell_matches_classify() {
        let (_, csv, _) = run_str(&["shiftlab", "sweep", "--a", "1/2", "--kappa", "17/20"]);
        let (_, json, _) = run_str(&[
            "shiftlab", "classify", "--family", "figure0", "--a", "1/2", "--kappa", "17/20",
        ]);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let row = csv.lines().nth(1).unwrap();
        let cells: Vec<&str> = row.splitn(7, ',').collect();
        assert_eq!(cells[2], v["in_h1"].to_string());
        assert_eq!(cells[3], v["in_h2"].to_string());
        assert_eq!(cells[4], v["in_hinf"].to_string());
        assert_eq!(cells[5], v["power21_in_h1"].to_string());
        assert_eq!(cells[6].trim_matches('"'), v["label"].as_str().unwrap());
    }

    #[test]
    fn sweep_curves_only() {
        let (code, out, _) = run_str(&[
            "shiftlab", "sweep", "--a", "1/4:3/4:1/4", "--curves-only",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "a,h1,h21,h2,hinf");
        assert_eq!(lines.len(), 4);
        // Beyond a² = 1/2 the h2 and h∞ columns are empty.
        let last: Vec<&str> = lines[3].split(',').collect();
        assert_eq!(last[0], "3/4");
        assert!(!last[1].is_empty() && !last[2].is_empty());
        assert!(last[3].is_empty() && last[4].is_empty());
    }

    #[test]
    fn sweep_empty_range_exits_2() {
        let (code, _, err) = run_str(&[
            "shiftlab", "sweep", "--a", "3/4:1/4:1/4", "--kappa", "1/2",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("empty range"));
    }

    // ==== threshold ====

    #[test]
    fn threshold_curve_values() {
        let (code, out, _) = run_str(&["shiftlab", "threshold", "h1", "--a", "1/2"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["a_sq"], "1/4");
        assert_eq!(v["value_sq"], "29/41");

        let (code, out, _) = run_str(&["shiftlab", "threshold", "hinf", "--a-sq", "1/2"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value_sq"], "2/3");
    }

    #[test]
    fn threshold_a_int() {
        let (code, out, _) = run_str(&["shiftlab", "threshold", "a_int"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let dec = v["value"].as_str().unwrap();
        assert!(dec.starts_with("0.8386"), "a_int = {dec}");
    }

    #[test]
    fn threshold_out_of_domain_exits_2() {
        let (code, _, err) = run_str(&["shiftlab", "threshold", "h2", "--a", "9/10"]);
        assert_eq!(code, 2);
        assert!(err.contains("domain"));
    }

    // ==== verify ====

    #[test]
    fn verify_reports_pass_and_echoes_seed() {
        let (code, out, _) = run_str(&[
            "shiftlab", "verify", "thm1", "--instances", "12", "--seed", "7",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("seed 7"));
        assert!(out.ends_with("thm1: PASS\n"));

        let (code, out, _) = run_str(&[
            "shiftlab", "verify", "thm1", "--instances", "12", "--seed", "7", "--json",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["name"], "thm1");
        assert_eq!(v["pass"], true);
    }

    // ==== measure ====

    #[test]
    fn measure_ops_round_trip() {
        let dir = std::env::temp_dir().join("shiftlab-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.json");
        // (1/4)δ_0 + (3/4)δ_1 — the subnormal completion measure of S_{√(3/4)}.
        std::fs::write(
            &path,
            r#"{"atoms":[{"c":"0","w":"1/4"},{"c":"1","w":"3/4"}],"pieces":[]}"#,
        )
        .unwrap();
        let p = path.to_str().unwrap();

        let (code, out, _) = run_str(&["shiftlab", "measure", "--file", p, "--op", "mass"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"]["exact"], "1");

        let (_, out, _) = run_str(&[
            "shiftlab", "measure", "--file", p, "--op", "moment", "--k", "3",
        ]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"]["exact"], "3/4");

        // 1/t is not integrable against a measure with an atom at 0.
        let (code, out, _) = run_str(&["shiftlab", "measure", "--file", p, "--op", "inv-t-norm"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["finite"], false);

        // t-weight(1) drops the 0-atom and renormalizes: δ_1.
        let (_, out, _) = run_str(&[
            "shiftlab", "measure", "--file", p, "--op", "t-weight", "--j", "1",
        ]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["measure"]["atoms"][0]["c"], "1");
        assert_eq!(v["measure"]["atoms"][0]["w"], "1");

        let (code, _, err) = run_str(&["shiftlab", "measure", "--file", p, "--op", "moment"]);
        assert_eq!(code, 2);
        assert!(err.contains("--k"));
    }

    // ==== determinism ====

    #[test]
    fn reruns_are_byte_identical() {
        let args = [
            "shiftlab", "classify", "--family", "figure0", "--a", "2/5", "--kappa", "4/5",
        ];
        assert_eq!(run_str(&args), run_str(&args));
        let args = ["shiftlab", "verify", "tc_propagation", "--seed", "2"];
        assert_eq!(run_str(&args), run_str(&args));
    }
}
