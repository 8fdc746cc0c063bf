//! Command-line interface.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::arith;
use crate::dsl;
use crate::expr::{Expr, Identity, SeriesEvaluator};
use crate::identities::{self, SuiteReport, VerificationReport, DEFAULT_WINDOW};
use crate::numeric::SamplePlan;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "thetaconst", version, about = "Exact and numeric checks of theta-constant identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the exact expansion of a theta constant or its normalized derivative.
    Expand {
        /// Characteristic as `E,E'`, e.g. `1/4,3/4`.
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Expand at kτ for this k.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        scale: u32,
        /// Expand `θ′/(2πi)` instead of `θ`.
        #[arg(long)]
        deriv: bool,
        /// Window length in powers of x.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        order: u32,
        /// Denominator D of the exponent grid x^(e/D); defaults to the natural one.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        grading: Option<u32>,
        /// Emit a JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Verify one registered identity.
    Verify {
        /// Registered record name.
        #[arg(long)]
        id: String,
        /// Window length in powers of x.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        order: Option<u32>,
        /// Emit a JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Verify every registered identity whose name matches the glob filter.
    VerifyAll {
        /// Glob over record names, e.g. `prop-4-*`.
        #[arg(long)]
        filter: Option<String>,
        /// Emit a JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Parse an identity file and verify each identity exactly.
    VerifyFile {
        /// File with one identity per line; `#` starts a comment.
        path: PathBuf,
        /// Window length in powers of x.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        order: Option<u32>,
        /// Denominator D of the exponent grid x^(e/D); defaults to the natural one.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        grading: Option<u32>,
        /// Emit a JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Tabulate the closed forms for x² + y² and x² + 2y² against lattice counts.
    Sumsq {
        /// Largest n to tabulate.
        #[arg(long)]
        max: u64,
        /// Emit a JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run a registered identity in numeric mode at seeded sample points.
    NumericCheck {
        /// Registered record name.
        #[arg(long)]
        id: String,
        /// Number of seeded (τ, ζ) samples.
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Seed for the ChaCha8 sample stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the record's residual tolerance.
        #[arg(long, value_parser = positive_f64)]
        tol: Option<f64>,
        /// Emit a JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
}

/// Runs the CLI with process stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI writing to the given streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return if code == 0 { EXIT_PASS } else { EXIT_USAGE };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn print_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(v).map_err(|e| e.to_string())?;
    writeln!(out, "{text}").map_err(|e| e.to_string())
}

fn human_line(r: &VerificationReport) -> String {
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    let mut s = format!("{verdict} {} [{}]", r.name, serde_json::to_value(r.mode).unwrap().as_str().unwrap_or(""));
    if let Some(c) = &r.cutoff {
        s.push_str(&format!(" window x^{c}"));
    }
    if let Some(e) = &r.first_bad_exponent {
        let label = if r.erratum { "refuted at" } else { "first bad exponent" };
        s.push_str(&format!(" {label} x^{e}"));
        if let Some(c) = &r.first_bad_coefficient {
            s.push_str(&format!(" coefficient {}", c.minimal_form()));
        }
    }
    if let Some(w) = r.worst_residual {
        s.push_str(&format!(" worst residual {w:.3e}"));
    }
    if let Some(e) = &r.error {
        s.push_str(&format!(" error: {e}"));
    }
    s.push_str(&format!(" ({:.1} ms)", r.elapsed_ms));
    s
}

fn report_suite(out: &mut dyn Write, reports: Vec<VerificationReport>, json: bool) -> Result<i32, String> {
    let suite = SuiteReport::new(reports);
    if json {
        print_json(out, &suite)?;
    } else {
        for r in &suite.records {
            writeln!(out, "{}", human_line(r)).map_err(|e| e.to_string())?;
        }
        writeln!(out, "{} passed, {} failed, {} total", suite.passed, suite.failed, suite.total).map_err(|e| e.to_string())?;
    }
    Ok(if suite.failed == 0 { EXIT_PASS } else { EXIT_FAIL })
}

fn report_one(out: &mut dyn Write, r: &VerificationReport, json: bool) -> Result<i32, String> {
    if json {
        print_json(out, r)?;
    } else {
        writeln!(out, "{}", human_line(r)).map_err(|e| e.to_string())?;
    }
    Ok(if r.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, String> {
    match cmd {
        Command::Expand {
            theta,
            scale,
            deriv,
            order,
            grading,
            json,
        } => expand(out, &theta, scale, deriv, order, grading, json),
        Command::Verify { id, order, json } => {
            let rec = identities::find(&id).map_err(|e| e.to_string())?;
            let rep = match rec.mode() {
                identities::Mode::Exact => identities::verify_exact(rec, order),
                identities::Mode::Numeric => identities::verify_numeric(rec, &SamplePlan::default(), None),
            }
            .map_err(|e| e.to_string())?;
            report_one(out, &rep, json)
        }
        Command::VerifyAll { filter, json } => report_suite(out, identities::verify_all(filter.as_deref()), json),
        Command::VerifyFile {
            path,
            order,
            grading,
            json,
        } => {
            let src = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let parsed = dsl::parse_file(&src).map_err(|e| format!("{}:{e}", path.display()))?;
            let mut reports = Vec::new();
            for (line, id) in parsed {
                let name = format!("{}:{line}", path.display());
                let el = dsl::elaborate(id, grading).map_err(|e| format!("{name}: {e}"))?;
                let rec = identities::IdentityRecord::form(name, "identity file", el.identity.lhs, el.identity.rhs)
                    .with_grading(el.grading)
                    .with_window(order.unwrap_or(DEFAULT_WINDOW));
                reports.push(identities::verify_exact(&rec, None).map_err(|e| e.to_string())?);
            }
            report_suite(out, reports, json)
        }
        Command::Sumsq { max, json } => sumsq(out, max, json),
        Command::NumericCheck {
            id,
            samples,
            seed,
            tol,
            json,
        } => {
            let rec = identities::find(&id).map_err(|e| e.to_string())?;
            let plan = SamplePlan::with_seed(seed, samples as usize);
            let rep = identities::verify_numeric(rec, &plan, tol).map_err(|e| e.to_string())?;
            report_one(out, &rep, json)
        }
    }
}

fn expand(out: &mut dyn Write, theta: &str, scale: u32, deriv: bool, order: u32, grading: Option<u32>, json: bool) -> Result<i32, String> {
    let name = if deriv { "dtheta" } else { "theta" };
    let text = format!("{name}[{theta}]({scale})");
    let expr: Expr = dsl::parse_expr(&text).map_err(|e| format!("invalid characteristic {theta:?}: {}", e.message))?;
    if !matches!(expr, Expr::Atom(_)) {
        return Err(format!("invalid characteristic {theta:?}"));
    }
    let el = dsl::elaborate(Identity::new(expr, Expr::zero()), grading).map_err(|e| e.to_string())?;
    let d = el.grading;
    let mut ev = SeriesEvaluator::new(d, i64::from(order) * i64::from(d));
    let s = ev.eval(&el.identity.lhs).map_err(|e| e.to_string())?;
    let s = s.embed_order(el.order).map_err(|e| e.to_string())?;
    let exp_text = |e: i64| crate::expr::fmt_rational(&num_rational::BigRational::new(e.into(), i64::from(d).into()));
    if json {
        let terms: Vec<_> = s
            .terms()
            .map(|(e, c)| {
                let z = c.to_complex();
                json!({
                    "exponent": exp_text(e),
                    "coords": c.coords().iter().map(crate::expr::fmt_rational).collect::<Vec<_>>(),
                    "approx": [z.re, z.im],
                })
            })
            .collect();
        print_json(
            out,
            &json!({
                "atom": text,
                "grading": d,
                "cyclotomic_order": el.order,
                "cutoff": exp_text(s.cutoff().min(i64::from(order) * i64::from(d))),
                "terms": terms,
            }),
        )?;
    } else {
        let mut w = |s: String| -> Result<(), String> { writeln!(out, "{s}").map_err(|e| e.to_string()) };
        w(format!("{text}: grading {d}, cyclotomic order {}", el.order))?;
        for (e, c) in s.terms() {
            let z = c.to_complex();
            let coords: Vec<String> = c.coords().iter().map(crate::expr::fmt_rational).collect();
            w(format!(
                "x^{}: {}  [{}]  ≈ {:.12} {:+.12}i",
                exp_text(e),
                c.minimal_form(),
                coords.join(", "),
                z.re,
                z.im
            ))?;
        }
        w(format!("+ O(x^{})", exp_text(s.cutoff().min(i64::from(order) * i64::from(d)) + 1)))?;
    }
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct SumsqRow {
    n: u64,
    s2: i64,
    s12: i64,
    s2_lattice: u64,
    s12_lattice: u64,
    agree: bool,
}

fn sumsq(out: &mut dyn Write, max: u64, json: bool) -> Result<i32, String> {
    const LIMIT: u64 = 1_000_000;
    if max > LIMIT {
        return Err(format!("--max must be at most {LIMIT}"));
    }
    let rows: Vec<SumsqRow> = (1..=max)
        .map(|n| {
            let (s2, s12) = (arith::s2_formula(n), arith::s12_formula(n));
            let (l2, l12) = (arith::s2_lattice(n), arith::s12_lattice(n));
            SumsqRow {
                n,
                s2,
                s12,
                s2_lattice: l2,
                s12_lattice: l12,
                agree: s2 == l2 as i64 && s12 == l12 as i64,
            }
        })
        .collect();
    let all = rows.iter().all(|r| r.agree);
    if json {
        print_json(out, &json!({ "max": max, "all_agree": all, "rows": rows }))?;
    } else {
        writeln!(out, "{:>8} {:>8} {:>8} {:>10} {:>10}  agree", "n", "S2", "S12", "S2 lat", "S12 lat").map_err(|e| e.to_string())?;
        for r in &rows {
            writeln!(
                out,
                "{:>8} {:>8} {:>8} {:>10} {:>10}  {}",
                r.n,
                r.s2,
                r.s12,
                r.s2_lattice,
                r.s12_lattice,
                if r.agree { "yes" } else { "NO" }
            )
            .map_err(|e| e.to_string())?;
        }
    }
    Ok(if all { EXIT_PASS } else { EXIT_FAIL })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("thetaconst").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_capture(&["verify", "--id", "thm-1-1", "--order", "20"]).0, 0);
        let (code, _, err) = run_capture(&["verify", "--id", "no-such"]);
        assert_eq!(code, 2);
        assert!(err.contains("no-such"));
        assert_eq!(run_capture(&["verify", "--bogus"]).0, 2);
        assert_eq!(run_capture(&["expand", "--theta", "1/5,1/150"]).0, 2);
    }

    #[test]
    fn sumsq_table() {
        let (code, out, _) = run_capture(&["sumsq", "--max", "10", "--json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rows"][4]["n"], 5);
        assert_eq!(v["rows"][4]["s2"], 8);
        assert_eq!(v["rows"][4]["agree"], true);
    }

    #[test]
    fn expand_quarter() {
        let (code, out, _) = run_capture(&["expand", "--theta", "1/4,1/4", "--order", "3", "--json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["grading"], 64);
        assert_eq!(v["cyclotomic_order"], 64);
        assert_eq!(v["terms"][0]["exponent"], "1/64");
        assert_eq!(v["terms"][0]["coords"].as_array().unwrap().len(), 32);
    }
}
