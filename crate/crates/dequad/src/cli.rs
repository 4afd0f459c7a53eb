//! Command-line front end: solve maps, run integrations and sweeps, emit
//! CSV tables and SVG convergence plots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::problems::{load_problem, builtin, BuiltinId, Problem};
use crate::quadrature::{self, setup, sweep, Method, SweepRecord};
use crate::transform::params_to_json;
use crate::{calibration, oracle};

#[derive(Parser)]
#[command(name = "dequad", about = "Double-exponential quadrature with singularity-aware maps", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the slit-map parameters for a problem and report defects.
    Solve {
        /// Built-in id (p51..p54) or path to a problem JSON file.
        problem: String,
        /// Transformation variant: new or new2.
        #[arg(long, default_value = "new")]
        method: String,
        /// Write the parameters as JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a problem with a fixed node count.
    Integrate {
        /// Built-in id (p51..p54) or path to a problem JSON file.
        problem: String,
        /// Method: de, new, or new2.
        #[arg(long)]
        method: String,
        /// One-sided node count n (2n+1 nodes total).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Run a convergence sweep over doubling node counts.
    Sweep {
        /// Built-in id (p51..p54) or path to a problem JSON file.
        problem: String,
        /// Comma-separated methods, e.g. de,new,new2.
        #[arg(long, default_value = "de,new,new2")]
        methods: String,
        /// Smallest one-sided node count.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n_min: u64,
        /// Largest one-sided node count (always included).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
        /// Also write the CSV table to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write a log-scale error-vs-n chart to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// List the built-in benchmark problems.
    List,
    /// Compute an independent adaptive Gauss-Kronrod reference value.
    Oracle {
        /// Built-in id (p51..p54) or path to a problem JSON file.
        problem: String,
        /// Absolute tolerance (at least 1e-10).
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Convergence { .. } => 3,
        Error::Eval { .. } | Error::Parse { .. } => 4,
        _ => 1,
    }
}

fn resolve_problem(spec: &str) -> Result<Problem> {
    if let Some(id) = BuiltinId::parse(spec) {
        return Ok(builtin(id));
    }
    load_problem(Path::new(spec))
}

fn parse_method(s: &str) -> Result<Method> {
    Method::parse(s).ok_or_else(|| Error::Parse {
        field: Some("method".into()),
        msg: format!("unknown method {s:?}; expected de, new, or new2"),
    })
}

/// Doubling sequence n_min, 2 n_min, ... capped at and including n_max.
fn n_sequence(n_min: usize, n_max: usize) -> Vec<usize> {
    let mut ns = Vec::new();
    let mut n = n_min;
    while n < n_max {
        ns.push(n);
        n *= 2;
    }
    ns.push(n_max);
    ns
}

/// Render sweep records as CSV with fixed 17-significant-digit floats.
pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from("method,n,h,value,abs_error,elapsed_ns\n");
    for r in records {
        let abs_error = match r.abs_error {
            Some(e) => format!("{e:.16e}"),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},{},{}",
            r.method.as_str(),
            r.n,
            r.h,
            r.value,
            abs_error,
            r.elapsed.as_nanos()
        );
    }
    out
}

/// Parse CSV produced by [`records_to_csv`] back into records.
pub fn records_from_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let parse_err = |msg: String| Error::Parse { field: None, msg };
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err("empty CSV".into()))?;
    if header != "method,n,h,value,abs_error,elapsed_ns" {
        return Err(parse_err(format!("unexpected CSV header {header:?}")));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(parse_err(format!("row {} has {} columns", i + 2, cols.len())));
        }
        let method = parse_method(cols[0])?;
        let field = |j: usize, name: &str| -> Result<f64> {
            cols[j]
                .parse::<f64>()
                .map_err(|e| parse_err(format!("row {} field {name}: {e}", i + 2)))
        };
        records.push(SweepRecord {
            method,
            n: cols[1]
                .parse()
                .map_err(|e| parse_err(format!("row {} field n: {e}", i + 2)))?,
            h: field(2, "h")?,
            value: field(3, "value")?,
            abs_error: if cols[4].is_empty() {
                None
            } else {
                Some(field(4, "abs_error")?)
            },
            elapsed: Duration::from_nanos(
                cols[5]
                    .parse()
                    .map_err(|e| parse_err(format!("row {} field elapsed_ns: {e}", i + 2)))?,
            ),
            error: None,
        });
    }
    Ok(records)
}

/// Hand-written SVG chart: log10 |error| against n, one polyline per method.
pub fn records_to_svg(records: &[SweepRecord]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const ML: f64 = 60.0;
    const MR: f64 = 20.0;
    const MT: f64 = 20.0;
    const MB: f64 = 50.0;
    let pts: Vec<(Method, usize, f64)> = records
        .iter()
        .filter_map(|r| {
            r.abs_error
                .filter(|e| e.is_finite() && *e > 0.0)
                .map(|e| (r.method, r.n, e.log10()))
        })
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    if pts.is_empty() {
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">no error data</text>",
            W / 2.0,
            H / 2.0
        );
        svg.push_str("</svg>\n");
        return svg;
    }
    let n_min = pts.iter().map(|p| p.1).min().unwrap() as f64;
    let n_max = pts.iter().map(|p| p.1).max().unwrap() as f64;
    let y_min = pts.iter().map(|p| p.2).fold(f64::INFINITY, f64::min).floor();
    let y_max = pts.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max).ceil();
    let (y_min, y_max) = if y_min == y_max {
        (y_min - 1.0, y_max + 1.0)
    } else {
        (y_min, y_max)
    };
    let sx = |n: f64| {
        if n_max > n_min {
            ML + (n - n_min) / (n_max - n_min) * (W - ML - MR)
        } else {
            (ML + W - MR) / 2.0
        }
    };
    let sy = |y: f64| MT + (y_max - y) / (y_max - y_min) * (H - MT - MB);
    // Axes.
    let _ = writeln!(
        svg,
        "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        H - MB,
        W - MR,
        H - MB
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>",
        H - MB
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">n</text>",
        (ML + W - MR) / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" font-size=\"14\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">log10 |error|</text>",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0
    );
    // Sparse tick labels at the extremes.
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
        sx(n_min),
        H - MB + 18.0,
        n_min as usize
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
        sx(n_max),
        H - MB + 18.0,
        n_max as usize
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"12\">{y_max}</text>",
        ML - 6.0,
        sy(y_max) + 4.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"12\">{y_min}</text>",
        ML - 6.0,
        sy(y_min) + 4.0
    );
    let color = |m: Method| match m {
        Method::De => "#7f7f7f",
        Method::New => "#d62728",
        Method::New2 => "#1f77b4",
    };
    for method in [Method::De, Method::New, Method::New2] {
        let mut series: Vec<(usize, f64)> = pts
            .iter()
            .filter(|p| p.0 == method)
            .map(|p| (p.1, p.2))
            .collect();
        if series.is_empty() {
            continue;
        }
        series.sort_by_key(|p| p.0);
        let path: Vec<String> = series
            .iter()
            .map(|(n, y)| format!("{:.2},{:.2}", sx(*n as f64), sy(*y)))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>",
            color(method),
            path.join(" ")
        );
        let (ln, ly) = *series.last().unwrap();
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"{}\">{}</text>",
            (sx(ln as f64) - 30.0).max(ML),
            sy(ly) - 6.0,
            color(method),
            method.as_str()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn cmd_solve(problem: &str, method: &str, out: Option<&Path>) -> Result<()> {
    let problem = resolve_problem(problem)?;
    let method = parse_method(method)?;
    if method == Method::De {
        return Err(Error::Parse {
            field: Some("method".into()),
            msg: "solve applies to the slit-map methods new and new2".into(),
        });
    }
    let s = setup(&problem, method)?;
    let mapped =
        crate::endpoint_maps::collect_singularities(problem.kind, &problem.singularities)?;
    let report = calibration::validate_params(&s.params, &s.calibration, &mapped)?;
    let json = params_to_json(&s.params);
    println!("{json}");
    println!("beta2 = {:.16e}", s.beta2);
    println!("telescoping defect = {:.3e}", report.telescoping);
    for (k, d) in report.boundary.iter().enumerate() {
        println!("boundary defect[{k}] = {d:.3e}");
    }
    for (j, d) in report.slit.iter().enumerate() {
        println!("slit defect[{j}] = {d:.3e}");
    }
    if let Some(path) = out {
        std::fs::write(path, json + "\n").map_err(|e| Error::Domain(e.to_string()))?;
    }
    Ok(())
}

fn cmd_integrate(problem: &str, method: &str, n: usize) -> Result<()> {
    let problem = resolve_problem(problem)?;
    let method = parse_method(method)?;
    let s = setup(&problem, method)?;
    let r = quadrature::integrate(&problem, &s.params, s.beta2, n)?;
    println!("value = {:.16e}", r.value);
    println!("h = {:.16e}", r.h);
    match problem.reference {
        Some(re) => println!("abs_error = {:.16e}", (r.value - re).abs()),
        None => println!("abs_error = unavailable (no reference)"),
    }
    Ok(())
}

fn cmd_sweep(
    problem: &str,
    methods: &str,
    n_min: usize,
    n_max: usize,
    csv: Option<&Path>,
    svg: Option<&Path>,
) -> Result<()> {
    if n_min > n_max {
        return Err(Error::Parse {
            field: Some("n-min".into()),
            msg: format!("n-min ({n_min}) exceeds n-max ({n_max})"),
        });
    }
    let problem = resolve_problem(problem)?;
    let methods: Vec<Method> = methods
        .split(',')
        .map(|s| parse_method(s.trim()))
        .collect::<Result<_>>()?;
    let ns = n_sequence(n_min, n_max);
    let mut records = Vec::new();
    for &m in &methods {
        records.extend(sweep(&problem, m, &ns)?);
    }
    let table = records_to_csv(&records);
    print!("{table}");
    if let Some(path) = csv {
        std::fs::write(path, &table).map_err(|e| Error::Domain(e.to_string()))?;
    }
    if let Some(path) = svg {
        std::fs::write(path, records_to_svg(&records))
            .map_err(|e| Error::Domain(e.to_string()))?;
    }
    Ok(())
}

fn cmd_list() -> Result<()> {
    for id in BuiltinId::ALL {
        let p = builtin(id);
        println!("{}  {}", id.as_str(), p.name);
    }
    Ok(())
}

fn cmd_oracle(problem: &str, tol: f64) -> Result<()> {
    let problem = resolve_problem(problem)?;
    let v = oracle::reference_integrate(&problem, tol)?;
    println!("reference = {v:.16e}");
    Ok(())
}

/// Parse and execute; returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // Clap renders --help/--version through the same channel.
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve {
            problem,
            method,
            out,
        } => cmd_solve(&problem, &method, out.as_deref()),
        Command::Integrate { problem, method, n } => cmd_integrate(&problem, &method, n as usize),
        Command::Sweep {
            problem,
            methods,
            n_min,
            n_max,
            csv,
            svg,
        } => cmd_sweep(
            &problem,
            &methods,
            n_min as usize,
            n_max as usize,
            csv.as_deref(),
            svg.as_deref(),
        ),
        Command::List => cmd_list(),
        Command::Oracle { problem, tol } => cmd_oracle(&problem, tol),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{builtin, BuiltinId};

    #[test]
    fn n_sequence_doubles_and_includes_max() {
        assert_eq!(n_sequence(10, 80), vec![10, 20, 40, 80]);
        assert_eq!(n_sequence(10, 100), vec![10, 20, 40, 80, 100]);
        assert_eq!(n_sequence(60, 60), vec![60]);
    }

    #[test]
    fn csv_round_trip_is_identical() {
        let problem = builtin(BuiltinId::P51);
        let records = sweep(&problem, Method::New, &[10, 20, 40]).unwrap();
        let text = records_to_csv(&records);
        let parsed = records_from_csv(&text).unwrap();
        assert_eq!(records.len(), parsed.len());
        for (a, b) in records.iter().zip(&parsed) {
            assert_eq!(a.method, b.method);
            assert_eq!(a.n, b.n);
            assert_eq!(a.h.to_bits(), b.h.to_bits());
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(
                a.abs_error.map(f64::to_bits),
                b.abs_error.map(f64::to_bits)
            );
            assert_eq!(a.elapsed.as_nanos(), b.elapsed.as_nanos());
        }
    }

    #[test]
    fn csv_rejects_bad_header() {
        assert!(records_from_csv("a,b,c\n").is_err());
    }

    #[test]
    fn svg_has_one_polyline_per_method() {
        let problem = builtin(BuiltinId::P51);
        let mut records = sweep(&problem, Method::New, &[10, 20, 40]).unwrap();
        records.extend(sweep(&problem, Method::De, &[10, 20, 40]).unwrap());
        let svg = records_to_svg(&records);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
