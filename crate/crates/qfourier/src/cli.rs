//! Command-line front end: argument definitions, density and k-grid
//! string parsers, and the four command runners.
//!
//! Exit codes: 0 on success, 1 when a self-test check fails, 2 for
//! configuration errors (including argument parse failures), 3 for
//! numeric failures during an otherwise valid run. The `transform`
//! command validates the requested index up front and refuses values
//! outside `[1, 2)` rather than emitting the identically-zero transform.
//! The `QFOURIER_WORKERS` environment variable sets the worker-thread
//! count (default: one per logical CPU); results are identical for any
//! worker count.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::densities::{DensitySpec, TabulatedDensity};
use crate::equivalence::{build_class, verify_collapse, verify_separation};
use crate::error::{Error, Result};
use crate::inverse::{roundtrip, InverseConfig};
use crate::qkernel::DeformationParameter;
use crate::quad::QuadratureConfig;
use crate::report::{
    class_json, fmt_float, meta_entry, recovery_csv, recovery_json, transform_csv,
    transform_json, Meta,
};
use crate::selftest::{run_all, CHECK_NAMES};
use crate::transform::transform_batch;

/// Uniform real k-grid specification `min:max:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KGridSpec {
    pub k_min: f64,
    pub k_max: f64,
    pub n: usize,
}

impl KGridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_min.is_finite() && self.k_max.is_finite()) || self.k_min >= self.k_max {
            return Err(Error::InvalidGrid(format!(
                "need finite k_min < k_max, got {}:{}",
                self.k_min, self.k_max
            )));
        }
        if self.n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 grid points, got {}",
                self.n
            )));
        }
        Ok(())
    }

    /// The grid points, endpoints exact.
    pub fn points(&self) -> Vec<f64> {
        let step = (self.k_max - self.k_min) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.k_max
                } else {
                    self.k_min + i as f64 * step
                }
            })
            .collect()
    }
}

/// Parses `min:max:n` into a validated grid spec.
pub fn parse_k_grid(s: &str) -> Result<KGridSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidGrid(format!(
            "expected min:max:n, got '{s}'"
        )));
    }
    let k_min: f64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidGrid(format!("bad k_min '{}'", parts[0])))?;
    let k_max: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidGrid(format!("bad k_max '{}'", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Error::InvalidGrid(format!("bad point count '{}'", parts[2])))?;
    let spec = KGridSpec { k_min, k_max, n };
    spec.validate()?;
    Ok(spec)
}

/// Parses a density specification string: `hilhorst:a=1,b=2,q=1.5`,
/// `qgaussian:q=1.5,width=1`, or `tabulated:path=f.csv`.
pub fn parse_density(s: &str, qcfg: &QuadratureConfig) -> Result<DensitySpec> {
    let (name, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidDensity(format!("expected name:key=val,..., got '{s}'")))?;
    let mut pairs = Vec::new();
    for item in rest.split(',') {
        let (k, v) = item.split_once('=').ok_or_else(|| {
            Error::InvalidDensity(format!("expected key=val, got '{item}' in '{s}'"))
        })?;
        if pairs.iter().any(|(pk, _)| *pk == k) {
            return Err(Error::InvalidDensity(format!("duplicate key '{k}' in '{s}'")));
        }
        pairs.push((k, v));
    }
    let get = |key: &str| -> Result<&str> {
        pairs
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::InvalidDensity(format!("missing key '{key}' in '{s}'")))
    };
    let get_f64 = |key: &str| -> Result<f64> {
        get(key)?
            .parse()
            .map_err(|_| Error::InvalidDensity(format!("key '{key}' is not a number in '{s}'")))
    };
    let expect_keys = |allowed: &[&str]| -> Result<()> {
        for (k, _) in &pairs {
            if !allowed.contains(k) {
                return Err(Error::InvalidDensity(format!(
                    "unknown key '{k}' for '{name}' in '{s}'"
                )));
            }
        }
        Ok(())
    };
    match name {
        "hilhorst" => {
            expect_keys(&["a", "b", "q"])?;
            let q = DeformationParameter::new(get_f64("q")?)?;
            DensitySpec::hilhorst(get_f64("a")?, get_f64("b")?, q)
        }
        "qgaussian" => {
            expect_keys(&["q", "width"])?;
            let q = DeformationParameter::new(get_f64("q")?)?;
            DensitySpec::q_gaussian(q, get_f64("width")?, qcfg)
        }
        "tabulated" => {
            expect_keys(&["path"])?;
            Ok(DensitySpec::tabulated(TabulatedDensity::from_csv(
                get("path")?,
            )?))
        }
        other => Err(Error::InvalidDensity(format!(
            "unknown density variant '{other}' (expect hilhorst, qgaussian, or tabulated)"
        ))),
    }
}

/// Output file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Shared quadrature flags.
#[derive(Debug, Clone, Args)]
pub struct QuadFlags {
    /// Relative tolerance for adaptive quadrature.
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
    /// Absolute tolerance for adaptive quadrature.
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    /// Subdivision budget for adaptive quadrature.
    #[arg(long, default_value_t = 2000)]
    pub max_subdivisions: u32,
    /// Relative tail threshold for half-line integrals.
    #[arg(long, default_value_t = 1e-14)]
    pub tail_cutoff: f64,
}

impl QuadFlags {
    pub fn to_config(&self) -> Result<QuadratureConfig> {
        let cfg = QuadratureConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_subdivisions: self.max_subdivisions,
            tail_cutoff: self.tail_cutoff,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn meta(&self) -> Vec<(String, String)> {
        vec![
            meta_entry("rel_tol", fmt_float(self.rel_tol)),
            meta_entry("abs_tol", fmt_float(self.abs_tol)),
            meta_entry("max_subdivisions", self.max_subdivisions.to_string()),
            meta_entry("tail_cutoff", fmt_float(self.tail_cutoff)),
        ]
    }
}

/// Deformed-Fourier-transform toolkit: forward and diagonal transforms,
/// closed forms, regularized inversion, and equivalence-class checks.
#[derive(Debug, Parser)]
#[command(name = "qfourier", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the transform of a density on a real k-grid.
    Transform(TransformArgs),
    /// Build an equivalence class and verify collapse (and separation).
    Class(ClassArgs),
    /// Recover a density from its spectrum and report the errors.
    Invert(InvertArgs),
    /// Run the built-in acceptance checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Density: hilhorst:a=..,b=..,q=.. | qgaussian:q=..,width=.. |
    /// tabulated:path=..
    #[arg(long)]
    pub density: String,
    /// Deformation index q' of the transform, in [1, 2).
    #[arg(long, allow_negative_numbers = true)]
    pub qp: f64,
    /// Real k-grid as min:max:n.
    #[arg(long, allow_hyphen_values = true)]
    pub k_grid: String,
    /// Output file path.
    #[arg(long)]
    pub out: String,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[command(flatten)]
    pub quad: QuadFlags,
}

#[derive(Debug, Args)]
pub struct ClassArgs {
    /// Deformation index q shared by the class.
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    /// Scale invariant of the class.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Lower support endpoints of the members, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub a_values: Vec<f64>,
    /// Also verify separation against a second class at this invariant
    /// (built from the same lower endpoints).
    #[arg(long)]
    pub separate_from: Option<f64>,
    /// Real k-grid as min:max:n.
    #[arg(long, default_value = "-5:5:21", allow_hyphen_values = true)]
    pub k_grid: String,
    /// Output file path (JSON report).
    #[arg(long)]
    pub out: String,
    #[command(flatten)]
    pub quad: QuadFlags,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Density: hilhorst:a=..,b=..,q=.. | qgaussian:q=..,width=.. |
    /// tabulated:path=..
    #[arg(long)]
    pub density: String,
    /// Regularization offset (spectrum taken at index 1 + epsilon).
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// Symmetric k-truncation of the inverse integral.
    #[arg(long, default_value_t = 200.0)]
    pub k_max: f64,
    /// Uniform panel count for the inverse integral.
    #[arg(long, default_value_t = 8192)]
    pub n_k: usize,
    /// Evaluation points, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub x: Vec<f64>,
    /// Output file path.
    #[arg(long)]
    pub out: String,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[command(flatten)]
    pub quad: QuadFlags,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Print the check names without running them.
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub quad: QuadFlags,
}

fn write_output(path: &str, contents: &str) -> std::result::Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write '{path}': {e}"))
}

fn cmd_transform(args: &TransformArgs) -> Result<std::result::Result<String, String>> {
    let qcfg = args.quad.to_config()?;
    // Validate up front: an out-of-band index is a configuration error
    // here, not a request for the identically-zero transform.
    DeformationParameter::new(args.qp)?;
    let d = parse_density(&args.density, &qcfg)?;
    let grid = parse_k_grid(&args.k_grid)?;
    let ks: Vec<Complex64> = grid.points().iter().map(|&k| Complex64::new(k, 0.0)).collect();
    let samples = transform_batch(&d, &ks, args.qp, &qcfg)?;
    let mut meta: Meta = vec![
        meta_entry("command", "transform"),
        meta_entry("density", args.density.clone()),
        meta_entry("density_resolved", d.describe()),
        meta_entry("qp", fmt_float(args.qp)),
        meta_entry("k_grid", args.k_grid.clone()),
    ];
    meta.extend(args.quad.meta());
    let contents = match args.format {
        OutputFormat::Csv => transform_csv(&meta, &samples),
        OutputFormat::Json => transform_json(&meta, &samples),
    };
    Ok(write_output(&args.out, &contents)
        .map(|()| format!("wrote {} samples to {}", samples.len(), args.out)))
}

fn cmd_class(args: &ClassArgs) -> Result<std::result::Result<(String, bool), String>> {
    let qcfg = args.quad.to_config()?;
    let q = DeformationParameter::new(args.q)?;
    let grid = parse_k_grid(&args.k_grid)?;
    let probe = build_class(q, args.lambda, &args.a_values)?;
    let collapse = verify_collapse(&probe, &grid.points(), &qcfg)?;
    let separation = match args.separate_from {
        Some(lambda2) => {
            let probe2 = build_class(q, lambda2, &args.a_values)?;
            Some(verify_separation(&probe, &probe2, &grid.points())?)
        }
        None => None,
    };
    let a_list = args
        .a_values
        .iter()
        .map(|a| fmt_float(*a))
        .collect::<Vec<_>>()
        .join(",");
    let mut meta: Meta = vec![
        meta_entry("command", "class"),
        meta_entry("q", fmt_float(args.q)),
        meta_entry("lambda", fmt_float(args.lambda)),
        meta_entry("a_values", a_list),
        meta_entry("k_grid", args.k_grid.clone()),
    ];
    if let Some(l2) = args.separate_from {
        meta.push(meta_entry("separate_from", fmt_float(l2)));
    }
    meta.extend(args.quad.meta());
    let verdict = collapse.collapse_ok
        && collapse.closed_form_ok
        && separation.as_ref().is_none_or(|s| s.separation_ok);
    let contents = class_json(&meta, &collapse, separation.as_ref());
    Ok(write_output(&args.out, &contents).map(|()| {
        (
            format!(
                "collapse max deviation {} ({} members); verdict written to {}",
                fmt_float(collapse.max_pairwise_deviation),
                collapse.members.len(),
                args.out
            ),
            verdict,
        )
    }))
}

fn cmd_invert(args: &InvertArgs) -> Result<std::result::Result<String, String>> {
    let qcfg = args.quad.to_config()?;
    let d = parse_density(&args.density, &qcfg)?;
    let icfg = InverseConfig {
        epsilon: args.epsilon,
        k_max: args.k_max,
        n_k: args.n_k,
        x_points: args.x.clone(),
    };
    let report = roundtrip(&d, &icfg, &qcfg)?;
    let x_list = args
        .x
        .iter()
        .map(|x| fmt_float(*x))
        .collect::<Vec<_>>()
        .join(",");
    let mut meta: Meta = vec![
        meta_entry("command", "invert"),
        meta_entry("density", args.density.clone()),
        meta_entry("density_resolved", d.describe()),
        meta_entry("epsilon", fmt_float(args.epsilon)),
        meta_entry("k_max", fmt_float(args.k_max)),
        meta_entry("n_k", args.n_k.to_string()),
        meta_entry("x", x_list),
    ];
    meta.extend(args.quad.meta());
    let contents = match args.format {
        OutputFormat::Csv => recovery_csv(&meta, &report),
        OutputFormat::Json => recovery_json(&meta, &report),
    };
    Ok(write_output(&args.out, &contents).map(|()| {
        format!(
            "recovered {} points (L1 over unflagged = {}) to {}",
            report.points.len(),
            fmt_float(report.l1_error),
            args.out
        )
    }))
}

fn cmd_selftest(args: &SelftestArgs) -> Result<i32> {
    if args.list {
        for name in CHECK_NAMES {
            println!("{name}");
        }
        return Ok(0);
    }
    let qcfg = args.quad.to_config()?;
    let outcomes = run_all(&qcfg);
    let mut passed = 0;
    for o in &outcomes {
        println!("{}", o.line());
        if o.passed {
            passed += 1;
        }
    }
    println!("self-test: {passed}/{} checks passed", outcomes.len());
    Ok(if passed == outcomes.len() { 0 } else { 1 })
}

fn error_exit(e: &Error) -> i32 {
    eprintln!("error: {e}");
    if e.is_config_error() {
        2
    } else {
        3
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result: Result<i32> = match &cli.command {
        Command::Transform(args) => cmd_transform(args).map(|io| match io {
            Ok(msg) => {
                eprintln!("{msg}");
                0
            }
            Err(io_msg) => {
                eprintln!("error: {io_msg}");
                2
            }
        }),
        Command::Class(args) => cmd_class(args).map(|io| match io {
            Ok((msg, verdict)) => {
                eprintln!("{msg}");
                if verdict {
                    0
                } else {
                    1
                }
            }
            Err(io_msg) => {
                eprintln!("error: {io_msg}");
                2
            }
        }),
        Command::Invert(args) => cmd_invert(args).map(|io| match io {
            Ok(msg) => {
                eprintln!("{msg}");
                0
            }
            Err(io_msg) => {
                eprintln!("error: {io_msg}");
                2
            }
        }),
        Command::Selftest(args) => cmd_selftest(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => error_exit(&e),
    }
}

/// Full CLI entry point: applies the worker-count environment variable,
/// parses arguments, and dispatches.
pub fn main_entry() -> i32 {
    if let Ok(raw) = std::env::var("QFOURIER_WORKERS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                // A second initialization in one process is harmless: the
                // pool is already running with the earlier setting.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!(
                    "error: QFOURIER_WORKERS must be a positive integer, got '{raw}'"
                );
                return 2;
            }
        }
    }
    let cli = Cli::parse();
    run(&cli)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::Support;

    #[test]
    fn k_grid_parsing_and_points() {
        let g = parse_k_grid("-5:5:21").unwrap();
        assert_eq!(g, KGridSpec { k_min: -5.0, k_max: 5.0, n: 21 });
        let pts = g.points();
        assert_eq!(pts.len(), 21);
        assert_eq!(pts[0], -5.0);
        assert_eq!(pts[20], 5.0);
        assert!((pts[10] - 0.0).abs() < 1e-15);
        for bad in ["1:2", "a:2:5", "1:b:5", "1:2:x", "2:1:5", "1:1:5", "0:1:1"] {
            assert!(
                matches!(parse_k_grid(bad), Err(Error::InvalidGrid(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn density_parsing_variants() {
        let qcfg = QuadratureConfig::default();
        let d = parse_density("hilhorst:a=1,b=2,q=1.5", &qcfg).unwrap();
        assert_eq!(d.support(), Support::Compact { lo: 1.0, hi: 2.0 });
        let d = parse_density("qgaussian:q=1.5,width=1", &qcfg).unwrap();
        assert_eq!(d.support(), Support::RealLine);
        for bad in [
            "hilhorst",
            "hilhorst:a=1,b=2",
            "hilhorst:a=1,b=2,q=1.5,z=9",
            "hilhorst:a=1,a=2,q=1.5",
            "hilhorst:a=one,b=2,q=1.5",
            "nosuch:a=1",
            "qgaussian:q=1.5",
        ] {
            assert!(
                matches!(parse_density(bad, &qcfg), Err(Error::InvalidDensity(_))),
                "{bad}"
            );
        }
        // A deformation index out of range surfaces as a range error.
        assert!(matches!(
            parse_density("hilhorst:a=1,b=2,q=2.5", &qcfg),
            Err(Error::DeformationRange(_))
        ));
        // A missing table file is a table error.
        assert!(matches!(
            parse_density("tabulated:path=/no/such/file.csv", &qcfg),
            Err(Error::MalformedTable { .. })
        ));
    }

    #[test]
    fn cli_parses_the_documented_invocations() {
        let cli = Cli::try_parse_from([
            "qfourier",
            "transform",
            "--density",
            "hilhorst:a=1,b=2,q=1.5",
            "--qp",
            "1.5",
            "--k-grid",
            "-5:5:21",
            "--out",
            "f.csv",
        ])
        .unwrap();
        match cli.command {
            Command::Transform(a) => {
                assert_eq!(a.qp, 1.5);
                assert_eq!(a.format, OutputFormat::Csv);
                assert_eq!(a.quad.rel_tol, 1e-9);
            }
            _ => panic!("wrong subcommand"),
        }
        let cli = Cli::try_parse_from([
            "qfourier",
            "class",
            "--q",
            "1.5",
            "--lambda",
            "1.41421356",
            "--a-values",
            "1,1.5",
            "--separate-from",
            "2.0",
            "--out",
            "class.json",
        ])
        .unwrap();
        match cli.command {
            Command::Class(a) => {
                assert_eq!(a.a_values, vec![1.0, 1.5]);
                assert_eq!(a.separate_from, Some(2.0));
                assert_eq!(a.k_grid, "-5:5:21");
            }
            _ => panic!("wrong subcommand"),
        }
        let cli = Cli::try_parse_from([
            "qfourier",
            "invert",
            "--density",
            "hilhorst:a=1,b=2,q=1.5",
            "--x",
            "1.25,1.5,1.75",
            "--out",
            "rec.csv",
        ])
        .unwrap();
        match cli.command {
            Command::Invert(a) => {
                assert_eq!(a.epsilon, 1e-6);
                assert_eq!(a.k_max, 200.0);
                assert_eq!(a.n_k, 8192);
                assert_eq!(a.x, vec![1.25, 1.5, 1.75]);
            }
            _ => panic!("wrong subcommand"),
        }
        assert!(Cli::try_parse_from(["qfourier", "selftest", "--list"]).is_ok());
    }

    #[test]
    fn out_of_band_index_is_a_config_error() {
        let args = TransformArgs {
            density: "hilhorst:a=1,b=2,q=1.5".to_string(),
            qp: 2.5,
            k_grid: "-1:1:3".to_string(),
            out: "/tmp/unused.csv".to_string(),
            format: OutputFormat::Csv,
            quad: QuadFlags {
                rel_tol: 1e-9,
                abs_tol: 1e-12,
                max_subdivisions: 2000,
                tail_cutoff: 1e-14,
            },
        };
        let e = cmd_transform(&args).unwrap_err();
        assert!(e.is_config_error());
        assert!(e.to_string().contains("[1, 2)"), "{e}");
    }
}
