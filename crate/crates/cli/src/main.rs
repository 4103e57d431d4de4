mod config;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qslkit::dephasing::{negative_rate_intervals, DephasingParams};
use qslkit::jc::{jc_branch, jc_regime, JcParams};
use qslkit::scan::{self, Axis, Model, ScanGrid};
use qslkit::verify::{self, Check, VerifyConfig};
use qslkit::{BlochState, ModelQsl, QslError, QuadratureConfig};

const EXIT_CONVERGENCE: u8 = 1;
const EXIT_PARAMETER: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_VERIFY: u8 = 4;

/// Quantum speed limit bounds for open qubits in mixed initial states.
///
/// Frequencies and rates are in units of the qubit frequency ω₀ (jc) or of the
/// bath cutoff ω_c (dephasing); times are in the inverse unit.
#[derive(Parser, Debug)]
#[command(name = "qslkit", version)]
struct Cli {
    /// Flat key=value file supplying flag values; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Damped Jaynes-Cummings qubit in a Lorentzian reservoir.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Jc(JcArgs),
    /// Pure dephasing with an Ohmic-family bath.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Dephasing(DephasingArgs),
    /// Two-dimensional parameter scan written as CSV or JSON.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Scan(ScanArgs),
    /// Cross-checks of closed forms against numerical oracles.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct StateArgs {
    /// l1 coherence C = √(rx² + ry²) of the initial state.
    #[arg(long, conflicts_with_all = ["rx", "ry", "rz"])]
    coherence: Option<f64>,
    /// Phase of the coherence, radians.
    #[arg(long, conflicts_with_all = ["rx", "ry", "rz"])]
    phase: Option<f64>,
    /// Initial ⟨σ_z⟩ (excited population minus ground population).
    #[arg(long, conflicts_with_all = ["rx", "ry", "rz"])]
    sz: Option<f64>,
    /// Bloch x component (alternative to --coherence/--phase/--sz).
    #[arg(long)]
    rx: Option<f64>,
    #[arg(long)]
    ry: Option<f64>,
    #[arg(long)]
    rz: Option<f64>,
}

impl StateArgs {
    fn state(&self) -> qslkit::Result<BlochState> {
        if self.rx.is_some() || self.ry.is_some() || self.rz.is_some() {
            BlochState::new(
                self.rx.unwrap_or(0.0),
                self.ry.unwrap_or(0.0),
                self.rz.unwrap_or(0.0),
            )
        } else {
            BlochState::from_coherence(
                self.coherence.unwrap_or(0.0),
                self.phase.unwrap_or(0.0),
                self.sz.unwrap_or(0.0),
            )
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct QuadArgs {
    /// Simpson nodes on the full interval (odd, >= 3).
    #[arg(long, default_value_t = 2001)]
    nodes: usize,
    /// Relative change between refinements accepted as converged.
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,
    /// Node doublings allowed before giving up.
    #[arg(long, default_value_t = 4)]
    max_refinements: usize,
}

impl QuadArgs {
    fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            nodes: self.nodes,
            rel_tol: self.rel_tol,
            max_refinements: self.max_refinements,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TextFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FileFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct JcArgs {
    /// Reservoir spectral width λ.
    #[arg(long)]
    lambda: f64,
    /// Coupling strength γ₀ (non-Markovian when 2γ₀ > λ).
    #[arg(long)]
    gamma0: f64,
    /// Qubit frequency; the unit, does not enter the reduced dynamics.
    #[arg(long, default_value_t = 1.0)]
    omega0: f64,
    /// Driving time τ.
    #[arg(long)]
    tau: f64,
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

#[derive(Args, Debug)]
struct DephasingArgs {
    /// Dimensionless coupling η.
    #[arg(long)]
    eta: f64,
    /// Ohmicity exponent s (>= 0.05).
    #[arg(long)]
    s: f64,
    /// Bath cutoff frequency.
    #[arg(long, default_value_t = 1.0)]
    omega_c: f64,
    /// Bath temperature k_B·T; values above 0 use the numerical dephasing
    /// integral and a finite-difference rate.
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    /// Driving time τ.
    #[arg(long)]
    tau: f64,
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// jc or dephasing.
    #[arg(long, value_parser = parse_model)]
    model: Model,
    /// First (outer) axis as name:min:max:count.
    #[arg(long, value_parser = parse_axis)]
    axis1: Axis,
    /// Second (inner) axis as name:min:max:count.
    #[arg(long, value_parser = parse_axis)]
    axis2: Axis,
    /// Geometric spacing on a gamma0 axis.
    #[arg(long)]
    log_gamma0: bool,
    /// Driving time τ when tau is not an axis.
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Fixed values for parameters not on an axis (jc: lambda, gamma0,
    /// omega0; dephasing: eta, s, omega-c, temperature; both: coherence,
    /// sz, phase).
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    gamma0: Option<f64>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    omega_c: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    coherence: Option<f64>,
    #[arg(long)]
    sz: Option<f64>,
    #[arg(long)]
    phase: Option<f64>,
    #[command(flatten)]
    quad: QuadArgs,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Output format; inferred from the file extension when absent.
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Check to run (repeatable); all checks when absent.
    #[arg(long, value_parser = parse_check)]
    check: Vec<Check>,
    /// Restrict model-specific checks to one model.
    #[arg(long, value_parser = parse_model)]
    model: Option<Model>,
    #[arg(long, default_value_t = 15.0)]
    lambda: f64,
    #[arg(long)]
    gamma0: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// Random draws for the Monte Carlo checks.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Sample times per trajectory in the derivative-bound sweep.
    #[arg(long, default_value_t = 50)]
    times: usize,
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse().map_err(|e: QslError| e.to_string())
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    Axis::parse(s).map_err(|e| e.to_string())
}

fn parse_check(s: &str) -> Result<Check, String> {
    Check::parse(s).ok_or_else(|| {
        let names: Vec<_> = Check::ALL.iter().map(|c| c.name()).collect();
        format!("unknown check '{s}' (expected one of {})", names.join(", "))
    })
}

enum Failure {
    Qsl(QslError),
    Verify,
}

impl From<QslError> for Failure {
    fn from(e: QslError) -> Self {
        Failure::Qsl(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Qsl(QslError::Io(e))
    }
}

fn exit_code(e: &QslError) -> u8 {
    match e {
        QslError::NonConvergence { .. } | QslError::Pole { .. } | QslError::PositivityLost { .. } => {
            EXIT_CONVERGENCE
        }
        QslError::Io(_) | QslError::Serialization(_) => EXIT_IO,
        QslError::UnphysicalState { .. }
        | QslError::InvalidDensity(_)
        | QslError::InvalidParameter { .. }
        | QslError::Grid(_) => EXIT_PARAMETER,
    }
}

fn main() -> ExitCode {
    let args = match config::expand_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(match e {
                config::ConfigError::Read(..) => EXIT_IO,
                config::ConfigError::Syntax { .. } => EXIT_PARAMETER,
            });
        }
    };
    let cli = Cli::parse_from(args);
    let outcome = match &cli.command {
        Command::Jc(a) => cmd_jc(a),
        Command::Dephasing(a) => cmd_dephasing(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY),
        Err(Failure::Qsl(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn print_point(
    format: TextFormat,
    header: Vec<(&str, serde_json::Value)>,
    s0: &BlochState,
    tau: f64,
    m: &ModelQsl,
) -> Result<(), Failure> {
    let r = &m.result;
    let mut out = io::stdout().lock();
    match format {
        TextFormat::Json => {
            let mut obj = serde_json::Map::new();
            for (k, v) in header {
                obj.insert(k.to_string(), v);
            }
            obj.insert(
                "state".into(),
                serde_json::json!({
                    "rx": s0.rx(), "ry": s0.ry(), "rz": s0.rz(),
                    "coherence": qslkit::qubit::coherence_l1(s0),
                }),
            );
            obj.insert("tau".into(), tau.into());
            obj.insert("closed_form".into(), m.closed_form.into());
            obj.insert("result".into(), serde_json::to_value(r).map_err(QslError::from)?);
            serde_json::to_writer_pretty(&mut out, &obj).map_err(QslError::from)?;
            writeln!(out)?;
        }
        TextFormat::Text => {
            let mut rows: Vec<(String, String)> = header
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.as_str().map_or_else(|| v.to_string(), str::to_string)))
                .collect();
            let num = |v: f64| format!("{v:.12}");
            rows.extend([
                ("state".into(), s0.to_string()),
                ("coherence".into(), num(qslkit::qubit::coherence_l1(s0))),
                ("tau".into(), num(tau)),
                ("theta".into(), num(r.theta)),
                ("purity0".into(), num(r.purity0)),
                ("lambda_op".into(), num(r.lambda_op)),
                ("lambda_hs".into(), num(r.lambda_hs)),
                ("lambda_tr".into(), num(r.lambda_tr)),
                ("tau_qsl_op".into(), num(r.tau_qsl_op)),
                ("tau_qsl_hs".into(), num(r.tau_qsl_hs)),
                ("tau_qsl_tr".into(), num(r.tau_qsl_tr)),
                ("tau_qsl_unified".into(), num(r.tau_qsl_unified)),
                ("closed_form".into(), num(m.closed_form)),
                ("clamped".into(), r.clamped.to_string()),
                ("degenerate".into(), r.degenerate.to_string()),
            ]);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in rows {
                writeln!(out, "{k:<width$}  {v}")?;
            }
        }
    }
    Ok(())
}

fn cmd_jc(a: &JcArgs) -> Result<(), Failure> {
    let p = JcParams::with_omega0(a.omega0, a.lambda, a.gamma0)?;
    let s0 = a.state.state()?;
    let quad = a.quad.config();
    quad.validate()?;
    let m = qslkit::jc_qsl(&p, &s0, a.tau, &quad)?;
    let branch = jc_branch(&p);
    print_point(
        a.format,
        vec![
            ("model", "jc".into()),
            ("lambda", p.lambda.into()),
            ("gamma0", p.gamma0.into()),
            ("regime", jc_regime(&p).label().into()),
            ("branch", format!("{:?}", branch.kind).to_lowercase().into()),
        ],
        &s0,
        a.tau,
        &m,
    )
}

fn cmd_dephasing(a: &DephasingArgs) -> Result<(), Failure> {
    let p = DephasingParams::with_bath(a.eta, a.s, a.omega_c, a.temperature)?;
    let s0 = a.state.state()?;
    let quad = a.quad.config();
    quad.validate()?;
    let m = qslkit::dephasing_qsl(&p, &s0, a.tau, &quad)?;
    let mut header = vec![
        ("model", "dephasing".into()),
        ("eta", p.eta.into()),
        ("s", p.s.into()),
        ("temperature", p.temperature.into()),
    ];
    if p.temperature == 0.0 {
        let intervals = negative_rate_intervals(&p, a.tau);
        let text = if intervals.is_empty() {
            "none".to_string()
        } else {
            intervals
                .iter()
                .map(|(l, r)| format!("[{l:.6}, {r:.6}]"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        header.push(("negative_rate", text.into()));
    }
    print_point(a.format, header, &s0, a.tau, &m)
}

fn cmd_scan(a: &ScanArgs) -> Result<(), Failure> {
    let mut fixed = BTreeMap::new();
    for (k, v) in [
        ("lambda", a.lambda),
        ("gamma0", a.gamma0),
        ("omega0", a.omega0),
        ("eta", a.eta),
        ("s", a.s),
        ("omega_c", a.omega_c),
        ("temperature", a.temperature),
        ("coherence", a.coherence),
        ("sz", a.sz),
        ("phase", a.phase),
    ] {
        if let Some(v) = v {
            fixed.insert(k.to_string(), v);
        }
    }
    let mut grid = ScanGrid {
        model: a.model,
        axis1: a.axis1.clone(),
        axis2: a.axis2.clone(),
        fixed,
        tau: a.tau,
    };
    if a.log_gamma0 {
        for axis in [&mut grid.axis1, &mut grid.axis2] {
            if axis.name == "gamma0" {
                axis.log = true;
            }
        }
    }
    let quad = a.quad.config();
    let format = a.format.unwrap_or_else(|| match &a.output {
        Some(p) if p.extension().is_some_and(|e| e == "json") => FileFormat::Json,
        _ => FileFormat::Csv,
    });

    let start = Instant::now();
    let records = scan::run_scan(&grid, &quad)?;
    let elapsed = start.elapsed();
    let write = |dest: &mut dyn Write| -> qslkit::Result<usize> {
        match format {
            FileFormat::Csv => scan::emit_csv(&records, dest),
            FileFormat::Json => scan::emit_json(&grid, &quad, &records, dest),
        }
    };
    match &a.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                io::Error::new(e.kind(), format!("cannot create {}: {e}", path.display()))
            })?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            write(&mut w)?;
        }
    }

    let sm = scan::summarize(&records);
    let range = match (sm.min_tau_qsl, sm.max_tau_qsl) {
        (Some(lo), Some(hi)) => format!("tau_qsl in [{lo:.6}, {hi:.6}]"),
        _ => "no evaluated cells".to_string(),
    };
    let line = format!(
        "{} cells, {} feasible, {} failed, {range}, {:.2}s",
        sm.cells,
        sm.feasible,
        sm.failed,
        elapsed.as_secs_f64()
    );
    // keep standard output clean when it carries the data
    if a.output.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), Failure> {
    let cfg = VerifyConfig {
        checks: if a.check.is_empty() {
            Check::ALL.to_vec()
        } else {
            a.check.clone()
        },
        model: a.model,
        lambda: a.lambda,
        gamma0: a.gamma0,
        eta: a.eta,
        s: a.s,
        tau: a.tau,
        samples: a.samples,
        times: a.times,
        seed: a.seed,
        quad: a.quad.config(),
    };
    cfg.quad.validate()?;
    let reports = verify::run_verify(&cfg)?;
    let all_passed = reports.iter().all(|r| r.passed);
    let mut out = io::stdout().lock();
    match a.format {
        TextFormat::Json => {
            let doc = serde_json::json!({ "seed": a.seed, "passed": all_passed, "checks": reports });
            serde_json::to_writer_pretty(&mut out, &doc).map_err(QslError::from)?;
            writeln!(out)?;
        }
        TextFormat::Text => {
            writeln!(out, "seed {}", a.seed)?;
            let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
            for r in &reports {
                writeln!(
                    out,
                    "[{}] {:<width$}  worst {:.3e}  tol {:.0e}  cases {}{}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.worst,
                    r.tolerance,
                    r.cases,
                    if r.detail.is_empty() || r.passed {
                        String::new()
                    } else {
                        format!("  {}", r.detail)
                    }
                )?;
            }
        }
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}
