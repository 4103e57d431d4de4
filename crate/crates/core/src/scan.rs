//! Two-dimensional parameter scans and their CSV/JSON serialization.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dephasing::{dephasing_qsl, DephasingParams};
use crate::engine::QslResult;
use crate::error::{QslError, Result};
use crate::jc::{jc_qsl, jc_regime, JcParams};
use crate::quadrature::QuadratureConfig;
use crate::qubit::{BlochState, POSITIVITY_EPS};

/// Environment variable capping scan parallelism; 0 or unset means automatic.
pub const THREADS_ENV: &str = "QSLKIT_THREADS";

/// Column order of [`emit_csv`].
pub const CSV_HEADER: [&str; 25] = [
    "model",
    "axis1_name",
    "axis1_value",
    "axis2_name",
    "axis2_value",
    "lambda",
    "gamma0",
    "eta",
    "s",
    "coherence",
    "sz",
    "tau",
    "theta",
    "purity0",
    "lambda_op",
    "lambda_hs",
    "lambda_tr",
    "tau_qsl_op",
    "tau_qsl_hs",
    "tau_qsl_tr",
    "tau_qsl_unified",
    "clamped",
    "degenerate",
    "infeasible",
    "regime",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Jc,
    Dephasing,
}

impl Model {
    pub fn label(&self) -> &'static str {
        match self {
            Model::Jc => "jc",
            Model::Dephasing => "dephasing",
        }
    }

    fn axis_names(&self) -> &'static [&'static str] {
        match self {
            Model::Jc => &["gamma0", "lambda", "coherence", "sz", "tau"],
            Model::Dephasing => &["eta", "s", "coherence", "sz", "tau"],
        }
    }

    fn fixed_names(&self) -> &'static [&'static str] {
        match self {
            Model::Jc => &["gamma0", "lambda", "omega0", "coherence", "sz", "phase"],
            Model::Dephasing => &["eta", "s", "omega_c", "temperature", "coherence", "sz", "phase"],
        }
    }

    fn required(&self) -> &'static [&'static str] {
        match self {
            Model::Jc => &["gamma0", "lambda", "coherence"],
            Model::Dephasing => &["eta", "s", "coherence"],
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Model {
    type Err = QslError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jc" => Ok(Model::Jc),
            "dephasing" => Ok(Model::Dephasing),
            _ => Err(QslError::Grid(format!("unknown model '{s}' (expected jc or dephasing)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    /// Geometric spacing; only accepted for `gamma0`.
    #[serde(default)]
    pub log: bool,
}

impl Axis {
    pub fn linear(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self {
            name: name.to_string(),
            min,
            max,
            count,
            log: false,
        }
    }

    /// Parses `name:min:max:count`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 4 {
            return Err(QslError::Grid(format!(
                "axis '{spec}' must have the form name:min:max:count"
            )));
        }
        let number = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| QslError::Grid(format!("axis '{spec}': '{s}' is not a number")))
        };
        let count = parts[3]
            .trim()
            .parse::<usize>()
            .map_err(|_| QslError::Grid(format!("axis '{spec}': '{}' is not a count", parts[3])))?;
        Ok(Self::linear(parts[0].trim(), number(parts[1])?, number(parts[2])?, count))
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    self.min
                } else if i == self.count - 1 {
                    self.max
                } else if self.log {
                    (self.min.ln() + (self.max.ln() - self.min.ln()) * i as f64 / last).exp()
                } else {
                    self.min + (self.max - self.min) * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub model: Model,
    pub axis1: Axis,
    pub axis2: Axis,
    pub fixed: BTreeMap<String, f64>,
    pub tau: f64,
}

fn check_range(name: &str, v: f64) -> Result<()> {
    let ok = v.is_finite()
        && match name {
            "gamma0" | "lambda" | "eta" | "omega0" | "omega_c" => v > 0.0,
            "s" => v >= crate::dephasing::MIN_OHMICITY,
            "coherence" => (0.0..=1.0).contains(&v),
            "sz" => (-1.0..=1.0).contains(&v),
            "tau" | "temperature" => v >= 0.0,
            _ => true,
        };
    if ok {
        Ok(())
    } else {
        Err(QslError::Grid(format!("{name} = {v} is out of range")))
    }
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        let allowed = self.model.axis_names();
        for axis in [&self.axis1, &self.axis2] {
            if !allowed.contains(&axis.name.as_str()) {
                return Err(QslError::Grid(format!(
                    "axis '{}' is not valid for the {} model (expected one of {})",
                    axis.name,
                    self.model,
                    allowed.join(", ")
                )));
            }
            if axis.count < 2 {
                return Err(QslError::Grid(format!("axis '{}' needs count >= 2", axis.name)));
            }
            if !(axis.min <= axis.max) {
                return Err(QslError::Grid(format!("axis '{}' needs min <= max", axis.name)));
            }
            if axis.log && (axis.name != "gamma0" || axis.min <= 0.0) {
                return Err(QslError::Grid(
                    "log spacing is only available for a positive gamma0 axis".into(),
                ));
            }
            check_range(&axis.name, axis.min)?;
            check_range(&axis.name, axis.max)?;
            if self.fixed.contains_key(&axis.name) {
                return Err(QslError::Grid(format!(
                    "'{}' is both a scan axis and a fixed parameter",
                    axis.name
                )));
            }
        }
        if self.axis1.name == self.axis2.name {
            return Err(QslError::Grid("the two axes must differ".into()));
        }
        let known = self.model.fixed_names();
        for (name, &v) in &self.fixed {
            if !known.contains(&name.as_str()) {
                return Err(QslError::Grid(format!(
                    "parameter '{name}' does not apply to the {} model",
                    self.model
                )));
            }
            check_range(name, v)?;
        }
        for name in self.model.required() {
            if !self.fixed.contains_key(*name) && self.axis1.name != *name && self.axis2.name != *name {
                return Err(QslError::Grid(format!(
                    "the {} model needs '{name}' as an axis or fixed parameter",
                    self.model
                )));
            }
        }
        check_range("tau", self.tau)
    }

    pub fn cells(&self) -> usize {
        self.axis1.count * self.axis2.count
    }
}

/// One grid cell: its inputs, the evaluation (absent for infeasible or failed
/// cells) and flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub model: Model,
    pub axis1_name: String,
    pub axis1_value: f64,
    pub axis2_name: String,
    pub axis2_value: f64,
    pub lambda: Option<f64>,
    pub gamma0: Option<f64>,
    pub eta: Option<f64>,
    pub s: Option<f64>,
    pub coherence: f64,
    pub sz: f64,
    pub tau: f64,
    pub result: Option<QslResult>,
    pub infeasible: bool,
    pub regime: Option<String>,
    pub error: Option<String>,
}

fn is_infeasible(coherence: f64, sz: f64) -> bool {
    coherence * coherence + sz * sz > 1.0 + POSITIVITY_EPS
}

fn evaluate_cell(grid: &ScanGrid, quad: &QuadratureConfig, v1: f64, v2: f64) -> ScanRecord {
    let mut values = grid.fixed.clone();
    values.insert(grid.axis1.name.clone(), v1);
    values.insert(grid.axis2.name.clone(), v2);
    let tau = values.remove("tau").unwrap_or(grid.tau);
    let get = |k: &str| values.get(k).copied();
    let coherence = get("coherence").unwrap_or(0.0);
    let sz = get("sz").unwrap_or(0.0);
    let phase = get("phase").unwrap_or(0.0);

    let mut record = ScanRecord {
        model: grid.model,
        axis1_name: grid.axis1.name.clone(),
        axis1_value: v1,
        axis2_name: grid.axis2.name.clone(),
        axis2_value: v2,
        lambda: None,
        gamma0: None,
        eta: None,
        s: None,
        coherence,
        sz,
        tau,
        result: None,
        infeasible: is_infeasible(coherence, sz),
        regime: None,
        error: None,
    };
    match grid.model {
        Model::Jc => {
            record.lambda = get("lambda");
            record.gamma0 = get("gamma0");
        }
        Model::Dephasing => {
            record.eta = get("eta");
            record.s = get("s");
        }
    }
    if record.infeasible {
        return record;
    }

    let outcome = BlochState::from_coherence(coherence, phase, sz).and_then(|s0| match grid.model {
        Model::Jc => {
            let p = JcParams::with_omega0(
                get("omega0").unwrap_or(1.0),
                record.lambda.unwrap_or(f64::NAN),
                record.gamma0.unwrap_or(f64::NAN),
            )?;
            record.regime = Some(jc_regime(&p).label().to_string());
            jc_qsl(&p, &s0, tau, quad)
        }
        Model::Dephasing => {
            let p = DephasingParams::with_bath(
                record.eta.unwrap_or(f64::NAN),
                record.s.unwrap_or(f64::NAN),
                get("omega_c").unwrap_or(1.0),
                get("temperature").unwrap_or(0.0),
            )?;
            dephasing_qsl(&p, &s0, tau, quad)
        }
    });
    match outcome {
        Ok(m) => record.result = Some(m.result),
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Worker count requested through [`THREADS_ENV`]; `None` means automatic.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(raw) => {
            let n: usize = raw.trim().parse().map_err(|_| {
                QslError::Grid(format!("{THREADS_ENV}='{raw}' is not a non-negative integer"))
            })?;
            Ok((n > 0).then_some(n))
        }
    }
}

/// Evaluates every cell, row-major in (axis1, axis2). Worker count follows
/// [`THREADS_ENV`]. Per-cell failures are stored in the record.
pub fn run_scan(grid: &ScanGrid, quad: &QuadratureConfig) -> Result<Vec<ScanRecord>> {
    run_scan_with_threads(grid, quad, threads_from_env()?)
}

pub fn run_scan_with_threads(
    grid: &ScanGrid,
    quad: &QuadratureConfig,
    threads: Option<usize>,
) -> Result<Vec<ScanRecord>> {
    grid.validate()?;
    quad.validate()?;
    let a1 = grid.axis1.values();
    let a2 = grid.axis2.values();
    let cells: Vec<(f64, f64)> = a1
        .iter()
        .flat_map(|&v1| a2.iter().map(move |&v2| (v1, v2)))
        .collect();
    let work = || {
        cells
            .par_iter()
            .map(|&(v1, v2)| evaluate_cell(grid, quad, v1, v2))
            .collect::<Vec<_>>()
    };
    match threads {
        None => Ok(work()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| QslError::Grid(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSummary {
    pub cells: usize,
    pub feasible: usize,
    pub failed: usize,
    pub min_tau_qsl: Option<f64>,
    pub max_tau_qsl: Option<f64>,
}

pub fn summarize(records: &[ScanRecord]) -> ScanSummary {
    let values: Vec<f64> = records
        .iter()
        .filter_map(|r| r.result.map(|q| q.tau_qsl_unified))
        .collect();
    ScanSummary {
        cells: records.len(),
        feasible: records.iter().filter(|r| !r.infeasible).count(),
        failed: records.iter().filter(|r| r.error.is_some()).count(),
        min_tau_qsl: values.iter().copied().reduce(f64::min),
        max_tau_qsl: values.iter().copied().reduce(f64::max),
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn csv_row(r: &ScanRecord) -> Vec<String> {
    let q = r.result;
    let field = |f: fn(&QslResult) -> f64| opt(q.as_ref().map(f));
    let flag = |f: fn(&QslResult) -> bool| q.as_ref().map(|q| f(q).to_string()).unwrap_or_default();
    vec![
        r.model.to_string(),
        r.axis1_name.clone(),
        format_float(r.axis1_value),
        r.axis2_name.clone(),
        format_float(r.axis2_value),
        opt(r.lambda),
        opt(r.gamma0),
        opt(r.eta),
        opt(r.s),
        format_float(r.coherence),
        format_float(r.sz),
        format_float(r.tau),
        field(|q| q.theta),
        field(|q| q.purity0),
        field(|q| q.lambda_op),
        field(|q| q.lambda_hs),
        field(|q| q.lambda_tr),
        field(|q| q.tau_qsl_op),
        field(|q| q.tau_qsl_hs),
        field(|q| q.tau_qsl_tr),
        field(|q| q.tau_qsl_unified),
        flag(|q| q.clamped),
        flag(|q| q.degenerate),
        r.infeasible.to_string(),
        r.regime.clone().unwrap_or_default(),
    ]
}

struct Counting<W> {
    inner: W,
    written: usize,
}

impl<W: Write> Write for Counting<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.written += n;
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Writes the header and one LF-terminated row per record. Result columns
/// are empty for infeasible or failed cells; unused parameter columns are
/// empty. Returns the number of bytes written.
pub fn emit_csv<W: Write>(records: &[ScanRecord], dest: W) -> Result<usize> {
    if records.is_empty() {
        return Err(QslError::Grid("no records to write".into()));
    }
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Counting {
            inner: dest,
            written: 0,
        });
    out.write_record(CSV_HEADER)?;
    for r in records {
        out.write_record(csv_row(r))?;
    }
    out.flush()?;
    let counting = out
        .into_inner()
        .map_err(|e| QslError::Io(std::io::Error::other(e.to_string())))?;
    Ok(counting.written)
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    #[serde(flatten)]
    inputs: JsonInputs<'a>,
    #[serde(flatten)]
    result: Option<&'a QslResult>,
    infeasible: bool,
    regime: &'a Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: &'a Option<String>,
}

#[derive(Serialize)]
struct JsonInputs<'a> {
    model: Model,
    axis1_name: &'a str,
    axis1_value: f64,
    axis2_name: &'a str,
    axis2_value: f64,
    lambda: Option<f64>,
    gamma0: Option<f64>,
    eta: Option<f64>,
    s: Option<f64>,
    coherence: f64,
    sz: f64,
    tau: f64,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    model: Model,
    grid: &'a ScanGrid,
    quadrature: &'a QuadratureConfig,
    records: Vec<JsonRecord<'a>>,
}

/// Writes the records as a JSON array inside an envelope echoing the tool
/// version, the grid and the quadrature settings.
pub fn emit_json<W: Write>(
    grid: &ScanGrid,
    quad: &QuadratureConfig,
    records: &[ScanRecord],
    dest: W,
) -> Result<usize> {
    if records.is_empty() {
        return Err(QslError::Grid("no records to write".into()));
    }
    let envelope = Envelope {
        tool: "qslkit",
        version: env!("CARGO_PKG_VERSION"),
        model: grid.model,
        grid,
        quadrature: quad,
        records: records
            .iter()
            .map(|r| JsonRecord {
                inputs: JsonInputs {
                    model: r.model,
                    axis1_name: &r.axis1_name,
                    axis1_value: r.axis1_value,
                    axis2_name: &r.axis2_name,
                    axis2_value: r.axis2_value,
                    lambda: r.lambda,
                    gamma0: r.gamma0,
                    eta: r.eta,
                    s: r.s,
                    coherence: r.coherence,
                    sz: r.sz,
                    tau: r.tau,
                },
                result: r.result.as_ref(),
                infeasible: r.infeasible,
                regime: &r.regime,
                error: &r.error,
            })
            .collect(),
    };
    let mut out = Counting {
        inner: dest,
        written: 0,
    };
    serde_json::to_writer_pretty(&mut out, &envelope)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(out.written)
}
