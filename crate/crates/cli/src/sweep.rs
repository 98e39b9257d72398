//! Sweep specifications and their execution.

use std::time::Instant;

use fama_core::analytic;
use fama_core::montecarlo::{outage_mc, McSettings};
use fama_core::netmodel::{derive, NetworkConfig, Scheme};
use fama_core::quad::QuadratureSettings;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Axis {
    /// Linear threshold applied to both SIR thresholds and the SNR threshold.
    Threshold,
    N,
    K,
    W,
    U,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Mc,
    Analytic,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mc => "MC",
            Method::Analytic => "ANALYTIC",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_uppercase().as_str() {
            "MC" => Ok(Method::Mc),
            "ANALYTIC" => Ok(Method::Analytic),
            _ => Err(CliError::Config(format!(
                "unknown method {s:?}; expected MC or ANALYTIC"
            ))),
        }
    }
}

/// How interferer distances are generated when the U axis changes U.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DistanceRule {
    /// Every interferer at the base configuration's first interferer distance.
    #[default]
    Equal,
    /// r_i = (i + 1)·r₀ for i = 0..=U.
    Linear,
}

impl DistanceRule {
    pub fn distances(&self, base: &NetworkConfig, n_interferers: u32) -> Vec<f64> {
        let r0 = base.distances.first().copied().unwrap_or(100.0);
        match self {
            DistanceRule::Equal => {
                let ri = base.distances.get(1).copied().unwrap_or(r0);
                std::iter::once(r0)
                    .chain(std::iter::repeat_n(ri, n_interferers as usize))
                    .collect()
            }
            DistanceRule::Linear => (0..=n_interferers).map(|i| r0 * (i + 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub base: NetworkConfig,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub methods: Vec<Method>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub distance_rule: DistanceRule,
}

fn as_count(axis: Axis, v: f64) -> Result<u32, CliError> {
    if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as u32)
    } else {
        Err(CliError::Config(format!(
            "{axis:?} axis values must be positive integers, got {v}"
        )))
    }
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("sweep spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.values.is_empty() {
            return Err(CliError::Config("values must be nonempty".into()));
        }
        if !self.values.windows(2).all(|w| w[0] < w[1]) {
            return Err(CliError::Config(
                "values must be strictly increasing".into(),
            ));
        }
        if self.schemes.is_empty() || self.methods.is_empty() {
            return Err(CliError::Config(
                "schemes and methods must be nonempty".into(),
            ));
        }
        if self.trials == 0 && self.methods.contains(&Method::Mc) {
            return Err(CliError::Config("trials must be positive".into()));
        }
        for v in &self.values {
            self.config_at(*v)?;
        }
        Ok(())
    }

    /// The network configuration at one axis value.
    pub fn config_at(&self, v: f64) -> Result<NetworkConfig, CliError> {
        let mut cfg = self.base.clone();
        match self.axis {
            Axis::Threshold => {
                cfg.sir_threshold_f = v;
                cfg.sir_threshold_s = v;
                cfg.snr_threshold = v;
            }
            Axis::N => cfg.n_bs_antennas = as_count(self.axis, v)?,
            Axis::K => cfg.n_ports = as_count(self.axis, v)?,
            Axis::W => cfg.fas_size = v,
            Axis::U => {
                let u = as_count(self.axis, v)?;
                cfg.n_interferers = u;
                cfg.distances = self.distance_rule.distances(&self.base, u);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One evaluated point. `error` is set (and the numbers are NaN) when the
/// evaluator failed for this point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub axis_value: f64,
    pub scheme: Scheme,
    pub method: Method,
    pub probability: f64,
    pub uncertainty: f64,
    pub trials: u64,
    pub wall_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub quad: QuadratureSettings,
    pub mc: McSettings,
    /// Record wall time per row; off by default so reruns are byte-identical.
    pub timing: bool,
}

/// One outage value: (probability, uncertainty, trials, advisory).
pub fn evaluate(
    cfg: &NetworkConfig,
    scheme: Scheme,
    method: Method,
    trials: u64,
    seed: u64,
    opts: &RunOptions,
) -> fama_core::Result<(f64, f64, u64, Option<String>)> {
    let p = derive(cfg)?;
    match method {
        Method::Mc => {
            let e = outage_mc(cfg, &p, scheme, trials, seed, &opts.mc)?;
            let warn = e.imprecise.then(|| {
                format!(
                    "{} outages in {} trials; estimate imprecise",
                    e.outages, e.trials
                )
            });
            Ok((e.probability, e.std_error, e.trials, warn))
        }
        Method::Analytic => {
            let v = analytic::outage(scheme, &p, &opts.quad)?;
            Ok((v.probability, v.error, 0, v.warning))
        }
    }
}

/// Evaluate every (value, scheme, method) of the spec. Rows come back in
/// spec order whatever the worker count; failures become marked rows.
pub fn run_sweep(spec: &SweepSpec, opts: &RunOptions) -> Result<Vec<Row>, CliError> {
    spec.validate()?;
    let mut tasks = Vec::new();
    for v in &spec.values {
        for s in &spec.schemes {
            for m in &spec.methods {
                tasks.push((*v, *s, *m));
            }
        }
    }
    let rows = tasks
        .par_iter()
        .map(|&(v, scheme, method)| {
            let start = Instant::now();
            let cfg = spec.config_at(v).expect("validated");
            let result = evaluate(&cfg, scheme, method, spec.trials, spec.seed, opts);
            let wall_ms = if opts.timing {
                start.elapsed().as_millis() as u64
            } else {
                0
            };
            let (probability, uncertainty, trials, warning, error) = match result {
                Ok((p, u, t, w)) => (p, u, t, w, None),
                Err(e) => (f64::NAN, f64::NAN, 0, None, Some(e.to_string())),
            };
            Row {
                axis_value: v,
                scheme,
                method,
                probability,
                uncertainty,
                trials,
                wall_ms,
                error,
                warning,
            }
        })
        .collect();
    Ok(rows)
}
