//! Monte Carlo outage estimation for the three schemes.
//!
//! Trials are cut into fixed-size batches. Every trial draws from its own
//! stream (see [`trial_rng`]), and batch results are combined by summing
//! integer counts in batch order, so the estimate is bit-identical for any
//! number of workers and for both execution modes.

use serde::Serialize;

use crate::channel::{trial_rng, ChannelRealization, ChannelSampler};
use crate::error::{Error, Result};
use crate::netmodel::{DerivedParams, NetworkConfig, Scheme};
use crate::stats::Moments;

pub const DEFAULT_BATCH: u64 = 1 << 16;

/// How batches are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon data parallelism; without the `parallel` feature this runs
    /// sequentially.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub batch_size: u64,
    pub execution: Execution,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            batch_size: DEFAULT_BATCH,
            execution: Execution::default(),
        }
    }
}

/// Run `work(start, end)` over consecutive batches and return the results in
/// batch order.
pub fn map_batches<T, F>(trials: u64, settings: &McSettings, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    let batch = settings.batch_size.max(1);
    let n_batches = trials.div_ceil(batch);
    let run = |b: u64| work(b * batch, ((b + 1) * batch).min(trials));
    match settings.execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n_batches).into_par_iter().map(run).collect()
        }
        _ => (0..n_batches).map(run).collect(),
    }
}

/// Monte Carlo outage probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub probability: f64,
    pub trials: u64,
    pub outages: u64,
    pub std_error: f64,
    pub scheme: Scheme,
    pub seed: u64,
    /// Set when the standard error exceeds 30% of the estimate (including
    /// the case of no observed outage).
    pub imprecise: bool,
}

impl OutageEstimate {
    pub fn from_counts(outages: u64, trials: u64, scheme: Scheme, seed: u64) -> Self {
        let p = outages as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        Self {
            probability: p,
            trials,
            outages,
            std_error: se,
            scheme,
            seed,
            imprecise: outages == 0 || se > 0.3 * p,
        }
    }
}

/// Port-selection statistic of one realization: the best port's
/// signal-to-interference amplitude ratio, or the best desired amplitude for
/// the noise-limited scheme. Outage occurs when it falls below the threshold.
pub fn selection_statistic(scheme: Scheme, r: &ChannelRealization) -> f64 {
    match scheme {
        Scheme::FFama => r
            .desired
            .iter()
            .zip(&r.f_interf)
            .map(|(d, i)| d / i)
            .fold(f64::NEG_INFINITY, f64::max),
        Scheme::SFama => r
            .desired
            .iter()
            .zip(&r.s_interf)
            .map(|(d, i)| d / i)
            .fold(f64::NEG_INFINITY, f64::max),
        Scheme::NoiseLimited => r.desired.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    Ok(())
}

/// Outage estimates for several threshold amplitudes from one run: each
/// realization's statistic is compared with every threshold, so the curve
/// is monotone in the threshold by construction.
pub fn outage_curve_mc(
    cfg: &NetworkConfig,
    params: &DerivedParams,
    scheme: Scheme,
    thresholds: &[f64],
    trials: u64,
    seed: u64,
    settings: &McSettings,
) -> Result<Vec<OutageEstimate>> {
    check_trials(trials)?;
    cfg.validate()?;
    let template = ChannelSampler::new(cfg, params);
    let counts = map_batches(trials, settings, |start, end| {
        let mut sampler = template.clone();
        let mut r = sampler.empty_realization();
        let mut c = vec![0u64; thresholds.len()];
        for t in start..end {
            sampler.sample_into(&mut trial_rng(seed, t), &mut r);
            let stat = selection_statistic(scheme, &r);
            for (ci, th) in c.iter_mut().zip(thresholds) {
                if stat < *th {
                    *ci += 1;
                }
            }
        }
        c
    });
    let mut total = vec![0u64; thresholds.len()];
    for c in &counts {
        for (t, x) in total.iter_mut().zip(c) {
            *t += x;
        }
    }
    Ok(total
        .into_iter()
        .map(|o| OutageEstimate::from_counts(o, trials, scheme, seed))
        .collect())
}

/// Outage at the configured threshold of `scheme`.
pub fn outage_mc(
    cfg: &NetworkConfig,
    params: &DerivedParams,
    scheme: Scheme,
    trials: u64,
    seed: u64,
    settings: &McSettings,
) -> Result<OutageEstimate> {
    let th = scheme.configured_threshold(params);
    Ok(outage_curve_mc(cfg, params, scheme, &[th], trials, seed, settings)?[0])
}

pub fn outage_f_fama_mc(
    cfg: &NetworkConfig,
    params: &DerivedParams,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    outage_mc(
        cfg,
        params,
        Scheme::FFama,
        trials,
        seed,
        &McSettings::default(),
    )
}

pub fn outage_s_fama_mc(
    cfg: &NetworkConfig,
    params: &DerivedParams,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    outage_mc(
        cfg,
        params,
        Scheme::SFama,
        trials,
        seed,
        &McSettings::default(),
    )
}

pub fn outage_snr_mc(
    cfg: &NetworkConfig,
    params: &DerivedParams,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    outage_mc(
        cfg,
        params,
        Scheme::NoiseLimited,
        trials,
        seed,
        &McSettings::default(),
    )
}

/// Which channel magnitude to summarise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Quantity {
    Desired,
    FInterf,
    SInterf,
}

impl Quantity {
    fn port(&self, r: &ChannelRealization, k: usize) -> f64 {
        match self {
            Quantity::Desired => r.desired[k],
            Quantity::FInterf => r.f_interf[k],
            Quantity::SInterf => r.s_interf[k],
        }
    }

    fn anchor(&self, r: &ChannelRealization) -> f64 {
        match self {
            Quantity::Desired => r.anchor.desired,
            Quantity::FInterf => r.anchor.f_interf,
            Quantity::SInterf => r.anchor.s_interf,
        }
    }

    /// Root mean square predicted by the model, used to size the histogram.
    fn rms(&self, p: &DerivedParams) -> f64 {
        match self {
            Quantity::Desired => p.iota.sqrt(),
            Quantity::FInterf => p.sigma_i2.sqrt(),
            Quantity::SInterf => p.phi.sqrt(),
        }
    }
}

/// Histogram and moment summary of one port's magnitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    pub quantity: Quantity,
    pub trials: u64,
    pub mean: f64,
    pub variance: f64,
    /// Mean and variance of the squared magnitude.
    pub mean_sq: f64,
    pub variance_sq: f64,
    /// Correlation of the squared magnitudes of the reference port and port 1.
    pub corr_sq: f64,
    pub bin_edges: Vec<f64>,
    pub density: Vec<f64>,
}

pub const HISTOGRAM_BINS: usize = 100;

#[derive(Clone)]
struct DistAcc {
    mag: Moments,
    sq: Moments,
    counts: Vec<u64>,
}

/// Distribution of port 1's magnitude, with its correlation to the
/// reference port.
pub fn empirical_distribution(
    cfg: &NetworkConfig,
    params: &DerivedParams,
    trials: u64,
    seed: u64,
    which: Quantity,
    settings: &McSettings,
) -> Result<EmpiricalDistribution> {
    if trials < 10_000 {
        return Err(Error::Config(format!(
            "empirical_distribution needs >= 1e4 trials, got {trials}"
        )));
    }
    cfg.validate()?;
    let template = ChannelSampler::new(cfg, params);
    let upper = 3.0 * which.rms(params);
    let width = upper / HISTOGRAM_BINS as f64;
    let parts = map_batches(trials, settings, |start, end| {
        let mut sampler = template.clone();
        let mut r = sampler.empty_realization();
        let mut acc = DistAcc {
            mag: Moments::default(),
            sq: Moments::default(),
            counts: vec![0; HISTOGRAM_BINS],
        };
        for t in start..end {
            sampler.sample_into(&mut trial_rng(seed, t), &mut r);
            let x = which.port(&r, 0);
            let a = which.anchor(&r);
            acc.mag.push(x, a);
            acc.sq.push(x * x, a * a);
            let bin = (x / width) as usize;
            if bin < HISTOGRAM_BINS {
                acc.counts[bin] += 1;
            }
        }
        acc
    });
    let mut mag = Moments::default();
    let mut sq = Moments::default();
    let mut counts = vec![0u64; HISTOGRAM_BINS];
    for p in &parts {
        mag.merge(&p.mag);
        sq.merge(&p.sq);
        for (c, x) in counts.iter_mut().zip(&p.counts) {
            *c += x;
        }
    }
    Ok(EmpiricalDistribution {
        quantity: which,
        trials,
        mean: mag.mean_x(),
        variance: mag.var_x(),
        mean_sq: sq.mean_x(),
        variance_sq: sq.var_x(),
        corr_sq: sq.correlation(),
        bin_edges: (0..=HISTOGRAM_BINS).map(|i| i as f64 * width).collect(),
        density: counts
            .iter()
            .map(|c| *c as f64 / (trials as f64 * width))
            .collect(),
    })
}

/// Raw samples of one port's magnitude (for distribution-equality tests).
pub fn sample_port_values(
    cfg: &NetworkConfig,
    params: &DerivedParams,
    trials: u64,
    seed: u64,
    which: Quantity,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let mut sampler = ChannelSampler::new(cfg, params);
    let mut r = sampler.empty_realization();
    Ok((0..trials)
        .map(|t| {
            sampler.sample_into(&mut trial_rng(seed, t), &mut r);
            which.port(&r, 0)
        })
        .collect())
}
