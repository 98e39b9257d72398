//! Random generation of correlated small-scale fading across the FAS ports,
//! MRT-precoded desired gains and the interference gains.
//!
//! Every port is correlated to a common reference ("port 0") through
//! h_k = σ(√(1−μ²)x_k + μx₀), with the real and imaginary parts of x
//! independent N(0, ½).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::netmodel::{DerivedParams, NetworkConfig};

/// The per-trial random stream: trial t of a run seeded with `seed` always
/// sees the same numbers, whichever worker executes it.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[inline]
fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// One correlated block: the K port gains and the shared reference.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedBlock {
    pub ports: Vec<Complex64>,
    pub anchor: Complex64,
}

/// Fill `ports` with correlated CN(0, σ²) gains; returns the reference gain.
pub fn fill_correlated_block<R: Rng + ?Sized>(
    rng: &mut R,
    mu: f64,
    sigma: f64,
    ports: &mut [Complex64],
) -> Complex64 {
    let x0 = complex_normal(rng);
    let own = (1.0 - mu * mu).max(0.0).sqrt();
    for p in ports.iter_mut() {
        *p = (complex_normal(rng) * own + x0 * mu) * sigma;
    }
    x0 * sigma
}

pub fn sample_correlated_gaussian_block<R: Rng + ?Sized>(
    rng: &mut R,
    n_ports: usize,
    mu: f64,
    sigma: f64,
) -> CorrelatedBlock {
    let mut ports = vec![Complex64::new(0.0, 0.0); n_ports];
    let anchor = fill_correlated_block(rng, mu, sigma, &mut ports);
    CorrelatedBlock { ports, anchor }
}

/// Reference-port values used for correlation checks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Anchor {
    pub desired: f64,
    pub f_interf: f64,
    pub s_interf: f64,
}

/// One small-scale fading draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub n_ports: usize,
    pub n_interferers: usize,
    /// |g_k| per port.
    pub desired: Vec<f64>,
    /// r_i^{−α/2} h_k^{(i)}, row-major U × K.
    pub interf_complex: Vec<Complex64>,
    /// |Σ_i s_i g_k^{(i)}| per port.
    pub f_interf: Vec<f64>,
    /// √(Σ_i |g_k^{(i)}|²) per port.
    pub s_interf: Vec<f64>,
    pub anchor: Anchor,
}

impl ChannelRealization {
    pub fn new(n_ports: usize, n_interferers: usize) -> Self {
        Self {
            n_ports,
            n_interferers,
            desired: vec![0.0; n_ports],
            interf_complex: vec![Complex64::new(0.0, 0.0); n_ports * n_interferers],
            f_interf: vec![0.0; n_ports],
            s_interf: vec![0.0; n_ports],
            anchor: Anchor::default(),
        }
    }

    pub fn interf(&self, interferer: usize, port: usize) -> Complex64 {
        self.interf_complex[interferer * self.n_ports + port]
    }
}

/// Reusable sampler holding the per-configuration constants and scratch
/// space, so that the Monte Carlo loop does not allocate.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    n_antennas: usize,
    n_ports: usize,
    mu: f64,
    sigma: f64,
    sigma_s: f64,
    serving_gain: f64,
    interferer_amp: Vec<f64>,
    block: Vec<Complex64>,
    f_sum: Vec<Complex64>,
    power: Vec<f64>,
    symbols: Vec<Complex64>,
}

impl ChannelSampler {
    pub fn new(cfg: &NetworkConfig, params: &DerivedParams) -> Self {
        let k = cfg.n_ports as usize;
        let u = cfg.n_interferers as usize;
        Self {
            n_antennas: cfg.n_bs_antennas as usize,
            n_ports: k,
            mu: params.mu(),
            sigma: cfg.sigma,
            sigma_s: cfg.sigma_s,
            serving_gain: cfg.serving_distance().powf(-cfg.path_loss_exp),
            interferer_amp: cfg
                .interferer_distances()
                .iter()
                .map(|r| r.powf(-0.5 * cfg.path_loss_exp))
                .collect(),
            block: vec![Complex64::new(0.0, 0.0); k],
            f_sum: vec![Complex64::new(0.0, 0.0); k],
            power: vec![0.0; k],
            symbols: vec![Complex64::new(0.0, 0.0); u],
        }
    }

    pub fn empty_realization(&self) -> ChannelRealization {
        ChannelRealization::new(self.n_ports, self.interferer_amp.len())
    }

    /// Draw one realization into `out`. The order of draws is: U symbol
    /// phases, N desired blocks, U interference blocks.
    pub fn sample_into<R: Rng + ?Sized>(&mut self, rng: &mut R, out: &mut ChannelRealization) {
        let k = self.n_ports;
        for s in self.symbols.iter_mut() {
            let theta = rng.random::<f64>() * 2.0 * PI;
            *s = Complex64::from_polar(self.sigma_s, theta);
        }

        self.power.iter_mut().for_each(|p| *p = 0.0);
        let mut anchor_power = 0.0;
        for _ in 0..self.n_antennas {
            let h0 = fill_correlated_block(rng, self.mu, self.sigma, &mut self.block);
            anchor_power += h0.norm_sqr();
            for (p, h) in self.power.iter_mut().zip(&self.block) {
                *p += h.norm_sqr();
            }
        }
        for (d, p) in out.desired.iter_mut().zip(&self.power) {
            *d = (self.serving_gain * p).sqrt();
        }
        out.anchor.desired = (self.serving_gain * anchor_power).sqrt();

        self.power.iter_mut().for_each(|p| *p = 0.0);
        self.f_sum
            .iter_mut()
            .for_each(|f| *f = Complex64::new(0.0, 0.0));
        let mut anchor_f = Complex64::new(0.0, 0.0);
        let mut anchor_s = 0.0;
        for (i, (&amp, &sym)) in self.interferer_amp.iter().zip(&self.symbols).enumerate() {
            let h0 = fill_correlated_block(rng, self.mu, self.sigma, &mut self.block) * amp;
            anchor_f += sym * h0;
            anchor_s += h0.norm_sqr();
            let row = &mut out.interf_complex[i * k..(i + 1) * k];
            for (j, h) in self.block.iter().enumerate() {
                let g = *h * amp;
                row[j] = g;
                self.f_sum[j] += sym * g;
                self.power[j] += g.norm_sqr();
            }
        }
        for j in 0..k {
            out.f_interf[j] = self.f_sum[j].norm();
            out.s_interf[j] = self.power[j].sqrt();
        }
        out.anchor.f_interf = anchor_f.norm();
        out.anchor.s_interf = anchor_s.sqrt();
    }
}

/// Allocate and draw a single realization.
pub fn sample_realization<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &NetworkConfig,
    params: &DerivedParams,
) -> ChannelRealization {
    let mut sampler = ChannelSampler::new(cfg, params);
    let mut out = sampler.empty_realization();
    sampler.sample_into(rng, &mut out);
    out
}
