//! Network configuration, the parameters derived from it, and the marginal
//! distributions of the desired and interference channel magnitudes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{bessel_j0, gamma_fn, ln_gamma};

/// Every free parameter of the model. Distances hold the serving base
/// station at index 0 followed by the U interferers, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub n_bs_antennas: u32,
    pub n_interferers: u32,
    pub n_ports: u32,
    /// Linear FAS length in carrier wavelengths.
    pub fas_size: f64,
    pub path_loss_exp: f64,
    pub sigma: f64,
    pub sigma_s: f64,
    pub sigma_eta: f64,
    pub sir_threshold_f: f64,
    pub sir_threshold_s: f64,
    /// Linear (not dB) SNR threshold of the noise-limited scheme.
    pub snr_threshold: f64,
    pub distances: Vec<f64>,
}

/// Port-selection scheme whose outage is being measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scheme {
    /// Per-symbol port switching on the instantaneous SIR.
    FFama,
    /// Per-coherence-block switching on the average SIR.
    SFama,
    /// Interference-free (orthogonal channels) SNR outage.
    NoiseLimited,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::FFama, Scheme::SFama, Scheme::NoiseLimited];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::FFama => "F_FAMA",
            Scheme::SFama => "S_FAMA",
            Scheme::NoiseLimited => "NOISE_LIMITED",
        }
    }

    /// The amplitude the selected port's statistic must reach, for a
    /// threshold `gamma` given in linear SIR (or SNR) units.
    pub fn threshold_amplitude(&self, cfg: &NetworkConfig, gamma: f64) -> f64 {
        let s2 = cfg.sigma_s * cfg.sigma_s;
        match self {
            Scheme::FFama => (gamma / s2).sqrt(),
            Scheme::SFama => gamma.sqrt(),
            Scheme::NoiseLimited => (cfg.sigma_eta * cfg.sigma_eta * gamma / s2).sqrt(),
        }
    }

    /// The configured threshold amplitude (Θ_f, Θ_s or the noise amplitude).
    pub fn configured_threshold(&self, p: &DerivedParams) -> f64 {
        match self {
            Scheme::FFama => p.theta_f,
            Scheme::SFama => p.theta_s,
            Scheme::NoiseLimited => p.noise_amplitude,
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown scheme {s:?}; expected F_FAMA, S_FAMA or NOISE_LIMITED"
                ))
            })
    }
}

/// dB to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl Default for NetworkConfig {
    /// The simulation defaults: N = 2, U = 3, K = 10, W = 5, α = 3,
    /// σ = σ_s = 1, σ_η = 1e−4, unit SIR thresholds, 25 dB SNR threshold and
    /// every distance equal to 100.
    fn default() -> Self {
        Self {
            n_bs_antennas: 2,
            n_interferers: 3,
            n_ports: 10,
            fas_size: 5.0,
            path_loss_exp: 3.0,
            sigma: 1.0,
            sigma_s: 1.0,
            sigma_eta: 1e-4,
            sir_threshold_f: 1.0,
            sir_threshold_s: 1.0,
            snr_threshold: db_to_linear(25.0),
            distances: vec![100.0; 4],
        }
    }
}

impl NetworkConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.n_bs_antennas == 0 || self.n_interferers == 0 || self.n_ports == 0 {
            return fail("n_bs_antennas, n_interferers and n_ports must be >= 1".into());
        }
        for (name, v) in [
            ("fas_size", self.fas_size),
            ("path_loss_exp", self.path_loss_exp),
            ("sigma", self.sigma),
            ("sigma_s", self.sigma_s),
            ("sir_threshold_f", self.sir_threshold_f),
            ("sir_threshold_s", self.sir_threshold_s),
            ("snr_threshold", self.snr_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.sigma_eta >= 0.0 && self.sigma_eta.is_finite()) {
            return fail(format!("sigma_eta must be >= 0, got {}", self.sigma_eta));
        }
        let want = self.n_interferers as usize + 1;
        if self.distances.len() != want {
            return fail(format!(
                "distances must hold U + 1 = {want} entries, got {}",
                self.distances.len()
            ));
        }
        if let Some(d) = self
            .distances
            .iter()
            .find(|d| !(**d > 0.0 && d.is_finite()))
        {
            return fail(format!("distances must be positive and finite, got {d}"));
        }
        if self.distances.windows(2).any(|w| w[1] < w[0]) {
            return fail(format!(
                "distances must be sorted ascending, got {:?}",
                self.distances
            ));
        }
        Ok(())
    }

    pub fn serving_distance(&self) -> f64 {
        self.distances[0]
    }

    pub fn interferer_distances(&self) -> &[f64] {
        &self.distances[1..]
    }
}

/// Squared port-correlation parameter of a K-port linear FAS of length W.
pub fn correlation_mu2(n_ports: u32, fas_size: f64) -> f64 {
    if n_ports <= 1 {
        return 1.0;
    }
    let k = n_ports as f64;
    let sum: f64 = (1..n_ports)
        .map(|i| {
            let i = i as f64;
            (k - i) * bessel_j0(2.0 * PI * i * fas_size / (k - 1.0))
        })
        .sum();
    (2.0 / (k * (k - 1.0)) * sum).abs().min(1.0)
}

/// Quantities computed once from a [`NetworkConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub n_ports: u32,
    pub mu2: f64,
    /// Nakagami shape of the desired magnitude (the antenna count N).
    pub omega: u32,
    /// Nakagami spread of the desired magnitude.
    pub iota: f64,
    /// Rayleigh power of the f-FAMA interference magnitude.
    pub sigma_i2: f64,
    /// Nakagami shape of the s-FAMA interference magnitude.
    pub big_omega: f64,
    /// Nakagami spread of the s-FAMA interference magnitude.
    pub phi: f64,
    pub theta_f: f64,
    pub theta_s: f64,
    /// Upper index of the f-FAMA double sum (equals omega).
    pub a: u32,
    /// ω + Ω − 1, the s-FAMA double-sum bound.
    pub b: f64,
    /// Gamma scale φ/Ω of the squared s-FAMA interference.
    pub nu_scale: f64,
    /// Amplitude √(σ_η² γ_SNR / σ_s²) the desired magnitude must exceed.
    pub noise_amplitude: f64,
}

impl DerivedParams {
    pub fn mu(&self) -> f64 {
        self.mu2.sqrt()
    }

    /// Replace μ² (used for synthetic correlation checks such as μ = 0).
    pub fn with_mu2(mut self, mu2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu2) {
            return Err(Error::Config(format!("mu2 must lie in [0, 1], got {mu2}")));
        }
        self.mu2 = mu2;
        Ok(self)
    }
}

/// Derive every distribution parameter from a validated configuration.
pub fn derive(cfg: &NetworkConfig) -> Result<DerivedParams> {
    cfg.validate()?;
    let alpha = cfg.path_loss_exp;
    let sigma2 = cfg.sigma * cfg.sigma;
    let omega = cfg.n_bs_antennas;
    let iota = cfg.serving_distance().powf(-alpha) * omega as f64 * sigma2;
    let path: Vec<f64> = cfg
        .interferer_distances()
        .iter()
        .map(|r| r.powf(-alpha))
        .collect();
    let sum: f64 = path.iter().sum();
    let sum_sq: f64 = path.iter().map(|p| p * p).sum();
    let big_omega = (sum * sum / sum_sq).clamp(1.0, cfg.n_interferers as f64);
    let phi = sigma2 * sum;
    Ok(DerivedParams {
        n_ports: cfg.n_ports,
        mu2: correlation_mu2(cfg.n_ports, cfg.fas_size),
        omega,
        iota,
        sigma_i2: sigma2 * cfg.sigma_s * cfg.sigma_s * sum,
        big_omega,
        phi,
        theta_f: (cfg.sir_threshold_f / (cfg.sigma_s * cfg.sigma_s)).sqrt(),
        theta_s: cfg.sir_threshold_s.sqrt(),
        a: omega,
        b: omega as f64 + big_omega - 1.0,
        nu_scale: phi / big_omega,
        noise_amplitude: (cfg.sigma_eta * cfg.sigma_eta * cfg.snr_threshold
            / (cfg.sigma_s * cfg.sigma_s))
            .sqrt(),
    })
}

/// Nakagami density with the given shape and spread (mean square).
pub fn nakagami_pdf(tau: f64, shape: f64, spread: f64) -> Result<f64> {
    if !(shape >= 0.5) {
        return Err(Error::domain(
            "nakagami_pdf",
            format!("shape must be >= 0.5, got {shape}"),
        ));
    }
    if !(spread > 0.0) {
        return Err(Error::domain(
            "nakagami_pdf",
            format!("spread must be > 0, got {spread}"),
        ));
    }
    if tau <= 0.0 {
        return Ok(if tau == 0.0 && shape == 0.5 {
            2.0 / (PI * spread).sqrt()
        } else {
            0.0
        });
    }
    let ln = 2f64.ln() + shape * (shape / spread).ln() + (2.0 * shape - 1.0) * tau.ln()
        - shape * tau * tau / spread
        - ln_gamma(shape);
    Ok(ln.exp())
}

/// Gamma density with shape α and rate β: τ^{α−1} e^{−βτ} β^α / Γ(α).
pub fn gamma_pdf(tau: f64, shape: f64, rate: f64) -> Result<f64> {
    if !(shape > 0.0) || !(rate > 0.0) {
        return Err(Error::domain(
            "gamma_pdf",
            format!("shape and rate must be > 0, got {shape}, {rate}"),
        ));
    }
    if tau < 0.0 {
        return Ok(0.0);
    }
    if tau == 0.0 {
        return Ok(match shape {
            s if s < 1.0 => f64::INFINITY,
            1.0 => rate,
            _ => 0.0,
        });
    }
    let ln = (shape - 1.0) * tau.ln() - rate * tau + shape * rate.ln() - ln_gamma(shape);
    Ok(ln.exp())
}

/// (shape, spread) of the desired magnitude |g_k|.
pub fn desired_marginal(p: &DerivedParams) -> (f64, f64) {
    (p.omega as f64, p.iota)
}

/// (shape, spread) of the s-FAMA interference magnitude.
pub fn s_interf_marginal(p: &DerivedParams) -> (f64, f64) {
    (p.big_omega, p.phi)
}

/// Rayleigh power σ_I² of the f-FAMA interference magnitude.
pub fn f_interf_sigma2(p: &DerivedParams) -> f64 {
    p.sigma_i2
}

/// Mean of a Nakagami(shape, spread) magnitude.
pub fn nakagami_mean(shape: f64, spread: f64) -> f64 {
    gamma_ratio_half(shape) * (spread / shape).sqrt()
}

/// Γ(x + ½)/Γ(x), through logs so large shapes do not overflow.
fn gamma_ratio_half(x: f64) -> f64 {
    if x < 50.0 {
        if let (Ok(num), Ok(den)) = (gamma_fn(x + 0.5), gamma_fn(x)) {
            return num / den;
        }
    }
    (ln_gamma(x + 0.5) - ln_gamma(x)).exp()
}

/// Moment summary of the two interference magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferenceMoments {
    pub f_mean: f64,
    pub f_variance: f64,
    /// Mean of σ_s·|g^[s]|.
    pub s_mean: f64,
    /// Exact Nakagami variance of σ_s·|g^[s]|.
    pub s_variance: f64,
    /// The σ_s²φ/(5Ω) shortcut for the same variance.
    pub s_variance_approx: f64,
}

pub fn interference_moments(p: &DerivedParams, sigma_s: f64) -> InterferenceMoments {
    let ratio = gamma_ratio_half(p.big_omega);
    InterferenceMoments {
        f_mean: 0.5 * p.sigma_i2.sqrt() * PI.sqrt(),
        f_variance: p.sigma_i2 * (4.0 - PI) / 4.0,
        s_mean: sigma_s * ratio * (p.phi / p.big_omega).sqrt(),
        s_variance: sigma_s * sigma_s * p.phi * (1.0 - ratio * ratio / p.big_omega),
        s_variance_approx: sigma_s * sigma_s * p.phi / (5.0 * p.big_omega),
    }
}

/// E_f / E_s = (√π/2)·Γ(Ω)√Ω/Γ(Ω+½), for σ_s = 1 (the ratio is scale-free
/// when σ_I² = σ_s²φ).
pub fn mean_ratio(big_omega: f64) -> f64 {
    0.5 * PI.sqrt() * big_omega.sqrt() / gamma_ratio_half(big_omega)
}

/// Variance ratio Var_f / Var_s using the /5 shortcut for Var_s: 5Ω(4−π)/4.
pub fn variance_ratio_approx(big_omega: f64) -> f64 {
    5.0 * big_omega * (4.0 - PI) / 4.0
}

/// Variance ratio Var_f / Var_s with the exact Nakagami variance.
pub fn variance_ratio_exact(big_omega: f64) -> f64 {
    let r = gamma_ratio_half(big_omega);
    ((4.0 - PI) / 4.0) / (1.0 - r * r / big_omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg_with(distances: Vec<f64>) -> NetworkConfig {
        NetworkConfig {
            n_interferers: distances.len() as u32 - 1,
            distances,
            ..Default::default()
        }
    }

    #[test]
    fn single_port_is_fully_correlated() {
        assert_eq!(correlation_mu2(1, 5.0), 1.0);
        assert_eq!(correlation_mu2(1, 0.1), 1.0);
    }

    #[test]
    fn two_ports_collapse_to_one_bessel_term() {
        assert_relative_eq!(
            correlation_mu2(2, 5.0),
            bessel_j0(10.0 * PI).abs(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn ten_ports_match_direct_sum() {
        // 9-term sum evaluated in 30-digit arithmetic
        assert_relative_eq!(
            correlation_mu2(10, 5.0),
            0.044_016_540_000_188_88,
            max_relative = 1e-9
        );
    }

    #[test]
    fn derived_examples() {
        let p = derive(&NetworkConfig::default()).unwrap();
        assert_relative_eq!(p.iota, 2e-6, max_relative = 1e-12);
        assert_eq!(p.omega, 2);
        assert_eq!(p.big_omega, 3.0);
        assert_relative_eq!(p.phi, 3e-6, max_relative = 1e-12);
        let p = derive(&cfg_with(vec![200.0, 400.0, 600.0, 800.0])).unwrap();
        // (Σ r^-3)² / Σ r^-6 over 400, 600, 800
        let w: Vec<f64> = [400f64, 600.0, 800.0].iter().map(|r| r.powi(-3)).collect();
        let oracle = w.iter().sum::<f64>().powi(2) / w.iter().map(|x| x * x).sum::<f64>();
        assert_relative_eq!(p.big_omega, oracle, max_relative = 1e-12);
        assert!((p.big_omega - 1.83).abs() < 0.01);
    }

    #[test]
    fn config_validation() {
        assert!(cfg_with(vec![100.0, 300.0, 200.0, 400.0])
            .validate()
            .is_err());
        assert!(cfg_with(vec![100.0, 0.0, 200.0, 400.0]).validate().is_err());
        let mut c = NetworkConfig::default();
        c.distances.pop();
        assert!(c.validate().is_err());
        let c = NetworkConfig {
            n_ports: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let c = NetworkConfig::default();
        assert_eq!(NetworkConfig::from_json(&c.to_json()).unwrap(), c);
        let typo = c.to_json().replacen("\"fas_size\"", "\"fas_sise\"", 1);
        assert!(matches!(
            NetworkConfig::from_json(&typo),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
            assert_eq!(
                serde_json::to_string(&s).unwrap(),
                format!("\"{}\"", s.as_str())
            );
        }
        assert!("fast".parse::<Scheme>().is_err());
    }

    #[test]
    fn threshold_amplitudes_match_derived() {
        let cfg = NetworkConfig {
            sigma_s: 2.0,
            sir_threshold_f: 3.0,
            sir_threshold_s: 5.0,
            ..Default::default()
        };
        let p = derive(&cfg).unwrap();
        for s in Scheme::ALL {
            let gamma = match s {
                Scheme::FFama => cfg.sir_threshold_f,
                Scheme::SFama => cfg.sir_threshold_s,
                Scheme::NoiseLimited => cfg.snr_threshold,
            };
            assert_relative_eq!(
                s.threshold_amplitude(&cfg, gamma),
                s.configured_threshold(&p)
            );
        }
    }

    #[test]
    fn nakagami_examples() {
        for &t in &[0.1f64, 0.7, 2.0] {
            let s2 = 1.7;
            let rayleigh = 2.0 * t / s2 * (-t * t / s2).exp();
            assert_relative_eq!(
                nakagami_pdf(t, 1.0, s2).unwrap(),
                rayleigh,
                max_relative = 1e-13
            );
        }
        assert_eq!(nakagami_pdf(0.0, 2.0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(
            nakagami_pdf(1.0, 2.0, 1.0).unwrap(),
            8.0 * (-2.0f64).exp(),
            max_relative = 1e-13
        );
        assert!(nakagami_pdf(1.0, 0.4, 1.0).is_err());
    }

    #[test]
    fn densities_integrate_to_one() {
        let s = crate::quad::QuadratureSettings {
            rel_tol: 1e-11,
            ..Default::default()
        };
        let n = crate::quad::integrate(|t| nakagami_pdf(t, 3.5, 2.0), 0.0, 20.0, &s).unwrap();
        assert!((n.value - 1.0).abs() < 1e-10);
        let g = crate::quad::integrate(|t| gamma_pdf(t, 2.5, 3.0), 0.0, 40.0, &s).unwrap();
        assert!((g.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_interferer_marginals_coincide() {
        let p = derive(&cfg_with(vec![100.0, 250.0])).unwrap();
        let (shape, spread) = s_interf_marginal(&p);
        assert_eq!(shape, 1.0);
        assert_relative_eq!(spread, f_interf_sigma2(&p), max_relative = 1e-14);
        assert_eq!(desired_marginal(&p).0, 2.0);
    }

    #[test]
    fn moment_formulas() {
        let p = derive(&cfg_with(vec![100.0, 250.0])).unwrap();
        let m = interference_moments(&p, 1.0);
        assert_relative_eq!(m.f_mean, m.s_mean, max_relative = 1e-14);
        assert_relative_eq!(m.f_variance, m.s_variance, max_relative = 1e-13);
        assert_relative_eq!(mean_ratio(1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(variance_ratio_approx(3.0), 15.0 * (4.0 - PI) / 4.0);
        assert_relative_eq!(variance_ratio_exact(1.0), 1.0, max_relative = 1e-13);
    }

    proptest! {
        #[test]
        fn mu2_stays_in_unit_interval(k in 1u32..=512, w in 0.01f64..20.0) {
            let m = correlation_mu2(k, w);
            prop_assert!((0.0..=1.0).contains(&m));
        }

        #[test]
        fn big_omega_bounds(mut r in prop::collection::vec(10.0f64..1000.0, 1..8)) {
            r.sort_by(f64::total_cmp);
            let mut d = vec![5.0];
            d.extend(&r);
            let p = derive(&cfg_with(d)).unwrap();
            let u = r.len() as f64;
            prop_assert!(p.big_omega >= 1.0 && p.big_omega <= u + 1e-12);
            if r.iter().all(|x| *x == r[0]) {
                prop_assert!((p.big_omega - u).abs() < 1e-12);
            }
        }

        #[test]
        fn equal_distances_give_u(u in 1usize..10, r in 10.0f64..1000.0) {
            let mut d = vec![1.0];
            d.extend(std::iter::repeat_n(r, u));
            let p = derive(&cfg_with(d)).unwrap();
            prop_assert!((p.big_omega - u as f64).abs() < 1e-12);
        }

        #[test]
        fn unequal_distances_fall_short_of_u(base in 10.0f64..500.0, gap in 1.0f64..500.0, u in 2usize..6) {
            let mut d = vec![1.0];
            d.extend((0..u).map(|i| base + gap * i as f64));
            let p = derive(&cfg_with(d)).unwrap();
            prop_assert!(p.big_omega < u as f64);
        }

        #[test]
        fn mean_ratio_below_one_past_single_interferer(om in 1.01f64..50.0) {
            prop_assert!(mean_ratio(om) < 1.0);
            prop_assert!(mean_ratio(om) > mean_ratio(om + 0.5));
        }
    }
}
