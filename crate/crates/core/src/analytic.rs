//! Numerical evaluation of the integral-form outage expressions and of the
//! joint port distributions.
//!
//! Both interference-limited schemes reduce to the same double integral
//!
//!   O = ∫∫ Nak(t₀; m, s) · Nak(t; ω, ι) · B(t₀, t)^K dt dt₀,
//!
//! where t₀ is the interference magnitude at the reference port, t the
//! desired magnitude there, and B the conditional probability that a single
//! port is in outage. For f-FAMA the interference is Rayleigh, (m, s) =
//! (1, σ_I²) with threshold Θ_f; for s-FAMA (m, s) = (Ω, φ) with Θ_s. B is a
//! Marcum Q term minus a finite double sum whose Bessel factors appear only
//! in the scaled angular form, so nothing overflows.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::netmodel::{DerivedParams, Scheme};
use crate::quad::{gaussian_envelope_range, integrate, QuadResult, QuadratureSettings};
use crate::specfun::bessel::bessel_i_scaled_real;
use crate::specfun::{
    angular_bessel_products, bessel_i, bessel_i_scaled, ln_gamma, marcum_pair, marcum_q_complement,
    pochhammer, reg_lower_gamma,
};

/// Tolerance on Ω being an integer before the s-FAMA double sum is accepted.
pub const INTEGER_SHAPE_TOL: f64 = 1e-9;

/// Brackets below this are treated as zero before raising to the K-th power.
const BRACKET_FLOOR: f64 = 1e-300;

/// Analytic outage probability with the quadrature's error estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageValue {
    pub probability: f64,
    pub error: f64,
    pub warning: Option<String>,
}

impl OutageValue {
    fn from_quad(r: QuadResult) -> Self {
        Self {
            probability: r.value.clamp(0.0, 1.0),
            error: r.error,
            warning: None,
        }
    }
}

/// B^K through exp(K ln B), after clamping B to [0, 1].
fn bracket_power(b: f64, k: u32) -> f64 {
    let b = b.clamp(0.0, 1.0);
    if b > BRACKET_FLOOR {
        (k as f64 * b.ln()).exp()
    } else {
        0.0
    }
}

fn check_settings(q: &QuadratureSettings) -> Result<()> {
    q.validate()
}

fn check_mu2(func: &'static str, mu2: f64) -> Result<()> {
    if !(0.0..1.0).contains(&mu2) {
        return Err(Error::domain(
            func,
            format!("needs mu2 in [0, 1), got {mu2}; use the single-port form when K = 1"),
        ));
    }
    Ok(())
}

/// ∫₀^∞ Nak(t; shape, spread) g(t) dt, with t = √(spread/shape)·u and the
/// range cut where u^{2·shape−1}e^{−u²} falls below `envelope_cut`.
fn nakagami_expectation<F>(
    shape: f64,
    spread: f64,
    q: &QuadratureSettings,
    mut g: F,
) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let scale = (spread / shape).sqrt();
    let power = 2.0 * shape - 1.0;
    let ln_norm = 2f64.ln() - ln_gamma(shape);
    let (lo, hi) = gaussian_envelope_range(power, q.envelope_cut);
    integrate(
        |u| {
            let w = (ln_norm + power * u.ln() - u * u).exp();
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w * g(scale * u)?)
        },
        lo,
        hi,
        q,
    )
}

/// One (q, p) term of the double sum: Bessel order and log of the
/// t-independent coefficient.
#[derive(Debug, Clone, Copy)]
struct SumTerm {
    order: i32,
    ln_coef: f64,
    t0_power: f64,
    t_power: f64,
}

/// Conditional single-port outage probability B(t₀, t) for an interference
/// magnitude with Nakagami (shape, spread) at the reference port.
#[derive(Debug, Clone)]
pub struct PortBracket {
    shape: f64,
    mu2: f64,
    omega: f64,
    theta: f64,
    /// (1 − μ²)·D with D = ι·m + ω·s·Θ².
    c: f64,
    terms: Vec<SumTerm>,
    orders: Vec<i32>,
}

impl PortBracket {
    /// Build the bracket. `shape` must be a positive integer.
    pub fn new(params: &DerivedParams, shape: f64, spread: f64, theta: f64) -> Result<Self> {
        check_mu2("port_bracket", params.mu2)?;
        if (shape - shape.round()).abs() > INTEGER_SHAPE_TOL || shape < 1.0 {
            return Err(Error::domain(
                "port_bracket",
                format!(
                    "interference shape must be a positive integer, got {shape}; \
                     use equal interferer distances (shape = U) or Monte Carlo"
                ),
            ));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::domain(
                "port_bracket",
                format!("threshold must be positive, got {theta}"),
            ));
        }
        let shape = shape.round();
        let mu2 = params.mu2;
        let omega = params.omega as f64;
        let iota = params.iota;
        let d = iota * shape + omega * spread * theta * theta;
        let c = (1.0 - mu2) * d;
        // b = ω + m − 1 is the double-sum bound (equals ω for f-FAMA)
        let b = params.omega + shape as u32 - 1;
        let l1 = (spread / shape * (omega * (1.0 - mu2) / (2.0 * iota)).sqrt()).ln();
        let l2 = (d / (spread * theta) * (2.0 / (iota * omega * (1.0 - mu2))).sqrt()).ln();
        let l3 = (2.0 * omega * theta * theta / (iota * (1.0 - mu2)))
            .sqrt()
            .ln();
        let base = b as f64 * (iota * shape / d).ln() + (omega - 1.0) * theta.ln();
        let mut terms = Vec::new();
        for qi in 0..b {
            for pi in 0..(b - qi) {
                let s = (qi + pi) as f64;
                let ln_p = (pochhammer((b - qi - pi) as f64, pi)).ln() - ln_gamma(pi as f64 + 1.0);
                terms.push(SumTerm {
                    order: 1 - params.omega as i32 + (qi + pi) as i32,
                    ln_coef: base + s * l1 + qi as f64 * l2 + pi as f64 * l3 + ln_p,
                    t0_power: omega - 1.0 - s,
                    t_power: 1.0 - omega + s,
                });
            }
        }
        let mut orders: Vec<i32> = terms.iter().map(|t| t.order).collect();
        orders.sort_unstable();
        orders.dedup();
        Ok(Self {
            shape,
            mu2,
            omega,
            theta,
            c,
            terms,
            orders,
        })
    }

    fn marcum_term(&self, t0: f64, t: f64) -> Result<f64> {
        let k = 2.0 * self.omega * self.shape * self.mu2 / self.c;
        let a = (k * self.theta * self.theta * t0 * t0).sqrt();
        let b = (k * t * t).sqrt();
        Ok(marcum_pair(self.shape, a, b)?.q)
    }

    fn coupling(&self, t0: f64, t: f64) -> f64 {
        2.0 * self.omega * self.shape * self.theta * self.mu2 * t * t0 / self.c
    }

    /// B(t₀, t) from the angular (scaled) form, before clamping.
    pub fn eval(&self, t0: f64, t: f64) -> Result<f64> {
        let z = self.coupling(t0, t);
        let scaled = match angular_bessel_products(&self.orders, z) {
            Ok(v) => v,
            // very large couplings: the integrand is too narrow for the
            // fixed rule, the scaled series gives the same quantity
            Err(e) if e.is_numerical() => self
                .orders
                .iter()
                .map(|n| bessel_i_scaled(*n, z))
                .collect::<Result<Vec<_>>>()?,
            Err(e) => return Err(e),
        };
        let gauss = -self.omega * self.shape * self.mu2 * (self.theta * t0 - t).powi(2) / self.c;
        let (ln_t0, ln_t) = (t0.ln(), t.ln());
        let mut sum = 0.0;
        for term in &self.terms {
            let idx = self
                .orders
                .binary_search(&term.order)
                .expect("order present");
            let ln = term.ln_coef + gauss + term.t0_power * ln_t0 + term.t_power * ln_t;
            sum += ln.exp() * scaled[idx];
        }
        Ok(self.marcum_term(t0, t)? - sum)
    }

    /// The same bracket with the unscaled Bessel function and the separate
    /// Gaussian factor; overflows for large couplings.
    pub fn eval_bessel_form(&self, t0: f64, t: f64) -> Result<f64> {
        let z = self.coupling(t0, t);
        let gauss =
            -self.omega * self.shape * self.mu2 * (self.theta * self.theta * t0 * t0 + t * t)
                / self.c;
        let (ln_t0, ln_t) = (t0.ln(), t.ln());
        let mut sum = 0.0;
        for term in &self.terms {
            let ln = term.ln_coef + gauss + term.t0_power * ln_t0 + term.t_power * ln_t;
            sum += ln.exp() * bessel_i(term.order, z)?;
        }
        Ok(self.marcum_term(t0, t)? - sum)
    }
}

/// Interference (shape, spread, threshold) of a scheme.
fn interference_law(scheme: Scheme, p: &DerivedParams) -> Result<(f64, f64, f64)> {
    match scheme {
        Scheme::FFama => Ok((1.0, p.sigma_i2, p.theta_f)),
        Scheme::SFama => Ok((p.big_omega, p.phi, p.theta_s)),
        Scheme::NoiseLimited => Err(Error::domain(
            "interference_law",
            "noise-limited scheme has no interference",
        )),
    }
}

/// Bracket of a scheme at the configured threshold.
pub fn scheme_bracket(scheme: Scheme, p: &DerivedParams) -> Result<PortBracket> {
    let (m, s, th) = interference_law(scheme, p)?;
    PortBracket::new(p, m, s, th)
}

fn double_integral(
    p: &DerivedParams,
    shape: f64,
    spread: f64,
    bracket: &PortBracket,
    q: &QuadratureSettings,
) -> Result<QuadResult> {
    let inner_q = q.inner();
    let k = p.n_ports;
    let omega = p.omega as f64;
    nakagami_expectation(shape, spread, q, |t0| {
        Ok(nakagami_expectation(omega, p.iota, &inner_q, |t| {
            Ok(bracket_power(bracket.eval(t0, t)?, k))
        })?
        .value)
    })
}

fn interference_outage(
    scheme: Scheme,
    p: &DerivedParams,
    q: &QuadratureSettings,
) -> Result<OutageValue> {
    check_settings(q)?;
    let (m, s, th) = interference_law(scheme, p)?;
    let bracket = PortBracket::new(p, m, s, th)?;
    let mut v = OutageValue::from_quad(double_integral(p, bracket.shape, s, &bracket, q)?);
    if scheme == Scheme::SFama && p.big_omega <= p.omega as f64 {
        v.warning = Some(format!(
            "interference shape {} <= antenna count {}; the closed form is stated for shape > antennas, Monte Carlo is authoritative",
            p.big_omega, p.omega
        ));
    }
    Ok(v)
}

/// f-FAMA outage for K ≥ 2 ports (μ² < 1).
pub fn outage_f_fama(p: &DerivedParams, q: &QuadratureSettings) -> Result<OutageValue> {
    interference_outage(Scheme::FFama, p, q)
}

/// s-FAMA outage for K ≥ 2 ports; Ω must be an integer.
pub fn outage_s_fama(p: &DerivedParams, q: &QuadratureSettings) -> Result<OutageValue> {
    interference_outage(Scheme::SFama, p, q)
}

/// Single fixed antenna: ∫ Nak(t; m, s) P(ω, ωΘ²t²/ι) dt.
fn single_port_interference(
    shape: f64,
    spread: f64,
    theta: f64,
    p: &DerivedParams,
    q: &QuadratureSettings,
) -> Result<OutageValue> {
    check_settings(q)?;
    let omega = p.omega as f64;
    let r = nakagami_expectation(shape, spread, q, |t| {
        reg_lower_gamma(omega, omega * theta * theta * t * t / p.iota)
    })?;
    Ok(OutageValue::from_quad(r))
}

pub fn outage_f_fama_k1(p: &DerivedParams, q: &QuadratureSettings) -> Result<OutageValue> {
    single_port_interference(1.0, p.sigma_i2, p.theta_f, p, q)
}

/// Real Ω is allowed here.
pub fn outage_s_fama_k1(p: &DerivedParams, q: &QuadratureSettings) -> Result<OutageValue> {
    single_port_interference(p.big_omega, p.phi, p.theta_s, p, q)
}

/// Noise-limited outage with K ports: the joint CDF at equal thresholds.
pub fn outage_snr(p: &DerivedParams, q: &QuadratureSettings) -> Result<OutageValue> {
    check_settings(q)?;
    check_mu2("outage_snr", p.mu2)?;
    let r = desired_cdf_integral(p, q, p.noise_amplitude, p.n_ports)?;
    Ok(OutageValue::from_quad(r))
}

/// Noise-limited outage of a single fixed antenna: P(ω, ω·σ_η²γ/(ισ_s²)).
pub fn outage_snr_k1(p: &DerivedParams) -> Result<f64> {
    let omega = p.omega as f64;
    reg_lower_gamma(
        omega,
        omega * p.noise_amplitude * p.noise_amplitude / p.iota,
    )
}

/// ∫ Nak(t; ω, ι) [1 − Q_ω(a(t), b)]^K dt with equal per-port thresholds.
fn desired_cdf_integral(
    p: &DerivedParams,
    q: &QuadratureSettings,
    tau: f64,
    k: u32,
) -> Result<QuadResult> {
    let omega = p.omega as f64;
    let denom = p.iota * (1.0 - p.mu2);
    let b = (2.0 * omega * tau * tau / denom).sqrt();
    nakagami_expectation(omega, p.iota, q, |t| {
        let a = (2.0 * omega * p.mu2 * t * t / denom).sqrt();
        Ok(bracket_power(marcum_q_complement(omega, a, b)?, k))
    })
}

/// Joint CDF of the desired magnitudes at ports 1..K (K = taus.len()).
pub fn joint_cdf_desired(taus: &[f64], p: &DerivedParams, q: &QuadratureSettings) -> Result<f64> {
    check_settings(q)?;
    check_mu2("joint_cdf_desired", p.mu2)?;
    if taus.is_empty() {
        return Err(Error::domain("joint_cdf_desired", "need at least one port"));
    }
    if let Some(t) = taus.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::domain(
            "joint_cdf_desired",
            format!("thresholds must be >= 0, got {t}"),
        ));
    }
    if taus.contains(&0.0) {
        return Ok(0.0);
    }
    let omega = p.omega as f64;
    let denom = p.iota * (1.0 - p.mu2);
    let bs: Vec<f64> = taus
        .iter()
        .map(|t| (2.0 * omega * t * t / denom).sqrt())
        .collect();
    let r = nakagami_expectation(omega, p.iota, q, |t| {
        let a = (2.0 * omega * p.mu2 * t * t / denom).sqrt();
        let mut ln = 0.0;
        for b in &bs {
            let c = marcum_q_complement(omega, a, *b)?;
            if c <= BRACKET_FLOOR {
                return Ok(0.0);
            }
            ln += c.ln();
        }
        Ok(ln.exp())
    })?;
    Ok(r.value.clamp(0.0, 1.0))
}

/// Joint density of K correlated Nakagami(shape, spread) magnitudes that
/// share the reference-port correlation μ².
fn joint_pdf_nakagami(
    taus: &[f64],
    shape: f64,
    spread: f64,
    mu2: f64,
    q: &QuadratureSettings,
) -> Result<f64> {
    check_settings(q)?;
    check_mu2("joint_pdf", mu2)?;
    if taus.is_empty() {
        return Err(Error::domain("joint_pdf", "need at least one port"));
    }
    if let Some(t) = taus.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::domain(
            "joint_pdf",
            format!("arguments must be > 0, got {t}"),
        ));
    }
    let mu = mu2.sqrt();
    let c = spread * (1.0 - mu2);
    let order = shape - 1.0;
    // below this μ the Bessel ratio I_{m−1}(z)/μ^{m−1} is replaced by its limit
    let independent = mu < 1e-150;
    let ln_fixed = (2.0 * shape).ln() - c.ln();
    let r = nakagami_expectation(shape, spread, q, |t0| {
        let mut ln = 0.0;
        for &tk in taus {
            if independent {
                ln += 2f64.ln() + shape * (shape / c).ln() + (2.0 * shape - 1.0) * tk.ln()
                    - shape * tk * tk / c
                    - ln_gamma(shape);
            } else {
                let z = 2.0 * shape * mu * t0 * tk / c;
                let i = bessel_i_scaled_real(order, z)?;
                if i == 0.0 {
                    return Ok(0.0);
                }
                ln += ln_fixed + (1.0 - shape) * t0.ln() + shape * tk.ln()
                    - shape * (mu * t0 - tk).powi(2) / c
                    - order * mu.ln()
                    + i.ln();
            }
        }
        Ok(ln.exp())
    })?;
    Ok(r.value.max(0.0))
}

/// Joint density of the desired magnitudes at ports 1..K.
pub fn joint_pdf_desired(taus: &[f64], p: &DerivedParams, q: &QuadratureSettings) -> Result<f64> {
    joint_pdf_nakagami(taus, p.omega as f64, p.iota, p.mu2, q)
}

/// Joint density of the s-FAMA interference magnitudes (Nakagami(Ω, φ)
/// approximation).
pub fn joint_pdf_s_interf(taus: &[f64], p: &DerivedParams, q: &QuadratureSettings) -> Result<f64> {
    joint_pdf_nakagami(taus, p.big_omega, p.phi, p.mu2, q)
}

/// Outage of `scheme` with the form appropriate to the port count: the
/// single-port expressions when K = 1, the K-port integrals otherwise.
pub fn outage(scheme: Scheme, p: &DerivedParams, q: &QuadratureSettings) -> Result<OutageValue> {
    let single = p.n_ports == 1;
    match (scheme, single) {
        (Scheme::FFama, true) => outage_f_fama_k1(p, q),
        (Scheme::FFama, false) => outage_f_fama(p, q),
        (Scheme::SFama, true) => outage_s_fama_k1(p, q),
        (Scheme::SFama, false) => outage_s_fama(p, q),
        (Scheme::NoiseLimited, true) => Ok(OutageValue {
            probability: outage_snr_k1(p)?,
            error: 0.0,
            warning: None,
        }),
        (Scheme::NoiseLimited, false) => outage_snr(p, q),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{derive, nakagami_pdf, NetworkConfig};
    use crate::specfun::marcum_q;
    use proptest::prelude::*;

    fn params(cfg: NetworkConfig) -> DerivedParams {
        derive(&cfg).unwrap()
    }

    /// B(t₀, t) by direct integration over the port's interference
    /// magnitude x given t₀ (a Nakagami-type conditional law) of the
    /// conditional CDF of the desired magnitude at Θx given t.
    fn bracket_by_quadrature(
        p: &DerivedParams,
        shape: f64,
        spread: f64,
        theta: f64,
        t0: f64,
        t: f64,
    ) -> f64 {
        let mu2 = p.mu2;
        let mu = mu2.sqrt();
        let omega = p.omega as f64;
        let c = spread * (1.0 - mu2);
        let fine = QuadratureSettings {
            rel_tol: 1e-12,
            abs_tol: 1e-16,
            max_subdivisions: 2000,
            ..Default::default()
        };
        let upper = mu * t0 + 12.0 * c.sqrt();
        integrate(
            |x| {
                if x == 0.0 {
                    return Ok(0.0);
                }
                let z = 2.0 * shape * mu * t0 * x / c;
                let ln = (2.0 * shape / c).ln() + (1.0 - shape) * t0.ln() + shape * x.ln()
                    - shape * (mu * t0 - x).powi(2) / c
                    - (shape - 1.0) * mu.ln()
                    + bessel_i_scaled_real(shape - 1.0, z)?.ln();
                let a = (2.0 * omega * mu2 * t * t / (p.iota * (1.0 - mu2))).sqrt();
                let b = (2.0 * omega * theta * theta * x * x / (p.iota * (1.0 - mu2))).sqrt();
                Ok(ln.exp() * (1.0 - marcum_q(omega, a, b)?))
            },
            0.0,
            upper,
            &fine,
        )
        .unwrap()
        .value
    }

    #[test]
    fn bracket_matches_conditional_probability() {
        for &(n, u) in &[(2u32, 3u32), (4, 3), (1, 1), (3, 1), (2, 2)] {
            let cfg = NetworkConfig {
                n_bs_antennas: n,
                n_interferers: u,
                distances: vec![100.0; u as usize + 1],
                ..Default::default()
            };
            let p = params(cfg);
            for scheme in [Scheme::FFama, Scheme::SFama] {
                let (m, s, th) = interference_law(scheme, &p).unwrap();
                let br = PortBracket::new(&p, m, s, th).unwrap();
                for &(x0, x) in &[(0.3, 0.5), (1.0, 1.0), (0.5, 2.0), (2.0, 0.7)] {
                    let t0 = x0 * (s / m).sqrt();
                    let t = x * (p.iota / p.omega as f64).sqrt();
                    let direct = bracket_by_quadrature(&p, m, s, th, t0, t);
                    let v = br.eval(t0, t).unwrap();
                    assert!(
                        (v - direct).abs() < 1e-9,
                        "N={n} U={u} {scheme} ({x0},{x}): {v} vs {direct}"
                    );
                }
            }
        }
    }

    #[test]
    fn bessel_and_angular_brackets_agree() {
        let p = params(NetworkConfig::default());
        let br = scheme_bracket(Scheme::SFama, &p).unwrap();
        for &(t0, t) in &[(1e-3, 1e-3), (2e-3, 5e-4), (5e-4, 3e-3)] {
            let a = br.eval(t0, t).unwrap();
            let b = br.eval_bessel_form(t0, t).unwrap();
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn non_integer_shape_is_rejected() {
        let p = params(NetworkConfig {
            distances: vec![200.0, 400.0, 600.0, 800.0],
            ..Default::default()
        });
        let err = outage_s_fama(&p, &QuadratureSettings::default()).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
        assert!(err.to_string().contains("integer"));
        // the single-port form accepts real shapes
        assert!(outage_s_fama_k1(&p, &QuadratureSettings::default()).is_ok());
    }

    #[test]
    fn full_correlation_needs_single_port_form() {
        let p = params(NetworkConfig {
            n_ports: 1,
            ..Default::default()
        });
        assert!(matches!(
            outage_f_fama(&p, &QuadratureSettings::default()),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            outage_snr(&p, &QuadratureSettings::default()),
            Err(Error::Domain { .. })
        ));
        assert!(outage(Scheme::FFama, &p, &QuadratureSettings::default()).is_ok());
    }

    #[test]
    fn tiny_threshold_gives_tiny_outage() {
        let p = params(NetworkConfig {
            sir_threshold_f: 1e-8,
            sir_threshold_s: 1e-8,
            ..Default::default()
        });
        let q = QuadratureSettings::default();
        assert!(outage_f_fama(&p, &q).unwrap().probability < 1e-12);
        assert!(outage_s_fama(&p, &q).unwrap().probability < 1e-12);
        assert!(outage_f_fama_k1(&p, &q).unwrap().probability < 1e-6);
    }

    #[test]
    fn single_port_limits() {
        let q = QuadratureSettings::default();
        let lo = params(NetworkConfig {
            sir_threshold_f: 1e-12,
            sir_threshold_s: 1e-12,
            ..Default::default()
        });
        let hi = params(NetworkConfig {
            sir_threshold_f: 1e12,
            sir_threshold_s: 1e12,
            ..Default::default()
        });
        assert!(outage_f_fama_k1(&lo, &q).unwrap().probability < 1e-10);
        assert!(outage_s_fama_k1(&lo, &q).unwrap().probability < 1e-10);
        assert!(outage_f_fama_k1(&hi, &q).unwrap().probability > 1.0 - 1e-8);
        assert!(outage_s_fama_k1(&hi, &q).unwrap().probability > 1.0 - 1e-8);
    }

    #[test]
    fn noise_forms_agree_at_one_port() {
        let q = QuadratureSettings {
            rel_tol: 1e-11,
            abs_tol: 1e-15,
            ..Default::default()
        };
        for n in 1..=4 {
            let p = params(NetworkConfig {
                n_bs_antennas: n,
                n_ports: 1,
                ..Default::default()
            })
            .with_mu2(0.5)
            .unwrap();
            let integral = outage_snr(&p, &q).unwrap().probability;
            let closed = outage_snr_k1(&p).unwrap();
            assert!(
                (integral - closed).abs() < 1e-8,
                "N={n}: {integral} vs {closed}"
            );
        }
    }

    #[test]
    fn joint_cdf_edges() {
        let p = params(NetworkConfig::default());
        let q = QuadratureSettings::default();
        assert_eq!(joint_cdf_desired(&[0.0, 1.0, 1.0], &p, &q).unwrap(), 0.0);
        assert!(joint_cdf_desired(&[1.0, 1.0, 1.0], &p, &q).unwrap() > 1.0 - 1e-9);
        let s = p.iota.sqrt();
        let a = joint_cdf_desired(&[0.5 * s, s], &p, &q).unwrap();
        let b = joint_cdf_desired(&[0.7 * s, s], &p, &q).unwrap();
        assert!(a < b);
    }

    #[test]
    fn joint_pdf_single_port_is_marginal() {
        let p = params(NetworkConfig::default());
        let q = QuadratureSettings {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            ..Default::default()
        };
        for &x in &[0.3, 1.0, 1.8] {
            let tau = x * p.iota.sqrt();
            let j = joint_pdf_desired(&[tau], &p, &q).unwrap();
            let m = nakagami_pdf(tau, p.omega as f64, p.iota).unwrap();
            assert!((j / m - 1.0).abs() < 1e-6, "{j} vs {m}");
            let tau = x * p.phi.sqrt();
            let j = joint_pdf_s_interf(&[tau], &p, &q).unwrap();
            let m = nakagami_pdf(tau, p.big_omega, p.phi).unwrap();
            assert!((j / m - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn joint_pdf_factorizes_without_correlation() {
        let p = params(NetworkConfig::default());
        let q = QuadratureSettings {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            ..Default::default()
        };
        let s = p.iota.sqrt();
        let taus = [0.8 * s, 1.3 * s];
        let prod: f64 = taus
            .iter()
            .map(|t| nakagami_pdf(*t, 2.0, p.iota).unwrap())
            .product();
        for mu2 in [0.0, 1e-10] {
            let pz = p.with_mu2(mu2).unwrap();
            let j = joint_pdf_desired(&taus, &pz, &q).unwrap();
            assert!((j / prod - 1.0).abs() < 1e-4, "mu2={mu2}: {j} vs {prod}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn bracket_is_a_probability(x0 in 0.01f64..4.0, x in 0.01f64..4.0, n in 1u32..5, u in 1u32..4) {
            let cfg = NetworkConfig {
                n_bs_antennas: n,
                n_interferers: u,
                distances: vec![100.0; u as usize + 1],
                ..Default::default()
            };
            let p = params(cfg);
            for scheme in [Scheme::FFama, Scheme::SFama] {
                let (m, s, th) = interference_law(scheme, &p).unwrap();
                let br = PortBracket::new(&p, m, s, th).unwrap();
                let v = br.eval(x0 * (s / m).sqrt(), x * (p.iota / n as f64).sqrt()).unwrap();
                prop_assert!((-1e-8..=1.0 + 1e-8).contains(&v), "{v}");
            }
        }

        #[test]
        fn single_port_outage_monotone(g1 in 0.01f64..50.0, g2 in 0.01f64..50.0) {
            let (lo, hi) = if g1 < g2 { (g1, g2) } else { (g2, g1) };
            let q = QuadratureSettings::default();
            let mk = |g: f64| params(NetworkConfig { sir_threshold_f: g, sir_threshold_s: g, ..Default::default() });
            prop_assert!(outage_f_fama_k1(&mk(lo), &q).unwrap().probability <= outage_f_fama_k1(&mk(hi), &q).unwrap().probability + 1e-9);
            prop_assert!(outage_s_fama_k1(&mk(lo), &q).unwrap().probability <= outage_s_fama_k1(&mk(hi), &q).unwrap().probability + 1e-9);
        }
    }
}
