//! Adaptive Gauss–Kronrod (10/21 point) quadrature on finite intervals, and
//! the envelope-truncation helper used to bring the semi-infinite outage
//! integrals onto a finite range.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Relative envelope level at which semi-infinite tails are cut.
    pub envelope_cut: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-12,
            envelope_cut: 1e-14,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.envelope_cut > 0.0
            && self.envelope_cut < 1.0
            && self.max_subdivisions > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "quadrature settings must be positive: {self:?}"
            )))
        }
    }

    /// Settings for an integral nested inside another one.
    pub fn inner(&self) -> Self {
        Self {
            rel_tol: self.rel_tol * 0.1,
            abs_tol: self.abs_tol * 0.1,
            ..*self
        }
    }
}

/// Integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

// Gauss weights for the odd-indexed Kronrod nodes
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk21<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [0.0; 21];
    fv[20] = f(center)?;
    let mut kronrod = fv[20] * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        fv[2 * j] = f(center - dx)?;
        fv[2 * j + 1] = f(center + dx)?;
        let pair = fv[2 * j] + fv[2 * j + 1];
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    // QUADPACK error heuristic: scale |K − G| against the integral of |f − mean|
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (fv[20] - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    resasc *= half;
    let value = kronrod * half;
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    error = error.max(50.0 * f64::EPSILON * value.abs());
    if !value.is_finite() {
        return Err(Error::NonConvergence {
            what: "adaptive quadrature",
            detail: format!("non-finite integrand on [{a}, {b}]"),
        });
    }
    Ok(Panel { a, b, value, error })
}

/// Adaptive G10K21 on [a, b]. The panel with the largest error is bisected
/// until the summed error meets max(abs_tol, rel_tol·|I|). Summation runs over
/// panels in interval order, so the result does not depend on refinement
/// history beyond the final partition.
pub fn integrate<F>(mut f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(
            "integrate",
            format!("interval must be finite, got [{a}, {b}]"),
        ));
    }
    if a == b {
        return Ok(QuadResult::default());
    }
    if b < a {
        let mut r = integrate(f, b, a, settings)?;
        r.value = -r.value;
        return Ok(r);
    }
    let mut panels = vec![gk21(&mut f, a, b)?];
    let mut evaluations = 21;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let target = settings.abs_tol.max(settings.rel_tol * value.abs());
        if error <= target {
            panels.sort_by(|x, y| x.a.total_cmp(&y.a));
            let value = panels.iter().map(|p| p.value).sum();
            return Ok(QuadResult {
                value,
                error,
                evaluations,
            });
        }
        if panels.len() >= settings.max_subdivisions {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                detail: format!(
                    "{} subdivisions on [{a}, {b}], error {error:.3e} > target {target:.3e}",
                    panels.len()
                ),
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                detail: format!("panel [{}, {}] cannot be split further", p.a, p.b),
            });
        }
        panels.push(gk21(&mut f, p.a, mid)?);
        panels.push(gk21(&mut f, mid, p.b)?);
        evaluations += 42;
    }
}

/// Range [lo, hi] of u ≥ 0 outside of which u^power·e^{−u²} is below
/// `cut` times its maximum. For power = 0 the lower end is 0.
pub fn gaussian_envelope_range(power: f64, cut: f64) -> (f64, f64) {
    let peak = (0.5 * power.max(0.0)).sqrt();
    let ln_env = |u: f64| {
        if power > 0.0 {
            power * u.ln() - u * u
        } else {
            -u * u
        }
    };
    let level = ln_env(peak.max(f64::MIN_POSITIVE)) + cut.ln();
    let level = if power > 0.0 { level } else { cut.ln() };
    // upper root by bisection; ln_env is decreasing beyond the peak
    let mut lo = peak;
    let mut hi = peak + 1.0;
    while ln_env(hi) > level {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ln_env(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let upper = hi;
    let lower = if power > 0.0 {
        let mut lo = 0.0;
        let mut hi = peak;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid > 0.0 && ln_env(mid) > level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    } else {
        0.0
    };
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let s = QuadratureSettings::default();
        let r = integrate(|x| Ok(x * x * x - 2.0 * x + 1.0), -1.0, 2.0, &s).unwrap();
        assert!((r.value - (15.0 / 4.0 - 3.0 + 3.0)).abs() < 1e-13);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let s = QuadratureSettings::default();
        let f = integrate(|x: f64| Ok(x.sin()), 0.0, 1.0, &s).unwrap().value;
        let g = integrate(|x: f64| Ok(x.sin()), 1.0, 0.0, &s).unwrap().value;
        assert_eq!(f, -g);
    }

    #[test]
    fn peaked_integrand_converges() {
        let s = QuadratureSettings {
            rel_tol: 1e-10,
            ..Default::default()
        };
        // ∫_0^1 1/(1e-4 + x²) dx = 100·atan(100)
        let r = integrate(|x| Ok(1.0 / (1e-4 + x * x)), 0.0, 1.0, &s).unwrap();
        let exact = 100.0 * 100f64.atan();
        assert!((r.value - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn gaussian_tail_truncation() {
        let (lo, hi) = gaussian_envelope_range(3.0, 1e-14);
        let s = QuadratureSettings {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            ..Default::default()
        };
        // ∫_0^∞ 2u³e^{−u²} du = 1
        let r = integrate(|u| Ok(2.0 * u.powi(3) * (-u * u).exp()), lo, hi, &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(lo > 0.0 && lo < 1e-3);
        let (lo0, hi0) = gaussian_envelope_range(0.0, 1e-14);
        assert_eq!(lo0, 0.0);
        assert!(((-hi0 * hi0).exp() - 1e-14).abs() < 1e-20);
    }

    #[test]
    fn subdivision_cap_is_reported() {
        let s = QuadratureSettings {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_subdivisions: 3,
            ..Default::default()
        };
        let err = integrate(|x: f64| Ok((1.0 / (x + 1e-9)).sin()), 0.0, 1.0, &s).unwrap_err();
        assert!(err.is_numerical());
    }

    #[test]
    fn integrand_errors_propagate() {
        let s = QuadratureSettings::default();
        let err = integrate(|_| Err(Error::Config("boom".into())), 0.0, 1.0, &s).unwrap_err();
        assert_eq!(err, Error::Config("boom".into()));
    }
}
