//! Small statistical helpers for the validation harness.

/// Two-sample Kolmogorov–Smirnov statistic and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    assert!(!a.is_empty() && !b.is_empty(), "samples must be non-empty");
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let ne = (n * m / (n + m)).sqrt();
    (d, kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d))
}

/// P(K > λ) for the Kolmogorov distribution.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = sign * (-2.0 * jf * jf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Running sums for mean, variance and correlation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub sum_x: f64,
    pub sum_xx: f64,
    pub sum_y: f64,
    pub sum_yy: f64,
    pub sum_xy: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        self.sum_x += x;
        self.sum_xx += x * x;
        self.sum_y += y;
        self.sum_yy += y * y;
        self.sum_xy += x * y;
    }

    pub fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.sum_x += o.sum_x;
        self.sum_xx += o.sum_xx;
        self.sum_y += o.sum_y;
        self.sum_yy += o.sum_yy;
        self.sum_xy += o.sum_xy;
    }

    pub fn mean_x(&self) -> f64 {
        self.sum_x / self.n as f64
    }

    pub fn var_x(&self) -> f64 {
        let n = self.n as f64;
        (self.sum_xx - self.sum_x * self.sum_x / n) / (n - 1.0)
    }

    pub fn mean_y(&self) -> f64 {
        self.sum_y / self.n as f64
    }

    pub fn var_y(&self) -> f64 {
        let n = self.n as f64;
        (self.sum_yy - self.sum_y * self.sum_y / n) / (n - 1.0)
    }

    /// Pearson correlation of x and y.
    pub fn correlation(&self) -> f64 {
        let n = self.n as f64;
        let cov = self.sum_xy - self.sum_x * self.sum_y / n;
        let vx = self.sum_xx - self.sum_x * self.sum_x / n;
        let vy = self.sum_yy - self.sum_y * self.sum_y / n;
        cov / (vx * vy).sqrt()
    }
}
