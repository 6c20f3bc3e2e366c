#![allow(dead_code)]

/// CDF of the density `exp(log_density)` on `[lo, hi]`, tabulated by the
/// cumulative trapezoid rule on `m` intervals and normalized numerically.
pub struct TabulatedCdf {
    lo: f64,
    h: f64,
    cum: Vec<f64>,
}

impl TabulatedCdf {
    pub fn new(log_density: impl Fn(f64) -> f64, lo: f64, hi: f64, m: usize) -> Self {
        let h = (hi - lo) / m as f64;
        let logs: Vec<f64> = (0..=m).map(|i| log_density(lo + h * i as f64)).collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ys: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let mut cum = vec![0.0; m + 1];
        for i in 1..=m {
            cum[i] = cum[i - 1] + 0.5 * h * (ys[i - 1] + ys[i]);
        }
        let total = cum[m];
        cum.iter_mut().for_each(|c| *c /= total);
        TabulatedCdf { lo, h, cum }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let u = (x - self.lo) / self.h;
        if u <= 0.0 {
            return 0.0;
        }
        let i = u.floor() as usize;
        if i + 1 >= self.cum.len() {
            return 1.0;
        }
        let w = u - i as f64;
        self.cum[i] * (1.0 - w) + self.cum[i + 1] * w
    }
}

/// One-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Log density of `p^e0 (1 − p)^e1` up to a constant.
pub fn beta_kernel(e0: f64, e1: f64) -> impl Fn(f64) -> f64 {
    move |p: f64| e0 * p.ln() + e1 * (1.0 - p).ln()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}
