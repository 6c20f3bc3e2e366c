//! Adaptive Gauss–Kronrod quadrature and integration over the truncated
//! probability simplex.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

/// Absolute and relative error targets.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn rel(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        kronrod += w * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * h;
    let error = ((kronrod - gauss) * h).abs();
    Segment { a, b, value, error }
}

/// Integrate `f` over `[a, b]`, seeding the subdivision with `breaks`
/// (points outside the open interval are ignored). Returns the estimate and
/// its error bound.
pub fn integrate_with_error<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Quadrature(format!("bad interval [{a}, {b}]")));
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let mut points: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut heap = BinaryHeap::new();
    let (mut total, mut err) = (0.0, 0.0);
    for w in points.windows(2) {
        let seg = gk15(&f, w[0], w[1]);
        total += seg.value;
        err += seg.error;
        heap.push(seg);
    }
    while err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "no convergence after {MAX_INTERVALS} intervals (estimate {total}, error {err})"
            )));
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision; accept what we have
            heap.push(worst);
            break;
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    if !total.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integral {total}")));
    }
    // re-sum to shed accumulated cancellation from incremental updates
    let total: f64 = heap.iter().map(|s| s.value).sum();
    let err: f64 = heap.iter().map(|s| s.error).sum();
    Ok((total, err))
}

/// Integrate `f` over `[a, b]` to the given tolerance.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<f64> {
    integrate_with_error(f, a, b, breaks, tol).map(|(v, _)| v)
}

/// Breakpoints that bracket the bulk of a `Beta(a, b)`-shaped integrand
/// on `[lo, hi]`, so a narrow peak is never stepped over.
pub fn beta_breaks(a: f64, b: f64, lo: f64, hi: f64) -> Vec<f64> {
    let n = a + b;
    let centre = if a > 1.0 && b > 1.0 {
        (a - 1.0) / (n - 2.0)
    } else {
        a / n
    };
    let sd = (a * b / (n * n * (n + 1.0))).sqrt();
    let mut out = vec![centre.clamp(lo, hi)];
    for k in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        out.push((centre - k * sd).clamp(lo, hi));
        out.push((centre + k * sd).clamp(lo, hi));
    }
    out
}

/// Maximum of `Σ e_i ln x_i` over `{x : x_i ≥ a0, Σ x_i = 1}`.
///
/// Used as a log-scale shift so integrands over the simplex stay in range.
pub fn log_max_on_simplex(exponents: &[f64], a0: f64) -> f64 {
    let k = exponents.len();
    let log_f = |x: &[f64]| -> f64 {
        exponents
            .iter()
            .zip(x)
            .map(|(&e, &xi)| if e == 0.0 { 0.0 } else { e * xi.ln() })
            .sum()
    };
    let mut best = f64::NEG_INFINITY;
    // vertices of the truncated simplex
    for j in 0..k {
        let mut x = vec![a0; k];
        x[j] = 1.0 - (k as f64 - 1.0) * a0;
        best = best.max(log_f(&x));
    }
    // water-filling point x_i = max(a0, e_i / λ)
    if exponents.iter().any(|&e| e > 0.0) {
        let fill = |lambda: f64| -> f64 {
            exponents
                .iter()
                .map(|&e| (e.max(0.0) / lambda).max(a0))
                .sum::<f64>()
        };
        let (mut lo, mut hi) = (1e-300_f64, 1.0_f64);
        while fill(hi) > 1.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if fill(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x: Vec<f64> = exponents
            .iter()
            .map(|&e| (e.max(0.0) / hi).max(a0))
            .collect();
        let s: f64 = x.iter().sum();
        let x: Vec<f64> = x.iter().map(|v| v / s).collect();
        best = best.max(log_f(&x));
    }
    best
}

/// Largest simplex dimension handled by nested quadrature.
pub const MAX_SIMPLEX_DIM: usize = 4;

/// Integrate `g(x) · exp(Σ e_i ln x_i − shift)` over the simplex truncated to
/// `x_i ≥ a0`, with respect to Lebesgue measure on the first `K − 1`
/// coordinates.
pub fn simplex_integrate<G: Fn(&[f64]) -> f64>(
    exponents: &[f64],
    a0: f64,
    shift: f64,
    g: &G,
    tol: Tolerance,
) -> Result<f64> {
    let k = exponents.len();
    if !(2..=MAX_SIMPLEX_DIM).contains(&k) {
        return Err(Error::Quadrature(format!(
            "simplex quadrature supports dimensions 2..={MAX_SIMPLEX_DIM}, got {k}"
        )));
    }
    let mut x = vec![0.0; k];
    nested(exponents, a0, shift, g, tol, 0, 1.0, &mut x)
}

#[allow(clippy::too_many_arguments)]
fn nested<G: Fn(&[f64]) -> f64>(
    e: &[f64],
    a0: f64,
    shift: f64,
    g: &G,
    tol: Tolerance,
    i: usize,
    remaining: f64,
    x: &mut [f64],
) -> Result<f64> {
    let k = e.len();
    let later = (k - 1 - i) as f64;
    let lo = a0;
    let hi = remaining - later * a0;
    if hi <= lo {
        return Ok(0.0);
    }
    // conditional shape of x_i / remaining once later coordinates are
    // integrated out: Beta(e_i + 1, Σ_{j>i} (e_j + 1))
    let rest: f64 = e[i + 1..].iter().map(|v| v + 1.0).sum();
    let breaks: Vec<f64> = beta_breaks(e[i] + 1.0, rest, lo / remaining, hi / remaining)
        .into_iter()
        .map(|v| v * remaining)
        .collect();
    let prefix = x[..i].to_vec();
    let inner = |xi: f64| -> f64 {
        let mut xs = vec![0.0; k];
        xs[..i].copy_from_slice(&prefix);
        xs[i] = xi;
        if i + 2 == k {
            xs[k - 1] = remaining - xi;
            let log_f: f64 = e
                .iter()
                .zip(&xs)
                .map(|(&ej, &xj)| if ej == 0.0 { 0.0 } else { ej * xj.ln() })
                .sum();
            g(&xs) * (log_f - shift).exp()
        } else {
            nested(
                e,
                a0,
                shift,
                g,
                Tolerance {
                    abs: tol.abs,
                    rel: tol.rel * 0.1,
                },
                i + 1,
                remaining - xi,
                &mut xs,
            )
            .unwrap_or(f64::NAN)
        }
    };
    let v = integrate(inner, lo, hi, &breaks, tol)?;
    if v.is_nan() {
        return Err(Error::Quadrature("inner integral failed".into()));
    }
    Ok(v)
}
