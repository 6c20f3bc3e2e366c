//! Beta and Dirichlet draws, optionally truncated.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01};

use crate::error::{domain, Result};
use crate::special::{ln_beta_pdf, ln_beta_tails, ln_sum_exp};

/// Absolute tolerance in `p` for inverse-CDF root finding.
pub const ROOT_TOL: f64 = 1e-12;
/// Iteration cap for inverse-CDF root finding.
pub const ROOT_MAX_ITER: usize = 200;

fn check_beta_args(a: f64, b: f64, lo: f64, hi: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(domain(format!(
            "beta shapes must be positive and finite, got ({a}, {b})"
        )));
    }
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(domain(format!(
            "truncation bounds must satisfy 0 ≤ lo < hi ≤ 1, got [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Quantile of `Beta(a, b)` restricted to `[lo, hi]` at fraction `v ∈ [0, 1]`
/// of the truncated mass: `F⁻¹(F(lo) + v (F(hi) − F(lo)))`.
///
/// All CDF arithmetic is done in log space on whichever tail holds the
/// interval, so intervals far out in a tail still resolve.
pub fn truncated_beta_quantile(a: f64, b: f64, lo: f64, hi: f64, v: f64) -> Result<f64> {
    check_beta_args(a, b, lo, hi)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(domain(format!(
            "quantile fraction must lie in [0, 1], got {v}"
        )));
    }
    let (ln_lo_lower, ln_lo_upper) = ln_beta_tails(a, b, lo);
    let p = if ln_lo_lower <= (0.5f64).ln() {
        // lower-tail coordinates: h(p) = ln F(p)
        let ln_hi = ln_beta_tails(a, b, hi).0;
        let target = lerp_ln(ln_lo_lower, ln_hi, v);
        invert(
            lo,
            hi,
            target,
            |p| ln_beta_tails(a, b, p).0,
            |p, h| (ln_beta_pdf(a, b, p) - h).exp(),
        )
    } else {
        // upper-tail coordinates: h(p) = −ln S(p), increasing
        let ln_hi = ln_beta_tails(a, b, hi).1;
        let target = -lerp_ln(ln_lo_upper, ln_hi, v);
        invert(
            lo,
            hi,
            target,
            |p| -ln_beta_tails(a, b, p).1,
            |p, h| (ln_beta_pdf(a, b, p) + h).exp(),
        )
    };
    Ok(p.clamp(lo, hi))
}

// ln(e^x + v (e^y − e^x)).
fn lerp_ln(ln_x: f64, ln_y: f64, v: f64) -> f64 {
    if ln_x == ln_y {
        return ln_x;
    }
    if ln_x < ln_y {
        let w = (ln_x - ln_y).exp();
        ln_y + (w + v * (1.0 - w)).ln()
    } else {
        let w = (ln_y - ln_x).exp();
        ln_x + (1.0 - v * (1.0 - w)).ln()
    }
}

/// Solve `h(p) = target` for increasing `h` on `[lo, hi]` by safeguarded
/// Newton iteration; `dh(p, h(p))` is the derivative.
fn invert<H, D>(lo: f64, hi: f64, target: f64, h: H, dh: D) -> f64
where
    H: Fn(f64) -> f64,
    D: Fn(f64, f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut p = 0.5 * (a + b);
    for _ in 0..ROOT_MAX_ITER {
        let hp = h(p);
        if hp < target {
            a = p;
        } else {
            b = p;
        }
        let d = dh(p, hp);
        let mut next = if hp.is_finite() && d.is_finite() && d > 0.0 {
            p - (hp - target) / d
        } else {
            f64::NAN
        };
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        if (next - p).abs() < 1e-3 * ROOT_TOL || b - a < ROOT_TOL {
            return next;
        }
        p = next;
    }
    p
}

/// Inverse-CDF draw from `Beta(a, b)` truncated to `[lo, hi]`.
pub fn truncated_beta_draw<R: Rng + ?Sized>(
    a: f64,
    b: f64,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Result<f64> {
    check_beta_args(a, b, lo, hi)?;
    let v: f64 = rng.random();
    truncated_beta_quantile(a, b, lo, hi, v)
}

fn check_shapes(alphas: &[f64]) -> Result<()> {
    if alphas.len() < 2 {
        return Err(domain(format!(
            "Dirichlet needs at least 2 components, got {}",
            alphas.len()
        )));
    }
    if let Some(bad) = alphas.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
        return Err(domain(format!(
            "Dirichlet shapes must be positive and finite, got {bad}"
        )));
    }
    Ok(())
}

/// Untruncated Dirichlet draw via log-gamma variates, stable for tiny shapes.
pub fn dirichlet_draw<R: Rng + ?Sized>(alphas: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    check_shapes(alphas)?;
    let log_g: Vec<f64> = alphas
        .iter()
        .map(|&s| {
            if s < 1.0 {
                // Gamma(s) = Gamma(s + 1) · U^{1/s}
                let g = Gamma::new(s + 1.0, 1.0)
                    .expect("validated shape")
                    .sample(rng);
                let u: f64 = rng.sample(Open01);
                g.ln() + u.ln() / s
            } else {
                Gamma::new(s, 1.0)
                    .expect("validated shape")
                    .sample(rng)
                    .ln()
            }
        })
        .collect();
    let norm = ln_sum_exp(&log_g);
    Ok(log_g.iter().map(|l| (l - norm).exp()).collect())
}

/// Dirichlet draw restricted to `x_i ≥ a0` by sequential stick-breaking.
///
/// Component `i` is `r · v` with `r` the remaining mass and
/// `v ~ Beta(α_i, Σ_{j>i} α_j)` truncated to `[a0 / r, (r − m a0) / r]`,
/// `m` being the number of later components. The final component takes the
/// remainder. Each step conditions only on feasibility, not on the exact
/// probability that later components clear the floor, so the draw is an
/// approximation to the truncated Dirichlet whose error shrinks with `a0`.
pub fn truncated_dirichlet_draw<R: Rng + ?Sized>(
    alphas: &[f64],
    a0: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_shapes(alphas)?;
    let k = alphas.len();
    if !(a0 >= 0.0 && a0 * (k as f64) < 1.0) {
        return Err(domain(format!(
            "infeasible floor a0 = {a0} for {k} components"
        )));
    }
    if a0 == 0.0 {
        return dirichlet_draw(alphas, rng);
    }
    let mut out = Vec::with_capacity(k);
    let mut remaining = 1.0;
    for i in 0..k - 1 {
        let later = (k - 1 - i) as f64;
        let rest: f64 = alphas[i + 1..].iter().sum();
        let lo = (a0 / remaining).min(1.0);
        let hi = ((remaining - later * a0) / remaining).min(1.0);
        let v = if hi - lo <= 0.0 {
            lo
        } else {
            truncated_beta_draw(alphas[i], rest, lo, hi, rng)?
        };
        let x = (remaining * v).clamp(a0, remaining - later * a0);
        out.push(x);
        remaining -= x;
    }
    out.push(remaining.max(a0));
    // absorb rounding so the point sums to one
    let s: f64 = out.iter().sum();
    let last = out.last_mut().expect("k ≥ 2");
    *last += 1.0 - s;
    Ok(out)
}
