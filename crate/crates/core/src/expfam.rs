//! Conjugate exponential-family models: beta–Bernoulli and
//! categorical–Dirichlet, each optionally truncated to a floor `a0` on every
//! simplex coordinate.
//!
//! Both families are handled in simplex coordinates. A beta–Bernoulli
//! parameter `p` is the point `[p, 1 − p]`, with sufficient statistic
//! `S(x) = [x, 1 − x]`; a categorical outcome `j` contributes the indicator
//! `e_j`. Posteriors are kept in natural-parameter form
//! `(η_stats, η_count) = (αχ + ΣS, α + N)` and the density is
//! `∝ Π x_i^{η_stats[i]}`, so the conventional shape parameters are
//! `η_stats + 1`.

use rand::Rng;
use serde::Serialize;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{contract, domain, Error, Result};
use crate::quadrature::{log_max_on_simplex, simplex_integrate, Tolerance};
use crate::samplers::{dirichlet_draw, truncated_beta_draw, truncated_dirichlet_draw};

const NORMALIZER_TOL: Tolerance = Tolerance {
    abs: 0.0,
    rel: 1e-11,
};
const MEAN_TOL: Tolerance = Tolerance {
    abs: 0.0,
    rel: 1e-11,
};
const KL_TOL: Tolerance = Tolerance {
    abs: 1e-13,
    rel: 1e-10,
};
const POINT_TOL: f64 = 1e-9;

/// Bernoulli likelihood with a (possibly truncated) beta prior on
/// `p ∈ [a0, 1 − a0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaBernoulliModel {
    trunc: f64,
}

impl BetaBernoulliModel {
    pub fn new(trunc: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&trunc) {
            return Err(domain(format!(
                "truncation a0 must lie in [0, 0.5), got {trunc}"
            )));
        }
        Ok(BetaBernoulliModel { trunc })
    }

    pub fn untruncated() -> Self {
        BetaBernoulliModel { trunc: 0.0 }
    }

    pub fn trunc(&self) -> f64 {
        self.trunc
    }

    /// Simplex coordinates of the success probability `p`.
    pub fn point(p: f64) -> [f64; 2] {
        [p, 1.0 - p]
    }
}

/// Categorical likelihood over `{1, …, K}` with a (possibly truncated)
/// Dirichlet prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CategoricalDirichletModel {
    dim: usize,
    trunc: f64,
}

impl CategoricalDirichletModel {
    pub fn new(dim: usize, trunc: f64) -> Result<Self> {
        if dim < 2 {
            return Err(domain(format!(
                "categorical dimension must be at least 2, got {dim}"
            )));
        }
        if !(trunc >= 0.0 && trunc * (dim as f64) < 1.0) {
            return Err(domain(format!(
                "truncation a0 must lie in [0, 1/{dim}), got {trunc}"
            )));
        }
        Ok(CategoricalDirichletModel { dim, trunc })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> f64 {
        self.trunc
    }
}

/// The two supported conjugate families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Model {
    BetaBernoulli(BetaBernoulliModel),
    Categorical(CategoricalDirichletModel),
}

impl From<BetaBernoulliModel> for Model {
    fn from(m: BetaBernoulliModel) -> Self {
        Model::BetaBernoulli(m)
    }
}

impl From<CategoricalDirichletModel> for Model {
    fn from(m: CategoricalDirichletModel) -> Self {
        Model::Categorical(m)
    }
}

impl Model {
    /// Dimension `d` of the sufficient statistic.
    pub fn dim(&self) -> usize {
        match self {
            Model::BetaBernoulli(_) => 2,
            Model::Categorical(m) => m.dim,
        }
    }

    /// Per-coordinate floor `a0` of the parameter support.
    pub fn trunc(&self) -> f64 {
        match self {
            Model::BetaBernoulli(m) => m.trunc,
            Model::Categorical(m) => m.trunc,
        }
    }

    pub fn is_truncated(&self) -> bool {
        self.trunc() > 0.0
    }

    /// Same family with a different truncation floor.
    pub fn with_trunc(&self, trunc: f64) -> Result<Model> {
        match self {
            Model::BetaBernoulli(_) => BetaBernoulliModel::new(trunc).map(Model::from),
            Model::Categorical(m) => CategoricalDirichletModel::new(m.dim, trunc).map(Model::from),
        }
    }

    /// Index of the indicator set by `outcome`, or `None` if invalid.
    fn indicator(&self, outcome: u32) -> Option<usize> {
        match self {
            Model::BetaBernoulli(_) => match outcome {
                1 => Some(0),
                0 => Some(1),
                _ => None,
            },
            Model::Categorical(m) => {
                let j = outcome as usize;
                (1..=m.dim).contains(&j).then(|| j - 1)
            }
        }
    }

    fn check_point(&self, theta: &[f64]) -> Result<()> {
        let d = self.dim();
        if theta.len() != d {
            return Err(contract(format!(
                "parameter has {} coordinates, model has {d}",
                theta.len()
            )));
        }
        let a0 = self.trunc();
        if theta.iter().any(|&x| !x.is_finite() || x < a0 - POINT_TOL) {
            return Err(domain(format!(
                "parameter {theta:?} lies outside the support (floor {a0})"
            )));
        }
        let s: f64 = theta.iter().sum();
        if (s - 1.0).abs() > POINT_TOL {
            return Err(domain(format!("parameter {theta:?} does not sum to one")));
        }
        Ok(())
    }
}

/// Aggregate sufficient statistics `ΣS(x)` and the record count `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuffStats {
    pub stats: Vec<f64>,
    pub count: u64,
    /// Noised statistics carry no sum-to-`N` guarantee.
    pub privatized: bool,
}

impl SuffStats {
    pub fn new(stats: Vec<f64>, count: u64) -> Self {
        SuffStats {
            stats,
            count,
            privatized: false,
        }
    }

    pub fn empty(model: &Model) -> Self {
        SuffStats::new(vec![0.0; model.dim()], 0)
    }

    /// Check the exact-count invariants; privatized statistics only need
    /// the right dimension and nonnegative components.
    pub fn check(&self, model: &Model) -> Result<()> {
        if self.stats.len() != model.dim() {
            return Err(contract(format!(
                "statistic has dimension {}, model has {}",
                self.stats.len(),
                model.dim()
            )));
        }
        if self.stats.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(domain(format!(
                "statistics must be finite and nonnegative: {:?}",
                self.stats
            )));
        }
        if !self.privatized {
            let n = self.count as f64;
            let total: f64 = self.stats.iter().sum();
            if (total - n).abs() > 1e-9 * n.max(1.0) || self.stats.iter().any(|&s| s > n) {
                return Err(domain(format!(
                    "statistics {:?} inconsistent with count {}",
                    self.stats, self.count
                )));
            }
        }
        Ok(())
    }
}

/// Conjugate prior in `(χ, α)` form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugatePrior {
    chi: Vec<f64>,
    alpha: f64,
}

impl ConjugatePrior {
    /// `chi` must be finite and nonnegative, `alpha` positive.
    pub fn new(chi: Vec<f64>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain(format!(
                "prior pseudo-count must be positive, got {alpha}"
            )));
        }
        if chi.is_empty() || chi.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(domain(format!(
                "prior statistics must be finite and nonnegative, got {chi:?}"
            )));
        }
        Ok(ConjugatePrior { chi, alpha })
    }

    /// Prior whose density is `∝ Π x_i^{s_i − 1}`, i.e. `Beta(s_0, s_1)` or
    /// `Dirichlet(s)`, for shapes `s_i ≥ 1`.
    pub fn from_shapes(shapes: &[f64]) -> Result<Self> {
        if shapes.iter().any(|s| !(*s >= 1.0)) {
            return Err(domain(format!(
                "prior shapes below 1 are not representable, got {shapes:?}"
            )));
        }
        let exps: Vec<f64> = shapes.iter().map(|s| s - 1.0).collect();
        let alpha: f64 = exps.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        let chi = exps.iter().map(|e| e / alpha).collect();
        ConjugatePrior::new(chi, alpha)
    }

    /// Flat prior on the simplex.
    pub fn uniform(dim: usize) -> Self {
        ConjugatePrior {
            chi: vec![0.0; dim],
            alpha: 1.0,
        }
    }

    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Posterior natural parameters `(αχ + ΣS, α + N)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorParams {
    pub eta_stats: Vec<f64>,
    pub eta_count: f64,
}

impl PosteriorParams {
    /// Posterior with the given conventional shape parameters.
    pub fn from_shapes(shapes: &[f64]) -> Self {
        let eta_stats: Vec<f64> = shapes.iter().map(|s| s - 1.0).collect();
        let eta_count = eta_stats.iter().sum();
        PosteriorParams {
            eta_stats,
            eta_count,
        }
    }

    /// Fold more data into the posterior.
    pub fn absorb(&self, stats: &SuffStats) -> Result<Self> {
        if stats.stats.len() != self.eta_stats.len() {
            return Err(contract(format!(
                "statistic has dimension {}, posterior has {}",
                stats.stats.len(),
                self.eta_stats.len()
            )));
        }
        Ok(PosteriorParams {
            eta_stats: self
                .eta_stats
                .iter()
                .zip(&stats.stats)
                .map(|(e, s)| e + s)
                .collect(),
            eta_count: self.eta_count + stats.count as f64,
        })
    }

    /// Conventional shape parameters `η_stats + 1`; all must be positive.
    pub fn shapes(&self) -> Result<Vec<f64>> {
        let shapes: Vec<f64> = self.eta_stats.iter().map(|e| e + 1.0).collect();
        if shapes.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(domain(format!(
                "improper posterior, shape parameters {shapes:?}"
            )));
        }
        Ok(shapes)
    }

    /// All exponents divided by `temperature`.
    pub fn tempered(&self, temperature: f64) -> Self {
        PosteriorParams {
            eta_stats: self.eta_stats.iter().map(|e| e / temperature).collect(),
            eta_count: self.eta_count / temperature,
        }
    }
}

/// Per-record indicator sums.
pub fn aggregate_stats(model: &Model, data: &[u32]) -> Result<SuffStats> {
    let mut stats = vec![0.0; model.dim()];
    for (i, &x) in data.iter().enumerate() {
        let j = model
            .indicator(x)
            .ok_or_else(|| domain(format!("record {i} has invalid outcome {x}")))?;
        stats[j] += 1.0;
    }
    Ok(SuffStats::new(stats, data.len() as u64))
}

/// Conjugate update `η = (αχ + ΣS, α + N)`.
pub fn update_posterior(prior: &ConjugatePrior, stats: &SuffStats) -> Result<PosteriorParams> {
    if prior.chi.len() != stats.stats.len() {
        return Err(contract(format!(
            "prior has dimension {}, statistics have {}",
            prior.chi.len(),
            stats.stats.len()
        )));
    }
    Ok(PosteriorParams {
        eta_stats: prior
            .chi
            .iter()
            .zip(&stats.stats)
            .map(|(c, s)| prior.alpha * c + s)
            .collect(),
        eta_count: prior.alpha + stats.count as f64,
    })
}

fn check_dims(model: &Model, post: &PosteriorParams) -> Result<()> {
    if post.eta_stats.len() != model.dim() {
        return Err(contract(format!(
            "posterior has dimension {}, model has {}",
            post.eta_stats.len(),
            model.dim()
        )));
    }
    Ok(())
}

fn ln_multivariate_beta(shapes: &[f64]) -> f64 {
    shapes.iter().map(|&s| ln_gamma(s)).sum::<f64>() - ln_gamma(shapes.iter().sum())
}

fn ln_kernel(exponents: &[f64], x: &[f64]) -> f64 {
    exponents
        .iter()
        .zip(x)
        .map(|(&e, &xi)| if e == 0.0 { 0.0 } else { e * xi.ln() })
        .sum()
}

/// A posterior density with its normalizing constant computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDensity {
    exponents: Vec<f64>,
    trunc: f64,
    log_norm: f64,
    shift: f64,
}

impl PosteriorDensity {
    pub fn new(model: &Model, post: &PosteriorParams) -> Result<Self> {
        check_dims(model, post)?;
        let shapes = post.shapes()?;
        let exponents = post.eta_stats.clone();
        let trunc = model.trunc();
        if trunc == 0.0 {
            return Ok(PosteriorDensity {
                exponents,
                trunc,
                log_norm: ln_multivariate_beta(&shapes),
                shift: 0.0,
            });
        }
        let shift = log_max_on_simplex(&exponents, trunc);
        let mass = simplex_integrate(&exponents, trunc, shift, &|_| 1.0, NORMALIZER_TOL)?;
        if !(mass > 0.0) {
            return Err(Error::Quadrature(format!(
                "truncated normalizer vanished for shapes {shapes:?}"
            )));
        }
        Ok(PosteriorDensity {
            exponents,
            trunc,
            log_norm: shift + mass.ln(),
            shift,
        })
    }

    /// Log normalizing constant of `Π x_i^{η_i}` over the support.
    pub fn log_normalizer(&self) -> f64 {
        self.log_norm
    }

    /// Log density w.r.t. Lebesgue measure on the first `K − 1` coordinates
    /// (for the beta family, w.r.t. `dp`).
    pub fn log_pdf(&self, theta: &[f64]) -> f64 {
        ln_kernel(&self.exponents, theta) - self.log_norm
    }

    /// `E[g(x)]` by quadrature over the truncated simplex.
    fn expect<G: Fn(&[f64]) -> f64>(&self, g: G, tol: Tolerance) -> Result<f64> {
        let v = simplex_integrate(&self.exponents, self.trunc, self.shift, &g, tol)?;
        Ok(v * (self.shift - self.log_norm).exp())
    }
}

/// Log of the normalized (possibly truncated) posterior density at `theta`.
pub fn posterior_log_pdf(model: &Model, post: &PosteriorParams, theta: &[f64]) -> Result<f64> {
    model.check_point(theta)?;
    Ok(PosteriorDensity::new(model, post)?.log_pdf(theta))
}

/// Exact draw from the (possibly truncated) posterior.
///
/// For truncated categorical models with more than two outcomes the draw
/// uses sequential truncated-beta stick-breaking.
pub fn sample_posterior<R: Rng + ?Sized>(
    model: &Model,
    post: &PosteriorParams,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_dims(model, post)?;
    let shapes = post.shapes()?;
    let a0 = model.trunc();
    match (model, a0 > 0.0) {
        (_, false) => dirichlet_draw(&shapes, rng),
        (Model::BetaBernoulli(_), true) => {
            let p = truncated_beta_draw(shapes[0], shapes[1], a0, 1.0 - a0, rng)?;
            Ok(BetaBernoulliModel::point(p).to_vec())
        }
        (Model::Categorical(_), true) => truncated_dirichlet_draw(&shapes, a0, rng),
    }
}

/// Posterior mean: closed form when untruncated, quadrature otherwise.
pub fn posterior_mean(model: &Model, post: &PosteriorParams) -> Result<Vec<f64>> {
    check_dims(model, post)?;
    let shapes = post.shapes()?;
    if !model.is_truncated() {
        let total: f64 = shapes.iter().sum();
        return Ok(shapes.iter().map(|s| s / total).collect());
    }
    let density = PosteriorDensity::new(model, post)?;
    let k = shapes.len();
    let mut mean = Vec::with_capacity(k);
    for i in 0..k - 1 {
        mean.push(density.expect(|x| x[i], MEAN_TOL)?);
    }
    mean.push(1.0 - mean.iter().sum::<f64>());
    Ok(mean)
}

/// `KL(a ‖ b)`: closed Dirichlet form when untruncated, quadrature otherwise.
pub fn kl_divergence(model: &Model, a: &PosteriorParams, b: &PosteriorParams) -> Result<f64> {
    check_dims(model, a)?;
    if a.eta_stats.len() != b.eta_stats.len() {
        return Err(contract("posteriors live on different supports"));
    }
    let sa = a.shapes()?;
    let sb = b.shapes()?;
    if !model.is_truncated() {
        let a0: f64 = sa.iter().sum();
        let psi0 = digamma(a0);
        let cross: f64 = sa
            .iter()
            .zip(&sb)
            .map(|(x, y)| (x - y) * (digamma(*x) - psi0))
            .sum();
        let kl = -ln_multivariate_beta(&sa) + ln_multivariate_beta(&sb) + cross;
        return Ok(kl.max(0.0));
    }
    let da = PosteriorDensity::new(model, a)?;
    let db = PosteriorDensity::new(model, b)?;
    let diff: Vec<f64> = a
        .eta_stats
        .iter()
        .zip(&b.eta_stats)
        .map(|(x, y)| x - y)
        .collect();
    let cross = da.expect(|x| ln_kernel(&diff, x), KL_TOL)?;
    Ok((cross - da.log_norm + db.log_norm).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn beta(a0: f64) -> Model {
        BetaBernoulliModel::new(a0).unwrap().into()
    }

    fn cat(k: usize, a0: f64) -> Model {
        CategoricalDirichletModel::new(k, a0).unwrap().into()
    }

    #[test]
    fn aggregate_examples() {
        let s = aggregate_stats(&beta(0.0), &[1, 1, 0, 1]).unwrap();
        assert_eq!((s.stats, s.count), (vec![3.0, 1.0], 4));
        let s = aggregate_stats(&cat(3, 0.0), &[]).unwrap();
        assert_eq!((s.stats, s.count), (vec![0.0; 3], 0));
        let s = aggregate_stats(&cat(3, 0.0), &[2, 2, 3]).unwrap();
        assert_eq!((s.stats.clone(), s.count), (vec![0.0, 2.0, 1.0], 3));
        s.check(&cat(3, 0.0)).unwrap();
    }

    #[test]
    fn aggregate_rejects_bad_record() {
        let err = aggregate_stats(&beta(0.0), &[1, 0, 2]).unwrap_err();
        assert!(err.to_string().contains("record 2"), "{err}");
        assert!(aggregate_stats(&cat(3, 0.0), &[0]).is_err());
        assert!(aggregate_stats(&cat(3, 0.0), &[4]).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(BetaBernoulliModel::new(0.5).is_err());
        assert!(BetaBernoulliModel::new(-0.1).is_err());
        assert!(CategoricalDirichletModel::new(1, 0.0).is_err());
        assert!(CategoricalDirichletModel::new(4, 0.25).is_err());
        assert!(ConjugatePrior::new(vec![0.5, 0.5], 0.0).is_err());
    }

    #[test]
    fn update_examples() {
        let prior = ConjugatePrior::new(vec![0.5, 0.5], 2.0).unwrap();
        let post = update_posterior(&prior, &SuffStats::new(vec![3.0, 1.0], 4)).unwrap();
        assert_eq!(post.eta_stats, vec![4.0, 2.0]);
        assert_eq!(post.eta_count, 6.0);
        let empty = update_posterior(&prior, &SuffStats::new(vec![0.0, 0.0], 0)).unwrap();
        assert_eq!(empty.eta_stats, vec![1.0, 1.0]);
        assert_eq!(empty.eta_count, 2.0);

        let prior = ConjugatePrior::new(vec![1.0 / 3.0; 3], 3.0).unwrap();
        let post = update_posterior(&prior, &SuffStats::new(vec![0.0, 2.0, 1.0], 3)).unwrap();
        for (x, y) in post.eta_stats.iter().zip([1.0, 3.0, 2.0]) {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(post.eta_count, 6.0);

        assert!(update_posterior(&prior, &SuffStats::new(vec![1.0, 0.0], 1)).is_err());
    }

    #[test]
    fn log_pdf_examples() {
        // Beta(2, 2) density is 6p(1 − p)
        let post = PosteriorParams::from_shapes(&[2.0, 2.0]);
        let v = posterior_log_pdf(&beta(0.0), &post, &[0.5, 0.5]).unwrap();
        assert!((v - 1.5f64.ln()).abs() < 1e-12);

        let flat = PosteriorParams::from_shapes(&[1.0, 1.0]);
        for p in [0.1, 0.37, 0.9] {
            assert!(
                posterior_log_pdf(&beta(0.0), &flat, &BetaBernoulliModel::point(p))
                    .unwrap()
                    .abs()
                    < 1e-12
            );
        }

        let v = posterior_log_pdf(&beta(0.2), &flat, &[0.5, 0.5]).unwrap();
        assert!((v - (1.0f64 / 0.6).ln()).abs() < 1e-10);
        assert!(posterior_log_pdf(&beta(0.2), &flat, &[0.1, 0.9]).is_err());
    }

    #[test]
    fn improper_posterior_rejected() {
        let post = PosteriorParams {
            eta_stats: vec![-1.0, 2.0],
            eta_count: 1.0,
        };
        let mut rng = stream_rng(0, 0);
        assert!(sample_posterior(&beta(0.0), &post, &mut rng).is_err());
        assert!(posterior_mean(&beta(0.0), &post).is_err());
    }

    #[test]
    fn sampling_means() {
        let mut rng = stream_rng(5, 0);
        let n = 100_000;
        let flat = PosteriorParams::from_shapes(&[1.0, 1.0]);
        let m: f64 = (0..n)
            .map(|_| sample_posterior(&beta(0.2), &flat, &mut rng).unwrap()[0])
            .sum::<f64>()
            / n as f64;
        assert!((m - 0.5).abs() < 0.005, "{m}");

        let b32 = PosteriorParams::from_shapes(&[3.0, 2.0]);
        let m: f64 = (0..n)
            .map(|_| sample_posterior(&beta(0.0), &b32, &mut rng).unwrap()[0])
            .sum::<f64>()
            / n as f64;
        assert!((m - 0.6).abs() < 0.01, "{m}");

        let d111 = PosteriorParams::from_shapes(&[1.0, 1.0, 1.0]);
        let mut acc = [0.0; 3];
        for _ in 0..n {
            let x = sample_posterior(&cat(3, 0.0), &d111, &mut rng).unwrap();
            for (a, v) in acc.iter_mut().zip(x) {
                *a += v;
            }
        }
        for a in acc {
            assert!((a / n as f64 - 1.0 / 3.0).abs() < 0.01);
        }
    }

    #[test]
    fn mean_examples() {
        let m = posterior_mean(&beta(0.0), &PosteriorParams::from_shapes(&[4.0, 2.0])).unwrap();
        assert!((m[0] - 2.0 / 3.0).abs() < 1e-15);
        let m = posterior_mean(&beta(0.2), &PosteriorParams::from_shapes(&[2.0, 2.0])).unwrap();
        assert!((m[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kl_identity_and_dimension_check() {
        let a = PosteriorParams::from_shapes(&[2.5, 7.0]);
        assert!(kl_divergence(&beta(0.0), &a, &a).unwrap().abs() < 1e-12);
        assert!(kl_divergence(&beta(0.1), &a, &a).unwrap().abs() < 1e-10);
        let c = PosteriorParams::from_shapes(&[1.0, 1.0, 1.0]);
        assert!(kl_divergence(&beta(0.0), &a, &c).is_err());
    }

    #[test]
    fn truncated_categorical_density_normalizes_on_grid() {
        // K = 3 truncated Dirichlet: Riemann sum of the density on a fine
        // grid over the truncated triangle
        let model = cat(3, 0.1);
        let post = PosteriorParams::from_shapes(&[2.0, 3.0, 1.5]);
        let d = PosteriorDensity::new(&model, &post).unwrap();
        let h = 1e-3;
        let mut total = 0.0;
        let mut x1 = 0.1 + h / 2.0;
        while x1 < 0.8 {
            let mut x2 = 0.1 + h / 2.0;
            while x1 + x2 < 0.9 {
                total += d.log_pdf(&[x1, x2, 1.0 - x1 - x2]).exp() * h * h;
                x2 += h;
            }
            x1 += h;
        }
        assert!((total - 1.0).abs() < 5e-3, "{total}");
    }
}
