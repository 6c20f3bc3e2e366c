//! Property tests of the conjugate families.

use privbayes::expfam::{
    aggregate_stats, kl_divergence, posterior_log_pdf, update_posterior, PosteriorDensity,
};
use privbayes::quadrature::{beta_breaks, integrate, simplex_integrate, Tolerance};
use privbayes::{
    BetaBernoulliModel, CategoricalDirichletModel, ConjugatePrior, Model, PosteriorParams,
    SuffStats,
};
use proptest::prelude::*;

fn beta_model(a0: f64) -> Model {
    BetaBernoulliModel::new(a0).unwrap().into()
}

fn beta_integral(f: impl Fn(f64) -> f64, shapes: [f64; 2], a0: f64) -> f64 {
    let (lo, hi) = (a0.max(0.0), 1.0 - a0.max(0.0));
    integrate(
        f,
        lo,
        hi,
        &beta_breaks(shapes[0], shapes[1], lo, hi),
        Tolerance::rel(1e-11),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn batch_update_equals_sequential_folding(
        data in prop::collection::vec(1u32..=4, 0..40),
        chi in prop::collection::vec(0.0f64..1.0, 4),
        alpha in 0.1f64..10.0,
    ) {
        let model: Model = CategoricalDirichletModel::new(4, 0.0).unwrap().into();
        let prior = ConjugatePrior::new(chi, alpha).unwrap();
        let batch = update_posterior(&prior, &aggregate_stats(&model, &data).unwrap()).unwrap();
        let mut folded = update_posterior(&prior, &SuffStats::empty(&model)).unwrap();
        for x in &data {
            folded = folded.absorb(&aggregate_stats(&model, &[*x]).unwrap()).unwrap();
        }
        prop_assert!((batch.eta_count - folded.eta_count).abs() < 1e-12);
        for (a, b) in batch.eta_stats.iter().zip(&folded.eta_stats) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_folding_is_associative(data in prop::collection::vec(0u32..=1, 0..60)) {
        let model = beta_model(0.1);
        let prior = ConjugatePrior::from_shapes(&[2.0, 3.0]).unwrap();
        let (left, right) = data.split_at(data.len() / 2);
        let whole = update_posterior(&prior, &aggregate_stats(&model, &data).unwrap()).unwrap();
        let split = update_posterior(&prior, &aggregate_stats(&model, left).unwrap())
            .unwrap()
            .absorb(&aggregate_stats(&model, right).unwrap())
            .unwrap();
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn kl_is_nonnegative(
        a in (0.3f64..40.0, 0.3f64..40.0),
        b in (0.3f64..40.0, 0.3f64..40.0),
    ) {
        let model = beta_model(0.0);
        let pa = PosteriorParams::from_shapes(&[a.0, a.1]);
        let pb = PosteriorParams::from_shapes(&[b.0, b.1]);
        prop_assert!(kl_divergence(&model, &pa, &pb).unwrap() >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn beta_density_integrates_to_one(
        s0 in 0.5f64..60.0,
        s1 in 0.5f64..60.0,
        truncated in any::<bool>(),
        a0 in 0.01f64..0.45,
    ) {
        let a0 = if truncated { a0 } else { 0.0 };
        let model = beta_model(a0);
        let post = PosteriorParams::from_shapes(&[s0, s1]);
        let d = PosteriorDensity::new(&model, &post).unwrap();
        let f = |p: f64| if p > 0.0 && p < 1.0 { d.log_pdf(&[p, 1.0 - p]).exp() } else { 0.0 };
        let total = beta_integral(f, [s0, s1], a0);
        prop_assert!((total - 1.0).abs() < 1e-6, "integral {}", total);
    }

    #[test]
    fn categorical_density_integrates_to_one(
        shapes in prop::collection::vec(1.0f64..12.0, 3),
        a0 in 0.0f64..0.3,
    ) {
        let model: Model = CategoricalDirichletModel::new(3, a0).unwrap().into();
        let post = PosteriorParams::from_shapes(&shapes);
        let d = PosteriorDensity::new(&model, &post).unwrap();
        let g = |x: &[f64]| d.log_pdf(x).exp();
        let total = simplex_integrate(&[0.0; 3], a0, 0.0, &g, Tolerance::rel(1e-9)).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-6, "integral {}", total);
    }

    #[test]
    fn kl_closed_form_matches_quadrature(
        a in (0.8f64..30.0, 0.8f64..30.0),
        b in (0.8f64..30.0, 0.8f64..30.0),
    ) {
        let model = beta_model(0.0);
        let pa = PosteriorParams::from_shapes(&[a.0, a.1]);
        let pb = PosteriorParams::from_shapes(&[b.0, b.1]);
        let closed = kl_divergence(&model, &pa, &pb).unwrap();
        let f = |p: f64| {
            let la = posterior_log_pdf(&model, &pa, &[p, 1.0 - p]).unwrap();
            let lb = posterior_log_pdf(&model, &pb, &[p, 1.0 - p]).unwrap();
            la.exp() * (la - lb)
        };
        let quad = beta_integral(f, [a.0, a.1], 0.0);
        prop_assert!((closed - quad).abs() < 1e-6 * closed.max(1.0), "closed {} quadrature {}", closed, quad);
    }
}

#[test]
fn kl_beta_2_2_vs_3_2() {
    let model = beta_model(0.0);
    let a = PosteriorParams::from_shapes(&[2.0, 2.0]);
    let b = PosteriorParams::from_shapes(&[3.0, 2.0]);
    // ∫ 6p(1−p) log(6p(1−p) / 12p²(1−p)) dp = −log 2 − E[log p], E[log p] = ψ(2) − ψ(4) = −5/6
    let expect = -(2f64.ln()) + 5.0 / 6.0;
    assert!((kl_divergence(&model, &a, &b).unwrap() - expect).abs() < 1e-9);
}
