//! Property-based invariants over randomly generated distributions.

use entrocheck::convolve::{convolve_finite, difference_finite};
use entrocheck::density::FinitePmf;
use entrocheck::entropy::finite_entropy;
use entrocheck::group::GroupSpec;
use entrocheck::ruzsa::ruzsa_divergence_finite;
use entrocheck::search::{project_concave, softmax};
use proptest::prelude::*;

fn arb_pmf(max_m: usize) -> impl Strategy<Value = FinitePmf> {
    (2..=max_m).prop_flat_map(|m| {
        proptest::collection::vec(0.01..1.0f64, m).prop_map(move |w| {
            let total: f64 = w.iter().sum();
            let probs = w.into_iter().map(|x| x / total).collect();
            FinitePmf::new(GroupSpec::cyclic(m as u64), probs).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// 0 <= H(X) <= log m, and convolution cannot decrease entropy.
    #[test]
    fn entropy_bounds_and_convolution_monotonicity(
        p in arb_pmf(24),
        q in arb_pmf(24),
    ) {
        let h = finite_entropy(&p);
        let m = p.group.order().unwrap() as f64;
        prop_assert!(h >= -1e-12 && h <= m.ln() + 1e-12);
        if p.group == q.group {
            let s = convolve_finite(&p, &q).unwrap();
            prop_assert!((s.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(finite_entropy(&s) >= h - 1e-9);
            prop_assert!(finite_entropy(&s) >= finite_entropy(&q) - 1e-9);
        }
    }

    /// The divergence is nonnegative and vanishes against itself only
    /// through the information identity, never below zero.
    #[test]
    fn divergence_nonnegative(p in arb_pmf(24), q in arb_pmf(24)) {
        if p.group == q.group {
            let d = ruzsa_divergence_finite(&p, &q).unwrap();
            prop_assert!(d >= -1e-12);
            let diff = difference_finite(&p, &q).unwrap();
            let identity = finite_entropy(&diff) - finite_entropy(&p);
            prop_assert!((d - identity).abs() < 1e-12);
        }
    }

    /// Softmax outputs land on the simplex; concave projection is idempotent
    /// and feasible for arbitrary real input.
    #[test]
    fn projections_are_sound(x in proptest::collection::vec(-10.0..10.0f64, 3..40)) {
        let s = softmax(&x);
        prop_assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let p = project_concave(&x);
        for w in p.windows(3) {
            prop_assert!(w[2] - 2.0 * w[1] + w[0] <= 1e-9);
        }
        let pp = project_concave(&p);
        for (a, b) in p.iter().zip(&pp) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
