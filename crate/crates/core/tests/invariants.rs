//! Cross-module invariants over randomized parameters.

use antiassoc::anti::{anti_closed_monic, extend, shift_identity_check};
use antiassoc::families::{chebyshev_u_constant, grosjean1_coeffs};
use antiassoc::measure::{
    find_mass_points, gram_matrix, identity_deviation, truncation_outliers, Base, MeasureModel,
};
use antiassoc::quadrature::PanelRule;
use antiassoc::recurrence::{eval_monic, shift};
use antiassoc::spectral::{gauss_rule, truncate, zeros};
use antiassoc::{Error, Execution, ExtensionParams, Real};
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = ExtensionParams> {
    (1usize..=3)
        .prop_flat_map(|r| {
            (
                proptest::collection::vec(-1.0f64..1.0, r),
                proptest::collection::vec(0.2f64..2.0, r),
            )
        })
        .prop_map(|(b, a2)| ExtensionParams::from_f64(&b, &a2).unwrap())
}

fn base_strategy() -> impl Strategy<Value = Base> {
    prop_oneof![
        Just(Base::ChebyshevU),
        (-0.9f64..-0.1).prop_map(|a| Base::grosjean1(a).unwrap())
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shifting_undoes_extension(base in base_strategy(), p in params_strategy(), x in -1.5f64..1.5) {
        let seq = base.sequence().unwrap();
        let back = shift(&extend(&seq, &p), p.r());
        for n in 0..40 {
            prop_assert_eq!(back.b(n), seq.b(n));
            prop_assert_eq!(back.a2(n), seq.a2(n));
        }
        for k in 0..=p.r() {
            prop_assert!(shift_identity_check(&seq, &p, k, 30, x).unwrap());
        }
    }

    #[test]
    fn closed_form_matches_monic_recurrence(base in base_strategy(), p in params_strategy(), x in -1.0f64..1.0) {
        let seq = base.sequence().unwrap();
        let closed = anti_closed_monic(&seq, &p, 60, x).unwrap();
        let direct = eval_monic(&extend(&seq, &p), 60 + p.r(), x).unwrap();
        for (c, d) in closed.values.iter().zip(&direct.values) {
            prop_assert!((c - d).abs() <= 1e-10 * d.abs().max(1.0));
        }
    }

    #[test]
    fn at_most_r_mass_points_per_side(base in base_strategy(), p in params_strategy()) {
        let outliers = truncation_outliers(&base, &p, 400).unwrap();
        let left = outliers.iter().filter(|&&x| x < -1.0).count();
        let right = outliers.iter().filter(|&&x| x > 1.0).count();
        prop_assert!(left <= p.r() && right <= p.r());
    }

    #[test]
    fn zeros_interlace(base in base_strategy(), p in params_strategy(), n in 2usize..60) {
        let seq = extend(&base.sequence().unwrap(), &p);
        let a = zeros(&seq, n, 1e-13).unwrap();
        let b = zeros(&seq, n + 1, 1e-13).unwrap();
        for k in 0..n {
            prop_assert!(b[k] <= a[k] && a[k] <= b[k + 1]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn model_is_a_probability_measure(base in base_strategy(), p in params_strategy()) {
        let built = MeasureModel::build(base.clone(), p.clone());
        // roots within about 1e-9 of +-1 need a truncation beyond the cap and are reported
        prop_assume!(!matches!(built, Err(Error::UnresolvedMassPoint { .. })));
        let model = built.unwrap();
        let located = find_mass_points(&base, &p, 1e3).unwrap();
        prop_assert_eq!(located.len(), model.masses().len());
        prop_assert!(model.masses().iter().all(|m| m.mass > 0.0 && m.x.abs() > 1.0));
        prop_assert!(model.min_density(400) > 0.0);
        let total = model.total_mass(&PanelRule::default(), Execution::default()).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-6, "total {}", total);
        let dev = identity_deviation(&gram_matrix(&model, 6).unwrap());
        prop_assert!(dev < 1e-6, "gram deviation {}", dev);
    }
}

#[test]
fn gauss_rule_matches_truncation() {
    let seq = extend(
        &grosjean1_coeffs(Real::approx(-0.4)).unwrap(),
        &ExtensionParams::from_f64(&[0.3], &[0.8]).unwrap(),
    );
    let rule = gauss_rule(&seq, 40).unwrap();
    let eig = truncate(&seq, 40).unwrap().eigenvalues(1e-14).unwrap();
    for (a, b) in rule.nodes.iter().zip(&eig) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!((rule.total_weight() - 1.0).abs() < 1e-12);
}

#[test]
fn gauss_weights_at_outliers_converge_to_masses() {
    // the forward recurrence alone loses these weights for large N
    let p = ExtensionParams::from_f64(&[0.3], &[0.8]).unwrap();
    let base = Base::grosjean1(-0.1).unwrap();
    let seq = extend(&base.sequence().unwrap(), &p);
    let model = MeasureModel::build(base, p).unwrap();
    for n in [40, 80, 400] {
        let rule = gauss_rule(&seq, n).unwrap();
        assert!(
            (rule.total_weight() - 1.0).abs() < 1e-12,
            "n={n}: {}",
            rule.total_weight()
        );
        let left = model.masses().iter().find(|m| m.x < -1.0).unwrap();
        assert!((rule.nodes[0] - left.x).abs() < 1e-12);
        assert!((rule.weights[0] - left.mass).abs() < 1e-10);
    }
}

#[test]
fn far_outliers_keep_their_weights_in_long_rules() {
    // p_N overflows at x = -1.78 for N = 1000; the masses are checked
    // independently through the Gram identity of the reconstructed measure
    let p = ExtensionParams::from_f64(
        &[
            0.21980869345866738,
            -0.4562482444635534,
            0.26412451657974545,
        ],
        &[1.137185448003925, 0.8747453393025773, 1.9016683438831437],
    )
    .unwrap();
    let base = Base::grosjean1(-0.7918976596133955).unwrap();
    let seq = extend(&base.sequence().unwrap(), &p);
    let model = MeasureModel::build(base, p).unwrap();
    assert_eq!(model.masses().len(), 4);
    let dev = identity_deviation(&gram_matrix(&model, 8).unwrap());
    assert!(dev < 1e-8, "gram deviation {dev}");
    for n in [1000, 2000] {
        let rule = gauss_rule(&seq, n).unwrap();
        assert!((rule.total_weight() - 1.0).abs() < 1e-12, "n={n}");
        for m in model.masses() {
            let k = rule
                .nodes
                .iter()
                .position(|x| (x - m.x).abs() < 1e-9)
                .unwrap();
            assert!(
                (rule.weights[k] - m.mass).abs() < 1e-10 * m.mass.max(1e-3),
                "n={n} x={}",
                m.x
            );
        }
    }
}

#[test]
fn execution_modes_agree() {
    let seq = extend(
        &chebyshev_u_constant(),
        &ExtensionParams::from_f64(&[0.2, -0.5], &[1.3, 0.6]).unwrap(),
    );
    let t = truncate(&seq, 300).unwrap();
    let a = t.eigenvalues_with(1e-13, Execution::Sequential).unwrap();
    let b = t.eigenvalues_with(1e-13, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}
