use proptest::prelude::*;

use super::*;

#[test]
fn pnr_boundaries_are_exact() {
    let spec = default_spec(RewardVariant::Pnr);
    assert!((evaluate(&spec, 0.0, 0) - 100.0).abs() < 1e-12);
    assert!((evaluate(&spec, spec.d, 0) - 0.0).abs() < 1e-12);
    assert!((evaluate(&spec, 1.0, 0) - -0.1).abs() < 1e-12);
}

#[test]
fn pnr_proximity_midpoint() {
    // e=2, f=10 at D = d/2: span/denom = 1/6, (1/6 - 1/10) * 2*10*99/8 + 1 = 17.5
    let spec = default_spec(RewardVariant::Pnr);
    assert!((evaluate(&spec, 0.0005, 0) - 17.5).abs() < 1e-9);
}

#[test]
fn pnr1_reverses_the_slope_asymmetry() {
    // Swapped slopes: midpoint lands at 83.5, mirroring PNR's 17.5 around the
    // linear value 50.5.
    let spec = default_spec(RewardVariant::Pnr1);
    assert!((evaluate(&spec, 0.0, 0) - 100.0).abs() < 1e-12);
    assert!((evaluate(&spec, 1.0, 0) - -0.1).abs() < 1e-12);
    assert!((evaluate(&spec, 0.0005, 0) - 83.5).abs() < 1e-9);
    let linear = evaluate(&default_spec(RewardVariant::Plr), 0.0005, 0);
    assert!((linear - 50.5).abs() < 1e-12);
    let pnr = evaluate(&default_spec(RewardVariant::Pnr), 0.0005, 0);
    assert!(pnr < linear && linear < evaluate(&spec, 0.0005, 0));
}

#[test]
fn slope_asymmetry_via_finite_differences() {
    // With f > e the proximity branch is steeper near D = 0 than near D = d.
    let spec = default_spec(RewardVariant::Pnr);
    let h = 1e-7;
    let slope_at_zero = (evaluate(&spec, h, 0) - evaluate(&spec, 0.0, 0)) / h;
    let slope_at_d = (evaluate(&spec, spec.d - h, 0) - evaluate(&spec, spec.d - 2.0 * h, 0)) / h;
    assert!(slope_at_zero < 0.0 && slope_at_d < 0.0);
    assert!(slope_at_zero.abs() > slope_at_d.abs());
    // And the reversed variant flips that.
    let rev = default_spec(RewardVariant::Pnr1);
    let rev_zero = (evaluate(&rev, h, 0) - evaluate(&rev, 0.0, 0)) / h;
    let rev_d = (evaluate(&rev, rev.d - h, 0) - evaluate(&rev, rev.d - 2.0 * h, 0)) / h;
    assert!(rev_zero.abs() < rev_d.abs());
}

#[test]
fn boundary_at_d_belongs_to_the_exploration_zone() {
    // Exactly D = d must give the exploration top (0), not the proximity
    // bottom (1).
    for variant in [RewardVariant::Pnr, RewardVariant::Pnr1, RewardVariant::Plr] {
        let spec = default_spec(variant);
        assert_eq!(evaluate(&spec, spec.d, 0), 0.0, "{}", variant.name());
    }
    let psr = default_spec(RewardVariant::Psr);
    assert_eq!(evaluate(&psr, psr.d, 0), 0.0);
}

#[test]
fn sparse_reward_is_an_indicator() {
    let spec = default_spec(RewardVariant::Psr);
    assert_eq!(evaluate(&spec, 0.0, 0), 1.0);
    assert_eq!(evaluate(&spec, 0.0009, 500), 1.0);
    assert_eq!(evaluate(&spec, 0.5, 500), 0.0);
    assert_eq!(evaluate(&spec, 1.0, 0), 0.0);
}

#[test]
fn step_penalty_is_linear_and_only_on_dense_partitioned_variants() {
    let spec = default_spec(RewardVariant::Pnr);
    let base = evaluate(&spec, 0.5, 0);
    assert!((evaluate(&spec, 0.5, 1000) - (base - 1e-3)).abs() < 1e-15);
    assert!((evaluate(&spec, 0.5, 1) - (base - 1e-6)).abs() < 1e-18);
    for variant in [
        RewardVariant::Psr,
        RewardVariant::Npnr,
        RewardVariant::Nplnr,
        RewardVariant::Nplpr,
        RewardVariant::Fpr,
    ] {
        let s = default_spec(variant);
        assert_eq!(evaluate(&s, 0.5, 0), evaluate(&s, 0.5, 100_000), "{}", variant.name());
    }
}

#[test]
fn fidelity_reward_values() {
    let spec = default_spec(RewardVariant::Fpr);
    // F = 1: 1 + 4 = 5 exactly.
    assert_eq!(evaluate(&spec, 0.0, 0), 5.0);
    assert_eq!(evaluate(&spec, 1.0, 0), 0.0);
    let expected = 0.5f64.powi(4) + 4.0 * 0.5f64.powi(25);
    assert!((evaluate(&spec, 0.5, 0) - expected).abs() < 1e-15);
}

#[test]
fn non_partitioned_variants_span_their_stated_ranges() {
    let npnr = default_spec(RewardVariant::Npnr);
    assert!((evaluate(&npnr, 0.0, 0) - 0.0).abs() < 1e-12);
    assert!((evaluate(&npnr, 1.0, 0) - -1.0).abs() < 1e-12);
    let nplnr = default_spec(RewardVariant::Nplnr);
    assert!((evaluate(&nplnr, 0.0, 0) - 0.0).abs() < 1e-12);
    assert!((evaluate(&nplnr, 1.0, 0) - -1.0).abs() < 1e-12);
    assert!((evaluate(&nplnr, 0.25, 0) - -0.25).abs() < 1e-12);
    let nplpr = default_spec(RewardVariant::Nplpr);
    assert!((evaluate(&nplpr, 0.0, 0) - 100.0).abs() < 1e-12);
    assert!((evaluate(&nplpr, 1.0, 0) - 0.0).abs() < 1e-12);
    assert!((evaluate(&nplpr, 0.25, 0) - 75.0).abs() < 1e-12);
}

#[test]
fn all_eight_defaults_exist_and_validate() {
    let specs = default_specs();
    assert_eq!(specs.len(), 8);
    for (variant, spec) in &specs {
        spec.validate().unwrap();
        assert_eq!(spec.variant, *variant);
        assert_eq!(RewardVariant::from_name(variant.name()).unwrap(), *variant);
    }
    assert!(RewardVariant::from_name("pnr").is_ok()); // case-insensitive
    assert!(RewardVariant::from_name("XYZ").is_err());
}

#[test]
fn validation_catches_degenerate_slopes() {
    let mut spec = default_spec(RewardVariant::Pnr);
    spec.slope_e = 10.0; // == slope_f
    assert!(spec.validate().is_err());
    let mut spec = default_spec(RewardVariant::Pnr);
    spec.d = 0.0;
    assert!(spec.validate().is_err());
    // Linear variants don't care about slopes.
    let mut spec = default_spec(RewardVariant::Plr);
    spec.slope_e = spec.slope_f;
    assert!(spec.validate().is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn prop_dense_rewards_decrease_with_distance(
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        prop_assume!((a - b).abs() > 1e-12);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        for variant in [
            RewardVariant::Pnr,
            RewardVariant::Pnr1,
            RewardVariant::Plr,
            RewardVariant::Npnr,
            RewardVariant::Nplnr,
            RewardVariant::Nplpr,
            RewardVariant::Fpr,
        ] {
            let spec = default_spec(variant);
            prop_assert!(
                evaluate(&spec, lo, 0) > evaluate(&spec, hi, 0),
                "{} not decreasing between {lo} and {hi}",
                variant.name()
            );
        }
    }

    #[test]
    fn prop_partitioned_rewards_respect_zone_bounds(d_dist in 0.0f64..1.0) {
        for variant in [RewardVariant::Pnr, RewardVariant::Pnr1] {
            let spec = default_spec(variant);
            let r = evaluate(&spec, d_dist, 0);
            if d_dist < spec.d {
                prop_assert!((1.0..=100.0).contains(&r));
            } else {
                prop_assert!((-0.1..=0.0).contains(&r));
            }
        }
    }
}
