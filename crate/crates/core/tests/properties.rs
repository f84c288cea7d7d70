use proptest::prelude::*;
use zsdv_core::equilibrium::{best_response, payoff_at, verify_regime};
use zsdv_core::{
    check_symmetry, find_symmetric_fixed_point, lemma2_chain, lemma3_chain, maximize, minimize, payoff_sum, resolve,
    roundtrip_error, ClosureGame, Context, EquilibriumOptions, Interval, MixedPoint, OligopolyGame, OligopolyParams,
    ScaledPayoffs, TwoVariableGame, VarTag, VariableAssignment,
};

fn market() -> impl Strategy<Value = OligopolyGame<f64>> {
    (5.0..20.0f64, 0.05..0.95f64, 0.0..0.4f64).prop_map(|(a, b, frac)| {
        OligopolyGame::new(OligopolyParams::symmetric(a, b, a * frac).unwrap()).unwrap()
    })
}

fn profile_in(game: &OligopolyGame<f64>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..game.params().a, 3)
}

/// Four-firm version of the relative-profit market, for contexts with two
/// fixed players.
fn four_firms(a: f64, b: f64, c: f64) -> ClosureGame<f64> {
    let n = 4;
    let prices = move |x: &[f64]| -> Vec<f64> {
        let total: f64 = x.iter().sum();
        x.iter().map(|xi| a - xi - b * (total - xi)).collect()
    };
    let outputs = move |p: &[f64]| -> Vec<f64> {
        let slack: Vec<f64> = p.iter().map(|pi| a - pi).collect();
        let shared = b / (1.0 + 3.0 * b) * slack.iter().sum::<f64>();
        slack.iter().map(|s| (s - shared) / (1.0 - b)).collect()
    };
    let t_space = Interval::new(0.0, a).unwrap();
    let s_space = Interval::new(-3.0 * a * b, a).unwrap();
    ClosureGame::new(n, t_space, move |who, x: &[f64]| {
        let p = prices(x);
        let profit: Vec<f64> = (0..n).map(|k| (p[k] - c) * x[k]).collect();
        let rivals: f64 = profit.iter().sum::<f64>() - profit[who];
        profit[who] - rivals / (n - 1) as f64
    })
    .unwrap()
    .with_transforms(s_space, prices, outputs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn payoffs_sum_to_zero_and_are_symmetric((g, x) in market().prop_flat_map(|g| { let p = profile_in(&g); (Just(g), p) })) {
        prop_assert!(payoff_sum(&g, &x).unwrap().abs() <= 1e-12 * (1.0 + g.params().a.powi(2)));
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            prop_assert!(check_symmetry(&g, &x, i, j, k).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn transforms_roundtrip((g, x) in market().prop_flat_map(|g| { let p = profile_in(&g); (Just(g), p) })) {
        prop_assert!(roundtrip_error(&g, &x).unwrap() <= 1e-9);
    }

    #[test]
    fn resolve_recovers_the_profile_in_every_regime(
        (g, x) in market().prop_flat_map(|g| { let p = profile_in(&g); (Just(g), p) })
    ) {
        for assignment in VariableAssignment::exhaustive(3) {
            let point = MixedPoint::from_profile(&g, assignment.clone(), &x).unwrap();
            let solved = resolve(&g, &point, 1e-12, 500).unwrap();
            for (got, want) in solved.profile.iter().zip(&x) {
                prop_assert!((got - want).abs() <= 1e-8, "{assignment}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn maximize_mirrors_minimize(peak in -3.0..3.0f64, curv in 0.1..5.0f64, shift in -10.0..10.0f64) {
        let dom = Interval::new(-4.0, 4.0).unwrap();
        let f = |x: f64| shift - curv * (x - peak).powi(2);
        let up = maximize(f, dom, 1e-9).unwrap();
        let down = minimize(|x| -f(x), dom, 1e-9).unwrap();
        prop_assert!((up.value + down.value).abs() <= 1e-12);
        prop_assert!((up.arg - down.arg).abs() <= 1e-9);
        prop_assert!((up.arg - peak).abs() <= 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn positive_payoff_scaling_changes_nothing(g in market(), factor in 0.01..100.0f64) {
        let opts = EquilibriumOptions::with_tol(1e-6);
        let scaled = ScaledPayoffs { game: g.clone(), factor };
        let base = find_symmetric_fixed_point(&g, &opts).unwrap();
        let other = find_symmetric_fixed_point(&scaled, &opts).unwrap();
        prop_assert!((base.t_star - other.t_star).abs() <= 1e-6);
        prop_assert!((base.s_star - other.s_star).abs() <= 1e-6);
        let tts = VariableAssignment::parse("TTS").unwrap();
        let v0 = verify_regime(&g, &tts, &base, 1e-6).unwrap();
        let v1 = verify_regime(&scaled, &tts, &other, 1e-6).unwrap();
        prop_assert_eq!(v0.equivalent, v1.equivalent);
    }

    #[test]
    fn own_argmax_is_rival_argmin(g in market()) {
        let tol = 1e-8;
        let eq = find_symmetric_fixed_point(&g, &EquilibriumOptions::with_tol(1e-8)).unwrap();
        let point = MixedPoint::symmetric(VariableAssignment::all_t(3), eq.t_star, eq.s_star);
        let own = best_response(&g, &point, 0, tol).unwrap();
        let rival = minimize(
            |t0| payoff_at(&g, &point.with(0, VarTag::UsesT, t0), 1, tol).unwrap(),
            g.t_space(),
            tol,
        )
        .unwrap();
        prop_assert!((own.arg - eq.t_star).abs() <= 1e-5);
        prop_assert!((rival.arg - eq.t_star).abs() <= 1e-5);
        prop_assert!(own.value.abs() <= 1e-9 * (1.0 + g.params().a.powi(2)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn chains_ignore_the_order_of_fixed_players(b in 0.1..0.7f64, t_fixed in 1.0..4.0f64, s_fixed in 2.0..5.0f64) {
        let g = four_firms(10.0, b, 2.0);
        let tol = 1e-7;
        let point = MixedPoint::new(VariableAssignment::parse("TTTS").unwrap(), vec![0.0, 0.0, t_fixed, s_fixed]).unwrap();
        let ctx = Context::new(point, 0, 1).unwrap();
        let swapped = ctx.swap_fixed(2, 3).unwrap();
        let pairs = [
            (lemma2_chain(&g, &ctx, tol).unwrap(), lemma2_chain(&g, &swapped, tol).unwrap()),
            (lemma3_chain(&g, &ctx, tol).unwrap(), lemma3_chain(&g, &swapped, tol).unwrap()),
        ];
        for (a, b) in pairs {
            for (x, y) in a.values.iter().zip(b.values) {
                prop_assert!((x - y).abs() <= 2.0 * tol, "{x} vs {y}");
            }
        }
    }
}
