use proptest::prelude::*;
use silab_core::bell::*;

fn normalize(w: &[f64]) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|w| normalize(&w))
}

/// Stochastic local responses over `n` states.
fn responses(n: usize) -> impl Strategy<Value = ResponseTable> {
    let row = move || prop::collection::vec(-1.0f64..=1.0, n);
    (row(), row(), row(), row()).prop_map(|(a1, a2, b1, b2)| ResponseTable {
        abar: [a1, a2],
        bbar: [b1, b2],
    })
}

fn anonymous_states(n: usize) -> Vec<HiddenState> {
    (0..n)
        .map(|id| HiddenState { id, strategy: None })
        .collect()
}

fn si_model() -> impl Strategy<Value = HiddenVariableModel> {
    (1usize..8).prop_flat_map(|n| {
        (responses(n), weights(n)).prop_map(move |(r, w)| {
            HiddenVariableModel::new(
                anonymous_states(n),
                r,
                ConditionalDistribution::independent(w),
            )
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn si_vertex_mixtures_obey_local_bound(w in weights(16)) {
        let model = HiddenVariableModel::deterministic(
            enumerate_deterministic_models(),
            ConditionalDistribution::independent(w),
        ).unwrap();
        prop_assert!(is_si(&model, 0.0).unwrap().0);
        prop_assert!(chsh(&model).unwrap() <= 2.0 + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn si_stochastic_models_obey_local_bound(model in si_model()) {
        prop_assert!(chsh(&model).unwrap() <= 2.0 + 1e-9);
    }

    #[test]
    fn relabeling_states_preserves_chsh(
        (model, perm) in si_model().prop_flat_map(|m| {
            let n = m.len();
            (Just(m), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
    ) {
        let permute = |v: &Vec<f64>| perm.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let responses = ResponseTable {
            abar: [permute(&model.responses.abar[0]), permute(&model.responses.abar[1])],
            bbar: [permute(&model.responses.bbar[0]), permute(&model.responses.bbar[1])],
        };
        let dist = ConditionalDistribution { p: model.dist.p.clone().map(|p| permute(&p)) };
        let relabeled = HiddenVariableModel::new(anonymous_states(model.len()), responses, dist).unwrap();
        prop_assert!((chsh(&model).unwrap() - chsh(&relabeled).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn correlations_are_linear_in_the_distribution(
        (r, p1, p2) in (1usize..8).prop_flat_map(|n| (responses(n), weights(n), weights(n))),
        t in 0.0f64..=1.0,
    ) {
        let n = p1.len();
        let build = |p: Vec<f64>| {
            HiddenVariableModel::new(anonymous_states(n), r.clone(), ConditionalDistribution::independent(p)).unwrap()
        };
        let mix: Vec<f64> = p1.iter().zip(&p2).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let e1 = correlations(&build(p1.clone())).unwrap().values().unwrap();
        let e2 = correlations(&build(p2.clone())).unwrap().values().unwrap();
        let em = correlations(&build(mix)).unwrap().values().unwrap();
        for k in 0..4 {
            prop_assert!((em[k] - (t * e1[k] + (1.0 - t) * e2[k])).abs() < 1e-12);
        }
    }

    #[test]
    fn a_marginal_ignores_distant_responses(
        (model, new_b) in si_model().prop_flat_map(|m| {
            let n = m.len();
            (Just(m), prop::collection::vec(-1.0f64..=1.0, n))
        }),
        slot in 0usize..2,
    ) {
        let mut mutated = model.clone();
        mutated.responses.bbar[slot] = new_b;
        for pair in SettingPair::ALL {
            let a = Setting::a(pair.a_slot() as u8 + 1);
            let b = Setting::b(pair.b_slot() as u8 + 1);
            prop_assert_eq!(marginal_a(&model, &a, &b).unwrap(), marginal_a(&mutated, &a, &b).unwrap());
        }
    }

    #[test]
    fn singlet_tables_are_always_valid(a in prop::array::uniform4(-10.0f64..10.0)) {
        let t = singlet_table(a[0], a[1], a[2], a[3]).unwrap();
        prop_assert!(chsh_from_table(&t).unwrap() <= 2.0 * std::f64::consts::SQRT_2 + 1e-12);
    }

    #[test]
    fn singlet_correlation_depends_on_angle_difference(a in -10.0f64..10.0, b in -10.0f64..10.0, s in -5.0f64..5.0) {
        let shifted = singlet_correlation(a + s, b + s);
        prop_assert!((singlet_correlation(a, b) - shifted).abs() < 1e-12);
    }
}

#[test]
fn singlet_scan_matches_cosine() {
    for k in 0..100 {
        let a = 0.3 * (k % 7) as f64;
        let b = 2.0 * std::f64::consts::PI * k as f64 / 99.0;
        assert!(
            (singlet_correlation(a, b) + (a - b).cos()).abs() < 1e-12,
            "a={a} b={b}"
        );
    }
}

#[test]
fn json_round_trip_preserves_model() {
    let model = HiddenVariableModel::deterministic(
        enumerate_deterministic_models(),
        ConditionalDistribution::uniform(16),
    )
    .unwrap();
    let text = serde_json::to_string(&model).unwrap();
    let back: HiddenVariableModel = serde_json::from_str(&text).unwrap();
    assert_eq!(back, model);
}
