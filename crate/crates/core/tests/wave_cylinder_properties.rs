use proptest::prelude::*;
use silab_core::field_io::{read_cylinder_csv, write_cylinder_csv};
use silab_core::wave_cylinder::*;

/// Periodicity residual of unprojected Gaussian data (T = 1, r = 4, N = 64,
/// seed 7); matches `tests/oracles/cylinder_periodicity.py` on the same samples.
const GAUSSIAN_RESIDUAL_SEED7: f64 = 16.29496832933096;

/// Center difference of the locality probe times `r`, from
/// `tests/oracles/cylinder_locality.py`.
const LOCALITY_SCALED: f64 = 2.9102697831961954e-5;

fn data() -> impl Strategy<Value = CylinderData> {
    (
        0.2f64..5.0,
        prop::sample::select(vec![1usize, 2, 3, 4, 8]),
        any::<u64>(),
    )
        .prop_map(|(t, r, seed)| CylinderData::gaussian(CylinderGrid::new(t, r, 64).unwrap(), seed))
}

fn max_diff(a: &CylinderData, b: &CylinderData) -> f64 {
    a.f.iter()
        .zip(&b.f)
        .chain(a.g.iter().zip(&b.g))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent(d in data()) {
        let once = project_periodic(&d).unwrap();
        let twice = project_periodic(&once).unwrap();
        prop_assert!(max_diff(&once, &twice) <= 1e-12 * once.peak().max(1e-300));
    }

    #[test]
    fn energy_is_conserved(d in data(), frac in 0.0f64..=3.0) {
        let e0 = cylinder_energy(&d).unwrap();
        let later = evolve_cylinder(&d, frac * d.grid.period()).unwrap();
        let e1 = cylinder_energy(&later).unwrap();
        prop_assert!((e1 - e0).abs() <= 1e-10 * e0);
    }

    #[test]
    fn evolutions_compose(d in data(), t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let two_step = evolve_cylinder(&evolve_cylinder(&d, t1).unwrap(), t2).unwrap();
        let one_step = evolve_cylinder(&d, t1 + t2).unwrap();
        let scale = one_step.peak().max(1.0);
        prop_assert!(max_diff(&two_step, &one_step) <= 1e-10 * scale);
    }

    #[test]
    fn projected_data_are_exactly_periodic(d in data(), t in 0.0f64..5.0) {
        let p = project_periodic(&d).unwrap();
        prop_assert!(periodicity_residual(&p).unwrap() < 1e-9);
        if p.grid.n().is_multiple_of(p.grid.repeats()) {
            prop_assert!(spatial_repetition_residual(&p, t).unwrap() < 1e-9);
        }

        let at_t = evolve_cylinder(&p, p.grid.period()).unwrap();
        let at_2t = evolve_cylinder(&p, 2.0 * p.grid.period()).unwrap();
        let r1 = max_diff(&at_t, &p) / p.peak();
        let r2 = max_diff(&at_2t, &p) / p.peak();
        prop_assert!((r1 - r2).abs() < 1e-10);
    }

    #[test]
    fn projection_keeps_only_allowed_modes(d in data()) {
        let p = project_periodic(&d).unwrap();
        let set = allowed_modes(&p.grid);
        let (fs, gs) = p.spectra();
        let scale = p.peak().max(1e-300);
        for idx in 0..p.grid.n() {
            if !set.contains_bin(idx) {
                prop_assert!(fs[idx].norm() <= 1e-12 * scale && gs[idx].norm() <= 1e-12 * scale);
            }
        }
        prop_assert!(gs[0].norm() <= 1e-12 * scale);
    }
}

#[test]
fn unprojected_gaussian_is_not_periodic() {
    let grid = CylinderGrid::new(1.0, 4, 64).unwrap();
    let residual = periodicity_residual(&CylinderData::gaussian(grid, 7)).unwrap();
    assert!((residual - GAUSSIAN_RESIDUAL_SEED7).abs() < 1e-9 * GAUSSIAN_RESIDUAL_SEED7);
    assert!(residual > 1e-2);
}

#[test]
fn local_physics_blurs_with_more_repeats() {
    let mut previous = f64::INFINITY;
    for r in [8, 16, 32] {
        let mean = (1..=3)
            .map(|seed| locality_probe(r, seed).unwrap())
            .inspect(|rep| assert!(rep.window_mismatch < 1e-12))
            .map(|rep| rep.center_difference)
            .sum::<f64>()
            / 3.0;
        assert!(
            (mean * r as f64 - LOCALITY_SCALED).abs() < 1e-12,
            "r={r}: {mean:e}"
        );
        assert!(mean < previous);
        previous = mean;
    }
}

#[test]
fn projected_data_survive_csv() {
    let grid = CylinderGrid::new(2.0, 4, 32).unwrap();
    let p = project_periodic(&CylinderData::gaussian(grid, 3)).unwrap();
    let mut buf = Vec::new();
    write_cylinder_csv(&p, &mut buf).unwrap();
    let back = read_cylinder_csv(grid, buf.as_slice()).unwrap();
    assert_eq!(back, p);
    assert!(periodicity_residual(&back).unwrap() < 1e-9);
}
