//! The five experiment families.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use serde_json::{json, Value};
use silab_core::bell::{
    chsh, chsh_from_table, enumerate_deterministic_models, singlet_correlation, singlet_table,
    ConditionalDistribution, HiddenVariableModel,
};
use silab_core::contextuality::{
    build_square, exhaustive_value_search, ks_report, verify_algebra, ConstraintSet, ALGEBRA_TOL,
};
use silab_core::lp::LpStatus;
use silab_core::si_fit::{
    fit_conditional_distributions, max_chsh_under_si, necessity_scan, si_violation,
};
use silab_core::wave_cylinder::{
    allowed_modes, cylinder_energy, evolve_cylinder, locality_probe, periodicity_residual,
    project_periodic, spatial_repetition_residual, CylinderData, CylinderGrid,
};
use silab_core::wave_mixed::{
    cone_leakage, dual_evolution_check, evolve_x2, growth_scan, si_field_analogue,
    single_mode_data, stability_dichotomy, unit_mode_grid, ConeMask, FieldRegions, IndexRect,
    Orientation, SurfaceGrid, GROWTH_REL_TOL, STABILITY_TOL,
};

use crate::config::{
    ChshScanConfig, Experiment, ExperimentConfig, SiFitConfig, WaveCylinderConfig, WaveMixedConfig,
};
use crate::error::CliError;
use crate::record::{Scalar, Scan};

/// Tolerance separating a strictly positive ε from solver zero.
pub const EPSILON_FLOOR: f64 = 1e-12;

#[derive(Debug, Default)]
pub struct Outcome {
    pub scalars: BTreeMap<String, Scalar>,
    pub report: Value,
    pub scans: Vec<Scan>,
}

impl Outcome {
    fn scalar(&mut self, name: &str, s: Scalar) {
        self.scalars.insert(name.to_string(), s);
    }
}

pub fn run(experiment: Experiment, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    match experiment {
        Experiment::ChshScan => chsh_scan(&config.chsh_scan),
        Experiment::SiFit => si_fit(&config.si_fit, config.seed),
        Experiment::WaveMixed => wave_mixed(&config.wave_mixed, config.seed),
        Experiment::WaveCylinder => wave_cylinder(&config.wave_cylinder, config.seed),
        Experiment::KsCheck => ks_check(),
    }
}

fn chsh_scan(cfg: &ChshScanConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let states = enumerate_deterministic_models();

    let mut vertex_dev: f64 = 0.0;
    for s in &states {
        let model = HiddenVariableModel::deterministic(
            vec![*s],
            ConditionalDistribution::independent(vec![1.0]),
        )?;
        vertex_dev = vertex_dev.max((chsh(&model)? - 2.0).abs());
    }
    out.scalar(
        "deterministic_chsh_max_deviation",
        Scalar::exact(vertex_dev, 0.0),
    );
    out.scalar(
        "max_chsh_under_si",
        Scalar::near(max_chsh_under_si(&states)?, 2.0, 1e-9),
    );

    let n = cfg.singlet_points;
    let mut singlet_rows = Vec::with_capacity(n);
    let mut singlet_err: f64 = 0.0;
    for k in 0..n {
        let a = 2.0 * PI * k as f64 / n as f64;
        let b = 0.7 - a / 3.0;
        let e = singlet_correlation(a, b);
        let expected = -(a - b).cos();
        singlet_err = singlet_err.max((e - expected).abs());
        singlet_rows.push(vec![a - b, e, expected]);
    }
    out.scalar(
        "singlet_correlation_max_error",
        Scalar::below(singlet_err, 1e-12),
    );

    let tsirelson = chsh_from_table(&singlet_table(0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4)?)?;
    out.scalar("singlet_chsh", Scalar::near(tsirelson, 2.0 * SQRT_2, 1e-9));

    let step = cfg.theta_max / (cfg.points - 1) as f64;
    let mut rows = Vec::with_capacity(cfg.points);
    for i in 0..cfg.points {
        let theta = step * i as f64;
        let s = chsh_from_table(&singlet_table(0.0, 2.0 * theta, theta, 3.0 * theta)?)?;
        rows.push(vec![theta, s]);
    }
    let peak = rows.iter().fold((0.0, f64::NEG_INFINITY), |(t, s), r| {
        if r[1] > s {
            (r[0], r[1])
        } else {
            (t, s)
        }
    });
    out.scalar("scan_peak_S", Scalar::near(peak.1, 2.0 * SQRT_2, 1e-9));
    out.scalar(
        "scan_peak_theta",
        Scalar::near(peak.0, FRAC_PI_4, step / 2.0),
    );

    out.report = json!({
        "angle_family": "a1 = 0, a2 = 2θ, b1 = θ, b2 = 3θ",
        "peak_theta": peak.0,
        "peak_S": peak.1,
    });
    out.scans
        .push(Scan::new("chsh_scan", &["theta", "S"], rows));
    out.scans.push(Scan::new(
        "singlet_correlation",
        &["delta", "E", "minus_cos"],
        singlet_rows,
    ));
    Ok(out)
}

fn si_fit(cfg: &SiFitConfig, seed: u64) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let states = enumerate_deterministic_models();
    let [a1, a2, b1, b2] = cfg.angles;
    let targets = singlet_table(a1, a2, b1, b2)?;
    let target_chsh = chsh_from_table(&targets)?;

    let fit = fit_conditional_distributions(&targets, &states, cfg.match_marginals)?;
    if fit.status != LpStatus::Optimal {
        return Err(CliError::Numerical(format!(
            "fit on singlet targets ended {:?}",
            fit.status
        )));
    }
    let (Some(model), Some(reference), Some(residual), Some(eps), Some(fit_chsh)) = (
        &fit.model,
        &fit.reference,
        fit.residual,
        fit.epsilon,
        fit.chsh,
    ) else {
        return Err(CliError::Numerical("optimal fit without a model".into()));
    };

    out.scalar(
        "max_chsh_under_si",
        Scalar::near(max_chsh_under_si(&states)?, 2.0, 1e-9),
    );
    out.scalar("fit_residual", Scalar::below(residual, 1e-9));
    out.scalar("fit_chsh", Scalar::near(fit_chsh, target_chsh, 1e-9));
    let tv = si_violation(model)?;
    if target_chsh > 2.0 {
        out.scalar("epsilon", Scalar::above(eps, EPSILON_FLOOR));
        out.scalar("si_violation", Scalar::above(tv, EPSILON_FLOOR));
    } else {
        out.scalar("epsilon", Scalar::below(eps, 1e-9));
    }

    let rows = (0..states.len())
        .map(|s| {
            let mut row = vec![s as f64];
            row.extend(model.dist.p.iter().map(|p| p[s]));
            row.push(reference[s]);
            row
        })
        .collect();
    out.scans.push(Scan::new(
        "distribution",
        &[
            "lambda",
            "p_a1b1",
            "p_a1b2",
            "p_a2b1",
            "p_a2b2",
            "reference",
        ],
        rows,
    ));

    let necessity = if cfg.necessity_count > 0 {
        let r = necessity_scan(seed, cfg.necessity_count)?;
        out.scalar(
            "necessity_supra_min_epsilon",
            Scalar::above(r.supra_min_epsilon, EPSILON_FLOOR),
        );
        out.scalar(
            "necessity_si_max_epsilon",
            Scalar::below(r.si_max_epsilon, 1e-9),
        );
        out.scalar(
            "necessity_max_residual",
            Scalar::below(r.max_residual, 1e-9),
        );
        out.scalar(
            "necessity_non_optimal",
            Scalar::exact(r.non_optimal as f64, 0.0),
        );
        serde_json::to_value(r).expect("report serializes")
    } else {
        Value::Null
    };

    out.report = json!({
        "target_chsh": target_chsh,
        "epsilon_chsh_bound": (target_chsh - 2.0).max(0.0) / 32.0,
        "fit": fit,
        "necessity": necessity,
    });
    Ok(out)
}

/// Regions scaled from the 32-point layout: `Λ` a centered square of side
/// `n/8`, `A` and `B` its neighbors along `x₁`.
pub fn field_regions(n: usize) -> FieldRegions {
    let w = (n / 8).max(1);
    let lo = n / 2 - w / 2;
    FieldRegions {
        lambda: IndexRect::new(lo, lo + w, lo, lo + w),
        a: IndexRect::new(lo - w, lo, lo, lo + w),
        b: IndexRect::new(lo + w, lo + 2 * w, lo, lo + w),
    }
}

fn wave_mixed(cfg: &WaveMixedConfig, seed: u64) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();

    let reports = Orientation::BOTH
        .iter()
        .map(|&o| stability_dichotomy(o))
        .collect::<silab_core::Result<Vec<_>>>()?;
    let passing: Vec<_> = reports.iter().filter(|r| r.passes).collect();
    out.scalar(
        "stability_orientations_passing",
        Scalar::exact(passing.len() as f64, 1.0),
    );
    let stable = passing.first().copied().unwrap_or(&reports[0]);
    out.scalar(
        "stable_probe_max_deviation",
        Scalar::below(stable.probe_max_deviation, STABILITY_TOL),
    );
    out.scalar(
        "stable_growth_rel_error",
        Scalar::below(
            (stable.growth_amplitude / stable.growth_analytic - 1.0).abs(),
            GROWTH_REL_TOL,
        ),
    );

    let probe_grid = unit_mode_grid();
    let probe_data: Vec<_> = reports
        .iter()
        .map(|r| {
            (
                single_mode_data(&probe_grid, r.probe_mode.0, r.probe_mode.1),
                ConeMask::new(&probe_grid, r.orientation, false),
                r.probe_mode,
            )
        })
        .collect();
    let mut probe_rows = Vec::new();
    for step in 0..=100 {
        let x2 = 0.1 * step as f64;
        let mut row = vec![x2];
        for (data, mask, (m, n)) in &probe_data {
            row.push(evolve_x2(data, mask, x2)?.mode_amplitude(*m, *n));
        }
        probe_rows.push(row);
    }
    out.scans.push(Scan::new(
        "probe",
        &["x2", "omega_dominant", "k_dominant"],
        probe_rows,
    ));

    let growth = growth_scan(cfg.growth_x2_max, cfg.growth_steps)?;
    let growth_err = growth
        .iter()
        .map(|r| (r[1] / r[2] - 1.0).abs())
        .fold(0.0, f64::max);
    out.scalar(
        "growth_max_rel_error",
        Scalar::below(growth_err, GROWTH_REL_TOL),
    );
    out.scans.push(Scan::new(
        "growth",
        &["x2", "amplitude", "analytic"],
        growth.into_iter().map(|r| r.to_vec()).collect(),
    ));

    let lgrid = SurfaceGrid::new(cfg.leakage_n, cfg.leakage_n, 2.0 * PI, 2.0 * PI)?;
    let mut leakage = serde_json::Map::new();
    for o in Orientation::BOTH {
        let tail = cone_leakage(&lgrid, &ConeMask::new(&lgrid, o, false))?;
        out.scalar(
            &format!("leakage_tail_{}", o.name().replace('-', "_")),
            Scalar::above(tail, 1e-4),
        );
        leakage.insert(o.name().to_string(), json!(tail));
    }

    let dual = dual_evolution_check(seed)?;
    out.scalar(
        "dual_evolution_relative",
        Scalar::below(dual.relative, 1e-6),
    );
    out.scalar(
        "dual_constraint_residual",
        Scalar::below(dual.constraint_residual, 1e-12),
    );

    let fgrid = SurfaceGrid::new(cfg.field_n, cfg.field_n, 2.0 * PI, 2.0 * PI)?;
    let regions = field_regions(cfg.field_n);
    let mut field = serde_json::Map::new();
    for (name, mask) in [
        (
            "omega-dominant",
            ConeMask::new(&fgrid, Orientation::OmegaDominant, false),
        ),
        (
            "k-dominant",
            ConeMask::new(&fgrid, Orientation::KDominant, false),
        ),
        ("all-pass", ConeMask::all_pass(&fgrid)),
    ] {
        let r = si_field_analogue(&fgrid, &regions, &mask, cfg.ensemble, seed)?;
        field.insert(
            name.to_string(),
            serde_json::to_value(r).expect("report serializes"),
        );
    }
    let cone_ratio = field["omega-dominant"]["ratio"]
        .as_f64()
        .unwrap_or(f64::NAN);
    out.scalar("field_si_ratio", Scalar::below(cone_ratio, 0.95));

    out.report = json!({
        "stability": reports,
        "stable_orientation": passing.first().map(|r| r.orientation.name()),
        "leakage_tail": leakage,
        "dual_evolution": dual,
        "field_si": { "regions": regions, "ratios": field },
    });
    Ok(out)
}

fn wave_cylinder(cfg: &WaveCylinderConfig, seed: u64) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let grid = CylinderGrid::new(cfg.period, cfg.repeats, cfg.n)?;
    let raw = CylinderData::gaussian(grid, seed);
    let projected = project_periodic(&raw)?;
    let t_rep = cfg.repetition_time * cfg.period;

    out.scalar(
        "periodicity_residual",
        Scalar::below(periodicity_residual(&projected)?, 1e-9),
    );
    out.scalar(
        "spatial_repetition_residual",
        Scalar::below(spatial_repetition_residual(&projected, t_rep)?, 1e-9),
    );
    out.scalar(
        "unprojected_periodicity_residual",
        Scalar::above(periodicity_residual(&raw)?, 1e-2),
    );

    let e0 = cylinder_energy(&projected)?;
    let mut rows = Vec::with_capacity(cfg.energy_steps + 1);
    let mut drift: f64 = 0.0;
    for i in 0..=cfg.energy_steps {
        let t = 3.0 * cfg.period * i as f64 / cfg.energy_steps as f64;
        let e = cylinder_energy(&evolve_cylinder(&projected, t)?)?;
        let rel = if e0 > 0.0 {
            (e - e0).abs() / e0
        } else {
            (e - e0).abs()
        };
        drift = drift.max(rel);
        rows.push(vec![t, e, rel]);
    }
    out.scalar("energy_drift", Scalar::below(drift, 1e-10));
    out.scans.push(Scan::new(
        "energy",
        &["t", "energy", "relative_drift"],
        rows,
    ));

    let mut locality = Vec::new();
    let mut loc_rows = Vec::new();
    for &r in &cfg.locality_repeats {
        let rep = locality_probe(r, seed)?;
        loc_rows.push(vec![r as f64, rep.center_difference, rep.window_mismatch]);
        locality.push(rep);
    }
    if !locality.is_empty() {
        let mismatch = locality
            .iter()
            .map(|r| r.window_mismatch)
            .fold(0.0, f64::max);
        out.scalar("locality_window_mismatch", Scalar::below(mismatch, 1e-12));
        let mut by_r = loc_rows.clone();
        by_r.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let decreasing = by_r.windows(2).all(|w| w[1][1] < w[0][1]);
        out.scalar(
            "locality_decreases_with_repeats",
            Scalar::exact(f64::from(u8::from(decreasing)), 1.0),
        );
    }
    out.scans.push(Scan::new(
        "locality",
        &["repeats", "center_difference", "window_mismatch"],
        loc_rows,
    ));

    let modes = allowed_modes(&grid);
    out.report = json!({
        "length": grid.length(),
        "allowed_modes": modes.modes,
        "nonzero_wavenumber_count": modes.nonzero_wavenumber_count(),
        "initial_energy": e0,
        "locality": locality,
    });
    Ok(out)
}

fn ks_check() -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let sq = build_square();
    let alg = verify_algebra(&sq);
    out.scalar(
        "commutator_max",
        Scalar::below(alg.commutator_max, ALGEBRA_TOL),
    );
    out.scalar(
        "hermitian_max_dev",
        Scalar::below(alg.hermitian_max_dev, ALGEBRA_TOL),
    );
    out.scalar(
        "involution_max_dev",
        Scalar::below(alg.involution_max_dev, ALGEBRA_TOL),
    );
    out.scalar(
        "target_max_dev",
        Scalar::below(alg.target_max_dev, ALGEBRA_TOL),
    );
    let parity: i8 = sq.row_targets.iter().chain(&sq.col_targets).product();
    out.scalar("target_parity", Scalar::exact(f64::from(parity), -1.0));

    let report = ks_report();
    let full = exhaustive_value_search(&sq, &ConstraintSet::ALL);
    out.scalar(
        "assignments_examined",
        Scalar::exact(full.examined as f64, 512.0),
    );
    out.scalar(
        "consistent_assignments",
        Scalar::exact(report.consistent_assignments as f64, 0.0),
    );
    let rows_only = exhaustive_value_search(&sq, &ConstraintSet::ROWS_ONLY).consistent;
    let cols_only = exhaustive_value_search(&sq, &ConstraintSet::COLUMNS_ONLY).consistent;
    out.scalar(
        "rows_only_assignments",
        Scalar::exact(rows_only as f64, 64.0),
    );
    out.scalar(
        "columns_only_assignments",
        Scalar::exact(cols_only as f64, 64.0),
    );

    out.report = json!({
        "ks": report,
        "labels": sq.labels,
        "violations": alg.violations,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regions_match_reference_layout() {
        let r = field_regions(32);
        assert_eq!(r.lambda, IndexRect::new(14, 18, 14, 18));
        assert_eq!(r.a, IndexRect::new(10, 14, 14, 18));
        assert_eq!(r.b, IndexRect::new(18, 22, 14, 18));
        let small = field_regions(8);
        assert_eq!(small.lambda, IndexRect::new(4, 5, 4, 5));
        assert_eq!(small.a.i0, 3);
    }

    #[test]
    fn ks_check_passes() {
        let out = ks_check().unwrap();
        assert!(out.scalars.values().all(|s| s.passed));
        assert_eq!(out.report["ks"]["consistent_assignments"], 0);
        assert!(out.scans.is_empty());
    }

    #[test]
    fn chsh_scan_peaks_at_quarter_pi() {
        let out = chsh_scan(&ChshScanConfig::default()).unwrap();
        assert!(out.scalars.values().all(|s| s.passed), "{:?}", out.scalars);
        assert_eq!(out.scans[0].rows.len(), 91);
    }
}
