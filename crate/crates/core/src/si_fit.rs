//! Setting-dependent hidden-variable fits.
//!
//! With one shared distribution over deterministic strategies the CHSH
//! functional cannot exceed 2. Letting the distribution depend on the setting
//! pair removes that bound while the responses stay local; the fit below
//! finds the distributions that reproduce a target correlation table with
//! the smallest possible departure from a common reference distribution.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::bell::{
    chsh, chsh_value, correlations, enumerate_deterministic_models, ConditionalDistribution,
    CorrelationTable, HiddenState, HiddenVariableModel, ResponseTable, SettingPair,
};
use crate::error::{validation, Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Sense};
use crate::rng;

/// Outcome of [`fit_conditional_distributions`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub status: LpStatus,
    /// The fitted model; present only when `status` is optimal.
    pub model: Option<HiddenVariableModel>,
    /// The common reference distribution `Q(λ)` the fit was measured against.
    pub reference: Option<Vec<f64>>,
    /// Largest absolute mismatch between fitted and target correlations.
    pub residual: Option<f64>,
    /// Minimal `max_{λ,(a,b)} |P(λ|a,b) − Q(λ)|`.
    pub epsilon: Option<f64>,
    /// CHSH value of the fitted model.
    pub chsh: Option<f64>,
}

impl FitResult {
    fn not_optimal(status: LpStatus) -> Self {
        FitResult {
            status,
            model: None,
            reference: None,
            residual: None,
            epsilon: None,
            chsh: None,
        }
    }
}

fn strategies(states: &[HiddenState]) -> Result<Vec<[f64; 4]>> {
    if states.is_empty() {
        return Err(validation("hidden state space is empty"));
    }
    states
        .iter()
        .map(|s| {
            s.strategy.map(|t| t.map(f64::from)).ok_or_else(|| {
                validation(format!("state {} is not a deterministic strategy", s.id))
            })
        })
        .collect()
}

/// `A(a, λ)·B(b, λ)` for a strategy tuple.
fn product(t: &[f64; 4], pair: SettingPair) -> f64 {
    t[pair.a_slot()] * t[2 + pair.b_slot()]
}

/// Largest CHSH value reachable with one distribution `P(λ)` shared by all
/// four setting pairs.
///
/// The absolute values are handled by solving the four sign branches
/// `max s₁(E₁₁ − E₁₂) + s₂(E₂₂ + E₂₁)` as separate LPs.
pub fn max_chsh_under_si(states: &[HiddenState]) -> Result<f64> {
    let strat = strategies(states)?;
    let n = strat.len();
    let mut best = f64::NEG_INFINITY;
    for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let objective: Vec<f64> = strat
            .iter()
            .map(|t| {
                s1 * (product(t, SettingPair::A1B1) - product(t, SettingPair::A1B2))
                    + s2 * (product(t, SettingPair::A2B2) + product(t, SettingPair::A2B1))
            })
            .collect();
        let mut lp = LinearProgram::new(Sense::Maximize, objective);
        lp.equality(vec![1.0; n], 1.0);
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Solver(format!(
                "SI-constrained CHSH branch ({s1}, {s2}) ended {:?} after {} pivots",
                sol.status, sol.pivots
            )));
        }
        best = best.max(sol.objective);
    }
    Ok(best)
}

/// Fits setting-conditional distributions over deterministic `states` that
/// reproduce `targets`, minimizing the SI violation `ε`.
///
/// Variables are `P(λ|a,b)` for the four pairs, a reference `Q(λ)` and `ε`.
/// Constraints: nonnegativity, normalization of every distribution, the
/// four target correlations, `|P(λ|a,b) − Q(λ)| ≤ ε`, and with
/// `match_marginals` vanishing one-sided means for every pair.
pub fn fit_conditional_distributions(
    targets: &CorrelationTable,
    states: &[HiddenState],
    match_marginals: bool,
) -> Result<FitResult> {
    let target = targets.values()?;
    let strat = strategies(states)?;
    let n = strat.len();
    let q0 = 4 * n;
    let eps = 5 * n;
    let nv = eps + 1;

    let mut objective = vec![0.0; nv];
    objective[eps] = 1.0;
    let mut lp = LinearProgram::new(Sense::Minimize, objective);

    for pair in SettingPair::ALL {
        let base = pair.ordinal() * n;
        let mut norm = vec![0.0; nv];
        norm[base..base + n].fill(1.0);
        lp.equality(norm, 1.0);

        let mut corr = vec![0.0; nv];
        for (s, t) in strat.iter().enumerate() {
            corr[base + s] = product(t, pair);
        }
        lp.equality(corr, target[pair.ordinal()]);

        if match_marginals {
            let mut ma = vec![0.0; nv];
            let mut mb = vec![0.0; nv];
            for (s, t) in strat.iter().enumerate() {
                ma[base + s] = t[pair.a_slot()];
                mb[base + s] = t[2 + pair.b_slot()];
            }
            lp.equality(ma, 0.0).equality(mb, 0.0);
        }
    }
    let mut qnorm = vec![0.0; nv];
    qnorm[q0..q0 + n].fill(1.0);
    lp.equality(qnorm, 1.0);

    for pair in SettingPair::ALL {
        let base = pair.ordinal() * n;
        for s in 0..n {
            let mut up = vec![0.0; nv];
            up[base + s] = 1.0;
            up[q0 + s] = -1.0;
            up[eps] = -1.0;
            lp.less_equal(up, 0.0);
            let mut down = vec![0.0; nv];
            down[base + s] = -1.0;
            down[q0 + s] = 1.0;
            down[eps] = -1.0;
            lp.less_equal(down, 0.0);
        }
    }

    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(FitResult::not_optimal(sol.status));
    }

    // The re-solved basic point can carry roundoff-level negatives.
    let clean = |v: f64| if v < 0.0 { 0.0 } else { v };
    let p = SettingPair::ALL.map(|pair| {
        let base = pair.ordinal() * n;
        sol.x[base..base + n]
            .iter()
            .copied()
            .map(clean)
            .collect::<Vec<f64>>()
    });
    let reference: Vec<f64> = sol.x[q0..q0 + n].iter().copied().map(clean).collect();
    let epsilon = clean(sol.x[eps]);

    let model = HiddenVariableModel::new(
        states.to_vec(),
        ResponseTable::from_strategies(states)?,
        ConditionalDistribution { p },
    )?;
    let fitted = correlations(&model)?.values()?;
    let residual = fitted
        .iter()
        .zip(target.iter())
        .map(|(f, t)| (f - t).abs())
        .fold(0.0, f64::max);
    let value = chsh(&model)?;
    Ok(FitResult {
        status: LpStatus::Optimal,
        model: Some(model),
        reference: Some(reference),
        residual: Some(residual),
        epsilon: Some(epsilon),
        chsh: Some(value),
    })
}

/// Largest total-variation distance between any `P(·|a,b)` and the
/// pair-averaged distribution.
pub fn si_violation(model: &HiddenVariableModel) -> Result<f64> {
    model.validate()?;
    let avg = model.dist.pair_average();
    Ok(SettingPair::ALL
        .iter()
        .map(|&pair| {
            0.5 * model
                .dist
                .for_pair(pair)
                .iter()
                .zip(&avg)
                .map(|(p, q)| (p - q).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max))
}

/// Random target tables for the necessity scan: `supra` tables drawn
/// uniformly from `[−1, 1]⁴` with CHSH above 2, and `si` tables generated
/// by random SI mixtures of the 16 deterministic strategies.
pub fn sample_targets(
    seed: u64,
    count: usize,
) -> Result<(Vec<CorrelationTable>, Vec<CorrelationTable>)> {
    let states = enumerate_deterministic_models();
    let mut rng = rng::stream(seed, "si-fit/supra-targets");
    let mut supra = Vec::with_capacity(count);
    while supra.len() < count {
        let e: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        if chsh_value(e) > 2.0 {
            supra.push(CorrelationTable::from_values(e)?);
        }
    }
    let mut rng = rng::stream(seed, "si-fit/si-targets");
    let mut si = Vec::with_capacity(count);
    for _ in 0..count {
        let w: Vec<f64> = (0..states.len()).map(|_| rng.sample(Exp1)).collect();
        let total: f64 = w.iter().sum();
        let dist = ConditionalDistribution::independent(w.iter().map(|x| x / total).collect());
        let model = HiddenVariableModel::deterministic(states.clone(), dist)?;
        si.push(correlations(&model)?);
    }
    Ok((supra, si))
}

/// Summary of fits over the tables from [`sample_targets`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityReport {
    pub seed: u64,
    pub count: usize,
    /// Smallest ε among supra-CHSH targets.
    pub supra_min_epsilon: f64,
    /// Largest ε among SI-mixture targets.
    pub si_max_epsilon: f64,
    /// Largest correlation residual over all fits.
    pub max_residual: f64,
    pub non_optimal: usize,
}

pub fn necessity_scan(seed: u64, count: usize) -> Result<NecessityReport> {
    let states = enumerate_deterministic_models();
    let (supra, si) = sample_targets(seed, count)?;
    let mut report = NecessityReport {
        seed,
        count,
        supra_min_epsilon: f64::INFINITY,
        si_max_epsilon: 0.0,
        max_residual: 0.0,
        non_optimal: 0,
    };
    for (targets, is_supra) in supra
        .iter()
        .map(|t| (t, true))
        .chain(si.iter().map(|t| (t, false)))
    {
        let fit = fit_conditional_distributions(targets, &states, false)?;
        let (Some(eps), Some(res)) = (fit.epsilon, fit.residual) else {
            report.non_optimal += 1;
            continue;
        };
        report.max_residual = report.max_residual.max(res);
        if is_supra {
            report.supra_min_epsilon = report.supra_min_epsilon.min(eps);
        } else {
            report.si_max_epsilon = report.si_max_epsilon.max(eps);
        }
    }
    Ok(report)
}
