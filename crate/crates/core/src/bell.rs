//! Finite hidden-variable models for the two-party, two-setting experiment.
//!
//! A model is a finite state space, local response tables `Ā(a, λ)` and
//! `B̄(b, λ)`, and one distribution over states per setting pair. The response
//! tables have no slot for the distant setting, so every model built here is
//! factorizable. Whether the distribution may vary with the setting pair is
//! exactly the statistical-independence question.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::linalg::Matrix2;

/// Default tolerance on `Σ_λ P(λ|a,b) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Default tolerance for declaring a model setting-independent.
pub const SI_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// One detector setting: `a₁`, `a₂`, `b₁` or `b₂`, optionally with a
/// measurement angle in the x–z plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    side: Side,
    index: u8,
    angle: Option<f64>,
}

impl Setting {
    pub fn new(side: Side, index: u8, angle: Option<f64>) -> Result<Self> {
        if !(1..=2).contains(&index) {
            return Err(Error::Index(format!(
                "setting index {index} not in {{1, 2}}"
            )));
        }
        if let Some(theta) = angle {
            if !theta.is_finite() {
                return Err(validation(format!("setting angle {theta} is not finite")));
            }
        }
        Ok(Setting { side, index, angle })
    }

    /// A-side setting without an angle. Panics unless `index` is 1 or 2.
    pub fn a(index: u8) -> Self {
        Self::new(Side::A, index, None).expect("A-side setting index must be 1 or 2")
    }

    /// B-side setting without an angle. Panics unless `index` is 1 or 2.
    pub fn b(index: u8) -> Self {
        Self::new(Side::B, index, None).expect("B-side setting index must be 1 or 2")
    }

    pub fn with_angle(self, theta: f64) -> Result<Self> {
        Self::new(self.side, self.index, Some(theta))
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn angle(&self) -> Option<f64> {
        self.angle
    }

    fn slot(&self) -> usize {
        usize::from(self.index - 1)
    }
}

/// The four setting pairs, in the order `a1b1, a1b2, a2b1, a2b2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SettingPair {
    A1B1,
    A1B2,
    A2B1,
    A2B2,
}

impl SettingPair {
    pub const ALL: [SettingPair; 4] = [
        SettingPair::A1B1,
        SettingPair::A1B2,
        SettingPair::A2B1,
        SettingPair::A2B2,
    ];

    pub fn from_slots(a: usize, b: usize) -> Self {
        Self::ALL[2 * a + b]
    }

    pub fn of(a: &Setting, b: &Setting) -> Result<Self> {
        check_sides(a, b)?;
        Ok(Self::from_slots(a.slot(), b.slot()))
    }

    /// Position in [`SettingPair::ALL`].
    pub fn ordinal(self) -> usize {
        self as usize
    }

    /// Zero-based A-setting slot.
    pub fn a_slot(self) -> usize {
        self.ordinal() / 2
    }

    /// Zero-based B-setting slot.
    pub fn b_slot(self) -> usize {
        self.ordinal() % 2
    }

    pub fn key(self) -> &'static str {
        ["a1b1", "a1b2", "a2b1", "a2b2"][self.ordinal()]
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

fn check_sides(a: &Setting, b: &Setting) -> Result<()> {
    if a.side != Side::A {
        return Err(Error::Index(format!(
            "expected an A-side setting, got {:?}",
            a.side
        )));
    }
    if b.side != Side::B {
        return Err(Error::Index(format!(
            "expected a B-side setting, got {:?}",
            b.side
        )));
    }
    Ok(())
}

/// A hidden state `λ`. Deterministic strategies carry their outcome tuple
/// `(A(a₁), A(a₂), B(b₁), B(b₂))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenState {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<[i8; 4]>,
}

/// Local response expectations. `abar[i][s]` is `Ā(aᵢ₊₁, λₛ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResponseTable {
    pub abar: [Vec<f64>; 2],
    pub bbar: [Vec<f64>; 2],
}

impl ResponseTable {
    /// Response tables read off deterministic strategies.
    pub fn from_strategies(states: &[HiddenState]) -> Result<Self> {
        let mut abar = [
            Vec::with_capacity(states.len()),
            Vec::with_capacity(states.len()),
        ];
        let mut bbar = [
            Vec::with_capacity(states.len()),
            Vec::with_capacity(states.len()),
        ];
        for st in states {
            let s = st.strategy.ok_or_else(|| {
                validation(format!("state {} has no deterministic strategy", st.id))
            })?;
            abar[0].push(f64::from(s[0]));
            abar[1].push(f64::from(s[1]));
            bbar[0].push(f64::from(s[2]));
            bbar[1].push(f64::from(s[3]));
        }
        Ok(ResponseTable { abar, bbar })
    }
}

/// `P(λ | a, b)` for each of the four setting pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "DistRepr", into = "DistRepr")]
pub struct ConditionalDistribution {
    pub p: [Vec<f64>; 4],
}

#[derive(Serialize, Deserialize)]
struct DistRepr {
    a1b1: Vec<f64>,
    a1b2: Vec<f64>,
    a2b1: Vec<f64>,
    a2b2: Vec<f64>,
}

impl From<DistRepr> for ConditionalDistribution {
    fn from(r: DistRepr) -> Self {
        ConditionalDistribution {
            p: [r.a1b1, r.a1b2, r.a2b1, r.a2b2],
        }
    }
}

impl From<ConditionalDistribution> for DistRepr {
    fn from(d: ConditionalDistribution) -> Self {
        let [a1b1, a1b2, a2b1, a2b2] = d.p;
        DistRepr {
            a1b1,
            a1b2,
            a2b1,
            a2b2,
        }
    }
}

impl ConditionalDistribution {
    /// The same distribution for every setting pair.
    pub fn independent(p: Vec<f64>) -> Self {
        ConditionalDistribution {
            p: [p.clone(), p.clone(), p.clone(), p],
        }
    }

    pub fn uniform(n: usize) -> Self {
        Self::independent(vec![1.0 / n as f64; n])
    }

    pub fn for_pair(&self, pair: SettingPair) -> &[f64] {
        &self.p[pair.ordinal()]
    }

    /// Average of the four per-pair distributions.
    pub fn pair_average(&self) -> Vec<f64> {
        let n = self.p[0].len();
        (0..n)
            .map(|s| self.p.iter().map(|row| row[s]).sum::<f64>() / 4.0)
            .collect()
    }
}

/// States, response tables and the setting-conditional distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiddenVariableModel {
    pub states: Vec<HiddenState>,
    #[serde(flatten)]
    pub responses: ResponseTable,
    pub dist: ConditionalDistribution,
}

impl HiddenVariableModel {
    pub fn new(
        states: Vec<HiddenState>,
        responses: ResponseTable,
        dist: ConditionalDistribution,
    ) -> Result<Self> {
        let model = HiddenVariableModel {
            states,
            responses,
            dist,
        };
        model.validate()?;
        Ok(model)
    }

    /// A model over deterministic strategies, responses taken from the strategies.
    pub fn deterministic(states: Vec<HiddenState>, dist: ConditionalDistribution) -> Result<Self> {
        let responses = ResponseTable::from_strategies(&states)?;
        Self::new(states, responses, dist)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with(NORMALIZATION_TOL)
    }

    pub fn validate_with(&self, normalization_tol: f64) -> Result<()> {
        let n = self.states.len();
        if n == 0 {
            return Err(validation("model has no hidden states"));
        }
        let mut ids: Vec<usize> = self.states.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(validation("hidden state ids are not unique"));
        }
        let tables = [
            ("abar", &self.responses.abar),
            ("bbar", &self.responses.bbar),
        ];
        for (name, table) in tables {
            for (i, row) in table.iter().enumerate() {
                if row.len() != n {
                    return Err(validation(format!(
                        "{name}[{i}] has {} entries, expected {n}",
                        row.len()
                    )));
                }
                if let Some(v) = row.iter().find(|v| !(v.is_finite() && v.abs() <= 1.0)) {
                    return Err(validation(format!("{name}[{i}] entry {v} outside [-1, 1]")));
                }
            }
        }
        for (s, st) in self.states.iter().enumerate() {
            if let Some(strategy) = st.strategy {
                if strategy.iter().any(|v| v.abs() != 1) {
                    return Err(validation(format!(
                        "state {} strategy has entries outside ±1",
                        st.id
                    )));
                }
                let table = [
                    self.responses.abar[0][s],
                    self.responses.abar[1][s],
                    self.responses.bbar[0][s],
                    self.responses.bbar[1][s],
                ];
                if table.iter().zip(strategy).any(|(t, v)| *t != f64::from(v)) {
                    return Err(validation(format!(
                        "state {} responses disagree with its strategy",
                        st.id
                    )));
                }
            }
        }
        for pair in SettingPair::ALL {
            let row = self.dist.for_pair(pair);
            if row.len() != n {
                return Err(validation(format!(
                    "dist[{pair}] has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(validation(format!(
                    "dist[{pair}] has invalid probability {v}"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > normalization_tol {
                return Err(validation(format!("dist[{pair}] sums to {total}, not 1")));
            }
        }
        Ok(())
    }

    fn position(&self, state_id: usize) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s.id == state_id)
            .ok_or_else(|| Error::Index(format!("unknown hidden state id {state_id}")))
    }

    fn pair_expectation(&self, pair: SettingPair) -> f64 {
        let a = &self.responses.abar[pair.a_slot()];
        let b = &self.responses.bbar[pair.b_slot()];
        let p = self.dist.for_pair(pair);
        a.iter().zip(b).zip(p).map(|((x, y), w)| x * y * w).sum()
    }

    fn correlations_unchecked(&self) -> [f64; 4] {
        SettingPair::ALL.map(|pair| self.pair_expectation(pair))
    }
}

/// `E(a, b, λ) = Ā(a, λ) · B̄(b, λ)`.
pub fn expectation_given_state(
    model: &HiddenVariableModel,
    a: &Setting,
    b: &Setting,
    state_id: usize,
) -> Result<f64> {
    check_sides(a, b)?;
    let s = model.position(state_id)?;
    let abar = model
        .responses
        .abar
        .get(a.slot())
        .and_then(|row| row.get(s))
        .ok_or_else(|| Error::Index(format!("no response for a{} at state {state_id}", a.index)))?;
    let bbar = model
        .responses
        .bbar
        .get(b.slot())
        .and_then(|row| row.get(s))
        .ok_or_else(|| Error::Index(format!("no response for b{} at state {state_id}", b.index)))?;
    Ok(abar * bbar)
}

/// `E(a, b) = Σ_λ Ā(a, λ) B̄(b, λ) P(λ | a, b)`.
pub fn expectation(model: &HiddenVariableModel, a: &Setting, b: &Setting) -> Result<f64> {
    let pair = SettingPair::of(a, b)?;
    model.validate()?;
    Ok(model.pair_expectation(pair))
}

/// All four correlations of a model as a table.
pub fn correlations(model: &HiddenVariableModel) -> Result<CorrelationTable> {
    model.validate()?;
    let [e11, e12, e21, e22] = model.correlations_unchecked();
    CorrelationTable::new(e11, e12, e21, e22)
}

/// `Σ_λ Ā(a, λ) P(λ | a, b)`: the A-side mean outcome under the pair `(a, b)`.
///
/// With fixed `Ā` and `P` this does not depend on `B̄`; it depends on `b`
/// only through `P(· | a, b)`.
pub fn marginal_a(model: &HiddenVariableModel, a: &Setting, b: &Setting) -> Result<f64> {
    let pair = SettingPair::of(a, b)?;
    model.validate()?;
    let row = &model.responses.abar[pair.a_slot()];
    Ok(row
        .iter()
        .zip(model.dist.for_pair(pair))
        .map(|(x, w)| x * w)
        .sum())
}

/// `Σ_λ B̄(b, λ) P(λ | a, b)`.
pub fn marginal_b(model: &HiddenVariableModel, a: &Setting, b: &Setting) -> Result<f64> {
    let pair = SettingPair::of(a, b)?;
    model.validate()?;
    let row = &model.responses.bbar[pair.b_slot()];
    Ok(row
        .iter()
        .zip(model.dist.for_pair(pair))
        .map(|(x, w)| x * w)
        .sum())
}

/// `|E₁₁ − E₁₂| + |E₂₂ + E₂₁|` on correlations in pair order.
pub fn chsh_value(e: [f64; 4]) -> f64 {
    let [e11, e12, e21, e22] = e;
    (e11 - e12).abs() + (e22 + e21).abs()
}

/// The CHSH functional of a model.
pub fn chsh(model: &HiddenVariableModel) -> Result<f64> {
    model.validate()?;
    Ok(chsh_value(model.correlations_unchecked()))
}

/// The CHSH functional applied to raw correlations.
pub fn chsh_from_table(t: &CorrelationTable) -> Result<f64> {
    Ok(chsh_value(t.values()?))
}

/// Whether the distribution is the same for every setting pair.
///
/// Returns the largest deviation `max |P(λ|a,b) − P(λ|a',b')|` alongside
/// the verdict `d ≤ tol`.
pub fn is_si(model: &HiddenVariableModel, tol: f64) -> Result<(bool, f64)> {
    model.validate()?;
    let p = &model.dist.p;
    let mut d: f64 = 0.0;
    for s in 0..model.len() {
        let (lo, hi) = p
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), row| {
                (lo.min(row[s]), hi.max(row[s]))
            });
        d = d.max(hi - lo);
    }
    Ok((d <= tol, d))
}

/// The 16 deterministic strategies. Strategy `id` answers `-1` on slot `k`
/// (order `a₁, a₂, b₁, b₂`) when bit `3 − k` of `id` is set, so `id = 0` is
/// the all-`+1` strategy.
pub fn enumerate_deterministic_models() -> Vec<HiddenState> {
    (0..16)
        .map(|id| {
            let strategy = [0, 1, 2, 3].map(|k| if (id >> (3 - k)) & 1 == 0 { 1 } else { -1 });
            HiddenState {
                id,
                strategy: Some(strategy),
            }
        })
        .collect()
}

/// `⟨ψ| (n_a·σ) ⊗ (n_b·σ) |ψ⟩` for the singlet
/// `ψ = (|+x⟩|−x⟩ − |−x⟩|+x⟩)/√2`, with `n_θ = (sin θ, 0, cos θ)`.
///
/// Computed by explicit matrix algebra; equals `−cos(θ_a − θ_b)`.
pub fn singlet_correlation(angle_a: f64, angle_b: f64) -> f64 {
    let psi = singlet_state();
    let op = Matrix2::spin_xz(angle_a).kron(&Matrix2::spin_xz(angle_b));
    // Roundoff can land a few ulps outside [−1, 1].
    op.expectation(&psi).re.clamp(-1.0, 1.0)
}

fn singlet_state() -> [Complex64; 4] {
    let h = FRAC_1_SQRT_2;
    let plus = [h, h];
    let minus = [h, -h];
    let mut psi = [Complex64::new(0.0, 0.0); 4];
    for (idx, amp) in psi.iter_mut().enumerate() {
        let (i, j) = (idx / 2, idx % 2);
        *amp = Complex64::new(
            FRAC_1_SQRT_2 * (plus[i] * minus[j] - minus[i] * plus[j]),
            0.0,
        );
    }
    psi
}

/// Singlet correlations for settings `(a₁, a₂, b₁, b₂)`.
pub fn singlet_table(a1: f64, a2: f64, b1: f64, b2: f64) -> Result<CorrelationTable> {
    CorrelationTable::new(
        singlet_correlation(a1, b1),
        singlet_correlation(a1, b2),
        singlet_correlation(a2, b1),
        singlet_correlation(a2, b2),
    )
}

/// `E(aᵢ, bⱼ)` for the 2×2 setting grid. Entries may be missing while a
/// table is assembled; evaluation requires all four.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    #[serde(default)]
    pub a1b1: Option<f64>,
    #[serde(default)]
    pub a1b2: Option<f64>,
    #[serde(default)]
    pub a2b1: Option<f64>,
    #[serde(default)]
    pub a2b2: Option<f64>,
}

impl CorrelationTable {
    pub fn new(e11: f64, e12: f64, e21: f64, e22: f64) -> Result<Self> {
        let mut t = CorrelationTable::default();
        for (pair, v) in SettingPair::ALL.into_iter().zip([e11, e12, e21, e22]) {
            t.set(pair, v)?;
        }
        Ok(t)
    }

    pub fn from_values(e: [f64; 4]) -> Result<Self> {
        Self::new(e[0], e[1], e[2], e[3])
    }

    fn slot_mut(&mut self, pair: SettingPair) -> &mut Option<f64> {
        match pair {
            SettingPair::A1B1 => &mut self.a1b1,
            SettingPair::A1B2 => &mut self.a1b2,
            SettingPair::A2B1 => &mut self.a2b1,
            SettingPair::A2B2 => &mut self.a2b2,
        }
    }

    pub fn set(&mut self, pair: SettingPair, value: f64) -> Result<()> {
        if !(value.is_finite() && value.abs() <= 1.0) {
            return Err(validation(format!(
                "correlation {pair} = {value} outside [-1, 1]"
            )));
        }
        *self.slot_mut(pair) = Some(value);
        Ok(())
    }

    pub fn get(&self, pair: SettingPair) -> Result<f64> {
        let v = match pair {
            SettingPair::A1B1 => self.a1b1,
            SettingPair::A1B2 => self.a1b2,
            SettingPair::A2B1 => self.a2b1,
            SettingPair::A2B2 => self.a2b2,
        };
        let v = v.ok_or_else(|| validation(format!("correlation table is missing {pair}")))?;
        if !(v.is_finite() && v.abs() <= 1.0) {
            return Err(validation(format!(
                "correlation {pair} = {v} outside [-1, 1]"
            )));
        }
        Ok(v)
    }

    /// All four entries in pair order; errors if any is missing.
    pub fn values(&self) -> Result<[f64; 4]> {
        Ok([
            self.get(SettingPair::A1B1)?,
            self.get(SettingPair::A1B2)?,
            self.get(SettingPair::A2B1)?,
            self.get(SettingPair::A2B2)?,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn point_model(id: usize) -> HiddenVariableModel {
        let states = enumerate_deterministic_models();
        let mut p = vec![0.0; 16];
        p[id] = 1.0;
        HiddenVariableModel::deterministic(states, ConditionalDistribution::independent(p)).unwrap()
    }

    fn one_state(a: [f64; 2], b: [f64; 2]) -> HiddenVariableModel {
        HiddenVariableModel::new(
            vec![HiddenState {
                id: 0,
                strategy: None,
            }],
            ResponseTable {
                abar: [vec![a[0]], vec![a[1]]],
                bbar: [vec![b[0]], vec![b[1]]],
            },
            ConditionalDistribution::independent(vec![1.0]),
        )
        .unwrap()
    }

    #[test]
    fn state_expectation_examples() {
        // A(a1) = +1, B(b1) = -1: bits (0, *, 1, *) -> id 0b0010 = 2.
        let m = point_model(0b0010);
        assert_eq!(
            expectation_given_state(&m, &Setting::a(1), &Setting::b(1), 2).unwrap(),
            -1.0
        );

        let m = one_state([0.0, 1.0], [0.7, -0.3]);
        assert_eq!(
            expectation_given_state(&m, &Setting::a(1), &Setting::b(2), 0).unwrap(),
            0.0
        );

        let m = one_state([0.5, 1.0], [-0.5, 1.0]);
        assert_eq!(
            expectation_given_state(&m, &Setting::a(1), &Setting::b(1), 0).unwrap(),
            -0.25
        );
    }

    #[test]
    fn state_expectation_errors() {
        let m = point_model(0);
        assert!(matches!(
            expectation_given_state(&m, &Setting::a(1), &Setting::b(1), 99),
            Err(Error::Index(_))
        ));
        assert!(matches!(
            expectation_given_state(&m, &Setting::b(1), &Setting::b(1), 0),
            Err(Error::Index(_))
        ));
        assert!(Setting::new(Side::A, 3, None).is_err());
        assert!(Setting::new(Side::A, 1, Some(f64::NAN)).is_err());
    }

    #[test]
    fn uniform_mixture_has_zero_correlations() {
        // brute force over the 16 outcome tuples, independent of the model code
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let mut sum = 0.0;
            for bits in 0..16u32 {
                let v = |k: u32| {
                    if (bits >> (3 - k)) & 1 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                };
                sum += v(i) * v(2 + j) / 16.0;
            }
            assert_eq!(sum, 0.0);
        }
        let m = HiddenVariableModel::deterministic(
            enumerate_deterministic_models(),
            ConditionalDistribution::uniform(16),
        )
        .unwrap();
        for pair in SettingPair::ALL {
            let e = expectation(
                &m,
                &Setting::a(pair.a_slot() as u8 + 1),
                &Setting::b(pair.b_slot() as u8 + 1),
            )
            .unwrap();
            assert_abs_diff_eq!(e, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn point_distribution_matches_state_expectation() {
        for id in 0..16 {
            let m = point_model(id);
            for (a, b) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                let (sa, sb) = (Setting::a(a), Setting::b(b));
                assert_eq!(
                    expectation(&m, &sa, &sb).unwrap(),
                    expectation_given_state(&m, &sa, &sb, id).unwrap()
                );
            }
        }
    }

    #[test]
    fn unnormalized_distribution_is_rejected() {
        let mut m = point_model(0);
        m.dist.p[2][0] = 0.5;
        assert!(matches!(
            expectation(&m, &Setting::a(2), &Setting::b(1)),
            Err(Error::Validation(_))
        ));
        m.dist.p[2][0] = 1.0;
        m.dist.p[2][1] = -1e-3;
        assert!(m.validate().is_err());
    }

    #[test]
    fn every_deterministic_strategy_saturates_two() {
        // A1(B1 - B2) and A2(B2 + B1): exactly one of (B1 - B2), (B1 + B2) is ±2.
        for bits in 0..16u32 {
            let v = |k: u32| if (bits >> (3 - k)) & 1 == 0 { 1i32 } else { -1 };
            let first = v(0) * (v(2) - v(3));
            let second = v(1) * (v(3) + v(2));
            assert!((first == 0) ^ (second == 0));
            assert_eq!(first.abs() + second.abs(), 2);
        }
        for id in 0..16 {
            assert_eq!(chsh(&point_model(id)).unwrap(), 2.0);
        }
    }

    #[test]
    fn deterministic_enumeration() {
        let states = enumerate_deterministic_models();
        assert_eq!(states.len(), 16);
        let mut tuples: Vec<[i8; 4]> = states.iter().map(|s| s.strategy.unwrap()).collect();
        tuples.sort();
        tuples.dedup();
        assert_eq!(tuples.len(), 16);
        assert_eq!(states[0].strategy, Some([1, 1, 1, 1]));
    }

    #[test]
    fn chsh_from_table_examples() {
        assert_eq!(
            chsh_from_table(&CorrelationTable::new(1.0, 1.0, 1.0, 1.0).unwrap()).unwrap(),
            2.0
        );
        assert_eq!(
            chsh_from_table(&CorrelationTable::new(0.0, 0.0, 0.0, 0.0).unwrap()).unwrap(),
            0.0
        );
        let h = SQRT_2 / 2.0;
        let t = CorrelationTable::new(h, -h, -h, -h).unwrap();
        assert_abs_diff_eq!(chsh_from_table(&t).unwrap(), 2.0 * SQRT_2, epsilon = 1e-12);

        let mut partial = CorrelationTable::default();
        partial.set(SettingPair::A1B1, 0.2).unwrap();
        assert!(matches!(
            chsh_from_table(&partial),
            Err(Error::Validation(_))
        ));
        assert!(CorrelationTable::new(1.5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn singlet_examples() {
        assert_abs_diff_eq!(singlet_correlation(0.3, 0.3), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(singlet_correlation(FRAC_PI_2, 0.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(singlet_correlation(PI + 0.2, 0.2), 1.0, epsilon = 1e-12);
        let t = singlet_table(0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(chsh_from_table(&t).unwrap(), 2.0 * SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn si_check_examples() {
        let m = point_model(5);
        assert_eq!(is_si(&m, 0.0).unwrap(), (true, 0.0));

        let mut half = vec![0.0; 16];
        half[0] = 0.5;
        half[1] = 0.5;
        let mut m = HiddenVariableModel::deterministic(
            enumerate_deterministic_models(),
            ConditionalDistribution::independent(half),
        )
        .unwrap();
        m.dist.p[3][0] += 0.1;
        m.dist.p[3][1] -= 0.1;
        let (si, d) = is_si(&m, SI_TOL).unwrap();
        assert!(!si);
        assert_abs_diff_eq!(d, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn json_layout() {
        let m = point_model(0);
        let v = serde_json::to_value(&m).unwrap();
        for key in ["states", "abar", "bbar", "dist"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        for key in ["a1b1", "a1b2", "a2b1", "a2b2"] {
            assert!(v["dist"].get(key).is_some(), "missing dist.{key}");
        }
        let back: HiddenVariableModel = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
    }
}
