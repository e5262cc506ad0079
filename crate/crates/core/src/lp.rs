//! Dense two-phase simplex for small linear programs.
//!
//! Problems here have at most a few hundred rows and columns, so the solver
//! keeps a full tableau. Pivoting follows Bland's rule (lowest eligible
//! entering index, lowest basic index among tied leaving rows), which rules
//! out cycling and makes the pivot sequence a pure function of the input.
//! After phase 2 the basic solution is recomputed from the original
//! constraint matrix with partial-pivoting elimination, so roundoff from the
//! pivot sequence does not leak into the reported point.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const FEASIBILITY_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// `optimize cᵀx  s.t.  A_eq x = b_eq,  A_le x ≤ b_le,  x ≥ lower`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub eq_matrix: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub le_matrix: Vec<Vec<f64>>,
    pub le_rhs: Vec<f64>,
    pub lower_bounds: Vec<f64>,
}

impl LinearProgram {
    /// A program over `objective.len()` variables, all bounded below by zero.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            eq_matrix: Vec::new(),
            eq_rhs: Vec::new(),
            le_matrix: Vec::new(),
            le_rhs: Vec::new(),
            lower_bounds: vec![0.0; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn equality(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.eq_matrix.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn less_equal(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.le_matrix.push(row);
        self.le_rhs.push(rhs);
        self
    }

    pub fn greater_equal(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.less_equal(row.into_iter().map(|v| -v).collect(), -rhs)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(validation("linear program has no variables"));
        }
        if self.eq_matrix.len() != self.eq_rhs.len() {
            return Err(validation("equality matrix and rhs lengths differ"));
        }
        if self.le_matrix.len() != self.le_rhs.len() {
            return Err(validation("inequality matrix and rhs lengths differ"));
        }
        if self.lower_bounds.len() != n {
            return Err(validation(format!(
                "{} lower bounds for {n} variables",
                self.lower_bounds.len()
            )));
        }
        for (kind, rows) in [
            ("equality", &self.eq_matrix),
            ("inequality", &self.le_matrix),
        ] {
            if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                return Err(validation(format!(
                    "{kind} row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        let all = self
            .objective
            .iter()
            .chain(self.eq_rhs.iter())
            .chain(self.le_rhs.iter())
            .chain(self.lower_bounds.iter())
            .chain(self.eq_matrix.iter().flatten())
            .chain(self.le_matrix.iter().flatten());
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(validation("linear program has a non-finite entry"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// The optimal point; empty unless `status` is optimal.
    pub x: Vec<f64>,
    /// Objective value in the program's own sense; NaN unless optimal.
    pub objective: f64,
    pub pivots: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, pivots: usize) -> Self {
        LpSolution {
            status,
            x: Vec::new(),
            objective: f64::NAN,
            pivots,
        }
    }
}

/// Solves `lp`, returning an optimal basic feasible solution or the
/// infeasible/unbounded verdict.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    Tableau::build(lp).solve(lp)
}

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_struct: usize,
    n_slack: usize,
    n_art: usize,
    /// Shifted, sign-normalized original rows, kept for the final re-solve.
    orig: Vec<Vec<f64>>,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let n_slack = lp.le_matrix.len();
        let shift = |row: &[f64], rhs: f64| {
            rhs - row
                .iter()
                .zip(&lp.lower_bounds)
                .map(|(a, l)| a * l)
                .sum::<f64>()
        };

        // (coefficients, slack column, rhs)
        let mut raw: Vec<(Vec<f64>, Option<usize>, f64)> = Vec::new();
        for (row, &rhs) in lp.eq_matrix.iter().zip(&lp.eq_rhs) {
            raw.push((row.clone(), None, shift(row, rhs)));
        }
        for (k, (row, &rhs)) in lp.le_matrix.iter().zip(&lp.le_rhs).enumerate() {
            raw.push((row.clone(), Some(n + k), shift(row, rhs)));
        }

        let n_art = raw
            .iter()
            .filter(|(_, slack, rhs)| slack.is_none() || *rhs < 0.0)
            .count();
        let width = n + n_slack + n_art + 1;
        let mut rows = Vec::with_capacity(raw.len());
        let mut basis = Vec::with_capacity(raw.len());
        let mut next_art = n + n_slack;
        for (coef, slack, rhs) in raw {
            let mut row = vec![0.0; width];
            row[..n].copy_from_slice(&coef);
            if let Some(s) = slack {
                row[s] = 1.0;
            }
            row[width - 1] = rhs;
            if rhs < 0.0 {
                row.iter_mut().for_each(|v| *v = -*v);
            }
            match slack {
                Some(s) if rhs >= 0.0 => basis.push(s),
                _ => {
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }
        let orig = rows
            .iter()
            .map(|r| {
                let mut o = r[..n + n_slack].to_vec();
                o.push(r[width - 1]);
                o
            })
            .collect();
        Tableau {
            rows,
            basis,
            n_struct: n,
            n_slack,
            n_art,
            orig,
            pivots: 0,
        }
    }

    fn width(&self) -> usize {
        self.n_struct + self.n_slack + self.n_art
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.n_struct + self.n_slack
    }

    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width()]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                for (dj, a) in d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    /// Minimizes `cost` over the current basis. Returns `false` when unbounded.
    fn optimize(&mut self, cost: &[f64], allow_artificial: bool) -> Result<bool> {
        let scale = cost.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if scale == 0.0 {
            return Ok(true);
        }
        let tol = COST_TOL * scale;
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(Error::Solver(format!("pivot limit {MAX_PIVOTS} reached")));
            }
            let d = self.reduced_costs(cost);
            let entering = (0..self.width())
                .filter(|&j| allow_artificial || !self.is_artificial(j))
                .find(|&j| d[j] < -tol);
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-12
                            || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li])
                        {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Ok(false),
            }
        }
    }

    fn solve(mut self, lp: &LinearProgram) -> Result<LpSolution> {
        let width = self.width();
        let mut redundant = vec![false; self.rows.len()];

        if self.n_art > 0 {
            let cost: Vec<f64> = (0..width)
                .map(|j| if self.is_artificial(j) { 1.0 } else { 0.0 })
                .collect();
            if !self.optimize(&cost, true)? {
                return Err(Error::Solver("phase 1 reported unbounded".into()));
            }
            let infeasibility: f64 = self
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| self.is_artificial(b))
                .map(|(i, _)| self.rhs(i))
                .sum();
            let rhs_scale = self
                .orig
                .iter()
                .map(|r| r[r.len() - 1].abs())
                .fold(1.0, f64::max);
            if infeasibility > FEASIBILITY_TOL * rhs_scale {
                return Ok(LpSolution::without_point(LpStatus::Infeasible, self.pivots));
            }
            for i in 0..self.rows.len() {
                if !self.is_artificial(self.basis[i]) {
                    continue;
                }
                let col =
                    (0..self.n_struct + self.n_slack).find(|&j| self.rows[i][j].abs() > PIVOT_TOL);
                match col {
                    Some(j) => self.pivot(i, j),
                    None => redundant[i] = true,
                }
            }
        }

        let sign = match lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut cost = vec![0.0; width];
        for (c, &o) in cost.iter_mut().zip(&lp.objective) {
            *c = sign * o;
        }
        if !self.optimize(&cost, false)? {
            return Ok(LpSolution::without_point(LpStatus::Unbounded, self.pivots));
        }

        let y = self.resolve_basis(&redundant)?;
        let x: Vec<f64> = y[..self.n_struct]
            .iter()
            .zip(&lp.lower_bounds)
            .map(|(v, l)| v + l)
            .collect();
        let objective = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            objective,
            pivots: self.pivots,
        })
    }

    /// Solves `B y_B = b` on the original rows for the final basis.
    fn resolve_basis(&self, redundant: &[bool]) -> Result<Vec<f64>> {
        let cols = self.n_struct + self.n_slack;
        let keep: Vec<usize> = (0..self.rows.len()).filter(|&i| !redundant[i]).collect();
        let basic: Vec<usize> = keep.iter().map(|&i| self.basis[i]).collect();
        let m = keep.len();
        let mut a: Vec<Vec<f64>> = keep
            .iter()
            .map(|&i| {
                let mut row: Vec<f64> = basic.iter().map(|&b| self.orig[i][b]).collect();
                row.push(self.orig[i][cols]);
                row
            })
            .collect();
        for k in 0..m {
            let p = (k..m)
                .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
                .expect("non-empty pivot range");
            if a[p][k].abs() < 1e-14 {
                return Err(Error::Solver("final basis is singular".into()));
            }
            a.swap(k, p);
            for i in k + 1..m {
                let f = a[i][k] / a[k][k];
                if f != 0.0 {
                    for j in k..=m {
                        a[i][j] -= f * a[k][j];
                    }
                }
            }
        }
        let mut sol = vec![0.0; m];
        for k in (0..m).rev() {
            let s: f64 = (k + 1..m).map(|j| a[k][j] * sol[j]).sum();
            sol[k] = (a[k][m] - s) / a[k][k];
        }
        let mut y = vec![0.0; cols];
        for (b, v) in basic.into_iter().zip(sol) {
            y[b] = v;
        }
        Ok(y)
    }
}
