//! The 3×3 square of two-qubit Pauli observables and the search for a
//! noncontextual value assignment.
//!
//! Observables in each row commute, as do those in each column, so the
//! product of a row (or column) is itself an observable with a definite
//! value. Requiring `v(AB) = v(A)v(B)` along every row and column leaves no
//! consistent `±1` assignment: each cell enters two products, so the six
//! value products multiply to `+1`, while the six operator products
//! multiply to `−1`.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::linalg::{Matrix2, Matrix4};

/// Entrywise tolerance on derived matrix products.
pub const ALGEBRA_TOL: f64 = 1e-12;

pub type ComplexMatrix4 = Matrix4;

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSquare {
    pub ops: [[ComplexMatrix4; 3]; 3],
    pub labels: [[String; 3]; 3],
    /// Sign `s` with row product `= s·I`.
    pub row_targets: [i8; 3],
    pub col_targets: [i8; 3],
}

/// Sign of `m` as a multiple of the identity, with the entrywise deviation.
fn identity_sign(m: &Matrix4) -> (i8, f64) {
    let sign: i8 = if m.0[0][0].re >= 0.0 { 1 } else { -1 };
    let target = Matrix4::identity().scale(f64::from(sign).into());
    (sign, m.max_dev(&target))
}

fn row_product(ops: &[[Matrix4; 3]; 3], r: usize) -> Matrix4 {
    ops[r][0] * ops[r][1] * ops[r][2]
}

fn col_product(ops: &[[Matrix4; 3]; 3], c: usize) -> Matrix4 {
    ops[0][c] * ops[1][c] * ops[2][c]
}

impl OperatorSquare {
    /// Builds a square and computes its product targets from the matrices.
    /// Fails if some row or column product is not `±I`.
    pub fn from_ops(ops: [[Matrix4; 3]; 3], labels: [[String; 3]; 3]) -> Result<Self> {
        let mut row_targets = [0i8; 3];
        let mut col_targets = [0i8; 3];
        for k in 0..3 {
            let (s, dev) = identity_sign(&row_product(&ops, k));
            if dev > ALGEBRA_TOL {
                return Err(validation(format!(
                    "row {} product is not ±I (deviation {dev:e})",
                    k + 1
                )));
            }
            row_targets[k] = s;
            let (s, dev) = identity_sign(&col_product(&ops, k));
            if dev > ALGEBRA_TOL {
                return Err(validation(format!(
                    "column {} product is not ±I (deviation {dev:e})",
                    k + 1
                )));
            }
            col_targets[k] = s;
        }
        Ok(OperatorSquare {
            ops,
            labels,
            row_targets,
            col_targets,
        })
    }
}

/// The two-qubit square
///
/// ```text
/// I⊗σz   σz⊗I   σz⊗σz
/// σx⊗I   I⊗σx   σx⊗σx
/// σx⊗σz  σz⊗σx  σy⊗σy
/// ```
pub fn build_square() -> OperatorSquare {
    let (i, x, y, z) = (
        Matrix2::identity(),
        Matrix2::sigma_x(),
        Matrix2::sigma_y(),
        Matrix2::sigma_z(),
    );
    let table = [
        [(i, z, "I⊗σz"), (z, i, "σz⊗I"), (z, z, "σz⊗σz")],
        [(x, i, "σx⊗I"), (i, x, "I⊗σx"), (x, x, "σx⊗σx")],
        [(x, z, "σx⊗σz"), (z, x, "σz⊗σx"), (y, y, "σy⊗σy")],
    ];
    let ops = table.map(|row| row.map(|(a, b, _)| a.kron(&b)));
    let labels = table.map(|row| row.map(|(_, _, l)| l.to_string()));
    OperatorSquare::from_ops(ops, labels).expect("the Pauli square has ±I products")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    /// Largest entry of any within-row or within-column commutator.
    pub commutator_max: f64,
    pub hermitian_max_dev: f64,
    /// `max |A² − I|` over the nine entries (eigenvalues ±1).
    pub involution_max_dev: f64,
    /// Largest deviation of a row/column product from its target `±I`.
    pub target_max_dev: f64,
    pub commutators_checked: usize,
    pub row_targets: [i8; 3],
    pub col_targets: [i8; 3],
    pub violations: Vec<String>,
}

impl AlgebraReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the 18 commutators, hermiticity, `A² = I` and the product targets.
pub fn verify_algebra(sq: &OperatorSquare) -> AlgebraReport {
    let mut violations = Vec::new();
    let mut commutator_max: f64 = 0.0;
    let mut checked = 0;
    let lines: Vec<(String, [(usize, usize); 3])> = (0..3)
        .map(|r| (format!("row {}", r + 1), [(r, 0), (r, 1), (r, 2)]))
        .chain((0..3).map(|c| (format!("column {}", c + 1), [(0, c), (1, c), (2, c)])))
        .collect();
    for (name, cells) in &lines {
        for a in 0..3 {
            for b in a + 1..3 {
                let (p, q) = (cells[a], cells[b]);
                let dev = sq.ops[p.0][p.1].commutator(&sq.ops[q.0][q.1]).max_abs();
                checked += 1;
                commutator_max = commutator_max.max(dev);
                if dev > ALGEBRA_TOL {
                    violations.push(format!(
                        "{name}: [{}, {}] ≠ 0 (max entry {dev:e})",
                        sq.labels[p.0][p.1], sq.labels[q.0][q.1]
                    ));
                }
            }
        }
    }

    let mut hermitian_max_dev: f64 = 0.0;
    let mut involution_max_dev: f64 = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            let op = &sq.ops[r][c];
            let h = op.max_dev(&op.adjoint());
            let inv = (*op * *op).max_dev(&Matrix4::identity());
            hermitian_max_dev = hermitian_max_dev.max(h);
            involution_max_dev = involution_max_dev.max(inv);
            if h > ALGEBRA_TOL {
                violations.push(format!("{} is not Hermitian", sq.labels[r][c]));
            }
            if inv > ALGEBRA_TOL {
                violations.push(format!("{} does not square to I", sq.labels[r][c]));
            }
        }
    }

    let mut target_max_dev: f64 = 0.0;
    for k in 0..3 {
        for (what, prod, sign) in [
            ("row", row_product(&sq.ops, k), sq.row_targets[k]),
            ("column", col_product(&sq.ops, k), sq.col_targets[k]),
        ] {
            let dev = prod.max_dev(&Matrix4::identity().scale(f64::from(sign).into()));
            target_max_dev = target_max_dev.max(dev);
            if dev > ALGEBRA_TOL {
                violations.push(format!(
                    "{what} {} product differs from {sign:+}I by {dev:e}",
                    k + 1
                ));
            }
        }
    }

    AlgebraReport {
        commutator_max,
        hermitian_max_dev,
        involution_max_dev,
        target_max_dev,
        commutators_checked: checked,
        row_targets: sq.row_targets,
        col_targets: sq.col_targets,
        violations,
    }
}

/// Values `v[row][col] ∈ {−1, +1}` for the nine observables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub v: [[i8; 3]; 3],
}

impl Assignment {
    /// Cell `(r, c)` is `−1` when bit `3r + c` of `bits` is set.
    pub fn from_bits(bits: u16) -> Self {
        let mut v = [[1i8; 3]; 3];
        for (r, row) in v.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                if (bits >> (3 * r + c)) & 1 == 1 {
                    *cell = -1;
                }
            }
        }
        Assignment { v }
    }

    pub fn row_product(&self, r: usize) -> i8 {
        self.v[r].iter().product()
    }

    pub fn col_product(&self, c: usize) -> i8 {
        self.v.iter().map(|row| row[c]).product()
    }
}

/// Which row and column product constraints are enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub rows: [bool; 3],
    pub cols: [bool; 3],
}

impl ConstraintSet {
    pub const ALL: ConstraintSet = ConstraintSet {
        rows: [true; 3],
        cols: [true; 3],
    };
    pub const ROWS_ONLY: ConstraintSet = ConstraintSet {
        rows: [true; 3],
        cols: [false; 3],
    };
    pub const COLUMNS_ONLY: ConstraintSet = ConstraintSet {
        rows: [false; 3],
        cols: [true; 3],
    };

    pub fn satisfied_by(&self, sq: &OperatorSquare, a: &Assignment) -> bool {
        (0..3).all(|k| {
            (!self.rows[k] || a.row_product(k) == sq.row_targets[k])
                && (!self.cols[k] || a.col_product(k) == sq.col_targets[k])
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub examined: usize,
    pub consistent: usize,
    /// First consistent assignment in bit order, if any.
    pub witness: Option<Assignment>,
}

/// Tries all 512 assignments against the enforced product constraints.
pub fn exhaustive_value_search(sq: &OperatorSquare, constraints: &ConstraintSet) -> SearchResult {
    let mut consistent = 0;
    let mut witness = None;
    for bits in 0..512u16 {
        let a = Assignment::from_bits(bits);
        if constraints.satisfied_by(sq, &a) {
            consistent += 1;
            witness.get_or_insert(a);
        }
    }
    SearchResult {
        examined: 512,
        consistent,
        witness,
    }
}

/// The value functional composition demands for `AB`, given `v(A)` and
/// `v(B)`. Only defined for commuting `A` and `B`.
pub fn functional_composition_check(
    a: &ComplexMatrix4,
    b: &ComplexMatrix4,
    va: i8,
    vb: i8,
) -> Result<i8> {
    if va.abs() != 1 || vb.abs() != 1 {
        return Err(validation(format!("values {va}, {vb} are not ±1")));
    }
    let dev = a.commutator(b).max_abs();
    if dev > ALGEBRA_TOL {
        return Err(validation(format!(
            "observables do not commute (max commutator entry {dev:e})"
        )));
    }
    Ok(va * vb)
}

/// Summary written by the `ks-check` experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub commutator_max: f64,
    pub row_targets: [i8; 3],
    pub col_targets: [i8; 3],
    pub consistent_assignments: usize,
}

pub fn ks_report() -> KsReport {
    let sq = build_square();
    let alg = verify_algebra(&sq);
    KsReport {
        commutator_max: alg.commutator_max,
        row_targets: sq.row_targets,
        col_targets: sq.col_targets,
        consistent_assignments: exhaustive_value_search(&sq, &ConstraintSet::ALL).consistent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_entry_is_diagonal() {
        let sq = build_square();
        let m = sq.ops[0][0];
        for r in 0..4 {
            for c in 0..4 {
                let expected = if r == c {
                    [1.0, -1.0, 1.0, -1.0][r]
                } else {
                    0.0
                };
                assert_eq!(m.0[r][c].re, expected);
                assert_eq!(m.0[r][c].im, 0.0);
            }
        }
    }

    #[test]
    fn computed_targets() {
        let sq = build_square();
        assert_eq!(sq.row_targets, [1, 1, 1]);
        assert_eq!(sq.col_targets, [1, 1, -1]);
    }

    #[test]
    fn algebra_is_clean() {
        let report = verify_algebra(&build_square());
        assert!(report.is_consistent(), "{:?}", report.violations);
        assert_eq!(report.commutators_checked, 18);
        assert!(report.commutator_max < ALGEBRA_TOL);
    }

    #[test]
    fn corrupted_square_reports_commutator() {
        let mut sq = build_square();
        sq.ops[0][0] = Matrix2::sigma_x().kron(&Matrix2::identity());
        sq.labels[0][0] = "σx⊗I".into();
        let report = verify_algebra(&sq);
        assert!(report.commutator_max > 1.0);
        assert!(report.violations.iter().any(|v| v.starts_with("row 1")));
    }

    #[test]
    fn composition_examples() {
        let sq = build_square();
        let (a, b) = (sq.ops[0][0], sq.ops[0][1]);
        assert_eq!(functional_composition_check(&a, &b, 1, -1).unwrap(), -1);
        assert_eq!(functional_composition_check(&a, &b, -1, -1).unwrap(), 1);
        let x = Matrix2::sigma_x().kron(&Matrix2::identity());
        let y = Matrix2::sigma_y().kron(&Matrix2::identity());
        assert!(functional_composition_check(&x, &y, 1, 1).is_err());
    }

    #[test]
    fn search_counts() {
        let sq = build_square();
        assert_eq!(
            exhaustive_value_search(&sq, &ConstraintSet::ALL).consistent,
            0
        );
        assert_eq!(
            exhaustive_value_search(&sq, &ConstraintSet::ROWS_ONLY).consistent,
            64
        );

        let mut flipped = sq.clone();
        flipped.col_targets[2] = 1;
        let res = exhaustive_value_search(&flipped, &ConstraintSet::ALL);
        assert!(res.consistent > 0);
        assert_eq!(res.witness, Some(Assignment { v: [[1; 3]; 3] }));
    }

    #[test]
    fn report_json_keys() {
        let v = serde_json::to_value(ks_report()).unwrap();
        assert_eq!(v["consistent_assignments"], 0);
        assert_eq!(v["col_targets"], serde_json::json!([1, 1, -1]));
        assert!(v["commutator_max"].as_f64().unwrap() < 1e-12);
    }
}
