//! Euclidean projection onto a polyhedron given by variable bounds and
//! difference constraints `lo ≤ x[i] - x[j] ≤ hi`.
//!
//! [`solve_active_set`] is a dual active-set method for the identity Hessian:
//! it starts at the unconstrained minimizer (the center), repeatedly adds the
//! most violated constraint and drops constraints whose multipliers would turn
//! negative. Infeasibility shows up as a violated constraint that cannot be
//! added. [`solve_dykstra`] computes the same projection by Dykstra's
//! alternating projections and exists to cross-check the former.

use crate::rational::{to_f64, Rational};
use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum QpError {
    #[error("the constraint set is empty ({0})")]
    Infeasible(String),
    #[error("no convergence after {0} iterations")]
    MaxIterations(usize),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

/// `lo ≤ x[i] - x[j] ≤ hi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceConstraint {
    pub i: usize,
    pub j: usize,
    pub lo: f64,
    pub hi: f64,
}

/// Minimize `½‖x - center‖²` subject to bounds and difference constraints.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QpProblem {
    pub center: Vec<f64>,
    /// Optional `[lo, hi]` per variable; either end may be infinite.
    pub bounds: Vec<Option<(f64, f64)>>,
    pub difference_constraints: Vec<DifferenceConstraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Lower,
    Upper,
    /// `lo = hi`, handled as an equality.
    Both,
}

/// Identifies one side of a constraint of a [`QpProblem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintRef {
    Bound { var: usize, side: Side },
    Difference { index: usize, side: Side },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpSolution {
    pub point: Vec<f64>,
    /// Constraints in the final working set (active-set solver) or tight at
    /// the returned point (Dykstra).
    pub active_set: Vec<ConstraintRef>,
    /// Multipliers aligned with `active_set`; empty for Dykstra.
    pub multipliers: Vec<f64>,
    pub iterations: usize,
}

/// A single row `normal · x ≥ rhs` (or `=` when `equality`).
#[derive(Clone, Debug)]
struct Row {
    normal: Vec<(usize, f64)>,
    rhs: f64,
    equality: bool,
    /// Equality row used with the reversed normal.
    flipped: bool,
    source: ConstraintRef,
}

impl Row {
    fn value(&self, x: &[f64]) -> f64 {
        self.normal.iter().map(|&(i, a)| a * x[i]).sum()
    }

    fn norm(&self) -> f64 {
        self.normal.iter().map(|&(_, a)| a * a).sum::<f64>().sqrt()
    }

    fn dot_dense(&self, v: &[f64]) -> f64 {
        self.value(v)
    }

    fn dot_row(&self, other: &Row) -> f64 {
        let mut s = 0.0;
        for &(i, a) in &self.normal {
            for &(j, b) in &other.normal {
                if i == j {
                    s += a * b;
                }
            }
        }
        s
    }

    fn reversed(&self) -> Row {
        Row {
            normal: self.normal.iter().map(|&(i, a)| (i, -a)).collect(),
            rhs: -self.rhs,
            equality: self.equality,
            flipped: !self.flipped,
            source: self.source,
        }
    }
}

impl QpProblem {
    pub fn new(center: Vec<f64>) -> Self {
        let n = center.len();
        QpProblem {
            center,
            bounds: vec![None; n],
            difference_constraints: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.center.len()
    }

    /// Number of constraint sides (an equality counts once).
    pub fn constraint_count(&self) -> usize {
        self.rows().map(|r| r.len()).unwrap_or(0)
    }

    fn validate(&self) -> Result<(), QpError> {
        let n = self.n();
        if self.bounds.len() != n {
            return Err(QpError::InvalidProblem(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(QpError::InvalidProblem("center is not finite".into()));
        }
        for (var, b) in self.bounds.iter().enumerate() {
            if let Some((lo, hi)) = b {
                if lo.is_nan() || hi.is_nan() || lo > hi {
                    return Err(QpError::InvalidProblem(format!(
                        "bound of variable {var} has lo > hi"
                    )));
                }
            }
        }
        for (k, d) in self.difference_constraints.iter().enumerate() {
            if d.i >= n || d.j >= n || d.i == d.j {
                return Err(QpError::InvalidProblem(format!(
                    "difference constraint {k} has bad indices"
                )));
            }
            if d.lo.is_nan() || d.hi.is_nan() || d.lo > d.hi {
                return Err(QpError::InvalidProblem(format!(
                    "difference constraint {k} has lo > hi"
                )));
            }
        }
        Ok(())
    }

    fn rows(&self) -> Result<Vec<Row>, QpError> {
        self.validate()?;
        let mut rows = Vec::new();
        for (var, b) in self.bounds.iter().enumerate() {
            let Some((lo, hi)) = *b else { continue };
            let unit = vec![(var, 1.0)];
            push_sides(&mut rows, unit, lo, hi, |side| ConstraintRef::Bound {
                var,
                side,
            });
        }
        for (index, d) in self.difference_constraints.iter().enumerate() {
            let normal = vec![(d.i, 1.0), (d.j, -1.0)];
            push_sides(&mut rows, normal, d.lo, d.hi, |side| {
                ConstraintRef::Difference { index, side }
            });
        }
        Ok(rows)
    }

    /// Largest constraint violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (var, b) in self.bounds.iter().enumerate() {
            if let Some((lo, hi)) = *b {
                worst = worst.max(lo - x[var]).max(x[var] - hi);
            }
        }
        for d in &self.difference_constraints {
            let diff = x[d.i] - x[d.j];
            worst = worst.max(d.lo - diff).max(diff - d.hi);
        }
        worst
    }
}

fn push_sides(
    rows: &mut Vec<Row>,
    normal: Vec<(usize, f64)>,
    lo: f64,
    hi: f64,
    source: impl Fn(Side) -> ConstraintRef,
) {
    if lo == hi {
        rows.push(Row {
            normal,
            rhs: lo,
            equality: true,
            flipped: false,
            source: source(Side::Both),
        });
        return;
    }
    if lo.is_finite() {
        rows.push(Row {
            normal: normal.clone(),
            rhs: lo,
            equality: false,
            flipped: false,
            source: source(Side::Lower),
        });
    }
    if hi.is_finite() {
        rows.push(Row {
            normal: normal.iter().map(|&(i, a)| (i, -a)).collect(),
            rhs: -hi,
            equality: false,
            flipped: false,
            source: source(Side::Upper),
        });
    }
}

struct ActiveConstraint {
    row: Row,
    multiplier: f64,
}

/// Solves `(NᵀN) r = Nᵀ a` for the active normals `N`; returns `r` and the
/// component `z = a - N r` of `a` orthogonal to the active normals.
fn decompose(active: &[ActiveConstraint], target: &Row, n: usize) -> (Vec<f64>, Vec<f64>) {
    let k = active.len();
    let mut z = vec![0.0; n];
    for &(i, a) in &target.normal {
        z[i] += a;
    }
    if k == 0 {
        return (Vec::new(), z);
    }
    let gram = DMatrix::from_fn(k, k, |a, b| active[a].row.dot_row(&active[b].row));
    let rhs = DVector::from_fn(k, |a, _| active[a].row.dot_row(target));
    let r = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => gram.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(k)),
    };
    for (a, c) in active.iter().enumerate() {
        for &(i, coef) in &c.row.normal {
            z[i] -= r[a] * coef;
        }
    }
    (r.iter().copied().collect(), z)
}

/// Projects `p.center` onto the feasible polyhedron with a dual active-set
/// method. `tol` bounds the accepted constraint violation.
pub fn solve_active_set(p: &QpProblem, tol: f64) -> Result<QpSolution, QpError> {
    if !(tol > 0.0) {
        return Err(QpError::InvalidProblem("tolerance must be positive".into()));
    }
    let rows = p.rows()?;
    let n = p.n();
    let m = rows.len();
    let max_iterations = (10 * m * m).max(100);
    let mut x = p.center.clone();
    let mut active: Vec<ActiveConstraint> = Vec::new();
    let mut in_active = vec![false; m];
    let mut iterations = 0;

    loop {
        // Most violated constraint; equalities first.
        let mut chosen: Option<(usize, Row, f64)> = None;
        for (idx, row) in rows.iter().enumerate() {
            if in_active[idx] {
                continue;
            }
            let slack = (row.value(&x) - row.rhs) / row.norm();
            let (oriented, violation) = if row.equality && slack > 0.0 {
                (row.reversed(), slack)
            } else {
                (row.clone(), -slack)
            };
            if violation <= tol {
                continue;
            }
            let better = match &chosen {
                None => true,
                Some((best_idx, _, best_violation)) => {
                    let best_eq = rows[*best_idx].equality;
                    (row.equality && !best_eq)
                        || (row.equality == best_eq && violation > *best_violation)
                }
            };
            if better {
                chosen = Some((idx, oriented, violation));
            }
        }
        let Some((p_idx, p_row, _)) = chosen else {
            break;
        };

        let mut added_multiplier = 0.0;
        loop {
            iterations += 1;
            if iterations > max_iterations {
                return Err(QpError::MaxIterations(iterations - 1));
            }
            let (r, z) = decompose(&active, &p_row, n);
            let z_dot_n = p_row.dot_dense(&z);
            let full_step = if z_dot_n > 1e-12 * p_row.norm().powi(2) {
                let slack = p_row.value(&x) - p_row.rhs;
                Some((-slack / z_dot_n).max(0.0))
            } else {
                None
            };
            let mut partial: Option<(usize, f64)> = None;
            for (a, c) in active.iter().enumerate() {
                if c.row.equality || r[a] <= 1e-14 {
                    continue;
                }
                let t = c.multiplier / r[a];
                if partial.is_none_or(|(_, best)| t < best) {
                    partial = Some((a, t));
                }
            }
            match (full_step, partial) {
                (None, None) => {
                    return Err(QpError::Infeasible(format!(
                        "{:?} cannot be satisfied together with the active constraints",
                        p_row.source
                    )));
                }
                (Some(t), partial) if partial.is_none_or(|(_, tp)| t <= tp) => {
                    for (i, zi) in z.iter().enumerate() {
                        x[i] += t * zi;
                    }
                    for (a, c) in active.iter_mut().enumerate() {
                        c.multiplier -= t * r[a];
                    }
                    added_multiplier += t;
                    in_active[p_idx] = true;
                    active.push(ActiveConstraint {
                        row: p_row.clone(),
                        multiplier: added_multiplier,
                    });
                    break;
                }
                (full, Some((drop, t))) => {
                    if full.is_some() {
                        for (i, zi) in z.iter().enumerate() {
                            x[i] += t * zi;
                        }
                    }
                    for (a, c) in active.iter_mut().enumerate() {
                        c.multiplier -= t * r[a];
                    }
                    added_multiplier += t;
                    let removed = active.remove(drop);
                    let removed_idx = rows
                        .iter()
                        .position(|row| row.source == removed.row.source)
                        .expect("active rows come from the problem");
                    in_active[removed_idx] = false;
                }
                (Some(_), None) => unreachable!("handled by the full-step arm"),
            }
        }
    }

    Ok(QpSolution {
        point: x,
        active_set: active.iter().map(|c| c.row.source).collect(),
        multipliers: active
            .iter()
            .map(|c| {
                if c.row.flipped {
                    -c.multiplier
                } else {
                    c.multiplier
                }
            })
            .collect(),
        iterations,
    })
}

/// Projects `p.center` by Dykstra's alternating projections over the
/// individual bound intervals and difference slabs.
pub fn solve_dykstra(p: &QpProblem, tol: f64, max_iter: usize) -> Result<QpSolution, QpError> {
    p.validate()?;
    let mut x = p.center.clone();

    enum Set {
        Interval {
            var: usize,
            lo: f64,
            hi: f64,
        },
        Slab {
            i: usize,
            j: usize,
            lo: f64,
            hi: f64,
        },
    }
    let mut sets = Vec::new();
    for (var, b) in p.bounds.iter().enumerate() {
        if let Some((lo, hi)) = *b {
            sets.push(Set::Interval { var, lo, hi });
        }
    }
    for d in &p.difference_constraints {
        sets.push(Set::Slab {
            i: d.i,
            j: d.j,
            lo: d.lo,
            hi: d.hi,
        });
    }
    // Dykstra increments, two coordinates per set at most.
    let mut increments = vec![[0.0f64; 2]; sets.len()];

    let mut sweeps = 0;
    while sweeps < max_iter {
        sweeps += 1;
        let mut change: f64 = 0.0;
        for (set, inc) in sets.iter().zip(increments.iter_mut()) {
            match *set {
                Set::Interval { var, lo, hi } => {
                    let w = x[var] + inc[0];
                    let projected = w.clamp(lo, hi);
                    inc[0] = w - projected;
                    change = change.max((projected - x[var]).abs());
                    x[var] = projected;
                }
                Set::Slab { i, j, lo, hi } => {
                    let wi = x[i] + inc[0];
                    let wj = x[j] + inc[1];
                    let d = wi - wj;
                    let shift = if d < lo {
                        (lo - d) / 2.0
                    } else if d > hi {
                        (hi - d) / 2.0
                    } else {
                        0.0
                    };
                    let pi = wi + shift;
                    let pj = wj - shift;
                    inc[0] = wi - pi;
                    inc[1] = wj - pj;
                    change = change.max((pi - x[i]).abs()).max((pj - x[j]).abs());
                    x[i] = pi;
                    x[j] = pj;
                }
            }
        }
        if change <= tol && p.max_violation(&x) <= tol.max(1e-12) {
            let active_set = tight_constraints(p, &x, 1e-9);
            return Ok(QpSolution {
                point: x,
                active_set,
                multipliers: Vec::new(),
                iterations: sweeps,
            });
        }
    }
    Err(QpError::MaxIterations(sweeps))
}

fn tight_constraints(p: &QpProblem, x: &[f64], tol: f64) -> Vec<ConstraintRef> {
    let mut out = Vec::new();
    if let Ok(rows) = p.rows() {
        for row in rows {
            if (row.value(x) - row.rhs).abs() <= tol {
                out.push(row.source);
            }
        }
    }
    out
}

/// `lo ≤ x[i] - x[j] ≤ hi` with exact bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDifference {
    pub i: usize,
    pub j: usize,
    pub lo: Rational,
    pub hi: Rational,
}

/// A [`QpProblem`] with rational data, whose projection is rational too.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactQpProblem {
    pub center: Vec<Rational>,
    pub bounds: Vec<Option<(Rational, Rational)>>,
    pub difference_constraints: Vec<ExactDifference>,
}

/// Sparse row `normal · x ≥ rhs` (or `=`) in rationals.
struct ExactRow {
    normal: Vec<(usize, i64)>,
    rhs: Rational,
    equality: bool,
}

impl ExactRow {
    fn value(&self, x: &[Rational]) -> Rational {
        self.normal
            .iter()
            .map(|&(i, a)| &x[i] * Rational::from_integer(a.into()))
            .sum()
    }
}

impl ExactQpProblem {
    pub fn to_f64(&self) -> QpProblem {
        QpProblem {
            center: self.center.iter().map(to_f64).collect(),
            bounds: self
                .bounds
                .iter()
                .map(|b| b.as_ref().map(|(lo, hi)| (to_f64(lo), to_f64(hi))))
                .collect(),
            difference_constraints: self
                .difference_constraints
                .iter()
                .map(|d| DifferenceConstraint {
                    i: d.i,
                    j: d.j,
                    lo: to_f64(&d.lo),
                    hi: to_f64(&d.hi),
                })
                .collect(),
        }
    }

    fn row(&self, c: ConstraintRef) -> Option<ExactRow> {
        let (normal, lo, hi) = match c {
            ConstraintRef::Bound { var, .. } => {
                let (lo, hi) = self.bounds.get(var)?.as_ref()?;
                (vec![(var, 1)], lo, hi)
            }
            ConstraintRef::Difference { index, .. } => {
                let d = self.difference_constraints.get(index)?;
                (vec![(d.i, 1), (d.j, -1)], &d.lo, &d.hi)
            }
        };
        let side = match c {
            ConstraintRef::Bound { side, .. } | ConstraintRef::Difference { side, .. } => side,
        };
        Some(match side {
            Side::Lower => ExactRow {
                normal,
                rhs: lo.clone(),
                equality: false,
            },
            Side::Upper => ExactRow {
                normal: normal.into_iter().map(|(i, a)| (i, -a)).collect(),
                rhs: -hi.clone(),
                equality: false,
            },
            Side::Both => ExactRow {
                normal,
                rhs: lo.clone(),
                equality: true,
            },
        })
    }

    fn feasible(&self, x: &[Rational]) -> bool {
        let bounds_ok = self.bounds.iter().enumerate().all(|(var, b)| {
            b.as_ref()
                .is_none_or(|(lo, hi)| lo <= &x[var] && &x[var] <= hi)
        });
        bounds_ok
            && self.difference_constraints.iter().all(|d| {
                let diff = &x[d.i] - &x[d.j];
                d.lo <= diff && diff <= d.hi
            })
    }

    /// The exact projection of `center`, assuming `working_set` holds with
    /// equality at the optimum. Returns `None` unless the resulting point is
    /// feasible and every inequality multiplier is nonnegative, i.e. unless
    /// it is provably the optimum.
    pub fn exact_solution(&self, working_set: &[ConstraintRef]) -> Option<Vec<Rational>> {
        let rows: Vec<ExactRow> = working_set
            .iter()
            .map(|&c| self.row(c))
            .collect::<Option<_>>()?;
        let k = rows.len();
        let gram: Vec<Vec<Rational>> = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| {
                        let mut s = 0i64;
                        for &(i, p) in &rows[a].normal {
                            for &(j, q) in &rows[b].normal {
                                if i == j {
                                    s += p * q;
                                }
                            }
                        }
                        Rational::from_integer(s.into())
                    })
                    .collect()
            })
            .collect();
        let rhs: Vec<Rational> = rows
            .iter()
            .map(|r| &r.rhs - r.value(&self.center))
            .collect();
        let lambda = solve_linear(gram, rhs)?;
        let mut x = self.center.clone();
        for (row, l) in rows.iter().zip(&lambda) {
            for &(i, a) in &row.normal {
                x[i] += l * Rational::from_integer(a.into());
            }
        }
        let signs_ok = rows
            .iter()
            .zip(&lambda)
            .all(|(r, l)| r.equality || !l.is_negative());
        (signs_ok && self.feasible(&x)).then_some(x)
    }
}

/// Gaussian elimination with exact arithmetic; `None` if singular.
fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Stationarity residual `‖x - center - Σ λ a‖∞` of an active-set solution,
/// where `a` is the normal of each active row written as `a · x ≥ b`.
pub fn kkt_residual(p: &QpProblem, solution: &QpSolution) -> f64 {
    let Ok(rows) = p.rows() else {
        return f64::INFINITY;
    };
    let mut grad: Vec<f64> = solution
        .point
        .iter()
        .zip(&p.center)
        .map(|(x, c)| x - c)
        .collect();
    for (source, lambda) in solution.active_set.iter().zip(&solution.multipliers) {
        let Some(row) = rows.iter().find(|r| r.source == *source) else {
            return f64::INFINITY;
        };
        for &(i, a) in &row.normal {
            grad[i] -= lambda * a;
        }
    }
    grad.iter().fold(0.0, |acc, g| acc.max(g.abs()))
}
