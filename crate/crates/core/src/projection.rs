//! Projection of a Llull matrix onto matrices whose score pattern is
//! consistent with an admissible order: intermediate margins, the turnout
//! QP, score intervals and projected scores.

use crate::closure::{variant_margins, ClosureError, IndirectScores, Variant, VariantMargins};
use crate::llull::{LlullError, LlullMatrix, TurnoutMatrix};
use crate::matrix::SquareMatrix;
use crate::order::{admissible_order, copeland_ranks, AdmissibleOrder, OrderError};
use crate::qp::{
    solve_active_set, ExactDifference, ExactQpProblem, QpError, QpProblem, QpSolution,
    DEFAULT_TOLERANCE,
};
use crate::rational::{to_f64, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Gap tolerated between consecutive intervals when forming unions.
const OVERLAP_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ProjectionError {
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("turnout projection failed: {0}")]
    Qp(#[from] QpError),
    #[error(transparent)]
    Llull(#[from] LlullError),
}

/// `m^σ[x][y] = min { m[p][q] : p ⪯ x, y ⪯ q }` for `x` before `y`,
/// extended antisymmetrically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntermediateMargins {
    pub msigma: SquareMatrix<Rational>,
    /// The order the rectangle minima were taken over.
    pub order: Vec<usize>,
}

impl IntermediateMargins {
    /// `m^σ` between consecutive candidates of the order.
    pub fn superdiagonal(&self) -> Vec<Rational> {
        self.order
            .windows(2)
            .map(|w| self.msigma[(w[0], w[1])].clone())
            .collect()
    }
}

pub fn intermediate_margins(
    margins: &VariantMargins,
    order: &AdmissibleOrder,
) -> IntermediateMargins {
    let n = margins.n();
    let seq = &order.sequence;
    // Positional table: best[i][j] = min over i' ≤ i, j' ≥ j of M[i'][j'].
    let mut best: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    for i in 0..n {
        for j in (i + 1..n).rev() {
            let mut value = margins.get(seq[i], seq[j]).clone();
            if i > 0 {
                if let Some(up) = &best[i - 1][j] {
                    value = value.min(up.clone());
                }
            }
            if j + 1 < n {
                if let Some(right) = &best[i][j + 1] {
                    value = value.min(right.clone());
                }
            }
            best[i][j] = Some(value);
        }
    }
    let mut msigma = SquareMatrix::filled(n, Rational::zero());
    for i in 0..n {
        for j in i + 1..n {
            let value = best[i][j].clone().expect("filled above");
            msigma[(seq[j], seq[i])] = -value.clone();
            msigma[(seq[i], seq[j])] = value;
        }
    }
    IntermediateMargins {
        msigma,
        order: seq.clone(),
    }
}

/// Symmetric projected turnouts `τ^σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedTurnouts {
    pub tsigma: SquareMatrix<f64>,
    pub solution: QpSolution,
}

/// Unordered pairs in the QP variable layout: positions `(i, j)`, `i < j`,
/// listed row by row along the order.
fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// The turnout QP with exact data: variables are the unordered pairs,
/// listed by position in the order (`(0,1), (0,2), …, (1,2), …`).
pub fn exact_turnout_problem(turnouts: &TurnoutMatrix, im: &IntermediateMargins) -> ExactQpProblem {
    let seq = &im.order;
    let n = seq.len();
    let mut center = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            center.push(turnouts.0[(seq[i], seq[j])].clone());
        }
    }
    let mut p = ExactQpProblem {
        bounds: vec![None; center.len()],
        center,
        difference_constraints: Vec::new(),
    };
    for (i, ms) in im.superdiagonal().into_iter().enumerate() {
        p.bounds[pair_index(n, i, i + 1)] = Some((ms.clone(), Rational::one()));
        for z in (0..n).filter(|&z| z != i && z != i + 1) {
            p.difference_constraints.push(ExactDifference {
                i: pair_index(n, i, z),
                j: pair_index(n, i + 1, z),
                lo: Rational::zero(),
                hi: ms.clone(),
            });
        }
    }
    p
}

pub fn turnout_problem(turnouts: &TurnoutMatrix, im: &IntermediateMargins) -> QpProblem {
    exact_turnout_problem(turnouts, im).to_f64()
}

pub fn project_turnouts(
    turnouts: &TurnoutMatrix,
    im: &IntermediateMargins,
    tol: f64,
) -> Result<ProjectedTurnouts, QpError> {
    let p = turnout_problem(turnouts, im);
    let solution = solve_active_set(&p, tol)?;
    let seq = &im.order;
    let n = seq.len();
    let mut tsigma = SquareMatrix::filled(n, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let value = solution.point[pair_index(n, i, j)];
            tsigma[(seq[i], seq[j])] = value;
            tsigma[(seq[j], seq[i])] = value;
        }
    }
    Ok(ProjectedTurnouts { tsigma, solution })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ScoreInterval {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }
}

/// `γ = [(τ - m)/2, (τ + m)/2]` for each consecutive pair of the order.
pub fn build_intervals(pt: &ProjectedTurnouts, im: &IntermediateMargins) -> Vec<ScoreInterval> {
    im.order
        .windows(2)
        .map(|w| {
            let tau = pt.tsigma[(w[0], w[1])];
            let m = to_f64(&im.msigma[(w[0], w[1])]);
            ScoreInterval {
                lo: (tau - m) / 2.0,
                hi: (tau + m) / 2.0,
            }
        })
        .collect()
}

/// Projected scores `π`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectedMatrix {
    pub pi: SquareMatrix<f64>,
}

impl ProjectedMatrix {
    pub fn n(&self) -> usize {
        self.pi.n()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pi[(x, y)]
    }

    pub fn margins(&self) -> SquareMatrix<f64> {
        SquareMatrix::from_fn(self.n(), |x, y| self.pi[(x, y)] - self.pi[(y, x)])
    }

    pub fn turnouts(&self) -> SquareMatrix<f64> {
        SquareMatrix::from_fn(self.n(), |x, y| {
            if x == y {
                0.0
            } else {
                self.pi[(x, y)] + self.pi[(y, x)]
            }
        })
    }

    /// The scores as an exact Llull matrix, so they can be fed back in.
    pub fn to_llull(&self, tolerance: f64) -> Result<LlullMatrix, LlullError> {
        LlullMatrix::from_relative_f64(&self.pi, tolerance)
    }
}

/// Chained max/min over consecutive intervals: for positions `i < j`,
/// `π[x_i][x_j] = max hi` and `π[x_j][x_i] = min lo` over `i..j`.
pub fn projected_scores(intervals: &[ScoreInterval], order: &[usize]) -> ProjectedMatrix {
    let n = order.len();
    assert_eq!(
        intervals.len(),
        n.saturating_sub(1),
        "one interval per consecutive pair"
    );
    let mut pi = SquareMatrix::filled(n, 0.0);
    for i in 0..n {
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for j in i + 1..n {
            hi = hi.max(intervals[j - 1].hi);
            lo = lo.min(intervals[j - 1].lo);
            pi[(order[i], order[j])] = hi;
            pi[(order[j], order[i])] = lo;
        }
    }
    let result = ProjectedMatrix { pi };
    assert_eq!(
        result,
        projected_scores_by_union(intervals, order),
        "chained max/min disagrees with the interval unions"
    );
    result
}

/// Union of closed intervals as disjoint sorted components, merging gaps up
/// to `slack`.
pub fn interval_union(intervals: &[ScoreInterval], slack: f64) -> Vec<ScoreInterval> {
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    let mut out: Vec<ScoreInterval> = Vec::new();
    for iv in sorted {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi + slack => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    out
}

/// Projected scores as the endpoints of `γ[x][y] = ∪ γ` over the chain from
/// `x` to `y`. Panics if a union is not an interval.
pub fn projected_scores_by_union(intervals: &[ScoreInterval], order: &[usize]) -> ProjectedMatrix {
    let n = order.len();
    let mut pi = SquareMatrix::filled(n, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let union = interval_union(&intervals[i..j], OVERLAP_SLACK);
            assert_eq!(union.len(), 1, "intervals {i}..{j} do not overlap");
            pi[(order[i], order[j])] = union[0].hi;
            pi[(order[j], order[i])] = union[0].lo;
        }
    }
    ProjectedMatrix { pi }
}

/// Every intermediate result of the projection.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub variant: Variant,
    /// The matrix actually projected: the input, or its margin completion.
    pub base: LlullMatrix,
    pub indirect: IndirectScores,
    pub margins: VariantMargins,
    pub copeland: Vec<Rational>,
    pub order: AdmissibleOrder,
    pub intermediate: IntermediateMargins,
    pub turnouts: ProjectedTurnouts,
    pub intervals: Vec<ScoreInterval>,
    pub projected: ProjectedMatrix,
}

impl Projection {
    /// Runs the projection, with the tie-split Copeland order unless
    /// `order` is given.
    pub fn compute(
        llull: &LlullMatrix,
        variant: Variant,
        order: Option<Vec<usize>>,
        tol: f64,
    ) -> Result<Projection, ProjectionError> {
        let indirect = IndirectScores::compute(llull, variant);
        let margins = variant_margins(&indirect, variant)?;
        let base = if variant == Variant::MarginBased {
            llull.margin_completed()
        } else {
            llull.clone()
        };
        let copeland = copeland_ranks(&margins);
        let order = match order {
            Some(seq) => AdmissibleOrder::new(seq, &margins)?,
            None => admissible_order(&margins)?,
        };
        let intermediate = intermediate_margins(&margins, &order);
        let turnouts = project_turnouts(&base.turnouts(), &intermediate, tol)?;
        let intervals = build_intervals(&turnouts, &intermediate);
        let projected = projected_scores(&intervals, &order.sequence);
        Ok(Projection {
            variant,
            base,
            indirect,
            margins,
            copeland,
            order,
            intermediate,
            turnouts,
            intervals,
            projected,
        })
    }
}

/// Exact rational versions of the projected turnouts and scores.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactProjection {
    pub tsigma: SquareMatrix<Rational>,
    /// `(lo, hi)` per consecutive pair of the order.
    pub intervals: Vec<(Rational, Rational)>,
    pub pi: SquareMatrix<Rational>,
}

impl Projection {
    /// Re-solves the turnout QP in rationals on the final working set of the
    /// floating-point solver. `None` if that working set does not certify an
    /// exact optimum.
    pub fn exact(&self) -> Option<ExactProjection> {
        let problem = exact_turnout_problem(&self.base.turnouts(), &self.intermediate);
        let point = problem.exact_solution(&self.turnouts.solution.active_set)?;
        let seq = &self.order.sequence;
        let n = seq.len();
        let mut tsigma = SquareMatrix::filled(n, Rational::zero());
        for i in 0..n {
            for j in i + 1..n {
                let value = point[pair_index(n, i, j)].clone();
                tsigma[(seq[j], seq[i])] = value.clone();
                tsigma[(seq[i], seq[j])] = value;
            }
        }
        let two = Rational::from_integer(2.into());
        let intervals: Vec<(Rational, Rational)> = seq
            .windows(2)
            .map(|w| {
                let tau = &tsigma[(w[0], w[1])];
                let m = &self.intermediate.msigma[(w[0], w[1])];
                ((tau - m) / &two, (tau + m) / &two)
            })
            .collect();
        let mut pi = SquareMatrix::filled(n, Rational::zero());
        for i in 0..n {
            let mut hi: Option<Rational> = None;
            let mut lo: Option<Rational> = None;
            for j in i + 1..n {
                let (l, h) = &intervals[j - 1];
                let h = hi.map_or(h.clone(), |v| v.max(h.clone()));
                let l = lo.map_or(l.clone(), |v| v.min(l.clone()));
                pi[(seq[i], seq[j])] = h.clone();
                pi[(seq[j], seq[i])] = l.clone();
                hi = Some(h);
                lo = Some(l);
            }
        }
        Some(ExactProjection {
            tsigma,
            intervals,
            pi,
        })
    }
}

pub fn project(llull: &LlullMatrix, variant: Variant) -> Result<ProjectedMatrix, ProjectionError> {
    Projection::compute(llull, variant, None, DEFAULT_TOLERANCE).map(|p| p.projected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn vm(rows: &[&[i64]]) -> VariantMargins {
        VariantMargins {
            m: SquareMatrix::from_fn(rows.len(), |x, y| int(rows[x][y])),
            variant: Variant::Main,
        }
    }

    #[test]
    fn pair_layout_is_dense() {
        let n = 5;
        let mut seen = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                seen.push(pair_index(n, i, j));
                assert_eq!(pair_index(n, i, j), pair_index(n, j, i));
            }
        }
        assert_eq!(seen, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn constant_margins_unchanged() {
        let m = vm(&[&[0, 2, 2], &[-2, 0, 2], &[-2, -2, 0]]);
        let order = admissible_order(&m).unwrap();
        let im = intermediate_margins(&m, &order);
        assert_eq!(im.msigma, m.m);
    }

    #[test]
    fn rectangle_minimum_propagates() {
        // Order 0,1,2,3; the small margin m[1][2] = 1 caps only pairs whose
        // rectangle contains it.
        let m = vm(&[
            &[0, 5, 4, 6],
            &[-5, 0, 1, 3],
            &[-4, -1, 0, 2],
            &[-6, -3, -2, 0],
        ]);
        let order = admissible_order(&m).unwrap();
        assert_eq!(order.sequence, vec![0, 1, 2, 3]);
        let im = intermediate_margins(&m, &order);
        assert_eq!(im.msigma[(1, 2)], int(1));
        assert_eq!(im.msigma[(0, 1)], int(4));
        assert_eq!(im.msigma[(0, 2)], int(4));
        assert_eq!(im.msigma[(0, 3)], int(6));
        assert_eq!(im.msigma[(1, 3)], int(3));
        assert_eq!(im.msigma[(2, 3)], int(2));
        assert_eq!(im.msigma[(3, 0)], int(-6));
        assert_eq!(im.superdiagonal(), vec![int(4), int(1), int(2)]);
    }

    #[test]
    fn two_candidates_give_interval_endpoints() {
        let intervals = [ScoreInterval { lo: 0.2, hi: 0.5 }];
        let pm = projected_scores(&intervals, &[1, 0]);
        assert_eq!(pm.get(1, 0), 0.5);
        assert_eq!(pm.get(0, 1), 0.2);
    }

    #[test]
    fn union_merges_overlaps_only() {
        let u = interval_union(
            &[
                ScoreInterval { lo: 0.5, hi: 0.6 },
                ScoreInterval { lo: 0.0, hi: 0.2 },
                ScoreInterval { lo: 0.1, hi: 0.3 },
            ],
            0.0,
        );
        assert_eq!(
            u,
            vec![
                ScoreInterval { lo: 0.0, hi: 0.3 },
                ScoreInterval { lo: 0.5, hi: 0.6 }
            ]
        );
    }

    #[test]
    fn complete_case_keeps_unit_turnouts() {
        let counts = SquareMatrix::from_fn(4, |x, y| {
            let table = [[0, 3, 4, 1], [2, 0, 5, 3], [1, 0, 0, 4], [4, 2, 1, 0]];
            int(table[x][y])
        });
        let l = LlullMatrix::from_absolute(counts, int(5)).unwrap();
        assert!(l.is_complete());
        let p = Projection::compute(&l, Variant::Main, None, DEFAULT_TOLERANCE).unwrap();
        for (x, y) in p.turnouts.tsigma.off_diagonal() {
            assert_eq!(p.turnouts.tsigma[(x, y)], 1.0);
        }
    }
}
