//! The Llull matrix of pairwise scores, its turnouts and margins.

use crate::ballot::{ballot_to_pairwise, InterpretationRules, Profile};
use crate::matrix::SquareMatrix;
use crate::rational::{format_rational, from_f64, int, Rational};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LlullError {
    #[error("total voters {total} is smaller than the turnout {turnout} of pair ({x}, {y})")]
    TotalVotersTooSmall {
        total: String,
        turnout: String,
        x: usize,
        y: usize,
    },
    #[error("total voters must be positive")]
    NonPositiveTotal,
    #[error("score of pair ({x}, {y}) is negative")]
    NegativeScore { x: usize, y: usize },
    #[error("scores of pair ({x}, {y}) add up to more than the total")]
    OutsideDomain { x: usize, y: usize },
}

/// Relative pairwise scores `v[x][y]`: the fraction of the `total_voters`
/// who prefer `x` to `y`.
///
/// Every instance satisfies `0 ≤ v[x][y]` and `v[x][y] + v[y][x] ≤ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LlullMatrix {
    scores: SquareMatrix<Rational>,
    total_voters: Rational,
}

/// Symmetric turnouts `t[x][y] = v[x][y] + v[y][x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnoutMatrix(pub SquareMatrix<Rational>);

/// Antisymmetric margins `m[x][y] = v[x][y] - v[y][x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginMatrix(pub SquareMatrix<Rational>);

impl LlullMatrix {
    /// Builds a matrix from absolute counts and the total number of voters.
    pub fn from_absolute(
        counts: SquareMatrix<Rational>,
        total_voters: Rational,
    ) -> Result<Self, LlullError> {
        if !total_voters.is_positive() {
            return Err(LlullError::NonPositiveTotal);
        }
        let n = counts.n();
        for (x, y) in counts.off_diagonal() {
            if counts[(x, y)].is_negative() {
                return Err(LlullError::NegativeScore { x, y });
            }
            if x < y {
                let turnout = &counts[(x, y)] + &counts[(y, x)];
                if turnout > total_voters {
                    return Err(LlullError::TotalVotersTooSmall {
                        total: format_rational(&total_voters),
                        turnout: format_rational(&turnout),
                        x,
                        y,
                    });
                }
            }
        }
        let scores = SquareMatrix::from_fn(n, |x, y| {
            if x == y {
                Rational::zero()
            } else {
                &counts[(x, y)] / &total_voters
            }
        });
        Ok(LlullMatrix {
            scores,
            total_voters,
        })
    }

    /// Builds a matrix of relative scores, with `V = 1`.
    pub fn from_relative(scores: SquareMatrix<Rational>) -> Result<Self, LlullError> {
        let n = scores.n();
        for (x, y) in scores.off_diagonal() {
            if scores[(x, y)].is_negative() {
                return Err(LlullError::NegativeScore { x, y });
            }
            if x < y && &scores[(x, y)] + &scores[(y, x)] > Rational::one() {
                return Err(LlullError::OutsideDomain { x, y });
            }
        }
        let scores = SquareMatrix::from_fn(n, |x, y| {
            if x == y {
                Rational::zero()
            } else {
                scores[(x, y)].clone()
            }
        });
        Ok(LlullMatrix {
            scores,
            total_voters: Rational::one(),
        })
    }

    /// Converts floating-point relative scores exactly, clamping round-off
    /// that leaves the domain by at most `tolerance`.
    pub fn from_relative_f64(
        scores: &SquareMatrix<f64>,
        tolerance: f64,
    ) -> Result<Self, LlullError> {
        let n = scores.n();
        let mut exact = SquareMatrix::filled(n, Rational::zero());
        for x in 0..n {
            for y in (x + 1)..n {
                let mut a = scores[(x, y)];
                let mut b = scores[(y, x)];
                if a < -tolerance {
                    return Err(LlullError::NegativeScore { x, y });
                }
                if b < -tolerance {
                    return Err(LlullError::NegativeScore { x: y, y: x });
                }
                a = a.clamp(0.0, 1.0);
                b = b.clamp(0.0, 1.0);
                let mut ea = from_f64(a);
                let mut eb = from_f64(b);
                let excess = &ea + &eb - Rational::one();
                if excess.is_positive() {
                    if excess > from_f64(tolerance) {
                        return Err(LlullError::OutsideDomain { x, y });
                    }
                    // Take the round-off from the larger entry.
                    if ea >= eb {
                        ea = Rational::one() - &eb;
                    } else {
                        eb = Rational::one() - &ea;
                    }
                }
                exact[(x, y)] = ea;
                exact[(y, x)] = eb;
            }
        }
        LlullMatrix::from_relative(exact)
    }

    pub fn n(&self) -> usize {
        self.scores.n()
    }

    /// Relative score `v[x][y]`.
    pub fn score(&self, x: usize, y: usize) -> &Rational {
        &self.scores[(x, y)]
    }

    pub fn scores(&self) -> &SquareMatrix<Rational> {
        &self.scores
    }

    pub fn total_voters(&self) -> &Rational {
        &self.total_voters
    }

    /// Absolute counts `V[x][y] = v[x][y] · V`.
    pub fn absolute(&self) -> SquareMatrix<Rational> {
        self.scores.map(|v| v * &self.total_voters)
    }

    pub fn scores_f64(&self) -> SquareMatrix<f64> {
        self.scores.map(crate::rational::to_f64)
    }

    pub fn turnouts(&self) -> TurnoutMatrix {
        TurnoutMatrix(SquareMatrix::from_fn(self.n(), |x, y| {
            if x == y {
                Rational::zero()
            } else {
                &self.scores[(x, y)] + &self.scores[(y, x)]
            }
        }))
    }

    pub fn margins(&self) -> MarginMatrix {
        MarginMatrix(SquareMatrix::from_fn(self.n(), |x, y| {
            &self.scores[(x, y)] - &self.scores[(y, x)]
        }))
    }

    /// True when every pair has turnout one.
    pub fn is_complete(&self) -> bool {
        self.scores
            .off_diagonal()
            .all(|(x, y)| &self.scores[(x, y)] + &self.scores[(y, x)] == Rational::one())
    }

    /// Scores `(1 + m[x][y]) / 2`: every missing comparison becomes a tie.
    pub fn margin_completed(&self) -> LlullMatrix {
        let two = int(2);
        let scores = SquareMatrix::from_fn(self.n(), |x, y| {
            if x == y {
                Rational::zero()
            } else {
                (Rational::one() + &self.scores[(x, y)] - &self.scores[(y, x)]) / &two
            }
        });
        LlullMatrix {
            scores,
            total_voters: self.total_voters.clone(),
        }
    }

    /// Principal submatrix on `keep`, with the same total.
    pub fn restrict(&self, keep: &[usize]) -> LlullMatrix {
        LlullMatrix {
            scores: self.scores.submatrix(keep),
            total_voters: self.total_voters.clone(),
        }
    }
}

/// Aggregates weighted ballots into the relative Llull matrix.
///
/// `total_voters` defaults to the sum of ballot weights (one for an empty
/// profile) and must be at least every absolute turnout.
pub fn aggregate(
    profile: &Profile,
    rules: InterpretationRules,
    total_voters: Option<Rational>,
) -> Result<LlullMatrix, LlullError> {
    let n = profile.candidates.len();
    let mut counts = SquareMatrix::filled(n, Rational::zero());
    for ballot in &profile.ballots {
        let contribution = ballot_to_pairwise(ballot, rules, &profile.candidates);
        for (&(x, y), value) in contribution.iter() {
            counts[(x, y)] += value * &ballot.weight;
        }
    }
    let total = match total_voters {
        Some(v) => v,
        None => {
            let sum = profile.total_weight();
            if sum.is_zero() {
                Rational::one()
            } else {
                sum
            }
        }
    };
    LlullMatrix::from_absolute(counts, total)
}
