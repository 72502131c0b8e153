//! The indirect comparison relation and admissible total orders.

use crate::closure::VariantMargins;
use crate::matrix::SquareMatrix;
use crate::rational::{half, int, Rational};
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OrderError {
    /// The tie-split Copeland order puts `after` before `before` although
    /// `before` indirectly beats `after`.
    #[error("no admissible order: candidate {before} beats {after} but is ranked after it")]
    NotAdmissible { before: usize, after: usize },
}

/// `ν = {xy : m[x][y] > 0}` and its codual `ν̂ = {xy : m[x][y] ≥ 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRelation {
    pub nu: SquareMatrix<bool>,
    pub nu_hat: SquareMatrix<bool>,
}

impl ComparisonRelation {
    pub fn from_margins(margins: &VariantMargins) -> Self {
        let n = margins.n();
        ComparisonRelation {
            nu: SquareMatrix::from_fn(n, |x, y| x != y && margins.get(x, y).is_positive()),
            nu_hat: SquareMatrix::from_fn(n, |x, y| x != y && !margins.get(x, y).is_negative()),
        }
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.nu.n();
        (0..n).all(|x| {
            (0..n).all(|y| {
                !self.nu[(x, y)] || (0..n).all(|z| z == x || !self.nu[(y, z)] || self.nu[(x, z)])
            })
        })
    }

    /// Checks `ν ⊆ ξ ⊆ ν̂` for a sequence, returning the first violating
    /// pair `(winner, loser)`.
    pub fn check_order(&self, sequence: &[usize]) -> Result<(), OrderError> {
        for (i, &x) in sequence.iter().enumerate() {
            for &y in &sequence[i + 1..] {
                if self.nu[(y, x)] || !self.nu_hat[(x, y)] {
                    return Err(OrderError::NotAdmissible {
                        before: y,
                        after: x,
                    });
                }
            }
        }
        Ok(())
    }
}

/// A total order extending `ν`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleOrder {
    /// Candidates, best first.
    pub sequence: Vec<usize>,
    /// 1-based position of each candidate.
    pub rank: Vec<usize>,
}

impl AdmissibleOrder {
    fn from_sequence(sequence: Vec<usize>) -> Self {
        let mut rank = vec![0; sequence.len()];
        for (i, &c) in sequence.iter().enumerate() {
            rank[c] = i + 1;
        }
        AdmissibleOrder { sequence, rank }
    }

    /// Validates an externally supplied order.
    pub fn new(sequence: Vec<usize>, margins: &VariantMargins) -> Result<Self, OrderError> {
        let n = margins.n();
        let mut seen = vec![false; n];
        assert_eq!(sequence.len(), n, "order must list every candidate once");
        for &c in &sequence {
            assert!(
                !std::mem::replace(&mut seen[c], true),
                "order repeats a candidate"
            );
        }
        ComparisonRelation::from_margins(margins).check_order(&sequence)?;
        Ok(AdmissibleOrder::from_sequence(sequence))
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// True when `x` comes strictly before `y`.
    pub fn precedes(&self, x: usize, y: usize) -> bool {
        self.rank[x] < self.rank[y]
    }
}

/// Tie-splitting Copeland ranks
/// `1 + #{y : m[y][x] > 0} + ½ #{y ≠ x : m[y][x] = 0}`.
pub fn copeland_ranks(margins: &VariantMargins) -> Vec<Rational> {
    let n = margins.n();
    (0..n)
        .map(|x| {
            let mut r = int(1);
            for y in (0..n).filter(|&y| y != x) {
                let m = margins.get(y, x);
                if m.is_positive() {
                    r += int(1);
                } else if m.is_zero() {
                    r += half();
                }
            }
            r
        })
        .collect()
}

/// Sorts candidates by Copeland rank, breaking ties by file order, and
/// checks that the result extends `ν`.
pub fn admissible_order(margins: &VariantMargins) -> Result<AdmissibleOrder, OrderError> {
    let ranks = copeland_ranks(margins);
    let mut sequence: Vec<usize> = (0..margins.n()).collect();
    sequence.sort_by(|&a, &b| ranks[a].cmp(&ranks[b]).then(a.cmp(&b)));
    ComparisonRelation::from_margins(margins).check_order(&sequence)?;
    Ok(AdmissibleOrder::from_sequence(sequence))
}

/// All admissible orders in lexicographic order of their sequences, up to
/// `limit` of them.
pub fn enumerate_admissible_orders(margins: &VariantMargins, limit: usize) -> Vec<AdmissibleOrder> {
    AdmissibleOrders::new(margins).take(limit).collect()
}

/// Lazy lexicographic generator of the linear extensions of `ν`.
pub struct AdmissibleOrders {
    relation: ComparisonRelation,
    /// Per depth, the next candidate to try.
    cursor: Vec<usize>,
    prefix: Vec<usize>,
    used: Vec<bool>,
    done: bool,
}

impl AdmissibleOrders {
    pub fn new(margins: &VariantMargins) -> Self {
        let n = margins.n();
        AdmissibleOrders {
            relation: ComparisonRelation::from_margins(margins),
            cursor: vec![0],
            prefix: Vec::with_capacity(n),
            used: vec![false; n],
            done: false,
        }
    }

    fn available(&self, c: usize) -> bool {
        let n = self.used.len();
        !self.used[c] && (0..n).all(|y| self.used[y] || !self.relation.nu[(y, c)])
    }
}

impl Iterator for AdmissibleOrders {
    type Item = AdmissibleOrder;

    fn next(&mut self) -> Option<AdmissibleOrder> {
        let n = self.used.len();
        if self.done {
            return None;
        }
        if n == 0 {
            self.done = true;
            return Some(AdmissibleOrder::from_sequence(Vec::new()));
        }
        loop {
            let depth = self.prefix.len();
            let start = self.cursor[depth];
            match (start..n).find(|&c| self.available(c)) {
                Some(c) => {
                    self.cursor[depth] = c + 1;
                    self.prefix.push(c);
                    self.used[c] = true;
                    if self.prefix.len() == n {
                        let order = AdmissibleOrder::from_sequence(self.prefix.clone());
                        let last = self.prefix.pop().expect("non-empty");
                        self.used[last] = false;
                        return Some(order);
                    }
                    self.cursor.push(0);
                }
                None => {
                    self.cursor.pop();
                    match self.prefix.pop() {
                        Some(last) => self.used[last] = false,
                        None => {
                            self.done = true;
                            return None;
                        }
                    }
                }
            }
        }
    }
}
