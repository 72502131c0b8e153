//! Brute-force path closures by enumerating simple paths.

use clc_core::rational::Rational;
use clc_core::{LlullMatrix, SquareMatrix};
use num_traits::Zero;

/// Largest bottleneck and smallest peak over all simple paths, in exact
/// arithmetic. Exponential in the number of candidates.
pub fn oracle_paths(llull: &LlullMatrix) -> (SquareMatrix<Rational>, SquareMatrix<Rational>) {
    let n = llull.n();
    let mut maxmin = SquareMatrix::filled(n, Rational::zero());
    let mut minmax = SquareMatrix::filled(n, Rational::zero());
    for x in 0..n {
        let mut visited = vec![false; n];
        visited[x] = true;
        let mut best_bottleneck: Vec<Option<Rational>> = vec![None; n];
        let mut best_peak: Vec<Option<Rational>> = vec![None; n];
        walk(
            llull,
            x,
            None,
            &mut visited,
            &mut best_bottleneck,
            &mut best_peak,
        );
        for y in (0..n).filter(|&y| y != x) {
            maxmin[(x, y)] = best_bottleneck[y].clone().unwrap_or_else(Rational::zero);
            minmax[(x, y)] = best_peak[y].clone().unwrap_or_else(Rational::zero);
        }
    }
    (maxmin, minmax)
}

fn walk(
    llull: &LlullMatrix,
    at: usize,
    span: Option<(Rational, Rational)>,
    visited: &mut [bool],
    bottleneck: &mut [Option<Rational>],
    peak: &mut [Option<Rational>],
) {
    for next in 0..llull.n() {
        if visited[next] {
            continue;
        }
        let v = llull.score(at, next);
        let (lo, hi) = match &span {
            None => (v.clone(), v.clone()),
            Some((lo, hi)) => (lo.min(v).clone(), hi.max(v).clone()),
        };
        if bottleneck[next].as_ref().is_none_or(|b| &lo > b) {
            bottleneck[next] = Some(lo.clone());
        }
        if peak[next].as_ref().is_none_or(|p| &hi < p) {
            peak[next] = Some(hi.clone());
        }
        visited[next] = true;
        walk(llull, next, Some((lo, hi)), visited, bottleneck, peak);
        visited[next] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clc_core::closure::{maxmin_closure, minmax_closure};
    use clc_core::rational::ratio;

    #[test]
    fn two_candidates_keep_direct_scores() {
        let scores = SquareMatrix::from_fn(2, |x, y| match (x, y) {
            (0, 1) => ratio(2, 3),
            (1, 0) => ratio(1, 4),
            _ => Rational::zero(),
        });
        let l = LlullMatrix::from_relative(scores.clone()).unwrap();
        let (maxmin, minmax) = oracle_paths(&l);
        assert_eq!(maxmin, scores);
        assert_eq!(minmax, scores);
    }

    #[test]
    fn three_cycle_matches_closures() {
        let scores = SquareMatrix::from_fn(3, |x, y| match (x, y) {
            (0, 1) | (1, 2) | (2, 0) => ratio(2, 3),
            (x, y) if x != y => ratio(1, 3),
            _ => Rational::zero(),
        });
        let l = LlullMatrix::from_relative(scores).unwrap();
        let (maxmin, minmax) = oracle_paths(&l);
        assert_eq!(maxmin, maxmin_closure(&l));
        assert_eq!(minmax, minmax_closure(&l));
        assert_eq!(maxmin[(1, 0)], ratio(2, 3));
        assert_eq!(minmax[(0, 2)], ratio(1, 3));
    }
}
