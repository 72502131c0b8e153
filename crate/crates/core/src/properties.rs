//! Checkers for the structural properties every projection satisfies.
//!
//! Each checker returns the first violated property with enough detail to
//! locate it. Comparisons allow an absolute slack `tol`.

use crate::closure::VariantMargins;
use crate::matrix::SquareMatrix;
use crate::projection::{interval_union, ProjectedMatrix, ScoreInterval};
use crate::rating::{RankLikeRates, RateFormula};
use num_traits::Signed;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub property: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.property, self.detail)
    }
}

impl std::error::Error for Violation {}

fn ensure(
    ok: bool,
    property: &'static str,
    detail: impl FnOnce() -> String,
) -> Result<(), Violation> {
    if ok {
        Ok(())
    } else {
        Err(Violation {
            property,
            detail: detail(),
        })
    }
}

/// Union of the consecutive intervals between positions `i < j`.
fn chain(
    intervals: &[ScoreInterval],
    i: usize,
    j: usize,
    tol: f64,
) -> Result<ScoreInterval, Violation> {
    let union = interval_union(&intervals[i..j], tol);
    ensure(union.len() == 1, "chain union is an interval", || {
        format!("positions {i}..{j} split into {} pieces", union.len())
    })?;
    Ok(union[0])
}

/// Interval properties for every triple of positions `i < j < k`.
pub fn check_intervals(intervals: &[ScoreInterval], tol: f64) -> Result<(), Violation> {
    let n = intervals.len() + 1;
    for (p, iv) in intervals.iter().enumerate() {
        ensure(iv.lo <= iv.hi + tol, "interval is non-empty", || {
            format!("position {p}: {iv:?}")
        })?;
        ensure(
            iv.lo >= -tol && iv.hi <= 1.0 + tol,
            "interval within [0, 1]",
            || format!("position {p}: {iv:?}"),
        )?;
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let xy = chain(intervals, i, j, tol)?;
                let yz = chain(intervals, j, k, tol)?;
                let xz = chain(intervals, i, k, tol)?;
                let at = || format!("positions {i} < {j} < {k}");
                ensure(
                    (xz.lo - xy.lo.min(yz.lo)).abs() <= tol
                        && (xz.hi - xy.hi.max(yz.hi)).abs() <= tol,
                    "outer interval is the union",
                    at,
                )?;
                ensure(
                    xy.lo <= yz.hi + tol && yz.lo <= xy.hi + tol,
                    "neighbours overlap",
                    at,
                )?;
                ensure(
                    xz.length() + tol >= xy.length().max(yz.length()),
                    "outer interval is longest",
                    at,
                )?;
                ensure(
                    xy.center() + tol >= xz.center() && xz.center() + tol >= yz.center(),
                    "centers decrease along the order",
                    at,
                )?;
                ensure(
                    xy.center() - yz.length() / 2.0 <= xz.center() + tol
                        && xz.center() <= yz.center() + xy.length() / 2.0 + tol,
                    "center shift bounded by half lengths",
                    at,
                )?;
            }
        }
    }
    Ok(())
}

/// Score, margin and turnout inequalities of a projected matrix relative
/// to an admissible order, plus membership in the score domain.
pub fn check_projected(pm: &ProjectedMatrix, order: &[usize], tol: f64) -> Result<(), Violation> {
    let n = pm.n();
    let pi = |x: usize, y: usize| pm.get(x, y);
    let m = pm.margins();
    let t = pm.turnouts();
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            ensure(pi(x, y) >= -tol, "scores nonnegative", || {
                format!("π[{x}][{y}] = {}", pi(x, y))
            })?;
            ensure(t[(x, y)] <= 1.0 + tol, "turnout at most one", || {
                format!("t[{x}][{y}] = {}", t[(x, y)])
            })?;
        }
    }
    for (i, &x) in order.iter().enumerate() {
        for (j, &y) in order.iter().enumerate().skip(i + 1) {
            ensure(
                m[(x, y)] >= -tol,
                "earlier candidate has nonnegative margin",
                || format!("m[{x}][{y}] = {}", m[(x, y)]),
            )?;
            for &z in &order[j + 1..] {
                let at = || format!("{x} ≺ {y} ≺ {z}");
                ensure(
                    (pi(x, z) - pi(x, y).max(pi(y, z))).abs() <= tol,
                    "forward score is the chain maximum",
                    at,
                )?;
                ensure(
                    (pi(z, x) - pi(z, y).min(pi(y, x))).abs() <= tol,
                    "backward score is the chain minimum",
                    at,
                )?;
                ensure(
                    m[(x, z)] <= m[(x, y)] + m[(y, z)] + tol,
                    "margins subadditive along the order",
                    at,
                )?;
                ensure(
                    t[(x, z)] - t[(y, z)] <= m[(x, y)] + tol
                        && t[(x, y)] - t[(x, z)] <= m[(y, z)] + tol,
                    "turnout steps bounded by margins",
                    at,
                )?;
            }
            let tied = m[(x, y)].abs() <= tol;
            for z in (0..n).filter(|&z| z != x && z != y) {
                let at = || format!("{x} ≺ {y}, z = {z}");
                let pairs = [
                    ("row scores decrease", pi(x, z), pi(y, z)),
                    ("column scores increase", pi(z, y), pi(z, x)),
                    ("row margins decrease", m[(x, z)], m[(y, z)]),
                    ("column margins increase", m[(z, y)], m[(z, x)]),
                    ("turnouts decrease", t[(x, z)], t[(y, z)]),
                ];
                for (property, big, small) in pairs {
                    ensure(big + tol >= small, property, at)?;
                    if tied {
                        ensure(
                            (big - small).abs() <= tol,
                            "tied candidates are interchangeable",
                            at,
                        )?;
                    }
                }
            }
        }
    }
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            for z in (0..n).filter(|&z| z != x && z != y) {
                ensure(
                    m[(x, z)].abs() <= m[(x, y)].abs() + m[(y, z)].abs() + tol,
                    "absolute margins satisfy the triangle inequality",
                    || format!("{x}, {y}, {z}"),
                )?;
            }
        }
    }
    Ok(())
}

/// Whether scores `v` already have the structure of a projection relative
/// to `order`, in which case projecting returns them unchanged.
pub fn is_fixed_point(v: &SquareMatrix<f64>, order: &[usize], tol: f64) -> bool {
    let n = v.n();
    let m = |x: usize, y: usize| v[(x, y)] - v[(y, x)];
    let t = |x: usize, y: usize| v[(x, y)] + v[(y, x)];
    for (i, &x) in order.iter().enumerate() {
        for (j, &y) in order.iter().enumerate().skip(i + 1) {
            if m(x, y) < -tol {
                return false;
            }
            for &z in &order[j + 1..] {
                if (v[(x, z)] - v[(x, y)].max(v[(y, z)])).abs() > tol
                    || (v[(z, x)] - v[(z, y)].min(v[(y, x)])).abs() > tol
                {
                    return false;
                }
            }
        }
    }
    for w in order.windows(2) {
        let (x, xp) = (w[0], w[1]);
        for z in (0..n).filter(|&z| z != x && z != xp) {
            let step = t(x, z) - t(xp, z);
            if step < -tol || step > m(x, xp) + tol {
                return false;
            }
        }
    }
    true
}

/// Rate bounds, subset sums, consistency with ties in `π` and with the
/// indirect comparison relation.
pub fn check_rates(
    rates: &RankLikeRates,
    pm: &ProjectedMatrix,
    margins: &VariantMargins,
    tol: f64,
) -> Result<(), Violation> {
    let n = rates.len();
    let r = &rates.r;
    for (x, &rx) in r.iter().enumerate() {
        ensure(
            rx >= 1.0 - tol && rx <= n as f64 + tol,
            "rates within [1, N]",
            || format!("r[{x}] = {rx}"),
        )?;
    }
    if rates.formula != RateFormula::Main {
        return Ok(());
    }
    if n <= 12 {
        for mask in 1u32..(1 << n) {
            let k = mask.count_ones() as f64;
            let sum: f64 = (0..n).filter(|&x| mask & (1 << x) != 0).map(|x| r[x]).sum();
            ensure(
                sum + tol >= k * (k + 1.0) / 2.0,
                "subset rate sums bounded below",
                || format!("subset mask {mask:#b}: sum {sum}"),
            )?;
        }
    }
    let slack = tol * n as f64;
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            let at = || format!("{x} vs {y}: r = {}, {}", r[x], r[y]);
            if (pm.get(x, y) - pm.get(y, x)).abs() <= tol {
                ensure(
                    (r[x] - r[y]).abs() <= slack,
                    "tied scores give equal rates",
                    at,
                )?;
            }
            if r[x] < r[y] - slack {
                ensure(
                    pm.get(x, y) > pm.get(y, x),
                    "lower rate means larger score",
                    at,
                )?;
                ensure(
                    margins.get(x, y).is_positive(),
                    "lower rate implies indirect win",
                    at,
                )?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_non_overlapping_intervals() {
        let ivs = [
            ScoreInterval { lo: 0.6, hi: 0.7 },
            ScoreInterval { lo: 0.1, hi: 0.2 },
        ];
        let err = check_intervals(&ivs, 1e-12).unwrap_err();
        assert_eq!(err.property, "chain union is an interval");
    }

    #[test]
    fn detects_reversed_scores() {
        let pm = ProjectedMatrix {
            pi: SquareMatrix::from_fn(2, |x, _| if x == 0 { 0.2 } else { 0.5 }),
        };
        assert!(check_projected(&pm, &[1, 0], 1e-12).is_ok());
        let err = check_projected(&pm, &[0, 1], 1e-12).unwrap_err();
        assert_eq!(err.property, "earlier candidate has nonnegative margin");
    }

    #[test]
    fn fixed_point_conditions() {
        // Chain b ≻ a ≻ c with overlapping intervals [0.3, 0.6] and [0.2, 0.4].
        let v = SquareMatrix::from_fn(3, |x, y| match (x, y) {
            (1, 0) => 0.6,
            (0, 1) => 0.3,
            (0, 2) => 0.4,
            (2, 0) => 0.2,
            (1, 2) => 0.6,
            (2, 1) => 0.2,
            _ => 0.0,
        });
        assert!(is_fixed_point(&v, &[1, 0, 2], 1e-12));
        assert!(!is_fixed_point(&v, &[0, 1, 2], 1e-12));
    }
}
