//! Rank-like rates and the social ranking.

use crate::projection::ProjectedMatrix;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Two projected scores closer than this count as equal.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RateFormula {
    /// `r(x) = N - Σ_y π[x][y]`.
    #[default]
    Main,
    /// `r(x) = 1 + Σ_y π[y][x]`.
    Alternative,
}

impl fmt::Display for RateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateFormula::Main => "main",
            RateFormula::Alternative => "alt",
        })
    }
}

impl FromStr for RateFormula {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "main" => Ok(RateFormula::Main),
            "alt" | "alternative" => Ok(RateFormula::Alternative),
            other => Err(format!("unknown rate formula `{other}`")),
        }
    }
}

/// Rates in `[1, N]`; lower is better.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankLikeRates {
    pub r: Vec<f64>,
    pub formula: RateFormula,
}

impl RankLikeRates {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.r.iter().sum()
    }
}

pub fn rank_like_rates(pm: &ProjectedMatrix, formula: RateFormula) -> RankLikeRates {
    let n = pm.n();
    let r = (0..n)
        .map(|x| {
            let others = (0..n).filter(|&y| y != x);
            match formula {
                RateFormula::Main => n as f64 - others.map(|y| pm.get(x, y)).sum::<f64>(),
                RateFormula::Alternative => 1.0 + others.map(|y| pm.get(y, x)).sum::<f64>(),
            }
        })
        .collect();
    RankLikeRates { r, formula }
}

/// Tie groups, best first; each group lists candidates in input order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocialRanking {
    pub groups: Vec<Vec<usize>>,
}

impl SocialRanking {
    /// 1-based position of each candidate's group.
    pub fn group_of(&self, n: usize) -> Vec<usize> {
        let mut out = vec![0; n];
        for (g, members) in self.groups.iter().enumerate() {
            for &c in members {
                out[c] = g + 1;
            }
        }
        out
    }

    /// Renders as `b > a = e = f > d`.
    pub fn display_with(&self, names: &[String]) -> String {
        self.groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|&c| names[c].as_str())
                    .collect::<Vec<_>>()
                    .join(" = ")
            })
            .collect::<Vec<_>>()
            .join(" > ")
    }
}

/// Sorts candidates by rate and starts a new group whenever consecutive
/// candidates have distinguishable projected scores.
pub fn social_ranking(rates: &RankLikeRates, pm: &ProjectedMatrix) -> SocialRanking {
    let mut sorted: Vec<usize> = (0..rates.len()).collect();
    sorted.sort_by(|&a, &b| rates.r[a].total_cmp(&rates.r[b]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        let tied = i > 0 && {
            let prev = sorted[i - 1];
            (pm.get(prev, x) - pm.get(x, prev)).abs() <= TIE_TOLERANCE
        };
        match groups.last_mut() {
            Some(last) if tied => last.push(x),
            _ => groups.push(vec![x]),
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    SocialRanking { groups }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SquareMatrix;

    fn pm(rows: &[&[f64]]) -> ProjectedMatrix {
        ProjectedMatrix {
            pi: SquareMatrix::from_fn(rows.len(), |x, y| rows[x][y]),
        }
    }

    #[test]
    fn formulas() {
        let p = pm(&[&[0.0, 0.6, 0.7], &[0.3, 0.0, 0.5], &[0.2, 0.4, 0.0]]);
        let main = rank_like_rates(&p, RateFormula::Main);
        assert!((main.r[0] - 1.7).abs() < 1e-12);
        let alt = rank_like_rates(&p, RateFormula::Alternative);
        assert!((alt.r[0] - 1.5).abs() < 1e-12);
        assert!((alt.r[2] - 2.2).abs() < 1e-12);
    }

    #[test]
    fn all_equal_scores_form_one_group() {
        let p = pm(&[&[0.0, 0.4, 0.4], &[0.4, 0.0, 0.4], &[0.4, 0.4, 0.0]]);
        let r = rank_like_rates(&p, RateFormula::Main);
        let s = social_ranking(&r, &p);
        assert_eq!(s.groups, vec![vec![0, 1, 2]]);
        assert_eq!(s.group_of(3), vec![1, 1, 1]);
    }

    #[test]
    fn groups_follow_rates() {
        let p = pm(&[&[0.0, 0.3, 0.6], &[0.3, 0.0, 0.6], &[0.2, 0.2, 0.0]]);
        let r = rank_like_rates(&p, RateFormula::Main);
        let s = social_ranking(&r, &p);
        assert_eq!(s.groups, vec![vec![0, 1], vec![2]]);
        let names = vec!["a".to_string(), "b".into(), "c".into()];
        assert_eq!(s.display_with(&names), "a = b > c");
    }

    #[test]
    fn formula_names() {
        assert_eq!("alt".parse::<RateFormula>(), Ok(RateFormula::Alternative));
        assert_eq!(
            RateFormula::Main.to_string().parse::<RateFormula>(),
            Ok(RateFormula::Main)
        );
    }
}
