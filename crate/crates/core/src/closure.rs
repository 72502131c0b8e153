//! Widest-path closures of the Llull matrix and the indirect margins of each
//! method variant.

use crate::llull::LlullMatrix;
use crate::matrix::SquareMatrix;
use crate::rational::Rational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("variant {variant} needs the {closure} closure, which was not computed")]
    MissingClosure {
        variant: Variant,
        closure: &'static str,
    },
}

/// Method variant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Max-min indirect scores.
    #[default]
    Main,
    /// Min-max indirect scores.
    Codual,
    /// The smaller of the main and codual margins when both agree in sign.
    Balanced,
    /// The main procedure on `(1 + m) / 2`, which is always complete.
    MarginBased,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Main,
        Variant::Codual,
        Variant::Balanced,
        Variant::MarginBased,
    ];

    /// Whether `ν` is known to be transitive for this variant.
    pub fn guarantees_admissible(self) -> bool {
        matches!(self, Variant::Main | Variant::MarginBased)
    }

    fn needs_minmax(self) -> bool {
        matches!(self, Variant::Codual | Variant::Balanced)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Main => "main",
            Variant::Codual => "codual",
            Variant::Balanced => "balanced",
            Variant::MarginBased => "margin-based",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "main" => Ok(Variant::Main),
            "codual" => Ok(Variant::Codual),
            "balanced" => Ok(Variant::Balanced),
            "margin-based" | "margin" => Ok(Variant::MarginBased),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

/// Max-min path closure: `v*[x][y]` is the largest bottleneck over paths
/// from `x` to `y`.
pub fn maxmin_closure(llull: &LlullMatrix) -> SquareMatrix<Rational> {
    widest_paths(llull.scores().clone())
}

fn widest_paths(mut w: SquareMatrix<Rational>) -> SquareMatrix<Rational> {
    let n = w.n();
    for k in 0..n {
        for x in 0..n {
            if x == k {
                continue;
            }
            for y in 0..n {
                if y == x || y == k {
                    continue;
                }
                let through = (&w[(x, k)]).min(&w[(k, y)]);
                if *through > w[(x, y)] {
                    w[(x, y)] = through.clone();
                }
            }
        }
    }
    w
}

/// Min-max path closure: `v̄[x][y]` is the smallest over paths from `x` to
/// `y` of the largest edge score.
///
/// Computed through the duality `v̄[x][y] = 1 - v̂*[y][x]` with
/// `v̂[x][y] = 1 - v[y][x]`.
pub fn minmax_closure(llull: &LlullMatrix) -> SquareMatrix<Rational> {
    let v = llull.scores();
    let n = v.n();
    let dual = SquareMatrix::from_fn(n, |x, y| {
        if x == y {
            Rational::zero()
        } else {
            Rational::one() - &v[(y, x)]
        }
    });
    let closed = widest_paths(dual);
    SquareMatrix::from_fn(n, |x, y| {
        if x == y {
            Rational::zero()
        } else {
            Rational::one() - &closed[(y, x)]
        }
    })
}

/// Indirect scores of a Llull matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndirectScores {
    /// Max-min closure.
    pub vstar: SquareMatrix<Rational>,
    /// Min-max closure, present for the codual and balanced variants.
    pub vbar: Option<SquareMatrix<Rational>>,
    /// True when the closures were taken on the margin-completed scores.
    pub margin_completed: bool,
}

impl IndirectScores {
    /// Computes the closures `variant` needs. For the margin-based variant
    /// the scores are first replaced by `(1 + m) / 2`.
    pub fn compute(llull: &LlullMatrix, variant: Variant) -> Self {
        if variant == Variant::MarginBased {
            let completed = llull.margin_completed();
            return IndirectScores {
                vstar: maxmin_closure(&completed),
                vbar: None,
                margin_completed: true,
            };
        }
        IndirectScores {
            vstar: maxmin_closure(llull),
            vbar: variant.needs_minmax().then(|| minmax_closure(llull)),
            margin_completed: false,
        }
    }
}

/// Antisymmetric indirect margins of one variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariantMargins {
    pub m: SquareMatrix<Rational>,
    pub variant: Variant,
}

impl VariantMargins {
    pub fn n(&self) -> usize {
        self.m.n()
    }

    pub fn get(&self, x: usize, y: usize) -> &Rational {
        &self.m[(x, y)]
    }
}

fn differences(w: &SquareMatrix<Rational>) -> SquareMatrix<Rational> {
    SquareMatrix::from_fn(w.n(), |x, y| &w[(x, y)] - &w[(y, x)])
}

/// Indirect margins for `variant`.
pub fn variant_margins(
    scores: &IndirectScores,
    variant: Variant,
) -> Result<VariantMargins, ClosureError> {
    let m = match variant {
        Variant::Main => differences(&scores.vstar),
        Variant::MarginBased => {
            if !scores.margin_completed {
                return Err(ClosureError::MissingClosure {
                    variant,
                    closure: "margin-completed max-min",
                });
            }
            differences(&scores.vstar)
        }
        Variant::Codual => {
            let vbar = scores.vbar.as_ref().ok_or(ClosureError::MissingClosure {
                variant,
                closure: "min-max",
            })?;
            differences(vbar)
        }
        Variant::Balanced => {
            let vbar = scores.vbar.as_ref().ok_or(ClosureError::MissingClosure {
                variant,
                closure: "min-max",
            })?;
            let main = differences(&scores.vstar);
            let codual = differences(vbar);
            let n = main.n();
            let mut m = SquareMatrix::filled(n, Rational::zero());
            for x in 0..n {
                for y in 0..n {
                    if x != y && main[(x, y)].is_positive() && codual[(x, y)].is_positive() {
                        let value = (&main[(x, y)]).min(&codual[(x, y)]).clone();
                        m[(y, x)] = -value.clone();
                        m[(x, y)] = value;
                    }
                }
            }
            m
        }
    };
    if scores.margin_completed && variant != Variant::MarginBased {
        return Err(ClosureError::MissingClosure {
            variant,
            closure: "max-min on original scores",
        });
    }
    Ok(VariantMargins { m, variant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn llull(rows: &[&[i64]], total: i64) -> LlullMatrix {
        let n = rows.len();
        let counts = SquareMatrix::from_fn(n, |x, y| int(rows[x][y]));
        LlullMatrix::from_absolute(counts, int(total)).unwrap()
    }

    #[test]
    fn two_candidates_unchanged() {
        let l = llull(&[&[0, 3], &[1, 0]], 5);
        assert_eq!(&maxmin_closure(&l), l.scores());
        assert_eq!(&minmax_closure(&l), l.scores());
    }

    #[test]
    fn widest_path_through_intermediate() {
        // 0→1 strong, 1→2 strong, 0→2 weak.
        let l = llull(&[&[0, 8, 1], &[2, 0, 7], &[9, 3, 0]], 10);
        let w = maxmin_closure(&l);
        assert_eq!(w[(0, 2)], ratio(7, 10));
        assert_eq!(w[(2, 1)], ratio(8, 10));
        let closed = LlullMatrix::from_relative(w.clone()).ok();
        // The closure may leave the domain; re-closing stays put regardless.
        if let Some(c) = closed {
            assert_eq!(maxmin_closure(&c), w);
        }
    }

    #[test]
    fn symmetric_scores_give_zero_margins() {
        let l = llull(&[&[0, 2, 1], &[2, 0, 3], &[1, 3, 0]], 6);
        for variant in Variant::ALL {
            let scores = IndirectScores::compute(&l, variant);
            let m = variant_margins(&scores, variant).unwrap();
            assert!(m.m.off_diagonal().all(|(x, y)| m.m[(x, y)].is_zero()));
        }
    }

    #[test]
    fn missing_closure_is_reported() {
        let l = llull(&[&[0, 2], &[1, 0]], 3);
        let scores = IndirectScores::compute(&l, Variant::Main);
        assert!(matches!(
            variant_margins(&scores, Variant::Codual),
            Err(ClosureError::MissingClosure { .. })
        ));
        assert!(variant_margins(&scores, Variant::MarginBased).is_err());
        let completed = IndirectScores::compute(&l, Variant::MarginBased);
        assert!(variant_margins(&completed, Variant::Main).is_err());
    }

    #[test]
    fn complete_case_variants_coincide() {
        let l = llull(
            &[&[0, 4, 1, 3], &[2, 0, 5, 2], &[5, 1, 0, 4], &[3, 4, 2, 0]],
            6,
        );
        assert!(l.is_complete());
        let main =
            variant_margins(&IndirectScores::compute(&l, Variant::Main), Variant::Main).unwrap();
        let vstar = maxmin_closure(&l);
        let vbar = minmax_closure(&l);
        for (x, y) in vbar.off_diagonal() {
            assert_eq!(vbar[(x, y)], Rational::one() - &vstar[(y, x)]);
        }
        for variant in Variant::ALL {
            let m = variant_margins(&IndirectScores::compute(&l, variant), variant).unwrap();
            assert_eq!(m.m, main.m, "{variant}");
        }
    }

    #[test]
    fn variant_names_parse() {
        for v in Variant::ALL {
            assert_eq!(v.to_string().parse::<Variant>(), Ok(v));
        }
        assert!("bogus".parse::<Variant>().is_err());
    }
}
