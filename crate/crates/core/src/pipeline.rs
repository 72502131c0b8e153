//! End-to-end runs from ballots or a Llull matrix to rates and a ranking.

use crate::ballot::{BallotError, CandidateSet, InterpretationRules, Profile};
use crate::closure::Variant;
use crate::llull::{aggregate, LlullError, LlullMatrix};
use crate::matrix_io::MatrixError;
use crate::projection::{Projection, ProjectionError};
use crate::qp::DEFAULT_TOLERANCE;
use crate::rating::{rank_like_rates, social_ranking, RankLikeRates, RateFormula, SocialRanking};
use crate::rational::Rational;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ballot(#[from] BallotError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Llull(#[from] LlullError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub variant: Variant,
    pub rules: InterpretationRules,
    pub total_voters: Option<Rational>,
    pub formula: RateFormula,
    /// Read every ballot as its approved set alone.
    pub approval_only: bool,
    /// Admissible order to use instead of the tie-split Copeland order.
    pub order: Option<Vec<usize>>,
    pub tolerance: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            variant: Variant::Main,
            rules: InterpretationRules::default(),
            total_voters: None,
            formula: RateFormula::Main,
            approval_only: false,
            order: None,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl RunOptions {
    pub fn variant(variant: Variant) -> Self {
        RunOptions {
            variant,
            ..RunOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub candidates: CandidateSet,
    pub options: RunOptions,
    /// The aggregated (or supplied) matrix, before any margin completion.
    pub llull: LlullMatrix,
    pub projection: Projection,
    pub rates: RankLikeRates,
    pub ranking: SocialRanking,
}

pub fn run_matrix(
    candidates: CandidateSet,
    llull: LlullMatrix,
    options: RunOptions,
) -> Result<RunReport, PipelineError> {
    let projection = Projection::compute(
        &llull,
        options.variant,
        options.order.clone(),
        options.tolerance,
    )?;
    let rates = rank_like_rates(&projection.projected, options.formula);
    let ranking = social_ranking(&rates, &projection.projected);
    Ok(RunReport {
        candidates,
        options,
        llull,
        projection,
        rates,
        ranking,
    })
}

pub fn run_profile(profile: &Profile, options: RunOptions) -> Result<RunReport, PipelineError> {
    let approval;
    let profile = if options.approval_only {
        approval = profile.to_approval_only();
        &approval
    } else {
        profile
    };
    let llull = aggregate(profile, options.rules, options.total_voters.clone())?;
    run_matrix(profile.candidates.clone(), llull, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballot::parse_profile;

    #[test]
    fn single_ballot() {
        let p = parse_profile("a>b>c\n").unwrap();
        let report = run_profile(&p, RunOptions::default()).unwrap();
        assert_eq!(report.ranking.groups, vec![vec![0], vec![1], vec![2]]);
        for (x, expected) in [1.0, 2.0, 3.0].iter().enumerate() {
            assert!((report.rates.r[x] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn no_ballots_ties_everyone() {
        let p = parse_profile("candidates: a b c\n").unwrap();
        for variant in Variant::ALL {
            let report = run_profile(&p, RunOptions::variant(variant)).unwrap();
            assert_eq!(report.ranking.groups, vec![vec![0, 1, 2]]);
        }
    }
}
