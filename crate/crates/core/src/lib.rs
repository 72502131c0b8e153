//! Continuous rating of preferential votes with incomplete ballots.
//!
//! Ballots are aggregated into a matrix of pairwise scores, closed under
//! widest paths, projected onto matrices consistent with an admissible
//! order, and finally turned into rank-like rates in `[1, N]`.

pub mod ballot;
pub mod closure;
pub mod fixtures;
pub mod llull;
pub mod matrix;
pub mod matrix_io;
pub mod order;
pub mod pipeline;
pub mod projection;
pub mod properties;
pub mod qp;
pub mod rating;
pub mod rational;

pub use ballot::{
    parse_ballot_line, parse_profile, Ballot, BallotError, CandidateSet, InterpretationRules,
    ListedVsUnlisted, Profile, UnlistedPair,
};
pub use closure::Variant;
pub use llull::{aggregate, LlullError, LlullMatrix};
pub use matrix::SquareMatrix;
pub use matrix_io::{parse_matrix_csv, write_matrix_csv, MatrixInput};
pub use pipeline::{run_matrix, run_profile, PipelineError, RunOptions, RunReport};
pub use projection::{project, ProjectedMatrix, Projection, ProjectionError};
pub use rating::{RankLikeRates, RateFormula, SocialRanking};
pub use rational::Rational;
