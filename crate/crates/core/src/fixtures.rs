//! Published elections used as reference data.

/// Six electors ranking six candidates `a`–`f` with truncated ballots.
pub const PALACE_1652: &str = include_str!("../fixtures/palace_1652.txt");

/// Pairwise counts of an eight-candidate election with 421 voters.
pub const DEBIAN_2006: &str = include_str!("../fixtures/debian_2006.csv");

/// 37 approval ballots over `A`–`E`, each with a ranking around the cutoff.
pub const PCS_2006: &str = include_str!("../fixtures/pcs_2006.txt");
