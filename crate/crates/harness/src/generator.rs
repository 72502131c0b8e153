//! Reproducible random and constructed profiles.

use clc_core::rational::int;
use clc_core::{Ballot, CandidateSet, Profile};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::ops::RangeInclusive;

/// Random generator for one case: the run seed picks the key, the suite
/// and case numbers pick the stream.
pub fn case_rng(seed: u64, suite: u32, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((suite as u64) << 40) ^ case);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileGenerator {
    pub n_candidates: RangeInclusive<usize>,
    pub n_ballots: RangeInclusive<usize>,
    /// Chance that a ballot stops before listing every candidate.
    pub truncation: f64,
    /// Chance that a listed candidate ties with the one before it.
    pub ties: f64,
    /// Emit pure approval ballots instead of rankings.
    pub approval: bool,
    pub max_weight: i64,
}

impl Default for ProfileGenerator {
    fn default() -> Self {
        ProfileGenerator {
            n_candidates: 3..=5,
            n_ballots: 1..=9,
            truncation: 0.5,
            ties: 0.2,
            approval: false,
            max_weight: 3,
        }
    }
}

impl ProfileGenerator {
    pub fn candidates(mut self, range: RangeInclusive<usize>) -> Self {
        self.n_candidates = range;
        self
    }

    pub fn ballots(mut self, range: RangeInclusive<usize>) -> Self {
        self.n_ballots = range;
        self
    }

    pub fn approval(mut self) -> Self {
        self.approval = true;
        self
    }

    pub fn generate(&self, rng: &mut impl Rng) -> Profile {
        let n = rng.gen_range(self.n_candidates.clone());
        self.generate_with(n, rng)
    }

    pub fn generate_with(&self, n: usize, rng: &mut impl Rng) -> Profile {
        let count = rng.gen_range(self.n_ballots.clone());
        let ballots = (0..count)
            .map(|_| {
                let b = if self.approval {
                    approval_ballot(n, rng)
                } else {
                    self.ranking(n, rng)
                };
                b.with_weight(int(rng.gen_range(1..=self.max_weight)))
            })
            .collect();
        Profile::new(CandidateSet::numbered(n), ballots)
    }

    fn ranking(&self, n: usize, rng: &mut impl Rng) -> Ballot {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let len = if rng.gen_bool(self.truncation) {
            rng.gen_range(1..=n)
        } else {
            n
        };
        Ballot::ranking(tied_groups(&perm[..len], self.ties, rng))
    }
}

fn approval_ballot(n: usize, rng: &mut impl Rng) -> Ballot {
    let approved: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    Ballot::approval(approved)
}

/// Splits a sequence into consecutive groups, joining each element to the
/// previous group with probability `ties`.
pub fn tied_groups(seq: &[usize], ties: f64, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &c in seq {
        match groups.last_mut() {
            Some(g) if rng.gen_bool(ties) => g.push(c),
            _ => groups.push(vec![c]),
        }
    }
    groups
}

/// A random nonempty proper subset of `0..n`, sorted.
pub fn proper_subset(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let k = rng.gen_range(1..n);
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let mut subset = all[..k].to_vec();
    subset.sort_unstable();
    subset
}

pub fn complement(n: usize, subset: &[usize]) -> Vec<usize> {
    (0..n).filter(|c| !subset.contains(c)).collect()
}

/// A profile where a strict majority of the weight ranks all of `top`
/// above everything else.
pub fn condorcet_smith_profile(
    gen: &ProfileGenerator,
    rng: &mut impl Rng,
) -> (Profile, Vec<usize>) {
    let n = rng.gen_range(gen.n_candidates.clone());
    let top = proper_subset(n, rng);
    let rest = complement(n, &top);
    let mut profile = gen.generate_with(n, rng);
    let others: i64 = profile.ballots.len() as i64;
    let majority = others + 1 + rng.gen_range(0..=2);
    for _ in 0..majority {
        profile.ballots.push(split_ballot(&top, &rest, gen, rng));
    }
    // Random ballots may carry weight up to `max_weight`; the split ballots
    // outweigh them.
    let weight = int(gen.max_weight);
    let split = profile.ballots.len() - majority as usize;
    for b in &mut profile.ballots[split..] {
        b.weight = weight.clone();
    }
    profile.ballots.shuffle(rng);
    (profile, top)
}

/// Lists all of `top`, then a prefix of `rest`.
fn split_ballot(
    top: &[usize],
    rest: &[usize],
    gen: &ProfileGenerator,
    rng: &mut impl Rng,
) -> Ballot {
    let mut head = top.to_vec();
    head.shuffle(rng);
    let mut tail = rest.to_vec();
    tail.shuffle(rng);
    let keep = if rng.gen_bool(gen.truncation) {
        rng.gen_range(0..=tail.len())
    } else {
        tail.len()
    };
    let mut groups = tied_groups(&head, gen.ties, rng);
    groups.extend(tied_groups(&tail[..keep], gen.ties, rng));
    Ballot::ranking(groups)
}

/// A profile in which every ballot lists all of the returned set above
/// the other candidates.
pub fn decomposition_profile(gen: &ProfileGenerator, rng: &mut impl Rng) -> (Profile, Vec<usize>) {
    let n = rng.gen_range(gen.n_candidates.clone());
    let top = proper_subset(n, rng);
    let rest = complement(n, &top);
    let count = rng.gen_range(gen.n_ballots.clone());
    let ballots = (0..count)
        .map(|_| {
            split_ballot(&top, &rest, gen, rng).with_weight(int(rng.gen_range(1..=gen.max_weight)))
        })
        .collect();
    (Profile::new(CandidateSet::numbered(n), ballots), top)
}

/// Replaces one candidate of a smaller random profile by a block of two
/// or three clones that always appear together. Returns the clone set.
pub fn clone_profile(gen: &ProfileGenerator, rng: &mut impl Rng) -> (Profile, Vec<usize>) {
    let n = rng.gen_range(gen.n_candidates.clone());
    let size = if n < 3 {
        1
    } else {
        rng.gen_range(2..=(n - 1).min(3))
    };
    let reduced = n + 1 - size;
    let base = gen.generate_with(reduced, rng);
    let pivot = rng.gen_range(0..reduced);
    // Ids below `pivot` keep their number, the clones take
    // `pivot..pivot + size`, the rest shift up.
    let clones: Vec<usize> = (pivot..pivot + size).collect();
    let relabel = |c: usize| if c < pivot { c } else { c + size - 1 };
    let ballots = base
        .ballots
        .iter()
        .map(|b| {
            let mut groups = Vec::new();
            for g in &b.groups {
                if g.contains(&pivot) {
                    let others: Vec<usize> = g
                        .iter()
                        .filter(|&&c| c != pivot)
                        .map(|&c| relabel(c))
                        .collect();
                    let mut block = clones.clone();
                    block.shuffle(rng);
                    let block_groups = tied_groups(&block, gen.ties, rng);
                    if others.is_empty() {
                        groups.extend(block_groups);
                    } else {
                        // Tied with others: the whole block joins the tie.
                        let mut g = others;
                        g.extend(&clones);
                        groups.push(g);
                    }
                } else {
                    groups.push(g.iter().map(|&c| relabel(c)).collect());
                }
            }
            Ballot {
                groups,
                approval_cutoff: None,
                weight: b.weight.clone(),
            }
        })
        .collect();
    (Profile::new(CandidateSet::numbered(n), ballots), clones)
}
