//! Named suites of generated cases, run in parallel with per-case seeds.

use crate::checks::{
    check_approval_agreement, check_clone_consistency, check_condorcet_smith, check_continuity,
    check_decomposition, check_invariance, check_monotonicity, check_order_independence,
    check_paths, check_projection, continuity_steps, raise, symmetrize, Outcome, Verdict,
};
use crate::generator::{
    case_rng, clone_profile, condorcet_smith_profile, decomposition_profile, ProfileGenerator,
};
use clc_core::{
    aggregate, fixtures, parse_profile, write_matrix_csv, InterpretationRules, LlullMatrix,
    Profile, Variant,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    OrderIndependence,
    CondorcetSmith,
    CloneConsistency,
    Monotonicity,
    Decomposition,
    ApprovalAgreement,
    Continuity,
    Invariance,
    Paths,
    Projection,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::OrderIndependence,
        Suite::CondorcetSmith,
        Suite::CloneConsistency,
        Suite::Monotonicity,
        Suite::Decomposition,
        Suite::ApprovalAgreement,
        Suite::Continuity,
        Suite::Invariance,
        Suite::Paths,
        Suite::Projection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::OrderIndependence => "order-independence",
            Suite::CondorcetSmith => "condorcet-smith",
            Suite::CloneConsistency => "clone-consistency",
            Suite::Monotonicity => "monotonicity",
            Suite::Decomposition => "decomposition",
            Suite::ApprovalAgreement => "approval-agreement",
            Suite::Continuity => "continuity",
            Suite::Invariance => "invariance",
            Suite::Paths => "paths",
            Suite::Projection => "projection",
        }
    }

    fn index(self) -> u32 {
        Suite::ALL.iter().position(|&s| s == self).unwrap() as u32
    }

    /// Fixture profiles checked before the random cases.
    fn fixtures(self) -> Vec<Profile> {
        let load = |text| parse_profile(text).expect("fixture parses");
        match self {
            Suite::OrderIndependence | Suite::Continuity | Suite::Projection => {
                vec![load(fixtures::PALACE_1652)]
            }
            Suite::ApprovalAgreement => vec![load(fixtures::PCS_2006).to_approval_only()],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                format!(
                    "unknown suite `{s}`; expected one of {} or all",
                    names.join(", ")
                )
            })
    }
}

/// One generated case: a profile and whatever else the check needs.
#[derive(Clone, Debug)]
pub struct Case {
    pub profile: Profile,
    pub rules: InterpretationRules,
    pub variant: Variant,
    /// Candidate subset the check is about: majority side, clone block,
    /// top block, or the raised candidate.
    pub subset: Vec<usize>,
    /// Second matrix for monotonicity and continuity.
    pub other: Option<LlullMatrix>,
    /// Exact tie introduced for continuity, between these two.
    pub tie: Option<(usize, usize)>,
    /// Duplication count and renaming for invariance.
    pub copies: usize,
    pub perm: Vec<usize>,
}

impl Case {
    fn new(profile: Profile, variant: Variant) -> Self {
        Case {
            profile,
            rules: InterpretationRules::default(),
            variant,
            subset: Vec::new(),
            other: None,
            tie: None,
            copies: 1,
            perm: Vec::new(),
        }
    }

    pub fn llull(&self) -> LlullMatrix {
        let l = aggregate(&self.profile, self.rules, None).expect("generated profiles aggregate");
        match self.tie {
            Some((x, y)) => symmetrize(&l, x, y),
            None => l,
        }
    }
}

fn pick_variant(rng: &mut ChaCha8Rng) -> Variant {
    *Variant::ALL.choose(rng).unwrap()
}

fn random_pair(n: usize, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let x = rng.gen_range(0..n);
    (x, (x + rng.gen_range(1..n)) % n)
}

fn random_rules(rng: &mut ChaCha8Rng) -> InterpretationRules {
    if rng.gen_bool(0.25) {
        InterpretationRules::COMPLETING
    } else {
        InterpretationRules::default()
    }
}

fn generate(suite: Suite, rng: &mut ChaCha8Rng) -> Case {
    let gen = ProfileGenerator::default();
    match suite {
        Suite::OrderIndependence => {
            let mut case = Case::new(gen.generate(rng), pick_variant(rng));
            case.rules = random_rules(rng);
            // Exact ties give more than one admissible order.
            if rng.gen_bool(0.5) {
                case.tie = Some(random_pair(case.profile.candidates.len(), rng));
            }
            case
        }
        Suite::CondorcetSmith => {
            let (p, top) = condorcet_smith_profile(&gen.clone().candidates(2..=6), rng);
            let mut case = Case::new(p, pick_variant(rng));
            case.subset = top;
            case
        }
        Suite::CloneConsistency => {
            let (p, clones) = clone_profile(&gen.clone().candidates(3..=6), rng);
            let mut case = Case::new(p, pick_variant(rng));
            case.subset = clones;
            case.rules = random_rules(rng);
            case
        }
        Suite::Monotonicity => {
            let mut case = Case::new(
                gen.clone().candidates(2..=6).generate(rng),
                pick_variant(rng),
            );
            let l = case.llull();
            // Raise the current winner half of the time.
            let a = if rng.gen_bool(0.5) {
                crate::checks::winner(&l, case.variant).unwrap_or(0)
            } else {
                rng.gen_range(0..l.n())
            };
            case.subset = vec![a];
            case.other = Some(raise(&l, a, rng));
            case
        }
        Suite::Decomposition => {
            let (p, top) = decomposition_profile(&gen.clone().candidates(2..=7), rng);
            let mut case = Case::new(p, pick_variant(rng));
            case.subset = top;
            case
        }
        Suite::ApprovalAgreement => Case::new(
            gen.clone().candidates(2..=7).approval().generate(rng),
            Variant::MarginBased,
        ),
        Suite::Continuity => {
            let n = rng.gen_range(3..=5);
            let mut case = Case::new(gen.generate_with(n, rng), pick_variant(rng));
            case.tie = Some(random_pair(n, rng));
            let toward = gen.generate_with(n, rng);
            case.other =
                Some(aggregate(&toward, case.rules, None).expect("generated profiles aggregate"));
            case
        }
        Suite::Invariance => {
            let mut case = Case::new(gen.generate(rng), pick_variant(rng));
            let n = case.profile.candidates.len();
            case.copies = rng.gen_range(2..=4);
            case.perm = (0..n).collect();
            case.perm.shuffle(rng);
            case
        }
        Suite::Paths => Case::new(gen.clone().candidates(2..=6).generate(rng), Variant::Main),
        Suite::Projection => {
            let mut case = Case::new(
                gen.clone().candidates(2..=6).generate(rng),
                pick_variant(rng),
            );
            case.rules = random_rules(rng);
            case
        }
    }
}

/// Runs the suite's check on one case.
pub fn evaluate(suite: Suite, case: &Case) -> Outcome {
    let l = case.llull();
    let v = case.variant;
    match suite {
        Suite::OrderIndependence => check_order_independence(&l, v),
        Suite::CondorcetSmith => check_condorcet_smith(&l, v),
        Suite::CloneConsistency => check_clone_consistency(&l, &case.subset, v),
        Suite::Monotonicity => match &case.other {
            Some(after) => check_monotonicity(&l, after, case.subset[0], v),
            None => check_monotonicity(&l, &l, 0, v),
        },
        Suite::Decomposition => check_decomposition(&l, &case.subset, v),
        Suite::ApprovalAgreement => check_approval_agreement(&case.profile),
        Suite::Continuity => {
            let toward = case.other.clone().unwrap_or_else(|| l.clone());
            check_continuity(&l, &toward, &continuity_steps(), v)
        }
        Suite::Invariance => {
            let perm: Vec<usize> = if case.perm.is_empty() {
                (0..l.n()).rev().collect()
            } else {
                case.perm.clone()
            };
            check_invariance(&case.profile, case.copies.max(2), &perm, v)
        }
        Suite::Paths => check_paths(&l),
        Suite::Projection => check_projection(&l, v),
    }
}

/// Drops ballots one at a time while the case keeps failing. Checks that
/// depend on a second matrix keep it unchanged.
pub fn minimize(suite: Suite, case: &Case) -> Case {
    let mut best = case.clone();
    let mut i = 0;
    while i < best.profile.ballots.len() {
        let mut trial = best.clone();
        trial.profile.ballots.remove(i);
        if dims_match(&trial) && evaluate(suite, &trial).verdict.is_fail() {
            best = trial;
        } else {
            i += 1;
        }
    }
    best
}

fn dims_match(case: &Case) -> bool {
    let n = case.profile.candidates.len();
    case.other.as_ref().is_none_or(|o| o.n() == n)
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub case: usize,
    pub message: String,
    /// Minimized profile in ballot-file format.
    pub ballots: String,
    /// Its Llull matrix as CSV.
    pub matrix: String,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case {}: {}", self.case, self.message)?;
        writeln!(f, "{}", self.detail)?;
        writeln!(f, "--- ballots ---\n{}", self.ballots.trim_end())?;
        write!(f, "--- matrix ---\n{}", self.matrix.trim_end())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    pub vacuous: usize,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<20} cases {:>4}  pass {:>4}  vacuous {:>4}  fail {:>3}  notes {:>3}  {:.2}s",
            if self.ok() { "PASS" } else { "FAIL" },
            self.suite.name(),
            self.cases,
            self.passed,
            self.vacuous,
            self.failures.len(),
            self.notes.len(),
            self.elapsed.as_secs_f64()
        )
    }
}

fn describe(case: &Case) -> String {
    let mut parts = vec![
        format!("variant {}", case.variant),
        format!("rules {}", case.rules),
    ];
    if !case.subset.is_empty() {
        parts.push(format!("subset {:?}", case.subset));
    }
    if let Some((x, y)) = case.tie {
        parts.push(format!("tied pair {x}, {y}"));
    }
    if let Some(o) = &case.other {
        parts.push(format!(
            "second matrix:\n{}",
            write_matrix_csv(&case.profile.candidates, o).trim_end()
        ));
    }
    if !case.perm.is_empty() {
        parts.push(format!("copies {} renaming {:?}", case.copies, case.perm));
    }
    parts.join("; ")
}

/// Runs `cases` random cases (after the suite's fixtures) with seeds
/// derived from `seed`. Results do not depend on the thread count.
pub fn run_suite(suite: Suite, seed: u64, cases: usize) -> SuiteReport {
    let started = Instant::now();
    let fixed: Vec<Case> = suite
        .fixtures()
        .into_iter()
        .map(|p| {
            Case::new(
                p,
                if suite == Suite::ApprovalAgreement {
                    Variant::MarginBased
                } else {
                    Variant::Main
                },
            )
        })
        .collect();
    let total = fixed.len() + cases;
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(total.max(1));
    let mut results: Vec<(usize, Case, Outcome)> = Vec::with_capacity(total);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let fixed = &fixed;
                scope.spawn(move || {
                    (t..total)
                        .step_by(threads)
                        .map(|i| {
                            let case = if i < fixed.len() {
                                fixed[i].clone()
                            } else {
                                generate(
                                    suite,
                                    &mut case_rng(seed, suite.index(), (i - fixed.len()) as u64),
                                )
                            };
                            let outcome = evaluate(suite, &case);
                            (i, case, outcome)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            results.extend(h.join().expect("worker panicked"));
        }
    });
    results.sort_by_key(|r| r.0);
    let mut report = SuiteReport {
        suite,
        seed,
        cases: total,
        passed: 0,
        vacuous: 0,
        failures: Vec::new(),
        notes: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for (i, case, outcome) in results {
        report
            .notes
            .extend(outcome.notes.into_iter().map(|n| format!("case {i}: {n}")));
        match outcome.verdict {
            Verdict::Pass => report.passed += 1,
            Verdict::Vacuous(_) => report.vacuous += 1,
            Verdict::Fail(message) => {
                let small = minimize(suite, &case);
                report.failures.push(Failure {
                    case: i,
                    message,
                    ballots: small.profile.to_text(),
                    matrix: write_matrix_csv(&small.profile.candidates, &small.llull()),
                    detail: describe(&small),
                });
            }
        }
    }
    report.elapsed = started.elapsed();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn generation_is_reproducible() {
        for s in Suite::ALL {
            let a = generate(s, &mut case_rng(11, s.index(), 5));
            let b = generate(s, &mut case_rng(11, s.index(), 5));
            assert_eq!(a.profile, b.profile);
            assert_eq!(a.subset, b.subset);
            assert_eq!(a.variant, b.variant);
        }
    }
}
