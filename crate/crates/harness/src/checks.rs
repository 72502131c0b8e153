//! Individual property checks. Each returns a verdict and optional
//! informational notes.

use crate::generator::complement;
use crate::oracle::oracle_paths;
use clc_core::closure::{
    maxmin_closure, minmax_closure, variant_margins, IndirectScores, VariantMargins,
};
use clc_core::order::{enumerate_admissible_orders, OrderError};
use clc_core::projection::{Projection, ProjectionError};
use clc_core::properties::{check_intervals, check_projected, check_rates, is_fixed_point};
use clc_core::qp::DEFAULT_TOLERANCE;
use clc_core::rational::{half, int, ratio, Rational};
use clc_core::{
    aggregate, run_matrix, run_profile, Ballot, CandidateSet, InterpretationRules, LlullMatrix,
    PipelineError, Profile, RunOptions, RunReport, SquareMatrix, UnlistedPair, Variant,
};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Absolute tolerance for comparing rates and scores.
pub const TOL: f64 = 1e-9;

/// Largest number of admissible orders visited per case.
pub const ORDER_LIMIT: usize = 720;

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Pass,
    /// The precondition did not hold, so nothing was checked.
    Vacuous(String),
    Fail(String),
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::Vacuous(why) => write!(f, "vacuous ({why})"),
            Verdict::Fail(why) => write!(f, "FAIL: {why}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub verdict: Verdict,
    /// Observations that never fail a case.
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn pass() -> Self {
        Outcome {
            verdict: Verdict::Pass,
            notes: Vec::new(),
        }
    }

    pub fn vacuous(why: impl Into<String>) -> Self {
        Outcome {
            verdict: Verdict::Vacuous(why.into()),
            notes: Vec::new(),
        }
    }

    pub fn fail(why: impl Into<String>) -> Self {
        Outcome {
            verdict: Verdict::Fail(why.into()),
            notes: Vec::new(),
        }
    }

    fn note(mut self, note: String) -> Self {
        self.notes.push(note);
        self
    }
}

/// Turns `Err(why)` into a failing outcome.
fn outcome(result: Result<Vec<String>, String>) -> Outcome {
    match result {
        Ok(notes) => Outcome {
            verdict: Verdict::Pass,
            notes,
        },
        Err(why) => Outcome::fail(why),
    }
}

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn not_admissible(e: &PipelineError) -> bool {
    matches!(
        e,
        PipelineError::Projection(ProjectionError::Order(OrderError::NotAdmissible { .. }))
    )
}

/// Runs `variant` on a matrix; `Ok(None)` when the variant has no
/// admissible order for it.
fn run(
    llull: &LlullMatrix,
    variant: Variant,
    order: Option<Vec<usize>>,
) -> Result<Option<RunReport>, String> {
    let options = RunOptions {
        order,
        ..RunOptions::variant(variant)
    };
    match run_matrix(CandidateSet::numbered(llull.n()), llull.clone(), options) {
        Ok(r) => Ok(Some(r)),
        Err(e) if not_admissible(&e) && !variant.guarantees_admissible() => Ok(None),
        Err(e) => Err(format!("{variant}: {e}")),
    }
}

fn margins_of(llull: &LlullMatrix, variant: Variant) -> VariantMargins {
    variant_margins(&IndirectScores::compute(llull, variant), variant)
        .expect("closure computed for variant")
}

/// Position of each candidate's group in the social ranking.
fn levels(report: &RunReport) -> Vec<usize> {
    report.ranking.group_of(report.rates.len())
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Largest rate difference across all admissible orders, and the number
/// of orders visited. `None` when there is no admissible order.
pub fn order_discrepancy(
    llull: &LlullMatrix,
    variant: Variant,
) -> Result<Option<(f64, usize)>, String> {
    let orders = enumerate_admissible_orders(&margins_of(llull, variant), ORDER_LIMIT);
    let Some(first) = orders.first() else {
        return Ok(None);
    };
    let reference =
        run(llull, variant, Some(first.sequence.clone()))?.ok_or("first order rejected")?;
    let mut worst: f64 = 0.0;
    for order in &orders[1..] {
        let other = run(llull, variant, Some(order.sequence.clone()))?
            .ok_or_else(|| format!("order {:?} rejected", order.sequence))?;
        worst = worst.max(max_diff(&reference.rates.r, &other.rates.r));
    }
    Ok(Some((worst, orders.len())))
}

/// Rates agree across every admissible order.
pub fn check_order_independence(llull: &LlullMatrix, variant: Variant) -> Outcome {
    if llull.n() > 6 {
        return Outcome::vacuous("more than six candidates");
    }
    match order_discrepancy(llull, variant) {
        Err(e) => Outcome::fail(e),
        Ok(None) => Outcome::vacuous(format!("{variant} has no admissible order")),
        Ok(Some((worst, count))) if worst > TOL => Outcome::fail(format!(
            "{variant}: rates differ by {worst:e} across {count} orders"
        )),
        Ok(Some(_)) => Outcome::pass(),
    }
}

/// Every split where each member of one side beats each member of the
/// other by an absolute majority must show in `ν` and in the rates.
pub fn check_condorcet_smith(llull: &LlullMatrix, variant: Variant) -> Outcome {
    let n = llull.n();
    if n > 12 {
        return Outcome::vacuous("too many candidates to enumerate splits");
    }
    let report = match run(llull, variant, None) {
        Ok(Some(r)) => r,
        Ok(None) => return Outcome::vacuous(format!("{variant} has no admissible order")),
        Err(e) => return Outcome::fail(e),
    };
    let level = levels(&report);
    let margins = &report.projection.margins;
    let mut splits = 0;
    for mask in 1u32..(1 << n) - 1 {
        let top: Vec<usize> = (0..n).filter(|&x| mask & (1 << x) != 0).collect();
        let rest = complement(n, &top);
        let qualifies = top
            .iter()
            .all(|&x| rest.iter().all(|&y| llull.score(x, y) > &half()));
        if !qualifies {
            continue;
        }
        splits += 1;
        for &x in &top {
            for &y in &rest {
                if !margins.get(x, y).is_positive() {
                    return Outcome::fail(format!(
                        "{variant}: {x} beats {y} by a majority but not indirectly"
                    ));
                }
                if report.rates.r[x] >= report.rates.r[y] || level[x] >= level[y] {
                    return Outcome::fail(format!(
                        "{variant}: {x} beats {y} by a majority but rates are {} and {}",
                        report.rates.r[x], report.rates.r[y]
                    ));
                }
            }
        }
    }
    let mut out = if splits == 0 {
        Outcome::vacuous("no majority split")
    } else {
        Outcome::pass()
    };
    // Margin-form winner: positive direct margin over everyone.
    let direct = llull.margins();
    for w in 0..n {
        let wins = (0..n)
            .filter(|&y| y != w)
            .all(|y| direct.0[(w, y)].is_positive());
        if wins && (report.ranking.groups[0] != vec![w]) {
            out = out.note(format!(
                "{variant}: margin-form winner {w} is not the sole top"
            ));
        }
    }
    out
}

fn autonomous(llull: &LlullMatrix, set: &[usize]) -> bool {
    complement(llull.n(), set).iter().all(|&x| {
        set.iter().all(|&a| {
            llull.score(a, x) == llull.score(set[0], x)
                && llull.score(x, a) == llull.score(x, set[0])
        })
    })
}

/// Relation between two candidates in `ν` and in the rate preorder.
fn relation(report: &RunReport, level: &[usize], x: usize, y: usize) -> (bool, bool, Ordering) {
    let m = &report.projection.margins;
    (
        m.get(x, y).is_positive(),
        m.get(y, x).is_positive(),
        level[x].cmp(&level[y]),
    )
}

/// An autonomous set stays autonomous for `ν` and the rate preorder, and
/// contracting it commutes with the ranking.
pub fn check_clone_consistency(llull: &LlullMatrix, clones: &[usize], variant: Variant) -> Outcome {
    if clones.len() < 2 {
        return Outcome::vacuous("clone set has fewer than two members");
    }
    if !autonomous(llull, clones) {
        return Outcome::vacuous("set is not autonomous for the matrix");
    }
    let full = match run(llull, variant, None) {
        Ok(Some(r)) => r,
        Ok(None) => return Outcome::vacuous(format!("{variant} has no admissible order")),
        Err(e) => return Outcome::fail(e),
    };
    let level = levels(&full);
    let outside = complement(llull.n(), clones);
    for &x in &outside {
        let reference = relation(&full, &level, clones[0], x);
        for &a in &clones[1..] {
            if relation(&full, &level, a, x) != reference {
                return Outcome::fail(format!(
                    "{variant}: clones {} and {a} relate differently to {x}",
                    clones[0]
                ));
            }
        }
    }
    let mut keep = outside.clone();
    keep.push(clones[0]);
    keep.sort_unstable();
    let contracted = match run(&llull.restrict(&keep), variant, None) {
        Ok(Some(r)) => r,
        Ok(None) => {
            return Outcome::fail(format!("{variant}: contraction has no admissible order"))
        }
        Err(e) => return Outcome::fail(e),
    };
    let small = levels(&contracted);
    for i in 0..keep.len() {
        for j in 0..keep.len() {
            if i != j
                && relation(&contracted, &small, i, j) != relation(&full, &level, keep[i], keep[j])
            {
                return Outcome::fail(format!(
                    "{variant}: contraction changes the relation between {} and {}",
                    keep[i], keep[j]
                ));
            }
        }
    }
    Outcome::pass()
}

/// Whether `after` only raises `a`'s row and lowers `a`'s column.
fn is_raise(before: &LlullMatrix, after: &LlullMatrix, a: usize) -> bool {
    before.scores().off_diagonal().all(|(x, y)| {
        let (old, new) = (before.score(x, y), after.score(x, y));
        if x == a {
            new >= old
        } else if y == a {
            new <= old
        } else {
            new == old
        }
    })
}

/// Raising `a` against the others never hurts `a`.
pub fn check_monotonicity(
    before: &LlullMatrix,
    after: &LlullMatrix,
    a: usize,
    variant: Variant,
) -> Outcome {
    if !is_raise(before, after, a) {
        return Outcome::vacuous("second matrix is not a raise of the first");
    }
    let (old, new) = match (run(before, variant, None), run(after, variant, None)) {
        (Ok(Some(o)), Ok(Some(n))) => (o, n),
        (Err(e), _) | (_, Err(e)) => return Outcome::fail(e),
        _ => return Outcome::vacuous(format!("{variant} has no admissible order")),
    };
    outcome((|| {
        if variant == Variant::Main {
            let (s, t) = (maxmin_closure(before), maxmin_closure(after));
            for y in (0..before.n()).filter(|&y| y != a) {
                ensure(t[(a, y)] >= s[(a, y)] && t[(y, a)] <= s[(y, a)], || {
                    format!("indirect scores of {a} against {y} moved the wrong way")
                })?;
            }
        }
        let (lo, ln) = (levels(&old), levels(&new));
        for y in (0..before.n()).filter(|&y| y != a) {
            ensure(lo[a] >= lo[y] || ln[a] <= ln[y], || {
                format!(
                    "{variant}: {a} ahead of {y} before ({} < {}) but behind after ({} > {})",
                    old.rates.r[a], old.rates.r[y], new.rates.r[a], new.rates.r[y]
                )
            })?;
        }
        if old.ranking.groups[0] == vec![a] {
            ensure(new.ranking.groups[0] == vec![a], || {
                format!("{variant}: {a} was the sole winner and no longer is")
            })?;
        }
        Ok(Vec::new())
    })())
}

/// A set listed above everyone else on every ballot takes the top rates,
/// and its rates equal those of the election restricted to it.
pub fn check_decomposition(llull: &LlullMatrix, top: &[usize], variant: Variant) -> Outcome {
    let n = llull.n();
    let rest = complement(n, top);
    if top.is_empty() || rest.is_empty() {
        return Outcome::vacuous("trivial split");
    }
    if !top
        .iter()
        .all(|&x| rest.iter().all(|&y| llull.score(x, y).is_one()))
    {
        return Outcome::vacuous("set is not unanimously above the rest");
    }
    let full = match run(llull, variant, None) {
        Ok(Some(r)) => r,
        Ok(None) => return Outcome::vacuous(format!("{variant} has no admissible order")),
        Err(e) => return Outcome::fail(e),
    };
    let restricted = match run(&llull.restrict(top), variant, None) {
        Ok(Some(r)) => r,
        Ok(None) => {
            return Outcome::fail(format!("{variant}: restriction has no admissible order"))
        }
        Err(e) => return Outcome::fail(e),
    };
    outcome((|| {
        let k = top.len() as f64;
        let sum: f64 = top.iter().map(|&x| full.rates.r[x]).sum();
        ensure((sum - k * (k + 1.0) / 2.0).abs() <= TOL, || {
            format!(
                "{variant}: top rates sum to {sum}, expected {}",
                k * (k + 1.0) / 2.0
            )
        })?;
        for (i, &x) in top.iter().enumerate() {
            ensure(
                (full.rates.r[x] - restricted.rates.r[i]).abs() <= TOL,
                || {
                    format!(
                        "{variant}: {x} rates {} in full, {} restricted",
                        full.rates.r[x], restricted.rates.r[i]
                    )
                },
            )?;
        }
        check_unanimous_first(llull, &full)?;
        Ok(Vec::new())
    })())
}

/// `r(x) = 1` exactly when every voter puts `x` above every other.
fn check_unanimous_first(llull: &LlullMatrix, report: &RunReport) -> Result<(), String> {
    let n = llull.n();
    for x in 0..n {
        let unanimous = (0..n)
            .filter(|&y| y != x)
            .all(|y| llull.score(x, y).is_one());
        let first = (report.rates.r[x] - 1.0).abs() <= TOL;
        ensure(unanimous == first, || {
            format!(
                "{x}: rate {} but unanimous first is {unanimous}",
                report.rates.r[x]
            )
        })?;
    }
    Ok(())
}

/// Approval-only readings: whether two approved, and two unapproved,
/// candidates count as tied.
pub const APPROVAL_READINGS: [(bool, bool); 3] = [(true, false), (true, true), (false, true)];

/// Pairwise counts of an approval profile computed set by set.
pub fn approval_counts(
    profile: &Profile,
    approved_tied: bool,
    unapproved_tied: bool,
) -> SquareMatrix<Rational> {
    let n = profile.candidates.len();
    let mut v = SquareMatrix::filled(n, Rational::zero());
    for b in &profile.ballots {
        let set = b.approved().unwrap_or_default();
        for x in 0..n {
            for y in (0..n).filter(|&y| y != x) {
                let value = match (set.contains(&x), set.contains(&y)) {
                    (true, false) => Rational::one(),
                    (true, true) if approved_tied => half(),
                    (false, false) if unapproved_tied => half(),
                    _ => Rational::zero(),
                };
                v[(x, y)] += value * &b.weight;
            }
        }
    }
    v
}

fn approval_scores(profile: &Profile) -> Vec<Rational> {
    let mut a = vec![Rational::zero(); profile.candidates.len()];
    for b in &profile.ballots {
        for c in b.approved().unwrap_or_default() {
            a[c] += &b.weight;
        }
    }
    a
}

/// Margins equal approval differences under every reading, and the
/// margin-based ranking is the approval ranking.
pub fn check_approval_agreement(profile: &Profile) -> Outcome {
    if !profile.ballots.iter().all(Ballot::is_approval_only) {
        return Outcome::vacuous("profile has ranked ballots");
    }
    let n = profile.candidates.len();
    let a = approval_scores(profile);
    outcome((|| {
        for (approved_tied, unapproved_tied) in APPROVAL_READINGS {
            let v = approval_counts(profile, approved_tied, unapproved_tied);
            for (x, y) in v.off_diagonal() {
                ensure(&v[(x, y)] - &v[(y, x)] == &a[x] - &a[y], || {
                    format!("margin {x}{y} differs from approval difference")
                })?;
            }
            if approved_tied {
                let rules = InterpretationRules {
                    unlisted_pair: if unapproved_tied {
                        UnlistedPair::Tied
                    } else {
                        UnlistedPair::NoInfo
                    },
                    ..InterpretationRules::default()
                };
                let l = aggregate(profile, rules, None).map_err(|e| e.to_string())?;
                ensure(l.absolute() == v, || {
                    format!("aggregation under {rules} disagrees")
                })?;
            }
        }
        let options = RunOptions {
            approval_only: true,
            ..RunOptions::variant(Variant::MarginBased)
        };
        let report = run_profile(profile, options).map_err(|e| e.to_string())?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| a[y].cmp(&a[x]).then(x.cmp(&y)));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for x in order {
            match groups.last_mut() {
                Some(g) if a[g[0]] == a[x] => g.push(x),
                _ => groups.push(vec![x]),
            }
        }
        ensure(report.ranking.groups == groups, || {
            format!(
                "margin-based ranking {:?}, approval ranking {groups:?}",
                report.ranking.groups
            )
        })?;
        Ok(Vec::new())
    })())
}

/// Default perturbation sizes for the continuity check.
pub fn continuity_steps() -> Vec<Rational> {
    (2..=6).map(|k| ratio(1, 10i64.pow(k))).collect()
}

/// `(1 - ε) L + ε W`.
pub fn blend(llull: &LlullMatrix, toward: &LlullMatrix, eps: &Rational) -> LlullMatrix {
    let keep = Rational::one() - eps;
    let scores = SquareMatrix::from_fn(llull.n(), |x, y| {
        if x == y {
            Rational::zero()
        } else {
            llull.score(x, y) * &keep + toward.score(x, y) * eps
        }
    });
    LlullMatrix::from_relative(scores).expect("convex combination stays in the domain")
}

/// Average of a matrix and its copy with `x` and `y` swapped, which makes
/// the two candidates exactly tied.
pub fn symmetrize(llull: &LlullMatrix, x: usize, y: usize) -> LlullMatrix {
    let swap = |c: usize| {
        if c == x {
            y
        } else if c == y {
            x
        } else {
            c
        }
    };
    let scores = SquareMatrix::from_fn(llull.n(), |p, q| {
        if p == q {
            Rational::zero()
        } else {
            (llull.score(p, q) + llull.score(swap(p), swap(q))) * half()
        }
    });
    LlullMatrix::from_relative(scores).expect("average stays in the domain")
}

/// Rates move less and less as the matrix approaches `llull` along the
/// segment toward `toward`.
pub fn check_continuity(
    llull: &LlullMatrix,
    toward: &LlullMatrix,
    steps: &[Rational],
    variant: Variant,
) -> Outcome {
    let base = match run(llull, variant, None) {
        Ok(Some(r)) => r,
        Ok(None) => return Outcome::vacuous(format!("{variant} has no admissible order")),
        Err(e) => return Outcome::fail(e),
    };
    let mut changes = Vec::with_capacity(steps.len());
    for eps in steps {
        match run(&blend(llull, toward, eps), variant, None) {
            Ok(Some(r)) => changes.push(max_diff(&base.rates.r, &r.rates.r)),
            Ok(None) => {
                return Outcome::vacuous(format!("{variant} has no admissible order nearby"))
            }
            Err(e) => return Outcome::fail(e),
        }
    }
    let shown: Vec<String> = changes.iter().map(|d| format!("{d:.3e}")).collect();
    let trace = format!("{variant}: changes [{}]", shown.join(", "));
    if let Some(w) = changes.windows(2).find(|w| w[1] > w[0] + TOL) {
        return Outcome::fail(format!("{trace}: grew from {:e} to {:e}", w[0], w[1]));
    }
    let (first, last) = (changes[0], changes[changes.len() - 1]);
    if last > 1e-2 * first + TOL {
        return Outcome::fail(format!("{trace}: does not shrink toward zero"));
    }
    Outcome::pass()
}

/// Duplicating every ballot leaves rates unchanged and renaming
/// candidates permutes them.
pub fn check_invariance(
    profile: &Profile,
    copies: usize,
    perm: &[usize],
    variant: Variant,
) -> Outcome {
    let options = RunOptions::variant(variant);
    let base = match run_profile(profile, options.clone()) {
        Ok(r) => r,
        Err(e) if not_admissible(&e) && !variant.guarantees_admissible() => {
            return Outcome::vacuous(format!("{variant} has no admissible order"))
        }
        Err(e) => return Outcome::fail(e.to_string()),
    };
    let duplicated = Profile::new(
        profile.candidates.clone(),
        profile
            .ballots
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.clone(), copies))
            .collect(),
    );
    let renamed = Profile::new(
        profile.candidates.clone(),
        profile
            .ballots
            .iter()
            .map(|b| Ballot {
                groups: b
                    .groups
                    .iter()
                    .map(|g| g.iter().map(|&c| perm[c]).collect())
                    .collect(),
                ..b.clone()
            })
            .collect(),
    );
    outcome((|| {
        let dup =
            run_profile(&duplicated, options.clone()).map_err(|e| format!("duplicated: {e}"))?;
        ensure(max_diff(&base.rates.r, &dup.rates.r) <= TOL, || {
            format!(
                "{variant}: duplication changed rates {:?} to {:?}",
                base.rates.r, dup.rates.r
            )
        })?;
        let ren = match run_profile(&renamed, options.clone()) {
            Ok(r) => r,
            // Tie-splitting by file order may land on a non-admissible
            // order for the renamed profile only.
            Err(e) if not_admissible(&e) && !variant.guarantees_admissible() => {
                return Ok(Vec::new())
            }
            Err(e) => return Err(format!("renamed: {e}")),
        };
        for x in 0..perm.len() {
            ensure(
                (base.rates.r[x] - ren.rates.r[perm[x]]).abs() <= TOL,
                || format!("{variant}: renaming {x} to {} changed its rate", perm[x]),
            )?;
        }
        Ok(Vec::new())
    })())
}

/// Floyd-Warshall closures agree with path enumeration.
pub fn check_paths(llull: &LlullMatrix) -> Outcome {
    let (maxmin, minmax) = oracle_paths(llull);
    if maxmin != maxmin_closure(llull) {
        return Outcome::fail("max-min closure disagrees with path enumeration");
    }
    if minmax != minmax_closure(llull) {
        return Outcome::fail("min-max closure disagrees with path enumeration");
    }
    Outcome::pass()
}

/// Structural inequalities of the projection and its idempotence.
pub fn check_projection(llull: &LlullMatrix, variant: Variant) -> Outcome {
    let projection = match Projection::compute(llull, variant, None, DEFAULT_TOLERANCE) {
        Ok(p) => p,
        Err(ProjectionError::Order(_)) if !variant.guarantees_admissible() => {
            return Outcome::vacuous(format!("{variant} has no admissible order"))
        }
        Err(e) => return Outcome::fail(format!("{variant}: {e}")),
    };
    outcome((|| {
        let pm = &projection.projected;
        let seq = &projection.order.sequence;
        let tag = |v: clc_core::properties::Violation| format!("{variant}: {v}");
        check_intervals(&projection.intervals, TOL).map_err(tag)?;
        check_projected(pm, seq, TOL).map_err(tag)?;
        let rates = clc_core::rating::rank_like_rates(pm, clc_core::RateFormula::Main);
        check_rates(&rates, pm, &projection.margins, TOL).map_err(tag)?;
        ensure(is_fixed_point(&pm.pi, seq, TOL), || {
            format!("{variant}: projection is not a fixed point")
        })?;
        let again = pm.to_llull(1e-12).map_err(|e| e.to_string())?;
        let second =
            Projection::compute(&again, Variant::Main, Some(seq.clone()), DEFAULT_TOLERANCE)
                .map_err(|e| format!("{variant}: reprojection: {e}"))?;
        let drift = pm
            .pi
            .off_diagonal()
            .map(|(x, y)| (pm.get(x, y) - second.projected.get(x, y)).abs())
            .fold(0.0, f64::max);
        ensure(drift <= TOL, || {
            format!("{variant}: reprojection moved scores by {drift:e}")
        })?;
        Ok(Vec::new())
    })())
}

/// The sole top candidate, if there is one.
pub fn winner(llull: &LlullMatrix, variant: Variant) -> Option<usize> {
    match run(llull, variant, None) {
        Ok(Some(r)) if r.ranking.groups[0].len() == 1 => Some(r.ranking.groups[0][0]),
        _ => None,
    }
}

/// Scores that rise by `steps / V` for `a` against a random subset.
pub fn raise(llull: &LlullMatrix, a: usize, rng: &mut impl rand::Rng) -> LlullMatrix {
    let unit = Rational::one() / llull.total_voters();
    let mut scores = llull.scores().clone();
    for y in (0..llull.n()).filter(|&y| y != a) {
        if rng.gen_bool(0.5) {
            let room = Rational::one() - &scores[(a, y)] - &scores[(y, a)];
            let step = &unit * int(rng.gen_range(1..=2));
            scores[(a, y)] += if step < room { step } else { room };
        }
        if rng.gen_bool(0.5) {
            let step = &unit * int(rng.gen_range(1..=2));
            let take = if step < scores[(y, a)] {
                step
            } else {
                scores[(y, a)].clone()
            };
            scores[(y, a)] -= take;
        }
    }
    LlullMatrix::from_relative(scores).expect("raise stays in the domain")
}
