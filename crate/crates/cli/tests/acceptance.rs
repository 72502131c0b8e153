//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p clc-cli --test acceptance -- --nocapture` to see
//! the report.

use clc_core::closure::{maxmin_closure, Variant};
use clc_core::fixtures;
use clc_core::projection::{turnout_problem, Projection};
use clc_core::qp::{
    solve_active_set, solve_dykstra, DifferenceConstraint, QpProblem, DEFAULT_TOLERANCE,
};
use clc_core::rational::{int, parse_rational, to_f64, Rational};
use clc_core::{
    aggregate, parse_matrix_csv, parse_profile, run_matrix, run_profile, Ballot, CandidateSet,
    InterpretationRules, LlullMatrix, Profile, RunOptions, SquareMatrix,
};
use clc_harness::checks::{check_projection, order_discrepancy, symmetrize, Verdict};
use clc_harness::{case_rng, run_suite, ProfileGenerator, Suite};
use num_traits::{One, Zero};
use rand::Rng;
use std::time::{Duration, Instant};

const SEED: u64 = 20_240_601;

type Criterion = fn() -> Result<String, String>;

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

/// Rows of absolute values in the given candidate order; `*` on the
/// diagonal.
fn rows(order: &[usize], text: &[&str]) -> SquareMatrix<Rational> {
    let n = order.len();
    let mut m = SquareMatrix::filled(n, Rational::zero());
    for (i, line) in text.iter().enumerate() {
        for (j, cell) in line.split_whitespace().enumerate() {
            if cell != "*" {
                m[(order[i], order[j])] = parse_rational(cell).unwrap();
            }
        }
    }
    m
}

fn compare(
    name: &str,
    got: &SquareMatrix<Rational>,
    scale: &Rational,
    expected: &SquareMatrix<Rational>,
) -> Result<(), String> {
    for (x, y) in got.off_diagonal() {
        ensure(&got[(x, y)] * scale == expected[(x, y)], || {
            format!(
                "{name}[{x}][{y}] = {} expected {}",
                &got[(x, y)] * scale,
                expected[(x, y)]
            )
        })?;
    }
    Ok(())
}

fn close(got: &[f64], expected: &[f64], tol: f64) -> Result<f64, String> {
    let worst = got
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(worst <= tol, || {
        format!("rates {got:?} differ from {expected:?} by {worst:e}")
    })?;
    Ok(worst)
}

fn palace() -> Result<String, String> {
    let started = Instant::now();
    let p = parse_profile(fixtures::PALACE_1652).map_err(|e| e.to_string())?;
    let report = run_profile(&p, RunOptions::default()).map_err(|e| e.to_string())?;
    let six = int(6);
    let abc = [0, 1, 2, 3, 4, 5];
    let order = [1, 0, 4, 5, 3, 2];
    let pr = &report.projection;
    compare(
        "V*",
        &maxmin_closure(&report.llull),
        &six,
        &rows(
            &abc,
            &[
                "* 2 5 4 3 5",
                "4 * 6 6 4 5",
                "1 1 * 1 1 1",
                "2 2 3 * 2 2",
                "3 2 3 3 * 3",
                "3 2 5 4 3 *",
            ],
        ),
    )?;
    let half = |n: i64| Rational::new(n.into(), 2.into());
    ensure(
        pr.copeland == vec![half(5), int(1), int(6), int(5), int(3), half(7)],
        || format!("Copeland ranks {:?}", pr.copeland),
    )?;
    ensure(pr.order.sequence == order, || {
        format!("order {:?}", pr.order.sequence)
    })?;
    compare(
        "M^σ",
        &pr.intermediate.msigma,
        &six,
        &rows(
            &order,
            &[
                "* 2 2 3 4 5",
                "-2 * 0 2 2 4",
                "-2 0 * 0 1 2",
                "-3 -2 0 * 1 2",
                "-4 -2 -1 -1 * 2",
                "-5 -4 -2 -2 -2 *",
            ],
        ),
    )?;
    let exact = pr
        .exact()
        .ok_or("turnout optimum not certified in rationals")?;
    compare(
        "T^σ",
        &exact.tsigma,
        &six,
        &rows(
            &order,
            &[
                "* 6 6 6 6 6",
                "6 * 6 6 16/3 14/3",
                "6 6 * 6 16/3 14/3",
                "6 6 6 * 16/3 14/3",
                "6 16/3 16/3 16/3 * 4",
                "6 14/3 14/3 14/3 4 *",
            ],
        ),
    )?;
    compare(
        "V^π",
        &exact.pi,
        &six,
        &rows(
            &order,
            &[
                "* 4 4 4 4 4",
                "2 * 3 3 19/6 19/6",
                "2 3 * 3 19/6 19/6",
                "2 3 3 * 19/6 19/6",
                "2 13/6 13/6 13/6 * 3",
                "1 1 1 1 1 *",
            ],
        ),
    )?;
    let worst = close(
        &report.rates.r,
        &[3.6111, 2.6667, 5.1667, 4.0833, 3.6111, 3.6111],
        1e-4,
    )?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "V*, Copeland, M^σ, T^σ, V^π exact; rate error {worst:.1e}; {elapsed:.1?}"
    ))
}

fn debian() -> Result<String, String> {
    let started = Instant::now();
    let input = parse_matrix_csv(fixtures::DEBIAN_2006).map_err(|e| e.to_string())?;
    ensure(input.llull.total_voters() == &int(421), || {
        "V is not 421".into()
    })?;
    let report = run_matrix(input.candidates, input.llull, RunOptions::default())
        .map_err(|e| e.to_string())?;
    let worst = close(
        &report.rates.r,
        &[
            4.1105, 5.9145, 3.6926, 3.6784, 4.1105, 6.7197, 4.5720, 5.8100,
        ],
        1e-4,
    )?;
    let pi = &report.projection.projected;
    ensure((pi.get(0, 4) - pi.get(4, 0)).abs() <= 1e-9, || {
        "1 and 5 not tied in π".into()
    })?;
    ensure(report.ranking.groups.contains(&vec![0, 4]), || {
        "1 and 5 not grouped".into()
    })?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "rate error {worst:.1e}; 1 = 5 tie detected; {elapsed:.1?}"
    ))
}

/// Published table in listing order A..E: main, codual, balanced,
/// margin-based. The table's labels A, B, C are the listing's B, C, A.
const PCS: [[f64; 4]; 5] = [
    [3.6149, 3.6081, 3.6081, 2.8919],
    [3.6014, 3.6081, 3.6081, 2.8919],
    [3.6486, 3.6486, 3.6486, 2.9324],
    [3.7720, 3.7568, 3.7703, 3.0135],
    [4.1689, 4.2162, 4.1622, 3.2703],
];

fn pcs() -> Result<String, String> {
    let p = parse_profile(fixtures::PCS_2006).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut margin_groups = Vec::new();
    for (column, variant) in Variant::ALL.into_iter().enumerate() {
        let options = RunOptions {
            approval_only: true,
            ..RunOptions::variant(variant)
        };
        let report = run_profile(&p, options).map_err(|e| e.to_string())?;
        let expected: Vec<f64> = PCS.iter().map(|row| row[column]).collect();
        worst = worst
            .max(close(&report.rates.r, &expected, 1e-4).map_err(|e| format!("{variant}: {e}"))?);
        if variant == Variant::MarginBased {
            margin_groups = report.ranking.groups;
        }
    }
    let mut approvals = [0i64; 5];
    for b in &p.ballots {
        for c in b.approved().unwrap_or_default() {
            approvals[c] += 1;
        }
    }
    let mut by_score: Vec<Vec<usize>> = Vec::new();
    let mut sorted: Vec<usize> = (0..5).collect();
    sorted.sort_by_key(|&c| (-approvals[c], c));
    for c in sorted {
        match by_score.last_mut() {
            Some(g) if approvals[g[0]] == approvals[c] => g.push(c),
            _ => by_score.push(vec![c]),
        }
    }
    ensure(margin_groups == by_score, || {
        format!("margin-based ranking {margin_groups:?}, approval ranking {by_score:?}")
    })?;
    Ok(format!(
        "4 columns, max error {worst:.1e}; margin-based ranking = approval ranking"
    ))
}

fn single_choice() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let mut rng = case_rng(SEED, 100, case);
        let n = rng.gen_range(2..=8);
        let votes: Vec<usize> = (0..rng.gen_range(1..=25))
            .map(|_| rng.gen_range(0..n))
            .collect();
        let ballots = votes
            .iter()
            .map(|&c| Ballot::ranking(vec![vec![c]]))
            .collect();
        let p = Profile::new(CandidateSet::numbered(n), ballots);
        let report = run_profile(&p, RunOptions::default()).map_err(|e| e.to_string())?;
        for x in 0..n {
            let f = Rational::new(
                (votes.iter().filter(|&&c| c == x).count() as i64).into(),
                (votes.len() as i64).into(),
            );
            // Weighted average of 1 and N with weights f and 1 - f.
            let expected = to_f64(&(&f + (Rational::one() - &f) * int(n as i64)));
            worst = worst.max((report.rates.r[x] - expected).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "100 profiles, r = f + (1 - f) N, max deviation {worst:.1e}"
    ))
}

fn llull(p: &Profile, rules: InterpretationRules) -> LlullMatrix {
    aggregate(p, rules, None).expect("generated profiles aggregate")
}

fn order_independence() -> Result<String, String> {
    let gen = ProfileGenerator::default().candidates(2..=5);
    let (mut profiles, mut stream, mut orders, mut worst) = (0, 0u64, 0, 0.0f64);
    while profiles < 200 {
        let mut rng = case_rng(SEED, 101, stream);
        stream += 1;
        let p = gen.generate(&mut rng);
        let mut l = llull(&p, InterpretationRules::default());
        if l.is_complete() {
            continue;
        }
        // Every other profile gets an exact tie so several orders exist.
        if profiles % 2 == 1 {
            let n = l.n();
            let x = rng.gen_range(0..n);
            l = symmetrize(&l, x, (x + rng.gen_range(1..n)) % n);
        }
        profiles += 1;
        for variant in Variant::ALL {
            if let Some((d, k)) = order_discrepancy(&l, variant)? {
                worst = worst.max(d);
                orders += k;
            }
        }
    }
    ensure(worst <= 1e-9, || format!("max rate discrepancy {worst:e}"))?;
    Ok(format!(
        "200 profiles x 4 variants, {orders} orders, max discrepancy {worst:.1e}"
    ))
}

fn idempotence() -> Result<String, String> {
    let gen = ProfileGenerator::default().candidates(2..=6);
    let mut checked = 0;
    for case in 0..500 {
        let mut rng = case_rng(SEED, 102, case);
        let rules = if rng.gen_bool(0.25) {
            InterpretationRules::COMPLETING
        } else {
            InterpretationRules::default()
        };
        let l = llull(&gen.generate(&mut rng), rules);
        for variant in Variant::ALL {
            match check_projection(&l, variant).verdict {
                Verdict::Pass => checked += 1,
                Verdict::Vacuous(_) => {}
                Verdict::Fail(why) => return Err(format!("profile {case}: {why}")),
            }
        }
    }
    Ok(format!("500 profiles, {checked} projections checked"))
}

fn random_problem(rng: &mut impl Rng) -> QpProblem {
    let n = rng.gen_range(1..=15);
    let anchor: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let mut p = QpProblem::new((0..n).map(|_| rng.gen_range(-0.5..1.5)).collect());
    for (var, &a) in anchor.iter().enumerate() {
        if rng.gen_bool(0.7) {
            p.bounds[var] = Some((a - rng.gen_range(0.0..0.3), a + rng.gen_range(0.0..0.3)));
        }
    }
    for _ in 0..rng.gen_range(0..=2 * n) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            let d = anchor[i] - anchor[j];
            p.difference_constraints.push(DifferenceConstraint {
                i,
                j,
                lo: d - rng.gen_range(0.0..0.2),
                hi: d + rng.gen_range(0.0..0.2),
            });
        }
    }
    p
}

fn qp_cross_check() -> Result<String, String> {
    let gen = ProfileGenerator::default().candidates(2..=6);
    let mut worst: f64 = 0.0;
    for case in 0..300 {
        let mut rng = case_rng(SEED, 103, case);
        // Half generic instances, half turnout problems from profiles.
        let problem = if case % 2 == 0 {
            random_problem(&mut rng)
        } else {
            let l = llull(&gen.generate(&mut rng), InterpretationRules::default());
            let pr = Projection::compute(&l, Variant::Main, None, DEFAULT_TOLERANCE)
                .map_err(|e| e.to_string())?;
            turnout_problem(&l.turnouts(), &pr.intermediate)
        };
        let a = solve_active_set(&problem, DEFAULT_TOLERANCE)
            .map_err(|e| format!("instance {case}: {e}"))?;
        let d =
            solve_dykstra(&problem, 1e-13, 500_000).map_err(|e| format!("instance {case}: {e}"))?;
        let diff = a
            .point
            .iter()
            .zip(&d.point)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        ensure(diff <= 1e-6, || {
            format!("instance {case}: solvers differ by {diff:e}")
        })?;
        worst = worst.max(diff);
    }
    let mut complete = 0;
    for case in 0..50 {
        let mut rng = case_rng(SEED, 104, case);
        let n = rng.gen_range(2..=6);
        let p = ProfileGenerator {
            truncation: 0.0,
            ..ProfileGenerator::default()
        }
        .generate_with(n, &mut rng);
        let l = llull(&p, InterpretationRules::COMPLETING);
        for variant in Variant::ALL {
            let pr = Projection::compute(&l, variant, None, DEFAULT_TOLERANCE)
                .map_err(|e| e.to_string())?;
            let t = &pr.turnouts.tsigma;
            ensure(t.off_diagonal().all(|(x, y)| t[(x, y)] == 1.0), || {
                format!("complete profile {case}: {variant} turnouts not exactly 1")
            })?;
            complete += 1;
        }
    }
    Ok(format!(
        "300 instances, max difference {worst:.1e}; {complete} complete runs with τ = 1 exactly"
    ))
}

fn axiom_suites() -> Result<String, String> {
    for suite in Suite::ALL {
        let report = run_suite(suite, SEED, 100);
        ensure(report.ok(), || {
            format!("{}: {}", suite.name(), report.failures[0])
        })?;
        ensure(report.passed >= 100, || {
            format!("{}: only {} cases passed", suite.name(), report.passed)
        })?;
    }
    let started = Instant::now();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_clc"))
        .args(["verify", "--suite", "all"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(out.status.success(), || {
        String::from_utf8_lossy(&out.stdout).into_owned()
    })?;
    ensure(elapsed < Duration::from_secs(60), || {
        format!("verify --suite all took {elapsed:?}")
    })?;
    Ok(format!(
        "{} suites x 100 cases, zero failures; verify --suite all in {elapsed:.1?}",
        Suite::ALL.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, Criterion); 8] = [
        ("six-ballot election, exact intermediates", palace),
        ("421-voter matrix, rates and 1 = 5 tie", debian),
        ("37-ballot approval election, four variants", pcs),
        ("single-choice law", single_choice),
        ("order independence", order_independence),
        ("projection idempotence and inequalities", idempotence),
        ("QP cross-validation", qp_cross_check),
        ("axiom suites", axiom_suites),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let started = Instant::now();
        let result = run();
        let elapsed = started.elapsed();
        match result {
            Ok(detail) => println!("PASS  {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => {
                failures += 1;
                println!("FAIL  {name}: {why} [{elapsed:.2?}]");
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
