//! Text and JSON renderings of a run.

use clc_core::rational::{format_rational, Rational};
use clc_core::{RunReport, SquareMatrix};
use serde::Serialize;
use std::fmt::Write;

pub const SCHEMA: u32 = 1;

#[derive(Serialize)]
struct JsonReport<'a> {
    schema: u32,
    variant: String,
    rules: JsonRules,
    formula: String,
    approval_only: bool,
    total_voters: String,
    candidates: &'a [String],
    rates: Vec<JsonRate<'a>>,
    ranking: Vec<Vec<&'a str>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    intermediates: Option<JsonIntermediates<'a>>,
}

#[derive(Serialize)]
struct JsonRules {
    listed_vs_unlisted: String,
    unlisted_pair: String,
}

#[derive(Serialize)]
struct JsonRate<'a> {
    candidate: &'a str,
    rate: f64,
    rank: usize,
}

/// Rational matrices are relative scores as `"p/q"` strings; the diagonal
/// is `null`.
#[derive(Serialize)]
struct JsonIntermediates<'a> {
    scores: Vec<Vec<Option<String>>>,
    indirect_scores: Vec<Vec<Option<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    codual_indirect_scores: Option<Vec<Vec<Option<String>>>>,
    indirect_margins: Vec<Vec<Option<String>>>,
    copeland: Vec<String>,
    order: Vec<&'a str>,
    intermediate_margins: Vec<Vec<Option<String>>>,
    projected_turnouts: Vec<Vec<Option<f64>>>,
    intervals: Vec<[f64; 2]>,
    projected_scores: Vec<Vec<Option<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<JsonExact>,
}

#[derive(Serialize)]
struct JsonExact {
    projected_turnouts: Vec<Vec<Option<String>>>,
    intervals: Vec<[String; 2]>,
    projected_scores: Vec<Vec<Option<String>>>,
}

fn exact_rows(m: &SquareMatrix<Rational>) -> Vec<Vec<Option<String>>> {
    let n = m.n();
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| (x != y).then(|| format_rational(&m[(x, y)])))
                .collect()
        })
        .collect()
}

fn float_rows(m: &SquareMatrix<f64>) -> Vec<Vec<Option<f64>>> {
    let n = m.n();
    (0..n)
        .map(|x| (0..n).map(|y| (x != y).then(|| m[(x, y)])).collect())
        .collect()
}

fn rules_parts(report: &RunReport) -> JsonRules {
    let text = report.options.rules.to_string();
    let mut parts = text
        .split(", ")
        .map(|p| p.split('=').nth(1).unwrap_or_default().to_string());
    JsonRules {
        listed_vs_unlisted: parts.next().unwrap_or_default(),
        unlisted_pair: parts.next().unwrap_or_default(),
    }
}

pub fn to_json(report: &RunReport, intermediates: bool) -> String {
    let names = report.candidates.names();
    let level = report.ranking.group_of(names.len());
    let p = &report.projection;
    let json = JsonReport {
        schema: SCHEMA,
        variant: report.options.variant.to_string(),
        rules: rules_parts(report),
        formula: report.options.formula.to_string(),
        approval_only: report.options.approval_only,
        total_voters: format_rational(report.llull.total_voters()),
        candidates: names,
        rates: names
            .iter()
            .enumerate()
            .map(|(x, name)| JsonRate {
                candidate: name,
                rate: report.rates.r[x],
                rank: level[x],
            })
            .collect(),
        ranking: report
            .ranking
            .groups
            .iter()
            .map(|g| g.iter().map(|&c| names[c].as_str()).collect())
            .collect(),
        intermediates: intermediates.then(|| JsonIntermediates {
            scores: exact_rows(p.base.scores()),
            indirect_scores: exact_rows(&p.indirect.vstar),
            codual_indirect_scores: p.indirect.vbar.as_ref().map(exact_rows),
            indirect_margins: exact_rows(&p.margins.m),
            copeland: p.copeland.iter().map(format_rational).collect(),
            order: p
                .order
                .sequence
                .iter()
                .map(|&c| names[c].as_str())
                .collect(),
            intermediate_margins: exact_rows(&p.intermediate.msigma),
            projected_turnouts: float_rows(&p.turnouts.tsigma),
            intervals: p.intervals.iter().map(|iv| [iv.lo, iv.hi]).collect(),
            projected_scores: float_rows(&p.projected.pi),
            exact: p.exact().map(|e| JsonExact {
                projected_turnouts: exact_rows(&e.tsigma),
                intervals: e
                    .intervals
                    .iter()
                    .map(|(lo, hi)| [format_rational(lo), format_rational(hi)])
                    .collect(),
                projected_scores: exact_rows(&e.pi),
            }),
        }),
    };
    serde_json::to_string_pretty(&json).expect("report serializes")
}

fn table<T>(
    out: &mut String,
    title: &str,
    names: &[String],
    order: &[usize],
    cell: impl Fn(usize, usize) -> T,
) where
    T: std::fmt::Display,
{
    let width = names.iter().map(|n| n.len()).max().unwrap_or(1).max(9);
    writeln!(out, "\n{title}").unwrap();
    write!(out, "{:>width$}", "").unwrap();
    for &y in order {
        write!(out, " {:>width$}", names[y]).unwrap();
    }
    out.push('\n');
    for &x in order {
        write!(out, "{:>width$}", names[x]).unwrap();
        for &y in order {
            if x == y {
                write!(out, " {:>width$}", "*").unwrap();
            } else {
                write!(out, " {:>width$}", cell(x, y).to_string()).unwrap();
            }
        }
        out.push('\n');
    }
}

pub fn to_text(report: &RunReport, intermediates: bool) -> String {
    let names = report.candidates.names();
    let v = report.llull.total_voters();
    let mut out = String::new();
    writeln!(
        out,
        "variant {}, formula {}, {}{}, V = {}",
        report.options.variant,
        report.options.formula,
        report.options.rules,
        if report.options.approval_only {
            ", approval only"
        } else {
            ""
        },
        format_rational(v)
    )
    .unwrap();
    let level = report.ranking.group_of(names.len());
    let width = names.iter().map(|n| n.len()).max().unwrap_or(1).max(9);
    writeln!(
        out,
        "\n{:>4}  {:<width$}  {:>8}",
        "rank", "candidate", "rate"
    )
    .unwrap();
    let sorted: Vec<usize> = report.ranking.groups.iter().flatten().copied().collect();
    for &x in &sorted {
        writeln!(
            out,
            "{:>4}  {:<width$}  {:>8.4}",
            level[x], names[x], report.rates.r[x]
        )
        .unwrap();
    }
    writeln!(out, "\nranking: {}", report.ranking.display_with(names)).unwrap();
    if intermediates {
        let p = &report.projection;
        let vf = clc_core::rational::to_f64(v);
        let abs = |r: &Rational| format_rational(&(r * v));
        let file: Vec<usize> = (0..names.len()).collect();
        let seq = &p.order.sequence;
        writeln!(out, "\nValues below are absolute (relative value times V).").unwrap();
        table(&mut out, "scores V", names, &file, |x, y| {
            abs(p.base.score(x, y))
        });
        table(&mut out, "indirect scores V*", names, &file, |x, y| {
            abs(&p.indirect.vstar[(x, y)])
        });
        if let Some(vbar) = &p.indirect.vbar {
            table(&mut out, "min-max indirect scores", names, &file, |x, y| {
                abs(&vbar[(x, y)])
            });
        }
        table(&mut out, "indirect margins", names, &file, |x, y| {
            abs(&p.margins.m[(x, y)])
        });
        let copeland: Vec<String> = file
            .iter()
            .map(|&x| format!("{} {}", names[x], format_rational(&p.copeland[x])))
            .collect();
        writeln!(out, "\nCopeland ranks: {}", copeland.join(", ")).unwrap();
        let order: Vec<&str> = seq.iter().map(|&c| names[c].as_str()).collect();
        writeln!(out, "admissible order: {}", order.join(" ")).unwrap();
        table(
            &mut out,
            "intermediate margins (in order)",
            names,
            seq,
            |x, y| abs(&p.intermediate.msigma[(x, y)]),
        );
        match p.exact() {
            Some(e) => {
                table(
                    &mut out,
                    "projected turnouts (in order)",
                    names,
                    seq,
                    |x, y| abs(&e.tsigma[(x, y)]),
                );
                table(
                    &mut out,
                    "projected scores (in order)",
                    names,
                    seq,
                    |x, y| abs(&e.pi[(x, y)]),
                );
            }
            None => {
                table(
                    &mut out,
                    "projected turnouts (in order)",
                    names,
                    seq,
                    |x, y| format!("{:.4}", p.turnouts.tsigma[(x, y)] * vf),
                );
                table(
                    &mut out,
                    "projected scores (in order)",
                    names,
                    seq,
                    |x, y| format!("{:.4}", p.projected.get(x, y) * vf),
                );
            }
        }
        writeln!(out, "\nintervals along the order:").unwrap();
        for (w, iv) in seq.windows(2).zip(&p.intervals) {
            writeln!(
                out,
                "  {} {}: [{:.4}, {:.4}]",
                names[w[0]],
                names[w[1]],
                iv.lo * vf,
                iv.hi * vf
            )
            .unwrap();
        }
    }
    out
}
