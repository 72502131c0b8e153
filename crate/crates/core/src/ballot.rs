//! Ballots, ballot files and their translation into pairwise contributions.
//!
//! A ballot is a ranking with possible ties and truncation, optionally split
//! by an approval cutoff. Ballot lines follow the grammar
//!
//! ```text
//! line  := [weight ":"] seq
//! seq   := ["/"] group (sep group)* ["/"]
//! sep   := ">" | "/" | "/>" | ">/"
//! group := name ("=" name)*
//! ```
//!
//! where at most one `/` appears per line. Candidates in groups before the
//! `/` are approved. Whitespace is ignored and `#` starts a comment.

use crate::rational::{format_rational, half, int, parse_rational, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

const RESERVED: &[char] = &['>', '=', '/', ':', '#', ','];

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BallotError {
    #[error("line {line}, column {column}: unknown candidate `{name}`")]
    UnknownCandidate {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("line {line}, column {column}: candidate `{name}` appears more than once")]
    DuplicateCandidate {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("line {line}, column {column}: ballot weight must be positive")]
    NonPositiveWeight { line: usize, column: usize },
    #[error("line {line}, column {column}: {message}")]
    MalformedSyntax {
        message: String,
        line: usize,
        column: usize,
    },
}

impl BallotError {
    fn malformed(message: impl Into<String>, line: usize, column: usize) -> Self {
        BallotError::MalformedSyntax {
            message: message.into(),
            line,
            column,
        }
    }

    fn at_line(self, line: usize) -> Self {
        match self {
            BallotError::UnknownCandidate { name, column, .. } => {
                BallotError::UnknownCandidate { name, line, column }
            }
            BallotError::DuplicateCandidate { name, column, .. } => {
                BallotError::DuplicateCandidate { name, line, column }
            }
            BallotError::NonPositiveWeight { column, .. } => {
                BallotError::NonPositiveWeight { line, column }
            }
            BallotError::MalformedSyntax {
                message, column, ..
            } => BallotError::MalformedSyntax {
                message,
                line,
                column,
            },
        }
    }
}

/// The ordered set of candidate names of an election.
///
/// The order is the file order and is used for every deterministic
/// tie-break downstream.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateSet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl CandidateSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, BallotError> {
        let mut set = CandidateSet::default();
        for (k, name) in names.iter().enumerate() {
            set.push(name.as_ref(), 1, k + 1)?;
        }
        Ok(set)
    }

    fn push(&mut self, name: &str, line: usize, column: usize) -> Result<usize, BallotError> {
        if name.is_empty() || name.contains(char::is_whitespace) || name.contains(RESERVED) {
            return Err(BallotError::malformed(
                format!("invalid candidate name `{name}`"),
                line,
                column,
            ));
        }
        if self.index.contains_key(name) {
            return Err(BallotError::DuplicateCandidate {
                name: name.to_string(),
                line,
                column,
            });
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Candidates named `0, 1, …, n-1`.
    pub fn numbered(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        CandidateSet::new(&names).expect("numeric names are valid")
    }
}

/// Rule (c) versus (c′): a listed candidate against an unlisted one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ListedVsUnlisted {
    /// The listed candidate is preferred.
    #[default]
    Preferred,
    /// Nothing is inferred.
    NoInfo,
}

/// Rule (d) versus (d′): two unlisted candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum UnlistedPair {
    /// Nothing is inferred.
    #[default]
    NoInfo,
    /// The pair counts as a tie, half a vote each way.
    Tied,
}

/// How a truncated ranking is read into paired comparisons.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct InterpretationRules {
    pub listed_vs_unlisted: ListedVsUnlisted,
    pub unlisted_pair: UnlistedPair,
}

impl InterpretationRules {
    pub const COMPLETING: InterpretationRules = InterpretationRules {
        listed_vs_unlisted: ListedVsUnlisted::Preferred,
        unlisted_pair: UnlistedPair::Tied,
    };
}

/// A single weighted ballot over candidate ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ballot {
    /// Tied groups, best first.
    pub groups: Vec<Vec<usize>>,
    /// Number of leading groups that are approved, when the ballot carries
    /// an approval cutoff.
    pub approval_cutoff: Option<usize>,
    pub weight: Rational,
}

impl Ballot {
    pub fn ranking(groups: Vec<Vec<usize>>) -> Self {
        Ballot {
            groups,
            approval_cutoff: None,
            weight: Rational::one(),
        }
    }

    /// A pure approval ballot: one tied group of approved candidates.
    pub fn approval(approved: Vec<usize>) -> Self {
        let (groups, cutoff) = if approved.is_empty() {
            (Vec::new(), 0)
        } else {
            (vec![approved], 1)
        };
        Ballot {
            groups,
            approval_cutoff: Some(cutoff),
            weight: Rational::one(),
        }
    }

    pub fn with_weight(mut self, weight: Rational) -> Self {
        self.weight = weight;
        self
    }

    /// Checks the structural invariants against a candidate count.
    pub fn validate(&self, n_candidates: usize) -> Result<(), BallotError> {
        if !self.weight.is_positive() {
            return Err(BallotError::NonPositiveWeight { line: 0, column: 0 });
        }
        let mut seen = vec![false; n_candidates];
        for group in &self.groups {
            if group.is_empty() {
                return Err(BallotError::malformed("empty group", 0, 0));
            }
            for &c in group {
                if c >= n_candidates {
                    return Err(BallotError::UnknownCandidate {
                        name: c.to_string(),
                        line: 0,
                        column: 0,
                    });
                }
                if std::mem::replace(&mut seen[c], true) {
                    return Err(BallotError::DuplicateCandidate {
                        name: c.to_string(),
                        line: 0,
                        column: 0,
                    });
                }
            }
        }
        if let Some(cut) = self.approval_cutoff {
            if cut > self.groups.len() {
                return Err(BallotError::malformed("approval cutoff out of range", 0, 0));
            }
        }
        Ok(())
    }

    /// Approved candidates, if the ballot has a cutoff.
    pub fn approved(&self) -> Option<Vec<usize>> {
        self.approval_cutoff
            .map(|cut| self.groups[..cut].iter().flatten().copied().collect())
    }

    /// True when the ballot carries only approval information.
    pub fn is_approval_only(&self) -> bool {
        self.approval_cutoff == Some(self.groups.len())
    }

    /// Drops the ranking information, keeping only the approval set.
    /// Ballots without a cutoff are returned unchanged.
    pub fn to_approval_only(&self) -> Ballot {
        match self.approved() {
            Some(mut approved) => {
                approved.sort_unstable();
                Ballot::approval(approved).with_weight(self.weight.clone())
            }
            None => self.clone(),
        }
    }

    /// Groups as seen by the pairwise rules: approved candidates merge into a
    /// single tied top group.
    fn effective_groups(&self) -> Vec<Vec<usize>> {
        match self.approval_cutoff {
            None => self.groups.clone(),
            Some(cut) => {
                let approved: Vec<usize> = self.groups[..cut].iter().flatten().copied().collect();
                std::iter::once(approved)
                    .filter(|g| !g.is_empty())
                    .chain(self.groups[cut..].iter().cloned())
                    .collect()
            }
        }
    }

    /// Serializes in the ballot-line grammar; parsing the result yields an
    /// equal ballot.
    pub fn to_line(&self, candidates: &CandidateSet) -> String {
        let mut out = String::new();
        if !self.weight.is_one() {
            out.push_str(&format_rational(&self.weight));
            out.push_str(": ");
        }
        let cut = self.approval_cutoff;
        if cut == Some(0) {
            out.push('/');
        }
        for (k, group) in self.groups.iter().enumerate() {
            if k > 0 {
                out.push_str(if cut == Some(k) { "/>" } else { ">" });
            }
            let names: Vec<&str> = group.iter().map(|&c| candidates.name(c)).collect();
            out.push_str(&names.join("="));
        }
        if cut.is_some() && cut == Some(self.groups.len()) && !self.groups.is_empty() {
            out.push('/');
        }
        out
    }
}

/// Per-unit-weight contribution of one ballot to the pairwise scores.
///
/// Values are `1/2` or `1`; absent pairs contribute nothing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairContribution {
    entries: BTreeMap<(usize, usize), Rational>,
}

impl PairContribution {
    pub fn get(&self, x: usize, y: usize) -> Rational {
        self.entries
            .get(&(x, y))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Rational)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn add(&mut self, x: usize, y: usize, value: Rational) {
        self.entries.insert((x, y), value);
    }
}

/// Translates one ballot into pairwise contributions under `rules`.
pub fn ballot_to_pairwise(
    ballot: &Ballot,
    rules: InterpretationRules,
    candidates: &CandidateSet,
) -> PairContribution {
    let n = candidates.len();
    let groups = ballot.effective_groups();
    let mut level = vec![None; n];
    for (k, group) in groups.iter().enumerate() {
        for &c in group {
            level[c] = Some(k);
        }
    }
    let mut out = PairContribution::default();
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let value = match (level[x], level[y]) {
                (Some(lx), Some(ly)) if lx < ly => Some(Rational::one()),
                (Some(lx), Some(ly)) if lx == ly => Some(half()),
                (Some(_), Some(_)) => None,
                (Some(_), None) => match rules.listed_vs_unlisted {
                    ListedVsUnlisted::Preferred => Some(Rational::one()),
                    ListedVsUnlisted::NoInfo => None,
                },
                (None, Some(_)) => None,
                (None, None) => match rules.unlisted_pair {
                    UnlistedPair::NoInfo => None,
                    UnlistedPair::Tied => Some(half()),
                },
            };
            if let Some(v) = value {
                out.add(x, y, v);
            }
        }
    }
    out
}

/// A weighted multiset of ballots over a candidate set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Profile {
    pub candidates: CandidateSet,
    pub ballots: Vec<Ballot>,
}

impl Profile {
    pub fn new(candidates: CandidateSet, ballots: Vec<Ballot>) -> Self {
        Profile {
            candidates,
            ballots,
        }
    }

    pub fn total_weight(&self) -> Rational {
        self.ballots.iter().map(|b| b.weight.clone()).sum()
    }

    /// Every ballot reduced to its approval set.
    pub fn to_approval_only(&self) -> Profile {
        Profile {
            candidates: self.candidates.clone(),
            ballots: self.ballots.iter().map(Ballot::to_approval_only).collect(),
        }
    }

    /// Ballot-file text, starting with a `candidates:` header.
    pub fn to_text(&self) -> String {
        let mut out = format!("candidates: {}\n", self.candidates.names().join(" "));
        for b in &self.ballots {
            out.push_str(&b.to_line(&self.candidates));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Token<'a> {
    Name(&'a str),
    Gt,
    Eq,
    Slash,
}

fn tokenize(text: &str, offset: usize) -> Vec<(Token<'_>, usize)> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        let column = offset + text[..start].chars().count() + 1;
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '>' => {
                chars.next();
                tokens.push((Token::Gt, column));
            }
            '=' => {
                chars.next();
                tokens.push((Token::Eq, column));
            }
            '/' => {
                chars.next();
                tokens.push((Token::Slash, column));
            }
            _ => {
                let mut end = start;
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_whitespace() || RESERVED.contains(&c) {
                        break;
                    }
                    end = i + c.len_utf8();
                    chars.next();
                }
                if end == start {
                    // A reserved character that is not a token here (`:`, `,`).
                    chars.next();
                    tokens.push((Token::Name(&text[start..start + c.len_utf8()]), column));
                } else {
                    tokens.push((Token::Name(&text[start..end]), column));
                }
            }
        }
    }
    tokens
}

fn strip_comment(text: &str) -> &str {
    match text.find('#') {
        Some(i) => &text[..i],
        None => text,
    }
}

/// Parses a single ballot line. Errors report line 1.
pub fn parse_ballot_line(text: &str, candidates: &CandidateSet) -> Result<Ballot, BallotError> {
    let mut fixed = candidates.clone();
    parse_line(text, &mut fixed, false, 1)
}

fn parse_line(
    text: &str,
    candidates: &mut CandidateSet,
    register_new: bool,
    line: usize,
) -> Result<Ballot, BallotError> {
    let text = strip_comment(text);
    let (weight, body, body_offset) = match text.find(':') {
        Some(colon) => {
            let weight_text = &text[..colon];
            let column = weight_text.len() - weight_text.trim_start().len() + 1;
            let weight = parse_rational(weight_text).ok_or_else(|| {
                BallotError::malformed(
                    format!("invalid weight `{}`", weight_text.trim()),
                    line,
                    column,
                )
            })?;
            if !weight.is_positive() {
                return Err(BallotError::NonPositiveWeight { line, column });
            }
            let offset = text[..colon + 1].chars().count();
            (weight, &text[colon + 1..], offset)
        }
        None => (int(1), text, 0),
    };

    let tokens = tokenize(body, body_offset);
    if tokens.is_empty() {
        return Err(BallotError::malformed(
            "empty ballot",
            line,
            body_offset + 1,
        ));
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut cutoff: Option<usize> = None;
    let mut seen: Vec<bool> = vec![false; candidates.len()];
    let mut pos = 0;
    // Separator run state since the last group.
    let mut run_gt = 0usize;
    let mut run_len = 0usize;
    let end_column = body_offset + body.chars().count() + 1;

    while pos < tokens.len() {
        let (token, column) = tokens[pos];
        match token {
            Token::Slash => {
                if cutoff.is_some() {
                    return Err(BallotError::malformed(
                        "more than one approval cutoff `/`",
                        line,
                        column,
                    ));
                }
                cutoff = Some(groups.len());
                run_len += 1;
                pos += 1;
            }
            Token::Gt => {
                if groups.is_empty() {
                    return Err(BallotError::malformed(
                        "`>` before any candidate",
                        line,
                        column,
                    ));
                }
                if run_gt > 0 {
                    return Err(BallotError::malformed(
                        "missing candidate between `>`",
                        line,
                        column,
                    ));
                }
                run_gt += 1;
                run_len += 1;
                pos += 1;
            }
            Token::Eq => {
                return Err(BallotError::malformed(
                    "`=` must join two candidates",
                    line,
                    column,
                ));
            }
            Token::Name(_) => {
                if !groups.is_empty() && run_len == 0 {
                    return Err(BallotError::malformed(
                        "expected `>`, `=` or `/` between candidates",
                        line,
                        column,
                    ));
                }
                let mut group = Vec::new();
                loop {
                    let (token, column) = tokens[pos];
                    let Token::Name(name) = token else {
                        return Err(BallotError::malformed(
                            "expected candidate name",
                            line,
                            column,
                        ));
                    };
                    if name.starts_with(RESERVED) {
                        return Err(BallotError::malformed(
                            format!("unexpected `{name}`"),
                            line,
                            column,
                        ));
                    }
                    let id = match candidates.position(name) {
                        Some(id) => id,
                        None if register_new => candidates.push(name, line, column)?,
                        None => {
                            return Err(BallotError::UnknownCandidate {
                                name: name.to_string(),
                                line,
                                column,
                            })
                        }
                    };
                    if seen.len() <= id {
                        seen.resize(id + 1, false);
                    }
                    if std::mem::replace(&mut seen[id], true) {
                        return Err(BallotError::DuplicateCandidate {
                            name: name.to_string(),
                            line,
                            column,
                        });
                    }
                    group.push(id);
                    pos += 1;
                    if pos < tokens.len() && tokens[pos].0 == Token::Eq {
                        pos += 1;
                        if pos >= tokens.len() {
                            return Err(BallotError::malformed(
                                "`=` at end of ballot",
                                line,
                                end_column,
                            ));
                        }
                        continue;
                    }
                    break;
                }
                groups.push(group);
                run_gt = 0;
                run_len = 0;
            }
        }
    }
    if run_gt > 0 {
        return Err(BallotError::malformed(
            "ballot ends with `>`",
            line,
            end_column,
        ));
    }

    Ok(Ballot {
        groups,
        approval_cutoff: cutoff,
        weight,
    })
}

/// Parses a ballot file.
///
/// One ballot per line; `#` comments and blank lines are ignored. The first
/// non-comment line may be `candidates: a b c …`, fixing the candidate order;
/// otherwise candidates are numbered in order of first appearance.
pub fn parse_profile(text: &str) -> Result<Profile, BallotError> {
    let mut candidates = CandidateSet::default();
    let mut header_seen = false;
    let mut fixed = false;
    let mut ballots = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = strip_comment(raw);
        if content.trim().is_empty() {
            continue;
        }
        if !header_seen {
            header_seen = true;
            let trimmed = content.trim_start();
            if let Some(rest) = trimmed.strip_prefix("candidates:") {
                let base = content.len() - trimmed.len() + "candidates:".len();
                let mut offset = 0;
                for name in rest.split_whitespace() {
                    let at = rest[offset..]
                        .find(name)
                        .map(|i| i + offset)
                        .unwrap_or(offset);
                    offset = at + name.len();
                    candidates.push(name, line, base + at + 1)?;
                }
                fixed = true;
                continue;
            }
        }
        let ballot =
            parse_line(content, &mut candidates, !fixed, line).map_err(|e| e.at_line(line))?;
        ballots.push(ballot);
    }
    Ok(Profile {
        candidates,
        ballots,
    })
}

impl fmt::Display for InterpretationRules {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.listed_vs_unlisted {
            ListedVsUnlisted::Preferred => "preferred",
            ListedVsUnlisted::NoInfo => "noinfo",
        };
        let d = match self.unlisted_pair {
            UnlistedPair::NoInfo => "noinfo",
            UnlistedPair::Tied => "tied",
        };
        write!(f, "listed-vs-unlisted={c}, unlisted-pair={d}")
    }
}
