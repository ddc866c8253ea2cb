//! Scoring against gold annotation, threshold sweeps, case folding and
//! corpus statistics.

mod generator;

pub use generator::{
    generate_corpus, synthetic_lexicon, AbbreviationSet, GeneratedCorpus, GeneratorParams, Vocabulary,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::segmenter::{classify, read_annotation, Decision, Label, Thresholds};
use crate::tokenizer::{CandidateSite, Token, TokenKind, Tokenizer};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalReport {
    pub total_cases: usize,
    pub true_pos: usize,
    pub true_neg: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub not_labeled: usize,
    /// Ambiguous sites that thresholds of (0.5, 0.5) would have got right.
    pub were_correct: usize,
    /// Gold boundaries among all candidates.
    pub gold_boundaries: usize,
    pub lower_bound: f64,
    pub accuracy: f64,
    pub error_rate: f64,
}

impl EvalReport {
    pub fn errors(&self) -> usize {
        self.false_pos + self.false_neg
    }

    pub fn correct(&self) -> usize {
        self.true_pos + self.true_neg
    }

    /// `key=value` lines.
    pub fn to_key_values(&self) -> String {
        format!(
            "total_cases={}\ntrue_pos={}\ntrue_neg={}\nfalse_pos={}\nfalse_neg={}\n\
             not_labeled={}\nwere_correct={}\ngold_boundaries={}\nlower_bound={}\n\
             accuracy={}\nerror_rate={}\n",
            self.total_cases,
            self.true_pos,
            self.true_neg,
            self.false_pos,
            self.false_neg,
            self.not_labeled,
            self.were_correct,
            self.gold_boundaries,
            self.lower_bound,
            self.accuracy,
            self.error_rate
        )
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let errors = self.errors().max(1) as f64;
        writeln!(
            f,
            "{:>8} ({:5.1}%) false positives",
            self.false_pos,
            100.0 * self.false_pos as f64 / errors
        )?;
        writeln!(
            f,
            "{:>8} ({:5.1}%) false negatives",
            self.false_neg,
            100.0 * self.false_neg as f64 / errors
        )?;
        writeln!(f, "{:>8} total errors out of {} items", self.errors(), self.total_cases)?;
        writeln!(
            f,
            "{:>8} not labeled ({} were correct)",
            self.not_labeled, self.were_correct
        )?;
        writeln!(
            f,
            "accuracy {:.2}%  error {:.2}%  lower bound {:.2}%",
            100.0 * self.accuracy,
            100.0 * self.error_rate,
            100.0 * self.lower_bound
        )
    }
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

/// Counts decisions against aligned gold labels.
pub fn evaluate(decisions: &[Decision], gold: &[bool]) -> Result<EvalReport> {
    if decisions.len() != gold.len() {
        return Err(Error::Alignment(format!(
            "{} decisions but {} gold labels",
            decisions.len(),
            gold.len()
        )));
    }
    let mut r = EvalReport {
        total_cases: gold.len(),
        ..EvalReport::default()
    };
    for (d, &g) in decisions.iter().zip(gold) {
        if g {
            r.gold_boundaries += 1;
        }
        match (d.label, g) {
            (Label::Boundary, true) => r.true_pos += 1,
            (Label::Boundary, false) => r.false_pos += 1,
            (Label::NotBoundary, false) => r.true_neg += 1,
            (Label::NotBoundary, true) => r.false_neg += 1,
            (Label::Ambiguous, g) => {
                r.not_labeled += 1;
                if (d.score >= 0.5) == g {
                    r.were_correct += 1;
                }
            }
        }
    }
    r.lower_bound = ratio(r.gold_boundaries, r.total_cases);
    r.accuracy = ratio(r.correct(), r.total_cases);
    r.error_rate = ratio(r.errors(), r.total_cases);
    Ok(r)
}

/// The naive labeler: every candidate is a boundary.
pub fn baseline_decisions(n: usize) -> Vec<Decision> {
    vec![
        Decision {
            label: Label::Boundary,
            score: 1.0,
        };
        n
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t0: f64,
    pub t1: f64,
    pub false_pos: usize,
    pub false_neg: usize,
    pub not_labeled: usize,
    pub were_correct: usize,
    pub total_cases: usize,
    pub error_rate: f64,
}

impl SweepRow {
    pub fn not_labeled_rate(&self) -> f64 {
        ratio(self.not_labeled, self.total_cases)
    }

    pub const HEADER: &'static str =
        "t0\tt1\tfalse_pos\tfalse_neg\tnot_labeled\twere_correct\tpct_not_labeled\terror_pct";

    pub fn to_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.2}\t{:.2}",
            self.t0,
            self.t1,
            self.false_pos,
            self.false_neg,
            self.not_labeled,
            self.were_correct,
            100.0 * self.not_labeled_rate(),
            100.0 * self.error_rate
        )
    }
}

/// The threshold pairs of the classic sweep, from no ambiguity to wide.
pub const STANDARD_SWEEP: [(f64, f64); 5] = [(0.5, 0.5), (0.4, 0.6), (0.3, 0.7), (0.2, 0.8), (0.1, 0.9)];

/// Re-classifies cached scores under each threshold pair.
pub fn sweep_thresholds(scores: &[f64], gold: &[bool], pairs: &[(f64, f64)]) -> Result<Vec<SweepRow>> {
    if scores.len() != gold.len() {
        return Err(Error::Alignment(format!(
            "{} scores but {} gold labels",
            scores.len(),
            gold.len()
        )));
    }
    pairs
        .iter()
        .map(|&(t0, t1)| {
            let th =
                Thresholds::new(t0, t1).map_err(|e| Error::Argument(format!("threshold pair ({t0}, {t1}): {e}")))?;
            let decisions: Vec<Decision> = scores.iter().map(|&s| classify(s, &th)).collect();
            let r = evaluate(&decisions, gold)?;
            Ok(SweepRow {
                t0,
                t1,
                false_pos: r.false_pos,
                false_neg: r.false_neg,
                not_labeled: r.not_labeled,
                were_correct: r.were_correct,
                total_cases: r.total_cases,
                error_rate: r.error_rate,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseMode {
    Lower,
    Upper,
}

/// Converts letter case; every other character is untouched.
pub fn case_fold(text: &str, mode: CaseMode) -> String {
    match mode {
        CaseMode::Lower => text.to_lowercase(),
        CaseMode::Upper => text.to_uppercase(),
    }
}

/// Like [`case_fold`] but leaves sentinel occurrences as they are.
pub fn case_fold_annotated(text: &str, mode: CaseMode, sentinel: &str) -> String {
    if sentinel.is_empty() {
        return case_fold(text, mode);
    }
    text.split(sentinel)
        .map(|part| case_fold(part, mode))
        .collect::<Vec<_>>()
        .join(sentinel)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusStats {
    pub candidates: usize,
    pub boundaries: usize,
    pub lower_bound: f64,
}

pub fn corpus_stats(annotated_text: &str, tokenizer: &Tokenizer) -> CorpusStats {
    let doc = read_annotation(tokenizer, annotated_text);
    let boundaries = doc.gold.iter().filter(|&&g| g).count();
    CorpusStats {
        candidates: doc.sites.len(),
        boundaries,
        lower_bound: ratio(boundaries, doc.sites.len()),
    }
}

/// Rough grouping of misclassified sites. Approximate: assigned from the
/// surface shape of the site and its neighbours only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorClass {
    /// The candidate is an abbreviation-style word.
    Abbreviation,
    /// A quotation mark touches the site.
    Quote,
    /// The site is an ellipsis.
    Ellipsis,
    Other,
}

impl fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorClass::Abbreviation => "abbreviation",
            ErrorClass::Quote => "quote",
            ErrorClass::Ellipsis => "ellipsis",
            ErrorClass::Other => "other",
        })
    }
}

pub fn error_class(tokens: &[Token], site: CandidateSite) -> ErrorClass {
    let token = &tokens[site.index];
    let is_quote = |i: usize| {
        tokens.get(i).is_some_and(|t| {
            t.kind == TokenKind::Punct && matches!(t.text.as_str(), "\"" | "'" | "``" | "''" | "\u{201c}" | "\u{201d}")
        })
    };
    if token.kind == TokenKind::Word {
        ErrorClass::Abbreviation
    } else if token.text.starts_with("..") {
        ErrorClass::Ellipsis
    } else if is_quote(site.index + 1) || (site.index > 0 && is_quote(site.index - 1)) {
        ErrorClass::Quote
    } else {
        ErrorClass::Other
    }
}

/// Per-class false positive and false negative counts.
pub fn error_breakdown(
    tokens: &[Token],
    sites: &[CandidateSite],
    decisions: &[Decision],
    gold: &[bool],
) -> Vec<(ErrorClass, usize, usize)> {
    let mut table: std::collections::BTreeMap<ErrorClass, (usize, usize)> = Default::default();
    for ((site, d), &g) in sites.iter().zip(decisions).zip(gold) {
        let slot = match (d.label, g) {
            (Label::Boundary, false) => 0,
            (Label::NotBoundary, true) => 1,
            _ => continue,
        };
        let e = table.entry(error_class(tokens, *site)).or_default();
        if slot == 0 {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    table.into_iter().map(|(c, (fp, fneg))| (c, fp, fneg)).collect()
}
