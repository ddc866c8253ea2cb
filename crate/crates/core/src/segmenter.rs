//! Context windows, thresholds, text labeling and training-case extraction.
//!
//! For a candidate site the network sees the descriptors of `k/2` tokens on
//! each side. When the candidate is a punctuation token the site itself is
//! left out of the window. When it is an abbreviation-style word (`Mr.`,
//! `p.m.`) the word is the nearest left-context token, as if its final
//! period had been split off and were the site.
//!
//! Windows stop at the start and end of the text and at blank lines; the
//! missing positions are filled with padding arrays.

use crate::descriptor::{build_descriptor, CategoryMapping, DescriptorArray, DESCRIPTOR_LEN};
use crate::error::{Error, Result};
use crate::lexicon::{HeuristicParams, Lexicon};
use crate::network::{Example, Network};
use crate::tokenizer::{find_candidates, CandidateSite, Token, TokenKind, Tokenizer};

pub const DEFAULT_AMBIGUOUS_MARKER: &str = "<A>";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    t0: f64,
    t1: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { t0: 0.5, t1: 0.5 }
    }
}

impl Thresholds {
    pub fn new(t0: f64, t1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t0) || !(0.0..=1.0).contains(&t1) {
            return Err(Error::Argument(format!("thresholds ({t0}, {t1}) must lie in [0, 1]")));
        }
        if t0 > t1 {
            return Err(Error::Argument(format!("t0 = {t0} exceeds t1 = {t1}")));
        }
        Ok(Thresholds { t0, t1 })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    NotBoundary,
    Boundary,
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub label: Label,
    /// Network output in (0, 1).
    pub score: f64,
}

/// Below `t0`: not a boundary. At or above `t1`: boundary. Otherwise
/// ambiguous.
pub fn classify(score: f64, th: &Thresholds) -> Decision {
    let label = if score >= th.t1 {
        Label::Boundary
    } else if score < th.t0 {
        Label::NotBoundary
    } else {
        Label::Ambiguous
    };
    Decision { label, score }
}

/// What the second capitalization flag is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlagMode {
    /// Capitalized and the previous token is a candidate site.
    #[default]
    AfterCandidate,
    /// Capitalized and the previous token is any punctuation token.
    AfterPunctuation,
}

/// Everything needed to turn tokens into descriptor arrays.
#[derive(Debug, Clone, Copy)]
pub struct Features<'a> {
    pub lexicon: &'a Lexicon,
    pub mapping: &'a CategoryMapping,
    pub params: &'a HeuristicParams,
    pub flag_mode: FlagMode,
}

impl<'a> Features<'a> {
    pub fn new(lexicon: &'a Lexicon, mapping: &'a CategoryMapping, params: &'a HeuristicParams) -> Self {
        Features {
            lexicon,
            mapping,
            params,
            flag_mode: FlagMode::default(),
        }
    }

    /// Descriptors for a sentinel-free token sequence.
    pub fn descriptors(&self, tokens: &[Token]) -> Result<Vec<DescriptorArray>> {
        tokens
            .iter()
            .enumerate()
            .map(|(i, token)| {
                let follows = i > 0 && self.flag_trigger(&tokens[i - 1]);
                let tags = self.lexicon.lookup(token, self.params);
                build_descriptor(token, &tags, self.mapping, follows)
            })
            .collect()
    }

    fn flag_trigger(&self, prev: &Token) -> bool {
        match self.flag_mode {
            FlagMode::AfterCandidate => prev.is_candidate(),
            FlagMode::AfterPunctuation => prev.kind == TokenKind::Punct,
        }
    }

    /// Network input for one site of a sentinel-free token sequence.
    pub fn assemble_input(&self, tokens: &[Token], site: CandidateSite, k: usize) -> Result<Vec<f64>> {
        check_context(k)?;
        let descriptors = self.descriptors(tokens)?;
        Ok(window(tokens, &descriptors, site, k))
    }
}

fn check_context(k: usize) -> Result<()> {
    if k == 0 || !k.is_multiple_of(2) {
        return Err(Error::Argument(format!(
            "context size must be even and positive, got {k}"
        )));
    }
    Ok(())
}

/// Token indices feeding the window around `site`; `None` marks padding.
pub fn context_indices(tokens: &[Token], site: CandidateSite, k: usize) -> Vec<Option<usize>> {
    let half = k / 2;
    let idx = site.index as isize;
    let first = tokens[..=site.index]
        .iter()
        .rposition(|t| t.starts_paragraph)
        .unwrap_or(0) as isize;
    let end = tokens[site.index + 1..]
        .iter()
        .position(|t| t.starts_paragraph)
        .map_or(tokens.len(), |p| site.index + 1 + p) as isize;
    // For an abbreviation-style word the left context ends at the word.
    let left_end = if tokens[site.index].kind == TokenKind::Word {
        idx + 1
    } else {
        idx
    };
    let pick = |i: isize| (i >= first && i < end).then_some(i as usize);
    (left_end - half as isize..left_end)
        .chain(idx + 1..idx + 1 + half as isize)
        .map(pick)
        .collect()
}

fn window(tokens: &[Token], descriptors: &[DescriptorArray], site: CandidateSite, k: usize) -> Vec<f64> {
    let padding = DescriptorArray::padding();
    let mut input = Vec::with_capacity(k * DESCRIPTOR_LEN);
    for slot in context_indices(tokens, site, k) {
        let d = slot.map_or(&padding, |i| &descriptors[i]);
        input.extend_from_slice(d.values());
    }
    input
}

/// A candidate site with its context and label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCase {
    pub site: CandidateSite,
    /// The `k` context tokens in window order; `None` is edge padding.
    pub context: Vec<Option<Token>>,
    pub boundary: bool,
    pub input: Vec<f64>,
}

impl LabeledCase {
    pub fn example(&self) -> Example {
        Example::new(self.input.clone(), self.boundary)
    }
}

/// Gold annotation of one document: the text without sentinels, tokenized.
#[derive(Debug, Clone)]
pub struct Annotated {
    pub tokens: Vec<Token>,
    pub sites: Vec<CandidateSite>,
    pub gold: Vec<bool>,
    /// Sentinels not directly preceded by a candidate.
    pub warnings: Vec<String>,
}

/// Splits an annotated token stream into a sentinel-free stream plus
/// per-candidate labels. A candidate is a boundary iff the next token is
/// the sentinel.
pub fn read_annotation(tokenizer: &Tokenizer, annotated_text: &str) -> Annotated {
    let raw = tokenizer.tokenize(annotated_text);
    let mut tokens = Vec::with_capacity(raw.len());
    let mut boundary_after: Vec<bool> = Vec::with_capacity(raw.len());
    let mut warnings = Vec::new();
    let mut paragraph = false;
    for mut token in raw {
        if token.kind == TokenKind::Sentinel {
            paragraph |= token.starts_paragraph;
            match tokens.last() {
                Some(prev) if Token::is_candidate(prev) && !boundary_after.last().copied().unwrap_or(false) => {
                    *boundary_after.last_mut().unwrap() = true;
                }
                Some(prev) if Token::is_candidate(prev) => {
                    warnings.push(format!("repeated sentinel at byte {}", token.byte_offset));
                }
                _ => warnings.push(format!(
                    "sentinel at byte {} does not follow a candidate; ignored",
                    token.byte_offset
                )),
            }
            continue;
        }
        token.starts_paragraph |= std::mem::take(&mut paragraph);
        tokens.push(token);
        boundary_after.push(false);
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let sites = find_candidates(&tokens);
    let gold = sites.iter().map(|s| boundary_after[s.index]).collect();
    Annotated {
        tokens,
        sites,
        gold,
        warnings,
    }
}

/// Every candidate in a sentinel-annotated text as a labeled case.
pub fn extract_cases(
    annotated_text: &str,
    tokenizer: &Tokenizer,
    features: &Features<'_>,
    k: usize,
) -> Result<(Vec<LabeledCase>, Vec<String>)> {
    check_context(k)?;
    let doc = read_annotation(tokenizer, annotated_text);
    let descriptors = features.descriptors(&doc.tokens)?;
    let cases = doc
        .sites
        .iter()
        .zip(&doc.gold)
        .map(|(&site, &boundary)| LabeledCase {
            site,
            context: context_indices(&doc.tokens, site, k)
                .into_iter()
                .map(|i| i.map(|i| doc.tokens[i].clone()))
                .collect(),
            boundary,
            input: window(&doc.tokens, &descriptors, site, k),
        })
        .collect();
    Ok((cases, doc.warnings))
}

/// Network scores for every candidate of a sentinel-free token stream.
#[derive(Debug, Clone)]
pub struct Scored {
    pub tokens: Vec<Token>,
    pub sites: Vec<CandidateSite>,
    pub scores: Vec<f64>,
}

/// Output of [`Segmenter::label_text`].
#[derive(Debug, Clone)]
pub struct LabeledText {
    pub text: String,
    pub sites: Vec<CandidateSite>,
    pub decisions: Vec<Decision>,
}

/// A trained network bound to its lexicon, mapping and thresholds.
#[derive(Debug, Clone)]
pub struct Segmenter<'a> {
    pub features: Features<'a>,
    pub network: &'a Network,
    pub tokenizer: Tokenizer,
    pub thresholds: Thresholds,
    pub ambiguous_marker: String,
}

impl<'a> Segmenter<'a> {
    pub fn new(features: Features<'a>, network: &'a Network, sentinel: &str) -> Self {
        Segmenter {
            tokenizer: features.lexicon.tokenizer(sentinel),
            features,
            network,
            thresholds: Thresholds::default(),
            ambiguous_marker: DEFAULT_AMBIGUOUS_MARKER.to_string(),
        }
    }

    pub fn with_thresholds(mut self, thresholds: Thresholds) -> Self {
        self.thresholds = thresholds;
        self
    }

    pub fn with_ambiguous_marker(mut self, marker: impl Into<String>) -> Self {
        self.ambiguous_marker = marker.into();
        self
    }

    pub fn sentinel(&self) -> &str {
        self.tokenizer.sentinel()
    }

    /// Scores the candidates of an already tokenized, sentinel-free stream.
    pub fn score_tokens(&self, tokens: Vec<Token>) -> Result<Scored> {
        let k = self.network.context();
        let descriptors = self.features.descriptors(&tokens)?;
        let sites = find_candidates(&tokens);
        let scores = sites
            .iter()
            .map(|&site| self.network.forward(&window(&tokens, &descriptors, site, k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Scored { tokens, sites, scores })
    }

    /// Scores raw text. Sentinels already present are dropped.
    pub fn score_text(&self, text: &str) -> Result<Scored> {
        self.score_tokens(read_annotation(&self.tokenizer, text).tokens)
    }

    /// Inserts ` <sentinel>` after every boundary and ` <marker>` after
    /// every ambiguous site; everything else is copied byte for byte.
    pub fn label_text(&self, text: &str) -> Result<LabeledText> {
        let scored = self.score_text(text)?;
        let decisions: Vec<Decision> = scored.scores.iter().map(|&s| classify(s, &self.thresholds)).collect();
        let mut out = String::with_capacity(text.len() + 8 * decisions.len());
        let mut copied = 0;
        for (site, decision) in scored.sites.iter().zip(&decisions) {
            let marker = match decision.label {
                Label::Boundary => self.sentinel(),
                Label::Ambiguous => self.ambiguous_marker.as_str(),
                Label::NotBoundary => continue,
            };
            let end = scored.tokens[site.index].end();
            out.push_str(&text[copied..end]);
            out.push(' ');
            out.push_str(marker);
            copied = end;
        }
        out.push_str(&text[copied..]);
        Ok(LabeledText {
            text: out,
            sites: scored.sites,
            decisions,
        })
    }
}

/// Removes the markers inserted by [`Segmenter::label_text`].
pub fn strip_labels(text: &str, markers: &[&str]) -> String {
    let mut out = text.to_string();
    for marker in markers.iter().filter(|m| !m.is_empty()) {
        out = out.replace(&format!(" {marker}"), "");
    }
    out
}
