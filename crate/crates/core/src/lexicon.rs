//! Part-of-speech frequency lexicon and unknown-word heuristics.
//!
//! A lexicon is made of five word lists sharing one line format:
//!
//! ```text
//! word<TAB>TAG1/freq1<TAB>TAG2/freq2 ...
//! ```
//!
//! with no trailing tab. Lines starting with `#` that are not themselves a
//! `#` entry (i.e. `#` not followed by a tab) are comments.
//!
//! | file            | contents                                  | required |
//! |-----------------|-------------------------------------------|----------|
//! | `words.dict`    | main lexicon                              | yes      |
//! | `chars.dict`    | punctuation and other character strings   | yes      |
//! | `endings.dict`  | suffixes used to guess unknown words      | yes, non-empty |
//! | `abbrev.dict`   | abbreviations, with their final period    | no       |
//! | `propnoun.dict` | proper nouns                              | no       |

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tokenizer::{Token, TokenKind, Tokenizer, SENTENCE_PUNCT};

pub const WORDS_FILE: &str = "words.dict";
pub const ABBREV_FILE: &str = "abbrev.dict";
pub const CHARS_FILE: &str = "chars.dict";
pub const ENDINGS_FILE: &str = "endings.dict";
pub const PROPNOUN_FILE: &str = "propnoun.dict";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagSource {
    Lexicon,
    Heuristic,
    /// A lexicon entry with a heuristic proper-noun share mixed in.
    Mixed,
}

/// Fine-grained tag frequencies for one token. Never empty, all frequencies
/// positive and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TagFrequencies {
    entries: BTreeMap<String, f64>,
    source: TagSource,
}

impl TagFrequencies {
    pub fn new<I, S>(entries: I, source: TagSource) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (tag, freq) in entries {
            let tag = tag.into();
            if tag.is_empty() {
                return Err(Error::Argument("empty part-of-speech tag".into()));
            }
            if !(freq.is_finite() && freq > 0.0) {
                return Err(Error::Argument(format!(
                    "frequency for {tag} must be positive, got {freq}"
                )));
            }
            *map.entry(tag).or_insert(0.0) += freq;
        }
        if map.is_empty() {
            return Err(Error::Argument("tag frequencies must not be empty".into()));
        }
        Ok(TagFrequencies { entries: map, source })
    }

    pub fn single(tag: &str, freq: f64, source: TagSource) -> Self {
        TagFrequencies::new([(tag, freq)], source).expect("single positive entry")
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(t, &f)| (t.as_str(), f))
    }

    pub fn get(&self, tag: &str) -> Option<f64> {
        self.entries.get(tag).copied()
    }

    pub fn source(&self) -> TagSource {
        self.source
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Fraction of the total frequency carried by `tag`.
    pub fn share(&self, tag: &str) -> f64 {
        self.get(tag).unwrap_or(0.0) / self.total()
    }

    pub fn with_source(mut self, source: TagSource) -> Self {
        self.source = source;
        self
    }

    /// Multiplies every frequency by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        TagFrequencies::new(self.entries.iter().map(|(t, &f)| (t.clone(), f * factor)), self.source)
    }

    /// Adds `tag` with a pseudo-frequency such that its share of the new
    /// total is exactly `share`. Existing frequencies are kept.
    fn mixed_with(&self, tag: &str, share: f64) -> Self {
        if share >= 1.0 {
            return TagFrequencies::single(tag, 1.0, TagSource::Mixed);
        }
        let total = self.total();
        let mut entries = self.entries.clone();
        *entries.entry(tag.to_string()).or_insert(0.0) += total * share / (1.0 - share);
        TagFrequencies {
            entries,
            source: TagSource::Mixed,
        }
    }

    fn parse_fields(fields: &[&str]) -> std::result::Result<Self, String> {
        let mut entries = BTreeMap::new();
        for field in fields {
            let (tag, freq) = field
                .rsplit_once('/')
                .ok_or_else(|| format!("expected TAG/freq, got {field:?}"))?;
            if tag.is_empty() {
                return Err(format!("empty tag in {field:?}"));
            }
            let freq: f64 = freq.parse().map_err(|_| format!("bad frequency in {field:?}"))?;
            if !(freq.is_finite() && freq > 0.0) {
                return Err(format!("frequency must be positive in {field:?}"));
            }
            if entries.insert(tag.to_string(), freq).is_some() {
                return Err(format!("tag {tag} repeated"));
            }
        }
        if entries.is_empty() {
            return Err("no tags".into());
        }
        Ok(TagFrequencies {
            entries,
            source: TagSource::Lexicon,
        })
    }

    /// Renders as a dictionary line for `word`.
    pub fn to_dict_line(&self, word: &str) -> String {
        let mut line = word.to_string();
        for (tag, freq) in &self.entries {
            line.push('\t');
            line.push_str(&format!("{tag}/{}", format_freq(*freq)));
        }
        line
    }
}

fn format_freq(f: f64) -> String {
    if f.fract() == 0.0 && f.abs() < 1e15 {
        format!("{}", f as i64)
    } else {
        format!("{f}")
    }
}

/// Six decimals at most; display only, `to_dict_line` keeps full precision.
fn display_freq(f: f64) -> String {
    if f < 1e-3 {
        return format!("{f:.3e}");
    }
    let s = format!("{f:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

impl fmt::Display for TagFrequencies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (tag, freq)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{tag}/{}", display_freq(*freq))?;
        }
        Ok(())
    }
}

/// Tunables for unknown and capitalized words.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicParams {
    /// Proper-noun share for capitalized words not in the lexicon.
    pub proper_noun_unknown_freq_fraction: f64,
    /// Proper-noun share added to capitalized words found in the lexicon.
    pub proper_noun_known_freq_fraction: f64,
    /// Last-resort distribution for words no other rule covers.
    pub desperation_tags: TagFrequencies,
    /// Distribution for unknown hyphenated words.
    pub hyphen_tags: TagFrequencies,
    pub proper_noun_tag: String,
    pub number_tag: String,
    pub sentence_punct_tag: String,
    pub abbreviation_tag: String,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        let uniform = |tags: &[&str]| {
            TagFrequencies::new(tags.iter().map(|&t| (t, 1.0)), TagSource::Heuristic).expect("non-empty")
        };
        HeuristicParams {
            proper_noun_unknown_freq_fraction: 0.9,
            proper_noun_known_freq_fraction: 0.5,
            desperation_tags: uniform(&["NN", "VB", "JJ", "NP"]),
            hyphen_tags: uniform(&["JJ", "NN"]),
            proper_noun_tag: "NP".into(),
            number_tag: "CD".into(),
            sentence_punct_tag: ".".into(),
            abbreviation_tag: "AB".into(),
        }
    }
}

impl HeuristicParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            (
                "proper_noun_unknown_freq_fraction",
                self.proper_noun_unknown_freq_fraction,
            ),
            ("proper_noun_known_freq_fraction", self.proper_noun_known_freq_fraction),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Argument(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Raw contents of the five word lists.
#[derive(Debug, Clone, Default)]
pub struct LexiconSources {
    pub words: String,
    pub abbreviations: String,
    pub chars: String,
    pub endings: String,
    pub proper_nouns: String,
}

impl LexiconSources {
    /// Writes the lists into `dir` under their conventional file names.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, content) in [
            (WORDS_FILE, &self.words),
            (ABBREV_FILE, &self.abbreviations),
            (CHARS_FILE, &self.chars),
            (ENDINGS_FILE, &self.endings),
            (PROPNOUN_FILE, &self.proper_nouns),
        ] {
            let path = dir.join(name);
            fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// One word list keyed both exactly and by lowercase form.
#[derive(Debug, Clone, Default)]
struct WordList {
    exact: HashMap<String, TagFrequencies>,
    folded: HashMap<String, String>,
}

impl WordList {
    fn from_entries(entries: Vec<(String, TagFrequencies)>) -> Self {
        let mut list = WordList::default();
        for (word, tags) in entries {
            list.exact.insert(word, tags);
        }
        let mut keys: Vec<&String> = list.exact.keys().collect();
        // Lowercase keys win the folded slot; otherwise the first in sort order.
        keys.sort_by_key(|k| (k.to_lowercase() != **k, (*k).clone()));
        for key in keys {
            list.folded.entry(key.to_lowercase()).or_insert_with(|| key.clone());
        }
        list
    }

    fn get(&self, word: &str) -> Option<&TagFrequencies> {
        self.exact.get(word)
    }

    fn get_folded(&self, word: &str) -> Option<&TagFrequencies> {
        self.folded.get(&word.to_lowercase()).and_then(|k| self.exact.get(k))
    }

    fn len(&self) -> usize {
        self.exact.len()
    }

    fn sorted(&self) -> Vec<(&String, &TagFrequencies)> {
        let mut v: Vec<_> = self.exact.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    words: WordList,
    abbreviations: WordList,
    proper_nouns: WordList,
    chars: WordList,
    /// Longest suffix first.
    endings: Vec<(String, TagFrequencies)>,
}

impl Lexicon {
    /// Loads the five word lists from `dir`. `abbrev.dict` and
    /// `propnoun.dict` may be absent.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let read = |name: &str, required: bool| -> Result<String> {
            let path = dir.join(name);
            match fs::read_to_string(&path) {
                Ok(s) => Ok(s),
                Err(e) if !required && e.kind() == std::io::ErrorKind::NotFound => Ok(String::new()),
                Err(e) => Err(Error::io(path, e)),
            }
        };
        let sources = LexiconSources {
            words: read(WORDS_FILE, true)?,
            abbreviations: read(ABBREV_FILE, false)?,
            chars: read(CHARS_FILE, true)?,
            endings: read(ENDINGS_FILE, true)?,
            proper_nouns: read(PROPNOUN_FILE, false)?,
        };
        Lexicon::from_sources(&sources)
    }

    pub fn from_sources(sources: &LexiconSources) -> Result<Self> {
        let words = parse_dict(WORDS_FILE, &sources.words)?;
        let abbreviations = parse_dict(ABBREV_FILE, &sources.abbreviations)?;
        let chars = parse_dict(CHARS_FILE, &sources.chars)?;
        let mut endings = parse_dict(ENDINGS_FILE, &sources.endings)?;
        let proper_nouns = parse_dict(PROPNOUN_FILE, &sources.proper_nouns)?;
        if endings.is_empty() {
            return Err(Error::Config(format!("{ENDINGS_FILE} must contain at least one entry")));
        }
        check_conflicts(&[
            (WORDS_FILE, &words),
            (ABBREV_FILE, &abbreviations),
            (CHARS_FILE, &chars),
            (PROPNOUN_FILE, &proper_nouns),
        ])?;
        endings.sort_by(|a, b| b.0.chars().count().cmp(&a.0.chars().count()).then(a.0.cmp(&b.0)));
        endings.dedup_by(|a, b| a.0 == b.0);
        Ok(Lexicon {
            words: WordList::from_entries(words),
            abbreviations: WordList::from_entries(abbreviations),
            proper_nouns: WordList::from_entries(proper_nouns),
            chars: WordList::from_entries(chars),
            endings: endings.into_iter().map(|(s, t)| (s.to_lowercase(), t)).collect(),
        })
    }

    /// Renders the lexicon back into word-list form.
    pub fn to_sources(&self) -> LexiconSources {
        let render = |list: &WordList| -> String {
            list.sorted()
                .into_iter()
                .map(|(w, t)| t.to_dict_line(w) + "\n")
                .collect()
        };
        LexiconSources {
            words: render(&self.words),
            abbreviations: render(&self.abbreviations),
            chars: render(&self.chars),
            endings: self.endings.iter().map(|(s, t)| t.to_dict_line(s) + "\n").collect(),
            proper_nouns: render(&self.proper_nouns),
        }
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn abbreviations(&self) -> impl Iterator<Item = &str> {
        self.abbreviations.exact.keys().map(String::as_str)
    }

    /// A tokenizer that attaches final periods to this lexicon's
    /// abbreviations.
    pub fn tokenizer(&self, sentinel: &str) -> Tokenizer {
        Tokenizer::new(sentinel).with_abbreviations(self.abbreviations())
    }

    /// Keeps only the `keep` most frequent entries of the main word list
    /// (by total frequency, ties broken alphabetically). All other lists
    /// are left untouched.
    pub fn truncated(&self, keep: usize) -> Lexicon {
        let mut ranked: Vec<(&String, &TagFrequencies)> = self.words.exact.iter().collect();
        ranked.sort_by(|a, b| {
            b.1.total()
                .partial_cmp(&a.1.total())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.cmp(b.0))
        });
        let kept = ranked
            .into_iter()
            .take(keep)
            .map(|(w, t)| (w.clone(), t.clone()))
            .collect();
        Lexicon {
            words: WordList::from_entries(kept),
            ..self.clone()
        }
    }

    /// Resolves a token to tag frequencies. Exact matches are tried before
    /// lowercase ones; anything not found falls through to
    /// [`Lexicon::heuristic_tags`].
    pub fn lookup(&self, token: &Token, params: &HeuristicParams) -> TagFrequencies {
        let text = token.text.as_str();
        if let Some(tags) = self.chars.get(text) {
            return tags.clone();
        }
        if let Some(tags) = self.abbreviations.get(text) {
            return tags.clone();
        }
        if let Some(tags) = self.proper_nouns.get(text) {
            return tags.clone();
        }
        if let Some(tags) = self.words.get(text) {
            return self.known_word(token, tags, params);
        }
        if token.kind == TokenKind::Word {
            if let Some(tags) = self.abbreviations.get_folded(text) {
                return tags.clone();
            }
            if let Some(tags) = self.proper_nouns.get_folded(text) {
                return tags.clone();
            }
            if let Some(tags) = self.words.get_folded(text) {
                return self.known_word(token, tags, params);
            }
        }
        self.heuristic_tags(token, params)
    }

    fn known_word(&self, token: &Token, tags: &TagFrequencies, params: &HeuristicParams) -> TagFrequencies {
        // A capitalized lexicon word may still be a proper noun, unless the
        // entry already says so.
        if token.starts_capitalized && tags.get(&params.proper_noun_tag).is_none() {
            tags.mixed_with(&params.proper_noun_tag, params.proper_noun_known_freq_fraction)
        } else {
            tags.clone()
        }
    }

    /// Guesses tags for a token absent from the word lists. The first
    /// matching rule wins:
    ///
    /// 1. contains a digit: number
    /// 2. starts with `.`, `!` or `?`: sentence punctuation
    /// 3. longest matching suffix from the endings list
    /// 4. contains a hyphen: hyphen distribution
    /// 5. contains an internal period: abbreviation
    /// 6. capitalized: proper noun at the unknown-word share, the rest
    ///    spread over the desperation tags
    /// 7. desperation tags
    pub fn heuristic_tags(&self, token: &Token, params: &HeuristicParams) -> TagFrequencies {
        let text = token.text.as_str();
        let single = |tag: &str| TagFrequencies::single(tag, 1.0, TagSource::Heuristic);
        if text.chars().any(|c| c.is_ascii_digit()) {
            return single(&params.number_tag);
        }
        if text.starts_with(SENTENCE_PUNCT) {
            return single(&params.sentence_punct_tag);
        }
        let lower = text.to_lowercase();
        let len = lower.chars().count();
        if let Some((_, tags)) = self
            .endings
            .iter()
            .find(|(suffix, _)| len > suffix.chars().count() && lower.ends_with(suffix.as_str()))
        {
            return tags.clone().with_source(TagSource::Heuristic);
        }
        if text.contains('-') {
            return params.hyphen_tags.clone().with_source(TagSource::Heuristic);
        }
        let trimmed = text.trim_end_matches('.');
        if trimmed.len() > 1 && trimmed[1..].contains('.') {
            return single(&params.abbreviation_tag);
        }
        if token.starts_capitalized {
            let base: Vec<(String, f64)> = params
                .desperation_tags
                .iter()
                .filter(|(t, _)| *t != params.proper_noun_tag)
                .map(|(t, f)| (t.to_string(), f))
                .collect();
            return match TagFrequencies::new(base, TagSource::Heuristic) {
                Ok(base) => base
                    .mixed_with(&params.proper_noun_tag, params.proper_noun_unknown_freq_fraction)
                    .with_source(TagSource::Heuristic),
                Err(_) => single(&params.proper_noun_tag),
            };
        }
        params.desperation_tags.clone().with_source(TagSource::Heuristic)
    }
}

/// Parses one word list. Blank lines and comments are skipped.
pub fn parse_dict(file: &str, content: &str) -> Result<Vec<(String, TagFrequencies)>> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut out: Vec<(String, TagFrequencies)> = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || (line.starts_with('#') && !line.starts_with("#\t")) {
            continue;
        }
        if line.ends_with('\t') {
            return Err(Error::parse(file, line_no, "trailing tab"));
        }
        let mut fields = line.split('\t');
        let word = fields.next().unwrap_or_default();
        if word.is_empty() {
            return Err(Error::parse(file, line_no, "empty word"));
        }
        let rest: Vec<&str> = fields.collect();
        if rest.is_empty() {
            return Err(Error::parse(file, line_no, "missing TAG/freq fields"));
        }
        let tags = TagFrequencies::parse_fields(&rest).map_err(|m| Error::parse(file, line_no, m))?;
        match seen.get(word) {
            Some(&idx) => {
                let merged = merge_entries(&out[idx].1, &tags)
                    .map_err(|m| Error::parse(file, line_no, format!("{word}: {m}")))?;
                out[idx].1 = merged;
            }
            None => {
                seen.insert(word.to_string(), out.len());
                out.push((word.to_string(), tags));
            }
        }
    }
    Ok(out)
}

fn merge_entries(a: &TagFrequencies, b: &TagFrequencies) -> std::result::Result<TagFrequencies, String> {
    let mut entries = a.entries.clone();
    for (tag, &freq) in &b.entries {
        match entries.get(tag) {
            Some(&old) if old != freq => return Err(format!("conflicting frequencies for {tag}: {old} and {freq}")),
            _ => {
                entries.insert(tag.clone(), freq);
            }
        }
    }
    Ok(TagFrequencies {
        entries,
        source: TagSource::Lexicon,
    })
}

fn check_conflicts(lists: &[(&str, &Vec<(String, TagFrequencies)>)]) -> Result<()> {
    let mut first: HashMap<&str, (&str, &TagFrequencies)> = HashMap::new();
    for (file, entries) in lists {
        for (word, tags) in entries.iter() {
            match first.get(word.as_str()) {
                Some((other_file, other)) => {
                    if let Err(m) = merge_entries(other, tags) {
                        return Err(Error::Config(format!(
                            "{word} appears in {other_file} and {file} with {m}"
                        )));
                    }
                }
                None => {
                    first.insert(word.as_str(), (file, tags));
                }
            }
        }
    }
    Ok(())
}
