//! Descriptor arrays: 18 category probabilities plus two capitalization
//! flags per token.
//!
//! Slot layout:
//!
//! | slot | meaning                    | slot | meaning                      |
//! |------|----------------------------|------|------------------------------|
//! | 0    | others                     | 10   | comma or semicolon           |
//! | 1    | noun                       | 11   | left parenthesis             |
//! | 2    | verb                       | 12   | right parenthesis            |
//! | 3    | article                    | 13   | non-punctuation character    |
//! | 4    | modifier                   | 14   | possessive                   |
//! | 5    | conjunction                | 15   | colon or dash                |
//! | 6    | pronoun                    | 16   | abbreviation                 |
//! | 7    | preposition                | 17   | flag: capitalized            |
//! | 8    | proper noun                | 18   | flag: capital after candidate|
//! | 9    | number                     | 19   | sentence-ending punctuation  |

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lexicon::TagFrequencies;
use crate::tokenizer::Token;

pub const DESCRIPTOR_LEN: usize = 20;
pub const FLAG_CAPITALIZED: usize = 17;
pub const FLAG_CAPITAL_AFTER_CANDIDATE: usize = 18;

/// Slots holding category probabilities, in slot order.
pub const CATEGORY_SLOTS: [usize; 18] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 19];

const BROWN_MAP: &str = include_str!("../data/brown.map");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Other = 0,
    Noun = 1,
    Verb = 2,
    Article = 3,
    Modifier = 4,
    Conjunction = 5,
    Pronoun = 6,
    Preposition = 7,
    ProperNoun = 8,
    Number = 9,
    CommaOrSemicolon = 10,
    LeftParen = 11,
    RightParen = 12,
    NonPunctuation = 13,
    Possessive = 14,
    ColonOrDash = 15,
    Abbreviation = 16,
    SentenceEnd = 19,
}

impl Category {
    pub const ALL: [Category; 18] = [
        Category::Other,
        Category::Noun,
        Category::Verb,
        Category::Article,
        Category::Modifier,
        Category::Conjunction,
        Category::Pronoun,
        Category::Preposition,
        Category::ProperNoun,
        Category::Number,
        Category::CommaOrSemicolon,
        Category::LeftParen,
        Category::RightParen,
        Category::NonPunctuation,
        Category::Possessive,
        Category::ColonOrDash,
        Category::Abbreviation,
        Category::SentenceEnd,
    ];

    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn from_slot(slot: usize) -> Option<Category> {
        Category::ALL.iter().copied().find(|c| c.slot() == slot)
    }
}

/// Fine tag to category. Tags with no rule fall into [`Category::Other`].
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryMapping {
    rules: HashMap<String, Category>,
}

impl Default for CategoryMapping {
    fn default() -> Self {
        CategoryMapping::brown()
    }
}

impl CategoryMapping {
    /// The bundled mapping for Brown-style tags.
    pub fn brown() -> Self {
        CategoryMapping::parse("brown.map", BROWN_MAP).expect("bundled mapping is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        CategoryMapping::parse(&path.display().to_string(), &content)
    }

    /// Parses `TAG<TAB>slot` lines. `#` lines are comments unless the `#`
    /// is followed by a tab.
    pub fn parse(file: &str, content: &str) -> Result<Self> {
        let mut rules = HashMap::new();
        for (i, raw) in content.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.trim().is_empty() || (line.starts_with('#') && !line.starts_with("#\t")) {
                continue;
            }
            let (tag, slot) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(file, line_no, "expected TAG<TAB>slot"))?;
            if tag.is_empty() {
                return Err(Error::parse(file, line_no, "empty tag"));
            }
            let slot: usize = slot
                .trim()
                .parse()
                .map_err(|_| Error::parse(file, line_no, format!("bad slot {slot:?}")))?;
            let category = Category::from_slot(slot).ok_or_else(|| {
                Error::parse(
                    file,
                    line_no,
                    format!("slot {slot} is not a category slot (0..=16 or 19)"),
                )
            })?;
            if let Some(prev) = rules.insert(tag.to_string(), category) {
                if prev != category {
                    return Err(Error::parse(file, line_no, format!("tag {tag} mapped twice")));
                }
            }
        }
        Ok(CategoryMapping { rules })
    }

    pub fn from_rules<I, S>(rules: I) -> Self
    where
        I: IntoIterator<Item = (S, Category)>,
        S: Into<String>,
    {
        CategoryMapping {
            rules: rules.into_iter().map(|(t, c)| (t.into(), c)).collect(),
        }
    }

    pub fn category(&self, tag: &str) -> Option<Category> {
        self.rules.get(tag).copied()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Summed frequencies per category slot, before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryTotals {
    /// Indexed by slot; slots 17 and 18 stay zero.
    pub slots: [f64; DESCRIPTOR_LEN],
    /// Tags with no mapping rule (counted under slot 0).
    pub unmapped: Vec<String>,
}

impl CategoryTotals {
    pub fn get(&self, category: Category) -> f64 {
        self.slots[category.slot()]
    }

    pub fn total(&self) -> f64 {
        CATEGORY_SLOTS.iter().map(|&s| self.slots[s]).sum()
    }
}

pub fn map_to_categories(tags: &TagFrequencies, mapping: &CategoryMapping) -> CategoryTotals {
    let mut slots = [0.0; DESCRIPTOR_LEN];
    let mut unmapped = Vec::new();
    for (tag, freq) in tags.iter() {
        let category = match mapping.category(tag) {
            Some(c) => c,
            None => {
                log::debug!("no category for tag {tag:?}, counting as other");
                unmapped.push(tag.to_string());
                Category::Other
            }
        };
        slots[category.slot()] += freq;
    }
    CategoryTotals { slots, unmapped }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptorArray(pub [f64; DESCRIPTOR_LEN]);

impl DescriptorArray {
    /// Stand-in for context positions beyond the edge of a document.
    pub fn padding() -> Self {
        let mut values = [0.0; DESCRIPTOR_LEN];
        values[Category::Other.slot()] = 1.0;
        DescriptorArray(values)
    }

    pub fn values(&self) -> &[f64; DESCRIPTOR_LEN] {
        &self.0
    }

    pub fn category(&self, category: Category) -> f64 {
        self.0[category.slot()]
    }

    pub fn capitalized(&self) -> bool {
        self.0[FLAG_CAPITALIZED] == 1.0
    }

    pub fn capital_after_candidate(&self) -> bool {
        self.0[FLAG_CAPITAL_AFTER_CANDIDATE] == 1.0
    }

    pub fn category_sum(&self) -> f64 {
        CATEGORY_SLOTS.iter().map(|&s| self.0[s]).sum()
    }
}

/// Builds the descriptor for one token. `follows_candidate` says whether
/// the preceding token is a possible sentence end; it only matters when the
/// token is capitalized.
pub fn build_descriptor(
    token: &Token,
    tags: &TagFrequencies,
    mapping: &CategoryMapping,
    follows_candidate: bool,
) -> Result<DescriptorArray> {
    let totals = map_to_categories(tags, mapping);
    let total = totals.total();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Internal(format!(
            "category total {total} for token {:?}",
            token.text
        )));
    }
    let mut values = [0.0; DESCRIPTOR_LEN];
    for &slot in &CATEGORY_SLOTS {
        values[slot] = totals.slots[slot] / total;
    }
    if token.starts_capitalized {
        values[FLAG_CAPITALIZED] = 1.0;
        if follows_candidate {
            values[FLAG_CAPITAL_AFTER_CANDIDATE] = 1.0;
        }
    }
    Ok(DescriptorArray(values))
}
