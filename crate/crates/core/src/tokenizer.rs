//! Lexical analysis: words, numbers, punctuation and sentinels.
//!
//! Letter runs may contain internal hyphens, apostrophes and periods
//! (`well-known`, `don't`, `U.S`). Digit runs may contain internal periods
//! and commas (`3.5`, `1,000`). Runs of `.`, `!` and `?` form a single
//! punctuation token. Every other non-whitespace character is a token of its
//! own, except that dash runs (`--`) stay together.
//!
//! A period directly after a word is attached to it only when the word is a
//! known abbreviation or already contains an internal period. Such tokens
//! (`Mr.`, `p.m.`) are candidate sites in their own right.

use std::collections::HashSet;

use crate::error::{Error, Result};

pub const DEFAULT_SENTINEL: &str = "</s>";

/// Characters that may end a sentence.
pub const SENTENCE_PUNCT: [char; 3] = ['.', '!', '?'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Number,
    Punct,
    Sentinel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
    /// Byte offset of the first character in the source text.
    pub byte_offset: usize,
    pub starts_capitalized: bool,
    /// Preceded by a blank line. Context windows do not cross this edge.
    pub starts_paragraph: bool,
}

impl Token {
    pub fn new(text: impl Into<String>, kind: TokenKind, byte_offset: usize) -> Self {
        let text = text.into();
        let starts_capitalized = text.chars().next().is_some_and(char::is_uppercase);
        Token {
            text,
            kind,
            byte_offset,
            starts_capitalized,
            starts_paragraph: false,
        }
    }

    /// Byte offset one past the last character.
    pub fn end(&self) -> usize {
        self.byte_offset + self.text.len()
    }

    /// True when this token can end a sentence: a punctuation run starting
    /// with `.`, `!` or `?`, or an abbreviation-style word ending in `.`.
    pub fn is_candidate(&self) -> bool {
        match self.kind {
            TokenKind::Punct => self.text.starts_with(SENTENCE_PUNCT),
            TokenKind::Word => self.text.ends_with('.'),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidateSite {
    /// Index of the candidate token in the token sequence.
    pub index: usize,
    pub trailing_char: char,
}

/// Splits text into tokens. Holds the sentinel string and the set of
/// abbreviations that take a trailing period.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    sentinel: String,
    /// Lowercased abbreviations, each including its final period.
    abbreviations: HashSet<String>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer::new(DEFAULT_SENTINEL)
    }
}

impl Tokenizer {
    pub fn new(sentinel: impl Into<String>) -> Self {
        Tokenizer {
            sentinel: sentinel.into(),
            abbreviations: HashSet::new(),
        }
    }

    /// Adds abbreviations (with their final period, e.g. `Mr.`). Matching is
    /// case-insensitive.
    pub fn with_abbreviations<I, S>(mut self, abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.abbreviations.extend(
            abbreviations
                .into_iter()
                .map(|a| a.as_ref().to_lowercase())
                .filter(|a| a.ends_with('.')),
        );
        self
    }

    pub fn sentinel(&self) -> &str {
        &self.sentinel
    }

    /// Tokenizes raw bytes, rejecting invalid UTF-8.
    pub fn tokenize_bytes(&self, bytes: &[u8]) -> Result<Vec<Token>> {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::Decode {
            offset: e.valid_up_to(),
        })?;
        Ok(self.tokenize(text))
    }

    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (offset, c) = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if !self.sentinel.is_empty() && text[offset..].starts_with(&self.sentinel) {
                tokens.push(Token::new(self.sentinel.clone(), TokenKind::Sentinel, offset));
                let end = offset + self.sentinel.len();
                while i < chars.len() && chars[i].0 < end {
                    i += 1;
                }
                continue;
            }
            if SENTENCE_PUNCT.contains(&c) {
                let start = i;
                while i < chars.len() && SENTENCE_PUNCT.contains(&chars[i].1) {
                    i += 1;
                }
                tokens.push(Token::new(slice(text, &chars, start, i), TokenKind::Punct, offset));
                continue;
            }
            if c.is_alphanumeric() {
                i = self.scan_word(text, &chars, i, &mut tokens);
                continue;
            }
            if c == '\'' && is_possessive(&chars, i) {
                tokens.push(Token::new(slice(text, &chars, i, i + 2), TokenKind::Word, offset));
                i += 2;
                continue;
            }
            let start = i;
            i += 1;
            if c == '-' {
                while i < chars.len() && chars[i].1 == '-' {
                    i += 1;
                }
            }
            tokens.push(Token::new(slice(text, &chars, start, i), TokenKind::Punct, offset));
        }
        mark_paragraphs(text, &mut tokens);
        tokens
    }

    /// Scans an alphanumeric run starting at `start`, pushes one or two
    /// tokens and returns the index of the first unconsumed character.
    fn scan_word(&self, text: &str, chars: &[(usize, char)], start: usize, tokens: &mut Vec<Token>) -> usize {
        let at = |i: usize| chars.get(i).map(|&(_, c)| c);
        let mut all_digits = true;
        let mut internal_period = false;
        let mut i = start;
        while let Some(c) = at(i) {
            let prev = if i > start { at(i - 1) } else { None };
            let next = at(i + 1);
            if c.is_alphanumeric() {
                if !c.is_ascii_digit() {
                    all_digits = false;
                }
                i += 1;
            } else if (c == '.' || c == ',')
                && all_digits
                && prev.is_some_and(|p| p.is_ascii_digit())
                && next.is_some_and(|n| n.is_ascii_digit())
            {
                i += 1;
            } else if c == '.'
                && !all_digits
                && prev.is_some_and(char::is_alphabetic)
                && next.is_some_and(char::is_alphabetic)
            {
                internal_period = true;
                i += 1;
            } else if c == '-' && prev.is_some_and(char::is_alphanumeric) && next.is_some_and(char::is_alphanumeric) {
                all_digits = false;
                i += 1;
            } else if c == '\''
                && prev.is_some_and(char::is_alphabetic)
                && next.is_some_and(char::is_alphabetic)
                && !is_possessive(chars, i)
            {
                i += 1;
            } else {
                break;
            }
        }

        let offset = chars[start].0;
        let kind = if all_digits { TokenKind::Number } else { TokenKind::Word };
        let word = slice(text, chars, start, i);

        // A lone trailing period (not the start of `..` or `.!`) may attach.
        let lone_period = at(i) == Some('.') && !at(i + 1).is_some_and(|c| SENTENCE_PUNCT.contains(&c));
        if kind == TokenKind::Word && lone_period {
            let with_period = format!("{word}.");
            if internal_period || self.abbreviations.contains(&with_period.to_lowercase()) {
                tokens.push(Token::new(with_period, TokenKind::Word, offset));
                return i + 1;
            }
        }
        tokens.push(Token::new(word, kind, offset));
        i
    }
}

/// `'s` followed by a non-alphanumeric character (or end of text).
fn is_possessive(chars: &[(usize, char)], i: usize) -> bool {
    chars.get(i).is_some_and(|&(_, c)| c == '\'')
        && chars.get(i + 1).is_some_and(|&(_, c)| c == 's' || c == 'S')
        && !chars.get(i + 2).is_some_and(|&(_, c)| c.is_alphanumeric())
}

fn slice<'a>(text: &'a str, chars: &[(usize, char)], start: usize, end: usize) -> &'a str {
    let from = chars[start].0;
    let to = chars.get(end).map_or(text.len(), |&(o, _)| o);
    &text[from..to]
}

/// Tokenizes with no abbreviation list.
pub fn tokenize(text: &str, sentinel: &str) -> Vec<Token> {
    Tokenizer::new(sentinel).tokenize(text)
}

/// Flags tokens separated from their predecessor by a blank line. Only
/// whitespace lies between consecutive tokens.
fn mark_paragraphs(text: &str, tokens: &mut [Token]) {
    for i in 1..tokens.len() {
        let gap = &text[tokens[i - 1].end()..tokens[i].byte_offset];
        tokens[i].starts_paragraph = gap.matches('\n').count() >= 2;
    }
}

pub fn find_candidates(tokens: &[Token]) -> Vec<CandidateSite> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_candidate())
        .map(|(index, t)| CandidateSite {
            index,
            trailing_char: t.text.chars().last().unwrap_or('.'),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn splits_sentence_final_period() {
        let tokens = tokenize("at the plant. He had thought", DEFAULT_SENTINEL);
        assert_eq!(texts(&tokens), ["at", "the", "plant", ".", "He", "had", "thought"]);
        assert_eq!(tokens[3].kind, TokenKind::Punct);
        assert!(tokens[4].starts_capitalized);
        assert_eq!(tokens[4].byte_offset, 14);
    }

    #[test]
    fn blank_line_starts_paragraph() {
        let tokens = tokenize("It closed.\n\nHe left.\nShe \r\n \r\nstayed", DEFAULT_SENTINEL);
        let starts: Vec<&str> = tokens
            .iter()
            .filter(|t| t.starts_paragraph)
            .map(|t| t.text.as_str())
            .collect();
        assert_eq!(starts, ["He", "stayed"]);
    }

    #[test]
    fn decimal_number_is_one_token() {
        let tokens = tokenize("3.5", DEFAULT_SENTINEL);
        assert_eq!(tokens.len(), 1);
        assert_eq!(tokens[0].kind, TokenKind::Number);
        assert_eq!(tokens[0].text, "3.5");

        let tokens = tokenize("rose 1,000.25 points.", DEFAULT_SENTINEL);
        assert_eq!(texts(&tokens), ["rose", "1,000.25", "points", "."]);
    }

    #[test]
    fn punctuation_run_is_one_token() {
        let tokens = tokenize("?!", DEFAULT_SENTINEL);
        assert_eq!(tokens.len(), 1);
        assert_eq!(tokens[0].kind, TokenKind::Punct);
        let tokens = tokenize("wait...", DEFAULT_SENTINEL);
        assert_eq!(texts(&tokens), ["wait", "..."]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("", DEFAULT_SENTINEL).is_empty());
        assert!(tokenize(" \n\t ", DEFAULT_SENTINEL).is_empty());
    }

    #[test]
    fn internal_period_words_take_their_final_period() {
        let tokens = tokenize("by 5 p.m. Saturday and J.M. Freeman", DEFAULT_SENTINEL);
        assert_eq!(
            texts(&tokens),
            ["by", "5", "p.m.", "Saturday", "and", "J.M.", "Freeman"]
        );
    }

    #[test]
    fn listed_abbreviations_take_their_final_period() {
        let tok = Tokenizer::default().with_abbreviations(["Mr.", "inc."]);
        let tokens = tok.tokenize("Mr. Gray of Acme Inc. left.");
        assert_eq!(texts(&tokens), ["Mr.", "Gray", "of", "Acme", "Inc.", "left", "."]);
        // Unknown words leave the period separate.
        let tokens = Tokenizer::default().tokenize("Mr. Gray");
        assert_eq!(texts(&tokens), ["Mr", ".", "Gray"]);
        // Not attached when the period begins a longer run.
        let tokens = tok.tokenize("Acme Inc...");
        assert_eq!(texts(&tokens), ["Acme", "Inc", "..."]);
    }

    #[test]
    fn sentinels_hyphens_and_possessives() {
        let tokens = tokenize("He left. </s> The well-known firm's plant -- closed.</s>", "</s>");
        assert_eq!(
            texts(&tokens),
            [
                "He",
                "left",
                ".",
                "</s>",
                "The",
                "well-known",
                "firm",
                "'s",
                "plant",
                "--",
                "closed",
                ".",
                "</s>"
            ]
        );
        assert_eq!(tokens[3].kind, TokenKind::Sentinel);
        assert_eq!(tokens[7].kind, TokenKind::Word);
        let tokens = tokenize("don't stop", "</s>");
        assert_eq!(texts(&tokens), ["don't", "stop"]);
    }

    #[test]
    fn mixed_alphanumerics_are_words() {
        let tokens = tokenize("the 1920s", DEFAULT_SENTINEL);
        assert_eq!(tokens[1].kind, TokenKind::Word);
        assert_eq!(tokens[1].text, "1920s");
    }

    #[test]
    fn quotes_stay_separate() {
        let tokens = tokenize("\"Go.\" She", DEFAULT_SENTINEL);
        assert_eq!(texts(&tokens), ["\"", "Go", ".", "\"", "She"]);
    }

    #[test]
    fn invalid_utf8_reports_offset() {
        let err = Tokenizer::default().tokenize_bytes(b"abc \xff def").unwrap_err();
        assert!(matches!(err, Error::Decode { offset: 4 }));
    }

    #[test]
    fn candidates_include_abbreviation_words() {
        let tokens = tokenize(
            "It was due Friday by 5 p.m. Saturday would be too late.",
            DEFAULT_SENTINEL,
        );
        let sites = find_candidates(&tokens);
        let found: Vec<&str> = sites.iter().map(|s| tokens[s.index].text.as_str()).collect();
        assert_eq!(found, ["p.m.", "."]);
    }

    #[test]
    fn no_candidates_without_punctuation() {
        assert!(find_candidates(&tokenize("the plant closed", DEFAULT_SENTINEL)).is_empty());
    }

    #[test]
    fn candidates_for_question_and_exclamation_runs() {
        let tokens = tokenize("Who? Me!?", DEFAULT_SENTINEL);
        let sites = find_candidates(&tokens);
        let found: Vec<&str> = sites.iter().map(|s| tokens[s.index].text.as_str()).collect();
        assert_eq!(found, ["?", "!?"]);
        assert_eq!(sites[0].trailing_char, '?');
        assert_eq!(sites[1].trailing_char, '?');
    }

    #[test]
    fn sentinels_are_never_candidates() {
        let tokens = tokenize("End. </s>", "</s>");
        let sites = find_candidates(&tokens);
        assert_eq!(sites.len(), 1);
        assert_eq!(tokens[sites[0].index].text, ".");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn text_strategy() -> impl Strategy<Value = String> {
            proptest::collection::vec(
                prop_oneof![
                    "[a-zA-Z]{1,8}",
                    "[0-9]{1,4}(\\.[0-9]{1,2})?",
                    "[.!?]{1,3}",
                    "[,;:()\"'$%-]",
                    Just("</s>".to_string()),
                    Just("p.m.".to_string()),
                    Just("Mr.".to_string()),
                    Just("'s".to_string()),
                    "[ \n\t]{1,2}",
                    "[äÉß]",
                ],
                0..40,
            )
            .prop_map(|parts| parts.concat())
        }

        proptest! {
            #[test]
            fn round_trip_reproduces_non_whitespace(text in text_strategy()) {
                let tok = Tokenizer::default().with_abbreviations(["Mr."]);
                let tokens = tok.tokenize(&text);
                let joined: String = tokens.iter().map(|t| t.text.as_str()).collect();
                let expected: String = text.chars().filter(|c| !c.is_whitespace()).collect();
                prop_assert_eq!(joined, expected);
                for t in &tokens {
                    prop_assert!(!t.text.is_empty());
                    prop_assert_eq!(&text[t.byte_offset..t.end()], t.text.as_str());
                    prop_assert_eq!(
                        t.starts_capitalized,
                        t.text.chars().next().unwrap().is_uppercase()
                    );
                    if t.kind == TokenKind::Number {
                        prop_assert!(t.text.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ','));
                        prop_assert!(t.text.starts_with(|c: char| c.is_ascii_digit()));
                        prop_assert!(t.text.ends_with(|c: char| c.is_ascii_digit()));
                    }
                    if t.kind == TokenKind::Sentinel {
                        prop_assert_eq!(t.text.as_str(), "</s>");
                    }
                }
                // deterministic
                prop_assert_eq!(&tok.tokenize(&text), &tokens);
            }

            #[test]
            fn candidates_match_rescan(text in text_strategy()) {
                let tokens = tokenize(&text, DEFAULT_SENTINEL);
                let sites = find_candidates(&tokens);
                let rescan: Vec<usize> = tokens
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| match t.kind {
                        TokenKind::Punct => matches!(t.text.chars().next(), Some('.' | '!' | '?')),
                        TokenKind::Word => t.text.ends_with('.'),
                        _ => false,
                    })
                    .map(|(i, _)| i)
                    .collect();
                let got: Vec<usize> = sites.iter().map(|s| s.index).collect();
                prop_assert_eq!(got, rescan);
                for s in &sites {
                    prop_assert!(SENTENCE_PUNCT.contains(&s.trailing_char));
                }
            }
        }
    }
}
