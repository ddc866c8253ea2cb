//! Seeded generator for sentinel-annotated newswire-like text.
//!
//! Each sentence ends in exactly one boundary candidate. Independent
//! per-sentence features add at most one non-boundary candidate each: a
//! title before a name (`Mr. Gray`), a company abbreviation (`Acme Inc.
//! said`), a clock time (`at 5 p.m. on Friday`), a place abbreviation
//! (`the U.S. market`), a mid-sentence ellipsis, or a question embedded in
//! quotes. The generator counts candidates as it emits them, so the
//! reported totals are exact and the expected lower bound is
//! `1 / (1 + sum of feature rates)`.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lexicon::LexiconSources;
use crate::tokenizer::DEFAULT_SENTINEL;

/// Word lists by role. Content lists are ordered from most to least
/// frequent.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    pub nouns: Vec<String>,
    /// `(base, past)` forms.
    pub verbs: Vec<(String, String)>,
    pub adjectives: Vec<String>,
    pub adverbs: Vec<String>,
    pub prepositions: Vec<String>,
    pub determiners: Vec<String>,
    pub pronouns: Vec<String>,
    pub conjunctions: Vec<String>,
    pub given_names: Vec<String>,
    pub surnames: Vec<String>,
    pub companies: Vec<String>,
    pub weekdays: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbbreviationSet {
    /// Precede a surname, never end a sentence.
    pub titles: Vec<String>,
    /// Follow a company name, may end a sentence.
    pub corporate: Vec<String>,
    /// Follow a clock hour.
    pub times: Vec<String>,
    pub places: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub sentences: usize,
    pub sentinel: String,
    pub vocabulary: Vocabulary,
    pub abbreviations: AbbreviationSet,
    /// Chance of each extra prepositional phrase, up to `max_phrases`.
    pub phrase_rate: f64,
    pub max_phrases: usize,
    pub adjective_rate: f64,
    pub number_rate: f64,
    /// Fraction of numbers written with a decimal point.
    pub decimal_rate: f64,
    pub possessive_rate: f64,
    /// Sentences framed as reported speech (`"...," he said.`).
    pub speech_rate: f64,

    pub title_rate: f64,
    pub corporate_rate: f64,
    pub time_rate: f64,
    pub place_rate: f64,
    pub ellipsis_rate: f64,
    pub embedded_question_rate: f64,

    /// Sentences ending in a corporate, time or place abbreviation.
    pub abbreviation_eos_rate: f64,
    pub question_rate: f64,
    pub exclamation_rate: f64,
    /// Sentences wholly inside quotation marks.
    pub quote_rate: f64,
    pub ellipsis_eos_rate: f64,

    pub paragraph_sentences: usize,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            sentences: 500,
            sentinel: DEFAULT_SENTINEL.to_string(),
            vocabulary: Vocabulary::english(),
            abbreviations: AbbreviationSet::english(),
            phrase_rate: 0.45,
            max_phrases: 2,
            adjective_rate: 0.3,
            number_rate: 0.12,
            decimal_rate: 0.5,
            possessive_rate: 0.05,
            speech_rate: 0.05,
            title_rate: 0.12,
            corporate_rate: 0.06,
            time_rate: 0.05,
            place_rate: 0.04,
            ellipsis_rate: 0.03,
            embedded_question_rate: 0.03,
            abbreviation_eos_rate: 0.06,
            question_rate: 0.04,
            exclamation_rate: 0.02,
            quote_rate: 0.05,
            ellipsis_eos_rate: 0.02,
            paragraph_sentences: 8,
        }
    }
}

impl GeneratorParams {
    /// Expected fraction of candidates that are boundaries.
    pub fn expected_lower_bound(&self) -> f64 {
        1.0 / (1.0 + self.mid_sentence_rate())
    }

    fn mid_sentence_rate(&self) -> f64 {
        self.title_rate
            + self.corporate_rate
            + self.time_rate
            + self.place_rate
            + self.ellipsis_rate
            + self.embedded_question_rate
    }

    fn validate(&self) -> Result<()> {
        let v = &self.vocabulary;
        let required: [(&str, usize); 9] = [
            ("nouns", v.nouns.len()),
            ("verbs", v.verbs.len()),
            ("adjectives", v.adjectives.len()),
            ("prepositions", v.prepositions.len()),
            ("determiners", v.determiners.len()),
            ("pronouns", v.pronouns.len()),
            ("conjunctions", v.conjunctions.len()),
            ("surnames", v.surnames.len()),
            ("companies", v.companies.len()),
        ];
        if let Some((name, _)) = required.iter().find(|(_, n)| *n == 0) {
            return Err(Error::Argument(format!("vocabulary has no {name}")));
        }
        let a = &self.abbreviations;
        let needs = [
            ("titles", self.title_rate, a.titles.len()),
            (
                "corporate",
                self.corporate_rate + self.abbreviation_eos_rate,
                a.corporate.len(),
            ),
            ("times", self.time_rate + self.abbreviation_eos_rate, a.times.len()),
            ("places", self.place_rate + self.abbreviation_eos_rate, a.places.len()),
        ];
        for (name, rate, n) in needs {
            if rate > 0.0 && n == 0 {
                return Err(Error::Argument(format!("no {name} abbreviations for a nonzero rate")));
            }
        }
        if self.time_rate > 0.0 && v.weekdays.is_empty() {
            return Err(Error::Argument("vocabulary has no weekdays".into()));
        }
        let rates = [
            self.phrase_rate,
            self.adjective_rate,
            self.number_rate,
            self.decimal_rate,
            self.possessive_rate,
            self.speech_rate,
            self.title_rate,
            self.corporate_rate,
            self.time_rate,
            self.place_rate,
            self.ellipsis_rate,
            self.embedded_question_rate,
            self.abbreviation_eos_rate,
            self.question_rate,
            self.exclamation_rate,
            self.quote_rate,
            self.ellipsis_eos_rate,
        ];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::Argument("generator rates must lie in [0, 1]".into()));
        }
        let endings = self.abbreviation_eos_rate
            + self.question_rate
            + self.exclamation_rate
            + self.quote_rate
            + self.ellipsis_eos_rate;
        if endings > 1.0 {
            return Err(Error::Argument("sentence-ending rates sum above 1".into()));
        }
        if self.sentinel.trim().is_empty() {
            return Err(Error::Argument("sentinel must be non-empty".into()));
        }
        Ok(())
    }
}

fn strings(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| w.to_string()).collect()
}

impl Vocabulary {
    /// A small business-news vocabulary.
    pub fn english() -> Self {
        Vocabulary {
            nouns: strings(&[
                "company",
                "market",
                "plant",
                "share",
                "price",
                "report",
                "board",
                "director",
                "official",
                "agreement",
                "contract",
                "bank",
                "stock",
                "investor",
                "analyst",
                "quarter",
                "year",
                "month",
                "week",
                "government",
                "court",
                "case",
                "plan",
                "program",
                "project",
                "system",
                "group",
                "unit",
                "division",
                "office",
                "building",
                "city",
                "state",
                "country",
                "industry",
                "business",
                "firm",
                "deal",
                "offer",
                "bid",
                "loss",
                "profit",
                "revenue",
                "sale",
                "order",
                "product",
                "factory",
                "worker",
                "union",
                "strike",
                "manager",
                "chairman",
                "president",
                "spokesman",
                "committee",
                "agency",
                "department",
                "budget",
                "tax",
                "rate",
                "fund",
                "bond",
                "debt",
                "loan",
                "credit",
                "increase",
                "decline",
                "drop",
                "gain",
                "earnings",
                "dividend",
                "merger",
                "acquisition",
                "lawsuit",
                "judge",
                "jury",
                "trial",
                "decision",
                "proposal",
                "vote",
                "election",
                "campaign",
                "policy",
                "issue",
                "problem",
                "question",
                "statement",
                "interview",
                "meeting",
                "session",
                "hearing",
                "study",
                "survey",
                "forecast",
                "estimate",
                "figure",
                "number",
                "percentage",
                "amount",
                "cost",
                "value",
                "asset",
                "property",
                "equipment",
                "machine",
                "computer",
                "software",
                "network",
                "service",
                "customer",
                "client",
                "partner",
                "supplier",
                "retailer",
                "store",
                "shipment",
                "truck",
                "airline",
                "flight",
                "airport",
                "hospital",
                "school",
                "university",
                "student",
                "teacher",
                "doctor",
                "patient",
                "reporter",
                "newspaper",
                "magazine",
            ]),
            verbs: [
                ("say", "said"),
                ("report", "reported"),
                ("sell", "sold"),
                ("buy", "bought"),
                ("close", "closed"),
                ("open", "opened"),
                ("announce", "announced"),
                ("expect", "expected"),
                ("acquire", "acquired"),
                ("build", "built"),
                ("approve", "approved"),
                ("reject", "rejected"),
                ("raise", "raised"),
                ("cut", "cut"),
                ("lose", "lost"),
                ("win", "won"),
                ("sign", "signed"),
                ("hire", "hired"),
                ("plan", "planned"),
                ("offer", "offered"),
                ("increase", "increased"),
                ("reduce", "reduced"),
                ("move", "moved"),
                ("leave", "left"),
                ("meet", "met"),
                ("visit", "visited"),
                ("call", "called"),
                ("file", "filed"),
                ("ask", "asked"),
                ("tell", "told"),
                ("take", "took"),
                ("make", "made"),
                ("give", "gave"),
                ("find", "found"),
                ("hold", "held"),
                ("pay", "paid"),
                ("end", "ended"),
                ("start", "started"),
                ("complete", "completed"),
                ("review", "reviewed"),
                ("support", "supported"),
                ("oppose", "opposed"),
                ("change", "changed"),
                ("control", "controlled"),
                ("manage", "managed"),
                ("own", "owned"),
                ("run", "ran"),
                ("see", "saw"),
                ("need", "needed"),
                ("receive", "received"),
                ("propose", "proposed"),
                ("consider", "considered"),
                ("join", "joined"),
                ("return", "returned"),
                ("discuss", "discussed"),
                ("describe", "described"),
                ("drop", "dropped"),
                ("gain", "gained"),
                ("post", "posted"),
                ("predict", "predicted"),
                ("deny", "denied"),
                ("confirm", "confirmed"),
                ("settle", "settled"),
                ("block", "blocked"),
                ("delay", "delayed"),
                ("launch", "launched"),
                ("seek", "sought"),
                ("keep", "kept"),
                ("spend", "spent"),
            ]
            .iter()
            .map(|(b, p)| (b.to_string(), p.to_string()))
            .collect(),
            adjectives: strings(&[
                "new",
                "large",
                "small",
                "major",
                "big",
                "strong",
                "weak",
                "early",
                "late",
                "federal",
                "local",
                "national",
                "foreign",
                "public",
                "private",
                "final",
                "recent",
                "annual",
                "quarterly",
                "senior",
                "former",
                "top",
                "key",
                "chief",
                "high",
                "low",
                "long",
                "short",
                "net",
                "total",
                "current",
                "joint",
                "financial",
                "economic",
                "political",
                "legal",
                "industrial",
                "international",
                "domestic",
                "similar",
                "separate",
                "special",
                "full",
                "independent",
                "additional",
                "general",
                "regional",
                "important",
                "difficult",
                "sharp",
            ]),
            adverbs: strings(&[
                "also",
                "still",
                "now",
                "again",
                "later",
                "quickly",
                "recently",
                "already",
                "yesterday",
                "today",
                "sharply",
                "slightly",
                "soon",
                "nearly",
                "abroad",
                "here",
                "there",
                "early",
                "together",
                "overseas",
            ]),
            prepositions: strings(&[
                "in", "of", "for", "on", "with", "at", "from", "by", "to", "after", "before", "during", "under",
                "over", "against", "into",
            ]),
            determiners: strings(&[
                "the", "a", "its", "their", "this", "that", "each", "every", "some", "no",
            ]),
            pronouns: strings(&["he", "it", "they", "she", "we"]),
            conjunctions: strings(&["and", "but", "or"]),
            given_names: strings(&[
                "John", "Mary", "Robert", "Linda", "James", "Susan", "Michael", "Karen", "William", "Nancy", "David",
                "Betty", "Richard", "Helen", "Charles", "Sandra", "Joseph", "Donna", "Thomas", "Carol", "Peter",
                "Ruth", "Paul", "Sharon", "Mark", "Laura", "George", "Sarah", "Kenneth", "Anne",
            ]),
            surnames: strings(&[
                "Smith",
                "Jones",
                "Brown",
                "Miller",
                "Davis",
                "Wilson",
                "Moore",
                "Taylor",
                "Anderson",
                "Jackson",
                "White",
                "Harris",
                "Martin",
                "Thompson",
                "Garcia",
                "Clark",
                "Lewis",
                "Walker",
                "Hall",
                "Allen",
                "King",
                "Wright",
                "Hill",
                "Green",
                "Baker",
                "Adams",
                "Nelson",
                "Carter",
                "Mitchell",
                "Roberts",
                "Turner",
                "Phillips",
                "Campbell",
                "Parker",
                "Evans",
                "Edwards",
                "Collins",
                "Stewart",
                "Gray",
                "Sharp",
                "Major",
                "North",
                "Carpenter",
                "Long",
            ]),
            companies: strings(&[
                "Acme",
                "Globex",
                "Initech",
                "Hooli",
                "Vandelay",
                "Stark",
                "Wayne",
                "Cyberdyne",
                "Tyrell",
                "Soylent",
                "Umbrella",
                "Wonka",
                "Oscorp",
                "Dunder",
                "Prestige",
                "Monarch",
                "Aperture",
                "Sterling",
                "Atlas",
                "Pinnacle",
                "Summit",
                "Vertex",
                "Zenith",
                "Apex",
                "Nimbus",
            ]),
            weekdays: strings(&["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"]),
        }
    }
}

impl AbbreviationSet {
    pub fn english() -> Self {
        AbbreviationSet {
            titles: strings(&[
                "Mr.", "Mrs.", "Ms.", "Dr.", "Gov.", "Sen.", "Rep.", "Gen.", "Col.", "Prof.",
            ]),
            corporate: strings(&["Inc.", "Corp.", "Co.", "Ltd.", "Bros."]),
            times: strings(&["p.m.", "a.m."]),
            places: strings(&["U.S.", "U.K."]),
        }
    }

    pub fn all(&self) -> impl Iterator<Item = &String> {
        self.titles
            .iter()
            .chain(&self.corporate)
            .chain(&self.times)
            .chain(&self.places)
    }
}

/// An annotated corpus with its ground-truth counts.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCorpus {
    pub text: String,
    pub sentences: usize,
    pub candidates: usize,
    pub boundaries: usize,
}

impl GeneratedCorpus {
    pub fn lower_bound(&self) -> f64 {
        self.boundaries as f64 / self.candidates as f64
    }
}

#[derive(Debug, Clone)]
enum Piece {
    Word(String),
    /// Glued to the previous piece.
    Attached(String),
    OpenQuote,
    CloseQuote,
    /// A candidate site; `glued` punctuation has no space before it.
    Candidate {
        text: String,
        glued: bool,
        boundary: bool,
    },
}

/// Zipf-weighted sampler over one word list.
struct Pool<'a> {
    words: &'a [String],
    dist: Option<WeightedIndex<f64>>,
}

impl<'a> Pool<'a> {
    fn new(words: &'a [String]) -> Self {
        let dist = (!words.is_empty())
            .then(|| WeightedIndex::new((0..words.len()).map(zipf_weight)).expect("positive weights"));
        Pool { words, dist }
    }

    fn pick(&self, rng: &mut ChaCha8Rng) -> &'a str {
        let dist = self.dist.as_ref().expect("pool checked non-empty");
        &self.words[dist.sample(rng)]
    }
}

fn zipf_weight(rank: usize) -> f64 {
    1.0 / ((rank + 1) as f64).powf(0.8)
}

struct Generator<'a> {
    p: &'a GeneratorParams,
    rng: ChaCha8Rng,
    nouns: Pool<'a>,
    adjectives: Pool<'a>,
    adverbs: Pool<'a>,
    prepositions: Pool<'a>,
    determiners: Pool<'a>,
    pronouns: Pool<'a>,
    conjunctions: Pool<'a>,
    given: Pool<'a>,
    surnames: Pool<'a>,
    companies: Pool<'a>,
    weekdays: Pool<'a>,
    verb_weights: WeightedIndex<f64>,
}

enum Ending {
    Period,
    Question,
    Exclamation,
    Ellipsis,
    Abbreviation,
    Quoted,
}

impl<'a> Generator<'a> {
    fn new(p: &'a GeneratorParams, seed: u64) -> Self {
        let v = &p.vocabulary;
        Generator {
            p,
            rng: ChaCha8Rng::seed_from_u64(seed),
            nouns: Pool::new(&v.nouns),
            adjectives: Pool::new(&v.adjectives),
            adverbs: Pool::new(&v.adverbs),
            prepositions: Pool::new(&v.prepositions),
            determiners: Pool::new(&v.determiners),
            pronouns: Pool::new(&v.pronouns),
            conjunctions: Pool::new(&v.conjunctions),
            given: Pool::new(&v.given_names),
            surnames: Pool::new(&v.surnames),
            companies: Pool::new(&v.companies),
            weekdays: Pool::new(&v.weekdays),
            verb_weights: WeightedIndex::new((0..v.verbs.len()).map(zipf_weight)).expect("verbs checked"),
        }
    }

    fn chance(&mut self, rate: f64) -> bool {
        self.rng.gen_bool(rate)
    }

    fn choose<'s>(&mut self, list: &'s [String]) -> &'s str {
        &list[self.rng.gen_range(0..list.len())]
    }

    fn verb(&mut self) -> &'a (String, String) {
        &self.p.vocabulary.verbs[self.verb_weights.sample(&mut self.rng)]
    }

    fn word(out: &mut Vec<Piece>, w: &str) {
        out.push(Piece::Word(w.to_string()));
    }

    fn person(&mut self, out: &mut Vec<Piece>) {
        if !self.p.vocabulary.given_names.is_empty() && self.chance(0.4) {
            let g = self.given.pick(&mut self.rng);
            Self::word(out, g);
        }
        let s = self.surnames.pick(&mut self.rng);
        Self::word(out, s);
    }

    fn titled_person(&mut self, out: &mut Vec<Piece>) {
        let title = self.choose(&self.p.abbreviations.titles).to_string();
        out.push(Piece::Candidate {
            text: title,
            glued: false,
            boundary: false,
        });
        let s = self.surnames.pick(&mut self.rng);
        Self::word(out, s);
    }

    fn number(&mut self, out: &mut Vec<Piece>) {
        let decimal = self.chance(self.p.decimal_rate);
        let whole = self.rng.gen_range(1..100);
        let n = if decimal {
            format!("{whole}.{}", self.rng.gen_range(1..100))
        } else {
            whole.to_string()
        };
        if self.chance(0.5) {
            out.push(Piece::Word("$".into()));
            out.push(Piece::Attached(n));
            Self::word(out, if self.chance(0.7) { "million" } else { "billion" });
        } else {
            Self::word(out, &n);
            Self::word(out, "percent");
        }
    }

    fn noun_phrase(&mut self, out: &mut Vec<Piece>) {
        let det = self.determiners.pick(&mut self.rng);
        let adjective = (self.chance(self.p.adjective_rate)).then(|| self.adjectives.pick(&mut self.rng));
        let noun = self.nouns.pick(&mut self.rng);
        let next = adjective.unwrap_or(noun);
        let det = if det == "a" && next.starts_with(['a', 'e', 'i', 'o', 'u']) {
            "an"
        } else {
            det
        };
        Self::word(out, det);
        if let Some(a) = adjective {
            Self::word(out, a);
        }
        Self::word(out, noun);
        if self.chance(self.p.possessive_rate) {
            out.push(Piece::Attached("'s".into()));
            let n = self.nouns.pick(&mut self.rng);
            Self::word(out, n);
        }
    }

    fn subject(&mut self, out: &mut Vec<Piece>) {
        let r: f64 = self.rng.gen();
        if r < 0.3 {
            let p = self.pronouns.pick(&mut self.rng);
            Self::word(out, p);
        } else if r < 0.7 {
            self.noun_phrase(out);
        } else if r < 0.9 {
            self.person(out);
        } else {
            let c = self.companies.pick(&mut self.rng);
            Self::word(out, c);
        }
    }

    fn object(&mut self, out: &mut Vec<Piece>) {
        if self.chance(self.p.number_rate) {
            self.number(out);
        } else if self.chance(0.15) {
            self.person(out);
        } else {
            self.noun_phrase(out);
        }
    }

    fn phrase(&mut self, out: &mut Vec<Piece>) {
        let prep = self.prepositions.pick(&mut self.rng);
        Self::word(out, prep);
        self.noun_phrase(out);
    }

    fn clock(&mut self, out: &mut Vec<Piece>, boundary: bool) {
        Self::word(out, "at");
        let hour = self.rng.gen_range(1..=12).to_string();
        Self::word(out, &hour);
        let t = self.choose(&self.p.abbreviations.times).to_string();
        out.push(Piece::Candidate {
            text: t,
            glued: false,
            boundary,
        });
    }

    fn company_with_suffix(&mut self, out: &mut Vec<Piece>, boundary: bool) {
        let c = self.companies.pick(&mut self.rng);
        Self::word(out, c);
        let s = self.choose(&self.p.abbreviations.corporate).to_string();
        out.push(Piece::Candidate {
            text: s,
            glued: false,
            boundary,
        });
    }

    fn place(&mut self, out: &mut Vec<Piece>, boundary: bool) {
        Self::word(out, "the");
        let s = self.choose(&self.p.abbreviations.places).to_string();
        out.push(Piece::Candidate {
            text: s,
            glued: false,
            boundary,
        });
    }

    fn ending(&mut self) -> Ending {
        let p = self.p;
        let r: f64 = self.rng.gen();
        let mut acc = p.abbreviation_eos_rate;
        if r < acc {
            return Ending::Abbreviation;
        }
        acc += p.question_rate;
        if r < acc {
            return Ending::Question;
        }
        acc += p.exclamation_rate;
        if r < acc {
            return Ending::Exclamation;
        }
        acc += p.quote_rate;
        if r < acc {
            return Ending::Quoted;
        }
        acc += p.ellipsis_eos_rate;
        if r < acc {
            return Ending::Ellipsis;
        }
        Ending::Period
    }

    /// Subject, verb, object and trailing phrases, carrying the
    /// mid-sentence features.
    fn clause(&mut self, out: &mut Vec<Piece>, title: bool, corporate: bool) {
        let title_in_subject = title && self.chance(0.5);
        if corporate {
            self.company_with_suffix(out, false);
        } else if title_in_subject {
            self.titled_person(out);
        } else {
            self.subject(out);
        }
        let verb = self.verb().1.clone();
        Self::word(out, &verb);
        if title && !title_in_subject {
            self.titled_person(out);
        } else {
            self.object(out);
        }
    }

    fn sentence(&mut self) -> Vec<Piece> {
        let p = self.p;
        let mut out = Vec::new();
        let title = self.chance(p.title_rate);
        let corporate = self.chance(p.corporate_rate);
        let time = self.chance(p.time_rate);
        let place = self.chance(p.place_rate);
        let ellipsis = self.chance(p.ellipsis_rate);
        let embedded_question = self.chance(p.embedded_question_rate);

        let ending = if embedded_question {
            Ending::Period
        } else {
            self.ending()
        };
        let quoted = matches!(ending, Ending::Quoted);
        let speech = !quoted && !embedded_question && self.chance(p.speech_rate);

        if embedded_question {
            out.push(Piece::OpenQuote);
            Self::word(&mut out, "did");
            self.subject(&mut out);
            let verb = self.verb().0.clone();
            Self::word(&mut out, &verb);
            self.object(&mut out);
            out.push(Piece::Candidate {
                text: "?".into(),
                glued: true,
                boundary: false,
            });
            out.push(Piece::CloseQuote);
            Self::word(&mut out, "asked");
        } else if quoted || speech {
            out.push(Piece::OpenQuote);
        }

        if embedded_question {
            if title {
                self.titled_person(&mut out);
            } else {
                self.person(&mut out);
            }
            // the remaining mid-sentence features ride on a second clause
            if corporate || place || time || ellipsis {
                Self::word(&mut out, "after");
                self.clause(&mut out, false, corporate);
            }
        } else {
            self.clause(&mut out, title, corporate);
        }

        if place {
            let prep = if self.chance(0.5) { "in" } else { "from" };
            Self::word(&mut out, prep);
            self.place(&mut out, false);
            let n = self.nouns.pick(&mut self.rng);
            Self::word(&mut out, n);
        }
        if time {
            self.clock(&mut out, false);
            Self::word(&mut out, "on");
            let d = self.weekdays.pick(&mut self.rng);
            Self::word(&mut out, d);
        }
        if ellipsis {
            out.push(Piece::Candidate {
                text: "...".into(),
                glued: false,
                boundary: false,
            });
            let c = self.conjunctions.pick(&mut self.rng);
            Self::word(&mut out, c);
            let pr = self.pronouns.pick(&mut self.rng);
            Self::word(&mut out, pr);
            let verb = self.verb().1.clone();
            Self::word(&mut out, &verb);
            self.object(&mut out);
        }
        for _ in 0..p.max_phrases {
            if !self.chance(p.phrase_rate) {
                break;
            }
            self.phrase(&mut out);
        }
        if !matches!(ending, Ending::Abbreviation) && !p.vocabulary.adverbs.is_empty() && self.chance(0.1) {
            let a = self.adverbs.pick(&mut self.rng);
            Self::word(&mut out, a);
        }

        if speech {
            out.push(Piece::Attached(",".into()));
            out.push(Piece::CloseQuote);
            if self.chance(0.5) {
                let pr = self.pronouns.pick(&mut self.rng);
                Self::word(&mut out, pr);
            } else {
                self.person(&mut out);
            }
            Self::word(&mut out, "said");
        }

        let punct = |text: &str, glued: bool| Piece::Candidate {
            text: text.into(),
            glued,
            boundary: true,
        };
        match ending {
            Ending::Period => out.push(punct(".", true)),
            Ending::Question => out.push(punct("?", true)),
            Ending::Exclamation => out.push(punct("!", true)),
            Ending::Ellipsis => out.push(punct("...", true)),
            Ending::Quoted => {
                out.push(punct(".", true));
                out.push(Piece::CloseQuote);
            }
            Ending::Abbreviation => match self.rng.gen_range(0..3) {
                0 => {
                    Self::word(&mut out, "from");
                    self.company_with_suffix(&mut out, true);
                }
                1 => self.clock(&mut out, true),
                _ => {
                    Self::word(&mut out, "in");
                    self.place(&mut out, true);
                }
            },
        }
        out
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

struct Renderer<'s> {
    text: String,
    sentinel: &'s str,
    space_before_next: bool,
    candidates: usize,
    boundaries: usize,
}

impl Renderer<'_> {
    fn gap(&mut self) {
        if self.space_before_next {
            self.text.push(' ');
        }
    }

    fn sentence(&mut self, pieces: &[Piece]) {
        let mut capitalize_next = true;
        for piece in pieces {
            match piece {
                Piece::Word(w) => {
                    self.gap();
                    let w = if capitalize_next { capitalize(w) } else { w.clone() };
                    self.text.push_str(&w);
                    self.space_before_next = true;
                    capitalize_next = false;
                }
                Piece::Attached(s) => {
                    self.text.push_str(s);
                    self.space_before_next = true;
                }
                Piece::OpenQuote => {
                    self.gap();
                    self.text.push('"');
                    self.space_before_next = false;
                }
                Piece::CloseQuote => {
                    self.text.push('"');
                    self.space_before_next = true;
                }
                Piece::Candidate { text, glued, boundary } => {
                    if !glued {
                        self.gap();
                    }
                    self.text.push_str(text);
                    self.candidates += 1;
                    if *boundary {
                        self.boundaries += 1;
                        self.text.push(' ');
                        self.text.push_str(self.sentinel);
                    }
                    self.space_before_next = true;
                    capitalize_next = false;
                }
            }
        }
    }
}

/// Generates a sentinel-annotated corpus. Identical parameters and seed give
/// identical output.
pub fn generate_corpus(params: &GeneratorParams, seed: u64) -> Result<GeneratedCorpus> {
    params.validate()?;
    let mut gen = Generator::new(params, seed);
    let mut r = Renderer {
        text: String::new(),
        sentinel: &params.sentinel,
        space_before_next: false,
        candidates: 0,
        boundaries: 0,
    };
    for i in 0..params.sentences {
        if i > 0 && params.paragraph_sentences > 0 && i % params.paragraph_sentences == 0 {
            r.text.push_str("\n\n");
            r.space_before_next = false;
        }
        let pieces = gen.sentence();
        r.sentence(&pieces);
    }
    if !r.text.is_empty() {
        r.text.push('\n');
    }
    Ok(GeneratedCorpus {
        text: r.text,
        sentences: params.sentences,
        candidates: r.candidates,
        boundaries: r.boundaries,
    })
}

/// Word lists matching a vocabulary, with seeded Zipf-like frequencies.
pub fn synthetic_lexicon(vocabulary: &Vocabulary, abbreviations: &AbbreviationSet, seed: u64) -> LexiconSources {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut add = |word: &str, tag: &str, freq: f64| {
        *words
            .entry(word.to_string())
            .or_default()
            .entry(tag.to_string())
            .or_insert(0.0) += freq.round().max(1.0);
    };
    let function = |rank: usize| 20_000.0 / (rank + 1) as f64;
    let content = |rank: usize| 2_000.0 * zipf_weight(rank);

    for (i, w) in vocabulary.determiners.iter().enumerate() {
        let tag = if matches!(w.as_str(), "its" | "their") {
            "PP$"
        } else {
            "AT"
        };
        add(w, tag, function(i));
    }
    if vocabulary.determiners.iter().any(|d| d == "a") {
        add("an", "AT", 3_000.0);
    }
    for (i, w) in vocabulary.pronouns.iter().enumerate() {
        add(w, "PPS", function(i) / 2.0);
    }
    for (i, w) in vocabulary.prepositions.iter().enumerate() {
        add(w, "IN", function(i));
    }
    for (i, w) in vocabulary.conjunctions.iter().enumerate() {
        add(w, "CC", function(i));
    }
    add("did", "DOD", 800.0);
    add("percent", "NN", 600.0);
    add("million", "CD", 700.0);
    add("billion", "CD", 300.0);
    for (i, w) in vocabulary.weekdays.iter().enumerate() {
        add(w, "NR", 100.0 / (i + 1) as f64);
    }

    for (i, w) in vocabulary.nouns.iter().enumerate() {
        let f = content(i) * rng.gen_range(0.8..1.2);
        add(w, "NN", f);
        if rng.gen_bool(0.3) {
            add(w, "VB", f * rng.gen_range(0.05..0.4));
        }
    }
    for (i, (base, past)) in vocabulary.verbs.iter().enumerate() {
        let f = content(i) * rng.gen_range(0.8..1.2);
        add(base, "VB", f);
        if rng.gen_bool(0.3) {
            add(base, "NN", f * rng.gen_range(0.05..0.4));
        }
        add(past, "VBD", f);
        if rng.gen_bool(0.7) {
            add(past, "VBN", f * rng.gen_range(0.2..1.0));
        }
    }
    for (i, w) in vocabulary.adjectives.iter().enumerate() {
        let f = content(i) * rng.gen_range(0.8..1.2);
        add(w, "JJ", f);
        if rng.gen_bool(0.25) {
            let tag = if rng.gen_bool(0.5) { "NN" } else { "RB" };
            add(w, tag, f * rng.gen_range(0.05..0.4));
        }
    }
    for (i, w) in vocabulary.adverbs.iter().enumerate() {
        let f = content(i) * rng.gen_range(0.8..1.2);
        add(w, "RB", f);
    }

    let mut sources = LexiconSources::default();
    for (word, tags) in &words {
        sources.words.push_str(word);
        for (tag, f) in tags {
            sources.words.push_str(&format!("\t{tag}/{f}"));
        }
        sources.words.push('\n');
    }
    for t in &abbreviations.titles {
        sources.abbreviations.push_str(&format!("{t}\tAB/10\tNP/10\n"));
    }
    for t in &abbreviations.corporate {
        sources.abbreviations.push_str(&format!("{t}\tAB/10\n"));
    }
    for t in &abbreviations.times {
        sources.abbreviations.push_str(&format!("{t}\tAB/5\tRB/5\n"));
    }
    for t in &abbreviations.places {
        sources.abbreviations.push_str(&format!("{t}\tAB/5\tNP/5\n"));
    }
    sources.chars = [
        ".\t./1",
        "!\t./1",
        "?\t./1",
        ",\t,/1",
        ";\t;/1",
        ":\t:/1",
        "--\t--/1",
        "(\t(/1",
        ")\t)/1",
        "\"\t''/1",
        "$\t$/1",
        "%\tSYM/1",
        "&\tSYM/1",
        "'s\tPOS/1",
    ]
    .iter()
    .map(|l| format!("{l}\n"))
    .collect();
    sources.endings = [
        "ing\tVBG/5\tNN/1",
        "ed\tVBD/6\tVBN/4",
        "s\tNNS/5\tVBZ/2",
        "ly\tRB/1",
        "tion\tNN/1",
        "ment\tNN/1",
        "ness\tNN/1",
        "ity\tNN/1",
        "er\tNN/3\tJJR/1",
        "al\tJJ/2\tNN/1",
        "ous\tJJ/1",
        "ive\tJJ/1",
    ]
    .iter()
    .map(|l| format!("{l}\n"))
    .collect();
    sources
}
