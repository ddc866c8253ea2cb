//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use satz::descriptor::{build_descriptor, CATEGORY_SLOTS};
use satz::evaluation::{
    baseline_decisions, case_fold_annotated, evaluate, generate_corpus, sweep_thresholds, synthetic_lexicon, CaseMode,
    EvalReport, GeneratedCorpus, GeneratorParams, STANDARD_SWEEP,
};
use satz::lexicon::TagSource;
use satz::network::{train, Example};
use satz::segmenter::{classify, extract_cases, strip_labels, DEFAULT_AMBIGUOUS_MARKER};
use satz::{
    CategoryMapping, Features, HeuristicParams, Lexicon, Network, Segmenter, TagFrequencies, Thresholds, Token,
    TokenKind, TrainConfig,
};

const SENTINEL: &str = "</s>";
const CONTEXT: usize = 6;
const HIDDEN: usize = 2;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn descriptor_normalization() -> Outcome {
    let mapping = CategoryMapping::brown();
    let tags = [
        "NN", "NNS", "VB", "VBD", "AT", "JJ", "RB", "CC", "PPS", "IN", "NP", "CD", ",", "(", ")", "''", "POS", ":",
        "AB", ".", "UH", "QL",
    ];
    let token = Token::new("x", TokenKind::Word, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let start = Instant::now();
    let mut worst_sum = 0.0f64;
    let mut worst_scale = 0.0f64;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=6);
        let entries: Vec<(String, f64)> = (0..n)
            .map(|_| {
                (
                    tags[rng.gen_range(0..tags.len())].to_string(),
                    rng.gen_range(0.01..1000.0),
                )
            })
            .collect();
        let tf = TagFrequencies::new(entries, TagSource::Lexicon).map_err(|e| e.to_string())?;
        let d = build_descriptor(&token, &tf, &mapping, false).map_err(|e| e.to_string())?;
        worst_sum = worst_sum.max((d.category_sum() - 1.0).abs());
        let factor = rng.gen_range(1e-3..1e3);
        let scaled = build_descriptor(&token, &tf.scaled(factor).map_err(|e| e.to_string())?, &mapping, false)
            .map_err(|e| e.to_string())?;
        for &s in &CATEGORY_SLOTS {
            worst_scale = worst_scale.max((d.values()[s] - scaled.values()[s]).abs());
        }
    }
    let elapsed = start.elapsed();
    check(
        worst_sum <= 1e-9 && worst_scale <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("max |sum-1| {worst_sum:.2e}, max scale drift {worst_scale:.2e}, {elapsed:.2?}"),
    )
}

fn well_golden() -> Outcome {
    let mapping = CategoryMapping::brown();
    let tf = TagFrequencies::new(
        [
            ("JJ", 15.0),
            ("NN", 18.0),
            ("QL", 68.0),
            ("RB", 634.0),
            ("UH", 22.0),
            ("VB", 5.0),
        ],
        TagSource::Lexicon,
    )
    .map_err(|e| e.to_string())?;
    let d =
        build_descriptor(&Token::new("well", TokenKind::Word, 0), &tf, &mapping, false).map_err(|e| e.to_string())?;
    let noun = d.values()[1];
    let verb = d.values()[2];
    check(
        (d.category_sum() - 1.0).abs() <= 1e-12
            && (noun - 18.0 / 762.0).abs() <= 1e-12
            && (verb - 5.0 / 762.0).abs() <= 1e-12,
        format!("noun {noun}, verb {verb}, sum {}", d.category_sum()),
    )
}

fn gradient_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-5;
    let start = Instant::now();
    let mut worst = 0.0f64;
    for config in 0..100u64 {
        let k = [2, 4, 6][rng.gen_range(0..3)];
        let j = rng.gen_range(1..=3);
        let mut net = Network::new(k, j, config, 1.0).map_err(|e| e.to_string())?;
        let input: Vec<f64> = (0..k * 20).map(|_| rng.gen_range(0.0..1.0)).collect();
        let target = if rng.gen_bool(0.5) { 1.0 } else { 0.0 };
        let analytic = net.gradient(&input, target).map_err(|e| e.to_string())?.to_flat();
        let params = net.parameters();
        let loss = |net: &Network| {
            let o = net.forward(&input).unwrap();
            0.5 * (target - o) * (target - o)
        };
        for (i, &a) in analytic.iter().enumerate() {
            let mut p = params.clone();
            p[i] += h;
            net.set_parameters(&p).unwrap();
            let up = loss(&net);
            p[i] -= 2.0 * h;
            net.set_parameters(&p).unwrap();
            let down = loss(&net);
            let numeric = (up - down) / (2.0 * h);
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max(rel);
        }
        net.set_parameters(&params).unwrap();
    }
    let elapsed = start.elapsed();
    check(
        worst < 1e-4 && elapsed < Duration::from_secs(10),
        format!("max relative error {worst:.2e}, {elapsed:.2?}"),
    )
}

fn separable_set(n: usize, seed: u64) -> Vec<Example> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = 2;
    (0..n)
        .map(|_| {
            let mut input: Vec<f64> = (0..k * 20).map(|_| rng.gen_range(0.0..0.2)).collect();
            let label = rng.gen_bool(0.5);
            // capitalized flag of the token right after the candidate
            input[20 + 17] = if label { 1.0 } else { 0.0 };
            Example::new(input, label)
        })
        .collect()
}

fn convergence() -> Outcome {
    let training = separable_set(200, 1);
    let cross = separable_set(100, 2);
    let cfg = TrainConfig {
        eta: 0.5,
        max_epochs: 500,
        patience: 500,
        ..TrainConfig::default()
    };
    let start = Instant::now();
    let run = || {
        let net = Network::new(2, 2, 3, 0.5).unwrap();
        train(net, &training, &cross, &cfg).unwrap()
    };
    let (a, report) = run();
    let (b, _) = run();
    let elapsed = start.elapsed();
    let deterministic = a == b;
    check(
        report.training_error < 0.01 && report.epochs <= 500 && deterministic && elapsed < Duration::from_secs(5),
        format!(
            "training error {:.5} after {} epochs, deterministic {deterministic}, {elapsed:.2?}",
            report.training_error, report.epochs
        ),
    )
}

/// Everything criteria 5 through 10 share.
struct DeskRun {
    params: GeneratorParams,
    corpora: [GeneratedCorpus; 3],
    lexicon: Lexicon,
    mapping: CategoryMapping,
    heuristics: HeuristicParams,
}

struct Trained {
    net: Network,
    scores: Vec<f64>,
    gold: Vec<bool>,
    report: EvalReport,
    cases: [usize; 3],
    elapsed: Duration,
}

impl DeskRun {
    fn new() -> DeskRun {
        let params = GeneratorParams::default();
        let sizes = [375, 188, 1500];
        let seeds = [1, 2, 3];
        let corpora = [0, 1, 2].map(|i| {
            let p = GeneratorParams {
                sentences: sizes[i],
                ..params.clone()
            };
            generate_corpus(&p, seeds[i]).expect("generator parameters are valid")
        });
        let sources = synthetic_lexicon(&params.vocabulary, &params.abbreviations, 1);
        DeskRun {
            lexicon: Lexicon::from_sources(&sources).expect("synthetic lexicon parses"),
            params,
            corpora,
            mapping: CategoryMapping::brown(),
            heuristics: HeuristicParams::default(),
        }
    }

    fn train(&self, texts: [&str; 3], lexicon: &Lexicon) -> satz::Result<Trained> {
        let start = Instant::now();
        let tokenizer = lexicon.tokenizer(SENTINEL);
        let features = Features::new(lexicon, &self.mapping, &self.heuristics);
        let mut sets = Vec::new();
        for text in texts {
            let (cases, _) = extract_cases(text, &tokenizer, &features, CONTEXT)?;
            sets.push(cases);
        }
        let examples = |i: usize| sets[i].iter().map(|c| c.example()).collect::<Vec<_>>();
        let net = Network::new(CONTEXT, HIDDEN, 1, 0.5)?;
        let (net, _) = train(net, &examples(0), &examples(1), &TrainConfig::default())?;
        let elapsed = start.elapsed();
        let scores = sets[2]
            .iter()
            .map(|c| net.forward(&c.input))
            .collect::<satz::Result<Vec<f64>>>()?;
        let gold: Vec<bool> = sets[2].iter().map(|c| c.boundary).collect();
        let decisions: Vec<_> = scores.iter().map(|&s| classify(s, &Thresholds::default())).collect();
        let report = evaluate(&decisions, &gold)?;
        Ok(Trained {
            net,
            scores,
            gold,
            report,
            cases: [sets[0].len(), sets[1].len(), sets[2].len()],
            elapsed,
        })
    }

    fn texts(&self) -> [&str; 3] {
        [0, 1, 2].map(|i| self.corpora[i].text.as_str())
    }
}

fn end_to_end(run: &DeskRun, t: &Trained) -> Outcome {
    let r = &t.report;
    let margin = r.accuracy - r.lower_bound;
    check(
        r.accuracy >= 0.95 && margin >= 0.15 && t.elapsed < Duration::from_secs(60),
        format!(
            "cases {:?}, lower bound {:.4} (expected {:.4}), accuracy {:.4}, margin {:.1} points, {:.2?}",
            t.cases,
            r.lower_bound,
            run.params.expected_lower_bound(),
            r.accuracy,
            100.0 * margin,
            t.elapsed
        ),
    )
}

fn sweep(t: &Trained) -> Outcome {
    let rows = sweep_thresholds(&t.scores, &t.gold, &STANDARD_SWEEP).map_err(|e| e.to_string())?;
    let errors: Vec<usize> = rows.iter().map(|r| r.false_pos + r.false_neg).collect();
    let unlabeled: Vec<usize> = rows.iter().map(|r| r.not_labeled).collect();
    let ok = errors.windows(2).all(|w| w[1] <= w[0])
        && unlabeled.windows(2).all(|w| w[1] >= w[0])
        && rows[0].not_labeled == 0;
    check(ok, format!("FP+FN {errors:?}, not labeled {unlabeled:?}"))
}

fn single_case(run: &DeskRun, mixed: &Trained) -> Outcome {
    let folded = run.texts().map(|t| case_fold_annotated(t, CaseMode::Lower, SENTINEL));
    let lower = run
        .train([&folded[0], &folded[1], &folded[2]], &run.lexicon)
        .map_err(|e| e.to_string())?;
    let drop = mixed.report.accuracy - lower.report.accuracy;
    check(
        drop < 0.05 && lower.report.accuracy > lower.report.lower_bound,
        format!(
            "mixed case {:.4}, lower case {:.4}, drop {:.2} points, baseline {:.4}",
            mixed.report.accuracy,
            lower.report.accuracy,
            100.0 * drop,
            lower.report.lower_bound
        ),
    )
}

fn lexicon_shrink(run: &DeskRun, full: &Trained) -> Outcome {
    let n = run.lexicon.word_count();
    let mut parts = vec![format!("full {:.4} ({n} words)", full.report.accuracy)];
    let mut ok = true;
    for divisor in [6, 10] {
        let small = run.lexicon.truncated(n / divisor);
        let t = run.train(run.texts(), &small).map_err(|e| e.to_string())?;
        let change = (t.report.accuracy - full.report.accuracy).abs();
        ok &= change < 0.02;
        parts.push(format!(
            "1/{divisor} {:.4} ({} words, change {:.2} points)",
            t.report.accuracy,
            small.word_count(),
            100.0 * change
        ));
    }
    check(ok, parts.join(", "))
}

fn baseline_identity(run: &DeskRun) -> Outcome {
    let tokenizer = run.lexicon.tokenizer(SENTINEL);
    let mut corpora: Vec<GeneratedCorpus> = run.corpora.to_vec();
    for (i, sentences) in [7usize, 40, 333].into_iter().enumerate() {
        let p = GeneratorParams {
            sentences,
            title_rate: 0.05 * i as f64,
            ..run.params.clone()
        };
        corpora.push(generate_corpus(&p, 100 + i as u64).map_err(|e| e.to_string())?);
    }
    for corpus in &corpora {
        let doc = satz::segmenter::read_annotation(&tokenizer, &corpus.text);
        let n = doc.gold.len();
        let positives = doc.gold.iter().filter(|&&g| g).count();
        let r = evaluate(&baseline_decisions(n), &doc.gold).map_err(|e| e.to_string())?;
        // a/n == b/n in floating point iff the integer numerators agree
        let exact = r.correct() == positives
            && r.false_pos == n - positives
            && r.false_neg == 0
            && r.not_labeled == 0
            && positives == corpus.boundaries
            && n == corpus.candidates
            && r.accuracy.to_bits() == (positives as f64 / n as f64).to_bits()
            && r.accuracy.to_bits() == r.lower_bound.to_bits();
        if !exact {
            return Err(format!("mismatch on a corpus of {n} candidates: {r:?}"));
        }
    }
    Ok(format!(
        "{} corpora, correct count equals gold boundary count on each",
        corpora.len()
    ))
}

fn persistence(run: &DeskRun, t: &Trained) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("weights.net");
    t.net.save(&path).map_err(|e| e.to_string())?;
    let loaded = Network::load(&path).map_err(|e| e.to_string())?;
    let bits = |n: &Network| n.parameters().iter().map(|w| w.to_bits()).collect::<Vec<u64>>();
    let identical = bits(&loaded) == bits(&t.net) && loaded.to_weights_string() == t.net.to_weights_string();

    let features = Features::new(&run.lexicon, &run.mapping, &run.heuristics);
    let segmenter = Segmenter::new(features, &loaded, SENTINEL)
        .with_thresholds(Thresholds::new(0.3, 0.7).map_err(|e| e.to_string())?);
    let mut round_trips = true;
    let mut labels = 0;
    for corpus in &run.corpora {
        let raw = strip_labels(&corpus.text, &[SENTINEL]);
        let labeled = segmenter.label_text(&raw).map_err(|e| e.to_string())?;
        labels += labeled.decisions.len();
        round_trips &= strip_labels(&labeled.text, &[SENTINEL, DEFAULT_AMBIGUOUS_MARKER]) == raw;
    }
    check(
        identical && round_trips,
        format!("weights bit-identical {identical}, {labels} labeled sites stripped back byte-identical {round_trips}"),
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "descriptor normalization", descriptor_normalization()),
        (2, "golden descriptor", well_golden()),
        (3, "gradient oracle", gradient_oracle()),
        (4, "convergence sanity", convergence()),
    ];

    let run = DeskRun::new();
    match run.train(run.texts(), &run.lexicon) {
        Ok(trained) => {
            results.push((5, "end-to-end accuracy", end_to_end(&run, &trained)));
            results.push((6, "threshold sweep", sweep(&trained)));
            results.push((7, "single-case robustness", single_case(&run, &trained)));
            results.push((8, "lexicon shrink", lexicon_shrink(&run, &trained)));
            results.push((9, "baseline identity", baseline_identity(&run)));
            results.push((10, "persistence", persistence(&run, &trained)));
        }
        Err(e) => {
            for (n, name) in [
                (5, "end-to-end accuracy"),
                (6, "threshold sweep"),
                (7, "single-case robustness"),
                (8, "lexicon shrink"),
                (10, "persistence"),
            ] {
                results.push((n, name, Err(format!("training failed: {e}"))));
            }
            results.push((9, "baseline identity", baseline_identity(&run)));
            results.sort_by_key(|r| r.0);
        }
    }

    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for (n, name, outcome) in &results {
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        writeln!(out, "criterion {n:>2} {status} {name}: {detail}").unwrap();
    }
    writeln!(out, "{} of {} criteria passed", results.len() - failed, results.len()).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
