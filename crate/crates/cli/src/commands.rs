use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::ArgMatches;

use satz::evaluation::{
    baseline_decisions, corpus_stats, error_breakdown, evaluate, generate_corpus, sweep_thresholds, synthetic_lexicon,
    EvalReport, GeneratorParams, SweepRow, STANDARD_SWEEP,
};
use satz::lexicon::TagSource;
use satz::network::train as train_network;
use satz::segmenter::{classify, extract_cases, read_annotation, strip_labels, Annotated};
use satz::{
    CategoryMapping, Decision, Features, HeuristicParams, Label, Lexicon, Network, Segmenter, Thresholds, Tokenizer,
    TrainConfig,
};

use crate::config::{ConfigFile, Settings};
use crate::{
    CliError, CommonArgs, EvalArgs, FlagArg, GenArgs, InspectArgs, LabelArgs, LexiconArgs, ModelArgs, ReportFormat,
    StatsArgs, SweepArgs, ThresholdArgs, TrainArgs,
};

type CliResult<T> = Result<T, CliError>;

fn settings<'a>(common: &CommonArgs, matches: &'a ArgMatches) -> CliResult<Settings<'a>> {
    let file = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    Ok(Settings::new(matches, file))
}

fn require_file(path: &Path) -> CliResult<()> {
    if path == Path::new("-") || path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("no such file: {}", path.display())))
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    let bytes = if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|source| satz::Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
        buf
    } else {
        fs::read(path).map_err(|source| satz::Error::Io {
            path: path.to_path_buf(),
            source,
        })?
    };
    String::from_utf8(bytes).map_err(|e| {
        CliError::Core(satz::Error::Decode {
            offset: e.utf8_error().valid_up_to(),
        })
    })
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

fn guard_inputs(target: &Path, inputs: &[&Path]) -> CliResult<()> {
    match inputs.iter().find(|i| same_file(target, i)) {
        Some(i) => Err(CliError::Usage(format!("refusing to overwrite input {}", i.display()))),
        None => Ok(()),
    }
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    fs::write(path, content).map_err(|source| {
        CliError::Core(satz::Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

/// Writes to `out`, or standard output when unset.
fn emit(out: Option<&Path>, content: &str, inputs: &[&Path]) -> CliResult<()> {
    match out {
        Some(path) => {
            guard_inputs(path, inputs)?;
            write_file(path, content)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| {
                    CliError::Core(satz::Error::Io {
                        path: PathBuf::from("<stdout>"),
                        source,
                    })
                })
        }
    }
}

/// The lexicon, mapping and heuristics a feature extractor borrows.
struct Model {
    lexicon: Lexicon,
    mapping: CategoryMapping,
    params: HeuristicParams,
    flag_mode: FlagArg,
    sentinel: String,
}

impl Model {
    fn load(args: &LexiconArgs, s: &Settings<'_>, sentinel: String) -> CliResult<Model> {
        let dir: PathBuf = s
            .optional("lexicon_dir", args.lexicon_dir.clone())?
            .ok_or_else(|| CliError::Usage("--lexicon-dir is required (flag or config)".into()))?;
        if !dir.is_dir() {
            return Err(CliError::Usage(format!("no such directory: {}", dir.display())));
        }
        let mapping = match s.optional::<PathBuf>("mapping", args.mapping.clone())? {
            Some(p) => {
                require_file(&p)?;
                CategoryMapping::load(&p)?
            }
            None => CategoryMapping::brown(),
        };
        let params = HeuristicParams {
            proper_noun_unknown_freq_fraction: s.value("np_share_unknown", args.np_share_unknown)?,
            proper_noun_known_freq_fraction: s.value("np_share_known", args.np_share_known)?,
            ..HeuristicParams::default()
        };
        params.validate()?;
        Ok(Model {
            lexicon: Lexicon::load_dir(&dir)?,
            mapping,
            params,
            flag_mode: s.value("flag_mode", args.flag_mode)?,
            sentinel,
        })
    }

    fn features(&self) -> Features<'_> {
        Features {
            flag_mode: self.flag_mode.mode(),
            ..Features::new(&self.lexicon, &self.mapping, &self.params)
        }
    }

    fn tokenizer(&self) -> Tokenizer {
        self.lexicon.tokenizer(&self.sentinel)
    }
}

fn sentinel(common: &CommonArgs, s: &Settings<'_>) -> CliResult<String> {
    let sentinel: String = s.value("sentinel", common.sentinel.clone())?;
    if sentinel.trim().is_empty() || sentinel.chars().any(char::is_whitespace) {
        return Err(CliError::Usage(
            "sentinel must be non-empty and contain no whitespace".into(),
        ));
    }
    Ok(sentinel)
}

fn context(model: &ModelArgs, s: &Settings<'_>) -> CliResult<usize> {
    let k: usize = s.value("context", model.context)?;
    if k == 0 || !k.is_multiple_of(2) {
        return Err(CliError::Usage(format!(
            "context must be a positive even number, got {k}"
        )));
    }
    Ok(k)
}

fn thresholds(t: &ThresholdArgs, s: &Settings<'_>) -> CliResult<Thresholds> {
    Ok(Thresholds::new(s.value("t0", t.t0)?, s.value("t1", t.t1)?)?)
}

/// Loads the weights and checks them against the configured context.
fn load_network(model: &ModelArgs, s: &Settings<'_>) -> CliResult<Network> {
    let k = context(model, s)?;
    let path: PathBuf = s.value("weights", model.weights.clone())?;
    require_file(&path)?;
    let net = Network::load(&path)?;
    if net.context() != k {
        return Err(CliError::Core(satz::Error::Format(format!(
            "{} was trained with k={}, configuration asks for k={k}",
            path.display(),
            net.context()
        ))));
    }
    Ok(net)
}

fn warn_all(file: &Path, warnings: &[String]) {
    for w in warnings {
        log::warn!("{}: {w}", file.display());
    }
}

pub fn train(a: &TrainArgs, m: &ArgMatches) -> CliResult<()> {
    let s = settings(&a.common, m)?;
    require_file(&a.training)?;
    require_file(&a.cross)?;
    let k = context(&a.model, &s)?;
    let weights: PathBuf = s.value("weights", a.model.weights.clone())?;
    guard_inputs(&weights, &[&a.training, &a.cross])?;
    let cfg = TrainConfig {
        eta: s.value("eta", a.eta)?,
        max_epochs: s.value("max_epochs", a.max_epochs)?,
        patience: s.value("patience", a.patience)?,
        min_epochs: s.value("min_epochs", a.min_epochs)?,
        seed: s.value("seed", a.seed)?,
        init_range: s.value("init_range", a.init_range)?,
        shuffle: s.switch("shuffle", a.shuffle)?,
    };
    let hidden: usize = s.value("hidden", a.hidden)?;
    let model = Model::load(&a.lexicon, &s, sentinel(&a.common, &s)?)?;

    let start = Instant::now();
    let tokenizer = model.tokenizer();
    let features = model.features();
    let mut sets = Vec::new();
    for path in [&a.training, &a.cross] {
        let text = read_text(path)?;
        let (cases, warnings) = extract_cases(&text, &tokenizer, &features, k)?;
        warn_all(path, &warnings);
        log::info!("{}: {} cases", path.display(), cases.len());
        sets.push(cases.iter().map(|c| c.example()).collect::<Vec<_>>());
    }
    let net = Network::new(k, hidden, cfg.seed, cfg.init_range)?;
    let (net, report) = train_network(net, &sets[0], &sets[1], &cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    net.save(&weights)?;

    println!(
        "{:>7} {:>6} {:>7} {:>10} {:>7} {:>14} {:>14} {:>8}",
        "context", "hidden", "epochs", "best_epoch", "cases", "training_error", "cross_error", "seconds"
    );
    println!(
        "{:>7} {:>6} {:>7} {:>10} {:>7} {:>14.6} {:>14.6} {:>8.2}",
        k,
        hidden,
        report.epochs,
        report.best_epoch,
        sets[0].len(),
        report.training_error,
        report.cross_error,
        seconds
    );
    log::info!("weights written to {}", weights.display());
    Ok(())
}

pub fn label(a: &LabelArgs, m: &ArgMatches) -> CliResult<()> {
    let s = settings(&a.common, m)?;
    for input in &a.inputs {
        require_file(input)?;
    }
    let net = load_network(&a.model, &s)?;
    let model = Model::load(&a.lexicon, &s, sentinel(&a.common, &s)?)?;
    let marker: String = s.value("marker", a.marker.clone())?;
    let segmenter = Segmenter::new(model.features(), &net, &model.sentinel)
        .with_thresholds(thresholds(&a.thresholds, &s)?)
        .with_ambiguous_marker(marker);

    let inputs: Vec<&Path> = a.inputs.iter().map(PathBuf::as_path).collect();
    let targets: Vec<Option<PathBuf>> = match &a.out {
        None => vec![None; inputs.len()],
        Some(out) if inputs.len() == 1 => vec![Some(out.clone())],
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| satz::Error::Io {
                path: dir.clone(),
                source,
            })?;
            let mut names = std::collections::BTreeSet::new();
            inputs
                .iter()
                .map(|i| {
                    let name = i
                        .file_name()
                        .ok_or_else(|| CliError::Usage(format!("{} has no file name", i.display())))?;
                    if !names.insert(name.to_owned()) {
                        return Err(CliError::Usage(format!("two inputs named {}", name.to_string_lossy())));
                    }
                    Ok(Some(dir.join(name)))
                })
                .collect::<CliResult<_>>()?
        }
    };
    for t in targets.iter().flatten() {
        guard_inputs(t, &inputs)?;
    }

    let texts = inputs.iter().map(|i| read_text(i)).collect::<CliResult<Vec<_>>>()?;
    let labeled: Vec<satz::Result<String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = texts
            .iter()
            .map(|text| scope.spawn(|| segmenter.label_text(text).map(|l| l.text)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(satz::Error::Internal("labeling thread panicked".into())))
            })
            .collect()
    });
    for (out, result) in targets.iter().zip(labeled) {
        emit(out.as_deref(), &result?, &inputs)?;
    }
    Ok(())
}

/// Decisions read back from a labeled file, aligned with the gold sites.
fn labeled_decisions(
    gold: &Annotated,
    labeled: &str,
    sentinel: &str,
    marker: &str,
    abbreviations: &[String],
) -> CliResult<Vec<Decision>> {
    let boundaries = read_annotation(
        &Tokenizer::new(sentinel).with_abbreviations(abbreviations),
        &strip_labels(labeled, &[marker]),
    );
    let ambiguous = read_annotation(
        &Tokenizer::new(marker).with_abbreviations(abbreviations),
        &strip_labels(labeled, &[sentinel]),
    );
    let system = &boundaries;
    let n = gold.sites.len().min(system.sites.len());
    for i in 0..n {
        let g = &gold.tokens[gold.sites[i].index];
        let t = &system.tokens[system.sites[i].index];
        if g.text != t.text {
            return Err(CliError::Core(satz::Error::Alignment(format!(
                "candidate {i} differs: gold {:?} at byte {}, labeled {:?} at byte {}",
                g.text, g.byte_offset, t.text, t.byte_offset
            ))));
        }
    }
    if gold.sites.len() != system.sites.len() {
        return Err(CliError::Core(satz::Error::Alignment(format!(
            "gold has {} candidates, labeled text has {}",
            gold.sites.len(),
            system.sites.len()
        ))));
    }
    Ok(boundaries
        .gold
        .iter()
        .zip(&ambiguous.gold)
        .map(|(&b, &amb)| match (b, amb) {
            (true, _) => Decision {
                label: Label::Boundary,
                score: 1.0,
            },
            (false, true) => Decision {
                label: Label::Ambiguous,
                score: 0.5,
            },
            (false, false) => Decision {
                label: Label::NotBoundary,
                score: 0.0,
            },
        })
        .collect())
}

fn report_text(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => report.to_string(),
        ReportFormat::Kv => report.to_key_values(),
    }
}

/// Network scores for every gold candidate.
fn network_scores(
    lexicon: &LexiconArgs,
    model_args: &ModelArgs,
    s: &Settings<'_>,
    sentinel: String,
    gold_text: &str,
) -> CliResult<(Annotated, Vec<f64>)> {
    let net = load_network(model_args, s)?;
    let model = Model::load(lexicon, s, sentinel)?;
    let doc = read_annotation(&model.tokenizer(), gold_text);
    let scored = Segmenter::new(model.features(), &net, &model.sentinel).score_tokens(doc.tokens.clone())?;
    if scored.sites != doc.sites {
        return Err(CliError::Core(satz::Error::Internal(
            "candidate sets diverged after rescoring".into(),
        )));
    }
    Ok((doc, scored.scores))
}

pub fn eval(a: &EvalArgs, m: &ArgMatches) -> CliResult<()> {
    let s = settings(&a.common, m)?;
    require_file(&a.gold)?;
    let sentinel = sentinel(&a.common, &s)?;
    let gold_text = read_text(&a.gold)?;

    let (doc, decisions) = if a.baseline || a.labeled.is_some() {
        // the network is not needed; the lexicon only contributes abbreviations
        let abbreviations: Vec<String> = match s.optional::<PathBuf>("lexicon_dir", a.lexicon.lexicon_dir.clone())? {
            Some(dir) => Lexicon::load_dir(&dir)?.abbreviations().map(str::to_string).collect(),
            None => Vec::new(),
        };
        let doc = read_annotation(
            &Tokenizer::new(&sentinel).with_abbreviations(&abbreviations),
            &gold_text,
        );
        let decisions = match &a.labeled {
            Some(path) => {
                require_file(path)?;
                let marker: String = s.value("marker", a.marker.clone())?;
                labeled_decisions(&doc, &read_text(path)?, &sentinel, &marker, &abbreviations)?
            }
            None => baseline_decisions(doc.sites.len()),
        };
        (doc, decisions)
    } else {
        let th = thresholds(&a.thresholds, &s)?;
        let (doc, scores) = network_scores(&a.lexicon, &a.model, &s, sentinel, &gold_text)?;
        let decisions = scores.iter().map(|&x| classify(x, &th)).collect();
        (doc, decisions)
    };
    warn_all(&a.gold, &doc.warnings);

    let report = evaluate(&decisions, &doc.gold)?;
    let mut out = report_text(&report, a.format);
    if a.errors {
        out.push_str("\nerror breakdown (approximate)\n");
        let _ = writeln!(out, "{:<14} {:>8} {:>8}", "class", "false_pos", "false_neg");
        for (class, fp, fneg) in error_breakdown(&doc.tokens, &doc.sites, &decisions, &doc.gold) {
            let _ = writeln!(out, "{:<14} {fp:>8} {fneg:>8}", format!("{class:?}").to_lowercase());
        }
    }
    emit(a.out.as_deref(), &out, &[&a.gold])
}

fn parse_pair(raw: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Usage(format!("threshold pair must look like 0.4,0.6, got {raw:?}"));
    let (t0, t1) = raw.split_once(',').ok_or_else(bad)?;
    Ok((
        t0.trim().parse().map_err(|_| bad())?,
        t1.trim().parse().map_err(|_| bad())?,
    ))
}

pub fn sweep(a: &SweepArgs, m: &ArgMatches) -> CliResult<()> {
    let s = settings(&a.common, m)?;
    require_file(&a.gold)?;
    let pairs: Vec<(f64, f64)> = if a.pairs.is_empty() {
        STANDARD_SWEEP.to_vec()
    } else {
        a.pairs.iter().map(|p| parse_pair(p)).collect::<CliResult<_>>()?
    };
    let gold_text = read_text(&a.gold)?;
    let (doc, scores) = network_scores(&a.lexicon, &a.model, &s, sentinel(&a.common, &s)?, &gold_text)?;
    warn_all(&a.gold, &doc.warnings);
    let rows = sweep_thresholds(&scores, &doc.gold, &pairs)?;
    let mut out = format!("{}\n", SweepRow::HEADER);
    for row in rows {
        out.push_str(&row.to_row());
        out.push('\n');
    }
    emit(a.out.as_deref(), &out, &[&a.gold])
}

pub fn stats(a: &StatsArgs, m: &ArgMatches) -> CliResult<()> {
    let s = settings(&a.common, m)?;
    for input in &a.inputs {
        require_file(input)?;
    }
    let sentinel = sentinel(&a.common, &s)?;
    let tokenizer = match s.optional::<PathBuf>("lexicon_dir", a.lexicon_dir.clone())? {
        Some(dir) => Lexicon::load_dir(&dir)?.tokenizer(&sentinel),
        None => Tokenizer::new(&sentinel),
    };
    println!("file\tcandidates\tboundaries\tlower_bound");
    let (mut candidates, mut boundaries) = (0, 0);
    for input in &a.inputs {
        let st = corpus_stats(&read_text(input)?, &tokenizer);
        println!(
            "{}\t{}\t{}\t{:.4}",
            input.display(),
            st.candidates,
            st.boundaries,
            st.lower_bound
        );
        candidates += st.candidates;
        boundaries += st.boundaries;
    }
    if a.inputs.len() > 1 {
        let lb = if candidates == 0 {
            0.0
        } else {
            boundaries as f64 / candidates as f64
        };
        println!("total\t{candidates}\t{boundaries}\t{lb:.4}");
    }
    Ok(())
}

pub fn inspect(a: &InspectArgs, m: &ArgMatches) -> CliResult<()> {
    let s = settings(&a.common, m)?;
    require_file(&a.input)?;
    let model = Model::load(&a.lexicon, &s, sentinel(&a.common, &s)?)?;
    let text = read_text(&a.input)?;
    let tokens = read_annotation(&model.tokenizer(), &text).tokens;
    let descriptors = model.features().descriptors(&tokens)?;
    let mut out = String::new();
    for (token, d) in tokens.iter().zip(&descriptors) {
        let tags = model.lexicon.lookup(token, &model.params);
        let source = match tags.source() {
            TagSource::Lexicon => "lexicon",
            TagSource::Heuristic => "heuristic",
            TagSource::Mixed => "mixed",
        };
        let values: Vec<String> = d.values().iter().map(|v| format!("{v:.4}")).collect();
        let _ = writeln!(out, "{}\t{source}\t{tags}\t{}", token.text, values.join(" "));
    }
    emit(a.out.as_deref(), &out, &[&a.input])
}

pub fn gen(a: &GenArgs, m: &ArgMatches) -> CliResult<()> {
    let s = settings(&a.common, m)?;
    let params = GeneratorParams {
        sentences: a.sentences,
        sentinel: sentinel(&a.common, &s)?,
        abbreviation_eos_rate: a.abbreviation_eos_rate,
        decimal_rate: a.decimal_rate,
        title_rate: a.title_rate,
        ..GeneratorParams::default()
    };
    let seed: u64 = s.value("seed", a.seed)?;
    let corpus = generate_corpus(&params, seed)?;
    if let Some(dir) = &a.lexicon_out {
        synthetic_lexicon(&params.vocabulary, &params.abbreviations, seed).write_dir(dir)?;
    }
    emit(a.out.as_deref(), &corpus.text, &[])?;
    eprintln!(
        "sentences {} candidates {} boundaries {} lower_bound {:.4}",
        corpus.sentences,
        corpus.candidates,
        corpus.boundaries,
        corpus.lower_bound()
    );
    Ok(())
}
