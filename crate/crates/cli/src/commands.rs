use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use algorec_core::code_model::load_corpus;
use algorec_core::eval::{
    lower_bound_mode, make_split, read_results, reduced_dataset, run_pipeline, sweep_thresholds, write_report, write_results, EvalMode,
    GroundTruth, MethodFilter, MetricsReport, PipelineConfig, PipelineRun, SplitSelection, SplitSpec, SweepOptions, DEFAULT_TEST_RATIO,
};
use algorec_core::keyword::{self, KeywordFamily, KeywordPattern};
use algorec_core::llm::{run_batch, Backend, BatchOptions, ClassifyOptions, HttpBackend, HttpConfig, MockBackend, StyleSpec, VerdictCache};
use algorec_core::obfuscate::{obfuscate as obfuscate_record, ApplyOptions};
use algorec_core::structural::{self, StructuralPattern};
use algorec_core::{shipped, Algorithm, Execution, MethodRecord};
use serde::Serialize;
use serde_json::json;

use crate::config::{parse_value, required, RunConfig};
use crate::error::CliError;
use crate::manifest::{beside, Manifest};
use crate::{
    BackendArgs, ClassifyArgs, EvaluateArgs, ExtractArgs, KeywordArgs, ObfuscateArgs, ReportArgs, SplitArgs, StructuralArgs, SweepArgs,
};

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::data(format!("cannot create {}: {e}", parent.display())))?;
    }
    let f = File::create(path).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn write_jsonl<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let mut w = create(path)?;
    for item in items {
        serde_json::to_writer(&mut w, &item).map_err(CliError::data)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn load_records(path: &Path) -> Result<Vec<MethodRecord>, CliError> {
    let ex = load_corpus(path)?;
    for d in &ex.diagnostics {
        log::warn!("{d}");
    }
    if ex.skipped_regions > 0 {
        log::warn!("{} unbalanced region(s) skipped", ex.skipped_regions);
    }
    Ok(ex.records)
}

fn algorithm_arg(flag: Option<String>, cfg: Option<String>) -> Result<Option<Algorithm>, CliError> {
    flag.or(cfg).map(|a| parse_value(&a, "algorithm")).transpose()
}

pub fn extract(args: ExtractArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let corpus = required(args.corpus, cfg.corpus.clone(), "corpus")?;
    let out = required(args.out, cfg.out.clone(), "out")?;
    let records = load_records(&corpus)?;
    write_jsonl(&out, records.iter().map(MethodRecord::to_line))?;
    let failed = records.iter().filter(|r| r.ast.is_none()).count();
    eprintln!("{} methods extracted, {failed} without an AST", records.len());

    let mut m = Manifest::new("extract", json!({ "corpus": corpus, "out": out }), None);
    m.input(&corpus)?;
    m.output(&out);
    m.write(&beside(&out))
}

#[derive(Serialize)]
struct KeywordLine<'a> {
    method_id: &'a str,
    algorithm: Algorithm,
    family: KeywordFamily,
    passed: bool,
    group_hits: Vec<usize>,
}

pub fn filter_keywords(args: KeywordArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let corpus = required(args.corpus, cfg.corpus.clone(), "corpus")?;
    let out = required(args.out, cfg.out.clone(), "out")?;
    let patterns_file = args.patterns.or_else(|| cfg.patterns.as_ref().and_then(|p| p.first().cloned()));
    let only = algorithm_arg(args.algorithm, cfg.algorithm.clone())?;
    let mut patterns: Vec<KeywordPattern> = match &patterns_file {
        Some(p) => keyword::load_patterns(p)?,
        None => shipped::keyword_patterns(parse_value(&args.family, "keyword family")?),
    };
    patterns.retain(|p| only.is_none_or(|a| p.algorithm == a));
    if patterns.is_empty() {
        return Err(CliError::data("no keyword pattern selected"));
    }
    let records = load_records(&corpus)?;

    let mut lines = Vec::new();
    for p in &patterns {
        let run = keyword::filter_corpus(p, &records, Execution::default());
        eprintln!("{} {}: reduction {:.4}", p.algorithm, p.family, run.partition.reduction);
        for (r, d) in records.iter().zip(run.decisions) {
            lines.push(KeywordLine {
                method_id: &r.method_id,
                algorithm: p.algorithm,
                family: p.family,
                passed: d.passed,
                group_hits: d.group_hits,
            });
        }
    }
    write_jsonl(&out, lines)?;

    let config = json!({ "corpus": corpus, "patterns": patterns_file, "family": args.family, "algorithm": only, "out": out });
    let mut m = Manifest::new("filter keywords", config, None);
    m.input(&corpus)?;
    if let Some(p) = &patterns_file {
        m.input(p)?;
    }
    m.output(&out);
    m.write(&beside(&out))
}

#[derive(Serialize)]
struct StructuralLine<'a> {
    method_id: &'a str,
    algorithm: Algorithm,
    pattern: &'a str,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pass_reason: Option<algorec_core::filter::PassReason>,
}

pub fn filter_structural(args: StructuralArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let corpus = required(args.corpus, cfg.corpus.clone(), "corpus")?;
    let out = required(args.out, cfg.out.clone(), "out")?;
    let pattern_file = args.pattern.or_else(|| cfg.patterns.as_ref().and_then(|p| p.first().cloned()));
    let only = algorithm_arg(args.algorithm, cfg.algorithm.clone())?;
    let patterns: Vec<StructuralPattern> = match &pattern_file {
        Some(p) => vec![structural::load_pattern(p)?],
        None => Algorithm::ALL
            .iter()
            .filter(|a| only.is_none_or(|o| o == **a))
            .map(|a| shipped::structural_pattern(*a))
            .collect(),
    };
    let records = load_records(&corpus)?;

    let mut lines = Vec::new();
    for p in &patterns {
        let run = structural::filter_corpus(p, &records, Execution::default());
        eprintln!("{} ({}): reduction {:.4}", p.algorithm, p.name, run.partition.reduction);
        for (r, d) in records.iter().zip(run.decisions) {
            lines.push(StructuralLine {
                method_id: &r.method_id,
                algorithm: p.algorithm,
                pattern: &p.name,
                passed: d.passed,
                pass_reason: d.pass_reason,
            });
        }
    }
    write_jsonl(&out, lines)?;

    let config = json!({ "corpus": corpus, "pattern": pattern_file, "algorithm": only, "out": out });
    let mut m = Manifest::new("filter structural", config, None);
    m.input(&corpus)?;
    if let Some(p) = &pattern_file {
        m.input(p)?;
    }
    m.output(&out);
    m.write(&beside(&out))
}

struct BackendSetup {
    style: StyleSpec,
    backend: Box<dyn Backend>,
    backend_name: String,
    parallelism: usize,
    cache: Option<VerdictCache>,
    lenient: bool,
}

impl BackendSetup {
    fn from_args(args: BackendArgs, cfg: &RunConfig) -> Result<Self, CliError> {
        let style_text = args.style.or(cfg.style.clone()).unwrap_or_else(|| "score".into());
        let style: StyleSpec = parse_value(&style_text, "style")?;
        let backend_name = args.backend.or(cfg.backend.clone()).unwrap_or_else(|| "mock".into());
        let backend: Box<dyn Backend> = match backend_name.as_str() {
            "mock" => Box::new(MockBackend::new()),
            "openai" | "http" => Box::new(HttpBackend::new(HttpConfig::from_env()?)),
            other => return Err(CliError::usage(format!("unknown backend `{other}` (expected mock or openai)"))),
        };
        let parallelism = args.parallelism.or(cfg.parallelism).unwrap_or(4).max(1);
        let cache = match args.cache_dir.or(cfg.cache_dir.clone()) {
            Some(dir) => Some(VerdictCache::new(&dir).map_err(|e| CliError::data(format!("cache dir {}: {e}", dir.display())))?),
            None => None,
        };
        Ok(BackendSetup {
            style,
            backend,
            backend_name,
            parallelism,
            cache,
            lenient: args.lenient || cfg.lenient.unwrap_or(false),
        })
    }

    fn batch(&self) -> BatchOptions<'_> {
        BatchOptions {
            parallelism: self.parallelism,
            cache: self.cache.as_ref(),
            classify: ClassifyOptions {
                lenient: self.lenient,
                ..ClassifyOptions::default()
            },
        }
    }

    fn config(&self) -> serde_json::Value {
        json!({
            "style": self.style.label(),
            "backend": self.backend_name,
            "backend_id": self.backend.id(),
            "parallelism": self.parallelism,
            "cache_dir": self.cache.as_ref().map(|c| c.dir().to_path_buf()),
            "lenient": self.lenient,
        })
    }
}

fn merge(mut a: serde_json::Value, b: serde_json::Value) -> serde_json::Value {
    if let (Some(a), serde_json::Value::Object(b)) = (a.as_object_mut(), b) {
        a.extend(b);
    }
    a
}

pub fn classify(args: ClassifyArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let corpus = required(args.corpus, cfg.corpus.clone(), "corpus")?;
    let out = required(args.out, cfg.out.clone(), "out")?;
    let algorithm =
        algorithm_arg(args.algorithm, cfg.algorithm.clone())?.ok_or_else(|| CliError::usage("missing required option --algorithm"))?;
    let setup = BackendSetup::from_args(args.backend, cfg)?;
    let records = load_records(&corpus)?;
    let style = setup.style.resolve(algorithm, &shipped::example_library())?;
    let outcome = run_batch(&style, algorithm, &records, setup.backend.as_ref(), &setup.batch());

    let lines = outcome.results.iter().map(|r| match r {
        Ok(v) => serde_json::to_value(v).expect("verdicts serialise"),
        Err(e) => json!({ "method_id": e.method_id, "algorithm": algorithm, "error": e.kind, "message": e.message }),
    });
    write_jsonl(&out, lines)?;
    let s = outcome.summary;
    eprintln!("{} verdicts, {} errors, {} cache hits", s.verdicts, s.errors, s.cache_hits);

    let config = merge(json!({ "corpus": corpus, "algorithm": algorithm, "out": out }), setup.config());
    let mut m = Manifest::new("classify", config, None);
    m.input(&corpus)?;
    m.output(&out);
    m.write(&beside(&out))?;
    backend_status(s.backend_errors)
}

fn backend_status(backend_errors: usize) -> Result<(), CliError> {
    if backend_errors > 0 {
        Err(CliError::Backend(format!(
            "{backend_errors} record(s) failed at the backend; outputs were written with error rows"
        )))
    } else {
        Ok(())
    }
}

pub fn obfuscate(args: ObfuscateArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let corpus = required(args.corpus, cfg.corpus.clone(), "corpus")?;
    let out = required(args.out, cfg.out.clone(), "out")?;
    let seed = required(args.seed, cfg.seed, "seed")?;
    let opts = ApplyOptions {
        strip_comments: args.strip_comments || cfg.strip_comments.unwrap_or(false),
    };
    let records = load_records(&corpus)?;
    let renamed = Execution::default().map(&records, |r| obfuscate_record(r, seed, opts));
    write_jsonl(&out, renamed.iter().map(MethodRecord::to_line))?;

    let config = json!({ "corpus": corpus, "seed": seed, "strip_comments": opts.strip_comments, "out": out });
    let mut m = Manifest::new("obfuscate", config, Some(seed));
    m.input(&corpus)?;
    m.output(&out);
    m.write(&beside(&out))
}

pub fn split(args: SplitArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let corpus_path = required(args.corpus, cfg.corpus.clone(), "corpus")?;
    let truth_path = required(args.truth, cfg.truth.clone(), "truth")?;
    let out = required(args.out, cfg.out.clone(), "out")?;
    let ratio = args.ratio.or(cfg.ratio).unwrap_or(DEFAULT_TEST_RATIO);
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let thin: Vec<Algorithm> = args.thin.iter().map(|a| parse_value(a, "algorithm")).collect::<Result<_, _>>()?;

    let corpus = load_records(&corpus_path)?;
    let truth = GroundTruth::load(&truth_path)?;
    truth.validate(corpus.iter().map(|r| r.method_id.as_str()))?;
    let spec = make_split(&corpus, &truth, ratio, seed).map_err(|e| match e {
        algorec_core::eval::SplitError::InvalidRatio(_) => CliError::usage(e),
        other => CliError::data(other),
    })?;
    fs::write(&out, spec.to_json() + "\n").map_err(|e| CliError::data(format!("cannot write {}: {e}", out.display())))?;
    eprintln!("KS D = {:.4}, p = {:.4}", spec.ks.statistic, spec.ks.p_value);

    let mut m = Manifest::new(
        "split",
        json!({ "corpus": corpus_path, "truth": truth_path, "ratio": ratio, "seed": seed, "out": out,
                "reduced_dir": args.reduced_dir, "keep_fraction": args.keep_fraction, "thin": thin }),
        Some(seed),
    );
    m.input(&corpus_path)?;
    m.input(&truth_path)?;
    m.output(&out);

    if let Some(dir) = &args.reduced_dir {
        let reduced = reduced_dataset(&corpus, &truth, Some(&spec), args.keep_fraction, &thin, seed);
        let corpus_out = dir.join("corpus.jsonl");
        let truth_out = dir.join("truth.jsonl");
        write_jsonl(&corpus_out, reduced.corpus.iter().map(MethodRecord::to_line))?;
        fs::write(&truth_out, reduced.truth.to_jsonl())?;
        if let Some(ks) = reduced.ks {
            eprintln!(
                "reduced: {} methods, KS D = {:.4}, p = {:.4}",
                reduced.corpus.len(),
                ks.statistic,
                ks.p_value
            );
        }
        m.output(&corpus_out);
        m.output(&truth_out);
    }
    m.write(&beside(&out))
}

fn pattern_files(paths: &[PathBuf]) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = walkdir::WalkDir::new(p)
                .into_iter()
                .filter_map(Result::ok)
                .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "pat"))
                .map(walkdir::DirEntry::into_path)
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    out
}

fn build_filter(spec: &str, patterns: &[PathBuf]) -> Result<MethodFilter, CliError> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    match (kind, patterns.is_empty()) {
        ("none", _) => Ok(MethodFilter::None),
        ("keyword", true) => {
            let family: KeywordFamily = parse_value(arg.unwrap_or("rf"), "keyword family")?;
            Ok(MethodFilter::shipped_keyword(family))
        }
        ("keyword", false) => {
            let mut all = Vec::new();
            for p in patterns {
                all.extend(keyword::load_patterns(p)?);
            }
            Ok(MethodFilter::keyword(spec, all)?)
        }
        ("structural", true) => Ok(MethodFilter::shipped_structural()),
        ("structural", false) => {
            let loaded = pattern_files(patterns)
                .iter()
                .map(|p| structural::load_pattern(p))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(MethodFilter::structural(spec, loaded)?)
        }
        _ => Err(CliError::usage(format!(
            "unknown filter `{spec}` (expected none, keyword:<family> or structural)"
        ))),
    }
}

pub fn evaluate(args: EvaluateArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let corpus_path = required(args.corpus, cfg.corpus.clone(), "corpus")?;
    let truth_path = required(args.truth, cfg.truth.clone(), "truth")?;
    let out_dir = required(args.out_dir, cfg.out_dir.clone(), "out-dir")?;
    let filter_spec = args.filter.or(cfg.filter.clone()).unwrap_or_else(|| "none".into());
    let patterns = args.patterns.or(cfg.patterns.clone()).unwrap_or_default();
    let mode: EvalMode = parse_value(&args.mode.or(cfg.mode.clone()).unwrap_or_else(|| "standard".into()), "mode")?;
    let selection: SplitSelection = parse_value(&args.split.or(cfg.split.clone()).unwrap_or_else(|| "all".into()), "split")?;
    let split_file = args.split_file.or(cfg.split_file.clone());
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let per_algorithm = args.per_algorithm || cfg.per_algorithm.unwrap_or(false);
    let filter = build_filter(&filter_spec, &patterns)?;
    let setup = BackendSetup::from_args(args.backend, cfg)?;

    let corpus = load_records(&corpus_path)?;
    let truth = GroundTruth::load(&truth_path)?;
    fs::create_dir_all(&out_dir).map_err(|e| CliError::data(format!("cannot create {}: {e}", out_dir.display())))?;

    let mut outputs = Vec::new();
    let split = match (&split_file, selection) {
        (Some(p), _) => Some(SplitSpec::load(p)?),
        (None, SplitSelection::All) => None,
        (None, _) => {
            truth.validate(corpus.iter().map(|r| r.method_id.as_str()))?;
            let s = make_split(&corpus, &truth, DEFAULT_TEST_RATIO, seed)?;
            let path = out_dir.join("split.json");
            fs::write(&path, s.to_json() + "\n")?;
            outputs.push(path);
            Some(s)
        }
    };

    let library = shipped::example_library();
    let pipeline = PipelineConfig {
        filter: &filter,
        style: &setup.style,
        library: &library,
        backend: setup.backend.as_ref(),
        batch: setup.batch(),
        mode,
        split: split.as_ref(),
        selection,
        exec: Execution::default(),
    };
    let output = run_pipeline(&corpus, &truth, &pipeline)?;

    let results_path = out_dir.join("results.jsonl");
    write_results(std::slice::from_ref(&output.run), create(&results_path)?)?;
    outputs.push(results_path);
    let report = sweep_thresholds(&output.run, SweepOptions { per_algorithm });
    let (csv, json_path) = write_report(std::slice::from_ref(&report), &out_dir, "report")?;
    outputs.extend([csv, json_path]);

    let best = report.best();
    eprintln!(
        "{} / {} / {}: best ST {} macro-F1 {:.4}, reduction micro {:.4} macro {:.4}, {} errors",
        report.meta.filter,
        report.meta.style,
        report.meta.backend,
        best.threshold,
        best.macro_f1,
        report.reduction_micro,
        report.reduction_macro,
        report.errors
    );

    let config = merge(
        json!({
            "corpus": corpus_path,
            "truth": truth_path,
            "filter": filter_spec,
            "patterns": patterns,
            "mode": mode,
            "split": selection,
            "split_file": split_file,
            "seed": seed,
            "per_algorithm": per_algorithm,
            "out_dir": out_dir,
        }),
        setup.config(),
    );
    let mut m = Manifest::new("evaluate", config, Some(seed));
    m.input(&corpus_path)?;
    m.input(&truth_path)?;
    for p in split_file.iter().chain(&pattern_files(&patterns)) {
        m.input(p)?;
    }
    for o in &outputs {
        m.output(o);
    }
    m.write(&out_dir.join("manifest.json"))?;
    backend_status(output.summary.backend_errors)
}

fn load_runs(paths: &[PathBuf]) -> Result<Vec<PipelineRun>, CliError> {
    let mut runs = Vec::new();
    for p in paths {
        let f = File::open(p).map_err(|e| CliError::data(format!("cannot read {}: {e}", p.display())))?;
        let r: Box<dyn BufRead> = Box::new(BufReader::new(f));
        runs.extend(read_results(r).map_err(|e| CliError::data(format!("{}: {e}", p.display())))?);
    }
    if runs.is_empty() {
        return Err(CliError::data("results files hold no rows"));
    }
    Ok(runs)
}

fn score_runs(runs: &[PipelineRun], lower_bound: bool, per_algorithm: bool) -> Vec<MetricsReport> {
    let opts = SweepOptions { per_algorithm };
    runs.iter()
        .map(|r| {
            if lower_bound {
                lower_bound_mode(r, opts)
            } else {
                sweep_thresholds(r, opts)
            }
        })
        .collect()
}

pub fn report(args: ReportArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let out_dir = required(args.out_dir, cfg.out_dir.clone(), "out-dir")?;
    let per_algorithm = args.per_algorithm || cfg.per_algorithm.unwrap_or(false);
    let reports = score_runs(&load_runs(&args.results)?, args.lower_bound, per_algorithm);
    let (csv, json_path) = write_report(&reports, &out_dir, "report")?;

    let config = json!({ "results": args.results, "lower_bound": args.lower_bound, "per_algorithm": per_algorithm, "out_dir": out_dir });
    let mut m = Manifest::new("report", config, None);
    for p in &args.results {
        m.input(p)?;
    }
    m.output(&csv);
    m.output(&json_path);
    m.write(&out_dir.join("manifest.json"))
}

#[derive(Serialize)]
struct SweepLine {
    #[serde(flatten)]
    meta: algorec_core::eval::RunMeta,
    macro_f1: Vec<(u8, f64)>,
    best_threshold: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_algorithm_best: Option<std::collections::BTreeMap<Algorithm, u8>>,
}

pub fn sweep(args: SweepArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let per_algorithm = args.per_algorithm || cfg.per_algorithm.unwrap_or(false);
    let reports = score_runs(&load_runs(&args.results)?, false, per_algorithm);
    let lines: Vec<SweepLine> = reports
        .into_iter()
        .map(|r| SweepLine {
            macro_f1: r.thresholds.iter().map(|t| (t.threshold, t.macro_f1)).collect(),
            best_threshold: r.best_threshold,
            per_algorithm_best: r.per_algorithm_best,
            meta: r.meta,
        })
        .collect();

    match args.out.or(cfg.out.clone()) {
        Some(out) => {
            let mut text = serde_json::to_string_pretty(&lines).map_err(CliError::data)?;
            text.push('\n');
            fs::write(&out, text).map_err(|e| CliError::data(format!("cannot write {}: {e}", out.display())))?;
            let mut m = Manifest::new(
                "sweep",
                json!({ "results": args.results, "per_algorithm": per_algorithm, "out": out }),
                None,
            );
            for p in &args.results {
                m.input(p)?;
            }
            m.output(&out);
            m.write(&beside(&out))
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            for l in &lines {
                writeln!(
                    w,
                    "{} / {} / {} / {} / {}",
                    l.meta.filter, l.meta.style, l.meta.backend, l.meta.mode, l.meta.split
                )?;
                for (t, f) in &l.macro_f1 {
                    let mark = if *t == l.best_threshold { "  <- best" } else { "" };
                    writeln!(w, "  ST {t}: macro-F1 {f:.4}{mark}")?;
                }
                if let Some(per) = &l.per_algorithm_best {
                    for (a, t) in per {
                        writeln!(w, "  {a}: best ST {t}")?;
                    }
                }
            }
            Ok(())
        }
    }
}
