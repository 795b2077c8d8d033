mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{usage, Config, UsageError};
use polsent::classifiers::{Algorithm, Hyperparameters};
use polsent::corpus::{filter_neutral, split_train_test, Corpus};
use polsent::evaluation::{
    cross_validate, evaluate_model, metrics_report, ConfusionMatrix, MetricsReport,
};
use polsent::ingest::{
    fetch, plan_fetch, read_corpus, write_corpus, FetchOptions, MockSource, RateLimitPolicy,
    SourceManifest,
};
use polsent::lexicon::{lexicon_stats, load_lexicon, unsorted_entries, SentimentLexicon};
use polsent::model::{encode_training, fit, TrainConfig, TrainedModel};
use polsent::normalize::{EmoticonTable, Normalizer};
use polsent::report::{
    histogram_blocks, summary_table, write_histogram_csv, write_histogram_svg, write_summary_csv,
};
use polsent::scoring::score_corpus;

#[derive(Parser)]
#[command(
    name = "polsent",
    version,
    about = "Sentiment scoring and classification of Polish tweets"
)]
struct Cli {
    /// Settings file with `key = value` lines (keys are long flag names)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Collect texts per profile through a document source, with caching
    Fetch(FetchArgs),
    /// Score a corpus against the opinion lexicon
    Score(ScoreArgs),
    /// Per-candidate score statistics of a scored corpus
    Summarize(SummarizeArgs),
    /// Random train/test split
    Split(SplitArgs),
    /// Train a classifier and save it
    Train(TrainArgs),
    /// Evaluate a saved model on a scored corpus
    Evaluate(EvaluateArgs),
    /// k-fold cross-validation of a classifier
    Crossval(CrossvalArgs),
    /// Histogram and summary tables (plus optional SVG) of a scored corpus
    Report(ReportArgs),
    /// Check opinion lexicon files
    Lexicon(LexiconArgs),
}

#[derive(Args)]
struct FetchArgs {
    /// JSON manifest listing the profiles to collect
    #[arg(long, value_name = "PATH")]
    manifest: Option<PathBuf>,
    /// Cache directory (overrides the manifest's cache_dir)
    #[arg(long, value_name = "DIR")]
    cache: Option<PathBuf>,
    /// Texts requested per page [default: 100]
    #[arg(long, value_name = "N")]
    page_size: Option<usize>,
    /// Requests allowed per 15-minute window [default: 180]
    #[arg(long, value_parser = ["15", "30", "180"])]
    budget: Option<String>,
    /// Only plan the requests; nothing is fetched
    #[arg(long)]
    dry_run: bool,
    /// Write the request plan as JSON
    #[arg(long, value_name = "PATH")]
    plan_out: Option<PathBuf>,
    /// Directory of `<profile>.txt` files served as the document source
    #[arg(long, value_name = "DIR")]
    source: Option<PathBuf>,
    /// Drop exact-duplicate texts within a profile
    #[arg(long)]
    dedupe: bool,
    /// Output corpus (.csv or .jsonl)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LexiconFiles {
    /// Positive word list [default: bundled demo lexicon]
    #[arg(long, value_name = "PATH")]
    pos: Option<PathBuf>,
    /// Negative word list [default: bundled demo lexicon]
    #[arg(long, value_name = "PATH")]
    neg: Option<PathBuf>,
}

#[derive(Args)]
struct EmoticonFile {
    /// Emoticon table (`emoticon<TAB>pos|neg` lines) [default: bundled table]
    #[arg(long, value_name = "PATH")]
    emoticons: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Input corpus (.csv or .jsonl)
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    #[command(flatten)]
    lexicon: LexiconFiles,
    #[command(flatten)]
    emoticons: EmoticonFile,
    /// Scored corpus output (.csv or .jsonl)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Per-candidate summary CSV
    #[arg(long, value_name = "PATH")]
    summary_out: Option<PathBuf>,
    /// Score histogram CSV
    #[arg(long, value_name = "PATH")]
    hist_out: Option<PathBuf>,
    /// Score histogram as an SVG bar chart
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Leave zero-score documents out of the summary
    #[arg(long)]
    exclude_neutral: bool,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Scored corpus
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    /// Summary CSV output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Leave zero-score documents out
    #[arg(long)]
    exclude_neutral: bool,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    /// Random seed [default: 2015]
    #[arg(long)]
    seed: Option<u64>,
    /// Probability of a document going to the training part [default: 0.7]
    #[arg(long, value_name = "P")]
    p_train: Option<f64>,
    #[arg(long, value_name = "PATH")]
    train_out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    test_out: Option<PathBuf>,
}

#[derive(Args)]
struct ModelOptions {
    /// nb, maxent, svm or tree [default: nb]
    #[arg(long)]
    algo: Option<Algorithm>,
    /// Drop terms whose sparsity is not below this value [default: 0.99]
    #[arg(long)]
    sparse: Option<f64>,
    /// Naive Bayes smoothing pseudo-count [default: 1]
    #[arg(long)]
    alpha: Option<f64>,
    /// Maximum entropy L2 strength [default: 0.001]
    #[arg(long)]
    lambda: Option<f64>,
    /// Maximum entropy iteration limit [default: 500]
    #[arg(long)]
    max_iters: Option<usize>,
    /// SVM cost parameter [default: 1]
    #[arg(long)]
    c: Option<f64>,
    /// SVM passes over the training set [default: 50]
    #[arg(long)]
    epochs: Option<usize>,
    /// Tree depth limit [default: 20]
    #[arg(long)]
    depth: Option<usize>,
    /// Smallest tree node that may be split [default: 5]
    #[arg(long)]
    min_split: Option<usize>,
    /// Use term presence instead of counts (Naive Bayes always does)
    #[arg(long)]
    binarize: bool,
    /// Random seed [default: 2015]
    #[arg(long)]
    seed: Option<u64>,
    /// Train on positive and negative documents only
    #[arg(long)]
    exclude_neutral: bool,
}

#[derive(Args)]
struct TrainArgs {
    /// Scored training corpus
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    #[command(flatten)]
    model: ModelOptions,
    #[command(flatten)]
    emoticons: EmoticonFile,
    /// Where to write the trained model
    #[arg(long, value_name = "PATH")]
    model_out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Model written by `train`
    #[arg(long, value_name = "PATH")]
    model: Option<PathBuf>,
    /// Scored test corpus
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    /// Aligned text report
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// `class,precision,recall,f1` table with a final accuracy row
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Full report and confusion matrix as JSON
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Evaluate on positive and negative documents only
    #[arg(long)]
    exclude_neutral: bool,
}

#[derive(Args)]
struct CrossvalArgs {
    /// Scored corpus
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    /// Number of folds [default: 10]
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    model: ModelOptions,
    #[command(flatten)]
    emoticons: EmoticonFile,
    /// Per-fold accuracy listing
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Scored corpus
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    /// Histogram CSV (`candidate,score,count`)
    #[arg(long, value_name = "PATH")]
    hist_out: Option<PathBuf>,
    /// Summary CSV (`candidate,tweets,median,mean,stddev,min,max`)
    #[arg(long, value_name = "PATH")]
    summary_out: Option<PathBuf>,
    /// Faceted histogram SVG
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Leave zero-score documents out of the summary
    #[arg(long)]
    exclude_neutral: bool,
}

#[derive(Args)]
struct LexiconArgs {
    #[command(flatten)]
    lexicon: LexiconFiles,
    /// Fail when a file is not in alphabetical order
    #[arg(long)]
    check_sorted: bool,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    Ok(read_corpus(path)?)
}

fn normalizer(cfg: &Config, args: &EmoticonFile) -> Result<Normalizer> {
    match cfg.opt(args.emoticons.clone(), "emoticons")? {
        Some(path) => Ok(Normalizer::new(EmoticonTable::load(&path)?)),
        None => Ok(Normalizer::default()),
    }
}

fn lexicon(cfg: &Config, args: &LexiconFiles) -> Result<SentimentLexicon> {
    let pos = cfg.opt(args.pos.clone(), "pos")?;
    let neg = cfg.opt(args.neg.clone(), "neg")?;
    match (pos, neg) {
        (Some(p), Some(n)) => Ok(load_lexicon(p, n)?),
        (None, None) => Ok(SentimentLexicon::demo()),
        _ => Err(usage("--pos and --neg must be given together")),
    }
}

fn run_fetch(cfg: &Config, args: FetchArgs) -> Result<()> {
    let manifest_path: PathBuf = cfg.required(args.manifest, "manifest")?;
    let mut manifest = SourceManifest::load(&manifest_path)?;
    if let Some(dir) = cfg.opt(args.cache, "cache")? {
        manifest.cache_dir = dir;
    }
    let page_size = cfg.or(args.page_size, "page-size", 100usize)?;
    let budget: u64 = cfg.or(
        args.budget.map(|b| b.parse().expect("validated by clap")),
        "budget",
        180,
    )?;
    if ![15, 30, 180].contains(&budget) {
        return Err(usage(format!(
            "--budget must be 15, 30 or 180, got {budget}"
        )));
    }
    if page_size == 0 {
        return Err(usage("--page-size must be positive"));
    }
    let plan = plan_fetch(&manifest, &RateLimitPolicy::with_budget(budget)?, page_size)?;
    eprintln!(
        "plan: {} requests in {} window(s), last window starts after {} s",
        plan.requests.len(),
        plan.total_windows,
        plan.total_duration_seconds
    );
    if let Some(path) = cfg.opt(args.plan_out, "plan-out")? {
        let mut out = create(&path)?;
        serde_json::to_writer_pretty(&mut out, &plan)?;
        out.write_all(b"\n")?;
        out.flush()?;
    }
    if cfg.switch(args.dry_run, "dry-run")? {
        return Ok(());
    }
    let source_dir: PathBuf = cfg.required(args.source, "source")?;
    let out: PathBuf = cfg.required(args.out, "out")?;
    let mut source = MockSource::from_dir(&source_dir)?;
    let options = FetchOptions {
        page_size,
        dedupe: cfg.switch(args.dedupe, "dedupe")?,
    };
    let corpus = fetch(&manifest, &mut source, &options)?;
    write_corpus(&corpus, &out)?;
    eprintln!(
        "fetched {} documents with {} source calls",
        corpus.len(),
        source.calls()
    );
    Ok(())
}

fn write_reports(
    corpus: &Corpus,
    exclude_neutral: bool,
    summary: Option<PathBuf>,
    hist: Option<PathBuf>,
    svg: Option<PathBuf>,
) -> Result<()> {
    if let Some(path) = summary {
        write_summary_csv(&summary_table(corpus, exclude_neutral), create(&path)?)?;
    }
    if hist.is_some() || svg.is_some() {
        let blocks = histogram_blocks(corpus)?;
        if let Some(path) = hist {
            write_histogram_csv(&blocks, create(&path)?)?;
        }
        if let Some(path) = svg {
            let mut out = create(&path)?;
            write_histogram_svg(&blocks, &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn run_score(cfg: &Config, args: ScoreArgs) -> Result<()> {
    let corpus = load_corpus(&cfg.required::<PathBuf>(args.corpus, "corpus")?)?;
    let out: PathBuf = cfg.required(args.out, "out")?;
    let lex = lexicon(cfg, &args.lexicon)?;
    let scored = score_corpus(&corpus, &lex, &normalizer(cfg, &args.emoticons)?);
    write_corpus(&scored, &out)?;
    write_reports(
        &scored,
        cfg.switch(args.exclude_neutral, "exclude-neutral")?,
        cfg.opt(args.summary_out, "summary-out")?,
        cfg.opt(args.hist_out, "hist-out")?,
        cfg.opt(args.svg, "svg")?,
    )
}

fn require_scored(corpus: &Corpus) -> Result<()> {
    if let Some(i) = corpus
        .documents
        .iter()
        .position(|d| d.senti_score.is_none())
    {
        bail!("document {} has no score; run `polsent score` first", i + 1);
    }
    Ok(())
}

fn run_summarize(cfg: &Config, args: SummarizeArgs) -> Result<()> {
    let corpus = load_corpus(&cfg.required::<PathBuf>(args.corpus, "corpus")?)?;
    let out: PathBuf = cfg.required(args.out, "out")?;
    require_scored(&corpus)?;
    let exclude = cfg.switch(args.exclude_neutral, "exclude-neutral")?;
    write_summary_csv(&summary_table(&corpus, exclude), create(&out)?)?;
    Ok(())
}

fn run_split(cfg: &Config, args: SplitArgs) -> Result<()> {
    let corpus = load_corpus(&cfg.required::<PathBuf>(args.corpus, "corpus")?)?;
    let seed = cfg.or(args.seed, "seed", 2015u64)?;
    let p_train = cfg.or(args.p_train, "p-train", 0.7)?;
    let train_out: PathBuf = cfg.required(args.train_out, "train-out")?;
    let test_out: PathBuf = cfg.required(args.test_out, "test-out")?;
    let assignment = split_train_test(corpus.len(), seed, p_train)?;
    let (train, test) = assignment.apply(&corpus);
    write_corpus(&train, &train_out)?;
    write_corpus(&test, &test_out)?;
    eprintln!("split: {} train, {} test", train.len(), test.len());
    Ok(())
}

fn train_config(cfg: &Config, opts: &ModelOptions) -> Result<TrainConfig> {
    let defaults = Hyperparameters::default();
    let mut params = defaults;
    params.alpha = cfg.or(opts.alpha, "alpha", defaults.alpha)?;
    params.maxent.l2_lambda = cfg.or(opts.lambda, "lambda", defaults.maxent.l2_lambda)?;
    params.maxent.max_iters = cfg.or(opts.max_iters, "max-iters", defaults.maxent.max_iters)?;
    params.svm.c_param = cfg.or(opts.c, "c", defaults.svm.c_param)?;
    params.svm.epochs = cfg.or(opts.epochs, "epochs", defaults.svm.epochs)?;
    params.tree.max_depth = cfg.or(opts.depth, "depth", defaults.tree.max_depth)?;
    params.tree.min_samples_split =
        cfg.or(opts.min_split, "min-split", defaults.tree.min_samples_split)?;
    let base = TrainConfig::default();
    Ok(TrainConfig {
        algorithm: cfg.or(opts.algo, "algo", base.algorithm)?,
        params,
        sparse: cfg.or(opts.sparse, "sparse", base.sparse)?,
        binarize: cfg.switch(opts.binarize, "binarize")?,
        seed: cfg.or(opts.seed, "seed", base.seed)?,
    })
}

fn training_corpus(cfg: &Config, path: Option<PathBuf>, exclude_neutral: bool) -> Result<Corpus> {
    let corpus = load_corpus(&cfg.required::<PathBuf>(path, "corpus")?)?;
    require_scored(&corpus)?;
    if cfg.switch(exclude_neutral, "exclude-neutral")? {
        Ok(filter_neutral(&corpus)?)
    } else {
        Ok(corpus)
    }
}

fn run_train(cfg: &Config, args: TrainArgs) -> Result<()> {
    let config = train_config(cfg, &args.model)?;
    let model_out: PathBuf = cfg.required(args.model_out, "model-out")?;
    let corpus = training_corpus(cfg, args.corpus, args.model.exclude_neutral)?;
    let model = fit(&corpus, &normalizer(cfg, &args.emoticons)?, &config)?;
    model.save(&model_out)?;
    eprintln!(
        "trained {} on {} documents, {} terms",
        model.algorithm(),
        corpus.len(),
        model.vocabulary.len()
    );
    Ok(())
}

fn fmt_metric(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| format!("{v:.7}"))
}

fn text_report(report: &MetricsReport, cm: &ConfusionMatrix) -> String {
    let width = cm
        .classes()
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max(9);
    let mut s = format!("Accuracy = {:.7}\n\n", report.accuracy);
    s += &format!(
        "{:<width$}  {:>10}  {:>10}  {:>10}\n",
        "class", "precision", "recall", "f1"
    );
    for m in &report.per_class {
        s += &format!(
            "{:<width$}  {:>10}  {:>10}  {:>10}\n",
            m.class,
            fmt_metric(m.precision),
            fmt_metric(m.recall),
            fmt_metric(m.f1)
        );
    }
    s += &format!(
        "{:<width$}  {:>10}  {:>10}  {:>10}\n\n",
        "macro",
        fmt_metric(report.macro_precision.value),
        fmt_metric(report.macro_recall.value),
        fmt_metric(report.macro_f1.value)
    );
    s += "Confusion matrix (rows = actual, columns = predicted)\n";
    let cell = cm
        .rows()
        .iter()
        .flatten()
        .map(|v| v.to_string().len())
        .max()
        .unwrap_or(1)
        .max(width);
    s += &format!("{:<width$}", "");
    for c in cm.classes() {
        s += &format!("  {c:>cell$}");
    }
    s.push('\n');
    for (name, row) in cm.classes().iter().zip(cm.rows()) {
        s += &format!("{name:<width$}");
        for v in row {
            s += &format!("  {v:>cell$}");
        }
        s.push('\n');
    }
    s
}

fn run_evaluate(cfg: &Config, args: EvaluateArgs) -> Result<()> {
    let model = TrainedModel::load(cfg.required::<PathBuf>(args.model, "model")?)?;
    let corpus = training_corpus(cfg, args.corpus, args.exclude_neutral)?;
    let out = cfg.opt(args.out, "out")?;
    let csv_out = cfg.opt(args.csv, "csv")?;
    let json_out = cfg.opt(args.json, "json")?;
    if out.is_none() && csv_out.is_none() && json_out.is_none() {
        return Err(usage("evaluate needs at least one of --out, --csv, --json"));
    }
    let data = model.labeled_set(&corpus)?;
    let cm = evaluate_model(&model.classifier, &data)?;
    let report = metrics_report(&cm)?;
    if let Some(path) = out {
        let mut w = create(&path)?;
        w.write_all(text_report(&report, &cm).as_bytes())?;
        w.flush()?;
    }
    if let Some(path) = csv_out {
        let mut w = polsent::ingest::csv_writer(create(&path)?);
        w.write_record(["class", "precision", "recall", "f1"])?;
        for m in &report.per_class {
            w.write_record([
                m.class.clone(),
                fmt_metric(m.precision),
                fmt_metric(m.recall),
                fmt_metric(m.f1),
            ])?;
        }
        w.write_record([
            "accuracy".to_string(),
            String::new(),
            String::new(),
            format!("{:.7}", report.accuracy),
        ])?;
        w.flush()?;
    }
    if let Some(path) = json_out {
        let mut w = create(&path)?;
        let value = serde_json::json!({ "report": report, "confusion_matrix": cm });
        serde_json::to_writer_pretty(&mut w, &value)?;
        w.write_all(b"\n")?;
        w.flush()?;
    }
    eprintln!(
        "accuracy {:.7} on {} documents",
        report.accuracy,
        data.len()
    );
    Ok(())
}

fn run_crossval(cfg: &Config, args: CrossvalArgs) -> Result<()> {
    let config = train_config(cfg, &args.model)?;
    let k = cfg.or(args.k, "k", 10usize)?;
    let out: PathBuf = cfg.required(args.out, "out")?;
    let corpus = training_corpus(cfg, args.corpus, args.model.exclude_neutral)?;
    let (encoded, _) = encode_training(
        &corpus,
        &normalizer(cfg, &args.emoticons)?,
        config.sparse,
        config.effective_binarize(),
    )?;
    let result = cross_validate(
        &encoded.data,
        k,
        config.algorithm,
        &config.params,
        config.seed,
    )?;
    let mut w = create(&out)?;
    for (i, acc) in result.fold_accuracies.iter().enumerate() {
        writeln!(w, "Fold {} out of Sample Accuracy = {:.7}", i + 1, acc)?;
    }
    writeln!(
        w,
        "Mean out of Sample Accuracy = {:.7}",
        result.mean_accuracy
    )?;
    w.flush()?;
    eprintln!(
        "{} {}-fold mean accuracy {:.7}",
        config.algorithm, k, result.mean_accuracy
    );
    Ok(())
}

fn run_report(cfg: &Config, args: ReportArgs) -> Result<()> {
    let corpus = load_corpus(&cfg.required::<PathBuf>(args.corpus, "corpus")?)?;
    require_scored(&corpus)?;
    let summary = cfg.opt(args.summary_out, "summary-out")?;
    let hist = cfg.opt(args.hist_out, "hist-out")?;
    let svg = cfg.opt(args.svg, "svg")?;
    if summary.is_none() && hist.is_none() && svg.is_none() {
        return Err(usage(
            "report needs at least one of --hist-out, --summary-out, --svg",
        ));
    }
    write_reports(
        &corpus,
        cfg.switch(args.exclude_neutral, "exclude-neutral")?,
        summary,
        hist,
        svg,
    )
}

fn run_lexicon(cfg: &Config, args: LexiconArgs) -> Result<()> {
    let lex = lexicon(cfg, &args.lexicon)?;
    let (pos, neg) = lexicon_stats(&lex);
    eprintln!("{pos} positive and {neg} negative words");
    if cfg.switch(args.check_sorted, "check-sorted")? {
        let mut problems = 0;
        if let Some((p, n)) = lex.source_paths() {
            for path in [p, n] {
                for (line, word) in unsorted_entries(path)? {
                    eprintln!(
                        "{}:{line}: {word:?} is out of alphabetical order",
                        path.display()
                    );
                    problems += 1;
                }
            }
        }
        if problems > 0 {
            bail!("{problems} lexicon entries out of order");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Fetch(a) => run_fetch(&cfg, a),
        Command::Score(a) => run_score(&cfg, a),
        Command::Summarize(a) => run_summarize(&cfg, a),
        Command::Split(a) => run_split(&cfg, a),
        Command::Train(a) => run_train(&cfg, a),
        Command::Evaluate(a) => run_evaluate(&cfg, a),
        Command::Crossval(a) => run_crossval(&cfg, a),
        Command::Report(a) => run_report(&cfg, a),
        Command::Lexicon(a) => run_lexicon(&cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            eprintln!("Run with --help for usage.");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
