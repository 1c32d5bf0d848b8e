use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hopeedi::corpus::{compute_stats, load_tsv, load_tsv_any};
use hopeedi::features::load_embeddings_for_rows;
use hopeedi::langid::{assign_language_class, detect, DetectConfig, LanguageClass};
use hopeedi::learn::{load_external_predictions, parse_prediction_file, vote_rows, TieBreak};
use hopeedi::metrics::{aggregate, confusion, render_report, ReportFormat};
use hopeedi::pipeline::{
    run_pipeline, FeatureMode, LanguageTools, Manifest, PipelineConfig, PipelineError, Predictor, RunInputs,
};
use hopeedi::textprep::normalize_text;
use hopeedi::translit::transliterate;
use hopeedi::{DatasetLang, Label};

#[derive(Parser)]
#[command(name = "hopeedi", version, about = "Hope speech detection for English, Tamil and Malayalam comments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Dataset language
    #[arg(long, value_parser = parse_lang)]
    lang: Option<DatasetLang>,
    /// Pipeline config file (key=value lines)
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct TrainArgs {
    /// Base seed for ensemble splits and training
    #[arg(long)]
    seed: Option<u64>,
    /// Number of ensemble members
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_parser = parse_tie)]
    tie_break: Option<TieBreak>,
    /// Directory holding train.emb / dev.emb / test.emb; switches to embedding features
    #[arg(long)]
    embeddings: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Tsv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Per-class counts of a labeled TSV file
    Stats {
        #[command(flatten)]
        common: Common,
        files: Vec<PathBuf>,
    },
    /// Detect the language of each line (or TSV text field) of a file
    DetectLang {
        #[command(flatten)]
        common: Common,
        file: PathBuf,
    },
    /// Transliterate romanized lines into Tamil or Malayalam script
    Transliterate {
        #[command(flatten)]
        common: Common,
        file: PathBuf,
    },
    /// Train an ensemble and save it under --out
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        out: PathBuf,
        train_file: PathBuf,
    },
    /// Label comments with a saved model directory
    Predict {
        /// Directory written by `train`
        #[arg(long)]
        model: PathBuf,
        /// Embedding file aligned with the input rows
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Output file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
        input: PathBuf,
    },
    /// Majority vote over external prediction files
    EnsembleVote {
        #[arg(long, value_parser = parse_lang, default_value = "en")]
        lang: DatasetLang,
        #[arg(long, num_args = 1.., required = true)]
        predictions: Vec<PathBuf>,
        #[arg(long, value_parser = parse_tie, default_value = "majority-prior")]
        tie_break: TieBreak,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a prediction file against gold labels
    Evaluate {
        #[arg(long, value_parser = parse_lang, default_value = "en")]
        lang: DatasetLang,
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        gold: PathBuf,
    },
    /// Full pipeline: train, label dev (and test), evaluate, write manifest
    Run {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainArgs,
        /// Re-run from a manifest instead of config + paths
        #[arg(long, conflicts_with_all = ["config", "train_file"])]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        train_file: Option<PathBuf>,
        dev_file: Option<PathBuf>,
        test_file: Option<PathBuf>,
    },
}

fn parse_lang(s: &str) -> Result<DatasetLang, String> {
    s.parse()
}

fn parse_tie(s: &str) -> Result<TieBreak, String> {
    s.parse()
}

/// Error with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: e.to_string() }
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure { code: 3, message: e.to_string() }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure { code: e.exit_code() as u8, message: e.to_string() }
    }
}

fn load_config(common: &Common) -> Result<PipelineConfig, Failure> {
    let mut cfg = match &common.config {
        Some(p) => PipelineConfig::load(p, common.lang)?,
        None => {
            PipelineConfig::new(common.lang.ok_or_else(|| config_err("--lang or a config with `lang=` is required"))?)
        }
    };
    if let Some(l) = common.lang {
        cfg.dataset_lang = l;
    }
    Ok(cfg)
}

fn apply_train_args(cfg: &mut PipelineConfig, a: &TrainArgs) -> Result<(), Failure> {
    if let Some(s) = a.seed {
        cfg.ensemble.base_seed = s;
    }
    if let Some(k) = a.k {
        cfg.ensemble.k = k;
    }
    if let Some(t) = a.tie_break {
        cfg.ensemble.tie_break = t;
    }
    if let Some(dir) = &a.embeddings {
        let dim = match cfg.features {
            FeatureMode::Embeddings { dim, .. } => dim,
            FeatureMode::Tfidf { .. } => hopeedi::features::DEFAULT_EMBEDDING_DIM,
        };
        cfg.features = FeatureMode::Embeddings { dir: dir.clone(), dim };
    }
    cfg.validate()?;
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    Ok(text.lines().map(|l| l.trim_end_matches('\r')).map(|l| l.split('\t').next().unwrap_or("").to_string()).collect())
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| input_err(format!("{}: {e}", parent.display())))?;
            }
            std::fs::write(p, content).map_err(|e| input_err(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn labels_file(labels: &[Label], lang: DatasetLang) -> String {
    labels.iter().map(|l| format!("{}\n", l.file_name(lang))).collect()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Stats { common, files } => {
            let lang = load_config(&common)?.dataset_lang;
            if files.is_empty() {
                return Err(input_err("no input files"));
            }
            println!("file\thope\tnot_hope\tnot_lang\ttotal\thope_to_not_hope");
            for f in files {
                let rows = load_tsv(&f, lang, true).map_err(input_err)?;
                let s = compute_stats(&rows).map_err(input_err)?;
                let ratio = s.hope_to_nothope_ratio().map_or("-".to_string(), |r| format!("{r:.4}"));
                println!(
                    "{}\t{}\t{}\t{}\t{}\t{ratio}",
                    f.display(),
                    s.count(Label::Hope),
                    s.count(Label::NotHope),
                    s.count(Label::NotLanguage),
                    s.total
                );
            }
        }
        Command::DetectLang { common, file } => {
            let cfg = load_config(&common)?;
            let tools = LanguageTools::from_config(&cfg)?;
            let dcfg = DetectConfig { script_threshold: cfg.script_threshold };
            println!("line\tdetected\tclass");
            for (i, line) in read_lines(&file)?.iter().enumerate() {
                let norm = normalize_text(line, &cfg.normalization);
                if norm.is_empty() {
                    println!("{}\t-\tin-language", i + 1);
                    continue;
                }
                let d = detect(&norm, &tools.profiles, &dcfg).map_err(input_err)?;
                let class = match assign_language_class(&d, cfg.dataset_lang) {
                    LanguageClass::InLanguage => "in-language",
                    LanguageClass::NotLanguage => "not-language",
                };
                println!("{}\t{}\t{class}", i + 1, d.best.code());
            }
        }
        Command::Transliterate { common, file } => {
            let cfg = load_config(&common)?;
            let tools = LanguageTools::from_config(&cfg)?;
            let table =
                tools.scheme.as_ref().ok_or_else(|| config_err("transliteration needs --lang ta or --lang ml"))?;
            for line in read_lines(&file)? {
                println!("{}", transliterate(&normalize_text(&line, &cfg.normalization), table));
            }
        }
        Command::Train { common, train, out, train_file } => {
            let mut cfg = load_config(&common)?;
            apply_train_args(&mut cfg, &train)?;
            let rows = load_tsv(&train_file, cfg.dataset_lang, true).map_err(input_err)?;
            let emb = match &cfg.features {
                FeatureMode::Embeddings { dir, dim } => {
                    Some(load_embeddings_for_rows(dir.join("train.emb"), *dim, rows.len()).map_err(input_err)?)
                }
                FeatureMode::Tfidf { .. } => None,
            };
            let p = Predictor::train(&cfg, &rows, emb.as_deref())?;
            p.save(&out)?;
            for (i, f1) in p.ensemble.validation_weighted_f1.iter().enumerate() {
                eprintln!("member {i}: seed {} validation weighted F1 {f1:.3}", p.ensemble.member_seeds[i]);
            }
        }
        Command::Predict { model, embeddings, out, input } => {
            let p = Predictor::load(&model)?;
            let lang = p.config.dataset_lang;
            let rows = load_tsv_any(&input, lang).map_err(input_err)?;
            let emb = match (&p.config.features, embeddings) {
                (FeatureMode::Embeddings { dim, .. }, Some(path)) => {
                    Some(load_embeddings_for_rows(&path, *dim, rows.len()).map_err(input_err)?)
                }
                (FeatureMode::Embeddings { .. }, None) => return Err(input_err("this model needs --embeddings")),
                (FeatureMode::Tfidf { .. }, _) => None,
            };
            let outcomes = p.predict(&rows, emb.as_deref())?;
            let labels: Vec<Label> = outcomes.iter().map(|o| o.label).collect();
            emit(out.as_deref(), &labels_file(&labels, lang))?;
        }
        Command::EnsembleVote { lang, predictions, tie_break, out } => {
            let first = &predictions[0];
            let content = std::fs::read_to_string(first).map_err(|e| input_err(format!("{}: {e}", first.display())))?;
            let n = parse_prediction_file(&content, &first.display().to_string()).map_err(input_err)?.len();
            let matrix = load_external_predictions(&predictions, n).map_err(input_err)?;
            if predictions.len() % 2 == 0 {
                log::warn!("even number of prediction files ({}); ties are possible", predictions.len());
            }
            let voted = vote_rows(&matrix, tie_break).map_err(input_err)?;
            emit(out.as_deref(), &labels_file(&voted, lang))?;
        }
        Command::Evaluate { lang, predictions, format, gold } => {
            let rows = load_tsv(&gold, lang, true).map_err(input_err)?;
            let gold: Vec<Label> = rows.iter().map(|r| r.label.expect("labeled rows")).collect();
            let content = std::fs::read_to_string(&predictions)
                .map_err(|e| input_err(format!("{}: {e}", predictions.display())))?;
            let pred = parse_prediction_file(&content, &predictions.display().to_string()).map_err(input_err)?;
            let cm = confusion(&gold, &pred, &Label::ALL).map_err(input_err)?;
            let report = aggregate(&cm, &Default::default());
            let format = match format {
                Format::Text => ReportFormat::Text,
                Format::Tsv => ReportFormat::Tsv,
                Format::Json => ReportFormat::Json,
            };
            print!("{}", render_report(&report, format));
        }
        Command::Run { common, train, manifest, out, train_file, dev_file, test_file } => {
            let (mut cfg, inputs) = match manifest {
                Some(m) => {
                    let text = std::fs::read_to_string(&m).map_err(|e| input_err(format!("{}: {e}", m.display())))?;
                    let m = Manifest::parse(&text)?;
                    m.verify_inputs()?;
                    (m.config, m.inputs)
                }
                None => {
                    let cfg = load_config(&common)?;
                    let (Some(train), Some(dev)) = (train_file, dev_file) else {
                        return Err(input_err("run needs TRAIN and DEV files (or --manifest)"));
                    };
                    (cfg, RunInputs { train, dev, test: test_file })
                }
            };
            apply_train_args(&mut cfg, &train)?;
            let result = run_pipeline(&cfg, &inputs)?;
            result.write(&out)?;
            if let Some(r) = &result.dev.report {
                eprint!("{}", render_report(r, ReportFormat::Text));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
