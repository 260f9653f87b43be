//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (unreadable or
//! malformed input), 3 study error (nothing comparable, missing predictions).

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::compare::{
    collect_predictions, run_study, PairingMode, StudyConfig, StudyError, StudySettings,
};
use crate::corpus::{
    concept_intersection, glottocode_pairs, load_manual_pairs, CorpusError, Dataset,
};
use crate::eval::{
    evaluate_predictions, load_gold, load_predictions, write_predictions, EvalError, PositiveClass,
    PredictionSet,
};
use crate::metrics::{
    align_global, edit_distance, normalized_edit_distance, pair_metrics, DistanceParams,
    MetricsError, DEFAULT_THRESHOLD,
};
use crate::phonoseg::{parse_form, PhonosegError, PreprocessOptions, SoundClassModel};

/// Environment variable naming a sound-class model file to use instead of
/// the packaged default.
pub const MODEL_ENV: &str = "LEXVAR_SOUND_CLASSES";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 1,
    Data = 2,
    Study = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lexvar",
    version,
    about = "Compare concept translations across multilingual wordlists"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a study and write pair-level and group-level reports
    Compare(CompareArgs),
    /// Score threshold decisions against gold annotations
    Eval(EvalArgs),
    /// Print wordlist statistics
    Stats(StatsArgs),
    /// List variety pairings between two wordlists
    Pairs(PairsArgs),
    /// Compute all distances between two segmented forms
    Dist(DistArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Glottocode,
    Manual,
}

impl From<Mode> for PairingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Glottocode => PairingMode::Glottocode,
            Mode::Manual => PairingMode::Manual,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Tsv,
    Markdown,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Positive {
    Same,
    Different,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// SCA threshold below which non-identical forms count as similar
    #[arg(long)]
    threshold: Option<f64>,
    /// Sound-class model file (defaults to $LEXVAR_SOUND_CLASSES, then the built-in model)
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Study configuration (TOML)
    config: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    /// Pairing mode; overrides the config
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
    /// Output directory for report files
    #[arg(long, default_value = "lexvar-report")]
    out: PathBuf,
    /// Also write every classified form pair to predictions.tsv
    #[arg(long)]
    predictions: bool,
    /// Compare pairs on a single thread
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["predictions", "config"])))]
struct EvalArgs {
    /// Gold annotations (TSV)
    #[arg(long)]
    gold: PathBuf,
    /// Predictions file written by `compare --predictions`
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Study configuration to classify pairs on the fly
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Which gold label is the positive class
    #[arg(long, value_enum, default_value = "same")]
    positive: Positive,
    #[arg(long, default_value_t = 2)]
    decimals: usize,
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    /// Keep tone tokens
    #[arg(long)]
    keep_tones: bool,
    /// Keep `+` morpheme boundary tokens
    #[arg(long)]
    keep_boundaries: bool,
}

impl PreprocessArgs {
    fn options(&self) -> PreprocessOptions {
        PreprocessOptions {
            strip_morpheme_boundaries: !self.keep_boundaries,
            strip_tones: !self.keep_tones,
        }
    }
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// CLDF directory with forms.csv, languages.csv and parameters.csv
    dataset: PathBuf,
    #[command(flatten)]
    preprocess: PreprocessArgs,
    /// Write variety coordinates (TSV) to this file
    #[arg(long)]
    coordinates: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PairsArgs {
    a: PathBuf,
    b: PathBuf,
    /// Manual pair list; without it varieties are paired by glottocode
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[command(flatten)]
    preprocess: PreprocessArgs,
}

#[derive(Debug, Args)]
struct DistArgs {
    /// Space-separated segments
    form_a: String,
    form_b: String,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    preprocess: PreprocessArgs,
    /// Also print the sound-class alignment
    #[arg(long)]
    align: bool,
}

struct Failure {
    status: ExitStatus,
    message: String,
}

impl Failure {
    fn new(status: ExitStatus, message: impl Display) -> Self {
        Self {
            status,
            message: message.to_string(),
        }
    }
}

impl From<StudyError> for Failure {
    fn from(e: StudyError) -> Self {
        let status = match e {
            StudyError::Compare { .. } => ExitStatus::Study,
            _ => ExitStatus::Data,
        };
        Failure::new(status, e)
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::new(ExitStatus::Data, e)
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let status = match e {
            EvalError::MissingPrediction { .. } => ExitStatus::Study,
            _ => ExitStatus::Data,
        };
        Failure::new(status, e)
    }
}

impl From<PhonosegError> for Failure {
    fn from(e: PhonosegError) -> Self {
        let status = match e {
            PhonosegError::EmptyForm { .. } => ExitStatus::Usage,
            _ => ExitStatus::Data,
        };
        Failure::new(status, e)
    }
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        Failure::new(ExitStatus::Usage, e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(ExitStatus::Data, e)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| {
        Failure::new(
            ExitStatus::Data,
            format!("cannot write {}: {e}", path.display()),
        )
    })
}

fn load_model(flag: Option<&Path>, configured: Option<&Path>) -> Result<SoundClassModel, Failure> {
    let from_env = std::env::var_os(MODEL_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    match flag.or(configured).or(from_env.as_deref()) {
        Some(path) => Ok(SoundClassModel::from_path(path)?),
        None => Ok(SoundClassModel::default_model()),
    }
}

fn distance_params(
    args: &ModelArgs,
    configured_threshold: Option<f64>,
    configured_model: Option<&Path>,
) -> Result<DistanceParams, Failure> {
    let threshold = args
        .threshold
        .or(configured_threshold)
        .unwrap_or(DEFAULT_THRESHOLD);
    // validate before touching the model file so a bad flag is a usage error
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(MetricsError::InvalidThreshold(threshold).into());
    }
    let model = load_model(args.model.as_deref(), configured_model)?;
    Ok(DistanceParams::new(threshold, model)?)
}

fn study_settings(
    config: &StudyConfig,
    model: &ModelArgs,
    mode: Option<Mode>,
    parallel: bool,
) -> Result<StudySettings, Failure> {
    Ok(StudySettings {
        mode: mode
            .map(PairingMode::from)
            .or(config.mode)
            .unwrap_or(PairingMode::Glottocode),
        params: distance_params(model, config.threshold, config.model.as_deref())?,
        parallel,
    })
}

fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> Result<(), Failure> {
    if let Some(t) = args.model.threshold {
        if !(t > 0.0 && t < 1.0) {
            return Err(MetricsError::InvalidThreshold(t).into());
        }
    }
    let config = StudyConfig::load(&args.config)?;
    let settings = study_settings(&config, &args.model, args.mode, !args.sequential)?;
    let report = run_study(&config, &settings)?;

    std::fs::create_dir_all(&args.out).map_err(|e| {
        Failure::new(
            ExitStatus::Data,
            format!("cannot create {}: {e}", args.out.display()),
        )
    })?;
    let (ext, groups, pairs) = match args.format {
        Format::Tsv => ("tsv", report.groups_tsv(), report.pairs_tsv()),
        Format::Markdown => ("md", report.groups_markdown(), report.pairs_markdown()),
    };
    write_file(&args.out.join(format!("groups.{ext}")), &groups)?;
    write_file(&args.out.join(format!("pairs.{ext}")), &pairs)?;
    if args.predictions {
        let predictions = collect_predictions(&config, &settings)?;
        write_file(
            &args.out.join("predictions.tsv"),
            &write_predictions(&predictions),
        )?;
    }
    out.write_all(report.total_tsv().as_bytes())?;
    Ok(())
}

fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let gold = load_gold(&args.gold)?;
    let predictions = match (&args.predictions, &args.config) {
        (Some(path), _) => load_predictions(path)?,
        (None, Some(path)) => {
            let config = StudyConfig::load(path)?;
            let settings = study_settings(&config, &args.model, args.mode, true)?;
            collect_predictions(&config, &settings)?
        }
        (None, None) => unreachable!("clap requires one prediction source"),
    };
    let set: PredictionSet = predictions.iter().collect();
    let positive = match args.positive {
        Positive::Same => PositiveClass::Same,
        Positive::Different => PositiveClass::Different,
    };
    let result = evaluate_predictions(&set, &gold, positive)?;
    out.write_all(result.to_tsv(args.decimals).as_bytes())?;
    Ok(())
}

fn cmd_stats(args: &StatsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let ds = Dataset::load(&args.dataset, args.preprocess.options())?;
    let synonymy = ds.synonymy()?;
    let pooled = ds.pooled_synonymy()?;
    writeln!(out, "dataset\t{}", ds.id)?;
    writeln!(out, "varieties\t{}", ds.varieties.len())?;
    writeln!(out, "concepts\t{}", ds.attested_concepts().len())?;
    writeln!(out, "forms\t{}", ds.forms.len())?;
    writeln!(out, "synonymy\t{synonymy:.2}")?;
    writeln!(out, "synonymy_pooled\t{pooled:.2}")?;
    writeln!(out, "dropped_empty_forms\t{}", ds.drops.empty_forms)?;
    writeln!(
        out,
        "dropped_unmapped_parameters\t{}",
        ds.drops.unmapped_parameters
    )?;
    writeln!(out, "dropped_unmapped_forms\t{}", ds.drops.unmapped_forms)?;
    if let Some(path) = &args.coordinates {
        let mut buf = Vec::new();
        ds.write_coordinates(&mut buf)?;
        write_file(path, &String::from_utf8_lossy(&buf))?;
    }
    Ok(())
}

fn cmd_pairs(args: &PairsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let opts = args.preprocess.options();
    let a = Dataset::load(&args.a, opts)?;
    let b = Dataset::load(&args.b, opts)?;
    let pairs = match &args.pairs {
        Some(path) => load_manual_pairs(path, &a, &b)?,
        None => glottocode_pairs(&a, &b),
    };
    writeln!(
        out,
        "# shared concepts: {}",
        concept_intersection(&a, &b).len()
    )?;
    writeln!(out, "# pairs: {}", pairs.len())?;
    writeln!(
        out,
        "variety_a\tvariety_b\torigin\tglottocode_a\tglottocode_b\tshared_concepts"
    )?;
    for p in &pairs {
        let code = |ds: &Dataset, id: &str| {
            ds.variety(id)
                .and_then(|v| v.glottocode.clone())
                .unwrap_or_default()
        };
        let theirs = b.concepts_of(&p.b);
        let shared = a
            .concepts_of(&p.a)
            .iter()
            .filter(|c| theirs.contains(*c))
            .count();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{shared}",
            p.a,
            p.b,
            p.origin,
            code(&a, &p.a),
            code(&b, &p.b)
        )?;
    }
    Ok(())
}

fn cmd_dist(args: &DistArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let opts = args.preprocess.options();
    let a = parse_form(&args.form_a, opts)?;
    let b = parse_form(&args.form_b, opts)?;
    let params = distance_params(&args.model, None, None)?;
    let m = pair_metrics(&a, &b, &params);
    debug_assert_eq!(m.ed, edit_distance(&a, &b));
    let ned = normalized_edit_distance(&a, &b)?;
    writeln!(
        out,
        "sca={:.2}\ted={}\tned={:.2}\tcategory={}",
        m.sca, m.ed, ned, m.category
    )?;
    if args.align {
        let model = params.model();
        let alignment = align_global(&model.to_classes(&a), &model.to_classes(&b), model);
        let (top, bottom) = alignment.render(model);
        writeln!(out, "{top}\n{bottom}\nscore={}", alignment.score)?;
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    ExitStatus::Success
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    ExitStatus::Usage
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Compare(a) => cmd_compare(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Stats(a) => cmd_stats(a, out),
        Command::Pairs(a) => cmd_pairs(a, out),
        Command::Dist(a) => cmd_dist(a, out),
    };
    match result {
        Ok(()) => ExitStatus::Success,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.status
        }
    }
}
