//! Subcommand implementations. Each one is a thin wrapper over the library
//! so every stage of the pipeline is drivable in isolation.

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};

use optchoice::{
    augment, brute_force_search, fit_logistic, leave_one_lot_out, lotwise_auc,
    pointwise_accuracy, predictions, success_rate, Aggregate, AugmentationEntry,
    AugmentationSpec, BruteForceConfig, Dataset, GenConfig, LinearScorer, LogisticModel,
    TrainConfig,
};

use crate::dataset_io::{self, DatasetFile};
use crate::error::{CliError, CliResult};
use crate::run_config::{build_trainer, nelder_mead_config, MethodConfig, RunConfig};

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset file.
    Gen(GenArgs),
    /// Run a config-driven experiment and write the evaluation report.
    Run(RunArgs),
    /// Leave-one-lot-out success rate of a single method.
    Loo(LooArgs),
    /// Exhaustive integer-coefficient search for the best linear scorer.
    Bruteforce(BruteforceArgs),
    /// Multi-start Nelder-Mead search for the best linear scorer.
    Neldermead(NeldermeadArgs),
    /// Fit the point-wise logistic baseline and report its success rate.
    Logistic(LogisticArgs),
    /// Append lot-aggregate feature columns to a dataset file.
    Augment(AugmentArgs),
    /// Compare success rate, per-choice accuracy, and lotwise AUC of a
    /// saved scorer.
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
pub struct GenArgs {
    /// Named preset; `engine` is the 114-lot, 4-feature shape.
    #[arg(long, conflicts_with_all = ["lots", "dim"])]
    preset: Option<String>,
    #[arg(long)]
    lots: Option<usize>,
    /// Minimum and maximum choices per lot.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    choices: Option<Vec<usize>>,
    #[arg(long)]
    dim: Option<usize>,
    /// Column index drawn as a 0/1 feature.
    #[arg(long)]
    binary_index: Option<usize>,
    /// Planted utility weights, comma separated; defaults to all ones.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Standard deviation of the utility noise.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Probability that a lot has a prime.
    #[arg(long, default_value_t = 1.0)]
    prime_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit 1-x features so that smaller raw values are better.
    #[arg(long)]
    invert: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the output path from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct MethodArgs {
    /// One of: bruteforce, neldermead, logistic.
    #[arg(long)]
    method: String,
    /// Coefficient bound for bruteforce.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Start count for neldermead.
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Learning rate for logistic.
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long)]
    pos_weight: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl MethodArgs {
    fn to_config(&self) -> CliResult<MethodConfig> {
        match self.method.as_str() {
            "bruteforce" => Ok(MethodConfig::Bruteforce {
                n: self
                    .n
                    .ok_or_else(|| CliError::usage("bruteforce requires --n"))?,
                tolerance: self.tolerance,
            }),
            "neldermead" => Ok(MethodConfig::Neldermead {
                starts: self.starts,
                seed: Some(self.seed),
                max_iterations: self.max_iterations,
            }),
            "logistic" => Ok(MethodConfig::Logistic {
                learning_rate: self
                    .lr
                    .ok_or_else(|| CliError::usage("logistic requires --lr"))?,
                epochs: self
                    .epochs
                    .ok_or_else(|| CliError::usage("logistic requires --epochs"))?,
                l2_penalty: self.l2,
                seed: Some(self.seed),
                positive_weight: self.pos_weight,
            }),
            other => Err(CliError::usage(format!(
                "unknown method `{other}` (expected bruteforce, neldermead, or logistic)"
            ))),
        }
    }
}

#[derive(Args)]
pub struct LooArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    negate_features: bool,
    #[command(flatten)]
    method: MethodArgs,
}

#[derive(Args)]
pub struct BruteforceArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Cap on (candidate, lot) evaluations.
    #[arg(long)]
    cap: Option<u128>,
    #[arg(long)]
    negate_features: bool,
    #[arg(long)]
    save_scorer: Option<PathBuf>,
}

#[derive(Args)]
pub struct NeldermeadArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    negate_features: bool,
    #[arg(long)]
    save_scorer: Option<PathBuf>,
}

#[derive(Args)]
pub struct LogisticArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    lr: f64,
    #[arg(long)]
    epochs: usize,
    #[arg(long, default_value_t = 0.0)]
    l2: f64,
    #[arg(long, default_value_t = 1.0)]
    pos_weight: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    save_model: Option<PathBuf>,
}

#[derive(Args)]
pub struct AugmentArgs {
    #[arg(long)]
    data: PathBuf,
    /// Entry of the form agg:feature[:new_name], e.g. min:f1 or min:f1:m1.
    #[arg(long = "add", required = true)]
    entries: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct DiagnoseArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    scorer: PathBuf,
}

pub fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Loo(args) => cmd_loo(args),
        Command::Bruteforce(args) => cmd_bruteforce(args),
        Command::Neldermead(args) => cmd_neldermead(args),
        Command::Logistic(args) => cmd_logistic(args),
        Command::Augment(args) => cmd_augment(args),
        Command::Diagnose(args) => cmd_diagnose(args),
    }
}

fn load_data(path: &Path, negate: bool) -> CliResult<DatasetFile> {
    let mut file = dataset_io::load(path)?;
    if negate {
        file.dataset = file
            .dataset
            .map_features(|_, v| -v)
            .map_err(CliError::from)?;
    }
    Ok(file)
}

fn write_text(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

fn cmd_gen(args: GenArgs) -> CliResult<()> {
    let config = match args.preset.as_deref() {
        Some("engine") => optchoice::engine_preset(),
        Some(other) => {
            return Err(CliError::usage(format!(
                "unknown preset `{other}` (available: engine)"
            )))
        }
        None => {
            let lots = args
                .lots
                .ok_or_else(|| CliError::usage("either --preset or --lots is required"))?;
            let dim = args
                .dim
                .ok_or_else(|| CliError::usage("--dim is required without a preset"))?;
            let (choices_min, choices_max) = match args.choices.as_deref() {
                Some([min, max]) => (*min, *max),
                _ => return Err(CliError::usage("--choices MIN MAX is required")),
            };
            GenConfig {
                lots,
                choices_min,
                choices_max,
                dimension: dim,
                binary_feature_index: args.binary_index,
                planted_weights: args.weights.clone().unwrap_or_else(|| vec![1.0; dim]),
                noise_sigma: args.noise,
                prime_probability: args.prime_prob,
                seed: args.seed,
            }
        }
    };
    let mut dataset = optchoice::generate(&config).map_err(CliError::from)?;
    if args.invert {
        dataset = dataset
            .map_features(|_, v| 1.0 - v)
            .map_err(CliError::from)?;
    }
    let file = DatasetFile::with_default_ids(dataset);
    dataset_io::save(&args.out, &file)?;
    println!(
        "wrote {}: {} lots, {} choices, {} features",
        args.out.display(),
        file.dataset.num_lots(),
        file.dataset.num_choices(),
        file.dataset.dimension()
    );
    Ok(())
}

fn cmd_run(args: RunArgs) -> CliResult<()> {
    let config = RunConfig::parse(&args.config)?;
    let mode = config.eval_mode()?;

    let dataset = match (&config.data.file, &config.data.preset) {
        (Some(file), None) => load_data(Path::new(file), false)?.dataset,
        (None, Some(preset)) if preset == "engine" => {
            optchoice::generate(&optchoice::engine_preset()).map_err(CliError::from)?
        }
        (None, Some(other)) => {
            return Err(CliError::usage(format!(
                "unknown preset `{other}` (available: engine)"
            )))
        }
        _ => {
            return Err(CliError::usage(
                "[data] must set exactly one of `file` or `preset`",
            ))
        }
    };
    let dataset = if config.eval.negate_features {
        dataset.map_features(|_, v| -v).map_err(CliError::from)?
    } else {
        dataset
    };

    let spec = config.augmentation()?;
    if let Some(s) = &spec {
        s.validate(&dataset).map_err(CliError::from)?;
    }
    let trainers = config.trainers()?;
    let report =
        optchoice::build_report_mode(&dataset, &trainers, spec.as_ref(), mode)
            .map_err(CliError::from)?;

    let base = args
        .out
        .unwrap_or_else(|| PathBuf::from(&config.eval.output));
    let table = report.to_table();
    write_text(&base.with_extension("txt"), &table)?;
    write_text(&base.with_extension("tsv"), &report.to_tsv())?;
    print!("{table}");
    Ok(())
}

fn cmd_loo(args: LooArgs) -> CliResult<()> {
    let file = load_data(&args.data, args.negate_features)?;
    let method = args.method.to_config()?;
    let trainer = build_trainer(&method)?;
    let rate = leave_one_lot_out(trainer.as_ref(), &file.dataset).map_err(CliError::from)?;
    println!("{} loo_rate {rate:.4}", trainer.name());
    Ok(())
}

fn cmd_bruteforce(args: BruteforceArgs) -> CliResult<()> {
    let file = load_data(&args.data, args.negate_features)?;
    let mut config = BruteForceConfig::new(args.n);
    if let Some(t) = args.tolerance {
        config.tolerance = t;
    }
    if let Some(c) = args.cap {
        config.pair_eval_cap = c;
    }
    let (scorer, rate) =
        brute_force_search(&file.dataset, &config).map_err(CliError::from)?;
    let coeffs: Vec<String> = scorer
        .coefficients()
        .iter()
        .map(|c| format!("{c:.0}"))
        .collect();
    println!("coefficients ({})", coeffs.join(", "));
    println!("success_rate {rate:.4}");
    if let Some(path) = args.save_scorer {
        let text = scorer
            .to_text(file.dataset.feature_names())
            .map_err(CliError::from)?;
        write_text(&path, &text)?;
    }
    Ok(())
}

fn cmd_neldermead(args: NeldermeadArgs) -> CliResult<()> {
    let file = load_data(&args.data, args.negate_features)?;
    let config = nelder_mead_config(
        file.dataset.dimension(),
        args.starts,
        args.seed,
        args.max_iterations,
    )?;
    let (scorer, rate) =
        optchoice::maximize_success_rate(&file.dataset, &config).map_err(CliError::from)?;
    let coeffs: Vec<String> = scorer
        .coefficients()
        .iter()
        .map(|c| format!("{c:.6}"))
        .collect();
    println!("coefficients ({})", coeffs.join(", "));
    println!("success_rate {rate:.4}");
    if let Some(path) = args.save_scorer {
        let text = scorer
            .to_text(file.dataset.feature_names())
            .map_err(CliError::from)?;
        write_text(&path, &text)?;
    }
    Ok(())
}

fn cmd_logistic(args: LogisticArgs) -> CliResult<()> {
    let file = load_data(&args.data, false)?;
    let mut config = TrainConfig::new(args.lr, args.epochs, args.seed);
    config.l2_penalty = args.l2;
    config.positive_weight = args.pos_weight;
    let model = fit_logistic(&file.dataset, &config).map_err(CliError::from)?;
    let rate = success_rate(&model, &file.dataset).map_err(CliError::from)?;
    println!("success_rate {rate:.4}");
    if let Some(path) = args.save_model {
        let text = model
            .to_text(file.dataset.feature_names())
            .map_err(CliError::from)?;
        write_text(&path, &text)?;
    }
    Ok(())
}

fn parse_augment_entry(raw: &str) -> CliResult<AugmentationEntry> {
    let parts: Vec<&str> = raw.split(':').collect();
    let (agg, feature, name) = match parts.as_slice() {
        [agg, feature] => (*agg, *feature, None),
        [agg, feature, name] => (*agg, *feature, Some(*name)),
        _ => {
            return Err(CliError::usage(format!(
                "bad --add entry `{raw}`; expected agg:feature[:new_name]"
            )))
        }
    };
    let aggregate: Aggregate = agg
        .parse()
        .map_err(|e: optchoice::Error| CliError::usage(e.to_string()))?;
    Ok(match name {
        Some(n) => AugmentationEntry {
            feature: feature.to_string(),
            aggregate,
            new_name: n.to_string(),
        },
        None => AugmentationEntry::named_after(feature, aggregate),
    })
}

fn cmd_augment(args: AugmentArgs) -> CliResult<()> {
    let file = load_data(&args.data, false)?;
    let entries = args
        .entries
        .iter()
        .map(|raw| parse_augment_entry(raw))
        .collect::<CliResult<Vec<_>>>()?;
    let spec = AugmentationSpec::new(entries).map_err(CliError::from)?;
    let augmented = augment(&file.dataset, &spec).map_err(CliError::from)?;
    let out = DatasetFile {
        dataset: augmented,
        lot_ids: file.lot_ids,
    };
    dataset_io::save(&args.out, &out)?;
    println!(
        "wrote {}: {} features",
        args.out.display(),
        out.dataset.dimension()
    );
    Ok(())
}

fn cmd_diagnose(args: DiagnoseArgs) -> CliResult<()> {
    let file = load_data(&args.data, false)?;
    let text = std::fs::read_to_string(&args.scorer)
        .map_err(|e| CliError::data(format!("{}: {e}", args.scorer.display())))?;
    let (names, scorer) = LinearScorer::from_text(&text)
        .or_else(|_| {
            // A saved logistic model is also a linear scorer up to the bias,
            // which never changes the per-lot argmax.
            LogisticModel::from_text(&text)
                .map(|(names, model)| (names, linear_from_model(&model)))
        })
        .map_err(|e: optchoice::Error| CliError::data(format!("{}: {e}", args.scorer.display())))?;
    let scorer = align_scorer(&names, scorer, &file.dataset)?;

    let preds = predictions(&scorer, &file.dataset).map_err(CliError::from)?;
    let success = success_rate(&scorer, &file.dataset).map_err(CliError::from)?;
    let accuracy = pointwise_accuracy(&preds, &file.dataset).map_err(CliError::from)?;
    let auc = lotwise_auc(&scorer, &file.dataset).map_err(CliError::from)?;
    println!("success_rate       {success:.4}");
    println!("pointwise_accuracy {accuracy:.4}");
    println!("lotwise_auc        {auc:.4}");
    Ok(())
}

fn linear_from_model(model: &LogisticModel) -> LinearScorer {
    LinearScorer::new(model.weights().to_vec()).expect("model weights are finite")
}

/// Reorder file coefficients to the dataset's schema, erroring on any
/// missing or extra feature names.
fn align_scorer(
    names: &[String],
    scorer: LinearScorer,
    dataset: &Dataset,
) -> CliResult<LinearScorer> {
    let missing: Vec<&str> = dataset
        .feature_names()
        .iter()
        .filter(|n| !names.contains(n))
        .map(|n| n.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::data(format!(
            "scorer file is missing features: {}",
            missing.join(", ")
        )));
    }
    let extra: Vec<&str> = names
        .iter()
        .filter(|n| dataset.feature_index(n).is_none())
        .map(|n| n.as_str())
        .collect();
    if !extra.is_empty() {
        return Err(CliError::data(format!(
            "scorer file names unknown features: {}",
            extra.join(", ")
        )));
    }
    let coeffs = dataset
        .feature_names()
        .iter()
        .map(|n| {
            let idx = names.iter().position(|m| m == n).expect("checked above");
            scorer.coefficients()[idx]
        })
        .collect();
    LinearScorer::new(coeffs).map_err(CliError::from)
}
