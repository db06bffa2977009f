use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use atp_core::corpus::{load_dataset, sample_frequency_weighted, SamplePlan};
use atp_core::{inflect, train, AnalogyMode, Query, RuleChanges, TrainConfig, Word};
use atp_harness::experiment::{write_acquisition, write_growth, write_wug};
use atp_harness::export::{export_tree, load_tree, TreeFormat};
use atp_harness::wug::SuffixClasses;
use atp_harness::ExperimentSpec;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "atp",
    version,
    about = "Tolerance-gated decision-tree learner for inflectional morphology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a tree on a dataset and write it as JSON.
    Train(TrainArgs),
    /// Inflect a lemma with a trained tree.
    Predict(PredictArgs),
    /// Which rules simulated children acquire at each vocabulary stage.
    Acquisition(ExperimentArgs),
    /// Held-out accuracy, training-irregular accuracy and errors per stage.
    Growth(ExperimentArgs),
    /// Wug-test production probabilities and correlations.
    Wug(WugArgs),
    /// Write a trained tree as JSON or Graphviz DOT.
    ExportTree(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalogyArg {
    ApplyChange,
    Verbatim,
}

impl From<AnalogyArg> for AnalogyMode {
    fn from(a: AnalogyArg) -> Self {
        match a {
            AnalogyArg::ApplyChange => AnalogyMode::ApplyChange,
            AnalogyArg::Verbatim => AnalogyMode::Verbatim,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    /// Only suffixations may be rules.
    Suffixation,
    /// Any change may be a rule.
    Any,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    FrequencyWeighted,
    LogBinned,
    TopN,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassesArg {
    German,
    Changes,
}

#[derive(Args)]
struct LearnerArgs {
    /// Longest lemma ending considered by feature induction.
    #[arg(long, default_value_t = 3)]
    max_ending_len: usize,
    #[arg(long, value_enum, default_value = "suffixation")]
    rule_changes: RuleArg,
}

impl LearnerArgs {
    fn config(&self) -> TrainConfig {
        TrainConfig {
            max_ending_len: self.max_ending_len,
            rule_changes: match self.rule_changes {
                RuleArg::Suffixation => RuleChanges::Suffixation,
                RuleArg::Any => RuleChanges::Any,
            },
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    sample: Option<Scheme>,
    /// Sample size for frequency-weighted and top-n sampling.
    #[arg(long, default_value_t = 400)]
    vocab_size: usize,
    #[arg(long, default_value_t = 20)]
    bins: usize,
    #[arg(long, default_value_t = 50)]
    per_bin: usize,
    /// Frequency jitter range `lo:hi` for top-n sampling.
    #[arg(long, value_parser = parse_range, default_value = "0:5")]
    jitter: (f64, f64),
}

impl SampleArgs {
    fn plan(&self, default: Scheme) -> SamplePlan {
        match self.sample.unwrap_or(default) {
            Scheme::FrequencyWeighted => SamplePlan::FrequencyWeighted { n: self.vocab_size },
            Scheme::LogBinned => SamplePlan::LogBinned {
                bins: self.bins,
                per_bin: self.per_bin,
            },
            Scheme::TopN => SamplePlan::TopN {
                n: self.vocab_size,
                jitter: self.jitter,
            },
        }
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = lo.parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = 100)]
    children: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, value_enum, default_value = "apply-change")]
    analogy_mode: AnalogyArg,
    #[command(flatten)]
    learner: LearnerArgs,
    #[command(flatten)]
    sample: SampleArgs,
}

impl RunArgs {
    fn spec(&self, default: Scheme) -> ExperimentSpec {
        ExperimentSpec {
            dataset: self.dataset.clone(),
            plan: self.sample.plan(default),
            children: self.children,
            test_set: None,
            stimuli: None,
            human_table: None,
            out_dir: self.out.clone(),
            seed: self.seed,
            workers: self.workers,
            train: self.learner.config(),
            analogy: self.analogy_mode.into(),
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Held-out test set (required by `growth`).
    #[arg(long)]
    test: Option<PathBuf>,
}

#[derive(Args)]
struct WugArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Stimuli: `lemma<TAB>gender-or-?<TAB>R|NR`.
    #[arg(long)]
    stimuli: PathBuf,
    /// Human production table: `stimulus,suffix,probability`.
    #[arg(long)]
    human: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "german")]
    suffix_classes: ClassesArg,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Tree file to write.
    #[arg(long)]
    out: PathBuf,
    /// Train on a frequency-weighted sample of this size instead of the
    /// whole dataset.
    #[arg(long)]
    vocab_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    learner: LearnerArgs,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    lemma: String,
    /// Features known to hold, comma separated.
    #[arg(long, value_delimiter = ',')]
    features: Vec<String>,
    /// Declared features whose value is unknown, comma separated.
    #[arg(long, value_delimiter = ',')]
    unknown: Vec<String>,
    #[arg(long, value_enum, default_value = "apply-change")]
    analogy_mode: AnalogyArg,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long, value_enum, default_value = "dot")]
    format: TreeFormat,
    #[arg(long)]
    out: PathBuf,
}

fn report(written: Vec<PathBuf>) {
    for path in written {
        println!("{}", path.display());
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Train(args) => {
            let mut ds = load_dataset(&args.dataset)?;
            if let Some(n) = args.vocab_size {
                ds = sample_frequency_weighted(&ds, n, args.seed)?;
            }
            let tree = train(&ds.instances, &ds.declared_feature_tags, &args.learner.config())?;
            export_tree(&tree, TreeFormat::Json, &args.out)?;
            println!(
                "{} leaves, {} memorized, rules: {}",
                tree.leaf_count(),
                tree.memorized_count(),
                tree.productive_changes()
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
        }
        Command::Predict(args) => {
            let tree = load_tree(&args.tree)?;
            let unknown: BTreeSet<String> = args.unknown.into_iter().collect();
            let known: BTreeSet<String> = args.features.into_iter().collect();
            for tag in known.iter().chain(&unknown) {
                if !tree.declared.contains(tag) {
                    bail!("feature `{tag}` is not declared by the tree");
                }
            }
            let query = Query::new(Word::from(args.lemma.as_str()), known, unknown)?;
            let out = inflect(&tree, &query, args.analogy_mode.into())?;
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Acquisition(args) => {
            report(write_acquisition(&args.run.spec(Scheme::LogBinned))?);
        }
        Command::Growth(args) => {
            let mut spec = args.run.spec(Scheme::LogBinned);
            spec.test_set = Some(args.test.context("growth needs --test")?);
            report(write_growth(&spec)?);
        }
        Command::Wug(args) => {
            let mut spec = args.run.spec(Scheme::FrequencyWeighted);
            spec.stimuli = Some(args.stimuli);
            spec.human_table = args.human;
            let classes = match args.suffix_classes {
                ClassesArg::German => SuffixClasses::German,
                ClassesArg::Changes => SuffixClasses::Changes,
            };
            report(write_wug(&spec, classes)?);
        }
        Command::ExportTree(args) => {
            let tree = load_tree(&args.tree)?;
            export_tree(&tree, args.format, &args.out)?;
        }
    }
    Ok(())
}
