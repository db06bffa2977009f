use std::path::{Path, PathBuf};

use atp_core::corpus::{derive_seed, load_dataset, Dataset, SamplePlan};
use atp_core::{train, AnalogyMode, LearnedTree, TrainConfig};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::acquisition::{run_acquisition, summarize};
use crate::error::{HarnessError, Result};
use crate::growth::run_accuracy_growth;
use crate::tables::write_csv;
use crate::wug::{load_human_table, load_stimuli, run_wug, SuffixClasses, WugConfig};

/// Everything an experiment run needs besides its data.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub dataset: PathBuf,
    pub plan: SamplePlan,
    pub children: usize,
    pub test_set: Option<PathBuf>,
    pub stimuli: Option<PathBuf>,
    pub human_table: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
    pub train: TrainConfig,
    pub analogy: AnalogyMode,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.children == 0 {
            return Err(HarnessError::Spec("at least one simulated child is required".into()));
        }
        self.plan.validate()?;
        Ok(())
    }
}

/// One simulated child at one vocabulary stage.
#[derive(Debug, Clone)]
pub struct Child {
    pub child: usize,
    /// 1-based.
    pub stage: usize,
    pub vocabulary: Dataset,
    pub tree: LearnedTree,
}

/// Thread pool with `workers` threads (0 = rayon default).
pub fn pool(workers: usize) -> Result<ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers).build()?)
}

/// Draws every child's vocabularies and trains a tree per stage, then
/// hands each to `observe`. Results come back in (child, stage) order
/// whatever the scheduling.
pub fn simulate<T, F>(
    ds: &Dataset,
    plan: &SamplePlan,
    children: usize,
    seed: u64,
    config: &TrainConfig,
    pool: &ThreadPool,
    observe: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Child) -> Result<T> + Sync,
{
    plan.validate()?;
    let per_child: Result<Vec<Vec<T>>> = pool.install(|| {
        (0..children)
            .into_par_iter()
            .map(|child| {
                let stages = plan.draw(ds, derive_seed(seed, child as u64))?;
                stages
                    .into_iter()
                    .enumerate()
                    .map(|(i, vocabulary)| {
                        let tree = train(&vocabulary.instances, &vocabulary.declared_feature_tags, config)?;
                        observe(&Child {
                            child,
                            stage: i + 1,
                            vocabulary,
                            tree,
                        })
                    })
                    .collect()
            })
            .collect()
    });
    Ok(per_child?.into_iter().flatten().collect())
}

/// Files written by an experiment, in writing order.
pub type Written = Vec<PathBuf>;

fn out_file(spec: &ExperimentSpec, name: &str) -> PathBuf {
    spec.out_dir.join(name)
}

fn require<'a>(path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| HarnessError::Spec(format!("{what} is required for this experiment")))
}

/// Writes `acquisition.csv` (child, stage, vocab_size, change, acquired)
/// and `acquisition_summary.csv`.
pub fn write_acquisition(spec: &ExperimentSpec) -> Result<Written> {
    spec.validate()?;
    let ds = load_dataset(&spec.dataset)?;
    let rows = run_acquisition(
        &ds,
        &spec.plan,
        spec.children,
        spec.seed,
        &spec.train,
        &pool(spec.workers)?,
    )?;
    let (a, b) = (
        out_file(spec, "acquisition.csv"),
        out_file(spec, "acquisition_summary.csv"),
    );
    write_csv(&a, &rows)?;
    write_csv(&b, &summarize(&rows))?;
    Ok(vec![a, b])
}

/// Writes `growth.csv` and `errors.csv`.
pub fn write_growth(spec: &ExperimentSpec) -> Result<Written> {
    spec.validate()?;
    let ds = load_dataset(&spec.dataset)?;
    let test = load_dataset(require(&spec.test_set, "a test set")?)?;
    let tables = run_accuracy_growth(
        &ds,
        &test,
        &spec.plan,
        spec.children,
        spec.seed,
        &spec.train,
        spec.analogy,
        &pool(spec.workers)?,
    )?;
    let (a, b) = (out_file(spec, "growth.csv"), out_file(spec, "errors.csv"));
    write_csv(&a, &tables.growth)?;
    write_csv(&b, &tables.errors)?;
    Ok(vec![a, b])
}

/// Writes `wug_productions.csv`, `wug_summary.csv` and, with a human
/// table, `wug_correlations.csv`. Each simulated child is one model; the
/// plan must be frequency-weighted.
pub fn write_wug(spec: &ExperimentSpec, classes: SuffixClasses) -> Result<Written> {
    spec.validate()?;
    let SamplePlan::FrequencyWeighted { n } = spec.plan else {
        return Err(HarnessError::Spec(
            "Wug models are trained on frequency-weighted samples".into(),
        ));
    };
    let ds = load_dataset(&spec.dataset)?;
    let stimuli = load_stimuli(require(&spec.stimuli, "a stimuli file")?)?;
    let config = WugConfig {
        models: spec.children,
        sample_size: n,
        seed: spec.seed,
        train: spec.train.clone(),
        analogy: spec.analogy,
        classes,
    };
    let table = run_wug(&ds, &stimuli, &config, &pool(spec.workers)?)?;
    let (a, b) = (out_file(spec, "wug_productions.csv"), out_file(spec, "wug_summary.csv"));
    write_csv(&a, &table.rows)?;
    write_csv(&b, &table.summary())?;
    let mut written = vec![a, b];
    if let Some(path) = &spec.human_table {
        let human = load_human_table(path)?;
        let c = out_file(spec, "wug_correlations.csv");
        write_csv(&c, &table.correlations(&human)?)?;
        written.push(c);
    }
    Ok(written)
}
