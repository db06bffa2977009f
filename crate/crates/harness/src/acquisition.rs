//! Which rules each simulated child has acquired at each vocabulary size.
//!
//! A change counts as acquired when it is the rule of at least one leaf,
//! so a suffix productive only in a subcategory (German `-er` under
//! masculine nouns) still counts.

use std::collections::{BTreeMap, BTreeSet};

use atp_core::corpus::{Dataset, SamplePlan};
use atp_core::{Change, TrainConfig};
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiment::simulate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionRow {
    pub child: usize,
    pub stage: usize,
    pub vocab_size: usize,
    pub change: String,
    pub acquired: u8,
}

/// Fraction of children that acquired a change at a stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionSummary {
    pub stage: usize,
    pub mean_vocab_size: f64,
    pub change: String,
    pub fraction: f64,
}

/// The changes tracked by the table: every change in the dataset that may
/// become a rule.
pub fn tracked_changes(ds: &Dataset, config: &TrainConfig) -> BTreeSet<Change> {
    ds.instances
        .iter()
        .map(|i| i.change())
        .filter(|c| config.rule_changes.allows(c))
        .collect()
}

pub fn run_acquisition(
    ds: &Dataset,
    plan: &SamplePlan,
    children: usize,
    seed: u64,
    config: &TrainConfig,
    pool: &ThreadPool,
) -> Result<Vec<AcquisitionRow>> {
    let tracked = tracked_changes(ds, config);
    let per_stage = simulate(ds, plan, children, seed, config, pool, |c| {
        let productive = c.tree.productive_changes();
        Ok(tracked
            .iter()
            .map(|change| AcquisitionRow {
                child: c.child,
                stage: c.stage,
                vocab_size: c.vocabulary.len(),
                change: change.to_string(),
                acquired: u8::from(productive.contains(change)),
            })
            .collect::<Vec<_>>())
    })?;
    Ok(per_stage.into_iter().flatten().collect())
}

pub fn summarize(rows: &[AcquisitionRow]) -> Vec<AcquisitionSummary> {
    // (stage, change) -> (children, acquired, total vocabulary)
    let mut acc: BTreeMap<(usize, &str), (usize, usize, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry((r.stage, r.change.as_str())).or_default();
        e.0 += 1;
        e.1 += usize::from(r.acquired);
        e.2 += r.vocab_size;
    }
    acc.into_iter()
        .map(|((stage, change), (n, acquired, vocab))| AcquisitionSummary {
            stage,
            mean_vocab_size: vocab as f64 / n as f64,
            change: change.to_string(),
            fraction: acquired as f64 / n as f64,
        })
        .collect()
}

/// Fraction of children with `change` acquired at `stage`.
pub fn fraction_acquired(rows: &[AcquisitionRow], stage: usize, change: &str) -> f64 {
    let at: Vec<&AcquisitionRow> = rows.iter().filter(|r| r.stage == stage && r.change == change).collect();
    if at.is_empty() {
        return 0.0;
    }
    at.iter().filter(|r| r.acquired == 1).count() as f64 / at.len() as f64
}
