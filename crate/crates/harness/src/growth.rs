//! Held-out accuracy as the vocabulary grows, the accuracy on irregulars
//! the child has been trained on, and a taxonomy of test errors.

use atp_core::corpus::{Dataset, SamplePlan};
use atp_core::{inflect, AnalogyMode, Change, Instance, LearnedTree, Provenance, Query, TrainConfig};
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiment::simulate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub child: usize,
    pub stage: usize,
    pub vocab_size: usize,
    pub test_items: usize,
    pub test_accuracy: f64,
    /// Irregular instances in this stage's training vocabulary.
    pub train_irregulars: usize,
    /// Accuracy on them; empty when there are none.
    pub train_irregular_accuracy: Option<f64>,
    /// Rules of the stage's tree, space separated.
    pub rules: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemClass {
    Regular,
    Irregular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// A rule with a regular change produced the wrong form.
    OverRegularization,
    /// An irregular pattern was used although a rule leaf was compatible.
    Irregularization,
    /// Analogy with no compatible rule to fall back on.
    Guess,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 3] = [
        ErrorKind::OverRegularization,
        ErrorKind::Irregularization,
        ErrorKind::Guess,
    ];
}

/// Count of test errors of one kind on one class of items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub child: usize,
    pub stage: usize,
    pub item: ItemClass,
    pub kind: ErrorKind,
    pub count: usize,
}

#[derive(Debug, Clone, Default)]
pub struct GrowthTables {
    pub growth: Vec<GrowthRow>,
    pub errors: Vec<ErrorRow>,
}

fn is_regular_change(ds: &Dataset, change: &Change) -> bool {
    match &ds.regular_changes {
        Some(regular) => regular.contains(change),
        None => change.is_suffixation(),
    }
}

fn query_for(inst: &Instance) -> Query {
    Query {
        lemma: inst.lemma.clone(),
        known_features: inst.features.clone(),
        unknown_features: Default::default(),
    }
}

/// Classifies a wrong production. `regular` decides whether a change is
/// regular.
pub fn classify_error(
    provenance: &Provenance,
    compatible_rules: usize,
    regular: impl Fn(&Change) -> bool,
) -> ErrorKind {
    match provenance {
        Provenance::Rule { change, .. } if regular(change) => ErrorKind::OverRegularization,
        Provenance::Analogy { .. } | Provenance::Memorized if compatible_rules == 0 => ErrorKind::Guess,
        _ => ErrorKind::Irregularization,
    }
}

/// Accuracy of `tree` on `items`, with error counts indexed by item class
/// and kind.
fn evaluate(
    tree: &LearnedTree,
    items: &[Instance],
    reference: &Dataset,
    mode: AnalogyMode,
) -> Result<(usize, [[usize; 3]; 2])> {
    let mut correct = 0;
    let mut errors = [[0usize; 3]; 2];
    for inst in items {
        let out = inflect(tree, &query_for(inst), mode)?;
        if out.inflection == inst.inflection {
            correct += 1;
            continue;
        }
        let item = usize::from(reference.is_irregular(inst));
        let kind = classify_error(&out.provenance, out.compatible_rules, |c| {
            is_regular_change(reference, c)
        });
        errors[item][kind as usize] += 1;
    }
    Ok((correct, errors))
}

#[allow(clippy::too_many_arguments)]
pub fn run_accuracy_growth(
    ds: &Dataset,
    test: &Dataset,
    plan: &SamplePlan,
    children: usize,
    seed: u64,
    config: &TrainConfig,
    mode: AnalogyMode,
    pool: &ThreadPool,
) -> Result<GrowthTables> {
    let per_stage = simulate(ds, plan, children, seed, config, pool, |c| {
        let (correct, errors) = evaluate(&c.tree, &test.instances, test, mode)?;
        let irregulars: Vec<Instance> = c
            .vocabulary
            .instances
            .iter()
            .filter(|i| c.vocabulary.is_irregular(i))
            .cloned()
            .collect();
        let (irregular_correct, _) = evaluate(&c.tree, &irregulars, &c.vocabulary, mode)?;
        let rules: Vec<String> = c.tree.productive_changes().iter().map(Change::to_string).collect();
        let row = GrowthRow {
            child: c.child,
            stage: c.stage,
            vocab_size: c.vocabulary.len(),
            test_items: test.len(),
            test_accuracy: if test.is_empty() {
                0.0
            } else {
                correct as f64 / test.len() as f64
            },
            train_irregulars: irregulars.len(),
            train_irregular_accuracy: (!irregulars.is_empty())
                .then(|| irregular_correct as f64 / irregulars.len() as f64),
            rules: rules.join(" "),
        };
        let mut error_rows = Vec::new();
        for (item_idx, item) in [ItemClass::Regular, ItemClass::Irregular].into_iter().enumerate() {
            for kind in ErrorKind::ALL {
                error_rows.push(ErrorRow {
                    child: c.child,
                    stage: c.stage,
                    item,
                    kind,
                    count: errors[item_idx][kind as usize],
                });
            }
        }
        Ok((row, error_rows))
    })?;
    let mut tables = GrowthTables::default();
    for (row, errors) in per_stage {
        tables.growth.push(row);
        tables.errors.extend(errors);
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use atp_core::inflect::PathStep;
    use atp_core::Word;

    #[test]
    fn error_taxonomy() {
        let regular = |c: &Change| c.is_suffixation();
        let rule = Provenance::Rule {
            path: Vec::<PathStep>::new(),
            change: Change::suffixation("d"),
        };
        assert_eq!(classify_error(&rule, 1, regular), ErrorKind::OverRegularization);
        let analogy = Provenance::Analogy {
            neighbor: Word::from("sɪŋ"),
            change: Change::new(2, "æŋ"),
        };
        assert_eq!(classify_error(&analogy, 0, regular), ErrorKind::Guess);
        assert_eq!(classify_error(&analogy, 2, regular), ErrorKind::Irregularization);
        let stem_rule = Provenance::Rule {
            path: Vec::new(),
            change: Change::new(2, "æŋ"),
        };
        assert_eq!(classify_error(&stem_rule, 1, regular), ErrorKind::Irregularization);
    }
}
