//! Wug-test simulation: many models trained on frequency-weighted samples
//! inflect nonce nouns, and each suffix's production probability is the
//! fraction of models producing it.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use atp_core::corpus::{derive_seed, sample_frequency_weighted, Dataset};
use atp_core::stats::spearman;
use atp_core::{inflect, AnalogyMode, Change, Error as CoreError, Query, TrainConfig, Word};
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::error::{io_at, HarnessError, Result};
pub use crate::fixtures::Stimulus;

/// How produced changes are grouped into reported suffixes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuffixClasses {
    /// German plural classes: -(e)n, -e, -∅, -er, -s and other.
    #[default]
    German,
    /// Every distinct change is its own suffix.
    Changes,
}

pub const GERMAN_CLASSES: [&str; 6] = ["-(e)n", "-e", "-∅", "-er", "-s", "other"];

/// The German plural class of a change. Stem changes fall under "other".
pub fn german_class(change: &Change) -> &'static str {
    if !change.is_suffixation() {
        return "other";
    }
    match change.suffix.to_string().as_str() {
        "n" | "en" => "-(e)n",
        "e" => "-e",
        "" => "-∅",
        "er" => "-er",
        "s" => "-s",
        _ => "other",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Every declared feature unknown.
    Unknown,
    /// The stimulus's own gender given.
    Given,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StimulusClass {
    R,
    NR,
}

impl From<bool> for StimulusClass {
    fn from(rhyme: bool) -> Self {
        if rhyme {
            StimulusClass::R
        } else {
            StimulusClass::NR
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductionRow {
    pub stimulus: String,
    pub class: StimulusClass,
    pub condition: Condition,
    pub suffix: String,
    pub probability: f64,
}

/// Mean production probability of a suffix over one stimulus class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub condition: Condition,
    pub class: StimulusClass,
    pub suffix: String,
    pub mean_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub condition: Condition,
    pub suffix: String,
    pub n: usize,
    pub rho: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WugProductionTable {
    /// Sorted by condition, stimulus order, then suffix order.
    pub rows: Vec<ProductionRow>,
    pub suffixes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct WugConfig {
    pub models: usize,
    pub sample_size: usize,
    pub seed: u64,
    pub train: TrainConfig,
    pub analogy: AnalogyMode,
    pub classes: SuffixClasses,
}

/// Parses a stimuli file: `lemma<TAB>gender-or-?<TAB>R|NR` per line. Blank
/// lines and `#` comments are skipped.
pub fn parse_stimuli(text: &str, source_name: &str) -> Result<Vec<Stimulus>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| HarnessError::Format {
            source_name: source_name.to_string(),
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
        }
        if fields[0].is_empty() {
            return Err(err("empty lemma".into()));
        }
        let gender = match fields[1] {
            "?" | "" => None,
            g => Some(g.to_string()),
        };
        let rhyme = match fields[2] {
            "R" => true,
            "NR" => false,
            other => return Err(err(format!("class must be R or NR, found `{other}`"))),
        };
        out.push(Stimulus {
            lemma: fields[0].to_string(),
            gender,
            rhyme,
        });
    }
    Ok(out)
}

pub fn load_stimuli(path: &Path) -> Result<Vec<Stimulus>> {
    let text = fs::read_to_string(path).map_err(io_at(path))?;
    parse_stimuli(&text, &path.display().to_string())
}

#[derive(Debug, Deserialize)]
struct HumanRecord {
    stimulus: String,
    suffix: String,
    probability: f64,
}

/// Parses a human production table, `stimulus,suffix,probability`, with an
/// optional header row.
pub fn parse_human_table(text: &str) -> Result<BTreeMap<(String, String), f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = BTreeMap::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        if idx == 0 && record.get(2) == Some("probability") {
            continue;
        }
        let row: HumanRecord = record.deserialize(None)?;
        out.insert((row.stimulus, row.suffix), row.probability);
    }
    Ok(out)
}

pub fn load_human_table(path: &Path) -> Result<BTreeMap<(String, String), f64>> {
    let text = fs::read_to_string(path).map_err(io_at(path))?;
    parse_human_table(&text)
}

/// The queries a stimulus is presented under.
fn conditions(stimulus: &Stimulus, declared: &BTreeSet<String>) -> Result<Vec<(Condition, Query)>> {
    let lemma = Word::from(stimulus.lemma.as_str());
    let mut out = vec![(
        Condition::Unknown,
        Query::new(lemma.clone(), BTreeSet::new(), declared.clone())?,
    )];
    if let Some(gender) = &stimulus.gender {
        if !declared.contains(gender) {
            return Err(HarnessError::Spec(format!(
                "stimulus `{}` has undeclared gender `{gender}`",
                stimulus.lemma
            )));
        }
        out.push((
            Condition::Given,
            Query::new(lemma, BTreeSet::from([gender.clone()]), BTreeSet::new())?,
        ));
    }
    Ok(out)
}

/// Trains `config.models` models and tabulates their productions.
pub fn run_wug(
    ds: &Dataset,
    stimuli: &[Stimulus],
    config: &WugConfig,
    pool: &ThreadPool,
) -> Result<WugProductionTable> {
    if config.models == 0 {
        return Err(HarnessError::Spec("at least one model is required".into()));
    }
    if stimuli.is_empty() {
        return Err(HarnessError::Spec("no stimuli".into()));
    }
    let declared: BTreeSet<String> = ds.declared_feature_tags.iter().cloned().collect();
    let queries: Vec<Vec<(Condition, Query)>> = stimuli
        .iter()
        .map(|s| conditions(s, &declared))
        .collect::<Result<_>>()?;

    // Per model, per stimulus: the change produced under each condition.
    type Productions = Vec<Vec<(Condition, Change)>>;
    let per_model: Result<Vec<Productions>> = pool.install(|| {
        (0..config.models)
            .into_par_iter()
            .map(|m| {
                let sample = sample_frequency_weighted(ds, config.sample_size, derive_seed(config.seed, m as u64))?;
                let tree = atp_core::train(&sample.instances, &sample.declared_feature_tags, &config.train)?;
                queries
                    .iter()
                    .map(|qs| {
                        qs.iter()
                            .map(|(cond, q)| {
                                let out = inflect(&tree, q, config.analogy)?;
                                Ok::<_, CoreError>((*cond, out.change_from(&q.lemma)))
                            })
                            .collect::<Result<Vec<_>, CoreError>>()
                    })
                    .collect::<Result<Vec<_>, CoreError>>()
                    .map_err(HarnessError::from)
            })
            .collect()
    });
    let per_model = per_model?;

    let label = |change: &Change| -> String {
        match config.classes {
            SuffixClasses::German => german_class(change).to_string(),
            SuffixClasses::Changes => change.to_string(),
        }
    };
    // (condition, stimulus index, suffix) -> models producing it
    let mut counts: BTreeMap<(Condition, usize, String), usize> = BTreeMap::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for model in &per_model {
        for (s, produced) in model.iter().enumerate() {
            for (cond, change) in produced {
                let suffix = label(change);
                seen.insert(suffix.clone());
                *counts.entry((*cond, s, suffix)).or_default() += 1;
            }
        }
    }
    let suffixes: Vec<String> = match config.classes {
        SuffixClasses::German => GERMAN_CLASSES.iter().map(|s| s.to_string()).collect(),
        SuffixClasses::Changes => seen.into_iter().collect(),
    };

    let mut rows = Vec::new();
    for condition in [Condition::Unknown, Condition::Given] {
        for (s, stimulus) in stimuli.iter().enumerate() {
            if !queries[s].iter().any(|(c, _)| *c == condition) {
                continue;
            }
            for suffix in &suffixes {
                let k = counts.get(&(condition, s, suffix.clone())).copied().unwrap_or(0);
                rows.push(ProductionRow {
                    stimulus: stimulus.lemma.clone(),
                    class: stimulus.rhyme.into(),
                    condition,
                    suffix: suffix.clone(),
                    probability: k as f64 / config.models as f64,
                });
            }
        }
    }
    Ok(WugProductionTable { rows, suffixes })
}

impl WugProductionTable {
    /// Mean production probability per condition, stimulus class and
    /// suffix (the %R / %NR columns).
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut acc: BTreeMap<(Condition, StimulusClass, usize), (f64, usize)> = BTreeMap::new();
        for row in &self.rows {
            let suffix = self
                .suffixes
                .iter()
                .position(|s| *s == row.suffix)
                .unwrap_or(usize::MAX);
            let e = acc.entry((row.condition, row.class, suffix)).or_default();
            e.0 += row.probability;
            e.1 += 1;
        }
        acc.into_iter()
            .map(|((condition, class, suffix), (sum, n))| SummaryRow {
                condition,
                class,
                suffix: self.suffixes[suffix].clone(),
                mean_probability: sum / n as f64,
            })
            .collect()
    }

    /// Sum of production probabilities per (condition, stimulus).
    pub fn stimulus_totals(&self) -> BTreeMap<(Condition, String), f64> {
        let mut out: BTreeMap<(Condition, String), f64> = BTreeMap::new();
        for row in &self.rows {
            *out.entry((row.condition, row.stimulus.clone())).or_default() += row.probability;
        }
        out
    }

    /// This table in the human-table format for one condition.
    pub fn as_human_table(&self, condition: Condition) -> BTreeMap<(String, String), f64> {
        self.rows
            .iter()
            .filter(|r| r.condition == condition)
            .map(|r| ((r.stimulus.clone(), r.suffix.clone()), r.probability))
            .collect()
    }

    /// Spearman's ρ per condition and suffix between model and human
    /// probabilities, over stimuli present in both. Suffixes where either
    /// side is constant have no defined ρ and are left out.
    pub fn correlations(&self, human: &BTreeMap<(String, String), f64>) -> Result<Vec<CorrelationRow>> {
        let mut out = Vec::new();
        for condition in [Condition::Unknown, Condition::Given] {
            for suffix in &self.suffixes {
                let (model, people): (Vec<f64>, Vec<f64>) = self
                    .rows
                    .iter()
                    .filter(|r| r.condition == condition && &r.suffix == suffix)
                    .filter_map(|r| {
                        human
                            .get(&(r.stimulus.clone(), suffix.clone()))
                            .map(|&h| (r.probability, h))
                    })
                    .unzip();
                if model.len() < 2 {
                    continue;
                }
                match spearman(&model, &people) {
                    Ok(c) => out.push(CorrelationRow {
                        condition,
                        suffix: suffix.clone(),
                        n: c.n,
                        rho: c.rho,
                        significant: c.significant,
                    }),
                    Err(CoreError::UndefinedCorrelation(_)) => {
                        log::info!("no correlation for {suffix} ({condition:?}): constant probabilities");
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn german_classes() {
        assert_eq!(german_class(&Change::suffixation("en")), "-(e)n");
        assert_eq!(german_class(&Change::suffixation("n")), "-(e)n");
        assert_eq!(german_class(&Change::suffixation("")), "-∅");
        assert_eq!(german_class(&Change::suffixation("s")), "-s");
        assert_eq!(german_class(&Change::suffixation("ern")), "other");
        assert_eq!(german_class(&Change::new(1, "en")), "other");
    }

    #[test]
    fn stimuli_parse() {
        let s = parse_stimuli("# c\nbral\tfem\tR\nplaupf\t?\tNR\n", "s").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].gender.as_deref(), Some("fem"));
        assert!(s[1].gender.is_none() && !s[1].rhyme);
        let err = parse_stimuli("bral\tfem\tX\n", "s").unwrap_err();
        assert!(err.to_string().contains("s:1"));
    }

    #[test]
    fn human_table_with_and_without_header() {
        let a = parse_human_table("stimulus,suffix,probability\nbral,-e,0.5\n").unwrap();
        let b = parse_human_table("bral,-e,0.5\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a[&("bral".into(), "-e".into())], 0.5);
    }
}
