//! Dataset files and the vocabulary sampling schemes used to simulate
//! children.
//!
//! A dataset file is UTF-8, one instance per row with tab-separated lemma,
//! tags, inflection and frequency (tabs shown as `<TAB>`):
//!
//! ```text
//! #features: past,pl
//! #regular: +t,+d,+ɪd
//! wɔk<TAB>past<TAB>wɔkt<TAB>311
//! ```
//!
//! `#features:` declares the categorical tags rows may use. `#regular:`
//! optionally lists the changes that count as regular when experiments
//! separate regular from irregular items; without it, any change that
//! deletes segments is irregular. Other `#` lines are comments.
//!
//! All randomness comes from ChaCha8 streams seeded with a `u64`, so a seed
//! reproduces the same sample on every platform.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use log::warn;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Change, FeatureId, Instance, Word};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub instances: Vec<Instance>,
    pub declared_feature_tags: BTreeSet<FeatureId>,
    /// Changes declared regular by a `#regular:` header.
    pub regular_changes: Option<BTreeSet<Change>>,
}

impl Dataset {
    /// Builds a dataset, checking that every tag is declared and every
    /// frequency is a non-negative number.
    pub fn new(
        name: impl Into<String>,
        instances: Vec<Instance>,
        declared_feature_tags: BTreeSet<FeatureId>,
    ) -> Result<Self> {
        let name = name.into();
        for (i, inst) in instances.iter().enumerate() {
            check_instance(inst, &declared_feature_tags).map_err(|message| Error::Validation {
                source_name: name.clone(),
                line: i + 1,
                message,
            })?;
        }
        Ok(Dataset {
            name,
            instances,
            declared_feature_tags,
            regular_changes: None,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Whether the instance's change is irregular: not in the declared
    /// regular set, or, with no declaration, not pure suffixation.
    pub fn is_irregular(&self, inst: &Instance) -> bool {
        let change = inst.change();
        match &self.regular_changes {
            Some(regular) => !regular.contains(&change),
            None => !change.is_suffixation(),
        }
    }

    /// A dataset with the same metadata and the given instances.
    pub fn with_instances(&self, instances: Vec<Instance>) -> Dataset {
        Dataset {
            name: self.name.clone(),
            instances,
            declared_feature_tags: self.declared_feature_tags.clone(),
            regular_changes: self.regular_changes.clone(),
        }
    }

    /// Only the instances for which `keep` holds.
    pub fn filter(&self, keep: impl Fn(&Instance) -> bool) -> Dataset {
        self.with_instances(self.instances.iter().filter(|i| keep(i)).cloned().collect())
    }

    /// Parses dataset text. `name` labels error messages.
    pub fn parse(text: &str, name: &str) -> Result<Dataset> {
        let mut declared = BTreeSet::new();
        let mut regular: Option<BTreeSet<Change>> = None;
        let mut rows: Vec<(usize, Instance)> = Vec::new();
        let parse_err = |line: usize, message: String| Error::Parse {
            source_name: name.to_string(),
            line,
            message,
        };

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim_start();
                if let Some(tags) = rest.strip_prefix("features:") {
                    for tag in split_list(tags) {
                        check_tag(tag).map_err(|m| parse_err(line_no, m))?;
                        declared.insert(tag.to_string());
                    }
                } else if let Some(changes) = rest.strip_prefix("regular:") {
                    let set = regular.get_or_insert_with(BTreeSet::new);
                    for c in split_list(changes) {
                        let change = c
                            .parse::<Change>()
                            .map_err(|e| parse_err(line_no, format!("bad change `{c}` in #regular: {e}")))?;
                        set.insert(change);
                    }
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }

            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(parse_err(
                    line_no,
                    format!("expected 4 tab-separated fields, found {}", fields.len()),
                ));
            }
            let (lemma, feats, inflection, freq) =
                (fields[0].trim(), fields[1].trim(), fields[2].trim(), fields[3].trim());
            if lemma.is_empty() {
                return Err(parse_err(line_no, "empty lemma".into()));
            }
            if inflection.is_empty() {
                return Err(parse_err(line_no, "empty inflection".into()));
            }
            let frequency: f64 = freq
                .parse()
                .map_err(|_| parse_err(line_no, format!("frequency `{freq}` is not a number")))?;
            let features: BTreeSet<FeatureId> = split_list(feats).map(str::to_string).collect();
            let inst = Instance {
                lemma: Word::from(lemma),
                features,
                inflection: Word::from(inflection),
                frequency,
            };
            rows.push((line_no, inst));
        }

        for (line, inst) in &rows {
            check_instance(inst, &declared).map_err(|message| Error::Validation {
                source_name: name.to_string(),
                line: *line,
                message,
            })?;
        }

        let instances = resolve_doublets(rows, name);
        Ok(Dataset {
            name: name.to_string(),
            instances,
            declared_feature_tags: declared,
            regular_changes: regular,
        })
    }

    /// Serializes in the file format read by [`Dataset::parse`].
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let tags: Vec<&str> = self.declared_feature_tags.iter().map(String::as_str).collect();
        let _ = writeln!(out, "#features: {}", tags.join(","));
        if let Some(regular) = &self.regular_changes {
            let changes: Vec<String> = regular.iter().map(Change::to_string).collect();
            let _ = writeln!(out, "#regular: {}", changes.join(","));
        }
        for inst in &self.instances {
            let feats: Vec<&str> = inst.features.iter().map(String::as_str).collect();
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                inst.lemma,
                feats.join(","),
                inst.inflection,
                inst.frequency
            );
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_tsv())?;
        Ok(())
    }
}

/// Reads and validates a dataset file.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    Dataset::parse(&text, &path.display().to_string())
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn check_tag(tag: &str) -> std::result::Result<(), String> {
    if tag.chars().any(|c| c.is_whitespace() || c == '?') {
        return Err(format!("feature tag `{tag}` contains whitespace or `?`"));
    }
    Ok(())
}

fn check_instance(inst: &Instance, declared: &BTreeSet<FeatureId>) -> std::result::Result<(), String> {
    if let Some(tag) = inst.features.iter().find(|t| !declared.contains(*t)) {
        return Err(format!("feature `{tag}` is not declared in a #features: header"));
    }
    if !inst.frequency.is_finite() || inst.frequency < 0.0 {
        return Err(format!("frequency {} must be finite and non-negative", inst.frequency));
    }
    Ok(())
}

/// Keeps one row per `(lemma, features)`: the most frequent, or the first
/// on a frequency tie. File order of the kept rows is preserved.
fn resolve_doublets(rows: Vec<(usize, Instance)>, name: &str) -> Vec<Instance> {
    let mut first: HashMap<(Word, BTreeSet<FeatureId>), usize> = HashMap::new();
    let mut kept: Vec<Option<(usize, Instance)>> = Vec::with_capacity(rows.len());
    for (line, inst) in rows {
        let key = (inst.lemma.clone(), inst.features.clone());
        match first.get(&key) {
            None => {
                first.insert(key, kept.len());
                kept.push(Some((line, inst)));
            }
            Some(&slot) => {
                let (old_line, old) = kept[slot].as_ref().expect("slot filled");
                let replace = inst.frequency > old.frequency;
                let (keep_line, drop_line, dropped) = if replace {
                    (line, *old_line, old.inflection.to_string())
                } else {
                    (*old_line, line, inst.inflection.to_string())
                };
                warn!(
                    "{name}:{drop_line}: doublet for `{}` dropped (`{dropped}`); keeping line {keep_line}",
                    inst.lemma
                );
                if replace {
                    kept[slot] = Some((line, inst));
                }
            }
        }
    }
    kept.into_iter().flatten().map(|(_, inst)| inst).collect()
}

/// A deterministic generator for one sampling stream.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of stream `index` under `master`, via the SplitMix64 finalizer.
/// Each stream's seed depends only on `(master, index)`, so adding streams
/// never changes existing ones.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `n` distinct instances, each draw picking among the remaining ones
/// with probability proportional to token frequency. Zero-frequency
/// instances are drawn only once every positive one is taken, uniformly
/// among themselves. The sample keeps input order.
pub fn sample_frequency_weighted(ds: &Dataset, n: usize, seed: u64) -> Result<Dataset> {
    if n > ds.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot draw {n} instances from a dataset of {}",
            ds.len()
        )));
    }
    let mut rng = rng_for(seed);
    // Efraimidis-Spirakis: the n largest keys ln(u)/w are a sequential
    // weighted draw without replacement.
    let mut keyed: Vec<(bool, f64, usize)> = ds
        .instances
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            let u: f64 = rng.gen();
            if inst.frequency > 0.0 {
                (true, (1.0 - u).ln() / inst.frequency, i)
            } else {
                (false, u, i)
            }
        })
        .collect();
    keyed.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.total_cmp(&a.1)).then(a.2.cmp(&b.2)));
    let mut chosen: Vec<usize> = keyed[..n].iter().map(|k| k.2).collect();
    chosen.sort_unstable();
    Ok(ds.with_instances(chosen.into_iter().map(|i| ds.instances[i].clone()).collect()))
}

/// Bin index (0 = lowest) of every instance under log-spaced frequency
/// boundaries, or equal-size rank bins when all frequencies coincide.
pub fn log_bins(ds: &Dataset, bins: usize) -> Vec<usize> {
    assert!(bins >= 1);
    let positive = ds.instances.iter().map(|i| i.frequency).filter(|&f| f > 0.0);
    let min = positive.clone().fold(f64::INFINITY, f64::min);
    let max = positive.fold(0.0, f64::max);
    let distinct = ds.instances.iter().any(|i| i.frequency != ds.instances[0].frequency);

    if !distinct || min >= max {
        if distinct {
            // Only one positive value: zeros low, positives high.
            return ds
                .instances
                .iter()
                .map(|i| if i.frequency > 0.0 { bins - 1 } else { 0 })
                .collect();
        }
        // Equal frequencies: rank bins in input order, first rows highest.
        let n = ds.len();
        return (0..n).map(|r| bins - 1 - (r * bins / n.max(1)).min(bins - 1)).collect();
    }

    let (lmin, width) = (min.ln(), (max.ln() - min.ln()) / bins as f64);
    ds.instances
        .iter()
        .map(|inst| {
            if inst.frequency <= 0.0 {
                0
            } else {
                (((inst.frequency.ln() - lmin) / width).floor() as usize).min(bins - 1)
            }
        })
        .collect()
}

/// Cumulative vocabularies grown one frequency bin at a time, highest bin
/// first: stage `i` adds `per_bin` instances drawn uniformly without
/// replacement from the `i`-th bin. Short bins contribute all their members.
pub fn sample_log_binned(ds: &Dataset, bins: usize, per_bin: usize, seed: u64) -> Result<Vec<Dataset>> {
    if bins == 0 || per_bin == 0 {
        return Err(Error::InvalidArgument("bins and per_bin must be positive".into()));
    }
    let assignment = log_bins(ds, bins);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); bins];
    for (i, &b) in assignment.iter().enumerate() {
        members[b].push(i);
    }

    let mut rng = rng_for(seed);
    let mut taken: Vec<usize> = Vec::new();
    let mut stages = Vec::with_capacity(bins);
    for (stage, bin) in (0..bins).rev().enumerate() {
        let pool = &members[bin];
        if pool.len() < per_bin {
            warn!(
                "{}: frequency bin {} has {} members, fewer than {per_bin}; taking all of them",
                ds.name,
                stage + 1,
                pool.len()
            );
            taken.extend_from_slice(pool);
        } else {
            taken.extend(
                index::sample(&mut rng, pool.len(), per_bin)
                    .into_iter()
                    .map(|j| pool[j]),
            );
        }
        let mut sorted = taken.clone();
        sorted.sort_unstable();
        stages.push(ds.with_instances(sorted.into_iter().map(|i| ds.instances[i].clone()).collect()));
    }
    Ok(stages)
}

/// Adds an independent uniform draw from `[lo, hi]` to every frequency.
pub fn jitter_frequencies(ds: &Dataset, lo: f64, hi: f64, seed: u64) -> Result<Dataset> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "jitter range [{lo}, {hi}] is empty or not finite"
        )));
    }
    let mut rng = rng_for(seed);
    let instances = ds
        .instances
        .iter()
        .map(|inst| {
            let delta = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
            Instance {
                frequency: inst.frequency + delta,
                ..inst.clone()
            }
        })
        .collect();
    Ok(ds.with_instances(instances))
}

/// The `n` most frequent instances after jittering; equal frequencies keep
/// input order.
pub fn sample_top_n(ds: &Dataset, n: usize, jitter: (f64, f64), seed: u64) -> Result<Dataset> {
    if n > ds.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot take the top {n} of a dataset of {}",
            ds.len()
        )));
    }
    let jittered = jitter_frequencies(ds, jitter.0, jitter.1, seed)?;
    let mut order: Vec<usize> = (0..jittered.len()).collect();
    order.sort_by(|&a, &b| {
        jittered.instances[b]
            .frequency
            .total_cmp(&jittered.instances[a].frequency)
            .then(a.cmp(&b))
    });
    let mut chosen = order[..n].to_vec();
    chosen.sort_unstable();
    Ok(ds.with_instances(chosen.into_iter().map(|i| jittered.instances[i].clone()).collect()))
}

/// How a simulated child's vocabulary is drawn from a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "scheme")]
pub enum SamplePlan {
    FrequencyWeighted { n: usize },
    LogBinned { bins: usize, per_bin: usize },
    TopN { n: usize, jitter: (f64, f64) },
}

impl SamplePlan {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SamplePlan::FrequencyWeighted { n } => n > 0,
            SamplePlan::LogBinned { bins, per_bin } => bins > 0 && per_bin > 0,
            SamplePlan::TopN { n, jitter } => n > 0 && jitter.0 <= jitter.1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid sample plan {self:?}")))
        }
    }

    /// The vocabularies this plan yields: one per stage for log-binned
    /// growth, a single one otherwise.
    pub fn draw(&self, ds: &Dataset, seed: u64) -> Result<Vec<Dataset>> {
        self.validate()?;
        match *self {
            SamplePlan::FrequencyWeighted { n } => Ok(vec![sample_frequency_weighted(ds, n, seed)?]),
            SamplePlan::LogBinned { bins, per_bin } => sample_log_binned(ds, bins, per_bin, seed),
            SamplePlan::TopN { n, jitter } => Ok(vec![sample_top_n(ds, n, jitter, seed)?]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags(t: &[&str]) -> BTreeSet<FeatureId> {
        t.iter().map(|s| s.to_string()).collect()
    }

    fn with_freqs(freqs: &[f64]) -> Dataset {
        let instances = freqs
            .iter()
            .enumerate()
            .map(|(i, &f)| Instance::new(&format!("w{i}"), Vec::<String>::new(), &format!("w{i}s"), f))
            .collect();
        Dataset::new("test", instances, BTreeSet::new()).unwrap()
    }

    #[test]
    fn parses_rows_in_order() {
        let text =
            "#features: past\n# a comment\nwalk\tpast\twalked\t311\ntalk\tpast\ttalked\t20\n\nsing\tpast\tsang\t4\n";
        let ds = Dataset::parse(text, "mem").unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.instances[0], Instance::new("walk", ["past"], "walked", 311.0));
        assert_eq!(ds.instances[2].lemma.to_string(), "sing");
        assert_eq!(ds.declared_feature_tags, tags(&["past"]));
        assert_eq!(ds.regular_changes, None);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Dataset::parse("#features: past\nwalk\tpast\t\t3\n", "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = Dataset::parse("#features: past\nwalk\tpast\twalked\n", "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = Dataset::parse("walk\tpast\twalked\tmany\n", "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = Dataset::parse("#features: past\n\nwalk\tpl\twalks\t3\n", "f").unwrap_err();
        assert!(matches!(err, Error::Validation { line: 3, .. }), "{err}");
        let err = Dataset::parse("walk\t\twalks\t-3\n", "f").unwrap_err();
        assert!(matches!(err, Error::Validation { line: 1, .. }));
    }

    #[test]
    fn doublets_keep_the_more_frequent_form() {
        let text =
            "#features: past\ndive\tpast\tdived\t3\ndive\tpast\tdove\t9\nrun\tpast\tran\t5\nrun\tpast\trunned\t5\n";
        let ds = Dataset::parse(text, "f").unwrap();
        let forms: Vec<String> = ds.instances.iter().map(|i| i.inflection.to_string()).collect();
        assert_eq!(forms, ["dove", "ran"]);
    }

    #[test]
    fn regular_header_defines_irregulars() {
        let text = "#features: past\n#regular: +t, +d\nwɔk\tpast\twɔkt\t1\nhɪt\tpast\thɪt\t1\n";
        let ds = Dataset::parse(text, "f").unwrap();
        assert!(!ds.is_irregular(&ds.instances[0]));
        assert!(ds.is_irregular(&ds.instances[1]));
        let plain = Dataset::parse("sɪŋ\t\tsæŋ\t1\nhɪt\t\thɪt\t1\n", "f").unwrap();
        assert!(plain.is_irregular(&plain.instances[0]));
        assert!(!plain.is_irregular(&plain.instances[1]));
    }

    #[test]
    fn tsv_round_trip() {
        let text = "#features: fem,pl\n#regular: +n\nblume\tfem,pl\tblumen\t12.5\nhund\tpl\thunde\t0\n";
        let ds = Dataset::parse(text, "f").unwrap();
        assert_eq!(Dataset::parse(&ds.to_tsv(), "f").unwrap(), ds);
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.tsv");
        std::fs::write(&path, "#features: past\nwalk\tpast\twalked\t311\n").unwrap();
        let ds = load_dataset(&path).unwrap();
        assert_eq!(ds.len(), 1);
        assert!(load_dataset(dir.path().join("missing.tsv")).is_err());
    }

    #[test]
    fn weighted_sample_exhaustive_and_deterministic() {
        let ds = with_freqs(&[5.0, 1.0, 0.0, 3.0, 2.0]);
        let all = sample_frequency_weighted(&ds, 5, 1).unwrap();
        assert_eq!(all.instances, ds.instances);
        let a = sample_frequency_weighted(&ds, 3, 42).unwrap();
        let b = sample_frequency_weighted(&ds, 3, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        assert!(sample_frequency_weighted(&ds, 6, 1).is_err());
    }

    #[test]
    fn zero_frequency_items_come_last() {
        let ds = with_freqs(&[0.0, 1e-9, 0.0]);
        for seed in 0..50 {
            let s = sample_frequency_weighted(&ds, 1, seed).unwrap();
            assert_eq!(s.instances[0].lemma.to_string(), "w1");
        }
    }

    #[test]
    fn weighted_sample_favours_frequent_items() {
        // P(heavy item first) = 1e6 / (1e6 + 2): expected misses over
        // 10,000 seeds are 0.02.
        let ds = with_freqs(&[1_000_000.0, 1.0, 1.0]);
        let hits = (0..10_000u64)
            .filter(|&seed| sample_frequency_weighted(&ds, 1, seed).unwrap().instances[0].frequency > 1.0)
            .count();
        assert!(hits >= 9_990, "{hits}");
    }

    #[test]
    fn weighted_draw_matches_sequential_probabilities() {
        // Weights 3,1: P(first) = 3/4 for a single draw.
        let ds = with_freqs(&[3.0, 1.0]);
        let hits = (0..20_000u64)
            .filter(|&seed| sample_frequency_weighted(&ds, 1, seed).unwrap().instances[0].frequency == 3.0)
            .count();
        let p = hits as f64 / 20_000.0;
        assert!((p - 0.75).abs() < 0.015, "{p}");
    }

    #[test]
    fn log_binned_stages_are_nested_and_sized() {
        let freqs: Vec<f64> = (0..2000).map(|i| 10f64.powf(4.0 * (i as f64) / 1999.0)).collect();
        let ds = with_freqs(&freqs);
        let stages = sample_log_binned(&ds, 20, 50, 9).unwrap();
        assert_eq!(stages.len(), 20);
        for (i, s) in stages.iter().enumerate() {
            assert_eq!(s.len(), 50 * (i + 1));
        }
        for pair in stages.windows(2) {
            assert!(pair[0].instances.iter().all(|x| pair[1].instances.contains(x)));
        }
        // The first stage comes from the top bin.
        let min_first = stages[0]
            .instances
            .iter()
            .map(|i| i.frequency)
            .fold(f64::INFINITY, f64::min);
        assert!(min_first >= 10f64.powf(4.0 * 19.0 / 20.0) - 1e-9);
        assert_eq!(sample_log_binned(&ds, 20, 50, 9).unwrap(), stages);
    }

    #[test]
    fn log_binned_edge_cases() {
        let ds = with_freqs(&[1.0, 1000.0, 0.0, 10.0, 100.0]);
        let bins = log_bins(&ds, 3);
        assert_eq!(bins, [0, 2, 0, 1, 2]);
        let one = sample_log_binned(&ds, 1, 2, 3).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].len(), 2);

        let flat = with_freqs(&[4.0; 6]);
        assert_eq!(log_bins(&flat, 3), [2, 2, 1, 1, 0, 0]);
        let stages = sample_log_binned(&flat, 3, 5, 0).unwrap();
        let sizes: Vec<usize> = stages.iter().map(Dataset::len).collect();
        assert_eq!(sizes, [2, 4, 6]);
        assert!(sample_log_binned(&flat, 0, 5, 0).is_err());
    }

    #[test]
    fn jitter_properties() {
        let ds = with_freqs(&[100.0, 50.0, 20.0, 5.0]);
        assert_eq!(jitter_frequencies(&ds, 0.0, 0.0, 3).unwrap(), ds);
        let j = jitter_frequencies(&ds, 0.0, 5.0, 3).unwrap();
        assert_eq!(j, jitter_frequencies(&ds, 0.0, 5.0, 3).unwrap());
        for (a, b) in ds.instances.iter().zip(&j.instances) {
            assert!(b.frequency >= a.frequency && b.frequency <= a.frequency + 5.0);
        }
        assert!(j.instances.windows(2).all(|w| w[0].frequency > w[1].frequency));
        assert!(jitter_frequencies(&ds, 2.0, 1.0, 3).is_err());
    }

    #[test]
    fn top_n_takes_most_frequent() {
        let ds = with_freqs(&[5.0, 100.0, 20.0, 50.0]);
        let top = sample_top_n(&ds, 2, (0.0, 0.0), 0).unwrap();
        let names: Vec<String> = top.instances.iter().map(|i| i.lemma.to_string()).collect();
        assert_eq!(names, ["w1", "w3"]);
    }

    #[test]
    fn derived_seeds_are_distinct_and_stable() {
        let seeds: BTreeSet<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
        assert_ne!(derive_seed(7, 3), derive_seed(8, 3));
    }

    #[test]
    fn plan_validation() {
        assert!(SamplePlan::FrequencyWeighted { n: 0 }.validate().is_err());
        assert!(SamplePlan::TopN {
            n: 3,
            jitter: (5.0, 0.0)
        }
        .validate()
        .is_err());
        let ds = with_freqs(&[1.0, 2.0, 3.0]);
        let out = SamplePlan::FrequencyWeighted { n: 2 }.draw(&ds, 1).unwrap();
        assert_eq!(out.len(), 1);
    }
}
