//! Recursive, tolerance-gated growth of the decision tree.
//!
//! At every node the most frequent change is tested first; a productive
//! change ends the recursion with a rule leaf whose exceptions are stored
//! verbatim. Otherwise ending features are induced from the node's
//! instances, features that do not divide the node are dropped, and the
//! node splits on the feature whose instances agree most on one change.
//! A node with nothing left to split on memorizes all of its instances.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{self, DEFAULT_MAX_ENDING_LEN};
use crate::labeled::Labeled;
use crate::model::{Change, Feature, FeatureId, Instance, LearnedTree, Memorized, Node, NodeStats, RuleChanges};
use crate::tp::{self, TpVerdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Longest lemma ending considered by feature induction.
    pub max_ending_len: usize,
    /// Changes that may become rules and receive induced ending features.
    pub rule_changes: RuleChanges,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_ending_len: DEFAULT_MAX_ENDING_LEN,
            rule_changes: RuleChanges::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitScore {
    pub feature: Feature,
    /// Instances having the feature.
    pub subset_size: usize,
    /// Count of the most frequent change among them.
    pub top_change_freq: usize,
    pub consistency: f64,
}

/// The most frequent change over `instances`, of any kind, and its
/// productivity verdict.
pub fn node_verdict(instances: &[Instance]) -> Result<(Change, TpVerdict)> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument(
            "node_verdict needs at least one instance".into(),
        ));
    }
    let labeled = Labeled::new(instances);
    let members: Vec<usize> = (0..instances.len()).collect();
    let counts = labeled.change_counts(&members);
    let (top, count) = labeled.top_change(&counts, |_| true).expect("nonempty");
    Ok((
        labeled.change(top).clone(),
        tp::verdict(members.len(), members.len() - count),
    ))
}

/// The feature whose instances are most consistent in their change.
///
/// Ties go to the larger subset, then to the feature that sorts first in the
/// canonical feature order. Features no instance has are skipped.
pub fn best_split(instances: &[Instance], usable: &[Feature]) -> Option<SplitScore> {
    let labeled = Labeled::new(instances);
    let mut best: Option<(Candidate, &Feature)> = None;
    for feature in usable {
        let subset: Vec<usize> = (0..instances.len())
            .filter(|&i| feature.holds_for(&instances[i]))
            .collect();
        let Some(candidate) = Candidate::score(&labeled, &subset) else {
            continue;
        };
        let better = match &best {
            None => true,
            Some((incumbent, incumbent_feature)) => {
                candidate
                    .cmp_rank(incumbent)
                    .then_with(|| incumbent_feature.cmp(&feature))
                    == Ordering::Greater
            }
        };
        if better {
            best = Some((candidate, feature));
        }
    }
    best.map(|(c, feature)| c.into_score(feature.clone()))
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    subset_size: usize,
    top_count: usize,
}

impl Candidate {
    fn score(labeled: &Labeled<'_>, subset: &[usize]) -> Option<Self> {
        if subset.is_empty() {
            return None;
        }
        let counts = labeled.change_counts(subset);
        let top_count = counts.iter().copied().max().unwrap_or(0);
        Some(Candidate {
            subset_size: subset.len(),
            top_count,
        })
    }

    /// Exact comparison of `top/size` ratios, then of subset sizes.
    fn cmp_rank(&self, other: &Candidate) -> Ordering {
        let lhs = self.top_count as u128 * other.subset_size as u128;
        let rhs = other.top_count as u128 * self.subset_size as u128;
        lhs.cmp(&rhs).then_with(|| self.subset_size.cmp(&other.subset_size))
    }

    fn into_score(self, feature: Feature) -> SplitScore {
        SplitScore {
            feature,
            subset_size: self.subset_size,
            top_change_freq: self.top_count,
            consistency: self.top_count as f64 / self.subset_size as f64,
        }
    }
}

pub fn train(instances: &[Instance], declared: &BTreeSet<FeatureId>, config: &TrainConfig) -> Result<LearnedTree> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument("cannot train on an empty instance set".into()));
    }
    for inst in instances {
        if let Some(tag) = inst.features.iter().find(|t| !declared.contains(*t)) {
            return Err(Error::InvalidArgument(format!(
                "instance `{}` carries undeclared feature `{tag}`",
                inst.lemma
            )));
        }
    }

    let mut grower = Grower::new(instances, config);
    let declared_ids: Vec<usize> = declared
        .iter()
        .map(|tag| grower.intern(Feature::Categorical(tag.clone())))
        .collect();
    let members: Vec<usize> = (0..instances.len()).collect();
    let root = grower.grow(members, declared_ids);

    Ok(LearnedTree {
        root,
        feature_space: grower.features,
        declared: declared.clone(),
        training_size: instances.len(),
        max_ending_len: config.max_ending_len,
        rule_changes: config.rule_changes,
    })
}

/// Training state shared across the recursion: the labeled instances and
/// the feature space, with each feature's membership over every training
/// instance computed once.
struct Grower<'a> {
    labeled: Labeled<'a>,
    max_ending_len: usize,
    rule_changes: RuleChanges,
    features: Vec<Feature>,
    index: HashMap<Feature, usize>,
    membership: Vec<Vec<bool>>,
}

impl<'a> Grower<'a> {
    fn new(instances: &'a [Instance], config: &TrainConfig) -> Self {
        Grower {
            labeled: Labeled::new(instances),
            max_ending_len: config.max_ending_len,
            rule_changes: config.rule_changes,
            features: Vec::new(),
            index: HashMap::new(),
            membership: Vec::new(),
        }
    }

    fn intern(&mut self, feature: Feature) -> usize {
        if let Some(&id) = self.index.get(&feature) {
            return id;
        }
        let holds = self
            .labeled
            .instances
            .iter()
            .map(|inst| feature.holds_for(inst))
            .collect();
        let id = self.features.len();
        self.index.insert(feature.clone(), id);
        self.features.push(feature);
        self.membership.push(holds);
        id
    }

    /// The node's candidate rule and its verdict. When no change at the
    /// node may be a rule, the most frequent change is reported with every
    /// instance counted as an exception.
    fn stats(&self, members: &[usize]) -> (u32, NodeStats) {
        let counts = self.labeled.change_counts(members);
        let rules = self.rule_changes;
        let eligible = self.labeled.top_change(&counts, |c| rules.allows(c));
        let (top, top_count) = eligible
            .or_else(|| self.labeled.top_change(&counts, |_| true))
            .expect("nodes are never empty");
        let verdict = match eligible {
            Some(_) => tp::verdict(members.len(), members.len() - top_count),
            // With n = 2 even e = n passes the threshold; a node without a
            // candidate rule is never productive.
            None => TpVerdict {
                productive: false,
                ..tp::verdict(members.len(), members.len())
            },
        };
        let stats = NodeStats {
            top_change: self.labeled.change(top).clone(),
            top_count,
            verdict,
        };
        (top, stats)
    }

    fn memorize(&self, members: impl Iterator<Item = usize>) -> Vec<Memorized> {
        members.map(|i| Memorized::from(&self.labeled.instances[i])).collect()
    }

    fn grow(&mut self, members: Vec<usize>, inherited: Vec<usize>) -> Node {
        let (top, stats) = self.stats(&members);
        if stats.verdict.productive {
            let exceptions = members.iter().copied().filter(|&i| self.labeled.change_of[i] != top);
            return Node::Leaf {
                rule: Some(stats.top_change.clone()),
                memorized: self.memorize(exceptions),
                stats,
            };
        }

        let mut space = inherited;
        for (endings, _) in features::induce(&self.labeled, &members, self.max_ending_len, self.rule_changes) {
            let id = self.intern(Feature::EndingSet(endings));
            if !space.contains(&id) {
                space.push(id);
            }
        }

        let Some(split) = self.choose_split(&members, &space) else {
            return Node::Leaf {
                rule: None,
                memorized: self.memorize(members.iter().copied()),
                stats,
            };
        };

        let (present, absent): (Vec<usize>, Vec<usize>) = members.iter().partition(|&&i| self.membership[split][i]);
        debug_assert!(!present.is_empty() && !absent.is_empty());
        let present_node = self.grow(present, space.clone());
        let absent_node = self.grow(absent, space);
        Node::Internal {
            split: self.features[split].clone(),
            present: Box::new(present_node),
            absent: Box::new(absent_node),
            stats,
        }
    }

    /// Best usable feature: one that holds for some but not all members.
    fn choose_split(&self, members: &[usize], space: &[usize]) -> Option<usize> {
        let mut best: Option<(Candidate, usize)> = None;
        let mut subset = Vec::with_capacity(members.len());
        for &id in space {
            subset.clear();
            subset.extend(members.iter().copied().filter(|&i| self.membership[id][i]));
            if subset.is_empty() || subset.len() == members.len() {
                continue;
            }
            let candidate = Candidate::score(&self.labeled, &subset).expect("nonempty subset");
            let better = match &best {
                None => true,
                Some((incumbent, incumbent_id)) => {
                    candidate
                        .cmp_rank(incumbent)
                        .then_with(|| self.features[*incumbent_id].cmp(&self.features[id]))
                        == Ordering::Greater
                }
            };
            if better {
                best = Some((candidate, id));
            }
        }
        best.map(|(_, id)| id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(lemma: &str, feats: &[&str], infl: &str) -> Instance {
        Instance::new(lemma, feats.iter().copied(), infl, 1.0)
    }

    fn none() -> BTreeSet<FeatureId> {
        BTreeSet::new()
    }

    #[test]
    fn verdict_examples() {
        let mut data: Vec<Instance> = (0..9).map(|i| inst(&format!("x{i}"), &[], &format!("x{i}s"))).collect();
        data.push(inst("y", &[], "yen"));
        let (change, v) = node_verdict(&data).unwrap();
        assert_eq!(change, Change::suffixation("s"));
        assert!(v.productive && v.e == 1);

        let data: Vec<Instance> = (0..10)
            .map(|i| {
                let lemma = format!("x{i}");
                let suffix = if i < 5 { "a" } else { "b" };
                inst(&lemma, &[], &format!("{lemma}{suffix}"))
            })
            .collect();
        let (_, v) = node_verdict(&data).unwrap();
        assert!(!v.productive && v.e == 5);

        let (_, v) = node_verdict(&[inst("go", &[], "went")]).unwrap();
        assert!(v.productive && v.e == 0);

        assert!(node_verdict(&[]).is_err());
    }

    #[test]
    fn verdict_tie_prefers_shorter_suffix() {
        let data = vec![inst("ab", &[], "abxy"), inst("cd", &[], "cdz")];
        assert_eq!(node_verdict(&data).unwrap().0, Change::suffixation("z"));
    }

    #[test]
    fn best_split_prefers_consistency_then_size() {
        let mut data = Vec::new();
        for i in 0..8 {
            data.push(inst(&format!("a{i}"), &["A"], &format!("a{i}s")));
        }
        for i in 0..20 {
            let suffix = if i < 15 { "en" } else { "e" };
            data.push(inst(&format!("b{i}"), &["B"], &format!("b{i}{suffix}")));
        }
        let got = best_split(&data, &[Feature::categorical("A"), Feature::categorical("B")]).unwrap();
        assert_eq!(got.feature, Feature::categorical("A"));
        assert_eq!((got.subset_size, got.top_change_freq), (8, 8));

        let mut data = Vec::new();
        for i in 0..4 {
            data.push(inst(&format!("a{i}"), &["A"], &format!("a{i}s")));
        }
        for i in 0..9 {
            data.push(inst(&format!("b{i}"), &["B"], &format!("b{i}e")));
        }
        let got = best_split(&data, &[Feature::categorical("A"), Feature::categorical("B")]).unwrap();
        assert_eq!(got.feature, Feature::categorical("B"));
        assert_eq!(got.consistency, 1.0);

        assert!(best_split(&data, &[]).is_none());
    }

    #[test]
    fn empty_training_set_is_rejected() {
        assert!(train(&[], &none(), &TrainConfig::default()).is_err());
    }

    #[test]
    fn undeclared_features_are_rejected() {
        let data = vec![inst("walk", &["past"], "walked")];
        assert!(train(&data, &none(), &TrainConfig::default()).is_err());
    }

    #[test]
    fn regular_majority_with_few_irregulars_is_one_rule_leaf() {
        let mut data: Vec<Instance> = (0..100)
            .map(|i| {
                let lemma = format!("v{i:03}");
                inst(&lemma, &[], &format!("{lemma}ed"))
            })
            .collect();
        for (l, i) in [
            ("sing", "sang"),
            ("go", "went"),
            ("eat", "ate"),
            ("run", "ran"),
            ("see", "saw"),
        ] {
            data.push(inst(l, &[], i));
        }
        let tree = train(&data, &none(), &TrainConfig::default()).unwrap();
        match &tree.root {
            Node::Leaf { rule, memorized, .. } => {
                assert_eq!(rule.as_ref().unwrap(), &Change::suffixation("ed"));
                assert_eq!(memorized.len(), 5);
            }
            other => panic!("expected a single leaf, got {other:?}"),
        }
    }

    #[test]
    fn three_distinct_changes_fit_the_tolerance() {
        // e = 2 <= 3 / ln 3, so even three unrelated changes form a rule.
        let data = vec![
            inst("abc", &[], "abcx"),
            inst("def", &[], "defy"),
            inst("ghi", &[], "ghiz"),
        ];
        let tree = train(&data, &none(), &TrainConfig::default()).unwrap();
        assert!(matches!(&tree.root, Node::Leaf { rule: Some(_), memorized, .. } if memorized.len() == 2));
    }

    #[test]
    fn indivisible_instances_are_memorized() {
        // Four distinct changes exceed the tolerance of four items, and the
        // shared ending makes every candidate feature uniform.
        let data = vec![
            inst("xaaa", &[], "xaaab"),
            inst("yaaa", &[], "yaaac"),
            inst("zaaa", &[], "zaaad"),
            inst("waaa", &[], "waaaf"),
        ];
        let tree = train(&data, &none(), &TrainConfig::default()).unwrap();
        match &tree.root {
            Node::Leaf {
                rule: None, memorized, ..
            } => assert_eq!(memorized.len(), 4),
            other => panic!("expected a memorization leaf, got {other:?}"),
        }
    }

    #[test]
    fn voicing_split_gives_two_rule_leaves() {
        let mut data = Vec::new();
        for (i, c) in "pksfʃ".chars().cycle().take(60).enumerate() {
            let lemma = format!("t{i:02}a{c}");
            data.push(inst(&lemma, &[], &format!("{lemma}t")));
        }
        for (i, c) in "bgzv".chars().cycle().take(40).enumerate() {
            let lemma = format!("d{i:02}o{c}");
            data.push(inst(&lemma, &[], &format!("{lemma}d")));
        }
        let tree = train(&data, &none(), &TrainConfig::default()).unwrap();
        let rules = tree.productive_changes();
        assert_eq!(rules, [Change::suffixation("d"), Change::suffixation("t")].into());
        assert_eq!(tree.leaf_count(), 2);
    }

    #[test]
    fn stem_changes_are_never_rules_by_default() {
        // A lone irregular passes the TP on its own (n = 1, e = 0), but only
        // suffixation may become a rule.
        let data = vec![inst("sɪŋ", &[], "sæŋ")];
        let tree = train(&data, &none(), &TrainConfig::default()).unwrap();
        assert!(tree.productive_changes().is_empty());
        assert_eq!(tree.memorized_count(), 1);

        let any = TrainConfig {
            rule_changes: RuleChanges::Any,
            ..TrainConfig::default()
        };
        let tree = train(&data, &none(), &any).unwrap();
        assert_eq!(
            tree.productive_changes().into_iter().collect::<Vec<_>>(),
            [Change::new(2, "æŋ")]
        );
    }

    #[test]
    fn irregular_niches_stay_memorized() {
        let mut data: Vec<Instance> = ["bæk", "lɪk", "hɒp", "mæp", "kɪs", "pæs"]
            .iter()
            .map(|l| inst(l, &[], &format!("{l}t")))
            .collect();
        data.extend(
            ["bæg", "hʌg", "rʌb", "lʌv"]
                .iter()
                .map(|l| inst(l, &[], &format!("{l}d"))),
        );
        for l in ["sɪŋ", "rɪŋ", "spɹɪŋ", "stɪŋ"] {
            data.push(inst(l, &[], &l.replace('ɪ', "æ")));
        }
        let tree = train(&data, &none(), &TrainConfig::default()).unwrap();
        for change in tree.productive_changes() {
            assert!(change.is_suffixation(), "{change}");
        }
        let any = TrainConfig {
            rule_changes: RuleChanges::Any,
            ..TrainConfig::default()
        };
        assert!(train(&data, &none(), &any)
            .unwrap()
            .productive_changes()
            .contains(&Change::new(2, "æŋ")));
    }
}
