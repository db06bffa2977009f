//! Domain types shared by the learner, the inflector and the harness.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tp::TpVerdict;

/// Tag naming a declared categorical feature (`past`, `feminine`, ...).
pub type FeatureId = String;

/// A sequence of segments. One `char` is one segment, so multi-character
/// phone symbols must be normalized to single code points upstream.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<char>);

impl Word {
    pub fn new(segments: Vec<char>) -> Self {
        Word(segments)
    }

    pub fn segments(&self) -> &[char] {
        &self.0
    }

    pub fn ends_with(&self, ending: &[char]) -> bool {
        self.0.ends_with(ending)
    }
}

impl Deref for Word {
    type Target = [char];

    fn deref(&self) -> &[char] {
        &self.0
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word(s.chars().collect())
    }
}

impl From<&[char]> for Word {
    fn from(s: &[char]) -> Self {
        Word(s.to_vec())
    }
}

impl FromStr for Word {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(Word::from(s))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|c| fmt::Write::write_char(f, *c))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_string())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(Word::from(s.as_str()))
    }
}

/// Delete the final `delete_count` segments of a lemma, then append `suffix`.
///
/// Pure suffixation is `delete_count == 0`; the null change (identical
/// lemma and inflection) is `delete_count == 0` with an empty suffix.
///
/// The textual form is `+suffix` for pure suffixation and `-k+suffix`
/// otherwise, e.g. `+ed`, `-3+ang`, `+`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Change {
    pub delete_count: usize,
    pub suffix: Word,
}

impl Change {
    pub fn new(delete_count: usize, suffix: impl Into<Word>) -> Self {
        Change {
            delete_count,
            suffix: suffix.into(),
        }
    }

    pub fn suffixation(suffix: &str) -> Self {
        Change::new(0, suffix)
    }

    pub fn is_suffixation(&self) -> bool {
        self.delete_count == 0
    }

    pub fn apply(&self, lemma: &[char]) -> Result<Word> {
        apply_change(lemma, self)
    }
}

impl fmt::Display for Change {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.delete_count > 0 {
            write!(f, "-{}", self.delete_count)?;
        }
        write!(f, "+{}", self.suffix)
    }
}

impl fmt::Debug for Change {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Change({self})")
    }
}

impl FromStr for Change {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("malformed change `{s}` (expected `+suffix` or `-k+suffix`)"));
        if let Some(suffix) = s.strip_prefix('+') {
            return Ok(Change::new(0, suffix));
        }
        let rest = s.strip_prefix('-').ok_or_else(bad)?;
        let (count, suffix) = rest.split_once('+').ok_or_else(bad)?;
        let delete_count = count.parse().map_err(|_| bad())?;
        Ok(Change::new(delete_count, suffix))
    }
}

impl Serialize for Change {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Change {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The change mapping `lemma` to `inflection`, anchored on their longest
/// common prefix.
pub fn derive_change(lemma: &[char], inflection: &[char]) -> Change {
    let common = lemma.iter().zip(inflection).take_while(|(a, b)| a == b).count();
    Change {
        delete_count: lemma.len() - common,
        suffix: Word::from(&inflection[common..]),
    }
}

pub fn apply_change(lemma: &[char], change: &Change) -> Result<Word> {
    if change.delete_count > lemma.len() {
        return Err(Error::InapplicableChange {
            lemma: lemma.iter().collect(),
            change: change.to_string(),
        });
    }
    let keep = lemma.len() - change.delete_count;
    let mut out = Vec::with_capacity(keep + change.suffix.len());
    out.extend_from_slice(&lemma[..keep]);
    out.extend_from_slice(&change.suffix);
    Ok(Word(out))
}

/// Which changes may become the rule of a leaf.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleChanges {
    /// Pure suffixation only. Changes that rewrite the stem (`sing -> sang`)
    /// are always stored as exceptions.
    #[default]
    Suffixation,
    /// Any change, including stem rewrites.
    Any,
}

impl RuleChanges {
    pub fn allows(self, change: &Change) -> bool {
        match self {
            RuleChanges::Suffixation => change.is_suffixation(),
            RuleChanges::Any => true,
        }
    }
}

/// One training observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub lemma: Word,
    pub features: BTreeSet<FeatureId>,
    pub inflection: Word,
    /// Token frequency. Integral in corpus files; jittering makes it real.
    pub frequency: f64,
}

impl Instance {
    pub fn new<I, S>(lemma: &str, features: I, inflection: &str, frequency: f64) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<FeatureId>,
    {
        Instance {
            lemma: Word::from(lemma),
            features: features.into_iter().map(Into::into).collect(),
            inflection: Word::from(inflection),
            frequency,
        }
    }

    pub fn change(&self) -> Change {
        derive_change(&self.lemma, &self.inflection)
    }
}

/// A binary test on an instance.
///
/// The derived ordering is the canonical feature order used for tie-breaks:
/// categorical tags first (lexicographic), then ending sets compared by
/// their sorted ending lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Categorical(FeatureId),
    EndingSet(BTreeSet<Word>),
}

impl Feature {
    pub fn categorical(tag: &str) -> Self {
        Feature::Categorical(tag.to_owned())
    }

    pub fn ending_set<'a>(endings: impl IntoIterator<Item = &'a str>) -> Self {
        Feature::EndingSet(endings.into_iter().map(Word::from).collect())
    }

    pub fn holds(&self, lemma: &[char], features: &BTreeSet<FeatureId>) -> bool {
        match self {
            Feature::Categorical(tag) => features.contains(tag),
            Feature::EndingSet(endings) => lemma_has_ending(lemma, endings),
        }
    }

    pub fn holds_for(&self, instance: &Instance) -> bool {
        self.holds(&instance.lemma, &instance.features)
    }
}

/// True when `lemma` ends with any member of `endings`.
pub fn lemma_has_ending(lemma: &[char], endings: &BTreeSet<Word>) -> bool {
    endings.iter().any(|ending| lemma.ends_with(ending))
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Feature::Categorical(tag) => f.write_str(tag),
            Feature::EndingSet(endings) => {
                f.write_str("[")?;
                for (i, ending) in endings.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write!(f, "{ending}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// A training instance stored verbatim at a leaf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Memorized {
    pub lemma: Word,
    pub features: BTreeSet<FeatureId>,
    pub inflection: Word,
    pub frequency: f64,
}

impl Memorized {
    pub fn change(&self) -> Change {
        derive_change(&self.lemma, &self.inflection)
    }
}

impl From<&Instance> for Memorized {
    fn from(inst: &Instance) -> Self {
        Memorized {
            lemma: inst.lemma.clone(),
            features: inst.features.clone(),
            inflection: inst.inflection.clone(),
            frequency: inst.frequency,
        }
    }
}

/// Productivity statistics of the instances that reached a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeStats {
    /// Most frequent change among the node's instances.
    pub top_change: Change,
    pub top_count: usize,
    pub verdict: TpVerdict,
}

impl NodeStats {
    pub fn size(&self) -> usize {
        self.verdict.n
    }

    pub fn consistency(&self) -> f64 {
        self.top_count as f64 / self.verdict.n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Internal {
        split: Feature,
        present: Box<Node>,
        absent: Box<Node>,
        stats: NodeStats,
    },
    Leaf {
        /// The productive change, or `None` for a memorization leaf.
        rule: Option<Change>,
        /// Exceptions to `rule`, or every instance that reached the leaf
        /// when there is no rule.
        memorized: Vec<Memorized>,
        stats: NodeStats,
    },
}

impl Node {
    pub fn stats(&self) -> &NodeStats {
        match self {
            Node::Internal { stats, .. } | Node::Leaf { stats, .. } => stats,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }

    /// Visit every leaf with the `(feature, present)` tests on its path.
    pub fn for_each_leaf<'a>(&'a self, mut visit: impl FnMut(&[(&'a Feature, bool)], &'a Node)) {
        type Path<'a> = [(&'a Feature, bool)];
        fn walk<'a>(node: &'a Node, path: &mut Vec<(&'a Feature, bool)>, visit: &mut dyn FnMut(&Path<'a>, &'a Node)) {
            match node {
                Node::Leaf { .. } => visit(path, node),
                Node::Internal {
                    split, present, absent, ..
                } => {
                    path.push((split, true));
                    walk(present, path, visit);
                    path.pop();
                    path.push((split, false));
                    walk(absent, path, visit);
                    path.pop();
                }
            }
        }
        walk(self, &mut Vec::new(), &mut visit);
    }

    pub fn node_count(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Internal { present, absent, .. } => 1 + present.node_count() + absent.node_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnedTree {
    pub root: Node,
    /// Declared categorical features plus every induced ending set.
    pub feature_space: Vec<Feature>,
    pub declared: BTreeSet<FeatureId>,
    pub training_size: usize,
    pub max_ending_len: usize,
    pub rule_changes: RuleChanges,
}

impl LearnedTree {
    /// Changes that are the rule of at least one leaf.
    pub fn productive_changes(&self) -> BTreeSet<Change> {
        let mut out = BTreeSet::new();
        self.root.for_each_leaf(|_, leaf| {
            if let Node::Leaf { rule: Some(rule), .. } = leaf {
                out.insert(rule.clone());
            }
        });
        out
    }

    pub fn leaf_count(&self) -> usize {
        let mut count = 0;
        self.root.for_each_leaf(|_, _| count += 1);
        count
    }

    pub fn memorized_count(&self) -> usize {
        let mut count = 0;
        self.root.for_each_leaf(|_, leaf| {
            if let Node::Leaf { memorized, .. } = leaf {
                count += memorized.len();
            }
        });
        count
    }
}
