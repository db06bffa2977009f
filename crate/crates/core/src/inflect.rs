//! Producing inflections from a learned tree.
//!
//! A query walks every path that its known features do not contradict:
//! ending-set splits are always decided by the lemma, categorical splits on
//! an unknown feature follow both branches. A memorized form for the same
//! lemma wins outright; otherwise the deepest reached rule applies; with no
//! rule in reach, the nearest memorized lemma supplies a change by analogy.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Change, Feature, FeatureId, LearnedTree, Memorized, Node, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub lemma: Word,
    pub known_features: BTreeSet<FeatureId>,
    /// Declared features whose value is unknown, e.g. the gender of a
    /// nonce noun. Declared features in neither set are known to be absent.
    pub unknown_features: BTreeSet<FeatureId>,
}

impl Query {
    pub fn new(
        lemma: impl Into<Word>,
        known_features: BTreeSet<FeatureId>,
        unknown_features: BTreeSet<FeatureId>,
    ) -> Result<Self> {
        let lemma = lemma.into();
        if lemma.is_empty() {
            return Err(Error::InvalidArgument("query lemma is empty".into()));
        }
        if let Some(tag) = known_features.intersection(&unknown_features).next() {
            return Err(Error::InvalidArgument(format!(
                "feature `{tag}` is both known and unknown"
            )));
        }
        Ok(Query {
            lemma,
            known_features,
            unknown_features,
        })
    }

    /// A query with every feature known.
    pub fn known(lemma: &str, features: impl IntoIterator<Item = impl Into<FeatureId>>) -> Self {
        Query {
            lemma: Word::from(lemma),
            known_features: features.into_iter().map(Into::into).collect(),
            unknown_features: BTreeSet::new(),
        }
    }

    fn compatible(&self, feature: &Feature) -> Branches {
        match feature {
            Feature::EndingSet(_) => {
                if feature.holds(&self.lemma, &self.known_features) {
                    Branches::Present
                } else {
                    Branches::Absent
                }
            }
            Feature::Categorical(tag) => {
                if self.known_features.contains(tag) {
                    Branches::Present
                } else if self.unknown_features.contains(tag) {
                    Branches::Both
                } else {
                    Branches::Absent
                }
            }
        }
    }

    /// Whether a memorized entry agrees with every feature the query knows.
    fn matches(&self, entry: &Memorized) -> bool {
        entry.lemma == self.lemma
            && entry
                .features
                .iter()
                .filter(|t| !self.unknown_features.contains(*t))
                .eq(self.known_features.iter())
    }
}

enum Branches {
    Present,
    Absent,
    Both,
}

/// How analogy turns the nearest memorized neighbor into an answer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalogyMode {
    /// Apply the neighbor's change to the query lemma (`gling` via
    /// `sing -> sang` gives `glang`).
    #[default]
    ApplyChange,
    /// Return the neighbor's inflection unchanged.
    Verbatim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub feature: Feature,
    pub present: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Rule { path: Vec<PathStep>, change: Change },
    Memorized,
    Analogy { neighbor: Word, change: Change },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductionResult {
    pub inflection: Word,
    pub provenance: Provenance,
    /// Depth of the applied rule leaf (root = 0).
    pub depth: Option<usize>,
    /// Number of rule leaves on compatible paths.
    pub compatible_rules: usize,
}

impl ProductionResult {
    /// The change that maps the query lemma to the produced form.
    pub fn change_from(&self, lemma: &[char]) -> Change {
        crate::model::derive_change(lemma, &self.inflection)
    }
}

struct Reached<'t> {
    leaf: &'t Node,
    path: Vec<PathStep>,
}

fn reach<'t>(node: &'t Node, query: &Query, path: &mut Vec<PathStep>, out: &mut Vec<Reached<'t>>) {
    match node {
        Node::Leaf { .. } => out.push(Reached {
            leaf: node,
            path: path.clone(),
        }),
        Node::Internal {
            split, present, absent, ..
        } => {
            let (go_present, go_absent) = match query.compatible(split) {
                Branches::Present => (true, false),
                Branches::Absent => (false, true),
                Branches::Both => (true, true),
            };
            for (go, child, side) in [(go_present, present, true), (go_absent, absent, false)] {
                if go {
                    path.push(PathStep {
                        feature: split.clone(),
                        present: side,
                    });
                    reach(child, query, path, out);
                    path.pop();
                }
            }
        }
    }
}

pub fn inflect(tree: &LearnedTree, query: &Query, mode: AnalogyMode) -> Result<ProductionResult> {
    if query.lemma.is_empty() {
        return Err(Error::InvalidArgument("query lemma is empty".into()));
    }
    let mut reached = Vec::new();
    reach(&tree.root, query, &mut Vec::new(), &mut reached);

    let memorized = || {
        reached.iter().flat_map(|r| match r.leaf {
            Node::Leaf { memorized, .. } => memorized.iter(),
            Node::Internal { .. } => [].iter(),
        })
    };
    let rule_leaves: Vec<(&Reached<'_>, &Change)> = reached
        .iter()
        .filter_map(|r| match r.leaf {
            Node::Leaf { rule: Some(rule), .. } => Some((r, rule)),
            _ => None,
        })
        .collect();

    let exception = memorized().filter(|m| query.matches(m)).min_by(|a, b| {
        b.frequency
            .total_cmp(&a.frequency)
            .then_with(|| a.features.cmp(&b.features))
            .then_with(|| a.inflection.cmp(&b.inflection))
    });
    if let Some(entry) = exception {
        return Ok(ProductionResult {
            inflection: entry.inflection.clone(),
            provenance: Provenance::Memorized,
            depth: None,
            compatible_rules: rule_leaves.len(),
        });
    }

    // Deepest rule; then higher consistency, larger support, earlier path.
    // A rule that deletes more than the lemma has yields to the next one.
    let mut ranked_rules: Vec<(usize, &(&Reached<'_>, &Change))> = rule_leaves.iter().enumerate().collect();
    ranked_rules.sort_by(|(ia, (a, _)), (ib, (b, _))| {
        let (sa, sb) = (a.leaf.stats(), b.leaf.stats());
        b.path
            .len()
            .cmp(&a.path.len())
            .then_with(|| {
                let lhs = sb.top_count as u128 * sa.size() as u128;
                let rhs = sa.top_count as u128 * sb.size() as u128;
                lhs.cmp(&rhs)
            })
            .then_with(|| sb.size().cmp(&sa.size()))
            .then_with(|| ia.cmp(ib))
    });
    for (_, (r, rule)) in ranked_rules {
        if let Ok(inflection) = rule.apply(&query.lemma) {
            return Ok(ProductionResult {
                inflection,
                provenance: Provenance::Rule {
                    path: r.path.clone(),
                    change: (*rule).clone(),
                },
                depth: Some(r.path.len()),
                compatible_rules: rule_leaves.len(),
            });
        }
    }

    let pool: Vec<&Memorized> = memorized().collect();
    if pool.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no rule or memorized form is reachable for `{}`",
            query.lemma
        )));
    }
    let ranked = rank_neighbors(&pool, &query.lemma);
    let (inflection, neighbor) = match mode {
        AnalogyMode::Verbatim => (ranked[0].inflection.clone(), ranked[0]),
        AnalogyMode::ApplyChange => ranked
            .iter()
            .find_map(|m| m.change().apply(&query.lemma).ok().map(|form| (form, *m)))
            .unwrap_or_else(|| (ranked[0].inflection.clone(), ranked[0])),
    };
    Ok(ProductionResult {
        inflection,
        provenance: Provenance::Analogy {
            neighbor: neighbor.lemma.clone(),
            change: neighbor.change(),
        },
        depth: None,
        compatible_rules: rule_leaves.len(),
    })
}

/// Memorized entries ordered by padded Hamming distance to `target`, then
/// higher training frequency, then lemma.
fn rank_neighbors<'m>(pool: &[&'m Memorized], target: &[char]) -> Vec<&'m Memorized> {
    let mut ranked: Vec<(usize, &Memorized)> = pool.iter().map(|m| (hamming_padded(&m.lemma, target), *m)).collect();
    ranked.sort_by(|(da, a), (db, b)| neighbor_order((*da, a), (*db, b)));
    ranked.into_iter().map(|(_, m)| m).collect()
}

fn neighbor_order(a: (usize, &Memorized), b: (usize, &Memorized)) -> Ordering {
    a.0.cmp(&b.0)
        .then_with(|| b.1.frequency.total_cmp(&a.1.frequency))
        .then_with(|| a.1.lemma.cmp(&b.1.lemma))
}

/// The memorized entry closest to `target`; `None` only for an empty pool.
pub fn nearest_memorized<'m>(memorized: &'m [Memorized], target: &[char]) -> Option<&'m Memorized> {
    memorized
        .iter()
        .map(|m| (hamming_padded(&m.lemma, target), m))
        .min_by(|a, b| neighbor_order(*a, *b))
        .map(|(_, m)| m)
}

/// Hamming distance after right-padding the shorter sequence with a
/// symbol that matches no segment.
pub fn hamming_padded(a: &[char], b: &[char]) -> usize {
    (0..a.len().max(b.len())).filter(|&i| a.get(i) != b.get(i)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NodeStats;
    use crate::tp;

    fn w(s: &str) -> Word {
        Word::from(s)
    }

    fn mem(lemma: &str, feats: &[&str], infl: &str, freq: f64) -> Memorized {
        Memorized {
            lemma: w(lemma),
            features: feats.iter().map(|s| s.to_string()).collect(),
            inflection: w(infl),
            frequency: freq,
        }
    }

    fn stats(size: usize, top: usize) -> NodeStats {
        NodeStats {
            top_change: Change::default(),
            top_count: top,
            verdict: tp::verdict(size, size - top),
        }
    }

    fn rule_leaf(suffix: &str, size: usize, memorized: Vec<Memorized>) -> Node {
        Node::Leaf {
            rule: Some(Change::suffixation(suffix)),
            memorized,
            stats: stats(size, size),
        }
    }

    fn memo_leaf(memorized: Vec<Memorized>) -> Node {
        let n = memorized.len();
        Node::Leaf {
            rule: None,
            memorized,
            stats: stats(n, 1),
        }
    }

    fn internal(split: Feature, present: Node, absent: Node) -> Node {
        Node::Internal {
            split,
            present: Box::new(present),
            absent: Box::new(absent),
            stats: stats(10, 1),
        }
    }

    fn tree(root: Node, declared: &[&str]) -> LearnedTree {
        LearnedTree {
            root,
            feature_space: Vec::new(),
            declared: declared.iter().map(|s| s.to_string()).collect(),
            training_size: 0,
            max_ending_len: 3,
            rule_changes: Default::default(),
        }
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_padded(&w("at"), &w("ate")), 1);
        assert_eq!(hamming_padded(&w("walk"), &w("walk")), 0);
        assert_eq!(hamming_padded(&w("go"), &w("went")), 4);
        assert_eq!(hamming_padded(&w("sing"), &w("gling")), 5);
        assert_eq!(hamming_padded(&w("bring"), &w("gling")), 2);
    }

    #[test]
    fn nearest_examples() {
        let pool = vec![
            mem("sing", &[], "sang", 1.0),
            mem("bring", &[], "brought", 1.0),
            mem("walk", &[], "walked", 1.0),
        ];
        assert_eq!(nearest_memorized(&pool, &w("gling")).unwrap().lemma, w("bring"));
        assert_eq!(nearest_memorized(&pool, &w("walk")).unwrap().lemma, w("walk"));

        let pool = vec![mem("bat", &[], "bats", 3.0), mem("cat", &[], "cats", 7.0)];
        assert_eq!(nearest_memorized(&pool, &w("mat")).unwrap().lemma, w("cat"));
        assert!(nearest_memorized(&[], &w("x")).is_none());
    }

    fn english_fig3() -> LearnedTree {
        // past ∧ [f|k|p|s|ʃ|ʧ] → +t ; past ∧ [d|t] → +ɪd ; past ∧ rest → +d
        let voiceless = Feature::ending_set(["k", "p", "s", "ʃ", "f", "ʧ"]);
        let alveolar = Feature::ending_set(["t", "d"]);
        let past = internal(
            voiceless,
            rule_leaf("t", 40, vec![mem("kip", &["past"], "kɛpt", 9.0)]),
            internal(
                alveolar,
                rule_leaf("ɪd", 20, vec![]),
                rule_leaf("d", 50, vec![mem("sɪŋ", &["past"], "sæŋ", 12.0)]),
            ),
        );
        tree(
            internal(
                Feature::categorical("past"),
                past,
                memo_leaf(vec![mem("ʧaɪld", &[], "ʧɪldrən", 4.0)]),
            ),
            &["past"],
        )
    }

    #[test]
    fn voiceless_lemma_takes_t() {
        let t = english_fig3();
        let got = inflect(&t, &Query::known("lʊk", ["past"]), AnalogyMode::ApplyChange).unwrap();
        assert_eq!(got.inflection, w("lʊkt"));
        assert_eq!(got.depth, Some(2));
        match got.provenance {
            Provenance::Rule { path, change } => {
                assert_eq!(change, Change::suffixation("t"));
                assert!(path[1].present);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn memorized_irregular_wins_over_rule() {
        let t = english_fig3();
        let got = inflect(&t, &Query::known("sɪŋ", ["past"]), AnalogyMode::ApplyChange).unwrap();
        assert_eq!(got.inflection, w("sæŋ"));
        assert_eq!(got.provenance, Provenance::Memorized);
        assert_eq!(got.compatible_rules, 1);
    }

    #[test]
    fn analogy_when_no_rule_is_reachable() {
        let t = english_fig3();
        let got = inflect(
            &t,
            &Query::known("maɪld", Vec::<String>::new()),
            AnalogyMode::ApplyChange,
        )
        .unwrap();
        // ʧaɪld → ʧɪldrən is (4, "ɪldrən"), applied to maɪld.
        assert_eq!(got.inflection, w("mɪldrən"));
        assert!(matches!(got.provenance, Provenance::Analogy { .. }));
        assert_eq!(got.compatible_rules, 0);

        let got = inflect(&t, &Query::known("maɪld", Vec::<String>::new()), AnalogyMode::Verbatim).unwrap();
        assert_eq!(got.inflection, w("ʧɪldrən"));
    }

    #[test]
    fn inapplicable_neighbor_changes_fall_back() {
        let t = tree(
            memo_leaf(vec![mem("abcde", &[], "x", 5.0), mem("zz", &[], "zzq", 1.0)]),
            &[],
        );
        // Nearest (abcde, distance 2) deletes five segments; the next one applies.
        let got = inflect(&t, &Query::known("abc", Vec::<String>::new()), AnalogyMode::ApplyChange).unwrap();
        assert_eq!(got.inflection, w("abcq"));

        let t = tree(memo_leaf(vec![mem("abcde", &[], "x", 5.0)]), &[]);
        let got = inflect(&t, &Query::known("ab", Vec::<String>::new()), AnalogyMode::ApplyChange).unwrap();
        assert_eq!(got.inflection, w("x"));
    }

    #[test]
    fn unknown_gender_uses_deepest_compatible_rule() {
        let en = Feature::ending_set(["en"]);
        let shallow = internal(
            Feature::categorical("fem"),
            rule_leaf("n", 30, vec![]),
            memo_leaf(vec![mem("a", &["masc"], "ab", 1.0)]),
        );
        let deep = internal(
            Feature::categorical("masc"),
            internal(
                Feature::categorical("neut"),
                rule_leaf("e", 5, vec![]),
                internal(en.clone(), rule_leaf("", 12, vec![]), rule_leaf("e", 9, vec![])),
            ),
            shallow,
        );
        let t = tree(deep, &["fem", "masc", "neut"]);
        let q = Query::new(
            "rokken",
            BTreeSet::new(),
            ["fem", "masc", "neut"].iter().map(|s| s.to_string()).collect(),
        )
        .unwrap();
        let got = inflect(&t, &q, AnalogyMode::ApplyChange).unwrap();
        assert_eq!(got.inflection, w("rokken"));
        assert_eq!(got.depth, Some(3));

        let q = Query::known("rokken", ["fem"]);
        let got = inflect(&t, &q, AnalogyMode::ApplyChange).unwrap();
        assert_eq!(got.inflection, w("rokkenn"));
    }

    #[test]
    fn exception_lookup_ignores_unknown_features() {
        let t = tree(
            internal(
                Feature::categorical("masc"),
                rule_leaf("e", 30, vec![mem("mann", &["masc"], "manner", 50.0)]),
                rule_leaf("n", 30, vec![]),
            ),
            &["masc"],
        );
        let q = Query::new("mann", BTreeSet::new(), ["masc".to_string()].into()).unwrap();
        assert_eq!(
            inflect(&t, &q, AnalogyMode::ApplyChange).unwrap().inflection,
            w("manner")
        );
        // Known non-masculine: the masculine exception does not match.
        let q = Query::known("mann", Vec::<String>::new());
        assert_eq!(
            inflect(&t, &q, AnalogyMode::ApplyChange).unwrap().inflection,
            w("mannn")
        );
    }

    #[test]
    fn query_validation() {
        let tag: BTreeSet<String> = ["x".to_string()].into();
        assert!(Query::new("a", tag.clone(), tag).is_err());
        assert!(Query::new("", BTreeSet::new(), BTreeSet::new()).is_err());
    }
}
