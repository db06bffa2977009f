//! Ending-set feature induction.
//!
//! For every change present at a node, the search walks lemma endings from
//! the shortest up and keeps each ending whose scope (all instances at the
//! node ending that way) tolerates the instances that do not take the
//! change. The kept endings become one feature when the relation holds in
//! both directions: the lemmas with a kept ending mostly take the change,
//! and the lemmas taking the change mostly have a kept ending.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::labeled::Labeled;
use crate::model::{Change, Feature, Instance, RuleChanges, Word};
use crate::tp::tolerates;

pub const DEFAULT_MAX_ENDING_LEN: usize = 3;

/// The final `min(k, len)` segments of `lemma`.
pub fn ending_of(lemma: &[char], k: usize) -> &[char] {
    debug_assert!(k >= 1);
    &lemma[lemma.len().saturating_sub(k)..]
}

/// Per-ending productivity test for one change.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndingCandidate {
    pub ending: Word,
    pub target_change: Change,
    /// Instances at the node whose lemma has this ending.
    pub scope_count: usize,
    /// Those of them that do not take `target_change`.
    pub violations: usize,
}

/// An accepted ending set and the change it was induced for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InducedFeature {
    pub feature: Feature,
    pub change: Change,
}

/// Ending sets induced for every change present in `instances`.
pub fn induce_ending_features(instances: &[Instance], max_len: usize) -> Vec<InducedFeature> {
    induce_for(instances, max_len, RuleChanges::Any)
}

/// Ending sets induced only for the changes `rules` allows, as the learner
/// does.
pub fn induce_for(instances: &[Instance], max_len: usize, rules: RuleChanges) -> Vec<InducedFeature> {
    let labeled = Labeled::new(instances);
    let members: Vec<usize> = (0..instances.len()).collect();
    induce(&labeled, &members, max_len, rules)
        .into_iter()
        .map(|(endings, change)| InducedFeature {
            feature: Feature::EndingSet(endings),
            change: labeled.change(change).clone(),
        })
        .collect()
}

/// Ending statistics over the instances at one node, keyed by exact-length
/// ending.
struct EndingTable<'a> {
    by_ending: HashMap<&'a [char], EndingCounts>,
}

#[derive(Default)]
struct EndingCounts {
    total: usize,
    per_change: HashMap<u32, usize>,
}

impl<'a> EndingTable<'a> {
    fn build(labeled: &Labeled<'a>, members: &[usize], max_len: usize) -> Self {
        let mut by_ending: HashMap<&'a [char], EndingCounts> = HashMap::new();
        for &i in members {
            let lemma = labeled.lemma(i);
            for k in 1..=max_len.min(lemma.len()) {
                let counts = by_ending.entry(&lemma[lemma.len() - k..]).or_default();
                counts.total += 1;
                *counts.per_change.entry(labeled.change_of[i]).or_default() += 1;
            }
        }
        EndingTable { by_ending }
    }

    fn candidate(&self, ending: &[char], change: u32) -> (usize, usize) {
        let counts = &self.by_ending[ending];
        let taking = counts.per_change.get(&change).copied().unwrap_or(0);
        (counts.total, counts.total - taking)
    }
}

/// Core of the induction over a subset of a labeled training set. Returns
/// accepted ending sets with the change id each was induced for, in change
/// processing order, deduplicated by ending set.
pub(crate) fn induce(
    labeled: &Labeled<'_>,
    members: &[usize],
    max_len: usize,
    rules: RuleChanges,
) -> Vec<(BTreeSet<Word>, u32)> {
    if members.is_empty() || max_len == 0 {
        return Vec::new();
    }
    let table = EndingTable::build(labeled, members, max_len);

    let counts = labeled.change_counts(members);
    let mut order: Vec<u32> = (0..counts.len() as u32)
        .filter(|&c| counts[c as usize] > 0 && rules.allows(labeled.change(c)))
        .collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (labeled.change(a), labeled.change(b));
        counts[b as usize]
            .cmp(&counts[a as usize])
            .then_with(|| ca.suffix.cmp(&cb.suffix))
            .then_with(|| ca.delete_count.cmp(&cb.delete_count))
    });

    let mut accepted: Vec<(BTreeSet<Word>, u32)> = Vec::new();
    let mut seen: HashSet<BTreeSet<Word>> = HashSet::new();
    for change in order {
        let takers: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&i| labeled.change_of[i] == change)
            .collect();
        let cached = cache_endings(labeled, &table, &takers, change, max_len, |_, _, _| {});
        if cached.is_empty() {
            continue;
        }

        let in_e = |i: usize| cached.iter().any(|ending| labeled.lemma(i).ends_with(ending));
        let e_size = members.iter().filter(|&&i| in_e(i)).count();
        let e_not_s = members
            .iter()
            .filter(|&&i| in_e(i) && labeled.change_of[i] != change)
            .count();
        let s_size = takers.len();
        let s_not_e = takers.iter().filter(|&&i| !in_e(i)).count();

        if tolerates(e_size, e_not_s) && tolerates(s_size, s_not_e) {
            let endings: BTreeSet<Word> = cached.iter().map(|e| Word::from(*e)).collect();
            if seen.insert(endings.clone()) {
                accepted.push((endings, change));
            }
        }
    }
    accepted
}

/// Shortest-first ending search for one change.
fn cache_endings<'a>(
    labeled: &Labeled<'a>,
    table: &EndingTable<'a>,
    takers: &[usize],
    change: u32,
    max_len: usize,
    mut on_candidate: impl FnMut(&[char], usize, usize),
) -> Vec<&'a [char]> {
    let mut cached: Vec<&'a [char]> = Vec::new();
    for k in 1..=max_len {
        let mut candidates: BTreeSet<&'a [char]> = BTreeSet::new();
        for &i in takers {
            let lemma = labeled.lemma(i);
            if lemma.len() < k || cached.iter().any(|e| lemma.ends_with(e)) {
                continue;
            }
            candidates.insert(&lemma[lemma.len() - k..]);
        }
        for ending in candidates {
            let (scope, violations) = table.candidate(ending, change);
            on_candidate(ending, scope, violations);
            if tolerates(scope, violations) {
                cached.push(ending);
            }
        }
    }
    cached
}

/// Every per-ending test the search evaluates, cached or not. Intended for
/// inspection and debugging; the learner does not call it.
pub fn ending_candidates(instances: &[Instance], change: &Change, max_len: usize) -> Vec<EndingCandidate> {
    let labeled = Labeled::new(instances);
    let Some(id) = labeled.changes.iter().position(|c| c == change) else {
        return Vec::new();
    };
    let members: Vec<usize> = (0..instances.len()).collect();
    let table = EndingTable::build(&labeled, &members, max_len);
    let takers: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&i| labeled.change_of[i] == id as u32)
        .collect();
    let mut out = Vec::new();
    cache_endings(
        &labeled,
        &table,
        &takers,
        id as u32,
        max_len,
        |ending, scope_count, violations| {
            out.push(EndingCandidate {
                ending: Word::from(ending),
                target_change: change.clone(),
                scope_count,
                violations,
            })
        },
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(lemma: &str, infl: &str) -> Instance {
        Instance::new(lemma, Vec::<String>::new(), infl, 1.0)
    }

    #[test]
    fn ending_of_examples() {
        let walk: Vec<char> = "walk".chars().collect();
        assert_eq!(ending_of(&walk, 1), &['k']);
        assert_eq!(ending_of(&walk, 2), &['l', 'k']);
        let go: Vec<char> = "go".chars().collect();
        assert_eq!(ending_of(&go, 3), &['g', 'o']);
    }

    #[test]
    fn schwa_and_consonant_classes() {
        let mut data = Vec::new();
        for lemma in ["blume", "katze", "tante", "lampe", "puppe"] {
            data.push(inst(lemma, &format!("{lemma}n")));
        }
        for lemma in ["hund", "tisch", "schaf", "brot", "pilz"] {
            data.push(inst(lemma, &format!("{lemma}e")));
        }
        let got = induce_ending_features(&data, 3);
        assert_eq!(got.len(), 2);
        let by_change: HashMap<String, Feature> = got.into_iter().map(|f| (f.change.to_string(), f.feature)).collect();
        assert_eq!(by_change["+n"], Feature::ending_set(["e"]));
        assert_eq!(by_change["+e"], Feature::ending_set(["d", "f", "h", "t", "z"]));
    }

    #[test]
    fn uniform_corpus_yields_only_uniform_features() {
        let data: Vec<Instance> = ["walk", "jump", "kiss", "laugh"]
            .iter()
            .map(|l| inst(l, &format!("{l}ing")))
            .collect();
        for f in induce_ending_features(&data, 3) {
            assert!(data.iter().all(|i| f.feature.holds_for(i)));
        }
    }

    #[test]
    fn shortest_ending_blocks_its_extensions() {
        // Every `-k` lemma takes +t, so `k` is cached and no extension of
        // it may be.
        let data = vec![
            inst("bak", "bakt"),
            inst("lik", "likt"),
            inst("pok", "pokt"),
            inst("bag", "bagd"),
            inst("lig", "ligd"),
        ];
        let got = induce_ending_features(&data, 3);
        let t = got.iter().find(|f| f.change.to_string() == "+t").unwrap();
        assert_eq!(t.feature, Feature::ending_set(["k"]));
    }

    #[test]
    fn empty_input() {
        assert!(induce_ending_features(&[], 3).is_empty());
    }

    #[test]
    fn candidates_report_scope_and_violations() {
        let data = vec![inst("bak", "bakt"), inst("lak", "lakd"), inst("pok", "pokt")];
        let cands = ending_candidates(&data, &Change::suffixation("t"), 2);
        let k = cands.iter().find(|c| c.ending == Word::from("k")).unwrap();
        assert_eq!((k.scope_count, k.violations), (3, 1));
    }
}
