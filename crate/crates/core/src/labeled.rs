use std::cmp::Ordering;
use std::collections::HashMap;

use crate::model::{Change, Instance};

/// Instances paired with interned change ids, so the learner can count
/// changes without comparing segment vectors.
pub(crate) struct Labeled<'a> {
    pub instances: &'a [Instance],
    pub change_of: Vec<u32>,
    pub changes: Vec<Change>,
}

impl<'a> Labeled<'a> {
    pub fn new(instances: &'a [Instance]) -> Self {
        let mut ids: HashMap<Change, u32> = HashMap::new();
        let mut changes = Vec::new();
        let change_of = instances
            .iter()
            .map(|inst| {
                let change = inst.change();
                *ids.entry(change.clone()).or_insert_with(|| {
                    changes.push(change);
                    (changes.len() - 1) as u32
                })
            })
            .collect();
        Labeled {
            instances,
            change_of,
            changes,
        }
    }

    pub fn lemma(&self, i: usize) -> &'a [char] {
        &self.instances[i].lemma
    }

    pub fn change(&self, id: u32) -> &Change {
        &self.changes[id as usize]
    }

    /// Per-change counts over `members`, indexed by change id.
    pub fn change_counts(&self, members: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.changes.len()];
        for &i in members {
            counts[self.change_of[i] as usize] += 1;
        }
        counts
    }

    /// The most frequent change passing `eligible`: higher count, then
    /// shorter suffix, then lexicographic suffix, then fewer deletions.
    pub fn top_change(&self, counts: &[usize], eligible: impl Fn(&Change) -> bool) -> Option<(u32, usize)> {
        (0..counts.len())
            .filter(|&id| counts[id] > 0 && eligible(&self.changes[id]))
            .min_by(|&a, &b| {
                counts[b]
                    .cmp(&counts[a])
                    .then_with(|| verdict_order(&self.changes[a], &self.changes[b]))
            })
            .map(|id| (id as u32, counts[id]))
    }
}

/// Tie-break among equally frequent changes at a node.
pub(crate) fn verdict_order(a: &Change, b: &Change) -> Ordering {
    a.suffix
        .len()
        .cmp(&b.suffix.len())
        .then_with(|| a.suffix.cmp(&b.suffix))
        .then_with(|| a.delete_count.cmp(&b.delete_count))
}
