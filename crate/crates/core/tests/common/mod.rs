// Shared generators for the integration tests (included with `mod common`).
#![allow(dead_code)]

use std::collections::BTreeSet;

use atp_core::{Change, Instance};
use proptest::prelude::*;

pub const TAGS: [&str; 4] = ["f0", "f1", "f2", "f3"];

pub fn lemma() -> impl Strategy<Value = String> {
    "[abcdt]{1,5}"
}

pub fn change() -> impl Strategy<Value = Change> {
    prop_oneof![
        4 => Just(Change::suffixation("s")),
        3 => Just(Change::suffixation("z")),
        2 => Just(Change::new(1, "e")),
        1 => Just(Change::suffixation("")),
        1 => Just(Change::new(2, "ot")),
    ]
}

pub fn features(n_tags: usize) -> impl Strategy<Value = BTreeSet<String>> {
    prop::collection::vec(any::<bool>(), n_tags).prop_map(|bits| {
        bits.iter()
            .zip(TAGS)
            .filter(|(on, _)| **on)
            .map(|(_, t)| t.to_string())
            .collect()
    })
}

/// Instances with distinct `(lemma, features)` keys and applicable changes.
pub fn instances(max: usize, n_tags: usize) -> impl Strategy<Value = Vec<Instance>> {
    prop::collection::vec((lemma(), features(n_tags), change(), 1u32..50), 1..=max)
        .prop_map(|rows| {
            let mut seen = BTreeSet::new();
            rows.into_iter()
                .filter_map(|(lemma, feats, change, freq)| {
                    let chars: Vec<char> = lemma.chars().collect();
                    let inflection = change.apply(&chars).ok()?;
                    if !seen.insert((lemma.clone(), feats.clone())) {
                        return None;
                    }
                    Some(Instance::new(&lemma, feats, &inflection.to_string(), f64::from(freq)))
                })
                .collect::<Vec<_>>()
        })
        .prop_filter("nonempty", |v| !v.is_empty())
}

pub fn declared(n_tags: usize) -> BTreeSet<String> {
    TAGS[..n_tags].iter().map(|s| s.to_string()).collect()
}
