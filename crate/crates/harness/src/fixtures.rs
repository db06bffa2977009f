//! Generators for the bundled synthetic corpora.
//!
//! The corpora under `fixtures/` are produced by these functions (through
//! the `gen-fixtures` binary) from fixed seeds, so every row can be traced
//! back to a rule below. Segments are single Unicode scalars; English uses
//! IPA, German uses lowercase spelling with umlauts dropped.
//!
//! English: plural nouns, past-tense verbs and progressive verbs, with the
//! regular allomorphs conditioned on the final segment of the lemma (`+ɪz`
//! after sibilants, `+s` after other voiceless segments, `+z` elsewhere;
//! `+ɪd` after `t`/`d`, `+t` after voiceless segments, `+d` elsewhere) and
//! `+ɪŋ` everywhere. Irregulars change a stem vowel, so their changes always
//! delete segments.
//!
//! German: nominative singular/plural pairs tagged for gender, in five
//! classes: `-(e)n` (`+n` after schwa, `+en` on feminine consonant stems),
//! `-e` (masculine and neuter monosyllables), `-∅` (stems ending in
//! `-er`/`-el`/`-en`/`-chen`), `-er` (monosyllables in `-d`), and a handful
//! of `-s` nouns whose endings and genders are shared with other classes.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use atp_core::corpus::Dataset;
use atp_core::{derive_change, Change, Instance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{io_at, Result};

pub const ENGLISH_SEED: u64 = 20_211_101;
pub const GERMAN_SEED: u64 = 19_950_618;

/// Row counts of the English corpus.
pub const EN_PLURAL: usize = 3321;
pub const EN_PLURAL_IRREGULAR: usize = 23;
pub const EN_PAST: usize = 1494;
pub const EN_PAST_IRREGULAR: usize = 120;
pub const EN_PROGRESSIVE: usize = 1724;

pub const EN_TEST_REGULAR: usize = 300;
pub const EN_TEST_IRREGULAR: usize = 30;

const EN_VOWELS: &[char] = &['i', 'ɪ', 'e', 'ɛ', 'æ', 'ɑ', 'ɔ', 'o', 'ʊ', 'u', 'ʌ'];
const EN_ONSETS: &[&str] = &[
    "p", "b", "t", "d", "k", "g", "f", "v", "s", "z", "ʃ", "m", "n", "l", "r", "w", "h", "ʧ", "ʤ", "θ", "pl", "bl",
    "kl", "gl", "fl", "sl", "pr", "br", "tr", "dr", "kr", "gr", "fr", "st", "sp", "sk", "sn", "sm", "sw",
];
const EN_VOICELESS: &[char] = &['p', 'k', 'f', 'θ', 's', 'ʃ', 'ʧ'];
const EN_SIBILANTS: &[char] = &['s', 'z', 'ʃ', 'ʒ', 'ʧ', 'ʤ'];
/// Final segments a lemma may end in, with the vowel-final case drawn from
/// `EN_VOWELS`.
const EN_FINAL_CONSONANTS: &[char] = &[
    'p', 'b', 't', 'd', 'k', 'g', 'f', 'v', 'θ', 'ð', 's', 'z', 'ʃ', 'ʒ', 'ʧ', 'ʤ', 'm', 'n', 'ŋ', 'l', 'r',
];

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("nonempty")
}

fn english_lemma(rng: &mut ChaCha8Rng) -> String {
    let mut word = String::new();
    if rng.gen_bool(0.35) {
        word.push_str(pick(rng, EN_ONSETS));
        word.push(*pick(rng, EN_VOWELS));
    }
    word.push_str(pick(rng, EN_ONSETS));
    word.push(*pick(rng, EN_VOWELS));
    if rng.gen_bool(0.9) {
        word.push(*pick(rng, EN_FINAL_CONSONANTS));
    }
    word
}

pub fn english_past_suffix(lemma: &str) -> &'static str {
    match lemma.chars().last() {
        Some('t' | 'd') => "ɪd",
        Some(c) if EN_VOICELESS.contains(&c) => "t",
        _ => "d",
    }
}

pub fn english_plural_suffix(lemma: &str) -> &'static str {
    match lemma.chars().last() {
        Some(c) if EN_SIBILANTS.contains(&c) => "ɪz",
        Some('p' | 't' | 'k' | 'f' | 'θ') => "s",
        _ => "z",
    }
}

/// Replace the last vowel of `lemma` by a different one. `None` when the
/// lemma has no vowel.
fn ablaut(lemma: &str, rng: &mut ChaCha8Rng) -> Option<String> {
    let mut chars: Vec<char> = lemma.chars().collect();
    let pos = chars.iter().rposition(|c| EN_VOWELS.contains(c))?;
    let old = chars[pos];
    let choices: Vec<char> = EN_VOWELS.iter().copied().filter(|&v| v != old).collect();
    chars[pos] = *pick(rng, &choices);
    Some(chars.into_iter().collect())
}

/// Token frequency drawn log-uniformly from `[10^lo, 10^hi]`.
fn log_uniform_frequency(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo..hi)).round().max(1.0)
}

struct LemmaPool {
    used: BTreeSet<String>,
}

impl LemmaPool {
    fn fresh(&mut self, rng: &mut ChaCha8Rng) -> String {
        loop {
            let lemma = english_lemma(rng);
            if lemma.chars().count() >= 2 && self.used.insert(lemma.clone()) {
                return lemma;
            }
        }
    }
}

fn english_regular_changes() -> BTreeSet<Change> {
    ["+t", "+d", "+ɪd", "+s", "+z", "+ɪz", "+ɪŋ"]
        .iter()
        .map(|c| c.parse().expect("valid notation"))
        .collect()
}

fn english_tags() -> BTreeSet<String> {
    ["past", "pl", "prog"].iter().map(|s| s.to_string()).collect()
}

fn irregular(lemma: &str, rng: &mut ChaCha8Rng) -> String {
    loop {
        let form = ablaut(lemma, rng).expect("generated lemmas have vowels");
        let lemma_chars: Vec<char> = lemma.chars().collect();
        let form_chars: Vec<char> = form.chars().collect();
        if !derive_change(&lemma_chars, &form_chars).is_suffixation() {
            return form;
        }
    }
}

/// The English training corpus and a held-out past-tense test set whose
/// lemmas never occur in training.
pub fn english() -> (Dataset, Dataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(ENGLISH_SEED);
    let mut pool = LemmaPool { used: BTreeSet::new() };
    let mut rows = Vec::new();

    for i in 0..EN_PLURAL {
        let lemma = pool.fresh(&mut rng);
        let (form, freq) = if i < EN_PLURAL_IRREGULAR {
            (irregular(&lemma, &mut rng), log_uniform_frequency(&mut rng, 2.5, 4.0))
        } else {
            (
                format!("{lemma}{}", english_plural_suffix(&lemma)),
                log_uniform_frequency(&mut rng, 0.0, 4.0),
            )
        };
        rows.push(Instance::new(&lemma, ["pl"], &form, freq));
    }

    let mut verbs = Vec::with_capacity(EN_PAST);
    for i in 0..EN_PAST {
        let lemma = pool.fresh(&mut rng);
        let (form, freq) = if i < EN_PAST_IRREGULAR {
            (irregular(&lemma, &mut rng), log_uniform_frequency(&mut rng, 2.5, 4.0))
        } else {
            (
                format!("{lemma}{}", english_past_suffix(&lemma)),
                log_uniform_frequency(&mut rng, 0.0, 4.0),
            )
        };
        rows.push(Instance::new(&lemma, ["past"], &form, freq));
        verbs.push(lemma);
    }

    // Progressives reuse the past-tense verbs first, then add new ones.
    for i in 0..EN_PROGRESSIVE {
        let lemma = match verbs.get(i) {
            Some(v) => v.clone(),
            None => pool.fresh(&mut rng),
        };
        let freq = log_uniform_frequency(&mut rng, 0.0, 4.0);
        rows.push(Instance::new(&lemma, ["prog"], &format!("{lemma}ɪŋ"), freq));
    }

    let mut test_rows = Vec::new();
    for i in 0..EN_TEST_REGULAR + EN_TEST_IRREGULAR {
        let lemma = pool.fresh(&mut rng);
        let form = if i < EN_TEST_IRREGULAR {
            irregular(&lemma, &mut rng)
        } else {
            format!("{lemma}{}", english_past_suffix(&lemma))
        };
        test_rows.push(Instance::new(&lemma, ["past"], &form, 1.0));
    }

    let mut train = Dataset::new("english", rows, english_tags()).expect("tags declared");
    train.regular_changes = Some(english_regular_changes());
    let mut test = Dataset::new("english_test", test_rows, english_tags()).expect("tags declared");
    test.regular_changes = Some(english_regular_changes());
    (train, test)
}

const DE_ONSETS: &[&str] = &[
    "b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "w", "z", "bl", "br", "dr", "fl", "fr", "gl",
    "gr", "kl", "kr", "pl", "pr", "schl", "schm", "schn", "schw", "sp", "st", "tr",
];
const DE_VOWELS: &[&str] = &["a", "i", "o", "u", "au", "ei"];

/// Plural class sizes of the German corpus, summing to 442.
pub const DE_CLASS_SIZES: [(&str, usize); 6] =
    [("+n", 110), ("+en", 90), ("+e", 130), ("+", 89), ("+er", 15), ("+s", 8)];

/// The `-s` nouns: lemma, gender, number of same-gender neighbours that
/// share its final three letters and take another suffix, and frequency.
///
/// The three vowel-final nouns have no neighbours; the other five are
/// hidden among theirs. Among non-feminine nouns `-s` is then one
/// exception short of tolerable, so a child acquires it only when a rare
/// hidden `-s` noun is missing from the sample.
const DE_S_NOUNS: &[(&str, &str, usize, f64)] = &[
    ("auto", "neut", 0, 400.0),
    ("kino", "neut", 0, 300.0),
    ("opa", "masc", 0, 250.0),
    ("bar", "fem", 4, 500.0),
    ("park", "masc", 4, 7.0),
    ("hotel", "neut", 4, 7.0),
    ("baby", "neut", 4, 7.0),
    ("schal", "masc", 4, 7.0),
];

struct GermanBuilder {
    rng: ChaCha8Rng,
    used: BTreeSet<String>,
    rows: Vec<Instance>,
}

impl GermanBuilder {
    fn stem(&mut self) -> String {
        let onset = *pick(&mut self.rng, DE_ONSETS);
        let vowel = *pick(&mut self.rng, DE_VOWELS);
        format!("{onset}{vowel}")
    }

    fn frequency(&mut self) -> f64 {
        // Zipf-like: most nouns are rare, a few are very frequent.
        log_uniform_frequency(&mut self.rng, 0.0, 3.5)
    }

    fn add(&mut self, lemma: &str, gender: &str, plural: &str, freq: f64) -> bool {
        if !self.used.insert(lemma.to_string()) {
            return false;
        }
        self.rows.push(Instance::new(lemma, [gender], plural, freq));
        true
    }

    /// Adds `count` fresh nouns built by `make`, which returns
    /// `(lemma, gender, suffix)`.
    fn fill(&mut self, count: usize, mut make: impl FnMut(&mut Self) -> (String, &'static str, &'static str)) {
        let mut added = 0;
        while added < count {
            let (lemma, gender, suffix) = make(self);
            let freq = self.frequency();
            if self.add(&lemma, gender, &format!("{lemma}{suffix}"), freq) {
                added += 1;
            }
        }
    }
}

pub fn german() -> Dataset {
    let mut b = GermanBuilder {
        rng: ChaCha8Rng::seed_from_u64(GERMAN_SEED),
        used: BTreeSet::new(),
        rows: Vec::new(),
    };

    // -s nouns first, then their same-gender neighbours sharing the final
    // three letters (e.g. `park` among masculine `-ark` nouns taking `-e`).
    for &(lemma, gender, _, freq) in DE_S_NOUNS {
        b.add(lemma, gender, &format!("{lemma}s"), freq);
    }
    let mut hidden = 0;
    let mut hidden_fem = 0;
    for &(lemma, gender, neighbours, _) in DE_S_NOUNS {
        let tail: String = {
            let chars: Vec<char> = lemma.chars().collect();
            chars[chars.len().saturating_sub(3)..].iter().collect()
        };
        let mut made = 0;
        while made < neighbours {
            let onset = *pick(&mut b.rng, DE_ONSETS);
            let candidate = format!("{onset}{tail}");
            let freq = 10f64.powf(b.rng.gen_range(1.5..3.0)).round();
            let suffix = if gender == "fem" { "n" } else { "e" };
            if b.add(&candidate, gender, &format!("{candidate}{suffix}"), freq) {
                made += 1;
                hidden += 1;
                if gender == "fem" {
                    hidden_fem += 1;
                }
            }
        }
    }
    // The hidden neighbours count toward their classes.
    let hidden_e = hidden - hidden_fem;

    // -(e)n: schwa-final nouns take +n; feminine consonant stems take +en.
    b.fill(110 - hidden_fem, |b| {
        let coda = *pick(
            &mut b.rng,
            &[
                "mp", "nd", "lt", "ck", "ss", "tz", "ng", "rb", "rk", "ch", "s", "l", "m", "t", "k",
            ],
        );
        let gender = if b.rng.gen_bool(0.86) { "fem" } else { "masc" };
        (format!("{}{coda}e", b.stem()), gender, "n")
    });
    b.fill(90, |b| {
        let stem = b.stem();
        if b.rng.gen_bool(0.65) {
            let suffix = *pick(&mut b.rng, &["ung", "heit", "keit", "schaft"]);
            (format!("{stem}{suffix}"), "fem", "en")
        } else {
            let coda = *pick(&mut b.rng, &["r", "t", "hl", "rt", "st", "cht"]);
            (format!("{stem}{coda}"), "fem", "en")
        }
    });

    // -e: masculine and neuter monosyllables; never `-d`, never `-er`/`-el`/`-en`.
    b.fill(130 - hidden_e, |b| {
        let coda = *pick(
            &mut b.rng,
            &[
                "g", "k", "ch", "sch", "f", "m", "p", "t", "z", "b", "l", "r", "n", "s", "ft", "st", "rm", "rg", "nk",
                "lz",
            ],
        );
        let gender = if b.rng.gen_bool(0.7) { "masc" } else { "neut" };
        (format!("{}{coda}", b.stem()), gender, "e")
    });

    // -∅: stems in -er/-el/-en (masculine) and -chen/-er/-el (neuter).
    b.fill(89, |b| {
        let stem = b.stem();
        let coda = *pick(&mut b.rng, &["", "b", "g", "k", "t", "s", "ss", "l", "m"]);
        if b.rng.gen_bool(0.67) {
            let ending = *pick(&mut b.rng, &["er", "el", "en"]);
            (format!("{stem}{coda}{ending}"), "masc", "")
        } else {
            let ending = *pick(&mut b.rng, &["chen", "er", "el"]);
            (format!("{stem}{coda}{ending}"), "neut", "")
        }
    });

    // -er: neuter and a few masculine monosyllables ending in -d.
    let mut er = 0;
    b.fill(15, |b| {
        er += 1;
        let coda = *pick(&mut b.rng, &["ld", "nd", "d"]);
        let gender = if er <= 12 { "neut" } else { "masc" };
        (format!("{}{coda}", b.stem()), gender, "er")
    });

    let tags = ["fem", "masc", "neut"].iter().map(|s| s.to_string()).collect();
    let mut ds = Dataset::new("german", b.rows, tags).expect("tags declared");
    ds.regular_changes = Some(
        ["+n", "+en", "+e", "+", "+er", "+s"]
            .iter()
            .map(|c| c.parse().expect("valid notation"))
            .collect(),
    );
    ds
}

/// A Wug stimulus: a nonce noun, its gender tag (`None` when unknown) and
/// whether it rhymes with attested nouns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stimulus {
    pub lemma: String,
    pub gender: Option<String>,
    pub rhyme: bool,
}

/// Twelve rhymes built on endings frequent in the German corpus and twelve
/// non-rhymes with endings it never attests.
pub fn wug_stimuli() -> Vec<Stimulus> {
    let rhymes = [
        ("bralung", "fem"),
        ("kachte", "fem"),
        ("pind", "neut"),
        ("spand", "neut"),
        ("klotsch", "masc"),
        ("pruk", "masc"),
        ("fneig", "masc"),
        ("mauchen", "neut"),
        ("pisel", "masc"),
        ("stumpe", "fem"),
        ("grilz", "neut"),
        ("weiler", "masc"),
    ];
    let non_rhymes = [
        ("plaupf", "neut"),
        ("snauk", "neut"),
        ("fnuhf", "masc"),
        ("bnaupf", "fem"),
        ("pleik", "neut"),
        ("vuzj", "masc"),
        ("ploxt", "fem"),
        ("tnuv", "neut"),
        ("fraiw", "masc"),
        ("bryx", "neut"),
        ("gmoj", "fem"),
        ("sprouq", "neut"),
    ];
    let mut out = Vec::new();
    for (list, rhyme) in [(&rhymes, true), (&non_rhymes, false)] {
        for (i, (lemma, gender)) in list.iter().enumerate() {
            // Every third stimulus leaves its gender unspecified.
            let gender = (i % 3 != 2).then(|| gender.to_string());
            out.push(Stimulus {
                lemma: lemma.to_string(),
                gender,
                rhyme,
            });
        }
    }
    out
}

pub fn stimuli_to_tsv(stimuli: &[Stimulus]) -> String {
    stimuli
        .iter()
        .map(|s| {
            format!(
                "{}\t{}\t{}\n",
                s.lemma,
                s.gender.as_deref().unwrap_or("?"),
                if s.rhyme { "R" } else { "NR" }
            )
        })
        .collect()
}

/// File names of the bundled fixtures, in the order [`write_all`] writes
/// them.
pub const FIXTURE_FILES: [&str; 4] = ["english.tsv", "english_test.tsv", "german.tsv", "wug_stimuli.tsv"];

/// Every fixture file's name and contents.
pub fn rendered() -> Vec<(&'static str, String)> {
    let (en, en_test) = english();
    vec![
        (FIXTURE_FILES[0], en.to_tsv()),
        (FIXTURE_FILES[1], en_test.to_tsv()),
        (FIXTURE_FILES[2], german().to_tsv()),
        (FIXTURE_FILES[3], stimuli_to_tsv(&wug_stimuli())),
    ]
}

/// Writes every fixture into `dir`.
pub fn write_all(dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    rendered()
        .into_iter()
        .map(|(name, text)| {
            let path = dir.join(name);
            fs::write(&path, text).map_err(io_at(&path))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn english_composition() {
        let (train, test) = english();
        let count = |tag: &str| train.instances.iter().filter(|i| i.features.contains(tag)).count();
        assert_eq!(count("pl"), EN_PLURAL);
        assert_eq!(count("past"), EN_PAST);
        assert_eq!(count("prog"), EN_PROGRESSIVE);
        let irregular = |tag: &str| {
            train
                .instances
                .iter()
                .filter(|i| i.features.contains(tag) && train.is_irregular(i))
                .count()
        };
        assert_eq!(irregular("pl"), EN_PLURAL_IRREGULAR);
        assert_eq!(irregular("past"), EN_PAST_IRREGULAR);
        assert_eq!(irregular("prog"), 0);
        for inst in &train.instances {
            if train.is_irregular(inst) {
                assert!(!inst.change().is_suffixation());
            }
        }
        let train_lemmas: BTreeSet<String> = train.instances.iter().map(|i| i.lemma.to_string()).collect();
        assert!(test
            .instances
            .iter()
            .all(|i| !train_lemmas.contains(&i.lemma.to_string())));
        assert_eq!(test.len(), EN_TEST_REGULAR + EN_TEST_IRREGULAR);
    }

    #[test]
    fn german_composition() {
        let ds = german();
        assert_eq!(ds.len(), 442);
        for (change, size) in DE_CLASS_SIZES {
            let change: Change = change.parse().unwrap();
            let n = ds.instances.iter().filter(|i| i.change() == change).count();
            assert_eq!(n, size, "{change}");
        }
        assert!(ds.instances.iter().all(|i| i.features.len() == 1));
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(english().0, english().0);
        assert_eq!(german(), german());
        assert_eq!(wug_stimuli(), wug_stimuli());
    }
}
