use std::path::{Path, PathBuf};

use atp_core::corpus::SamplePlan;
use atp_core::{AnalogyMode, TrainConfig};
use atp_harness::experiment::{write_acquisition, write_growth};
use atp_harness::ExperimentSpec;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn spec(out: &Path, workers: usize, children: usize) -> ExperimentSpec {
    ExperimentSpec {
        dataset: fixture("english.tsv"),
        plan: SamplePlan::LogBinned { bins: 4, per_bin: 30 },
        children,
        test_set: Some(fixture("english_test.tsv")),
        stimuli: None,
        human_table: None,
        out_dir: out.to_path_buf(),
        seed: 77,
        workers,
        train: TrainConfig::default(),
        analogy: AnalogyMode::ApplyChange,
    }
}

#[test]
fn worker_count_does_not_change_tables() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in [1, 8] {
        let s = spec(&dir.path().join(workers.to_string()), workers, 6);
        let mut files = write_acquisition(&s).unwrap();
        files.extend(write_growth(&s).unwrap());
        outputs.push(files.iter().map(|f| std::fs::read(f).unwrap()).collect::<Vec<_>>());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn adding_children_keeps_existing_ones() {
    let dir = tempfile::tempdir().unwrap();
    let read = |children: usize| {
        let s = spec(&dir.path().join(children.to_string()), 0, children);
        let files = write_acquisition(&s).unwrap();
        std::fs::read_to_string(&files[0]).unwrap()
    };
    let small = read(3);
    let large = read(5);
    let rows_for = |text: &str| -> Vec<String> {
        text.lines()
            .filter(|l| matches!(l.split(',').next(), Some("0" | "1" | "2")))
            .map(String::from)
            .collect()
    };
    assert_eq!(rows_for(&small), rows_for(&large));
}

#[test]
fn zero_children_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(write_acquisition(&spec(dir.path(), 1, 0)).is_err());
}
