//! Tree export: JSON for reloading and Graphviz DOT for viewing.
//!
//! DOT labels follow the usual drawing conventions: ending sets are
//! bracketed and `|`-separated, absent branches are prefixed `¬`, and a
//! suffixation rule is shown as its suffix (`-t`, `-∅` when empty).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use atp_core::{Change, LearnedTree, Node};
use serde::{Deserialize, Serialize};

use crate::error::{io_at, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TreeFormat {
    #[default]
    Json,
    Dot,
}

pub fn to_json(tree: &LearnedTree) -> Result<String> {
    Ok(serde_json::to_string_pretty(tree)?)
}

pub fn from_json(text: &str) -> Result<LearnedTree> {
    Ok(serde_json::from_str(text)?)
}

pub fn load_tree(path: &Path) -> Result<LearnedTree> {
    from_json(&fs::read_to_string(path).map_err(io_at(path))?)
}

pub fn render(tree: &LearnedTree, format: TreeFormat) -> Result<String> {
    match format {
        TreeFormat::Json => to_json(tree),
        TreeFormat::Dot => Ok(to_dot(tree)),
    }
}

pub fn export_tree(tree: &LearnedTree, format: TreeFormat, path: &Path) -> Result<()> {
    let text = render(tree, format)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_at(dir))?;
    }
    fs::write(path, text).map_err(io_at(path))
}

/// Display form of a rule.
pub fn rule_label(change: &Change) -> String {
    if !change.is_suffixation() {
        return change.to_string();
    }
    if change.suffix.is_empty() {
        "-∅".to_string()
    } else {
        format!("-{}", change.suffix)
    }
}

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Escaped label text with one line per entry.
fn lines(parts: &[&str]) -> String {
    parts.iter().map(|p| escape(p)).collect::<Vec<_>>().join("\\n")
}

fn stats_line(node: &Node) -> String {
    let v = &node.stats().verdict;
    match v.threshold {
        Some(theta) => format!("n={} e={} θ={theta:.2}", v.n, v.e),
        None => format!("n={} e={}", v.n, v.e),
    }
}

pub fn to_dot(tree: &LearnedTree) -> String {
    fn walk(node: &Node, next: &mut usize, out: &mut String) -> usize {
        let id = *next;
        *next += 1;
        match node {
            Node::Leaf { rule, memorized, .. } => {
                let head = match rule {
                    Some(change) => rule_label(change),
                    None => "memorized".to_string(),
                };
                let label = lines(&[&head, &stats_line(node), &format!("{} listed", memorized.len())]);
                let _ = writeln!(out, "  n{id} [label=\"{label}\", shape=ellipse];");
            }
            Node::Internal {
                split, present, absent, ..
            } => {
                let label = lines(&[&stats_line(node), &format!("top {}", node.stats().top_change)]);
                let _ = writeln!(out, "  n{id} [label=\"{label}\"];");
                let p = walk(present, next, out);
                let a = walk(absent, next, out);
                let _ = writeln!(out, "  n{id} -> n{p} [label=\"{}\"];", escape(&split.to_string()));
                let _ = writeln!(out, "  n{id} -> n{a} [label=\"{}\"];", escape(&format!("¬{split}")));
            }
        }
        id
    }
    let mut out = String::from("digraph atp {\n  node [shape=box, fontname=\"Helvetica\"];\n");
    let mut next = 0;
    walk(&tree.root, &mut next, &mut out);
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use atp_core::{train, Instance, TrainConfig};

    #[test]
    fn single_leaf_has_no_edges() {
        let data = vec![
            Instance::new("walk", ["prog"], "walkɪŋ", 1.0),
            Instance::new("jump", ["prog"], "jumpɪŋ", 1.0),
        ];
        let tree = train(&data, &["prog".to_string()].into(), &TrainConfig::default()).unwrap();
        let dot = to_dot(&tree);
        assert_eq!(dot.matches("[label=").count(), 1);
        assert!(!dot.contains("->"));
        assert!(dot.contains("-ɪŋ"));
    }

    #[test]
    fn rule_labels() {
        assert_eq!(rule_label(&Change::suffixation("t")), "-t");
        assert_eq!(rule_label(&Change::suffixation("")), "-∅");
        assert_eq!(rule_label(&Change::new(3, "ang")), "-3+ang");
    }
}
