//! Human-readable report and the versioned JSON result document.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::selector::{SelectionResult, SelectorConfig, Termination};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedEntry {
    pub index: usize,
    pub name: String,
    pub rels: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UninformativeEntry {
    pub index: usize,
    pub name: String,
    pub uins: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundantEntry {
    pub index: usize,
    pub name: String,
    pub reds: f64,
    pub selected_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub index: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subsets {
    pub selected: Vec<SelectedEntry>,
    pub uninformative: Vec<UninformativeEntry>,
    pub redundant: Vec<RedundantEntry>,
    pub cond_independent: Vec<IndexEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub index: usize,
    pub name: String,
    pub rels: f64,
    pub candidates_remaining: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

/// Machine-readable selection output. Indices are 0-based column positions
/// in the input predictor order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub version: String,
    pub config: SelectorConfig,
    pub subsets: Subsets,
    pub selection_trace: Vec<TraceEntry>,
    pub termination: Termination,
    pub timings: Timings,
}

impl ResultDocument {
    /// `config` should carry the resolved `d_max`.
    pub fn new(result: &SelectionResult, names: &[String], config: SelectorConfig) -> Self {
        let name = |j: usize| names[j].clone();
        let subsets = Subsets {
            selected: result
                .selected
                .iter()
                .map(|s| SelectedEntry {
                    index: s.index,
                    name: name(s.index),
                    rels: s.relevance,
                })
                .collect(),
            uninformative: result
                .uninformative
                .iter()
                .map(|u| UninformativeEntry {
                    index: u.index,
                    name: name(u.index),
                    uins: u.entropy,
                })
                .collect(),
            redundant: result
                .redundant
                .iter()
                .map(|r| RedundantEntry {
                    index: r.index,
                    name: name(r.index),
                    reds: r.redundancy,
                    selected_count: r.selected_count,
                })
                .collect(),
            cond_independent: result
                .cond_independent
                .iter()
                .map(|&j| IndexEntry {
                    index: j,
                    name: name(j),
                })
                .collect(),
        };
        let selection_trace = result
            .trace
            .iter()
            .zip(&result.selected)
            .map(|(t, s)| TraceEntry {
                index: s.index,
                name: name(s.index),
                rels: s.relevance,
                candidates_remaining: t.remaining,
                elapsed_ms: t.elapsed_ms,
            })
            .collect();
        Self {
            version: SCHEMA_VERSION.to_owned(),
            config,
            subsets,
            selection_trace,
            termination: result.termination,
            timings: Timings {
                total_ms: result.elapsed_ms,
            },
        }
    }

    /// Copy with every wall-clock field zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Self {
        let mut doc = self.clone();
        doc.timings.total_ms = 0.0;
        for t in &mut doc.selection_trace {
            t.elapsed_ms = 0.0;
        }
        doc
    }
}

/// Plain-text summary of a selection.
pub fn describe(result: &SelectionResult, names: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Relevant predictors ({}):", result.selected.len());
    if result.selected.is_empty() {
        let _ = writeln!(out, "  no relevant predictors found");
    }
    for (k, s) in result.selected.iter().enumerate() {
        let _ = writeln!(
            out,
            "  {:>3}. {:<16} RelS = {:.4}",
            k + 1,
            names[s.index],
            s.relevance
        );
    }

    let _ = writeln!(
        out,
        "Uninformative predictors ({}):",
        result.uninformative.len()
    );
    for u in &result.uninformative {
        let _ = writeln!(out, "  {:<16} UinS = {:.4}", names[u.index], u.entropy);
    }

    let _ = writeln!(out, "Redundant predictors ({}):", result.redundant.len());
    for r in &result.redundant {
        let _ = writeln!(
            out,
            "  {:<16} RedS = {:.2e}  (deleted at |S| = {})",
            names[r.index], r.redundancy, r.selected_count
        );
    }

    let _ = writeln!(
        out,
        "Conditionally independent predictors ({}):",
        result.cond_independent.len()
    );
    if !result.cond_independent.is_empty() {
        let shown: Vec<&str> = result
            .cond_independent
            .iter()
            .take(20)
            .map(|&j| names[j].as_str())
            .collect();
        let more = result.cond_independent.len().saturating_sub(shown.len());
        let _ = write!(out, "  {}", shown.join(", "));
        if more > 0 {
            let _ = write!(out, ", ... ({more} more)");
        }
        let _ = writeln!(out);
    }

    let _ = writeln!(out, "Search trace:");
    for (k, t) in result.trace.iter().enumerate() {
        let best = match (t.best_index, t.best_score) {
            (Some(j), Some(s)) => format!("{} ({s})", names[j]),
            (_, Some(s)) => s.to_string(),
            _ => "-".into(),
        };
        let _ = writeln!(
            out,
            "  iter {:>3}: {:>6} candidates, best {best}, {:>6} left, {:.1} ms",
            k + 1,
            t.candidates,
            t.remaining,
            t.elapsed_ms
        );
    }
    let _ = writeln!(out, "Termination: {}", result.termination.as_str());
    let _ = writeln!(out, "Total time: {:.1} ms", result.elapsed_ms);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_selection_message() {
        let r = SelectionResult {
            p: 1,
            selected: vec![],
            uninformative: vec![],
            redundant: vec![],
            cond_independent: vec![0],
            termination: Termination::RelevanceBelowThreshold,
            trace: vec![],
            elapsed_ms: 1.0,
        };
        let text = describe(&r, &["a".to_string()]);
        assert!(text.contains("no relevant predictors found"));
        assert!(text.contains("relevance-below-threshold"));
    }
}
