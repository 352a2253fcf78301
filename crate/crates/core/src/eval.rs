//! Scoring selections against ground truth and the repeated-run benchmark.

use std::time::Instant;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::selector::{run_selection, SelectionResult, SelectorConfig, Termination};
use crate::simgen::{generate_setting, generate_toy, GroundTruth, Label, SimulationSpec};

/// Ground-truth category of a column, also used to index confusion rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GtType {
    Relevant = 0,
    Uninformative = 1,
    Redundant = 2,
    CondIndependent = 3,
}

/// Number of relevant blocks represented in `selected`, counting at most
/// `required` members per block.
pub fn coverage_of(selected: &[usize], gt: &GroundTruth) -> usize {
    gt.blocks
        .iter()
        .map(|b| {
            selected
                .iter()
                .filter(|j| b.members.contains(j))
                .count()
                .min(b.required)
        })
        .sum()
}

/// Length of the shortest prefix of `selected` reaching full coverage.
pub fn min_model_size(selected: &[usize], gt: &GroundTruth) -> Option<usize> {
    let full = gt.full_coverage();
    (0..=selected.len()).find(|&k| coverage_of(&selected[..k], gt) == full)
}

/// Category of each column given the selection order. In each relevant block
/// the first `required` selected members are relevant (falling back to the
/// block defaults) and the remaining members are redundant.
pub fn gt_types(selected: &[usize], gt: &GroundTruth) -> Vec<GtType> {
    let mut types: Vec<GtType> = gt
        .labels
        .iter()
        .map(|l| match l.label {
            Label::Uninformative => GtType::Uninformative,
            Label::OtherSignal => GtType::CondIndependent,
            Label::RelevantSignal | Label::RedundantCompanion => GtType::Redundant,
        })
        .collect();
    for b in &gt.blocks {
        for &m in &b.members {
            types[m] = GtType::Redundant;
        }
        let mut reps: Vec<usize> = selected
            .iter()
            .copied()
            .filter(|j| b.members.contains(j))
            .take(b.required)
            .collect();
        for &d in &b.defaults {
            if reps.len() >= b.required {
                break;
            }
            if !reps.contains(&d) && !selected.contains(&d) {
                reps.push(d);
            }
        }
        for r in reps {
            types[r] = GtType::Relevant;
        }
    }
    types
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Confusion {
    /// Share of each ground-truth category inside the selected set; `None`
    /// when nothing was selected.
    pub precision: Option<[f64; 4]>,
    /// Row = ground-truth category, column = output subset
    /// (selected, uninformative, redundant, conditionally independent).
    /// Rows with no members are all zero.
    pub recall: [[f64; 4]; 4],
    pub counts: [[usize; 4]; 4],
}

pub fn confusion(result: &SelectionResult, gt: &GroundTruth) -> Confusion {
    let types = gt_types(&result.selected_indices(), gt);
    let mut counts = [[0usize; 4]; 4];
    for (j, subset) in result.assignment().into_iter().enumerate() {
        let subset = subset.expect("selection result is a partition");
        counts[types[j] as usize][subset] += 1;
    }
    let mut recall = [[0.0; 4]; 4];
    for (row, c) in recall.iter_mut().zip(&counts) {
        let total: usize = c.iter().sum();
        if total > 0 {
            for (r, &v) in row.iter_mut().zip(c) {
                *r = v as f64 / total as f64;
            }
        }
    }
    let in_selected: usize = counts.iter().map(|c| c[0]).sum();
    let precision = (in_selected > 0).then(|| {
        let mut p = [0.0; 4];
        for (t, c) in counts.iter().enumerate() {
            p[t] = c[0] as f64 / in_selected as f64;
        }
        p
    });
    Confusion {
        precision,
        recall,
        counts,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scenario {
    Setting(SimulationSpec),
    Toy { n: usize, seed: u64 },
}

impl Scenario {
    fn generate(&self, dataset: u64) -> Result<(crate::data::Dataset<f64>, GroundTruth)> {
        match self {
            Scenario::Setting(spec) => generate_setting(&SimulationSpec {
                seed: seed::derive(&[spec.seed, dataset]),
                ..spec.clone()
            }),
            Scenario::Toy { n, seed } => generate_toy(*n, seed::derive(&[*seed, dataset])),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub dataset: usize,
    pub fold: usize,
    pub selected: Vec<usize>,
    pub coverage: usize,
    pub min_model_size: Option<usize>,
    pub termination: Termination,
    pub seconds: f64,
    pub confusion: Confusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub reps: usize,
    pub datasets: usize,
    pub full_coverage: usize,
    /// Fraction of runs covering every relevant block.
    pub pa: f64,
    /// Minimum model size over runs with full coverage.
    pub m_mean: Option<f64>,
    pub m_sd: Option<f64>,
    pub coverage_mean: f64,
    pub coverage_sd: f64,
    pub time_mean: f64,
    pub time_sd: f64,
    /// Mean over runs with a nonempty selection; order Rel, Uin, Red, Cind.
    pub precision_props: [f64; 4],
    /// Mean over runs of each nonempty row.
    pub recall_matrix: [[f64; 4]; 4],
    pub runs: Vec<RunSummary>,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}

impl EvalReport {
    /// Aggregate per-run summaries; order of `runs` does not matter.
    pub fn from_runs(runs: Vec<RunSummary>, datasets: usize, full_coverage: usize) -> Self {
        let reps = runs.len();
        let cov: Vec<f64> = runs.iter().map(|r| r.coverage as f64).collect();
        let m: Vec<f64> = runs
            .iter()
            .filter_map(|r| r.min_model_size.map(|v| v as f64))
            .collect();
        let t: Vec<f64> = runs.iter().map(|r| r.seconds).collect();
        let (coverage_mean, coverage_sd) = mean_sd(&cov);
        let (time_mean, time_sd) = mean_sd(&t);
        let (m_mean, m_sd) = if m.is_empty() {
            (None, None)
        } else {
            let (a, b) = mean_sd(&m);
            (Some(a), Some(b))
        };

        let mut precision_props = [0.0; 4];
        let with_selection: Vec<[f64; 4]> =
            runs.iter().filter_map(|r| r.confusion.precision).collect();
        if !with_selection.is_empty() {
            for p in &with_selection {
                for k in 0..4 {
                    precision_props[k] += p[k];
                }
            }
            for v in &mut precision_props {
                *v /= with_selection.len() as f64;
            }
        }

        let mut recall_matrix = [[0.0; 4]; 4];
        for (row, out) in recall_matrix.iter_mut().enumerate() {
            let rows: Vec<&[f64; 4]> = runs
                .iter()
                .filter(|r| r.confusion.counts[row].iter().sum::<usize>() > 0)
                .map(|r| &r.confusion.recall[row])
                .collect();
            if rows.is_empty() {
                continue;
            }
            for r in &rows {
                for k in 0..4 {
                    out[k] += r[k];
                }
            }
            for v in out.iter_mut() {
                *v /= rows.len() as f64;
            }
        }

        Self {
            reps,
            datasets,
            full_coverage,
            pa: runs.iter().filter(|r| r.coverage == full_coverage).count() as f64
                / reps.max(1) as f64,
            m_mean,
            m_sd,
            coverage_mean,
            coverage_sd,
            time_mean,
            time_sd,
            precision_props,
            recall_matrix,
            runs,
        }
    }

    pub fn table_header() -> &'static str {
        "method,Pa,M,M_sd,coverage,coverage_sd,time_s,time_sd"
    }

    /// One CSV row with the columns of [`EvalReport::table_header`].
    pub fn table_row(&self, method: &str) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
        format!(
            "{method},{:.2},{},{},{:.2},{:.2},{:.2},{:.2}",
            self.pa,
            opt(self.m_mean),
            opt(self.m_sd),
            self.coverage_mean,
            self.coverage_sd,
            self.time_mean,
            self.time_sd
        )
    }
}

/// Share of rows kept by each fold.
pub const FOLD_FRACTION: f64 = 0.9;

/// Generate `datasets` independent datasets and run `reps` selections spread
/// evenly across them, each on a fresh 90% row subsample.
pub fn run_benchmark(
    scenario: &Scenario,
    cfg: &SelectorConfig,
    reps: usize,
    datasets: usize,
) -> Result<EvalReport> {
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be >= 1".into()));
    }
    let datasets = datasets.clamp(1, reps);
    let mut runs = Vec::with_capacity(reps);
    let mut full = 0;
    for d in 0..datasets {
        let (data, gt) = scenario.generate(d as u64)?;
        full = gt.full_coverage();
        let folds = reps / datasets + usize::from(d < reps % datasets);
        let n = data.n();
        let keep = ((FOLD_FRACTION * n as f64).round() as usize).clamp(3, n);
        for f in 0..folds {
            let mut rng = seed::stream(&[cfg.seed, d as u64, f as u64, 0xF01D]);
            let mut rows = sample(&mut rng, n, keep).into_vec();
            rows.sort_unstable();
            let sub = data.select_rows(&rows)?;
            let run_cfg = SelectorConfig {
                seed: seed::derive(&[cfg.seed, d as u64, f as u64]),
                ..cfg.clone()
            };
            let started = Instant::now();
            let result = run_selection(&sub, &run_cfg)?;
            let seconds = started.elapsed().as_secs_f64();
            let selected = result.selected_indices();
            runs.push(RunSummary {
                dataset: d,
                fold: f,
                coverage: coverage_of(&selected, &gt),
                min_model_size: min_model_size(&selected, &gt),
                termination: result.termination,
                seconds,
                confusion: confusion(&result, &gt),
                selected,
            });
        }
    }
    Ok(EvalReport::from_runs(runs, datasets, full))
}
