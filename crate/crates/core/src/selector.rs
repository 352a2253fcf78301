//! The three-step search: entropy prefiltering, then alternating forward
//! selection on CODEC and Gram-Schmidt batch deletion.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{CodecValue, ConditionalCodec, NeighborBackend, UnconditionalCodec};
use crate::data::{standardize, Dataset, StandardizedView};
use crate::error::{Error, Result};
use crate::ortho::{batch_delete, OrthoBasis};
use crate::scalar::Scalar;
use crate::screening::prefilter;
use crate::seed;

/// Stream key reserved for the conditioning-set neighbor map of an iteration.
const GIVEN_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Tnvs,
    /// Plain CODEC forward selection: no entropy filter, no batch deletion,
    /// stop once no candidate scores above zero.
    Foci,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    /// Uninformative threshold on the entropy score.
    pub alpha1: f64,
    /// Relevant threshold on the best CODEC.
    pub alpha2: f64,
    /// Redundant threshold on the Gram-Schmidt residual variance.
    pub alpha3: f64,
    /// Maximum model size; `None` means `⌈n / ln n⌉`.
    pub d_max: Option<usize>,
    pub seed: u64,
    pub mode: Mode,
    /// Wall-clock cap in seconds.
    pub time_budget: Option<f64>,
    #[serde(skip)]
    pub backend: NeighborBackend,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        Self {
            alpha1: 0.01,
            alpha2: -0.01,
            alpha3: 0.01,
            d_max: None,
            seed: 0,
            mode: Mode::Tnvs,
            time_budget: None,
            backend: NeighborBackend::Auto,
        }
    }
}

impl SelectorConfig {
    pub fn foci() -> Self {
        Self {
            mode: Mode::Foci,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha1 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha1 must be >= 0, got {}",
                self.alpha1
            )));
        }
        if !(self.alpha3 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha3 must be >= 0, got {}",
                self.alpha3
            )));
        }
        if !self.alpha2.is_finite() {
            return Err(Error::InvalidParameter("alpha2 must be finite".into()));
        }
        if self.d_max == Some(0) {
            return Err(Error::InvalidParameter("d_max must be >= 1".into()));
        }
        if let Some(t) = self.time_budget {
            if !(t >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "time budget must be >= 0, got {t}"
                )));
            }
        }
        Ok(())
    }

    pub fn effective_d_max(&self, n: usize) -> usize {
        self.d_max.unwrap_or_else(|| default_d_max(n))
    }
}

/// `⌈n / ln n⌉`.
pub fn default_d_max(n: usize) -> usize {
    let n = n.max(3) as f64;
    (n / n.ln()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    #[serde(rename = "relevance-below-threshold")]
    RelevanceBelowThreshold,
    #[serde(rename = "undefined-codec")]
    UndefinedCodec,
    #[serde(rename = "d_max-reached")]
    DMaxReached,
    #[serde(rename = "candidates-exhausted")]
    CandidatesExhausted,
    #[serde(rename = "time-budget")]
    TimeBudget,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::RelevanceBelowThreshold => "relevance-below-threshold",
            Termination::UndefinedCodec => "undefined-codec",
            Termination::DMaxReached => "d_max-reached",
            Termination::CandidatesExhausted => "candidates-exhausted",
            Termination::TimeBudget => "time-budget",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedPredictor {
    pub index: usize,
    /// Winning relevance score at the step this predictor was selected.
    pub relevance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UninformativePredictor {
    pub index: usize,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundantPredictor {
    pub index: usize,
    pub redundancy: f64,
    /// Size of the selected set when this predictor was deleted.
    pub selected_count: usize,
}

/// One pass of the forward-selection loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Candidates scored in this iteration.
    pub candidates: usize,
    pub best_index: Option<usize>,
    pub best_score: Option<CodecValue>,
    /// Candidates left after selection and batch deletion.
    pub remaining: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub p: usize,
    /// Relevant subset in selection order.
    pub selected: Vec<SelectedPredictor>,
    pub uninformative: Vec<UninformativePredictor>,
    pub redundant: Vec<RedundantPredictor>,
    /// Conditionally independent subset, ascending.
    pub cond_independent: Vec<usize>,
    pub termination: Termination,
    pub trace: Vec<IterationRecord>,
    pub elapsed_ms: f64,
}

impl SelectionResult {
    pub fn selected_indices(&self) -> Vec<usize> {
        self.selected.iter().map(|s| s.index).collect()
    }

    pub fn uninformative_indices(&self) -> Vec<usize> {
        self.uninformative.iter().map(|u| u.index).collect()
    }

    pub fn redundant_indices(&self) -> Vec<usize> {
        self.redundant.iter().map(|r| r.index).collect()
    }

    /// Subset id per column: 0 = selected, 1 = uninformative, 2 = redundant,
    /// 3 = conditionally independent. `None` marks a column missing from
    /// every subset.
    pub fn assignment(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.p];
        for (k, idx) in [
            self.selected_indices(),
            self.uninformative_indices(),
            self.redundant_indices(),
            self.cond_independent.clone(),
        ]
        .into_iter()
        .enumerate()
        {
            for j in idx {
                out[j] = Some(k);
            }
        }
        out
    }

    /// True when the four subsets are pairwise disjoint and cover `0..p`.
    pub fn is_partition(&self) -> bool {
        let total = self.selected.len()
            + self.uninformative.len()
            + self.redundant.len()
            + self.cond_independent.len();
        total == self.p && self.assignment().iter().all(Option::is_some)
    }
}

/// Relevance of candidate `j` given the selected columns `selected` of the
/// standardized view: unconditional CODEC when nothing is selected yet,
/// conditional CODEC otherwise. `rng` supplies all neighbor ties.
pub fn relevance_score<T: Scalar, R: rand::Rng + ?Sized>(
    y: &[T],
    j: usize,
    selected: &[usize],
    view: &StandardizedView<T>,
    rng: &mut R,
) -> Result<CodecValue> {
    if selected.contains(&j) {
        return Err(Error::InvalidParameter(format!(
            "candidate {j} is already selected"
        )));
    }
    if selected.is_empty() {
        crate::codec::codec_unconditional(y, view.column(j), rng)
    } else {
        let given: Vec<&[T]> = selected.iter().map(|&s| view.column(s)).collect();
        crate::codec::codec_conditional(y, view.column(j), &given, rng)
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Score every candidate; `None` when the shared denominator vanishes.
fn score_candidates<T: Scalar>(
    y: &[T],
    view: &StandardizedView<T>,
    selected: &[usize],
    candidates: &[usize],
    iteration: u64,
    cfg: &SelectorConfig,
) -> Result<Option<Vec<f64>>> {
    let stream = |j: u64| seed::stream(&[cfg.seed, iteration, j]);
    let scores: Result<Vec<CodecValue>> = if selected.is_empty() {
        let codec = UnconditionalCodec::new(y)?.with_backend(cfg.backend);
        if codec.is_undefined() {
            return Ok(None);
        }
        candidates
            .par_iter()
            .map(|&j| codec.score(view.column(j), &mut stream(j as u64)))
            .collect()
    } else {
        let given: Vec<&[T]> = selected.iter().map(|&s| view.column(s)).collect();
        let codec =
            ConditionalCodec::with_backend(y, &given, &mut stream(GIVEN_STREAM), cfg.backend)?;
        if codec.is_undefined() {
            return Ok(None);
        }
        candidates
            .par_iter()
            .map(|&j| codec.score(view.column(j), &mut stream(j as u64)))
            .collect()
    };
    let scores = scores?;
    if scores.iter().any(|s| s.is_undefined()) {
        return Ok(None);
    }
    Ok(Some(
        scores.into_iter().filter_map(CodecValue::value).collect(),
    ))
}

/// Run the full search on `d`.
pub fn run_selection<T: Scalar>(d: &Dataset<T>, cfg: &SelectorConfig) -> Result<SelectionResult> {
    cfg.validate()?;
    let start = Instant::now();
    let budget = cfg.time_budget.map(Duration::from_secs_f64);
    let view = standardize(d);
    let y = d.response();
    let d_max = cfg.effective_d_max(d.n());

    let (uninformative, mut candidates) = match cfg.mode {
        Mode::Tnvs => {
            let pf = prefilter(d, cfg.alpha1);
            let uninf = pf
                .uninformative
                .into_iter()
                .map(|(index, s)| UninformativePredictor {
                    index,
                    entropy: s.value,
                })
                .collect();
            (uninf, pf.survivors)
        }
        Mode::Foci => {
            // zero-variance columns are dropped before plain forward selection
            let (constant, rest): (Vec<usize>, Vec<usize>) =
                (0..d.p()).partition(|&j| view.stddevs()[j] == T::zero());
            let uninf = constant
                .into_iter()
                .map(|index| UninformativePredictor {
                    index,
                    entropy: 0.0,
                })
                .collect();
            (uninf, rest)
        }
    };

    let mut selected: Vec<SelectedPredictor> = Vec::new();
    let mut redundant: Vec<RedundantPredictor> = Vec::new();
    let mut trace = Vec::new();
    let mut basis = OrthoBasis::new(d.n());

    let termination = loop {
        if candidates.is_empty() {
            break Termination::CandidatesExhausted;
        }
        if selected.len() >= d_max {
            break Termination::DMaxReached;
        }
        if budget.is_some_and(|b| start.elapsed() >= b) {
            break Termination::TimeBudget;
        }

        let iteration = trace.len() as u64;
        let sel: Vec<usize> = selected.iter().map(|s| s.index).collect();
        let scored = candidates.len();
        let Some(scores) = score_candidates(y, &view, &sel, &candidates, iteration, cfg)? else {
            trace.push(IterationRecord {
                candidates: scored,
                best_index: None,
                best_score: Some(CodecValue::Undefined),
                remaining: scored,
                elapsed_ms: ms(start.elapsed()),
            });
            break Termination::UndefinedCodec;
        };

        // candidates are ascending, so strict `>` keeps the lowest index on ties
        let mut best = 0;
        for k in 1..scores.len() {
            if scores[k] > scores[best] {
                best = k;
            }
        }
        let (k, score) = (candidates[best], scores[best]);
        let stop = match cfg.mode {
            Mode::Tnvs => score < cfg.alpha2,
            Mode::Foci => score <= 0.0,
        };
        if stop {
            trace.push(IterationRecord {
                candidates: scored,
                best_index: Some(k),
                best_score: Some(CodecValue::Value(score)),
                remaining: scored,
                elapsed_ms: ms(start.elapsed()),
            });
            break Termination::RelevanceBelowThreshold;
        }

        candidates.remove(best);
        selected.push(SelectedPredictor {
            index: k,
            relevance: score,
        });

        if cfg.mode == Mode::Tnvs {
            // a residual below the floor adds no direction; the span is unchanged
            let _ = basis.extend(view.column(k));
            let del = batch_delete(&basis, &candidates, &view, cfg.alpha3);
            redundant.extend(
                del.redundant
                    .into_iter()
                    .map(|(index, s)| RedundantPredictor {
                        index,
                        redundancy: s.as_f64(),
                        selected_count: selected.len(),
                    }),
            );
            candidates = del.survivors;
        }

        trace.push(IterationRecord {
            candidates: scored,
            best_index: Some(k),
            best_score: Some(CodecValue::Value(score)),
            remaining: candidates.len(),
            elapsed_ms: ms(start.elapsed()),
        });
    };

    Ok(SelectionResult {
        p: d.p(),
        selected,
        uninformative,
        redundant,
        cond_independent: candidates,
        termination,
        trace,
        elapsed_ms: ms(start.elapsed()),
    })
}
