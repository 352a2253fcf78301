//! Uninformative-predictor filter based on discretized Shannon entropy.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Each distinct value is a cell.
    DistinctValues,
    /// `⌈log2 n⌉ + 1` equal-width bins over `[min, max]`.
    EqualWidth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    pub labels: Vec<usize>,
    pub cells: usize,
    pub scheme: Scheme,
}

/// Entropy (nats) of a discretized predictor; `0 <= value <= ln(bins)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyScore {
    pub value: f64,
    pub bins: usize,
    pub scheme: Scheme,
}

fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Number of equal-width bins used for `n` observations.
pub fn equal_width_bins(n: usize) -> usize {
    ceil_log2(n) + 1
}

pub fn discretize<T: Scalar>(x: &[T]) -> Discretization {
    let n = x.len();
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    sorted.dedup();

    if sorted.len() <= ceil_sqrt(n) {
        let labels = x
            .iter()
            .map(|v| {
                sorted
                    .binary_search_by(|s| s.partial_cmp(v).unwrap_or(Ordering::Equal))
                    .expect("value present in its own support")
            })
            .collect();
        return Discretization {
            labels,
            cells: sorted.len(),
            scheme: Scheme::DistinctValues,
        };
    }

    let bins = equal_width_bins(n);
    let lo = sorted[0];
    let range = sorted[sorted.len() - 1] - lo;
    let scale = T::of(bins as f64) / range;
    let labels = x
        .iter()
        .map(|&v| {
            let k = ((v - lo) * scale).floor().to_usize().unwrap_or(0);
            k.min(bins - 1)
        })
        .collect();
    Discretization {
        labels,
        cells: bins,
        scheme: Scheme::EqualWidth,
    }
}

/// Shannon entropy of the discretized predictor (the uninformative score).
pub fn uninformative_score<T: Scalar>(x: &[T]) -> EntropyScore {
    let d = discretize(x);
    let mut counts = vec![0usize; d.cells];
    for &k in &d.labels {
        counts[k] += 1;
    }
    let n = x.len() as f64;
    let value = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum::<f64>()
        .max(0.0);
    EntropyScore {
        value,
        bins: d.cells,
        scheme: d.scheme,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prefilter {
    /// Removed columns with their entropy, ascending by index.
    pub uninformative: Vec<(usize, EntropyScore)>,
    pub survivors: Vec<usize>,
}

/// Split the columns into those with entropy below `alpha1` and the rest.
pub fn prefilter<T: Scalar>(d: &Dataset<T>, alpha1: f64) -> Prefilter {
    let scores: Vec<EntropyScore> = (0..d.p())
        .into_par_iter()
        .map(|j| uninformative_score(d.column(j)))
        .collect();
    let mut uninformative = Vec::new();
    let mut survivors = Vec::new();
    for (j, s) in scores.into_iter().enumerate() {
        if s.value < alpha1 {
            uninformative.push((j, s));
        } else {
            survivors.push(j);
        }
    }
    Prefilter {
        uninformative,
        survivors,
    }
}
