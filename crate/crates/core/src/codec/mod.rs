//! Conditional dependence coefficient (CODEC).
//!
//! Both forms are rank statistics over nearest-neighbor maps:
//!
//! * unconditional, `T(Y, Xj)`:
//!   `Σ (n·min(R_h, R_M(h)) − L_h²) / Σ L_h (n − L_h)`, where `M(h)` is the
//!   nearest neighbor of `x_hj` among the other observations;
//! * conditional, `T(Y, Xj | X_G)`:
//!   `Σ (min(R_h, R_M(h)) − min(R_h, R_N(h))) / Σ (R_h − min(R_h, R_N(h)))`,
//!   where `M(h)` is the neighbor in the joint space `(X_G, Xj)` and `N(h)`
//!   the neighbor in `X_G` alone.
//!
//! `R_h = #{i : y_i <= y_h}` and `L_h = #{i : y_i >= y_h}`; `R_M(h)` is the
//! rank of `y_M(h)` in the full sample. A zero denominator yields
//! [`CodecValue::Undefined`]. Sums are accumulated in exact integer
//! arithmetic, so a value is a pure function of the inputs and the tie stream.

mod kdtree;
mod neighbors;

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use kdtree::KdTree;
pub use neighbors::{
    nearest_neighbors, nearest_neighbors_with, NeighborBackend, SPATIAL_INDEX_MAX_DIM,
};

use neighbors::NeighborLists;

/// Length of the per-point candidate lists used for joint-space searches.
pub const NEIGHBOR_LIST_LEN: usize = 64;

/// Result of a CODEC evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CodecValue {
    Value(f64),
    /// The denominator is exactly zero.
    #[serde(with = "undefined_as_null")]
    Undefined,
}

mod undefined_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_none()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        Option::<()>::deserialize(d).and_then(|v| match v {
            None => Ok(()),
            Some(()) => Err(serde::de::Error::custom("expected null")),
        })
    }
}

impl CodecValue {
    fn from_parts(numerator: i128, denominator: i128) -> Self {
        debug_assert!(denominator >= 0, "CODEC denominators are nonnegative");
        if denominator == 0 {
            CodecValue::Undefined
        } else {
            CodecValue::Value(numerator as f64 / denominator as f64)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            CodecValue::Value(v) => Some(v),
            CodecValue::Undefined => None,
        }
    }

    pub fn is_undefined(self) -> bool {
        matches!(self, CodecValue::Undefined)
    }
}

impl fmt::Display for CodecValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodecValue::Value(v) => write!(f, "{v}"),
            CodecValue::Undefined => f.write_str("undefined"),
        }
    }
}

/// Inclusive ranks `R_h` and antiranks `L_h` of a response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankData {
    pub ranks: Vec<usize>,
    pub antiranks: Vec<usize>,
}

pub fn compute_ranks<T: Scalar>(y: &[T]) -> RankData {
    let n = y.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].partial_cmp(&y[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0; n];
    let mut antiranks = vec![0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && y[order[end]] == y[order[start]] {
            end += 1;
        }
        for &i in &order[start..end] {
            ranks[i] = end;
            antiranks[i] = n - start;
        }
        start = end;
    }
    RankData { ranks, antiranks }
}

fn check_len(what: &str, len: usize, n: usize) -> Result<()> {
    if len != n {
        return Err(Error::DimensionMismatch(format!(
            "{what} has {len} rows, response has {n}"
        )));
    }
    Ok(())
}

fn check_rows(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::TooFewRows { min: 3, found: n });
    }
    Ok(())
}

/// Unconditional CODEC with the response-only quantities precomputed, for
/// scoring many candidates against one response.
#[derive(Debug, Clone)]
pub struct UnconditionalCodec {
    ranks: RankData,
    denominator: i128,
    backend: NeighborBackend,
}

impl UnconditionalCodec {
    pub fn new<T: Scalar>(y: &[T]) -> Result<Self> {
        check_rows(y.len())?;
        let ranks = compute_ranks(y);
        let n = y.len() as i128;
        let denominator = ranks
            .antiranks
            .iter()
            .map(|&l| l as i128 * (n - l as i128))
            .sum();
        Ok(Self {
            ranks,
            denominator,
            backend: NeighborBackend::Auto,
        })
    }

    pub fn with_backend(mut self, backend: NeighborBackend) -> Self {
        self.backend = backend;
        self
    }

    /// True when the denominator vanishes, i.e. the response is constant.
    pub fn is_undefined(&self) -> bool {
        self.denominator == 0
    }

    pub fn ranks(&self) -> &RankData {
        &self.ranks
    }

    pub fn score<T: Scalar, R: Rng + ?Sized>(&self, xj: &[T], rng: &mut R) -> Result<CodecValue> {
        let n = self.ranks.ranks.len();
        check_len("candidate", xj.len(), n)?;
        if self.is_undefined() {
            return Ok(CodecValue::Undefined);
        }
        let m = nearest_neighbors_with(xj, 1, rng, self.backend)?;
        let r = &self.ranks.ranks;
        let l = &self.ranks.antiranks;
        let nn = n as i128;
        let numerator: i128 = (0..n)
            .map(|h| {
                let lh = l[h] as i128;
                nn * r[h].min(r[m[h]]) as i128 - lh * lh
            })
            .sum();
        Ok(CodecValue::from_parts(numerator, self.denominator))
    }
}

/// Conditional CODEC given a fixed conditioning set. The neighbor map `N` and
/// the denominator depend only on the response and the conditioning columns,
/// so they are computed once and shared by every candidate.
#[derive(Debug, Clone)]
pub struct ConditionalCodec<T: Scalar> {
    ranks: RankData,
    given: Vec<T>,
    q: usize,
    given_nn: Vec<usize>,
    denominator: i128,
    backend: NeighborBackend,
    lists: Option<NeighborLists<T>>,
}

impl<T: Scalar> ConditionalCodec<T> {
    /// Draws the ties of `N` from `rng`.
    pub fn new<R: Rng + ?Sized>(y: &[T], given: &[&[T]], rng: &mut R) -> Result<Self> {
        Self::with_backend(y, given, rng, NeighborBackend::Auto)
    }

    pub fn with_backend<R: Rng + ?Sized>(
        y: &[T],
        given: &[&[T]],
        rng: &mut R,
        backend: NeighborBackend,
    ) -> Result<Self> {
        let n = y.len();
        check_rows(n)?;
        let q = given.len();
        if q == 0 {
            return Err(Error::InvalidParameter("conditioning set is empty".into()));
        }
        for col in given {
            check_len("conditioning column", col.len(), n)?;
        }
        let mut rows = Vec::with_capacity(n * q);
        for h in 0..n {
            rows.extend(given.iter().map(|c| c[h]));
        }
        let given_nn = nearest_neighbors_with(&rows, q, rng, backend)?;
        let ranks = compute_ranks(y);
        let r = &ranks.ranks;
        let denominator = (0..n)
            .map(|h| (r[h] - r[h].min(r[given_nn[h]])) as i128)
            .sum();
        // candidate lists pay off once the joint space is beyond a cheap k-d tree
        let lists = (backend == NeighborBackend::Auto && denominator != 0 && q >= 3)
            .then(|| NeighborLists::new(&rows, q, NEIGHBOR_LIST_LEN));
        Ok(Self {
            ranks,
            given: rows,
            q,
            given_nn,
            denominator,
            backend,
            lists,
        })
    }

    /// True when the response is (empirically) a function of the conditioning
    /// set: every `N(h)` ranks at least as high as `h`.
    pub fn is_undefined(&self) -> bool {
        self.denominator == 0
    }

    pub fn denominator(&self) -> i128 {
        self.denominator
    }

    pub fn given_neighbors(&self) -> &[usize] {
        &self.given_nn
    }

    /// Draws the ties of `M` from `rng`.
    pub fn score<R: Rng + ?Sized>(&self, xj: &[T], rng: &mut R) -> Result<CodecValue> {
        let n = self.ranks.ranks.len();
        check_len("candidate", xj.len(), n)?;
        if self.is_undefined() {
            return Ok(CodecValue::Undefined);
        }
        let m = match &self.lists {
            Some(lists) => lists.extended_nearest(&self.given, self.q, xj, rng),
            None => {
                let dim = self.q + 1;
                let mut joint = Vec::with_capacity(n * dim);
                for (h, row) in self.given.chunks_exact(self.q).enumerate() {
                    joint.extend_from_slice(row);
                    joint.push(xj[h]);
                }
                nearest_neighbors_with(&joint, dim, rng, self.backend)?
            }
        };
        let r = &self.ranks.ranks;
        let numerator: i128 = (0..n)
            .map(|h| r[h].min(r[m[h]]) as i128 - r[h].min(r[self.given_nn[h]]) as i128)
            .sum();
        Ok(CodecValue::from_parts(numerator, self.denominator))
    }
}

/// `T(Y, Xj)`.
pub fn codec_unconditional<T: Scalar, R: Rng + ?Sized>(
    y: &[T],
    xj: &[T],
    rng: &mut R,
) -> Result<CodecValue> {
    UnconditionalCodec::new(y)?.score(xj, rng)
}

/// `T(Y, Xj | X_G)`. Ties of `N` are drawn from `rng` before those of `M`.
pub fn codec_conditional<T: Scalar, R: Rng + ?Sized>(
    y: &[T],
    xj: &[T],
    given: &[&[T]],
    rng: &mut R,
) -> Result<CodecValue> {
    check_len("candidate", xj.len(), y.len())?;
    ConditionalCodec::new(y, given, rng)?.score(xj, rng)
}
