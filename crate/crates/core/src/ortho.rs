//! Incremental Gram-Schmidt basis of the selected predictors and the
//! redundancy score used for batch deletion.

use rayon::prelude::*;

use crate::data::StandardizedView;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative floor on `‖Z‖² / n` below which a new column is treated as lying
/// in the span of the basis.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Mutually orthogonal columns `Z_1..Z_q` spanning the selected predictors.
#[derive(Debug, Clone)]
pub struct OrthoBasis<T: Scalar> {
    n: usize,
    columns: Vec<Vec<T>>,
    norms_sq: Vec<T>,
}

impl<T: Scalar> OrthoBasis<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            columns: Vec::new(),
            norms_sq: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, k: usize) -> &[T] {
        &self.columns[k]
    }

    pub fn norms_sq(&self) -> &[T] {
        &self.norms_sq
    }

    /// `x` minus its projection onto the basis, subtracting one direction at
    /// a time from the running residual (modified Gram-Schmidt).
    pub fn residual(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n, "column length differs from basis");
        let mut v = x.to_vec();
        for (z, &nz) in self.columns.iter().zip(&self.norms_sq) {
            let coef = dot(&v, z) / nz;
            for (vi, &zi) in v.iter_mut().zip(z) {
                *vi = *vi - coef * zi;
            }
        }
        v
    }

    /// Append the orthogonalized `x`. Fails, leaving the basis unchanged, when
    /// the residual norm is below the floor.
    pub fn extend(&mut self, x: &[T]) -> Result<()> {
        let z = self.residual(x);
        let norm_sq = dot(&z, &z);
        let floor = T::of(RESIDUAL_FLOOR * self.n as f64);
        if !(norm_sq >= floor) {
            return Err(Error::DegenerateResidual {
                norm_sq: norm_sq.as_f64(),
                floor: floor.as_f64(),
            });
        }
        self.columns.push(z);
        self.norms_sq.push(norm_sq);
        Ok(())
    }

    /// Population variance of the residual of `xj`. For a standardized column
    /// this is the fraction of its variance left unexplained by the basis.
    pub fn redundancy_score(&self, xj: &[T]) -> T {
        let r = self.residual(xj);
        let n = T::of(self.n as f64);
        let mean = r.iter().copied().sum::<T>() / n;
        r.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n
    }
}

/// Functional form of [`OrthoBasis::extend`].
pub fn extend_basis<T: Scalar>(mut b: OrthoBasis<T>, x_new: &[T]) -> Result<OrthoBasis<T>> {
    b.extend(x_new)?;
    Ok(b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchDeletion<T> {
    /// Deleted candidates with their redundancy score, in candidate order.
    pub redundant: Vec<(usize, T)>,
    pub survivors: Vec<usize>,
}

/// Remove every candidate whose redundancy score against `b` is below
/// `alpha3`.
pub fn batch_delete<T: Scalar>(
    b: &OrthoBasis<T>,
    candidates: &[usize],
    view: &StandardizedView<T>,
    alpha3: f64,
) -> BatchDeletion<T> {
    let threshold = T::of(alpha3);
    let scores: Vec<T> = candidates
        .par_iter()
        .map(|&j| b.redundancy_score(view.column(j)))
        .collect();
    let mut redundant = Vec::new();
    let mut survivors = Vec::new();
    for (&j, s) in candidates.iter().zip(scores) {
        if s < threshold {
            redundant.push((j, s));
        } else {
            survivors.push(j);
        }
    }
    BatchDeletion {
        redundant,
        survivors,
    }
}
