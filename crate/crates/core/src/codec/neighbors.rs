//! Nearest-neighbor maps with uniformly random tie-breaking.
//!
//! Every backend computes the full set of points at the minimum squared
//! Euclidean distance, orders it by index and lets [`pick`] choose one. The
//! random stream is consumed only when that set has more than one element, and
//! points are visited in index order, so all backends produce the same map
//! from the same stream.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::kdtree::KdTree;

/// Above this dimension the k-d tree is skipped in favour of a linear scan.
pub const SPATIAL_INDEX_MAX_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighborBackend {
    /// Sorted index in 1-D, k-d tree up to [`SPATIAL_INDEX_MAX_DIM`], scan above.
    #[default]
    Auto,
    /// Sorted index in 1-D, k-d tree otherwise, whatever the dimension.
    SpatialIndex,
    /// k-d tree in every dimension, including 1-D.
    KdTree,
    /// O(n²) scan.
    Exhaustive,
}

#[inline]
pub(crate) fn sqdist<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut s = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        s = s + d * d;
    }
    s
}

/// Each point's `k` nearest other points, ordered by (squared distance, index).
///
/// Used to search a space that extends this one by extra coordinates: the
/// squared distance in the extended space is at least the distance over the
/// leading coordinates, also in floating point, so a scan over this list can
/// stop at the first entry farther than the best extended distance so far.
#[derive(Debug, Clone)]
pub(crate) struct NeighborLists<T> {
    k: usize,
    index: Vec<u32>,
    dist: Vec<T>,
}

impl<T: Scalar> NeighborLists<T> {
    pub(crate) fn new(points: &[T], dim: usize, k: usize) -> Self {
        use rayon::prelude::*;
        let n = points.len() / dim;
        let k = k.min(n - 1);
        let rows: Vec<(Vec<u32>, Vec<T>)> = (0..n)
            .into_par_iter()
            .map(|h| {
                let q = &points[h * dim..(h + 1) * dim];
                let mut all: Vec<(T, u32)> = (0..n)
                    .filter(|&i| i != h)
                    .map(|i| (sqdist(q, &points[i * dim..(i + 1) * dim]), i as u32))
                    .collect();
                let cmp = |a: &(T, u32), b: &(T, u32)| {
                    a.0.partial_cmp(&b.0)
                        .unwrap_or(Ordering::Equal)
                        .then(a.1.cmp(&b.1))
                };
                if k < all.len() {
                    all.select_nth_unstable_by(k, cmp);
                    all.truncate(k);
                }
                all.sort_unstable_by(cmp);
                all.into_iter().map(|(d, i)| (i, d)).unzip()
            })
            .collect();
        let mut index = Vec::with_capacity(n * k);
        let mut dist = Vec::with_capacity(n * k);
        for (i, d) in rows {
            index.extend(i);
            dist.extend(d);
        }
        Self { k, index, dist }
    }

    /// Nearest neighbor of every point in the space `base ⊕ extra`, where
    /// `base` holds the points these lists were built from (row-major, `dim`
    /// coordinates) and `extra` one more coordinate per point. Matches
    /// [`nearest_neighbors_with`] on the concatenated points exactly.
    pub(crate) fn extended_nearest<R: Rng + ?Sized>(
        &self,
        base: &[T],
        dim: usize,
        extra: &[T],
        rng: &mut R,
    ) -> Vec<usize> {
        let n = extra.len();
        let complete = self.k == n - 1;
        let mut ties = Vec::new();
        (0..n)
            .map(|h| {
                let mut best = T::infinity();
                ties.clear();
                let mut settled = complete;
                let row = h * self.k..(h + 1) * self.k;
                for (&i, &g) in self.index[row.clone()].iter().zip(&self.dist[row]) {
                    if g > best {
                        settled = true;
                        break;
                    }
                    let i = i as usize;
                    let e = extra[h] - extra[i];
                    let d = g + e * e;
                    if d < best {
                        best = d;
                        ties.clear();
                        ties.push(i);
                    } else if d == best {
                        ties.push(i);
                    }
                }
                if !settled {
                    best = T::infinity();
                    ties.clear();
                    let q = &base[h * dim..(h + 1) * dim];
                    for i in (0..n).filter(|&i| i != h) {
                        let e = extra[h] - extra[i];
                        let d = sqdist(q, &base[i * dim..(i + 1) * dim]) + e * e;
                        if d < best {
                            best = d;
                            ties.clear();
                            ties.push(i);
                        } else if d == best {
                            ties.push(i);
                        }
                    }
                } else {
                    ties.sort_unstable();
                }
                pick(&ties, rng)
            })
            .collect()
    }
}

/// Choose uniformly among `ties` (ascending indices).
#[inline]
pub(crate) fn pick<R: Rng + ?Sized>(ties: &[usize], rng: &mut R) -> usize {
    match ties.len() {
        0 => unreachable!("every point has at least one other point"),
        1 => ties[0],
        k => ties[rng.gen_range(0..k)],
    }
}

/// Nearest neighbor (self excluded) of each of the `n` row-major points of
/// dimension `dim`, using the automatic backend.
pub fn nearest_neighbors<T: Scalar, R: Rng + ?Sized>(
    points: &[T],
    dim: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    nearest_neighbors_with(points, dim, rng, NeighborBackend::Auto)
}

pub fn nearest_neighbors_with<T: Scalar, R: Rng + ?Sized>(
    points: &[T],
    dim: usize,
    rng: &mut R,
    backend: NeighborBackend,
) -> Result<Vec<usize>> {
    if dim == 0 {
        return Err(Error::InvalidParameter(
            "point dimension must be positive".into(),
        ));
    }
    if !points.len().is_multiple_of(dim) {
        return Err(Error::DimensionMismatch(format!(
            "{} coordinates do not divide into points of dimension {dim}",
            points.len()
        )));
    }
    let n = points.len() / dim;
    if n < 2 {
        return Err(Error::TooFewRows { min: 2, found: n });
    }
    let out = match backend {
        NeighborBackend::Exhaustive => exhaustive(points, dim, rng),
        NeighborBackend::KdTree => kd(points, dim, rng),
        NeighborBackend::SpatialIndex if dim == 1 => sorted_1d(points, rng),
        NeighborBackend::SpatialIndex => kd(points, dim, rng),
        NeighborBackend::Auto if dim == 1 => sorted_1d(points, rng),
        NeighborBackend::Auto if dim <= SPATIAL_INDEX_MAX_DIM => kd(points, dim, rng),
        NeighborBackend::Auto => exhaustive(points, dim, rng),
    };
    Ok(out)
}

fn exhaustive<T: Scalar, R: Rng + ?Sized>(points: &[T], dim: usize, rng: &mut R) -> Vec<usize> {
    let n = points.len() / dim;
    let mut ties = Vec::new();
    (0..n)
        .map(|h| {
            let q = &points[h * dim..(h + 1) * dim];
            let mut best = T::infinity();
            ties.clear();
            for i in (0..n).filter(|&i| i != h) {
                let d = sqdist(q, &points[i * dim..(i + 1) * dim]);
                if d < best {
                    best = d;
                    ties.clear();
                    ties.push(i);
                } else if d == best {
                    ties.push(i);
                }
            }
            pick(&ties, rng)
        })
        .collect()
}

fn kd<T: Scalar, R: Rng + ?Sized>(points: &[T], dim: usize, rng: &mut R) -> Vec<usize> {
    let n = points.len() / dim;
    let tree = KdTree::new(points, dim);
    let mut ties = Vec::new();
    (0..n)
        .map(|h| {
            tree.nearest_ties(&points[h * dim..(h + 1) * dim], h, &mut ties);
            pick(&ties, rng)
        })
        .collect()
}

/// 1-D search over the points sorted by (value, index).
///
/// Squared distance is non-decreasing when walking away from a point in sorted
/// order, so the tie set is a contiguous block of sorted positions around it
/// and its bounds can be found by binary search.
fn sorted_1d<T: Scalar, R: Rng + ?Sized>(x: &[T], rng: &mut R) -> Vec<usize> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut pos = vec![0; n];
    for (k, &i) in order.iter().enumerate() {
        pos[i] = k;
    }
    let d2 = |k: usize, v: T| {
        let d = x[order[k]] - v;
        d * d
    };

    let mut ties = Vec::new();
    (0..n)
        .map(|h| {
            let k = pos[h];
            let v = x[h];
            let left = (k > 0).then(|| d2(k - 1, v));
            let right = (k + 1 < n).then(|| d2(k + 1, v));
            let best = match (left, right) {
                (Some(l), Some(r)) => l.min(r),
                (Some(l), None) => l,
                (None, Some(r)) => r,
                (None, None) => unreachable!(),
            };
            // positions [lo, k) and (k, hi] are at distance <= best
            let lo = if left == Some(best) {
                order[..k].partition_point(|&i| {
                    let d = x[i] - v;
                    d * d > best
                })
            } else {
                k
            };
            let hi = if right == Some(best) {
                k + order[k + 1..].partition_point(|&i| {
                    let d = x[i] - v;
                    d * d <= best
                })
            } else {
                k
            };
            let count = hi - lo;
            if x[order[lo]] == v && x[order[hi]] == v {
                // one value group: sorted positions are already in index order
                if count == 1 {
                    return order[if lo == k { hi } else { lo }];
                }
                let mut r = lo + rng.gen_range(0..count);
                if r >= k {
                    r += 1;
                }
                order[r]
            } else {
                ties.clear();
                ties.extend(order[lo..k].iter().chain(&order[k + 1..=hi]).copied());
                ties.sort_unstable();
                pick(&ties, rng)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ALL: [NeighborBackend; 4] = [
        NeighborBackend::Auto,
        NeighborBackend::SpatialIndex,
        NeighborBackend::KdTree,
        NeighborBackend::Exhaustive,
    ];

    #[test]
    fn unique_minima_1d() {
        for b in ALL {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let nn = nearest_neighbors_with(&[1.0, 2.0, 4.0], 1, &mut rng, b).unwrap();
            assert_eq!(nn, vec![1, 0, 1], "{b:?}");
        }
    }

    #[test]
    fn symmetric_tie_is_fair() {
        let mut counts = [0usize; 3];
        for seed in 0..4000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let nn = nearest_neighbors(&[0.0, 1.0, 2.0], 1, &mut rng).unwrap();
            assert_eq!(nn[0], 1);
            assert_eq!(nn[2], 1);
            counts[nn[1]] += 1;
        }
        assert_eq!(counts[1], 0);
        // binomial(4000, 1/2): sd ≈ 32
        assert!((counts[0] as i64 - 2000).abs() < 200, "{counts:?}");
    }

    #[test]
    fn never_returns_self() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts = vec![3.0; 50];
        for b in ALL {
            let nn = nearest_neighbors_with(&pts, 1, &mut rng, b).unwrap();
            assert!(nn.iter().enumerate().all(|(h, &m)| m != h));
        }
    }

    #[test]
    fn backends_agree_on_heavy_ties() {
        let mut gen = ChaCha8Rng::seed_from_u64(11);
        for dim in 1..=3 {
            for trial in 0..20 {
                let n = 2 + gen.gen_range(0..120);
                let levels = 1 + trial % 7;
                let pts: Vec<f64> = (0..n * dim)
                    .map(|_| gen.gen_range(0..levels) as f64 * 0.5)
                    .collect();
                let reference = nearest_neighbors_with(
                    &pts,
                    dim,
                    &mut ChaCha8Rng::seed_from_u64(trial as u64),
                    NeighborBackend::Exhaustive,
                )
                .unwrap();
                for b in ALL {
                    let got = nearest_neighbors_with(
                        &pts,
                        dim,
                        &mut ChaCha8Rng::seed_from_u64(trial as u64),
                        b,
                    )
                    .unwrap();
                    assert_eq!(got, reference, "dim {dim} backend {b:?}");
                }
            }
        }
    }

    #[test]
    fn sparse_column_ties_spread_over_zero_block() {
        let mut x = vec![0.0f64; 1000];
        x[10] = 0.3;
        x[500] = -0.2;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let nn = nearest_neighbors(&x, 1, &mut rng).unwrap();
        assert_eq!(x[nn[10]], 0.0);
        assert_eq!(x[nn[500]], 0.0);
        let distinct: std::collections::HashSet<_> = nn.iter().collect();
        assert!(distinct.len() > 500);
    }

    #[test]
    fn rejects_single_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(nearest_neighbors(&[1.0], 1, &mut rng).is_err());
        assert!(nearest_neighbors(&[1.0, 2.0, 3.0], 2, &mut rng).is_err());
    }

    #[test]
    fn extended_lists_match_exhaustive() {
        let mut gen = ChaCha8Rng::seed_from_u64(11);
        let n = 120;
        let dim = 3;
        // coarse grid values give many exact ties in both spaces
        let base: Vec<f64> = (0..n * dim).map(|_| gen.gen_range(0..3) as f64).collect();
        let extra: Vec<f64> = (0..n).map(|_| gen.gen_range(0..4) as f64 * 0.5).collect();
        let mut joint = Vec::new();
        for h in 0..n {
            joint.extend_from_slice(&base[h * dim..(h + 1) * dim]);
            joint.push(extra[h]);
        }
        for k in [1, 4, 30, n - 1, 5 * n] {
            let lists = NeighborLists::new(&base, dim, k);
            let mut r1 = ChaCha8Rng::seed_from_u64(3);
            let mut r2 = ChaCha8Rng::seed_from_u64(3);
            let got = lists.extended_nearest(&base, dim, &extra, &mut r1);
            let want =
                nearest_neighbors_with(&joint, dim + 1, &mut r2, NeighborBackend::Exhaustive)
                    .unwrap();
            assert_eq!(got, want, "k = {k}");
        }
    }
}
