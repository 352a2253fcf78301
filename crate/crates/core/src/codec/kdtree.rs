//! Exact nearest-neighbor k-d tree that reports every point at the minimum
//! squared distance, so callers can break ties themselves.

use std::cmp::Ordering;

use crate::scalar::Scalar;

use super::neighbors::sqdist;

const LEAF_SIZE: usize = 8;

enum Node<T> {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: T,
        left: usize,
        right: usize,
    },
}

/// k-d tree over `n` row-major points of dimension `dim`.
///
/// Left children hold coordinates `<= value` on the split axis, right children
/// `>= value`.
pub struct KdTree<'a, T: Scalar> {
    points: &'a [T],
    dim: usize,
    order: Vec<usize>,
    nodes: Vec<Node<T>>,
}

impl<'a, T: Scalar> KdTree<'a, T> {
    pub fn new(points: &'a [T], dim: usize) -> Self {
        assert!(dim > 0 && points.len().is_multiple_of(dim));
        let n = points.len() / dim;
        let mut tree = Self {
            points,
            dim,
            order: (0..n).collect(),
            nodes: Vec::with_capacity(2 * n / LEAF_SIZE + 1),
        };
        if n > 0 {
            tree.build(0, n);
        }
        tree
    }

    fn coord(&self, i: usize, axis: usize) -> T {
        self.points[i * self.dim + axis]
    }

    fn point(&self, i: usize) -> &[T] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Axis with the widest interquartile spread, falling back to the widest
    /// full range. Sparse coordinates have a wide range but split poorly, so
    /// the quartile spread is preferred. `None` when all points coincide.
    fn split_axis(&self, start: usize, end: usize) -> Option<usize> {
        let m = end - start;
        let (q1, q3) = (m / 4, (3 * m) / 4);
        let mut scratch: Vec<T> = Vec::with_capacity(m);
        let mut best_iqr = (T::zero(), 0);
        let mut best_range = (T::zero(), 0);
        for a in 0..self.dim {
            scratch.clear();
            scratch.extend(self.order[start..end].iter().map(|&i| self.coord(i, a)));
            let (lo, hi) = scratch
                .iter()
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            if hi - lo > best_range.0 {
                best_range = (hi - lo, a);
            }
            let cmp = |x: &T, y: &T| x.partial_cmp(y).unwrap_or(Ordering::Equal);
            let upper = *scratch.select_nth_unstable_by(q3, cmp).1;
            let lower = *scratch[..q3].select_nth_unstable_by(q1, cmp).1;
            if upper - lower > best_iqr.0 {
                best_iqr = (upper - lower, a);
            }
        }
        if best_iqr.0 > T::zero() {
            Some(best_iqr.1)
        } else if best_range.0 > T::zero() {
            Some(best_range.1)
        } else {
            None
        }
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }

        let Some(axis) = self.split_axis(start, end) else {
            // every point in this range coincides
            self.nodes.push(Node::Leaf { start, end });
            return id;
        };

        let mid = start + (end - start) / 2;
        let points = self.points;
        let dim = self.dim;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a * dim + axis]
                .partial_cmp(&points[b * dim + axis])
                .unwrap_or(Ordering::Equal)
        });
        let value = self.coord(self.order[mid], axis);

        self.nodes.push(Node::Leaf { start, end });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    /// All points `i != exclude` at the minimum squared distance from `query`,
    /// returned in ascending index order, together with that distance.
    pub fn nearest_ties(&self, query: &[T], exclude: usize, ties: &mut Vec<usize>) -> T {
        ties.clear();
        let mut best = T::infinity();
        if !self.nodes.is_empty() {
            self.search(0, query, exclude, &mut best, ties);
        }
        ties.sort_unstable();
        best
    }

    fn search(
        &self,
        node: usize,
        query: &[T],
        exclude: usize,
        best: &mut T,
        ties: &mut Vec<usize>,
    ) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    if i == exclude {
                        continue;
                    }
                    let d = sqdist(query, self.point(i));
                    if d < *best {
                        *best = d;
                        ties.clear();
                        ties.push(i);
                    } else if d == *best {
                        ties.push(i);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query[axis] - value;
                let (near, far) = if diff < T::zero() {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, query, exclude, best, ties);
                // `<=` keeps subtrees that may hold exact ties
                if diff * diff <= *best {
                    self.search(far, query, exclude, best, ties);
                }
            }
        }
    }
}
