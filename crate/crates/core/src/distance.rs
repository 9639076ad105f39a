//! Frame angle distance, DTW alignment and token-pair distance tables.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::MetricError;
use crate::features::FeatureSequence;
use crate::scalar::Scalar;

fn norm<T: Scalar>(u: &[T]) -> T {
    u.iter().fold(T::zero(), |acc, a| acc + *a * *a).sqrt()
}

/// `u / |u|`, or the zero vector when `u` is zero.
fn unit<T: Scalar>(u: &[T]) -> Vec<T> {
    let n = norm(u);
    if n == T::zero() {
        vec![T::zero(); u.len()]
    } else {
        u.iter().map(|v| *v / n).collect()
    }
}

/// Angle between two unit (or zero) vectors: `2 atan2(|a - b|, |a + b|)`.
///
/// Equal to `acos(a . b)` but exact for identical inputs. A zero vector
/// against a unit vector gives π/2; two zero vectors give 0.
#[inline]
fn unit_angle<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut diff = T::zero();
    let mut sum = T::zero();
    for (x, y) in a.iter().zip(b) {
        let d = *x - *y;
        let s = *x + *y;
        diff = diff + d * d;
        sum = sum + s * s;
    }
    T::lit(2.0) * diff.sqrt().atan2(sum.sqrt())
}

/// Angle in radians between two frames, in `[0, π]`.
///
/// This is the arccosine of their cosine similarity. If both frames are zero
/// the distance is 0; if exactly one is zero it is π/2.
pub fn frame_distance<T: Scalar>(u: &[T], v: &[T]) -> Result<T, MetricError> {
    if u.len() != v.len() {
        return Err(MetricError::DimensionMismatch(u.len(), v.len()));
    }
    Ok(unit_angle(&unit(u), &unit(v)))
}

/// Accumulated cost and number of aligned pairs; ordered lexicographically.
#[derive(Clone, Copy)]
struct Cell {
    sum: f64,
    len: u32,
}

impl Cell {
    #[inline]
    fn better(self, other: Cell) -> bool {
        self.sum < other.sum || (self.sum == other.sum && self.len < other.len)
    }
}

fn unit_frames<T: Scalar>(s: &FeatureSequence<T>) -> FeatureSequence<T> {
    FeatureSequence::new(s.token_id.clone(), s.dim(), s.frames().flat_map(unit).collect())
}

/// DTW over sequences whose frames are already unit (or zero) vectors.
fn dtw_core<T: Scalar>(a: &FeatureSequence<T>, b: &FeatureSequence<T>) -> T {
    let (n, m) = (a.len(), b.len());
    let local = |i: usize, j: usize| unit_angle(a.frame(i), b.frame(j)).as_f64();

    let mut prev: Vec<Cell> = Vec::with_capacity(m);
    let mut cur: Vec<Cell> = Vec::with_capacity(m);
    for j in 0..m {
        let d = local(0, j);
        let c = if j == 0 {
            Cell { sum: d, len: 1 }
        } else {
            let p = cur[j - 1];
            Cell {
                sum: p.sum + d,
                len: p.len + 1,
            }
        };
        cur.push(c);
    }
    for i in 1..n {
        std::mem::swap(&mut prev, &mut cur);
        cur.clear();
        for j in 0..m {
            let d = local(i, j);
            let mut best = prev[j];
            if j > 0 {
                if prev[j - 1].better(best) {
                    best = prev[j - 1];
                }
                if cur[j - 1].better(best) {
                    best = cur[j - 1];
                }
            }
            cur.push(Cell {
                sum: best.sum + d,
                len: best.len + 1,
            });
        }
    }
    let end = cur[m - 1];
    T::lit(end.sum / f64::from(end.len))
}

/// Mean frame distance along the minimum-cost monotone alignment path.
///
/// Steps are (1,1), (1,0) and (0,1); the path runs from the first frame pair
/// to the last. The path minimizes summed frame distance (ties broken toward
/// the shorter path); the result is that sum divided by the path length.
pub fn dtw_distance<T: Scalar>(a: &FeatureSequence<T>, b: &FeatureSequence<T>) -> Result<T, MetricError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::EmptySequence);
    }
    if a.dim() != b.dim() {
        return Err(MetricError::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(dtw_core(&unit_frames(a), &unit_frames(b)))
}

/// Symmetric token-pair distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable<T> {
    token_ids: Vec<String>,
    index: HashMap<String, usize>,
    values: Vec<T>,
}

impl<T: Scalar> DistanceTable<T> {
    /// Builds a table by evaluating `f(i, j)` once for every `i < j`.
    pub fn from_fn<F>(token_ids: Vec<String>, mut f: F) -> Result<Self, MetricError>
    where
        F: FnMut(usize, usize) -> T,
    {
        let n = token_ids.len();
        let mut values = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self::assemble(token_ids, values)
    }

    /// Builds a table from the packed upper triangle (row-major over `i < j`).
    pub fn from_upper(token_ids: Vec<String>, upper: &[T]) -> Result<Self, MetricError> {
        let n = token_ids.len();
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(MetricError::Undefined(format!(
                "{} packed values for {n} tokens",
                upper.len()
            )));
        }
        let mut it = upper.iter();
        Self::from_fn(token_ids, |_, _| *it.next().expect("length checked"))
    }

    fn assemble(token_ids: Vec<String>, values: Vec<T>) -> Result<Self, MetricError> {
        let mut index = HashMap::with_capacity(token_ids.len());
        for (i, id) in token_ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(MetricError::Undefined(format!("duplicate token id `{id}`")));
            }
        }
        Ok(DistanceTable {
            token_ids,
            index,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.token_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.token_ids.is_empty()
    }

    pub fn token_ids(&self) -> &[String] {
        &self.token_ids
    }

    pub fn index_of(&self, token_id: &str) -> Option<usize> {
        self.index.get(token_id).copied()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.len() + j]
    }

    /// Upper triangle, row-major over `i < j`.
    pub fn upper(&self) -> Vec<T> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect()
    }

    /// Applies `f` to every off-diagonal entry.
    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Self {
        let n = self.len();
        let mut values = self.values.clone();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    values[i * n + j] = f(values[i * n + j]);
                }
            }
        }
        DistanceTable {
            token_ids: self.token_ids.clone(),
            index: self.index.clone(),
            values,
        }
    }
}

/// DTW distance for every unordered token pair. Pairs are evaluated in
/// parallel and merged in index order, so the result does not depend on the
/// number of worker threads.
pub fn build_distance_table<T: Scalar>(tokens: &[FeatureSequence<T>]) -> Result<DistanceTable<T>, MetricError> {
    if let Some(t) = tokens.iter().find(|t| t.is_empty()) {
        return Err(MetricError::Undefined(format!("token `{}` has no frames", t.token_id)));
    }
    if let Some(first) = tokens.first() {
        if let Some(t) = tokens.iter().find(|t| t.dim() != first.dim()) {
            return Err(MetricError::DimensionMismatch(first.dim(), t.dim()));
        }
    }
    let units: Vec<FeatureSequence<T>> = tokens.par_iter().map(unit_frames).collect();
    let n = tokens.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let upper: Vec<T> = pairs.par_iter().map(|&(i, j)| dtw_core(&units[i], &units[j])).collect();
    DistanceTable::from_upper(tokens.iter().map(|t| t.token_id.clone()).collect(), &upper)
}
