//! Finite metric spaces: validated distance matrices, balls, Hausdorff
//! distance, density checks, and neighborhoods.
//!
//! Comparisons against radii are strict (`<`) and exact on the stored
//! scalars; callers control any perturbation. The triangle inequality is
//! validated up to an absolute tolerance at construction time.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::DEFAULT_TRIANGLE_TOL;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("distance matrix is not square: row {row} has length {len}, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("distance matrix is empty")]
    Empty,
    #[error("entry ({i},{j}) is not a finite non-negative number")]
    BadEntry { i: usize, j: usize },
    #[error("nonzero diagonal at index {0}")]
    NonzeroDiagonal(usize),
    #[error("asymmetric entries at ({i},{j})")]
    Asymmetric { i: usize, j: usize },
    #[error("triangle inequality violated at ({i},{j},{k}): d(i,k) > d(i,j) + d(j,k) by {excess}")]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        excess: f64,
    },
    #[error("radius must be positive")]
    NonPositiveRadius,
    #[error("subset must be non-empty")]
    EmptySubset,
    #[error("point index {0} out of range for space of size {1}")]
    IndexOutOfRange(usize, usize),
}

/// Shape metadata carried by sampler-generated spaces. Interval and disk
/// shapes expose segment structure (straight lines toward the center),
/// which the glued-space crushing schedule requires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ShapeInfo<S> {
    Interval { length: S },
    Disk { radius: S, dim: usize },
    Circle { radius: S, geodesic: bool },
    FlatTorus { sides: Vec<S> },
}

/// A finite metric space: `n` points and a validated symmetric distance
/// matrix. Immutable after construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteMetricSpace<S> {
    n: usize,
    dist: Vec<S>,
    labels: Option<Vec<String>>,
    coords: Option<Vec<Vec<S>>>,
    star_radius: Option<S>,
    shape: Option<ShapeInfo<S>>,
}

impl<S: Scalar> FiniteMetricSpace<S> {
    /// Validates a square matrix and builds the space. The first violation
    /// in row-major order is reported with witness indices.
    pub fn from_matrix(rows: Vec<Vec<S>>) -> Result<Self, MetricError> {
        Self::from_matrix_with_tol(rows, S::lit(DEFAULT_TRIANGLE_TOL))
    }

    pub fn from_matrix_with_tol(rows: Vec<Vec<S>>, tol: S) -> Result<Self, MetricError> {
        let n = rows.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare {
                    row,
                    len: r.len(),
                    n,
                });
            }
        }
        let mut dist = Vec::with_capacity(n * n);
        for r in &rows {
            dist.extend_from_slice(r);
        }
        let space = Self {
            n,
            dist,
            labels: None,
            coords: None,
            star_radius: None,
            shape: None,
        };
        space.validate(tol)?;
        Ok(space)
    }

    /// Construction path for samplers: distances come from exact closed
    /// forms but are still validated.
    pub(crate) fn from_parts(
        n: usize,
        dist: Vec<S>,
        coords: Option<Vec<Vec<S>>>,
        star_radius: Option<S>,
        shape: Option<ShapeInfo<S>>,
    ) -> Result<Self, MetricError> {
        debug_assert_eq!(dist.len(), n * n);
        let space = Self {
            n,
            dist,
            labels: None,
            coords,
            star_radius,
            shape,
        };
        space.validate(S::lit(DEFAULT_TRIANGLE_TOL))?;
        Ok(space)
    }

    fn validate(&self, tol: S) -> Result<(), MetricError> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let d = self.d(i, j);
                if !d.is_finite() || d < S::zero() {
                    return Err(MetricError::BadEntry { i, j });
                }
            }
        }
        for i in 0..n {
            if self.d(i, i) != S::zero() {
                return Err(MetricError::NonzeroDiagonal(i));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.d(i, j) != self.d(j, i) {
                    return Err(MetricError::Asymmetric { i, j });
                }
            }
        }
        // Triangle check is cubic; parallelize over i but keep the reported
        // witness the first in row-major (i, j, k) order.
        let violation = (0..n)
            .into_par_iter()
            .filter_map(|i| {
                for j in 0..n {
                    let dij = self.d(i, j);
                    for k in 0..n {
                        let excess = self.d(i, k) - (dij + self.d(j, k));
                        if excess > tol {
                            return Some(MetricError::TriangleViolation {
                                i,
                                j,
                                k,
                                excess: excess.as_f64(),
                            });
                        }
                    }
                }
                None
            })
            .find_first(|_| true);
        match violation {
            Some(v) => Err(v),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Distance between points `i` and `j`.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> S {
        self.dist[i * self.n + j]
    }

    pub fn matrix_rows(&self) -> Vec<Vec<S>> {
        (0..self.n)
            .map(|i| self.dist[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = Some(labels);
        self
    }

    pub fn coords(&self) -> Option<&[Vec<S>]> {
        self.coords.as_deref()
    }

    pub fn star_radius(&self) -> Option<S> {
        self.star_radius
    }

    pub fn shape(&self) -> Option<&ShapeInfo<S>> {
        self.shape.as_ref()
    }

    fn check_index(&self, i: usize) -> Result<(), MetricError> {
        if i >= self.n {
            Err(MetricError::IndexOutOfRange(i, self.n))
        } else {
            Ok(())
        }
    }

    /// Open ball trace: `{ j | d(center, j) < r }`, strict.
    pub fn ball(&self, center: usize, r: S) -> Result<Vec<usize>, MetricError> {
        self.check_index(center)?;
        if !(r > S::zero()) {
            return Err(MetricError::NonPositiveRadius);
        }
        Ok((0..self.n).filter(|&j| self.d(center, j) < r).collect())
    }

    /// Diameter of a subset (0 for singletons).
    pub fn diameter(&self, subset: &[usize]) -> Result<S, MetricError> {
        if subset.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        for &i in subset {
            self.check_index(i)?;
        }
        let mut m = S::zero();
        for (a, &i) in subset.iter().enumerate() {
            for &j in &subset[a + 1..] {
                m = m.max(self.d(i, j));
            }
        }
        Ok(m)
    }

    /// Hausdorff distance between two non-empty subsets.
    pub fn hausdorff(&self, a: &[usize], b: &[usize]) -> Result<S, MetricError> {
        if a.is_empty() || b.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        for &i in a.iter().chain(b) {
            self.check_index(i)?;
        }
        Ok(self.directed_hausdorff(a, b).max(self.directed_hausdorff(b, a)))
    }

    fn directed_hausdorff(&self, a: &[usize], b: &[usize]) -> S {
        a.iter()
            .map(|&x| {
                b.iter()
                    .map(|&y| self.d(x, y))
                    .fold(S::infinity(), S::min)
            })
            .fold(S::zero(), S::max)
    }

    /// Whether every point has a subset point strictly within `delta`;
    /// on failure reports the first violating point.
    pub fn is_dense(&self, subset: &[usize], delta: S) -> Result<DenseReport, MetricError> {
        if subset.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        if !(delta > S::zero()) {
            return Err(MetricError::NonPositiveRadius);
        }
        for &i in subset {
            self.check_index(i)?;
        }
        for x in 0..self.n {
            let covered = subset.iter().any(|&a| self.d(a, x) < delta);
            if !covered {
                return Ok(DenseReport {
                    dense: false,
                    witness: Some(x),
                });
            }
        }
        Ok(DenseReport {
            dense: true,
            witness: None,
        })
    }

    /// Existential neighborhood `{ y | ∃x∈Z: d(x,y) < q }` — the union of
    /// open balls around `Z`.
    pub fn neighborhood(&self, z: &[usize], q: S) -> Result<Vec<usize>, MetricError> {
        if z.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        if !(q > S::zero()) {
            return Err(MetricError::NonPositiveRadius);
        }
        Ok((0..self.n)
            .filter(|&y| z.iter().any(|&x| self.d(x, y) < q))
            .collect())
    }

    /// Universal variant `{ y | ∀x∈Z: d(x,y) < q }` — the intersection of
    /// open balls around `Z`. This is what cover-intersection arguments
    /// consume; the existential reading above is the one used for
    /// neighborhoods of sets.
    pub fn intersection_neighborhood(&self, z: &[usize], q: S) -> Result<Vec<usize>, MetricError> {
        if z.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        if !(q > S::zero()) {
            return Err(MetricError::NonPositiveRadius);
        }
        Ok((0..self.n)
            .filter(|&y| z.iter().all(|&x| self.d(x, y) < q))
            .collect())
    }

    /// The restriction of the metric to `subset`, keeping a map back to the
    /// original indices.
    pub fn restriction(&self, subset: &[usize]) -> Result<Subspace<S>, MetricError> {
        if subset.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        for &i in subset {
            self.check_index(i)?;
        }
        let m = subset.len();
        let mut dist = Vec::with_capacity(m * m);
        for &i in subset {
            for &j in subset {
                dist.push(self.d(i, j));
            }
        }
        let coords = self
            .coords
            .as_ref()
            .map(|c| subset.iter().map(|&i| c[i].clone()).collect());
        let space = Self {
            n: m,
            dist,
            labels: self
                .labels
                .as_ref()
                .map(|l| subset.iter().map(|&i| l[i].clone()).collect()),
            coords,
            star_radius: None,
            shape: self.shape.clone(),
        };
        Ok(Subspace {
            space,
            original: subset.to_vec(),
        })
    }

    /// Index of the metric center: the point minimizing its maximal
    /// distance to the rest, lowest index on ties.
    pub fn metric_center(&self) -> usize {
        let mut best = (S::infinity(), 0usize);
        for i in 0..self.n {
            let ecc = (0..self.n)
                .map(|j| self.d(i, j))
                .fold(S::zero(), S::max);
            if ecc < best.0 {
                best = (ecc, i);
            }
        }
        best.1
    }
}

/// Result of a density check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseReport {
    pub dense: bool,
    pub witness: Option<usize>,
}

/// A restriction of a space to a subset, with the original indices kept.
#[derive(Debug, Clone)]
pub struct Subspace<S> {
    pub space: FiniteMetricSpace<S>,
    pub original: Vec<usize>,
}
