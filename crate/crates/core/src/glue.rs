//! Gluing two finite metric spaces into one pseudo-metric union along an
//! explicit correspondence.
//!
//! Cross distances are the shortest route through a matched pair plus a
//! slack `ε`; the slack must absorb at least half the correspondence
//! distortion or the mixed triangle inequalities break. The resulting
//! union certifies an upper bound on the Gromov–Hausdorff distance of the
//! two sides.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{FiniteMetricSpace, MetricError};
use crate::scalar::Scalar;
use crate::DEFAULT_TRIANGLE_TOL;

#[derive(Debug, Error, PartialEq)]
pub enum GlueError {
    #[error("correspondence must be non-empty")]
    EmptyCorrespondence,
    #[error("correspondence pair ({0},{1}) out of range")]
    PairOutOfRange(usize, usize),
    #[error("correspondence does not cover {side} index {index}")]
    NotCovering { side: &'static str, index: usize },
    #[error("slack {eps} below half the correspondence distortion {distortion}")]
    SlackTooSmall { eps: f64, distortion: f64 },
    #[error("negative slack")]
    NegativeSlack,
    #[error("pseudo-metric validation failed: mixed triangle at ({a},{b},{c}) by {excess}")]
    MixedTriangle {
        a: String,
        b: String,
        c: String,
        excess: f64,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A point of the union, tagged by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnionPoint {
    Left(usize),
    Right(usize),
}

/// Two spaces with cross distances forming a validated pseudo-metric on
/// the disjoint union. Each side lies within `declared_bound` of the other.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PseudoMetricUnion<S> {
    pub left: FiniteMetricSpace<S>,
    pub right: FiniteMetricSpace<S>,
    cross: Vec<S>,
    declared_bound: S,
}

impl<S: Scalar> PseudoMetricUnion<S> {
    /// Cross distance from left index `i` to right index `j`.
    #[inline]
    pub fn cross(&self, i: usize, j: usize) -> S {
        self.cross[i * self.right.len() + j]
    }

    /// Distance between any two union points.
    pub fn d(&self, a: UnionPoint, b: UnionPoint) -> S {
        match (a, b) {
            (UnionPoint::Left(i), UnionPoint::Left(j)) => self.left.d(i, j),
            (UnionPoint::Right(i), UnionPoint::Right(j)) => self.right.d(i, j),
            (UnionPoint::Left(i), UnionPoint::Right(j)) => self.cross(i, j),
            (UnionPoint::Right(j), UnionPoint::Left(i)) => self.cross(i, j),
        }
    }

    pub fn declared_bound(&self) -> S {
        self.declared_bound
    }

    /// Right-side ball trace around a left center: `{ j | d'(c, j) < r }`.
    pub fn right_trace(&self, left_center: usize, r: S) -> Vec<usize> {
        (0..self.right.len())
            .filter(|&j| self.cross(left_center, j) < r)
            .collect()
    }

    /// Hausdorff distance between the two sides computed inside the union:
    /// an upper bound on their Gromov–Hausdorff distance.
    pub fn gh_upper_bound(&self) -> S {
        let l_to_r = (0..self.left.len())
            .map(|i| {
                (0..self.right.len())
                    .map(|j| self.cross(i, j))
                    .fold(S::infinity(), S::min)
            })
            .fold(S::zero(), S::max);
        let r_to_l = (0..self.right.len())
            .map(|j| {
                (0..self.left.len())
                    .map(|i| self.cross(i, j))
                    .fold(S::infinity(), S::min)
            })
            .fold(S::zero(), S::max);
        l_to_r.max(r_to_l)
    }

    fn validate(&self, tol: S) -> Result<(), GlueError> {
        let (n, m) = (self.left.len(), self.right.len());
        for i in 0..n {
            for j in 0..m {
                let c = self.cross(i, j);
                if !c.is_finite() || c < S::zero() {
                    return Err(GlueError::MixedTriangle {
                        a: format!("L{i}"),
                        b: format!("R{j}"),
                        c: String::from("-"),
                        excess: f64::NAN,
                    });
                }
            }
        }
        // Mixed triangles: each of the three patterns that involve a
        // cross edge. Within-side triangles were validated at
        // construction of the sides.
        let bad = (0..n)
            .into_par_iter()
            .filter_map(|i| {
                for j in 0..m {
                    let cij = self.cross(i, j);
                    // L-L-R: cross(i,j) <= d_L(i,k) + cross(k,j)
                    for k in 0..n {
                        let excess = cij - (self.left.d(i, k) + self.cross(k, j));
                        if excess > tol {
                            return Some(GlueError::MixedTriangle {
                                a: format!("L{i}"),
                                b: format!("L{k}"),
                                c: format!("R{j}"),
                                excess: excess.as_f64(),
                            });
                        }
                    }
                    // L-R-R: cross(i,j) <= cross(i,k) + d_R(k,j)
                    for k in 0..m {
                        let excess = cij - (self.cross(i, k) + self.right.d(k, j));
                        if excess > tol {
                            return Some(GlueError::MixedTriangle {
                                a: format!("L{i}"),
                                b: format!("R{k}"),
                                c: format!("R{j}"),
                                excess: excess.as_f64(),
                            });
                        }
                    }
                }
                // L-R-L: d_L(i,k) <= cross(i,j) + cross(k,j)
                for k in 0..n {
                    let dik = self.left.d(i, k);
                    for j in 0..m {
                        let excess = dik - (self.cross(i, j) + self.cross(k, j));
                        if excess > tol {
                            return Some(GlueError::MixedTriangle {
                                a: format!("L{i}"),
                                b: format!("R{j}"),
                                c: format!("L{k}"),
                                excess: excess.as_f64(),
                            });
                        }
                    }
                }
                None
            })
            .find_first(|_| true);
        if let Some(err) = bad {
            return Err(err);
        }
        // R-L-R: d_R(j,k) <= cross(i,j) + cross(i,k)
        let bad = (0..m)
            .into_par_iter()
            .filter_map(|j| {
                for k in 0..m {
                    let djk = self.right.d(j, k);
                    for i in 0..n {
                        let excess = djk - (self.cross(i, j) + self.cross(i, k));
                        if excess > tol {
                            return Some(GlueError::MixedTriangle {
                                a: format!("R{j}"),
                                b: format!("L{i}"),
                                c: format!("R{k}"),
                                excess: excess.as_f64(),
                            });
                        }
                    }
                }
                None
            })
            .find_first(|_| true);
        if let Some(err) = bad {
            return Err(err);
        }
        // Declared neighborhood bound: each side within declared_bound of
        // the other, through its matched pair.
        for i in 0..n {
            let nearest = (0..m)
                .map(|j| self.cross(i, j))
                .fold(S::infinity(), S::min);
            if nearest > self.declared_bound {
                return Err(GlueError::NotCovering {
                    side: "left",
                    index: i,
                });
            }
        }
        for j in 0..m {
            let nearest = (0..n)
                .map(|i| self.cross(i, j))
                .fold(S::infinity(), S::min);
            if nearest > self.declared_bound {
                return Err(GlueError::NotCovering {
                    side: "right",
                    index: j,
                });
            }
        }
        Ok(())
    }
}

/// Maximal distortion of the correspondence:
/// `max |d_L(a,a') - d_R(b,b')|` over pairs of pairs.
pub fn distortion<S: Scalar>(
    left: &FiniteMetricSpace<S>,
    right: &FiniteMetricSpace<S>,
    pairs: &[(usize, usize)],
) -> S {
    let mut m = S::zero();
    for (idx, &(a, b)) in pairs.iter().enumerate() {
        for &(a2, b2) in &pairs[idx..] {
            m = m.max((left.d(a, a2) - right.d(b, b2)).abs());
        }
    }
    m
}

/// Glues two spaces along a covering correspondence with slack `eps`.
///
/// `cross[x][y] = min over pairs (a,b) of d_L(x,a) + eps + d_R(b,y)`.
/// Requires `eps >= distortion / 2`; the declared neighborhood bound of
/// the result is `eps` (every point reaches its own pair at cost `eps`).
pub fn glue<S: Scalar>(
    left: &FiniteMetricSpace<S>,
    right: &FiniteMetricSpace<S>,
    pairs: &[(usize, usize)],
    eps: S,
) -> Result<PseudoMetricUnion<S>, GlueError> {
    if pairs.is_empty() {
        return Err(GlueError::EmptyCorrespondence);
    }
    if eps < S::zero() {
        return Err(GlueError::NegativeSlack);
    }
    let (n, m) = (left.len(), right.len());
    for &(a, b) in pairs {
        if a >= n || b >= m {
            return Err(GlueError::PairOutOfRange(a, b));
        }
    }
    for i in 0..n {
        if !pairs.iter().any(|&(a, _)| a == i) {
            return Err(GlueError::NotCovering {
                side: "left",
                index: i,
            });
        }
    }
    for j in 0..m {
        if !pairs.iter().any(|&(_, b)| b == j) {
            return Err(GlueError::NotCovering {
                side: "right",
                index: j,
            });
        }
    }
    let dist = distortion(left, right, pairs);
    let two = S::lit(2.0);
    if eps * two < dist {
        return Err(GlueError::SlackTooSmall {
            eps: eps.as_f64(),
            distortion: dist.as_f64(),
        });
    }
    let cross: Vec<S> = (0..n)
        .into_par_iter()
        .flat_map_iter(|x| {
            (0..m).map(move |y| {
                pairs
                    .iter()
                    .map(|&(a, b)| left.d(x, a) + eps + right.d(b, y))
                    .fold(S::infinity(), S::min)
            })
        })
        .collect();
    let union = PseudoMetricUnion {
        left: left.clone(),
        right: right.clone(),
        cross,
        declared_bound: eps,
    };
    union.validate(S::lit(DEFAULT_TRIANGLE_TOL))?;
    Ok(union)
}

/// Nearest-point correspondence between two coordinate-backed spaces in a
/// shared ambient space: every point is paired with its nearest point on
/// the other side (both directions, so the result covers).
pub fn nearest_point_correspondence<S: Scalar>(
    left: &FiniteMetricSpace<S>,
    right: &FiniteMetricSpace<S>,
) -> Result<Vec<(usize, usize)>, GlueError> {
    let lc = left.coords().ok_or(GlueError::EmptyCorrespondence)?;
    let rc = right.coords().ok_or(GlueError::EmptyCorrespondence)?;
    let mut pairs = Vec::new();
    for (i, p) in lc.iter().enumerate() {
        let j = nearest_index(p, rc);
        pairs.push((i, j));
    }
    for (j, q) in rc.iter().enumerate() {
        let i = nearest_index(q, lc);
        if !pairs.contains(&(i, j)) {
            pairs.push((i, j));
        }
    }
    Ok(pairs)
}

fn nearest_index<S: Scalar>(p: &[S], points: &[Vec<S>]) -> usize {
    let mut best = (S::infinity(), 0usize);
    for (j, q) in points.iter().enumerate() {
        let d = crate::sample::euclidean(p, q);
        if d < best.0 {
            best = (d, j);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{sample, Mode, SampleSpec, Shape};

    fn interval(count: usize, length: f64) -> FiniteMetricSpace<f64> {
        sample(&SampleSpec {
            shape: Shape::Interval { length },
            count,
            mode: Mode::Grid,
        })
        .unwrap()
    }

    #[test]
    fn identity_glue_collapses_minimization() {
        let s = interval(11, 10.0);
        let pairs: Vec<_> = (0..11).map(|i| (i, i)).collect();
        let u = glue(&s, &s, &pairs, 0.25).unwrap();
        for x in 0..11 {
            for y in 0..11 {
                assert_eq!(u.cross(x, y), s.d(x, y) + 0.25);
            }
        }
        assert_eq!(u.declared_bound(), 0.25);
        assert!(u.gh_upper_bound() <= 0.25);
    }

    #[test]
    fn singleton_glue() {
        let a = FiniteMetricSpace::from_matrix(vec![vec![0.0]]).unwrap();
        let u = glue(&a, &a, &[(0, 0)], 0.1).unwrap();
        assert_eq!(u.cross(0, 0), 0.1);
        assert_eq!(u.gh_upper_bound(), 0.1);
    }

    #[test]
    fn coarse_vs_fine_interval_grids() {
        let coarse = interval(11, 10.0);
        let fine = interval(21, 10.0);
        let pairs = nearest_point_correspondence(&coarse, &fine).unwrap();
        let dist = distortion(&coarse, &fine, &pairs);
        assert!(dist <= 0.5 + 1e-12, "distortion {dist}");
        let u = glue(&coarse, &fine, &pairs, 0.25).unwrap();
        assert!(u.declared_bound() <= 0.5);
        assert!(u.gh_upper_bound() <= 0.5);
    }

    #[test]
    fn slack_below_half_distortion_is_rejected() {
        let coarse = interval(3, 10.0);
        let fine = interval(21, 10.0);
        let pairs = nearest_point_correspondence(&coarse, &fine).unwrap();
        let dist = distortion(&coarse, &fine, &pairs);
        assert!(dist > 0.0);
        let err = glue(&coarse, &fine, &pairs, dist / 2.0 * 0.5).unwrap_err();
        assert!(matches!(err, GlueError::SlackTooSmall { .. }));
    }

    #[test]
    fn non_covering_correspondence_is_rejected() {
        let s = interval(3, 2.0);
        let err = glue(&s, &s, &[(0, 0), (1, 1)], 0.5).unwrap_err();
        assert!(matches!(
            err,
            GlueError::NotCovering {
                side: "left",
                index: 2
            }
        ));
    }

    #[test]
    fn union_point_distances() {
        let s = interval(5, 4.0);
        let pairs: Vec<_> = (0..5).map(|i| (i, i)).collect();
        let u = glue(&s, &s, &pairs, 0.1).unwrap();
        assert_eq!(u.d(UnionPoint::Left(0), UnionPoint::Left(3)), 3.0);
        assert_eq!(u.d(UnionPoint::Right(0), UnionPoint::Right(3)), 3.0);
        assert_eq!(u.d(UnionPoint::Left(0), UnionPoint::Right(0)), 0.1);
        assert_eq!(
            u.d(UnionPoint::Right(1), UnionPoint::Left(0)),
            u.d(UnionPoint::Left(0), UnionPoint::Right(1))
        );
    }
}
