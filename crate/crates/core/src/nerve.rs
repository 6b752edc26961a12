//! Covers by ball traces, nerve complexes, critical radii with
//! perturbation margins, cover comparison across a glued union, and
//! good-cover verification.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::SimplicialComplex;
use crate::crushing::{greedy_crushable_on, Strategy};
use crate::glue::PseudoMetricUnion;
use crate::homology::betti;
use crate::metric::{FiniteMetricSpace, MetricError};
use crate::scalar::Scalar;
use crate::scales::ScaleSequence;
use crate::srips::build_complex_on;

#[derive(Debug, Error, PartialEq)]
pub enum NerveError {
    #[error("covers have different center lists")]
    CenterMismatch,
    #[error("cover does not cover the ambient space (point {0} uncovered)")]
    NotCovering(usize),
    #[error("centers must be non-empty")]
    NoCenters,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// An indexed cover of a finite point set by ball traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cover<S> {
    pub centers: Vec<usize>,
    pub alpha: S,
    /// Per-center trace: the ambient indices inside the ball.
    pub elements: Vec<Vec<usize>>,
    pub covering: bool,
    pub ambient_size: usize,
}

/// Cover of a space by the traces of open balls around the given centers.
pub fn build_cover<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    centers: &[usize],
    alpha: S,
) -> Result<Cover<S>, NerveError> {
    if centers.is_empty() {
        return Err(NerveError::NoCenters);
    }
    let elements: Vec<Vec<usize>> = centers
        .iter()
        .map(|&c| space.ball(c, alpha))
        .collect::<Result<_, _>>()?;
    let covering = (0..space.len()).all(|x| elements.iter().any(|e| e.binary_search(&x).is_ok()));
    Ok(Cover {
        centers: centers.to_vec(),
        alpha,
        elements,
        covering,
        ambient_size: space.len(),
    })
}

/// Cover of the right side of a union by the traces of balls around
/// left-side centers.
pub fn build_right_cover<S: Scalar>(
    union: &PseudoMetricUnion<S>,
    centers: &[usize],
    alpha: S,
) -> Result<Cover<S>, NerveError> {
    if centers.is_empty() {
        return Err(NerveError::NoCenters);
    }
    let elements: Vec<Vec<usize>> = centers
        .iter()
        .map(|&c| union.right_trace(c, alpha))
        .collect();
    let covering =
        (0..union.right.len()).all(|x| elements.iter().any(|e| e.binary_search(&x).is_ok()));
    Ok(Cover {
        centers: centers.to_vec(),
        alpha,
        elements,
        covering,
        ambient_size: union.right.len(),
    })
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Nerve of a cover: one vertex per center, a simplex per non-empty
/// intersection, up to `size_cap` elements at a time.
pub fn nerve_complex<S: Scalar>(cover: &Cover<S>, size_cap: usize) -> SimplicialComplex {
    let k = cover.centers.len();
    let mut levels: Vec<Vec<Vec<usize>>> = Vec::new();
    // Intersections only shrink as elements are added, so extension with
    // pruning enumerates exactly the non-empty ones.
    let mut frontier: Vec<(Vec<usize>, Vec<usize>)> = (0..k)
        .filter(|&v| !cover.elements[v].is_empty())
        .map(|v| (vec![v], cover.elements[v].clone()))
        .collect();
    levels.push(frontier.iter().map(|(s, _)| s.clone()).collect());
    for _size in 2..=size_cap.max(1) {
        let mut next = Vec::new();
        for (sigma, inter) in &frontier {
            let last = *sigma.last().unwrap();
            for v in (last + 1)..k {
                let meet = intersect_sorted(inter, &cover.elements[v]);
                if !meet.is_empty() {
                    let mut ext = sigma.clone();
                    ext.push(v);
                    next.push((ext, meet));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next.iter().map(|(s, _)| s.clone()).collect());
        frontier = next;
    }
    for level in &mut levels {
        level.sort();
    }
    SimplicialComplex::from_levels(levels)
}

/// Critical radius of each subset σ of the centers (|σ| ≤ size_cap):
/// the smallest r at which the open balls around σ share an ambient
/// point. On a finite space this is min over points z of max_{x∈σ} d(z,x);
/// the intersection is non-empty exactly for r strictly above it.
pub fn critical_radii<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    centers: &[usize],
    size_cap: usize,
) -> Vec<(Vec<usize>, S)> {
    let k = centers.len();
    let mut out = Vec::new();
    // Enumerate subsets by extension, tracking max-distance profiles.
    let mut frontier: Vec<(Vec<usize>, Vec<S>)> = (0..k)
        .map(|v| {
            let profile: Vec<S> = (0..space.len()).map(|z| space.d(centers[v], z)).collect();
            (vec![v], profile)
        })
        .collect();
    for (sigma, profile) in &frontier {
        let p = profile.iter().copied().fold(S::infinity(), S::min);
        out.push((sigma.clone(), p));
    }
    for _size in 2..=size_cap.max(1) {
        let mut next = Vec::new();
        for (sigma, profile) in &frontier {
            let last = *sigma.last().unwrap();
            for v in (last + 1)..k {
                let merged: Vec<S> = profile
                    .iter()
                    .enumerate()
                    .map(|(z, &m)| m.max(space.d(centers[v], z)))
                    .collect();
                let mut ext = sigma.clone();
                ext.push(v);
                let p = merged.iter().copied().fold(S::infinity(), S::min);
                out.push((ext.clone(), p));
                next.push((ext, merged));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(&b.0)));
    out
}

/// Perturbation margin at radius `alpha`: half the gap to the next larger
/// critical radius. Returns `None` when `alpha` hits a critical radius
/// exactly (the excluded finite set), and +∞ when every critical radius
/// lies below `alpha`.
pub fn mu_margin<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    centers: &[usize],
    alpha: S,
    size_cap: usize,
) -> Option<S> {
    let radii = critical_radii(space, centers, size_cap);
    if radii.iter().any(|(_, p)| *p == alpha) {
        return None;
    }
    let next_larger = radii
        .iter()
        .map(|&(_, p)| p)
        .filter(|&p| p > alpha)
        .fold(S::infinity(), S::min);
    if next_larger.is_infinite() {
        Some(S::infinity())
    } else {
        Some((next_larger - alpha) / S::lit(2.0))
    }
}

/// Per-σ comparison of ball-intersection traces across a union.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionComparison<S> {
    pub sigma: Vec<usize>,
    pub hausdorff: Option<S>,
    /// Set when exactly one side is empty.
    pub one_sided_empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport<S> {
    pub per_sigma: Vec<IntersectionComparison<S>>,
    pub max_hausdorff: Option<S>,
    pub min_hausdorff: Option<S>,
    pub mismatches: Vec<Vec<usize>>,
}

/// For every σ over the (left-side) centers, the Hausdorff distance inside
/// the union between the left ball intersection and the right trace
/// intersection at radius `alpha`. Pairs with both sides empty are
/// skipped; one-sided emptiness is reported as a mismatch.
pub fn intersection_hausdorff<S: Scalar>(
    union: &PseudoMetricUnion<S>,
    centers: &[usize],
    alpha: S,
    size_cap: usize,
) -> IntersectionReport<S> {
    let k = centers.len();
    let left_n = union.left.len();
    let right_n = union.right.len();
    let left_trace = |c: usize| -> Vec<usize> {
        (0..left_n)
            .filter(|&x| union.left.d(centers[c], x) < alpha)
            .collect()
    };
    let right_trace = |c: usize| -> Vec<usize> {
        (0..right_n)
            .filter(|&y| union.cross(centers[c], y) < alpha)
            .collect()
    };
    let mut per_sigma = Vec::new();
    let mut mismatches = Vec::new();
    let mut max_h: Option<S> = None;
    let mut min_h: Option<S> = None;
    // DFS over center subsets; once both sides are empty every superset
    // is empty-empty and gets skipped.
    let mut frontier: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> = (0..k)
        .map(|v| (vec![v], left_trace(v), right_trace(v)))
        .collect();
    let mut size = 1;
    while !frontier.is_empty() && size <= size_cap {
        for (sigma, l, r) in &frontier {
            match (l.is_empty(), r.is_empty()) {
                (true, true) => {}
                (false, false) => {
                    let h = hausdorff_in_union(union, l, r);
                    max_h = Some(match max_h {
                        None => h,
                        Some(m) => m.max(h),
                    });
                    min_h = Some(match min_h {
                        None => h,
                        Some(m) => m.min(h),
                    });
                    per_sigma.push(IntersectionComparison {
                        sigma: sigma.clone(),
                        hausdorff: Some(h),
                        one_sided_empty: false,
                    });
                }
                _ => {
                    mismatches.push(sigma.clone());
                    per_sigma.push(IntersectionComparison {
                        sigma: sigma.clone(),
                        hausdorff: None,
                        one_sided_empty: true,
                    });
                }
            }
        }
        let mut next = Vec::new();
        for (sigma, l, r) in &frontier {
            if l.is_empty() && r.is_empty() {
                continue;
            }
            let last = *sigma.last().unwrap();
            for v in (last + 1)..k {
                let nl = intersect_sorted(l, &left_trace(v));
                let nr = intersect_sorted(r, &right_trace(v));
                let mut ext = sigma.clone();
                ext.push(v);
                next.push((ext, nl, nr));
            }
        }
        frontier = next;
        size += 1;
    }
    per_sigma.sort_by(|a, b| a.sigma.len().cmp(&b.sigma.len()).then(a.sigma.cmp(&b.sigma)));
    mismatches.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    IntersectionReport {
        per_sigma,
        max_hausdorff: max_h,
        min_hausdorff: min_h,
        mismatches,
    }
}

fn hausdorff_in_union<S: Scalar>(
    union: &PseudoMetricUnion<S>,
    left_set: &[usize],
    right_set: &[usize],
) -> S {
    let l_to_r = left_set
        .iter()
        .map(|&x| {
            right_set
                .iter()
                .map(|&y| union.cross(x, y))
                .fold(S::infinity(), S::min)
        })
        .fold(S::zero(), S::max);
    let r_to_l = right_set
        .iter()
        .map(|&y| {
            left_set
                .iter()
                .map(|&x| union.cross(x, y))
                .fold(S::infinity(), S::min)
        })
        .fold(S::zero(), S::max);
    l_to_r.max(r_to_l)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoReport {
    pub isomorphic: bool,
    /// First simplex present on exactly one side, by (size, lex) order.
    pub first_mismatch: Option<Vec<usize>>,
}

/// Whether two covers with the same center list have identical nerves up
/// to `size_cap` (the vertex bijection matches centers).
pub fn nerve_iso_check<S: Scalar>(
    left: &Cover<S>,
    right: &Cover<S>,
    size_cap: usize,
) -> Result<IsoReport, NerveError> {
    if left.centers != right.centers {
        return Err(NerveError::CenterMismatch);
    }
    let nl = nerve_complex(left, size_cap);
    let nr = nerve_complex(right, size_cap);
    if nl == nr {
        return Ok(IsoReport {
            isomorphic: true,
            first_mismatch: None,
        });
    }
    let top = nl.dim().unwrap_or(0).max(nr.dim().unwrap_or(0));
    for d in 0..=top {
        let a = nl.simplices(d);
        let b = nr.simplices(d);
        let mut i = 0;
        let mut j = 0;
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) => {
                    let m = if x < y { x } else { y };
                    return Ok(IsoReport {
                        isomorphic: false,
                        first_mismatch: Some(m.clone()),
                    });
                }
                (Some(x), None) => {
                    return Ok(IsoReport {
                        isomorphic: false,
                        first_mismatch: Some(x.clone()),
                    })
                }
                (None, Some(y)) => {
                    return Ok(IsoReport {
                        isomorphic: false,
                        first_mismatch: Some(y.clone()),
                    })
                }
                (None, None) => break,
            }
        }
    }
    unreachable!("complexes differ, so some level differs");
}

/// Verdict for one cover intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntersectionVerdict {
    /// A verified crushing sequence exists: the piece is contractible.
    Crushable,
    /// No crushing found, but the homology is that of a point. Necessary,
    /// not sufficient.
    HomologyTrivial,
    /// Non-trivial homology or unverifiable: the cover may not be good.
    Suspect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionCheck {
    pub sigma: Vec<usize>,
    pub points: usize,
    pub verdict: IntersectionVerdict,
    pub betti: Vec<usize>,
    /// Whether the complex of the intersection equals the intersection of
    /// the element complexes (membership is intrinsic to the vertex set,
    /// so a failure here witnesses an enumeration bug).
    pub intersection_identity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodCoverReport {
    pub checks: Vec<IntersectionCheck>,
    pub all_good: bool,
}

/// Inspects every non-empty intersection of at most `size_cap` cover
/// elements: tries to crush it, computes its Betti numbers, and verifies
/// the complex-of-intersection identity. Verdicts are three-valued;
/// `Crushable` is sufficient for contractibility, `HomologyTrivial` only
/// necessary.
pub fn good_cover_check<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    cover: &Cover<S>,
    scales: &ScaleSequence<S>,
    dim_cap: usize,
    size_cap: usize,
) -> GoodCoverReport {
    let k = cover.centers.len();
    let element_complexes: Vec<SimplicialComplex> = cover
        .elements
        .iter()
        .map(|e| build_complex_on(space, e, scales, dim_cap))
        .collect();
    let mut checks = Vec::new();
    let mut frontier: Vec<(Vec<usize>, Vec<usize>, SimplicialComplex)> = (0..k)
        .filter(|&v| !cover.elements[v].is_empty())
        .map(|v| {
            (
                vec![v],
                cover.elements[v].clone(),
                element_complexes[v].clone(),
            )
        })
        .collect();
    let mut size = 1;
    while !frontier.is_empty() && size <= size_cap {
        for (sigma, points, meet_complex) in &frontier {
            let own = build_complex_on(space, points, scales, dim_cap);
            let identity = own == *meet_complex;
            let b = betti(&own, dim_cap.min(points.len().saturating_sub(1)));
            let trivial =
                b.first() == Some(&1) && b.iter().skip(1).all(|&x| x == 0);
            let crush = greedy_crushable_on(
                space,
                points,
                scales,
                Strategy::FarthestFirst { center: None },
            )
            .is_crushed()
                || greedy_crushable_on(space, points, scales, Strategy::ExhaustiveElementary)
                    .is_crushed();
            let verdict = if crush {
                IntersectionVerdict::Crushable
            } else if trivial {
                IntersectionVerdict::HomologyTrivial
            } else {
                IntersectionVerdict::Suspect
            };
            checks.push(IntersectionCheck {
                sigma: sigma.clone(),
                points: points.len(),
                verdict,
                betti: b,
                intersection_identity: identity,
            });
        }
        let mut next = Vec::new();
        for (sigma, points, meet_complex) in &frontier {
            let last = *sigma.last().unwrap();
            for v in (last + 1)..k {
                let np = intersect_sorted(points, &cover.elements[v]);
                if np.is_empty() {
                    continue;
                }
                let mut ext = sigma.clone();
                ext.push(v);
                let nc = meet_complex.intersect(&element_complexes[v]);
                next.push((ext, np, nc));
            }
        }
        frontier = next;
        size += 1;
    }
    checks.sort_by(|a, b| a.sigma.len().cmp(&b.sigma.len()).then(a.sigma.cmp(&b.sigma)));
    let all_good = checks
        .iter()
        .all(|c| c.verdict != IntersectionVerdict::Suspect && c.intersection_identity);
    GoodCoverReport { checks, all_good }
}

/// Largest L such that every subset of diameter < L lies inside one cover
/// element; on a finite space this is min over points of the best
/// remaining depth inside an element.
pub fn lebesgue_number<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    cover: &Cover<S>,
) -> Result<S, NerveError> {
    if let Some(x) = (0..space.len()).find(|&x| {
        !cover
            .centers
            .iter()
            .any(|&c| space.d(c, x) < cover.alpha)
    }) {
        return Err(NerveError::NotCovering(x));
    }
    let mut result = S::infinity();
    for x in 0..space.len() {
        let depth = cover
            .centers
            .iter()
            .map(|&c| cover.alpha - space.d(c, x))
            .fold(S::neg_infinity(), S::max);
        result = result.min(depth);
    }
    Ok(result)
}
