//! Crushings: collapsing a set A onto a point b when every ball around
//! each a ∈ A is contained in the matching ball around b, at every scale.
//!
//! Such a collapse induces a simplicial map contiguous to the identity on
//! the selective Rips complex, so a space that crushes down to diameter
//! below r_∞ has a contractible complex. This module verifies the ball
//! inclusions per step (certificates), searches for crushing sequences
//! greedily, and runs the segment-based schedule that crushes a space
//! glued to an interval or disk model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::glue::PseudoMetricUnion;
use crate::metric::{FiniteMetricSpace, ShapeInfo};
use crate::sample::euclidean;
use crate::scalar::Scalar;
use crate::scales::ScaleSequence;
use crate::srips::is_simplex;

#[derive(Debug, Error, PartialEq)]
pub enum CrushError {
    #[error("crushed set must be non-empty")]
    EmptyCrushSet,
    #[error("target {0} must be live and outside the crushed set")]
    BadTarget(usize),
    #[error("crushed set contains non-live index {0}")]
    NotLive(usize),
    #[error("step failed re-verification: ball({point},{scale}) not inside ball({target},{scale}), witness {witness}")]
    Unverified {
        point: usize,
        target: usize,
        scale: f64,
        witness: usize,
    },
    #[error("contiguity check requires an elementary step, got |A| = {0}")]
    NotElementary(usize),
    #[error("inscribed radius undefined: need r' >= r_inf/sqrt(2) > 0, got r_inf={r_inf}, r_prime={r_prime}")]
    Domain { r_inf: f64, r_prime: f64 },
    #[error("divisor must be at least 8, got {0}")]
    DivisorTooSmall(f64),
    #[error("declared bound {bound} is not below the required proximity {threshold}")]
    DeclaredBoundTooLarge { bound: f64, threshold: f64 },
    #[error("model side must carry coordinates and interval/disk shape data")]
    NoSegmentStructure,
}

/// One verified ball inclusion: ball(point, scale) ⊆ ball(target, scale)
/// within the live set, with the number of members checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleCertificate<S> {
    pub point: usize,
    pub scale: S,
    pub ball_size: usize,
}

/// A crushing step: the set A collapsed onto target b, with one
/// certificate per (a, distinct scale value) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrushingStep<S> {
    pub crushed: Vec<usize>,
    pub target: usize,
    pub certificates: Vec<ScaleCertificate<S>>,
}

/// An ordered sequence of verified crushing steps ending in a terminal
/// set; the sequence witnesses crushability when the terminal diameter is
/// below r_∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrushingSequence<S> {
    pub steps: Vec<CrushingStep<S>>,
    pub terminal: Vec<usize>,
    pub terminal_diameter: S,
}

/// Failure value: the live set at which no admissible step was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StuckReport<S> {
    pub live: Vec<usize>,
    pub diameter: S,
    pub steps_applied: usize,
    pub detail: String,
}

/// Outcome of a crushability search; failure is a value, not an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CrushOutcome<S> {
    Crushed(CrushingSequence<S>),
    Stuck(StuckReport<S>),
}

impl<S> CrushOutcome<S> {
    pub fn is_crushed(&self) -> bool {
        matches!(self, CrushOutcome::Crushed(_))
    }

    pub fn sequence(&self) -> Option<&CrushingSequence<S>> {
        match self {
            CrushOutcome::Crushed(seq) => Some(seq),
            CrushOutcome::Stuck(_) => None,
        }
    }
}

/// Either an admissible verified step or the first violation found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CrushCheck<S> {
    Admissible(CrushingStep<S>),
    Violated {
        point: usize,
        scale: S,
        witness: usize,
    },
}

impl<S> CrushCheck<S> {
    pub fn admissible(self) -> Option<CrushingStep<S>> {
        match self {
            CrushCheck::Admissible(step) => Some(step),
            CrushCheck::Violated { .. } => None,
        }
    }
}

/// Checks the crushing condition for A onto b within the live set: for
/// every a ∈ A and every distinct scale value r,
/// ball(a, r) ∩ live ⊆ ball(b, r) ∩ live.
pub fn crush_condition<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    live: &[usize],
    a_set: &[usize],
    b: usize,
    scales: &ScaleSequence<S>,
) -> Result<CrushCheck<S>, CrushError> {
    if a_set.is_empty() {
        return Err(CrushError::EmptyCrushSet);
    }
    if a_set.contains(&b) || !live.contains(&b) {
        return Err(CrushError::BadTarget(b));
    }
    for &a in a_set {
        if !live.contains(&a) {
            return Err(CrushError::NotLive(a));
        }
    }
    let values = scales.distinct_values();
    let mut certificates = Vec::with_capacity(a_set.len() * values.len());
    for &a in a_set {
        for &r in &values {
            let mut size = 0;
            for &x in live {
                if space.d(a, x) < r {
                    size += 1;
                    if !(space.d(b, x) < r) {
                        return Ok(CrushCheck::Violated {
                            point: a,
                            scale: r,
                            witness: x,
                        });
                    }
                }
            }
            certificates.push(ScaleCertificate {
                point: a,
                scale: r,
                ball_size: size,
            });
        }
    }
    Ok(CrushCheck::Admissible(CrushingStep {
        crushed: a_set.to_vec(),
        target: b,
        certificates,
    }))
}

/// Applies a step after re-verifying it; returns the surviving live set.
pub fn apply_crush<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    live: &[usize],
    step: &CrushingStep<S>,
    scales: &ScaleSequence<S>,
) -> Result<Vec<usize>, CrushError> {
    match crush_condition(space, live, &step.crushed, step.target, scales)? {
        CrushCheck::Admissible(_) => Ok(live
            .iter()
            .copied()
            .filter(|v| !step.crushed.contains(v))
            .collect()),
        CrushCheck::Violated {
            point,
            scale,
            witness,
        } => Err(CrushError::Unverified {
            point,
            target: step.target,
            scale: scale.as_f64(),
            witness,
        }),
    }
}

/// Result of a contiguity check over the live complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContiguityReport {
    pub simplices_checked: usize,
    pub violation: Option<Vec<usize>>,
}

impl ContiguityReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// For an elementary step a → b, checks that σ ∪ {b} is a simplex for
/// every live simplex σ containing a, up to `dim_cap`. A violation here
/// would contradict the contiguity of the induced map, so it only ever
/// witnesses a bug in the step verification.
pub fn contiguity_certificate<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    live: &[usize],
    step: &CrushingStep<S>,
    scales: &ScaleSequence<S>,
    dim_cap: usize,
) -> Result<ContiguityReport, CrushError> {
    if step.crushed.is_empty() {
        return Ok(ContiguityReport {
            simplices_checked: 0,
            violation: None,
        });
    }
    if step.crushed.len() != 1 {
        return Err(CrushError::NotElementary(step.crushed.len()));
    }
    let a = step.crushed[0];
    let b = step.target;
    // Every simplex through a lies in the r1-ball of a.
    let neighbors: Vec<usize> = live
        .iter()
        .copied()
        .filter(|&x| x != a && space.d(a, x) < scales.r1())
        .collect();
    let mut checked = 0usize;
    let mut violation = None;
    // DFS over simplices {a} ∪ T for T ⊆ neighbors, extending T along the
    // neighbor list; membership is closed under faces so pruning on
    // non-simplices is exact.
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(vec![a], 0)];
    while let Some((sigma, from)) = stack.pop() {
        checked += 1;
        let with_b = insert_sorted(&sigma, b);
        if !is_simplex(space, &with_b, scales) {
            violation = Some(sigma.clone());
            break;
        }
        if sigma.len() <= dim_cap {
            for (pos, &w) in neighbors.iter().enumerate().skip(from) {
                let ext = insert_sorted(&sigma, w);
                if is_simplex(space, &ext, scales) {
                    stack.push((ext, pos + 1));
                }
            }
        }
    }
    Ok(ContiguityReport {
        simplices_checked: checked,
        violation,
    })
}

fn insert_sorted(sigma: &[usize], v: usize) -> Vec<usize> {
    let mut out = sigma.to_vec();
    if let Err(pos) = out.binary_search(&v) {
        out.insert(pos, v);
    }
    out
}

/// Search strategy for `greedy_crushable`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Repeatedly crush the live point farthest from the center (ties to
    /// the lowest index) into the first admissible strictly-nearer point,
    /// scanned by distance from the crushed point. `None` uses the metric
    /// center.
    FarthestFirst { center: Option<usize> },
    /// Scan all (a, b) pairs in lexicographic order and apply the first
    /// admissible elementary crushing.
    ExhaustiveElementary,
}

/// Greedily builds a crushing sequence; succeeds when the terminal
/// diameter drops below r_∞. Every emitted step carries its verified
/// certificates.
pub fn greedy_crushable<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    scales: &ScaleSequence<S>,
    strategy: Strategy,
) -> CrushOutcome<S> {
    let live: Vec<usize> = (0..space.len()).collect();
    greedy_crushable_on(space, &live, scales, strategy)
}

/// Same, starting from a given live subset.
pub fn greedy_crushable_on<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    live0: &[usize],
    scales: &ScaleSequence<S>,
    strategy: Strategy,
) -> CrushOutcome<S> {
    let mut live = live0.to_vec();
    let mut steps = Vec::new();
    // The center is chosen once, up front; it stays the reference point
    // even if it is crushed along the way.
    let strategy = match strategy {
        Strategy::FarthestFirst { center: None } => Strategy::FarthestFirst {
            center: Some(metric_center_of(space, live0)),
        },
        other => other,
    };
    while live.len() > 1 {
        let next = match strategy {
            Strategy::FarthestFirst { center } => {
                farthest_first_step(space, &live, scales, center.unwrap())
            }
            Strategy::ExhaustiveElementary => exhaustive_step(space, &live, scales),
        };
        match next {
            Some(step) => {
                live.retain(|v| !step.crushed.contains(v));
                steps.push(step);
            }
            None => break,
        }
    }
    let diameter = space.diameter(&live).expect("live set stays non-empty");
    if diameter < scales.r_inf() {
        CrushOutcome::Crushed(CrushingSequence {
            steps,
            terminal: live,
            terminal_diameter: diameter,
        })
    } else {
        let applied = steps.len();
        CrushOutcome::Stuck(StuckReport {
            live,
            diameter,
            steps_applied: applied,
            detail: "no admissible crushing step".to_string(),
        })
    }
}

fn metric_center_of<S: Scalar>(space: &FiniteMetricSpace<S>, live: &[usize]) -> usize {
    let mut best = (S::infinity(), usize::MAX);
    for &i in live {
        let ecc = live
            .iter()
            .map(|&j| space.d(i, j))
            .fold(S::zero(), S::max);
        if ecc < best.0 {
            best = (ecc, i);
        }
    }
    best.1
}

fn farthest_first_step<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    live: &[usize],
    scales: &ScaleSequence<S>,
    center: usize,
) -> Option<CrushingStep<S>> {
    let mut far = (S::neg_infinity(), usize::MAX);
    for &i in live {
        let d = space.d(center, i);
        if d > far.0 {
            far = (d, i);
        }
    }
    let y = far.1;
    let mut candidates: Vec<usize> = live
        .iter()
        .copied()
        .filter(|&b| b != y && space.d(center, b) < far.0)
        .collect();
    candidates.sort_by(|&a, &b| {
        space
            .d(y, a)
            .partial_cmp(&space.d(y, b))
            .unwrap()
            .then(a.cmp(&b))
    });
    for b in candidates {
        if let Ok(CrushCheck::Admissible(step)) = crush_condition(space, live, &[y], b, scales) {
            return Some(step);
        }
    }
    None
}

fn exhaustive_step<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    live: &[usize],
    scales: &ScaleSequence<S>,
) -> Option<CrushingStep<S>> {
    for &a in live {
        for &b in live {
            if a == b {
                continue;
            }
            if let Ok(CrushCheck::Admissible(step)) = crush_condition(space, live, &[a], b, scales)
            {
                return Some(step);
            }
        }
    }
    None
}

/// Radius of the ball inscribed in the admissible-target region when
/// crushing a point at distance `r_prime` from the center at limit scale
/// `r_inf`:  r_∞ (1 − sqrt(1 − r_∞²/(4 r'²))). Valid for
/// r' ≥ r_∞/√2 > 0, and decreasing in r' on that range.
pub fn delta1<S: Scalar>(r_inf: S, r_prime: S) -> Result<S, CrushError> {
    let two = S::lit(2.0);
    if !(r_inf > S::zero()) || r_prime * two.sqrt() < r_inf {
        return Err(CrushError::Domain {
            r_inf: r_inf.as_f64(),
            r_prime: r_prime.as_f64(),
        });
    }
    let ratio = (r_inf * r_inf) / (S::lit(4.0) * r_prime * r_prime);
    Ok(r_inf * (S::one() - (S::one() - ratio).sqrt()))
}

/// Proximity threshold for crushing a space glued to a star-shaped model
/// inside a ball of radius `alpha`: delta1(r_inf, alpha) / k. The divisor
/// keeps every strict bound of the schedule satisfied with slack; values
/// below 8 are rejected.
pub fn delta1_prime<S: Scalar>(r_inf: S, alpha: S, k: S) -> Result<S, CrushError> {
    if k < S::lit(8.0) {
        return Err(CrushError::DivisorTooSmall(k.as_f64()));
    }
    if alpha < r_inf {
        return Err(CrushError::Domain {
            r_inf: r_inf.as_f64(),
            r_prime: alpha.as_f64(),
        });
    }
    Ok(delta1(r_inf, alpha)? / k)
}

/// Parameters of the glued-space crushing schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnionCrushParams<S> {
    /// Divisor applied to the inscribed radius (≥ 8).
    pub k_divisor: S,
    /// Radius of the ball containing the model side; defaults to the
    /// model's shape radius (disk radius, or half the interval length).
    pub alpha: Option<S>,
}

impl<S: Scalar> Default for UnionCrushParams<S> {
    fn default() -> Self {
        Self {
            k_divisor: S::lit(crate::DEFAULT_K_DIVISOR),
            alpha: None,
        }
    }
}

/// Crushes the right side of a union whose left side is a star-shaped
/// interval/disk model, following the farthest-point schedule: walk the
/// model points outside-in; for each anchor y, move toward the center by
/// r_∞²/(2 r'), pick the nearest right-side point to that segment point,
/// and crush the right-side trace of the 2δ'₁-ball around y into it. Every
/// step is re-verified through `crush_condition`; the residue is finally
/// crushed into a right-side point near the center.
pub fn crushable_in_union<S: Scalar>(
    union: &PseudoMetricUnion<S>,
    scales: &ScaleSequence<S>,
    params: &UnionCrushParams<S>,
) -> Result<CrushOutcome<S>, CrushError> {
    let left = &union.left;
    let right = &union.right;
    let coords = left.coords().ok_or(CrushError::NoSegmentStructure)?;
    let (center, default_alpha): (Vec<S>, S) = match left.shape() {
        Some(ShapeInfo::Interval { length }) => {
            (vec![*length / S::lit(2.0)], *length / S::lit(2.0))
        }
        Some(ShapeInfo::Disk { radius, dim }) => (vec![S::zero(); *dim], *radius),
        _ => return Err(CrushError::NoSegmentStructure),
    };
    let alpha = params.alpha.unwrap_or(default_alpha);
    let r_inf = scales.r_inf();
    let d1p = delta1_prime(r_inf, alpha, params.k_divisor)?;
    if !(union.declared_bound() < d1p) {
        return Err(CrushError::DeclaredBoundTooLarge {
            bound: union.declared_bound().as_f64(),
            threshold: d1p.as_f64(),
        });
    }
    // Upper bound on the union distance from an arbitrary model-ambient
    // point to a right-side point, routed through the nearest left sample.
    let reach = |p: &[S], j: usize| -> S {
        (0..left.len())
            .map(|a| euclidean(p, &coords[a]) + union.cross(a, j))
            .fold(S::infinity(), S::min)
    };

    let mut order: Vec<usize> = (0..left.len()).collect();
    let radius_of = |i: usize| euclidean(&coords[i], &center);
    order.sort_by(|&a, &b| {
        radius_of(b)
            .partial_cmp(&radius_of(a))
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut live: Vec<usize> = (0..right.len()).collect();
    let mut steps: Vec<CrushingStep<S>> = Vec::new();
    let two = S::lit(2.0);
    let cutoff = r_inf / two.sqrt();
    for &y in &order {
        if live.len() <= 1 {
            break;
        }
        let r_prime = radius_of(y);
        if r_prime < cutoff {
            break;
        }
        let mut a_set: Vec<usize> = live
            .iter()
            .copied()
            .filter(|&j| union.cross(y, j) < two * d1p)
            .collect();
        if a_set.is_empty() {
            continue;
        }
        // Segment point at distance r_inf^2 / (2 r') from y toward the center.
        let t = (r_inf * r_inf) / (two * r_prime * r_prime);
        let y_hat: Vec<S> = coords[y]
            .iter()
            .zip(&center)
            .map(|(&yc, &cc)| yc + (cc - yc) * t)
            .collect();
        let mut pick = (S::infinity(), usize::MAX);
        for &j in &live {
            let d = reach(&y_hat, j);
            if d < pick.0 {
                pick = (d, j);
            }
        }
        let (pick_dist, b) = pick;
        if !(pick_dist < d1p) {
            let diameter = right.diameter(&live).unwrap();
            return Ok(CrushOutcome::Stuck(StuckReport {
                live,
                diameter,
                steps_applied: steps.len(),
                detail: format!(
                    "no right point within {} of the segment point for anchor {y}",
                    d1p.as_f64()
                ),
            }));
        }
        a_set.retain(|&j| j != b);
        if a_set.is_empty() {
            continue;
        }
        match crush_condition(right, &live, &a_set, b, scales)? {
            CrushCheck::Admissible(step) => {
                live.retain(|v| !step.crushed.contains(v));
                steps.push(step);
            }
            CrushCheck::Violated {
                point,
                scale,
                witness,
            } => {
                let diameter = right.diameter(&live).unwrap();
                return Ok(CrushOutcome::Stuck(StuckReport {
                    live,
                    diameter,
                    steps_applied: steps.len(),
                    detail: format!(
                        "step at anchor {y} failed: ball({point},{}) not in ball({b},{}), witness {witness}",
                        scale.as_f64(),
                        scale.as_f64()
                    ),
                }));
            }
        }
    }
    // Terminal crush into a right point near the center.
    if live.len() > 1 {
        let mut pick = (S::infinity(), usize::MAX);
        for &j in &live {
            let d = reach(&center, j);
            if d < pick.0 {
                pick = (d, j);
            }
        }
        let (pick_dist, origin) = pick;
        if !(pick_dist < d1p) {
            return Ok(CrushOutcome::Stuck(StuckReport {
                live: live.clone(),
                diameter: right.diameter(&live).unwrap(),
                steps_applied: steps.len(),
                detail: format!("no right point within {} of the center", d1p.as_f64()),
            }));
        }
        let a_set: Vec<usize> = live.iter().copied().filter(|&j| j != origin).collect();
        match crush_condition(right, &live, &a_set, origin, scales)? {
            CrushCheck::Admissible(step) => {
                live.retain(|v| !step.crushed.contains(v));
                steps.push(step);
            }
            CrushCheck::Violated {
                point,
                scale,
                witness,
            } => {
                return Ok(CrushOutcome::Stuck(StuckReport {
                    live: live.clone(),
                    diameter: right.diameter(&live).unwrap(),
                    steps_applied: steps.len(),
                    detail: format!(
                        "terminal crush failed: ball({point},{}) ⊄ ball({origin},{}), witness {witness}",
                        scale.as_f64(),
                        scale.as_f64()
                    ),
                }));
            }
        }
    }
    let diameter = right.diameter(&live).unwrap();
    Ok(CrushOutcome::Crushed(CrushingSequence {
        steps,
        terminal: live,
        terminal_diameter: diameter,
    }))
}

/// The point at the given distance from `from` along the straight segment
/// toward `toward`.
pub fn segment_point<S: Scalar>(from: &[S], toward: &[S], dist_from_start: S) -> Vec<S> {
    let len = euclidean(from, toward);
    if len == S::zero() {
        return from.to_vec();
    }
    let t = dist_from_start / len;
    from.iter()
        .zip(toward)
        .map(|(&f, &g)| f + (g - f) * t)
        .collect()
}
