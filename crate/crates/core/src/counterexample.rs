//! The spread-points instance: n+1 evenly spaced points whose scale
//! sequence decays so fast (r_{i-1} > (i+1) r_i) that every proper subset
//! is a simplex but the full set is not, leaving a non-trivial class in
//! dimension n-1 while the space admits no crushing at all.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crushing::{greedy_crushable, CrushOutcome, Strategy};
use crate::homology::betti;
use crate::metric::FiniteMetricSpace;
use crate::scalar::Scalar;
use crate::scales::{ScaleError, ScaleSequence};
use crate::srips::build_complex;

#[derive(Debug, Error, PartialEq)]
pub enum CounterexampleError {
    #[error("n must be at least 1")]
    BadN,
    #[error("need at least n+1 = {needed} scale entries, got {got}")]
    TooFewScales { needed: usize, got: usize },
    #[error("decay constraint violated at i={i}: r_{im1} = {lhs} must exceed (i+1)·r_i = {rhs}")]
    ConstraintViolated {
        i: usize,
        im1: usize,
        lhs: f64,
        rhs: f64,
    },
    #[error(transparent)]
    Scales(#[from] ScaleError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleReport<S> {
    pub n: usize,
    pub scales: Vec<S>,
    pub gap: S,
    pub constraints: Vec<ConstraintCheck<S>>,
    pub simplex_counts: Vec<usize>,
    pub betti: Vec<usize>,
    pub top_simplices: usize,
    pub crushing_stuck: bool,
    pub stuck_live_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck<S> {
    pub i: usize,
    pub lhs: S,
    pub rhs: S,
}

/// Scales with the prescribed decay, starting at `r1`:
/// r_i = r_{i-1} / (i + 2), for i = 2..=n+1.
pub fn default_scales<S: Scalar>(n: usize, r1: S) -> Result<ScaleSequence<S>, CounterexampleError> {
    if n == 0 {
        return Err(CounterexampleError::BadN);
    }
    let mut prefix = vec![r1];
    for i in 2..=(n + 1) {
        let prev = *prefix.last().unwrap();
        prefix.push(prev / S::from_usize(i + 2).unwrap());
    }
    Ok(ScaleSequence::new(prefix)?)
}

/// Validates the decay constraint r_{i-1} > (i+1) r_i on the stored
/// prefix and returns the per-index checks.
pub fn validate_decay<S: Scalar>(
    n: usize,
    scales: &ScaleSequence<S>,
) -> Result<Vec<ConstraintCheck<S>>, CounterexampleError> {
    if n == 0 {
        return Err(CounterexampleError::BadN);
    }
    if scales.prefix_len() < n + 1 {
        return Err(CounterexampleError::TooFewScales {
            needed: n + 1,
            got: scales.prefix_len(),
        });
    }
    let mut checks = Vec::new();
    for i in 2..=scales.prefix_len() {
        let lhs = scales.r(i - 1);
        let rhs = S::from_usize(i + 1).unwrap() * scales.r(i);
        if !(lhs > rhs) {
            return Err(CounterexampleError::ConstraintViolated {
                i,
                im1: i - 1,
                lhs: lhs.as_f64(),
                rhs: rhs.as_f64(),
            });
        }
        checks.push(ConstraintCheck {
            i,
            lhs,
            rhs: scales.r(i),
        });
    }
    Ok(checks)
}

/// The spread instance itself: n+1 collinear points with gap just above
/// r_n, so that no n+1 points fit into n clusters of diameter < r_n.
pub fn spread_space<S: Scalar>(
    n: usize,
    scales: &ScaleSequence<S>,
) -> Result<(FiniteMetricSpace<S>, S), CounterexampleError> {
    validate_decay(n, scales)?;
    let r_n = scales.r(n);
    // Gap slightly above r_n, small enough that the whole set has
    // diameter below r_{n-1} (and thus passes every lower-index check).
    let ratio = if n >= 2 { scales.r(n - 1) / r_n } else { S::infinity() };
    let margin = if ratio.is_finite() {
        let nf = S::from_usize(n).unwrap();
        S::lit(1.0 / 7.0).min((ratio - nf) / (S::lit(2.0) * nf))
    } else {
        S::lit(1.0 / 7.0)
    };
    let gap = r_n * (S::one() + margin);
    let size = n + 1;
    let mut rows = vec![vec![S::zero(); size]; size];
    for i in 0..size {
        for j in 0..size {
            let diff = S::from_usize(i.max(j) - i.min(j)).unwrap();
            rows[i][j] = gap * diff;
        }
    }
    let space = FiniteMetricSpace::from_matrix(rows).expect("collinear points form a metric");
    Ok((space, gap))
}

/// Runs the full instance: constraint validation, complex enumeration,
/// Betti numbers, and the (failing) crushability search.
pub fn counterexample_report<S: Scalar>(
    n: usize,
    scales: &ScaleSequence<S>,
) -> Result<CounterexampleReport<S>, CounterexampleError> {
    let constraints = validate_decay(n, scales)?;
    let (space, gap) = spread_space(n, scales)?;
    let complex = build_complex(&space, scales, n);
    let b = betti(&complex, n);
    let top = complex.count(n);
    let crush = greedy_crushable(&space, scales, Strategy::ExhaustiveElementary);
    let (stuck, live) = match &crush {
        CrushOutcome::Stuck(report) => (true, report.live.len()),
        CrushOutcome::Crushed(_) => (false, 0),
    };
    Ok(CounterexampleReport {
        n,
        scales: scales.prefix().to_vec(),
        gap,
        constraints,
        simplex_counts: complex.counts(),
        betti: b,
        top_simplices: top,
        crushing_stuck: stuck,
        stuck_live_size: live,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_instance_n3() {
        let scales = ScaleSequence::<f64>::new(vec![1.0, 0.3, 0.07, 0.01]).unwrap();
        let report = counterexample_report(3, &scales).unwrap();
        // Gap 0.07 * 8/7 = 0.08, the evenly spaced quadruple.
        assert!((report.gap - 0.08).abs() < 1e-12);
        assert_eq!(report.simplex_counts, vec![4, 6, 4]);
        assert_eq!(report.top_simplices, 0);
        assert_eq!(report.betti, vec![1, 0, 1, 0]);
        assert!(report.crushing_stuck);
        assert_eq!(report.stuck_live_size, 4);
    }

    #[test]
    fn two_dimensional_analog_is_a_circle() {
        let scales = default_scales(2, 1.0).unwrap();
        let report = counterexample_report(2, &scales).unwrap();
        assert_eq!(report.betti, vec![1, 1, 0]);
        assert!(report.crushing_stuck);
    }

    #[test]
    fn violated_constraint_is_an_error() {
        // r1 = 1, r2 = 0.4 violates r1 > 3 r2.
        let scales = ScaleSequence::new(vec![1.0, 0.4, 0.01]).unwrap();
        let err = counterexample_report(2, &scales).unwrap_err();
        assert!(matches!(
            err,
            CounterexampleError::ConstraintViolated { i: 2, .. }
        ));
    }

    #[test]
    fn generated_scales_always_pass() {
        for n in 1..=6 {
            let scales = default_scales::<f64>(n, 1.0).unwrap();
            assert!(validate_decay(n, &scales).is_ok());
            let report = counterexample_report(n, &scales).unwrap();
            assert_eq!(report.top_simplices, 0);
            let mut expected = vec![0usize; n + 1];
            expected[0] = 1;
            expected[n - 1] += 1;
            if n == 1 {
                // Two isolated points: beta_0 = 2.
                expected = vec![2, 0];
            }
            assert_eq!(report.betti, expected, "n={n}");
        }
    }
}
