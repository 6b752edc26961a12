//! Eventually-constant scale sequences.
//!
//! A scale sequence r̃ = (r₁, r₂, …) is non-increasing and positive. Only a
//! finite prefix is stored; every index past the prefix takes the last
//! prefix value (the tail). Membership of a q-simplex only ever reads
//! r₁..r_q, so this represents any sequence faithfully up to a declared
//! dimension cap.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum ScaleError {
    #[error("scale sequence must be non-empty")]
    Empty,
    #[error("scale at position {0} is not positive")]
    NonPositive(usize),
    #[error("scales must be non-increasing: entry {0} exceeds entry {1}")]
    Increasing(usize, usize),
    #[error("profile must start at 1, got {0}")]
    ProfileHead(String),
    #[error("could not parse scale entry {0:?}")]
    Parse(String),
}

/// Non-increasing positive scales with an eventually-constant tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSequence<S> {
    prefix: Vec<S>,
}

impl<S: Scalar> ScaleSequence<S> {
    /// Validates and stores the prefix; the tail equals the last entry.
    pub fn new(prefix: Vec<S>) -> Result<Self, ScaleError> {
        if prefix.is_empty() {
            return Err(ScaleError::Empty);
        }
        for (i, &r) in prefix.iter().enumerate() {
            if !(r > S::zero()) {
                return Err(ScaleError::NonPositive(i));
            }
            if i > 0 && r > prefix[i - 1] {
                return Err(ScaleError::Increasing(i, i - 1));
            }
        }
        Ok(Self { prefix })
    }

    /// Constant sequence (r, r, r, …): the plain Rips regime.
    pub fn constant(r: S) -> Result<Self, ScaleError> {
        Self::new(vec![r])
    }

    /// A filtration profile: a scale sequence whose first entry is 1.
    pub fn profile(prefix: Vec<S>) -> Result<Self, ScaleError> {
        let seq = Self::new(prefix)?;
        if seq.prefix[0] != S::one() {
            return Err(ScaleError::ProfileHead(format!("{}", seq.prefix[0])));
        }
        Ok(seq)
    }

    /// Parses a comma-separated list such as `0.6,0.4`; the last entry is
    /// the tail.
    pub fn parse(text: &str) -> Result<Self, ScaleError> {
        let vals = text
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<f64>()
                    .map(S::lit)
                    .map_err(|_| ScaleError::Parse(t.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(vals)
    }

    /// r(i) for any i ≥ 1.
    pub fn r(&self, i: usize) -> S {
        assert!(i >= 1, "scale indices start at 1");
        self.prefix[(i - 1).min(self.prefix.len() - 1)]
    }

    /// The tail value r_∞.
    pub fn r_inf(&self) -> S {
        *self.prefix.last().unwrap()
    }

    /// First entry r₁.
    pub fn r1(&self) -> S {
        self.prefix[0]
    }

    pub fn prefix(&self) -> &[S] {
        &self.prefix
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    /// α > r̃, i.e. α > r₁.
    pub fn above(&self, alpha: S) -> bool {
        alpha > self.r1()
    }

    /// r̃ > β, i.e. r_∞ > β.
    pub fn below(&self, beta: S) -> bool {
        self.r_inf() > beta
    }

    /// Entrywise comparison; `true` when `self` is pointwise ≤ `other`.
    pub fn le(&self, other: &Self) -> bool {
        let k = self.prefix_len().max(other.prefix_len());
        (1..=k).all(|i| self.r(i) <= other.r(i))
    }

    /// The distinct scale values, descending. Ball-inclusion conditions are
    /// per-index with the same value on both sides, so only distinct values
    /// need checking.
    pub fn distinct_values(&self) -> Vec<S> {
        let mut vals = Vec::new();
        for &r in &self.prefix {
            if vals.last() != Some(&r) {
                vals.push(r);
            }
        }
        vals
    }

    /// Sequence scaled by `t > 0`.
    pub fn scaled(&self, t: S) -> Self {
        Self {
            prefix: self.prefix.iter().map(|&r| r * t).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accessors_and_tail() {
        let s = ScaleSequence::<f64>::new(vec![1.0, 0.3, 0.07, 0.01]).unwrap();
        assert_eq!(s.r(1), 1.0);
        assert_eq!(s.r(4), 0.01);
        assert_eq!(s.r(17), 0.01);
        assert_eq!(s.r_inf(), 0.01);
        assert!(s.above(1.5));
        assert!(!s.above(1.0));
        assert!(s.below(0.005));
        assert!(!s.below(0.01));
    }

    #[test]
    fn rejects_bad_sequences() {
        assert_eq!(
            ScaleSequence::<f64>::new(vec![]).unwrap_err(),
            ScaleError::Empty
        );
        assert_eq!(
            ScaleSequence::new(vec![1.0, 0.0]).unwrap_err(),
            ScaleError::NonPositive(1)
        );
        assert_eq!(
            ScaleSequence::new(vec![0.5, 0.7]).unwrap_err(),
            ScaleError::Increasing(1, 0)
        );
    }

    #[test]
    fn parses_cli_syntax() {
        let s = ScaleSequence::<f64>::parse("0.6, 0.4").unwrap();
        assert_eq!(s.prefix(), &[0.6, 0.4]);
        assert!(ScaleSequence::<f64>::parse("0.6,x").is_err());
    }

    #[test]
    fn profile_head_must_be_one() {
        assert!(ScaleSequence::<f64>::profile(vec![1.0, 0.5]).is_ok());
        assert!(ScaleSequence::<f64>::profile(vec![0.9, 0.5]).is_err());
    }

    #[test]
    fn distinct_values_dedup_consecutive() {
        let s = ScaleSequence::new(vec![2.5, 2.5, 1.0]).unwrap();
        assert_eq!(s.distinct_values(), vec![2.5, 1.0]);
    }

    #[test]
    fn works_in_f32() {
        let s = ScaleSequence::<f32>::parse("0.5,0.25").unwrap();
        assert_eq!(s.r_inf(), 0.25f32);
    }
}
