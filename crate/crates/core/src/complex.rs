//! Face-closed simplex sets and birth-valued filtrations.
//!
//! Simplices are sorted vertex-index tuples; per-dimension lists are kept
//! lexicographically sorted so every construction is deterministic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum ComplexError {
    #[error("simplex {0:?} has repeated or unsorted vertices")]
    BadSimplex(Vec<usize>),
    #[error("missing face {face:?} of simplex {simplex:?}")]
    MissingFace {
        face: Vec<usize>,
        simplex: Vec<usize>,
    },
    #[error("birth of face {face:?} ({face_birth}) exceeds birth of {simplex:?} ({birth})")]
    NonMonotoneBirth {
        face: Vec<usize>,
        face_birth: f64,
        simplex: Vec<usize>,
        birth: f64,
    },
}

/// A finite abstract simplicial complex over `usize` vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SimplicialComplex {
    /// `by_dim[d]` holds the d-simplices, lexicographically sorted.
    by_dim: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a complex from arbitrary simplices, closing under faces.
    pub fn from_simplices<I>(simplices: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut stack: Vec<Vec<usize>> = Vec::new();
        for s in simplices {
            if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ComplexError::BadSimplex(s));
            }
            stack.push(s);
        }
        while let Some(s) = stack.pop() {
            if all.contains(&s) {
                continue;
            }
            if s.len() > 1 {
                for i in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(i);
                    stack.push(face);
                }
            }
            all.insert(s);
        }
        let mut by_dim: Vec<Vec<Vec<usize>>> = Vec::new();
        for s in all {
            let d = s.len() - 1;
            while by_dim.len() <= d {
                by_dim.push(Vec::new());
            }
            by_dim[d].push(s);
        }
        // BTreeSet order is (length-agnostic) lexicographic; re-sort per dim.
        for level in &mut by_dim {
            level.sort();
        }
        Ok(Self { by_dim })
    }

    /// Builds from per-dimension levels already known to be face-closed
    /// and sorted; validated in debug builds.
    pub(crate) fn from_levels(mut by_dim: Vec<Vec<Vec<usize>>>) -> Self {
        while by_dim.last().is_some_and(Vec::is_empty) {
            by_dim.pop();
        }
        let c = Self { by_dim };
        debug_assert!(c.validate_face_closure().is_ok());
        c
    }

    /// Largest dimension carrying a simplex; `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        (0..self.by_dim.len()).rev().find(|&d| !self.by_dim[d].is_empty())
    }

    pub fn count(&self, d: usize) -> usize {
        self.by_dim.get(d).map_or(0, Vec::len)
    }

    /// Simplex counts per dimension, up to the top dimension present.
    pub fn counts(&self) -> Vec<usize> {
        match self.dim() {
            None => vec![],
            Some(top) => (0..=top).map(|d| self.count(d)).collect(),
        }
    }

    pub fn simplices(&self, d: usize) -> &[Vec<usize>] {
        self.by_dim.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn iter_all(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.by_dim.iter().flatten()
    }

    pub fn total(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        let d = simplex.len().wrapping_sub(1);
        self.by_dim
            .get(d)
            .is_some_and(|level| level.binary_search_by(|s| s.as_slice().cmp(simplex)).is_ok())
    }

    /// Whether every simplex of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.iter_all().all(|s| other.contains(s))
    }

    /// Simplex-wise intersection (a complex again).
    pub fn intersect(&self, other: &Self) -> Self {
        let by_dim = self
            .by_dim
            .iter()
            .map(|level| {
                level
                    .iter()
                    .filter(|s| other.contains(s))
                    .cloned()
                    .collect()
            })
            .collect();
        Self::from_levels(by_dim)
    }

    pub fn validate_face_closure(&self) -> Result<(), ComplexError> {
        for level in &self.by_dim {
            for s in level {
                if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ComplexError::BadSimplex(s.clone()));
                }
                if s.len() > 1 {
                    for i in 0..s.len() {
                        let mut face = s.clone();
                        face.remove(i);
                        if !self.contains(&face) {
                            return Err(ComplexError::MissingFace {
                                face,
                                simplex: s.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Alternating sum of simplex counts.
    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(d, level)| {
                let c = level.len() as i64;
                if d % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }
}

/// A simplex together with its birth value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredSimplex<S> {
    pub vertices: Vec<usize>,
    pub birth: S,
}

/// A one-parameter filtration: simplices with face-monotone birth values.
/// The sublevel set at `t` is the complex of simplices with birth ≤ t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filtration<S> {
    simplices: Vec<FilteredSimplex<S>>,
}

impl<S: Scalar> Filtration<S> {
    /// Validates face-monotonicity of births and stores simplices sorted
    /// by (birth, dimension, lexicographic).
    pub fn new(mut simplices: Vec<FilteredSimplex<S>>) -> Result<Self, ComplexError> {
        for fs in &simplices {
            if fs.vertices.is_empty() || fs.vertices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ComplexError::BadSimplex(fs.vertices.clone()));
            }
        }
        simplices.sort_by(|a, b| {
            a.birth
                .partial_cmp(&b.birth)
                .unwrap()
                .then(a.vertices.len().cmp(&b.vertices.len()))
                .then(a.vertices.cmp(&b.vertices))
        });
        let filt = Self { simplices };
        filt.validate_monotone()?;
        Ok(filt)
    }

    fn validate_monotone(&self) -> Result<(), ComplexError> {
        use std::collections::HashMap;
        let birth_of: HashMap<&[usize], S> = self
            .simplices
            .iter()
            .map(|fs| (fs.vertices.as_slice(), fs.birth))
            .collect();
        for fs in &self.simplices {
            if fs.vertices.len() > 1 {
                for i in 0..fs.vertices.len() {
                    let mut face = fs.vertices.clone();
                    face.remove(i);
                    match birth_of.get(face.as_slice()) {
                        Some(&fb) if fb <= fs.birth => {}
                        Some(&fb) => {
                            return Err(ComplexError::NonMonotoneBirth {
                                face,
                                face_birth: fb.as_f64(),
                                simplex: fs.vertices.clone(),
                                birth: fs.birth.as_f64(),
                            });
                        }
                        None => {
                            return Err(ComplexError::MissingFace {
                                face,
                                simplex: fs.vertices.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Simplices in filtration order.
    pub fn simplices(&self) -> &[FilteredSimplex<S>] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// The complex of simplices born at or before `t`.
    pub fn sublevel(&self, t: S) -> SimplicialComplex {
        let mut by_dim: Vec<Vec<Vec<usize>>> = Vec::new();
        for fs in &self.simplices {
            if fs.birth <= t {
                let d = fs.vertices.len() - 1;
                while by_dim.len() <= d {
                    by_dim.push(Vec::new());
                }
                by_dim[d].push(fs.vertices.clone());
            }
        }
        for level in &mut by_dim {
            level.sort();
        }
        SimplicialComplex::from_levels(by_dim)
    }
}
