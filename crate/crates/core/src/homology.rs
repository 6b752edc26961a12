//! GF(2) simplicial homology: Betti numbers, persistence barcodes, and
//! inclusion-induced map ranks.
//!
//! Boundary matrices are stored sparse, one sorted row-index list per
//! column; reduction is the standard left-to-right column algorithm with
//! deterministic (birth, dimension, lexicographic) ordering.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Filtration, SimplicialComplex};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum HomologyError {
    #[error("sub complex is not contained in the super complex (offending simplex {0:?})")]
    NotIncluded(Vec<usize>),
}

/// Sparse GF(2) boundary matrix from d-simplices to (d-1)-simplices.
#[derive(Debug, Clone)]
pub struct BoundaryMatrix {
    pub dimension: usize,
    /// Sorted facet row indices per column.
    pub columns: Vec<Vec<usize>>,
    pub rows: usize,
}

impl BoundaryMatrix {
    /// Boundary of the d-simplices of a complex (d ≥ 1).
    pub fn of(complex: &SimplicialComplex, d: usize) -> Self {
        assert!(d >= 1);
        let faces = complex.simplices(d - 1);
        let index: HashMap<&[usize], usize> = faces
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i))
            .collect();
        let columns = complex
            .simplices(d)
            .iter()
            .map(|s| {
                let mut col: Vec<usize> = (0..s.len())
                    .map(|i| {
                        let mut face = s.clone();
                        face.remove(i);
                        index[face.as_slice()]
                    })
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        Self {
            dimension: d,
            columns,
            rows: faces.len(),
        }
    }

    /// GF(2) rank by column elimination.
    pub fn rank(&self) -> usize {
        let mut pivots: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut rank = 0;
        for col in &self.columns {
            let mut col = col.clone();
            while let Some(&p) = col.last() {
                match pivots.get(&p) {
                    Some(other) => col = xor(&col, other),
                    None => break,
                }
            }
            if let Some(&p) = col.last() {
                pivots.insert(p, col);
                rank += 1;
            }
        }
        rank
    }
}

/// Symmetric difference of two sorted index lists.
fn xor(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Checks ∂∘∂ = 0 over GF(2) for every pair of consecutive dimensions.
pub fn boundary_squared_is_zero(complex: &SimplicialComplex) -> bool {
    let top = match complex.dim() {
        Some(t) => t,
        None => return true,
    };
    for d in 2..=top {
        let upper = BoundaryMatrix::of(complex, d);
        let lower = BoundaryMatrix::of(complex, d - 1);
        for col in &upper.columns {
            let mut acc: Vec<usize> = Vec::new();
            for &f in col {
                acc = xor(&acc, &lower.columns[f]);
            }
            if !acc.is_empty() {
                return false;
            }
        }
    }
    true
}

/// Betti numbers β₀..β_dim_cap over GF(2) by rank-nullity. β_d for d below
/// the cap is the honest Betti number of the complex; at d = dim_cap it is
/// the value of the capped skeleton (no (d+1)-simplices beyond the cap are
/// consulted).
pub fn betti(complex: &SimplicialComplex, dim_cap: usize) -> Vec<usize> {
    let mut ranks = vec![0usize; dim_cap + 2];
    for (d, rank) in ranks.iter_mut().enumerate().take(dim_cap + 2).skip(1) {
        if complex.count(d) > 0 {
            *rank = BoundaryMatrix::of(complex, d).rank();
        }
    }
    (0..=dim_cap)
        .map(|d| complex.count(d) - ranks[d] - ranks[d + 1])
        .collect()
}

/// A persistence interval [birth, death) in a fixed dimension; `None`
/// death means the class never dies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bar<S> {
    pub dim: usize,
    pub birth: S,
    pub death: Option<S>,
}

impl<S: Scalar> Bar<S> {
    pub fn alive_at(&self, t: S) -> bool {
        self.birth <= t && self.death.map_or(true, |d| t < d)
    }

    pub fn length(&self) -> S {
        match self.death {
            Some(d) => d - self.birth,
            None => S::infinity(),
        }
    }
}

/// Persistence intervals grouped by dimension.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Barcode<S> {
    pub bars: Vec<Bar<S>>,
}

impl<S: Scalar> Barcode<S> {
    pub fn in_dim(&self, d: usize) -> impl Iterator<Item = &Bar<S>> {
        self.bars.iter().filter(move |b| b.dim == d)
    }

    /// Number of classes of dimension `d` alive at `t`.
    pub fn betti_at(&self, d: usize, t: S) -> usize {
        self.in_dim(d).filter(|b| b.alive_at(t)).count()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.bars.iter().map(|b| b.dim).max()
    }
}

/// Standard column-reduction persistence of a filtration. Bars in
/// dimension d are honest for d strictly below the filtration's top
/// dimension; at the top dimension deaths refer to the capped pool.
pub fn persistence<S: Scalar>(filtration: &Filtration<S>) -> Barcode<S> {
    let simplices = filtration.simplices();
    let index: HashMap<&[usize], usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, fs)| (fs.vertices.as_slice(), i))
        .collect();
    // pivot row -> (column owner, reduced column)
    let mut pivot_owner: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut death_of: HashMap<usize, usize> = HashMap::new();
    let mut creator = vec![false; simplices.len()];
    for (j, fs) in simplices.iter().enumerate() {
        if fs.vertices.len() == 1 {
            creator[j] = true;
            continue;
        }
        let mut col: Vec<usize> = (0..fs.vertices.len())
            .map(|i| {
                let mut face = fs.vertices.clone();
                face.remove(i);
                index[face.as_slice()]
            })
            .collect();
        col.sort_unstable();
        loop {
            match col.last() {
                None => {
                    creator[j] = true;
                    break;
                }
                Some(&p) => match pivot_owner.get(&p) {
                    Some(other) => col = xor(&col, other),
                    None => {
                        death_of.insert(p, j);
                        pivot_owner.insert(p, col);
                        break;
                    }
                },
            }
        }
    }
    let mut bars = Vec::new();
    for (i, fs) in simplices.iter().enumerate() {
        if creator[i] {
            let death = death_of.get(&i).map(|&j| simplices[j].birth);
            bars.push(Bar {
                dim: fs.vertices.len() - 1,
                birth: fs.birth,
                death,
            });
        }
    }
    bars.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.birth.partial_cmp(&b.birth).unwrap())
            .then_with(|| match (a.death, b.death) {
                (Some(x), Some(y)) => x.partial_cmp(&y).unwrap(),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            })
    });
    Barcode { bars }
}

/// Rank of the map H_dim(sub) → H_dim(super) induced by inclusion,
/// computed from the two-step filtration (sub at 0, the rest at 1):
/// surviving classes are the dimension-d bars born at 0 that never die.
pub fn induced_rank<S: Scalar>(
    sub: &SimplicialComplex,
    sup: &SimplicialComplex,
    dim: usize,
) -> Result<usize, HomologyError> {
    if let Some(bad) = sub.iter_all().find(|s| !sup.contains(s)) {
        return Err(HomologyError::NotIncluded(bad.clone()));
    }
    let simplices = sup
        .iter_all()
        .map(|s| crate::complex::FilteredSimplex {
            vertices: s.clone(),
            birth: if sub.contains(s) { S::zero() } else { S::one() },
        })
        .collect();
    let filtration = Filtration::new(simplices).expect("two-step births are face-monotone");
    let barcode = persistence(&filtration);
    Ok(barcode
        .in_dim(dim)
        .filter(|b| b.birth == S::zero() && b.death.is_none())
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::FilteredSimplex;

    fn full_simplex(k: usize) -> SimplicialComplex {
        SimplicialComplex::from_simplices(vec![(0..k).collect()]).unwrap()
    }

    fn sphere_boundary(k: usize) -> SimplicialComplex {
        // Boundary of the (k-1)-simplex on k vertices.
        let all: Vec<usize> = (0..k).collect();
        let facets: Vec<Vec<usize>> = (0..k)
            .map(|i| {
                let mut f = all.clone();
                f.remove(i);
                f
            })
            .collect();
        SimplicialComplex::from_simplices(facets).unwrap()
    }

    #[test]
    fn betti_of_cones_and_spheres() {
        assert_eq!(betti(&full_simplex(4), 3), vec![1, 0, 0, 0]);
        assert_eq!(betti(&full_simplex(5), 3), vec![1, 0, 0, 0]);
        // Boundary of the tetrahedron is a 2-sphere.
        assert_eq!(betti(&sphere_boundary(4), 3), vec![1, 0, 1, 0]);
        // Hollow triangle is a circle.
        assert_eq!(betti(&sphere_boundary(3), 2), vec![1, 1, 0]);
    }

    #[test]
    fn boundary_squared_vanishes() {
        assert!(boundary_squared_is_zero(&full_simplex(5)));
        assert!(boundary_squared_is_zero(&sphere_boundary(4)));
    }

    #[test]
    fn euler_characteristic_consistency() {
        for c in [full_simplex(4), sphere_boundary(4), sphere_boundary(3)] {
            let top = c.dim().unwrap();
            let b = betti(&c, top);
            let chi: i64 = b
                .iter()
                .enumerate()
                .map(|(d, &x)| if d % 2 == 0 { x as i64 } else { -(x as i64) })
                .sum();
            assert_eq!(chi, c.euler_characteristic());
        }
    }

    #[test]
    fn growing_edge_barcode() {
        let f = Filtration::new(vec![
            FilteredSimplex {
                vertices: vec![0],
                birth: 0.0,
            },
            FilteredSimplex {
                vertices: vec![1],
                birth: 0.0,
            },
            FilteredSimplex {
                vertices: vec![0, 1],
                birth: 0.7,
            },
        ])
        .unwrap();
        let bc = persistence(&f);
        assert_eq!(bc.bars.len(), 2);
        assert_eq!(
            bc.bars[0],
            Bar {
                dim: 0,
                birth: 0.0,
                death: Some(0.7)
            }
        );
        assert_eq!(
            bc.bars[1],
            Bar {
                dim: 0,
                birth: 0.0,
                death: None
            }
        );
        assert_eq!(bc.betti_at(0, 0.5), 2);
        assert_eq!(bc.betti_at(0, 0.7), 1);
    }

    #[test]
    fn induced_rank_examples() {
        let hollow = sphere_boundary(3);
        let full = full_simplex(3);
        // Same complex: rank equals the Betti number.
        assert_eq!(induced_rank::<f64>(&hollow, &hollow, 1).unwrap(), 1);
        // The cycle dies when the triangle is filled.
        assert_eq!(induced_rank::<f64>(&hollow, &full, 1).unwrap(), 0);
        assert_eq!(induced_rank::<f64>(&hollow, &full, 0).unwrap(), 1);
        // Non-inclusion is an error.
        let err = induced_rank::<f64>(&full, &hollow, 1).unwrap_err();
        assert!(matches!(err, HomologyError::NotIncluded(_)));
    }
}
