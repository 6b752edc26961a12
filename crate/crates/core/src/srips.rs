//! Selective Rips membership, complex enumeration, and the induced
//! one-parameter filtration.
//!
//! A finite vertex set σ is a simplex at scales r̃ when, for every i, it is
//! a union of at most i sets of diameter < rᵢ. Overlapping or empty parts
//! never help, so the test is equivalent to partitioning σ into ≤ i parts,
//! which in turn is exact i-colorability of the conflict graph whose edges
//! are the pairs violating the bound. Colorability is decided by
//! backtracking with component decomposition and degree ordering, so the
//! answer is exact; keep simplices at desk scale (≤ 64 vertices, in
//! practice ≤ 16).

use itertools::Itertools;
use rayon::prelude::*;

use crate::complex::{FilteredSimplex, Filtration, SimplicialComplex};
use crate::metric::FiniteMetricSpace;
use crate::scalar::Scalar;
use crate::scales::ScaleSequence;

/// Whether σ splits into at most `parts` clusters of diameter below
/// `bound` (strictly below when `strict`, else ≤).
pub fn admits_partition<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    sigma: &[usize],
    parts: usize,
    bound: S,
    strict: bool,
) -> bool {
    assert!(parts >= 1);
    assert!(!sigma.is_empty());
    let k = sigma.len();
    assert!(k <= 64, "partition feasibility supports at most 64 vertices");
    if k <= parts {
        return true;
    }
    // Conflict edges: pairs that cannot share a part.
    let mut adj = vec![0u64; k];
    for a in 0..k {
        for b in (a + 1)..k {
            let d = space.d(sigma[a], sigma[b]);
            let conflict = if strict { d >= bound } else { d > bound };
            if conflict {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
    }
    if adj.iter().all(|&m| m == 0) {
        return true;
    }
    if parts == 1 {
        return false;
    }
    // Color each connected component of the conflict graph independently.
    let mut seen = 0u64;
    for start in 0..k {
        if seen & (1 << start) != 0 {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = vec![start];
        seen |= 1 << start;
        while let Some(v) = stack.pop() {
            comp.push(v);
            let mut m = adj[v] & !seen;
            while m != 0 {
                let w = m.trailing_zeros() as usize;
                m &= m - 1;
                seen |= 1 << w;
                stack.push(w);
            }
        }
        if comp.len() > parts && !colorable(&adj, &mut comp, parts) {
            return false;
        }
    }
    true
}

/// Exact `parts`-colorability of the conflict graph restricted to `comp`.
fn colorable(adj: &[u64], comp: &mut [usize], parts: usize) -> bool {
    // High-degree vertices first makes the pruning bite early.
    comp.sort_by_key(|&v| std::cmp::Reverse(adj[v].count_ones()));
    let mut classes: Vec<u64> = Vec::with_capacity(parts);
    fn assign(adj: &[u64], comp: &[usize], idx: usize, classes: &mut Vec<u64>, parts: usize) -> bool {
        if idx == comp.len() {
            return true;
        }
        let v = comp[idx];
        for c in 0..classes.len() {
            if classes[c] & adj[v] == 0 {
                classes[c] |= 1 << v;
                if assign(adj, comp, idx + 1, classes, parts) {
                    return true;
                }
                classes[c] &= !(1 << v);
            }
        }
        // Opening a fresh color class; identical empty classes are
        // interchangeable, so one fresh attempt suffices.
        if classes.len() < parts {
            classes.push(1 << v);
            if assign(adj, comp, idx + 1, classes, parts) {
                return true;
            }
            classes.pop();
        }
        false
    }
    assign(adj, comp, 0, &mut classes, parts)
}

/// Membership test: σ is a simplex iff the partition condition holds for
/// every i in 1..|σ|-1 with bound r(i), strictly. Indices i ≥ |σ| are
/// vacuous (singleton parts), and consecutive equal scales only need the
/// check once: more parts at the same bound is never harder.
pub fn is_simplex<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    sigma: &[usize],
    scales: &ScaleSequence<S>,
) -> bool {
    membership(space, sigma, scales, true)
}

/// Non-strict variant (diameters ≤ rᵢ); this is what sublevel sets of the
/// filtration realize so that births are attained.
pub fn is_simplex_nonstrict<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    sigma: &[usize],
    scales: &ScaleSequence<S>,
) -> bool {
    membership(space, sigma, scales, false)
}

fn membership<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    sigma: &[usize],
    scales: &ScaleSequence<S>,
    strict: bool,
) -> bool {
    if sigma.len() <= 1 {
        return true;
    }
    for i in 1..sigma.len() {
        if i > 1 && scales.r(i) == scales.r(i - 1) {
            continue;
        }
        if !admits_partition(space, sigma, i, scales.r(i), strict) {
            return false;
        }
    }
    true
}

/// All simplices of the selective Rips complex with dimension ≤ `dim_cap`,
/// enumerated deterministically (lexicographic per dimension).
pub fn build_complex<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    scales: &ScaleSequence<S>,
    dim_cap: usize,
) -> SimplicialComplex {
    let verts: Vec<usize> = (0..space.len()).collect();
    build_complex_on(space, &verts, scales, dim_cap)
}

/// Same, restricted to a sorted vertex subset (indices into `space`).
pub fn build_complex_on<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    verts: &[usize],
    scales: &ScaleSequence<S>,
    dim_cap: usize,
) -> SimplicialComplex {
    debug_assert!(verts.windows(2).all(|w| w[0] < w[1]));
    let r1 = scales.r1();
    // The 1-skeleton of any simplex lies in the r1-graph, so candidate
    // k-simplices are extensions of accepted (k-1)-simplices by common
    // r1-neighbors above their last vertex.
    let mut levels: Vec<Vec<Vec<usize>>> = Vec::new();
    levels.push(verts.iter().map(|&v| vec![v]).collect());
    if dim_cap == 0 {
        return SimplicialComplex::from_levels(levels);
    }
    let mut edges: Vec<Vec<usize>> = Vec::new();
    for (a, &u) in verts.iter().enumerate() {
        for &v in &verts[a + 1..] {
            if space.d(u, v) < r1 {
                edges.push(vec![u, v]);
            }
        }
    }
    levels.push(edges);
    for _dim in 2..=dim_cap {
        let prev = levels.last().unwrap();
        if prev.is_empty() {
            break;
        }
        let next: Vec<Vec<usize>> = prev
            .par_iter()
            .flat_map_iter(|sigma| {
                let last = *sigma.last().unwrap();
                let candidates: Vec<usize> = verts
                    .iter()
                    .copied()
                    .filter(|&w| w > last && sigma.iter().all(|&u| space.d(u, w) < r1))
                    .collect();
                candidates.into_iter().filter_map(move |w| {
                    let mut ext = sigma.clone();
                    ext.push(w);
                    if is_simplex(space, &ext, scales) {
                        Some(ext)
                    } else {
                        None
                    }
                })
            })
            .collect();
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    for level in &mut levels {
        level.sort();
    }
    SimplicialComplex::from_levels(levels)
}

/// Minimal achievable max-part diameter over partitions of σ into ≤ i
/// parts, found by bisecting the sorted pairwise distances with the
/// non-strict feasibility test.
pub fn cluster_width<S: Scalar>(space: &FiniteMetricSpace<S>, sigma: &[usize], i: usize) -> S {
    assert!(!sigma.is_empty() && i >= 1);
    if sigma.len() <= i {
        return S::zero();
    }
    let mut cands: Vec<S> = vec![S::zero()];
    for (a, &u) in sigma.iter().enumerate() {
        for &v in &sigma[a + 1..] {
            cands.push(space.d(u, v));
        }
    }
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cands.dedup();
    // Feasibility is monotone in the bound.
    let mut lo = 0usize;
    let mut hi = cands.len() - 1;
    debug_assert!(admits_partition(space, sigma, i, cands[hi], false));
    while lo < hi {
        let mid = (lo + hi) / 2;
        if admits_partition(space, sigma, i, cands[mid], false) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo]
}

/// Birth value of σ under a shape profile p (p₁ = 1): the smallest t such
/// that σ is a (non-strict) simplex at scales t·p.
pub fn birth_value<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    sigma: &[usize],
    profile: &ScaleSequence<S>,
) -> S {
    if sigma.len() <= 1 {
        return S::zero();
    }
    let mut b = S::zero();
    for i in 1..sigma.len() {
        if i > 1 && profile.r(i) == profile.r(i - 1) {
            continue;
        }
        b = b.max(cluster_width(space, sigma, i) / profile.r(i));
    }
    b
}

/// The full filtration up to `dim_cap`: every subset of size ≤ dim_cap+1
/// appears, with birth `max_i w_i(σ)/p_i`. Births are face-monotone since
/// cluster widths only shrink under restriction.
pub fn build_filtration<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    profile: &ScaleSequence<S>,
    dim_cap: usize,
) -> Filtration<S> {
    let n = space.len();
    let mut simplices = Vec::new();
    for size in 1..=(dim_cap + 1).min(n) {
        let level: Vec<FilteredSimplex<S>> = (0..n)
            .combinations(size)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|sigma| {
                let birth = birth_value(space, &sigma, profile);
                FilteredSimplex {
                    vertices: sigma,
                    birth,
                }
            })
            .collect();
        simplices.extend(level);
    }
    Filtration::new(simplices).expect("birth values are face-monotone by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;

    fn space_from(rows: Vec<Vec<f64>>) -> FiniteMetricSpace<f64> {
        FiniteMetricSpace::from_matrix(rows).unwrap()
    }

    /// Three points with pairwise distances (d01, d02, d12).
    fn triangle(d01: f64, d02: f64, d12: f64) -> FiniteMetricSpace<f64> {
        space_from(vec![
            vec![0.0, d01, d02],
            vec![d01, 0.0, d12],
            vec![d02, d12, 0.0],
        ])
    }

    fn interval_0_10() -> FiniteMetricSpace<f64> {
        let rows = (0..11)
            .map(|i: i32| (0..11).map(|j: i32| (i - j).abs() as f64).collect())
            .collect();
        space_from(rows)
    }

    #[test]
    fn small_sets_always_partition() {
        let s = triangle(1.0, 1.0, 1.0);
        assert!(admits_partition(&s, &[0, 1, 2], 3, 0.1, true));
        assert!(admits_partition(&s, &[0], 1, 0.1, true));
    }

    #[test]
    fn thin_triangle_partition() {
        // Distances (1, 0.52, 0.52): the far point alone plus the close pair.
        let s = triangle(1.0, 0.52, 0.52);
        assert!(admits_partition(&s, &[0, 1, 2], 2, 0.55, true));
        let eq = triangle(1.0, 0.98, 1.01);
        assert!(!admits_partition(&eq, &[0, 1, 2], 2, 0.55, true));
    }

    #[test]
    fn strictness_matters_at_ties() {
        let s = triangle(1.0, 0.5, 0.5);
        assert!(!admits_partition(&s, &[0, 1, 2], 2, 0.5, true));
        assert!(admits_partition(&s, &[0, 1, 2], 2, 0.5, false));
    }

    #[test]
    fn constant_scales_reduce_to_diameter() {
        let s = triangle(1.0, 0.52, 0.52);
        let scales = ScaleSequence::constant(1.05).unwrap();
        assert!(is_simplex(&s, &[0, 1, 2], &scales));
        let scales = ScaleSequence::constant(0.9).unwrap();
        assert!(!is_simplex(&s, &[0, 1, 2], &scales));
    }

    #[test]
    fn figure_style_thin_triangle_membership() {
        let scales = ScaleSequence::new(vec![1.1, 0.55]).unwrap();
        let thin = triangle(1.0, 0.52, 0.52);
        assert!(is_simplex(&thin, &[0, 1, 2], &scales));
        let fat = triangle(1.0, 0.99, 1.01);
        assert!(!is_simplex(&fat, &[0, 1, 2], &scales));
        assert!(is_simplex(&thin, &[1], &scales));
    }

    #[test]
    fn spread_points_lose_tetrahedron() {
        // Four points on a line, gaps 0.08; at scales (1, .3, .07, .01)
        // everything up to triangles survives but no 3-simplex: three
        // parts of diameter < 0.07 cannot absorb four points with gaps
        // at least 0.08.
        let s = space_from(
            (0..4)
                .map(|i: i32| {
                    (0..4)
                        .map(|j: i32| 0.08 * (i - j).abs() as f64)
                        .collect()
                })
                .collect(),
        );
        let scales = ScaleSequence::new(vec![1.0, 0.3, 0.07, 0.01]).unwrap();
        let c = build_complex(&s, &scales, 3);
        assert_eq!(c.counts(), vec![4, 6, 4]);
        assert!(c.validate_face_closure().is_ok());
    }

    #[test]
    fn below_min_distance_only_vertices() {
        let s = interval_0_10();
        let scales = ScaleSequence::constant(0.5).unwrap();
        let c = build_complex(&s, &scales, 3);
        assert_eq!(c.counts(), vec![11]);
    }

    #[test]
    fn constant_scales_match_flag_complex() {
        // Brute-force flag oracle: a subset is a clique iff all pairwise
        // distances are below the scale.
        let s = interval_0_10();
        for r in [1.5, 2.5, 3.5] {
            let scales = ScaleSequence::constant(r).unwrap();
            let c = build_complex(&s, &scales, 3);
            for size in 1..=4usize {
                let expected: Vec<Vec<usize>> = (0..11)
                    .combinations(size)
                    .filter(|sigma| {
                        sigma
                            .iter()
                            .tuple_combinations()
                            .all(|(&a, &b)| s.d(a, b) < r)
                    })
                    .collect();
                assert_eq!(c.simplices(size - 1), expected.as_slice(), "r={r} size={size}");
            }
        }
    }

    #[test]
    fn cluster_width_examples() {
        let s = triangle(1.0, 0.52, 0.52);
        assert_eq!(cluster_width(&s, &[0, 1, 2], 1), 1.0);
        assert_eq!(cluster_width(&s, &[0, 1, 2], 2), 0.52);
        // i = |sigma| - 1 pairs the two closest points.
        let s4 = interval_0_10();
        assert_eq!(cluster_width(&s4, &[0, 3, 7, 10], 3), 3.0);
    }

    #[test]
    fn birth_values() {
        let s = triangle(1.0, 0.52, 0.52);
        let constant = ScaleSequence::profile(vec![1.0]).unwrap();
        assert_eq!(birth_value(&s, &[0, 1, 2], &constant), 1.0);
        let profile = ScaleSequence::profile(vec![1.0, 0.5]).unwrap();
        assert!((birth_value(&s, &[0, 1, 2], &profile) - 1.04).abs() < 1e-12);
        // Edges are born at their length regardless of profile.
        assert_eq!(birth_value(&s, &[0, 2], &profile), 0.52);
    }

    #[test]
    fn filtration_sublevels_are_nonstrict_complexes() {
        let s = triangle(1.0, 0.52, 0.52);
        let profile = ScaleSequence::profile(vec![1.0, 0.5]).unwrap();
        let f = build_filtration(&s, &profile, 2);
        for &t in &[0.3, 0.52, 1.0, 1.04, 2.0] {
            let sub = f.sublevel(t);
            let scaled = profile.scaled(t);
            for size in 1..=3usize {
                let expected: Vec<Vec<usize>> = (0..3)
                    .combinations(size)
                    .filter(|sig| is_simplex_nonstrict(&s, sig, &scaled))
                    .collect();
                assert_eq!(sub.simplices(size - 1), expected.as_slice(), "t={t}");
            }
        }
    }

    #[test]
    fn extension_past_max_size_is_noop() {
        let s = interval_0_10();
        let a = ScaleSequence::new(vec![2.5, 2.0]).unwrap();
        let b = ScaleSequence::new(vec![2.5, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0]).unwrap();
        assert_eq!(build_complex(&s, &a, 3), build_complex(&s, &b, 3));
    }
}
