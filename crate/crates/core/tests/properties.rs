//! Cross-module invariants on randomized instances.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use srips::complex::{FilteredSimplex, Filtration};
use srips::glue::glue;
use srips::homology::{betti, boundary_squared_is_zero, persistence};
use srips::metric::FiniteMetricSpace;
use srips::nerve::{build_cover, lebesgue_number, nerve_complex};
use srips::sample::{sample, Mode, SampleSpec, Shape};
use srips::srips::{
    birth_value, build_complex, build_complex_on, build_filtration, is_simplex,
    is_simplex_nonstrict,
};
use srips::{Scales, Space};

fn cloud_space(points: &[Vec<f64>]) -> Space {
    let n = points.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    points[i]
                        .iter()
                        .zip(&points[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        })
        .collect();
    Space::from_matrix(rows).unwrap()
}

/// Shortest-path completion of a random symmetric weight matrix: a valid
/// metric that is not Euclidean.
fn graph_metric(rng: &mut ChaCha8Rng, n: usize) -> Space {
    let mut d = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.gen_range(0.2..1.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    Space::from_matrix(d).unwrap()
}

fn arb_cloud(max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n, 1usize..=3).prop_flat_map(|(n, dim)| {
        proptest::collection::vec(
            proptest::collection::vec(0.0f64..1.0, dim..=dim),
            n..=n,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ball_monotonic_in_radius(points in arb_cloud(12), r1 in 0.05f64..1.0, dr in 0.0f64..0.5) {
        let space = cloud_space(&points);
        let r2 = r1 + dr;
        for x in 0..space.len() {
            let small = space.ball(x, r1).unwrap();
            let large = space.ball(x, r2).unwrap();
            for v in &small {
                prop_assert!(large.contains(v));
            }
        }
    }

    #[test]
    fn hausdorff_is_a_pseudometric(points in arb_cloud(10), seed in 0u64..1000) {
        let space = cloud_space(&points);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = space.len();
        let pick = |rng: &mut ChaCha8Rng| -> Vec<usize> {
            let mut s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            if s.is_empty() {
                s.push(rng.gen_range(0..n));
            }
            s
        };
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let h_ab = space.hausdorff(&a, &b).unwrap();
        let h_ba = space.hausdorff(&b, &a).unwrap();
        prop_assert_eq!(h_ab, h_ba);
        prop_assert_eq!(space.hausdorff(&a, &a).unwrap(), 0.0);
        let h_ac = space.hausdorff(&a, &c).unwrap();
        let h_cb = space.hausdorff(&c, &b).unwrap();
        prop_assert!(h_ab <= h_ac + h_cb + 1e-12);
    }

    #[test]
    fn identity_glue_bounds_gh(points in arb_cloud(8), eps in 0.0f64..0.5) {
        let space = cloud_space(&points);
        let pairs: Vec<_> = (0..space.len()).map(|i| (i, i)).collect();
        let union = glue(&space, &space, &pairs, eps).unwrap();
        prop_assert!(union.gh_upper_bound() <= eps + 1e-12);
    }

    #[test]
    fn membership_is_face_closed(points in arb_cloud(9), r1 in 0.2f64..1.2, shrink in 0.3f64..1.0) {
        let space = cloud_space(&points);
        let scales = Scales::new(vec![r1, r1 * shrink]).unwrap();
        let n = space.len();
        // All subsets of size <= 5.
        for mask in 1u32..(1 << n.min(12)) {
            let sigma: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if sigma.len() > 5 {
                continue;
            }
            if is_simplex(&space, &sigma, &scales) && sigma.len() > 1 {
                for skip in 0..sigma.len() {
                    let mut tau = sigma.clone();
                    tau.remove(skip);
                    prop_assert!(is_simplex(&space, &tau, &scales),
                        "face {:?} of simplex {:?} rejected", tau, sigma);
                }
            }
        }
    }

    #[test]
    fn complexes_grow_with_scales(points in arb_cloud(10), r1 in 0.2f64..0.9, grow in 1.0f64..1.5) {
        let space = cloud_space(&points);
        let small = Scales::new(vec![r1, r1 * 0.6]).unwrap();
        let large = Scales::new(vec![r1 * grow, r1 * 0.6 * grow]).unwrap();
        let c_small = build_complex(&space, &small, 3);
        let c_large = build_complex(&space, &large, 3);
        prop_assert!(c_small.is_subset_of(&c_large));
        // And the selective complex embeds in the plain Rips complex at r1.
        let rips = build_complex(&space, &Scales::constant(r1).unwrap(), 3);
        prop_assert!(c_small.is_subset_of(&rips));
    }

    #[test]
    fn enumeration_matches_brute_force_membership(points in arb_cloud(11), r1 in 0.25f64..1.0, shrink in 0.4f64..1.0) {
        // Candidate generation through r1-clique extension must produce
        // exactly the subsets accepted by the membership test.
        let space = cloud_space(&points);
        let scales = Scales::new(vec![r1, r1 * shrink]).unwrap();
        let complex = build_complex(&space, &scales, 3);
        let n = space.len();
        for size in 1..=4usize.min(n) {
            let mut expected: Vec<Vec<usize>> = Vec::new();
            for mask in 1u32..(1 << n) {
                if mask.count_ones() as usize != size {
                    continue;
                }
                let sigma: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                if is_simplex(&space, &sigma, &scales) {
                    expected.push(sigma);
                }
            }
            expected.sort();
            prop_assert_eq!(complex.simplices(size - 1), expected.as_slice());
        }
    }

    #[test]
    fn birth_values_bracket_membership(points in arb_cloud(8), p2 in 0.3f64..1.0) {
        let space = cloud_space(&points);
        let profile = Scales::profile(vec![1.0, p2]).unwrap();
        let n = space.len();
        for mask in 1u32..(1 << n.min(8)) {
            let sigma: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if !(2..=4).contains(&sigma.len()) {
                continue;
            }
            let b = birth_value(&space, &sigma, &profile);
            prop_assert!(b > 0.0);
            let below = profile.scaled(b * (1.0 - 1e-9));
            let at = profile.scaled(b * (1.0 + 1e-9));
            prop_assert!(!is_simplex(&space, &sigma, &below));
            prop_assert!(is_simplex_nonstrict(&space, &sigma, &at));
        }
    }
}

#[test]
fn homology_invariants_on_random_spaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for case in 0..8 {
        let space = if case % 2 == 0 {
            let pts: Vec<Vec<f64>> = (0..10)
                .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
                .collect();
            cloud_space(&pts)
        } else {
            graph_metric(&mut rng, 10)
        };
        let profile = Scales::profile(vec![1.0, rng.gen_range(0.4..1.0)]).unwrap();
        let filtration = build_filtration(&space, &profile, 2);
        let barcode = persistence(&filtration);
        for _ in 0..5 {
            let t = rng.gen_range(0.0..1.5);
            let sub = filtration.sublevel(t);
            assert!(boundary_squared_is_zero(&sub));
            let b = betti(&sub, 2);
            for (d, &beta) in b.iter().enumerate() {
                assert_eq!(
                    barcode.betti_at(d, t),
                    beta,
                    "dim {d} at t={t} (case {case})"
                );
            }
            // Euler characteristic from counts equals the alternating sum
            // of Betti numbers (the complex stores nothing above dim 2).
            let chi: i64 = b
                .iter()
                .enumerate()
                .map(|(d, &x)| if d % 2 == 0 { x as i64 } else { -(x as i64) })
                .sum();
            assert_eq!(chi, sub.euler_characteristic());
        }
    }
}

#[test]
fn barcode_is_order_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts: Vec<Vec<f64>> = (0..9)
        .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
        .collect();
    let space = cloud_space(&pts);
    let profile = Scales::profile(vec![1.0, 0.7]).unwrap();
    let filtration = build_filtration(&space, &profile, 2);
    let reference = persistence(&filtration);
    let mut shuffled: Vec<FilteredSimplex<f64>> = filtration.simplices().to_vec();
    shuffled.reverse();
    let refiltered = Filtration::new(shuffled).unwrap();
    assert_eq!(persistence(&refiltered), reference);
}

#[test]
fn nerve_grows_with_radius() {
    let circle = sample(&SampleSpec {
        shape: Shape::Circle {
            radius: 1.0,
            geodesic: true,
        },
        count: 24,
        mode: Mode::Grid,
    })
    .unwrap();
    let centers: Vec<usize> = (0..24).step_by(2).collect();
    let small = build_cover(&circle, &centers, 0.4).unwrap();
    let large = build_cover(&circle, &centers, 0.75).unwrap();
    let n_small = nerve_complex(&small, 5);
    let n_large = nerve_complex(&large, 5);
    assert!(n_small.is_subset_of(&n_large));
}

#[test]
fn complex_of_trace_intersections_is_intersection_of_complexes() {
    let circle = sample(&SampleSpec {
        shape: Shape::Circle {
            radius: 1.0,
            geodesic: true,
        },
        count: 30,
        mode: Mode::Grid,
    })
    .unwrap();
    let scales = Scales::new(vec![0.6, 0.4]).unwrap();
    let cover = build_cover(&circle, &[0, 5, 10, 15, 20, 25], 1.2).unwrap();
    for i in 0..cover.elements.len() {
        for j in (i + 1)..cover.elements.len() {
            let meet: Vec<usize> = cover.elements[i]
                .iter()
                .copied()
                .filter(|v| cover.elements[j].binary_search(v).is_ok())
                .collect();
            if meet.is_empty() {
                continue;
            }
            let on_meet = build_complex_on(&circle, &meet, &scales, 3);
            let c_i = build_complex_on(&circle, &cover.elements[i], &scales, 3);
            let c_j = build_complex_on(&circle, &cover.elements[j], &scales, 3);
            assert_eq!(on_meet, c_i.intersect(&c_j), "elements {i},{j}");
        }
    }
}

#[test]
fn simplices_fit_in_cover_elements_above_lebesgue() {
    let circle = sample(&SampleSpec {
        shape: Shape::Circle {
            radius: 1.0,
            geodesic: true,
        },
        count: 30,
        mode: Mode::Grid,
    })
    .unwrap();
    let centers: Vec<usize> = (0..30).step_by(3).collect();
    let cover = build_cover(&circle, &centers, 0.8).unwrap();
    let lebesgue = lebesgue_number(&circle, &cover).unwrap();
    let r1 = 0.5;
    assert!(lebesgue > r1, "lebesgue {lebesgue}");
    let scales = Scales::new(vec![r1, 0.35]).unwrap();
    let complex = build_complex(&circle, &scales, 3);
    for sigma in complex.iter_all() {
        let inside_some = cover
            .elements
            .iter()
            .any(|e| sigma.iter().all(|v| e.binary_search(v).is_ok()));
        assert!(inside_some, "simplex {sigma:?} fits in no element");
    }
}

#[test]
fn segment_targets_absorb_balls_on_disk_grids() {
    // On a disk grid, take the farthest point y and the segment point
    // toward the center at distance r_inf^2 / (2 r'). Every grid point x
    // inside the ball of radius r' with d(x, y) <= r_i must satisfy
    // d(x, y_hat) <= r_i - delta1 (up to 1e-9).
    use srips::crushing::{delta1, segment_point};
    use srips::sample::disk_grid_with_spacing;
    let grid = disk_grid_with_spacing(1.0f64, 0.1).unwrap();
    let coords = grid.coords().unwrap();
    let scales = Scales::new(vec![0.95, 0.9]).unwrap();
    let r_inf = scales.r_inf();
    let d1 = delta1(r_inf, 1.0).unwrap();
    let center = vec![0.0, 0.0];
    let norm = |p: &[f64]| (p[0] * p[0] + p[1] * p[1]).sqrt();
    // Farthest grid point from the center.
    let y = (0..grid.len())
        .max_by(|&a, &b| norm(&coords[a]).partial_cmp(&norm(&coords[b])).unwrap())
        .unwrap();
    let r_prime = norm(&coords[y]);
    let y_hat = segment_point(&coords[y], &center, r_inf * r_inf / (2.0 * r_prime));
    for x in 0..grid.len() {
        if norm(&coords[x]) > r_prime {
            continue;
        }
        for i in 1..=2 {
            let r_i = scales.r(i);
            if grid.d(x, y) <= r_i {
                let dist = ((coords[x][0] - y_hat[0]).powi(2)
                    + (coords[x][1] - y_hat[1]).powi(2))
                .sqrt();
                assert!(
                    dist <= r_i - d1 + 1e-9,
                    "x {:?} at {dist} vs {}",
                    coords[x],
                    r_i - d1
                );
            }
        }
    }
}

#[test]
fn induced_rank_is_bounded_by_both_betti_numbers() {
    use srips::homology::induced_rank;
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let pts: Vec<Vec<f64>> = (0..12)
            .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
            .collect();
        let space = cloud_space(&pts);
        let r1 = rng.gen_range(0.3..0.8);
        let small = Scales::new(vec![r1, r1 * 0.7]).unwrap();
        let large = Scales::new(vec![r1 * 1.3, r1 * 0.91]).unwrap();
        let sub = build_complex(&space, &small, 3);
        let sup = build_complex(&space, &large, 3);
        for dim in 0..=1usize {
            let rank = induced_rank::<f64>(&sub, &sup, dim).unwrap();
            let beta_sub = betti(&sub, 2)[dim];
            let beta_sup = betti(&sup, 2)[dim];
            assert!(rank <= beta_sub.min(beta_sup));
        }
    }
}

#[test]
fn flat_torus_homology_is_recovered() {
    // An 8x8 grid on the unit flat torus: the complex at these scales
    // carries the torus shape, including the two-dimensional class.
    let torus = sample(&SampleSpec {
        shape: Shape::FlatTorus {
            sides: vec![1.0, 1.0],
        },
        count: 64,
        mode: Mode::Grid,
    })
    .unwrap();
    for scales in [
        Scales::constant(0.3).unwrap(),
        Scales::new(vec![0.3, 0.23]).unwrap(),
    ] {
        let complex = build_complex(&torus, &scales, 3);
        assert_eq!(betti(&complex, 2), vec![1, 2, 1], "scales {scales:?}");
        assert!(boundary_squared_is_zero(&complex));
    }
}

#[test]
fn pipeline_runs_in_f32() {
    let rows: Vec<Vec<f32>> = (0..6)
        .map(|i: i32| (0..6).map(|j: i32| (i - j).abs() as f32 * 0.5).collect())
        .collect();
    let space = FiniteMetricSpace::<f32>::from_matrix(rows).unwrap();
    let scales = srips::ScaleSequence::<f32>::new(vec![1.2f32, 0.9]).unwrap();
    let complex = build_complex(&space, &scales, 2);
    assert_eq!(betti(&complex, 2), vec![1, 0, 0]);
}
