//! Samplers for constant-curvature exemplars: interval, disk, circle, and
//! flat torus, with exact closed-form geodesic distances.
//!
//! Sampling is deterministic for a given spec and seed. Generated spaces
//! carry their ambient coordinates, shape metadata, and (where it has a
//! closed form) the star radius.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{FiniteMetricSpace, MetricError, ShapeInfo};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("count must be at least 1")]
    ZeroCount,
    #[error("geometric parameter must be positive: {0}")]
    NonPositiveParameter(&'static str),
    #[error("metric construction failed: {0}")]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape<S> {
    Interval { length: S },
    Disk { radius: S, dim: usize },
    Circle { radius: S, geodesic: bool },
    FlatTorus { sides: Vec<S> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Mode<S> {
    Grid,
    UniformRandom { seed: u64 },
    JitteredGrid { seed: u64, jitter: S },
}

/// What to sample: a shape, a point count, and a mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec<S> {
    pub shape: Shape<S>,
    pub count: usize,
    pub mode: Mode<S>,
}

impl<S: Scalar> SampleSpec<S> {
    fn validate(&self) -> Result<(), SampleError> {
        if self.count == 0 {
            return Err(SampleError::ZeroCount);
        }
        match &self.shape {
            Shape::Interval { length } => {
                if !(*length > S::zero()) {
                    return Err(SampleError::NonPositiveParameter("length"));
                }
            }
            Shape::Disk { radius, dim } => {
                if !(*radius > S::zero()) {
                    return Err(SampleError::NonPositiveParameter("radius"));
                }
                if *dim == 0 {
                    return Err(SampleError::NonPositiveParameter("dim"));
                }
            }
            Shape::Circle { radius, .. } => {
                if !(*radius > S::zero()) {
                    return Err(SampleError::NonPositiveParameter("radius"));
                }
            }
            Shape::FlatTorus { sides } => {
                if sides.is_empty() || sides.iter().any(|s| !(*s > S::zero())) {
                    return Err(SampleError::NonPositiveParameter("sides"));
                }
            }
        }
        if let Mode::JitteredGrid { jitter, .. } = &self.mode {
            if *jitter < S::zero() {
                return Err(SampleError::NonPositiveParameter("jitter"));
            }
        }
        Ok(())
    }
}

/// Samples a finite metric space per the spec.
pub fn sample<S: Scalar>(spec: &SampleSpec<S>) -> Result<FiniteMetricSpace<S>, SampleError> {
    spec.validate()?;
    let coords = generate_coords(spec);
    let space = match &spec.shape {
        Shape::Interval { length } => build_euclidean(
            coords,
            Some(S::infinity()),
            Some(ShapeInfo::Interval { length: *length }),
        )?,
        Shape::Disk { radius, dim } => build_euclidean(
            coords,
            Some(S::infinity()),
            Some(ShapeInfo::Disk {
                radius: *radius,
                dim: *dim,
            }),
        )?,
        Shape::Circle { radius, geodesic } => {
            build_circle(coords, *radius, *geodesic)?
        }
        Shape::FlatTorus { sides } => build_torus(coords, sides)?,
    };
    Ok(space)
}

fn generate_coords<S: Scalar>(spec: &SampleSpec<S>) -> Vec<Vec<S>> {
    match &spec.shape {
        Shape::Interval { length } => interval_coords(*length, spec.count, &spec.mode),
        Shape::Disk { radius, dim } => disk_coords(*radius, *dim, spec.count, &spec.mode),
        Shape::Circle { radius, .. } => circle_coords(*radius, spec.count, &spec.mode),
        Shape::FlatTorus { sides } => torus_coords(sides, spec.count, &spec.mode),
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn interval_coords<S: Scalar>(length: S, count: usize, mode: &Mode<S>) -> Vec<Vec<S>> {
    let l = length.as_f64();
    let grid = |count: usize| -> Vec<f64> {
        if count == 1 {
            vec![0.0]
        } else {
            (0..count)
                .map(|i| l * i as f64 / (count - 1) as f64)
                .collect()
        }
    };
    let xs: Vec<f64> = match mode {
        Mode::Grid => grid(count),
        Mode::UniformRandom { seed } => {
            let mut rng = rng_for(*seed);
            (0..count).map(|_| rng.gen_range(0.0..l)).collect()
        }
        Mode::JitteredGrid { seed, jitter } => {
            let mut rng = rng_for(*seed);
            let j = jitter.as_f64();
            grid(count)
                .into_iter()
                .map(|x| (x + rng.gen_range(-j..=j)).clamp(0.0, l))
                .collect()
        }
    };
    xs.into_iter().map(|x| vec![S::lit(x)]).collect()
}

fn disk_lattice(radius: f64, dim: usize, per_axis: usize) -> Vec<Vec<f64>> {
    // Axis positions spread over [-R, R]; per_axis = 1 is the center alone.
    let axis: Vec<f64> = if per_axis == 1 {
        vec![0.0]
    } else {
        (0..per_axis)
            .map(|i| -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64)
            .collect()
    };
    let mut pts = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(pts.len() * axis.len());
        for p in &pts {
            for &x in &axis {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        pts = next;
    }
    pts.retain(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt() <= radius + 1e-12);
    pts
}

fn disk_coords<S: Scalar>(radius: S, dim: usize, count: usize, mode: &Mode<S>) -> Vec<Vec<S>> {
    let r = radius.as_f64();
    match mode {
        Mode::Grid | Mode::JitteredGrid { .. } => {
            // Smallest per-axis resolution whose lattice keeps at least
            // `count` points inside the closed disk.
            let mut per_axis = 1;
            let mut pts = disk_lattice(r, dim, per_axis);
            while pts.len() < count {
                per_axis += 1;
                pts = disk_lattice(r, dim, per_axis);
            }
            if let Mode::JitteredGrid { seed, jitter } = mode {
                let mut rng = rng_for(*seed);
                let j = jitter.as_f64();
                for p in &mut pts {
                    for x in p.iter_mut() {
                        *x += rng.gen_range(-j..=j);
                    }
                    let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > r {
                        for x in p.iter_mut() {
                            *x *= r / norm;
                        }
                    }
                }
            }
            pts.into_iter()
                .map(|p| p.into_iter().map(S::lit).collect())
                .collect()
        }
        Mode::UniformRandom { seed } => {
            let mut rng = rng_for(*seed);
            let mut pts = Vec::with_capacity(count);
            while pts.len() < count {
                let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-r..=r)).collect();
                if p.iter().map(|x| x * x).sum::<f64>().sqrt() <= r {
                    pts.push(p.into_iter().map(S::lit).collect());
                }
            }
            pts
        }
    }
}

/// A square-lattice sample of the closed 2-disk with the given spacing.
/// The origin is always a lattice point. Intended for density-controlled
/// experiments where spacing, not count, is the natural knob.
pub fn disk_grid_with_spacing<S: Scalar>(
    radius: S,
    spacing: S,
) -> Result<FiniteMetricSpace<S>, SampleError> {
    if !(radius > S::zero()) {
        return Err(SampleError::NonPositiveParameter("radius"));
    }
    if !(spacing > S::zero()) {
        return Err(SampleError::NonPositiveParameter("spacing"));
    }
    let r = radius.as_f64();
    let h = spacing.as_f64();
    let m = (r / h).floor() as i64;
    let mut pts = Vec::new();
    for i in -m..=m {
        for j in -m..=m {
            let (x, y) = (i as f64 * h, j as f64 * h);
            if (x * x + y * y).sqrt() <= r + 1e-12 {
                pts.push(vec![S::lit(x), S::lit(y)]);
            }
        }
    }
    build_euclidean(
        pts,
        Some(S::infinity()),
        Some(ShapeInfo::Disk { radius, dim: 2 }),
    )
}

/// An evenly spaced sample of `[0, length]` with the given spacing.
pub fn interval_grid_with_spacing<S: Scalar>(
    length: S,
    spacing: S,
) -> Result<FiniteMetricSpace<S>, SampleError> {
    if !(length > S::zero()) {
        return Err(SampleError::NonPositiveParameter("length"));
    }
    if !(spacing > S::zero()) {
        return Err(SampleError::NonPositiveParameter("spacing"));
    }
    let l = length.as_f64();
    let h = spacing.as_f64();
    let m = (l / h).floor() as i64;
    let pts = (0..=m).map(|i| vec![S::lit(i as f64 * h)]).collect();
    build_euclidean(
        pts,
        Some(S::infinity()),
        Some(ShapeInfo::Interval { length }),
    )
}

fn circle_coords<S: Scalar>(radius: S, count: usize, mode: &Mode<S>) -> Vec<Vec<S>> {
    // Coordinates store the angle in the first slot; the embedding is
    // derived when needed.
    let tau = std::f64::consts::TAU;
    let grid = |count: usize| -> Vec<f64> {
        (0..count).map(|i| tau * i as f64 / count as f64).collect()
    };
    let angles: Vec<f64> = match mode {
        Mode::Grid => grid(count),
        Mode::UniformRandom { seed } => {
            let mut rng = rng_for(*seed);
            (0..count).map(|_| rng.gen_range(0.0..tau)).collect()
        }
        Mode::JitteredGrid { seed, jitter } => {
            let mut rng = rng_for(*seed);
            // Jitter is in length units along the circle.
            let j = jitter.as_f64() / radius.as_f64();
            grid(count)
                .into_iter()
                .map(|a| {
                    let noisy = if j > 0.0 { a + rng.gen_range(-j..=j) } else { a };
                    noisy.rem_euclid(tau)
                })
                .collect()
        }
    };
    let r = radius.as_f64();
    angles
        .into_iter()
        .map(|a| vec![S::lit(a), S::lit(r * a.cos()), S::lit(r * a.sin())])
        .collect()
}

fn torus_coords<S: Scalar>(sides: &[S], count: usize, mode: &Mode<S>) -> Vec<Vec<S>> {
    let k = sides.len();
    let per_axis = (count as f64).powf(1.0 / k as f64).ceil() as usize;
    let grid = || -> Vec<Vec<f64>> {
        let mut pts = vec![vec![]];
        for s in sides {
            let s = s.as_f64();
            let mut next = Vec::new();
            for p in &pts {
                for i in 0..per_axis {
                    let mut q = p.clone();
                    q.push(s * i as f64 / per_axis as f64);
                    next.push(q);
                }
            }
            pts = next;
        }
        pts
    };
    let pts: Vec<Vec<f64>> = match mode {
        Mode::Grid => grid(),
        Mode::UniformRandom { seed } => {
            let mut rng = rng_for(*seed);
            (0..count)
                .map(|_| sides.iter().map(|s| rng.gen_range(0.0..s.as_f64())).collect())
                .collect()
        }
        Mode::JitteredGrid { seed, jitter } => {
            let mut rng = rng_for(*seed);
            let j = jitter.as_f64();
            grid()
                .into_iter()
                .map(|p| {
                    p.into_iter()
                        .zip(sides)
                        .map(|(x, s)| (x + rng.gen_range(-j..=j)).rem_euclid(s.as_f64()))
                        .collect()
                })
                .collect()
        }
    };
    pts.into_iter()
        .map(|p| p.into_iter().map(S::lit).collect())
        .collect()
}

fn build_euclidean<S: Scalar>(
    coords: Vec<Vec<S>>,
    star_radius: Option<S>,
    shape: Option<ShapeInfo<S>>,
) -> Result<FiniteMetricSpace<S>, SampleError> {
    let n = coords.len();
    let mut dist = vec![S::zero(); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&coords[i], &coords[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    Ok(FiniteMetricSpace::from_parts(
        n,
        dist,
        Some(coords),
        star_radius,
        shape,
    )?)
}

pub(crate) fn euclidean<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .fold(S::zero(), |acc, t| acc + t)
        .sqrt()
}

fn build_circle<S: Scalar>(
    coords: Vec<Vec<S>>,
    radius: S,
    geodesic: bool,
) -> Result<FiniteMetricSpace<S>, SampleError> {
    let n = coords.len();
    let tau = S::lit(std::f64::consts::TAU);
    let mut dist = vec![S::zero(); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut da = (coords[i][0] - coords[j][0]).abs();
            if da > tau - da {
                da = tau - da;
            }
            let d = if geodesic {
                radius * da
            } else {
                S::lit(2.0) * radius * (da / S::lit(2.0)).sin()
            };
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    // Star radius of the geodesic circle has the closed form (pi/2) * r.
    let star = if geodesic {
        Some(radius * S::FRAC_PI_2())
    } else {
        None
    };
    Ok(FiniteMetricSpace::from_parts(
        n,
        dist,
        Some(coords),
        star,
        Some(ShapeInfo::Circle { radius, geodesic }),
    )?)
}

fn build_torus<S: Scalar>(
    coords: Vec<Vec<S>>,
    sides: &[S],
) -> Result<FiniteMetricSpace<S>, SampleError> {
    let n = coords.len();
    let mut dist = vec![S::zero(); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut acc = S::zero();
            for (k, s) in sides.iter().enumerate() {
                let mut dx = (coords[i][k] - coords[j][k]).abs();
                if dx > *s - dx {
                    dx = *s - dx;
                }
                acc = acc + dx * dx;
            }
            let d = acc.sqrt();
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    Ok(FiniteMetricSpace::from_parts(
        n,
        dist,
        Some(coords),
        None,
        Some(ShapeInfo::FlatTorus {
            sides: sides.to_vec(),
        }),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn circle_grid_four_points() {
        let spec = SampleSpec {
            shape: Shape::Circle {
                radius: 1.0,
                geodesic: true,
            },
            count: 4,
            mode: Mode::Grid,
        };
        let s = sample(&spec).unwrap();
        assert_relative_eq!(s.d(0, 1), PI / 2.0, max_relative = 1e-12);
        assert_relative_eq!(s.d(0, 2), PI, max_relative = 1e-12);
        assert_relative_eq!(s.d(1, 3), PI, max_relative = 1e-12);
        assert_relative_eq!(s.star_radius().unwrap(), PI / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn interval_grid_is_integer_lattice() {
        let spec = SampleSpec {
            shape: Shape::Interval { length: 10.0 },
            count: 11,
            mode: Mode::Grid,
        };
        let s = sample(&spec).unwrap();
        assert_eq!(s.len(), 11);
        for i in 0..11 {
            for j in 0..11 {
                assert_relative_eq!(s.d(i, j), (i as f64 - j as f64).abs(), epsilon = 1e-12);
            }
        }
        assert!(s.star_radius().unwrap().is_infinite());
    }

    #[test]
    fn disk_count_one_is_center() {
        let spec = SampleSpec {
            shape: Shape::Disk {
                radius: 2.0,
                dim: 2,
            },
            count: 1,
            mode: Mode::Grid,
        };
        let s = sample(&spec).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coords().unwrap()[0], vec![0.0, 0.0]);
    }

    #[test]
    fn samplers_are_deterministic() {
        let spec = SampleSpec {
            shape: Shape::Disk {
                radius: 1.0,
                dim: 2,
            },
            count: 30,
            mode: Mode::UniformRandom { seed: 7 },
        };
        let a = sample(&spec).unwrap();
        let b = sample(&spec).unwrap();
        assert_eq!(a.matrix_rows(), b.matrix_rows());

        let jit = SampleSpec {
            shape: Shape::Circle {
                radius: 1.0,
                geodesic: true,
            },
            count: 20,
            mode: Mode::JitteredGrid {
                seed: 3,
                jitter: 0.01,
            },
        };
        assert_eq!(
            sample(&jit).unwrap().matrix_rows(),
            sample(&jit).unwrap().matrix_rows()
        );
    }

    #[test]
    fn torus_wraps_distances() {
        let spec = SampleSpec {
            shape: Shape::FlatTorus {
                sides: vec![4.0, 4.0],
            },
            count: 16,
            mode: Mode::Grid,
        };
        let s = sample(&spec).unwrap();
        // Points 0 and 3 sit at x = 0 and x = 3 on the first axis; the
        // wrapped distance is 1.
        assert_relative_eq!(s.d(0, 3), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn disk_spacing_grid_contains_origin() {
        let s = disk_grid_with_spacing(1.0f64, 0.25).unwrap();
        assert!(s
            .coords()
            .unwrap()
            .iter()
            .any(|p| p[0] == 0.0 && p[1] == 0.0));
        for p in s.coords().unwrap() {
            assert!((p[0] * p[0] + p[1] * p[1]).sqrt() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let spec = SampleSpec {
            shape: Shape::Interval { length: 10.0 },
            count: 0,
            mode: Mode::<f64>::Grid,
        };
        assert_eq!(sample(&spec).unwrap_err(), SampleError::ZeroCount);
        let spec = SampleSpec {
            shape: Shape::Circle {
                radius: -1.0,
                geodesic: true,
            },
            count: 4,
            mode: Mode::Grid,
        };
        assert!(matches!(
            sample(&spec).unwrap_err(),
            SampleError::NonPositiveParameter("radius")
        ));
    }
}
