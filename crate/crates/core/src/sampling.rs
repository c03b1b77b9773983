//! Latin hypercube designs for initialization and the random-ball fallback
//! point used when subproblems fail to produce a new candidate.

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::archive::Archive;
use crate::real::Real;

#[derive(Debug, Error, PartialEq)]
pub enum SamplingError {
    #[error("random ball point requires at least one feasible point")]
    NoFeasiblePoint,
}

/// Latin hypercube design: `n` points in `[lower, upper]` with exactly one
/// point per stratum in every dimension, stratum order a uniform random
/// permutation, position within each stratum uniform.
pub fn latin_hypercube<T: Real, R: Rng>(
    lower: &[T],
    upper: &[T],
    n: usize,
    rng: &mut R,
) -> Vec<Vec<T>> {
    assert!(n >= 1);
    let d = lower.len();
    let mut points = vec![vec![T::zero(); d]; n];
    let n_t = T::of(n as f64);
    let mut strata: Vec<usize> = (0..n).collect();
    for dim in 0..d {
        // Fisher-Yates shuffle for the stratum assignment.
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            strata.swap(i, j);
        }
        let width = upper[dim] - lower[dim];
        for (point, &stratum) in points.iter_mut().zip(strata.iter()) {
            let offset = T::of(rng.gen::<f64>());
            let fraction = (T::of(stratum as f64) + offset) / n_t;
            point[dim] = lower[dim] + fraction * width;
        }
    }
    points
}

/// Radius of the fallback sampling ball: `min(delta_lu / delta_r,
/// delta_d * sqrt(d))`, in raw units.
pub fn ball_radius<T: Real>(delta_lu: T, delta_r: T, delta_d: T, dimension: usize) -> T {
    (delta_lu / delta_r).min(delta_d * T::of(dimension as f64).sqrt())
}

/// A fresh point near the most recently evaluated feasible point: uniform in
/// the ball of [`ball_radius`], kept inside the box by rejection (never
/// projection), not duplicating any archived point. Falls back to a fresh
/// Latin hypercube point after 100 rejected draws.
pub fn random_ball_point<T: Real, R: Rng>(
    archive: &Archive<T>,
    lower: &[T],
    upper: &[T],
    delta_r: T,
    delta_d: T,
    rng: &mut R,
) -> Result<Vec<T>, SamplingError> {
    let center = archive
        .latest_feasible()
        .ok_or(SamplingError::NoFeasiblePoint)?
        .x
        .clone();
    let d = lower.len();
    let delta_lu = lower
        .iter()
        .zip(upper)
        .map(|(&l, &u)| (u - l).abs())
        .fold(T::infinity(), T::min);
    let r = ball_radius(delta_lu, delta_r, delta_d, d);

    for _ in 0..100 {
        // Uniform in the ball: normal direction, radius scaled by u^(1/d).
        let mut dir: Vec<T> = (0..d)
            .map(|_| T::of(rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let norm = dir.iter().map(|&v| v * v).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let scale = r * T::of(rng.gen::<f64>().powf(1.0 / d as f64)) / norm;
        for v in dir.iter_mut() {
            *v = *v * scale;
        }
        let y: Vec<T> = center.iter().zip(&dir).map(|(&c, &v)| c + v).collect();
        let inside = y
            .iter()
            .zip(lower.iter().zip(upper))
            .all(|(&yi, (&l, &u))| yi >= l && yi <= u);
        if inside && !archive.contains_raw(&y) {
            return Ok(y);
        }
    }

    for _ in 0..100 {
        let y = latin_hypercube(lower, upper, 1, rng).pop().expect("one point");
        if !archive.contains_raw(&y) {
            return Ok(y);
        }
    }
    Ok(latin_hypercube(lower, upper, 1, rng).pop().expect("one point"))
}
