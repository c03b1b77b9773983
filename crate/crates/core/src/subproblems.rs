//! The four surrogate subproblems solved inside each solver iteration:
//!
//! * [`solve_p2`] — maximize the margin z by which a point clears every
//!   surrogate constraint and the box (finds a first feasible candidate);
//! * [`solve_p3`] — maximize the distance to all known feasible points
//!   subject to the surrogate constraints (spreads feasible points);
//! * [`solve_p4_multistart`] — minimize the objective surrogate (exploit);
//! * [`solve_p5`] — minimize the objective surrogate at least `delta` away
//!   from every known feasible point (explore).
//!
//! All of them run in the archive's normalized coordinate frame; `bounds`
//! is the search box in that frame (the unit box for solver runs).

use rand::Rng;

use crate::archive::{Archive, PointClass};
use crate::de::{de_minimize_with, DeSettings, SubproblemSolution};
use crate::rbf::{RbfGroupEval, RbfModel};
use crate::real::{dist_sq, Real};

/// A box in the normalized frame.
#[derive(Debug, Clone, Copy)]
pub struct Bounds<'a, T> {
    pub lower: &'a [T],
    pub upper: &'a [T],
}

impl<'a, T: Real> Bounds<'a, T> {
    pub fn new(lower: &'a [T], upper: &'a [T]) -> Self {
        assert_eq!(lower.len(), upper.len());
        Bounds { lower, upper }
    }

    fn dimension(&self) -> usize {
        self.lower.len()
    }

    fn min_width(&self) -> T {
        self.lower
            .iter()
            .zip(self.upper)
            .map(|(&l, &u)| u - l)
            .fold(T::infinity(), T::min)
    }

    fn diameter(&self) -> T {
        self.lower
            .iter()
            .zip(self.upper)
            .map(|(&l, &u)| (u - l) * (u - l))
            .sum::<T>()
            .sqrt()
    }
}

fn feasible_coords<T: Real>(archive: &Archive<T>) -> Vec<Vec<T>> {
    archive
        .class_indices(PointClass::F)
        .iter()
        .map(|&i| archive.points()[i].z.clone())
        .collect()
}

/// Maximize z subject to `g_j^s(x) - z >= 0`, `lower + z <= x <= upper - z`,
/// `z >= 0` and `g_c(x) >= 0`.
///
/// Returns `None` when the best individual is infeasible or duplicates an
/// archived point.
pub fn solve_p2<T, R, G>(
    archive: &Archive<T>,
    surrogates: &[RbfModel<T>],
    gc: G,
    bounds: Bounds<'_, T>,
    settings: &DeSettings<T>,
    rng: &mut R,
) -> Option<SubproblemSolution<T>>
where
    T: Real,
    R: Rng,
    G: Fn(&[T]) -> T,
{
    let d = bounds.dimension();
    let m = surrogates.len();
    let z_max = bounds.min_width() * T::of(0.5);

    let mut lower = bounds.lower.to_vec();
    let mut upper = bounds.upper.to_vec();
    lower.push(T::zero());
    upper.push(z_max);

    let model_refs: Vec<&RbfModel<T>> = surrogates.iter().collect();
    let group = RbfGroupEval::new(&model_refs);
    let mut surrogate_out = vec![T::zero(); m];
    let mut kernels = Vec::new();

    let eval = |v: &[T], out: &mut [T]| -> T {
        let (x, z) = (&v[..d], v[d]);
        group.eval_into(x, &mut surrogate_out, &mut kernels);
        for j in 0..m {
            out[j] = surrogate_out[j] - z;
        }
        for i in 0..d {
            out[m + i] = x[i] - bounds.lower[i] - z;
            out[m + d + i] = bounds.upper[i] - z - x[i];
        }
        out[m + 2 * d] = gc(x);
        -z
    };

    let sol = de_minimize_with(
        eval,
        m + 2 * d + 1,
        &lower,
        &upper,
        settings,
        settings.budget_for(d + 1),
        rng,
    );
    if !sol.feasible {
        return None;
    }
    let x = sol.x[..d].to_vec();
    if archive.contains_normalized(&x) {
        return None;
    }
    Some(SubproblemSolution {
        aux: sol.x[d],
        x,
        feasible: true,
        constraint_violation: sol.constraint_violation,
    })
}

/// Maximize the distance y to every feasible point subject to
/// `g_j^s(x) >= 0`, `x` in the box and `g_c(x) >= 0`.
///
/// Always returns a point; `delta` is 0 when the best individual is
/// infeasible or duplicates an archived point.
pub fn solve_p3<T, R, G>(
    archive: &Archive<T>,
    surrogates: &[RbfModel<T>],
    gc: G,
    bounds: Bounds<'_, T>,
    settings: &DeSettings<T>,
    rng: &mut R,
) -> (Vec<T>, T)
where
    T: Real,
    R: Rng,
    G: Fn(&[T]) -> T,
{
    let feasible = feasible_coords(archive);
    assert!(
        !feasible.is_empty(),
        "spread subproblem requires a feasible point"
    );
    let d = bounds.dimension();
    let m = surrogates.len();

    let mut lower = bounds.lower.to_vec();
    let mut upper = bounds.upper.to_vec();
    lower.push(T::zero());
    upper.push(bounds.diameter());

    let model_refs: Vec<&RbfModel<T>> = surrogates.iter().collect();
    let group = RbfGroupEval::new(&model_refs);
    let mut surrogate_out = vec![T::zero(); m];
    let mut kernels = Vec::new();

    let eval = |v: &[T], out: &mut [T]| -> T {
        let (x, y) = (&v[..d], v[d]);
        group.eval_into(x, &mut surrogate_out, &mut kernels);
        out[..m].copy_from_slice(&surrogate_out);
        for (slot, point) in out[m..m + feasible.len()].iter_mut().zip(&feasible) {
            *slot = dist_sq(x, point) - y * y;
        }
        out[m + feasible.len()] = gc(x);
        -y
    };

    let sol = de_minimize_with(
        eval,
        m + feasible.len() + 1,
        &lower,
        &upper,
        settings,
        settings.budget_for(d + 1),
        rng,
    );
    let x = sol.x[..d].to_vec();
    if !sol.feasible || archive.contains_normalized(&x) {
        return (x, T::zero());
    }
    let delta = sol.x[d];
    (x, delta)
}

/// Multistart minimization of the objective surrogate subject to the
/// constraint surrogates and `g_c`. Feasible solutions are deduplicated
/// within 1e-6 and sorted ascending by surrogate objective.
pub fn solve_p4_multistart<T, R, G>(
    objective: &RbfModel<T>,
    surrogates: &[RbfModel<T>],
    gc: G,
    bounds: Bounds<'_, T>,
    settings: &DeSettings<T>,
    n_starts: usize,
    rng: &mut R,
) -> Vec<SubproblemSolution<T>>
where
    T: Real,
    R: Rng,
    G: Fn(&[T]) -> T,
{
    let d = bounds.dimension();
    let m = surrogates.len();

    let mut model_refs: Vec<&RbfModel<T>> = vec![objective];
    model_refs.extend(surrogates.iter());
    let group = RbfGroupEval::new(&model_refs);
    let mut values = vec![T::zero(); m + 1];
    let mut kernels = Vec::new();

    let mut pool: Vec<SubproblemSolution<T>> = Vec::new();
    for _ in 0..n_starts {
        let eval = |x: &[T], out: &mut [T]| -> T {
            group.eval_into(x, &mut values, &mut kernels);
            out[..m].copy_from_slice(&values[1..]);
            out[m] = gc(x);
            values[0]
        };
        let sol = de_minimize_with(
            eval,
            m + 1,
            bounds.lower,
            bounds.upper,
            settings,
            settings.budget_for(d),
            rng,
        );
        if !sol.feasible {
            continue;
        }
        let dup_tol_sq = T::of(1e-6 * 1e-6);
        if pool.iter().any(|p| dist_sq(&p.x, &sol.x) <= dup_tol_sq) {
            continue;
        }
        pool.push(sol);
    }
    pool.sort_by(|a, b| a.aux.partial_cmp(&b.aux).expect("finite surrogate values"));
    pool
}

/// Minimize the objective surrogate at distance at least `delta` from every
/// feasible point, subject to the constraint surrogates and `g_c`.
///
/// Returns `None` when the best individual is infeasible (or duplicates an
/// archived point, which the distance constraints normally prevent).
pub fn solve_p5<T, R, G>(
    objective: &RbfModel<T>,
    surrogates: &[RbfModel<T>],
    gc: G,
    bounds: Bounds<'_, T>,
    delta: T,
    archive: &Archive<T>,
    settings: &DeSettings<T>,
    rng: &mut R,
) -> Option<SubproblemSolution<T>>
where
    T: Real,
    R: Rng,
    G: Fn(&[T]) -> T,
{
    assert!(delta > T::zero(), "exploration distance must be positive");
    let feasible = feasible_coords(archive);
    let d = bounds.dimension();
    let m = surrogates.len();

    let mut model_refs: Vec<&RbfModel<T>> = vec![objective];
    model_refs.extend(surrogates.iter());
    let group = RbfGroupEval::new(&model_refs);
    let mut values = vec![T::zero(); m + 1];
    let mut kernels = Vec::new();
    let delta_sq = delta * delta;

    let eval = |x: &[T], out: &mut [T]| -> T {
        group.eval_into(x, &mut values, &mut kernels);
        out[..m].copy_from_slice(&values[1..]);
        for (slot, point) in out[m..m + feasible.len()].iter_mut().zip(&feasible) {
            *slot = dist_sq(x, point) - delta_sq;
        }
        out[m + feasible.len()] = gc(x);
        values[0]
    };

    let sol = de_minimize_with(
        eval,
        m + feasible.len() + 1,
        bounds.lower,
        bounds.upper,
        settings,
        settings.budget_for(d),
        rng,
    );
    if !sol.feasible || archive.contains_normalized(&sol.x) {
        return None;
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ConstraintKind::Qrsk;
    use crate::problem::{ConstraintOutcome, EvaluationOutcome};
    use crate::rbf::fit_rbf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const GEOM_TOL: f64 = 5e-2;

    fn unit_bounds() -> (Vec<f64>, Vec<f64>) {
        (vec![0.0, 0.0], vec![1.0, 1.0])
    }

    fn settings() -> DeSettings<f64> {
        DeSettings::standard()
    }

    /// RBF surrogate that interpolates a constant over the unit square.
    fn constant_surrogate(value: f64) -> RbfModel<f64> {
        let points = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ];
        fit_rbf(&points, &vec![value; 4]).unwrap()
    }

    fn empty_archive() -> Archive<f64> {
        Archive::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![Qrsk])
    }

    fn archive_with_feasible(points: &[[f64; 2]]) -> Archive<f64> {
        let mut a = empty_archive();
        for p in points {
            a.filter_point(
                p,
                EvaluationOutcome {
                    objective: Some(0.0),
                    constraints: vec![ConstraintOutcome::Value(1.0)],
                    hidden_failure: false,
                },
            )
            .unwrap();
        }
        a
    }

    #[test]
    fn p2_centers_in_the_box() {
        // One constant-positive surrogate: z is limited by the box margins,
        // so the optimum is the center with z = 0.5.
        let (lower, upper) = unit_bounds();
        let archive = empty_archive();
        let surrogates = vec![constant_surrogate(1.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sol = solve_p2(
            &archive,
            &surrogates,
            |_| 1.0,
            Bounds::new(&lower, &upper),
            &settings(),
            &mut rng,
        )
        .expect("feasible");
        assert!((sol.aux - 0.5).abs() <= GEOM_TOL, "z = {}", sol.aux);
        assert!((sol.x[0] - 0.5).abs() <= GEOM_TOL);
        assert!((sol.x[1] - 0.5).abs() <= GEOM_TOL);
    }

    #[test]
    fn p2_no_quantifiable_constraints() {
        let (lower, upper) = unit_bounds();
        let archive = empty_archive();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sol = solve_p2(
            &archive,
            &[],
            |_| 1.0,
            Bounds::new(&lower, &upper),
            &settings(),
            &mut rng,
        )
        .expect("feasible");
        assert!((sol.aux - 0.5).abs() <= GEOM_TOL);
        assert!((sol.x[0] - 0.5).abs() <= GEOM_TOL);
    }

    #[test]
    fn p2_blocked_by_classifier() {
        let (lower, upper) = unit_bounds();
        let archive = empty_archive();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sol = solve_p2(
            &archive,
            &[],
            |_| -100.0,
            Bounds::new(&lower, &upper),
            &settings(),
            &mut rng,
        );
        assert!(sol.is_none());
    }

    /// Brute-force maximin-distance oracle on a grid.
    fn maximin_oracle(feasible: &[[f64; 2]]) -> f64 {
        let mut best = 0.0f64;
        for i in 0..=100 {
            for j in 0..=100 {
                let q = [i as f64 / 100.0, j as f64 / 100.0];
                let nearest = feasible
                    .iter()
                    .map(|p| dist_sq(p, &q).sqrt())
                    .fold(f64::INFINITY, f64::min);
                best = best.max(nearest);
            }
        }
        best
    }

    #[test]
    fn p3_runs_from_center_to_corner() {
        let (lower, upper) = unit_bounds();
        let archive = archive_with_feasible(&[[0.5, 0.5]]);
        let oracle = maximin_oracle(&[[0.5, 0.5]]);
        assert!((oracle - 0.5f64.sqrt()).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (x, delta) = solve_p3(
            &archive,
            &[],
            |_| 1.0,
            Bounds::new(&lower, &upper),
            &settings(),
            &mut rng,
        );
        assert!((delta - oracle).abs() <= GEOM_TOL, "delta = {delta}");
        // x must sit in one of the four corners.
        for xi in &x {
            assert!(xi.min(1.0 - xi).abs() <= GEOM_TOL);
        }
    }

    #[test]
    fn p3_from_corner_reaches_opposite_corner() {
        let (lower, upper) = unit_bounds();
        let archive = archive_with_feasible(&[[0.0, 0.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (x, delta) = solve_p3(
            &archive,
            &[],
            |_| 1.0,
            Bounds::new(&lower, &upper),
            &settings(),
            &mut rng,
        );
        assert!((delta - 2.0f64.sqrt()).abs() <= GEOM_TOL);
        assert!((x[0] - 1.0).abs() <= GEOM_TOL && (x[1] - 1.0).abs() <= GEOM_TOL);
    }

    #[test]
    fn p3_dense_cover_leaves_small_delta() {
        let cover = [
            [0.0, 0.0],
            [0.0, 1.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.5, 0.5],
            [0.5, 0.0],
            [0.5, 1.0],
            [0.0, 0.5],
            [1.0, 0.5],
        ];
        let (lower, upper) = unit_bounds();
        let archive = archive_with_feasible(&cover);
        let oracle = maximin_oracle(&cover);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (_, delta) = solve_p3(
            &archive,
            &[],
            |_| 1.0,
            Bounds::new(&lower, &upper),
            &settings(),
            &mut rng,
        );
        assert!(delta <= oracle + GEOM_TOL);
        assert!(delta >= oracle - GEOM_TOL, "DE should get close to {oracle}");
    }

    #[test]
    #[should_panic(expected = "feasible point")]
    fn p3_requires_feasible_point() {
        let (lower, upper) = unit_bounds();
        let archive = empty_archive();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let _ = solve_p3(
            &archive,
            &[],
            |_| 1.0,
            Bounds::new(&lower, &upper),
            &settings(),
            &mut rng,
        );
    }

    /// Interpolate the bimodal quartic (x - 0.2)^2 (x - 0.8)^2 on a 1-d grid.
    fn bimodal_surrogate() -> RbfModel<f64> {
        let points: Vec<Vec<f64>> = (0..21).map(|i| vec![i as f64 / 20.0]).collect();
        let values: Vec<f64> = points
            .iter()
            .map(|p| (p[0] - 0.2).powi(2) * (p[0] - 0.8).powi(2))
            .collect();
        fit_rbf(&points, &values).unwrap()
    }

    #[test]
    fn p4_finds_both_minima_sorted() {
        let objective = bimodal_surrogate();
        let lower = [0.0];
        let upper = [1.0];
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pool = solve_p4_multistart(
            &objective,
            &[],
            |_| 1.0,
            Bounds::new(&lower, &upper),
            &settings(),
            6,
            &mut rng,
        );
        assert!(!pool.is_empty());
        let near_02 = pool.iter().any(|s| (s.x[0] - 0.2).abs() <= GEOM_TOL);
        let near_08 = pool.iter().any(|s| (s.x[0] - 0.8).abs() <= GEOM_TOL);
        assert!(near_02 && near_08, "pool: {:?}", pool.iter().map(|s| s.x[0]).collect::<Vec<_>>());
        for pair in pool.windows(2) {
            assert!(pair[0].aux <= pair[1].aux, "pool must be sorted ascending");
        }
    }

    #[test]
    fn p4_empty_when_classifier_blocks() {
        let objective = bimodal_surrogate();
        let lower = [0.0];
        let upper = [1.0];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pool = solve_p4_multistart(
            &objective,
            &[],
            |_| -100.0,
            Bounds::new(&lower, &upper),
            &settings(),
            4,
            &mut rng,
        );
        assert!(pool.is_empty());
    }

    #[test]
    fn p4_deduplicates_repeated_minima() {
        // Unimodal surrogate: every start converges to the same point.
        let points: Vec<Vec<f64>> = (0..9).map(|i| vec![i as f64 / 8.0]).collect();
        let values: Vec<f64> = points.iter().map(|p| (p[0] - 0.5).powi(2)).collect();
        let objective = fit_rbf(&points, &values).unwrap();
        let lower = [0.0];
        let upper = [1.0];
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let pool = solve_p4_multistart(
            &objective,
            &[],
            |_| 1.0,
            Bounds::new(&lower, &upper),
            &settings(),
            3,
            &mut rng,
        );
        assert_eq!(pool.len(), 1, "duplicates collapse to one entry");
        assert!((pool[0].x[0] - 0.5).abs() <= GEOM_TOL);
    }

    /// Linear surrogate s(x) = x0 + x1 over the unit square.
    fn linear_surrogate() -> RbfModel<f64> {
        let points = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.9, 0.9],
        ];
        let values: Vec<f64> = points.iter().map(|p| p[0] + p[1]).collect();
        fit_rbf(&points, &values).unwrap()
    }

    #[test]
    fn p5_with_tiny_delta_matches_p4() {
        let objective = linear_surrogate();
        let (lower, upper) = unit_bounds();
        let archive = archive_with_feasible(&[[0.9, 0.9]]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pool = solve_p4_multistart(
            &objective,
            &[],
            |_| 1.0,
            Bounds::new(&lower, &upper),
            &settings(),
            3,
            &mut rng,
        );
        let p4_best = pool.first().expect("p4 feasible").aux;
        let p5 = solve_p5(
            &objective,
            &[],
            |_| 1.0,
            Bounds::new(&lower, &upper),
            1e-9,
            &archive,
            &settings(),
            &mut rng,
        )
        .expect("vacuous distance constraint");
        assert!((p5.aux - p4_best).abs() <= GEOM_TOL);
    }

    #[test]
    fn p5_infeasible_when_delta_exceeds_diameter() {
        let objective = linear_surrogate();
        let (lower, upper) = unit_bounds();
        let archive = archive_with_feasible(&[[0.5, 0.5]]);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p5 = solve_p5(
            &objective,
            &[],
            |_| 1.0,
            Bounds::new(&lower, &upper),
            3.0,
            &archive,
            &settings(),
            &mut rng,
        );
        assert!(p5.is_none());
    }

    #[test]
    fn p5_respects_distance_constraint() {
        let objective = linear_surrogate();
        let (lower, upper) = unit_bounds();
        let center = [0.5, 0.5];
        let archive = archive_with_feasible(&[center]);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let delta = 0.4;
        let p5 = solve_p5(
            &objective,
            &[],
            |_| 1.0,
            Bounds::new(&lower, &upper),
            delta,
            &archive,
            &settings(),
            &mut rng,
        )
        .expect("feasible");
        let distance = dist_sq(&p5.x, &center).sqrt();
        assert!(distance >= delta - 1e-6, "distance = {distance}");
        // The linear objective pulls toward the origin along the ring.
        assert!(p5.aux <= 0.5);
    }

    #[test]
    fn solutions_pass_independent_recheck() {
        // Re-check the P2 margin constraints directly from the solution.
        let (lower, upper) = unit_bounds();
        let archive = empty_archive();
        let surrogates = vec![constant_surrogate(0.3)];
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let sol = solve_p2(
            &archive,
            &surrogates,
            |_| 1.0,
            Bounds::new(&lower, &upper),
            &settings(),
            &mut rng,
        )
        .expect("feasible");
        let z = sol.aux;
        assert!(surrogates[0].eval(&sol.x) - z >= -1e-8);
        for i in 0..2 {
            assert!(sol.x[i] - z >= -1e-8);
            assert!(1.0 - z - sol.x[i] >= -1e-8);
        }
        assert!(z >= 0.0);
    }
}
