//! Cubic radial basis function interpolation with a degree-1 polynomial
//! tail, the rank-readiness check for fitting, and the per-constraint /
//! objective surrogate builders.
//!
//! The interpolant is `s(x) = sum_i gamma_i * ||x - x^i||^3 + lambda . (x, 1)`
//! with coefficients from the saddle-point system
//!
//! ```text
//!   [ Phi  P ] [gamma]   [F]
//!   [ P^T  0 ] [lambda] = [0]
//! ```
//!
//! where `Phi_ij = ||x^i - x^j||^3` and `P` has rows `(x^i, 1)`. The system
//! is solvable iff `P` has rank `d + 1`.
//!
//! All surrogates built from an [`Archive`] operate on box-normalized
//! coordinates; the raw-coordinate boxes of the test problems span several
//! orders of magnitude and distance kernels need comparable scales.

use std::io::Write;

use thiserror::Error;

use crate::archive::{Archive, PointClass};
use crate::linalg::{lu_solve_in_place, matrix_rank};
use crate::real::{dist, dist_sq, Real};

/// Pairwise-distinct threshold for interpolation centers.
pub const CENTER_DISTINCT_TOL: f64 = 1e-10;

/// Relative residual allowed at the centers after a fit.
pub const FIT_RESIDUAL_TOL: f64 = 1e-8;

/// Rank tolerance for the `[P^T e]` readiness checks.
const RANK_TOL: f64 = 1e-8;

/// Centers kept per fit: most recent plus best-objective points up to
/// `60 * (d + 1)`.
pub fn center_cap(dimension: usize) -> usize {
    60 * (dimension + 1)
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("interpolation matrix rank {rank} < required {required}")]
    RankDeficient { rank: usize, required: usize },
    #[error("centers {a} and {b} coincide within tolerance")]
    CoincidentCenters { a: usize, b: usize },
    #[error("linear system numerically singular even after regularization")]
    Singular,
    #[error("constraint {0} is not quantifiable; no surrogate can be fitted")]
    NotQuantifiable(usize),
}

/// Fitted cubic RBF interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfModel<T> {
    /// Flat row-major `n x d` center matrix.
    centers: Vec<T>,
    n: usize,
    d: usize,
    gamma: Vec<T>,
    lambda: Vec<T>,
}

impl<T: Real> RbfModel<T> {
    pub fn center_count(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn center(&self, i: usize) -> &[T] {
        &self.centers[i * self.d..(i + 1) * self.d]
    }

    pub fn centers_flat(&self) -> &[T] {
        &self.centers
    }

    pub fn gamma(&self) -> &[T] {
        &self.gamma
    }

    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    /// Evaluate the interpolant at `x`.
    pub fn eval(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.d);
        let mut acc = self.lambda[self.d];
        for (k, &xk) in x.iter().enumerate() {
            acc = acc + self.lambda[k] * xk;
        }
        for (i, &gi) in self.gamma.iter().enumerate() {
            let r_sq = dist_sq(self.center(i), x);
            acc = acc + gi * r_sq * r_sq.sqrt();
        }
        acc
    }

    /// Debug dump: one `center...,gamma` row per center, then a `lambda` row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header: Vec<String> = (0..self.d).map(|k| format!("c{k}")).collect();
        header.push("gamma".into());
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.n {
            let mut row: Vec<String> =
                self.center(i).iter().map(|v| format!("{}", v.as_f64())).collect();
            row.push(format!("{}", self.gamma[i].as_f64()));
            writeln!(w, "{}", row.join(","))?;
        }
        let lambda: Vec<String> =
            self.lambda.iter().map(|v| format!("{}", v.as_f64())).collect();
        writeln!(w, "lambda,{}", lambda.join(","))
    }
}

fn build_system<T: Real>(points: &[Vec<T>], values: &[T], ridge: T) -> (Vec<T>, Vec<T>) {
    let n = points.len();
    let d = points[0].len();
    let size = n + d + 1;
    let mut a = vec![T::zero(); size * size];
    let mut rhs = vec![T::zero(); size];
    for i in 0..n {
        for j in 0..i {
            let r_sq = dist_sq(&points[i], &points[j]);
            let phi = r_sq * r_sq.sqrt();
            a[i * size + j] = phi;
            a[j * size + i] = phi;
        }
        a[i * size + i] = ridge;
        for k in 0..d {
            a[i * size + (n + k)] = points[i][k];
            a[(n + k) * size + i] = points[i][k];
        }
        a[i * size + (n + d)] = T::one();
        a[(n + d) * size + i] = T::one();
        rhs[i] = values[i];
    }
    (a, rhs)
}

/// Fit the cubic RBF interpolant through `(points, values)`.
///
/// Points are used in the coordinate frame given; the archive-level builders
/// below pass normalized coordinates.
pub fn fit_rbf<T: Real>(points: &[Vec<T>], values: &[T]) -> Result<RbfModel<T>, FitError> {
    assert_eq!(points.len(), values.len());
    let n = points.len();
    let required = points.first().map_or(1, |p| p.len() + 1);
    if n < required {
        return Err(FitError::RankDeficient { rank: n, required });
    }
    let d = points[0].len();

    let distinct_tol = T::of(CENTER_DISTINCT_TOL);
    for i in 0..n {
        for j in 0..i {
            if dist(&points[i], &points[j]) < distinct_tol {
                return Err(FitError::CoincidentCenters { a: j, b: i });
            }
        }
    }

    let mut augmented = Vec::with_capacity(n * (d + 1));
    for p in points {
        augmented.extend_from_slice(p);
        augmented.push(T::one());
    }
    let rank = matrix_rank(&augmented, n, d + 1, T::of(RANK_TOL));
    if rank < d + 1 {
        return Err(FitError::RankDeficient {
            rank,
            required: d + 1,
        });
    }

    let max_abs_value = values.iter().fold(T::one(), |acc, v| acc.max(v.abs()));
    let tol = T::of(FIT_RESIDUAL_TOL) * max_abs_value;

    let mut ridge = T::zero();
    for attempt in 0..2 {
        let (mut a, mut rhs) = build_system(points, values, ridge);
        let size = n + d + 1;
        if lu_solve_in_place(&mut a, &mut rhs, size) {
            let model = RbfModel {
                centers: points.iter().flatten().copied().collect(),
                n,
                d,
                gamma: rhs[..n].to_vec(),
                lambda: rhs[n..].to_vec(),
            };
            let worst = points
                .iter()
                .zip(values)
                .map(|(p, &v)| (model.eval(p) - v).abs())
                .fold(T::zero(), T::max);
            if worst <= tol {
                return Ok(model);
            }
        }
        if attempt == 0 {
            // The cubic kernel has a zero diagonal, so scale the ridge by
            // the largest off-diagonal entry instead of the trace.
            let max_phi = (0..n)
                .flat_map(|i| (0..i).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let r_sq = dist_sq(&points[i], &points[j]);
                    r_sq * r_sq.sqrt()
                })
                .fold(T::one(), T::max);
            ridge = T::of(1e-10) * max_phi;
        }
    }
    Err(FitError::Singular)
}

fn augmented_rank_ok<T: Real>(archive: &Archive<T>, indices: &[usize]) -> bool {
    let d = archive.dimension();
    if indices.len() < d + 1 {
        return false;
    }
    let mut rows = Vec::with_capacity(indices.len() * (d + 1));
    for &i in indices {
        rows.extend_from_slice(&archive.points()[i].z);
        rows.push(T::one());
    }
    matrix_rank(&rows, indices.len(), d + 1, T::of(RANK_TOL)) == d + 1
}

/// Whether every quantifiable constraint has enough well-spread points for
/// an RBF fit: the candidate-center matrix augmented with a ones column must
/// have rank `d + 1`.
pub fn rank_ready<T: Real>(archive: &Archive<T>) -> bool {
    if archive.is_empty() {
        return false;
    }
    let base = archive.surrogate_base_indices();
    for (j, kind) in archive.kinds().iter().enumerate() {
        if !kind.quantifiable() {
            continue;
        }
        let ok = if *kind == crate::problem::ConstraintKind::Qusk {
            let mut idx = base.clone();
            idx.extend(archive.qusk_extension_indices(j));
            augmented_rank_ok(archive, &idx)
        } else {
            augmented_rank_ok(archive, &base)
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Trim candidate centers to the cap, keeping the best-objective half and
/// filling the remainder with the most recent evaluations.
fn apply_center_cap<T: Real>(archive: &Archive<T>, mut indices: Vec<usize>, cap: usize) -> Vec<usize> {
    if indices.len() <= cap {
        return indices;
    }
    let objective = |i: usize| {
        archive.points()[i]
            .outcome
            .objective
            .map_or(f64::INFINITY, |f| f.as_f64())
    };
    let mut by_objective = indices.clone();
    by_objective.sort_by(|&a, &b| objective(a).partial_cmp(&objective(b)).unwrap().then(a.cmp(&b)));
    let mut keep: Vec<usize> = by_objective[..cap / 2].to_vec();
    indices.sort_unstable_by(|a, b| b.cmp(a)); // most recent first
    for i in indices {
        if keep.len() >= cap {
            break;
        }
        if !keep.contains(&i) {
            keep.push(i);
        }
    }
    keep.sort_unstable();
    keep
}

/// Thin the candidate set to pairwise separation `sep` (normalized
/// coordinates), preferring better-objective points, then earlier ones.
fn separated_indices<T: Real>(archive: &Archive<T>, indices: &[usize], sep: T) -> Vec<usize> {
    let objective = |i: usize| {
        archive.points()[i]
            .outcome
            .objective
            .map_or(f64::INFINITY, |f| f.as_f64())
    };
    let mut order = indices.to_vec();
    order.sort_by(|&a, &b| objective(a).partial_cmp(&objective(b)).unwrap().then(a.cmp(&b)));
    let sep_sq = sep * sep;
    let mut kept: Vec<usize> = Vec::with_capacity(order.len());
    for i in order {
        let zi = &archive.points()[i].z;
        if kept
            .iter()
            .all(|&k| crate::real::dist_sq(&archive.points()[k].z, zi) >= sep_sq)
        {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept
}

fn fit_over_indices<T: Real>(
    archive: &Archive<T>,
    indices: Vec<usize>,
    value_of: impl Fn(usize) -> T,
) -> Result<RbfModel<T>, FitError> {
    let indices = apply_center_cap(archive, indices, center_cap(archive.dimension()));
    for &i in &indices {
        assert_ne!(
            archive.points()[i].class,
            PointClass::H,
            "H-classified points must never become surrogate centers"
        );
    }
    let fit = |idx: &[usize]| {
        let points: Vec<Vec<T>> = idx.iter().map(|&i| archive.points()[i].z.clone()).collect();
        let values: Vec<T> = idx.iter().map(|&i| value_of(i)).collect();
        fit_rbf(&points, &values)
    };
    // Tight point clusters from late exploitation steps make the system
    // numerically singular; retry on a thinned center set before giving up.
    let mut last = fit(&indices);
    for sep in [1e-4, 1e-2] {
        match last {
            Err(FitError::Singular) | Err(FitError::CoincidentCenters { .. }) => {
                last = fit(&separated_indices(archive, &indices, T::of(sep)));
            }
            done => return done,
        }
    }
    last
}

/// Surrogate for quantifiable constraint `j` over F, I and S points, plus
/// the U points feasible for `j` when `j` is QUSK. Normalized coordinates.
pub fn fit_constraint_surrogate<T: Real>(
    archive: &Archive<T>,
    j: usize,
) -> Result<RbfModel<T>, FitError> {
    let kind = archive.kinds()[j];
    if !kind.quantifiable() {
        return Err(FitError::NotQuantifiable(j));
    }
    let mut indices = archive.surrogate_base_indices();
    if kind == crate::problem::ConstraintKind::Qusk {
        indices.extend(archive.qusk_extension_indices(j));
    }
    fit_over_indices(archive, indices, |i| {
        archive
            .constraint_value(i, j)
            .expect("quantifiable constraint value stored for candidate center")
    })
}

/// Surrogate for the objective over F, I and S points only (the objective
/// is unavailable elsewhere). Normalized coordinates.
pub fn fit_objective_surrogate<T: Real>(archive: &Archive<T>) -> Result<RbfModel<T>, FitError> {
    let indices = archive.surrogate_base_indices();
    fit_over_indices(archive, indices, |i| {
        archive.points()[i]
            .outcome
            .objective
            .expect("F/I/S points carry objectives")
    })
}

/// Batched evaluator over several models that share center sets.
///
/// All QRSK surrogates and the objective surrogate fitted from one archive
/// snapshot interpolate over identical centers, so the kernel vector is
/// computed once per group and reused for every member model.
pub struct RbfGroupEval<'a, T> {
    groups: Vec<Group<'a, T>>,
    output_count: usize,
}

struct Group<'a, T> {
    centers: &'a [T],
    n: usize,
    d: usize,
    members: Vec<(usize, &'a RbfModel<T>)>,
}

impl<'a, T: Real> RbfGroupEval<'a, T> {
    pub fn new(models: &[&'a RbfModel<T>]) -> Self {
        let mut groups: Vec<Group<'a, T>> = Vec::new();
        for (slot, &model) in models.iter().enumerate() {
            match groups
                .iter_mut()
                .find(|g| g.n == model.n && g.d == model.d && g.centers == model.centers_flat())
            {
                Some(g) => g.members.push((slot, model)),
                None => groups.push(Group {
                    centers: model.centers_flat(),
                    n: model.n,
                    d: model.d,
                    members: vec![(slot, model)],
                }),
            }
        }
        RbfGroupEval {
            groups,
            output_count: models.len(),
        }
    }

    pub fn output_count(&self) -> usize {
        self.output_count
    }

    /// Evaluate every model at `x`, writing outputs in construction order.
    /// `kernels` is reusable scratch.
    pub fn eval_into(&self, x: &[T], out: &mut [T], kernels: &mut Vec<T>) {
        debug_assert_eq!(out.len(), self.output_count);
        for group in &self.groups {
            kernels.clear();
            kernels.reserve(group.n);
            for i in 0..group.n {
                let c = &group.centers[i * group.d..(i + 1) * group.d];
                let r_sq = dist_sq(c, x);
                kernels.push(r_sq * r_sq.sqrt());
            }
            for &(slot, model) in &group.members {
                let mut acc = model.lambda[group.d];
                for (k, &xk) in x.iter().enumerate() {
                    acc = acc + model.lambda[k] * xk;
                }
                for (gi, ki) in model.gamma.iter().zip(kernels.iter()) {
                    acc = acc + *gi * *ki;
                }
                out[slot] = acc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ConstraintKind::{self, *};
    use crate::problem::{ConstraintOutcome, EvaluationOutcome};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(coords: &[f64]) -> Vec<f64> {
        coords.to_vec()
    }

    #[test]
    fn linear_data_gives_pure_tail() {
        let points = vec![pt(&[0.0]), pt(&[1.0]), pt(&[2.0])];
        let values = vec![0.0, 1.0, 2.0];
        let model = fit_rbf(&points, &values).unwrap();
        for &g in model.gamma() {
            assert!(g.abs() <= 1e-8, "gamma should vanish on linear data");
        }
        assert_relative_eq!(model.lambda()[0], 1.0, epsilon = 1e-8);
        assert!(model.lambda()[1].abs() <= 1e-8);
        assert_relative_eq!(model.eval(&[1.5]), 1.5, epsilon = 1e-8);
    }

    #[test]
    fn constant_data() {
        let points = vec![pt(&[0.0]), pt(&[1.0])];
        let values = vec![5.0, 5.0];
        let model = fit_rbf(&points, &values).unwrap();
        assert_relative_eq!(model.eval(&[0.5]), 5.0, epsilon = 1e-8);
    }

    #[test]
    fn pure_linear_tail_eval() {
        let model = RbfModel {
            centers: vec![0.0f64, 0.0],
            n: 1,
            d: 2,
            gamma: vec![0.0],
            lambda: vec![2.0, 0.0, 3.0],
        };
        assert_relative_eq!(model.eval(&[1.0, 0.0]), 5.0);
    }

    /// Build a valid RBF function (gamma orthogonal to the tail basis, so it
    /// lies in the interpolation space), sample it, refit, and compare.
    fn self_generated_model(rng: &mut ChaCha8Rng, n: usize, d: usize) -> (Vec<Vec<f64>>, RbfModel<f64>) {
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
            .collect();
        // Project random coefficients onto { gamma : P^T gamma = 0 } by
        // least-squares: gamma <- gamma - P (P^T P)^-1 P^T gamma.
        let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let cols = d + 1;
        let p = |i: usize, k: usize| if k < d { points[i][k] } else { 1.0 };
        let mut ptp = vec![0.0f64; cols * cols];
        let mut ptg = vec![0.0f64; cols];
        for i in 0..n {
            for a in 0..cols {
                ptg[a] += p(i, a) * raw[i];
                for b in 0..cols {
                    ptp[a * cols + b] += p(i, a) * p(i, b);
                }
            }
        }
        assert!(lu_solve_in_place(&mut ptp, &mut ptg, cols));
        let gamma: Vec<f64> = (0..n)
            .map(|i| raw[i] - (0..cols).map(|a| p(i, a) * ptg[a]).sum::<f64>())
            .collect();
        let lambda: Vec<f64> = (0..cols).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let truth = RbfModel {
            centers: points.iter().flatten().copied().collect(),
            n,
            d,
            gamma,
            lambda,
        };
        (points, truth)
    }

    #[test]
    fn refit_recovers_self_generated_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, d) in &[(6usize, 2usize), (12, 3), (9, 1)] {
            let (points, truth) = self_generated_model(&mut rng, n, d);
            let values: Vec<f64> = points.iter().map(|p| truth.eval(p)).collect();
            let fitted = fit_rbf(&points, &values).unwrap();
            let max_f = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            for (p, &v) in points.iter().zip(&values) {
                assert!((fitted.eval(p) - v).abs() <= 1e-8 * max_f);
            }
            for _ in 0..20 {
                let q: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
                assert_relative_eq!(fitted.eval(&q), truth.eval(&q), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn affine_reproduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &d in &[1usize, 2, 5] {
            let n = 3 * (d + 1);
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
                .collect();
            let coeff: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            let offset: f64 = rng.gen();
            let affine =
                |x: &[f64]| offset + x.iter().zip(&coeff).map(|(xi, ci)| xi * ci).sum::<f64>();
            let values: Vec<f64> = points.iter().map(|p| affine(p)).collect();
            let model = fit_rbf(&points, &values).unwrap();
            let max_gamma = model.gamma().iter().fold(0.0f64, |a, g| a.max(g.abs()));
            assert!(max_gamma <= 1e-8, "max|gamma| = {max_gamma}");
            for _ in 0..20 {
                let q: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
                assert!((model.eval(&q) - affine(&q)).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn permutation_and_translation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (points, truth) = self_generated_model(&mut rng, 8, 2);
        let values: Vec<f64> = points.iter().map(|p| truth.eval(p)).collect();
        let model = fit_rbf(&points, &values).unwrap();

        let perm = [3usize, 0, 7, 1, 5, 2, 6, 4];
        let permuted_points: Vec<Vec<f64>> = perm.iter().map(|&i| points[i].clone()).collect();
        let permuted_values: Vec<f64> = perm.iter().map(|&i| values[i]).collect();
        let permuted = fit_rbf(&permuted_points, &permuted_values).unwrap();

        let shift = [0.37, -1.21];
        let shifted_points: Vec<Vec<f64>> = points
            .iter()
            .map(|p| p.iter().zip(&shift).map(|(a, b)| a + b).collect())
            .collect();
        let shifted = fit_rbf(&shifted_points, &values).unwrap();

        for _ in 0..20 {
            let q: Vec<f64> = (0..2).map(|_| rng.gen::<f64>()).collect();
            assert!((model.eval(&q) - permuted.eval(&q)).abs() <= 1e-9);
            let q_shift: Vec<f64> = q.iter().zip(&shift).map(|(a, b)| a + b).collect();
            assert!((model.eval(&q) - shifted.eval(&q_shift)).abs() <= 1e-8);
        }
    }

    #[test]
    fn degenerate_inputs_rejected() {
        let collinear = vec![pt(&[0.0, 0.0]), pt(&[1.0, 1.0]), pt(&[2.0, 2.0]), pt(&[3.0, 3.0])];
        let values = vec![0.0, 1.0, 2.0, 3.0];
        assert!(matches!(
            fit_rbf(&collinear, &values),
            Err(FitError::RankDeficient { .. })
        ));

        let coincident = vec![pt(&[0.0, 0.0]), pt(&[0.0, 0.0]), pt(&[1.0, 0.0])];
        assert!(matches!(
            fit_rbf(&coincident, &vec![0.0, 0.0, 1.0]),
            Err(FitError::CoincidentCenters { .. })
        ));

        let too_few = vec![pt(&[0.0, 0.0]), pt(&[1.0, 0.0])];
        assert!(matches!(
            fit_rbf(&too_few, &vec![0.0, 1.0]),
            Err(FitError::RankDeficient { .. })
        ));
    }

    // -- archive-level builders ------------------------------------------

    fn unit_archive(kinds: Vec<ConstraintKind>) -> Archive<f64> {
        Archive::new(vec![0.0, 0.0], vec![1.0, 1.0], kinds)
    }

    fn insert(
        archive: &mut Archive<f64>,
        x: [f64; 2],
        objective: Option<f64>,
        values: &[f64],
    ) -> PointClass {
        let kinds = archive.kinds().to_vec();
        let constraints = kinds
            .iter()
            .zip(values)
            .map(|(k, &v)| match k {
                Qrsk | Qusk => ConstraintOutcome::Value(v),
                Nrsk | Nusk => ConstraintOutcome::Flag(v >= -1e-6),
                Nush => ConstraintOutcome::Hidden,
            })
            .collect();
        archive
            .filter_point(
                &x,
                EvaluationOutcome {
                    objective,
                    constraints,
                    hidden_failure: false,
                },
            )
            .unwrap()
    }

    #[test]
    fn rank_ready_cases() {
        // Empty archive is never ready.
        let a = unit_archive(vec![Qrsk]);
        assert!(!rank_ready(&a));

        // Three affinely independent points, all-QRSK: ready.
        let mut a = unit_archive(vec![Qrsk]);
        insert(&mut a, [0.0, 0.0], Some(0.0), &[1.0]);
        insert(&mut a, [1.0, 0.0], Some(0.0), &[1.0]);
        insert(&mut a, [0.0, 1.0], Some(0.0), &[1.0]);
        assert!(rank_ready(&a));

        // Four collinear points: not ready.
        let mut a = unit_archive(vec![Qrsk]);
        for i in 0..4 {
            let t = i as f64 / 3.0;
            insert(&mut a, [t, t], Some(0.0), &[1.0]);
        }
        assert!(!rank_ready(&a));
    }

    #[test]
    fn rank_ready_uses_qusk_extension() {
        // Base F/I/S points are collinear; a U point feasible for the QUSK
        // constraint restores full rank.
        let mut a = unit_archive(vec![Qusk, Qusk]);
        insert(&mut a, [0.0, 0.0], Some(0.0), &[1.0, 1.0]);
        insert(&mut a, [0.5, 0.5], Some(0.0), &[1.0, 1.0]);
        insert(&mut a, [1.0, 1.0], Some(0.0), &[1.0, 1.0]);
        assert!(!rank_ready(&a));
        // U point: violates constraint 1 only, so it extends constraint 0.
        let class = insert(&mut a, [1.0, 0.0], None, &[1.0, -1.0]);
        assert_eq!(class, PointClass::U);
        // Constraint 0 now has rank 3 candidates, constraint 1 does not.
        assert!(!rank_ready(&a));
        let class = insert(&mut a, [0.0, 1.0], None, &[-1.0, 1.0]);
        assert_eq!(class, PointClass::U);
        assert!(rank_ready(&a));
    }

    #[test]
    fn constraint_surrogate_center_selection() {
        let mut a = unit_archive(vec![Qrsk, Qusk]);
        insert(&mut a, [0.0, 0.0], Some(0.0), &[0.3, 1.0]);
        insert(&mut a, [1.0, 0.0], Some(0.0), &[0.1, 1.0]);
        insert(&mut a, [0.0, 1.0], Some(0.0), &[0.9, 1.0]);
        // U point, feasible for constraint 1? violates it -> excluded there,
        // but never a candidate for the QRSK constraint 0 either.
        insert(&mut a, [1.0, 1.0], None, &[0.5, -2.0]);
        // U point feasible for constraint 1 cannot exist (it would violate
        // some other QUSK constraint); use a second QUSK problem instead.

        let qrsk_model = fit_constraint_surrogate(&a, 0).unwrap();
        assert_eq!(qrsk_model.center_count(), 3, "X_U excluded for QRSK");

        let mut b = unit_archive(vec![Qusk, Qusk]);
        insert(&mut b, [0.0, 0.0], Some(0.0), &[0.3, 1.0]);
        insert(&mut b, [1.0, 0.0], Some(0.0), &[0.1, 1.0]);
        insert(&mut b, [0.0, 1.0], Some(0.0), &[0.9, 1.0]);
        insert(&mut b, [1.0, 1.0], None, &[0.5, -2.0]); // U, feasible for 0
        insert(&mut b, [0.5, 1.0], None, &[-0.5, 2.0]); // U, feasible for 1
        let m0 = fit_constraint_surrogate(&b, 0).unwrap();
        let m1 = fit_constraint_surrogate(&b, 1).unwrap();
        assert_eq!(m0.center_count(), 4);
        assert_eq!(m1.center_count(), 4);
        // The extension point's stored value is interpolated.
        assert_relative_eq!(m0.eval(&[1.0, 1.0]), 0.5, epsilon = 1e-7);
        assert_relative_eq!(m1.eval(&[0.5, 1.0]), 2.0, epsilon = 1e-7);
    }

    #[test]
    fn constant_zero_constraint() {
        let mut a = unit_archive(vec![Qrsk]);
        insert(&mut a, [0.0, 0.0], Some(0.0), &[0.0]);
        insert(&mut a, [1.0, 0.0], Some(0.0), &[0.0]);
        insert(&mut a, [0.0, 1.0], Some(0.0), &[0.0]);
        insert(&mut a, [0.7, 0.7], Some(0.0), &[0.0]);
        let model = fit_constraint_surrogate(&a, 0).unwrap();
        for q in [[0.2, 0.9], [0.5, 0.5], [0.9, 0.1]] {
            assert!(model.eval(&q).abs() <= 1e-8);
        }
    }

    #[test]
    fn objective_surrogate_excludes_h_and_u() {
        let mut a = unit_archive(vec![Qusk]);
        insert(&mut a, [0.0, 0.0], Some(1.0), &[1.0]);
        insert(&mut a, [1.0, 0.0], Some(2.0), &[1.0]);
        insert(&mut a, [0.0, 1.0], Some(3.0), &[1.0]);
        insert(&mut a, [1.0, 1.0], None, &[-1.0]); // U point, no objective
        let crash = EvaluationOutcome {
            objective: None,
            constraints: vec![ConstraintOutcome::Hidden],
            hidden_failure: true,
        };
        a.filter_point(&[0.5, 0.9], crash).unwrap();
        let model = fit_objective_surrogate(&a).unwrap();
        assert_eq!(model.center_count(), 3);
        assert_relative_eq!(model.eval(&[0.0, 0.0]), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn center_cap_respected() {
        let problem = crate::problem::ProblemSpec::builder("big", vec![0.0], vec![1.0])
            .objective(|_| 0.0)
            .constraint(Qrsk, |_| 1.0)
            .build()
            .unwrap();
        let mut a = Archive::for_problem(&problem);
        let cap = center_cap(1);
        let total = cap + 40;
        for i in 0..total {
            let x = [i as f64 / total as f64];
            let out = EvaluationOutcome {
                objective: Some((i as f64 - 100.0).abs()),
                constraints: vec![ConstraintOutcome::Value(1.0)],
                hidden_failure: false,
            };
            a.filter_point(&x, out).unwrap();
        }
        let model = fit_objective_surrogate(&a).unwrap();
        assert_eq!(model.center_count(), cap);
        // Best-objective point (i == 100) survives the cap even though it is
        // not recent.
        let kept_best = (0..model.center_count())
            .any(|i| (model.center(i)[0] - 100.0 / total as f64).abs() < 1e-12);
        assert!(kept_best);
    }

    #[test]
    fn group_eval_matches_individual_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let points: Vec<Vec<f64>> = (0..7)
            .map(|_| (0..2).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let v1: Vec<f64> = points.iter().map(|p| p[0] * p[0] + p[1]).collect();
        let v2: Vec<f64> = points.iter().map(|p| (p[0] - p[1]).sin()).collect();
        let m1 = fit_rbf(&points, &v1).unwrap();
        let m2 = fit_rbf(&points, &v2).unwrap();
        let mut other_points = points.clone();
        other_points.push(vec![0.11, 0.93]);
        let v3: Vec<f64> = other_points.iter().map(|p| p[0] + 3.0).collect();
        let m3 = fit_rbf(&other_points, &v3).unwrap();

        let group = RbfGroupEval::new(&[&m1, &m2, &m3]);
        let mut out = vec![0.0; 3];
        let mut scratch = Vec::new();
        for _ in 0..10 {
            let q: Vec<f64> = (0..2).map(|_| rng.gen::<f64>()).collect();
            group.eval_into(&q, &mut out, &mut scratch);
            assert_relative_eq!(out[0], m1.eval(&q), epsilon = 1e-12);
            assert_relative_eq!(out[1], m2.eval(&q), epsilon = 1e-12);
            assert_relative_eq!(out[2], m3.eval(&q), epsilon = 1e-12);
        }
    }
}
