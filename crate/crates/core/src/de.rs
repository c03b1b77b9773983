//! Differential evolution (DE/rand/1/bin) with feasibility-rule selection,
//! used to solve the cheap surrogate subproblems.
//!
//! Selection rule: a feasible individual beats an infeasible one; between
//! feasible individuals the smaller objective wins; between infeasible ones
//! the smaller total constraint violation wins.

use rand::Rng;

use crate::real::Real;

/// Constraint violation at or below this total counts as feasible.
pub const VIOLATION_TOL: f64 = 1e-8;

/// Subsolver settings. The population defaults to `max(20, 10 * dim)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeSettings<T> {
    pub population: Option<usize>,
    /// Differential weight F.
    pub weight: T,
    /// Crossover probability CR.
    pub crossover: T,
    /// Internal surrogate evaluations per solve, per subproblem dimension.
    pub budget_per_dim: usize,
    /// Multistart cap for the exploitation subproblem.
    pub n_starts_cap: usize,
}

impl<T: Real> DeSettings<T> {
    pub fn standard() -> Self {
        DeSettings {
            population: None,
            weight: T::of(0.7),
            crossover: T::of(0.9),
            budget_per_dim: 2000,
            n_starts_cap: 10,
        }
    }

    pub fn population_for(&self, dim: usize) -> usize {
        self.population.unwrap_or_else(|| 20.max(10 * dim)).max(5)
    }

    pub fn budget_for(&self, dim: usize) -> usize {
        (self.budget_per_dim * dim).max(self.population_for(dim))
    }

    pub fn n_starts(&self, dim: usize) -> usize {
        self.n_starts_cap.min(dim + 2).max(1)
    }
}

/// Best point found for one subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution<T> {
    pub x: Vec<T>,
    /// Auxiliary value: z for the feasibility subproblem, y for the spread
    /// subproblem, the surrogate objective otherwise.
    pub aux: T,
    pub feasible: bool,
    pub constraint_violation: T,
}

#[derive(Clone, Copy)]
struct Fitness<T> {
    objective: T,
    violation: T,
}

impl<T: Real> Fitness<T> {
    fn feasible(&self) -> bool {
        self.violation <= T::of(VIOLATION_TOL)
    }

    /// Feasibility-rule comparison: `true` when `self` beats `other`.
    fn beats(&self, other: &Fitness<T>) -> bool {
        match (self.feasible(), other.feasible()) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => self.objective < other.objective,
            (false, false) => self.violation < other.violation,
        }
    }
}

/// Minimize `eval`'s objective subject to the constraint values it writes
/// (each `>= 0` feasible), within `budget` evaluations.
///
/// `eval(x, constraints_out)` returns the objective and fills one value per
/// constraint. Deterministic given the RNG state.
pub fn de_minimize_with<T, R, E>(
    mut eval: E,
    n_constraints: usize,
    lower: &[T],
    upper: &[T],
    settings: &DeSettings<T>,
    budget: usize,
    rng: &mut R,
) -> SubproblemSolution<T>
where
    T: Real,
    R: Rng,
    E: FnMut(&[T], &mut [T]) -> T,
{
    let dim = lower.len();
    debug_assert_eq!(upper.len(), dim);
    let pop_size = settings.population_for(dim);
    assert!(
        budget >= pop_size,
        "budget {budget} must cover the initial population {pop_size}"
    );

    let mut cons = vec![T::zero(); n_constraints];
    let mut fitness_of = |x: &[T], cons: &mut Vec<T>| -> Fitness<T> {
        let objective = eval(x, cons);
        let violation = cons
            .iter()
            .map(|&g| (-g).max(T::zero()))
            .fold(T::zero(), |a, v| a + v);
        Fitness {
            objective,
            violation,
        }
    };

    let mut population: Vec<Vec<T>> = (0..pop_size)
        .map(|_| {
            lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| l + T::of(rng.gen::<f64>()) * (u - l))
                .collect()
        })
        .collect();
    let mut fitness: Vec<Fitness<T>> = population
        .iter()
        .map(|x| fitness_of(x, &mut cons))
        .collect();
    let mut evals = pop_size;

    let mut best = 0;
    for i in 1..pop_size {
        if fitness[i].beats(&fitness[best]) {
            best = i;
        }
    }
    let mut best_x = population[best].clone();
    let mut best_fit = fitness[best];

    let mut trial = vec![T::zero(); dim];
    while evals < budget {
        for i in 0..pop_size {
            if evals >= budget {
                break;
            }
            let r1 = distinct_index(rng, pop_size, &[i]);
            let r2 = distinct_index(rng, pop_size, &[i, r1]);
            let r3 = distinct_index(rng, pop_size, &[i, r1, r2]);
            let j_rand = rng.gen_range(0..dim);
            for j in 0..dim {
                let from_mutant = j == j_rand || T::of(rng.gen::<f64>()) < settings.crossover;
                trial[j] = if from_mutant {
                    let v = population[r1][j]
                        + settings.weight * (population[r2][j] - population[r3][j]);
                    v.max(lower[j]).min(upper[j])
                } else {
                    population[i][j]
                };
            }
            let trial_fit = fitness_of(&trial, &mut cons);
            evals += 1;
            if trial_fit.beats(&fitness[i]) {
                population[i].copy_from_slice(&trial);
                fitness[i] = trial_fit;
                if trial_fit.beats(&best_fit) {
                    best_x.copy_from_slice(&trial);
                    best_fit = trial_fit;
                }
            }
        }
    }

    SubproblemSolution {
        x: best_x,
        aux: best_fit.objective,
        feasible: best_fit.feasible(),
        constraint_violation: best_fit.violation,
    }
}

fn distinct_index<R: Rng>(rng: &mut R, n: usize, taken: &[usize]) -> usize {
    loop {
        let i = rng.gen_range(0..n);
        if !taken.contains(&i) {
            return i;
        }
    }
}

/// Spec-shaped front end over separate objective and constraint closures.
pub fn de_minimize<T, R>(
    objective: impl Fn(&[T]) -> T,
    constraints: &[&dyn Fn(&[T]) -> T],
    lower: &[T],
    upper: &[T],
    settings: &DeSettings<T>,
    budget: usize,
    rng: &mut R,
) -> SubproblemSolution<T>
where
    T: Real,
    R: Rng,
{
    de_minimize_with(
        |x, out| {
            for (slot, g) in out.iter_mut().zip(constraints) {
                *slot = g(x);
            }
            objective(x)
        },
        constraints.len(),
        lower,
        upper,
        settings,
        budget,
        rng,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::cell::Cell;

    fn settings() -> DeSettings<f64> {
        DeSettings::standard()
    }

    #[test]
    fn unconstrained_quadratic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sol = de_minimize(
            |x: &[f64]| (x[0] - 0.3).powi(2),
            &[],
            &[0.0],
            &[1.0],
            &settings(),
            2000,
            &mut rng,
        );
        assert!(sol.feasible);
        assert!((sol.x[0] - 0.3).abs() <= 1e-3, "x = {}", sol.x[0]);
    }

    #[test]
    fn constraint_pushes_to_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = |x: &[f64]| x[0] - 0.7;
        let sol = de_minimize(
            |x: &[f64]| (x[0] - 0.3).powi(2),
            &[&g],
            &[0.0],
            &[1.0],
            &settings(),
            2000,
            &mut rng,
        );
        assert!(sol.feasible);
        assert!((sol.x[0] - 0.7).abs() <= 1e-3, "x = {}", sol.x[0]);
    }

    #[test]
    fn degenerate_budget_returns_best_of_initial_population() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let calls = Cell::new(0usize);
        let pop = settings().population_for(1);
        let sol = de_minimize_with(
            |x: &[f64], _out: &mut [f64]| {
                calls.set(calls.get() + 1);
                (x[0] - 0.5).powi(2)
            },
            0,
            &[0.0],
            &[1.0],
            &settings(),
            pop,
            &mut rng,
        );
        assert_eq!(calls.get(), pop);
        assert!(sol.feasible);
        assert!((0.0..=1.0).contains(&sol.x[0]));
    }

    #[test]
    fn infeasible_problem_reports_violation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = |_: &[f64]| -1.0;
        let sol = de_minimize(
            |x: &[f64]| x[0],
            &[&g],
            &[0.0],
            &[1.0],
            &settings(),
            500,
            &mut rng,
        );
        assert!(!sol.feasible);
        assert!((sol.constraint_violation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_given_seed() {
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            de_minimize(
                |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>(),
                &[],
                &[-1.0, -1.0],
                &[1.0, 1.0],
                &settings(),
                1500,
                &mut rng,
            )
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn higher_dimensional_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = 5;
        let sol = de_minimize(
            |x: &[f64]| x.iter().map(|v| (v - 0.4).powi(2)).sum::<f64>(),
            &[],
            &vec![0.0; d],
            &vec![1.0; d],
            &settings(),
            settings().budget_for(d),
            &mut rng,
        );
        for v in &sol.x {
            assert!((v - 0.4).abs() <= 1e-3);
        }
    }
}
