//! Multi-trial experiments and the evaluation metrics built on them:
//! feasibility success counts, medians over successful trials, relative
//! error, and data/performance profiles.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::problem::{ProblemSpec, Scenario};
use crate::real::Real;
use crate::stages::{solve, SolverConfig, Termination};
use crate::testbed::{find_entry, get_problem, RegistryError};

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("relative error undefined for a zero optimum")]
    ZeroOptimum,
    #[error("malformed results row: {0}")]
    MalformedRow(String),
}

/// `|(f_S - f*) / f*|`.
pub fn relative_error<T: Real>(f_solver: T, f_star: T) -> Result<T, BenchError> {
    if f_star == T::zero() {
        return Err(BenchError::ZeroOptimum);
    }
    Ok(((f_solver - f_star) / f_star).abs())
}

/// Smallest 1-based evaluation index at which the best feasible value `f`
/// satisfies the convergence test `f0 - f >= (1 - tau) * (f0 - f_star)`,
/// or `None` when the trajectory never reaches it.
///
/// `trajectory[i]` is the best feasible objective after evaluation `i + 1`
/// (`None` before the first feasible point); `f0` is the first feasible
/// value of the trial.
pub fn solved_threshold<T: Real>(
    trajectory: &[Option<T>],
    f_star: T,
    f0: T,
    tau: T,
) -> Option<usize> {
    debug_assert!(tau > T::zero() && tau < T::one());
    let required = (T::one() - tau) * (f0 - f_star);
    trajectory
        .iter()
        .position(|best| best.is_some_and(|f| f0 - f >= required))
        .map(|i| i + 1)
}

/// Evaluations-to-solve for one solver across a common problem list;
/// `None` encodes an unsolved problem (w = infinity).
#[derive(Debug, Clone, PartialEq)]
pub struct SolverRuns {
    pub label: String,
    pub w: Vec<Option<usize>>,
}

/// Profile curves on a shared grid, one column per solver.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub grid: Vec<f64>,
    pub labels: Vec<String>,
    /// `curves[s][i]` is the profile of solver `s` at `grid[i]`.
    pub curves: Vec<Vec<f64>>,
}

impl ProfileTable {
    /// `value,label...` header then one row per grid point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "value,{}", self.labels.join(","))?;
        for (i, g) in self.grid.iter().enumerate() {
            let row: Vec<String> = self.curves.iter().map(|c| format!("{}", c[i])).collect();
            writeln!(w, "{},{}", g, row.join(","))?;
        }
        Ok(())
    }
}

/// Geometric grid from 1 to 32 with 64 steps, for performance profiles.
pub fn default_alpha_grid() -> Vec<f64> {
    let steps = 64;
    (0..=steps)
        .map(|i| 32f64.powf(i as f64 / steps as f64))
        .collect()
}

/// Linear grid from 0 to `beta_max` with 64 steps, for data profiles.
pub fn default_beta_grid(beta_max: f64) -> Vec<f64> {
    let steps = 64;
    (0..=steps)
        .map(|i| beta_max * i as f64 / steps as f64)
        .collect()
}

/// Performance profile: the fraction of problems solved within a factor
/// `alpha` of the best solver's evaluation count. Unsolved problems never
/// count; a problem no solver finishes counts for nobody.
pub fn performance_profile(solvers: &[SolverRuns], alpha_grid: &[f64]) -> ProfileTable {
    let n_problems = solvers.first().map_or(0, |s| s.w.len());
    assert!(solvers.iter().all(|s| s.w.len() == n_problems));

    let best_per_problem: Vec<Option<usize>> = (0..n_problems)
        .map(|p| solvers.iter().filter_map(|s| s.w[p]).min())
        .collect();
    let ratios: Vec<Vec<Option<f64>>> = solvers
        .iter()
        .map(|s| {
            (0..n_problems)
                .map(|p| match (s.w[p], best_per_problem[p]) {
                    (Some(w), Some(best)) => Some(w as f64 / best as f64),
                    _ => None,
                })
                .collect()
        })
        .collect();

    let curves = ratios
        .iter()
        .map(|per_problem| {
            alpha_grid
                .iter()
                .map(|&alpha| {
                    let solved = per_problem
                        .iter()
                        .filter(|nu| nu.is_some_and(|v| v <= alpha))
                        .count();
                    solved as f64 / n_problems as f64
                })
                .collect()
        })
        .collect();
    ProfileTable {
        grid: alpha_grid.to_vec(),
        labels: solvers.iter().map(|s| s.label.clone()).collect(),
        curves,
    }
}

/// Data profile: the fraction of problems solved within `beta` simplex
/// gradients, i.e. `w / (n_p + 1) <= beta`.
pub fn data_profile(
    solvers: &[SolverRuns],
    dimensions: &[usize],
    beta_grid: &[f64],
) -> ProfileTable {
    let n_problems = dimensions.len();
    assert!(solvers.iter().all(|s| s.w.len() == n_problems));
    let curves = solvers
        .iter()
        .map(|s| {
            beta_grid
                .iter()
                .map(|&beta| {
                    let solved = (0..n_problems)
                        .filter(|&p| {
                            s.w[p].is_some_and(|w| w as f64 / (dimensions[p] + 1) as f64 <= beta)
                        })
                        .count();
                    solved as f64 / n_problems as f64
                })
                .collect()
        })
        .collect();
    ProfileTable {
        grid: beta_grid.to_vec(),
        labels: solvers.iter().map(|s| s.label.clone()).collect(),
        curves,
    }
}

/// Summary of one trial inside an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub seed: u64,
    pub best: Option<f64>,
    pub evals_used: usize,
    pub termination: Termination,
    /// Best feasible objective after each evaluation.
    pub trajectory: Vec<Option<f64>>,
}

/// All trials of one problem under one scenario and config.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemResult {
    pub name: String,
    pub dimension: usize,
    pub f_star: Option<f64>,
    pub trials: Vec<TrialOutcome>,
}

impl ProblemResult {
    /// Number of trials that found a feasible point.
    pub fn n_s(&self) -> usize {
        self.trials.iter().filter(|t| t.best.is_some()).count()
    }

    /// Median of the best values over successful trials (mean of the two
    /// middles for even counts).
    pub fn median_best(&self) -> Option<f64> {
        let mut finals: Vec<f64> = self.trials.iter().filter_map(|t| t.best).collect();
        if finals.is_empty() {
            return None;
        }
        finals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let k = finals.len();
        Some(if k % 2 == 1 {
            finals[k / 2]
        } else {
            0.5 * (finals[k / 2 - 1] + finals[k / 2])
        })
    }

    /// The successful trial whose final value is the (lower) median,
    /// used to extract a representative trajectory.
    pub fn median_trial(&self) -> Option<&TrialOutcome> {
        let mut successful: Vec<&TrialOutcome> =
            self.trials.iter().filter(|t| t.best.is_some()).collect();
        if successful.is_empty() {
            return None;
        }
        successful.sort_by(|a, b| {
            a.best
                .partial_cmp(&b.best)
                .unwrap()
                .then(a.seed.cmp(&b.seed))
        });
        Some(successful[(successful.len() - 1) / 2])
    }

    /// Evaluations-to-solve at tolerance `tau` for the median trial.
    pub fn w_median_trial(&self, tau: f64) -> Option<usize> {
        let f_star = self.f_star?;
        let trial = self.median_trial()?;
        let f0 = trial.trajectory.iter().flatten().next().copied()?;
        solved_threshold(&trial.trajectory, f_star, f0, tau)
    }
}

/// Results of one experiment: a problem list under one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub scenario: Scenario,
    pub problems: Vec<ProblemResult>,
}

impl ExperimentResult {
    /// One solver's w vector over the experiment's problems at `tau`.
    pub fn solver_runs(&self, label: impl Into<String>, tau: f64) -> SolverRuns {
        SolverRuns {
            label: label.into(),
            w: self.problems.iter().map(|p| p.w_median_trial(tau)).collect(),
        }
    }

    pub fn dimensions(&self) -> Vec<usize> {
        self.problems.iter().map(|p| p.dimension).collect()
    }

    /// Pinned column set: problem, set, seed, Ns_flag, best_f, evals_used,
    /// termination, rel_error.
    pub fn write_results_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "problem,set,seed,Ns_flag,best_f,evals_used,termination,rel_error"
        )?;
        for problem in &self.problems {
            for trial in &problem.trials {
                let best = trial
                    .best
                    .map_or("NA".to_string(), |f| format!("{f}"));
                let rel = match (trial.best, problem.f_star) {
                    (Some(f), Some(star)) if star != 0.0 => {
                        format!("{}", ((f - star) / star).abs())
                    }
                    _ => "NA".to_string(),
                };
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    problem.name,
                    self.scenario.index(),
                    trial.seed,
                    u8::from(trial.best.is_some()),
                    best,
                    trial.evals_used,
                    trial.termination.label(),
                    rel
                )?;
            }
        }
        Ok(())
    }
}

/// Run `trials` independent solves (seeds 1..=trials) of each named
/// registry problem under `scenario`. `configure` builds the per-problem
/// config; the harness assigns the seed.
pub fn run_experiment<F>(
    names: &[&str],
    scenario: Scenario,
    trials: u64,
    configure: F,
) -> Result<ExperimentResult, RegistryError>
where
    F: Fn(&ProblemSpec<f64>) -> SolverConfig<f64> + Sync,
{
    let mut problems = Vec::with_capacity(names.len());
    for name in names {
        let entry = find_entry(name)?;
        let problem = get_problem(name, scenario)?;
        let base = configure(&problem);
        let outcomes: Vec<TrialOutcome> = (1..=trials)
            .into_par_iter()
            .map(|seed| {
                let config = base.clone().with_seed(seed);
                let record = solve(&problem, &config).expect("validated config");
                TrialOutcome {
                    seed,
                    best: record.best_objective(),
                    evals_used: record.evals_used,
                    termination: record.termination,
                    trajectory: record.trajectory(),
                }
            })
            .collect();
        problems.push(ProblemResult {
            name: entry.name.to_string(),
            dimension: entry.dimension,
            f_star: Some(entry.f_star),
            trials: outcomes,
        });
    }
    Ok(ExperimentResult {
        scenario,
        problems,
    })
}

/// One parsed row of a results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub problem: String,
    pub set: u8,
    pub seed: u64,
    pub feasible: bool,
    pub best_f: Option<f64>,
    pub evals_used: usize,
    pub termination: String,
    pub rel_error: Option<f64>,
}

/// Parse a results CSV produced by [`ExperimentResult::write_results_csv`].
pub fn read_results_csv<R: BufRead>(reader: R) -> Result<Vec<ResultRow>, BenchError> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| BenchError::MalformedRow(e.to_string()))?;
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(BenchError::MalformedRow(line.clone()));
        }
        let parse_opt = |s: &str| -> Option<f64> {
            (s != "NA").then(|| s.parse::<f64>().ok()).flatten()
        };
        rows.push(ResultRow {
            problem: fields[0].to_string(),
            set: fields[1].parse().map_err(|_| BenchError::MalformedRow(line.clone()))?,
            seed: fields[2].parse().map_err(|_| BenchError::MalformedRow(line.clone()))?,
            feasible: fields[3] == "1",
            best_f: parse_opt(fields[4]),
            evals_used: fields[5]
                .parse()
                .map_err(|_| BenchError::MalformedRow(line.clone()))?,
            termination: fields[6].to_string(),
            rel_error: parse_opt(fields[7]),
        });
    }
    Ok(rows)
}

/// Final-value w derivation used by the CLI when only a results CSV is
/// available: a problem counts as solved at `tau` iff the median-best
/// successful trial has `rel_error <= tau`; w is that trial's evaluation
/// count.
pub fn w_from_result_rows(rows: &[ResultRow], tau: f64) -> Vec<(String, usize, Option<usize>)> {
    let mut problems: Vec<String> = Vec::new();
    for row in rows {
        if !problems.contains(&row.problem) {
            problems.push(row.problem.clone());
        }
    }
    problems
        .into_iter()
        .map(|name| {
            let mut successful: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| r.problem == name && r.feasible && r.best_f.is_some())
                .collect();
            let dim = find_entry(&name).map(|e| e.dimension).unwrap_or(0);
            if successful.is_empty() {
                return (name, dim, None);
            }
            successful.sort_by(|a, b| {
                a.best_f
                    .partial_cmp(&b.best_f)
                    .unwrap()
                    .then(a.seed.cmp(&b.seed))
            });
            let median = successful[(successful.len() - 1) / 2];
            let w = match median.rel_error {
                Some(err) if err <= tau => Some(median.evals_used),
                _ => None,
            };
            (name, dim, w)
        })
        .collect()
}
