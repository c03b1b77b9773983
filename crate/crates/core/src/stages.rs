//! The three-stage solver loop: find a feasible point, spread feasible
//! points, then alternate exploitation and exploration of the surrogate
//! models under a single expensive-evaluation budget.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::archive::{Archive, ArchiveError, PointClass};
use crate::de::DeSettings;
use crate::knn::{g_c, GcParams};
use crate::problem::{BudgetedEvaluator, ProblemSpec, Scenario};
use crate::rbf::{fit_constraint_surrogate, fit_objective_surrogate, rank_ready, RbfModel};
use crate::real::Real;
use crate::sampling::{latin_hypercube, random_ball_point};
use crate::subproblems::{solve_p2, solve_p3, solve_p4_multistart, solve_p5, Bounds};

/// Full parameter set for one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    /// Expensive-evaluation budget, shared by all stages.
    pub t_max: usize,
    /// Latin hypercube batch size for initialization.
    pub t_lh: usize,
    pub gc: GcParams<T>,
    pub delta_r: T,
    pub delta_d: T,
    /// Feasible points targeted by the spread stage.
    pub eta_max: usize,
    /// Iteration cap for the spread stage.
    pub stage2_max_iters: usize,
    /// Stage-3 iterations before exploitation becomes possible.
    pub k_global: usize,
    /// Probability of an exploitation step once allowed.
    pub c_g: T,
    /// Exploration distance below which the run terminates.
    pub delta_min: T,
    pub de: DeSettings<T>,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("budget ordering violated: need t_max >= t_lh >= d+1 (t_max={t_max}, t_lh={t_lh}, d={d})")]
    BudgetOrdering { t_max: usize, t_lh: usize, d: usize },
    #[error("c_g must lie in [0, 1]")]
    InvalidCg,
    #[error("delta_min must be positive")]
    InvalidDeltaMin,
}

impl<T: Real> SolverConfig<T> {
    /// Paper defaults for a problem of dimension `d` under `scenario`:
    /// budget 15(d+1) for Set-1 and 30(d+1) otherwise, eta_max and
    /// K_Global d+1, C_g 0.5, delta_min 1e-5, (c1..c4) = (1,-1,-10,-100),
    /// delta_r 10, delta_d 100.
    pub fn defaults(d: usize, scenario: Scenario) -> Self {
        let multiplier = if scenario == Scenario::Set1 { 15 } else { 30 };
        SolverConfig {
            t_max: multiplier * (d + 1),
            t_lh: 2 * (d + 1),
            gc: GcParams::default_levels(),
            delta_r: T::of(10.0),
            delta_d: T::of(100.0),
            eta_max: d + 1,
            stage2_max_iters: 5 * (d + 1),
            k_global: d + 1,
            c_g: T::of(0.5),
            delta_min: T::of(1e-5),
            de: DeSettings::standard(),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self, d: usize) -> Result<(), ConfigError> {
        if !(self.t_max >= self.t_lh && self.t_lh >= d + 1) {
            return Err(ConfigError::BudgetOrdering {
                t_max: self.t_max,
                t_lh: self.t_lh,
                d,
            });
        }
        if self.c_g < T::zero() || self.c_g > T::one() {
            return Err(ConfigError::InvalidCg);
        }
        if !(self.delta_min > T::zero()) {
            return Err(ConfigError::InvalidDeltaMin);
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    BudgetExhausted,
    DeltaBelowMin,
    NoFeasibleFound,
}

impl Termination {
    pub fn label(self) -> &'static str {
        match self {
            Termination::BudgetExhausted => "budget_exhausted",
            Termination::DeltaBelowMin => "delta_below_min",
            Termination::NoFeasibleFound => "no_feasible_found",
        }
    }
}

/// One row per expensive evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalLogRow<T> {
    /// 1-based evaluation index.
    pub index: usize,
    /// Stage that requested the evaluation.
    pub stage: u8,
    /// Raw coordinates.
    pub x: Vec<T>,
    pub class: PointClass,
    pub objective: Option<T>,
    /// Best feasible objective seen so far (after this evaluation).
    pub best_feasible: Option<T>,
}

/// Complete account of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord<T> {
    pub problem: String,
    pub seed: u64,
    pub log: Vec<EvalLogRow<T>>,
    pub termination: Termination,
    pub best: Option<(Vec<T>, T)>,
    pub evals_used: usize,
    /// Evaluations consumed when stage 1 handed over.
    pub stage1_end: usize,
    /// Evaluations consumed when stage 2 handed over.
    pub stage2_end: usize,
}

impl<T: Real> TrialRecord<T> {
    pub fn best_objective(&self) -> Option<T> {
        self.best.as_ref().map(|(_, f)| *f)
    }

    /// Best-feasible objective after each evaluation, for profile
    /// computations.
    pub fn trajectory(&self) -> Vec<Option<T>> {
        self.log.iter().map(|row| row.best_feasible).collect()
    }

    /// One row per evaluation: index, stage, coordinates, class, objective,
    /// best feasible so far.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let d = self.log.first().map_or(0, |row| row.x.len());
        let coords: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
        writeln!(w, "index,stage,{},class,objective,best_feasible", coords.join(","))?;
        for row in &self.log {
            let xs: Vec<String> = row.x.iter().map(|v| format!("{}", v.as_f64())).collect();
            let objective = row
                .objective
                .map_or("NA".to_string(), |f| format!("{}", f.as_f64()));
            let best = row
                .best_feasible
                .map_or("NA".to_string(), |f| format!("{}", f.as_f64()));
            writeln!(
                w,
                "{},{},{},{},{},{}",
                row.index,
                row.stage,
                xs.join(","),
                row.class.letter(),
                objective,
                best
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let best = self
            .best_objective()
            .map_or("NA".to_string(), |f| format!("{:.6e}", f.as_f64()));
        format!(
            "problem={} seed={} best_f={} feasible={} evals={} termination={}",
            self.problem,
            self.seed,
            best,
            self.best.is_some(),
            self.evals_used,
            self.termination.label()
        )
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Outcome of the feasibility stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage1Status {
    FoundFeasible,
    Failed,
}

struct Run<'a, T: Real> {
    problem: &'a ProblemSpec<T>,
    config: &'a SolverConfig<T>,
    evaluator: BudgetedEvaluator<'a, T>,
    archive: Archive<T>,
    rng: ChaCha8Rng,
    log: Vec<EvalLogRow<T>>,
    stage: u8,
    unit_lower: Vec<T>,
    unit_upper: Vec<T>,
}

impl<'a, T: Real> Run<'a, T> {
    fn new(problem: &'a ProblemSpec<T>, config: &'a SolverConfig<T>) -> Self {
        let d = problem.dimension();
        Run {
            problem,
            config,
            evaluator: BudgetedEvaluator::new(problem, config.t_max),
            archive: Archive::for_problem(problem),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            log: Vec::with_capacity(config.t_max),
            stage: 1,
            unit_lower: vec![T::zero(); d],
            unit_upper: vec![T::one(); d],
        }
    }

    fn remaining(&self) -> usize {
        self.evaluator.remaining()
    }

    /// Evaluate a raw-coordinate candidate, record it, and classify it.
    fn evaluate_and_filter(&mut self, x: &[T]) -> PointClass {
        let x: Vec<T> = x
            .iter()
            .zip(self.problem.lower().iter().zip(self.problem.upper()))
            .map(|(&xi, (&l, &u))| xi.max(l).min(u))
            .collect();
        let outcome = self
            .evaluator
            .evaluate(&x)
            .expect("stages only evaluate in-bounds points within budget");
        let objective = outcome.objective;
        let class = match self.archive.filter_point(&x, outcome) {
            Ok(class) => class,
            Err(ArchiveError::Duplicate { existing }) => self.archive.points()[existing].class,
            Err(e) => unreachable!("outcome construction is consistent: {e}"),
        };
        self.log.push(EvalLogRow {
            index: self.evaluator.used(),
            stage: self.stage,
            x,
            class,
            objective,
            best_feasible: self.archive.best_feasible().map(|(_, f)| f),
        });
        class
    }

    /// Surrogates for every quantifiable constraint, in constraint order.
    /// `None` when any fit fails (rank not yet reached or singular system).
    fn fit_quantifiable(&self) -> Option<Vec<RbfModel<T>>> {
        let mut models = Vec::new();
        for (j, kind) in self.archive.kinds().iter().enumerate() {
            if kind.quantifiable() {
                match fit_constraint_surrogate(&self.archive, j) {
                    Ok(model) => models.push(model),
                    Err(_) => return None,
                }
            }
        }
        Some(models)
    }

    /// A fallback candidate near the latest feasible point (raw coords).
    fn ball_point(&mut self) -> Vec<T> {
        random_ball_point(
            &self.archive,
            self.problem.lower(),
            self.problem.upper(),
            self.config.delta_r,
            self.config.delta_d,
            &mut self.rng,
        )
        .expect("fallback point requires a feasible point")
    }

    fn found_feasible(&self) -> bool {
        self.archive.class_count(PointClass::F) > 0
    }

    /// Stage 1: Latin hypercube batches until the rank condition holds,
    /// then repeated feasibility subproblems; stops at the first feasible
    /// point or when the budget is gone.
    fn stage1(&mut self) -> Stage1Status {
        debug_assert!(self.archive.is_empty());
        self.stage = 1;

        while !rank_ready(&self.archive) && self.remaining() > 0 {
            let batch = self.config.t_lh.min(self.remaining());
            let points = latin_hypercube(
                self.problem.lower(),
                self.problem.upper(),
                batch,
                &mut self.rng,
            );
            for x in points {
                if self.evaluate_and_filter(&x) == PointClass::F {
                    return Stage1Status::FoundFeasible;
                }
            }
        }
        if self.found_feasible() {
            return Stage1Status::FoundFeasible;
        }

        while self.remaining() > 0 {
            let candidate = match self.fit_quantifiable() {
                Some(surrogates) => {
                    let gc_params = self.config.gc;
                    let archive = &self.archive;
                    let bounds = Bounds::new(&self.unit_lower, &self.unit_upper);
                    solve_p2(
                        archive,
                        &surrogates,
                        |x| g_c(archive, x, &gc_params),
                        bounds,
                        &self.config.de,
                        &mut self.rng,
                    )
                }
                None => None,
            };
            match candidate {
                Some(sol) => {
                    let x = self.problem.denormalize(&sol.x);
                    if self.evaluate_and_filter(&x) == PointClass::F {
                        return Stage1Status::FoundFeasible;
                    }
                }
                None => {
                    let count = (self.problem.dimension() + 1).min(self.remaining());
                    let points = latin_hypercube(
                        self.problem.lower(),
                        self.problem.upper(),
                        count,
                        &mut self.rng,
                    );
                    for x in points {
                        if self.evaluate_and_filter(&x) == PointClass::F {
                            return Stage1Status::FoundFeasible;
                        }
                    }
                }
            }
        }
        Stage1Status::Failed
    }

    /// Stage 2: spread feasible points by maximizing distance to the known
    /// ones, falling back to a random ball point when the spread subproblem
    /// produces nothing new. One expensive evaluation per iteration.
    fn stage2(&mut self) {
        debug_assert!(self.found_feasible());
        self.stage = 2;
        let mut iters = 0;
        while self.archive.class_count(PointClass::F) < self.config.eta_max
            && self.remaining() > 0
            && iters < self.config.stage2_max_iters
        {
            let spread = match self.fit_quantifiable() {
                Some(surrogates) => {
                    let gc_params = self.config.gc;
                    let archive = &self.archive;
                    let bounds = Bounds::new(&self.unit_lower, &self.unit_upper);
                    let (x, delta) = solve_p3(
                        archive,
                        &surrogates,
                        |z| g_c(archive, z, &gc_params),
                        bounds,
                        &self.config.de,
                        &mut self.rng,
                    );
                    (delta > T::zero()).then(|| self.problem.denormalize(&x))
                }
                None => None,
            };
            let candidate = spread.unwrap_or_else(|| self.ball_point());
            self.evaluate_and_filter(&candidate);
            iters += 1;
        }
    }

    /// Stage 3: each iteration refits all surrogates, solves the
    /// exploitation subproblem, and either evaluates its best fresh
    /// solution or explores at distance `delta`; terminates when the
    /// achievable exploration distance falls below `delta_min`.
    fn stage3(&mut self) -> Termination {
        debug_assert!(self.found_feasible());
        self.stage = 3;
        let delta_fallback = self.problem.delta_lu().min(T::one());
        let mut iter = 0usize;
        while self.remaining() > 0 {
            enum Plan<T> {
                Point(Vec<T>),
                BallFallback,
                Stop,
            }
            let plan = match (fit_objective_surrogate(&self.archive), self.fit_quantifiable()) {
                (Ok(objective), Some(surrogates)) => {
                    let gc_params = self.config.gc;
                    let archive = &self.archive;
                    let bounds = Bounds::new(&self.unit_lower, &self.unit_upper);
                    let de = &self.config.de;
                    let rng = &mut self.rng;
                    let gc_fn = |z: &[T]| g_c(archive, z, &gc_params);
                    let pool = solve_p4_multistart(
                        &objective,
                        &surrogates,
                        &gc_fn,
                        bounds,
                        de,
                        de.n_starts(archive.dimension()),
                        rng,
                    );
                    let fresh = pool
                        .iter()
                        .find(|sol| !archive.contains_normalized(&sol.x))
                        .map(|sol| sol.x.clone());
                    let t = T::of(rng.gen::<f64>());
                    let exploit =
                        fresh.is_some() && iter > self.config.k_global && t < self.config.c_g;
                    if let (true, Some(x)) = (exploit, fresh) {
                        Plan::Point(x)
                    } else {
                        let (_, mut delta) = solve_p3(archive, &surrogates, &gc_fn, bounds, de, rng);
                        if delta == T::zero() {
                            delta = delta_fallback;
                        }
                        if delta < self.config.delta_min {
                            Plan::Stop
                        } else {
                            match solve_p5(
                                &objective,
                                &surrogates,
                                &gc_fn,
                                bounds,
                                delta,
                                archive,
                                de,
                                rng,
                            ) {
                                Some(sol) => Plan::Point(sol.x),
                                None => Plan::BallFallback,
                            }
                        }
                    }
                }
                // Not enough geometry for the fits yet: enrich near the
                // feasible region and retry next iteration.
                _ => Plan::BallFallback,
            };
            match plan {
                Plan::Stop => return Termination::DeltaBelowMin,
                Plan::Point(z) => {
                    let x = self.problem.denormalize(&z);
                    self.evaluate_and_filter(&x);
                }
                Plan::BallFallback => {
                    let x = self.ball_point();
                    self.evaluate_and_filter(&x);
                }
            }
            iter += 1;
        }
        Termination::BudgetExhausted
    }

    fn into_record(self, termination: Termination, stage1_end: usize, stage2_end: usize) -> TrialRecord<T> {
        TrialRecord {
            problem: self.problem.name().to_string(),
            seed: self.config.seed,
            termination,
            best: self
                .archive
                .best_feasible()
                .map(|(x, f)| (x.to_vec(), f)),
            evals_used: self.evaluator.used(),
            stage1_end,
            stage2_end,
            log: self.log,
        }
    }
}

/// Public wrapper around stage 1 for callers driving stages manually.
pub fn stage1_find_feasible<T: Real>(
    problem: &ProblemSpec<T>,
    config: &SolverConfig<T>,
) -> Result<(Stage1Status, TrialRecord<T>), SolveError> {
    config.validate(problem.dimension())?;
    let mut run = Run::new(problem, config);
    let status = run.stage1();
    let used = run.evaluator.used();
    let termination = match status {
        Stage1Status::FoundFeasible => Termination::BudgetExhausted,
        Stage1Status::Failed => Termination::NoFeasibleFound,
    };
    Ok((status, run.into_record(termination, used, used)))
}

/// Run the full three-stage solver.
pub fn solve<T: Real>(
    problem: &ProblemSpec<T>,
    config: &SolverConfig<T>,
) -> Result<TrialRecord<T>, SolveError> {
    solve_with_archive(problem, config).map(|(record, _)| record)
}

/// [`solve`], additionally returning the final evaluation archive.
pub fn solve_with_archive<T: Real>(
    problem: &ProblemSpec<T>,
    config: &SolverConfig<T>,
) -> Result<(TrialRecord<T>, Archive<T>), SolveError> {
    config.validate(problem.dimension())?;
    let mut run = Run::new(problem, config);

    let status = run.stage1();
    let stage1_end = run.evaluator.used();
    if status == Stage1Status::Failed {
        let archive = run.archive.clone();
        return Ok((
            run.into_record(Termination::NoFeasibleFound, stage1_end, stage1_end),
            archive,
        ));
    }

    run.stage2();
    let stage2_end = run.evaluator.used();

    let termination = run.stage3();
    let archive = run.archive.clone();
    Ok((run.into_record(termination, stage1_end, stage2_end), archive))
}
