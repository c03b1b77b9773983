//! Problem definitions: the constraint taxonomy, bound boxes, the single
//! entry point for expensive evaluations, and the Set-1..4 relabeling
//! scenarios.

use std::sync::Arc;

use thiserror::Error;

use crate::real::Real;

/// Feasibility tolerance on raw constraint values: `g(x) >= -FEASIBILITY_TOL`
/// counts as satisfied.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Constraint taxonomy: Quantifiable/Nonquantifiable, Relaxable/Unrelaxable,
/// Simulation, Known/Hidden.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    /// Quantifiable, relaxable, simulation, known.
    Qrsk,
    /// Nonquantifiable, relaxable, simulation, known.
    Nrsk,
    /// Quantifiable, unrelaxable, simulation, known.
    Qusk,
    /// Nonquantifiable, unrelaxable, simulation, known.
    Nusk,
    /// Nonquantifiable, unrelaxable, simulation, hidden.
    Nush,
}

impl ConstraintKind {
    /// The violation magnitude is observable.
    pub fn quantifiable(self) -> bool {
        matches!(self, ConstraintKind::Qrsk | ConstraintKind::Qusk)
    }

    /// The simulation output stays meaningful under violation.
    pub fn relaxable(self) -> bool {
        matches!(self, ConstraintKind::Qrsk | ConstraintKind::Nrsk)
    }

    /// Violation is only observable as a simulation failure.
    pub fn hidden(self) -> bool {
        matches!(self, ConstraintKind::Nush)
    }
}

/// Constraint relabeling scenarios used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Every constraint QRSK.
    Set1,
    /// First constraint NRSK, rest QRSK.
    Set2,
    /// First constraint QUSK, rest QRSK.
    Set3,
    /// First constraint NUSK, rest QRSK.
    Set4,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Set1, Scenario::Set2, Scenario::Set3, Scenario::Set4];

    pub fn index(self) -> u8 {
        match self {
            Scenario::Set1 => 1,
            Scenario::Set2 => 2,
            Scenario::Set3 => 3,
            Scenario::Set4 => 4,
        }
    }

    pub fn from_index(index: u8) -> Option<Scenario> {
        match index {
            1 => Some(Scenario::Set1),
            2 => Some(Scenario::Set2),
            3 => Some(Scenario::Set3),
            4 => Some(Scenario::Set4),
            _ => None,
        }
    }

    /// Kind assigned to the first constraint under this scenario.
    fn first_kind(self) -> ConstraintKind {
        match self {
            Scenario::Set1 => ConstraintKind::Qrsk,
            Scenario::Set2 => ConstraintKind::Nrsk,
            Scenario::Set3 => ConstraintKind::Qusk,
            Scenario::Set4 => ConstraintKind::Nusk,
        }
    }
}

/// Raw simulation output before taxonomy exposure is applied.
#[derive(Debug, Clone)]
pub struct RawEvaluation<T> {
    pub objective: T,
    pub constraints: Vec<T>,
    /// The simulation itself failed (external FAIL token). Hidden-constraint
    /// violations of analytic problems are derived from kinds instead.
    pub crashed: bool,
}

/// Backend that computes objective and all constraint values in one call.
pub trait RawEvaluate<T>: Send + Sync {
    fn eval(&self, x: &[T]) -> RawEvaluation<T>;
}

type ObjectiveFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
type ConstraintFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

struct AnalyticOracle<T> {
    objective: ObjectiveFn<T>,
    constraints: Vec<ConstraintFn<T>>,
}

impl<T: Real> RawEvaluate<T> for AnalyticOracle<T> {
    fn eval(&self, x: &[T]) -> RawEvaluation<T> {
        RawEvaluation {
            objective: (self.objective)(x),
            constraints: self.constraints.iter().map(|g| g(x)).collect(),
            crashed: false,
        }
    }
}

/// An optimization problem: bounds, taxonomy-tagged constraints, and the
/// expensive oracle behind them.
#[derive(Clone)]
pub struct ProblemSpec<T: Real> {
    name: String,
    lower: Vec<T>,
    upper: Vec<T>,
    kinds: Vec<ConstraintKind>,
    oracle: Arc<dyn RawEvaluate<T>>,
    known_optimum: Option<T>,
    known_optimizer: Option<Vec<T>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ProblemError {
    #[error("bounds must be finite with lower < upper in every dimension (dimension {0})")]
    InvalidBounds(usize),
    #[error("problem must have at least one dimension")]
    EmptyDomain,
    #[error("scenario {scenario:?} needs at least two constraints, problem `{name}` has {m}")]
    TooFewConstraints {
        name: String,
        scenario: Scenario,
        m: usize,
    },
}

impl<T: Real> ProblemSpec<T> {
    /// Builder over per-function closures.
    pub fn builder(name: impl Into<String>, lower: Vec<T>, upper: Vec<T>) -> ProblemBuilder<T> {
        ProblemBuilder {
            name: name.into(),
            lower,
            upper,
            objective: None,
            constraints: Vec::new(),
            known_optimum: None,
            known_optimizer: None,
        }
    }

    /// Problem backed by an arbitrary oracle (e.g. an external subprocess).
    pub fn from_oracle(
        name: impl Into<String>,
        lower: Vec<T>,
        upper: Vec<T>,
        kinds: Vec<ConstraintKind>,
        oracle: Arc<dyn RawEvaluate<T>>,
    ) -> Result<Self, ProblemError> {
        let spec = ProblemSpec {
            name: name.into(),
            lower,
            upper,
            kinds,
            oracle,
            known_optimum: None,
            known_optimizer: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), ProblemError> {
        if self.lower.is_empty() {
            return Err(ProblemError::EmptyDomain);
        }
        for (i, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !l.is_finite() || !u.is_finite() || !(u - l > T::zero()) {
                return Err(ProblemError::InvalidBounds(i));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn kinds(&self) -> &[ConstraintKind] {
        &self.kinds
    }

    pub fn constraint_count(&self) -> usize {
        self.kinds.len()
    }

    /// Count of quantifiable constraints (m' in the subproblem formulations).
    pub fn quantifiable_count(&self) -> usize {
        self.kinds.iter().filter(|k| k.quantifiable()).count()
    }

    pub fn known_optimum(&self) -> Option<T> {
        self.known_optimum
    }

    pub fn known_optimizer(&self) -> Option<&[T]> {
        self.known_optimizer.as_deref()
    }

    /// Minimum box width, `delta_lu` (raw units).
    pub fn delta_lu(&self) -> T {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| (u - l).abs())
            .fold(T::infinity(), T::min)
    }

    /// Map a raw point into the unit box.
    pub fn normalize(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&xi, (&l, &u))| (xi - l) / (u - l))
            .collect()
    }

    /// Map a unit-box point back into raw coordinates.
    pub fn denormalize(&self, z: &[T]) -> Vec<T> {
        z.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&zi, (&l, &u))| l + zi * (u - l))
            .collect()
    }

    /// Same problem with constraint kinds reassigned per `scenario`.
    /// Evaluators are unchanged; only the exposure of values changes.
    pub fn relabel(&self, scenario: Scenario) -> Result<ProblemSpec<T>, ProblemError> {
        if scenario != Scenario::Set1 && self.kinds.len() < 2 {
            return Err(ProblemError::TooFewConstraints {
                name: self.name.clone(),
                scenario,
                m: self.kinds.len(),
            });
        }
        let mut kinds = vec![ConstraintKind::Qrsk; self.kinds.len()];
        if !kinds.is_empty() {
            kinds[0] = scenario.first_kind();
        }
        Ok(ProblemSpec {
            kinds,
            ..self.clone()
        })
    }

    fn raw_eval(&self, x: &[T]) -> RawEvaluation<T> {
        self.oracle.eval(x)
    }
}

impl<T: Real> std::fmt::Debug for ProblemSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("dimension", &self.dimension())
            .field("kinds", &self.kinds)
            .finish()
    }
}

pub struct ProblemBuilder<T: Real> {
    name: String,
    lower: Vec<T>,
    upper: Vec<T>,
    objective: Option<ObjectiveFn<T>>,
    constraints: Vec<(ConstraintKind, ConstraintFn<T>)>,
    known_optimum: Option<T>,
    known_optimizer: Option<Vec<T>>,
}

impl<T: Real> ProblemBuilder<T> {
    pub fn objective(mut self, f: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        self.objective = Some(Arc::new(f));
        self
    }

    pub fn constraint(
        mut self,
        kind: ConstraintKind,
        g: impl Fn(&[T]) -> T + Send + Sync + 'static,
    ) -> Self {
        self.constraints.push((kind, Arc::new(g)));
        self
    }

    pub fn known_optimum(mut self, f_star: T) -> Self {
        self.known_optimum = Some(f_star);
        self
    }

    pub fn known_optimizer(mut self, x_star: Vec<T>) -> Self {
        self.known_optimizer = Some(x_star);
        self
    }

    pub fn build(self) -> Result<ProblemSpec<T>, ProblemError> {
        let (kinds, constraints): (Vec<_>, Vec<_>) = self.constraints.into_iter().unzip();
        let spec = ProblemSpec {
            name: self.name,
            lower: self.lower,
            upper: self.upper,
            kinds,
            oracle: Arc::new(AnalyticOracle {
                objective: self.objective.expect("objective required"),
                constraints,
            }),
            known_optimum: self.known_optimum,
            known_optimizer: self.known_optimizer,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// What a single constraint reveals after one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstraintOutcome<T> {
    /// Quantifiable (QRSK/QUSK): the raw value.
    Value(T),
    /// Nonquantifiable known (NRSK/NUSK): pass/fail only.
    Flag(bool),
    /// Hidden (NUSH), or anything behind a crashed simulation.
    Hidden,
}

impl<T: Real> ConstraintOutcome<T> {
    /// Violation under the taxonomy, where observable.
    pub fn violated(&self) -> bool {
        match self {
            ConstraintOutcome::Value(v) => *v < -T::of(FEASIBILITY_TOL),
            ConstraintOutcome::Flag(pass) => !pass,
            ConstraintOutcome::Hidden => false,
        }
    }
}

/// Result of one expensive evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationOutcome<T> {
    /// `None` when any unrelaxable constraint is violated (the simulation
    /// output is not meaningful there).
    pub objective: Option<T>,
    /// One entry per constraint, in problem order.
    pub constraints: Vec<ConstraintOutcome<T>>,
    /// The simulation crashed (a hidden constraint was violated).
    pub hidden_failure: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("x[{index}] = {value} outside [{lower}, {upper}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("evaluation budget of {budget} exhausted")]
    BudgetExhausted { budget: usize },
}

/// The only gateway to expensive evaluations: owns the per-run counter so
/// the budget cannot be bypassed.
pub struct BudgetedEvaluator<'a, T: Real> {
    problem: &'a ProblemSpec<T>,
    used: usize,
    budget: usize,
}

impl<'a, T: Real> BudgetedEvaluator<'a, T> {
    pub fn new(problem: &'a ProblemSpec<T>, budget: usize) -> Self {
        BudgetedEvaluator {
            problem,
            used: 0,
            budget,
        }
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.used
    }

    /// Run the expensive simulation at `x` and expose results per the
    /// constraint taxonomy. Exactly one evaluation is recorded.
    pub fn evaluate(&mut self, x: &[T]) -> Result<EvaluationOutcome<T>, EvalError> {
        if self.used >= self.budget {
            return Err(EvalError::BudgetExhausted {
                budget: self.budget,
            });
        }
        let problem = self.problem;
        for (i, &xi) in x.iter().enumerate() {
            if xi < problem.lower[i] || xi > problem.upper[i] {
                return Err(EvalError::OutOfBounds {
                    index: i,
                    value: xi.as_f64(),
                    lower: problem.lower[i].as_f64(),
                    upper: problem.upper[i].as_f64(),
                });
            }
        }
        self.used += 1;

        let raw = problem.raw_eval(x);
        let tol = T::of(FEASIBILITY_TOL);
        let violated_raw =
            |j: usize| -> bool { raw.constraints.get(j).is_some_and(|&v| v < -tol) };

        let crashed = raw.crashed
            || problem
                .kinds
                .iter()
                .enumerate()
                .any(|(j, k)| k.hidden() && violated_raw(j));

        if crashed {
            return Ok(EvaluationOutcome {
                objective: None,
                constraints: vec![ConstraintOutcome::Hidden; problem.kinds.len()],
                hidden_failure: true,
            });
        }

        let mut unrelaxable_violated = false;
        let constraints: Vec<ConstraintOutcome<T>> = problem
            .kinds
            .iter()
            .enumerate()
            .map(|(j, kind)| {
                let violated = violated_raw(j);
                if violated && !kind.relaxable() {
                    unrelaxable_violated = true;
                }
                match kind {
                    ConstraintKind::Qrsk | ConstraintKind::Qusk => {
                        ConstraintOutcome::Value(raw.constraints[j])
                    }
                    ConstraintKind::Nrsk | ConstraintKind::Nusk => {
                        ConstraintOutcome::Flag(!violated)
                    }
                    ConstraintKind::Nush => ConstraintOutcome::Hidden,
                }
            })
            .collect();

        Ok(EvaluationOutcome {
            objective: (!unrelaxable_violated).then_some(raw.objective),
            constraints,
            hidden_failure: false,
        })
    }
}
