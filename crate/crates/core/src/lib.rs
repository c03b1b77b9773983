//! Global optimization with RBF surrogates for constrained derivative-free
//! problems.
//!
//! The solver targets expensive black-box problems of the form
//!
//! ```text
//!   minimize f(x)   s.t.  g_j(x) >= 0,  x in [l, u]
//! ```
//!
//! where objective and constraints come from one simulation call and
//! constraints may be quantifiable or not, relaxable or not, and hidden
//! (observable only as a simulation crash). It proceeds in three stages
//! under a single evaluation budget: find a first feasible point, spread
//! feasible points for better surrogate coverage, then alternate between
//! exploiting the objective surrogate's minimizer and exploring far from
//! known feasible points. Cubic radial basis function interpolants model
//! the objective and every quantifiable constraint; a nearest-neighbor
//! classification constraint steers the search away from regions where
//! nonquantifiable constraints fail.
//!
//! # Quick start
//!
//! ```
//! use gsdo::problem::Scenario;
//! use gsdo::stages::{solve, SolverConfig};
//! use gsdo::testbed::get_problem;
//!
//! let problem = get_problem("G24", Scenario::Set1).unwrap();
//! let config = SolverConfig::defaults(problem.dimension(), Scenario::Set1).with_seed(7);
//! let record = solve(&problem, &config).unwrap();
//! println!("{}", record.summary());
//! assert!(record.best_objective().is_some());
//! ```
//!
//! All numerical code is generic over the scalar type (`f32`/`f64`) via
//! [`real::Real`]; the aliases below pin the `f64` instantiations used by
//! the test problems and the command-line tools.

pub mod archive;
pub mod bench;
pub mod de;
pub mod external;
pub mod knn;
pub mod linalg;
pub mod problem;
pub mod rbf;
pub mod real;
pub mod sampling;
pub mod stages;
pub mod subproblems;
pub mod testbed;

pub use archive::{Archive, PointClass};
pub use problem::{ConstraintKind, ProblemSpec, Scenario};
pub use stages::{solve, SolverConfig, Termination, TrialRecord};

/// `f64` instantiations of the main types.
pub type Problem64 = problem::ProblemSpec<f64>;
pub type Archive64 = archive::Archive<f64>;
pub type RbfModel64 = rbf::RbfModel<f64>;
pub type GcParams64 = knn::GcParams<f64>;
pub type DeSettings64 = de::DeSettings<f64>;
pub type SolverConfig64 = stages::SolverConfig<f64>;
pub type TrialRecord64 = stages::TrialRecord<f64>;
