//! Color-balanced independent and dominating sets on vertex-colored
//! interval graphs.
//!
//! * [`dp`] and [`vc`]: exact f-BIS, parameterized by `(f, k)` and by the
//!   vertex cover number.
//! * [`mcis`]: greedy 2-approximation and b-local search for 1-MCIS.
//! * [`bds`]: exact f-BDS by enumeration and canonical 1-BDS rewriting.
//! * [`reductions`]: 3SAT variants to 1-BIS / 1-BDS instance generators.
//! * [`oracle`]: naive exhaustive solvers used as ground truth.

pub mod bds;
pub mod bench;
pub mod cli;
pub mod dp;
pub mod error;
pub mod gen;
pub mod mcis;
pub mod model;
pub mod oracle;
pub mod reductions;
pub mod vc;

pub use error::SolveError;
pub use model::{
    intersects, parse_instance, verify_solution, Instance, Interval, ProblemKind, SolutionSet,
    SortedView, Verdict,
};
