//! Greedy rank-one matrix learning for smooth convex objectives.
//!
//! Each iteration takes the leading singular pair of the loss gradient,
//! appends it to the factors `U`, `V` of `A = U V^T`, and refits the small
//! core `B` in `U B V^T` against the loss restricted to the current span.
//!
//! ```
//! use geco::{CompletionObjective, GecoConfig, geco_run, noop_observer};
//! use geco::data::synth_low_rank;
//!
//! let inst = synth_low_rank(20, 15, &[4.0, 1.0], 0.0, 1.0, 7).unwrap();
//! let objective = CompletionObjective::new(inst.observations.clone());
//! let (a, trace) = geco_run(&objective, GecoConfig::plain(2), &mut noop_observer()).unwrap();
//! assert_eq!(a.k(), 2);
//! assert!(trace.final_objective().unwrap() < 1e-8);
//! ```

// negated float comparisons are used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod data;
pub mod error;
pub mod geco;
pub mod linalg;
pub mod objective;
pub mod report;
pub mod solver;
pub mod verify;

pub use crate::error::{GecoError, Result};
pub use crate::geco::{
    geco_run, noop_observer, numerical_rank, select_direction, DirectionSource, GecoConfig,
    GecoRun, IterationRecord, RunTrace,
};
pub use crate::linalg::{
    approx_sv, thin_svd, DenseMatrix, LinearOperator, SingularPair, SparseMatrix, Vector,
};
pub use crate::objective::{
    frobenius_regularized, CompletionObjective, FactoredMatrix, GradientOperator, HuberObjective,
    HuberTarget, Observation, ObservationSet, SmoothObjective,
};
pub use crate::solver::{SolverMethod, SolverOptions};
