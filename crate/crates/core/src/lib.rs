//! Simulator and verification workbench for the random greedy triangle
//! removal process on `K_n`.
//!
//! The process repeatedly deletes the three edges of a uniformly random
//! triangle until none is left. [`process`] runs it on a dynamic graph
//! ([`dyngraph`]) with an exact proportional sampler ([`sampler`]);
//! [`trajectory`] holds the deterministic scales, exact one-step drifts and
//! snapshot records; [`ladders`], [`extgraph`] and [`homcount`] cover the
//! ladder combinatorics and rooted copy counts; [`harness`] runs seeded
//! ensembles and writes their output.

pub mod dyngraph;
pub mod error;
pub mod extgraph;
pub mod harness;
pub mod homcount;
pub mod ladders;
pub mod process;
pub mod rng;
pub mod sampler;
pub mod trajectory;

pub use dyngraph::{choose2, choose3, Graph};
pub use error::{Error, Result};
pub use extgraph::{ExtensionGraph, Scaling, Threshold};
pub use harness::{fit_exponent, run_experiment, ExperimentConfig, Fit, SeedSpec};
pub use homcount::{concentration_audit, psi, psi_ladder, x_variable, AuditConfig, AuditReport};
pub use ladders::{build_ladder, enumerate_bm, EdgeClass, Ladder, LadderWord, Symbol};
pub use process::{run, ProcessState, RunConfig, RunResult, StepOutcome, SurvivorStats};
pub use rng::{derive_seed, RunRng, Stream};
pub use sampler::{draw_uniform_triangle, WeightedSampler};
pub use trajectory::{Scales, Snapshot, SnapshotPolicy, StoppingConfig, StoppingFlags};
