//! Semantic Mutation Score harness.
//!
//! Measures how well metamorphic-relation sets detect semantic faults in
//! twelve scientific-computing kernels: mutant catalogue, relation catalogue,
//! verification pipeline, adequacy engine (equivalence, kills, SMS), likely
//! root-cause attribution, the statistics suite and the SMS-to-MS
//! degeneration check.

pub mod adequacy;
pub mod avp;
pub mod degeneration;
pub mod error;
pub mod kernels;
pub mod lrca;
pub mod mr;
pub mod mutation;
pub mod numeric;
pub mod rng;
pub mod sentinel;
pub mod stats;

pub use error::{HarnessError, Result};
pub use kernels::{evaluate_put, evaluate_trajectory, list_puts, Domain, Model, Program, PutClass, PutDescriptor, PutId};
pub use mr::{density, mr_catalog, mrs_for, primary_mp, CellDensity, MetaPattern, MrInstance};
pub use avp::{avp_verify, check_tolerance_equality, convergence_order, dtw_distance, wilcoxon_signed_rank, AvpVerdict, Verdict};
pub use mutation::{catalog as mutation_catalog, l0_prescreen, syntactic_mutants, MutantKind, MutantRecord, OperatorClass, Prescreen, SemanticityFlags};
