//! Finite-dimensional quantum information toolkit built around the
//! ancilla model of measurement.
//!
//! The crate covers four layers:
//!
//! - operator algebra and states: [`Operator`], [`DensityOperator`],
//!   [`MultipartiteState`] with labeled subsystem layouts, [`Ensemble`];
//! - entropy functionals in bits: von Neumann and Shannon entropies,
//!   mutual and conditional mutual entropies, Venn-diagram decompositions;
//! - measurement: projective families and POVMs, the measurement unitary
//!   U_QA, post-measurement states, ancilla dephasing, Neumark dilation,
//!   and sequential chains;
//! - bounds: the Holevo quantity χ, inequality verifiers with signed
//!   margins, and a derivative-free optimizer lower-bounding the
//!   accessible information.
//!
//! Randomized verification sweeps live in [`sweeps`]; with the default
//! `parallel` feature they fan out over rayon while staying deterministic
//! per seed.

pub mod bounds;
pub mod entropy;
pub mod error;
pub mod exec;
pub mod measurement;
pub mod operator;
pub mod random;
pub mod state;
pub mod sweeps;

pub use bounds::{
    chi_range, general_inequality, holevo_chi, optimize_accessible_info, verify_kholevo,
    BoundReport, InequalityCheck, MeasurementInput, OptimizerConfig,
};
pub use entropy::{
    binary_entropy, conditional_mutual, diagonal_mutual_shannon, mutual, shannon, subset_entropy,
    venn2, venn3, von_neumann, ProbabilityVector, VennDiagram2, VennDiagram3,
};
pub use error::{QError, Result};
pub use measurement::{
    apply_measurement, build_u_qa, decohere_ancilla, extracted_info, extracted_info_povm,
    neumark_dilate, outcome_table, reduce_xa, residual_info, sequential_measure, ChainResult,
    NeumarkDilation, OutcomeTable, Povm, ProjectiveMeasurement,
};
pub use operator::Operator;
pub use state::{
    assemble_xq, validate_density, DensityOperator, Ensemble, MultipartiteState, SubsystemLayout,
};
