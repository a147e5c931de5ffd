//! Exact and Monte Carlo CHSH evaluation for a pair of rod-connected rolling
//! prisms, with parameters for indeterminism (`epsilon`) and non-locality
//! (`rho`).
//!
//! * [`model`]: parameters, preparations, experiments and the face layout.
//! * [`analytic`]: exact joint distributions, correlations and CHSH values.
//! * [`montecarlo`]: mechanistic sampler and reproducible estimation.
//! * [`oracle`]: local-strategy enumeration and exact branch enumeration.
//! * [`sweep`]: grid sweeps and monotonicity probes.
//! * [`gof`]: chi-square goodness of fit for sampled frequencies.

pub mod analytic;
pub mod error;
pub mod gof;
pub mod model;
pub mod montecarlo;
pub mod oracle;
pub mod rng;
pub mod sweep;

pub use analytic::{
    chsh, chsh_closed_form, chsh_decomposition, expectation_value, joint_distribution, singlet_reference, ChshValue,
    Decomposition, ExpectationTable, JointDistribution,
};
pub use error::{ModelError, Result};
pub use model::{
    build_face_layout, outcome_at_orientation, validate_params, Coincidence, ExperimentKind, Face, FaceLayout,
    JointOutcome, ModelParams, Preparation, Regime, SingleExperiment,
};
pub use montecarlo::{estimate, estimate_with, EstimateReport, Workers};
pub use oracle::{branch_enumerate, lhv_max_chsh, BranchEnumeration, LhvCertificate, LocalStrategy};
pub use sweep::{
    monotonicity_probe, run_sweep, run_sweep_with_workers, Axis, Monotonicity, SweepMode, SweepRow, SweepSpec,
};
