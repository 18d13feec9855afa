//! Data-driven control: LQR from input-state spectra, the FreePC and
//! DeePC receding-horizon schemes, and the dense convex solvers backing
//! them.

pub mod lqr;
pub mod predictive;
pub mod qp;
pub mod sdp;

pub use lqr::{dd_lqr, DdLqr, LqrDiagnostics, LqrWeights};
pub use predictive::{
    build_predictive_qp, equivalence_check, receding_horizon_run, ClosedLoopRun, EquivalenceReport, PastInit,
    Predictor, PredictiveProblem, RunSettings, VarLayout,
};
pub use qp::{qp_solve, KktResiduals, QpProblem, QpSolution};
pub use sdp::{sdp_solve, SdpProblem, SdpSolution};
