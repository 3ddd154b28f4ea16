//! ECC-aware die-to-die link characterization and link-technology assignment.
//!
//! The analytical core ([`ecc_model`], [`ecc_cost`]) is generic over the
//! floating-point type through [`scalar::Real`]; the aliases below pin the
//! common `f64` instantiation. The link library and the assignment optimizer
//! are data-driven and work in `f64`.

pub mod assignment;
pub mod ecc_cost;
pub mod ecc_model;
pub mod error;
pub mod link_library;
pub mod scalar;

pub use ecc_cost::{
    ecc_stack_cost, energy_per_payload_bit, gbn_window, rs_decoder_energy, BlockKind, EccStack, GbnWindow,
    SynthRecord, SynthTable,
};
pub use ecc_model::{
    analyze, block_fail_prob, default_family, fec_only_analysis, frame_fail_budget, frame_fail_prob,
    hybrid_failure_analysis, post_fec_ber, rs_family, select_code, symbol_error_prob, FrameConfig, ProtectionMode,
    RetryLimit, RsCode,
};
pub use error::{AssignError, CostError, EccError, LibraryError};
pub use link_library::{correct_link, fom, load_link_library, CorrectedMetrics, LinkKind, LinkRecord, MetricsKind};
pub use scalar::Real;

pub type Targets = ecc_model::ReliabilityTargets<f64>;
pub type Report = ecc_model::ReliabilityReport<f64>;
pub type CostSummary = ecc_cost::EccCostSummary<f64>;
pub type Scaling = ecc_cost::NodeScaling<f64>;
pub type CostParams = ecc_cost::CostParams<f64>;

pub type TargetsF32 = ecc_model::ReliabilityTargets<f32>;
pub type ReportF32 = ecc_model::ReliabilityReport<f32>;
