//! Independent verification engines for `chiplink`.
//!
//! * [`hp`]: exact rational binomial tails and ~130-digit frame-failure references.
//! * [`checker`]: assignment constraint checker built from raw problem data.
//! * [`brute`]: exhaustive enumeration over small assignment instances.
//! * [`monte_carlo`]: bit-level frame simulation under i.i.d. errors.

use thiserror::Error;

pub mod brute;
pub mod checker;
pub mod hp;
pub mod instances;
pub mod monte_carlo;

pub use brute::brute_force_assign;
pub use checker::Checker;
pub use hp::{hp_binom_tail, hp_block_fail, hp_frame_fail, hp_post_fec_ber, hp_symbol_error, rel_error, BigFloat};
pub use instances::random_instance;
pub use monte_carlo::{simulate_frames, SimStats};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{name} = {value} is outside [0, 1]")]
    Domain { name: &'static str, value: f64 },
    #[error("value {0} is not finite")]
    NotFinite(f64),
    #[error("instance too large for enumeration: {nets} nets x {links} links (limit 10 x 6)")]
    TooLarge { nets: usize, links: usize },
}
