pub mod assign;
pub mod ecc_sweep;
pub mod link_metrics;
pub mod oracle_check;
