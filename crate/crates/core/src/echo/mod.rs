//! Plasma-echo analysis: chain products, kernel sums and the two-mode
//! echo experiment.

pub mod chain;
pub mod experiment;
pub mod kernel_sum;

pub use chain::{
    calibrate_log_bound, chain_report, growth_envelope, log_psi, max_chain_product, min_chain_cap, psi, psi_argmax,
    psi_max, regime_log_bound, threshold_exponent, EchoRegimeReport, Regime,
};
pub use experiment::{echo_experiment, EchoConfig, EchoReport};
pub use kernel_sum::{
    kernel_integral, kernel_kl, kernel_sum_at, kernel_sum_scaling, kernel_supremum, KernelScalingReport,
    KernelSumOptions, KernelSupremum,
};
