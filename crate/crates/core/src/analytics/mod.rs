//! Closed-form and semi-analytic predictions for `rho(m|M)` and the outcome
//! correlators.

mod correlators;
mod distribution;
mod dp;
mod static_limit;

pub use correlators::{
    ergodic_asymptote, r1_weak_coupling, r2_gaussian, r2_phi_r_zero, r2_weak_coupling, variance_prediction,
    AnalyticCorrelator, CorrelatorSeries, ExpTerm, VariancePrediction,
};
pub use distribution::{binomial_distribution, DistributionVector};
pub use dp::{dp_oracle_single_tls, DP_MAX_M, DP_MAX_WTR};
pub use static_limit::{
    enumerate_static_phases, gaussian_static_distribution, single_asymmetric_static, static_distribution,
    symmetric_static_distribution, StaticPhaseTable, MAX_ENUMERATED_TLS,
};
