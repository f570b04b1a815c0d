//! Qubit-frequency noise sources and their second-order statistics.
//!
//! All rates and times are dimensionless multiples of the Ramsey time
//! (`t_R = 1`).

mod gaussian;
mod sampler;
mod telegraph;
mod tls;

pub use gaussian::{f0_approx, gaussian_power_spectrum, F0Approx, GaussianNoiseModel, LorentzianComponent, DEFAULT_COMPONENTS, DEFAULT_OMEGA_MAX};
pub use sampler::{sample_gaussian_phases, GaussianBackend, GaussianPhaseSampler, TOEPLITZ_MAX_M};
pub use telegraph::{simulate_telegraph, TelegraphTrajectory};
pub(crate) use gaussian::component_phase_covariance;
pub use tls::{sample_initial_state, stationary_occupations, tls_power_spectrum, TlsEnsemble, TlsParams};

/// One point of a power spectral density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    pub omega: f64,
    pub s_value: f64,
}
