//! Monte Carlo simulation and closed-form analytics for periodically
//! repeated Ramsey measurements of a qubit whose frequency is modulated by
//! slow telegraph noise (two-level fluctuators) or Gaussian `1/f`-type noise.
//!
//! * [`noise`]: noise sources, exact trajectories and their spectra.
//! * [`protocol`]: the measurement sequence, ensembles and empirical statistics.
//! * [`analytics`]: static-limit distributions, weak-coupling correlators,
//!   the variance law and an exact dynamic-programming oracle.
//!
//! Every time and rate is measured in units of the Ramsey time `t_R`.

pub mod analytics;
pub mod error;
pub mod noise;
pub mod numeric;
pub mod peaks;
pub mod protocol;
pub mod rng;

pub use error::{Error, Result};
