//! Exact samplers for the window phases `theta_k` of Gaussian noise.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{GaussianNoiseModel, LorentzianComponent};
use crate::error::{Error, Result};
use crate::protocol::MeasurementSchedule;

/// Largest `M` handled by the dense Toeplitz factorization in `Auto` mode.
pub const TOEPLITZ_MAX_M: usize = 4096;

const JITTER_STEPS: [f64; 5] = [0.0, 1e-12, 1e-11, 1e-10, 1e-9];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GaussianBackend {
    /// Toeplitz for `M <= TOEPLITZ_MAX_M`, components otherwise.
    #[default]
    Auto,
    /// Cholesky factor of the `M x M` covariance `f_{|i-j|}`.
    Toeplitz,
    /// Joint propagation of every Ornstein–Uhlenbeck component and its
    /// window integral.
    Components,
}

#[derive(Debug, Clone)]
enum Engine {
    Zero,
    Toeplitz { lower: DMatrix<f64> },
    Components { steps: Vec<ComponentStep> },
}

/// Pre-factored sampler for one (model, schedule) pair. Cheap to share
/// between workers.
#[derive(Debug, Clone)]
pub struct GaussianPhaseSampler {
    m: usize,
    engine: Engine,
    jitter: f64,
}

impl GaussianPhaseSampler {
    pub fn new(model: &GaussianNoiseModel, schedule: &MeasurementSchedule, backend: GaussianBackend) -> Result<Self> {
        let m = schedule.m_count();
        let f0 = model.phase_autocovariance(schedule.t_r(), schedule.t_cyc(), 0);
        if f0 == 0.0 {
            return Ok(Self {
                m,
                engine: Engine::Zero,
                jitter: 0.0,
            });
        }
        let backend = match backend {
            GaussianBackend::Auto if m <= TOEPLITZ_MAX_M => GaussianBackend::Toeplitz,
            GaussianBackend::Auto => GaussianBackend::Components,
            b => b,
        };
        match backend {
            GaussianBackend::Toeplitz => {
                let f = model.phase_autocovariances(schedule.t_r(), schedule.t_cyc(), m - 1);
                let (lower, jitter) = factor_toeplitz(&f)?;
                Ok(Self {
                    m,
                    engine: Engine::Toeplitz { lower },
                    jitter,
                })
            }
            _ => {
                let steps = model
                    .components()
                    .iter()
                    .filter(|c| c.variance > 0.0)
                    .map(|c| ComponentStep::new(c, schedule.t_r(), schedule.t_cyc()))
                    .collect();
                Ok(Self {
                    m,
                    engine: Engine::Components { steps },
                    jitter: 0.0,
                })
            }
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Diagonal jitter (absolute) that was needed for the factorization.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        self.sample_into(rng, &mut out);
        out
    }

    /// Adds one realization of `theta_0..theta_{M-1}` into `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.m);
        match &self.engine {
            Engine::Zero => {}
            Engine::Toeplitz { lower } => {
                let m = self.m;
                let data = lower.as_slice();
                for j in 0..m {
                    let z: f64 = rng.sample(StandardNormal);
                    let col = &data[j * m..(j + 1) * m];
                    for i in j..m {
                        out[i] += col[i] * z;
                    }
                }
            }
            Engine::Components { steps } => {
                let mut state: Vec<f64> = steps
                    .iter()
                    .map(|s| s.stationary_sd * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                for o in out.iter_mut() {
                    let mut theta = 0.0;
                    for (x, s) in state.iter_mut().zip(steps) {
                        let z1: f64 = rng.sample(StandardNormal);
                        let z2: f64 = rng.sample(StandardNormal);
                        theta += s.int_from_x * *x + s.int_from_z1 * z1 + s.int_from_z2 * z2;
                        *x = s.cycle_decay * *x + s.x_from_z1 * z1;
                    }
                    *o += theta;
                }
            }
        }
    }
}

/// Convenience wrapper: builds a sampler with `Auto` backend and draws once.
pub fn sample_gaussian_phases<R: Rng + ?Sized>(
    model: &GaussianNoiseModel,
    schedule: &MeasurementSchedule,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(GaussianPhaseSampler::new(model, schedule, GaussianBackend::Auto)?.sample(rng))
}

fn factor_toeplitz(f: &[f64]) -> Result<(DMatrix<f64>, f64)> {
    let m = f.len();
    let f0 = f[0];
    let base = DMatrix::from_fn(m, m, |i, j| f[i.abs_diff(j)]);
    for rel in JITTER_STEPS {
        let jitter = rel * f0;
        let mut cov = base.clone();
        for i in 0..m {
            cov[(i, i)] += jitter;
        }
        if let Some(chol) = cov.cholesky() {
            return Ok((chol.unpack(), jitter));
        }
    }
    Err(Error::Model(format!(
        "phase covariance ({m} x {m}) not positive definite even with jitter 1e-9 * f0"
    )))
}

/// Exact one-cycle transition of an OU component `X` with
/// `<X(t)X(0)> = c e^{-W|t|}`: given `X` at a window start, draws the window
/// integral `I` and `X` at the next window start from their joint law.
#[derive(Debug, Clone)]
struct ComponentStep {
    stationary_sd: f64,
    cycle_decay: f64,
    x_from_z1: f64,
    int_from_x: f64,
    int_from_z1: f64,
    int_from_z2: f64,
}

impl ComponentStep {
    fn new(c: &LorentzianComponent, t_r: f64, t_cyc: f64) -> Self {
        let (w, var) = (c.rate, c.variance);
        let x = w * t_r;
        let one_minus = -(-x).exp_m1();
        let var_next = var * -(-2.0 * w * t_cyc).exp_m1();
        let cov = var / w * one_minus * one_minus * (-w * (t_cyc - t_r)).exp();
        let var_i = var * t_r * t_r * integral_variance_shape(x);
        let sd_next = var_next.sqrt();
        let int_from_z1 = if sd_next > 0.0 { cov / sd_next } else { 0.0 };
        Self {
            stationary_sd: var.sqrt(),
            cycle_decay: (-w * t_cyc).exp(),
            x_from_z1: sd_next,
            int_from_x: one_minus / w,
            int_from_z1,
            int_from_z2: (var_i - int_from_z1 * int_from_z1).max(0.0).sqrt(),
        }
    }
}

/// `(2x - 3 + 4e^{-x} - e^{-2x}) / x^2`, the conditional variance of the
/// window integral in units of `c h^2`.
fn integral_variance_shape(x: f64) -> f64 {
    if x < 1e-2 {
        x * (2.0 / 3.0 + x * (-0.5 + x * (7.0 / 30.0 + x * (-1.0 / 12.0 + x * 31.0 / 1260.0))))
    } else {
        (2.0 * x - 3.0 + 4.0 * (-x).exp() - (-2.0 * x).exp()) / (x * x)
    }
}
