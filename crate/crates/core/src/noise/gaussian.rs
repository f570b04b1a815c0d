use std::f64::consts::PI;

use super::SpectrumSample;
use crate::error::{domain, require_positive, Result};
use crate::numeric::{exp_neg_minus_one_plus, EULER_GAMMA};

/// Default number of Lorentzian components.
pub const DEFAULT_COMPONENTS: usize = 64;
/// Default upper cutoff of the component rates, in units of `1/t_R`.
pub const DEFAULT_OMEGA_MAX: f64 = 1.0e3;

/// One Ornstein–Uhlenbeck component: autocovariance `variance * e^{-rate |t|}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianComponent {
    pub rate: f64,
    pub variance: f64,
}

/// Gaussian `1/f`-type noise with spectrum
/// `(2D/pi) * integral_{omega_min}^{inf} dW / (W^2 + omega^2)`,
/// represented by a finite sum of Lorentzians on `[omega_min, omega_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNoiseModel {
    intensity_d: f64,
    omega_min: f64,
    omega_max: f64,
    components: Vec<LorentzianComponent>,
}

impl GaussianNoiseModel {
    /// Log-spaced discretization: component `j` sits at `W_j` and carries
    /// variance `(D/pi) dW_j / W_j`, where `dW_j` is the width of its bin
    /// (bin edges at geometric midpoints, clamped to the cutoffs).
    pub fn build(intensity_d: f64, omega_min: f64, omega_max: f64, n_components: usize) -> Result<Self> {
        validate_bounds(intensity_d, omega_min, omega_max)?;
        if n_components < 2 {
            return Err(domain("n_components", format!("must be >= 2, got {n_components}")));
        }
        let (lo, hi) = (omega_min.ln(), omega_max.ln());
        let step = (hi - lo) / (n_components - 1) as f64;
        let log_rates: Vec<f64> = (0..n_components).map(|j| lo + step * j as f64).collect();
        let mut edges = Vec::with_capacity(n_components + 1);
        edges.push(omega_min);
        edges.extend(log_rates.windows(2).map(|w| (0.5 * (w[0] + w[1])).exp()));
        edges.push(omega_max);
        let components = log_rates
            .iter()
            .enumerate()
            .map(|(j, &lw)| {
                let rate = if j == 0 {
                    omega_min
                } else if j == n_components - 1 {
                    omega_max
                } else {
                    lw.exp()
                };
                LorentzianComponent {
                    rate,
                    variance: intensity_d / PI * (edges[j + 1] - edges[j]) / rate,
                }
            })
            .collect();
        Ok(Self {
            intensity_d,
            omega_min,
            omega_max,
            components,
        })
    }

    /// Default build: [`DEFAULT_COMPONENTS`] components up to [`DEFAULT_OMEGA_MAX`].
    pub fn with_defaults(intensity_d: f64, omega_min: f64) -> Result<Self> {
        Self::build(intensity_d, omega_min, DEFAULT_OMEGA_MAX, DEFAULT_COMPONENTS)
    }

    /// Model from explicit components. Rates must be strictly increasing in
    /// `[omega_min, omega_max]`.
    pub fn from_components(
        intensity_d: f64,
        omega_min: f64,
        omega_max: f64,
        components: Vec<LorentzianComponent>,
    ) -> Result<Self> {
        validate_bounds(intensity_d, omega_min, omega_max)?;
        if components.is_empty() {
            return Err(domain("components", "at least one component required"));
        }
        let increasing = components.windows(2).all(|w| w[0].rate < w[1].rate);
        let inside = components
            .iter()
            .all(|c| c.rate >= omega_min && c.rate <= omega_max && c.variance >= 0.0 && c.variance.is_finite());
        if !increasing || !inside {
            return Err(domain(
                "components",
                "rates must be strictly increasing within [omega_min, omega_max] with finite variances >= 0",
            ));
        }
        Ok(Self {
            intensity_d,
            omega_min,
            omega_max,
            components,
        })
    }

    pub fn intensity_d(&self) -> f64 {
        self.intensity_d
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn components(&self) -> &[LorentzianComponent] {
        &self.components
    }

    /// `<delta omega^2>` of the discretized model.
    pub fn total_variance(&self) -> f64 {
        self.components.iter().map(|c| c.variance).sum()
    }

    /// Closed-form spectrum with the cutoff at infinity.
    pub fn power_spectrum(&self, omega: f64) -> SpectrumSample {
        let w = omega.abs();
        let d = self.intensity_d;
        let s_value = if w == 0.0 {
            2.0 * d / (PI * self.omega_min)
        } else {
            // pi/2 - atan(omega_min/omega) == atan(omega/omega_min) for omega > 0
            2.0 * d / (PI * w) * (w / self.omega_min).atan()
        };
        SpectrumSample { omega, s_value }
    }

    /// Closed-form spectrum of the rates actually represented, `[omega_min, omega_max]`.
    pub fn band_limited_spectrum(&self, omega: f64) -> f64 {
        let w = omega.abs();
        let d = self.intensity_d;
        if w == 0.0 {
            2.0 * d / PI * (1.0 / self.omega_min - 1.0 / self.omega_max)
        } else {
            2.0 * d / (PI * w) * ((self.omega_max / w).atan() - (self.omega_min / w).atan())
        }
    }

    /// Spectrum of the component sum, `sum 2 c_j W_j / (W_j^2 + omega^2)`.
    pub fn component_spectrum(&self, omega: f64) -> f64 {
        self.components
            .iter()
            .map(|c| 2.0 * c.variance * c.rate / (c.rate * c.rate + omega * omega))
            .sum()
    }

    /// `f_k = <theta_n theta_{n+k}>` for Ramsey windows of length `t_r`
    /// repeated with period `t_cyc`.
    pub fn phase_autocovariance(&self, t_r: f64, t_cyc: f64, k: usize) -> f64 {
        self.components
            .iter()
            .map(|c| component_phase_covariance(c, t_r, t_cyc, k))
            .sum()
    }

    /// `f_0, ..., f_{k_max}`.
    pub fn phase_autocovariances(&self, t_r: f64, t_cyc: f64, k_max: usize) -> Vec<f64> {
        (0..=k_max).map(|k| self.phase_autocovariance(t_r, t_cyc, k)).collect()
    }
}

fn validate_bounds(intensity_d: f64, omega_min: f64, omega_max: f64) -> Result<()> {
    if !(intensity_d.is_finite() && intensity_d >= 0.0) {
        return Err(domain("intensity_d", format!("must be finite and >= 0, got {intensity_d}")));
    }
    require_positive("omega_min", omega_min)?;
    require_positive("omega_max", omega_max)?;
    if omega_min >= omega_max {
        return Err(domain(
            "omega_max",
            format!("must exceed omega_min ({omega_min}), got {omega_max}"),
        ));
    }
    Ok(())
}

/// Double integral of `c e^{-W|t - t' + k t_cyc|}` over two windows.
pub(crate) fn component_phase_covariance(c: &LorentzianComponent, t_r: f64, t_cyc: f64, k: usize) -> f64 {
    let w = c.rate;
    let x = w * t_r;
    if k == 0 {
        2.0 * c.variance * t_r * t_r * exp_neg_minus_one_plus(x) / (x * x)
    } else {
        // 4 c e^{-W k t_cyc} sinh^2(x/2) / W^2, written to stay finite for large x
        let shape = (-x).exp_m1() / w;
        c.variance * (x - w * k as f64 * t_cyc).exp() * shape * shape
    }
}

/// Gaussian-spectrum closed form evaluated at one frequency.
pub fn gaussian_power_spectrum(model: &GaussianNoiseModel, omega: f64) -> SpectrumSample {
    model.power_spectrum(omega)
}

/// Small-cutoff expansion of `f_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F0Approx {
    pub value: f64,
    /// `omega_min * t_r < 0.1`; outside this range the expansion is unreliable.
    pub within_validity: bool,
}

/// `f_0 ~ (D t_R^2 / pi) (3/2 - gamma_E + |ln(omega_min t_R)|)`.
pub fn f0_approx(intensity_d: f64, omega_min: f64, t_r: f64) -> F0Approx {
    let x = omega_min * t_r;
    F0Approx {
        value: intensity_d * t_r * t_r / PI * (1.5 - EULER_GAMMA + x.ln().abs()),
        within_validity: x < 0.1,
    }
}
