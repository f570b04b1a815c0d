use crate::error::{domain, require_positive, Result};

/// Periodic Ramsey sequence: `m_count` windows of length `t_r`, one every
/// `t_cyc`, with control phase `phi_r` and contrast `decoherence_factor`
/// (`e^{-t_R/T_2}`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSchedule {
    t_r: f64,
    t_cyc: f64,
    m_count: usize,
    phi_r: f64,
    decoherence_factor: f64,
}

impl MeasurementSchedule {
    pub fn new(t_r: f64, t_cyc: f64, m_count: usize, phi_r: f64, decoherence_factor: f64) -> Result<Self> {
        require_positive("t_r", t_r)?;
        require_positive("t_cyc", t_cyc)?;
        if t_r > t_cyc {
            return Err(domain("t_cyc", format!("must be >= t_r ({t_r}), got {t_cyc}")));
        }
        if m_count == 0 {
            return Err(domain("m_count", "must be >= 1"));
        }
        if !phi_r.is_finite() {
            return Err(domain("phi_r", format!("must be finite, got {phi_r}")));
        }
        if !(0.0..=1.0).contains(&decoherence_factor) {
            return Err(domain(
                "decoherence_factor",
                format!("must lie in [0, 1], got {decoherence_factor}"),
            ));
        }
        Ok(Self {
            t_r,
            t_cyc,
            m_count,
            phi_r,
            decoherence_factor,
        })
    }

    /// Schedule in `t_R = 1` units with unit contrast.
    pub fn unit(t_cyc: f64, m_count: usize, phi_r: f64) -> Result<Self> {
        Self::new(1.0, t_cyc, m_count, phi_r, 1.0)
    }

    /// Contrast from a `T_2` time.
    pub fn decoherence_from_t2(t_r: f64, t2: f64) -> f64 {
        (-t_r / t2).exp()
    }

    pub fn with_m(mut self, m_count: usize) -> Result<Self> {
        if m_count == 0 {
            return Err(domain("m_count", "must be >= 1"));
        }
        self.m_count = m_count;
        Ok(self)
    }

    pub fn with_phi(mut self, phi_r: f64) -> Self {
        self.phi_r = phi_r;
        self
    }

    pub fn t_r(&self) -> f64 {
        self.t_r
    }

    pub fn t_cyc(&self) -> f64 {
        self.t_cyc
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn phi_r(&self) -> f64 {
        self.phi_r
    }

    pub fn decoherence_factor(&self) -> f64 {
        self.decoherence_factor
    }

    /// Length of the interval covered by all windows.
    pub fn span(&self) -> f64 {
        (self.m_count - 1) as f64 * self.t_cyc + self.t_r
    }

    /// Probability of outcome `1` given the noise phase `theta`.
    pub fn outcome_probability(&self, theta: f64) -> f64 {
        (0.5 * (1.0 + self.decoherence_factor * (self.phi_r + theta).cos())).clamp(0.0, 1.0)
    }
}

pub fn outcome_probability(theta: f64, schedule: &MeasurementSchedule) -> f64 {
    schedule.outcome_probability(theta)
}
