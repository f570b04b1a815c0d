use rand::Rng;

use super::SpectrumSample;
use crate::error::{require_finite, require_positive, Result};

/// A two-level fluctuator coupled dispersively to the qubit.
///
/// State `0` shifts the qubit frequency by `+v_coupling`, state `1` by
/// `-v_coupling`. `w01` is the `0 -> 1` rate and `w10` the `1 -> 0` rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlsParams {
    v_coupling: f64,
    w01: f64,
    w10: f64,
}

impl TlsParams {
    pub fn new(v_coupling: f64, w01: f64, w10: f64) -> Result<Self> {
        Ok(Self {
            v_coupling: require_finite("v_coupling", v_coupling)?,
            w01: require_positive("w01", w01)?,
            w10: require_positive("w10", w10)?,
        })
    }

    /// Symmetric fluctuator with total relaxation rate `w_total`.
    pub fn symmetric(v_coupling: f64, w_total: f64) -> Result<Self> {
        require_positive("w_total", w_total)?;
        Self::new(v_coupling, 0.5 * w_total, 0.5 * w_total)
    }

    pub fn v_coupling(&self) -> f64 {
        self.v_coupling
    }

    pub fn w01(&self) -> f64 {
        self.w01
    }

    pub fn w10(&self) -> f64 {
        self.w10
    }

    /// Relaxation rate `W = W01 + W10`.
    pub fn relaxation_rate(&self) -> f64 {
        self.w01 + self.w10
    }

    /// Stationary occupations `(w0, w1)`.
    pub fn occupations(&self) -> (f64, f64) {
        let w = self.relaxation_rate();
        (self.w10 / w, self.w01 / w)
    }

    /// Asymmetry weight `2 sqrt(W01 W10) / W`, in `(0, 1]`.
    pub fn weight(&self) -> f64 {
        2.0 * (self.w01 * self.w10).sqrt() / self.relaxation_rate()
    }

    /// `W10 - W01`.
    pub fn rate_difference(&self) -> f64 {
        self.w10 - self.w01
    }

    /// Exit rate of `state`.
    pub fn exit_rate(&self, state: u8) -> f64 {
        if state == 0 {
            self.w01
        } else {
            self.w10
        }
    }

    /// Frequency shift in `state`: `V (-1)^state`.
    pub fn shift(&self, state: u8) -> f64 {
        if state == 0 {
            self.v_coupling
        } else {
            -self.v_coupling
        }
    }
}

/// Ordered set of non-interacting fluctuators. Order fixes the draw order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TlsEnsemble {
    pub tls_list: Vec<TlsParams>,
}

impl TlsEnsemble {
    pub fn new(tls_list: Vec<TlsParams>) -> Self {
        Self { tls_list }
    }

    /// `n_tls` identical symmetric fluctuators sharing `v` with given total rates.
    pub fn symmetric(v: f64, rates: &[f64]) -> Result<Self> {
        rates
            .iter()
            .map(|&w| TlsParams::symmetric(v, w))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.tls_list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tls_list.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TlsParams> {
        self.tls_list.iter()
    }

    pub fn min_rate(&self) -> Option<f64> {
        self.iter().map(TlsParams::relaxation_rate).reduce(f64::min)
    }

    pub fn max_rate(&self) -> Option<f64> {
        self.iter().map(TlsParams::relaxation_rate).reduce(f64::max)
    }
}

pub fn stationary_occupations(tls: &TlsParams) -> (f64, f64) {
    tls.occupations()
}

/// Draws a state from the stationary distribution with one uniform draw.
pub fn sample_initial_state<R: Rng + ?Sized>(tls: &TlsParams, rng: &mut R) -> u8 {
    let (w0, _) = tls.occupations();
    let u: f64 = rng.random();
    if u < w0 {
        0
    } else {
        1
    }
}

/// Telegraph-noise spectrum `2 sum (w V)^2 W / (W^2 + omega^2)`.
pub fn tls_power_spectrum(ensemble: &TlsEnsemble, omega: f64) -> SpectrumSample {
    let s_value = ensemble
        .iter()
        .map(|t| {
            let a = t.weight() * t.v_coupling();
            let w = t.relaxation_rate();
            2.0 * a * a * w / (w * w + omega * omega)
        })
        .sum();
    SpectrumSample { omega, s_value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::series_stream;

    #[test]
    fn occupations_follow_rates() {
        let t = TlsParams::new(0.2, 0.5, 0.5).unwrap();
        assert_eq!(t.occupations(), (0.5, 0.5));
        let t = TlsParams::new(0.2, 0.00025, 0.00075).unwrap();
        let (w0, w1) = t.occupations();
        assert!((w0 - 0.75).abs() < 1e-15 && (w1 - 0.25).abs() < 1e-15);
        let t = TlsParams::new(0.2, 1.0, 3.0).unwrap();
        assert_eq!(t.occupations(), (0.75, 0.25));
        assert_eq!(w0 + w1, 1.0);
    }

    #[test]
    fn weight_is_one_only_for_symmetric() {
        assert_eq!(TlsParams::new(1.0, 2.0, 2.0).unwrap().weight(), 1.0);
        let w = TlsParams::new(1.0, 0.00025, 0.00075).unwrap().weight();
        assert!((w - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_rates() {
        assert!(TlsParams::new(0.2, 0.0, 1.0).is_err());
        assert!(TlsParams::new(0.2, 1.0, -1.0).is_err());
        assert!(TlsParams::new(0.2, f64::NAN, 1.0).is_err());
        assert!(TlsParams::new(f64::INFINITY, 1.0, 1.0).is_err());
    }

    #[test]
    fn initial_state_is_stationary() {
        for (w01, w10, expect) in [(0.5, 0.5, 0.5), (0.25, 0.75, 0.75)] {
            let t = TlsParams::new(0.2, w01, w10).unwrap();
            let mut rng = series_stream(11, 0);
            let n = 1_000_000;
            let zeros = (0..n).filter(|_| sample_initial_state(&t, &mut rng) == 0).count();
            let frac = zeros as f64 / n as f64;
            assert!((frac - expect).abs() < 3e-3, "{frac}");
        }
    }

    #[test]
    fn spectrum_values_for_single_symmetric_tls() {
        let e = TlsEnsemble::symmetric(0.3, &[0.7]).unwrap();
        let s0 = tls_power_spectrum(&e, 0.0).s_value;
        assert!((s0 - 2.0 * 0.09 / 0.7).abs() < 1e-15);
        let sw = tls_power_spectrum(&e, 0.7).s_value;
        assert!((sw - 0.09 / 0.7).abs() < 1e-15);
        assert_eq!(sw, tls_power_spectrum(&e, -0.7).s_value);
    }
}
