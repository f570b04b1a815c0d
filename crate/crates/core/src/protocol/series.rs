use rand::Rng;

use super::MeasurementSchedule;
use crate::error::Result;
use crate::noise::{
    sample_initial_state, simulate_telegraph, GaussianBackend, GaussianNoiseModel, GaussianPhaseSampler,
    TlsEnsemble,
};

/// Noise acting on the qubit frequency.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSource {
    None,
    Tls(TlsEnsemble),
    Gaussian(GaussianNoiseModel),
}

impl NoiseSource {
    pub fn label(&self) -> &'static str {
        match self {
            NoiseSource::None => "none",
            NoiseSource::Tls(_) => "tls",
            NoiseSource::Gaussian(_) => "gaussian",
        }
    }
}

/// Outcomes `x_k` of one series of `M` measurements, with the phases that
/// produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSeries {
    pub bits: Vec<u8>,
    pub phases: Option<Vec<f64>>,
}

impl OutcomeSeries {
    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

/// A noise source bound to a schedule, with any per-schedule precomputation
/// (the Gaussian factorization) done once.
#[derive(Debug, Clone)]
pub struct SeriesSimulator<'a> {
    source: &'a NoiseSource,
    schedule: MeasurementSchedule,
    sampler: Option<GaussianPhaseSampler>,
}

impl<'a> SeriesSimulator<'a> {
    pub fn new(source: &'a NoiseSource, schedule: MeasurementSchedule, backend: GaussianBackend) -> Result<Self> {
        let sampler = match source {
            NoiseSource::Gaussian(model) => Some(GaussianPhaseSampler::new(model, &schedule, backend)?),
            _ => None,
        };
        Ok(Self {
            source,
            schedule,
            sampler,
        })
    }

    pub fn schedule(&self) -> &MeasurementSchedule {
        &self.schedule
    }

    /// Overwrites `out` (length `M`) with one stationary realization of the
    /// window phases.
    pub fn phases_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        out.iter_mut().for_each(|t| *t = 0.0);
        let s = &self.schedule;
        match self.source {
            NoiseSource::None => {}
            NoiseSource::Tls(ensemble) => {
                let span = s.span();
                for tls in ensemble.iter() {
                    let state = sample_initial_state(tls, rng);
                    let traj = simulate_telegraph(tls, span, state, rng);
                    traj.accumulate_window_phases(tls.v_coupling(), s.t_r(), s.t_cyc(), out);
                }
            }
            NoiseSource::Gaussian(_) => {
                if let Some(sampler) = &self.sampler {
                    sampler.sample_into(rng, out);
                }
            }
        }
    }

    /// Draws the measurement outcomes for given phases into a packed bit
    /// buffer (bit `k % 64` of word `k / 64`) and returns the number of ones.
    /// One uniform per measurement, in order.
    pub fn measure_packed<R: Rng + ?Sized>(&self, rng: &mut R, phases: &[f64], words: &mut Vec<u64>) -> u64 {
        words.clear();
        words.resize(phases.len().div_ceil(64), 0);
        let mut ones = 0u64;
        let mut last_theta = f64::NAN;
        let mut p = 0.0;
        for (k, &theta) in phases.iter().enumerate() {
            if theta != last_theta {
                p = self.schedule.outcome_probability(theta);
                last_theta = theta;
            }
            let u: f64 = rng.random();
            if u < p {
                words[k / 64] |= 1u64 << (k % 64);
                ones += 1;
            }
        }
        ones
    }

    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> OutcomeSeries {
        let m = self.schedule.m_count();
        let mut phases = vec![0.0; m];
        self.phases_into(rng, &mut phases);
        let mut words = Vec::new();
        self.measure_packed(rng, &phases, &mut words);
        let bits = (0..m).map(|k| ((words[k / 64] >> (k % 64)) & 1) as u8).collect();
        OutcomeSeries {
            bits,
            phases: Some(phases),
        }
    }
}

/// Simulates one series. Noise draws come first, then the `M` measurement
/// draws, all from `rng`.
pub fn run_series<R: Rng + ?Sized>(
    source: &NoiseSource,
    schedule: &MeasurementSchedule,
    rng: &mut R,
) -> Result<OutcomeSeries> {
    Ok(SeriesSimulator::new(source, *schedule, GaussianBackend::Auto)?.run(rng))
}
