use rayon::prelude::*;

use super::{CorrelatorAccumulator, MeasurementSchedule, NoiseSource, OutcomeHistogram, SeriesSimulator};
use crate::error::{Error, Result};
use crate::noise::GaussianBackend;
use crate::rng::series_stream;

/// Series per parallel task. Results do not depend on it.
pub const DEFAULT_CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOptions {
    pub backend: GaussianBackend,
    /// Lags at which to accumulate `r2(k)`; empty skips the correlators.
    pub lags: Vec<usize>,
    pub chunk_size: usize,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            backend: GaussianBackend::Auto,
            lags: Vec::new(),
            chunk_size: DEFAULT_CHUNK,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub histogram: OutcomeHistogram,
    pub correlators: Option<CorrelatorAccumulator>,
}

/// Histogram of `n_series` independent series. Series `i` uses the stream
/// `(master_seed, i)`, so the result is identical for any thread count.
pub fn run_ensemble(
    source: &NoiseSource,
    schedule: &MeasurementSchedule,
    n_series: usize,
    master_seed: u64,
) -> Result<OutcomeHistogram> {
    Ok(run_ensemble_with(source, schedule, n_series, master_seed, &EnsembleOptions::default())?.histogram)
}

/// [`run_ensemble`] with a Gaussian backend choice and optional correlators.
/// Runs on the current rayon pool.
pub fn run_ensemble_with(
    source: &NoiseSource,
    schedule: &MeasurementSchedule,
    n_series: usize,
    master_seed: u64,
    options: &EnsembleOptions,
) -> Result<EnsembleResult> {
    if n_series == 0 {
        return Err(Error::Domain {
            name: "n_series",
            reason: "must be >= 1".into(),
        });
    }
    let m = schedule.m_count();
    let sim = SeriesSimulator::new(source, *schedule, options.backend)?;
    let chunk = options.chunk_size.max(1);
    let n_chunks = n_series.div_ceil(chunk);
    let with_corr = !options.lags.is_empty();
    let template = if with_corr {
        Some(CorrelatorAccumulator::new(m, options.lags.clone())?)
    } else {
        None
    };

    let partials: Vec<(OutcomeHistogram, Option<CorrelatorAccumulator>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut hist = OutcomeHistogram::empty(*schedule);
            let mut corr = template.clone();
            let mut phases = vec![0.0; m];
            let mut words = Vec::with_capacity(m.div_ceil(64));
            let lo = c * chunk;
            let hi = (lo + chunk).min(n_series);
            for i in lo..hi {
                let mut rng = series_stream(master_seed, i as u64);
                sim.phases_into(&mut rng, &mut phases);
                let ones = sim.measure_packed(&mut rng, &phases, &mut words);
                hist.record(ones as usize);
                if let Some(acc) = corr.as_mut() {
                    acc.add_packed(&words);
                }
            }
            (hist, corr)
        })
        .collect();

    let mut histogram = OutcomeHistogram::empty(*schedule);
    let mut correlators = template;
    for (h, c) in &partials {
        histogram.merge(h)?;
        if let (Some(acc), Some(c)) = (correlators.as_mut(), c) {
            acc.merge(c)?;
        }
    }
    Ok(EnsembleResult {
        histogram,
        correlators,
    })
}
