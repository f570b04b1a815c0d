//! Runs a validated configuration and writes the artifact bundle.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use ramsey_core::analytics::{
    binomial_distribution, enumerate_static_phases, gaussian_static_distribution, static_distribution,
    AnalyticCorrelator, DistributionVector,
};
use ramsey_core::noise::tls_power_spectrum;
use ramsey_core::numeric::log_space;
use ramsey_core::protocol::{
    empirical_variance, run_ensemble_with, EnsembleOptions, MeasurementSchedule, NoiseSource, OutcomeHistogram,
};
use ramsey_core::rng::mix_seed;

use crate::config::{Case, ExperimentConfig, OutputKind};
use crate::manifest::{FileEntry, Manifest};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("case `{case}`, M = {m}: {source}")]
    Model {
        case: String,
        m: usize,
        #[source]
        source: ramsey_core::Error,
    },
    #[error("{0}")]
    Setup(String),
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub workers: usize,
    pub out_dir: PathBuf,
    /// One stderr line per simulated `(case, M)`.
    pub progress: bool,
    /// Interpretation notes for the manifest (e.g. from a preset).
    pub notes: Vec<String>,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>, workers: usize) -> Self {
        Self {
            workers,
            out_dir: out_dir.into(),
            progress: false,
            notes: Vec::new(),
        }
    }
}

/// Spectrum grid: 20 points per decade over `omega t_R in [1e-5, 1e2]`.
pub const SPECTRUM_POINTS_PER_DECADE: usize = 20;
pub const SPECTRUM_DECADES: (i32, i32) = (-5, 2);

pub fn spectrum_grid() -> Vec<f64> {
    let (lo, hi) = SPECTRUM_DECADES;
    let n = (hi - lo) as usize * SPECTRUM_POINTS_PER_DECADE;
    (0..=n)
        .map(|i| 10f64.powf(lo as f64 + i as f64 / SPECTRUM_POINTS_PER_DECADE as f64))
        .collect()
}

/// Seed for one `(case, M)` ensemble.
pub fn ensemble_seed(master: u64, case_index: usize, m: usize) -> u64 {
    mix_seed(mix_seed(master, case_index as u64), m as u64)
}

/// Lags `1..=dense` followed by `per_decade` log-spaced lags up to `M - 1`.
pub fn correlator_lags(m: usize, dense: usize, per_decade: usize) -> Vec<usize> {
    if m < 2 {
        return Vec::new();
    }
    let top = m - 1;
    let mut lags: Vec<usize> = (1..=dense.min(top)).collect();
    if per_decade > 0 && top > dense {
        let decades = (top as f64).log10() - (dense.max(1) as f64).log10();
        let n = (decades * per_decade as f64).ceil() as usize + 1;
        for k in log_space(dense.max(1) as f64, top as f64, n.max(2)) {
            let k = (k.round() as usize).min(top);
            if k > *lags.last().unwrap_or(&0) {
                lags.push(k);
            }
        }
    }
    lags
}

/// Leading-order correlator for a noise source, if one exists.
pub fn analytic_correlator(source: &NoiseSource, schedule: &MeasurementSchedule) -> AnalyticCorrelator {
    match source {
        NoiseSource::None => AnalyticCorrelator::uncorrelated(schedule.outcome_probability(0.0)),
        NoiseSource::Tls(e) => AnalyticCorrelator::tls_weak_coupling(e, schedule),
        NoiseSource::Gaussian(g) => AnalyticCorrelator::gaussian(g, schedule),
    }
}

/// Static-limit distribution: binomial mixture over frozen noise configurations.
pub fn static_theory(source: &NoiseSource, schedule: &MeasurementSchedule) -> ramsey_core::Result<DistributionVector> {
    match source {
        NoiseSource::None => binomial_distribution(schedule.m_count(), schedule.outcome_probability(0.0)),
        NoiseSource::Tls(e) => static_distribution(&enumerate_static_phases(e, schedule.t_r())?, schedule),
        NoiseSource::Gaussian(g) => {
            let f0 = g.phase_autocovariance(schedule.t_r(), schedule.t_cyc(), 0);
            gaussian_static_distribution(f0, schedule)
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

struct Writer {
    dir: PathBuf,
    written: Vec<FileEntry>,
}

impl Writer {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(FileEntry::for_bytes(name, contents.as_bytes()));
        Ok(())
    }

    fn discard(&self) {
        for f in &self.written {
            let _ = std::fs::remove_file(self.dir.join(&f.path));
        }
    }
}

fn distribution_csv(rho: &[f64]) -> String {
    let m_count = rho.len() - 1;
    let mut s = String::from("m,m_over_M,rho\n");
    for (m, r) in rho.iter().enumerate() {
        let _ = writeln!(s, "{m},{},{}", fmt(m as f64 / m_count as f64), fmt(*r));
    }
    s
}

/// Runs every case and M value of `config` and writes the artifacts plus
/// `manifest.json` into `options.out_dir`. Files written before a failure
/// are removed.
pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<Manifest, RunError> {
    execute(config, options, &config.outputs)
}

/// Writes only the static-limit curves for every case and M value.
pub fn emit_static_theory(config: &ExperimentConfig, options: &RunOptions) -> Result<Manifest, RunError> {
    execute(config, options, &[OutputKind::StaticTheory])
}

fn execute(config: &ExperimentConfig, options: &RunOptions, outputs: &[OutputKind]) -> Result<Manifest, RunError> {
    let start = Instant::now();
    std::fs::create_dir_all(&options.out_dir).map_err(|source| RunError::Io {
        path: options.out_dir.clone(),
        source,
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.max(1))
        .build()
        .map_err(|e| RunError::Setup(format!("worker pool: {e}")))?;
    let mut writer = Writer {
        dir: options.out_dir.clone(),
        written: Vec::new(),
    };
    let mut notes = options.notes.clone();
    let result = pool.install(|| write_all(config, options, outputs, &mut writer, &mut notes));
    if let Err(e) = result {
        writer.discard();
        return Err(e);
    }
    let manifest = Manifest::new(config, options.workers, start.elapsed().as_secs_f64(), notes, writer.written.clone());
    if let Err(e) = manifest.write(&options.out_dir) {
        writer.discard();
        return Err(e);
    }
    Ok(manifest)
}

fn write_all(
    config: &ExperimentConfig,
    options: &RunOptions,
    outputs: &[OutputKind],
    writer: &mut Writer,
    notes: &mut Vec<String>,
) -> Result<(), RunError> {
    let wants = |k: OutputKind| outputs.contains(&k);
    let cases = config.cases();
    let mut variance = String::from("case,M,sigma2_sim,sigma2_sim_se,sigma2_theory,sigma2_ergodic\n");

    for (ci, case) in cases.iter().enumerate() {
        let source = case.noise.source().map_err(|source| RunError::Model {
            case: case.label.clone(),
            m: 0,
            source,
        })?;
        for &m in &config.run.m_values {
            let model_err = |source| RunError::Model {
                case: case.label.clone(),
                m,
                source,
            };
            let schedule = case.schedule.schedule(m).map_err(model_err)?;
            let stem = format!("{}_M{m}", case.label);

            if wants(OutputKind::StaticTheory) {
                let dist = static_theory(&source, &schedule).map_err(model_err)?;
                writer.write(&format!("{stem}_static_theory.csv"), &distribution_csv(&dist.rho))?;
            }

            let simulate = [OutputKind::Histogram, OutputKind::Correlator, OutputKind::Variance]
                .iter()
                .any(|&k| wants(k));
            if !simulate {
                continue;
            }
            let t0 = Instant::now();
            let n_series = config.n_series_for(m);
            let lags = if wants(OutputKind::Correlator) {
                correlator_lags(m, config.run.correlator_dense_lags, config.run.correlator_lags_per_decade)
            } else {
                Vec::new()
            };
            let opts = EnsembleOptions {
                backend: case.noise.backend(),
                lags,
                ..EnsembleOptions::default()
            };
            let seed = ensemble_seed(config.run.master_seed, ci, m);
            let result = run_ensemble_with(&source, &schedule, n_series as usize, seed, &opts).map_err(model_err)?;
            let theory = analytic_correlator(&source, &schedule);
            let r1 = theory.r1;
            let valid_theory = theory.r2(1).abs() <= r1 * (1.0 - r1);
            if !valid_theory {
                notes.push(format!(
                    "{stem}: leading-order r2(1) exceeds r1(1 - r1); theory columns set to NaN"
                ));
            }

            if wants(OutputKind::Histogram) {
                writer.write(&format!("{stem}_histogram.csv"), &distribution_csv(&result.histogram.rho()))?;
            }
            if let Some(acc) = &result.correlators {
                let mut s = String::from("k,r2_sim,r2_sim_se,r2_theory\n");
                for (k, est) in acc.lags().iter().zip(acc.estimates()) {
                    let th = if valid_theory { theory.r2(*k) } else { f64::NAN };
                    let _ = writeln!(s, "{k},{},{},{}", fmt(est.value), fmt(est.se), fmt(th));
                }
                writer.write(&format!("{stem}_correlator.csv"), &s)?;
            }
            if wants(OutputKind::Variance) {
                append_variance(&mut variance, &case.label, &result.histogram, &theory, valid_theory, notes)
                    .map_err(model_err)?;
            }
            if options.progress {
                eprintln!(
                    "[{}] M = {m}: {n_series} series in {:.2} s",
                    case.label,
                    t0.elapsed().as_secs_f64()
                );
            }
        }
    }
    if wants(OutputKind::Variance) {
        writer.write("variance.csv", &variance)?;
    }
    if wants(OutputKind::Spectrum) {
        writer.write("spectrum.csv", &spectrum_csv(&cases)?)?;
    }
    Ok(())
}

fn append_variance(
    out: &mut String,
    label: &str,
    hist: &OutcomeHistogram,
    theory: &AnalyticCorrelator,
    valid: bool,
    notes: &mut Vec<String>,
) -> ramsey_core::Result<()> {
    let m = hist.m_count();
    let (sim, se) = if hist.n_series() >= 2 {
        let e = empirical_variance(hist)?;
        (e.value, e.se)
    } else {
        (f64::NAN, f64::NAN)
    };
    let (th, erg) = if valid {
        let erg = match theory.ergodic_asymptote() {
            Ok(v) => v / m as f64,
            Err(_) => {
                notes.push(format!("{label}_M{m}: no ergodic limit for this correlator"));
                f64::NAN
            }
        };
        (theory.variance(m)?, erg)
    } else {
        (f64::NAN, f64::NAN)
    };
    let _ = writeln!(out, "{label},{m},{},{},{},{}", fmt(sim), fmt(se), fmt(th), fmt(erg));
    Ok(())
}

fn spectrum_csv(cases: &[Case]) -> Result<String, RunError> {
    let mut tls = None;
    let mut gauss = None;
    for case in cases {
        let source = case.noise.source().map_err(|source| RunError::Model {
            case: case.label.clone(),
            m: 0,
            source,
        })?;
        match source {
            NoiseSource::Tls(e) if tls.is_none() => tls = Some(e),
            NoiseSource::Gaussian(g) if gauss.is_none() => gauss = Some(g),
            _ => {}
        }
    }
    let mut s = String::from("omega_tr,s_tls_tr,s_gauss_tr\n");
    for w in spectrum_grid() {
        let a = tls.as_ref().map_or(f64::NAN, |e| tls_power_spectrum(e, w).s_value);
        let b = gauss.as_ref().map_or(f64::NAN, |g| g.power_spectrum(w).s_value);
        let _ = writeln!(s, "{},{},{}", fmt(w), fmt(a), fmt(b));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lags_are_dense_then_logarithmic() {
        let l = correlator_lags(100_000, 100, 20);
        assert_eq!(&l[..100], &(1..=100).collect::<Vec<_>>()[..]);
        assert!(l.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*l.last().unwrap(), 99_999);
        assert!(l.len() > 150 && l.len() < 170);
        assert_eq!(correlator_lags(30, 100, 20), (1..=29).collect::<Vec<_>>());
        assert!(correlator_lags(1, 100, 20).is_empty());
    }

    #[test]
    fn seeds_differ_by_case_and_m() {
        let a = ensemble_seed(42, 0, 100);
        assert_ne!(a, ensemble_seed(42, 1, 100));
        assert_ne!(a, ensemble_seed(42, 0, 30));
        assert_eq!(a, ensemble_seed(42, 0, 100));
    }

    #[test]
    fn csv_floats_round_trip() {
        let s = distribution_csv(&[0.1, 0.2, 0.7]);
        assert_eq!(s, "m,m_over_M,rho\n0,0.0,0.1\n1,0.5,0.2\n2,1.0,0.7\n");
    }
}
