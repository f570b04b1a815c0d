use std::f64::consts::FRAC_PI_4;

use ramsey_core::analytics::{binomial_distribution, AnalyticCorrelator};
use ramsey_core::noise::{TlsEnsemble, TlsParams};
use ramsey_core::peaks::{find_peaks, mode_masses};
use ramsey_core::protocol::{
    empirical_r1, empirical_r2, empirical_variance, run_ensemble, run_ensemble_with, run_series, EnsembleOptions,
    MeasurementSchedule, NoiseSource,
};
use ramsey_core::rng::series_stream;

fn fig2a_source() -> NoiseSource {
    NoiseSource::Tls(TlsEnsemble::symmetric(0.2, &[1.2e-4]).unwrap())
}

#[test]
fn no_noise_histogram_is_binomial() {
    let s = MeasurementSchedule::unit(3.0, 40, FRAC_PI_4).unwrap();
    let n = 40_000;
    let h = run_ensemble(&NoiseSource::None, &s, n, 7).unwrap();
    let b = binomial_distribution(40, s.outcome_probability(0.0)).unwrap();
    let tv = h.tv_distance(&b.rho).unwrap();
    assert!(tv <= 4.0 / (n as f64).sqrt(), "tv = {tv}");
    let r1 = h.r1();
    assert!(r1.agrees_with(0.853_553_390_593_273_8, 3.0), "{r1:?}");
}

#[test]
fn no_noise_mgf_matches_binomial_generating_function() {
    let m = 50;
    let s = MeasurementSchedule::unit(3.0, m, 1.0).unwrap();
    let n = 50_000;
    let h = run_ensemble(&NoiseSource::None, &s, n, 3).unwrap();
    let r1 = s.outcome_probability(0.0);
    for t in [-2.0, -1.0, 1.0, 2.0] {
        let expect = (1.0 + r1 * ((t / m as f64).exp() - 1.0)).powi(m as i32);
        // per-series variance of e^{t m/M} bounds the error
        let second = (1.0 + r1 * ((2.0 * t / m as f64).exp() - 1.0)).powi(m as i32);
        let se = ((second - expect * expect) / n as f64).sqrt();
        assert!((h.mgf(t) - expect).abs() < 4.0 * se, "t = {t}");
    }
}

#[test]
fn fast_tls_reduces_to_binomial() {
    // W t_cyc = 50: consecutive windows are independent
    let m = 60;
    let s = MeasurementSchedule::unit(3.0, m, FRAC_PI_4).unwrap();
    let w = 50.0 / 3.0;
    let source = NoiseSource::Tls(TlsEnsemble::new(vec![TlsParams::symmetric(0.3, w).unwrap()]));
    let n = 20_000;
    let h = run_ensemble(&source, &s, n, 5).unwrap();
    // r1 = <p(theta)> with theta the exact window integral; estimate it from
    // the simulated phases of a separate run
    let mut acc = 0.0;
    let reps = 2000;
    for i in 0..reps {
        let ser = run_series(&source, &s, &mut series_stream(99, i)).unwrap();
        acc += ser.phases.unwrap().iter().map(|&t| s.outcome_probability(t)).sum::<f64>();
    }
    let r1 = acc / (reps as f64 * m as f64);
    let b = binomial_distribution(m, r1).unwrap();
    let tv = h.tv_distance(&b.rho).unwrap();
    assert!(tv <= 4.0 / (n as f64).sqrt(), "tv = {tv}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let source = NoiseSource::Tls(TlsEnsemble::symmetric(0.2, &[0.05, 0.004, 3e-4]).unwrap());
    let s = MeasurementSchedule::unit(3.0, 200, FRAC_PI_4).unwrap();
    let opts = EnsembleOptions {
        lags: vec![1, 2, 50],
        ..Default::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_ensemble_with(&source, &s, 3000, 42, &opts).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(16));
}

#[test]
fn static_regime_is_bimodal_with_equal_modes() {
    let s = MeasurementSchedule::unit(3.0, 100, FRAC_PI_4).unwrap();
    let h = run_ensemble(&fig2a_source(), &s, 20_000, 1).unwrap();
    let rho = h.rho();
    let peaks = find_peaks(&rho, 0.2);
    assert_eq!(peaks.len(), 2, "{peaks:?}");
    let pos: Vec<f64> = peaks.iter().map(|p| p.index as f64 / 100.0).collect();
    assert!((pos[0] - 0.78).abs() <= 0.02 && (pos[1] - 0.92).abs() <= 0.02, "{pos:?}");
    let masses = mode_masses(&rho, &peaks);
    assert!((masses[1] / masses[0] - 1.0).abs() < 0.1, "{masses:?}");
}

#[test]
fn static_regime_variance_matches_variance_law() {
    let s = MeasurementSchedule::unit(3.0, 100, FRAC_PI_4).unwrap();
    let h = run_ensemble(&fig2a_source(), &s, 20_000, 2).unwrap();
    let sim = empirical_variance(&h).unwrap();
    let source = fig2a_source();
    let NoiseSource::Tls(ens) = &source else { unreachable!() };
    let theory = AnalyticCorrelator::tls_weak_coupling(ens, &s).variance(100).unwrap();
    assert!((sim.value / theory - 1.0).abs() < 0.05, "{} vs {theory}", sim.value);
}

#[test]
fn empirical_correlators_of_uncorrelated_and_weakly_coupled_noise() {
    let s = MeasurementSchedule::unit(3.0, 64, FRAC_PI_4).unwrap();
    let none: Vec<_> = (0..3000)
        .map(|i| run_series(&NoiseSource::None, &s, &mut series_stream(8, i)).unwrap())
        .collect();
    for k in [1, 5, 30] {
        let e = empirical_r2(&none, k).unwrap();
        assert!(e.agrees_with(0.0, 3.0), "k = {k}: {e:?}");
    }
    let r1 = empirical_r1(&none).unwrap();
    assert!(r1.agrees_with(s.outcome_probability(0.0), 3.0));

    let source = fig2a_source();
    let opts = EnsembleOptions {
        lags: vec![1, 20, 60],
        ..Default::default()
    };
    let res = run_ensemble_with(&source, &s, 40_000, 4, &opts).unwrap();
    let est = res.correlators.unwrap().estimates();
    for (e, k) in est.iter().zip([1.0, 20.0, 60.0]) {
        let expect = 0.005 * (-k * 1.2e-4 * 3.0f64).exp();
        assert!(e.agrees_with(expect, 3.0), "k = {k}: {e:?} vs {expect}");
    }
}
