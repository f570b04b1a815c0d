//! Frozen scenario presets. Each one regenerates the data behind one
//! published panel at the caption parameters.

use std::f64::consts::FRAC_PI_4;

use crate::config::{
    BackendSpec, ExperimentConfig, NoiseSpec, OutputKind, RunSpec, Scenario, ScheduleSpec, SeriesOverride, TlsSpec,
    Variant, DEFAULT_DENSE_LAGS, DEFAULT_LAGS_PER_DECADE, DEFAULT_N_SERIES, DEFAULT_SEED,
};

/// Bumped whenever a preset's parameters change.
pub const PRESET_VERSION: u32 = 1;

pub const NAMES: [&str; 13] = [
    "fig2a",
    "fig2b",
    "fig2b-gauss",
    "fig2c",
    "fig2d",
    "fig3a",
    "fig3b",
    "smfig1a",
    "smfig1c",
    "smfig2",
    "smfig3a",
    "smfig3b",
    "smfig4",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub config: ExperimentConfig,
    /// Interpretation notes copied into the run manifest.
    pub notes: Vec<String>,
}

pub fn names() -> Vec<&'static str> {
    NAMES.to_vec()
}

const M_SWEEP: [usize; 5] = [30, 100, 1_000, 10_000, 100_000];
const REDUCED_N_SERIES: u64 = 10_000;
const REDUCTION_NOTE: &str = "n_series reduced to 1e4 for M >= 1e5 (desk-scale runtime)";

fn symmetric(v: f64, w: f64) -> TlsSpec {
    TlsSpec {
        v_tr: v,
        w01_tr: 0.5 * w,
        w10_tr: 0.5 * w,
    }
}

fn tls(list: Vec<TlsSpec>) -> NoiseSpec {
    NoiseSpec::Tls { tls: list }
}

fn ladder(v: f64, n: std::ops::RangeInclusive<i32>) -> Vec<TlsSpec> {
    n.map(|n| symmetric(v, (-0.75 * n as f64).exp())).collect()
}

fn asymmetric_ladder(v: f64) -> Vec<TlsSpec> {
    (3..=12)
        .map(|n| TlsSpec {
            v_tr: v,
            w01_tr: 0.5 * (-0.75 * (n + 1) as f64).exp(),
            w10_tr: 0.5 * (-0.75 * n as f64).exp(),
        })
        .collect()
}

fn gaussian_reference() -> NoiseSpec {
    NoiseSpec::Gaussian {
        d_tr: 0.1267,
        omega_min_tr: (-9.0f64).exp(),
        omega_max_tr: ramsey_core::noise::DEFAULT_OMEGA_MAX,
        n_components: ramsey_core::noise::DEFAULT_COMPONENTS,
        backend: BackendSpec::Auto,
    }
}

fn schedule(phi_r: f64) -> ScheduleSpec {
    ScheduleSpec {
        t_cyc_over_tr: 3.0,
        phi_r,
        decoherence_factor: 1.0,
    }
}

fn run(m_values: &[usize]) -> RunSpec {
    let reduce = m_values.iter().any(|&m| m >= 100_000);
    RunSpec {
        n_series: DEFAULT_N_SERIES,
        m_values: m_values.to_vec(),
        master_seed: DEFAULT_SEED,
        n_series_overrides: if reduce {
            vec![SeriesOverride {
                m_at_least: 100_000,
                n_series: REDUCED_N_SERIES,
            }]
        } else {
            Vec::new()
        },
        correlator_dense_lags: DEFAULT_DENSE_LAGS,
        correlator_lags_per_decade: DEFAULT_LAGS_PER_DECADE,
    }
}

struct Builder {
    name: &'static str,
    description: &'static str,
    noise: NoiseSpec,
    schedule: ScheduleSpec,
    m_values: Vec<usize>,
    outputs: Vec<OutputKind>,
    variants: Vec<Variant>,
    notes: Vec<String>,
}

impl Builder {
    fn new(name: &'static str, description: &'static str, noise: NoiseSpec, phi_r: f64) -> Self {
        Self {
            name,
            description,
            noise,
            schedule: schedule(phi_r),
            m_values: M_SWEEP.to_vec(),
            outputs: vec![OutputKind::Histogram],
            variants: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn m(mut self, m: &[usize]) -> Self {
        self.m_values = m.to_vec();
        self
    }

    fn outputs(mut self, o: &[OutputKind]) -> Self {
        self.outputs = o.to_vec();
        self
    }

    fn variant(mut self, label: &str, noise: NoiseSpec, phi_r: f64) -> Self {
        self.variants.push(Variant {
            label: label.to_string(),
            noise,
            schedule: schedule(phi_r),
        });
        self
    }

    fn note(mut self, n: &str) -> Self {
        self.notes.push(n.to_string());
        self
    }

    fn build(mut self) -> Preset {
        let run = run(&self.m_values);
        if !run.n_series_overrides.is_empty() && self.outputs.iter().any(|o| o.needs_simulation()) {
            self.notes.push(REDUCTION_NOTE.to_string());
        }
        self.outputs.sort();
        Preset {
            config: ExperimentConfig {
                scenario: Scenario {
                    name: self.name.to_string(),
                    description: self.description.to_string(),
                },
                noise: self.noise,
                schedule: self.schedule,
                run,
                outputs: self.outputs,
                variants: self.variants,
            },
            notes: self.notes,
        }
    }
}

use OutputKind::{Correlator, Histogram, Spectrum, StaticTheory, Variance};

const VARIANCE_SWEEP: [usize; 9] = [10, 30, 100, 300, 1_000, 3_000, 10_000, 30_000, 100_000];

pub fn preset(name: &str) -> Option<Preset> {
    let one = || tls(vec![symmetric(0.2, 1.2e-4)]);
    let ten = || tls(ladder(0.2, 3..=12));
    let p = match name {
        "fig2a" => Builder::new("fig2a", "one symmetric TLS, V t_R = 0.2, W t_R = 1.2e-4", one(), FRAC_PI_4)
            .outputs(&[Histogram, StaticTheory]),
        "fig2b" => Builder::new("fig2b", "ten symmetric TLSs, W t_R = exp(-3n/4), n = 3..12", ten(), FRAC_PI_4)
            .outputs(&[Histogram, StaticTheory]),
        "fig2b-gauss" => Builder::new("fig2b-gauss", "Gaussian 1/f-type noise, D t_R = 0.1267", gaussian_reference(), FRAC_PI_4)
            .outputs(&[Histogram, StaticTheory]),
        "fig2c" => Builder::new("fig2c", "ten symmetric TLSs at phi_R = 0", ten(), 0.0).outputs(&[Histogram, Correlator]),
        "fig2d" => Builder::new("fig2d", "variance against M for the fig2a-c ensembles", one(), FRAC_PI_4)
            .m(&VARIANCE_SWEEP)
            .outputs(&[Variance])
            .variant("a", one(), FRAC_PI_4)
            .variant("b", ten(), FRAC_PI_4)
            .variant("c", ten(), 0.0),
        "fig3a" => Builder::new("fig3a", "one symmetric TLS at stronger coupling, M = 100", tls(vec![symmetric(0.2, 1e-3)]), FRAC_PI_4)
            .m(&[100])
            .outputs(&[Histogram, StaticTheory])
            .variant("v0.2", tls(vec![symmetric(0.2, 1e-3)]), FRAC_PI_4)
            .variant("v0.3", tls(vec![symmetric(0.3, 1e-3)]), FRAC_PI_4)
            .variant("v0.4", tls(vec![symmetric(0.4, 1e-3)]), FRAC_PI_4)
            .note("W t_R = 1e-3; a value of 1e3 is read as a sign typo, since a rate of 1e3/t_R would not be slow noise")
            .note("coupling values V t_R = 0.2, 0.3, 0.4 chosen for the variants"),
        "fig3b" => Builder::new("fig3b", "ten symmetric TLSs at several couplings, M = 100", ten(), FRAC_PI_4)
            .m(&[100])
            .outputs(&[Histogram, StaticTheory])
            .variant("v0.1", tls(ladder(0.1, 3..=12)), FRAC_PI_4)
            .variant("v0.2", tls(ladder(0.2, 3..=12)), FRAC_PI_4)
            .variant("v0.3", tls(ladder(0.3, 3..=12)), FRAC_PI_4)
            .note("coupling values V t_R = 0.1, 0.2, 0.3 chosen for the variants"),
        "smfig1a" => Builder::new(
            "smfig1a",
            "one asymmetric TLS, W10 t_R = 0.00075, W01 t_R = 0.00025",
            tls(vec![TlsSpec {
                v_tr: 0.2,
                w01_tr: 0.00025,
                w10_tr: 0.00075,
            }]),
            FRAC_PI_4,
        )
        .outputs(&[Histogram, StaticTheory]),
        "smfig1c" => Builder::new("smfig1c", "ten asymmetric TLSs", tls(asymmetric_ladder(0.2)), FRAC_PI_4)
            .outputs(&[Histogram, StaticTheory]),
        "smfig2" => Builder::new("smfig2", "correlators and variance for ten asymmetric TLSs", tls(asymmetric_ladder(0.2)), FRAC_PI_4)
            .m(&VARIANCE_SWEEP)
            .outputs(&[Correlator, Variance])
            .variant("phi-pi4", tls(asymmetric_ladder(0.2)), FRAC_PI_4)
            .variant("phi-0", tls(asymmetric_ladder(0.2)), 0.0),
        "smfig3a" => Builder::new("smfig3a", "five symmetric TLSs, n = 8..12, V t_R = 1", tls(ladder(1.0, 8..=12)), FRAC_PI_4)
            .outputs(&[Histogram, StaticTheory]),
        "smfig3b" => Builder::new("smfig3b", "five symmetric TLSs, n = 8..12, V t_R = 0.3", tls(ladder(0.3, 8..=12)), FRAC_PI_4)
            .outputs(&[Histogram, StaticTheory])
            .note("coupling V t_R = 0.3 chosen for the second panel"),
        "smfig4" => Builder::new("smfig4", "spectra of the ten-TLS and Gaussian noise models", ten(), FRAC_PI_4)
            .m(&[100])
            .outputs(&[Spectrum])
            .variant("tls", ten(), FRAC_PI_4)
            .variant("gaussian", gaussian_reference(), FRAC_PI_4),
        "smfig3" => return preset("smfig3a"),
        _ => return None,
    };
    Some(p.build())
}
