//! Experiment configuration: a JSON document with top-level keys
//! `scenario`, `noise`, `schedule`, `run`, `outputs` and `variants`.
//! All quantities are dimensionless, in units of the Ramsey time.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use ramsey_core::noise::{
    GaussianBackend, GaussianNoiseModel, TlsEnsemble, TlsParams, DEFAULT_COMPONENTS, DEFAULT_OMEGA_MAX,
};
use ramsey_core::protocol::{MeasurementSchedule, NoiseSource};

use crate::presets;

pub const DEFAULT_N_SERIES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_DENSE_LAGS: usize = 100;
pub const DEFAULT_LAGS_PER_DECADE: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

type CResult<T> = Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputKind {
    Histogram,
    Correlator,
    Variance,
    Spectrum,
    StaticTheory,
}

impl OutputKind {
    pub fn needs_simulation(self) -> bool {
        matches!(self, OutputKind::Histogram | OutputKind::Correlator | OutputKind::Variance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TlsSpec {
    pub v_tr: f64,
    pub w01_tr: f64,
    pub w10_tr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendSpec {
    Auto,
    Toeplitz,
    Components,
}

impl From<BackendSpec> for GaussianBackend {
    fn from(b: BackendSpec) -> Self {
        match b {
            BackendSpec::Auto => GaussianBackend::Auto,
            BackendSpec::Toeplitz => GaussianBackend::Toeplitz,
            BackendSpec::Components => GaussianBackend::Components,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseSpec {
    None,
    Tls {
        tls: Vec<TlsSpec>,
    },
    Gaussian {
        d_tr: f64,
        omega_min_tr: f64,
        omega_max_tr: f64,
        n_components: usize,
        backend: BackendSpec,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleSpec {
    pub t_cyc_over_tr: f64,
    pub phi_r: f64,
    pub decoherence_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeriesOverride {
    pub m_at_least: usize,
    pub n_series: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub n_series: u64,
    pub m_values: Vec<usize>,
    pub master_seed: u64,
    pub n_series_overrides: Vec<SeriesOverride>,
    pub correlator_dense_lags: usize,
    pub correlator_lags_per_decade: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variant {
    pub label: String,
    pub noise: NoiseSpec,
    pub schedule: ScheduleSpec,
}

/// A validated configuration in canonical form: defaults filled in and
/// symmetric rates `w_tr` expanded into `w01_tr = w10_tr = w_tr / 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub noise: NoiseSpec,
    pub schedule: ScheduleSpec,
    pub run: RunSpec,
    pub outputs: Vec<OutputKind>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub variants: Vec<Variant>,
}

/// One simulated configuration: the base, or one variant.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub label: String,
    pub noise: NoiseSpec,
    pub schedule: ScheduleSpec,
}

impl ExperimentConfig {
    pub fn cases(&self) -> Vec<Case> {
        if self.variants.is_empty() {
            vec![Case {
                label: self.scenario.name.clone(),
                noise: self.noise.clone(),
                schedule: self.schedule,
            }]
        } else {
            self.variants
                .iter()
                .map(|v| Case {
                    label: v.label.clone(),
                    noise: v.noise.clone(),
                    schedule: v.schedule,
                })
                .collect()
        }
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    /// Series count for a given `M` after the overrides.
    pub fn n_series_for(&self, m: usize) -> u64 {
        self.run
            .n_series_overrides
            .iter()
            .filter(|o| m >= o.m_at_least)
            .map(|o| o.n_series)
            .next_back()
            .unwrap_or(self.run.n_series)
    }

    /// Canonical JSON text (pretty, stable key order).
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

impl ScheduleSpec {
    pub fn schedule(&self, m: usize) -> Result<MeasurementSchedule, ramsey_core::Error> {
        MeasurementSchedule::new(1.0, self.t_cyc_over_tr, m, self.phi_r, self.decoherence_factor)
    }
}

impl NoiseSpec {
    pub fn source(&self) -> Result<NoiseSource, ramsey_core::Error> {
        Ok(match self {
            NoiseSpec::None => NoiseSource::None,
            NoiseSpec::Tls { tls } => NoiseSource::Tls(self::tls_ensemble(tls)?),
            NoiseSpec::Gaussian {
                d_tr,
                omega_min_tr,
                omega_max_tr,
                n_components,
                ..
            } => NoiseSource::Gaussian(GaussianNoiseModel::build(*d_tr, *omega_min_tr, *omega_max_tr, *n_components)?),
        })
    }

    pub fn backend(&self) -> GaussianBackend {
        match self {
            NoiseSpec::Gaussian { backend, .. } => (*backend).into(),
            _ => GaussianBackend::Auto,
        }
    }
}

fn tls_ensemble(list: &[TlsSpec]) -> Result<TlsEnsemble, ramsey_core::Error> {
    list.iter()
        .map(|t| TlsParams::new(t.v_tr, t.w01_tr, t.w10_tr))
        .collect::<Result<Vec<_>, _>>()
        .map(TlsEnsemble::new)
}

// ---- raw (as written) form ----

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawScenario {
    Name(String),
    Inline {
        name: String,
        #[serde(default)]
        description: Option<String>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTls {
    v_tr: Option<f64>,
    w_tr: Option<f64>,
    w01_tr: Option<f64>,
    w10_tr: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    kind: String,
    tls: Option<Vec<RawTls>>,
    d_tr: Option<f64>,
    omega_min_tr: Option<f64>,
    omega_max_tr: Option<f64>,
    n_components: Option<i64>,
    backend: Option<BackendSpec>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    t_cyc_over_tr: Option<f64>,
    phi_r: Option<f64>,
    decoherence_factor: Option<f64>,
    t2_over_tr: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverride {
    m_at_least: i64,
    n_series: i64,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawRun {
    n_series: Option<i64>,
    m_values: Option<Vec<i64>>,
    master_seed: Option<u64>,
    n_series_overrides: Option<Vec<RawOverride>>,
    correlator_dense_lags: Option<i64>,
    correlator_lags_per_decade: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariant {
    label: String,
    noise: Option<RawNoise>,
    schedule: Option<RawSchedule>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<RawScenario>,
    noise: Option<RawNoise>,
    schedule: Option<RawSchedule>,
    run: Option<RawRun>,
    outputs: Option<Vec<String>>,
    variants: Option<Vec<RawVariant>>,
}

/// Parses and validates a configuration document. A `scenario` naming a
/// preset supplies every section that the document leaves out.
pub fn load_config_str(text: &str) -> CResult<ExperimentConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::new("", format!("invalid document: {e}")))?;
    resolve(raw)
}

pub fn load_config(path: &Path) -> CResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
    load_config_str(&text)
}

fn resolve(raw: RawConfig) -> CResult<ExperimentConfig> {
    let (name, description) = match raw.scenario {
        Some(RawScenario::Name(n)) => (n, None),
        Some(RawScenario::Inline { name, description }) => (name, description),
        None => ("custom".to_string(), None),
    };
    let preset = presets::preset(&name);
    if preset.is_none() && raw.noise.is_none() && raw.variants.is_none() {
        return Err(ConfigError::new(
            "scenario",
            format!(
                "unknown scenario `{name}` and no `noise` section; presets: {}",
                presets::names().join(", ")
            ),
        ));
    }
    let base = preset.map(|p| p.config);
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.')) {
        return Err(ConfigError::new("scenario.name", "must be non-empty and use only [A-Za-z0-9._-]"));
    }

    let overrides_base = raw.noise.is_some() || raw.schedule.is_some();
    let noise = match (raw.noise, &base) {
        (Some(n), _) => resolve_noise(n, "noise")?,
        (None, Some(b)) => b.noise.clone(),
        (None, None) => NoiseSpec::None,
    };
    let schedule = match (raw.schedule, &base) {
        (Some(s), _) => resolve_schedule(s, "schedule")?,
        (None, Some(b)) => b.schedule,
        (None, None) => resolve_schedule(RawSchedule::default(), "schedule")?,
    };
    let run = match (raw.run, &base) {
        (Some(r), _) => resolve_run(r)?,
        (None, Some(b)) => b.run.clone(),
        (None, None) => resolve_run(RawRun::default())?,
    };
    let outputs = match (raw.outputs, &base) {
        (Some(o), _) => resolve_outputs(o)?,
        (None, Some(b)) => b.outputs.clone(),
        (None, None) => vec![OutputKind::Histogram],
    };
    // Preset variants only survive when the base noise and schedule are the preset's own.
    let variants = match (raw.variants, &base) {
        (Some(v), _) => resolve_variants(v, &noise, &schedule)?,
        (None, Some(b)) if !overrides_base => b.variants.clone(),
        _ => Vec::new(),
    };
    let description = description
        .or_else(|| base.as_ref().map(|b| b.scenario.description.clone()))
        .unwrap_or_default();
    Ok(ExperimentConfig {
        scenario: Scenario { name, description },
        noise,
        schedule,
        run,
        outputs,
        variants,
    })
}

fn positive(field: &str, v: Option<f64>) -> CResult<f64> {
    match v {
        Some(x) if x.is_finite() && x > 0.0 => Ok(x),
        Some(x) => Err(ConfigError::new(field, format!("must be finite and > 0, got {x}"))),
        None => Err(ConfigError::new(field, "is required")),
    }
}

fn resolve_noise(raw: RawNoise, at: &str) -> CResult<NoiseSpec> {
    let unexpected = |name: &str, present: bool| -> CResult<()> {
        if present {
            Err(ConfigError::new(format!("{at}.{name}"), format!("not allowed for kind `{}`", raw.kind)))
        } else {
            Ok(())
        }
    };
    match raw.kind.as_str() {
        "none" => {
            unexpected("tls", raw.tls.is_some())?;
            unexpected("d_tr", raw.d_tr.is_some())?;
            Ok(NoiseSpec::None)
        }
        "tls" => {
            unexpected("d_tr", raw.d_tr.is_some())?;
            unexpected("omega_min_tr", raw.omega_min_tr.is_some())?;
            let list = raw.tls.as_ref().ok_or_else(|| ConfigError::new(format!("{at}.tls"), "is required"))?;
            if list.is_empty() {
                return Err(ConfigError::new(format!("{at}.tls"), "must list at least one fluctuator"));
            }
            let mut out = Vec::with_capacity(list.len());
            for (i, t) in list.iter().enumerate() {
                let f = |k: &str| format!("{at}.tls[{i}].{k}");
                let v = match t.v_tr {
                    Some(v) if v.is_finite() => v,
                    Some(v) => return Err(ConfigError::new(f("v_tr"), format!("must be finite, got {v}"))),
                    None => return Err(ConfigError::new(f("v_tr"), "is required")),
                };
                let (w01, w10) = match (t.w_tr, t.w01_tr, t.w10_tr) {
                    (Some(w), None, None) => {
                        let w = positive(&f("w_tr"), Some(w))?;
                        (0.5 * w, 0.5 * w)
                    }
                    (None, Some(a), Some(b)) => (positive(&f("w01_tr"), Some(a))?, positive(&f("w10_tr"), Some(b))?),
                    _ => {
                        return Err(ConfigError::new(
                            f("w_tr"),
                            "give either w_tr (symmetric) or both w01_tr and w10_tr",
                        ))
                    }
                };
                out.push(TlsSpec {
                    v_tr: v,
                    w01_tr: w01,
                    w10_tr: w10,
                });
            }
            Ok(NoiseSpec::Tls { tls: out })
        }
        "gaussian" => {
            unexpected("tls", raw.tls.is_some())?;
            let d = match raw.d_tr {
                Some(d) if d.is_finite() && d >= 0.0 => d,
                Some(d) => return Err(ConfigError::new(format!("{at}.d_tr"), format!("must be finite and >= 0, got {d}"))),
                None => return Err(ConfigError::new(format!("{at}.d_tr"), "is required")),
            };
            let lo = positive(&format!("{at}.omega_min_tr"), raw.omega_min_tr)?;
            let hi = positive(&format!("{at}.omega_max_tr"), Some(raw.omega_max_tr.unwrap_or(DEFAULT_OMEGA_MAX)))?;
            if hi <= lo {
                return Err(ConfigError::new(format!("{at}.omega_max_tr"), format!("must exceed omega_min_tr ({lo})")));
            }
            let n = raw.n_components.unwrap_or(DEFAULT_COMPONENTS as i64);
            if n < 2 {
                return Err(ConfigError::new(format!("{at}.n_components"), format!("must be >= 2, got {n}")));
            }
            Ok(NoiseSpec::Gaussian {
                d_tr: d,
                omega_min_tr: lo,
                omega_max_tr: hi,
                n_components: n as usize,
                backend: raw.backend.unwrap_or(BackendSpec::Auto),
            })
        }
        other => Err(ConfigError::new(
            format!("{at}.kind"),
            format!("unknown kind `{other}`; expected none, tls or gaussian"),
        )),
    }
}

fn resolve_schedule(raw: RawSchedule, at: &str) -> CResult<ScheduleSpec> {
    let t_cyc = raw.t_cyc_over_tr.unwrap_or(3.0);
    if !(t_cyc.is_finite() && t_cyc >= 1.0) {
        return Err(ConfigError::new(format!("{at}.t_cyc_over_tr"), format!("must be finite and >= 1, got {t_cyc}")));
    }
    let phi = raw.phi_r.unwrap_or(FRAC_PI_4);
    if !phi.is_finite() {
        return Err(ConfigError::new(format!("{at}.phi_r"), "must be finite"));
    }
    let factor = match (raw.decoherence_factor, raw.t2_over_tr) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::new(
                format!("{at}.t2_over_tr"),
                "give either decoherence_factor or t2_over_tr, not both",
            ))
        }
        (Some(f), None) => f,
        (None, Some(t2)) => MeasurementSchedule::decoherence_from_t2(1.0, positive(&format!("{at}.t2_over_tr"), Some(t2))?),
        (None, None) => 1.0,
    };
    if !(0.0..=1.0).contains(&factor) {
        return Err(ConfigError::new(format!("{at}.decoherence_factor"), format!("must lie in [0, 1], got {factor}")));
    }
    Ok(ScheduleSpec {
        t_cyc_over_tr: t_cyc,
        phi_r: phi,
        decoherence_factor: factor,
    })
}

fn resolve_run(raw: RawRun) -> CResult<RunSpec> {
    let n_series = raw.n_series.unwrap_or(DEFAULT_N_SERIES as i64);
    if n_series < 1 {
        return Err(ConfigError::new("run.n_series", format!("must be >= 1, got {n_series}")));
    }
    let m_values = raw.m_values.unwrap_or_else(|| vec![100]);
    if m_values.is_empty() {
        return Err(ConfigError::new("run.m_values", "must not be empty"));
    }
    if let Some(&m) = m_values.iter().find(|&&m| m < 1) {
        return Err(ConfigError::new("run.m_values", format!("entries must be >= 1, got {m}")));
    }
    if m_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConfigError::new("run.m_values", "must be strictly ascending"));
    }
    let mut overrides = Vec::new();
    for (i, o) in raw.n_series_overrides.unwrap_or_default().into_iter().enumerate() {
        if o.m_at_least < 1 || o.n_series < 1 {
            return Err(ConfigError::new(
                format!("run.n_series_overrides[{i}]"),
                "m_at_least and n_series must be >= 1",
            ));
        }
        overrides.push(SeriesOverride {
            m_at_least: o.m_at_least as usize,
            n_series: o.n_series as u64,
        });
    }
    if overrides.windows(2).any(|w| w[0].m_at_least >= w[1].m_at_least) {
        return Err(ConfigError::new("run.n_series_overrides", "m_at_least must be strictly ascending"));
    }
    let dense = raw.correlator_dense_lags.unwrap_or(DEFAULT_DENSE_LAGS as i64);
    let per_decade = raw.correlator_lags_per_decade.unwrap_or(DEFAULT_LAGS_PER_DECADE as i64);
    if dense < 1 || per_decade < 0 {
        return Err(ConfigError::new(
            "run.correlator_dense_lags",
            "dense lags must be >= 1 and lags per decade >= 0",
        ));
    }
    Ok(RunSpec {
        n_series: n_series as u64,
        m_values: m_values.into_iter().map(|m| m as usize).collect(),
        master_seed: raw.master_seed.unwrap_or(DEFAULT_SEED),
        n_series_overrides: overrides,
        correlator_dense_lags: dense as usize,
        correlator_lags_per_decade: per_decade as usize,
    })
}

fn resolve_outputs(raw: Vec<String>) -> CResult<Vec<OutputKind>> {
    if raw.is_empty() {
        return Err(ConfigError::new("outputs", "must request at least one artifact"));
    }
    let mut set = BTreeSet::new();
    for s in raw {
        let kind: OutputKind = serde_json::from_value(serde_json::Value::String(s.clone())).map_err(|_| {
            ConfigError::new(
                "outputs",
                format!("unknown artifact `{s}`; expected histogram, correlator, variance, spectrum or static-theory"),
            )
        })?;
        set.insert(kind);
    }
    Ok(set.into_iter().collect())
}

fn resolve_variants(raw: Vec<RawVariant>, noise: &NoiseSpec, schedule: &ScheduleSpec) -> CResult<Vec<Variant>> {
    let mut labels = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for (i, v) in raw.into_iter().enumerate() {
        let at = format!("variants[{i}]");
        if v.label.is_empty() || !v.label.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.')) {
            return Err(ConfigError::new(format!("{at}.label"), "must be non-empty and use only [A-Za-z0-9._-]"));
        }
        if !labels.insert(v.label.clone()) {
            return Err(ConfigError::new(format!("{at}.label"), format!("duplicate label `{}`", v.label)));
        }
        let noise = match v.noise {
            Some(n) => resolve_noise(n, &format!("{at}.noise"))?,
            None => noise.clone(),
        };
        let schedule = match v.schedule {
            Some(s) => resolve_schedule(s, &format!("{at}.schedule"))?,
            None => *schedule,
        };
        out.push(Variant {
            label: v.label,
            noise,
            schedule,
        });
    }
    Ok(out)
}
