use crate::error::{domain, Error, Result};
use crate::noise::{GaussianNoiseModel, TlsEnsemble};
use crate::numeric::{exp_neg_minus_one_plus, pairwise_sum};
use crate::protocol::MeasurementSchedule;

/// One exponential term `lag_one * e^{-decay (k - 1)}` of a lag correlator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    /// Value at lag 1.
    pub lag_one: f64,
    /// Decay per lag, `rate * t_cyc`.
    pub decay: f64,
}

/// `r1` with `r2(k) = sum_j a_j e^{-x_j (k - 1)}` for `k >= 1`. Every leading-order
/// correlator here has this form, which gives closed-form variance sums.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticCorrelator {
    pub r1: f64,
    pub terms: Vec<ExpTerm>,
}

/// Tabulated `r1` and `r2(k)` for `k = 1..=K` (`r2[0]` is lag 1).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorSeries {
    r1: f64,
    r2: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariancePrediction {
    pub value: f64,
    /// Bound on the omitted lags; zero when the series covers `k < M`.
    pub tail_bound: f64,
}

/// Peak position in the ergodic limit for weak coupling:
/// `1/2 + 1/2 f cos(phi) prod_n [1 - (w_n V_n t_R)^2 / 2]`.
pub fn r1_weak_coupling(ensemble: &TlsEnsemble, schedule: &MeasurementSchedule) -> f64 {
    let t_r = schedule.t_r();
    let prod: f64 = ensemble
        .iter()
        .map(|t| 1.0 - (t.weight() * t.v_coupling() * t_r).powi(2) / 2.0)
        .product();
    0.5 + 0.5 * schedule.decoherence_factor() * schedule.phi_r().cos() * prod
}

/// Leading-order correlator `1/4 f^2 sin^2(phi) sum_n (w_n V_n t_R)^2 e^{-k W_n t_cyc}`.
pub fn r2_weak_coupling(ensemble: &TlsEnsemble, schedule: &MeasurementSchedule, k: usize) -> f64 {
    AnalyticCorrelator::tls_generic_phase(ensemble, schedule).r2(k)
}

/// Correlator at `phi_R = 0`, where the generic leading order vanishes:
/// single-fluctuator terms in `(w V^2 dW/W t_R^2)^2` and pair terms in
/// `(w_1 w_2 V_1 V_2 t_R^2)^2` decaying at the summed rate.
pub fn r2_phi_r_zero(ensemble: &TlsEnsemble, schedule: &MeasurementSchedule, k: usize) -> f64 {
    AnalyticCorrelator::tls_zero_phase(ensemble, schedule).r2(k)
}

/// `(r1, r2(k))` for weak Gaussian noise, with `f_k` from the model.
pub fn r2_gaussian(model: &GaussianNoiseModel, schedule: &MeasurementSchedule, k: usize) -> (f64, f64) {
    let f = schedule.decoherence_factor();
    let (s, c) = schedule.phi_r().sin_cos();
    let f0 = model.phase_autocovariance(schedule.t_r(), schedule.t_cyc(), 0);
    let fk = model.phase_autocovariance(schedule.t_r(), schedule.t_cyc(), k);
    let r1 = 0.5 * (1.0 + f * (-f0 / 2.0).exp() * c);
    let r2 = 0.25 * f * f * (-f0).exp() * (fk * s * s + 0.5 * fk * fk * c * c);
    (r1, r2)
}

impl AnalyticCorrelator {
    /// Uncorrelated outcomes with mean `r1`.
    pub fn uncorrelated(r1: f64) -> Self {
        Self { r1, terms: Vec::new() }
    }

    /// The leading-order TLS correlator: the zero-phase form when
    /// `sin(phi_R)` vanishes, the generic form otherwise.
    pub fn tls_weak_coupling(ensemble: &TlsEnsemble, schedule: &MeasurementSchedule) -> Self {
        if schedule.phi_r().sin().abs() < 1e-12 {
            Self::tls_zero_phase(ensemble, schedule)
        } else {
            Self::tls_generic_phase(ensemble, schedule)
        }
    }

    pub fn tls_generic_phase(ensemble: &TlsEnsemble, schedule: &MeasurementSchedule) -> Self {
        let f = schedule.decoherence_factor();
        let pre = 0.25 * f * f * schedule.phi_r().sin().powi(2);
        let terms = ensemble
            .iter()
            .map(|t| {
                let decay = t.relaxation_rate() * schedule.t_cyc();
                ExpTerm {
                    lag_one: pre * (t.weight() * t.v_coupling() * schedule.t_r()).powi(2) * (-decay).exp(),
                    decay,
                }
            })
            .collect();
        Self {
            r1: r1_weak_coupling(ensemble, schedule),
            terms,
        }
    }

    pub fn tls_zero_phase(ensemble: &TlsEnsemble, schedule: &MeasurementSchedule) -> Self {
        let f = schedule.decoherence_factor();
        let pre = 0.25 * f * f;
        let t_r2 = schedule.t_r() * schedule.t_r();
        let list = &ensemble.tls_list;
        let mut terms = Vec::new();
        for t in list {
            let a = t.weight() * t.v_coupling().powi(2) * t.rate_difference() / t.relaxation_rate() * t_r2;
            let decay = t.relaxation_rate() * schedule.t_cyc();
            terms.push(ExpTerm {
                lag_one: pre * a * a * (-decay).exp(),
                decay,
            });
        }
        for (i, t1) in list.iter().enumerate() {
            for t2 in &list[..i] {
                let a = t1.weight() * t2.weight() * t1.v_coupling() * t2.v_coupling() * t_r2;
                let decay = (t1.relaxation_rate() + t2.relaxation_rate()) * schedule.t_cyc();
                terms.push(ExpTerm {
                    lag_one: pre * a * a * (-decay).exp(),
                    decay,
                });
            }
        }
        terms.retain(|t| t.lag_one != 0.0);
        Self {
            r1: r1_weak_coupling(ensemble, schedule),
            terms,
        }
    }

    /// Weak Gaussian noise. Since `f_k = sum_c b_c e^{-W_c t_cyc k}` for
    /// `k >= 1`, the `f_k^2` part expands into pair terms.
    pub fn gaussian(model: &GaussianNoiseModel, schedule: &MeasurementSchedule) -> Self {
        let f = schedule.decoherence_factor();
        let (s, c) = schedule.phi_r().sin_cos();
        let (t_r, t_cyc) = (schedule.t_r(), schedule.t_cyc());
        let f0 = model.phase_autocovariance(t_r, t_cyc, 0);
        let pre = 0.25 * f * f * (-f0).exp();
        let comps: Vec<(f64, f64)> = model
            .components()
            .iter()
            .map(|comp| (crate::noise::component_phase_covariance(comp, t_r, t_cyc, 1), comp.rate * t_cyc))
            .collect();
        let mut terms = Vec::new();
        if s * s > 0.0 {
            terms.extend(comps.iter().map(|&(f1, x)| ExpTerm {
                lag_one: pre * s * s * f1,
                decay: x,
            }));
        }
        if c * c > 0.0 {
            for (i, &(fi, xi)) in comps.iter().enumerate() {
                for (j, &(fj, xj)) in comps[..=i].iter().enumerate() {
                    let mult = if i == j { 1.0 } else { 2.0 };
                    terms.push(ExpTerm {
                        lag_one: pre * 0.5 * c * c * mult * fi * fj,
                        decay: xi + xj,
                    });
                }
            }
        }
        terms.retain(|t| t.lag_one != 0.0);
        Self {
            r1: 0.5 * (1.0 + f * (-f0 / 2.0).exp() * c),
            terms,
        }
    }

    pub fn r2(&self, k: usize) -> f64 {
        let j = k as f64 - 1.0;
        self.terms.iter().map(|t| t.lag_one * (-t.decay * j).exp()).sum()
    }

    /// Tabulates `r2(1..=k_max)`.
    pub fn series(&self, k_max: usize) -> Result<CorrelatorSeries> {
        CorrelatorSeries::new(self.r1, (1..=k_max).map(|k| self.r2(k)).collect())
    }

    /// `sigma_M^2` from the variance law, summed in closed form.
    pub fn variance(&self, m_count: usize) -> Result<f64> {
        if m_count == 0 {
            return Err(domain("M", "must be >= 1"));
        }
        let mf = m_count as f64;
        let n = m_count - 1;
        let parts: Vec<f64> = self
            .terms
            .iter()
            .map(|t| t.lag_one * (n as f64 + weighted_lag_sum(n, t.decay)))
            .collect();
        Ok(self.r1 * (1.0 - self.r1) / mf + 2.0 / (mf * mf) * pairwise_sum(&parts))
    }

    /// `lim M sigma_M^2 = r1 (1 - r1) + 2 sum_j a_j / (1 - e^{-x_j})`.
    pub fn ergodic_asymptote(&self) -> Result<f64> {
        let mut parts = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if !(t.decay > 0.0) {
                return Err(domain("correlator", "a non-decaying term has no ergodic limit"));
            }
            parts.push(t.lag_one / -(-t.decay).exp_m1());
        }
        Ok(self.r1 * (1.0 - self.r1) + 2.0 * pairwise_sum(&parts))
    }
}

/// `sum_{k=1}^{n-1} (n - k) e^{-k x} = q (h(nx) - n h(x)) / (1 - q)^2` with
/// `q = e^{-x}` and `h(y) = e^{-y} - 1 + y`; this form avoids cancellation
/// for small `x`.
fn weighted_lag_sum(m: usize, x: f64) -> f64 {
    let mf = m as f64;
    if m == 0 {
        return 0.0;
    }
    if x == 0.0 {
        return mf * (mf - 1.0) / 2.0;
    }
    let one_minus_q = -(-x).exp_m1();
    (-x).exp() * (exp_neg_minus_one_plus(mf * x) - mf * exp_neg_minus_one_plus(x)) / (one_minus_q * one_minus_q)
}

impl CorrelatorSeries {
    /// Checks `r1 in [0, 1]` and `|r2(k)| <= r1 (1 - r1) + 1e-12`.
    pub fn new(r1: f64, r2: Vec<f64>) -> Result<Self> {
        if !(0.0..=1.0).contains(&r1) {
            return Err(domain("r1", format!("must lie in [0, 1], got {r1}")));
        }
        let cap = r1 * (1.0 - r1) + 1e-12;
        if let Some((k, v)) = r2.iter().enumerate().find(|(_, v)| !(v.abs() <= cap)) {
            return Err(domain(
                "r2",
                format!("|r2({})| = {} exceeds r1 (1 - r1) = {}", k + 1, v.abs(), cap - 1e-12),
            ));
        }
        Ok(Self { r1, r2 })
    }

    /// Wraps estimated correlators without the magnitude check, which sampling
    /// noise may violate.
    pub fn empirical(r1: f64, r2: Vec<f64>) -> Self {
        Self { r1, r2 }
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    /// `r2(1), r2(2), ...`.
    pub fn r2(&self) -> &[f64] {
        &self.r2
    }

    pub fn k_max(&self) -> usize {
        self.r2.len()
    }
}

/// `sigma_M^2 = r1 (1 - r1) / M + (2/M) sum_{k=1}^{M-1} r2(k) (1 - k/M)`.
///
/// A series shorter than `M - 1` lags is extended by a geometric tail fitted
/// to its last two values; the prediction fails if that bound exceeds 1% of
/// the result.
pub fn variance_prediction(series: &CorrelatorSeries, m_count: usize) -> Result<VariancePrediction> {
    if m_count == 0 {
        return Err(domain("M", "must be >= 1"));
    }
    let mf = m_count as f64;
    let needed = m_count - 1;
    let used = needed.min(series.k_max());
    let parts: Vec<f64> = series.r2[..used]
        .iter()
        .enumerate()
        .map(|(i, r)| r * (1.0 - (i + 1) as f64 / mf))
        .collect();
    let value = series.r1 * (1.0 - series.r1) / mf + 2.0 / mf * pairwise_sum(&parts);
    if used == needed {
        return Ok(VariancePrediction { value, tail_bound: 0.0 });
    }
    let k = series.k_max();
    if k < 2 {
        return Err(Error::Range(format!("{k} lags cannot bound the tail for M = {m_count}")));
    }
    let (last, prev) = (series.r2[k - 1].abs(), series.r2[k - 2].abs());
    let q = if prev > 0.0 { last / prev } else { 0.0 };
    if q >= 1.0 {
        return Err(Error::Range(format!("correlator is not decaying at lag {k}; tail unbounded")));
    }
    let tail_bound = 2.0 / mf * last * q / (1.0 - q);
    if tail_bound > 0.01 * value.abs() {
        return Err(Error::Range(format!(
            "tail bound {tail_bound} beyond lag {k} exceeds 1% of the prediction {value}"
        )));
    }
    Ok(VariancePrediction { value, tail_bound })
}

/// `lim_{M -> inf} M sigma_M^2` for an exponential correlator.
pub fn ergodic_asymptote(correlator: &AnalyticCorrelator) -> Result<f64> {
    correlator.ergodic_asymptote()
}
