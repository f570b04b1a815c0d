use super::distribution::DistributionVector;
use crate::error::{domain, Error, Result};
use crate::noise::{TlsEnsemble, TlsParams};
use crate::numeric::{add_binomial_pmf, composite_gauss_legendre, ln_choose, pairwise_sum};
use crate::protocol::MeasurementSchedule;

/// Largest ensemble accepted by [`enumerate_static_phases`].
pub const MAX_ENUMERATED_TLS: usize = 24;

const DEDUP_REL: f64 = 1e-12;

/// Discrete distribution of the frozen phase `theta`, sorted by `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticPhaseTable {
    entries: Vec<(f64, f64)>,
}

impl StaticPhaseTable {
    /// Sorts, merges phases closer than `1e-12 * max|theta|` and checks that
    /// the probabilities are positive and sum to 1 within 1e-12.
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(domain("table", "needs at least one entry"));
        }
        if entries.iter().any(|&(t, p)| !t.is_finite() || !(p > 0.0)) {
            return Err(domain("table", "phases must be finite and probabilities positive"));
        }
        let scale = entries.iter().map(|e| e.0.abs()).fold(0.0, f64::max);
        let entries = dedup(entries, DEDUP_REL * scale);
        let total = pairwise_sum(&entries.iter().map(|e| e.1).collect::<Vec<_>>());
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain("table", format!("probabilities sum to {total}")));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `sum P(theta) p(theta)`.
    pub fn mean_probability(&self, schedule: &MeasurementSchedule) -> f64 {
        self.entries.iter().map(|&(t, p)| p * schedule.outcome_probability(t)).sum()
    }
}

fn dedup(mut entries: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(entries.len());
    for (t, p) in entries {
        match out.last_mut() {
            Some(last) if t - last.0 <= tol => last.1 += p,
            _ => out.push((t, p)),
        }
    }
    out
}

/// All `2^N` frozen configurations: `theta = sum_n V_n (-1)^{j_n} t_R` with
/// probability `prod_n w_{j_n}`. Built one fluctuator at a time, merging equal
/// phases as it goes.
pub fn enumerate_static_phases(ensemble: &TlsEnsemble, t_r: f64) -> Result<StaticPhaseTable> {
    if ensemble.len() > MAX_ENUMERATED_TLS {
        return Err(Error::Capacity(format!(
            "{} fluctuators exceed the enumeration limit of {MAX_ENUMERATED_TLS}; \
             use symmetric_static_distribution for identical symmetric fluctuators",
            ensemble.len()
        )));
    }
    let scale: f64 = ensemble.iter().map(|t| t.v_coupling().abs() * t_r).sum();
    let tol = DEDUP_REL * scale;
    let mut entries = vec![(0.0, 1.0)];
    for tls in ensemble.iter() {
        let (w0, w1) = tls.occupations();
        let dv = tls.v_coupling() * t_r;
        let mut next = Vec::with_capacity(2 * entries.len());
        for &(t, p) in &entries {
            next.push((t + dv, p * w0));
            next.push((t - dv, p * w1));
        }
        entries = dedup(next, tol);
    }
    StaticPhaseTable::new(entries)
}

/// Mixture of binomials `sum_l P_l Binomial(M, p(theta_l))`.
pub fn static_distribution(table: &StaticPhaseTable, schedule: &MeasurementSchedule) -> Result<DistributionVector> {
    if table.is_empty() {
        return Err(domain("table", "needs at least one entry"));
    }
    let m = schedule.m_count();
    let mut rho = vec![0.0; m + 1];
    for &(theta, p) in table.entries() {
        add_binomial_pmf(&mut rho, m as u64, schedule.outcome_probability(theta), p);
    }
    Ok(DistributionVector { rho })
}

/// Two-branch mixture for one fluctuator: `theta = +V t_R` with weight
/// `W10/W`, `-V t_R` with weight `W01/W`.
pub fn single_asymmetric_static(tls: &TlsParams, schedule: &MeasurementSchedule) -> Result<DistributionVector> {
    let table = enumerate_static_phases(&TlsEnsemble::new(vec![*tls]), schedule.t_r())?;
    static_distribution(&table, schedule)
}

/// `N` identical symmetric fluctuators: `theta_l = V t_R (2l - N)` with
/// weight `C(N, l) / 2^N`.
pub fn symmetric_static_distribution(
    n_tls: usize,
    v_tr: f64,
    schedule: &MeasurementSchedule,
) -> Result<DistributionVector> {
    if n_tls == 0 {
        return Err(domain("n_tls", "must be >= 1"));
    }
    let n = n_tls as u64;
    let ln2n = n as f64 * std::f64::consts::LN_2;
    let entries: Vec<(f64, f64)> = (0..=n)
        .map(|l| {
            let theta = v_tr * (2.0 * l as f64 - n as f64);
            (theta, (ln_choose(n, l) - ln2n).exp())
        })
        .collect();
    static_distribution(&StaticPhaseTable::new(entries)?, schedule)
}

/// Static mixture over a Gaussian phase `theta ~ N(0, f0)`. Composite
/// 20-point Gauss–Legendre panels over `+-8 sqrt(f0)`, doubled until the
/// total-variation change drops below 1e-8.
pub fn gaussian_static_distribution(f0: f64, schedule: &MeasurementSchedule) -> Result<DistributionVector> {
    if !(f0.is_finite() && f0 >= 0.0) {
        return Err(domain("f0", format!("must be finite and >= 0, got {f0}")));
    }
    let m = schedule.m_count();
    if f0 == 0.0 {
        let mut rho = vec![0.0; m + 1];
        add_binomial_pmf(&mut rho, m as u64, schedule.outcome_probability(0.0), 1.0);
        return Ok(DistributionVector { rho });
    }
    const ORDER: usize = 20;
    const MAX_PANELS: usize = 2560;
    let sd = f0.sqrt();
    let eval = |panels: usize| {
        let mut rho = vec![0.0; m + 1];
        let nodes = composite_gauss_legendre(-8.0 * sd, 8.0 * sd, panels, ORDER);
        let norm: f64 = nodes.iter().map(|&(x, w)| w * density(x, sd)).sum();
        for (x, w) in nodes {
            add_binomial_pmf(&mut rho, m as u64, schedule.outcome_probability(x), w * density(x, sd) / norm);
        }
        rho
    };
    let mut panels = 10;
    let mut rho = eval(panels);
    while panels < MAX_PANELS {
        panels *= 2;
        let next = eval(panels);
        let tv = 0.5 * rho.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum::<f64>();
        rho = next;
        if tv < 1e-8 {
            break;
        }
    }
    Ok(DistributionVector { rho })
}

fn density(x: f64, sd: f64) -> f64 {
    (-0.5 * (x / sd).powi(2)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}
