use super::{Estimate, MeasurementSchedule};
use crate::error::{Error, Result};

/// Counts of `m = sum_k x_k` over independent series, `m = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeHistogram {
    counts: Vec<u64>,
    n_series: u64,
    schedule: MeasurementSchedule,
}

impl OutcomeHistogram {
    pub fn empty(schedule: MeasurementSchedule) -> Self {
        Self {
            counts: vec![0; schedule.m_count() + 1],
            n_series: 0,
            schedule,
        }
    }

    pub fn from_counts(schedule: MeasurementSchedule, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != schedule.m_count() + 1 {
            return Err(Error::Range(format!(
                "histogram needs {} bins, got {}",
                schedule.m_count() + 1,
                counts.len()
            )));
        }
        let n_series = counts.iter().sum();
        Ok(Self {
            counts,
            n_series,
            schedule,
        })
    }

    pub fn record(&mut self, m: usize) {
        self.counts[m] += 1;
        self.n_series += 1;
    }

    /// Adds the counts of `other`, which must share the schedule.
    pub fn merge(&mut self, other: &OutcomeHistogram) -> Result<()> {
        if other.schedule != self.schedule {
            return Err(Error::Range("cannot merge histograms of different schedules".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n_series += other.n_series;
        Ok(())
    }

    pub fn m_count(&self) -> usize {
        self.schedule.m_count()
    }

    pub fn m_counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n_series(&self) -> u64 {
        self.n_series
    }

    pub fn schedule(&self) -> &MeasurementSchedule {
        &self.schedule
    }

    /// `rho(m|M) = counts / n_series`.
    pub fn rho(&self) -> Vec<f64> {
        let n = self.n_series as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Raw moments `sum_m (m/M)^p rho(m)` for `p = 1..=4`.
    pub(crate) fn moments(&self) -> [f64; 4] {
        let mf = self.m_count() as f64;
        let n = self.n_series as f64;
        let mut acc = [0.0; 4];
        for (m, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let x = m as f64 / mf;
            let w = c as f64 / n;
            acc[0] += w * x;
            acc[1] += w * x * x;
            acc[2] += w * x * x * x;
            acc[3] += w * x * x * x * x;
        }
        acc
    }

    /// Grand mean of the bits. Its standard error uses the spread of the
    /// per-series means `m/M`, the series being the independent unit.
    pub fn r1(&self) -> Estimate {
        let [m1, m2, ..] = self.moments();
        let n = self.n_series as f64;
        let se = if self.n_series < 2 {
            f64::NAN
        } else {
            ((m2 - m1 * m1).max(0.0) * n / (n - 1.0) / n).sqrt()
        };
        Estimate { value: m1, se }
    }

    /// Empirical moment generating function `<e^{t m / M}>`.
    pub fn mgf(&self, t: f64) -> f64 {
        let mf = self.m_count() as f64;
        let n = self.n_series as f64;
        self.counts
            .iter()
            .enumerate()
            .map(|(m, &c)| c as f64 / n * (t * m as f64 / mf).exp())
            .sum()
    }

    /// Total-variation distance `1/2 sum |rho - q|` to a reference within the
    /// same support.
    pub fn tv_distance(&self, reference: &[f64]) -> Result<f64> {
        if reference.len() != self.counts.len() {
            return Err(Error::Range(format!(
                "reference has {} bins, histogram {}",
                reference.len(),
                self.counts.len()
            )));
        }
        Ok(0.5 * self.rho().iter().zip(reference).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }
}
