use rand::Rng;

use super::{OutcomeHistogram, OutcomeSeries};
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Point estimate with a standard error (`NaN` when not estimable).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// `|value - target| <= n_sigma * se`.
    pub fn agrees_with(&self, target: f64, n_sigma: f64) -> bool {
        (self.value - target).abs() <= n_sigma * self.se
    }
}

/// Grand mean of all bits with a between-series standard error.
pub fn empirical_r1(series: &[OutcomeSeries]) -> Result<Estimate> {
    let first = series.first().ok_or_else(|| Error::Range("need at least one series".into()))?;
    let m = first.bits.len();
    if series.iter().any(|s| s.bits.len() != m) {
        return Err(Error::Range("series have different lengths".into()));
    }
    let n = series.len() as f64;
    let means: Vec<f64> = series.iter().map(|s| s.ones() as f64 / m as f64).collect();
    let value = means.iter().sum::<f64>() / n;
    let se = if series.len() < 2 {
        f64::NAN
    } else {
        let var = means.iter().map(|x| (x - value).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    };
    Ok(Estimate { value, se })
}

/// Centered pair correlator at lag `k` with the plug-in grand mean. The
/// plug-in mean biases the result by `O(1/(M n_series))`.
pub fn empirical_r2(series: &[OutcomeSeries], k: usize) -> Result<Estimate> {
    let first = series.first().ok_or_else(|| Error::Range("need at least one series".into()))?;
    let m = first.bits.len();
    let mut acc = CorrelatorAccumulator::new(m, vec![k])?;
    let mut words = Vec::new();
    for s in series {
        if s.bits.len() != m {
            return Err(Error::Range("series have different lengths".into()));
        }
        words.clear();
        words.resize(m.div_ceil(64), 0u64);
        for (i, &b) in s.bits.iter().enumerate() {
            words[i / 64] |= u64::from(b & 1) << (i % 64);
        }
        acc.add_packed(&words);
    }
    Ok(acc.estimates()[0])
}

/// `sigma_M^2 = sum_m (m/M)^2 rho(m) - r1^2` with the delta-method standard
/// error `sqrt((mu_4 - sigma^4) / N)`.
pub fn empirical_variance(hist: &OutcomeHistogram) -> Result<Estimate> {
    if hist.n_series() < 2 {
        return Err(Error::Range("variance needs at least two series".into()));
    }
    let [m1, m2, m3, m4] = hist.moments();
    let var = (m2 - m1 * m1).max(0.0);
    let mu4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1.powi(4);
    let se = ((mu4 - var * var).max(0.0) / hist.n_series() as f64).sqrt();
    Ok(Estimate { value: var, se })
}

/// Bootstrap standard error of [`empirical_variance`]: `n_boot` resamples of
/// `n_series` series drawn from the histogram.
pub fn bootstrap_variance_se(hist: &OutcomeHistogram, n_boot: usize, rng: &mut Stream) -> Result<f64> {
    if hist.n_series() < 2 || n_boot < 2 {
        return Err(Error::Range("bootstrap needs two series and two resamples".into()));
    }
    let mut cdf = Vec::with_capacity(hist.m_counts().len());
    let mut run = 0u64;
    for &c in hist.m_counts() {
        run += c;
        cdf.push(run);
    }
    let mf = hist.m_count() as f64;
    let n = hist.n_series();
    let mut values = Vec::with_capacity(n_boot);
    for _ in 0..n_boot {
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let u = rng.random_range(0..n);
            let m = cdf.partition_point(|&c| c <= u);
            let x = m as f64 / mf;
            s1 += x;
            s2 += x * x;
        }
        let mean = s1 / n as f64;
        values.push(s2 / n as f64 - mean * mean);
    }
    let mean = values.iter().sum::<f64>() / n_boot as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n_boot as f64 - 1.0);
    Ok(var.sqrt())
}

/// Exact integer sums needed for the centered correlators at a fixed set of
/// lags. Per series and lag `k` it records `A = sum_n x_n x_{n+k}` and
/// `U = sum_n (x_n + x_{n+k})`, `n < M - k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorAccumulator {
    m: usize,
    lags: Vec<usize>,
    n_series: u64,
    ones: u64,
    sum_a: Vec<u64>,
    sum_u: Vec<u64>,
    sum_aa: Vec<u128>,
    sum_au: Vec<u128>,
    sum_uu: Vec<u128>,
}

impl CorrelatorAccumulator {
    pub fn new(m: usize, lags: Vec<usize>) -> Result<Self> {
        if let Some(&k) = lags.iter().find(|&&k| k >= m) {
            return Err(Error::Range(format!("lag {k} must be < M = {m}")));
        }
        let n = lags.len();
        Ok(Self {
            m,
            lags,
            n_series: 0,
            ones: 0,
            sum_a: vec![0; n],
            sum_u: vec![0; n],
            sum_aa: vec![0; n],
            sum_au: vec![0; n],
            sum_uu: vec![0; n],
        })
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_series(&self) -> u64 {
        self.n_series
    }

    /// Adds one series given as packed bits (bit `n % 64` of word `n / 64`,
    /// zero past `M`).
    pub fn add_packed(&mut self, words: &[u64]) {
        debug_assert_eq!(words.len(), self.m.div_ceil(64));
        let mut prefix = Vec::with_capacity(words.len() + 1);
        prefix.push(0u64);
        for w in words {
            prefix.push(prefix.last().unwrap() + u64::from(w.count_ones()));
        }
        let ones_before = |j: usize| -> u64 {
            let (q, r) = (j / 64, j % 64);
            let partial = if r == 0 { 0 } else { (words[q] & ((1u64 << r) - 1)).count_ones() };
            prefix[q] + u64::from(partial)
        };
        let total = *prefix.last().unwrap();
        self.n_series += 1;
        self.ones += total;
        for (i, &k) in self.lags.iter().enumerate() {
            let a = shifted_and_count(words, k);
            let u = ones_before(self.m - k) + total - ones_before(k);
            self.sum_a[i] += a;
            self.sum_u[i] += u;
            self.sum_aa[i] += u128::from(a) * u128::from(a);
            self.sum_au[i] += u128::from(a) * u128::from(u);
            self.sum_uu[i] += u128::from(u) * u128::from(u);
        }
    }

    pub fn merge(&mut self, other: &CorrelatorAccumulator) -> Result<()> {
        if other.m != self.m || other.lags != self.lags {
            return Err(Error::Range("cannot merge correlators with different M or lags".into()));
        }
        self.n_series += other.n_series;
        self.ones += other.ones;
        for i in 0..self.lags.len() {
            self.sum_a[i] += other.sum_a[i];
            self.sum_u[i] += other.sum_u[i];
            self.sum_aa[i] += other.sum_aa[i];
            self.sum_au[i] += other.sum_au[i];
            self.sum_uu[i] += other.sum_uu[i];
        }
        Ok(())
    }

    /// Grand mean of the bits.
    pub fn r1(&self) -> f64 {
        self.ones as f64 / (self.n_series as f64 * self.m as f64)
    }

    /// `r2(k)` for every lag, with standard errors from the spread of the
    /// per-series lag averages.
    pub fn estimates(&self) -> Vec<Estimate> {
        let r = self.r1();
        let n = self.n_series as f64;
        self.lags
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let l = (self.m - k) as f64;
                let mean_y = (self.sum_a[i] as f64 - r * self.sum_u[i] as f64) / (n * l);
                let value = mean_y + r * r;
                let se = if self.n_series < 2 {
                    f64::NAN
                } else {
                    let sum_yy = (self.sum_aa[i] as f64 - 2.0 * r * self.sum_au[i] as f64
                        + r * r * self.sum_uu[i] as f64)
                        / (l * l);
                    let var = ((sum_yy - n * mean_y * mean_y) / (n - 1.0)).max(0.0);
                    (var / n).sqrt()
                };
                Estimate { value, se }
            })
            .collect()
    }
}

/// `sum_n x_n x_{n+k}` over packed bits.
fn shifted_and_count(words: &[u64], k: usize) -> u64 {
    let (q, r) = (k / 64, k % 64);
    let len = words.len();
    let mut total = 0u64;
    for i in 0..len.saturating_sub(q) {
        let lo = words[i + q] >> r;
        let hi = if r != 0 && i + q + 1 < len { words[i + q + 1] << (64 - r) } else { 0 };
        total += u64::from((words[i] & (lo | hi)).count_ones());
    }
    total
}
