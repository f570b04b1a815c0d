use crate::error::{domain, Error, Result};
use crate::numeric::{add_binomial_pmf, pairwise_sum};

/// A probability vector over `m = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionVector {
    pub rho: Vec<f64>,
}

impl DistributionVector {
    /// Wraps `rho` after checking non-negativity and normalization to 1e-10.
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::Range("distribution needs at least one bin".into()));
        }
        if rho.iter().any(|&r| !(r >= 0.0) || !r.is_finite()) {
            return Err(Error::Range("distribution entries must be finite and >= 0".into()));
        }
        let total = pairwise_sum(&rho);
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Range(format!("distribution sums to {total}, not 1")));
        }
        Ok(Self { rho })
    }

    pub fn m_count(&self) -> usize {
        self.rho.len() - 1
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.rho)
    }

    /// Mean of `m/M`.
    pub fn mean(&self) -> f64 {
        let mf = self.m_count() as f64;
        self.rho.iter().enumerate().map(|(m, r)| r * m as f64 / mf).sum()
    }

    /// `sum (m/M)^2 rho - mean^2`.
    pub fn variance(&self) -> f64 {
        let mf = self.m_count() as f64;
        let mean = self.mean();
        self.rho
            .iter()
            .enumerate()
            .map(|(m, r)| r * (m as f64 / mf - mean).powi(2))
            .sum()
    }

    pub fn tv_distance(&self, other: &[f64]) -> Result<f64> {
        if other.len() != self.rho.len() {
            return Err(Error::Range(format!(
                "cannot compare distributions of {} and {} bins",
                self.rho.len(),
                other.len()
            )));
        }
        Ok(0.5 * self.rho.iter().zip(other).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }
}

/// `C(M, m) r1^m (1 - r1)^{M-m}`, in log space.
pub fn binomial_distribution(m_count: usize, r1: f64) -> Result<DistributionVector> {
    if m_count == 0 {
        return Err(domain("M", "must be >= 1"));
    }
    if !(0.0..=1.0).contains(&r1) {
        return Err(domain("r1", format!("must lie in [0, 1], got {r1}")));
    }
    let mut rho = vec![0.0; m_count + 1];
    add_binomial_pmf(&mut rho, m_count as u64, r1, 1.0);
    Ok(DistributionVector { rho })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        let d = binomial_distribution(1, 0.3).unwrap();
        assert!((d.rho[0] - 0.7).abs() < 1e-15 && (d.rho[1] - 0.3).abs() < 1e-15);
        let d = binomial_distribution(2, 0.5).unwrap();
        for (a, b) in d.rho.iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(binomial_distribution(0, 0.5).is_err());
        assert!(binomial_distribution(3, 1.5).is_err());
    }

    #[test]
    fn large_binomial_moments() {
        let m = 100_000;
        let r1 = 0.8536;
        let d = binomial_distribution(m, r1).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-10);
        assert!((d.mean() - r1).abs() < 1e-10);
        let v = r1 * (1.0 - r1) / m as f64;
        assert!((d.variance() / v - 1.0).abs() < 1e-8);
    }

    #[test]
    fn new_checks_normalization() {
        assert!(DistributionVector::new(vec![0.5, 0.4]).is_err());
        assert!(DistributionVector::new(vec![1.5, -0.5]).is_err());
        assert!(DistributionVector::new(vec![0.5, 0.5]).is_ok());
    }
}
