use super::DistributionVector;
use crate::error::{domain, Result};
use crate::noise::TlsParams;
use crate::protocol::MeasurementSchedule;

/// Largest `W t_R` for which the frozen-window approximation is accepted.
pub const DP_MAX_WTR: f64 = 1e-2;
/// Largest `M` (the cost is `O(M^2)`).
pub const DP_MAX_M: usize = 1000;

/// Exact `rho(m|M)` for one fluctuator whose state is frozen inside each
/// window and follows the two-state Markov chain between window starts.
///
/// The recursion carries `P[state][m]` through the `M` windows: a Bernoulli
/// step with `p(+-V t_R)`, then the transition matrix over `t_cyc`.
pub fn dp_oracle_single_tls(tls: &TlsParams, schedule: &MeasurementSchedule) -> Result<DistributionVector> {
    let w = tls.relaxation_rate();
    if w * schedule.t_r() > DP_MAX_WTR {
        return Err(domain(
            "tls",
            format!("W t_R = {} exceeds {DP_MAX_WTR}", w * schedule.t_r()),
        ));
    }
    let m = schedule.m_count();
    if m > DP_MAX_M {
        return Err(domain("M", format!("{m} exceeds {DP_MAX_M}")));
    }
    let (w0, w1) = tls.occupations();
    let p = [
        schedule.outcome_probability(tls.shift(0) * schedule.t_r()),
        schedule.outcome_probability(tls.shift(1) * schedule.t_r()),
    ];
    let relax = -(-w * schedule.t_cyc()).exp_m1();
    let p01 = w1 * relax;
    let p10 = w0 * relax;

    let mut cur = [vec![0.0; m + 1], vec![0.0; m + 1]];
    cur[0][0] = w0;
    cur[1][0] = w1;
    let mut next = [vec![0.0; m + 1], vec![0.0; m + 1]];
    for k in 0..m {
        for s in 0..2 {
            let (pk, qk) = (p[s], 1.0 - p[s]);
            let row = &cur[s];
            let out = &mut next[s];
            out[0] = row[0] * qk;
            for j in 1..=k + 1 {
                out[j] = row[j] * qk + row[j - 1] * pk;
            }
        }
        if k + 1 < m {
            for j in 0..=k + 1 {
                let (a, b) = (next[0][j], next[1][j]);
                cur[0][j] = a * (1.0 - p01) + b * p10;
                cur[1][j] = a * p01 + b * (1.0 - p10);
            }
        } else {
            std::mem::swap(&mut cur, &mut next);
        }
    }
    let rho = cur[0].iter().zip(&cur[1]).map(|(a, b)| a + b).collect();
    Ok(DistributionVector { rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{r1_weak_coupling, single_asymmetric_static};
    use crate::noise::TlsEnsemble;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn frozen_limit_reproduces_static_mixture() {
        let tls = TlsParams::new(0.2, 1e-13, 3e-13).unwrap();
        let s = MeasurementSchedule::unit(3.0, 200, FRAC_PI_4).unwrap();
        let dp = dp_oracle_single_tls(&tls, &s).unwrap();
        let st = single_asymmetric_static(&tls, &s).unwrap();
        assert!(dp.tv_distance(&st.rho).unwrap() < 1e-9);
        assert!((dp.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_matches_weak_coupling_in_ergodic_regime() {
        let tls = TlsParams::symmetric(0.05, 1e-2).unwrap();
        let s = MeasurementSchedule::unit(3.0, 1000, FRAC_PI_4).unwrap();
        let dp = dp_oracle_single_tls(&tls, &s).unwrap();
        let r1 = r1_weak_coupling(&TlsEnsemble::new(vec![tls]), &s);
        assert!((dp.mean() - r1).abs() < 1e-5, "{} {r1}", dp.mean());
    }

    #[test]
    fn guards() {
        let s = MeasurementSchedule::unit(3.0, 10, 0.0).unwrap();
        assert!(dp_oracle_single_tls(&TlsParams::symmetric(0.2, 0.1).unwrap(), &s).is_err());
        let big = MeasurementSchedule::unit(3.0, 1001, 0.0).unwrap();
        assert!(dp_oracle_single_tls(&TlsParams::symmetric(0.2, 1e-4).unwrap(), &big).is_err());
    }
}
