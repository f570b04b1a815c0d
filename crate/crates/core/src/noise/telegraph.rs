use rand::Rng;
use rand_distr::Exp1;

use super::TlsParams;
use crate::error::{require_positive, Error, Result};

/// One realization of a two-state Markov chain on `[0, duration]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TelegraphTrajectory {
    initial_state: u8,
    switch_times: Vec<f64>,
    duration: f64,
}

impl TelegraphTrajectory {
    /// Builds a trajectory from explicit switch times.
    pub fn new(initial_state: u8, switch_times: Vec<f64>, duration: f64) -> Result<Self> {
        require_positive("duration", duration)?;
        if initial_state > 1 {
            return Err(Error::Domain {
                name: "initial_state",
                reason: format!("must be 0 or 1, got {initial_state}"),
            });
        }
        let increasing = switch_times.windows(2).all(|w| w[0] < w[1]);
        let inside = switch_times.iter().all(|&t| (0.0..=duration).contains(&t));
        if !increasing || !inside {
            return Err(Error::Domain {
                name: "switch_times",
                reason: "must be strictly increasing and within [0, duration]".into(),
            });
        }
        Ok(Self {
            initial_state,
            switch_times,
            duration,
        })
    }

    pub fn initial_state(&self) -> u8 {
        self.initial_state
    }

    pub fn switch_times(&self) -> &[f64] {
        &self.switch_times
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// State just after time `t`.
    pub fn state_at(&self, t: f64) -> u8 {
        let n = self.switch_times.partition_point(|&s| s <= t);
        self.initial_state ^ (n as u8 & 1)
    }

    /// Exact integral of `V (-1)^{state(t)}` over `[start, start + t_r]`.
    pub fn window_phase(&self, v_coupling: f64, window_start: f64, t_r: f64) -> Result<f64> {
        let end = window_start + t_r;
        if !(window_start >= 0.0 && t_r >= 0.0 && end <= self.duration * (1.0 + 1e-12)) {
            return Err(Error::Range(format!(
                "window [{window_start}, {end}] outside trajectory [0, {}]",
                self.duration
            )));
        }
        let idx = self.switch_times.partition_point(|&s| s <= window_start);
        Ok(self.integrate_from(idx, v_coupling, window_start, end).0)
    }

    /// Integrates from `start` to `end` given that `idx` switches occur at or
    /// before `start`; returns the integral and the index of the first switch
    /// at or after `end`.
    fn integrate_from(&self, mut idx: usize, v: f64, start: f64, end: f64) -> (f64, usize) {
        let mut state = self.initial_state ^ (idx as u8 & 1);
        let mut cursor = start;
        let mut acc = 0.0;
        while idx < self.switch_times.len() && self.switch_times[idx] < end {
            let s = self.switch_times[idx];
            acc += signed(v, state) * (s - cursor);
            cursor = s;
            state ^= 1;
            idx += 1;
        }
        acc += signed(v, state) * (end - cursor);
        (acc, idx)
    }

    /// Adds the phase of every periodic window `[k t_cyc, k t_cyc + t_r]`,
    /// `k = 0..out.len()`, into `out`. Sweeps the switch list once.
    pub fn accumulate_window_phases(&self, v: f64, t_r: f64, t_cyc: f64, out: &mut [f64]) {
        if self.switch_times.is_empty() {
            let theta = signed(v, self.initial_state) * t_r;
            out.iter_mut().for_each(|o| *o += theta);
            return;
        }
        let mut idx = 0usize;
        for (k, o) in out.iter_mut().enumerate() {
            let start = k as f64 * t_cyc;
            while idx < self.switch_times.len() && self.switch_times[idx] <= start {
                idx += 1;
            }
            let (theta, next) = self.integrate_from(idx, v, start, start + t_r);
            idx = next;
            *o += theta;
        }
    }
}

#[inline]
fn signed(v: f64, state: u8) -> f64 {
    if state == 0 {
        v
    } else {
        -v
    }
}

/// Event-driven simulation: the dwell time in state `i` is exponential with
/// the exit rate of `i`.
pub fn simulate_telegraph<R: Rng + ?Sized>(
    tls: &TlsParams,
    duration: f64,
    initial_state: u8,
    rng: &mut R,
) -> TelegraphTrajectory {
    let mut state = initial_state & 1;
    let mut t = 0.0;
    let mut switch_times = Vec::new();
    loop {
        let e: f64 = rng.sample(Exp1);
        t += e / tls.exit_rate(state);
        if t > duration {
            break;
        }
        // A dwell shorter than one ulp of `t` collapses two switches into one
        // instant; drop both so the list stays strictly increasing.
        if switch_times.last().is_some_and(|&last| t <= last) {
            switch_times.pop();
        } else {
            switch_times.push(t);
        }
        state ^= 1;
    }
    TelegraphTrajectory {
        initial_state: initial_state & 1,
        switch_times,
        duration,
    }
}
