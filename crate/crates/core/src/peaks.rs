//! Local maxima and mode masses of binned distributions.

/// A local maximum of a sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub value: f64,
    /// Height above the higher of the two bounding minima.
    pub prominence: f64,
}

/// Centered moving average over `2 * half_width + 1` bins, shrinking at the
/// edges.
pub fn smooth(values: &[f64], half_width: usize) -> Vec<f64> {
    if half_width == 0 {
        return values.to_vec();
    }
    let n = values.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half_width);
            let hi = (i + half_width + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Local maxima whose prominence is at least `min_prominence` times the
/// global maximum, in index order. Plateaus report their left end.
pub fn find_peaks(values: &[f64], min_prominence: f64) -> Vec<Peak> {
    let n = values.len();
    let top = values.iter().copied().fold(0.0, f64::max);
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < n {
        // extent of the plateau starting at i
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        let left_lower = i == 0 || values[i - 1] < values[i];
        let right_lower = j + 1 == n || values[j + 1] < values[i];
        if left_lower && right_lower && values[i] > 0.0 {
            let v = values[i];
            // an edge of the array bounds no side; a maximum at the edge is
            // measured against the other side only
            let mut left_min = None;
            let mut k = i;
            // an equal peak to the left counts as higher, so ties keep one winner
            while k > 0 && values[k - 1] < v {
                k -= 1;
                left_min = Some(left_min.map_or(values[k], |m: f64| m.min(values[k])));
            }
            let mut right_min = None;
            let mut k = j;
            while k + 1 < n && values[k + 1] <= v {
                k += 1;
                right_min = Some(right_min.map_or(values[k], |m: f64| m.min(values[k])));
            }
            let base = match (left_min, right_min) {
                (Some(a), Some(b)) => a.max(b),
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => 0.0,
            };
            let prominence = v - base;
            if prominence >= min_prominence * top {
                peaks.push(Peak { index: i, value: v, prominence });
            }
        }
        i = j + 1;
    }
    peaks
}

/// Splits the total mass between consecutive peaks at the lowest bin of each
/// valley and returns the mass of each mode.
pub fn mode_masses(values: &[f64], peaks: &[Peak]) -> Vec<f64> {
    if peaks.is_empty() {
        return Vec::new();
    }
    let mut cuts = vec![0usize];
    for w in peaks.windows(2) {
        let (a, b) = (w[0].index, w[1].index);
        let valley = (a..=b)
            .min_by(|&x, &y| values[x].total_cmp(&values[y]))
            .unwrap_or(a);
        cuts.push(valley);
    }
    cuts.push(values.len());
    cuts.windows(2)
        .enumerate()
        .map(|(i, w)| {
            // the valley bin belongs to the left mode
            let lo = if i == 0 { 0 } else { w[0] + 1 };
            let hi = if i + 1 == cuts.len() - 1 { w[1] } else { w[1] + 1 };
            values[lo..hi].iter().sum()
        })
        .collect()
}
