//! Coincidence counting and cross-correlation histograms over sorted tag streams.

use crate::error::{Error, Result};
use crate::tcspc::TimeTag;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceResult {
    pub window_ps: f64,
    pub count: u64,
    pub duration_s: f64,
    pub rate_hz: f64,
}

fn check_sorted(tags: &[TimeTag], name: &str) -> Result<()> {
    if tags
        .windows(2)
        .any(|w| w[1].timestamp_ps < w[0].timestamp_ps)
    {
        return Err(Error::arg(format!(
            "{name} tag stream is not sorted by timestamp"
        )));
    }
    Ok(())
}

/// Counts one-to-one pairs with `|t_a − t_b| ≤ τ_w/2` in a single merge pass.
///
/// The earliest unmatched tag on either side is matched to the earliest
/// partner still inside its window; this yields a maximum matching for sorted
/// streams.
pub fn count_coincidences(
    a: &[TimeTag],
    b: &[TimeTag],
    window_ps: f64,
    duration_s: f64,
) -> Result<CoincidenceResult> {
    check_sorted(a, "first")?;
    check_sorted(b, "second")?;
    if !(window_ps >= 0.0 && window_ps.is_finite()) {
        return Err(Error::arg(format!(
            "window must be >= 0, got {window_ps} ps"
        )));
    }
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::arg(format!(
            "duration must be > 0, got {duration_s} s"
        )));
    }
    let (mut i, mut j, mut count) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        let d = b[j].timestamp_ps as f64 - a[i].timestamp_ps as f64;
        if 2.0 * d < -window_ps {
            j += 1;
        } else if 2.0 * d > window_ps {
            i += 1;
        } else {
            count += 1;
            i += 1;
            j += 1;
        }
    }
    Ok(CoincidenceResult {
        window_ps,
        count,
        duration_s,
        rate_hz: count as f64 / duration_s,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub bin_ps: u64,
    pub span_ps: u64,
    /// Bin `k` covers `[−span/2 + k·bin, −span/2 + (k+1)·bin)`; the last bin also holds `+span/2`.
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn bin_centres_ps(&self) -> impl Iterator<Item = f64> + '_ {
        let start = -(self.span_ps as f64) / 2.0;
        (0..self.counts.len()).map(move |k| start + (k as f64 + 0.5) * self.bin_ps as f64)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Histogram of all differences `t_b − t_a` with `|Δ| ≤ span/2`.
pub fn correlation_histogram(
    a: &[TimeTag],
    b: &[TimeTag],
    bin_ps: u64,
    span_ps: u64,
) -> Result<Histogram> {
    check_sorted(a, "first")?;
    check_sorted(b, "second")?;
    if bin_ps == 0 || span_ps == 0 || !span_ps.is_multiple_of(bin_ps) {
        return Err(Error::arg(format!(
            "bin width {bin_ps} ps must be positive and divide span {span_ps} ps"
        )));
    }
    let nbins = (span_ps / bin_ps) as usize;
    let mut counts = vec![0u64; nbins];
    let half = span_ps as i128;
    let mut start = 0;
    for ta in a {
        let t = ta.timestamp_ps as i128;
        while start < b.len() && 2 * (b[start].timestamp_ps as i128 - t) < -half {
            start += 1;
        }
        for tb in &b[start..] {
            let d = tb.timestamp_ps as i128 - t;
            if 2 * d > half {
                break;
            }
            let k = ((2 * d + half) / (2 * bin_ps as i128)) as usize;
            counts[k.min(nbins - 1)] += 1;
        }
    }
    Ok(Histogram {
        bin_ps,
        span_ps,
        counts,
    })
}
