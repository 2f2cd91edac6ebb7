//! Single-photon detector model: efficiency, dark counts, timing jitter and dead time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tcspc::TimeTag;
use crate::units::fwhm_per_sigma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub efficiency: f64,
    pub dark_rate_hz: f64,
    pub jitter_fwhm_ps: f64,
    pub dead_time_ns: f64,
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::arg(format!(
                "detector efficiency must lie in [0, 1], got {}",
                self.efficiency
            )));
        }
        for (name, v) in [
            ("dark_rate_hz", self.dark_rate_hz),
            ("jitter_fwhm_ps", self.jitter_fwhm_ps),
            ("dead_time_ns", self.dead_time_ns),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("detector {name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Perfect detector: every photon registered at its true time.
    pub fn ideal() -> Self {
        Self {
            efficiency: 1.0,
            dark_rate_hz: 0.0,
            jitter_fwhm_ps: 0.0,
            dead_time_ns: 0.0,
        }
    }
}

/// Detects one channel's photon arrivals (ps, sorted) with its own generator.
pub fn detect_channel(
    arrivals_ps: &[f64],
    cfg: &DetectorConfig,
    channel: u32,
    duration_s: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<TimeTag>> {
    cfg.validate()?;
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::arg(format!(
            "duration must be > 0, got {duration_s} s"
        )));
    }
    if arrivals_ps.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::arg(format!(
            "arrivals on channel {channel} are not sorted"
        )));
    }
    let sigma = cfg.jitter_fwhm_ps / fwhm_per_sigma();
    let jitter = (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("sigma > 0"));
    let mut times: Vec<f64> = Vec::with_capacity(arrivals_ps.len());
    for &t in arrivals_ps {
        if cfg.efficiency < 1.0 && rng.random::<f64>() >= cfg.efficiency {
            continue;
        }
        times.push(match &jitter {
            Some(j) => t + j.sample(rng),
            None => t,
        });
    }
    let span_ps = duration_s * 1e12;
    let mean_darks = cfg.dark_rate_hz * duration_s;
    if mean_darks > 0.0 {
        let n = Poisson::new(mean_darks).expect("mean > 0").sample(rng) as usize;
        times.extend((0..n).map(|_| rng.random::<f64>() * span_ps));
    }
    let mut stamps: Vec<u64> = times
        .into_iter()
        .map(f64::round)
        .filter(|t| *t >= 0.0)
        .map(|t| t as u64)
        .collect();
    stamps.sort_unstable();
    let dead_ps = (cfg.dead_time_ns * 1e3).round() as u64;
    let mut out: Vec<TimeTag> = Vec::with_capacity(stamps.len());
    let mut last: Option<u64> = None;
    for t in stamps {
        if let Some(prev) = last {
            if t == prev || t - prev < dead_ps {
                continue;
            }
        }
        last = Some(t);
        out.push(TimeTag {
            timestamp_ps: t,
            channel,
        });
    }
    Ok(out)
}

/// Turns per-channel photon arrivals into detector tags for channels 0 and 1.
///
/// Each channel draws from its own stream of a generator seeded with `seed`,
/// so the result does not depend on evaluation order.
pub fn simulate_detection(
    arrivals_ps: [&[f64]; 2],
    cfg: [&DetectorConfig; 2],
    duration_s: f64,
    seed: u64,
) -> Result<[Vec<TimeTag>; 2]> {
    let run = |ch: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ch as u64);
        detect_channel(arrivals_ps[ch], cfg[ch], ch as u32, duration_s, &mut rng)
    };
    Ok([run(0)?, run(1)?])
}
