//! Pair-number statistics and Monte Carlo pair emission.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::error::{Error, Result};
use crate::source::spectrum::{
    marginal_spectrum, PhaseMatchingKind, Photon, SourceSpectralModel, SpectralGrid,
};

/// Mean pair number per counting interval and its link to pump power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStatistics {
    /// Mean pairs per `interval_ps`.
    pub mu: f64,
    /// μ per mW of pump power.
    pub power_calibration_per_mw: f64,
    pub interval_ps: f64,
}

impl PairStatistics {
    pub fn new(mu: f64, power_calibration_per_mw: f64, interval_ps: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::arg(format!(
                "mean pair number must be >= 0, got {mu}"
            )));
        }
        if !(power_calibration_per_mw >= 0.0 && power_calibration_per_mw.is_finite()) {
            return Err(Error::arg("power calibration must be >= 0"));
        }
        if !(interval_ps > 0.0 && interval_ps.is_finite()) {
            return Err(Error::arg(format!(
                "counting interval must be > 0, got {interval_ps} ps"
            )));
        }
        Ok(Self {
            mu,
            power_calibration_per_mw,
            interval_ps,
        })
    }

    /// μ from the pump power via the linear low-gain calibration.
    pub fn at_power(
        pump_power_mw: f64,
        power_calibration_per_mw: f64,
        interval_ps: f64,
    ) -> Result<Self> {
        let probe = Self::new(0.0, power_calibration_per_mw, interval_ps)?;
        let mu = mean_pair_number(pump_power_mw, &probe)?;
        Self::new(mu, power_calibration_per_mw, interval_ps)
    }

    /// μ from the squeeze parameter, `μ = 2 sinh²(χt)`.
    pub fn from_chi_t(chi_t: f64, interval_ps: f64) -> Result<Self> {
        Self::new(2.0 * chi_t.sinh().powi(2), 0.0, interval_ps)
    }

    pub fn chi_t(&self) -> f64 {
        (self.mu / 2.0).sqrt().asinh()
    }

    /// Pair emission rate in pairs/s.
    pub fn pair_rate_hz(&self) -> f64 {
        self.mu / (self.interval_ps * 1e-12)
    }

    /// Statistics whose pair rate is `rate_hz`.
    pub fn from_pair_rate(rate_hz: f64, interval_ps: f64) -> Result<Self> {
        Self::new(rate_hz * interval_ps * 1e-12, 0.0, interval_ps)
    }
}

/// `P_n = (1+n)(μ/2)ⁿ / (1+μ/2)^{n+2}` for n = 0..=n_max.
pub fn pair_number_distribution(mu: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::arg(format!(
            "mean pair number must be >= 0, got {mu}"
        )));
    }
    let h = mu / 2.0;
    let q = h / (1.0 + h);
    let mut p = 1.0 / (1.0 + h).powi(2);
    let mut geom = p;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            geom *= q;
            p = (1.0 + n as f64) * geom;
        }
        out.push(p);
    }
    Ok(out)
}

/// μ = calibration × power.
pub fn mean_pair_number(pump_power_mw: f64, stats: &PairStatistics) -> Result<f64> {
    if !(pump_power_mw >= 0.0 && pump_power_mw.is_finite()) {
        return Err(Error::arg(format!(
            "pump power must be >= 0, got {pump_power_mw} mW"
        )));
    }
    Ok(stats.power_calibration_per_mw * pump_power_mw)
}

/// One emitted pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEvent {
    pub creation_time_ps: f64,
    /// Signal detuning from the degenerate frequency ω₀, rad/s.
    pub signal_detuning: f64,
    /// Idler detuning from ω₀, rad/s; `Ω_s + Ω_i` is the pump detuning.
    pub idler_detuning: f64,
    pub pair_id: u64,
}

#[derive(Debug, Clone)]
enum DetuningSampler {
    Gaussian(Normal<f64>),
    Table { omega: Vec<f64>, cdf: Vec<f64> },
}

impl DetuningSampler {
    fn new(model: &SourceSpectralModel) -> Self {
        let centre = model.centre(Photon::Signal);
        match model.kind {
            // |f|² = exp(−(Ω−c)²/σ²) has standard deviation σ/√2.
            PhaseMatchingKind::GaussianApprox => DetuningSampler::Gaussian(
                Normal::new(centre, model.pm_width / std::f64::consts::SQRT_2).expect("σ > 0"),
            ),
            PhaseMatchingKind::Sinc => {
                let grid = SpectralGrid::default_for(model);
                let f =
                    marginal_spectrum(model, Photon::Signal, grid).expect("default grid is valid");
                let step = grid.step();
                let mut cdf = Vec::with_capacity(grid.points);
                let mut acc = 0.0;
                cdf.push(0.0);
                for w in f.amplitude.windows(2) {
                    acc += 0.5 * (w[0] * w[0] + w[1] * w[1]) * step;
                    cdf.push(acc);
                }
                for c in &mut cdf {
                    *c /= acc;
                }
                let omega = (0..grid.points).map(|i| grid.omega(i)).collect();
                DetuningSampler::Table { omega, cdf }
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            DetuningSampler::Gaussian(n) => n.sample(rng),
            DetuningSampler::Table { omega, cdf } => {
                let u: f64 = rng.random();
                let k = cdf.partition_point(|&c| c < u).clamp(1, cdf.len() - 1);
                let (c0, c1) = (cdf[k - 1], cdf[k]);
                let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
                omega[k - 1] + frac * (omega[k] - omega[k - 1])
            }
        }
    }
}

/// Lazy Poisson pair process; yields events in creation order.
#[derive(Debug, Clone)]
pub struct PairStream {
    rng: ChaCha8Rng,
    gap: Option<Exp<f64>>,
    sampler: DetuningSampler,
    half_pump_detuning: f64,
    end_ps: f64,
    t_ps: f64,
    next_id: u64,
}

impl PairStream {
    pub fn new(
        model: &SourceSpectralModel,
        rate_hz: f64,
        duration_s: f64,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        if !(duration_s > 0.0 && duration_s.is_finite()) {
            return Err(Error::arg(format!(
                "duration must be > 0, got {duration_s} s"
            )));
        }
        if !(rate_hz >= 0.0 && rate_hz.is_finite()) {
            return Err(Error::arg(format!(
                "pair rate must be >= 0, got {rate_hz} Hz"
            )));
        }
        let gap = if rate_hz > 0.0 {
            Some(Exp::new(rate_hz * 1e-12).expect("rate > 0"))
        } else {
            None
        };
        Ok(Self {
            rng,
            gap,
            sampler: DetuningSampler::new(model),
            half_pump_detuning: model.pump_detuning() / 2.0,
            end_ps: duration_s * 1e12,
            t_ps: 0.0,
            next_id: 0,
        })
    }

    /// Hands back the generator so callers can continue the same random sequence.
    pub fn into_rng(self) -> ChaCha8Rng {
        self.rng
    }
}

impl Iterator for PairStream {
    type Item = PairEvent;

    fn next(&mut self) -> Option<PairEvent> {
        let gap = self.gap?;
        self.t_ps += gap.sample(&mut self.rng);
        if self.t_ps >= self.end_ps {
            self.gap = None;
            return None;
        }
        let x = self.sampler.sample(&mut self.rng);
        let id = self.next_id;
        self.next_id += 1;
        Some(PairEvent {
            creation_time_ps: self.t_ps,
            signal_detuning: self.half_pump_detuning + x,
            idler_detuning: self.half_pump_detuning - x,
            pair_id: id,
        })
    }
}

/// Samples the pair emission of `duration_s` seconds at the rate implied by `stats`.
pub fn sample_pair_stream(
    model: &SourceSpectralModel,
    stats: &PairStatistics,
    duration_s: f64,
    seed: u64,
) -> Result<Vec<PairEvent>> {
    let stream = PairStream::new(
        model,
        stats.pair_rate_hz(),
        duration_s,
        ChaCha8Rng::seed_from_u64(seed),
    )?;
    Ok(stream.collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> SourceSpectralModel {
        SourceSpectralModel::from_bandwidth_nm(
            776.0,
            777.1,
            PhaseMatchingKind::GaussianApprox,
            2.05,
            2e12,
        )
        .unwrap()
    }

    #[test]
    fn p1_value() {
        let p = pair_number_distribution(0.1, 3).unwrap();
        assert!((p[1] - 0.0863837598531476).abs() < 1e-15);
    }

    #[test]
    fn vacuum() {
        let p = pair_number_distribution(0.0, 5).unwrap();
        assert_eq!(p[0], 1.0);
        assert!(p[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn negative_inputs() {
        assert!(pair_number_distribution(-0.1, 5).is_err());
        let s = PairStatistics::new(0.0, 1e-5, 256.0).unwrap();
        assert!(mean_pair_number(-1.0, &s).is_err());
    }

    #[test]
    fn chi_round_trip() {
        let s = PairStatistics::from_chi_t(0.3, 256.0).unwrap();
        assert!((s.chi_t() - 0.3).abs() < 1e-14);
        assert!((s.mu - 2.0 * 0.3f64.sinh().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn zero_mu_is_empty() {
        let s = PairStatistics::new(0.0, 0.0, 256.0).unwrap();
        assert!(sample_pair_stream(&model(), &s, 10.0, 1)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn energy_conservation() {
        let m = model();
        let s = PairStatistics::from_pair_rate(1e4, 256.0).unwrap();
        for ev in sample_pair_stream(&m, &s, 0.01, 7).unwrap() {
            let sum = ev.signal_detuning + ev.idler_detuning;
            assert!((sum - m.pump_detuning()).abs() <= 1e-3 * m.pm_width);
        }
    }

    #[test]
    fn times_increase() {
        let s = PairStatistics::from_pair_rate(1e5, 256.0).unwrap();
        let ev = sample_pair_stream(&model(), &s, 0.01, 3).unwrap();
        assert!(ev
            .windows(2)
            .all(|w| w[1].creation_time_ps > w[0].creation_time_ps));
        assert!(ev.iter().enumerate().all(|(i, e)| e.pair_id == i as u64));
    }
}
