//! Two-photon interference at the beam splitter: delay-dependent overlap,
//! coincidence probability, expected HOM curves and visibility budgets.
//!
//! Photon `a` (signal) enters port 1, photon `b` (idler) enters port 2. The
//! exchange term is weighted by the delay-dependent overlap
//! `O(τ) = ∫ f_s(Ω) f_i*(Ω) e^{2iΩτ} dΩ`, which for Gaussian marginals is
//! `O_spec·exp(−σ_s²τ²)`.

use num_complex::Complex64;

use crate::circuit::BeamSplitter;
use crate::error::{Error, Result};
use crate::source::pair_number_distribution;
use crate::source::spectrum::{
    marginal_spectrum, spectral_overlap, trapezoid, PhaseMatchingKind, Photon, SourceSpectralModel,
    SpectralGrid,
};
use crate::units::{delay_um_to_ps, SPEED_OF_LIGHT};

/// Free-space delay positions in μm, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayScan {
    positions_um: Vec<f64>,
}

impl DelayScan {
    pub fn new(positions_um: Vec<f64>) -> Result<Self> {
        if positions_um.is_empty() {
            return Err(Error::arg("delay scan has no positions"));
        }
        if positions_um.iter().any(|p| !p.is_finite()) {
            return Err(Error::arg("delay positions must be finite"));
        }
        if positions_um.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("delay positions must be strictly increasing"));
        }
        Ok(Self { positions_um })
    }

    /// `points` evenly spaced positions from `start_um` to `stop_um` inclusive.
    pub fn linspace(start_um: f64, stop_um: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::arg("a linear scan needs at least 2 points"));
        }
        let step = (stop_um - start_um) / (points - 1) as f64;
        Self::new((0..points).map(|i| start_um + step * i as f64).collect())
    }

    pub fn positions_um(&self) -> &[f64] {
        &self.positions_um
    }

    pub fn delays_ps(&self) -> impl Iterator<Item = f64> + '_ {
        self.positions_um.iter().map(|&d| delay_um_to_ps(d))
    }

    pub fn len(&self) -> usize {
        self.positions_um.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions_um.is_empty()
    }
}

/// Rates and efficiencies entering the coincidence budget.
///
/// Index 0 refers to input arm `a` / detector 1, index 1 to arm `b` / detector 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBudget {
    pub pair_rate_hz: f64,
    /// Loss transmission of each input arm.
    pub arm_transmission: [f64; 2],
    pub detector_efficiency: [f64; 2],
    pub dark_rate_hz: [f64; 2],
    pub window_ps: f64,
}

impl RateBudget {
    pub fn validate(&self) -> Result<()> {
        let fractions = self
            .arm_transmission
            .iter()
            .chain(&self.detector_efficiency);
        if fractions.into_iter().any(|&f| !(0.0..=1.0).contains(&f)) {
            return Err(Error::arg(
                "transmissions and efficiencies must lie in [0, 1]",
            ));
        }
        let rates = [
            self.pair_rate_hz,
            self.dark_rate_hz[0],
            self.dark_rate_hz[1],
            self.window_ps,
        ];
        if rates.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
            return Err(Error::arg("rates and window must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn with_pair_rate(&self, pair_rate_hz: f64) -> Self {
        Self {
            pair_rate_hz,
            ..*self
        }
    }

    /// Probability that both photons of a pair survive and are detected,
    /// before beam-splitter routing.
    pub fn pair_detection_efficiency(&self) -> f64 {
        self.arm_transmission[0]
            * self.arm_transmission[1]
            * self.detector_efficiency[0]
            * self.detector_efficiency[1]
    }

    /// Mean photons per pair reaching detectors 1 and 2 (ignoring interference).
    fn routing(&self, bs: &BeamSplitter) -> [f64; 2] {
        let (t, r) = (bs.transmission(), bs.reflection());
        let [ta, tb] = self.arm_transmission;
        [
            self.detector_efficiency[0] * (ta * t + tb * r),
            self.detector_efficiency[1] * (ta * r + tb * t),
        ]
    }

    /// Singles rates at the two detectors, Hz.
    pub fn singles_hz(&self, bs: &BeamSplitter) -> [f64; 2] {
        let q = self.routing(bs);
        [
            self.pair_rate_hz * q[0] + self.dark_rate_hz[0],
            self.pair_rate_hz * q[1] + self.dark_rate_hz[1],
        ]
    }

    /// Accidental coincidences from the singles, Hz.
    pub fn accidental_hz(&self, bs: &BeamSplitter) -> f64 {
        let s = self.singles_hz(bs);
        accidental_rate(s[0], s[1], self.window_ps)
    }

    /// Coincidence rate far from the dip (distinguishable photons), Hz.
    pub fn baseline_hz(&self, bs: &BeamSplitter) -> f64 {
        let p0 = bs.transmission().powi(2) + bs.reflection().powi(2);
        self.pair_rate_hz * self.pair_detection_efficiency() * p0 + self.accidental_hz(bs)
    }
}

/// Delay-dependent two-photon overlap.
pub fn overlap_vs_delay(model: &SourceSpectralModel, tau_ps: f64) -> Complex64 {
    overlap_curve(model, &[tau_ps])[0]
}

/// [`overlap_vs_delay`] at several delays, sharing the spectral quadrature.
pub fn overlap_curve(model: &SourceSpectralModel, taus_ps: &[f64]) -> Vec<Complex64> {
    match model.kind {
        PhaseMatchingKind::GaussianApprox => {
            let o = spectral_overlap(model);
            taus_ps
                .iter()
                .map(|&t| {
                    let x = model.pm_width * t * 1e-12;
                    Complex64::new(o * (-x * x).exp(), 0.0)
                })
                .collect()
        }
        PhaseMatchingKind::Sinc => {
            let grid = SpectralGrid::default_for(model);
            let s = marginal_spectrum(model, Photon::Signal, grid).expect("default grid is valid");
            let i = marginal_spectrum(model, Photon::Idler, grid).expect("default grid is valid");
            let product: Vec<f64> = s
                .amplitude
                .iter()
                .zip(&i.amplitude)
                .map(|(a, b)| a * b)
                .collect();
            taus_ps
                .iter()
                .map(|&t| {
                    let k = 2.0 * t * 1e-12;
                    let re = trapezoid(
                        product
                            .iter()
                            .enumerate()
                            .map(|(j, p)| p * (k * grid.omega(j)).cos()),
                        grid.step(),
                    );
                    let im = trapezoid(
                        product
                            .iter()
                            .enumerate()
                            .map(|(j, p)| p * (k * grid.omega(j)).sin()),
                        grid.step(),
                    );
                    Complex64::new(re, im)
                })
                .collect()
        }
    }
}

/// Standard deviation σ (μm of delay) of the Gaussian dip `exp(−d²/(2σ²))`.
pub fn dip_sigma_um(model: &SourceSpectralModel) -> f64 {
    SPEED_OF_LIGHT / (std::f64::consts::SQRT_2 * model.pm_width) * 1e6
}

/// Probability that the two photons leave by different ports.
pub fn coincidence_probability(bs: &BeamSplitter, overlap: Complex64) -> Result<f64> {
    if overlap.norm() > 1.0 + 1e-12 {
        return Err(Error::arg(format!(
            "overlap magnitude {} exceeds 1",
            overlap.norm()
        )));
    }
    let (t, r) = (bs.transmission(), bs.reflection());
    Ok((t * t + r * r - 2.0 * t * r * overlap.re).max(0.0))
}

/// Expected coincidence rate (Hz) at each scan position.
pub fn hom_curve(
    model: &SourceSpectralModel,
    bs: &BeamSplitter,
    scan: &DelayScan,
    budget: &RateBudget,
) -> Result<Vec<f64>> {
    budget.validate()?;
    let taus: Vec<f64> = scan.delays_ps().collect();
    let acc = budget.accidental_hz(bs);
    let scale = budget.pair_rate_hz * budget.pair_detection_efficiency();
    overlap_curve(model, &taus)
        .into_iter()
        .map(|o| Ok(scale * coincidence_probability(bs, o)? + acc))
        .collect()
}

/// `2TR/(T² + R²)`, the visibility ceiling set by the splitting ratio.
pub fn splitter_visibility(bs: &BeamSplitter) -> f64 {
    let (t, r) = (bs.transmission(), bs.reflection());
    2.0 * t * r / (t * t + r * r)
}

/// First and second factorial moments `(⟨n⟩, ⟨n(n−1)⟩)` of the pair-number distribution.
pub fn pair_moments(mu: f64) -> Result<(f64, f64)> {
    let mut n_max = 50;
    loop {
        let p = pair_number_distribution(mu, n_max)?;
        let tail = p[n_max] * (n_max * n_max) as f64;
        if tail < 1e-16 || n_max > 100_000 {
            let m1 = p.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
            let m2 = p
                .iter()
                .enumerate()
                .map(|(n, p)| (n * n.saturating_sub(1)) as f64 * p)
                .sum();
            return Ok((m1, m2));
        }
        n_max *= 2;
    }
}

/// Fraction of dip-depth-carrying coincidences once additional pairs in the
/// same interval are accounted for.
pub fn multi_pair_factor(bs: &BeamSplitter, mu: f64, budget: &RateBudget) -> Result<f64> {
    let (m1, m2) = pair_moments(mu)?;
    if m1 == 0.0 {
        return Ok(1.0);
    }
    let p0 = bs.transmission().powi(2) + bs.reflection().powi(2);
    let single = m1 * p0;
    Ok(single / (single + multi_pair_geometry(bs, budget) * m2))
}

fn multi_pair_geometry(bs: &BeamSplitter, budget: &RateBudget) -> f64 {
    let (t, r) = (bs.transmission(), bs.reflection());
    let [ta, tb] = budget.arm_transmission;
    if ta * tb == 0.0 {
        return 0.0;
    }
    (ta * t + tb * r) * (ta * r + tb * t) / (ta * tb)
}

/// Fraction of baseline coincidences that are not dark-count accidentals.
pub fn accidental_factor(
    bs: &BeamSplitter,
    mu: f64,
    interval_ps: f64,
    budget: &RateBudget,
) -> Result<f64> {
    let (m1, m2) = pair_moments(mu)?;
    let p0 = bs.transmission().powi(2) + bs.reflection().powi(2);
    let per_interval =
        budget.pair_detection_efficiency() * (m1 * p0 + multi_pair_geometry(bs, budget) * m2);
    let true_rate = per_interval / (interval_ps * 1e-12);
    let s = budget.singles_hz(bs);
    let d = budget.dark_rate_hz;
    let dark_acc = (s[0] * s[1] - (s[0] - d[0]) * (s[1] - d[1])) * budget.window_ps * 1e-12;
    if true_rate + dark_acc == 0.0 {
        return Ok(1.0);
    }
    Ok(true_rate / (true_rate + dark_acc))
}

/// Predicted dip visibility `[2TR/(T²+R²)]·O·F_mp·F_acc`.
///
/// `mu` is the mean pair number per `interval_ps`.
pub fn visibility_prediction(
    bs: &BeamSplitter,
    spectral_overlap: f64,
    mu: f64,
    interval_ps: f64,
    budget: &RateBudget,
) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&spectral_overlap) {
        return Err(Error::arg(format!(
            "spectral overlap {spectral_overlap} outside [0, 1]"
        )));
    }
    budget.validate()?;
    let v = splitter_visibility(bs)
        * spectral_overlap
        * multi_pair_factor(bs, mu, budget)?
        * accidental_factor(bs, mu, interval_ps, budget)?;
    Ok(v.clamp(0.0, 1.0))
}

/// Chance coincidences between uncorrelated streams, `r1·r2·τ_w`.
pub fn accidental_rate(r1_hz: f64, r2_hz: f64, window_ps: f64) -> f64 {
    r1_hz * r2_hz * window_ps * 1e-12
}

/// Pair rate (Hz) whose baseline coincidence rate equals `baseline_hz`.
pub fn calibrate_pair_rate(
    baseline_hz: f64,
    bs: &BeamSplitter,
    budget: &RateBudget,
) -> Result<f64> {
    budget.validate()?;
    let zero = budget.with_pair_rate(0.0);
    let floor = zero.baseline_hz(bs);
    if !(baseline_hz > floor) {
        return Err(Error::Degenerate(format!(
            "target baseline {baseline_hz} Hz is not above the dark-count floor {floor} Hz"
        )));
    }
    let q = zero.routing(bs);
    let d = budget.dark_rate_hz;
    let tau = budget.window_ps * 1e-12;
    let p0 = bs.transmission().powi(2) + bs.reflection().powi(2);
    let a = tau * q[0] * q[1];
    let b = budget.pair_detection_efficiency() * p0 + tau * (q[0] * d[1] + q[1] * d[0]);
    let c = tau * d[0] * d[1] - baseline_hz;
    if b <= 0.0 && a <= 0.0 {
        return Err(Error::Degenerate("no photons reach the detectors".into()));
    }
    // Stable positive root of a·R² + b·R + c = 0 with c < 0.
    Ok(if a == 0.0 {
        -c / b
    } else {
        2.0 * (-c) / (b + (b * b - 4.0 * a * c).sqrt())
    })
}
