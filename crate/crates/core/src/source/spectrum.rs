//! Phase-matching amplitude and the marginal spectra of a CW-pumped pair source.
//!
//! With a monochromatic pump the joint amplitude lives on the line
//! `ω_s + ω_i = ω_p`. Marginals are sampled on a detuning axis `Ω` measured
//! from `ω_p/2`: the signal is centred at `+δ/2` and the idler at `−δ/2`, with
//! `δ = detuning_slope·(λ_p − λ₀ᵖ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{angular_frequency, bandwidth_nm_to_rad_per_s, bandwidth_rad_per_s_to_nm};

/// Matching constant between `sinc(x)` and `exp(−γx²)`.
pub const SINC_GAUSSIAN_GAMMA: f64 = 0.193;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMatchingKind {
    GaussianApprox,
    Sinc,
}

/// Phase-matching profile as a function of `x = ΔkL/2`.
pub fn pm_profile(x: f64, kind: PhaseMatchingKind) -> f64 {
    match kind {
        PhaseMatchingKind::Sinc => {
            if x.abs() < 1e-8 {
                1.0 - x * x / 6.0
            } else {
                x.sin() / x
            }
        }
        PhaseMatchingKind::GaussianApprox => (-SINC_GAUSSIAN_GAMMA * x * x).exp(),
    }
}

/// Phase-matching amplitude for mismatch `dk_rad_per_m` over `length_mm`.
pub fn phase_matching_amplitude(
    dk_rad_per_m: f64,
    length_mm: f64,
    kind: PhaseMatchingKind,
) -> Complex64 {
    Complex64::new(pm_profile(dk_rad_per_m * length_mm * 1e-3 / 2.0, kind), 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Photon {
    Signal,
    Idler,
}

/// Parametric description of the CW-pumped joint spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpectralModel {
    pub pump_wavelength_nm: f64,
    /// Pump wavelength at which signal and idler spectra coincide.
    pub degeneracy_pump_wavelength_nm: f64,
    pub kind: PhaseMatchingKind,
    /// Gaussian width σ_s of the phase-matching amplitude, rad/s.
    pub pm_width: f64,
    /// Signal-minus-idler separation per nm of pump detuning, rad/s/nm.
    pub detuning_slope: f64,
}

impl SourceSpectralModel {
    pub fn new(
        pump_wavelength_nm: f64,
        degeneracy_pump_wavelength_nm: f64,
        kind: PhaseMatchingKind,
        pm_width: f64,
        detuning_slope: f64,
    ) -> Result<Self> {
        if !(pm_width > 0.0 && pm_width.is_finite()) {
            return Err(Error::arg(format!(
                "pm_width must be > 0, got {pm_width} rad/s"
            )));
        }
        for (name, v) in [
            ("pump wavelength", pump_wavelength_nm),
            ("degeneracy pump wavelength", degeneracy_pump_wavelength_nm),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("{name} must be > 0, got {v} nm")));
            }
        }
        if !detuning_slope.is_finite() {
            return Err(Error::arg("detuning slope must be finite"));
        }
        Ok(Self {
            pump_wavelength_nm,
            degeneracy_pump_wavelength_nm,
            kind,
            pm_width,
            detuning_slope,
        })
    }

    /// Builds the model from the intensity FWHM `bandwidth_nm` of each photon,
    /// measured at the degenerate wavelength `2·λ₀ᵖ`.
    pub fn from_bandwidth_nm(
        pump_wavelength_nm: f64,
        degeneracy_pump_wavelength_nm: f64,
        kind: PhaseMatchingKind,
        bandwidth_nm: f64,
        detuning_slope: f64,
    ) -> Result<Self> {
        let sigma = pm_width_from_bandwidth_nm(bandwidth_nm, 2.0 * degeneracy_pump_wavelength_nm);
        Self::new(
            pump_wavelength_nm,
            degeneracy_pump_wavelength_nm,
            kind,
            sigma,
            detuning_slope,
        )
    }

    pub fn with_pump_wavelength(&self, pump_wavelength_nm: f64) -> Self {
        Self {
            pump_wavelength_nm,
            ..self.clone()
        }
    }

    pub fn with_detuning_slope(&self, detuning_slope: f64) -> Self {
        Self {
            detuning_slope,
            ..self.clone()
        }
    }

    /// Signal-minus-idler centre separation δ in rad/s.
    pub fn separation(&self) -> f64 {
        self.detuning_slope * (self.pump_wavelength_nm - self.degeneracy_pump_wavelength_nm)
    }

    /// Centre of the given photon's marginal on the `Ω` axis.
    pub fn centre(&self, photon: Photon) -> f64 {
        match photon {
            Photon::Signal => self.separation() / 2.0,
            Photon::Idler => -self.separation() / 2.0,
        }
    }

    /// Pump detuning `ω_p − 2ω₀` in rad/s.
    pub fn pump_detuning(&self) -> f64 {
        angular_frequency(self.pump_wavelength_nm)
            - angular_frequency(self.degeneracy_pump_wavelength_nm)
    }

    /// Unnormalised marginal amplitude, peak 1 at the photon's centre.
    pub fn amplitude(&self, photon: Photon, omega: f64) -> f64 {
        let x =
            (omega - self.centre(photon)) / (self.pm_width * (2.0 * SINC_GAUSSIAN_GAMMA).sqrt());
        pm_profile(x, self.kind)
    }

    /// Intensity FWHM of one photon in nm at `2·λ₀ᵖ` (Gaussian kind).
    pub fn bandwidth_nm(&self) -> f64 {
        let d_omega = 2.0 * self.pm_width * std::f64::consts::LN_2.sqrt();
        bandwidth_rad_per_s_to_nm(d_omega, 2.0 * self.degeneracy_pump_wavelength_nm)
    }
}

/// σ_s for a Gaussian amplitude whose intensity FWHM is `bandwidth_nm` at `lambda_nm`.
pub fn pm_width_from_bandwidth_nm(bandwidth_nm: f64, lambda_nm: f64) -> f64 {
    bandwidth_nm_to_rad_per_s(bandwidth_nm, lambda_nm) / (2.0 * std::f64::consts::LN_2.sqrt())
}

/// Uniform detuning grid centred on `Ω = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    pub half_span: f64,
    pub points: usize,
}

impl SpectralGrid {
    /// Grid covering both marginals; sinc tails need a much wider window.
    pub fn default_for(model: &SourceSpectralModel) -> Self {
        let (widths, points) = match model.kind {
            PhaseMatchingKind::GaussianApprox => (8.0, 4097),
            PhaseMatchingKind::Sinc => (160.0, 32769),
        };
        Self {
            half_span: model.separation().abs() / 2.0 + widths * model.pm_width,
            points,
        }
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_span / (self.points - 1) as f64
    }

    pub fn omega(&self, idx: usize) -> f64 {
        -self.half_span + idx as f64 * self.step()
    }

    fn check(&self, model: &SourceSpectralModel) -> Result<()> {
        if self.points < 2 || !(self.half_span > 0.0) {
            return Err(Error::arg(
                "degenerate spectral grid (zero span or fewer than 2 points)",
            ));
        }
        if self.points < 256 {
            return Err(Error::arg(format!(
                "spectral grid needs at least 256 points, got {}",
                self.points
            )));
        }
        if 2.0 * self.half_span < 6.0 * model.pm_width {
            return Err(Error::arg(format!(
                "spectral grid span {} rad/s is below 6 sigma_s",
                2.0 * self.half_span
            )));
        }
        Ok(())
    }
}

/// Unit-normalised marginal amplitude samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSpectrum {
    pub grid: SpectralGrid,
    pub amplitude: Vec<f64>,
}

impl MarginalSpectrum {
    pub fn detuning(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.grid.points).map(|i| self.grid.omega(i))
    }

    /// Trapezoid estimate of `∫|f|² dΩ`.
    pub fn norm(&self) -> f64 {
        trapezoid(self.amplitude.iter().map(|a| a * a), self.grid.step())
    }
}

pub(crate) fn trapezoid(values: impl Iterator<Item = f64>, step: f64) -> f64 {
    let mut sum = 0.0;
    let mut first = None;
    let mut last = 0.0;
    for v in values {
        if first.is_none() {
            first = Some(v);
        }
        sum += v;
        last = v;
    }
    (sum - 0.5 * (first.unwrap_or(0.0) + last)) * step
}

pub fn marginal_spectrum(
    model: &SourceSpectralModel,
    photon: Photon,
    grid: SpectralGrid,
) -> Result<MarginalSpectrum> {
    grid.check(model)?;
    let raw: Vec<f64> = (0..grid.points)
        .map(|i| model.amplitude(photon, grid.omega(i)))
        .collect();
    let norm = trapezoid(raw.iter().map(|a| a * a), grid.step()).sqrt();
    if !(norm > 0.0) {
        return Err(Error::arg("marginal spectrum vanishes on the grid"));
    }
    Ok(MarginalSpectrum {
        grid,
        amplitude: raw.into_iter().map(|a| a / norm).collect(),
    })
}

/// Amplitude overlap `|∫ f_s f_i* dΩ|` of the unit-normalised marginals.
///
/// This is the factor that multiplies the exchange term in the coincidence
/// probability; for equal-width Gaussians separated by δ it is
/// `exp(−δ²/(4σ_s²))`.
pub fn spectral_overlap(model: &SourceSpectralModel) -> f64 {
    let grid = SpectralGrid::default_for(model);
    let s = marginal_spectrum(model, Photon::Signal, grid).expect("default grid is valid");
    let i = marginal_spectrum(model, Photon::Idler, grid).expect("default grid is valid");
    trapezoid(
        s.amplitude.iter().zip(&i.amplitude).map(|(a, b)| a * b),
        grid.step(),
    )
    .abs()
    .min(1.0)
}

/// Solves |detuning_slope| from two (pump wavelength, visibility) anchors.
///
/// Visibility is taken proportional to the spectral overlap, so only the
/// ratio of the two visibilities enters. Anchors must sit at different
/// distances from the degeneracy pump wavelength.
pub fn calibrate_detuning_slope(
    template: &SourceSpectralModel,
    anchor_a: (f64, f64),
    anchor_b: (f64, f64),
) -> Result<f64> {
    let lambda0 = template.degeneracy_pump_wavelength_nm;
    let (mut near, mut far) = (anchor_a, anchor_b);
    if (near.0 - lambda0).abs() > (far.0 - lambda0).abs() {
        std::mem::swap(&mut near, &mut far);
    }
    let (dn, df) = ((near.0 - lambda0).abs(), (far.0 - lambda0).abs());
    if !(near.1 > 0.0 && far.1 > 0.0) {
        return Err(Error::Degenerate(
            "anchor visibilities must be positive".into(),
        ));
    }
    if (df - dn) < 1e-9 {
        return Err(Error::Degenerate(
            "anchors are equidistant from the degeneracy pump wavelength".into(),
        ));
    }
    let target = far.1 / near.1;
    if !(target < 1.0) {
        return Err(Error::Degenerate(format!(
            "visibility must fall away from degeneracy (got ratio {target})"
        )));
    }
    let ratio = |slope: f64| {
        let m = template.with_detuning_slope(slope);
        spectral_overlap(&m.with_pump_wavelength(far.0))
            / spectral_overlap(&m.with_pump_wavelength(near.0))
    };
    if template.kind == PhaseMatchingKind::GaussianApprox {
        let s2 = 4.0 * template.pm_width.powi(2) * (-target.ln()) / (df * df - dn * dn);
        return Ok(s2.sqrt());
    }
    // Sinc overlap is monotone in the slope until the first side-lobe crossing.
    let mut lo = 0.0;
    let mut hi = template.pm_width / df;
    while ratio(hi) > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 * template.pm_width {
            return Err(Error::Degenerate(
                "no slope reproduces the anchor ratio".into(),
            ));
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
