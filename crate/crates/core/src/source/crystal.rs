//! Periodically poled crystal: wave numbers, phase mismatch and the SHG tuning curve.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::source::sellmeier::{sellmeier_index, DispersionData, SellmeierSet};
use crate::source::spectrum::{pm_profile, PhaseMatchingKind};
use crate::units::{angular_frequency, wavelength_nm, SPEED_OF_LIGHT};

/// Poled nonlinear crystal with one dispersion set per interacting field.
///
/// The phase mismatch is `Δk = k_p − k_s − k_i − m·2π/Λ` where `m = ±1` is the
/// grating order. Type-II KTP (pump and signal on y, idler on z) has
/// `k_p < k_s + k_i`, so it phase-matches with `m = −1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalConfig {
    pub poling_period_um: f64,
    pub grating_order: i32,
    pub length_mm: f64,
    pub temperature_c: f64,
    pub pump: SellmeierSet,
    pub signal: SellmeierSet,
    pub idler: SellmeierSet,
}

impl CrystalConfig {
    pub fn new(
        poling_period_um: f64,
        grating_order: i32,
        length_mm: f64,
        temperature_c: f64,
        pump: SellmeierSet,
        signal: SellmeierSet,
        idler: SellmeierSet,
    ) -> Result<Self> {
        if !(poling_period_um > 0.0 && poling_period_um.is_finite()) {
            return Err(Error::arg(format!(
                "poling period must be > 0, got {poling_period_um} um"
            )));
        }
        if !(length_mm > 0.0 && length_mm.is_finite()) {
            return Err(Error::arg(format!(
                "crystal length must be > 0, got {length_mm} mm"
            )));
        }
        if grating_order != 1 && grating_order != -1 {
            return Err(Error::arg(format!(
                "grating order must be +1 or -1, got {grating_order}"
            )));
        }
        Ok(Self {
            poling_period_um,
            grating_order,
            length_mm,
            temperature_c,
            pump,
            signal,
            idler,
        })
    }

    /// Chooses Λ and the grating order so that `Δk = 0` for degenerate signal
    /// and idler at `degenerate_wavelength_nm`.
    pub fn quasi_phase_matched(
        pump: SellmeierSet,
        signal: SellmeierSet,
        idler: SellmeierSet,
        length_mm: f64,
        temperature_c: f64,
        degenerate_wavelength_nm: f64,
    ) -> Result<Self> {
        let l = degenerate_wavelength_nm;
        let bulk = wave_number(&pump, l / 2.0, temperature_c)?
            - wave_number(&signal, l, temperature_c)?
            - wave_number(&idler, l, temperature_c)?;
        if bulk == 0.0 {
            return Err(Error::arg("bulk phase mismatch is zero; no poling needed"));
        }
        let order = if bulk > 0.0 { 1 } else { -1 };
        let period_um = 2.0 * PI / bulk.abs() * 1e6;
        Self::new(
            period_um,
            order,
            length_mm,
            temperature_c,
            pump,
            signal,
            idler,
        )
    }

    /// Type-II ppKTP from the bundled data (pump y, signal y, idler z).
    pub fn ktp_type2(
        length_mm: f64,
        temperature_c: f64,
        degenerate_wavelength_nm: f64,
    ) -> Result<Self> {
        let ktp = DispersionData::bundled_ktp();
        Self::quasi_phase_matched(
            ktp.axis("y")?.clone(),
            ktp.axis("y")?.clone(),
            ktp.axis("z")?.clone(),
            length_mm,
            temperature_c,
            degenerate_wavelength_nm,
        )
    }

    /// Type-0 ppKTP, all fields on z.
    pub fn ktp_type0(
        length_mm: f64,
        temperature_c: f64,
        degenerate_wavelength_nm: f64,
    ) -> Result<Self> {
        let ktp = DispersionData::bundled_ktp();
        let z = ktp.axis("z")?.clone();
        Self::quasi_phase_matched(
            z.clone(),
            z.clone(),
            z,
            length_mm,
            temperature_c,
            degenerate_wavelength_nm,
        )
    }

    /// Grating vector `m·2π/Λ` in rad/m.
    pub fn grating_wave_number(&self) -> f64 {
        self.grating_order as f64 * 2.0 * PI / (self.poling_period_um * 1e-6)
    }

    pub fn length_m(&self) -> f64 {
        self.length_mm * 1e-3
    }
}

/// `k = n·ω/c` in rad/m.
pub fn wave_number(axis: &SellmeierSet, lambda_nm: f64, temperature_c: f64) -> Result<f64> {
    let n = sellmeier_index(lambda_nm, temperature_c, axis)?;
    Ok(n * angular_frequency(lambda_nm) / SPEED_OF_LIGHT)
}

/// Phase mismatch in rad/m; the pump wavelength follows from energy conservation.
pub fn phase_mismatch(lambda_s_nm: f64, lambda_i_nm: f64, crystal: &CrystalConfig) -> Result<f64> {
    let lambda_p_nm = 1.0 / (1.0 / lambda_s_nm + 1.0 / lambda_i_nm);
    let t = crystal.temperature_c;
    Ok(wave_number(&crystal.pump, lambda_p_nm, t)?
        - wave_number(&crystal.signal, lambda_s_nm, t)?
        - wave_number(&crystal.idler, lambda_i_nm, t)?
        - crystal.grating_wave_number())
}

/// Second-harmonic efficiency for fundamental wavelengths `fundamental_nm`,
/// relative to a perfectly phase-matched crystal of the same length.
///
/// The fundamental is split across the signal and idler axes and the
/// harmonic is generated on the pump axis, so the curve peaks at the SPDC
/// degeneracy wavelength.
pub fn shg_tuning_curve(fundamental_nm: &[f64], crystal: &CrystalConfig) -> Result<Vec<f64>> {
    fundamental_nm
        .iter()
        .map(|&l| {
            let dk = phase_mismatch(l, l, crystal)?;
            let a = pm_profile(dk * crystal.length_m() / 2.0, PhaseMatchingKind::Sinc);
            Ok(a * a)
        })
        .collect()
}

/// Signal-minus-idler frequency separation per nm of pump detuning (rad/s/nm),
/// obtained from bulk dispersion around the pump wavelength `lambda_p0_nm`.
pub fn detuning_slope_from_crystal(crystal: &CrystalConfig, lambda_p0_nm: f64) -> Result<f64> {
    let h = 0.05;
    let hi = centre_offset(crystal, lambda_p0_nm + h)?;
    let lo = centre_offset(crystal, lambda_p0_nm - h)?;
    Ok(2.0 * (hi - lo) / (2.0 * h))
}

/// Signal detuning Ω from ω_p/2 at which Δk vanishes for pump `lambda_p_nm`.
fn centre_offset(crystal: &CrystalConfig, lambda_p_nm: f64) -> Result<f64> {
    let half = angular_frequency(lambda_p_nm) / 2.0;
    let dk = |omega: f64| -> Result<f64> {
        phase_mismatch(
            wavelength_nm(half + omega),
            wavelength_nm(half - omega),
            crystal,
        )
    };
    let step = half * 1e-6;
    let mut omega = 0.0;
    for _ in 0..50 {
        let f = dk(omega)?;
        let df = (dk(omega + step)? - dk(omega - step)?) / (2.0 * step);
        if df == 0.0 {
            return Err(Error::arg(
                "phase mismatch has zero slope in signal detuning",
            ));
        }
        let next = omega - f / df;
        if (next - omega).abs() < half * 1e-14 {
            return Ok(next);
        }
        omega = next;
    }
    Err(Error::NoConvergence {
        iterations: 50,
        last: vec![omega],
    })
}
