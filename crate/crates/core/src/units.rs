//! Physical constants and the handful of unit conversions shared by every module.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda_nm`.
pub fn angular_frequency(lambda_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (lambda_nm * 1e-9)
}

/// Vacuum wavelength (nm) of light with angular frequency `omega` (rad/s).
pub fn wavelength_nm(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e9
}

/// Free-space delay distance (μm) to time (ps).
pub fn delay_um_to_ps(d_um: f64) -> f64 {
    d_um * 1e-6 / SPEED_OF_LIGHT * 1e12
}

/// Time (ps) to free-space delay distance (μm).
pub fn delay_ps_to_um(t_ps: f64) -> f64 {
    t_ps * 1e-12 * SPEED_OF_LIGHT * 1e6
}

/// Converts an interval of wavelength `d_lambda_nm` around `lambda_nm` into angular frequency.
pub fn bandwidth_nm_to_rad_per_s(d_lambda_nm: f64, lambda_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * d_lambda_nm * 1e-9 / (lambda_nm * 1e-9).powi(2)
}

/// Inverse of [`bandwidth_nm_to_rad_per_s`].
pub fn bandwidth_rad_per_s_to_nm(d_omega: f64, lambda_nm: f64) -> f64 {
    d_omega * (lambda_nm * 1e-9).powi(2) / (2.0 * PI * SPEED_OF_LIGHT) * 1e9
}

/// Power attenuation factor for a loss in dB.
pub fn db_to_fraction(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

/// Ratio of FWHM to standard deviation of a Gaussian, 2√(2 ln 2).
pub fn fwhm_per_sigma() -> f64 {
    2.0 * (2.0 * std::f64::consts::LN_2).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_round_trip() {
        let w = angular_frequency(1550.0);
        assert!((wavelength_nm(w) - 1550.0).abs() < 1e-9);
    }

    #[test]
    fn delay_conversion() {
        assert!((delay_um_to_ps(299.792_458) - 1.0).abs() < 1e-12);
        assert!((delay_ps_to_um(1.0) - 299.792_458).abs() < 1e-9);
    }

    #[test]
    fn bandwidth_round_trip() {
        let dw = bandwidth_nm_to_rad_per_s(2.0, 1550.0);
        assert!((bandwidth_rad_per_s_to_nm(dw, 1550.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn db() {
        assert_eq!(db_to_fraction(0.0), 1.0);
        assert!((db_to_fraction(10.0) - 0.1).abs() < 1e-15);
    }
}
