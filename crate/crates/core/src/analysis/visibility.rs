//! Gaussian fit of visibility against pump wavelength.

use nalgebra::Matrix3;

use crate::analysis::lm::{levenberg_marquardt, Model};
use crate::error::{Error, Result};

struct GaussModel;

impl Model for GaussModel {
    fn n_params(&self) -> usize {
        3
    }

    fn eval(&self, x: f64, p: &[f64], g: &mut [f64]) -> f64 {
        let (a, c, s) = (p[0], p[1], p[2]);
        let u = x - c;
        let e = (-u * u / (2.0 * s * s)).exp();
        g[0] = e;
        g[1] = a * e * u / (s * s);
        g[2] = a * e * u * u / (s * s * s);
        a * e
    }
}

/// `V(λ) = V_max·exp(−(λ − λ_c)²/(2s²))`.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityFit {
    pub v_max: f64,
    pub centre_nm: f64,
    pub width_nm: f64,
    /// Parameter order: V_max, λ_c, s.
    pub covariance: Matrix3<f64>,
    pub chi2_dof: f64,
}

impl VisibilityFit {
    pub fn eval(&self, lambda_nm: f64) -> f64 {
        let u = lambda_nm - self.centre_nm;
        self.v_max * (-u * u / (2.0 * self.width_nm * self.width_nm)).exp()
    }

    /// Full width of the wavelength interval where `V > threshold`.
    pub fn span_above(&self, threshold: f64) -> f64 {
        if self.v_max <= threshold || threshold <= 0.0 {
            return 0.0;
        }
        2.0 * self.width_nm * (2.0 * (self.v_max / threshold).ln()).sqrt()
    }

    pub fn errors(&self) -> [f64; 3] {
        [0, 1, 2].map(|k| self.covariance[(k, k)].max(0.0).sqrt())
    }
}

pub fn fit_visibility_curve(lambda_nm: &[f64], v: &[f64], v_err: &[f64]) -> Result<VisibilityFit> {
    if lambda_nm.len() < 4 {
        return Err(Error::arg(format!(
            "visibility fit needs at least 4 points, got {}",
            lambda_nm.len()
        )));
    }
    let imax = (0..v.len())
        .max_by(|&a, &b| v[a].total_cmp(&v[b]))
        .ok_or_else(|| Error::arg("empty visibility list"))?;
    let lo = lambda_nm.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = lambda_nm.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let p0 = [v[imax], lambda_nm[imax], ((hi - lo) / 2.0).max(1e-3)];
    let scale = [1.0, p0[2], p0[2]];
    let out = levenberg_marquardt(&GaussModel, lambda_nm, v, v_err, &p0, &scale)?;
    let cov = &out.covariance;
    let dof = lambda_nm.len().saturating_sub(3).max(1) as f64;
    Ok(VisibilityFit {
        v_max: out.params[0],
        centre_nm: out.params[1],
        width_nm: out.params[2].abs(),
        covariance: Matrix3::from_fn(|i, j| cov[(i, j)]),
        chi2_dof: out.chi2 / dof,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_centre() {
        let l: Vec<f64> = (0..7).map(|i| 775.0 + 0.5 * i as f64).collect();
        let v: Vec<f64> = l
            .iter()
            .map(|x| 0.95 * (-(x - 776.5f64).powi(2) / 4.0).exp())
            .collect();
        let f = fit_visibility_curve(&l, &v, &[0.02; 7]).unwrap();
        assert!((f.centre_nm - 776.5).abs() < 1e-6);
        assert!((f.width_nm - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn too_few() {
        assert!(fit_visibility_curve(&[1.0, 2.0, 3.0], &[0.1, 0.2, 0.1], &[0.1; 3]).is_err());
    }
}
