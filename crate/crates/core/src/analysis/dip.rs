//! Gaussian dip fit `C(d) = C_n·(1 − V·exp(−(d − d₀)²/(2σ²)))` and derived quantities.

use nalgebra::Matrix4;

use crate::analysis::dataset::ScanDataset;
use crate::analysis::lm::{levenberg_marquardt, Model};
use crate::error::{Error, Result};
use crate::units::{fwhm_per_sigma, SPEED_OF_LIGHT};

/// Soft upper bound on a physical visibility; fits above it are flagged.
pub const VISIBILITY_SOFT_MAX: f64 = 1.05;

/// Gaussian time-bandwidth product with FWHM on both sides, 2 ln 2/π.
pub const TIME_BANDWIDTH_PRODUCT: f64 = 2.0 * std::f64::consts::LN_2 / std::f64::consts::PI;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

struct DipModel;

impl Model for DipModel {
    fn n_params(&self) -> usize {
        4
    }

    fn eval(&self, d: f64, p: &[f64], g: &mut [f64]) -> f64 {
        let (cn, v, d0, s) = (p[0], p[1], p[2], p[3]);
        let u = d - d0;
        let e = (-u * u / (2.0 * s * s)).exp();
        g[0] = 1.0 - v * e;
        g[1] = -cn * e;
        g[2] = -cn * v * e * u / (s * s);
        g[3] = -cn * v * e * u * u / (s * s * s);
        cn * (1.0 - v * e)
    }
}

/// Evaluates the dip model.
pub fn dip_model(d_um: f64, c_n: f64, v: f64, d0_um: f64, sigma_um: f64) -> f64 {
    let u = d_um - d0_um;
    c_n * (1.0 - v * (-u * u / (2.0 * sigma_um * sigma_um)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipGuess {
    pub c_n: f64,
    pub v: f64,
    pub d0_um: f64,
    pub sigma_um: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub c_n: f64,
    pub v: f64,
    pub d0_um: f64,
    pub sigma_um: f64,
    /// Parameter order: C_n, V, d₀, σ.
    pub covariance: Matrix4<f64>,
    pub chi2_dof: f64,
    pub iterations: usize,
}

impl FitResult {
    /// One-sigma errors in parameter order C_n, V, d₀, σ.
    pub fn errors(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|k| self.covariance[(k, k)].max(0.0).sqrt())
    }

    pub fn visibility_out_of_range(&self) -> bool {
        self.v > VISIBILITY_SOFT_MAX || self.v < 0.0
    }

    /// 95% interval on V.
    pub fn v_interval95(&self) -> (f64, f64) {
        let e = self.errors()[1];
        (self.v - Z95 * e, self.v + Z95 * e)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Starting point from the data alone.
///
/// Baseline is the median rate over the outer quartiles of delay, the centre
/// is the lowest point, and σ is half the distance between the half-depth
/// crossings.
pub fn initial_guess(data: &ScanDataset) -> Result<DipGuess> {
    if data.len() < 8 {
        return Err(Error::arg(format!(
            "dip fit needs at least 8 points, got {}",
            data.len()
        )));
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| data.positions_um[a].total_cmp(&data.positions_um[b]));
    let n = order.len();
    let q = n / 4;
    let outer: Vec<f64> = order[..q.max(1)]
        .iter()
        .chain(&order[n - q.max(1)..])
        .map(|&i| data.rates_hz[i])
        .collect();
    let c_n = median(outer);
    let (kmin, &imin) = order
        .iter()
        .enumerate()
        .min_by(|a, b| data.rates_hz[*a.1].total_cmp(&data.rates_hz[*b.1]))
        .expect("non-empty");
    let min = data.rates_hz[imin];
    let depth = c_n - min;
    let noise = data.errors_hz[imin].max(f64::MIN_POSITIVE);
    if !(depth > 3.0 * noise) || !(c_n > 0.0) {
        return Err(Error::NoDip(format!(
            "depth {depth:.4} Hz is not above 3x the error {noise:.4} Hz at the minimum"
        )));
    }
    let level = c_n - depth / 2.0;
    let pos = |k: usize| data.positions_um[order[k]];
    let rate = |k: usize| data.rates_hz[order[k]];
    let cross = |range: &mut dyn Iterator<Item = usize>, step_back: isize| -> f64 {
        for k in range {
            if rate(k) >= level {
                let j = (k as isize + step_back) as usize;
                let (x0, y0, x1, y1) = (pos(j), rate(j), pos(k), rate(k));
                return if y1 == y0 {
                    x1
                } else {
                    x0 + (level - y0) * (x1 - x0) / (y1 - y0)
                };
            }
        }
        if step_back > 0 {
            pos(0)
        } else {
            pos(n - 1)
        }
    };
    let left = cross(&mut (0..kmin).rev(), 1);
    let right = cross(&mut (kmin + 1..n), -1);
    let mut sigma = 0.5 * (right - left);
    if !(sigma > 0.0) {
        sigma = (pos(n - 1) - pos(0)) / 8.0;
    }
    Ok(DipGuess {
        c_n,
        v: depth / c_n,
        d0_um: data.positions_um[imin],
        sigma_um: sigma,
    })
}

/// Weighted least-squares fit of the dip model with weights `1/err²`.
pub fn fit_hom_dip(data: &ScanDataset, guess: Option<DipGuess>) -> Result<FitResult> {
    let auto = initial_guess(data)?;
    let g = guess.unwrap_or(auto);
    if data.errors_hz.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::arg("dip fit needs positive rate errors"));
    }
    let p0 = [g.c_n, g.v, g.d0_um, g.sigma_um];
    let scale = [g.c_n.abs(), 1.0, g.sigma_um.abs(), g.sigma_um.abs()];
    let out = levenberg_marquardt(
        &DipModel,
        &data.positions_um,
        &data.rates_hz,
        &data.errors_hz,
        &p0,
        &scale,
    )?;
    let cov = &out.covariance;
    let covariance = Matrix4::from_fn(|i, j| cov[(i, j)]);
    let dof = data.len().saturating_sub(4).max(1) as f64;
    Ok(FitResult {
        c_n: out.params[0],
        v: out.params[1],
        d0_um: out.params[2],
        sigma_um: out.params[3].abs(),
        covariance,
        chi2_dof: out.chi2 / dof,
        iterations: out.iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    pub fwhm_um: f64,
    pub fwhm_err_um: f64,
    pub coherence_time_ps: f64,
    pub coherence_time_err_ps: f64,
    pub bandwidth_nm: f64,
    pub bandwidth_err_nm: f64,
}

/// Dip FWHM, coherence time and single-photon bandwidth at `wavelength_nm`.
pub fn derive_quantities(fit: &FitResult, wavelength_nm: f64) -> Result<DerivedQuantities> {
    if !(fit.sigma_um > 0.0) {
        return Err(Error::arg("dip width must be > 0"));
    }
    let rel = fit.errors()[3] / fit.sigma_um;
    let fwhm_um = fwhm_per_sigma() * fit.sigma_um;
    let coherence_time_ps = fwhm_um * 1e-6 / SPEED_OF_LIGHT * 1e12;
    let lambda_m = wavelength_nm * 1e-9;
    let bandwidth_nm = TIME_BANDWIDTH_PRODUCT * lambda_m * lambda_m
        / (SPEED_OF_LIGHT * coherence_time_ps * 1e-12)
        * 1e9;
    Ok(DerivedQuantities {
        fwhm_um,
        fwhm_err_um: fwhm_um * rel,
        coherence_time_ps,
        coherence_time_err_ps: coherence_time_ps * rel,
        bandwidth_nm,
        bandwidth_err_nm: bandwidth_nm * rel,
    })
}
