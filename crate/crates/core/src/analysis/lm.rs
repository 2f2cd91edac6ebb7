//! Weighted Levenberg-Marquardt with Marquardt diagonal scaling.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
pub const RELATIVE_STEP_TOL: f64 = 1e-9;

/// Least-squares problem `Σ ((y_i − f(x_i; p))/σ_i)²`.
pub trait Model {
    fn n_params(&self) -> usize;
    /// Model value and gradient with respect to the parameters.
    fn eval(&self, x: f64, p: &[f64], grad: &mut [f64]) -> f64;
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    /// `(JᵀWJ)⁻¹` at the solution.
    pub covariance: DMatrix<f64>,
    pub chi2: f64,
    pub iterations: usize,
}

fn assemble<M: Model>(
    model: &M,
    x: &[f64],
    y: &[f64],
    err: &[f64],
    p: &[f64],
) -> (DMatrix<f64>, DVector<f64>, f64) {
    let np = model.n_params();
    let mut jac = DMatrix::zeros(x.len(), np);
    let mut res = DVector::zeros(x.len());
    let mut grad = vec![0.0; np];
    for i in 0..x.len() {
        let f = model.eval(x[i], p, &mut grad);
        res[i] = (y[i] - f) / err[i];
        for k in 0..np {
            jac[(i, k)] = grad[k] / err[i];
        }
    }
    let chi2 = res.norm_squared();
    (jac, res, chi2)
}

fn chi2_at<M: Model>(model: &M, x: &[f64], y: &[f64], err: &[f64], p: &[f64]) -> f64 {
    let mut grad = vec![0.0; model.n_params()];
    x.iter()
        .zip(y)
        .zip(err)
        .map(|((&xi, &yi), &ei)| ((yi - model.eval(xi, p, &mut grad)) / ei).powi(2))
        .sum()
}

/// Minimises the weighted residuals starting from `p0`.
///
/// `scale` gives a typical magnitude per parameter; a step is small when
/// `|δ_k| < tol·(|p_k| + scale_k)` for every k, accepted or not.
pub fn levenberg_marquardt<M: Model>(
    model: &M,
    x: &[f64],
    y: &[f64],
    err: &[f64],
    p0: &[f64],
    scale: &[f64],
) -> Result<LmOutcome> {
    let np = model.n_params();
    if p0.len() != np || scale.len() != np {
        return Err(Error::arg(
            "parameter vector length does not match the model",
        ));
    }
    if x.len() != y.len() || x.len() != err.len() {
        return Err(Error::arg("x, y and error vectors differ in length"));
    }
    if x.len() < np {
        return Err(Error::arg(format!(
            "{} points cannot constrain {np} parameters",
            x.len()
        )));
    }
    if err.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::arg("all errors must be positive and finite"));
    }
    let mut p = p0.to_vec();
    let mut lambda = 1e-3;
    let (mut jac, mut res, mut chi2) = assemble(model, x, y, err, &p);
    for iter in 1..=MAX_ITERATIONS {
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &res;
        let mut a = jtj.clone();
        for k in 0..np {
            let d = jtj[(k, k)].max(1e-300);
            a[(k, k)] += lambda * d;
        }
        let Some(chol) = a.cholesky() else {
            lambda *= 10.0;
            continue;
        };
        let delta = chol.solve(&jtr);
        let small = (0..np).all(|k| delta[k].abs() < RELATIVE_STEP_TOL * (p[k].abs() + scale[k]));
        let trial: Vec<f64> = p.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
        let trial_chi2 = chi2_at(model, x, y, err, &trial);
        if trial_chi2.is_finite() && trial_chi2 <= chi2 {
            p = trial;
            (jac, res, chi2) = assemble(model, x, y, err, &p);
            lambda = (lambda / 10.0).max(1e-12);
        } else {
            lambda *= 10.0;
        }
        if small {
            let jtj = jac.transpose() * &jac;
            let covariance = jtj
                .try_inverse()
                .ok_or_else(|| Error::Degenerate("fit curvature matrix is singular".into()))?;
            return Ok(LmOutcome {
                params: p,
                covariance,
                chi2,
                iterations: iter,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        last: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Line;
    impl Model for Line {
        fn n_params(&self) -> usize {
            2
        }
        fn eval(&self, x: f64, p: &[f64], g: &mut [f64]) -> f64 {
            g[0] = 1.0;
            g[1] = x;
            p[0] + p[1] * x
        }
    }

    #[test]
    fn straight_line_matches_closed_form() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.1, 4.9, 7.0];
        let e = [1.0; 4];
        let out = levenberg_marquardt(&Line, &x, &y, &e, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        // Ordinary least squares: slope 1.98, intercept 1.03.
        assert!((out.params[1] - 1.98).abs() < 1e-9);
        assert!((out.params[0] - 1.03).abs() < 1e-9);
        // Var(slope) = 1/Σ(x − x̄)² = 0.2.
        assert!((out.covariance[(1, 1)] - 0.2).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_errors() {
        assert!(levenberg_marquardt(
            &Line,
            &[0.0, 1.0],
            &[0.0, 1.0],
            &[0.0, 1.0],
            &[0.0, 0.0],
            &[1.0, 1.0]
        )
        .is_err());
    }
}
