//! Directional-coupler beam splitters, Mach-Zehnder extinction and insertion loss.
//!
//! Coupling follows a two-parameter evanescent model,
//! `κ(gap) = κ0·exp(−(gap − gap_ref)/g0)`, with `Δn = λκ/π` and cross power
//! `R = sin²(κL)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::db_to_fraction;

/// Gap range over which the coupling model is trusted, nm.
pub const GAP_RANGE_NM: (f64, f64) = (150.0, 700.0);

/// Extinction reported for a perfectly balanced interferometer, dB.
pub const MZ_EXTINCTION_CAP_DB: f64 = 80.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplerGeometry {
    pub gap_nm: f64,
    pub length_um: f64,
    pub width_um: f64,
    pub height_nm: f64,
    pub wavelength_nm: f64,
}

impl CouplerGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("width_um", self.width_um),
            ("height_nm", self.height_nm),
            ("wavelength_nm", self.wavelength_nm),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("coupler {name} must be > 0, got {v}")));
            }
        }
        if !(self.length_um >= 0.0 && self.length_um.is_finite()) {
            return Err(Error::arg(format!(
                "coupler length must be >= 0, got {} um",
                self.length_um
            )));
        }
        check_gap(self.gap_nm)
    }
}

fn check_gap(gap_nm: f64) -> Result<()> {
    if !(gap_nm >= GAP_RANGE_NM.0 && gap_nm <= GAP_RANGE_NM.1) {
        return Err(Error::Domain {
            quantity: "coupler gap (nm)",
            value: gap_nm,
            min: GAP_RANGE_NM.0,
            max: GAP_RANGE_NM.1,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplerModel {
    /// Coupling coefficient at the reference gap, rad/μm.
    pub kappa0: f64,
    /// Exponential decay length of the coupling with gap, nm.
    pub gap_decay: f64,
    pub reference_gap: f64,
}

impl CouplerModel {
    pub fn new(kappa0: f64, gap_decay: f64, reference_gap: f64) -> Result<Self> {
        if !(kappa0 > 0.0 && kappa0.is_finite()) {
            return Err(Error::arg(format!("kappa0 must be > 0, got {kappa0}")));
        }
        if !(gap_decay > 0.0 && gap_decay.is_finite()) {
            return Err(Error::arg(format!(
                "gap_decay must be > 0, got {gap_decay}"
            )));
        }
        if !reference_gap.is_finite() {
            return Err(Error::arg("reference_gap must be finite"));
        }
        Ok(Self {
            kappa0,
            gap_decay,
            reference_gap,
        })
    }

    /// Least-squares fit of `ln κ` against gap through measured 50:50 points
    /// `(gap_nm, length_um)`. The reference gap is the widest anchor gap.
    pub fn from_anchors(anchors: &[(f64, f64)]) -> Result<Self> {
        if anchors.len() < 2 {
            return Err(Error::Degenerate(format!(
                "need at least 2 anchors, got {}",
                anchors.len()
            )));
        }
        for &(g, l) in anchors {
            check_gap(g)?;
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::arg(format!("anchor length must be > 0, got {l} um")));
            }
        }
        let reference_gap = anchors.iter().map(|a| a.0).fold(f64::MIN, f64::max);
        let n = anchors.len() as f64;
        let xs: Vec<f64> = anchors.iter().map(|a| a.0 - reference_gap).collect();
        let ys: Vec<f64> = anchors.iter().map(|a| (PI / (4.0 * a.1)).ln()).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        if sxx < 1e-12 {
            return Err(Error::Degenerate("all anchors share the same gap".into()));
        }
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        if !(slope < 0.0) {
            return Err(Error::Degenerate(
                "coupling must decrease with gap (50:50 length must grow with gap)".into(),
            ));
        }
        Self::new((my - slope * mx).exp(), -1.0 / slope, reference_gap)
    }

    /// Coupling coefficient κ in rad/μm.
    pub fn kappa(&self, gap_nm: f64) -> Result<f64> {
        check_gap(gap_nm)?;
        Ok(self.kappa0 * (-(gap_nm - self.reference_gap) / self.gap_decay).exp())
    }

    /// Length giving 50:50 splitting at `gap_nm`, μm.
    pub fn fifty_fifty_length_um(&self, gap_nm: f64, wavelength_nm: f64) -> Result<f64> {
        coupling_length(
            wavelength_nm,
            delta_n_from_gap(gap_nm, wavelength_nm, self)?,
        )
    }
}

/// `L_c = λ/(4Δn)` in μm.
pub fn coupling_length(wavelength_nm: f64, delta_n: f64) -> Result<f64> {
    if !(delta_n > 0.0 && delta_n.is_finite()) {
        return Err(Error::arg(format!("delta_n must be > 0, got {delta_n}")));
    }
    Ok(wavelength_nm * 1e-3 / (4.0 * delta_n))
}

/// Supermode index difference `Δn = λκ/π` at `gap_nm`.
pub fn delta_n_from_gap(gap_nm: f64, wavelength_nm: f64, model: &CouplerModel) -> Result<f64> {
    Ok(wavelength_nm * 1e-3 * model.kappa(gap_nm)? / PI)
}

/// `sin²(πx/4)` with exact values at integer `x`.
fn sin_sq_quarter_pi(x: f64) -> f64 {
    // sin²(πx/4) = (1 − cos(πx/2))/2; reduce πx/2 to a quadrant first.
    let q = x.rem_euclid(4.0);
    let k = q.round();
    let rem = (q - k) * PI / 2.0;
    let cos = match k as i64 % 4 {
        0 => rem.cos(),
        1 => -rem.sin(),
        2 => -rem.cos(),
        _ => rem.sin(),
    };
    (1.0 - cos) / 2.0
}

/// Straight-through and cross power fractions `(T, R)`.
pub fn splitting_ratio(geom: &CouplerGeometry, model: &CouplerModel) -> Result<(f64, f64)> {
    geom.validate()?;
    let lc = coupling_length(
        geom.wavelength_nm,
        delta_n_from_gap(geom.gap_nm, geom.wavelength_nm, model)?,
    )?;
    let r = sin_sq_quarter_pi(geom.length_um / lc);
    Ok((1.0 - r, r))
}

/// Lossless two-port with transfer matrix `[[t, r], [r, t]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    pub t: Complex64,
    pub r: Complex64,
    // Power fractions as given, kept so |t|² round-off does not leak into probabilities.
    t_power: f64,
    r_power: f64,
}

impl BeamSplitter {
    pub fn transmission(&self) -> f64 {
        self.t_power
    }

    pub fn reflection(&self) -> f64 {
        self.r_power
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.t, self.r], [self.r, self.t]]
    }

    /// `max |(U†U − I)_jk|`.
    pub fn unitarity_error(&self) -> f64 {
        let u = self.matrix();
        let mut worst: f64 = 0.0;
        for j in 0..2 {
            for k in 0..2 {
                let mut s: Complex64 = u.iter().map(|row| row[j].conj() * row[k]).sum();
                if j == k {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }
}

/// Beam splitter with `t = √T`, `r = i√R`.
pub fn bs_matrix(t_power: f64, r_power: f64) -> Result<BeamSplitter> {
    if !(0.0..=1.0).contains(&t_power) || !(0.0..=1.0).contains(&r_power) {
        return Err(Error::arg(format!(
            "splitting fractions must lie in [0, 1], got T = {t_power}, R = {r_power}"
        )));
    }
    if (t_power + r_power - 1.0).abs() > 1e-9 {
        return Err(Error::arg(format!(
            "lossless splitter needs T + R = 1, got {}",
            t_power + r_power
        )));
    }
    Ok(BeamSplitter {
        t: Complex64::new(t_power.sqrt(), 0.0),
        r: Complex64::new(0.0, r_power.sqrt()),
        t_power,
        r_power,
    })
}

/// Mach-Zehnder fringe extinction in dB for couplers `c1`, `c2` given as `(T, R)`.
///
/// Each output port's max/min power ratio over the internal phase is computed;
/// the smaller of the two is reported, capped at [`MZ_EXTINCTION_CAP_DB`].
pub fn mz_extinction(c1: (f64, f64), c2: (f64, f64)) -> f64 {
    let (t1, r1) = c1;
    let (t2, r2) = c2;
    let port = |a: f64, b: f64| {
        let (a, b) = (a.max(0.0).sqrt(), b.max(0.0).sqrt());
        let max = (a + b).powi(2);
        let min = (a - b).powi(2);
        if max <= 0.0 {
            0.0
        } else if min <= 0.0 {
            MZ_EXTINCTION_CAP_DB
        } else {
            (10.0 * (max / min).log10()).min(MZ_EXTINCTION_CAP_DB)
        }
    };
    port(t1 * t2, r1 * r2).min(port(r2 * t1, t2 * r1))
}

/// Fixed insertion losses in dB.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossBudget {
    pub facet_db: f64,
    pub tap_db: f64,
    pub propagation_db: f64,
}

impl LossBudget {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("facet_db", self.facet_db),
            ("tap_db", self.tap_db),
            ("propagation_db", self.propagation_db),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("loss {name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn total_db(&self, path: &LossPath) -> f64 {
        path.facets as f64 * self.facet_db
            + path.taps as f64 * self.tap_db
            + if path.propagation {
                self.propagation_db
            } else {
                0.0
            }
    }

    pub fn transmission(&self, path: &LossPath) -> f64 {
        db_to_fraction(self.total_db(path))
    }
}

/// Which loss elements a photon passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LossPath {
    pub facets: u32,
    pub taps: u32,
    pub propagation: bool,
}

impl LossPath {
    /// Fibre-coupled input through one facet and one monitor tap to an on-chip detector.
    pub const INPUT_ARM: LossPath = LossPath {
        facets: 1,
        taps: 1,
        propagation: true,
    };
}

/// Attenuates `value` by the losses along `path`.
pub fn apply_loss(value: f64, budget: &LossBudget, path: &LossPath) -> f64 {
    value * budget.transmission(path)
}
