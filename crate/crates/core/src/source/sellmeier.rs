//! Sellmeier dispersion with a polynomial thermo-optic correction.
//!
//! Coefficient sets live in plain-text files (`axis.name = value`, `#` comments)
//! so a different crystal or published fit can be swapped in without touching
//! code. The bundled file holds a KTP set.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Bundled KTP coefficient file.
pub const KTP_KATO_2002: &str = include_str!("../../data/ktp_kato2002.sellmeier");

/// Coefficients of one crystal axis.
///
/// `n0² = a + b/(λ² − c) + d/(λ² − e) − f·λ²` with λ in μm, then
/// `n(λ, T) = n0 + (t3/λ³ + t2/λ² + t1/λ + t0)·1e-5·(T − t_ref)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SellmeierSet {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    /// Thermo-optic polynomial `[t0, t1, t2, t3]` in units of 1e-5 / °C.
    pub thermo: [f64; 4],
    pub t_ref_c: f64,
    /// Validity range in μm, inclusive.
    pub range_um: (f64, f64),
}

impl SellmeierSet {
    /// Identity medium: n = 1 at every wavelength and temperature.
    pub fn vacuum() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            e: 0.0,
            f: 0.0,
            thermo: [0.0; 4],
            t_ref_c: 20.0,
            range_um: (0.01, 100.0),
        }
    }

    pub fn contains_nm(&self, lambda_nm: f64) -> bool {
        let l = lambda_nm * 1e-3;
        l >= self.range_um.0 && l <= self.range_um.1
    }
}

/// Refractive index at `lambda_nm` and `temperature_c`.
pub fn sellmeier_index(lambda_nm: f64, temperature_c: f64, coeffs: &SellmeierSet) -> Result<f64> {
    if !lambda_nm.is_finite() || !coeffs.contains_nm(lambda_nm) {
        return Err(Error::Domain {
            quantity: "wavelength (nm)",
            value: lambda_nm,
            min: coeffs.range_um.0 * 1e3,
            max: coeffs.range_um.1 * 1e3,
        });
    }
    let l = lambda_nm * 1e-3;
    let l2 = l * l;
    let n_sq = coeffs.a + coeffs.b / (l2 - coeffs.c) + coeffs.d / (l2 - coeffs.e) - coeffs.f * l2;
    if !(n_sq > 0.0) {
        return Err(Error::arg(format!(
            "Sellmeier form gives n² = {n_sq} at {lambda_nm} nm"
        )));
    }
    let [t0, t1, t2, t3] = coeffs.thermo;
    let dn_dt = (t3 / (l2 * l) + t2 / l2 + t1 / l + t0) * 1e-5;
    Ok(n_sq.sqrt() + dn_dt * (temperature_c - coeffs.t_ref_c))
}

/// Per-axis coefficient sets loaded from a dispersion file.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionData {
    axes: BTreeMap<String, SellmeierSet>,
}

impl DispersionData {
    pub fn bundled_ktp() -> Self {
        Self::parse(KTP_KATO_2002, "bundled KTP").expect("bundled Sellmeier file is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut raw: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx as u64 + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fail = |message: String| Error::TableFormat {
                source_name: source_name.to_string(),
                line: line_no,
                message,
            };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| fail("expected `axis.name = value`".into()))?;
            let (axis, name) = key
                .trim()
                .split_once('.')
                .ok_or_else(|| fail(format!("key `{}` has no axis prefix", key.trim())))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| fail(format!("`{}` is not a number", value.trim())))?;
            let entry = raw.entry(axis.to_string()).or_default();
            if entry.insert(name.to_string(), value).is_some() {
                return Err(fail(format!("duplicate key `{}`", key.trim())));
            }
        }
        if raw.is_empty() {
            return Err(Error::config(source_name, "no coefficients found"));
        }
        let mut axes = BTreeMap::new();
        for (axis, mut values) in raw {
            let t_ref = values.remove("t_ref_c");
            let mut take = |name: &str, required: bool| -> Result<f64> {
                match values.remove(name) {
                    Some(v) => Ok(v),
                    None if required => Err(Error::config(
                        format!("{source_name}: {axis}.{name}"),
                        "required key missing",
                    )),
                    None => Ok(0.0),
                }
            };
            let set = SellmeierSet {
                a: take("a", true)?,
                b: take("b", true)?,
                c: take("c", true)?,
                d: take("d", true)?,
                e: take("e", true)?,
                f: take("f", false)?,
                thermo: [
                    take("t0", false)?,
                    take("t1", false)?,
                    take("t2", false)?,
                    take("t3", false)?,
                ],
                t_ref_c: t_ref.unwrap_or(20.0),
                range_um: (take("min_um", true)?, take("max_um", true)?),
            };
            if let Some(unknown) = values.keys().next() {
                return Err(Error::config(
                    format!("{source_name}: {axis}.{unknown}"),
                    "unknown coefficient",
                ));
            }
            if !(set.range_um.0 > 0.0 && set.range_um.1 > set.range_um.0) {
                return Err(Error::config(
                    format!("{source_name}: {axis}.min_um"),
                    "validity range must satisfy 0 < min_um < max_um",
                ));
            }
            axes.insert(axis, set);
        }
        Ok(Self { axes })
    }

    pub fn axis(&self, name: &str) -> Result<&SellmeierSet> {
        self.axes.get(name).ok_or_else(|| {
            Error::arg(format!(
                "axis `{name}` not in dispersion data (have {:?})",
                self.axes.keys().collect::<Vec<_>>()
            ))
        })
    }

    pub fn axis_names(&self) -> impl Iterator<Item = &str> {
        self.axes.keys().map(String::as_str)
    }
}
