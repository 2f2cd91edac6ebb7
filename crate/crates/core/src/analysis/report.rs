//! Fit report table and plain-text summary.

use std::fmt::Write as _;

use crate::analysis::dip::{DerivedQuantities, FitResult};

/// `parameter,value,uncertainty,unit` rows for the dip fit and derived quantities.
pub fn fit_report_csv(fit: &FitResult, derived: &DerivedQuantities) -> String {
    let e = fit.errors();
    let rows: [(&str, f64, f64, &str); 8] = [
        ("C_n", fit.c_n, e[0], "Hz"),
        ("V", fit.v, e[1], ""),
        ("d0", fit.d0_um, e[2], "um"),
        ("sigma", fit.sigma_um, e[3], "um"),
        ("fwhm", derived.fwhm_um, derived.fwhm_err_um, "um"),
        (
            "coherence_time",
            derived.coherence_time_ps,
            derived.coherence_time_err_ps,
            "ps",
        ),
        (
            "bandwidth",
            derived.bandwidth_nm,
            derived.bandwidth_err_nm,
            "nm",
        ),
        ("chi2_dof", fit.chi2_dof, 0.0, ""),
    ];
    let mut out = String::from("parameter,value,uncertainty,unit\n");
    for (name, v, u, unit) in rows {
        writeln!(out, "{name},{v},{u},{unit}").expect("writing to String");
    }
    out
}

/// Human-readable `name = value ± error unit` lines.
pub fn fit_summary(fit: &FitResult, derived: &DerivedQuantities) -> String {
    let e = fit.errors();
    let mut s = String::new();
    writeln!(s, "C_n            = {:.4} ± {:.4} Hz", fit.c_n, e[0]).unwrap();
    writeln!(s, "V              = {:.4} ± {:.4}", fit.v, e[1]).unwrap();
    writeln!(s, "d0             = {:.2} ± {:.2} um", fit.d0_um, e[2]).unwrap();
    writeln!(s, "sigma          = {:.2} ± {:.2} um", fit.sigma_um, e[3]).unwrap();
    writeln!(
        s,
        "fwhm           = {:.1} ± {:.1} um",
        derived.fwhm_um, derived.fwhm_err_um
    )
    .unwrap();
    writeln!(
        s,
        "coherence time = {:.4} ± {:.4} ps",
        derived.coherence_time_ps, derived.coherence_time_err_ps
    )
    .unwrap();
    writeln!(
        s,
        "bandwidth      = {:.3} ± {:.3} nm",
        derived.bandwidth_nm, derived.bandwidth_err_nm
    )
    .unwrap();
    writeln!(s, "chi2/dof       = {:.3}", fit.chi2_dof).unwrap();
    if fit.visibility_out_of_range() {
        writeln!(s, "warning: fitted visibility outside [0, 1.05]").unwrap();
    }
    s
}
