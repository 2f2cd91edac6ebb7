//! Detuning-slope calibration from two visibilities and the predicted
//! visibility against pump wavelength.

use homsim::analysis::fit_visibility_curve;
use homsim::experiment::ExperimentConfig;
use homsim::interference::visibility_prediction;
use homsim::source::{calibrate_detuning_slope, spectral_overlap};

fn main() -> homsim::Result<()> {
    let cfg = ExperimentConfig::preset("paper_fig4b")?;
    let model = cfg.spectral_model()?;
    let slope = calibrate_detuning_slope(&model, (775.0, 0.58), (777.1, 0.97))?;
    println!("calibrated detuning slope: {slope:.4e} rad/s per nm");

    let bs = cfg.beam_splitter()?;
    let stats = cfg.pair_statistics()?;
    let budget = cfg.rate_budget(&stats);
    let grid = &cfg.sweep.pump_wavelengths_nm;
    let mut predicted = Vec::new();
    for (k, &l) in grid.iter().enumerate() {
        let o = spectral_overlap(&model.with_pump_wavelength(l));
        let v = visibility_prediction(&bs, o, stats.mu, stats.interval_ps, &budget)?;
        predicted.push(v);
        println!(
            "  {l:6.1} nm  overlap {o:.4}  V = {v:.3}  (reference {:.2})",
            cfg.sweep.reference_visibilities[k]
        );
    }
    let fit = fit_visibility_curve(grid, &predicted, &cfg.sweep.reference_visibility_errors)?;
    println!(
        "Gaussian fit: V_max {:.3} at {:.2} nm, s = {:.2} nm, V > 0.9 over {:.2} nm",
        fit.v_max,
        fit.centre_nm,
        fit.width_nm,
        fit.span_above(0.9)
    );
    Ok(())
}
