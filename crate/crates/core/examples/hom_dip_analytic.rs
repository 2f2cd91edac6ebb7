//! Expected coincidence rate across the delay scan of the bundled preset.

use homsim::experiment::ExperimentConfig;
use homsim::interference::{dip_sigma_um, hom_curve, splitter_visibility};
use homsim::units::fwhm_per_sigma;

fn main() -> homsim::Result<()> {
    let cfg = ExperimentConfig::preset("paper_fig4a")?;
    let model = cfg.spectral_model()?;
    let bs = cfg.beam_splitter()?;
    let budget = cfg.rate_budget(&cfg.pair_statistics()?);
    let scan = cfg.delay_scan()?;
    let rates = hom_curve(&model, &bs, &scan, &budget)?;
    let peak = rates.iter().copied().fold(0.0, f64::max);
    println!(
        "T:R = {:.3}:{:.3}, splitter-limited V = {:.4}, dip FWHM = {:.1} um",
        bs.transmission(),
        bs.reflection(),
        splitter_visibility(&bs),
        fwhm_per_sigma() * dip_sigma_um(&model)
    );
    for (d, r) in scan.positions_um().iter().zip(&rates) {
        println!(
            "{d:8.0} um  {r:6.3} Hz  {}",
            "*".repeat((50.0 * r / peak).round() as usize)
        );
    }
    Ok(())
}
