//! Weighted dip fit on Poisson-noisy synthetic data and the derived
//! coherence time and bandwidth.

use homsim::analysis::{
    derive_quantities, dip_model, fit_hom_dip, fit_summary, rate_error, ScanDataset,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

fn main() -> homsim::Result<()> {
    let (c_n, v, d0, sigma, duration_s) = (4.2, 0.97, 0.0, 220.0, 30.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let positions: Vec<f64> = (0..25).map(|i| -1200.0 + 100.0 * i as f64).collect();
    let (mut rates, mut errors) = (Vec::new(), Vec::new());
    for &d in &positions {
        let mean = dip_model(d, c_n, v, d0, sigma) * duration_s;
        let n = Poisson::new(mean).expect("mean > 0").sample(&mut rng) as u64;
        rates.push(n as f64 / duration_s);
        errors.push(rate_error(n.max(1), duration_s));
    }
    let data = ScanDataset::new(positions, rates, errors)?;
    let fit = fit_hom_dip(&data, None)?;
    let derived = derive_quantities(&fit, 1554.2)?;
    println!("truth: C_n = {c_n}, V = {v}, d0 = {d0}, sigma = {sigma}");
    print!("{}", fit_summary(&fit, &derived));
    let (lo, hi) = fit.v_interval95();
    println!("95% interval on V: [{lo:.3}, {hi:.3}]");
    Ok(())
}
