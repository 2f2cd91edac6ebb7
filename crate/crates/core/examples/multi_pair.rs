//! Thermal pair-number statistics and the visibility they allow, with and
//! without the bundled loss and detector budget.

use homsim::circuit::bs_matrix;
use homsim::experiment::ExperimentConfig;
use homsim::interference::{multi_pair_factor, visibility_prediction};
use homsim::source::{pair_number_distribution, PairStatistics};

fn main() -> homsim::Result<()> {
    for mu in [0.01, 0.1, 1.0] {
        let p = pair_number_distribution(mu, 50)?;
        println!(
            "mu = {mu:<5} P0 = {:.5} P1 = {:.5} P2 = {:.5} sum = {:.12}",
            p[0],
            p[1],
            p[2],
            p.iter().sum::<f64>()
        );
    }

    let cfg = ExperimentConfig::preset("paper_fig4a")?;
    let bs = bs_matrix(0.5, 0.5)?;
    println!("\nbalanced splitter, perfect overlap:");
    for mu in [1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5] {
        let stats = PairStatistics::new(mu, 0.0, 256.0)?;
        let budget = cfg.rate_budget(&stats);
        println!(
            "  mu = {mu:7.0e}  multi-pair factor {:.5}  V = {:.4}",
            multi_pair_factor(&bs, mu, &budget)?,
            visibility_prediction(&bs, 1.0, mu, 256.0, &budget)?
        );
    }
    Ok(())
}
