//! KTP refractive indices, the type-II poling period near 1554 nm and the
//! SHG tuning curve of a type-0 grating.

use homsim::source::{
    detuning_slope_from_crystal, phase_mismatch, sellmeier_index, shg_tuning_curve, CrystalConfig,
    DispersionData,
};

fn main() -> homsim::Result<()> {
    let ktp = DispersionData::bundled_ktp();
    for axis in ["x", "y", "z"] {
        let s = ktp.axis(axis)?;
        println!(
            "n_{axis}: {:.6} @ 777.1 nm, {:.6} @ 1554.2 nm (25 C)",
            sellmeier_index(777.1, 25.0, s)?,
            sellmeier_index(1554.2, 25.0, s)?
        );
    }

    let type2 = CrystalConfig::ktp_type2(10.5, 25.0, 1554.2)?;
    println!(
        "\ntype-II poling period: {:.3} um (order {})",
        type2.poling_period_um, type2.grating_order
    );
    for (ls, li) in [(1554.2, 1554.2), (1553.0, 1555.4), (1552.0, 1556.4)] {
        println!(
            "  dk({ls}, {li}) = {:9.2} rad/m",
            phase_mismatch(ls, li, &type2)?
        );
    }
    println!(
        "  detuning slope: {:.3e} rad/s per nm",
        detuning_slope_from_crystal(&type2, 777.1)?
    );

    let type0 = CrystalConfig::ktp_type0(10.5, 25.0, 1554.2)?;
    let grid: Vec<f64> = (0..=40).map(|i| 1552.2 + 0.1 * i as f64).collect();
    let curve = shg_tuning_curve(&grid, &type0)?;
    println!("\ntype-0 SHG tuning curve, 10.5 mm:");
    for (l, p) in grid.iter().zip(&curve).step_by(4) {
        println!(
            "  {l:7.1} nm  {p:.4}  {}",
            "#".repeat((p * 40.0).round() as usize)
        );
    }
    Ok(())
}
