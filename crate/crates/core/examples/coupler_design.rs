//! Directional-coupler calibration from two 50:50 measurements, splitting
//! ratio against length, and Mach-Zehnder extinction.

use homsim::circuit::{mz_extinction, splitting_ratio, CouplerGeometry, CouplerModel};

fn main() -> homsim::Result<()> {
    let model = CouplerModel::from_anchors(&[(370.0, 28.0), (400.0, 33.0)])?;
    println!(
        "kappa0 = {:.5} rad/um at {} nm, gap decay {:.1} nm",
        model.kappa0, model.reference_gap, model.gap_decay
    );
    for gap in [350.0, 370.0, 386.0, 400.0, 430.0] {
        println!(
            "  gap {gap} nm: 50:50 at {:.2} um",
            model.fifty_fifty_length_um(gap, 1554.2)?
        );
    }

    println!("\nsplitting at 400 nm gap:");
    for length_um in [10.0, 20.0, 33.0, 45.0, 66.0] {
        let geom = CouplerGeometry {
            gap_nm: 400.0,
            length_um,
            width_um: 1.0,
            height_nm: 330.0,
            wavelength_nm: 1554.2,
        };
        let (t, r) = splitting_ratio(&geom, &model)?;
        println!(
            "  L = {length_um:5.1} um  T = {t:.4}  R = {r:.4}  MZ extinction {:.1} dB",
            mz_extinction((t, r), (t, r))
        );
    }
    Ok(())
}
