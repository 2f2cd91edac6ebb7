use homsim::circuit::bs_matrix;
use homsim::interference::{
    accidental_rate, coincidence_probability, hom_curve, overlap_vs_delay, splitter_visibility,
    DelayScan, RateBudget,
};
use homsim::source::{PhaseMatchingKind, SourceSpectralModel};
use num_complex::Complex64;

fn model() -> SourceSpectralModel {
    SourceSpectralModel::from_bandwidth_nm(
        777.1,
        777.1,
        PhaseMatchingKind::GaussianApprox,
        2.05,
        6.5e11,
    )
    .unwrap()
}

#[test]
fn balanced_splitter_identical_photons_never_coincide() {
    let bs = bs_matrix(0.5, 0.5).unwrap();
    assert_eq!(
        coincidence_probability(&bs, Complex64::new(1.0, 0.0)).unwrap(),
        0.0
    );
    assert_eq!(
        coincidence_probability(&bs, Complex64::new(0.0, 0.0)).unwrap(),
        0.5
    );
    assert!(coincidence_probability(&bs, Complex64::new(1.01, 0.0)).is_err());
}

#[test]
fn overlap_decays_symmetrically_with_delay() {
    let m = model();
    let o0 = overlap_vs_delay(&m, 0.0).norm();
    let plus = overlap_vs_delay(&m, 1.0).norm();
    let minus = overlap_vs_delay(&m, -1.0).norm();
    assert!((o0 - 1.0).abs() < 1e-12);
    assert!((plus - minus).abs() < 1e-12 && plus < o0);
}

#[test]
fn hom_curve_depth_matches_splitter_visibility() {
    let m = model();
    let bs = bs_matrix(0.44, 0.56).unwrap();
    let budget = RateBudget {
        pair_rate_hz: 1e3,
        arm_transmission: [0.1, 0.1],
        detector_efficiency: [0.5, 0.5],
        dark_rate_hz: [0.0, 0.0],
        window_ps: 256.0,
    };
    let scan = DelayScan::new(vec![0.0, 5000.0]).unwrap();
    let r = hom_curve(&m, &bs, &scan, &budget).unwrap();
    let v = 1.0 - r[0] / r[1];
    assert!((v - splitter_visibility(&bs)).abs() < 1e-5, "{v}");
}

#[test]
fn accidental_rate_reference_value() {
    assert!((accidental_rate(1e4, 1e4, 256.0) - 0.0256).abs() < 1e-15);
}
