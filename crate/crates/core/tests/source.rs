use approx::assert_relative_eq;
use homsim::source::{
    pair_number_distribution, phase_mismatch, sellmeier_index, shg_tuning_curve, spectral_overlap,
    CrystalConfig, DispersionData, PhaseMatchingKind, SourceSpectralModel,
};
use proptest::prelude::*;

// Independent evaluation of the bundled KTP coefficients (Python, float64).
const N_Y_1550: f64 = 1.7349440957853777;
const N_Y_775: f64 = 1.7581790048006931;
const N_Z_1550: f64 = 1.815833507986423;

#[test]
fn ktp_indices_match_reference_evaluation() {
    let ktp = DispersionData::bundled_ktp();
    assert_relative_eq!(
        sellmeier_index(1550.0, 25.0, ktp.axis("y").unwrap()).unwrap(),
        N_Y_1550,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        sellmeier_index(775.0, 25.0, ktp.axis("y").unwrap()).unwrap(),
        N_Y_775,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        sellmeier_index(1550.0, 25.0, ktp.axis("z").unwrap()).unwrap(),
        N_Z_1550,
        max_relative = 1e-12
    );
}

#[test]
fn sellmeier_out_of_range_is_domain_error() {
    let ktp = DispersionData::bundled_ktp();
    let err = sellmeier_index(5000.0, 25.0, ktp.axis("y").unwrap()).unwrap_err();
    assert!(matches!(err, homsim::Error::Domain { .. }), "{err}");
}

#[test]
fn type2_mismatch_is_odd_under_swap() {
    let c = CrystalConfig::ktp_type2(10.5, 25.0, 1550.0).unwrap();
    assert!(phase_mismatch(1550.0, 1550.0, &c).unwrap().abs() < 1e-6);
    let a = phase_mismatch(1549.0, 1551.0, &c).unwrap();
    let b = phase_mismatch(1551.0, 1549.0, &c).unwrap();
    assert_relative_eq!(a, 231.8635404733941, max_relative = 1e-6);
    assert_relative_eq!(b, -231.8987940857187, max_relative = 1e-6);
}

fn fwhm(x: &[f64], y: &[f64]) -> f64 {
    let above: Vec<f64> = x
        .iter()
        .zip(y)
        .filter(|(_, &v)| v >= 0.5)
        .map(|(&l, _)| l)
        .collect();
    above.last().unwrap() - above.first().unwrap()
}

#[test]
fn shg_width_scales_inversely_with_length() {
    let grid: Vec<f64> = (0..=8000).map(|i| 1546.0 + 0.002 * i as f64).collect();
    let short = CrystalConfig::ktp_type0(10.5, 25.0, 1550.0).unwrap();
    let long = CrystalConfig::ktp_type0(21.0, 25.0, 1550.0).unwrap();
    let w1 = fwhm(&grid, &shg_tuning_curve(&grid, &short).unwrap());
    let w2 = fwhm(&grid, &shg_tuning_curve(&grid, &long).unwrap());
    assert!((w1 - 1.528).abs() < 0.005, "{w1}");
    assert!((w1 / w2 - 2.0).abs() < 0.02, "{}", w1 / w2);
}

#[test]
fn overlap_is_one_at_degeneracy_and_falls_off() {
    for kind in [PhaseMatchingKind::GaussianApprox, PhaseMatchingKind::Sinc] {
        let m = SourceSpectralModel::from_bandwidth_nm(777.1, 777.1, kind, 2.05, 6.5e11).unwrap();
        assert_relative_eq!(spectral_overlap(&m), 1.0, epsilon = 1e-6);
        let o1 = spectral_overlap(&m.with_pump_wavelength(776.5));
        let o2 = spectral_overlap(&m.with_pump_wavelength(776.0));
        assert!(o2 < o1 && o1 < 1.0);
    }
}

proptest! {
    #[test]
    fn pair_distribution_is_normalised(mu in 0.0f64..5.0) {
        let p = pair_number_distribution(mu, 400).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let mean: f64 = p.iter().enumerate().map(|(n, &q)| n as f64 * q).sum();
        prop_assert!((mean - mu).abs() < 1e-8 * (1.0 + mu));
    }
}
