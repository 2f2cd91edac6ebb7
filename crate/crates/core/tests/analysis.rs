use homsim::analysis::{derive_quantities, dip_model, fit_hom_dip, ScanDataset};
use proptest::prelude::*;

#[test]
fn csv_errors_name_the_line() {
    let text = "delay_um,rate_hz,err_hz\n0,1,0.1\n100,abc,0.1\n";
    let err = ScanDataset::parse_csv(text, "scan.csv").unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
}

#[test]
fn off_centre_dip_is_recovered() {
    let d: Vec<f64> = (0..31).map(|i| -1500.0 + 100.0 * i as f64).collect();
    let r: Vec<f64> = d
        .iter()
        .map(|&x| dip_model(x, 3.1, 0.8, 170.0, 300.0))
        .collect();
    let data = ScanDataset::new(d, r, vec![0.05; 31]).unwrap();
    let f = fit_hom_dip(&data, None).unwrap();
    assert!((f.d0_um - 170.0).abs() < 1e-6);
    assert!((f.v - 0.8).abs() < 1e-8);
    let q = derive_quantities(&f, 1550.0).unwrap();
    assert!((q.fwhm_um - 300.0 * 2.0 * (2.0 * 2f64.ln()).sqrt()).abs() < 1e-5);
}

proptest! {
    #[test]
    fn scan_csv_round_trip(rows in prop::collection::vec((-1e4f64..1e4, 0.0f64..1e3, 1e-3f64..10.0), 1..40)) {
        let mut d: Vec<f64> = rows.iter().map(|r| r.0).collect();
        d.sort_by(f64::total_cmp);
        let data = ScanDataset::new(d, rows.iter().map(|r| r.1).collect(), rows.iter().map(|r| r.2).collect()).unwrap();
        let back = ScanDataset::parse_csv(&data.to_csv_string(), "mem").unwrap();
        prop_assert_eq!(back, data);
    }
}
