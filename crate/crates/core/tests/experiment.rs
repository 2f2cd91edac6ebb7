use homsim::experiment::{cmd_simulate, cmd_sweep_power, cmd_sweep_pump, ExperimentConfig, PRESETS};

#[test]
fn presets_parse_and_round_trip() {
    for name in PRESETS {
        let cfg = ExperimentConfig::preset(name).unwrap();
        cfg.validate().unwrap();
        let again = ExperimentConfig::parse(&cfg.to_toml(), name).unwrap();
        assert_eq!(again, cfg);
    }
}

#[test]
fn simulated_visibility_agrees_with_prediction() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::preset("paper_fig4b").unwrap();
    cfg.acquisition.duration_s = 60.0;
    let rep = cmd_sweep_pump(&cfg, Some(&[776.0, 777.1]), true, dir.path()).unwrap();
    for row in &rep.rows {
        let (v, e) = (row.simulated_v.unwrap(), row.simulated_v_err.unwrap());
        assert!((v - row.predicted_v).abs() < 3.0 * e, "{row:?}");
    }
    // The degenerate pump wavelength gives the preset's highest prediction.
    let full = cmd_sweep_pump(&cfg, None, false, dir.path()).unwrap();
    let best = full.rows.iter().map(|r| r.predicted_v).fold(0.0, f64::max);
    assert_eq!(rep.rows[1].predicted_v, best);
}

#[test]
fn power_sweep_widths_overlap_and_mu_is_linear() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::preset("paper_supp_power").unwrap();
    cfg.sweep.power_durations_s = vec![40.0, 120.0];
    let rep = cmd_sweep_power(&cfg, None, dir.path()).unwrap();
    let (a, b) = (&rep.rows[0], &rep.rows[1]);
    assert!((a.mu / a.power_mw - b.mu / b.power_mw).abs() < 1e-18);
    let gap = (a.derived.fwhm_um - b.derived.fwhm_um).abs();
    assert!(gap <= a.derived.fwhm_err_um + b.derived.fwhm_err_um, "{gap}");
}

#[test]
fn short_acquisition_gives_percent_level_uncertainty() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::preset("paper_fig4a").unwrap();
    cfg.acquisition.duration_s = 10.0;
    cfg.acquisition.write_tags = false;
    let rep = cmd_simulate(&cfg, dir.path()).unwrap();
    let e = rep.fit.errors()[1];
    assert!((0.01..0.06).contains(&e), "{e}");
    assert!(!dir.path().join("tags").exists());
}
