//! The five workflows behind the command-line verbs. Each writes its tables
//! into an output directory and returns the numbers it wrote.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{
    derive_quantities, fit_hom_dip, fit_report_csv, fit_summary, fit_visibility_curve,
    DerivedQuantities, FitResult, ScanDataset, VisibilityFit,
};
use crate::circuit::{
    mz_extinction, splitting_ratio, CouplerGeometry, CouplerModel, MZ_EXTINCTION_CAP_DB,
};
use crate::error::{Error, Result};
use crate::experiment::config::ExperimentConfig;
use crate::experiment::pipeline::{simulate_scan, to_dataset, PointResult, Setup};
use crate::interference::{hom_curve, visibility_prediction};
use crate::source::spectral_overlap;
use crate::tcspc::{count_coincidences, read_tags, split_channels, write_tags};

pub const MANIFEST_HEADER: &str = "point,delay_um,duration_s,window_ps,wavelength_nm,file";

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub points: Vec<PointResult>,
    pub dataset: ScanDataset,
    pub fit: FitResult,
    pub derived: DerivedQuantities,
    pub predicted_visibility: f64,
    pub summary: String,
}

/// Delay scan with the configured source, circuit and detectors.
///
/// Writes `scan.csv`, `points.csv` (counts, singles and the analytic
/// expectation per point), `fit_report.csv`, `summary.txt` and, when
/// `acquisition.write_tags` is set, `tags/point_NNN.ptag` plus
/// `tags/manifest.csv`.
pub fn cmd_simulate(cfg: &ExperimentConfig, out_dir: &Path) -> Result<SimulateReport> {
    cfg.validate()?;
    let seed = cfg.seed()?;
    let stats = cfg.pair_statistics()?;
    let setup = Setup::from_config(cfg, &stats)?;
    let scan = cfg.delay_scan()?;
    let duration = cfg.acquisition.duration_s;
    let write_tags_enabled = cfg.acquisition.write_tags;
    let points = simulate_scan(&setup, &scan, duration, seed, 0, write_tags_enabled)?;
    let dataset = to_dataset(&points)?;

    ensure_dir(out_dir)?;
    write(&out_dir.join("scan.csv"), &dataset.to_csv_string())?;
    let expected = hom_curve(&setup.model, &setup.bs, &scan, &setup.budget)?;
    let mut table = String::from(
        "delay_um,coincidences,singles_1,singles_2,duration_s,rate_hz,err_hz,expected_rate_hz\n",
    );
    for (p, e) in points.iter().zip(&expected) {
        writeln!(
            table,
            "{},{},{},{},{},{},{},{}",
            p.delay_um,
            p.coincidences,
            p.singles[0],
            p.singles[1],
            p.duration_s,
            p.rate_hz,
            p.err_hz,
            e
        )
        .unwrap();
    }
    write(&out_dir.join("points.csv"), &table)?;

    if write_tags_enabled {
        let tag_dir = out_dir.join("tags");
        ensure_dir(&tag_dir)?;
        let mut manifest = format!("{MANIFEST_HEADER}\n");
        for (i, p) in points.iter().enumerate() {
            let name = format!("point_{i:03}.ptag");
            write_tags(&tag_dir.join(&name), p.tags.as_deref().unwrap_or(&[]))?;
            writeln!(
                manifest,
                "{i},{},{},{},{},{name}",
                p.delay_um, p.duration_s, setup.budget.window_ps, cfg.circuit.wavelength_nm
            )
            .unwrap();
        }
        write(&tag_dir.join("manifest.csv"), &manifest)?;
    }

    let fit = fit_hom_dip(&dataset, None)?;
    let derived = derive_quantities(&fit, cfg.circuit.wavelength_nm)?;
    write(
        &out_dir.join("fit_report.csv"),
        &fit_report_csv(&fit, &derived),
    )?;
    let o = spectral_overlap(&setup.model);
    let predicted_visibility =
        visibility_prediction(&setup.bs, o, stats.mu, stats.interval_ps, &setup.budget)?;
    let mut summary = String::new();
    writeln!(summary, "seed           = {seed}").unwrap();
    writeln!(summary, "points         = {} x {duration} s", points.len()).unwrap();
    writeln!(
        summary,
        "splitting T:R  = {:.4}:{:.4}",
        setup.bs.transmission(),
        setup.bs.reflection()
    )
    .unwrap();
    writeln!(
        summary,
        "mu             = {:.6e} per {} ps",
        stats.mu, stats.interval_ps
    )
    .unwrap();
    writeln!(summary, "pair rate      = {:.1} Hz", stats.pair_rate_hz()).unwrap();
    writeln!(
        summary,
        "expected C_n   = {:.4} Hz",
        setup.budget.baseline_hz(&setup.bs)
    )
    .unwrap();
    writeln!(summary, "predicted V    = {predicted_visibility:.4}").unwrap();
    writeln!(summary).unwrap();
    summary.push_str(&fit_summary(&fit, &derived));
    write(&out_dir.join("summary.txt"), &summary)?;
    Ok(SimulateReport {
        points,
        dataset,
        fit,
        derived,
        predicted_visibility,
        summary,
    })
}

#[derive(Debug, Clone)]
pub struct AnalyzeReport {
    pub dataset: ScanDataset,
    pub fit: FitResult,
    pub derived: DerivedQuantities,
    pub summary: String,
}

#[derive(Debug, serde::Deserialize)]
struct ManifestRow {
    #[allow(dead_code)]
    point: usize,
    delay_um: f64,
    duration_s: f64,
    window_ps: f64,
    wavelength_nm: f64,
    file: PathBuf,
}

/// Rebuilds the scan from a tag manifest by counting coincidences again.
///
/// Returns the dataset and the wavelength recorded in the manifest.
pub fn scan_from_manifest(path: &Path) -> Result<(ScanDataset, f64)> {
    let name = path.display().to_string();
    let base = path.parent().unwrap_or(Path::new("."));
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::TableFormat {
        source_name: name.clone(),
        line: 0,
        message: e.to_string(),
    })?;
    let (mut d, mut r, mut e) = (Vec::new(), Vec::new(), Vec::new());
    let mut wavelength = None;
    for (i, row) in reader.deserialize::<ManifestRow>().enumerate() {
        let row = row.map_err(|err| Error::TableFormat {
            source_name: name.clone(),
            line: i as u64 + 2,
            message: err.to_string(),
        })?;
        let tags = read_tags(&base.join(&row.file))?;
        let [a, b] = split_channels(&tags);
        let c = count_coincidences(&a, &b, row.window_ps, row.duration_s)?;
        d.push(row.delay_um);
        r.push(c.rate_hz);
        e.push(crate::analysis::rate_error(c.count.max(1), row.duration_s));
        wavelength.get_or_insert(row.wavelength_nm);
    }
    let wavelength = wavelength.ok_or_else(|| Error::TableFormat {
        source_name: name,
        line: 1,
        message: "manifest lists no tag files".into(),
    })?;
    Ok((ScanDataset::new(d, r, e)?, wavelength))
}

/// Fits a scan CSV (`delay_um,rate_hz,err_hz`) or a tag manifest.
///
/// `wavelength_nm` converts the dip width to a bandwidth; a manifest carries
/// its own and overrides it. With `out_dir`, writes `fit_report.csv` and
/// `summary.txt`.
pub fn cmd_analyze(
    input: &Path,
    wavelength_nm: f64,
    out_dir: Option<&Path>,
) -> Result<AnalyzeReport> {
    let text = fs::read_to_string(input).map_err(|e| Error::io(input, e))?;
    let (dataset, wavelength) = if text.starts_with("point,") {
        scan_from_manifest(input)?
    } else {
        (
            ScanDataset::parse_csv(&text, &input.display().to_string())?,
            wavelength_nm,
        )
    };
    let fit = fit_hom_dip(&dataset, None)?;
    let derived = derive_quantities(&fit, wavelength)?;
    let summary = fit_summary(&fit, &derived);
    if let Some(dir) = out_dir {
        ensure_dir(dir)?;
        write(&dir.join("fit_report.csv"), &fit_report_csv(&fit, &derived))?;
        write(&dir.join("summary.txt"), &summary)?;
    }
    Ok(AnalyzeReport {
        dataset,
        fit,
        derived,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpSweepRow {
    pub pump_wavelength_nm: f64,
    pub spectral_overlap: f64,
    pub predicted_v: f64,
    pub reference_v: Option<f64>,
    pub simulated_v: Option<f64>,
    pub simulated_v_err: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PumpSweepReport {
    pub rows: Vec<PumpSweepRow>,
    /// Gaussian fit to the predicted visibilities (needs four or more wavelengths).
    pub predicted_fit: Option<VisibilityFit>,
    pub reference_fit: Option<VisibilityFit>,
    pub summary: String,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Visibility against pump wavelength.
///
/// `wavelengths_nm` falls back to `sweep.pump_wavelengths_nm`. With
/// `simulate`, each wavelength also runs the full delay scan and fits it.
/// Writes `sweep_pump.csv`, `sweep_pump_curve.csv` (dense predicted curve)
/// and `sweep_pump_summary.txt`.
pub fn cmd_sweep_pump(
    cfg: &ExperimentConfig,
    wavelengths_nm: Option<&[f64]>,
    simulate: bool,
    out_dir: &Path,
) -> Result<PumpSweepReport> {
    cfg.validate()?;
    let grid = wavelengths_nm.unwrap_or(&cfg.sweep.pump_wavelengths_nm);
    if grid.is_empty() {
        return Err(Error::config(
            "sweep.pump_wavelengths_nm",
            "no pump wavelengths given",
        ));
    }
    let stats = cfg.pair_statistics()?;
    let setup = Setup::from_config(cfg, &stats)?;
    let predict = |l: f64| -> Result<(f64, f64)> {
        let o = spectral_overlap(&setup.model.with_pump_wavelength(l));
        Ok((
            o,
            visibility_prediction(&setup.bs, o, stats.mu, stats.interval_ps, &setup.budget)?,
        ))
    };
    let sw = &cfg.sweep;
    let reference = |l: f64| -> (Option<f64>, Option<f64>) {
        match sw.pump_wavelengths_nm.iter().position(|&x| x == l) {
            Some(k) => (
                sw.reference_visibilities.get(k).copied(),
                sw.reference_visibility_errors.get(k).copied(),
            ),
            None => (None, None),
        }
    };

    let (seed, scan) = if simulate {
        (cfg.seed()?, Some(cfg.delay_scan()?))
    } else {
        (0, None)
    };
    let mut rows = Vec::with_capacity(grid.len());
    for (k, &l) in grid.iter().enumerate() {
        let (o, v) = predict(l)?;
        let (mut sim_v, mut sim_err) = (None, None);
        if let Some(scan) = &scan {
            let mut s = setup.clone();
            s.model = s.model.with_pump_wavelength(l);
            let pts = simulate_scan(
                &s,
                scan,
                cfg.acquisition.duration_s,
                seed,
                (k as u64 + 1) << 32,
                false,
            )?;
            let fit = fit_hom_dip(&to_dataset(&pts)?, None)?;
            sim_v = Some(fit.v);
            sim_err = Some(fit.errors()[1]);
        }
        rows.push(PumpSweepRow {
            pump_wavelength_nm: l,
            spectral_overlap: o,
            predicted_v: v,
            reference_v: reference(l).0,
            simulated_v: sim_v,
            simulated_v_err: sim_err,
        });
    }

    let lambdas: Vec<f64> = rows.iter().map(|r| r.pump_wavelength_nm).collect();
    let ref_errs: Option<Vec<f64>> = grid.iter().map(|&l| reference(l).1).collect();
    let weights = ref_errs.clone().unwrap_or_else(|| vec![0.01; grid.len()]);
    let predicted: Vec<f64> = rows.iter().map(|r| r.predicted_v).collect();
    let predicted_fit = (grid.len() >= 4)
        .then(|| fit_visibility_curve(&lambdas, &predicted, &weights))
        .transpose()?;
    let refs: Option<Vec<f64>> = rows.iter().map(|r| r.reference_v).collect();
    let reference_fit = match (&refs, &ref_errs) {
        (Some(v), Some(e)) if grid.len() >= 4 => Some(fit_visibility_curve(&lambdas, v, e)?),
        _ => None,
    };

    ensure_dir(out_dir)?;
    let mut csv = String::from(
        "pump_wavelength_nm,spectral_overlap,predicted_v,reference_v,simulated_v,simulated_v_err\n",
    );
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.pump_wavelength_nm,
            r.spectral_overlap,
            r.predicted_v,
            opt(r.reference_v),
            opt(r.simulated_v),
            opt(r.simulated_v_err)
        )
        .unwrap();
    }
    write(&out_dir.join("sweep_pump.csv"), &csv)?;

    let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let n = 201;
    let mut curve = String::from("pump_wavelength_nm,predicted_v\n");
    for i in 0..n {
        let l = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        writeln!(curve, "{l},{}", predict(l)?.1).unwrap();
    }
    write(&out_dir.join("sweep_pump_curve.csv"), &curve)?;

    let mut summary = String::new();
    for r in &rows {
        write!(
            summary,
            "{:>8.2} nm  predicted V = {:.3}",
            r.pump_wavelength_nm, r.predicted_v
        )
        .unwrap();
        if let Some(v) = r.reference_v {
            write!(summary, "  reference {v:.2}").unwrap();
        }
        if let (Some(v), Some(e)) = (r.simulated_v, r.simulated_v_err) {
            write!(summary, "  simulated {v:.3} ± {e:.3}").unwrap();
        }
        summary.push('\n');
    }
    for (label, f) in [("predicted", &predicted_fit), ("reference", &reference_fit)] {
        if let Some(f) = f {
            writeln!(
                summary,
                "{label} curve: V_max = {:.3}, centre = {:.3} nm, s = {:.3} nm, V > 0.9 over {:.2} nm",
                f.v_max,
                f.centre_nm,
                f.width_nm,
                f.span_above(0.9)
            )
            .unwrap();
        }
    }
    write(&out_dir.join("sweep_pump_summary.txt"), &summary)?;
    Ok(PumpSweepReport {
        rows,
        predicted_fit,
        reference_fit,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSweepRow {
    pub power_mw: f64,
    pub mu: f64,
    pub pair_rate_hz: f64,
    pub duration_s: f64,
    pub predicted_v: f64,
    pub fit: FitResult,
    pub derived: DerivedQuantities,
}

#[derive(Debug, Clone)]
pub struct PowerSweepReport {
    pub rows: Vec<PowerSweepRow>,
    /// Fitted V at each power minus V at the first power.
    pub delta_v: Vec<f64>,
    pub summary: String,
}

/// Repeats the delay scan at each pump power.
///
/// Every power replays the same per-point random streams. When the
/// acquisition times make the expected pair number per point equal, the
/// photon histories coincide up to the time scale, so differences in the
/// fitted visibility come from the power-dependent physics (multi-pair
/// emission, accidentals against dark counts) rather than from independent
/// shot noise. Writes `sweep_power.csv` and `sweep_power_summary.txt`.
pub fn cmd_sweep_power(
    cfg: &ExperimentConfig,
    powers_mw: Option<&[f64]>,
    out_dir: &Path,
) -> Result<PowerSweepReport> {
    cfg.validate()?;
    let powers = powers_mw.unwrap_or(&cfg.sweep.powers_mw);
    if powers.is_empty() {
        return Err(Error::config("sweep.powers_mw", "no pump powers given"));
    }
    let durations: Vec<f64> = if powers_mw.is_none() && !cfg.sweep.power_durations_s.is_empty() {
        cfg.sweep.power_durations_s.clone()
    } else {
        vec![cfg.acquisition.duration_s; powers.len()]
    };
    let seed = cfg.seed()?;
    let scan = cfg.delay_scan()?;
    let mut rows = Vec::with_capacity(powers.len());
    for (&p, &duration) in powers.iter().zip(&durations) {
        let stats = cfg.pair_statistics_at(p)?;
        let setup = Setup::from_config(cfg, &stats)?;
        let pts = simulate_scan(&setup, &scan, duration, seed, 0, false)?;
        let fit = fit_hom_dip(&to_dataset(&pts)?, None)?;
        let derived = derive_quantities(&fit, cfg.circuit.wavelength_nm)?;
        let o = spectral_overlap(&setup.model);
        rows.push(PowerSweepRow {
            power_mw: p,
            mu: stats.mu,
            pair_rate_hz: stats.pair_rate_hz(),
            duration_s: duration,
            predicted_v: visibility_prediction(
                &setup.bs,
                o,
                stats.mu,
                stats.interval_ps,
                &setup.budget,
            )?,
            fit,
            derived,
        });
    }
    let delta_v: Vec<f64> = rows.iter().map(|r| r.fit.v - rows[0].fit.v).collect();

    ensure_dir(out_dir)?;
    let mut csv = String::from(
        "power_mw,mu,pair_rate_hz,duration_s,predicted_v,fitted_v,v_err,c_n_hz,c_n_err_hz,fwhm_um,fwhm_err_um,delta_v\n",
    );
    for (r, dv) in rows.iter().zip(&delta_v) {
        let e = r.fit.errors();
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.power_mw,
            r.mu,
            r.pair_rate_hz,
            r.duration_s,
            r.predicted_v,
            r.fit.v,
            e[1],
            r.fit.c_n,
            e[0],
            r.derived.fwhm_um,
            r.derived.fwhm_err_um,
            dv
        )
        .unwrap();
    }
    write(&out_dir.join("sweep_power.csv"), &csv)?;
    let mut summary = String::new();
    for (r, dv) in rows.iter().zip(&delta_v) {
        writeln!(
            summary,
            "{:>6.2} mW  mu = {:.3e}  V = {:.4} ± {:.4}  fwhm = {:.0} ± {:.0} um  dV = {:+.4}",
            r.power_mw,
            r.mu,
            r.fit.v,
            r.fit.errors()[1],
            r.derived.fwhm_um,
            r.derived.fwhm_err_um,
            dv
        )
        .unwrap();
    }
    write(&out_dir.join("sweep_power_summary.txt"), &summary)?;
    Ok(PowerSweepReport {
        rows,
        delta_v,
        summary,
    })
}

#[derive(Debug, Clone)]
pub struct CouplerReport {
    pub model: CouplerModel,
    /// `(gap_nm, 50:50 length μm)` for each requested gap.
    pub fifty_fifty: Vec<(f64, f64)>,
    /// Length of two identical couplers at `mz_gap_nm` giving the deepest
    /// Mach-Zehnder extinction, and that extinction.
    pub mz_best_length_um: f64,
    pub mz_best_extinction_db: f64,
    pub summary: String,
}

/// Fits the coupler model to `(gap_nm, 50:50 length μm)` anchors.
///
/// Writes `coupler_model.toml` (a `[circuit.coupler]` block),
/// `coupler_design.csv` and `coupler_mz.csv` (extinction against length at
/// `mz_gap_nm`).
pub fn cmd_calibrate_coupler(
    anchors: &[(f64, f64)],
    gaps_nm: &[f64],
    mz_gap_nm: f64,
    wavelength_nm: f64,
    out_dir: &Path,
) -> Result<CouplerReport> {
    let model = CouplerModel::from_anchors(anchors)?;
    let fifty_fifty: Vec<(f64, f64)> = gaps_nm
        .iter()
        .map(|&g| {
            model
                .fifty_fifty_length_um(g, wavelength_nm)
                .map(|l| (g, l))
        })
        .collect::<Result<_>>()?;

    let geometry = |length_um: f64| CouplerGeometry {
        gap_nm: mz_gap_nm,
        length_um,
        width_um: 1.0,
        height_nm: 330.0,
        wavelength_nm,
    };
    let l50 = model.fifty_fifty_length_um(mz_gap_nm, wavelength_nm)?;
    let (lo, hi, n) = (0.5 * l50, 1.5 * l50, 4001);
    let mut mz_csv = String::from("length_um,extinction_db\n");
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for i in 0..n {
        let l = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let (t, r) = splitting_ratio(&geometry(l), &model)?;
        let ext = mz_extinction((t, r), (t, r));
        writeln!(mz_csv, "{l},{ext}").unwrap();
        if ext > best.0 {
            best = (ext, vec![l]);
        } else if ext == best.0 {
            best.1.push(l);
        }
    }
    // Near 50:50 the extinction saturates at the cap; report the plateau centre.
    let mz_best_length_um = best.1.iter().sum::<f64>() / best.1.len() as f64;
    let mz_best_extinction_db = best.0.min(MZ_EXTINCTION_CAP_DB);

    ensure_dir(out_dir)?;
    let toml_block = format!(
        "[circuit.coupler]\nkappa0_rad_per_um = {}\ngap_decay_nm = {}\nreference_gap_nm = {}\n",
        model.kappa0, model.gap_decay, model.reference_gap
    );
    write(&out_dir.join("coupler_model.toml"), &toml_block)?;
    let mut design = String::from("gap_nm,fifty_fifty_length_um\n");
    for (g, l) in &fifty_fifty {
        writeln!(design, "{g},{l}").unwrap();
    }
    write(&out_dir.join("coupler_design.csv"), &design)?;
    write(&out_dir.join("coupler_mz.csv"), &mz_csv)?;

    let mut summary = String::new();
    writeln!(
        summary,
        "kappa0 = {:.6e} rad/um at {} nm, gap decay = {:.3} nm",
        model.kappa0, model.reference_gap, model.gap_decay
    )
    .unwrap();
    for (g, l) in &fifty_fifty {
        writeln!(summary, "gap {g:>6.1} nm -> 50:50 at {l:.3} um").unwrap();
    }
    writeln!(
        summary,
        "MZ at {mz_gap_nm} nm gap: best extinction {mz_best_extinction_db:.1} dB at {mz_best_length_um:.3} um"
    )
    .unwrap();
    Ok(CouplerReport {
        model,
        fifty_fifty,
        mz_best_length_um,
        mz_best_extinction_db,
        summary,
    })
}
