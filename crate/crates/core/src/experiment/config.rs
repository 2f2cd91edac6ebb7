//! Experiment configuration: TOML with unit-suffixed keys.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::{
    bs_matrix, splitting_ratio, BeamSplitter, CouplerGeometry, CouplerModel, LossBudget, LossPath,
};
use crate::error::{Error, Result};
use crate::interference::{DelayScan, RateBudget};
use crate::source::{
    calibrate_detuning_slope, mean_pair_number, CrystalConfig, PairStatistics, PhaseMatchingKind,
    SourceSpectralModel,
};
use crate::tcspc::DetectorConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub source: SourceBlock,
    pub circuit: CircuitBlock,
    pub detectors: DetectorsBlock,
    pub acquisition: AcquisitionBlock,
    pub scan: ScanBlock,
    #[serde(default)]
    pub sweep: SweepBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceBlock {
    pub kind: PhaseMatchingKind,
    pub pump_wavelength_nm: f64,
    pub degeneracy_pump_wavelength_nm: f64,
    /// Single-photon intensity FWHM at the degenerate wavelength.
    pub bandwidth_nm: f64,
    /// Signal-idler separation per nm of pump detuning; omitted when
    /// `slope_calibration` is given.
    pub detuning_slope_rad_per_s_per_nm: Option<f64>,
    pub slope_calibration: Option<SlopeCalibration>,
    pub pump_power_mw: f64,
    pub mu_per_mw: f64,
    pub interval_ps: f64,
    pub crystal: Option<CrystalBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeCalibration {
    pub anchor_a_nm: f64,
    pub anchor_a_visibility: f64,
    pub anchor_b_nm: f64,
    pub anchor_b_visibility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalBlock {
    pub length_mm: f64,
    pub temperature_c: f64,
    pub degenerate_wavelength_nm: f64,
    /// Axis names for pump, signal and idler in the dispersion data.
    #[serde(default = "default_axes")]
    pub axes: [String; 3],
    /// Dispersion file; the bundled KTP set when absent.
    pub sellmeier_file: Option<String>,
}

fn default_axes() -> [String; 3] {
    ["y".into(), "y".into(), "z".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitBlock {
    pub wavelength_nm: f64,
    pub gap_nm: f64,
    pub length_um: f64,
    pub width_um: f64,
    pub height_nm: f64,
    /// Shift of the fabricated gap from its design value.
    #[serde(default)]
    pub processing_gap_offset_nm: f64,
    pub coupler: CouplerBlock,
    pub loss: LossBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplerBlock {
    pub kappa0_rad_per_um: f64,
    pub gap_decay_nm: f64,
    pub reference_gap_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossBlock {
    pub facet_db: f64,
    pub tap_db: f64,
    #[serde(default)]
    pub propagation_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorsBlock {
    pub d1: DetectorConfig,
    pub d2: DetectorConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcquisitionBlock {
    pub duration_s: f64,
    pub window_ps: f64,
    pub seed: Option<u64>,
    #[serde(default = "yes")]
    pub write_tags: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub positions_um: Option<Vec<f64>>,
    pub start_um: Option<f64>,
    pub stop_um: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default)]
    pub pump_wavelengths_nm: Vec<f64>,
    #[serde(default)]
    pub reference_visibilities: Vec<f64>,
    #[serde(default)]
    pub reference_visibility_errors: Vec<f64>,
    #[serde(default)]
    pub simulate_pump_sweep: bool,
    #[serde(default)]
    pub powers_mw: Vec<f64>,
    /// Acquisition time per point for each power; `acquisition.duration_s` when empty.
    #[serde(default)]
    pub power_durations_s: Vec<f64>,
}

/// Bundled preset names.
pub const PRESETS: [&str; 3] = ["paper_fig4a", "paper_fig4b", "paper_supp_power"];

pub fn preset_text(name: &str) -> Result<&'static str> {
    match name {
        "paper_fig4a" => Ok(include_str!("../../presets/paper_fig4a.toml")),
        "paper_fig4b" => Ok(include_str!("../../presets/paper_fig4b.toml")),
        "paper_supp_power" => Ok(include_str!("../../presets/paper_supp_power.toml")),
        _ => Err(Error::arg(format!(
            "unknown preset `{name}` (available: {})",
            PRESETS.join(", ")
        ))),
    }
}

fn field(path: &str, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(path, what))
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    field(
        path,
        v > 0.0 && v.is_finite(),
        &format!("must be > 0 (got {v})"),
    )
}

fn non_negative(path: &str, v: f64) -> Result<()> {
    field(
        path,
        v >= 0.0 && v.is_finite(),
        &format!("must be >= 0 (got {v})"),
    )
}

impl ExperimentConfig {
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)
            .map_err(|e| Error::config(source_name, e.to_string().trim_end()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn preset(name: &str) -> Result<Self> {
        Self::parse(preset_text(name)?, &format!("preset {name}"))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Checks every block; errors name the offending key path.
    pub fn validate(&self) -> Result<()> {
        let s = &self.source;
        positive("source.pump_wavelength_nm", s.pump_wavelength_nm)?;
        positive(
            "source.degeneracy_pump_wavelength_nm",
            s.degeneracy_pump_wavelength_nm,
        )?;
        positive("source.bandwidth_nm", s.bandwidth_nm)?;
        non_negative("source.pump_power_mw", s.pump_power_mw)?;
        non_negative("source.mu_per_mw", s.mu_per_mw)?;
        positive("source.interval_ps", s.interval_ps)?;
        field(
            "source.detuning_slope_rad_per_s_per_nm",
            s.detuning_slope_rad_per_s_per_nm.is_some() || s.slope_calibration.is_some(),
            "either detuning_slope_rad_per_s_per_nm or [source.slope_calibration] is required",
        )?;
        if let Some(v) = s.detuning_slope_rad_per_s_per_nm {
            field(
                "source.detuning_slope_rad_per_s_per_nm",
                v.is_finite(),
                "must be finite",
            )?;
        }
        if let Some(c) = &s.slope_calibration {
            positive("source.slope_calibration.anchor_a_nm", c.anchor_a_nm)?;
            positive("source.slope_calibration.anchor_b_nm", c.anchor_b_nm)?;
            positive(
                "source.slope_calibration.anchor_a_visibility",
                c.anchor_a_visibility,
            )?;
            positive(
                "source.slope_calibration.anchor_b_visibility",
                c.anchor_b_visibility,
            )?;
        }
        if let Some(c) = &s.crystal {
            positive("source.crystal.length_mm", c.length_mm)?;
            positive(
                "source.crystal.degenerate_wavelength_nm",
                c.degenerate_wavelength_nm,
            )?;
            field(
                "source.crystal.temperature_c",
                c.temperature_c.is_finite(),
                "must be finite",
            )?;
        }
        let c = &self.circuit;
        positive("circuit.wavelength_nm", c.wavelength_nm)?;
        positive("circuit.gap_nm", c.gap_nm)?;
        non_negative("circuit.length_um", c.length_um)?;
        positive("circuit.width_um", c.width_um)?;
        positive("circuit.height_nm", c.height_nm)?;
        field(
            "circuit.processing_gap_offset_nm",
            c.processing_gap_offset_nm.is_finite(),
            "must be finite",
        )?;
        positive(
            "circuit.coupler.kappa0_rad_per_um",
            c.coupler.kappa0_rad_per_um,
        )?;
        positive("circuit.coupler.gap_decay_nm", c.coupler.gap_decay_nm)?;
        positive(
            "circuit.coupler.reference_gap_nm",
            c.coupler.reference_gap_nm,
        )?;
        non_negative("circuit.loss.facet_db", c.loss.facet_db)?;
        non_negative("circuit.loss.tap_db", c.loss.tap_db)?;
        non_negative("circuit.loss.propagation_db", c.loss.propagation_db)?;
        self.beam_splitter()
            .map_err(|e| Error::config("circuit.gap_nm", e.to_string()))?;
        for (name, d) in [
            ("detectors.d1", &self.detectors.d1),
            ("detectors.d2", &self.detectors.d2),
        ] {
            d.validate()
                .map_err(|e| Error::config(name, e.to_string()))?;
        }
        let a = &self.acquisition;
        positive("acquisition.duration_s", a.duration_s)?;
        non_negative("acquisition.window_ps", a.window_ps)?;
        self.delay_scan()?;
        let w = &self.sweep;
        for &l in &w.pump_wavelengths_nm {
            positive("sweep.pump_wavelengths_nm", l)?;
        }
        field(
            "sweep.reference_visibilities",
            w.reference_visibilities.is_empty()
                || w.reference_visibilities.len() == w.pump_wavelengths_nm.len(),
            "must match sweep.pump_wavelengths_nm in length",
        )?;
        field(
            "sweep.reference_visibility_errors",
            w.reference_visibility_errors.is_empty()
                || w.reference_visibility_errors.len() == w.reference_visibilities.len(),
            "must match sweep.reference_visibilities in length",
        )?;
        for &p in &w.powers_mw {
            non_negative("sweep.powers_mw", p)?;
        }
        field(
            "sweep.power_durations_s",
            w.power_durations_s.is_empty() || w.power_durations_s.len() == w.powers_mw.len(),
            "must match sweep.powers_mw in length",
        )?;
        for &d in &w.power_durations_s {
            positive("sweep.power_durations_s", d)?;
        }
        Ok(())
    }

    pub fn seed(&self) -> Result<u64> {
        self.acquisition
            .seed
            .ok_or_else(|| Error::config("acquisition.seed", "a seed is required for simulation"))
    }

    pub fn delay_scan(&self) -> Result<DelayScan> {
        let s = &self.scan;
        let scan = match (&s.positions_um, s.start_um, s.stop_um, s.points) {
            (Some(p), None, None, None) => DelayScan::new(p.clone()),
            (None, Some(a), Some(b), Some(n)) => DelayScan::linspace(a, b, n),
            _ => {
                return Err(Error::config(
                    "scan",
                    "give either positions_um or all of start_um, stop_um, points",
                ))
            }
        };
        scan.map_err(|e| Error::config("scan", e.to_string()))
    }

    pub fn coupler_model(&self) -> Result<CouplerModel> {
        let c = &self.circuit.coupler;
        CouplerModel::new(c.kappa0_rad_per_um, c.gap_decay_nm, c.reference_gap_nm)
    }

    /// Geometry as fabricated (design gap plus processing offset).
    pub fn coupler_geometry(&self) -> CouplerGeometry {
        let c = &self.circuit;
        CouplerGeometry {
            gap_nm: c.gap_nm + c.processing_gap_offset_nm,
            length_um: c.length_um,
            width_um: c.width_um,
            height_nm: c.height_nm,
            wavelength_nm: c.wavelength_nm,
        }
    }

    pub fn splitting(&self) -> Result<(f64, f64)> {
        splitting_ratio(&self.coupler_geometry(), &self.coupler_model()?)
    }

    pub fn beam_splitter(&self) -> Result<BeamSplitter> {
        let (t, r) = self.splitting()?;
        bs_matrix(t, r)
    }

    pub fn loss_budget(&self) -> LossBudget {
        let l = &self.circuit.loss;
        LossBudget {
            facet_db: l.facet_db,
            tap_db: l.tap_db,
            propagation_db: l.propagation_db,
        }
    }

    /// Spectral model; the detuning slope is calibrated when requested.
    pub fn spectral_model(&self) -> Result<SourceSpectralModel> {
        let s = &self.source;
        let template = SourceSpectralModel::from_bandwidth_nm(
            s.pump_wavelength_nm,
            s.degeneracy_pump_wavelength_nm,
            s.kind,
            s.bandwidth_nm,
            s.detuning_slope_rad_per_s_per_nm.unwrap_or(0.0),
        )?;
        match &s.slope_calibration {
            Some(c) => {
                let slope = calibrate_detuning_slope(
                    &template,
                    (c.anchor_a_nm, c.anchor_a_visibility),
                    (c.anchor_b_nm, c.anchor_b_visibility),
                )?;
                Ok(template.with_detuning_slope(slope))
            }
            None => Ok(template),
        }
    }

    pub fn pair_statistics(&self) -> Result<PairStatistics> {
        self.pair_statistics_at(self.source.pump_power_mw)
    }

    pub fn pair_statistics_at(&self, pump_power_mw: f64) -> Result<PairStatistics> {
        let s = &self.source;
        let probe = PairStatistics::new(0.0, s.mu_per_mw, s.interval_ps)?;
        PairStatistics::new(
            mean_pair_number(pump_power_mw, &probe)?,
            s.mu_per_mw,
            s.interval_ps,
        )
    }

    pub fn rate_budget(&self, stats: &PairStatistics) -> RateBudget {
        let arm = self.loss_budget().transmission(&LossPath::INPUT_ARM);
        let d = &self.detectors;
        RateBudget {
            pair_rate_hz: stats.pair_rate_hz(),
            arm_transmission: [arm, arm],
            detector_efficiency: [d.d1.efficiency, d.d2.efficiency],
            dark_rate_hz: [d.d1.dark_rate_hz, d.d2.dark_rate_hz],
            window_ps: self.acquisition.window_ps,
        }
    }

    pub fn crystal(&self) -> Result<Option<CrystalConfig>> {
        let Some(c) = &self.source.crystal else {
            return Ok(None);
        };
        let data = match &c.sellmeier_file {
            Some(p) => crate::source::DispersionData::load(Path::new(p))?,
            None => crate::source::DispersionData::bundled_ktp(),
        };
        let crystal = CrystalConfig::quasi_phase_matched(
            data.axis(&c.axes[0])?.clone(),
            data.axis(&c.axes[1])?.clone(),
            data.axis(&c.axes[2])?.clone(),
            c.length_mm,
            c.temperature_c,
            c.degenerate_wavelength_nm,
        )?;
        Ok(Some(crystal))
    }
}
