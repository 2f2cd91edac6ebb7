//! Photon-pair source: crystal dispersion, phase matching, spectra and pair statistics.

pub mod crystal;
pub mod pairs;
pub mod sellmeier;
pub mod spectrum;

pub use crystal::{
    detuning_slope_from_crystal, phase_mismatch, shg_tuning_curve, wave_number, CrystalConfig,
};
pub use pairs::{
    mean_pair_number, pair_number_distribution, sample_pair_stream, PairEvent, PairStatistics,
    PairStream,
};
pub use sellmeier::{sellmeier_index, DispersionData, SellmeierSet};
pub use spectrum::{
    calibrate_detuning_slope, marginal_spectrum, phase_matching_amplitude,
    pm_width_from_bandwidth_nm, spectral_overlap, MarginalSpectrum, PhaseMatchingKind, Photon,
    SourceSpectralModel, SpectralGrid,
};
