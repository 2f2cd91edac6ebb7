//! Dip and visibility-curve fitting with statistical errors.

pub mod dataset;
pub mod dip;
pub mod lm;
pub mod report;
pub mod visibility;

pub use dataset::{rate_error, ScanDataset};
pub use dip::{
    derive_quantities, dip_model, fit_hom_dip, initial_guess, DerivedQuantities, DipGuess,
    FitResult,
};
pub use report::{fit_report_csv, fit_summary};
pub use visibility::{fit_visibility_curve, VisibilityFit};
