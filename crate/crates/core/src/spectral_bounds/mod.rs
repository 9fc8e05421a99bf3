//! Pressure, essential-spectral-radius lower bounds, and the classification
//! of norms by their scaling on indicators.

mod bounds;
mod classify;
mod contrast;
mod pressure;

pub use bounds::{bound_bb_new, bound_main, BoundReport, HypothesisCheck, Theorem, INVARIANCE_TOL};
pub use classify::{classify_norm, Case, CaseClassification, ProbeConfig, CLASSIFICATION_TOL};
pub use contrast::{contrast, contrast_csv, contrast_decay, ContrastRow};
pub use pressure::{
    default_method, pressure, pressure_registry, pressure_with, PressureMethod, PressureReport, ThetaLimitMethod,
    WeightedMatrixMethod,
};
