//! The transfer operator with respect to Lebesgue measure: exact action on
//! step functions, Ulam and weighted-matrix discretizations, and dense
//! spectra.

mod exact;
mod spectrum;
mod ulam;
mod weighted;

pub use exact::{apply_exact, apply_exact_power, project_transfer, transfer_at};
pub use spectrum::{spectrum, spectrum_complex, SpectrumReport, BACKWARD_ERROR_TOL, SPECTRUM_DIMENSION_CAP};
pub use ulam::{
    apply_discretized, leading_density, map_adapted_cells, ulam_matrix, UlamMatrix, ULAM_RESOLUTION_CAP,
};
pub use weighted::{weighted_transfer_matrix, WeightedMatrix};
