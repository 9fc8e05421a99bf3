//! Eigenfunctions of the transfer operator built from kernel observables:
//! the series `h_{z,n}`, their residual checks, the orthogonality of the
//! pulled-back kernel, the affine IFS behind the range of `h_{z,n}`, and the
//! correction series `w_{z,n}`.

mod cloud;
mod gram;
mod ifs;
mod kernel;
mod report;
mod residual;
mod series;
mod symbolic;
mod wseries;

pub use cloud::{independence_rank, shifted_contrasts, IndependenceReport, RANK_TOL};
pub use gram::{gram_matrix, orthogonality_gram, GramReport, GRAM_PIECE_CAP};
pub use ifs::{
    backward_limit, backward_limit_seeded, cantor_ifs, cmp_complex, distinct_values, truncation_value_count,
    AffineIFS, IfsCertificate, WORD_CAP,
};
pub use kernel::{build_kernel, KernelConstruction, KernelObservable, KernelPsi, ResidualMethod, KERNEL_TOLERANCE};
pub use report::{cantor_samples_csv, CantorSample, EigenReport};
pub use residual::{
    cohomology_residual, eigen_residual, residual_engine_registry, AutoEngine, CohomologyResidual, EigenResidual,
    ResidualEngine, StepEngine, SymbolicEngine,
};
pub use series::{h_series, iterate_exact, series_value_at, SeriesSpec, TruncatedEigenSeries};
pub use symbolic::{SymbolicFunction, ENUMERATION_CAP};
pub use wseries::{w_series, w_series_with, WSeries, NOISE_FLOOR};
