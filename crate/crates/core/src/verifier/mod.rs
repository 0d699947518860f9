//! Dense numerical ground truth for compiled schedules.

pub mod bath;
pub mod catalog;
pub mod dense;
pub mod eta;
pub mod fit;
pub mod suppression;

pub use bath::{BathModel, Coupling};
pub use catalog::{catalog_error_terms, count_bound, local_bath, locality_bound, spread_bound, Catalog, CatalogParams, CatalogTerm};
pub use dense::{
    check_cap, dense_from_terms, expm_hermitian, expm_sum, expm_terms, extract_generator, layer_matrix, pauli_decompose,
    phase_optimized_distance, simulate_dense, spectral_norm, time_ordered, CMat, DenseUnitary, ExtractedGenerator,
    DENSE_QUBIT_CAP,
};
pub use eta::{eta, eta_bound, effective_report, operator_norm, EffectiveReport, EtaBound, EtaBoundParams, EtaReport};
pub use fit::{fit_scaling, log_space, ScalingFit};
pub use suppression::{
    codespace_projector, suppression_point, suppression_sweep, ErrorTerm, SuppressionConfig, SuppressionReport, SuppressionSweep,
};
