//! Three-party Bell inequalities for polarization-entangled qubits.
//!
//! The crate computes quantum predictions for the Mermin and Svetlichny
//! functionals on three-qubit states (W, GHZ, arbitrary density matrices),
//! the exact bounds those functionals obey under local and hybrid
//! local-nonlocal hidden-variable models, the analyzer settings that
//! maximize a violation, and finite-statistics estimates of all of the above.
//!
//! ```
//! use tribell::{inequalities, qstate};
//!
//! let w = qstate::make_w().to_density();
//! let settings = inequalities::criticized_settings();
//! let sv = inequalities::evaluate(&w, &settings, inequalities::Functional::Svetlichny);
//! assert!((sv.value - 3.0).abs() < 1e-12);
//! assert!(!sv.violated);
//! ```
//!
//! A narrative guide with runnable examples lives in the `book/` directory
//! at the repository root.

pub mod error;
pub mod inequalities;
pub mod lhv;
pub mod optimizer;
pub mod polarimetry;
pub mod qstate;
pub mod shots;

pub use error::{Error, Result};
pub use inequalities::{
    classify, correlation_tensor, evaluate, mermin_value, svetlichny_value, Classification,
    CorrelationTensor, Functional, InequalityReport, Settings, SettingsPair,
};
pub use lhv::{lhv_max, mixture_tensor, strategy_tensor, LhvMaxResult, Model, Strategy};
pub use optimizer::{objective_symmetries, optimize, OptimizationConfig, OptimizationResult};
pub use polarimetry::{
    analyzer_observable, analyzer_projectors, correlation, outcome_distribution, AnalyzerSetting,
    OutcomeDistribution,
};
pub use qstate::{
    make_ghz, make_w, mix_with_white_noise, pure_to_density, DensityMatrix, GhzBasis, PureState,
    Visibility,
};
pub use shots::{estimate_inequality, estimate_tensor, sample_counts, CountTable, EstimatedReport};

// The guide's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/analyzers.md")]
    mod analyzers {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
    #[doc = include_str!("../../../book/src/hidden_variables.md")]
    mod hidden_variables {}
    #[doc = include_str!("../../../book/src/optimization.md")]
    mod optimization {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
}
