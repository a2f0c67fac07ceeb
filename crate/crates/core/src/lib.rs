//! Constructive approximation machinery for anisotropic holomorphic
//! function classes: multi-index sets and the hyperbolic cross, tensor
//! Legendre expansions, closed-form width bounds, known- and
//! unknown-anisotropy sampling operators, Hilbert-valued basis pursuit,
//! and the experiment harness that reproduces the algebraic convergence
//! rates at desk scale.
//!
//! Conventions: contract violations (bad arguments the caller controls,
//! like `n = 0` or `p ∉ (0,1)`) panic; data-dependent failures
//! (divergent tails, node budgets, dimension mismatches, non-lower sets)
//! return typed errors. Randomized components take explicit seeds and
//! share no global state.

pub mod anisotropy;
pub mod experiments;
pub mod legendre;
pub mod multiindex;
pub mod recovery;
pub mod sampling;
pub mod widths;

pub use anisotropy::{
    make_algebraic_b, make_flat_b, make_log_b, AnisotropySequence, SlowGrowth, Tail,
};
pub use legendre::{
    compute_coefficients, gauss_legendre_rule, legendre_eval, order_one_test_function,
    tensor_legendre_eval, CoefficientVector, Moments, QuadratureRule, TestFunction,
};
pub use multiindex::{
    anchored_majorant, hyperbolic_cross, is_anchored, is_lower, monotone_majorant, IndexSet,
    MultiIndex,
};
pub use recovery::{basis_pursuit_block, rnsp_error_bounds, unknown_reconstruct, BPSolution};
pub use sampling::{
    choose_set_known, gaussian_sketch, known_reconstruct, known_sample, measurement_bound,
    unknown_sample, Measurements, SketchOperator,
};
pub use widths::{
    discrete_width_chain, gelfand_lower_bound, measure_moments, stesin_width,
    theta_lower_bound_known, theta_lower_bound_unknown, Measure, WidthQuery,
};
