//! Pinned tolerances and calibrated ceilings.
//!
//! Exact identities (Walsh quadrature, reconstruction identities) are tested
//! near machine precision; Monte Carlo comparisons carry 3-sigma slack from
//! the estimator's own variance; every `<=` claim with an unspecified absolute
//! constant is tested against a ceiling calibrated once and recorded here.

/// Identities that are exact up to f64 rounding accumulation.
pub const EXACT: f64 = 1e-12;

/// Off-diagonal Gram residual for the trigonometric system at oversample >= 16.
pub const TRIG_GRAM: f64 = 1e-10;

/// Quadrature convergence of trig L^p norms between oversample 16 and 64.
///
/// For non-even p the |.|^p kinks at the zeros of f dominate the uniform-grid
/// error (roughly h^{p+1} |f'|^p per zero): measured worst drift over random
/// degree-n polynomials is 3.4e-5 at oversample 16. The 1e-6 figure holds one
/// refinement level up (64 vs 256), which is checked separately.
pub const QUAD_CONV_COARSE: f64 = 1e-4;

/// Quadrature convergence of trig L^p norms between oversample 64 and 256.
pub const QUAD_CONV: f64 = 1e-6;

/// Witness consistency: re-evaluating a reported argmax reproduces the value.
pub const WITNESS: f64 = 1e-9;

/// Per-step slack in the power-iteration monotonicity assertion.
pub const POWER_STEP: f64 = 1e-12;

/// Slack for nested-set monotonicity of Lambda(p) estimates.
pub const NESTED_SLACK: f64 = 1e-6;

/// Ceiling for empirical selector-moment / analytic-bound ratios.
///
/// Calibrated against the exact binomial expectation sum at (l = 16,
/// delta = 1/4): the exact ratio stays below 0.85 for q in [1, 40], and the
/// finite-sample estimator only approaches the exact value from below in the
/// high-q regime. 1.25 leaves headroom for sampling noise.
pub const MOMENT_RATIO_CEILING: f64 = 1.25;

/// Band constant for the Marcinkiewicz-Zygmund two-sided comparison,
/// calibrated on Rademacher and centered-selector sums with p <= 4
/// (the exact Rademacher p = 4 ratio is 3 - 2/n).
pub const MZ_BAND: f64 = 4.0;

/// Ceiling for the decoupling defect / growth-envelope ratio; the observed
/// ratio over random unit vectors stays below 0.2.
pub const DECOUPLING_CEILING: f64 = 1.0;

/// Ceiling for the chaining lhs/rhs ratio (the bound holds with an
/// unspecified absolute constant; calibration runs stay well below this).
pub const CHAINING_CEILING: f64 = 100.0;

/// Ceiling for the triple-norm target-bound ratio scan.
pub const KEST_RATIO_CEILING: f64 = 2.0;

/// Acceptance threshold on the support-reduction acceptance frequency
/// (the pigeonhole guarantee is 3/10).
pub const REDUCTION_ACCEPT_FREQ: f64 = 0.25;
