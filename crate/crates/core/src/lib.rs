//! Numerical laboratory for the probabilistic construction of Lambda(p) sets
//! over bounded orthogonal systems.
//!
//! The crate provides, at desk scale, every constructive ingredient of the
//! construction: Lambda(p)-constant estimation as 2->p operator norms
//! ([`lambda`]), random selector sets and their moment/tail bounds
//! ([`selectors`]), metric entropy, Levy means, chaining and the randomized
//! support-reduction approximation ([`entropy`]), dyadic level-set
//! decompositions ([`decompose`]), and Monte Carlo / grid verification of the
//! pointwise and probabilistic inequalities the construction relies on
//! ([`inequalities`]).
//!
//! Core numerical kernels are generic over the scalar type (`f32`/`f64`)
//! through [`scalar::Real`]; the stochastic experiment layer is pinned to
//! `f64` via the aliases below.

pub mod decompose;
pub mod entropy;
pub mod error;
pub mod inequalities;
pub mod lambda;
pub mod orthosys;
pub mod rng;
pub mod scalar;
pub mod selectors;
pub mod special;
pub mod tol;

pub use error::{Error, Result};

/// f64 orthogonal system, the instantiation used by experiments.
pub type System = orthosys::OrthogonalSystem<f64>;
/// f64 function samples.
pub type Samples = orthosys::FunctionSamples<f64>;
/// f64 coefficient vector.
pub type Coeffs = lambda::CoeffVector<f64>;
/// f64 dyadic decomposition.
pub type Levels = decompose::Decomposition<f64>;
