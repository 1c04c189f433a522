//! Numerical laboratory for the slightly-subcritical nonlocal Hartree problem
//!
//! ```text
//! -Δu = (|x|^{-(n-2)} ∗ u^{p-ε}) u^{p-1-ε},   u > 0 in B_R ⊂ ℝⁿ,  u = 0 on ∂B_R,
//! ```
//!
//! for n ∈ {3,4,5} with the critical exponent p = (n+2)/(n-2), together with the
//! spectrum of its nonlocal linearization
//!
//! ```text
//! -Δv = λ [ (p-ε)(K ∗ (u^{p-1-ε} v)) u^{p-1-ε} + (p-1-ε)(K ∗ u^{p-ε}) u^{p-2-ε} v ],
//! ```
//!
//! its blow-up diagnostics as ε → 0, and the closed-form constants (bubble
//! amplitude, sharp Hardy–Littlewood–Sobolev kernel constant, Green/Robin
//! functions of the ball) that govern the asymptotics.
//!
//! Everything is radial: fields live on graded 1-D grids and angular content is
//! carried by a spherical-harmonic mode index ℓ, so the Newtonian convolution
//! splits into decoupled 1-D mode operators.

// Reference constants are kept at full printed precision, guards of the form
// `!(x > 0)` intentionally reject NaN, and the hot kernels index explicitly.
#![allow(clippy::excessive_precision)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod bubble;
pub mod dim;
pub mod error;
pub mod eigen;
pub mod greens;
pub mod grid;
pub mod groundstate;
pub mod linalg;
pub mod newtonian;
pub mod quad;
pub mod specfun;
pub mod sweep;

pub use dim::DimensionSpec;
pub use error::HartreeError;
