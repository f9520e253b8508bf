//! Numerical laboratory for vanishing-E1 surfaces in the 3-dimensional
//! Heisenberg group, together with the second variation of the E1 energy
//! at the Clifford torus in the CR 3-sphere.
//!
//! The crate is organized around four subsystems:
//!
//! * [`jets`] — pointwise pseudohermitian invariants of graph surfaces,
//!   the E1 residual, the hyperbolicity witness and patch integrals;
//! * [`rotsym`] — the rotationally symmetric reduction: ODE branches,
//!   closed-form solution families, RK4 integration and classification;
//! * [`cauchy`] — the quasi-linear first-order system for
//!   U = (theta, alpha, H, m), its closed-form inverse and eigen-system,
//!   and Cauchy marching from a circle r = c;
//! * [`secondvar`] — spectral evaluation of the first and second
//!   variation of E1 at the tori of the CR 3-sphere.
//!
//! [`check`] bundles the verification suites run by `e1lab check --all`.

pub mod cauchy;
pub mod check;
pub mod error;
pub mod jets;
pub mod manifest;
pub mod mat4;
pub mod rotsym;
pub mod secondvar;
pub mod surfaces;

pub use error::{E1Error, Result};
