//! Anti-associated orthogonal polynomials.
//!
//! A family of monic orthogonal polynomials is fixed by its recurrence
//! coefficients `b_n` and `a_n^2`, i.e. by its Jacobi matrix. Deleting the
//! first `r` rows and columns gives the associated polynomials of order `r`.
//! This crate works the other way around: it pushes the Jacobi matrix down
//! and prepends `r` new rows and columns (`2r` new parameters), producing the
//! anti-associated polynomials `P^(-r)_n`.
//!
//! The crate provides
//!
//! - coefficient streams for Chebyshev, Jacobi and Grosjean families
//!   ([`families`]) and their evaluation ([`recurrence`]),
//! - the upward extension itself with closed-form and recurrence evaluation
//!   ([`anti`]),
//! - truncated Jacobi matrices, Sturm bisection and Gauss rules ([`spectral`]),
//! - reconstruction of the orthogonality measure: absolutely continuous
//!   density plus mass points outside `[-1, 1]` ([`measure`]),
//! - the exact fourth-order differential equation for classical bases
//!   ([`ode`]), built on exact rational polynomials ([`poly`]).
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default); see [`Execution`].

pub mod anti;
pub mod error;
pub mod exec;
pub mod families;
pub mod measure;
pub mod ode;
pub mod poly;
pub mod quadrature;
pub mod recurrence;
pub mod scalar;
pub mod spectral;

pub use anti::ExtensionParams;
pub use error::{Error, Result};
pub use exec::Execution;
pub use families::ChebyshevKind;
pub use poly::DensePolynomial;
pub use recurrence::CoefficientSequence;
pub use scalar::Real;

/// Exact rational number used throughout the symbolic parts of the crate.
pub type Rational = num::BigRational;
