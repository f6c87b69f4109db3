//! Spectral truncations of group algebras of polynomial-growth groups.
//!
//! The crate builds balls in Cayley graphs of Z^d and the discrete
//! Heisenberg group, acts with finitely supported group algebra elements on
//! ℓ²(G), compresses them to Toeplitz-type matrices on ℓ²(B_Λ), and estimates
//! how well the truncated operator systems approximate the full algebra in
//! the quantum Gromov-Hausdorff sense.
//!
//! Algebra and truncation code is generic over the coefficient [`Scalar`]:
//! floating point for numerics, [`num_rational::Rational64`] based scalars
//! for exact identities. The aliases below name the common choices.

pub mod cayley;
pub mod error;
pub mod frame;
pub mod groupalg;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod qmetric;
pub mod sampling;
pub mod scalar;
pub mod truncation;

use num_complex::{Complex, Complex32, Complex64};
use num_rational::Rational64;

pub use cayley::{Ball, CayleyGraph, Element, Group, GroupSpec, GrowthReport};
pub use error::{Error, Result};
pub use groupalg::{AlgebraElement, FejerKernel};
pub use qmetric::{State, StateKind};
pub use scalar::Scalar;
pub use truncation::ToeplitzOperator;

/// Exact complex rationals.
pub type ExactScalar = Complex<Rational64>;

pub type AlgebraElementF64 = AlgebraElement<Complex64>;
pub type AlgebraElementF32 = AlgebraElement<Complex32>;
pub type ExactAlgebraElement = AlgebraElement<ExactScalar>;

pub type ToeplitzF64 = ToeplitzOperator<Complex64>;
pub type ToeplitzF32 = ToeplitzOperator<Complex32>;
pub type ExactToeplitz = ToeplitzOperator<ExactScalar>;
