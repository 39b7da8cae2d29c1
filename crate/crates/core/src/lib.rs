//! Phase-space quantum mechanics with star products.
//!
//! The crate is layered bottom-up:
//! - [`weyl`]: exact operator algebra and the Galilei generators.
//! - [`star`]: polynomial symbols, Bopp operators and polynomial-Gaussian states.
//! - [`grid`]: phase-space grids, fields, FFT-based differentiation and quadrature.
//! - [`star_grid`]: star products of sampled fields.
//! - [`oscillators`]: special functions, the radial eigensolver and oscillator states.
//! - [`wigner`]: Wigner functions, marginals, expectations and time evolution.
//! - [`io`], [`parse`]: the binary field format and the symbol parser.

pub mod error;
pub mod grid;
pub mod io;
pub mod oscillators;
pub mod parse;
pub mod scalar;
pub mod star;
pub mod star_grid;
pub mod weyl;
pub mod wigner;

pub use error::{PsqmError, Result};
pub use grid::{Axis, Field, PhaseGrid};
pub use scalar::{rat, ExactComplex, QuadSurd, Rational, Scalar};
pub use star::{NcParams, PolyGaussForm, PolynomialSymbol};
pub use weyl::WeylOperator;
