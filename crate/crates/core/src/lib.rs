//! Vector-valued modular forms for the dual Weil representation of an even
//! lattice: exact Fourier coefficients of Eisenstein series and Poincaré
//! square series, and the spaces they span.
//!
//! All coefficient tables are exact rationals. Floating point appears only
//! in representation matrices, dimension formulas and Petersson products.

pub mod arith;
pub mod error;
pub mod igusa;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod ratfunc;
pub mod series;
pub mod spaces;
pub mod weil;

pub use arith::{AlgebraicScalar, Rational};
pub use error::{Error, Result};
pub use igusa::{NormalFormAtP, QuadraticPolynomial, UnimodularBlock};
pub use lattice::{DiscriminantGroup, GroupElement, Lattice};
pub use ratfunc::RationalFunctionT;
pub use series::{FourierExpansion, SeriesRequest, Variant};
pub use spaces::{
    build_basis, dimension, eisenstein_family, nearly_holomorphic, obstruction_check, petersson_product, BasisOptions,
    Generator, PrincipalPart, SpaceBasis, SpaceKind,
};
