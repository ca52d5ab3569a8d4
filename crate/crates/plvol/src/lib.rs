//! Piecewise-constant volume forms on PL manifolds, with exact arithmetic.
//!
//! The core of this crate represents a finite simplicial complex together
//! with a piecewise-constant volume form (a strictly positive rational
//! volume per top cell, the *volume cocycle*) and constructively equalizes
//! any two such forms of equal total volume. Equalization repeatedly
//! transfers volume between adjacent top cells through an explicit PL
//! self-homeomorphism built from a pair of subdivisions; every step is
//! re-verifiable by independent rational volume computations, and the
//! whole chain ships with a certificate.
//!
//! All core geometry is carried out in barycentric coordinates over
//! [`Scalar`] (arbitrary-precision rationals), so the guarantees are exact
//! equalities, never tolerances. Ambient Euclidean volume, possibly
//! irrational for embedded complexes, appears only in display paths.
//!
//! The [`lab`] module is the deliberate exception: a self-contained,
//! float-based implementation of the 1-D mollifier, the monotone
//! interpolation to the identity, and the fiberwise rescaling map with a
//! prescribed Jacobian. It shares no code path with the exact core.
//!
//! File formats, mesh generators and SVG rendering live in [`io`]; the
//! `plvol` command-line tool in the companion crate is a thin shell over
//! them.

pub mod complex;
pub mod equalizer;
pub mod forms;
pub mod io;
pub mod lab;
pub mod linalg;
pub mod lp;
pub mod scalar;
pub mod subdivision;
pub mod transfer;

pub use complex::{BaryPoint, Cell, Complex, ComplexError, FacetPoint, Point, SubComplex};
pub use equalizer::{Certificate, EqualizeOptions, PathStrategy, TransferChain};
pub use forms::{DiffCocycle, PCForm};
pub use scalar::Scalar;
pub use subdivision::{PairSubdivision, SubdivisionRecord};
pub use transfer::{TransferMap, TransferSpec, VerificationReport};
