//! Discrete calculus on weights indexed by the subset lattice of `{1, ..., d}`,
//! together with the kernel-space machinery built on top of it.
//!
//! The crate is organized in layers:
//!
//! * [`lattice`], [`scalar`], [`table`] — bitmask subset indexing, the scalar
//!   abstraction (`f64` or exact rationals), dense weight tables, difference
//!   operators and complete-monotonicity certificates.
//! * [`transforms`] — the scaled superset-sum operator, its inverse, naive
//!   oracles, round-trip checks, summability and decay-transfer analysis.
//! * [`families`] — structured weight families (product, POD, finite-order,
//!   finitely supported) with closed forms, certified truncations, sandwich
//!   bounds and decay computation.
//! * [`geometry`] — maximal monotone minorants via linear programming,
//!   the hypercube view of monotone tables, and the measure/CDF view.
//! * [`kernels`] — univariate kernels, superposition kernels, Gram matrices,
//!   and embedding-norm verification.
//! * [`points`], [`wce`] — quadrature node sets and worst-case integration
//!   error, including the upper/lower error-transfer chain.
//! * [`mod@format`] — the plain-text weight-file format shared with the CLI.

pub mod bounds;
pub mod error;
pub mod families;
pub mod format;
pub mod geometry;
pub mod kernels;
pub mod lattice;
pub mod points;
pub mod scalar;
pub mod simplex;
pub mod table;
pub mod transforms;
pub mod wce;

pub use bounds::Bounds;
pub use error::{Error, Result};
pub use lattice::{Coords, Dim, Subset};
pub use scalar::{Rational, Scalar};
pub use table::{MonotonicityCertificate, SignedTable, WeightTable, Witness};
pub use transforms::TransformParams;
