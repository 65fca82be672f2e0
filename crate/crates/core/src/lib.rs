//! Numerical tools for linear control systems whose transfer functions carry a
//! matrix symmetry (symmetric, Hamiltonian, skew-Hamiltonian, skew-symmetric).
//!
//! The crate is organised bottom-up:
//!
//! * [`matcore`] – dense complex linear algebra, polynomials, Pfaffians and the
//!   congruence (Takagi-type) factorizations. Generic over the real scalar.
//! * [`sysreal`] – state-space realizations, minimality, symmetry
//!   classification and symmetry-respecting realization synthesis.
//! * [`feedback`] – static skew-symmetric output feedback pole placement.
//! * [`schubert`] – bilinear forms, annihilators, the intersection condition
//!   and the feedback-law count `d_m`.
//! * [`purbhoo`] – the real skew-symmetric system built from osculating flags
//!   of a rational normal curve, and the all-real feedback experiment.
//! * [`io`] – the JSON interchange formats used by the CLI and fixtures.
//! * [`fixtures`] – seeded random matrices and structured realizations.

pub mod error;
pub mod feedback;
pub mod fixtures;
pub mod io;
pub mod matcore;
pub mod purbhoo;
pub mod schubert;
pub mod sysreal;

pub use error::{Error, Result};
pub use matcore::{Real, Tolerances};

/// Complex double.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex double matrix.
pub type CMatrix = matcore::CMat<f64>;
/// Univariate complex double polynomial.
pub type Poly = matcore::Poly<f64>;
/// Matrix of complex double polynomials.
pub type PolyMatrix = matcore::PolyMatrix<f64>;

pub use feedback::{FeedbackProblem, GenericParams, SkewFeedback, SolutionSet, Variant};
pub use schubert::{FormKind, PlaneBasis};
pub use sysreal::{Realization, SymmetryType, TransferProbe};
