//! Numerical machinery for overdetermined problems on the Heisenberg group.
//!
//! * [`calculus`]: group law, gauge, horizontal vector fields and the
//!   subLaplacian, all differentiated exactly through truncated Taylor jets.
//! * [`reduced`]: toric and cylindrical reductions, the P-function and the
//!   sum-of-squares expansions of its subLaplacian.
//! * [`lab`]: seeded batch runs of the pointwise identities.
//! * [`quadrature`]: reduced-coordinate volume and gauge-sphere integrals,
//!   with checks of the integral identities.
//! * [`solver`]: finite differences for the reduced torsion problem and the
//!   Neumann-ratio diagnostics.
//! * [`cli`]: the `heis-overdet` command-line front end.

pub mod calculus;
pub mod cli;
pub mod error;
pub mod lab;
pub mod numfmt;
pub mod quadrature;
pub mod reduced;
pub mod solver;

pub use error::{Error, Result};
