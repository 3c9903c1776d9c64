//! Toric and cylindrical reductions. A toric field is a function `U(s, t)` of
//! `s_j = x_j² + x_{n+j}²`; a cylindrical one depends on `s` through `σ = Σs_j`.

pub mod harmonic;
pub mod lift;
pub mod matrices;
pub mod pfunction;
pub mod point;
pub mod squares;

pub use harmonic::{cylindrical_harmonic_basis, harmonic_basis};
pub use lift::{lift_to_reduced, reduced_operator, Lifted};
pub use matrices::{build_matrix_bundle, frobenius_deficit, MatrixBundle};
pub use pfunction::{auxiliary_g, lhs_via_jets, pfunction, pfunction_jet, weight_reduced};
pub use point::{
    reduced_jet, Combination, Cylindrical, ReducedCandidate, ReducedField, ReducedPoint,
    ReducedPolynomial,
};
pub use squares::{rhs_sum_of_squares, SumOfSquares, Variant};
