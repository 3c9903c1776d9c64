//! Heisenberg-group arithmetic and the sub-Riemannian operators, evaluated
//! exactly through truncated Taylor jets.

pub mod field;
pub mod jet;
pub mod ops;
pub mod point;

pub use field::{
    candidate_u, field_jet, field_value, gauge_jet, CandidateU, Coordinate, Dilated, FnField,
    Gauge, GaugePower, ScalarField, TranslatedGaugePower, WeightF,
};
pub use jet::Jet;
pub use ops::{
    horizontal_gradient, rel_err, sublaplacian, sublaplacian_composed, sublaplacian_terms,
    t_derivative, weight_f,
    weight_f_closed_derivatives, z_field, WeightDerivatives,
};
pub use point::{dilate, gauge, group_inv, group_mul, GroupPoint};
