//! Finite-difference solver for the reduced cylindrical torsion problem
//!
//! `σ(W_σσ + W_tt) + nW_σ = ((2n+α)/4) σ (σ² + t²)^{(α−4)/4}`, `W = 0` on the
//! boundary, on `{σ ≥ 0, σ² + (1+ε)t² < R⁴}`. A solution gives the
//! cylindrical function `u(x, t) = W(|x|², t)` on `H^n`.

mod banded;
mod domain;
mod export;
mod grid;
mod interp;
mod solve;
mod stencil;
mod study;
mod trace;

pub use banded::BandedLu;
pub use domain::{DomainKind, ReducedDomain};
pub use export::SolutionMetadata;
pub use grid::{build_grid, Arm, Grid, Neighbor, Node};
pub use interp::Interpolant;
pub use solve::{
    assemble_and_solve, pfunction_value, singular_gradient, singular_part, source, GridSolution,
    Provenance, CORRECTION_RADIUS, SOLVER_TOL,
};
pub use stencil::{stencil, Target};
pub use study::{convergence_study, ConvergenceRow, ConvergenceStudy, ROUND_OFF_FLOOR};
pub use trace::{
    integrate_grid, neumann_trace, neumann_trace_with, pfunction_on_grid, FieldSample,
    NeumannTrace, PFunctionNode, PFunctionReport, TraceSample, ARC_CLIP, DEFAULT_TRACE_SAMPLES,
};
