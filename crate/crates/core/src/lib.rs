//! Numerical toolkit for the Lampariello family of Emden-Fowler equations
//!
//! ```text
//! y'' = x^(-p/(p+1)) y^(1 + p/(p+1)),    y(0) = 1,  y(inf) = 0,
//! ```
//!
//! a one-parameter generalization of the Thomas-Fermi equation (`p = 1`).
//!
//! * [`family`]: parameter maps, the power-law particular solution, the
//!   oscillator reduction and the perturbation expansion around it.
//! * [`integrate`]: adaptive Dormand-Prince 5(4) with dense output and events.
//! * [`bvp`]: series start at the singular origin and shooting on the
//!   initial slope.
//! * [`abel`]: Abel equations of the second and first kind, the invariant
//!   and a pointwise integrability test, and the Lampariello/Majorana
//!   first-order reduction.
//! * [`phase`]: the equivalent autonomous planar system, its equilibria and
//!   phase portraits.
//! * [`export`]: CSV and SVG writers used by the command-line front end.
//! * [`acceptance`]: the reproduction checks run by `lamptf reproduce`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abel;
pub mod acceptance;
pub mod bvp;
pub mod error;
pub mod export;
pub mod family;
pub mod fd;
pub mod integrate;
pub mod interp;
pub mod phase;

pub use abel::{
    abel_coefficients, abel_invariant, abel_second_kind_rhs, check_integrability, integrability_alpha,
    lampariello_transform, majorana_consistency, majorana_rhs, AbelForm, AbelInvariant, IntegrabilityReport, Verdict,
};
pub use bvp::{asymptotic_ratio, series_start, shoot, solve_bvp, ShotKind, ShotOutcome, SolveOptions, TFSolution};
pub use error::{Error, Result};
pub use family::{
    canonical_transform, ef_rhs, family_params, oscillator_coefficients, oscillator_rhs, particular_solution,
    perturbation_expansion, self_adjoint_residual, FamilyParams, OscillatorCoefficients, Parameter, ParticularSolution,
    PerturbationExpansion, SelfAdjointForm,
};
pub use integrate::{integrate_ivp, IvProblem, Options, SolutionCurve, Status};
pub use phase::{
    classify, eigen_perturbation_link, portrait, saddle_flow_directions, saddle_recovers_y0, AutonomousSystem,
    FixedPoint, FixedPointKind, PhasePortrait, Window,
};
