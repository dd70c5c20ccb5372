//! Semi-inner-products induced by smooth norms on Rⁿ, and the numerical
//! machinery to test when a diagonalizable operator is adjoint abelian,
//! i.e. satisfies [Ax, y] = [x, Ay] for the (unique) SIP of the norm.
//!
//! The crate provides:
//!
//! - norm specifications (lp, weighted lp, ellipsoidal, direct sums) with
//!   exact gradients and a finite-difference fallback ([`norms`]),
//! - closed-form SIP evaluation plus axiom auditing ([`sip`]),
//! - real spectral decompositions grouped by eigenvalue modulus
//!   ([`spectral`]),
//! - residual checks for adjoint-abelianness and the structural conditions
//!   equivalent to it ([`checker`]),
//! - Auerbach bases via determinant maximization ([`auerbach`]),
//! - unit-sphere section geometry: radial sections, centered-ellipse
//!   detection, the section-graph ODE, and Lipschitz/uniform-continuity
//!   probes ([`geometry`]).
//!
//! Everything is generic over the scalar through [`Real`] (f64 for all
//! shipped tools, f32 available); `RealVector`/`RealMatrix` fix the default
//! concrete types.

pub mod auerbach;
pub mod checker;
pub mod error;
pub mod geometry;
pub mod norms;
pub mod sampler;
pub mod sip;
pub mod spectral;

mod scalar;

pub use auerbach::{auerbach_search, q_gram_orthonormalize, AuerbachBasis};
pub use checker::{
    aa_gap, adjoint_abelian_residual, check_direct_sum, check_isometry,
    check_transversal_normal, direct_sum_defect, lemma_decomposition_residual,
    power_identity_residual, verify_theorem, verify_theorem_grouped, TheoremReport, Verdicts,
    DEFAULT_GROUP_TOL,
};
pub use error::{Error, ErrorKind, Result};
pub use geometry::{
    ellipse_fit_residual, lipschitz_scan, ode_residual, section_point,
    uniform_continuity_probe, LipschitzEstimate, OdeCheck, PlaneFrame, ProbeReport,
};
pub use norms::{numeric_gradient, NormSpec};
pub use sampler::{normalize_all, standard_unit_basis, Sampler, Strategy};
pub use scalar::Real;
pub use sip::{sip_axiom_report, sip_eval, sip_eval_gradient, AxiomReport};
pub use spectral::{
    matrix_from_json, max_principal_angle, operator_two_norm, spectral_decompose, SpectralData,
};

/// Default dense vector type used by the CLI and tests.
pub type RealVector = nalgebra::DVector<f64>;
/// Default dense matrix type used by the CLI and tests.
pub type RealMatrix = nalgebra::DMatrix<f64>;
