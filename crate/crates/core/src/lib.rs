//! Moore-Penrose inverses in the C*-algebra of complex matrices.
//!
//! The crate computes pseudoinverses through a one-sided Jacobi SVD and
//! evaluates, with explicit tolerances, the identities that characterize
//! them: the Penrose system and its reformulations, reverse order law
//! conditions for products, Moore-Penrose hermitian elements (`a† = a`) and
//! partial isometries (`a† = a*`). The [`harness`] module fuzzes every claimed
//! equivalence over seeded random instances.

pub mod error;
pub mod harness;
pub mod isometry;
pub mod matrix;
pub mod mp_hermitian;
pub mod pinv;
pub mod random;
pub mod report;
pub mod reverse_order;
pub mod svd;
pub mod tolerance;

pub use error::{Error, Result};
pub use isometry::{
    classify, conorm, generate_special, is_partial_isometry, prop53_check, theorem54_check, ClassificationReport,
    SpecialKind,
};
pub use matrix::{approx_eq, relative_diff, ComplexMatrix, C64};
pub use mp_hermitian::{
    algebraic_mph_check, annihilator_spectrum_check, generate_mp_hermitian, is_mp_hermitian, theorem51_check,
    theorem52_decompose, MphDecomposition, SubspaceBasis,
};
pub use pinv::{
    formulation_holds, involution_laws_check, penrose_residuals, pinv, FormulationId, PenroseResiduals, PinvResult,
};
pub use report::ConditionReport;
pub use reverse_order::{evaluate_condition, full_report, rol_intermediates, ConditionId, RolIntermediates};
pub use svd::{numerical_rank, operator_norm, svd, SvdFactorization};
pub use tolerance::Tolerance;
