//! Exact symbolic-numeric machinery for asymptotic expansions of bivariate
//! homogeneous symmetric means and the stability notions built on them.

pub mod algebraic;
pub mod analysis;
pub mod bigfloat;
pub mod catalog;
pub mod error;
pub mod expansion;
pub mod poly;
pub mod rational;
pub mod scalar;
pub mod series;

pub use algebraic::{
    primitive_integer, real_roots, solve_quadratic, AlgebraicRoot, Modulus, QuadraticSurd,
    QuotientElem,
};
pub use analysis::{
    asym_compare, compound_mean, factor_condition, functional_eq_residual, is_stable,
    resultant_eval, simultaneous_conditions, stability_conditions, stabilizable_disproof,
    substab_optimize, AsymCompareResult, CompareVerdict, DisproofReport, Relation, Report,
    SimultaneousCase, StabilityReport, SubStabOutcome, SubStabReport,
};
pub use bigfloat::FloatCtx;
pub use catalog::{exact_coeffs, exact_coeffs_symbolic, mean_eval, oracle_coeffs, Family, MeanSpec};
pub use error::{Error, Result};
pub use expansion::{
    d_s_seqs, expansion_eval, resultant_coeffs, shifted_coeffs, stabilizable_coeffs,
    stabilized_coeffs, stable_coeffs, DSSeqs, MeanCoeffs,
};
pub use poly::Poly;
pub use rational::Rat;
pub use scalar::{Coeff, Scalar};
pub use series::CoefSeq;

/// Mean coefficients over plain rationals (numeric path).
pub type RatMeanCoeffs = MeanCoeffs<Rat>;
/// Mean coefficients over rational-or-polynomial scalars (symbolic path).
pub type SymMeanCoeffs = MeanCoeffs<Scalar>;
