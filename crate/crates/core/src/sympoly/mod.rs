//! Scalar algebra of a spectrum: symmetric functions, the characteristic
//! polynomial and the coefficient families derived from it.

mod coefficients;
mod polynomial;
pub mod sampling;
mod spectrum;

pub use coefficients::{
    coeff_b, coeff_c, inverse_pprime_scale, lambda_gradient_coefficients, quad_g, quad_l,
    quad_l_double_sum, sum_form_disagreement, sum_inverse_pprime,
    verify_partial_fraction_identity, weight_u, weight_v, CoefficientFamily, CoefficientTable,
    FamilyKind, GradientMode,
};
pub use polynomial::{
    elementary_symmetric, newton_convert, poly_eval_suite, power_sums_to_sigma,
    sigma_to_power_sums, ElementarySymmetricVector, MonicPolynomial, SymmetricData,
};
pub use spectrum::{Spectrum, DEGENERACY_FACTOR};
