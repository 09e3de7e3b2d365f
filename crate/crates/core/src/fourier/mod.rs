//! Matrix-valued Fourier analysis of layered programs.

pub mod dist;
pub mod lambda;
pub mod layered;
pub mod mass;
pub mod wht;

pub use crate::bp::program::INPUT_BUDGET_BITS;
pub use dist::{bias, residual, ExplicitDistribution};
pub use lambda::{helmert_basis, lambda, lambda_layered, lambda_of_matrix};
pub use layered::{all_coeffs, avg_restrict, coeff, coeff_oracle, coeff_oracle_layered, layer_coeff, FLayer, LayeredFunction};
pub use mass::{
    damped_mass, layered_mass, level_mass, mass, matrix_spectrum, scalar_spectrum, scalar_spectrum_rows, spectrum_csv,
    MassMode, MassOptions, MassReport, SUBSET_BUDGET,
};
pub use wht::fwht;
