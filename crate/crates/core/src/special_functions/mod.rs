//! Jacobi theta functions, translated lattice theta functions, the
//! incomplete gamma function and the Epstein zeta function.

pub mod epstein;
pub mod gamma;
pub mod theta;

pub use epstein::{epstein_zeta, epstein_zeta_complex};
pub use gamma::{
    complex_gamma, complex_upper_incomplete_gamma, gamma, ln_gamma, upper_incomplete_gamma,
};
pub use theta::{
    jacobi_theta3_product, jacobi_theta3_series, jacobi_transform_residual, theta_direct_sum,
    theta_dual_sum, translated_theta, ThetaBranch, ThetaEvaluation,
};
