//! Closed-form results: functional-equation coefficients, the
//! permutation-sum solution, and structural checks (special zeroes,
//! symmetry, polynomial degree, asymptotics, single-site ODE).

mod coefficients;
mod permutation;
mod structure;

pub use coefficients::{coeff_m, coeff_n, FunctionalCoefficients};
pub use permutation::{partition_l1, partition_permutation_sum, MAX_L_PERM};
pub use structure::{
    asymptotic_leading_coefficient, degree_probe, functional_equation_residual,
    interpolated_leading_coefficient, l1_constant, mu_symmetry_residual, ode_coefficients,
    ode_residual_l1, q_factorial, special_zero_residual, symmetry_residual, theta_stabilization,
    Evaluator,
};
