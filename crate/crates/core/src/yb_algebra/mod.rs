//! Dynamical monodromy matrix on the `2^L`-dimensional quantum space, the
//! B-operator route to the partition function and the operator identities
//! of the dynamical Yang-Baxter algebra.

mod cartan;
mod monodromy;
mod partition;
mod relations;

pub use cartan::{CartanOperator, VacuumStates};
pub use monodromy::{Entry, QuantumOperator};
pub use partition::{
    b_string, partition_algebraic, reconcile_convention, BOffset, Reconciliation, MAX_L_ALG,
};
pub use relations::{
    cbb_residual, commutation_residuals, nilpotency_norm, CommutationResiduals, NilpotencyReport,
    MAX_L_DENSE,
};
