//! Fixtures shared by the benchmarks.

use skinspec_core::{build_perturbed, PerturbedDimerParams, Result, TridiagonalMatrix};

/// Parameters with an eigenvalue outside the band, used across benches.
pub fn corner_params() -> PerturbedDimerParams {
    PerturbedDimerParams {
        alpha1: 1.0,
        alpha2: 2.0,
        beta1: 3.0,
        beta2: 4.0,
        gamma1: 4.0,
        gamma2: 5.0,
        a: 9.0,
        b: 10.0,
    }
}

pub fn corner_matrix(n: usize) -> Result<TridiagonalMatrix> {
    build_perturbed(&corner_params(), n)
}
