//! Perturbed tridiagonal 2-Toeplitz matrices: construction, characteristic
//! polynomials, exact eigenpairs, interface matrices and decay diagnostics.

mod decay;
mod eigvec;
mod interface;

pub use decay::{
    decay_report, decay_report_with_limit, interface_localization_check,
    interface_localization_check_with_limit, DecayReport, InterfaceReport, DEFAULT_BOUND_LIMIT,
};
pub use eigvec::{eigen_all, eigenvector_exact, mirrored_eigenvector, Eigenpair, Klass, VectorMethod};
pub use interface::{build_interface, interface_eigenpairs, interface_eigenvector, InterfaceLayout};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycore::{cheb_eval, ChebyshevKind};
use crate::tridiag::TridiagonalMatrix;

/// Coefficients of a perturbed 2-Toeplitz matrix.
///
/// Diagonal `α₁+a, α₂, α₁, α₂, …` with `b` added to the last entry,
/// superdiagonal `β₁, β₂, …`, subdiagonal `γ₁, γ₂, …`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbedDimerParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub a: f64,
    pub b: f64,
}

impl PerturbedDimerParams {
    #[allow(clippy::too_many_arguments)]
    pub const fn new(
        alpha1: f64,
        alpha2: f64,
        beta1: f64,
        beta2: f64,
        gamma1: f64,
        gamma2: f64,
        a: f64,
        b: f64,
    ) -> Self {
        Self {
            alpha1,
            alpha2,
            beta1,
            beta2,
            gamma1,
            gamma2,
            a,
            b,
        }
    }

    /// Requires `γ₁β₁ > 0`, `γ₂β₂ > 0` and finite entries.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.alpha1,
            self.alpha2,
            self.beta1,
            self.beta2,
            self.gamma1,
            self.gamma2,
            self.a,
            self.b,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        if !(self.gamma1 * self.beta1 > 0.0) || !(self.gamma2 * self.beta2 > 0.0) {
            return Err(Error::Inadmissible(format!(
                "need gamma1*beta1 > 0 and gamma2*beta2 > 0, got {} and {}",
                self.gamma1 * self.beta1,
                self.gamma2 * self.beta2
            )));
        }
        Ok(())
    }

    pub fn with_corners(self, a: f64, b: f64) -> Self {
        Self { a, b, ..self }
    }

    pub(crate) fn g1(&self) -> f64 {
        self.gamma1 * self.beta1
    }

    pub(crate) fn g2(&self) -> f64 {
        self.gamma2 * self.beta2
    }

    /// Decay factor per dimer, `√(γ₁γ₂/(β₁β₂))`.
    pub fn s(&self) -> f64 {
        (self.gamma1 * self.gamma2 / (self.beta1 * self.beta2)).sqrt()
    }

    /// `√(γ₂β₂/(γ₁β₁))`.
    pub fn beta_ratio(&self) -> f64 {
        (self.g2() / self.g1()).sqrt()
    }

    /// Signed per-cell factor `(γ₁/β₂)·β_ratio`; its modulus is `s`.
    pub(crate) fn cell_factor(&self) -> f64 {
        self.gamma1 / self.beta2 * self.beta_ratio()
    }

    pub(crate) fn y_unchecked(&self, x: f64) -> f64 {
        ((x - self.alpha1) * (x - self.alpha2) - self.g1() - self.g2())
            / (2.0 * (self.g1() * self.g2()).sqrt())
    }

    /// Coefficients of `R·A·R` for the order-`n` matrix, so that
    /// `build_perturbed(p.mirror(n), n)` is `build_perturbed(p, n)` reversed.
    pub fn mirror(&self, n: usize) -> Self {
        if n % 2 == 1 {
            Self {
                alpha1: self.alpha1,
                alpha2: self.alpha2,
                beta1: self.gamma2,
                beta2: self.gamma1,
                gamma1: self.beta2,
                gamma2: self.beta1,
                a: self.b,
                b: self.a,
            }
        } else {
            Self {
                alpha1: self.alpha2,
                alpha2: self.alpha1,
                beta1: self.gamma1,
                beta2: self.gamma2,
                gamma1: self.beta1,
                gamma2: self.beta2,
                a: self.b,
                b: self.a,
            }
        }
    }
}

pub fn build_perturbed(params: &PerturbedDimerParams, n: usize) -> Result<TridiagonalMatrix> {
    if n < 2 {
        return Err(Error::invalid(format!("order must be at least 2, got {n}")));
    }
    let p = params;
    let mut diag: Vec<f64> = (0..n)
        .map(|i| if i % 2 == 0 { p.alpha1 } else { p.alpha2 })
        .collect();
    diag[0] += p.a;
    diag[n - 1] += p.b;
    let sup = (0..n - 1)
        .map(|i| if i % 2 == 0 { p.beta1 } else { p.beta2 })
        .collect();
    let sub = (0..n - 1)
        .map(|i| if i % 2 == 0 { p.gamma1 } else { p.gamma2 })
        .collect();
    TridiagonalMatrix::new(diag, sup, sub)
}

/// `det(xI − A)` through the Chebyshev representation.
pub fn char_poly(params: &PerturbedDimerParams, n: usize, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("order must be at least 2, got {n}")));
    }
    params.validate()?;
    let p = params;
    let (g1, g2) = (p.g1(), p.g2());
    let root = (g1 * g2).sqrt();
    let t = (x - p.alpha1) * (x - p.alpha2);
    let arg = (t - g1 - g2) / (2.0 * root);
    let pstar = |k: isize| -> f64 {
        if k < 0 {
            0.0
        } else {
            root.powi(k as i32) * cheb_eval(ChebyshevKind::Second, k as usize, arg)
        }
    };
    let (a, b) = (p.a, p.b);
    let m = (n / 2) as isize;
    Ok(if n % 2 == 1 {
        (x - p.alpha1 - a - b) * pstar(m) + (a * b * (x - p.alpha2) - a * g1 - b * g2) * pstar(m - 1)
    } else {
        pstar(m)
            + (a * (p.alpha2 - x) + b * (p.alpha1 - x) + a * b + g2) * pstar(m - 1)
            + a * b * g1 * pstar(m - 2)
    })
}
