//! Real tridiagonal matrices and a pivoted banded LU shared by the real and
//! complex solvers.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real tridiagonal matrix of order `n` stored by bands.
///
/// `sup[i]` is entry `(i, i+1)` and `sub[i]` is entry `(i+1, i)` (0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalMatrix {
    pub diag: Vec<f64>,
    #[serde(rename = "super")]
    pub sup: Vec<f64>,
    pub sub: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, sup: Vec<f64>, sub: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::invalid("tridiagonal matrix must have order >= 1"));
        }
        if sup.len() != n - 1 || sub.len() != n - 1 {
            return Err(Error::invalid(format!(
                "band lengths {}/{} inconsistent with order {n}",
                sup.len(),
                sub.len()
            )));
        }
        Ok(Self { diag, sup, sub })
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Entry `(i, j)`, zero outside the three bands.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.sup[i]
        } else if i == j + 1 {
            self.sub[j]
        } else {
            0.0
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.order();
        assert_eq!(x.len(), n, "vector length must match matrix order");
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let n = self.order();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i].abs();
                if i > 0 {
                    acc += self.sub[i - 1].abs();
                }
                if i + 1 < n {
                    acc += self.sup[i].abs();
                }
                acc
            })
            .fold(0.0, f64::max)
    }

    /// `‖Av − λv‖_∞`.
    pub fn residual_inf(&self, v: &[f64], lambda: f64) -> f64 {
        self.matvec(v)
            .iter()
            .zip(v)
            .map(|(av, x)| (av - lambda * x).abs())
            .fold(0.0, f64::max)
    }

    /// `R·A·R` with `R` the exchange (anti-identity) matrix.
    pub fn reversed(&self) -> Self {
        let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
        Self {
            diag: rev(&self.diag),
            sup: rev(&self.sub),
            sub: rev(&self.sup),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            diag: self.diag.clone(),
            sup: self.sub.clone(),
            sub: self.sup.clone(),
        }
    }

    /// Row sums `A·𝟙`.
    pub fn row_sums(&self) -> Vec<f64> {
        self.matvec(&vec![1.0; self.order()])
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.order();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Scalar field for the banded LU: `f64` or `Complex64`.
pub(crate) trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn conj(self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn conj(self) -> Self {
        self
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
}

/// LU factorisation of a tridiagonal matrix with partial pivoting.
///
/// `U` carries two superdiagonals after row interchanges. Exactly singular
/// pivots are replaced by `pivot_floor` so the factorisation can be used for
/// inverse iteration at an exact eigenvalue.
#[derive(Debug, Clone)]
pub(crate) struct TridiagLu<T> {
    l: Vec<T>,
    d: Vec<T>,
    u1: Vec<T>,
    u2: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Scalar> TridiagLu<T> {
    pub fn factor(mut sub: Vec<T>, mut d: Vec<T>, mut sup: Vec<T>, pivot_floor: f64) -> Self {
        let n = d.len();
        debug_assert!(n >= 1 && sub.len() + 1 == n && sup.len() + 1 == n);
        let mut u2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].modulus() >= sub[i].modulus() {
                if d[i].modulus() == 0.0 {
                    d[i] = T::from_real(pivot_floor);
                }
                let fact = sub[i] / d[i];
                sub[i] = fact;
                d[i + 1] = d[i + 1] - fact * sup[i];
            } else {
                let fact = d[i] / sub[i];
                d[i] = sub[i];
                sub[i] = fact;
                let temp = sup[i];
                sup[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    u2[i] = sup[i + 1];
                    sup[i + 1] = -fact * sup[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1].modulus() == 0.0 {
            d[n - 1] = T::from_real(pivot_floor);
        }
        Self {
            l: sub,
            d,
            u1: sup,
            u2,
            swapped,
        }
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.l[i] * b[i];
            } else {
                b[i + 1] = b[i + 1] - self.l[i] * b[i];
            }
        }
        b[n - 1] = b[n - 1] / self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.u1[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.u1[i] * b[i + 1] - self.u2[i] * b[i + 2]) / self.d[i];
        }
    }

    /// Solves with the conjugate transpose of the factored matrix.
    pub fn solve_adjoint_in_place(&self, b: &mut [T]) {
        let n = self.d.len();
        for i in 0..n {
            let mut acc = b[i];
            if i >= 1 {
                acc = acc - self.u1[i - 1].conj() * b[i - 1];
            }
            if i >= 2 {
                acc = acc - self.u2[i - 2].conj() * b[i - 2];
            }
            b[i] = acc / self.d[i].conj();
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let l = self.l[i].conj();
            if self.swapped[i] {
                let top = b[i + 1];
                b[i + 1] = b[i] - l * top;
                b[i] = top;
            } else {
                b[i] = b[i] - l * b[i + 1];
            }
        }
    }
}
