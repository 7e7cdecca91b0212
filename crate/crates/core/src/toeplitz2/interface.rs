use serde::{Deserialize, Serialize};

use super::eigvec::{classify, exact_prefix, resolve_vectors, Eigenpair, VectorMethod};
use super::{build_perturbed, PerturbedDimerParams};
use crate::error::{Error, Result};
use crate::oracle::{self, residual_ok};
use crate::tridiag::TridiagonalMatrix;
use crate::vecops::{normalize_sup, reversed, sup_norm};

/// Two 2-Toeplitz pieces joined at an interface.
///
/// `left` describes the left block as seen from the first row
/// (`build_perturbed(left, left_len)` agrees with the matrix on its first
/// `left_len − 1` rows); `right` describes the right block as seen from the
/// last row, i.e. after reversal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceLayout {
    pub left: PerturbedDimerParams,
    pub left_len: usize,
    pub right: PerturbedDimerParams,
    pub right_len: usize,
}

impl InterfaceLayout {
    /// Layout of `build_interface(params, m, a, b)`.
    pub fn symmetric(params: &PerturbedDimerParams, m: usize, a: f64, b: f64) -> Self {
        let half = 2 * m + 1;
        Self {
            left: params.with_corners(0.0, a).mirror(half),
            left_len: half,
            right: params.with_corners(0.0, b).mirror(half),
            right_len: half,
        }
    }

    pub fn order(&self) -> usize {
        self.left_len + self.right_len
    }

    fn validate(&self, t: &TridiagonalMatrix) -> Result<()> {
        if self.left_len < 2 || self.right_len < 2 {
            return Err(Error::invalid("interface pieces need at least two sites each"));
        }
        if self.order() != t.order() {
            return Err(Error::invalid(format!(
                "layout order {} does not match matrix order {}",
                self.order(),
                t.order()
            )));
        }
        self.left.validate()?;
        self.right.validate()
    }

    /// Joins the two one-sided closed forms through the two coupling rows.
    fn assemble(&self, t: &TridiagonalMatrix, lambda: f64) -> Option<Vec<f64>> {
        let l = exact_prefix(&self.left, self.left_len, lambda)?;
        let r = reversed(&exact_prefix(&self.right, self.right_len, lambda)?);
        let k = self.left_len;
        let row1 = (
            t.sub[k - 2] * l[k - 2] + (t.diag[k - 1] - lambda) * l[k - 1],
            t.sup[k - 1] * r[0],
        );
        let row2 = (
            t.sub[k - 1] * l[k - 1],
            (t.diag[k] - lambda) * r[0] + t.sup[k] * r[1],
        );
        let norm = |(x, y): (f64, f64)| x.hypot(y);
        let (cl, cr) = if norm(row1) >= norm(row2) {
            (row1.1, -row1.0)
        } else {
            (row2.1, -row2.0)
        };
        let (cl, cr) = if cl == 0.0 && cr == 0.0 { (1.0, 1.0) } else { (cl, cr) };
        let mut v: Vec<f64> = l
            .iter()
            .map(|x| cl * x)
            .chain(r.iter().map(|x| cr * x))
            .collect();
        normalize_sup(&mut v)?;
        Some(v)
    }
}

/// Order-`4m+2` matrix: the mirrored block `R·A^{(0,a)}·R` followed by
/// `A^{(0,b)}`, coupled by `γ₂` in both directions.
pub fn build_interface(
    params: &PerturbedDimerParams,
    m: usize,
    a: f64,
    b: f64,
) -> Result<TridiagonalMatrix> {
    if m < 1 {
        return Err(Error::invalid("interface half-size m must be at least 1"));
    }
    let half = 2 * m + 1;
    let left = build_perturbed(&params.with_corners(0.0, a), half)?.reversed();
    let right = build_perturbed(&params.with_corners(0.0, b), half)?;
    let cat = |x: &[f64], mid: f64, y: &[f64]| {
        x.iter()
            .copied()
            .chain(std::iter::once(mid))
            .chain(y.iter().copied())
            .collect::<Vec<_>>()
    };
    TridiagonalMatrix::new(
        [left.diag, right.diag].concat(),
        cat(&left.sup, params.gamma2, &right.sup),
        cat(&left.sub, params.gamma2, &right.sub),
    )
}

/// Closed-form eigenvector of an interface matrix for the eigenvalue `lambda`.
pub fn interface_eigenvector(
    t: &TridiagonalMatrix,
    layout: &InterfaceLayout,
    lambda: f64,
) -> Result<Vec<f64>> {
    layout.validate(t)?;
    match layout.assemble(t, lambda) {
        Some(v) if residual_ok(t, &v, lambda) => Ok(v),
        other => Err(Error::NotAnEigenvalue {
            value: lambda,
            residual: other.map_or(f64::INFINITY, |v| {
                t.residual_inf(&v, lambda) / lambda.abs().max(1.0) / sup_norm(&v)
            }),
        }),
    }
}

/// All eigenpairs of an interface matrix; `mu` is measured with the right
/// piece's coefficients.
pub fn interface_eigenpairs(t: &TridiagonalMatrix, layout: &InterfaceLayout) -> Result<Vec<Eigenpair>> {
    layout.validate(t)?;
    let lambdas = oracle::eigenvalues(t)?;
    let vectors = resolve_vectors(t, &lambdas, |l| {
        interface_eigenvector(t, layout, l).map(|v| (v, VectorMethod::Exact))
    })?;
    Ok(lambdas
        .into_iter()
        .zip(vectors)
        .map(|(lambda, (vector, method))| {
            let mu = layout.right.y_unchecked(lambda);
            Eigenpair {
                lambda,
                vector,
                mu,
                klass: classify(mu),
                method,
            }
        })
        .collect())
}
