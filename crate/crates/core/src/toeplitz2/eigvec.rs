use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_perturbed, PerturbedDimerParams};
use crate::error::{Error, Result};
use crate::oracle::{self, inverse_iteration_deflated, inverse_iteration_vector, residual_ok};
use crate::polycore::run_pair;
use crate::tridiag::TridiagonalMatrix;
use crate::vecops::{dot, normalize_sup, reversed, sup_norm};

/// `|μ| ≤ 1 + BULK_TOL` counts as bulk.
pub const BULK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Klass {
    /// `μ = cos θ`, `θ ∈ [0, π]`.
    Bulk { theta: f64 },
    Exceptional,
}

impl Klass {
    pub fn is_bulk(&self) -> bool {
        matches!(self, Klass::Bulk { .. })
    }

    pub fn theta(&self) -> Option<f64> {
        match self {
            Klass::Bulk { theta } => Some(*theta),
            Klass::Exceptional => None,
        }
    }
}

/// How an eigenvector was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorMethod {
    /// Closed form started from the first entry.
    Exact,
    /// Closed form started from the last entry (mirrored matrix, reversed).
    ExactMirrored,
    InverseIteration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub lambda: f64,
    /// Unit sup-norm, largest entry positive.
    pub vector: Vec<f64>,
    pub mu: f64,
    pub klass: Klass,
    pub method: VectorMethod,
}

pub(crate) fn classify(mu: f64) -> Klass {
    if mu.abs() <= 1.0 + BULK_TOL {
        Klass::Bulk {
            theta: mu.clamp(-1.0, 1.0).acos(),
        }
    } else {
        Klass::Exceptional
    }
}

/// Closed-form vector satisfying rows `1..n−1` of `(A − λ)x = 0` for any `λ`;
/// the last row holds exactly when `λ` is an eigenvalue.
///
/// The factor `α₁ − λ` shared by every entry is divided out analytically, so
/// the first entry is always 1 before normalisation.
pub(crate) fn exact_prefix(p: &PerturbedDimerParams, n: usize, lambda: f64) -> Option<Vec<f64>> {
    let root = (p.g1() * p.g2()).sqrt();
    let beta = p.beta_ratio();
    let mu = p.y_unchecked(lambda);
    let c = p.cell_factor();

    let p0 = p.alpha1 + p.a - lambda;
    let p1 = 2.0 * mu * p0 + p.a / beta;
    let q0 = 1.0;
    let q1 = (2.0 * mu + beta) + p.a * (p.alpha2 - lambda) / root;
    let hats = run_pair(mu, [p0, p1], [q0, q1], (n - 1) / 2);

    let ln_c = c.abs().ln();
    let mut logs = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    for j in 0..n {
        let k = j / 2;
        let mant = if j % 2 == 0 {
            hats.q_hat[k]
        } else {
            -hats.p_hat[k] / p.beta1
        };
        let sign = if c < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        signs.push(if mant == 0.0 { 0.0 } else { sign * mant.signum() });
        logs.push(mant.abs().ln() + hats.scale_log[k] + k as f64 * ln_c);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return None;
    }
    let mut v: Vec<f64> = logs
        .iter()
        .zip(&signs)
        .map(|(l, s)| if *s == 0.0 { 0.0 } else { s * (l - top).exp() })
        .collect();
    normalize_sup(&mut v)?;
    Some(v)
}

fn relative_residual(t: &TridiagonalMatrix, v: &[f64], lambda: f64) -> f64 {
    t.residual_inf(v, lambda) / (lambda.abs().max(1.0) * sup_norm(v))
}

pub(crate) fn exact_with_method(
    p: &PerturbedDimerParams,
    t: &TridiagonalMatrix,
    lambda: f64,
) -> Result<(Vec<f64>, VectorMethod)> {
    let n = t.order();
    let mut worst = f64::INFINITY;
    if let Some(v) = exact_prefix(p, n, lambda) {
        if residual_ok(t, &v, lambda) {
            return Ok((v, VectorMethod::Exact));
        }
        worst = worst.min(relative_residual(t, &v, lambda));
    }
    if let Some(v) = exact_prefix(&p.mirror(n), n, lambda) {
        let v = reversed(&v);
        if residual_ok(t, &v, lambda) {
            return Ok((v, VectorMethod::ExactMirrored));
        }
        worst = worst.min(relative_residual(t, &v, lambda));
    }
    Err(Error::NotAnEigenvalue {
        value: lambda,
        residual: worst,
    })
}

/// Closed-form eigenvector for an eigenvalue `lambda` of
/// `build_perturbed(params, n)`, unit sup-norm with a positive peak.
pub fn eigenvector_exact(params: &PerturbedDimerParams, n: usize, lambda: f64) -> Result<Vec<f64>> {
    params.validate()?;
    let t = build_perturbed(params, n)?;
    exact_with_method(params, &t, lambda).map(|(v, _)| v)
}

/// Eigenvector of the mirrored matrix `R·A·R` (coefficients
/// `params.mirror(n)`) for `lambda`: the exact eigenvector read backwards.
pub fn mirrored_eigenvector(params: &PerturbedDimerParams, n: usize, lambda: f64) -> Result<Vec<f64>> {
    if n.is_multiple_of(2) {
        return Err(Error::invalid(format!("mirrored form needs odd order, got {n}")));
    }
    eigenvector_exact(params, n, lambda).map(|v| reversed(&v))
}

const PARALLEL_COS: f64 = 1.0 - 1e-6;

/// Vectors for all `lambdas`: closed form where it passes the residual test,
/// inverse iteration otherwise, with deflation inside clusters of numerically
/// coincident eigenvalues that produced parallel vectors.
pub(crate) fn resolve_vectors<F>(
    t: &TridiagonalMatrix,
    lambdas: &[f64],
    exact: F,
) -> Result<Vec<(Vec<f64>, VectorMethod)>>
where
    F: Fn(f64) -> Result<(Vec<f64>, VectorMethod)> + Sync,
{
    let first: Vec<Option<(Vec<f64>, VectorMethod)>> =
        lambdas.par_iter().map(|&l| exact(l).ok()).collect();
    let cluster_gap = 1e-8 * t.norm_inf().max(f64::MIN_POSITIVE);
    let mut out: Vec<(Vec<f64>, VectorMethod)> = Vec::with_capacity(lambdas.len());
    for (i, cand) in first.into_iter().enumerate() {
        let mates: Vec<Vec<f64>> = (0..i)
            .rev()
            .take_while(|&j| lambdas[i] - lambdas[j] <= cluster_gap)
            .map(|j| out[j].0.clone())
            .collect();
        let parallel = |v: &[f64]| {
            mates
                .iter()
                .any(|w| dot(v, w).abs() >= PARALLEL_COS * (dot(v, v) * dot(w, w)).sqrt())
        };
        let chosen = match cand {
            Some((v, m)) if !parallel(&v) => (v, m),
            _ => {
                let v = inverse_iteration_vector(t, lambdas[i])?;
                if parallel(&v) {
                    (inverse_iteration_deflated(t, lambdas[i], &mates)?, VectorMethod::InverseIteration)
                } else {
                    (v, VectorMethod::InverseIteration)
                }
            }
        };
        out.push(chosen);
    }
    Ok(out)
}

/// All `n` eigenpairs of `build_perturbed(params, n)`, sorted by eigenvalue.
pub fn eigen_all(params: &PerturbedDimerParams, n: usize) -> Result<Vec<Eigenpair>> {
    params.validate()?;
    let t = build_perturbed(params, n)?;
    let lambdas = oracle::eigenvalues(&t)?;
    let vectors = resolve_vectors(&t, &lambdas, |l| exact_with_method(params, &t, l))?;
    Ok(lambdas
        .into_iter()
        .zip(vectors)
        .map(|(lambda, (vector, method))| {
            let mu = params.y_unchecked(lambda);
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
