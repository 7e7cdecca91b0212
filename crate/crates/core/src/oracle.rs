//! Reference eigensolver: diagonal symmetrisation, Sturm bisection and
//! inverse iteration on the original non-symmetric matrix.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tridiag::{TridiagLu, TridiagonalMatrix};
use crate::vecops::{dot, normalize_sup, sup_norm};

/// Default relative bisection width.
pub const DEFAULT_TOL: f64 = 4.0 * f64::EPSILON;

const PIVOT_FLOOR: f64 = 1e-300;
const MAX_BISECTION_STEPS: usize = 200;
const MAX_INVERSE_ITERATIONS: usize = 50;

/// Residual threshold for eigenpairs: `‖Av − λv‖_∞ ≤ RESIDUAL_TOL · max(1,|λ|) · ‖v‖_∞`.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.order();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.offdiag[i - 1].abs();
            }
            if i + 1 < n {
                r += self.offdiag[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }
}

/// Symmetric tridiagonal matrix similar to `t` through a diagonal scaling.
pub fn symmetrize(t: &TridiagonalMatrix) -> Result<SymTridiagonal> {
    let offdiag = t
        .sup
        .iter()
        .zip(&t.sub)
        .enumerate()
        .map(|(i, (&u, &l))| {
            let prod = u * l;
            if prod > 0.0 && prod.is_finite() {
                Ok(prod.sqrt())
            } else {
                Err(Error::Inadmissible(format!(
                    "band product sub·super at position {i} is {prod}, must be positive"
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SymTridiagonal {
        diag: t.diag.clone(),
        offdiag,
    })
}

/// Number of eigenvalues of `s` strictly below `x`.
pub fn sturm_count(s: &SymTridiagonal, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..s.order() {
        let e2 = if i == 0 {
            0.0
        } else {
            s.offdiag[i - 1] * s.offdiag[i - 1]
        };
        q = s.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q.abs() < PIVOT_FLOOR {
            q = -PIVOT_FLOOR;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues in ascending order, each bisected to width
/// `tol · max(1, |λ|)`.
pub fn sturm_eigenvalues(s: &SymTridiagonal, tol: f64) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let n = s.order();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (g_lo, g_hi) = s.gershgorin();
    let pad = f64::EPSILON * g_lo.abs().max(g_hi.abs()).max(1.0) * n as f64;
    let (g_lo, g_hi) = (g_lo - pad, g_hi + pad);
    let mut out = (0..n)
        .into_par_iter()
        .map(|k| bisect(s, k, g_lo, g_hi, tol))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(f64::total_cmp);
    Ok(out)
}

fn bisect(s: &SymTridiagonal, k: usize, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if sturm_count(s, mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence {
        method: "Sturm bisection",
        iterations: MAX_BISECTION_STEPS,
    })
}

/// Eigenvalues of a tridiagonal matrix with positive band products.
pub fn eigenvalues(t: &TridiagonalMatrix) -> Result<Vec<f64>> {
    sturm_eigenvalues(&symmetrize(t)?, DEFAULT_TOL)
}

/// `true` when `‖Tv − λv‖_∞ ≤ RESIDUAL_TOL · max(1,|λ|) · ‖v‖_∞`.
pub fn residual_ok(t: &TridiagonalMatrix, v: &[f64], lambda: f64) -> bool {
    let r = t.residual_inf(v, lambda);
    r.is_finite() && r <= RESIDUAL_TOL * lambda.abs().max(1.0) * sup_norm(v)
}

/// Eigenvector of `t` for the (approximate) eigenvalue `lambda` by inverse
/// iteration, normalised to unit sup-norm with a positive peak.
pub fn inverse_iteration_vector(t: &TridiagonalMatrix, lambda: f64) -> Result<Vec<f64>> {
    inverse_iteration_deflated(t, lambda, &[])
}

/// Inverse iteration that keeps the iterate orthogonal to `against`.
///
/// Used for numerically coincident eigenvalues so each member of a cluster
/// gets an independent vector from the same near-invariant subspace.
pub fn inverse_iteration_deflated(
    t: &TridiagonalMatrix,
    lambda: f64,
    against: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let n = t.order();
    let floor = (f64::EPSILON * t.norm_inf()).max(PIVOT_FLOOR);
    let shifted: Vec<f64> = t.diag.iter().map(|d| d - lambda).collect();
    let lu = TridiagLu::factor(t.sub.clone(), shifted, t.sup.clone(), floor);

    // Orthonormal basis of the deflation set.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(against.len());
    for w in against {
        let mut w = w.clone();
        orthogonalize(&mut w, &basis);
        let nrm = dot(&w, &w).sqrt();
        if nrm > 0.0 {
            w.iter_mut().for_each(|x| *x /= nrm);
            basis.push(w);
        }
    }

    let starts: [Box<dyn Fn(usize) -> f64>; 3] = [
        Box::new(|_| 1.0),
        Box::new(move |i| (i + 1) as f64 / n as f64),
        Box::new(|i| if i % 2 == 0 { 1.0 } else { -0.5 }),
    ];
    let per_start = MAX_INVERSE_ITERATIONS / starts.len() + 1;
    let mut used = 0;
    let mut best: Option<Vec<f64>> = None;
    for start in &starts {
        let mut v: Vec<f64> = (0..n).map(start).collect();
        orthogonalize(&mut v, &basis);
        if normalize_sup(&mut v).is_none() {
            continue;
        }
        let mut prev_resid = f64::INFINITY;
        for _ in 0..per_start {
            if used >= MAX_INVERSE_ITERATIONS {
                break;
            }
            used += 1;
            let mut y = v.clone();
            lu.solve_in_place(&mut y);
            orthogonalize(&mut y, &basis);
            if normalize_sup(&mut y).is_none() {
                break;
            }
            let change = y
                .iter()
                .zip(&v)
                .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
            v = y;
            let resid = t.residual_inf(&v, lambda);
            let ok = residual_ok(t, &v, lambda);
            if ok {
                best = Some(v.clone());
                if change <= 1e-12 {
                    return Ok(v);
                }
            }
            // Stagnation: no progress on the residual and not yet acceptable.
            if !ok && resid >= 0.5 * prev_resid {
                break;
            }
            prev_resid = resid;
        }
        if let Some(v) = best {
            return Ok(v);
        }
    }
    Err(Error::NoConvergence {
        method: "inverse iteration",
        iterations: used,
    })
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    // Two passes of classical Gram-Schmidt.
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}
