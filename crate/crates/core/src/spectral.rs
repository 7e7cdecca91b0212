//! Symbol of the semi-infinite 2-Toeplitz operator, winding numbers of its
//! determinant and eigenvalue loops, and ε-pseudospectra of finite matrices.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{sturm_count, SymTridiagonal};
use crate::toeplitz2::PerturbedDimerParams;
use crate::tridiag::{TridiagLu, TridiagonalMatrix};

pub type Mat2 = [[Complex64; 2]; 2];

/// Minimum number of samples on a curve.
pub const MIN_SAMPLES: usize = 64;
/// Points closer than this to a curve sample have no winding number.
pub const ON_CURVE_TOL: f64 = 1e-8;

const UNIT_TOL: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `f(z) = B₋₁z⁻¹ + B₀ + B₁z` with `B₀ = [[α₁, β₁], [γ₁, α₂]]`,
/// `B₁ = [[0, 0], [β₂, 0]]`, `B₋₁ = [[0, γ₂], [0, 0]]`.
pub fn symbol(params: &PerturbedDimerParams, z: Complex64) -> Result<Mat2> {
    if (z.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid(format!("symbol needs |z| = 1, got |z| = {}", z.norm())));
    }
    Ok(symbol_unchecked(params, z))
}

fn symbol_unchecked(p: &PerturbedDimerParams, z: Complex64) -> Mat2 {
    [
        [c(p.alpha1), c(p.beta1) + c(p.gamma2) / z],
        [c(p.gamma1) + c(p.beta2) * z, c(p.alpha2)],
    ]
}

fn det2(m: &Mat2) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn eig2(m: &Mat2) -> [Complex64; 2] {
    let half_tr = (m[0][0] + m[1][1]) * 0.5;
    let disc = (half_tr * half_tr - det2(m)).sqrt();
    [half_tr + disc, half_tr - disc]
}

/// Sampled closed curve `θ ↦ points[k]` over `θ ∈ [0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolCurve {
    pub thetas: Vec<f64>,
    pub points: Vec<Complex64>,
    /// Whether the last sample connects back to the first.
    pub closed: bool,
}

fn thetas(n_samples: usize) -> Result<Vec<f64>> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::invalid(format!(
            "need at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    Ok((0..n_samples).map(|k| TAU * k as f64 / n_samples as f64).collect())
}

fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// `θ ↦ det f(e^{iθ})`.
pub fn det_curve(params: &PerturbedDimerParams, n_samples: usize) -> Result<SymbolCurve> {
    params.validate()?;
    let thetas = thetas(n_samples)?;
    let points = thetas
        .iter()
        .map(|&t| det2(&symbol_unchecked(params, unit(t))))
        .collect();
    Ok(SymbolCurve {
        thetas,
        points,
        closed: true,
    })
}

/// `θ ↦ det(λI − f(e^{iθ}))`; its winding around 0 is the total winding of
/// the eigenvalue loops around `λ`.
pub fn shifted_det_curve(
    params: &PerturbedDimerParams,
    lambda: Complex64,
    n_samples: usize,
) -> Result<SymbolCurve> {
    params.validate()?;
    let thetas = thetas(n_samples)?;
    let points = thetas
        .iter()
        .map(|&t| {
            let f = symbol_unchecked(params, unit(t));
            (lambda - f[0][0]) * (lambda - f[1][1]) - f[0][1] * f[1][0]
        })
        .collect();
    Ok(SymbolCurve {
        thetas,
        points,
        closed: true,
    })
}

/// `min_θ |det f(e^{iθ})|` and its minimiser, located on `n_samples` points
/// and refined by golden-section search.
pub fn min_abs_det(params: &PerturbedDimerParams, n_samples: usize) -> Result<(f64, f64)> {
    let curve = det_curve(params, n_samples)?;
    let k = curve
        .points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(k, _)| k)
        .expect("nonempty curve");
    let h = TAU / n_samples as f64;
    let g = |t: f64| det2(&symbol_unchecked(params, unit(t))).norm();
    let (mut lo, mut hi) = (curve.thetas[k] - h, curve.thetas[k] + h);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..200 {
        if hi - lo < 1e-15 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = g(x2);
        }
    }
    let (theta, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let best = curve.points[k].norm();
    Ok(if value <= best {
        (theta.rem_euclid(TAU), value)
    } else {
        (curve.thetas[k], best)
    })
}

/// The two eigenvalue branches of `f(e^{iθ})`, continued in `θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCurves {
    pub branches: [SymbolCurve; 2],
    /// Branches exchange after one turn; their union is then a single loop
    /// traversed over `4π`.
    pub swapped: bool,
}

fn assign(prev: &[Complex64; 2], next: [Complex64; 2]) -> [Complex64; 2] {
    let keep = (next[0] - prev[0]).norm() + (next[1] - prev[1]).norm();
    let swap = (next[1] - prev[0]).norm() + (next[0] - prev[1]).norm();
    if swap < keep {
        [next[1], next[0]]
    } else {
        next
    }
}

pub fn eig_curves(params: &PerturbedDimerParams, n_samples: usize) -> Result<EigenCurves> {
    params.validate()?;
    let thetas = thetas(n_samples)?;
    let mut a = Vec::with_capacity(n_samples);
    let mut b = Vec::with_capacity(n_samples);
    let mut prev = eig2(&symbol_unchecked(params, unit(0.0)));
    if prev[1].re > prev[0].re {
        prev.swap(0, 1);
    }
    for &t in &thetas {
        let cur = assign(&prev, eig2(&symbol_unchecked(params, unit(t))));
        a.push(cur[0]);
        b.push(cur[1]);
        prev = cur;
    }
    // Continue through θ = 2π to see which branch returns to which start.
    let wrap = assign(&prev, eig2(&symbol_unchecked(params, unit(TAU))));
    let swapped = (wrap[0] - b[0]).norm() + (wrap[1] - a[0]).norm()
        < (wrap[0] - a[0]).norm() + (wrap[1] - b[0]).norm();
    let curve = |points| SymbolCurve {
        thetas: thetas.clone(),
        points,
        closed: !swapped,
    };
    Ok(EigenCurves {
        branches: [curve(a), curve(b)],
        swapped,
    })
}

impl EigenCurves {
    /// Total winding of the eigenvalue loops around `point`.
    pub fn winding(&self, point: Complex64) -> Result<i64> {
        if self.swapped {
            let mut points = self.branches[0].points.clone();
            points.extend_from_slice(&self.branches[1].points);
            let thetas = self.branches[0]
                .thetas
                .iter()
                .copied()
                .chain(self.branches[1].thetas.iter().map(|t| t + TAU))
                .collect();
            winding(
                &SymbolCurve {
                    thetas,
                    points,
                    closed: true,
                },
                point,
            )
        } else {
            Ok(winding(&self.branches[0], point)? + winding(&self.branches[1], point)?)
        }
    }
}

/// Winding number of a closed sampled curve around `point`, counterclockwise
/// positive.
pub fn winding(curve: &SymbolCurve, point: Complex64) -> Result<i64> {
    if !curve.closed {
        return Err(Error::invalid("winding number needs a closed curve"));
    }
    let n = curve.points.len();
    if n < 3 {
        return Err(Error::invalid("curve needs at least three samples"));
    }
    let distance = curve
        .points
        .iter()
        .map(|p| (p - point).norm())
        .fold(f64::INFINITY, f64::min);
    if distance < ON_CURVE_TOL {
        return Err(Error::PointOnCurve { distance });
    }
    let mut total = 0.0;
    for k in 0..n {
        let d = ((curve.points[(k + 1) % n] - point) / (curve.points[k] - point)).arg();
        if d.abs() > FRAC_PI_2 {
            return Err(Error::InsufficientSampling { increment: d.abs() });
        }
        total += d;
    }
    let w = (total / TAU).round();
    if (total - TAU * w).abs() >= 0.01 {
        return Err(Error::InsufficientSampling {
            increment: (total - TAU * w).abs(),
        });
    }
    Ok(w as i64)
}

const LANCZOS_MAX_STEPS: usize = 120;
const LANCZOS_RESIDUAL_TOL: f64 = 1e-10;

/// Largest eigenvalue of a symmetric tridiagonal matrix, bisected upward from
/// `floor`.
fn top_eigenvalue(t: &SymTridiagonal, floor: f64) -> f64 {
    let k = t.order();
    let (_, hi) = t.gershgorin();
    let (mut lo, mut hi) = (floor.min(hi), hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(t, mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Magnitude of the last component of the unit eigenvector of `t` for the
/// eigenvalue `theta`.
fn ritz_tail(t: &SymTridiagonal, theta: f64) -> f64 {
    let k = t.order();
    let shifted: Vec<f64> = t.diag.iter().map(|d| d - theta).collect();
    let lu = TridiagLu::factor(t.offdiag.clone(), shifted, t.offdiag.clone(), f64::MIN_POSITIVE);
    let mut x = vec![1.0; k];
    for _ in 0..2 {
        lu.solve_in_place(&mut x);
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(nx.is_finite() && nx > 0.0) {
            return 1.0;
        }
        x.iter_mut().for_each(|v| *v /= nx);
    }
    x[k - 1].abs()
}

/// Smallest singular value of `zI − M`: Lanczos with full
/// reorthogonalisation on `(zI − M)⁻¹(zI − M)⁻ᴴ`, whose largest eigenvalue is
/// `σ_min⁻²`. Returns 0 when `zI − M` is numerically singular.
pub fn sigma_min(m: &TridiagonalMatrix, z: Complex64) -> f64 {
    let n = m.order();
    let diag: Vec<Complex64> = m.diag.iter().map(|d| z - d).collect();
    let sup: Vec<Complex64> = m.sup.iter().map(|x| c(-x)).collect();
    let sub: Vec<Complex64> = m.sub.iter().map(|x| c(-x)).collect();
    if n == 1 {
        return diag[0].norm();
    }
    let lu = TridiagLu::factor(sub, diag, sup, f64::MIN_POSITIVE);
    let apply = |x: &[Complex64]| {
        let mut y = x.to_vec();
        lu.solve_adjoint_in_place(&mut y);
        lu.solve_in_place(&mut y);
        y
    };
    let norm = |v: &[Complex64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    };

    let mut q: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(1.0, (k as f64 + 1.0).sin()))
        .collect();
    let nq = norm(&q);
    q.iter_mut().for_each(|v| *v /= nq);

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut t = SymTridiagonal {
        diag: Vec::new(),
        offdiag: Vec::new(),
    };
    let mut theta = 0.0f64;
    for _ in 0..n.min(LANCZOS_MAX_STEPS) {
        let mut w = apply(&q);
        if w.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
            return 0.0;
        }
        let alpha = inner(&q, &w).re;
        basis.push(q);
        for _ in 0..2 {
            for b in &basis {
                let h = inner(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= h * y);
            }
        }
        t.diag.push(alpha);
        let next = top_eigenvalue(&t, theta);
        if !next.is_finite() {
            return 0.0;
        }
        let beta = norm(&w);
        theta = next;
        let settled = beta * ritz_tail(&t, theta) <= LANCZOS_RESIDUAL_TOL * theta;
        if settled || beta <= f64::EPSILON * theta || !beta.is_finite() {
            break;
        }
        t.offdiag.push(beta);
        q = w.into_iter().map(|v| v / beta).collect();
    }
    if theta > 0.0 {
        1.0 / theta.sqrt()
    } else {
        0.0
    }
}

/// Rectangular region of the complex plane divided into `nx × ny` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
    pub nx: usize,
    pub ny: usize,
}

/// Minimum grid resolution per axis.
pub const MIN_RESOLUTION: usize = 16;

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.re0, self.re1, self.im0, self.im1].iter().all(|x| x.is_finite());
        if !finite || self.re1 <= self.re0 || self.im1 <= self.im0 {
            return Err(Error::invalid("grid region must be a nonempty finite rectangle"));
        }
        if self.nx < MIN_RESOLUTION || self.ny < MIN_RESOLUTION {
            return Err(Error::invalid(format!(
                "grid resolution must be at least {MIN_RESOLUTION}x{MIN_RESOLUTION}"
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.re1 - self.re0) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.im1 - self.im0) / self.ny as f64
    }

    /// Region around `points`, symmetric about the real axis, widened on every
    /// side by `pad` times the larger of its width and height.
    pub fn enclosing<I>(points: I, pad: f64, nx: usize, ny: usize) -> Result<Self>
    where
        I: IntoIterator<Item = Complex64>,
    {
        let (mut re0, mut re1, mut im) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for z in points {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::invalid("cannot enclose non-finite points"));
            }
            re0 = re0.min(z.re);
            re1 = re1.max(z.re);
            im = im.max(z.im.abs());
        }
        if re0 > re1 {
            return Err(Error::invalid("cannot enclose an empty set of points"));
        }
        let extent = (re1 - re0).max(2.0 * im);
        let margin = if extent > 0.0 { pad * extent } else { 1.0 };
        let spec = Self {
            re0: re0 - margin,
            re1: re1 + margin,
            im0: -(im + margin),
            im1: im + margin,
            nx,
            ny,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Centre of cell `(i, j)`, `i` along the real axis.
    pub fn center(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(
            self.re0 + (i as f64 + 0.5) * self.dx(),
            self.im0 + (j as f64 + 0.5) * self.dy(),
        )
    }

    /// Cell containing `z`, if inside the region.
    pub fn cell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let fi = (z.re - self.re0) / self.dx();
        let fj = (z.im - self.im0) / self.dy();
        if fi < 0.0 || fj < 0.0 || !fi.is_finite() || !fj.is_finite() {
            return None;
        }
        let (i, j) = (fi as usize, fj as usize);
        (i < self.nx && j < self.ny).then_some((i, j))
    }

    /// Evaluates `f` at every cell centre in parallel; row `j` holds cells with
    /// the `j`-th imaginary coordinate.
    pub fn map<T, F>(&self, f: F) -> Vec<Vec<T>>
    where
        T: Send,
        F: Fn(Complex64) -> T + Sync,
    {
        let flat: Vec<T> = (0..self.nx * self.ny)
            .into_par_iter()
            .map(|k| f(self.center(k % self.nx, k / self.nx)))
            .collect();
        let mut rows = Vec::with_capacity(self.ny);
        let mut it = flat.into_iter();
        for _ in 0..self.ny {
            rows.push(it.by_ref().take(self.nx).collect());
        }
        rows
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoGrid {
    pub spec: GridSpec,
    /// `sigma_min[j][i]` at the centre of cell `(i, j)`.
    pub sigma_min: Vec<Vec<f64>>,
}

impl PseudoGrid {
    /// Cells with `σ_min ≤ eps`, indexed like `sigma_min`.
    pub fn sublevel(&self, eps: f64) -> Vec<Vec<bool>> {
        self.sigma_min
            .iter()
            .map(|row| row.iter().map(|s| *s <= eps).collect())
            .collect()
    }
}

pub fn pseudospectrum(m: &TridiagonalMatrix, spec: &GridSpec) -> Result<PseudoGrid> {
    spec.validate()?;
    Ok(PseudoGrid {
        spec: *spec,
        sigma_min: spec.map(|z| sigma_min(m, z)),
    })
}

/// Winding of the eigenvalue loops at every cell centre; `None` where the
/// winding number is undefined at the given sampling.
pub fn winding_grid(curves: &EigenCurves, spec: &GridSpec) -> Result<Vec<Vec<Option<i64>>>> {
    spec.validate()?;
    Ok(spec.map(|z| curves.winding(z).ok()))
}

/// Default sample count used when none is requested.
pub const DEFAULT_SAMPLES: usize = 2048;
