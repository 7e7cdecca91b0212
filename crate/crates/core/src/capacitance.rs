//! Resonator chains, their gauge capacitance matrices, subwavelength
//! frequencies and piecewise-linear mode profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle;
use crate::toeplitz2::{
    eigen_all, interface_eigenpairs, Eigenpair, InterfaceLayout, PerturbedDimerParams,
};
use crate::tridiag::TridiagonalMatrix;

/// Default contrast `δ` for chains built by the convenience constructors.
pub const DEFAULT_DELTA: f64 = 1e-3;

const SAME_REL: f64 = 1e-12;

/// A chain of `N` resonators on the line, the first starting at `x = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonatorChain {
    pub lengths: Vec<f64>,
    /// Gap after resonator `i`, `N − 1` entries.
    pub spacings: Vec<f64>,
    /// Gauge potential per resonator.
    pub gammas: Vec<f64>,
    pub delta: f64,
    pub v: f64,
    pub v_b: f64,
}

impl ResonatorChain {
    pub fn new(
        lengths: Vec<f64>,
        spacings: Vec<f64>,
        gammas: Vec<f64>,
        delta: f64,
        v: f64,
        v_b: f64,
    ) -> Result<Self> {
        let chain = Self {
            lengths,
            spacings,
            gammas,
            delta,
            v,
            v_b,
        };
        chain.validate()?;
        Ok(chain)
    }

    /// Dimer chain: equal lengths, alternating spacings `s₁, s₂`, constant `γ`.
    pub fn dimer(n: usize, ell: f64, s1: f64, s2: f64, gamma: f64) -> Result<Self> {
        Self::new(
            vec![ell; n],
            alternating(n.saturating_sub(1), s1, s2),
            vec![gamma; n],
            DEFAULT_DELTA,
            1.0,
            1.0,
        )
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if n < 2 {
            return Err(Error::invalid(format!("chain needs at least 2 resonators, got {n}")));
        }
        if self.gammas.len() != n || self.spacings.len() != n - 1 {
            return Err(Error::invalid(format!(
                "chain of {n} resonators needs {n} gammas and {} spacings, got {} and {}",
                n - 1,
                self.gammas.len(),
                self.spacings.len()
            )));
        }
        let positive = |x: &f64| x.is_finite() && *x > 0.0;
        if !self.lengths.iter().all(positive) {
            return Err(Error::invalid("resonator lengths must be positive"));
        }
        if !self.spacings.iter().all(positive) {
            return Err(Error::invalid("spacings must be positive"));
        }
        if !self.gammas.iter().all(|g| g.is_finite() && *g != 0.0) {
            return Err(Error::invalid("gauge potentials must be finite and nonzero"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        if !(positive(&self.v) && positive(&self.v_b)) {
            return Err(Error::invalid("wave speeds must be positive"));
        }
        Ok(())
    }

    /// Left and right end points of each resonator.
    pub fn endpoints(&self) -> Vec<(f64, f64)> {
        let mut x = 0.0;
        let mut out = Vec::with_capacity(self.len());
        for (i, &l) in self.lengths.iter().enumerate() {
            out.push((x, x + l));
            x += l + self.spacings.get(i).copied().unwrap_or(0.0);
        }
        out
    }

    fn sub_chain(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            lengths: self.lengths[range.clone()].to_vec(),
            spacings: self.spacings[range.start..range.end - 1].to_vec(),
            gammas: self.gammas[range].to_vec(),
            ..*self
        }
    }

    fn equal_lengths(&self) -> Option<f64> {
        let l = self.lengths[0];
        self.lengths.iter().all(|x| same(*x, l)).then_some(l)
    }
}

fn alternating(len: usize, x: f64, y: f64) -> Vec<f64> {
    (0..len).map(|i| if i % 2 == 0 { x } else { y }).collect()
}

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= SAME_REL * x.abs().max(y.abs())
}

/// `ℓ/(1 − e^{−γℓ})` and `ℓ/(1 − e^{γℓ})`.
fn weights(gamma: f64, ell: f64) -> (f64, f64) {
    let x = gamma * ell;
    (ell / -(-x).exp_m1(), ell / -x.exp_m1())
}

/// Gauge capacitance matrix; every row sums to zero.
pub fn gauge_capacitance(chain: &ResonatorChain) -> Result<TridiagonalMatrix> {
    chain.validate()?;
    let n = chain.len();
    let s = &chain.spacings;
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n - 1];
    let mut sub = vec![0.0; n - 1];
    for i in 0..n {
        let g = chain.gammas[i];
        let (fm, fp) = weights(g, chain.lengths[i]);
        if i + 1 < n {
            diag[i] += g / s[i] * fm;
            sup[i] = -g / s[i] * fm;
        }
        if i > 0 {
            diag[i] -= g / s[i - 1] * fp;
            sub[i - 1] = g / s[i - 1] * fp;
        }
    }
    let c = TridiagonalMatrix::new(diag, sup, sub)?;
    debug_assert!(c.sup.iter().zip(&c.sub).all(|(u, l)| u * l > 0.0));
    Ok(c)
}

/// `V⁻¹C` with `V = diag(ℓ)`: its eigenvalues are those of `C a = λ V a`.
pub fn generalized_matrix(chain: &ResonatorChain) -> Result<TridiagonalMatrix> {
    let mut c = gauge_capacitance(chain)?;
    let n = c.order();
    for i in 0..n {
        let l = chain.lengths[i];
        c.diag[i] /= l;
        if i + 1 < n {
            c.sup[i] /= l;
        }
        if i > 0 {
            c.sub[i - 1] /= l;
        }
    }
    Ok(c)
}

/// 2-Toeplitz coefficients of a dimer chain, with corner perturbations, so
/// that `build_perturbed(p, N)` equals the gauge capacitance matrix.
pub fn dimer_coefficients(chain: &ResonatorChain) -> Result<PerturbedDimerParams> {
    chain.validate()?;
    let n = chain.len();
    if n < 3 {
        return Err(Error::invalid("dimer coefficients need at least 3 resonators"));
    }
    let s = &chain.spacings;
    let (ell, gamma) = (chain.lengths[0], chain.gammas[0]);
    let periodic = chain.equal_lengths().is_some()
        && chain.gammas.iter().all(|g| same(*g, gamma))
        && (2..s.len()).all(|i| same(s[i], s[i - 2]));
    if !periodic {
        return Err(Error::invalid(
            "not a dimer chain (needs equal lengths, constant gamma, 2-periodic spacings)",
        ));
    }
    let (s1, s2) = (s[0], s[1]);
    let (fm, fp) = weights(gamma, ell);
    let alpha1 = gamma / s1 * fm - gamma / s2 * fp;
    let alpha2 = gamma / s2 * fm - gamma / s1 * fp;
    let last = -gamma / s[n - 2] * fp;
    Ok(PerturbedDimerParams {
        alpha1,
        alpha2,
        beta1: -gamma / s1 * fm,
        beta2: -gamma / s2 * fm,
        gamma1: gamma / s1 * fp,
        gamma2: gamma / s2 * fp,
        a: offset(alpha1, gamma / s1 * fm),
        b: offset(if n % 2 == 1 { alpha1 } else { alpha2 }, last),
    })
}

/// `x` with `base + x == target` in floating point whenever such an `x` is
/// reachable by a few correction steps.
fn offset(base: f64, target: f64) -> f64 {
    let mut x = target - base;
    for _ in 0..4 {
        let miss = target - (base + x);
        if miss == 0.0 {
            break;
        }
        x += miss;
    }
    x
}

/// Two dimer half-chains of `n/2` resonators with gauge potentials `−γ` and `+γ`.
pub fn interface_chain(n: usize, gamma: f64, ell: f64, s1: f64, s2: f64) -> Result<ResonatorChain> {
    if n % 2 == 1 || n < 4 {
        return Err(Error::invalid(format!("interface chain needs even N >= 4, got {n}")));
    }
    if !(gamma > 0.0) {
        return Err(Error::invalid(format!("gamma must be positive, got {gamma}")));
    }
    let m = n / 2;
    let gammas = (0..n).map(|i| if i < m { -gamma } else { gamma }).collect();
    ResonatorChain::new(
        vec![ell; n],
        alternating(n - 1, s1, s2),
        gammas,
        DEFAULT_DELTA,
        1.0,
        1.0,
    )
}

/// Index of the single sign change of the gauge potential, if any.
fn sign_change(chain: &ResonatorChain) -> Result<Option<usize>> {
    let flips: Vec<usize> = (1..chain.len())
        .filter(|&i| (chain.gammas[i] > 0.0) != (chain.gammas[i - 1] > 0.0))
        .collect();
    match flips.as_slice() {
        [] => Ok(None),
        [m] => Ok(Some(*m)),
        _ => Err(Error::invalid("gauge potential changes sign more than once")),
    }
}

/// Closed-form layout of a chain whose gauge potential changes sign once.
pub fn interface_layout(chain: &ResonatorChain) -> Result<InterfaceLayout> {
    chain.validate()?;
    let n = chain.len();
    let m = sign_change(chain)?
        .ok_or_else(|| Error::invalid("gauge potential does not change sign"))?;
    let left = dimer_coefficients(&chain.sub_chain(0..m))?;
    let right_len = n - m;
    let right = dimer_coefficients(&chain.sub_chain(m..n))?.mirror(right_len);
    Ok(InterfaceLayout {
        left,
        left_len: m,
        right,
        right_len,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    /// All generalised eigenvalues, ascending.
    pub lambdas: Vec<f64>,
    /// `v_b·√(δλ)` for the nonnegative eigenvalues, ascending.
    pub omegas: Vec<f64>,
    /// Eigenvalues below zero beyond rounding; their frequencies would be imaginary.
    pub negative: Vec<f64>,
}

/// Tolerance below which a computed eigenvalue of `m` is treated as zero.
pub fn zero_tolerance(m: &TridiagonalMatrix) -> f64 {
    1e-12 * m.norm_inf()
}

/// `v_b·√(δλ)`, or `None` when `λ < −tol`.
pub fn frequency_of(chain: &ResonatorChain, lambda: f64, tol: f64) -> Option<f64> {
    if lambda >= -tol {
        Some(chain.v_b * (chain.delta * lambda.max(0.0)).sqrt())
    } else {
        None
    }
}

pub fn subwavelength_frequencies(chain: &ResonatorChain) -> Result<Frequencies> {
    let m = generalized_matrix(chain)?;
    let lambdas = oracle::eigenvalues(&m)?;
    let tol = zero_tolerance(&m);
    let mut omegas = Vec::new();
    let mut negative = Vec::new();
    for &l in &lambdas {
        match frequency_of(chain, l, tol) {
            Some(w) => omegas.push(w),
            None => negative.push(l),
        }
    }
    Ok(Frequencies {
        lambdas,
        omegas,
        negative,
    })
}

/// Eigenpairs of `C a = λ V a` for dimer and single-interface chains with
/// equal resonator lengths. `mu` and `klass` refer to the capacitance matrix
/// coefficients.
pub fn chain_eigenpairs(chain: &ResonatorChain) -> Result<Vec<Eigenpair>> {
    chain.validate()?;
    let ell = chain
        .equal_lengths()
        .ok_or_else(|| Error::invalid("closed-form chain modes need equal resonator lengths"))?;
    let mut pairs = match sign_change(chain)? {
        None => eigen_all(&dimer_coefficients(chain)?, chain.len())?,
        Some(_) => {
            let c = gauge_capacitance(chain)?;
            interface_eigenpairs(&c, &interface_layout(chain)?)?
        }
    };
    for p in &mut pairs {
        p.lambda /= ell;
    }
    Ok(pairs)
}

/// Piecewise-linear mode `Σ a_j V_j(x)` sampled along the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeProfile {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// Resonator (0-based) containing each sample, `None` in the gaps.
    pub resonator_index_map: Vec<Option<usize>>,
}

pub fn mode_profile(chain: &ResonatorChain, eigvec: &[f64], samples_per_gap: usize) -> Result<ModeProfile> {
    chain.validate()?;
    let n = chain.len();
    if eigvec.len() != n {
        return Err(Error::invalid(format!(
            "eigenvector has {} entries for a chain of {n}",
            eigvec.len()
        )));
    }
    if samples_per_gap == 0 {
        return Err(Error::invalid("samples_per_gap must be positive"));
    }
    let ends = chain.endpoints();
    // (x0, x1, v0, v1, resonator)
    let mut segments = Vec::with_capacity(2 * n + 1);
    let (x_first, _) = ends[0];
    segments.push((x_first - chain.spacings[0], x_first, eigvec[0], eigvec[0], None));
    for j in 0..n {
        let (xl, xr) = ends[j];
        segments.push((xl, xr, eigvec[j], eigvec[j], Some(j)));
        if j + 1 < n {
            segments.push((xr, ends[j + 1].0, eigvec[j], eigvec[j + 1], None));
        }
    }
    let (_, x_last) = ends[n - 1];
    segments.push((x_last, x_last + chain.spacings[n - 2], eigvec[n - 1], eigvec[n - 1], None));

    let mut out = ModeProfile {
        xs: Vec::new(),
        values: Vec::new(),
        resonator_index_map: Vec::new(),
    };
    for &(x0, x1, v0, v1, idx) in &segments {
        for k in 0..samples_per_gap {
            let t = k as f64 / samples_per_gap as f64;
            out.xs.push(x0 + t * (x1 - x0));
            out.values.push(v0 + t * (v1 - v0));
            out.resonator_index_map.push(idx);
        }
    }
    let &(_, x1, _, v1, idx) = segments.last().expect("at least one segment");
    out.xs.push(x1);
    out.values.push(v1);
    out.resonator_index_map.push(idx);
    Ok(out)
}
