#![allow(dead_code)]
//! Independent reference computations and random generators shared by the
//! property and acceptance targets.

pub mod props;

use proptest::prelude::*;
use rand::Rng;
use skinspec_core::{Complex64, PerturbedDimerParams, ResonatorChain, TridiagonalMatrix};

/// `det(xI − T)` by the leading-minor recurrence.
pub fn det_sweep(t: &TridiagonalMatrix, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x - t.diag[0]);
    for i in 1..t.order() {
        let next = (x - t.diag[i]) * cur - t.sup[i - 1] * t.sub[i - 1] * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Singular values of a real dense matrix by one-sided Jacobi rotations.
pub fn jacobi_singular_values(a: &[Vec<f64>]) -> Vec<f64> {
    let rows = a.len();
    let cols = a[0].len();
    // Work on columns.
    let mut u: Vec<Vec<f64>> = (0..cols).map(|j| (0..rows).map(|i| a[i][j]).collect()).collect();
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = u[p].iter().map(|x| x * x).sum();
                let beta: f64 = u[q].iter().map(|x| x * x).sum();
                let gamma: f64 = u[p].iter().zip(&u[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt());
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let (x, y) = (u[p][i], u[q][i]);
                    u[p][i] = c * x - s * y;
                    u[q][i] = s * x + c * y;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut sv: Vec<f64> = u.iter().map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(f64::total_cmp);
    sv
}

/// Smallest singular value of `zI − M` through the real `2n × 2n` embedding
/// `[[Re, −Im], [Im, Re]]`, whose singular values are those of the complex
/// matrix, each twice.
pub fn dense_sigma_min(m: &TridiagonalMatrix, z: Complex64) -> f64 {
    let n = m.order();
    let dense = m.to_dense();
    let mut big = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let w = if i == j { z - dense[i][j] } else { Complex64::new(-dense[i][j], 0.0) };
            big[i][j] = w.re;
            big[i][j + n] = -w.im;
            big[i + n][j] = w.im;
            big[i + n][j + n] = w.re;
        }
    }
    jacobi_singular_values(&big)[0]
}

/// Sign-symmetric magnitude in `[lo, hi]`.
fn signed(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let x = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        x
    } else {
        -x
    }
}

/// Random admissible coefficients (`γ₁β₁ > 0`, `γ₂β₂ > 0`).
pub fn random_params(rng: &mut impl Rng) -> PerturbedDimerParams {
    let beta1 = signed(rng, 0.5, 2.0);
    let beta2 = signed(rng, 0.5, 2.0);
    PerturbedDimerParams::new(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        beta1,
        beta2,
        beta1.signum() * rng.gen_range(0.5..2.0),
        beta2.signum() * rng.gen_range(0.5..2.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
    )
}

/// Random chain with arbitrary lengths, spacings and per-site gauge potential.
pub fn random_chain(rng: &mut impl Rng, per_site_gamma: bool) -> ResonatorChain {
    let n = rng.gen_range(2..40);
    let lengths = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
    let spacings = (0..n - 1).map(|_| rng.gen_range(0.2..3.0)).collect();
    let g = signed(rng, 0.05, 3.0);
    let gammas = (0..n)
        .map(|_| if per_site_gamma { signed(rng, 0.05, 3.0) } else { g })
        .collect();
    ResonatorChain::new(lengths, spacings, gammas, 1e-3, 1.0, 1.0).expect("valid random chain")
}

pub fn params_strategy() -> impl Strategy<Value = PerturbedDimerParams> {
    let mag = || 0.5f64..2.0;
    (
        -2.0f64..2.0,
        -2.0f64..2.0,
        (mag(), mag(), any::<bool>()),
        (mag(), mag(), any::<bool>()),
        -3.0f64..3.0,
        -3.0f64..3.0,
    )
        .prop_map(|(alpha1, alpha2, (b1, g1, n1), (b2, g2, n2), a, b)| {
            let s1 = if n1 { -1.0 } else { 1.0 };
            let s2 = if n2 { -1.0 } else { 1.0 };
            PerturbedDimerParams::new(alpha1, alpha2, s1 * b1, s2 * b2, s1 * g1, s2 * g2, a, b)
        })
}

pub fn chain_strategy() -> impl Strategy<Value = ResonatorChain> {
    (2usize..40, any::<bool>()).prop_flat_map(|(n, per_site)| {
        (
            prop::collection::vec(0.2f64..3.0, n),
            prop::collection::vec(0.2f64..3.0, n - 1),
            prop::collection::vec((0.05f64..3.0, any::<bool>()), n),
            (0.05f64..3.0, any::<bool>()),
        )
            .prop_map(move |(lengths, spacings, site, (g, neg))| {
                let common = if neg { -g } else { g };
                let gammas = site
                    .into_iter()
                    .map(|(x, n)| if !per_site { common } else if n { -x } else { x })
                    .collect();
                ResonatorChain::new(lengths, spacings, gammas, 1e-3, 1.0, 1.0).unwrap()
            })
    })
}

/// Dimer chain with random geometry and gauge potential.
pub fn dimer_chain_strategy() -> impl Strategy<Value = ResonatorChain> {
    (3usize..60, 0.2f64..3.0, 0.2f64..3.0, 0.2f64..3.0, 0.05f64..2.0, any::<bool>()).prop_map(
        |(n, ell, s1, s2, g, neg)| ResonatorChain::dimer(n, ell, s1, s2, if neg { -g } else { g }).unwrap(),
    )
}

/// Indices `k = 3..=k_max` matched to a branch of `y` values sorted in
/// decreasing order, with `y` inside `[lower(k), upper(k)]` up to `slack`.
/// Returns the number of brackets that could be filled.
pub fn fill_brackets(
    ys_desc: &[f64],
    k_max: usize,
    lower: impl Fn(usize) -> f64,
    upper: impl Fn(usize) -> f64,
    slack: f64,
) -> usize {
    let mut next = 0;
    let mut filled = 0;
    for k in 3..=k_max {
        let (lo, hi) = (lower(k) - slack, upper(k) + slack);
        match (next..ys_desc.len()).find(|&i| ys_desc[i] <= hi) {
            Some(i) if ys_desc[i] >= lo => {
                filled += 1;
                next = i + 1;
            }
            _ => break,
        }
    }
    filled
}
