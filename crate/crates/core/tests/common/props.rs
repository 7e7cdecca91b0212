#![allow(dead_code)]
//! Invariant checks shared by the proptest target and the acceptance run.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use skinspec_core::oracle::{eigenvalues, sturm_count, sturm_eigenvalues, symmetrize, DEFAULT_TOL};
use skinspec_core::spectral::shifted_det_curve;
use skinspec_core::{
    build_perturbed, cheb_eval, dimer_coefficients, eig_curves, eigen_all, gauge_capacitance,
    hat_sequences, sigma_min, spectral, winding, ChebyshevKind, Complex64, Error,
    PerturbedDimerParams, RecurrenceSpec, ResonatorChain, TridiagonalMatrix, RESIDUAL_TOL,
};

use super::{chain_strategy, dense_sigma_min, det_sweep, dimer_chain_strategy, params_strategy};

pub type Check = std::result::Result<(), TestCaseError>;

pub fn recurrence_spec_strategy() -> impl Strategy<Value = (RecurrenceSpec, usize)> {
    (-3.0f64..3.0, 0.2f64..5.0, -5.0f64..5.0, -5.0f64..5.0, 2usize..600).prop_map(
        |(mu, beta, xp, xq, k)| (RecurrenceSpec::new(mu, beta, xp, xq).unwrap(), k),
    )
}

/// `x_{k+1} − 2μx_k + x_{k−1} = 0`, compared on a common scale.
pub fn recurrence_consistency(spec: &RecurrenceSpec, k_max: usize) -> Check {
    let h = hat_sequences(spec, k_max).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(h.len(), k_max + 1);
    for k in 1..k_max {
        let at = |seq: &[f64], i: usize| seq[i] * (h.scale_log[i] - h.scale_log[k]).exp();
        for seq in [&h.p_hat, &h.q_hat] {
            let (a, b, c) = (at(seq, k + 1), 2.0 * spec.mu * at(seq, k), at(seq, k - 1));
            let size = a.abs().max(b.abs()).max(c.abs());
            prop_assert!(
                (a - b + c).abs() <= 1e-12 * size,
                "k={} residual {} at size {}",
                k,
                (a - b + c).abs(),
                size
            );
        }
    }
    Ok(())
}

/// Coefficients together with a `λ` whose normalised coordinate is `cos θ`.
pub fn bulk_point_strategy() -> impl Strategy<Value = (PerturbedDimerParams, f64, bool)> {
    (params_strategy(), 0.0f64..std::f64::consts::PI, any::<bool>())
}

pub fn lambda_for(p: &PerturbedDimerParams, theta: f64, right: bool) -> f64 {
    let (g1, g2) = (p.gamma1 * p.beta1, p.gamma2 * p.beta2);
    let rhs = g1 + g2 + 2.0 * theta.cos() * (g1 * g2).sqrt();
    let mid = 0.5 * (p.alpha1 + p.alpha2);
    let half = 0.5 * (p.alpha1 - p.alpha2);
    let r = (half * half + rhs).sqrt();
    if right {
        mid + r
    } else {
        mid - r
    }
}

/// For `|μ| ≤ 1`: `|p̂_k| ≤ (k+1)|ξ_p| + k|ξ_p − ξ_q|/β`.
pub fn chebyshev_bound(p: &PerturbedDimerParams, theta: f64, right: bool) -> Check {
    let lambda = lambda_for(p, theta, right);
    let spec = RecurrenceSpec::for_eigenvalue(p, lambda).unwrap();
    prop_assert!(spec.mu.abs() <= 1.0 + 1e-12, "mu = {}", spec.mu);
    let h = hat_sequences(&spec, 200).unwrap();
    let shift = (spec.xi_p - spec.xi_q).abs() / spec.beta_ratio;
    for k in 0..=200 {
        let bound = (k + 1) as f64 * spec.xi_p.abs() + k as f64 * shift;
        let val = h.p(k).abs();
        prop_assert!(val <= bound * (1.0 + 1e-9) + 1e-12, "k={}: {} > {}", k, val, bound);
    }
    Ok(())
}

/// `U_n(cos θ)·sin θ = sin((n+1)θ)`.
pub fn chebyshev_sine(n: usize, theta: f64) -> Check {
    let lhs = cheb_eval(ChebyshevKind::Second, n, theta.cos()) * theta.sin();
    let rhs = ((n + 1) as f64 * theta).sin();
    prop_assert!((lhs - rhs).abs() <= 1e-10, "n={} theta={}: {} vs {}", n, theta, lhs, rhs);
    Ok(())
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> Check {
    prop_assert_eq!(a.len(), b.len());
    let scale = a.iter().chain(b).fold(1.0f64, |m, x| m.max(x.abs()));
    for (x, y) in a.iter().zip(b) {
        prop_assert!((x - y).abs() <= tol * scale, "{} vs {}", x, y);
    }
    Ok(())
}

/// Eigenvalues of the matrix, its transpose and its reversal coincide, and
/// every isolated eigenvalue is a sign change of `det(xI − A)`.
pub fn similarity_invariance(p: &PerturbedDimerParams, n: usize) -> Check {
    let t = build_perturbed(p, n).unwrap();
    let base = eigenvalues(&t).unwrap();
    prop_assert_eq!(base.len(), n);
    prop_assert!(base.iter().all(|x| x.is_finite()));
    rel_close(&base, &eigenvalues(&t.transpose()).unwrap(), 1e-10)?;
    rel_close(&base, &eigenvalues(&t.reversed()).unwrap(), 1e-10)?;
    let scale = base.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let delta = 1e-7 * scale;
    for i in 0..n {
        let isolated = (i == 0 || base[i] - base[i - 1] > 4.0 * delta)
            && (i + 1 == n || base[i + 1] - base[i] > 4.0 * delta);
        if isolated {
            let lo = det_sweep(&t, base[i] - delta);
            let hi = det_sweep(&t, base[i] + delta);
            prop_assert!(lo * hi <= 0.0, "no sign change at {}", base[i]);
        }
    }
    Ok(())
}

/// The count below the midpoint of each gap is exactly the number of
/// eigenvalues to its left.
pub fn certification(p: &PerturbedDimerParams, n: usize) -> Check {
    let s = symmetrize(&build_perturbed(p, n).unwrap()).unwrap();
    let ev = sturm_eigenvalues(&s, DEFAULT_TOL).unwrap();
    let scale = ev.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    for i in 0..n - 1 {
        if ev[i + 1] - ev[i] > 1e-12 * scale {
            prop_assert_eq!(sturm_count(&s, 0.5 * (ev[i] + ev[i + 1])), i + 1);
        }
    }
    Ok(())
}

/// Eigenvalues of the trailing order-`n−1` submatrix separate those of the
/// full matrix.
pub fn interlacing(p: &PerturbedDimerParams, n: usize) -> Check {
    let t = build_perturbed(p, n).unwrap();
    let sub = TridiagonalMatrix::new(t.diag[1..].to_vec(), t.sup[1..].to_vec(), t.sub[1..].to_vec()).unwrap();
    let full = eigenvalues(&t).unwrap();
    let part = eigenvalues(&sub).unwrap();
    let slack = 1e-12 * full.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    for (i, x) in part.iter().enumerate() {
        prop_assert!(full[i] - slack <= *x && *x <= full[i + 1] + slack, "{} outside [{}, {}]", x, full[i], full[i + 1]);
    }
    Ok(())
}

/// At most 11 (odd order) or 12 (even order) eigenvalues have `|y| > 1`.
pub fn exceptional_count(p: &PerturbedDimerParams, n: usize) -> Check {
    let pairs = eigen_all(p, n).unwrap();
    let count = pairs.iter().filter(|e| e.mu.abs() > 1.0).count();
    let limit = if n % 2 == 1 { 11 } else { 12 };
    prop_assert!(count <= limit, "{} exceptional eigenvalues at n={}", count, n);
    Ok(())
}

/// Every bulk eigenpair from the closed form has a small residual.
pub fn bulk_residual(p: &PerturbedDimerParams, n: usize) -> Check {
    let t = build_perturbed(p, n).unwrap();
    for e in eigen_all(p, n).unwrap().iter().filter(|e| e.klass.is_bulk()) {
        let r = t.residual_inf(&e.vector, e.lambda);
        prop_assert!(r <= RESIDUAL_TOL * e.lambda.abs().max(1.0), "residual {} at {}", r, e.lambda);
    }
    Ok(())
}

/// Swapping the roles of the bands and corners reverses the matrix.
pub fn mirror_conjugation(p: &PerturbedDimerParams, n: usize) -> Check {
    let original = build_perturbed(p, n).unwrap();
    let swapped = if n % 2 == 1 {
        PerturbedDimerParams::new(p.alpha1, p.alpha2, p.gamma2, p.gamma1, p.beta2, p.beta1, p.b, p.a)
    } else {
        PerturbedDimerParams::new(p.alpha2, p.alpha1, p.gamma1, p.gamma2, p.beta1, p.beta2, p.b, p.a)
    };
    prop_assert_eq!(build_perturbed(&swapped, n).unwrap(), original.reversed());
    prop_assert_eq!(p.mirror(n), swapped);
    Ok(())
}

/// Constant vectors lie in the kernel of the gauge capacitance matrix.
pub fn kernel(chain: &ResonatorChain) -> Check {
    let c = gauge_capacitance(chain).unwrap();
    let ones = vec![1.0; chain.len()];
    let r = c.matvec(&ones).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    prop_assert!(r <= 1e-12 * c.norm_inf(), "|C1| = {} with |C| = {}", r, c.norm_inf());
    Ok(())
}

/// The dimer coefficient table reproduces the capacitance matrix, relative to
/// its largest entry.
pub fn dimer_consistency(chain: &ResonatorChain) -> Check {
    let c = gauge_capacitance(chain).unwrap();
    let t = build_perturbed(&dimer_coefficients(chain).unwrap(), chain.len()).unwrap();
    let scale = c.diag.iter().chain(&c.sup).chain(&c.sub).fold(0.0f64, |m, x| m.max(x.abs()));
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-14 * scale);
    prop_assert!(close(&c.diag, &t.diag), "diag {:?} vs {:?}", c.diag, t.diag);
    prop_assert!(close(&c.sup, &t.sup));
    prop_assert!(close(&c.sub, &t.sub));
    Ok(())
}

/// Trace and determinant of the symbol agree with the eigenvalue branches.
pub fn symbol_identities(p: &PerturbedDimerParams) -> Check {
    let curves = eig_curves(p, 256).unwrap();
    let det = skinspec_core::det_curve(p, 256).unwrap();
    for k in 0..256 {
        let z = Complex64::from_polar(1.0, curves.branches[0].thetas[k]);
        let f = spectral::symbol(p, z).unwrap();
        let (e0, e1) = (curves.branches[0].points[k], curves.branches[1].points[k]);
        let scale = 1.0 + e0.norm() * e1.norm();
        prop_assert!((e0 * e1 - det.points[k]).norm() <= 1e-10 * scale);
        prop_assert!((e0 + e1 - (f[0][0] + f[1][1])).norm() <= 1e-10 * (1.0 + e0.norm() + e1.norm()));
    }
    Ok(())
}

/// Branch windings around `λ` add up to the winding of `det(λI − f)` around 0.
pub fn winding_identity(p: &PerturbedDimerParams, re: f64, im: f64) -> Check {
    let lambda = Complex64::new(re, im);
    let curves = eig_curves(p, 4096).unwrap();
    let shifted = shifted_det_curve(p, lambda, 4096).unwrap();
    match (curves.winding(lambda), winding(&shifted, Complex64::new(0.0, 0.0))) {
        (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
        (Err(Error::PointOnCurve { .. }), _) | (_, Err(Error::PointOnCurve { .. })) => {}
        (Err(Error::InsufficientSampling { .. }), _) | (_, Err(Error::InsufficientSampling { .. })) => {}
        (a, b) => return Err(TestCaseError::fail(format!("{a:?} vs {b:?}"))),
    }
    Ok(())
}

pub fn small_matrix_strategy() -> impl Strategy<Value = (TridiagonalMatrix, Complex64)> {
    (
        prop::collection::vec(-2.0f64..2.0, 8),
        prop::collection::vec(-2.0f64..2.0, 7),
        prop::collection::vec(-2.0f64..2.0, 7),
        -3.0f64..3.0,
        -3.0f64..3.0,
    )
        .prop_map(|(d, u, l, re, im)| (TridiagonalMatrix::new(d, u, l).unwrap(), Complex64::new(re, im)))
}

/// Inverse iteration agrees with a dense SVD.
pub fn sigma_min_dense(m: &TridiagonalMatrix, z: Complex64) -> Check {
    let fast = sigma_min(m, z);
    let dense = dense_sigma_min(m, z);
    prop_assert!((fast - dense).abs() <= 1e-6 * dense.max(1e-3), "{} vs {}", fast, dense);
    Ok(())
}

/// `σ_min(zI − M) = σ_min(z̄I − Mᵀ)` for real `M`.
pub fn conjugation_symmetry(m: &TridiagonalMatrix, z: Complex64) -> Check {
    let a = sigma_min(m, z);
    let b = sigma_min(&m.transpose(), z.conj());
    prop_assert!((a - b).abs() <= 1e-8 * a.max(1e-3), "{} vs {}", a, b);
    Ok(())
}

/// Runs every property with `cases` cases each and reports the outcome by name.
pub fn run_all(cases: u32) -> Vec<(&'static str, std::result::Result<(), String>)> {
    let config = || Config {
        cases,
        failure_persistence: None,
        rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
        ..Config::default()
    };
    let run = |name: &'static str, f: &dyn Fn(&mut TestRunner) -> std::result::Result<(), String>| {
        let mut runner = TestRunner::new_with_rng(config(), proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha));
        (name, f(&mut runner))
    };
    let orders = || prop_oneof![Just(41usize), Just(81), Just(101), 4usize..60];
    vec![
        run("recurrence consistency", &|r| {
            r.run(&recurrence_spec_strategy(), |(s, k)| recurrence_consistency(&s, k)).map_err(|e| e.to_string())
        }),
        run("chebyshev bound", &|r| {
            r.run(&bulk_point_strategy(), |(p, t, side)| chebyshev_bound(&p, t, side)).map_err(|e| e.to_string())
        }),
        run("chebyshev sine identity", &|r| {
            r.run(&(0usize..=100, 0.1f64..std::f64::consts::PI - 0.1), |(n, t)| chebyshev_sine(n, t))
                .map_err(|e| e.to_string())
        }),
        run("similarity invariance", &|r| {
            r.run(&(params_strategy(), orders()), |(p, n)| similarity_invariance(&p, n)).map_err(|e| e.to_string())
        }),
        run("sturm certification", &|r| {
            r.run(&(params_strategy(), orders()), |(p, n)| certification(&p, n)).map_err(|e| e.to_string())
        }),
        run("cauchy interlacing", &|r| {
            r.run(&(params_strategy(), orders()), |(p, n)| interlacing(&p, n)).map_err(|e| e.to_string())
        }),
        run("exceptional count", &|r| {
            r.run(&(params_strategy(), prop_oneof![Just(41usize), Just(81), Just(101)]), |(p, n)| {
                exceptional_count(&p, n)
            })
            .map_err(|e| e.to_string())
        }),
        run("bulk residual", &|r| {
            r.run(&(params_strategy(), 2usize..=201), |(p, n)| bulk_residual(&p, n)).map_err(|e| e.to_string())
        }),
        run("mirror conjugation", &|r| {
            r.run(&(params_strategy(), 2usize..80), |(p, n)| mirror_conjugation(&p, n)).map_err(|e| e.to_string())
        }),
        run("capacitance kernel", &|r| r.run(&chain_strategy(), |c| kernel(&c)).map_err(|e| e.to_string())),
        run("dimer consistency", &|r| {
            r.run(&dimer_chain_strategy(), |c| dimer_consistency(&c)).map_err(|e| e.to_string())
        }),
        run("symbol trace and determinant", &|r| {
            r.run(&params_strategy(), |p| symbol_identities(&p)).map_err(|e| e.to_string())
        }),
        run("winding identity", &|r| {
            r.run(&(params_strategy(), -6.0f64..6.0, -4.0f64..4.0), |(p, x, y)| winding_identity(&p, x, y))
                .map_err(|e| e.to_string())
        }),
        run("sigma_min against dense svd", &|r| {
            r.run(&small_matrix_strategy(), |(m, z)| sigma_min_dense(&m, z)).map_err(|e| e.to_string())
        }),
        run("pseudospectrum conjugation symmetry", &|r| {
            r.run(&small_matrix_strategy(), |(m, z)| conjugation_symmetry(&m, z)).map_err(|e| e.to_string())
        }),
    ]
}
