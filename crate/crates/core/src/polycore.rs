//! Chebyshev polynomials and the normalised hat recurrences behind the exact
//! eigenvector formulas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toeplitz2::PerturbedDimerParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChebyshevKind {
    First,
    Second,
}

/// `T_n(x)` or `U_n(x)` by forward three-term recurrence.
pub fn cheb_eval(kind: ChebyshevKind, n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = match kind {
        ChebyshevKind::First => (1.0, x),
        ChebyshevKind::Second => (1.0, 2.0 * x),
    };
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Roots of `U_n`, `cos(kπ/(n+1))` for `k = 1..=n`, in decreasing order.
pub fn cheb_u_roots(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("U_0 has no roots"));
    }
    let h = std::f64::consts::PI / (n as f64 + 1.0);
    Ok((1..=n)
        .map(|k| {
            // Exact zero at the centre instead of cos(π/2) ≈ 6e-17.
            if 2 * k == n + 1 {
                0.0
            } else {
                (k as f64 * h).cos()
            }
        })
        .collect())
}

/// Normalised spectral coordinate `y(x)`; `|y| ≤ 1` marks the bulk band.
pub fn y_map(params: &PerturbedDimerParams, x: f64) -> Result<f64> {
    params.validate()?;
    Ok(params.y_unchecked(x))
}

/// Inputs of the hat recurrences.
///
/// `corner_a` is the perturbation that separates the two starting values;
/// for the eigenvector construction `xi_p − xi_q = corner_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceSpec {
    pub mu: f64,
    pub beta_ratio: f64,
    pub xi_p: f64,
    pub xi_q: f64,
    pub corner_a: f64,
}

impl RecurrenceSpec {
    pub fn new(mu: f64, beta_ratio: f64, xi_p: f64, xi_q: f64) -> Result<Self> {
        let spec = Self {
            mu,
            beta_ratio,
            xi_p,
            xi_q,
            corner_a: xi_p - xi_q,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Starting values tied to an eigenvalue `λ` of the perturbed matrix:
    /// `ξ_q = α₁ − λ`, `ξ_p = α₁ + a − λ`.
    pub fn for_eigenvalue(params: &PerturbedDimerParams, lambda: f64) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            mu: params.y_unchecked(lambda),
            beta_ratio: params.beta_ratio(),
            xi_p: params.alpha1 + params.a - lambda,
            xi_q: params.alpha1 - lambda,
            corner_a: params.a,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta_ratio > 0.0 && self.beta_ratio.is_finite()) {
            return Err(Error::invalid(format!(
                "beta_ratio must be positive, got {}",
                self.beta_ratio
            )));
        }
        Ok(())
    }

    /// `([p̂₀, p̂₁], [q̂₀, q̂₁])`.
    pub fn initial_values(&self) -> ([f64; 2], [f64; 2]) {
        let Self {
            mu,
            beta_ratio: beta,
            xi_p,
            xi_q,
            ..
        } = *self;
        let shift = (xi_p - xi_q) / beta;
        (
            [xi_p, 2.0 * mu * xi_p + shift],
            [xi_q, (2.0 * mu + beta) * xi_p + shift],
        )
    }
}

/// Hat sequences stored as mantissas with a shared log scale:
/// the true value at index `k` is `p_hat[k] · exp(scale_log[k])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HatSequences {
    pub p_hat: Vec<f64>,
    pub q_hat: Vec<f64>,
    pub scale_log: Vec<f64>,
}

impl HatSequences {
    pub fn p(&self, k: usize) -> f64 {
        self.p_hat[k] * self.scale_log[k].exp()
    }

    pub fn q(&self, k: usize) -> f64 {
        self.q_hat[k] * self.scale_log[k].exp()
    }

    pub fn len(&self) -> usize {
        self.p_hat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_hat.is_empty()
    }
}

pub fn hat_sequences(spec: &RecurrenceSpec, k_max: usize) -> Result<HatSequences> {
    spec.validate()?;
    let (p, q) = spec.initial_values();
    Ok(run_pair(spec.mu, p, q, k_max))
}

const RESCALE_EXP: i32 = 512;

/// Runs `x_{k+1} = 2μ x_k − x_{k−1}` for two sequences in lock-step, rescaling
/// both by an exact power of two whenever they leave `[2⁻⁵¹², 2⁵¹²]`.
pub(crate) fn run_pair(mu: f64, p: [f64; 2], q: [f64; 2], k_max: usize) -> HatSequences {
    let big = 2f64.powi(RESCALE_EXP);
    let small = 2f64.powi(-RESCALE_EXP);
    let step = RESCALE_EXP as f64 * std::f64::consts::LN_2;

    let mut out = HatSequences {
        p_hat: Vec::with_capacity(k_max + 1),
        q_hat: Vec::with_capacity(k_max + 1),
        scale_log: Vec::with_capacity(k_max + 1),
    };
    out.p_hat.push(p[0]);
    out.q_hat.push(q[0]);
    out.scale_log.push(0.0);
    if k_max == 0 {
        return out;
    }
    out.p_hat.push(p[1]);
    out.q_hat.push(q[1]);
    out.scale_log.push(0.0);

    let (mut p_prev, mut p_cur) = (p[0], p[1]);
    let (mut q_prev, mut q_cur) = (q[0], q[1]);
    let mut log = 0.0;
    for _ in 2..=k_max {
        let p_next = 2.0 * mu * p_cur - p_prev;
        let q_next = 2.0 * mu * q_cur - q_prev;
        p_prev = p_cur;
        p_cur = p_next;
        q_prev = q_cur;
        q_cur = q_next;

        let mag = p_cur.abs().max(q_cur.abs()).max(p_prev.abs()).max(q_prev.abs());
        let factor = if mag > big {
            log += step;
            small
        } else if mag > 0.0 && mag < small {
            log -= step;
            big
        } else {
            1.0
        };
        p_prev *= factor;
        p_cur *= factor;
        q_prev *= factor;
        q_cur *= factor;

        out.p_hat.push(p_cur);
        out.q_hat.push(q_cur);
        out.scale_log.push(log);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn corner_example() -> PerturbedDimerParams {
        PerturbedDimerParams::new(1.0, 2.0, 3.0, 4.0, 4.0, 5.0, 9.0, 10.0)
    }

    #[test]
    fn chebyshev_small_values() {
        assert_eq!(cheb_eval(ChebyshevKind::Second, 0, 0.3), 1.0);
        assert_eq!(cheb_eval(ChebyshevKind::Second, 2, 1.0), 3.0);
        assert!((cheb_eval(ChebyshevKind::First, 2, 0.5) + 0.5).abs() < 1e-15);
        assert_eq!(cheb_eval(ChebyshevKind::First, 0, 7.0), 1.0);
        assert_eq!(cheb_eval(ChebyshevKind::First, 1, 7.0), 7.0);
        assert_eq!(cheb_eval(ChebyshevKind::Second, 1, 7.0), 14.0);
    }

    #[test]
    fn chebyshev_outside_unit_interval_matches_closed_form() {
        let x: f64 = 1.7;
        let t = x.acosh();
        for n in 0..30 {
            let tn = cheb_eval(ChebyshevKind::First, n, x);
            let un = cheb_eval(ChebyshevKind::Second, n, x);
            assert!((tn - (n as f64 * t).cosh()).abs() <= 1e-12 * tn.abs());
            let exact = ((n as f64 + 1.0) * t).sinh() / t.sinh();
            assert!((un - exact).abs() <= 1e-12 * un.abs());
        }
    }

    #[test]
    fn u_roots() {
        assert!(cheb_u_roots(0).is_err());
        assert_eq!(cheb_u_roots(1).unwrap(), vec![0.0]);
        let r = cheb_u_roots(3).unwrap();
        let h = 2f64.sqrt() / 2.0;
        assert!((r[0] - h).abs() < 1e-15 && r[1] == 0.0 && (r[2] + h).abs() < 1e-15);
        let r10 = cheb_u_roots(10).unwrap();
        assert!(r10.windows(2).all(|w| w[0] > w[1]));
        for x in r10 {
            assert!(cheb_eval(ChebyshevKind::Second, 10, x).abs() < 1e-12);
        }
    }

    #[test]
    fn y_map_examples() {
        let p = PerturbedDimerParams::new(0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0);
        assert!((y_map(&p, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((y_map(&p, 0.0).unwrap() + 1.0).abs() < 1e-15);
        let bad = PerturbedDimerParams::new(0.0, 0.0, 1.0, 1.0, -1.0, 1.0, 0.0, 0.0);
        assert!(matches!(y_map(&bad, 0.0), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn y_map_at_corner_example_eigenvalue_is_exceptional() {
        // x = 116217/10⁴, so the numerator is an exact integer over 10⁸.
        let num: i128 = (116_217 - 10_000) * (116_217 - 20_000) - 32 * 100_000_000;
        let expected = num as f64 / 1e8 / (2.0 * 240f64.sqrt());
        let y = y_map(&corner_example(), 11.6217).unwrap();
        assert!((y - expected).abs() < 1e-12 * expected.abs());
        assert!(y > 1.0);
    }

    #[test]
    fn initial_values_difference() {
        let s = RecurrenceSpec::new(0.37, 1.3, 1.0, 1.0).unwrap();
        let h = hat_sequences(&s, 1).unwrap();
        assert!((h.q(1) - h.p(1) - 1.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_beta() {
        assert!(RecurrenceSpec::new(0.0, 0.0, 1.0, 1.0).is_err());
        let s = RecurrenceSpec {
            mu: 0.0,
            beta_ratio: -1.0,
            xi_p: 1.0,
            xi_q: 1.0,
            corner_a: 0.0,
        };
        assert!(hat_sequences(&s, 3).is_err());
    }

    #[test]
    fn unperturbed_p_is_scaled_u() {
        for &theta in &[0.3, 1.1, 2.9] {
            let mu = f64::cos(theta);
            let xi = -2.5;
            let s = RecurrenceSpec::new(mu, 0.8, xi, xi).unwrap();
            let h = hat_sequences(&s, 20).unwrap();
            for k in 0..=20 {
                let u = cheb_eval(ChebyshevKind::Second, k, mu);
                assert!((h.p(k) - xi * u).abs() < 1e-12 * (1.0 + (xi * u).abs()));
            }
        }
    }

    #[test]
    fn rescaling_keeps_recurrence() {
        let s = RecurrenceSpec::new(40.0, 1.0, 1.0, 0.5).unwrap();
        let h = hat_sequences(&s, 400).unwrap();
        assert!(h.scale_log.last().copied().unwrap() > 0.0);
        assert!(h.p_hat.iter().all(|v| v.is_finite()));
        // Ratio test in mantissa space across a rescale boundary.
        for k in 1..400 {
            let r = |v: &[f64], i: usize| v[i] * (h.scale_log[i] - h.scale_log[k]).exp();
            let resid = r(&h.p_hat, k + 1) - 2.0 * 40.0 * h.p_hat[k] + r(&h.p_hat, k - 1);
            assert!(resid.abs() <= 1e-12 * r(&h.p_hat, k + 1).abs());
        }
    }

    #[test]
    fn sine_identity() {
        for n in 0..=100 {
            for i in 0..=20 {
                let theta = 0.1 + (PI - 0.2) * i as f64 / 20.0;
                let lhs = cheb_eval(ChebyshevKind::Second, n, theta.cos()) * theta.sin();
                assert!((lhs - ((n as f64 + 1.0) * theta).sin()).abs() < 1e-10);
            }
        }
    }
}
