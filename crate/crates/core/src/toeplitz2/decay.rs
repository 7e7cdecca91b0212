use serde::{Deserialize, Serialize};

use super::PerturbedDimerParams;
use crate::error::{Error, Result};
use crate::vecops::{argmax_abs, sup_norm};

/// Largest bound constant `M` still counted as satisfying the decay estimate
/// for a unit sup-norm vector.
pub const DEFAULT_BOUND_LIMIT: f64 = 1e2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// Slope of the log-envelope of even-index entries per dimer.
    pub rate_fit: f64,
    /// `ln s`.
    pub rate_theory: f64,
    /// Smallest `M` with `|v_j| ≤ M·j·s^⌊(j−1)/2⌋` for the unit sup-norm vector.
    pub bound_constant: f64,
    pub satisfied: bool,
}

/// Two-sided decay away from an interface between sites `m` and `m+1`
/// (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceReport {
    /// 1-based index of the largest entry.
    pub peak_index: usize,
    /// Sites between the peak and the interface bond.
    pub peak_distance: usize,
    /// Slope of the log-envelope per site left of the interface (expected `+γℓ/2`).
    pub left_rate_fit: f64,
    /// Slope right of the interface (expected `−γℓ/2`).
    pub right_rate_fit: f64,
    /// `γℓ/2`.
    pub rate_theory: f64,
    /// Smallest `M` with `|v_j| ≤ M·|m−j|·e^{−γℓ|m−j|/2}` for `j ≠ m`.
    pub bound_constant: f64,
    pub satisfied: bool,
    /// `satisfied` and the peak lies within two sites of the interface.
    pub localized: bool,
}

fn check_vector(vector: &[f64]) -> Result<f64> {
    if vector.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("vector has non-finite entries"));
    }
    let top = sup_norm(vector);
    if top == 0.0 {
        return Err(Error::invalid("vector is zero"));
    }
    Ok(top)
}

/// Least-squares slope of `ys` against `xs`; NaN with fewer than two points.
fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Running maximum of `|v|`, taken from the far end so that the envelope is
/// monotone in the decay direction.
fn envelope(v: &[f64], from_right: bool) -> Vec<f64> {
    let mut env = vec![0.0; v.len()];
    let mut run = 0.0f64;
    if from_right {
        for i in (0..v.len()).rev() {
            run = run.max(v[i].abs());
            env[i] = run;
        }
    } else {
        for i in 0..v.len() {
            run = run.max(v[i].abs());
            env[i] = run;
        }
    }
    env
}

pub fn decay_report(vector: &[f64], params: &PerturbedDimerParams) -> Result<DecayReport> {
    decay_report_with_limit(vector, params, DEFAULT_BOUND_LIMIT)
}

pub fn decay_report_with_limit(
    vector: &[f64],
    params: &PerturbedDimerParams,
    limit: f64,
) -> Result<DecayReport> {
    let top = check_vector(vector)?;
    let s = params.s();
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Inadmissible(format!("decay factor s = {s}")));
    }
    let ln_s = s.ln();
    let n = vector.len();

    let bound_log = vector
        .iter()
        .enumerate()
        .filter(|(_, x)| **x != 0.0)
        .map(|(i, x)| {
            let j = i + 1;
            (x.abs() / top).ln() - (j as f64).ln() - ((j - 1) / 2) as f64 * ln_s
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let bound_constant = bound_log.exp();

    let env = envelope(vector, ln_s <= 0.0);
    let even_points = |lo: usize, hi: usize| -> Vec<(f64, f64)> {
        (lo..=hi)
            .filter(|j| j % 2 == 0 && env[j - 1] > 0.0)
            .map(|j| ((j / 2) as f64, (env[j - 1] / top).ln()))
            .collect()
    };
    let mut points = if n >= 6 { even_points(3, n - 3) } else { Vec::new() };
    if points.len() < 2 {
        points = even_points(1, n);
    }

    Ok(DecayReport {
        rate_fit: slope(&points),
        rate_theory: ln_s,
        bound_constant,
        satisfied: bound_constant <= limit,
    })
}

pub fn interface_localization_check(vector: &[f64], m: usize, gamma_ell: f64) -> Result<InterfaceReport> {
    interface_localization_check_with_limit(vector, m, gamma_ell, DEFAULT_BOUND_LIMIT)
}

/// `m` is the number of sites left of the interface; the vector must have
/// length `2m`.
pub fn interface_localization_check_with_limit(
    vector: &[f64],
    m: usize,
    gamma_ell: f64,
    limit: f64,
) -> Result<InterfaceReport> {
    let top = check_vector(vector)?;
    let n = vector.len();
    if m == 0 || n != 2 * m {
        return Err(Error::invalid(format!(
            "vector length {n} does not match an interface at site {m} (expected {})",
            2 * m
        )));
    }
    let rate = 0.5 * gamma_ell.abs();

    let bound_log = vector
        .iter()
        .enumerate()
        .filter(|(i, x)| i + 1 != m && **x != 0.0)
        .map(|(i, x)| {
            let d = (i + 1).abs_diff(m) as f64;
            (x.abs() / top).ln() - d.ln() + rate * d
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let bound_constant = bound_log.exp();

    let (left, right) = vector.split_at(m);
    let left_env = envelope(left, false);
    let right_env = envelope(right, true);
    let fit = |env: &[f64], offset: usize, lo: usize, hi: usize| {
        let pts: Vec<(f64, f64)> = (lo..=hi)
            .filter(|&j| j > offset && j - offset <= env.len() && env[j - offset - 1] > 0.0)
            .map(|j| (j as f64, (env[j - offset - 1] / top).ln()))
            .collect();
        slope(&pts)
    };
    let left_rate_fit = fit(&left_env, 0, 3, m.saturating_sub(2));
    let right_rate_fit = fit(&right_env, m, m + 2, n.saturating_sub(3));

    let peak_index = argmax_abs(vector) + 1;
    let peak_distance = if peak_index <= m {
        m - peak_index
    } else {
        peak_index - (m + 1)
    };
    let satisfied = bound_constant <= limit;
    Ok(InterfaceReport {
        peak_index,
        peak_distance,
        left_rate_fit,
        right_rate_fit,
        rate_theory: rate,
        bound_constant,
        satisfied,
        localized: satisfied && peak_distance <= 2,
    })
}
