//! Small dense-vector helpers shared across modules.

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Index of the entry of largest magnitude (first one on ties).
pub fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

/// Scales `v` to unit sup-norm with its largest entry positive.
/// Returns `None` for zero or non-finite input.
pub fn normalize_sup(v: &mut [f64]) -> Option<()> {
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let i = argmax_abs(v);
    let pivot = v[i];
    if pivot == 0.0 {
        return None;
    }
    for x in v.iter_mut() {
        *x /= pivot;
    }
    Some(())
}

/// `min_± ‖a ∓ b‖_∞`, the distance between two vectors up to sign.
pub fn dist_up_to_sign(a: &[f64], b: &[f64]) -> f64 {
    let plus = a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()));
    let minus = a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x + y).abs()));
    plus.min(minus)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn reversed(v: &[f64]) -> Vec<f64> {
    v.iter().rev().copied().collect()
}
