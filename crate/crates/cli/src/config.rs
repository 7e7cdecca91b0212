//! JSON run configuration.

use std::path::Path;

use serde::Deserialize;
use skinspec_core::capacitance::DEFAULT_DELTA;
use skinspec_core::spectral::{DEFAULT_SAMPLES, MIN_SAMPLES};
use skinspec_core::{GridSpec, PerturbedDimerParams, ResonatorChain};

use crate::error::{CliError, CliResult};

pub const DEFAULT_EPS: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
pub const DEFAULT_GRID_RESOLUTION: usize = 200;
pub const DEFAULT_SAMPLES_PER_GAP: usize = 8;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Reals {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<String>,
    alpha1: Option<f64>,
    alpha2: Option<f64>,
    beta1: Option<f64>,
    beta2: Option<f64>,
    gamma1: Option<f64>,
    gamma2: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    n: Option<usize>,
    #[serde(rename = "N")]
    resonators: Option<usize>,
    ell: Option<Reals>,
    spacings: Option<Vec<f64>>,
    gamma: Option<Reals>,
    delta: Option<f64>,
    v: Option<f64>,
    v_b: Option<f64>,
    samples: Option<usize>,
    grid: Option<[f64; 6]>,
    eps: Option<Vec<f64>>,
    samples_per_gap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Matrix { params: PerturbedDimerParams, n: usize },
    Chain(ResonatorChain),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub samples: usize,
    pub grid: Option<GridSpec>,
    pub eps: Vec<f64>,
    pub samples_per_gap: usize,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub samples: Option<usize>,
    pub grid: Option<String>,
    pub eps: Option<String>,
}

fn finite(name: &str, x: f64) -> CliResult<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::config(format!("{name} must be finite")))
    }
}

fn positive(name: &str, x: f64) -> CliResult<f64> {
    if finite(name, x)? > 0.0 {
        Ok(x)
    } else {
        Err(CliError::config(format!("{name} must be positive, got {x}")))
    }
}

fn per_site(name: &str, value: &Reals, len: usize) -> CliResult<Vec<f64>> {
    let out = match value {
        Reals::One(x) => vec![*x; len],
        Reals::Many(xs) if xs.len() == len => xs.clone(),
        Reals::Many(xs) => {
            return Err(CliError::config(format!(
                "{name} has {} entries, expected 1 or {len}",
                xs.len()
            )))
        }
    };
    for x in &out {
        finite(name, *x)?;
    }
    Ok(out)
}

pub fn parse_grid(text: &str) -> CliResult<GridSpec> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(CliError::config(format!(
            "grid needs re0,re1,im0,im1,nx,ny, got '{text}'"
        )));
    }
    let mut reals = [0.0; 4];
    for (slot, part) in reals.iter_mut().zip(&parts[..4]) {
        *slot = part
            .parse()
            .map_err(|_| CliError::config(format!("bad grid coordinate '{part}'")))?;
    }
    let count = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| CliError::config(format!("bad grid resolution '{s}'")))
    };
    grid_from(reals, count(parts[4])?, count(parts[5])?)
}

fn grid_from(r: [f64; 4], nx: usize, ny: usize) -> CliResult<GridSpec> {
    let g = GridSpec {
        re0: r[0],
        re1: r[1],
        im0: r[2],
        im1: r[3],
        nx,
        ny,
    };
    g.validate().map_err(|e| CliError::config(e.to_string()))?;
    Ok(g)
}

pub fn parse_eps(text: &str) -> CliResult<Vec<f64>> {
    let eps = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("bad epsilon '{s}'")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    check_eps(eps)
}

fn check_eps(mut eps: Vec<f64>) -> CliResult<Vec<f64>> {
    if eps.is_empty() {
        return Err(CliError::config("epsilon list is empty"));
    }
    for e in &eps {
        positive("epsilon", *e)?;
    }
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    Ok(eps)
}

fn matrix_model(raw: &RawConfig) -> CliResult<Model> {
    let need = |name: &str, x: Option<f64>| {
        x.ok_or_else(|| CliError::config(format!("matrix config is missing '{name}'")))
            .and_then(|x| finite(name, x))
    };
    let params = PerturbedDimerParams::new(
        need("alpha1", raw.alpha1)?,
        need("alpha2", raw.alpha2)?,
        need("beta1", raw.beta1)?,
        need("beta2", raw.beta2)?,
        need("gamma1", raw.gamma1)?,
        need("gamma2", raw.gamma2)?,
        raw.a.map_or(Ok(0.0), |x| finite("a", x))?,
        raw.b.map_or(Ok(0.0), |x| finite("b", x))?,
    );
    params.validate().map_err(|e| CliError::config(e.to_string()))?;
    let n = raw
        .n
        .ok_or_else(|| CliError::config("matrix config is missing 'n'"))?;
    if n < 2 {
        return Err(CliError::config(format!("n must be at least 2, got {n}")));
    }
    Ok(Model::Matrix { params, n })
}

fn chain_model(raw: &RawConfig, interface: bool) -> CliResult<Model> {
    let n = raw
        .resonators
        .ok_or_else(|| CliError::config("chain config is missing 'N'"))?;
    if n < 2 {
        return Err(CliError::config(format!("N must be at least 2, got {n}")));
    }
    let lengths = per_site(
        "ell",
        raw.ell
            .as_ref()
            .ok_or_else(|| CliError::config("chain config is missing 'ell'"))?,
        n,
    )?;
    let pattern = raw
        .spacings
        .as_ref()
        .ok_or_else(|| CliError::config("chain config is missing 'spacings'"))?;
    let spacings: Vec<f64> = match pattern.len() {
        len if len == n - 1 => pattern.clone(),
        1 | 2 => (0..n - 1).map(|i| pattern[i % pattern.len()]).collect(),
        len => {
            return Err(CliError::config(format!(
                "spacings has {len} entries, expected 1, 2 (periodic pattern) or {}",
                n - 1
            )))
        }
    };
    let gamma = raw
        .gamma
        .as_ref()
        .ok_or_else(|| CliError::config("chain config is missing 'gamma'"))?;
    let gammas = match (interface, gamma) {
        (true, Reals::One(g)) => {
            if n % 2 == 1 {
                return Err(CliError::config(format!("interface chain needs even N, got {n}")));
            }
            let g = positive("gamma", *g)?;
            (0..n).map(|i| if i < n / 2 { -g } else { g }).collect()
        }
        _ => per_site("gamma", gamma, n)?,
    };
    let chain = ResonatorChain::new(
        lengths,
        spacings,
        gammas,
        positive("delta", raw.delta.unwrap_or(DEFAULT_DELTA))?,
        positive("v", raw.v.unwrap_or(1.0))?,
        positive("v_b", raw.v_b.unwrap_or(1.0))?,
    )
    .map_err(|e| CliError::config(e.to_string()))?;
    Ok(Model::Chain(chain))
}

impl RunConfig {
    pub fn from_json(text: &str, overrides: &Overrides) -> CliResult<Self> {
        if text.trim().is_empty() {
            return Err(CliError::config("config is empty"));
        }
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        let has_matrix = [raw.alpha1, raw.alpha2, raw.beta1, raw.beta2, raw.gamma1, raw.gamma2, raw.a, raw.b]
            .iter()
            .any(Option::is_some)
            || raw.n.is_some();
        let has_chain = raw.resonators.is_some()
            || raw.ell.is_some()
            || raw.spacings.is_some()
            || raw.gamma.is_some();
        let model = match (raw.mode.as_deref(), has_matrix, has_chain) {
            (_, true, true) => {
                return Err(CliError::config("config mixes matrix and chain keys"));
            }
            (None | Some("matrix"), true, false) => matrix_model(&raw)?,
            (None | Some("chain"), false, true) => chain_model(&raw, false)?,
            (Some("interface"), false, true) => chain_model(&raw, true)?,
            (Some(m @ ("matrix" | "chain" | "interface")), _, _) => {
                return Err(CliError::config(format!("config has no keys for mode '{m}'")));
            }
            (Some(other), _, _) => {
                return Err(CliError::config(format!(
                    "unknown mode '{other}' (expected matrix, chain or interface)"
                )));
            }
            (None, false, false) => {
                return Err(CliError::config("config specifies neither a matrix nor a chain"));
            }
        };

        let samples = overrides.samples.or(raw.samples).unwrap_or(DEFAULT_SAMPLES);
        if samples < MIN_SAMPLES {
            return Err(CliError::config(format!(
                "samples must be at least {MIN_SAMPLES}, got {samples}"
            )));
        }
        let grid = match (&overrides.grid, raw.grid) {
            (Some(text), _) => Some(parse_grid(text)?),
            (None, Some(g)) => {
                let count = |x: f64, name: &str| {
                    if x.fract() == 0.0 && (1.0..1e7).contains(&x) {
                        Ok(x as usize)
                    } else {
                        Err(CliError::config(format!("grid {name} must be a positive integer")))
                    }
                };
                Some(grid_from([g[0], g[1], g[2], g[3]], count(g[4], "nx")?, count(g[5], "ny")?)?)
            }
            (None, None) => None,
        };
        let eps = match (&overrides.eps, raw.eps) {
            (Some(text), _) => parse_eps(text)?,
            (None, Some(list)) => check_eps(list)?,
            (None, None) => DEFAULT_EPS.to_vec(),
        };
        let samples_per_gap = raw.samples_per_gap.unwrap_or(DEFAULT_SAMPLES_PER_GAP);
        if samples_per_gap == 0 {
            return Err(CliError::config("samples_per_gap must be positive"));
        }
        Ok(Self {
            model,
            samples,
            grid,
            eps,
            samples_per_gap,
        })
    }

    pub fn load(path: &Path, overrides: &Overrides) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, overrides)
    }
}
