use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;
use skinspec_core::capacitance::{frequency_of, zero_tolerance};
use skinspec_core::oracle;
use skinspec_core::spectral::shifted_det_curve;
use skinspec_core::{
    build_perturbed, chain_eigenpairs, decay_report, det_curve, dimer_coefficients, eig_curves,
    eigen_all, generalized_matrix, interface_localization_check, min_abs_det, mode_profile,
    pseudospectrum, subwavelength_frequencies, winding, Complex64, Eigenpair, Error, GridSpec,
    Klass, PerturbedDimerParams, ResonatorChain, TridiagonalMatrix,
};

use crate::config::{Model, RunConfig, DEFAULT_GRID_RESOLUTION};
use crate::error::{CliError, CliResult};
use crate::table::{finite_json, write_json, Cell, Format, Table};

pub struct Output {
    pub dir: PathBuf,
    pub format: Format,
}

impl Output {
    pub fn prepare(dir: &Path, format: Format) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
        })
    }

    fn table(&self, t: &Table, stem: &str) -> CliResult<()> {
        t.write(&self.dir, stem, self.format)
    }

    fn json(&self, name: &str, value: &serde_json::Value) -> CliResult<()> {
        write_json(&self.dir.join(name), value)
    }
}

fn klass_name(k: &Klass) -> &'static str {
    if k.is_bulk() {
        "bulk"
    } else {
        "exceptional"
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn chain_modes(chain: &ResonatorChain) -> CliResult<Vec<Eigenpair>> {
    chain_eigenpairs(chain).map_err(|e| match e {
        Error::InvalidArgument(msg) => CliError::Unsupported(format!(
            "closed-form modes need a dimer or single-interface chain with equal lengths ({msg})"
        )),
        other => other.into(),
    })
}

pub fn spectrum(cfg: &RunConfig, out: &Output) -> CliResult<()> {
    match &cfg.model {
        Model::Matrix { params, n } => {
            let mut t = Table::new(&["index", "lambda", "mu", "klass", "theta"]);
            for (i, e) in eigen_all(params, *n)?.iter().enumerate() {
                t.push(vec![
                    i.into(),
                    e.lambda.into(),
                    e.mu.into(),
                    klass_name(&e.klass).into(),
                    e.klass.theta().into(),
                ]);
            }
            out.table(&t, "spectrum")
        }
        Model::Chain(chain) => {
            let m = generalized_matrix(chain)?;
            let tol = zero_tolerance(&m);
            let mut t = Table::new(&["index", "lambda", "mu", "klass", "theta", "omega"]);
            match chain_eigenpairs(chain) {
                Ok(pairs) => {
                    for (i, e) in pairs.iter().enumerate() {
                        t.push(vec![
                            i.into(),
                            e.lambda.into(),
                            e.mu.into(),
                            klass_name(&e.klass).into(),
                            e.klass.theta().into(),
                            frequency_of(chain, e.lambda, tol).into(),
                        ]);
                    }
                }
                Err(Error::InvalidArgument(_)) => {
                    let f = subwavelength_frequencies(chain)?;
                    for (i, l) in f.lambdas.iter().enumerate() {
                        t.push(vec![
                            i.into(),
                            (*l).into(),
                            Cell::Empty,
                            "unclassified".into(),
                            Cell::Empty,
                            frequency_of(chain, *l, tol).into(),
                        ]);
                    }
                }
                Err(e) => return Err(e.into()),
            }
            out.table(&t, "spectrum")
        }
    }
}

/// One entry of `decay.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub index: usize,
    pub lambda: f64,
    pub klass: String,
    pub method: String,
    pub residual: f64,
    #[serde(flatten)]
    pub decay: DecaySummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecaySummary {
    Interface {
        peak_index: usize,
        peak_distance: usize,
        left_rate_fit: Option<f64>,
        right_rate_fit: Option<f64>,
        rate_theory: f64,
        bound_constant: Option<f64>,
        satisfied: bool,
        localized: bool,
    },
    Edge {
        rate_fit: Option<f64>,
        rate_theory: f64,
        bound_constant: Option<f64>,
        satisfied: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFile {
    pub model: String,
    pub reports: Vec<ModeReport>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn method_name(e: &Eigenpair) -> String {
    serde_json::to_value(e.method)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Decay diagnostics of a chain mode.
enum ChainDecay {
    Edge(PerturbedDimerParams),
    Interface { m: usize, gamma_ell: f64 },
}

fn chain_decay(chain: &ResonatorChain) -> CliResult<ChainDecay> {
    let n = chain.len();
    let flips: Vec<usize> = (1..n)
        .filter(|&i| (chain.gammas[i] > 0.0) != (chain.gammas[i - 1] > 0.0))
        .collect();
    match flips.as_slice() {
        [] => Ok(ChainDecay::Edge(dimer_coefficients(chain)?)),
        [m] if 2 * m == n => Ok(ChainDecay::Interface {
            m: *m,
            gamma_ell: chain.gammas[*m].abs() * chain.lengths[*m],
        }),
        _ => Err(CliError::Unsupported(
            "decay diagnostics need a dimer chain or an interface in the middle".into(),
        )),
    }
}

fn edge_summary(v: &[f64], p: &PerturbedDimerParams) -> CliResult<DecaySummary> {
    let r = decay_report(v, p)?;
    Ok(DecaySummary::Edge {
        rate_fit: finite(r.rate_fit),
        rate_theory: r.rate_theory,
        bound_constant: finite(r.bound_constant),
        satisfied: r.satisfied,
    })
}

fn mode_rows(t: &mut Table, index: usize, e: &Eigenpair) {
    for (j, x) in e.vector.iter().enumerate() {
        t.push(vec![index.into(), e.lambda.into(), j.into(), (*x).into()]);
    }
}

fn report(index: usize, e: &Eigenpair, m: &TridiagonalMatrix, decay: DecaySummary) -> ModeReport {
    ModeReport {
        index,
        lambda: e.lambda,
        klass: klass_name(&e.klass).into(),
        method: method_name(e),
        residual: m.residual_inf(&e.vector, e.lambda) / sup(&e.vector),
        decay,
    }
}

pub fn modes(cfg: &RunConfig, out: &Output) -> CliResult<()> {
    let mut modes = Table::new(&["mode", "lambda", "site", "value"]);
    let mut reports = Vec::new();
    let model = match &cfg.model {
        Model::Matrix { params, n } => {
            let m = build_perturbed(params, *n)?;
            for (i, e) in eigen_all(params, *n)?.iter().enumerate() {
                mode_rows(&mut modes, i, e);
                reports.push(report(i, e, &m, edge_summary(&e.vector, params)?));
            }
            "matrix"
        }
        Model::Chain(chain) => {
            let decay = chain_decay(chain)?;
            let pairs = chain_modes(chain)?;
            let m = generalized_matrix(chain)?;
            let mut profiles = Table::new(&["mode", "x", "value", "resonator"]);
            for (i, e) in pairs.iter().enumerate() {
                mode_rows(&mut modes, i, e);
                let summary = match &decay {
                    ChainDecay::Edge(p) => edge_summary(&e.vector, p)?,
                    ChainDecay::Interface { m, gamma_ell } => {
                        let r = interface_localization_check(&e.vector, *m, *gamma_ell)?;
                        DecaySummary::Interface {
                            peak_index: r.peak_index,
                            peak_distance: r.peak_distance,
                            left_rate_fit: finite(r.left_rate_fit),
                            right_rate_fit: finite(r.right_rate_fit),
                            rate_theory: r.rate_theory,
                            bound_constant: finite(r.bound_constant),
                            satisfied: r.satisfied,
                            localized: r.localized,
                        }
                    }
                };
                reports.push(report(i, e, &m, summary));
                let prof = mode_profile(chain, &e.vector, cfg.samples_per_gap)?;
                for ((x, v), r) in prof.xs.iter().zip(&prof.values).zip(&prof.resonator_index_map) {
                    profiles.push(vec![i.into(), (*x).into(), (*v).into(), (*r).into()]);
                }
            }
            out.table(&profiles, "profiles")?;
            match decay {
                ChainDecay::Edge(_) => "chain",
                ChainDecay::Interface { .. } => "interface",
            }
        }
    };
    out.table(&modes, "modes")?;
    let file = DecayFile {
        model: model.into(),
        reports,
    };
    out.json("decay.json", &serde_json::to_value(&file).expect("reports serialise"))
}

/// Symbol coefficients, finite matrix and its eigenvalues for the topology run.
fn topology_inputs(model: &Model) -> CliResult<(PerturbedDimerParams, TridiagonalMatrix, Vec<f64>)> {
    match model {
        Model::Matrix { params, n } => {
            let m = build_perturbed(params, *n)?;
            let ev = oracle::eigenvalues(&m)?;
            Ok((*params, m, ev))
        }
        Model::Chain(chain) => {
            let ell = chain.lengths[0];
            let p = dimer_coefficients(chain).map_err(|e| {
                CliError::Unsupported(format!("topology needs a dimer chain ({e})"))
            })?;
            let scaled = PerturbedDimerParams::new(
                p.alpha1 / ell,
                p.alpha2 / ell,
                p.beta1 / ell,
                p.beta2 / ell,
                p.gamma1 / ell,
                p.gamma2 / ell,
                p.a / ell,
                p.b / ell,
            );
            let m = generalized_matrix(chain)?;
            let ev = oracle::eigenvalues(&m)?;
            Ok((scaled, m, ev))
        }
    }
}

/// Winding number, `None` when the point lies on the curve; sampling
/// failures are errors.
fn winding_or_undefined(w: skinspec_core::Result<i64>) -> CliResult<Option<i64>> {
    match w {
        Ok(w) => Ok(Some(w)),
        Err(Error::PointOnCurve { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn winding_cell(w: Option<i64>) -> Cell {
    w.map_or(Cell::Text("undefined".into()), Cell::Int)
}

pub fn topology(cfg: &RunConfig, out: &Output) -> CliResult<()> {
    let (params, matrix, eigenvalues) = topology_inputs(&cfg.model)?;
    let samples = cfg.samples;

    let det = det_curve(&params, samples)?;
    let mut t = Table::new(&["theta", "re", "im"]);
    for (th, z) in det.thetas.iter().zip(&det.points) {
        t.push(vec![(*th).into(), z.re.into(), z.im.into()]);
    }
    out.table(&t, "det_curve")?;

    let curves = eig_curves(&params, samples)?;
    let mut t = Table::new(&["branch", "theta", "re", "im"]);
    for (b, branch) in curves.branches.iter().enumerate() {
        for (th, z) in branch.thetas.iter().zip(&branch.points) {
            t.push(vec![b.into(), (*th).into(), z.re.into(), z.im.into()]);
        }
    }
    out.table(&t, "eig_curves")?;

    let mut t = Table::new(&["lambda", "winding_det", "winding_eig"]);
    for &l in &eigenvalues {
        let z = Complex64::new(l, 0.0);
        let wd = winding_or_undefined(
            shifted_det_curve(&params, z, samples).and_then(|c| winding(&c, Complex64::new(0.0, 0.0))),
        )?;
        let we = winding_or_undefined(curves.winding(z))?;
        t.push(vec![l.into(), winding_cell(wd), winding_cell(we)]);
    }
    out.table(&t, "winding")?;

    let grid = match cfg.grid {
        Some(g) => g,
        None => {
            let pts = curves
                .branches
                .iter()
                .flat_map(|b| b.points.iter().copied())
                .chain(eigenvalues.iter().map(|l| Complex64::new(*l, 0.0)));
            GridSpec::enclosing(pts, 0.1, DEFAULT_GRID_RESOLUTION, DEFAULT_GRID_RESOLUTION)?
        }
    };
    let ps = pseudospectrum(&matrix, &grid)?;
    let mut t = Table::new(&["re", "im", "sigma_min"]);
    for (j, row) in ps.sigma_min.iter().enumerate() {
        for (i, s) in row.iter().enumerate() {
            let z = grid.center(i, j);
            t.push(vec![z.re.into(), z.im.into(), (*s).into()]);
        }
    }
    out.table(&t, "pseudospectrum")?;

    let levels: Vec<Vec<Vec<bool>>> = cfg.eps.iter().map(|e| ps.sublevel(*e)).collect();
    let nested = levels.windows(2).all(|w| {
        w[1].iter()
            .flatten()
            .zip(w[0].iter().flatten())
            .all(|(small, large)| !*small || *large)
    });
    let count = |set: &Vec<Vec<bool>>| set.iter().flatten().filter(|x| **x).count();
    let sublevels: Vec<_> = cfg
        .eps
        .iter()
        .zip(&levels)
        .map(|(e, set)| json!({"eps": e, "cells": count(set)}))
        .collect();

    let wg = skinspec_core::spectral::winding_grid(&curves, &grid)?;
    let region = wg.iter().flatten().filter(|w| matches!(w, Some(w) if *w != 0)).count();
    let undefined = wg.iter().flatten().filter(|w| w.is_none()).count();
    let inside = eigenvalues
        .iter()
        .filter(|l| match grid.cell_of(Complex64::new(**l, 0.0)) {
            Some((i, j)) => matches!(wg[j][i], Some(w) if w != 0),
            None => false,
        })
        .count();

    let (theta_min, det_min) = min_abs_det(&params, samples)?;
    let det_at_zero = winding_or_undefined(winding(&det, Complex64::new(0.0, 0.0)))?;
    let summary = json!({
        "samples": samples,
        "grid": grid,
        "min_abs_det": {"theta": finite_json(theta_min), "value": finite_json(det_min)},
        "det_winding_at_zero": det_at_zero,
        "eig_curves_swapped": curves.swapped,
        "eps": cfg.eps,
        "sublevels": sublevels,
        "nested": nested,
        "winding_region_cells": region,
        "winding_undefined_cells": undefined,
        "eigenvalue_count": eigenvalues.len(),
        "eigenvalues_in_winding_region": inside,
    });
    out.json("topology.json", &summary)
}
