//! Densities in the smoothed kernels `W_r` and their limit as `r → 0`.
//!
//! `W_r` is only accessed through the cap average `D_r`: with `U` the free
//! side, `t(G, W_r) = E_x Π_{v ∈ W} c_{d, deg v} D_r(x(N(v)))` for iid
//! uniform `x_u`. Inner estimates for distinct `W`-nodes use disjoint
//! stretches of the chunk's stream, so given `x` their product is unbiased
//! for `Π D_r`.

use serde::{Deserialize, Serialize};

use crate::closed_form::closed_form;
use crate::error::{Error, Result};
use crate::graph::{is_d_sparse, Graph};
use crate::mc::driver::{run, DrawReport, McConfig};
use crate::mc::estimators::variance_certified;
use crate::mc::{classify_finiteness, estimate_bipartite, DensityEstimate, Method};
use crate::spectral::cycle_density;
use crate::sphere::{ball_avg_inv_det_flat, orthogonalize_rows, s_constants_f64, sample_complement_into};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphonApproxConfig {
    pub radius: f64,
    pub outer_samples: u64,
    pub inner_samples: usize,
}

impl GraphonApproxConfig {
    pub fn new(radius: f64, outer_samples: u64, inner_samples: usize) -> Result<Self> {
        if !(radius > 0.0 && radius <= std::f64::consts::PI) {
            return Err(Error::domain(format!("radius {radius} outside (0, π]")));
        }
        if outer_samples == 0 || inner_samples == 0 {
            return Err(Error::domain("sample counts must be positive"));
        }
        Ok(GraphonApproxConfig { radius, outer_samples, inner_samples })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphonEstimate {
    pub estimate: DensityEstimate,
    pub radius: f64,
    pub inner_samples: usize,
    /// Largest observed `D_r(X) · Det(X)` over all inner evaluations.
    pub max_domination: f64,
    /// Mean over outer draws of `Σ_v (se_v / D_v)²`, the relative variance
    /// the inner estimates add to each outer term.
    pub inner_relative_variance: f64,
}

/// Free side: node 0's color class unless only the other certifies a finite variance.
fn sides(g: &Graph, d: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let (u, w) = g.bipartition().ok_or(Error::NotBipartite)?;
    Ok(if !variance_certified(g, d, &u) && variance_certified(g, d, &w) { (w, u) } else { (u, w) })
}

pub fn estimate_t_graphon(g: &Graph, d: usize, cfg: &GraphonApproxConfig, mc: &McConfig) -> Result<GraphonEstimate> {
    let (u, w) = sides(g, d)?;
    estimate_t_graphon_with_side(g, d, &u, &w, cfg, mc)
}

/// [`estimate_t_graphon`] with an explicit free side `u`.
pub fn estimate_t_graphon_with_side(
    g: &Graph,
    d: usize,
    u: &[usize],
    w: &[usize],
    cfg: &GraphonApproxConfig,
    mc: &McConfig,
) -> Result<GraphonEstimate> {
    let cfg = GraphonApproxConfig::new(cfg.radius, cfg.outer_samples, cfg.inner_samples)?;
    if d < 3 {
        return Err(Error::domain(format!("dimension d={d} must be at least 3")));
    }
    if let Some((a, b)) = is_d_sparse(g, d).witness {
        return Err(Error::NotSparse { d, a: a.len(), b: b.len() });
    }
    let n = g.node_count();
    let mut side = vec![0u8; n];
    u.iter().for_each(|&v| side[v] |= 1);
    w.iter().for_each(|&v| side[v] |= 2);
    if side.iter().any(|&s| s != 1 && s != 2) || g.edges().iter().any(|&(a, b)| side[a] == side[b]) {
        return Err(Error::NotBipartite);
    }
    let c = s_constants_f64(d)?;
    let run_cfg = McConfig { samples: cfg.outer_samples, ..*mc };
    let out = run(
        &run_cfg,
        3,
        false,
        || (vec![0.0; n * d], vec![0.0; d * d], vec![0.0; d * d]),
        |(xs, centers, scratch), rng, out| {
            for &v in u {
                sample_complement_into(&[], &mut xs[v * d..(v + 1) * d], rng);
            }
            let (mut value, mut rel_var, mut domination) = (1.0, 0.0, 0.0_f64);
            for &v in w {
                let nb = g.neighbors(v);
                let k = nb.len();
                if k < 2 {
                    continue;
                }
                for (i, &x) in nb.iter().enumerate() {
                    centers[i * d..(i + 1) * d].copy_from_slice(&xs[x * d..(x + 1) * d]);
                }
                let avg = ball_avg_inv_det_flat(&centers[..k * d], d, cfg.radius, cfg.inner_samples, &mut scratch[..k * d], rng);
                if avg.samples == 0 {
                    value = f64::INFINITY;
                    break;
                }
                value *= c[k] * avg.mean;
                rel_var += (avg.std_error / avg.mean).powi(2);
                let det = orthogonalize_rows(&mut centers[..k * d], k, d).det;
                domination = domination.max(avg.mean * det);
            }
            out.copy_from_slice(&[value, rel_var, domination]);
            Ok(DrawReport::default())
        },
    )?;
    let mut estimate = DensityEstimate::from_output(&out, Method::Graphon, classify_finiteness(g, d));
    if !variance_certified(g, d, u) {
        estimate.diagnostics.warnings.push("variance grows without bound as the radius shrinks".to_string());
    }
    Ok(GraphonEstimate {
        estimate,
        radius: cfg.radius,
        inner_samples: cfg.inner_samples,
        max_domination: out.components[2].max,
        inner_relative_variance: out.components[1].mean,
    })
}

/// Reference value for `t(G, d)` with its uncertainty and source.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reference {
    pub value: f64,
    pub error: f64,
    pub source: &'static str,
}

/// Best available reference: exact closed form, then a certified series,
/// then the direct bipartite estimator with `mc`.
/// Closed form or, for cycles, the spectral series. `None` when neither applies.
pub fn deterministic_reference(g: &Graph, d: usize) -> Option<Reference> {
    if let Ok(cf) = closed_form(g, d) {
        return Some(Reference { value: cf.value.to_f64(), error: 0.0, source: "closed_form" });
    }
    let k = g.node_count();
    let is_cycle = k >= 3 && g.edge_count() == k && g.components().len() == 1 && (0..k).all(|v| g.degree(v) == 2);
    if !is_cycle {
        return None;
    }
    cycle_density(d, k, 1e-8).ok().map(|s| Reference { value: s.value, error: s.tail_bound, source: "spectral" })
}

pub fn reference_value(g: &Graph, d: usize, mc: &McConfig) -> Result<Reference> {
    if let Some(r) = deterministic_reference(g, d) {
        return Ok(r);
    }
    let e = estimate_bipartite(g, d, mc)?;
    Ok(Reference { value: e.value, error: e.std_error, source: "bipartite_direct" })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub radius: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub mom_value: f64,
    pub deviation: f64,
    pub max_domination: f64,
    pub inner_relative_variance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub reference: Reference,
    pub rows: Vec<SweepRow>,
    /// Deviation at the smallest radius minus the allowance above the
    /// deviation at the largest radius; nonpositive passes.
    pub margin: f64,
    pub passed: bool,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,estimate,std_error,reference,deviation\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{},{}\n", r.radius, r.estimate, r.std_error, self.reference.value, r.deviation));
        }
        s
    }
}

/// Estimates `t(G, W_r)` for each radius and checks that the smallest
/// radius is no farther from the reference than the largest, up to four
/// combined standard errors.
pub fn convergence_sweep(
    g: &Graph,
    d: usize,
    radii: &[f64],
    outer_samples: u64,
    inner_samples: usize,
    mc: &McConfig,
) -> Result<SweepReport> {
    let verdict = classify_finiteness(g, d);
    if !verdict.is_finite() {
        return Err(Error::Refused(format!(
            "finiteness of t(G,{d}) is not proved (status {})",
            verdict.status.as_str()
        )));
    }
    if radii.is_empty() {
        return Err(Error::domain("no radii given"));
    }
    let reference = reference_value(g, d, &McConfig { samples: outer_samples, ..mc.derived(u64::MAX) })?;
    let mut rows = Vec::with_capacity(radii.len());
    for (i, &r) in radii.iter().enumerate() {
        let cfg = GraphonApproxConfig::new(r, outer_samples, inner_samples)?;
        let e = estimate_t_graphon(g, d, &cfg, &mc.derived(i as u64))?;
        rows.push(SweepRow {
            radius: r,
            estimate: e.estimate.value,
            std_error: e.estimate.std_error,
            mom_value: e.estimate.mom_value,
            deviation: (e.estimate.value - reference.value).abs(),
            max_domination: e.max_domination,
            inner_relative_variance: e.inner_relative_variance,
        });
    }
    let small = rows.iter().min_by(|a, b| a.radius.total_cmp(&b.radius)).expect("nonempty");
    let large = rows.iter().max_by(|a, b| a.radius.total_cmp(&b.radius)).expect("nonempty");
    let allowance = 4.0 * (small.std_error.powi(2) + large.std_error.powi(2)).sqrt() + 2.0 * reference.error;
    let margin = small.deviation - (large.deviation + allowance);
    Ok(SweepReport { reference, rows, margin, passed: margin <= 0.0 })
}
