//! Sequential importance, direct bipartite and angle-space estimators.

use std::f64::consts::PI;

use rand::Rng;

use super::driver::{run, DrawReport, McConfig, McOutput};
use super::finiteness::classify_finiteness;
use super::{DensityEstimate, Method};
use crate::error::{Error, Result};
use crate::graph::{is_d_sparse, Graph, NodeOrdering};
use crate::sampler::SequentialSampler;
use crate::sphere::{orthogonalize_rows, s_constants_f64, sample_complement_into, SINGULAR_TOL};

/// A functional of a configuration given as `n * d` row-major coordinates.
pub type Functional<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// Runs the sequential sampler and averages `f_p`, followed by `f_p · h`
/// for each extra functional `h`.
pub(crate) fn sequential_run(
    g: &Graph,
    d: usize,
    p: &NodeOrdering,
    cfg: &McConfig,
    extra: &[Functional<'_>],
) -> Result<McOutput> {
    let sampler = SequentialSampler::new(g, d, p)?;
    run(cfg, 1 + extra.len(), false, || sampler.workspace(), |ws, rng, out| {
        let stats = sampler.draw_into(ws, rng)?;
        let w = stats.log_weight.exp();
        out[0] = w;
        for (o, h) in out[1..].iter_mut().zip(extra) {
            *o = w * h(&ws.vectors);
        }
        Ok(DrawReport { retries: stats.retries })
    })
}

/// Mean of the order-`p` importance weight over sequential draws.
pub fn estimate_sequential(g: &Graph, d: usize, p: &NodeOrdering, cfg: &McConfig) -> Result<DensityEstimate> {
    let out = sequential_run(g, d, p, cfg, &[])?;
    let mut est = DensityEstimate::from_output(&out, Method::SequentialImportance, classify_finiteness(g, d));
    if out.retries as f64 > 1e-4 * out.samples as f64 {
        est.diagnostics.warnings.push(format!("{} singular redraws over {} samples", out.retries, out.samples));
    }
    Ok(est)
}

/// Whether the squared bipartite integrand is integrable with `side` as
/// the free side: `Σ_{v ∈ N(u)} 2/(d - deg v + 1) < 1` for every `u` on
/// `side` and `deg v < d - 1` for every other node.
pub fn variance_certified(g: &Graph, d: usize, side: &[usize]) -> bool {
    side.iter().all(|&u| {
        let mut sum = 0.0;
        for &v in g.neighbors(u) {
            let deg = g.degree(v);
            if deg + 1 >= d {
                return false;
            }
            sum += 2.0 / (d - deg + 1) as f64;
        }
        sum < 1.0 - 1e-12
    })
}

/// Direct estimator over iid uniform vectors on one side of a bipartite graph.
///
/// The free side is the one holding node 0's component representative,
/// unless only the opposite side certifies a finite variance.
pub fn estimate_bipartite(g: &Graph, d: usize, cfg: &McConfig) -> Result<DensityEstimate> {
    let (u, w) = g.bipartition().ok_or(Error::NotBipartite)?;
    let (u, w) = if !variance_certified(g, d, &u) && variance_certified(g, d, &w) { (w, u) } else { (u, w) };
    estimate_bipartite_with_side(g, d, &u, &w, cfg)
}

/// [`estimate_bipartite`] with an explicit free side `u` and product side `w`.
pub fn estimate_bipartite_with_side(g: &Graph, d: usize, u: &[usize], w: &[usize], cfg: &McConfig) -> Result<DensityEstimate> {
    if d < 3 {
        return Err(Error::domain(format!("dimension d={d} must be at least 3")));
    }
    if let Some((a, b)) = is_d_sparse(g, d).witness {
        return Err(Error::NotSparse { d, a: a.len(), b: b.len() });
    }
    let n = g.node_count();
    let mut seen = vec![0u8; n];
    u.iter().for_each(|&v| seen[v] |= 1);
    w.iter().for_each(|&v| seen[v] |= 2);
    if seen.iter().any(|&s| s != 1 && s != 2) || g.edges().iter().any(|&(a, b)| seen[a] == seen[b]) {
        return Err(Error::NotBipartite);
    }
    let c = s_constants_f64(d)?;
    let out = run(
        cfg,
        1,
        false,
        || (vec![0.0; n * d], vec![0.0; d * d]),
        |(xs, rows), rng, out| {
            for &v in u {
                let ok = sample_complement_into(&[], &mut xs[v * d..(v + 1) * d], rng);
                debug_assert!(ok);
            }
            let mut value = 1.0;
            for &v in w {
                let nb = g.neighbors(v);
                let k = nb.len();
                if k < 2 {
                    continue;
                }
                for (i, &x) in nb.iter().enumerate() {
                    rows[i * d..(i + 1) * d].copy_from_slice(&xs[x * d..(x + 1) * d]);
                }
                let f = orthogonalize_rows(&mut rows[..k * d], k, d);
                if f.min_factor <= SINGULAR_TOL {
                    value = f64::INFINITY;
                    break;
                }
                value *= c[k] / f.det;
            }
            out[0] = value;
            Ok(DrawReport::default())
        },
    )?;
    let mut est = DensityEstimate::from_output(&out, Method::BipartiteDirect, classify_finiteness(g, d));
    if !variance_certified(g, d, u) {
        est.diagnostics
            .warnings
            .push("finite variance is not certified; prefer the median-of-means value".to_string());
    }
    Ok(est)
}

/// `(2/π) / sin γ` where `cos γ = cos α cos β − sin α sin β cos θ`.
pub fn angle_integrand(alpha: f64, beta: f64, theta: f64) -> f64 {
    let c = alpha.cos() * beta.cos() - alpha.sin() * beta.sin() * theta.cos();
    let s2 = (1.0 - c) * (1.0 + c);
    if s2 <= 0.0 {
        f64::INFINITY
    } else {
        2.0 / (PI * s2.sqrt())
    }
}

/// Monte Carlo over three angles uniform in `[0, π]` for the six-cycle in
/// three dimensions.
pub fn estimate_c6_angle_space(cfg: &McConfig) -> Result<DensityEstimate> {
    let out = run(cfg, 1, false, || (), |_, rng, out| {
        let a = rng.random::<f64>() * PI;
        let b = rng.random::<f64>() * PI;
        let t = rng.random::<f64>() * PI;
        out[0] = angle_integrand(a, b, t);
        Ok(DrawReport::default())
    })?;
    let g = crate::graph::cycle(6)?;
    Ok(DensityEstimate::from_output(&out, Method::AngleSpace, classify_finiteness(&g, 3)))
}
