//! Statistical self-checks: order independence, conditional factorization
//! and the determinant moment oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::driver::{run, DrawReport, McConfig};
use super::estimators::{sequential_run, Functional};
use super::{DensityEstimate, Method};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeOrdering};
use crate::mc::finiteness::classify_finiteness;
use crate::sampler::ConditionalSampler;
use crate::sphere::{det_moment, dot, orthogonalize_rows, sample_complement_into, Moment, UnitVector, SINGULAR_TOL};
use crate::stats::z_score;

/// Pass threshold on absolute z-scores.
pub const Z_PASS: f64 = 4.0;

#[derive(Clone, Debug, Serialize)]
pub struct PairScore {
    pub first: usize,
    pub second: usize,
    pub quantity: &'static str,
    pub z: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub orderings: Vec<NodeOrdering>,
    pub estimates: Vec<DensityEstimate>,
    /// Mean and standard error of `f_p · h` per ordering, when a test
    /// functional exists.
    pub functional: Vec<(f64, f64)>,
    pub scores: Vec<PairScore>,
    pub max_z: f64,
    pub passed: bool,
}

/// The default ordering followed by `random` seeded random permutations.
pub fn standard_orderings(g: &Graph, random: usize, seed: u64) -> Vec<NodeOrdering> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::once(NodeOrdering::default_for(g))
        .chain((0..random).map(|_| NodeOrdering::random(g.node_count(), &mut rng)))
        .collect()
}

/// Compares sequential estimates across orderings, on the total mass and on
/// the indicator that node 0 and its first non-neighbor are within 60°.
pub fn order_independence_test(g: &Graph, d: usize, orderings: &[NodeOrdering], cfg: &McConfig) -> Result<OrderReport> {
    if orderings.len() < 2 {
        return Err(Error::domain("need at least two orderings"));
    }
    let partner = (1..g.node_count()).find(|&v| !g.has_edge(0, v));
    let h = move |xs: &[f64]| -> f64 {
        let v1 = partner.expect("functional used only with a partner");
        let d = xs.len() / g.node_count();
        f64::from(dot(&xs[..d], &xs[v1 * d..(v1 + 1) * d]) > 0.5)
    };
    let extra: Vec<Functional<'_>> = if partner.is_some() { vec![&h] } else { vec![] };
    let verdict = classify_finiteness(g, d);
    let mut estimates = Vec::new();
    let mut functional = Vec::new();
    for (i, p) in orderings.iter().enumerate() {
        let out = sequential_run(g, d, p, &cfg.derived(i as u64), &extra)?;
        estimates.push(DensityEstimate::from_output(&out, Method::SequentialImportance, verdict.clone()));
        if let Some(c) = out.components.get(1) {
            functional.push((c.mean, c.std_error));
        }
    }
    let mut scores = Vec::new();
    for i in 0..orderings.len() {
        for j in i + 1..orderings.len() {
            scores.push(PairScore { first: i, second: j, quantity: "mass", z: estimates[i].z_against(&estimates[j]) });
            if let (Some(a), Some(b)) = (functional.get(i), functional.get(j)) {
                scores.push(PairScore { first: i, second: j, quantity: "functional", z: z_score(a.0, a.1, b.0, b.1) });
            }
        }
    }
    let max_z = scores.iter().map(|s| s.z).fold(0.0, f64::max);
    Ok(OrderReport { orderings: orderings.to_vec(), estimates, functional, scores, max_z, passed: max_z < Z_PASS })
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkovReport {
    pub first_component: Vec<usize>,
    pub second_component: Vec<usize>,
    pub covariance: f64,
    pub std_error: f64,
    pub z: f64,
    pub samples: u64,
    pub passed: bool,
}

fn components_without(g: &Graph, s: &[usize]) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    s.iter().for_each(|&v| seen[v] = true);
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut i = 0;
        while i < comp.len() {
            for &w in g.neighbors(comp[i]) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Conditioned on `x(S) = z`, the weighted parts of the first two
/// components of `G − S` should be uncorrelated.
///
/// Each part is the product of its nodes' weight factors times the squared
/// last coordinate of its smallest node. The covariance is tested against
/// its null standard error `sd_A · sd_B / √n`.
pub fn markov_factorization_test(g: &Graph, d: usize, s: &[usize], z: &[UnitVector], cfg: &McConfig) -> Result<MarkovReport> {
    let comps = components_without(g, s);
    if comps.len() < 2 {
        return Err(Error::domain("removing the anchored set leaves fewer than two components"));
    }
    let (a, b) = (comps[0].clone(), comps[1].clone());
    let p = NodeOrdering::with_prefix(s, &NodeOrdering::default_for(g))?;
    let sampler = ConditionalSampler::new(g, d, s, z, &p)?;
    let part = |ws: &crate::sampler::Workspace, c: &[usize]| -> f64 {
        let w: f64 = c.iter().map(|&v| ws.node_log[v]).sum::<f64>().exp();
        let x = ws.vector(c[0], d)[d - 1];
        w * x * x
    };
    let out = run(cfg, 3, false, || sampler.workspace(), |ws, rng, out| {
        let stats = sampler.draw_into(ws, rng)?;
        let (ga, gb) = (part(ws, &a), part(ws, &b));
        out.copy_from_slice(&[ga, gb, ga * gb]);
        Ok(DrawReport { retries: stats.retries })
    })?;
    let [ca, cb, cab] = [&out.components[0], &out.components[1], &out.components[2]];
    let n = out.kept as f64;
    let covariance = cab.mean - ca.mean * cb.mean;
    let std_error = ca.std_error * cb.std_error * n.sqrt();
    let z = if covariance == 0.0 { 0.0 } else { (covariance / std_error).abs() };
    Ok(MarkovReport {
        first_component: a,
        second_component: b,
        covariance,
        std_error,
        z,
        samples: out.samples,
        passed: z < Z_PASS,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub d: usize,
    pub n: usize,
    pub p: i64,
    pub exact: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub mom_value: f64,
    pub excluded: u64,
    pub z: f64,
    pub passed: bool,
}

/// Empirical `E[Det^p]` of `n` iid uniform points of `S^{d-1}` against
/// the exact moment.
pub fn det_moment_mc_check(d: usize, n: usize, p: i64, cfg: &McConfig) -> Result<MomentReport> {
    let exact = match det_moment(d, n, p)? {
        Moment::Finite(v) => v.to_f64(),
        Moment::Infinite => return Err(Error::domain(format!("moment p={p} diverges for n={n}, d={d}"))),
    };
    let out = run(cfg, 1, false, || vec![0.0; n * d], |rows, rng, out| {
        for r in rows.chunks_exact_mut(d) {
            sample_complement_into(&[], r, rng);
        }
        let f = orthogonalize_rows(rows, n, d);
        out[0] = if p < 0 && f.min_factor <= SINGULAR_TOL { f64::INFINITY } else { f.det.powi(p as i32) };
        Ok(DrawReport::default())
    })?;
    let c = &out.components[0];
    let z = z_score(c.mean, c.std_error, exact, 0.0);
    Ok(MomentReport {
        d,
        n,
        p,
        exact,
        estimate: c.mean,
        std_error: c.std_error,
        mom_value: c.median_of_means,
        excluded: out.excluded,
        z,
        passed: z < Z_PASS,
    })
}
