//! Random sequential ortho-homomorphisms and their importance weights.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_d_sparse, Graph, NodeOrdering};
use crate::sphere::{dot, gram_det, orthogonalize_rows, s_constants_f64, sample_complement_into, UnitVector, SINGULAR_TOL};

/// Redraws allowed when a constraint set is numerically singular.
pub const MAX_RETRIES: u32 = 100;

/// Tolerance on edge inner products accepted for anchor assignments.
pub const ANCHOR_TOL: f64 = 1e-9;

/// A sampled ortho-homomorphism with its importance weight.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoConfiguration {
    pub d: usize,
    /// Vector of every node, indexed by node.
    pub assignment: Vec<UnitVector>,
    pub ordering_used: NodeOrdering,
    /// `ln f_p` over the sampled nodes.
    pub log_weight: f64,
    /// Per-node factors `ln s_{d,d_p(v)}(x_p(v))`; zero on anchored nodes.
    pub node_log_weights: Vec<f64>,
    /// Smallest generalized determinant among the constraint sets used.
    pub general_position_margin: f64,
    /// Whole-sample redraws caused by singular constraint sets.
    pub retries: u32,
}

/// JSON export form of a configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationExport {
    pub d: usize,
    pub ordering: Vec<usize>,
    pub vectors: Vec<Vec<f64>>,
    pub log_weight: f64,
}

impl OrthoConfiguration {
    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }

    /// Largest `|x_u · x_v|` over the edges of `g`.
    pub fn max_edge_residual(&self, g: &Graph) -> f64 {
        g.edges().iter().map(|&(a, b)| dot(&self.assignment[a], &self.assignment[b]).abs()).fold(0.0, f64::max)
    }

    pub fn export(&self) -> ConfigurationExport {
        ConfigurationExport {
            d: self.d,
            ordering: self.ordering_used.order().to_vec(),
            vectors: self.assignment.iter().map(|v| v.as_slice().to_vec()).collect(),
            log_weight: self.log_weight,
        }
    }
}

/// Reusable sequential sampler for a fixed graph, dimension and ordering.
#[derive(Clone, Debug)]
pub struct SequentialSampler {
    d: usize,
    n: usize,
    ordering: NodeOrdering,
    /// Backward neighbors of the node at each position.
    back: Vec<Vec<usize>>,
    /// First position that is sampled; earlier positions are anchored.
    first_free: usize,
    log_c: Vec<f64>,
}

/// Output of one draw into caller-owned buffers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DrawStats {
    pub log_weight: f64,
    pub margin: f64,
    pub retries: u32,
}

/// Scratch buffers for [`SequentialSampler::draw_into`].
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    /// Row-major vectors, `n * d`.
    pub vectors: Vec<f64>,
    /// Per-node log factors.
    pub node_log: Vec<f64>,
    rows: Vec<f64>,
}

impl Workspace {
    pub fn vector(&self, v: usize, d: usize) -> &[f64] {
        &self.vectors[v * d..(v + 1) * d]
    }
}

fn check_sparse(g: &Graph, d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::domain(format!("dimension d={d} must be at least 3")));
    }
    let r = is_d_sparse(g, d);
    if let Some((a, b)) = r.witness {
        return Err(Error::NotSparse { d, a: a.len(), b: b.len() });
    }
    Ok(())
}

impl SequentialSampler {
    pub fn new(g: &Graph, d: usize, p: &NodeOrdering) -> Result<Self> {
        check_sparse(g, d)?;
        Self::build(g, d, p, 0)
    }

    fn build(g: &Graph, d: usize, p: &NodeOrdering, first_free: usize) -> Result<Self> {
        if p.len() != g.node_count() {
            return Err(Error::InvalidOrdering(format!("ordering has {} nodes, graph has {}", p.len(), g.node_count())));
        }
        let back = p.order().iter().map(|&v| p.backward_neighbors(g, v)).collect();
        Ok(SequentialSampler { d, n: g.node_count(), ordering: p.clone(), back, first_free, log_c: s_constants_f64(d)?.iter().map(|c| c.ln()).collect() })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn ordering(&self) -> &NodeOrdering {
        &self.ordering
    }

    pub fn workspace(&self) -> Workspace {
        Workspace { vectors: vec![0.0; self.n * self.d], node_log: vec![0.0; self.n], rows: vec![0.0; self.d * self.d] }
    }

    /// Draws the free nodes into `ws`, leaving anchored rows of `ws.vectors` untouched.
    pub fn draw_into<R: Rng + ?Sized>(&self, ws: &mut Workspace, rng: &mut R) -> Result<DrawStats> {
        let d = self.d;
        let mut retries = 0;
        'attempt: loop {
            let mut log_weight = 0.0;
            let mut margin = f64::INFINITY;
            for pos in self.first_free..self.n {
                let v = self.ordering.order()[pos];
                let back = &self.back[pos];
                let k = back.len();
                for (i, &u) in back.iter().enumerate() {
                    ws.rows[i * d..(i + 1) * d].copy_from_slice(&ws.vectors[u * d..(u + 1) * d]);
                }
                let f = orthogonalize_rows(&mut ws.rows[..k * d], k, d);
                let ok = f.min_factor > SINGULAR_TOL
                    && sample_complement_into(&ws.rows[..k * d], &mut ws.vectors[v * d..(v + 1) * d], rng);
                if !ok {
                    retries += 1;
                    if retries > MAX_RETRIES {
                        return Err(Error::RetriesExhausted { retries: MAX_RETRIES });
                    }
                    continue 'attempt;
                }
                let factor = if k <= 1 { 0.0 } else { self.log_c[k] - f.det.ln() };
                if k >= 2 {
                    margin = margin.min(f.det);
                }
                ws.node_log[v] = factor;
                log_weight += factor;
            }
            return Ok(DrawStats { log_weight, margin: margin.min(1.0), retries });
        }
    }

    fn finish(&self, ws: Workspace, stats: DrawStats) -> OrthoConfiguration {
        let d = self.d;
        OrthoConfiguration {
            d,
            assignment: ws.vectors.chunks_exact(d).map(|c| UnitVector::from_raw(c.to_vec())).collect(),
            ordering_used: self.ordering.clone(),
            log_weight: stats.log_weight,
            node_log_weights: ws.node_log,
            general_position_margin: stats.margin,
            retries: stats.retries,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<OrthoConfiguration> {
        let mut ws = self.workspace();
        let stats = self.draw_into(&mut ws, rng)?;
        Ok(self.finish(ws, stats))
    }
}

/// One random sequential ortho-homomorphism of `g` in `S^{d-1}` along `p`.
pub fn sequential_sample<R: Rng + ?Sized>(g: &Graph, d: usize, p: &NodeOrdering, rng: &mut R) -> Result<OrthoConfiguration> {
    SequentialSampler::new(g, d, p)?.sample(rng)
}

/// Sampler extending a fixed assignment on `S` to the rest of the graph.
#[derive(Clone, Debug)]
pub struct ConditionalSampler {
    inner: SequentialSampler,
    anchors: Vec<(usize, UnitVector)>,
}

impl ConditionalSampler {
    /// `s` and `z` pair anchored nodes with their vectors; `p` must list `s` first.
    pub fn new(g: &Graph, d: usize, s: &[usize], z: &[UnitVector], p: &NodeOrdering) -> Result<Self> {
        check_sparse(g, d)?;
        if s.len() != z.len() {
            return Err(Error::InvalidAnchor(format!("{} anchored nodes but {} vectors", s.len(), z.len())));
        }
        let mut in_s = vec![false; g.node_count()];
        for &v in s {
            if v >= g.node_count() || in_s[v] {
                return Err(Error::InvalidAnchor(format!("anchor set {s:?} is not a set of nodes")));
            }
            in_s[v] = true;
        }
        if p.len() != g.node_count() || !p.order()[..s.len()].iter().all(|&v| in_s[v]) {
            return Err(Error::InvalidOrdering("ordering must list the anchored nodes first".into()));
        }
        let mut vec_of = vec![None; g.node_count()];
        for (&v, x) in s.iter().zip(z) {
            if x.dim() != d || (crate::sphere::norm(x) - 1.0).abs() > ANCHOR_TOL {
                return Err(Error::InvalidAnchor(format!("vector of node {v} is not a unit vector of R^{d}")));
            }
            vec_of[v] = Some(x);
        }
        for &(a, b) in g.edges() {
            if let (Some(x), Some(y)) = (vec_of[a], vec_of[b]) {
                let r = dot(x, y).abs();
                if r > ANCHOR_TOL {
                    return Err(Error::InvalidAnchor(format!("edge ({a},{b}) has inner product {r:e}")));
                }
            }
        }
        let margin = general_position_margin(z, d, usize::MAX, None::<&mut rand_chacha::ChaCha8Rng>);
        if margin <= SINGULAR_TOL {
            return Err(Error::InvalidAnchor(format!("anchors are not in general position (margin {margin:e})")));
        }
        let inner = SequentialSampler::build(g, d, p, s.len())?;
        Ok(ConditionalSampler { inner, anchors: s.iter().copied().zip(z.iter().cloned()).collect() })
    }

    pub fn workspace(&self) -> Workspace {
        let mut ws = self.inner.workspace();
        let d = self.inner.d;
        for (v, x) in &self.anchors {
            ws.vectors[v * d..(v + 1) * d].copy_from_slice(x);
        }
        ws
    }

    pub fn draw_into<R: Rng + ?Sized>(&self, ws: &mut Workspace, rng: &mut R) -> Result<DrawStats> {
        self.inner.draw_into(ws, rng)
    }

    /// Full assignment (anchors included) whose weight covers only the extension.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<OrthoConfiguration> {
        let mut ws = self.workspace();
        let stats = self.inner.draw_into(&mut ws, rng)?;
        Ok(self.inner.finish(ws, stats))
    }
}

/// Extends the assignment `z` of the nodes `s` over the rest of `g`.
pub fn conditional_sample<R: Rng + ?Sized>(
    g: &Graph,
    d: usize,
    s: &[usize],
    z: &[UnitVector],
    p: &NodeOrdering,
    rng: &mut R,
) -> Result<OrthoConfiguration> {
    ConditionalSampler::new(g, d, s, z, p)?.sample(rng)
}

fn binomial_at_most(n: usize, k: usize, cap: usize) -> bool {
    let mut c: u128 = 1;
    for i in 0..k.min(n - k.min(n)) {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > cap as u128 {
            return false;
        }
    }
    true
}

fn general_position_margin<R: Rng>(xs: &[UnitVector], d: usize, budget: usize, rng: Option<&mut R>) -> f64 {
    let n = xs.len();
    if n == 0 {
        return 1.0;
    }
    let k = d.min(n);
    let mut best = f64::INFINITY;
    let mut subset: Vec<&UnitVector> = Vec::with_capacity(k);
    match rng {
        Some(rng) if !binomial_at_most(n, k, budget) => {
            for _ in 0..budget {
                let idx = rand::seq::index::sample(rng, n, k);
                subset.clear();
                subset.extend(idx.iter().map(|i| &xs[i]));
                best = best.min(gram_det(&subset));
            }
        }
        _ => {
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                subset.clear();
                subset.extend(idx.iter().map(|&i| &xs[i]));
                best = best.min(gram_det(&subset));
                let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else { break };
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        }
    }
    best
}

/// Smallest generalized determinant over `min(d, n)`-subsets of the
/// assignment: all of them when there are at most `subset_budget`, else
/// `subset_budget` random ones.
pub fn verify_general_position<R: Rng>(x: &OrthoConfiguration, subset_budget: usize, rng: &mut R) -> f64 {
    general_position_margin(&x.assignment, x.d, subset_budget, Some(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, path};
    use crate::stats::{ks_one_sample, ks_two_sample};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn tree_weights_are_exactly_one() {
        let t = Graph::new(7, [(0, 1), (1, 2), (1, 3), (3, 4), (4, 5), (0, 6)]).unwrap();
        let mut r = rng(1);
        for d in 4..7 {
            let s = SequentialSampler::new(&t, d, &NodeOrdering::default_for(&t)).unwrap();
            for _ in 0..500 {
                let x = s.sample(&mut r).unwrap();
                assert_eq!(x.log_weight, 0.0);
                assert!(x.max_edge_residual(&t) < 1e-10);
            }
        }
    }

    #[test]
    fn triangle_weight_is_constant() {
        let k3 = complete(3).unwrap();
        let mut r = rng(2);
        for _ in 0..200 {
            let p = NodeOrdering::random(3, &mut r);
            let x = sequential_sample(&k3, 3, &p, &mut r).unwrap();
            assert!((x.weight() - 2.0 / PI).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_sparse_graphs() {
        let c4 = cycle(4).unwrap();
        let e = SequentialSampler::new(&c4, 3, &NodeOrdering::identity(4)).unwrap_err();
        assert_eq!(e, Error::NotSparse { d: 3, a: 2, b: 2 });
    }

    #[test]
    fn edges_orthogonal_and_general_position() {
        let c5 = cycle(5).unwrap();
        let s = SequentialSampler::new(&c5, 3, &NodeOrdering::default_for(&c5)).unwrap();
        let mut r = rng(3);
        for _ in 0..10_000 {
            let x = s.sample(&mut r).unwrap();
            assert!(x.max_edge_residual(&c5) < 1e-10);
            assert!(x.log_weight.is_finite());
            assert!(verify_general_position(&x, 1000, &mut r) > 1e-12);
        }
    }

    #[test]
    fn general_position_examples() {
        let basis: Vec<UnitVector> = (0..3).map(|i| UnitVector::basis(3, i)).collect();
        let mk = |assignment: Vec<UnitVector>| OrthoConfiguration {
            d: 3,
            ordering_used: NodeOrdering::identity(assignment.len()),
            node_log_weights: vec![0.0; assignment.len()],
            assignment,
            log_weight: 0.0,
            general_position_margin: 1.0,
            retries: 0,
        };
        let mut r = rng(4);
        assert!((verify_general_position(&mk(basis.clone()), 10, &mut r) - 1.0).abs() < 1e-15);
        let mut dup = basis.clone();
        dup.push(basis[0].clone());
        assert!(verify_general_position(&mk(dup.clone()), 10, &mut r) < 1e-12);
        assert!(verify_general_position(&mk(dup), 2, &mut r) < 1.0 + 1e-12);
    }

    #[test]
    fn enumerates_every_subset() {
        let mut count = 0;
        let mut idx: Vec<usize> = (0..3).collect();
        loop {
            count += 1;
            let Some(i) = (0..3).rev().find(|&i| idx[i] < 7 - 3 + i) else { break };
            idx[i] += 1;
            for j in i + 1..3 {
                idx[j] = idx[j - 1] + 1;
            }
        }
        assert_eq!(count, 35);
        assert!(binomial_at_most(7, 3, 35) && !binomial_at_most(7, 3, 34));
    }

    #[test]
    fn tree_edge_angle_law() {
        // The second endpoint of the first edge is uniform on the circle
        // orthogonal to the first; its angle to e1 has density ∝ sin^{d-2}.
        let p2 = path(2).unwrap();
        let d = 4;
        let s = SequentialSampler::new(&p2, d, &NodeOrdering::default_for(&p2)).unwrap();
        let mut r = rng(5);
        let angles: Vec<f64> = (0..50_000).map(|_| s.sample(&mut r).unwrap().assignment[1][0].clamp(-1.0, 1.0).acos()).collect();
        let cdf = |x: f64| (x - x.sin() * x.cos()) / PI;
        assert!(ks_one_sample(&angles, cdf).p_value > 0.01);
    }

    #[test]
    fn marginal_on_prefix_matches_subgraph() {
        let c6 = cycle(6).unwrap();
        let p3 = c6.induced(&[0, 1, 2]);
        let big = SequentialSampler::new(&c6, 3, &NodeOrdering::new(vec![1, 0, 2, 3, 5, 4]).unwrap()).unwrap();
        let small = SequentialSampler::new(&p3, 3, &NodeOrdering::new(vec![1, 0, 2]).unwrap()).unwrap();
        let mut r = rng(6);
        let n = 100_000;
        let mut a = (Vec::with_capacity(n), Vec::with_capacity(n));
        let mut b = (Vec::with_capacity(n), Vec::with_capacity(n));
        for _ in 0..n {
            let x = big.sample(&mut r).unwrap();
            a.0.push(dot(&x.assignment[0], &x.assignment[2]));
            a.1.push(x.assignment[1][2]);
            let y = small.sample(&mut r).unwrap();
            b.0.push(dot(&y.assignment[0], &y.assignment[2]));
            b.1.push(y.assignment[1][2]);
        }
        assert!(ks_two_sample(&a.0, &b.0).p_value > 0.01);
        assert!(ks_two_sample(&a.1, &b.1).p_value > 0.01);
    }

    #[test]
    fn conditional_edge_cases() {
        let k3 = complete(3).unwrap();
        let mut r = rng(7);
        let z: Vec<UnitVector> = (0..3).map(|i| UnitVector::basis(3, i)).collect();
        let x = conditional_sample(&k3, 3, &[0, 1, 2], &z, &NodeOrdering::identity(3), &mut r).unwrap();
        assert_eq!(x.log_weight, 0.0);
        assert_eq!(x.assignment, z);
        let bad = [UnitVector::basis(3, 0), UnitVector::basis(3, 0)];
        assert!(matches!(
            conditional_sample(&k3, 3, &[0, 1], &bad, &NodeOrdering::identity(3), &mut r),
            Err(Error::InvalidAnchor(_))
        ));
        assert!(matches!(
            conditional_sample(&k3, 3, &[1], &z[..1], &NodeOrdering::identity(3), &mut r),
            Err(Error::InvalidOrdering(_))
        ));
        let y = conditional_sample(&k3, 3, &[2], &z[..1], &NodeOrdering::new(vec![2, 0, 1]).unwrap(), &mut r).unwrap();
        assert!(y.max_edge_residual(&k3) < 1e-10);
        assert_eq!(y.assignment[2], z[0]);
        assert!((y.weight() - 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn empty_anchor_matches_sequential_law() {
        let c5 = cycle(5).unwrap();
        let p = NodeOrdering::default_for(&c5);
        let seq = SequentialSampler::new(&c5, 3, &p).unwrap();
        let cond = ConditionalSampler::new(&c5, 3, &[], &[], &p).unwrap();
        let (mut r1, mut r2) = (rng(8), rng(8));
        for _ in 0..100 {
            assert_eq!(seq.sample(&mut r1).unwrap(), cond.sample(&mut r2).unwrap());
        }
    }

    #[test]
    fn export_round_trips() {
        let c5 = cycle(5).unwrap();
        let x = sequential_sample(&c5, 3, &NodeOrdering::default_for(&c5), &mut rng(9)).unwrap();
        let json = serde_json::to_string(&x.export()).unwrap();
        let back: ConfigurationExport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x.export());
    }
}
