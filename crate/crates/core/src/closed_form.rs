//! Exact densities for forests, chordal graphs, complete graphs and
//! complete bipartite graphs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{elimination_ordering, is_clique_ordering, is_d_sparse, Graph, NodeOrdering};
use crate::pirational::PiRational;
use crate::sphere::surface_area;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaTag {
    Tree,
    Chordal,
    Complete,
    CompleteBipartite,
}

impl FormulaTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FormulaTag::Tree => "tree",
            FormulaTag::Chordal => "chordal",
            FormulaTag::Complete => "complete",
            FormulaTag::CompleteBipartite => "complete_bipartite",
        }
    }
}

/// What the formula was evaluated on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    None,
    Ordering(Vec<usize>),
    Complete { r: usize },
    Partition { a: usize, b: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormResult {
    pub value: PiRational,
    pub formula_tag: FormulaTag,
    pub provenance: Provenance,
}

fn area(k: usize) -> PiRational {
    surface_area(k)
}

fn require_sparse(g: &Graph, d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::domain(format!("dimension d={d} must be at least 3")));
    }
    match is_d_sparse(g, d).witness {
        Some((a, b)) => Err(Error::NotSparse { d, a: a.len(), b: b.len() }),
        None => Ok(()),
    }
}

/// `t(G, d) = 1` for a `d`-sparse forest.
pub fn t_tree(g: &Graph, d: usize) -> Result<ClosedFormResult> {
    if !g.is_forest() {
        return Err(Error::NotForest);
    }
    require_sparse(g, d)?;
    Ok(ClosedFormResult { value: PiRational::one(), formula_tag: FormulaTag::Tree, provenance: Provenance::None })
}

fn chordal_value(g: &Graph, p: &NodeOrdering, d: usize) -> PiRational {
    let e = g.edge_count() as i32;
    let v = g.node_count() as i32;
    let mut value = &area(d - 1).powi(e - v) / &area(d - 2).powi(e);
    for &u in p.order() {
        value = &value * &area(d - p.backward_degree(g, u) - 1);
    }
    value
}

/// Product-of-areas formula along an ordering with clique backward neighborhoods.
pub fn t_chordal_with(g: &Graph, d: usize, p: &NodeOrdering) -> Result<ClosedFormResult> {
    require_sparse(g, d)?;
    if p.len() != g.node_count() || !is_clique_ordering(g, p) {
        return Err(Error::NotChordal);
    }
    Ok(ClosedFormResult { value: chordal_value(g, p, d), formula_tag: FormulaTag::Chordal, provenance: Provenance::Ordering(p.order().to_vec()) })
}

/// Exact density of a chordal graph.
pub fn t_chordal(g: &Graph, d: usize) -> Result<ClosedFormResult> {
    require_sparse(g, d)?;
    let p = elimination_ordering(g).ok_or(Error::NotChordal)?;
    t_chordal_with(g, d, &p)
}

/// Exact density of `K_r`.
pub fn t_complete(r: usize, d: usize) -> Result<ClosedFormResult> {
    let g = crate::graph::complete(r)?;
    require_sparse(&g, d)?;
    let ri = r as i32;
    let mut value = &area(d - 1).powi(ri * (ri - 3) / 2) / &area(d - 2).powi(ri * (ri - 1) / 2);
    for i in 1..=r {
        value = &value * &area(d - i);
    }
    Ok(ClosedFormResult { value, formula_tag: FormulaTag::Complete, provenance: Provenance::Complete { r } })
}

/// Exact density of `K_{a,b}`, defined for `a + b <= d`.
pub fn t_complete_bipartite(a: usize, b: usize, d: usize) -> Result<ClosedFormResult> {
    if d < 3 || a == 0 || b == 0 || a + b > d {
        return Err(Error::domain(format!("K_{{{a},{b}}} needs a, b >= 1 and a + b <= d (d={d} >= 3)")));
    }
    let (ai, bi) = (a as i32, b as i32);
    let mut num = area(d - 1).powi(ai * bi - ai - bi);
    num = &num * &area(d - b - 1).powi(ai);
    num = &num * &area(d - a - 1).powi(bi);
    let mut den = area(d - 2).powi(ai * bi);
    for i in 1..=a {
        num = &num * &area(d - i);
        den = &den * &area(d - b - i);
    }
    Ok(ClosedFormResult { value: &num / &den, formula_tag: FormulaTag::CompleteBipartite, provenance: Provenance::Partition { a, b } })
}

/// Side sizes `(a, b)` when `g` is a complete bipartite graph with both sides nonempty.
pub fn complete_bipartite_sides(g: &Graph) -> Option<(usize, usize)> {
    let (u, w) = g.bipartition()?;
    (!u.is_empty() && !w.is_empty() && u.len() * w.len() == g.edge_count()).then_some((u.len(), w.len()))
}

/// `r` when `g` is the complete graph `K_r`.
pub fn complete_size(g: &Graph) -> Option<usize> {
    let n = g.node_count();
    (n >= 1 && g.edge_count() == n * (n - 1) / 2).then_some(n)
}

/// Power of π in the chordal formula: with `q` odd backward degrees,
/// `(|E| - q) / 2` for even `d` and `(q - |E|) / 2` for odd `d`.
pub fn pi_exponent(g: &Graph, p: &NodeOrdering, d: usize) -> i64 {
    let q = p.order().iter().filter(|&&v| p.backward_degree(g, v) % 2 == 1).count() as i64;
    let e = g.edge_count() as i64;
    if d.is_multiple_of(2) {
        (e - q) / 2
    } else {
        (q - e) / 2
    }
}

/// The first applicable exact formula: forest, complete, complete bipartite, chordal.
pub fn closed_form(g: &Graph, d: usize) -> Result<ClosedFormResult> {
    require_sparse(g, d)?;
    if g.is_forest() {
        return t_tree(g, d);
    }
    if let Some(r) = complete_size(g) {
        return t_complete(r, d);
    }
    if let Some((a, b)) = complete_bipartite_sides(g) {
        return t_complete_bipartite(a, b, d);
    }
    t_chordal(g, d)
}
