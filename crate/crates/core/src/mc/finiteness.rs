//! Theorem-based finiteness verdicts for `t(G, d)`.
//!
//! `t` multiplies over connected components and is positive for every
//! sparse graph, so components are classified separately: all finite gives
//! finite, any provably infinite component gives infinite.

use num_rational::Ratio;

use super::{FinitenessStatus, FinitenessVerdict};
use crate::closed_form::complete_bipartite_sides;
use crate::graph::{crown_size, elimination_ordering, is_d_sparse, is_subdivision_of, Graph};

/// Crown sizes and dimensions left open.
const OPEN_CROWNS: [(usize, usize); 3] = [(4, 5), (4, 6), (5, 4)];

pub fn classify_finiteness(g: &Graph, d: usize) -> FinitenessVerdict {
    if d < 3 {
        return FinitenessVerdict::unknown();
    }
    if !is_d_sparse(g, d).sparse {
        return FinitenessVerdict::new(FinitenessStatus::NotSparse, "sparsity");
    }
    let comps = g.components();
    if comps.len() == 1 {
        return classify_connected(g, d);
    }
    let verdicts: Vec<FinitenessVerdict> = comps.iter().map(|c| classify_connected(&g.induced(c), d)).collect();
    if let Some(v) = verdicts.iter().find(|v| v.status == FinitenessStatus::InfiniteProved) {
        return v.clone();
    }
    if verdicts.iter().all(FinitenessVerdict::is_finite) {
        let mut rules: Vec<&str> = Vec::new();
        for v in &verdicts {
            if !rules.contains(&v.rule.as_str()) {
                rules.push(&v.rule);
            }
        }
        return FinitenessVerdict::new(FinitenessStatus::FiniteProved, rules.join("+"));
    }
    FinitenessVerdict::unknown()
}

fn finite(rule: &str) -> FinitenessVerdict {
    FinitenessVerdict::new(FinitenessStatus::FiniteProved, rule)
}

/// Connected, `d`-sparse `g`.
fn classify_connected(g: &Graph, d: usize) -> FinitenessVerdict {
    let crown = crown_size(g);
    if crown == Some(4) && d == 4 {
        return FinitenessVerdict::new(FinitenessStatus::InfiniteProved, "3PATH(b)");
    }
    if g.is_forest() {
        return finite("tree");
    }
    if elimination_ordering(g).is_some() {
        return finite("chordal");
    }
    if complete_bipartite_sides(g).is_some() {
        return finite("complete_bipartite");
    }
    if let Some(s) = is_subdivision_of(g) {
        if s.h.max_degree() < d {
            return finite("subdivision");
        }
    }
    if is_cycle(g) && (d, g.node_count()) != (3, 4) {
        return finite("cycle");
    }
    if let Some((u, w)) = g.bipartition() {
        if holder_holds(g, d, &u) || holder_holds(g, d, &w) {
            return finite("holder");
        }
    }
    if let Some(n) = crown {
        if d >= 4 && !OPEN_CROWNS.contains(&(d, n)) {
            return finite("3PATH(a)");
        }
    }
    FinitenessVerdict::unknown()
}

fn is_cycle(g: &Graph) -> bool {
    g.node_count() >= 3 && g.edge_count() == g.node_count() && (0..g.node_count()).all(|v| g.degree(v) == 2)
}

/// `Σ_{v ∈ N(u)} 1/(d - deg v) ≤ 1` for every `u` on `side`, in exact arithmetic.
pub(crate) fn holder_holds(g: &Graph, d: usize, side: &[usize]) -> bool {
    side.iter().all(|&u| {
        let mut sum = Ratio::from_integer(0i64);
        for &v in g.neighbors(u) {
            let deg = g.degree(v);
            if deg >= d {
                return false;
            }
            sum += Ratio::new(1, (d - deg) as i64);
        }
        sum <= Ratio::from_integer(1)
    })
}
