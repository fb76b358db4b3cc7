use serde::Serialize;

use super::Graph;

/// Outcome of the `d`-sparsity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SparsityReport {
    pub d: usize,
    pub sparse: bool,
    /// Disjoint `(A, B)` with every `A`–`B` edge present and `|A| + |B| > d`.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

type Bits = Vec<u64>;

fn bits_of(n: usize, items: &[usize]) -> Bits {
    let mut b = vec![0u64; n.div_ceil(64).max(1)];
    for &i in items {
        b[i / 64] |= 1 << (i % 64);
    }
    b
}

fn count(b: &Bits) -> usize {
    b.iter().map(|w| w.count_ones() as usize).sum()
}

fn members(b: &Bits) -> Vec<usize> {
    let mut out = Vec::new();
    for (k, &w) in b.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            out.push(64 * k + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
    out
}

/// Searches for a complete bipartite `K_{a,b}` with `a + b > d`.
///
/// Sets `A` are grown in increasing node order while tracking their common
/// neighborhood, which already excludes `A` itself. The search is
/// exponential in `d` and meant for small graphs.
pub fn is_d_sparse(g: &Graph, d: usize) -> SparsityReport {
    let n = g.node_count();
    let nbr: Vec<Bits> = (0..n).map(|v| bits_of(n, g.neighbors(v))).collect();
    let mut a = Vec::new();
    let witness = search(&nbr, d, 0, &mut a, None);
    SparsityReport { d, sparse: witness.is_none(), witness }
}

fn search(nbr: &[Bits], d: usize, next: usize, a: &mut Vec<usize>, common: Option<&Bits>) -> Option<(Vec<usize>, Vec<usize>)> {
    if a.len() >= d {
        return None;
    }
    for v in next..nbr.len() {
        let cn: Bits = match common {
            None => nbr[v].clone(),
            Some(c) => c.iter().zip(&nbr[v]).map(|(x, y)| x & y).collect(),
        };
        let b = count(&cn);
        if b == 0 {
            continue;
        }
        a.push(v);
        if a.len() + b > d {
            return Some((a.clone(), members(&cn)));
        }
        if let Some(w) = search(nbr, d, v + 1, a, Some(&cn)) {
            return Some(w);
        }
        a.pop();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, complete_bipartite, crown, cycle, star, subdivision};
    use rand::{Rng, SeedableRng};

    /// Exhaustive search over all disjoint pairs (A, B) via base-3 labelings.
    fn sparse_oracle(g: &Graph, d: usize) -> bool {
        let n = g.node_count();
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), code);
            for v in 0..n {
                match c % 3 {
                    1 => a.push(v),
                    2 => b.push(v),
                    _ => {}
                }
                c /= 3;
            }
            if a.is_empty() || b.is_empty() || a.len() + b.len() <= d {
                continue;
            }
            if a.iter().all(|&x| b.iter().all(|&y| g.has_edge(x, y))) {
                return false;
            }
        }
        true
    }

    fn check_witness(g: &Graph, r: &SparsityReport) {
        if let Some((a, b)) = &r.witness {
            assert!(a.len() + b.len() > r.d);
            assert!(a.iter().all(|x| !b.contains(x)));
            assert!(a.iter().all(|&x| b.iter().all(|&y| g.has_edge(x, y))));
        }
    }

    #[test]
    fn examples() {
        let c4 = cycle(4).unwrap();
        let r = is_d_sparse(&c4, 3);
        assert!(!r.sparse);
        let (a, b) = r.witness.clone().unwrap();
        assert_eq!((a.len(), b.len()), (2, 2));
        check_witness(&c4, &r);
        assert!(is_d_sparse(&cycle(5).unwrap(), 3).sparse);
        assert!(is_d_sparse(&crown(4).unwrap(), 4).sparse);
        assert!(!is_d_sparse(&crown(4).unwrap(), 3).sparse);
        assert!(!is_d_sparse(&star(3).unwrap(), 3).sparse);
        assert!(is_d_sparse(&complete(3).unwrap(), 3).sparse);
        assert!(!is_d_sparse(&complete(4).unwrap(), 3).sparse);
        assert!(is_d_sparse(&complete_bipartite(2, 3).unwrap(), 5).sparse);
        assert!(is_d_sparse(&subdivision(&complete(4).unwrap()), 4).sparse);
        assert!(!is_d_sparse(&subdivision(&complete(4).unwrap()), 3).sparse);
    }

    #[test]
    fn agrees_with_exhaustive_search() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..250 {
            let n = rng.random_range(1..8);
            let p = rng.random::<f64>();
            let edges: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.random::<f64>() < p).collect();
            let g = Graph::new(n, edges).unwrap();
            for d in 3..7 {
                let r = is_d_sparse(&g, d);
                assert_eq!(r.sparse, sparse_oracle(&g, d), "{g:?} d={d}");
                check_witness(&g, &r);
                if r.sparse {
                    assert!(g.max_degree() < d);
                }
            }
        }
    }
}
