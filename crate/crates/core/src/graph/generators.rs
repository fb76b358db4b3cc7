use super::Graph;
use crate::error::{Error, Result};

/// Cycle `C_k` on nodes `0..k`, `k >= 3`.
pub fn cycle(k: usize) -> Result<Graph> {
    if k < 3 {
        return Err(Error::domain(format!("cycle needs k >= 3, got {k}")));
    }
    Graph::new(k, (0..k).map(|i| (i, (i + 1) % k)))
}

/// Path with `k` edges on nodes `0..=k`.
pub fn path(k: usize) -> Result<Graph> {
    Graph::new(k + 1, (0..k).map(|i| (i, i + 1)))
}

/// Complete graph `K_r`, `r >= 1`.
pub fn complete(r: usize) -> Result<Graph> {
    if r == 0 {
        return Err(Error::domain("complete graph needs r >= 1"));
    }
    Graph::new(r, (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))))
}

/// `K_{a,b}` with sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph> {
    if a == 0 || b == 0 {
        return Err(Error::domain(format!("K_{{{a},{b}}} needs both sides nonempty")));
    }
    Graph::new(a + b, (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j))))
}

/// Star `K_{1,b}` centered at node 0.
pub fn star(b: usize) -> Result<Graph> {
    complete_bipartite(1, b)
}

/// Crown `Cr_n`: nodes `u_i = i` and `w_i = n + i`, with `w_i` adjacent to
/// `u_{i-1}, u_i, u_{i+1}` (indices mod `n`), `n >= 4`.
pub fn crown(n: usize) -> Result<Graph> {
    if n < 4 {
        return Err(Error::domain(format!("crown needs n >= 4, got {n}")));
    }
    Graph::new(2 * n, (0..n).flat_map(|i| [(n + i, (i + n - 1) % n), (n + i, i), (n + i, (i + 1) % n)]))
}

/// One-subdivision of `h`: node `v` of `h` keeps its label and edge number
/// `e` (in sorted edge order) becomes node `h.node_count() + e`.
pub fn subdivision(h: &Graph) -> Graph {
    let n = h.node_count();
    let edges = h.edges().iter().enumerate().flat_map(|(e, &(a, b))| [(a, n + e), (b, n + e)]);
    Graph::new(n + h.edge_count(), edges).expect("subdivision of a simple graph is simple")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let c = cycle(5).unwrap();
        assert_eq!((c.node_count(), c.edge_count()), (5, 5));
        assert!(cycle(2).is_err());
        let p = path(4).unwrap();
        assert_eq!((p.node_count(), p.edge_count()), (5, 4));
        assert_eq!(complete(5).unwrap().edge_count(), 10);
        assert_eq!(complete_bipartite(2, 3).unwrap().edge_count(), 6);
    }

    #[test]
    fn crown_four_is_cube() {
        let g = crown(4).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (8, 12));
        assert!((0..8).all(|v| g.degree(v) == 3));
        // The cube has no triangles and every pair of adjacent nodes lies on exactly two 4-cycles.
        for &(a, b) in g.edges() {
            assert!(g.neighbors(a).iter().all(|w| !g.has_edge(*w, b)));
        }
        assert!(crown(3).is_err());
    }

    #[test]
    fn subdivision_sizes() {
        let s = subdivision(&cycle(3).unwrap());
        assert_eq!((s.node_count(), s.edge_count()), (6, 6));
        assert!((0..6).all(|v| s.degree(v) == 2));
        assert_eq!(s.components().len(), 1);
        let k4 = subdivision(&complete(4).unwrap());
        assert_eq!((k4.node_count(), k4.edge_count()), (10, 12));
    }
}
