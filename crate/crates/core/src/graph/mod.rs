//! Finite simple graphs, node orderings and structural queries.

mod chordal;
mod crown;
mod generators;
pub mod io;
mod sparsity;
mod subdivision;

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chordal::{elimination_ordering, elimination_ordering_from, is_clique_ordering};
pub use crown::crown_size;
pub use generators::{complete, complete_bipartite, crown, cycle, path, star, subdivision};
pub use sparsity::{is_d_sparse, SparsityReport};
pub use subdivision::{is_subdivision_of, Subdivision};

/// Finite simple undirected graph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting loops, repeated edges and out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) has an endpoint outside 0..{n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("repeated edge ({},{})", w[0].0, w[0].1)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &list {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj.iter_mut().for_each(|l| l.sort_unstable());
        Ok(Graph { n, edges: list, adj })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Connected components, each sorted, ordered by smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_forest(&self) -> bool {
        self.edges.len() + self.components().len() == self.n
    }

    /// Proper 2-coloring as `(U, W)`; each component's smallest node lands in `U`.
    pub fn bipartition(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let colors = self.two_coloring()?;
        let u = (0..self.n).filter(|&v| colors[v] == 0).collect();
        let w = (0..self.n).filter(|&v| colors[v] == 1).collect();
        Some((u, w))
    }

    pub(crate) fn two_coloring(&self) -> Option<Vec<u8>> {
        let mut color = vec![u8::MAX; self.n];
        for s in 0..self.n {
            if color[s] != u8::MAX {
                continue;
            }
            color[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[u];
                        queue.push_back(w);
                    } else if color[w] == color[u] {
                        return None;
                    }
                }
            }
        }
        Some(color)
    }

    /// Subgraph induced on `nodes`, relabeled `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in nodes.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| index[a] != usize::MAX && index[b] != usize::MAX)
            .map(|&(a, b)| (index[a], index[b]));
        Graph::new(nodes.len(), edges).expect("induced subgraph of a simple graph is simple")
    }
}

/// A bijection from nodes to positions `0..n`; `order[i]` is the node at position `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct NodeOrdering {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl TryFrom<Vec<usize>> for NodeOrdering {
    type Error = Error;
    fn try_from(order: Vec<usize>) -> Result<Self> {
        NodeOrdering::new(order)
    }
}

impl From<NodeOrdering> for Vec<usize> {
    fn from(p: NodeOrdering) -> Vec<usize> {
        p.order
    }
}

impl NodeOrdering {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(Error::InvalidOrdering(format!("{order:?} is not a permutation of 0..{n}")));
            }
            position[v] = i;
        }
        Ok(NodeOrdering { order, position })
    }

    pub fn identity(n: usize) -> Self {
        NodeOrdering::new((0..n).collect()).expect("identity is a permutation")
    }

    /// Breadth-first order from `start`, continuing with later components by smallest node.
    pub fn bfs(g: &Graph, start: usize) -> Self {
        let n = g.node_count();
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let starts = std::iter::once(start).filter(|&s| s < n).chain(0..n);
        for s in starts {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                order.push(u);
                for &w in g.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        NodeOrdering::new(order).expect("search visits every node once")
    }

    /// The default ordering: breadth-first from node 0.
    pub fn default_for(g: &Graph) -> Self {
        NodeOrdering::bfs(g, 0)
    }

    /// Uniformly random permutation.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        NodeOrdering::new(order).expect("shuffle is a permutation")
    }

    /// `prefix` first (in the given order), then the remaining nodes in the order of `rest`.
    pub fn with_prefix(prefix: &[usize], rest: &NodeOrdering) -> Result<Self> {
        let n = rest.len();
        let mut in_prefix = vec![false; n];
        for &v in prefix {
            if v >= n || in_prefix[v] {
                return Err(Error::InvalidOrdering(format!("prefix {prefix:?} is not a set of nodes")));
            }
            in_prefix[v] = true;
        }
        let order = prefix.iter().copied().chain(rest.order.iter().copied().filter(|&v| !in_prefix[v])).collect();
        NodeOrdering::new(order)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    /// Neighbors of `v` placed before it, in increasing position.
    pub fn backward_neighbors(&self, g: &Graph, v: usize) -> Vec<usize> {
        let pv = self.position[v];
        let mut out: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| self.position[w] < pv).collect();
        out.sort_by_key(|&w| self.position[w]);
        out
    }

    pub fn backward_degree(&self, g: &Graph, v: usize) -> usize {
        let pv = self.position[v];
        g.neighbors(v).iter().filter(|&&w| self.position[w] < pv).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_simple_input() {
        assert!(matches!(Graph::new(3, [(0, 0)]), Err(Error::InvalidGraph(_))));
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn adjacency_is_consistent() {
        let g = Graph::new(5, [(3, 1), (0, 4), (1, 0), (2, 4)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 4), (1, 3), (2, 4)]);
        for v in 0..5 {
            for &w in g.neighbors(v) {
                assert!(g.has_edge(w, v));
            }
        }
        assert_eq!(g.neighbors(0), &[1, 4]);
    }

    #[test]
    fn bipartition_examples() {
        assert_eq!(cycle(6).unwrap().bipartition(), Some((vec![0, 2, 4], vec![1, 3, 5])));
        assert_eq!(cycle(5).unwrap().bipartition(), None);
        let (u, w) = crown(4).unwrap().bipartition().unwrap();
        assert_eq!((u, w), (vec![0, 1, 2, 3], vec![4, 5, 6, 7]));
    }

    #[test]
    fn backward_degrees() {
        let k3 = complete(3).unwrap();
        let id = NodeOrdering::identity(3);
        let deg: Vec<usize> = (0..3).map(|v| id.backward_degree(&k3, v)).collect();
        assert_eq!(deg, vec![0, 1, 2]);
        let mut r = ChaCha8Rng::seed_from_u64(1);
        for g in [cycle(7).unwrap(), crown(5).unwrap(), complete_bipartite(2, 3).unwrap()] {
            for _ in 0..20 {
                let p = NodeOrdering::random(g.node_count(), &mut r);
                assert!(p.backward_neighbors(&g, p.order()[0]).is_empty());
                let total: usize = (0..g.node_count()).map(|v| p.backward_degree(&g, v)).sum();
                assert_eq!(total, g.edge_count());
            }
        }
    }

    #[test]
    fn bfs_tree_order_has_one_parent() {
        let t = Graph::new(6, [(0, 1), (1, 2), (1, 3), (3, 4), (0, 5)]).unwrap();
        assert!(t.is_forest());
        let p = NodeOrdering::default_for(&t);
        for &v in &p.order()[1..] {
            assert_eq!(p.backward_degree(&t, v), 1);
        }
        assert!(!cycle(4).unwrap().is_forest());
    }

    #[test]
    fn ordering_validation_and_prefix() {
        assert!(NodeOrdering::new(vec![0, 2, 2]).is_err());
        let p = NodeOrdering::with_prefix(&[3, 1], &NodeOrdering::identity(5)).unwrap();
        assert_eq!(p.order(), &[3, 1, 0, 2, 4]);
        assert_eq!(p.position(0), 2);
    }

    #[test]
    fn induced_subgraph() {
        let c6 = cycle(6).unwrap();
        let p3 = c6.induced(&[0, 1, 2]);
        assert_eq!(p3.edges(), &[(0, 1), (1, 2)]);
    }
}
