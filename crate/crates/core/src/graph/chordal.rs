use super::{Graph, NodeOrdering};

/// True when every node's earlier neighbors are pairwise adjacent.
pub fn is_clique_ordering(g: &Graph, p: &NodeOrdering) -> bool {
    p.order().iter().all(|&v| {
        let back = p.backward_neighbors(g, v);
        back.iter().enumerate().all(|(i, &a)| back[i + 1..].iter().all(|&b| g.has_edge(a, b)))
    })
}

/// Lexicographic breadth-first visit order from `start`. Ties go to the
/// smallest node.
fn lex_bfs(g: &Graph, start: usize) -> Vec<usize> {
    let n = g.node_count();
    let mut labels: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for step in 0..n {
        let v = if step == 0 && start < n {
            start
        } else {
            (0..n).filter(|&v| !visited[v]).max_by(|&a, &b| labels[a].cmp(&labels[b]).then(b.cmp(&a))).expect("unvisited node")
        };
        visited[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !visited[w] {
                labels[w].push(n - step);
            }
        }
    }
    order
}

/// An ordering whose backward neighborhoods are cliques, if `g` is chordal.
pub fn elimination_ordering(g: &Graph) -> Option<NodeOrdering> {
    elimination_ordering_from(g, 0)
}

/// As [`elimination_ordering`], starting the search at `start`.
pub fn elimination_ordering_from(g: &Graph, start: usize) -> Option<NodeOrdering> {
    let p = NodeOrdering::new(lex_bfs(g, start)).expect("search visits every node once");
    is_clique_ordering(g, &p).then_some(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, path};

    /// Brute-force chordality: no induced cycle of length >= 4.
    fn chordal_oracle(g: &Graph) -> bool {
        let n = g.node_count();
        for mask in 0u32..(1 << n) {
            let nodes: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if nodes.len() < 4 {
                continue;
            }
            let h = g.induced(&nodes);
            if (0..h.node_count()).all(|v| h.degree(v) == 2) && h.components().len() == 1 {
                return false;
            }
        }
        true
    }

    #[test]
    fn examples() {
        let k5 = complete(5).unwrap();
        assert!(is_clique_ordering(&k5, &elimination_ordering(&k5).unwrap()));
        assert!(elimination_ordering(&cycle(4).unwrap()).is_none());
        let t = path(6).unwrap();
        assert!(is_clique_ordering(&t, &elimination_ordering_from(&t, 3).unwrap()));
    }

    #[test]
    fn agrees_with_brute_force_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let n = r.random_range(1..9);
            let edges: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| r.random::<f64>() < 0.45).collect();
            let g = Graph::new(n, edges).unwrap();
            let expected = chordal_oracle(&g);
            for s in 0..n {
                let p = elimination_ordering_from(&g, s);
                assert_eq!(p.is_some(), expected, "{g:?} start {s}");
            }
        }
    }
}
