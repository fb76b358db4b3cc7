use super::Graph;

/// `g` recognized as the one-subdivision of `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub h: Graph,
    /// Node of `g` playing node `i` of `h`.
    pub original: Vec<usize>,
    /// Node of `g` subdividing edge `e` of `h` (sorted edge order).
    pub edge_nodes: Vec<usize>,
}

/// Recognizes `g` as a one-subdivision.
///
/// Per connected component, the subdivision nodes form one color class whose
/// members all have degree 2 and no two of which share both neighbors. If
/// both classes qualify, the class holding the component's smallest node is
/// taken as the subdivision side.
pub fn is_subdivision_of(g: &Graph) -> Option<Subdivision> {
    let colors = g.two_coloring()?;
    let mut is_sub = vec![false; g.node_count()];
    for comp in g.components() {
        let qualifies = |c: u8| -> bool {
            let side: Vec<usize> = comp.iter().copied().filter(|&v| colors[v] == c).collect();
            if !side.iter().all(|&v| g.degree(v) == 2) {
                return false;
            }
            let mut pairs: Vec<&[usize]> = side.iter().map(|&v| g.neighbors(v)).collect();
            pairs.sort_unstable();
            pairs.windows(2).all(|w| w[0] != w[1])
        };
        let first = colors[comp[0]];
        let chosen = if qualifies(first) {
            first
        } else if qualifies(1 - first) {
            1 - first
        } else {
            return None;
        };
        comp.iter().filter(|&&v| colors[v] == chosen).for_each(|&v| is_sub[v] = true);
    }
    let original: Vec<usize> = (0..g.node_count()).filter(|&v| !is_sub[v]).collect();
    let mut index = vec![usize::MAX; g.node_count()];
    for (i, &v) in original.iter().enumerate() {
        index[v] = i;
    }
    let mut pairs: Vec<((usize, usize), usize)> = (0..g.node_count())
        .filter(|&v| is_sub[v])
        .map(|v| {
            let (a, b) = (index[g.neighbors(v)[0]], index[g.neighbors(v)[1]]);
            ((a.min(b), a.max(b)), v)
        })
        .collect();
    pairs.sort_unstable();
    let h = Graph::new(original.len(), pairs.iter().map(|p| p.0)).ok()?;
    let edge_nodes = pairs.into_iter().map(|p| p.1).collect();
    Some(Subdivision { h, original, edge_nodes })
}
