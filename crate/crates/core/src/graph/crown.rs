use super::Graph;

/// `Some(n)` when `g` is isomorphic to the crown `Cr_n` (`n >= 4`).
///
/// Looks for a cyclic arrangement of one color class under which every
/// neighborhood of the other class is three cyclically consecutive nodes.
pub fn crown_size(g: &Graph) -> Option<usize> {
    let total = g.node_count();
    if total < 8 || !total.is_multiple_of(2) || g.edge_count() != 3 * total / 2 {
        return None;
    }
    if (0..total).any(|v| g.degree(v) != 3) || g.components().len() != 1 {
        return None;
    }
    let (u, w) = g.bipartition()?;
    let n = u.len();
    if w.len() != n {
        return None;
    }
    let mut triples: Vec<Vec<usize>> = w.iter().map(|&x| g.neighbors(x).to_vec()).collect();
    triples.sort_unstable();
    if triples.windows(2).any(|p| p[0] == p[1]) {
        return None;
    }
    let mut cyc = vec![u[0]];
    let mut used = vec![false; total];
    used[u[0]] = true;
    extend(&u, &triples, &mut cyc, &mut used).then_some(n)
}

fn window(cyc: &[usize], i: usize) -> Vec<usize> {
    let n = cyc.len();
    let mut t = vec![cyc[(i + n - 1) % n], cyc[i], cyc[(i + 1) % n]];
    t.sort_unstable();
    t
}

fn has_triple(triples: &[Vec<usize>], t: &[usize]) -> bool {
    triples.binary_search_by(|x| x.as_slice().cmp(t)).is_ok()
}

fn extend(u: &[usize], triples: &[Vec<usize>], cyc: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let k = cyc.len();
    if k >= 3 {
        let mut t = cyc[k - 3..].to_vec();
        t.sort_unstable();
        if !has_triple(triples, &t) {
            return false;
        }
    }
    if k == u.len() {
        return (0..k).all(|i| has_triple(triples, &window(cyc, i)));
    }
    for &v in u {
        if !used[v] {
            used[v] = true;
            cyc.push(v);
            if extend(u, triples, cyc, used) {
                return true;
            }
            cyc.pop();
            used[v] = false;
        }
    }
    false
}
