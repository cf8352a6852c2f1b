//! Exact treewidth by dynamic programming over elimination prefixes, with a
//! greedy fill-in fallback above the exact size limit. Decompositions are
//! rebuilt from elimination orders and verified against the axioms.

use std::collections::HashMap;

/// A tree decomposition: bags plus tree edges between bag indices.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub tree_edges: Vec<(usize, usize)>,
    pub width: usize,
    pub exact: bool,
}

#[derive(Debug, Clone)]
pub struct UGraph {
    pub n: usize,
    adj: Vec<u64>,
}

impl UGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        assert!(n <= 64, "treewidth solver works on at most 64 vertices");
        let mut adj = vec![0u64; n];
        for &(u, v) in edges {
            if u != v {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
        Self { n, adj }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = vec![];
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.adj[u] >> v & 1 == 1 {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// Neighbors of v in the graph where the eliminated set S is contracted:
/// vertices outside S reachable from v through S.
fn fill_degree_set(g: &UGraph, eliminated: u64, v: usize) -> u64 {
    let mut seen = 1u64 << v;
    let mut frontier = 1u64 << v;
    let mut result = 0u64;
    while frontier != 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let u = f.trailing_zeros() as usize;
            f &= f - 1;
            let nb = g.adj[u] & !seen;
            result |= nb & !eliminated;
            next |= nb & eliminated;
            seen |= nb;
        }
        frontier = next;
    }
    result
}

/// Exact treewidth by the elimination-prefix DP: tw(S) is the best over
/// orders eliminating exactly S first.
fn exact_treewidth(g: &UGraph) -> (usize, Vec<usize>) {
    let n = g.n;
    if n == 0 {
        return (0, vec![]);
    }
    // best[S] = (width of best prefix, last vertex eliminated)
    let mut best: HashMap<u64, (usize, usize)> = HashMap::new();
    best.insert(0, (0, usize::MAX));
    let full: u64 = if n == 64 { !0 } else { (1 << n) - 1 };
    // iterate subsets by popcount layers
    let mut layers: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    let mut s: u64 = 0;
    loop {
        layers[s.count_ones() as usize].push(s);
        if s == full {
            break;
        }
        s += 1;
    }
    for layer in 0..n {
        for &set in &layers[layer] {
            let Some(&(w, _)) = best.get(&set) else { continue };
            let mut rest = full & !set;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let deg = fill_degree_set(g, set, v).count_ones() as usize;
                let nw = w.max(deg);
                let nset = set | (1 << v);
                match best.get(&nset) {
                    Some(&(old, _)) if old <= nw => {}
                    _ => {
                        best.insert(nset, (nw, v));
                    }
                }
            }
        }
    }
    let (width, _) = best[&full];
    // reconstruct the elimination order
    let mut order = Vec::with_capacity(n);
    let mut cur = full;
    while cur != 0 {
        let (_, v) = best[&cur];
        order.push(v);
        cur &= !(1 << v);
    }
    order.reverse();
    (width, order)
}

/// Greedy minimum-fill elimination order; yields an upper bound.
fn greedy_order(g: &UGraph) -> (usize, Vec<usize>) {
    let n = g.n;
    let mut adj = g.adj.clone();
    let mut alive: u64 = if n == 0 { 0 } else if n == 64 { !0 } else { (1 << n) - 1 };
    let mut order = Vec::with_capacity(n);
    let mut width = 0usize;
    while alive != 0 {
        let mut best_v = usize::MAX;
        let mut best_fill = usize::MAX;
        let mut best_deg = usize::MAX;
        let mut a = alive;
        while a != 0 {
            let v = a.trailing_zeros() as usize;
            a &= a - 1;
            let nb = adj[v] & alive;
            let deg = nb.count_ones() as usize;
            let mut fill = 0usize;
            let mut x = nb;
            while x != 0 {
                let u = x.trailing_zeros() as usize;
                x &= x - 1;
                fill += (nb & !adj[u] & !(1 << u)).count_ones() as usize;
            }
            if (fill, deg) < (best_fill, best_deg) {
                best_fill = fill;
                best_deg = deg;
                best_v = v;
            }
        }
        let v = best_v;
        let nb = adj[v] & alive;
        width = width.max(nb.count_ones() as usize);
        // make the neighborhood a clique
        let mut x = nb;
        while x != 0 {
            let u = x.trailing_zeros() as usize;
            x &= x - 1;
            adj[u] |= nb & !(1 << u);
        }
        alive &= !(1 << v);
        order.push(v);
    }
    (width, order)
}

/// Builds the decomposition from an elimination order: the bag of v is v
/// plus its higher neighbors in the filled graph; each bag links to the bag
/// of its first-eliminated higher neighbor.
fn decomposition_from_order(g: &UGraph, order: &[usize], exact: bool) -> TreeDecomposition {
    let n = g.n;
    if n == 0 {
        return TreeDecomposition { bags: vec![vec![]], tree_edges: vec![], width: 0, exact };
    }
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj = g.adj.clone();
    let mut bags: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut width = 0usize;
    let mut eliminated: u64 = 0;
    for &v in order {
        let nb = adj[v] & !eliminated & !(1 << v);
        let mut bag = vec![v];
        let mut x = nb;
        while x != 0 {
            let u = x.trailing_zeros() as usize;
            x &= x - 1;
            bag.push(u);
        }
        bag.sort_unstable();
        width = width.max(bag.len().saturating_sub(1));
        bags[pos[v]] = bag;
        let mut x = nb;
        while x != 0 {
            let u = x.trailing_zeros() as usize;
            x &= x - 1;
            adj[u] |= nb & !(1 << u);
        }
        eliminated |= 1 << v;
    }
    let mut tree_edges = Vec::new();
    for i in 0..n {
        let v = order[i];
        let later: Vec<usize> = bags[i].iter().copied().filter(|&u| u != v).collect();
        if let Some(&next) = later.iter().min_by_key(|&&u| pos[u]) {
            tree_edges.push((i, pos[next]));
        } else if i + 1 < n {
            // keep the tree connected across graph components
            tree_edges.push((i, i + 1));
        }
    }
    TreeDecomposition { bags, tree_edges, width, exact }
}

/// Checks the decomposition axioms: vertex cover, edge cover, and
/// connectivity of each vertex's bag set.
pub fn verify_decomposition(g: &UGraph, td: &TreeDecomposition) -> bool {
    let n = g.n;
    let mut covered = vec![false; n];
    for bag in &td.bags {
        for &v in bag {
            if v >= n {
                return false;
            }
            covered[v] = true;
        }
    }
    if covered.iter().any(|&c| !c) && n > 0 {
        return false;
    }
    for (u, v) in g.edges() {
        if !td.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            return false;
        }
    }
    if td.bags.iter().any(|b| b.len() > td.width + 1) {
        return false;
    }
    // connectivity: the bags containing v form a subtree
    let b = td.bags.len();
    let mut tree_adj = vec![Vec::new(); b];
    for &(x, y) in &td.tree_edges {
        tree_adj[x].push(y);
        tree_adj[y].push(x);
    }
    for v in 0..n {
        let holds: Vec<usize> = (0..b).filter(|&i| td.bags[i].contains(&v)).collect();
        if holds.is_empty() {
            return false;
        }
        let mut seen = vec![false; b];
        let mut stack = vec![holds[0]];
        seen[holds[0]] = true;
        while let Some(x) = stack.pop() {
            for &y in &tree_adj[x] {
                if !seen[y] && td.bags[y].contains(&v) {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if holds.iter().any(|&i| !seen[i]) {
            return false;
        }
    }
    true
}

/// Treewidth with a verified decomposition: exact for |V| <= exact_limit,
/// otherwise a greedy upper bound flagged non-exact.
pub fn treewidth(g: &UGraph, exact_limit: usize) -> (usize, TreeDecomposition) {
    let (width, order, exact) = if g.n <= exact_limit {
        let (w, o) = exact_treewidth(g);
        (w, o, true)
    } else {
        let (w, o) = greedy_order(g);
        (w, o, false)
    };
    let td = decomposition_from_order(g, &order, exact);
    debug_assert!(verify_decomposition(g, &td));
    debug_assert_eq!(td.width, width);
    (td.width, td)
}

/// Brute-force oracle: minimum over all elimination orders of the maximum
/// fill degree. Only for tiny graphs.
pub fn treewidth_by_elimination_orders(g: &UGraph) -> usize {
    let n = g.n;
    assert!(n <= 9, "oracle limited to 9 vertices");
    fn go(g: &UGraph, eliminated: u64, remaining: &mut Vec<usize>, cur: usize, best: &mut usize) {
        if cur >= *best {
            return;
        }
        if remaining.is_empty() {
            *best = cur;
            return;
        }
        for i in 0..remaining.len() {
            let v = remaining.swap_remove(i);
            let deg = fill_degree_set(g, eliminated, v).count_ones() as usize;
            go(g, eliminated | (1 << v), remaining, cur.max(deg), best);
            remaining.push(v);
            let last = remaining.len() - 1;
            remaining.swap(i, last);
        }
    }
    let mut best = n.saturating_sub(1).max(0);
    let mut rem: Vec<usize> = (0..n).collect();
    if n == 0 {
        return 0;
    }
    go(g, 0, &mut rem, 0, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_has_width_one() {
        let g = UGraph::new(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]);
        let (w, td) = treewidth(&g, 15);
        assert_eq!(w, 1);
        assert!(verify_decomposition(&g, &td));
    }

    #[test]
    fn k4_has_width_three() {
        let g = UGraph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let (w, td) = treewidth(&g, 15);
        assert_eq!(w, 3);
        assert!(verify_decomposition(&g, &td));
    }

    #[test]
    fn grid_3x3_has_width_three() {
        let mut edges = vec![];
        for r in 0..3 {
            for c in 0..3 {
                let v = r * 3 + c;
                if c + 1 < 3 {
                    edges.push((v, v + 1));
                }
                if r + 1 < 3 {
                    edges.push((v, v + 3));
                }
            }
        }
        let g = UGraph::new(9, &edges);
        let (w, td) = treewidth(&g, 15);
        assert_eq!(w, 3);
        assert_eq!(treewidth_by_elimination_orders(&g), 3);
        assert!(verify_decomposition(&g, &td));
    }

    #[test]
    fn cycle_has_width_two() {
        let g = UGraph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let (w, _) = treewidth(&g, 15);
        assert_eq!(w, 2);
    }

    #[test]
    fn empty_graph() {
        let g = UGraph::new(0, &[]);
        let (w, td) = treewidth(&g, 15);
        assert_eq!(w, 0);
        assert!(verify_decomposition(&g, &td));
    }
}
