//! Structural algebra of a coherent configuration: fibers, interspaces,
//! constituents, quotient graph, modules, direct sums, max-modules.

use crate::errors::{Error, Result};
use crate::graph::{ColorKey, ColoredDigraph};
use crate::refine::CoherentConfiguration;
use std::collections::{BTreeMap, HashMap};

/// The basis relations partitioning R x B, with degrees.
#[derive(Debug, Clone)]
pub struct Interspace {
    pub src: usize,
    pub dst: usize,
    /// non-loop relation ids (loops excluded when src == dst)
    pub relations: Vec<u32>,
    pub degrees: Vec<usize>,
    pub homogeneous: bool,
    pub d_min: usize,
}

pub fn interspace(c: &CoherentConfiguration, r: usize, b: usize) -> Result<Interspace> {
    if r >= c.fiber_count() {
        return Err(Error::UnknownFiber(r));
    }
    if b >= c.fiber_count() {
        return Err(Error::UnknownFiber(b));
    }
    let relations: Vec<u32> = c
        .interspace_relations(r, b)
        .into_iter()
        .filter(|&a| !c.relation(a).is_loop)
        .collect();
    let degrees: Vec<usize> = relations.iter().map(|&a| c.relation(a).degree).collect();
    let d_min = degrees.iter().copied().min().unwrap_or(0);
    // homogeneity counts loops for the intra-fiber case: |I[R,R]| = 1 never
    // holds once |R| > 1, so only the cross case matters in practice
    let count = if r == b { relations.len() + 1 } else { relations.len() };
    Ok(Interspace { src: r, dst: b, relations, degrees, homogeneous: count == 1, d_min })
}

/// The subgraph induced by one basis relation on its fiber(s): vertex list
/// (source fiber then target fiber when distinct) and arcs in local indices.
pub fn constituent(c: &CoherentConfiguration, a: u32) -> (Vec<usize>, Vec<(usize, usize)>) {
    let m = c.relation(a);
    let mut verts: Vec<usize> = c.fibers()[m.src_fiber].clone();
    if m.dst_fiber != m.src_fiber {
        verts.extend_from_slice(&c.fibers()[m.dst_fiber]);
    }
    let index: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut arcs = Vec::new();
    for &u in &c.fibers()[m.src_fiber] {
        for &v in &c.fibers()[m.dst_fiber] {
            if u != v && c.color(u, v) == a {
                arcs.push((index[&u], index[&v]));
            }
        }
    }
    (verts, arcs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FiberSizeClass {
    Tiny,
    Small,
    Large,
}

pub fn size_class(len: usize) -> FiberSizeClass {
    if len >= 8 {
        FiberSizeClass::Large
    } else if len >= 4 {
        FiberSizeClass::Small
    } else {
        FiberSizeClass::Tiny
    }
}

/// Fibers as vertices; edges where the interspace is non-homogeneous.
#[derive(Debug, Clone)]
pub struct QuotientGraph {
    pub fiber_sizes: Vec<usize>,
    pub adj: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
    pub size_class: Vec<FiberSizeClass>,
    /// small fiber of size 4 or 6 whose induced configuration has more than
    /// two underlying-undirected classes
    pub relevant: Vec<bool>,
}

impl QuotientGraph {
    pub fn degree(&self, f: usize) -> usize {
        self.adj[f].len()
    }

    pub fn neighbors(&self, f: usize) -> &[usize] {
        &self.adj[f]
    }

    /// Is every fiber in `set` or adjacent to a member of `set`?
    pub fn is_dominating(&self, set: &[usize]) -> bool {
        (0..self.fiber_sizes.len())
            .all(|f| set.contains(&f) || self.adj[f].iter().any(|x| set.contains(x)))
    }

    /// Subgraph induced by the fibers selected by `keep`, as (fiber ids,
    /// edges in the original numbering).
    pub fn induced(&self, keep: impl Fn(usize) -> bool) -> (Vec<usize>, Vec<(usize, usize)>) {
        let ids: Vec<usize> = (0..self.fiber_sizes.len()).filter(|&f| keep(f)).collect();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| keep(a) && keep(b))
            .collect();
        (ids, edges)
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.fiber_sizes.len();
        let mut comp = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut members = vec![];
            while let Some(v) = stack.pop() {
                members.push(v);
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

pub fn quotient_graph(c: &CoherentConfiguration) -> QuotientGraph {
    let f = c.fiber_count();
    let mut adj = vec![Vec::new(); f];
    let mut edges = Vec::new();
    for r in 0..f {
        for b in (r + 1)..f {
            let isp = interspace(c, r, b).expect("fiber ids in range");
            if !isp.homogeneous {
                adj[r].push(b);
                adj[b].push(r);
                edges.push((r, b));
            }
        }
    }
    let fiber_sizes: Vec<usize> = c.fibers().iter().map(|x| x.len()).collect();
    let size_class: Vec<FiberSizeClass> = fiber_sizes.iter().map(|&s| size_class(s)).collect();
    let relevant = (0..f)
        .map(|s| {
            matches!(fiber_sizes[s], 4 | 6) && ul_class_count(c, s) > 2
        })
        .collect();
    QuotientGraph { fiber_sizes, adj, edges, size_class, relevant }
}

/// The underlying undirected structure: each relation A replaced by
/// A union A*, transpose-paired relations merged into one class.
#[derive(Debug, Clone)]
pub struct UnderlyingUndirected {
    /// color -> ul class id
    pub class_of: Vec<u32>,
    /// per ul class: its member colors (one or a transpose pair)
    pub members: Vec<Vec<u32>>,
}

pub fn underlying_undirected(c: &CoherentConfiguration) -> UnderlyingUndirected {
    let k = c.rank();
    let mut class_of = vec![u32::MAX; k];
    let mut members: Vec<Vec<u32>> = Vec::new();
    for a in 0..k as u32 {
        if class_of[a as usize] != u32::MAX {
            continue;
        }
        let t = c.relation(a).transpose;
        let id = members.len() as u32;
        class_of[a as usize] = id;
        if t != a {
            class_of[t as usize] = id;
            members.push(vec![a.min(t), a.max(t)]);
        } else {
            members.push(vec![a]);
        }
    }
    UnderlyingUndirected { class_of, members }
}

/// Number of ul classes of the configuration induced on fiber `s`,
/// loop class included.
pub fn ul_class_count(c: &CoherentConfiguration, s: usize) -> usize {
    let ul = underlying_undirected(c);
    let mut ids: Vec<u32> = c
        .interspace_relations(s, s)
        .into_iter()
        .map(|a| ul.class_of[a as usize])
        .collect();
    ids.sort_unstable();
    ids.dedup();
    ids.len()
}

/// Undirected arc set of one ul class restricted to a fiber, in local
/// indices of that fiber.
pub fn ul_edges_on_fiber(c: &CoherentConfiguration, s: usize, colors: &[u32]) -> Vec<(usize, usize)> {
    let verts = &c.fibers()[s];
    let index: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out = Vec::new();
    for &u in verts {
        for &v in verts {
            if u < v && (colors.contains(&c.color(u, v)) || colors.contains(&c.color(v, u))) {
                out.push((index[&u], index[&v]));
            }
        }
    }
    out
}

/// Coarsest proper partition of fiber `s` into equal-size modules (every
/// part M has bA ∩ M ∈ {∅, M} for all outside b and all relations A), or
/// None when only the trivial partitions exist. Proper means at least two
/// parts and not all singletons; coherence forces the parts of a module
/// partition of a fiber to share one size.
pub fn find_modules(c: &CoherentConfiguration, s: usize) -> Result<Option<Vec<Vec<usize>>>> {
    let fiber = &c.fibers()[s];
    let sz = fiber.len();
    if sz > 10 {
        return Err(Error::SizeGuard { what: "module search fiber size", actual: sz, limit: 10 });
    }
    if sz < 2 {
        return Ok(None);
    }
    let n = c.n();
    let is_module = |part: &[usize]| -> bool {
        if part.len() == sz {
            return false;
        }
        for b in 0..n {
            if part.contains(&b) {
                continue;
            }
            for a in 0..c.rank() as u32 {
                let hits = part.iter().filter(|&&v| c.color(b, v) == a).count();
                if hits != 0 && hits != part.len() {
                    return false;
                }
            }
        }
        true
    };
    // enumerate set partitions of the fiber via restricted-growth strings,
    // grouped by part count ascending
    let mut best: Option<Vec<Vec<usize>>> = None;
    let mut rgs = vec![0usize; sz];
    loop {
        let parts_count = rgs.iter().copied().max().unwrap() + 1;
        if parts_count >= 2 && parts_count < sz && sz % parts_count == 0 {
            let mut parts: Vec<Vec<usize>> = vec![Vec::new(); parts_count];
            for (i, &p) in rgs.iter().enumerate() {
                parts[p].push(fiber[i]);
            }
            let equal_sized = parts.iter().all(|p| p.len() == sz / parts_count);
            if equal_sized && parts.iter().all(|p| is_module(p)) {
                let better = match &best {
                    None => true,
                    Some(b) => parts_count < b.len(),
                };
                if better {
                    best = Some(parts);
                }
            }
        }
        // next restricted-growth string
        let mut i = sz;
        loop {
            if i == 1 {
                return Ok(best);
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap();
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for x in rgs.iter_mut().skip(i + 1) {
                    *x = 0;
                }
                break;
            }
            rgs[i] = 0;
        }
    }
}

/// Direct sum: both summands' relations plus one full relation per ordered
/// cross fiber pair.
pub fn direct_sum(
    c1: &CoherentConfiguration,
    c2: &CoherentConfiguration,
) -> Result<CoherentConfiguration> {
    let (n1, n2) = (c1.n(), c2.n());
    let n = n1 + n2;
    let k1 = c1.rank() as u32;
    let k2 = c2.rank() as u32;
    let mut colors = vec![0u32; n * n];
    for u in 0..n1 {
        for v in 0..n1 {
            colors[u * n + v] = c1.color(u, v);
        }
    }
    for u in 0..n2 {
        for v in 0..n2 {
            colors[(n1 + u) * n + (n1 + v)] = k1 + c2.color(u, v);
        }
    }
    let mut next = k1 + k2;
    let mut cross: HashMap<(usize, usize, bool), u32> = HashMap::new();
    for u in 0..n1 {
        for v in 0..n2 {
            let pair = (c1.fiber_of(u), c2.fiber_of(v));
            let fwd = *cross.entry((pair.0, pair.1, false)).or_insert_with(|| {
                let id = next;
                next += 2;
                id
            });
            colors[u * n + (n1 + v)] = fwd;
            colors[(n1 + v) * n + u] = fwd + 1;
        }
    }
    let keys: Vec<ColorKey> = (0..next as u64).map(ColorKey::Derived).collect();
    let g = ColoredDigraph::from_parts(n, colors, keys);
    CoherentConfiguration::from_closed(g)
}

/// For every unordered fiber pair, the designated maximal relation: largest
/// degree among the non-loop relations, ties broken by canonical color
/// order; its transpose is the designated one on the reverse side.
pub fn maximal_relations(c: &CoherentConfiguration) -> Vec<u32> {
    let mut maximal = Vec::new();
    for r in 0..c.fiber_count() {
        for b in r..c.fiber_count() {
            let rels: Vec<u32> = c
                .interspace_relations(r, b)
                .into_iter()
                .filter(|&a| !c.relation(a).is_loop)
                .collect();
            if rels.is_empty() {
                continue;
            }
            let &best = rels
                .iter()
                .max_by(|&&x, &&y| {
                    c.relation(x)
                        .degree
                        .cmp(&c.relation(y).degree)
                        .then(y.cmp(&x))
                })
                .unwrap();
            maximal.push(best);
            let t = c.relation(best).transpose;
            if t != best {
                maximal.push(t);
            }
        }
    }
    maximal.sort_unstable();
    maximal.dedup();
    maximal
}

/// Maximum degree among non-maximal relations of I[r][b]; 0 when the
/// interspace is a single relation.
pub fn non_maximal_degree_bound(c: &CoherentConfiguration, r: usize, b: usize) -> usize {
    let maximal = maximal_relations(c);
    c.interspace_relations(r, b)
        .into_iter()
        .filter(|&a| !c.relation(a).is_loop && !maximal.contains(&a))
        .map(|a| c.relation(a).degree)
        .max()
        .unwrap_or(0)
}

/// Connected components of the union of all non-maximal basis relations.
pub fn max_modules(c: &CoherentConfiguration) -> Vec<Vec<usize>> {
    let n = c.n();
    let maximal = maximal_relations(c);
    let non_max: Vec<bool> = (0..c.rank() as u32)
        .map(|a| !c.relation(a).is_loop && !maximal.contains(&a))
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for u in 0..n {
        for v in 0..n {
            if u != v && non_max[c.color(u, v) as usize] {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru] = rv;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}
