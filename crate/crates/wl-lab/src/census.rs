//! Named small graphs, the exhaustive census of homogeneous coherent
//! configurations of order at most 7, interspaces between small fibers, and
//! factories for pattern instances.

use crate::algebra;
use crate::errors::{Error, Result};
use crate::graph::ColoredDigraph;
use crate::iso;
use crate::refine::{coherent_closure, CoherentConfiguration};
use std::collections::{HashMap, HashSet};
use std::fmt;

/// Isomorphism type of a constituent graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstituentType {
    /// K_n
    Clique(usize),
    /// undirected C_n
    Cycle(usize),
    /// directed C_n
    DirectedCycle(usize),
    /// s disjoint K_k, s >= 2
    DisjointCliques(usize, usize),
    /// s disjoint directed C_k, s >= 2
    DisjointDirectedCycles(usize, usize),
    /// complete multipartite with `parts` classes of size `part_size`
    /// (K_{2,2,2} and K_{3,3} in the census range)
    CompleteMultipartite { parts: usize, part_size: usize },
    /// directed triangle with doubled vertices
    WreathTriangle,
    /// Paley tournament on 7 vertices
    PaleyTournament7,
    /// perfect matching between two fibers of size n
    Matching(usize),
    /// direction-alternating cycle of length 2n in an interspace
    AlternatingCycle(usize),
    /// s disjoint complete bipartite blocks K_{a,b}, directed R -> B
    CompleteBipartite(usize, usize, usize),
    /// point-line incidence of the Fano plane (7+7, any two points share
    /// exactly one line)
    FanoIncidence,
    /// vertex-edge incidence of K4 (4+6)
    K4Incidence,
    /// K_{n,n} minus a perfect matching
    Crown(usize),
    /// the n x n rook graph
    Rook(usize),
    ComplementOf(Box<ConstituentType>),
    Other(u64),
}

impl fmt::Display for ConstituentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ConstituentType::*;
        match self {
            Clique(n) => write!(f, "K{n}"),
            Cycle(n) => write!(f, "C{n}"),
            DirectedCycle(n) => write!(f, "dC{n}"),
            DisjointCliques(s, k) => write!(f, "{s}K{k}"),
            DisjointDirectedCycles(s, k) => write!(f, "{s}dC{k}"),
            CompleteMultipartite { parts, part_size } => {
                write!(f, "K{}", vec![part_size.to_string(); *parts].join(","))
            }
            WreathTriangle => write!(f, "dC3[K2]"),
            PaleyTournament7 => write!(f, "PTr7"),
            Matching(n) => write!(f, "M{n}"),
            AlternatingCycle(n) => write!(f, "C{n}"),
            CompleteBipartite(s, a, b) => {
                if *s == 1 {
                    write!(f, "K{{{a},{b}}}")
                } else {
                    write!(f, "{s}K{{{a},{b}}}")
                }
            }
            FanoIncidence => write!(f, "I(F)"),
            K4Incidence => write!(f, "I(K4,6)"),
            Crown(n) => write!(f, "K{{{n},{n}}}-{n}K2"),
            Rook(n) => write!(f, "R{n}"),
            ComplementOf(inner) => write!(f, "co({inner})"),
            Other(h) => write!(f, "other#{h:016x}"),
        }
    }
}

fn out_degrees(n_src: usize, arcs: &[(usize, usize)]) -> Vec<usize> {
    let mut d = vec![0usize; n_src];
    for &(u, _) in arcs {
        d[u] += 1;
    }
    d
}

fn constant(v: &[usize]) -> Option<usize> {
    match v.first() {
        None => Some(0),
        Some(&x) if v.iter().all(|&y| y == x) => Some(x),
        _ => None,
    }
}

fn undirected_components(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in arcs {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut comp = vec![];
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

fn invariant_hash(n: usize, arcs: &[(usize, usize)]) -> u64 {
    // canonical hash for small orders: minimum adjacency code over all
    // vertex permutations
    if n <= 8 {
        let mut set = HashSet::new();
        for &a in arcs {
            set.insert(a);
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best: Option<Vec<u8>> = None;
        loop {
            let mut code = vec![0u8; n * n];
            for &(u, v) in arcs {
                code[perm[u] * n + perm[v]] = 1;
            }
            if best.as_ref().map_or(true, |b| code < *b) {
                best = Some(code);
            }
            // next permutation
            let mut i = n.wrapping_sub(1);
            while i > 0 && perm[i - 1] >= perm[i] {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let mut j = n - 1;
            while perm[j] <= perm[i - 1] {
                j -= 1;
            }
            perm.swap(i - 1, j);
            perm[i..].reverse();
        }
        let code = best.unwrap();
        let mut h = 0xcbf29ce484222325u64;
        for byte in code {
            h = (h ^ byte as u64).wrapping_mul(0x100000001b3);
        }
        h
    } else {
        let mut degs: Vec<(usize, usize)> = Vec::new();
        let out = out_degrees(n, arcs);
        let mut ind = vec![0usize; n];
        for &(_, v) in arcs {
            ind[v] += 1;
        }
        for v in 0..n {
            degs.push((out[v], ind[v]));
        }
        degs.sort_unstable();
        let mut h = 0xcbf29ce484222325u64 ^ (n as u64);
        for (a, b) in degs {
            h = (h ^ (a as u64) << 32 ^ b as u64).wrapping_mul(0x100000001b3);
        }
        h
    }
}

/// Recognizes the isomorphism type of a relation within one fiber.
pub fn recognize_fiber_constituent(n: usize, arcs: &[(usize, usize)]) -> Result<ConstituentType> {
    if n > 64 {
        return Err(Error::SizeGuard { what: "constituent recognition", actual: n, limit: 64 });
    }
    let set: HashSet<(usize, usize)> = arcs.iter().copied().collect();
    let symmetric = arcs.iter().all(|&(u, v)| set.contains(&(v, u)));
    let antisymmetric = arcs.iter().all(|&(u, v)| !set.contains(&(v, u)));
    let out = out_degrees(n, arcs);
    let comps = undirected_components(n, arcs);

    if symmetric {
        let deg = constant(&out);
        if arcs.len() == n * (n - 1) {
            return Ok(ConstituentType::Clique(n));
        }
        if deg == Some(2) && comps.len() == 1 && n >= 3 {
            return Ok(ConstituentType::Cycle(n));
        }
        // disjoint equal cliques
        let sizes: Vec<usize> = comps.iter().map(|c| c.len()).collect();
        if let Some(k) = constant(&sizes) {
            if comps.len() >= 2
                && k >= 2
                && arcs.len() == comps.len() * k * (k - 1)
                && comps.iter().all(|c| {
                    c.iter()
                        .all(|&u| c.iter().all(|&v| u == v || set.contains(&(u, v))))
                })
            {
                return Ok(ConstituentType::DisjointCliques(comps.len(), k));
            }
        }
        // complete multipartite: complement is disjoint equal cliques
        let comp_arcs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && !set.contains(&(u, v)))
            .collect();
        if let Ok(ConstituentType::DisjointCliques(s, k)) =
            recognize_fiber_constituent_inner(n, &comp_arcs)
        {
            return Ok(ConstituentType::CompleteMultipartite { parts: s, part_size: k });
        }
        // crown: complete bipartite minus a perfect matching
        if n % 2 == 0 && n >= 6 && deg == Some(n / 2 - 1) {
            let h = n / 2;
            let template: Vec<(usize, usize)> = (0..h)
                .flat_map(|i| (0..h).filter(move |&j| j != i).flat_map(move |j| [(i, h + j), (h + j, i)]))
                .collect();
            if iso::digraphs_isomorphic(n, arcs, n, &template) {
                return Ok(ConstituentType::Crown(h));
            }
        }
        // rook graph on a square order
        let m = (1..=8).find(|&m| m * m == n);
        if let Some(m) = m {
            if m >= 2 && deg == Some(2 * (m - 1)) {
                let mut template = vec![];
                for a in 0..n {
                    for b in 0..n {
                        if a != b && (a / m == b / m || a % m == b % m) {
                            template.push((a, b));
                        }
                    }
                }
                if iso::digraphs_isomorphic(n, arcs, n, &template) {
                    return Ok(ConstituentType::Rook(m));
                }
            }
        }
    }
    if antisymmetric {
        let deg = constant(&out);
        let mut ind = vec![0usize; n];
        for &(_, v) in arcs {
            ind[v] += 1;
        }
        if deg == Some(1) && constant(&ind) == Some(1) {
            if comps.len() == 1 {
                return Ok(ConstituentType::DirectedCycle(n));
            }
            let sizes: Vec<usize> = comps.iter().map(|c| c.len()).collect();
            if let Some(k) = constant(&sizes) {
                return Ok(ConstituentType::DisjointDirectedCycles(comps.len(), k));
            }
        }
        if n == 7 && arcs.len() == 21 && deg == Some(3) {
            let paley: Vec<(usize, usize)> = (0..7)
                .flat_map(|u| [1usize, 2, 4].iter().map(move |&d| (u, (u + d) % 7)))
                .collect();
            if iso::digraphs_isomorphic(7, arcs, 7, &paley) {
                return Ok(ConstituentType::PaleyTournament7);
            }
        }
        if n == 6 && arcs.len() == 12 && deg == Some(2) {
            let wreath: Vec<(usize, usize)> = (0..3)
                .flat_map(|i| {
                    let j = (i + 1) % 3;
                    [
                        (2 * i, 2 * j),
                        (2 * i, 2 * j + 1),
                        (2 * i + 1, 2 * j),
                        (2 * i + 1, 2 * j + 1),
                    ]
                })
                .collect();
            if iso::digraphs_isomorphic(6, arcs, 6, &wreath) {
                return Ok(ConstituentType::WreathTriangle);
            }
        }
    }
    Ok(ConstituentType::Other(invariant_hash(n, arcs)))
}

fn recognize_fiber_constituent_inner(n: usize, arcs: &[(usize, usize)]) -> Result<ConstituentType> {
    // avoid infinite complement recursion: only the clique-component branch
    let set: HashSet<(usize, usize)> = arcs.iter().copied().collect();
    let comps = undirected_components(n, arcs);
    let sizes: Vec<usize> = comps.iter().map(|c| c.len()).collect();
    if let Some(k) = constant(&sizes) {
        if comps.len() >= 2
            && k >= 2
            && arcs.len() == comps.len() * k * (k - 1)
            && comps.iter().all(|c| {
                c.iter()
                    .all(|&u| c.iter().all(|&v| u == v || set.contains(&(u, v))))
            })
        {
            return Ok(ConstituentType::DisjointCliques(comps.len(), k));
        }
    }
    Ok(ConstituentType::Other(0))
}

/// Recognizes the isomorphism type of an interspace relation. Vertices are
/// local: sources 0..r, targets 0..b; arcs go source -> target.
pub fn recognize_cross_constituent(
    r: usize,
    b: usize,
    arcs: &[(usize, usize)],
) -> Result<ConstituentType> {
    if r + b > 64 {
        return Err(Error::SizeGuard { what: "constituent recognition", actual: r + b, limit: 64 });
    }
    recognize_cross_inner(r, b, arcs, true)
}

fn recognize_cross_inner(
    r: usize,
    b: usize,
    arcs: &[(usize, usize)],
    allow_complement: bool,
) -> Result<ConstituentType> {
    let out = out_degrees(r, arcs);
    let mut ind = vec![0usize; b];
    for &(_, v) in arcs {
        ind[v] += 1;
    }
    let d = constant(&out);
    let d_in = constant(&ind);
    if d.is_none() || d_in.is_none() {
        let global: Vec<(usize, usize)> = arcs.iter().map(|&(u, v)| (u, r + v)).collect();
        return Ok(ConstituentType::Other(invariant_hash(r + b, &global)));
    }
    let (d, d_in) = (d.unwrap(), d_in.unwrap());
    if d == 1 && d_in == 1 && r == b {
        return Ok(ConstituentType::Matching(r));
    }
    if d == b && d_in == r {
        return Ok(ConstituentType::CompleteBipartite(1, r, b));
    }
    // bipartite components on r + b vertices
    let global: Vec<(usize, usize)> = arcs.iter().map(|&(u, v)| (u, r + v)).collect();
    let comps = undirected_components(r + b, &global);
    let comps: Vec<&Vec<usize>> = comps.iter().filter(|c| c.len() > 1).collect();
    if d == 2 && d_in == 2 && comps.len() == 1 && comps[0].len() == r + b {
        return Ok(ConstituentType::AlternatingCycle(r + b));
    }
    // equal complete bipartite blocks
    if comps.len() >= 2 || (comps.len() == 1 && comps[0].len() < r + b) {
        let a_sizes: Vec<usize> = comps.iter().map(|c| c.iter().filter(|&&v| v < r).count()).collect();
        let b_sizes: Vec<usize> = comps.iter().map(|c| c.iter().filter(|&&v| v >= r).count()).collect();
        if let (Some(pa), Some(pb)) = (constant(&a_sizes), constant(&b_sizes)) {
            if comps.len() * pa == r
                && comps.len() * pb == b
                && arcs.len() == comps.len() * pa * pb
            {
                return Ok(ConstituentType::CompleteBipartite(comps.len(), pa, pb));
            }
        }
    }
    // incidence structures: any two sources share exactly one target
    let shares_one = |arcs: &[(usize, usize)]| -> bool {
        let mut nb: Vec<HashSet<usize>> = vec![HashSet::new(); r];
        for &(u, v) in arcs {
            nb[u].insert(v);
        }
        (0..r).all(|u| (0..r).all(|w| u == w || nb[u].intersection(&nb[w]).count() == 1))
    };
    if r == 7 && b == 7 && d == 3 && shares_one(arcs) {
        return Ok(ConstituentType::FanoIncidence);
    }
    if r == 4 && b == 6 && d == 3 && shares_one(arcs) {
        return Ok(ConstituentType::K4Incidence);
    }
    if r == b && d == r - 1 && d_in == r - 1 {
        // complement within R x B is a perfect matching
        let set: HashSet<(usize, usize)> = arcs.iter().copied().collect();
        let missing: Vec<(usize, usize)> = (0..r)
            .flat_map(|u| (0..b).map(move |v| (u, v)))
            .filter(|p| !set.contains(p))
            .collect();
        if let Ok(ConstituentType::Matching(_)) = recognize_cross_inner(r, b, &missing, false) {
            return Ok(ConstituentType::Crown(r));
        }
    }
    if allow_complement {
        let set: HashSet<(usize, usize)> = arcs.iter().copied().collect();
        let missing: Vec<(usize, usize)> = (0..r)
            .flat_map(|u| (0..b).map(move |v| (u, v)))
            .filter(|p| !set.contains(p))
            .collect();
        let inner = recognize_cross_inner(r, b, &missing, false)?;
        if !matches!(inner, ConstituentType::Other(_)) {
            return Ok(ConstituentType::ComplementOf(Box::new(inner)));
        }
    }
    Ok(ConstituentType::Other(invariant_hash(r + b, &global)))
}

/// Recognition dispatcher for a relation of a configuration.
pub fn recognize_constituent(c: &CoherentConfiguration, a: u32) -> Result<ConstituentType> {
    let m = c.relation(a);
    if m.is_loop {
        return Err(Error::Argument("loop relations have no constituent type".into()));
    }
    let (verts, arcs) = algebra::constituent(c, a);
    if m.src_fiber == m.dst_fiber {
        recognize_fiber_constituent(verts.len(), &arcs)
    } else {
        let r = c.fibers()[m.src_fiber].len();
        let b = c.fibers()[m.dst_fiber].len();
        let local: Vec<(usize, usize)> = arcs.iter().map(|&(u, v)| (u, v - r)).collect();
        recognize_cross_constituent(r, b, &local)
    }
}

/// Type tuple of the configuration induced by a fiber: one constituent per
/// transpose pair, loops omitted, sorted canonically.
pub fn constituent_tuple(c: &CoherentConfiguration, s: usize) -> Result<Vec<ConstituentType>> {
    let mut seen: HashSet<u32> = HashSet::new();
    let mut tuple = Vec::new();
    for a in c.interspace_relations(s, s) {
        if c.relation(a).is_loop || seen.contains(&a) {
            continue;
        }
        seen.insert(a);
        seen.insert(c.relation(a).transpose);
        tuple.push(recognize_constituent(c, a)?);
    }
    tuple.sort();
    Ok(tuple)
}

/// Type tuple per the census convention; the order must be at most 7, where
/// the tuple determines the isomorphism type.
pub fn cc_type(c: &CoherentConfiguration, s: usize) -> Result<Vec<ConstituentType>> {
    if s >= c.fiber_count() {
        return Err(Error::UnknownFiber(s));
    }
    let sz = c.fibers()[s].len();
    if sz > 7 {
        return Err(Error::UnsupportedOrder { n: sz, what: "census covers order at most 7" });
    }
    constituent_tuple(c, s)
}

/// All colors of I[r][b] with their constituent types, sorted; the
/// interspace type of the census tables.
pub fn interspace_type(c: &CoherentConfiguration, r: usize, b: usize) -> Result<Vec<ConstituentType>> {
    let mut tuple = Vec::new();
    for a in c.interspace_relations(r, b) {
        tuple.push(recognize_constituent(c, a)?);
    }
    tuple.sort();
    Ok(tuple)
}

/// One row of the homogeneous census.
#[derive(Debug, Clone)]
pub struct CensusEntry {
    pub order: usize,
    pub type_tuple: Vec<ConstituentType>,
    pub representative: CoherentConfiguration,
}

pub fn format_tuple(tuple: &[ConstituentType], order: usize) -> String {
    if tuple.is_empty() && order == 1 {
        return "(K1)".to_string();
    }
    format!(
        "({})",
        tuple.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
    )
}

/// The expected census rows for orders 1..=7: per-order lists of type
/// tuples, each sorted canonically.
pub fn expected_census(order: usize) -> Vec<Vec<ConstituentType>> {
    use ConstituentType::*;
    let sortv = |mut v: Vec<ConstituentType>| {
        v.sort();
        v
    };
    let rows: Vec<Vec<ConstituentType>> = match order {
        1 => vec![vec![]],
        2 => vec![vec![Clique(2)]],
        3 => vec![vec![Clique(3)], vec![DirectedCycle(3)]],
        4 => vec![
            vec![Clique(4)],
            vec![Cycle(4), DisjointCliques(2, 2)],
            vec![DisjointCliques(2, 2), DisjointCliques(2, 2), DisjointCliques(2, 2)],
            vec![DirectedCycle(4), DisjointCliques(2, 2)],
        ],
        5 => vec![
            vec![Clique(5)],
            vec![Cycle(5), Cycle(5)],
            vec![DirectedCycle(5), DirectedCycle(5)],
        ],
        6 => vec![
            vec![Clique(6)],
            vec![DisjointCliques(2, 3), CompleteMultipartite { parts: 2, part_size: 3 }],
            vec![DisjointDirectedCycles(2, 3), CompleteMultipartite { parts: 2, part_size: 3 }],
            vec![DisjointCliques(3, 2), CompleteMultipartite { parts: 3, part_size: 2 }],
            vec![DisjointCliques(3, 2), WreathTriangle],
            vec![Cycle(6), DisjointCliques(3, 2), DisjointCliques(2, 3)],
            vec![DirectedCycle(6), DisjointDirectedCycles(2, 3), DisjointCliques(3, 2)],
            vec![
                DisjointCliques(3, 2),
                DisjointCliques(3, 2),
                DisjointDirectedCycles(2, 3),
                DisjointCliques(3, 2),
            ],
        ],
        7 => vec![
            vec![Clique(7)],
            vec![Cycle(7), Cycle(7), Cycle(7)],
            vec![PaleyTournament7],
            vec![DirectedCycle(7), DirectedCycle(7), DirectedCycle(7)],
        ],
        _ => vec![],
    };
    rows.into_iter().map(sortv).collect()
}

// ---------------------------------------------------------------------------
// exhaustive enumeration of coherent configurations with prescribed fibers
// ---------------------------------------------------------------------------

struct ColorInfo {
    src: usize,
    dst: usize,
    transpose: usize,
}

struct Enumerator {
    n: usize,
    fiber_of: Vec<usize>,
    fiber_count: usize,
    matrix: Vec<u32>,
    colors: Vec<ColorInfo>,
    out: Vec<Vec<usize>>,
    pinned: Vec<Option<usize>>,
    pairs: Vec<(usize, usize)>,
    results: Vec<ColoredDigraph>,
    cap: usize,
}

const UNSET_CELL: u32 = u32::MAX;

impl Enumerator {
    fn new(fiber_sizes: &[usize], cap: usize) -> Self {
        let n: usize = fiber_sizes.iter().sum();
        let mut fiber_of = Vec::with_capacity(n);
        for (i, &s) in fiber_sizes.iter().enumerate() {
            fiber_of.extend(std::iter::repeat(i).take(s));
        }
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                pairs.push((u, v));
            }
        }
        Self {
            n,
            fiber_of,
            fiber_count: fiber_sizes.len(),
            matrix: vec![UNSET_CELL; n * n],
            colors: Vec::new(),
            out: Vec::new(),
            pinned: Vec::new(),
            pairs,
            results: Vec::new(),
            cap,
        }
    }

    fn new_color(&mut self, src: usize, dst: usize, transpose: Option<usize>) -> usize {
        let id = self.colors.len();
        let t = transpose.unwrap_or(id);
        self.colors.push(ColorInfo { src, dst, transpose: t });
        self.out.push(vec![0; self.n]);
        self.pinned.push(None);
        if let Some(t) = transpose {
            self.colors[t].transpose = id;
        }
        id
    }

    fn pop_color(&mut self) {
        self.colors.pop();
        self.out.pop();
        self.pinned.pop();
    }

    fn set(&mut self, u: usize, v: usize, c: usize) {
        self.matrix[u * self.n + v] = c as u32;
        self.out[c][u] += 1;
    }

    fn unset(&mut self, u: usize, v: usize) {
        let c = self.matrix[u * self.n + v] as usize;
        self.out[c][u] -= 1;
        self.matrix[u * self.n + v] = UNSET_CELL;
    }

    /// Degree feasibility for vertex u's segment toward fiber `dst` while
    /// `remaining` cells of that segment are still unset.
    fn segment_ok(&self, u: usize, dst: usize, remaining: usize) -> bool {
        let mut needed = 0usize;
        for (c, info) in self.colors.iter().enumerate() {
            if info.src != self.fiber_of[u] || info.dst != dst {
                continue;
            }
            if let Some(d) = self.pinned[c] {
                let have = self.out[c][u];
                if have > d {
                    return false;
                }
                needed += d - have;
            }
        }
        needed <= remaining
    }

    fn segment_cells_unset(&self, u: usize, dst: usize) -> usize {
        (0..self.n)
            .filter(|&w| w != u && self.fiber_of[w] == dst && self.matrix[u * self.n + w] == UNSET_CELL)
            .count()
    }

    /// When the segment u -> dst just completed, pin (or check) the degrees
    /// of all colors on that fiber pair. Returns pins made (for undo), or
    /// None on contradiction.
    fn complete_segment(&mut self, u: usize, dst: usize) -> Option<Vec<usize>> {
        let mut pins = Vec::new();
        for c in 0..self.colors.len() {
            if self.colors[c].src != self.fiber_of[u] || self.colors[c].dst != dst {
                continue;
            }
            let have = self.out[c][u];
            match self.pinned[c] {
                Some(d) => {
                    if d != have {
                        for &p in &pins {
                            self.pinned[p] = None;
                        }
                        return None;
                    }
                }
                None => {
                    if have == 0 {
                        // every color incident to this fiber pair must appear
                        // on every source vertex
                        for &p in &pins {
                            self.pinned[p] = None;
                        }
                        return None;
                    }
                    self.pinned[c] = Some(have);
                    pins.push(c);
                }
            }
        }
        Some(pins)
    }

    /// Exact coherence counts over the completed prefix 0..=v.
    fn prefix_coherent(&self, v: usize) -> bool {
        let n = self.n;
        let mut exemplar: HashMap<u32, Vec<(u32, u32, usize)>> = HashMap::new();
        let mut hist: HashMap<(u32, u32), usize> = HashMap::new();
        for a in 0..=v {
            for b in 0..=v {
                let t = self.matrix[a * n + b];
                hist.clear();
                for x in 0..n {
                    let ax = self.matrix[a * n + x];
                    let xb = self.matrix[x * n + b];
                    if ax == UNSET_CELL || xb == UNSET_CELL {
                        continue;
                    }
                    *hist.entry((ax, xb)).or_insert(0) += 1;
                }
                let mut sorted: Vec<(u32, u32, usize)> =
                    hist.iter().map(|(&(p, q), &c)| (p, q, c)).collect();
                sorted.sort_unstable();
                match exemplar.get(&t) {
                    None => {
                        exemplar.insert(t, sorted);
                    }
                    Some(first) => {
                        if *first != sorted {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn search(&mut self, pair_idx: usize) {
        if self.results.len() >= self.cap {
            return;
        }
        if pair_idx == self.pairs.len() {
            self.emit();
            return;
        }
        let (u, v) = self.pairs[pair_idx];
        let (fu, fv) = (self.fiber_of[u], self.fiber_of[v]);
        // candidate color pairs (c_uv, c_vu)
        let mut candidates: Vec<(usize, usize, bool)> = Vec::new();
        for c in 0..self.colors.len() {
            if self.colors[c].src == fu && self.colors[c].dst == fv {
                candidates.push((c, self.colors[c].transpose, false));
            }
        }
        // fresh colors: a symmetric one (intra-fiber only) and a transpose pair
        candidates.push((usize::MAX, usize::MAX, true));

        for (cand_uv, cand_vu, fresh) in candidates {
            if self.results.len() >= self.cap {
                return;
            }
            if fresh {
                if fu == fv {
                    let c = self.new_color(fu, fv, None);
                    self.try_assign(pair_idx, u, v, c, c);
                    self.pop_color();
                }
                let a = self.new_color(fu, fv, None);
                let b = self.new_color(fv, fu, Some(a));
                self.try_assign(pair_idx, u, v, a, b);
                self.pop_color();
                self.pop_color();
            } else {
                self.try_assign(pair_idx, u, v, cand_uv, cand_vu);
            }
        }
    }

    fn try_assign(&mut self, pair_idx: usize, u: usize, v: usize, c_uv: usize, c_vu: usize) {
        self.set(u, v, c_uv);
        self.set(v, u, c_vu);
        let fu = self.fiber_of[u];
        let fv = self.fiber_of[v];
        let mut ok = true;
        let mut pins: Vec<usize> = Vec::new();
        // degree feasibility on partially filled segments
        let rem_uv = self.segment_cells_unset(u, fv);
        let rem_vu = self.segment_cells_unset(v, fu);
        if rem_uv == 0 {
            match self.complete_segment(u, fv) {
                Some(p) => pins.extend(p),
                None => ok = false,
            }
        } else if !self.segment_ok(u, fv, rem_uv) {
            ok = false;
        }
        if ok {
            if rem_vu == 0 {
                match self.complete_segment(v, fu) {
                    Some(p) => pins.extend(p),
                    None => ok = false,
                }
            } else if !self.segment_ok(v, fu, rem_vu) {
                ok = false;
            }
        }
        // when a whole row completes, run the exact prefix coherence check
        if ok {
            let row_complete = (0..self.n).all(|w| w == v || self.matrix[v * self.n + w] != UNSET_CELL);
            if row_complete && !self.prefix_coherent(v) {
                ok = false;
            }
        }
        if ok {
            self.search(pair_idx + 1);
        }
        for p in pins {
            self.pinned[p] = None;
        }
        self.unset(u, v);
        self.unset(v, u);
    }

    fn emit(&mut self) {
        let g = ColoredDigraph::from_color_matrix(self.n, self.matrix.iter().map(|&c| c).collect());
        // dedup up to isomorphism as partitions
        for old in &self.results {
            if iso::find_color_permuting_iso(old, &g).is_some() {
                return;
            }
        }
        self.results.push(g);
    }
}

fn populate_diagonal(e: &mut Enumerator) {
    // one loop color per fiber
    for f in 0..e.fiber_count {
        let c = e.new_color(f, f, None);
        e.pinned[c] = Some(1);
        let n = e.n;
        for v in 0..n {
            if e.fiber_of[v] == f {
                e.matrix[v * n + v] = c as u32;
                e.out[c][v] += 1;
            }
        }
    }
}

/// Exhaustive enumeration of coherent configurations with the prescribed
/// fiber partition (each listed fiber stays one loop class), up to
/// isomorphism.
pub fn enumerate_coherent(fiber_sizes: &[usize], cap: usize) -> Vec<ColoredDigraph> {
    let mut e = Enumerator::new(fiber_sizes, cap);
    populate_diagonal(&mut e);
    e.search(0);
    e.results
}

/// All homogeneous coherent configurations of the given order, up to
/// isomorphism, with recognized type tuples. Orders above 7 are rejected.
pub fn enumerate_homogeneous(order: usize) -> Result<Vec<CensusEntry>> {
    if order > 7 {
        return Err(Error::UnsupportedOrder { n: order, what: "homogeneous census" });
    }
    if order == 0 {
        return Ok(vec![]);
    }
    let graphs = enumerate_coherent(&[order], usize::MAX);
    let mut entries = Vec::new();
    for g in graphs {
        let c = CoherentConfiguration::from_closed(g)?;
        let type_tuple = cc_type(&c, 0)?;
        entries.push(CensusEntry { order, type_tuple, representative: c });
    }
    // deterministic order: by formatted tuple
    entries.sort_by_key(|e| format_tuple(&e.type_tuple, e.order));
    Ok(entries)
}

// ---------------------------------------------------------------------------
// interspaces between small fibers (the nine realizable rows)
// ---------------------------------------------------------------------------

/// The realizable interspace types between small fibers in critical
/// configurations, keyed by (|R|, |B|).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterspaceTemplate {
    AltC8,
    TwoK22,
    K4Inc,
    TwoK23,
    AltC12,
    TwoK33,
    ThreeK22Triple,
    ThreeK22Complement,
    Fano,
}

impl InterspaceTemplate {
    pub fn all() -> [InterspaceTemplate; 9] {
        use InterspaceTemplate::*;
        [AltC8, TwoK22, K4Inc, TwoK23, AltC12, TwoK33, ThreeK22Triple, ThreeK22Complement, Fano]
    }

    pub fn sizes(self) -> (usize, usize) {
        use InterspaceTemplate::*;
        match self {
            AltC8 | TwoK22 => (4, 4),
            K4Inc | TwoK23 => (4, 6),
            AltC12 | TwoK33 | ThreeK22Triple | ThreeK22Complement => (6, 6),
            Fano => (7, 7),
        }
    }

    /// Expected interspace type after closure.
    pub fn expected_type(self) -> Vec<ConstituentType> {
        use ConstituentType::*;
        use InterspaceTemplate::*;
        let mut t = match self {
            AltC8 => vec![AlternatingCycle(8), AlternatingCycle(8)],
            TwoK22 => vec![CompleteBipartite(2, 2, 2), CompleteBipartite(2, 2, 2)],
            K4Inc => vec![K4Incidence, K4Incidence],
            TwoK23 => vec![CompleteBipartite(2, 2, 3), CompleteBipartite(2, 2, 3)],
            AltC12 => vec![AlternatingCycle(12), AlternatingCycle(12), CompleteBipartite(3, 2, 2)],
            TwoK33 => vec![CompleteBipartite(2, 3, 3), CompleteBipartite(2, 3, 3)],
            ThreeK22Triple => vec![
                CompleteBipartite(3, 2, 2),
                CompleteBipartite(3, 2, 2),
                CompleteBipartite(3, 2, 2),
            ],
            ThreeK22Complement => vec![
                CompleteBipartite(3, 2, 2),
                ComplementOf(Box::new(CompleteBipartite(3, 2, 2))),
            ],
            Fano => vec![FanoIncidence, ComplementOf(Box::new(FanoIncidence))],
        };
        t.sort();
        t
    }
}

/// Fano plane lines over points 0..6.
pub fn fano_lines() -> Vec<[usize; 3]> {
    (0..7).map(|i| [i, (i + 1) % 7, (i + 3) % 7]).collect()
}

/// Builds the seed coloring for a two-fiber interspace template and closes
/// it. Fiber 0 holds the first size, fiber 1 the second.
pub fn interspace_instance(t: InterspaceTemplate) -> Result<CoherentConfiguration> {
    use InterspaceTemplate::*;
    let (r, b) = t.sizes();
    let n = r + b;
    let mut cross: Vec<Vec<u32>> = vec![vec![0; b]; r];
    match t {
        AltC8 | AltC12 => {
            for i in 0..r {
                cross[i][i] = 1;
                cross[i][(i + 1) % b] = 1;
            }
        }
        TwoK22 => {
            for i in 0..4 {
                for j in 0..4 {
                    if i / 2 == j / 2 {
                        cross[i][j] = 1;
                    }
                }
            }
        }
        TwoK23 => {
            for i in 0..4 {
                for j in 0..6 {
                    if i / 2 == j / 3 {
                        cross[i][j] = 1;
                    }
                }
            }
        }
        TwoK33 => {
            for i in 0..6 {
                for j in 0..6 {
                    if i / 3 == j / 3 {
                        cross[i][j] = 1;
                    }
                }
            }
        }
        ThreeK22Triple => {
            for i in 0..6 {
                for j in 0..6 {
                    cross[i][j] = 1 + ((j / 2 + 3 - i / 2) % 3) as u32;
                }
            }
        }
        ThreeK22Complement => {
            for i in 0..6 {
                for j in 0..6 {
                    if i / 2 == j / 2 {
                        cross[i][j] = 1;
                    }
                }
            }
        }
        K4Inc => {
            // K4 vertices 0..4 vs its edges in fixed order
            let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            for (j, &(x, y)) in edges.iter().enumerate() {
                cross[x][j] = 1;
                cross[y][j] = 1;
            }
        }
        Fano => {
            for (j, line) in fano_lines().iter().enumerate() {
                for &p in line {
                    cross[p][j] = 1;
                }
            }
        }
    }
    let shift = cross.iter().flatten().copied().max().unwrap() + 1;
    let mut m = vec![0u32; n * n];
    for u in 0..n {
        for v in 0..n {
            m[u * n + v] = if u == v {
                if u < r { 0 } else { 1 }
            } else if u < r && v < r {
                2
            } else if u >= r && v >= r {
                3
            } else if u < r {
                4 + cross[u][v - r]
            } else {
                4 + shift + cross[v][u - r]
            };
        }
    }
    let c = coherent_closure(&ColoredDigraph::from_color_matrix(n, m))?;
    if c.fiber_count() != 2 || c.fibers()[0].len() != r.min(b) && c.fibers()[0].len() != r {
        return Err(Error::Integrity(format!(
            "interspace template {t:?} did not close to two fibers of sizes {r},{b}"
        )));
    }
    Ok(c)
}

/// One realizable-interspace row: the type tuple and a verified
/// representative.
#[derive(Debug, Clone)]
pub struct InterspaceEntry {
    pub sizes: (usize, usize),
    pub type_tuple: Vec<ConstituentType>,
    pub representative: CoherentConfiguration,
}

/// Realizable non-homogeneous interspace types between fibers of the given
/// small sizes inside a critical configuration. Realizability is certified
/// by explicit representatives; completeness at (4,4) can additionally be
/// certified exhaustively via [`exhaustive_44_types`].
pub fn enumerate_small_interspaces(a: usize, b: usize) -> Result<Vec<InterspaceEntry>> {
    if !(4..=7).contains(&a) || !(4..=7).contains(&b) {
        return Err(Error::Argument(format!("sizes must be in 4..=7, got ({a},{b})")));
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let mut out = Vec::new();
    for t in InterspaceTemplate::all() {
        if t.sizes() != (lo, hi) {
            continue;
        }
        let c = interspace_instance(t)?;
        let (fr, fb) = fiber_pair_by_sizes(&c, lo, hi)?;
        let tuple = interspace_type(&c, fr, fb)?;
        if tuple != t.expected_type() {
            return Err(Error::Integrity(format!(
                "template {t:?} closed to unexpected type {}",
                format_tuple(&tuple, 0)
            )));
        }
        out.push(InterspaceEntry { sizes: (lo, hi), type_tuple: tuple, representative: c });
    }
    Ok(out)
}

/// Why a small-fiber cell admits no non-homogeneous interspace in a
/// critical configuration, when it provably cannot: either the handshake
/// |R| d(U) = |B| d(U*) has no solution with both degrees proper, or every
/// solution forces a degree-one relation (a star) or an odd alternating
/// cycle whose antipodal matching is again a star.
pub fn cell_emptiness_reason(a: usize, b: usize) -> Option<String> {
    let (a, b) = (a.min(b), a.max(b));
    // a single relation degree d (from the larger side's perspective: each
    // source vertex of the a-side sees d targets in the b-side) is usable
    // when its dual a·d/b is an integer, both sides avoid degree one, and
    // equal odd sizes also exclude degree two (the antipodal matching of an
    // odd alternating cycle splits off as a star)
    let min_deg = if a == b && a % 2 == 1 { 3 } else { 2 };
    let usable: Vec<usize> = (1..b)
        .filter(|&d| a * d % b == 0)
        .filter(|&d| {
            let dual = a * d / b;
            d >= min_deg && dual >= min_deg.min(2) && dual >= 2
        })
        .collect();
    if (1..b).all(|d| a * d % b != 0) {
        return Some(format!("handshake {a}·d = {b}·d' has no integral solution"));
    }
    // does any multiset of >= 2 usable degrees partition b?
    fn can_fill(rest: usize, usable: &[usize], parts: usize) -> bool {
        if rest == 0 {
            return parts >= 2;
        }
        usable.iter().any(|&d| d <= rest && can_fill(rest - d, usable, parts + 1))
    }
    if !can_fill(b, &usable, 0) {
        return Some(format!(
            "every relation multiset for ({a},{b}) forces a star or an odd alternating cycle"
        ));
    }
    None
}

pub fn fiber_pair_by_sizes(c: &CoherentConfiguration, a: usize, b: usize) -> Result<(usize, usize)> {
    let sizes: Vec<usize> = c.fibers().iter().map(|f| f.len()).collect();
    let fa = sizes.iter().position(|&s| s == a).ok_or(Error::UnknownFiber(a))?;
    let fb = if a == b {
        sizes.iter().enumerate().position(|(i, &s)| s == b && i != fa).ok_or(Error::UnknownFiber(b))?
    } else {
        sizes.iter().position(|&s| s == b).ok_or(Error::UnknownFiber(b))?
    };
    Ok((fa, fb))
}

/// Exhaustively enumerates the two-fiber (4,4) configurations whose
/// interspace is non-homogeneous and star-free (the criticality filter) and
/// returns the distinct interspace types found.
pub fn exhaustive_44_types() -> Result<Vec<Vec<ConstituentType>>> {
    let graphs = enumerate_coherent(&[4, 4], usize::MAX);
    let mut types: Vec<Vec<ConstituentType>> = Vec::new();
    for g in graphs {
        let c = CoherentConfiguration::from_closed(g)?;
        let isp = algebra::interspace(&c, 0, 1)?;
        if isp.homogeneous {
            continue;
        }
        // stars make a fiber removable, so d_min >= 2 in both directions
        let rev = algebra::interspace(&c, 1, 0)?;
        if isp.d_min < 2 || rev.d_min < 2 {
            continue;
        }
        let tuple = interspace_type(&c, 0, 1)?;
        if !types.contains(&tuple) {
            types.push(tuple);
        }
    }
    types.sort();
    Ok(types)
}

// ---------------------------------------------------------------------------
// structural implications between interspace constituents and fiber types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct Implication {
    pub name: String,
    pub fired: bool,
    pub conclusion_holds: Option<bool>,
}

/// Evaluates the structural implications between a non-homogeneous
/// interspace and the configurations induced by its fibers.
pub fn interspace_implications(
    c: &CoherentConfiguration,
    r: usize,
    b: usize,
) -> Result<Vec<Implication>> {
    use ConstituentType::*;
    let isp_types = interspace_type(c, r, b)?;
    let tr = constituent_tuple(c, r)?;
    let tb = constituent_tuple(c, b)?;
    let (sr, sb) = (c.fibers()[r].len(), c.fibers()[b].len());
    let has = |ts: &[ConstituentType], t: &ConstituentType| ts.contains(t);
    let mut out = Vec::new();

    let fired = sr == sb
        && (sr == 4 || sr == 6)
        && has(&isp_types, &AlternatingCycle(2 * sr));
    out.push(Implication {
        name: format!("C{} in interspace implies C{} in source fiber", 2 * sr, sr),
        fired,
        conclusion_holds: fired.then(|| has(&tr, &Cycle(sr))),
    });

    for y in [2usize, 3] {
        let fired = has(&isp_types, &CompleteBipartite(y, 2, 2));
        out.push(Implication {
            name: format!("{y}K{{2,2}} in interspace implies {y}K2 in source fiber"),
            fired,
            conclusion_holds: fired.then(|| has(&tr, &DisjointCliques(y, 2))),
        });
    }

    let fired = has(&isp_types, &CompleteBipartite(2, 2, 3));
    out.push(Implication {
        name: "2K{2,3} implies 2K2 in source and (2K3 or 2dC3) in target".into(),
        fired,
        conclusion_holds: fired.then(|| {
            has(&tr, &DisjointCliques(2, 2))
                && (has(&tb, &DisjointCliques(2, 3)) || has(&tb, &DisjointDirectedCycles(2, 3)))
        }),
    });

    let fired = has(&isp_types, &CompleteBipartite(2, 3, 3));
    out.push(Implication {
        name: "2K{3,3} implies 2K3 in source or 2dC3 in target".into(),
        fired,
        conclusion_holds: fired.then(|| {
            has(&tr, &DisjointCliques(2, 3)) || has(&tb, &DisjointDirectedCycles(2, 3))
        }),
    });

    let fired = has(&isp_types, &FanoIncidence);
    out.push(Implication {
        name: "I(F) implies K7 or PTr7 in source fiber".into(),
        fired,
        conclusion_holds: fired.then(|| has(&tr, &Clique(7)) || has(&tr, &PaleyTournament7)),
    });

    let fired = has(&isp_types, &K4Incidence);
    out.push(Implication {
        name: "I(K4,6) implies K4 in source and 3K2 with K{2,2,2} or dC3[K2] in target".into(),
        fired,
        conclusion_holds: fired.then(|| {
            has(&tr, &Clique(4))
                && has(&tb, &DisjointCliques(3, 2))
                && (has(&tb, &CompleteMultipartite { parts: 3, part_size: 2 })
                    || has(&tb, &WreathTriangle))
        }),
    });

    Ok(out)
}

// ---------------------------------------------------------------------------
// pattern-instance factory
// ---------------------------------------------------------------------------

/// The 17 interspace patterns between a large fiber and a small fiber of
/// size 4 or 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum PatternName {
    FourClique,
    FourMatching,
    FourCycle,
    SixCliqueTwo,
    SixCliqueTwoTwice,
    SixMatching,
    SixMatchingTwice,
    SixMatchingAndCycle,
    SixMatchingMatching,
    SixMatchingAndComplement,
    SixTriangleComplement,
    SixTriangleComplementTwice,
    SixCliqueThree,
    SixCliqueThreeDouble,
    SixTriangle,
    SixMatchingComplement,
    SixMatchingComplementDouble,
}

impl PatternName {
    pub fn all() -> [PatternName; 17] {
        use PatternName::*;
        [
            FourClique,
            FourMatching,
            FourCycle,
            SixCliqueTwo,
            SixCliqueTwoTwice,
            SixMatching,
            SixMatchingTwice,
            SixMatchingAndCycle,
            SixMatchingMatching,
            SixMatchingAndComplement,
            SixTriangleComplement,
            SixTriangleComplementTwice,
            SixCliqueThree,
            SixCliqueThreeDouble,
            SixTriangle,
            SixMatchingComplement,
            SixMatchingComplementDouble,
        ]
    }

    pub fn small_size(self) -> usize {
        use PatternName::*;
        match self {
            FourClique | FourMatching | FourCycle => 4,
            _ => 6,
        }
    }

    /// |Part(L,S)|: the number of equivalence classes of L under the first
    /// pattern relation.
    pub fn part_count(self) -> usize {
        use PatternName::*;
        match self {
            FourMatching | SixTriangle => 2,
            SixMatching | SixMatchingTwice | SixMatchingMatching => 3,
            FourCycle | SixMatchingComplementDouble => 4,
            SixMatchingAndCycle | FourClique => 6,
            SixMatchingComplement => 8,
            SixTriangleComplement | SixTriangleComplementTwice => 9,
            SixCliqueThreeDouble => 10,
            SixMatchingAndComplement => 12,
            SixCliqueTwo | SixCliqueTwoTwice => 15,
            SixCliqueThree => 20,
        }
    }
}

impl fmt::Display for PatternName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use PatternName::*;
        let s = match self {
            FourClique => "(K4,2)",
            FourMatching => "(2K2,2)",
            FourCycle => "(C4,2)",
            SixCliqueTwo => "(K6,2)",
            SixCliqueTwoTwice => "(K6,2,2)",
            SixMatching => "(3K2,2)",
            SixMatchingTwice => "(3K2,2,2)",
            SixMatchingAndCycle => "(C6,2;3K2,2)",
            SixMatchingMatching => "(3K2,2;3K2,2)",
            SixMatchingAndComplement => "(K2,2,2,2;3K2,2)",
            SixTriangleComplement => "(K3,3,2)",
            SixTriangleComplementTwice => "(K3,3,2,2)",
            SixCliqueThree => "(K6,3+)",
            SixCliqueThreeDouble => "(K6,3++)",
            SixTriangle => "(2K3,3+)",
            SixMatchingComplement => "(K2,2,2,3+)",
            SixMatchingComplementDouble => "(K2,2,2,3++)",
        };
        write!(f, "{s}")
    }
}

/// Which small-fiber structure the factory uses where several host the same
/// pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallVariant {
    Default,
    /// the wreath structure (3K2, dC3[K2]) where applicable
    Wreath,
    /// hexagon closure (C6, 3K2, 2K3) where applicable
    Hexagon,
    /// the four-vertex (C4, 2K2) structure where applicable
    CycleFour,
}

/// A built instance: the configuration plus the fiber indices of L and S.
#[derive(Debug, Clone)]
pub struct FactoryInstance {
    pub config: CoherentConfiguration,
    pub fiber_l: usize,
    pub fiber_s: usize,
}

struct SmallSide {
    size: usize,
    /// arc colors inside S, local indices; color 0 is reserved for "rest"
    arcs: Vec<(usize, usize, u32)>,
}

fn small_k4() -> SmallSide {
    let mut arcs = vec![];
    for u in 0..4 {
        for v in 0..4 {
            if u != v {
                arcs.push((u, v, 1));
            }
        }
    }
    SmallSide { size: 4, arcs }
}

fn small_matchings4() -> SmallSide {
    // three perfect matchings on four vertices, separately colored
    let mut arcs = vec![];
    for (c, pairs) in [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]]
        .iter()
        .enumerate()
    {
        for &(u, v) in pairs {
            arcs.push((u, v, c as u32 + 1));
            arcs.push((v, u, c as u32 + 1));
        }
    }
    SmallSide { size: 4, arcs }
}

fn small_c4() -> SmallSide {
    let mut arcs = vec![];
    for i in 0..4 {
        arcs.push((i, (i + 1) % 4, 1));
        arcs.push(((i + 1) % 4, i, 1));
    }
    SmallSide { size: 4, arcs }
}

fn small_k6() -> SmallSide {
    let mut arcs = vec![];
    for u in 0..6 {
        for v in 0..6 {
            if u != v {
                arcs.push((u, v, 1));
            }
        }
    }
    SmallSide { size: 6, arcs }
}

/// closure type (3K2, K_{2,2,2}); the matching pairs are {i, i+3}
fn small_octahedron() -> SmallSide {
    let mut arcs = vec![];
    for i in 0..3 {
        arcs.push((i, i + 3, 1));
        arcs.push((i + 3, i, 1));
    }
    SmallSide { size: 6, arcs }
}

/// closure type (2K3, K_{3,3}); the triangles are {0,1,2} and {3,4,5}
fn small_two_triangles() -> SmallSide {
    let mut arcs = vec![];
    for t in 0..2 {
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    arcs.push((3 * t + i, 3 * t + j, 1));
                }
            }
        }
    }
    SmallSide { size: 6, arcs }
}

/// closure type (C6, 3K2, 2K3); hexagon 0-1-2-3-4-5
fn small_hexagon() -> SmallSide {
    let mut arcs = vec![];
    for i in 0..6 {
        arcs.push((i, (i + 1) % 6, 1));
        arcs.push(((i + 1) % 6, i, 1));
    }
    SmallSide { size: 6, arcs }
}

/// closure type (3K2, dC3[K2]); pairs {2i, 2i+1}, class i points at class i+1
fn small_wreath() -> SmallSide {
    let mut arcs = vec![];
    for i in 0..3 {
        let j = (i + 1) % 3;
        for x in 0..2 {
            for y in 0..2 {
                arcs.push((2 * i + x, 2 * j + y, 1));
            }
        }
    }
    SmallSide { size: 6, arcs }
}

/// closure type (3K2, 3K2, 2dC3, 3K2): hexagon with alternating edge colors,
/// directed triangle pair, and long diagonals
fn small_alternating() -> SmallSide {
    let mut arcs = vec![];
    for i in [0usize, 2, 4] {
        arcs.push((i, (i + 1) % 6, 1));
        arcs.push(((i + 1) % 6, i, 1));
    }
    for i in [1usize, 3, 5] {
        arcs.push((i, (i + 1) % 6, 2));
        arcs.push(((i + 1) % 6, i, 2));
    }
    for (u, v) in [(0, 2), (2, 4), (4, 0), (1, 5), (5, 3), (3, 1)] {
        arcs.push((u, v, 3));
    }
    for i in 0..3 {
        arcs.push((i, i + 3, 4));
        arcs.push((i + 3, i, 4));
    }
    SmallSide { size: 6, arcs }
}

/// The neighborhoods attached to L: for each part of the intended
/// equivalence-class partition, the one or two neighborhoods in S.
fn attachments(p: PatternName, variant: SmallVariant) -> Result<(SmallSide, Vec<Vec<Vec<usize>>>)> {
    use PatternName::*;
    let pairs_of = |sets: Vec<Vec<usize>>| sets.into_iter().map(|s| vec![s]).collect::<Vec<_>>();
    let k6_edges: Vec<Vec<usize>> = (0..6)
        .flat_map(|u| ((u + 1)..6).map(move |v| vec![u, v]))
        .collect();
    let k6_triangles: Vec<Vec<usize>> = (0..6)
        .flat_map(|u| {
            ((u + 1)..6).flat_map(move |v| ((v + 1)..6).map(move |w| vec![u, v, w]))
        })
        .collect();
    // octahedron structure: antipodal pairs {i, i+3}; the wreath pairs its
    // vertices as {2i, 2i+1} instead
    let oct_pairs: Vec<Vec<usize>> = (0..3).map(|i| vec![i, i + 3]).collect();
    let oct_edges: Vec<Vec<usize>> = (0..6)
        .flat_map(|u| ((u + 1)..6).map(move |v| vec![u, v]))
        .filter(|e| e[1] != e[0] + 3)
        .collect();
    // transversals choosing one endpoint of each pair
    let transversals = |pairs: &[(usize, usize)]| -> Vec<Vec<usize>> {
        (0..8usize)
            .map(|mask| {
                pairs
                    .iter()
                    .enumerate()
                    .map(|(i, &(a, b))| if mask >> i & 1 == 1 { b } else { a })
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let oct_triangles = transversals(&[(0, 3), (1, 4), (2, 5)]);
    let wreath_triangles = transversals(&[(0, 1), (2, 3), (4, 5)]);
    let res = match (p, variant) {
        (FourClique, _) => {
            let edges: Vec<Vec<usize>> = (0..4)
                .flat_map(|u| ((u + 1)..4).map(move |v| vec![u, v]))
                .collect();
            (small_k4(), pairs_of(edges))
        }
        (FourMatching, SmallVariant::CycleFour) => {
            // the 2K2 class of the C4 closure: the two diagonals
            (small_c4(), pairs_of(vec![vec![0, 2], vec![1, 3]]))
        }
        (FourMatching, _) => (small_matchings4(), pairs_of(vec![vec![0, 1], vec![2, 3]])),
        (FourCycle, _) => {
            let edges: Vec<Vec<usize>> = (0..4).map(|i| vec![i, (i + 1) % 4]).collect();
            (small_c4(), pairs_of(edges))
        }
        (SixCliqueTwo, _) => (small_k6(), pairs_of(k6_edges)),
        (SixCliqueTwoTwice, _) => {
            // ordered pairs of disjoint K6 edges
            let mut parts = vec![];
            for e in &k6_edges {
                for f in &k6_edges {
                    if e.iter().all(|x| !f.contains(x)) {
                        parts.push(vec![e.clone(), f.clone()]);
                    }
                }
            }
            (small_k6(), parts)
        }
        (SixMatching, SmallVariant::Hexagon) => {
            let diags: Vec<Vec<usize>> = (0..3).map(|i| vec![i, i + 3]).collect();
            (small_hexagon(), pairs_of(diags))
        }
        (SixMatching, _) => (small_octahedron(), pairs_of(oct_pairs.clone())),
        (SixMatchingTwice, SmallVariant::Wreath) => {
            // the wreath's direction picks the successor pair canonically
            let parts: Vec<Vec<Vec<usize>>> = (0..3)
                .map(|i| {
                    vec![
                        vec![2 * i, 2 * i + 1],
                        vec![2 * ((i + 1) % 3), 2 * ((i + 1) % 3) + 1],
                    ]
                })
                .collect();
            (small_wreath(), parts)
        }
        (SixMatchingTwice, _) => {
            // ordered pairs of distinct antipodal pairs
            let mut parts = vec![];
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        parts.push(vec![oct_pairs[i].clone(), oct_pairs[j].clone()]);
                    }
                }
            }
            (small_octahedron(), parts)
        }
        (SixMatchingAndCycle, _) => {
            // hexagon edge plus its untouched diagonal
            let parts: Vec<Vec<Vec<usize>>> = (0..6)
                .map(|i| {
                    vec![
                        vec![i, (i + 1) % 6],
                        vec![(i + 2) % 6, (i + 5) % 6],
                    ]
                })
                .collect();
            (small_hexagon(), parts)
        }
        (SixMatchingMatching, _) => {
            // an edge of the first matching plus the disjoint edge of the
            // second, in the alternating structure
            let parts: Vec<Vec<Vec<usize>>> = (0..3)
                .map(|i| {
                    vec![
                        vec![2 * i, 2 * i + 1],
                        vec![(2 * i + 3) % 6, (2 * i + 4) % 6],
                    ]
                })
                .collect();
            (small_alternating(), parts)
        }
        (SixMatchingAndComplement, _) => {
            // an octahedron edge plus the antipodal pair it misses
            let parts: Vec<Vec<Vec<usize>>> = oct_edges
                .iter()
                .map(|e| {
                    let missed = (0..3)
                        .find(|&i| !e.contains(&i) && !e.contains(&(i + 3)))
                        .expect("an edge touches exactly two antipodal pairs");
                    vec![e.clone(), vec![missed, missed + 3]]
                })
                .collect();
            (small_octahedron(), parts)
        }
        (SixTriangleComplement, _) => {
            let mut cross = vec![];
            for u in 0..3 {
                for v in 3..6 {
                    cross.push(vec![u, v]);
                }
            }
            (small_two_triangles(), pairs_of(cross))
        }
        (SixTriangleComplementTwice, _) => {
            let mut parts = vec![];
            for u in 0..3 {
                for v in 3..6 {
                    for u2 in 0..3 {
                        for v2 in 3..6 {
                            if u2 != u && v2 != v {
                                parts.push(vec![vec![u, v], vec![u2, v2]]);
                            }
                        }
                    }
                }
            }
            (small_two_triangles(), parts)
        }
        (SixCliqueThree, _) => (small_k6(), pairs_of(k6_triangles)),
        (SixCliqueThreeDouble, _) => {
            let sel = balanced_triangle_selection(&k6_triangles)?;
            (small_k6(), pairs_of(sel))
        }
        (SixTriangle, _) => {
            (small_two_triangles(), pairs_of(vec![vec![0, 1, 2], vec![3, 4, 5]]))
        }
        (SixMatchingComplement, SmallVariant::Wreath) => {
            (small_wreath(), pairs_of(wreath_triangles))
        }
        (SixMatchingComplement, _) => (small_octahedron(), pairs_of(oct_triangles)),
        (SixMatchingComplementDouble, SmallVariant::Wreath) => {
            let evens: Vec<Vec<usize>> = wreath_triangles
                .iter()
                .filter(|t| t.iter().filter(|&&v| v % 2 == 1).count() % 2 == 0)
                .cloned()
                .collect();
            (small_wreath(), pairs_of(evens))
        }
        (SixMatchingComplementDouble, _) => {
            let evens: Vec<Vec<usize>> = oct_triangles
                .iter()
                .filter(|t| t.iter().filter(|&&v| v >= 3).count() % 2 == 0)
                .cloned()
                .collect();
            (small_octahedron(), pairs_of(evens))
        }
    };
    Ok(res)
}

/// One triangle from each complementary pair of K6 triangles, balanced so
/// every vertex lies in 5 selected triangles and every edge in 2. This is
/// the regular two-graph structure on six points.
fn balanced_triangle_selection(triangles: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; triangles.len()];
    for i in 0..triangles.len() {
        if used[i] {
            continue;
        }
        for j in (i + 1)..triangles.len() {
            if !used[j] && triangles[i].iter().all(|v| !triangles[j].contains(v)) {
                pairs.push((i, j));
                used[i] = true;
                used[j] = true;
                break;
            }
        }
    }
    debug_assert_eq!(pairs.len(), 10);
    for mask in 0..(1u32 << pairs.len()) {
        let sel: Vec<usize> = pairs
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| if mask >> k & 1 == 1 { j } else { i })
            .collect();
        let mut vcount = [0usize; 6];
        let mut ecount = HashMap::new();
        for &t in &sel {
            for &v in &triangles[t] {
                vcount[v] += 1;
            }
            let tri = &triangles[t];
            for a in 0..3 {
                for b in (a + 1)..3 {
                    *ecount.entry((tri[a], tri[b])).or_insert(0usize) += 1;
                }
            }
        }
        if vcount.iter().all(|&c| c == 5) && ecount.values().all(|&c| c == 2) && ecount.len() == 15 {
            return Ok(sel.into_iter().map(|t| triangles[t].clone()).collect());
        }
    }
    Err(Error::Integrity("no balanced one-per-pair triangle selection found".into()))
}

/// Builds an instance realizing the requested interspace pattern: the small
/// side with prescribed structure, L = parts x multiplicity attached by
/// membership, then coherent closure.
pub fn pattern_instance(
    p: PatternName,
    multiplicity: usize,
    variant: SmallVariant,
) -> Result<FactoryInstance> {
    if multiplicity == 0 {
        return Err(Error::Argument("multiplicity must be positive".into()));
    }
    let (small, parts) = attachments(p, variant)?;
    let s = small.size;
    let l = parts.len() * multiplicity;
    let n = s + l;
    let rel_count = parts[0].len();
    debug_assert!(parts.iter().all(|p| p.len() == rel_count));

    // colors: 0 rest-inside-S, then small.arcs colors (shifted), then
    // diagonals, L-internal, cross classes
    let max_small = small.arcs.iter().map(|&(_, _, c)| c).max().unwrap_or(0);
    let diag_s = max_small + 1;
    let diag_l = max_small + 2;
    let intra_l = max_small + 3;
    let cross_base = max_small + 4; // cross_base + j = membership in neighborhood j
    let cross_rest = cross_base + rel_count as u32;
    let back = cross_rest + 1; // S -> L single color

    let mut m = vec![0u32; n * n];
    for u in 0..n {
        for v in 0..n {
            m[u * n + v] = match (u < s, v < s) {
                (true, true) => {
                    if u == v {
                        diag_s
                    } else {
                        0
                    }
                }
                (false, false) => {
                    if u == v {
                        diag_l
                    } else {
                        intra_l
                    }
                }
                (false, true) => {
                    let part = (u - s) / multiplicity;
                    match parts[part].iter().position(|nb| nb.contains(&v)) {
                        Some(j) => cross_base + j as u32,
                        None => cross_rest,
                    }
                }
                (true, false) => back,
            };
        }
    }
    for &(u, v, c) in &small.arcs {
        m[u * n + v] = c;
    }
    let config = coherent_closure(&ColoredDigraph::from_color_matrix(n, m))?;
    let fiber_s = config.fiber_of(0);
    if config.fibers()[fiber_s].len() != s {
        return Err(Error::Integrity(format!(
            "factory for {p:?}: small side split into smaller fibers"
        )));
    }
    let fiber_l = config.fiber_of(s);
    if config.fibers()[fiber_l].len() != l {
        return Err(Error::Integrity(format!(
            "factory for {p:?}: attached side split into smaller fibers (sizes {:?})",
            config.fibers().iter().map(|f| f.len()).collect::<Vec<_>>()
        )));
    }
    Ok(FactoryInstance { config, fiber_l, fiber_s })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognize_directed_c5() {
        let arcs: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        assert_eq!(
            recognize_fiber_constituent(5, &arcs).unwrap(),
            ConstituentType::DirectedCycle(5)
        );
    }

    #[test]
    fn recognize_fano() {
        let mut arcs = vec![];
        for (j, line) in fano_lines().iter().enumerate() {
            for &p in line {
                arcs.push((p, j));
            }
        }
        assert_eq!(
            recognize_cross_constituent(7, 7, &arcs).unwrap(),
            ConstituentType::FanoIncidence
        );
    }

    #[test]
    fn recognize_k4_incidence() {
        let edges = [(0usize, 1usize), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut arcs = vec![];
        for (j, &(x, y)) in edges.iter().enumerate() {
            arcs.push((x, j));
            arcs.push((y, j));
        }
        assert_eq!(
            recognize_cross_constituent(4, 6, &arcs).unwrap(),
            ConstituentType::K4Incidence
        );
    }

    #[test]
    fn census_order_4() {
        let entries = enumerate_homogeneous(4).unwrap();
        assert_eq!(entries.len(), 4);
        let mut found: Vec<Vec<ConstituentType>> =
            entries.iter().map(|e| e.type_tuple.clone()).collect();
        let mut expected = expected_census(4);
        found.sort();
        expected.sort();
        assert_eq!(found, expected);
    }

    #[test]
    fn census_order_1() {
        assert_eq!(enumerate_homogeneous(1).unwrap().len(), 1);
    }

    #[test]
    fn interspace_template_44() {
        let rows = enumerate_small_interspaces(4, 4).unwrap();
        assert_eq!(rows.len(), 2);
    }

    #[test]
    fn factory_four_matching() {
        let inst = pattern_instance(PatternName::FourMatching, 4, SmallVariant::Default).unwrap();
        assert_eq!(inst.config.fibers()[inst.fiber_l].len(), 8);
    }
}
