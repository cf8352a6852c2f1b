//! k-dimensional Weisfeiler-Leman refinement, coherent closure, and
//! coherence verification.

use crate::errors::{Error, Result};
use crate::graph::{ColorKey, ColoredDigraph};
use std::collections::HashMap;

const DEFAULT_MEM_MB: u128 = 2048;

fn mem_budget_tuples(bytes_per_tuple: u128) -> u128 {
    let mb = std::env::var("WL_LAB_MEM_MB")
        .ok()
        .and_then(|s| s.parse::<u128>().ok())
        .unwrap_or(DEFAULT_MEM_MB);
    mb * 1024 * 1024 / bytes_per_tuple
}

#[inline]
fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Sig(u64, u64);

impl Sig {
    fn new(seed: u64) -> Self {
        Sig(mix64(seed ^ 0x5bf0_3635), mix64(seed ^ 0x94d0_49bb))
    }
    #[inline]
    fn push(&mut self, x: u64) {
        self.0 = mix64(self.0 ^ x);
        self.1 = mix64(self.1.rotate_left(17) ^ x.wrapping_mul(0x2545F4914F6CDD1D));
    }
}

/// Assigns fresh dense ids to a slice of per-item signatures, preserving the
/// previous partition (old color is part of the signature by construction).
fn hash_cons(sigs: &[Sig]) -> (Vec<u32>, usize) {
    let mut map: HashMap<Sig, u32> = HashMap::with_capacity(sigs.len());
    let mut out = Vec::with_capacity(sigs.len());
    for s in sigs {
        let next = map.len() as u32;
        let id = *map.entry(*s).or_insert(next);
        out.push(id);
    }
    let count = map.len();
    (out, count)
}

/// The result of running k-WL to its fixpoint.
#[derive(Debug, Clone)]
pub struct StableColoring {
    pub k: usize,
    pub rounds: usize,
    n: usize,
    tuple_colors: Vec<u32>,
    arc_restriction: ColoredDigraph,
}

impl StableColoring {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The induced coloring on ordered pairs, as a colored digraph.
    pub fn arc_restriction(&self) -> &ColoredDigraph {
        &self.arc_restriction
    }

    /// Stable color of a k-tuple (row-major index).
    pub fn tuple_colors(&self) -> &[u32] {
        &self.tuple_colors
    }

    /// Sorted (color, multiplicity) multiset over the k-tuples drawn from
    /// `verts` only.
    pub fn color_multiset_over(&self, verts: std::ops::Range<usize>) -> Vec<(u32, usize)> {
        let mut counts: HashMap<u32, usize> = HashMap::new();
        let m = verts.end - verts.start;
        let mut idx = vec![0usize; self.k];
        loop {
            let mut t = 0usize;
            for &i in &idx {
                t = t * self.n + (verts.start + i);
            }
            *counts.entry(self.tuple_colors[t]).or_insert(0) += 1;
            // odometer over the restricted vertex range
            let mut pos = self.k;
            loop {
                if pos == 0 {
                    let mut v: Vec<(u32, usize)> = counts.into_iter().collect();
                    v.sort_unstable();
                    return v;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < m {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    pub fn serialize(&self) -> String {
        self.arc_restriction
            .serialize_with_comments(&[format!("rounds {}", self.rounds)])
    }
}

/// 1-WL: classic color refinement with arc colors in both directions.
fn refine_vertices(g: &ColoredDigraph) -> (Vec<u32>, usize) {
    let n = g.n();
    let mut cur: Vec<u32> = (0..n).map(|v| g.color(v, v)).collect();
    let mut count = {
        let mut s: Vec<u32> = cur.clone();
        s.sort_unstable();
        s.dedup();
        s.len()
    };
    let mut rounds = 0usize;
    let mut elems: Vec<u64> = Vec::with_capacity(n);
    loop {
        let mut sigs = Vec::with_capacity(n);
        for v in 0..n {
            elems.clear();
            for w in 0..n {
                if w == v {
                    continue;
                }
                let e = (g.color(v, w) as u64) << 42 | (g.color(w, v) as u64) << 21 | cur[w] as u64;
                elems.push(e);
            }
            elems.sort_unstable();
            let mut s = Sig::new(cur[v] as u64);
            for &e in &elems {
                s.push(e);
            }
            sigs.push(s);
        }
        let (next, next_count) = hash_cons(&sigs);
        rounds += 1;
        if next_count == count {
            return (cur, rounds);
        }
        cur = next;
        count = next_count;
    }
}

/// 2-WL on ordered pairs; this is the coherent-closure hot path. The
/// initial color of (u,v) is the full atomic type (loop colors and both arc
/// directions), as the tuple coloring prescribes.
fn refine_pairs(g: &ColoredDigraph) -> (Vec<u32>, usize) {
    let n = g.n();
    let (mut cur, mut count) = {
        let mut sigs = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                let mut s = Sig::new(2);
                s.push(g.color(u, u) as u64);
                s.push(g.color(u, v) as u64);
                s.push(g.color(v, u) as u64);
                s.push(g.color(v, v) as u64);
                sigs.push(s);
            }
        }
        hash_cons(&sigs)
    };
    let mut rounds = 0usize;
    let mut elems: Vec<u64> = Vec::with_capacity(n);
    loop {
        let mut sigs = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                elems.clear();
                for w in 0..n {
                    let e = ((cur[w * n + v] as u64) << 32) | cur[u * n + w] as u64;
                    elems.push(e);
                }
                elems.sort_unstable();
                let mut s = Sig::new(cur[u * n + v] as u64);
                for &e in &elems {
                    s.push(e);
                }
                sigs.push(s);
            }
        }
        let (next, next_count) = hash_cons(&sigs);
        rounds += 1;
        if next_count == count {
            return (cur, rounds);
        }
        cur = next;
        count = next_count;
    }
}

/// General k-WL over the full tuple table, k >= 3.
fn refine_tuples(g: &ColoredDigraph, k: usize) -> Result<(Vec<u32>, usize)> {
    let n = g.n() as u128;
    let r = n.checked_pow(k as u32).ok_or(Error::Resource {
        required: u128::MAX,
        allowed: mem_budget_tuples(16),
    })?;
    let allowed = mem_budget_tuples(16);
    if r > allowed {
        return Err(Error::Resource { required: r, allowed });
    }
    let n = g.n();
    let r = r as usize;

    // strides for substituting position p by w
    let mut stride = vec![1usize; k];
    for p in (0..k - 1).rev() {
        stride[p] = stride[p + 1] * n;
    }

    // initial color: the k x k matrix of arc colors of the tuple
    let mut tuple = vec![0usize; k];
    let mut sigs = Vec::with_capacity(r);
    for t in 0..r {
        let mut rem = t;
        for p in (0..k).rev() {
            tuple[p] = rem % n;
            rem /= n;
        }
        let mut s = Sig::new(k as u64);
        for i in 0..k {
            for j in 0..k {
                s.push(g.color(tuple[i], tuple[j]) as u64);
            }
        }
        sigs.push(s);
    }
    let (mut cur, mut count) = hash_cons(&sigs);

    let mut rounds = 0usize;
    let mut elems: Vec<u128> = Vec::with_capacity(n);
    loop {
        let mut sigs = Vec::with_capacity(r);
        for t in 0..r {
            elems.clear();
            for w in 0..n {
                let mut rem = t;
                // element = colors of the k substituted tuples
                let mut packed: u128 = 0;
                let mut ehash = Sig::new(0);
                for p in (0..k).rev() {
                    let vp = rem % n;
                    rem /= n;
                    let sub = (t + w * stride[p]) - vp * stride[p];
                    let c = cur[sub];
                    if k <= 4 {
                        packed = (packed << 32) | c as u128;
                    } else {
                        ehash.push(c as u64);
                    }
                }
                if k <= 4 {
                    elems.push(packed);
                } else {
                    elems.push(((ehash.0 as u128) << 64) | ehash.1 as u128);
                }
            }
            elems.sort_unstable();
            let mut s = Sig::new(cur[t] as u64);
            for &e in &elems {
                s.push(e as u64);
                s.push((e >> 64) as u64);
            }
            sigs.push(s);
        }
        let (next, next_count) = hash_cons(&sigs);
        rounds += 1;
        if next_count == count {
            return Ok((cur, rounds));
        }
        cur = next;
        count = next_count;
    }
}

fn pair_matrix_to_graph(n: usize, pair_colors: &[u32]) -> ColoredDigraph {
    let mut keys: Vec<ColorKey> = Vec::new();
    let mut remap: HashMap<(u32, bool), u32> = HashMap::new();
    let mut colors = vec![0u32; n * n];
    for u in 0..n {
        for v in 0..n {
            let raw = pair_colors[u * n + v];
            let is_loop = u == v;
            let id = *remap.entry((raw, is_loop)).or_insert_with(|| {
                let id = keys.len() as u32;
                keys.push(if is_loop {
                    ColorKey::Loop(raw)
                } else {
                    ColorKey::Derived(raw as u64)
                });
                id
            });
            colors[u * n + v] = id;
        }
    }
    ColoredDigraph::from_parts(n, colors, keys).canonical_colors()
}

/// Runs k-WL to its fixpoint; the returned coloring's pair restriction is a
/// colored digraph (for k = 1 the stable vertex colors recolor the diagonal).
pub fn wl_refine(g: &ColoredDigraph, k: usize) -> Result<StableColoring> {
    if k == 0 {
        return Err(Error::Argument("dimension k must be >= 1".into()));
    }
    let n = g.n();
    match k {
        1 => {
            let (vcolors, rounds) = refine_vertices(g);
            let mut m: Vec<u32> = g.colors().to_vec();
            let shift = g.color_count() as u32;
            for v in 0..n {
                m[v * n + v] = shift + vcolors[v];
            }
            Ok(StableColoring {
                k,
                rounds,
                n,
                tuple_colors: vcolors,
                arc_restriction: pair_matrix_to_graph(n, &m),
            })
        }
        2 => {
            let (pair_colors, rounds) = refine_pairs(g);
            Ok(StableColoring {
                k,
                rounds,
                n,
                arc_restriction: pair_matrix_to_graph(n, &pair_colors),
                tuple_colors: pair_colors,
            })
        }
        _ => {
            let (tuple_colors, rounds) = refine_tuples(g, k)?;
            // pair restriction via tuples padded with the second coordinate
            let mut m = vec![0u32; n * n];
            for u in 0..n {
                for v in 0..n {
                    let mut t = u;
                    for _ in 1..k {
                        t = t * n + v;
                    }
                    m[u * n + v] = tuple_colors[t];
                }
            }
            Ok(StableColoring {
                k,
                rounds,
                n,
                arc_restriction: pair_matrix_to_graph(n, &m),
                tuple_colors,
            })
        }
    }
}

/// Signature of a stable coloring; `joint` marks signatures taken from a
/// joint refinement of two graphs.
pub fn stable_signature(s: &StableColoring, joint: bool) -> crate::graph::PartitionSignature {
    let mut sig = s.arc_restriction().signature();
    sig.joint = joint;
    sig
}

/// The two k-WL color multisets from a joint run on the disjoint union.
pub fn joint_color_multisets(
    g: &ColoredDigraph,
    h: &ColoredDigraph,
    k: usize,
) -> Result<(Vec<(u32, usize)>, Vec<(u32, usize)>)> {
    let (union, offset) = g.disjoint_union(h);
    let stable = wl_refine(&union, k)?;
    Ok((
        stable.color_multiset_over(0..offset),
        stable.color_multiset_over(offset..union.n()),
    ))
}

/// True iff k-WL separates the two graphs when refined jointly on their
/// disjoint union with shared initial colors.
pub fn distinguishes(g: &ColoredDigraph, h: &ColoredDigraph, k: usize) -> Result<bool> {
    if g.n() != h.n() {
        return Ok(true);
    }
    let (mg, mh) = joint_color_multisets(g, h, k)?;
    Ok(mg != mh)
}

/// Metadata for one basis relation of a coherent configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationMeta {
    pub transpose: u32,
    pub src_fiber: usize,
    pub dst_fiber: usize,
    /// out-degree d(A): |vA| for v in the source fiber
    pub degree: usize,
    pub is_loop: bool,
}

/// A colored digraph whose partition satisfies CC1-CC3, with fiber and
/// relation metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherentConfiguration {
    base: ColoredDigraph,
    fibers: Vec<Vec<usize>>,
    fiber_of: Vec<usize>,
    rel: Vec<RelationMeta>,
}

impl CoherentConfiguration {
    /// Wraps a canonical colored digraph whose partition is already stable
    /// under 2-WL. Checks the structural consequences (CC1, CC2, one fiber
    /// pair and constant degree per relation) and errors otherwise; the
    /// exhaustive CC3 check lives in [`verify_coherence`].
    pub fn from_closed(g: ColoredDigraph) -> Result<Self> {
        let g = g.canonical_colors();
        let n = g.n();
        let rep = crate::graph::validate_partition(&g);
        if !rep.cc1_ok() {
            return Err(Error::Integrity(format!(
                "CC1 violated by colors {:?}",
                rep.cc1_violations
            )));
        }
        if !rep.cc2_ok() {
            return Err(Error::Integrity(format!(
                "CC2 violated by colors {:?}",
                rep.cc2_violations
            )));
        }
        let mut fibers: Vec<Vec<usize>> = Vec::new();
        let mut fiber_color: Vec<u32> = Vec::new();
        let mut fiber_of = vec![usize::MAX; n];
        for v in 0..n {
            let c = g.color(v, v);
            match fiber_color.iter().position(|&fc| fc == c) {
                Some(i) => {
                    fibers[i].push(v);
                    fiber_of[v] = i;
                }
                None => {
                    fiber_of[v] = fibers.len();
                    fiber_color.push(c);
                    fibers.push(vec![v]);
                }
            }
        }
        let k = g.color_count();
        let mut src = vec![usize::MAX; k];
        let mut dst = vec![usize::MAX; k];
        let mut out_deg: Vec<HashMap<usize, usize>> = vec![HashMap::new(); k];
        for u in 0..n {
            for v in 0..n {
                let c = g.color(u, v) as usize;
                let (fu, fv) = (fiber_of[u], fiber_of[v]);
                if src[c] == usize::MAX {
                    src[c] = fu;
                    dst[c] = fv;
                } else if src[c] != fu || dst[c] != fv {
                    return Err(Error::Integrity(format!(
                        "relation {c} straddles fiber pairs; partition is not coherent"
                    )));
                }
                *out_deg[c].entry(u).or_insert(0) += 1;
            }
        }
        let mut rel = Vec::with_capacity(k);
        for c in 0..k {
            let degs: Vec<usize> = out_deg[c].values().copied().collect();
            let degree = degs[0];
            if degs.iter().any(|&d| d != degree)
                || out_deg[c].len() != fibers[src[c]].len()
            {
                return Err(Error::Integrity(format!(
                    "relation {c} has non-constant out-degree; partition is not coherent"
                )));
            }
            rel.push(RelationMeta {
                transpose: rep.transpose[c].expect("CC2 checked"),
                src_fiber: src[c],
                dst_fiber: dst[c],
                degree,
                is_loop: g.is_loop_color(c as u32),
            });
        }
        Ok(Self { base: g, fibers, fiber_of, rel })
    }

    pub fn base(&self) -> &ColoredDigraph {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn rank(&self) -> usize {
        self.base.color_count()
    }

    pub fn fibers(&self) -> &[Vec<usize>] {
        &self.fibers
    }

    pub fn fiber_of(&self, v: usize) -> usize {
        self.fiber_of[v]
    }

    pub fn fiber_count(&self) -> usize {
        self.fibers.len()
    }

    pub fn relation(&self, c: u32) -> &RelationMeta {
        &self.rel[c as usize]
    }

    pub fn relations(&self) -> impl Iterator<Item = (u32, &RelationMeta)> {
        self.rel.iter().enumerate().map(|(i, m)| (i as u32, m))
    }

    pub fn color(&self, u: usize, v: usize) -> u32 {
        self.base.color(u, v)
    }

    /// Neighborhood of v under relation c.
    pub fn neighborhood(&self, v: usize, c: u32) -> Vec<usize> {
        (0..self.n()).filter(|&w| self.color(v, w) == c).collect()
    }

    /// Basis relations partitioning fiber_r x fiber_b (loops included when
    /// r == b).
    pub fn interspace_relations(&self, r: usize, b: usize) -> Vec<u32> {
        self.relations()
            .filter(|(_, m)| m.src_fiber == r && m.dst_fiber == b)
            .map(|(c, _)| c)
            .collect()
    }

    /// Intersection number c^{AB}_T computed from one witness arc of T.
    /// Valid on verified configurations.
    pub fn intersection_number(&self, a: u32, b: u32, t: u32) -> usize {
        let n = self.n();
        for v in 0..n {
            for w in 0..n {
                if self.color(v, w) == t {
                    return (0..n)
                        .filter(|&u| self.color(v, u) == a && self.color(u, w) == b)
                        .count();
                }
            }
        }
        0
    }

    /// Configuration induced on a vertex subset, re-closed. For unions of
    /// fibers of a coherent configuration the re-closure is a no-op on the
    /// partition, but we re-close anyway so the result is always coherent.
    pub fn restrict(&self, verts: &[usize]) -> Result<CoherentConfiguration> {
        coherent_closure(&self.base.induced(verts))
    }
}

/// Coarsest coherent configuration whose relations refine the input colors.
pub fn coherent_closure(g: &ColoredDigraph) -> Result<CoherentConfiguration> {
    if g.n() == 0 {
        return CoherentConfiguration::from_closed(ColoredDigraph::from_parts(0, vec![], vec![]));
    }
    let stable = wl_refine(g, 2)?;
    CoherentConfiguration::from_closed(stable.arc_restriction().clone())
}

/// Coherent closure after forcing each listed vertex into its own singleton
/// fiber.
pub fn individualize(c: &CoherentConfiguration, vs: &[usize]) -> Result<CoherentConfiguration> {
    let mut seen = std::collections::HashSet::new();
    for &v in vs {
        if v >= c.n() {
            return Err(Error::Range { vertex: v, n: c.n() });
        }
        if !seen.insert(v) {
            return Err(Error::Argument(format!("duplicate vertex {v} in individualization")));
        }
    }
    if vs.is_empty() {
        return Ok(c.clone());
    }
    let g = individualize_graph(c.base(), vs);
    coherent_closure(&g)
}

/// The recoloring step of individualization without the closure.
pub fn individualize_graph(g: &ColoredDigraph, vs: &[usize]) -> ColoredDigraph {
    let n = g.n();
    let mut m: Vec<u32> = g.colors().to_vec();
    let base = g.color_count() as u32;
    for (i, &v) in vs.iter().enumerate() {
        m[v * n + v] = base + i as u32;
    }
    let mut keys: Vec<ColorKey> = (0..base).map(|c| g.key(c).clone()).collect();
    for i in 0..vs.len() {
        keys.push(ColorKey::Loop(1_000_000 + i as u32));
    }
    ColoredDigraph::from_parts(n, m, keys).canonical_colors()
}

/// A CC3 failure witness: two arcs of the same color with different path
/// counts for some color pair (A,B).
#[derive(Debug, Clone)]
pub struct CoherenceWitness {
    pub a: u32,
    pub b: u32,
    pub t: u32,
    pub arc1: (usize, usize),
    pub arc2: (usize, usize),
    pub count1: usize,
    pub count2: usize,
}

/// Result of the exhaustive CC1-CC3 check.
#[derive(Debug, Clone)]
pub struct CoherenceReport {
    pub cc1_ok: bool,
    pub cc2_ok: bool,
    pub cc3_ok: bool,
    pub cc1_violations: Vec<u32>,
    pub cc2_violations: Vec<u32>,
    pub witness: Option<CoherenceWitness>,
    /// For each color T, the sorted list of ((A,B), c^{AB}_T) with nonzero
    /// count; present when all axioms hold.
    pub intersection_numbers: Option<Vec<Vec<((u32, u32), usize)>>>,
}

impl CoherenceReport {
    pub fn ok(&self) -> bool {
        self.cc1_ok && self.cc2_ok && self.cc3_ok
    }
}

/// Exhaustively checks CC1-CC3 on a colored digraph and returns the full
/// intersection-number table on success.
pub fn verify_coherence(g: &ColoredDigraph) -> CoherenceReport {
    let axioms = crate::graph::validate_partition(g);
    let n = g.n();
    let k = g.color_count();
    let mut report = CoherenceReport {
        cc1_ok: axioms.cc1_ok(),
        cc2_ok: axioms.cc2_ok(),
        cc3_ok: true,
        cc1_violations: axioms.cc1_violations.clone(),
        cc2_violations: axioms.cc2_violations.clone(),
        witness: None,
        intersection_numbers: None,
    };
    // exemplar per color: (arc, sorted histogram over (A,B))
    let mut exemplar: Vec<Option<((usize, usize), Vec<((u32, u32), usize)>)>> = vec![None; k];
    let mut hist: HashMap<(u32, u32), usize> = HashMap::new();
    for v in 0..n {
        for w in 0..n {
            let t = g.color(v, w);
            hist.clear();
            for u in 0..n {
                *hist.entry((g.color(v, u), g.color(u, w))).or_insert(0) += 1;
            }
            let mut sorted: Vec<((u32, u32), usize)> = hist.iter().map(|(&p, &c)| (p, c)).collect();
            sorted.sort_unstable();
            match &exemplar[t as usize] {
                None => exemplar[t as usize] = Some(((v, w), sorted)),
                Some((arc1, first)) => {
                    if *first != sorted {
                        // locate a differing (A,B)
                        let map1: HashMap<(u32, u32), usize> = first.iter().copied().collect();
                        let map2: HashMap<(u32, u32), usize> = sorted.iter().copied().collect();
                        let mut keys: Vec<(u32, u32)> =
                            map1.keys().chain(map2.keys()).copied().collect();
                        keys.sort_unstable();
                        keys.dedup();
                        for ab in keys {
                            let c1 = map1.get(&ab).copied().unwrap_or(0);
                            let c2 = map2.get(&ab).copied().unwrap_or(0);
                            if c1 != c2 {
                                report.cc3_ok = false;
                                report.witness = Some(CoherenceWitness {
                                    a: ab.0,
                                    b: ab.1,
                                    t,
                                    arc1: *arc1,
                                    arc2: (v, w),
                                    count1: c1,
                                    count2: c2,
                                });
                                return report;
                            }
                        }
                    }
                }
            }
        }
    }
    if report.ok() {
        report.intersection_numbers = Some(
            exemplar
                .into_iter()
                .map(|e| e.map(|(_, h)| h).unwrap_or_default())
                .collect(),
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn cycle(n: usize) -> ColoredDigraph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        ColoredDigraph::simple_graph(n, &edges)
    }

    fn two_triangles() -> ColoredDigraph {
        ColoredDigraph::simple_graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    }

    #[test]
    fn one_wl_on_c6_is_monochromatic() {
        let s = wl_refine(&cycle(6), 1).unwrap();
        let mut colors = s.tuple_colors().to_vec();
        colors.dedup();
        assert_eq!(colors, vec![0]);
    }

    #[test]
    fn one_wl_cannot_separate_c6_from_2c3() {
        assert!(!distinguishes(&cycle(6), &two_triangles(), 1).unwrap());
    }

    #[test]
    fn two_wl_separates_c6_from_2c3() {
        assert!(distinguishes(&cycle(6), &two_triangles(), 2).unwrap());
    }

    #[test]
    fn three_wl_agrees_on_identical_inputs() {
        let g = cycle(5);
        assert!(!distinguishes(&g, &g, 3).unwrap());
    }

    #[test]
    fn closure_c5_is_rank_3() {
        let c = coherent_closure(&cycle(5)).unwrap();
        assert_eq!(c.rank(), 3);
        assert_eq!(c.fiber_count(), 1);
        assert!(verify_coherence(c.base()).ok());
    }

    #[test]
    fn closure_c6_is_rank_4() {
        let c = coherent_closure(&cycle(6)).unwrap();
        assert_eq!(c.rank(), 4);
        assert_eq!(c.fiber_count(), 1);
    }

    #[test]
    fn closure_k1_is_rank_1() {
        let c = coherent_closure(&ColoredDigraph::simple_graph(1, &[])).unwrap();
        assert_eq!(c.rank(), 1);
    }

    #[test]
    fn closure_idempotent() {
        let g = parse_graph("n 5\nedge 0 1\nedge 1 2\nedge 2 3\nedge 3 4\nedge 0 3\n").unwrap();
        let c1 = coherent_closure(&g).unwrap();
        let c2 = coherent_closure(c1.base()).unwrap();
        assert_eq!(c1.base(), c2.base());
    }

    #[test]
    fn individualize_k4_splits_one_three() {
        let k4 = ColoredDigraph::simple_graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let c = coherent_closure(&k4).unwrap();
        let ci = individualize(&c, &[0]).unwrap();
        let mut sizes: Vec<usize> = ci.fibers().iter().map(|f| f.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3]);
    }

    #[test]
    fn individualize_empty_is_identity() {
        let c = coherent_closure(&cycle(6)).unwrap();
        let ci = individualize(&c, &[]).unwrap();
        assert_eq!(c.base(), ci.base());
    }

    #[test]
    fn individualize_rejects_duplicates() {
        let c = coherent_closure(&cycle(6)).unwrap();
        assert!(individualize(&c, &[1, 1]).is_err());
    }

    #[test]
    fn verify_flags_recolored_arc() {
        let c = coherent_closure(&cycle(6)).unwrap();
        let mut m = c.base().colors().to_vec();
        let n = c.n();
        // move one arc into another non-loop class
        let (mut src, mut dst) = (0, 0);
        'outer: for u in 0..n {
            for v in 0..n {
                if u != v {
                    src = u;
                    dst = v;
                    break 'outer;
                }
            }
        }
        let old = m[src * n + dst];
        let other = (0..c.rank() as u32)
            .find(|&cc| cc != old && !c.base().is_loop_color(cc))
            .unwrap();
        m[src * n + dst] = other;
        let g = ColoredDigraph::from_color_matrix(n, m);
        let rep = verify_coherence(&g);
        assert!(!rep.ok());
    }

    #[test]
    fn rank1_plus_loops_k5_passes() {
        let g = ColoredDigraph::simple_graph(5, &{
            let mut e = vec![];
            for u in 0..5 {
                for v in (u + 1)..5 {
                    e.push((u, v));
                }
            }
            e
        });
        assert!(verify_coherence(&g).ok());
    }

    #[test]
    fn budget_error_reports_tuple_count() {
        std::env::set_var("WL_LAB_MEM_MB", "1");
        let g = cycle(40);
        let err = wl_refine(&g, 4).unwrap_err();
        std::env::remove_var("WL_LAB_MEM_MB");
        match err {
            Error::Resource { required, .. } => assert_eq!(required, 40u128.pow(4)),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
