//! Criticality-style reduction of configurations, restorability predicates
//! via brute-force automorphism extension, and an exact WL-dimension oracle
//! over the universe of small simple graphs.

use crate::algebra;
use crate::errors::{Error, Result};
use crate::graph::ColoredDigraph;
use crate::iso;
use crate::refine::{coherent_closure, distinguishes, CoherentConfiguration};
use rayon::prelude::*;
use std::collections::HashSet;
use std::sync::OnceLock;

/// Fibers of size at most 3.
pub fn detect_tiny(c: &CoherentConfiguration) -> Vec<usize> {
    (0..c.fiber_count()).filter(|&f| c.fibers()[f].len() <= 3).collect()
}

/// Ordered pairs (R, B) with d_min(B, R) = 1: some relation from B into R
/// has degree one, so R is recoverable from B and removable.
pub fn detect_star(c: &CoherentConfiguration) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..c.fiber_count() {
        for b in 0..c.fiber_count() {
            if r == b {
                continue;
            }
            let isp = algebra::interspace(c, b, r).expect("fibers in range");
            if !isp.homogeneous && isp.d_min == 1 {
                out.push((r, b));
            }
        }
    }
    out
}

/// An alternating-cycle hit: |R| = |B| odd with a degree-2 structure whose
/// antipodal pairing forces a matching basis relation.
#[derive(Debug, Clone)]
pub struct AlternatingCycleHit {
    pub pair: (usize, usize),
    /// whether a matching relation is already a basis relation of the input
    pub matching_present: bool,
}

/// Pairs of equal odd-size fibers where either d_min = 2 or the interspace
/// has an alternating-cycle constituent with odd half-length; confirms that
/// the derived antipodal matching is a basis relation after re-closure.
pub fn detect_alternating_cycle(c: &CoherentConfiguration) -> Result<Vec<AlternatingCycleHit>> {
    let mut out = Vec::new();
    for r in 0..c.fiber_count() {
        for b in (r + 1)..c.fiber_count() {
            let (sr, sb) = (c.fibers()[r].len(), c.fibers()[b].len());
            if sr != sb || sr % 2 == 0 {
                continue;
            }
            let isp = algebra::interspace(c, r, b)?;
            if isp.homogeneous {
                continue;
            }
            let mut hit = isp.d_min == 2;
            if !hit {
                for &a in &isp.relations {
                    if let crate::census::ConstituentType::AlternatingCycle(len) =
                        crate::census::recognize_constituent(c, a)?
                    {
                        if (len / 2) % 2 == 1 {
                            hit = true;
                        }
                    }
                }
            }
            if hit {
                let matching_present = isp.d_min == 1
                    || isp.relations.iter().any(|&a| {
                        c.relation(a).degree == 1
                    });
                out.push(AlternatingCycleHit { pair: (r, b), matching_present });
            }
        }
    }
    Ok(out)
}

const AUTOMORPHISM_VERTEX_GUARD: usize = 20;
const AUTOMORPHISM_GROUP_CAP: usize = 200_000;
const EXTENSION_VERTEX_BUDGET: usize = 48;

/// All color-preserving automorphisms of the configuration induced on `w`.
pub fn automorphisms(c: &CoherentConfiguration, w: &[usize]) -> Result<Vec<Vec<usize>>> {
    if w.len() > AUTOMORPHISM_VERTEX_GUARD {
        return Err(Error::SizeGuard {
            what: "automorphism search",
            actual: w.len(),
            limit: AUTOMORPHISM_VERTEX_GUARD,
        });
    }
    iso::automorphism_group(&c.base().induced(w), AUTOMORPHISM_GROUP_CAP)
}

/// Witness table for a restorable fiber set: per automorphism of the
/// neighborhood that extends outward, a stored inward extension.
#[derive(Debug, Clone)]
pub struct RemovalCertificate {
    pub removed_fibers: Vec<usize>,
    pub neighborhood_fibers: Vec<usize>,
    /// pairs (automorphism of c[B] as a map on B-indices, extension to
    /// c[R ∪ B] as a map on (R ∪ B)-indices)
    pub extensions: Vec<(Vec<usize>, Vec<usize>)>,
    /// true when only the stronger sufficient check ran (outward side over
    /// budget): every automorphism of c[B] extends inward
    pub sufficient_only: bool,
}

/// Is the union of `fibers_r` restorable: does every automorphism of the
/// neighborhood configuration that extends to c minus the set also extend
/// over the set?
pub fn is_restorable(
    c: &CoherentConfiguration,
    fibers_r: &[usize],
) -> Result<(bool, Option<RemovalCertificate>)> {
    let q = algebra::quotient_graph(c);
    let mut nb_fibers: Vec<usize> = fibers_r
        .iter()
        .flat_map(|&f| q.neighbors(f).iter().copied())
        .filter(|f| !fibers_r.contains(f))
        .collect();
    nb_fibers.sort_unstable();
    nb_fibers.dedup();
    let r_verts: Vec<usize> = fibers_r.iter().flat_map(|&f| c.fibers()[f].clone()).collect();
    let b_verts: Vec<usize> = nb_fibers.iter().flat_map(|&f| c.fibers()[f].clone()).collect();
    let total = r_verts.len() + b_verts.len();
    if total > AUTOMORPHISM_VERTEX_GUARD {
        return Err(Error::SizeGuard {
            what: "restorability search",
            actual: total,
            limit: AUTOMORPHISM_VERTEX_GUARD,
        });
    }
    let minus_verts: Vec<usize> = (0..c.n()).filter(|v| !r_verts.contains(v)).collect();
    let sufficient_only = minus_verts.len() > EXTENSION_VERTEX_BUDGET;

    let g_b = c.base().induced(&b_verts);
    let mut rb_verts = r_verts.clone();
    rb_verts.extend_from_slice(&b_verts);
    let g_rb = c.base().induced(&rb_verts);
    let g_minus = c.base().induced(&minus_verts);
    // positions of B inside the two ambient graphs
    let b_in_rb: Vec<usize> = (r_verts.len()..rb_verts.len()).collect();
    let b_in_minus: Vec<usize> = b_verts
        .iter()
        .map(|v| minus_verts.iter().position(|x| x == v).unwrap())
        .collect();

    let autos = iso::automorphism_group(&g_b, AUTOMORPHISM_GROUP_CAP)?;
    let mut extensions = Vec::new();
    for phi in &autos {
        let extends_outward = if sufficient_only {
            true
        } else {
            let partial: Vec<(usize, usize)> = (0..b_verts.len())
                .map(|i| (b_in_minus[i], b_in_minus[phi[i]]))
                .collect();
            iso::find_color_preserving_iso(&g_minus, &g_minus, &partial).is_some()
        };
        if !extends_outward {
            continue;
        }
        let partial: Vec<(usize, usize)> = (0..b_verts.len())
            .map(|i| (b_in_rb[i], b_in_rb[phi[i]]))
            .collect();
        match iso::find_color_preserving_iso(&g_rb, &g_rb, &partial) {
            Some(ext) => extensions.push((phi.clone(), ext)),
            None => return Ok((false, None)),
        }
    }
    Ok((
        true,
        Some(RemovalCertificate {
            removed_fibers: fibers_r.to_vec(),
            neighborhood_fibers: nb_fibers,
            extensions,
            sufficient_only,
        }),
    ))
}

/// Is Y taken care of regarding restorability of R: for every y in Y and
/// every relation U from Y to R there is a third fiber B, b in B, and a
/// relation from B to R with bU_B contained in yU.
pub fn is_taken_care_of(c: &CoherentConfiguration, r: usize, y: usize) -> Result<bool> {
    if r == y {
        return Err(Error::Argument("fibers must be distinct".into()));
    }
    for &yv in &c.fibers()[y] {
        for u in algebra::interspace(c, y, r)?.relations {
            let yu: HashSet<usize> = c.neighborhood(yv, u).into_iter().collect();
            let mut found = false;
            'search: for b in 0..c.fiber_count() {
                if b == r || b == y {
                    continue;
                }
                for ub in algebra::interspace(c, b, r)?.relations {
                    for &bv in &c.fibers()[b] {
                        if c.neighborhood(bv, ub).iter().all(|w| yu.contains(w)) {
                            found = true;
                            break 'search;
                        }
                    }
                }
            }
            if !found {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A criticality violation by modules: the coarsest proper module partition
/// of a small fiber has at most three parts.
#[derive(Debug, Clone)]
pub struct ModuleViolation {
    pub fiber: usize,
    pub modules: Vec<Vec<usize>>,
    /// the configuration after collapsing each module to a representative
    pub collapsed: CoherentConfiguration,
}

/// Checks the small-fiber module condition; the configuration must not be
/// homogeneous.
pub fn small_module_check(
    c: &CoherentConfiguration,
    s: usize,
) -> Result<Option<ModuleViolation>> {
    let sz = c.fibers()[s].len();
    if !(4..=7).contains(&sz) {
        return Err(Error::Argument(format!("fiber {s} has size {sz}; need a small fiber")));
    }
    if c.fiber_count() == 1 {
        return Err(Error::Argument("module check needs a non-homogeneous configuration".into()));
    }
    let modules = match algebra::find_modules(c, s)? {
        Some(m) if m.len() <= 3 => m,
        _ => return Ok(None),
    };
    let representatives: Vec<usize> = modules.iter().map(|m| m[0]).collect();
    let keep: Vec<usize> = (0..c.n())
        .filter(|v| c.fiber_of(*v) != s || representatives.contains(v))
        .collect();
    let collapsed = coherent_closure(&c.base().induced(&keep))?;
    Ok(Some(ModuleViolation { fiber: s, modules, collapsed }))
}

/// One step of the reduction driver.
#[derive(Debug, Clone, serde::Serialize)]
pub enum StepKind {
    RemoveTiny,
    RemoveStarCenter,
    AlternatingCycleToStar,
    ModuleCollapse,
    RemoveRestorable,
    Reclosure,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TraceStep {
    pub kind: StepKind,
    /// removed vertices, as indices of the original input configuration
    pub removed_original_vertices: Vec<usize>,
    pub note: String,
}

/// Auditable record of a reduction run; replaying the removals on the input
/// reproduces the output partition.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct ReductionTrace {
    pub steps: Vec<TraceStep>,
    pub skipped_over_budget: Vec<String>,
}

/// Fixpoint of the dimension-preserving removals: re-closure, tiny removal,
/// star-center removal, module collapse, and removal of non-dominating
/// restorable fiber sets (singletons and adjacent pairs).
pub fn reduce_to_core(c: &CoherentConfiguration) -> Result<(CoherentConfiguration, ReductionTrace)> {
    let mut cur = coherent_closure(c.base())?;
    let mut orig: Vec<usize> = (0..cur.n()).collect();
    let mut trace = ReductionTrace::default();

    let remove = |cur: &CoherentConfiguration,
                  orig: &mut Vec<usize>,
                  drop_fibers: &[usize]|
     -> Result<CoherentConfiguration> {
        let keep: Vec<usize> = (0..cur.n()).filter(|&v| !drop_fibers.contains(&cur.fiber_of(v))).collect();
        let next = coherent_closure(&cur.base().induced(&keep))?;
        *orig = keep.iter().map(|&v| orig[v]).collect();
        Ok(next)
    };

    loop {
        if cur.n() == 0 {
            break;
        }
        // tiny fibers
        let tiny = detect_tiny(&cur);
        if let Some(&f) = tiny.first() {
            let removed: Vec<usize> = cur.fibers()[f].iter().map(|&v| orig[v]).collect();
            let note = format!("tiny fiber of size {}", cur.fibers()[f].len());
            cur = remove(&cur, &mut orig, &[f])?;
            trace.steps.push(TraceStep { kind: StepKind::RemoveTiny, removed_original_vertices: removed, note });
            continue;
        }
        // star centers: remove R for the first (R, B) with d_min(B, R) = 1
        let stars = detect_star(&cur);
        if let Some(&(r, b)) = stars.first() {
            let removed: Vec<usize> = cur.fibers()[r].iter().map(|&v| orig[v]).collect();
            let alt = detect_alternating_cycle(&cur)?;
            let kind = if alt.iter().any(|h| {
                (h.pair == (r.min(b), r.max(b))) && h.matching_present
            }) {
                StepKind::AlternatingCycleToStar
            } else {
                StepKind::RemoveStarCenter
            };
            let note = format!(
                "fiber of size {} uniquely recoverable from a size-{} neighbor",
                cur.fibers()[r].len(),
                cur.fibers()[b].len()
            );
            cur = remove(&cur, &mut orig, &[r])?;
            trace.steps.push(TraceStep { kind, removed_original_vertices: removed, note });
            continue;
        }
        // module collapse on small fibers
        if cur.fiber_count() > 1 {
            let mut collapsed = None;
            for s in 0..cur.fiber_count() {
                if !(4..=7).contains(&cur.fibers()[s].len()) {
                    continue;
                }
                if let Some(v) = small_module_check(&cur, s)? {
                    collapsed = Some(v);
                    break;
                }
            }
            if let Some(v) = collapsed {
                let kept: Vec<usize> = v.modules.iter().map(|m| m[0]).collect();
                let removed: Vec<usize> = cur.fibers()[v.fiber]
                    .iter()
                    .filter(|x| !kept.contains(x))
                    .map(|&x| orig[x])
                    .collect();
                let keep: Vec<usize> = (0..cur.n())
                    .filter(|&x| cur.fiber_of(x) != v.fiber || kept.contains(&x))
                    .collect();
                orig = keep.iter().map(|&x| orig[x]).collect();
                let note = format!(
                    "small fiber partitioned into {} modules; collapsed to representatives",
                    v.modules.len()
                );
                cur = v.collapsed;
                trace.steps.push(TraceStep {
                    kind: StepKind::ModuleCollapse,
                    removed_original_vertices: removed,
                    note,
                });
                continue;
            }
        }
        // restorable non-dominating sets: singletons, then adjacent pairs
        let q = algebra::quotient_graph(&cur);
        let mut candidates: Vec<Vec<usize>> = (0..cur.fiber_count()).map(|f| vec![f]).collect();
        for &(a, b) in &q.edges {
            candidates.push(vec![a, b]);
        }
        let mut removed_any = false;
        for cand in candidates {
            if q.is_dominating(&cand) {
                continue;
            }
            match is_restorable(&cur, &cand) {
                Ok((true, _)) => {
                    let removed: Vec<usize> = cand
                        .iter()
                        .flat_map(|&f| cur.fibers()[f].iter().map(|&v| orig[v]))
                        .collect();
                    let note = format!(
                        "restorable non-dominating fiber set of sizes {:?}",
                        cand.iter().map(|&f| cur.fibers()[f].len()).collect::<Vec<_>>()
                    );
                    cur = remove(&cur, &mut orig, &cand)?;
                    trace.steps.push(TraceStep {
                        kind: StepKind::RemoveRestorable,
                        removed_original_vertices: removed,
                        note,
                    });
                    removed_any = true;
                    break;
                }
                Ok((false, _)) => {}
                Err(Error::SizeGuard { .. }) => {
                    trace
                        .skipped_over_budget
                        .push(format!("restorability of fiber set {cand:?} over budget"));
                }
                Err(e) => return Err(e),
            }
        }
        if removed_any {
            continue;
        }
        break;
    }
    Ok((cur, trace))
}

// ---------------------------------------------------------------------------
// the exact WL-dimension oracle over small simple graphs
// ---------------------------------------------------------------------------

fn pair_index(n: usize) -> Vec<(usize, usize)> {
    let mut out = vec![];
    for u in 0..n {
        for v in (u + 1)..n {
            out.push((u, v));
        }
    }
    out
}

fn mask_invariant(n: usize, mask: u32, pairs: &[(usize, usize)]) -> u64 {
    let mut adj = vec![0u8; n * n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            adj[u * n + v] = 1;
            adj[v * n + u] = 1;
        }
    }
    let deg: Vec<usize> = (0..n).map(|v| (0..n).filter(|&w| adj[v * n + w] == 1).count()).collect();
    // per-vertex: (degree, sorted neighbor degrees, triangles at v)
    let mut profiles: Vec<(usize, Vec<usize>, usize)> = (0..n)
        .map(|v| {
            let mut nd: Vec<usize> = (0..n).filter(|&w| adj[v * n + w] == 1).map(|w| deg[w]).collect();
            nd.sort_unstable();
            let mut tri = 0;
            for a in 0..n {
                for b in (a + 1)..n {
                    if adj[v * n + a] == 1 && adj[v * n + b] == 1 && adj[a * n + b] == 1 {
                        tri += 1;
                    }
                }
            }
            (deg[v], nd, tri)
        })
        .collect();
    profiles.sort();
    let mut h = 0xcbf29ce484222325u64 ^ n as u64;
    for (d, nd, t) in profiles {
        h = (h ^ d as u64).wrapping_mul(0x100000001b3);
        for x in nd {
            h = (h ^ x as u64).wrapping_mul(0x100000001b3);
        }
        h = (h ^ (t as u64) << 7).wrapping_mul(0x100000001b3);
    }
    h
}

fn masks_isomorphic(n: usize, m1: u32, m2: u32, pairs: &[(usize, usize)]) -> bool {
    let build = |mask: u32| -> Vec<u64> {
        let mut adj = vec![0u64; n];
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
        adj
    };
    let (a1, a2) = (build(m1), build(m2));
    let deg1: Vec<u32> = a1.iter().map(|x| x.count_ones()).collect();
    let deg2: Vec<u32> = a2.iter().map(|x| x.count_ones()).collect();
    {
        let (mut s1, mut s2) = (deg1.clone(), deg2.clone());
        s1.sort_unstable();
        s2.sort_unstable();
        if s1 != s2 {
            return false;
        }
    }
    fn go(
        n: usize,
        a1: &[u64],
        a2: &[u64],
        deg1: &[u32],
        deg2: &[u32],
        map: &mut Vec<usize>,
        used: &mut u64,
        v: usize,
    ) -> bool {
        if v == n {
            return true;
        }
        for w in 0..n {
            if *used >> w & 1 == 1 || deg1[v] != deg2[w] {
                continue;
            }
            let ok = (0..v).all(|u| (a1[u] >> v & 1) == (a2[map[u]] >> w & 1));
            if ok {
                map[v] = w;
                *used |= 1 << w;
                if go(n, a1, a2, deg1, deg2, map, used, v + 1) {
                    return true;
                }
                *used &= !(1 << w);
            }
        }
        false
    }
    let mut map = vec![0usize; n];
    let mut used = 0u64;
    go(n, &a1, &a2, &deg1, &deg2, &mut map, &mut used, 0)
}

/// All simple graphs on n vertices up to isomorphism, as edge masks over the
/// lexicographic pair order.
pub fn graph_universe_masks(n: usize) -> &'static Vec<u32> {
    static CACHES: OnceLock<Vec<OnceLock<Vec<u32>>>> = OnceLock::new();
    let caches = CACHES.get_or_init(|| (0..8).map(|_| OnceLock::new()).collect());
    assert!(n <= 7, "universe limited to 7 vertices");
    caches[n].get_or_init(|| {
        let pairs = pair_index(n);
        let total = 1u32 << pairs.len();
        let mut buckets: std::collections::HashMap<u64, Vec<u32>> = Default::default();
        for mask in 0..total {
            let inv = mask_invariant(n, mask, &pairs);
            let reps = buckets.entry(inv).or_default();
            if !reps.iter().any(|&r| masks_isomorphic(n, r, mask, &pairs)) {
                reps.push(mask);
            }
        }
        let mut out: Vec<u32> = buckets.into_values().flatten().collect();
        out.sort_unstable();
        out
    })
}

pub fn mask_to_graph(n: usize, mask: u32) -> ColoredDigraph {
    let pairs = pair_index(n);
    let edges: Vec<(usize, usize)> = pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &p)| p)
        .collect();
    ColoredDigraph::simple_graph(n, &edges)
}

pub fn graph_to_mask(g: &ColoredDigraph) -> u32 {
    let n = g.n();
    let pairs = pair_index(n);
    let mut mask = 0u32;
    // an edge is any non-loop color whose class is not the largest non-loop
    // class... instead, read adjacency from the key structure
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if matches!(g.key(g.color(u, v)), crate::graph::ColorKey::Edge) {
            mask |= 1 << i;
        }
    }
    mask
}

/// Smallest k such that k-WL distinguishes g from every non-isomorphic
/// simple graph on the same number of vertices.
pub fn exact_wldim(g: &ColoredDigraph) -> Result<usize> {
    let n = g.n();
    if n > 7 {
        return Err(Error::UnsupportedOrder { n, what: "exact WL-dimension oracle" });
    }
    if n <= 1 {
        return Ok(1);
    }
    let pairs = pair_index(n);
    let mask = graph_to_mask(g);
    let universe = graph_universe_masks(n);
    let rivals: Vec<u32> = universe
        .iter()
        .copied()
        .filter(|&m| !masks_isomorphic(n, m, mask, &pairs))
        .collect();
    for k in 1..=n {
        let all = rivals
            .par_iter()
            .try_fold(
                || true,
                |acc, &m| -> Result<bool> {
                    if !acc {
                        return Ok(false);
                    }
                    distinguishes(g, &mask_to_graph(n, m), k)
                },
            )
            .try_reduce(|| true, |a, b| Ok(a && b))?;
        if all {
            return Ok(k);
        }
    }
    Err(Error::Integrity("no dimension up to n distinguished the graph".into()))
}

/// Marks vertex v with its own color.
pub fn mark_vertex(g: &ColoredDigraph, v: usize) -> ColoredDigraph {
    let n = g.n();
    let mut b = crate::graph::GraphBuilder::new(n);
    for u in 0..n {
        for w in 0..n {
            if u != w && matches!(g.key(g.color(u, w)), crate::graph::ColorKey::Edge) && u < w {
                b.edge(u, w).unwrap();
            }
        }
    }
    b.vertex_color(v, 1).unwrap();
    b.finish()
}

/// All vertex-marked simple graphs on n vertices up to marked isomorphism.
pub fn marked_universe(n: usize) -> &'static Vec<ColoredDigraph> {
    static CACHES: OnceLock<Vec<OnceLock<Vec<ColoredDigraph>>>> = OnceLock::new();
    let caches = CACHES.get_or_init(|| (0..8).map(|_| OnceLock::new()).collect());
    assert!(n <= 7);
    caches[n].get_or_init(|| {
        let mut out = Vec::new();
        for &m in graph_universe_masks(n) {
            let h = mask_to_graph(n, m);
            let orbits = iso::automorphism_orbits(&h, AUTOMORPHISM_GROUP_CAP)
                .expect("small graph automorphism group");
            for orbit in orbits {
                out.push(mark_vertex(&h, orbit[0]));
            }
        }
        out
    })
}

/// Smallest k such that k-WL distinguishes (g, v) from every non-isomorphic
/// vertex-marked simple graph on the same order.
pub fn exact_wldim_marked(g: &ColoredDigraph, v: usize) -> Result<usize> {
    let n = g.n();
    if n > 7 {
        return Err(Error::UnsupportedOrder { n, what: "exact WL-dimension oracle" });
    }
    let marked = mark_vertex(g, v);
    let rivals: Vec<&ColoredDigraph> = marked_universe(n)
        .iter()
        .filter(|hm| iso::find_color_preserving_iso(&marked, hm, &[]).is_none())
        .collect();
    for k in 1..=n {
        let all = rivals
            .par_iter()
            .try_fold(
                || true,
                |acc, h| -> Result<bool> {
                    if !acc {
                        return Ok(false);
                    }
                    distinguishes(&marked, h, k)
                },
            )
            .try_reduce(|| true, |a, b| Ok(a && b))?;
        if all {
            return Ok(k);
        }
    }
    Err(Error::Integrity("no dimension up to n distinguished the marked graph".into()))
}

/// Re-runs a trace's removals against the original configuration and checks
/// the outcome matches.
pub fn replay_trace(
    input: &CoherentConfiguration,
    trace: &ReductionTrace,
    output: &CoherentConfiguration,
) -> Result<bool> {
    let mut removed: HashSet<usize> = HashSet::new();
    for step in &trace.steps {
        removed.extend(step.removed_original_vertices.iter().copied());
    }
    let keep: Vec<usize> = (0..input.n()).filter(|v| !removed.contains(v)).collect();
    let replayed = coherent_closure(&input.base().induced(&keep))?;
    Ok(replayed.base() == output.base())
}
