//! Interspace-pattern classification between a small fiber (size 4 or 6)
//! and an arbitrary fiber, equivalence-class partitions, partition
//! structures, the fully-intersecting test, and the divisor identity.

use crate::algebra;
use crate::census::{self, ConstituentType, PatternName};
use crate::errors::{Error, Result};
use crate::graph::{ColorKey, ColoredDigraph};
use crate::refine::CoherentConfiguration;
use num_rational::Rational64;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Realization mark for a clique size 3 entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Mark {
    /// all 3-cliques of the host constituent are realized as neighborhoods
    Dagger,
    /// exactly one of each complementary 3-clique pair is realized
    DoubleDagger,
}

#[derive(Debug, Clone)]
pub struct PatternEntry {
    /// the witnessing relation U^i_j in I[L,S]
    pub relation: u32,
    pub clique_size: usize,
    pub mark: Option<Mark>,
}

#[derive(Debug, Clone)]
pub struct PatternGroup {
    /// witnessing host relation A^i of the small fiber (canonical choice:
    /// smallest color id of its ul class)
    pub host: u32,
    /// isomorphism type of ul(S, A^i)
    pub host_type: ConstituentType,
    pub entries: Vec<PatternEntry>,
}

/// The classified pattern with its witnesses.
#[derive(Debug, Clone)]
pub struct InterspacePattern {
    pub name: PatternName,
    pub groups: Vec<PatternGroup>,
    /// the one omitted relation of I[L,S]
    pub omitted: u32,
    pub fiber_l: usize,
    pub fiber_s: usize,
}

/// A qualifying relation: every neighborhood is a d-clique inside one ul
/// constituent of the small fiber.
struct Qualifier {
    relation: u32,
    degree: usize,
    host_ul_class: u32,
    host_color: u32,
    host_type: ConstituentType,
    realized: BTreeSet<Vec<usize>>,
}

fn ul_adjacency(c: &CoherentConfiguration, s: usize) -> (Vec<u32>, HashMap<u32, Vec<(usize, usize)>>) {
    let ul = algebra::underlying_undirected(c);
    let verts = &c.fibers()[s];
    let mut classes: Vec<u32> = Vec::new();
    let mut edges: HashMap<u32, Vec<(usize, usize)>> = HashMap::new();
    for &u in verts {
        for &v in verts {
            if u < v {
                let cls = ul.class_of[c.color(u, v) as usize];
                edges.entry(cls).or_default().push((u, v));
                if !classes.contains(&cls) {
                    classes.push(cls);
                }
            }
        }
    }
    classes.sort_unstable();
    (classes, edges)
}

fn qualify(
    c: &CoherentConfiguration,
    l: usize,
    s: usize,
    relation: u32,
    ul_edges: &HashMap<u32, Vec<(usize, usize)>>,
) -> Option<Qualifier> {
    let d = c.relation(relation).degree;
    if d != 2 && d != 3 {
        return None;
    }
    let ul = algebra::underlying_undirected(c);
    let mut host: Option<u32> = None;
    let mut realized: BTreeSet<Vec<usize>> = BTreeSet::new();
    for &ell in &c.fibers()[l] {
        let nb: Vec<usize> = c.neighborhood(ell, relation);
        debug_assert_eq!(nb.len(), d);
        // all pairs must lie in one ul class
        for i in 0..nb.len() {
            for j in (i + 1)..nb.len() {
                let cls = ul.class_of[c.color(nb[i], nb[j]) as usize];
                match host {
                    None => host = Some(cls),
                    Some(h) if h == cls => {}
                    _ => return None,
                }
            }
        }
        realized.insert(nb);
    }
    let host_ul_class = host?;
    if !ul_edges.contains_key(&host_ul_class) {
        return None;
    }
    // canonical host relation: smallest color id inside the ul class
    let host_color = (0..c.rank() as u32)
        .find(|&a| {
            ul.class_of[a as usize] == host_ul_class
                && c.relation(a).src_fiber == s
                && c.relation(a).dst_fiber == s
        })?;
    let verts = &c.fibers()[s];
    let local: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let arcs: Vec<(usize, usize)> = ul_edges[&host_ul_class]
        .iter()
        .flat_map(|&(u, v)| [(local[&u], local[&v]), (local[&v], local[&u])])
        .collect();
    let host_type = census::recognize_fiber_constituent(verts.len(), &arcs).ok()?;
    Some(Qualifier { relation, degree: d, host_ul_class, host_color, host_type, realized })
}

fn three_cliques(edges: &[(usize, usize)], verts: &[usize]) -> Vec<Vec<usize>> {
    let set: BTreeSet<(usize, usize)> = edges
        .iter()
        .flat_map(|&(u, v)| [(u, v), (v, u)])
        .collect();
    let mut out = Vec::new();
    for i in 0..verts.len() {
        for j in (i + 1)..verts.len() {
            for k in (j + 1)..verts.len() {
                let (a, b, cc) = (verts[i], verts[j], verts[k]);
                if set.contains(&(a, b)) && set.contains(&(a, cc)) && set.contains(&(b, cc)) {
                    out.push(vec![a, b, cc]);
                }
            }
        }
    }
    out
}

fn resolve_mark(
    q: &Qualifier,
    ul_edges: &HashMap<u32, Vec<(usize, usize)>>,
    s_verts: &[usize],
) -> Option<Mark> {
    if q.degree != 3 {
        return None;
    }
    let cliques = three_cliques(&ul_edges[&q.host_ul_class], s_verts);
    let all: BTreeSet<Vec<usize>> = cliques.iter().cloned().collect();
    if all.iter().all(|t| q.realized.contains(t)) {
        return Some(Mark::Dagger);
    }
    let s_set: BTreeSet<usize> = s_verts.iter().copied().collect();
    let complementary_ok = all.iter().all(|t| {
        let comp: Vec<usize> = s_set.iter().copied().filter(|v| !t.contains(v)).collect();
        if !all.contains(&comp) {
            return false;
        }
        q.realized.contains(t) != q.realized.contains(&comp)
    });
    if complementary_ok {
        return Some(Mark::DoubleDagger);
    }
    None
}

/// Normalized shape: per group, the host type plus the sorted entry list.
type Shape = Vec<(ConstituentType, Vec<(usize, Option<Mark>)>)>;

fn shape_to_name(small_size: usize, shape: &Shape) -> Option<PatternName> {
    use ConstituentType::*;
    use PatternName::*;
    let k222 = CompleteMultipartite { parts: 3, part_size: 2 };
    let k33 = CompleteMultipartite { parts: 2, part_size: 3 };
    let d2 = |n: usize| vec![(2usize, None); n];
    let m = |mut shape_cand: Shape| {
        shape_cand.sort();
        shape_cand
    };
    let candidates: Vec<(PatternName, Shape)> = if small_size == 4 {
        vec![
            (FourClique, m(vec![(Clique(4), d2(1))])),
            (FourMatching, m(vec![(DisjointCliques(2, 2), d2(1))])),
            (FourCycle, m(vec![(Cycle(4), d2(1))])),
        ]
    } else {
        vec![
            (SixCliqueTwo, m(vec![(Clique(6), d2(1))])),
            (SixCliqueTwoTwice, m(vec![(Clique(6), d2(2))])),
            (SixMatching, m(vec![(DisjointCliques(3, 2), d2(1))])),
            (SixMatchingTwice, m(vec![(DisjointCliques(3, 2), d2(2))])),
            (
                SixMatchingAndCycle,
                m(vec![(Cycle(6), d2(1)), (DisjointCliques(3, 2), d2(1))]),
            ),
            (
                SixMatchingMatching,
                m(vec![
                    (DisjointCliques(3, 2), d2(1)),
                    (DisjointCliques(3, 2), d2(1)),
                ]),
            ),
            (
                SixMatchingAndComplement,
                m(vec![(k222.clone(), d2(1)), (DisjointCliques(3, 2), d2(1))]),
            ),
            (SixTriangleComplement, m(vec![(k33.clone(), d2(1))])),
            (SixTriangleComplementTwice, m(vec![(k33.clone(), d2(2))])),
            (SixCliqueThree, m(vec![(Clique(6), vec![(3, Some(Mark::Dagger))])])),
            (
                SixCliqueThreeDouble,
                m(vec![(Clique(6), vec![(3, Some(Mark::DoubleDagger))])]),
            ),
            (
                SixTriangle,
                m(vec![(DisjointCliques(2, 3), vec![(3, Some(Mark::Dagger))])]),
            ),
            (
                SixMatchingComplement,
                m(vec![(k222.clone(), vec![(3, Some(Mark::Dagger))])]),
            ),
            (
                SixMatchingComplementDouble,
                m(vec![(k222, vec![(3, Some(Mark::DoubleDagger))])]),
            ),
        ]
    };
    candidates
        .into_iter()
        .find(|(_, cand)| cand == shape)
        .map(|(name, _)| name)
}

fn normalize_shape(groups: &[PatternGroup]) -> Shape {
    let mut shape: Shape = groups
        .iter()
        .map(|g| {
            let mut entries: Vec<(usize, Option<Mark>)> =
                g.entries.iter().map(|e| (e.clique_size, e.mark)).collect();
            entries.sort();
            (g.host_type.clone(), entries)
        })
        .collect();
    shape.sort();
    shape
}

/// Number of distinct neighborhoods of L under a relation.
fn partition_by_relation(c: &CoherentConfiguration, l: usize, relation: u32) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for &ell in &c.fibers()[l] {
        classes.entry(c.neighborhood(ell, relation)).or_default().push(ell);
    }
    classes.into_values().collect()
}

/// Classifies the interspace between fiber `l` and a small fiber `s` of size
/// 4 or 6 as exactly one of the 17 patterns. Errors when no pattern matches,
/// which signals a non-critical or incoherent input.
pub fn classify_pattern(c: &CoherentConfiguration, l: usize, s: usize) -> Result<InterspacePattern> {
    let small_size = c.fibers()[s].len();
    if small_size != 4 && small_size != 6 {
        return Err(Error::UnsupportedOrder { n: small_size, what: "patterns need a small fiber of size 4 or 6" });
    }
    let isp = algebra::interspace(c, l, s)?;
    if isp.homogeneous || l == s {
        return Err(Error::Argument("(L,S) must be a quotient edge between distinct fibers".into()));
    }
    let u = isp.relations.len();
    if u < 2 || u > 3 {
        return Err(Error::Integrity(format!(
            "interspace has {u} relations; a critical configuration allows 2 or 3"
        )));
    }
    let (_, ul_edges) = ul_adjacency(c, s);
    let s_verts = c.fibers()[s].clone();
    let quals: HashMap<u32, Qualifier> = isp
        .relations
        .iter()
        .filter_map(|&rel| qualify(c, l, s, rel, &ul_edges).map(|q| (rel, q)))
        .collect();

    let mut outcomes: Vec<(PatternName, InterspacePattern)> = Vec::new();
    for &omit in &isp.relations {
        let chosen: Vec<&Qualifier> = isp
            .relations
            .iter()
            .filter(|&&r| r != omit)
            .filter_map(|r| quals.get(r))
            .collect();
        if chosen.len() != u - 1 {
            continue;
        }
        // group by host ul class
        let mut by_host: BTreeMap<u32, Vec<&Qualifier>> = BTreeMap::new();
        for q in &chosen {
            by_host.entry(q.host_ul_class).or_default().push(q);
        }
        let mut groups: Vec<PatternGroup> = Vec::new();
        let mut ok = true;
        for (_, qs) in by_host {
            let host_color = qs[0].host_color;
            let host_type = qs[0].host_type.clone();
            let mut entries = Vec::new();
            for q in qs {
                let mark = resolve_mark(q, &ul_edges, &s_verts);
                if q.degree == 3 && mark.is_none() {
                    ok = false;
                }
                entries.push(PatternEntry { relation: q.relation, clique_size: q.degree, mark });
            }
            entries.sort_by_key(|e| e.relation);
            groups.push(PatternGroup { host: host_color, host_type, entries });
        }
        if !ok {
            continue;
        }
        // order groups by descending first-relation partition size, then host
        groups.sort_by_key(|g| {
            let parts = partition_by_relation(c, l, g.entries[0].relation).len();
            (usize::MAX - parts, g.host)
        });
        let shape = normalize_shape(&groups);
        if let Some(name) = shape_to_name(small_size, &shape) {
            outcomes.push((
                name,
                InterspacePattern { name, groups, omitted: omit, fiber_l: l, fiber_s: s },
            ));
        }
    }
    let mut names: Vec<PatternName> = outcomes.iter().map(|(n, _)| *n).collect();
    names.sort();
    names.dedup();
    match names.len() {
        0 => Err(Error::Integrity(
            "no interspace pattern matches; the input is not critical or not coherent".into(),
        )),
        1 => Ok(outcomes.into_iter().next().unwrap().1),
        _ => Err(Error::Integrity(format!(
            "ambiguous interspace pattern: {names:?} all match, violating uniqueness"
        ))),
    }
}

/// The equivalence-class partitions Part^i_j(L,S) and their meet.
#[derive(Debug, Clone)]
pub struct EquivalenceClasses {
    /// (small fiber, relation U^i_j, partition of L)
    pub per_relation: Vec<(usize, u32, Vec<Vec<usize>>)>,
    /// Part(L, S-collection): the meet
    pub meet: Vec<Vec<usize>>,
    /// |Part(L,S)| for the first small fiber's leading relation
    pub leading_part_count: usize,
}

/// Partitions of L induced by the classified patterns toward each small
/// fiber in `smalls`, plus their meet.
pub fn equivalence_classes(
    c: &CoherentConfiguration,
    l: usize,
    smalls: &[usize],
) -> Result<EquivalenceClasses> {
    if smalls.is_empty() {
        return Err(Error::Argument("need at least one small fiber".into()));
    }
    let mut per_relation = Vec::new();
    for &s in smalls {
        let pat = classify_pattern(c, l, s)?;
        for g in &pat.groups {
            for e in &g.entries {
                per_relation.push((s, e.relation, partition_by_relation(c, l, e.relation)));
            }
        }
    }
    let leading_part_count = per_relation[0].2.len();
    // meet: common refinement via per-vertex class tuples
    let mut key: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &ell in &c.fibers()[l] {
        key.insert(ell, Vec::new());
    }
    for (_, _, parts) in &per_relation {
        for (i, part) in parts.iter().enumerate() {
            for &ell in part {
                key.get_mut(&ell).unwrap().push(i);
            }
        }
    }
    let mut meet: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ell, k) in key {
        meet.entry(k).or_default().push(ell);
    }
    let meet: Vec<Vec<usize>> = meet.into_values().collect();
    // coherence forces an equipartition
    let sz = meet[0].len();
    if meet.iter().any(|p| p.len() != sz) {
        return Err(Error::Integrity("equivalence classes are not an equipartition".into()));
    }
    Ok(EquivalenceClasses { per_relation, meet, leading_part_count })
}

/// The partition structure: a coherent configuration on Part(L, smalls)
/// whose relations are the level sets of (P,P') -> |pU ∩ p'U'|.
pub fn partition_structure(
    c: &CoherentConfiguration,
    l: usize,
    smalls: &[usize],
) -> Result<(CoherentConfiguration, Vec<Vec<usize>>)> {
    let eq = equivalence_classes(c, l, smalls)?;
    let parts = eq.meet.clone();
    let p = parts.len();
    // all relations from L into any of the small fibers
    let mut relations: Vec<u32> = Vec::new();
    for &s in smalls {
        relations.extend(algebra::interspace(c, l, s)?.relations);
    }
    relations.sort_unstable();
    let nb: HashMap<(usize, u32), BTreeSet<usize>> = {
        let mut m = HashMap::new();
        for &ell in &c.fibers()[l] {
            for &u in &relations {
                m.insert((ell, u), c.neighborhood(ell, u).into_iter().collect());
            }
        }
        m
    };
    let eta = |pp: &[usize], qq: &[usize]| -> Result<Vec<usize>> {
        // all members of one part share their neighborhoods toward the small
        // fibers, so x == y contributes the same vector as x != y
        let mut expected: Option<Vec<usize>> = None;
        for &x in pp {
            for &y in qq {
                let mut vector = Vec::with_capacity(relations.len() * relations.len());
                for &u in &relations {
                    for &u2 in &relations {
                        vector.push(nb[&(x, u)].intersection(&nb[&(y, u2)]).count());
                    }
                }
                match &expected {
                    None => expected = Some(vector),
                    Some(e) => {
                        if *e != vector {
                            return Err(Error::Integrity(
                                "partition-structure counts depend on the representative".into(),
                            ));
                        }
                    }
                }
            }
        }
        expected.ok_or_else(|| Error::Integrity("empty part in partition structure".into()))
    };
    let mut matrix = vec![0u32; p * p];
    let mut intern: HashMap<(bool, Vec<usize>), u32> = HashMap::new();
    let mut next = 0u32;
    for i in 0..p {
        for j in 0..p {
            let v = eta(&parts[i], &parts[j])?;
            let id = *intern.entry((i == j, v)).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            matrix[i * p + j] = id;
        }
    }
    let keys: Vec<ColorKey> = (0..next as u64).map(ColorKey::Derived).collect();
    let g = ColoredDigraph::from_parts(p, matrix, keys).canonical_colors();
    let rep = crate::refine::verify_coherence(&g);
    if !rep.ok() {
        return Err(Error::Integrity("partition structure is not coherent".into()));
    }
    Ok((CoherentConfiguration::from_closed(g)?, parts))
}

/// Type tuple of a homogeneous partition structure.
pub fn structure_type(structure: &CoherentConfiguration) -> Result<Vec<ConstituentType>> {
    if structure.fiber_count() != 1 {
        return Err(Error::Integrity(format!(
            "partition structure has {} fibers; expected a homogeneous structure",
            structure.fiber_count()
        )));
    }
    census::constituent_tuple(structure, 0)
}

/// True iff every part of Part(L,S1) meets every part of Part(L,S2).
pub fn fully_intersecting(
    c: &CoherentConfiguration,
    s1: usize,
    l: usize,
    s2: usize,
) -> Result<bool> {
    if s1 == s2 {
        return Err(Error::Argument("fully_intersecting needs two distinct small fibers".into()));
    }
    for s in [s1, s2] {
        let isp = algebra::interspace(c, l, s)?;
        if isp.homogeneous {
            return Err(Error::Argument("(S1,L,S2) must be a path in the quotient graph".into()));
        }
    }
    let p1 = leading_partition(c, l, s1)?;
    let p2 = leading_partition(c, l, s2)?;
    Ok(p1.iter().all(|a| {
        p2.iter().all(|b| a.iter().any(|x| b.contains(x)))
    }))
}

/// Part(L,S): the partition of L under the leading pattern relation U^1_1.
pub fn leading_partition(c: &CoherentConfiguration, l: usize, s: usize) -> Result<Vec<Vec<usize>>> {
    let pat = classify_pattern(c, l, s)?;
    Ok(partition_by_relation(c, l, pat.groups[0].entries[0].relation))
}

/// Report of the divisor identity d(U)·d(U') = |B|·|rU ∩ yU'| on an induced
/// quotient path (R,B,Y).
#[derive(Debug, Clone, serde::Serialize)]
pub struct DivisorReport {
    pub d_u: usize,
    pub d_u2: usize,
    pub b_size: usize,
    pub common: usize,
    pub holds: bool,
}

/// Verifies the identity over all (r,y) pairs; the intersection size must be
/// constant by coherence.
pub fn divisor_check(
    c: &CoherentConfiguration,
    path: (usize, usize, usize),
    u: u32,
    u2: u32,
) -> Result<DivisorReport> {
    let (r, b, y) = path;
    if r == y || r == b || b == y {
        return Err(Error::Argument("path fibers must be distinct".into()));
    }
    let e_rb = !algebra::interspace(c, r, b)?.homogeneous;
    let e_by = !algebra::interspace(c, b, y)?.homogeneous;
    let e_ry = !algebra::interspace(c, r, y)?.homogeneous;
    if !e_rb || !e_by || e_ry {
        return Err(Error::Argument("(R,B,Y) must be an induced path in the quotient graph".into()));
    }
    let mu = c.relation(u);
    let mu2 = c.relation(u2);
    if mu.src_fiber != r || mu.dst_fiber != b || mu.is_loop {
        return Err(Error::Argument("U must lie in I[R,B]".into()));
    }
    if mu2.src_fiber != y || mu2.dst_fiber != b || mu2.is_loop {
        return Err(Error::Argument("U' must lie in I[Y,B]".into()));
    }
    let mut common: Option<usize> = None;
    for &rv in &c.fibers()[r] {
        let nr: BTreeSet<usize> = c.neighborhood(rv, u).into_iter().collect();
        for &yv in &c.fibers()[y] {
            let ny: BTreeSet<usize> = c.neighborhood(yv, u2).into_iter().collect();
            let q = nr.intersection(&ny).count();
            match common {
                None => common = Some(q),
                Some(prev) if prev == q => {}
                Some(prev) => {
                    return Err(Error::Integrity(format!(
                        "intersection size is not constant ({prev} vs {q}); input not coherent"
                    )))
                }
            }
        }
    }
    let common = common.ok_or_else(|| Error::Integrity("empty fibers".into()))?;
    let holds = mu.degree * mu2.degree == c.fibers()[b].len() * common;
    if !holds {
        return Err(Error::Integrity(format!(
            "divisor identity fails: {}*{} != {}*{common}",
            mu.degree,
            mu2.degree,
            c.fibers()[b].len()
        )));
    }
    Ok(DivisorReport {
        d_u: mu.degree,
        d_u2: mu2.degree,
        b_size: c.fibers()[b].len(),
        common,
        holds,
    })
}

/// Checks the divisor identity on every induced path and relation pair of a
/// configuration; returns the number of (path, U, U') triples checked.
pub fn divisor_check_all(c: &CoherentConfiguration) -> Result<usize> {
    let q = algebra::quotient_graph(c);
    let f = c.fiber_count();
    let mut checked = 0usize;
    for b in 0..f {
        let nbs = q.neighbors(b);
        for (i, &r) in nbs.iter().enumerate() {
            for &y in nbs.iter().skip(i + 1) {
                if q.neighbors(r).contains(&y) {
                    continue;
                }
                for u in algebra::interspace(c, r, b)?.relations {
                    for u2 in algebra::interspace(c, y, b)?.relations {
                        divisor_check(c, (r, b, y), u, u2)?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(checked)
}

/// Exact-rational helper for part-count bookkeeping.
pub fn ratio(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{pattern_instance, PatternName, SmallVariant};

    fn classify(p: PatternName, mult: usize) -> (PatternName, usize) {
        let inst = pattern_instance(p, mult, SmallVariant::Default).unwrap();
        let pat = classify_pattern(&inst.config, inst.fiber_l, inst.fiber_s).unwrap();
        let parts = leading_partition(&inst.config, inst.fiber_l, inst.fiber_s).unwrap();
        (pat.name, parts.len())
    }

    #[test]
    fn four_matching_roundtrip() {
        let (name, parts) = classify(PatternName::FourMatching, 4);
        assert_eq!(name, PatternName::FourMatching);
        assert_eq!(parts, 2);
    }

    #[test]
    fn four_clique_roundtrip() {
        let (name, parts) = classify(PatternName::FourClique, 2);
        assert_eq!(name, PatternName::FourClique);
        assert_eq!(parts, 6);
    }

    #[test]
    fn triangle_complement_roundtrip() {
        let (name, parts) = classify(PatternName::SixTriangleComplement, 2);
        assert_eq!(name, PatternName::SixTriangleComplement);
        assert_eq!(parts, 9);
    }

    #[test]
    fn matching_complement_marks() {
        let inst =
            pattern_instance(PatternName::SixMatchingComplement, 2, SmallVariant::Default).unwrap();
        let pat = classify_pattern(&inst.config, inst.fiber_l, inst.fiber_s).unwrap();
        assert_eq!(pat.name, PatternName::SixMatchingComplement);
        assert_eq!(pat.groups[0].entries[0].mark, Some(Mark::Dagger));
        let eq = equivalence_classes(&inst.config, inst.fiber_l, &[inst.fiber_s]).unwrap();
        assert_eq!(eq.meet.len(), 8);
    }

    #[test]
    fn matching_complement_double_is_cfi_gadget() {
        let inst =
            pattern_instance(PatternName::SixMatchingComplementDouble, 2, SmallVariant::Default)
                .unwrap();
        let pat = classify_pattern(&inst.config, inst.fiber_l, inst.fiber_s).unwrap();
        assert_eq!(pat.name, PatternName::SixMatchingComplementDouble);
        assert_eq!(pat.groups[0].entries[0].mark, Some(Mark::DoubleDagger));
        let eq = equivalence_classes(&inst.config, inst.fiber_l, &[inst.fiber_s]).unwrap();
        assert_eq!(eq.meet.len(), 4);
    }
}
