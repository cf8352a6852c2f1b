//! Backtracking isomorphism and automorphism search on colored digraphs.
//!
//! Two notions are used throughout: color-preserving maps (arc colors match
//! exactly; this is the notion for automorphisms of a configuration) and
//! color-permuting maps (a bijection of colors is found along the way; this
//! is isomorphism of configurations as partitions).

use crate::errors::{Error, Result};
use crate::graph::ColoredDigraph;

/// Vertex order for the search: fibers ascending by size, vertices in
/// canonical order. The diagonal color classes play the role of fibers.
fn search_order(g: &ColoredDigraph) -> Vec<usize> {
    let n = g.n();
    let mut class_size = std::collections::HashMap::new();
    for v in 0..n {
        *class_size.entry(g.color(v, v)).or_insert(0usize) += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (class_size[&g.color(v, v)], g.color(v, v), v));
    order
}

struct PreservingSearch<'a> {
    g: &'a ColoredDigraph,
    h: &'a ColoredDigraph,
    order: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
}

impl<'a> PreservingSearch<'a> {
    fn consistent(&self, v: usize, w: usize) -> bool {
        if self.g.color(v, v) != self.h.color(w, w) {
            return false;
        }
        for u in 0..self.g.n() {
            let mu = self.map[u];
            if mu == usize::MAX || u == v {
                continue;
            }
            if self.g.color(v, u) != self.h.color(w, mu) || self.g.color(u, v) != self.h.color(mu, w) {
                return false;
            }
        }
        true
    }

    /// visit returns false to stop the whole search.
    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if depth == self.order.len() {
            return visit(&self.map);
        }
        let v = self.order[depth];
        for w in 0..self.h.n() {
            if self.used[w] || !self.consistent(v, w) {
                continue;
            }
            self.map[v] = w;
            self.used[w] = true;
            let keep_going = self.run(depth + 1, visit);
            self.map[v] = usize::MAX;
            self.used[w] = false;
            if !keep_going {
                return false;
            }
        }
        true
    }
}

/// Enumerates color-preserving isomorphisms g -> h extending `partial`
/// (pairs (v, w) meaning v maps to w). `visit` returns false to stop early.
pub fn for_each_color_preserving_iso(
    g: &ColoredDigraph,
    h: &ColoredDigraph,
    partial: &[(usize, usize)],
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    if g.n() != h.n() {
        return;
    }
    let mut s = PreservingSearch {
        g,
        h,
        order: search_order(g),
        map: vec![usize::MAX; g.n()],
        used: vec![false; g.n()],
    };
    for &(v, w) in partial {
        if s.map[v] != usize::MAX || s.used[w] || !s.consistent(v, w) {
            return;
        }
        s.map[v] = w;
        s.used[w] = true;
    }
    s.order.retain(|&v| s.map[v] == usize::MAX);
    s.run(0, visit);
}

/// First color-preserving isomorphism extending `partial`, if any.
pub fn find_color_preserving_iso(
    g: &ColoredDigraph,
    h: &ColoredDigraph,
    partial: &[(usize, usize)],
) -> Option<Vec<usize>> {
    let mut found = None;
    for_each_color_preserving_iso(g, h, partial, &mut |m| {
        found = Some(m.to_vec());
        false
    });
    found
}

/// All color-preserving automorphisms of g, capped. Exceeding the cap is an
/// error so callers never silently truncate a group.
pub fn automorphism_group(g: &ColoredDigraph, cap: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut overflow = false;
    for_each_color_preserving_iso(g, g, &[], &mut |m| {
        if out.len() >= cap {
            overflow = true;
            return false;
        }
        out.push(m.to_vec());
        true
    });
    if overflow {
        return Err(Error::SizeGuard { what: "automorphism group cap", actual: cap + 1, limit: cap });
    }
    Ok(out)
}

/// Orbit partition of the vertex set under the color-preserving
/// automorphism group.
pub fn automorphism_orbits(g: &ColoredDigraph, cap: usize) -> Result<Vec<Vec<usize>>> {
    let autos = automorphism_group(g, cap)?;
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for a in &autos {
        for v in 0..n {
            let (rv, rw) = (find(&mut parent, v), find(&mut parent, a[v]));
            if rv != rw {
                parent[rv] = rw;
            }
        }
    }
    let mut orbits: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        let r = find(&mut parent, v);
        orbits.entry(r).or_default().push(v);
    }
    Ok(orbits.into_values().collect())
}

struct PermutingSearch<'a> {
    g: &'a ColoredDigraph,
    h: &'a ColoredDigraph,
    order: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
    cmap: Vec<u32>,
    crev: Vec<u32>,
}

const UNSET: u32 = u32::MAX;

impl<'a> PermutingSearch<'a> {
    fn bind(&mut self, a: u32, b: u32, trail: &mut Vec<u32>) -> bool {
        let (ai, bi) = (a as usize, b as usize);
        if self.cmap[ai] == UNSET && self.crev[bi] == UNSET {
            self.cmap[ai] = b;
            self.crev[bi] = a;
            trail.push(a);
            true
        } else {
            self.cmap[ai] == b && self.crev[bi] == a
        }
    }

    fn undo(&mut self, trail: &[u32]) {
        for &a in trail {
            let b = self.cmap[a as usize];
            self.cmap[a as usize] = UNSET;
            self.crev[b as usize] = UNSET;
        }
    }

    fn run(&mut self, depth: usize, found: &mut Option<(Vec<usize>, Vec<u32>)>) {
        if found.is_some() {
            return;
        }
        if depth == self.order.len() {
            *found = Some((self.map.clone(), self.cmap.clone()));
            return;
        }
        let v = self.order[depth];
        for w in 0..self.h.n() {
            if self.used[w] {
                continue;
            }
            let mut trail = Vec::new();
            let mut ok = self.bind(self.g.color(v, v), self.h.color(w, w), &mut trail);
            if ok {
                for u in 0..self.g.n() {
                    let mu = self.map[u];
                    if mu == usize::MAX || u == v {
                        continue;
                    }
                    if !self.bind(self.g.color(v, u), self.h.color(w, mu), &mut trail)
                        || !self.bind(self.g.color(u, v), self.h.color(mu, w), &mut trail)
                    {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.map[v] = w;
                self.used[w] = true;
                self.run(depth + 1, found);
                self.map[v] = usize::MAX;
                self.used[w] = false;
            }
            self.undo(&trail);
            if found.is_some() {
                return;
            }
        }
    }
}

/// Isomorphism of configurations as partitions: a vertex bijection together
/// with a color bijection. Quick class-size screening first.
pub fn find_color_permuting_iso(
    g: &ColoredDigraph,
    h: &ColoredDigraph,
) -> Option<(Vec<usize>, Vec<u32>)> {
    if g.n() != h.n() || g.color_count() != h.color_count() {
        return None;
    }
    let (mut sg, mut sh) = (g.class_sizes(), h.class_sizes());
    sg.sort_unstable();
    sh.sort_unstable();
    if sg != sh {
        return None;
    }
    let mut s = PermutingSearch {
        g,
        h,
        order: search_order(g),
        map: vec![usize::MAX; g.n()],
        used: vec![false; g.n()],
        cmap: vec![UNSET; g.color_count()],
        crev: vec![UNSET; h.color_count()],
    };
    let mut found = None;
    s.run(0, &mut found);
    found
}

/// Uncolored-digraph encoding of a single relation: loops, arcs, non-arcs.
pub fn relation_digraph(n: usize, arcs: &[(usize, usize)]) -> ColoredDigraph {
    let mut m = vec![2u32; n * n];
    for v in 0..n {
        m[v * n + v] = 0;
    }
    for &(u, v) in arcs {
        assert_ne!(u, v);
        m[u * n + v] = 1;
    }
    ColoredDigraph::from_color_matrix(n, m)
}

/// Plain digraph isomorphism via the standardized relation encoding.
pub fn digraphs_isomorphic(n1: usize, arcs1: &[(usize, usize)], n2: usize, arcs2: &[(usize, usize)]) -> bool {
    if n1 != n2 || arcs1.len() != arcs2.len() {
        return false;
    }
    let g = relation_digraph(n1, arcs1);
    let h = relation_digraph(n2, arcs2);
    find_color_preserving_iso(&g, &h, &[]).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c4_automorphisms() {
        let c4 = ColoredDigraph::simple_graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(automorphism_group(&c4, 1000).unwrap().len(), 8);
    }

    #[test]
    fn k4_automorphisms() {
        let k4 = ColoredDigraph::simple_graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(automorphism_group(&k4, 1000).unwrap().len(), 24);
    }

    #[test]
    fn permuting_iso_ignores_color_names() {
        let mut m1 = vec![5u32; 9];
        let mut m2 = vec![1u32; 9];
        for v in 0..3 {
            m1[v * 3 + v] = 0;
            m2[v * 3 + v] = 7;
        }
        // directed triangles with opposite orientations: isomorphic
        m1[0 * 3 + 1] = 2;
        m1[1 * 3 + 2] = 2;
        m1[2 * 3 + 0] = 2;
        m2[1 * 3 + 0] = 3;
        m2[2 * 3 + 1] = 3;
        m2[0 * 3 + 2] = 3;
        let g = ColoredDigraph::from_color_matrix(3, m1);
        let h = ColoredDigraph::from_color_matrix(3, m2);
        assert!(find_color_permuting_iso(&g, &h).is_some());
    }

    #[test]
    fn digraph_iso_detects_cycles() {
        let c5a: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let c5b: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 2) % 5)).collect();
        let p5: Vec<(usize, usize)> = (0..4).map(|i| (i, i + 1)).collect();
        assert!(digraphs_isomorphic(5, &c5a, 5, &c5b));
        assert!(!digraphs_isomorphic(5, &c5a, 5, &p5));
    }
}
