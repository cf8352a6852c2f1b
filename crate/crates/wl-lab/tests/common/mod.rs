// Shared instance builders for the integration suites.

use wl_lab::graph::GraphBuilder;
use wl_lab::refine::{coherent_closure, CoherentConfiguration};
use wl_lab::ColoredDigraph;

pub fn cycle(n: usize) -> ColoredDigraph {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    ColoredDigraph::simple_graph(n, &edges)
}

pub fn complete(n: usize) -> ColoredDigraph {
    let mut edges = vec![];
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    ColoredDigraph::simple_graph(n, &edges)
}

pub fn k4_edges() -> Vec<(usize, usize)> {
    vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
}

/// One large fiber attached to two small fibers: S1 is four vertices with
/// three matchings, S2 the octahedron pairing; each L-vertex points at an
/// S1-edge and an S2-pair, chosen by `pick`.
pub fn two_small_instance(
    multiplicity: usize,
    pick: impl Fn(usize) -> (usize, usize),
) -> CoherentConfiguration {
    let l = 6 * multiplicity;
    let n = 10 + l;
    let mut b = GraphBuilder::new(n);
    for v in 4..10 {
        b.vertex_color(v, 1).unwrap();
    }
    for v in 10..n {
        b.vertex_color(v, 2).unwrap();
    }
    for (c, pairs) in [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]].iter().enumerate() {
        for &(u, v) in pairs {
            b.arc(u, v, 10 + c as u32).unwrap();
            b.arc(v, u, 10 + c as u32).unwrap();
        }
    }
    for i in 0..3 {
        b.arc(4 + i, 7 + i, 20).unwrap();
        b.arc(7 + i, 4 + i, 20).unwrap();
    }
    let s1_edges = [[0usize, 1], [2, 3]];
    let s2_pairs = [[4usize, 7], [5, 8], [6, 9]];
    for i in 0..l {
        let ell = 10 + i;
        let (e1, e2) = pick(i);
        for v in s1_edges[e1] {
            b.arc(ell, v, 30).unwrap();
        }
        for v in s2_pairs[e2] {
            b.arc(ell, v, 31).unwrap();
        }
    }
    coherent_closure(&b.finish()).unwrap()
}

/// A chain of size-4 fibers linked by misaligned 2K{2,2} interspaces, so
/// the quotient graph is a path.
pub fn block_chain(fibers: usize) -> CoherentConfiguration {
    let n = 4 * fibers;
    let mut b = GraphBuilder::new(n);
    for v in 0..n {
        b.vertex_color(v, (v / 4) as u32).unwrap();
    }
    // alternate the block pairing so end-to-end compositions wash out
    let blocks = [[[0usize, 1], [2, 3]], [[0usize, 2], [1, 3]]];
    for f in 0..fibers - 1 {
        let pat = &blocks[f % 2];
        for side in 0..2 {
            for &u in &pat[side] {
                for &v in &pat[side] {
                    b.arc(4 * f + u, 4 * (f + 1) + v, 60).unwrap();
                }
            }
        }
    }
    coherent_closure(&b.finish()).unwrap()
}

/// A center fiber of size 8 with `leaves` large neighbors, linked by
/// alternating 16-cycles.
pub fn star_of_large(leaves: usize) -> CoherentConfiguration {
    let n = 8 * (leaves + 1);
    let mut b = GraphBuilder::new(n);
    for v in 0..n {
        b.vertex_color(v, (v / 8) as u32).unwrap();
    }
    for leaf in 1..=leaves {
        for i in 0..8usize {
            b.arc(i, leaf * 8 + i, 50 + leaf as u32).unwrap();
            b.arc(i, leaf * 8 + (i + 1) % 8, 50 + leaf as u32).unwrap();
        }
    }
    coherent_closure(&b.finish()).unwrap()
}

/// CFI over a vertex-colored base: each gadget keeps its own vertex color,
/// so the closure's fibers are the gadgets.
pub fn colored_cfi(
    base_n: usize,
    base_edges: &[(usize, usize)],
    twist: &[(usize, usize)],
) -> CoherentConfiguration {
    let inst = wl_lab::bounds::cfi(base_n, base_edges, twist).unwrap();
    let g = &inst.graph;
    let per = g.n() / base_n;
    let mut b = GraphBuilder::new(g.n());
    for v in 0..g.n() {
        b.vertex_color(v, (v / per) as u32).unwrap();
    }
    for u in 0..g.n() {
        for w in (u + 1)..g.n() {
            if matches!(g.key(g.color(u, w)), wl_lab::graph::ColorKey::Edge) {
                b.edge(u, w).unwrap();
            }
        }
    }
    coherent_closure(&b.finish()).unwrap()
}

/// A small fiber with two neighbors of conflicting patterns: L1 attaches to
/// the C4 edges, L2 to the diagonals. The mixed structure blocks
/// restorability of S.
pub fn mixed_pattern_instance() -> CoherentConfiguration {
    let mut b = GraphBuilder::new(16);
    for v in 4..12 {
        b.vertex_color(v, 1).unwrap();
    }
    for v in 12..16 {
        b.vertex_color(v, 2).unwrap();
    }
    let c4_edges = [[0usize, 1], [1, 2], [2, 3], [3, 0]];
    let diags = [[0usize, 2], [1, 3]];
    for i in 0..4usize {
        b.arc(i, (i + 1) % 4, 70).unwrap();
        b.arc((i + 1) % 4, i, 70).unwrap();
    }
    for i in 0..8 {
        for &v in &c4_edges[i % 4] {
            b.arc(4 + i, v, 71).unwrap();
        }
    }
    for i in 0..4 {
        for &v in &diags[i % 2] {
            b.arc(12 + i, v, 72).unwrap();
        }
    }
    coherent_closure(&b.finish()).unwrap()
}

/// Two size-5 fibers joined by a direction-alternating 10-cycle.
pub fn c10_pair() -> CoherentConfiguration {
    let mut b = GraphBuilder::new(10);
    for v in 5..10 {
        b.vertex_color(v, 1).unwrap();
    }
    for i in 0..5usize {
        b.arc(i, 5 + i, 40).unwrap();
        b.arc(i, 5 + (i + 1) % 5, 40).unwrap();
    }
    coherent_closure(&b.finish()).unwrap()
}

/// Star 4K_{1,2}: four centers, eight leaves with unique centers.
pub fn star_4k12() -> CoherentConfiguration {
    let mut b = GraphBuilder::new(12);
    for i in 0..8usize {
        b.arc(4 + i, i / 2, 1).unwrap();
        b.vertex_color(4 + i, 1).unwrap();
    }
    coherent_closure(&b.finish()).unwrap()
}

/// A small fiber shared between a triangle-attached large fiber and a
/// pair-attached one; the quotient path (L1, S, L2) is induced.
pub fn double_attachment() -> CoherentConfiguration {
    let oct_pairs = [[0usize, 3], [1, 4], [2, 5]];
    let tri: Vec<Vec<usize>> = (0..8)
        .map(|mask: usize| (0..3).map(|i| if mask >> i & 1 == 1 { i + 3 } else { i }).collect())
        .collect();
    let n = 6 + 16 + 6;
    let mut b = GraphBuilder::new(n);
    for v in 6..22 {
        b.vertex_color(v, 1).unwrap();
    }
    for v in 22..28 {
        b.vertex_color(v, 2).unwrap();
    }
    for &[u, v] in &oct_pairs {
        b.arc(u, v, 5).unwrap();
        b.arc(v, u, 5).unwrap();
    }
    for i in 0..16 {
        for &v in &tri[i % 8] {
            b.arc(6 + i, v, 6).unwrap();
        }
    }
    for i in 0..6 {
        for &v in &oct_pairs[i % 3] {
            b.arc(22 + i, v, 7).unwrap();
        }
    }
    coherent_closure(&b.finish()).unwrap()
}

/// A center 4-fiber with three leaf 4-fibers, each linked by a different
/// 2K{2,2} block pairing; leaf-to-leaf compositions wash out, so the
/// quotient is a star.
pub fn block_star() -> CoherentConfiguration {
    let n = 16;
    let mut b = GraphBuilder::new(n);
    for v in 0..n {
        b.vertex_color(v, (v / 4) as u32).unwrap();
    }
    let pairings = [[[0usize, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]];
    for leaf in 1..4usize {
        let pat = &pairings[leaf - 1];
        for side in 0..2 {
            for &u in &pat[side] {
                for &v in &pat[side] {
                    b.arc(u, 4 * leaf + v, 60 + leaf as u32).unwrap();
                }
            }
        }
    }
    coherent_closure(&b.finish()).unwrap()
}
