//! Seeded instance generators for the property suites and the CLI's
//! randomized checks.

use crate::graph::{ColorKey, ColoredDigraph};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random complete arc-colored digraph with up to `arc_colors` non-loop
/// colors and up to `vertex_colors` vertex colors.
pub fn random_colored_digraph(
    n: usize,
    arc_colors: u32,
    vertex_colors: u32,
    rng: &mut impl Rng,
) -> ColoredDigraph {
    let mut m = vec![0u32; n * n];
    for u in 0..n {
        for v in 0..n {
            m[u * n + v] = if u == v {
                rng.gen_range(0..vertex_colors.max(1))
            } else {
                vertex_colors + rng.gen_range(0..arc_colors.max(1))
            };
        }
    }
    ColoredDigraph::from_color_matrix(n, m)
}

/// A random simple graph with edge probability p.
pub fn random_simple_graph(n: usize, p: f64, rng: &mut impl Rng) -> ColoredDigraph {
    let mut edges = vec![];
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    ColoredDigraph::simple_graph(n, &edges)
}

/// Random circulant digraph: vertex-transitive, so closures keep large
/// fibers. Each nonzero difference class joins one of `classes` colors.
pub fn random_circulant(n: usize, classes: u32, rng: &mut impl Rng) -> ColoredDigraph {
    let mut m = vec![0u32; n * n];
    let mut diff_color = vec![0u32; n];
    for d in 1..n {
        if diff_color[d] == 0 && d != 0 {
            let c = 1 + rng.gen_range(0..classes.max(1));
            diff_color[d] = c;
            // keep it loosely symmetric half the time
            if rng.gen_bool(0.5) {
                diff_color[n - d] = c;
            } else if diff_color[n - d] == 0 {
                diff_color[n - d] = 1 + rng.gen_range(0..classes.max(1));
            }
        }
    }
    for u in 0..n {
        for v in 0..n {
            m[u * n + v] = if u == v { 0 } else { 1 + diff_color[(v + n - u) % n] };
        }
    }
    ColoredDigraph::from_color_matrix(n, m)
}

/// Blow-up: replaces every vertex of `g` by `m` twins (cells complete inside,
/// cross arcs copy the base color).
pub fn blowup(g: &ColoredDigraph, m: usize) -> ColoredDigraph {
    let n = g.n();
    let nn = n * m;
    let k = g.color_count() as u32;
    let mut colors = vec![0u32; nn * nn];
    for u in 0..nn {
        for v in 0..nn {
            let (bu, bv) = (u / m, v / m);
            colors[u * nn + v] = if u == v {
                g.color(bu, bu)
            } else if bu == bv {
                k // twin class
            } else {
                g.color(bu, bv)
            };
        }
    }
    let mut keys: Vec<ColorKey> = (0..k as u64).map(ColorKey::Derived).collect();
    keys.push(ColorKey::Derived(k as u64));
    ColoredDigraph::from_parts(nn, colors, keys).canonical_colors()
}

/// A structured random instance whose closure has interesting fibers:
/// circulants, blow-ups of circulants, and unions of those linked by random
/// biregular relations.
pub fn random_structured(n_target: usize, rng: &mut impl Rng) -> ColoredDigraph {
    match rng.gen_range(0..3) {
        0 => random_circulant(n_target.max(3), 2, rng),
        1 => {
            let base = random_circulant((n_target / 2).max(3), 2, rng);
            blowup(&base, 2)
        }
        _ => {
            // two circulant halves, cross arcs colored by (difference mod s)
            let h = (n_target / 2).max(3);
            let a = random_circulant(h, 2, rng);
            let b = random_circulant(h, 2, rng);
            let n = 2 * h;
            let (ka, kb) = (a.color_count() as u32, b.color_count() as u32);
            let s = rng.gen_range(2..=3).min(h);
            let mut colors = vec![0u32; n * n];
            for u in 0..h {
                for v in 0..h {
                    colors[u * n + v] = a.color(u, v);
                    colors[(h + u) * n + (h + v)] = ka + b.color(u, v);
                }
            }
            for u in 0..h {
                for v in 0..h {
                    let c = ka + kb + ((v + h - u) % h % s) as u32;
                    colors[u * n + (h + v)] = c;
                    colors[(h + v) * n + u] = c + s as u32;
                }
            }
            let keys: Vec<ColorKey> = (0..(ka + kb) as u64 + 2 * s as u64)
                .map(ColorKey::Derived)
                .collect();
            ColoredDigraph::from_parts(n, colors, keys).canonical_colors()
        }
    }
}

/// A uniformly random permutation of 0..n.
pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// The n x n rook graph as a simple graph.
pub fn rook_graph(n: usize) -> ColoredDigraph {
    let mut edges = vec![];
    for a in 0..n * n {
        for b in (a + 1)..n * n {
            if a / n == b / n || a % n == b % n {
                edges.push((a, b));
            }
        }
    }
    ColoredDigraph::simple_graph(n * n, &edges)
}

/// The Shrikhande graph: Cayley graph on Z4 x Z4 with connection set
/// {±(1,0), ±(0,1), ±(1,1)}.
pub fn shrikhande_graph() -> ColoredDigraph {
    let mut edges = vec![];
    let idx = |a: usize, b: usize| (a % 4) * 4 + (b % 4);
    for a in 0..4usize {
        for b in 0..4usize {
            let v = idx(a, b);
            for (da, db) in [(1, 0), (0, 1), (1, 1)] {
                let w = idx(a + da, b + db);
                let (x, y) = (v.min(w), v.max(w));
                if !edges.contains(&(x, y)) {
                    edges.push((x, y));
                }
            }
        }
    }
    ColoredDigraph::simple_graph(16, &edges)
}
