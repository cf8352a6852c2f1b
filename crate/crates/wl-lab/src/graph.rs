//! Complete arc-colored digraphs: the universal input object.
//!
//! Every ordered pair of vertices, including self-loops, carries exactly one
//! color id. Ordinary graphs are embedded by giving edges, non-edges and
//! loops separate colors, so graphs and coherent configurations live in one
//! type.

use crate::errors::{Error, Result};
use std::collections::HashMap;
use std::fmt::Write as _;

/// Provenance of a color class. Keys let two graphs parsed from the same
/// format share initial colors in a joint refinement run, independent of the
/// numeric ids assigned by canonicalization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ColorKey {
    /// Vertex color `c` on the diagonal.
    Loop(u32),
    /// User-declared arc color `c`.
    Arc(u32),
    /// The reserved undirected-edge color (`edge u v` lines).
    Edge,
    /// The reserved color for unspecified ordered pairs.
    NonArc,
    /// A refinement-produced class, tagged by its canonical index.
    Derived(u64),
}

/// A complete arc-colored directed graph with vertex colors on the diagonal.
///
/// Invariants: every ordered pair has exactly one color id, and no color id
/// appears both on a self-loop and on a non-loop arc (constructors split any
/// such color).
#[derive(Debug, Clone)]
pub struct ColoredDigraph {
    n: usize,
    colors: Vec<u32>,
    keys: Vec<ColorKey>,
    /// per color id: does the class consist of self-loops (computed from the
    /// matrix, independent of the keys)
    loop_class: Vec<bool>,
}


fn loop_flags(n: usize, colors: &[u32], k: usize) -> Vec<bool> {
    let mut flags = vec![false; k];
    for v in 0..n {
        flags[colors[v * n + v] as usize] = true;
    }
    flags
}

impl PartialEq for ColoredDigraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.colors == other.colors
    }
}
impl Eq for ColoredDigraph {}

impl ColoredDigraph {
    /// Builds from an explicit color matrix, splitting any color that mixes
    /// loops and non-loops, then canonicalizing ids.
    pub fn from_color_matrix(n: usize, matrix: Vec<u32>) -> Self {
        assert_eq!(matrix.len(), n * n, "matrix must be n*n");
        let mut remap: HashMap<(u32, bool), u32> = HashMap::new();
        let mut colors = vec![0u32; n * n];
        let mut keys: Vec<ColorKey> = Vec::new();
        for u in 0..n {
            for v in 0..n {
                let raw = matrix[u * n + v];
                let is_loop = u == v;
                let id = *remap.entry((raw, is_loop)).or_insert_with(|| {
                    let id = keys.len() as u32;
                    keys.push(if is_loop {
                        ColorKey::Loop(raw)
                    } else {
                        ColorKey::Arc(raw)
                    });
                    id
                });
                colors[u * n + v] = id;
            }
        }
        let loop_class = loop_flags(n, &colors, keys.len());
        Self { n, colors, keys, loop_class }.canonical_colors()
    }

    /// An uncolored simple graph: one loop color, one edge color, one
    /// non-edge color.
    pub fn simple_graph(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut b = GraphBuilder::new(n);
        for &(u, v) in edges {
            b.edge(u, v).expect("edge endpoints in range");
        }
        b.finish()
    }

    pub(crate) fn from_parts(n: usize, colors: Vec<u32>, keys: Vec<ColorKey>) -> Self {
        let loop_class = loop_flags(n, &colors, keys.len());
        Self { n, colors, keys, loop_class }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn color_count(&self) -> usize {
        self.keys.len()
    }

    #[inline]
    pub fn color(&self, u: usize, v: usize) -> u32 {
        self.colors[u * self.n + v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn key(&self, color: u32) -> &ColorKey {
        &self.keys[color as usize]
    }

    pub fn is_loop_color(&self, color: u32) -> bool {
        self.loop_class[color as usize]
    }

    /// Members of each color class, in row-major arc order.
    pub fn classes(&self) -> Vec<Vec<(usize, usize)>> {
        let mut classes = vec![Vec::new(); self.keys.len()];
        for u in 0..self.n {
            for v in 0..self.n {
                classes[self.color(u, v) as usize].push((u, v));
            }
        }
        classes
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.keys.len()];
        for &c in &self.colors {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Renumbers color ids deterministically: loop classes first, then by
    /// class size ascending, ties broken by the lexicographically smallest
    /// member arc. Idempotent, and invariant under color renaming.
    pub fn canonical_colors(&self) -> Self {
        let k = self.keys.len();
        let mut size = vec![0usize; k];
        let mut min_arc = vec![(usize::MAX, usize::MAX); k];
        let mut is_loop = vec![false; k];
        for u in 0..self.n {
            for v in 0..self.n {
                let c = self.color(u, v) as usize;
                size[c] += 1;
                if (u, v) < min_arc[c] {
                    min_arc[c] = (u, v);
                }
                if u == v {
                    is_loop[c] = true;
                }
            }
        }
        let mut order: Vec<usize> = (0..k).filter(|&c| size[c] > 0).collect();
        order.sort_by_key(|&c| (!is_loop[c], size[c], min_arc[c]));
        let mut remap = vec![u32::MAX; k];
        let mut keys = Vec::with_capacity(order.len());
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new as u32;
            keys.push(self.keys[old].clone());
        }
        let colors: Vec<u32> = self.colors.iter().map(|&c| remap[c as usize]).collect();
        let loop_class = loop_flags(self.n, &colors, keys.len());
        Self { n: self.n, colors, keys, loop_class }
    }

    /// Applies a vertex permutation: vertex `v` moves to position `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut colors = vec![0u32; self.n * self.n];
        for u in 0..self.n {
            for v in 0..self.n {
                colors[perm[u] * self.n + perm[v]] = self.color(u, v);
            }
        }
        Self { n: self.n, colors, keys: self.keys.clone(), loop_class: self.loop_class.clone() }
    }

    /// Induced subgraph on `verts` (order taken from the slice), colors kept.
    pub fn induced(&self, verts: &[usize]) -> Self {
        let m = verts.len();
        let mut colors = vec![0u32; m * m];
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate() {
                colors[i * m + j] = self.color(u, v);
            }
        }
        let loop_class = loop_flags(m, &colors, self.keys.len());
        Self { n: m, colors, keys: self.keys.clone(), loop_class }.canonical_colors()
    }

    /// Disjoint union with initial colors shared by key. Cross pairs get the
    /// reserved non-arc color. Returns the union and the offset of `other`'s
    /// vertices.
    pub fn disjoint_union(&self, other: &Self) -> (Self, usize) {
        let n = self.n + other.n;
        let mut keys: Vec<ColorKey> = Vec::new();
        let mut by_key: HashMap<ColorKey, u32> = HashMap::new();
        let mut intern = |key: &ColorKey, keys: &mut Vec<ColorKey>| -> u32 {
            if let Some(&id) = by_key.get(key) {
                return id;
            }
            let id = keys.len() as u32;
            keys.push(key.clone());
            by_key.insert(key.clone(), id);
            id
        };
        let cross = intern(&ColorKey::NonArc, &mut keys);
        let mut colors = vec![cross; n * n];
        for u in 0..self.n {
            for v in 0..self.n {
                let key = self.keys[self.color(u, v) as usize].clone();
                colors[u * n + v] = intern(&key, &mut keys);
            }
        }
        for u in 0..other.n {
            for v in 0..other.n {
                let key = other.keys[other.color(u, v) as usize].clone();
                colors[(self.n + u) * n + (self.n + v)] = intern(&key, &mut keys);
            }
        }
        let loop_class = loop_flags(n, &colors, keys.len());
        (Self { n, colors, keys, loop_class }, self.n)
    }

    /// Canonical text serialization: every vertex color and every ordered
    /// pair, in ascending order. Byte-identical across runs.
    pub fn serialize(&self) -> String {
        self.serialize_with_comments(&[])
    }

    pub fn serialize_with_comments(&self, comments: &[String]) -> String {
        let g = self.canonical_colors();
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "n {}", g.n);
        for v in 0..g.n {
            let _ = writeln!(out, "vcolor {} {}", v, g.color(v, v));
        }
        for u in 0..g.n {
            for v in 0..g.n {
                if u != v {
                    let _ = writeln!(out, "arc {} {} {}", u, v, g.color(u, v));
                }
            }
        }
        out
    }

    /// Relabeling-invariant summary of the color partition.
    pub fn signature(&self) -> PartitionSignature {
        let g = self.canonical_colors();
        let sizes = g.class_sizes();
        let multiset = sizes
            .iter()
            .enumerate()
            .map(|(id, &s)| (id as u32, s))
            .collect();
        PartitionSignature { multiset, joint: false }
    }
}

/// Multiset of (canonical color id, class size); invariant under vertex
/// relabeling of the underlying graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSignature {
    pub multiset: Vec<(u32, usize)>,
    /// Whether this signature came from a joint refinement of two graphs.
    pub joint: bool,
}

/// Incremental construction used by the parser and the instance factories.
pub struct GraphBuilder {
    n: usize,
    vcolor: Vec<u32>,
    /// (u,v) -> key for declared arcs
    arcs: HashMap<(usize, usize), ColorKey>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, vcolor: vec![0; n], arcs: HashMap::new() }
    }

    fn check(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::Range { vertex: v, n: self.n });
        }
        Ok(())
    }

    pub fn vertex_color(&mut self, v: usize, c: u32) -> Result<()> {
        self.check(v)?;
        self.vcolor[v] = c;
        Ok(())
    }

    fn declare(&mut self, u: usize, v: usize, key: ColorKey) -> Result<()> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(Error::Argument(format!("self-loop arc ({u},{u}) not allowed; use vcolor")));
        }
        if let Some(old) = self.arcs.get(&(u, v)) {
            if *old != key {
                return Err(Error::Conflict {
                    u,
                    v,
                    old: format!("{old:?}"),
                    new: format!("{key:?}"),
                });
            }
            return Ok(());
        }
        self.arcs.insert((u, v), key);
        Ok(())
    }

    pub fn arc(&mut self, u: usize, v: usize, c: u32) -> Result<()> {
        self.declare(u, v, ColorKey::Arc(c))
    }

    /// Undirected sugar: both directions get the reserved edge color.
    pub fn edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.declare(u, v, ColorKey::Edge)?;
        self.declare(v, u, ColorKey::Edge)
    }

    pub fn finish(self) -> ColoredDigraph {
        let n = self.n;
        let mut keys: Vec<ColorKey> = Vec::new();
        let mut by_key: HashMap<ColorKey, u32> = HashMap::new();
        let mut colors = vec![0u32; n * n];
        {
            let mut intern = |key: ColorKey| -> u32 {
                *by_key.entry(key.clone()).or_insert_with(|| {
                    let id = keys.len() as u32;
                    keys.push(key);
                    id
                })
            };
            for u in 0..n {
                for v in 0..n {
                    let key = if u == v {
                        ColorKey::Loop(self.vcolor[u])
                    } else if let Some(k) = self.arcs.get(&(u, v)) {
                        k.clone()
                    } else {
                        ColorKey::NonArc
                    };
                    colors[u * n + v] = intern(key);
                }
            }
        }
        ColoredDigraph::from_parts(n, colors, keys).canonical_colors()
    }
}

/// Parses the line-based text format: `n <int>` first, then `vcolor <v> <c>`,
/// `arc <u> <v> <c>`, `edge <u> <v>`; `#` starts a comment.
pub fn parse_graph(text: &str) -> Result<ColoredDigraph> {
    let mut builder: Option<GraphBuilder> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let parse_int = |s: &str| -> Result<usize> {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("expected integer, got {s:?}"),
            })
        };
        let with_line = |e: Error| -> Error {
            match e {
                Error::Range { vertex, n } => Error::Parse {
                    line: line_no,
                    msg: format!("vertex index {vertex} out of range (n = {n})"),
                },
                other => other,
            }
        };
        match tokens[0] {
            "n" => {
                if builder.is_some() {
                    return Err(Error::Parse { line: line_no, msg: "duplicate n line".into() });
                }
                if tokens.len() != 2 {
                    return Err(Error::Parse { line: line_no, msg: "usage: n <int>".into() });
                }
                builder = Some(GraphBuilder::new(parse_int(tokens[1])?));
            }
            "vcolor" | "arc" | "edge" => {
                let b = builder.as_mut().ok_or_else(|| Error::Parse {
                    line: line_no,
                    msg: "n <int> must come first".into(),
                })?;
                match tokens[0] {
                    "vcolor" => {
                        if tokens.len() != 3 {
                            return Err(Error::Parse { line: line_no, msg: "usage: vcolor <v> <c>".into() });
                        }
                        b.vertex_color(parse_int(tokens[1])?, parse_int(tokens[2])? as u32)
                            .map_err(with_line)?;
                    }
                    "arc" => {
                        if tokens.len() != 4 {
                            return Err(Error::Parse { line: line_no, msg: "usage: arc <u> <v> <c>".into() });
                        }
                        b.arc(parse_int(tokens[1])?, parse_int(tokens[2])?, parse_int(tokens[3])? as u32)
                            .map_err(with_line)?;
                    }
                    _ => {
                        if tokens.len() != 3 {
                            return Err(Error::Parse { line: line_no, msg: "usage: edge <u> <v>".into() });
                        }
                        b.edge(parse_int(tokens[1])?, parse_int(tokens[2])?).map_err(with_line)?;
                    }
                }
            }
            other => {
                return Err(Error::Parse { line: line_no, msg: format!("unknown directive {other:?}") });
            }
        }
    }
    builder
        .map(GraphBuilder::finish)
        .ok_or_else(|| Error::Parse { line: 0, msg: "empty input: missing n line".into() })
}

/// Per-axiom report for CC1 and CC2 on a stored partition.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub cc1_violations: Vec<u32>,
    pub cc2_violations: Vec<u32>,
    /// color -> transpose color, valid where CC2 holds
    pub transpose: Vec<Option<u32>>,
}

impl AxiomReport {
    pub fn cc1_ok(&self) -> bool {
        self.cc1_violations.is_empty()
    }
    pub fn cc2_ok(&self) -> bool {
        self.cc2_violations.is_empty()
    }
}

/// Checks CC1 (loops and arcs separated) and CC2 (closure under transpose)
/// on a raw color matrix. Report-style: never fails.
pub fn validate_matrix(n: usize, matrix: &[u32]) -> AxiomReport {
    assert_eq!(matrix.len(), n * n);
    let k = matrix.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut has_loop = vec![false; k];
    let mut has_arc = vec![false; k];
    for u in 0..n {
        for v in 0..n {
            let c = matrix[u * n + v] as usize;
            if u == v {
                has_loop[c] = true;
            } else {
                has_arc[c] = true;
            }
        }
    }
    let cc1_violations: Vec<u32> = (0..k as u32)
        .filter(|&c| has_loop[c as usize] && has_arc[c as usize])
        .collect();

    let mut transpose: Vec<Option<u32>> = vec![None; k];
    let mut cc2_violations = Vec::new();
    let mut seen = vec![false; k];
    for u in 0..n {
        for v in 0..n {
            let c = matrix[u * n + v] as usize;
            let t = matrix[v * n + u];
            if !seen[c] {
                seen[c] = true;
                transpose[c] = Some(t);
            } else if transpose[c] != Some(t) {
                transpose[c] = None;
                if !cc2_violations.contains(&(c as u32)) {
                    cc2_violations.push(c as u32);
                }
            }
        }
    }
    cc2_violations.sort_unstable();
    AxiomReport { cc1_violations, cc2_violations, transpose }
}

/// CC1/CC2 report for a normalized graph (CC1 holds by construction there,
/// so this mostly reports on CC2).
pub fn validate_partition(g: &ColoredDigraph) -> AxiomReport {
    validate_matrix(g.n(), g.colors())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_p3_has_three_colors() {
        let g = parse_graph("n 3\nedge 0 1\nedge 1 2\n").unwrap();
        // loop, edge, non-edge
        assert_eq!(g.color_count(), 3);
        assert_eq!(g.n(), 3);
        assert_eq!(g.color(0, 1), g.color(1, 0));
        assert_eq!(g.color(0, 1), g.color(1, 2));
        assert_ne!(g.color(0, 1), g.color(0, 2));
    }

    #[test]
    fn parse_single_vertex() {
        let g = parse_graph("n 1").unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.color_count(), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_graph("edge 0 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_graph("n 2\nedge 0 5"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_graph("n 3\narc 0 1 1\narc 0 1 2"),
            Err(Error::Conflict { .. })
        ));
        assert!(matches!(parse_graph("n 2\nfrob 0 1"), Err(Error::Parse { .. })));
        // duplicate with the same color is fine
        assert!(parse_graph("n 3\narc 0 1 1\narc 0 1 1").is_ok());
    }

    #[test]
    fn canonical_is_renaming_invariant() {
        // two colorings of C4 differing only in color ids
        let c4 = &[(0usize, 1usize), (1, 2), (2, 3), (3, 0)];
        let mut m1 = vec![7u32; 16];
        let mut m2 = vec![3u32; 16];
        for v in 0..4 {
            m1[v * 4 + v] = 9;
            m2[v * 4 + v] = 0;
        }
        for &(u, v) in c4 {
            m1[u * 4 + v] = 2;
            m1[v * 4 + u] = 2;
            m2[u * 4 + v] = 8;
            m2[v * 4 + u] = 8;
        }
        let g1 = ColoredDigraph::from_color_matrix(4, m1);
        let g2 = ColoredDigraph::from_color_matrix(4, m2);
        assert_eq!(g1, g2);
    }

    #[test]
    fn canonical_monochromatic_k3() {
        let g = ColoredDigraph::simple_graph(3, &[(0, 1), (1, 2), (0, 2)]);
        // loop color 0, edge color 1 (no non-edges)
        assert_eq!(g.color(0, 0), 0);
        assert_eq!(g.color(0, 1), 1);
        assert_eq!(g.color_count(), 2);
    }

    #[test]
    fn serialize_round_trip() {
        let g = ColoredDigraph::simple_graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let text = g.serialize();
        let h = parse_graph(&text).unwrap();
        assert_eq!(g, h);
        assert_eq!(text, h.serialize());
    }

    #[test]
    fn cc1_violation_detected() {
        // color 3 mixes a loop and an arc
        let mut m = vec![0u32; 9];
        m[0] = 3; // loop (0,0)
        m[4] = 1;
        m[8] = 1;
        m[1] = 3; // arc (0,1)
        let rep = validate_matrix(3, &m);
        assert!(!rep.cc1_ok());
        assert_eq!(rep.cc1_violations, vec![3]);
    }

    #[test]
    fn cc2_violation_detected() {
        // color A's transpose straddles two colors
        let mut m = vec![9u32; 9];
        for v in 0..3 {
            m[v * 3 + v] = 0;
        }
        m[1] = 1; // (0,1) -> A
        m[3] = 2; // (1,0) -> B
        m[2] = 1; // (0,2) -> A
        m[6] = 1; // (2,0) -> A, so A* meets A and B
        let rep = validate_matrix(3, &m);
        assert!(!rep.cc2_ok());
        assert!(rep.cc2_violations.contains(&1));
    }

    #[test]
    fn signature_relabeling_invariant() {
        let g = ColoredDigraph::simple_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let perm = [3usize, 0, 4, 1, 2];
        assert_eq!(g.signature(), g.relabel(&perm).signature());
    }
}
