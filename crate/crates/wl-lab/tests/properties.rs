//! Invariant properties over randomized inputs.

mod common;

use common::cycle;
use proptest::prelude::*;
use rand::Rng;
use wl_lab::graph::parse_graph;
use wl_lab::refine::{coherent_closure, distinguishes, verify_coherence};
use wl_lab::{algebra, critical, testgen, ColoredDigraph};

fn arb_graph() -> impl Strategy<Value = ColoredDigraph> {
    (1usize..9, any::<u64>(), 1u32..4, 1u32..3).prop_map(|(n, seed, arc_colors, vcolors)| {
        let mut rng = testgen::rng(seed);
        testgen::random_colored_digraph(n, arc_colors, vcolors, &mut rng)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_idempotent(g in arb_graph()) {
        let c = g.canonical_colors();
        prop_assert_eq!(c.clone(), c.canonical_colors());
    }

    #[test]
    fn signature_invariant_under_relabeling((g, seed) in (arb_graph(), any::<u64>())) {
        let mut rng = testgen::rng(seed);
        let perm = testgen::random_permutation(g.n(), &mut rng);
        prop_assert_eq!(g.signature(), g.relabel(&perm).signature());
    }

    #[test]
    fn serialize_parse_round_trip(g in arb_graph()) {
        let text = g.serialize();
        let h = parse_graph(&text).unwrap();
        prop_assert_eq!(g.canonical_colors(), h);
    }

    #[test]
    fn closure_canonical_is_fixed_point(g in arb_graph()) {
        let c = coherent_closure(&g).unwrap();
        prop_assert_eq!(c.base().clone(), c.base().canonical_colors());
        let again = coherent_closure(c.base()).unwrap();
        prop_assert_eq!(c.base().clone(), again.base().clone());
    }
}

#[test]
fn closure_outputs_verify_and_satisfy_handshake() {
    let mut rng = testgen::rng(11);
    for round in 0..120 {
        let n = rng.gen_range(2..=12);
        let g = if round % 3 == 0 {
            testgen::random_structured(n.max(4), &mut rng)
        } else {
            testgen::random_colored_digraph(n, rng.gen_range(1..4), 1, &mut rng)
        };
        let c = coherent_closure(&g).unwrap();
        let rep = verify_coherence(c.base());
        assert!(rep.ok(), "round {round}: closure output fails coherence");
        // handshake |R| d(A) = |B| d(A*)
        for (a, m) in c.relations() {
            let t = c.relation(m.transpose);
            assert_eq!(
                c.fibers()[m.src_fiber].len() * m.degree,
                c.fibers()[m.dst_fiber].len() * t.degree,
                "round {round}: handshake fails on relation {a}"
            );
        }
    }
}

#[test]
fn distinguishes_is_isomorphism_invariant() {
    let mut rng = testgen::rng(23);
    for _ in 0..60 {
        let n = rng.gen_range(2..=9);
        let g = testgen::random_simple_graph(n, 0.4, &mut rng);
        let perm = testgen::random_permutation(n, &mut rng);
        let h = g.relabel(&perm);
        for k in 1..=2 {
            assert!(!distinguishes(&g, &h, k).unwrap());
        }
    }
}

#[test]
fn refinement_is_monotone_in_k() {
    let mut rng = testgen::rng(37);
    for _ in 0..40 {
        let n = rng.gen_range(3..=7);
        let g = testgen::random_simple_graph(n, 0.5, &mut rng);
        let h = testgen::random_simple_graph(n, 0.5, &mut rng);
        let d1 = distinguishes(&g, &h, 1).unwrap();
        let d2 = distinguishes(&g, &h, 2).unwrap();
        let d3 = distinguishes(&g, &h, 3).unwrap();
        assert!(!d1 || d2, "1-WL separated a pair 2-WL misses");
        assert!(!d2 || d3, "2-WL separated a pair 3-WL misses");
    }
}

#[test]
fn direct_sums_verify() {
    let mut rng = testgen::rng(41);
    for _ in 0..50 {
        let n1 = rng.gen_range(2..=6);
        let n2 = rng.gen_range(2..=6);
        let c1 = coherent_closure(&testgen::random_structured(n1.max(3), &mut rng)).unwrap();
        let c2 = coherent_closure(&testgen::random_structured(n2.max(3), &mut rng)).unwrap();
        let s = algebra::direct_sum(&c1, &c2).unwrap();
        assert!(verify_coherence(s.base()).ok());
        assert_eq!(s.rank(), c1.rank() + c2.rank() + 2 * c1.fiber_count() * c2.fiber_count());
    }
}

#[test]
fn reduction_traces_replay() {
    let mut rng = testgen::rng(53);
    for _ in 0..25 {
        let g = testgen::random_structured(rng.gen_range(6..=14), &mut rng);
        let c = coherent_closure(&g).unwrap();
        let (core, trace) = critical::reduce_to_core(&c).unwrap();
        assert!(critical::replay_trace(&c, &trace, &core).unwrap());
        // fixpoint really is tiny- and star-free
        if core.n() > 0 {
            assert!(critical::detect_tiny(&core).is_empty());
            assert!(critical::detect_star(&core).is_empty());
        }
    }
}

#[test]
fn stable_coloring_serialization_round_trips() {
    let s = wl_lab::wl_refine(&cycle(6), 2).unwrap();
    let text = s.serialize();
    assert!(text.starts_with("# rounds"));
    let g = parse_graph(&text).unwrap();
    assert_eq!(&g, s.arc_restriction());
}

#[test]
fn small_fiber_automorphisms_induce_structure_automorphisms() {
    use wl_lab::census::{pattern_instance, PatternName, SmallVariant};
    for p in [
        PatternName::FourClique,
        PatternName::FourMatching,
        PatternName::SixMatching,
        PatternName::SixMatchingComplement,
        PatternName::SixMatchingComplementDouble,
    ] {
        let inst = pattern_instance(p, 2, SmallVariant::Default).unwrap();
        let c = &inst.config;
        let (st, parts) =
            wl_lab::patterns::partition_structure(c, inst.fiber_l, &[inst.fiber_s]).unwrap();
        let st_auts = wl_lab::iso::automorphism_group(st.base(), 100_000).unwrap();
        let st_set: std::collections::HashSet<Vec<usize>> = st_auts.into_iter().collect();
        let s_verts = c.fibers()[inst.fiber_s].clone();
        let g_s = c.base().induced(&s_verts);
        let local: std::collections::HashMap<usize, usize> =
            s_verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let rel = wl_lab::patterns::classify_pattern(c, inst.fiber_l, inst.fiber_s)
            .unwrap()
            .groups[0]
            .entries[0]
            .relation;
        let nbhd: Vec<Vec<usize>> = parts
            .iter()
            .map(|part| {
                let mut nb: Vec<usize> =
                    c.neighborhood(part[0], rel).iter().map(|v| local[v]).collect();
                nb.sort_unstable();
                nb
            })
            .collect();
        for a in wl_lab::iso::automorphism_group(&g_s, 100_000).unwrap() {
            let perm: Option<Vec<usize>> = nbhd
                .iter()
                .map(|nb| {
                    let mut img: Vec<usize> = nb.iter().map(|&v| a[v]).collect();
                    img.sort_unstable();
                    nbhd.iter().position(|x| *x == img)
                })
                .collect();
            // automorphisms that move a realized neighborhood off the
            // realized set (possible for the one-per-pair marks) induce
            // nothing; all others must induce structure automorphisms
            let Some(perm) = perm else { continue };
            assert!(st_set.contains(&perm), "{p:?}: induced map is not a structure automorphism");
        }
    }
}

#[test]
fn removals_preserve_exact_dimension_at_desk_scale() {
    use wl_lab::critical::{exact_wldim, graph_universe_masks, mask_to_graph, reduce_to_core};
    // for graphs whose reduced core again matches a small simple graph, the
    // removal steps must not change the exact dimension (pre-state >= 2)
    for n in 4..=6usize {
        for &m in graph_universe_masks(n) {
            let g = mask_to_graph(n, m);
            let dim = exact_wldim(&g).unwrap();
            if dim < 2 {
                continue;
            }
            let c = coherent_closure(&g).unwrap();
            let (core, trace) = reduce_to_core(&c).unwrap();
            if trace.steps.is_empty() || core.n() == 0 || core.n() > 7 {
                continue;
            }
            let nn = core.n();
            let matched = graph_universe_masks(nn).iter().find_map(|&mm| {
                let h = mask_to_graph(nn, mm);
                let closed = coherent_closure(&h).unwrap();
                wl_lab::iso::find_color_permuting_iso(closed.base(), core.base())
                    .map(|_| h)
            });
            if let Some(h) = matched {
                // the oracle universe shrinks with the graph, so the
                // reduced core can only get easier to identify, never harder
                assert!(
                    exact_wldim(&h).unwrap() <= dim,
                    "n={n} mask={m}: removal increased the exact dimension"
                );
            }
        }
    }
}

#[test]
fn taken_care_of_transfers_restorability() {
    use wl_lab::graph::GraphBuilder;
    // S with two identical matching-pattern neighbors: each takes care of
    // the other, S is restorable with one of them removed, and restorability
    // transfers to the full configuration
    let mut b = GraphBuilder::new(12);
    for v in 4..8 {
        b.vertex_color(v, 1).unwrap();
    }
    for v in 8..12 {
        b.vertex_color(v, 2).unwrap();
    }
    for (c0, pairs) in [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]].iter().enumerate() {
        for &(u, v) in pairs {
            b.arc(u, v, 10 + c0 as u32).unwrap();
            b.arc(v, u, 10 + c0 as u32).unwrap();
        }
    }
    let e1 = [[0usize, 1], [2, 3]];
    for i in 0..4usize {
        for &v in &e1[i % 2] {
            b.arc(4 + i, v, 30).unwrap();
            b.arc(8 + i, v, 31).unwrap();
        }
    }
    let c = coherent_closure(&b.finish()).unwrap();
    let s = c.fiber_of(0);
    let (y1, y2) = (c.fiber_of(4), c.fiber_of(8));
    assert!(critical::is_taken_care_of(&c, s, y1).unwrap());
    assert!(critical::is_taken_care_of(&c, s, y2).unwrap());
    // restorable in c - Y1
    let keep: Vec<usize> = (0..c.n()).filter(|&v| c.fiber_of(v) != y1).collect();
    let minus = c.restrict(&keep).unwrap();
    let s_in_minus = minus.fiber_of(0);
    assert!(critical::is_restorable(&minus, &[s_in_minus]).unwrap().0);
    // hence restorable in c
    assert!(critical::is_restorable(&c, &[s]).unwrap().0);
}
