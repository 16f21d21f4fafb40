mod common;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use planar_gap::graph::io::{deserialize, serialize, to_dot, Format, GraphDocument};
use planar_gap::graph::random::{random_connected_graph, random_planar_graph};
use planar_gap::graph::{
    build_binary_tree, build_hat_tree, build_weighted_chain, check_planarity, complete_bipartite,
    complete_graph, cycle_graph, degree_stats, path_graph, quotient_by_levels, subdivide_edges,
    EdgeKind, KuratowskiKind, Planarity, WeightedGraph,
};
use planar_gap::Error;
use proptest::prelude::*;

fn vertex_formula(h: u32, k: u32) -> usize {
    1 + k as usize * ((1usize << (h + 1)) - 2)
}

fn edge_formula(h: u32, k: u32) -> usize {
    2 * k as usize * ((1usize << (h + 1)) - 2) - (h * k) as usize
}

fn bfs_levels(g: &WeightedGraph, src: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; g.n()];
    d[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(x) = q.pop_front() {
        for (y, _) in g.neighbors(x) {
            if d[y] == usize::MAX {
                d[y] = d[x] + 1;
                q.push_back(y);
            }
        }
    }
    d
}

/// Checks that `edges` is a subdivision of `K_5` or `K_{3,3}` by suppressing
/// degree-two vertices and inspecting the resulting multigraph.
fn is_kuratowski_subdivision(edges: &[(usize, usize)], kind: KuratowskiKind) -> bool {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in edges {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    if adj.values().any(|a| a.len() < 2) {
        return false;
    }
    let branch: BTreeSet<usize> = adj
        .iter()
        .filter(|(_, a)| a.len() >= 3)
        .map(|(&x, _)| x)
        .collect();
    let mut pairs = Vec::new();
    for &b in &branch {
        for &first in &adj[&b] {
            let (mut prev, mut cur) = (b, first);
            while !branch.contains(&cur) {
                let next = adj[&cur].iter().copied().find(|&y| y != prev).unwrap();
                prev = cur;
                cur = next;
            }
            if b < cur {
                pairs.push((b, cur));
            }
        }
    }
    let unique: BTreeSet<_> = pairs.iter().copied().collect();
    if unique.len() != pairs.len() {
        return false;
    }
    let b: Vec<usize> = branch.into_iter().collect();
    match kind {
        KuratowskiKind::K5 => b.len() == 5 && pairs.len() == 10,
        KuratowskiKind::K33 => {
            if b.len() != 6 || pairs.len() != 9 {
                return false;
            }
            let side: BTreeSet<usize> = pairs.iter().filter(|p| p.0 == b[0]).map(|p| p.1).collect();
            side.len() == 3
                && pairs
                    .iter()
                    .all(|&(u, v)| side.contains(&u) != side.contains(&v))
        }
    }
}

fn assert_certified(g: &WeightedGraph) -> bool {
    match check_planarity(g).unwrap() {
        Planarity::Planar(emb) => {
            assert!(emb.is_valid_for(g), "embedding fails Euler's formula");
            assert!(g.n() < 3 || g.m() <= 3 * g.n() - 6);
            true
        }
        Planarity::NonPlanar(w) => {
            let present: BTreeSet<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
            assert!(
                w.edges.iter().all(|e| present.contains(e)),
                "witness uses absent edges"
            );
            assert!(
                is_kuratowski_subdivision(&w.edges, w.kind),
                "witness is not {:?}",
                w.kind
            );
            false
        }
    }
}

#[test]
fn binary_tree_shapes() {
    let t = build_binary_tree(1).unwrap();
    assert_eq!((t.n(), t.graph().m()), (3, 2));
    assert_eq!((t.level_len(0), t.level_len(1)), (1, 2));
    let t = build_binary_tree(2).unwrap();
    assert_eq!((t.n(), t.graph().m()), (7, 6));
    let t = build_binary_tree(3).unwrap();
    let g = t.graph();
    assert_eq!(g.degree(t.root()), 2);
    for x in 0..g.n() {
        let expected = match t.level(x) {
            0 => 2,
            3 => 1,
            _ => 3,
        };
        assert_eq!(g.degree(x), expected, "vertex {x}");
    }
    assert!(matches!(
        build_binary_tree(0),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn subdivision_examples() {
    let single = path_graph(2);
    let p = subdivide_edges(&single, 3).unwrap();
    assert_eq!((p.n(), p.m()), (4, 3));
    assert_eq!(subdivide_edges(&single, 1).unwrap(), single);

    let t2 = build_binary_tree(2).unwrap();
    let s = subdivide_edges(t2.graph(), 2).unwrap();
    assert_eq!((s.n(), s.m()), (13, 12));

    let q1 = build_weighted_chain(1).unwrap();
    let q12 = subdivide_edges(q1.graph(), 2).unwrap();
    assert_eq!(q12.vertex_weights(), &[1.0, 2.0, 2.0]);
    let mut w: Vec<f64> = q12.edges().iter().map(|e| e.w).collect();
    w.sort_by(f64::total_cmp);
    assert_eq!(w, vec![2.0, 2.0]);
    assert!(subdivide_edges(&single, 0).is_err());
}

#[test]
fn hat_tree_examples() {
    let t = build_hat_tree(1, 1).unwrap();
    assert_eq!((t.n(), t.graph().m()), (3, 3));
    assert_eq!(t.graph(), &complete_graph(3));

    let t = build_hat_tree(2, 2).unwrap();
    assert_eq!((t.n(), t.graph().m()), (13, 20));
    assert_eq!(degree_stats(t.graph()).max_degree, 4);

    let t = build_hat_tree(3, 8).unwrap();
    assert_eq!((t.n(), t.graph().m()), (113, 200));
}

#[test]
fn counts_match_closed_forms() {
    for h in 1..=8 {
        for k in [1, 2, 3, 5, 8, 16, 64, 256] {
            let t = build_hat_tree(h, k).unwrap();
            assert_eq!(t.n(), vertex_formula(h, k), "h={h} k={k}");
            assert_eq!(t.graph().m(), edge_formula(h, k), "h={h} k={k}");
            assert!(t.graph().m() <= 3 * t.n() - 6);
        }
    }
}

#[test]
fn structural_invariants() {
    for (h, k) in [(1, 1), (1, 4), (2, 1), (2, 3), (3, 2), (4, 5), (5, 4)] {
        let t = build_hat_tree(h, k).unwrap();
        t.validate().unwrap();
        let g = t.graph();
        assert_eq!(
            bfs_levels(g, t.root()),
            (0..g.n()).map(|x| t.level(x)).collect::<Vec<_>>()
        );
        for l in 0..=t.depth() {
            let expected = if l == 0 {
                1
            } else {
                1usize << l.div_ceil(k as usize)
            };
            assert_eq!(t.level_len(l), expected, "h={h} k={k} level {l}");
        }
        let mut up = vec![0usize; g.n()];
        let mut path_per_level = vec![0usize; t.depth() + 1];
        for (i, e) in g.edges().iter().enumerate() {
            match t.edge_kind(i) {
                EdgeKind::Tree => {
                    let (a, b) = if t.level(e.u) < t.level(e.v) {
                        (e.u, e.v)
                    } else {
                        (e.v, e.u)
                    };
                    assert_eq!(t.level(a) + 1, t.level(b));
                    up[b] += 1;
                }
                EdgeKind::Path => {
                    assert_eq!(t.level(e.u), t.level(e.v));
                    let (a, b) = if t.branch_word(e.u) < t.branch_word(e.v) {
                        (e.u, e.v)
                    } else {
                        (e.v, e.u)
                    };
                    let l = t.level(a);
                    let mut members: Vec<usize> = t.level_range(l).collect();
                    members.sort_by_key(|&x| t.branch_word(x));
                    let pos = members.iter().position(|&x| x == a).unwrap();
                    assert_eq!(members[pos + 1], b, "path edge skips a vertex");
                    path_per_level[l] += 1;
                }
            }
        }
        assert_eq!(up[t.root()], 0);
        assert!((0..g.n()).filter(|&x| x != t.root()).all(|x| up[x] == 1));
        for (l, &count) in path_per_level.iter().enumerate() {
            assert_eq!(count, t.level_len(l) - 1);
        }
    }
}

#[test]
fn max_degree_is_five_from_height_three() {
    for h in 1..=6 {
        for k in [1, 2, 3, 8] {
            let d = degree_stats(build_hat_tree(h, k).unwrap().graph()).max_degree;
            assert!(d <= 5);
            assert_eq!(d == 5, h >= 3, "h={h} k={k} max degree {d}");
        }
    }
}

#[test]
fn weighted_chain_examples() {
    let q1 = build_weighted_chain(1).unwrap();
    assert_eq!(q1.graph().vertex_weights(), &[1.0, 2.0]);
    assert_eq!(q1.graph().edges()[0].w, 2.0);
    let q2 = build_weighted_chain(2).unwrap();
    assert_eq!(q2.graph().vertex_weights(), &[1.0, 2.0, 4.0]);
    assert_eq!(
        q2.graph().edges().iter().map(|e| e.w).collect::<Vec<_>>(),
        vec![2.0, 4.0]
    );
    let q3 = build_weighted_chain(3).unwrap();
    assert_eq!(q3.graph().total_mass(), 15.0);
    assert!(q3.graph().pi(3) > 7.5);
    assert!(matches!(
        build_weighted_chain(63),
        Err(Error::CapacityExceeded { .. })
    ));
    assert!(build_weighted_chain(62).is_ok());
}

#[test]
fn degree_stats_examples() {
    // Q_2: weighted degrees 2, 6, 4 over masses 1, 2, 4.
    let q2 = build_weighted_chain(2).unwrap();
    assert_eq!(degree_stats(q2.graph()).d_max, 3.0);
    assert_eq!(degree_stats(&complete_graph(2)).d_max, 1.0);
}

#[test]
fn quotient_examples_and_identity() {
    let q = quotient_by_levels(&build_hat_tree(1, 1).unwrap());
    assert_eq!(q.graph(), build_weighted_chain(1).unwrap().graph());
    let q = quotient_by_levels(&build_hat_tree(2, 2).unwrap());
    assert_eq!(q.graph().vertex_weights(), &[1.0, 2.0, 2.0, 4.0, 4.0]);
    assert_eq!(
        q.graph().edges().iter().map(|e| e.w).collect::<Vec<_>>(),
        vec![2.0, 2.0, 4.0, 4.0]
    );
    for h in 1..=6 {
        for k in [1, 2, 3, 4, 7] {
            let q = quotient_by_levels(&build_hat_tree(h, k).unwrap());
            let s = build_weighted_chain(h).unwrap().subdivide(k).unwrap();
            assert_eq!(q.graph(), s.graph(), "h={h} k={k}");
            let d = q.graph();
            for j in 0..d.n() {
                let expected: Vec<usize> = [j.wrapping_sub(1), j + 1]
                    .into_iter()
                    .filter(|&y| y < d.n())
                    .collect();
                let mut got: Vec<usize> = d.neighbors(j).map(|(y, _)| y).collect();
                got.sort();
                assert_eq!(got, expected);
            }
        }
    }
}

#[test]
fn planarity_small_cases() {
    assert!(assert_certified(&complete_graph(4)));
    assert!(!assert_certified(&complete_graph(5)));
    assert!(!assert_certified(&complete_bipartite(3, 3)));
    match check_planarity(&complete_graph(5)).unwrap() {
        Planarity::NonPlanar(w) => assert_eq!(w.kind, KuratowskiKind::K5),
        _ => unreachable!(),
    }
    match check_planarity(&complete_bipartite(3, 3)).unwrap() {
        Planarity::NonPlanar(w) => assert_eq!(w.kind, KuratowskiKind::K33),
        _ => unreachable!(),
    }
    assert!(assert_certified(&cycle_graph(10)));
    // Petersen graph.
    let mut pet: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
    pet.extend((0..5).map(|i| (i, i + 5)));
    pet.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
    assert!(!assert_certified(
        &WeightedGraph::unweighted(10, pet).unwrap()
    ));
    let split = WeightedGraph::unweighted(4, [(0, 1), (2, 3)]).unwrap();
    assert!(matches!(
        check_planarity(&split),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn hat_trees_are_planar() {
    for h in 1..=6 {
        for k in [1, 2, 8, 64] {
            assert!(
                check_planarity(build_hat_tree(h, k).unwrap().graph())
                    .unwrap()
                    .is_planar(),
                "h={h} k={k}"
            );
        }
    }
    let t = build_hat_tree(4, 16).unwrap();
    assert!(assert_certified(t.graph()));
}

#[test]
fn random_eight_vertex_graphs_are_certified() {
    let mut seen = [0usize; 2];
    for seed in 0..300 {
        let g = random_connected_graph(8, 0.2 + 0.6 * (seed % 5) as f64 / 4.0, false, seed);
        seen[assert_certified(&g) as usize] += 1;
    }
    assert!(seen[0] > 20 && seen[1] > 20, "{seen:?}");
}

#[test]
fn random_planar_graphs_are_planar() {
    for seed in 0..20 {
        let g = random_planar_graph(6, 7, 0.6, seed);
        assert!(g.is_connected());
        assert!(assert_certified(&g));
    }
}

#[test]
fn edgelist_of_an_edge() {
    let text = serialize(&GraphDocument::Plain(complete_graph(2)), Format::Edgelist);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, vec!["p wgraph 2 1", "v 0 1", "v 1 1", "e 0 1 1"]);
}

#[test]
fn hat_tree_round_trips_with_ids() {
    let t = build_hat_tree(2, 2).unwrap();
    for format in [Format::Edgelist, Format::Json] {
        let doc = GraphDocument::Hat(t.clone());
        let back = deserialize(&serialize(&doc, format), format).unwrap();
        assert_eq!(back.graph(), t.graph(), "{format:?}");
    }
    let back = deserialize(
        &serialize(&GraphDocument::Hat(t.clone()), Format::Json),
        Format::Json,
    )
    .unwrap();
    let hat = back.hat().expect("json keeps the hat-tree structure");
    assert_eq!((hat.h(), hat.k(), hat.root()), (2, 2, 0));
    assert_eq!(hat.levels(), t.levels());
    assert_eq!(hat.edge_kinds(), t.edge_kinds());
    let dot = to_dot(&GraphDocument::Hat(t));
    assert!(dot.starts_with("graph") && dot.matches("--").count() == 20);
}

#[test]
fn truncated_input_names_the_line() {
    let text = "p wgraph 3 2\nv 0 1\nv 1 1\nv 2 1\ne 0 1 1\n";
    match deserialize(text, Format::Edgelist) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
        other => panic!("expected a parse error, got {other:?}"),
    }
    match deserialize("p wgraph 2 1\nv 0 1\nv 1 x\ne 0 1 1\n", Format::Edgelist) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn parallel_edges_merge() {
    let g = WeightedGraph::new(vec![1.0; 3], [(0, 1, 1.0), (1, 0, 2.5), (1, 2, 1.0)]).unwrap();
    assert_eq!(g.m(), 2);
    assert_eq!(g.edges()[0].w, 3.5);
    assert!(WeightedGraph::new(vec![1.0; 2], [(0, 0, 1.0)]).is_err());
    assert!(WeightedGraph::new(vec![1.0, 0.0], [(0, 1, 1.0)]).is_err());
    assert!(WeightedGraph::new(vec![1.0; 2], [(0, 1, -1.0)]).is_err());
}

fn arb_graph() -> impl Strategy<Value = WeightedGraph> {
    (2usize..20, 0.0f64..1.0, any::<bool>(), any::<u64>())
        .prop_map(|(n, extra, weighted, seed)| random_connected_graph(n, extra, weighted, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_round_trips(g in arb_graph()) {
        for format in [Format::Edgelist, Format::Json] {
            let doc = GraphDocument::Plain(g.clone());
            let back = deserialize(&serialize(&doc, format), format).unwrap();
            prop_assert_eq!(back.graph(), &g);
        }
    }

    #[test]
    fn neighbor_lists_match_edges(g in arb_graph()) {
        let mut seen = vec![0usize; g.m()];
        for x in 0..g.n() {
            let mut ys = BTreeSet::new();
            for &(y, e) in g.incident(x) {
                prop_assert_eq!(g.edges()[e].other(x), y);
                prop_assert!(ys.insert(y));
                seen[e] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 2));
    }

    #[test]
    fn subdivision_counts(g in arb_graph(), k in 1usize..6) {
        let s = subdivide_edges(&g, k).unwrap();
        prop_assert_eq!(s.n(), g.n() + g.m() * (k - 1));
        prop_assert_eq!(s.m(), g.m() * k);
    }
}
