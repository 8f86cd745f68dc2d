use pathwl::complex::{cyclic_families, lift, lift_path_complex, lift_ring_complex};
use pathwl::graph::apply_permutation;
use pathwl::refine::{
    distinguishes, pairwise_verdicts, power_order_check, refine_many, refine_pair, wl1_refine_pair,
    Color, ColorState, PowerOrderParams, UpdateRule,
};
use pathwl::{BoundaryMode, HigherOrderComplex, LiftSpec, SimpleGraph, VertexPermutation};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

fn graph_from_bits(n: usize, bits: &[bool]) -> SimpleGraph {
    let mut edges = Vec::new();
    let mut i = 0;
    for v in 1..n {
        for u in 0..v {
            if bits[i] {
                edges.push((u, v));
            }
            i += 1;
        }
    }
    SimpleGraph::new(n, edges).unwrap()
}

fn arb_graph(min_n: usize, max_n: usize) -> impl Strategy<Value = SimpleGraph> {
    (min_n..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2)
            .prop_map(move |bits| graph_from_bits(n, &bits))
    })
}

fn arb_graph_with_perm(max_n: usize) -> impl Strategy<Value = (SimpleGraph, VertexPermutation)> {
    arb_graph(1, max_n).prop_flat_map(|g| {
        let n = g.n();
        (
            Just(g),
            Just((0..n).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(|p| VertexPermutation::new(p).unwrap()),
        )
    })
}

/// Graphs with the same degree sequence are the interesting pairs; mix in
/// random regular-ish pairs by rewiring with double edge swaps.
fn arb_pair(max_n: usize) -> impl Strategy<Value = (SimpleGraph, SimpleGraph)> {
    (arb_graph(4, max_n), any::<u64>()).prop_map(|(g, salt)| {
        let h = double_edge_swap(&g, salt);
        (g, h)
    })
}

fn double_edge_swap(g: &SimpleGraph, salt: u64) -> SimpleGraph {
    let mut edges: Vec<(u32, u32)> = g.edges().collect();
    let m = edges.len();
    if m < 2 {
        return g.clone();
    }
    let mut state = salt | 1;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..3 * m {
        let i = (next() % m as u64) as usize;
        let j = (next() % m as u64) as usize;
        let (a, b) = edges[i];
        let (c, d) = edges[j];
        if i == j || a == c || a == d || b == c || b == d {
            continue;
        }
        let exists = |x: u32, y: u32| edges.iter().any(|&(p, q)| (p, q) == (x.min(y), x.max(y)));
        if exists(a, d) || exists(c, b) {
            continue;
        }
        edges[i] = (a.min(d), a.max(d));
        edges[j] = (c.min(b), c.max(b));
    }
    SimpleGraph::new(g.n(), edges.iter().map(|&(u, v)| (u as usize, v as usize))).unwrap()
}

fn specs() -> Vec<LiftSpec> {
    vec![
        LiftSpec::path(3),
        LiftSpec::path(3).with_boundary_mode(BoundaryMode::Truncation),
        LiftSpec::clique(3),
        LiftSpec::ring(5),
    ]
}

fn histograms_equal(x: &HigherOrderComplex, y: &HigherOrderComplex, rule: UpdateRule) -> bool {
    let (a, b, _) = refine_pair(x, y, rule, None).unwrap();
    !distinguishes(&a, &b)
}

#[test]
fn worked_refinements() {
    let k3 = lift_path_complex(&SimpleGraph::complete(3), 2).unwrap();
    let (a, b, rounds) = refine_pair(&k3, &k3, UpdateRule::Reduced, None).unwrap();
    assert_eq!(a, b);
    assert!(rounds <= 3);

    let c6 = SimpleGraph::cycle(6);
    let k3k3 = SimpleGraph::complete(3).disjoint_union(&SimpleGraph::complete(3));
    let x = lift_path_complex(&c6, 2).unwrap();
    let y = lift_path_complex(&k3k3, 2).unwrap();
    let (a, b, _) = refine_pair(&x, &y, UpdateRule::Reduced, Some(1)).unwrap();
    assert!(distinguishes(&a, &b));
    let (a, b, _) = wl1_refine_pair(&c6, &k3k3);
    assert!(!distinguishes(&a, &b));

    let cells = lift_ring_complex(&c6, 6).unwrap();
    assert!(refine_pair(&x, &cells, UpdateRule::Reduced, None).is_err());
}

#[test]
fn power_order_examples() {
    let c6 = SimpleGraph::cycle(6);
    let k3k3 = SimpleGraph::complete(3).disjoint_union(&SimpleGraph::complete(3));
    let k3 = SimpleGraph::complete(3);
    let params = PowerOrderParams {
        pwl_dim: 2,
        swl_dim: 2,
        max_ring: 3,
        ..PowerOrderParams::default()
    };
    let report = power_order_check(&[(c6, k3k3), (k3.clone(), k3)], &params).unwrap();
    let v = report.verdicts[0];
    assert!(!v.wl && v.swl && v.cwl && v.pwl);
    let v = report.verdicts[1];
    assert!(!v.wl && !v.swl && !v.cwl && !v.pwl);
    assert!(report.violations.is_empty());
    assert_eq!(report.strict_witnesses(), [0]);
}

#[test]
fn refinement_is_identical_across_thread_counts() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/srg");
    let text = std::fs::read_to_string(dir.join("sr251256.g6")).unwrap();
    let graphs = pathwl::graph::parse_graph6_file(&text).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let cxs: Vec<_> = graphs[..4]
                .iter()
                .map(|g| lift_path_complex(g, 2).unwrap())
                .collect();
            let refs: Vec<&HigherOrderComplex> = cxs.iter().collect();
            refine_many(&refs, UpdateRule::Reduced, None).unwrap()
        })
    };
    assert_eq!(run(1), run(4));
}

/// Snapshot of every part's colours after each round `0..=rounds`.
fn colour_history(parts: &[&HigherOrderComplex], rounds: usize) -> Vec<Vec<Vec<Color>>> {
    let mut state = ColorState::new(parts, UpdateRule::Reduced);
    let snap = |s: &ColorState<HigherOrderComplex>| {
        (0..parts.len())
            .map(|i| s.colors(i).to_vec())
            .collect::<Vec<_>>()
    };
    let mut out = vec![snap(&state)];
    for _ in 0..rounds {
        state.step();
        out.push(snap(&state));
    }
    out
}

/// Checks that matching top-family colours at round `t + p` imply matching
/// `k`-family colours at round `t + k`; returns how many premises held.
fn family_propagation(g: &SimpleGraph, h: &SimpleGraph) -> Result<usize, TestCaseError> {
    let max_ring = 5;
    let rings_g = lift_ring_complex(g, max_ring).unwrap();
    let rings_h = lift_ring_complex(h, max_ring).unwrap();
    let x = lift_path_complex(g, max_ring - 1).unwrap();
    let y = lift_path_complex(h, max_ring - 1).unwrap();
    let fams = |rings: &HigherOrderComplex, cx: &HigherOrderComplex| {
        rings
            .ids_of_dim(2)
            .map(|id| cyclic_families(rings, id).unwrap().member_ids(cx).unwrap())
            .collect::<Vec<_>>()
    };
    let fx = fams(&rings_g, &x);
    let fy = fams(&rings_h, &y);
    let rounds = 8;
    let hist = colour_history(&[&x, &y], rounds + max_ring);
    let rep = |part: usize, ids: &[u32], r: usize| {
        let mut c: Vec<Color> = ids.iter().map(|&i| hist[r][part][i as usize]).collect();
        c.sort_unstable();
        c
    };
    let mut premises = 0;
    for a in &fx {
        for b in &fy {
            if a.len() != b.len() {
                continue;
            }
            let p = a.len() - 1;
            for t in 0..=rounds {
                if rep(0, &a[p], t + p) != rep(1, &b[p], t + p) {
                    continue;
                }
                premises += 1;
                for k in 0..=p {
                    prop_assert_eq!(rep(0, &a[k], t + k), rep(1, &b[k], t + k));
                }
            }
        }
    }
    Ok(premises)
}

#[test]
fn family_colours_on_constructed_pairs() {
    let prism = SimpleGraph::new(
        6,
        [
            (0, 1),
            (1, 2),
            (2, 0),
            (3, 4),
            (4, 5),
            (5, 3),
            (0, 3),
            (1, 4),
            (2, 5),
        ],
    )
    .unwrap();
    let k33 = SimpleGraph::new(
        6,
        [
            (0, 3),
            (0, 4),
            (0, 5),
            (1, 3),
            (1, 4),
            (1, 5),
            (2, 3),
            (2, 4),
            (2, 5),
        ],
    )
    .unwrap();
    let c4_tail = SimpleGraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]).unwrap();
    let c4_chord_free = SimpleGraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 4)]).unwrap();
    let mut premises = 0;
    for (g, h) in [
        (&prism, &k33),
        (&k33, &k33),
        (&c4_tail, &c4_chord_free),
        (&prism, &prism),
    ] {
        premises += family_propagation(g, h).unwrap();
    }
    assert!(premises > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn isomorphic_inputs_are_never_separated((g, p) in arb_graph_with_perm(8)) {
        let h = apply_permutation(&g, &p).unwrap();
        for spec in specs() {
            let x = lift(&g, &spec).unwrap();
            let y = lift(&h, &spec).unwrap();
            for rule in [UpdateRule::Reduced, UpdateRule::Full] {
                prop_assert!(histograms_equal(&x, &y, rule), "{:?} {}", spec, rule);
            }
        }
        let (a, b, _) = wl1_refine_pair(&g, &h);
        prop_assert!(!distinguishes(&a, &b));
    }

    #[test]
    fn colour_classes_refine_monotonically((g, h) in arb_pair(7)) {
        let x = lift_path_complex(&g, 3).unwrap();
        let y = lift_path_complex(&h, 3).unwrap();
        let mut state = ColorState::new(&[&x, &y], UpdateRule::Reduced);
        let mut prev: Vec<Color> = [state.colors(0), state.colors(1)].concat();
        let mut prev_classes = state.class_count();
        let mut settled = false;
        for _ in 0..x.len() + y.len() + 2 {
            let changed = state.step();
            let cur: Vec<Color> = [state.colors(0), state.colors(1)].concat();
            prop_assert!(state.class_count() >= prev_classes);
            if settled {
                prop_assert!(!changed);
                prop_assert_eq!(state.class_count(), prev_classes);
            }
            // equal new colours imply equal old colours
            let mut old_of = std::collections::HashMap::new();
            for (&n, &o) in cur.iter().zip(&prev) {
                prop_assert_eq!(*old_of.entry(n).or_insert(o), o);
            }
            settled |= !changed;
            prev = cur;
            prev_classes = state.class_count();
        }
        prop_assert!(settled);
    }

    #[test]
    fn boundary_sizes_separate_after_one_round((g, h) in arb_pair(7)) {
        let x = lift_path_complex(&g, 3).unwrap();
        let y = lift_path_complex(&h, 3).unwrap();
        let mut state = ColorState::new(&[&x, &y], UpdateRule::Reduced);
        for _ in 0..3 {
            state.step();
            let mut by_colour = std::collections::HashMap::new();
            for (part, cx) in [&x, &y].into_iter().enumerate() {
                for id in 0..cx.len() as u32 {
                    let c = state.colors(part)[id as usize];
                    let b = cx.boundary(id).len();
                    prop_assert_eq!(*by_colour.entry(c).or_insert(b), b);
                }
            }
        }
    }

    #[test]
    fn reduced_and_full_rules_agree((g, h) in arb_pair(7)) {
        for spec in specs() {
            let x = lift(&g, &spec).unwrap();
            let y = lift(&h, &spec).unwrap();
            prop_assert_eq!(
                histograms_equal(&x, &y, UpdateRule::Reduced),
                histograms_equal(&x, &y, UpdateRule::Full),
                "{:?}", spec
            );
        }
    }

    #[test]
    fn joint_run_matches_pairwise_runs(
        graphs in proptest::collection::vec(arb_graph(5, 6), 2..6),
        salt in any::<u64>(),
        full in any::<bool>(),
    ) {
        let mut graphs = graphs;
        let swapped = double_edge_swap(&graphs[0], salt);
        graphs.push(swapped);
        let rule = if full { UpdateRule::Full } else { UpdateRule::Reduced };
        let cxs: Vec<_> = graphs.iter().map(|g| lift_path_complex(g, 3).unwrap()).collect();
        let refs: Vec<&HigherOrderComplex> = cxs.iter().collect();
        let joint = refine_many(&refs, rule, None).unwrap();
        for (a, b, d) in pairwise_verdicts(&joint) {
            prop_assert_eq!(d, !histograms_equal(&cxs[a], &cxs[b], rule), "pair {} {}", a, b);
        }
    }

    #[test]
    fn family_colours_propagate_downwards((g, h) in arb_pair(7)) {
        family_propagation(&g, &h)?;
    }
}
