mod common;

use std::collections::BTreeSet;

use common::*;
use scc_preserve::expander::HierarchyParams;
use scc_preserve::families::{gen_baswana_tree, gen_bounded_degree_lower, gen_color_fault_lower, gen_random, gen_st_lower};
use scc_preserve::fpt::{
    critical_edge_container, fpt_container_all_pairs, fpt_preserver, fpt_preserver_with, hierarchy_q, sample_count,
    FptConfig,
};
use scc_preserve::kconn::{check_kcritical_cut_bound, demand_pairs, greedy_kconn_preserver};
use scc_preserve::preservers::{
    global_from_single_source, greedy_preserver, hierarchy_preserver, is_ft_critical, sscp, st_from_global,
};
use scc_preserve::verify::{
    enumerate_critical_edges, verify_bounded_degree_witness, verify_color_witness, verify_ft, verify_ft_by_cuts,
    verify_kconn, verify_kconn_by_cuts,
};
use scc_preserve::{DiGraph, EdgeId, Error, VariantSpec};

const ALL: VariantSpec = VariantSpec::AllPairs;

#[test]
fn criticality_examples() {
    let c4 = cycle(4);
    for e in c4.edge_ids() {
        let w = is_ft_critical(&c4, e, &ALL, 1).unwrap().unwrap();
        assert!(w.faults.is_empty());
    }
    // Arcs in lexicographic order: 0→1 is edge 0 and 0→2 is edge 1.
    let t = DiGraph::from_pairs(3, [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]).unwrap();
    let w = is_ft_critical(&t, EdgeId(0), &ALL, 1).unwrap().unwrap();
    assert_eq!(w.faults, ids(&[1]));
    assert!(brute_critical(&t, EdgeId(0), &ALL, 1));
    assert_eq!(is_ft_critical(&t, EdgeId(0), &ALL, 0).unwrap(), None);
}

#[test]
fn greedy_examples() {
    let t = bidirected_triangle();
    assert_eq!(greedy_preserver(&t, &ALL, 1).unwrap().kept_edges, t.edge_id_set());
    let h = greedy_preserver(&t, &ALL, 0).unwrap();
    assert_eq!(h.kept_edges, ids(&[3, 4, 5]));
    assert!(verify_ft(&t, &h.kept_edges, &ALL, 0).unwrap().ok);
    for n in 2..6 {
        for k in 0..3 {
            assert_eq!(greedy_preserver(&cycle(n), &ALL, k).unwrap().kept_edges.len(), n);
        }
    }
}

#[test]
fn single_source_examples() {
    // Bidirected star centred at 0.
    let star = DiGraph::from_pairs(4, [(0, 1), (1, 0), (0, 2), (2, 0), (0, 3), (3, 0)]).unwrap();
    assert_eq!(sscp(&star, 0, 1).unwrap().kept_edges.len(), 6);
    assert_eq!(sscp(&cycle(3), 0, 0).unwrap().kept_edges.len(), 3);
    let dag = path(4);
    assert!(sscp(&dag, 0, 1).unwrap().kept_edges.is_empty());
}

#[test]
fn st_and_global_examples() {
    let c3 = cycle(3);
    let spec = VariantSpec::St { s: 0, t: 1 };
    assert_eq!(greedy_preserver(&c3, &spec, 0).unwrap().kept_edges.len(), 3);
    assert_eq!(st_from_global(&c3, 0, 1, 0, global_from_single_source).unwrap().kept_edges.len(), 3);

    let t = bidirected_triangle();
    let h = st_from_global(&t, 0, 1, 1, global_from_single_source).unwrap();
    assert!(verify_ft(&t, &h.kept_edges, &spec, 1).unwrap().ok);

    let st = gen_st_lower(2, 2).unwrap();
    let (s, tt) = (st.meta.s, st.meta.t.unwrap());
    let kept = greedy_preserver(&st.graph, &VariantSpec::St { s, t: tt }, 2).unwrap().kept_edges;
    assert!(st.meta.cross.iter().all(|c| kept.contains(&c.edge)));
    let reduced = st_from_global(&st.graph, s, tt, 2, global_from_single_source).unwrap().kept_edges;
    assert!(st.meta.cross.iter().all(|c| reduced.contains(&c.edge)));
    let single = sscp(&st.graph, s, 2).unwrap().kept_edges;
    assert!(st.meta.cross.iter().all(|c| single.contains(&c.edge)));

    let c4 = cycle(4);
    let g = global_from_single_source(&c4, 1).unwrap();
    assert_eq!(g.kept_edges.len(), 4);
    assert!(verify_ft(&c4, &g.kept_edges, &VariantSpec::Global, 1).unwrap().ok);
    assert!(global_from_single_source(&DiGraph::empty(1), 1).unwrap().kept_edges.is_empty());
    let k3 = global_from_single_source(&t, 1).unwrap();
    assert!(verify_ft(&t, &k3.kept_edges, &VariantSpec::Global, 1).unwrap().ok);
}

#[test]
fn hierarchy_preserver_examples() {
    let mut r = rng(101);
    for _ in 0..10 {
        let g = random_strong(&mut r, 4, 10, 16);
        let h = hierarchy_preserver(&g, 1, &HierarchyParams::for_budget(1)).unwrap();
        assert!(verify_ft(&g, &h.kept_edges, &ALL, 1).unwrap().ok);
    }
    let k4 = bidirected_complete(4);
    let h = hierarchy_preserver(&k4, 1, &HierarchyParams::for_budget(1)).unwrap();
    let sourcewise = greedy_preserver(&k4, &VariantSpec::Sourcewise { sources: vec![0, 1, 2, 3] }, 1).unwrap();
    assert!(verify_ft(&k4, &h.kept_edges, &ALL, 1).unwrap().ok);
    assert!(verify_ft(&k4, &sourcewise.kept_edges, &ALL, 1).unwrap().ok);
    let empty = hierarchy_preserver(&DiGraph::empty(0), 1, &HierarchyParams::for_budget(1)).unwrap();
    assert!(empty.kept_edges.is_empty());
}

#[test]
fn verifier_examples() {
    let t = bidirected_triangle();
    for spec in [ALL, VariantSpec::Global, VariantSpec::SingleSource { source: 2 }, VariantSpec::St { s: 0, t: 2 }] {
        assert!(verify_ft(&t, &t.edge_id_set(), &spec, 2).unwrap().ok);
    }
    let r = verify_ft(&t, &ids(&[0, 1, 2, 3, 4]), &ALL, 1).unwrap();
    assert!(!r.ok);
    assert!(r.counterexample.is_some());

    // C4 plus chord 0→2 (edge 4); dropping the chord keeps every SCC at k = 0.
    let chord = DiGraph::from_pairs(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
    assert!(verify_ft(&chord, &ids(&[0, 1, 2, 3]), &ALL, 0).unwrap().ok);

    assert!(verify_kconn(&t, &t.edge_id_set(), 2).unwrap().ok);
    let minus = verify_kconn(&t, &ids(&[1, 2, 3, 4, 5]), 2).unwrap();
    let c = minus.counterexample.unwrap();
    assert_eq!((c.expected, c.found), (2, 1));
    assert!(verify_kconn(&t, &ids(&[0, 1, 2]), 1).unwrap().ok);

    assert!(verify_ft_by_cuts(&t, &t.edge_id_set(), 2).unwrap());
    assert!(!verify_ft_by_cuts(&cycle(3), &ids(&[0, 1]), 0).unwrap());
    assert!(!verify_ft(&cycle(3), &ids(&[0, 1]), &ALL, 0).unwrap().ok);
    assert!(verify_kconn_by_cuts(&t, &t.edge_id_set(), 2).unwrap());
    assert!(!verify_kconn_by_cuts(&t, &ids(&[1, 2, 3, 4, 5]), 2).unwrap());
}

#[test]
fn critical_set_examples() {
    assert_eq!(enumerate_critical_edges(&cycle(5), &ALL, 0).unwrap().len(), 5);
    let t = bidirected_triangle();
    assert_eq!(enumerate_critical_edges(&t, &ALL, 1).unwrap(), t.edge_id_set());
    assert!(enumerate_critical_edges(&path(4), &ALL, 2).unwrap().is_empty());
}

#[test]
fn witness_verifier_examples() {
    let bd = gen_bounded_degree_lower(4, 2).unwrap();
    assert_eq!(bd.meta.cross.len(), 8);
    let all = bd.graph.edge_id_set();
    for w in &bd.meta.cross {
        assert!(verify_bounded_degree_witness(&bd.graph, &all, w.edge, &w.faults, w.pair.0, w.pair.1).unwrap());
    }
    let w = &bd.meta.cross[0];
    // Without faults another leaf still reaches the sink, so the cross edge is redundant.
    assert!(!verify_bounded_degree_witness(&bd.graph, &all, w.edge, &BTreeSet::new(), w.pair.0, w.pair.1).unwrap());
    // Two failed edges out of the root break the degree model.
    let root_edges: BTreeSet<EdgeId> = bd.graph.out_edges(bd.meta.s).map(|e| e.id).collect();
    assert!(matches!(
        verify_bounded_degree_witness(&bd.graph, &all, w.edge, &root_edges, w.pair.0, w.pair.1),
        Err(Error::Input(_))
    ));

    let col = gen_color_fault_lower(4, 2).unwrap();
    let all = col.graph.edge_id_set();
    for w in &col.meta.cross {
        let c = w.failed_color.unwrap();
        assert!(verify_color_witness(&col.graph, &all, w.edge, c, w.pair.0, w.pair.1).unwrap());
        assert!(!verify_color_witness(&col.graph, &all, w.edge, 0, w.pair.0, w.pair.1).unwrap());
    }
    let mono = DiGraph::from_edge_list(
        2,
        vec![
            scc_preserve::Edge { id: EdgeId(0), tail: 0, head: 1, color: Some(3) },
            scc_preserve::Edge { id: EdgeId(1), tail: 1, head: 0, color: Some(3) },
        ],
    )
    .unwrap();
    assert!(!verify_color_witness(&mono, &mono.edge_id_set(), EdgeId(0), 3, 0, 1).unwrap());
}

#[test]
fn demand_pair_examples() {
    assert!(demand_pairs(&DiGraph::empty(1), 2).pairs.is_empty());
    let t = bidirected_triangle();
    for k in 1..4 {
        let d = demand_pairs(&t, k);
        assert_eq!(d.pairs.len(), 2);
        assert!(d.pairs.iter().all(|p| p.lambda == k.min(2)));
    }
}

#[test]
fn kconn_examples() {
    let t = bidirected_triangle();
    for dp in [false, true] {
        assert_eq!(greedy_kconn_preserver(&t, 1, dp).unwrap().kept_edges.len(), 3);
        assert_eq!(greedy_kconn_preserver(&t, 2, dp).unwrap().kept_edges.len(), 6);
    }
    let mut r = rng(7);
    for _ in 0..20 {
        let g = random_strong(&mut r, 3, 7, 14);
        for k in 1..=2 {
            let a = greedy_kconn_preserver(&g, k, false).unwrap();
            let b = greedy_kconn_preserver(&g, k, true).unwrap();
            assert!(verify_kconn(&g, &a.kept_edges, k).unwrap().ok);
            assert!(verify_kconn(&g, &b.kept_edges, k).unwrap().ok);
        }
    }
}

#[test]
fn kcritical_cut_bound_examples() {
    let r = check_kcritical_cut_bound(&cycle(5), 1, 0, 0).unwrap();
    assert!(r.exhaustive && r.violations.is_empty());
    let tri = bidirected_triangle();
    let h = greedy_kconn_preserver(&tri, 1, false).unwrap();
    let sub = tri.restrict_to(&h.kept_edges).unwrap();
    assert!(check_kcritical_cut_bound(&sub, 1, 0, 0).unwrap().violations.is_empty());
}

#[test]
fn fpt_constants() {
    assert_eq!(sample_count(1), 1);
    assert_eq!(sample_count(8), 104);
    assert_eq!(sample_count(100), 231);
    assert_eq!(hierarchy_q(8, 1, 1.0), 4);
    assert_eq!(hierarchy_q(1000, 1, 1.0), 6);
    assert_eq!(hierarchy_q(8, 2, 1.0), 8);
}

#[test]
fn fpt_container_examples() {
    let c6 = cycle(6);
    let all: Vec<usize> = (0..6).collect();
    let r = critical_edge_container(&c6, &all, 2, 1, 3).unwrap();
    assert_eq!(r.edges, c6.edge_id_set());
    assert_eq!(r.sample_count, sample_count(6));

    let c4 = cycle(4);
    assert_eq!(fpt_container_all_pairs(&c4, 1, 0).unwrap().edges, c4.edge_id_set());

    // Small terminal sets take the deterministic branch.
    let mut rg = rng(44);
    for _ in 0..10 {
        let g = random_strong(&mut rg, 4, 7, 12);
        let u: Vec<usize> = (0..g.n()).collect();
        let r = critical_edge_container(&g, &u, 2, 1, 9).unwrap();
        let critical = enumerate_critical_edges(&g, &ALL, 1).unwrap();
        assert!(critical.is_subset(&r.edges));
    }

    // A DAG has no strongly connected pair, so nothing is critical.
    let dag = path(5);
    assert!(enumerate_critical_edges(&dag, &ALL, 1).unwrap().is_subset(&fpt_container_all_pairs(&dag, 1, 0).unwrap().edges));
}

#[test]
fn fpt_preserver_examples() {
    let c5 = cycle(5);
    assert_eq!(fpt_preserver(&c5, 1, 0, None).unwrap().kept_edges, c5.edge_id_set());
    let k4 = bidirected_complete(4);
    let h = fpt_preserver(&k4, 1, 5, None).unwrap();
    assert!(h.kept_edges.len() <= k4.m());
    assert!(verify_ft(&k4, &h.kept_edges, &ALL, 1).unwrap().ok);
    let zero = fpt_preserver(&k4, 1, 5, Some(0)).unwrap();
    assert!(verify_ft(&k4, &zero.kept_edges, &ALL, 1).unwrap().ok);
    let again = fpt_preserver(&k4, 1, 5, None).unwrap();
    assert_eq!(again, h);

    let checked = FptConfig { check_removals: true, ..FptConfig::default() };
    let mut r = rng(12);
    for _ in 0..5 {
        let g = random_strong(&mut r, 4, 7, 13);
        let h = fpt_preserver_with(&g, 1, 3, None, &checked).unwrap();
        assert!(verify_ft(&g, &h.kept_edges, &ALL, 1).unwrap().ok);
    }
}

#[test]
fn family_examples() {
    let b = gen_baswana_tree(1, 1).unwrap();
    assert_eq!((b.graph.n(), b.graph.m()), (4, 5));

    let b = gen_baswana_tree(2, 3).unwrap();
    assert_eq!(b.meta.cross.len(), 12);
    let critical = enumerate_critical_edges(&b.graph, &ALL, 2).unwrap();
    assert!(b.meta.cross.iter().all(|c| critical.contains(&c.edge)));

    let small = gen_baswana_tree(1, 1).unwrap();
    let kc = greedy_kconn_preserver(&small.graph, 1, false).unwrap();
    assert!(kc.kept_edges.len() <= small.graph.n() + small.graph.m());
    assert!(verify_kconn(&small.graph, &kc.kept_edges, 1).unwrap().ok);

    let st = gen_st_lower(2, 2).unwrap();
    assert_eq!(st.meta.cross.len(), 8);
    assert!(st.meta.cross.iter().all(|c| c.faults.len() == 2));
    let one = gen_st_lower(1, 2).unwrap();
    assert_eq!(one.meta.cross.len(), 4);
    assert_eq!(one.graph.n(), 1 + 2 + 2 + 1);
    let spec = VariantSpec::St { s: one.meta.s, t: one.meta.t.unwrap() };
    let kept = greedy_preserver(&one.graph, &spec, 2).unwrap().kept_edges;
    assert!(one.meta.cross.iter().filter(|c| kept.contains(&c.edge)).count() >= 4);

    assert_eq!(gen_bounded_degree_lower(2, 1).unwrap().meta.cross.len(), 2);
    assert!(matches!(gen_bounded_degree_lower(4, 0), Err(Error::Input(_))));
    assert!(gen_st_lower(1, 3).is_err());

    let col = gen_color_fault_lower(4, 2).unwrap();
    assert!(col.graph.edges().iter().all(|e| e.color.is_some()));
    let s = col.meta.s;
    for (&color, &leaf) in &col.meta.color_of_leaf {
        let alive = |e: EdgeId| col.graph.edge(e).unwrap().color != Some(color);
        let seen = reach(&col.graph, s, &alive);
        let reached: Vec<usize> = col.meta.x_vertices.iter().copied().filter(|&x| seen[x]).collect();
        assert_eq!(reached, vec![leaf]);
    }
    let no_zero = |e: EdgeId| col.graph.edge(e).unwrap().color != Some(0);
    for &x in &col.meta.x_vertices {
        let seen = reach(&col.graph, x, &no_zero);
        assert!(col.meta.y_vertices.iter().all(|&y| !seen[y]));
    }

    let g = gen_random(5, 0, 9, true).unwrap();
    assert_eq!(g.m(), 5);
    assert_eq!(g.scc().count(), 1);
    assert_eq!(gen_random(8, 20, 3, false).unwrap(), gen_random(8, 20, 3, false).unwrap());
}
