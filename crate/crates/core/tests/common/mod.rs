//! Shared fixtures and brute-force oracles. The oracles avoid the library's SCC and flow code
//! so they can check it.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scc_preserve::families::gen_random;
use scc_preserve::{DiGraph, EdgeId, VariantSpec};

pub fn bidirected_triangle() -> DiGraph {
    DiGraph::from_pairs(3, [(0, 1), (1, 2), (2, 0), (1, 0), (2, 1), (0, 2)]).unwrap()
}

pub fn bidirected_complete(n: usize) -> DiGraph {
    let pairs: Vec<_> = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    DiGraph::from_pairs(n, pairs).unwrap()
}

pub fn cycle(n: usize) -> DiGraph {
    DiGraph::from_pairs(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

pub fn path(n: usize) -> DiGraph {
    DiGraph::from_pairs(n, (1..n).map(|i| (i - 1, i))).unwrap()
}

/// s=0, a=1, b=2, t=3 with edges s→a, s→b, a→t, b→t.
pub fn diamond() -> DiGraph {
    DiGraph::from_pairs(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
}

pub fn ids(v: &[usize]) -> BTreeSet<EdgeId> {
    v.iter().map(|&i| EdgeId(i)).collect()
}

pub fn set(v: &[usize]) -> BTreeSet<usize> {
    v.iter().copied().collect()
}

/// Strongly connected random multigraph with `n` in `lo..=hi` and at most `max_m` edges.
pub fn random_strong(rng: &mut ChaCha8Rng, lo: usize, hi: usize, max_m: usize) -> DiGraph {
    let n = rng.gen_range(lo..=hi);
    let extra = rng.gen_range(0..=max_m.saturating_sub(n));
    gen_random(n, extra, rng.gen(), true).unwrap()
}

/// Random multigraph, not necessarily strongly connected.
pub fn random_any(rng: &mut ChaCha8Rng, lo: usize, hi: usize, max_m: usize) -> DiGraph {
    let n = rng.gen_range(lo..=hi);
    let m = rng.gen_range(0..=max_m);
    gen_random(n, m, rng.gen(), rng.gen_bool(0.5)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each edge kept independently with probability `p`.
pub fn random_subset(rng: &mut ChaCha8Rng, g: &DiGraph, p: f64) -> BTreeSet<EdgeId> {
    g.edge_ids().filter(|_| rng.gen_bool(p)).collect()
}

/// Reachability by repeated relaxation over the live edges.
pub fn reach(g: &DiGraph, from: usize, alive: &dyn Fn(EdgeId) -> bool) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    seen[from] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for e in g.edges() {
            if alive(e.id) && seen[e.tail] && !seen[e.head] {
                seen[e.head] = true;
                changed = true;
            }
        }
    }
    seen
}

/// `sc[u][v]`: u and v mutually reachable.
pub fn strong_matrix(g: &DiGraph, alive: &dyn Fn(EdgeId) -> bool) -> Vec<Vec<bool>> {
    let r: Vec<Vec<bool>> = (0..g.n()).map(|v| reach(g, v, alive)).collect();
    (0..g.n()).map(|u| (0..g.n()).map(|v| r[u][v] && r[v][u]).collect()).collect()
}

fn relevant_pairs(spec: &VariantSpec, n: usize) -> Vec<(usize, usize)> {
    match spec {
        VariantSpec::AllPairs | VariantSpec::Global => (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect(),
        VariantSpec::SingleSource { source } => (0..n).map(|v| (*source, v)).collect(),
        VariantSpec::St { s, t } => vec![(*s, *t)],
        VariantSpec::Sourcewise { sources } => sources.iter().flat_map(|&s| (0..n).map(move |v| (s, v))).collect(),
    }
}

fn spec_holds(spec: &VariantSpec, n: usize, g_sc: &[Vec<bool>], h_sc: &[Vec<bool>]) -> bool {
    match spec {
        VariantSpec::Global => {
            let all = |m: &[Vec<bool>]| (0..n).all(|v| m[0][v]);
            n == 0 || all(g_sc) == all(h_sc)
        }
        _ => relevant_pairs(spec, n).into_iter().all(|(u, v)| g_sc[u][v] == h_sc[u][v]),
    }
}

/// Every fault set of size at most `k`, as edge ids, by bitmask enumeration.
pub fn fault_sets(g: &DiGraph, k: usize) -> Vec<BTreeSet<EdgeId>> {
    let all: Vec<EdgeId> = g.edge_ids().collect();
    assert!(all.len() < 31, "oracle enumeration is for small graphs");
    (0u32..1 << all.len())
        .filter(|mask| mask.count_ones() as usize <= k)
        .map(|mask| (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect())
        .collect()
}

/// Independent check that `kept` preserves the variant under every fault set of size `<= k`.
pub fn brute_ft_ok(g: &DiGraph, kept: &BTreeSet<EdgeId>, spec: &VariantSpec, k: usize) -> bool {
    fault_sets(g, k).iter().all(|f| {
        let g_sc = strong_matrix(g, &|e| !f.contains(&e));
        let h_sc = strong_matrix(g, &|e| kept.contains(&e) && !f.contains(&e));
        spec_holds(spec, g.n(), &g_sc, &h_sc)
    })
}

/// Independent criticality test for edge `e`.
pub fn brute_critical(g: &DiGraph, e: EdgeId, spec: &VariantSpec, k: usize) -> bool {
    let without: BTreeSet<EdgeId> = g.edge_ids().filter(|&x| x != e).collect();
    !brute_ft_ok(g, &without, spec, k)
}

/// Out-boundary of a vertex bitmask among live edges.
pub fn out_boundary(g: &DiGraph, side: u32, alive: &dyn Fn(EdgeId) -> bool) -> usize {
    g.edges()
        .iter()
        .filter(|e| alive(e.id) && side >> e.tail & 1 == 1 && side >> e.head & 1 == 0)
        .count()
}

/// Minimum out-boundary over all sides containing `xs` and avoiding `ys`.
pub fn brute_min_cut(g: &DiGraph, xs: &[usize], ys: &[usize], alive: &dyn Fn(EdgeId) -> bool) -> usize {
    let xm: u32 = xs.iter().map(|&x| 1u32 << x).sum();
    let ym: u32 = ys.iter().map(|&y| 1u32 << y).sum();
    (0u32..1 << g.n())
        .filter(|&s| s & xm == xm && s & ym == 0)
        .map(|s| out_boundary(g, s, alive))
        .min()
        .expect("x and y are disjoint")
}

/// `min(mincut(s, t), mincut(t, s), k)` by subset enumeration.
pub fn brute_lambda(g: &DiGraph, s: usize, t: usize, k: usize, alive: &dyn Fn(EdgeId) -> bool) -> usize {
    brute_min_cut(g, &[s], &[t], alive).min(brute_min_cut(g, &[t], &[s], alive)).min(k)
}

/// The complete out-binary tree of depth `k` rooted at 0 in heap order, its leaves, and for
/// each leaf the off-path sibling edges whose failure leaves only that leaf reachable.
pub fn isolation_tree(k: usize) -> (DiGraph, Vec<usize>, Vec<BTreeSet<EdgeId>>) {
    let size = (1usize << (k + 1)) - 1;
    // Edge c - 1 enters heap node c.
    let g = DiGraph::from_pairs(size, (1..size).map(|c| ((c - 1) / 2, c))).unwrap();
    let leaves: Vec<usize> = ((1 << k) - 1..size).collect();
    let faults = leaves
        .iter()
        .map(|&leaf| {
            let mut f = BTreeSet::new();
            let mut c = leaf;
            while c > 0 {
                let sibling = if c % 2 == 1 { c + 1 } else { c - 1 };
                f.insert(EdgeId(sibling - 1));
                c = (c - 1) / 2;
            }
            f
        })
        .collect();
    (g, leaves, faults)
}
