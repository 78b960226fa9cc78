//! Exhaustive ground-truth checks for preservers.
//!
//! Fault sets range over all edges of the input graph, at most `k` of them, in graded colex
//! order of edge slots; pairs are scanned in row-major order. The first counterexample in
//! that order is reported, also by the sharded verifier.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::digraph::{DiGraph, EdgeId, SccScratch};
use crate::error::{capability, input, Error, Result};
use crate::faults::{count_fault_sets, ensure_within_limit, fault_limit, for_each_subset_in_range, FaultSet};
use crate::flowcut::symmetric_filtered;
use crate::preservers::{first_broken, is_ft_critical, Broken, VariantSpec};

/// Default vertex limit for the cut-based verifiers.
pub const DEFAULT_CUT_VERIFY_LIMIT: usize = 10;

/// Per-vertex bound of the bounded-degree fault model checked by [`verify_bounded_degree_witness`].
pub const DEGREE_FAULT_BOUND: usize = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FtCounterexample {
    /// The separated pair; absent for the global variant.
    pub pair: Option<(usize, usize)>,
    pub faults: FaultSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FtReport {
    pub ok: bool,
    pub counterexample: Option<FtCounterexample>,
    pub fault_sets_checked: u128,
}

fn kept_mask(g: &DiGraph, kept: &BTreeSet<EdgeId>) -> Result<Vec<bool>> {
    g.slot_mask(kept).map_err(|e| match e {
        Error::Input(msg) => Error::Input(format!("kept edges must be edges of the graph: {msg}")),
        other => other,
    })
}

/// First failing fault set with graded colex index in `start..start + len`.
fn scan(
    g: &DiGraph,
    in_h: &[bool],
    spec: &VariantSpec,
    k: usize,
    start: u128,
    len: u128,
) -> Option<(u128, Broken, Vec<usize>)> {
    let mut dead = vec![false; g.m()];
    let mut sg = SccScratch::new(g.n());
    let mut sh = SccScratch::new(g.n());
    let mut index = start;
    let mut found = None;
    let _ = for_each_subset_in_range(g.m(), k, start, len, |f| {
        for &s in f {
            dead[s] = true;
        }
        let cg = sg.run(g, |s| !dead[s]);
        let ch = sh.run(g, |s| in_h[s] && !dead[s]);
        let broken = first_broken(spec, sg.labels(), cg, sh.labels(), ch);
        for &s in f {
            dead[s] = false;
        }
        if let Some(b) = broken {
            found = Some((index, b, f.to_vec()));
            return ControlFlow::Break(());
        }
        index += 1;
        ControlFlow::Continue(())
    });
    found
}

fn report(g: &DiGraph, total: u128, hit: Option<(u128, Broken, Vec<usize>)>) -> FtReport {
    match hit {
        None => FtReport { ok: true, counterexample: None, fault_sets_checked: total },
        Some((index, pair, f)) => FtReport {
            ok: false,
            counterexample: Some(FtCounterexample { pair, faults: f.iter().map(|&s| g.edges()[s].id).collect() }),
            fault_sets_checked: index + 1,
        },
    }
}

/// Checks that `kept` is a `k`-fault-tolerant preserver of `g` for the given variant.
pub fn verify_ft(g: &DiGraph, kept: &BTreeSet<EdgeId>, spec: &VariantSpec, k: usize) -> Result<FtReport> {
    verify_ft_with_limit(g, kept, spec, k, fault_limit())
}

pub fn verify_ft_with_limit(
    g: &DiGraph,
    kept: &BTreeSet<EdgeId>,
    spec: &VariantSpec,
    k: usize,
    limit: u128,
) -> Result<FtReport> {
    spec.validate(g)?;
    let in_h = kept_mask(g, kept)?;
    ensure_within_limit(g.m(), k, limit, "fault-tolerance verification")?;
    let total = count_fault_sets(g.m(), k);
    Ok(report(g, total, scan(g, &in_h, spec, k, 0, total)))
}

/// Same verdict and counterexample as [`verify_ft`], with the fault sets split into
/// contiguous ranges checked on separate threads.
pub fn verify_ft_sharded(
    g: &DiGraph,
    kept: &BTreeSet<EdgeId>,
    spec: &VariantSpec,
    k: usize,
    shards: usize,
) -> Result<FtReport> {
    spec.validate(g)?;
    let in_h = kept_mask(g, kept)?;
    ensure_within_limit(g.m(), k, fault_limit(), "fault-tolerance verification")?;
    let total = count_fault_sets(g.m(), k);
    let shards = shards.max(1) as u128;
    let hits: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..shards)
            .map(|i| {
                let (lo, hi) = (total * i / shards, total * (i + 1) / shards);
                let in_h = &in_h;
                scope.spawn(move || scan(g, in_h, spec, k, lo, hi - lo))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("verification shard panicked")).collect()
    });
    let first = hits.into_iter().flatten().min_by_key(|(index, _, _)| *index);
    Ok(report(g, total, first))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KconnCounterexample {
    pub pair: (usize, usize),
    pub expected: usize,
    pub found: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KconnReport {
    pub ok: bool,
    pub counterexample: Option<KconnCounterexample>,
}

/// `λ^k` for every unordered pair, as a symmetric matrix with zero diagonal.
pub(crate) fn capped_connectivity_matrix(g: &DiGraph, keep: impl Fn(usize) -> bool + Copy, k: usize) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut lam = vec![vec![0; n]; n];
    for s in 0..n {
        for t in s + 1..n {
            let v = symmetric_filtered(g, keep, s, t, k);
            lam[s][t] = v;
            lam[t][s] = v;
        }
    }
    lam
}

/// Checks `λ^k_H(s, t) = λ^k_G(s, t)` for every pair.
pub fn verify_kconn(g: &DiGraph, kept: &BTreeSet<EdgeId>, k: usize) -> Result<KconnReport> {
    let in_h = kept_mask(g, kept)?;
    let n = g.n();
    for s in 0..n {
        for t in s + 1..n {
            let expected = symmetric_filtered(g, |_| true, s, t, k);
            let found = symmetric_filtered(g, |e| in_h[e], s, t, k);
            if expected != found {
                return Ok(KconnReport {
                    ok: false,
                    counterexample: Some(KconnCounterexample { pair: (s, t), expected, found }),
                });
            }
        }
    }
    Ok(KconnReport { ok: true, counterexample: None })
}

/// The exact set of edges that are critical in `g` for the variant.
pub fn enumerate_critical_edges(g: &DiGraph, spec: &VariantSpec, k: usize) -> Result<BTreeSet<EdgeId>> {
    let mut out = BTreeSet::new();
    for id in g.edge_ids() {
        if is_ft_critical(g, id, spec, k)?.is_some() {
            out.insert(id);
        }
    }
    Ok(out)
}

/// Every vertex side with its out-boundary as a slot bitmask.
fn all_boundaries(g: &DiGraph, vertex_limit: usize) -> Result<Vec<u128>> {
    let n = g.n();
    if n > vertex_limit.min(20) {
        return capability(format!("cut-based verification over {n} vertices exceeds the limit of {vertex_limit}"));
    }
    if g.m() > 128 {
        return capability(format!("cut-based verification supports at most 128 edges, got {}", g.m()));
    }
    Ok((0..1u64 << n)
        .map(|side| {
            g.edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| side >> e.tail & 1 == 1 && side >> e.head & 1 == 0)
                .fold(0u128, |acc, (slot, _)| acc | 1 << slot)
        })
        .collect())
}

/// Classes of vertices that no side with boundary strictly inside `b` separates.
fn unseparated_classes(n: usize, boundaries: &[u128], b: u128) -> Vec<usize> {
    let mut class = vec![0usize; n];
    let mut remap = std::collections::HashMap::new();
    for (side, &other) in boundaries.iter().enumerate() {
        if other == b || other & !b != 0 {
            continue;
        }
        remap.clear();
        for (v, c) in class.iter_mut().enumerate() {
            let key = (*c, side >> v & 1);
            let fresh = remap.len();
            *c = *remap.entry(key).or_insert(fresh);
        }
    }
    class
}

/// Pairs `(s, t)` with `s` inside `side`, `t` outside, for which `side` is a minimal symmetric cut.
fn minimal_pairs(n: usize, boundaries: &[u128], side: usize) -> Vec<(usize, usize)> {
    let class = unseparated_classes(n, boundaries, boundaries[side]);
    let inside = |v: usize| side >> v & 1 == 1;
    (0..n)
        .filter(|&s| inside(s))
        .flat_map(|s| (0..n).filter(move |&t| !inside(t)).map(move |t| (s, t)))
        .filter(|&(s, t)| class[s] == class[t])
        .collect()
}

fn kept_bits(g: &DiGraph, kept: &BTreeSet<EdgeId>) -> Result<u128> {
    Ok(kept_mask(g, kept)?.iter().enumerate().filter(|(_, &b)| b).fold(0u128, |acc, (s, _)| acc | 1 << s))
}

/// All-pairs fault tolerance decided on minimal symmetric cuts: each must keep its size in the
/// subgraph, both sizes clamped at `k + 1`.
pub fn verify_ft_by_cuts(g: &DiGraph, kept: &BTreeSet<EdgeId>, k: usize) -> Result<bool> {
    verify_ft_by_cuts_with_limit(g, kept, k, DEFAULT_CUT_VERIFY_LIMIT)
}

pub fn verify_ft_by_cuts_with_limit(g: &DiGraph, kept: &BTreeSet<EdgeId>, k: usize, vertex_limit: usize) -> Result<bool> {
    let boundaries = all_boundaries(g, vertex_limit)?;
    let h = kept_bits(g, kept)?;
    for (side, &b) in boundaries.iter().enumerate() {
        let in_g = (b.count_ones() as usize).min(k + 1);
        let in_h = ((b & h).count_ones() as usize).min(k + 1);
        if in_g != in_h && !minimal_pairs(g.n(), &boundaries, side).is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Capped connectivity decided on minimal symmetric cuts: each minimal symmetric
/// `(s, t)`-cut must keep at least `λ^k_G(s, t)` edges in the subgraph.
pub fn verify_kconn_by_cuts(g: &DiGraph, kept: &BTreeSet<EdgeId>, k: usize) -> Result<bool> {
    verify_kconn_by_cuts_with_limit(g, kept, k, DEFAULT_CUT_VERIFY_LIMIT)
}

pub fn verify_kconn_by_cuts_with_limit(g: &DiGraph, kept: &BTreeSet<EdgeId>, k: usize, vertex_limit: usize) -> Result<bool> {
    let boundaries = all_boundaries(g, vertex_limit)?;
    let h = kept_bits(g, kept)?;
    let lam = capped_connectivity_matrix(g, |_| true, k);
    for (side, &b) in boundaries.iter().enumerate() {
        let in_h = (b & h).count_ones() as usize;
        if in_h >= k {
            continue;
        }
        if minimal_pairs(g.n(), &boundaries, side).into_iter().any(|(s, t)| lam[s][t] > in_h) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn strongly_connected_pair(g: &DiGraph, s: usize, y: usize, keep: impl Fn(usize) -> bool + Copy) -> bool {
    g.reach_from(&[s], keep)[y] && g.reach_from(&[y], keep)[s]
}

fn witness_holds(g: &DiGraph, kept: &BTreeSet<EdgeId>, cross: EdgeId, dead: &[bool], s: usize, y: usize) -> Result<bool> {
    let cross_slot = g.slot(cross).ok_or_else(|| Error::Input(format!("unknown cross edge {cross}")))?;
    kept_mask(g, kept)?;
    let before = strongly_connected_pair(g, s, y, |e| !dead[e]);
    let after = strongly_connected_pair(g, s, y, |e| !dead[e] && e != cross_slot);
    Ok(before && !after && kept.contains(&cross))
}

/// Checks that `faults` obeys the bounded-degree model (at most one failed edge at any vertex)
/// and shows `cross` is needed: `s` and `y` are strongly connected in `g - F` but not in
/// `g - cross - F`. Also requires `cross` to be kept.
pub fn verify_bounded_degree_witness(
    g: &DiGraph,
    kept: &BTreeSet<EdgeId>,
    cross: EdgeId,
    faults: &FaultSet,
    s: usize,
    y: usize,
) -> Result<bool> {
    g.check_vertex(s)?;
    g.check_vertex(y)?;
    let dead = g.slot_mask(faults)?;
    let mut load = vec![0usize; g.n()];
    for id in faults {
        let e = g.edge(*id).expect("fault ids were validated");
        load[e.tail] += 1;
        if e.head != e.tail {
            load[e.head] += 1;
        }
    }
    if let Some(v) = (0..g.n()).find(|&v| load[v] > DEGREE_FAULT_BOUND) {
        return input(format!("{} failed edges touch vertex {v}; the model allows {DEGREE_FAULT_BOUND}", load[v]));
    }
    witness_holds(g, kept, cross, &dead, s, y)
}

/// Checks that failing every edge of `color` leaves `s` and `y` strongly connected while also
/// failing `cross` separates them. Also requires `cross` to be kept.
pub fn verify_color_witness(
    g: &DiGraph,
    kept: &BTreeSet<EdgeId>,
    cross: EdgeId,
    color: u32,
    s: usize,
    y: usize,
) -> Result<bool> {
    g.check_vertex(s)?;
    g.check_vertex(y)?;
    let dead: Vec<bool> = g.edges().iter().map(|e| e.color == Some(color)).collect();
    if !dead.iter().any(|&d| d) {
        return input(format!("no edge has color {color}"));
    }
    witness_holds(g, kept, cross, &dead, s, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> DiGraph {
        DiGraph::from_pairs(3, [(0, 1), (1, 2), (2, 0), (1, 0), (2, 1), (0, 2)]).unwrap()
    }

    #[test]
    fn identity_passes() {
        let g = triangle();
        let all = g.edge_id_set();
        assert!(verify_ft(&g, &all, &VariantSpec::AllPairs, 2).unwrap().ok);
        assert!(verify_kconn(&g, &all, 2).unwrap().ok);
        assert!(verify_ft_by_cuts(&g, &all, 2).unwrap());
        assert!(verify_kconn_by_cuts(&g, &all, 2).unwrap());
    }

    #[test]
    fn triangle_minus_arc() {
        let g = triangle();
        let kept: BTreeSet<EdgeId> = (1..6).map(EdgeId).collect();
        let r = verify_ft(&g, &kept, &VariantSpec::AllPairs, 1).unwrap();
        assert!(!r.ok);
        assert!(!verify_ft_by_cuts(&g, &kept, 1).unwrap());
        let kc = verify_kconn(&g, &kept, 2).unwrap();
        assert_eq!(kc.counterexample.unwrap().pair, (0, 1));
        assert!(!verify_kconn_by_cuts(&g, &kept, 2).unwrap());
    }

    #[test]
    fn cycle_is_a_one_connectivity_preserver() {
        let g = triangle();
        let cycle = BTreeSet::from([EdgeId(0), EdgeId(1), EdgeId(2)]);
        assert!(verify_kconn(&g, &cycle, 1).unwrap().ok);
        assert!(verify_ft(&g, &cycle, &VariantSpec::AllPairs, 0).unwrap().ok);
    }

    #[test]
    fn sharded_matches_sequential() {
        let g = triangle();
        let kept: BTreeSet<EdgeId> = [0, 1, 2, 4].into_iter().map(EdgeId).collect();
        let seq = verify_ft(&g, &kept, &VariantSpec::AllPairs, 2).unwrap();
        for shards in 1..6 {
            assert_eq!(verify_ft_sharded(&g, &kept, &VariantSpec::AllPairs, 2, shards).unwrap(), seq);
        }
    }

    #[test]
    fn unknown_kept_edge_is_an_error() {
        let g = triangle();
        assert!(verify_ft(&g, &BTreeSet::from([EdgeId(9)]), &VariantSpec::Global, 0).is_err());
    }

    #[test]
    fn degree_model_violation() {
        let g = DiGraph::from_pairs(3, [(0, 1), (1, 2), (2, 0), (1, 0)]).unwrap();
        let all = g.edge_id_set();
        let f = BTreeSet::from([EdgeId(0), EdgeId(1)]);
        assert!(verify_bounded_degree_witness(&g, &all, EdgeId(2), &f, 0, 1).is_err());
    }
}
