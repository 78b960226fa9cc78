//! Preservers of capped symmetric edge connectivity `λ^k(s, t) = min(flow(s, t), flow(t, s), k)`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{DiGraph, EdgeId};
use crate::error::{input, Result};
use crate::expander::is_unbreakable;
use crate::flowcut::{symmetric_filtered, Cut};
use crate::preservers::{PreserverResult, PreserverStats, Variant};
use crate::verify::capped_connectivity_matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandPair {
    pub u: usize,
    pub v: usize,
    pub lambda: usize,
}

/// Pairs forming a maximum spanning tree of the complete graph weighted by `λ^k`. The
/// connectivity of any pair equals the minimum weight on its tree path, so keeping these
/// pairs' connectivity keeps every pair's.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandPairs {
    pub k: usize,
    pub pairs: Vec<DemandPair>,
}

impl DemandPairs {
    /// Minimum pair weight along the tree path from `s` to `t`.
    pub fn path_min(&self, n: usize, s: usize, t: usize) -> Option<usize> {
        let mut adj = vec![Vec::new(); n];
        for p in &self.pairs {
            adj[p.u].push((p.v, p.lambda));
            adj[p.v].push((p.u, p.lambda));
        }
        let mut best = vec![None; n];
        best[s] = Some(usize::MAX);
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            let here = best[x].expect("visited");
            for &(y, w) in &adj[x] {
                if best[y].is_none() {
                    best[y] = Some(here.min(w));
                    stack.push(y);
                }
            }
        }
        best[t]
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            y = std::mem::replace(&mut self.0[y], r);
        }
        r
    }
}

fn tree_from_matrix(lam: &[Vec<usize>], k: usize) -> DemandPairs {
    let n = lam.len();
    let mut candidates: Vec<DemandPair> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .map(|(u, v)| DemandPair { u, v, lambda: lam[u][v] })
        .collect();
    candidates.sort_by(|a, b| b.lambda.cmp(&a.lambda).then(a.u.cmp(&b.u)).then(a.v.cmp(&b.v)));
    let mut uf = UnionFind((0..n).collect());
    let pairs = candidates
        .into_iter()
        .filter(|p| {
            let (a, b) = (uf.find(p.u), uf.find(p.v));
            a != b && {
                uf.0[a] = b;
                true
            }
        })
        .collect();
    DemandPairs { k, pairs }
}

/// Maximum spanning tree over all pairs weighted by `λ^k`, ties broken by heavier weight
/// first, then smaller endpoints. Pairs of weight zero are included, so there are `n - 1`.
pub fn demand_pairs(g: &DiGraph, k: usize) -> DemandPairs {
    tree_from_matrix(&capped_connectivity_matrix(g, |_| true, k), k)
}

/// Removes edges in ascending id order while capped connectivity is unchanged, until a full
/// pass removes nothing. With `use_demand_pairs` only the current demand pairs are checked,
/// which gives the same result.
pub fn greedy_kconn_preserver(g: &DiGraph, k: usize, use_demand_pairs: bool) -> Result<PreserverResult> {
    let n = g.n();
    let m = g.m();
    let mut alive = vec![true; m];
    let mut stats = PreserverStats { input_edges: m, ..PreserverStats::default() };
    let all_pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut targets = current_targets(g, &alive, k, use_demand_pairs, &all_pairs);
    loop {
        stats.passes += 1;
        let mut removed = false;
        for e in 0..m {
            if !alive[e] {
                continue;
            }
            stats.criticality_checks += 1;
            alive[e] = false;
            let view = &alive;
            let keeps = targets.iter().all(|&(u, v, lam)| symmetric_filtered(g, |s| view[s], u, v, k) == lam);
            if keeps {
                removed = true;
                targets = current_targets(g, &alive, k, use_demand_pairs, &all_pairs);
            } else {
                alive[e] = true;
            }
        }
        if !removed {
            break;
        }
    }
    let kept_edges: BTreeSet<EdgeId> = (0..m).filter(|&s| alive[s]).map(|s| g.edges()[s].id).collect();
    stats.output_edges = kept_edges.len();
    Ok(PreserverResult {
        kept_edges,
        variant: Variant::KConnectivity,
        spec: None,
        k,
        stats,
        provenance: if use_demand_pairs { "greedy-kconn-demand-pairs" } else { "greedy-kconn" }.into(),
    })
}

fn current_targets(
    g: &DiGraph,
    alive: &[bool],
    k: usize,
    use_demand_pairs: bool,
    all_pairs: &[(usize, usize)],
) -> Vec<(usize, usize, usize)> {
    if use_demand_pairs {
        let lam = capped_connectivity_matrix(g, |s| alive[s], k);
        tree_from_matrix(&lam, k).pairs.into_iter().map(|p| (p.u, p.v, p.lambda)).collect()
    } else {
        all_pairs.iter().map(|&(u, v)| (u, v, symmetric_filtered(g, |s| alive[s], u, v, k))).collect()
    }
}

/// `⌈√(n k)⌉`, the part-size threshold that balances the decomposition.
pub fn default_q(n: usize, k: usize) -> usize {
    let target = n * k;
    let mut q = 0usize;
    while q * q < target {
        q += 1;
    }
    q.max(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnbreakabilityDecomposition {
    pub parts: Vec<BTreeSet<usize>>,
    /// The cuts used for the splits, in the order they were applied.
    pub cuts: Vec<Cut>,
    pub q: usize,
    pub k: usize,
}

/// Splits vertex parts along cuts of at most `k` edges until every part with at least `2q`
/// vertices is `(q - 1, k)`-unbreakable in `g`.
pub fn unbreakability_decomposition(g: &DiGraph, q: usize, k: usize) -> Result<UnbreakabilityDecomposition> {
    if q == 0 {
        return input("q must be positive");
    }
    let mut parts: Vec<BTreeSet<usize>> = if g.n() == 0 { Vec::new() } else { vec![(0..g.n()).collect()] };
    let mut cuts = Vec::new();
    let mut i = 0;
    while i < parts.len() {
        if parts[i].len() < 2 * q {
            i += 1;
            continue;
        }
        let members: Vec<usize> = parts[i].iter().copied().collect();
        let r = is_unbreakable(g, &members, q - 1, k)?;
        match r.witness {
            None => i += 1,
            Some(cut) => {
                let inside: BTreeSet<usize> = parts[i].intersection(&cut.side).copied().collect();
                let outside: BTreeSet<usize> = parts[i].difference(&cut.side).copied().collect();
                parts[i] = inside;
                parts.insert(i + 1, outside);
                cuts.push(cut);
            }
        }
    }
    Ok(UnbreakabilityDecomposition { parts, cuts, q, k })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutBoundReport {
    /// `4 k |P|` with `P` the demand pairs.
    pub bound: usize,
    pub cuts_checked: u64,
    pub exhaustive: bool,
    /// Sides `L` with `|δ+(L)| <= k` but more than `bound` entering edges.
    pub violations: Vec<BTreeSet<usize>>,
}

/// Largest vertex count for which [`check_kcritical_cut_bound`] enumerates all sides.
pub const CUT_BOUND_EXHAUSTIVE_LIMIT: usize = 16;

/// Compares the in-boundary of every small out-cut against `4 k |P|`. Violations are
/// reported, not treated as errors. Beyond [`CUT_BOUND_EXHAUSTIVE_LIMIT`] vertices,
/// `samples` random sides are checked instead.
pub fn check_kcritical_cut_bound(h: &DiGraph, k: usize, samples: u64, seed: u64) -> Result<CutBoundReport> {
    let n = h.n();
    let pairs = demand_pairs(h, k).pairs.len();
    let bound = 4 * k * pairs;
    let mut report = CutBoundReport { bound, cuts_checked: 0, exhaustive: n <= CUT_BOUND_EXHAUSTIVE_LIMIT, violations: Vec::new() };
    let check = |side: &[bool], report: &mut CutBoundReport| {
        let out = h.edges().iter().filter(|e| side[e.tail] && !side[e.head]).count();
        if out > k {
            return;
        }
        report.cuts_checked += 1;
        let inc = h.edges().iter().filter(|e| !side[e.tail] && side[e.head]).count();
        if inc > bound {
            report.violations.push((0..n).filter(|&v| side[v]).collect());
        }
    };
    if n < 2 {
        return Ok(report);
    }
    if report.exhaustive {
        for mask in 1u64..(1 << n) - 1 {
            let side: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
            check(&side, &mut report);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let side: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            if side.iter().all(|&b| b) || !side.iter().any(|&b| b) {
                continue;
            }
            check(&side, &mut report);
        }
    }
    Ok(report)
}
