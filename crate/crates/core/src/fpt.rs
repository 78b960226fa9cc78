//! Randomized containers for fault-critical edges and the preserver built from them.
//!
//! For a terminal set `U` that is `(q, 2^k)`-unbreakable, the container holds a union of
//! single-source preservers rooted at up to `5q²` terminals plus, for every vertex `v`, the
//! boundaries of important cuts between `v` and the terminals that sampled important cuts
//! place next to `v`. With high probability it holds every edge that is `k`-fault critical
//! for the pairs `U × V`.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{DiGraph, EdgeId};
use crate::error::{Error, Result};
use crate::expander::{build_hierarchy, HierarchyParams, Phi, DEFAULT_EXACT_CUT_LIMIT};
use crate::faults::{count_fault_sets, fault_limit};
use crate::flowcut::Direction;
use crate::impcut::{important_cut_container, ContainerOutcome};
use crate::preservers::{is_ft_critical, sscp, PreserverResult, PreserverStats, Variant, VariantSpec};
use crate::verify::verify_ft;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FptConfig {
    /// Multiplier on `2^k √ln n` when choosing the unbreakability parameter `q`.
    pub q_scale: f64,
    pub exact_cut_limit: usize,
    /// Confirm each removal with the exhaustive criticality test; critical edges are kept.
    pub check_removals: bool,
    /// Verify the output exhaustively when feasible and rerun with a fresh seed on failure.
    pub verify_output: bool,
    pub max_reseeds: usize,
}

impl Default for FptConfig {
    fn default() -> Self {
        Self {
            q_scale: 1.0,
            exact_cut_limit: DEFAULT_EXACT_CUT_LIMIT,
            check_removals: false,
            verify_output: true,
            max_reseeds: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalContainerReport {
    pub edges: BTreeSet<EdgeId>,
    /// `U_i` for every vertex `v_i`.
    pub per_vertex_terminals: BTreeMap<usize, BTreeSet<usize>>,
    pub sampled_sets: Vec<BTreeSet<usize>>,
    pub sample_count: usize,
    pub rng_seed: u64,
    /// Number of edges in the union of single-source preservers.
    pub j_union: usize,
    /// For every vertex, the number of samples that contained it and were therefore skipped.
    pub skip_counts: Vec<usize>,
    pub q: usize,
    pub k: usize,
}

/// `max(1, ⌈50 ln n⌉)`.
pub fn sample_count(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    ((50.0 * (n as f64).ln()).ceil() as usize).max(1)
}

fn boundary_or_nothing(outcome: ContainerOutcome) -> BTreeSet<EdgeId> {
    match outcome {
        ContainerOutcome::Container(c) => c.boundary,
        ContainerOutcome::NoSmallCut { .. } => BTreeSet::new(),
    }
}

fn side_or_nothing(outcome: ContainerOutcome) -> BTreeSet<usize> {
    match outcome {
        ContainerOutcome::Container(c) => c.side,
        ContainerOutcome::NoSmallCut { .. } => BTreeSet::new(),
    }
}

/// Container for the edges that are `k`-fault critical for the pairs `terminals × V`,
/// assuming the terminals are `(q, 2^k)`-unbreakable in `g`.
pub fn critical_edge_container(
    g: &DiGraph,
    terminals: &[usize],
    q: usize,
    k: usize,
    seed: u64,
) -> Result<CriticalContainerReport> {
    for &t in terminals {
        g.check_vertex(t)?;
    }
    let u: Vec<usize> = terminals.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let n = g.n();
    let lambda = sample_count(n);
    let mut edges = BTreeSet::new();
    for &root in u.iter().take((5 * q * q).min(u.len())) {
        edges.extend(sscp(g, root, k)?.kept_edges);
    }
    let j_union = edges.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampled_sets: Vec<BTreeSet<usize>> = (0..lambda)
        .map(|_| {
            if u.len() <= q {
                u.iter().copied().collect()
            } else {
                sample(&mut rng, u.len(), q).into_iter().map(|i| u[i]).collect()
            }
        })
        .collect();
    let distinct: BTreeSet<&BTreeSet<usize>> = sampled_sets.iter().collect();
    let is_terminal: BTreeSet<usize> = u.iter().copied().collect();

    let mut per_vertex_terminals = BTreeMap::new();
    let mut skip_counts = vec![0usize; n];
    for v in 0..n {
        skip_counts[v] = sampled_sets.iter().filter(|qj| qj.contains(&v)).count();
        let mut near = BTreeSet::new();
        for qj in distinct.iter().filter(|qj| !qj.is_empty() && !qj.contains(&v)) {
            let sinks: Vec<usize> = qj.iter().copied().collect();
            for dir in [Direction::Out, Direction::In] {
                near.extend(side_or_nothing(important_cut_container(g, &[v], &sinks, k, dir)?));
            }
        }
        let near: BTreeSet<usize> = near.intersection(&is_terminal).copied().collect();
        if near.len() > 2 * lambda * q {
            return Err(Error::Precondition(format!(
                "vertex {v} collected {} terminals, more than 2 λ q = {}; the terminal set is not unbreakable",
                near.len(),
                2 * lambda * q
            )));
        }
        for &t in near.iter().filter(|&&t| t != v) {
            for dir in [Direction::Out, Direction::In] {
                edges.extend(boundary_or_nothing(important_cut_container(g, &[t], &[v], k + 1, dir)?));
            }
        }
        per_vertex_terminals.insert(v, near);
    }
    Ok(CriticalContainerReport {
        edges,
        per_vertex_terminals,
        sampled_sets,
        sample_count: lambda,
        rng_seed: seed,
        j_union,
        skip_counts,
        q,
        k,
    })
}

/// `max(⌈scale · 2^k √max(1, ln n)⌉, 2^(k+1))`; the floor keeps `2^k / q <= 1/2`.
pub fn hierarchy_q(n: usize, k: usize, scale: f64) -> usize {
    let base = 1usize << k;
    let ln = (n.max(1) as f64).ln().max(1.0);
    let q = (scale * base as f64 * ln.sqrt()).ceil() as usize;
    q.max(2 * base)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FptContainerReport {
    pub edges: BTreeSet<EdgeId>,
    pub q: usize,
    pub hierarchy_k: usize,
    pub phi: Phi,
    pub levels: usize,
    /// Container size contributed by each level, lowest level first.
    pub level_container_sizes: Vec<usize>,
    pub sample_count: usize,
    pub components: Vec<CriticalContainerReport>,
}

pub fn fpt_container_all_pairs(g: &DiGraph, k: usize, seed: u64) -> Result<FptContainerReport> {
    fpt_container_all_pairs_with(g, k, seed, &FptConfig::default())
}

/// Union of critical-edge containers over the components of an expander hierarchy whose
/// terminal sets are `(q, 2^k)`-unbreakable.
pub fn fpt_container_all_pairs_with(g: &DiGraph, k: usize, seed: u64, cfg: &FptConfig) -> Result<FptContainerReport> {
    let hierarchy_k = 1usize << k;
    let q = hierarchy_q(g.n(), k, cfg.q_scale);
    let phi = Phi::new(hierarchy_k as u64, q as u64);
    let mut params = HierarchyParams::new(q, hierarchy_k, phi)?;
    params.exact_cut_limit = cfg.exact_cut_limit;
    params.verify_certificates = false;
    let h = build_hierarchy(g, &params)?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = BTreeSet::new();
    let mut level_container_sizes = vec![0usize; h.level_count()];
    let mut components = Vec::with_capacity(h.certificates.len());
    for cert in &h.certificates {
        let vertices: Vec<usize> = cert.component.iter().copied().collect();
        let ind = g.induced(&vertices)?;
        let local: Vec<usize> = cert.terminals.iter().map(|&v| ind.local(v).expect("terminal inside component")).collect();
        let report = critical_edge_container(&ind.graph, &local, q, k, master.next_u64())?;
        level_container_sizes[cert.level - 1] += report.edges.len();
        edges.extend(report.edges.iter().copied());
        components.push(report);
    }
    Ok(FptContainerReport {
        edges,
        q,
        hierarchy_k,
        phi,
        levels: h.level_count(),
        level_container_sizes,
        sample_count: sample_count(g.n()),
        components,
    })
}

pub fn fpt_preserver(g: &DiGraph, k: usize, seed: u64, stop_threshold: Option<usize>) -> Result<PreserverResult> {
    fpt_preserver_with(g, k, seed, stop_threshold, &FptConfig::default())
}

/// Seed of the first container drawn by [`fpt_preserver`] for `seed`, so that container can be
/// recomputed on its own.
pub fn first_container_seed(seed: u64) -> u64 {
    ChaCha8Rng::seed_from_u64(seed).next_u64()
}

struct Run {
    alive: Vec<bool>,
    iterations: usize,
    rejected: usize,
}

fn run_once(g: &DiGraph, k: usize, seed: u64, stop: Option<usize>, cfg: &FptConfig) -> Result<Run> {
    let m = g.m();
    let mut alive = vec![true; m];
    let mut protected = vec![false; m];
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut iterations = 0;
    let mut rejected = 0;
    loop {
        let size = alive.iter().filter(|&&a| a).count();
        if stop.is_some_and(|t| size <= t) {
            break;
        }
        let h = g.restrict_to_slots(&alive);
        let container = fpt_container_all_pairs_with(&h, k, master.next_u64(), cfg)?.edges;
        iterations += 1;
        let candidate = (0..m).find(|&s| alive[s] && !protected[s] && !container.contains(&g.edges()[s].id));
        let Some(e) = candidate else { break };
        if cfg.check_removals && is_ft_critical(&h, g.edges()[e].id, &VariantSpec::AllPairs, k)?.is_some() {
            protected[e] = true;
            rejected += 1;
            continue;
        }
        alive[e] = false;
    }
    Ok(Run { alive, iterations, rejected })
}

/// Removes the lowest-id edge outside the current container until every remaining edge is
/// inside it or `stop_threshold` edges remain.
pub fn fpt_preserver_with(
    g: &DiGraph,
    k: usize,
    seed: u64,
    stop_threshold: Option<usize>,
    cfg: &FptConfig,
) -> Result<PreserverResult> {
    let can_verify = cfg.verify_output && count_fault_sets(g.m(), k) <= fault_limit();
    let mut current = seed;
    let mut reseeds = 0;
    loop {
        let run = run_once(g, k, current, stop_threshold, cfg)?;
        let kept_edges: BTreeSet<EdgeId> = (0..g.m()).filter(|&s| run.alive[s]).map(|s| g.edges()[s].id).collect();
        let verified = if can_verify { Some(verify_ft(g, &kept_edges, &VariantSpec::AllPairs, k)?.ok) } else { None };
        if verified == Some(false) && reseeds < cfg.max_reseeds {
            reseeds += 1;
            current = ChaCha8Rng::seed_from_u64(current).next_u64();
            continue;
        }
        let stats = PreserverStats {
            input_edges: g.m(),
            output_edges: kept_edges.len(),
            passes: run.iterations,
            criticality_checks: run.rejected as u64,
            fault_sets_examined: 0,
            seed: Some(current),
            reseeds,
            verified,
        };
        return Ok(PreserverResult {
            kept_edges,
            variant: Variant::AllPairs,
            spec: Some(VariantSpec::AllPairs),
            k,
            stats,
            provenance: "fpt".into(),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_count_law() {
        assert_eq!(sample_count(1), 1);
        assert_eq!(sample_count(8), 104);
        assert_eq!(sample_count(100), 231);
    }

    #[test]
    fn q_floor() {
        assert_eq!(hierarchy_q(8, 1, 1.0), 4);
        assert_eq!(hierarchy_q(1000, 1, 1.0), 6);
        assert_eq!(hierarchy_q(8, 2, 1.0), 8);
    }

    #[test]
    fn cycle_container_is_everything() {
        let g = DiGraph::from_pairs(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let c = fpt_container_all_pairs(&g, 1, 3).unwrap();
        assert_eq!(c.edges, g.edge_id_set());
        let p = fpt_preserver(&g, 1, 3, None).unwrap();
        assert_eq!(p.kept_edges, g.edge_id_set());
    }
}
