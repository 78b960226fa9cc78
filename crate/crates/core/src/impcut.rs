//! Containers for important cuts and the anti-isolation check.
//!
//! The container is grown by repeatedly taking the farthest minimum cut and adding, for
//! every edge leaving it, a unit arc from the super-source to that edge's head. After
//! `k - λ` rounds the side contains every important cut of size at most `k`, and its
//! boundary has at most `λ · 2^(k - λ)` edges.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::digraph::{DiGraph, EdgeId};
use crate::error::{capability, input, Result};
use crate::flowcut::{boundary_of, check_terminals, Cut, Direction, FlowNetwork};

/// Default vertex limit for [`enumerate_important_cuts`].
pub const DEFAULT_ENUMERATION_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportantCutContainer {
    pub side: BTreeSet<usize>,
    pub direction: Direction,
    /// Boundary of `side` in the input graph.
    pub boundary: BTreeSet<EdgeId>,
    pub lambda: usize,
    pub k_star: usize,
    /// Sides of the rounds `0..=k_star`, each containing the previous one.
    pub chain: Vec<BTreeSet<usize>>,
    /// Flow value of each round; the boundary of round `i` in the augmented graph has this size.
    pub chain_flows: Vec<usize>,
}

impl ImportantCutContainer {
    pub fn cut(&self) -> Cut {
        Cut { side: self.side.clone(), direction: self.direction, boundary: self.boundary.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ContainerOutcome {
    /// The flow exceeds the budget, so no cut of size at most `k` exists.
    NoSmallCut { flow_at_least: usize },
    Container(ImportantCutContainer),
}

impl ContainerOutcome {
    pub fn container(&self) -> Option<&ImportantCutContainer> {
        match self {
            Self::Container(c) => Some(c),
            Self::NoSmallCut { .. } => None,
        }
    }
}

fn oriented(g: &DiGraph, direction: Direction) -> std::borrow::Cow<'_, DiGraph> {
    match direction {
        Direction::Out => std::borrow::Cow::Borrowed(g),
        Direction::In => std::borrow::Cow::Owned(g.reverse()),
    }
}

/// Side containing every important (X, Y)-cut of size at most `k` in the given direction.
pub fn important_cut_container(
    g: &DiGraph,
    xs: &[usize],
    ys: &[usize],
    k: usize,
    direction: Direction,
) -> Result<ContainerOutcome> {
    let (xs, ys) = check_terminals(g, xs, ys)?;
    let gd = oriented(g, direction);
    let gd = gd.as_ref();
    let mut net = FlowNetwork::new(gd, |_| true, &xs, &ys);
    let lambda = net.run(Some(k + 1));
    if lambda > k {
        return Ok(ContainerOutcome::NoSmallCut { flow_at_least: lambda });
    }
    let k_star = k - lambda;
    let mut side = net.sink_unreachable();
    let mut chain = vec![mask_to_set(&side)];
    let mut chain_flows = vec![lambda];
    let mut artificial_heads: Vec<usize> = Vec::new();
    for _ in 0..k_star {
        let mut fresh: Vec<usize> = gd
            .edges()
            .iter()
            .filter(|e| side[e.tail] && !side[e.head])
            .map(|e| e.head)
            .collect();
        fresh.extend(artificial_heads.iter().copied().filter(|&v| !side[v]));
        for &v in &fresh {
            net.add_source_arc(v);
        }
        artificial_heads.extend(fresh);
        net.run(None);
        side = net.sink_unreachable();
        chain.push(mask_to_set(&side));
        chain_flows.push(net.value());
    }
    Ok(ContainerOutcome::Container(ImportantCutContainer {
        side: mask_to_set(&side),
        direction,
        boundary: boundary_of(g, &side, direction),
        lambda,
        k_star,
        chain,
        chain_flows,
    }))
}

fn mask_to_set(mask: &[bool]) -> BTreeSet<usize> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect()
}

/// Every important (X, Y)-cut of size at most `k`, by exhaustive search over vertex sides.
/// Cuts are listed in ascending order of their side as a bitmask.
pub fn enumerate_important_cuts(
    g: &DiGraph,
    xs: &[usize],
    ys: &[usize],
    k: usize,
    direction: Direction,
    vertex_limit: usize,
) -> Result<Vec<Cut>> {
    let (xs, ys) = check_terminals(g, xs, ys)?;
    let n = g.n();
    if n > vertex_limit.min(30) {
        return capability(format!("important-cut enumeration over {n} vertices exceeds the limit of {vertex_limit}"));
    }
    let gd = oriented(g, direction);
    let gd = gd.as_ref();
    let x_mask: u64 = xs.iter().map(|&x| 1u64 << x).sum();
    let y_mask: u64 = ys.iter().map(|&y| 1u64 << y).sum();
    let mut reachable_sides: Vec<(u64, usize)> = Vec::new();
    for mask in 0..(1u64 << n) {
        if mask & x_mask != x_mask || mask & y_mask != 0 {
            continue;
        }
        if reach_within(gd, &xs, mask) != mask {
            continue;
        }
        let size = gd
            .edges()
            .iter()
            .filter(|e| mask >> e.tail & 1 == 1 && mask >> e.head & 1 == 0)
            .count();
        reachable_sides.push((mask, size));
    }
    let mut cuts = Vec::new();
    for &(mask, size) in &reachable_sides {
        if size > k {
            continue;
        }
        let dominated = reachable_sides
            .iter()
            .any(|&(other, other_size)| other != mask && other & mask == mask && other_size <= size);
        if !dominated {
            let side: BTreeSet<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            cuts.push(Cut::from_side(g, side, direction));
        }
    }
    Ok(cuts)
}

fn reach_within(g: &DiGraph, from: &[usize], mask: u64) -> u64 {
    let mut seen: u64 = 0;
    let mut stack = Vec::new();
    for &x in from {
        if seen >> x & 1 == 0 {
            seen |= 1 << x;
            stack.push(x);
        }
    }
    while let Some(v) = stack.pop() {
        for e in g.out_edges(v) {
            let w = e.head;
            if mask >> w & 1 == 1 && seen >> w & 1 == 0 {
                seen |= 1 << w;
                stack.push(w);
            }
        }
    }
    seen
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntiIsolation {
    /// Each fault set isolates its own sink: from the source, exactly that sink stays reachable.
    pub valid_instance: bool,
    pub sinks: usize,
    /// `!valid_instance || sinks <= 2^k`.
    pub bound_holds: bool,
}

/// Checks whether fault set `i` leaves exactly sink `i` reachable from `source`, for every `i`.
pub fn check_anti_isolation(
    g: &DiGraph,
    source: usize,
    sinks: &[usize],
    faults: &[BTreeSet<EdgeId>],
    k: usize,
) -> Result<AntiIsolation> {
    if sinks.len() != faults.len() {
        return input(format!("{} sinks but {} fault sets", sinks.len(), faults.len()));
    }
    g.check_vertex(source)?;
    let mut is_sink = vec![false; g.n()];
    for &t in sinks {
        g.check_vertex(t)?;
        if t == source || std::mem::replace(&mut is_sink[t], true) {
            return input(format!("sink {t} repeated or equal to the source"));
        }
    }
    let mut valid = true;
    for (&t, f) in sinks.iter().zip(faults) {
        if f.len() > k {
            return input(format!("fault set of size {} exceeds k = {k}", f.len()));
        }
        let dead = g.slot_mask(f)?;
        let reach = g.reach_from(&[source], |s| !dead[s]);
        let isolated = reach[t] && sinks.iter().all(|&u| u == t || !reach[u]);
        valid &= isolated;
    }
    let bound_holds = !valid || (k < usize::BITS as usize && sinks.len() <= 1usize << k);
    Ok(AntiIsolation { valid_instance: valid, sinks: sinks.len(), bound_holds })
}
