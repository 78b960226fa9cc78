//! Unit-capacity maximum flow, minimum and farthest minimum cuts, and reachability
//! canonicalisation of cuts.
//!
//! Multi-source and multi-sink instances are reduced to a single super-source and
//! super-sink whose arcs have capacity `m + 1`, so they never bind. Augmenting paths
//! are found by breadth-first search that scans arcs in ascending edge-id order, which
//! makes every flow and every cut returned here deterministic.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::digraph::{DiGraph, EdgeId};
use crate::error::{input, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

impl Direction {
    /// The direction that describes the same cut in the reversed graph.
    pub fn flip(self) -> Self {
        match self {
            Self::Out => Self::In,
            Self::In => Self::Out,
        }
    }
}

/// A vertex side together with its boundary: the edges leaving the side for
/// [`Direction::Out`], the edges entering it for [`Direction::In`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub side: BTreeSet<usize>,
    pub direction: Direction,
    pub boundary: BTreeSet<EdgeId>,
}

impl Cut {
    pub fn from_side(g: &DiGraph, side: BTreeSet<usize>, direction: Direction) -> Self {
        let mut mask = vec![false; g.n()];
        for &v in &side {
            mask[v] = true;
        }
        let boundary = boundary_of(g, &mask, direction);
        Self { side, direction, boundary }
    }

    pub(crate) fn from_mask(g: &DiGraph, mask: &[bool], direction: Direction) -> Self {
        let side = (0..g.n()).filter(|&v| mask[v]).collect();
        Self { side, direction, boundary: boundary_of(g, mask, direction) }
    }

    pub fn size(&self) -> usize {
        self.boundary.len()
    }
}

pub fn boundary_of(g: &DiGraph, in_side: &[bool], direction: Direction) -> BTreeSet<EdgeId> {
    g.edges()
        .iter()
        .filter(|e| match direction {
            Direction::Out => in_side[e.tail] && !in_side[e.head],
            Direction::In => !in_side[e.tail] && in_side[e.head],
        })
        .map(|e| e.id)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowValue {
    pub value: usize,
    /// Edge-disjoint paths from the sources to the sinks, one per unit of flow.
    pub witness_paths: Vec<Vec<EdgeId>>,
    /// The residual-reachable source side; absent when the flow was stopped at its cap.
    pub min_cut: Option<Cut>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ArcKind {
    Edge(usize),
    Terminal,
    Artificial,
}

#[derive(Clone, Copy, Debug)]
struct Arc {
    to: usize,
    cap: u32,
    initial: u32,
    rev: usize,
    kind: ArcKind,
}

/// Residual network over the vertices of a graph plus a super-source and super-sink.
pub(crate) struct FlowNetwork {
    n: usize,
    source: usize,
    sink: usize,
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    value: usize,
}

impl FlowNetwork {
    pub(crate) fn new(g: &DiGraph, keep: impl Fn(usize) -> bool, xs: &[usize], ys: &[usize]) -> Self {
        let n = g.n();
        let big = u32::try_from(g.m() + 1).expect("edge count fits in u32");
        let mut net = Self {
            n,
            source: n,
            sink: n + 1,
            arcs: Vec::with_capacity(2 * (g.m() + xs.len() + ys.len())),
            adj: vec![Vec::new(); n + 2],
            value: 0,
        };
        for &x in xs {
            net.add_arc(net.source, x, big, ArcKind::Terminal);
        }
        for (slot, e) in g.edges().iter().enumerate() {
            if keep(slot) && e.tail != e.head {
                net.add_arc(e.tail, e.head, 1, ArcKind::Edge(slot));
            }
        }
        for &y in ys {
            net.add_arc(y, net.sink, big, ArcKind::Terminal);
        }
        net
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u32, kind: ArcKind) {
        let a = self.arcs.len();
        self.arcs.push(Arc { to, cap, initial: cap, rev: a + 1, kind });
        self.arcs.push(Arc { to: from, cap: 0, initial: 0, rev: a, kind });
        self.adj[from].push(a);
        self.adj[to].push(a + 1);
    }

    /// Adds a unit arc from the super-source to `v`; the current flow stays feasible.
    pub(crate) fn add_source_arc(&mut self, v: usize) {
        self.add_arc(self.source, v, 1, ArcKind::Artificial);
    }

    pub(crate) fn value(&self) -> usize {
        self.value
    }

    fn augment_once(&mut self, pred: &mut [usize]) -> bool {
        pred.fill(usize::MAX);
        let mut queue = VecDeque::new();
        queue.push_back(self.source);
        pred[self.source] = usize::MAX - 1;
        while let Some(v) = queue.pop_front() {
            for &a in &self.adj[v] {
                let arc = self.arcs[a];
                if arc.cap > 0 && pred[arc.to] == usize::MAX {
                    pred[arc.to] = a;
                    if arc.to == self.sink {
                        let mut bottleneck = u32::MAX;
                        let mut w = self.sink;
                        while w != self.source {
                            let a = pred[w];
                            bottleneck = bottleneck.min(self.arcs[a].cap);
                            w = self.arcs[self.arcs[a].rev].to;
                        }
                        let mut w = self.sink;
                        while w != self.source {
                            let a = pred[w];
                            let r = self.arcs[a].rev;
                            self.arcs[a].cap -= bottleneck;
                            self.arcs[r].cap += bottleneck;
                            w = self.arcs[r].to;
                        }
                        self.value += bottleneck as usize;
                        return true;
                    }
                    queue.push_back(arc.to);
                }
            }
        }
        false
    }

    /// Augments until no path remains or the value reaches `cap`. Returns the value.
    pub(crate) fn run(&mut self, cap: Option<usize>) -> usize {
        let mut pred = vec![usize::MAX; self.n + 2];
        while cap.is_none_or(|c| self.value < c) {
            if !self.augment_once(&mut pred) {
                break;
            }
        }
        self.value
    }

    /// Original vertices reachable from the super-source in the residual network.
    pub(crate) fn source_side(&self) -> Vec<bool> {
        let mut seen = vec![false; self.n + 2];
        let mut stack = vec![self.source];
        seen[self.source] = true;
        while let Some(v) = stack.pop() {
            for &a in &self.adj[v] {
                let arc = self.arcs[a];
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen.truncate(self.n);
        seen
    }

    /// Original vertices that cannot reach the super-sink in the residual network.
    pub(crate) fn sink_unreachable(&self) -> Vec<bool> {
        let mut reaches = vec![false; self.n + 2];
        let mut stack = vec![self.sink];
        reaches[self.sink] = true;
        while let Some(v) = stack.pop() {
            // An arc u -> v with residual capacity is the reverse of some arc at v.
            for &a in &self.adj[v] {
                let back = self.arcs[self.arcs[a].rev];
                let u = self.arcs[a].to;
                if back.cap > 0 && !reaches[u] {
                    reaches[u] = true;
                    stack.push(u);
                }
            }
        }
        reaches.truncate(self.n);
        reaches.iter().map(|r| !r).collect()
    }

    /// Decomposes the current flow into edge-disjoint paths, dropping flow cycles.
    pub(crate) fn paths(&self, g: &DiGraph) -> Vec<Vec<EdgeId>> {
        let mut used = vec![0u32; self.arcs.len()];
        let mut pos = vec![usize::MAX; self.n + 2];
        let mut result = Vec::with_capacity(self.value);
        for _ in 0..self.value {
            let mut verts = vec![self.source];
            let mut arcs: Vec<usize> = Vec::new();
            pos[self.source] = 0;
            let mut v = self.source;
            while v != self.sink {
                let a = self.adj[v]
                    .iter()
                    .copied()
                    .filter(|&a| {
                        let arc = self.arcs[a];
                        arc.initial > 0 && arc.initial - arc.cap > used[a]
                    })
                    .max_by_key(|&a| self.arcs[a].to == self.sink)
                    .expect("flow conservation");
                used[a] += 1;
                let w = self.arcs[a].to;
                if pos[w] != usize::MAX {
                    let p = pos[w];
                    for &x in &verts[p + 1..] {
                        pos[x] = usize::MAX;
                    }
                    verts.truncate(p + 1);
                    arcs.truncate(p);
                } else {
                    pos[w] = verts.len();
                    verts.push(w);
                    arcs.push(a);
                }
                v = w;
            }
            for &x in &verts {
                pos[x] = usize::MAX;
            }
            result.push(
                arcs.iter()
                    .filter_map(|&a| match self.arcs[a].kind {
                        ArcKind::Edge(slot) => Some(g.edges()[slot].id),
                        _ => None,
                    })
                    .collect(),
            );
        }
        result
    }
}

pub(crate) fn check_terminals(g: &DiGraph, xs: &[usize], ys: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if xs.is_empty() || ys.is_empty() {
        return input("terminal sets must be nonempty");
    }
    let mut in_x = vec![false; g.n()];
    for &x in xs {
        g.check_vertex(x)?;
        in_x[x] = true;
    }
    for &y in ys {
        g.check_vertex(y)?;
        if in_x[y] {
            return input(format!("vertex {y} is both a source and a sink"));
        }
    }
    let dedup = |v: &[usize]| v.iter().copied().collect::<BTreeSet<_>>().into_iter().collect::<Vec<_>>();
    Ok((dedup(xs), dedup(ys)))
}

/// Maximum number of edge-disjoint paths from `xs` to `ys`, stopping early at `cap`.
pub fn max_flow(g: &DiGraph, xs: &[usize], ys: &[usize], cap: Option<usize>) -> Result<FlowValue> {
    let (xs, ys) = check_terminals(g, xs, ys)?;
    let mut net = FlowNetwork::new(g, |_| true, &xs, &ys);
    let value = net.run(cap);
    let capped = cap.is_some_and(|c| value >= c);
    let min_cut = (!capped).then(|| Cut::from_mask(g, &net.source_side(), Direction::Out));
    Ok(FlowValue { value, witness_paths: net.paths(g), min_cut })
}

/// Flow value only, over the slots accepted by `keep`. Terminals are not validated.
pub(crate) fn flow_value_filtered(
    g: &DiGraph,
    keep: impl Fn(usize) -> bool,
    xs: &[usize],
    ys: &[usize],
    cap: Option<usize>,
) -> usize {
    FlowNetwork::new(g, keep, xs, ys).run(cap)
}

/// `min(flow(s, t), flow(t, s), k)`.
pub fn symmetric_connectivity(g: &DiGraph, s: usize, t: usize, k: usize) -> Result<usize> {
    if s == t {
        return input("symmetric connectivity needs two distinct vertices");
    }
    check_terminals(g, &[s], &[t])?;
    Ok(symmetric_filtered(g, |_| true, s, t, k))
}

pub(crate) fn symmetric_filtered(g: &DiGraph, keep: impl Fn(usize) -> bool + Copy, s: usize, t: usize, k: usize) -> usize {
    let forward = flow_value_filtered(g, keep, &[s], &[t], Some(k));
    if forward == 0 {
        return 0;
    }
    forward.min(flow_value_filtered(g, keep, &[t], &[s], Some(forward)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarthestMinCut {
    pub value: usize,
    pub cut: Cut,
}

/// The minimum (X, Y)-cut whose side is inclusion-maximal: every vertex that cannot reach
/// the sinks in the final residual network. For [`Direction::In`] the roles are taken on
/// the reversed graph, so the side still contains `xs` and its boundary enters it.
pub fn farthest_min_cut(g: &DiGraph, xs: &[usize], ys: &[usize], direction: Direction) -> Result<FarthestMinCut> {
    let (xs, ys) = check_terminals(g, xs, ys)?;
    let work;
    let g_dir = match direction {
        Direction::Out => g,
        Direction::In => {
            work = g.reverse();
            &work
        }
    };
    let mut net = FlowNetwork::new(g_dir, |_| true, &xs, &ys);
    let value = net.run(None);
    let side = net.sink_unreachable();
    Ok(FarthestMinCut { value, cut: Cut::from_mask(g, &side, direction) })
}

/// Shrinks a cut to the vertices reachable from `anchors` without crossing its boundary
/// (against edge direction for [`Direction::In`]). The new boundary is a subset of the old one.
pub fn canonicalize_reachable(g: &DiGraph, cut: &Cut, anchors: &[usize]) -> Result<Cut> {
    for &a in anchors {
        g.check_vertex(a)?;
        if !cut.side.contains(&a) {
            return input(format!("anchor {a} is not on the side of the cut"));
        }
    }
    let boundary = g.slot_mask(&cut.boundary)?;
    let reach = match cut.direction {
        Direction::Out => g.reach_from(anchors, |s| !boundary[s]),
        Direction::In => {
            let r = g.reverse();
            r.reach_from(anchors, |s| !boundary[s])
        }
    };
    Ok(Cut::from_mask(g, &reach, cut.direction))
}
