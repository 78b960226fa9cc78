//! Directed multigraphs with stable edge identifiers, strongly connected
//! components and the plain-text exchange format.
//!
//! Edges are stored in ascending id order. Every derived graph (edge removal,
//! reversal, induced subgraph, restriction) keeps the ids of the edges it
//! retains, so edge sets computed on a subgraph can be compared directly with
//! edge sets of the parent.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: usize,
    pub head: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<u32>,
}

const NO_SLOT: u32 = u32::MAX;

/// A directed multigraph on vertices `0..n`. Parallel edges and self-loops are allowed.
#[derive(Clone, Debug)]
pub struct DiGraph {
    n: usize,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    slot_of: Vec<u32>,
}

impl PartialEq for DiGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for DiGraph {}

impl DiGraph {
    pub fn empty(n: usize) -> Self {
        Self::from_edge_list(n, Vec::new()).expect("empty graph is valid")
    }

    /// Builds a graph whose edge ids are `0..pairs.len()` in the given order.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (tail, head))| Edge { id: EdgeId(i), tail, head, color: None })
            .collect();
        Self::from_edge_list(n, edges)
    }

    /// Builds a graph from explicit edges. Ids must be unique; order is normalised to ascending id.
    pub fn from_edge_list(n: usize, edges: Vec<Edge>) -> Result<Self> {
        Self::with_id_bound(n, edges, 0)
    }

    /// Derived graphs keep their parent's id bound so fresh ids never collide with removed ones.
    fn with_id_bound(n: usize, mut edges: Vec<Edge>, min_bound: usize) -> Result<Self> {
        edges.sort_by_key(|e| e.id);
        let bound = edges.last().map_or(0, |e| e.id.0 + 1).max(min_bound);
        if bound > NO_SLOT as usize {
            return input("edge id too large");
        }
        let mut slot_of = vec![NO_SLOT; bound];
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (pos, e) in edges.iter().enumerate() {
            if e.tail >= n || e.head >= n {
                return input(format!(
                    "edge {} = ({}, {}) has an endpoint outside 0..{n}",
                    e.id, e.tail, e.head
                ));
            }
            if slot_of[e.id.0] != NO_SLOT {
                return input(format!("duplicate edge id {}", e.id));
            }
            slot_of[e.id.0] = pos as u32;
            out_adj[e.tail].push(pos);
            in_adj[e.head].push(pos);
        }
        Ok(Self { n, edges, out_adj, in_adj, slot_of })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in ascending id order. Positions in this slice are called slots.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|e| e.id)
    }

    pub fn edge_id_set(&self) -> BTreeSet<EdgeId> {
        self.edge_ids().collect()
    }

    /// Fresh ids are allocated from here: one past the largest id this graph or any graph it
    /// was derived from has used.
    pub fn id_bound(&self) -> usize {
        self.slot_of.len()
    }

    pub fn slot(&self, id: EdgeId) -> Option<usize> {
        match self.slot_of.get(id.0) {
            Some(&s) if s != NO_SLOT => Some(s as usize),
            _ => None,
        }
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.slot(id).is_some()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.slot(id).map(|s| &self.edges[s])
    }

    pub fn out_slots(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_slots(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.out_adj[v].iter().map(move |&s| &self.edges[s])
    }

    pub fn in_edges(&self, v: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.in_adj[v].iter().map(move |&s| &self.edges[s])
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            input(format!("vertex {v} is outside 0..{}", self.n))
        }
    }

    /// Slots of the given ids, failing on an id that is not an edge of this graph.
    pub fn slots_of(&self, ids: impl IntoIterator<Item = EdgeId>) -> Result<Vec<usize>> {
        ids.into_iter()
            .map(|id| self.slot(id).ok_or_else(|| Error::Input(format!("unknown edge id {id}"))))
            .collect()
    }

    /// Slot mask of `ids`, failing on unknown ids.
    pub fn slot_mask(&self, ids: &BTreeSet<EdgeId>) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.m()];
        for s in self.slots_of(ids.iter().copied())? {
            mask[s] = true;
        }
        Ok(mask)
    }

    fn keep_slots(&self, keep: impl Fn(usize) -> bool) -> Self {
        let edges = (0..self.m()).filter(|&s| keep(s)).map(|s| self.edges[s]).collect();
        Self::with_id_bound(self.n, edges, self.id_bound()).expect("sub-multigraph of a valid graph")
    }

    pub fn remove_edges(&self, ids: &BTreeSet<EdgeId>) -> Result<Self> {
        let mask = self.slot_mask(ids)?;
        Ok(self.keep_slots(|s| !mask[s]))
    }

    /// The spanning subgraph consisting of exactly the listed edges.
    pub fn restrict_to(&self, ids: &BTreeSet<EdgeId>) -> Result<Self> {
        let mask = self.slot_mask(ids)?;
        Ok(self.keep_slots(|s| mask[s]))
    }

    pub(crate) fn restrict_to_slots(&self, alive: &[bool]) -> Self {
        self.keep_slots(|s| alive[s])
    }

    pub fn reverse(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { tail: e.head, head: e.tail, ..*e })
            .collect();
        Self::with_id_bound(self.n, edges, self.id_bound()).expect("reversal of a valid graph")
    }

    /// Appends edges with fresh ids `id_bound(), id_bound() + 1, ...` in list order.
    pub fn add_edges(&self, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut edges = self.edges.clone();
        let base = self.id_bound();
        for (i, &(tail, head)) in pairs.iter().enumerate() {
            edges.push(Edge { id: EdgeId(base + i), tail, head, color: None });
        }
        Self::with_id_bound(self.n, edges, base + pairs.len())
    }

    /// The subgraph induced by `vertices`, renumbered `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<Induced> {
        let mut local = vec![None; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            if local[v].replace(i).is_some() {
                return input(format!("vertex {v} listed twice"));
            }
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| match (local[e.tail], local[e.head]) {
                (Some(t), Some(h)) => Some(Edge { tail: t, head: h, ..*e }),
                _ => None,
            })
            .collect();
        Ok(Induced {
            graph: Self::with_id_bound(vertices.len(), edges, self.id_bound())?,
            to_parent: vertices.to_vec(),
            from_parent: local,
        })
    }

    pub fn scc(&self) -> SccPartition {
        let mut scratch = SccScratch::new(self.n);
        let count = scratch.run(self, |_| true);
        SccPartition::from_labels(scratch.labels().to_vec(), count)
    }

    /// Vertices reachable from `sources` using only slots accepted by `keep`.
    pub(crate) fn reach_from(&self, sources: &[usize], keep: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack: Vec<usize> = Vec::new();
        for &s in sources {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(v) = stack.pop() {
            for &slot in &self.out_adj[v] {
                let w = self.edges[slot].head;
                if keep(slot) && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let nums = parse_fields(hline, header)?;
        let [n, m] = nums[..] else {
            return Err(Error::Parse { line: hline, msg: "header must be `n m`".into() });
        };
        let (n, m) = (n as usize, m as usize);
        let mut edges = Vec::with_capacity(m);
        for (line, body) in lines {
            let f = parse_fields(line, body)?;
            let (tail, head, color) = match f[..] {
                [t, h] => (t, h, None),
                [t, h, c] => (t, h, Some(u32::try_from(c).map_err(|_| Error::Parse { line, msg: "color out of range".into() })?)),
                _ => return Err(Error::Parse { line, msg: "edge line must be `tail head [color]`".into() }),
            };
            let (tail, head) = (tail as usize, head as usize);
            if tail >= n || head >= n {
                return Err(Error::Parse { line, msg: format!("endpoint outside 0..{n}") });
            }
            edges.push(Edge { id: EdgeId(edges.len()), tail, head, color });
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Self::from_edge_list(n, edges)
    }

    /// Serialises edges in ascending id order. Ids are implicit in the format, so only graphs with
    /// ids `0..m` round-trip with their ids intact.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for e in &self.edges {
            match e.color {
                Some(c) => out.push_str(&format!("{} {} {}\n", e.tail, e.head, c)),
                None => out.push_str(&format!("{} {}\n", e.tail, e.head)),
            }
        }
        out
    }
}

fn parse_fields(line: usize, body: &str) -> Result<Vec<u64>> {
    body.split_whitespace()
        .map(|tok| tok.parse::<u64>().map_err(|_| Error::Parse { line, msg: format!("not a non-negative integer: `{tok}`") }))
        .collect()
}

/// An induced subgraph together with the vertex correspondence to its parent.
#[derive(Clone, Debug)]
pub struct Induced {
    pub graph: DiGraph,
    pub to_parent: Vec<usize>,
    pub from_parent: Vec<Option<usize>>,
}

impl Induced {
    pub fn local(&self, parent_vertex: usize) -> Option<usize> {
        self.from_parent.get(parent_vertex).copied().flatten()
    }
}

/// Strongly connected components, numbered in a topological order of the condensation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SccPartition {
    pub component_of: Vec<usize>,
    pub components: Vec<Vec<usize>>,
    pub topological_order: Vec<usize>,
}

impl SccPartition {
    fn from_labels(component_of: Vec<usize>, count: usize) -> Self {
        let mut components = vec![Vec::new(); count];
        for (v, &c) in component_of.iter().enumerate() {
            components[c].push(v);
        }
        Self { component_of, components, topological_order: (0..count).collect() }
    }

    pub fn count(&self) -> usize {
        self.components.len()
    }

    pub fn same_component(&self, u: usize, v: usize) -> bool {
        self.component_of[u] == self.component_of[v]
    }
}

/// True if two labelings induce the same partition of the vertex set.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let width = a.iter().chain(b).copied().max().map_or(0, |x| x + 1);
    let mut ab = vec![usize::MAX; width];
    let mut ba = vec![usize::MAX; width];
    for (&x, &y) in a.iter().zip(b) {
        if ab[x] == usize::MAX && ba[y] == usize::MAX {
            ab[x] = y;
            ba[y] = x;
        } else if ab[x] != y || ba[y] != x {
            return false;
        }
    }
    true
}

/// Reusable buffers for iterative Tarjan over a filtered edge set.
pub(crate) struct SccScratch {
    index: Vec<u32>,
    low: Vec<u32>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    call: Vec<(usize, usize)>,
    label: Vec<usize>,
}

const UNVISITED: u32 = u32::MAX;

impl SccScratch {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            index: vec![UNVISITED; n],
            low: vec![0; n],
            on_stack: vec![false; n],
            stack: Vec::with_capacity(n),
            call: Vec::with_capacity(n),
            label: vec![0; n],
        }
    }

    pub(crate) fn labels(&self) -> &[usize] {
        &self.label
    }

    /// Labels components of the subgraph of slots accepted by `keep`; returns the component count.
    /// Labels follow a topological order of the condensation.
    pub(crate) fn run(&mut self, g: &DiGraph, keep: impl Fn(usize) -> bool) -> usize {
        let n = g.n();
        if self.index.len() != n {
            *self = Self::new(n);
        }
        self.index.fill(UNVISITED);
        let mut counter = 0u32;
        let mut count = 0usize;
        for root in 0..n {
            if self.index[root] != UNVISITED {
                continue;
            }
            self.index[root] = counter;
            self.low[root] = counter;
            counter += 1;
            self.stack.push(root);
            self.on_stack[root] = true;
            self.call.push((root, 0));
            while let Some(&(v, i)) = self.call.last() {
                let out = g.out_slots(v);
                if i < out.len() {
                    let top = self.call.len() - 1;
                    self.call[top].1 += 1;
                    let slot = out[i];
                    if !keep(slot) {
                        continue;
                    }
                    let w = g.edges[slot].head;
                    if self.index[w] == UNVISITED {
                        self.index[w] = counter;
                        self.low[w] = counter;
                        counter += 1;
                        self.stack.push(w);
                        self.on_stack[w] = true;
                        self.call.push((w, 0));
                    } else if self.on_stack[w] {
                        self.low[v] = self.low[v].min(self.index[w]);
                    }
                } else {
                    self.call.pop();
                    if let Some(&(p, _)) = self.call.last() {
                        self.low[p] = self.low[p].min(self.low[v]);
                    }
                    if self.low[v] == self.index[v] {
                        loop {
                            let x = self.stack.pop().expect("tarjan stack holds v");
                            self.on_stack[x] = false;
                            self.label[x] = count;
                            if x == v {
                                break;
                            }
                        }
                        count += 1;
                    }
                }
            }
        }
        // Tarjan emits sink components first.
        for l in &mut self.label {
            *l = count - 1 - *l;
        }
        count
    }
}
