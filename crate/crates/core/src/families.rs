//! Deterministic generators for the graph families that force large preservers, and a seeded
//! random generator for test corpora.
//!
//! Trees are heap-indexed inside their own block of vertex ids: local index 0 is the root and
//! local node `i` has children `2i + 1` and `2i + 2`. The off-path sibling edges of a leaf are
//! then a closed-form function of the leaf's index.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{DiGraph, Edge, EdgeId};
use crate::error::{capability, input, Result};
use crate::faults::FaultSet;

/// Largest tree depth any generator accepts.
pub const MAX_TREE_DEPTH: usize = 16;
/// Largest vertex count any generator produces.
pub const MAX_VERTICES: usize = 1 << 20;

/// Why a cross edge is indispensable: with the faults (or the failed color) applied, `pair`
/// is strongly connected, and it stops being so once the cross edge is removed too.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossWitness {
    pub edge: EdgeId,
    pub tail: usize,
    pub head: usize,
    pub pair: (usize, usize),
    pub faults: FaultSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_color: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMeta {
    pub family: String,
    pub params: BTreeMap<String, u64>,
    pub s: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    /// Leaves of the out-trees.
    pub x_vertices: Vec<usize>,
    /// Sink side of the cross edges.
    pub y_vertices: Vec<usize>,
    pub tree_edges: Vec<EdgeId>,
    pub cross: Vec<CrossWitness>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub color_of_leaf: BTreeMap<u32, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub graph: DiGraph,
    pub meta: FamilyMeta,
}

struct Builder {
    n: usize,
    edges: Vec<Edge>,
}

impl Builder {
    fn new() -> Self {
        Self { n: 0, edges: Vec::new() }
    }

    fn vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    fn edge(&mut self, tail: usize, head: usize, color: Option<u32>) -> EdgeId {
        let id = EdgeId(self.edges.len());
        self.edges.push(Edge { id, tail, head, color });
        id
    }

    fn finish(self) -> Result<DiGraph> {
        DiGraph::from_edge_list(self.n, self.edges)
    }
}

fn log2_exact(x: usize) -> Result<usize> {
    if x == 0 || !x.is_power_of_two() {
        return input(format!("{x} is not a positive power of two"));
    }
    let d = x.trailing_zeros() as usize;
    if d > MAX_TREE_DEPTH {
        return capability(format!("tree depth {d} exceeds {MAX_TREE_DEPTH}"));
    }
    Ok(d)
}

fn guard(vertices: usize) -> Result<()> {
    if vertices > MAX_VERTICES {
        return capability(format!("{vertices} vertices exceed the generator limit of {MAX_VERTICES}"));
    }
    Ok(())
}

/// A complete binary tree of the given depth. Edges point away from the root when `outward`.
struct Tree {
    /// Global id of each local heap index.
    ids: Vec<usize>,
    /// Edge between local node `c` and its parent, indexed by `c`; unused at the root.
    edge_of: Vec<EdgeId>,
    depth: usize,
}

impl Tree {
    fn build(b: &mut Builder, root: usize, depth: usize, outward: bool) -> Self {
        let size = (1usize << (depth + 1)) - 1;
        let mut ids = Vec::with_capacity(size);
        ids.push(root);
        for _ in 1..size {
            ids.push(b.vertex());
        }
        let mut edge_of = vec![EdgeId(usize::MAX); size];
        for c in 1..size {
            let p = (c - 1) / 2;
            edge_of[c] = if outward { b.edge(ids[p], ids[c], None) } else { b.edge(ids[c], ids[p], None) };
        }
        Self { ids, edge_of, depth }
    }

    fn leaf_locals(&self) -> std::ops::Range<usize> {
        (1 << self.depth) - 1..(1 << (self.depth + 1)) - 1
    }

    fn leaves(&self) -> Vec<usize> {
        self.leaf_locals().map(|c| self.ids[c]).collect()
    }

    /// Local indices of the siblings of the nodes on the path from `leaf` up to the root.
    fn off_path(&self, leaf: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.depth);
        let mut c = leaf;
        while c > 0 {
            out.push(if c % 2 == 1 { c + 1 } else { c - 1 });
            c = (c - 1) / 2;
        }
        out
    }

    fn off_path_edges(&self, leaf: usize) -> FaultSet {
        self.off_path(leaf).into_iter().map(|c| self.edge_of[c]).collect()
    }

    fn edges(&self) -> Vec<EdgeId> {
        self.edge_of[1..].to_vec()
    }
}

fn params(pairs: &[(&str, usize)]) -> BTreeMap<String, u64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v as u64)).collect()
}

/// Out-tree from `s` with `x_count` leaves, every leaf-to-`Y` edge, and every `Y`-to-`s` edge.
/// Cross edge `(x, y)` is witnessed by the off-path sibling edges of `x`, at most one per vertex.
pub fn gen_bounded_degree_lower(x_count: usize, y_count: usize) -> Result<Family> {
    let depth = log2_exact(x_count)?;
    if y_count == 0 {
        return input("the sink set must be nonempty");
    }
    guard(2 * x_count + y_count)?;
    let mut b = Builder::new();
    let s = b.vertex();
    let tree = Tree::build(&mut b, s, depth, true);
    let ys: Vec<usize> = (0..y_count).map(|_| b.vertex()).collect();
    let mut cross = Vec::with_capacity(x_count * y_count);
    for leaf in tree.leaf_locals() {
        let faults = tree.off_path_edges(leaf);
        for &y in &ys {
            let x = tree.ids[leaf];
            let edge = b.edge(x, y, None);
            cross.push(CrossWitness { edge, tail: x, head: y, pair: (s, y), faults: faults.clone(), failed_color: None });
        }
    }
    for &y in &ys {
        b.edge(y, s, None);
    }
    let meta = FamilyMeta {
        family: "bounded_degree".into(),
        params: params(&[("x", x_count), ("y", y_count)]),
        s,
        t: None,
        x_vertices: tree.leaves(),
        y_vertices: ys,
        tree_edges: tree.edges(),
        cross,
        color_of_leaf: BTreeMap::new(),
    };
    Ok(Family { graph: b.finish()?, meta })
}

/// The bounded-degree family with `2^k` leaves; every cross edge is `k`-fault critical.
pub fn gen_baswana_tree(k: usize, y_count: usize) -> Result<Family> {
    if k == 0 || k > MAX_TREE_DEPTH {
        return input(format!("k = {k} must lie in 1..={MAX_TREE_DEPTH}"));
    }
    let mut f = gen_bounded_degree_lower(1 << k, y_count)?;
    f.meta.family = "baswana".into();
    f.meta.params = params(&[("k", k), ("y", y_count)]);
    Ok(f)
}

/// A chain of layers from `s` to `t` plus the edge `t -> s`. Layer `i` is an out-tree of depth
/// `k/2` from its root, an in-tree of depth `k/2` into the next root, and all edges from the
/// out-leaves to the in-leaves. A cross edge is witnessed by the off-path edges of both trees.
pub fn gen_st_lower(layers: usize, k: usize) -> Result<Family> {
    if k < 2 || k % 2 == 1 {
        return input(format!("k = {k} must be even and at least 2"));
    }
    if layers == 0 {
        return input("at least one layer is required");
    }
    let depth = k / 2;
    if depth > MAX_TREE_DEPTH {
        return capability(format!("tree depth {depth} exceeds {MAX_TREE_DEPTH}"));
    }
    guard(1 + layers * (4 << depth))?;
    let mut b = Builder::new();
    let s = b.vertex();
    let mut root = s;
    let mut cross = Vec::new();
    let mut tree_edges = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut pending = Vec::new();
    for _ in 0..layers {
        let out_tree = Tree::build(&mut b, root, depth, true);
        let next = b.vertex();
        let in_tree = Tree::build(&mut b, next, depth, false);
        tree_edges.extend(out_tree.edges());
        tree_edges.extend(in_tree.edges());
        for a in out_tree.leaf_locals() {
            for c in in_tree.leaf_locals() {
                let (x, y) = (out_tree.ids[a], in_tree.ids[c]);
                let edge = b.edge(x, y, None);
                let faults: FaultSet = out_tree.off_path_edges(a).union(&in_tree.off_path_edges(c)).copied().collect();
                pending.push(CrossWitness { edge, tail: x, head: y, pair: (s, usize::MAX), faults, failed_color: None });
            }
        }
        xs.extend(out_tree.leaves());
        ys.extend(in_tree.leaves());
        root = next;
    }
    let t = root;
    b.edge(t, s, None);
    for mut w in pending {
        w.pair = (s, t);
        cross.push(w);
    }
    let meta = FamilyMeta {
        family: "st_lower".into(),
        params: params(&[("layers", layers), ("k", k)]),
        s,
        t: Some(t),
        x_vertices: xs,
        y_vertices: ys,
        tree_edges,
        cross,
        color_of_leaf: BTreeMap::new(),
    };
    Ok(Family { graph: b.finish()?, meta })
}

/// The bounded-degree family recolored: color `i + 1` is given to the off-path edges of leaf
/// `i`, and an edge that would receive several colors becomes a path with one edge per color,
/// in ascending color order. Cross and return edges get color 0.
pub fn gen_color_fault_lower(x_count: usize, y_count: usize) -> Result<Family> {
    let depth = log2_exact(x_count)?;
    if y_count == 0 {
        return input("the sink set must be nonempty");
    }
    guard(2 * x_count + y_count + depth * x_count)?;
    let size = (1usize << (depth + 1)) - 1;
    let first_leaf = (1usize << depth) - 1;
    let mut colors_of: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); size];
    let probe = Tree { ids: (0..size).collect(), edge_of: vec![EdgeId(0); size], depth };
    for leaf in probe.leaf_locals() {
        let color = (leaf - first_leaf + 1) as u32;
        for c in probe.off_path(leaf) {
            colors_of[c].insert(color);
        }
    }
    let mut b = Builder::new();
    let ids: Vec<usize> = (0..size).map(|_| b.vertex()).collect();
    let ys: Vec<usize> = (0..y_count).map(|_| b.vertex()).collect();
    let mut tree_edges = Vec::new();
    for c in 1..size {
        let mut at = ids[(c - 1) / 2];
        let colors: Vec<u32> = colors_of[c].iter().copied().collect();
        for (i, &color) in colors.iter().enumerate() {
            let next = if i + 1 == colors.len() { ids[c] } else { b.vertex() };
            tree_edges.push(b.edge(at, next, Some(color)));
            at = next;
        }
    }
    let s = ids[0];
    let mut cross = Vec::new();
    let mut color_of_leaf = BTreeMap::new();
    for leaf in first_leaf..size {
        let color = (leaf - first_leaf + 1) as u32;
        color_of_leaf.insert(color, ids[leaf]);
        for &y in &ys {
            let edge = b.edge(ids[leaf], y, Some(0));
            cross.push(CrossWitness {
                edge,
                tail: ids[leaf],
                head: y,
                pair: (s, y),
                faults: FaultSet::new(),
                failed_color: Some(color),
            });
        }
    }
    for &y in &ys {
        b.edge(y, s, Some(0));
    }
    let meta = FamilyMeta {
        family: "color".into(),
        params: params(&[("x", x_count), ("y", y_count)]),
        s,
        t: None,
        x_vertices: (first_leaf..size).map(|c| ids[c]).collect(),
        y_vertices: ys,
        tree_edges,
        cross,
        color_of_leaf,
    };
    Ok(Family { graph: b.finish()?, meta })
}

/// `m` uniformly random non-loop edges (parallel edges allowed). With `strongly_connected`
/// and `n >= 2`, a random Hamiltonian cycle is laid down first, taking edge ids `0..n`.
pub fn gen_random(n: usize, m: usize, seed: u64, strongly_connected: bool) -> Result<DiGraph> {
    guard(n)?;
    if n < 2 && m > 0 {
        return input("random edges need at least two vertices");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(m + n);
    if strongly_connected && n >= 2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        for i in 0..n {
            pairs.push((order[i], order[(i + 1) % n]));
        }
    }
    for _ in 0..m {
        let tail = rng.gen_range(0..n);
        let mut head = rng.gen_range(0..n - 1);
        if head >= tail {
            head += 1;
        }
        pairs.push((tail, head));
    }
    DiGraph::from_pairs(n, pairs)
}
