//! Unbreakability, sparse cuts relative to a terminal set, and the directed expander
//! hierarchy.
//!
//! The hierarchy partitions the vertices into levels `V_1, ..., V_l`. For every level `i`
//! and every strongly connected component `C` of the subgraph induced by `V_1 ∪ ... ∪ V_i`,
//! the terminals `V_i ∩ C` admit no sparse cut in `G[C]`, and therefore no cut of at most
//! `k` edges splitting off more than `q` terminals on each side.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::digraph::{DiGraph, SccScratch};
use crate::error::{capability, input, Error, Result};
use crate::faults::{ensure_within_limit, fault_limit, for_each_subset};
use crate::flowcut::{farthest_min_cut, Cut, Direction, FlowNetwork};

/// Expansion threshold, a rational in `(0, 1]`.
pub type Phi = Ratio<u64>;

/// Largest component on which sparse cuts are searched exhaustively by default.
pub const DEFAULT_EXACT_CUT_LIMIT: usize = 18;

/// Default bound on the number of terminal-set pairs examined by [`is_unbreakable`].
pub const DEFAULT_PAIR_LIMIT: u128 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyParams {
    pub q: usize,
    pub k: usize,
    pub phi: Phi,
    pub exact_cut_limit: usize,
    /// Check every certificate with [`is_unbreakable`] when it is small enough.
    pub verify_certificates: bool,
}

impl HierarchyParams {
    /// Requires `0 < phi <= 1` and `q * phi >= k`.
    pub fn new(q: usize, k: usize, phi: Phi) -> Result<Self> {
        if *phi.numer() == 0 || phi > Phi::from_integer(1) {
            return input(format!("phi = {phi} must lie in (0, 1]"));
        }
        if Phi::from_integer(q as u64) * phi < Phi::from_integer(k as u64) {
            return input(format!("q = {q} is below k / phi = {}", Phi::from_integer(k as u64) / phi));
        }
        Ok(Self { q, k, phi, exact_cut_limit: DEFAULT_EXACT_CUT_LIMIT, verify_certificates: true })
    }

    /// `phi = 1/2` and `q = 2k`, the smallest `q` allowed for that `phi`.
    pub fn for_budget(k: usize) -> Self {
        Self::new(2 * k, k, Phi::new(1, 2)).expect("q = 2k satisfies q * phi >= k")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unbreakability {
    pub unbreakable: bool,
    /// An out-cut of size at most `k` with more than `q` terminals on each side.
    pub witness: Option<Cut>,
}

fn next_lex(c: &mut [usize], n: usize) -> bool {
    let r = c.len();
    for i in (0..r).rev() {
        if c[i] < n - r + i {
            c[i] += 1;
            for j in i + 1..r {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn sorted_terminals(g: &DiGraph, terminals: &[usize]) -> Result<Vec<usize>> {
    for &t in terminals {
        g.check_vertex(t)?;
    }
    Ok(terminals.iter().copied().collect::<BTreeSet<_>>().into_iter().collect())
}

/// Decides whether no cut of at most `k` edges has more than `q` terminals on both sides.
pub fn is_unbreakable(g: &DiGraph, terminals: &[usize], q: usize, k: usize) -> Result<Unbreakability> {
    is_unbreakable_with_limit(g, terminals, q, k, DEFAULT_PAIR_LIMIT)
}

/// Tries every ordered pair of disjoint `(q + 1)`-subsets of the terminals in lexicographic
/// order and reports the first pair whose flow is at most `k`.
pub fn is_unbreakable_with_limit(
    g: &DiGraph,
    terminals: &[usize],
    q: usize,
    k: usize,
    pair_limit: u128,
) -> Result<Unbreakability> {
    let u = sorted_terminals(g, terminals)?;
    let r = q + 1;
    if 2 * r > u.len() {
        return Ok(Unbreakability { unbreakable: true, witness: None });
    }
    let pairs = crate::faults::binomial(u.len(), r) * crate::faults::binomial(u.len() - r, r);
    if pairs > pair_limit {
        return capability(format!("unbreakability check needs {pairs} flow computations, limit {pair_limit}"));
    }
    let mut a_idx: Vec<usize> = (0..r).collect();
    loop {
        let a: Vec<usize> = a_idx.iter().map(|&i| u[i]).collect();
        let rest: Vec<usize> = u.iter().copied().filter(|v| !a.contains(v)).collect();
        let mut b_idx: Vec<usize> = (0..r).collect();
        loop {
            let b: Vec<usize> = b_idx.iter().map(|&i| rest[i]).collect();
            let mut net = FlowNetwork::new(g, |_| true, &a, &b);
            if net.run(Some(k + 1)) <= k {
                let cut = Cut::from_mask(g, &net.source_side(), Direction::Out);
                return Ok(Unbreakability { unbreakable: false, witness: Some(cut) });
            }
            if !next_lex(&mut b_idx, rest.len()) {
                break;
            }
        }
        if !next_lex(&mut a_idx, u.len()) {
            break;
        }
    }
    Ok(Unbreakability { unbreakable: true, witness: None })
}

/// After any `k` edge failures some strongly connected component still holds all but at
/// most `2q` of the terminals.
pub fn giant_component_check(g: &DiGraph, terminals: &[usize], q: usize, k: usize) -> Result<bool> {
    let u = sorted_terminals(g, terminals)?;
    ensure_within_limit(g.m(), k, fault_limit(), "giant component check")?;
    let need = u.len().saturating_sub(2 * q);
    let mut scratch = SccScratch::new(g.n());
    let mut dead = vec![false; g.m()];
    let mut counts = vec![0usize; g.n()];
    let mut ok = true;
    let _ = for_each_subset(g.m(), k, |f| {
        for &s in f {
            dead[s] = true;
        }
        let comps = scratch.run(g, |s| !dead[s]);
        counts[..comps].fill(0);
        for &t in &u {
            counts[scratch.labels()[t]] += 1;
        }
        for &s in f {
            dead[s] = false;
        }
        if counts[..comps].iter().copied().max().unwrap_or(0) < need {
            ok = false;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    Ok(ok)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseCut {
    pub cut: Cut,
    /// `|boundary| / min(|side ∩ U|, |U - side|)`.
    pub ratio: Phi,
}

fn cut_ratio(boundary: usize, inside: usize, outside: usize) -> Option<Phi> {
    let small = inside.min(outside);
    (small > 0).then(|| Phi::new(boundary as u64, small as u64))
}

/// The first out-cut, in ascending order of its side as a bitmask, that splits the terminals
/// and has ratio at most `phi`. Exhaustive over all `2^n` sides.
pub fn sparse_cut_wrt(g: &DiGraph, terminals: &[usize], phi: Phi, vertex_limit: usize) -> Result<Option<SparseCut>> {
    let u = sorted_terminals(g, terminals)?;
    if u.len() < 2 {
        return input("a sparse cut needs at least two terminals");
    }
    let n = g.n();
    if n > vertex_limit.min(30) {
        return capability(format!("exhaustive sparse-cut search over {n} vertices exceeds the limit of {vertex_limit}"));
    }
    let t_mask: u64 = u.iter().map(|&v| 1u64 << v).sum();
    let total = u.len() as u32;
    let num = *phi.numer();
    let den = *phi.denom();
    for mask in 1..(1u64 << n) - 1 {
        let inside = (mask & t_mask).count_ones();
        if inside == 0 || inside == total {
            continue;
        }
        let small = u64::from(inside.min(total - inside));
        let boundary = g
            .edges()
            .iter()
            .filter(|e| mask >> e.tail & 1 == 1 && mask >> e.head & 1 == 0)
            .count() as u64;
        if boundary * den <= num * small {
            let side = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let cut = Cut::from_side(g, side, Direction::Out);
            return Ok(Some(SparseCut { ratio: Phi::new(boundary, small), cut }));
        }
    }
    Ok(None)
}

/// Searches minimum cuts between terminal pairs, then improves the best one by single-vertex
/// moves. Finds a sparse cut only when one is easy to see; `None` proves nothing.
pub fn sparse_cut_heuristic(g: &DiGraph, terminals: &[usize], phi: Phi) -> Result<Option<SparseCut>> {
    let u = sorted_terminals(g, terminals)?;
    if u.len() < 2 {
        return input("a sparse cut needs at least two terminals");
    }
    let n = g.n();
    let mut is_terminal = vec![false; n];
    for &t in &u {
        is_terminal[t] = true;
    }
    let evaluate = |mask: &[bool]| -> Option<Phi> {
        let inside = u.iter().filter(|&&t| mask[t]).count();
        let boundary = g.edges().iter().filter(|e| mask[e.tail] && !mask[e.head]).count();
        cut_ratio(boundary, inside, u.len() - inside)
    };
    let mut best: Option<(Phi, Vec<bool>)> = None;
    const PAIR_BUDGET: usize = 64;
    for (i, &s) in u.iter().enumerate().take(PAIR_BUDGET) {
        let t = u[(i + 1) % u.len()];
        for (a, b) in [(s, t), (t, s)] {
            let fmc = farthest_min_cut(g, &[a], &[b], Direction::Out)?;
            let mut mask = vec![false; n];
            for &v in &fmc.cut.side {
                mask[v] = true;
            }
            if let Some(r) = evaluate(&mask) {
                if best.as_ref().is_none_or(|(br, _)| r < *br) {
                    best = Some((r, mask));
                }
            }
        }
    }
    let Some((mut ratio, mut mask)) = best else { return Ok(None) };
    let mut improved = true;
    while improved {
        improved = false;
        for v in 0..n {
            mask[v] = !mask[v];
            match evaluate(&mask) {
                Some(r) if r < ratio && mask.iter().any(|&b| b) && !mask.iter().all(|&b| b) => {
                    ratio = r;
                    improved = true;
                }
                _ => mask[v] = !mask[v],
            }
        }
    }
    Ok((ratio <= phi).then(|| SparseCut { cut: Cut::from_mask(g, &mask, Direction::Out), ratio }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCertificate {
    /// 1-based level index.
    pub level: usize,
    pub component: BTreeSet<usize>,
    pub terminals: BTreeSet<usize>,
    /// Result of [`is_unbreakable`] with the hierarchy's `q` and `k`; `None` when not checked.
    pub unbreakable: Option<bool>,
}

/// What happened while one component was processed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentTrace {
    pub depth: usize,
    pub component_size: usize,
    /// Terminal count before the first cut and after every update.
    pub terminal_sizes: Vec<usize>,
    /// Largest strongly connected component among the non-terminals after every update.
    pub residual_max_scc: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpanderHierarchy {
    /// `levels[i]` holds level `i + 1`; the last level is the top.
    pub levels: Vec<BTreeSet<usize>>,
    pub certificates: Vec<LevelCertificate>,
    pub params: HierarchyParams,
    /// Every sparse-cut search was exhaustive.
    pub exact: bool,
    pub trace: Vec<ComponentTrace>,
}

impl ExpanderHierarchy {
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }
}

struct Pending {
    depth: usize,
    vertices: Vec<usize>,
}

/// Builds the hierarchy top-down: inside each strongly connected component, terminals are
/// shrunk along sparse cuts until none is left, then the non-terminals are split into their
/// strongly connected components and processed one level lower.
pub fn build_hierarchy(g: &DiGraph, params: &HierarchyParams) -> Result<ExpanderHierarchy> {
    let mut queue: Vec<Pending> = g
        .scc()
        .components
        .into_iter()
        .map(|vertices| Pending { depth: 0, vertices })
        .collect();
    queue.reverse();
    let mut found: Vec<(usize, Vec<usize>, BTreeSet<usize>)> = Vec::new();
    let mut trace = Vec::new();
    let mut exact = true;
    while let Some(Pending { depth, vertices }) = queue.pop() {
        let ind = g.induced(&vertices)?;
        let local = &ind.graph;
        let c = local.n();
        let mut terminal = vec![true; c];
        let mut count = c;
        let mut tr = ComponentTrace { depth, component_size: c, terminal_sizes: vec![c], residual_max_scc: Vec::new() };
        while count >= 2 {
            let u: Vec<usize> = (0..c).filter(|&v| terminal[v]).collect();
            let found_cut = if c <= params.exact_cut_limit {
                sparse_cut_wrt(local, &u, params.phi, params.exact_cut_limit)?
            } else {
                exact = false;
                sparse_cut_heuristic(local, &u, params.phi)?
            };
            let Some(sc) = found_cut else { break };
            let mut in_side = vec![false; c];
            for &v in &sc.cut.side {
                in_side[v] = true;
            }
            let keep_side = 2 * sc.cut.side.len() > c;
            for v in 0..c {
                if in_side[v] != keep_side {
                    terminal[v] = false;
                }
            }
            for id in &sc.cut.boundary {
                let e = local.edge(*id).expect("boundary edge of the local graph");
                terminal[e.tail] = true;
            }
            let next = terminal.iter().filter(|&&t| t).count();
            if next >= count {
                return Err(Error::Precondition(format!(
                    "terminal set did not shrink ({count} -> {next}); phi = {} is too large",
                    params.phi
                )));
            }
            count = next;
            tr.terminal_sizes.push(count);
            let mut scratch = SccScratch::new(c);
            let comps = scratch.run(local, |s| {
                let e = local.edges()[s];
                !terminal[e.tail] && !terminal[e.head]
            });
            let mut sizes = vec![0usize; comps];
            for v in (0..c).filter(|&v| !terminal[v]) {
                sizes[scratch.labels()[v]] += 1;
            }
            tr.residual_max_scc.push(sizes.into_iter().max().unwrap_or(0));
        }
        let terms: BTreeSet<usize> = (0..c).filter(|&v| terminal[v]).map(|v| vertices[v]).collect();
        let rest: Vec<usize> = (0..c).filter(|&v| !terminal[v]).map(|v| vertices[v]).collect();
        if !rest.is_empty() {
            let sub = g.induced(&rest)?;
            let mut children: Vec<Pending> = sub
                .graph
                .scc()
                .components
                .into_iter()
                .map(|comp| Pending { depth: depth + 1, vertices: comp.into_iter().map(|v| rest[v]).collect() })
                .collect();
            children.reverse();
            queue.extend(children);
        }
        trace.push(tr);
        found.push((depth, vertices, terms));
    }
    let top = found.iter().map(|(d, _, _)| *d).max().map_or(0, |d| d + 1);
    let mut levels = vec![BTreeSet::new(); top];
    let mut certificates = Vec::with_capacity(found.len());
    for (depth, vertices, terms) in found {
        let level = top - depth;
        levels[level - 1].extend(terms.iter().copied());
        let unbreakable = if params.verify_certificates && exact {
            let ind = g.induced(&vertices)?;
            let local_terms: Vec<usize> = terms.iter().map(|&v| ind.local(v).expect("terminal in component")).collect();
            match is_unbreakable(&ind.graph, &local_terms, params.q, params.k) {
                Ok(r) => Some(r.unbreakable),
                Err(Error::Capability(_)) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        certificates.push(LevelCertificate {
            level,
            component: vertices.into_iter().collect(),
            terminals: terms,
            unbreakable,
        });
    }
    certificates.sort_by(|a, b| b.level.cmp(&a.level).then_with(|| a.component.cmp(&b.component)));
    Ok(ExpanderHierarchy { levels, certificates, params: params.clone(), exact, trace })
}
