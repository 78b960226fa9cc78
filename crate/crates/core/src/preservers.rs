//! Fault-tolerant strong-connectivity preservers.
//!
//! Every construction returns the ids of the kept edges. The greedy construction removes
//! edges in ascending id order while they are not critical, which yields a subgraph in
//! which every edge is critical and hence an inclusion-minimal preserver.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::digraph::{DiGraph, EdgeId, SccScratch};
use crate::error::{input, Result};
use crate::expander::{build_hierarchy, HierarchyParams};
use crate::faults::{ensure_within_limit, fault_limit, for_each_subset, FaultSet};

/// Which pairs must keep their strong-connectivity status under faults.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum VariantSpec {
    AllPairs,
    SingleSource { source: usize },
    St { s: usize, t: usize },
    /// Strong connectivity of the whole graph.
    Global,
    Sourcewise { sources: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    AllPairs,
    Sourcewise,
    SingleSource,
    St,
    Global,
    /// Capped edge connectivity between all pairs; see [`crate::kconn`].
    KConnectivity,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::AllPairs => "all_pairs",
            Self::Sourcewise => "sourcewise",
            Self::SingleSource => "single_source",
            Self::St => "st",
            Self::Global => "global",
            Self::KConnectivity => "kconn",
        };
        f.write_str(s)
    }
}

impl VariantSpec {
    pub fn variant(&self) -> Variant {
        match self {
            Self::AllPairs => Variant::AllPairs,
            Self::SingleSource { .. } => Variant::SingleSource,
            Self::St { .. } => Variant::St,
            Self::Global => Variant::Global,
            Self::Sourcewise { .. } => Variant::Sourcewise,
        }
    }

    pub fn validate(&self, g: &DiGraph) -> Result<()> {
        match self {
            Self::AllPairs => Ok(()),
            Self::Global => {
                if g.n() == 0 {
                    return input("global strong connectivity needs a vertex");
                }
                Ok(())
            }
            Self::SingleSource { source } => g.check_vertex(*source),
            Self::St { s, t } => {
                g.check_vertex(*s)?;
                g.check_vertex(*t)?;
                if s == t {
                    return input("s and t must differ");
                }
                Ok(())
            }
            Self::Sourcewise { sources } => sources.iter().try_for_each(|&v| g.check_vertex(v)),
        }
    }
}

/// A relevant pair that loses strong connectivity; `None` for the global variant.
pub(crate) type Broken = Option<(usize, usize)>;

/// The first relevant pair that is strongly connected under `coarse` but not under `fine`,
/// assuming `fine` refines `coarse`. Pairs are scanned in row-major order.
pub(crate) fn first_broken(
    spec: &VariantSpec,
    coarse: &[usize],
    coarse_count: usize,
    fine: &[usize],
    fine_count: usize,
) -> Option<Broken> {
    if coarse_count == fine_count {
        return None;
    }
    let n = coarse.len();
    let lost = |s: usize, t: usize| coarse[s] == coarse[t] && fine[s] != fine[t];
    match spec {
        VariantSpec::Global => (coarse_count == 1).then_some(None),
        VariantSpec::AllPairs => (0..n)
            .flat_map(|s| (s + 1..n).map(move |t| (s, t)))
            .find(|&(s, t)| lost(s, t))
            .map(Some),
        VariantSpec::SingleSource { source } => {
            (0..n).find(|&t| t != *source && lost(*source, t)).map(|t| Some((*source, t)))
        }
        VariantSpec::St { s, t } => lost(*s, *t).then_some(Some((*s, *t))),
        VariantSpec::Sourcewise { sources } => {
            let ordered: BTreeSet<usize> = sources.iter().copied().collect();
            ordered
                .into_iter()
                .flat_map(|u| (0..n).map(move |v| (u, v)))
                .find(|&(u, v)| u != v && lost(u, v))
                .map(Some)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalWitness {
    pub pair: Option<(usize, usize)>,
    pub faults: FaultSet,
}

/// Reusable state for criticality tests on a spanning subgraph given by an alive mask.
pub(crate) struct CriticalityEngine<'a> {
    g: &'a DiGraph,
    spec: &'a VariantSpec,
    k: usize,
    dead: Vec<bool>,
    scratch_a: SccScratch,
    scratch_b: SccScratch,
    pub(crate) fault_sets_examined: u64,
}

impl<'a> CriticalityEngine<'a> {
    pub(crate) fn new(g: &'a DiGraph, spec: &'a VariantSpec, k: usize) -> Self {
        Self {
            g,
            spec,
            k,
            dead: vec![false; g.m()],
            scratch_a: SccScratch::new(g.n()),
            scratch_b: SccScratch::new(g.n()),
            fault_sets_examined: 0,
        }
    }

    /// Whether failing `faults` (slots) separates a relevant pair once slot `e` is removed too.
    fn evaluate(&mut self, alive: &[bool], e: usize, faults: &[usize]) -> Option<Broken> {
        self.fault_sets_examined += 1;
        let edge = self.g.edges()[e];
        for &f in faults {
            self.dead[f] = true;
        }
        let dead = &self.dead;
        let ca = self.scratch_a.run(self.g, |s| alive[s] && !dead[s]);
        let a = self.scratch_a.labels();
        let result = if a[edge.tail] != a[edge.head] {
            // e lies on no cycle of H - F, so removing it changes no component.
            None
        } else {
            let cb = self.scratch_b.run(self.g, |s| s != e && alive[s] && !dead[s]);
            first_broken(self.spec, a, ca, self.scratch_b.labels(), cb)
        };
        for &f in faults {
            self.dead[f] = false;
        }
        result
    }

    /// Searches fault sets drawn from the alive slots other than `e`, in graded colex order.
    pub(crate) fn find_witness(&mut self, alive: &[bool], e: usize) -> Option<(Broken, Vec<usize>)> {
        let edge = self.g.edges()[e];
        if edge.tail == edge.head {
            return None;
        }
        let universe: Vec<usize> = (0..self.g.m()).filter(|&s| s != e && alive[s]).collect();
        let mut found = None;
        let mut faults = Vec::with_capacity(self.k);
        let _ = for_each_subset(universe.len(), self.k, |idx| {
            faults.clear();
            faults.extend(idx.iter().map(|&i| universe[i]));
            match self.evaluate(alive, e, &faults) {
                Some(b) => {
                    found = Some((b, faults.clone()));
                    ControlFlow::Break(())
                }
                None => ControlFlow::Continue(()),
            }
        });
        found
    }

    fn witness(&self, broken: Broken, faults: &[usize]) -> CriticalWitness {
        CriticalWitness { pair: broken, faults: faults.iter().map(|&s| self.g.edges()[s].id).collect() }
    }
}

/// Whether removing `e` from `g` changes the relation for some fault set of at most `k`
/// other edges. Returns the first witness in graded colex order of fault sets.
pub fn is_ft_critical(g: &DiGraph, e: EdgeId, spec: &VariantSpec, k: usize) -> Result<Option<CriticalWitness>> {
    spec.validate(g)?;
    let slot = g.slot(e).ok_or_else(|| crate::Error::Input(format!("unknown edge id {e}")))?;
    ensure_within_limit(g.m().saturating_sub(1), k, fault_limit(), "criticality test")?;
    let alive = vec![true; g.m()];
    let mut engine = CriticalityEngine::new(g, spec, k);
    Ok(engine.find_witness(&alive, slot).map(|(b, f)| engine.witness(b, &f)))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreserverStats {
    pub input_edges: usize,
    pub output_edges: usize,
    pub passes: usize,
    pub criticality_checks: u64,
    pub fault_sets_examined: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub reseeds: usize,
    /// Outcome of the exhaustive check run by constructions that verify their own output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreserverResult {
    pub kept_edges: BTreeSet<EdgeId>,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<VariantSpec>,
    pub k: usize,
    pub stats: PreserverStats,
    /// Name of the construction that produced the edge set.
    pub provenance: String,
}

/// Removes non-critical edges in ascending id order until a full pass removes nothing.
pub fn greedy_preserver(g: &DiGraph, spec: &VariantSpec, k: usize) -> Result<PreserverResult> {
    spec.validate(g)?;
    ensure_within_limit(g.m().saturating_sub(1), k, fault_limit(), "greedy preserver")?;
    let m = g.m();
    let mut alive = vec![true; m];
    let mut cache: Vec<Option<Vec<usize>>> = vec![None; m];
    let mut engine = CriticalityEngine::new(g, spec, k);
    let mut stats = PreserverStats { input_edges: m, ..PreserverStats::default() };
    loop {
        stats.passes += 1;
        let mut removed = false;
        for e in 0..m {
            if !alive[e] {
                continue;
            }
            stats.criticality_checks += 1;
            if let Some(f) = &mut cache[e] {
                // A witness stays valid on a smaller preserver once its dead edges are dropped.
                f.retain(|&s| alive[s]);
                let f = f.clone();
                if engine.evaluate(&alive, e, &f).is_some() {
                    continue;
                }
            }
            match engine.find_witness(&alive, e) {
                Some((_, f)) => cache[e] = Some(f),
                None => {
                    alive[e] = false;
                    removed = true;
                }
            }
        }
        if !removed {
            break;
        }
    }
    let kept_edges: BTreeSet<EdgeId> = (0..m).filter(|&s| alive[s]).map(|s| g.edges()[s].id).collect();
    stats.output_edges = kept_edges.len();
    stats.fault_sets_examined = engine.fault_sets_examined;
    Ok(PreserverResult {
        kept_edges,
        variant: spec.variant(),
        spec: Some(spec.clone()),
        k,
        stats,
        provenance: "greedy".into(),
    })
}

/// Single-source `k`-fault-tolerant reachability-and-strong-connectivity preserver.
pub fn sscp(g: &DiGraph, source: usize, k: usize) -> Result<PreserverResult> {
    let mut r = greedy_preserver(g, &VariantSpec::SingleSource { source }, k)?;
    r.provenance = "sscp".into();
    Ok(r)
}

/// Global preserver: a single-source preserver from vertex 0 keeps strong connectivity of
/// the whole graph, because the graph is strongly connected exactly when every vertex is in
/// the component of vertex 0.
pub fn global_from_single_source(g: &DiGraph, k: usize) -> Result<PreserverResult> {
    if g.n() == 0 {
        return input("global strong connectivity needs a vertex");
    }
    let mut r = sscp(g, 0, k)?;
    r.variant = Variant::Global;
    r.spec = Some(VariantSpec::Global);
    r.provenance = "global-from-single-source".into();
    Ok(r)
}

/// Builds an s-t preserver from two global preservers. The first augmented graph makes every
/// vertex reach `s` and be reached from `t`, the second makes every vertex be reached from
/// `s` and reach `t`; then strong connectivity of each augmented graph under faults is exactly
/// reachability from `s` to `t`, respectively from `t` to `s`, in the original graph.
pub fn st_from_global<B>(g: &DiGraph, s: usize, t: usize, k: usize, global_builder: B) -> Result<PreserverResult>
where
    B: Fn(&DiGraph, usize) -> Result<PreserverResult>,
{
    VariantSpec::St { s, t }.validate(g)?;
    let n = g.n();
    // Self-loops never affect strong connectivity, so they are left out.
    let first: Vec<(usize, usize)> = (0..n)
        .filter(|&v| v != s)
        .map(|v| (v, s))
        .chain((0..n).filter(|&v| v != t).map(|v| (t, v)))
        .collect();
    let second: Vec<(usize, usize)> = (0..n)
        .filter(|&v| v != s)
        .map(|v| (s, v))
        .chain((0..n).filter(|&v| v != t).map(|v| (v, t)))
        .collect();
    let mut stats = PreserverStats { input_edges: g.m(), ..PreserverStats::default() };
    let mut kept = BTreeSet::new();
    for extra in [first, second] {
        let aug = g.add_edges(&extra)?;
        let r = global_builder(&aug, k)?;
        stats.passes += r.stats.passes;
        stats.criticality_checks += r.stats.criticality_checks;
        stats.fault_sets_examined += r.stats.fault_sets_examined;
        kept.extend(r.kept_edges.into_iter().filter(|id| g.contains_edge(*id)));
    }
    stats.output_edges = kept.len();
    Ok(PreserverResult {
        kept_edges: kept,
        variant: Variant::St,
        spec: Some(VariantSpec::St { s, t }),
        k,
        stats,
        provenance: "st-from-global".into(),
    })
}

/// All-pairs preserver assembled from sourcewise preservers, one per hierarchy component with
/// that component's terminals as sources.
pub fn hierarchy_preserver(g: &DiGraph, k: usize, params: &HierarchyParams) -> Result<PreserverResult> {
    let h = build_hierarchy(g, params)?;
    let mut kept = BTreeSet::new();
    let mut stats = PreserverStats { input_edges: g.m(), ..PreserverStats::default() };
    for cert in &h.certificates {
        let vertices: Vec<usize> = cert.component.iter().copied().collect();
        let ind = g.induced(&vertices)?;
        let sources = cert.terminals.iter().map(|&v| ind.local(v).expect("terminal inside its component")).collect();
        let r = greedy_preserver(&ind.graph, &VariantSpec::Sourcewise { sources }, k)?;
        stats.passes += r.stats.passes;
        stats.criticality_checks += r.stats.criticality_checks;
        stats.fault_sets_examined += r.stats.fault_sets_examined;
        kept.extend(r.kept_edges);
    }
    stats.output_edges = kept.len();
    Ok(PreserverResult {
        kept_edges: kept,
        variant: Variant::AllPairs,
        spec: Some(VariantSpec::AllPairs),
        k,
        stats,
        provenance: "hierarchy".into(),
    })
}
