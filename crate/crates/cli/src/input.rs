use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use scc_preserve::families::FamilyMeta;
use scc_preserve::{DiGraph, EdgeId, VariantSpec};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{Target, VariantArg};

pub struct Loaded {
    pub graph: DiGraph,
    pub path: PathBuf,
    pub sha256: String,
    pub meta: Option<FamilyMeta>,
}

impl Loaded {
    pub fn describe(&self) -> Value {
        json!({
            "path": self.path.display().to_string(),
            "sha256": self.sha256,
            "n": self.graph.n(),
            "m": self.graph.m(),
        })
    }
}

/// `g.txt` -> `g.meta.json`.
pub fn sidecar_path(graph: &Path) -> PathBuf {
    graph.with_extension("meta.json")
}

pub fn load(target: &Target) -> Result<Loaded> {
    let path = target
        .graph
        .clone()
        .or_else(|| target.graph_pos.clone())
        .ok_or_else(|| usage("a graph file is required (positional or --graph)"))?;
    let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| usage(format!("{} is not UTF-8", path.display())))?;
    let graph = DiGraph::parse(text).with_context(|| format!("parsing {}", path.display()))?;
    let sidecar = sidecar_path(&path);
    let meta = if sidecar.exists() {
        let raw = fs::read_to_string(&sidecar).with_context(|| format!("reading {}", sidecar.display()))?;
        Some(serde_json::from_str(&raw).with_context(|| format!("parsing {}", sidecar.display()))?)
    } else {
        None
    };
    Ok(Loaded { graph, path, sha256: hex::encode(Sha256::digest(&bytes)), meta })
}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(scc_preserve::Error::Input(msg.into()))
}

/// The variant spec selected on the command line; `None` for k-connectivity.
/// Missing `s`/`t` fall back to the generator sidecar.
pub fn spec_for(variant: VariantArg, target: &Target, loaded: &Loaded) -> Result<Option<VariantSpec>> {
    let spec = match variant {
        VariantArg::AllPairs => VariantSpec::AllPairs,
        VariantArg::Global => VariantSpec::Global,
        VariantArg::Kconn => return Ok(None),
        VariantArg::SingleSource => VariantSpec::SingleSource {
            source: target.source.or(target.s).ok_or_else(|| usage("single-source needs --source"))?,
        },
        VariantArg::St => {
            let meta = loaded.meta.as_ref();
            let s = target.s.or(meta.map(|m| m.s)).ok_or_else(|| usage("st needs -s (or a sidecar)"))?;
            let t = target.t.or(meta.and_then(|m| m.t)).ok_or_else(|| usage("st needs -t (or a sidecar)"))?;
            VariantSpec::St { s, t }
        }
        VariantArg::Sourcewise => {
            if target.sources.is_empty() {
                bail!(usage("sourcewise needs --sources"));
            }
            VariantSpec::Sourcewise { sources: target.sources.clone() }
        }
    };
    spec.validate(&loaded.graph)?;
    Ok(Some(spec))
}

/// What a preserver file records.
pub struct PreserverFile {
    pub kept: BTreeSet<EdgeId>,
    pub spec: Option<VariantSpec>,
    pub kconn: bool,
    pub k: Option<usize>,
}

/// Accepts a `build` report or a bare JSON array of edge ids.
pub fn load_preserver(path: &Path) -> Result<PreserverFile> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&raw).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let ids = match &value {
        Value::Array(_) => value.clone(),
        Value::Object(map) => map.get("kept_edges").cloned().ok_or_else(|| usage("preserver JSON has no kept_edges"))?,
        _ => bail!(usage("preserver JSON must be an object or an array")),
    };
    let kept: BTreeSet<EdgeId> = serde_json::from_value(ids).map_err(|e| usage(format!("kept_edges: {e}")))?;
    let spec = match value.get("spec") {
        Some(Value::Null) | None => None,
        Some(s) => Some(serde_json::from_value(s.clone()).map_err(|e| usage(format!("spec: {e}")))?),
    };
    let kconn = value.get("variant").and_then(Value::as_str) == Some("k_connectivity");
    let k = value.get("k").and_then(Value::as_u64).map(|k| k as usize);
    Ok(PreserverFile { kept, spec, kconn, k })
}
