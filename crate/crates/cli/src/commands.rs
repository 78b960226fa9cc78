use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;

use anyhow::{bail, Context, Result};
use scc_preserve::expander::{build_hierarchy, HierarchyParams, Phi};
use scc_preserve::families::{
    gen_baswana_tree, gen_bounded_degree_lower, gen_color_fault_lower, gen_random, gen_st_lower, Family,
};
use scc_preserve::fpt::{first_container_seed, fpt_container_all_pairs, fpt_preserver};
use scc_preserve::impcut::{enumerate_important_cuts, important_cut_container, DEFAULT_ENUMERATION_LIMIT};
use scc_preserve::kconn::{default_q, greedy_kconn_preserver, unbreakability_decomposition};
use scc_preserve::preservers::{global_from_single_source, greedy_preserver, hierarchy_preserver, is_ft_critical, sscp, st_from_global};
use scc_preserve::verify::{enumerate_critical_edges, verify_ft_by_cuts, verify_ft_sharded, verify_kconn, verify_kconn_by_cuts};
use scc_preserve::{DiGraph, Direction, EdgeId, PreserverResult, VariantSpec};
use serde_json::{json, Value};

use crate::input::{load, load_preserver, sidecar_path, spec_for, usage};
use crate::{
    Algo, BenchArgs, BuildArgs, CriticalArgs, DecomposeArgs, DirectionArg, GenFamily, HierarchyArgs, ImpcutArgs, Outcome,
    Report, VariantArg, VerifyArgs,
};

pub fn gen(family: GenFamily) -> Result<Report> {
    let (name, output, family) = match family {
        GenFamily::Baswana { k, y, output } => ("baswana", output, gen_baswana_tree(k, y)?),
        GenFamily::StLower { layers, k, output } => ("st-lower", output, gen_st_lower(layers, k)?),
        GenFamily::BoundedDegree { x, y, output } => ("bounded-degree", output, gen_bounded_degree_lower(x, y)?),
        GenFamily::Color { x, y, output } => ("color", output, gen_color_fault_lower(x, y)?),
        GenFamily::Random { n, m, seed, strongly_connected, output } => {
            let g = gen_random(n, m, seed, strongly_connected)?;
            fs::write(&output, g.to_text()).with_context(|| format!("writing {}", output.display()))?;
            let json = json!({
                "command": "gen",
                "family": "random",
                "params": {"n": n, "m": m, "seed": seed, "strongly_connected": strongly_connected},
                "seed": seed,
                "output": output.display().to_string(),
                "sizes": {"n": g.n(), "m": g.m()},
            });
            return Ok(Report::ok(json, format!("random: n={} m={} -> {}", g.n(), g.m(), output.display())));
        }
    };
    let Family { graph, meta } = family;
    fs::write(&output, graph.to_text()).with_context(|| format!("writing {}", output.display()))?;
    let sidecar = sidecar_path(&output);
    let meta_json = serde_json::to_string_pretty(&meta)?;
    fs::write(&sidecar, meta_json + "\n").with_context(|| format!("writing {}", sidecar.display()))?;
    let summary = format!(
        "{name}: n={} m={} cross={} -> {} (+ {})",
        graph.n(),
        graph.m(),
        meta.cross.len(),
        output.display(),
        sidecar.display()
    );
    let json = json!({
        "command": "gen",
        "family": name,
        "params": meta.params,
        "seed": Value::Null,
        "output": output.display().to_string(),
        "sidecar": sidecar.display().to_string(),
        "sizes": {"n": graph.n(), "m": graph.m(), "cross": meta.cross.len()},
        "meta": meta,
    });
    Ok(Report::ok(json, summary))
}

fn run_build(g: &DiGraph, spec: Option<&VariantSpec>, a: &BuildArgs) -> Result<PreserverResult> {
    let k = a.k;
    let Some(spec) = spec else {
        if a.algo != Algo::Greedy {
            bail!(usage("k-connectivity preservers are built with --algo greedy"));
        }
        return Ok(greedy_kconn_preserver(g, k, a.demand_pairs)?);
    };
    let all_pairs_only = |algo: &str| {
        if *spec != VariantSpec::AllPairs {
            bail!(usage(format!("--algo {algo} builds all-pairs preservers only")));
        }
        Ok(())
    };
    Ok(match a.algo {
        Algo::Greedy => greedy_preserver(g, spec, k)?,
        Algo::Hierarchy => {
            all_pairs_only("hierarchy")?;
            hierarchy_preserver(g, k, &HierarchyParams::for_budget(k))?
        }
        Algo::Fpt => {
            all_pairs_only("fpt")?;
            fpt_preserver(g, k, a.seed, a.stop_threshold)?
        }
        Algo::Reduction => match spec {
            VariantSpec::SingleSource { source } => sscp(g, *source, k)?,
            VariantSpec::Global => global_from_single_source(g, k)?,
            VariantSpec::St { s, t } => st_from_global(g, *s, *t, k, global_from_single_source)?,
            _ => bail!(usage("--algo reduction builds single-source, global and st preservers")),
        },
    })
}

fn pair_text(pair: Option<(usize, usize)>) -> String {
    match pair {
        Some((s, t)) => format!("pair ({s}, {t})"),
        None => "the graph".into(),
    }
}

fn variant_name(v: VariantArg) -> &'static str {
    match v {
        VariantArg::AllPairs => "all-pairs",
        VariantArg::SingleSource => "single-source",
        VariantArg::St => "st",
        VariantArg::Global => "global",
        VariantArg::Sourcewise => "sourcewise",
        VariantArg::Kconn => "kconn",
    }
}

fn algo_name(a: Algo) -> &'static str {
    match a {
        Algo::Greedy => "greedy",
        Algo::Hierarchy => "hierarchy",
        Algo::Fpt => "fpt",
        Algo::Reduction => "reduction",
    }
}

pub fn build(a: BuildArgs) -> Result<Report> {
    let loaded = load(&a.target)?;
    let spec = spec_for(a.variant, &a.target, &loaded)?;
    let g = &loaded.graph;
    let r = run_build(g, spec.as_ref(), &a)?;
    let seed = (a.algo == Algo::Fpt).then_some(a.seed);
    let mut json = json!({
        "command": "build",
        "input": loaded.describe(),
        "params": {
            "variant": variant_name(a.variant),
            "algo": algo_name(a.algo),
            "k": a.k,
            "seed": seed,
            "stop_threshold": a.stop_threshold,
            "demand_pairs": a.demand_pairs,
        },
        "seed": seed,
        "variant": r.variant,
        "spec": r.spec,
        "k": r.k,
        "kept_edges": r.kept_edges,
        "sizes": {"n": g.n(), "input_edges": g.m(), "output_edges": r.kept_edges.len()},
        "stats": r.stats,
        "provenance": r.provenance,
    });
    if a.algo == Algo::Fpt {
        let used = r.stats.seed.unwrap_or(a.seed);
        let c = fpt_container_all_pairs(g, a.k, first_container_seed(used))?;
        json["fpt"] = json!({
            "seed_used": used,
            "reseeds": r.stats.reseeds,
            "lambda": c.sample_count,
            "q": c.q,
            "hierarchy_k": c.hierarchy_k,
            "phi": c.phi.to_string(),
            "levels": c.levels,
            "level_container_sizes": c.level_container_sizes,
            "first_container_size": c.edges.len(),
        });
    }
    if let Some(out) = &a.output {
        fs::write(out, serde_json::to_string_pretty(&json)? + "\n").with_context(|| format!("writing {}", out.display()))?;
    }
    let summary = format!(
        "build {} / {} k={}: kept {} of {} edges ({})",
        variant_name(a.variant),
        algo_name(a.algo),
        a.k,
        r.kept_edges.len(),
        g.m(),
        r.provenance
    );
    Ok(Report::ok(json, summary))
}

pub fn verify(a: VerifyArgs) -> Result<Report> {
    let loaded = load(&a.target)?;
    let g = &loaded.graph;
    let file = load_preserver(&a.preserver)?;
    let k = a.k.or(file.k).ok_or_else(|| usage("-k is required when the preserver file does not record it"))?;
    let spec = match a.variant {
        Some(v) => spec_for(v, &a.target, &loaded)?,
        None if file.kconn => None,
        None => Some(file.spec.clone().unwrap_or(VariantSpec::AllPairs)),
    };
    let mut json = json!({
        "command": "verify",
        "input": loaded.describe(),
        "params": {"k": k, "spec": spec, "by_cuts": a.by_cuts, "shards": a.shards},
        "seed": Value::Null,
        "kept_edges": file.kept,
        "sizes": {"n": g.n(), "input_edges": g.m(), "output_edges": file.kept.len()},
    });
    let what = spec.as_ref().map_or("kconn".to_string(), |s| s.variant().to_string());
    let (ok, detail) = match (&spec, a.by_cuts) {
        (None, false) => {
            let r = verify_kconn(g, &file.kept, k)?;
            let detail = r.counterexample.as_ref().map(|c| {
                format!("pair {:?}: connectivity {} in the graph, {} in the preserver", c.pair, c.expected, c.found)
            });
            json["counterexample"] = json!(r.counterexample);
            (r.ok, detail)
        }
        (None, true) => (verify_kconn_by_cuts(g, &file.kept, k)?, None),
        (Some(VariantSpec::AllPairs), true) => (verify_ft_by_cuts(g, &file.kept, k)?, None),
        (Some(_), true) => bail!(usage("--by-cuts decides the all-pairs and kconn variants only")),
        (Some(spec), false) => {
            let r = verify_ft_sharded(g, &file.kept, spec, k, a.shards)?;
            json["fault_sets_checked"] = json!(r.fault_sets_checked);
            let detail = r.counterexample.as_ref().map(|c| {
                let faults: Vec<String> = c.faults.iter().map(EdgeId::to_string).collect();
                format!("{} separated under faults {{{}}}", pair_text(c.pair), faults.join(", "))
            });
            json["counterexample"] = json!(r.counterexample);
            (r.ok, detail)
        }
    };
    json["ok"] = json!(ok);
    let mut summary = format!("verify {what} k={k}: {}", if ok { "ok" } else { "FAILED" });
    if let Some(d) = detail {
        let _ = write!(summary, "; {d}");
    }
    Ok(Report {
        json,
        summary,
        outcome: if ok { Outcome::Success } else { Outcome::VerificationFailed },
    })
}

pub fn hierarchy(a: HierarchyArgs) -> Result<Report> {
    let loaded = load(&a.target)?;
    let phi: Phi = a.phi.parse().map_err(|_| usage(format!("phi must be a fraction like 1/2, got `{}`", a.phi)))?;
    let params = HierarchyParams::new(a.q.unwrap_or(2 * a.k), a.k, phi)?;
    let h = build_hierarchy(&loaded.graph, &params)?;
    let summary = format!(
        "hierarchy q={} k={} phi={}: {} levels, sizes {:?}",
        params.q,
        params.k,
        params.phi,
        h.level_count(),
        h.levels.iter().map(BTreeSet::len).collect::<Vec<_>>()
    );
    let json = json!({
        "command": "hierarchy",
        "input": loaded.describe(),
        "params": {"q": params.q, "k": params.k, "phi": params.phi.to_string()},
        "seed": Value::Null,
        "levels": h.levels,
        "certificates": h.certificates,
        "exact": h.exact,
        "sizes": {"levels": h.level_count()},
    });
    Ok(Report::ok(json, summary))
}

pub fn decompose(a: DecomposeArgs) -> Result<Report> {
    let loaded = load(&a.target)?;
    let q = a.q.unwrap_or_else(|| default_q(loaded.graph.n(), a.k));
    let d = unbreakability_decomposition(&loaded.graph, q, a.k)?;
    let summary = format!("decompose q={q} k={}: {} parts, {} cuts", a.k, d.parts.len(), d.cuts.len());
    let json = json!({
        "command": "decompose",
        "input": loaded.describe(),
        "params": {"q": q, "k": a.k},
        "seed": Value::Null,
        "parts": d.parts,
        "cuts": d.cuts,
        "sizes": {"parts": d.parts.len()},
    });
    Ok(Report::ok(json, summary))
}

pub fn impcut(a: ImpcutArgs) -> Result<Report> {
    let loaded = load(&a.target)?;
    let g = &loaded.graph;
    let direction = match a.direction {
        DirectionArg::Out => Direction::Out,
        DirectionArg::In => Direction::In,
    };
    let outcome = important_cut_container(g, &a.x, &a.y, a.k, direction)?;
    let summary = match outcome.container() {
        Some(c) => format!(
            "impcut k={}: min cut {}, container side {:?} with {} boundary edges",
            a.k,
            c.lambda,
            c.side,
            c.boundary.len()
        ),
        None => format!("impcut k={}: every cut exceeds k", a.k),
    };
    let mut json = json!({
        "command": "impcut",
        "input": loaded.describe(),
        "params": {"x": a.x, "y": a.y, "k": a.k, "direction": direction},
        "seed": Value::Null,
        "container": outcome,
    });
    if a.enumerate {
        let cuts = enumerate_important_cuts(g, &a.x, &a.y, a.k, direction, DEFAULT_ENUMERATION_LIMIT)?;
        json["important_cuts"] = json!(cuts);
    }
    Ok(Report::ok(json, summary))
}

pub fn critical(a: CriticalArgs) -> Result<Report> {
    let loaded = load(&a.target)?;
    let g = &loaded.graph;
    let spec = spec_for(a.variant, &a.target, &loaded)?
        .ok_or_else(|| usage("critical edges are defined for fault-tolerance variants, not kconn"))?;
    let mut json = json!({
        "command": "critical",
        "input": loaded.describe(),
        "params": {"spec": spec, "k": a.k, "edge": a.edge},
        "seed": Value::Null,
    });
    let summary = match a.edge {
        Some(e) => {
            let id = EdgeId(e);
            if !g.contains_edge(id) {
                bail!(usage(format!("unknown edge id {e}")));
            }
            let w = is_ft_critical(g, id, &spec, a.k)?;
            let summary = match &w {
                Some(w) => format!("{id} is critical: {} under {} faults", pair_text(w.pair), w.faults.len()),
                None => format!("{id} is not critical"),
            };
            json["critical"] = json!(w.is_some());
            json["witness"] = json!(w);
            summary
        }
        None => {
            let edges = enumerate_critical_edges(g, &spec, a.k)?;
            json["critical_edges"] = json!(edges);
            json["sizes"] = json!({"m": g.m(), "critical": edges.len()});
            format!("{} of {} edges are critical for {} k={}", edges.len(), g.m(), spec.variant(), a.k)
        }
    };
    Ok(Report::ok(json, summary))
}

struct BenchGraph {
    name: String,
    graph: DiGraph,
    st: Option<(usize, usize)>,
}

fn bench_corpus(a: &BenchArgs) -> Result<Vec<BenchGraph>> {
    let family = |name: &str, f: Family| BenchGraph {
        name: name.to_string(),
        st: f.meta.t.map(|t| (f.meta.s, t)),
        graph: f.graph,
    };
    let mut corpus = vec![
        family("st-lower(2,2)", gen_st_lower(2, 2)?),
        family("baswana(2,3)", gen_baswana_tree(2, 3)?),
        family("bounded-degree(4,2)", gen_bounded_degree_lower(4, 2)?),
        family("baswana(1,2)", gen_baswana_tree(1, 2)?),
    ];
    for i in 0..a.random {
        let seed = a.seed.wrapping_add(i as u64);
        corpus.push(BenchGraph {
            name: format!("random(8,12,{seed})"),
            graph: gen_random(8, 12, seed, true)?,
            st: None,
        });
    }
    Ok(corpus)
}

pub fn bench(a: BenchArgs) -> Result<Report> {
    let k = a.k;
    let mut rows = Vec::new();
    let mut table = format!("{:<22} {:>4} {:>4} {:>9} {:>9} {:>6} {:>6} {:>9} {:>5} {:>5}\n", "graph", "n", "m", "all-pairs", "hierarchy", "fpt", "sscp", "st", "glob", "kconn");
    let mut all_ok = true;
    for b in bench_corpus(&a)? {
        let g = &b.graph;
        let (s, t) = b.st.unwrap_or((0, g.n() - 1));
        let st_spec = VariantSpec::St { s, t };
        let built: Vec<(&str, VariantSpec, PreserverResult)> = vec![
            ("all_pairs", VariantSpec::AllPairs, greedy_preserver(g, &VariantSpec::AllPairs, k)?),
            ("hierarchy", VariantSpec::AllPairs, hierarchy_preserver(g, k, &HierarchyParams::for_budget(k))?),
            ("fpt", VariantSpec::AllPairs, fpt_preserver(g, k, a.seed, None)?),
            ("single_source", VariantSpec::SingleSource { source: 0 }, sscp(g, 0, k)?),
            ("st", st_spec.clone(), greedy_preserver(g, &st_spec, k)?),
            ("global", VariantSpec::Global, global_from_single_source(g, k)?),
        ];
        let kconn = greedy_kconn_preserver(g, k, true)?;
        let mut row = json!({"graph": b.name, "n": g.n(), "m": g.m()});
        let mut verified = serde_json::Map::new();
        for (name, spec, r) in &built {
            row[*name] = json!(r.kept_edges.len());
            if a.verify {
                let ok = verify_ft_sharded(g, &r.kept_edges, spec, k, 1)?.ok;
                all_ok &= ok;
                verified.insert((*name).into(), json!(ok));
            }
        }
        row["kconn"] = json!(kconn.kept_edges.len());
        if a.verify {
            let ok = verify_kconn(g, &kconn.kept_edges, k)?.ok;
            all_ok &= ok;
            verified.insert("kconn".into(), json!(ok));
            row["verified"] = Value::Object(verified);
        }
        let size = |i: usize| built[i].2.kept_edges.len();
        let _ = writeln!(
            table,
            "{:<22} {:>4} {:>4} {:>9} {:>9} {:>6} {:>6} {:>9} {:>5} {:>5}",
            b.name,
            g.n(),
            g.m(),
            size(0),
            size(1),
            size(2),
            size(3),
            size(4),
            size(5),
            kconn.kept_edges.len()
        );
        rows.push(row);
    }
    if a.verify {
        table.push_str(if all_ok { "all outputs verified\n" } else { "VERIFICATION FAILED\n" });
    }
    let json = json!({
        "command": "bench",
        "params": {"k": k, "seed": a.seed, "random": a.random, "verify": a.verify},
        "seed": a.seed,
        "rows": rows,
    });
    Ok(Report {
        json,
        summary: table.trim_end().to_string(),
        outcome: if all_ok { Outcome::Success } else { Outcome::VerificationFailed },
    })
}
