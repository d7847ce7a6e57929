use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Result};
use chainforge::chain::{GraphStats, SupplyChainGraph};
use chainforge::cluster::{analyze, ClusterAnalysis, LeidenParams};
use chainforge::dynamics::{
    disengagement_report, popular_packages, DisengageOptions, DisengagementSummary, DownloadsTable,
    PopularityThreshold,
};
use serde::Serialize;

use crate::files::{load_db, load_graph, open, to_json, write_one};
use crate::{ReportArgs, ReportFormat, Section};

#[derive(Debug, Serialize)]
struct GraphSection {
    seeds: Vec<String>,
    #[serde(flatten)]
    stats: GraphStats,
}

#[derive(Debug, Serialize)]
struct PopularitySection {
    threshold: f64,
    mode: PopularityThreshold,
    members: usize,
    popular: Vec<String>,
}

#[derive(Debug, Serialize)]
struct DisengagementSection {
    summary: DisengagementSummary,
    trend: BTreeMap<String, usize>,
}

#[derive(Debug, Serialize)]
struct Report {
    registry_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph: Option<GraphSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shapes: Option<ClusterAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    popularity: Option<PopularitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    disengagement: Option<DisengagementSection>,
}

fn missing_inputs(a: &ReportArgs) -> Vec<String> {
    let mut out = Vec::new();
    let mut need = |ok: bool, what: &str| {
        if !ok && !out.iter().any(|m| m == what) {
            out.push(what.to_string());
        }
    };
    for s in &a.sections {
        let input = a.input.as_ref().is_some_and(|p| p.is_file());
        need(input, "--input (graph JSON)");
        match s {
            Section::Popularity => need(
                a.downloads.as_ref().is_some_and(|p| p.is_file()),
                "--downloads (CSV)",
            ),
            Section::Disengagement => need(
                a.db.as_ref().is_some_and(|p| p.is_file()),
                "--db (database)",
            ),
            Section::Graph | Section::Shapes => {}
        }
    }
    out
}

fn build(a: &ReportArgs, g: &SupplyChainGraph) -> Result<Report> {
    let mut report = Report {
        registry_hash: g.registry_hash.clone(),
        graph: None,
        shapes: None,
        popularity: None,
        disengagement: None,
    };
    let mut sections = a.sections.clone();
    sections.sort();
    sections.dedup();
    for s in sections {
        match s {
            Section::Graph => {
                report.graph = Some(GraphSection {
                    seeds: g.seeds.clone(),
                    stats: g.stats(),
                });
            }
            Section::Shapes => {
                report.shapes = Some(analyze(g, LeidenParams::from(a.leiden)));
            }
            Section::Popularity => {
                let path = a.downloads.as_ref().expect("checked");
                let table = DownloadsTable::from_csv(open(path)?)?;
                let mode = a.threshold.map_or(
                    PopularityThreshold::EcosystemMean,
                    PopularityThreshold::Explicit,
                );
                let members: Vec<&String> = g
                    .nodes
                    .values()
                    .filter(|n| !n.is_seed)
                    .map(|n| &n.name)
                    .collect();
                let popular = popular_packages(members.iter().copied(), &table, mode);
                report.popularity = Some(PopularitySection {
                    threshold: mode.resolve(&table),
                    mode,
                    members: members.len(),
                    popular: popular.into_iter().collect(),
                });
            }
            Section::Disengagement => {
                let db = load_db(a.db.as_ref().expect("checked"))?;
                let d = disengagement_report(
                    g,
                    db.registry(),
                    DisengageOptions {
                        include_prereleases: a.include_prereleases,
                    },
                )?;
                report.disengagement = Some(DisengagementSection {
                    summary: d.summary,
                    trend: d.trend,
                });
            }
        }
    }
    Ok(report)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"))
}

fn markdown(r: &Report) -> String {
    let mut out = String::from("# Supply-chain report\n\n");
    let _ = writeln!(out, "Registry: `{}`\n", r.registry_hash);
    if let Some(g) = &r.graph {
        let _ = writeln!(out, "## Graph\n");
        let _ = writeln!(
            out,
            "| seeds | packages | versions | edges |\n|---|---|---|---|"
        );
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |\n",
            g.seeds.join(", "),
            g.stats.packages,
            g.stats.versions,
            g.stats.edges
        );
    }
    if let Some(s) = &r.shapes {
        let _ = writeln!(out, "## Cluster shapes\n");
        let _ = writeln!(
            out,
            "Pruned graph: {} nodes, {} with edges, {} edges. Isolated: {} ({:.1}%). Clusters: {}. Modularity: {:.4}.\n",
            s.pruned.nodes,
            s.pruned.active_nodes,
            s.pruned.edges,
            s.isolated.count,
            100.0 * s.isolated.ratio,
            s.clusters.len(),
            s.modularity
        );
        let _ = writeln!(
            out,
            "| shape | clusters | % clusters | packages | % packages | median avg degree | mean depth |\n|---|---|---|---|---|---|---|"
        );
        for x in &s.summary.shapes {
            let _ = writeln!(
                out,
                "| {} | {} | {:.1} | {} | {:.1} | {} | {} |",
                x.shape,
                x.clusters,
                x.cluster_pct,
                x.packages,
                x.package_pct,
                fmt_opt(x.median_avg_degree),
                fmt_opt(x.mean_depth)
            );
        }
        out.push('\n');
        if !s.summary.large_clusters.is_empty() {
            let _ = writeln!(
                out,
                "| large cluster | shape | size | core |\n|---|---|---|---|"
            );
            for c in &s.summary.large_clusters {
                let _ = writeln!(out, "| {} | {} | {} | {} |", c.id, c.shape, c.size, c.core);
            }
            out.push('\n');
        }
    }
    if let Some(p) = &r.popularity {
        let _ = writeln!(out, "## Popularity\n");
        let _ = writeln!(
            out,
            "{} of {} packages exceed {:.1} monthly downloads.\n",
            p.popular.len(),
            p.members,
            p.threshold
        );
        for name in &p.popular {
            let _ = writeln!(out, "- {name}");
        }
        if !p.popular.is_empty() {
            out.push('\n');
        }
    }
    if let Some(d) = &r.disengagement {
        let _ = writeln!(out, "## Disengagement\n");
        let _ = writeln!(
            out,
            "{} disengaged, {} current, {} unassessed.\n",
            d.summary.disengaged, d.summary.current, d.summary.unassessed
        );
        if !d.trend.is_empty() {
            let _ = writeln!(out, "| quarter | packages |\n|---|---|");
            for (q, n) in &d.trend {
                let _ = writeln!(out, "| {q} | {n} |");
            }
            out.push('\n');
        }
    }
    out
}

pub fn run(a: &ReportArgs) -> Result<()> {
    let missing = missing_inputs(a);
    if !missing.is_empty() {
        bail!("missing inputs: {}", missing.join(", "));
    }
    let g = load_graph(a.input.as_ref().expect("checked"))?;
    let report = build(a, &g)?;
    let bytes = match a.format {
        ReportFormat::Json => to_json(&report)?,
        ReportFormat::Markdown => markdown(&report).into_bytes(),
    };
    match &a.out {
        Some(path) => write_one(path, &bytes),
        None => {
            print!("{}", String::from_utf8(bytes)?);
            Ok(())
        }
    }
}
