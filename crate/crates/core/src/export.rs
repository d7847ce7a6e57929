//! Graph serialization: lossless JSON, a flat version-level edge CSV, and
//! package-level DOT / GraphML for visualization tools.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::chain::SupplyChainGraph;
use crate::error::ChainError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    EdgeCsv,
    Dot,
    GraphMl,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Json => "json",
            ExportFormat::EdgeCsv => "csv",
            ExportFormat::Dot => "dot",
            ExportFormat::GraphMl => "graphml",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::Json),
            "edge-csv" | "csv" => Ok(ExportFormat::EdgeCsv),
            "dot" => Ok(ExportFormat::Dot),
            "graphml" => Ok(ExportFormat::GraphMl),
            _ => Err(ChainError::UnsupportedFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExportOptions {
    /// Keep seed packages in DOT / GraphML output.
    pub include_seeds: bool,
}

impl Default for ExportOptions {
    fn default() -> Self {
        ExportOptions {
            include_seeds: true,
        }
    }
}

pub fn export_graph(
    g: &SupplyChainGraph,
    format: ExportFormat,
    options: ExportOptions,
) -> Result<Vec<u8>, ChainError> {
    match format {
        ExportFormat::Json => {
            let mut out =
                serde_json::to_vec_pretty(g).map_err(|e| ChainError::Invariant(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        ExportFormat::EdgeCsv => edge_csv(g),
        ExportFormat::Dot => Ok(dot(g, options).into_bytes()),
        ExportFormat::GraphMl => Ok(graphml(g, options).into_bytes()),
    }
}

pub fn import_graph_json(bytes: &[u8]) -> Result<SupplyChainGraph, serde_json::Error> {
    serde_json::from_slice(bytes)
}

fn edge_csv(g: &SupplyChainGraph) -> Result<Vec<u8>, ChainError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| ChainError::Invariant(e.to_string());
    w.write_record(["up", "down", "up_version", "down_version"])
        .map_err(err)?;
    for e in g.edges.values() {
        for (uv, dv) in e.pairs() {
            w.write_record([e.up.as_str(), e.down.as_str(), uv.raw(), dv.raw()])
                .map_err(err)?;
        }
    }
    w.into_inner()
        .map_err(|e| ChainError::Invariant(e.to_string()))
}

fn visible(g: &SupplyChainGraph, options: ExportOptions) -> impl Iterator<Item = (&str, &str)> {
    g.edges
        .keys()
        .filter(move |(u, d)| options.include_seeds || !(g.is_seed(u) || g.is_seed(d)))
        .map(|(u, d)| (u.as_str(), d.as_str()))
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn dot(g: &SupplyChainGraph, options: ExportOptions) -> String {
    let mut out = String::from("digraph supply_chain {\n");
    for n in g.nodes.values() {
        if n.is_seed && !options.include_seeds {
            continue;
        }
        let _ = write!(out, "  {} [versions={}", dot_id(&n.name), n.vs.len());
        if n.is_seed {
            out.push_str(", shape=box, seed=true");
        }
        out.push_str("];\n");
    }
    for (u, d) in visible(g, options) {
        let _ = writeln!(out, "  {} -> {};", dot_id(u), dot_id(d));
    }
    out.push_str("}\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn graphml(g: &SupplyChainGraph, options: ExportOptions) -> String {
    let mut out = String::from(concat!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
        "  <key id=\"seed\" for=\"node\" attr.name=\"seed\" attr.type=\"boolean\"/>\n",
        "  <key id=\"versions\" for=\"node\" attr.name=\"versions\" attr.type=\"int\"/>\n",
        "  <key id=\"pairs\" for=\"edge\" attr.name=\"version_pairs\" attr.type=\"int\"/>\n",
        "  <graph id=\"supply_chain\" edgedefault=\"directed\">\n",
    ));
    for n in g.nodes.values() {
        if n.is_seed && !options.include_seeds {
            continue;
        }
        let _ = writeln!(
            out,
            "    <node id=\"{}\"><data key=\"seed\">{}</data><data key=\"versions\">{}</data></node>",
            xml_escape(&n.name),
            n.is_seed,
            n.vs.len()
        );
    }
    for (i, (u, d)) in visible(g, options).enumerate() {
        let pairs = g.edges[&(u.to_string(), d.to_string())].pairs().count();
        let _ = writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"{}\" target=\"{}\"><data key=\"pairs\">{pairs}</data></edge>",
            xml_escape(u),
            xml_escape(d)
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}
