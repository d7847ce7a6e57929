use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use chainforge::chain::{build_supply_chain, BuildOptions};
use chainforge::cluster::{analyze, cluster_dot, LeidenParams, Shape};
use chainforge::dynamics::{disengagement_report, DisengageOptions};
use chainforge::export::{export_graph, ExportFormat, ExportOptions};
use chainforge::registry::{DbOptions, DependencyDb, Registry};
use chrono::Utc;
use serde_json::json;

use crate::files::{load_db, load_graph, open, to_json, write_one, Staged};
use crate::{BuildArgs, ClusterArgs, DisengageArgs, ExportArgs, IngestArgs, LeidenArgs};

impl From<LeidenArgs> for LeidenParams {
    fn from(a: LeidenArgs) -> Self {
        LeidenParams {
            rng_seed: a.rng_seed,
            resolution: a.resolution,
            max_passes: a.max_passes,
        }
    }
}

pub fn ingest_db(a: &IngestArgs, stable: bool) -> Result<()> {
    let registry = Registry::ingest(open(&a.input)?)
        .with_context(|| format!("ingesting {}", a.input.display()))?;
    let mut db = DependencyDb::build(
        &registry,
        DbOptions {
            include_extra_gated: a.include_extra_gated,
        },
    );
    if !stable {
        db.set_built_at(Some(Utc::now()));
    }
    let mut staged = Staged::default();
    staged.add_with(&a.db, |w| db.write_to(w).map_err(Into::into))?;
    staged.commit()?;
    print!("{}", String::from_utf8(to_json(db.manifest())?)?);
    Ok(())
}

pub fn build_sc(a: &BuildArgs, stable: bool) -> Result<()> {
    let db = load_db(&a.db)?;
    let formats = a
        .format
        .iter()
        .map(|f| f.parse::<ExportFormat>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut g = build_supply_chain(
        &db,
        &a.seeds,
        BuildOptions {
            skip_unknown_seeds: a.skip_unknown_seeds,
        },
    )?;
    if !stable {
        g.built_at = Some(Utc::now());
    }
    let mut staged = Staged::default();
    staged.add(
        &a.out.join("graph.json"),
        &export_graph(&g, ExportFormat::Json, ExportOptions::default())?,
    )?;
    for f in formats.into_iter().filter(|f| *f != ExportFormat::Json) {
        let path = a.out.join(format!("graph.{}", f.extension()));
        staged.add(&path, &export_graph(&g, f, ExportOptions::default())?)?;
    }
    staged.commit()?;
    println!("{}", serde_json::to_string(&g.stats())?);
    Ok(())
}

pub fn clusters(a: &ClusterArgs) -> Result<()> {
    let g = load_graph(&a.input)?;
    let analysis = analyze(&g, a.leiden.into());
    let mut staged = Staged::default();
    staged.add(&a.out.join("clusters.json"), &to_json(&analysis)?)?;
    if a.dot {
        for c in &analysis.clusters {
            let path = a
                .out
                .join("clusters")
                .join(format!("cluster-{:04}.dot", c.id));
            staged.add(&path, cluster_dot(c).as_bytes())?;
        }
    }
    staged.commit()?;
    let shapes: BTreeMap<Shape, usize> = analysis
        .summary
        .shapes
        .iter()
        .map(|s| (s.shape, s.clusters))
        .collect();
    let line = json!({
        "clusters": analysis.clusters.len(),
        "isolated": analysis.isolated,
        "modularity": analysis.modularity,
        "shapes": shapes,
    });
    println!("{line}");
    Ok(())
}

pub fn disengagement(a: &DisengageArgs) -> Result<()> {
    let g = load_graph(&a.input)?;
    let db = load_db(&a.db)?;
    let report = disengagement_report(
        &g,
        db.registry(),
        DisengageOptions {
            include_prereleases: a.include_prereleases,
        },
    )?;
    write_one(&a.out.join("disengagement.json"), &to_json(&report)?)?;
    println!("{}", serde_json::to_string(&report.summary)?);
    Ok(())
}

pub fn export(a: &ExportArgs) -> Result<()> {
    let g = load_graph(&a.input)?;
    let format: ExportFormat = a.format.parse()?;
    let options = ExportOptions {
        include_seeds: !a.no_seeds,
    };
    if a.out.is_dir() {
        bail!("--out {} is a directory", a.out.display());
    }
    write_one(&a.out, &export_graph(&g, format, options)?)
}
