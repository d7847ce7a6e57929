//! Disengagement detection, quarterly trends and download-based popularity.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use chrono::{DateTime, Datelike, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::chain::SupplyChainGraph;
use crate::error::DynamicsError;
use crate::registry::Registry;
use crate::requirement::normalize_name;
use crate::version::Version;

pub use crate::stats::{
    holm_bonferroni, mann_whitney_u, proportion_z_test, Alternative, MannWhitney, ZTest,
};

pub const UNKNOWN_QUARTER: &str = "unknown";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisengageOptions {
    /// Count pre-releases when picking the latest version on either side.
    pub include_prereleases: bool,
}

impl Default for DisengageOptions {
    fn default() -> Self {
        DisengageOptions {
            include_prereleases: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisengagementRecord {
    pub package: String,
    pub v_sc: Version,
    pub v_pypi: Version,
    /// Upload time of the first release after `v_sc`, never earlier than
    /// the upload of `v_sc` itself.
    pub event_time: Option<DateTime<Utc>>,
    pub quarter: String,
}

pub fn quarter_of(t: &DateTime<Utc>) -> String {
    format!("{}Q{}", t.year(), t.month0() / 3 + 1)
}

fn parse_quarter(q: &str) -> Option<(i32, u32)> {
    let (y, n) = q.split_once('Q')?;
    let n: u32 = n.parse().ok()?;
    (1..=4).contains(&n).then_some(())?;
    Some((y.parse().ok()?, n))
}

/// Status of one non-seed package.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Engagement {
    Disengaged(Box<DisengagementRecord>),
    Current,
    /// No version qualifies under the pre-release filter.
    Unassessed,
}

fn check_hash(g: &SupplyChainGraph, r: &Registry) -> Result<(), DynamicsError> {
    if !g.registry_hash.is_empty() && g.registry_hash != r.hash() {
        return Err(DynamicsError::HashMismatch {
            graph: g.registry_hash.clone(),
            registry: r.hash().to_string(),
        });
    }
    Ok(())
}

fn assess(
    package: &str,
    vs: &BTreeSet<Version>,
    r: &Registry,
    options: DisengageOptions,
) -> Result<Engagement, DynamicsError> {
    let keep = |v: &Version| options.include_prereleases || !v.is_prerelease();
    let Some(v_sc) = vs.iter().rev().find(|v| keep(v)) else {
        return Ok(Engagement::Unassessed);
    };
    let sc_release = r
        .release(package, v_sc)
        .ok_or_else(|| DynamicsError::RegistryMismatch {
            package: package.to_string(),
            version: v_sc.to_string(),
        })?;
    let releases: Vec<_> = r
        .releases(package)
        .unwrap_or_default()
        .iter()
        .filter(|rel| keep(&rel.version))
        .collect();
    let Some(latest) = releases.last() else {
        return Ok(Engagement::Unassessed);
    };
    if v_sc > &latest.version {
        return Err(DynamicsError::AheadOfRegistry(package.to_string()));
    }
    if v_sc == &latest.version {
        return Ok(Engagement::Current);
    }
    let next = releases
        .iter()
        .find(|rel| &rel.version > v_sc)
        .expect("a newer release exists");
    let event_time = next.upload_time.map(|t| match sc_release.upload_time {
        Some(base) if base > t => base,
        _ => t,
    });
    Ok(Engagement::Disengaged(Box::new(DisengagementRecord {
        package: package.to_string(),
        v_sc: v_sc.clone(),
        v_pypi: latest.version.clone(),
        quarter: event_time
            .as_ref()
            .map_or_else(|| UNKNOWN_QUARTER.to_string(), quarter_of),
        event_time,
    })))
}

/// Engagement status of every non-seed package, keyed by name.
pub fn classify_engagement(
    g: &SupplyChainGraph,
    r: &Registry,
    options: DisengageOptions,
) -> Result<BTreeMap<String, Engagement>, DynamicsError> {
    check_hash(g, r)?;
    g.nodes
        .values()
        .filter(|n| !n.is_seed)
        .map(|n| Ok((n.name.clone(), assess(&n.name, &n.vs, r, options)?)))
        .collect()
}

/// Packages whose latest supply-chain version is older than their latest
/// registry version, in name order.
pub fn detect_disengaged(
    g: &SupplyChainGraph,
    r: &Registry,
    options: DisengageOptions,
) -> Result<Vec<DisengagementRecord>, DynamicsError> {
    Ok(classify_engagement(g, r, options)?
        .into_values()
        .filter_map(|e| match e {
            Engagement::Disengaged(rec) => Some(*rec),
            _ => None,
        })
        .collect())
}

/// Count per calendar quarter over the observed span, with empty quarters
/// present as 0. Records without a timestamp are tallied under `unknown`.
pub fn quarterly_trend(records: &[DisengagementRecord]) -> BTreeMap<String, usize> {
    let mut out: BTreeMap<String, usize> = BTreeMap::new();
    let mut known: Vec<(i32, u32)> = Vec::new();
    for rec in records {
        match parse_quarter(&rec.quarter) {
            Some(q) => known.push(q),
            None => *out.entry(UNKNOWN_QUARTER.to_string()).or_insert(0) += 1,
        }
    }
    if let (Some(&first), Some(&last)) = (known.iter().min(), known.iter().max()) {
        let (mut y, mut q) = first;
        while (y, q) <= last {
            out.insert(format!("{y}Q{q}"), 0);
            (y, q) = if q == 4 { (y + 1, 1) } else { (y, q + 1) };
        }
    }
    for (y, q) in known {
        *out.entry(format!("{y}Q{q}")).or_insert(0) += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisengagementSummary {
    pub assessed: usize,
    pub disengaged: usize,
    pub current: usize,
    pub unassessed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisengagementReport {
    pub registry_hash: String,
    pub options: DisengageOptions,
    pub summary: DisengagementSummary,
    pub records: Vec<DisengagementRecord>,
    pub trend: BTreeMap<String, usize>,
}

pub fn disengagement_report(
    g: &SupplyChainGraph,
    r: &Registry,
    options: DisengageOptions,
) -> Result<DisengagementReport, DynamicsError> {
    let all = classify_engagement(g, r, options)?;
    let mut summary = DisengagementSummary {
        assessed: 0,
        disengaged: 0,
        current: 0,
        unassessed: 0,
    };
    let mut records = Vec::new();
    for e in all.into_values() {
        match e {
            Engagement::Disengaged(rec) => {
                summary.assessed += 1;
                summary.disengaged += 1;
                records.push(*rec);
            }
            Engagement::Current => {
                summary.assessed += 1;
                summary.current += 1;
            }
            Engagement::Unassessed => summary.unassessed += 1,
        }
    }
    let trend = quarterly_trend(&records);
    Ok(DisengagementReport {
        registry_hash: r.hash().to_string(),
        options,
        summary,
        records,
        trend,
    })
}

/// Monthly download counts keyed by normalized package name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DownloadsTable {
    pub counts: BTreeMap<String, u64>,
    pub window: Option<(NaiveDate, NaiveDate)>,
}

#[derive(Debug, Deserialize)]
struct DownloadsRow {
    package: String,
    downloads: String,
}

impl DownloadsTable {
    /// Reads CSV with a `package,downloads` header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, DynamicsError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut counts = BTreeMap::new();
        for (i, row) in rdr.deserialize::<DownloadsRow>().enumerate() {
            let line = i + 2;
            let bad = |reason: String| DynamicsError::Downloads { line, reason };
            let row = row.map_err(|e| bad(e.to_string()))?;
            let name = normalize_name(&row.package).map_err(|e| bad(e.to_string()))?;
            let n: u64 = row.downloads.parse().map_err(|_| {
                bad(format!(
                    "downloads {:?} is not a non-negative integer",
                    row.downloads
                ))
            })?;
            if counts.insert(name.clone(), n).is_some() {
                return Err(bad(format!("duplicate package {name:?}")));
            }
        }
        Ok(DownloadsTable {
            counts,
            window: None,
        })
    }

    pub fn with_window(mut self, start: NaiveDate, end: NaiveDate) -> Self {
        self.window = Some((start, end));
        self
    }

    /// Missing packages count as 0.
    pub fn get(&self, package: &str) -> u64 {
        normalize_name(package)
            .ok()
            .and_then(|n| self.counts.get(&n).copied())
            .unwrap_or(0)
    }

    /// Mean over every entry; 0 for an empty table.
    pub fn mean(&self) -> f64 {
        if self.counts.is_empty() {
            return 0.0;
        }
        self.counts.values().map(|&c| c as f64).sum::<f64>() / self.counts.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopularityThreshold {
    EcosystemMean,
    Explicit(f64),
}

impl PopularityThreshold {
    pub fn resolve(self, table: &DownloadsTable) -> f64 {
        match self {
            PopularityThreshold::EcosystemMean => table.mean(),
            PopularityThreshold::Explicit(t) => t,
        }
    }
}

/// Members with strictly more downloads than the threshold.
pub fn popular_packages<'a, I>(
    members: I,
    table: &DownloadsTable,
    mode: PopularityThreshold,
) -> BTreeSet<String>
where
    I: IntoIterator<Item = &'a String>,
{
    let threshold = mode.resolve(table);
    members
        .into_iter()
        .filter(|m| table.get(m) as f64 > threshold)
        .cloned()
        .collect()
}
