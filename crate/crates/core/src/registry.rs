//! Registry metadata ingestion and the version-level dependency database.
//!
//! A [`Registry`] holds one [`ReleaseRecord`] per (package, version). The
//! [`DependencyDb`] resolves every release's `requires_dist` against the
//! registry and stores one record per (upstream release, downstream release)
//! pair whose upstream version satisfies the declared constraint.
//!
//! Records are kept as a sorted table of integer ids: package ids follow name
//! order and version ids follow version order inside each package, so the
//! sort order of the table is the `(up_name, up_version, down_name,
//! down_version)` order and lookups are binary searches.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Read, Write};

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::RegistryError;
use crate::requirement::{normalize_name, Requirement};
use crate::version::Version;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReleaseRecord {
    pub package: String,
    pub version: Version,
    pub upload_time: Option<DateTime<Utc>>,
    /// Union of the `requires_dist` entries of all distributions of this version.
    pub requires_dist: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub lines: u64,
    pub malformed_lines: u64,
    pub skipped_versions: u64,
    pub merged_duplicates: u64,
    pub missing_upload_times: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    packages: BTreeMap<String, Vec<ReleaseRecord>>,
    stats: IngestStats,
    hash: String,
}

#[derive(Deserialize)]
struct DistributionLine {
    name: String,
    version: String,
    #[serde(default)]
    upload_time: Option<serde_json::Value>,
    #[serde(default)]
    requires_dist: Option<Vec<Option<String>>>,
}

enum LineOutcome {
    Blank,
    NotJson,
    Malformed,
    BadVersion,
    Release(ReleaseRecord, bool),
}

fn classify_line(line: &[u8]) -> LineOutcome {
    let Ok(text) = std::str::from_utf8(line) else {
        return LineOutcome::NotJson;
    };
    let text = text.trim();
    if text.is_empty() {
        return LineOutcome::Blank;
    }
    let value: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(_) => return LineOutcome::NotJson,
    };
    let Ok(dist) = serde_json::from_value::<DistributionLine>(value) else {
        return LineOutcome::Malformed;
    };
    let Ok(package) = normalize_name(&dist.name) else {
        return LineOutcome::Malformed;
    };
    let version = match Version::parse(&dist.version) {
        Ok(v) => v,
        Err(e) => {
            log::warn!("skipping {package}: {e}");
            return LineOutcome::BadVersion;
        }
    };
    let upload_time = match &dist.upload_time {
        Some(serde_json::Value::String(s)) => parse_timestamp(s),
        _ => None,
    };
    let requires_dist = dist
        .requires_dist
        .unwrap_or_default()
        .into_iter()
        .flatten()
        .map(|r| r.trim().to_string())
        .filter(|r| !r.is_empty())
        .collect();
    LineOutcome::Release(
        ReleaseRecord {
            package,
            version,
            upload_time,
            requires_dist,
        },
        upload_time.is_none(),
    )
}

/// Accepts RFC 3339 and the `YYYY-MM-DD HH:MM:SS[.f][ UTC]` spellings found in
/// registry dumps; zone-less times are taken as UTC.
pub fn parse_timestamp(text: &str) -> Option<DateTime<Utc>> {
    let text = text.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(text) {
        return Some(t.with_timezone(&Utc));
    }
    if let Ok(t) = DateTime::parse_from_str(text, "%Y-%m-%d %H:%M:%S%.f%:z") {
        return Some(t.with_timezone(&Utc));
    }
    let bare = text.strip_suffix("UTC").unwrap_or(text).trim();
    for fmt in ["%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S%.f"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(bare, fmt) {
            return Some(t.and_utc());
        }
    }
    NaiveDate::parse_from_str(bare, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|t| t.and_utc())
}

/// Reads a JSON Lines distribution dump.
pub fn ingest<R: BufRead>(reader: R) -> Result<Registry, RegistryError> {
    Registry::ingest(reader)
}

impl Registry {
    pub fn ingest<R: BufRead>(mut reader: R) -> Result<Self, RegistryError> {
        let mut lines = Vec::new();
        loop {
            let mut buf = Vec::new();
            if reader.read_until(b'\n', &mut buf)? == 0 {
                break;
            }
            lines.push(buf);
        }

        let outcomes: Vec<LineOutcome> = lines.par_iter().map(|l| classify_line(l)).collect();

        let mut stats = IngestStats::default();
        let mut json_lines = 0u64;
        let mut not_json = 0u64;
        let mut releases = Vec::new();
        for outcome in outcomes {
            match outcome {
                LineOutcome::Blank => continue,
                LineOutcome::NotJson => {
                    not_json += 1;
                    stats.malformed_lines += 1;
                }
                LineOutcome::Malformed => {
                    json_lines += 1;
                    stats.malformed_lines += 1;
                }
                LineOutcome::BadVersion => {
                    json_lines += 1;
                    stats.skipped_versions += 1;
                }
                LineOutcome::Release(r, missing_time) => {
                    json_lines += 1;
                    stats.missing_upload_times += u64::from(missing_time);
                    releases.push(r);
                }
            }
            stats.lines += 1;
        }
        if json_lines == 0 && not_json > 0 {
            return Err(RegistryError::Format(format!(
                "none of {not_json} non-empty lines is a JSON value"
            )));
        }
        if stats.skipped_versions > 0 {
            log::warn!(
                "{} lines with unparseable versions skipped",
                stats.skipped_versions
            );
        }

        let mut registry = Registry::from_releases(releases);
        registry.stats.lines = stats.lines;
        registry.stats.malformed_lines = stats.malformed_lines;
        registry.stats.skipped_versions = stats.skipped_versions;
        registry.stats.missing_upload_times = stats.missing_upload_times;
        Ok(registry)
    }

    /// Builds a registry from already-parsed releases, merging duplicates of
    /// the same (package, version).
    pub fn from_releases<I: IntoIterator<Item = ReleaseRecord>>(releases: I) -> Self {
        let mut grouped: BTreeMap<String, HashMap<Version, ReleaseRecord>> = BTreeMap::new();
        let mut merged = 0;
        for r in releases {
            let slot = grouped.entry(r.package.clone()).or_default();
            match slot.get_mut(&r.version) {
                Some(existing) => {
                    merged += 1;
                    existing.requires_dist.extend(r.requires_dist);
                    existing.upload_time = match (existing.upload_time, r.upload_time) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    };
                    // keep the spelling independent of input order
                    if r.version.raw() < existing.version.raw() {
                        existing.version = r.version;
                    }
                }
                None => {
                    slot.insert(r.version.clone(), r);
                }
            }
        }
        let packages = grouped
            .into_iter()
            .map(|(name, map)| {
                let mut list: Vec<ReleaseRecord> = map.into_values().collect();
                list.sort_by(|a, b| a.version.cmp(&b.version));
                (name, list)
            })
            .collect();
        let mut registry = Registry {
            packages,
            stats: IngestStats {
                merged_duplicates: merged,
                ..IngestStats::default()
            },
            hash: String::new(),
        };
        registry.hash = registry.content_hash();
        registry
    }

    fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for (name, releases) in &self.packages {
            for r in releases {
                hasher.update(name.as_bytes());
                hasher.update([0]);
                hasher.update(r.version.normalize().as_bytes());
                hasher.update([0]);
                if let Some(t) = r.upload_time {
                    hasher.update(t.to_rfc3339().as_bytes());
                }
                for req in &r.requires_dist {
                    hasher.update([0x1f]);
                    hasher.update(req.as_bytes());
                }
                hasher.update(b"\n");
            }
        }
        hex::encode(hasher.finalize())
    }

    /// SHA-256 over the canonical registry content.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn stats(&self) -> IngestStats {
        self.stats
    }

    pub fn package_count(&self) -> usize {
        self.packages.len()
    }

    pub fn release_count(&self) -> usize {
        self.packages.values().map(Vec::len).sum()
    }

    pub fn package_names(&self) -> impl Iterator<Item = &str> {
        self.packages.keys().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.releases(name).is_some()
    }

    /// Releases of `name` in ascending version order.
    pub fn releases(&self, name: &str) -> Option<&[ReleaseRecord]> {
        let key = normalize_name(name).ok()?;
        self.packages.get(&key).map(Vec::as_slice)
    }

    pub fn release(&self, name: &str, version: &Version) -> Option<&ReleaseRecord> {
        let list = self.releases(name)?;
        list.binary_search_by(|r| r.version.cmp(version))
            .ok()
            .map(|i| &list[i])
    }

    /// All versions of `name`, ascending; empty when the package is unknown.
    pub fn get_all_versions(&self, name: &str) -> Vec<Version> {
        self.releases(name)
            .map(|list| list.iter().map(|r| r.version.clone()).collect())
            .unwrap_or_default()
    }

    pub fn iter_releases(&self) -> impl Iterator<Item = &ReleaseRecord> {
        self.packages.values().flatten()
    }
}

pub fn get_all_versions(r: &Registry, name: &str) -> Vec<Version> {
    r.get_all_versions(name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DbOptions {
    pub include_extra_gated: bool,
}

impl Default for DbOptions {
    fn default() -> Self {
        DbOptions {
            include_extra_gated: true,
        }
    }
}

/// One resolved dependency: `down_name==down_version` declares a requirement
/// that `up_name==up_version` satisfies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DepRecord {
    pub up_name: String,
    pub up_version: Version,
    pub down_name: String,
    pub down_version: Version,
    /// True only if every requirement producing this record is extra-gated.
    pub extra_gated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DbManifest {
    pub records: u64,
    pub packages: u64,
    pub releases: u64,
    pub skipped_versions: u64,
    pub malformed_lines: u64,
    pub skipped_requirements: u64,
    pub unknown_requirements: u64,
    pub excluded_extra_gated: u64,
    pub options: DbOptions,
    pub registry_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub built_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PackedRecord {
    up_pkg: u32,
    up_ver: u32,
    down_pkg: u32,
    down_ver: u32,
    extra_gated: bool,
}

impl PackedRecord {
    fn key(&self) -> (u32, u32, u32, u32) {
        (self.up_pkg, self.up_ver, self.down_pkg, self.down_ver)
    }

    const BYTES: usize = 17;

    fn write(&self, out: &mut Vec<u8>) {
        for n in [self.up_pkg, self.up_ver, self.down_pkg, self.down_ver] {
            out.extend_from_slice(&n.to_le_bytes());
        }
        out.push(u8::from(self.extra_gated));
    }

    fn read(buf: &[u8]) -> Self {
        let word = |i: usize| u32::from_le_bytes(buf[i * 4..i * 4 + 4].try_into().unwrap());
        PackedRecord {
            up_pkg: word(0),
            up_ver: word(1),
            down_pkg: word(2),
            down_ver: word(3),
            extra_gated: buf[16] != 0,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct BuildCounts {
    skipped_requirements: u64,
    unknown_requirements: u64,
    excluded_extra_gated: u64,
}

impl BuildCounts {
    fn add(mut self, other: BuildCounts) -> Self {
        self.skipped_requirements += other.skipped_requirements;
        self.unknown_requirements += other.unknown_requirements;
        self.excluded_extra_gated += other.excluded_extra_gated;
        self
    }
}

/// The resolved dependency database plus the registry it was resolved against.
#[derive(Debug, Clone)]
pub struct DependencyDb {
    registry: Registry,
    names: Vec<String>,
    records: Vec<PackedRecord>,
    /// Record indices ordered by (down, up) for dependency lookups.
    by_down: Vec<u32>,
    manifest: DbManifest,
}

impl PartialEq for DependencyDb {
    fn eq(&self, other: &Self) -> bool {
        self.registry == other.registry && self.records == other.records
    }
}

pub fn build_dependency_db(registry: &Registry, options: DbOptions) -> DependencyDb {
    DependencyDb::build(registry, options)
}

impl DependencyDb {
    pub fn build(registry: &Registry, options: DbOptions) -> Self {
        let names: Vec<String> = registry.packages.keys().cloned().collect();
        let lists: Vec<&Vec<ReleaseRecord>> = registry.packages.values().collect();

        let (mut records, counts) = lists
            .par_iter()
            .enumerate()
            .map(|(down_pkg, releases)| {
                resolve_package(down_pkg as u32, releases, &names, &lists, options)
            })
            .reduce(
                || (Vec::new(), BuildCounts::default()),
                |(mut a, ca), (b, cb)| {
                    a.extend(b);
                    (a, ca.add(cb))
                },
            );

        records.par_sort_unstable();
        // Same edge from several requirements: gated only if all were gated.
        records.dedup_by(|later, earlier| {
            if later.key() == earlier.key() {
                earlier.extra_gated &= later.extra_gated;
                true
            } else {
                false
            }
        });

        let manifest = DbManifest {
            records: records.len() as u64,
            packages: registry.package_count() as u64,
            releases: registry.release_count() as u64,
            skipped_versions: registry.stats.skipped_versions,
            malformed_lines: registry.stats.malformed_lines,
            skipped_requirements: counts.skipped_requirements,
            unknown_requirements: counts.unknown_requirements,
            excluded_extra_gated: counts.excluded_extra_gated,
            options,
            registry_hash: registry.hash().to_string(),
            built_at: None,
        };
        Self::assemble(registry.clone(), names, records, manifest)
    }

    fn assemble(
        registry: Registry,
        names: Vec<String>,
        records: Vec<PackedRecord>,
        manifest: DbManifest,
    ) -> Self {
        let mut by_down: Vec<u32> = (0..records.len() as u32).collect();
        by_down.par_sort_unstable_by_key(|&i| {
            let r = &records[i as usize];
            (r.down_pkg, r.down_ver, r.up_pkg, r.up_ver)
        });
        DependencyDb {
            registry,
            names,
            records,
            by_down,
            manifest,
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn manifest(&self) -> &DbManifest {
        &self.manifest
    }

    pub fn set_built_at(&mut self, at: Option<DateTime<Utc>>) {
        self.manifest.built_at = at;
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn package_id(&self, name: &str) -> Option<u32> {
        let key = normalize_name(name).ok()?;
        self.names.binary_search(&key).ok().map(|i| i as u32)
    }

    fn releases_of(&self, pkg: u32) -> &[ReleaseRecord] {
        self.registry
            .packages
            .get(&self.names[pkg as usize])
            .map(Vec::as_slice)
            .unwrap_or_default()
    }

    fn version_id(&self, pkg: u32, version: &Version) -> Option<u32> {
        self.releases_of(pkg)
            .binary_search_by(|r| r.version.cmp(version))
            .ok()
            .map(|i| i as u32)
    }

    fn version_of(&self, pkg: u32, ver: u32) -> &Version {
        &self.releases_of(pkg)[ver as usize].version
    }

    fn unpack(&self, r: &PackedRecord) -> DepRecord {
        DepRecord {
            up_name: self.names[r.up_pkg as usize].clone(),
            up_version: self.version_of(r.up_pkg, r.up_ver).clone(),
            down_name: self.names[r.down_pkg as usize].clone(),
            down_version: self.version_of(r.down_pkg, r.down_ver).clone(),
            extra_gated: r.extra_gated,
        }
    }

    /// All records in `(up_name, up_version, down_name, down_version)` order.
    pub fn records(&self) -> impl Iterator<Item = DepRecord> + '_ {
        self.records.iter().map(|r| self.unpack(r))
    }

    fn group(&self, pairs: impl Iterator<Item = (u32, u32)>) -> Vec<(String, Vec<Version>)> {
        let mut out: Vec<(String, Vec<Version>)> = Vec::new();
        let mut last = None;
        for (pkg, ver) in pairs {
            if last != Some(pkg) {
                out.push((self.names[pkg as usize].clone(), Vec::new()));
                last = Some(pkg);
            }
            out.last_mut()
                .expect("group pushed above")
                .1
                .push(self.version_of(pkg, ver).clone());
        }
        out
    }

    /// Releases that directly depend on `name==version`, grouped by package
    /// (names ascending, versions ascending).
    pub fn get_dependents(&self, name: &str, version: &Version) -> Vec<(String, Vec<Version>)> {
        let Some(pkg) = self.package_id(name) else {
            return Vec::new();
        };
        let Some(ver) = self.version_id(pkg, version) else {
            return Vec::new();
        };
        let lo = self
            .records
            .partition_point(|r| (r.up_pkg, r.up_ver) < (pkg, ver));
        let hi = self
            .records
            .partition_point(|r| (r.up_pkg, r.up_ver) <= (pkg, ver));
        self.group(
            self.records[lo..hi]
                .iter()
                .map(|r| (r.down_pkg, r.down_ver)),
        )
    }

    /// Releases that `name==version` directly depends on, grouped by package.
    pub fn get_dependencies(&self, name: &str, version: &Version) -> Vec<(String, Vec<Version>)> {
        let Some(pkg) = self.package_id(name) else {
            return Vec::new();
        };
        let Some(ver) = self.version_id(pkg, version) else {
            return Vec::new();
        };
        let key = |i: &u32| {
            let r = &self.records[*i as usize];
            (r.down_pkg, r.down_ver)
        };
        let lo = self.by_down.partition_point(|i| key(i) < (pkg, ver));
        let hi = self.by_down.partition_point(|i| key(i) <= (pkg, ver));
        self.group(self.by_down[lo..hi].iter().map(|i| {
            let r = &self.records[*i as usize];
            (r.up_pkg, r.up_ver)
        }))
    }

    const MAGIC: &'static [u8; 8] = b"CFDEPDB1";

    /// Serializes the database: magic, a JSON header holding the manifest and
    /// the registry, then fixed-width little-endian records.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), RegistryError> {
        let header = DbHeader {
            manifest: self.manifest.clone(),
            registry: self.registry.packages.values().flatten().cloned().collect(),
            stats: self.registry.stats,
        };
        let header =
            serde_json::to_vec(&header).map_err(|e| RegistryError::Format(e.to_string()))?;
        w.write_all(Self::MAGIC)?;
        w.write_all(&(header.len() as u64).to_le_bytes())?;
        w.write_all(&header)?;
        w.write_all(&(self.records.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(PackedRecord::BYTES * 4096);
        for chunk in self.records.chunks(4096) {
            buf.clear();
            for r in chunk {
                r.write(&mut buf);
            }
            w.write_all(&buf)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, RegistryError> {
        let corrupt = |m: &str| RegistryError::Corrupt(m.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(corrupt("bad magic"));
        }
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let mut header = vec![0u8; u64::from_le_bytes(len) as usize];
        r.read_exact(&mut header)?;
        let header: DbHeader =
            serde_json::from_slice(&header).map_err(|e| RegistryError::Corrupt(e.to_string()))?;

        let mut registry = Registry::from_releases(header.registry);
        registry.stats = header.stats;
        if registry.hash() != header.manifest.registry_hash {
            return Err(corrupt("registry hash mismatch"));
        }

        r.read_exact(&mut len)?;
        let count = u64::from_le_bytes(len) as usize;
        if count as u64 != header.manifest.records {
            return Err(corrupt("record count disagrees with manifest"));
        }
        let mut raw = Vec::new();
        r.read_to_end(&mut raw)?;
        if raw.len() != count * PackedRecord::BYTES {
            return Err(corrupt("truncated record table"));
        }
        let records: Vec<PackedRecord> = raw
            .chunks_exact(PackedRecord::BYTES)
            .map(PackedRecord::read)
            .collect();

        let names: Vec<String> = registry.packages.keys().cloned().collect();
        let sizes: Vec<u32> = registry.packages.values().map(|l| l.len() as u32).collect();
        let in_range = |p: u32, v: u32| sizes.get(p as usize).is_some_and(|&n| v < n);
        if !records.windows(2).all(|w| w[0].key() < w[1].key())
            || !records
                .iter()
                .all(|r| in_range(r.up_pkg, r.up_ver) && in_range(r.down_pkg, r.down_ver))
        {
            return Err(corrupt("record table unsorted or out of range"));
        }
        Ok(Self::assemble(registry, names, records, header.manifest))
    }
}

#[derive(Serialize, Deserialize)]
struct DbHeader {
    manifest: DbManifest,
    stats: IngestStats,
    registry: Vec<ReleaseRecord>,
}

enum Resolution {
    Unparseable,
    UnknownPackage,
    Upstream {
        pkg: u32,
        versions: Vec<u32>,
        gated: bool,
    },
}

fn resolve_requirement(text: &str, names: &[String], lists: &[&Vec<ReleaseRecord>]) -> Resolution {
    let Ok(req) = Requirement::parse(text) else {
        return Resolution::Unparseable;
    };
    let Ok(pkg) = names.binary_search(&req.name) else {
        return Resolution::UnknownPackage;
    };
    let versions = lists[pkg]
        .iter()
        .enumerate()
        .filter(|(_, r)| req.specifiers.matches(&r.version))
        .map(|(i, _)| i as u32)
        .collect();
    Resolution::Upstream {
        pkg: pkg as u32,
        versions,
        gated: req.extra_gated(),
    }
}

fn resolve_package(
    down_pkg: u32,
    releases: &[ReleaseRecord],
    names: &[String],
    lists: &[&Vec<ReleaseRecord>],
    options: DbOptions,
) -> (Vec<PackedRecord>, BuildCounts) {
    // Consecutive releases usually repeat the same requirement strings.
    let mut cache: HashMap<&str, Resolution> = HashMap::new();
    let mut counts = BuildCounts::default();
    let mut out = Vec::new();
    for (down_ver, release) in releases.iter().enumerate() {
        for text in &release.requires_dist {
            let resolution = cache
                .entry(text.as_str())
                .or_insert_with(|| resolve_requirement(text, names, lists));
            match resolution {
                Resolution::Unparseable => counts.skipped_requirements += 1,
                Resolution::UnknownPackage => counts.unknown_requirements += 1,
                Resolution::Upstream { gated: true, .. } if !options.include_extra_gated => {
                    counts.excluded_extra_gated += 1;
                }
                Resolution::Upstream {
                    pkg,
                    versions,
                    gated,
                } => out.extend(versions.iter().map(|&up_ver| PackedRecord {
                    up_pkg: *pkg,
                    up_ver,
                    down_pkg,
                    down_ver: down_ver as u32,
                    extra_gated: *gated,
                })),
            }
        }
    }
    (out, counts)
}

pub fn get_dependents(
    db: &DependencyDb,
    name: &str,
    version: &Version,
) -> Vec<(String, Vec<Version>)> {
    db.get_dependents(name, version)
}
