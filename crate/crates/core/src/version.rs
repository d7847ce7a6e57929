//! PEP 440 versions: parsing, canonical rendering and total ordering.
//!
//! A [`Version`] keeps the text it was parsed from so reports can show the
//! registry's original spelling, but equality, hashing and ordering only look
//! at the structured fields. Release segments are compared with implicit
//! trailing zeros (`1.0 == 1.0.0`); nothing is padded in storage.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::VersionError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PreKind {
    Alpha,
    Beta,
    Rc,
}

impl PreKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PreKind::Alpha => "a",
            PreKind::Beta => "b",
            PreKind::Rc => "rc",
        }
    }
}

/// One dot-separated piece of a local version label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LocalSegment {
    Number(u64),
    Text(String),
}

impl Ord for LocalSegment {
    fn cmp(&self, other: &Self) -> Ordering {
        // Numeric segments sort after alphanumeric ones.
        match (self, other) {
            (LocalSegment::Number(a), LocalSegment::Number(b)) => a.cmp(b),
            (LocalSegment::Text(a), LocalSegment::Text(b)) => a.cmp(b),
            (LocalSegment::Number(_), LocalSegment::Text(_)) => Ordering::Greater,
            (LocalSegment::Text(_), LocalSegment::Number(_)) => Ordering::Less,
        }
    }
}

impl PartialOrd for LocalSegment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LocalSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalSegment::Number(n) => write!(f, "{n}"),
            LocalSegment::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Version {
    pub epoch: u64,
    pub release: Vec<u64>,
    pub pre: Option<(PreKind, u64)>,
    pub post: Option<u64>,
    pub dev: Option<u64>,
    pub local: Option<Vec<LocalSegment>>,
    raw: String,
}

impl Version {
    pub fn parse(text: &str) -> Result<Self, VersionError> {
        Parser::new(text).parse()
    }

    /// The text this version was parsed from.
    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn is_prerelease(&self) -> bool {
        self.pre.is_some() || self.dev.is_some()
    }

    pub fn is_postrelease(&self) -> bool {
        self.post.is_some()
    }

    /// Canonical rendering; re-parsing it yields an equal version.
    pub fn normalize(&self) -> String {
        let mut out = String::new();
        if self.epoch != 0 {
            out.push_str(&format!("{}!", self.epoch));
        }
        out.push_str(&self.public_release());
        if let Some((kind, n)) = self.pre {
            out.push_str(&format!("{}{}", kind.as_str(), n));
        }
        if let Some(n) = self.post {
            out.push_str(&format!(".post{n}"));
        }
        if let Some(n) = self.dev {
            out.push_str(&format!(".dev{n}"));
        }
        if let Some(local) = &self.local {
            out.push('+');
            out.push_str(&join_local(local));
        }
        out
    }

    fn public_release(&self) -> String {
        self.release
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(".")
    }

    /// The same version with its local label dropped.
    pub fn public(&self) -> Version {
        let mut v = self.clone();
        v.local = None;
        v.raw = v.normalize();
        v
    }

    /// Epoch and release only (`1!2.0rc1.post3+x` becomes `1!2.0`).
    pub fn base(&self) -> Version {
        Version {
            epoch: self.epoch,
            release: self.release.clone(),
            pre: None,
            post: None,
            dev: None,
            local: None,
            raw: String::new(),
        }
        .with_canonical_raw()
    }

    fn with_canonical_raw(mut self) -> Self {
        self.raw = self.normalize();
        self
    }

    /// Release segment `i`, zero beyond the stored length.
    pub fn release_at(&self, i: usize) -> u64 {
        self.release.get(i).copied().unwrap_or(0)
    }

    fn trimmed_release(&self) -> &[u64] {
        let end = self
            .release
            .iter()
            .rposition(|&n| n != 0)
            .map_or(0, |i| i + 1);
        &self.release[..end]
    }

    /// Ordering of the public part only (local labels ignored).
    pub fn cmp_public(&self, other: &Self) -> Ordering {
        self.epoch
            .cmp(&other.epoch)
            .then_with(|| self.trimmed_release().cmp(other.trimmed_release()))
            .then_with(|| self.pre_key().cmp(&other.pre_key()))
            .then_with(|| self.post_key().cmp(&other.post_key()))
            .then_with(|| self.dev_key().cmp(&other.dev_key()))
    }

    // A dev release with neither pre nor post sorts before every pre-release
    // of the same release.
    fn pre_key(&self) -> Bound<(PreKind, u64)> {
        match (self.pre, self.post, self.dev) {
            (None, None, Some(_)) => Bound::Min,
            (None, _, _) => Bound::Max,
            (Some(p), _, _) => Bound::At(p),
        }
    }

    fn post_key(&self) -> Bound<u64> {
        self.post.map_or(Bound::Min, Bound::At)
    }

    fn dev_key(&self) -> Bound<u64> {
        self.dev.map_or(Bound::Max, Bound::At)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Bound<T> {
    Min,
    At(T),
    Max,
}

fn join_local(local: &[LocalSegment]) -> String {
    local
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(".")
}

/// Parses `text` as a PEP 440 version.
pub fn parse_version(text: &str) -> Result<Version, VersionError> {
    Version::parse(text)
}

pub fn normalize(v: &Version) -> String {
    v.normalize()
}

pub fn compare(a: &Version, b: &Version) -> Ordering {
    a.cmp(b)
}

impl Ord for Version {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_public(other)
            .then_with(|| match (&self.local, &other.local) {
                (None, None) => Ordering::Equal,
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some(a), Some(b)) => a.cmp(b),
            })
    }
}

impl PartialOrd for Version {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Version {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Version {}

impl Hash for Version {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.epoch.hash(state);
        self.trimmed_release().hash(state);
        self.pre.hash(state);
        self.post.hash(state);
        self.dev.hash(state);
        self.local.hash(state);
    }
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.normalize())
    }
}

impl FromStr for Version {
    type Err = VersionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Version::parse(s)
    }
}

impl Serialize for Version {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.raw)
    }
}

impl<'de> Deserialize<'de> for Version {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Version::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Cursor-based recognizer for the PEP 440 grammar (case-insensitive,
/// surrounding whitespace and a leading `v` allowed).
struct Parser<'a> {
    text: &'a str,
    bytes: Vec<u8>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            bytes: text.bytes().map(|b| b.to_ascii_lowercase()).collect(),
            pos: 0,
        }
    }

    fn fail(&self) -> VersionError {
        VersionError::Invalid {
            text: self.text.to_string(),
            position: self.pos,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn number(&mut self) -> Result<Option<u64>, VersionError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        digits
            .parse::<u64>()
            .map(Some)
            .map_err(|_| VersionError::Invalid {
                text: self.text.to_string(),
                position: start,
            })
    }

    fn separator(&mut self) -> bool {
        if matches!(self.peek(), Some(b'-' | b'_' | b'.')) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, words: &[&str]) -> Option<usize> {
        let rest = &self.bytes[self.pos..];
        for (i, w) in words.iter().enumerate() {
            if rest.starts_with(w.as_bytes()) {
                self.pos += w.len();
                return Some(i);
            }
        }
        None
    }

    fn parse(mut self) -> Result<Version, VersionError> {
        self.skip_ws();
        if self.peek() == Some(b'v') {
            self.pos += 1;
        }

        let first = self.number()?.ok_or_else(|| self.fail())?;
        let mut epoch = 0;
        let mut release = vec![first];
        if self.peek() == Some(b'!') {
            self.pos += 1;
            epoch = first;
            release = vec![self.number()?.ok_or_else(|| self.fail())?];
        }
        while self.peek() == Some(b'.')
            && self.bytes.get(self.pos + 1).is_some_and(u8::is_ascii_digit)
        {
            self.pos += 1;
            release.push(self.number()?.expect("digit follows dot"));
        }

        let pre = self.pre_release()?;
        let post = self.post_release()?;
        let dev = self.dev_release()?;
        let local = self.local_label()?;

        self.skip_ws();
        if self.pos != self.bytes.len() {
            return Err(self.fail());
        }
        Ok(Version {
            epoch,
            release,
            pre,
            post,
            dev,
            local,
            raw: self.text.to_string(),
        })
    }

    fn pre_release(&mut self) -> Result<Option<(PreKind, u64)>, VersionError> {
        let save = self.pos;
        self.separator();
        let kind = match self.keyword(&["alpha", "a", "beta", "b", "preview", "pre", "c", "rc"]) {
            Some(0 | 1) => PreKind::Alpha,
            Some(2 | 3) => PreKind::Beta,
            Some(_) => PreKind::Rc,
            None => {
                self.pos = save;
                return Ok(None);
            }
        };
        self.separator();
        Ok(Some((kind, self.number()?.unwrap_or(0))))
    }

    fn post_release(&mut self) -> Result<Option<u64>, VersionError> {
        let save = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            if let Some(n) = self.number()? {
                return Ok(Some(n));
            }
            self.pos = save;
        }
        self.separator();
        if self.keyword(&["post", "rev", "r"]).is_none() {
            self.pos = save;
            return Ok(None);
        }
        self.separator();
        Ok(Some(self.number()?.unwrap_or(0)))
    }

    fn dev_release(&mut self) -> Result<Option<u64>, VersionError> {
        let save = self.pos;
        self.separator();
        if self.keyword(&["dev"]).is_none() {
            self.pos = save;
            return Ok(None);
        }
        self.separator();
        Ok(Some(self.number()?.unwrap_or(0)))
    }

    fn local_label(&mut self) -> Result<Option<Vec<LocalSegment>>, VersionError> {
        if self.peek() != Some(b'+') {
            return Ok(None);
        }
        self.pos += 1;
        let mut segments = Vec::new();
        loop {
            let start = self.pos;
            while self.peek().is_some_and(|b| b.is_ascii_alphanumeric()) {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.fail());
            }
            let piece = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
            let segment = if piece.bytes().all(|b| b.is_ascii_digit()) {
                match piece.parse::<u64>() {
                    Ok(n) => LocalSegment::Number(n),
                    Err(_) => {
                        return Err(VersionError::Invalid {
                            text: self.text.to_string(),
                            position: start,
                        })
                    }
                }
            } else {
                LocalSegment::Text(piece.to_string())
            };
            segments.push(segment);
            if !self.separator() {
                break;
            }
        }
        Ok(Some(segments))
    }
}
