//! PEP 508 dependency declarations and PEP 440 version specifiers.
//!
//! Only the `extra` marker variable is interpreted; the rest of a marker is
//! kept verbatim. Specifier semantics follow the packaging reference
//! implementation, including its pre-release admission rule.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::RequirementError;
use crate::version::Version;

/// PEP 503 canonical form: lowercase, runs of `-`, `_`, `.` collapsed to `-`.
pub fn normalize_name(text: &str) -> Result<String, RequirementError> {
    let name = text.trim();
    if !is_valid_name(name) {
        return Err(RequirementError::InvalidName(text.to_string()));
    }
    let mut out = String::with_capacity(name.len());
    let mut in_run = false;
    for c in name.chars() {
        if matches!(c, '-' | '_' | '.') {
            if !in_run {
                out.push('-');
            }
            in_run = true;
        } else {
            out.push(c.to_ascii_lowercase());
            in_run = false;
        }
    }
    Ok(out)
}

fn is_valid_name(name: &str) -> bool {
    let bytes = name.as_bytes();
    match (bytes.first(), bytes.last()) {
        (Some(first), Some(last)) => {
            first.is_ascii_alphanumeric()
                && last.is_ascii_alphanumeric()
                && bytes
                    .iter()
                    .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'))
        }
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    #[serde(rename = "~=")]
    Compatible,
    #[serde(rename = "==")]
    Equal,
    #[serde(rename = "!=")]
    NotEqual,
    #[serde(rename = "<=")]
    LessEqual,
    #[serde(rename = ">=")]
    GreaterEqual,
    #[serde(rename = "<")]
    Less,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "===")]
    Arbitrary,
}

impl Operator {
    pub fn as_str(self) -> &'static str {
        match self {
            Operator::Compatible => "~=",
            Operator::Equal => "==",
            Operator::NotEqual => "!=",
            Operator::LessEqual => "<=",
            Operator::GreaterEqual => ">=",
            Operator::Less => "<",
            Operator::Greater => ">",
            Operator::Arbitrary => "===",
        }
    }

    // Longest spellings first so `===` is not read as `==`.
    const SPELLINGS: [(&'static str, Operator); 8] = [
        ("===", Operator::Arbitrary),
        ("~=", Operator::Compatible),
        ("==", Operator::Equal),
        ("!=", Operator::NotEqual),
        ("<=", Operator::LessEqual),
        (">=", Operator::GreaterEqual),
        ("<", Operator::Less),
        (">", Operator::Greater),
    ];
}

/// The right-hand side of a clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Version(Version),
    /// `==X.*` / `!=X.*`: epoch and release prefix only.
    Prefix(Version),
    /// `===` compares text, so the operand need not be a valid version.
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specifier {
    pub op: Operator,
    pub operand: Operand,
}

impl Specifier {
    pub fn parse(text: &str) -> Result<Self, RequirementError> {
        let trimmed = text.trim();
        let invalid = |reason: &str| RequirementError::Invalid {
            text: text.to_string(),
            position: 0,
            reason: reason.to_string(),
        };
        let (spelling, op) = Operator::SPELLINGS
            .iter()
            .find(|(s, _)| trimmed.starts_with(s))
            .copied()
            .ok_or_else(|| invalid("expected a comparison operator"))?;
        let operand_text = trimmed[spelling.len()..].trim();
        if operand_text.is_empty() || operand_text.contains(char::is_whitespace) {
            return Err(invalid("expected a single version operand"));
        }
        let bad_version = |reason: &str| RequirementError::Invalid {
            text: text.to_string(),
            position: text.find(operand_text).unwrap_or(0),
            reason: reason.to_string(),
        };

        let operand = match op {
            Operator::Arbitrary => Operand::Text(operand_text.to_string()),
            Operator::Equal | Operator::NotEqual if operand_text.ends_with(".*") => {
                let v = Version::parse(&operand_text[..operand_text.len() - 2])
                    .map_err(|_| bad_version("invalid prefix version"))?;
                if v.pre.is_some() || v.post.is_some() || v.dev.is_some() || v.local.is_some() {
                    return Err(bad_version(".* applies to epoch and release only"));
                }
                Operand::Prefix(v)
            }
            _ => {
                let v = Version::parse(operand_text).map_err(|_| bad_version("invalid version"))?;
                let local_allowed = matches!(op, Operator::Equal | Operator::NotEqual);
                if v.local.is_some() && !local_allowed {
                    return Err(bad_version("local versions only allowed with == and !="));
                }
                if op == Operator::Compatible && v.release.len() < 2 {
                    return Err(bad_version("~= needs at least two release segments"));
                }
                Operand::Version(v)
            }
        };
        Ok(Specifier { op, operand })
    }

    /// Whether this clause alone lets pre-releases through: its operand
    /// names a pre-release and the operator is not an exclusion.
    fn names_prerelease(&self) -> bool {
        if self.op == Operator::NotEqual {
            return false;
        }
        match &self.operand {
            Operand::Version(v) => v.is_prerelease(),
            Operand::Prefix(_) => false,
            Operand::Text(t) => Version::parse(t).is_ok_and(|v| v.is_prerelease()),
        }
    }

    /// Operator semantics without the set-level pre-release filter.
    pub fn contains(&self, candidate: &Version) -> bool {
        match (&self.operand, self.op) {
            (Operand::Text(t), _) => candidate.normalize() == t.to_ascii_lowercase(),
            (Operand::Prefix(p), Operator::Equal) => prefix_match(candidate, p),
            (Operand::Prefix(p), _) => !prefix_match(candidate, p),
            (Operand::Version(spec), op) => match op {
                Operator::Equal => exact_match(candidate, spec),
                Operator::NotEqual => !exact_match(candidate, spec),
                Operator::LessEqual => candidate.cmp_public(spec).is_le(),
                Operator::GreaterEqual => candidate.cmp_public(spec).is_ge(),
                // <V excludes pre-releases of V unless V is one.
                Operator::Less => {
                    candidate < spec
                        && !(candidate.is_prerelease()
                            && !spec.is_prerelease()
                            && *candidate >= earliest_prerelease(spec))
                }
                // >V excludes post-releases and local builds of V itself.
                Operator::Greater => {
                    candidate > spec
                        && !(candidate.is_postrelease()
                            && !spec.is_postrelease()
                            && post_base(candidate) == *spec)
                        && !(candidate.local.is_some() && candidate.cmp_public(spec).is_eq())
                }
                Operator::Compatible => {
                    let prefix_len = spec.release.len() - 1;
                    let prefix = Version::parse(&format!(
                        "{}!{}",
                        spec.epoch,
                        spec.release[..prefix_len]
                            .iter()
                            .map(u64::to_string)
                            .collect::<Vec<_>>()
                            .join(".")
                    ))
                    .expect("release prefix is a valid version");
                    candidate.cmp_public(spec).is_ge() && prefix_match(candidate, &prefix)
                }
                Operator::Arbitrary => unreachable!("=== always carries a text operand"),
            },
        }
    }
}

fn earliest_prerelease(v: &Version) -> Version {
    let mut out = v.public();
    out.dev = Some(0);
    out
}

fn post_base(v: &Version) -> Version {
    let mut out = v.public();
    out.post = None;
    out.dev = None;
    out
}

fn exact_match(candidate: &Version, spec: &Version) -> bool {
    if spec.local.is_none() {
        candidate.cmp_public(spec).is_eq()
    } else {
        candidate == spec
    }
}

fn prefix_match(candidate: &Version, prefix: &Version) -> bool {
    candidate.epoch == prefix.epoch
        && prefix
            .release
            .iter()
            .enumerate()
            .all(|(i, &seg)| candidate.release_at(i) == seg)
}

impl fmt::Display for Specifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.operand {
            Operand::Version(v) => write!(f, "{}{}", self.op.as_str(), v.normalize()),
            Operand::Prefix(v) => write!(f, "{}{}.*", self.op.as_str(), v.normalize()),
            Operand::Text(t) => write!(f, "{}{}", self.op.as_str(), t),
        }
    }
}

/// A conjunction of clauses. An empty set admits every final release.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecifierSet {
    pub clauses: Vec<Specifier>,
    /// Overrides the pre-release admission rule when set.
    pub prereleases: Option<bool>,
}

impl SpecifierSet {
    pub fn parse(text: &str) -> Result<Self, RequirementError> {
        if text.trim().is_empty() {
            return Ok(SpecifierSet::default());
        }
        let clauses = text
            .split(',')
            .map(Specifier::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SpecifierSet {
            clauses,
            prereleases: None,
        })
    }

    pub fn with_prereleases(mut self, allow: bool) -> Self {
        self.prereleases = Some(allow);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn admits_prereleases(&self) -> bool {
        self.prereleases
            .unwrap_or_else(|| self.clauses.iter().any(Specifier::names_prerelease))
    }

    pub fn matches(&self, v: &Version) -> bool {
        if v.is_prerelease() && !self.admits_prereleases() {
            return false;
        }
        self.clauses.iter().all(|c| c.contains(v))
    }

    /// Candidates satisfying the set, ascending.
    pub fn satisfying_versions<'a, I>(&self, candidates: I) -> Vec<Version>
    where
        I: IntoIterator<Item = &'a Version>,
    {
        let mut out: Vec<Version> = candidates
            .into_iter()
            .filter(|v| self.matches(v))
            .cloned()
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for SpecifierSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.clauses.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

pub fn matches(s: &SpecifierSet, v: &Version) -> bool {
    s.matches(v)
}

pub fn satisfying_versions(s: &SpecifierSet, candidates: &[Version]) -> Vec<Version> {
    s.satisfying_versions(candidates)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marker {
    pub text: String,
    pub extra_gated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub name: String,
    pub extras: BTreeSet<String>,
    pub specifiers: SpecifierSet,
    /// Direct reference (`name @ url`); such requirements carry no specifiers.
    pub url: Option<String>,
    pub marker: Option<Marker>,
}

impl Requirement {
    pub fn parse(text: &str) -> Result<Self, RequirementError> {
        RequirementParser { text, pos: 0 }.parse()
    }

    pub fn extra_gated(&self) -> bool {
        self.marker.as_ref().is_some_and(|m| m.extra_gated)
    }
}

pub fn parse_requirement(text: &str) -> Result<Requirement, RequirementError> {
    Requirement::parse(text)
}

struct RequirementParser<'a> {
    text: &'a str,
    pos: usize,
}

impl RequirementParser<'_> {
    fn fail(&self, reason: &str) -> RequirementError {
        RequirementError::Invalid {
            text: self.text.to_string(),
            position: self.pos,
            reason: reason.to_string(),
        }
    }

    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &str {
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !pred(c))
            .unwrap_or(self.rest().len());
        self.pos += len;
        &self.text[start..self.pos]
    }

    fn identifier(&mut self, what: &str) -> Result<String, RequirementError> {
        let start = self.pos;
        let ident = self
            .take_while(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
            .to_string();
        if !is_valid_name(&ident) {
            self.pos = start;
            return Err(self.fail(&format!("expected {what}")));
        }
        normalize_name(&ident)
    }

    fn parse(mut self) -> Result<Requirement, RequirementError> {
        self.skip_ws();
        let name = self.identifier("package name")?;
        self.skip_ws();

        let mut extras = BTreeSet::new();
        if self.peek() == Some('[') {
            self.pos += 1;
            self.skip_ws();
            if self.peek() != Some(']') {
                loop {
                    extras.insert(self.identifier("extra name")?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => {
                            self.pos += 1;
                            self.skip_ws();
                        }
                        Some(']') => break,
                        _ => return Err(self.fail("expected ',' or ']'")),
                    }
                }
            }
            self.pos += 1;
            self.skip_ws();
        }

        let mut url = None;
        let mut specifiers = SpecifierSet::default();
        match self.peek() {
            Some('@') => {
                self.pos += 1;
                self.skip_ws();
                let target = self.take_while(|c| !c.is_whitespace()).to_string();
                if target.is_empty() {
                    return Err(self.fail("expected URL after '@'"));
                }
                // A ';' glued to the URL belongs to the URL.
                url = Some(target);
                self.skip_ws();
            }
            Some('(') => {
                self.pos += 1;
                let start = self.pos;
                let body = self.take_while(|c| c != ')').to_string();
                if self.peek() != Some(')') {
                    return Err(self.fail("expected ')'"));
                }
                specifiers = self.specifiers_at(&body, start)?;
                self.pos += 1;
                self.skip_ws();
            }
            Some(';') | None => {}
            Some(_) => {
                let start = self.pos;
                let body = self.take_while(|c| c != ';').to_string();
                specifiers = self.specifiers_at(&body, start)?;
            }
        }

        let mut marker = None;
        if self.peek() == Some(';') {
            self.pos += 1;
            let text = self.rest().trim().to_string();
            if text.is_empty() {
                return Err(self.fail("empty marker"));
            }
            let extra_gated = marker_mentions_extra(&text)
                .ok_or_else(|| self.fail("unterminated string in marker"))?;
            marker = Some(Marker { text, extra_gated });
            self.pos = self.text.len();
        }

        self.skip_ws();
        if self.pos != self.text.len() {
            return Err(self.fail("unexpected trailing text"));
        }
        Ok(Requirement {
            name,
            extras,
            specifiers,
            url,
            marker,
        })
    }

    fn specifiers_at(
        &mut self,
        body: &str,
        offset: usize,
    ) -> Result<SpecifierSet, RequirementError> {
        SpecifierSet::parse(body).map_err(|e| match e {
            RequirementError::Invalid {
                position, reason, ..
            } => RequirementError::Invalid {
                text: self.text.to_string(),
                position: offset + position,
                reason,
            },
            other => other,
        })
    }
}

/// `Some(true)` when an unquoted `extra` identifier occurs; `None` when a
/// quoted string is left open.
fn marker_mentions_extra(marker: &str) -> Option<bool> {
    let mut chars = marker.chars().peekable();
    let mut found = false;
    while let Some(c) = chars.next() {
        if c == '\'' || c == '"' {
            loop {
                match chars.next() {
                    Some(q) if q == c => break,
                    Some(_) => {}
                    None => return None,
                }
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::from(c);
            while let Some(&n) = chars.peek() {
                if n.is_ascii_alphanumeric() || n == '_' || n == '.' {
                    ident.push(n);
                    chars.next();
                } else {
                    break;
                }
            }
            found |= ident == "extra";
        }
    }
    Some(found)
}
