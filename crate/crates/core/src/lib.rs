//! Version-sensitive dependency analysis for Python package registries.
//!
//! The pipeline ingests registry metadata ([`registry`]), resolves every
//! declared requirement against concrete releases ([`requirement`],
//! [`version`]), grows supply chains from seed packages ([`chain`]), and
//! analyzes their structure ([`cluster`]) and evolution ([`dynamics`]).

pub mod chain;
pub mod cluster;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod registry;
pub mod requirement;
pub mod stats;
pub mod version;
