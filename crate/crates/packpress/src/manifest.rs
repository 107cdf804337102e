//! Run manifest: resolved config, code version, seeds and column provenance.
//! Carries no timestamps or host details, so identical runs write identical
//! manifests.

use packpress_core::math::split_seed;
use serde::Serialize;

use crate::config::{RunConfig, SCHEMA_VERSION};

pub const MANIFEST_VERSION: u32 = 1;

/// Sub-seeds split from the top-level seed, one per randomized sub-task.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Seeds {
    pub top: u64,
    pub sample: u64,
    pub measure: u64,
    pub candidates: u64,
    pub properties: u64,
}

impl Seeds {
    pub fn derive(top: u64) -> Seeds {
        Seeds {
            top,
            sample: split_seed(top, 1),
            measure: split_seed(top, 2),
            candidates: split_seed(top, 3),
            properties: split_seed(top, 4),
        }
    }
}

/// Which operation, in which module, produced a result column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnTrace {
    pub artifact: &'static str,
    pub column: &'static str,
    pub module: &'static str,
    pub operation: &'static str,
}

pub const fn trace(artifact: &'static str, column: &'static str, module: &'static str, operation: &'static str) -> ColumnTrace {
    ColumnTrace { artifact, column, module, operation }
}

/// Scale of one table cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CellScale {
    pub n: usize,
    pub n_max: usize,
    pub eps: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest<'a> {
    pub manifest_version: u32,
    pub schema_version: u32,
    pub tool: &'static str,
    pub code_version: &'static str,
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub seeds: Seeds,
    pub cells: Vec<CellScale>,
    pub columns: Vec<ColumnTrace>,
    pub artifacts: Vec<String>,
    pub asserted_failures: usize,
}

impl<'a> Manifest<'a> {
    pub fn new(config: &'a RunConfig) -> Self {
        Manifest {
            manifest_version: MANIFEST_VERSION,
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            code_version: env!("CARGO_PKG_VERSION"),
            command: config.command.name(),
            config,
            seeds: Seeds::derive(config.seed),
            cells: Vec::new(),
            columns: Vec::new(),
            artifacts: Vec::new(),
            asserted_failures: 0,
        }
    }
}
