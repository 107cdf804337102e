//! Output directory, CSV and JSON writers.

use std::fs;
use std::path::{Path, PathBuf};

use packpress_core::SampleMeasure;
use serde::Serialize;

use crate::config::{AtomConfig, PointConfig};
use crate::error::{CliError, CliResult};

/// An output directory that remembers what was written to it, in order.
#[derive(Debug)]
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> CliResult<OutDir> {
        fs::create_dir_all(root).map_err(|source| CliError::Output { path: root.into(), source })?;
        let probe = root.join(".packpress-write-probe");
        fs::write(&probe, b"").map_err(|source| CliError::Output { path: root.into(), source })?;
        let _ = fs::remove_file(&probe);
        Ok(OutDir { root: root.into(), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn write_csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> CliResult<()> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|source| CliError::Output { path, source })?;
        self.written.push(name.into());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).map_err(|source| CliError::Output { path, source })?;
        self.written.push(name.into());
        Ok(())
    }
}

/// JSON atom list of a measure.
pub fn measure_atoms(mu: &SampleMeasure) -> Vec<AtomConfig> {
    mu.atoms()
        .iter()
        .zip(mu.weights())
        .map(|(p, w)| AtomConfig { point: PointConfig::from_point(p), weight: *w })
        .collect()
}

pub fn measure_from_atoms(atoms: &[AtomConfig]) -> CliResult<SampleMeasure> {
    let atoms = atoms
        .iter()
        .map(|a| {
            let p = a.point.build().map_err(|e| packpress_core::Error::InvalidMeasure(e))?;
            Ok((p, a.weight))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(SampleMeasure::new(atoms)?)
}
