//! Run configuration: JSON schema, defaults, overrides and validation.
//!
//! Every diagnostic carries the line of the config file it refers to. Serde
//! errors carry their own position; semantic errors are anchored at the first
//! line that mentions the offending key.

use std::path::Path;

use packpress_core::measures::{cylinder_uniform, empirical_from_orbits};
use packpress_core::packing::Scale;
use packpress_core::pressure::{Bisection, ReportSample};
use packpress_core::systems::{build_system, Metric, PotentialKind, Provenance};
use packpress_core::{
    DisjointMode, Generator, Point, Potential, SampleMeasure, SampleSet, Space, Strategy, System, SystemSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Pressure,
    LocalPressure,
    Katok,
    VpCheck,
    Properties,
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pressure => "pressure",
            Command::LocalPressure => "local-pressure",
            Command::Katok => "katok",
            Command::VpCheck => "vp-check",
            Command::Properties => "properties",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyChoice {
    #[default]
    Greedy,
    Exact,
}

impl From<StrategyChoice> for Strategy {
    fn from(s: StrategyChoice) -> Strategy {
        match s {
            StrategyChoice::Greedy => Strategy::Greedy,
            StrategyChoice::Exact => Strategy::Exact,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DisjointChoice {
    #[default]
    Triangle,
    SharedSample,
}

impl From<DisjointChoice> for DisjointMode {
    fn from(d: DisjointChoice) -> DisjointMode {
        match d {
            DisjointChoice::Triangle => DisjointMode::Triangle,
            DisjointChoice::SharedSample => DisjointMode::SharedSample,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapConfig {
    /// `x_i -> slope_i x_i + offset_i (mod 1)`.
    Affine {
        slopes: Vec<i64>,
        #[serde(default)]
        offsets: Vec<f64>,
    },
    /// `x_i -> scale_i x_i + offset_i`, no reduction.
    Contraction { scales: Vec<f64>, offsets: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    /// Full shift on `alphabet` symbols, metric `base^{-s}`, `generators`
    /// copies of the shift.
    Symbolic {
        alphabet: u8,
        #[serde(default = "default_base")]
        base: f64,
        #[serde(default = "one")]
        generators: usize,
    },
    Torus {
        #[serde(default = "one")]
        dim: usize,
        maps: Vec<MapConfig>,
    },
}

fn default_base() -> f64 {
    2.0
}

fn one() -> usize {
    1
}

impl SystemConfig {
    pub fn spec(&self) -> SystemSpec {
        match self {
            SystemConfig::Symbolic { alphabet, base, generators } => SystemSpec {
                space: Space::Symbolic { alphabet: *alphabet },
                metric: Metric::SymbolicBase(*base),
                generators: vec![Generator::Shift; *generators],
            },
            SystemConfig::Torus { dim, maps } => SystemSpec {
                space: Space::Torus { dim: *dim },
                metric: Metric::TorusSup,
                generators: maps
                    .iter()
                    .map(|m| match m {
                        MapConfig::Affine { slopes, offsets } => Generator::AffineModOne {
                            slopes: slopes.clone(),
                            offsets: if offsets.is_empty() { vec![0.0; slopes.len()] } else { offsets.clone() },
                        },
                        MapConfig::Contraction { scales, offsets } => {
                            Generator::AffineContraction { scales: scales.clone(), offsets: offsets.clone() }
                        }
                    })
                    .collect(),
            },
        }
    }

    pub fn build(&self) -> packpress_core::Result<System> {
        build_system(&self.spec())
    }

    fn is_symbolic(&self) -> bool {
        matches!(self, SystemConfig::Symbolic { .. })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    #[default]
    Zero,
    Constant { value: f64 },
    FirstSymbol { table: Vec<f64> },
    TorusAffine { coeffs: Vec<f64> },
    Tabulated { resolution: usize, values: Vec<f64> },
}

impl PotentialConfig {
    pub fn build(&self, offset: f64) -> Potential {
        let base = match self {
            PotentialConfig::Zero => Potential::zero(),
            PotentialConfig::Constant { value } => Potential::constant(*value),
            PotentialConfig::FirstSymbol { table } => Potential::first_symbol(table.clone()),
            PotentialConfig::TorusAffine { coeffs } => {
                Potential::new(PotentialKind::TorusAffine { coeffs: coeffs.clone() })
            }
            PotentialConfig::Tabulated { resolution, values } => {
                Potential::new(PotentialKind::Tabulated { resolution: *resolution, values: values.clone() })
            }
        };
        base.plus_constant(offset)
    }
}

/// A point: coordinates on a torus, or a symbolic prefix followed by a
/// periodic tail (default `0`), both written as digit strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointConfig {
    Torus(Vec<f64>),
    Word {
        prefix: String,
        #[serde(default = "zero_tail")]
        tail: String,
    },
}

fn zero_tail() -> String {
    "0".into()
}

fn digits(s: &str) -> Result<Vec<u8>, String> {
    s.chars()
        .map(|c| c.to_digit(36).map(|d| d as u8).ok_or_else(|| format!("'{c}' is not a symbol")))
        .collect()
}

impl PointConfig {
    pub fn build(&self) -> Result<Point, String> {
        match self {
            PointConfig::Torus(c) => Ok(Point::torus(c.clone())),
            PointConfig::Word { prefix, tail } if tail.is_empty() => Ok(Point::symbolic(digits(prefix)?)),
            PointConfig::Word { prefix, tail } => {
                Point::symbolic_periodic(digits(prefix)?, digits(tail)?).map_err(|e| e.to_string())
            }
        }
    }

    pub fn from_point(p: &Point) -> PointConfig {
        match p {
            Point::Torus(c) => PointConfig::Torus(c.clone()),
            Point::Symbolic(s) => {
                let word = |w: &[u8]| w.iter().map(|d| char::from_digit(*d as u32, 36).unwrap_or('?')).collect();
                PointConfig::Word { prefix: word(s.prefix()), tail: s.tail().map_or_else(String::new, word) }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SampleConfig {
    /// Cylinder-complete at the closed forced length of each `(n, eps)`.
    ForcedCylinders,
    CylinderComplete { depth: usize },
    Grid { per_axis: usize },
    Random {
        size: usize,
        /// Stored symbols per random symbolic point.
        #[serde(default = "default_prefix")]
        prefix_len: usize,
    },
    Points { points: Vec<PointConfig> },
}

fn default_prefix() -> usize {
    64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomConfig {
    pub point: PointConfig,
    pub weight: f64,
}

/// The measure for `local-pressure` and `katok`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureConfig {
    #[default]
    UniformOnSample,
    CylinderUniform { depth: usize },
    /// Orbit-empirical, snapped onto the sample.
    OrbitEmpirical { atoms: usize, depth: usize },
    Atoms { atoms: Vec<AtomConfig> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleConfig {
    pub n: Vec<usize>,
    /// Eps grid, strictly decreasing.
    pub eps: Vec<f64>,
    /// Packings use depths `n..=n + depth_span`.
    #[serde(default)]
    pub depth_span: usize,
    /// Local pressures run over `n..=n + local_span`.
    #[serde(default)]
    pub local_span: usize,
    #[serde(default = "one")]
    pub window: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_bracket")]
    pub bracket: [f64; 2],
    #[serde(default = "default_widenings")]
    pub max_widenings: usize,
    /// Orbit depth of orbit-empirical measures.
    #[serde(default = "default_orbit_depth")]
    pub orbit_depth: usize,
    /// Atoms of orbit-empirical measures; 0 means the sample size.
    #[serde(default)]
    pub orbit_atoms: usize,
}

fn default_delta() -> f64 {
    0.1
}

fn default_tol() -> f64 {
    1e-6
}

fn default_bracket() -> [f64; 2] {
    [-1.0, 4.0]
}

fn default_widenings() -> usize {
    40
}

fn default_orbit_depth() -> usize {
    8
}

impl ScaleConfig {
    pub fn bisection(&self) -> Bisection {
        Bisection { lo: self.bracket[0], hi: self.bracket[1], tol: self.tol, max_widenings: self.max_widenings }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    /// vp-check: `sup P_mu <= alpha + lower_slack`.
    #[serde(default = "default_slack")]
    pub lower_slack: f64,
    /// vp-check: `|alpha - sup P_mu|` bound, asserted on oracle systems only.
    #[serde(default = "default_tightness")]
    pub tightness: f64,
    /// oracle: `|alpha - oracle|` bound.
    #[serde(default = "default_oracle_tol")]
    pub oracle_tol: f64,
    /// properties: randomized cases per property.
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// pressure: also run the sample-sup weighting.
    #[serde(default)]
    pub sample_sup: bool,
    /// vp-check: also run the trimmed (Katok) exponent of the best candidate.
    #[serde(default = "yes")]
    pub katok: bool,
}

fn default_slack() -> f64 {
    0.05
}

fn default_tightness() -> f64 {
    1e-10
}

fn default_oracle_tol() -> f64 {
    2e-3
}

fn default_budget() -> usize {
    200
}

fn yes() -> bool {
    true
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            lower_slack: default_slack(),
            tightness: default_tightness(),
            oracle_tol: default_oracle_tol(),
            budget: default_budget(),
            sample_sup: false,
            katok: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub system: SystemConfig,
    #[serde(default)]
    pub potential: PotentialConfig,
    /// Added to the potential.
    #[serde(default)]
    pub potential_offset: f64,
    /// Defaults to forced cylinders on shifts and 64 random points on tori.
    #[serde(default)]
    pub sample: Option<SampleConfig>,
    #[serde(default)]
    pub measure: MeasureConfig,
    pub scale: ScaleConfig,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide. Results do not depend on it.
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub strategy: StrategyChoice,
    #[serde(default)]
    pub disjoint: DisjointChoice,
    #[serde(default)]
    pub checks: CheckConfig,
}

/// Command-line values that replace config entries.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub strategy: Option<StrategyChoice>,
    pub disjoint: Option<DisjointChoice>,
}

/// A manifest wraps the resolved config; both are accepted as input.
#[derive(Deserialize)]
struct ManifestShape {
    config: serde_json::Value,
}

fn line_of(source: &str, key: &str) -> usize {
    let quoted = format!("\"{key}\"");
    source.lines().position(|l| l.contains(&quoted)).map_or(1, |i| i + 1)
}

pub struct Anchored<'a> {
    path: &'a str,
    source: &'a str,
}

impl Anchored<'_> {
    fn at(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::Config { path: self.path.to_string(), line: line_of(self.source, key), message: message.into() }
    }
}

impl RunConfig {
    pub fn load(path: &Path, overrides: Overrides) -> CliResult<RunConfig> {
        let source = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        RunConfig::parse(&path.display().to_string(), &source, overrides)
    }

    pub fn parse(path: &str, source: &str, overrides: Overrides) -> CliResult<RunConfig> {
        let serde_err = |e: serde_json::Error| CliError::Config {
            path: path.to_string(),
            line: e.line().max(1),
            message: e.to_string(),
        };
        let value: serde_json::Value = serde_json::from_str(source).map_err(serde_err)?;
        let mut config: RunConfig = if value.get("manifest_version").is_some() {
            let shape: ManifestShape = serde_json::from_value(value).map_err(|e| CliError::Config {
                path: path.to_string(),
                line: line_of(source, "config"),
                message: e.to_string(),
            })?;
            serde_json::from_value(shape.config).map_err(|e| CliError::Config {
                path: path.to_string(),
                line: line_of(source, "config"),
                message: e.to_string(),
            })?
        } else {
            // reparse from text so serde reports positions
            serde_json::from_str(source).map_err(serde_err)?
        };
        if let Some(s) = overrides.seed {
            config.seed = s;
        }
        if let Some(t) = overrides.threads {
            config.threads = t;
        }
        if let Some(s) = overrides.strategy {
            config.strategy = s;
        }
        if let Some(d) = overrides.disjoint {
            config.disjoint = d;
        }
        if config.sample.is_none() {
            config.sample = Some(if config.system.is_symbolic() {
                SampleConfig::ForcedCylinders
            } else {
                SampleConfig::Random { size: 64, prefix_len: default_prefix() }
            });
        }
        config.validate(&Anchored { path, source })?;
        Ok(config)
    }

    pub fn validate(&self, a: &Anchored<'_>) -> CliResult<()> {
        let system = self.system.build().map_err(|e| a.at("system", e.to_string()))?;
        let potential = self.potential();
        potential.check(&system).map_err(|e| a.at("potential", e.to_string()))?;
        let s = &self.scale;
        if s.n.is_empty() || s.n.contains(&0) {
            return Err(a.at("n", "n grid must be nonempty with entries at least 1"));
        }
        if s.eps.is_empty() {
            return Err(a.at("eps", "eps grid must be nonempty"));
        }
        if let Some(e) = s.eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(a.at("eps", format!("eps entry {e} must be positive")));
        }
        if let Some(w) = s.eps.windows(2).find(|w| !(w[1] < w[0])) {
            return Err(a.at("eps", format!("eps grid must be strictly decreasing ({} then {})", w[0], w[1])));
        }
        if !(0.0..1.0).contains(&s.delta) {
            return Err(a.at("delta", format!("delta {} is outside [0, 1)", s.delta)));
        }
        if s.window == 0 || s.window > s.local_span + 1 {
            return Err(a.at("window", format!("window must be in 1..={}", s.local_span + 1)));
        }
        if !(s.tol > 0.0) || !(s.bracket[0] < s.bracket[1]) {
            return Err(a.at("tol", "bisection needs tol > 0 and bracket lo < hi"));
        }
        for &n in &s.n {
            Scale::new(n, n + s.depth_span, s.eps[0]).map_err(|e| a.at("n", e.to_string()))?;
        }
        let symbolic = self.system.is_symbolic();
        match self.sample.as_ref().expect("resolved") {
            SampleConfig::ForcedCylinders | SampleConfig::CylinderComplete { .. } if !symbolic => {
                return Err(a.at("sample", "cylinder samples need a symbolic system"));
            }
            SampleConfig::Points { points } => {
                for p in points {
                    let p = p.build().map_err(|e| a.at("points", e))?;
                    if !system.contains(&p) {
                        return Err(a.at("points", format!("{p:?} is not a point of the system")));
                    }
                }
            }
            _ => {}
        }
        if let MeasureConfig::Atoms { atoms } = &self.measure {
            if atoms.is_empty() {
                return Err(a.at("measure", "measure needs at least one atom"));
            }
            for atom in atoms {
                atom.point.build().map_err(|e| a.at("measure", e))?;
            }
        }
        if self.command == Command::Oracle {
            match &self.system {
                SystemConfig::Symbolic { .. } => {}
                _ => return Err(a.at("command", "the oracle command needs a symbolic system")),
            }
            if !matches!(self.potential, PotentialConfig::Zero | PotentialConfig::FirstSymbol { .. } | PotentialConfig::Constant { .. }) {
                return Err(a.at("potential", "the oracle needs a locally constant potential"));
            }
            let k = system.k();
            if k > 1 && (self.potential != PotentialConfig::Zero || self.potential_offset != 0.0) {
                return Err(a.at("potential", "the multi-generator oracle needs the zero potential"));
            }
        }
        if self.checks.budget == 0 {
            return Err(a.at("budget", "property budget must be at least 1"));
        }
        Ok(())
    }

    pub fn build_system(&self) -> CliResult<System> {
        Ok(self.system.build()?)
    }

    pub fn potential(&self) -> Potential {
        self.potential.build(self.potential_offset)
    }

    pub fn report_sample(&self, system: &System, seed: u64) -> CliResult<ReportSample> {
        let sample = match self.sample.as_ref().expect("resolved") {
            SampleConfig::ForcedCylinders => return Ok(ReportSample::ForcedCylinders),
            SampleConfig::CylinderComplete { depth } => SampleSet::cylinder_complete(system, *depth)?,
            SampleConfig::Grid { per_axis } => SampleSet::grid(system, *per_axis)?,
            SampleConfig::Random { size, prefix_len } => SampleSet::random(system, *size, seed, *prefix_len)?,
            SampleConfig::Points { points } => {
                let pts = points.iter().map(|p| p.build().expect("validated")).collect();
                SampleSet::new(pts, Provenance::Explicit)?
            }
        };
        Ok(ReportSample::Fixed(sample))
    }

    /// The configured measure; orbit-empirical measures are snapped onto `z`.
    pub fn measure(&self, system: &System, z: &SampleSet, seed: u64) -> CliResult<SampleMeasure> {
        Ok(match &self.measure {
            MeasureConfig::UniformOnSample => SampleMeasure::uniform(z.points())?,
            MeasureConfig::CylinderUniform { depth } => cylinder_uniform(system, *depth)?,
            MeasureConfig::OrbitEmpirical { atoms, depth } => {
                let prefix = if system.is_symbolic() { depth + 64 } else { 0 };
                empirical_from_orbits(system, seed, *atoms, *depth, prefix)?.snapped(system, z)?
            }
            MeasureConfig::Atoms { atoms } => SampleMeasure::new(
                atoms.iter().map(|a| (a.point.build().expect("validated"), a.weight)).collect(),
            )?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHIFT: &str = r#"{
  "command": "pressure",
  "system": { "space": "symbolic", "alphabet": 2 },
  "scale": {
    "n": [4, 5],
    "eps": [0.2, 0.1]
  }
}"#;

    #[test]
    fn defaults_are_filled_in() {
        let c = RunConfig::parse("c.json", SHIFT, Overrides::default()).unwrap();
        assert_eq!(c.sample, Some(SampleConfig::ForcedCylinders));
        assert_eq!(c.scale.window, 1);
        assert_eq!(c.scale.bracket, [-1.0, 4.0]);
        assert_eq!(c.strategy, StrategyChoice::Greedy);
        let again = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::parse("c.json", &again, Overrides::default()).unwrap(), c);
    }

    #[test]
    fn increasing_eps_is_anchored() {
        let bad = SHIFT.replace("[0.2, 0.1]", "[0.1, 0.2]");
        match RunConfig::parse("c.json", &bad, Overrides::default()) {
            Err(CliError::Config { line, message, .. }) => {
                assert_eq!(line, 6);
                assert!(message.contains("strictly decreasing"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_their_line() {
        let bad = SHIFT.replace("\"n\": [4, 5],", "\"n\": [4, 5]");
        match RunConfig::parse("c.json", &bad, Overrides::default()) {
            Err(CliError::Config { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
        let unknown = SHIFT.replace("pressure", "entropy");
        assert!(matches!(RunConfig::parse("c.json", &unknown, Overrides::default()), Err(CliError::Config { line: 2, .. })));
    }

    #[test]
    fn overrides_and_oracle_guard() {
        let o = Overrides { seed: Some(9), strategy: Some(StrategyChoice::Exact), ..Overrides::default() };
        let c = RunConfig::parse("c.json", SHIFT, o).unwrap();
        assert_eq!((c.seed, c.strategy), (9, StrategyChoice::Exact));
        let torus = r#"{
  "command": "oracle",
  "system": { "space": "torus", "maps": [ { "kind": "affine", "slopes": [2] } ] },
  "scale": { "n": [3], "eps": [0.2] }
}"#;
        assert!(matches!(RunConfig::parse("t.json", torus, Overrides::default()), Err(CliError::Config { line: 2, .. })));
    }

    #[test]
    fn points_round_trip() {
        let p = Point::symbolic_periodic(vec![1, 0, 1], vec![0]).unwrap();
        let c = PointConfig::from_point(&p);
        assert_eq!(c, PointConfig::Word { prefix: "101".into(), tail: "0".into() });
        assert_eq!(c.build().unwrap(), p);
        let json = serde_json::to_string(&PointConfig::Torus(vec![0.25])).unwrap();
        assert_eq!(serde_json::from_str::<PointConfig>(&json).unwrap().build().unwrap(), Point::torus(vec![0.25]));
    }
}
