//! Command execution: cells run on a worker pool, results are reduced in
//! config order and written with a manifest.

use std::path::Path;

use packpress_core::harness::{candidate_family, vp_row, CandidateSpec, VpReport, VpRow, VpScales};
use packpress_core::math::LinearFit;
use packpress_core::measures::{
    atom_local_pressures, integrated_pressure, katok_pressure, mu_inf_pressure, KatokScales, LocalConfig,
    SupportCheck,
};
use packpress_core::oracles::{multi_generator_identical_shift_alpha, shift_oracle_alpha, shift_oracle_limit, ShiftOracleSpec};
use packpress_core::packing::{verify_collection, Weighting};
use packpress_core::pressure::{
    critical_exponent_of, report_cells, select, CriticalExponentResult, PressureRow, PressureTable, ReportConfig,
    ReportSample,
};
use packpress_core::properties::property_suite;
use packpress_core::{PackingProblem, Potential, SampleSet, Scale, System};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Command, PointConfig, PotentialConfig, RunConfig, SampleConfig, SystemConfig, SCHEMA_VERSION};
use crate::error::CliResult;
use crate::io::{measure_atoms, OutDir};
use crate::manifest::{trace, CellScale, ColumnTrace, Manifest, Seeds};

/// Collections larger than this are not replayed pair by pair.
pub const REPLAY_LIMIT: usize = 2000;
/// Balls listed per certificate.
pub const LIST_LIMIT: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub command: Command,
    pub asserted_failures: usize,
    pub artifacts: Vec<String>,
    pub summary: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        u8::from(self.asserted_failures > 0)
    }
}

/// What a command hands back before the manifest is written.
struct Produced {
    cells: Vec<CellScale>,
    columns: Vec<ColumnTrace>,
    asserted_failures: usize,
    summary: Vec<String>,
}

pub fn execute(config: &RunConfig, out: &Path) -> CliResult<RunOutcome> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.threads).build()?;
    let mut dir = OutDir::create(out)?;
    let system = config.build_system()?;
    let seeds = Seeds::derive(config.seed);
    let produced = pool.install(|| match config.command {
        Command::Pressure => pressure(config, &system, seeds, &mut dir),
        Command::Oracle => oracle(config, &system, seeds, &mut dir),
        Command::LocalPressure => local(config, &system, seeds, &mut dir),
        Command::Katok => katok(config, &system, seeds, &mut dir),
        Command::VpCheck => vp_check(config, &system, seeds, &mut dir),
        Command::Properties => properties(config, seeds, &mut dir),
    })?;
    let mut manifest = Manifest::new(config);
    manifest.cells = produced.cells;
    manifest.columns = produced.columns;
    manifest.asserted_failures = produced.asserted_failures;
    manifest.artifacts = dir.written().to_vec();
    manifest.artifacts.push("manifest.json".into());
    dir.write_json("manifest.json", &manifest)?;
    Ok(RunOutcome {
        command: config.command,
        asserted_failures: produced.asserted_failures,
        artifacts: dir.written().to_vec(),
        summary: produced.summary,
    })
}

fn cells_of(config: &RunConfig) -> Vec<(usize, f64)> {
    config.scale.n.iter().flat_map(|&n| config.scale.eps.iter().map(move |&e| (n, e))).collect()
}

fn cell_scale(config: &RunConfig, n: usize, eps: f64) -> CellScale {
    CellScale { n, n_max: n + config.scale.depth_span, eps }
}

fn report_config(config: &RunConfig) -> ReportConfig {
    ReportConfig {
        n_grid: config.scale.n.clone(),
        depth_span: config.scale.depth_span,
        eps_grid: config.scale.eps.clone(),
        mode: config.disjoint.into(),
        strategy: config.strategy.into(),
        bisection: config.scale.bisection(),
        sample_sup: config.checks.sample_sup,
    }
}

#[derive(Clone, Debug, Serialize)]
struct FitJson {
    slope: f64,
    intercept: f64,
}

fn fit_json(fit: Option<LinearFit>) -> Option<FitJson> {
    fit.map(|f| FitJson { slope: f.slope, intercept: f.intercept })
}

#[derive(Clone, Debug, Serialize)]
struct BallJson {
    center: PointConfig,
    depth: usize,
    radius: f64,
    log_weight: f64,
}

#[derive(Clone, Debug, Serialize)]
struct Certificate {
    n: usize,
    n_max: usize,
    eps: f64,
    /// Lower end of the bracket, where the packing sum is at least 1.
    alpha: f64,
    ln_sum: f64,
    balls: usize,
    listed: Vec<BallJson>,
    min_margin: Option<f64>,
    /// `None` when the collection is too large to replay.
    replayed: Option<bool>,
}

struct Cell {
    row: PressureRow,
    certificate: Certificate,
}

impl Cell {
    fn failed(&self) -> bool {
        self.certificate.replayed == Some(false) || !(self.certificate.ln_sum >= 0.0)
    }
}

fn pressure_cell(config: &RunConfig, system: &System, sample: &ReportSample, potential: &Potential, n: usize, eps: f64) -> CliResult<Cell> {
    let z = sample.resolve(system, n, eps)?;
    let scale = Scale::new(n, n + config.scale.depth_span, eps)?;
    let (mode, strategy, bisection) = (config.disjoint.into(), config.strategy.into(), config.scale.bisection());
    let problem = PackingProblem::new(system, &z, scale, potential, mode, Weighting::Pointwise)?;
    let packing = critical_exponent_of(&problem, strategy, bisection)?;
    let sample_sup = if config.checks.sample_sup {
        let p = PackingProblem::new(system, &z, scale, potential, mode, Weighting::SampleSup)?;
        Some(critical_exponent_of(&p, strategy, bisection)?)
    } else {
        None
    };
    let certificate = certify(system, &z, &problem, &packing)?;
    Ok(Cell { row: PressureRow { n, eps, sample_size: z.len(), packing, sample_sup }, certificate })
}

fn certify(system: &System, z: &SampleSet, problem: &PackingProblem, r: &CriticalExponentResult) -> CliResult<Certificate> {
    let selection = select(problem, r.lo, r.strategy)?;
    let collection = problem.collection(&selection)?;
    let replayed = if collection.len() <= REPLAY_LIMIT {
        Some(verify_collection(system, &collection, z.points())?)
    } else {
        None
    };
    let min_margin = collection.margins.iter().map(|m| m.margin()).reduce(f64::min);
    Ok(Certificate {
        n: r.scale.n,
        n_max: r.scale.n_max,
        eps: r.scale.eps,
        alpha: r.lo,
        ln_sum: collection.ln_sum,
        balls: collection.len(),
        listed: collection
            .balls
            .iter()
            .take(LIST_LIMIT)
            .map(|b| BallJson {
                center: PointConfig::from_point(&b.center),
                depth: b.depth,
                radius: b.radius,
                log_weight: b.log_weight,
            })
            .collect(),
        min_margin,
        replayed,
    })
}

fn pressure_cells(config: &RunConfig, system: &System, seeds: Seeds) -> CliResult<Vec<Cell>> {
    let sample = config.report_sample(system, seeds.sample)?;
    let potential = config.potential();
    cells_of(config)
        .par_iter()
        .map(|&(n, eps)| pressure_cell(config, system, &sample, &potential, n, eps))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
struct PressureCsv {
    n: usize,
    n_max: usize,
    eps: f64,
    sample_size: usize,
    pool: usize,
    alpha: f64,
    lo: f64,
    hi: f64,
    ln_m_lo: f64,
    ln_m_hi: f64,
    selected: usize,
    polished: bool,
    strategy: &'static str,
    disjoint: &'static str,
    alpha_sample_sup: Option<f64>,
}

fn pressure_csv(row: &PressureRow) -> PressureCsv {
    let p = &row.packing;
    PressureCsv {
        n: row.n,
        n_max: p.scale.n_max,
        eps: row.eps,
        sample_size: row.sample_size,
        pool: p.pool,
        alpha: p.alpha,
        lo: p.lo,
        hi: p.hi,
        ln_m_lo: p.ln_m_lo,
        ln_m_hi: p.ln_m_hi,
        selected: p.selected,
        polished: p.polished,
        strategy: strategy_name(p.strategy),
        disjoint: mode_name(p.mode),
        alpha_sample_sup: row.sample_sup.as_ref().map(|s| s.alpha),
    }
}

fn strategy_name(s: packpress_core::Strategy) -> &'static str {
    match s {
        packpress_core::Strategy::Greedy => "greedy",
        packpress_core::Strategy::Exact => "exact",
    }
}

fn mode_name(m: packpress_core::DisjointMode) -> &'static str {
    match m {
        packpress_core::DisjointMode::Triangle => "triangle",
        packpress_core::DisjointMode::SharedSample => "shared-sample",
    }
}

#[derive(Clone, Debug, Serialize)]
struct EpsViolationJson {
    n: usize,
    eps_small: f64,
    eps_large: f64,
    excess: f64,
}

#[derive(Clone, Debug, Serialize)]
struct PressureJson {
    schema_version: u32,
    rows: Vec<PressureCsv>,
    fit_depth: usize,
    fit: Option<FitJson>,
    sample_sup_fit: Option<FitJson>,
    eps_violations: Vec<EpsViolationJson>,
    certificate_failures: usize,
}

const PRESSURE_COLUMNS: &[ColumnTrace] = &[
    trace("results.csv", "alpha, lo, hi, ln_m_lo, ln_m_hi, selected, polished, pool", "packing-pressure", "critical_exponent"),
    trace("results.csv", "alpha_sample_sup", "packing-pressure", "critical_exponent (sample-sup weighting)"),
    trace("results.csv", "sample_size", "systems", "sample_set"),
    trace("results.json", "fit", "packing-pressure", "pressure_report (least squares over eps at the largest n)"),
    trace("certificates.json", "balls, ln_sum, min_margin, replayed", "packing-pressure", "greedy_packing / exhaustive_packing at the bracket's lower end"),
];

fn pressure(config: &RunConfig, system: &System, seeds: Seeds, dir: &mut OutDir) -> CliResult<Produced> {
    let cells = pressure_cells(config, system, seeds)?;
    let failures = cells.iter().filter(|c| c.failed()).count();
    let csv: Vec<PressureCsv> = cells.iter().map(|c| pressure_csv(&c.row)).collect();
    let certificates: Vec<&Certificate> = cells.iter().map(|c| &c.certificate).collect();
    let rc = report_config(config);
    let table = PressureTable::assemble(cells.iter().map(|c| c.row.clone()).collect(), &rc);
    dir.write_csv("results.csv", &csv)?;
    dir.write_json(
        "results.json",
        &PressureJson {
            schema_version: SCHEMA_VERSION,
            rows: csv.clone(),
            fit_depth: table.fit_depth,
            fit: fit_json(table.fit),
            sample_sup_fit: fit_json(table.sample_sup_fit),
            eps_violations: table
                .eps_violations
                .iter()
                .map(|v| EpsViolationJson { n: v.n, eps_small: v.eps_small, eps_large: v.eps_large, excess: v.excess })
                .collect(),
            certificate_failures: failures,
        },
    )?;
    dir.write_json("certificates.json", &certificates)?;
    let mut summary = vec![format!("{} cells, {} certificate failures", csv.len(), failures)];
    if let Some(f) = table.fit {
        summary.push(format!("fit at n = {}: intercept {:.6}, slope {:.6}", table.fit_depth, f.intercept, f.slope));
    }
    if !table.eps_violations.is_empty() {
        summary.push(format!("{} eps-monotonicity flags (reported)", table.eps_violations.len()));
    }
    Ok(Produced {
        cells: report_cells(&rc).into_iter().map(|(n, e)| cell_scale(config, n, e)).collect(),
        columns: PRESSURE_COLUMNS.to_vec(),
        asserted_failures: failures,
        summary,
    })
}

#[derive(Clone, Debug, Serialize)]
struct OracleCsv {
    n: usize,
    eps: f64,
    alpha: f64,
    oracle: f64,
    difference: f64,
    limit: Option<f64>,
    ok: bool,
}

fn oracle_table(config: &RunConfig, system: &System) -> Vec<f64> {
    let m = system.alphabet().unwrap_or(2) as usize;
    let offset = config.potential_offset;
    match &config.potential {
        PotentialConfig::FirstSymbol { table } => table.iter().map(|v| v + offset).collect(),
        PotentialConfig::Constant { value } => vec![value + offset; m],
        _ => vec![offset; m],
    }
}

fn oracle(config: &RunConfig, system: &System, seeds: Seeds, dir: &mut OutDir) -> CliResult<Produced> {
    let cells = pressure_cells(config, system, seeds)?;
    let (m, base) = (system.alphabet().expect("validated"), system.symbolic_base().expect("validated"));
    let table = oracle_table(config, system);
    let mut rows = Vec::with_capacity(cells.len());
    for c in &cells {
        let (n, eps) = (c.row.n, c.row.eps);
        let (expected, limit) = if system.k() == 1 {
            let spec = ShiftOracleSpec::new(m, base, eps, n).with_potential(table.clone());
            (shift_oracle_alpha(&spec)?, Some(shift_oracle_limit(&spec)?))
        } else {
            (multi_generator_identical_shift_alpha(m, base, eps, system.k(), n)?, None)
        };
        let difference = c.row.packing.alpha - expected;
        rows.push(OracleCsv {
            n,
            eps,
            alpha: c.row.packing.alpha,
            oracle: expected,
            difference,
            limit,
            ok: difference.abs() <= config.checks.oracle_tol && !c.failed(),
        });
    }
    let failures = rows.iter().filter(|r| !r.ok).count();
    dir.write_csv("results.csv", &rows)?;
    dir.write_json("results.json", &rows)?;
    dir.write_json("certificates.json", &cells.iter().map(|c| &c.certificate).collect::<Vec<_>>())?;
    let worst = rows.iter().map(|r| r.difference.abs()).fold(0.0f64, f64::max);
    Ok(Produced {
        cells: cells_of(config).into_iter().map(|(n, e)| cell_scale(config, n, e)).collect(),
        columns: vec![
            trace("results.csv", "alpha", "packing-pressure", "critical_exponent"),
            trace("results.csv", "oracle", "oracles", "shift_oracle_alpha / multi_generator_identical_shift_alpha"),
            trace("results.csv", "limit", "oracles", "shift_oracle_limit"),
        ],
        asserted_failures: failures,
        summary: vec![format!("{} cells, worst |alpha - oracle| = {worst:.3e}, {failures} failures", rows.len())],
    })
}

#[derive(Clone, Debug, Serialize)]
struct TraceCsv {
    n: usize,
    eps: f64,
    atom: usize,
    depth: usize,
    ball_mass: f64,
    f_n: f64,
    quotient: f64,
}

#[derive(Clone, Debug, Serialize)]
struct LocalCsv {
    n: usize,
    eps: f64,
    atoms: usize,
    integrated: f64,
    mass_in_z: f64,
    excluded_mass: f64,
    divergent_atoms: usize,
    support: &'static str,
}

fn local_cell(config: &RunConfig, system: &System, sample: &ReportSample, seeds: Seeds, n: usize, eps: f64) -> CliResult<(LocalCsv, Vec<TraceCsv>, Vec<crate::config::AtomConfig>)> {
    let z = sample.resolve(system, n, eps)?;
    let mu = config.measure(system, &z, seeds.measure)?;
    let potential = config.potential();
    let lc = LocalConfig::new(eps, n, n + config.scale.local_span, config.scale.window)?;
    let traces = atom_local_pressures(system, &mu, &potential, &lc)?;
    let theorem = mu.mass_in(&z) >= 1.0 - 1e-12;
    let check = if theorem { SupportCheck::Theorem } else { SupportCheck::Exploratory };
    let ip = integrated_pressure(system, &mu, &z, &potential, &lc, check)?;
    let rows = traces
        .iter()
        .enumerate()
        .flat_map(|(atom, t)| {
            t.entries.iter().map(move |e| TraceCsv {
                n,
                eps,
                atom,
                depth: e.n,
                ball_mass: e.ball_mass,
                f_n: e.f_n,
                quotient: e.quotient,
            })
        })
        .collect();
    let summary = LocalCsv {
        n,
        eps,
        atoms: mu.len(),
        integrated: ip.value,
        mass_in_z: ip.mass_in_z,
        excluded_mass: ip.excluded_mass,
        divergent_atoms: traces.iter().filter(|t| t.divergent).count(),
        support: if theorem { "theorem" } else { "exploratory" },
    };
    Ok((summary, rows, measure_atoms(&mu)))
}

fn local(config: &RunConfig, system: &System, seeds: Seeds, dir: &mut OutDir) -> CliResult<Produced> {
    let sample = config.report_sample(system, seeds.sample)?;
    let out: Vec<_> = cells_of(config)
        .par_iter()
        .map(|&(n, eps)| local_cell(config, system, &sample, seeds, n, eps))
        .collect::<CliResult<_>>()?;
    let summary: Vec<&LocalCsv> = out.iter().map(|o| &o.0).collect();
    let traces: Vec<&TraceCsv> = out.iter().flat_map(|o| o.1.iter()).collect();
    dir.write_csv("results.csv", &summary)?;
    dir.write_csv("traces.csv", &traces)?;
    dir.write_json("results.json", &summary)?;
    dir.write_json("measure.json", &out[0].2)?;
    Ok(Produced {
        cells: cells_of(config).into_iter().map(|(n, e)| cell_scale(config, n, e)).collect(),
        columns: vec![
            trace("traces.csv", "ball_mass, f_n, quotient", "measures-local-pressure", "local_pressure"),
            trace("results.csv", "integrated, mass_in_z, excluded_mass", "measures-local-pressure", "integrated_pressure"),
        ],
        asserted_failures: 0,
        summary: vec![format!("{} cells, {} trace rows", summary.len(), traces.len())],
    })
}

#[derive(Clone, Debug, Serialize)]
struct KatokCsv {
    n: usize,
    eps: f64,
    delta: f64,
    katok_alpha: f64,
    retained_mass: f64,
    removed: usize,
    mu_inf: f64,
}

fn katok_scales(config: &RunConfig, n: usize) -> KatokScales {
    KatokScales {
        n,
        depth_span: config.scale.depth_span,
        local_lo: n,
        local_hi: n + config.scale.local_span,
        window: config.scale.window,
        mode: config.disjoint.into(),
        strategy: config.strategy.into(),
        bisection: config.scale.bisection(),
    }
}

fn katok(config: &RunConfig, system: &System, seeds: Seeds, dir: &mut OutDir) -> CliResult<Produced> {
    let sample = config.report_sample(system, seeds.sample)?;
    let potential = config.potential();
    let delta = config.scale.delta;
    let rows: Vec<KatokCsv> = cells_of(config)
        .par_iter()
        .map(|&(n, eps)| {
            let z = sample.resolve(system, n, eps)?;
            let mu = config.measure(system, &z, seeds.measure)?;
            let scales = katok_scales(config, n);
            let k = katok_pressure(system, &mu, &potential, eps, delta, &scales)?;
            let inf = mu_inf_pressure(system, &mu, &potential, eps, delta, &scales, seeds.measure)?;
            Ok(KatokCsv {
                n,
                eps,
                delta,
                katok_alpha: k.alpha,
                retained_mass: k.retained_mass,
                removed: k.removed.len(),
                mu_inf: inf.value,
            })
        })
        .collect::<CliResult<_>>()?;
    dir.write_csv("results.csv", &rows)?;
    dir.write_json("results.json", &rows)?;
    Ok(Produced {
        cells: cells_of(config).into_iter().map(|(n, e)| cell_scale(config, n, e)).collect(),
        columns: vec![
            trace("results.csv", "katok_alpha, retained_mass, removed", "measures-local-pressure", "katok_pressure"),
            trace("results.csv", "mu_inf", "measures-local-pressure", "mu_inf_pressure"),
        ],
        asserted_failures: 0,
        summary: vec![format!("{} cells at delta = {delta}", rows.len())],
    })
}

/// Full shift with forced-cylinder samples and a constant potential: the
/// uniform candidate attains the packing exponent exactly.
fn tightness_asserted(config: &RunConfig) -> bool {
    matches!(config.system, SystemConfig::Symbolic { .. })
        && matches!(config.sample, Some(SampleConfig::ForcedCylinders))
        && matches!(config.potential, PotentialConfig::Zero | PotentialConfig::Constant { .. })
}

fn vp_scales(config: &RunConfig, n: usize) -> VpScales {
    VpScales {
        n,
        depth_span: config.scale.depth_span,
        local_lo: n,
        local_hi: n + config.scale.local_span,
        window: config.scale.window,
        delta: config.scale.delta,
        mode: config.disjoint.into(),
        strategy: config.strategy.into(),
        bisection: config.scale.bisection(),
        lower_slack: config.checks.lower_slack,
        tightness: tightness_asserted(config).then_some(config.checks.tightness),
        katok: config.checks.katok,
    }
}

#[derive(Clone, Debug, Serialize)]
struct VpCsv {
    n: usize,
    eps: f64,
    alpha: f64,
    lo: f64,
    hi: f64,
    sup: f64,
    argmax: String,
    gap: f64,
    katok_alpha: Option<f64>,
    lower_ok: bool,
    tight_ok: Option<bool>,
    hypothesis_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
struct CandidateCsv {
    n: usize,
    eps: f64,
    candidate: String,
    integrated: f64,
    excluded_mass: f64,
}

#[derive(Clone, Debug, Serialize)]
struct VpJson {
    n: usize,
    sup_norm: f64,
    packing_fit: Option<FitJson>,
    sup_fit: Option<FitJson>,
    lower_violations: usize,
    tightness_failures: usize,
    hypothesis_flags: usize,
    rows: Vec<VpCsv>,
}

fn vp_csv(n: usize, r: &VpRow) -> VpCsv {
    VpCsv {
        n,
        eps: r.eps,
        alpha: r.packing.alpha,
        lo: r.packing.lo,
        hi: r.packing.hi,
        sup: r.sup,
        argmax: r.argmax.clone(),
        gap: r.gap,
        katok_alpha: r.katok.as_ref().map(|k| k.alpha),
        lower_ok: r.lower_ok,
        tight_ok: r.tight_ok,
        hypothesis_ok: r.hypothesis_ok,
    }
}

fn vp_check(config: &RunConfig, system: &System, seeds: Seeds, dir: &mut OutDir) -> CliResult<Produced> {
    let sample = config.report_sample(system, seeds.sample)?;
    let potential = config.potential();
    let cells = cells_of(config);
    let rows: Vec<(usize, VpRow)> = cells
        .par_iter()
        .map(|&(n, eps)| {
            let z = sample.resolve(system, n, eps)?;
            let spec = CandidateSpec {
                seed: seeds.candidates,
                orbit_atoms: config.scale.orbit_atoms,
                orbit_depth: config.scale.orbit_depth,
                n,
                eps,
            };
            let family = candidate_family(system, &z, &spec)?;
            Ok((n, vp_row(system, &z, &potential, eps, &family, &vp_scales(config, n))?))
        })
        .collect::<CliResult<_>>()?;
    let mut reports = Vec::new();
    for &n in &config.scale.n {
        let part: Vec<VpRow> = rows.iter().filter(|(m, _)| *m == n).map(|(_, r)| r.clone()).collect();
        let size = part.first().map_or(0, |r| r.packing.pool);
        reports.push(VpReport::assemble(vp_scales(config, n), size, potential.sup_norm(), part));
    }
    let csv: Vec<VpCsv> = rows.iter().map(|(n, r)| vp_csv(*n, r)).collect();
    let candidates: Vec<CandidateCsv> = rows
        .iter()
        .flat_map(|(n, r)| {
            r.candidates.iter().map(move |c| CandidateCsv {
                n: *n,
                eps: r.eps,
                candidate: c.id.clone(),
                integrated: c.integrated,
                excluded_mass: c.excluded_mass,
            })
        })
        .collect();
    let json: Vec<VpJson> = reports
        .iter()
        .map(|r| VpJson {
            n: r.scales.n,
            sup_norm: r.sup_norm,
            packing_fit: fit_json(r.packing_fit),
            sup_fit: fit_json(r.sup_fit),
            lower_violations: r.lower_violations(),
            tightness_failures: r.tightness_failures(),
            hypothesis_flags: r.hypothesis_flags(),
            rows: r.rows.iter().map(|row| vp_csv(r.scales.n, row)).collect(),
        })
        .collect();
    let failures: usize = reports.iter().map(VpReport::asserted_failures).sum();
    let flags: usize = reports.iter().map(VpReport::hypothesis_flags).sum();
    dir.write_csv("results.csv", &csv)?;
    dir.write_csv("candidates.csv", &candidates)?;
    dir.write_json("results.json", &json)?;
    let mut summary = vec![format!(
        "{} cells, {} candidate values, {failures} asserted failures{}",
        csv.len(),
        candidates.len(),
        if tightness_asserted(config) { " (tightness asserted)" } else { "" }
    )];
    if flags > 0 {
        summary.push(format!("{flags} cells where alpha <= ||f|| (reported)"));
    }
    Ok(Produced {
        cells: cells.into_iter().map(|(n, e)| cell_scale(config, n, e)).collect(),
        columns: vec![
            trace("results.csv", "alpha, lo, hi", "packing-pressure", "critical_exponent"),
            trace("results.csv", "sup, argmax, gap, lower_ok, tight_ok, hypothesis_ok", "vp-harness", "vp_experiment"),
            trace("results.csv", "katok_alpha", "measures-local-pressure", "katok_pressure"),
            trace("candidates.csv", "integrated, excluded_mass", "measures-local-pressure", "integrated_pressure"),
        ],
        asserted_failures: failures,
        summary,
    })
}

#[derive(Clone, Debug, Serialize)]
struct PropertyCsv {
    property: &'static str,
    checked: usize,
    violations: usize,
    first_violation: String,
}

fn properties(config: &RunConfig, seeds: Seeds, dir: &mut OutDir) -> CliResult<Produced> {
    let matrix = property_suite(seeds.properties, config.checks.budget)?;
    let rows: Vec<PropertyCsv> = matrix
        .outcomes
        .iter()
        .map(|o| PropertyCsv {
            property: o.name,
            checked: o.checked,
            violations: o.violations,
            first_violation: o.first_violation.clone().unwrap_or_default(),
        })
        .collect();
    let failing = matrix.outcomes.iter().filter(|o| !o.passed()).count();
    dir.write_csv("results.csv", &rows)?;
    dir.write_json("results.json", &rows)?;
    Ok(Produced {
        cells: Vec::new(),
        columns: vec![trace("results.csv", "checked, violations", "oracles", "property_suite")],
        asserted_failures: failing,
        summary: vec![format!("{} properties, {} failing", rows.len(), failing)],
    })
}
