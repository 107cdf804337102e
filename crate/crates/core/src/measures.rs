//! Finitely supported measures, neutralized ball masses, local and integrated
//! measure-theoretic pressures, Katok-style trimmed packing pressures and the
//! greedy 5r subfamily.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bowen::{self, BowenIndex, Closedness};
use crate::error::{Error, Result};
use crate::math;
use crate::packing::{triangle_bound, DisjointMode, Scale};
use crate::pressure::{critical_exponent, Bisection, CriticalExponentResult, Strategy};
use crate::systems::{random_point, Point, Potential, Provenance, SampleSet, System};
use crate::words::{level_size, DEFAULT_ORBIT_CAP};

const WEIGHT_TOLERANCE: f64 = 1e-12;

/// Probability measure with finitely many distinct atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleMeasure {
    atoms: Vec<Point>,
    weights: Vec<f64>,
}

impl SampleMeasure {
    /// Weights must be positive and sum to 1 within `1e-12`; atoms distinct.
    pub fn new(atoms: Vec<(Point, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let (points, weights): (Vec<Point>, Vec<f64>) = atoms.into_iter().unzip();
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidMeasure(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        SampleSet::new(points.clone(), Provenance::Explicit).map_err(|e| match e {
            Error::DuplicatePoint(i) => Error::InvalidMeasure(format!("atom {i} repeats an earlier atom")),
            other => other,
        })?;
        Ok(SampleMeasure { atoms: points, weights })
    }

    /// Merges repeated points and rescales positive weights to total mass 1.
    pub fn normalized(atoms: Vec<(Point, f64)>) -> Result<Self> {
        let mut merged: Vec<(Point, f64)> = Vec::with_capacity(atoms.len());
        let mut idx: Vec<usize> = (0..atoms.len()).collect();
        idx.sort_by(|&a, &b| atoms[a].0.lex_cmp(&atoms[b].0).then(a.cmp(&b)));
        let mut first_of = vec![usize::MAX; atoms.len()];
        for (k, &i) in idx.iter().enumerate() {
            if k > 0 && atoms[idx[k - 1]].0 == atoms[i].0 {
                first_of[i] = first_of[idx[k - 1]];
            } else {
                first_of[i] = i;
            }
        }
        let mut slot = vec![usize::MAX; atoms.len()];
        for (i, (p, w)) in atoms.iter().enumerate() {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidMeasure(format!("weight {w} is negative or not finite")));
            }
            let f = first_of[i];
            if slot[f] == usize::MAX {
                slot[f] = merged.len();
                merged.push((p.clone(), 0.0));
            }
            merged[slot[f]].1 += w;
        }
        merged.retain(|(_, w)| *w > 0.0);
        let total: f64 = merged.iter().map(|(_, w)| w).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidMeasure("no positive mass".into()));
        }
        let atoms = merged.into_iter().map(|(p, w)| (p, w / total)).collect();
        SampleMeasure::new(atoms)
    }

    pub fn uniform(points: &[Point]) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        SampleMeasure::normalized(points.iter().map(|p| (p.clone(), w)).collect())
    }

    pub fn dirac(p: Point) -> Self {
        SampleMeasure { atoms: vec![p], weights: vec![1.0] }
    }

    pub fn atoms(&self) -> &[Point] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn support(&self) -> Result<SampleSet> {
        SampleSet::new(self.atoms.clone(), Provenance::Explicit)
    }

    /// `mu(Z)` by exact point identity.
    pub fn mass_in(&self, z: &SampleSet) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| z.contains(p))
            .map(|(_, w)| w)
            .sum()
    }

    /// Moves each atom to its nearest point of `z` and merges.
    pub fn snapped(&self, system: &System, z: &SampleSet) -> Result<Self> {
        let moved = self
            .atoms
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| Ok((z.points()[z.nearest(system, p)?].clone(), *w)))
            .collect::<Result<Vec<_>>>()?;
        SampleMeasure::normalized(moved)
    }
}

/// Uniform measure on the representatives of the `m^depth` cylinders.
pub fn cylinder_uniform(system: &System, depth: usize) -> Result<SampleMeasure> {
    let z = SampleSet::cylinder_complete(system, depth)?;
    SampleMeasure::uniform(z.points())
}

/// Uniform weights on `atoms` points `w(x)`, with `x` drawn from the space and
/// `w` a random word of length `< depth`. Repeated points are merged.
pub fn empirical_from_orbits(system: &System, seed: u64, atoms: usize, depth: usize, prefix_len: usize) -> Result<SampleMeasure> {
    if atoms == 0 {
        return Err(Error::InvalidArgument("atom count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(atoms);
    for _ in 0..atoms {
        let mut p = random_point(system, &mut rng, prefix_len + depth);
        let len = if depth == 0 { 0 } else { rand::Rng::gen_range(&mut rng, 0..depth) };
        for _ in 0..len {
            let g = rand::Rng::gen_range(&mut rng, 0..system.k());
            p = system.apply_generator(g, &p)?;
        }
        points.push((p, 1.0));
    }
    SampleMeasure::normalized(points)
}

/// `mu(B_n(x, e^{-n eps}))`, open or closed, by a scan over the atoms.
pub fn ball_mass(system: &System, mu: &SampleMeasure, x: &Point, n: usize, eps: f64, closedness: Closedness) -> Result<f64> {
    let query = bowen::BowenQuery::new(n, eps, closedness)?;
    let mut mass = 0.0;
    for (a, w) in mu.atoms.iter().zip(&mu.weights) {
        if bowen::ball_membership(system, x, a, &query)? {
            mass += w;
        }
    }
    Ok(mass)
}

/// Depth range, window and rate for local pressures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalConfig {
    pub eps: f64,
    pub n_lo: usize,
    pub n_hi: usize,
    /// Tail window of the limsup proxy.
    pub window: usize,
}

impl LocalConfig {
    pub fn new(eps: f64, n_lo: usize, n_hi: usize, window: usize) -> Result<Self> {
        if n_lo == 0 || n_hi < n_lo {
            return Err(Error::InvalidArgument("local range needs 1 <= n_lo <= n_hi".into()));
        }
        if window == 0 {
            return Err(Error::InvalidArgument("window must be at least 1".into()));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidArgument("eps must be positive".into()));
        }
        Ok(LocalConfig { eps, n_lo, n_hi, window })
    }

    /// Single depth `n`, window 1.
    pub fn at(eps: f64, n: usize) -> Result<Self> {
        LocalConfig::new(eps, n, n, 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEntry {
    pub n: usize,
    pub ball_mass: f64,
    pub f_n: f64,
    /// `(-ln mass + f_n) / |G_n|`; `+inf` for zero mass.
    pub quotient: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalPressureTrace {
    pub point: Point,
    pub eps: f64,
    pub window: usize,
    pub entries: Vec<TraceEntry>,
    /// Max over the last `window` entries.
    pub proxy: f64,
    /// Some entry in the window had zero mass.
    pub divergent: bool,
}

fn finish_trace(point: Point, config: &LocalConfig, entries: Vec<TraceEntry>) -> LocalPressureTrace {
    let tail = &entries[entries.len().saturating_sub(config.window)..];
    let proxy = tail.iter().map(|e| e.quotient).fold(f64::NEG_INFINITY, f64::max);
    LocalPressureTrace { point, eps: config.eps, window: config.window, divergent: proxy == f64::INFINITY, entries, proxy }
}

fn entry(k: usize, n: usize, mass: f64, f_n: f64) -> Result<TraceEntry> {
    let size = level_size(k, n)? as f64;
    let quotient = if mass > 0.0 { (-math::ln(mass) + f_n) / size } else { f64::INFINITY };
    Ok(TraceEntry { n, ball_mass: mass, f_n, quotient })
}

/// Local pressure trace at one point, by direct ball scans.
pub fn local_pressure(system: &System, mu: &SampleMeasure, x: &Point, potential: &Potential, config: &LocalConfig) -> Result<LocalPressureTrace> {
    let config = LocalConfig::new(config.eps, config.n_lo, config.n_hi, config.window)?;
    let mut entries = Vec::new();
    for n in config.n_lo..=config.n_hi {
        let mass = ball_mass(system, mu, x, n, config.eps, Closedness::Open)?;
        let f_n = bowen::potential_sum(system, potential, x, n)?;
        entries.push(entry(system.k(), n, mass, f_n)?);
    }
    Ok(finish_trace(x.clone(), &config, entries))
}

/// Traces at every atom of `mu`, sharing orbit tables and a neighbour index.
pub fn atom_local_pressures(system: &System, mu: &SampleMeasure, potential: &Potential, config: &LocalConfig) -> Result<Vec<LocalPressureTrace>> {
    let config = LocalConfig::new(config.eps, config.n_lo, config.n_hi, config.window)?;
    potential.check(system)?;
    let tables = bowen::orbit_tables(system, &mu.atoms, config.n_hi, DEFAULT_ORBIT_CAP)?;
    let sums = tables
        .iter()
        .map(|t| bowen::table_potential_sums(potential, t, config.n_lo))
        .collect::<Result<Vec<_>>>()?;
    let mut entries: Vec<Vec<TraceEntry>> = vec![Vec::new(); mu.len()];
    for n in config.n_lo..=config.n_hi {
        let r = math::neutral_radius(n, config.eps);
        let index = BowenIndex::new(system, &mu.atoms, n, r)?;
        for (i, x) in mu.atoms.iter().enumerate() {
            let mut mass = 0.0;
            for j in index.candidates(x)? {
                let d = bowen::table_distance(system, &tables[i], &tables[j], n, Some(r))?;
                if !d.truncated && d.value < r {
                    mass += mu.weights[j];
                }
            }
            entries[i].push(entry(system.k(), n, mass, sums[i][n - config.n_lo])?);
        }
    }
    Ok(mu
        .atoms
        .iter()
        .zip(entries)
        .map(|(p, e)| finish_trace(p.clone(), &config, e))
        .collect())
}

/// Whether atoms outside `Z` are an error or only reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportCheck {
    /// Every atom must belong to `Z`, i.e. `mu(Z) = 1`.
    Theorem,
    Exploratory,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratedPressure {
    /// `sum over atoms in Z with finite proxy of weight * proxy`.
    pub value: f64,
    pub mass_in_z: f64,
    /// Mass of atoms in `Z` left out because their trace diverged.
    pub excluded_mass: f64,
    /// Per-atom proxies; `None` for atoms outside `Z`.
    pub proxies: Vec<Option<f64>>,
    pub diagnostics: Vec<String>,
}

pub fn integrated_pressure(
    system: &System,
    mu: &SampleMeasure,
    z: &SampleSet,
    potential: &Potential,
    config: &LocalConfig,
    check: SupportCheck,
) -> Result<IntegratedPressure> {
    let inside: Vec<bool> = mu.atoms.iter().map(|p| z.contains(p)).collect();
    if !inside.iter().any(|b| *b) {
        return Err(Error::MeasureNotSupported);
    }
    let outside = inside.iter().filter(|b| !**b).count();
    let mut diagnostics = Vec::new();
    if outside > 0 {
        if check == SupportCheck::Theorem {
            return Err(Error::MeasureNotSupported);
        }
        diagnostics.push(format!("{outside} atoms lie outside Z and are not integrated"));
    }
    let traces = atom_local_pressures(system, mu, potential, config)?;
    let mut value = 0.0;
    let mut mass_in_z = 0.0;
    let mut excluded_mass = 0.0;
    let mut proxies = Vec::with_capacity(mu.len());
    for ((t, w), inz) in traces.iter().zip(&mu.weights).zip(&inside) {
        if !inz {
            proxies.push(None);
            continue;
        }
        mass_in_z += w;
        proxies.push(Some(t.proxy));
        if t.divergent {
            excluded_mass += w;
        } else {
            value += w * t.proxy;
        }
    }
    if excluded_mass > 0.0 {
        diagnostics.push(format!("mass {excluded_mass} excluded for zero ball mass"));
    }
    Ok(IntegratedPressure { value, mass_in_z, excluded_mass, proxies, diagnostics })
}

/// Scales for trimmed packing pressures: the packing runs at
/// `(n, n + depth_span, eps)` and ranks atoms by local pressures over `local`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KatokScales {
    pub n: usize,
    pub depth_span: usize,
    pub local_lo: usize,
    pub local_hi: usize,
    pub window: usize,
    pub mode: DisjointMode,
    pub strategy: Strategy,
    pub bisection: Bisection,
}

impl KatokScales {
    pub fn at(n: usize) -> Self {
        KatokScales {
            n,
            depth_span: 0,
            local_lo: n,
            local_hi: n,
            window: 1,
            mode: DisjointMode::Triangle,
            strategy: Strategy::Greedy,
            bisection: Bisection::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KatokEstimate {
    pub alpha: f64,
    pub result: CriticalExponentResult,
    pub delta: f64,
    pub eps: f64,
    /// Removed atoms in removal order.
    pub removed: Vec<usize>,
    pub retained_mass: f64,
}

/// Drops atoms in `ranking` order while the dropped mass stays within `delta`,
/// always keeping one atom.
fn trim_by(mu: &SampleMeasure, ranking: &[usize], delta: f64) -> Vec<usize> {
    let mut dropped = 0.0;
    let mut removed = Vec::new();
    for &i in ranking {
        if removed.len() + 1 == mu.len() || dropped + mu.weights[i] > delta {
            break;
        }
        dropped += mu.weights[i];
        removed.push(i);
    }
    removed
}

fn retained_exponent(
    system: &System,
    mu: &SampleMeasure,
    removed: &[usize],
    potential: &Potential,
    eps: f64,
    scales: &KatokScales,
) -> Result<(CriticalExponentResult, f64)> {
    let mut gone = vec![false; mu.len()];
    for &i in removed {
        gone[i] = true;
    }
    let kept: Vec<usize> = (0..mu.len()).filter(|i| !gone[*i]).collect();
    let mass = kept.iter().map(|&i| mu.weights[i]).sum();
    let z = SampleSet::new(kept.iter().map(|&i| mu.atoms[i].clone()).collect(), Provenance::Subset)?;
    let scale = Scale::new(scales.n, scales.n + scales.depth_span, eps)?;
    let r = critical_exponent(system, &z, scale, potential, scales.mode, scales.strategy, scales.bisection)?;
    Ok((r, mass))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!("delta {delta} is outside [0, 1)")));
    }
    Ok(())
}

/// Packing critical exponent after discarding the most complex atoms, up to
/// mass `delta`. Complexity is the local-pressure proxy; diverging atoms rank
/// first, ties go to the lexicographically larger atom.
pub fn katok_pressure(
    system: &System,
    mu: &SampleMeasure,
    potential: &Potential,
    eps: f64,
    delta: f64,
    scales: &KatokScales,
) -> Result<KatokEstimate> {
    check_delta(delta)?;
    let ranking = complexity_ranking(system, mu, potential, eps, scales)?;
    let removed = trim_by(mu, &ranking, delta);
    let (result, retained_mass) = retained_exponent(system, mu, &removed, potential, eps, scales)?;
    Ok(KatokEstimate { alpha: result.alpha, result, delta, eps, removed, retained_mass })
}

fn complexity_ranking(system: &System, mu: &SampleMeasure, potential: &Potential, eps: f64, scales: &KatokScales) -> Result<Vec<usize>> {
    let config = LocalConfig::new(eps, scales.local_lo, scales.local_hi, scales.window)?;
    let traces = atom_local_pressures(system, mu, potential, &config)?;
    let mut ranking: Vec<usize> = (0..mu.len()).collect();
    ranking.sort_by(|&a, &b| {
        traces[b]
            .proxy
            .total_cmp(&traces[a].proxy)
            .then_with(|| mu.atoms[b].lex_cmp(&mu.atoms[a]))
    });
    Ok(ranking)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuInfEstimate {
    pub value: f64,
    /// `(strategy label, alpha, removed atoms)` for each retained set tried.
    pub candidates: Vec<(String, f64, Vec<usize>)>,
}

/// Minimum of the retained-set critical exponent over complexity-ranked
/// trimming and three seeded random trimmings.
pub fn mu_inf_pressure(
    system: &System,
    mu: &SampleMeasure,
    potential: &Potential,
    eps: f64,
    delta: f64,
    scales: &KatokScales,
    seed: u64,
) -> Result<MuInfEstimate> {
    check_delta(delta)?;
    let mut plans: Vec<(String, Vec<usize>)> = Vec::new();
    let ranking = complexity_ranking(system, mu, potential, eps, scales)?;
    plans.push(("complexity".into(), trim_by(mu, &ranking, delta)));
    for s in 0..3u64 {
        let mut order: Vec<usize> = (0..mu.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(math::split_seed(seed, s)));
        plans.push((format!("random-{s}"), trim_by(mu, &order, delta)));
    }
    let mut candidates = Vec::with_capacity(plans.len());
    let mut value = f64::INFINITY;
    for (label, removed) in plans {
        let (r, _) = retained_exponent(system, mu, &removed, potential, eps, scales)?;
        value = value.min(r.alpha);
        candidates.push((label, r.alpha, removed));
    }
    Ok(MuInfEstimate { value, candidates })
}

/// A point of an input ball and the admitted ball whose 5x inflation covers it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverWitness {
    pub ball: usize,
    /// Sample index, or `None` for the ball's own center.
    pub point: Option<usize>,
    pub by: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiveR {
    /// Admitted balls in admission order.
    pub admitted: Vec<usize>,
    pub witnesses: Vec<CoverWitness>,
}

impl FiveR {
    pub fn all_covered(&self) -> bool {
        self.witnesses.iter().all(|w| w.by.is_some())
    }
}

/// Greedy disjoint subfamily of `d_n`-balls `(center, radius)`, largest radius
/// first (ties by center order), with a certificate that every sample point of
/// every input ball lies within `5 r` of some admitted ball of radius `r`.
pub fn five_r_subfamily(system: &System, n: usize, balls: &[(Point, f64)], sample: &[Point]) -> Result<FiveR> {
    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by(|&a, &b| {
        balls[b]
            .1
            .total_cmp(&balls[a].1)
            .then_with(|| balls[a].0.lex_cmp(&balls[b].0))
            .then(a.cmp(&b))
    });
    let dist = |p: &Point, q: &Point, cut: f64| -> Result<Option<f64>> {
        let d = bowen::bowen_distance(system, p, q, n, Some(cut))?;
        Ok(if d.truncated { None } else { Some(d.value) })
    };
    let mut admitted: Vec<usize> = Vec::new();
    for &i in &order {
        let mut free = true;
        for &j in &admitted {
            let bound = triangle_bound(system, balls[i].1, balls[j].1);
            if balls[i].0 == balls[j].0 {
                free = false;
                break;
            }
            match dist(&balls[i].0, &balls[j].0, bound)? {
                Some(d) if d <= bound => {
                    free = false;
                    break;
                }
                _ => {}
            }
        }
        if free {
            admitted.push(i);
        }
    }
    let mut witnesses = Vec::new();
    for (b, (center, r)) in balls.iter().enumerate() {
        let mut points: Vec<(Option<usize>, &Point)> = vec![(None, center)];
        for (s, y) in sample.iter().enumerate() {
            if let Some(d) = dist(center, y, *r)? {
                if d <= *r {
                    points.push((Some(s), y));
                }
            }
        }
        for (point, y) in points {
            let mut by = None;
            for &j in &admitted {
                let reach = 5.0 * balls[j].1;
                if let Some(d) = dist(&balls[j].0, y, reach)? {
                    if d <= reach {
                        by = Some(j);
                        break;
                    }
                }
            }
            witnesses.push(CoverWitness { ball: b, point, by });
        }
    }
    Ok(FiveR { admitted, witnesses })
}
