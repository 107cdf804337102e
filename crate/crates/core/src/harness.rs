//! Variational-principle experiments: packing exponents against the best
//! integrated local pressure over a finite family of candidate measures.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bowen::Closedness;
use crate::error::{Error, Result};
use crate::math::{self, LinearFit};
use crate::measures::{
    atom_local_pressures, empirical_from_orbits, integrated_pressure, katok_pressure, KatokEstimate, KatokScales,
    LocalConfig, SampleMeasure, SupportCheck,
};
use crate::oracles::forced_cylinder_length;
use crate::packing::{DisjointMode, PackingProblem, Scale, Weighting};
use crate::pressure::{critical_exponent_of, Bisection, CriticalExponentResult, Strategy};
use crate::systems::{Point, Potential, SampleSet, System};

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureCandidate {
    pub id: String,
    pub measure: SampleMeasure,
}

/// Parameters of the default candidate family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateSpec {
    pub seed: u64,
    /// Atoms per orbit-empirical measure; 0 means `|Z|`.
    pub orbit_atoms: usize,
    pub orbit_depth: usize,
    /// Scale used by the cylinder-uniform and complexity-reweighted members.
    pub n: usize,
    pub eps: f64,
}

/// Uniform on `Z`, cylinder-uniform (symbolic spaces), three orbit-empirical
/// measures snapped onto `Z`, and the complexity-reweighted measure
/// `w(x) ~ 1 / #(Z in B_n(x, e^{-n eps}))`. Every member is supported on `Z`.
pub fn candidate_family(system: &System, z: &SampleSet, spec: &CandidateSpec) -> Result<Vec<MeasureCandidate>> {
    let mut out = Vec::new();
    let uniform = SampleMeasure::uniform(z.points())?;
    out.push(MeasureCandidate { id: "uniform-on-Z".into(), measure: uniform.clone() });

    if let Some(base) = system.symbolic_base() {
        let len = forced_cylinder_length(spec.n, spec.eps, base, Closedness::Open);
        let mut keyed: Vec<(Vec<u8>, usize)> = z
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let s = p.as_symbolic().ok_or(Error::SpaceMismatch("point"))?;
                Ok(((0..len).map(|j| s.symbol(j)).collect::<Result<Vec<u8>>>()?, i))
            })
            .collect::<Result<_>>()?;
        keyed.sort();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (k, (key, i)) in keyed.iter().enumerate() {
            if k == 0 || keyed[k - 1].0 != *key {
                blocks.push(Vec::new());
            }
            blocks.last_mut().unwrap().push(*i);
        }
        let per_block = 1.0 / blocks.len() as f64;
        let atoms = blocks
            .iter()
            .flat_map(|b| b.iter().map(move |&i| (i, per_block / b.len() as f64)))
            .map(|(i, w)| (z.points()[i].clone(), w))
            .collect();
        out.push(MeasureCandidate { id: "cylinder-uniform".into(), measure: SampleMeasure::normalized(atoms)? });
    }

    let atoms = if spec.orbit_atoms == 0 { z.len() } else { spec.orbit_atoms };
    let prefix = match system.symbolic_base() {
        Some(base) => forced_cylinder_length(spec.n, spec.eps, base, Closedness::Closed) + 48,
        None => 0,
    };
    for s in 0..3u64 {
        let raw = empirical_from_orbits(system, math::split_seed(spec.seed, s), atoms, spec.orbit_depth, prefix)?;
        out.push(MeasureCandidate { id: format!("orbit-empirical-{s}"), measure: raw.snapped(system, z)? });
    }

    let config = LocalConfig::at(spec.eps, spec.n)?;
    let traces = atom_local_pressures(system, &uniform, &Potential::zero(), &config)?;
    let atoms = traces
        .iter()
        .map(|t| (t.point.clone(), 1.0 / t.entries[0].ball_mass))
        .collect();
    out.push(MeasureCandidate { id: "complexity-reweighted".into(), measure: SampleMeasure::normalized(atoms)? });
    Ok(out)
}

/// Scales and thresholds of a VP experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VpScales {
    pub n: usize,
    pub depth_span: usize,
    /// Local pressures run over `local_lo..=local_hi` with this window.
    pub local_lo: usize,
    pub local_hi: usize,
    pub window: usize,
    pub delta: f64,
    pub mode: DisjointMode,
    pub strategy: Strategy,
    pub bisection: Bisection,
    /// Asserted: `sup_mu P_mu <= alpha + lower_slack`.
    pub lower_slack: f64,
    /// Asserted when set (oracle systems only): `|gap| <= tightness`.
    pub tightness: Option<f64>,
    pub katok: bool,
}

impl VpScales {
    /// Matched scales at depth `n`: one depth, window 1, no deeper balls.
    pub fn matched(n: usize) -> Self {
        VpScales {
            n,
            depth_span: 0,
            local_lo: n,
            local_hi: n,
            window: 1,
            delta: 0.1,
            mode: DisjointMode::Triangle,
            strategy: Strategy::Greedy,
            bisection: Bisection::default(),
            lower_slack: 0.05,
            tightness: None,
            katok: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateValue {
    pub id: String,
    pub integrated: f64,
    pub excluded_mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VpRow {
    pub eps: f64,
    pub packing: CriticalExponentResult,
    pub candidates: Vec<CandidateValue>,
    pub sup: f64,
    pub argmax: String,
    pub katok: Option<KatokEstimate>,
    /// `alpha - sup`.
    pub gap: f64,
    pub lower_ok: bool,
    pub tight_ok: Option<bool>,
    /// `alpha > ||f||`, the hypothesis under which equality is expected.
    pub hypothesis_ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VpReport {
    pub scales: VpScales,
    pub sample_size: usize,
    pub sup_norm: f64,
    pub rows: Vec<VpRow>,
    /// Fits of the packing and sup columns against eps; intercepts are
    /// extrapolations to `eps = 0`.
    pub packing_fit: Option<LinearFit>,
    pub sup_fit: Option<LinearFit>,
}

impl VpReport {
    pub fn assemble(scales: VpScales, sample_size: usize, sup_norm: f64, rows: Vec<VpRow>) -> VpReport {
        let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
        let alpha: Vec<f64> = rows.iter().map(|r| r.packing.alpha).collect();
        let sup: Vec<f64> = rows.iter().map(|r| r.sup).collect();
        VpReport {
            scales,
            sample_size,
            sup_norm,
            packing_fit: math::least_squares(&eps, &alpha),
            sup_fit: math::least_squares(&eps, &sup),
            rows,
        }
    }

    pub fn lower_violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.lower_ok).count()
    }

    pub fn tightness_failures(&self) -> usize {
        self.rows.iter().filter(|r| r.tight_ok == Some(false)).count()
    }

    pub fn hypothesis_flags(&self) -> usize {
        self.rows.iter().filter(|r| !r.hypothesis_ok).count()
    }

    /// Failures of asserted checks; hypothesis flags are reported only.
    pub fn asserted_failures(&self) -> usize {
        self.lower_violations() + self.tightness_failures()
    }
}

/// One row of a VP experiment.
pub fn vp_row(
    system: &System,
    z: &SampleSet,
    potential: &Potential,
    eps: f64,
    candidates: &[MeasureCandidate],
    scales: &VpScales,
) -> Result<VpRow> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("empty candidate family".into()));
    }
    let scale = Scale::new(scales.n, scales.n + scales.depth_span, eps)?;
    let problem = PackingProblem::new(system, z, scale, potential, scales.mode, Weighting::Pointwise)?;
    let packing = critical_exponent_of(&problem, scales.strategy, scales.bisection)?;
    let config = LocalConfig::new(eps, scales.local_lo, scales.local_hi, scales.window)?;
    let mut values = Vec::with_capacity(candidates.len());
    let mut best: Option<usize> = None;
    for c in candidates {
        let ip = integrated_pressure(system, &c.measure, z, potential, &config, SupportCheck::Theorem)?;
        values.push(CandidateValue { id: c.id.clone(), integrated: ip.value, excluded_mass: ip.excluded_mass });
        let i = values.len() - 1;
        if best.is_none_or(|b| values[i].integrated > values[b].integrated) {
            best = Some(i);
        }
    }
    let best = best.unwrap();
    let sup = values[best].integrated;
    let katok = if scales.katok {
        let ks = KatokScales {
            n: scales.n,
            depth_span: scales.depth_span,
            local_lo: scales.local_lo,
            local_hi: scales.local_hi,
            window: scales.window,
            mode: scales.mode,
            strategy: scales.strategy,
            bisection: scales.bisection,
        };
        Some(katok_pressure(system, &candidates[best].measure, potential, eps, scales.delta, &ks)?)
    } else {
        None
    };
    let gap = packing.alpha - sup;
    Ok(VpRow {
        eps,
        lower_ok: sup <= packing.alpha + scales.lower_slack,
        tight_ok: scales.tightness.map(|t| gap.abs() <= t),
        hypothesis_ok: packing.alpha > potential.sup_norm(),
        argmax: values[best].id.clone(),
        packing,
        candidates: values,
        sup,
        katok,
        gap,
    })
}

pub fn vp_experiment(
    system: &System,
    z: &SampleSet,
    potential: &Potential,
    eps_grid: &[f64],
    candidates: &[MeasureCandidate],
    scales: &VpScales,
) -> Result<VpReport> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidArgument("empty eps grid".into()));
    }
    let rows = eps_grid
        .iter()
        .map(|&eps| vp_row(system, z, potential, eps, candidates, scales))
        .collect::<Result<Vec<_>>>()?;
    Ok(VpReport::assemble(*scales, z.len(), potential.sup_norm(), rows))
}

/// Dirac candidate at a point of `Z`.
pub fn dirac_candidate(p: &Point) -> MeasureCandidate {
    MeasureCandidate { id: "dirac".into(), measure: SampleMeasure::dirac(p.clone()) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{shift_oracle_alpha, ShiftOracleSpec};
    use crate::systems::Provenance;

    fn shift_setup(n: usize, eps: f64) -> (System, SampleSet) {
        let sys = System::full_shift(2, 2.0, 1).unwrap();
        let z = SampleSet::cylinder_complete(&sys, forced_cylinder_length(n, eps, 2.0, Closedness::Closed)).unwrap();
        (sys, z)
    }

    #[test]
    fn family_is_supported_on_z() {
        let (sys, z) = shift_setup(6, 0.1);
        let spec = CandidateSpec { seed: 4, orbit_atoms: 0, orbit_depth: 6, n: 6, eps: 0.1 };
        let fam = candidate_family(&sys, &z, &spec).unwrap();
        assert_eq!(fam.len(), 6);
        for c in &fam {
            assert!((c.measure.mass_in(&z) - 1.0).abs() < 1e-12, "{}", c.id);
        }
        let torus = System::circle_maps(&[2, 3]).unwrap();
        let zt = SampleSet::random(&torus, 50, 1, 0).unwrap();
        let fam = candidate_family(&torus, &zt, &CandidateSpec { n: 3, eps: 0.2, ..spec }).unwrap();
        assert_eq!(fam.len(), 5);
        assert_eq!(fam, candidate_family(&torus, &zt, &CandidateSpec { n: 3, eps: 0.2, ..spec }).unwrap());
    }

    #[test]
    fn uniform_cylinder_measure_is_tight_on_the_shift() {
        let (n, eps) = (8, 0.1);
        let (sys, z) = shift_setup(n, eps);
        let fam = [MeasureCandidate { id: "u".into(), measure: SampleMeasure::uniform(z.points()).unwrap() }];
        let scales = VpScales { tightness: Some(1e-10), ..VpScales::matched(n) };
        let report = vp_experiment(&sys, &z, &Potential::zero(), &[eps], &fam, &scales).unwrap();
        let row = &report.rows[0];
        let oracle = shift_oracle_alpha(&ShiftOracleSpec::new(2, 2.0, eps, n)).unwrap();
        assert!((row.packing.alpha - oracle).abs() < 1e-12);
        assert!(row.gap.abs() < 1e-10);
        assert_eq!(report.asserted_failures(), 0);
    }

    #[test]
    fn dirac_at_fixed_point_gives_zero() {
        let sys = System::circle_maps(&[2]).unwrap();
        let z = SampleSet::new(
            (0..32).map(|i| Point::torus(alloc::vec![i as f64 / 32.0])).collect(),
            Provenance::Explicit,
        )
        .unwrap();
        let fam = [dirac_candidate(&z.points()[0])];
        let report = vp_experiment(&sys, &z, &Potential::zero(), &[0.3], &fam, &VpScales::matched(4)).unwrap();
        assert_eq!(report.rows[0].sup, 0.0);
        assert!(report.rows[0].lower_ok);
    }

    #[test]
    fn constant_shift_moves_every_column() {
        let (n, eps) = (6, 0.2);
        let (sys, z) = shift_setup(n, eps);
        let fam = candidate_family(&sys, &z, &CandidateSpec { seed: 1, orbit_atoms: 0, orbit_depth: 4, n, eps }).unwrap();
        let f = Potential::first_symbol(alloc::vec![0.0, 0.5]);
        let c = 0.8;
        let a = vp_row(&sys, &z, &f, eps, &fam, &VpScales::matched(n)).unwrap();
        let b = vp_row(&sys, &z, &f.plus_constant(c), eps, &fam, &VpScales::matched(n)).unwrap();
        assert!((b.packing.alpha - a.packing.alpha - c).abs() < 2e-6);
        assert!((b.sup - a.sup - c).abs() < 1e-9);
        assert!((b.gap - a.gap).abs() < 2e-6);
        for (x, y) in a.candidates.iter().zip(&b.candidates) {
            assert!((y.integrated - x.integrated - c).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_family_is_rejected() {
        let (sys, z) = shift_setup(4, 0.1);
        assert!(vp_experiment(&sys, &z, &Potential::zero(), &[0.1], &[], &VpScales::matched(4)).is_err());
    }
}
