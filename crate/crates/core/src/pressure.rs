//! Pre-measure estimates, critical exponents, cover-based outer estimates and
//! pressure tables over `(n, eps)` grids.

use alloc::vec;
use alloc::vec::Vec;

use crate::bowen::Closedness;
use crate::error::{Error, Result};
use crate::math::{self, LinearFit};
use crate::oracles::forced_cylinder_length;
pub use crate::packing::Scale;
use crate::packing::{DisjointMode, PackingProblem, Selection, Weighting, EXHAUSTIVE_CAP};
use crate::systems::{Point, Potential, SampleSet, Space, System};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Greedy,
    /// Branch and bound; pools above the exhaustive cap are rejected.
    Exact,
}

/// `ln M^P(n, alpha, eps, Z, f)` as estimated by one selection strategy. Both
/// strategies give lower bounds on the pre-measure.
#[derive(Clone, Debug, PartialEq)]
pub struct PremeasureEstimate {
    pub ln_value: f64,
    pub balls: usize,
    pub strategy: Strategy,
}

impl PremeasureEstimate {
    pub fn value(&self) -> f64 {
        math::exp(self.ln_value)
    }
}

pub fn select(problem: &PackingProblem, alpha: f64, strategy: Strategy) -> Result<Selection> {
    match strategy {
        Strategy::Greedy => Ok(problem.greedy(alpha)),
        Strategy::Exact => problem.exhaustive(alpha, EXHAUSTIVE_CAP),
    }
}

pub fn premeasure_estimate(
    system: &System,
    z: &SampleSet,
    scale: Scale,
    alpha: f64,
    potential: &Potential,
    strategy: Strategy,
    mode: DisjointMode,
) -> Result<PremeasureEstimate> {
    let problem = PackingProblem::new(system, z, scale, potential, mode, Weighting::Pointwise)?;
    let sel = select(&problem, alpha, strategy)?;
    Ok(PremeasureEstimate { ln_value: sel.ln_sum, balls: sel.items.len(), strategy })
}

/// Initial bracket, tolerance and widening budget for the root search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bisection {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub max_widenings: usize,
}

impl Default for Bisection {
    fn default() -> Self {
        Bisection { lo: -1.0, hi: 4.0, tol: 1e-6, max_widenings: 40 }
    }
}

impl Bisection {
    pub fn with_tol(tol: f64) -> Self {
        Bisection { tol, ..Bisection::default() }
    }
}

/// Root of `M^P = 1` at one scale.
///
/// `ln_m_lo > 0 > ln_m_hi` and `hi - lo <= tol` unless the root was hit
/// exactly, in which case the bracket collapses onto it. When the same balls
/// are selected at both ends, `alpha` is refined to the exact root for that
/// fixed collection and `polished` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalExponentResult {
    pub alpha: f64,
    pub lo: f64,
    pub hi: f64,
    pub ln_m_lo: f64,
    pub ln_m_hi: f64,
    pub tol: f64,
    pub scale: Scale,
    pub strategy: Strategy,
    pub mode: DisjointMode,
    pub weighting: Weighting,
    pub polished: bool,
    pub selected: usize,
    pub pool: usize,
    pub evaluations: usize,
}

pub fn critical_exponent(
    system: &System,
    z: &SampleSet,
    scale: Scale,
    potential: &Potential,
    mode: DisjointMode,
    strategy: Strategy,
    bisection: Bisection,
) -> Result<CriticalExponentResult> {
    let problem = PackingProblem::new(system, z, scale, potential, mode, Weighting::Pointwise)?;
    critical_exponent_of(&problem, strategy, bisection)
}

pub fn critical_exponent_of(problem: &PackingProblem, strategy: Strategy, bisection: Bisection) -> Result<CriticalExponentResult> {
    if !(bisection.tol > 0.0) || !(bisection.lo < bisection.hi) {
        return Err(Error::InvalidArgument("bisection needs lo < hi and tol > 0".into()));
    }
    let mut evaluations = 0usize;
    let mut eval = |alpha: f64| -> Result<Selection> {
        evaluations += 1;
        select(problem, alpha, strategy)
    };
    let (mut lo, mut hi) = (bisection.lo, bisection.hi);
    let mut s_lo = eval(lo)?;
    let mut step = hi - lo;
    let mut widen = 0;
    while !(s_lo.ln_sum > 0.0) {
        if widen == bisection.max_widenings {
            return Err(Error::BracketNotFound { lo, hi });
        }
        hi = lo;
        lo -= step;
        step *= 2.0;
        widen += 1;
        s_lo = eval(lo)?;
    }
    let mut s_hi = eval(hi)?;
    let mut step = hi - lo;
    while !(s_hi.ln_sum < 0.0) {
        if widen == bisection.max_widenings {
            return Err(Error::BracketNotFound { lo, hi });
        }
        if s_hi.ln_sum > 0.0 {
            lo = hi;
            s_lo = s_hi.clone();
        }
        hi += step;
        step *= 2.0;
        widen += 1;
        s_hi = eval(hi)?;
    }

    let mut exact = None;
    while hi - lo > bisection.tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = eval(mid)?;
        if s.ln_sum > 0.0 {
            lo = mid;
            s_lo = s;
        } else if s.ln_sum < 0.0 {
            hi = mid;
            s_hi = s;
        } else {
            exact = Some(s);
            break;
        }
    }
    let pool = problem.pool_size();
    let base = |alpha: f64, lo: f64, hi: f64, ln_lo: f64, ln_hi: f64, polished: bool, selected: usize, evaluations: usize| {
        CriticalExponentResult {
            alpha,
            lo,
            hi,
            ln_m_lo: ln_lo,
            ln_m_hi: ln_hi,
            tol: bisection.tol,
            scale: problem.scale(),
            strategy,
            mode: problem.mode(),
            weighting: problem.weighting(),
            polished,
            selected,
            pool,
            evaluations,
        }
    };
    if let Some(s) = exact {
        return Ok(base(s.alpha, s.alpha, s.alpha, 0.0, 0.0, false, s.items.len(), evaluations));
    }
    let mut alpha = lo + 0.5 * (hi - lo);
    let mut polished = false;
    if s_lo.items == s_hi.items && !s_lo.items.is_empty() {
        let terms: Vec<(f64, f64)> = s_lo
            .items
            .iter()
            .map(|&i| {
                let (_, _, level, sum) = problem.candidate(i);
                (level, sum)
            })
            .collect();
        alpha = fixed_collection_root(&terms, lo, hi);
        polished = true;
    }
    Ok(base(alpha, lo, hi, s_lo.ln_sum, s_hi.ln_sum, polished, s_lo.items.len(), evaluations))
}

/// Root of `ln sum_i exp(-alpha G_i + F_i) = 0` inside `[lo, hi]`, where the
/// function is strictly decreasing with a sign change.
pub fn fixed_collection_root(terms: &[(f64, f64)], lo: f64, hi: f64) -> f64 {
    let h = |alpha: f64| -> (f64, f64) {
        let keys: Vec<f64> = terms.iter().map(|(g, f)| -alpha * g + f).collect();
        let ln = math::log_sum_exp(&keys);
        // derivative: minus the weight-averaged level
        let slope = -terms
            .iter()
            .zip(&keys)
            .map(|((g, _), k)| g * math::exp(k - ln))
            .sum::<f64>();
        (ln, slope)
    };
    let g0 = terms[0].0;
    if terms.iter().all(|(g, _)| *g == g0) {
        let fs: Vec<f64> = terms.iter().map(|(_, f)| *f).collect();
        return math::log_sum_exp(&fs) / g0;
    }
    let (mut a, mut b) = (lo, hi);
    let mut x = a + 0.5 * (b - a);
    for _ in 0..200 {
        let (v, d) = h(x);
        if v == 0.0 {
            return x;
        }
        if v > 0.0 {
            a = x;
        } else {
            b = x;
        }
        let newton = x - v / d;
        let next = if newton > a && newton < b { newton } else { a + 0.5 * (b - a) };
        if (next - x).abs() <= 1e-16 * x.abs().max(1.0) {
            return next;
        }
        x = next;
    }
    x
}

/// How to split `Z` into blocks for the outer estimate.
#[derive(Clone, Debug, PartialEq)]
pub enum CoverStrategy {
    Trivial,
    /// Blocks are cylinders of the given length.
    CylinderPartition { length: usize },
    /// Blocks are dyadic boxes of side `2^-level`.
    DyadicPartition { level: u32 },
    /// Explicit blocks of sample indices; they must cover `Z`.
    Custom(Vec<Vec<usize>>),
}

/// Trivial cover plus partitions at three granularities.
pub fn default_cover_strategies(system: &System) -> Vec<CoverStrategy> {
    let mut out = vec![CoverStrategy::Trivial];
    match system.space() {
        Space::Symbolic { .. } => out.extend((1..=3).map(|length| CoverStrategy::CylinderPartition { length })),
        Space::Torus { .. } => out.extend((1..=3).map(|level| CoverStrategy::DyadicPartition { level })),
    }
    out
}

fn cover_blocks(system: &System, z: &SampleSet, strategy: &CoverStrategy) -> Result<Vec<Vec<usize>>> {
    let key_blocks = |key: &dyn Fn(&Point) -> Result<Vec<i64>>| -> Result<Vec<Vec<usize>>> {
        let mut keyed: Vec<(Vec<i64>, usize)> = z
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| Ok((key(p)?, i)))
            .collect::<Result<_>>()?;
        keyed.sort();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, (k, idx)) in keyed.iter().enumerate() {
            if i == 0 || keyed[i - 1].0 != *k {
                blocks.push(Vec::new());
            }
            blocks.last_mut().unwrap().push(*idx);
        }
        Ok(blocks)
    };
    match strategy {
        CoverStrategy::Trivial => Ok(vec![(0..z.len()).collect()]),
        CoverStrategy::CylinderPartition { length } => {
            if !system.is_symbolic() {
                return Err(Error::Unsupported("cylinder covers need a symbolic space"));
            }
            key_blocks(&|p: &Point| {
                let s = p.as_symbolic().ok_or(Error::SpaceMismatch("point"))?;
                (0..*length).map(|i| s.symbol(i).map(i64::from)).collect()
            })
        }
        CoverStrategy::DyadicPartition { level } => {
            if system.is_symbolic() {
                return Err(Error::Unsupported("dyadic covers need a torus"));
            }
            let scale = (1u64 << level) as f64;
            key_blocks(&|p: &Point| {
                let c = p.as_torus().ok_or(Error::SpaceMismatch("point"))?;
                Ok(c.iter().map(|x| math::floor(x * scale) as i64).collect())
            })
        }
        CoverStrategy::Custom(blocks) => {
            let mut seen = vec![false; z.len()];
            for block in blocks {
                for &i in block {
                    if i >= z.len() {
                        return Err(Error::InvalidArgument(alloc::format!("cover block index {i} is outside Z")));
                    }
                    seen[i] = true;
                }
            }
            let missing = seen.iter().filter(|s| !**s).count();
            if missing > 0 {
                return Err(Error::NotACover { missing });
            }
            Ok(blocks.iter().filter(|b| !b.is_empty()).cloned().collect())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OuterEstimate {
    /// `ln` of the minimum over strategies.
    pub ln_value: f64,
    /// Index of the minimizing strategy.
    pub best: usize,
    pub per_strategy: Vec<f64>,
}

/// `min` over cover strategies of `sum_i M^P(Z_i)`, in log scale. The trivial
/// cover should be on the menu; it is what makes the result no larger than the
/// pre-measure estimate of `Z` itself.
#[allow(clippy::too_many_arguments)]
pub fn outer_estimate(
    system: &System,
    z: &SampleSet,
    scale: Scale,
    alpha: f64,
    potential: &Potential,
    strategies: &[CoverStrategy],
    strategy: Strategy,
    mode: DisjointMode,
) -> Result<OuterEstimate> {
    if strategies.is_empty() {
        return Err(Error::InvalidArgument("no cover strategies".into()));
    }
    let mut per = Vec::with_capacity(strategies.len());
    for cover in strategies {
        let blocks = cover_blocks(system, z, cover)?;
        let mut terms = Vec::with_capacity(blocks.len());
        for block in blocks {
            let sub = z.subset(&block)?;
            terms.push(premeasure_estimate(system, &sub, scale, alpha, potential, strategy, mode)?.ln_value);
        }
        per.push(math::log_sum_exp(&terms));
    }
    let mut best = 0;
    for i in 1..per.len() {
        if per[i] < per[best] {
            best = i;
        }
    }
    Ok(OuterEstimate { ln_value: per[best], best, per_strategy: per })
}

/// Where each cell of a pressure table takes its sample from.
#[derive(Clone, Debug)]
pub enum ReportSample {
    Fixed(SampleSet),
    /// Cylinder-complete sample at the closed forced length of each `(n, eps)`.
    ForcedCylinders,
}

impl ReportSample {
    pub fn resolve(&self, system: &System, n: usize, eps: f64) -> Result<SampleSet> {
        match self {
            ReportSample::Fixed(z) => Ok(z.clone()),
            ReportSample::ForcedCylinders => {
                let base = system
                    .symbolic_base()
                    .ok_or(Error::Unsupported("forced-cylinder samples need a symbolic space"))?;
                SampleSet::cylinder_complete(system, forced_cylinder_length(n, eps, base, Closedness::Closed))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportConfig {
    pub n_grid: Vec<usize>,
    /// Each cell uses `N_max = n + depth_span`.
    pub depth_span: usize,
    /// Strictly decreasing.
    pub eps_grid: Vec<f64>,
    pub mode: DisjointMode,
    pub strategy: Strategy,
    pub bisection: Bisection,
    pub sample_sup: bool,
}

impl ReportConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.eps_grid.is_empty() {
            return Err(Error::InvalidArgument("grids must be nonempty".into()));
        }
        if self.n_grid.contains(&0) {
            return Err(Error::InvalidArgument("n grid entries must be at least 1".into()));
        }
        for w in self.eps_grid.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::InvalidArgument("eps grid must be strictly decreasing".into()));
            }
        }
        if self.eps_grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidArgument("eps grid entries must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PressureRow {
    pub n: usize,
    pub eps: f64,
    pub sample_size: usize,
    pub packing: CriticalExponentResult,
    /// The sample-sup variant, when requested.
    pub sample_sup: Option<CriticalExponentResult>,
}

/// `alpha(n, eps_small) > alpha(n, eps_large) + 2 tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsViolation {
    pub n: usize,
    pub eps_small: f64,
    pub eps_large: f64,
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PressureTable {
    pub rows: Vec<PressureRow>,
    /// Depth whose column is fitted against eps (the largest `n`).
    pub fit_depth: usize,
    /// Least-squares line of `alpha(fit_depth, eps)` against `eps`; the
    /// intercept is an extrapolation to `eps = 0`, not a limit.
    pub fit: Option<LinearFit>,
    pub sample_sup_fit: Option<LinearFit>,
    pub eps_violations: Vec<EpsViolation>,
}

/// One cell of a pressure table.
pub fn pressure_cell(
    system: &System,
    sample: &ReportSample,
    potential: &Potential,
    config: &ReportConfig,
    n: usize,
    eps: f64,
) -> Result<PressureRow> {
    let z = sample.resolve(system, n, eps)?;
    let scale = Scale::new(n, n + config.depth_span, eps)?;
    let problem = PackingProblem::new(system, &z, scale, potential, config.mode, Weighting::Pointwise)?;
    let packing = critical_exponent_of(&problem, config.strategy, config.bisection)?;
    let sample_sup = if config.sample_sup {
        let p = PackingProblem::new(system, &z, scale, potential, config.mode, Weighting::SampleSup)?;
        Some(critical_exponent_of(&p, config.strategy, config.bisection)?)
    } else {
        None
    };
    Ok(PressureRow { n, eps, sample_size: z.len(), packing, sample_sup })
}

/// Cells in table order: `n` outer, `eps` inner.
pub fn report_cells(config: &ReportConfig) -> Vec<(usize, f64)> {
    config
        .n_grid
        .iter()
        .flat_map(|&n| config.eps_grid.iter().map(move |&e| (n, e)))
        .collect()
}

impl PressureTable {
    /// Fits and monotonicity flags over rows given in [`report_cells`] order.
    pub fn assemble(rows: Vec<PressureRow>, config: &ReportConfig) -> PressureTable {
        let fit_depth = config.n_grid.iter().copied().max().unwrap_or(0);
        let column = |sup: bool| -> Option<LinearFit> {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.n == fit_depth)
                .filter_map(|r| {
                    let res = if sup { r.sample_sup.as_ref()? } else { &r.packing };
                    Some((r.eps, res.alpha))
                })
                .unzip();
            math::least_squares(&xs, &ys)
        };
        let mut eps_violations = Vec::new();
        for &n in &config.n_grid {
            let col: Vec<&PressureRow> = rows.iter().filter(|r| r.n == n).collect();
            for w in col.windows(2) {
                let (large, small) = (w[0], w[1]);
                let excess = small.packing.alpha - large.packing.alpha;
                if excess > 2.0 * config.bisection.tol {
                    eps_violations.push(EpsViolation { n, eps_small: small.eps, eps_large: large.eps, excess });
                }
            }
        }
        PressureTable { fit_depth, fit: column(false), sample_sup_fit: column(true), rows, eps_violations }
    }
}

pub fn pressure_report(system: &System, sample: &ReportSample, potential: &Potential, config: &ReportConfig) -> Result<PressureTable> {
    config.validate()?;
    let rows = report_cells(config)
        .into_iter()
        .map(|(n, eps)| pressure_cell(system, sample, potential, config, n, eps))
        .collect::<Result<Vec<_>>>()?;
    Ok(PressureTable::assemble(rows, config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{shift_oracle_alpha, ShiftOracleSpec};
    use crate::systems::{PotentialKind, Provenance};

    fn shift2() -> System {
        System::full_shift(2, 2.0, 1).unwrap()
    }

    #[test]
    fn singleton_premeasure_and_exponent() {
        let sys = System::circle_maps(&[2]).unwrap();
        let z = SampleSet::new(vec![Point::torus(vec![0.25])], Provenance::Explicit).unwrap();
        let scale = Scale::new(4, 6, 0.3).unwrap();
        let m = premeasure_estimate(&sys, &z, scale, 0.5, &Potential::zero(), Strategy::Greedy, DisjointMode::Triangle).unwrap();
        assert!((m.ln_value + 2.0).abs() < 1e-15);
        let r = critical_exponent(&sys, &z, scale, &Potential::zero(), DisjointMode::Triangle, Strategy::Greedy, Bisection::with_tol(1e-9)).unwrap();
        assert!(r.alpha.abs() < 1e-9);
    }

    #[test]
    fn bracket_invariants_hold() {
        let sys = System::circle_maps(&[2, 3]).unwrap();
        let z = SampleSet::random(&sys, 60, 5, 0).unwrap();
        let f = Potential::new(PotentialKind::TorusAffine { coeffs: vec![1.3] });
        for (lo, hi) in [(-1.0, 4.0), (2.0, 3.0), (-9.0, -8.0)] {
            let b = Bisection { lo, hi, tol: 1e-7, max_widenings: 60 };
            let r = critical_exponent(&sys, &z, Scale::new(3, 4, 0.2).unwrap(), &f, DisjointMode::Triangle, Strategy::Greedy, b).unwrap();
            assert!(r.ln_m_lo > 0.0 && r.ln_m_hi < 0.0);
            assert!(r.hi - r.lo <= 1e-7);
            assert!(r.lo <= r.alpha && r.alpha <= r.hi);
        }
        let tight = Bisection { lo: 100.0, hi: 101.0, tol: 1e-6, max_widenings: 1 };
        assert!(matches!(
            critical_exponent(&sys, &z, Scale::new(3, 4, 0.2).unwrap(), &f, DisjointMode::Triangle, Strategy::Greedy, tight),
            Err(Error::BracketNotFound { .. })
        ));
    }

    #[test]
    fn full_shift_matches_oracle() {
        let sys = shift2();
        for (n, eps) in [(6, 0.1), (8, 0.05), (9, 0.2)] {
            let z = ReportSample::ForcedCylinders.resolve(&sys, n, eps).unwrap();
            let r = critical_exponent(&sys, &z, Scale::new(n, n + 2, eps).unwrap(), &Potential::zero(), DisjointMode::Triangle, Strategy::Greedy, Bisection::default()).unwrap();
            let oracle = shift_oracle_alpha(&ShiftOracleSpec::new(2, 2.0, eps, n)).unwrap();
            assert!(r.polished);
            assert!((r.alpha - oracle).abs() < 1e-12, "{} vs {}", r.alpha, oracle);
        }
    }

    #[test]
    fn constant_shift_moves_exponent_by_constant() {
        let sys = System::circle_maps(&[2]).unwrap();
        let z = SampleSet::grid(&sys, 40).unwrap();
        let f = Potential::new(PotentialKind::Tabulated { resolution: 3, values: vec![0.1, 0.5, -0.2] });
        let scale = Scale::new(5, 6, 0.25).unwrap();
        let a = critical_exponent(&sys, &z, scale, &f, DisjointMode::Triangle, Strategy::Greedy, Bisection::default()).unwrap();
        for c in [0.75, -0.3] {
            let b = critical_exponent(&sys, &z, scale, &f.plus_constant(c), DisjointMode::Triangle, Strategy::Greedy, Bisection::default()).unwrap();
            assert!((b.alpha - a.alpha - c).abs() <= 2e-6);
        }
    }

    #[test]
    fn fixed_collection_root_solves_mixed_levels() {
        let terms = [(1.0, 0.2), (3.0, 1.0), (7.0, 2.5)];
        let root = fixed_collection_root(&terms, -5.0, 5.0);
        let ks: Vec<f64> = terms.iter().map(|(g, f)| -root * g + f).collect();
        assert!(math::log_sum_exp(&ks).abs() < 1e-14);
    }

    #[test]
    fn cover_examples() {
        let sys = shift2();
        let (n, eps) = (4, 0.1);
        let z = ReportSample::ForcedCylinders.resolve(&sys, n, eps).unwrap();
        let scale = Scale::new(n, n + 1, eps).unwrap();
        let f = Potential::zero();
        let trivial = outer_estimate(&sys, &z, scale, 0.7, &f, &[CoverStrategy::Trivial], Strategy::Greedy, DisjointMode::Triangle).unwrap();
        let pre = premeasure_estimate(&sys, &z, scale, 0.7, &f, Strategy::Greedy, DisjointMode::Triangle).unwrap();
        assert_eq!(trivial.ln_value, pre.ln_value);
        let split = outer_estimate(
            &sys,
            &z,
            scale,
            0.7,
            &f,
            &[CoverStrategy::CylinderPartition { length: 1 }],
            Strategy::Greedy,
            DisjointMode::Triangle,
        )
        .unwrap();
        assert!((split.ln_value - trivial.ln_value).abs() < 1e-12);
        let all = outer_estimate(&sys, &z, scale, 0.7, &f, &default_cover_strategies(&sys), Strategy::Greedy, DisjointMode::Triangle).unwrap();
        assert!(all.ln_value <= trivial.ln_value);
        let bad = CoverStrategy::Custom(vec![vec![0, 1]]);
        assert!(matches!(
            outer_estimate(&sys, &z, scale, 0.7, &f, &[bad], Strategy::Greedy, DisjointMode::Triangle),
            Err(Error::NotACover { .. })
        ));
    }

    #[test]
    fn report_validates_grids_and_fits() {
        let sys = shift2();
        let mut config = ReportConfig {
            n_grid: vec![6, 8],
            depth_span: 1,
            eps_grid: vec![0.3, 0.2, 0.1],
            mode: DisjointMode::Triangle,
            strategy: Strategy::Greedy,
            bisection: Bisection::default(),
            sample_sup: true,
        };
        let table = pressure_report(&sys, &ReportSample::ForcedCylinders, &Potential::zero(), &config).unwrap();
        assert_eq!(table.rows.len(), 6);
        assert!(table.eps_violations.is_empty());
        let fit = table.fit.unwrap();
        assert!(fit.slope > 0.5 && fit.slope < 1.5);
        for row in &table.rows {
            assert_eq!(row.sample_sup.as_ref().unwrap().alpha, row.packing.alpha);
        }
        config.eps_grid = vec![0.1, 0.2];
        assert!(pressure_report(&sys, &ReportSample::ForcedCylinders, &Potential::zero(), &config).is_err());
    }
}
