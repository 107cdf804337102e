//! Randomized property checks over the estimators, one outcome per property.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bowen::{self, ball_membership, bowen_distance, BowenQuery, Closedness};
use crate::error::Result;
use crate::math::{self, split_seed};
use crate::measures::{ball_mass, five_r_subfamily, SampleMeasure};
use crate::oracles::{forced_cylinder_length, shift_oracle_alpha, ShiftOracleSpec};
use crate::packing::{
    exhaustive_packing, greedy_from_pool, triangle_bound, trim_packing_sum, verify_collection, DisjointMode,
    PackedBall, PackingCollection, PackingProblem, Scale, Weighting, EXHAUSTIVE_CAP,
};
use crate::pressure::{critical_exponent_of, Bisection, Strategy};
use crate::systems::{Point, Potential, PotentialKind, SampleSet, Space, System};
use crate::words::level_size;

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    pub first_violation: Option<String>,
}

impl PropertyOutcome {
    fn new(name: &'static str) -> Self {
        PropertyOutcome { name, checked: 0, violations: 0, first_violation: None }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(detail());
            }
        }
    }

    fn absorb(&mut self, other: PropertyOutcome) {
        self.checked += other.checked;
        self.violations += other.violations;
        if self.first_violation.is_none() {
            self.first_violation = other.first_violation;
        }
    }

    pub fn passed(&self) -> bool {
        self.checked > 0 && self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyMatrix {
    pub seed: u64,
    pub budget: usize,
    pub outcomes: Vec<PropertyOutcome>,
}

impl PropertyMatrix {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(PropertyOutcome::passed)
    }

    pub fn violations(&self) -> usize {
        self.outcomes.iter().map(|o| o.violations).sum()
    }

    pub fn get(&self, name: &str) -> Option<&PropertyOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }
}

/// The systems the randomized checks draw from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestSystem {
    Shift2,
    Shift3,
    Doubling,
    TwoGenTorus,
}

impl TestSystem {
    pub const ALL: [TestSystem; 4] = [TestSystem::Shift2, TestSystem::Shift3, TestSystem::Doubling, TestSystem::TwoGenTorus];

    pub fn build(self) -> System {
        match self {
            TestSystem::Shift2 => System::full_shift(2, 2.0, 1),
            TestSystem::Shift3 => System::full_shift(3, 3.0, 1),
            TestSystem::Doubling => System::circle_maps(&[2]),
            TestSystem::TwoGenTorus => System::circle_maps(&[2, 3]),
        }
        .expect("built-in system")
    }

    fn pick<R: Rng>(rng: &mut R) -> System {
        TestSystem::ALL[rng.gen_range(0..4)].build()
    }
}

/// `size` distinct points: cylinder representatives at a random depth on
/// shifts, uniform points on tori.
fn random_sample<R: Rng>(system: &System, rng: &mut R, size: usize) -> Result<SampleSet> {
    match system.alphabet() {
        Some(m) => {
            let mut depth = 1;
            while (m as usize).pow(depth as u32) < size {
                depth += 1;
            }
            let depth = depth + rng.gen_range(0..3);
            cylinder_subset(system, rng, depth, size)
        }
        None => SampleSet::random(system, size, rng.gen(), 0),
    }
}

fn cylinder_subset<R: Rng>(system: &System, rng: &mut R, depth: usize, size: usize) -> Result<SampleSet> {
    let full = SampleSet::cylinder_complete(system, depth)?;
    let mut idx: Vec<usize> = (0..full.len()).collect();
    idx.shuffle(rng);
    idx.truncate(size.min(full.len()));
    idx.sort_unstable();
    full.subset(&idx)
}

/// Locally constant on shifts, periodic piecewise linear on tori.
fn random_potential<R: Rng>(system: &System, rng: &mut R, amplitude: f64) -> Potential {
    match system.space() {
        Space::Symbolic { alphabet } => {
            Potential::first_symbol((0..*alphabet).map(|_| rng.gen_range(-amplitude..=amplitude)).collect())
        }
        Space::Torus { dim } => {
            let resolution = 4usize;
            let values = (0..resolution.pow(*dim as u32)).map(|_| rng.gen_range(-amplitude..=amplitude)).collect();
            Potential::new(PotentialKind::Tabulated { resolution, values })
        }
    }
}

fn random_point<R: Rng>(system: &System, rng: &mut R) -> Result<Point> {
    Ok(random_sample(system, rng, 1)?.points()[0].clone())
}

/// Symmetry, identity and the triangle inequality of `d` and `d_n`, and
/// `d_n <= d_{n+1}`.
pub fn metric_axioms(seed: u64, triples: usize) -> Result<Vec<PropertyOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut base = PropertyOutcome::new("metric-axioms");
    let mut bowen = PropertyOutcome::new("bowen-metric-axioms");
    let mut mono = PropertyOutcome::new("bowen-monotone-in-n");
    for _ in 0..triples {
        let system = TestSystem::pick(&mut rng);
        let s = random_sample(&system, &mut rng, 3)?;
        let [p, q, r] = [&s.points()[0], &s.points()[1], &s.points()[2]];
        let d = |a: &Point, b: &Point| system.metric_value(a, b);
        let (pq, qp, qr, pr, pp) = (d(p, q)?, d(q, p)?, d(q, r)?, d(p, r)?, d(p, p)?);
        let ok = pq == qp && pp == 0.0 && pq > 0.0 && pr <= pq + qr + 1e-15;
        base.record(ok, || format!("{p:?} {q:?} {r:?}: {pq} {qp} {qr} {pr} {pp}"));

        let n = rng.gen_range(1..=5);
        let dn = |a: &Point, b: &Point, n: usize| bowen_distance(&system, a, b, n, None).map(|x| x.value);
        let (pq, qp, qr, pr, pp) = (dn(p, q, n)?, dn(q, p, n)?, dn(q, r, n)?, dn(p, r, n)?, dn(p, p, n)?);
        let ok = pq == qp && pp == 0.0 && pq > 0.0 && pr <= pq + qr + 1e-15;
        bowen.record(ok, || format!("n={n}: {pq} {qp} {qr} {pr} {pp}"));
        let next = dn(p, q, n + 1)?;
        mono.record(pq <= next, || format!("d_{n}={pq} > d_{}={next}", n + 1));
    }
    Ok(vec![base, bowen, mono])
}

/// `e^{-n eps}` strictly decreasing in `n` and in `eps`.
pub fn radius_shrinks() -> PropertyOutcome {
    let mut out = PropertyOutcome::new("radius-shrinks");
    for n in 1..40 {
        for e in 1..30 {
            let eps = e as f64 * 0.05;
            let r = math::neutral_radius(n, eps);
            out.record(math::neutral_radius(n + 1, eps) < r && math::neutral_radius(n, eps + 0.05) < r, || {
                format!("n={n} eps={eps}")
            });
        }
    }
    out
}

/// `|f| <= ||f||` pointwise and `|f_n| <= |G_n| ||f||`.
pub fn potential_bounds(seed: u64, cases: usize) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PropertyOutcome::new("potential-bounds");
    for _ in 0..cases {
        let system = TestSystem::pick(&mut rng);
        let f = random_potential(&system, &mut rng, 2.0).plus_constant(rng.gen_range(-1.0..1.0));
        let x = random_point(&system, &mut rng)?;
        let n = rng.gen_range(1..=6);
        let norm = f.sup_norm();
        let size = level_size(system.k(), n)? as f64;
        let (v, sum) = (f.eval(&x)?, bowen::potential_sum(&system, &f, &x, n)?);
        out.record(v.abs() <= norm && sum.abs() <= size * norm * (1.0 + 1e-12), || {
            format!("f={v} f_n={sum} norm={norm} |G_n|={size}")
        });
    }
    Ok(out)
}

/// For Lipschitz `f` and `y` in the closed ball `B_{n_i}(x, e^{-n_i eps})`,
/// `f_{n_i}(y) - f_{n_i}(x) <= |G_{n_i}| gamma_n` with
/// `gamma_n = L * 2 e^{-n eps}`.
pub fn ball_oscillation_bound(seed: u64, cases: usize) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PropertyOutcome::new("ball-oscillation-bound");
    let systems = [TestSystem::Doubling.build(), TestSystem::TwoGenTorus.build()];
    while out.checked < cases {
        let system = &systems[rng.gen_range(0..2)];
        let f = random_potential(system, &mut rng, 1.0);
        let lip = f.lipschitz_bound().expect("tabulated potentials are Lipschitz");
        let n = rng.gen_range(1..=4);
        let depth = n + rng.gen_range(0..=2);
        let eps = rng.gen_range(0.05..0.8);
        let query = BowenQuery::closed(depth, eps)?;
        let x: f64 = rng.gen();
        // every word of length < depth stretches by at most 3^{depth-1}
        let stretch = 3u64.pow(depth as u32 - 1) as f64;
        let y = math::frac(x + rng.gen_range(-1.0..1.0) * query.radius / stretch);
        let (xp, yp) = (Point::torus(vec![x]), Point::torus(vec![y]));
        if !ball_membership(system, &xp, &yp, &query)? {
            continue;
        }
        let size = level_size(system.k(), depth)? as f64;
        let gamma = lip * 2.0 * math::neutral_radius(n, eps);
        let diff = bowen::potential_sum(system, &f, &yp, depth)? - bowen::potential_sum(system, &f, &xp, depth)?;
        out.record(diff <= size * gamma + 1e-12, || format!("x={x} y={y} n={n} depth={depth}: {diff} > {}", size * gamma));
    }
    Ok(out)
}

/// Packing soundness, exhaustive dominance and equal-radius optimality on
/// randomized pools of at most [`EXHAUSTIVE_CAP`] balls.
pub fn packing_checks(seed: u64, pools: usize) -> Result<Vec<PropertyOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sound = PropertyOutcome::new("packing-soundness");
    let mut dominance = PropertyOutcome::new("exhaustive-dominates-greedy");
    let mut equal = PropertyOutcome::new("equal-radius-greedy-optimal");
    for case in 0..pools {
        let system = TestSystem::pick(&mut rng);
        let mode = if rng.gen_bool(0.5) { DisjointMode::Triangle } else { DisjointMode::SharedSample };
        let centers = rng.gen_range(2..=9);
        let z = random_sample(&system, &mut rng, centers)?;
        let n = rng.gen_range(1..=4);
        let levels = rng.gen_range(1..=(EXHAUSTIVE_CAP / z.len()).clamp(1, 3));
        let eps = rng.gen_range(0.05..1.5);
        let f = random_potential(&system, &mut rng, 0.5);
        let alpha = rng.gen_range(-0.5..1.5);
        let mut pool = Vec::new();
        for p in z.points() {
            for depth in n..n + levels {
                pool.push(PackedBall::new(&system, &f, p.clone(), depth, eps, alpha)?);
            }
        }
        let greedy = greedy_from_pool(&system, &pool, alpha, mode, z.points())?;
        let exact = exhaustive_packing(&system, &pool, alpha, mode, z.points(), EXHAUSTIVE_CAP)?;
        let replay = verify_collection(&system, &greedy, z.points())? && verify_collection(&system, &exact, z.points())?;
        sound.record(replay, || format!("pool case {case}: replay failed"));
        dominance.record(exact.ln_sum >= greedy.ln_sum, || {
            format!("pool case {case}: exhaustive {} < greedy {}", exact.ln_sum, greedy.ln_sum)
        });

        // the same pool through the frozen-problem path
        let scale = Scale::new(n, n + levels - 1, eps)?;
        let problem = PackingProblem::new(&system, &z, scale, &f, mode, Weighting::Pointwise)?;
        let g = problem.greedy(alpha);
        let x = problem.exhaustive(alpha, EXHAUSTIVE_CAP)?;
        let replay = verify_collection(&system, &problem.collection(&g)?, z.points())?
            && verify_collection(&system, &problem.collection(&x)?, z.points())?;
        sound.record(replay, || format!("problem case {case}: replay failed"));
        dominance.record(x.ln_sum >= g.ln_sum, || format!("problem case {case}: {} < {}", x.ln_sum, g.ln_sum));

        // equal radii on a shift: balls are cylinders of one length
        let shift = if rng.gen_bool(0.5) { TestSystem::Shift2 } else { TestSystem::Shift3 }.build();
        let depth = rng.gen_range(1..=4);
        let (extra, size) = (rng.gen_range(0..4), rng.gen_range(2..=EXHAUSTIVE_CAP));
        let zs = cylinder_subset(&shift, &mut rng, depth + extra, size)?;
        let fs = random_potential(&shift, &mut rng, 0.5);
        let cyl: Vec<PackedBall> = zs
            .points()
            .iter()
            .map(|p| PackedBall::new(&shift, &fs, p.clone(), depth, eps, alpha))
            .collect::<Result<_>>()?;
        let g = greedy_from_pool(&shift, &cyl, alpha, DisjointMode::Triangle, zs.points())?;
        let x = exhaustive_packing(&shift, &cyl, alpha, DisjointMode::Triangle, zs.points(), EXHAUSTIVE_CAP)?;
        equal.record(g.ln_sum == x.ln_sum, || format!("cylinder case {case}: greedy {} exhaustive {}", g.ln_sum, x.ln_sum));
    }
    Ok(vec![sound, dominance, equal])
}

/// The 5r lemma on randomized ball families: admitted balls are pairwise
/// disjoint and every sampled point of every ball is within `5 r` of an
/// admitted ball, both replayed with full `d_n` evaluations.
pub fn five_r_checks(seed: u64, families: usize) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PropertyOutcome::new("five-r-lemma");
    for case in 0..families {
        let system = TestSystem::pick(&mut rng);
        let n = rng.gen_range(1..=3);
        let count = rng.gen_range(2..=20);
        let centers = random_sample(&system, &mut rng, count)?;
        let sample = random_sample(&system, &mut rng, 30)?;
        let balls: Vec<(Point, f64)> = centers
            .points()
            .iter()
            .map(|p| (p.clone(), math::neutral_radius(n, rng.gen_range(0.1..2.0))))
            .collect();
        let res = five_r_subfamily(&system, n, &balls, sample.points())?;
        let d = |a: &Point, b: &Point| bowen_distance(&system, a, b, n, None).map(|x| x.value);
        let mut ok = true;
        for (i, &a) in res.admitted.iter().enumerate() {
            for &b in &res.admitted[i + 1..] {
                ok &= d(&balls[a].0, &balls[b].0)? > triangle_bound(&system, balls[a].1, balls[b].1);
            }
        }
        for w in &res.witnesses {
            let y = w.point.map_or(&balls[w.ball].0, |s| &sample.points()[s]);
            if let Some(j) = w.point {
                ok &= d(&balls[w.ball].0, &sample.points()[j])? <= balls[w.ball].1;
            }
            ok &= match w.by {
                Some(j) => res.admitted.contains(&j) && d(&balls[j].0, y)? <= 5.0 * balls[j].1,
                None => false,
            };
        }
        out.record(ok, || format!("family {case} on {} balls", balls.len()));
    }
    Ok(out)
}

/// `M^P(Z_1) <= M^P(Z_2)` for `Z_1` inside `Z_2` (exact strategy, triangle
/// mode, where the conflict graph of `Z_1` is induced from that of `Z_2`).
pub fn z_monotonicity(seed: u64, cases: usize) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PropertyOutcome::new("z-monotonicity");
    for case in 0..cases {
        let system = TestSystem::pick(&mut rng);
        let size = rng.gen_range(2..=9);
        let z2 = random_sample(&system, &mut rng, size)?;
        let mut idx: Vec<usize> = (0..z2.len()).collect();
        idx.shuffle(&mut rng);
        idx.truncate(rng.gen_range(1..z2.len()));
        idx.sort_unstable();
        let z1 = z2.subset(&idx)?;
        let n = rng.gen_range(1..=4);
        let scale = Scale::new(n, n + rng.gen_range(0..=1), rng.gen_range(0.05..1.5))?;
        let f = random_potential(&system, &mut rng, 0.5);
        let alpha = rng.gen_range(-0.5..1.5);
        let m = |z: &SampleSet| -> Result<f64> {
            let p = PackingProblem::new(&system, z, scale, &f, DisjointMode::Triangle, Weighting::Pointwise)?;
            Ok(p.exhaustive(alpha, EXHAUSTIVE_CAP)?.ln_sum)
        };
        let (a, b) = (m(&z1)?, m(&z2)?);
        out.record(a <= b, || format!("case {case}: {a} > {b}"));
    }
    Ok(out)
}

/// `alpha(Z_1 u Z_2)` lies between `max alpha(Z_i)` and that maximum plus
/// `ln 2 / |G_n|` (single-depth pools, exact strategy).
pub fn finite_union(seed: u64, cases: usize) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PropertyOutcome::new("finite-union-sup");
    let bisection = Bisection::default();
    for case in 0..cases {
        let system = TestSystem::pick(&mut rng);
        let size = rng.gen_range(2..=EXHAUSTIVE_CAP);
        let z = random_sample(&system, &mut rng, size)?;
        let cut = rng.gen_range(1..z.len());
        let mut idx: Vec<usize> = (0..z.len()).collect();
        idx.shuffle(&mut rng);
        let (mut a, mut b) = (idx[..cut].to_vec(), idx[cut..].to_vec());
        a.sort_unstable();
        b.sort_unstable();
        let n = rng.gen_range(1..=4);
        let scale = Scale::new(n, n, rng.gen_range(0.05..1.5))?;
        let f = random_potential(&system, &mut rng, 0.5);
        let alpha = |z: &SampleSet| -> Result<f64> {
            let p = PackingProblem::new(&system, z, scale, &f, DisjointMode::Triangle, Weighting::Pointwise)?;
            Ok(critical_exponent_of(&p, Strategy::Exact, bisection)?.alpha)
        };
        let (u, a1, a2) = (alpha(&z)?, alpha(&z.subset(&a)?)?, alpha(&z.subset(&b)?)?);
        let max = a1.max(a2);
        let slack = math::ln(2.0) / level_size(system.k(), n)? as f64;
        let tol = 2.0 * bisection.tol;
        out.record(u >= max - tol && u <= max + slack + tol, || {
            format!("case {case}: union {u}, parts {a1} {a2}, slack {slack}")
        });
    }
    Ok(out)
}

/// `M^P` at `(n + 1, N_max)` never exceeds `M^P` at `(n, N_max)` on shift
/// systems with the exact strategy.
pub fn premeasure_non_increasing(seed: u64, cases: usize) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PropertyOutcome::new("premeasure-non-increasing-in-n");
    for case in 0..cases {
        let system = if rng.gen_bool(0.5) { TestSystem::Shift2 } else { TestSystem::Shift3 }.build();
        let size = rng.gen_range(1..=6);
        let z = random_sample(&system, &mut rng, size)?;
        let n = rng.gen_range(1..=4);
        let eps = rng.gen_range(0.05..1.5);
        let f = random_potential(&system, &mut rng, 0.5);
        let alpha = rng.gen_range(-0.5..1.5);
        let m = |scale: Scale| -> Result<f64> {
            let p = PackingProblem::new(&system, &z, scale, &f, DisjointMode::Triangle, Weighting::Pointwise)?;
            Ok(p.exhaustive(alpha, EXHAUSTIVE_CAP)?.ln_sum)
        };
        let (coarse, fine) = (m(Scale::new(n, n + 2, eps)?)?, m(Scale::new(n + 1, n + 2, eps)?)?);
        out.record(fine <= coarse, || format!("case {case}: n={n} {fine} > {coarse}"));
    }
    Ok(out)
}

/// On the full shift with cylinder-complete `Z`, `alpha(n, eps)` does not
/// increase as `eps` decreases, and equals the closed-form value.
pub fn eps_monotonicity(seed: u64, cases: usize) -> Result<Vec<PropertyOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mono = PropertyOutcome::new("alpha-non-increasing-as-eps-decreases");
    let mut oracle = PropertyOutcome::new("alpha-matches-shift-oracle");
    let bisection = Bisection::default();
    for case in 0..cases {
        let m: u8 = rng.gen_range(2..=3);
        let system = System::full_shift(m, m as f64, 1)?;
        let n = rng.gen_range(2..=6);
        let (e1, e2) = (rng.gen_range(0.02..0.6), rng.gen_range(0.02..0.6));
        let (small, large) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let depth = forced_cylinder_length(n, large, m as f64, Closedness::Closed);
        let z = SampleSet::cylinder_complete(&system, depth)?;
        let mut values = [0.0; 2];
        for (slot, eps) in [small, large].into_iter().enumerate() {
            let p = PackingProblem::new(&system, &z, Scale::new(n, n, eps)?, &Potential::zero(), DisjointMode::Triangle, Weighting::Pointwise)?;
            values[slot] = critical_exponent_of(&p, Strategy::Greedy, bisection)?.alpha;
            let exact = shift_oracle_alpha(&ShiftOracleSpec::new(m, m as f64, eps, n))?;
            oracle.record((values[slot] - exact).abs() <= 2.0 * bisection.tol, || {
                format!("case {case}: m={m} n={n} eps={eps}: {} vs {exact}", values[slot])
            });
        }
        mono.record(values[0] <= values[1] + 2.0 * bisection.tol, || {
            format!("case {case}: m={m} n={n}: alpha({small})={} > alpha({large})={}", values[0], values[1])
        });
    }
    Ok(vec![mono, oracle])
}

/// Intercepts of `alpha(n, eps)` against `eps` on the 2-shift with metric
/// bases 2 and 4, matched by `eps_4 = eps_2 ln 4 / ln 2`, agree within `tol`.
pub fn metric_base_independence(n: usize, eps_grid: &[f64], tol: f64) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("metric-base-independence");
    let mut intercepts = [0.0; 2];
    for (slot, base) in [2.0f64, 4.0].into_iter().enumerate() {
        let system = System::full_shift(2, base, 1)?;
        let factor = math::ln(base) / math::ln(2.0);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &e in eps_grid {
            let eps = e * factor;
            let z = SampleSet::cylinder_complete(&system, forced_cylinder_length(n, eps, base, Closedness::Closed))?;
            let p = PackingProblem::new(&system, &z, Scale::new(n, n, eps)?, &Potential::zero(), DisjointMode::Triangle, Weighting::Pointwise)?;
            xs.push(eps);
            ys.push(critical_exponent_of(&p, Strategy::Greedy, Bisection::default())?.alpha);
        }
        intercepts[slot] = math::least_squares(&xs, &ys).map_or(f64::NAN, |fit| fit.intercept);
    }
    out.record((intercepts[0] - intercepts[1]).abs() <= tol, || {
        format!("intercepts {} (base 2) and {} (base 4)", intercepts[0], intercepts[1])
    });
    Ok(out)
}

/// `alpha(f + c) - alpha(f) = c` within twice the bisection tolerance.
pub fn constant_shift(seed: u64, cases: usize) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PropertyOutcome::new("constant-shift-exactness");
    let bisection = Bisection::default();
    for case in 0..cases {
        let system = TestSystem::pick(&mut rng);
        let size = rng.gen_range(2..=24);
        let z = random_sample(&system, &mut rng, size)?;
        let n = rng.gen_range(1..=4);
        let scale = Scale::new(n, n + rng.gen_range(0..=1), rng.gen_range(0.05..1.0))?;
        let f = random_potential(&system, &mut rng, 0.5);
        let c = rng.gen_range(-1.0..1.0);
        let strategy = if rng.gen_bool(0.5) { Strategy::Greedy } else { Strategy::Exact };
        let strategy = if z.len() * scale.levels() > EXHAUSTIVE_CAP { Strategy::Greedy } else { strategy };
        let alpha = |f: &Potential| -> Result<f64> {
            let p = PackingProblem::new(&system, &z, scale, f, DisjointMode::Triangle, Weighting::Pointwise)?;
            Ok(critical_exponent_of(&p, strategy, bisection)?.alpha)
        };
        let diff = alpha(&f.plus_constant(c))? - alpha(&f)?;
        out.record((diff - c).abs() <= 2.0 * bisection.tol, || format!("case {case}: c={c} difference {diff}"));
    }
    Ok(out)
}

/// `mu(B_n(x, e^{-n eps}))` does not increase with `n` or with `eps`.
pub fn ball_mass_monotone(seed: u64, cases: usize) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PropertyOutcome::new("ball-mass-monotone");
    for case in 0..cases {
        let system = TestSystem::pick(&mut rng);
        let size = rng.gen_range(4..=40);
        let z = random_sample(&system, &mut rng, size)?;
        let weights: Vec<(Point, f64)> = z.points().iter().map(|p| (p.clone(), rng.gen_range(0.1..1.0))).collect();
        let mu = SampleMeasure::normalized(weights)?;
        let x = &z.points()[rng.gen_range(0..z.len())];
        let n = rng.gen_range(1..=4);
        let eps = rng.gen_range(0.05..1.0);
        let closedness = if rng.gen_bool(0.5) { Closedness::Open } else { Closedness::Closed };
        let base = ball_mass(&system, &mu, x, n, eps, closedness)?;
        let deeper = ball_mass(&system, &mu, x, n + 1, eps, closedness)?;
        let wider = ball_mass(&system, &mu, x, n, eps + 0.1, closedness)?;
        out.record(deeper <= base && wider <= base && base > 0.0, || {
            format!("case {case}: {base} {deeper} {wider}")
        });
    }
    Ok(out)
}

/// Identical inputs give bit-identical exponents and selections.
pub fn determinism(seed: u64, cases: usize) -> Result<PropertyOutcome> {
    let mut out = PropertyOutcome::new("determinism");
    for case in 0..cases {
        let run = || -> Result<(u64, Vec<usize>)> {
            let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, case as u64));
            let system = TestSystem::pick(&mut rng);
            let z = random_sample(&system, &mut rng, 30)?;
            let f = random_potential(&system, &mut rng, 0.5);
            let p = PackingProblem::new(&system, &z, Scale::new(3, 4, 0.3)?, &f, DisjointMode::SharedSample, Weighting::Pointwise)?;
            let r = critical_exponent_of(&p, Strategy::Greedy, Bisection::default())?;
            Ok((r.alpha.to_bits(), p.greedy(r.alpha).items))
        };
        let (a, b) = (run()?, run()?);
        out.record(a == b, || format!("case {case}"));
    }
    Ok(out)
}

/// Trimming a collection whose terms are each below `b - a` and whose sum
/// exceeds `a` lands the sum in `(a, b)` using a subfamily.
pub fn trim_checks(seed: u64, cases: usize) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PropertyOutcome::new("trim-lemma");
    let system = TestSystem::Shift2.build();
    for case in 0..cases {
        let count = rng.gen_range(1..=30);
        let s = rng.gen_range(-0.5..1.0);
        let balls: Vec<PackedBall> = (0..count)
            .map(|i| {
                let sum = rng.gen_range(-3.0..1.0);
                let mut b = PackedBall::with_sum(&system, Point::symbolic(vec![(i % 2) as u8; i + 1]), 2, 0.3, sum, s)?;
                b.center_id = Some(i);
                Ok(b)
            })
            .collect::<Result<_>>()?;
        let terms: Vec<f64> = balls.iter().map(|b| math::exp(b.log_weight_at(s))).collect();
        let total: f64 = terms.iter().sum();
        let largest = terms.iter().fold(0.0f64, |m, t| m.max(*t));
        let width = largest * rng.gen_range(1.01..3.0);
        let a = total * rng.gen_range(0.0..0.99);
        let b = a + width;
        let keys: Vec<f64> = balls.iter().map(|b| b.log_weight).collect();
        let coll = PackingCollection {
            ln_sum: math::log_sum_exp(&keys),
            ..PackingCollection::empty(DisjointMode::Triangle, s)
        };
        let coll = PackingCollection { balls: balls.clone(), ..coll };
        let trimmed = trim_packing_sum(&coll, s, a, b);
        let ok = match &trimmed {
            Ok(t) => {
                let sum = t.sum();
                let subset = t.balls.iter().all(|x| balls.iter().any(|y| y.center_id == x.center_id));
                sum > a && sum < b && subset
            }
            Err(_) => false,
        };
        out.record(ok, || format!("case {case}: a={a} b={b} total={total} result={:?}", trimmed.map(|t| t.sum())));
    }
    Ok(out)
}

/// Every check at `budget` randomized cases each, with independent seeds.
pub fn property_suite(seed: u64, budget: usize) -> Result<PropertyMatrix> {
    let s = |tag: u64| split_seed(seed, tag);
    let mut outcomes = Vec::new();
    outcomes.extend(metric_axioms(s(1), 5 * budget)?);
    outcomes.push(radius_shrinks());
    outcomes.push(potential_bounds(s(2), budget)?);
    outcomes.push(ball_oscillation_bound(s(3), budget)?);
    outcomes.extend(packing_checks(s(4), budget)?);
    outcomes.push(five_r_checks(s(5), budget)?);
    outcomes.push(z_monotonicity(s(6), budget)?);
    outcomes.push(finite_union(s(7), budget)?);
    outcomes.push(premeasure_non_increasing(s(8), budget)?);
    outcomes.extend(eps_monotonicity(s(9), budget)?);
    outcomes.push(metric_base_independence(10, &[0.05, 0.1, 0.15, 0.2, 0.25, 0.3], 0.02)?);
    outcomes.push(constant_shift(s(10), budget)?);
    outcomes.push(ball_mass_monotone(s(11), budget)?);
    outcomes.push(determinism(s(12), budget.clamp(1, 10))?);
    outcomes.push(trim_checks(s(13), budget)?);
    Ok(PropertyMatrix { seed, budget, outcomes })
}

/// Merges outcomes of the same name, keeping first-seen order.
pub fn merge(outcomes: Vec<PropertyOutcome>) -> Vec<PropertyOutcome> {
    let mut merged: Vec<PropertyOutcome> = Vec::new();
    for o in outcomes {
        match merged.iter_mut().find(|m| m.name == o.name) {
            Some(m) => m.absorb(o),
            None => merged.push(o),
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let m = property_suite(7, 12).unwrap();
        for o in &m.outcomes {
            assert!(o.passed(), "{}: {:?}", o.name, o.first_violation);
        }
        assert_eq!(m, property_suite(7, 12).unwrap());
    }

    #[test]
    fn outcome_bookkeeping() {
        let mut o = PropertyOutcome::new("x");
        assert!(!o.passed());
        o.record(true, String::new);
        o.record(false, || "bad".into());
        o.record(false, || "worse".into());
        assert_eq!((o.checked, o.violations), (3, 2));
        assert_eq!(o.first_violation.as_deref(), Some("bad"));
        let merged = merge(vec![o.clone(), PropertyOutcome::new("y"), o]);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].checked, 6);
    }

    #[test]
    fn metric_base_intercepts_agree() {
        let o = metric_base_independence(8, &[0.1, 0.2, 0.3], 1e-9).unwrap();
        assert!(o.passed(), "{:?}", o.first_violation);
    }
}
