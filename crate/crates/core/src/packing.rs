//! Weighted packings by closed neutralized Bowen balls.
//!
//! A ball of depth `n_i` around `x` has radius `e^{-n_i eps}` and weight
//! `exp(-alpha |G_{n_i}| + f_{n_i}(x))`. Packings are maximum-weight independent
//! sets in a conflict graph whose edges join balls that may intersect. The
//! greedy selection gives a certified lower bound on the packing pre-measure;
//! a branch and bound solves small pools exactly.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::bowen::{self, BowenIndex};
use crate::error::{Error, Result};
use crate::math;
use crate::systems::{Point, Potential, SampleSet, System};
use crate::words::{level_size, DEFAULT_ORBIT_CAP};

/// Default pool cap for the exhaustive search.
pub const EXHAUSTIVE_CAP: usize = 18;
const EXHAUSTIVE_HARD_CAP: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DisjointMode {
    /// Disjoint when `d_{min(n_a, n_b)}` between the centers exceeds the radius
    /// bound (`r_a + r_b`, or `max(r_a, r_b)` on ultrametric spaces). Sound.
    Triangle,
    /// Disjoint when no sample point lies in both closed balls. Optimistic.
    SharedSample,
}

/// Whether ball weights use `f_{n_i}(x)` or its sample sup over the ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weighting {
    Pointwise,
    SampleSup,
}

/// Scale parameters: base depth `n`, deepest admitted ball `n_max`, rate `eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scale {
    pub n: usize,
    pub n_max: usize,
    pub eps: f64,
}

impl Scale {
    pub fn new(n: usize, n_max: usize, eps: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if n_max < n {
            return Err(Error::InvalidArgument("N_max must be at least n".into()));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidArgument("eps must be positive".into()));
        }
        Ok(Scale { n, n_max, eps })
    }

    pub fn levels(&self) -> usize {
        self.n_max - self.n + 1
    }
}

/// Radius bound below which two centers are not certified apart.
pub fn triangle_bound(system: &System, ra: f64, rb: f64) -> f64 {
    if system.is_ultrametric() {
        ra.max(rb)
    } else {
        ra + rb
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PackedBall {
    pub center: Point,
    /// Index of the center in the sample it came from, when there is one.
    pub center_id: Option<usize>,
    pub depth: usize,
    pub eps: f64,
    pub radius: f64,
    pub level_size: u64,
    pub potential_sum: f64,
    pub alpha: f64,
    pub log_weight: f64,
}

impl PackedBall {
    /// Ball around `center` at `depth`, weighted with `f_depth(center)`.
    pub fn new(system: &System, potential: &Potential, center: Point, depth: usize, eps: f64, alpha: f64) -> Result<Self> {
        let sum = bowen::potential_sum(system, potential, &center, depth)?;
        PackedBall::with_sum(system, center, depth, eps, sum, alpha)
    }

    pub fn with_sum(system: &System, center: Point, depth: usize, eps: f64, potential_sum: f64, alpha: f64) -> Result<Self> {
        let size = level_size(system.k(), depth)?;
        Ok(PackedBall {
            center,
            center_id: None,
            depth,
            eps,
            radius: math::neutral_radius(depth, eps),
            level_size: size,
            potential_sum,
            alpha,
            log_weight: -alpha * size as f64 + potential_sum,
        })
    }

    pub fn log_weight_at(&self, alpha: f64) -> f64 {
        -alpha * self.level_size as f64 + self.potential_sum
    }

    pub fn at_alpha(&self, alpha: f64) -> PackedBall {
        PackedBall { alpha, log_weight: self.log_weight_at(alpha), ..self.clone() }
    }

    /// Stored radius and weight agree with a recomputation from scratch.
    pub fn is_consistent(&self, system: &System, potential: Option<&Potential>) -> Result<bool> {
        let mut ok = self.radius == math::neutral_radius(self.depth, self.eps)
            && self.level_size == level_size(system.k(), self.depth)?
            && self.log_weight == self.log_weight_at(self.alpha);
        if let Some(f) = potential {
            ok &= self.potential_sum == bowen::potential_sum(system, f, &self.center, self.depth)?;
        }
        Ok(ok)
    }
}

/// `distance - bound` for a pair of balls checked in triangle mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairMargin {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    pub bound: f64,
}

impl PairMargin {
    pub fn margin(&self) -> f64 {
        self.distance - self.bound
    }
}

/// A packing together with the evidence for its disjointness.
///
/// In triangle mode `margins` lists every admitted pair whose centers passed
/// the neighbour prefilter; pairs absent from the list had centers farther
/// apart than `prefilter_radius` at the base depth.
#[derive(Clone, Debug)]
pub struct PackingCollection {
    pub balls: Vec<PackedBall>,
    pub mode: DisjointMode,
    pub margins: Vec<PairMargin>,
    pub prefilter_radius: Option<f64>,
    pub alpha: f64,
    /// `ln` of the weight sum; `-inf` for the empty collection.
    pub ln_sum: f64,
}

impl PackingCollection {
    pub fn empty(mode: DisjointMode, alpha: f64) -> Self {
        PackingCollection {
            balls: Vec::new(),
            mode,
            margins: Vec::new(),
            prefilter_radius: None,
            alpha,
            ln_sum: f64::NEG_INFINITY,
        }
    }

    fn from_balls(balls: Vec<PackedBall>, mode: DisjointMode, alpha: f64) -> Self {
        let keys: Vec<f64> = balls.iter().map(|b| b.log_weight).collect();
        PackingCollection {
            balls,
            mode,
            margins: Vec::new(),
            prefilter_radius: None,
            alpha,
            ln_sum: math::log_sum_exp(&keys),
        }
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn sum(&self) -> f64 {
        math::exp(self.ln_sum)
    }
}

/// Whether two closed balls are certified disjoint under `mode`.
///
/// In shared-sample mode the two centers count as sample points too.
pub fn disjoint_test(system: &System, a: &PackedBall, b: &PackedBall, mode: DisjointMode, sample: &[Point]) -> Result<bool> {
    if a.center == b.center {
        return Ok(false);
    }
    match mode {
        DisjointMode::Triangle => {
            let m = a.depth.min(b.depth);
            let bound = triangle_bound(system, a.radius, b.radius);
            let d = bowen::bowen_distance(system, &a.center, &b.center, m, Some(bound))?;
            Ok(d.truncated || d.value > bound)
        }
        DisjointMode::SharedSample => {
            let inside = |ball: &PackedBall, y: &Point| -> Result<bool> {
                let d = bowen::bowen_distance(system, &ball.center, y, ball.depth, Some(ball.radius))?;
                Ok(!d.truncated && d.value <= ball.radius)
            };
            for y in sample.iter().chain([&a.center, &b.center]) {
                if inside(a, y)? && inside(b, y)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Undirected conflict graph; an edge means "not certified disjoint".
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConflictGraph {
    adj: Vec<Vec<u32>>,
}

impl ConflictGraph {
    pub fn from_edges(len: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); len];
        for &(i, j) in edges {
            if i != j {
                adj[i].push(j as u32);
                adj[j].push(i as u32);
            }
        }
        let mut g = ConflictGraph { adj };
        g.normalize();
        g
    }

    /// Pairwise [`disjoint_test`] over a pool.
    pub fn from_pool(system: &System, pool: &[PackedBall], mode: DisjointMode, sample: &[Point]) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                if !disjoint_test(system, &pool[i], &pool[j], mode, sample)? {
                    edges.push((i, j));
                }
            }
        }
        Ok(ConflictGraph::from_edges(pool.len(), &edges))
    }

    fn normalize(&mut self) {
        for row in &mut self.adj {
            row.sort_unstable();
            row.dedup();
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adj[i]
    }

    pub fn conflicts(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&(j as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Greedy visiting order: weight descending, then center rank, then depth.
pub fn greedy_order(keys: &[f64], ranks: &[u32], depths: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| {
        keys[b]
            .total_cmp(&keys[a])
            .then(ranks[a].cmp(&ranks[b]))
            .then(depths[a].cmp(&depths[b]))
            .then(a.cmp(&b))
    });
    order
}

/// Admits each item in `order` that conflicts with nothing admitted so far.
pub fn greedy_select(graph: &ConflictGraph, order: &[usize]) -> Vec<usize> {
    let mut blocked = vec![false; graph.len()];
    let mut admitted = Vec::new();
    for &i in order {
        if blocked[i] {
            continue;
        }
        admitted.push(i);
        blocked[i] = true;
        for &j in graph.neighbors(i) {
            blocked[j as usize] = true;
        }
    }
    admitted
}

/// Exact maximum-weight independent set by branch and bound, starting from
/// `incumbent` and replacing it only by strictly heavier sets.
pub fn exhaustive_select(graph: &ConflictGraph, keys: &[f64], cap: usize, incumbent: &[usize]) -> Result<Vec<usize>> {
    let n = graph.len();
    if n > cap.min(EXHAUSTIVE_HARD_CAP) {
        return Err(Error::PoolTooLarge { size: n, cap: cap.min(EXHAUSTIVE_HARD_CAP) });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let top = keys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b)));
    let pos: Vec<usize> = {
        let mut p = vec![0; n];
        for (i, &o) in order.iter().enumerate() {
            p[o] = i;
        }
        p
    };
    let w: Vec<f64> = order.iter().map(|&i| math::exp(keys[i] - top)).collect();
    let mut masks = vec![0u64; n];
    for (i, &o) in order.iter().enumerate() {
        for &j in graph.neighbors(o) {
            masks[i] |= 1u64 << pos[j as usize];
        }
    }
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + w[i];
    }
    let canonical = |set: u64| -> f64 {
        let ks: Vec<f64> = (0..n).filter(|i| set >> i & 1 == 1).map(|i| keys[order[i]]).collect();
        math::log_sum_exp(&ks)
    };
    let mut best_set = incumbent.iter().fold(0u64, |m, &i| m | 1u64 << pos[i]);
    let mut best_ln = canonical(best_set);
    let mut best_lin: f64 = (0..n).filter(|i| best_set >> i & 1 == 1).map(|i| w[i]).sum();

    struct Frame {
        at: usize,
        chosen: u64,
        blocked: u64,
        sum: f64,
    }
    let mut stack = vec![Frame { at: 0, chosen: 0, blocked: 0, sum: 0.0 }];
    while let Some(f) = stack.pop() {
        if f.sum > best_lin || (f.sum == best_lin && f.chosen != best_set) {
            let ln = canonical(f.chosen);
            if ln > best_ln {
                best_ln = ln;
                best_set = f.chosen;
                best_lin = f.sum;
            }
        }
        if f.at == n {
            continue;
        }
        let mut bound = f.sum;
        for i in f.at..n {
            if f.blocked >> i & 1 == 0 {
                bound += w[i];
            }
        }
        if bound < best_lin {
            continue;
        }
        // exclude first on the stack so the include branch is explored first
        stack.push(Frame { at: f.at + 1, ..f });
        if f.blocked >> f.at & 1 == 0 {
            stack.push(Frame {
                at: f.at + 1,
                chosen: f.chosen | 1u64 << f.at,
                blocked: f.blocked | masks[f.at] | 1u64 << f.at,
                sum: f.sum + w[f.at],
            });
        }
    }
    let mut out: Vec<usize> = (0..n).filter(|i| best_set >> i & 1 == 1).map(|i| order[i]).collect();
    out.sort_unstable();
    Ok(out)
}

fn pool_ranks(pool: &[PackedBall]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..pool.len()).collect();
    idx.sort_by(|&a, &b| pool[a].center.lex_cmp(&pool[b].center).then(a.cmp(&b)));
    let mut ranks = vec![0u32; pool.len()];
    let mut rank = 0u32;
    for (i, &p) in idx.iter().enumerate() {
        if i > 0 && pool[idx[i - 1]].center.lex_cmp(&pool[p].center) != Ordering::Equal {
            rank += 1;
        }
        ranks[p] = rank;
    }
    ranks
}

fn pool_collection(pool: &[PackedBall], picked: &[usize], mode: DisjointMode, alpha: f64) -> PackingCollection {
    let balls = picked.iter().map(|&i| pool[i].at_alpha(alpha)).collect();
    PackingCollection::from_balls(balls, mode, alpha)
}

/// Greedy packing of an explicit pool at exponent `alpha`.
pub fn greedy_from_pool(system: &System, pool: &[PackedBall], alpha: f64, mode: DisjointMode, sample: &[Point]) -> Result<PackingCollection> {
    let graph = ConflictGraph::from_pool(system, pool, mode, sample)?;
    let keys: Vec<f64> = pool.iter().map(|b| b.log_weight_at(alpha)).collect();
    let depths: Vec<usize> = pool.iter().map(|b| b.depth).collect();
    let picked = greedy_select(&graph, &greedy_order(&keys, &pool_ranks(pool), &depths));
    Ok(pool_collection(pool, &picked, mode, alpha))
}

/// Exact maximum-weight disjoint subfamily of a pool of at most `cap` balls.
pub fn exhaustive_packing(
    system: &System,
    pool: &[PackedBall],
    alpha: f64,
    mode: DisjointMode,
    sample: &[Point],
    cap: usize,
) -> Result<PackingCollection> {
    if pool.len() > cap {
        return Err(Error::PoolTooLarge { size: pool.len(), cap });
    }
    let graph = ConflictGraph::from_pool(system, pool, mode, sample)?;
    let keys: Vec<f64> = pool.iter().map(|b| b.log_weight_at(alpha)).collect();
    let depths: Vec<usize> = pool.iter().map(|b| b.depth).collect();
    let greedy = greedy_select(&graph, &greedy_order(&keys, &pool_ranks(pool), &depths));
    let picked = exhaustive_select(&graph, &keys, cap, &greedy)?;
    Ok(pool_collection(pool, &picked, mode, alpha))
}

/// Replays disjointness of every pair from scratch with streamed distances and
/// checks each ball's stored radius and weight.
pub fn verify_collection(system: &System, collection: &PackingCollection, sample: &[Point]) -> Result<bool> {
    for b in &collection.balls {
        if !b.is_consistent(system, None)? {
            return Ok(false);
        }
    }
    let balls = &collection.balls;
    if collection.mode == DisjointMode::SharedSample {
        // pairwise sample-disjointness is the same as every sample point and
        // every center lying in at most one ball
        for y in sample.iter().chain(balls.iter().map(|b| &b.center)) {
            let mut holders = 0;
            for b in balls {
                let d = bowen::bowen_distance(system, &b.center, y, b.depth, Some(b.radius))?;
                if !d.truncated && d.value <= b.radius {
                    holders += 1;
                    if holders > 1 {
                        return Ok(false);
                    }
                }
            }
        }
        return Ok(true);
    }
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            if !disjoint_test(system, &balls[i], &balls[j], collection.mode, sample)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Discards balls, largest term `e^{-s |G_{n_i}| + f_{n_i}(x_i)}` first, until
/// the sum lies in `(a, b)`.
pub fn trim_packing_sum(collection: &PackingCollection, s: f64, a: f64, b: f64) -> Result<PackingCollection> {
    if !(a < b) {
        return Err(Error::InvalidArgument("trim interval needs a < b".into()));
    }
    let terms: Vec<f64> = collection.balls.iter().map(|ball| math::exp(ball.log_weight_at(s))).collect();
    if let Some(i) = terms.iter().position(|t| !(*t < b - a)) {
        return Err(Error::TrimPrecondition(alloc::format!("term {i} is {} >= b - a = {}", terms[i], b - a)));
    }
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&x, &y| terms[y].total_cmp(&terms[x]).then(x.cmp(&y)));
    let mut keep = vec![true; terms.len()];
    let total = |keep: &[bool]| -> f64 {
        let ks: Vec<f64> = (0..terms.len()).filter(|i| keep[*i]).map(|i| collection.balls[i].log_weight_at(s)).collect();
        math::exp(math::log_sum_exp(&ks))
    };
    let mut sum = total(&keep);
    if !(sum > a) {
        return Err(Error::TrimPrecondition(alloc::format!("sum {sum} does not exceed a = {a}")));
    }
    for &i in &order {
        if sum < b {
            break;
        }
        keep[i] = false;
        sum = total(&keep);
    }
    if !(sum > a && sum < b) {
        return Err(Error::TrimPrecondition(alloc::format!("trimmed sum {sum} left ({a}, {b})")));
    }
    let balls = collection
        .balls
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(ball, _)| ball.at_alpha(s))
        .collect();
    let mut out = PackingCollection::from_balls(balls, collection.mode, s);
    out.prefilter_radius = collection.prefilter_radius;
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    center: usize,
    depth: usize,
    level: f64,
    sum: f64,
}

/// A selection of candidates from a [`PackingProblem`] at one exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub alpha: f64,
    /// Candidate indices, sorted.
    pub items: Vec<usize>,
    pub ln_sum: f64,
}

/// The frozen candidate pool `{(x, n_i) : x in Z, n <= n_i <= N_max}` of one
/// scale with its conflict graph, reusable across exponents.
#[derive(Clone, Debug)]
pub struct PackingProblem {
    system: System,
    centers: Vec<Point>,
    scale: Scale,
    mode: DisjointMode,
    weighting: Weighting,
    cands: Vec<Candidate>,
    ranks: Vec<u32>,
    depths: Vec<usize>,
    graph: ConflictGraph,
    pairs: BTreeMap<(u32, u32), Vec<f64>>,
    prefilter_radius: f64,
}

impl PackingProblem {
    pub fn new(
        system: &System,
        z: &SampleSet,
        scale: Scale,
        potential: &Potential,
        mode: DisjointMode,
        weighting: Weighting,
    ) -> Result<Self> {
        PackingProblem::with_cap(system, z, scale, potential, mode, weighting, DEFAULT_ORBIT_CAP)
    }

    pub fn with_cap(
        system: &System,
        z: &SampleSet,
        scale: Scale,
        potential: &Potential,
        mode: DisjointMode,
        weighting: Weighting,
        orbit_cap: u64,
    ) -> Result<Self> {
        let scale = Scale::new(scale.n, scale.n_max, scale.eps)?;
        potential.check(system)?;
        let centers = z.points().to_vec();
        let levels = scale.levels();
        let (n, n_max) = (scale.n, scale.n_max);
        let radii: Vec<f64> = (n..=n_max).map(|m| math::neutral_radius(m, scale.eps)).collect();
        let tables = bowen::orbit_tables(system, &centers, n_max, orbit_cap)?;
        let sums = tables
            .iter()
            .map(|t| bowen::table_potential_sums(potential, t, n))
            .collect::<Result<Vec<_>>>()?;

        let reach = triangle_bound(system, radii[0], radii[0]);
        let index = BowenIndex::new(system, &centers, n, reach)?;
        let mut pairs = BTreeMap::new();
        for (a, b) in index.close_pairs() {
            let pm = bowen::prefix_maxima(system, &tables[a], &tables[b], n, n_max, reach)?;
            if pm[0] <= reach {
                pairs.insert((a as u32, b as u32), pm);
            }
        }
        drop(tables);

        // members[c][j]: centers inside the closed ball of depth n + j around c
        let mut members: Vec<Vec<Vec<u32>>> = (0..centers.len())
            .map(|c| vec![vec![c as u32]; levels])
            .collect();
        for (&(a, b), pm) in &pairs {
            for j in 0..levels {
                if pm[j] <= radii[j] {
                    members[a as usize][j].push(b);
                    members[b as usize][j].push(a);
                }
            }
        }
        for per_center in &mut members {
            for m in per_center {
                m.sort_unstable();
            }
        }

        let mut cands = Vec::with_capacity(centers.len() * levels);
        for c in 0..centers.len() {
            for j in 0..levels {
                let sum = match weighting {
                    Weighting::Pointwise => sums[c][j],
                    Weighting::SampleSup => members[c][j]
                        .iter()
                        .map(|&y| sums[y as usize][j])
                        .fold(f64::NEG_INFINITY, f64::max),
                };
                cands.push(Candidate {
                    center: c,
                    depth: n + j,
                    level: level_size(system.k(), n + j)? as f64,
                    sum,
                });
            }
        }

        let id = |c: usize, j: usize| c * levels + j;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for c in 0..centers.len() {
            for ja in 0..levels {
                for jb in ja + 1..levels {
                    edges.push((id(c, ja), id(c, jb)));
                }
            }
        }
        match mode {
            DisjointMode::Triangle => {
                for (&(a, b), pm) in &pairs {
                    for ja in 0..levels {
                        for jb in 0..levels {
                            let d = pm[ja.min(jb)];
                            if !(d > triangle_bound(system, radii[ja], radii[jb])) {
                                edges.push((id(a as usize, ja), id(b as usize, jb)));
                            }
                        }
                    }
                }
            }
            DisjointMode::SharedSample => {
                let mut holders: Vec<Vec<usize>> = vec![Vec::new(); centers.len()];
                for (c, per_center) in members.iter().enumerate() {
                    for (j, m) in per_center.iter().enumerate() {
                        for &y in m {
                            holders[y as usize].push(id(c, j));
                        }
                    }
                }
                for h in &holders {
                    for x in 0..h.len() {
                        for y in x + 1..h.len() {
                            edges.push((h[x], h[y]));
                        }
                    }
                }
            }
        }
        let graph = ConflictGraph::from_edges(cands.len(), &edges);
        let center_ranks = z.lex_ranks();
        let ranks = cands.iter().map(|c| center_ranks[c.center]).collect();
        let depths = cands.iter().map(|c| c.depth).collect();
        Ok(PackingProblem {
            system: system.clone(),
            centers,
            scale,
            mode,
            weighting,
            cands,
            ranks,
            depths,
            graph,
            pairs,
            prefilter_radius: reach,
        })
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn mode(&self) -> DisjointMode {
        self.mode
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn pool_size(&self) -> usize {
        self.cands.len()
    }

    pub fn graph(&self) -> &ConflictGraph {
        &self.graph
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    /// `(center index, depth, |G_depth|, potential sum)` of a candidate.
    pub fn candidate(&self, i: usize) -> (usize, usize, f64, f64) {
        let c = &self.cands[i];
        (c.center, c.depth, c.level, c.sum)
    }

    pub fn keys(&self, alpha: f64) -> Vec<f64> {
        self.cands.iter().map(|c| -alpha * c.level + c.sum).collect()
    }

    pub fn ln_sum_of(&self, items: &[usize], alpha: f64) -> f64 {
        let ks: Vec<f64> = items.iter().map(|&i| -alpha * self.cands[i].level + self.cands[i].sum).collect();
        math::log_sum_exp(&ks)
    }

    pub fn greedy(&self, alpha: f64) -> Selection {
        let keys = self.keys(alpha);
        let mut items = greedy_select(&self.graph, &greedy_order(&keys, &self.ranks, &self.depths));
        items.sort_unstable();
        let ln_sum = self.ln_sum_of(&items, alpha);
        Selection { alpha, items, ln_sum }
    }

    pub fn exhaustive(&self, alpha: f64, cap: usize) -> Result<Selection> {
        if self.cands.len() > cap {
            return Err(Error::PoolTooLarge { size: self.cands.len(), cap });
        }
        let keys = self.keys(alpha);
        let greedy = self.greedy(alpha);
        let items = exhaustive_select(&self.graph, &keys, cap, &greedy.items)?;
        let ln_sum = self.ln_sum_of(&items, alpha);
        Ok(Selection { alpha, items, ln_sum })
    }

    /// Materializes a selection with its certificate.
    pub fn collection(&self, selection: &Selection) -> Result<PackingCollection> {
        let alpha = selection.alpha;
        let mut balls = Vec::with_capacity(selection.items.len());
        for &i in &selection.items {
            let c = &self.cands[i];
            let mut ball = PackedBall::with_sum(&self.system, self.centers[c.center].clone(), c.depth, self.scale.eps, c.sum, alpha)?;
            ball.center_id = Some(c.center);
            balls.push(ball);
        }
        let mut margins = Vec::new();
        if self.mode == DisjointMode::Triangle {
            for x in 0..balls.len() {
                for y in x + 1..balls.len() {
                    let (ca, cb) = (self.cands[selection.items[x]].center, self.cands[selection.items[y]].center);
                    let key = (ca.min(cb) as u32, ca.max(cb) as u32);
                    if let Some(pm) = self.pairs.get(&key) {
                        let depth = balls[x].depth.min(balls[y].depth);
                        margins.push(PairMargin {
                            a: x,
                            b: y,
                            distance: pm[depth - self.scale.n],
                            bound: triangle_bound(&self.system, balls[x].radius, balls[y].radius),
                        });
                    }
                }
            }
        }
        Ok(PackingCollection {
            balls,
            mode: self.mode,
            margins,
            prefilter_radius: Some(self.prefilter_radius),
            alpha,
            ln_sum: selection.ln_sum,
        })
    }

    /// One-line description for diagnostics.
    pub fn describe(&self) -> String {
        alloc::format!(
            "{} centers, {} candidates, {} conflicts, n={} N_max={} eps={}",
            self.centers.len(),
            self.cands.len(),
            self.graph.edge_count(),
            self.scale.n,
            self.scale.n_max,
            self.scale.eps
        )
    }
}

/// Greedy packing of the candidate pool of `z` at one exponent.
pub fn greedy_packing(
    system: &System,
    z: &SampleSet,
    scale: Scale,
    alpha: f64,
    potential: &Potential,
    mode: DisjointMode,
) -> Result<PackingCollection> {
    let problem = PackingProblem::new(system, z, scale, potential, mode, Weighting::Pointwise)?;
    problem.collection(&problem.greedy(alpha))
}
