//! Bowen metrics `d_n`, neutralized balls, orbit sums of potentials and a
//! neighbour prefilter for bulk ball queries.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::systems::{Point, Potential, Space, System};
use crate::words::{self, level_size, OrbitTable, DEFAULT_ORBIT_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closedness {
    Open,
    Closed,
}

impl Closedness {
    /// Whether a point at distance `d` lies in the ball of radius `r`.
    #[inline]
    pub fn admits(self, d: f64, r: f64) -> bool {
        match self {
            Closedness::Open => d < r,
            Closedness::Closed => d <= r,
        }
    }
}

/// A neutralized ball query: depth `n`, rate `eps`, radius `e^{-n eps}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BowenQuery {
    pub depth: usize,
    pub eps: f64,
    pub radius: f64,
    pub closedness: Closedness,
}

impl BowenQuery {
    pub fn new(depth: usize, eps: f64, closedness: Closedness) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidArgument("Bowen depth must be at least 1".into()));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidArgument("eps must be positive".into()));
        }
        Ok(BowenQuery { depth, eps, radius: math::neutral_radius(depth, eps), closedness })
    }

    pub fn closed(depth: usize, eps: f64) -> Result<Self> {
        BowenQuery::new(depth, eps, Closedness::Closed)
    }

    pub fn open(depth: usize, eps: f64) -> Result<Self> {
        BowenQuery::new(depth, eps, Closedness::Open)
    }
}

/// `truncated` means the walk stopped once the running max passed the
/// early-exit threshold; `value` is then only a lower bound above it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BowenDistance {
    pub value: f64,
    pub truncated: bool,
}

/// `d_n(p, q) = max_{g in G_n} d(g p, g q)`.
pub fn bowen_distance(
    system: &System,
    p: &Point,
    q: &Point,
    n: usize,
    early_exit: Option<f64>,
) -> Result<BowenDistance> {
    if n == 0 {
        return Err(Error::InvalidArgument("Bowen depth must be at least 1".into()));
    }
    let mut max: f64 = 0.0;
    let mut truncated = false;
    words::for_each_image_pair(system, p, q, n, |a, b| {
        let d = system.metric_value(a, b)?;
        if d > max {
            max = d;
        }
        if let Some(t) = early_exit {
            if max > t {
                truncated = true;
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok(BowenDistance { value: max, truncated })
}

/// `d_m` between two points from their orbit tables, `m <= min(depths)`.
pub fn table_distance(
    system: &System,
    a: &OrbitTable,
    b: &OrbitTable,
    m: usize,
    early_exit: Option<f64>,
) -> Result<BowenDistance> {
    let (la, lb) = (a.level(m)?, b.level(m)?);
    let mut max: f64 = 0.0;
    for (x, y) in la.iter().zip(lb) {
        let d = system.metric_value(x, y)?;
        if d > max {
            max = d;
            if let Some(t) = early_exit {
                if max > t {
                    return Ok(BowenDistance { value: max, truncated: true });
                }
            }
        }
    }
    Ok(BowenDistance { value: max, truncated: false })
}

pub fn ball_membership(system: &System, center: &Point, y: &Point, query: &BowenQuery) -> Result<bool> {
    let d = bowen_distance(system, center, y, query.depth, Some(query.radius))?;
    Ok(!d.truncated && query.closedness.admits(d.value, query.radius))
}

/// `f_n(x) = sum_{g in G_n} f(g x)`, one term per formal word.
pub fn potential_sum(system: &System, potential: &Potential, x: &Point, n: usize) -> Result<f64> {
    let size = level_size(system.k(), n)?;
    let base = if size <= DEFAULT_ORBIT_CAP {
        let table = words::orbit_images(system, x, n)?;
        table_base_sum(potential, table.images())?
    } else {
        let mut acc = 0.0;
        let mut err = None;
        words::for_each_image(system, x, n, |q| match potential.eval_base(q) {
            Ok(v) => {
                acc += v;
                true
            }
            Err(e) => {
                err = Some(e);
                false
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        acc
    };
    Ok(base + potential.offset() * size as f64)
}

fn table_base_sum(potential: &Potential, images: &[Point]) -> Result<f64> {
    let mut acc = 0.0;
    for q in images {
        acc += potential.eval_base(q)?;
    }
    Ok(acc)
}

/// `f_m(x)` for every `m` in `lo..=table.depth()`, read off one table. Sums are
/// accumulated in table order, so they agree bit for bit with [`potential_sum`].
pub fn table_potential_sums(potential: &Potential, table: &OrbitTable, lo: usize) -> Result<Vec<f64>> {
    let k = table.k();
    let mut out = Vec::with_capacity(table.depth() + 1 - lo);
    let mut acc = 0.0;
    let mut done = 0usize;
    for m in lo..=table.depth() {
        let size = level_size(k, m)? as usize;
        for q in &table.images()[done..size] {
            acc += potential.eval_base(q)?;
        }
        done = size;
        out.push(acc + potential.offset() * size as f64);
    }
    Ok(out)
}

/// Sample estimate of `sup_{y in closed ball} f_n(y)`: the max of `f_n` over
/// `x` itself and the sample points inside the closed neutralized ball.
pub fn ball_sup_sum(
    system: &System,
    potential: &Potential,
    x: &Point,
    query: &BowenQuery,
    sample: &[Point],
) -> Result<f64> {
    let mut best = potential_sum(system, potential, x, query.depth)?;
    let closed = BowenQuery { closedness: Closedness::Closed, ..*query };
    for y in sample {
        if ball_membership(system, x, y, &closed)? {
            best = best.max(potential_sum(system, potential, y, query.depth)?);
        }
    }
    Ok(best)
}

/// Lower estimate of `sup{|f(x) - f(y)| : d(x, y) <= 2 e^{-n eps}}` from the
/// first `budget` sample pairs. Returns 0 when no pair is close enough.
pub fn continuity_modulus(
    system: &System,
    potential: &Potential,
    sample: &[Point],
    n: usize,
    eps: f64,
    budget: usize,
) -> Result<f64> {
    if budget == 0 {
        return Err(Error::InvalidArgument("pair budget must be at least 1".into()));
    }
    let reach = 2.0 * math::neutral_radius(n, eps);
    let mut seen = 0usize;
    let mut best: f64 = 0.0;
    'outer: for i in 0..sample.len() {
        for j in i + 1..sample.len() {
            if seen == budget {
                break 'outer;
            }
            seen += 1;
            let d = system.distance(&sample[i], &sample[j])?;
            if d.resolved && d.value <= reach {
                let diff = (potential.eval(&sample[i])? - potential.eval(&sample[j])?).abs();
                best = best.max(diff);
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug)]
enum IndexKind {
    All,
    /// Points sorted by their first `len` symbols.
    Prefix { len: usize, keys: Vec<(Vec<u8>, usize)> },
    /// Points sorted by their first coordinate.
    Circle { coords: Vec<(f64, usize)> },
}

/// Prefilter for `d_n`-balls of a fixed radius over a fixed point list.
///
/// [`BowenIndex::candidates`] and [`BowenIndex::close_pairs`] return supersets
/// of the exact answers; callers still test `d_n` on what they get back.
#[derive(Clone, Debug)]
pub struct BowenIndex {
    depth: usize,
    radius: f64,
    len: usize,
    kind: IndexKind,
}

// absorbs rounding in coordinate comparisons so the prefilter stays a superset
const CIRCLE_SLACK: f64 = 1e-12;

impl BowenIndex {
    pub fn new(system: &System, points: &[Point], depth: usize, radius: f64) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidArgument("Bowen depth must be at least 1".into()));
        }
        let len = points.len();
        let kind = if radius >= system.diameter() {
            IndexKind::All
        } else {
            match system.space() {
                Space::Symbolic { .. } => {
                    let agree = symbolic_agreement(system, depth, radius);
                    let mut keys = points
                        .iter()
                        .enumerate()
                        .map(|(i, p)| Ok((prefix_key(p, agree)?, i)))
                        .collect::<Result<Vec<_>>>()?;
                    keys.sort();
                    IndexKind::Prefix { len: agree, keys }
                }
                Space::Torus { .. } => {
                    let mut coords = points
                        .iter()
                        .enumerate()
                        .map(|(i, p)| {
                            p.as_torus()
                                .and_then(|c| c.first().copied())
                                .map(|x| (x, i))
                                .ok_or(Error::SpaceMismatch("point"))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    coords.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                    IndexKind::Circle { coords }
                }
            }
        };
        Ok(BowenIndex { depth, radius, len, kind })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Indices that may satisfy `d_n(query, p_i) <= radius`.
    pub fn candidates(&self, query: &Point) -> Result<Vec<usize>> {
        match &self.kind {
            IndexKind::All => Ok((0..self.len).collect()),
            IndexKind::Prefix { len, keys } => {
                let key = prefix_key(query, *len)?;
                let start = keys.partition_point(|(k, _)| k.as_slice() < key.as_slice());
                Ok(keys[start..]
                    .iter()
                    .take_while(|(k, _)| *k == key)
                    .map(|(_, i)| *i)
                    .collect())
            }
            IndexKind::Circle { coords } => {
                let x = query
                    .as_torus()
                    .and_then(|c| c.first().copied())
                    .ok_or(Error::SpaceMismatch("point"))?;
                let r = self.radius + CIRCLE_SLACK;
                let mut out = Vec::new();
                let mut push_range = |lo: f64, hi: f64| {
                    let s = coords.partition_point(|(c, _)| *c < lo);
                    for (c, i) in &coords[s..] {
                        if *c > hi {
                            break;
                        }
                        out.push(*i);
                    }
                };
                push_range((x - r).max(0.0), (x + r).min(1.0));
                if x - r < 0.0 {
                    push_range(x - r + 1.0, 1.0);
                }
                if x + r > 1.0 {
                    push_range(0.0, x + r - 1.0);
                }
                out.sort_unstable();
                out.dedup();
                Ok(out)
            }
        }
    }

    /// Pairs `(i, j)`, `i < j`, that may satisfy `d_n(p_i, p_j) <= radius`.
    pub fn close_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        match &self.kind {
            IndexKind::All => {
                for i in 0..self.len {
                    for j in i + 1..self.len {
                        out.push((i, j));
                    }
                }
            }
            IndexKind::Prefix { keys, .. } => {
                let mut s = 0;
                while s < keys.len() {
                    let mut e = s + 1;
                    while e < keys.len() && keys[e].0 == keys[s].0 {
                        e += 1;
                    }
                    for a in s..e {
                        for b in a + 1..e {
                            let (i, j) = (keys[a].1, keys[b].1);
                            out.push((i.min(j), i.max(j)));
                        }
                    }
                    s = e;
                }
                out.sort_unstable();
            }
            IndexKind::Circle { coords } => {
                let n = coords.len();
                let r = self.radius + CIRCLE_SLACK;
                for p in 0..n {
                    for step in 1..n {
                        let q = (p + step) % n;
                        let mut gap = coords[q].0 - coords[p].0;
                        if gap < 0.0 {
                            gap += 1.0;
                        }
                        if gap > r {
                            break;
                        }
                        let (i, j) = (coords[p].1, coords[q].1);
                        out.push((i.min(j), i.max(j)));
                    }
                }
                out.sort_unstable();
                out.dedup();
            }
        }
        out
    }
}

/// Least prefix agreement forced by `d_n(x, y) <= radius` on a shift space.
///
/// All symbolic generators are shifts, so `G_n` holds `sigma^j` for `j < n` and
/// `d_n(x, y) = b^{-max(0, s - n + 1)}` with `s` the first disagreement. For
/// `radius < 1` this is at most `radius` iff `s >= n - 1 + t`, `t` the least
/// integer with `b^{-t} <= radius`.
pub fn symbolic_agreement(system: &System, depth: usize, radius: f64) -> usize {
    let base = system.symbolic_base().unwrap_or(2.0);
    if radius >= 1.0 {
        return 0;
    }
    let mut t = 1i64;
    while math::inverse_power(base, t) > radius {
        t += 1;
    }
    depth - 1 + t as usize
}

fn prefix_key(p: &Point, len: usize) -> Result<Vec<u8>> {
    let s = p.as_symbolic().ok_or(Error::SpaceMismatch("point"))?;
    (0..len).map(|i| s.symbol(i)).collect()
}

/// Orbit tables for a list of points, all at the same depth.
pub fn orbit_tables(system: &System, points: &[Point], depth: usize, cap: u64) -> Result<Vec<OrbitTable>> {
    points.iter().map(|p| words::orbit_images_capped(system, p, depth, cap)).collect()
}

/// Running maxima of `d(g a, g b)` over the table prefixes `G_m`, `m` in
/// `lo..=hi`. Entries after the running max passes `stop_above` are `+inf`.
pub fn prefix_maxima(
    system: &System,
    a: &OrbitTable,
    b: &OrbitTable,
    lo: usize,
    hi: usize,
    stop_above: f64,
) -> Result<Vec<f64>> {
    let k = a.k();
    let mut out = vec![f64::INFINITY; hi + 1 - lo];
    let mut max: f64 = 0.0;
    let mut done = 0usize;
    for m in 1..=hi {
        let size = level_size(k, m)? as usize;
        for (x, y) in a.images()[done..size].iter().zip(&b.images()[done..size]) {
            let d = system.metric_value(x, y)?;
            if d > max {
                max = d;
            }
        }
        done = size;
        if max > stop_above {
            return Ok(out);
        }
        if m >= lo {
            out[m - lo] = max;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::forced_cylinder_length;
    use crate::systems::{PotentialKind, SampleSet};

    fn t(x: f64) -> Point {
        Point::torus(vec![x])
    }

    #[test]
    fn bowen_distance_examples() {
        let dbl = System::circle_maps(&[2]).unwrap();
        let d = bowen_distance(&dbl, &t(0.1), &t(0.3), 1, None).unwrap();
        assert!((d.value - 0.2).abs() < 1e-15);
        let d = bowen_distance(&dbl, &t(0.0), &t(0.1), 2, None).unwrap();
        assert!((d.value - 0.2).abs() < 1e-15);
        let two = System::circle_maps(&[2, 3]).unwrap();
        let d = bowen_distance(&two, &t(0.0), &t(0.1), 2, None).unwrap();
        assert!((d.value - 0.3).abs() < 1e-15);
    }

    #[test]
    fn early_exit_is_flagged() {
        let dbl = System::circle_maps(&[2]).unwrap();
        let d = bowen_distance(&dbl, &t(0.0), &t(0.01), 10, Some(0.05)).unwrap();
        assert!(d.truncated && d.value > 0.05);
        let full = bowen_distance(&dbl, &t(0.0), &t(0.01), 10, None).unwrap();
        assert!(!full.truncated && full.value >= d.value);
    }

    #[test]
    fn membership_examples() {
        let dbl = System::circle_maps(&[2]).unwrap();
        let q = BowenQuery::closed(2, 1.0).unwrap();
        assert!(!ball_membership(&dbl, &t(0.0), &t(0.4), &q).unwrap());
        for c in [Closedness::Open, Closedness::Closed] {
            let q = BowenQuery::new(3, 0.2, c).unwrap();
            assert!(ball_membership(&dbl, &t(0.3), &t(0.3), &q).unwrap());
        }
    }

    #[test]
    fn shift_membership_matches_cylinder_arithmetic() {
        let shift = System::full_shift(2, 2.0, 1).unwrap();
        let ln2 = core::f64::consts::LN_2;
        for n in 1..8 {
            let q = BowenQuery::closed(n, ln2).unwrap();
            let need = forced_cylinder_length(n, ln2, 2.0, Closedness::Closed);
            if math::neutral_radius(n, ln2) == 2f64.powi(-(n as i32)) {
                assert_eq!(need, 2 * n - 1);
            }
            let center = Point::symbolic(vec![0; 3 * n + 2]);
            for s in 0..(3 * n) {
                let mut w = vec![0u8; 3 * n + 2];
                w[s] = 1;
                let inside = ball_membership(&shift, &center, &Point::symbolic(w), &q).unwrap();
                assert_eq!(inside, s >= need, "n={n} s={s}");
            }
        }
    }

    #[test]
    fn potential_sum_examples() {
        let dbl = System::circle_maps(&[2]).unwrap();
        let c = Potential::constant(1.5);
        assert_eq!(potential_sum(&dbl, &c, &t(0.3), 4).unwrap(), 6.0);
        let id = Potential::new(PotentialKind::TorusAffine { coeffs: vec![1.0] });
        assert_eq!(potential_sum(&dbl, &id, &t(0.0), 7).unwrap(), 0.0);
        assert!((potential_sum(&dbl, &id, &t(0.3), 2).unwrap() - 0.9).abs() < 1e-15);
        let two = System::circle_maps(&[2, 3]).unwrap();
        assert_eq!(potential_sum(&two, &c, &t(0.3), 3).unwrap(), 1.5 * 7.0);
    }

    #[test]
    fn table_sums_agree_with_direct_sums() {
        let two = System::circle_maps(&[2, 3]).unwrap();
        let id = Potential::new(PotentialKind::TorusAffine { coeffs: vec![1.0] }).plus_constant(0.3);
        let table = words::orbit_images(&two, &t(0.123), 6).unwrap();
        let sums = table_potential_sums(&id, &table, 2).unwrap();
        for (i, m) in (2..=6).enumerate() {
            assert_eq!(sums[i].to_bits(), potential_sum(&two, &id, &t(0.123), m).unwrap().to_bits());
        }
    }

    #[test]
    fn ball_sup_examples() {
        let dbl = System::circle_maps(&[2]).unwrap();
        let id = Potential::new(PotentialKind::TorusAffine { coeffs: vec![1.0] });
        let q = BowenQuery::closed(3, 0.1).unwrap();
        let x = t(0.3);
        let fx = potential_sum(&dbl, &id, &x, 3).unwrap();
        assert_eq!(ball_sup_sum(&dbl, &id, &x, &q, &[x.clone()]).unwrap(), fx);
        let c = Potential::constant(2.0);
        let sample: Vec<Point> = (0..50).map(|i| t(i as f64 / 50.0)).collect();
        assert_eq!(ball_sup_sum(&dbl, &c, &x, &q, &sample).unwrap(), 6.0);
        assert!(ball_sup_sum(&dbl, &id, &x, &q, &sample).unwrap() >= fx);
    }

    #[test]
    fn ball_sup_on_shift_matches_cylinder_enumeration() {
        // closed ball at depth n, rate eps is the cylinder of length s_min around x;
        // f_n only reads the first n <= s_min symbols, all forced, so the sup is f_n(x)
        let shift = System::full_shift(2, 2.0, 1).unwrap();
        let f = Potential::first_symbol(vec![0.0, 1.0]);
        let (n, eps) = (3, 0.3);
        let depth = forced_cylinder_length(n, eps, 2.0, Closedness::Closed) + 2;
        let z = SampleSet::cylinder_complete(&shift, depth).unwrap();
        let q = BowenQuery::closed(n, eps).unwrap();
        for x in z.points().iter().step_by(5) {
            let s = x.as_symbolic().unwrap();
            let expect: f64 = (0..n).map(|i| s.symbol(i).unwrap() as f64).sum();
            assert_eq!(ball_sup_sum(&shift, &f, x, &q, z.points()).unwrap(), expect);
        }
    }

    #[test]
    fn continuity_modulus_examples() {
        let dbl = System::circle_maps(&[2]).unwrap();
        let sample: Vec<Point> = (0..64).map(|i| t(i as f64 / 64.0)).collect();
        assert_eq!(continuity_modulus(&dbl, &Potential::constant(3.0), &sample, 2, 0.5, 5000).unwrap(), 0.0);
        let tab = Potential::new(PotentialKind::Tabulated {
            resolution: 4,
            values: vec![0.0, 0.25, 0.5, 0.25],
        });
        let lip = tab.lipschitz_bound().unwrap();
        let (n, eps) = (3, 0.4);
        let est = continuity_modulus(&dbl, &tab, &sample, n, eps, 5000).unwrap();
        assert!(est > 0.0 && est <= lip * 2.0 * math::neutral_radius(n, eps) + 1e-15);
        // spacing 1/64 exceeds 2 e^{-n eps}
        assert_eq!(continuity_modulus(&dbl, &tab, &sample, 20, 0.5, 5000).unwrap(), 0.0);
        assert!(continuity_modulus(&dbl, &tab, &sample, 2, 0.5, 0).is_err());
    }

    #[test]
    fn index_is_a_superset() {
        let shift = System::full_shift(2, 2.0, 1).unwrap();
        let z = SampleSet::cylinder_complete(&shift, 7).unwrap();
        let dbl = System::circle_maps(&[2]).unwrap();
        let g = SampleSet::random(&dbl, 120, 3, 0).unwrap();
        for (sys, pts) in [(&shift, z.points()), (&dbl, g.points())] {
            for (n, r) in [(2, 0.3), (3, 0.1), (1, 0.02), (4, 0.6)] {
                let idx = BowenIndex::new(sys, pts, n, r).unwrap();
                let pairs = idx.close_pairs();
                for i in 0..pts.len() {
                    let cands = idx.candidates(&pts[i]).unwrap();
                    for j in 0..pts.len() {
                        let d = bowen_distance(sys, &pts[i], &pts[j], n, None).unwrap().value;
                        if d <= r {
                            assert!(cands.contains(&j));
                            if i < j {
                                assert!(pairs.binary_search(&(i, j)).is_ok());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bowen_metric_grows_with_depth() {
        let two = System::circle_maps(&[2, 3]).unwrap();
        let a = t(0.1234);
        let b = t(0.1299);
        let mut last = 0.0;
        for n in 1..7 {
            let d = bowen_distance(&two, &a, &b, n, None).unwrap().value;
            assert!(d >= last);
            last = d;
        }
        let ta = words::orbit_images(&two, &a, 6).unwrap();
        let tb = words::orbit_images(&two, &b, 6).unwrap();
        let pm = prefix_maxima(&two, &ta, &tb, 1, 6, f64::INFINITY).unwrap();
        for n in 1..=6 {
            assert_eq!(pm[n - 1], bowen_distance(&two, &a, &b, n, None).unwrap().value);
            assert_eq!(pm[n - 1], table_distance(&two, &ta, &tb, n, None).unwrap().value);
        }
    }
}
