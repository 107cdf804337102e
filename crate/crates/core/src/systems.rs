//! Spaces, metrics, generator maps, potentials and finite sample sets.
//!
//! Two families of compact metric spaces are modelled:
//!
//! * the `D`-dimensional torus `[0,1)^D` with the sup metric over per-coordinate
//!   wraparound distances, acted on by affine maps;
//! * the full shift on `m` symbols with `d(x, y) = b^{-s}`, `s` the first index
//!   where `x` and `y` disagree, acted on by the left shift.
//!
//! Symbolic points keep a finite prefix and an optional periodic tail. Reading
//! past the prefix of a point without a tail is an error, never a guess.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;

/// A point of the shift space: stored symbols from `start` on, then an optional
/// periodic tail.
#[derive(Clone, Debug)]
pub struct SymbolicPoint {
    symbols: Arc<[u8]>,
    start: usize,
    tail: Option<Arc<[u8]>>,
}

impl SymbolicPoint {
    pub fn new(prefix: Vec<u8>) -> Self {
        SymbolicPoint { symbols: prefix.into(), start: 0, tail: None }
    }

    /// `prefix` followed by `tail` repeated forever. `tail` must be nonempty.
    pub fn with_periodic_tail(prefix: Vec<u8>, tail: Vec<u8>) -> Result<Self> {
        if tail.is_empty() {
            return Err(Error::InvalidArgument("periodic tail must be nonempty".into()));
        }
        Ok(SymbolicPoint { symbols: prefix.into(), start: 0, tail: Some(tail.into()) })
    }

    /// The remaining stored prefix.
    pub fn prefix(&self) -> &[u8] {
        if self.start >= self.symbols.len() {
            &[]
        } else {
            &self.symbols[self.start..]
        }
    }

    pub fn tail(&self) -> Option<&[u8]> {
        self.tail.as_deref()
    }

    /// Number of readable symbols, `None` when a periodic tail makes it infinite.
    pub fn stored_depth(&self) -> Option<usize> {
        match self.tail {
            Some(_) => None,
            None => Some(self.prefix().len()),
        }
    }

    pub fn symbol(&self, i: usize) -> Result<u8> {
        let j = self.start + i;
        if j < self.symbols.len() {
            return Ok(self.symbols[j]);
        }
        match &self.tail {
            Some(t) => Ok(t[(j - self.symbols.len()) % t.len()]),
            None => Err(Error::DepthUnderflow { needed: i + 1, available: self.prefix().len() }),
        }
    }

    /// Left shift: drops the first symbol.
    pub fn shifted(&self) -> Result<Self> {
        if self.tail.is_none() && self.start >= self.symbols.len() {
            return Err(Error::DepthUnderflow { needed: 1, available: 0 });
        }
        Ok(SymbolicPoint { symbols: self.symbols.clone(), start: self.start + 1, tail: self.tail.clone() })
    }

    fn tail_phase(&self) -> usize {
        match &self.tail {
            Some(t) => self.start.saturating_sub(self.symbols.len()) % t.len(),
            None => 0,
        }
    }

    /// First disagreement index, or how the comparison ended.
    fn first_disagreement(&self, other: &SymbolicPoint) -> Comparison {
        let horizon = match (&self.tail, &other.tail) {
            (Some(a), Some(b)) => {
                self.prefix().len().max(other.prefix().len()) + lcm(a.len(), b.len())
            }
            (None, Some(_)) => self.prefix().len(),
            (Some(_), None) => other.prefix().len(),
            (None, None) => self.prefix().len().min(other.prefix().len()),
        };
        for i in 0..horizon {
            // both reads are inside the horizon, hence valid
            let a = self.symbol(i).unwrap_or(0);
            let b = other.symbol(i).unwrap_or(0);
            if a != b {
                return Comparison::Differ { index: i, ordering: a.cmp(&b) };
            }
        }
        match (&self.tail, &other.tail) {
            (Some(_), Some(_)) => Comparison::Equal,
            (None, None) if self.prefix().len() == other.prefix().len() => Comparison::Equal,
            _ => Comparison::Unresolved,
        }
    }

    fn structural_cmp(&self, other: &SymbolicPoint) -> Ordering {
        let key = |p: &SymbolicPoint| (p.tail.is_some(), p.prefix().len());
        key(self)
            .cmp(&key(other))
            .then_with(|| match (&self.tail, &other.tail) {
                (Some(a), Some(b)) => a.len().cmp(&b.len()).then_with(|| {
                    a.iter().cmp(b.iter()).then(self.tail_phase().cmp(&other.tail_phase()))
                }),
                _ => Ordering::Equal,
            })
    }
}

enum Comparison {
    Differ { index: usize, ordering: Ordering },
    Equal,
    Unresolved,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[derive(Clone, Debug)]
pub enum Point {
    /// Coordinates in `[0, 1)`.
    Torus(Vec<f64>),
    Symbolic(SymbolicPoint),
}

impl Point {
    /// A torus point; coordinates are reduced mod 1.
    pub fn torus(coords: Vec<f64>) -> Self {
        Point::Torus(coords.into_iter().map(math::frac).collect())
    }

    pub fn symbolic(prefix: Vec<u8>) -> Self {
        Point::Symbolic(SymbolicPoint::new(prefix))
    }

    pub fn symbolic_periodic(prefix: Vec<u8>, tail: Vec<u8>) -> Result<Self> {
        Ok(Point::Symbolic(SymbolicPoint::with_periodic_tail(prefix, tail)?))
    }

    pub fn as_torus(&self) -> Option<&[f64]> {
        match self {
            Point::Torus(c) => Some(c),
            Point::Symbolic(_) => None,
        }
    }

    pub fn as_symbolic(&self) -> Option<&SymbolicPoint> {
        match self {
            Point::Symbolic(s) => Some(s),
            Point::Torus(_) => None,
        }
    }

    /// Deterministic total order: lexicographic on coordinates or symbols.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        match (self, other) {
            (Point::Torus(a), Point::Torus(b)) => {
                for (x, y) in a.iter().zip(b) {
                    match x.total_cmp(y) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                }
                a.len().cmp(&b.len())
            }
            (Point::Symbolic(a), Point::Symbolic(b)) => match a.first_disagreement(b) {
                Comparison::Differ { ordering, .. } => ordering,
                Comparison::Equal => Ordering::Equal,
                Comparison::Unresolved => a.structural_cmp(b),
            },
            (Point::Torus(_), Point::Symbolic(_)) => Ordering::Less,
            (Point::Symbolic(_), Point::Torus(_)) => Ordering::Greater,
        }
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Point) -> bool {
        match (self, other) {
            (Point::Torus(a), Point::Torus(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            }
            (Point::Symbolic(a), Point::Symbolic(b)) => {
                matches!(a.first_disagreement(b), Comparison::Equal)
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Space {
    Torus { dim: usize },
    Symbolic { alphabet: u8 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    /// Sup over coordinates of `min(|a-b|, 1-|a-b|)`.
    TorusSup,
    /// `base^{-s}` with `s` the first disagreement index.
    SymbolicBase(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// `x_i -> slope_i * x_i + offset_i (mod 1)`.
    AffineModOne { slopes: Vec<i64>, offsets: Vec<f64> },
    /// Left shift on sequences.
    Shift,
    /// `x_i -> scale_i * x_i + offset_i`, no reduction; must stay inside `[0,1)`.
    AffineContraction { scales: Vec<f64>, offsets: Vec<f64> },
}

impl Generator {
    /// One-dimensional `x -> slope * x mod 1`.
    pub fn times(slope: i64) -> Self {
        Generator::AffineModOne { slopes: vec![slope], offsets: vec![0.0] }
    }
}

/// Declarative description accepted by [`build_system`].
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub space: Space,
    pub metric: Metric,
    pub generators: Vec<Generator>,
}

/// Result of [`System::distance`]. `resolved` is false when two symbolic points
/// agree on every stored symbol without being provably equal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Distance {
    pub value: f64,
    pub resolved: bool,
}

/// A compact metric space with `k >= 1` generator maps. Immutable once built.
#[derive(Clone, Debug)]
pub struct System {
    space: Space,
    metric: Metric,
    generators: Vec<Generator>,
    diagnostics: Vec<String>,
}

pub fn build_system(spec: &SystemSpec) -> Result<System> {
    System::new(spec.space.clone(), spec.metric.clone(), spec.generators.clone())
}

impl System {
    pub fn new(space: Space, metric: Metric, generators: Vec<Generator>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::NoGenerators);
        }
        match (&space, &metric) {
            (Space::Torus { dim }, Metric::TorusSup) => {
                if *dim == 0 {
                    return Err(Error::InvalidSystem("torus dimension must be at least 1".into()));
                }
            }
            (Space::Symbolic { alphabet }, Metric::SymbolicBase(b)) => {
                if *alphabet < 2 {
                    return Err(Error::InvalidSystem("alphabet needs at least 2 symbols".into()));
                }
                if !(b.is_finite() && *b > 1.0) {
                    return Err(Error::InvalidSystem(format!("metric base {b} must exceed 1")));
                }
            }
            _ => return Err(Error::InvalidSystem("metric kind does not match space kind".into())),
        }
        for (i, g) in generators.iter().enumerate() {
            validate_generator(&space, i, g)?;
        }
        let mut diagnostics = Vec::new();
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if generators[i] == generators[j] {
                    diagnostics.push(format!(
                        "generators {i} and {j} are identical; levels still count formal words"
                    ));
                }
            }
        }
        Ok(System { space, metric, generators, diagnostics })
    }

    /// Full shift on `alphabet` symbols with `k` copies of the shift.
    pub fn full_shift(alphabet: u8, base: f64, k: usize) -> Result<Self> {
        System::new(Space::Symbolic { alphabet }, Metric::SymbolicBase(base), vec![Generator::Shift; k])
    }

    /// Circle maps `x -> s x mod 1` for each slope.
    pub fn circle_maps(slopes: &[i64]) -> Result<Self> {
        System::new(
            Space::Torus { dim: 1 },
            Metric::TorusSup,
            slopes.iter().map(|s| Generator::times(*s)).collect(),
        )
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.space, Space::Symbolic { .. })
    }

    /// Symbolic metrics satisfy the strong triangle inequality.
    pub fn is_ultrametric(&self) -> bool {
        self.is_symbolic()
    }

    pub fn diameter(&self) -> f64 {
        match self.space {
            Space::Torus { .. } => 0.5,
            Space::Symbolic { .. } => 1.0,
        }
    }

    pub fn alphabet(&self) -> Option<u8> {
        match self.space {
            Space::Symbolic { alphabet } => Some(alphabet),
            Space::Torus { .. } => None,
        }
    }

    pub fn symbolic_base(&self) -> Option<f64> {
        match self.metric {
            Metric::SymbolicBase(b) => Some(b),
            Metric::TorusSup => None,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (&self.space, p) {
            (Space::Torus { dim }, Point::Torus(c)) => {
                c.len() == *dim && c.iter().all(|x| (0.0..1.0).contains(x))
            }
            (Space::Symbolic { alphabet }, Point::Symbolic(s)) => {
                s.prefix().iter().all(|a| a < alphabet)
                    && s.tail().map_or(true, |t| t.iter().all(|a| a < alphabet))
            }
            _ => false,
        }
    }

    /// Image of `p` under generator `index` (zero-based).
    pub fn apply_generator(&self, index: usize, p: &Point) -> Result<Point> {
        let g = self.generators.get(index).ok_or(Error::GeneratorIndex { index, k: self.k() })?;
        match (g, p) {
            (Generator::Shift, Point::Symbolic(s)) => Ok(Point::Symbolic(s.shifted()?)),
            (Generator::AffineModOne { slopes, offsets }, Point::Torus(c)) => {
                if c.len() != slopes.len() {
                    return Err(Error::SpaceMismatch("point"));
                }
                Ok(Point::Torus(
                    c.iter()
                        .zip(slopes.iter().zip(offsets))
                        .map(|(x, (s, o))| math::frac(*s as f64 * x + o))
                        .collect(),
                ))
            }
            (Generator::AffineContraction { scales, offsets }, Point::Torus(c)) => {
                if c.len() != scales.len() {
                    return Err(Error::SpaceMismatch("point"));
                }
                Ok(Point::Torus(
                    c.iter()
                        .zip(scales.iter().zip(offsets))
                        .map(|(x, (a, o))| {
                            let y = a * x + o;
                            // rounding can touch 1.0 at the edge of the admitted range
                            if y >= 1.0 {
                                math::frac(y)
                            } else {
                                y.max(0.0)
                            }
                        })
                        .collect(),
                ))
            }
            _ => Err(Error::SpaceMismatch("point")),
        }
    }

    pub fn distance(&self, p: &Point, q: &Point) -> Result<Distance> {
        match (&self.metric, p, q) {
            (Metric::TorusSup, Point::Torus(a), Point::Torus(b)) => {
                if a.len() != b.len() {
                    return Err(Error::SpaceMismatch("point"));
                }
                let mut d: f64 = 0.0;
                for (x, y) in a.iter().zip(b) {
                    let t = (x - y).abs();
                    d = d.max(t.min(1.0 - t));
                }
                Ok(Distance { value: d, resolved: true })
            }
            (Metric::SymbolicBase(base), Point::Symbolic(a), Point::Symbolic(b)) => {
                Ok(match a.first_disagreement(b) {
                    Comparison::Differ { index, .. } => {
                        Distance { value: math::inverse_power(*base, index as i64), resolved: true }
                    }
                    Comparison::Equal => Distance { value: 0.0, resolved: true },
                    Comparison::Unresolved => Distance { value: 0.0, resolved: false },
                })
            }
            _ => Err(Error::SpaceMismatch("point")),
        }
    }

    /// Distance that refuses unresolved symbolic comparisons.
    pub fn metric_value(&self, p: &Point, q: &Point) -> Result<f64> {
        let d = self.distance(p, q)?;
        if d.resolved {
            Ok(d.value)
        } else {
            Err(Error::Indistinguishable)
        }
    }
}

fn validate_generator(space: &Space, i: usize, g: &Generator) -> Result<()> {
    let not_self = |reason: String| Err(Error::NotSelfMap { generator: i, reason });
    match (space, g) {
        (Space::Symbolic { .. }, Generator::Shift) => Ok(()),
        (Space::Torus { dim }, Generator::AffineModOne { slopes, offsets }) => {
            if slopes.len() != *dim || offsets.len() != *dim {
                return not_self(format!("expected {dim} coordinates"));
            }
            if offsets.iter().any(|o| !o.is_finite()) {
                return not_self("non-finite offset".into());
            }
            Ok(())
        }
        (Space::Torus { dim }, Generator::AffineContraction { scales, offsets }) => {
            if scales.len() != *dim || offsets.len() != *dim {
                return not_self(format!("expected {dim} coordinates"));
            }
            for (a, c) in scales.iter().zip(offsets) {
                if !(a.is_finite() && c.is_finite()) || a.abs() >= 1.0 {
                    return not_self(format!("scale {a} is not a contraction"));
                }
                // image of [0,1) is [c, a + c) for a >= 0 and (a + c, c] for a < 0
                let inside = if *a >= 0.0 {
                    *c >= 0.0 && a + c <= 1.0
                } else {
                    *c < 1.0 && a + c >= 0.0
                };
                if !inside {
                    return not_self(format!("x -> {a} x + {c} leaves [0,1)"));
                }
            }
            Ok(())
        }
        (Space::Symbolic { .. }, _) => not_self("only the shift acts on a symbolic space".into()),
        (Space::Torus { .. }, Generator::Shift) => not_self("the shift needs a symbolic space".into()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialKind {
    Zero,
    /// `sum_i coeffs[i] * x_i` on the torus.
    TorusAffine { coeffs: Vec<f64> },
    /// `table[x_0]` on a shift space.
    FirstSymbol { table: Vec<f64> },
    /// Periodic multilinear interpolation of `values` on a `resolution^D` grid,
    /// coordinate 0 varying fastest.
    Tabulated { resolution: usize, values: Vec<f64> },
}

/// A continuous potential `f`, stored as a base kind plus a constant offset.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    offset: f64,
}

impl Potential {
    pub fn new(kind: PotentialKind) -> Self {
        Potential { kind, offset: 0.0 }
    }

    pub fn zero() -> Self {
        Potential::new(PotentialKind::Zero)
    }

    pub fn constant(c: f64) -> Self {
        Potential { kind: PotentialKind::Zero, offset: c }
    }

    pub fn first_symbol(table: Vec<f64>) -> Self {
        Potential::new(PotentialKind::FirstSymbol { table })
    }

    /// `f + c`.
    pub fn plus_constant(&self, c: f64) -> Self {
        Potential { kind: self.kind.clone(), offset: self.offset + c }
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, PotentialKind::Zero)
    }

    /// Checks that the potential can be evaluated on the system's space.
    pub fn check(&self, system: &System) -> Result<()> {
        let ok = match (&self.kind, system.space()) {
            (PotentialKind::Zero, _) => true,
            (PotentialKind::TorusAffine { coeffs }, Space::Torus { dim }) => coeffs.len() == *dim,
            (PotentialKind::FirstSymbol { table }, Space::Symbolic { alphabet }) => {
                table.len() == *alphabet as usize
            }
            (PotentialKind::Tabulated { resolution, values }, Space::Torus { dim }) => {
                *resolution >= 1 && Some(values.len()) == resolution.checked_pow(*dim as u32)
            }
            _ => false,
        };
        if ok && self.offset.is_finite() {
            Ok(())
        } else {
            Err(Error::SpaceMismatch("potential"))
        }
    }

    /// The base part, without the offset.
    pub fn eval_base(&self, p: &Point) -> Result<f64> {
        match (&self.kind, p) {
            (PotentialKind::Zero, _) => Ok(0.0),
            (PotentialKind::TorusAffine { coeffs }, Point::Torus(c)) => {
                Ok(coeffs.iter().zip(c).map(|(a, x)| a * x).sum())
            }
            (PotentialKind::FirstSymbol { table }, Point::Symbolic(s)) => {
                let a = s.symbol(0)? as usize;
                table.get(a).copied().ok_or(Error::SpaceMismatch("point"))
            }
            (PotentialKind::Tabulated { resolution, values }, Point::Torus(c)) => {
                Ok(interpolate(*resolution, values, c))
            }
            _ => Err(Error::SpaceMismatch("point")),
        }
    }

    pub fn eval(&self, p: &Point) -> Result<f64> {
        Ok(self.eval_base(p)? + self.offset)
    }

    /// `sup |f|` over the whole space.
    pub fn sup_norm(&self) -> f64 {
        let o = self.offset;
        match &self.kind {
            PotentialKind::Zero => o.abs(),
            PotentialKind::TorusAffine { coeffs } => {
                let hi: f64 = coeffs.iter().map(|a| a.max(0.0)).sum();
                let lo: f64 = coeffs.iter().map(|a| a.min(0.0)).sum();
                (hi + o).abs().max((lo + o).abs())
            }
            PotentialKind::FirstSymbol { table: v } | PotentialKind::Tabulated { values: v, .. } => {
                v.iter().fold(0.0f64, |m, x| m.max((x + o).abs()))
            }
        }
    }

    /// Lipschitz constant with respect to the system metric when one is known.
    pub fn lipschitz_bound(&self) -> Option<f64> {
        match &self.kind {
            PotentialKind::Zero => Some(0.0),
            PotentialKind::TorusAffine { coeffs } => {
                // discontinuous across the seam x_i = 0 unless flat
                coeffs.iter().all(|a| *a == 0.0).then_some(0.0)
            }
            // first symbols differ only at distance base^0 = 1
            PotentialKind::FirstSymbol { table } => {
                let max = table.iter().fold(f64::NEG_INFINITY, |m, x| m.max(*x));
                let min = table.iter().fold(f64::INFINITY, |m, x| m.min(*x));
                Some(max - min)
            }
            PotentialKind::Tabulated { resolution, values } => {
                let r = *resolution;
                let dim = dim_of(r, values.len())?;
                let mut total = 0.0;
                for axis in 0..dim {
                    let stride = r.pow(axis as u32);
                    let mut steepest: f64 = 0.0;
                    for (idx, v) in values.iter().enumerate() {
                        let coord = (idx / stride) % r;
                        let next = idx - coord * stride + ((coord + 1) % r) * stride;
                        steepest = steepest.max((values[next] - v).abs());
                    }
                    total += steepest * r as f64;
                }
                Some(total)
            }
        }
    }
}

fn dim_of(resolution: usize, len: usize) -> Option<usize> {
    if resolution == 1 {
        return if len == 1 { Some(1) } else { None };
    }
    let mut d = 0;
    let mut acc = 1usize;
    while acc < len {
        acc = acc.checked_mul(resolution)?;
        d += 1;
    }
    (acc == len).then_some(d.max(1))
}

fn interpolate(resolution: usize, values: &[f64], coords: &[f64]) -> f64 {
    let r = resolution;
    let dim = coords.len();
    let mut base = vec![0usize; dim];
    let mut frac = vec![0.0f64; dim];
    for (i, x) in coords.iter().enumerate() {
        let u = x * r as f64;
        let cell = math::floor(u);
        base[i] = (cell as usize) % r;
        frac[i] = u - cell;
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << dim) {
        let mut w = 1.0;
        let mut idx = 0usize;
        let mut stride = 1usize;
        for axis in 0..dim {
            let up = (corner >> axis) & 1 == 1;
            let c = if up { (base[axis] + 1) % r } else { base[axis] };
            w *= if up { frac[axis] } else { 1.0 - frac[axis] };
            idx += c * stride;
            stride *= r;
        }
        if w != 0.0 {
            acc += w * values[idx];
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Grid { per_axis: usize },
    Random { seed: u64 },
    CylinderComplete { depth: usize },
    Explicit,
    Subset,
}

/// Finite nonempty stand-in for a subset `Z` of the space, without duplicates.
#[derive(Clone, Debug)]
pub struct SampleSet {
    points: Vec<Point>,
    provenance: Provenance,
    // indices sorted by `Point::lex_cmp`
    order: Vec<usize>,
}

const MAX_CYLINDER_POINTS: usize = 1 << 24;

impl SampleSet {
    pub fn new(points: Vec<Point>, provenance: Provenance) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|a, b| points[*a].lex_cmp(&points[*b]).then(a.cmp(b)));
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                return Err(Error::DuplicatePoint(w[1].max(w[0])));
            }
        }
        Ok(SampleSet { points, provenance, order })
    }

    /// Drops later duplicates instead of failing.
    pub fn deduplicated(points: Vec<Point>, provenance: Provenance) -> Result<Self> {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|a, b| points[*a].lex_cmp(&points[*b]).then(a.cmp(b)));
        let mut keep = vec![true; points.len()];
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                keep[w[1]] = false;
            }
        }
        let pts = points.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect();
        SampleSet::new(pts, provenance)
    }

    /// Regular grid `{i / per_axis}^D` on a torus.
    pub fn grid(system: &System, per_axis: usize) -> Result<Self> {
        let dim = match system.space() {
            Space::Torus { dim } => *dim,
            Space::Symbolic { .. } => return Err(Error::Unsupported("grid samples need a torus")),
        };
        if per_axis == 0 {
            return Err(Error::EmptySample);
        }
        let total = per_axis
            .checked_pow(dim as u32)
            .filter(|t| *t <= MAX_CYLINDER_POINTS)
            .ok_or_else(|| Error::InvalidArgument("grid too large".into()))?;
        let pts = (0..total)
            .map(|mut idx| {
                let mut c = Vec::with_capacity(dim);
                for _ in 0..dim {
                    c.push((idx % per_axis) as f64 / per_axis as f64);
                    idx /= per_axis;
                }
                Point::Torus(c)
            })
            .collect();
        SampleSet::new(pts, Provenance::Grid { per_axis })
    }

    /// `size` seeded random points (duplicates dropped). Symbolic points get a
    /// random prefix of `prefix_len` symbols and no tail.
    pub fn random(system: &System, size: usize, seed: u64, prefix_len: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..size).map(|_| random_point(system, &mut rng, prefix_len)).collect();
        SampleSet::deduplicated(pts, Provenance::Random { seed })
    }

    /// One representative `w 0^infinity` per length-`depth` cylinder `[w]`, in
    /// lexicographic order of `w`.
    pub fn cylinder_complete(system: &System, depth: usize) -> Result<Self> {
        let m = system
            .alphabet()
            .ok_or(Error::Unsupported("cylinder samples need a symbolic space"))?
            as usize;
        let total = m
            .checked_pow(depth as u32)
            .filter(|t| *t <= MAX_CYLINDER_POINTS)
            .ok_or_else(|| Error::InvalidArgument(format!("{m}^{depth} cylinders is too many")))?;
        let pts = (0..total)
            .map(|idx| Point::Symbolic(cylinder_word(idx, m, depth)))
            .collect();
        SampleSet::new(pts, Provenance::CylinderComplete { depth })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Position of `p` in the set, by exact point identity.
    pub fn index_of(&self, p: &Point) -> Option<usize> {
        let pos = self
            .order
            .binary_search_by(|i| self.points[*i].lex_cmp(p))
            .ok()?;
        let i = self.order[pos];
        (self.points[i] == *p).then_some(i)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.index_of(p).is_some()
    }

    /// Rank of each point in lexicographic order.
    pub fn lex_ranks(&self) -> Vec<u32> {
        let mut ranks = vec![0u32; self.points.len()];
        for (r, i) in self.order.iter().enumerate() {
            ranks[*i] = r as u32;
        }
        ranks
    }

    /// Index of a point of the set closest to `p`; ties go to the lexicographically
    /// smaller point. On symbolic spaces and on the circle the nearest point is a
    /// neighbour of `p` in lexicographic order, so no scan is needed there.
    pub fn nearest(&self, system: &System, p: &Point) -> Result<usize> {
        let dist = |i: usize| -> Result<f64> { Ok(system.distance(&self.points[i], p)?.value) };
        let neighbours: Vec<usize> = match system.space() {
            Space::Symbolic { .. } => {
                let pos = self.order.partition_point(|i| self.points[*i].lex_cmp(p) == Ordering::Less);
                let mut c = Vec::new();
                if pos > 0 {
                    c.push(self.order[pos - 1]);
                }
                if pos < self.order.len() {
                    c.push(self.order[pos]);
                }
                c
            }
            Space::Torus { dim: 1 } => {
                let pos = self.order.partition_point(|i| self.points[*i].lex_cmp(p) == Ordering::Less);
                let last = self.order.len() - 1;
                let mut c = vec![self.order[0], self.order[last]];
                if pos > 0 {
                    c.push(self.order[pos - 1]);
                }
                if pos <= last {
                    c.push(self.order[pos]);
                }
                c
            }
            Space::Torus { .. } => (0..self.points.len()).collect(),
        };
        let mut best = neighbours[0];
        let mut best_d = dist(best)?;
        for &i in &neighbours[1..] {
            let d = dist(i)?;
            if d < best_d || (d == best_d && self.points[i].lex_cmp(&self.points[best]) == Ordering::Less) {
                best = i;
                best_d = d;
            }
        }
        Ok(best)
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let pts = indices
            .iter()
            .map(|i| self.points.get(*i).cloned().ok_or(Error::InvalidArgument(format!("index {i}"))))
            .collect::<Result<Vec<_>>>()?;
        SampleSet::new(pts, Provenance::Subset)
    }
}

/// Representative `w 0^infinity` of the `idx`-th word of length `depth`.
pub fn cylinder_word(idx: usize, m: usize, depth: usize) -> SymbolicPoint {
    let mut w = vec![0u8; depth];
    let mut rest = idx;
    for pos in (0..depth).rev() {
        w[pos] = (rest % m) as u8;
        rest /= m;
    }
    SymbolicPoint { symbols: w.into(), start: 0, tail: Some(Arc::from(vec![0u8])) }
}

pub(crate) fn random_point<R: Rng>(system: &System, rng: &mut R, prefix_len: usize) -> Point {
    match system.space() {
        Space::Torus { dim } => Point::Torus((0..*dim).map(|_| rng.gen::<f64>()).collect()),
        Space::Symbolic { alphabet } => {
            Point::symbolic((0..prefix_len).map(|_| rng.gen_range(0..*alphabet)).collect())
        }
    }
}
