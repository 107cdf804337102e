//! Closed forms on full shifts, computed by cylinder arithmetic only.
//!
//! On the full `m`-shift with metric `b^{-s}` and shift generators, `G_n`
//! contains `sigma^j` for `j < n`, so `d_n(x, y) = b^{-max(0, s - n + 1)}` where
//! `s` is the first index at which `x` and `y` disagree. A neutralized ball is
//! therefore a cylinder whose length `s_min` depends only on `(n, eps, b)`.

use alloc::vec::Vec;

use crate::bowen::Closedness;
use crate::error::{Error, Result};
use crate::math;
use crate::words::level_size;

/// Least `s` with `b^{-(s - n + 1)} < e^{-n eps}` (open) or `<=` (closed).
///
/// Points agree on their first `s_min` symbols iff they share a ball. Uses the
/// same `pow`/`exp` evaluations as the metric and the ball radius, so boundary
/// cases round identically. `eps = 0` returns the classical length `n`.
pub fn forced_cylinder_length(n: usize, eps: f64, base: f64, closedness: Closedness) -> usize {
    assert!(n >= 1 && eps >= 0.0 && base > 1.0);
    if eps == 0.0 {
        return n;
    }
    let r = math::neutral_radius(n, eps);
    let mut s = n;
    while !closedness.admits(math::inverse_power(base, (s + 1 - n) as i64), r) {
        s += 1;
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftOracleSpec {
    pub alphabet: u8,
    pub base: f64,
    pub multiplicity: usize,
    /// `f` as a function of the first symbol.
    pub potential: Vec<f64>,
    pub eps: f64,
    pub n: usize,
    pub closedness: Closedness,
}

impl ShiftOracleSpec {
    pub fn new(alphabet: u8, base: f64, eps: f64, n: usize) -> Self {
        ShiftOracleSpec {
            alphabet,
            base,
            multiplicity: 1,
            potential: alloc::vec![0.0; alphabet as usize],
            eps,
            n,
            closedness: Closedness::Closed,
        }
    }

    pub fn with_potential(mut self, table: Vec<f64>) -> Self {
        self.potential = table;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.alphabet < 2 || !(self.base >= 2.0) || self.multiplicity == 0 || self.n == 0 {
            return Err(Error::InvalidArgument("oracle needs m >= 2, b >= 2, k >= 1, n >= 1".into()));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidArgument("oracle needs eps >= 0".into()));
        }
        if self.potential.len() != self.alphabet as usize || self.potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("potential table must hold one finite value per symbol".into()));
        }
        Ok(())
    }

    pub fn forced_length(&self) -> usize {
        forced_cylinder_length(self.n, self.eps, self.base, self.closedness)
    }
}

/// Finite-`n` critical exponent of the packing by all depth-`n` balls on the
/// single-generator full shift:
/// `alpha(n) = [s_min ln m + n ln sum_j e^{f(j)} - n ln m] / n`.
pub fn shift_oracle_alpha(spec: &ShiftOracleSpec) -> Result<f64> {
    spec.validate()?;
    if spec.multiplicity != 1 {
        return Err(Error::InvalidArgument(
            "shift_oracle_alpha covers one generator; use multi_generator_identical_shift_alpha".into(),
        ));
    }
    let n = spec.n as f64;
    let ln_m = math::ln(spec.alphabet as f64);
    let s = spec.forced_length() as f64;
    Ok((s * ln_m + n * math::log_sum_exp(&spec.potential) - n * ln_m) / n)
}

/// `n -> infinity` limit of [`shift_oracle_alpha`]: `ln sum_j e^{f(j)} + eps ln m / ln b`.
pub fn shift_oracle_limit(spec: &ShiftOracleSpec) -> Result<f64> {
    spec.validate()?;
    let ln_m = math::ln(spec.alphabet as f64);
    Ok(math::log_sum_exp(&spec.potential) + spec.eps / math::ln(spec.base) * ln_m)
}

/// `k` copies of the shift with `f = 0`: `d_n` is the single-shift `d_n` while
/// the exponent counts formal words, so `alpha(n) = s_min ln m / |G_n|`.
pub fn multi_generator_identical_shift_alpha(alphabet: u8, base: f64, eps: f64, k: usize, n: usize) -> Result<f64> {
    let spec = ShiftOracleSpec { multiplicity: k, ..ShiftOracleSpec::new(alphabet, base, eps, n) };
    spec.validate()?;
    let size = level_size(k, n)? as f64;
    Ok(spec.forced_length() as f64 * math::ln(alphabet as f64) / size)
}

/// Local-pressure quotient of the uniform measure on length-`depth` cylinders
/// at a point, `f = 0`: `s_open ln m / |G_n|` when `s_open <= depth`.
pub fn uniform_cylinder_local_pressure(alphabet: u8, base: f64, eps: f64, k: usize, n: usize, depth: usize) -> Result<f64> {
    let s = forced_cylinder_length(n, eps, base, Closedness::Open);
    let size = level_size(k, n)? as f64;
    Ok(s.min(depth) as f64 * math::ln(alphabet as f64) / size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::LN_2;

    #[test]
    fn forced_length_examples() {
        assert_eq!(forced_cylinder_length(10, LN_2, 2.0, Closedness::Open), 20);
        assert_eq!(forced_cylinder_length(7, 0.0, 2.0, Closedness::Open), 7);
        // far from the boundary both inequalities agree
        for n in 1..20 {
            let o = forced_cylinder_length(n, 0.1, 2.0, Closedness::Open);
            let c = forced_cylinder_length(n, 0.1, 2.0, Closedness::Closed);
            assert_eq!(o, c);
            // closed form n - 1 + ceil(n eps / ln 2) away from integer boundaries
            let x = n as f64 * 0.1 / LN_2;
            assert_eq!(c, n - 1 + libm::ceil(x) as usize);
        }
        // exact boundary at n = 10: 2^-10 equals e^{-10 ln 2} in double precision
        assert_eq!(math::neutral_radius(10, LN_2), math::inverse_power(2.0, 10));
        assert_eq!(forced_cylinder_length(10, LN_2, 2.0, Closedness::Closed), 19);
    }

    #[test]
    fn forced_length_shrinks_with_eps() {
        for n in 1..15 {
            let mut last = n;
            for i in 1..40 {
                let s = forced_cylinder_length(n, i as f64 * 0.025, 2.0, Closedness::Closed);
                assert!(s >= last);
                last = s;
            }
        }
    }

    #[test]
    fn shift_oracle_examples() {
        let spec = ShiftOracleSpec::new(2, 2.0, 0.0, 9);
        assert!((shift_oracle_alpha(&spec).unwrap() - LN_2).abs() < 1e-15);
        let spec = ShiftOracleSpec::new(2, 2.0, 0.1, 9);
        assert!((shift_oracle_limit(&spec).unwrap() - (LN_2 + 0.1)).abs() < 1e-15);
        for c in [0.5, 1.0, 2.5] {
            let spec = ShiftOracleSpec::new(2, 2.0, 0.0, 6).with_potential(alloc::vec![0.0, c]);
            let expect = libm::log(1.0 + libm::exp(c));
            assert!((shift_oracle_alpha(&spec).unwrap() - expect).abs() < 1e-14);
            assert!((shift_oracle_limit(&spec).unwrap() - expect).abs() < 1e-14);
        }
        let mut spec = ShiftOracleSpec::new(2, 2.0, 0.1, 4);
        spec.multiplicity = 2;
        assert!(shift_oracle_alpha(&spec).is_err());
        assert!(shift_oracle_alpha(&ShiftOracleSpec::new(2, 2.0, 0.1, 4).with_potential(alloc::vec![1.0])).is_err());
    }

    #[test]
    fn shift_oracle_approaches_its_limit() {
        for eps in [0.05, 0.1, 0.2] {
            let limit = shift_oracle_limit(&ShiftOracleSpec::new(2, 2.0, eps, 1)).unwrap();
            for n in [50, 200, 1000] {
                let a = shift_oracle_alpha(&ShiftOracleSpec::new(2, 2.0, eps, n)).unwrap();
                assert!(a <= limit + 1e-12 && limit - a <= LN_2 / n as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn multi_generator_examples() {
        let s = forced_cylinder_length(6, 0.1, 2.0, Closedness::Closed);
        let a = multi_generator_identical_shift_alpha(2, 2.0, 0.1, 2, 6).unwrap();
        assert_eq!(a, s as f64 * LN_2 / 63.0);
        let mut last = f64::INFINITY;
        for n in 3..20 {
            let a = multi_generator_identical_shift_alpha(2, 2.0, 0.1, 2, n).unwrap();
            assert!(a < last && a > 0.0);
            last = a;
        }
        for n in 1..12 {
            let single = shift_oracle_alpha(&ShiftOracleSpec::new(3, 2.0, 0.2, n)).unwrap();
            let multi = multi_generator_identical_shift_alpha(3, 2.0, 0.2, 1, n).unwrap();
            assert!((single - multi).abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_local_pressure_matches_alpha_off_boundary() {
        for n in 6..13 {
            for eps in [0.05, 0.1, 0.2] {
                let alpha = shift_oracle_alpha(&ShiftOracleSpec::new(2, 2.0, eps, n)).unwrap();
                let local = uniform_cylinder_local_pressure(2, 2.0, eps, 1, n, 64).unwrap();
                assert!((alpha - local).abs() < 1e-14);
            }
        }
    }
}
