//! Small numeric helpers shared across modules.

use alloc::vec::Vec;

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// `base^(-s)` for the symbolic metric.
#[inline]
pub fn inverse_power(base: f64, s: i64) -> f64 {
    libm::pow(base, -(s as f64))
}

/// Reduce into `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let r = x - libm::floor(x);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Neutralized radius `e^{-n eps}`.
#[inline]
pub fn neutral_radius(n: usize, eps: f64) -> f64 {
    libm::exp(-(n as f64) * eps)
}

/// `ln(sum exp(v))`, summing in descending order so equal multisets give equal
/// results regardless of input order.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NEG_INFINITY;
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let max = sorted[0];
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    for v in &sorted {
        acc += libm::exp(v - max);
    }
    max + libm::log(acc)
}

/// Ordinary least squares `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LinearFit { slope, intercept: my - slope * mx })
}

/// Derive an independent sub-seed from a parent seed and a tag (SplitMix64).
pub fn split_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let v = [0.1, -2.0, 3.5, 0.0];
        let direct: f64 = v.iter().map(|x| exp(*x)).sum();
        assert!((log_sum_exp(&v) - ln(direct)).abs() < 1e-14);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn log_sum_exp_is_order_independent() {
        let a = [1.0, 1e-3, -4.0, 2.5, 2.5];
        let b = [2.5, -4.0, 2.5, 1.0, 1e-3];
        assert_eq!(log_sum_exp(&a).to_bits(), log_sum_exp(&b).to_bits());
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: alloc::vec::Vec<f64> = xs.iter().map(|x| 0.5 + 2.0 * x).collect();
        let fit = least_squares(&xs, &ys).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 0.5).abs() < 1e-12);
    }

    #[test]
    fn frac_stays_in_unit_interval() {
        assert_eq!(frac(1.0), 0.0);
        assert_eq!(frac(-1e-300), 0.0);
        assert!((frac(1.4) - 0.4).abs() < 1e-15);
    }
}
