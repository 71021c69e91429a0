//! Scalar priors on a channel gain, with the partial moments the estimators
//! and quantizer designs integrate over cells.
//!
//! All interval functions use the half-open convention `a < X <= b`; `b` may
//! be `f64::INFINITY` and a negative `a` is clamped to the support `[0, ∞)`.

use alloc::vec::Vec;
use rand::Rng;

use crate::error::{Error, Result};
use crate::math;

/// Panels of the composite Simpson rule used for tabulated densities.
pub const QUADRATURE_PANELS: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    /// Exponential law (power of a Rayleigh-faded amplitude).
    Exponential { mean: f64 },
    /// Finite set of atoms with probabilities.
    Discrete { atoms: Vec<f64>, probs: Vec<f64> },
    /// Density given at equally spaced knots on `[0, hi]`, linearly
    /// interpolated and zero beyond `hi`.
    Tabulated { hi: f64, pdf: Vec<f64>, norm: f64 },
}

impl Prior {
    pub fn exponential(mean: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(Error::invalid("exponential mean must be positive and finite"));
        }
        Ok(Prior::Exponential { mean })
    }

    pub fn discrete(atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != probs.len() {
            return Err(Error::invalid("discrete prior needs matching, non-empty atoms and probabilities"));
        }
        if atoms.iter().any(|&a| !(a >= 0.0 && a.is_finite())) || probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::invalid("atoms must be non-negative and probabilities non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("discrete probabilities must sum to one"));
        }
        Ok(Prior::Discrete { atoms, probs })
    }

    /// Tabulate `density` at `knots` points on `[0, hi]` and normalize it.
    pub fn tabulated(hi: f64, knots: usize, density: impl Fn(f64) -> f64) -> Result<Self> {
        if !(hi > 0.0 && hi.is_finite()) || knots < 2 {
            return Err(Error::invalid("tabulated prior needs hi > 0 and at least two knots"));
        }
        let step = hi / (knots - 1) as f64;
        let pdf: Vec<f64> = (0..knots).map(|n| density(n as f64 * step).max(0.0)).collect();
        let mut prior = Prior::Tabulated { hi, pdf, norm: 1.0 };
        let norm = prior.raw_moment(0.0, hi, 0);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid("tabulated density has no mass"));
        }
        if let Prior::Tabulated { norm: n, .. } = &mut prior {
            *n = norm;
        }
        Ok(prior)
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, Prior::Discrete { .. })
    }

    pub fn mean(&self) -> f64 {
        match self {
            Prior::Exponential { mean } => *mean,
            Prior::Discrete { atoms, probs } => atoms.iter().zip(probs).map(|(a, p)| a * p).sum(),
            Prior::Tabulated { hi, .. } => self.first_moment(-1.0, *hi),
        }
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.second_moment(-1.0, f64::INFINITY) - m * m
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.mass(-1.0, x)
    }

    /// `P(a < X <= b)`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        self.moment(a, b, 0)
    }

    /// `E[X; a < X <= b]`.
    pub fn first_moment(&self, a: f64, b: f64) -> f64 {
        self.moment(a, b, 1)
    }

    /// `E[X²; a < X <= b]`.
    pub fn second_moment(&self, a: f64, b: f64) -> f64 {
        self.moment(a, b, 2)
    }

    fn moment(&self, a: f64, b: f64, order: u32) -> f64 {
        let a = a.max(0.0);
        if !(b > a) {
            // an atom sitting exactly at zero belongs to (-1, 0]
            if let Prior::Discrete { .. } = self {
                if b >= 0.0 && a == 0.0 && b == 0.0 {
                    return self.discrete_moment(-1.0, 0.0, order);
                }
            }
            return 0.0;
        }
        match self {
            Prior::Exponential { mean } => {
                let m = *mean;
                let tail = |x: f64| -> f64 {
                    if x.is_infinite() {
                        return 0.0;
                    }
                    let e = math::exp(-x / m);
                    match order {
                        0 => e,
                        1 => (x + m) * e,
                        _ => (x * x + 2.0 * x * m + 2.0 * m * m) * e,
                    }
                };
                tail(a) - tail(b)
            }
            Prior::Discrete { .. } => {
                // atoms at zero are included when the interval starts at the support edge
                let lo = if a == 0.0 { -1.0 } else { a };
                self.discrete_moment(lo, b, order)
            }
            Prior::Tabulated { norm, .. } => self.raw_moment(a, b, order) / norm,
        }
    }

    fn discrete_moment(&self, a: f64, b: f64, order: u32) -> f64 {
        match self {
            Prior::Discrete { atoms, probs } => atoms
                .iter()
                .zip(probs)
                .filter(|(&x, _)| x > a && x <= b)
                .map(|(&x, &p)| p * pow_u(x, order))
                .sum(),
            _ => 0.0,
        }
    }

    /// Composite Simpson integral of `x^order · pdf(x)` over `[a, b] ∩ [0, hi]`.
    fn raw_moment(&self, a: f64, b: f64, order: u32) -> f64 {
        let Prior::Tabulated { hi, pdf, .. } = self else { return 0.0 };
        let lo = a.max(0.0);
        let up = b.min(*hi);
        if !(up > lo) {
            return 0.0;
        }
        let n = QUADRATURE_PANELS;
        let h = (up - lo) / n as f64;
        let step = *hi / (pdf.len() - 1) as f64;
        let f = |x: f64| -> f64 {
            let pos = (x / step).min((pdf.len() - 1) as f64);
            let i = (pos as usize).min(pdf.len() - 2);
            let t = pos - i as f64;
            let density = pdf[i] * (1.0 - t) + pdf[i + 1] * t;
            density * pow_u(x, order)
        };
        let mut sum = f(lo) + f(up);
        for i in 1..n {
            let x = lo + i as f64 * h;
            sum += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
        }
        sum * h / 3.0
    }

    /// Smallest `x` with `cdf(x) >= p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match self {
            Prior::Exponential { mean } => {
                if p >= 1.0 {
                    f64::INFINITY
                } else {
                    -mean * math::ln(1.0 - p)
                }
            }
            Prior::Discrete { atoms, probs } => {
                let mut order: Vec<usize> = (0..atoms.len()).collect();
                order.sort_by(|&i, &j| atoms[i].total_cmp(&atoms[j]));
                let mut acc = 0.0;
                for &i in &order {
                    acc += probs[i];
                    if acc >= p - 1e-15 {
                        return atoms[i];
                    }
                }
                atoms[order[order.len() - 1]]
            }
            Prior::Tabulated { hi, .. } => {
                let (mut lo, mut up) = (0.0, *hi);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + up);
                    if self.cdf(mid) < p {
                        lo = mid;
                    } else {
                        up = mid;
                    }
                    if up - lo <= 1e-15 * hi {
                        break;
                    }
                }
                up
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        match self {
            Prior::Exponential { mean } => -mean * math::ln(1.0 - u),
            Prior::Discrete { atoms, probs } => {
                let mut acc = 0.0;
                for (a, p) in atoms.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *a;
                    }
                }
                atoms[atoms.len() - 1]
            }
            Prior::Tabulated { .. } => self.quantile(u),
        }
    }
}

fn pow_u(x: f64, order: u32) -> f64 {
    match order {
        0 => 1.0,
        1 => x,
        _ => x * x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_closed_forms() {
        let p = Prior::exponential(2.0).unwrap();
        assert!((p.mass(-1.0, f64::INFINITY) - 1.0).abs() < 1e-15);
        assert!((p.first_moment(0.0, f64::INFINITY) - 2.0).abs() < 1e-14);
        assert!((p.second_moment(0.0, f64::INFINITY) - 8.0).abs() < 1e-13);
        assert!((p.variance() - 4.0).abs() < 1e-13);
        let q = p.quantile(0.5);
        assert!((q - 2.0 * core::f64::consts::LN_2).abs() < 1e-14);
        assert!((p.cdf(q) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tabulated_matches_exponential() {
        let tab = Prior::tabulated(40.0, 8001, |x| math::exp(-x)).unwrap();
        let exp = Prior::exponential(1.0).unwrap();
        for &(a, b) in &[(0.0, 0.5), (0.5, 1.5), (1.5, 6.0)] {
            assert!((tab.mass(a, b) - exp.mass(a, b)).abs() < 1e-6);
            assert!((tab.first_moment(a, b) - exp.first_moment(a, b)).abs() < 1e-6);
        }
        assert!((tab.mean() - 1.0).abs() < 1e-5);
        assert!((tab.quantile(0.5) - core::f64::consts::LN_2).abs() < 1e-5);
    }

    #[test]
    fn discrete_moments() {
        let d = Prior::discrete(vec![0.0, 1.0, 3.0], vec![0.2, 0.5, 0.3]).unwrap();
        assert!((d.mass(-1.0, 0.5) - 0.2).abs() < 1e-15);
        assert!((d.mass(0.0, 1.0) - 0.7).abs() < 1e-15);
        assert!((d.mass(1.0, 3.0) - 0.3).abs() < 1e-15);
        assert!((d.mean() - 1.4).abs() < 1e-15);
        assert_eq!(d.quantile(0.5), 1.0);
        assert!(Prior::discrete(vec![1.0], vec![0.5]).is_err());
    }
}
