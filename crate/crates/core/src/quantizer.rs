//! Scalar codebooks for the channel gains exchanged between transmitters.
//!
//! A gain is quantized to one of `R = 2^N` cells `(u_r, u_{r+1}]` and
//! dequantized to the representative `v_r`. Labels travel over a noisy index
//! channel `π`, so the designs below minimize the end-to-end distortion
//! `Σ_n Σ_r π(r|n) E[(x - v_r)²; x ∈ cell n]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::prior::Prior;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGainQuantizer {
    bounds: Vec<f64>,
    reps: Vec<f64>,
}

impl ScalarGainQuantizer {
    /// `bounds` has `R + 1` entries starting at 0 and ending at `∞`.
    ///
    /// Representatives must be non-decreasing; equal neighbors are allowed
    /// because very noisy label channels legitimately merge them.
    pub fn new(bounds: Vec<f64>, reps: Vec<f64>) -> Result<Self> {
        let r = reps.len();
        if r == 0 || !r.is_power_of_two() {
            return Err(Error::invalid("codebook size must be a power of two"));
        }
        if bounds.len() != r + 1 {
            return Err(Error::DimensionMismatch { what: "codebook bounds", expected: r + 1, found: bounds.len() });
        }
        if bounds[0] != 0.0 || bounds[r] != f64::INFINITY {
            return Err(Error::invalid("codebook bounds must start at 0 and end at infinity"));
        }
        if bounds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("codebook bounds must be strictly ascending"));
        }
        if reps.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || reps.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("representatives must be finite, non-negative and ascending"));
        }
        Ok(ScalarGainQuantizer { bounds, reps })
    }

    pub fn n_bits(&self) -> u32 {
        self.reps.len().trailing_zeros()
    }

    pub fn size(&self) -> usize {
        self.reps.len()
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn reps(&self) -> &[f64] {
        &self.reps
    }

    /// Cell label of `x`; cells are `(u_r, u_{r+1}]` and non-positive inputs fall in cell 0.
    pub fn index_of(&self, x: f64) -> usize {
        let interior = &self.bounds[1..self.size()];
        interior.partition_point(|&u| u < x)
    }

    pub fn representative(&self, index: usize) -> f64 {
        self.reps[index]
    }

    pub fn quantize(&self, x: f64) -> f64 {
        self.reps[self.index_of(x)]
    }
}

/// `pi[n][r]`: probability that label `r` is decoded when label `n` was sent.
#[derive(Debug, Clone, PartialEq)]
pub struct RepTransitionMatrix {
    r: usize,
    pi: Vec<f64>,
}

impl RepTransitionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::invalid("transition matrix must not be empty"));
        }
        let mut pi = Vec::with_capacity(r * r);
        for row in &rows {
            if row.len() != r {
                return Err(Error::DimensionMismatch { what: "transition row", expected: r, found: row.len() });
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::invalid("transition probabilities must lie in [0, 1]"));
            }
            if (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("transition rows must sum to one"));
            }
            pi.extend_from_slice(row);
        }
        Ok(RepTransitionMatrix { r, pi })
    }

    pub fn identity(r: usize) -> Self {
        let mut pi = vec![0.0; r * r];
        for n in 0..r {
            pi[n * r + n] = 1.0;
        }
        RepTransitionMatrix { r, pi }
    }

    /// Rows from label counts; a row that was never exercised becomes the identity row.
    pub fn from_counts(counts: &[Vec<u64>]) -> Result<Self> {
        let r = counts.len();
        let rows = counts
            .iter()
            .enumerate()
            .map(|(n, row)| {
                let total: u64 = row.iter().sum();
                if total == 0 {
                    (0..r).map(|m| if m == n { 1.0 } else { 0.0 }).collect()
                } else {
                    row.iter().map(|&c| c as f64 / total as f64).collect()
                }
            })
            .collect();
        Self::new(rows)
    }

    pub fn size(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn prob(&self, sent: usize, decoded: usize) -> f64 {
        self.pi[sent * self.r + decoded]
    }

    pub fn row(&self, sent: usize) -> &[f64] {
        &self.pi[sent * self.r..(sent + 1) * self.r]
    }
}

/// Per-cell `(mass, first moment, second moment)` of the prior.
fn cell_moments(prior: &Prior, bounds: &[f64]) -> Vec<[f64; 3]> {
    bounds
        .windows(2)
        .enumerate()
        .map(|(n, w)| {
            // the first cell also owns any atom at zero
            let a = if n == 0 { -1.0 } else { w[0] };
            [prior.mass(a, w[1]), prior.first_moment(a, w[1]), prior.second_moment(a, w[1])]
        })
        .collect()
}

fn distortion_from_moments(moments: &[[f64; 3]], reps: &[f64], pi: &RepTransitionMatrix) -> f64 {
    let mut d = 0.0;
    for (n, m) in moments.iter().enumerate() {
        for (r, &v) in reps.iter().enumerate() {
            let p = pi.prob(n, r);
            if p != 0.0 {
                d += p * (m[2] - 2.0 * v * m[1] + v * v * m[0]);
            }
        }
    }
    d.max(0.0)
}

/// End-to-end mean squared error of `q` when labels cross `pi`.
pub fn end_to_end_distortion(q: &ScalarGainQuantizer, prior: &Prior, pi: &RepTransitionMatrix) -> Result<f64> {
    if pi.size() != q.size() {
        return Err(Error::DimensionMismatch { what: "transition matrix", expected: q.size(), found: pi.size() });
    }
    Ok(distortion_from_moments(&cell_moments(prior, &q.bounds), &q.reps, pi))
}

fn codebook_size(n_bits: u32) -> Result<usize> {
    if n_bits > 16 {
        return Err(Error::invalid("gain codebooks are limited to 16 bits"));
    }
    Ok(1usize << n_bits)
}

/// Equal-probability cells with centroid representatives.
pub fn design_meq(prior: &Prior, n_bits: u32) -> Result<ScalarGainQuantizer> {
    let r = codebook_size(n_bits)?;
    let bounds = meq_bounds(prior, r)?;
    let reps = cell_moments(prior, &bounds)
        .iter()
        .map(|m| if m[0] > 0.0 { Ok(m[1] / m[0]) } else { Err(Error::invalid("prior is too concentrated for equal-mass cells")) })
        .collect::<Result<Vec<f64>>>()?;
    ScalarGainQuantizer::new(bounds, reps)
}

fn meq_bounds(prior: &Prior, r: usize) -> Result<Vec<f64>> {
    let mean = prior.mean();
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::invalid("prior must have a positive finite mean"));
    }
    let mut bounds = Vec::with_capacity(r + 1);
    bounds.push(0.0);
    for k in 1..r {
        bounds.push(prior.quantile(k as f64 / r as f64));
    }
    bounds.push(f64::INFINITY);
    if bounds.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("prior is too concentrated for equal-mass cells"));
    }
    Ok(bounds)
}

/// Iteration controls shared by the Lloyd-Max style designs.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydOptions {
    pub max_iter: usize,
    /// Stop once no bound moves by more than this; `None` means `1e-8` times the prior mean.
    pub delta: Option<f64>,
    /// Interior bounds `u_2..u_R` to start from; `None` uses the equal-mass bounds.
    pub init_bounds: Option<Vec<f64>>,
}

impl Default for LloydOptions {
    fn default() -> Self {
        LloydOptions { max_iter: 500, delta: None, init_bounds: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub quantizer: ScalarGainQuantizer,
    pub iterations: usize,
    pub converged: bool,
    /// Bound updates rejected because the update was undefined or broke the ordering.
    pub guard_hits: usize,
    /// End-to-end distortion after every iteration.
    pub distortion_history: Vec<f64>,
}

fn initial_bounds(prior: &Prior, r: usize, opts: &LloydOptions) -> Result<Vec<f64>> {
    if opts.max_iter < 1 {
        return Err(Error::invalid("at least one iteration is required"));
    }
    if let Some(d) = opts.delta {
        if !(d > 0.0) {
            return Err(Error::invalid("delta must be positive"));
        }
    }
    match &opts.init_bounds {
        None => meq_bounds(prior, r),
        Some(inner) => {
            if inner.len() + 1 != r {
                return Err(Error::DimensionMismatch { what: "initial bounds", expected: r - 1, found: inner.len() });
            }
            let mut b = Vec::with_capacity(r + 1);
            b.push(0.0);
            b.extend_from_slice(inner);
            b.push(f64::INFINITY);
            if b.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::invalid("initial bounds must be strictly ascending and positive"));
            }
            Ok(b)
        }
    }
}

/// Lloyd-Max design accounting for the label channel `pi`.
///
/// Representatives are `π`-weighted centroids and each interior bound is the
/// point where the expected distortion of its two neighboring labels is
/// equal. A bound update that is undefined or would leave the bracket formed
/// by its neighbors is skipped for that iteration.
pub fn design_alma(prior: &Prior, n_bits: u32, pi: &RepTransitionMatrix, opts: &LloydOptions) -> Result<DesignReport> {
    let r = codebook_size(n_bits)?;
    if pi.size() != r {
        return Err(Error::DimensionMismatch { what: "transition matrix", expected: r, found: pi.size() });
    }
    let mut bounds = initial_bounds(prior, r, opts)?;
    let delta = opts.delta.unwrap_or(1e-8 * prior.mean());
    let mut moments = cell_moments(prior, &bounds);
    let mut reps: Vec<f64> = moments.iter().map(|m| if m[0] > 0.0 { m[1] / m[0] } else { 0.0 }).collect();
    let mut history = Vec::new();
    let mut guard_hits = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        for (rep_idx, v) in reps.iter_mut().enumerate() {
            let (mut num, mut den) = (0.0, 0.0);
            for (n, m) in moments.iter().enumerate() {
                let p = pi.prob(n, rep_idx);
                num += p * m[1];
                den += p * m[0];
            }
            // a label that is never decoded keeps its representative
            if den > 0.0 {
                *v = num / den;
            }
        }
        let mut movement = 0.0f64;
        for b in 1..r {
            let (mut num, mut den) = (0.0, 0.0);
            for (n, &v) in reps.iter().enumerate() {
                let d = pi.prob(b, n) - pi.prob(b - 1, n);
                num += d * v * v;
                den += d * v;
            }
            let candidate = num / (2.0 * den);
            if den.abs() < 1e-12 || !(candidate > bounds[b - 1] && candidate < bounds[b + 1]) {
                guard_hits += 1;
                continue;
            }
            movement = movement.max((candidate - bounds[b]).abs());
            bounds[b] = candidate;
        }
        moments = cell_moments(prior, &bounds);
        history.push(distortion_from_moments(&moments, &reps, pi));
        if movement <= delta {
            converged = true;
            break;
        }
    }
    reps = sort_reps(reps);
    Ok(DesignReport {
        quantizer: ScalarGainQuantizer::new(bounds, reps)?,
        iterations,
        converged,
        guard_hits,
        distortion_history: history,
    })
}

fn sort_reps(mut reps: Vec<f64>) -> Vec<f64> {
    // π-weighted centroids are ordered for any sensible channel; guard against roundoff
    for k in 1..reps.len() {
        if reps[k] < reps[k - 1] {
            reps[k] = reps[k - 1];
        }
    }
    reps
}

/// Classical Lloyd-Max design: centroid representatives, midpoint bounds.
pub fn design_lma(prior: &Prior, n_bits: u32, opts: &LloydOptions) -> Result<DesignReport> {
    let r = codebook_size(n_bits)?;
    let mut bounds = initial_bounds(prior, r, opts)?;
    let delta = opts.delta.unwrap_or(1e-8 * prior.mean());
    let identity = RepTransitionMatrix::identity(r);
    let mut reps = vec![0.0; r];
    let mut history = Vec::new();
    let mut guard_hits = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let moments = cell_moments(prior, &bounds);
        for (v, m) in reps.iter_mut().zip(&moments) {
            if m[0] > 0.0 {
                *v = m[1] / m[0];
            }
        }
        let mut movement = 0.0f64;
        for b in 1..r {
            let mid = 0.5 * (reps[b - 1] + reps[b]);
            if !(mid > bounds[b - 1] && mid < bounds[b + 1]) {
                guard_hits += 1;
                continue;
            }
            movement = movement.max((mid - bounds[b]).abs());
            bounds[b] = mid;
        }
        history.push(distortion_from_moments(&cell_moments(prior, &bounds), &reps, &identity));
        if movement <= delta {
            converged = true;
            break;
        }
    }
    reps = sort_reps(reps);
    Ok(DesignReport {
        quantizer: ScalarGainQuantizer::new(bounds, reps)?,
        iterations,
        converged,
        guard_hits,
        distortion_history: history,
    })
}

/// Largest violation of the centroid and bound conditions for `q` under `pi`.
pub fn fixed_point_residual(q: &ScalarGainQuantizer, prior: &Prior, pi: &RepTransitionMatrix) -> f64 {
    let moments = cell_moments(prior, &q.bounds);
    let mut worst = 0.0f64;
    for (r, &v) in q.reps.iter().enumerate() {
        let (mut num, mut den) = (0.0, 0.0);
        for (n, m) in moments.iter().enumerate() {
            num += pi.prob(n, r) * m[1];
            den += pi.prob(n, r) * m[0];
        }
        if den > 0.0 {
            worst = worst.max((num / den - v).abs());
        }
    }
    for b in 1..q.size() {
        let (mut num, mut den) = (0.0, 0.0);
        for (n, &v) in q.reps.iter().enumerate() {
            let d = pi.prob(b, n) - pi.prob(b - 1, n);
            num += d * v * v;
            den += d * v;
        }
        if den.abs() >= 1e-12 {
            worst = worst.max((num / (2.0 * den) - q.bounds[b]).abs());
        }
    }
    worst
}
