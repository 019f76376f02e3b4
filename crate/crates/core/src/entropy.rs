//! Rényi entropies (in bits) and the closed-form entropy bounds derived from
//! the largest Schmidt coefficient.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

const SPECTRUM_SUM_TOL: f64 = 1e-9;
const CLAMP_TOL: f64 = 1e-12;

/// Rényi order `p > 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub fn new(p: f64) -> Result<Self> {
        ensure!(p.is_finite() && p > 1.0, Argument, "Renyi order must be finite and > 1, got {p}");
        Ok(Self(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RenyiOrder {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<RenyiOrder> for f64 {
    fn from(p: RenyiOrder) -> f64 {
        p.0
    }
}

/// `C` bounds the single-copy minimum output entropy from below and `c` the
/// two-copy one from above; additivity breaks when `c < 2C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyBoundPair {
    #[serde(rename = "C")]
    pub lower_single: f64,
    #[serde(rename = "c")]
    pub upper_double: f64,
}

impl EntropyBoundPair {
    pub fn new(lower_single: f64, upper_double: f64) -> Result<Self> {
        ensure!(
            lower_single.is_finite() && lower_single >= 0.0 && upper_double.is_finite() && upper_double >= 0.0,
            Domain,
            "entropy bounds must be finite and non-negative (C = {lower_single}, c = {upper_double})"
        );
        Ok(Self { lower_single, upper_double })
    }

    pub fn margin(&self) -> f64 {
        2.0 * self.lower_single - self.upper_double
    }

    pub fn breaks(&self) -> bool {
        self.upper_double < 2.0 * self.lower_single
    }
}

/// `S_p = log₂(Σ λᵢᵖ) / (1 − p)`. Entries in `[−1e-12, 0)` are clamped to zero.
pub fn renyi_entropy(spectrum: &[f64], p: RenyiOrder) -> Result<f64> {
    ensure!(!spectrum.is_empty(), Domain, "empty spectrum");
    ensure!(
        spectrum.iter().all(|&x| x.is_finite() && x >= -CLAMP_TOL),
        Domain,
        "spectrum has negative or non-finite entries"
    );
    let total: f64 = spectrum.iter().sum();
    ensure!((total - 1.0).abs() <= SPECTRUM_SUM_TOL, Domain, "spectrum sums to {total}, not 1");
    let p = p.value();
    let power_sum: f64 = spectrum.iter().map(|&x| x.max(0.0).powf(p)).sum();
    // Pure states give log2(1) = 0; avoid printing -0.
    Ok((power_sum.log2() / (1.0 - p)).max(0.0))
}

/// Upper bound `(p/(1−p))·log₂ μ₁²` on the Rényi entropy of a
/// reduced state whose largest eigenvalue is `mu1sq`.
pub fn entropy_upper_from_mu1(mu1sq: f64, p: RenyiOrder) -> Result<f64> {
    ensure!(mu1sq > 0.0 && mu1sq <= 1.0, Domain, "mu1^2 must lie in (0, 1], got {mu1sq}");
    let p = p.value();
    Ok((p / (1.0 - p) * mu1sq.log2()).max(0.0))
}

/// Lower bound on the output entropy of every vector whose largest squared
/// Schmidt coefficient is at most `a`: the entropy of the two-point spectrum
/// `(a, 1−a)`, which majorizes every such reduced spectrum.
pub fn lower_bound_c(a: f64, p: RenyiOrder) -> Result<f64> {
    ensure!(a > 0.0 && a < 1.0, Domain, "A must lie in (0, 1), got {a}");
    let q = p.value();
    Ok(((1.0 - a).powf(q) + a.powf(q)).log2() / (1.0 - q))
}

/// The extremal spectrum `(max{A,1−A}, min{A,1−A}, 0, …)` of length `len`.
pub fn two_point_spectrum(a: f64, len: usize) -> Vec<f64> {
    let mut v = vec![0.0; len.max(2)];
    v[0] = a.max(1.0 - a);
    v[1] = a.min(1.0 - a);
    v
}
