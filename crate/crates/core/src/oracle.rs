//! Brute-force numerical oracles over product states and subspace vectors.
//!
//! The product-state oracles extremize `‖P(x⊗y)‖² = ⟨x⊗y, P(x⊗y)⟩` by
//! alternating eigen-steps: with `y` fixed the objective is a Hermitian
//! quadratic form in `x`, so the optimal `x` is an extreme eigenvector of the
//! partial contraction of `P` with `|y⟩⟨y|`, and vice versa. Each half-step is
//! globally optimal for its block, so the objective is monotone per restart.
//! Restarts are independent, seeded `seed ^ restart`, and merged by max/min,
//! so results do not depend on thread scheduling.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::sum_representation_basis;
use crate::entropy::{renyi_entropy, RenyiOrder};
use crate::error::{ensure, Error, Result};
use crate::tensor::{extreme_eigenpair, hermitian_eigenvalues, max_abs, projector, SubspaceBasis, TensorVector};

const PROJECTOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Relative-change stopping threshold.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { restarts: 64, max_iterations: 500, tolerance: 1e-10, seed: 0 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.restarts >= 1, Argument, "restarts must be positive");
        ensure!(self.max_iterations >= 1, Argument, "max iterations must be positive");
        ensure!(
            self.tolerance.is_finite() && self.tolerance > 0.0,
            Argument,
            "tolerance must be positive, got {}",
            self.tolerance
        );
        Ok(())
    }

    fn rng(&self, restart: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ restart as u64)
    }
}

/// Which side of the true extremum the reported value sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundDirection {
    /// Value of an attained point, so at most the true supremum.
    LowerBoundOnSupremum,
    /// Value of an attained point, so at least the true infimum.
    UpperBoundOnInfimum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleEstimate {
    pub value: f64,
    pub best_witness: TensorVector,
    pub restarts_converged: usize,
    /// Total iterations summed over restarts.
    pub iterations_used: usize,
    pub bound: BoundDirection,
    /// Gap between the best restart and the best-quartile restart; a proxy
    /// for how reliably the restarts agree on the extremum.
    pub spread: f64,
}

struct RestartOutcome {
    value: f64,
    witness: TensorVector,
    converged: bool,
    iterations: usize,
}

fn merge(mut outcomes: Vec<RestartOutcome>, maximize: bool) -> OracleEstimate {
    let bound = if maximize { BoundDirection::LowerBoundOnSupremum } else { BoundDirection::UpperBoundOnInfimum };
    let restarts_converged = outcomes.iter().filter(|o| o.converged).count();
    let iterations_used = outcomes.iter().map(|o| o.iterations).sum();
    // stable sort keeps restart order among ties
    outcomes.sort_by(|a, b| if maximize { b.value.total_cmp(&a.value) } else { a.value.total_cmp(&b.value) });
    let quartile = outcomes.len().div_ceil(4) - 1;
    let spread = (outcomes[0].value - outcomes[quartile].value).abs();
    let best = outcomes.swap_remove(0);
    OracleEstimate { value: best.value, best_witness: best.witness, restarts_converged, iterations_used, bound, spread }
}

/// Checks that `p` is a Hermitian idempotent over `dims.0 * dims.1`.
pub fn check_projector(p: &DMatrix<C64>, dims: (usize, usize)) -> Result<()> {
    let n = dims.0 * dims.1;
    ensure!(dims.0 >= 1 && dims.1 >= 1, Argument, "factor dimensions must be positive");
    ensure!(p.nrows() == n && p.ncols() == n, Argument, "projector is {}x{}, expected {n}x{n}", p.nrows(), p.ncols());
    let herm = max_abs(&(p - p.adjoint()));
    ensure!(herm <= PROJECTOR_TOL, Domain, "operator is not Hermitian (residual {herm:e})");
    let idem = max_abs(&(p * p - p));
    ensure!(idem <= PROJECTOR_TOL, Domain, "operator is not idempotent (residual {idem:e})");
    Ok(())
}

/// `A_y[i,i'] = Σ_{j,j'} ȳ_j P[(i,j),(i',j')] y_{j'}`.
fn contract_right(p: &DMatrix<C64>, (da, db): (usize, usize), y: &[C64]) -> DMatrix<C64> {
    DMatrix::from_fn(da, da, |i, k| {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..db {
            let row = i * db + j;
            let mut inner = C64::new(0.0, 0.0);
            for l in 0..db {
                inner += p[(row, k * db + l)] * y[l];
            }
            acc += y[j].conj() * inner;
        }
        acc
    })
}

/// `B_x[j,j'] = Σ_{i,i'} x̄_i P[(i,j),(i',j')] x_{i'}`.
fn contract_left(p: &DMatrix<C64>, (da, db): (usize, usize), x: &[C64]) -> DMatrix<C64> {
    DMatrix::from_fn(db, db, |j, l| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..da {
            let mut inner = C64::new(0.0, 0.0);
            for k in 0..da {
                inner += p[(i * db + j, k * db + l)] * x[k];
            }
            acc += x[i].conj() * inner;
        }
        acc
    })
}

/// `⟨x⊗y, P(x⊗y)⟩` for unit `x`, `y`.
pub fn product_overlap(p: &DMatrix<C64>, dims: (usize, usize), x: &[C64], y: &[C64]) -> f64 {
    let a = contract_right(p, dims, y);
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..dims.0 {
        for k in 0..dims.0 {
            acc += x[i].conj() * a[(i, k)] * x[k];
        }
    }
    acc.re
}

/// Objective values of one alternating run from `(x0, y0)`: entry 0 is the
/// starting value, entry `k` the value after the `k`-th full alternation.
pub fn alternating_trace(
    p: &DMatrix<C64>,
    dims: (usize, usize),
    x0: &TensorVector,
    y0: &TensorVector,
    steps: usize,
    maximize: bool,
) -> Vec<f64> {
    let mut x = x0.coefficients().to_vec();
    let mut y = y0.coefficients().to_vec();
    let mut trace = vec![product_overlap(p, dims, &x, &y)];
    for _ in 0..steps {
        let (_, nx) = extreme_eigenpair(contract_right(p, dims, &y), maximize);
        x = nx;
        let (val, ny) = extreme_eigenpair(contract_left(p, dims, &x), maximize);
        y = ny;
        trace.push(val);
    }
    trace
}

fn alternate(
    p: &DMatrix<C64>,
    dims: (usize, usize),
    cfg: &OracleConfig,
    restart: usize,
    maximize: bool,
) -> RestartOutcome {
    let mut rng = cfg.rng(restart);
    let x0 = TensorVector::random_unit(&[dims.0], &mut rng);
    let y0 = TensorVector::random_unit(&[dims.1], &mut rng);
    let mut y = y0.coefficients().to_vec();
    let mut x = x0.coefficients().to_vec();
    let mut value = product_overlap(p, dims, &x, &y);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let (_, nx) = extreme_eigenpair(contract_right(p, dims, &y), maximize);
        let (next, ny) = extreme_eigenpair(contract_left(p, dims, &nx), maximize);
        x = nx;
        y = ny;
        let delta = (next - value).abs();
        value = next;
        if delta <= cfg.tolerance * value.abs() || delta <= f64::EPSILON * 4.0 {
            converged = true;
            break;
        }
    }
    let witness = TensorVector::new(x, vec![dims.0])
        .and_then(|xv| Ok(xv.kron(&TensorVector::new(y, vec![dims.1])?)))
        .and_then(|w| w.normalized())
        .expect("eigenvectors are unit vectors of the right size");
    RestartOutcome { value: value.clamp(0.0, 1.0), witness, converged, iterations }
}

fn product_extremum(
    p: &DMatrix<C64>,
    dims: (usize, usize),
    cfg: &OracleConfig,
    maximize: bool,
) -> Result<OracleEstimate> {
    cfg.validate()?;
    check_projector(p, dims)?;
    let outcomes: Vec<RestartOutcome> =
        (0..cfg.restarts).into_par_iter().map(|r| alternate(p, dims, cfg, r, maximize)).collect();
    Ok(merge(outcomes, maximize))
}

/// Estimate of `sup ‖P(x⊗y)‖²` over unit product vectors; the value is
/// attained, so it never exceeds the true supremum.
pub fn max_product_overlap(p: &DMatrix<C64>, dims: (usize, usize), cfg: &OracleConfig) -> Result<OracleEstimate> {
    product_extremum(p, dims, cfg, true)
}

/// Estimate of `inf ‖P(x⊗y)‖²`; never below the true infimum.
pub fn min_product_overlap(p: &DMatrix<C64>, dims: (usize, usize), cfg: &OracleConfig) -> Result<OracleEstimate> {
    product_extremum(p, dims, cfg, false)
}

/// `M_d`: infimum of `‖P_L(x⊗y)‖²` with `L` spanned by the normalized
/// anti-diagonals.
pub fn estimate_md(d: usize, cfg: &OracleConfig) -> Result<OracleEstimate> {
    let basis = sum_representation_basis(d)?;
    min_product_overlap(&projector(&basis), (d, d), cfg)
}

fn bipartite_dims(w: &SubspaceBasis) -> Result<(usize, usize)> {
    match w.ambient_dims() {
        &[a, b] => Ok((a, b)),
        other => Err(Error::Argument(format!("expected a bipartite subspace, got dims {other:?}"))),
    }
}

/// Largest `μ₁²` over unit vectors of `W`. Since
/// `sup_{ξ∈W} |⟨ξ, x⊗y⟩|² = ‖P_W(x⊗y)‖²`, this is the product-overlap
/// supremum of the projector onto `W`.
pub fn max_schmidt_in_subspace(w: &SubspaceBasis, cfg: &OracleConfig) -> Result<OracleEstimate> {
    let dims = bipartite_dims(w)?;
    ensure!(w.dim() > 0, Argument, "empty subspace");
    max_product_overlap(&projector(w), dims, cfg)
}

/// Each basis vector of `W` reshaped to a `dims.0 × dims.1` matrix.
fn basis_matrices(w: &SubspaceBasis, dims: (usize, usize)) -> Vec<DMatrix<C64>> {
    w.vectors().iter().map(|v| DMatrix::from_fn(dims.0, dims.1, |i, j| v.coefficients()[i * dims.1 + j])).collect()
}

/// Rényi entropy of `M M† / Tr(M M†)`, the first-factor reduction of the
/// vector whose matricization is `m`.
fn output_entropy(m: &DMatrix<C64>, p: RenyiOrder) -> f64 {
    let rho = m * m.adjoint();
    let tr = rho.trace().re;
    let spectrum: Vec<f64> = hermitian_eigenvalues(&rho).into_iter().map(|l| (l / tr).max(0.0)).collect();
    let total: f64 = spectrum.iter().sum();
    let spectrum: Vec<f64> = spectrum.into_iter().map(|l| l / total).collect();
    renyi_entropy(&spectrum, p).expect("normalized spectrum")
}

fn combine_matrices(mats: &[DMatrix<C64>], c: &[C64]) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(mats[0].nrows(), mats[0].ncols());
    for (ck, wk) in c.iter().zip(mats) {
        m += wk * *ck;
    }
    m
}

const SEARCH_INITIAL_STEP: f64 = 0.1;
const SEARCH_STEP_FLOOR: f64 = 1e-8;

fn entropy_descent(
    mats: &[DMatrix<C64>],
    p: RenyiOrder,
    cfg: &OracleConfig,
    restart: usize,
) -> (Vec<C64>, f64, bool, usize) {
    let mut rng = cfg.rng(restart);
    let mut c = TensorVector::random_unit(&[mats.len()], &mut rng).coefficients().to_vec();
    let mut m = combine_matrices(mats, &c);
    let mut value = output_entropy(&m, p);
    let mut step = SEARCH_INITIAL_STEP;
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < cfg.max_iterations {
        sweeps += 1;
        let mut improved = false;
        for coord in 0..2 * c.len() {
            let unit = if coord % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) };
            for sign in [1.0, -1.0] {
                let delta = unit * (sign * step);
                let mut trial = m.clone();
                trial += &mats[coord / 2] * delta;
                let v = output_entropy(&trial, p);
                if v < value {
                    value = v;
                    c[coord / 2] += delta;
                    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    c.iter_mut().for_each(|z| *z /= norm);
                    m = trial.unscale(norm);
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < SEARCH_STEP_FLOOR {
                converged = true;
                break;
            }
        }
    }
    (c, value, converged, sweeps)
}

/// Upper estimate of `min_{w ∈ W, ‖w‖=1} S_p(Tr_E |w⟩⟨w|)`, the minimum
/// output entropy of the channel whose Stinespring range is `W`.
///
/// Derivative-free: each restart starts at a random unit coefficient vector
/// and perturbs the `2·dim W` real coordinates by `±step`, keeping strict
/// improvements and halving the step after a sweep without one.
pub fn min_output_entropy_search(w: &SubspaceBasis, p: RenyiOrder, cfg: &OracleConfig) -> Result<OracleEstimate> {
    cfg.validate()?;
    let dims = bipartite_dims(w)?;
    ensure!(w.dim() > 0, Argument, "empty subspace");
    let mats = basis_matrices(w, dims);
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let (c, value, converged, iterations) = entropy_descent(&mats, p, cfg, r);
            let witness = w.combine(&c).expect("coefficient count matches the basis");
            RestartOutcome { value, witness, converged, iterations }
        })
        .collect();
    Ok(merge(outcomes, false))
}
