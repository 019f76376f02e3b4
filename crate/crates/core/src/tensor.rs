//! Dense complex linear algebra over finite tensor products.
//!
//! Vectors are stored row-major over the factor order: for dims `[d0, d1, d2]`
//! the coefficient of `e_i ⊗ e_j ⊗ e_k` sits at `(i * d1 + j) * d2 + k`. Every
//! reshaping in this module (Schmidt matrixization, partial traces, factor
//! permutations) uses that single convention.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Tolerance for "unit vector" preconditions.
pub const UNIT_TOL: f64 = 1e-12;
/// Pairwise inner-product tolerance for orthonormal families and the
/// Gram–Schmidt drop threshold.
pub const ORTHO_TOL: f64 = 1e-10;
/// Hermiticity tolerance for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace and positivity tolerance for density matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Singular values below this fraction of the largest are reported as zero.
pub const SCHMIDT_ZERO_REL: f64 = 1e-12;

/// Complex coefficient vector over `C^{d0} ⊗ C^{d1} ⊗ ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorVector {
    coefficients: Vec<C64>,
    dims: Vec<usize>,
}

impl TensorVector {
    pub fn new(coefficients: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        ensure!(!dims.is_empty(), Argument, "tensor vector needs at least one factor");
        ensure!(dims.iter().all(|&d| d >= 1), Argument, "factor dimensions must be >= 1, got {dims:?}");
        let len: usize = dims.iter().product();
        ensure!(
            coefficients.len() == len,
            Argument,
            "coefficient length {} does not match dims {:?} (product {len})",
            coefficients.len(),
            dims
        );
        ensure!(
            coefficients.iter().all(|c| c.re.is_finite() && c.im.is_finite()),
            Domain,
            "coefficients must be finite"
        );
        Ok(Self { coefficients, dims })
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let len = dims.iter().product();
        Self { coefficients: vec![C64::new(0.0, 0.0); len], dims: dims.to_vec() }
    }

    /// Standard basis vector `e_{i0} ⊗ e_{i1} ⊗ ...`.
    pub fn basis(dims: &[usize], indices: &[usize]) -> Result<Self> {
        ensure!(dims.len() == indices.len(), Argument, "{} indices for {} factors", indices.len(), dims.len());
        let mut v = Self::zeros(dims);
        let mut flat = 0;
        for (&i, &d) in indices.iter().zip(dims) {
            ensure!(i < d, Argument, "index {i} out of range for factor of dimension {d}");
            flat = flat * d + i;
        }
        v.coefficients[flat] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_real(values: &[f64], dims: Vec<usize>) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect(), dims)
    }

    /// Unit vector drawn from the rotation-invariant distribution
    /// (normalized independent complex Gaussians).
    pub fn random_unit<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Self {
        let len: usize = dims.iter().product();
        loop {
            let coefficients: Vec<C64> =
                (0..len).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
            let v = Self { coefficients, dims: dims.to_vec() };
            if let Ok(u) = v.normalized() {
                return u;
            }
        }
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        ensure!(n > 0.0 && n.is_finite(), Domain, "cannot normalize a zero vector");
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { coefficients: self.coefficients.iter().map(|&c| c * s).collect(), dims: self.dims.clone() }
    }

    pub fn conj(&self) -> Self {
        Self { coefficients: self.coefficients.iter().map(|c| c.conj()).collect(), dims: self.dims.clone() }
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_same_dims(other)?;
        Ok(self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a.conj() * b).sum())
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: C64, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(Self {
            coefficients: self.coefficients.iter().zip(&other.coefficients).map(|(&a, &b)| a + s * b).collect(),
            dims: self.dims.clone(),
        })
    }

    /// Tensor product `self ⊗ other`; factor lists are concatenated.
    pub fn kron(&self, other: &Self) -> Self {
        let mut coefficients = Vec::with_capacity(self.len() * other.len());
        for &a in &self.coefficients {
            coefficients.extend(other.coefficients.iter().map(|&b| a * b));
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { coefficients, dims }
    }

    /// Reinterprets the factor structure without touching the coefficients.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        Self::new(self.coefficients.clone(), dims)
    }

    /// Regroup all factors into a single one.
    pub fn flattened(&self) -> Self {
        Self { coefficients: self.coefficients.clone(), dims: vec![self.len()] }
    }

    /// Permutes tensor factors: factor `order[k]` of `self` becomes factor `k`
    /// of the result.
    pub fn permute_factors(&self, order: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        ensure!(order.len() == n, Argument, "permutation of length {} for {n} factors", order.len());
        let mut seen = vec![false; n];
        for &o in order {
            ensure!(o < n && !seen[o], Argument, "{order:?} is not a permutation of 0..{n}");
            seen[o] = true;
        }
        let new_dims: Vec<usize> = order.iter().map(|&o| self.dims[o]).collect();
        let old_strides = strides(&self.dims);
        let mut coefficients = Vec::with_capacity(self.len());
        let mut idx = vec![0usize; n];
        for _ in 0..self.len() {
            let src: usize = idx.iter().zip(order).map(|(&i, &o)| i * old_strides[o]).sum();
            coefficients.push(self.coefficients[src]);
            // odometer increment over new_dims, last factor fastest
            for k in (0..n).rev() {
                idx[k] += 1;
                if idx[k] < new_dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(Self { coefficients, dims: new_dims })
    }

    /// Left×right matrix reshaping with the first `split` factors as rows.
    pub fn matricize(&self, split: usize) -> Result<DMatrix<C64>> {
        ensure!(
            split >= 1 && split < self.dims.len(),
            Argument,
            "split {split} must separate {} factors into two nonempty groups",
            self.dims.len()
        );
        let rows: usize = self.dims[..split].iter().product();
        let cols: usize = self.dims[split..].iter().product();
        Ok(DMatrix::from_row_slice(rows, cols, &self.coefficients))
    }

    pub fn as_column(&self) -> DMatrix<C64> {
        DMatrix::from_column_slice(self.len(), 1, &self.coefficients)
    }

    fn check_same_dims(&self, other: &Self) -> Result<()> {
        ensure!(self.dims == other.dims, Argument, "dimension mismatch: {:?} vs {:?}", self.dims, other.dims);
        Ok(())
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Hermitian, positive semi-definite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        ensure!(entries.is_square(), Argument, "density matrix must be square");
        ensure!(entries.nrows() > 0, Argument, "density matrix must be nonempty");
        let herm_err = max_abs(&(&entries - entries.adjoint()));
        ensure!(herm_err <= HERMITIAN_TOL, Domain, "matrix is not Hermitian (residual {herm_err:e})");
        let entries = hermitian_part(&entries);
        let tr = entries.trace();
        ensure!((tr.re - 1.0).abs() <= STATE_TOL && tr.im.abs() <= STATE_TOL, Domain, "trace {tr} differs from 1");
        let rho = Self { entries };
        let min_eig = rho.eigenvalues().last().copied().unwrap_or(0.0);
        ensure!(min_eig >= -STATE_TOL, Domain, "negative eigenvalue {min_eig:e}");
        Ok(rho)
    }

    /// Maximally mixed state `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0) }
    }

    /// `|v⟩⟨v|` for a unit vector `v`.
    pub fn pure(v: &TensorVector) -> Result<Self> {
        ensure!(v.is_unit(), Domain, "pure state requires a unit vector (norm {})", v.norm());
        let col = v.as_column();
        Ok(Self { entries: hermitian_part(&(&col * col.adjoint())) })
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Eigenvalues sorted non-increasing.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenvalues of a Hermitian matrix, sorted non-increasing.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Extreme eigenpair of a Hermitian matrix: the largest eigenvalue when
/// `top` is set, otherwise the smallest.
pub(crate) fn extreme_eigenpair(m: DMatrix<C64>, top: bool) -> (f64, Vec<C64>) {
    let eig = SymmetricEigen::new(m);
    let vals = &eig.eigenvalues;
    let mut best = 0;
    for k in 1..vals.len() {
        let better = if top { vals[k] > vals[best] } else { vals[k] < vals[best] };
        if better {
            best = k;
        }
    }
    (vals[best], eig.eigenvectors.column(best).iter().copied().collect())
}

/// Schmidt coefficients across a bipartition, sorted non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    coefficients: Vec<f64>,
    left_dim: usize,
    right_dim: usize,
}

impl SchmidtSpectrum {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn left_dim(&self) -> usize {
        self.left_dim
    }

    pub fn right_dim(&self) -> usize {
        self.right_dim
    }

    /// Largest coefficient μ₁.
    pub fn mu1(&self) -> f64 {
        self.coefficients[0]
    }

    /// μ₁².
    pub fn mu1_sq(&self) -> f64 {
        self.mu1() * self.mu1()
    }

    /// Squared coefficients, i.e. the spectrum of either reduced state.
    pub fn squared(&self) -> Vec<f64> {
        self.coefficients.iter().map(|m| m * m).collect()
    }

    /// Number of nonzero coefficients.
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&m| m > 0.0).count()
    }
}

/// Schmidt decomposition of `v` with the first `split` factors on the left.
pub fn schmidt(v: &TensorVector, split: usize) -> Result<SchmidtSpectrum> {
    let m = v.matricize(split)?;
    ensure!(v.norm_sqr() > 0.0, Domain, "Schmidt decomposition of the zero vector");
    let (left_dim, right_dim) = (m.nrows(), m.ncols());
    let mut coefficients: Vec<f64> = m.singular_values().iter().copied().collect();
    coefficients.sort_by(|a, b| b.total_cmp(a));
    let cutoff = SCHMIDT_ZERO_REL * coefficients[0];
    for c in coefficients.iter_mut() {
        if *c < cutoff {
            *c = 0.0;
        }
    }
    Ok(SchmidtSpectrum { coefficients, left_dim, right_dim })
}

/// Reduced state of `|v⟩⟨v|` on the factors listed in `keep` (in that order);
/// all other factors are traced out.
pub fn partial_trace_env(v: &TensorVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = v.dims().len();
    ensure!(!keep.is_empty() && keep.len() < n, Argument, "keep must be a nonempty proper subset of {n} factors");
    let mut seen = vec![false; n];
    for &k in keep {
        ensure!(k < n && !seen[k], Argument, "invalid factor list {keep:?}");
        seen[k] = true;
    }
    ensure!(v.is_unit(), Domain, "partial trace requires a unit vector (norm {})", v.norm());
    let order: Vec<usize> = keep.iter().copied().chain((0..n).filter(|k| !seen[*k])).collect();
    let m = v.permute_factors(&order)?.matricize(keep.len())?;
    DensityMatrix::new(hermitian_part(&(&m * m.adjoint())))
}

/// Swaps the second and third factors of a four-factor vector:
/// `k₁⊗f₁⊗k₂⊗f₂ ↦ k₁⊗k₂⊗f₁⊗f₂`, turning the `K₁E₁ : K₂E₂` cut into
/// `K₁K₂ : E₁E₂`.
pub fn reshuffle_eta(v: &TensorVector) -> Result<TensorVector> {
    ensure!(v.dims().len() == 4, Argument, "reshuffle needs exactly 4 factors, got {}", v.dims().len());
    v.permute_factors(&[0, 2, 1, 3])
}

/// Orthonormal family spanning a subspace of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceBasis {
    vectors: Vec<TensorVector>,
    ambient_dims: Vec<usize>,
}

impl SubspaceBasis {
    /// Validates orthonormality to [`ORTHO_TOL`].
    pub fn new(vectors: Vec<TensorVector>, ambient_dims: Vec<usize>) -> Result<Self> {
        for v in &vectors {
            ensure!(
                v.dims() == ambient_dims.as_slice(),
                Argument,
                "basis vector dims {:?} differ from ambient {:?}",
                v.dims(),
                ambient_dims
            );
        }
        let ambient: usize = ambient_dims.iter().product();
        ensure!(vectors.len() <= ambient, Domain, "{} vectors exceed ambient dimension {ambient}", vectors.len());
        let residual = orthonormality_residual(&vectors);
        ensure!(residual <= ORTHO_TOL, Domain, "family is not orthonormal (residual {residual:e})");
        Ok(Self { vectors, ambient_dims })
    }

    pub(crate) fn from_orthonormal(vectors: Vec<TensorVector>, ambient_dims: Vec<usize>) -> Self {
        debug_assert!(orthonormality_residual(&vectors) <= ORTHO_TOL);
        Self { vectors, ambient_dims }
    }

    pub fn vectors(&self) -> &[TensorVector] {
        &self.vectors
    }

    pub fn ambient_dims(&self) -> &[usize] {
        &self.ambient_dims
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dims.iter().product()
    }

    /// `max |⟨v_i, v_j⟩ − δ_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        orthonormality_residual(&self.vectors)
    }

    /// Unit vector `Σ c_i v_i / ‖c‖` in the span.
    pub fn combine(&self, coefficients: &[C64]) -> Result<TensorVector> {
        ensure!(
            coefficients.len() == self.dim(),
            Argument,
            "{} coefficients for a {}-dimensional subspace",
            coefficients.len(),
            self.dim()
        );
        let mut out = TensorVector::zeros(&self.ambient_dims);
        for (c, v) in coefficients.iter().zip(&self.vectors) {
            for (o, x) in out.coefficients.iter_mut().zip(v.coefficients()) {
                *o += c * x;
            }
        }
        out.normalized()
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> Result<SubspaceBasis> {
        let ambient = self.ambient_dim();
        let mut residuals = Vec::with_capacity(ambient);
        for k in 0..ambient {
            let mut e = TensorVector::zeros(&self.ambient_dims);
            e.coefficients[k] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for w in &self.vectors {
                    let c = w.inner(&e)?;
                    e = e.axpy(-c, w)?;
                }
            }
            residuals.push(e);
        }
        if self.dim() == ambient {
            return Ok(SubspaceBasis { vectors: Vec::new(), ambient_dims: self.ambient_dims.clone() });
        }
        let (basis, _) = orthonormalize(&residuals)?;
        Ok(basis)
    }
}

fn orthonormality_residual(vectors: &[TensorVector]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate().skip(i) {
            let g = a.inner(b).unwrap_or(C64::new(f64::INFINITY, 0.0));
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}

/// Gram–Schmidt with column pivoting: at each step the remaining vector with
/// the largest residual is taken. Residuals below `ORTHO_TOL` times the
/// largest input norm are dropped. Returns the basis and its rank.
pub fn orthonormalize(vs: &[TensorVector]) -> Result<(SubspaceBasis, usize)> {
    ensure!(!vs.is_empty(), Argument, "cannot orthonormalize an empty family");
    let dims = vs[0].dims().to_vec();
    for v in vs {
        ensure!(v.dims() == dims.as_slice(), Argument, "mixed dims {:?} and {:?}", v.dims(), dims);
    }
    let scale = vs.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let mut rest: Vec<TensorVector> = vs.to_vec();
    let mut basis: Vec<TensorVector> = Vec::new();
    let ambient: usize = dims.iter().product();
    while !rest.is_empty() && basis.len() < ambient {
        let (pivot, best) =
            rest.iter().enumerate().map(|(i, v)| (i, v.norm())).max_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty");
        if scale == 0.0 || best <= ORTHO_TOL * scale {
            break;
        }
        let mut q = rest.swap_remove(pivot);
        // second pass restores orthogonality lost to cancellation
        for w in &basis {
            let c = w.inner(&q)?;
            q = q.axpy(-c, w)?;
        }
        let q = q.normalized()?;
        for r in rest.iter_mut() {
            let c = q.inner(r)?;
            *r = r.axpy(-c, &q)?;
        }
        basis.push(q);
    }
    let rank = basis.len();
    Ok((SubspaceBasis::from_orthonormal(basis, dims), rank))
}

/// Orthogonal projector `Σ |w_i⟩⟨w_i|` onto the span of `basis`.
pub fn projector(basis: &SubspaceBasis) -> DMatrix<C64> {
    let n = basis.ambient_dim();
    let mut p = DMatrix::<C64>::zeros(n, n);
    for w in basis.vectors() {
        let c = w.as_column();
        p += &c * c.adjoint();
    }
    p
}

/// `(Σ_i w_i ⊗ w̄_i)/√dim W` over the doubled factor list. For a real basis
/// this is `Σ_i w_i ⊗ w_i/√dim W`; in general it is the basis-independent
/// maximally entangled vector of `W ⊗ W̄`.
pub fn maximally_entangled(basis: &SubspaceBasis) -> Result<TensorVector> {
    ensure!(basis.dim() > 0, Argument, "maximally entangled vector of an empty basis");
    let mut dims = basis.ambient_dims().to_vec();
    dims.extend_from_slice(basis.ambient_dims());
    let mut theta = TensorVector::zeros(&dims);
    for w in basis.vectors() {
        let t = w.kron(&w.conj());
        for (o, x) in theta.coefficients.iter_mut().zip(t.coefficients()) {
            *o += x;
        }
    }
    Ok(theta.scaled(C64::new(1.0 / (basis.dim() as f64).sqrt(), 0.0)))
}

/// True iff `a` majorizes `b`: after sorting descending and zero-padding,
/// every partial sum of `a` is at least the matching partial sum of `b`.
pub fn majorizes(a: &[f64], b: &[f64]) -> Result<bool> {
    const SUM_TOL: f64 = 1e-10;
    ensure!(
        a.iter().chain(b).all(|&x| x >= 0.0 && x.is_finite()),
        Domain,
        "majorization needs finite non-negative entries"
    );
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    ensure!((sa - sb).abs() <= SUM_TOL, Domain, "unequal sums {sa} and {sb}");
    let len = a.len().max(b.len());
    let sorted = |x: &[f64]| {
        let mut v = x.to_vec();
        v.resize(len, 0.0);
        v.sort_by(|p, q| q.total_cmp(p));
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    let (mut pa, mut pb) = (0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        pa += x;
        pb += y;
        if pa < pb - SUM_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Swap operator `V(x ⊗ y) = y ⊗ x` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> DMatrix<C64> {
    let mut v = DMatrix::<C64>::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            v[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    v
}
