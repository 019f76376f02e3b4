//! Subspace families of `C^d ⊗ C^d`: the antisymmetric space and its
//! subspaces, extensions by generalized Bell states, and the completely
//! entangled (Parthasarathy) space with its sum-representation basis.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::tensor::{orthonormalize, SubspaceBasis, TensorVector, ORTHO_TOL};

/// Largest `d` for which involutions are enumerated explicitly.
pub const MAX_ENUMERATION_DIM: usize = 10;

pub fn binomial2(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

/// Orthonormal basis `(e_i⊗e_j − e_j⊗e_i)/√2`, `i < j`, in lexicographic order.
pub fn antisymmetric_basis(d: usize) -> Result<SubspaceBasis> {
    ensure!(d >= 2, Argument, "antisymmetric space needs d >= 2, got {d}");
    Ok(SubspaceBasis::from_orthonormal(antisymmetric_vectors(d).collect(), vec![d, d]))
}

fn antisymmetric_vectors(d: usize) -> impl Iterator<Item = TensorVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (0..d).flat_map(move |i| {
        (i + 1..d).map(move |j| {
            let mut v = TensorVector::zeros(&[d, d]).coefficients().to_vec();
            v[i * d + j] = C64::new(h, 0.0);
            v[j * d + i] = C64::new(-h, 0.0);
            TensorVector::new(v, vec![d, d]).expect("shape is consistent")
        })
    })
}

/// Permutation `σ` of `{0, …, d−1}` with `σ∘σ = id`; its permutation matrix
/// is symmetric.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetricInvolution {
    mapping: Vec<usize>,
}

impl SymmetricInvolution {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let d = mapping.len();
        ensure!(d >= 1, Argument, "involution on an empty set");
        for (i, &s) in mapping.iter().enumerate() {
            ensure!(s < d, Argument, "image {s} out of range for d = {d}");
            ensure!(mapping[s] == i, Domain, "{mapping:?} is not an involution");
        }
        Ok(Self { mapping })
    }

    pub fn identity(d: usize) -> Self {
        Self { mapping: (0..d).collect() }
    }

    /// Reflection `i ↦ (k − i) mod d`.
    pub fn reflection(d: usize, k: usize) -> Self {
        Self { mapping: (0..d).map(|i| (k + d - i % d) % d).collect() }
    }

    pub fn d(&self) -> usize {
        self.mapping.len()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    /// Row-major permutation matrix with `Π[σ(j), j] = 1`.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        let d = self.d();
        let mut m = vec![vec![0u8; d]; d];
        for (j, &s) in self.mapping.iter().enumerate() {
            m[s][j] = 1;
        }
        m
    }
}

/// All involutions of `{0, …, d−1}`, generated by pairing the smallest free
/// point with itself or with a larger free point.
pub fn enumerate_symmetric_involutions(d: usize) -> Result<Vec<SymmetricInvolution>> {
    ensure!(d >= 1, Argument, "d must be >= 1");
    ensure!(
        d <= MAX_ENUMERATION_DIM,
        Resource,
        "involution enumeration is limited to d <= {MAX_ENUMERATION_DIM}, got {d}"
    );
    fn extend(mapping: &mut Vec<Option<usize>>, out: &mut Vec<SymmetricInvolution>) {
        let Some(i) = mapping.iter().position(Option::is_none) else {
            out.push(SymmetricInvolution { mapping: mapping.iter().map(|m| m.unwrap()).collect() });
            return;
        };
        mapping[i] = Some(i);
        extend(mapping, out);
        for j in i + 1..mapping.len() {
            if mapping[j].is_none() {
                mapping[i] = Some(j);
                mapping[j] = Some(i);
                extend(mapping, out);
                mapping[j] = None;
            }
        }
        mapping[i] = None;
    }
    let mut out = Vec::new();
    extend(&mut vec![None; d], &mut out);
    Ok(out)
}

/// Maximally entangled vector `(1/√d) Σ_j e^{iφ_j} e_{σ(j)} ⊗ f_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellState {
    vector: TensorVector,
    source_involution: SymmetricInvolution,
    phases: Vec<f64>,
}

impl BellState {
    pub fn vector(&self) -> &TensorVector {
        &self.vector
    }

    pub fn source_involution(&self) -> &SymmetricInvolution {
        &self.source_involution
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }
}

/// Generalized Bell state with coefficient matrix `λ = Π·diag(e^{iφ})`.
///
/// `λ` is symmetric, and hence the state lies in the symmetric complement of
/// the antisymmetric space, exactly when the phases agree on every 2-cycle
/// of `σ`. Phases that differ on a 2-cycle are rejected.
pub fn bell_state(inv: &SymmetricInvolution, phases: &[f64]) -> Result<BellState> {
    let d = inv.d();
    ensure!(phases.len() == d, Argument, "{} phases for d = {d}", phases.len());
    ensure!(phases.iter().all(|p| p.is_finite()), Argument, "phases must be finite");
    for j in 0..d {
        let s = inv.apply(j);
        let gap = (C64::from_polar(1.0, phases[j]) - C64::from_polar(1.0, phases[s])).norm();
        ensure!(
            gap <= 1e-12,
            Domain,
            "phases {} and {} on the 2-cycle ({j} {s}) differ; the state would leave the symmetric space",
            phases[j],
            phases[s]
        );
    }
    let amp = 1.0 / (d as f64).sqrt();
    let mut coeffs = vec![C64::new(0.0, 0.0); d * d];
    for (j, &phi) in phases.iter().enumerate() {
        coeffs[inv.apply(j) * d + j] = C64::from_polar(amp, phi);
    }
    Ok(BellState {
        vector: TensorVector::new(coeffs, vec![d, d])?,
        source_involution: inv.clone(),
        phases: phases.to_vec(),
    })
}

/// `n` mutually orthogonal zero-phase Bell states from the reflections
/// `σ_k(i) = (k − i) mod d`, `k = 0, …, n−1`. Distinct reflections disagree
/// at every point, so the coefficient matrices have disjoint supports.
pub fn orthogonal_bell_family(d: usize, n: usize) -> Result<Vec<BellState>> {
    ensure!(d >= 1, Argument, "d must be >= 1");
    ensure!(n >= 1 && n <= d, Argument, "need 1 <= n <= d distinct reflections, got n = {n}, d = {d}");
    let zero = vec![0.0; d];
    let family: Vec<BellState> =
        (0..n).map(|k| bell_state(&SymmetricInvolution::reflection(d, k), &zero)).collect::<Result<_>>()?;
    for (a, x) in family.iter().enumerate() {
        for y in &family[a + 1..] {
            let overlap = x.vector.inner(&y.vector)?.norm();
            ensure!(overlap <= 1e-12, Domain, "reflection Bell states overlap by {overlap:e}");
        }
    }
    Ok(family)
}

/// Antisymmetric space extended by `n` reflection Bell states,
/// `1 <= n <= ⌊d/2⌋`.
pub fn bell_extension(d: usize, n: usize) -> Result<SubspaceBasis> {
    ensure!(d >= 2, Argument, "bell extension needs d >= 2, got {d}");
    ensure!(n >= 1 && n <= d / 2, Argument, "bell extension needs 1 <= n <= floor(d/2) = {}, got {n}", d / 2);
    let mut vectors: Vec<TensorVector> = antisymmetric_vectors(d).collect();
    vectors.extend(orthogonal_bell_family(d, n)?.into_iter().map(|b| b.vector));
    SubspaceBasis::new(vectors, vec![d, d])
}

/// First `n` antisymmetric basis vectors in lexicographic `(i, j)` order,
/// `1 <= n <= C(d,2) − 1`.
pub fn antisym_subspace(d: usize, n: usize) -> Result<SubspaceBasis> {
    ensure!(d >= 2, Argument, "antisymmetric subspace needs d >= 2, got {d}");
    let max = binomial2(d).saturating_sub(1);
    ensure!(n >= 1 && n <= max, Argument, "antisymmetric subspace needs 1 <= n <= C(d,2)-1 = {max}, got {n}");
    Ok(SubspaceBasis::from_orthonormal(antisymmetric_vectors(d).take(n).collect(), vec![d, d]))
}

/// Span of `n` random complex combinations of the antisymmetric basis
/// (complex Gaussian coefficients), orthonormalized.
pub fn random_antisym_subspace<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<SubspaceBasis> {
    ensure!(d >= 2, Argument, "antisymmetric subspace needs d >= 2, got {d}");
    let full = binomial2(d);
    ensure!(n >= 1 && n <= full, Argument, "antisymmetric subspace needs 1 <= n <= C(d,2) = {full}, got {n}");
    let anti = antisymmetric_basis(d)?;
    let vectors: Vec<TensorVector> = (0..n)
        .map(|_| {
            let c = TensorVector::random_unit(&[full], rng);
            anti.combine(c.coefficients())
        })
        .collect::<Result<_>>()?;
    let (basis, rank) = orthonormalize(&vectors)?;
    ensure!(rank == n, Domain, "random combinations were rank deficient ({rank} < {n})");
    Ok(basis)
}

/// Default point set `G = {k/(2d−1) : k = 0, …, 2d−2}`.
pub fn default_lambdas(d: usize) -> Vec<C64> {
    let m = 2 * d - 1;
    (0..m).map(|k| C64::new(k as f64 / m as f64, 0.0)).collect()
}

/// `u_λ = (1, λ, λ², …, λ^{d−1})`.
pub fn u_lambda(d: usize, lambda: C64) -> TensorVector {
    let mut coeffs = Vec::with_capacity(d);
    let mut acc = C64::new(1.0, 0.0);
    for _ in 0..d {
        coeffs.push(acc);
        acc *= lambda;
    }
    TensorVector::new(coeffs, vec![d]).expect("shape is consistent")
}

/// `L = span{u_λ ⊗ u_λ : λ ∈ G}` and its orthogonal complement `S`, the
/// completely entangled subspace of dimension `(d−1)²`.
pub fn parthasarathy_spaces(d: usize, lambdas: Option<&[C64]>) -> Result<(SubspaceBasis, SubspaceBasis)> {
    ensure!(d >= 2, Argument, "Parthasarathy space needs d >= 2, got {d}");
    let g: Vec<C64> = match lambdas {
        Some(g) => g.to_vec(),
        None => default_lambdas(d),
    };
    ensure!(g.len() == 2 * d - 1, Argument, "need |G| = 2d-1 = {}, got {}", 2 * d - 1, g.len());
    ensure!(g.iter().all(|l| l.re.is_finite() && l.im.is_finite()), Argument, "G must be finite");
    for (i, a) in g.iter().enumerate() {
        for b in &g[i + 1..] {
            ensure!(a != b, Domain, "G repeats {a}; the Vandermonde system is degenerate");
        }
    }
    let products: Vec<TensorVector> = g
        .iter()
        .map(|&l| {
            let u = u_lambda(d, l);
            u.kron(&u)
        })
        .collect();
    let (l_basis, rank) = orthonormalize(&products)?;
    ensure!(
        rank == 2 * d - 1,
        Domain,
        "u_λ⊗u_λ family has numerical rank {rank}, expected {}; G is too ill-conditioned",
        2 * d - 1
    );
    let s_basis = l_basis.complement()?;
    ensure!(
        s_basis.dim() == (d - 1) * (d - 1),
        Domain,
        "complement has dimension {}, expected {}",
        s_basis.dim(),
        (d - 1) * (d - 1)
    );
    Ok((l_basis, s_basis))
}

/// Anti-diagonal vectors `v_s = Σ_{k+l=s} e_k ⊗ e_l`, `s = 0, …, 2d−2`.
pub fn anti_diagonal(d: usize, s: usize) -> TensorVector {
    let mut v = TensorVector::zeros(&[d, d]).coefficients().to_vec();
    for k in 0..d {
        if s >= k && s - k < d {
            v[k * d + (s - k)] = C64::new(1.0, 0.0);
        }
    }
    TensorVector::new(v, vec![d, d]).expect("shape is consistent")
}

/// Normalized anti-diagonals `w_s = v_s/‖v_s‖`, an orthonormal basis of `L`.
pub fn sum_representation_basis(d: usize) -> Result<SubspaceBasis> {
    ensure!(d >= 2, Argument, "sum representation needs d >= 2, got {d}");
    let vectors = (0..2 * d - 1).map(|s| anti_diagonal(d, s).normalized()).collect::<Result<Vec<_>>>()?;
    SubspaceBasis::new(vectors, vec![d, d])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[serde(rename = "antisym")]
    AntisymmetricFull,
    #[serde(rename = "antisym-subspace")]
    AntisymmetricSubspace,
    BellExtension,
    Parthasarathy,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::AntisymmetricFull => "antisym",
            Family::AntisymmetricSubspace => "antisym-subspace",
            Family::BellExtension => "bell-extension",
            Family::Parthasarathy => "parthasarathy",
        }
    }

    pub fn is_antisymmetric(self) -> bool {
        !matches!(self, Family::Parthasarathy)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "antisym" => Ok(Family::AntisymmetricFull),
            "antisym-subspace" => Ok(Family::AntisymmetricSubspace),
            "bell-extension" | "extension" => Ok(Family::BellExtension),
            "parthasarathy" => Ok(Family::Parthasarathy),
            other => Err(Error::Argument(format!("unknown family '{other}'"))),
        }
    }
}

/// Parameters selecting one subspace `W ⊂ C^d ⊗ C^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub family: Family,
    pub d: usize,
    /// Subspace dimension (antisym-subspace) or number of Bell states
    /// (bell-extension); ignored otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Point set `G` for the Parthasarathy family, as `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<C64>>,
}

impl ConstructionSpec {
    pub fn new(family: Family, d: usize, n: Option<usize>) -> Self {
        Self { family, d, n, lambdas: None }
    }

    fn require_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| Error::Argument(format!("family {} requires n", self.family)))
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.d >= 2, Argument, "d must be >= 2, got {}", self.d);
        match self.family {
            Family::AntisymmetricFull | Family::Parthasarathy => Ok(()),
            Family::AntisymmetricSubspace => {
                let n = self.require_n()?;
                let max = binomial2(self.d).saturating_sub(1);
                ensure!(n >= 1 && n <= max, Argument, "n must lie in 1..={max}, got {n}");
                Ok(())
            }
            Family::BellExtension => {
                let n = self.require_n()?;
                ensure!(n >= 1 && n <= self.d / 2, Argument, "n must lie in 1..={}, got {n}", self.d / 2);
                Ok(())
            }
        }
    }

    /// Dimension of `W` without building it.
    pub fn subspace_dim(&self) -> Result<usize> {
        self.validate()?;
        Ok(match self.family {
            Family::AntisymmetricFull => binomial2(self.d),
            Family::AntisymmetricSubspace => self.require_n()?,
            Family::BellExtension => binomial2(self.d) + self.require_n()?,
            Family::Parthasarathy => (self.d - 1) * (self.d - 1),
        })
    }

    /// Orthonormal basis of `W` (for Parthasarathy, the entangled space `S`).
    pub fn build(&self) -> Result<SubspaceBasis> {
        self.validate()?;
        match self.family {
            Family::AntisymmetricFull => antisymmetric_basis(self.d),
            Family::AntisymmetricSubspace => antisym_subspace(self.d, self.require_n()?),
            Family::BellExtension => bell_extension(self.d, self.require_n()?),
            Family::Parthasarathy => Ok(parthasarathy_spaces(self.d, self.lambdas.as_deref())?.1),
        }
    }
}

/// `max |⟨a, b⟩|` over `a ∈ xs`, `b ∈ ys`.
pub fn max_cross_overlap(xs: &[TensorVector], ys: &[TensorVector]) -> Result<f64> {
    let mut worst = 0.0f64;
    for a in xs {
        for b in ys {
            worst = worst.max(a.inner(b)?.norm());
        }
    }
    Ok(worst)
}

/// Whether every vector of `basis` is orthogonal to the antisymmetric space.
pub fn is_symmetric_side(basis: &[TensorVector], d: usize) -> Result<bool> {
    let anti: Vec<TensorVector> = antisymmetric_vectors(d).collect();
    Ok(max_cross_overlap(basis, &anti)? <= ORTHO_TOL)
}
