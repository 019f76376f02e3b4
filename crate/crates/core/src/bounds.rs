//! Closed-form single- and two-copy entropy bounds for each subspace family,
//! their breaking criteria, thresholds, counts, and grid scans.

use serde::{Deserialize, Serialize};

use crate::constructions::{binomial2, ConstructionSpec, Family};
use crate::entropy::{entropy_upper_from_mu1, lower_bound_c, EntropyBoundPair, RenyiOrder};
use crate::error::{ensure, Error, Result};

/// Relative guard used when taking ceilings of values that should be
/// integers but carry representation error.
const CEIL_FUZZ: f64 = 1e-12;
const ROOT_TOL: f64 = 1e-10;

/// `⌈x⌉`, except that values within `1e-12·max(1,|x|)` of an integer round
/// to that integer.
pub fn fuzzy_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= CEIL_FUZZ * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

fn fuzzy_floor(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= CEIL_FUZZ * x.abs().max(1.0) {
        r
    } else {
        x.floor()
    }
}

/// Number of involutions of a `d`-set, `Σ_k d!/(2^k k! (d−2k)!)`, in exact
/// integer arithmetic. Overflows `u128` past `d ≈ 60`, which panics.
pub fn s_count(d: u32) -> u128 {
    let d = d as u128;
    let mut total: u128 = 0;
    // term_k = C(d, 2k) · (2k−1)!!
    let mut k: u128 = 0;
    while 2 * k <= d {
        let mut binom: u128 = 1;
        for i in 0..2 * k {
            binom = binom * (d - i) / (i + 1);
        }
        let mut double_fact: u128 = 1;
        let mut j = 1;
        while j < 2 * k {
            double_fact *= j;
            j += 2;
        }
        total = total.checked_add(binom.checked_mul(double_fact).expect("s(d) overflow")).expect("s(d) overflow");
        k += 1;
    }
    total
}

fn require_p_above_two(p: RenyiOrder) -> Result<()> {
    ensure!(
        p.value() > 2.0,
        Argument,
        "antisymmetric-family criteria need p > 2, got {}; p <= 2 is inconclusive",
        p.value()
    );
    Ok(())
}

/// `f_{p,d}(x) = [d(d−1)+2x]^p − 2^{−p}[(d+2x)^p + (d−2x)^p]²` with no
/// domain checks.
fn extension_poly(p: f64, d: f64, x: f64) -> f64 {
    (d * (d - 1.0) + 2.0 * x).powf(p) - ((d + 2.0 * x).powf(p) + (d - 2.0 * x).powf(p)).powi(2) / 2f64.powf(p)
}

/// Breaking criterion of the Bell extension family; positive exactly when
/// adding `x` Bell states breaks additivity.
pub fn f_extension(p: f64, d: usize, x: f64) -> Result<f64> {
    ensure!(p.is_finite() && p > 2.0, Argument, "f_extension needs p > 2, got {p}");
    ensure!(d > 2, Argument, "f_extension needs d > 2, got {d}");
    ensure!((1.0..=d as f64 / 2.0).contains(&x), Argument, "x = {x} outside [1, d/2] = [1, {}]", d as f64 / 2.0);
    Ok(extension_poly(p, d as f64, x))
}

/// Root of the extension criterion and its analytic bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtensionRoot {
    pub x0: f64,
    /// Number of admissible extensions, `⌊x₀⌋`.
    pub r: u64,
    /// Root of the chord through `(1, f(1))` and `(d/4, f(d/4))`; a lower
    /// bound on `x₀` by concavity.
    pub a: f64,
    /// Root of the upper envelope `[d(d−1)+2x]^p − 2^{−p}(d+2x)^{2p}`:
    /// `(1 − d + √(1 − 4d + 2d²))/2`.
    pub b: f64,
}

/// Locates the sign change of the extension criterion on `[1, d/4]` by
/// bisection. Requires `f(1) > 0`.
pub fn extension_root(p: f64, d: usize) -> Result<ExtensionRoot> {
    let f1 = f_extension(p, d, 1.0)?;
    let quarter = d as f64 / 4.0;
    if f1 <= 0.0 || quarter <= 1.0 {
        return Err(Error::NotInRegion(format!("f_(p={p},d={d})(1) = {f1} is not positive")));
    }
    let fq = extension_poly(p, d as f64, quarter);
    ensure!(fq < 0.0, Domain, "f(d/4) = {fq} is not negative; no sign change on [1, d/4]");
    let (mut lo, mut hi) = (1.0f64, quarter);
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if extension_poly(p, d as f64, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x0 = 0.5 * (lo + hi);
    let df = d as f64;
    let a = 1.0 + (quarter - 1.0) * f1 / (f1 - fq);
    let b = 0.5 * (1.0 - df + (1.0 - 4.0 * df + 2.0 * df * df).sqrt());
    Ok(ExtensionRoot { x0, r: x0.floor() as u64, a, b })
}

/// Analytic bounds of Theorem-1 type for one construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub spec: ConstructionSpec,
    pub p: RenyiOrder,
    /// Lower bound on the single-copy minimum output entropy (bits).
    #[serde(rename = "C")]
    pub lower: f64,
    /// Upper bound on the two-copy minimum output entropy (bits).
    #[serde(rename = "c")]
    pub upper: f64,
    pub breaks: bool,
    /// `2C − c` in bits.
    pub margin: f64,
}

impl BoundReport {
    fn new(spec: ConstructionSpec, p: RenyiOrder, lower: f64, upper: f64) -> Result<Self> {
        let pair = EntropyBoundPair::new(lower, upper)?;
        Ok(Self { spec, p, lower, upper, breaks: pair.breaks(), margin: pair.margin() })
    }

    pub fn pair(&self) -> EntropyBoundPair {
        EntropyBoundPair { lower_single: self.lower, upper_double: self.upper }
    }
}

/// Antisymmetric space extended by `n` Bell states: `A = (d+2n)/(2d)`,
/// `μ₁²(η(ψ⁺)) ≥ (n + d(d−1)/2)/d²`. Requires `p > 2`, `1 <= n < d/2`.
pub fn bounds_extension(p: RenyiOrder, d: usize, n: usize) -> Result<BoundReport> {
    require_p_above_two(p)?;
    ensure!(d > 2, Argument, "extension bounds need d > 2, got {d}");
    ensure!(n >= 1 && 2 * n < d, Argument, "extension bounds need 1 <= n < d/2, got n = {n}, d = {d}");
    let (lower, upper) = extension_pair(p, d, n)?;
    BoundReport::new(ConstructionSpec::new(Family::BellExtension, d, Some(n)), p, lower, upper)
}

fn extension_pair(p: RenyiOrder, d: usize, n: usize) -> Result<(f64, f64)> {
    let df = d as f64;
    let a = (df + 2.0 * n as f64) / (2.0 * df);
    let lower = lower_bound_c(a, p)?;
    let upper = entropy_upper_from_mu1((n as f64 + binomial2(d) as f64) / (df * df), p)?;
    Ok((lower, upper))
}

/// `4^{1/p−1}·d²`: the subspace family breaks for dimensions strictly above.
pub fn subspace_threshold(p: f64, d: usize) -> f64 {
    4f64.powf(1.0 / p - 1.0) * (d * d) as f64
}

/// Subspace of the antisymmetric space of dimension `n`: `C = 1`,
/// `c = (p/(1−p)) log₂(n/d²)`. Requires `p > 2`, `1 <= n <= C(d,2) − 1`.
pub fn bounds_subspace(p: RenyiOrder, d: usize, n: usize) -> Result<BoundReport> {
    require_p_above_two(p)?;
    ensure!(d >= 2, Argument, "d must be >= 2");
    let max = binomial2(d).saturating_sub(1);
    ensure!(n >= 1 && n <= max, Argument, "subspace bounds need 1 <= n <= {max}, got {n}");
    let upper = entropy_upper_from_mu1(n as f64 / (d * d) as f64, p)?;
    BoundReport::new(ConstructionSpec::new(Family::AntisymmetricSubspace, d, Some(n)), p, 1.0, upper)
}

/// The full antisymmetric space: `C = 1`, `c = (p/(1−p)) log₂((d−1)/(2d))`.
pub fn bounds_antisymmetric(p: RenyiOrder, d: usize) -> Result<BoundReport> {
    require_p_above_two(p)?;
    ensure!(d >= 2, Argument, "d must be >= 2");
    let upper = entropy_upper_from_mu1(binomial2(d) as f64 / (d * d) as f64, p)?;
    BoundReport::new(ConstructionSpec::new(Family::AntisymmetricFull, d, None), p, 1.0, upper)
}

/// Counts of breaking subspace dimensions at `(p, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubspaceCensus {
    pub p: f64,
    pub d: usize,
    pub threshold: f64,
    /// `1 − ⌈4^{1/p−1} d²⌉ + C(d,2)`.
    pub l_formula: i64,
    /// `|{n ∈ ℕ : threshold < n < C(d,2)}|`.
    pub strict_count: u64,
    /// `l_formula − strict_count`.
    pub difference: i64,
    /// Dimension above which the strict interval has length > 1.
    pub d0: u64,
    /// Inclusive range of breaking `n`, when nonempty.
    pub n_range: Option<(u64, u64)>,
}

/// `d₀ = ⌈4/(−1 + √(9 − 4^{1/p+1}))⌉`, defined for `p > 2`.
pub fn subspace_d0(p: f64) -> Result<u64> {
    let inner = 9.0 - 4f64.powf(1.0 / p + 1.0);
    ensure!(
        p.is_finite() && inner > 1.0,
        Domain,
        "d0 formula undefined at p = {p}: needs 9 - 4^(1/p+1) > 1, i.e. p > 2"
    );
    Ok(fuzzy_ceil(4.0 / (inner.sqrt() - 1.0)) as u64)
}

pub fn subspace_census(p: RenyiOrder, d: usize) -> Result<SubspaceCensus> {
    require_p_above_two(p).map_err(|_| Error::Domain(format!("subspace census needs p > 2, got {}", p.value())))?;
    ensure!(d >= 2, Argument, "d must be >= 2");
    let p = p.value();
    let t = subspace_threshold(p, d);
    let top = binomial2(d) as i64;
    let l_formula = 1 - fuzzy_ceil(t) as i64 + top;
    let first = fuzzy_floor(t) as i64 + 1;
    let last = top - 1;
    let strict_count = (last - first + 1).max(0) as u64;
    let n_range = (strict_count > 0).then_some((first as u64, last as u64));
    Ok(SubspaceCensus {
        p,
        d,
        threshold: t,
        l_formula,
        strict_count,
        difference: l_formula - strict_count as i64,
        d0: subspace_d0(p)?,
        n_range,
    })
}

fn check_m(m: f64) -> Result<()> {
    ensure!(m > 0.0 && m <= 0.5, Domain, "m must lie in (0, 1/2], got {m}");
    Ok(())
}

/// `g(m) = (1−m)^p + m^p`.
fn two_point_power_sum(p: f64, m: f64) -> f64 {
    (1.0 - m).powf(p) + m.powf(p)
}

/// Completely entangled subspace with `M_d >= m`:
/// `C = (1/(1−p)) log₂[(1−m)^p + m^p]`, `c = (2p/(1−p)) log₂((d−1)/d)`.
pub fn bounds_parthasarathy(p: RenyiOrder, d: usize, m: f64) -> Result<BoundReport> {
    check_m(m)?;
    ensure!(d >= 2, Argument, "d must be >= 2, got {d}");
    let df = d as f64;
    let lower = lower_bound_c(1.0 - m, p)?;
    let upper = entropy_upper_from_mu1(((df - 1.0) / df).powi(2), p)?;
    BoundReport::new(ConstructionSpec::new(Family::Parthasarathy, d, None), p, lower, upper)
}

/// Direct breaking criterion `((d−1)/d)^p > (1−m)^p + m^p`.
pub fn parthasarathy_criterion(p: RenyiOrder, d: usize, m: f64) -> Result<bool> {
    check_m(m)?;
    let df = d as f64;
    Ok(((df - 1.0) / df).powf(p.value()) > two_point_power_sum(p.value(), m))
}

/// `1/(1 − [(1−m)^p + m^p]^{1/p})`, the real threshold before the ceiling.
pub fn parthasarathy_d0_real(p: RenyiOrder, m: f64) -> Result<f64> {
    check_m(m)?;
    let q = p.value();
    Ok(1.0 / (1.0 - two_point_power_sum(q, m).powf(1.0 / q)))
}

/// `d₀ = ⌈1/(1 − [(1−m)^p + m^p]^{1/p})⌉`; breaking holds for all `d > d₀`.
pub fn parthasarathy_d0(p: RenyiOrder, m: f64) -> Result<u64> {
    Ok(fuzzy_ceil(parthasarathy_d0_real(p, m)?) as u64)
}

/// Analytic bounds for any construction; the Parthasarathy family needs `m`.
pub fn bounds_for_spec(spec: &ConstructionSpec, p: RenyiOrder, m: Option<f64>) -> Result<BoundReport> {
    spec.validate()?;
    let mut report = match spec.family {
        Family::AntisymmetricFull => bounds_antisymmetric(p, spec.d)?,
        Family::AntisymmetricSubspace => bounds_subspace(p, spec.d, spec.n.unwrap_or(0))?,
        Family::BellExtension => bounds_extension(p, spec.d, spec.n.unwrap_or(0))?,
        Family::Parthasarathy => {
            let m = m.ok_or_else(|| Error::Argument("Parthasarathy bounds need a lower bound m on M_d".into()))?;
            bounds_parthasarathy(p, spec.d, m)?
        }
    };
    report.spec = spec.clone();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    #[serde(rename = "true")]
    Member,
    #[serde(rename = "false")]
    NotMember,
    /// The criterion cannot decide (antisymmetric families at `p <= 2`).
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Membership {
    pub fn as_str(self) -> &'static str {
        match self {
            Membership::Member => "true",
            Membership::NotMember => "false",
            Membership::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", rename_all_fields = "camelCase")]
pub enum RowExtras {
    Extension {
        f_at_one: f64,
        /// Largest criterion value over `n = 1, …, ⌊d/2⌋`.
        max_f_over_n: f64,
        root: Option<ExtensionRoot>,
    },
    Subspace {
        census: Option<SubspaceCensus>,
    },
    Parthasarathy {
        m: f64,
        d0: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanRow {
    pub p: f64,
    pub d: usize,
    pub member: Membership,
    /// `x₀` for extensions, the smallest breaking `n` for subspaces, `dim S`
    /// for the Parthasarathy family.
    pub n_or_x0: Option<f64>,
    #[serde(rename = "C")]
    pub lower: Option<f64>,
    #[serde(rename = "c")]
    pub upper: Option<f64>,
    pub margin: Option<f64>,
    pub extras: RowExtras,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanMetadata {
    pub p: f64,
    /// Subspace `d₀(p)` or Parthasarathy `d₀(m, p)`.
    pub d0: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegionScan {
    pub family: Family,
    pub m: Option<f64>,
    pub metadata: Vec<ScanMetadata>,
    /// p-major, then d, in grid order.
    pub rows: Vec<ScanRow>,
}

impl RegionScan {
    /// Whether, along every fixed `p`, membership never switches off once on.
    pub fn is_monotone_in_d(&self) -> bool {
        let mut ps: Vec<f64> = self.rows.iter().map(|r| r.p).collect();
        ps.dedup();
        ps.iter().all(|&p| {
            let mut rows: Vec<&ScanRow> = self.rows.iter().filter(|r| r.p == p).collect();
            rows.sort_by_key(|r| r.d);
            let mut seen = false;
            rows.iter().all(|r| {
                let on = r.member == Membership::Member;
                let ok = on || !seen;
                seen |= on;
                ok
            })
        })
    }

    pub fn first_member(&self, p: f64) -> Option<usize> {
        self.rows.iter().filter(|r| r.p == p && r.member == Membership::Member).map(|r| r.d).min()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanExtras {
    /// Lower bound on `M_d` for the Parthasarathy family.
    pub m: Option<f64>,
}

fn extension_row(p: f64, d: usize) -> ScanRow {
    let df = d as f64;
    let f_at_one = extension_poly(p, df, 1.0);
    let max_f_over_n = (1..=d / 2).map(|n| extension_poly(p, df, n as f64)).fold(f64::NEG_INFINITY, f64::max);
    let order = RenyiOrder::new(p).ok();
    let pair = match order {
        Some(q) if 2 < d => extension_pair(q, d, 1).ok(),
        _ => None,
    };
    let (member, root) = if p <= 2.0 {
        (Membership::Inconclusive, None)
    } else if d > 2 && f_at_one > 0.0 {
        let root = extension_root(p, d).ok();
        (if root.is_some() { Membership::Member } else { Membership::NotMember }, root)
    } else {
        (Membership::NotMember, None)
    };
    ScanRow {
        p,
        d,
        member,
        n_or_x0: root.map(|r| r.x0),
        lower: pair.map(|x| x.0),
        upper: pair.map(|x| x.1),
        margin: pair.map(|(l, u)| 2.0 * l - u),
        extras: RowExtras::Extension { f_at_one, max_f_over_n, root },
    }
}

fn subspace_row(p: f64, d: usize) -> Result<ScanRow> {
    if p <= 2.0 {
        return Ok(ScanRow {
            p,
            d,
            member: Membership::Inconclusive,
            n_or_x0: None,
            lower: None,
            upper: None,
            margin: None,
            extras: RowExtras::Subspace { census: None },
        });
    }
    let q = RenyiOrder::new(p)?;
    let census = subspace_census(q, d)?;
    let n = census.n_range.map(|r| r.0 as usize).or_else(|| {
        let max = binomial2(d).saturating_sub(1);
        (max >= 1).then_some(max)
    });
    let report = n.map(|n| bounds_subspace(q, d, n)).transpose()?;
    Ok(ScanRow {
        p,
        d,
        member: if census.strict_count > 0 { Membership::Member } else { Membership::NotMember },
        n_or_x0: census.n_range.map(|r| r.0 as f64),
        lower: report.as_ref().map(|r| r.lower),
        upper: report.as_ref().map(|r| r.upper),
        margin: report.as_ref().map(|r| r.margin),
        extras: RowExtras::Subspace { census: Some(census) },
    })
}

fn parthasarathy_row(p: f64, d: usize, m: f64) -> Result<ScanRow> {
    let q = RenyiOrder::new(p)?;
    let report = bounds_parthasarathy(q, d, m)?;
    Ok(ScanRow {
        p,
        d,
        member: if report.breaks { Membership::Member } else { Membership::NotMember },
        n_or_x0: Some(((d - 1) * (d - 1)) as f64),
        lower: Some(report.lower),
        upper: Some(report.upper),
        margin: Some(report.margin),
        extras: RowExtras::Parthasarathy { m, d0: parthasarathy_d0(q, m)? },
    })
}

/// Evaluates family membership on every `(p, d)` of the grid, p-major.
pub fn region_scan(family: Family, p_grid: &[f64], d_grid: &[usize], extras: ScanExtras) -> Result<RegionScan> {
    ensure!(!p_grid.is_empty() && !d_grid.is_empty(), Argument, "scan grids must be nonempty");
    ensure!(p_grid.iter().all(|p| p.is_finite() && *p > 1.0), Argument, "every p in the grid must be finite and > 1");
    ensure!(d_grid.iter().all(|&d| d >= 2), Argument, "every d in the grid must be >= 2");
    let m = match family {
        Family::Parthasarathy => {
            let m = extras.m.ok_or_else(|| Error::Argument("Parthasarathy scan needs m".into()))?;
            check_m(m)?;
            Some(m)
        }
        _ => None,
    };
    let mut rows = Vec::with_capacity(p_grid.len() * d_grid.len());
    let mut metadata = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let d0 = match family {
            Family::AntisymmetricSubspace if p > 2.0 => Some(subspace_d0(p)?),
            Family::Parthasarathy => Some(parthasarathy_d0(RenyiOrder::new(p)?, m.expect("checked above"))?),
            _ => None,
        };
        metadata.push(ScanMetadata { p, d0 });
        for &d in d_grid {
            rows.push(match family {
                Family::BellExtension => extension_row(p, d),
                Family::AntisymmetricSubspace => subspace_row(p, d)?,
                Family::Parthasarathy => parthasarathy_row(p, d, m.expect("checked above"))?,
                Family::AntisymmetricFull => {
                    return Err(Error::Argument(
                        "region scans cover bell-extension, antisym-subspace and parthasarathy".into(),
                    ))
                }
            });
        }
    }
    Ok(RegionScan { family, m, metadata, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64) -> RenyiOrder {
        RenyiOrder::new(x).unwrap()
    }

    /// Exact rational evaluation of the extension criterion at integer p:
    /// multiply through by 2^p to stay in integers.
    fn f_integer(p: u32, d: i128, n: i128) -> i128 {
        let lhs = (d * (d - 1) + 2 * n).pow(p) * 2i128.pow(p);
        let rhs = ((d + 2 * n).pow(p) + (d - 2 * n).pow(p)).pow(2);
        // f · 2^p
        lhs - rhs
    }

    #[test]
    fn involution_counts() {
        let expected = [1u128, 2, 4, 10, 26, 76, 232, 764];
        for (d, &e) in (1..=8).zip(&expected) {
            assert_eq!(s_count(d), e, "d = {d}");
        }
        // s(d) = s(d-1) + (d-1) s(d-2)
        for d in 2..=40u32 {
            assert_eq!(s_count(d), s_count(d - 1) + (d as u128 - 1) * s_count(d - 2));
        }
        assert_eq!(s_count(0), 1);
    }

    #[test]
    fn f_extension_examples() {
        assert_eq!(f_integer(3, 10, 1), 151_488 * 8);
        assert_eq!(f_integer(3, 6, 1), -8_704 * 8);
        assert_eq!(f_integer(3, 8, 1), 10_280 * 8);
        assert!((f_extension(3.0, 10, 1.0).unwrap() - 151_488.0).abs() < 1e-6);
        assert!((f_extension(3.0, 6, 1.0).unwrap() + 8_704.0).abs() < 1e-6);
        assert!((f_extension(3.0, 8, 1.0).unwrap() - 10_280.0).abs() < 1e-6);
        for q in [2.5, 3.0, 5.0] {
            for d in 4..=12 {
                assert!(f_extension(q, d, d as f64 / 4.0).unwrap() < 0.0, "p = {q}, d = {d}");
            }
        }
        assert!(matches!(f_extension(3.0, 10, 0.5), Err(Error::Argument(_))));
        assert!(matches!(f_extension(3.0, 10, 5.5), Err(Error::Argument(_))));
        assert!(matches!(f_extension(2.0, 10, 1.0), Err(Error::Argument(_))));
    }

    #[test]
    fn f_extension_is_concave() {
        for q in [2.5, 3.0, 4.0, 5.0] {
            for d in 5..=12 {
                let h = 1e-3;
                let mut x = 1.0 + h;
                while x < d as f64 / 2.0 - h {
                    let second = extension_poly(q, d as f64, x + h) - 2.0 * extension_poly(q, d as f64, x)
                        + extension_poly(q, d as f64, x - h);
                    let scale = extension_poly(q, d as f64, x).abs().max(1.0);
                    assert!(second <= 1e-9 * scale, "p = {q}, d = {d}, x = {x}");
                    x += 0.05;
                }
            }
        }
    }

    #[test]
    fn extension_root_examples() {
        let r = extension_root(3.0, 10).unwrap();
        assert!((r.b - (-9.0 + 161f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((r.b - 1.844_288_770).abs() < 1e-8);
        assert!((r.x0 - 1.494_821_719).abs() < 1e-8);
        assert!((r.a - 1.275_311_590).abs() < 1e-8);
        assert!(r.x0 <= r.b && r.a <= r.x0, "{r:?}");
        assert!(extension_poly(3.0, 10.0, r.x0 - 1e-9) > 0.0);
        assert!(extension_poly(3.0, 10.0, r.x0 + 1e-9) < 0.0);
        assert_eq!(r.r, 1);
        let r = extension_root(3.0, 8).unwrap();
        assert!(r.r >= 1);
        assert!(matches!(extension_root(3.0, 6), Err(Error::NotInRegion(_))));
    }

    #[test]
    fn extension_bounds_and_equivalence() {
        assert!(bounds_extension(p(3.0), 10, 1).unwrap().breaks);
        assert!(!bounds_extension(p(3.0), 6, 1).unwrap().breaks);
        for q in [2.5, 3.0, 4.0] {
            for d in 4..=12usize {
                for n in (1..).take_while(|n| 2 * n < d) {
                    let rep = bounds_extension(p(q), d, n).unwrap();
                    let f = f_extension(q, d, n as f64).unwrap();
                    assert_eq!(rep.breaks, f > 0.0, "p = {q}, d = {d}, n = {n}");
                    assert_eq!(rep.breaks, rep.margin > 0.0);
                }
            }
        }
        assert!(matches!(bounds_extension(p(3.0), 10, 5), Err(Error::Argument(_))));
        assert!(matches!(bounds_extension(p(2.0), 10, 1), Err(Error::Argument(_))));
    }

    #[test]
    fn subspace_bounds_examples() {
        let r = bounds_subspace(p(3.0), 8, 26).unwrap();
        assert!(r.breaks);
        assert!((r.upper - 1.949_340_423).abs() < 1e-9);
        assert!((r.margin - 0.050_659_577).abs() < 1e-9);
        assert!(!bounds_subspace(p(3.0), 8, 25).unwrap().breaks);
        assert!((subspace_threshold(3.0, 8) - 25.398_416_831).abs() < 1e-6);
        // threshold tends to d²/4 = 25 from above as p grows
        let t = subspace_threshold(50.0, 10);
        assert!(t > 25.0 && t < 26.0);
        assert!(bounds_subspace(p(50.0), 10, 27).unwrap().breaks);
        assert!(!bounds_subspace(p(50.0), 10, 25).unwrap().breaks);
        for d in 4..=12usize {
            for n in 1..binomial2(d) {
                let r = bounds_subspace(p(3.0), d, n).unwrap();
                assert_eq!(r.breaks, n as f64 > subspace_threshold(3.0, d));
            }
        }
        assert!(matches!(bounds_subspace(p(3.0), 8, 28), Err(Error::Argument(_))));
    }

    #[test]
    fn grudka_baseline() {
        let r = bounds_antisymmetric(p(3.0), 5).unwrap();
        assert!((r.upper - 1.982_892_142).abs() < 1e-9);
        assert_eq!(r.lower, 1.0);
        assert!(r.breaks);
        // both family formulas at their boundary parameter collapse to this case
        let subspace_c = entropy_upper_from_mu1(binomial2(5) as f64 / 25.0, p(3.0)).unwrap();
        assert_eq!(subspace_c, r.upper);
        let (lower, upper) = extension_pair(p(3.0), 5, 0).unwrap();
        assert!((lower - 1.0).abs() < 1e-15);
        assert_eq!(upper, r.upper);
    }

    #[test]
    fn census_examples() {
        assert_eq!(subspace_d0(3.0).unwrap(), 7);
        let c = subspace_census(p(3.0), 10).unwrap();
        assert_eq!(c.l_formula, 6);
        assert_eq!(c.strict_count, 5);
        assert_eq!(c.n_range, Some((40, 44)));
        let c = subspace_census(p(3.0), 8).unwrap();
        assert_eq!((c.l_formula, c.strict_count, c.difference), (3, 2, 1));
        assert_eq!(c.n_range, Some((26, 27)));
        assert!(matches!(subspace_d0(2.0), Err(Error::Domain(_))));
        assert!(matches!(subspace_census(p(1.5), 8), Err(Error::Domain(_))));
    }

    #[test]
    fn parthasarathy_examples() {
        assert_eq!(parthasarathy_d0(p(3.0), 0.5).unwrap(), 3);
        assert!((parthasarathy_d0_real(p(3.0), 0.5).unwrap() - 2.702_414_383).abs() < 1e-6);
        assert_eq!(parthasarathy_d0(p(2.0), 0.5).unwrap(), 4);
        assert!(bounds_parthasarathy(p(3.0), 4, 0.5).unwrap().breaks);
        assert!(!bounds_parthasarathy(p(3.0), 2, 0.5).unwrap().breaks);
        assert!(matches!(bounds_parthasarathy(p(3.0), 4, 0.6), Err(Error::Domain(_))));
        assert!(matches!(bounds_parthasarathy(p(3.0), 4, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn parthasarathy_threshold_consistency() {
        for q in [1.5, 2.0, 3.0, 5.0] {
            for m in [0.1, 0.3, 0.5] {
                let real = parthasarathy_d0_real(p(q), m).unwrap();
                let d0 = parthasarathy_d0(p(q), m).unwrap() as usize;
                let first =
                    (2..400).find(|&d| bounds_parthasarathy(p(q), d, m).unwrap().breaks).expect("breaks eventually");
                assert_eq!(first, real.floor() as usize + 1, "p = {q}, m = {m}");
                for d in d0 + 1..d0 + 30 {
                    let r = bounds_parthasarathy(p(q), d, m).unwrap();
                    assert!(r.breaks);
                    assert_eq!(r.breaks, parthasarathy_criterion(p(q), d, m).unwrap());
                }
            }
        }
    }

    #[test]
    fn scans() {
        let ds: Vec<usize> = (4..=12).collect();
        let ext = region_scan(Family::BellExtension, &[3.0], &ds, ScanExtras::default()).unwrap();
        assert_eq!(ext.first_member(3.0), Some(8));
        assert!(ext.is_monotone_in_d());
        let sub = region_scan(Family::AntisymmetricSubspace, &[3.0], &ds, ScanExtras::default()).unwrap();
        assert_eq!(sub.metadata[0].d0, Some(7));
        // n = 20 at d = 7 already exceeds 4^{-2/3}·49 ≈ 19.45
        assert_eq!(sub.first_member(3.0), Some(7));
        assert!(sub.is_monotone_in_d());
        let par =
            region_scan(Family::Parthasarathy, &[3.0], &(2..=12).collect::<Vec<_>>(), ScanExtras { m: Some(0.5) })
                .unwrap();
        assert_eq!(par.first_member(3.0), Some(3));
        assert!(par.rows.iter().filter(|r| r.d >= 4).all(|r| r.member == Membership::Member));
        assert!(region_scan(Family::BellExtension, &[], &ds, ScanExtras::default()).is_err());
    }

    #[test]
    fn p2_is_inconclusive() {
        let ds: Vec<usize> = (2..=12).collect();
        let scan = region_scan(Family::BellExtension, &[2.0], &ds, ScanExtras::default()).unwrap();
        for row in &scan.rows {
            assert_eq!(row.member, Membership::Inconclusive);
            let RowExtras::Extension { max_f_over_n, .. } = row.extras else { panic!() };
            assert!(max_f_over_n < 0.0);
        }
    }
}
