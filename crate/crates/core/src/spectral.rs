//! Spectrum of the block operator `ℒ_α` at the global minimum, an explicit
//! basis adapted to the `S_k` isotypic decomposition of `R^{k×k}`, and the
//! critical leaky parameters where the spectrum crosses zero.
//!
//! Matrices are identified with vectors by stacking columns, as in
//! [`crate::hessian::vec_columns`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

#[cfg_attr(test, allow(unused_imports))]
use crate::error::{domain, inconsistent, Error, Result};
pub use crate::hessian::{abc, AbcCoefficients};
use crate::hessian::{assemble_dense, block_operator_apply, hessian_at_minimum, vec_columns};
use crate::landscape::LeakyParam;
use crate::symrep::{IrrepFamily, Partition};
use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector3};

/// The seven closed-form eigenvalues of `ℒ_α`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FormulaId {
    /// `b - c` on `∧²(V_⊥)`.
    Wedge,
    /// `b + c` on `𝒮_0`.
    Sym0,
    /// `½(2b + k(a+c) + √(k²(a-c)² + 4c(2a-c)(k-1)))` on `span{I, J}`.
    SpanIjPlus,
    /// `½(2b + k(a+c) - √(k²(a-c)² + 4c(2a-c)(k-1)))` on `span{I, J}`.
    SpanIjMinus,
    /// `b - c` on the `{K_i, S_i, D_i}` blocks.
    WBminusC,
    /// `½(ak + 2b + √(a²k² + 4c(c-2a)))` on the `{K_i, S_i, D_i}` blocks.
    WPlus,
    /// `½(ak + 2b - √(a²k² + 4c(c-2a)))` on the `{K_i, S_i, D_i}` blocks.
    WMinus,
}

impl FormulaId {
    pub const ALL: [FormulaId; 7] = [
        FormulaId::Wedge,
        FormulaId::Sym0,
        FormulaId::SpanIjPlus,
        FormulaId::SpanIjMinus,
        FormulaId::WBminusC,
        FormulaId::WPlus,
        FormulaId::WMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaId::Wedge => "wedge",
            FormulaId::Sym0 => "sym0",
            FormulaId::SpanIjPlus => "span_IJ_plus",
            FormulaId::SpanIjMinus => "span_IJ_minus",
            FormulaId::WBminusC => "W_bminus_c",
            FormulaId::WPlus => "W_plus",
            FormulaId::WMinus => "W_minus",
        }
    }

    pub fn from_name(name: &str) -> Option<FormulaId> {
        FormulaId::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn family(self) -> IrrepFamily {
        match self {
            FormulaId::Wedge => IrrepFamily::Hook,
            FormulaId::Sym0 => IrrepFamily::TwoRow,
            FormulaId::SpanIjPlus | FormulaId::SpanIjMinus => IrrepFamily::Trivial,
            FormulaId::WBminusC | FormulaId::WPlus | FormulaId::WMinus => IrrepFamily::Standard,
        }
    }

    /// Dimension of the eigenspace.
    pub fn multiplicity(self, k: usize) -> usize {
        match self {
            FormulaId::Wedge => (k - 1) * (k - 2) / 2,
            FormulaId::Sym0 => k * (k - 3) / 2,
            FormulaId::SpanIjPlus | FormulaId::SpanIjMinus => 1,
            FormulaId::WBminusC | FormulaId::WPlus | FormulaId::WMinus => k - 1,
        }
    }
}

/// One closed-form eigenvalue with its multiplicity and isotypic label.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: usize,
    pub label: Partition,
    pub formula_id: FormulaId,
}

fn check_k(k: usize) -> Result<()> {
    if k < 4 {
        return Err(domain(format!("the isotypic decomposition needs k >= 4, got {k}")));
    }
    Ok(())
}

/// Roots `½(p ± √(p² - 4·det))` evaluated without cancellation.
///
/// `radicand` is passed separately because it has its own closed form.
fn stable_pair(formula: &'static str, p: f64, radicand: f64, det: f64) -> Result<(f64, f64)> {
    let scale = (p * p).max(radicand.abs()).max(1.0);
    if radicand < -1e-12 * scale {
        return Err(Error::NegativeRadicand { formula, radicand });
    }
    let s = radicand.max(0.0).sqrt();
    if p >= 0.0 {
        let plus = 0.5 * (p + s);
        let minus = if plus == 0.0 { 0.0 } else { det / plus };
        Ok((plus, minus))
    } else {
        let minus = 0.5 * (p - s);
        let plus = if minus == 0.0 { 0.0 } else { det / minus };
        Ok((plus, minus))
    }
}

/// `(W_plus, W_minus)`.
fn w_pair(k: f64, AbcCoefficients { a, b, c }: AbcCoefficients) -> Result<(f64, f64)> {
    let p = a * k + 2.0 * b;
    let radicand = a * a * k * k + 4.0 * c * (c - 2.0 * a);
    let det = a * b * k + b * b - c * c + 2.0 * a * c;
    stable_pair("W_plus/W_minus", p, radicand, det)
}

/// `(span_IJ_plus, span_IJ_minus)`.
fn ij_pair(k: f64, AbcCoefficients { a, b, c }: AbcCoefficients) -> Result<(f64, f64)> {
    let p = 2.0 * b + k * (a + c);
    let radicand = k * k * (a - c) * (a - c) + 4.0 * c * (2.0 * a - c) * (k - 1.0);
    let det = b * b + b * k * (a + c) + k * k * a * c - c * (2.0 * a - c) * (k - 1.0);
    stable_pair("span_IJ_plus/span_IJ_minus", p, radicand, det)
}

/// Value of one closed-form eigenvalue.
pub fn eigenvalue(id: FormulaId, k: usize, alpha: LeakyParam) -> Result<f64> {
    let co = abc(alpha);
    let kf = k as f64;
    Ok(match id {
        FormulaId::Wedge | FormulaId::WBminusC => co.b - co.c,
        FormulaId::Sym0 => co.b + co.c,
        FormulaId::WPlus => w_pair(kf, co)?.0,
        FormulaId::WMinus => w_pair(kf, co)?.1,
        FormulaId::SpanIjPlus => ij_pair(kf, co)?.0,
        FormulaId::SpanIjMinus => ij_pair(kf, co)?.1,
    })
}

/// All seven entries, in the order of [`FormulaId::ALL`].
pub fn analytic_spectrum(k: usize, alpha: LeakyParam) -> Result<Vec<SpectrumEntry>> {
    check_k(k)?;
    FormulaId::ALL
        .into_iter()
        .map(|id| {
            Ok(SpectrumEntry {
                value: eigenvalue(id, k, alpha)?,
                multiplicity: id.multiplicity(k),
                label: id.family().partition(k as u32),
                formula_id: id,
            })
        })
        .collect()
}

/// Matrices spanning each isotypic component of `R^{k×k}`.
///
/// The spanning families `span_ij`, `ksd`, `sym0` and `wedge` together have
/// `k²` members. `p_perp` lies in `span{I, J}` and `uw` (the matrices
/// `U_{r_i} = -k·D_i`) in the span of the `D_i`; they are kept for reference.
#[derive(Clone, Debug)]
pub struct IsotypicBasis {
    pub k: usize,
    /// `P_⊥ = I - J/k`.
    pub p_perp: DMatrix<f64>,
    /// `U_{r_i} = (r_i𝟏ᵀ + 𝟏r_iᵀ) - k·Diag(r_i)`.
    pub uw: Vec<DMatrix<f64>>,
    /// `[K_i, S_i, D_i]` for `r_i = e_i - e_k`.
    pub ksd: Vec<[DMatrix<f64>; 3]>,
    /// Orthonormal basis of symmetric, zero-diagonal matrices with zero row sums.
    pub sym0: Vec<DMatrix<f64>>,
    /// `r_i r_jᵀ - r_j r_iᵀ` for `i < j`.
    pub wedge: Vec<DMatrix<f64>>,
    /// `[I, J]`.
    pub span_ij: [DMatrix<f64>; 2],
}

/// `U_w = (w𝟏ᵀ + 𝟏wᵀ) - k·Diag(w)`.
pub fn u_w(w: &[f64]) -> DMatrix<f64> {
    let k = w.len();
    DMatrix::from_fn(k, k, |r, s| w[r] + w[s] - if r == s { k as f64 * w[r] } else { 0.0 })
}

fn r_vec(k: usize, i: usize) -> DVector<f64> {
    let mut r = DVector::zeros(k);
    r[i] = 1.0;
    r[k - 1] = -1.0;
    r
}

fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

/// Modified Gram–Schmidt; candidates whose residual norm falls below `tol` are dropped.
fn orthonormalize(candidates: impl IntoIterator<Item = DMatrix<f64>>, against: &[DMatrix<f64>], tol: f64) -> Vec<DMatrix<f64>> {
    let mut out: Vec<DMatrix<f64>> = Vec::new();
    for mut m in candidates {
        for q in against.iter().chain(out.iter()) {
            let p = frob(&m, q);
            m -= q * p;
        }
        for q in against.iter().chain(out.iter()) {
            let p = frob(&m, q);
            m -= q * p;
        }
        let n = m.norm();
        if n > tol {
            out.push(m / n);
        }
    }
    out
}

impl IsotypicBasis {
    /// Spanning matrices of one isotypic component.
    pub fn family(&self, f: IrrepFamily) -> Vec<DMatrix<f64>> {
        match f {
            IrrepFamily::Trivial => self.span_ij.to_vec(),
            IrrepFamily::Standard => self.ksd.iter().flat_map(|t| t.iter().cloned()).collect(),
            IrrepFamily::TwoRow => self.sym0.clone(),
            IrrepFamily::Hook => self.wedge.clone(),
        }
    }

    /// Orthonormal basis of one isotypic component, as columns of a `k²×d` matrix.
    pub fn orthonormal_family(&self, f: IrrepFamily) -> DMatrix<f64> {
        let q = orthonormalize(self.family(f), &[], 1e-10);
        let cols: Vec<DVector<f64>> = q.iter().map(vec_columns).collect();
        DMatrix::from_columns(&cols)
    }

    /// Number of matrices in the spanning families.
    pub fn len(&self) -> usize {
        2 + 3 * self.ksd.len() + self.sym0.len() + self.wedge.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn isotypic_basis(k: usize) -> Result<IsotypicBasis> {
    check_k(k)?;
    let kf = k as f64;
    let ones = DVector::from_element(k, 1.0);
    let id = DMatrix::identity(k, k);
    let j = DMatrix::from_element(k, k, 1.0);
    let p_perp = &id - &j / kf;
    let mut uw = Vec::with_capacity(k - 1);
    let mut ksd = Vec::with_capacity(k - 1);
    for i in 0..k - 1 {
        let r = r_vec(k, i);
        let k_i = &r * ones.transpose() - &ones * r.transpose();
        let s_i = &r * ones.transpose() + &ones * r.transpose();
        let d_i = DMatrix::from_diagonal(&r) - &s_i / kf;
        uw.push(u_w(r.as_slice()));
        ksd.push([k_i, s_i, d_i]);
    }
    let mut wedge = Vec::with_capacity((k - 1) * (k - 2) / 2);
    for i in 0..k - 1 {
        for l in i + 1..k - 1 {
            let (ri, rl) = (r_vec(k, i), r_vec(k, l));
            wedge.push(&ri * rl.transpose() - &rl * ri.transpose());
        }
    }
    let m_family = (0..k).map(|i| {
        DMatrix::from_fn(k, k, |r, s| match (r == i, s == i) {
            (true, true) => 0.0,
            (true, false) | (false, true) => 1.0,
            _ => 0.0,
        })
    });
    let m_ortho = orthonormalize(m_family, &[], 1e-10);
    let pairs = (0..k).flat_map(|r| (r + 1..k).map(move |s| (r, s)));
    let candidates = pairs.map(|(r, s)| {
        let mut e = DMatrix::zeros(k, k);
        e[(r, s)] = 1.0;
        e[(s, r)] = 1.0;
        e
    });
    let sym0 = orthonormalize(candidates, &m_ortho, 1e-8);
    if sym0.len() != k * (k - 3) / 2 {
        return Err(inconsistent(format!("found {} symmetric zero-sum matrices, expected {}", sym0.len(), k * (k - 3) / 2)));
    }
    Ok(IsotypicBasis { k, p_perp, uw, ksd, sym0, wedge, span_ij: [id, j] })
}

/// Restriction of `ℒ_α` to `span{K_i, S_i, D_i}`; row `r` holds the
/// coordinates of `ℒ(X_r)`, so eigenvectors are those of the transpose.
pub fn w_restriction_matrix(k: usize, alpha: LeakyParam) -> Matrix3<f64> {
    let AbcCoefficients { a, b, c } = abc(alpha);
    let kf = k as f64;
    let h = a * kf / 2.0;
    Matrix3::new(b - c + h, h, 0.0, h, b + c + h - 4.0 * c / kf, -4.0 * c, 0.0, -2.0 * c * (kf - 2.0) / (kf * kf), b - c + 4.0 * c / kf)
}

/// Coordinates of `ℒ(K_i), ℒ(S_i), ℒ(D_i)` in the basis `{K_i, S_i, D_i}`,
/// computed by applying the operator and solving the Gram system.
/// The second value is the largest residual outside the span.
pub fn w_restriction_numeric(basis: &IsotypicBasis, i: usize, alpha: LeakyParam) -> Result<(Matrix3<f64>, f64)> {
    let triple = &basis.ksd[i];
    let gram = Matrix3::from_fn(|r, s| frob(&triple[r], &triple[s]));
    let gram_inv = gram.try_inverse().ok_or_else(|| inconsistent("K_i, S_i, D_i are linearly dependent"))?;
    let mut m = Matrix3::zeros();
    let mut resid: f64 = 0.0;
    for r in 0..3 {
        let image = block_operator_apply(&triple[r], alpha)?;
        let rhs = Vector3::from_fn(|s, _| frob(&image, &triple[s]));
        let coords = gram_inv * rhs;
        let mut rebuilt = DMatrix::zeros(basis.k, basis.k);
        for s in 0..3 {
            m[(r, s)] = coords[s];
            rebuilt += &triple[s] * coords[s];
        }
        resid = resid.max((image - rebuilt).amax());
    }
    Ok((m, resid))
}

/// Coefficient vectors `x` such that `Σ x_r X_r` is an eigenmatrix of `ℒ_α`
/// for each of `W_bminus_c`, `W_plus`, `W_minus`.
pub fn w_eigenvectors(k: usize, alpha: LeakyParam) -> Result<[(FormulaId, f64, Vector3<f64>); 3]> {
    check_k(k)?;
    let mt = w_restriction_matrix(k, alpha).transpose();
    let mut out = [(FormulaId::WBminusC, 0.0, Vector3::zeros()); 3];
    for (slot, id) in [FormulaId::WBminusC, FormulaId::WPlus, FormulaId::WMinus].into_iter().enumerate() {
        let lambda = eigenvalue(id, k, alpha)?;
        let shifted = mt - Matrix3::identity() * lambda;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.ok_or_else(|| inconsistent("SVD did not return right singular vectors"))?;
        let (imin, _) = svd.singular_values.argmin();
        let x = v_t.row(imin).transpose();
        out[slot] = (id, lambda, x);
    }
    Ok(out)
}

/// One member of the critical set with the eigenvalues it annihilates.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalValue {
    pub value: f64,
    /// Closed-form eigenvalues whose absolute value at `value` is at most the zero tolerance.
    pub formulas: Vec<FormulaId>,
    /// Distinct isotypic labels of `formulas`.
    pub labels: Vec<Partition>,
    /// Largest `|λ(value)|` over `formulas`.
    pub residual: f64,
}

/// The three leaky parameters where the Hessian at the minimum is singular.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSet {
    pub k: usize,
    pub values: Vec<CriticalValue>,
}

/// `(8π + 2kπ²) / (4 + (k-1)π² + 4π)`, the nonzero root of `W_minus`.
pub fn critical_standard(k: usize) -> f64 {
    let kf = k as f64;
    (8.0 * PI + 2.0 * kf * PI * PI) / (4.0 + (kf - 1.0) * PI * PI + 4.0 * PI)
}

/// `2π(4 - 4k + 2k² + kπ) / ((k-1)(2kπ + π² - 4π - 4))`, the nonzero root of `span_IJ_minus`.
pub fn critical_trivial(k: usize) -> f64 {
    let kf = k as f64;
    2.0 * PI * (4.0 - 4.0 * kf + 2.0 * kf * kf + kf * PI) / ((kf - 1.0) * (2.0 * kf * PI + PI * PI - 4.0 * PI - 4.0))
}

/// Absolute threshold below which an eigenvalue counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

fn critical_value(k: usize, value: f64) -> Result<CriticalValue> {
    let alpha = LeakyParam::new(value)?;
    let mut formulas = Vec::new();
    let mut labels: Vec<Partition> = Vec::new();
    let mut residual: f64 = 0.0;
    for id in FormulaId::ALL {
        let lambda = eigenvalue(id, k, alpha)?;
        if lambda.abs() <= ZERO_TOL {
            formulas.push(id);
            residual = residual.max(lambda.abs());
            let label = id.family().partition(k as u32);
            if !labels.contains(&label) {
                labels.push(label);
            }
        }
    }
    Ok(CriticalValue { value, formulas, labels, residual })
}

pub fn critical_set(k: usize) -> Result<CriticalSet> {
    check_k(k)?;
    let values = [0.0, critical_standard(k), critical_trivial(k)].into_iter().map(|v| critical_value(k, v)).collect::<Result<Vec<_>>>()?;
    Ok(CriticalSet { k, values })
}

/// Residual of the designated eigenvalue at each nonzero critical value.
pub fn critical_residuals(k: usize) -> Result<[f64; 2]> {
    check_k(k)?;
    Ok([
        eigenvalue(FormulaId::WMinus, k, LeakyParam::new(critical_standard(k))?)?.abs(),
        eigenvalue(FormulaId::SpanIjMinus, k, LeakyParam::new(critical_trivial(k))?)?.abs(),
    ])
}

/// Ordering of the critical values and the degeneracy pattern at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderingReport {
    pub k: usize,
    pub values: [f64; 3],
    /// `0 < α_standard < α_trivial`.
    pub chain_holds: bool,
    /// Isotypic components singular at `α = 0`.
    pub zero_families: Vec<IrrepFamily>,
    /// Components singular at zero beyond the hook, two-row and standard ones.
    pub extra_zero_families: Vec<IrrepFamily>,
    pub min_positive: f64,
    /// Every positive critical value exceeds 1.
    pub unit_interval_subcritical: bool,
    /// `|α - 2|` for the two positive values.
    pub asymptote_distance: [f64; 2],
}

pub fn critical_ordering(k: usize) -> Result<OrderingReport> {
    let set = critical_set(k)?;
    let values = [set.values[0].value, set.values[1].value, set.values[2].value];
    let chain_holds = values[0] == 0.0 && 0.0 < values[1] && values[1] < values[2];
    if !chain_holds {
        return Err(inconsistent(format!("critical values out of order at k = {k}: {values:?}")));
    }
    let mut zero_families: Vec<IrrepFamily> = set.values[0].formulas.iter().map(|f| f.family()).collect();
    zero_families.sort();
    zero_families.dedup();
    let expected = [IrrepFamily::Hook, IrrepFamily::TwoRow, IrrepFamily::Standard];
    for f in expected {
        if !zero_families.contains(&f) {
            return Err(inconsistent(format!("{f:?} component is not singular at 0 for k = {k}")));
        }
    }
    let extra_zero_families = zero_families.iter().copied().filter(|f| !expected.contains(f)).collect();
    let min_positive = values[1].min(values[2]);
    Ok(OrderingReport {
        k,
        values,
        chain_holds,
        zero_families,
        extra_zero_families,
        min_positive,
        unit_interval_subcritical: min_positive > 1.0,
        asymptote_distance: [(values[1] - 2.0).abs(), (values[2] - 2.0).abs()],
    })
}

/// Roots of one closed-form eigenvalue found by a sign scan plus bisection.
#[derive(Clone, Debug, PartialEq)]
pub struct RootScan {
    pub formula: FormulaId,
    pub roots: Vec<f64>,
}

/// Scans `α ∈ [lo, hi]` on `steps` equal intervals; exact zeros at grid
/// points and sign changes between them are both reported.
pub fn scan_roots(k: usize, lo: f64, hi: f64, steps: usize) -> Result<Vec<RootScan>> {
    check_k(k)?;
    if lo.partial_cmp(&hi) != Some(core::cmp::Ordering::Less) || steps < 2 {
        return Err(domain("root scan needs lo < hi and at least two steps"));
    }
    let grid = |i: usize| lo + (hi - lo) * (i as f64) / (steps as f64);
    let mut out = Vec::new();
    for id in FormulaId::ALL {
        let f = |x: f64| -> Result<f64> { eigenvalue(id, k, LeakyParam::new(x)?) };
        let mut roots = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=steps {
            let x = grid(i);
            let fx = f(x)?;
            if fx.abs() <= ZERO_TOL {
                roots.push(x);
                prev = None;
                continue;
            }
            if let Some((xp, fp)) = prev {
                if fp.signum() != fx.signum() {
                    let (mut l, mut r, mut fl) = (xp, x, fp);
                    for _ in 0..200 {
                        let m = 0.5 * (l + r);
                        if m <= l || m >= r {
                            break;
                        }
                        let fm = f(m)?;
                        if fm == 0.0 {
                            l = m;
                            r = m;
                            break;
                        }
                        if fm.signum() == fl.signum() {
                            l = m;
                            fl = fm;
                        } else {
                            r = m;
                        }
                    }
                    roots.push(0.5 * (l + r));
                }
            }
            prev = Some((x, fx));
        }
        out.push(RootScan { formula: id, roots });
    }
    Ok(out)
}

/// One group of eigenvalues closer than the clustering gap.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
    /// Dimension carried by each family in [`IrrepFamily::ALL`] order.
    pub family_dims: [f64; 4],
}

/// Comparison of the dense eigensolution with the closed forms.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumMatch {
    pub k: usize,
    pub alpha: f64,
    /// Largest difference between sorted numerical and sorted analytic eigenvalues.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub cluster_gap: f64,
    pub numerical: Vec<Cluster>,
    pub analytic: Vec<Cluster>,
    pub multiplicities_agree: bool,
    /// Family content of matched clusters agrees to `1e-6`.
    pub families_agree: bool,
    /// Eigenvalue, dominant family and its weight, for every numerical eigenvector.
    pub dominant: Vec<(f64, IrrepFamily, f64)>,
    pub passed: bool,
}

fn family_index(f: IrrepFamily) -> usize {
    IrrepFamily::ALL.iter().position(|g| *g == f).unwrap()
}

fn cluster_sorted(values: &[(f64, [f64; 4])], gap: f64) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &(v, dims) in values {
        match out.last_mut() {
            Some(c) if v - last <= gap => {
                let n = c.multiplicity as f64;
                c.value = (c.value * n + v) / (n + 1.0);
                c.multiplicity += 1;
                for (d, x) in c.family_dims.iter_mut().zip(dims) {
                    *d += x;
                }
            }
            _ => out.push(Cluster { value: v, multiplicity: 1, family_dims: dims }),
        }
        last = v;
    }
    out
}

/// Dense eigensolve of the assembled Hessian at the minimum, matched to the closed forms.
pub fn numerical_spectrum_match(k: usize, alpha: LeakyParam, tolerance: f64) -> Result<SpectrumMatch> {
    let dense = assemble_dense(&hessian_at_minimum(k, alpha)?)?;
    spectrum_match_for(&dense, k, alpha, tolerance)
}

/// As [`numerical_spectrum_match`] for a caller-supplied symmetric `k²×k²` matrix.
pub fn spectrum_match_for(dense: &DMatrix<f64>, k: usize, alpha: LeakyParam, tolerance: f64) -> Result<SpectrumMatch> {
    check_k(k)?;
    if k > 64 {
        return Err(Error::Capacity(format!("dense eigensolve limited to k <= 64, got {k}")));
    }
    if dense.nrows() != k * k || dense.ncols() != k * k {
        return Err(domain(format!("expected a {}×{} matrix", k * k, k * k)));
    }
    let eig = SymmetricEigen::new(dense.clone());
    let basis = isotypic_basis(k)?;
    let projectors: Vec<DMatrix<f64>> = IrrepFamily::ALL.iter().map(|&f| basis.orthonormal_family(f)).collect();
    let weights: Vec<DMatrix<f64>> = projectors.iter().map(|q| q.transpose() * &eig.eigenvectors).collect();
    let n = k * k;
    let mut numeric: Vec<(f64, [f64; 4])> = (0..n)
        .map(|col| {
            let mut dims = [0.0; 4];
            for (d, w) in dims.iter_mut().zip(&weights) {
                *d = w.column(col).norm_squared();
            }
            (eig.eigenvalues[col], dims)
        })
        .collect();
    numeric.sort_by(|x, y| x.0.total_cmp(&y.0));
    let spectrum = analytic_spectrum(k, alpha)?;
    let mut analytic: Vec<(f64, [f64; 4])> = Vec::with_capacity(n);
    for e in &spectrum {
        let mut dims = [0.0; 4];
        dims[family_index(e.formula_id.family())] = 1.0;
        analytic.extend(core::iter::repeat_n((e.value, dims), e.multiplicity));
    }
    analytic.sort_by(|x, y| x.0.total_cmp(&y.0));
    let max_deviation = numeric.iter().zip(&analytic).map(|(x, y)| (x.0 - y.0).abs()).fold(0.0, f64::max);
    let norm = eig.eigenvalues.amax().max(1.0);
    let cluster_gap = 1e-8 * norm;
    let num_clusters = cluster_sorted(&numeric, cluster_gap);
    let ana_clusters = cluster_sorted(&analytic, cluster_gap);
    let multiplicities_agree = num_clusters.len() == ana_clusters.len()
        && num_clusters.iter().zip(&ana_clusters).all(|(x, y)| x.multiplicity == y.multiplicity && (x.value - y.value).abs() <= tolerance);
    let families_agree = multiplicities_agree
        && num_clusters
            .iter()
            .zip(&ana_clusters)
            .all(|(x, y)| x.family_dims.iter().zip(&y.family_dims).all(|(p, q)| (p - q).abs() <= 1e-6));
    let dominant = numeric
        .iter()
        .map(|(v, dims)| {
            let (idx, w) = dims.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &w)| if w > acc.1 { (i, w) } else { acc });
            (*v, IrrepFamily::ALL[idx], w)
        })
        .collect();
    let passed = max_deviation <= tolerance && multiplicities_agree && families_agree;
    Ok(SpectrumMatch {
        k,
        alpha: alpha.value(),
        max_deviation,
        tolerance,
        cluster_gap,
        numerical: num_clusters,
        analytic: ana_clusters,
        multiplicities_agree,
        families_agree,
        dominant,
        passed,
    })
}

/// Eigenvalue multiplicities grouped by distinct analytic value, as a map from
/// the formula ids sharing a value to the total multiplicity.
pub fn grouped_multiplicities(k: usize, alpha: LeakyParam) -> Result<BTreeMap<Vec<FormulaId>, usize>> {
    let spectrum = analytic_spectrum(k, alpha)?;
    let mut groups: Vec<(f64, Vec<FormulaId>, usize)> = Vec::new();
    for e in spectrum {
        match groups.iter_mut().find(|g| (g.0 - e.value).abs() <= 1e-12 * e.value.abs().max(1.0)) {
            Some(g) => {
                g.1.push(e.formula_id);
                g.2 += e.multiplicity;
            }
            None => groups.push((e.value, alloc::vec![e.formula_id], e.multiplicity)),
        }
    }
    Ok(groups.into_iter().map(|(_, ids, m)| (ids, m)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn param(a: f64) -> LeakyParam {
        LeakyParam::new(a).unwrap()
    }

    /// Eigenvalues of `½(p ± √D)` by the textbook formula, as an independent check.
    fn naive_w(k: f64, al: f64) -> (f64, f64) {
        let AbcCoefficients { a, b, c } = abc(param(al));
        let p = a * k + 2.0 * b;
        let s = (a * a * k * k + 4.0 * c * (c - 2.0 * a)).sqrt();
        (0.5 * (p + s), 0.5 * (p - s))
    }

    fn naive_ij(k: f64, al: f64) -> (f64, f64) {
        let AbcCoefficients { a, b, c } = abc(param(al));
        let p = 2.0 * b + k * (a + c);
        let s = (k * k * (a - c) * (a - c) + 4.0 * c * (2.0 * a - c) * (k - 1.0)).sqrt();
        (0.5 * (p + s), 0.5 * (p - s))
    }

    #[test]
    fn multiplicities_sum_to_k_squared() {
        for k in 4..40 {
            let total: usize = FormulaId::ALL.iter().map(|f| f.multiplicity(k)).sum();
            assert_eq!(total, k * k);
        }
        assert!(analytic_spectrum(3, param(1.0)).is_err());
    }

    #[test]
    fn stable_roots_agree_with_textbook_formula() {
        for k in [4usize, 5, 9] {
            for i in 0..=40 {
                let al = -3.0 + 0.2 * i as f64;
                let (wp, wm) = naive_w(k as f64, al);
                let (ip, im) = naive_ij(k as f64, al);
                let got = |f| eigenvalue(f, k, param(al)).unwrap();
                assert!((got(FormulaId::WPlus) - wp).abs() < 1e-12);
                assert!((got(FormulaId::WMinus) - wm).abs() < 1e-12);
                assert!((got(FormulaId::SpanIjPlus) - ip).abs() < 1e-12);
                assert!((got(FormulaId::SpanIjMinus) - im).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn w_pair_at_k4_alpha1() {
        // Distinct eigenvalues of the assembled 16×16 matrix from an independent dense solve.
        let wp = eigenvalue(FormulaId::WPlus, 4, param(1.0)).unwrap();
        let wm = eigenvalue(FormulaId::WMinus, 4, param(1.0)).unwrap();
        assert!((wp - 1.1924396279).abs() < 1e-9 && (wm - 0.3075603721).abs() < 1e-9);
    }

    #[test]
    fn two_by_two_restriction_on_identity_and_ones() {
        // Eigenvalues of [[b + c(k-1), a], [c(k-2), ak + b + c]] via its characteristic polynomial.
        for k in [4usize, 6] {
            for al in [0.3, 1.7, 3.2] {
                let AbcCoefficients { a, b, c } = abc(param(al));
                let kf = k as f64;
                let m = nalgebra::Matrix2::new(b + c * (kf - 1.0), a, c * (kf - 2.0), a * kf + b + c);
                let tr = m.trace();
                let det = m.determinant();
                let disc = (tr * tr - 4.0 * det).sqrt();
                let ip = eigenvalue(FormulaId::SpanIjPlus, k, param(al)).unwrap();
                let im = eigenvalue(FormulaId::SpanIjMinus, k, param(al)).unwrap();
                assert!((ip - 0.5 * (tr + disc)).abs() < 1e-12 && (im - 0.5 * (tr - disc)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_identities() {
        for k in [4usize, 5, 7] {
            let basis = isotypic_basis(k).unwrap();
            assert_eq!(basis.len(), k * k);
            let j = DMatrix::from_element(k, k, 1.0);
            let ones = DVector::from_element(k, 1.0);
            for (i, [kk, s, d]) in basis.ksd.iter().enumerate() {
                let r = r_vec(k, i);
                let target = &r * ones.transpose() * k as f64;
                assert!((kk * &j - &target).amax() < 1e-12);
                assert!((s * &j - &target).amax() < 1e-12);
                assert!((d * &j).amax() < 1e-12);
                assert!((&basis.uw[i] + d * k as f64).amax() < 1e-12);
            }
            assert!((&basis.p_perp * &j).amax() < 1e-12);
            let total_rank = IrrepFamily::ALL.iter().map(|&f| basis.orthonormal_family(f).ncols()).sum::<usize>();
            assert_eq!(total_rank, k * k);
        }
        assert!(isotypic_basis(3).is_err());
    }

    #[test]
    fn families_are_mutually_orthogonal() {
        let basis = isotypic_basis(5).unwrap();
        let q: Vec<DMatrix<f64>> = IrrepFamily::ALL.iter().map(|&f| basis.orthonormal_family(f)).collect();
        for x in 0..4 {
            for y in x + 1..4 {
                assert!((q[x].transpose() * &q[y]).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn wedge_and_sym0_are_eigenmatrices() {
        for k in [4usize, 6] {
            let basis = isotypic_basis(k).unwrap();
            for al in [-0.7, 0.5, 2.2] {
                let AbcCoefficients { b, c, .. } = abc(param(al));
                for w in &basis.wedge {
                    assert!((block_operator_apply(w, param(al)).unwrap() - w * (b - c)).amax() < 1e-12);
                }
                for s in &basis.sym0 {
                    assert!((block_operator_apply(s, param(al)).unwrap() - s * (b + c)).amax() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn w_restriction_matches_printed_matrix() {
        for k in [4usize, 5, 8] {
            let basis = isotypic_basis(k).unwrap();
            for al in [0.4, 1.0, 2.9] {
                let printed = w_restriction_matrix(k, param(al));
                for i in 0..k - 1 {
                    let (m, resid) = w_restriction_numeric(&basis, i, param(al)).unwrap();
                    assert!(resid < 1e-12);
                    assert!((m - printed).amax() < 1e-12, "k={k} α={al}");
                }
            }
        }
    }

    #[test]
    fn w_eigenmatrices_have_small_residual() {
        for k in [4usize, 5, 7] {
            let basis = isotypic_basis(k).unwrap();
            for al in [0.5, 1.3, 3.0] {
                for (_, lambda, x) in w_eigenvectors(k, param(al)).unwrap() {
                    for triple in &basis.ksd {
                        let b = &triple[0] * x[0] + &triple[1] * x[1] + &triple[2] * x[2];
                        let b = &b / b.amax();
                        let r = block_operator_apply(&b, param(al)).unwrap() - &b * lambda;
                        assert!(r.amax() <= 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn critical_values_at_k5_and_k4() {
        let set = critical_set(5).unwrap();
        assert_eq!(set.values[0].value, 0.0);
        assert!((set.values[1].value - 2.2094612037).abs() < 1e-9);
        assert!((set.values[2].value - 3.1587272826).abs() < 1e-9);
        assert_eq!(libm::round(set.values[2].value * 1e3) / 1e3, 3.159);
        assert_eq!(set.values[1].formulas, alloc::vec![FormulaId::WMinus]);
        assert_eq!(set.values[2].formulas, alloc::vec![FormulaId::SpanIjMinus]);
        assert!((critical_standard(4) - 2.254).abs() < 1e-3);
        for r in critical_residuals(5).unwrap() {
            assert!(r <= 1e-12);
        }
    }

    #[test]
    fn zero_is_singular_for_four_components() {
        let report = critical_ordering(5).unwrap();
        assert_eq!(report.zero_families, alloc::vec![IrrepFamily::Trivial, IrrepFamily::Standard, IrrepFamily::TwoRow, IrrepFamily::Hook]);
        assert_eq!(report.extra_zero_families, alloc::vec![IrrepFamily::Trivial]);
    }

    #[test]
    fn ordering_chain_and_subcriticality() {
        for k in 4..=64 {
            let r = critical_ordering(k).unwrap();
            assert!(r.chain_holds && r.unit_interval_subcritical && r.values[1] > 2.0);
        }
        let far = critical_ordering(1_000_000).unwrap();
        assert!(far.asymptote_distance[0] <= 1e-4 && far.asymptote_distance[1] <= 1e-4);
    }

    #[test]
    fn no_negative_roots_and_labelled_roots_only() {
        for k in 4..=16 {
            let set = critical_set(k).unwrap();
            for scan in scan_roots(k, -10.0, 10.0, 4000).unwrap() {
                assert!(scan.roots.iter().all(|&r| r >= 0.0), "{scan:?}");
                for &r in scan.roots.iter().filter(|&&r| r != 0.0) {
                    let owner = set.values.iter().find(|v| (v.value - r).abs() < 1e-9).expect("unlisted root");
                    assert_eq!(owner.formulas, alloc::vec![scan.formula]);
                }
            }
        }
    }

    #[test]
    fn dense_spectrum_matches_closed_forms() {
        let m = numerical_spectrum_match(5, param(1.0), 1e-10).unwrap();
        assert!(m.passed, "{m:?}");
        let mut mults: Vec<usize> = m.numerical.iter().map(|c| c.multiplicity).collect();
        mults.sort();
        assert_eq!(mults, alloc::vec![1, 1, 4, 4, 5, 10]);
        let zero = numerical_spectrum_match(4, param(0.0), 1e-10).unwrap();
        assert!(zero.passed);
        assert_eq!(zero.numerical.len(), 2);
    }

    #[test]
    fn perturbed_matrix_fails_the_match() {
        let mut dense = assemble_dense(&hessian_at_minimum(5, param(1.0)).unwrap()).unwrap();
        dense[(0, 0)] += 1e-3;
        assert!(!spectrum_match_for(&dense, 5, param(1.0), 1e-10).unwrap().passed);
    }

    #[test]
    fn formula_names_round_trip() {
        for f in FormulaId::ALL {
            assert_eq!(FormulaId::from_name(f.name()), Some(f));
        }
    }

    proptest! {
        #[test]
        fn trace_matches_weighted_sum(k in 4usize..9, al in -2.0f64..4.0) {
            let spectrum = analytic_spectrum(k, param(al)).unwrap();
            let sum: f64 = spectrum.iter().map(|e| e.value * e.multiplicity as f64).sum();
            let dense = assemble_dense(&hessian_at_minimum(k, param(al)).unwrap()).unwrap();
            prop_assert!((sum - dense.trace()).abs() <= 1e-9);
        }
    }
}
