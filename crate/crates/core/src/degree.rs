//! Equivariant gradient degrees in the Burnside ring `A(S_k)`: basic degrees
//! of the irreducibles in `R^{k×k}`, degrees of the Hessian at the minimum,
//! and the bifurcation invariants at the critical leaky parameters.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::burnside::{BurnsideElement, SubgroupLattice, MAX_K};
use crate::error::{domain, inconsistent, Error, Result};
use crate::landscape::LeakyParam;
use crate::spectral::{
    analytic_spectrum, critical_ordering, critical_set, scan_roots, CriticalSet, FormulaId, OrderingReport, SpectrumEntry, ZERO_TOL,
};
use crate::symrep::{
    decompose_diag_square, fixed_space_dim, hook_dimension, ClassFunction, IrrepFamily, IsotypicMultiplicities, Partition,
};

/// `dim V^H` for every class `(H)` of the lattice.
pub fn fixed_dims(chi: &ClassFunction, lattice: &SubgroupLattice) -> Result<Vec<u64>> {
    (0..lattice.len()).map(|i| fixed_space_dim(chi, lattice.cycle_types(i))).collect()
}

/// Classes with a nonzero fixed space that are maximal among such classes.
pub fn isotropy_maximal_types(dims: &[u64], lattice: &SubgroupLattice) -> Vec<usize> {
    (0..lattice.len()).filter(|&h| dims[h] > 0 && !(0..lattice.len()).any(|l| l != h && dims[l] > 0 && lattice.leq(h, l))).collect()
}

/// Supported classes of `x` that are maximal among the supported classes.
pub fn maximal_orbit_types(x: &BurnsideElement, lattice: &SubgroupLattice) -> Vec<usize> {
    let support = x.support();
    support.iter().copied().filter(|&h| !support.iter().any(|&l| l != h && lattice.leq(h, l))).collect()
}

/// Isotropy-maximal classes of a representation where `x` has a nonzero coefficient.
pub fn certified_types(x: &BurnsideElement, dims: &[u64], lattice: &SubgroupLattice) -> Vec<usize> {
    isotropy_maximal_types(dims, lattice).into_iter().filter(|&h| x.coeff(h) != 0).collect()
}

/// Basic gradient degree of one irreducible.
#[derive(Clone, Debug)]
pub struct BasicDegree {
    pub irrep: Partition,
    pub element: BurnsideElement,
    /// Isotropy-maximal classes with a nonzero coefficient.
    pub maximal_types: Vec<usize>,
    /// `dim V^H` per class.
    pub fixed_dims: Vec<u64>,
}

/// `n_K = ((-1)^{dim V^K} - Σ_{L > K} n_L n(K,L) |W(L)|) / |W(K)|`, descending from `(S_k)`.
pub fn basic_degree(eta: &Partition, lattice: &SubgroupLattice) -> Result<BasicDegree> {
    if eta.n() != lattice.k() {
        return Err(domain(format!("partition of {} on a lattice for k = {}", eta.n(), lattice.k())));
    }
    let chi = ClassFunction::irreducible(eta)?;
    let dims = fixed_dims(&chi, lattice)?;
    let m = lattice.len();
    let mut coeffs = alloc::vec![0i64; m];
    for kc in (0..m).rev() {
        let mut acc: i64 = if dims[kc] % 2 == 0 { 1 } else { -1 };
        for (l, &c) in coeffs.iter().enumerate().skip(kc + 1) {
            if c != 0 && lattice.leq(kc, l) {
                acc -= c * lattice.n(kc, l) as i64 * lattice.weyl(l) as i64;
            }
        }
        let w = lattice.weyl(kc) as i64;
        if acc % w != 0 {
            return Err(inconsistent(format!("basic degree of {eta} at class {kc}: {acc} not divisible by {w}")));
        }
        coeffs[kc] = acc / w;
    }
    let element = BurnsideElement::from_coeffs(coeffs);
    let maximal_types = certified_types(&element, &dims, lattice);
    Ok(BasicDegree { irrep: eta.clone(), element, maximal_types, fixed_dims: dims })
}

/// One departure from the leading-coefficient rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingViolation {
    pub class: usize,
    pub coefficient: i64,
    pub weyl_order: u64,
    pub fixed_dim: u64,
}

/// Leading coefficients at the isotropy-maximal classes: `-1` when `|W(K)| = 2`,
/// `-2` when `|W(K)| = 1`, with `dim V^K` odd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingCoefficientReport {
    pub irrep: Partition,
    pub checked: Vec<usize>,
    pub violations: Vec<LeadingViolation>,
    /// `(S_k)` is not covered by the rule and is reported here instead.
    pub exempt: Vec<LeadingViolation>,
}

pub fn leading_coefficient_check(bd: &BasicDegree, lattice: &SubgroupLattice) -> LeadingCoefficientReport {
    let mut checked = Vec::new();
    let mut violations = Vec::new();
    let mut exempt = Vec::new();
    for &h in &bd.maximal_types {
        let record =
            LeadingViolation { class: h, coefficient: bd.element.coeff(h), weyl_order: lattice.weyl(h), fixed_dim: bd.fixed_dims[h] };
        let expected = match record.weyl_order {
            1 => Some(-2),
            2 => Some(-1),
            _ => None,
        };
        let ok = expected == Some(record.coefficient) && record.fixed_dim % 2 == 1;
        if h == lattice.top() {
            if !ok {
                exempt.push(record);
            }
            continue;
        }
        checked.push(h);
        if !ok {
            violations.push(record);
        }
    }
    LeadingCoefficientReport { irrep: bd.irrep.clone(), checked, violations, exempt }
}

/// Basic degrees of the four irreducibles occurring in `R^{k×k}`.
#[derive(Clone, Debug)]
pub struct BasicDegrees {
    pub k: u32,
    pub degrees: BTreeMap<IrrepFamily, BasicDegree>,
}

impl BasicDegrees {
    pub fn get(&self, f: IrrepFamily) -> &BasicDegree {
        &self.degrees[&f]
    }

    /// Fixed-space dimensions of the direct sum of the given families.
    pub fn sum_dims(&self, families: &[IrrepFamily]) -> Vec<u64> {
        let m = self.degrees.values().next().map_or(0, |d| d.fixed_dims.len());
        let mut out = alloc::vec![0u64; m];
        for f in families {
            for (o, d) in out.iter_mut().zip(&self.get(*f).fixed_dims) {
                *o += d;
            }
        }
        out
    }
}

pub fn basic_degrees(lattice: &SubgroupLattice) -> Result<BasicDegrees> {
    let k = lattice.k();
    if k < 4 {
        return Err(domain(format!("basic degrees of R^(k×k) need k >= 4, got {k}")));
    }
    let degrees = IrrepFamily::ALL.iter().map(|&f| Ok((f, basic_degree(&f.partition(k), lattice)?))).collect::<Result<BTreeMap<_, _>>>()?;
    Ok(BasicDegrees { k, degrees })
}

/// Degree of an invertible linear map given by its spectrum: the product of
/// `deg_η^{copies}` over negative eigenvalues, `copies` being the number of
/// copies of the irreducible in the eigenspace.
pub fn linear_map_degree(
    spectrum: &[SpectrumEntry],
    multiplicities: &IsotypicMultiplicities,
    degrees: &BasicDegrees,
    alpha: f64,
    lattice: &SubgroupLattice,
) -> Result<BurnsideElement> {
    let mut copies_by_label: BTreeMap<Partition, u32> = BTreeMap::new();
    let mut result = BurnsideElement::unit(lattice);
    for e in spectrum {
        let dim = hook_dimension(&e.label) as usize;
        if e.multiplicity % dim != 0 {
            return Err(inconsistent(format!("{} has multiplicity {} not divisible by dim {}", e.formula_id.name(), e.multiplicity, dim)));
        }
        let copies = (e.multiplicity / dim) as u32;
        *copies_by_label.entry(e.label.clone()).or_default() += copies;
        if e.value.abs() <= ZERO_TOL {
            return Err(Error::Degenerate { formula: e.formula_id.name(), alpha });
        }
        if e.value < 0.0 {
            let family = IrrepFamily::of_partition(&e.label).ok_or_else(|| domain(format!("no basic degree for {}", e.label)))?;
            result = result.mul(&degrees.get(family).element.pow(copies, lattice)?, lattice)?;
        }
    }
    for (label, copies) in &copies_by_label {
        if multiplicities.get(label) != *copies {
            return Err(inconsistent(format!("spectrum has {copies} copies of {label}, decomposition has {}", multiplicities.get(label))));
        }
    }
    Ok(result)
}

/// Degree of the Hessian at the minimum for a non-critical `alpha`.
pub fn degree_at(alpha: f64, degrees: &BasicDegrees, lattice: &SubgroupLattice) -> Result<BurnsideElement> {
    let k = lattice.k();
    let spectrum = analytic_spectrum(k as usize, LeakyParam::new(alpha)?)?;
    let mult = decompose_diag_square(k)?;
    linear_map_degree(&spectrum, &mult, degrees, alpha, lattice)
}

/// How the degree changes across a critical value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantModel {
    /// Each critical value multiplies the degree by the basic degrees of the
    /// families assigned to it, once per family, in increasing order of α.
    /// The trivial component's zero at `α = 0` is not counted.
    Crossing,
    /// Degrees just left and right of the critical value computed from the
    /// signs of the closed-form eigenvalues.
    Spectral,
}

/// `ω = deg(α₋) - deg(α₊)` at one critical value.
#[derive(Clone, Debug)]
pub struct BifurcationInvariant {
    pub index: usize,
    pub critical_value: f64,
    pub model: InvariantModel,
    /// Families whose crossing defines the invariant.
    pub families: Vec<IrrepFamily>,
    pub labels: Vec<Partition>,
    pub element: BurnsideElement,
    /// Isotropy-maximal classes of the crossing families with nonzero coefficient.
    pub maximal_types: Vec<usize>,
    /// Maximal classes of the support of `element`.
    pub support_maximal_types: Vec<usize>,
}

fn check_ring_capacity(k: u32) -> Result<()> {
    if !(4..=MAX_K).contains(&k) {
        return Err(Error::Capacity(format!("Burnside-ring computations support 4 <= k <= {MAX_K}, got {k}")));
    }
    Ok(())
}

/// Families assigned to each critical value under [`InvariantModel::Crossing`].
pub fn crossing_families(set: &CriticalSet) -> Vec<Vec<IrrepFamily>> {
    set.values
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let mut fams: Vec<IrrepFamily> = v.formulas.iter().map(|f| f.family()).collect();
            fams.sort();
            fams.dedup();
            if idx == 0 {
                fams.retain(|f| *f != IrrepFamily::Trivial);
            }
            fams
        })
        .collect()
}

fn product_of(families: &[IrrepFamily], degrees: &BasicDegrees, lattice: &SubgroupLattice) -> Result<BurnsideElement> {
    families.iter().try_fold(BurnsideElement::unit(lattice), |acc, f| acc.mul(&degrees.get(*f).element, lattice))
}

fn finish_invariant(
    index: usize,
    critical_value: f64,
    model: InvariantModel,
    families: Vec<IrrepFamily>,
    element: BurnsideElement,
    degrees: &BasicDegrees,
    lattice: &SubgroupLattice,
) -> BifurcationInvariant {
    let dims = degrees.sum_dims(&families);
    let maximal_types = certified_types(&element, &dims, lattice);
    let support_maximal_types = maximal_orbit_types(&element, lattice);
    let labels = families.iter().map(|f| f.partition(lattice.k())).collect();
    BifurcationInvariant { index, critical_value, model, families, labels, element, maximal_types, support_maximal_types }
}

/// `ω` at critical value number `which` (0, 1, 2 in increasing order):
/// `Π_{earlier crossings} deg · ((S_k) - Π_{this crossing} deg)`.
pub fn bifurcation_invariant(which: usize, degrees: &BasicDegrees, lattice: &SubgroupLattice) -> Result<BifurcationInvariant> {
    let k = lattice.k();
    check_ring_capacity(k)?;
    let set = critical_set(k as usize)?;
    if which >= set.values.len() {
        return Err(domain(format!("critical value index {which} out of range")));
    }
    let crossings = crossing_families(&set);
    let before: Vec<IrrepFamily> = crossings[..which].iter().flatten().copied().collect();
    let prefix = product_of(&before, degrees, lattice)?;
    let here = product_of(&crossings[which], degrees, lattice)?;
    let element = prefix.mul(&BurnsideElement::unit(lattice).sub(&here), lattice)?;
    // The ring is commutative; the factor order must not matter.
    let swapped = BurnsideElement::unit(lattice).sub(&here).mul(&prefix, lattice)?;
    if swapped != element {
        return Err(inconsistent("Burnside product is not commutative"));
    }
    Ok(finish_invariant(which, set.values[which].value, InvariantModel::Crossing, crossings[which].clone(), element, degrees, lattice))
}

/// Sample points strictly inside each component of `R ∖ Λ`, in increasing order.
pub fn interval_samples(set: &CriticalSet, per_interval: usize) -> Vec<Vec<f64>> {
    let v: Vec<f64> = set.values.iter().map(|c| c.value).collect();
    let gap = (v[1] - v[0]).min(v[2] - v[1]);
    let mut bounds: Vec<(f64, f64)> = alloc::vec![(v[0] - 2.0 * gap, v[0])];
    for w in v.windows(2) {
        bounds.push((w[0], w[1]));
    }
    bounds.push((v[2], v[2] + 2.0 * gap));
    bounds.into_iter().map(|(lo, hi)| (1..=per_interval).map(|i| lo + (hi - lo) * i as f64 / (per_interval + 1) as f64).collect()).collect()
}

/// `ω` at critical value `which` from the eigenvalue signs on either side.
pub fn spectral_invariant(which: usize, degrees: &BasicDegrees, lattice: &SubgroupLattice) -> Result<BifurcationInvariant> {
    let k = lattice.k();
    check_ring_capacity(k)?;
    let set = critical_set(k as usize)?;
    if which >= set.values.len() {
        return Err(domain(format!("critical value index {which} out of range")));
    }
    let samples = interval_samples(&set, 1);
    let left = degree_at(samples[which][0], degrees, lattice)?;
    let right = degree_at(samples[which + 1][0], degrees, lattice)?;
    let mut families: Vec<IrrepFamily> = set.values[which].formulas.iter().map(|f| f.family()).collect();
    families.sort();
    families.dedup();
    Ok(finish_invariant(which, set.values[which].value, InvariantModel::Spectral, families, left.sub(&right), degrees, lattice))
}

/// Degrees on the four components of `R ∖ Λ` and whether they are constant on each.
#[derive(Clone, Debug)]
pub struct HomotopyReport {
    pub samples: Vec<Vec<f64>>,
    pub degrees: Vec<BurnsideElement>,
    pub constant_on_components: bool,
}

pub fn homotopy_report(per_interval: usize, degrees: &BasicDegrees, lattice: &SubgroupLattice) -> Result<HomotopyReport> {
    let set = critical_set(lattice.k() as usize)?;
    let samples = interval_samples(&set, per_interval);
    let mut out = Vec::new();
    let mut constant = true;
    for pts in &samples {
        let first = degree_at(pts[0], degrees, lattice)?;
        for &p in &pts[1..] {
            constant &= degree_at(p, degrees, lattice)? == first;
        }
        out.push(first);
    }
    Ok(HomotopyReport { samples, degrees: out, constant_on_components: constant })
}

/// Ring identities of the basic degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingLawReport {
    /// Families whose basic degree does not square to `(S_k)`.
    pub involution_failures: Vec<IrrepFamily>,
    /// `(family, family, class)` where a shared maximal class does not cancel.
    pub cancellation_failures: Vec<(IrrepFamily, IrrepFamily, usize)>,
    /// Number of shared maximal classes checked.
    pub cancellation_checked: usize,
    /// `(family, other, class)` where the persistence law applies but fails.
    pub persistence_failures: Vec<(IrrepFamily, IrrepFamily, usize)>,
    pub persistence_checked: usize,
    /// `(family, other, class, product coefficient, factor coefficient)` where
    /// the class lies below a non-top class of the other factor's support, so
    /// the law makes no prediction.
    pub persistence_not_applicable: Vec<(IrrepFamily, IrrepFamily, usize, i64, i64)>,
}

impl RingLawReport {
    pub fn holds(&self) -> bool {
        self.involution_failures.is_empty() && self.cancellation_failures.is_empty() && self.persistence_failures.is_empty()
    }
}

/// Involution, cancellation of shared maximal classes, and persistence of
/// unshared ones, over all pairs of the non-trivial basic degrees.
pub fn ring_law_report(degrees: &BasicDegrees, lattice: &SubgroupLattice) -> Result<RingLawReport> {
    let unit = BurnsideElement::unit(lattice);
    let mut report = RingLawReport {
        involution_failures: Vec::new(),
        cancellation_failures: Vec::new(),
        cancellation_checked: 0,
        persistence_failures: Vec::new(),
        persistence_checked: 0,
        persistence_not_applicable: Vec::new(),
    };
    for (&f, d) in &degrees.degrees {
        if d.element.mul(&d.element, lattice)? != unit {
            report.involution_failures.push(f);
        }
    }
    let fams = [IrrepFamily::Hook, IrrepFamily::TwoRow, IrrepFamily::Standard];
    for (i, &fx) in fams.iter().enumerate() {
        for &fy in &fams[i + 1..] {
            let (x, y) = (degrees.get(fx), degrees.get(fy));
            let prod = x.element.mul(&y.element, lattice)?;
            for (a, b, fa, fb) in [(x, y, fx, fy), (y, x, fy, fx)] {
                for &h in &a.maximal_types {
                    if b.maximal_types.contains(&h) {
                        if fa < fb {
                            report.cancellation_checked += 1;
                            if prod.coeff(h) != 0 {
                                report.cancellation_failures.push((fa, fb, h));
                            }
                        }
                        continue;
                    }
                    let blocked = b.element.support().into_iter().any(|l| l != lattice.top() && l != h && lattice.leq(h, l));
                    if blocked {
                        report.persistence_not_applicable.push((fa, fb, h, prod.coeff(h), a.element.coeff(h)));
                        continue;
                    }
                    report.persistence_checked += 1;
                    if prod.coeff(h) != a.element.coeff(h) {
                        report.persistence_failures.push((fa, fb, h));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// One term `c·(label)` of a published expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublishedTerm {
    pub coeff: i64,
    pub label: String,
}

/// A Burnside-ring element written with external class names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublishedExpansion {
    pub name: String,
    pub terms: Vec<PublishedTerm>,
}

impl PublishedExpansion {
    /// Parses sums such as `-(Z1) + 2(D1) - 3(S4)`.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let mut sign = 1i64;
            if let Some(r) = rest.strip_prefix('+') {
                rest = r.trim_start();
            } else if let Some(r) = rest.strip_prefix('-') {
                sign = -1;
                rest = r.trim_start();
            } else if !terms.is_empty() {
                return Err(domain(format!("expected '+' or '-' before {rest:?}")));
            }
            let open = rest.find('(').ok_or_else(|| domain(format!("missing '(' in {rest:?}")))?;
            let digits = rest[..open].trim();
            let magnitude: i64 =
                if digits.is_empty() { 1 } else { digits.parse().map_err(|_| domain(format!("bad coefficient {digits:?}")))? };
            let close = rest[open..].find(')').ok_or_else(|| domain("missing ')'"))? + open;
            let label = rest[open + 1..close].trim();
            if label.is_empty() {
                return Err(domain("empty class label"));
            }
            terms.push(PublishedTerm { coeff: sign * magnitude, label: label.to_string() });
            rest = rest[close + 1..].trim_start();
        }
        Ok(PublishedExpansion { name: name.to_string(), terms })
    }

    /// Sum of the coefficients written against `label`.
    pub fn coefficient(&self, label: &str) -> i64 {
        self.terms.iter().filter(|t| t.label == label).map(|t| t.coeff).sum()
    }

    /// Labels written more than once.
    pub fn repeated_labels(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for t in &self.terms {
            if !seen.insert(t.label.as_str()) && !out.contains(&t.label) {
                out.push(t.label.clone());
            }
        }
        out
    }

    pub fn labels(&self) -> BTreeSet<String> {
        self.terms.iter().map(|t| t.label.clone()).collect()
    }
}

fn factorial_u64(n: u64) -> u64 {
    (1..=n).product()
}

/// Group order implied by a conventional name: `Z_n`, `D_n` (order `2n`), `V_4`, `A_n`, `S_n`.
pub fn implied_order(label: &str) -> Option<u64> {
    let label = label.replace(['_', '{', '}', ' '], "");
    let (head, tail) = label.split_at(label.find(|c: char| c.is_ascii_digit())?);
    let n: u64 = tail.parse().ok()?;
    match head {
        "Z" => Some(n),
        "D" => Some(2 * n),
        "V" if n == 4 => Some(4),
        "A" => Some(factorial_u64(n) / 2),
        "S" => Some(factorial_u64(n)),
        _ => None,
    }
}

/// Correspondence between published class names and lattice classes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NameMap {
    pub assigned: BTreeMap<String, usize>,
    pub ambiguous: Vec<(String, Vec<usize>)>,
    pub unresolved: Vec<String>,
}

/// Infers the name map: a label may denote class `c` when the implied order
/// matches and, in every pair, the computed coefficient at `c` equals the
/// published coefficient of the label. Unique candidates are assigned and
/// removed from the other labels until nothing changes.
pub fn infer_name_map(pairs: &[(&PublishedExpansion, &BurnsideElement)], lattice: &SubgroupLattice) -> NameMap {
    let labels: BTreeSet<String> = pairs.iter().flat_map(|(p, _)| p.labels()).collect();
    let mut candidates: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for label in &labels {
        let order = implied_order(label);
        let c: Vec<usize> = (0..lattice.len())
            .filter(|&id| order.is_none_or(|o| lattice.class(id).order == o))
            .filter(|&id| pairs.iter().all(|(p, x)| x.coeff(id) == p.coefficient(label)))
            .collect();
        candidates.insert(label.clone(), c);
    }
    let mut map = NameMap::default();
    loop {
        let unique: Vec<(String, usize)> = candidates.iter().filter(|(_, c)| c.len() == 1).map(|(l, c)| (l.clone(), c[0])).collect();
        if unique.is_empty() {
            break;
        }
        for (label, id) in unique {
            candidates.remove(&label);
            for c in candidates.values_mut() {
                c.retain(|&x| x != id);
            }
            map.assigned.insert(label, id);
        }
    }
    for (label, c) in candidates {
        if c.is_empty() {
            map.unresolved.push(label);
        } else {
            map.ambiguous.push((label, c));
        }
    }
    map
}

/// Comparison of a published expansion with a computed element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionMatch {
    pub name: String,
    /// Coefficients agree class by class under the name map.
    pub exact: bool,
    /// Multisets of `(coefficient, order, Weyl order, containment profile)` agree.
    pub multiset_equal: bool,
    pub unmapped_labels: Vec<String>,
    pub repeated_labels: Vec<String>,
    /// `(class, computed, published)` for every differing class.
    pub differences: Vec<(usize, i64, i64)>,
}

/// Orders and Weyl orders of the classes strictly above `h`.
fn containment_profile(h: usize, lattice: &SubgroupLattice) -> Vec<(u64, u64)> {
    let mut p: Vec<(u64, u64)> =
        (0..lattice.len()).filter(|&l| l != h && lattice.leq(h, l)).map(|l| (lattice.class(l).order, lattice.weyl(l))).collect();
    p.sort();
    p
}

type Signature = (i64, u64, u64, Vec<(u64, u64)>);

fn signature(coeff: i64, h: usize, lattice: &SubgroupLattice) -> Signature {
    (coeff, lattice.class(h).order, lattice.weyl(h), containment_profile(h, lattice))
}

pub fn match_expansion(
    published: &PublishedExpansion,
    computed: &BurnsideElement,
    map: &NameMap,
    lattice: &SubgroupLattice,
) -> ExpansionMatch {
    let mut as_element = BurnsideElement::zero(lattice);
    let mut unmapped = Vec::new();
    let mut published_sigs: Vec<Signature> = Vec::new();
    for t in &published.terms {
        match map.assigned.get(&t.label) {
            Some(&id) => {
                as_element.set(id, as_element.coeff(id) + t.coeff);
                published_sigs.push(signature(t.coeff, id, lattice));
            }
            None => {
                if !unmapped.contains(&t.label) {
                    unmapped.push(t.label.clone());
                }
                published_sigs.push((t.coeff, implied_order(&t.label).unwrap_or(0), 0, Vec::new()));
            }
        }
    }
    let mut computed_sigs: Vec<Signature> = computed.support().into_iter().map(|h| signature(computed.coeff(h), h, lattice)).collect();
    published_sigs.sort();
    computed_sigs.sort();
    let differences: Vec<(usize, i64, i64)> = (0..lattice.len())
        .filter(|&h| computed.coeff(h) != as_element.coeff(h))
        .map(|h| (h, computed.coeff(h), as_element.coeff(h)))
        .collect();
    ExpansionMatch {
        name: published.name.clone(),
        exact: unmapped.is_empty() && differences.is_empty(),
        multiset_equal: published_sigs == computed_sigs,
        unmapped_labels: unmapped,
        repeated_labels: published.repeated_labels(),
        differences,
    }
}

/// Relabelings of a single term that make `published` match `computed` exactly,
/// as `(term index, old label, new label)`.
pub fn single_substitution_repairs(
    published: &PublishedExpansion,
    computed: &BurnsideElement,
    map: &NameMap,
    lattice: &SubgroupLattice,
) -> Vec<(usize, String, String)> {
    let mut out = Vec::new();
    for (idx, term) in published.terms.iter().enumerate() {
        for label in map.assigned.keys().filter(|l| **l != term.label) {
            let mut trial = published.clone();
            trial.terms[idx].label = label.clone();
            if match_expansion(&trial, computed, map, lattice).exact {
                out.push((idx, term.label.clone(), label.clone()));
            }
        }
    }
    out
}

/// Clause-by-clause check of the bifurcation statement at width `k`.
#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub k: usize,
    pub critical: CriticalSet,
    pub ordering: OrderingReport,
    /// Roots of closed-form eigenvalues in `[-10, 0)`.
    pub negative_roots: Vec<(FormulaId, f64)>,
    /// Nonzero roots in `[-10, 10]` that are not critical values.
    pub unexpected_roots: Vec<(FormulaId, f64)>,
    /// Crossing-model invariants, when the ring computation is in capacity.
    pub invariants: Option<Vec<BifurcationInvariant>>,
    /// Clause (i): every invariant is nonzero and names at least one class.
    pub clause_i: Option<bool>,
    /// Clause (ii): no negative critical values and no extra roots.
    pub clause_ii: bool,
    /// Clause (iii): the smallest positive critical value exceeds 1.
    pub clause_iii: bool,
    pub capacity_notice: Option<String>,
}

pub fn theorem_report(k: usize, lattice: Option<&SubgroupLattice>) -> Result<TheoremReport> {
    let critical = critical_set(k)?;
    let ordering = critical_ordering(k)?;
    let mut negative_roots = Vec::new();
    let mut unexpected_roots = Vec::new();
    if k <= 64 {
        for scan in scan_roots(k, -10.0, 10.0, 4000)? {
            for r in scan.roots {
                if r < 0.0 {
                    negative_roots.push((scan.formula, r));
                } else if r != 0.0 && !critical.values.iter().any(|v| (v.value - r).abs() <= 1e-9 * v.value.max(1.0)) {
                    unexpected_roots.push((scan.formula, r));
                }
            }
        }
    }
    let clause_ii = negative_roots.is_empty() && unexpected_roots.is_empty() && critical.values.iter().all(|v| v.value >= 0.0);
    let clause_iii = ordering.unit_interval_subcritical;
    let (invariants, clause_i, capacity_notice) = match lattice {
        Some(l) if (4..=MAX_K as usize).contains(&k) && l.k() as usize == k => {
            let degrees = basic_degrees(l)?;
            let inv = (0..3).map(|i| bifurcation_invariant(i, &degrees, l)).collect::<Result<Vec<_>>>()?;
            let ok = inv.iter().all(|w| !w.element.is_zero() && !w.maximal_types.is_empty());
            (Some(inv), Some(ok), None)
        }
        Some(l) if l.k() as usize != k => return Err(domain(format!("lattice is for k = {} but report asked for k = {k}", l.k()))),
        _ => (None, None, Some(format!("ring-level degrees need 4 <= k <= {MAX_K}; only spectral clauses are checked for k = {k}"))),
    };
    Ok(TheoremReport {
        k,
        critical,
        ordering,
        negative_roots,
        unexpected_roots,
        invariants,
        clause_i,
        clause_ii,
        clause_iii,
        capacity_notice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burnside::build_lattice;

    fn lattice5() -> SubgroupLattice {
        build_lattice(5).unwrap()
    }

    fn by_label(l: &SubgroupLattice, pairs: &[(i64, &str)]) -> BurnsideElement {
        let mut x = BurnsideElement::zero(l);
        for &(c, name) in pairs {
            let id = l.find_label(name).unwrap_or_else(|| panic!("no class {name}"));
            x.set(id, c);
        }
        x
    }

    #[test]
    fn trivial_irrep_degree_is_minus_top() {
        let l = lattice5();
        let d = basic_degree(&Partition::trivial(5), &l).unwrap();
        assert_eq!(d.element, BurnsideElement::unit(&l).scale(-1));
        assert_eq!(d.maximal_types, alloc::vec![l.top()]);
        assert!(basic_degree(&Partition::trivial(4), &l).is_err());
    }

    #[test]
    fn width5_basic_degrees() {
        // Independent oracle: fixed-point recursion in a separate prototype,
        // written with this crate's class labels.
        let l = lattice5();
        let d = basic_degrees(&l).unwrap();
        let hook = by_label(
            &l,
            &[(-1, "Z1"), (1, "Z2[221]"), (2, "Z2[2111]"), (1, "Z3"), (-1, "Z4"), (-1, "V4[221]"), (-1, "Z6"), (-1, "D3[311]"), (1, "S5")],
        );
        let two_row = by_label(&l, &[(-1, "Z2[2111]"), (3, "V4[221]"), (1, "V4[41]"), (-2, "D4"), (-1, "D5"), (-2, "D6"), (1, "S5")]);
        let standard = by_label(&l, &[(1, "Z1"), (-4, "Z2[2111]"), (3, "V4[221]"), (3, "D3[311]"), (-2, "D6"), (-2, "S4"), (1, "S5")]);
        assert_eq!(d.get(IrrepFamily::Hook).element, hook);
        assert_eq!(d.get(IrrepFamily::TwoRow).element, two_row);
        assert_eq!(d.get(IrrepFamily::Standard).element, standard);
        let names = |ids: &[usize]| ids.iter().map(|&i| l.class(i).label.clone()).collect::<Vec<_>>();
        assert_eq!(names(&d.get(IrrepFamily::Hook).maximal_types), ["Z4", "V4[221]", "Z6", "D3[311]"]);
        assert_eq!(names(&d.get(IrrepFamily::TwoRow).maximal_types), ["D4", "D5", "D6"]);
        assert_eq!(names(&d.get(IrrepFamily::Standard).maximal_types), ["D6", "S4"]);
    }

    #[test]
    fn leading_coefficients_follow_weyl_orders() {
        for k in [4, 5] {
            let l = build_lattice(k).unwrap();
            let d = basic_degrees(&l).unwrap();
            for f in IrrepFamily::ALL {
                let r = leading_coefficient_check(d.get(f), &l);
                assert!(r.violations.is_empty(), "k={k} {f:?}: {r:?}");
                if f == IrrepFamily::Trivial {
                    assert_eq!(r.exempt.len(), 1);
                    assert_eq!(r.exempt[0].coefficient, -1);
                }
            }
        }
        let l = lattice5();
        let d = basic_degrees(&l).unwrap();
        let tr = d.get(IrrepFamily::TwoRow);
        let weyls: Vec<u64> = tr.maximal_types.iter().map(|&h| l.weyl(h)).collect();
        assert_eq!(weyls, [1, 2, 1]);
    }

    #[test]
    fn crossing_invariants_at_width5() {
        let l = lattice5();
        let d = basic_degrees(&l).unwrap();
        let w0 = by_label(
            &l,
            &[
                (1, "Z2[2111]"),
                (-2, "Z2[221]"),
                (1, "V4[41]"),
                (1, "Z4"),
                (1, "V4[221]"),
                (-2, "D3[311]"),
                (1, "Z6"),
                (-2, "D4"),
                (1, "D5"),
                (2, "S4"),
            ],
        );
        let w1 = by_label(
            &l,
            &[
                (2, "Z2[221]"),
                (1, "Z3"),
                (-2, "V4[41]"),
                (-2, "Z4"),
                (-3, "V4[221]"),
                (1, "D3[311]"),
                (-2, "Z6"),
                (4, "D4"),
                (2, "D6"),
                (-2, "S4"),
            ],
        );
        let names = |ids: &[usize]| ids.iter().map(|&i| l.class(i).label.clone()).collect::<Vec<_>>();
        let inv: Vec<_> = (0..3).map(|i| bifurcation_invariant(i, &d, &l).unwrap()).collect();
        assert_eq!(inv[0].element, w0);
        assert_eq!(inv[1].element, w1);
        let p45 = d.get(IrrepFamily::Hook).element.mul(&d.get(IrrepFamily::TwoRow).element, &l).unwrap();
        assert_eq!(inv[2].element, p45.scale(2));
        assert_eq!(names(&inv[0].maximal_types), ["D5", "S4"]);
        assert_eq!(names(&inv[1].maximal_types), ["D6", "S4"]);
        assert_eq!(names(&inv[2].maximal_types), ["S5"]);
        assert_eq!(names(&inv[0].support_maximal_types), ["Z6", "D5", "S4"]);
        assert!(bifurcation_invariant(3, &d, &l).is_err());
    }

    #[test]
    fn invariants_telescope() {
        let l = lattice5();
        let d = basic_degrees(&l).unwrap();
        let total = (0..3).map(|i| bifurcation_invariant(i, &d, &l).unwrap().element).fold(BurnsideElement::zero(&l), |a, b| a.add(&b));
        let all = [IrrepFamily::Hook, IrrepFamily::TwoRow, IrrepFamily::Standard, IrrepFamily::Standard, IrrepFamily::Trivial];
        let last = product_of(&all, &d, &l).unwrap();
        assert_eq!(total, BurnsideElement::unit(&l).sub(&last));
    }

    #[test]
    fn spectral_degrees_and_invariants() {
        let l = lattice5();
        let d = basic_degrees(&l).unwrap();
        let h = homotopy_report(5, &d, &l).unwrap();
        assert!(h.constant_on_components);
        let unit = BurnsideElement::unit(&l);
        let d4 = &d.get(IrrepFamily::Hook).element;
        let d5 = &d.get(IrrepFamily::TwoRow).element;
        let d6 = &d.get(IrrepFamily::Standard).element;
        let d45 = d4.mul(d5, &l).unwrap();
        assert_eq!(h.degrees, [d45.scale(-1), unit.clone(), d6.clone(), d6.scale(-1)]);
        let s0 = spectral_invariant(0, &d, &l).unwrap();
        assert_eq!(s0.element, d45.scale(-1).sub(&unit));
        assert_eq!(s0.families, [IrrepFamily::Trivial, IrrepFamily::Standard, IrrepFamily::TwoRow, IrrepFamily::Hook]);
        assert!(degree_at(0.0, &d, &l).is_err());
    }

    #[test]
    fn linear_map_degree_of_positive_spectrum_is_unit() {
        let l = lattice5();
        let d = basic_degrees(&l).unwrap();
        assert_eq!(degree_at(1.0, &d, &l).unwrap(), BurnsideElement::unit(&l));
    }

    #[test]
    fn ring_laws_hold_for_small_widths() {
        for k in [4, 5] {
            let l = build_lattice(k).unwrap();
            let d = basic_degrees(&l).unwrap();
            let r = ring_law_report(&d, &l).unwrap();
            assert!(r.holds(), "k={k}: {r:?}");
            assert!(r.persistence_checked > 0);
        }
        let l = lattice5();
        let r = ring_law_report(&basic_degrees(&l).unwrap(), &l).unwrap();
        assert_eq!(r.cancellation_checked, 1);
    }

    #[test]
    fn maximal_types_of_simple_elements() {
        let l = lattice5();
        assert!(maximal_orbit_types(&BurnsideElement::zero(&l), &l).is_empty());
        assert_eq!(maximal_orbit_types(&BurnsideElement::unit(&l).scale(-1), &l), [l.top()]);
    }

    #[test]
    fn parse_and_implied_orders() {
        let p = PublishedExpansion::parse("x", "-(Z1) + 2(D1) - 3(S_4)+(V4)").unwrap();
        assert_eq!(p.terms.len(), 4);
        assert_eq!(p.coefficient("S_4"), -3);
        assert_eq!(implied_order("D1"), Some(2));
        assert_eq!(implied_order("S_4"), Some(24));
        assert_eq!(implied_order("A5"), Some(60));
        assert_eq!(implied_order("F20"), None);
        assert!(PublishedExpansion::parse("x", "2(D1) 3(D2)").is_err());
        let dup = PublishedExpansion::parse("x", "-(D2) + 3(D2)").unwrap();
        assert_eq!(dup.repeated_labels(), ["D2"]);
    }

    #[test]
    fn name_map_from_basic_degrees() {
        let l = lattice5();
        let d = basic_degrees(&l).unwrap();
        let w4 = PublishedExpansion::parse("W4", "-(Z1)+2(D1)+(Z2)+(Z3)-(Z4)-(D2)-(D3)-(Z6)+(S5)").unwrap();
        let w6 = PublishedExpansion::parse("W6", "(Z1)-4(D1)+3(D2)+3(D3)-2(D6)-2(S4)+(S5)").unwrap();
        let pairs = [(&w4, &d.get(IrrepFamily::Hook).element), (&w6, &d.get(IrrepFamily::Standard).element)];
        let map = infer_name_map(&pairs, &l);
        assert_eq!(l.class(map.assigned["D1"]).label, "Z2[2111]");
        assert_eq!(l.class(map.assigned["D2"]).label, "V4[221]");
        assert_eq!(l.class(map.assigned["D3"]).label, "D3[311]");
        let m = match_expansion(&w4, &d.get(IrrepFamily::Hook).element, &map, &l);
        assert!(m.exact && m.multiset_equal);
        let w6_bad = PublishedExpansion::parse("W6", "(Z1)-4(D2)+3(D2)+3(D3)-2(D6)-2(S4)+(S5)").unwrap();
        let std = &d.get(IrrepFamily::Standard).element;
        assert!(!match_expansion(&w6_bad, std, &map, &l).exact);
        assert_eq!(single_substitution_repairs(&w6_bad, std, &map, &l), [(1, "D2".to_string(), "D1".to_string())]);
    }

    #[test]
    fn theorem_report_small_widths() {
        let l = lattice5();
        let r = theorem_report(5, Some(&l)).unwrap();
        assert_eq!(r.clause_i, Some(true));
        assert!(r.clause_ii && r.clause_iii);
        let far = theorem_report(20, None).unwrap();
        assert!(far.capacity_notice.is_some() && far.clause_ii);
        assert!(theorem_report(4, Some(&l)).is_err());
    }
}
