//! Partitions, cycle types and characters of the symmetric group `S_n`.
//!
//! Irreducible characters come from the Frobenius formula: `χ_η(C)` is the
//! coefficient of `x^l` in `Δ(x)·Π_j P_j(x)^{i_j}` with `l_j = η_j + r - j`,
//! where `Δ` is the Vandermonde product and `P_j` the power sums in `r`
//! variables. The expansion is exact and truncated at `l` componentwise.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::borrow::Borrow;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, inconsistent, Error, Result};

/// Largest `n` accepted by [`frobenius_character`].
pub const FROBENIUS_MAX_N: u32 = 12;
/// Upper bound on the dense monomial box `Π (l_j + 1)` of one expansion.
pub const FROBENIUS_MAX_BOX: u64 = 20_000_000;

/// A partition `η_1 >= η_2 >= ... >= η_r >= 1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(domain("partition must have at least one part"));
        }
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(domain(format!("{parts:?} is not a weakly decreasing positive sequence")));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn n(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The trivial partition `(k)`.
    pub fn trivial(k: u32) -> Self {
        Partition { parts: alloc::vec![k] }
    }

    /// The standard partition `(k-1,1)`.
    pub fn standard(k: u32) -> Self {
        Partition { parts: alloc::vec![k - 1, 1] }
    }

    /// The two-row partition `(k-2,2)`, `k >= 4`.
    pub fn two_row(k: u32) -> Self {
        Partition { parts: alloc::vec![k - 2, 2] }
    }

    /// The hook `(k-2,1,1)`, `k >= 3`.
    pub fn hook(k: u32) -> Self {
        Partition { parts: alloc::vec![k - 2, 1, 1] }
    }

    /// All partitions of `n`, in decreasing lexicographic order.
    pub fn all(n: u32) -> Vec<Partition> {
        fn rec(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition { parts: prefix.clone() });
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                prefix.push(p);
                rec(rest - p, p, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }

    /// The conjugate partition.
    pub fn conjugate(&self) -> Partition {
        let first = self.parts[0];
        let parts = (1..=first).map(|i| self.parts.iter().filter(|&&p| p >= i).count() as u32).collect();
        Partition { parts }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// Cycle type of a permutation: `counts[j-1]` is the number of `j`-cycles.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CycleType {
    counts: Vec<u32>,
}

impl CycleType {
    /// Builds the type from cycle lengths, fixed points included.
    pub fn from_lengths(lengths: &[usize]) -> Self {
        let n: usize = lengths.iter().sum();
        let mut counts = alloc::vec![0u32; n];
        for &l in lengths {
            counts[l - 1] += 1;
        }
        CycleType { counts }
    }

    pub fn from_partition(p: &Partition) -> Self {
        let lengths: Vec<usize> = p.parts.iter().map(|&x| x as usize).collect();
        Self::from_lengths(&lengths)
    }

    pub fn identity(n: u32) -> Self {
        let mut counts = alloc::vec![0u32; n as usize];
        counts[0] = n;
        CycleType { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn n(&self) -> u32 {
        self.counts.len() as u32
    }

    /// Number of `j`-cycles.
    pub fn i(&self, j: usize) -> u32 {
        self.counts.get(j - 1).copied().unwrap_or(0)
    }

    pub fn moved_points(&self) -> u32 {
        self.n() - self.i(1)
    }

    /// Cycle lengths in decreasing order.
    pub fn lengths(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (j, &c) in self.counts.iter().enumerate().rev() {
            out.extend(core::iter::repeat_n(j as u32 + 1, c as usize));
        }
        out
    }

    /// Cycle type of the square of any element of this type.
    pub fn squared(&self) -> CycleType {
        let mut lengths = Vec::new();
        for (j, &c) in self.counts.iter().enumerate() {
            let len = j + 1;
            for _ in 0..c {
                if len % 2 == 0 {
                    lengths.push(len / 2);
                    lengths.push(len / 2);
                } else {
                    lengths.push(len);
                }
            }
        }
        CycleType::from_lengths(&lengths)
    }

    pub fn centralizer_order(&self) -> BigUint {
        let mut z = BigUint::one();
        for (j, &c) in self.counts.iter().enumerate() {
            z *= BigUint::from(j as u64 + 1).pow(c);
            z *= factorial(c);
        }
        z
    }

    pub fn class_size(&self) -> BigUint {
        factorial(self.n()) / self.centralizer_order()
    }

    /// All cycle types of `S_n`, ordered by moved points then by cycle lengths.
    pub fn all(n: u32) -> Vec<CycleType> {
        let mut out: Vec<CycleType> = Partition::all(n).iter().map(CycleType::from_partition).collect();
        out.sort_by(|a, b| a.moved_points().cmp(&b.moved_points()).then_with(|| a.lengths().cmp(&b.lengths())));
        out
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lengths: Vec<String> = self.lengths().iter().map(|l| format!("{l}")).collect();
        write!(f, "[{}]", lengths.join(","))
    }
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

/// Sparse polynomial in `r` variables with exponents packed into a `u64`.
struct TruncatedPoly {
    radix: Vec<u64>,
    bound: Vec<u32>,
    terms: BTreeMap<u64, BigInt>,
}

impl TruncatedPoly {
    fn one(bound: &[u32]) -> Self {
        let mut radix = Vec::with_capacity(bound.len());
        let mut r = 1u64;
        for &b in bound {
            radix.push(r);
            r *= b as u64 + 1;
        }
        let mut terms = BTreeMap::new();
        terms.insert(0u64, BigInt::one());
        TruncatedPoly { radix, bound: bound.to_vec(), terms }
    }

    fn exponent(&self, key: u64, var: usize) -> u32 {
        ((key / self.radix[var]) % (self.bound[var] as u64 + 1)) as u32
    }

    /// Multiplies by the power sum `Σ_a x_a^m`.
    fn mul_power_sum(&mut self, m: u32) {
        let mut next: BTreeMap<u64, BigInt> = BTreeMap::new();
        for (&key, coef) in &self.terms {
            for var in 0..self.bound.len() {
                if self.exponent(key, var) + m <= self.bound[var] {
                    *next.entry(key + m as u64 * self.radix[var]).or_insert_with(BigInt::zero) += coef;
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        self.terms = next;
    }

    /// Multiplies by `x_a - x_b`.
    fn mul_difference(&mut self, a: usize, b: usize) {
        let mut next: BTreeMap<u64, BigInt> = BTreeMap::new();
        for (&key, coef) in &self.terms {
            if self.exponent(key, a) < self.bound[a] {
                *next.entry(key + self.radix[a]).or_insert_with(BigInt::zero) += coef;
            }
            if self.exponent(key, b) < self.bound[b] {
                *next.entry(key + self.radix[b]).or_insert_with(BigInt::zero) -= coef;
            }
        }
        next.retain(|_, c| !c.is_zero());
        self.terms = next;
    }

    fn coefficient(&self, exps: &[u32]) -> BigInt {
        let key: u64 = exps.iter().zip(&self.radix).map(|(&e, &r)| e as u64 * r).sum();
        self.terms.get(&key).cloned().unwrap_or_else(BigInt::zero)
    }
}

/// Irreducible character `χ_η` on the class `c`, by the Frobenius formula.
pub fn frobenius_character(eta: &Partition, c: &CycleType) -> Result<i64> {
    let n = eta.n();
    if c.n() != n {
        return Err(domain(format!("partition of {n} paired with cycle type of {}", c.n())));
    }
    if n > FROBENIUS_MAX_N {
        return Err(Error::Capacity(format!("Frobenius expansion limited to n <= {FROBENIUS_MAX_N}, got {n}")));
    }
    let r = eta.len();
    let l: Vec<u32> = eta.parts.iter().enumerate().map(|(j, &p)| p + (r - 1 - j) as u32).collect();
    let volume = l.iter().try_fold(1u64, |acc, &x| acc.checked_mul(x as u64 + 1));
    if volume.is_none_or(|v| v > FROBENIUS_MAX_BOX) {
        return Err(Error::Capacity(format!("monomial box for {eta} exceeds {FROBENIUS_MAX_BOX}")));
    }
    let mut poly = TruncatedPoly::one(&l);
    // Longest cycles first keeps the intermediate support small.
    for m in c.lengths() {
        poly.mul_power_sum(m);
    }
    for a in 0..r {
        for b in a + 1..r {
            poly.mul_difference(a, b);
        }
    }
    poly.coefficient(&l).to_i64().ok_or_else(|| Error::Capacity(format!("character of {eta} exceeds i64")))
}

/// The four irreducibles that occur in `R^k ⊗ R^k`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum IrrepFamily {
    /// `(k)`
    Trivial,
    /// `(k-1,1)`
    Standard,
    /// `(k-2,2)`
    TwoRow,
    /// `(k-2,1,1)`
    Hook,
}

impl IrrepFamily {
    pub const ALL: [IrrepFamily; 4] = [IrrepFamily::Hook, IrrepFamily::TwoRow, IrrepFamily::Standard, IrrepFamily::Trivial];

    pub fn partition(self, k: u32) -> Partition {
        match self {
            IrrepFamily::Trivial => Partition::trivial(k),
            IrrepFamily::Standard => Partition::standard(k),
            IrrepFamily::TwoRow => Partition::two_row(k),
            IrrepFamily::Hook => Partition::hook(k),
        }
    }

    pub fn of_partition(p: &Partition) -> Option<IrrepFamily> {
        let k = p.n();
        if k < 4 {
            return None;
        }
        IrrepFamily::ALL.into_iter().find(|f| f.partition(k) == *p)
    }
}

/// Closed-form characters of the four families in terms of `i_1`, `i_2`.
pub fn closed_form_character(which: IrrepFamily, c: &CycleType) -> i64 {
    let i1 = c.i(1) as i64;
    let i2 = c.i(2) as i64;
    match which {
        IrrepFamily::Trivial => 1,
        IrrepFamily::Standard => i1 - 1,
        IrrepFamily::TwoRow => (i1 - 1) * (i1 - 2) / 2 + i2 - 1,
        IrrepFamily::Hook => (i1 - 1) * (i1 - 2) / 2 - i2,
    }
}

/// `n!` divided by the product of hook lengths.
pub fn hook_dimension(eta: &Partition) -> u64 {
    let conj = eta.conjugate();
    let mut hooks = BigUint::one();
    for (i, &row) in eta.parts.iter().enumerate() {
        for j in 0..row as usize {
            let arm = row as usize - j - 1;
            let leg = conj.parts[j] as usize - i - 1;
            hooks *= BigUint::from((arm + leg + 1) as u64);
        }
    }
    (factorial(eta.n()) / hooks).to_u64().expect("dimension fits in u64")
}

/// An integer-valued class function on `S_n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassFunction {
    n: u32,
    values: BTreeMap<CycleType, i64>,
}

impl ClassFunction {
    pub fn from_fn(n: u32, f: impl Fn(&CycleType) -> i64) -> Self {
        let values = CycleType::all(n).into_iter().map(|c| {
            let v = f(&c);
            (c, v)
        });
        ClassFunction { n, values: values.collect() }
    }

    pub fn try_from_fn(n: u32, f: impl Fn(&CycleType) -> Result<i64>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for c in CycleType::all(n) {
            let v = f(&c)?;
            values.insert(c, v);
        }
        Ok(ClassFunction { n, values })
    }

    /// Character of an irreducible via the Frobenius formula.
    pub fn irreducible(eta: &Partition) -> Result<Self> {
        Self::try_from_fn(eta.n(), |c| frobenius_character(eta, c))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn value(&self, c: &CycleType) -> i64 {
        self.values[c]
    }

    /// Values in the canonical column order of [`CycleType::all`].
    pub fn row(&self) -> Vec<i64> {
        CycleType::all(self.n).iter().map(|c| self.values[c]).collect()
    }

    /// `(1/n!) Σ_g χ(g) ψ(g)`, asserted to be an integer.
    pub fn inner_product(&self, other: &ClassFunction) -> Result<i64> {
        if self.n != other.n {
            return Err(domain("class functions on different groups"));
        }
        let mut total = BigInt::zero();
        for (c, &v) in &self.values {
            total += BigInt::from(c.class_size()) * BigInt::from(v) * BigInt::from(other.values[c]);
        }
        let order = BigInt::from(factorial(self.n));
        if !(&total % &order).is_zero() {
            return Err(inconsistent(format!("inner product {total}/{order} is not an integer")));
        }
        (total / order).to_i64().ok_or_else(|| inconsistent("inner product overflows i64"))
    }
}

/// Characters of `Sym²(V_⊥)` and `∧²(V_⊥)` for the standard representation `V_⊥`.
pub fn sym_wedge_characters(k: u32) -> Result<(ClassFunction, ClassFunction)> {
    if k < 4 {
        return Err(domain(format!("k = {k} < 4")));
    }
    let chi = |c: &CycleType| c.i(1) as i64 - 1;
    // i_1(g²) = i_1(g) + 2 i_2(g)
    let chi_sq = |c: &CycleType| c.i(1) as i64 + 2 * c.i(2) as i64 - 1;
    let sym = ClassFunction::from_fn(k, |c| (chi(c) * chi(c) + chi_sq(c)) / 2);
    let wedge = ClassFunction::from_fn(k, |c| (chi(c) * chi(c) - chi_sq(c)) / 2);
    Ok((sym, wedge))
}

/// Multiplicities of irreducibles in a representation.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IsotypicMultiplicities {
    pub entries: BTreeMap<Partition, u32>,
}

impl IsotypicMultiplicities {
    pub fn get(&self, eta: &Partition) -> u32 {
        self.entries.get(eta).copied().unwrap_or(0)
    }

    /// `Σ mult(η)·dim(η)`.
    pub fn total_dimension(&self) -> u64 {
        self.entries.iter().map(|(eta, &m)| m as u64 * hook_dimension(eta)).sum()
    }
}

/// Decomposes `χ` against the given irreducibles and checks that they exhaust `dim`.
pub fn decompose_against(chi: &ClassFunction, etas: &[Partition]) -> Result<IsotypicMultiplicities> {
    let mut out = IsotypicMultiplicities::default();
    for eta in etas {
        let m = chi.inner_product(&ClassFunction::irreducible(eta)?)?;
        if m < 0 {
            return Err(inconsistent(format!("negative multiplicity {m} of {eta}")));
        }
        if m > 0 {
            out.entries.insert(eta.clone(), m as u32);
        }
    }
    let dim = chi.value(&CycleType::identity(chi.n()));
    if out.total_dimension() as i64 != dim {
        return Err(inconsistent(format!("listed irreducibles cover dimension {} of {dim}", out.total_dimension())));
    }
    Ok(out)
}

/// Permutation character `i_1(g)²` of the diagonal action on `R^k ⊗ R^k`.
pub fn diag_square_character(k: u32) -> ClassFunction {
    ClassFunction::from_fn(k, |c| (c.i(1) as i64).pow(2))
}

/// Isotypic decomposition of `R^{k×k}` under the diagonal `S_k` action.
///
/// Multiplicities come from inner products with the four candidate
/// irreducibles; the dimension count certifies that no other irreducible occurs.
pub fn decompose_diag_square(k: u32) -> Result<IsotypicMultiplicities> {
    if k < 4 {
        return Err(domain(format!("k = {k} < 4")));
    }
    let etas: Vec<Partition> = IrrepFamily::ALL.iter().map(|f| f.partition(k)).collect();
    decompose_against(&diag_square_character(k), &etas)
}

/// Full character table of `S_k`.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub k: u32,
    /// Row labels, decreasing lexicographic order.
    pub partitions: Vec<Partition>,
    /// Column labels, see [`CycleType::all`].
    pub classes: Vec<CycleType>,
    pub class_sizes: Vec<BigUint>,
    /// `values[row][col]`.
    pub values: Vec<Vec<i64>>,
}

impl CharacterTable {
    pub fn row(&self, eta: &Partition) -> Option<&[i64]> {
        self.partitions.iter().position(|p| p == eta).map(|i| self.values[i].as_slice())
    }

    pub fn column(&self, c: &CycleType) -> Option<Vec<i64>> {
        let j = self.classes.iter().position(|x| x == c)?;
        Some(self.values.iter().map(|row| row[j]).collect())
    }

    /// Row orthogonality `Σ_c |c| χ_η(c) χ_μ(c) = k! δ_ημ`.
    pub fn rows_orthonormal(&self) -> bool {
        let order = BigInt::from(factorial(self.k));
        for (a, ra) in self.values.iter().enumerate() {
            for (b, rb) in self.values.iter().enumerate() {
                let mut s = BigInt::zero();
                for j in 0..self.classes.len() {
                    s += BigInt::from(self.class_sizes[j].clone()) * ra[j] * rb[j];
                }
                let want = if a == b { order.clone() } else { BigInt::zero() };
                if s != want {
                    return false;
                }
            }
        }
        true
    }

    /// Column orthogonality `Σ_η χ_η(c) χ_η(d) = |C(c)| δ_cd`.
    pub fn columns_orthogonal(&self) -> bool {
        for a in 0..self.classes.len() {
            for b in 0..self.classes.len() {
                let s: i128 = self.values.iter().map(|row| row[a] as i128 * row[b] as i128).sum();
                let want = if a == b { self.classes[a].centralizer_order().to_i128().unwrap() } else { 0 };
                if s != want {
                    return false;
                }
            }
        }
        true
    }
}

/// Character table of `S_k` via the Frobenius formula, `2 <= k <= 8`.
pub fn character_table(k: u32) -> Result<CharacterTable> {
    if !(2..=8).contains(&k) {
        return Err(Error::Capacity(format!("character tables are built for 2 <= k <= 8, got {k}")));
    }
    let partitions = Partition::all(k);
    let classes = CycleType::all(k);
    let class_sizes = classes.iter().map(CycleType::class_size).collect();
    let mut values = Vec::with_capacity(partitions.len());
    for eta in &partitions {
        let row: Result<Vec<i64>> = classes.iter().map(|c| frobenius_character(eta, c)).collect();
        values.push(row?);
    }
    Ok(CharacterTable { k, partitions, classes, class_sizes, values })
}

/// `dim V^H = (1/|H|) Σ_{h∈H} χ(h)` from the cycle types of the elements of `H`.
pub fn fixed_space_dim<I>(chi: &ClassFunction, subgroup: I) -> Result<u64>
where
    I: IntoIterator,
    I::Item: Borrow<CycleType>,
{
    let mut sum: i64 = 0;
    let mut order: i64 = 0;
    for c in subgroup {
        let c = c.borrow();
        if c.n() != chi.n() {
            return Err(domain("subgroup element acts on the wrong number of points"));
        }
        sum += chi.value(c);
        order += 1;
    }
    if order == 0 || sum < 0 || sum % order != 0 {
        return Err(inconsistent(format!("average {sum}/{order} is not a nonnegative integer")));
    }
    Ok((sum / order) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_perms;
    use proptest::prelude::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=10).map(|n| Partition::all(n).len()).collect();
        assert_eq!(counts, [1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        assert_eq!(Partition::all(5)[0], p(&[5]));
        assert_eq!(Partition::all(5)[6], p(&[1, 1, 1, 1, 1]));
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(Partition::new(alloc::vec![1, 2]).is_err());
        assert!(Partition::new(alloc::vec![2, 0]).is_err());
    }

    #[test]
    fn class_sizes_sum_to_group_order() {
        for n in 1..=8 {
            let total: BigUint = CycleType::all(n).iter().map(CycleType::class_size).sum();
            assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn column_order_for_s5() {
        let cols: Vec<String> = CycleType::all(5).iter().map(|c| format!("{c}")).collect();
        assert_eq!(cols, ["[1,1,1,1,1]", "[2,1,1,1]", "[3,1,1]", "[2,2,1]", "[4,1]", "[3,2]", "[5]"]);
    }

    #[test]
    fn frobenius_simple_cases() {
        let c5 = CycleType::from_lengths(&[5]);
        assert_eq!(frobenius_character(&p(&[5]), &c5).unwrap(), 1);
        assert_eq!(frobenius_character(&p(&[3, 2]), &c5).unwrap(), 0);
        let c = CycleType::from_lengths(&[2, 1, 1, 1]);
        assert_eq!(frobenius_character(&p(&[4, 1]), &c).unwrap(), 2);
        assert!(frobenius_character(&p(&[4, 1]), &CycleType::identity(4)).is_err());
    }

    #[test]
    fn frobenius_capacity() {
        let big = Partition::trivial(13);
        assert!(matches!(frobenius_character(&big, &CycleType::identity(13)), Err(Error::Capacity(_))));
    }

    #[test]
    fn identity_value_is_hook_dimension() {
        for n in 1..=8 {
            for eta in Partition::all(n) {
                let v = frobenius_character(&eta, &CycleType::identity(n)).unwrap();
                assert_eq!(v as u64, hook_dimension(&eta), "{eta}");
            }
        }
    }

    #[test]
    fn hook_dimensions() {
        assert_eq!(hook_dimension(&p(&[5])), 1);
        assert_eq!(hook_dimension(&p(&[4, 1])), 4);
        assert_eq!(hook_dimension(&p(&[3, 1, 1])), 6);
        assert_eq!(hook_dimension(&p(&[3, 2])), 5);
    }

    #[test]
    fn closed_forms_match_frobenius() {
        for k in 4..=8 {
            for fam in IrrepFamily::ALL {
                let eta = fam.partition(k);
                for c in CycleType::all(k) {
                    assert_eq!(closed_form_character(fam, &c), frobenius_character(&eta, &c).unwrap());
                }
            }
            let id = CycleType::identity(k);
            let k = k as i64;
            assert_eq!(closed_form_character(IrrepFamily::Hook, &id), (k - 1) * (k - 2) / 2);
            assert_eq!(closed_form_character(IrrepFamily::TwoRow, &id), k * (k - 3) / 2);
        }
    }

    #[test]
    fn table_orthogonality() {
        for k in 2..=7 {
            let t = character_table(k).unwrap();
            assert!(t.rows_orthonormal(), "rows k={k}");
            assert!(t.columns_orthogonal(), "columns k={k}");
        }
        let degrees: Vec<i64> = character_table(4).unwrap().values.iter().map(|r| r[0]).collect();
        assert_eq!(degrees, [1, 3, 2, 3, 1]);
    }

    #[test]
    fn sym_and_wedge_split() {
        for k in 4..=8 {
            let (sym, wedge) = sym_wedge_characters(k).unwrap();
            let id = CycleType::identity(k);
            assert_eq!(sym.value(&id) + wedge.value(&id), ((k - 1) * (k - 1)) as i64);
            let all = Partition::all(k);
            let s = decompose_against(&sym, &all).unwrap();
            let w = decompose_against(&wedge, &all).unwrap();
            let want_s: BTreeMap<Partition, u32> =
                [(Partition::trivial(k), 1), (Partition::standard(k), 1), (Partition::two_row(k), 1)].into();
            assert_eq!(s.entries, want_s);
            assert_eq!(w.entries, BTreeMap::from([(Partition::hook(k), 1)]));
        }
    }

    #[test]
    fn diag_square_multiplicities() {
        for k in 4..=10 {
            let m = decompose_diag_square(k).unwrap();
            assert_eq!(m.get(&Partition::trivial(k)), 2);
            assert_eq!(m.get(&Partition::standard(k)), 3);
            assert_eq!(m.get(&Partition::two_row(k)), 1);
            assert_eq!(m.get(&Partition::hook(k)), 1);
            assert_eq!(m.total_dimension(), (k * k) as u64);
        }
        assert!(decompose_diag_square(3).is_err());
    }

    #[test]
    fn diag_square_character_counts_fixed_matrix_units() {
        // Fixed points of g on the basis E_ij are the pairs (i, j) both fixed.
        for k in [4usize, 5] {
            let chi = diag_square_character(k as u32);
            for g in all_perms(k) {
                let fixed = (0..k * k).filter(|&x| g.apply(x / k) == x / k && g.apply(x % k) == x % k).count();
                assert_eq!(chi.value(&g.cycle_type()), fixed as i64);
            }
        }
    }

    #[test]
    fn fixed_dims() {
        let k = 5u32;
        let std_chi = ClassFunction::from_fn(k, |c| closed_form_character(IrrepFamily::Standard, c));
        let triv = ClassFunction::from_fn(k, |_| 1);
        let group: Vec<CycleType> = all_perms(5).iter().map(|g| g.cycle_type()).collect();
        assert_eq!(fixed_space_dim(&triv, &group).unwrap(), 1);
        assert_eq!(fixed_space_dim(&std_chi, &group).unwrap(), 0);
        let stab: Vec<CycleType> = all_perms(5).iter().filter(|g| g.apply(4) == 4).map(|g| g.cycle_type()).collect();
        assert_eq!(fixed_space_dim(&std_chi, &stab).unwrap(), 1);
        let bad = ClassFunction::from_fn(k, |c| c.i(2) as i64);
        assert!(fixed_space_dim(&bad, &group).is_err());
    }

    proptest! {
        #[test]
        fn squared_type_matches_perm_square(images in Just(()).prop_flat_map(|_| proptest::sample::select(all_perms(6)))) {
            prop_assert_eq!(images.cycle_type().squared(), images.compose(&images).cycle_type());
        }

        #[test]
        fn conjugate_is_involution(idx in 0usize..42) {
            let eta = &Partition::all(10)[idx];
            prop_assert_eq!(&eta.conjugate().conjugate(), eta);
            prop_assert_eq!(hook_dimension(eta), hook_dimension(&eta.conjugate()));
        }
    }
}
