//! Conjugacy classes of subgroups of `S_k` (`k <= 6`) and the Burnside ring `A(S_k)`.
//!
//! Group elements are indexed by their lexicographic rank, so subgroups are
//! bitsets over at most 720 indices. Classes are found by joining class
//! representatives with cyclic subgroups until no new class appears.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{domain, inconsistent, Result};
use crate::perm::{all_perms, Perm};
use crate::symrep::CycleType;

/// Largest `k` for which lattices are built.
pub const MAX_K: u32 = 6;

/// `S_k` with precomputed multiplication and inverse tables.
#[derive(Clone, Debug)]
pub struct SymmetricGroup {
    k: u32,
    elements: Vec<Perm>,
    mul: Vec<u16>,
    inv: Vec<u16>,
    cycle_types: Vec<CycleType>,
    element_orders: Vec<u8>,
}

impl SymmetricGroup {
    pub fn new(k: u32) -> Result<Self> {
        if !(1..=MAX_K).contains(&k) {
            return Err(domain(format!("symmetric group tables support 1 <= k <= {MAX_K}, got {k}")));
        }
        let elements = all_perms(k as usize);
        let n = elements.len();
        let mut mul = alloc::vec![0u16; n * n];
        for (a, pa) in elements.iter().enumerate() {
            for (b, pb) in elements.iter().enumerate() {
                mul[a * n + b] = lex_rank(&pa.compose(pb)) as u16;
            }
        }
        let inv = elements.iter().map(|p| lex_rank(&p.inverse()) as u16).collect();
        let cycle_types = elements.iter().map(Perm::cycle_type).collect();
        let element_orders = elements.iter().map(|p| p.order() as u8).collect();
        Ok(SymmetricGroup { k, elements, mul, inv, cycle_types, element_orders })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Perm) -> Result<usize> {
        if p.degree() != self.k as usize {
            return Err(domain("permutation acts on the wrong number of points"));
        }
        Ok(lex_rank(p))
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.elements.len() + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// `g x g⁻¹`.
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn cycle_type(&self, i: usize) -> &CycleType {
        &self.cycle_types[i]
    }

    pub fn element_order(&self, i: usize) -> u8 {
        self.element_orders[i]
    }

    /// Subgroup generated by the given element indices.
    pub fn closure(&self, gens: &[usize]) -> ElementSet {
        let mut set = ElementSet::new(self.order());
        let mut queue = alloc::vec![self.identity()];
        set.insert(self.identity());
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !set.contains(y) {
                    set.insert(y);
                    queue.push(y);
                }
            }
        }
        set
    }

    /// `g S g⁻¹`.
    pub fn conjugate_set(&self, g: usize, set: &ElementSet) -> ElementSet {
        let mut out = ElementSet::new(self.order());
        for x in set.iter() {
            out.insert(self.conj(g, x));
        }
        out
    }
}

fn lex_rank(p: &Perm) -> usize {
    let im = p.images();
    let n = im.len();
    let mut rank = 0usize;
    for i in 0..n {
        let smaller = im[i + 1..].iter().filter(|&&y| y < im[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

/// Bitset over group element indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ElementSet {
    words: Vec<u64>,
}

impl ElementSet {
    pub fn new(universe: usize) -> Self {
        ElementSet { words: alloc::vec![0; universe.div_ceil(64)] }
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        ElementSet { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b))
    }
}

/// Conjugation-invariant fingerprint of a subgroup.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalKey {
    pub order: u64,
    /// Sorted `(cycle type, count)` pairs.
    pub cycle_types: Vec<(CycleType, u32)>,
    /// Sorted `(element order, count)` pairs.
    pub element_orders: Vec<(u8, u32)>,
}

impl CanonicalKey {
    fn of(group: &SymmetricGroup, set: &ElementSet) -> Self {
        let mut types: BTreeMap<CycleType, u32> = BTreeMap::new();
        let mut orders: BTreeMap<u8, u32> = BTreeMap::new();
        for x in set.iter() {
            *types.entry(group.cycle_type(x).clone()).or_default() += 1;
            *orders.entry(group.element_order(x)).or_default() += 1;
        }
        CanonicalKey { order: set.len() as u64, cycle_types: types.into_iter().collect(), element_orders: orders.into_iter().collect() }
    }
}

/// One conjugacy class `(H)` of subgroups.
#[derive(Clone, Debug)]
pub struct SubgroupClass {
    pub id: usize,
    /// Elements of the representative subgroup.
    pub representative: ElementSet,
    /// Generators of the representative.
    pub generators: Vec<Perm>,
    pub order: u64,
    pub normalizer_order: u64,
    pub canonical_key: CanonicalKey,
    pub label: String,
}

impl SubgroupClass {
    pub fn weyl_order(&self) -> u64 {
        self.normalizer_order / self.order
    }

    /// Number of subgroups in the class.
    pub fn conjugate_count(&self, group_order: u64) -> u64 {
        group_order / self.normalizer_order
    }

    /// Dimension of the Weyl group as a Lie group. Always zero for finite
    /// groups, which is why the Euler ring reduces to the Burnside ring.
    pub fn weyl_dimension(&self) -> u32 {
        0
    }
}

/// Plain record used to rebuild a lattice from stored data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRecord {
    pub order: u64,
    pub normalizer_order: u64,
    pub generators: Vec<Perm>,
    pub label: String,
}

/// Subgroup classes of `S_k` with their partial order and `n(L,H)` table.
#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    group: SymmetricGroup,
    classes: Vec<SubgroupClass>,
    leq: Vec<Vec<bool>>,
    n_table: Vec<Vec<u64>>,
}

impl SubgroupLattice {
    pub fn k(&self) -> u32 {
        self.group.k
    }

    pub fn group(&self) -> &SymmetricGroup {
        &self.group
    }

    pub fn group_order(&self) -> u64 {
        self.group.order() as u64
    }

    pub fn classes(&self) -> &[SubgroupClass] {
        &self.classes
    }

    pub fn class(&self, id: usize) -> &SubgroupClass {
        &self.classes[id]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of the trivial class `(1)`.
    pub fn bottom(&self) -> usize {
        0
    }

    /// Index of `(S_k)`.
    pub fn top(&self) -> usize {
        self.classes.len() - 1
    }

    /// `(L) <= (H)`.
    pub fn leq(&self, l: usize, h: usize) -> bool {
        self.leq[l][h]
    }

    pub fn n(&self, l: usize, h: usize) -> u64 {
        self.n_table[l][h]
    }

    pub fn weyl(&self, i: usize) -> u64 {
        self.classes[i].weyl_order()
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.label == label)
    }

    /// Cycle types of the elements of the representative of class `i`.
    pub fn cycle_types(&self, i: usize) -> impl Iterator<Item = &CycleType> + '_ {
        self.classes[i].representative.iter().map(|x| self.group.cycle_type(x))
    }

    /// Total number of subgroups, `Σ |S_k| / |N(H)|`.
    pub fn subgroup_count(&self) -> u64 {
        self.classes.iter().map(|c| c.conjugate_count(self.group_order())).sum()
    }

    /// Class of an arbitrary subgroup given by its elements.
    pub fn class_of(&self, set: &ElementSet) -> Option<usize> {
        let key = CanonicalKey::of(&self.group, set);
        self.classes.iter().filter(|c| c.canonical_key == key).map(|c| c.id).find(|&id| {
            let rep = &self.classes[id].representative;
            (0..self.group.order()).any(|g| self.group.conjugate_set(g, rep) == *set)
        })
    }

    /// Rebuilds a lattice from stored records, validating every stored order.
    pub fn from_parts(k: u32, records: &[ClassRecord], leq_pairs: &[(usize, usize)], n_triples: &[(usize, usize, u64)]) -> Result<Self> {
        let group = SymmetricGroup::new(k)?;
        let m = records.len();
        let mut classes = Vec::with_capacity(m);
        for (id, rec) in records.iter().enumerate() {
            let gens: Vec<usize> = rec.generators.iter().map(|p| group.index_of(p)).collect::<Result<_>>()?;
            let representative = group.closure(&gens);
            if representative.len() as u64 != rec.order {
                return Err(inconsistent(format!(
                    "class {id}: generators span {} elements, record says {}",
                    representative.len(),
                    rec.order
                )));
            }
            if rec.normalizer_order % rec.order != 0 || !(group.order() as u64).is_multiple_of(rec.normalizer_order) {
                return Err(inconsistent(format!("class {id}: normalizer order {} invalid", rec.normalizer_order)));
            }
            classes.push(SubgroupClass {
                id,
                canonical_key: CanonicalKey::of(&group, &representative),
                representative,
                generators: rec.generators.clone(),
                order: rec.order,
                normalizer_order: rec.normalizer_order,
                label: rec.label.clone(),
            });
        }
        let mut leq = alloc::vec![alloc::vec![false; m]; m];
        for &(l, h) in leq_pairs {
            if l >= m || h >= m {
                return Err(inconsistent("leq index out of range"));
            }
            leq[l][h] = true;
        }
        let mut n_table = alloc::vec![alloc::vec![0u64; m]; m];
        for &(l, h, n) in n_triples {
            if l >= m || h >= m {
                return Err(inconsistent("n index out of range"));
            }
            n_table[l][h] = n;
        }
        let lattice = SubgroupLattice { group, classes, leq, n_table };
        lattice.check_structure()?;
        Ok(lattice)
    }

    /// Structural invariants shared by built and loaded lattices.
    pub fn check_structure(&self) -> Result<()> {
        let m = self.len();
        if m == 0 || self.classes[0].order != 1 || self.classes[m - 1].order != self.group_order() {
            return Err(inconsistent("lattice must start at (1) and end at (S_k)"));
        }
        for l in 0..m {
            if !self.leq[l][l] || !self.leq[0][l] || !self.leq[l][m - 1] {
                return Err(inconsistent(format!("class {l} breaks reflexivity or bounds")));
            }
            for h in 0..m {
                if self.leq[l][h] != (self.n_table[l][h] > 0) {
                    return Err(inconsistent(format!("n({l},{h}) disagrees with the order relation")));
                }
                if l != h && self.leq[l][h] && self.leq[h][l] {
                    return Err(inconsistent(format!("classes {l} and {h} are mutually below each other")));
                }
                if self.leq[l][h] && !self.classes[h].order.is_multiple_of(self.classes[l].order) {
                    return Err(inconsistent(format!("class {l} below {h} with non-dividing order")));
                }
            }
        }
        Ok(())
    }

    /// `n(L,H)` by direct count of `{g : gLg⁻¹ ⊆ H}` divided by `|N(H)|`.
    fn n_direct(group: &SymmetricGroup, l: &SubgroupClass, h: &SubgroupClass) -> Result<u64> {
        let gens: Vec<usize> = l.generators.iter().map(|p| group.index_of(p)).collect::<Result<_>>()?;
        let count = (0..group.order()).filter(|&g| gens.iter().all(|&x| h.representative.contains(group.conj(g, x)))).count() as u64;
        if !count.is_multiple_of(h.normalizer_order) {
            return Err(inconsistent(format!("|N({},{})| = {count} not divisible by |N(H)|", l.id, h.id)));
        }
        Ok(count / h.normalizer_order)
    }
}

/// `n(L,H) = |{g : gLg⁻¹ ⊆ H}| / |N(H)|`.
pub fn n_count(l: usize, h: usize, lattice: &SubgroupLattice) -> u64 {
    lattice.n(l, h)
}

/// All subgroup classes of `S_k`.
pub fn build_lattice(k: u32) -> Result<SubgroupLattice> {
    if !(2..=MAX_K).contains(&k) {
        return Err(domain(format!("lattices are built for 2 <= k <= {MAX_K}, got {k}")));
    }
    let group = SymmetricGroup::new(k)?;
    let n = group.order();

    // Cyclic subgroups, one generator each.
    let mut cyclic: BTreeMap<ElementSet, usize> = BTreeMap::new();
    for x in 0..n {
        cyclic.entry(group.closure(&[x])).or_insert(x);
    }

    struct Found {
        set: ElementSet,
        gens: Vec<usize>,
        conjugates: Vec<ElementSet>,
        normalizer_order: u64,
    }
    let mut known: BTreeMap<ElementSet, usize> = BTreeMap::new();
    let mut found: Vec<Found> = Vec::new();
    let register = |set: ElementSet, gens: Vec<usize>, known: &mut BTreeMap<ElementSet, usize>, found: &mut Vec<Found>| {
        let id = found.len();
        let mut conjugates: BTreeSet<ElementSet> = BTreeSet::new();
        let mut normalizer = 0u64;
        for g in 0..n {
            let c = group.conjugate_set(g, &set);
            if c == set {
                normalizer += 1;
            }
            conjugates.insert(c);
        }
        debug_assert_eq!(normalizer * conjugates.len() as u64, n as u64);
        for c in &conjugates {
            known.insert(c.clone(), id);
        }
        found.push(Found { set, gens, conjugates: conjugates.into_iter().collect(), normalizer_order: normalizer });
    };

    register(group.closure(&[]), Vec::new(), &mut known, &mut found);
    let mut frontier = alloc::vec![0usize];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &id in &frontier {
            for (cset, &c) in &cyclic {
                if cset.is_subset(&found[id].set) {
                    continue;
                }
                let mut gens = found[id].gens.clone();
                gens.push(c);
                let joined = group.closure(&gens);
                if known.contains_key(&joined) {
                    continue;
                }
                register(joined, gens, &mut known, &mut found);
                next.push(found.len() - 1);
            }
        }
        frontier = next;
    }

    // Deterministic representative: least conjugate, with conjugated generators.
    let mut classes: Vec<SubgroupClass> = found
        .iter()
        .map(|f| {
            let rep = f.conjugates[0].clone();
            let g = (0..n).find(|&g| group.conjugate_set(g, &f.set) == rep).expect("conjugate exists");
            let generators = f.gens.iter().map(|&x| group.element(group.conj(g, x)).clone()).collect();
            SubgroupClass {
                id: 0,
                canonical_key: CanonicalKey::of(&group, &rep),
                order: rep.len() as u64,
                representative: rep,
                generators,
                normalizer_order: f.normalizer_order,
                label: String::new(),
            }
        })
        .collect();
    let mut conjugates: Vec<Vec<ElementSet>> = found.into_iter().map(|f| f.conjugates).collect();
    let mut perm: Vec<usize> = (0..classes.len()).collect();
    perm.sort_by(|&a, &b| {
        (classes[a].order, &classes[a].canonical_key, &classes[a].representative).cmp(&(
            classes[b].order,
            &classes[b].canonical_key,
            &classes[b].representative,
        ))
    });
    classes = perm.iter().map(|&i| classes[i].clone()).collect();
    conjugates = perm.iter().map(|&i| core::mem::take(&mut conjugates[i])).collect();
    for (id, c) in classes.iter_mut().enumerate() {
        c.id = id;
    }

    let m = classes.len();
    let mut leq = alloc::vec![alloc::vec![false; m]; m];
    let mut n_table = alloc::vec![alloc::vec![0u64; m]; m];
    for l in 0..m {
        for h in 0..m {
            leq[l][h] = classes[l].order <= classes[h].order && conjugates[l].iter().any(|c| c.is_subset(&classes[h].representative));
            n_table[l][h] = SubgroupLattice::n_direct(&group, &classes[l], &classes[h])?;
        }
    }
    assign_labels(&group, &mut classes);
    let lattice = SubgroupLattice { group, classes, leq, n_table };
    lattice.check_structure()?;
    Ok(lattice)
}

/// Isomorphism-type name from order, element orders, commutativity and dihedral structure.
fn abstract_name(group: &SymmetricGroup, class: &SubgroupClass) -> String {
    let order = class.order;
    let gens: Vec<usize> = class.generators.iter().map(|p| group.index_of(p).expect("valid generator")).collect();
    let abelian = gens.iter().all(|&a| gens.iter().all(|&b| group.mul(a, b) == group.mul(b, a)));
    let orders = &class.canonical_key.element_orders;
    let count = |o: u8| orders.iter().find(|(x, _)| *x == o).map_or(0, |(_, c)| *c);
    let max_order = orders.iter().map(|(o, _)| *o as u64).max().unwrap_or(1);
    if max_order == order {
        return format!("Z{order}");
    }
    if abelian {
        return match (order, max_order) {
            (4, 2) => String::from("V4"),
            (8, 2) => String::from("Z2^3"),
            (8, 4) => String::from("Z4xZ2"),
            (9, 3) => String::from("Z3^2"),
            (16, 2) => String::from("Z2^4"),
            _ => format!("Ab{order}"),
        };
    }
    // Dihedral of order 2m: a rotation of order m and only involutions outside it.
    if order.is_multiple_of(2) {
        let m = order / 2;
        if let Some(r) = class.representative.iter().find(|&x| group.element_order(x) as u64 == m) {
            let rot = group.closure(&[r]);
            if class.representative.iter().filter(|x| !rot.contains(*x)).all(|x| group.element_order(x) == 2) {
                return format!("D{m}");
            }
        }
    }
    let named = match (order, count(2), count(3), count(4)) {
        (12, 3, 8, 0) => "A4",
        (20, 5, 0, 10) => "F20",
        (24, 9, 8, 6) => "S4",
        (24, 7, 8, 0) => "A4xZ2",
        (16, _, 0, _) => "D4xZ2",
        (18, 3, 8, 0) => "S3xZ3",
        (18, 9, 8, 0) => "Z3^2:Z2",
        (36, 15, 8, 0) => "S3xS3",
        (36, 9, 8, 18) => "Z3^2:Z4",
        (48, _, _, _) => "S4xZ2",
        (60, _, _, _) => "A5",
        (72, _, _, _) => "S3wrZ2",
        (120, _, _, _) => "S5",
        (360, _, _, _) => "A6",
        (720, _, _, _) => "S6",
        _ => "",
    };
    if named.is_empty() {
        format!("G{order}")
    } else {
        String::from(named)
    }
}

/// Orbit sizes of the natural action, decreasing, as a compact string.
fn orbit_signature(k: u32, class: &SubgroupClass) -> String {
    let k = k as usize;
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for g in &class.generators {
        for x in 0..k {
            let (a, b) = (find(&mut parent, x), find(&mut parent, g.apply(x)));
            parent[a] = b;
        }
    }
    let mut sizes = alloc::vec![0usize; k];
    for x in 0..k {
        let r = find(&mut parent, x);
        sizes[r] += 1;
    }
    let mut sizes: Vec<usize> = sizes.into_iter().filter(|&s| s > 0).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes.iter().map(|s| format!("{s}")).collect()
}

fn assign_labels(group: &SymmetricGroup, classes: &mut [SubgroupClass]) {
    let names: Vec<String> = classes.iter().map(|c| abstract_name(group, c)).collect();
    let orbits: Vec<String> = classes.iter().map(|c| orbit_signature(group.k, c)).collect();
    let mut labels = Vec::with_capacity(classes.len());
    for i in 0..classes.len() {
        let same_name = (0..classes.len()).filter(|&j| names[j] == names[i]).count();
        if same_name == 1 {
            labels.push(names[i].clone());
            continue;
        }
        let base = format!("{}[{}]", names[i], orbits[i]);
        let same_base: Vec<usize> = (0..classes.len()).filter(|&j| names[j] == names[i] && orbits[j] == orbits[i]).collect();
        if same_base.len() == 1 {
            labels.push(base);
        } else {
            let pos = same_base.iter().position(|&j| j == i).unwrap();
            labels.push(format!("{base}#{}", pos + 1));
        }
    }
    for (c, l) in classes.iter_mut().zip(labels) {
        c.label = l;
    }
}

/// Element of `A(S_k)`: integer coefficients indexed by class id.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BurnsideElement {
    coeffs: Vec<i64>,
}

impl BurnsideElement {
    pub fn zero(lattice: &SubgroupLattice) -> Self {
        BurnsideElement { coeffs: alloc::vec![0; lattice.len()] }
    }

    pub fn generator(lattice: &SubgroupLattice, id: usize) -> Self {
        let mut x = Self::zero(lattice);
        x.coeffs[id] = 1;
        x
    }

    /// The unit `(S_k)`.
    pub fn unit(lattice: &SubgroupLattice) -> Self {
        Self::generator(lattice, lattice.top())
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        BurnsideElement { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, id: usize) -> i64 {
        self.coeffs[id]
    }

    pub fn set(&mut self, id: usize, v: i64) {
        self.coeffs[id] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Class ids with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&i| self.coeffs[i] != 0).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        BurnsideElement { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        BurnsideElement { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: i64) -> Self {
        BurnsideElement { coeffs: self.coeffs.iter().map(|a| a * s).collect() }
    }

    pub fn mul(&self, other: &Self, lattice: &SubgroupLattice) -> Result<Self> {
        multiply(self, other, lattice)
    }

    /// `x^e` with `x^0 = (S_k)`.
    pub fn pow(&self, e: u32, lattice: &SubgroupLattice) -> Result<Self> {
        let mut out = Self::unit(lattice);
        for _ in 0..e {
            out = multiply(&out, self, lattice)?;
        }
        Ok(out)
    }

    /// Human-readable sum such as `-(Z1) + 2(D5)`.
    pub fn display(&self, lattice: &SubgroupLattice) -> String {
        let mut s = String::new();
        for id in self.support() {
            let c = self.coeffs[id];
            let label = &lattice.class(id).label;
            let sign = if c < 0 { "-" } else { "+" };
            if s.is_empty() {
                if c < 0 {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            if c.abs() != 1 {
                s.push_str(&format!("{}", c.abs()));
            }
            s.push_str(&format!("({label})"));
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

/// `(H)·(K)` by the descending recursion over the lattice.
pub fn generator_product(h: usize, k: usize, lattice: &SubgroupLattice) -> Result<BurnsideElement> {
    let m = lattice.len();
    let mut out = alloc::vec![0i64; m];
    let wh = lattice.weyl(h) as i64;
    let wk = lattice.weyl(k) as i64;
    for l in (0..m).rev() {
        let lead = lattice.n(l, k) as i64 * wk * lattice.n(l, h) as i64 * wh;
        if lead == 0 && out[l + 1..].iter().all(|&x| x == 0) {
            continue;
        }
        let mut acc = lead;
        for (lt, &c) in out.iter().enumerate().skip(l + 1) {
            if c != 0 && lattice.leq(l, lt) {
                acc -= lattice.n(l, lt) as i64 * c * lattice.weyl(lt) as i64;
            }
        }
        let wl = lattice.weyl(l) as i64;
        if acc % wl != 0 {
            return Err(inconsistent(format!("recursion at class {l}: {acc} not divisible by |W| = {wl}")));
        }
        out[l] = acc / wl;
    }
    Ok(BurnsideElement { coeffs: out })
}

/// Product in `A(S_k)`, bilinear in the generator products.
pub fn multiply(x: &BurnsideElement, y: &BurnsideElement, lattice: &SubgroupLattice) -> Result<BurnsideElement> {
    let mut out = BurnsideElement::zero(lattice);
    for h in x.support() {
        for k in y.support() {
            let p = generator_product(h, k, lattice)?;
            out = out.add(&p.scale(x.coeff(h) * y.coeff(k)));
        }
    }
    Ok(out)
}

/// Table of marks `φ_L(G/H) = |(G/H)^L|`, counted over cosets directly.
pub fn table_of_marks(lattice: &SubgroupLattice) -> Vec<Vec<u64>> {
    let group = lattice.group();
    let m = lattice.len();
    let mut marks = alloc::vec![alloc::vec![0u64; m]; m];
    for (l, lc) in lattice.classes().iter().enumerate() {
        let gens: Vec<usize> = lc.generators.iter().map(|p| group.index_of(p).expect("valid generator")).collect();
        for (h, hc) in lattice.classes().iter().enumerate() {
            // gH is fixed by L iff g⁻¹ L g ⊆ H; each coset has |H| representatives.
            let count = (0..group.order())
                .filter(|&g| gens.iter().all(|&x| hc.representative.contains(group.conj(group.inv(g), x))))
                .count() as u64;
            marks[l][h] = count / hc.order;
        }
    }
    marks
}

/// Mark homomorphism `x -> (φ_L(x))_L`.
pub fn mark_vector(x: &BurnsideElement, marks: &[Vec<u64>]) -> Vec<i64> {
    marks.iter().map(|row| row.iter().zip(x.coeffs()).map(|(&m, &c)| m as i64 * c).sum()).collect()
}

/// `(H)·(K)` by counting orbits of `G/H × G/K` by stabilizer class.
pub fn orbit_count_product(h: usize, k: usize, lattice: &SubgroupLattice) -> Result<BurnsideElement> {
    let group = lattice.group();
    let n = group.order();
    let coset_reps = |set: &ElementSet| {
        let mut seen = ElementSet::new(n);
        let mut reps = Vec::new();
        for g in 0..n {
            if !seen.contains(g) {
                reps.push(g);
                for x in set.iter() {
                    seen.insert(group.mul(g, x));
                }
            }
        }
        reps
    };
    let hrep = &lattice.class(h).representative;
    let krep = &lattice.class(k).representative;
    let hconj: Vec<ElementSet> = coset_reps(hrep).into_iter().map(|g| group.conjugate_set(g, hrep)).collect();
    let kconj: Vec<ElementSet> = coset_reps(krep).into_iter().map(|g| group.conjugate_set(g, krep)).collect();
    let mut memo: BTreeMap<ElementSet, usize> = BTreeMap::new();
    let mut points = alloc::vec![0u64; lattice.len()];
    for a in &hconj {
        for b in &kconj {
            let stab = a.intersection(b);
            let id = match memo.get(&stab) {
                Some(&id) => id,
                None => {
                    let id = lattice.class_of(&stab).ok_or_else(|| inconsistent("stabilizer not in lattice"))?;
                    memo.insert(stab, id);
                    id
                }
            };
            points[id] += 1;
        }
    }
    let mut out = BurnsideElement::zero(lattice);
    for (id, &p) in points.iter().enumerate() {
        // An orbit of type (L) has |G|/|L| points.
        let num = p * lattice.class(id).order;
        if !num.is_multiple_of(n as u64) {
            return Err(inconsistent("orbit count is not an integer"));
        }
        out.set(id, (num / n as u64) as i64);
    }
    Ok(out)
}
