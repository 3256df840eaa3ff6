//! Small von Neumann regular rings and the lattices attached to them: the
//! principal right ideals L(R), the two-sided ideals Id R, and the monoid of
//! isomorphism classes of principal right ideals.
//!
//! Rings are either products of full matrix rings over prime fields, given by
//! a spec string such as `M(2,2)xM(1,3)`, or explicit tables. Elements are
//! indices `0..size`; sets of elements are bitsets.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congruence::{con_nid_iso, is_neutral_ideal, neutral_ideals};
use crate::lattice::{FiniteLattice, LatticeError};

/// Largest ring accepted.
pub const MAX_RING_SIZE: usize = 1 << 14;

/// Structured rings up to this size get precomputed operation tables.
const TABLE_LIMIT: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("cannot parse ring spec {0:?}")]
    BadSpec(String),
    #[error("{0} is not a prime")]
    NotPrime(usize),
    #[error("ring has more than {bound} elements")]
    RingTooLarge { bound: usize },
    #[error("tables do not define a unital ring: {0}")]
    NotARing(String),
    #[error("ring is not regular: no y with xyx = x for x = {0}")]
    NotRegular(usize),
    #[error("element {0} is not idempotent")]
    NotIdempotent(usize),
    #[error("not a neutral ideal of L(R)")]
    NotNeutral,
    #[error("not a two-sided ideal")]
    NotTwoSided,
    #[error("principal right ideal {0} has no decomposition into independent atoms")]
    DecompositionFail(usize),
    #[error("lattice hypotheses fail")]
    HypothesesFail,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// One factor `M_n(F_p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixBlock {
    pub n: usize,
    pub p: usize,
}

/// A product of matrix rings, written `M(n1,p1)xM(n2,p2)x...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec(pub Vec<MatrixBlock>);

impl FromStr for RingSpec {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, RingError> {
        let bad = || RingError::BadSpec(s.to_string());
        let mut blocks = Vec::new();
        for part in s.split(['x', '×']) {
            let inner = part
                .trim()
                .strip_prefix("M(")
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(bad)?;
            let (n, p) = inner.split_once(',').ok_or_else(bad)?;
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            let p: usize = p.trim().parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
                return Err(RingError::NotPrime(p));
            }
            blocks.push(MatrixBlock { n, p });
        }
        Ok(RingSpec(blocks))
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "M({},{})", b.n, b.p)?;
        }
        Ok(())
    }
}

/// JSON form of a tabular ring. `add` and `mul` are indexed by position in
/// `elements`; `one` is the position of the unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingTableFile {
    pub elements: Vec<String>,
    pub add: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
    pub one: usize,
}

#[derive(Clone, Debug)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
}

#[derive(Clone, Debug)]
struct Structure {
    spec: RingSpec,
    /// Radix of every digit; block `c` owns digits `offsets[c]..offsets[c + 1]`.
    radix: Vec<usize>,
    offsets: Vec<usize>,
}

impl Structure {
    fn digits(&self, mut x: usize) -> Vec<usize> {
        self.radix
            .iter()
            .map(|&r| {
                let d = x % r;
                x /= r;
                d
            })
            .collect()
    }

    fn encode(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.radix)
            .rev()
            .fold(0, |acc, (&d, &r)| acc * r + d)
    }

    fn add(&self, x: usize, y: usize) -> usize {
        let (dx, dy) = (self.digits(x), self.digits(y));
        let sum: Vec<usize> = (0..dx.len()).map(|i| (dx[i] + dy[i]) % self.radix[i]).collect();
        self.encode(&sum)
    }

    fn neg(&self, x: usize) -> usize {
        let d: Vec<usize> = self
            .digits(x)
            .iter()
            .zip(&self.radix)
            .map(|(&d, &r)| (r - d) % r)
            .collect();
        self.encode(&d)
    }

    fn mul(&self, x: usize, y: usize) -> usize {
        let (dx, dy) = (self.digits(x), self.digits(y));
        let mut out = vec![0; dx.len()];
        for (c, b) in self.spec.0.iter().enumerate() {
            let base = self.offsets[c];
            for i in 0..b.n {
                for j in 0..b.n {
                    let mut acc = 0;
                    for t in 0..b.n {
                        acc += dx[base + i * b.n + t] * dy[base + t * b.n + j];
                    }
                    out[base + i * b.n + j] = acc % b.p;
                }
            }
        }
        self.encode(&out)
    }

    fn one(&self) -> usize {
        let mut d = vec![0; self.radix.len()];
        for (c, b) in self.spec.0.iter().enumerate() {
            for i in 0..b.n {
                d[self.offsets[c] + i * b.n + i] = 1;
            }
        }
        self.encode(&d)
    }
}

/// A finite associative unital ring on the elements `0..size`.
#[derive(Clone, Debug)]
pub struct FiniteRing {
    size: usize,
    zero: usize,
    one: usize,
    structure: Option<Structure>,
    tables: Option<Tables>,
}

impl FiniteRing {
    pub fn structured(spec: &RingSpec) -> Result<Self, RingError> {
        if spec.0.is_empty() {
            return Err(RingError::BadSpec(String::new()));
        }
        let too_large = RingError::RingTooLarge {
            bound: MAX_RING_SIZE,
        };
        let mut size = 1usize;
        let mut radix = Vec::new();
        let mut offsets = vec![0];
        for b in &spec.0 {
            let entries = b.n.checked_mul(b.n).ok_or(too_large.clone())?;
            for _ in 0..entries {
                size = size
                    .checked_mul(b.p)
                    .filter(|&s| s <= MAX_RING_SIZE)
                    .ok_or(too_large.clone())?;
                radix.push(b.p);
            }
            offsets.push(radix.len());
        }
        let structure = Structure {
            spec: spec.clone(),
            radix,
            offsets,
        };
        let tables = (size <= TABLE_LIMIT).then(|| {
            let mut add = Vec::with_capacity(size * size);
            let mut mul = Vec::with_capacity(size * size);
            for x in 0..size {
                for y in 0..size {
                    add.push(structure.add(x, y) as u32);
                    mul.push(structure.mul(x, y) as u32);
                }
            }
            let neg = (0..size).map(|x| structure.neg(x) as u32).collect();
            Tables { add, mul, neg }
        });
        Ok(FiniteRing {
            size,
            zero: 0,
            one: structure.one(),
            structure: Some(structure),
            tables,
        })
    }

    pub fn parse(spec: &str) -> Result<Self, RingError> {
        Self::structured(&spec.parse()?)
    }

    /// Validates the ring axioms on explicit tables.
    pub fn from_tables(file: &RingTableFile) -> Result<Self, RingError> {
        let n = file.elements.len();
        let fail = |msg: &str| Err(RingError::NotARing(msg.to_string()));
        if n == 0 {
            return fail("no elements");
        }
        if n > MAX_RING_SIZE {
            return Err(RingError::RingTooLarge {
                bound: MAX_RING_SIZE,
            });
        }
        for table in [&file.add, &file.mul] {
            if table.len() != n || table.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
                return fail("tables must be n by n with entries below n");
            }
        }
        if file.one >= n {
            return fail("unit out of range");
        }
        let add = |x: usize, y: usize| file.add[x][y];
        let mul = |x: usize, y: usize| file.mul[x][y];
        let Some(zero) = (0..n).find(|&z| (0..n).all(|x| add(z, x) == x && add(x, z) == x)) else {
            return fail("no additive identity");
        };
        let mut neg = Vec::with_capacity(n);
        for x in 0..n {
            let Some(y) = (0..n).find(|&y| add(x, y) == zero) else {
                return fail("missing additive inverse");
            };
            neg.push(y as u32);
        }
        for x in 0..n {
            if mul(file.one, x) != x || mul(x, file.one) != x {
                return fail("unit is not a multiplicative identity");
            }
            for y in 0..n {
                if add(x, y) != add(y, x) {
                    return fail("addition is not commutative");
                }
                for z in 0..n {
                    if add(add(x, y), z) != add(x, add(y, z)) {
                        return fail("addition is not associative");
                    }
                    if mul(mul(x, y), z) != mul(x, mul(y, z)) {
                        return fail("multiplication is not associative");
                    }
                    if mul(x, add(y, z)) != add(mul(x, y), mul(x, z))
                        || mul(add(y, z), x) != add(mul(y, x), mul(z, x))
                    {
                        return fail("multiplication does not distribute over addition");
                    }
                }
            }
        }
        let flat = |t: &Vec<Vec<usize>>| t.iter().flatten().map(|&v| v as u32).collect();
        Ok(FiniteRing {
            size: n,
            zero,
            one: file.one,
            structure: None,
            tables: Some(Tables {
                add: flat(&file.add),
                mul: flat(&file.mul),
                neg,
            }),
        })
    }

    /// `Z/nZ` as a tabular ring.
    pub fn integers_mod(n: usize) -> Result<Self, RingError> {
        let table = |op: fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
            (0..n).map(|x| (0..n).map(|y| op(x, y) % n).collect()).collect()
        };
        Self::from_tables(&RingTableFile {
            elements: (0..n).map(|x| x.to_string()).collect(),
            add: table(|x, y| x + y),
            mul: table(|x, y| x * y),
            one: 1 % n.max(1),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn spec(&self) -> Option<&RingSpec> {
        self.structure.as_ref().map(|s| &s.spec)
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        match (&self.tables, &self.structure) {
            (Some(t), _) => t.add[x * self.size + y] as usize,
            (None, Some(s)) => s.add(x, y),
            (None, None) => unreachable!(),
        }
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        match (&self.tables, &self.structure) {
            (Some(t), _) => t.mul[x * self.size + y] as usize,
            (None, Some(s)) => s.mul(x, y),
            (None, None) => unreachable!(),
        }
    }

    pub fn neg(&self, x: usize) -> usize {
        match (&self.tables, &self.structure) {
            (Some(t), _) => t.neg[x] as usize,
            (None, Some(s)) => s.neg(x),
            (None, None) => unreachable!(),
        }
    }

    pub fn is_idempotent(&self, x: usize) -> bool {
        self.mul(x, x) == x
    }

    /// `xR`.
    pub fn right_ideal(&self, x: usize) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.size);
        for r in self.elements() {
            set.insert(self.mul(x, r));
        }
        set
    }

    /// The two-sided ideal generated by `seeds`.
    pub fn ideal_closure(&self, seeds: &FixedBitSet) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.size);
        set.insert(self.zero);
        let mut queue: Vec<usize> = seeds.ones().collect();
        let mut members = vec![self.zero];
        while let Some(x) = queue.pop() {
            if set.contains(x) {
                continue;
            }
            set.insert(x);
            members.push(x);
            for r in self.elements() {
                for y in [self.mul(r, x), self.mul(x, r)] {
                    if !set.contains(y) {
                        queue.push(y);
                    }
                }
            }
            for &m in &members {
                let y = self.add(x, m);
                if !set.contains(y) {
                    queue.push(y);
                }
            }
        }
        set
    }

    pub fn is_two_sided_ideal(&self, set: &FixedBitSet) -> bool {
        set.len() == self.size
            && set.contains(self.zero)
            && set.ones().all(|x| {
                set.contains(self.neg(x))
                    && set.ones().all(|y| set.contains(self.add(x, y)))
                    && self
                        .elements()
                        .all(|r| set.contains(self.mul(r, x)) && set.contains(self.mul(x, r)))
            })
    }
}

/// Some `x` with no `y` satisfying `xyx = x`.
pub fn regularity_failure(r: &FiniteRing) -> Option<usize> {
    r.elements()
        .find(|&x| !r.elements().any(|y| r.mul(r.mul(x, y), x) == x))
}

pub fn is_regular(r: &FiniteRing) -> bool {
    regularity_failure(r).is_none()
}

fn sort_sets(sets: impl IntoIterator<Item = FixedBitSet>) -> Vec<FixedBitSet> {
    let mut keyed: Vec<(usize, Vec<usize>, FixedBitSet)> = sets
        .into_iter()
        .map(|s| (s.count_ones(..), s.ones().collect(), s))
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    keyed.dedup_by(|a, b| a.1 == b.1);
    keyed.into_iter().map(|k| k.2).collect()
}

fn inclusion_lattice(sets: &[FixedBitSet]) -> Result<FiniteLattice, LatticeError> {
    let n = sets.len();
    let mut leq = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            leq[i * n + j] = sets[i].is_subset(&sets[j]);
        }
    }
    FiniteLattice::from_leq(n, leq)
}

/// L(R): node `i` is the ideal `ideals[i]`, nodes ordered by size.
#[derive(Clone, Debug)]
pub struct PrincipalRightIdeals {
    pub lattice: FiniteLattice,
    pub ideals: Vec<FixedBitSet>,
    /// An idempotent `e` with `eR` equal to the node's ideal.
    pub generators: Vec<usize>,
    /// `node_of_element[x]` is the node of `xR`.
    pub node_of_element: Vec<usize>,
}

fn right_ideal_classes(r: &FiniteRing) -> (Vec<FixedBitSet>, Vec<usize>) {
    let per_element: Vec<FixedBitSet> = r.elements().map(|x| r.right_ideal(x)).collect();
    let ideals = sort_sets(per_element.iter().cloned());
    let index: HashMap<Vec<usize>, usize> = ideals
        .iter()
        .enumerate()
        .map(|(i, s)| (s.ones().collect(), i))
        .collect();
    let node_of_element = per_element
        .iter()
        .map(|s| index[&s.ones().collect::<Vec<_>>()])
        .collect();
    (ideals, node_of_element)
}

pub fn principal_right_ideals(r: &FiniteRing) -> Result<PrincipalRightIdeals, RingError> {
    if let Some(x) = regularity_failure(r) {
        return Err(RingError::NotRegular(x));
    }
    let (ideals, node_of_element) = right_ideal_classes(r);
    let lattice = inclusion_lattice(&ideals)?;
    let generators = (0..ideals.len())
        .map(|node| {
            r.elements()
                .find(|&e| node_of_element[e] == node && r.is_idempotent(e))
                .ok_or(RingError::NotRegular(node))
        })
        .collect::<Result<_, _>>()?;
    Ok(PrincipalRightIdeals {
        lattice,
        ideals,
        generators,
        node_of_element,
    })
}

/// Id R ordered by inclusion. For a finite ring every ideal is finitely
/// generated, so this is also the lattice of compact ideals.
#[derive(Clone, Debug)]
pub struct TwoSidedIdeals {
    pub lattice: FiniteLattice,
    pub ideals: Vec<FixedBitSet>,
}

impl TwoSidedIdeals {
    pub fn index_of(&self, set: &FixedBitSet) -> Option<usize> {
        self.ideals.iter().position(|i| i == set)
    }
}

/// Sums of principal ideals `RxR`; `RxR` only depends on `xR`.
pub fn two_sided_ideals(r: &FiniteRing) -> Result<TwoSidedIdeals, RingError> {
    let (classes, _) = right_ideal_classes(r);
    let mut found = sort_sets(classes.iter().map(|c| r.ideal_closure(c)));
    loop {
        let mut sums = Vec::new();
        for i in 0..found.len() {
            for j in 0..i {
                let mut sum = FixedBitSet::with_capacity(r.size());
                for x in found[i].ones() {
                    for y in found[j].ones() {
                        sum.insert(r.add(x, y));
                    }
                }
                if !found.contains(&sum) && !sums.contains(&sum) {
                    sums.push(sum);
                }
            }
        }
        if sums.is_empty() {
            break;
        }
        found = sort_sets(found.into_iter().chain(sums));
    }
    let lattice = inclusion_lattice(&found)?;
    Ok(TwoSidedIdeals {
        lattice,
        ideals: found,
    })
}

/// A certificate `(x, y)` with `x ∈ aRb`, `y ∈ bRa`, `xy = a` and `yx = b`.
pub fn ideals_isomorphic(
    r: &FiniteRing,
    a: usize,
    b: usize,
) -> Result<Option<(usize, usize)>, RingError> {
    for e in [a, b] {
        if !r.is_idempotent(e) {
            return Err(RingError::NotIdempotent(e));
        }
    }
    let corner = |u: usize, v: usize| -> Vec<usize> {
        let mut set = FixedBitSet::with_capacity(r.size());
        for t in r.elements() {
            set.insert(r.mul(r.mul(u, t), v));
        }
        set.ones().collect()
    };
    let (arb, bra) = (corner(a, b), corner(b, a));
    Ok(arb.iter().find_map(|&x| {
        bra.iter()
            .find(|&&y| r.mul(x, y) == a && r.mul(y, x) == b)
            .map(|&y| (x, y))
    }))
}

/// A ring with its ideal lattices and the isomorphism classes of L(R).
#[derive(Clone, Debug)]
pub struct RingStructure {
    pub ring: FiniteRing,
    pub right: PrincipalRightIdeals,
    pub two_sided: TwoSidedIdeals,
    /// `iso_class[node]` is the least node isomorphic to `node`.
    pub iso_class: Vec<usize>,
}

impl RingStructure {
    pub fn new(ring: FiniteRing) -> Result<Self, RingError> {
        let right = principal_right_ideals(&ring)?;
        let two_sided = two_sided_ideals(&ring)?;
        let m = right.ideals.len();
        let mut iso_class: Vec<usize> = (0..m).collect();
        for i in 0..m {
            for j in 0..i {
                if iso_class[j] == j
                    && ideals_isomorphic(&ring, right.generators[i], right.generators[j])?.is_some()
                {
                    iso_class[i] = j;
                    break;
                }
            }
        }
        Ok(RingStructure {
            ring,
            right,
            two_sided,
            iso_class,
        })
    }

    pub fn isomorphic_nodes(&self, i: usize, j: usize) -> bool {
        self.iso_class[i] == self.iso_class[j]
    }

    /// `{x : xR ∈ ideal}` for a neutral ideal of L(R), given by its nodes.
    pub fn phi(&self, ideal: &[usize]) -> Result<FixedBitSet, RingError> {
        if !is_neutral_ideal(&self.right.lattice, ideal).map_err(|_| RingError::NotNeutral)? {
            return Err(RingError::NotNeutral);
        }
        let mut member = vec![false; self.right.ideals.len()];
        for &node in ideal {
            member[node] = true;
        }
        let mut set = FixedBitSet::with_capacity(self.ring.size());
        for x in self.ring.elements() {
            if member[self.right.node_of_element[x]] {
                set.insert(x);
            }
        }
        Ok(set)
    }

    /// The nodes of L(R) contained in a two-sided ideal.
    pub fn psi(&self, ideal: &FixedBitSet) -> Result<Vec<usize>, RingError> {
        if !self.ring.is_two_sided_ideal(ideal) {
            return Err(RingError::NotTwoSided);
        }
        Ok((0..self.right.ideals.len())
            .filter(|&node| self.right.ideals[node].is_subset(ideal))
            .collect())
    }

    /// φ and ψ are mutually inverse and both preserve inclusion.
    pub fn verify_nid_id_iso(&self) -> Result<bool, RingError> {
        let nids = neutral_ideals(&self.right.lattice);
        let ids = &self.two_sided.ideals;
        if nids.len() != ids.len() {
            return Ok(false);
        }
        let mut images = Vec::with_capacity(nids.len());
        for a in &nids {
            let image = self.phi(a)?;
            if self.psi(&image)? != *a {
                return Ok(false);
            }
            let Some(index) = self.two_sided.index_of(&image) else {
                return Ok(false);
            };
            images.push(index);
        }
        for ideal in ids {
            if self.phi(&self.psi(ideal)?)? != *ideal {
                return Ok(false);
            }
        }
        let subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.contains(x));
        Ok((0..nids.len()).all(|i| {
            (0..nids.len()).all(|j| {
                subset(&nids[i], &nids[j]) == self.two_sided.lattice.leq(images[i], images[j])
            })
        }))
    }

    /// A lattice ideal of L(R) is neutral exactly when it is closed under
    /// isomorphism; checked for every (principal) ideal.
    pub fn neutral_iff_iso_closed(&self) -> bool {
        let l = &self.right.lattice;
        l.elements().all(|m| {
            let ideal = l.down_set(m);
            let neutral = is_neutral_ideal(l, &ideal).unwrap_or(false);
            let closed = l.elements().all(|i| {
                ideal.contains(&i) || !ideal.iter().any(|&j| self.isomorphic_nodes(i, j))
            });
            neutral == closed
        })
    }

    /// Con L(R) ≅ NId L(R) composed with φ lands bijectively and
    /// order-isomorphically on Id R.
    pub fn conc_idc_iso(&self) -> Result<bool, RingError> {
        let iso = con_nid_iso(&self.right.lattice).map_err(|_| RingError::HypothesesFail)?;
        let con = &iso.congruences;
        let mut map = Vec::with_capacity(con.len());
        for i in 0..con.len() {
            let image = self.phi(&iso.ideals[iso.forward[i]])?;
            let Some(index) = self.two_sided.index_of(&image) else {
                return Ok(false);
            };
            map.push(index);
        }
        let mut hit = vec![false; self.two_sided.ideals.len()];
        for &j in &map {
            hit[j] = true;
        }
        let ids = &self.two_sided.lattice;
        Ok(map.len() == hit.len()
            && hit.iter().all(|&h| h)
            && (0..con.len()).all(|i| (0..con.len()).all(|j| con.leq(i, j) == ids.leq(map[i], map[j]))))
    }

    /// Classes of principal right ideals as vectors over the isomorphism
    /// classes of atoms of L(R). Each node is split greedily into independent
    /// atoms; in a complemented modular lattice any maximal independent set of
    /// atoms below `x` joins to `x`.
    pub fn v_monoid(&self) -> Result<VMonoid, RingError> {
        let l = &self.right.lattice;
        let atoms = l.atoms();
        let mut atom_classes: Vec<usize> = atoms.iter().map(|&a| self.iso_class[a]).collect();
        atom_classes.sort_unstable();
        atom_classes.dedup();
        let k = atom_classes.len();
        let mut class_of = Vec::with_capacity(l.size());
        for x in l.elements() {
            let mut counts = vec![0u32; k];
            let mut current = l.bottom();
            for &a in atoms.iter().filter(|&&a| l.leq(a, x)) {
                if l.meet(a, current) == l.bottom() {
                    current = l.join(current, a);
                    let slot = atom_classes.binary_search(&self.iso_class[a]).unwrap();
                    counts[slot] += 1;
                }
            }
            if current != x {
                return Err(RingError::DecompositionFail(x));
            }
            class_of.push(MonoidElem(counts));
        }
        Ok(VMonoid {
            k,
            atom_classes,
            class_of,
        })
    }

    /// π(α) = {x : [xR] ≤ nα for some n ≥ 1}. Every class vector has entries
    /// at most `vm.bound()`, so `n` never needs to exceed it.
    pub fn pi_map(&self, vm: &VMonoid, alpha: &MonoidElem) -> FixedBitSet {
        let bound = vm.bound();
        let mut set = FixedBitSet::with_capacity(self.ring.size());
        for x in self.ring.elements() {
            let class = &vm.class_of[self.right.node_of_element[x]];
            if (1..=bound).any(|n| class.leq(&alpha.scale(n))) {
                set.insert(x);
            }
        }
        set
    }

    /// Checks π over the box `{0..=bound}^k`, which contains every class
    /// vector and reaches every support.
    pub fn verify_pi(&self, vm: &VMonoid) -> PiReport {
        let bound = vm.bound();
        let alphas = MonoidElem::box_elements(vm.k, bound);
        let ids = &self.two_sided;
        let images: Vec<Option<usize>> = alphas
            .iter()
            .map(|a| ids.index_of(&self.pi_map(vm, a)))
            .collect();
        let lands_in_ideals = images.iter().all(Option::is_some);
        let image = |i: usize| images[i].unwrap();

        let zero_ok = lands_in_ideals && image(0) == ids.lattice.bottom();
        let additive = lands_in_ideals
            && zero_ok
            && (0..alphas.len()).all(|i| {
                (0..alphas.len()).all(|j| {
                    let sum = self.pi_map(vm, &alphas[i].add(&alphas[j]));
                    ids.index_of(&sum) == Some(ids.lattice.join(image(i), image(j)))
                })
            });
        let principal = (0..self.right.ideals.len()).all(|node| {
            self.pi_map(vm, &vm.class_of[node]) == self.ring.ideal_closure(&self.right.ideals[node])
        });
        let order = lands_in_ideals
            && (0..alphas.len()).all(|i| {
                (0..alphas.len()).all(|j| {
                    let dominated = (1..=bound).any(|n| alphas[i].leq(&alphas[j].scale(n)));
                    dominated == ids.lattice.leq(image(i), image(j))
                })
            });
        let surjective = lands_in_ideals
            && ids
                .lattice
                .elements()
                .all(|t| images.contains(&Some(t)));
        let support_iso = lands_in_ideals && {
            let mut by_support: HashMap<Vec<bool>, usize> = HashMap::new();
            let consistent = alphas
                .iter()
                .enumerate()
                .all(|(i, a)| *by_support.entry(a.support()).or_insert(image(i)) == image(i));
            consistent
                && by_support.len() == ids.ideals.len()
                && by_support.iter().all(|(s, &i)| {
                    by_support.iter().all(|(t, &j)| {
                        let sub = s.iter().zip(t).all(|(&x, &y)| !x || y);
                        sub == ids.lattice.leq(i, j)
                    })
                })
        };
        PiReport {
            additive,
            principal,
            order,
            surjective,
            support_iso,
        }
    }
}

/// `V(R)` as a submonoid of `ℕ^k`.
#[derive(Clone, Debug)]
pub struct VMonoid {
    pub k: usize,
    /// Iso-class representative (a node of L(R)) for each coordinate.
    pub atom_classes: Vec<usize>,
    /// Class vector of each node of L(R).
    pub class_of: Vec<MonoidElem>,
}

impl VMonoid {
    /// Largest coordinate of any class vector, at least 1.
    pub fn bound(&self) -> u32 {
        self.class_of
            .iter()
            .flat_map(|c| c.0.iter().copied())
            .max()
            .unwrap_or(0)
            .max(1)
    }
}

/// An element of `ℕ^k`, ordered componentwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonoidElem(pub Vec<u32>);

impl MonoidElem {
    pub fn zero(k: usize) -> Self {
        MonoidElem(vec![0; k])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &MonoidElem) -> MonoidElem {
        MonoidElem(self.0.iter().zip(&other.0).map(|(x, y)| x + y).collect())
    }

    pub fn scale(&self, n: u32) -> MonoidElem {
        MonoidElem(self.0.iter().map(|x| x * n).collect())
    }

    pub fn leq(&self, other: &MonoidElem) -> bool {
        self.0.iter().zip(&other.0).all(|(x, y)| x <= y)
    }

    pub fn support(&self) -> Vec<bool> {
        self.0.iter().map(|&x| x > 0).collect()
    }

    /// Every vector with entries in `0..=bound`, zero first.
    pub fn box_elements(k: usize, bound: u32) -> Vec<MonoidElem> {
        let mut out = vec![MonoidElem::zero(k)];
        for i in 0..k {
            let mut next = Vec::with_capacity(out.len() * (bound as usize + 1));
            for v in 0..=bound {
                for e in &out {
                    let mut e = e.clone();
                    e.0[i] = v;
                    next.push(e);
                }
            }
            out = next;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiReport {
    /// π(0) = 0 and π(α + β) = π(α) + π(β).
    pub additive: bool,
    /// π([I]) = RI for every principal right ideal I.
    pub principal: bool,
    /// π(α) ⊆ π(β) iff α ≤ nβ for some n.
    pub order: bool,
    pub surjective: bool,
    /// π factors through the support map as an isomorphism `2^k ≅ Id R`.
    pub support_iso: bool,
}

impl PiReport {
    pub fn all(&self) -> bool {
        self.additive && self.principal && self.order && self.surjective && self.support_iso
    }
}

/// The support map `ℕ^k → 2^k`, as a bitmask.
pub fn support_mask(alpha: &MonoidElem) -> u64 {
    alpha
        .0
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// Universal property of the support map among join-semilattices with zero
/// of at most four elements: every monoid map `ℕ^k → T`, fixed by the images
/// of the generators, equals `g ∘ support` for the join-homomorphism
/// `g(S) = ⋁_{i∈S} t_i`, checked on the box `{0..=bound}^k`. Uniqueness
/// follows from the support map being onto, which is checked too.
pub fn check_support_universal_property(k: usize, bound: u32) -> Result<bool, LatticeError> {
    let alphas = MonoidElem::box_elements(k, bound.max(1));
    let mut hit = vec![false; 1 << k];
    for a in &alphas {
        hit[support_mask(a) as usize] = true;
    }
    if !hit.iter().all(|&h| h) {
        return Ok(false);
    }
    for t in crate::enumerate::enumerate_lattices(4)? {
        let zero = t.bottom();
        let mut images = vec![0usize; k];
        loop {
            let g = |mask: usize| {
                (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .fold(zero, |acc, i| t.join(acc, images[i]))
            };
            let factors = alphas.iter().all(|a| {
                let direct = a
                    .0
                    .iter()
                    .enumerate()
                    .fold(zero, |acc, (i, &n)| (0..n).fold(acc, |acc, _| t.join(acc, images[i])));
                direct == g(support_mask(a) as usize)
            });
            let join_hom = (0..1usize << k)
                .all(|s| (0..1usize << k).all(|u| g(s | u) == t.join(g(s), g(u))));
            if !(factors && join_hom) {
                return Ok(false);
            }
            // next assignment of generator images
            let Some(i) = (0..k).find(|&i| images[i] + 1 < t.size()) else {
                break;
            };
            images[i] += 1;
            images[..i].iter_mut().for_each(|x| *x = 0);
        }
    }
    Ok(true)
}
