//! Finite lattices stored as dense order, join and meet tables.
//!
//! Elements are the integers `0..n`. Every operation is a table lookup, so the
//! structural predicates below are plain brute force over elements.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice must have at least one element")]
    Empty,
    #[error("index {index} out of range for {n} elements")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("cover relation contains a cycle through {0}")]
    CyclicCovers(usize),
    #[error("elements {0} and {1} have no least upper bound or no greatest lower bound")]
    NotALattice(usize, usize),
    #[error("elements {0} and {1} are not comparable")]
    NotComparable(usize, usize),
    #[error("requested size {requested} exceeds the bound {bound}")]
    BoundExceeded { requested: usize, bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLattice {
    n: usize,
    leq: Vec<bool>,
    join: Vec<usize>,
    meet: Vec<usize>,
    bottom: usize,
    top: usize,
}

impl FiniteLattice {
    /// Builds a lattice from a generating relation: `(i, j)` means `i < j`.
    /// The order is the reflexive-transitive closure of the pairs.
    pub fn from_covers(n: usize, covers: &[(usize, usize)]) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        let mut up = vec![Vec::new(); n];
        for &(i, j) in covers {
            for index in [i, j] {
                if index >= n {
                    return Err(LatticeError::IndexOutOfRange { index, n });
                }
            }
            if i == j {
                return Err(LatticeError::CyclicCovers(i));
            }
            up[i].push(j);
        }
        let mut leq = vec![false; n * n];
        let mut queue = VecDeque::new();
        for x in 0..n {
            leq[x * n + x] = true;
            queue.push_back(x);
            while let Some(y) = queue.pop_front() {
                for &z in &up[y] {
                    if z == x {
                        return Err(LatticeError::CyclicCovers(x));
                    }
                    if !leq[x * n + z] {
                        leq[x * n + z] = true;
                        queue.push_back(z);
                    }
                }
            }
        }
        Self::from_leq(n, leq)
    }

    /// Builds a lattice from a full order matrix (`leq[x * n + y]` iff `x <= y`).
    pub fn from_leq(n: usize, leq: Vec<bool>) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        assert_eq!(leq.len(), n * n, "order matrix must be n x n");
        for x in 0..n {
            if !leq[x * n + x] {
                return Err(LatticeError::NotALattice(x, x));
            }
            for y in 0..n {
                if x != y && leq[x * n + y] && leq[y * n + x] {
                    return Err(LatticeError::CyclicCovers(x));
                }
                for z in 0..n {
                    if leq[x * n + y] && leq[y * n + z] && !leq[x * n + z] {
                        return Err(LatticeError::CyclicCovers(x));
                    }
                }
            }
        }
        let mut join = vec![0; n * n];
        let mut meet = vec![0; n * n];
        for x in 0..n {
            for y in x..n {
                let upper: Vec<usize> = (0..n)
                    .filter(|&z| leq[x * n + z] && leq[y * n + z])
                    .collect();
                let lub = upper
                    .iter()
                    .copied()
                    .find(|&z| upper.iter().all(|&w| leq[z * n + w]))
                    .ok_or(LatticeError::NotALattice(x, y))?;
                let lower: Vec<usize> = (0..n)
                    .filter(|&z| leq[z * n + x] && leq[z * n + y])
                    .collect();
                let glb = lower
                    .iter()
                    .copied()
                    .find(|&z| lower.iter().all(|&w| leq[w * n + z]))
                    .ok_or(LatticeError::NotALattice(x, y))?;
                join[x * n + y] = lub;
                join[y * n + x] = lub;
                meet[x * n + y] = glb;
                meet[y * n + x] = glb;
            }
        }
        let bottom = (0..n).find(|&x| (0..n).all(|y| leq[x * n + y])).unwrap();
        let top = (0..n).find(|&x| (0..n).all(|y| leq[y * n + x])).unwrap();
        Ok(FiniteLattice {
            n,
            leq,
            join,
            meet,
            bottom,
            top,
        })
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let covers: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_covers(n, &covers).expect("chains are lattices")
    }

    /// `M_k`: a bottom `0`, atoms `1..=k`, and a top `k+1`. `M_3` is the diamond.
    pub fn diamond(k: usize) -> Self {
        let top = k + 1;
        let mut covers = Vec::new();
        for atom in 1..=k {
            covers.push((0, atom));
            covers.push((atom, top));
        }
        if k == 0 {
            covers.push((0, 1));
        }
        Self::from_covers(k + 2, &covers).expect("M_k is a lattice")
    }

    /// `N_5` labelled `0 < 1 < 2 < 4` and `0 < 3 < 4`.
    pub fn pentagon() -> Self {
        Self::from_covers(5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)])
            .expect("N5 is a lattice")
    }

    /// The Boolean lattice of subsets of a `k`-element set; element `x` is the bitmask `x`.
    pub fn boolean(k: usize) -> Self {
        let n = 1usize << k;
        let mut leq = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                leq[x * n + y] = x & y == x;
            }
        }
        Self::from_leq(n, leq).expect("Boolean lattices are lattices")
    }

    /// Direct product; the pair `(x, y)` has index `x * other.size() + y`.
    pub fn product(&self, other: &FiniteLattice) -> Self {
        let (n1, n2) = (self.n, other.n);
        let n = n1 * n2;
        let mut leq = vec![false; n * n];
        for p in 0..n {
            for q in 0..n {
                leq[p * n + q] = self.leq(p / n2, q / n2) && other.leq(p % n2, q % n2);
            }
        }
        Self::from_leq(n, leq).expect("products of lattices are lattices")
    }

    /// Relabels along `perm`, where `perm[new] = old`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.n;
        assert_eq!(perm.len(), n);
        let mut leq = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                leq[i * n + j] = self.leq(perm[i], perm[j]);
            }
        }
        Self::from_leq(n, leq).expect("relabelling preserves the lattice property")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.n + y]
    }

    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.n + y]
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.n + y]
    }

    pub fn join_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn check_index(&self, x: usize) -> Result<(), LatticeError> {
        if x < self.n {
            Ok(())
        } else {
            Err(LatticeError::IndexOutOfRange { index: x, n: self.n })
        }
    }

    /// `y` covers `x`.
    pub fn covers(&self, x: usize, y: usize) -> bool {
        self.lt(x, y) && !(0..self.n).any(|z| self.lt(x, z) && self.lt(z, y))
    }

    /// All cover pairs `(x, y)` with `x` covered by `y`, in index order.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in 0..self.n {
                if self.covers(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn upper_covers(&self, x: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.covers(x, y)).collect()
    }

    pub fn lower_covers(&self, x: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.covers(y, x)).collect()
    }

    pub fn atoms(&self) -> Vec<usize> {
        self.upper_covers(self.bottom)
    }

    pub fn down_set(&self, x: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.leq(y, x)).collect()
    }

    pub fn up_set(&self, x: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.leq(x, y)).collect()
    }

    /// Length of the longest chain from the bottom to each element.
    pub fn depths(&self) -> Vec<usize> {
        let mut order: Vec<usize> = self.elements().collect();
        order.sort_by_key(|&x| self.elements().filter(|&y| self.leq(y, x)).count());
        let mut depth = vec![0; self.n];
        for &x in &order {
            depth[x] = self
                .elements()
                .filter(|&y| self.lt(y, x))
                .map(|y| depth[y] + 1)
                .max()
                .unwrap_or(0);
        }
        depth
    }

    pub fn height(&self) -> usize {
        self.depths()[self.top]
    }

    pub fn is_atomistic(&self) -> bool {
        let atoms = self.atoms();
        self.elements().all(|x| {
            let below = atoms.iter().copied().filter(|&p| self.leq(p, x));
            self.join_all(below) == x
        })
    }

    /// Every element of `[a, b]` has a complement relative to `a` and `b`.
    pub fn is_complemented_interval(&self, a: usize, b: usize) -> bool {
        let inside: Vec<usize> = self
            .elements()
            .filter(|&x| self.leq(a, x) && self.leq(x, b))
            .collect();
        inside.iter().all(|&x| {
            inside
                .iter()
                .any(|&y| self.join(x, y) == b && self.meet(x, y) == a)
        })
    }

    pub fn is_complemented(&self) -> bool {
        self.is_complemented_interval(self.bottom, self.top)
    }

    pub fn is_sectionally_complemented(&self) -> bool {
        self.elements()
            .all(|b| self.is_complemented_interval(self.bottom, b))
    }

    pub fn is_relatively_complemented(&self) -> bool {
        self.elements().all(|a| {
            self.elements()
                .filter(|&b| self.leq(a, b))
                .all(|b| self.is_complemented_interval(a, b))
        })
    }

    pub fn is_modular(&self) -> bool {
        self.elements().all(|x| {
            self.elements().filter(|&z| self.leq(x, z)).all(|z| {
                self.elements()
                    .all(|y| self.join(x, self.meet(y, z)) == self.meet(self.join(x, y), z))
            })
        })
    }

    pub fn is_distributive(&self) -> bool {
        self.elements().all(|x| {
            self.elements().all(|y| {
                self.elements().all(|z| {
                    self.meet(x, self.join(y, z)) == self.join(self.meet(x, y), self.meet(x, z))
                })
            })
        })
    }

    /// Some `z` with `x ∧ z = y ∧ z = 0` and `x ∨ z = y ∨ z`.
    pub fn perspectivity_axis(&self, x: usize, y: usize) -> Option<usize> {
        let zero = self.bottom;
        std::iter::once(zero)
            .chain(self.elements().filter(|&z| z != zero))
            .find(|&z| {
                self.meet(x, z) == zero && self.meet(y, z) == zero && self.join(x, z) == self.join(y, z)
            })
    }

    pub fn are_perspective(&self, x: usize, y: usize) -> bool {
        self.perspectivity_axis(x, y).is_some()
    }

    /// The interval `[a, b]` as a lattice in its own right.
    pub fn interval(&self, a: usize, b: usize) -> Result<Sublattice, LatticeError> {
        self.check_index(a)?;
        self.check_index(b)?;
        if !self.leq(a, b) {
            return Err(LatticeError::NotComparable(a, b));
        }
        let embedding: Vec<usize> = self
            .elements()
            .filter(|&x| self.leq(a, x) && self.leq(x, b))
            .collect();
        let m = embedding.len();
        let mut leq = vec![false; m * m];
        for (i, &x) in embedding.iter().enumerate() {
            for (j, &y) in embedding.iter().enumerate() {
                leq[i * m + j] = self.leq(x, y);
            }
        }
        let lattice = FiniteLattice::from_leq(m, leq)?;
        Ok(Sublattice { lattice, embedding })
    }

    pub fn to_file(&self) -> LatticeFile {
        LatticeFile {
            id: None,
            n: self.n,
            covers: self.cover_pairs().into_iter().map(|(x, y)| [x, y]).collect(),
        }
    }
}

/// A sublattice together with its index map into the parent lattice.
#[derive(Clone, Debug)]
pub struct Sublattice {
    pub lattice: FiniteLattice,
    /// `embedding[i]` is the parent index of local element `i`.
    pub embedding: Vec<usize>,
}

impl Sublattice {
    pub fn local_index(&self, parent: usize) -> Option<usize> {
        self.embedding.iter().position(|&x| x == parent)
    }
}

/// JSON form `{"n": int, "covers": [[i, j], ...]}`; `[i, j]` means `i` is covered by `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub n: usize,
    pub covers: Vec<[usize; 2]>,
}

impl LatticeFile {
    pub fn to_lattice(&self) -> Result<FiniteLattice, LatticeError> {
        let covers: Vec<(usize, usize)> = self.covers.iter().map(|c| (c[0], c[1])).collect();
        FiniteLattice::from_covers(self.n, &covers)
    }
}

/// A map between two lattices, not yet known to be a homomorphism.
#[derive(Clone, Debug)]
pub struct LatticeHom<'a> {
    pub source: &'a FiniteLattice,
    pub target: &'a FiniteLattice,
    pub map: Vec<usize>,
}

impl<'a> LatticeHom<'a> {
    pub fn new(
        source: &'a FiniteLattice,
        target: &'a FiniteLattice,
        map: Vec<usize>,
    ) -> Result<Self, LatticeError> {
        if map.len() != source.size() {
            return Err(LatticeError::IndexOutOfRange {
                index: map.len(),
                n: source.size(),
            });
        }
        for &y in &map {
            target.check_index(y)?;
        }
        Ok(LatticeHom {
            source,
            target,
            map,
        })
    }

    pub fn identity(lattice: &'a FiniteLattice) -> Self {
        LatticeHom {
            source: lattice,
            target: lattice,
            map: lattice.elements().collect(),
        }
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// Both `h(x ∨ y) = h(x) ∨ h(y)` and `h(x ∧ y) = h(x) ∧ h(y)` hold everywhere.
    pub fn is_hom(&self) -> bool {
        let (s, t) = (self.source, self.target);
        s.elements().all(|x| {
            s.elements().all(|y| {
                self.map[s.join(x, y)] == t.join(self.map[x], self.map[y])
                    && self.map[s.meet(x, y)] == t.meet(self.map[x], self.map[y])
            })
        })
    }

    pub fn image(&self) -> Vec<bool> {
        let mut image = vec![false; self.target.size()];
        for &y in &self.map {
            image[y] = true;
        }
        image
    }

    /// `x ≤ y ≤ z` with `x, z` in the image forces `y` into the image.
    pub fn has_convex_range(&self) -> bool {
        let t = self.target;
        let image = self.image();
        t.elements().filter(|&x| image[x]).all(|x| {
            t.elements().filter(|&z| image[z] && t.leq(x, z)).all(|z| {
                t.elements()
                    .all(|y| !(t.leq(x, y) && t.leq(y, z)) || image[y])
            })
        })
    }
}

/// Every lattice homomorphism from `source` to `target`, found by backtracking
/// over images in index order.
pub fn enumerate_homs(source: &FiniteLattice, target: &FiniteLattice) -> Vec<Vec<usize>> {
    let n = source.size();
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; n];
    fn extend(
        i: usize,
        s: &FiniteLattice,
        t: &FiniteLattice,
        map: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == s.size() {
            out.push(map.clone());
            return;
        }
        'candidate: for y in t.elements() {
            map[i] = y;
            // every pair whose table entries became fully assigned at i
            for a in 0..=i {
                for b in 0..=a {
                    let (jn, mt) = (s.join(a, b), s.meet(a, b));
                    if jn <= i && (a == i || jn == i) && map[jn] != t.join(map[a], map[b]) {
                        continue 'candidate;
                    }
                    if mt <= i && (a == i || mt == i) && map[mt] != t.meet(map[a], map[b]) {
                        continue 'candidate;
                    }
                }
            }
            extend(i + 1, s, t, map, out);
        }
        map[i] = usize::MAX;
    }
    extend(0, source, target, &mut map, &mut out);
    out
}
