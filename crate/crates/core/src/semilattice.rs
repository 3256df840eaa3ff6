//! Finite join-semilattices, the refinement property, and weak distributivity.
//!
//! A semilattice is distributive here exactly when it has the refinement
//! property; no lattice meet is assumed anywhere in this module.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::FiniteLattice;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemilatticeError {
    #[error("join table is not idempotent, commutative and associative")]
    NotASemilattice,
    #[error("map does not preserve joins at ({x}, {y})")]
    NotAHom { x: usize, y: usize },
    #[error("map has {got} entries, expected {expected}")]
    BadMap { got: usize, expected: usize },
    #[error("composition of maps with mismatched semilattices")]
    NotComposable,
    #[error("target semilattice fails the refinement property at {0:?}")]
    TargetNotDistributive([usize; 4]),
    #[error("input witness is not valid at {0}")]
    InvalidInputWitness(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteJoinSemilattice {
    n: usize,
    join: Vec<usize>,
}

/// JSON form `{"n": int, "join": [[int, ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemilatticeFile {
    pub n: usize,
    pub join: Vec<Vec<usize>>,
}

impl FiniteJoinSemilattice {
    pub fn from_table(n: usize, join: Vec<usize>) -> Result<Self, SemilatticeError> {
        if n == 0 || join.len() != n * n || join.iter().any(|&z| z >= n) {
            return Err(SemilatticeError::NotASemilattice);
        }
        let j = |x: usize, y: usize| join[x * n + y];
        for x in 0..n {
            if j(x, x) != x {
                return Err(SemilatticeError::NotASemilattice);
            }
            for y in 0..n {
                if j(x, y) != j(y, x) {
                    return Err(SemilatticeError::NotASemilattice);
                }
                for z in 0..n {
                    if j(j(x, y), z) != j(x, j(y, z)) {
                        return Err(SemilatticeError::NotASemilattice);
                    }
                }
            }
        }
        Ok(FiniteJoinSemilattice { n, join })
    }

    pub fn from_file(file: &SemilatticeFile) -> Result<Self, SemilatticeError> {
        if file.join.len() != file.n || file.join.iter().any(|row| row.len() != file.n) {
            return Err(SemilatticeError::NotASemilattice);
        }
        Self::from_table(file.n, file.join.concat())
    }

    pub fn to_file(&self) -> SemilatticeFile {
        SemilatticeFile {
            n: self.n,
            join: self.join.chunks(self.n).map(<[usize]>::to_vec).collect(),
        }
    }

    pub fn from_lattice(l: &FiniteLattice) -> Self {
        let n = l.size();
        let join = (0..n * n).map(|k| l.join(k / n, k % n)).collect();
        FiniteJoinSemilattice { n, join }
    }

    /// The subsemilattice on `keep`, which must be join-closed; elements are
    /// renumbered in the order given.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self, SemilatticeError> {
        let m = keep.len();
        let mut join = Vec::with_capacity(m * m);
        for &x in keep {
            for &y in keep {
                let z = self.join(x, y);
                join.push(keep.iter().position(|&k| k == z).ok_or(SemilatticeError::NotASemilattice)?);
            }
        }
        Self::from_table(m, join)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.n + y]
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.join(x, y) == y
    }

    pub fn bottom(&self) -> Option<usize> {
        self.elements().find(|&x| self.elements().all(|y| self.leq(x, y)))
    }

    pub fn top(&self) -> usize {
        self.elements().fold(0, |acc, x| self.join(acc, x))
    }

    pub fn down_set(&self, x: usize) -> Vec<usize> {
        self.elements().filter(|&y| self.leq(y, x)).collect()
    }

    /// Pairs `(a, b)` with `a ∨ b = e`, in lexicographic order.
    pub fn decompositions(&self, e: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if self.join(a, b) == e {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Number of elements below `x`; used to order candidates largest-first.
    pub fn rank(&self, x: usize) -> usize {
        self.elements().filter(|&y| self.leq(y, x)).count()
    }

    /// Searches for a refinement square of `a0 + a1 = b0 + b1`.
    pub fn refinement_square(&self, a0: usize, a1: usize, b0: usize, b1: usize) -> Option<RefinementSquare> {
        let lower = |x: usize, y: usize| -> Vec<usize> {
            self.elements()
                .filter(|&c| self.leq(c, x) && self.leq(c, y))
                .collect()
        };
        let (l00, l01, l10, l11) = (lower(a0, b0), lower(a0, b1), lower(a1, b0), lower(a1, b1));
        for &c00 in &l00 {
            for &c01 in &l01 {
                if self.join(c00, c01) != a0 {
                    continue;
                }
                for &c10 in &l10 {
                    if self.join(c00, c10) != b0 {
                        continue;
                    }
                    for &c11 in &l11 {
                        if self.join(c10, c11) == a1 && self.join(c01, c11) == b1 {
                            return Some(RefinementSquare {
                                a0,
                                a1,
                                b0,
                                b1,
                                c00,
                                c01,
                                c10,
                                c11,
                            });
                        }
                    }
                }
            }
        }
        None
    }
}

/// A solution of `a0 + a1 = b0 + b1`: `a_i = c_i0 + c_i1` and `b_i = c_0i + c_1i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RefinementSquare {
    pub a0: usize,
    pub a1: usize,
    pub b0: usize,
    pub b1: usize,
    pub c00: usize,
    pub c01: usize,
    pub c10: usize,
    pub c11: usize,
}

impl RefinementSquare {
    pub fn is_valid(&self, s: &FiniteJoinSemilattice) -> bool {
        s.join(self.c00, self.c01) == self.a0
            && s.join(self.c10, self.c11) == self.a1
            && s.join(self.c00, self.c10) == self.b0
            && s.join(self.c01, self.c11) == self.b1
    }

    fn swap_rows(self) -> Self {
        RefinementSquare {
            a0: self.a1,
            a1: self.a0,
            c00: self.c10,
            c01: self.c11,
            c10: self.c00,
            c11: self.c01,
            ..self
        }
    }

    fn swap_columns(self) -> Self {
        RefinementSquare {
            b0: self.b1,
            b1: self.b0,
            c00: self.c01,
            c01: self.c00,
            c10: self.c11,
            c11: self.c10,
            ..self
        }
    }

    fn transpose(self) -> Self {
        RefinementSquare {
            a0: self.b0,
            a1: self.b1,
            b0: self.a0,
            b1: self.a1,
            c00: self.c00,
            c01: self.c10,
            c10: self.c01,
            c11: self.c11,
        }
    }
}

/// A refinement square for every equation of a semilattice with the
/// refinement property. Squares are stored once per symmetry class.
#[derive(Clone, Debug)]
pub struct Refiner {
    semilattice: FiniteJoinSemilattice,
    squares: HashMap<[usize; 4], RefinementSquare>,
}

fn canonical_equation(a0: usize, a1: usize, b0: usize, b1: usize) -> [usize; 4] {
    let a = (a0.min(a1), a0.max(a1));
    let b = (b0.min(b1), b0.max(b1));
    let (p, q) = if a <= b { (a, b) } else { (b, a) };
    [p.0, p.1, q.0, q.1]
}

impl Refiner {
    pub fn semilattice(&self) -> &FiniteJoinSemilattice {
        &self.semilattice
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    /// The stored square for `a0 + a1 = b0 + b1`, re-oriented to this equation.
    pub fn square(&self, a0: usize, a1: usize, b0: usize, b1: usize) -> Option<RefinementSquare> {
        let key = canonical_equation(a0, a1, b0, b1);
        let mut sq = *self.squares.get(&key)?;
        if (sq.a0, sq.a1) != (a0, a1) && (sq.a0, sq.a1) != (a1, a0) {
            sq = sq.transpose();
        }
        if (sq.a0, sq.a1) != (a0, a1) {
            sq = sq.swap_rows();
        }
        if (sq.b0, sq.b1) != (b0, b1) {
            sq = sq.swap_columns();
        }
        debug_assert_eq!((sq.a0, sq.a1, sq.b0, sq.b1), (a0, a1, b0, b1));
        Some(sq)
    }
}

/// Checks every equation `a0 + a1 = b0 + b1`. Returns the squares, or the
/// first equation with no refinement.
pub fn check_refinement(s: &FiniteJoinSemilattice) -> Result<Refiner, [usize; 4]> {
    let mut by_sum: Vec<Vec<(usize, usize)>> = vec![Vec::new(); s.size()];
    for a0 in s.elements() {
        for a1 in a0..s.size() {
            by_sum[s.join(a0, a1)].push((a0, a1));
        }
    }
    let mut squares = HashMap::new();
    for pairs in &by_sum {
        for (i, &(a0, a1)) in pairs.iter().enumerate() {
            for &(b0, b1) in &pairs[i..] {
                let sq = s
                    .refinement_square(a0, a1, b0, b1)
                    .ok_or([a0, a1, b0, b1])?;
                squares.insert([a0, a1, b0, b1], sq);
            }
        }
    }
    Ok(Refiner {
        semilattice: s.clone(),
        squares,
    })
}

pub fn has_refinement_property(s: &FiniteJoinSemilattice) -> bool {
    check_refinement(s).is_ok()
}

/// A join-preserving map between finite join-semilattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilatticeHom {
    source: FiniteJoinSemilattice,
    target: FiniteJoinSemilattice,
    map: Vec<usize>,
}

/// JSON form `{"map": [int, ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomFile {
    pub map: Vec<usize>,
}

impl SemilatticeHom {
    pub fn new(
        source: FiniteJoinSemilattice,
        target: FiniteJoinSemilattice,
        map: Vec<usize>,
    ) -> Result<Self, SemilatticeError> {
        if map.len() != source.size() || map.iter().any(|&y| y >= target.size()) {
            return Err(SemilatticeError::BadMap {
                got: map.len(),
                expected: source.size(),
            });
        }
        for x in source.elements() {
            for y in source.elements() {
                if map[source.join(x, y)] != target.join(map[x], map[y]) {
                    return Err(SemilatticeError::NotAHom { x, y });
                }
            }
        }
        Ok(SemilatticeHom {
            source,
            target,
            map,
        })
    }

    pub fn identity(s: &FiniteJoinSemilattice) -> Self {
        SemilatticeHom {
            source: s.clone(),
            target: s.clone(),
            map: s.elements().collect(),
        }
    }

    pub fn source(&self) -> &FiniteJoinSemilattice {
        &self.source
    }

    pub fn target(&self) -> &FiniteJoinSemilattice {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &SemilatticeHom) -> Result<SemilatticeHom, SemilatticeError> {
        if self.target != then.source {
            return Err(SemilatticeError::NotComposable);
        }
        Ok(SemilatticeHom {
            source: self.source.clone(),
            target: then.target.clone(),
            map: self.map.iter().map(|&y| then.map[y]).collect(),
        })
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.size()];
        for &y in &self.map {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

/// Every join-preserving map from `source` to `target`.
pub fn enumerate_semilattice_homs(
    source: &FiniteJoinSemilattice,
    target: &FiniteJoinSemilattice,
) -> Vec<Vec<usize>> {
    let n = source.size();
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; n];
    fn extend(
        i: usize,
        s: &FiniteJoinSemilattice,
        t: &FiniteJoinSemilattice,
        map: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == s.size() {
            out.push(map.clone());
            return;
        }
        'candidate: for y in t.elements() {
            map[i] = y;
            // every pair whose join table entry became fully assigned at i
            for a in 0..=i {
                for b in 0..=a {
                    let z = s.join(a, b);
                    if z <= i && (a == i || z == i) && map[z] != t.join(map[a], map[b]) {
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

/// For each decomposition `f(u) = y0 + y1`, a pair `x0 + x1 = u` with
/// `f(x_i) ≤ y_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WdWitness {
    pub u: usize,
    pub table: BTreeMap<(usize, usize), (usize, usize)>,
}

impl WdWitness {
    pub fn lookup(&self, y0: usize, y1: usize) -> Option<(usize, usize)> {
        self.table.get(&(y0, y1)).copied()
    }
}

/// A decomposition `f(u) = y0 + y1` that does not pull back.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WdFailure {
    pub u: usize,
    pub y0: usize,
    pub y1: usize,
}

pub fn weak_distributivity_at(f: &SemilatticeHom, u: usize) -> Result<WdWitness, WdFailure> {
    let (s, t) = (f.source(), f.target());
    let below_u = s.down_set(u);
    let mut table = BTreeMap::new();
    for (y0, y1) in t.decompositions(f.apply(u)) {
        let found = below_u.iter().find_map(|&x0| {
            if !t.leq(f.apply(x0), y0) {
                return None;
            }
            below_u
                .iter()
                .find(|&&x1| s.join(x0, x1) == u && t.leq(f.apply(x1), y1))
                .map(|&x1| (x0, x1))
        });
        match found {
            Some(x) => {
                table.insert((y0, y1), x);
            }
            None => return Err(WdFailure { u, y0, y1 }),
        }
    }
    Ok(WdWitness { u, table })
}

pub fn is_weakly_distributive_at(f: &SemilatticeHom, u: usize) -> bool {
    weak_distributivity_at(f, u).is_ok()
}

pub fn is_weakly_distributive(f: &SemilatticeHom) -> bool {
    f.source().elements().all(|u| is_weakly_distributive_at(f, u))
}

/// The table covers every decomposition of `f(u)` and every entry is valid.
pub fn verify_wd_witness(f: &SemilatticeHom, w: &WdWitness) -> bool {
    let (s, t) = (f.source(), f.target());
    if w.u >= s.size() {
        return false;
    }
    let fu = f.apply(w.u);
    let decompositions = t.decompositions(fu);
    decompositions.len() == w.table.len()
        && decompositions.iter().all(|&(y0, y1)| {
            w.lookup(y0, y1).is_some_and(|(x0, x1)| {
                x0 < s.size()
                    && x1 < s.size()
                    && s.join(x0, x1) == w.u
                    && t.leq(f.apply(x0), y0)
                    && t.leq(f.apply(x1), y1)
            })
        })
}

/// Witness at `u' + u''` built from witnesses at `u'` and `u''`: refine
/// `f(u') + f(u'') = y0 + y1`, pull each row back, and join.
pub fn wd_join_combine(
    f: &SemilatticeHom,
    w1: &WdWitness,
    w2: &WdWitness,
) -> Result<WdWitness, SemilatticeError> {
    let refiner = check_refinement(f.target()).map_err(SemilatticeError::TargetNotDistributive)?;
    wd_join_combine_with(f, &refiner, w1, w2)
}

pub fn wd_join_combine_with(
    f: &SemilatticeHom,
    refiner: &Refiner,
    w1: &WdWitness,
    w2: &WdWitness,
) -> Result<WdWitness, SemilatticeError> {
    let (s, t) = (f.source(), f.target());
    if refiner.semilattice() != t {
        return Err(SemilatticeError::NotComposable);
    }
    for w in [w1, w2] {
        if !verify_wd_witness(f, w) {
            return Err(SemilatticeError::InvalidInputWitness(w.u));
        }
    }
    let u = s.join(w1.u, w2.u);
    let (fu1, fu2) = (f.apply(w1.u), f.apply(w2.u));
    let mut table = BTreeMap::new();
    for (y0, y1) in t.decompositions(f.apply(u)) {
        let sq = refiner
            .square(fu1, fu2, y0, y1)
            .ok_or(SemilatticeError::TargetNotDistributive([fu1, fu2, y0, y1]))?;
        let (x1_0, x1_1) = w1.lookup(sq.c00, sq.c01).expect("validated witness");
        let (x2_0, x2_1) = w2.lookup(sq.c10, sq.c11).expect("validated witness");
        table.insert((y0, y1), (s.join(x1_0, x2_0), s.join(x1_1, x2_1)));
    }
    Ok(WdWitness { u, table })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_refinement(s: &FiniteJoinSemilattice) -> bool {
        let e = s.elements();
        e.clone().all(|a0| {
            e.clone().all(|a1| {
                e.clone().all(|b0| {
                    e.clone().all(|b1| {
                        s.join(a0, a1) != s.join(b0, b1)
                            || (0..s.size().pow(4)).any(|code| {
                                let n = s.size();
                                let c = [code % n, code / n % n, code / n / n % n, code / n / n / n];
                                s.join(c[0], c[1]) == a0
                                    && s.join(c[2], c[3]) == a1
                                    && s.join(c[0], c[2]) == b0
                                    && s.join(c[1], c[3]) == b1
                            })
                    })
                })
            })
        })
    }

    #[test]
    fn chains_refine() {
        for n in 1..6 {
            let s = FiniteJoinSemilattice::from_lattice(&FiniteLattice::chain(n));
            assert!(has_refinement_property(&s));
        }
    }

    #[test]
    fn m3_does_not_refine() {
        let s = FiniteJoinSemilattice::from_lattice(&FiniteLattice::diamond(3));
        assert!(!has_refinement_property(&s));
        assert!(s.refinement_square(1, 2, 1, 3).is_none());
        assert!(!brute_force_refinement(&s));
    }

    #[test]
    fn distributive_lattices_refine_by_meets() {
        for l in [FiniteLattice::boolean(3), FiniteLattice::chain(3).product(&FiniteLattice::chain(3))] {
            let s = FiniteJoinSemilattice::from_lattice(&l);
            let refiner = check_refinement(&s).unwrap();
            for a0 in l.elements() {
                for a1 in l.elements() {
                    for b0 in l.elements() {
                        for b1 in l.elements() {
                            if l.join(a0, a1) != l.join(b0, b1) {
                                continue;
                            }
                            let meet = RefinementSquare {
                                a0,
                                a1,
                                b0,
                                b1,
                                c00: l.meet(a0, b0),
                                c01: l.meet(a0, b1),
                                c10: l.meet(a1, b0),
                                c11: l.meet(a1, b1),
                            };
                            assert!(meet.is_valid(&s));
                            let stored = refiner.square(a0, a1, b0, b1).unwrap();
                            assert!(stored.is_valid(&s));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn table_validation() {
        assert_eq!(
            FiniteJoinSemilattice::from_table(2, vec![0, 0, 1, 1]),
            Err(SemilatticeError::NotASemilattice)
        );
        let file = SemilatticeFile {
            n: 2,
            join: vec![vec![0, 1], vec![1, 1]],
        };
        let s = FiniteJoinSemilattice::from_file(&file).unwrap();
        assert_eq!(s.to_file(), file);
        assert_eq!(s.bottom(), Some(0));
    }

    #[test]
    fn identity_is_weakly_distributive() {
        let s = FiniteJoinSemilattice::from_lattice(&FiniteLattice::pentagon());
        let id = SemilatticeHom::identity(&s);
        for u in s.elements() {
            let w = weak_distributivity_at(&id, u).unwrap();
            assert!(verify_wd_witness(&id, &w));
        }
        assert!(is_weakly_distributive(&id));
    }

    #[test]
    fn constant_bottom_map_is_weakly_distributive() {
        let s = FiniteJoinSemilattice::from_lattice(&FiniteLattice::diamond(3));
        let t = FiniteJoinSemilattice::from_lattice(&FiniteLattice::chain(3));
        let f = SemilatticeHom::new(s.clone(), t, vec![0; s.size()]).unwrap();
        assert!(is_weakly_distributive(&f));
    }

    #[test]
    fn failure_is_reported() {
        // 2-chain onto the 2x2 Boolean lattice's diagonal {0, 3}: 3 = 1 + 2 does not pull back
        let s = FiniteJoinSemilattice::from_lattice(&FiniteLattice::chain(2));
        let t = FiniteJoinSemilattice::from_lattice(&FiniteLattice::boolean(2));
        let f = SemilatticeHom::new(s, t, vec![0, 3]).unwrap();
        let fail = weak_distributivity_at(&f, 1).unwrap_err();
        assert_eq!((fail.y0, fail.y1), (1, 2));
    }

    #[test]
    fn not_a_hom_is_rejected() {
        let s = FiniteJoinSemilattice::from_lattice(&FiniteLattice::boolean(2));
        let t = FiniteJoinSemilattice::from_lattice(&FiniteLattice::chain(2));
        assert!(matches!(
            SemilatticeHom::new(s, t, vec![0, 1, 0, 0]),
            Err(SemilatticeError::NotAHom { .. })
        ));
    }

    #[test]
    fn combine_identity_and_idempotent() {
        let s = FiniteJoinSemilattice::from_lattice(&FiniteLattice::boolean(2));
        let id = SemilatticeHom::identity(&s);
        let w1 = weak_distributivity_at(&id, 1).unwrap();
        let w2 = weak_distributivity_at(&id, 2).unwrap();
        let out = wd_join_combine(&id, &w1, &w2).unwrap();
        assert_eq!(out.u, 3);
        assert!(verify_wd_witness(&id, &out));
        let same = wd_join_combine(&id, &w1, &w1).unwrap();
        assert_eq!(same.u, 1);
        assert!(verify_wd_witness(&id, &same));
    }

    #[test]
    fn combine_rejects_non_distributive_target() {
        let s = FiniteJoinSemilattice::from_lattice(&FiniteLattice::diamond(3));
        let id = SemilatticeHom::identity(&s);
        let w = weak_distributivity_at(&id, 1).unwrap();
        assert!(matches!(
            wd_join_combine(&id, &w, &w),
            Err(SemilatticeError::TargetNotDistributive(_))
        ));
    }

    #[test]
    fn hom_enumeration_agrees_with_constructor() {
        let s = FiniteJoinSemilattice::from_lattice(&FiniteLattice::pentagon());
        let t = FiniteJoinSemilattice::from_lattice(&FiniteLattice::chain(3));
        let homs = enumerate_semilattice_homs(&s, &t);
        let mut count = 0;
        for code in 0..3usize.pow(5) {
            let map: Vec<usize> = (0..5).map(|i| code / 3usize.pow(i) % 3).collect();
            if SemilatticeHom::new(s.clone(), t.clone(), map.clone()).is_ok() {
                count += 1;
                assert!(homs.contains(&map));
            }
        }
        assert_eq!(count, homs.len());
    }
}
