//! Congruences of finite lattices.
//!
//! A congruence is stored as a class-representative array: `class[x]` is the
//! least element index in the block of `x`. For a finite lattice every
//! congruence is compact, so the congruence lattice and the semilattice of
//! compact congruences coincide.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{FiniteLattice, LatticeError, LatticeHom};
use crate::semilattice::{FiniteJoinSemilattice, SemilatticeHom};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error("congruences belong to lattices of different sizes ({0} vs {1})")]
    HostMismatch(usize, usize),
    #[error("partition is not compatible with join and meet")]
    NotCompatible,
    #[error("blocks do not partition the elements")]
    NotAPartition,
    #[error("Θ({0}, {1}) is not contained in the join of the two congruences")]
    NotJoined(usize, usize),
    #[error("map is not a lattice homomorphism")]
    NotAHom,
    #[error("homomorphism does not have convex range")]
    NotConvex,
    #[error("induced map is not join-preserving")]
    InducedMapNotJoinPreserving,
    #[error("subset is not an ideal")]
    NotAnIdeal,
    #[error("lattice is not sectionally complemented and modular")]
    HypothesesFail,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A small union-find with path halving; roots are kept as the least index.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    class: Vec<usize>,
}

impl Congruence {
    /// The identity congruence Δ.
    pub fn identity(n: usize) -> Self {
        Congruence {
            class: (0..n).collect(),
        }
    }

    /// The total congruence ∇.
    pub fn total(n: usize) -> Self {
        Congruence { class: vec![0; n] }
    }

    /// Validates a block list against `l`.
    pub fn from_blocks(l: &FiniteLattice, blocks: &[Vec<usize>]) -> Result<Self, CongruenceError> {
        let n = l.size();
        let mut class = vec![usize::MAX; n];
        for block in blocks {
            let rep = *block.iter().min().ok_or(CongruenceError::NotAPartition)?;
            for &x in block {
                if x >= n || class[x] != usize::MAX {
                    return Err(CongruenceError::NotAPartition);
                }
                class[x] = rep;
            }
        }
        if class.contains(&usize::MAX) {
            return Err(CongruenceError::NotAPartition);
        }
        let theta = Congruence { class };
        if !theta.is_compatible(l) {
            return Err(CongruenceError::NotCompatible);
        }
        Ok(theta)
    }

    fn from_union_find(mut uf: UnionFind) -> Self {
        let n = uf.parent.len();
        Congruence {
            class: (0..n).map(|x| uf.find(x)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.class.len()
    }

    #[inline]
    pub fn related(&self, x: usize, y: usize) -> bool {
        self.class[x] == self.class[y]
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class[x]
    }

    pub fn num_blocks(&self) -> usize {
        self.class
            .iter()
            .enumerate()
            .filter(|&(x, &c)| x == c)
            .count()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.class.len()];
        for (x, &c) in self.class.iter().enumerate() {
            if slot[c] == usize::MAX {
                slot[c] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[slot[c]].push(x);
        }
        blocks
    }

    /// `self ⊆ other` as relations.
    pub fn is_contained_in(&self, other: &Congruence) -> bool {
        self.class.len() == other.class.len()
            && (0..self.class.len()).all(|x| other.related(x, self.class[x]))
    }

    pub fn is_identity(&self) -> bool {
        self.class.iter().enumerate().all(|(x, &c)| x == c)
    }

    pub fn is_total(&self) -> bool {
        self.class.iter().all(|&c| c == 0)
    }

    pub fn is_compatible(&self, l: &FiniteLattice) -> bool {
        l.elements().all(|x| {
            let y = self.class[x];
            l.elements().all(|z| {
                self.related(l.join(x, z), l.join(y, z)) && self.related(l.meet(x, z), l.meet(y, z))
            })
        })
    }

    pub fn to_blocks_file(&self) -> Vec<Vec<usize>> {
        self.blocks()
    }
}

/// Least congruence containing every pair in `pairs`.
///
/// Every merge performed by the union-find is recorded as a pair and each
/// recorded pair is translated by `x ↦ x ∨ z` and `x ↦ x ∧ z` for all `z`.
/// The recorded pairs generate the final equivalence, so closing them under
/// translations makes it compatible.
pub fn generated_congruence(
    l: &FiniteLattice,
    pairs: impl IntoIterator<Item = (usize, usize)>,
) -> Congruence {
    let mut uf = UnionFind::new(l.size());
    let mut pending = VecDeque::new();
    for (x, y) in pairs {
        if uf.union(x, y) {
            pending.push_back((x, y));
        }
    }
    while let Some((x, y)) = pending.pop_front() {
        for z in l.elements() {
            for (p, q) in [(l.join(x, z), l.join(y, z)), (l.meet(x, z), l.meet(y, z))] {
                if uf.union(p, q) {
                    pending.push_back((p, q));
                }
            }
        }
    }
    Congruence::from_union_find(uf)
}

/// Θ(u, v): the least congruence identifying `u` and `v`.
pub fn principal_congruence(l: &FiniteLattice, u: usize, v: usize) -> Congruence {
    generated_congruence(l, [(u, v)])
}

fn check_host(a: &Congruence, b: &Congruence) -> Result<(), CongruenceError> {
    if a.size() != b.size() {
        return Err(CongruenceError::HostMismatch(a.size(), b.size()));
    }
    Ok(())
}

pub fn congruence_join(
    l: &FiniteLattice,
    a: &Congruence,
    b: &Congruence,
) -> Result<Congruence, CongruenceError> {
    check_host(a, b)?;
    if a.size() != l.size() {
        return Err(CongruenceError::HostMismatch(a.size(), l.size()));
    }
    let pairs = (0..a.size()).flat_map(|x| [(x, a.class[x]), (x, b.class[x])]);
    Ok(generated_congruence(l, pairs))
}

pub fn congruence_meet(a: &Congruence, b: &Congruence) -> Result<Congruence, CongruenceError> {
    check_host(a, b)?;
    let mut uf = UnionFind::new(a.size());
    let mut first_seen: HashMap<(usize, usize), usize> = HashMap::new();
    for x in 0..a.size() {
        let key = (a.class[x], b.class[x]);
        let rep = *first_seen.entry(key).or_insert(x);
        uf.union(rep, x);
    }
    Ok(Congruence::from_union_find(uf))
}

/// All congruences of a lattice, ordered by containment, together with a
/// lattice view and a table of principal congruences.
#[derive(Clone, Debug)]
pub struct CongruenceLattice {
    congruences: Vec<Congruence>,
    index: HashMap<Congruence, usize>,
    lattice: FiniteLattice,
    principal: Vec<usize>,
    host_size: usize,
}

impl CongruenceLattice {
    pub fn len(&self) -> usize {
        self.congruences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.congruences.is_empty()
    }

    pub fn get(&self, i: usize) -> &Congruence {
        &self.congruences[i]
    }

    pub fn congruences(&self) -> &[Congruence] {
        &self.congruences
    }

    pub fn index_of(&self, theta: &Congruence) -> Option<usize> {
        self.index.get(theta).copied()
    }

    pub fn as_lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn as_semilattice(&self) -> FiniteJoinSemilattice {
        FiniteJoinSemilattice::from_lattice(&self.lattice)
    }

    /// Index of Θ(u, v).
    pub fn principal(&self, u: usize, v: usize) -> usize {
        self.principal[u * self.host_size + v]
    }

    /// Index of Δ.
    pub fn delta(&self) -> usize {
        self.lattice.bottom()
    }

    /// Index of ∇.
    pub fn nabla(&self) -> usize {
        self.lattice.top()
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.lattice.join(i, j)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.lattice.leq(i, j)
    }
}

/// Con L, computed as the closure of the principal congruences under joins.
pub fn con_lattice(l: &FiniteLattice) -> CongruenceLattice {
    let n = l.size();
    let mut principal_cong = vec![None; n * n];
    let mut found: Vec<Congruence> = vec![Congruence::identity(n)];
    let mut index: HashMap<Congruence, usize> = HashMap::new();
    index.insert(Congruence::identity(n), 0);
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let theta = if v < u {
                principal_cong[v * n + u].clone().unwrap()
            } else {
                principal_congruence(l, u, v)
            };
            principal_cong[u * n + v] = Some(theta.clone());
            if !index.contains_key(&theta) {
                index.insert(theta.clone(), found.len());
                found.push(theta);
            }
        }
    }
    let mut i = 0;
    while i < found.len() {
        for j in 0..i {
            let joined = congruence_join(l, &found[i], &found[j]).unwrap();
            if !index.contains_key(&joined) {
                index.insert(joined.clone(), found.len());
                found.push(joined);
            }
        }
        i += 1;
    }
    found.sort_by(|a, b| (n - a.num_blocks(), &a.class).cmp(&(n - b.num_blocks(), &b.class)));
    let index: HashMap<Congruence, usize> = found
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    let m = found.len();
    let mut leq = vec![false; m * m];
    for i in 0..m {
        for j in 0..m {
            leq[i * m + j] = found[i].is_contained_in(&found[j]);
        }
    }
    let lattice = FiniteLattice::from_leq(m, leq).expect("congruences form a lattice");
    let principal = (0..n * n)
        .map(|k| {
            let (u, v) = (k / n, k % n);
            if u == v {
                index[&Congruence::identity(n)]
            } else {
                index[principal_cong[k].as_ref().unwrap()]
            }
        })
        .collect();
    CongruenceLattice {
        congruences: found,
        index,
        lattice,
        principal,
        host_size: n,
    }
}

/// A monotone chain whose steps are tagged with labels (indices into a list of
/// congruences supplied at validation time).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub elements: Vec<usize>,
    /// `labels[i]` tags the step `elements[i] → elements[i + 1]`.
    pub labels: Vec<usize>,
}

impl Chain {
    pub fn is_monotone(&self, l: &FiniteLattice) -> bool {
        self.elements.windows(2).all(|w| l.leq(w[0], w[1]))
    }

    /// Steps lie in their labelled congruences.
    pub fn steps_respect_labels(&self, congruences: &[&Congruence]) -> bool {
        self.labels.len() + 1 == self.elements.len().max(1)
            && self.elements.windows(2).zip(&self.labels).all(|(w, &label)| {
                congruences
                    .get(label)
                    .is_some_and(|theta| theta.related(w[0], w[1]))
            })
    }

    /// Monotone, from `u` to `v`, and every step inside its label.
    pub fn validate(&self, l: &FiniteLattice, u: usize, v: usize, congruences: &[&Congruence]) -> bool {
        self.elements.first() == Some(&u)
            && self.elements.last() == Some(&v)
            && self.is_monotone(l)
            && self.steps_respect_labels(congruences)
    }
}

/// A chain `u = w_0 ≤ ... ≤ w_2n = v` with steps alternately in `alpha` and
/// `beta` (label 0 and label 1). Trivial steps are allowed.
///
/// Searches unrestricted sequences by BFS first, then monotonizes.
pub fn alternating_chain(
    l: &FiniteLattice,
    u: usize,
    v: usize,
    alpha: &Congruence,
    beta: &Congruence,
) -> Result<Chain, CongruenceError> {
    l.check_index(u)?;
    l.check_index(v)?;
    if !l.leq(u, v) {
        return Err(LatticeError::NotComparable(u, v).into());
    }
    if u == v {
        return Ok(Chain {
            elements: vec![u],
            labels: vec![],
        });
    }
    let n = l.size();
    let labels = [alpha, beta];
    // state = element * 2 + phase, phase = label of the next step
    let mut parent = vec![usize::MAX; 2 * n];
    let start = u * 2;
    let goal = v * 2;
    parent[start] = start;
    let mut queue = VecDeque::from([start]);
    let mut reached = false;
    'bfs: while let Some(state) = queue.pop_front() {
        let (x, phase) = (state / 2, state % 2);
        let theta = labels[phase];
        let next_phase = 1 - phase;
        let candidates = std::iter::once(v).chain(l.elements().filter(|&y| y != v));
        for y in candidates {
            if !theta.related(x, y) {
                continue;
            }
            let next = y * 2 + next_phase;
            if parent[next] == usize::MAX {
                parent[next] = state;
                if next == goal {
                    reached = true;
                    break 'bfs;
                }
                queue.push_back(next);
            }
        }
    }
    if !reached {
        return Err(CongruenceError::NotJoined(u, v));
    }
    let mut states = vec![goal];
    while *states.last().unwrap() != start {
        states.push(parent[*states.last().unwrap()]);
    }
    states.reverse();
    let raw = Chain {
        elements: states.iter().map(|s| s / 2).collect(),
        labels: states[..states.len() - 1].iter().map(|s| s % 2).collect(),
    };
    Ok(monotonize_chain(l, &raw, u, v))
}

/// Replaces `w_i` by `⋁_{j ≤ i} ((w_j ∨ u) ∧ v)` after forcing `w_0 = u` and
/// the last element to `v`. Compatibility keeps each step inside its label.
pub fn monotonize_chain(l: &FiniteLattice, raw: &Chain, u: usize, v: usize) -> Chain {
    let mut elements = raw.elements.clone();
    if elements.is_empty() {
        elements.push(u);
    }
    elements[0] = u;
    *elements.last_mut().unwrap() = v;
    let mut acc = l.bottom();
    let elements = elements
        .into_iter()
        .map(|w| {
            acc = l.join(acc, l.meet(l.join(w, u), v));
            acc
        })
        .collect();
    Chain {
        elements,
        labels: raw.labels.clone(),
    }
}

/// The semilattice map Con K → Con L induced by a lattice homomorphism.
#[derive(Clone, Debug)]
pub struct InducedConMap {
    pub source: CongruenceLattice,
    pub target: CongruenceLattice,
    pub hom: SemilatticeHom,
}

impl InducedConMap {
    pub fn apply(&self, i: usize) -> usize {
        self.hom.apply(i)
    }
}

/// Sends Θ_K(u, v) to Θ_L(h u, h v) and extends by joins: θ goes to the join of
/// Θ_L(h x, h y) over all θ-related pairs.
pub fn induced_con_map(h: &LatticeHom<'_>) -> Result<InducedConMap, CongruenceError> {
    if !h.is_hom() {
        return Err(CongruenceError::NotAHom);
    }
    let source = con_lattice(h.source);
    let target = con_lattice(h.target);
    let map = source
        .congruences()
        .iter()
        .map(|theta| {
            let pairs = h
                .source
                .elements()
                .map(|x| (h.apply(x), h.apply(theta.class_of(x))));
            let image = generated_congruence(h.target, pairs);
            target.index_of(&image).expect("image is a congruence")
        })
        .collect();
    let hom = SemilatticeHom::new(source.as_semilattice(), target.as_semilattice(), map)
        .map_err(|_| CongruenceError::InducedMapNotJoinPreserving)?;
    Ok(InducedConMap {
        source,
        target,
        hom,
    })
}

/// Pullback of a target congruence along a homomorphism.
pub fn pullback(h: &LatticeHom<'_>, theta: &Congruence) -> Congruence {
    let n = h.source.size();
    let mut uf = UnionFind::new(n);
    let mut first: HashMap<usize, usize> = HashMap::new();
    for x in 0..n {
        let rep = *first.entry(theta.class_of(h.apply(x))).or_insert(x);
        uf.union(rep, x);
    }
    Congruence::from_union_find(uf)
}

/// The weak-distributivity split produced for a convex-range homomorphism at
/// Θ_K(u, v) against `f(Θ_K(u, v)) = β_0 ∨ β_1`.
#[derive(Clone, Debug)]
pub struct ConvexSplit {
    /// Alternating chain from `h u` to `h v` in the target.
    pub target_chain: Chain,
    /// Preimages of the target chain, monotonized in `[u, v]`.
    pub source_chain: Chain,
    /// Join of the Θ_K steps labelled 0.
    pub alpha0: Congruence,
    /// Join of the Θ_K steps labelled 1.
    pub alpha1: Congruence,
}

/// Constructive weak distributivity at a principal congruence: chain in the
/// target, pull back along the convex range, monotonize, and collect steps.
pub fn convex_hom_split(
    h: &LatticeHom<'_>,
    u: usize,
    v: usize,
    beta0: &Congruence,
    beta1: &Congruence,
) -> Result<ConvexSplit, CongruenceError> {
    if !h.is_hom() {
        return Err(CongruenceError::NotAHom);
    }
    if !h.has_convex_range() {
        return Err(CongruenceError::NotConvex);
    }
    let (k, t) = (h.source, h.target);
    let target_chain = alternating_chain(t, h.apply(u), h.apply(v), beta0, beta1)?;
    let last = target_chain.elements.len() - 1;
    let lifted: Vec<usize> = target_chain
        .elements
        .iter()
        .enumerate()
        .map(|(i, &w)| match i {
            0 => u,
            i if i == last => v,
            _ => k
                .elements()
                .find(|&x| h.apply(x) == w)
                .expect("convex range contains the chain"),
        })
        .collect();
    // h u = h v: the single step u → v lies in every pullback
    let raw = if last == 0 {
        Chain {
            elements: vec![u, v],
            labels: vec![0],
        }
    } else {
        Chain {
            elements: lifted,
            labels: target_chain.labels.clone(),
        }
    };
    let source_chain = monotonize_chain(k, &raw, u, v);
    let mut steps = [Vec::new(), Vec::new()];
    for (w, &label) in source_chain.elements.windows(2).zip(&source_chain.labels) {
        steps[label].push((w[0], w[1]));
    }
    let [s0, s1] = steps;
    Ok(ConvexSplit {
        target_chain,
        source_chain,
        alpha0: generated_congruence(k, s0),
        alpha1: generated_congruence(k, s1),
    })
}

/// An ideal of `l` as a membership vector; `None` unless down-closed,
/// join-closed and non-empty.
fn ideal_membership(l: &FiniteLattice, ideal: &[usize]) -> Option<Vec<bool>> {
    let mut member = vec![false; l.size()];
    for &x in ideal {
        if x >= l.size() {
            return None;
        }
        member[x] = true;
    }
    if ideal.is_empty() {
        return None;
    }
    let down_closed = l
        .elements()
        .filter(|&x| member[x])
        .all(|x| l.elements().all(|y| !l.leq(y, x) || member[y]));
    let join_closed = l.elements().filter(|&x| member[x]).all(|x| {
        l.elements()
            .filter(|&y| member[y])
            .all(|y| member[l.join(x, y)])
    });
    (down_closed && join_closed).then_some(member)
}

/// Neutral means closed under perspectivity.
pub fn is_neutral_ideal(l: &FiniteLattice, ideal: &[usize]) -> Result<bool, CongruenceError> {
    let member = ideal_membership(l, ideal).ok_or(CongruenceError::NotAnIdeal)?;
    Ok(l.elements().filter(|&x| member[x]).all(|x| {
        l.elements()
            .all(|y| member[y] || !l.are_perspective(x, y))
    }))
}

/// Every neutral ideal, each as a sorted element list, in order of generator index.
pub fn neutral_ideals(l: &FiniteLattice) -> Vec<Vec<usize>> {
    l.elements()
        .map(|m| l.down_set(m))
        .filter(|ideal| is_neutral_ideal(l, ideal).unwrap())
        .collect()
}

/// The bijection θ ↦ {x : x ≡ 0 (mod θ)} between Con L and NId L.
#[derive(Clone, Debug)]
pub struct ConNidIso {
    pub congruences: CongruenceLattice,
    pub ideals: Vec<Vec<usize>>,
    /// `forward[i]` is the ideal index of congruence `i`.
    pub forward: Vec<usize>,
    /// `backward[j]` is the congruence index of ideal `j`.
    pub backward: Vec<usize>,
}

pub fn con_nid_iso(l: &FiniteLattice) -> Result<ConNidIso, CongruenceError> {
    if !(l.is_sectionally_complemented() && l.is_modular()) {
        return Err(CongruenceError::HypothesesFail);
    }
    let congruences = con_lattice(l);
    let ideals = neutral_ideals(l);
    let zero = l.bottom();
    let forward: Vec<usize> = congruences
        .congruences()
        .iter()
        .map(|theta| {
            let kernel: Vec<usize> = l.elements().filter(|&x| theta.related(x, zero)).collect();
            ideals.iter().position(|i| *i == kernel)
        })
        .collect::<Option<_>>()
        .ok_or(CongruenceError::HypothesesFail)?;
    let backward: Vec<usize> = ideals
        .iter()
        .map(|ideal| {
            let theta = generated_congruence(l, ideal.iter().map(|&x| (x, zero)));
            congruences.index_of(&theta).unwrap()
        })
        .collect();
    let iso = ConNidIso {
        congruences,
        ideals,
        forward,
        backward,
    };
    if !iso.is_order_isomorphism() {
        return Err(CongruenceError::HypothesesFail);
    }
    Ok(iso)
}

impl ConNidIso {
    /// Both composites are identities and both maps preserve order.
    pub fn is_order_isomorphism(&self) -> bool {
        let m = self.congruences.len();
        if m != self.ideals.len() {
            return false;
        }
        let round_trips = (0..m).all(|i| self.backward[self.forward[i]] == i)
            && (0..m).all(|j| self.forward[self.backward[j]] == j);
        let subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.contains(x));
        let monotone = (0..m).all(|i| {
            (0..m).all(|j| {
                self.congruences.leq(i, j)
                    == subset(&self.ideals[self.forward[i]], &self.ideals[self.forward[j]])
            })
        });
        round_trips && monotone
    }
}
