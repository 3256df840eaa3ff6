//! Congruence splitting, the relation `a ⋖_c b`, and property (C).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congruence::{con_lattice, congruence_join, principal_congruence, Congruence};
use crate::lattice::{FiniteLattice, LatticeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplittingError {
    #[error("Θ({0}, {1}) is not contained in α0 ∨ α1")]
    NotJoined(usize, usize),
    #[error("no ⋖-chain through α0 ∪ α1 from {0} to {1}")]
    NoChain(usize, usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `a ≤ b` and congruences with Θ(a, b) ⊆ α0 ∨ α1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitInstance {
    pub a: usize,
    pub b: usize,
    pub alpha0: Congruence,
    pub alpha1: Congruence,
}

impl SplitInstance {
    pub fn new(
        l: &FiniteLattice,
        a: usize,
        b: usize,
        alpha0: Congruence,
        alpha1: Congruence,
    ) -> Result<Self, SplittingError> {
        l.check_index(a)?;
        l.check_index(b)?;
        if !l.leq(a, b) {
            return Err(LatticeError::NotComparable(a, b).into());
        }
        let joined = congruence_join(l, &alpha0, &alpha1)
            .map_err(|_| SplittingError::NotJoined(a, b))?;
        if !joined.related(a, b) {
            return Err(SplittingError::NotJoined(a, b));
        }
        Ok(SplitInstance {
            a,
            b,
            alpha0,
            alpha1,
        })
    }

    /// `x0, x1 ∈ [a, b]`, `x0 ∨ x1 = b`, and Θ(a, x_i) ⊆ α_i.
    pub fn accepts(&self, l: &FiniteLattice, x0: usize, x1: usize) -> bool {
        let in_interval = |x: usize| l.leq(self.a, x) && l.leq(x, self.b);
        in_interval(x0)
            && in_interval(x1)
            && l.join(x0, x1) == self.b
            && self.alpha0.related(self.a, x0)
            && self.alpha1.related(self.a, x1)
    }
}

/// Some `z` with `a ∨ z = b` and `a ∧ z ≤ c`; the bottom is tried first.
pub fn rel_lessdot(l: &FiniteLattice, a: usize, b: usize, c: usize) -> Option<usize> {
    std::iter::once(l.bottom())
        .chain(l.elements().filter(|&z| z != l.bottom()))
        .find(|&z| l.join(a, z) == b && l.leq(l.meet(a, z), c))
}

/// `x_0 ⋖_c x_1 ⋖_c ... ⋖_c x_n`, each step with its witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CChain {
    pub c: usize,
    pub elements: Vec<usize>,
    /// `witnesses[i]` joins `elements[i]` up to `elements[i + 1]`.
    pub witnesses: Vec<usize>,
}

impl CChain {
    pub fn is_valid(&self, l: &FiniteLattice) -> bool {
        !self.elements.is_empty()
            && self.witnesses.len() + 1 == self.elements.len()
            && self
                .elements
                .windows(2)
                .zip(&self.witnesses)
                .all(|(w, &z)| l.join(w[0], z) == w[1] && l.leq(l.meet(w[0], z), self.c))
    }
}

/// Shortest `⋖_c` chain from `a` to `b`, if any.
pub fn c_chain(l: &FiniteLattice, a: usize, b: usize, c: usize) -> Option<CChain> {
    let n = l.size();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            break;
        }
        for y in l.elements() {
            if seen[y] || !l.leq(x, y) {
                continue;
            }
            if let Some(z) = rel_lessdot(l, x, y, c) {
                seen[y] = true;
                parent[y] = Some((x, z));
                queue.push_back(y);
            }
        }
    }
    if !seen[b] {
        return None;
    }
    let mut elements = vec![b];
    let mut witnesses = Vec::new();
    while let Some((x, z)) = parent[*elements.last().unwrap()] {
        elements.push(x);
        witnesses.push(z);
    }
    elements.reverse();
    witnesses.reverse();
    if a == b {
        // a ⋖_c a through the bottom
        elements.push(a);
        witnesses.push(l.bottom());
    }
    Some(CChain {
        c,
        elements,
        witnesses,
    })
}

/// Returns the first `(a, b, c)` with `a ≤ b` not joined by a `⋖_c` chain.
pub fn property_c_failure(l: &FiniteLattice) -> Option<(usize, usize, usize)> {
    for c in l.elements() {
        for a in l.elements() {
            // reachability from a along ⋖_c steps
            let mut seen = vec![false; l.size()];
            seen[a] = true;
            let mut stack = vec![a];
            while let Some(x) = stack.pop() {
                for y in l.elements() {
                    if seen[y] || !l.leq(x, y) {
                        continue;
                    }
                    if rel_lessdot(l, x, y, c).is_some() {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            if let Some(b) = l.elements().find(|&b| l.leq(a, b) && !seen[b]) {
                return Some((a, b, c));
            }
        }
    }
    None
}

pub fn has_property_c(l: &FiniteLattice) -> bool {
    property_c_failure(l).is_none()
}

/// The chain `c_i = a ∨ p_1 ∨ ... ∨ p_i` over the atoms below `b`, each step
/// a `⋖_0` relation. Requires `l` atomistic and `a ≤ b`.
pub fn atomistic_c_chain(l: &FiniteLattice, a: usize, b: usize) -> CChain {
    let mut elements = vec![a];
    let mut witnesses = Vec::new();
    let mut current = a;
    for p in l.atoms().into_iter().filter(|&p| l.leq(p, b)) {
        if l.leq(p, current) {
            continue;
        }
        current = l.join(current, p);
        elements.push(current);
        witnesses.push(p);
    }
    if elements.len() == 1 {
        elements.push(a);
        witnesses.push(l.bottom());
    }
    CChain {
        c: l.bottom(),
        elements,
        witnesses,
    }
}

/// Brute force over pairs of `[a, b]`: `x0` from the top of the interval
/// down, `x1` from `a` up.
pub fn splitting_witness(l: &FiniteLattice, inst: &SplitInstance) -> Option<(usize, usize)> {
    let depths = l.depths();
    let mut inside: Vec<usize> = l
        .elements()
        .filter(|&x| l.leq(inst.a, x) && l.leq(x, inst.b))
        .collect();
    inside.sort_by_key(|&x| (depths[x], x));
    inside.iter().rev().find_map(|&x0| {
        if !inst.alpha0.related(inst.a, x0) {
            return None;
        }
        inside
            .iter()
            .find(|&&x1| inst.accepts(l, x0, x1))
            .map(|&x1| (x0, x1))
    })
}

/// First instance with no splitting witness, over all `a ≤ b` and all pairs
/// of congruences whose join is exactly Θ(a, b).
pub fn congruence_splitting_failure(l: &FiniteLattice) -> Option<SplitInstance> {
    let con = con_lattice(l);
    for a in l.elements() {
        for b in l.elements().filter(|&b| l.leq(a, b)) {
            let theta = con.principal(a, b);
            for i in 0..con.len() {
                for j in 0..con.len() {
                    if con.join(i, j) != theta {
                        continue;
                    }
                    let inst = SplitInstance {
                        a,
                        b,
                        alpha0: con.get(i).clone(),
                        alpha1: con.get(j).clone(),
                    };
                    if splitting_witness(l, &inst).is_none() {
                        return Some(inst);
                    }
                }
            }
        }
    }
    None
}

pub fn is_congruence_splitting(l: &FiniteLattice) -> bool {
    congruence_splitting_failure(l).is_none()
}

/// Splitting built by induction along a shortest chain
/// `a = c_0 ⋖_a c_1 ⋖_a ... ⋖_a c_n = b` whose steps each lie in α0 or α1:
/// a step in α_j with witness `z` replaces `y_j` by `y_j ∨ z`.
pub fn splitting_from_property_c(
    l: &FiniteLattice,
    inst: &SplitInstance,
) -> Result<(usize, usize), SplittingError> {
    let (a, b) = (inst.a, inst.b);
    let n = l.size();
    let inside = |x: usize| l.leq(a, x) && l.leq(x, b);
    // parent[y] = (x, witness, label)
    let mut parent: Vec<Option<(usize, usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            break;
        }
        for y in l.elements() {
            if seen[y] || !(inside(y) && l.lt(x, y)) {
                continue;
            }
            let label = if inst.alpha0.related(x, y) {
                0
            } else if inst.alpha1.related(x, y) {
                1
            } else {
                continue;
            };
            if let Some(z) = rel_lessdot(l, x, y, a) {
                seen[y] = true;
                parent[y] = Some((x, z, label));
                queue.push_back(y);
            }
        }
    }
    if !seen[b] {
        return Err(SplittingError::NoChain(a, b));
    }
    let mut steps = Vec::new();
    let mut y = b;
    while let Some((x, z, label)) = parent[y] {
        steps.push((z, label));
        y = x;
    }
    steps.reverse();
    let mut split = [a, a];
    for (z, label) in steps {
        split[label] = l.join(split[label], z);
    }
    Ok((split[0], split[1]))
}

/// Convenience: Θ(a, b) split against itself and Δ.
pub fn trivial_instance(l: &FiniteLattice, a: usize, b: usize) -> Result<SplitInstance, SplittingError> {
    SplitInstance::new(
        l,
        a,
        b,
        principal_congruence(l, a, b),
        Congruence::identity(l.size()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lessdot_reflexive_via_bottom() {
        let n5 = FiniteLattice::pentagon();
        for a in n5.elements() {
            for c in n5.elements() {
                assert_eq!(rel_lessdot(&n5, a, a, c), Some(n5.bottom()));
            }
        }
    }

    #[test]
    fn lessdot_atom_step() {
        let b3 = FiniteLattice::boolean(3);
        // a = {0}, p = {1}: b = {0,1}
        assert_eq!(rel_lessdot(&b3, 1, 3, 0), Some(2));
    }

    #[test]
    fn lessdot_matches_exhaustive_scan_on_n5() {
        let n5 = FiniteLattice::pentagon();
        // 0 ⋖_0 b through z = b itself
        assert!(rel_lessdot(&n5, 0, 2, 0).is_some());
        // a ⋖_0 b fails: a ∨ z = b forces z ∈ {a, b}, and then a ∧ z = a
        assert_eq!(rel_lessdot(&n5, 1, 2, 0), None);
        for a in n5.elements() {
            for b in n5.elements() {
                for c in n5.elements() {
                    let scan = n5
                        .elements()
                        .any(|z| n5.join(a, z) == b && n5.leq(n5.meet(a, z), c));
                    assert_eq!(rel_lessdot(&n5, a, b, c).is_some(), scan);
                }
            }
        }
    }

    #[test]
    fn property_c_examples() {
        assert!(has_property_c(&FiniteLattice::diamond(3)));
        assert!(has_property_c(&FiniteLattice::boolean(3)));
        // 1 ⋖_0 2 has no witness in the 3-chain
        assert_eq!(property_c_failure(&FiniteLattice::chain(3)), Some((1, 2, 0)));
        assert!(has_property_c(&FiniteLattice::chain(2)));
    }

    #[test]
    fn c_chain_is_valid() {
        let m3 = FiniteLattice::diamond(3);
        let chain = c_chain(&m3, 1, 4, 0).unwrap();
        assert!(chain.is_valid(&m3));
        assert_eq!(chain.elements, vec![1, 4]);
        let refl = c_chain(&m3, 2, 2, 0).unwrap();
        assert!(refl.is_valid(&m3));
        assert!(c_chain(&FiniteLattice::chain(3), 1, 2, 0).is_none());
    }

    #[test]
    fn atomistic_chain_is_valid() {
        let b3 = FiniteLattice::boolean(3);
        for a in b3.elements() {
            for b in b3.elements().filter(|&b| b3.leq(a, b)) {
                let chain = atomistic_c_chain(&b3, a, b);
                assert!(chain.is_valid(&b3));
                assert_eq!(*chain.elements.last().unwrap(), b);
            }
        }
    }

    #[test]
    fn splitting_witness_examples() {
        let n5 = FiniteLattice::pentagon();
        let inst = trivial_instance(&n5, 0, 4).unwrap();
        assert_eq!(splitting_witness(&n5, &inst), Some((4, 0)));

        let inst = SplitInstance::new(
            &n5,
            0,
            4,
            principal_congruence(&n5, 0, 1),
            principal_congruence(&n5, 2, 4),
        )
        .unwrap();
        // (b, c) in the usual N5 names
        assert_eq!(splitting_witness(&n5, &inst), Some((2, 3)));

        let m3 = FiniteLattice::diamond(3);
        let nabla = Congruence::total(5);
        let inst = SplitInstance::new(&m3, 0, 4, nabla.clone(), nabla).unwrap();
        let (x0, x1) = splitting_witness(&m3, &inst).unwrap();
        assert!(inst.accepts(&m3, x0, x1));
    }

    #[test]
    fn instance_requires_join() {
        let n5 = FiniteLattice::pentagon();
        let delta = Congruence::identity(5);
        assert_eq!(
            SplitInstance::new(&n5, 0, 4, delta.clone(), delta),
            Err(SplittingError::NotJoined(0, 4))
        );
    }

    #[test]
    fn splitting_examples() {
        assert!(is_congruence_splitting(&FiniteLattice::diamond(3)));
        assert!(is_congruence_splitting(&FiniteLattice::chain(1)));
        assert!(is_congruence_splitting(&FiniteLattice::boolean(2)));
        assert!(!is_congruence_splitting(&FiniteLattice::chain(3)));
    }

    #[test]
    fn constructive_splitting_base_cases() {
        let b2 = FiniteLattice::boolean(2);
        let inst = trivial_instance(&b2, 1, 1).unwrap();
        assert_eq!(splitting_from_property_c(&b2, &inst), Ok((1, 1)));
        let inst = trivial_instance(&b2, 0, 1).unwrap();
        assert_eq!(splitting_from_property_c(&b2, &inst), Ok((1, 0)));
    }

    #[test]
    fn constructive_splitting_on_m3() {
        let m3 = FiniteLattice::diamond(3);
        let con = con_lattice(&m3);
        for a in m3.elements() {
            for b in m3.elements().filter(|&b| m3.leq(a, b)) {
                for i in 0..con.len() {
                    for j in 0..con.len() {
                        if con.join(i, j) != con.principal(a, b) {
                            continue;
                        }
                        let inst = SplitInstance::new(&m3, a, b, con.get(i).clone(), con.get(j).clone())
                            .unwrap();
                        let (x0, x1) = splitting_from_property_c(&m3, &inst).unwrap();
                        assert!(inst.accepts(&m3, x0, x1));
                    }
                }
            }
        }
    }
}
