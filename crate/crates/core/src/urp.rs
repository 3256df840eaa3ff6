//! The uniform refinement property: witnesses, their validation, search, and
//! the constructions that combine or transport witnesses.
//!
//! Every constructor in this module is checked against [`verify_urp_witness`]
//! by the tests; none of them is trusted on its own.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congruence::CongruenceLattice;
use crate::lattice::FiniteLattice;
use crate::semilattice::{
    weak_distributivity_at, FiniteJoinSemilattice, Refiner, RefinementSquare, SemilatticeHom,
    WdFailure,
};
use crate::splitting::{splitting_witness, SplitInstance};

/// Branch nodes a single search may visit before giving up.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UrpError {
    #[error("a_{0} + b_{0} differs from e")]
    NotAnInstance(usize),
    #[error("search exceeded its budget of {budget} nodes")]
    SearchBudgetExceeded { budget: u64 },
    #[error("no refinement square for {0:?}")]
    NotDistributive([usize; 4]),
    #[error("input witness rejected: {0}")]
    InvalidInputWitness(UrpViolation),
    #[error("instance does not decompose at index {0}")]
    BadDecomposition(usize),
    #[error("map is not weakly distributive at u = {}", .0.u)]
    NotWeaklyDistributive(WdFailure),
    #[error("no witness at the source element")]
    NoSourceWitness,
    #[error("no splitting witness for family index {index}")]
    NotSplitting { index: usize },
    #[error("refinement square does not satisfy its defining equations")]
    PreconditionFail,
}

/// Families `a_i + b_i = e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrpInstance {
    pub e: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl UrpInstance {
    pub fn new(
        s: &FiniteJoinSemilattice,
        e: usize,
        a: Vec<usize>,
        b: Vec<usize>,
    ) -> Result<Self, UrpError> {
        if a.len() != b.len() {
            return Err(UrpError::NotAnInstance(a.len().min(b.len())));
        }
        if let Some(i) = (0..a.len()).find(|&i| {
            a[i] >= s.size() || b[i] >= s.size() || s.join(a[i], b[i]) != e
        }) {
            return Err(UrpError::NotAnInstance(i));
        }
        Ok(UrpInstance { e, a, b })
    }

    pub fn from_pairs(
        s: &FiniteJoinSemilattice,
        e: usize,
        pairs: &[(usize, usize)],
    ) -> Result<Self, UrpError> {
        Self::new(
            s,
            e,
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrpWitness {
    pub a_star: Vec<usize>,
    pub b_star: Vec<usize>,
    /// Row-major `c[i][j]`.
    pub c: Vec<Vec<usize>>,
}

/// The first clause of the definition that a witness breaks.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum UrpViolation {
    #[error("index sets differ")]
    IndexMismatch,
    #[error("element {0} out of range")]
    OutOfRange(usize),
    #[error("(i) a*_{0} is not below a_{0}")]
    AStarNotBelow(usize),
    #[error("(i) b*_{0} is not below b_{0}")]
    BStarNotBelow(usize),
    #[error("(i) a*_{0} + b*_{0} differs from e")]
    NotJoiningToE(usize),
    #[error("(ii) c_{0}{1} is not below a*_{0}")]
    CNotBelowA(usize, usize),
    #[error("(ii) c_{0}{1} is not below b*_{1}")]
    CNotBelowB(usize, usize),
    #[error("(ii) a*_{0} is not below a*_{1} + c_{0}{1}")]
    NotRefined(usize, usize),
    #[error("(iii) c_{0}{2} is not below c_{0}{1} + c_{1}{2}")]
    Incoherent(usize, usize, usize),
}

impl UrpViolation {
    pub fn clause(&self) -> &'static str {
        match self {
            UrpViolation::IndexMismatch | UrpViolation::OutOfRange(_) => "shape",
            UrpViolation::AStarNotBelow(_)
            | UrpViolation::BStarNotBelow(_)
            | UrpViolation::NotJoiningToE(_) => "i",
            UrpViolation::CNotBelowA(..)
            | UrpViolation::CNotBelowB(..)
            | UrpViolation::NotRefined(..) => "ii",
            UrpViolation::Incoherent(..) => "iii",
        }
    }
}

pub fn verify_urp_witness(
    s: &FiniteJoinSemilattice,
    inst: &UrpInstance,
    w: &UrpWitness,
) -> Result<(), UrpViolation> {
    let m = inst.len();
    if inst.b.len() != m
        || w.a_star.len() != m
        || w.b_star.len() != m
        || w.c.len() != m
        || w.c.iter().any(|row| row.len() != m)
    {
        return Err(UrpViolation::IndexMismatch);
    }
    let all = inst
        .a
        .iter()
        .chain(&inst.b)
        .chain(&w.a_star)
        .chain(&w.b_star)
        .chain(w.c.iter().flatten());
    if let Some(&x) = all.chain(std::iter::once(&inst.e)).find(|&&x| x >= s.size()) {
        return Err(UrpViolation::OutOfRange(x));
    }
    let (a, b) = (&w.a_star, &w.b_star);
    for i in 0..m {
        if !s.leq(a[i], inst.a[i]) {
            return Err(UrpViolation::AStarNotBelow(i));
        }
        if !s.leq(b[i], inst.b[i]) {
            return Err(UrpViolation::BStarNotBelow(i));
        }
        if s.join(a[i], b[i]) != inst.e {
            return Err(UrpViolation::NotJoiningToE(i));
        }
    }
    for i in 0..m {
        for j in 0..m {
            let c = w.c[i][j];
            if !s.leq(c, a[i]) {
                return Err(UrpViolation::CNotBelowA(i, j));
            }
            if !s.leq(c, b[j]) {
                return Err(UrpViolation::CNotBelowB(i, j));
            }
            if !s.leq(a[i], s.join(a[j], c)) {
                return Err(UrpViolation::NotRefined(i, j));
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if !s.leq(w.c[i][k], s.join(w.c[i][j], w.c[j][k])) {
                    return Err(UrpViolation::Incoherent(i, j, k));
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
enum Var {
    Pair(usize),
    Cell(usize, usize),
}

struct Frame {
    var: Var,
    candidates: Vec<usize>,
    next: usize,
}

struct Search<'a> {
    s: &'a FiniteJoinSemilattice,
    m: usize,
    /// Candidate pairs per index, largest first.
    pair_options: Vec<Vec<(usize, usize)>>,
    pair: Vec<Option<(usize, usize)>>,
    cell: Vec<Option<usize>>,
    /// Elements sorted by rank, largest first.
    by_rank_desc: Vec<usize>,
}

impl Search<'_> {
    fn c(&self, i: usize, j: usize) -> Option<usize> {
        self.cell[i * self.m + j]
    }

    /// Admissible `c_ij` under (ii), largest first.
    fn cell_domain(&self, ai: usize, aj: usize, bj: usize) -> impl Iterator<Item = usize> + '_ {
        let s = self.s;
        self.by_rank_desc
            .iter()
            .copied()
            .filter(move |&c| s.leq(c, ai) && s.leq(c, bj) && s.leq(ai, s.join(aj, c)))
    }

    fn pair_fits(&self, i: usize, p: (usize, usize)) -> bool {
        if self.cell_domain(p.0, p.0, p.1).next().is_none() {
            return false;
        }
        (0..self.m).filter(|&j| j != i).all(|j| match self.pair[j] {
            None => true,
            Some(q) => {
                self.cell_domain(p.0, q.0, q.1).next().is_some()
                    && self.cell_domain(q.0, p.0, p.1).next().is_some()
            }
        })
    }

    /// (iii) for every triple that involves the (already placed) cell `(p, q)`.
    fn coherent_at(&self, p: usize, q: usize) -> bool {
        let s = self.s;
        let v = self.c(p, q).unwrap();
        (0..self.m).all(|r| {
            let left = match (self.c(p, r), self.c(r, q)) {
                (Some(x), Some(y)) => s.leq(v, s.join(x, y)),
                _ => true,
            };
            let first = match (self.c(p, r), self.c(q, r)) {
                (Some(x), Some(y)) => s.leq(x, s.join(v, y)),
                _ => true,
            };
            let second = match (self.c(r, q), self.c(r, p)) {
                (Some(x), Some(y)) => s.leq(x, s.join(y, v)),
                _ => true,
            };
            left && first && second
        })
    }

    fn candidates(&self, var: Var) -> Vec<usize> {
        match var {
            Var::Pair(i) => (0..self.pair_options[i].len())
                .filter(|&k| self.pair_fits(i, self.pair_options[i][k]))
                .collect(),
            Var::Cell(i, j) => {
                let (ai, _) = self.pair[i].unwrap();
                let (aj, bj) = self.pair[j].unwrap();
                let domain: Vec<usize> = self.cell_domain(ai, aj, bj).collect();
                if i != j {
                    return domain;
                }
                // c_ii only ever needs to be small: keep the minimal elements
                let mut minimal: Vec<usize> = domain
                    .iter()
                    .copied()
                    .filter(|&c| domain.iter().all(|&d| d == c || !self.s.leq(d, c)))
                    .collect();
                minimal.reverse();
                minimal
            }
        }
    }

    fn assign(&mut self, var: Var, value: usize) -> bool {
        match var {
            Var::Pair(i) => {
                self.pair[i] = Some(self.pair_options[i][value]);
                true
            }
            Var::Cell(i, j) => {
                self.cell[i * self.m + j] = Some(value);
                self.coherent_at(i, j)
            }
        }
    }

    fn unassign(&mut self, var: Var) {
        match var {
            Var::Pair(i) => self.pair[i] = None,
            Var::Cell(i, j) => self.cell[i * self.m + j] = None,
        }
    }

    fn witness(&self) -> UrpWitness {
        let m = self.m;
        UrpWitness {
            a_star: self.pair.iter().map(|p| p.unwrap().0).collect(),
            b_star: self.pair.iter().map(|p| p.unwrap().1).collect(),
            c: (0..m)
                .map(|i| (0..m).map(|j| self.c(i, j).unwrap()).collect())
                .collect(),
        }
    }
}

/// Backtracking search for a witness. Pairs `(a*_i, b*_i)` are fixed first
/// (fewest options first, each checked against the pairs already fixed), then
/// the cells of `c` row/column by row/column with (iii) checked as soon as a
/// triple is complete.
///
/// `Ok(None)` means the search space was exhausted; running out of budget is
/// the separate error `SearchBudgetExceeded`.
pub fn search_urp_witness(
    s: &FiniteJoinSemilattice,
    inst: &UrpInstance,
    budget: u64,
) -> Result<Option<UrpWitness>, UrpError> {
    let m = inst.len();
    let mut by_rank_desc: Vec<usize> = s.elements().collect();
    let ranks: Vec<usize> = s.elements().map(|x| s.rank(x)).collect();
    by_rank_desc.sort_by_key(|&x| (std::cmp::Reverse(ranks[x]), x));
    let pair_options: Vec<Vec<(usize, usize)>> = (0..m)
        .map(|i| {
            let mut options: Vec<(usize, usize)> = s
                .decompositions(inst.e)
                .into_iter()
                .filter(|&(x, y)| s.leq(x, inst.a[i]) && s.leq(y, inst.b[i]))
                .collect();
            options.sort_by_key(|&(x, y)| (std::cmp::Reverse(ranks[x] + ranks[y]), x, y));
            options
        })
        .collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| pair_options[i].len());
    let mut vars: Vec<Var> = order.into_iter().map(Var::Pair).collect();
    for t in 0..m {
        vars.push(Var::Cell(t, t));
        for j in 0..t {
            vars.push(Var::Cell(t, j));
            vars.push(Var::Cell(j, t));
        }
    }

    let mut search = Search {
        s,
        m,
        pair_options,
        pair: vec![None; m],
        cell: vec![None; m * m],
        by_rank_desc,
    };
    let mut stack: Vec<Frame> = Vec::with_capacity(vars.len());
    let mut nodes = 0u64;
    loop {
        if stack.len() == vars.len() {
            return Ok(Some(search.witness()));
        }
        let var = vars[stack.len()];
        stack.push(Frame {
            var,
            candidates: search.candidates(var),
            next: 0,
        });
        // advance to the next consistent value, backtracking as needed
        loop {
            let Some(frame) = stack.last_mut() else {
                return Ok(None);
            };
            let var = frame.var;
            search.unassign(var);
            if frame.next == frame.candidates.len() {
                stack.pop();
                continue;
            }
            let value = frame.candidates[frame.next];
            frame.next += 1;
            nodes += 1;
            if nodes > budget {
                return Err(UrpError::SearchBudgetExceeded { budget });
            }
            if search.assign(var, value) {
                break;
            }
        }
    }
}

/// The instance whose index set is every pair `(a, b)` with `a + b = e`.
pub fn canonical_instance(s: &FiniteJoinSemilattice, e: usize) -> UrpInstance {
    let pairs = s.decompositions(e);
    UrpInstance {
        e,
        a: pairs.iter().map(|p| p.0).collect(),
        b: pairs.iter().map(|p| p.1).collect(),
    }
}

/// A witness for the canonical instance at `e`, if one exists.
pub fn urp_witness_at(
    s: &FiniteJoinSemilattice,
    e: usize,
    budget: u64,
) -> Result<Option<(UrpInstance, UrpWitness)>, UrpError> {
    let inst = canonical_instance(s, e);
    Ok(search_urp_witness(s, &inst, budget)?.map(|w| (inst, w)))
}

/// Every family at `e` reindexes the canonical instance, and a canonical
/// witness pulls back along the reindexing, so this decides the property at
/// `e` for families of any size.
pub fn holds_urp_at(s: &FiniteJoinSemilattice, e: usize, budget: u64) -> Result<bool, UrpError> {
    Ok(urp_witness_at(s, e, budget)?.is_some())
}

/// The first element at which the property fails.
pub fn urp_failure(s: &FiniteJoinSemilattice, budget: u64) -> Result<Option<usize>, UrpError> {
    for e in s.elements() {
        if !holds_urp_at(s, e, budget)? {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

pub fn satisfies_urp(s: &FiniteJoinSemilattice, budget: u64) -> Result<bool, UrpError> {
    Ok(urp_failure(s, budget)?.is_none())
}

/// Reindexes a witness for the canonical instance to an arbitrary family at
/// the same element, duplicates included.
pub fn lift_canonical_witness(
    canonical: &UrpInstance,
    witness: &UrpWitness,
    inst: &UrpInstance,
) -> Result<UrpWitness, UrpError> {
    if canonical.e != inst.e {
        return Err(UrpError::NotAnInstance(0));
    }
    let slot: Vec<usize> = (0..inst.len())
        .map(|i| {
            (0..canonical.len())
                .find(|&k| canonical.a[k] == inst.a[i] && canonical.b[k] == inst.b[i])
                .ok_or(UrpError::NotAnInstance(i))
        })
        .collect::<Result<_, _>>()?;
    Ok(UrpWitness {
        a_star: slot.iter().map(|&k| witness.a_star[k]).collect(),
        b_star: slot.iter().map(|&k| witness.b_star[k]).collect(),
        c: slot
            .iter()
            .map(|&k| slot.iter().map(|&l| witness.c[k][l]).collect())
            .collect(),
    })
}

/// `a* = a`, `b* = b`, `c_ij = a_i ∧ b_j`; valid whenever `l` is distributive.
pub fn meet_formula_witness(l: &FiniteLattice, inst: &UrpInstance) -> UrpWitness {
    UrpWitness {
        a_star: inst.a.clone(),
        b_star: inst.b.clone(),
        c: inst
            .a
            .iter()
            .map(|&ai| inst.b.iter().map(|&bj| l.meet(ai, bj)).collect())
            .collect(),
    }
}

/// Splits an instance at `e0 + e1` into instances at `e0` and `e1` by refining
/// each `a_i + b_i = e0 + e1`.
pub fn decompose_instance(
    refiner: &Refiner,
    inst: &UrpInstance,
    e0: usize,
    e1: usize,
) -> Result<(UrpInstance, UrpInstance), UrpError> {
    let s = refiner.semilattice();
    if s.join(e0, e1) != inst.e {
        return Err(UrpError::BadDecomposition(0));
    }
    let mut parts = [
        UrpInstance {
            e: e0,
            a: Vec::new(),
            b: Vec::new(),
        },
        UrpInstance {
            e: e1,
            a: Vec::new(),
            b: Vec::new(),
        },
    ];
    for i in 0..inst.len() {
        let sq = refiner
            .square(inst.a[i], inst.b[i], e0, e1)
            .ok_or(UrpError::NotDistributive([inst.a[i], inst.b[i], e0, e1]))?;
        parts[0].a.push(sq.c00);
        parts[0].b.push(sq.c10);
        parts[1].a.push(sq.c01);
        parts[1].b.push(sq.c11);
    }
    let [p0, p1] = parts;
    Ok((p0, p1))
}

/// Joins witnesses at `e0` and `e1` componentwise into a witness for `inst`,
/// which must be the componentwise join of `inst0` and `inst1`.
pub fn urp_join_combine(
    s: &FiniteJoinSemilattice,
    inst: &UrpInstance,
    (inst0, w0): (&UrpInstance, &UrpWitness),
    (inst1, w1): (&UrpInstance, &UrpWitness),
) -> Result<UrpWitness, UrpError> {
    let m = inst.len();
    if inst0.len() != m || inst1.len() != m || s.join(inst0.e, inst1.e) != inst.e {
        return Err(UrpError::BadDecomposition(0));
    }
    if let Some(i) = (0..m).find(|&i| {
        s.join(inst0.a[i], inst1.a[i]) != inst.a[i] || s.join(inst0.b[i], inst1.b[i]) != inst.b[i]
    }) {
        return Err(UrpError::BadDecomposition(i));
    }
    verify_urp_witness(s, inst0, w0).map_err(UrpError::InvalidInputWitness)?;
    verify_urp_witness(s, inst1, w1).map_err(UrpError::InvalidInputWitness)?;
    let join = |x: &[usize], y: &[usize]| -> Vec<usize> {
        x.iter().zip(y).map(|(&p, &q)| s.join(p, q)).collect()
    };
    Ok(UrpWitness {
        a_star: join(&w0.a_star, &w1.a_star),
        b_star: join(&w0.b_star, &w1.b_star),
        c: w0.c.iter().zip(&w1.c).map(|(r0, r1)| join(r0, r1)).collect(),
    })
}

/// Witness at `f(u)`: pull each pair back along `f` by weak distributivity,
/// solve the pulled-back instance at `u` with `solve`, and push the result
/// forward.
pub fn urp_transfer_with<F>(
    f: &SemilatticeHom,
    u: usize,
    inst: &UrpInstance,
    solve: F,
) -> Result<UrpWitness, UrpError>
where
    F: FnOnce(&UrpInstance) -> Result<Option<UrpWitness>, UrpError>,
{
    if inst.e != f.apply(u) {
        return Err(UrpError::NotAnInstance(0));
    }
    let wd = weak_distributivity_at(f, u).map_err(UrpError::NotWeaklyDistributive)?;
    let mut pulled = UrpInstance {
        e: u,
        a: Vec::with_capacity(inst.len()),
        b: Vec::with_capacity(inst.len()),
    };
    for i in 0..inst.len() {
        let (x0, x1) = wd
            .lookup(inst.a[i], inst.b[i])
            .ok_or(UrpError::NotAnInstance(i))?;
        pulled.a.push(x0);
        pulled.b.push(x1);
    }
    let w = solve(&pulled)?.ok_or(UrpError::NoSourceWitness)?;
    verify_urp_witness(f.source(), &pulled, &w).map_err(UrpError::InvalidInputWitness)?;
    let push = |xs: &[usize]| -> Vec<usize> { xs.iter().map(|&x| f.apply(x)).collect() };
    Ok(UrpWitness {
        a_star: push(&w.a_star),
        b_star: push(&w.b_star),
        c: w.c.iter().map(|row| push(row)).collect(),
    })
}

pub fn urp_transfer(
    f: &SemilatticeHom,
    u: usize,
    inst: &UrpInstance,
    budget: u64,
) -> Result<UrpWitness, UrpError> {
    urp_transfer_with(f, u, inst, |pulled| {
        search_urp_witness(f.source(), pulled, budget)
    })
}

/// Witness in Con L at Θ(u, v) for a congruence-splitting lattice: split `v`
/// over `u` as `s_i ∨ t_i` inside each `α_i ∨ β_i`, then take
/// `α*_i = Θ(u, s_i)`, `β*_i = Θ(u, t_i)` and `c_ij = Θ(s_j, s_i ∨ s_j)`.
///
/// Instance entries are indices into `con`.
pub fn csurp_witness(
    l: &FiniteLattice,
    con: &CongruenceLattice,
    u: usize,
    v: usize,
    inst: &UrpInstance,
) -> Result<UrpWitness, UrpError> {
    if inst.e != con.principal(u, v) {
        return Err(UrpError::NotAnInstance(0));
    }
    let mut s_split = Vec::with_capacity(inst.len());
    let mut t_split = Vec::with_capacity(inst.len());
    for i in 0..inst.len() {
        let split = SplitInstance {
            a: u,
            b: v,
            alpha0: con.get(inst.a[i]).clone(),
            alpha1: con.get(inst.b[i]).clone(),
        };
        let (s, t) = splitting_witness(l, &split).ok_or(UrpError::NotSplitting { index: i })?;
        s_split.push(s);
        t_split.push(t);
    }
    Ok(UrpWitness {
        a_star: s_split.iter().map(|&s| con.principal(u, s)).collect(),
        b_star: t_split.iter().map(|&t| con.principal(u, t)).collect(),
        c: s_split
            .iter()
            .map(|&si| {
                s_split
                    .iter()
                    .map(|&sj| con.principal(sj, l.join(si, sj)))
                    .collect()
            })
            .collect(),
    })
}

/// For a square `a0 + a1 = b0 + b1` refined by the `c`'s: `a0 ≤ b0 + c01`.
pub fn check_refinement_square_consequence(
    s: &FiniteJoinSemilattice,
    sq: &RefinementSquare,
) -> Result<bool, UrpError> {
    if !sq.is_valid(s) {
        return Err(UrpError::PreconditionFail);
    }
    Ok(s.leq(sq.a0, s.join(sq.b0, sq.c01)))
}
