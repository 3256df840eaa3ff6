//! Canonical codes for finite lattices and isomorph-free enumeration.
//!
//! Canonical labelling is individualization-refinement: colour elements by
//! order invariants, refine along the cover relation until stable, then branch
//! on every choice of element in the first non-singleton cell. The code is the
//! lexicographically least order matrix over all leaves.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lattice::{FiniteLattice, LatticeError};

/// Largest size `enumerate_lattices` accepts by default.
pub const DEFAULT_MAX_SIZE: usize = 8;

/// Certificate string `"<n>:<hex>"`; equal iff the lattices are isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalCode(String);

impl CanonicalCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

struct Covers {
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
}

impl Covers {
    fn new(l: &FiniteLattice) -> Self {
        let mut up = vec![Vec::new(); l.size()];
        let mut down = vec![Vec::new(); l.size()];
        for (x, y) in l.cover_pairs() {
            up[x].push(y);
            down[y].push(x);
        }
        Covers { up, down }
    }
}

/// Replaces arbitrary sortable keys by their rank among the distinct keys.
fn rank_keys<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut distinct = keys.to_vec();
    distinct.sort();
    distinct.dedup();
    keys.iter()
        .map(|k| distinct.binary_search(k).unwrap())
        .collect()
}

fn cell_count(colors: &[usize]) -> usize {
    colors.iter().max().map_or(0, |m| m + 1)
}

fn refine(colors: Vec<usize>, covers: &Covers) -> Vec<usize> {
    let mut colors = colors;
    loop {
        let keys: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..colors.len())
            .map(|x| {
                let mut up: Vec<usize> = covers.up[x].iter().map(|&y| colors[y]).collect();
                let mut down: Vec<usize> = covers.down[x].iter().map(|&y| colors[y]).collect();
                up.sort_unstable();
                down.sort_unstable();
                (colors[x], up, down)
            })
            .collect();
        let next = rank_keys(&keys);
        if cell_count(&next) == cell_count(&colors) {
            return next;
        }
        colors = next;
    }
}

fn order_bits(l: &FiniteLattice, perm: &[usize]) -> Vec<bool> {
    let n = perm.len();
    let mut bits = Vec::with_capacity(n * n.saturating_sub(1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                bits.push(l.leq(perm[i], perm[j]));
            }
        }
    }
    bits
}

fn search_leaves(
    l: &FiniteLattice,
    covers: &Covers,
    colors: Vec<usize>,
    best: &mut Option<(Vec<bool>, Vec<usize>)>,
) {
    let n = colors.len();
    if cell_count(&colors) == n {
        let mut perm = vec![0; n];
        for (x, &c) in colors.iter().enumerate() {
            perm[c] = x;
        }
        let bits = order_bits(l, &perm);
        if best.as_ref().is_none_or(|(b, _)| bits < *b) {
            *best = Some((bits, perm));
        }
        return;
    }
    // first colour class with more than one element
    let mut sizes = vec![0usize; n];
    for &c in &colors {
        sizes[c] += 1;
    }
    let target = (0..n).find(|&c| sizes[c] > 1).unwrap();
    for v in (0..n).filter(|&x| colors[x] == target) {
        let keys: Vec<(usize, bool)> = (0..n).map(|x| (colors[x], x != v)).collect();
        let split = refine(rank_keys(&keys), covers);
        search_leaves(l, covers, split, best);
    }
}

/// A canonical relabelling: `perm[new] = old`. Relabelling any two isomorphic
/// lattices along their canonical permutations yields identical lattices.
pub fn canonical_labeling(l: &FiniteLattice) -> Vec<usize> {
    canonical(l).1
}

fn canonical(l: &FiniteLattice) -> (Vec<bool>, Vec<usize>) {
    let covers = Covers::new(l);
    let depths = l.depths();
    let heights: Vec<usize> = {
        // longest chain from x up to the top
        let mut h = vec![0; l.size()];
        let mut order: Vec<usize> = l.elements().collect();
        order.sort_by_key(|&x| std::cmp::Reverse(depths[x]));
        for &x in &order {
            h[x] = covers.up[x].iter().map(|&y| h[y] + 1).max().unwrap_or(0);
        }
        h
    };
    let keys: Vec<(usize, usize, usize, usize)> = l
        .elements()
        .map(|x| {
            (
                depths[x],
                heights[x],
                l.down_set(x).len(),
                l.up_set(x).len(),
            )
        })
        .collect();
    let colors = refine(rank_keys(&keys), &covers);
    let mut best = None;
    search_leaves(l, &covers, colors, &mut best);
    best.expect("at least one leaf")
}

pub fn canonical_form(l: &FiniteLattice) -> CanonicalCode {
    let (bits, _) = canonical(l);
    CanonicalCode(encode(l.size(), &bits))
}

fn encode(n: usize, bits: &[bool]) -> String {
    let mut hex = String::with_capacity(bits.len() / 4 + 1);
    for chunk in bits.chunks(4) {
        let mut nibble = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            if b {
                nibble |= 8 >> i;
            }
        }
        hex.push(char::from_digit(nibble as u32, 16).unwrap());
    }
    format!("{n}:{hex}")
}

/// Relabels `l` into canonical order; bottom becomes `0` and top `n - 1`.
pub fn canonicalize(l: &FiniteLattice) -> FiniteLattice {
    l.relabel(&canonical_labeling(l))
}

/// One representative per isomorphism class for each size `1..=max_n`,
/// ordered by size and then by canonical code.
pub fn enumerate_lattices(max_n: usize) -> Result<Vec<FiniteLattice>, LatticeError> {
    enumerate_lattices_bounded(max_n, DEFAULT_MAX_SIZE)
}

pub fn enumerate_lattices_bounded(
    max_n: usize,
    bound: usize,
) -> Result<Vec<FiniteLattice>, LatticeError> {
    if max_n > bound {
        return Err(LatticeError::BoundExceeded {
            requested: max_n,
            bound,
        });
    }
    let mut out = Vec::new();
    if max_n == 0 {
        return Ok(out);
    }
    let mut layer = vec![FiniteLattice::chain(1)];
    out.extend(layer.iter().cloned());
    for _ in 2..=max_n {
        layer = next_layer(&layer)?;
        out.extend(layer.iter().cloned());
    }
    Ok(out)
}

/// Removing a join-irreducible element from a lattice leaves a lattice, so
/// every lattice of size `m + 1` arises from one of size `m` by inserting a
/// new element `j` whose strict down-set is a principal ideal `↓p` and whose
/// strict up-set is an up-set of elements strictly above `p`.
fn next_layer(layer: &[FiniteLattice]) -> Result<Vec<FiniteLattice>, LatticeError> {
    let mut seen: HashSet<CanonicalCode> = HashSet::new();
    let mut found: Vec<(CanonicalCode, FiniteLattice)> = Vec::new();
    for k in layer {
        let m = k.size();
        let n = m + 1;
        for p in k.elements() {
            let above: Vec<usize> = k.elements().filter(|&y| k.lt(p, y)).collect();
            for mask in 0u32..(1 << above.len()) {
                let upper: Vec<usize> = above
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &y)| y)
                    .collect();
                let closed = upper
                    .iter()
                    .all(|&y| above.iter().all(|&z| !k.leq(y, z) || upper.contains(&z)));
                if !closed {
                    continue;
                }
                let mut leq = vec![false; n * n];
                for x in 0..m {
                    for y in 0..m {
                        leq[x * n + y] = k.leq(x, y);
                    }
                    leq[x * n + m] = k.leq(x, p);
                }
                for &y in &upper {
                    leq[m * n + y] = true;
                }
                leq[m * n + m] = true;
                let Ok(candidate) = FiniteLattice::from_leq(n, leq) else {
                    continue;
                };
                let (bits, perm) = canonical(&candidate);
                let code = CanonicalCode(encode(n, &bits));
                if seen.insert(code.clone()) {
                    found.push((code, candidate.relabel(&perm)));
                }
            }
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found
        .into_iter()
        .map(|(_, l)| {
            let covers = l.cover_pairs();
            FiniteLattice::from_covers(l.size(), &covers)
        })
        .collect()
}
