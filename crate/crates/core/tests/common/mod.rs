//! Brute-force oracles. Nothing here calls into the library's search or
//! closure code; each answer is recomputed from the definitions.
#![allow(dead_code)]

use std::collections::HashSet;

use conlat_core::semilattice::{FiniteJoinSemilattice, SemilatticeHom};
use conlat_core::urp::{UrpInstance, UrpWitness};
use conlat_core::FiniteLattice;

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}

/// Unlabeled lattices with `n` elements: strip top and bottom, enumerate every
/// labelled strict order on the rest, keep those whose bounded completion has
/// all pairwise joins, and count isomorphism classes by minimizing over all
/// relabellings.
pub fn lattice_count(n: usize) -> usize {
    assert!(n >= 1);
    if n <= 2 {
        return 1;
    }
    let m = n - 2;
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let perms = permutations(m);
    let mut seen = HashSet::new();
    for code in 0..3usize.pow(pairs.len() as u32) {
        let mut lt = vec![vec![false; m]; m];
        let mut c = code;
        for &(i, j) in &pairs {
            match c % 3 {
                1 => lt[i][j] = true,
                2 => lt[j][i] = true,
                _ => {}
            }
            c /= 3;
        }
        let transitive = (0..m).all(|i| {
            (0..m).all(|j| !lt[i][j] || (0..m).all(|k| !lt[j][k] || lt[i][k]))
        });
        if !transitive || !bounded_has_joins(&lt) {
            continue;
        }
        let key = perms
            .iter()
            .map(|p| {
                let mut bits = Vec::with_capacity(m * m);
                for i in 0..m {
                    for j in 0..m {
                        bits.push(lt[p[i]][p[j]]);
                    }
                }
                bits
            })
            .min()
            .unwrap();
        seen.insert(key);
    }
    seen.len()
}

fn bounded_has_joins(lt: &[Vec<bool>]) -> bool {
    let m = lt.len();
    // 0 is bottom, 1..=m inner, m+1 top
    let n = m + 2;
    let leq = |x: usize, y: usize| -> bool {
        x == y || x == 0 || y == n - 1 || (x > 0 && x <= m && y > 0 && y <= m && lt[x - 1][y - 1])
    };
    (0..n).all(|x| {
        (0..n).all(|y| {
            let ub: Vec<usize> = (0..n).filter(|&z| leq(x, z) && leq(y, z)).collect();
            ub.iter().any(|&u| ub.iter().all(|&w| leq(u, w)))
        })
    })
}

/// Set partitions of `0..n` as restricted growth strings.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |&m| m + 1);
        for label in 0..=next {
            prefix.push(label);
            grow(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}

pub fn is_compatible(l: &FiniteLattice, p: &[usize]) -> bool {
    l.elements().all(|x| {
        l.elements().all(|y| {
            p[x] != p[y]
                || l.elements().all(|z| {
                    p[l.join(x, z)] == p[l.join(y, z)] && p[l.meet(x, z)] == p[l.meet(y, z)]
                })
        })
    })
}

/// Every congruence of `l`, as class labels.
pub fn congruences(l: &FiniteLattice) -> Vec<Vec<usize>> {
    partitions(l.size())
        .into_iter()
        .filter(|p| is_compatible(l, p))
        .collect()
}

pub fn finer(p: &[usize], q: &[usize]) -> bool {
    (0..p.len()).all(|x| (0..p.len()).all(|y| p[x] != p[y] || q[x] == q[y]))
}

pub fn normalize(p: &[usize]) -> Vec<usize> {
    let mut map = Vec::new();
    p.iter()
        .map(|&c| match map.iter().position(|&d| d == c) {
            Some(i) => i,
            None => {
                map.push(c);
                map.len() - 1
            }
        })
        .collect()
}

/// Least congruence relating `u` and `v`, picked from the full list.
pub fn principal(cons: &[Vec<usize>], u: usize, v: usize) -> Vec<usize> {
    let above: Vec<&Vec<usize>> = cons.iter().filter(|p| p[u] == p[v]).collect();
    above
        .iter()
        .find(|p| above.iter().all(|q| finer(p, q)))
        .map(|p| p.to_vec())
        .unwrap()
}

/// Join of two congruences as the least listed congruence above both.
pub fn join(cons: &[Vec<usize>], p: &[usize], q: &[usize]) -> Vec<usize> {
    let above: Vec<&Vec<usize>> = cons.iter().filter(|r| finer(p, r) && finer(q, r)).collect();
    above
        .iter()
        .find(|r| above.iter().all(|s| finer(r, s)))
        .map(|r| r.to_vec())
        .unwrap()
}

pub fn meet(p: &[usize], q: &[usize]) -> Vec<usize> {
    let pairs: Vec<(usize, usize)> = p.iter().copied().zip(q.iter().copied()).collect();
    normalize(&pairs.iter().map(|pr| pairs.iter().position(|x| x == pr).unwrap()).collect::<Vec<_>>())
}

/// Distributivity of the congruence lattice from the list alone.
pub fn con_is_distributive(cons: &[Vec<usize>]) -> bool {
    cons.iter().all(|x| {
        cons.iter().all(|y| {
            cons.iter().all(|z| {
                let lhs = meet(x, &join(cons, y, z));
                let rhs = join(cons, &meet(x, y), &meet(x, z));
                lhs == rhs
            })
        })
    })
}

/// `a ⋖_c b` straight from the definition.
pub fn lessdot(l: &FiniteLattice, a: usize, b: usize, c: usize) -> bool {
    l.elements().any(|z| l.join(a, z) == b && l.leq(l.meet(a, z), c))
}

pub fn property_c(l: &FiniteLattice) -> bool {
    let n = l.size();
    l.elements().all(|c| {
        // transitive closure of ⋖_c by Warshall
        let mut reach = vec![vec![false; n]; n];
        for a in 0..n {
            reach[a][a] = true;
            for b in 0..n {
                if l.leq(a, b) && lessdot(l, a, b, c) {
                    reach[a][b] = true;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        (0..n).all(|a| (0..n).all(|b| !l.leq(a, b) || reach[a][b]))
    })
}

pub fn congruence_splitting(l: &FiniteLattice) -> bool {
    let cons = congruences(l);
    l.elements().all(|a| {
        l.elements().filter(|&b| l.leq(a, b)).all(|b| {
            let theta = principal(&cons, a, b);
            cons.iter().all(|a0| {
                cons.iter().all(|a1| {
                    !finer(&theta, &join(&cons, a0, a1))
                        || l.elements().any(|x0| {
                            l.elements().any(|x1| {
                                l.leq(a, x0)
                                    && l.leq(a, x1)
                                    && l.join(x0, x1) == b
                                    && a0[a] == a0[x0]
                                    && a1[a] == a1[x1]
                            })
                        })
                })
            })
        })
    })
}

/// Number of lattice homomorphisms, by trying every map.
pub fn hom_count(k: &FiniteLattice, l: &FiniteLattice) -> usize {
    let (n, m) = (k.size(), l.size());
    (0..m.pow(n as u32))
        .filter(|&code| {
            let map: Vec<usize> = (0..n).map(|i| code / m.pow(i as u32) % m).collect();
            k.elements().all(|x| {
                k.elements().all(|y| {
                    map[k.join(x, y)] == l.join(map[x], map[y])
                        && map[k.meet(x, y)] == l.meet(map[x], map[y])
                })
            })
        })
        .count()
}

pub fn weakly_distributive_at(f: &SemilatticeHom, u: usize) -> bool {
    let (s, t) = (f.source(), f.target());
    let fu = f.apply(u);
    t.elements().all(|y0| {
        t.elements().all(|y1| {
            t.join(y0, y1) != fu
                || s.elements().any(|x0| {
                    s.elements().any(|x1| {
                        s.join(x0, x1) == u && t.leq(f.apply(x0), y0) && t.leq(f.apply(x1), y1)
                    })
                })
        })
    })
}

/// The three clauses of the refinement definition, checked literally.
pub fn urp_witness_ok(s: &FiniteJoinSemilattice, inst: &UrpInstance, w: &UrpWitness) -> bool {
    let m = inst.a.len();
    let n = s.size();
    if w.a_star.len() != m || w.b_star.len() != m || w.c.len() != m || w.c.iter().any(|r| r.len() != m) {
        return false;
    }
    let cells = w.a_star.iter().chain(&w.b_star).chain(w.c.iter().flatten());
    if cells.into_iter().any(|&x| x >= n) {
        return false;
    }
    let clause_i = (0..m).all(|i| {
        s.leq(w.a_star[i], inst.a[i])
            && s.leq(w.b_star[i], inst.b[i])
            && s.join(w.a_star[i], w.b_star[i]) == inst.e
    });
    let clause_ii = (0..m).all(|i| {
        (0..m).all(|j| {
            s.leq(w.c[i][j], w.a_star[i])
                && s.leq(w.c[i][j], w.b_star[j])
                && s.leq(w.a_star[i], s.join(w.a_star[j], w.c[i][j]))
        })
    });
    let clause_iii = (0..m).all(|i| {
        (0..m).all(|j| (0..m).all(|k| s.leq(w.c[i][k], s.join(w.c[i][j], w.c[j][k]))))
    });
    clause_i && clause_ii && clause_iii
}

/// Exhaustive witness existence for families of length at most 2.
pub fn urp_family_holds(s: &FiniteJoinSemilattice, inst: &UrpInstance) -> bool {
    let m = inst.a.len();
    assert!(m <= 2, "oracle is exhaustive and only meant for tiny families");
    let n = s.size();
    let pair_options: Vec<Vec<(usize, usize)>> = (0..m)
        .map(|i| {
            let mut v = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    if s.leq(x, inst.a[i]) && s.leq(y, inst.b[i]) && s.join(x, y) == inst.e {
                        v.push((x, y));
                    }
                }
            }
            v
        })
        .collect();
    let mut choice = vec![0usize; m];
    loop {
        if pair_options.iter().any(|o| o.is_empty()) {
            return false;
        }
        let a_star: Vec<usize> = (0..m).map(|i| pair_options[i][choice[i]].0).collect();
        let b_star: Vec<usize> = (0..m).map(|i| pair_options[i][choice[i]].1).collect();
        let cells = m * m;
        for code in 0..n.pow(cells as u32) {
            let c: Vec<Vec<usize>> = (0..m)
                .map(|i| (0..m).map(|j| code / n.pow((i * m + j) as u32) % n).collect())
                .collect();
            let w = UrpWitness {
                a_star: a_star.clone(),
                b_star: b_star.clone(),
                c,
            };
            if urp_witness_ok(s, inst, &w) {
                return true;
            }
        }
        // odometer over pair choices
        let mut i = 0;
        loop {
            if i == m {
                return false;
            }
            choice[i] += 1;
            if choice[i] < pair_options[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if m == 0 {
            return false;
        }
    }
}
