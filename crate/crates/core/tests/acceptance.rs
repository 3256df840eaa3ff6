//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//! Every criterion demands zero failures; sample sizes are fixed below and
//! all randomness comes from ChaCha8 seeded with 0.

mod common;

use std::time::Instant;

use conlat_core::campaign::{
    check_convex_hom, run_check, run_lattice_theorem, run_ring_pipeline, run_ring_theorem,
    CampaignOptions, CorpusItem, RingItem, RING_THEOREMS, URP_NOTE,
};
use conlat_core::congruence::{con_lattice, induced_con_map, monotonize_chain, Chain};
use conlat_core::lattice::{enumerate_homs, LatticeHom};
use conlat_core::semilattice::{
    check_refinement, enumerate_semilattice_homs, has_refinement_property, is_weakly_distributive,
    verify_wd_witness, wd_join_combine_with, weak_distributivity_at, FiniteJoinSemilattice,
    SemilatticeHom,
};
use conlat_core::splitting::{has_property_c, is_congruence_splitting};
use conlat_core::urp::{
    canonical_instance, csurp_witness, decompose_instance, holds_urp_at, search_urp_witness,
    urp_join_combine, urp_transfer, verify_urp_witness, UrpInstance,
};
use conlat_core::{canonical_form, enumerate_lattices, FiniteLattice};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0;
const SAMPLES: usize = 10_000;
const BUDGET: u64 = 10_000_000;

type Outcome = Result<String, String>;

fn lattices(max: usize) -> Vec<FiniteLattice> {
    enumerate_lattices(max).unwrap()
}

fn items(max: usize) -> Vec<CorpusItem> {
    conlat_core::campaign::generate_corpus(max).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ac1() -> Outcome {
    let all = lattices(7);
    let frozen = [1, 1, 1, 2, 5, 15, 53];
    let got: Vec<usize> = (1..=7).map(|n| all.iter().filter(|l| l.size() == n).count()).collect();
    let oracle: Vec<usize> = (1..=7).map(common::lattice_count).collect();
    ensure(oracle == frozen, format!("oracle gave {oracle:?}"))?;
    ensure(got == oracle, format!("enumeration gave {got:?}, oracle {oracle:?}"))?;
    Ok(format!("counts n=1..7 {got:?} equal poset oracle (exact)"))
}

fn ac2() -> Outcome {
    let mut n = 0;
    for l in lattices(6) {
        let con = con_lattice(&l);
        ensure(
            con.len() == common::congruences(&l).len(),
            format!("Con size differs from partition oracle on {}", canonical_form(&l)),
        )?;
        ensure(
            has_refinement_property(&con.as_semilattice()),
            format!("Con not refining on {}", canonical_form(&l)),
        )?;
        n += 1;
    }
    Ok(format!("{n} lattices |L|<=6, Con L refining, 0 failures"))
}

fn ac3() -> Outcome {
    let mut hyp = 0;
    for l in lattices(7) {
        if l.is_sectionally_complemented() || l.is_relatively_complemented() || l.is_atomistic() {
            hyp += 1;
            ensure(has_property_c(&l), format!("no (C) on {}", canonical_form(&l)))?;
            ensure(common::property_c(&l), format!("oracle: no (C) on {}", canonical_form(&l)))?;
        }
    }
    let corpus = items(7);
    let opts = CampaignOptions::default();
    for t in ["prop-a", "prop-b"] {
        let r = run_lattice_theorem(t, &corpus, &opts).unwrap();
        ensure(r.exit_code() == 0, format!("{t} campaign: {:?}", r.summary))?;
    }
    Ok(format!("{hyp} of {} lattices |L|<=7 meet a hypothesis, all have (C); prop-a/prop-b campaigns 0 violations", corpus.len()))
}

fn ac4() -> Outcome {
    let corpus = items(6);
    let mut hyp = 0;
    for item in &corpus {
        let l = &item.lattice;
        if has_property_c(l) {
            hyp += 1;
            ensure(is_congruence_splitting(l), format!("{} not splitting", item.id))?;
            ensure(common::congruence_splitting(l), format!("oracle: {} not splitting", item.id))?;
        }
    }
    let r = run_lattice_theorem("prop-d", &corpus, &CampaignOptions::default()).unwrap();
    ensure(r.exit_code() == 0, format!("prop-d campaign: {:?}", r.summary))?;
    let instances: u64 = r.rows.iter().filter_map(|row| row.detail["instances"].as_u64()).sum();
    Ok(format!("{hyp} (C)-lattices |L|<=6 splitting; {instances} constructive splits validated"))
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut lattices_hit, mut witnesses) = (0, 0);
    for l in lattices(5) {
        if !is_congruence_splitting(&l) {
            continue;
        }
        lattices_hit += 1;
        let con = con_lattice(&l);
        let s = con.as_semilattice();
        for u in l.elements() {
            for v in l.elements().filter(|&v| l.leq(u, v)) {
                let canonical = canonical_instance(&s, con.principal(u, v));
                let mut families = vec![canonical.clone()];
                // duplicate-bearing subfamilies of the canonical pair set
                let pairs: Vec<(usize, usize)> =
                    canonical.a.iter().copied().zip(canonical.b.iter().copied()).collect();
                for _ in 0..4 {
                    let len = rng.gen_range(1..=5);
                    let chosen: Vec<_> = (0..len).map(|_| *pairs.choose(&mut rng).unwrap()).collect();
                    families.push(UrpInstance::from_pairs(&s, canonical.e, &chosen).unwrap());
                }
                for inst in &families {
                    let w = csurp_witness(&l, &con, u, v, inst).map_err(|e| e.to_string())?;
                    verify_urp_witness(&s, inst, &w).map_err(|e| format!("{u}<={v}: {e}"))?;
                    ensure(common::urp_witness_ok(&s, inst, &w), "literal clause check")?;
                    witnesses += 1;
                }
            }
        }
    }
    let r = run_lattice_theorem("thm-csurp", &items(5), &CampaignOptions::default()).unwrap();
    ensure(r.exit_code() == 0, format!("thm-csurp campaign: {:?}", r.summary))?;
    Ok(format!("{lattices_hit} splitting lattices |L|<=5, {witnesses} witnesses valid"))
}

fn convex_pool(sources: &[FiniteLattice], targets: &[FiniteLattice]) -> Vec<(usize, usize, Vec<usize>)> {
    let mut pool = Vec::new();
    for (i, k) in sources.iter().enumerate() {
        for (j, t) in targets.iter().enumerate() {
            for map in enumerate_homs(k, t) {
                if (LatticeHom { source: k, target: t, map: map.clone() }).has_convex_range() {
                    pool.push((i, j, map));
                }
            }
        }
    }
    pool
}

fn ac6() -> Outcome {
    let ls = lattices(5);
    let pool = convex_pool(&ls, &ls);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut splits = 0;
    let mut mono = 0;
    for _ in 0..SAMPLES {
        let (i, j, map) = pool.choose(&mut rng).unwrap();
        let h = LatticeHom::new(&ls[*i], &ls[*j], map.clone()).unwrap();
        let f = induced_con_map(&h).map_err(|e| e.to_string())?;
        ensure(is_weakly_distributive(&f.hom), format!("induced map of {map:?} not weakly distributive"))?;
        splits += check_convex_hom(&h).map_err(|d| d.to_string())?;
        // arbitrary sequences from u to v: monotone output, labels untouched
        let k = h.source;
        let u = rng.gen_range(0..k.size());
        let v = k.join(u, rng.gen_range(0..k.size()));
        let len = rng.gen_range(0..4);
        let mut elements = vec![u];
        elements.extend((0..len).map(|_| rng.gen_range(0..k.size())));
        elements.push(v);
        let labels: Vec<usize> = (0..elements.len() - 1).map(|s| s % 2).collect();
        let out = monotonize_chain(k, &Chain { elements, labels: labels.clone() }, u, v);
        ensure(out.is_monotone(k) && out.labels == labels, "monotonize_chain")?;
        ensure(out.elements.first() == Some(&u) && out.elements.last() == Some(&v), "endpoints")?;
        mono += 1;
    }
    Ok(format!(
        "{SAMPLES} sampled homs from a pool of {} convex homs |K|,|L|<=5: all weakly distributive, {splits} splits validated, {mono} chains monotonized",
        pool.len()
    ))
}

fn ac7() -> Outcome {
    let ls = lattices(5);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    // wd_join_combine over all join homs into distributive targets
    let sems: Vec<FiniteJoinSemilattice> = ls.iter().map(FiniteJoinSemilattice::from_lattice).collect();
    let mut homs = Vec::new();
    for s in &sems {
        for (t, tl) in sems.iter().zip(&ls) {
            if !tl.is_distributive() {
                continue;
            }
            for map in enumerate_semilattice_homs(s, t) {
                homs.push(SemilatticeHom::new(s.clone(), t.clone(), map).unwrap());
            }
        }
    }
    let mut wd = 0;
    while wd < SAMPLES {
        let f = homs.choose(&mut rng).unwrap();
        let good: Vec<usize> = f.source().elements().filter(|&u| weak_distributivity_at(f, u).is_ok()).collect();
        if good.is_empty() {
            continue;
        }
        let refiner = check_refinement(f.target()).unwrap();
        let (u1, u2) = (*good.choose(&mut rng).unwrap(), *good.choose(&mut rng).unwrap());
        let w = wd_join_combine_with(
            f,
            &refiner,
            &weak_distributivity_at(f, u1).unwrap(),
            &weak_distributivity_at(f, u2).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        ensure(verify_wd_witness(f, &w), "wd_join_combine output rejected")?;
        ensure(common::weakly_distributive_at(f, w.u), "oracle: combined point not weakly distributive")?;
        wd += 1;
    }

    let random_family = |s: &FiniteJoinSemilattice, e: usize, rng: &mut ChaCha8Rng| {
        let pairs = s.decompositions(e);
        let len = rng.gen_range(1..=4);
        let chosen: Vec<_> = (0..len).map(|_| *pairs.choose(rng).unwrap()).collect();
        UrpInstance::from_pairs(s, e, &chosen).unwrap()
    };

    // urp_join_combine in Con L
    let cons: Vec<FiniteJoinSemilattice> = ls.iter().map(|l| con_lattice(l).as_semilattice()).collect();
    let refiners: Vec<_> = cons.iter().map(|s| check_refinement(s).unwrap()).collect();
    for _ in 0..SAMPLES {
        let k = rng.gen_range(0..cons.len());
        let s = &cons[k];
        let (e0, e1) = (rng.gen_range(0..s.size()), rng.gen_range(0..s.size()));
        let inst = random_family(s, s.join(e0, e1), &mut rng);
        let (i0, i1) = decompose_instance(&refiners[k], &inst, e0, e1).map_err(|e| e.to_string())?;
        let w0 = search_urp_witness(s, &i0, BUDGET).map_err(|e| e.to_string())?.ok_or("no witness at e0")?;
        let w1 = search_urp_witness(s, &i1, BUDGET).map_err(|e| e.to_string())?.ok_or("no witness at e1")?;
        let w = urp_join_combine(s, &inst, (&i0, &w0), (&i1, &w1)).map_err(|e| e.to_string())?;
        verify_urp_witness(s, &inst, &w).map_err(|e| format!("urp_join_combine: {e}"))?;
        ensure(common::urp_witness_ok(s, &inst, &w), "literal clause check")?;
    }

    // urp_transfer along induced maps of convex homs
    let pool = convex_pool(&ls, &ls);
    let induced: Vec<_> = pool
        .iter()
        .map(|(i, j, map)| induced_con_map(&LatticeHom::new(&ls[*i], &ls[*j], map.clone()).unwrap()).unwrap())
        .collect();
    for _ in 0..SAMPLES {
        let f = induced.choose(&mut rng).unwrap();
        let u = rng.gen_range(0..f.hom.source().size());
        let t = f.hom.target();
        let inst = random_family(t, f.apply(u), &mut rng);
        let w = urp_transfer(&f.hom, u, &inst, BUDGET).map_err(|e| e.to_string())?;
        verify_urp_witness(t, &inst, &w).map_err(|e| format!("urp_transfer: {e}"))?;
        ensure(common::urp_witness_ok(t, &inst, &w), "literal clause check")?;
    }
    Ok(format!("{SAMPLES} each of wd_join_combine, urp_join_combine, urp_transfer: 0 invalid outputs"))
}

fn ac8() -> Outcome {
    let mut points = 0;
    for l in lattices(5) {
        let s = con_lattice(&l).as_semilattice();
        for e in s.elements() {
            ensure(
                holds_urp_at(&s, e, BUDGET).map_err(|e| e.to_string())?,
                format!("URP fails in Con of {} at {e}", canonical_form(&l)),
            )?;
            points += 1;
        }
    }
    // every join-semilattice with at most 6 elements is a lattice with at
    // most 7 elements minus its bottom
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut semilattices, mut families, mut failing_points) = (0, 0, 0);
    for l in lattices(7).into_iter().filter(|l| l.size() > 1) {
        let keep: Vec<usize> = l.elements().filter(|&x| x != l.bottom()).collect();
        let s = FiniteJoinSemilattice::from_lattice(&l).restrict(&keep).unwrap();
        semilattices += 1;
        for e in s.elements() {
            let canonical = holds_urp_at(&s, e, BUDGET).map_err(|e| e.to_string())?;
            if !canonical {
                failing_points += 1;
            }
            let pairs = s.decompositions(e);
            for _ in 0..16 {
                let len = rng.gen_range(1..=5);
                let chosen: Vec<_> = (0..len).map(|_| *pairs.choose(&mut rng).unwrap()).collect();
                let inst = UrpInstance::from_pairs(&s, e, &chosen).unwrap();
                let found = search_urp_witness(&s, &inst, BUDGET).map_err(|e| e.to_string())?;
                if let Some(w) = &found {
                    ensure(common::urp_witness_ok(&s, &inst, w), "literal clause check")?;
                }
                ensure(
                    !canonical || found.is_some(),
                    format!("disagreement: canonical holds but {inst:?} fails"),
                )?;
                families += 1;
            }
        }
    }
    Ok(format!(
        "URP at all {points} points of Con L, |L|<=5; {families} duplicate families (|I|<=5) on {semilattices} semilattices n<=6, 0 disagreements ({failing_points} points fail in non-distributive ones)"
    ))
}

fn ac9() -> Outcome {
    let opts = CampaignOptions::default();
    let rings = RingItem::default_rings();
    for item in &rings {
        let r = run_ring_pipeline(item, &opts).map_err(|e| e.to_string())?;
        ensure(r.exit_code() == 0, format!("{}: {:?}", item.label, r.rows))?;
        ensure(r.rows.len() == 8, format!("{}: missing rows", item.label))?;
    }
    for t in RING_THEOREMS {
        let r = run_ring_theorem(t, &rings, &opts).map_err(|e| e.to_string())?;
        ensure(r.exit_code() == 0, format!("{t}: {:?}", r.summary))?;
    }
    let structure = |spec: &str| {
        let r = run_ring_pipeline(&RingItem::parse(spec).unwrap(), &opts).unwrap();
        r.rows.into_iter().find(|row| row.property_id == "structure").unwrap().detail
    };
    ensure(structure("M(2,2)")["principal_right_ideals_is_m3"] == true, "L(M_2(F_2)) is not M3")?;
    ensure(structure("M(1,2)xM(2,3)")["v_rank"] == 2, "k(F_2 x M_2(F_3)) != 2")?;
    Ok(format!("{} rings: all pipeline checks and ring theorems hold; L(M_2(F_2)) = M3, k(F_2 x M_2(F_3)) = 2", rings.len()))
}

fn ac10() -> Outcome {
    let corpus = items(6);
    let opts = CampaignOptions::default();
    for r in [
        run_check("urp", &corpus, &opts).unwrap(),
        run_lattice_theorem("thm-csurp", &corpus, &opts).unwrap(),
    ] {
        let id = &r.parameters.id;
        ensure(r.notes.iter().any(|n| n == URP_NOTE), format!("{id}: note missing"))?;
        ensure(r.summary.fails == 0 && r.summary.budget_exceeded == 0, format!("{id}: {:?}", r.summary))?;
        ensure(r.to_json().contains("aleph_2"), format!("{id}: note not serialized"))?;
    }
    Ok(format!("urp and thm-csurp reports on {} lattices: 0 failures, note present", corpus.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("corpus integrity", ac1),
        ("Con distributivity", ac2),
        ("complemented/atomistic => (C)", ac3),
        ("(C) => congruence splitting", ac4),
        ("splitting => URP witnesses", ac5),
        ("convex range => weakly distributive", ac6),
        ("constructive combinators", ac7),
        ("URP finite consistency", ac8),
        ("regular ring pipeline", ac9),
        ("negative-result note", ac10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("AC{:<2} PASS  {name}: {msg} [{secs:.1}s]", k + 1),
            Err(msg) => {
                failed += 1;
                println!("AC{:<2} FAIL  {name}: {msg} [{secs:.1}s]", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
