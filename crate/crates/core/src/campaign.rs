//! Corpus files and verification campaigns. A campaign runs one property or
//! theorem check over every corpus item and collects one row per item.
//!
//! Rows come back in input order whatever order the workers finish in, and
//! nothing time-dependent is recorded unless timings are requested, so two
//! runs with the same corpus, seed and budget produce identical reports.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::congruence::{
    con_lattice, convex_hom_split, induced_con_map, pullback, CongruenceLattice,
};
use crate::enumerate::{canonical_form, enumerate_lattices};
use crate::lattice::{enumerate_homs, FiniteLattice, LatticeError, LatticeFile, LatticeHom};
use crate::ring::{
    check_support_universal_property, is_regular, regularity_failure, FiniteRing, RingError,
    RingStructure,
};
use crate::semilattice::{
    check_refinement, enumerate_semilattice_homs, verify_wd_witness, wd_join_combine_with,
    weak_distributivity_at, FiniteJoinSemilattice, SemilatticeHom,
};
use crate::splitting::{
    atomistic_c_chain, congruence_splitting_failure, property_c_failure, rel_lessdot,
    splitting_from_property_c, SplitInstance,
};
use crate::urp::{
    canonical_instance, csurp_witness, decompose_instance, search_urp_witness, urp_failure,
    urp_join_combine, urp_transfer, verify_urp_witness, UrpError, UrpInstance,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Attached to every report that checks the uniform refinement property.
pub const URP_NOTE: &str = "No finite counterexample to the uniform refinement property \
exists in this corpus: no row fails. This is expected, since the known semilattices without \
the property have at least aleph_2 elements.";

pub const PROPERTIES: &[&str] = &[
    "atomistic",
    "sectionally-complemented",
    "relatively-complemented",
    "modular",
    "distributive",
    "property-c",
    "cong-splitting",
    "urp",
    "con-distributive",
];

pub const LATTICE_THEOREMS: &[&str] = &[
    "prop-a",
    "prop-b",
    "prop-d",
    "thm-csurp",
    "prop-convhom",
    "lem-wdadd",
    "prop-urpadd",
    "prop-urpclwd",
];

pub const RING_THEOREMS: &[&str] = &["ring-nid-id", "ring-conc-idc", "ring-pi"];

/// Rings used when a ring campaign is given no `--ring`.
pub const DEFAULT_TEST_RINGS: &[&str] = &[
    "M(1,2)",
    "M(1,3)",
    "M(1,2)xM(1,2)",
    "M(2,2)",
    "M(2,3)",
    "M(1,2)xM(2,2)",
    "M(1,2)xM(2,3)",
];

/// Targets of homomorphism campaigns are corpus items up to this size.
const TARGET_MAX_SIZE: usize = 5;
/// Homomorphisms sampled per item in the heavier campaigns.
const HOM_SAMPLE: usize = 16;
/// Families longer than this are replaced by a random subfamily.
const FAMILY_SAMPLE: usize = 8;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("unknown property {0:?}")]
    UnknownProperty(String),
    #[error("unknown theorem {0:?}")]
    UnknownTheorem(String),
    #[error("cannot parse corpus: {0}")]
    Parse(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub id: String,
    pub lattice: FiniteLattice,
}

/// Every lattice up to `max_size` elements, identified by canonical code.
pub fn generate_corpus(max_size: usize) -> Result<Vec<CorpusItem>, LatticeError> {
    Ok(enumerate_lattices(max_size)?
        .into_iter()
        .map(|lattice| CorpusItem {
            id: canonical_form(&lattice).to_string(),
            lattice,
        })
        .collect())
}

/// One `{"id", "n", "covers"}` object per line.
pub fn corpus_to_jsonl(items: &[CorpusItem]) -> String {
    let mut out = String::new();
    for item in items {
        let mut file = item.lattice.to_file();
        file.id = Some(item.id.clone());
        out.push_str(&serde_json::to_string(&file).expect("lattice files serialize"));
        out.push('\n');
    }
    out
}

/// Accepts a single lattice object, a JSON array of them, or JSON lines.
/// Items without an id get their canonical code.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusItem>, CampaignError> {
    let files: Vec<LatticeFile> = if let Ok(one) = serde_json::from_str::<LatticeFile>(text) {
        vec![one]
    } else if let Ok(many) = serde_json::from_str::<Vec<LatticeFile>>(text) {
        many
    } else {
        text.lines()
            .enumerate()
            .filter(|(_, line)| !line.trim().is_empty())
            .map(|(i, line)| {
                serde_json::from_str(line)
                    .map_err(|e| CampaignError::Parse(format!("line {}: {e}", i + 1)))
            })
            .collect::<Result<_, _>>()?
    };
    files
        .into_iter()
        .map(|file| {
            let lattice = file.to_lattice()?;
            let id = file
                .id
                .unwrap_or_else(|| canonical_form(&lattice).to_string());
            Ok(CorpusItem { id, lattice })
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct CampaignOptions {
    pub seed: u64,
    pub budget: u64,
    /// Record per-row wall-clock time (makes reports non-reproducible).
    pub timings: bool,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        CampaignOptions {
            seed: 0,
            budget: crate::urp::DEFAULT_NODE_BUDGET,
            timings: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub item_id: String,
    pub property_id: String,
    pub verdict: Verdict,
    /// Witness, counterexample, or counts.
    pub detail: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub command: String,
    pub id: String,
    pub items: usize,
    pub max_item_size: usize,
    pub seed: u64,
    pub budget: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub holds: usize,
    pub fails: usize,
    pub budget_exceeded: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub tool_version: String,
    pub parameters: Parameters,
    pub rows: Vec<Row>,
    pub summary: Summary,
    pub notes: Vec<String>,
}

impl CampaignReport {
    fn new(parameters: Parameters, rows: Vec<Row>, notes: Vec<String>) -> Self {
        let mut summary = Summary {
            rows: rows.len(),
            ..Summary::default()
        };
        for row in &rows {
            match row.verdict {
                Verdict::Holds => summary.holds += 1,
                Verdict::Fails => summary.fails += 1,
                Verdict::BudgetExceeded => summary.budget_exceeded += 1,
            }
        }
        CampaignReport {
            tool_version: TOOL_VERSION.to_string(),
            parameters,
            rows,
            summary,
            notes,
        }
    }

    /// 0 when everything holds, 1 on any failure, 2 when only budgets ran out.
    pub fn exit_code(&self) -> i32 {
        if self.summary.fails > 0 {
            1
        } else if self.summary.budget_exceeded > 0 {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

struct Outcome {
    verdict: Verdict,
    detail: Value,
}

fn holds(detail: Value) -> Outcome {
    Outcome {
        verdict: Verdict::Holds,
        detail,
    }
}

fn fails(detail: Value) -> Outcome {
    Outcome {
        verdict: Verdict::Fails,
        detail,
    }
}

fn from_urp_error(e: UrpError) -> Outcome {
    match e {
        UrpError::SearchBudgetExceeded { budget } => Outcome {
            verdict: Verdict::BudgetExceeded,
            detail: json!({ "budget": budget }),
        },
        UrpError::InvalidInputWitness(v) => {
            fails(json!({ "error": v.to_string(), "clause": v.clause(), "violation": v }))
        }
        other => fails(json!({ "error": other.to_string() })),
    }
}

fn boolean(ok: bool, detail: Value) -> Outcome {
    if ok {
        holds(detail)
    } else {
        fails(detail)
    }
}

fn run_rows<T, F>(
    items: &[T],
    id_of: impl Fn(&T) -> String + Sync,
    property: &str,
    opts: &CampaignOptions,
    check: F,
) -> Vec<Row>
where
    T: Sync,
    F: Fn(usize, &T) -> Outcome + Sync,
{
    items
        .par_iter()
        .enumerate()
        .map(|(index, item)| {
            let start = Instant::now();
            let outcome = check(index, item);
            Row {
                item_id: id_of(item),
                property_id: property.to_string(),
                verdict: outcome.verdict,
                detail: outcome.detail,
                elapsed_ms: opts.timings.then(|| start.elapsed().as_millis() as u64),
            }
        })
        .collect()
}

fn parameters(command: &str, id: &str, items: &[CorpusItem], opts: &CampaignOptions) -> Parameters {
    Parameters {
        command: command.to_string(),
        id: id.to_string(),
        items: items.len(),
        max_item_size: items.iter().map(|i| i.lattice.size()).max().unwrap_or(0),
        seed: opts.seed,
        budget: opts.budget,
    }
}

fn item_rng(opts: &CampaignOptions, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn check_property(property: &str, l: &FiniteLattice, opts: &CampaignOptions) -> Outcome {
    let plain = |ok: bool| boolean(ok, Value::Null);
    match property {
        "atomistic" => plain(l.is_atomistic()),
        "sectionally-complemented" => plain(l.is_sectionally_complemented()),
        "relatively-complemented" => plain(l.is_relatively_complemented()),
        "modular" => plain(l.is_modular()),
        "distributive" => plain(l.is_distributive()),
        "property-c" => match property_c_failure(l) {
            None => holds(Value::Null),
            Some((a, b, c)) => fails(json!({ "a": a, "b": b, "c": c })),
        },
        "cong-splitting" => match congruence_splitting_failure(l) {
            None => holds(Value::Null),
            Some(inst) => fails(json!({
                "a": inst.a,
                "b": inst.b,
                "alpha0": inst.alpha0.blocks(),
                "alpha1": inst.alpha1.blocks(),
            })),
        },
        "urp" => {
            let con = con_lattice(l);
            match urp_failure(&con.as_semilattice(), opts.budget) {
                Ok(None) => holds(json!({ "con_size": con.len() })),
                Ok(Some(e)) => fails(json!({ "element": e, "congruence": con.get(e).blocks() })),
                Err(e) => from_urp_error(e),
            }
        }
        "con-distributive" => {
            let con = con_lattice(l);
            match check_refinement(&con.as_semilattice()) {
                Ok(_) => holds(json!({ "con_size": con.len() })),
                Err(eq) => fails(json!({ "equation": eq })),
            }
        }
        _ => unreachable!("property ids are validated first"),
    }
}

pub fn run_check(
    property: &str,
    items: &[CorpusItem],
    opts: &CampaignOptions,
) -> Result<CampaignReport, CampaignError> {
    if !PROPERTIES.contains(&property) {
        return Err(CampaignError::UnknownProperty(property.to_string()));
    }
    let rows = run_rows(items, |i| i.id.clone(), property, opts, |_, item| {
        check_property(property, &item.lattice, opts)
    });
    let notes = if property == "urp" {
        vec![URP_NOTE.to_string()]
    } else {
        Vec::new()
    };
    Ok(CampaignReport::new(parameters("check", property, items, opts), rows, notes))
}

fn not_applicable() -> Outcome {
    holds(json!({ "hypothesis": false }))
}

fn prop_a(l: &FiniteLattice) -> Outcome {
    if !(l.is_sectionally_complemented() || l.is_relatively_complemented()) {
        return not_applicable();
    }
    // one step suffices: a complement of a in [0, b] works for every c
    for a in l.elements() {
        for b in l.elements().filter(|&b| l.leq(a, b)) {
            for c in l.elements() {
                if rel_lessdot(l, a, b, c).is_none() {
                    return fails(json!({ "a": a, "b": b, "c": c }));
                }
            }
        }
    }
    holds(json!({ "hypothesis": true }))
}

fn prop_b(l: &FiniteLattice) -> Outcome {
    if !l.is_atomistic() {
        return not_applicable();
    }
    if let Some((a, b, c)) = property_c_failure(l) {
        return fails(json!({ "a": a, "b": b, "c": c }));
    }
    for a in l.elements() {
        for b in l.elements().filter(|&b| l.leq(a, b)) {
            let chain = atomistic_c_chain(l, a, b);
            if !chain.is_valid(l) || chain.elements.last() != Some(&b) {
                return fails(json!({ "a": a, "b": b, "chain": chain }));
            }
        }
    }
    holds(json!({ "hypothesis": true }))
}

/// Every instance `a ≤ b`, `α0 ∨ α1 = Θ(a, b)`.
fn split_instances(l: &FiniteLattice, con: &CongruenceLattice) -> Vec<SplitInstance> {
    let mut out = Vec::new();
    for a in l.elements() {
        for b in l.elements().filter(|&b| l.leq(a, b)) {
            let theta = con.principal(a, b);
            for i in 0..con.len() {
                for j in 0..con.len() {
                    if con.join(i, j) == theta {
                        out.push(SplitInstance {
                            a,
                            b,
                            alpha0: con.get(i).clone(),
                            alpha1: con.get(j).clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

fn prop_d(l: &FiniteLattice) -> Outcome {
    if property_c_failure(l).is_some() {
        return not_applicable();
    }
    if let Some(inst) = congruence_splitting_failure(l) {
        return fails(json!({ "not_splitting": [inst.a, inst.b] }));
    }
    let con = con_lattice(l);
    let instances = split_instances(l, &con);
    for inst in &instances {
        match splitting_from_property_c(l, inst) {
            Ok((x0, x1)) if inst.accepts(l, x0, x1) => {}
            Ok((x0, x1)) => return fails(json!({ "a": inst.a, "b": inst.b, "x0": x0, "x1": x1 })),
            Err(e) => return fails(json!({ "a": inst.a, "b": inst.b, "error": e.to_string() })),
        }
    }
    holds(json!({ "hypothesis": true, "instances": instances.len() }))
}

fn thm_csurp(l: &FiniteLattice) -> Outcome {
    if congruence_splitting_failure(l).is_some() {
        return not_applicable();
    }
    let con = con_lattice(l);
    let s = con.as_semilattice();
    let mut instances = 0;
    for u in l.elements() {
        for v in l.elements().filter(|&v| l.leq(u, v)) {
            let inst = canonical_instance(&s, con.principal(u, v));
            let checked = csurp_witness(l, &con, u, v, &inst)
                .map_err(|e| e.to_string())
                .and_then(|w| verify_urp_witness(&s, &inst, &w).map_err(|e| e.to_string()));
            if let Err(e) = checked {
                return fails(json!({ "u": u, "v": v, "error": e }));
            }
            instances += 1;
        }
    }
    holds(json!({ "hypothesis": true, "instances": instances }))
}

fn sample<T: Clone>(items: Vec<T>, count: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    if items.len() <= count {
        return items;
    }
    items.choose_multiple(rng, count).cloned().collect()
}

fn convex_homs<'a>(
    l: &'a FiniteLattice,
    targets: &'a [&'a FiniteLattice],
) -> Vec<LatticeHom<'a>> {
    let mut out = Vec::new();
    for &t in targets {
        for map in enumerate_homs(l, t) {
            let h = LatticeHom {
                source: l,
                target: t,
                map,
            };
            if h.has_convex_range() {
                out.push(h);
            }
        }
    }
    out
}

/// Checks the constructive split behind weak distributivity of the induced
/// map at every `Θ(u, v)` and every `β0 ∨ β1 = f(Θ(u, v))`.
pub fn check_convex_hom(h: &LatticeHom<'_>) -> Result<usize, Value> {
    let f = induced_con_map(h).map_err(|e| json!({ "error": e.to_string() }))?;
    if let Some(u) = f
        .hom
        .source()
        .elements()
        .find(|&u| weak_distributivity_at(&f.hom, u).is_err())
    {
        return Err(json!({ "map": h.map, "not_weakly_distributive_at": u }));
    }
    let (k, con_k, con_t) = (h.source, &f.source, &f.target);
    let mut checked = 0;
    for u in k.elements() {
        for v in k.elements().filter(|&v| k.leq(u, v)) {
            let alpha = con_k.principal(u, v);
            let image = f.apply(alpha);
            for b0 in 0..con_t.len() {
                for b1 in 0..con_t.len() {
                    if con_t.join(b0, b1) != image {
                        continue;
                    }
                    let (beta0, beta1) = (con_t.get(b0), con_t.get(b1));
                    let bad = |what: &str| json!({ "map": h.map, "u": u, "v": v, "beta": [b0, b1], "failed": what });
                    let split = convex_hom_split(h, u, v, beta0, beta1).map_err(|_| bad("split"))?;
                    if !split.target_chain.validate(h.target, h.apply(u), h.apply(v), &[beta0, beta1]) {
                        return Err(bad("target chain"));
                    }
                    let pulled = [pullback(h, beta0), pullback(h, beta1)];
                    if !split.source_chain.validate(k, u, v, &[&pulled[0], &pulled[1]]) {
                        return Err(bad("monotonized chain"));
                    }
                    let a0 = con_k.index_of(&split.alpha0).ok_or_else(|| bad("alpha0"))?;
                    let a1 = con_k.index_of(&split.alpha1).ok_or_else(|| bad("alpha1"))?;
                    if con_k.join(a0, a1) != alpha
                        || !con_t.leq(f.apply(a0), b0)
                        || !con_t.leq(f.apply(a1), b1)
                    {
                        return Err(bad("alpha bounds"));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

fn prop_convhom(l: &FiniteLattice, targets: &[&FiniteLattice], rng: &mut ChaCha8Rng) -> Outcome {
    let homs = sample(convex_homs(l, targets), HOM_SAMPLE, rng);
    let mut splits = 0;
    for h in &homs {
        match check_convex_hom(h) {
            Ok(n) => splits += n,
            Err(detail) => return fails(detail),
        }
    }
    holds(json!({ "homs": homs.len(), "splits": splits }))
}

/// Closure under join of the set where `f` is weakly distributive, with every
/// combined witness validated.
pub fn check_wd_join_closure(f: &SemilatticeHom) -> Result<usize, Value> {
    let refiner =
        check_refinement(f.target()).map_err(|eq| json!({ "target_not_distributive": eq }))?;
    let witnesses: Vec<_> = f
        .source()
        .elements()
        .filter_map(|u| weak_distributivity_at(f, u).ok())
        .collect();
    let mut checked = 0;
    for w1 in &witnesses {
        for w2 in &witnesses {
            let ok = wd_join_combine_with(f, &refiner, w1, w2)
                .map(|w| verify_wd_witness(f, &w))
                .unwrap_or(false);
            if !ok {
                return Err(json!({ "map": f.map(), "u": [w1.u, w2.u] }));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn lem_wdadd(l: &FiniteLattice, targets: &[&FiniteLattice], rng: &mut ChaCha8Rng) -> Outcome {
    let s = FiniteJoinSemilattice::from_lattice(l);
    let mut homs = Vec::new();
    for t in targets.iter().filter(|t| t.is_distributive()) {
        let t = FiniteJoinSemilattice::from_lattice(t);
        for map in enumerate_semilattice_homs(&s, &t) {
            homs.push((t.clone(), map));
        }
    }
    let homs = sample(homs, HOM_SAMPLE, rng);
    let mut combined = 0;
    for (t, map) in homs.iter() {
        let f = SemilatticeHom::new(s.clone(), t.clone(), map.clone()).expect("enumerated homs");
        match check_wd_join_closure(&f) {
            Ok(n) => combined += n,
            Err(detail) => return fails(detail),
        }
    }
    holds(json!({ "homs": homs.len(), "combined": combined }))
}

fn family(s: &FiniteJoinSemilattice, e: usize, rng: &mut ChaCha8Rng) -> UrpInstance {
    let full = canonical_instance(s, e);
    let pairs: Vec<(usize, usize)> = full.a.iter().copied().zip(full.b.iter().copied()).collect();
    let pairs = sample(pairs, FAMILY_SAMPLE, rng);
    UrpInstance {
        e,
        a: pairs.iter().map(|p| p.0).collect(),
        b: pairs.iter().map(|p| p.1).collect(),
    }
}

fn prop_urpadd(l: &FiniteLattice, budget: u64, rng: &mut ChaCha8Rng) -> Outcome {
    let s = con_lattice(l).as_semilattice();
    let refiner = match check_refinement(&s) {
        Ok(r) => r,
        Err(eq) => return fails(json!({ "con_not_distributive": eq })),
    };
    let mut combined = 0;
    for e0 in s.elements() {
        for e1 in s.elements() {
            let inst = family(&s, s.join(e0, e1), rng);
            let step = || -> Result<(), UrpError> {
                let (i0, i1) = decompose_instance(&refiner, &inst, e0, e1)?;
                let w0 = search_urp_witness(&s, &i0, budget)?.ok_or(UrpError::NoSourceWitness)?;
                let w1 = search_urp_witness(&s, &i1, budget)?.ok_or(UrpError::NoSourceWitness)?;
                let w = urp_join_combine(&s, &inst, (&i0, &w0), (&i1, &w1))?;
                verify_urp_witness(&s, &inst, &w).map_err(UrpError::InvalidInputWitness)
            };
            if let Err(e) = step() {
                let mut out = from_urp_error(e);
                if out.verdict == Verdict::Fails {
                    out.detail = json!({ "e0": e0, "e1": e1, "error": out.detail });
                }
                return out;
            }
            combined += 1;
        }
    }
    holds(json!({ "combined": combined }))
}

fn prop_urpclwd(
    l: &FiniteLattice,
    targets: &[&FiniteLattice],
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Outcome {
    let homs = sample(convex_homs(l, targets), HOM_SAMPLE, rng);
    let mut transferred = 0;
    for h in &homs {
        let f = match induced_con_map(h) {
            Ok(f) => f,
            Err(e) => return fails(json!({ "map": h.map, "error": e.to_string() })),
        };
        let t = f.hom.target();
        for u in f.hom.source().elements() {
            let inst = family(t, f.apply(u), rng);
            let result = urp_transfer(&f.hom, u, &inst, budget)
                .and_then(|w| verify_urp_witness(t, &inst, &w).map_err(UrpError::InvalidInputWitness));
            if let Err(e) = result {
                let mut out = from_urp_error(e);
                if out.verdict == Verdict::Fails {
                    out.detail = json!({ "map": h.map, "u": u, "error": out.detail });
                }
                return out;
            }
            transferred += 1;
        }
    }
    holds(json!({ "homs": homs.len(), "transfers": transferred }))
}

pub fn run_lattice_theorem(
    theorem: &str,
    items: &[CorpusItem],
    opts: &CampaignOptions,
) -> Result<CampaignReport, CampaignError> {
    if !LATTICE_THEOREMS.contains(&theorem) {
        return Err(CampaignError::UnknownTheorem(theorem.to_string()));
    }
    let targets: Vec<&FiniteLattice> = items
        .iter()
        .map(|i| &i.lattice)
        .filter(|l| l.size() <= TARGET_MAX_SIZE)
        .collect();
    let rows = run_rows(items, |i| i.id.clone(), theorem, opts, |index, item| {
        let l = &item.lattice;
        let mut rng = item_rng(opts, index);
        match theorem {
            "prop-a" => prop_a(l),
            "prop-b" => prop_b(l),
            "prop-d" => prop_d(l),
            "thm-csurp" => thm_csurp(l),
            "prop-convhom" => prop_convhom(l, &targets, &mut rng),
            "lem-wdadd" => lem_wdadd(l, &targets, &mut rng),
            "prop-urpadd" => prop_urpadd(l, opts.budget, &mut rng),
            "prop-urpclwd" => prop_urpclwd(l, &targets, opts.budget, &mut rng),
            _ => unreachable!(),
        }
    });
    let notes = if theorem == "thm-csurp" {
        vec![URP_NOTE.to_string()]
    } else {
        Vec::new()
    };
    Ok(CampaignReport::new(
        parameters("verify-theorem", theorem, items, opts),
        rows,
        notes,
    ))
}

fn ring_parameters(command: &str, id: &str, rings: usize, opts: &CampaignOptions) -> Parameters {
    Parameters {
        command: command.to_string(),
        id: id.to_string(),
        items: rings,
        max_item_size: 0,
        seed: opts.seed,
        budget: opts.budget,
    }
}

fn ring_check(theorem: &str, rs: &RingStructure) -> Result<Outcome, RingError> {
    Ok(match theorem {
        "ring-nid-id" => boolean(rs.verify_nid_id_iso()?, json!({ "ideals": rs.two_sided.ideals.len() })),
        "ring-conc-idc" => boolean(rs.conc_idc_iso()?, json!({ "ideals": rs.two_sided.ideals.len() })),
        "ring-pi" => {
            let vm = rs.v_monoid()?;
            let report = rs.verify_pi(&vm);
            let universal = check_support_universal_property(vm.k, vm.bound())?;
            boolean(
                report.all() && universal,
                json!({ "k": vm.k, "pi": report, "support_universal": universal }),
            )
        }
        _ => unreachable!(),
    })
}

/// A ring with the label used as its row id.
#[derive(Clone, Debug)]
pub struct RingItem {
    pub label: String,
    pub ring: FiniteRing,
}

impl RingItem {
    pub fn parse(spec: &str) -> Result<Self, RingError> {
        Ok(RingItem {
            label: spec.to_string(),
            ring: FiniteRing::parse(spec)?,
        })
    }

    pub fn default_rings() -> Vec<RingItem> {
        DEFAULT_TEST_RINGS
            .iter()
            .map(|s| RingItem::parse(s).expect("shipped ring specs parse"))
            .collect()
    }
}

/// Ring theorems; each ring is one row.
pub fn run_ring_theorem(
    theorem: &str,
    rings: &[RingItem],
    opts: &CampaignOptions,
) -> Result<CampaignReport, CampaignError> {
    if !RING_THEOREMS.contains(&theorem) {
        return Err(CampaignError::UnknownTheorem(theorem.to_string()));
    }
    let rows = run_rows(rings, |r| r.label.clone(), theorem, opts, |_, item| {
        if let Some(x) = regularity_failure(&item.ring) {
            return fails(json!({ "not_regular_at": x }));
        }
        RingStructure::new(item.ring.clone())
            .and_then(|rs| ring_check(theorem, &rs))
            .unwrap_or_else(|e| fails(json!({ "error": e.to_string() })))
    });
    Ok(CampaignReport::new(
        ring_parameters("verify-theorem", theorem, rings.len(), opts),
        rows,
        Vec::new(),
    ))
}

/// Every ring-side check on one ring, plus a summary row describing L(R),
/// Id R and the rank of V(R).
pub fn run_ring_pipeline(item: &RingItem, opts: &CampaignOptions) -> Result<CampaignReport, CampaignError> {
    let ring = item.ring.clone();
    let mut rows = Vec::new();
    let mut push = |property: &str, outcome: Outcome| {
        rows.push(Row {
            item_id: item.label.clone(),
            property_id: property.to_string(),
            verdict: outcome.verdict,
            detail: outcome.detail,
            elapsed_ms: None,
        })
    };
    push("regular", boolean(is_regular(&ring), json!({ "size": ring.size() })));
    if is_regular(&ring) {
        let rs = RingStructure::new(ring)?;
        let l = &rs.right.lattice;
        let vm = rs.v_monoid()?;
        let m3 = canonical_form(l) == canonical_form(&FiniteLattice::diamond(3));
        push(
            "structure",
            holds(json!({
                "ring_size": rs.ring.size(),
                "principal_right_ideals": l.size(),
                "principal_right_ideals_code": canonical_form(l).to_string(),
                "principal_right_ideals_is_m3": m3,
                "two_sided_ideals": rs.two_sided.ideals.len(),
                "two_sided_ideals_code": canonical_form(&rs.two_sided.lattice).to_string(),
                "v_rank": vm.k,
            })),
        );
        push(
            "complemented-modular",
            boolean(l.is_complemented() && l.is_modular(), Value::Null),
        );
        push("nid-id", boolean(rs.verify_nid_id_iso()?, Value::Null));
        push("neutral-iso-closed", boolean(rs.neutral_iff_iso_closed(), Value::Null));
        push("conc-idc", boolean(rs.conc_idc_iso()?, Value::Null));
        let pi = rs.verify_pi(&vm);
        push("pi", boolean(pi.all(), json!(pi)));
        push(
            "support-quotient",
            boolean(check_support_universal_property(vm.k, vm.bound())?, Value::Null),
        );
    }
    Ok(CampaignReport::new(
        ring_parameters("ring", &item.label, 1, opts),
        rows,
        Vec::new(),
    ))
}
