//! Randomized law suites: each runs a checker over freshly generated
//! instances and reports the first counterexample.

use crate::error::{Error, Result, Verdict};
use crate::gen::Gen;
use crate::queries::{
    check_universal, coproduct_tables, join_opspan, limit_diagram, JoinOptions, TableDiagram, UniversalBound,
    UniversalClaim,
};
use crate::relations::{check_galois, check_reflection, image_of_table, include_relation, reflection_unit, Relation};
use crate::sets::{compose, ClassNaming, FinFunction, FinSet};
use crate::signatures::{
    counit_signature, fiber_arity_maps, substitute_along, substitute_morphism, sum_along, transpose_signature,
    unit_signature, SigTranspose, Signature, SignatureMorphism,
};
use crate::tables::{
    acute_tbl, check_grothendieck_composition, check_sigma_factorization, check_table_fiber_adjunction,
    compose_table_morphisms, grave_tbl, sigma_table, CanonicalPassages, Table, TableMorphism, TablePassages,
};
use crate::tuples::{
    check_continuity, check_factorizations, check_levo_dextro_iso, tuple_map, SignedDomain, SignedDomainMorphism,
};
use crate::typedomains::{Infomorphism, TypeDomain};

/// Result of running one suite: the first counterexample, if any, and how
/// many deliberately broken inputs were correctly rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub verdict: Verdict<String>,
    pub controls: usize,
}

impl Outcome {
    fn pass(controls: usize) -> Result<Outcome> {
        Ok(Outcome {
            verdict: Verdict::Accept,
            controls,
        })
    }
}

/// Outcome of one law suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport {
    pub name: &'static str,
    pub instances: usize,
    pub verdict: Verdict<String>,
    pub controls: usize,
}

const CAP: u128 = 1 << 16;

fn reject(name: &str, n: usize, msg: impl std::fmt::Display) -> Result<Outcome> {
    Ok(Outcome {
        verdict: Verdict::Reject(format!("{name} instance {n}: {msg}")),
        controls: 0,
    })
}

fn random_sorts(g: &mut Gen, prefix: &str, max: usize) -> FinSet {
    let n = 1 + g.below(max);
    Gen::names(prefix, n)
}

fn random_domain(g: &mut Gen, sorts: &FinSet, base: usize, spread: usize) -> TypeDomain {
    let values = base + g.below(spread);
    g.domain(sorts, values, 0.7)
}

fn random_sdm(
    g: &mut Gen,
    d1: &SignedDomain,
    max_sorts: usize,
    max_extra: usize,
    prefix: &str,
) -> SignedDomainMorphism {
    let sorts2 = 1 + g.below(max_sorts);
    let extra = g.upto(max_extra);
    g.signed_domain_morphism_into(d1, sorts2, extra, 3, prefix)
}

fn extra_attrs(g: &mut Gen, sorts: &FinSet, prefix: &str) -> Vec<(String, String)> {
    (1..=g.upto(1))
        .map(|k| (format!("{prefix}{k}"), sorts.get(g.below(sorts.len())).to_string()))
        .collect()
}

/// Transposition across `Σ_f ⊣ f*` is a bijection of hom-sets and the
/// triangle identities hold.
pub fn signature_adjunction(g: &mut Gen, count: usize) -> Result<Outcome> {
    for n in 0..count {
        let x1 = random_sorts(g, "x", 3);
        let x2 = random_sorts(g, "z", 3);
        let f = g.function(&x2, &x1).expect("nonempty target");
        let s1 = g.signature(&x1, 0, 4, "a");
        let s2 = g.signature(&x2, 0, 4, "b");
        let (pulled, _) = substitute_along(&f, &s1)?;
        let sums = fiber_arity_maps(&sum_along(&f, &s2)?, &s1);
        let pulls = fiber_arity_maps(&s2, &pulled);
        if sums.len() != pulls.len() {
            return reject(
                "signature adjunction",
                n,
                format!("{} against {} morphisms", sums.len(), pulls.len()),
            );
        }
        for h in &sums {
            let there = transpose_signature(&f, &s2, &s1, &SigTranspose::Sum(h.clone()))?;
            let SigTranspose::Pullback(hat) = &there else {
                unreachable!()
            };
            if !pulls.contains(hat) || transpose_signature(&f, &s2, &s1, &there)? != SigTranspose::Sum(h.clone()) {
                return reject("signature adjunction", n, "transpose does not round-trip");
            }
        }
        for hat in &pulls {
            let there = transpose_signature(&f, &s2, &s1, &SigTranspose::Pullback(hat.clone()))?;
            if transpose_signature(&f, &s2, &s1, &there)? != SigTranspose::Pullback(hat.clone()) {
                return reject("signature adjunction", n, "transpose does not round-trip");
            }
        }
        let unit = unit_signature(&f, &s2)?;
        let counit = counit_signature(&f, &sum_along(&f, &s2)?)?;
        if !compose(unit.arity_map(), counit.arity_map())?.is_identity() {
            return reject(
                "signature adjunction",
                n,
                "counit after pushed unit is not the identity",
            );
        }
        let unit_pulled = unit_signature(&f, &pulled)?;
        let pulled_counit = substitute_morphism(&f, &counit_signature(&f, &s1)?)?;
        if !compose(unit_pulled.arity_map(), pulled_counit.arity_map())?.is_identity() {
            return reject(
                "signature adjunction",
                n,
                "pulled counit after unit is not the identity",
            );
        }
    }
    Outcome::pass(0)
}

fn small_signed_domain(g: &mut Gen, max_sorts: usize, max_values: usize, max_arity: usize) -> SignedDomain {
    let sorts = random_sorts(g, "x", max_sorts);
    let values = 2 + g.below(max_values - 1);
    let a = g.domain(&sorts, values, 0.75);
    let s = g.signature(&sorts, 1, max_arity, "a");
    SignedDomain::new(s, a).expect("same sorts")
}

/// The tuple map preserves identities and reverses composition.
pub fn tuple_functoriality(g: &mut Gen, count: usize) -> Result<Outcome> {
    for n in 0..count {
        let d1 = small_signed_domain(g, 3, 5, 3);
        let m2 = random_sdm(g, &d1, 3, 2, "b");
        let m1 = random_sdm(g, m2.source(), 3, 2, "c");
        let both = m1.then(&m2)?;
        let id = SignedDomainMorphism::identity(&d1);
        for t in d1.tuple_set().enumerate(1000)? {
            if tuple_map(&id, &t)? != t {
                return reject("tuple functoriality", n, "identity moves a tuple");
            }
            if tuple_map(&both, &t)? != tuple_map(&m1, &tuple_map(&m2, &t)?)? {
                return reject(
                    "tuple functoriality",
                    n,
                    format!("composite differs at {}", t.canonical()),
                );
            }
        }
    }
    Outcome::pass(0)
}

/// The tuple map equals its signature, levo and dextro factorizations.
pub fn factorizations(g: &mut Gen, count: usize) -> Result<Outcome> {
    for n in 0..count {
        let d1 = small_signed_domain(g, 3, 4, 3);
        let m = random_sdm(g, &d1, 3, 2, "b");
        if let Verdict::Reject(w) = check_factorizations(&m, 4096)? {
            return reject(
                "factorization",
                n,
                format!("{} route at {}", w.route, w.input.canonical()),
            );
        }
    }
    Outcome::pass(0)
}

fn small_infomorphism(g: &mut Gen, max_sorts: usize, max_values: usize) -> Infomorphism {
    let sorts = random_sorts(g, "x", max_sorts);
    let values = 2 + g.below(max_values - 1);
    let a1 = g.domain(&sorts, values, 0.75);
    let sorts2 = 1 + g.below(max_sorts);
    let extra = g.upto(2);
    g.infomorphism_into(&a1, sorts2, extra)
}

/// The levo and dextro bridges are related by the unit and counit.
pub fn levo_dextro(g: &mut Gen, count: usize) -> Result<Outcome> {
    for n in 0..count {
        let im = small_infomorphism(g, 3, 4);
        if let Verdict::Reject(w) = check_levo_dextro_iso(&im, 3, 4096)? {
            return reject("levo/dextro", n, format!("{} at {}", w.route, w.input.canonical()));
        }
    }
    Outcome::pass(0)
}

/// Acute passage that silently drops the first key of every table.
#[derive(Debug, Clone, Copy, Default)]
pub struct DroppingPassages;

impl TablePassages for DroppingPassages {
    fn acute(&self, im: &Infomorphism, t: &Table) -> Result<Table> {
        let a = acute_tbl(im, t)?;
        Ok(Table::unchecked(
            a.domain().clone(),
            a.rows().skip(1).map(|(k, r)| (k.to_string(), r.clone())),
        ))
    }

    fn grave(&self, im: &Infomorphism, t: &Table, cap: u128) -> Result<Table> {
        grave_tbl(im, t, cap)
    }
}

fn tables_over(g: &mut Gen, a: &TypeDomain, count: usize, min_keys: usize, prefix: &str) -> Vec<Table> {
    (0..count)
        .map(|_| {
            let s = g.signature(a.sorts(), 0, 2, prefix);
            let d = SignedDomain::new(s, a.clone()).expect("same sorts");
            g.table(&d, min_keys, 4, "k")
        })
        .collect()
}

/// Acute and grave table passages are adjoint; an impostor acute is rejected.
pub fn table_fiber_adjunction(g: &mut Gen, count: usize) -> Result<Outcome> {
    let mut controls = 0;
    for n in 0..count {
        let im = small_infomorphism(g, 2, 3);
        let t1 = tables_over(g, im.target(), 2, 1, "a");
        let t2 = tables_over(g, im.source(), 2, 0, "b");
        if let Verdict::Reject(w) = check_table_fiber_adjunction(&im, &CanonicalPassages, &t1, &t2, CAP)? {
            return reject("table fiber adjunction", n, w);
        }
        if t1.iter().any(|t| !t.is_empty()) {
            controls += 1;
            if check_table_fiber_adjunction(&im, &DroppingPassages, &t1, &t2, CAP)?.is_accept() {
                return reject("table fiber adjunction", n, "impostor passage accepted");
            }
        }
    }
    Outcome::pass(controls)
}

/// Pushing tables forward is functorial and factors through the bridges.
pub fn grothendieck(g: &mut Gen, count: usize) -> Result<Outcome> {
    for n in 0..count {
        let d1 = small_signed_domain(g, 2, 3, 3);
        let t1 = g.table(&d1, 0, 4, "k");
        let m = random_sdm(g, &d1, 2, 1, "b");
        let t2 = sigma_table(&m, &t1)?;
        let m1 = TableMorphism::new(t1.clone(), t2.clone(), m.clone(), FinFunction::identity(t1.keys()))?;
        let mm = random_sdm(g, m.source(), 2, 1, "c");
        let t3 = sigma_table(&mm, &t2)?;
        let m2 = TableMorphism::new(t2.clone(), t3, mm, FinFunction::identity(t2.keys()))?;
        if let Verdict::Reject(w) = check_grothendieck_composition(&m1, &m2)? {
            return reject("grothendieck", n, w);
        }
        if let Verdict::Reject(w) = check_sigma_factorization(&m, &t1)? {
            return reject("grothendieck", n, format!("pushforward does not factor at key {w}"));
        }
        let id = TableMorphism::identity(&t1);
        if compose_table_morphisms(&id, &m1)? != m1
            || compose_table_morphisms(&m1, &TableMorphism::identity(&t2))? != m1
        {
            return reject("grothendieck", n, "identity is not neutral");
        }
    }
    Outcome::pass(0)
}

/// One random opspan of tables over a small domain, `T₁ → T ← T₂`.
pub fn random_opspan(g: &mut Gen, max_keys: usize) -> (TableMorphism, TableMorphism) {
    let sorts = random_sorts(g, "x", 2);
    let a = random_domain(g, &sorts, 2, 2);
    let s = g.signature(&sorts, 0, 2, "c");
    let d = SignedDomain::new(s, a).expect("same sorts");
    let t = g.table(&d, 0, max_keys, "t");
    let p = extra_attrs(g, &sorts, "p");
    let q = extra_attrs(g, &sorts, "q");
    let m1 = g.extension(&t, &p, max_keys, "x");
    let m2 = g.extension(&t, &q, max_keys, "y");
    (m1, m2)
}

fn perturbed_leg(legs: &[TableMorphism]) -> Option<Vec<TableMorphism>> {
    for (n, leg) in legs.iter().enumerate() {
        if leg.source().is_empty() || leg.target().len() < 2 {
            continue;
        }
        let mut images = leg.key_map().indices().to_vec();
        images[0] = (images[0] + 1) % leg.target().len();
        let k = FinFunction::from_indices(leg.source().keys().clone(), leg.target().keys().clone(), images).ok()?;
        let bad = TableMorphism::unchecked(
            leg.source().clone(),
            leg.target().clone(),
            leg.domain_morphism().clone(),
            k,
        )
        .ok()?;
        let mut out = legs.to_vec();
        out[n] = bad;
        return Some(out);
    }
    None
}

/// The apex with its first key duplicated, and the legs extended to match.
fn duplicated_apex(apex: &Table, legs: &[TableMorphism]) -> Option<(Table, Vec<TableMorphism>)> {
    let (first, row) = apex.rows().next()?;
    let copy = format!("{first}'");
    let rows = apex
        .rows()
        .map(|(k, r)| (k.to_string(), r.clone()))
        .chain([(copy.clone(), row.clone())]);
    let bigger = Table::unchecked(apex.domain().clone(), rows);
    let legs = legs
        .iter()
        .map(|leg| {
            let k = FinFunction::from_fn(bigger.keys().clone(), leg.target().keys().clone(), |x| {
                let orig = if x == copy { first } else { x };
                leg.key(orig).expect("total").to_string()
            })
            .ok()?;
            TableMorphism::unchecked(bigger.clone(), leg.target().clone(), leg.domain_morphism().clone(), k).ok()
        })
        .collect::<Option<Vec<_>>>()?;
    Some((bigger, legs))
}

/// Joins, limits and unions are universal; perturbed cones are rejected.
pub fn universal(g: &mut Gen, count: usize, bound: &UniversalBound) -> Result<Outcome> {
    let mut controls = 0;
    for n in 0..count {
        let (m1, m2) = random_opspan(g, 3);
        let join = join_opspan(&m1, &m2, &JoinOptions::default())?;
        let diagram = TableDiagram::opspan(&m1, &m2)?;
        let middle = compose_table_morphisms(&join.left, &m1)?;
        let join_legs = vec![join.left.clone(), middle, join.right.clone()];
        let claim = UniversalClaim::Limit {
            diagram: &diagram,
            apex: &join.table,
            legs: &join_legs,
        };
        if let Verdict::Reject(w) = check_universal(claim, bound)? {
            return reject("universal (join)", n, w);
        }
        let limit = limit_diagram(&diagram, ClassNaming::Representative, CAP)?;
        let claim = UniversalClaim::Limit {
            diagram: &diagram,
            apex: &limit.table,
            legs: &limit.legs,
        };
        if let Verdict::Reject(w) = check_universal(claim, bound)? {
            return reject("universal (limit)", n, w);
        }
        if !limit.table.is_isomorphic(&join.table) {
            return reject("universal (limit)", n, "limit of the opspan differs from the join");
        }
        if let Some(bad) = perturbed_leg(&limit.legs) {
            controls += 1;
            let claim = UniversalClaim::Limit {
                diagram: &diagram,
                apex: &limit.table,
                legs: &bad,
            };
            if check_universal(claim, bound)?.is_accept() {
                return reject("universal (limit)", n, "perturbed cone accepted");
            }
        }
        if let Some((apex, legs)) = duplicated_apex(&limit.table, &limit.legs) {
            controls += 1;
            let claim = UniversalClaim::Limit {
                diagram: &diagram,
                apex: &apex,
                legs: &legs,
            };
            if check_universal(claim, bound)?.is_accept() {
                return reject("universal (limit)", n, "duplicated apex accepted");
            }
        }

        let d = m1.target().domain().clone();
        let tables = vec![g.table(&d, 0, 3, "a"), g.table(&d, 0, 3, "b")];
        let union = coproduct_tables(&d, &tables)?;
        let claim = UniversalClaim::Coproduct {
            domain: &d,
            tables: &tables,
            apex: &union.table,
            injections: &union.injections,
        };
        if let Verdict::Reject(w) = check_universal(claim, bound)? {
            return reject("universal (union)", n, w);
        }
        // a competitor holding two copies of the duplicated row must fit the bound
        let distinct: std::collections::BTreeSet<String> = union.table.rows().map(|(_, r)| r.canonical()).collect();
        let dup = duplicated_apex(&union.table, &[]).filter(|_| distinct.len() < bound.max_keys);
        if let Some((apex, _)) = dup {
            controls += 1;
            let injections = union
                .injections
                .iter()
                .map(|inj| {
                    let k = inj.key_map().retarget(apex.keys())?;
                    TableMorphism::in_fiber(inj.source().clone(), apex.clone(), inj.arity_map().clone(), k)
                })
                .collect::<Result<Vec<_>>>()?;
            let claim = UniversalClaim::Coproduct {
                domain: &d,
                tables: &tables,
                apex: &apex,
                injections: &injections,
            };
            if check_universal(claim, bound)?.is_accept() {
                return reject("universal (union)", n, "duplicated apex accepted");
            }
        }
    }
    Outcome::pass(controls)
}

/// A unit that lands in a strictly larger included relation.
pub fn inflated_unit(t: &Table) -> Result<TableMorphism> {
    let image = image_of_table(t);
    let extra = t
        .domain()
        .tuple_set()
        .iter()
        .find(|u| !image.contains(u))
        .ok_or(Error::IllegalTuple("every tuple is already in the image".into()))?;
    let bigger = Relation::new(t.domain().clone(), image.members().cloned().chain([extra]))?;
    let inc = include_relation(&bigger);
    let k = reflection_unit(t)?.key_map().retarget(inc.keys())?;
    TableMorphism::in_fiber(t.clone(), inc, FinFunction::identity(t.signature().arity()), k)
}

/// Image is reflective: units are surjective and hom-sets correspond.
pub fn reflection(g: &mut Gen, count: usize) -> Result<Outcome> {
    let mut controls = 0;
    for n in 0..count {
        let sorts = random_sorts(g, "x", 2);
        let a = random_domain(g, &sorts, 2, 2);
        let mut tables = Vec::new();
        let mut relations = Vec::new();
        for k in 0..2 {
            let s = g.signature(&sorts, 0, 2, &format!("a{k}_"));
            let d = SignedDomain::new(s, a.clone())?;
            tables.push(g.table(&d, 0, 4, "k"));
            let all = d.tuple_set().enumerate(12)?;
            relations.push(Relation::new(d.clone(), g.subset(&all))?);
            relations.push(Relation::new(d, all)?);
        }
        if let Verdict::Reject(w) = check_reflection(&tables, &relations, &reflection_unit)? {
            return reject("reflection", n, w);
        }
        for t in &tables {
            if inflated_unit(t).is_ok() {
                controls += 1;
                if check_reflection(std::slice::from_ref(t), &[], &inflated_unit)?.is_accept() {
                    return reject("reflection", n, "non-surjective unit accepted");
                }
            }
        }
    }
    Outcome::pass(controls)
}

/// A random span `I₁ ← I → I₂` over `sorts`.
pub fn random_span(g: &mut Gen, sorts: &FinSet) -> (Signature, (Signature, FinFunction), (Signature, FinFunction)) {
    let s1 = g.signature(sorts, 1, 3, "p");
    let mut s2_attrs: Vec<(String, String)> = g
        .signature(sorts, 0, 2, "q")
        .attributes()
        .map(|(a, s)| (a.to_string(), s.to_string()))
        .collect();
    let mut shared = Vec::new();
    let mut h1 = Vec::new();
    let mut h2 = Vec::new();
    for k in 1..=g.upto(2) {
        let target = s1.arity().get(g.below(s1.arity().len())).to_string();
        let sort = s1.sort_of(&target).expect("typed").to_string();
        let name = format!("c{k}");
        shared.push((name.clone(), sort.clone()));
        h1.push((name.clone(), target));
        let same: Vec<String> = s2_attrs
            .iter()
            .filter(|(_, s)| *s == sort)
            .map(|(a, _)| a.clone())
            .collect();
        let there = if same.is_empty() || g.chance(0.3) {
            let fresh = format!("r{k}");
            s2_attrs.push((fresh.clone(), sort));
            fresh
        } else {
            same[g.below(same.len())].clone()
        };
        h2.push((name, there));
    }
    let shared = Signature::new(sorts.clone(), shared).expect("sorts");
    let s2 = Signature::new(sorts.clone(), s2_attrs).expect("sorts");
    let h1 = FinFunction::from_pairs(shared.arity().clone(), s1.arity().clone(), h1).expect("total");
    let h2 = FinFunction::from_pairs(shared.arity().clone(), s2.arity().clone(), h2).expect("total");
    (shared, (s1, h1), (s2, h2))
}

/// Tuples over a pushout signature are exactly the matching pairs of tuples.
pub fn continuity(g: &mut Gen, count: usize) -> Result<Outcome> {
    for n in 0..count {
        let sorts = random_sorts(g, "x", 2);
        let a = random_domain(g, &sorts, 2, 2);
        let (shared, left, right) = random_span(g, &sorts);
        if let Verdict::Reject(w) = check_continuity(&shared, (&left.0, &left.1), (&right.0, &right.1), &a, 1000)? {
            return reject("continuity", n, w);
        }
    }
    Outcome::pass(0)
}

/// A random restriction `h: S' → S` with both tuple sets of size at most 12.
pub fn random_restriction(g: &mut Gen) -> (SignatureMorphism, TypeDomain) {
    loop {
        let sorts = random_sorts(g, "x", 2);
        let a = random_domain(g, &sorts, 1, 3);
        let s = g.signature(&sorts, 0, 2, "a");
        let s2 = g.signature(&sorts, 0, 2, "b");
        let size = |sig: &Signature| {
            SignedDomain::new(sig.clone(), a.clone())
                .expect("sorts")
                .tuple_set()
                .cardinality()
        };
        if size(&s) > 12 || size(&s2) > 12 {
            continue;
        }
        let maps = fiber_arity_maps(&s2, &s);
        if maps.is_empty() {
            continue;
        }
        let h = maps[g.below(maps.len())].clone();
        return (SignatureMorphism::in_fiber(s2, s, h).expect("typing preserved"), a);
    }
}

/// Image, preimage and universal image form adjoint Galois connections.
pub fn galois(g: &mut Gen, count: usize) -> Result<Outcome> {
    for n in 0..count {
        let (h, a) = random_restriction(g);
        if let Verdict::Reject(w) = check_galois(&h, &a, 12)? {
            return reject("galois", n, w);
        }
    }
    Outcome::pass(0)
}

/// Runs every suite with `count` instances each from `seed`.
pub fn run_all(seed: u64, count: usize) -> Result<Vec<LawReport>> {
    let mut g = Gen::new(seed);
    let bound = UniversalBound::default();
    let mut reports = Vec::new();
    let mut run = |name: &'static str, outcome: Result<Outcome>| -> Result<()> {
        let Outcome { verdict, controls } = outcome?;
        reports.push(LawReport {
            name,
            instances: count,
            verdict,
            controls,
        });
        Ok(())
    };
    run("signature adjunction", signature_adjunction(&mut g, count))?;
    run("tuple functoriality", tuple_functoriality(&mut g, count))?;
    run("tuple factorizations", factorizations(&mut g, count))?;
    run("levo/dextro isomorphism", levo_dextro(&mut g, count))?;
    run("table fiber adjunction", table_fiber_adjunction(&mut g, count))?;
    run("table passages compose", grothendieck(&mut g, count))?;
    run("universal properties", universal(&mut g, count, &bound))?;
    run("image reflection", reflection(&mut g, count))?;
    run("continuity", continuity(&mut g, count))?;
    run("galois connections", galois(&mut g, count))?;
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_on_a_few_instances() {
        for report in run_all(7, 5).unwrap() {
            assert!(report.verdict.is_accept(), "{}: {:?}", report.name, report.verdict);
        }
    }
}
