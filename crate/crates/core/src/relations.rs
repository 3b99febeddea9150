//! Relations (duplicate-free sets of legal tuples), the three fiber maps
//! along a restriction of attributes, and the image/inclusion reflection
//! between tables and relations.

use std::collections::BTreeMap;

use crate::error::{Error, Result, Verdict};
use crate::sets::{image_factorize, FinFunction};
use crate::signatures::{fiber_arity_maps, SignatureMorphism};
use crate::tables::{compose_table_morphisms, validate_table_morphism, Table, TableMorphism};
use crate::tuples::{SignedDomain, Tuple, TupleSet};

/// A set of legal tuples of one signed domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    domain: SignedDomain,
    // members by canonical serialization
    members: BTreeMap<String, Tuple>,
}

impl Relation {
    pub fn new<I: IntoIterator<Item = Tuple>>(domain: SignedDomain, members: I) -> Result<Self> {
        let mut out = Relation::empty(domain);
        for t in members {
            out.domain.check_tuple(&t)?;
            out.members.insert(t.canonical(), t);
        }
        Ok(out)
    }

    pub fn empty(domain: SignedDomain) -> Self {
        Relation {
            domain,
            members: BTreeMap::new(),
        }
    }

    /// Every legal tuple.
    pub fn full(domain: SignedDomain, cap: u128) -> Result<Self> {
        let all = domain.tuple_set().enumerate(cap)?;
        Relation::new(domain, all)
    }

    pub fn domain(&self) -> &SignedDomain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        self.members.contains_key(&t.canonical())
    }

    /// Members in canonical serialization order.
    pub fn members(&self) -> impl Iterator<Item = &Tuple> + '_ {
        self.members.values()
    }

    /// Members with their canonical serialization.
    pub fn serialized(&self) -> impl Iterator<Item = (&str, &Tuple)> + '_ {
        self.members.iter().map(|(k, t)| (k.as_str(), t))
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.members.keys().all(|k| other.members.contains_key(k))
    }
}

fn restricted_domain(h: &SignatureMorphism, r: &Relation, side: &str) -> Result<SignedDomain> {
    if !h.is_fiber() {
        return Err(Error::BoundaryMismatch(
            "expected a restriction with identity sort map".into(),
        ));
    }
    let sig = if side == "target" { h.target() } else { h.source() };
    if r.domain.signature() != sig {
        return Err(Error::BoundaryMismatch(format!(
            "relation is not over the {side} of the restriction"
        )));
    }
    let other = if side == "target" { h.source() } else { h.target() };
    SignedDomain::new(other.clone(), r.domain.domain().clone())
}

/// Direct image of `r` (over the target `S` of `h: S' → S`) under `t ↦ h·t`.
pub fn exists_along(h: &SignatureMorphism, r: &Relation) -> Result<Relation> {
    let domain = restricted_domain(h, r, "target")?;
    let images = r
        .members()
        .map(|t| t.precompose(h.arity_map()))
        .collect::<Result<Vec<_>>>()?;
    Relation::new(domain, images)
}

/// The tuples `t` of `domain` (over the target of `h`) with `h·t = t'`.
pub fn restriction_preimages(h: &FinFunction, domain: &SignedDomain, image: &Tuple, cap: u128) -> Result<Vec<Tuple>> {
    let mut choices = BTreeMap::new();
    for (i, x) in domain.signature().attributes() {
        let extent = domain.domain().extent(x)?;
        let mut wanted = h.preimage(i).into_iter().map(|j| image.get(j));
        let allowed = match wanted.next() {
            None => extent.iter().map(str::to_string).collect(),
            Some(first) => {
                let consistent = wanted.all(|v| v == first);
                match first {
                    Some(v) if consistent && extent.contains(v) => [v.to_string()].into(),
                    _ => Default::default(),
                }
            }
        };
        choices.insert(i.to_string(), allowed);
    }
    TupleSet::from_choices(choices).enumerate(cap)
}

/// Preimage of `r` (over the source `S'` of `h`) under `t ↦ h·t`.
pub fn inverse_along(h: &SignatureMorphism, r: &Relation, cap: u128) -> Result<Relation> {
    let domain = restricted_domain(h, r, "source")?;
    let mut members = Vec::new();
    for t in r.members() {
        members.extend(restriction_preimages(h.arity_map(), &domain, t, cap)?);
    }
    Relation::new(domain, members)
}

/// Right adjoint of [`inverse_along`]: the tuples `t'` over the source of
/// `h` all of whose preimages lie in `s` (which is over the target of `h`).
pub fn forall_along(h: &SignatureMorphism, s: &Relation, cap: u128) -> Result<Relation> {
    let domain = restricted_domain(h, s, "target")?;
    let mut members = Vec::new();
    for t in domain.tuple_set().enumerate(cap)? {
        let pre = restriction_preimages(h.arity_map(), s.domain(), &t, cap)?;
        if pre.iter().all(|u| s.contains(u)) {
            members.push(t);
        }
    }
    Relation::new(domain, members)
}

/// The set of rows of a table.
pub fn image_of_table(t: &Table) -> Relation {
    Relation {
        domain: t.domain().clone(),
        members: t.rows().map(|(_, row)| (row.canonical(), row.clone())).collect(),
    }
}

/// The table whose keys are the serialized members and whose rows are the members.
pub fn include_relation(r: &Relation) -> Table {
    Table::unchecked(
        r.domain.clone(),
        r.serialized().map(|(k, t)| (k.to_string(), t.clone())),
    )
}

/// Unit `T → include(image(T))` from the image factorization of the row function.
pub fn reflection_unit(t: &Table) -> Result<TableMorphism> {
    let included = include_relation(&image_of_table(t));
    let epi = image_factorize(&t.row_function()).epi.retarget(included.keys())?;
    TableMorphism::in_fiber(t.clone(), included, FinFunction::identity(t.signature().arity()), epi)
}

/// Checks the reflection on the given tables and relations: image after
/// inclusion is the identity, each unit (as produced by `unit`) is a valid
/// surjective morphism onto the included image, and for every attribute
/// restriction `h` the table morphisms `T → include(R)` over `h` correspond
/// one-to-one with `∃_h(image(T)) ⊆ R`, each factoring through the unit.
pub fn check_reflection(
    tables: &[Table],
    relations: &[Relation],
    unit: &dyn Fn(&Table) -> Result<TableMorphism>,
) -> Result<Verdict<String>> {
    let fail = |msg: String| Ok(Verdict::Reject(msg));
    for r in relations {
        let inc = include_relation(r);
        if image_of_table(&inc) != *r {
            return fail("image of the included relation differs".into());
        }
        let eta = unit(&inc)?;
        if !eta.key_map().is_identity() {
            return fail("unit at an included relation is not the identity".into());
        }
    }
    for t in tables {
        let eta = unit(t)?;
        let image = image_of_table(t);
        if !validate_table_morphism(&eta).is_accept()
            || eta.source() != t
            || *eta.target() != include_relation(&image)
            || !eta.arity_map().is_identity()
        {
            return fail(format!(
                "unit at a {}-key table is not a morphism onto its image",
                t.len()
            ));
        }
        if !eta.key_map().is_surjective() {
            return fail(format!("unit at a {}-key table is not surjective on keys", t.len()));
        }
        for r in relations.iter().filter(|r| r.domain().domain() == t.type_domain()) {
            let inc = include_relation(r);
            for h in fiber_arity_maps(r.domain().signature(), t.signature()) {
                let sm = SignatureMorphism::in_fiber(r.domain().signature().clone(), t.signature().clone(), h.clone())?;
                let below = exists_along(&sm, &image)?.is_subset(r);
                let mut picks = Vec::new();
                for (_, row) in t.rows() {
                    let key = row.precompose(&h)?.canonical();
                    if inc.keys().contains(&key) {
                        picks.push(key);
                    }
                }
                let homs = usize::from(picks.len() == t.len());
                if homs != usize::from(below) {
                    return fail(format!("{homs} table morphisms against subset test {below}"));
                }
                if homs == 1 {
                    let direct = TableMorphism::in_fiber(
                        t.clone(),
                        inc.clone(),
                        h.clone(),
                        FinFunction::from_pairs(t.keys().clone(), inc.keys().clone(), t.keys().iter().zip(&picks))?,
                    )?;
                    let lift = FinFunction::from_fn(eta.target().keys().clone(), inc.keys().clone(), |k| {
                        let row = eta.target().row(k).expect("row");
                        row.precompose(&h).expect("legal row").canonical()
                    })?;
                    let inc_h = TableMorphism::in_fiber(eta.target().clone(), inc.clone(), h.clone(), lift)?;
                    if compose_table_morphisms(&eta, &inc_h)? != direct {
                        return fail("table morphism does not factor through the unit".into());
                    }
                }
            }
        }
    }
    Ok(Verdict::Accept)
}

/// Checks `∃_h(S) ⊆ R ⇔ S ⊆ h⁻¹(R)` and `h⁻¹(R) ⊆ S ⇔ R ⊆ ∀_h(S)` for every
/// subset `S` of the tuples over the target of `h` and every subset `R`
/// of the tuples over its source. Both tuple sets must have at most 16
/// elements.
pub fn check_galois(
    h: &SignatureMorphism,
    domain: &crate::typedomains::TypeDomain,
    cap: u128,
) -> Result<Verdict<String>> {
    const MAX: u128 = 16;
    let below = SignedDomain::new(h.target().clone(), domain.clone())?;
    let above = SignedDomain::new(h.source().clone(), domain.clone())?;
    let us = below.tuple_set().enumerate(cap.min(MAX))?;
    let vs = above.tuple_set().enumerate(cap.min(MAX))?;
    let subset = |tuples: &[Tuple], mask: u32, d: &SignedDomain| {
        Relation::new(
            d.clone(),
            tuples
                .iter()
                .enumerate()
                .filter(|(n, _)| mask >> n & 1 == 1)
                .map(|(_, t)| t.clone()),
        )
    };
    let mask_of = |r: &Relation, tuples: &[Tuple]| -> u32 {
        tuples
            .iter()
            .enumerate()
            .filter(|(_, t)| r.contains(t))
            .fold(0, |m, (n, _)| m | 1 << n)
    };
    let (nu, nv) = (1u32 << us.len(), 1u32 << vs.len());
    let mut exists = Vec::with_capacity(nu as usize);
    let mut forall = Vec::with_capacity(nu as usize);
    for s in 0..nu {
        let rel = subset(&us, s, &below)?;
        exists.push(mask_of(&exists_along(h, &rel)?, &vs));
        forall.push(mask_of(&forall_along(h, &rel, cap)?, &vs));
    }
    let mut inverse = Vec::with_capacity(nv as usize);
    for r in 0..nv {
        inverse.push(mask_of(&inverse_along(h, &subset(&vs, r, &above)?, cap)?, &us));
    }
    let within = |a: u32, b: u32| a & !b == 0;
    for s in 0..nu {
        for r in 0..nv {
            let inv = inverse[r as usize];
            if within(exists[s as usize], r) != within(s, inv) {
                return Ok(Verdict::Reject(format!(
                    "existential adjunction fails at S={s:#b}, R={r:#b}"
                )));
            }
            if within(inv, s) != within(r, forall[s as usize]) {
                return Ok(Verdict::Reject(format!(
                    "universal adjunction fails at S={s:#b}, R={r:#b}"
                )));
            }
        }
    }
    Ok(Verdict::Accept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::FinSet;
    use crate::signatures::Signature;
    use crate::tuples::DEFAULT_CAP;
    use crate::typedomains::TypeDomain;

    fn set(xs: &[&str]) -> FinSet {
        FinSet::new(xs.iter().copied())
    }

    fn tuple(pairs: &[(&str, &str)]) -> Tuple {
        pairs.iter().copied().collect()
    }

    fn setting() -> (TypeDomain, SignatureMorphism) {
        let a = TypeDomain::new(set(&["s"]), set(&["0", "1"]), [("s", "0"), ("s", "1")]).unwrap();
        let wide = Signature::new(a.sorts().clone(), [("p", "s"), ("q", "s")]).unwrap();
        let narrow = Signature::new(a.sorts().clone(), [("p", "s")]).unwrap();
        let h = FinFunction::inclusion(narrow.arity(), wide.arity()).unwrap();
        (a, SignatureMorphism::in_fiber(narrow, wide, h).unwrap())
    }

    #[test]
    fn exists_projects_and_merges() {
        let (a, h) = setting();
        let wide = SignedDomain::new(h.target().clone(), a).unwrap();
        let r = Relation::new(
            wide,
            [tuple(&[("p", "0"), ("q", "0")]), tuple(&[("p", "0"), ("q", "1")])],
        )
        .unwrap();
        let img = exists_along(&h, &r).unwrap();
        assert_eq!(img.members().cloned().collect::<Vec<_>>(), vec![tuple(&[("p", "0")])]);
        let id = SignatureMorphism::identity(h.target());
        assert_eq!(exists_along(&id, &r).unwrap(), r);
    }

    #[test]
    fn inverse_and_forall_cases() {
        let (a, h) = setting();
        let narrow = SignedDomain::new(h.source().clone(), a.clone()).unwrap();
        let wide = SignedDomain::new(h.target().clone(), a).unwrap();
        let full = Relation::full(narrow.clone(), DEFAULT_CAP).unwrap();
        assert_eq!(
            inverse_along(&h, &full, DEFAULT_CAP).unwrap(),
            Relation::full(wide.clone(), DEFAULT_CAP).unwrap()
        );
        let s = Relation::new(
            wide.clone(),
            [
                tuple(&[("p", "0"), ("q", "0")]),
                tuple(&[("p", "0"), ("q", "1")]),
                tuple(&[("p", "1"), ("q", "0")]),
            ],
        )
        .unwrap();
        let all = forall_along(&h, &s, DEFAULT_CAP).unwrap();
        assert_eq!(all.members().cloned().collect::<Vec<_>>(), vec![tuple(&[("p", "0")])]);
        assert_eq!(
            forall_along(&h, &Relation::full(wide, DEFAULT_CAP).unwrap(), DEFAULT_CAP).unwrap(),
            full
        );
    }

    #[test]
    fn galois_on_projection() {
        let (a, h) = setting();
        assert!(check_galois(&h, &a, DEFAULT_CAP).unwrap().is_accept());
    }

    #[test]
    fn reflection_cases() {
        let (a, h) = setting();
        let d = SignedDomain::new(h.target().clone(), a).unwrap();
        let row = tuple(&[("p", "1"), ("q", "0")]);
        let t = Table::new(d.clone(), [("x", row.clone()), ("y", row)]).unwrap();
        assert_eq!(image_of_table(&t).len(), 1);
        let eta = reflection_unit(&t).unwrap();
        assert_eq!(eta.target().len(), 1);
        assert!(include_relation(&Relation::empty(d.clone())).is_empty());
        let r = Relation::full(d, DEFAULT_CAP).unwrap();
        assert!(check_reflection(&[t], &[r], &reflection_unit).unwrap().is_accept());
    }
}
