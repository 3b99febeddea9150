//! Signed domains, legal tuples, the contravariant tuple map of a
//! signed-domain morphism, and the bridges that factor it.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Verdict};
use crate::sets::ClassNaming;
use crate::sets::{compose, FinFunction, FinSet};
use crate::signatures::{
    colimit_signatures, substitute_along, sum_along, transpose_signature, unit_signature, SigTranspose, Signature,
    SignatureDiagram, SignatureMorphism,
};
use crate::typedomains::{illegal_attribute, inverse_image_domain, Infomorphism, TypeDomain};

/// Default cap on enumerated tuple sets.
pub const DEFAULT_CAP: u128 = 1_000_000;

/// An assignment of values to attribute names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tuple(BTreeMap<String, String>);

impl Tuple {
    pub fn new(values: BTreeMap<String, String>) -> Self {
        Tuple(values)
    }

    pub fn empty() -> Self {
        Tuple::default()
    }

    pub fn get(&self, attribute: &str) -> Option<&str> {
        self.0.get(attribute).map(String::as_str)
    }

    pub fn attributes(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.0.iter().map(|(a, v)| (a.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.0
    }

    /// `h·t`: the tuple `i ↦ t(h(i))` over the source of `h`.
    pub fn precompose(&self, h: &FinFunction) -> Result<Tuple> {
        h.iter()
            .map(|(i, j)| match self.get(j) {
                Some(v) => Ok((i.to_string(), v.to_string())),
                None => Err(Error::IllegalTuple(format!("no value for attribute `{j}`"))),
            })
            .collect::<Result<_>>()
            .map(Tuple)
    }

    /// `t·g`: every value passed through `g`.
    pub fn translate(&self, g: &FinFunction) -> Result<Tuple> {
        self.iter()
            .map(|(a, v)| match g.apply(v) {
                Some(w) => Ok((a.to_string(), w.to_string())),
                None => Err(Error::IllegalTuple(format!("value `{v}` outside the value map"))),
            })
            .collect::<Result<_>>()
            .map(Tuple)
    }

    /// Compact JSON with sorted attribute names; injective on tuples.
    pub fn canonical(&self) -> String {
        serde_json::to_string(&self.0).expect("string map serializes")
    }
}

impl<A: Into<String>, V: Into<String>> FromIterator<(A, V)> for Tuple {
    fn from_iter<I: IntoIterator<Item = (A, V)>>(iter: I) -> Self {
        Tuple(iter.into_iter().map(|(a, v)| (a.into(), v.into())).collect())
    }
}

/// A signature paired with a type domain over the same sorts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedDomain {
    signature: Signature,
    domain: TypeDomain,
}

impl SignedDomain {
    pub fn new(signature: Signature, domain: TypeDomain) -> Result<Self> {
        if signature.sorts() != domain.sorts() {
            return Err(Error::DomainMismatch(format!(
                "signature sorts {:?} differ from type domain sorts {:?}",
                signature.sorts(),
                domain.sorts()
            )));
        }
        Ok(SignedDomain { signature, domain })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn domain(&self) -> &TypeDomain {
        &self.domain
    }

    pub fn tuple_set(&self) -> TupleSet {
        tuple_set(self)
    }

    /// Fails with the first offending attribute if `t` is not legal here.
    pub fn check_tuple(&self, t: &Tuple) -> Result<()> {
        match illegal_attribute(&self.domain, &self.signature, t) {
            None => Ok(()),
            Some(a) => Err(Error::IllegalTuple(format!("{} at attribute `{a}`", t.canonical()))),
        }
    }

    pub fn is_legal(&self, t: &Tuple) -> bool {
        illegal_attribute(&self.domain, &self.signature, t).is_none()
    }
}

/// The legal tuples of a signed domain (or of a per-attribute restriction
/// of it), held intensionally. Enumeration is lexicographic in attribute
/// order, then value order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleSet {
    attributes: Vec<String>,
    choices: Vec<Vec<String>>,
}

pub fn tuple_set(d: &SignedDomain) -> TupleSet {
    let (attributes, choices) = d
        .signature
        .attributes()
        .map(|(i, x)| {
            let extent = d.domain.extent(x).expect("sorts agree");
            (i.to_string(), extent.as_slice().to_vec())
        })
        .unzip();
    TupleSet { attributes, choices }
}

impl TupleSet {
    /// Tuples whose value at each attribute lies in the given (sorted) choices.
    pub fn from_choices(choices: BTreeMap<String, BTreeSet<String>>) -> Self {
        let (attributes, choices) = choices.into_iter().map(|(a, c)| (a, c.into_iter().collect())).unzip();
        TupleSet { attributes, choices }
    }

    /// Exact number of tuples, saturating at `u128::MAX`.
    pub fn cardinality(&self) -> u128 {
        self.choices
            .iter()
            .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128))
            .unwrap_or(u128::MAX)
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        t.len() == self.attributes.len()
            && self.attributes.iter().zip(&self.choices).all(|(a, c)| {
                t.get(a)
                    .is_some_and(|v| c.binary_search_by(|x| x.as_str().cmp(v)).is_ok())
            })
    }

    /// Iterates without any cap.
    pub fn iter(&self) -> impl Iterator<Item = Tuple> + '_ {
        let empty = self.choices.iter().any(Vec::is_empty);
        let mut counter = vec![0usize; self.choices.len()];
        let mut done = empty;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let t = Tuple(
                self.attributes
                    .iter()
                    .zip(&self.choices)
                    .zip(&counter)
                    .map(|((a, c), &n)| (a.clone(), c[n].clone()))
                    .collect(),
            );
            done = true;
            for (slot, c) in counter.iter_mut().zip(&self.choices).rev() {
                *slot += 1;
                if *slot < c.len() {
                    done = false;
                    break;
                }
                *slot = 0;
            }
            Some(t)
        })
    }

    /// All tuples, or `TooLarge` if there are more than `cap`.
    pub fn enumerate(&self, cap: u128) -> Result<Vec<Tuple>> {
        let count = self.cardinality();
        if count > cap {
            return Err(Error::TooLarge { count, cap });
        }
        Ok(self.iter().collect())
    }
}

/// A morphism `⟨h, f, g⟩ : D₂ → D₁` of signed domains: a signature morphism
/// and an infomorphism sharing the sort map `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedDomainMorphism {
    source: SignedDomain,
    target: SignedDomain,
    sig_mor: SignatureMorphism,
    info_mor: Infomorphism,
}

impl SignedDomainMorphism {
    pub fn new(sig_mor: SignatureMorphism, info_mor: Infomorphism) -> Result<Self> {
        if sig_mor.sort_map() != info_mor.sort_map() {
            return Err(Error::BoundaryMismatch(
                "signature and infomorphism have different sort maps".into(),
            ));
        }
        Ok(SignedDomainMorphism {
            source: SignedDomain::new(sig_mor.source().clone(), info_mor.source().clone())?,
            target: SignedDomain::new(sig_mor.target().clone(), info_mor.target().clone())?,
            sig_mor,
            info_mor,
        })
    }

    /// A morphism over a single type domain: only the arity map moves.
    pub fn in_fiber(sig_mor: SignatureMorphism, domain: &TypeDomain) -> Result<Self> {
        SignedDomainMorphism::new(sig_mor, Infomorphism::identity(domain))
    }

    pub fn identity(d: &SignedDomain) -> Self {
        SignedDomainMorphism {
            source: d.clone(),
            target: d.clone(),
            sig_mor: SignatureMorphism::identity(d.signature()),
            info_mor: Infomorphism::identity(d.domain()),
        }
    }

    pub fn source(&self) -> &SignedDomain {
        &self.source
    }

    pub fn target(&self) -> &SignedDomain {
        &self.target
    }

    pub fn signature_morphism(&self) -> &SignatureMorphism {
        &self.sig_mor
    }

    pub fn infomorphism(&self) -> &Infomorphism {
        &self.info_mor
    }

    pub fn arity_map(&self) -> &FinFunction {
        self.sig_mor.arity_map()
    }

    pub fn sort_map(&self) -> &FinFunction {
        self.sig_mor.sort_map()
    }

    pub fn value_map(&self) -> &FinFunction {
        self.info_mor.value_map()
    }

    /// `self: D₃ → D₂` followed by `next: D₂ → D₁`.
    pub fn then(&self, next: &SignedDomainMorphism) -> Result<SignedDomainMorphism> {
        if self.target != next.source {
            return Err(Error::BoundaryMismatch("signed domain morphisms do not compose".into()));
        }
        SignedDomainMorphism::new(self.sig_mor.then(&next.sig_mor)?, self.info_mor.then(&next.info_mor)?)
    }

    /// True when both sort and value maps are identities.
    pub fn is_fiber(&self) -> bool {
        self.info_mor.is_identity()
    }
}

/// The tuple map `tup(h,f,g): tup(D₁) → tup(D₂)`, `i₂ ↦ g(t(h(i₂)))`.
pub fn tuple_map(m: &SignedDomainMorphism, t: &Tuple) -> Result<Tuple> {
    m.target.check_tuple(t)?;
    t.precompose(m.arity_map())?.translate(m.value_map())
}

/// Signature bridge: `h·t`, a tuple over `(I₂, s₂)` in `f⁻¹(A₁)`.
pub fn bridge_signature(sm: &SignatureMorphism, a1: &TypeDomain, t: &Tuple) -> Result<Tuple> {
    SignedDomain::new(sm.target().clone(), a1.clone())?.check_tuple(t)?;
    t.precompose(sm.arity_map())
}

/// Levo bridge: `f̂·t·g`, taking a tuple over `sig₁` in `A₁` to a tuple
/// over the pullback `f*(sig₁)` in `A₂`.
pub fn bridge_levo(im: &Infomorphism, sig1: &Signature, t: &Tuple) -> Result<Tuple> {
    SignedDomain::new(sig1.clone(), im.target().clone())?.check_tuple(t)?;
    let (_, counit) = substitute_along(im.sort_map(), sig1)?;
    t.precompose(counit.arity_map())?.translate(im.value_map())
}

/// Dextro bridge: `u·g`, taking a tuple over `Σ_f(sig₂)` in `A₁` to a tuple
/// over `sig₂` in `A₂`.
pub fn bridge_dextro(im: &Infomorphism, sig2: &Signature, u: &Tuple) -> Result<Tuple> {
    SignedDomain::new(sum_along(im.sort_map(), sig2)?, im.target().clone())?.check_tuple(u)?;
    u.translate(im.value_map())
}

/// A tuple at which two routes of a commuting check disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteFailure {
    pub route: &'static str,
    pub input: Tuple,
    pub expected: Tuple,
    pub found: Tuple,
}

fn agree(route: &'static str, input: &Tuple, expected: &Tuple, found: Tuple) -> Option<RouteFailure> {
    (expected != &found).then(|| RouteFailure {
        route,
        input: input.clone(),
        expected: expected.clone(),
        found,
    })
}

/// Checks on every tuple of `tup(D₁)` that the tuple map equals the
/// signature route, the levo route and the dextro route.
pub fn check_factorizations(m: &SignedDomainMorphism, cap: u128) -> Result<Verdict<RouteFailure>> {
    let sm = m.signature_morphism();
    let im = m.infomorphism();
    let s2 = sm.source();
    let s1 = sm.target();
    let a1 = im.target();
    let (pulled, _) = substitute_along(im.sort_map(), s1)?;
    let SigTranspose::Pullback(hat) =
        transpose_signature(im.sort_map(), s2, s1, &SigTranspose::Sum(m.arity_map().clone()))?
    else {
        unreachable!("sum side transposes to pullback side");
    };
    let relaxed = SignedDomain::new(s2.clone(), inverse_image_domain(im.sort_map(), a1)?)?;
    let levo_domain = SignedDomain::new(pulled, im.source().clone())?;
    for t in m.target.tuple_set().enumerate(cap)? {
        let direct = tuple_map(m, &t)?;

        let bridged = bridge_signature(sm, a1, &t)?;
        relaxed.check_tuple(&bridged)?;
        let signature_route = bridged.translate(im.value_map())?;
        if let Some(w) = agree("signature", &t, &direct, signature_route) {
            return Ok(Verdict::Reject(w));
        }

        let levo = bridge_levo(im, s1, &t)?;
        levo_domain.check_tuple(&levo)?;
        if let Some(w) = agree("levo", &t, &direct, levo.precompose(&hat)?) {
            return Ok(Verdict::Reject(w));
        }

        let restricted = t.precompose(m.arity_map())?;
        if let Some(w) = agree("dextro", &t, &direct, bridge_dextro(im, s2, &restricted)?) {
            return Ok(Verdict::Reject(w));
        }
    }
    Ok(Verdict::Accept)
}

/// Every signature over `sorts` on the attributes `a1..an`, `n ≤ max_arity`.
pub fn all_signatures(sorts: &FinSet, max_arity: usize) -> Vec<Signature> {
    let mut out = Vec::new();
    for n in 0..=max_arity {
        let arity = FinSet::new((1..=n).map(|k| format!("a{k}")));
        for typing in crate::sets::all_functions(&arity, sorts) {
            out.push(Signature::from_typing(typing));
        }
    }
    out
}

/// Checks the two comparison isomorphisms between the levo and dextro
/// bridges on every legal tuple of every signature with at most
/// `max_arity` attributes:
/// levo at `S₁` equals dextro at `f*(S₁)` after restriction along the counit, and
/// dextro at `S₂` equals levo at `Σ_f(S₂)` followed by restriction along the unit.
pub fn check_levo_dextro_iso(im: &Infomorphism, max_arity: usize, cap: u128) -> Result<Verdict<RouteFailure>> {
    let f = im.sort_map();
    for s1 in all_signatures(im.target().sorts(), max_arity) {
        let (pulled, counit) = substitute_along(f, &s1)?;
        let d1 = SignedDomain::new(s1.clone(), im.target().clone())?;
        for t in d1.tuple_set().enumerate(cap)? {
            let levo = bridge_levo(im, &s1, &t)?;
            let via = bridge_dextro(im, &pulled, &t.precompose(counit.arity_map())?)?;
            if let Some(w) = agree("levo-vs-dextro", &t, &levo, via) {
                return Ok(Verdict::Reject(w));
            }
        }
    }
    for s2 in all_signatures(im.source().sorts(), max_arity) {
        let pushed = sum_along(f, &s2)?;
        let unit = unit_signature(f, &s2)?;
        let d = SignedDomain::new(pushed.clone(), im.target().clone())?;
        for u in d.tuple_set().enumerate(cap)? {
            let dextro = bridge_dextro(im, &s2, &u)?;
            let via = bridge_levo(im, &pushed, &u)?.precompose(unit.arity_map())?;
            if let Some(w) = agree("dextro-vs-levo", &u, &dextro, via) {
                return Ok(Verdict::Reject(w));
            }
        }
    }
    Ok(Verdict::Accept)
}

/// For a span of signatures `I₁ ← I → I₂` over one sort set, checks that
/// restriction along the pushout injections is a bijection from
/// `tup(I₁ +_I I₂)` onto the pullback `tup(I₁) ×_{tup(I)} tup(I₂)`.
pub fn check_continuity(
    shared: &Signature,
    left: (&Signature, &FinFunction),
    right: (&Signature, &FinFunction),
    domain: &TypeDomain,
    cap: u128,
) -> Result<Verdict<String>> {
    let diagram = SignatureDiagram {
        sorts: domain.sorts().clone(),
        nodes: vec![
            ("0".into(), shared.clone()),
            ("1".into(), left.0.clone()),
            ("2".into(), right.0.clone()),
        ],
        edges: vec![(0, 1, left.1.clone()), (0, 2, right.1.clone())],
    };
    let colimit = colimit_signatures(&diagram, ClassNaming::Representative)?;
    let (inj1, inj2) = (colimit.legs[1].arity_map(), colimit.legs[2].arity_map());
    let (h1, h2) = (compose(left.1, inj1)?, compose(right.1, inj2)?);

    let pushout = SignedDomain::new(colimit.apex.clone(), domain.clone())?;
    let mut images = BTreeSet::new();
    for t in pushout.tuple_set().enumerate(cap)? {
        let (a, b) = (t.precompose(inj1)?, t.precompose(inj2)?);
        if a.precompose(left.1)? != b.precompose(right.1)? {
            return Ok(Verdict::Reject(format!(
                "{} restricts to a non-matching pair",
                t.canonical()
            )));
        }
        if t.precompose(&h1)? != t.precompose(&h2)? {
            return Ok(Verdict::Reject(format!("{} breaks the cocone", t.canonical())));
        }
        if !images.insert((a.canonical(), b.canonical())) {
            return Ok(Verdict::Reject(format!(
                "{} collides with another tuple",
                t.canonical()
            )));
        }
    }
    // size of the pullback, grouping each side by its restriction to I
    let mut left_groups: BTreeMap<String, u128> = BTreeMap::new();
    for a in SignedDomain::new(left.0.clone(), domain.clone())?
        .tuple_set()
        .enumerate(cap)?
    {
        *left_groups.entry(a.precompose(left.1)?.canonical()).or_default() += 1;
    }
    let mut pullback = 0u128;
    for b in SignedDomain::new(right.0.clone(), domain.clone())?
        .tuple_set()
        .enumerate(cap)?
    {
        pullback += left_groups
            .get(&b.precompose(right.1)?.canonical())
            .copied()
            .unwrap_or(0);
    }
    if pullback != images.len() as u128 {
        return Ok(Verdict::Reject(format!(
            "pushout has {} tuples but the pullback has {pullback}",
            images.len()
        )));
    }
    Ok(Verdict::Accept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> FinSet {
        FinSet::new(xs.iter().copied())
    }

    fn domain() -> TypeDomain {
        TypeDomain::new(
            set(&["int", "str"]),
            set(&["1", "2", "a", "b"]),
            [("str", "a"), ("str", "b"), ("int", "1"), ("int", "2")],
        )
        .unwrap()
    }

    fn tuple(pairs: &[(&str, &str)]) -> Tuple {
        pairs.iter().copied().collect()
    }

    #[test]
    fn tuple_set_cases() {
        let a = domain();
        let empty = SignedDomain::new(Signature::empty(a.sorts().clone()), a.clone()).unwrap();
        assert_eq!(empty.tuple_set().enumerate(10).unwrap(), vec![Tuple::empty()]);

        let one = SignedDomain::new(Signature::new(a.sorts().clone(), [("n", "str")]).unwrap(), a.clone()).unwrap();
        let ts = one.tuple_set().enumerate(10).unwrap();
        assert_eq!(ts, vec![tuple(&[("n", "a")]), tuple(&[("n", "b")])]);

        let sparse = TypeDomain::new(set(&["e", "str"]), set(&["a"]), [("str", "a")]).unwrap();
        let sig = Signature::new(set(&["e", "str"]), [("n", "str"), ("z", "e")]).unwrap();
        let d = SignedDomain::new(sig, sparse).unwrap();
        assert_eq!(d.tuple_set().cardinality(), 0);
        assert!(d.tuple_set().enumerate(10).unwrap().is_empty());
    }

    #[test]
    fn enumeration_cap_reports_exact_size() {
        let a = domain();
        let sig = Signature::new(a.sorts().clone(), [("p", "str"), ("q", "str"), ("r", "int")]).unwrap();
        let d = SignedDomain::new(sig, a).unwrap();
        assert_eq!(d.tuple_set().enumerate(7), Err(Error::TooLarge { count: 8, cap: 7 }));
        assert!(d.tuple_set().contains(&tuple(&[("p", "a"), ("q", "b"), ("r", "2")])));
    }

    #[test]
    fn tuple_map_identity_and_renaming() {
        let a = domain();
        let s1 = Signature::new(a.sorts().clone(), [("name", "str")]).unwrap();
        let d1 = SignedDomain::new(s1.clone(), a.clone()).unwrap();
        let t = tuple(&[("name", "a")]);
        assert_eq!(tuple_map(&SignedDomainMorphism::identity(&d1), &t).unwrap(), t);

        let s2 = Signature::new(a.sorts().clone(), [("label", "str")]).unwrap();
        let h = FinFunction::from_pairs(s2.arity().clone(), s1.arity().clone(), [("label", "name")]).unwrap();
        let m = SignedDomainMorphism::in_fiber(SignatureMorphism::in_fiber(s2, s1, h).unwrap(), &a).unwrap();
        assert_eq!(tuple_map(&m, &t).unwrap(), tuple(&[("label", "a")]));
        assert!(matches!(
            tuple_map(&m, &tuple(&[("name", "1")])),
            Err(Error::IllegalTuple(_))
        ));
    }

    #[test]
    fn bridge_signature_restricts() {
        let a = domain();
        let s1 = Signature::new(a.sorts().clone(), [("n", "str"), ("k", "int")]).unwrap();
        let s2 = Signature::new(a.sorts().clone(), [("n", "str")]).unwrap();
        let h = FinFunction::inclusion(s2.arity(), s1.arity()).unwrap();
        let sm = SignatureMorphism::in_fiber(s2, s1, h).unwrap();
        let t = tuple(&[("n", "a"), ("k", "2")]);
        assert_eq!(bridge_signature(&sm, &a, &t).unwrap(), tuple(&[("n", "a")]));
    }

    #[test]
    fn levo_and_dextro_along_identity() {
        let a = domain();
        let im = Infomorphism::identity(&a);
        let s = Signature::new(a.sorts().clone(), [("n", "str")]).unwrap();
        let t = tuple(&[("n", "b")]);
        let levo = bridge_levo(&im, &s, &t).unwrap();
        assert_eq!(levo, tuple(&[(&crate::sets::encode_pair("n", "str"), "b")]));
        assert_eq!(bridge_dextro(&im, &s, &t).unwrap(), t);
        let e = Signature::empty(a.sorts().clone());
        assert_eq!(bridge_levo(&im, &e, &Tuple::empty()).unwrap(), Tuple::empty());
        assert_eq!(bridge_dextro(&im, &e, &Tuple::empty()).unwrap(), Tuple::empty());
    }

    #[test]
    fn factorizations_and_iso_on_identity() {
        let a = domain();
        let s = Signature::new(a.sorts().clone(), [("n", "str"), ("k", "int")]).unwrap();
        let d = SignedDomain::new(s, a.clone()).unwrap();
        let id = SignedDomainMorphism::identity(&d);
        assert!(check_factorizations(&id, DEFAULT_CAP).unwrap().is_accept());
        assert!(check_levo_dextro_iso(&Infomorphism::identity(&a), 2, DEFAULT_CAP)
            .unwrap()
            .is_accept());
    }
}
