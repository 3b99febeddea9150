//! Signatures (headers) `⟨I, s, X⟩`, their morphisms, and the adjunction
//! between pushing a header forward along a sort map (`sum_along`) and
//! pulling it back (`substitute_along`).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sets::{compose, encode_pair, glue, pullback_set, ClassNaming, FinFunction, FinSet, Part};

/// Attribute names typed by sorts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    typing: FinFunction,
}

impl Signature {
    /// Builds a signature from `(attribute, sort)` pairs over `sorts`.
    pub fn new<I, A, S>(sorts: FinSet, attributes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, S)>,
        A: Into<String>,
        S: Into<String>,
    {
        let attributes: BTreeMap<String, String> = attributes.into_iter().map(|(a, s)| (a.into(), s.into())).collect();
        if let Some(bad) = attributes.values().find(|s| !sorts.contains(s)) {
            return Err(Error::UnknownSort(bad.clone()));
        }
        let arity = FinSet::new(attributes.keys().cloned());
        let typing = FinFunction::from_pairs(arity, sorts, attributes)?;
        Ok(Signature { typing })
    }

    pub fn from_typing(typing: FinFunction) -> Self {
        Signature { typing }
    }

    /// The signature with no attributes over `sorts`.
    pub fn empty(sorts: FinSet) -> Self {
        let typing = FinFunction::from_indices(FinSet::empty(), sorts, Vec::new()).expect("empty function");
        Signature { typing }
    }

    pub fn arity(&self) -> &FinSet {
        self.typing.source()
    }

    pub fn sorts(&self) -> &FinSet {
        self.typing.target()
    }

    pub fn typing(&self) -> &FinFunction {
        &self.typing
    }

    pub fn sort_of(&self, attribute: &str) -> Option<&str> {
        self.typing.apply(attribute)
    }

    pub fn attributes(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.typing.iter()
    }
}

/// A morphism `⟨h, f⟩ : S₂ → S₁` with `h: I₂ → I₁` and `f: X₂ → X₁` such
/// that `s₁(h(i)) = f(s₂(i))` for every attribute `i` of `S₂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureMorphism {
    source: Signature,
    target: Signature,
    arity_map: FinFunction,
    sort_map: FinFunction,
}

impl SignatureMorphism {
    pub fn new(source: Signature, target: Signature, arity_map: FinFunction, sort_map: FinFunction) -> Result<Self> {
        let m = SignatureMorphism {
            source,
            target,
            arity_map,
            sort_map,
        };
        m.check()?;
        Ok(m)
    }

    /// A morphism between signatures over the same sorts with identity sort map.
    pub fn in_fiber(source: Signature, target: Signature, arity_map: FinFunction) -> Result<Self> {
        if source.sorts() != target.sorts() {
            return Err(Error::BoundaryMismatch(
                "fiber morphism between different sort sets".into(),
            ));
        }
        let sort_map = FinFunction::identity(source.sorts());
        SignatureMorphism::new(source, target, arity_map, sort_map)
    }

    pub fn identity(sig: &Signature) -> Self {
        SignatureMorphism {
            source: sig.clone(),
            target: sig.clone(),
            arity_map: FinFunction::identity(sig.arity()),
            sort_map: FinFunction::identity(sig.sorts()),
        }
    }

    fn check(&self) -> Result<()> {
        if self.arity_map.source() != self.source.arity()
            || self.arity_map.target() != self.target.arity()
            || self.sort_map.source() != self.source.sorts()
            || self.sort_map.target() != self.target.sorts()
        {
            return Err(Error::BoundaryMismatch(
                "signature morphism components do not match their signatures".into(),
            ));
        }
        for (i, j) in self.arity_map.iter() {
            let there = self.target.sort_of(j);
            let here = self.sort_map.apply(self.source.sort_of(i).expect("typed"));
            if there != here {
                return Err(Error::NotNatural(i.to_string()));
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Signature {
        &self.source
    }

    pub fn target(&self) -> &Signature {
        &self.target
    }

    pub fn arity_map(&self) -> &FinFunction {
        &self.arity_map
    }

    pub fn sort_map(&self) -> &FinFunction {
        &self.sort_map
    }

    /// Diagrammatic composite: `self: S₃ → S₂` followed by `next: S₂ → S₁`.
    pub fn then(&self, next: &SignatureMorphism) -> Result<SignatureMorphism> {
        Ok(SignatureMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            arity_map: compose(&self.arity_map, &next.arity_map)?,
            sort_map: compose(&self.sort_map, &next.sort_map)?,
        })
    }

    pub fn is_fiber(&self) -> bool {
        self.sort_map.is_identity()
    }
}

fn require_sorts(expected: &FinSet, sig: &Signature, what: &str) -> Result<()> {
    if sig.sorts() != expected {
        return Err(Error::BoundaryMismatch(format!(
            "{what}: signature sorts {:?} differ from {:?}",
            sig.sorts(),
            expected
        )));
    }
    Ok(())
}

/// Retypes `sig` (over `X₂`) along `f: X₂ → X₁`: same attributes, typing `s₂` then `f`.
pub fn sum_along(f: &FinFunction, sig: &Signature) -> Result<Signature> {
    require_sorts(f.source(), sig, "sum_along")?;
    Ok(Signature::from_typing(compose(sig.typing(), f)?))
}

/// Pulls `sig` (over `X₁`) back along `f: X₂ → X₁`.
///
/// The attributes of the result are the pairs `⟨i₁,x₂⟩` with `s₁(i₁) = f(x₂)`,
/// typed by `x₂`. Also returns the counit: the fiber morphism from the
/// retyped pullback `Σ_f(f*(sig))` to `sig` sending `⟨i₁,x₂⟩ ↦ i₁`.
pub fn substitute_along(f: &FinFunction, sig: &Signature) -> Result<(Signature, SignatureMorphism)> {
    require_sorts(f.target(), sig, "substitute_along")?;
    let span = pullback_set(sig.typing(), f)?;
    let pulled = Signature::from_typing(span.right);
    let counit = SignatureMorphism {
        source: Signature::from_typing(compose(pulled.typing(), f)?),
        target: sig.clone(),
        arity_map: span.left,
        sort_map: FinFunction::identity(f.target()),
    };
    Ok((pulled, counit))
}

/// The counit of the adjunction at `sig` (see [`substitute_along`]).
pub fn counit_signature(f: &FinFunction, sig: &Signature) -> Result<SignatureMorphism> {
    Ok(substitute_along(f, sig)?.1)
}

/// The unit of the adjunction at `sig` (over `X₂`): the fiber morphism
/// `sig → f*(Σ_f(sig))` sending `i ↦ ⟨i, s(i)⟩`.
pub fn unit_signature(f: &FinFunction, sig: &Signature) -> Result<SignatureMorphism> {
    let pushed = sum_along(f, sig)?;
    let (round, _) = substitute_along(f, &pushed)?;
    let arity_map = FinFunction::from_fn(sig.arity().clone(), round.arity().clone(), |i| {
        encode_pair(i, sig.sort_of(i).expect("typed"))
    })?;
    SignatureMorphism::in_fiber(sig.clone(), round, arity_map)
}

/// Image of a fiber morphism over `X₂` under `Σ_f`: the same arity map, retyped.
pub fn sum_morphism(f: &FinFunction, m: &SignatureMorphism) -> Result<SignatureMorphism> {
    SignatureMorphism::in_fiber(sum_along(f, &m.source)?, sum_along(f, &m.target)?, m.arity_map.clone())
}

/// Image of a fiber morphism over `X₁` under `f*`: `⟨i,x⟩ ↦ ⟨h(i),x⟩`.
pub fn substitute_morphism(f: &FinFunction, m: &SignatureMorphism) -> Result<SignatureMorphism> {
    if !m.is_fiber() {
        return Err(Error::BoundaryMismatch("expected a fiber morphism".into()));
    }
    let (source, _) = substitute_along(f, &m.source)?;
    let (target, _) = substitute_along(f, &m.target)?;
    let arity_map = FinFunction::from_fn(source.arity().clone(), target.arity().clone(), |p| {
        let parts = crate::sets::decode(p).expect("pair attribute");
        encode_pair(m.arity_map.apply(&parts[0]).expect("attribute"), &parts[1])
    })?;
    SignatureMorphism::in_fiber(source, target, arity_map)
}

/// One side of the hom-set bijection of the `Σ_f ⊣ f*` adjunction between
/// a signature `S₂` over `X₂` and a signature `S₁` over `X₁`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigTranspose {
    /// `h: I₂ → I₁`, a fiber morphism `Σ_f(S₂) → S₁` over `X₁`.
    Sum(FinFunction),
    /// `ĥ: I₂ → I₁ ×_{X₁} X₂`, a fiber morphism `S₂ → f*(S₁)` over `X₂`.
    Pullback(FinFunction),
}

/// Carries a fiber morphism to its adjoint transpose. `h = ĥ then f̂` in one
/// direction; in the other, `ĥ(i) = ⟨h(i), s₂(i)⟩` is the mediator into the pullback.
pub fn transpose_signature(f: &FinFunction, s2: &Signature, s1: &Signature, m: &SigTranspose) -> Result<SigTranspose> {
    let (pulled, counit) = substitute_along(f, s1)?;
    match m {
        SigTranspose::Sum(h) => {
            SignatureMorphism::in_fiber(sum_along(f, s2)?, s1.clone(), h.clone())?;
            let hat = FinFunction::from_fn(s2.arity().clone(), pulled.arity().clone(), |i| {
                encode_pair(h.apply(i).expect("attribute"), s2.sort_of(i).expect("typed"))
            })?;
            Ok(SigTranspose::Pullback(hat))
        }
        SigTranspose::Pullback(hat) => {
            SignatureMorphism::in_fiber(s2.clone(), pulled, hat.clone())?;
            Ok(SigTranspose::Sum(compose(hat, counit.arity_map())?))
        }
    }
}

/// A finite diagram of signatures over one sort set. Each edge `(a, b, h)`
/// carries an arity map `h: I_a → I_b` that must preserve typing.
#[derive(Debug, Clone)]
pub struct SignatureDiagram {
    pub sorts: FinSet,
    pub nodes: Vec<(String, Signature)>,
    pub edges: Vec<(usize, usize, FinFunction)>,
}

/// A colimit of a [`SignatureDiagram`]: the apex and one leg per node.
#[derive(Debug, Clone)]
pub struct SignatureColimit {
    pub apex: Signature,
    pub legs: Vec<SignatureMorphism>,
}

/// Coproduct of the attribute sets quotiented by every edge, typed by the
/// (necessarily common) sort of each class.
pub fn colimit_signatures(diagram: &SignatureDiagram, naming: ClassNaming) -> Result<SignatureColimit> {
    for (_, sig) in &diagram.nodes {
        require_sorts(&diagram.sorts, sig, "colimit_signatures")?;
    }
    let mut identify = Vec::new();
    for (a, b, h) in &diagram.edges {
        let (sa, sb) = match (diagram.nodes.get(*a), diagram.nodes.get(*b)) {
            (Some((_, sa)), Some((_, sb))) => (sa, sb),
            _ => return Err(Error::BoundaryMismatch("edge endpoint out of range".into())),
        };
        SignatureMorphism::in_fiber(sa.clone(), sb.clone(), h.clone())?;
        for (x, &y) in h.indices().iter().enumerate() {
            identify.push(((*a, x), (*b, y)));
        }
    }
    let parts: Vec<Part<'_>> = diagram
        .nodes
        .iter()
        .map(|(label, sig)| Part {
            label,
            set: sig.arity(),
        })
        .collect();
    let (apex_arity, injections) = glue(&parts, &identify, naming)?;
    let mut typing: BTreeMap<String, String> = BTreeMap::new();
    for ((_, sig), inj) in diagram.nodes.iter().zip(&injections) {
        for (i, c) in inj.iter() {
            let s = sig.sort_of(i).expect("typed");
            if let Some(prev) = typing.insert(c.to_string(), s.to_string()) {
                if prev != s {
                    return Err(Error::IllTyped(format!("class `{c}` mixes sorts `{prev}` and `{s}`")));
                }
            }
        }
    }
    let apex = Signature::from_typing(FinFunction::from_pairs(apex_arity, diagram.sorts.clone(), typing)?);
    let legs = diagram
        .nodes
        .iter()
        .zip(injections)
        .map(|((_, sig), inj)| SignatureMorphism::in_fiber(sig.clone(), apex.clone(), inj))
        .collect::<Result<Vec<_>>>()?;
    Ok(SignatureColimit { apex, legs })
}

/// All typing-preserving maps `source.arity → target.arity` over a common sort set.
pub fn fiber_arity_maps(source: &Signature, target: &Signature) -> Vec<FinFunction> {
    let choices: Vec<Vec<usize>> = source
        .attributes()
        .map(|(_, s)| {
            target
                .attributes()
                .enumerate()
                .filter(|(_, (_, t))| *t == s)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(choices.len());
    product_rec(&choices, &mut current, &mut |pick| {
        out.push(
            FinFunction::from_indices(source.arity().clone(), target.arity().clone(), pick.to_vec())
                .expect("indices in range"),
        );
    });
    out
}

pub(crate) fn product_rec(choices: &[Vec<usize>], current: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if current.len() == choices.len() {
        emit(current);
        return;
    }
    for &c in &choices[current.len()] {
        current.push(c);
        product_rec(choices, current, emit);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> FinSet {
        FinSet::new(xs.iter().copied())
    }

    fn sig(sorts: &[&str], attrs: &[(&str, &str)]) -> Signature {
        Signature::new(set(sorts), attrs.iter().copied()).unwrap()
    }

    #[test]
    fn sum_along_identity_and_retyping() {
        let s = sig(&["str"], &[("name", "str")]);
        let id = FinFunction::identity(s.sorts());
        assert_eq!(sum_along(&id, &s).unwrap(), s);
        let f = FinFunction::from_pairs(set(&["str"]), set(&["text"]), [("str", "text")]).unwrap();
        let pushed = sum_along(&f, &s).unwrap();
        assert_eq!(pushed.sort_of("name"), Some("text"));
    }

    #[test]
    fn substitute_along_inclusion_keeps_matching_attributes() {
        let s1 = sig(&["int", "str"], &[("age", "int"), ("name", "str")]);
        let f = FinFunction::inclusion(&set(&["str"]), s1.sorts()).unwrap();
        let (pulled, counit) = substitute_along(&f, &s1).unwrap();
        assert_eq!(pulled.arity(), &set(&[&encode_pair("name", "str")]));
        assert_eq!(counit.arity_map().apply(&encode_pair("name", "str")), Some("name"));
    }

    #[test]
    fn substitute_along_identity_is_iso_and_empty_source_is_empty() {
        let s1 = sig(&["a", "b"], &[("p", "a"), ("q", "b"), ("r", "a")]);
        let id = FinFunction::identity(s1.sorts());
        let (pulled, counit) = substitute_along(&id, &s1).unwrap();
        assert_eq!(pulled.arity().len(), 3);
        assert!(counit.arity_map().is_injective() && counit.arity_map().is_surjective());

        let f = FinFunction::from_indices(FinSet::empty(), s1.sorts().clone(), vec![]).unwrap();
        assert!(substitute_along(&f, &s1).unwrap().0.arity().is_empty());
    }

    #[test]
    fn naturality_is_enforced() {
        let s = sig(&["a", "b"], &[("p", "a"), ("q", "b")]);
        let swap = FinFunction::from_pairs(s.arity().clone(), s.arity().clone(), [("p", "q"), ("q", "p")]).unwrap();
        assert!(matches!(
            SignatureMorphism::in_fiber(s.clone(), s, swap),
            Err(Error::NotNatural(_))
        ));
    }

    #[test]
    fn transpose_identity_gives_counit() {
        let s1 = sig(&["a"], &[("p", "a"), ("q", "a")]);
        let id = FinFunction::identity(s1.sorts());
        let (pulled, counit) = substitute_along(&id, &s1).unwrap();
        let hat = FinFunction::identity(pulled.arity());
        let back = transpose_signature(&id, &pulled, &s1, &SigTranspose::Pullback(hat)).unwrap();
        assert_eq!(back, SigTranspose::Sum(counit.arity_map().clone()));
    }

    #[test]
    fn transpose_into_one_attribute_is_unique() {
        let s1 = sig(&["x"], &[("only", "x")]);
        let s2 = sig(&["u", "v"], &[("a", "u"), ("b", "v")]);
        let f = FinFunction::from_pairs(s2.sorts().clone(), s1.sorts().clone(), [("u", "x"), ("v", "x")]).unwrap();
        let h =
            FinFunction::from_pairs(s2.arity().clone(), s1.arity().clone(), [("a", "only"), ("b", "only")]).unwrap();
        let SigTranspose::Pullback(hat) = transpose_signature(&f, &s2, &s1, &SigTranspose::Sum(h.clone())).unwrap()
        else {
            panic!("expected a pullback-side map");
        };
        let (pulled, counit) = substitute_along(&f, &s1).unwrap();
        let valid: Vec<_> = fiber_arity_maps(&s2, &pulled)
            .into_iter()
            .filter(|c| compose(c, counit.arity_map()).unwrap() == h)
            .collect();
        assert_eq!(valid, vec![hat]);
    }

    #[test]
    fn colimit_examples() {
        let sorts = set(&["s"]);
        let a = sig(&["s"], &[("x", "s"), ("y", "s")]);
        let single = SignatureDiagram {
            sorts: sorts.clone(),
            nodes: vec![("a".into(), a.clone())],
            edges: vec![],
        };
        let c = colimit_signatures(&single, ClassNaming::Representative).unwrap();
        assert_eq!(c.apex, a);
        assert!(c.legs[0].arity_map().is_identity());

        let empty = Signature::empty(sorts.clone());
        let b = sig(&["s"], &[("z", "s")]);
        let none = FinFunction::from_indices(FinSet::empty(), a.arity().clone(), vec![]).unwrap();
        let none_b = FinFunction::from_indices(FinSet::empty(), b.arity().clone(), vec![]).unwrap();
        let span = SignatureDiagram {
            sorts: sorts.clone(),
            nodes: vec![("c".into(), empty), ("a".into(), a.clone()), ("b".into(), b.clone())],
            edges: vec![(0, 1, none), (0, 2, none_b)],
        };
        let c = colimit_signatures(&span, ClassNaming::Representative).unwrap();
        assert_eq!(c.apex.arity(), &set(&["x", "y", "z"]));

        let shared = sig(&["s"], &[("k", "s")]);
        let into_a = FinFunction::from_pairs(shared.arity().clone(), a.arity().clone(), [("k", "x")]).unwrap();
        let into_b = FinFunction::from_pairs(shared.arity().clone(), b.arity().clone(), [("k", "z")]).unwrap();
        let span = SignatureDiagram {
            sorts,
            nodes: vec![("c".into(), shared), ("a".into(), a), ("b".into(), b)],
            edges: vec![(0, 1, into_a), (0, 2, into_b)],
        };
        let c = colimit_signatures(&span, ClassNaming::Representative).unwrap();
        assert_eq!(c.apex.arity().len(), 2 + 1 - 1);
    }
}
