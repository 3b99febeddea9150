//! Type domains: classifications of data values by sorts, and the
//! infomorphisms between them.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result, Verdict};
use crate::sets::{compose, FinFunction, FinSet};
use crate::signatures::Signature;
use crate::tuples::Tuple;

/// A classification `⟨X, Y, ⊨⟩` of values `Y` by sorts `X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeDomain {
    sorts: FinSet,
    values: FinSet,
    // extent of each sort, in sort order
    extents: Vec<FinSet>,
}

impl TypeDomain {
    pub fn new<I, S, V>(sorts: FinSet, values: FinSet, classification: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, V)>,
        S: AsRef<str>,
        V: AsRef<str>,
    {
        let mut extents: Vec<BTreeSet<String>> = vec![BTreeSet::new(); sorts.len()];
        for (x, y) in classification {
            let (x, y) = (x.as_ref(), y.as_ref());
            let i = sorts.index_of(x).ok_or_else(|| Error::UnknownSort(x.to_string()))?;
            if !values.contains(y) {
                return Err(Error::NotAMember {
                    element: y.to_string(),
                    role: "value set",
                });
            }
            extents[i].insert(y.to_string());
        }
        Ok(TypeDomain {
            sorts,
            values,
            extents: extents.into_iter().map(FinSet::new).collect(),
        })
    }

    pub fn sorts(&self) -> &FinSet {
        &self.sorts
    }

    pub fn values(&self) -> &FinSet {
        &self.values
    }

    /// The values classified by sort `x`.
    pub fn extent(&self, x: &str) -> Result<&FinSet> {
        self.sorts
            .index_of(x)
            .map(|i| &self.extents[i])
            .ok_or_else(|| Error::UnknownSort(x.to_string()))
    }

    pub fn classifies(&self, value: &str, sort: &str) -> bool {
        self.extent(sort).is_ok_and(|e| e.contains(value))
    }

    /// All `(sort, value)` pairs, sorted.
    pub fn classification(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.sorts
            .iter()
            .zip(&self.extents)
            .flat_map(|(x, e)| e.iter().map(move |y| (x, y)))
    }
}

/// The type domain with no values over `sorts`.
pub fn empty_domain(sorts: FinSet) -> TypeDomain {
    TypeDomain::new(sorts, FinSet::empty(), Vec::<(&str, &str)>::new()).expect("no pairs")
}

/// Extent of `x` in `dom`.
pub fn extent<'a>(dom: &'a TypeDomain, x: &str) -> Result<&'a FinSet> {
    dom.extent(x)
}

/// A contravariant pair `⟨f, g⟩ : A₂ ⇄ A₁` with `f: X₂ → X₁` and
/// `g: Y₁ → Y₂` such that `g(y) ⊨₂ x` iff `y ⊨₁ f(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infomorphism {
    source: TypeDomain,
    target: TypeDomain,
    sort_map: FinFunction,
    value_map: FinFunction,
}

impl Infomorphism {
    pub fn new(source: TypeDomain, target: TypeDomain, sort_map: FinFunction, value_map: FinFunction) -> Result<Self> {
        let m = Infomorphism::unchecked(source, target, sort_map, value_map)?;
        match validate_infomorphism(&m) {
            Verdict::Accept => Ok(m),
            Verdict::Reject((sort, value)) => Err(Error::NotInfomorphism { sort, value }),
        }
    }

    /// Checks only that the component functions match the domains.
    pub fn unchecked(
        source: TypeDomain,
        target: TypeDomain,
        sort_map: FinFunction,
        value_map: FinFunction,
    ) -> Result<Self> {
        if sort_map.source() != source.sorts()
            || sort_map.target() != target.sorts()
            || value_map.source() != target.values()
            || value_map.target() != source.values()
        {
            return Err(Error::BoundaryMismatch(
                "infomorphism components do not match their type domains".into(),
            ));
        }
        Ok(Infomorphism {
            source,
            target,
            sort_map,
            value_map,
        })
    }

    pub fn identity(dom: &TypeDomain) -> Self {
        Infomorphism {
            source: dom.clone(),
            target: dom.clone(),
            sort_map: FinFunction::identity(dom.sorts()),
            value_map: FinFunction::identity(dom.values()),
        }
    }

    pub fn source(&self) -> &TypeDomain {
        &self.source
    }

    pub fn target(&self) -> &TypeDomain {
        &self.target
    }

    pub fn sort_map(&self) -> &FinFunction {
        &self.sort_map
    }

    pub fn value_map(&self) -> &FinFunction {
        &self.value_map
    }

    /// `self: A₃ ⇄ A₂` followed by `next: A₂ ⇄ A₁`. Value maps compose in reverse.
    pub fn then(&self, next: &Infomorphism) -> Result<Infomorphism> {
        Ok(Infomorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            sort_map: compose(&self.sort_map, &next.sort_map)?,
            value_map: compose(&next.value_map, &self.value_map)?,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.sort_map.is_identity() && self.value_map.is_identity()
    }

    /// Translates a value of the target domain into the source domain.
    pub fn translate(&self, y: &str) -> Option<&str> {
        self.value_map.apply(y)
    }
}

/// Accepts iff the infomorphism biconditional holds; otherwise returns the
/// first violating `(sort x₂, value y₁)` pair.
pub fn validate_infomorphism(m: &Infomorphism) -> Verdict<(String, String)> {
    for x2 in m.source.sorts().iter() {
        let x1 = m.sort_map.apply(x2).expect("total");
        for (y1, y2) in m.value_map.iter() {
            if m.source.classifies(y2, x2) != m.target.classifies(y1, x1) {
                return Verdict::Reject((x2.to_string(), y1.to_string()));
            }
        }
    }
    Verdict::Accept
}

/// `f⁻¹(A₁)` over `X₂`: same values, `y ⊨ x₂` iff `y ⊨₁ f(x₂)`.
pub fn inverse_image_domain(f: &FinFunction, dom: &TypeDomain) -> Result<TypeDomain> {
    if f.target() != dom.sorts() {
        return Err(Error::BoundaryMismatch(
            "inverse image along a map into different sorts".into(),
        ));
    }
    let extents = f.indices().iter().map(|&j| dom.extents[j].clone()).collect();
    Ok(TypeDomain {
        sorts: f.source().clone(),
        values: dom.values.clone(),
        extents,
    })
}

/// True iff `t` assigns every attribute of `sig` (and nothing else) a value
/// classified by the attribute's sort.
pub fn classify_tuple(dom: &TypeDomain, sig: &Signature, t: &Tuple) -> bool {
    illegal_attribute(dom, sig, t).is_none()
}

/// The first attribute at which `t` fails to be legal, if any.
pub(crate) fn illegal_attribute(dom: &TypeDomain, sig: &Signature, t: &Tuple) -> Option<String> {
    for (i, x) in sig.attributes() {
        match t.get(i) {
            Some(y) if dom.classifies(y, x) => {}
            _ => return Some(i.to_string()),
        }
    }
    t.attributes().find(|a| !sig.arity().contains(a)).map(str::to_string)
}

/// Tags a value with the 1-based index of the product factor it came from.
pub fn tag_value(k: usize, y: &str) -> String {
    format!("{k}:{y}")
}

/// Product of type domains over a shared sort set: the values are the
/// tagged disjoint union, each tagged value classified as in its factor.
/// Returns the product and its projection infomorphisms.
pub fn product_domains(sorts: &FinSet, doms: &[TypeDomain]) -> Result<(TypeDomain, Vec<Infomorphism>)> {
    if let Some(d) = doms.iter().find(|d| d.sorts() != sorts) {
        return Err(Error::BoundaryMismatch(format!(
            "factor sorts {:?} differ from {:?}",
            d.sorts(),
            sorts
        )));
    }
    let values = FinSet::new(
        doms.iter()
            .enumerate()
            .flat_map(|(k, d)| d.values().iter().map(move |y| tag_value(k + 1, y))),
    );
    let mut pairs: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (k, d) in doms.iter().enumerate() {
        for (x, y) in d.classification() {
            pairs.entry(x.to_string()).or_default().push(tag_value(k + 1, y));
        }
    }
    let product = TypeDomain::new(
        sorts.clone(),
        values.clone(),
        pairs
            .iter()
            .flat_map(|(x, ys)| ys.iter().map(move |y| (x.as_str(), y.as_str()))),
    )?;
    let projections = doms
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let tag = FinFunction::from_fn(d.values().clone(), values.clone(), |y| tag_value(k + 1, y))?;
            Infomorphism::new(product.clone(), d.clone(), FinFunction::identity(sorts), tag)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((product, projections))
}
