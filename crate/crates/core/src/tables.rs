//! Tables `⟨D, K, t⟩`, table morphisms, and the passages that move tables
//! between fibers: along signed-domain morphisms (`sigma_table`,
//! `substitute_table`), along infomorphisms (`acute_tbl`, `grave_tbl`) and
//! along signature morphisms (`grave_tbl_sign`).
//!
//! Orientation: a table morphism runs from a source table `T₁` to a target
//! table `T₂` on keys, while its signed-domain morphism runs from the
//! target's domain `D₂` to the source's domain `D₁`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result, Verdict};
use crate::sets::{compose, decode, encode_pair, FinFunction, FinSet};
use crate::signatures::{
    fiber_arity_maps, product_rec, substitute_along, sum_along, transpose_signature, unit_signature, SigTranspose,
    Signature, SignatureMorphism,
};
use crate::tuples::{bridge_levo, tuple_map, SignedDomain, SignedDomainMorphism, Tuple, TupleSet};
use crate::typedomains::{illegal_attribute, inverse_image_domain, Infomorphism, TypeDomain};

/// Keys with a legal tuple for each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    domain: SignedDomain,
    keys: FinSet,
    // row of each key, in key order
    rows: Vec<Tuple>,
}

impl Table {
    /// Builds a table, rejecting the first illegal row.
    pub fn new<I, K>(domain: SignedDomain, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, Tuple)>,
        K: Into<String>,
    {
        let table = Table::unchecked(domain, rows);
        match validate_table(&table) {
            Verdict::Accept => Ok(table),
            Verdict::Reject((key, attribute)) => Err(Error::InvalidTable { key, attribute }),
        }
    }

    /// Builds a table without checking row legality.
    pub fn unchecked<I, K>(domain: SignedDomain, rows: I) -> Self
    where
        I: IntoIterator<Item = (K, Tuple)>,
        K: Into<String>,
    {
        let rows: BTreeMap<String, Tuple> = rows.into_iter().map(|(k, t)| (k.into(), t)).collect();
        let keys = FinSet::new(rows.keys().cloned());
        Table {
            domain,
            keys,
            rows: rows.into_values().collect(),
        }
    }

    pub fn empty(domain: SignedDomain) -> Self {
        Table {
            domain,
            keys: FinSet::empty(),
            rows: Vec::new(),
        }
    }

    pub fn domain(&self) -> &SignedDomain {
        &self.domain
    }

    pub fn signature(&self) -> &Signature {
        self.domain.signature()
    }

    pub fn type_domain(&self) -> &TypeDomain {
        self.domain.domain()
    }

    pub fn keys(&self) -> &FinSet {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn row(&self, key: &str) -> Option<&Tuple> {
        self.keys.index_of(key).map(|i| &self.rows[i])
    }

    pub fn row_at(&self, i: usize) -> &Tuple {
        &self.rows[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &Tuple)> + '_ {
        self.keys.iter().zip(&self.rows)
    }

    /// Number of keys carrying each row, by canonical row text.
    pub fn row_multiset(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for t in &self.rows {
            *counts.entry(t.canonical()).or_default() += 1;
        }
        counts
    }

    /// True when some key bijection carries one table's rows onto the other's.
    pub fn is_isomorphic(&self, other: &Table) -> bool {
        self.domain == other.domain && self.row_multiset() == other.row_multiset()
    }

    /// The same rows under fresh keys `r1, r2, …` assigned in key order.
    pub fn renumbered(&self) -> Table {
        Table::unchecked(
            self.domain.clone(),
            self.rows
                .iter()
                .enumerate()
                .map(|(n, t)| (format!("r{}", n + 1), t.clone())),
        )
    }

    /// Row function as a map from keys to canonical row text.
    pub(crate) fn row_function(&self) -> FinFunction {
        let texts: Vec<String> = self.rows.iter().map(Tuple::canonical).collect();
        let target = FinSet::new(texts.iter().cloned());
        FinFunction::from_pairs(self.keys.clone(), target, self.keys.iter().zip(texts)).expect("rows cover keys")
    }
}

/// Accepts iff every row is legal; otherwise returns the first offending
/// `(key, attribute)`.
pub fn validate_table(t: &Table) -> Verdict<(String, String)> {
    t.rows()
        .find_map(|(k, row)| illegal_attribute(t.type_domain(), t.signature(), row).map(|a| (k.to_string(), a)))
        .into()
}

/// A morphism from `source` (`T₁`) to `target` (`T₂`): a signed-domain
/// morphism `D₂ → D₁` and a key map `K₁ → K₂` with
/// `t₂(k(x)) = tup(h,f,g)(t₁(x))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMorphism {
    source: Table,
    target: Table,
    dom_mor: SignedDomainMorphism,
    key_map: FinFunction,
}

impl TableMorphism {
    pub fn new(source: Table, target: Table, dom_mor: SignedDomainMorphism, key_map: FinFunction) -> Result<Self> {
        let m = TableMorphism::unchecked(source, target, dom_mor, key_map)?;
        match validate_table_morphism(&m) {
            Verdict::Accept => Ok(m),
            Verdict::Reject(key) => Err(Error::NotNatural(key)),
        }
    }

    /// Checks boundaries only, not naturality.
    pub fn unchecked(
        source: Table,
        target: Table,
        dom_mor: SignedDomainMorphism,
        key_map: FinFunction,
    ) -> Result<Self> {
        if dom_mor.source() != target.domain() || dom_mor.target() != source.domain() {
            return Err(Error::BoundaryMismatch(
                "signed domain morphism must run from the target's domain to the source's".into(),
            ));
        }
        if key_map.source() != source.keys() || key_map.target() != target.keys() {
            return Err(Error::BoundaryMismatch(
                "key map must run from source keys to target keys".into(),
            ));
        }
        Ok(TableMorphism {
            source,
            target,
            dom_mor,
            key_map,
        })
    }

    /// A morphism inside the fiber of one type domain: `arity_map` runs from
    /// the target's attributes to the source's, sorts and values are fixed.
    pub fn in_fiber(source: Table, target: Table, arity_map: FinFunction, key_map: FinFunction) -> Result<Self> {
        if source.type_domain() != target.type_domain() {
            return Err(Error::DomainMismatch(
                "fiber morphism between tables over different type domains".into(),
            ));
        }
        let sm = SignatureMorphism::in_fiber(target.signature().clone(), source.signature().clone(), arity_map)?;
        let dm = SignedDomainMorphism::in_fiber(sm, source.type_domain())?;
        TableMorphism::new(source, target, dm, key_map)
    }

    pub fn identity(t: &Table) -> Self {
        TableMorphism {
            source: t.clone(),
            target: t.clone(),
            dom_mor: SignedDomainMorphism::identity(t.domain()),
            key_map: FinFunction::identity(t.keys()),
        }
    }

    pub fn source(&self) -> &Table {
        &self.source
    }

    pub fn target(&self) -> &Table {
        &self.target
    }

    pub fn domain_morphism(&self) -> &SignedDomainMorphism {
        &self.dom_mor
    }

    pub fn arity_map(&self) -> &FinFunction {
        self.dom_mor.arity_map()
    }

    pub fn key_map(&self) -> &FinFunction {
        &self.key_map
    }

    pub fn key(&self, x: &str) -> Option<&str> {
        self.key_map.apply(x)
    }

    pub fn is_fiber(&self) -> bool {
        self.dom_mor.is_fiber()
    }
}

/// Accepts iff the naturality square commutes at every key; otherwise
/// returns the first offending source key.
pub fn validate_table_morphism(m: &TableMorphism) -> Verdict<String> {
    m.source
        .rows()
        .find(|(x, row)| {
            let there = m.target.row(m.key_map.apply(x).expect("total"));
            tuple_map(&m.dom_mor, row).ok().as_ref() != there
        })
        .map(|(x, _)| x.to_string())
        .into()
}

/// `m₁: T₁ → T₂` then `m₂: T₂ → T₃`. Key maps compose forward, signed-domain
/// morphisms in reverse.
pub fn compose_table_morphisms(m1: &TableMorphism, m2: &TableMorphism) -> Result<TableMorphism> {
    if m1.target != m2.source {
        return Err(Error::BoundaryMismatch("table morphisms do not compose".into()));
    }
    TableMorphism::new(
        m1.source.clone(),
        m2.target.clone(),
        m2.dom_mor.then(&m1.dom_mor)?,
        compose(&m1.key_map, &m2.key_map)?,
    )
}

fn require_domain(t: &Table, d: &SignedDomain, what: &str) -> Result<()> {
    if t.domain() != d {
        return Err(Error::DomainMismatch(format!(
            "{what}: table is over a different signed domain"
        )));
    }
    Ok(())
}

/// Pushes a table over `D₁` to `D₂` along `m: D₂ → D₁`: same keys, rows
/// through the tuple map.
pub fn sigma_table(m: &SignedDomainMorphism, t: &Table) -> Result<Table> {
    require_domain(t, m.target(), "sigma_table")?;
    let rows = t
        .rows()
        .map(|(k, row)| Ok((k.to_string(), tuple_map(m, row)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::unchecked(m.source().clone(), rows))
}

/// The tuples `u` of `tup(D₁)` with `tup(m)(u) = row`, computed attribute
/// by attribute rather than by scanning `tup(D₁)`.
pub fn preimage_tuples(m: &SignedDomainMorphism, row: &Tuple, cap: u128) -> Result<Vec<Tuple>> {
    let s1 = m.target().signature();
    let a1 = m.target().domain();
    let h = m.arity_map();
    let g = m.value_map();
    let mut choices: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (i1, x1) in s1.attributes() {
        let allowed: BTreeSet<String> = a1
            .extent(x1)?
            .iter()
            .filter(|y| {
                h.preimage(i1)
                    .iter()
                    .all(|i2| g.apply(y).is_some_and(|v| row.get(i2) == Some(v)))
            })
            .map(str::to_string)
            .collect();
        choices.insert(i1.to_string(), allowed);
    }
    TupleSet::from_choices(choices).enumerate(cap)
}

/// Key name of the pair `⟨k, u⟩` in a substituted table.
pub fn paired_key(k: &str, u: &Tuple) -> String {
    encode_pair(k, &u.canonical())
}

/// Pulls a table over `D₂` back to `D₁` along `m: D₂ → D₁`: keys are the
/// pairs `⟨k, u⟩` with `tup(m)(u) = t₂(k)`, rows are `u`. Also returns the
/// comparison morphism to the input, `⟨k, u⟩ ↦ k`.
pub fn substitute_table(m: &SignedDomainMorphism, t: &Table, cap: u128) -> Result<(Table, TableMorphism)> {
    require_domain(t, m.source(), "substitute_table")?;
    let mut rows = Vec::new();
    let mut back = Vec::new();
    for (k, row) in t.rows() {
        for u in preimage_tuples(m, row, cap)? {
            let key = paired_key(k, &u);
            back.push((key.clone(), k.to_string()));
            rows.push((key, u));
        }
    }
    let pulled = Table::unchecked(m.target().clone(), rows);
    let key_map = FinFunction::from_pairs(pulled.keys().clone(), t.keys().clone(), back)?;
    let leg = TableMorphism::new(pulled.clone(), t.clone(), m.clone(), key_map)?;
    Ok((pulled, leg))
}

/// One side of the hom-set bijection between `Σ_m(T₁) → T₂` over `D₂` and
/// `T₁ → m*(T₂)` over `D₁`; both are given by their key maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableLeg {
    /// `k: K₁ → K₂`.
    Sum(FinFunction),
    /// `k': K₁ → keys of m*(T₂)`.
    Pullback(FinFunction),
}

/// Adjoint transpose across `Σ_m ⊣ m*`: `k'(x) = ⟨k(x), t₁(x)⟩` one way,
/// `k = k'` then the first projection the other way.
pub fn transpose_table(
    m: &SignedDomainMorphism,
    t1: &Table,
    t2: &Table,
    leg: &TableLeg,
    cap: u128,
) -> Result<TableLeg> {
    require_domain(t1, m.target(), "transpose_table")?;
    let (pulled, counit) = substitute_table(m, t2, cap)?;
    match leg {
        TableLeg::Sum(k) => {
            TableMorphism::new(t1.clone(), t2.clone(), m.clone(), k.clone())?;
            let hat = FinFunction::from_fn(t1.keys().clone(), pulled.keys().clone(), |x| {
                paired_key(k.apply(x).expect("total"), t1.row(x).expect("row"))
            })?;
            Ok(TableLeg::Pullback(hat))
        }
        TableLeg::Pullback(hat) => {
            let id = FinFunction::identity(t1.signature().arity());
            TableMorphism::in_fiber(t1.clone(), pulled, id, hat.clone())?;
            Ok(TableLeg::Sum(compose(hat, counit.key_map())?))
        }
    }
}

/// Moves a table over `A₁` to `A₂` along `⟨f, g⟩ : A₂ ⇄ A₁`: signature
/// pulled back along `f`, same keys, rows through the levo bridge.
pub fn acute_tbl(im: &Infomorphism, t: &Table) -> Result<Table> {
    if t.type_domain() != im.target() {
        return Err(Error::DomainMismatch(
            "acute_tbl: table is not over the target domain".into(),
        ));
    }
    let (pulled, _) = substitute_along(im.sort_map(), t.signature())?;
    let domain = SignedDomain::new(pulled, im.source().clone())?;
    let rows = t
        .rows()
        .map(|(k, row)| Ok((k.to_string(), bridge_levo(im, t.signature(), row)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::unchecked(domain, rows))
}

/// Moves a table over `A₂` to `A₁`: signature pushed along `f`, keys the
/// pairs `⟨k, u⟩` with `u` legal in `A₁` and `u·g = t₂(k)`, rows `u`.
pub fn grave_tbl(im: &Infomorphism, t: &Table, cap: u128) -> Result<Table> {
    if t.type_domain() != im.source() {
        return Err(Error::DomainMismatch(
            "grave_tbl: table is not over the source domain".into(),
        ));
    }
    let pushed = sum_along(im.sort_map(), t.signature())?;
    let domain = SignedDomain::new(pushed.clone(), im.target().clone())?;
    let g = im.value_map();
    let mut rows = Vec::new();
    for (k, row) in t.rows() {
        let mut choices: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (i, x1) in pushed.attributes() {
            let want = row.get(i);
            let allowed = im
                .target()
                .extent(x1)?
                .iter()
                .filter(|y| g.apply(y) == want)
                .map(str::to_string)
                .collect();
            choices.insert(i.to_string(), allowed);
        }
        for u in TupleSet::from_choices(choices).enumerate(cap)? {
            rows.push((paired_key(k, &u), u));
        }
    }
    Ok(Table::unchecked(domain, rows))
}

/// Moves a table over `⟨I₁, s₁, A₁⟩` to `⟨I₂, s₂, f⁻¹(A₁)⟩` along
/// `⟨h, f⟩ : S₂ → S₁`: same keys, rows restricted along `h`.
pub fn grave_tbl_sign(sm: &SignatureMorphism, t: &Table) -> Result<Table> {
    if t.signature() != sm.target() {
        return Err(Error::BoundaryMismatch(
            "grave_tbl_sign: table is not over the target signature".into(),
        ));
    }
    let domain = SignedDomain::new(
        sm.source().clone(),
        inverse_image_domain(sm.sort_map(), t.type_domain())?,
    )?;
    let rows = t
        .rows()
        .map(|(k, row)| Ok((k.to_string(), row.precompose(sm.arity_map())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::unchecked(domain, rows))
}

/// All morphisms `source → target` inside the fiber of one type domain,
/// or `TooLarge` if there are more than `cap`.
pub fn fiber_homs(source: &Table, target: &Table, cap: u128) -> Result<Vec<TableMorphism>> {
    if source.type_domain() != target.type_domain() {
        return Err(Error::DomainMismatch("tables over different type domains".into()));
    }
    let mut out = Vec::new();
    for h in fiber_arity_maps(target.signature(), source.signature()) {
        let mut choices = Vec::with_capacity(source.len());
        for (_, row) in source.rows() {
            let image = row.precompose(&h)?;
            choices.push(
                target
                    .rows()
                    .enumerate()
                    .filter(|(_, (_, r))| **r == image)
                    .map(|(j, _)| j)
                    .collect::<Vec<_>>(),
            );
        }
        let count = choices
            .iter()
            .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128))
            .unwrap_or(u128::MAX);
        let total = (out.len() as u128).saturating_add(count);
        if total > cap {
            return Err(Error::TooLarge { count: total, cap });
        }
        let mut keys = Vec::new();
        product_rec(&choices, &mut Vec::new(), &mut |pick| keys.push(pick.to_vec()));
        for pick in keys {
            let k = FinFunction::from_indices(source.keys().clone(), target.keys().clone(), pick)?;
            out.push(TableMorphism::in_fiber(source.clone(), target.clone(), h.clone(), k)?);
        }
    }
    Ok(out)
}

/// The pair of passages whose adjointness is checked by
/// [`check_table_fiber_adjunction`].
pub trait TablePassages {
    fn acute(&self, im: &Infomorphism, t: &Table) -> Result<Table>;
    fn grave(&self, im: &Infomorphism, t: &Table, cap: u128) -> Result<Table>;
}

/// [`acute_tbl`] and [`grave_tbl`].
#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalPassages;

impl TablePassages for CanonicalPassages {
    fn acute(&self, im: &Infomorphism, t: &Table) -> Result<Table> {
        acute_tbl(im, t)
    }

    fn grave(&self, im: &Infomorphism, t: &Table, cap: u128) -> Result<Table> {
        grave_tbl(im, t, cap)
    }
}

/// Unit at `T₁`: `T₁ → grave(acute(T₁))`, attributes along the signature
/// counit, keys `x ↦ ⟨x, f̂·t₁(x)⟩`.
pub fn table_unit(im: &Infomorphism, t1: &Table, cap: u128) -> Result<TableMorphism> {
    let round = grave_tbl(im, &acute_tbl(im, t1)?, cap)?;
    let (_, counit) = substitute_along(im.sort_map(), t1.signature())?;
    let h = counit.arity_map().clone();
    let k = FinFunction::from_fn(t1.keys().clone(), round.keys().clone(), |x| {
        let row = t1.row(x).expect("row").precompose(&h).expect("legal row");
        paired_key(x, &row)
    })?;
    TableMorphism::in_fiber(t1.clone(), round, h, k)
}

/// Counit at `T₂`: `acute(grave(T₂)) → T₂`, attributes along the signature
/// unit, keys `⟨k, u⟩ ↦ k`.
pub fn table_counit(im: &Infomorphism, t2: &Table, cap: u128) -> Result<TableMorphism> {
    let round = acute_tbl(im, &grave_tbl(im, t2, cap)?)?;
    let unit = unit_signature(im.sort_map(), t2.signature())?;
    let k = FinFunction::from_fn(round.keys().clone(), t2.keys().clone(), |p| {
        decode(p).expect("paired key").swap_remove(0)
    })?;
    TableMorphism::in_fiber(round, t2.clone(), unit.arity_map().clone(), k)
}

/// `(ĥ, k₂) : acute(T₁) → T₂` ↦ `(ĥ then f̂, x ↦ ⟨k₂(x), h·t₁(x)⟩) : T₁ → grave(T₂)`.
fn to_grave_side(im: &Infomorphism, t1: &Table, t2: &Table, grave: &Table, l: &TableMorphism) -> Result<TableMorphism> {
    let SigTranspose::Sum(h) = transpose_signature(
        im.sort_map(),
        t2.signature(),
        t1.signature(),
        &SigTranspose::Pullback(l.arity_map().clone()),
    )?
    else {
        unreachable!("pullback side transposes to sum side");
    };
    if l.source().keys() != t1.keys() {
        return Err(Error::BoundaryMismatch("passage changed the key set".into()));
    }
    let k = FinFunction::from_fn(t1.keys().clone(), grave.keys().clone(), |x| {
        let row = t1.row(x).expect("row").precompose(&h).expect("legal row");
        paired_key(l.key(x).expect("total"), &row)
    })?;
    TableMorphism::in_fiber(t1.clone(), grave.clone(), h, k)
}

/// `(h, k₁) : T₁ → grave(T₂)` ↦ `(ĥ, k₁ then first projection) : acute(T₁) → T₂`.
fn to_acute_side(im: &Infomorphism, t1: &Table, t2: &Table, acute: &Table, r: &TableMorphism) -> Result<TableMorphism> {
    let SigTranspose::Pullback(hat) = transpose_signature(
        im.sort_map(),
        t2.signature(),
        t1.signature(),
        &SigTranspose::Sum(r.arity_map().clone()),
    )?
    else {
        unreachable!("sum side transposes to pullback side");
    };
    if acute.keys() != t1.keys() {
        return Err(Error::BoundaryMismatch("passage changed the key set".into()));
    }
    let k = FinFunction::from_fn(acute.keys().clone(), t2.keys().clone(), |x| {
        decode(r.key(x).expect("total"))
            .map(|mut p| p.swap_remove(0))
            .unwrap_or_default()
    })?;
    TableMorphism::in_fiber(acute.clone(), t2.clone(), hat, k)
}

/// Checks, for every `T₁` over `A₁` and `T₂` over `A₂` given, that the
/// transposes define a bijection `Hom(acute T₁, T₂) ≅ Hom(T₁, grave T₂)`
/// and that the unit and counit obtained from identities are the canonical
/// ones and satisfy the triangle identities. `cap` bounds both tuple
/// enumerations and hom-set sizes.
pub fn check_table_fiber_adjunction(
    im: &Infomorphism,
    passages: &dyn TablePassages,
    tables1: &[Table],
    tables2: &[Table],
    cap: u128,
) -> Result<Verdict<String>> {
    let fail = |msg: String| Ok(Verdict::Reject(msg));
    for t1 in tables1 {
        let acute = passages.acute(im, t1)?;
        let round = passages.grave(im, &acute, cap)?;
        let unit = match to_grave_side(im, t1, &acute, &round, &TableMorphism::identity(&acute)) {
            Ok(u) => u,
            Err(e) => return fail(format!("unit at a table with {} keys: {e}", t1.len())),
        };
        if unit != table_unit(im, t1, cap)? {
            return fail("unit differs from the canonical unit".into());
        }
        for t2 in tables2 {
            let grave = passages.grave(im, t2, cap)?;
            let left = fiber_homs(&acute, t2, cap)?;
            let right = fiber_homs(t1, &grave, cap)?;
            if left.len() != right.len() {
                return fail(format!(
                    "hom-sets differ in size: {} against {}",
                    left.len(),
                    right.len()
                ));
            }
            let mut seen = BTreeSet::new();
            for l in &left {
                let r = match to_grave_side(im, t1, t2, &grave, l) {
                    Ok(r) => r,
                    Err(e) => return fail(format!("transpose failed: {e}")),
                };
                let Some(pos) = right.iter().position(|c| *c == r) else {
                    return fail("transpose lands outside the hom-set".into());
                };
                if !seen.insert(pos) {
                    return fail("two morphisms share a transpose".into());
                }
                match to_acute_side(im, t1, t2, &acute, &r) {
                    Ok(back) if back == *l => {}
                    _ => return fail("transposing twice does not return the morphism".into()),
                }
            }
        }
    }
    for t2 in tables2 {
        let grave = passages.grave(im, t2, cap)?;
        let acute = passages.acute(im, &grave)?;
        let counit = match to_acute_side(im, &grave, t2, &acute, &TableMorphism::identity(&grave)) {
            Ok(c) => c,
            Err(e) => return fail(format!("counit: {e}")),
        };
        if counit != table_counit(im, t2, cap)? {
            return fail("counit differs from the canonical counit".into());
        }
        match to_grave_side(im, &grave, t2, &grave, &counit) {
            Ok(id) if id == TableMorphism::identity(&grave) => {}
            _ => return fail("counit does not transpose to the identity".into()),
        }
    }
    Ok(Verdict::Accept)
}

/// Checks row by row that pushing a table along `⟨h, f, g⟩` equals the
/// signature route (restrict along `h`, then translate values) and the
/// levo route (levo bridge, then restrict along the transpose of `h`).
pub fn check_sigma_factorization(m: &SignedDomainMorphism, t: &Table) -> Result<Verdict<String>> {
    let direct = sigma_table(m, t)?;
    let signature_route = grave_tbl_sign(m.signature_morphism(), t)?;
    let levo_route = acute_tbl(m.infomorphism(), t)?;
    let SigTranspose::Pullback(hat) = transpose_signature(
        m.sort_map(),
        m.source().signature(),
        m.target().signature(),
        &SigTranspose::Sum(m.arity_map().clone()),
    )?
    else {
        unreachable!("sum side transposes to pullback side");
    };
    for (k, row) in direct.rows() {
        let a = signature_route.row(k).expect("same keys").translate(m.value_map())?;
        let b = levo_route.row(k).expect("same keys").precompose(&hat)?;
        if a != *row || b != *row {
            return Ok(Verdict::Reject(k.to_string()));
        }
    }
    Ok(Verdict::Accept)
}

/// Checks that composing `m₁: T₁ → T₂` and `m₂: T₂ → T₃` through fiber
/// arrows (push `T₁` forward twice, then follow the key maps) agrees with
/// [`compose_table_morphisms`].
pub fn check_grothendieck_composition(m1: &TableMorphism, m2: &TableMorphism) -> Result<Verdict<String>> {
    let direct = compose_table_morphisms(m1, m2)?;
    let once = sigma_table(m1.domain_morphism(), m1.source())?;
    let twice = sigma_table(m2.domain_morphism(), &once)?;
    let along = sigma_table(direct.domain_morphism(), m1.source())?;
    if twice != along {
        return Ok(Verdict::Reject(
            "pushing forward twice differs from pushing along the composite".into(),
        ));
    }
    // fiber arrows Σ(T₁) → T₂ over D₂ and Σ(T₂) → T₃ over D₃
    let id2 = FinFunction::identity(m1.target().signature().arity());
    let id3 = FinFunction::identity(m2.target().signature().arity());
    let first = TableMorphism::in_fiber(once.clone(), m1.target().clone(), id2, m1.key_map().clone());
    let pushed_t2 = sigma_table(m2.domain_morphism(), m2.source())?;
    let second = TableMorphism::in_fiber(pushed_t2, m2.target().clone(), id3.clone(), m2.key_map().clone());
    if first.is_err() || second.is_err() {
        return Ok(Verdict::Reject("a key map is not a fiber arrow".into()));
    }
    let keys = compose(m1.key_map(), m2.key_map())?;
    if keys != *direct.key_map() {
        return Ok(Verdict::Reject("key maps differ".into()));
    }
    if TableMorphism::in_fiber(twice, m2.target().clone(), id3, keys).is_err() {
        return Ok(Verdict::Reject("composite key map is not a fiber arrow".into()));
    }
    Ok(Verdict::Accept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuples::DEFAULT_CAP;

    fn set(xs: &[&str]) -> FinSet {
        FinSet::new(xs.iter().copied())
    }

    fn tuple(pairs: &[(&str, &str)]) -> Tuple {
        pairs.iter().copied().collect()
    }

    fn people() -> Table {
        let a = TypeDomain::new(
            set(&["int", "str"]),
            set(&["1", "2", "ann", "bob"]),
            [("str", "ann"), ("str", "bob"), ("int", "1"), ("int", "2")],
        )
        .unwrap();
        let s = Signature::new(a.sorts().clone(), [("name", "str"), ("age", "int")]).unwrap();
        let d = SignedDomain::new(s, a).unwrap();
        Table::new(
            d,
            [
                ("x", tuple(&[("name", "ann"), ("age", "1")])),
                ("y", tuple(&[("name", "bob"), ("age", "1")])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn validate_table_cases() {
        let t = people();
        assert!(validate_table(&Table::empty(t.domain().clone())).is_accept());
        assert!(validate_table(&t).is_accept());
        let bad = Table::unchecked(t.domain().clone(), [("z", tuple(&[("name", "1"), ("age", "1")]))]);
        assert_eq!(validate_table(&bad), Verdict::Reject(("z".into(), "name".into())));
    }

    #[test]
    fn morphism_mutation_is_caught() {
        let t = people();
        assert!(validate_table_morphism(&TableMorphism::identity(&t)).is_accept());
        let names = Signature::new(t.signature().sorts().clone(), [("name", "str")]).unwrap();
        let h = FinFunction::inclusion(names.arity(), t.signature().arity()).unwrap();
        let sm = SignatureMorphism::in_fiber(names, t.signature().clone(), h).unwrap();
        let m = SignedDomainMorphism::in_fiber(sm, t.type_domain()).unwrap();
        let projected = sigma_table(&m, &t).unwrap();
        let k = FinFunction::identity(t.keys());
        assert!(TableMorphism::new(t.clone(), projected.clone(), m.clone(), k.clone()).is_ok());

        let mutated = Table::unchecked(
            projected.domain().clone(),
            [("x", tuple(&[("name", "ann")])), ("y", tuple(&[("name", "ann")]))],
        );
        let bad = TableMorphism::unchecked(t, mutated, m, k).unwrap();
        assert_eq!(validate_table_morphism(&bad), Verdict::Reject("y".into()));
    }

    #[test]
    fn substitute_identity_pairs_each_key_with_its_row() {
        let t = people();
        let id = SignedDomainMorphism::identity(t.domain());
        let (pulled, leg) = substitute_table(&id, &t, DEFAULT_CAP).unwrap();
        assert!(pulled.is_isomorphic(&t));
        assert!(leg.key_map().is_injective() && leg.key_map().is_surjective());
        let (empty, _) = substitute_table(&id, &Table::empty(t.domain().clone()), DEFAULT_CAP).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn transpose_round_trip_on_identity() {
        let t = people();
        let id = SignedDomainMorphism::identity(t.domain());
        let leg = TableLeg::Sum(FinFunction::identity(t.keys()));
        let there = transpose_table(&id, &t, &t, &leg, DEFAULT_CAP).unwrap();
        let back = transpose_table(&id, &t, &t, &there, DEFAULT_CAP).unwrap();
        assert_eq!(back, leg);
    }

    #[test]
    fn acute_grave_identity() {
        let t = people();
        let im = Infomorphism::identity(t.type_domain());
        let a = acute_tbl(&im, &t).unwrap();
        assert_eq!(a.keys(), t.keys());
        assert!(grave_tbl(&im, &t, DEFAULT_CAP).unwrap().is_isomorphic(&t));
        assert!(check_table_fiber_adjunction(
            &im,
            &CanonicalPassages,
            std::slice::from_ref(&t),
            std::slice::from_ref(&t),
            DEFAULT_CAP
        )
        .unwrap()
        .is_accept());
    }

    #[test]
    fn grave_sign_projects() {
        let t = people();
        let names = Signature::new(t.signature().sorts().clone(), [("name", "str")]).unwrap();
        let h = FinFunction::inclusion(names.arity(), t.signature().arity()).unwrap();
        let sm = SignatureMorphism::in_fiber(names, t.signature().clone(), h).unwrap();
        let g = grave_tbl_sign(&sm, &t).unwrap();
        assert_eq!(g.row("y"), Some(&tuple(&[("name", "bob")])));
        assert!(validate_table(&g).is_accept());
    }
}
