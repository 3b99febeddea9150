//! Joins, unions and finite limits of tables over one type domain.
//!
//! A limit is computed by gluing the signatures of the diagram, pulling
//! every table back to the glued signature, and intersecting the pulled-back
//! tables on their rows.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result, Verdict};
use crate::sets::{encode, pullback_set, pushout_set_named, ClassNaming, FinFunction};
use crate::signatures::{
    colimit_signatures, fiber_arity_maps, product_rec, Signature, SignatureColimit, SignatureDiagram,
};
use crate::tables::{compose_table_morphisms, substitute_table, validate_table_morphism, Table, TableMorphism};
use crate::tuples::{SignedDomain, SignedDomainMorphism, Tuple, DEFAULT_CAP};
use crate::typedomains::TypeDomain;

/// Naming and size options shared by the join operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinOptions {
    /// Labels used to qualify clashing (or, with `Qualified`, all) attribute names.
    pub labels: (String, String),
    pub naming: ClassNaming,
    pub cap: u128,
}

impl Default for JoinOptions {
    fn default() -> Self {
        JoinOptions {
            labels: ("1".into(), "2".into()),
            naming: ClassNaming::Representative,
            cap: DEFAULT_CAP,
        }
    }
}

/// A join with its two projections.
#[derive(Debug, Clone)]
pub struct Join {
    pub table: Table,
    pub left: TableMorphism,
    pub right: TableMorphism,
}

fn require_fiber(m: &TableMorphism) -> Result<()> {
    if !m.is_fiber() {
        return Err(Error::DomainMismatch(
            "morphism changes sorts or values; move tables into one type domain first".into(),
        ));
    }
    Ok(())
}

/// Joins an opspan `T₁ → T ← T₂` of fiber morphisms: signature is the
/// pushout of the two arity maps, keys the pullback of the two key maps,
/// and each row is the tuple restricting to both operand rows.
pub fn join_opspan(m1: &TableMorphism, m2: &TableMorphism, opts: &JoinOptions) -> Result<Join> {
    if m1.target() != m2.target() {
        return Err(Error::BoundaryMismatch("opspan legs have different targets".into()));
    }
    require_fiber(m1)?;
    require_fiber(m2)?;
    let (t1, t2) = (m1.source(), m2.source());
    let domain = t1.type_domain();
    if t2.type_domain() != domain {
        return Err(Error::DomainMismatch("joined tables use different type domains".into()));
    }
    let labels = (opts.labels.0.as_str(), opts.labels.1.as_str());
    let glued = pushout_set_named(m1.arity_map(), m2.arity_map(), labels, opts.naming)?;
    let mut typing = BTreeMap::new();
    for (sig, inj) in [(t1.signature(), &glued.left), (t2.signature(), &glued.right)] {
        for (i, c) in inj.iter() {
            typing.insert(c.to_string(), sig.sort_of(i).expect("typed").to_string());
        }
    }
    let signature = Signature::from_typing(FinFunction::from_pairs(
        glued.apex.clone(),
        domain.sorts().clone(),
        typing,
    )?);
    let keys = pullback_set(m1.key_map(), m2.key_map())?;
    let mut rows = Vec::with_capacity(keys.apex.len());
    for (n, key) in keys.apex.iter().enumerate() {
        let x = keys.left.source().get(n);
        debug_assert_eq!(x, key);
        let r1 = t1.row_at(keys.left.image_index(n));
        let r2 = t2.row_at(keys.right.image_index(n));
        let mut row: BTreeMap<String, String> = BTreeMap::new();
        for (r, inj) in [(r1, &glued.left), (r2, &glued.right)] {
            for (i, c) in inj.iter() {
                let v = r.get(i).expect("legal row");
                if let Some(prev) = row.insert(c.to_string(), v.to_string()) {
                    if prev != v {
                        return Err(Error::NotNatural(key.to_string()));
                    }
                }
            }
        }
        rows.push((key.to_string(), Tuple::new(row)));
    }
    let table = Table::unchecked(SignedDomain::new(signature, domain.clone())?, rows);
    let left = TableMorphism::in_fiber(table.clone(), t1.clone(), glued.left, keys.left)?;
    let right = TableMorphism::in_fiber(table.clone(), t2.clone(), glued.right, keys.right)?;
    Ok(Join { table, left, right })
}

/// The opspan used by [`natural_join`]: the table whose keys are all legal
/// tuples over the shared attributes, and the restriction maps into it.
#[derive(Debug, Clone)]
pub struct SharedApex {
    pub shared: Signature,
    pub apex: Table,
    pub left: TableMorphism,
    pub right: TableMorphism,
}

pub fn shared_apex(t1: &Table, t2: &Table, cap: u128) -> Result<SharedApex> {
    if t1.type_domain() != t2.type_domain() {
        return Err(Error::DomainMismatch("joined tables use different type domains".into()));
    }
    let domain = t1.type_domain();
    let mut shared = Vec::new();
    for (i, s) in t1.signature().attributes() {
        if let Some(r) = t2.signature().sort_of(i) {
            if r != s {
                return Err(Error::SortClash {
                    attribute: i.to_string(),
                    left: s.to_string(),
                    right: r.to_string(),
                });
            }
            shared.push((i.to_string(), s.to_string()));
        }
    }
    let shared = Signature::new(domain.sorts().clone(), shared)?;
    let d = SignedDomain::new(shared.clone(), domain.clone())?;
    let all = d.tuple_set().enumerate(cap)?;
    let apex = Table::unchecked(d, all.into_iter().map(|t| (t.canonical(), t)));
    let leg = |t: &Table| -> Result<TableMorphism> {
        let h = FinFunction::inclusion(shared.arity(), t.signature().arity())?;
        let k = FinFunction::from_fn(t.keys().clone(), apex.keys().clone(), |x| {
            t.row(x).expect("row").precompose(&h).expect("legal row").canonical()
        })?;
        TableMorphism::in_fiber(t.clone(), apex.clone(), h, k)
    };
    Ok(SharedApex {
        left: leg(t1)?,
        right: leg(t2)?,
        shared,
        apex,
    })
}

/// Classical natural join, computed as the join of the opspan into the
/// table of all tuples over the shared attributes.
pub fn natural_join(t1: &Table, t2: &Table, opts: &JoinOptions) -> Result<Join> {
    let span = shared_apex(t1, t2, opts.cap)?;
    join_opspan(&span.left, &span.right, opts)
}

/// A coproduct of tables over one signed domain with its injections.
#[derive(Debug, Clone)]
pub struct Coproduct {
    pub table: Table,
    pub injections: Vec<TableMorphism>,
}

/// Key of `k` from operand `n` (1-based) in a coproduct.
pub fn tagged_key(n: usize, k: &str) -> String {
    format!("{n}:{k}")
}

/// Tagged disjoint union of tables over `domain`; the empty family gives the empty table.
pub fn coproduct_tables(domain: &SignedDomain, tables: &[Table]) -> Result<Coproduct> {
    if tables.iter().any(|t| t.domain() != domain) {
        return Err(Error::DomainMismatch(
            "united tables use different signed domains".into(),
        ));
    }
    let rows = tables
        .iter()
        .enumerate()
        .flat_map(|(n, t)| t.rows().map(move |(k, row)| (tagged_key(n + 1, k), row.clone())));
    let table = Table::unchecked(domain.clone(), rows);
    let id = FinFunction::identity(domain.signature().arity());
    let injections = tables
        .iter()
        .enumerate()
        .map(|(n, t)| {
            let k = FinFunction::from_fn(t.keys().clone(), table.keys().clone(), |x| tagged_key(n + 1, x))?;
            TableMorphism::in_fiber(t.clone(), table.clone(), id.clone(), k)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Coproduct { table, injections })
}

pub fn union_same_signature(t1: &Table, t2: &Table) -> Result<Coproduct> {
    coproduct_tables(t1.domain(), &[t1.clone(), t2.clone()])
}

/// An edge of a [`TableDiagram`]: a fiber morphism from node `from` to node `to`.
#[derive(Debug, Clone)]
pub struct TableEdge {
    pub from: usize,
    pub to: usize,
    pub morphism: TableMorphism,
}

/// A finite diagram of tables and fiber morphisms over one type domain.
#[derive(Debug, Clone)]
pub struct TableDiagram {
    domain: TypeDomain,
    nodes: Vec<(String, Table)>,
    edges: Vec<TableEdge>,
}

impl TableDiagram {
    pub fn new(domain: TypeDomain, nodes: Vec<(String, Table)>, edges: Vec<TableEdge>) -> Result<Self> {
        if nodes.iter().any(|(_, t)| *t.type_domain() != domain) {
            return Err(Error::DomainMismatch(
                "diagram tables use different type domains".into(),
            ));
        }
        for e in &edges {
            let (Some((_, a)), Some((_, b))) = (nodes.get(e.from), nodes.get(e.to)) else {
                return Err(Error::BoundaryMismatch("edge endpoint out of range".into()));
            };
            if e.morphism.source() != a || e.morphism.target() != b {
                return Err(Error::BoundaryMismatch(
                    "edge morphism does not match its endpoints".into(),
                ));
            }
            require_fiber(&e.morphism)?;
        }
        Ok(TableDiagram { domain, nodes, edges })
    }

    /// The opspan `T₁ → T ← T₂` as a three-node diagram `[T₁, T, T₂]`.
    pub fn opspan(m1: &TableMorphism, m2: &TableMorphism) -> Result<Self> {
        TableDiagram::new(
            m1.source().type_domain().clone(),
            vec![
                ("1".into(), m1.source().clone()),
                ("0".into(), m1.target().clone()),
                ("2".into(), m2.source().clone()),
            ],
            vec![
                TableEdge {
                    from: 0,
                    to: 1,
                    morphism: m1.clone(),
                },
                TableEdge {
                    from: 2,
                    to: 1,
                    morphism: m2.clone(),
                },
            ],
        )
    }

    pub fn domain(&self) -> &TypeDomain {
        &self.domain
    }

    pub fn nodes(&self) -> &[(String, Table)] {
        &self.nodes
    }

    pub fn edges(&self) -> &[TableEdge] {
        &self.edges
    }

    /// Underlying signatures; each table edge `a → b` gives a signature edge `b → a`.
    pub fn signature_diagram(&self) -> SignatureDiagram {
        SignatureDiagram {
            sorts: self.domain.sorts().clone(),
            nodes: self
                .nodes
                .iter()
                .map(|(n, t)| (n.clone(), t.signature().clone()))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| (e.to, e.from, e.morphism.arity_map().clone()))
                .collect(),
        }
    }
}

/// A limit with its cone and the intermediate pulled-back tables.
#[derive(Debug, Clone)]
pub struct Limit {
    pub table: Table,
    pub legs: Vec<TableMorphism>,
    pub colimit: SignatureColimit,
    pub substituted: Vec<Table>,
}

/// Limit of a diagram in the fiber of one type domain.
///
/// Keys are the families `⟨k₁,…,kₙ⟩` of node keys whose pulled-back rows
/// agree and which are matched by every edge; the row is the common tuple.
pub fn limit_diagram(d: &TableDiagram, naming: ClassNaming, cap: u128) -> Result<Limit> {
    let colimit = colimit_signatures(&d.signature_diagram(), naming)?;
    let central = SignedDomain::new(colimit.apex.clone(), d.domain.clone())?;
    let mut substituted = Vec::with_capacity(d.nodes.len());
    // per node: central row → node keys carrying it
    let mut groups: Vec<BTreeMap<String, Vec<String>>> = Vec::with_capacity(d.nodes.len());
    let mut central_rows: BTreeMap<String, Tuple> = BTreeMap::new();
    for ((_, t), leg) in d.nodes.iter().zip(&colimit.legs) {
        let m = SignedDomainMorphism::in_fiber(leg.clone(), &d.domain)?;
        let (pulled, back) = substitute_table(&m, t, cap)?;
        let mut group: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (key, u) in pulled.rows() {
            let text = u.canonical();
            group
                .entry(text.clone())
                .or_default()
                .push(back.key(key).expect("total").to_string());
            central_rows.entry(text).or_insert_with(|| u.clone());
        }
        groups.push(group);
        substituted.push(pulled);
    }
    if d.nodes.is_empty() {
        central_rows.insert(Tuple::empty().canonical(), Tuple::empty());
    }
    let mut rows = Vec::new();
    let mut picks: Vec<Vec<String>> = Vec::new();
    for (text, u) in &central_rows {
        let lists: Option<Vec<&Vec<String>>> = groups.iter().map(|g| g.get(text)).collect();
        let Some(lists) = lists else { continue };
        let choices: Vec<Vec<usize>> = lists.iter().map(|l| (0..l.len()).collect()).collect();
        product_rec(&choices, &mut Vec::new(), &mut |pick| {
            let family: Vec<String> = pick.iter().zip(&lists).map(|(&i, l)| l[i].clone()).collect();
            let matched = d
                .edges
                .iter()
                .all(|e| e.morphism.key(&family[e.from]) == Some(family[e.to].as_str()));
            if matched {
                rows.push((encode(&family), u.clone()));
                picks.push(family);
            }
        });
    }
    let names: Vec<String> = rows.iter().map(|(k, _)| k.clone()).collect();
    let table = Table::unchecked(central, rows);
    let legs = d
        .nodes
        .iter()
        .enumerate()
        .map(|(n, (_, t))| {
            let k = FinFunction::from_pairs(
                table.keys().clone(),
                t.keys().clone(),
                names
                    .iter()
                    .zip(&picks)
                    .map(|(name, family)| (name.as_str(), family[n].as_str())),
            )?;
            TableMorphism::in_fiber(table.clone(), t.clone(), colimit.legs[n].arity_map().clone(), k)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Limit {
        table,
        legs,
        colimit,
        substituted,
    })
}

/// A claimed limit or coproduct whose universal property is to be checked.
#[derive(Debug, Clone, Copy)]
pub enum UniversalClaim<'a> {
    Limit {
        diagram: &'a TableDiagram,
        apex: &'a Table,
        legs: &'a [TableMorphism],
    },
    /// A coproduct in the fiber of one signed domain.
    Coproduct {
        domain: &'a SignedDomain,
        tables: &'a [Table],
        apex: &'a Table,
        injections: &'a [TableMorphism],
    },
}

/// Bounds on the competitors enumerated by [`check_universal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniversalBound {
    /// Largest competitor key set.
    pub max_keys: usize,
    /// Competitor signatures with more legal tuples than this are skipped.
    pub max_apex_tuples: u128,
    /// Largest number of signature cocones examined per competitor signature.
    pub max_families: usize,
}

impl Default for UniversalBound {
    fn default() -> Self {
        UniversalBound {
            max_keys: 3,
            max_apex_tuples: 4096,
            max_families: 256,
        }
    }
}

/// Checks that every competing cone (or cocone) within `bound` has exactly
/// one mediating morphism to (or from) the claimed apex.
///
/// For limits the competitors are tables over the claimed apex signature,
/// over each node signature, or over the empty signature. The number of
/// mediators from a competitor with keys `Z` is the number of signature
/// mediators times a product over `z ∈ Z` of per-key counts, so it is
/// computed exactly from the competitors with zero keys and with one key;
/// every larger competitor is covered by the same counts.
pub fn check_universal(claim: UniversalClaim<'_>, bound: &UniversalBound) -> Result<Verdict<String>> {
    match claim {
        UniversalClaim::Limit { diagram, apex, legs } => check_limit(diagram, apex, legs, bound),
        UniversalClaim::Coproduct {
            domain,
            tables,
            apex,
            injections,
        } => check_coproduct(domain, tables, apex, injections, bound),
    }
}

fn check_limit(
    d: &TableDiagram,
    apex: &Table,
    legs: &[TableMorphism],
    bound: &UniversalBound,
) -> Result<Verdict<String>> {
    let fail = |msg: String| Ok(Verdict::Reject(msg));
    if legs.len() != d.nodes.len() {
        return fail("one leg per node is required".into());
    }
    for (leg, (name, t)) in legs.iter().zip(&d.nodes) {
        if leg.source() != apex || leg.target() != t || !leg.is_fiber() || !validate_table_morphism(leg).is_accept() {
            return fail(format!("leg to `{name}` is not a morphism from the apex"));
        }
    }
    for e in &d.edges {
        let via = compose_table_morphisms(&legs[e.from], &e.morphism);
        if !matches!(via, Ok(ref m) if m.key_map() == legs[e.to].key_map() && m.arity_map() == legs[e.to].arity_map()) {
            return fail(format!("legs do not commute with the edge {} → {}", e.from, e.to));
        }
    }
    let sorts = d.domain.sorts();
    let mut candidates: Vec<Signature> = vec![apex.signature().clone()];
    candidates.extend(d.nodes.iter().map(|(_, t)| t.signature().clone()));
    candidates.push(Signature::empty(sorts.clone()));
    let mut seen = BTreeSet::new();
    candidates.retain(|s| seen.insert(format!("{:?}", s.typing())));

    // apex keys grouped by row for mediator counting
    let mut by_row: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (n, (_, row)) in apex.rows().enumerate() {
        by_row.entry(row.canonical()).or_default().push(n);
    }
    let q = apex.signature();
    for c in &candidates {
        let comp_domain = SignedDomain::new(c.clone(), d.domain.clone())?;
        if comp_domain.tuple_set().cardinality() > bound.max_apex_tuples {
            continue;
        }
        let rows = comp_domain.tuple_set().enumerate(bound.max_apex_tuples)?;
        for family in signature_cocones(d, c, bound.max_families) {
            // signature mediators h': Q → C with γₙ then h' = δₙ
            let mut choices = Vec::with_capacity(q.arity().len());
            for (attr, sort) in q.attributes() {
                let mut wanted = BTreeSet::new();
                for (leg, delta) in legs.iter().zip(&family) {
                    for i in leg.arity_map().preimage(attr) {
                        wanted.insert(delta.image_index(leg.arity_map().source().index_of(i).expect("member")));
                    }
                }
                let options: Vec<usize> = match wanted.len() {
                    0 => c
                        .attributes()
                        .enumerate()
                        .filter(|(_, (_, s))| *s == sort)
                        .map(|(j, _)| j)
                        .collect(),
                    1 => {
                        let j = *wanted.iter().next().expect("one");
                        if c.sort_of(c.arity().get(j)) == Some(sort) {
                            vec![j]
                        } else {
                            vec![]
                        }
                    }
                    _ => vec![],
                };
                choices.push(options);
            }
            let count: usize = choices.iter().map(Vec::len).product();
            if count != 1 {
                return fail(format!("a key-free competitor has {count} mediators"));
            }
            if bound.max_keys == 0 {
                continue;
            }
            let mediator = FinFunction::from_indices(
                q.arity().clone(),
                c.arity().clone(),
                choices.iter().map(|o| o[0]).collect(),
            )?;
            for r in &rows {
                let wanted_row = r.precompose(&mediator)?.canonical();
                let node_choices: Vec<Vec<usize>> = d
                    .nodes
                    .iter()
                    .zip(&family)
                    .map(|((_, t), delta)| {
                        let image = r.precompose(delta).expect("legal row");
                        t.rows()
                            .enumerate()
                            .filter(|(_, (_, row))| **row == image)
                            .map(|(j, _)| j)
                            .collect()
                    })
                    .collect();
                let mut verdict = None;
                product_rec(&node_choices, &mut Vec::new(), &mut |pick| {
                    if verdict.is_some() {
                        return;
                    }
                    let matched = d
                        .edges
                        .iter()
                        .all(|e| e.morphism.key_map().image_index(pick[e.from]) == pick[e.to]);
                    if !matched {
                        return;
                    }
                    let mediators = by_row
                        .get(&wanted_row)
                        .map(|ls| {
                            ls.iter()
                                .filter(|&&l| legs.iter().zip(pick).all(|(leg, &k)| leg.key_map().image_index(l) == k))
                                .count()
                        })
                        .unwrap_or(0);
                    if mediators != 1 {
                        verdict = Some(format!("a one-key competitor has {mediators} mediators"));
                    }
                });
                if let Some(msg) = verdict {
                    return fail(msg);
                }
            }
        }
    }
    Ok(Verdict::Accept)
}

/// Families `δₙ: Iₙ → C` of typing-preserving maps compatible with every edge.
fn signature_cocones(d: &TableDiagram, c: &Signature, limit: usize) -> Vec<Vec<FinFunction>> {
    let options: Vec<Vec<FinFunction>> = d
        .nodes
        .iter()
        .map(|(_, t)| fiber_arity_maps(t.signature(), c))
        .collect();
    let mut out = Vec::new();
    let mut current: Vec<FinFunction> = Vec::new();
    fn go(
        d: &TableDiagram,
        options: &[Vec<FinFunction>],
        current: &mut Vec<FinFunction>,
        out: &mut Vec<Vec<FinFunction>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        let n = current.len();
        if n == options.len() {
            out.push(current.clone());
            return;
        }
        for delta in &options[n] {
            current.push(delta.clone());
            // an edge a → b carries h: I_b → I_a and needs h then δ_a = δ_b
            let ok = d.edges.iter().filter(|e| e.from.max(e.to) == n).all(|e| {
                crate::sets::compose(e.morphism.arity_map(), &current[e.from])
                    .ok()
                    .as_ref()
                    == Some(&current[e.to])
            });
            if ok {
                go(d, options, current, out, limit);
            }
            current.pop();
        }
    }
    go(d, &options, &mut current, &mut out, limit);
    out
}

fn check_coproduct(
    domain: &SignedDomain,
    tables: &[Table],
    apex: &Table,
    injections: &[TableMorphism],
    bound: &UniversalBound,
) -> Result<Verdict<String>> {
    let fail = |msg: String| Ok(Verdict::Reject(msg));
    if injections.len() != tables.len() || apex.domain() != domain {
        return fail("one injection per table into a table over the same domain is required".into());
    }
    for (inj, t) in injections.iter().zip(tables) {
        if inj.source() != t
            || inj.target() != apex
            || !inj.is_fiber()
            || !inj.arity_map().is_identity()
            || !validate_table_morphism(inj).is_accept()
        {
            return fail("an injection is not a morphism into the apex".into());
        }
    }
    let mut candidate_rows: BTreeMap<String, Tuple> = BTreeMap::new();
    for t in tables.iter().chain([apex]) {
        for (_, row) in t.rows() {
            candidate_rows.insert(row.canonical(), row.clone());
        }
    }
    let candidate_rows: Vec<Tuple> = candidate_rows.into_values().collect();
    // preimages of each apex key under the injections
    let mut pre: Vec<Vec<(usize, usize)>> = vec![Vec::new(); apex.len()];
    for (n, inj) in injections.iter().enumerate() {
        for x in 0..inj.source().len() {
            pre[inj.key_map().image_index(x)].push((n, x));
        }
    }
    for size in 0..=bound.max_keys {
        let mut multisets = Vec::new();
        nondecreasing(candidate_rows.len(), size, &mut Vec::new(), &mut multisets);
        for z in multisets {
            let z_rows: Vec<&Tuple> = z.iter().map(|&i| &candidate_rows[i]).collect();
            let targets = |row: &Tuple| -> Vec<usize> {
                z_rows
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| **r == row)
                    .map(|(j, _)| j)
                    .collect()
            };
            if tables.iter().any(|t| t.rows().any(|(_, row)| targets(row).is_empty())) {
                continue;
            }
            for (u, (_, row)) in apex.rows().enumerate() {
                if pre[u].is_empty() {
                    let free = targets(row).len();
                    if free != 1 {
                        return fail(format!("a {size}-key competitor has {free} mediators"));
                    }
                    continue;
                }
                let choices: Vec<Vec<usize>> = pre[u].iter().map(|&(n, x)| targets(tables[n].row_at(x))).collect();
                let mut bad = false;
                product_rec(&choices, &mut Vec::new(), &mut |pick| {
                    if pick.iter().any(|&p| p != pick[0]) {
                        bad = true;
                    }
                });
                if bad {
                    return fail(format!("a {size}-key competitor has no mediator"));
                }
            }
        }
    }
    Ok(Verdict::Accept)
}

fn nondecreasing(n: usize, len: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == len {
        out.push(current.clone());
        return;
    }
    let start = current.last().copied().unwrap_or(0);
    for i in start..n {
        current.push(i);
        nondecreasing(n, len, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::FinSet;

    fn set(xs: &[&str]) -> FinSet {
        FinSet::new(xs.iter().copied())
    }

    fn tuple(pairs: &[(&str, &str)]) -> Tuple {
        pairs.iter().copied().collect()
    }

    fn domain() -> TypeDomain {
        TypeDomain::new(set(&["s"]), set(&["0", "1", "2"]), [("s", "0"), ("s", "1"), ("s", "2")]).unwrap()
    }

    fn table(attrs: &[&str], rows: &[&[&str]]) -> Table {
        let a = domain();
        let sig = Signature::new(a.sorts().clone(), attrs.iter().map(|x| (*x, "s"))).unwrap();
        let d = SignedDomain::new(sig, a).unwrap();
        Table::new(
            d,
            rows.iter().enumerate().map(|(n, r)| {
                (
                    format!("r{}", n + 1),
                    attrs.iter().copied().zip(r.iter().copied()).collect::<Tuple>(),
                )
            }),
        )
        .unwrap()
    }

    #[test]
    fn disjoint_headers_give_product() {
        let a = table(&["p"], &[&["0"], &["1"]]);
        let b = table(&["q"], &[&["0"], &["1"], &["2"]]);
        let j = natural_join(&a, &b, &JoinOptions::default()).unwrap();
        assert_eq!(j.table.len(), 6);
        assert_eq!(j.table.signature().arity(), &set(&["p", "q"]));
    }

    #[test]
    fn shared_attribute_join() {
        let a = table(&["p", "q"], &[&["0", "1"], &["1", "1"], &["2", "0"]]);
        let b = table(&["q", "r"], &[&["1", "2"], &["1", "0"], &["2", "2"]]);
        let j = natural_join(&a, &b, &JoinOptions::default()).unwrap();
        assert_eq!(j.table.len(), 4);
        assert!(j
            .table
            .rows()
            .any(|(_, r)| *r == tuple(&[("p", "1"), ("q", "1"), ("r", "0")])));
    }

    #[test]
    fn join_along_identity_is_the_operand() {
        let a = table(&["p", "q"], &[&["0", "1"], &["1", "1"]]);
        let b = table(&["p"], &[&["0"], &["1"], &["2"]]);
        let h = FinFunction::inclusion(b.signature().arity(), a.signature().arity()).unwrap();
        let k = FinFunction::from_pairs(a.keys().clone(), b.keys().clone(), [("r1", "r1"), ("r2", "r2")]).unwrap();
        let m1 = TableMorphism::in_fiber(a.clone(), b.clone(), h, k).unwrap();
        let m2 = TableMorphism::identity(&b);
        let j = join_opspan(&m1, &m2, &JoinOptions::default()).unwrap();
        assert!(j.table.is_isomorphic(&a));
    }

    #[test]
    fn sort_clash_is_reported() {
        let a = TypeDomain::new(set(&["s", "t"]), set(&["0"]), [("s", "0"), ("t", "0")]).unwrap();
        let s1 = Signature::new(a.sorts().clone(), [("p", "s")]).unwrap();
        let s2 = Signature::new(a.sorts().clone(), [("p", "t")]).unwrap();
        let t1 = Table::empty(SignedDomain::new(s1, a.clone()).unwrap());
        let t2 = Table::empty(SignedDomain::new(s2, a).unwrap());
        assert!(matches!(
            natural_join(&t1, &t2, &JoinOptions::default()),
            Err(Error::SortClash { attribute, .. }) if attribute == "p"
        ));
    }

    #[test]
    fn limit_of_one_table_and_empty_diagram() {
        let a = table(&["p"], &[&["0"], &["0"]]);
        let d = TableDiagram::new(domain(), vec![("a".into(), a.clone())], vec![]).unwrap();
        let l = limit_diagram(&d, ClassNaming::Representative, DEFAULT_CAP).unwrap();
        assert!(l.table.is_isomorphic(&a));
        assert!(l.legs[0].key_map().is_injective() && l.legs[0].key_map().is_surjective());
        let claim = UniversalClaim::Limit {
            diagram: &d,
            apex: &l.table,
            legs: &l.legs,
        };
        assert!(check_universal(claim, &UniversalBound::default()).unwrap().is_accept());

        let empty = TableDiagram::new(domain(), vec![], vec![]).unwrap();
        let l = limit_diagram(&empty, ClassNaming::Representative, DEFAULT_CAP).unwrap();
        assert_eq!(l.table.keys(), &set(&["⟨⟩"]));
        let claim = UniversalClaim::Limit {
            diagram: &empty,
            apex: &l.table,
            legs: &l.legs,
        };
        assert!(check_universal(claim, &UniversalBound::default()).unwrap().is_accept());
    }

    #[test]
    fn union_keeps_duplicate_rows() {
        let a = table(&["p"], &[&["0"]]);
        let u = union_same_signature(&a, &a).unwrap();
        assert_eq!(u.table.keys(), &set(&["1:r1", "2:r1"]));
        let tables = [a.clone(), a.clone()];
        let claim = UniversalClaim::Coproduct {
            domain: a.domain(),
            tables: &tables,
            apex: &u.table,
            injections: &u.injections,
        };
        assert!(check_universal(claim, &UniversalBound::default()).unwrap().is_accept());
        let empty = coproduct_tables(a.domain(), &[]).unwrap();
        assert!(empty.table.is_empty());
    }
}
