//! JSON and CSV documents for domains, signatures, tables, relations,
//! morphisms and diagrams, plus the workspace manifest that names them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Verdict};
use crate::queries::{TableDiagram, TableEdge};
use crate::relations::Relation;
use crate::sets::{FinFunction, FinSet};
use crate::signatures::{Signature, SignatureMorphism};
use crate::tables::{validate_table, validate_table_morphism, Table, TableMorphism};
use crate::tuples::{SignedDomain, SignedDomainMorphism, Tuple};
use crate::typedomains::{Infomorphism, TypeDomain};

/// Why a document could not be loaded. Everything except `Invalid` is a
/// resolution or I/O problem.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },

    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },

    #[error("unresolved {kind} `{name}`")]
    Unresolved { kind: &'static str, name: String },

    #[error("{what}: {source}")]
    Invalid { what: String, source: Error },
}

impl LoadError {
    /// True for malformed or unreadable inputs and dangling references.
    pub fn is_resolution(&self) -> bool {
        !matches!(self, LoadError::Invalid { .. })
    }
}

type Load<T> = std::result::Result<T, LoadError>;

fn invalid(what: impl Into<String>) -> impl FnOnce(Error) -> LoadError {
    let what = what.into();
    move |source| LoadError::Invalid { what, source }
}

fn read_text(path: &Path) -> Load<String> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.into(),
        source,
    })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Load<T> {
    serde_json::from_str(&read_text(path)?).map_err(|source| LoadError::Json {
        path: path.into(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureDoc {
    pub sorts: Vec<String>,
    pub attributes: BTreeMap<String, String>,
}

impl SignatureDoc {
    pub fn from_signature(s: &Signature) -> Self {
        SignatureDoc {
            sorts: s.sorts().as_slice().to_vec(),
            attributes: s.typing().to_map(),
        }
    }

    pub fn build(&self) -> crate::error::Result<Signature> {
        Signature::new(FinSet::new(self.sorts.iter()), self.attributes.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainDoc {
    pub sorts: Vec<String>,
    pub values: Vec<String>,
    pub classification: Vec<(String, String)>,
}

impl DomainDoc {
    pub fn from_domain(a: &TypeDomain) -> Self {
        DomainDoc {
            sorts: a.sorts().as_slice().to_vec(),
            values: a.values().as_slice().to_vec(),
            classification: a
                .classification()
                .map(|(x, y)| (x.to_string(), y.to_string()))
                .collect(),
        }
    }

    pub fn build(&self) -> crate::error::Result<TypeDomain> {
        TypeDomain::new(
            FinSet::new(self.sorts.iter()),
            FinSet::new(self.values.iter()),
            self.classification.clone(),
        )
    }
}

/// Either the name of a workspace object or the object itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Name(String),
    Inline(T),
}

pub type Rows = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub signature: Ref<SignatureDoc>,
    pub domain: Ref<DomainDoc>,
    pub rows: Rows,
}

impl TableDoc {
    pub fn from_table(t: &Table) -> Self {
        TableDoc {
            signature: Ref::Inline(SignatureDoc::from_signature(t.signature())),
            domain: Ref::Inline(DomainDoc::from_domain(t.type_domain())),
            rows: t.rows().map(|(k, r)| (k.to_string(), r.as_map().clone())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationDoc {
    pub signature: Ref<SignatureDoc>,
    pub domain: Ref<DomainDoc>,
    pub members: Vec<BTreeMap<String, String>>,
}

impl RelationDoc {
    pub fn from_relation(r: &Relation) -> Self {
        RelationDoc {
            signature: Ref::Inline(SignatureDoc::from_signature(r.domain().signature())),
            domain: Ref::Inline(DomainDoc::from_domain(r.domain().domain())),
            members: r.members().map(|t| t.as_map().clone()).collect(),
        }
    }
}

/// A table entry in the manifest: a JSON table file, or CSV rows with
/// named signature and domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableEntry {
    Json(PathBuf),
    Csv {
        csv: PathBuf,
        signature: String,
        domain: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Manifest {
    pub domains: BTreeMap<String, PathBuf>,
    pub signatures: BTreeMap<String, PathBuf>,
    pub tables: BTreeMap<String, TableEntry>,
    pub relations: BTreeMap<String, PathBuf>,
}

/// A signed domain given by reference or inline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedDomainDoc {
    pub signature: Ref<SignatureDoc>,
    pub domain: Ref<DomainDoc>,
}

/// A signed-domain morphism `source → target`. The arity map runs from
/// source attributes to target attributes, the sort map from source sorts
/// to target sorts, the value map from target values to source values.
/// Omitted sort and value maps mean the identity on a shared domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDoc {
    pub source: SignedDomainDoc,
    pub target: SignedDomainDoc,
    pub arity_map: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sort_map: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_map: Option<BTreeMap<String, String>>,
}

/// A fiber morphism between named tables. `arity_map` runs from target
/// attributes to source attributes, `key_map` from source keys to target keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub from: String,
    pub to: String,
    pub arity_map: BTreeMap<String, String>,
    pub key_map: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramDoc {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
}

/// Named objects loaded from a manifest. Tables are kept as read, legal or
/// not, so that validation can report every offending row.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub domains: BTreeMap<String, TypeDomain>,
    pub signatures: BTreeMap<String, Signature>,
    pub tables: BTreeMap<String, Table>,
    pub relations: BTreeMap<String, Relation>,
}

impl Workspace {
    /// Loads `workspace.json`; paths inside it are relative to its directory.
    pub fn load(manifest: &Path) -> Load<Workspace> {
        let m: Manifest = read_json(manifest)?;
        let base = manifest.parent().unwrap_or(Path::new("."));
        let mut ws = Workspace::default();
        for (name, path) in &m.domains {
            let doc: DomainDoc = read_json(&base.join(path))?;
            ws.domains
                .insert(name.clone(), doc.build().map_err(invalid(format!("domain {name}")))?);
        }
        for (name, path) in &m.signatures {
            let doc: SignatureDoc = read_json(&base.join(path))?;
            ws.signatures
                .insert(name.clone(), doc.build().map_err(invalid(format!("signature {name}")))?);
        }
        for (name, entry) in &m.tables {
            let t = match entry {
                TableEntry::Json(path) => {
                    let doc: TableDoc = read_json(&base.join(path))?;
                    ws.table_from_doc(name, &doc)?
                }
                TableEntry::Csv { csv, signature, domain } => {
                    let d = ws.signed_domain(name, &Ref::Name(signature.clone()), &Ref::Name(domain.clone()))?;
                    let rows = read_csv_rows(&base.join(csv))?;
                    Table::unchecked(d, rows)
                }
            };
            ws.tables.insert(name.clone(), t);
        }
        for (name, path) in &m.relations {
            let doc: RelationDoc = read_json(&base.join(path))?;
            let d = ws.signed_domain(name, &doc.signature, &doc.domain)?;
            let r = Relation::new(d, doc.members.iter().cloned().map(Tuple::new))
                .map_err(invalid(format!("relation {name}")))?;
            ws.relations.insert(name.clone(), r);
        }
        Ok(ws)
    }

    pub fn signature(&self, r: &Ref<SignatureDoc>) -> Load<Signature> {
        match r {
            Ref::Name(n) => self.signatures.get(n).cloned().ok_or_else(|| LoadError::Unresolved {
                kind: "signature",
                name: n.clone(),
            }),
            Ref::Inline(doc) => doc.build().map_err(invalid("inline signature")),
        }
    }

    pub fn domain(&self, r: &Ref<DomainDoc>) -> Load<TypeDomain> {
        match r {
            Ref::Name(n) => self.domains.get(n).cloned().ok_or_else(|| LoadError::Unresolved {
                kind: "domain",
                name: n.clone(),
            }),
            Ref::Inline(doc) => doc.build().map_err(invalid("inline domain")),
        }
    }

    fn signed_domain(&self, what: &str, s: &Ref<SignatureDoc>, a: &Ref<DomainDoc>) -> Load<SignedDomain> {
        SignedDomain::new(self.signature(s)?, self.domain(a)?).map_err(invalid(what))
    }

    pub fn table(&self, name: &str) -> Load<&Table> {
        self.tables.get(name).ok_or_else(|| LoadError::Unresolved {
            kind: "table",
            name: name.into(),
        })
    }

    pub fn relation(&self, name: &str) -> Load<&Relation> {
        self.relations.get(name).ok_or_else(|| LoadError::Unresolved {
            kind: "relation",
            name: name.into(),
        })
    }

    /// A table from its document, without checking its rows.
    pub fn table_from_doc(&self, name: &str, doc: &TableDoc) -> Load<Table> {
        let d = self.signed_domain(name, &doc.signature, &doc.domain)?;
        Ok(Table::unchecked(
            d,
            doc.rows.iter().map(|(k, r)| (k.clone(), Tuple::new(r.clone()))),
        ))
    }

    /// One line per illegal table, naming the offending key and attribute.
    pub fn validate(&self) -> Vec<String> {
        self.tables
            .iter()
            .filter_map(|(name, t)| match validate_table(t) {
                Verdict::Accept => None,
                Verdict::Reject((k, a)) => Some(format!(
                    "table {name}: key `{k}` attribute `{a}` has {}",
                    match t.row(&k).and_then(|r| r.get(&a)) {
                        Some(v) => format!(
                            "value `{v}` outside the extent of sort `{}`",
                            t.signature().sort_of(&a).unwrap_or("?")
                        ),
                        None => "no legal value".to_string(),
                    }
                )),
            })
            .collect()
    }

    /// The table `name`, rejected if any row is illegal.
    pub fn valid_table(&self, name: &str) -> Load<&Table> {
        let t = self.table(name)?;
        match validate_table(t) {
            Verdict::Accept => Ok(t),
            Verdict::Reject((key, attribute)) => Err(LoadError::Invalid {
                what: format!("table {name}"),
                source: Error::InvalidTable { key, attribute },
            }),
        }
    }

    pub fn morphism(&self, doc: &MorphismDoc) -> Load<SignedDomainMorphism> {
        let source = self.signed_domain("morphism source", &doc.source.signature, &doc.source.domain)?;
        let target = self.signed_domain("morphism target", &doc.target.signature, &doc.target.domain)?;
        let what = "morphism";
        let build = || -> crate::error::Result<SignedDomainMorphism> {
            let h = FinFunction::from_pairs(
                source.signature().arity().clone(),
                target.signature().arity().clone(),
                doc.arity_map.clone(),
            )?;
            let (a2, a1) = (source.domain(), target.domain());
            let f = match &doc.sort_map {
                Some(f) => FinFunction::from_pairs(a2.sorts().clone(), a1.sorts().clone(), f.clone())?,
                None => FinFunction::identity(a1.sorts()),
            };
            let g = match &doc.value_map {
                Some(g) => FinFunction::from_pairs(a1.values().clone(), a2.values().clone(), g.clone())?,
                None => FinFunction::identity(a1.values()),
            };
            if (doc.sort_map.is_none() || doc.value_map.is_none()) && a1 != a2 {
                return Err(Error::DomainMismatch(
                    "omitted sort or value map needs one shared domain".into(),
                ));
            }
            let sm = SignatureMorphism::new(source.signature().clone(), target.signature().clone(), h, f.clone())?;
            let im = Infomorphism::new(a2.clone(), a1.clone(), f, g)?;
            SignedDomainMorphism::new(sm, im)
        };
        build().map_err(invalid(what))
    }

    pub fn diagram(&self, doc: &DiagramDoc) -> Load<TableDiagram> {
        let mut nodes = Vec::new();
        for n in &doc.nodes {
            nodes.push((n.clone(), self.valid_table(n)?.clone()));
        }
        let index = |n: &str| {
            doc.nodes
                .iter()
                .position(|m| m == n)
                .ok_or_else(|| LoadError::Unresolved {
                    kind: "diagram node",
                    name: n.into(),
                })
        };
        let mut edges = Vec::new();
        for e in &doc.edges {
            let (from, to) = (index(&e.from)?, index(&e.to)?);
            let (s, t) = (&nodes[from].1, &nodes[to].1);
            let what = format!("edge {} → {}", e.from, e.to);
            let m = FinFunction::from_pairs(
                t.signature().arity().clone(),
                s.signature().arity().clone(),
                e.arity_map.clone(),
            )
            .and_then(|h| {
                let k = FinFunction::from_pairs(s.keys().clone(), t.keys().clone(), e.key_map.clone())?;
                TableMorphism::in_fiber(s.clone(), t.clone(), h, k)
            })
            .map_err(invalid(what.clone()))?;
            if let Verdict::Reject(k) = validate_table_morphism(&m) {
                return Err(LoadError::Invalid {
                    what,
                    source: Error::NotNatural(k),
                });
            }
            edges.push(TableEdge { from, to, morphism: m });
        }
        let domain = nodes
            .first()
            .map(|(_, t)| t.type_domain().clone())
            .ok_or_else(|| LoadError::Unresolved {
                kind: "diagram node",
                name: "(none)".into(),
            })?;
        TableDiagram::new(domain, nodes, edges).map_err(invalid("diagram"))
    }
}

pub fn read_document<T: for<'de> Deserialize<'de>>(path: &Path) -> Load<T> {
    read_json(path)
}

/// Rows of a CSV file keyed `r1, r2, …` in file order.
pub fn read_csv_rows(path: &Path) -> Load<Vec<(String, Tuple)>> {
    let err = |source| LoadError::Csv {
        path: path.into(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(err)?;
    let header = reader.headers().map_err(err)?.clone();
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(err)?;
        let row = header
            .iter()
            .zip(record.iter())
            .map(|(a, v)| (a.to_string(), v.to_string()))
            .collect();
        rows.push((format!("r{}", n + 1), Tuple::new(row)));
    }
    Ok(rows)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn table_to_json(t: &Table) -> String {
    to_json(&TableDoc::from_table(t))
}

/// CSV with one column per attribute in name order and one line per key in
/// key order. Keys are not written.
pub fn table_to_csv(t: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let attrs: Vec<&str> = t.signature().arity().iter().collect();
    w.write_record(&attrs).expect("in-memory write");
    for (_, row) in t.rows() {
        w.write_record(attrs.iter().map(|a| row.get(a).unwrap_or("")))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn relation_to_json(r: &Relation) -> String {
    to_json(&RelationDoc::from_relation(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let a = TypeDomain::new(
            FinSet::new(["n", "c"]),
            FinSet::new(["1", "2", "red"]),
            [("n", "1"), ("n", "2"), ("c", "red")],
        )
        .unwrap();
        let s = Signature::new(a.sorts().clone(), [("id", "n"), ("colour", "c")]).unwrap();
        let d = SignedDomain::new(s, a).unwrap();
        let row = |i: &str| Tuple::new([("id".into(), i.into()), ("colour".into(), "red".into())].into());
        Table::new(d, [("k1", row("1")), ("k2", row("2"))]).unwrap()
    }

    #[test]
    fn table_json_round_trip_is_componentwise_equal() {
        let t = sample();
        let doc: TableDoc = serde_json::from_str(&table_to_json(&t)).unwrap();
        assert_eq!(Workspace::default().table_from_doc("t", &doc).unwrap(), t);
    }

    #[test]
    fn unresolved_signature_is_a_resolution_error() {
        let doc = TableDoc {
            signature: Ref::Name("missing".into()),
            domain: Ref::Inline(DomainDoc::from_domain(sample().type_domain())),
            rows: Rows::new(),
        };
        let err = Workspace::default().table_from_doc("t", &doc).unwrap_err();
        assert!(err.is_resolution());
    }

    #[test]
    fn csv_lists_rows_in_key_order() {
        assert_eq!(table_to_csv(&sample()), "colour,id\nred,1\nred,2\n");
    }
}
