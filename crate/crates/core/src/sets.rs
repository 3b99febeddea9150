//! Finite sets of symbols, total functions between them, and the finite
//! (co)limit constructions of `Set` used by every other module.
//!
//! Elements are text tokens kept in lexicographic order. Composite elements
//! (pairs, tuples of keys) are named with the bracket encoding produced by
//! [`encode`], which is injective and can be undone with [`decode`].

use std::collections::BTreeMap;
use std::fmt;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};

const OPEN: char = '⟨';
const CLOSE: char = '⟩';
const SEP: char = ',';
const ESC: char = '\\';
// `\∅` is an empty atom, so that `⟨⟩` and the one-part `⟨""⟩` stay distinct
const EMPTY: char = '∅';
const EMPTY_ATOM: &str = "\\∅";

/// Encodes a sequence of symbols as one composite symbol `⟨a,b,…⟩`.
///
/// Parts that are themselves composites are embedded verbatim; atoms have
/// the bracket, separator and escape characters backslash-escaped.
pub fn encode<S: AsRef<str>>(parts: &[S]) -> String {
    let mut out = String::new();
    out.push(OPEN);
    for (n, part) in parts.iter().enumerate() {
        if n > 0 {
            out.push(SEP);
        }
        let part = part.as_ref();
        if is_composite(part) {
            out.push_str(part);
        } else if part.is_empty() {
            out.push_str(EMPTY_ATOM);
        } else {
            for c in part.chars() {
                if matches!(c, OPEN | CLOSE | SEP | ESC) {
                    out.push(ESC);
                }
                out.push(c);
            }
        }
    }
    out.push(CLOSE);
    out
}

/// Encodes a pair `⟨a,b⟩`.
pub fn encode_pair(a: &str, b: &str) -> String {
    encode(&[a, b])
}

/// Splits a composite symbol back into its parts. Returns `None` for atoms.
pub fn decode(symbol: &str) -> Option<Vec<String>> {
    if !is_composite(symbol) {
        return None;
    }
    let inner: Vec<char> = symbol.chars().collect();
    let inner = &inner[1..inner.len() - 1];
    if inner.is_empty() {
        return Some(Vec::new());
    }
    let mut parts = Vec::new();
    let mut raw = String::new();
    let mut depth = 0usize;
    let mut i = 0;
    while i < inner.len() {
        let c = inner[i];
        match c {
            ESC => {
                raw.push(c);
                raw.push(inner[i + 1]);
                i += 1;
            }
            OPEN => {
                depth += 1;
                raw.push(c);
            }
            CLOSE => {
                depth -= 1;
                raw.push(c);
            }
            SEP if depth == 0 => parts.push(std::mem::take(&mut raw)),
            _ => raw.push(c),
        }
        i += 1;
    }
    parts.push(raw);
    Some(
        parts
            .into_iter()
            .map(|p| match p {
                p if is_composite(&p) => p,
                p if p == EMPTY_ATOM => String::new(),
                p => unescape(&p),
            })
            .collect(),
    )
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == ESC {
            if let Some(next) = chars.next() {
                out.push(next);
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// True when `s` is a well-formed bracket encoding.
fn is_composite(s: &str) -> bool {
    let chars: Vec<char> = s.chars().collect();
    if chars.len() < 2 || chars[0] != OPEN || chars[chars.len() - 1] != CLOSE {
        return false;
    }
    let mut depth = 0i64;
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            ESC => {
                if i + 1 >= chars.len() || !matches!(chars[i + 1], OPEN | CLOSE | SEP | ESC | EMPTY) {
                    return false;
                }
                i += 1;
            }
            OPEN => depth += 1,
            CLOSE => {
                depth -= 1;
                // the outermost bracket may only close at the very end
                if depth == 0 && i != chars.len() - 1 {
                    return false;
                }
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
        i += 1;
    }
    depth == 0
}

/// A finite set of symbols in lexicographic order.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinSet {
    elems: Vec<String>,
}

impl FinSet {
    /// Builds a set from any collection of symbols; duplicates collapse.
    pub fn new<I, S>(elems: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut elems: Vec<String> = elems.into_iter().map(Into::into).collect();
        elems.sort();
        elems.dedup();
        FinSet { elems }
    }

    pub fn empty() -> Self {
        FinSet::default()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn index_of(&self, x: &str) -> Option<usize> {
        self.elems.binary_search_by(|e| e.as_str().cmp(x)).ok()
    }

    pub fn contains(&self, x: &str) -> bool {
        self.index_of(x).is_some()
    }

    pub fn get(&self, i: usize) -> &str {
        &self.elems[i]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &str> + Clone + '_ {
        self.elems.iter().map(String::as_str)
    }

    pub fn as_slice(&self) -> &[String] {
        &self.elems
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    fn require(&self, x: &str, role: &'static str) -> Result<usize> {
        self.index_of(x).ok_or_else(|| Error::NotAMember {
            element: x.to_string(),
            role,
        })
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elems.iter()).finish()
    }
}

impl<S: Into<String>> FromIterator<S> for FinSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        FinSet::new(iter)
    }
}

/// A total function between finite sets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinFunction {
    source: FinSet,
    target: FinSet,
    // image index in `target` of each source element, in source order
    images: Vec<usize>,
}

impl FinFunction {
    /// Builds a function from an assignment, checking totality and codomain.
    pub fn from_pairs<I, A, B>(source: FinSet, target: FinSet, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut images = vec![usize::MAX; source.len()];
        for (a, b) in pairs {
            let i = source.require(a.as_ref(), "function source")?;
            let j = target.require(b.as_ref(), "function target")?;
            if images[i] != usize::MAX && images[i] != j {
                return Err(Error::BoundaryMismatch(format!("`{}` assigned twice", a.as_ref())));
            }
            images[i] = j;
        }
        if let Some(i) = images.iter().position(|&j| j == usize::MAX) {
            return Err(Error::NotTotal(source.get(i).to_string()));
        }
        Ok(FinFunction { source, target, images })
    }

    /// Builds a function by evaluating `rule` on every source element.
    pub fn from_fn<F, S>(source: FinSet, target: FinSet, mut rule: F) -> Result<Self>
    where
        F: FnMut(&str) -> S,
        S: AsRef<str>,
    {
        let images = source
            .iter()
            .map(|x| target.require(rule(x).as_ref(), "function target"))
            .collect::<Result<Vec<_>>>()?;
        Ok(FinFunction { source, target, images })
    }

    /// Builds a function from target indices given in source order.
    pub fn from_indices(source: FinSet, target: FinSet, images: Vec<usize>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::BoundaryMismatch(format!(
                "{} images for {} source elements",
                images.len(),
                source.len()
            )));
        }
        if let Some(&j) = images.iter().find(|&&j| j >= target.len()) {
            return Err(Error::NotAMember {
                element: format!("#{j}"),
                role: "function target",
            });
        }
        Ok(FinFunction { source, target, images })
    }

    pub fn identity(set: &FinSet) -> Self {
        FinFunction {
            source: set.clone(),
            target: set.clone(),
            images: (0..set.len()).collect(),
        }
    }

    /// Inclusion of a subset; fails if `sub` is not contained in `sup`.
    pub fn inclusion(sub: &FinSet, sup: &FinSet) -> Result<Self> {
        FinFunction::from_fn(sub.clone(), sup.clone(), |x| x.to_string())
    }

    pub fn source(&self) -> &FinSet {
        &self.source
    }

    pub fn target(&self) -> &FinSet {
        &self.target
    }

    pub fn apply(&self, x: &str) -> Option<&str> {
        self.source.index_of(x).map(|i| self.target.get(self.images[i]))
    }

    /// Image index of the source element at index `i`.
    pub fn image_index(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn indices(&self) -> &[usize] {
        &self.images
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.source
            .iter()
            .zip(&self.images)
            .map(|(x, &j)| (x, self.target.get(j)))
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        self.images.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.len()];
        for &j in &self.images {
            hit[j] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Diagrammatic composite: first `self`, then `next`.
    pub fn then(&self, next: &FinFunction) -> Result<FinFunction> {
        compose(self, next)
    }

    /// Same assignment with a different (containing) codomain.
    pub fn retarget(&self, target: &FinSet) -> Result<FinFunction> {
        FinFunction::from_fn(self.source.clone(), target.clone(), |x| {
            self.apply(x).expect("source element").to_string()
        })
    }

    /// Elements of the source mapped onto `y`.
    pub fn preimage(&self, y: &str) -> Vec<&str> {
        match self.target.index_of(y) {
            None => Vec::new(),
            Some(j) => self
                .source
                .iter()
                .zip(&self.images)
                .filter(|(_, &k)| k == j)
                .map(|(x, _)| x)
                .collect(),
        }
    }
}

impl fmt::Debug for FinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

/// Composes `f` then `g` (`g ∘ f`).
pub fn compose(f: &FinFunction, g: &FinFunction) -> Result<FinFunction> {
    if f.target != g.source {
        return Err(Error::BoundaryMismatch(format!(
            "cannot compose: target {:?} differs from source {:?}",
            f.target, g.source
        )));
    }
    Ok(FinFunction {
        source: f.source.clone(),
        target: g.target.clone(),
        images: f.images.iter().map(|&j| g.images[j]).collect(),
    })
}

/// A span `left ← apex → right`, used for pullbacks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub apex: FinSet,
    pub left: FinFunction,
    pub right: FinFunction,
}

/// A cospan `left → apex ← right`, used for pushouts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cospan {
    pub apex: FinSet,
    pub left: FinFunction,
    pub right: FinFunction,
}

/// Pullback of `f: A → C` and `g: B → C`: the pairs `⟨a,b⟩` with `f(a) = g(b)`.
pub fn pullback_set(f: &FinFunction, g: &FinFunction) -> Result<Span> {
    if f.target != g.target {
        return Err(Error::BoundaryMismatch("pullback legs have different targets".into()));
    }
    // group the right-hand side by image so each left element meets only its fiber
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); g.target.len()];
    for (b, &c) in g.images.iter().enumerate() {
        fibers[c].push(b);
    }
    let mut named: Vec<(String, usize, usize)> = Vec::new();
    for (a, &c) in f.images.iter().enumerate() {
        for &b in &fibers[c] {
            named.push((encode_pair(f.source.get(a), g.source.get(b)), a, b));
        }
    }
    named.sort();
    let apex = FinSet {
        elems: named.iter().map(|(n, _, _)| n.clone()).collect(),
    };
    let left = FinFunction {
        source: apex.clone(),
        target: f.source.clone(),
        images: named.iter().map(|&(_, a, _)| a).collect(),
    };
    let right = FinFunction {
        source: apex.clone(),
        target: g.source.clone(),
        images: named.iter().map(|&(_, _, b)| b).collect(),
    };
    Ok(Span { apex, left, right })
}

/// How equivalence classes of a quotient are named.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClassNaming {
    /// Lexicographically least raw member; qualified by part label only on a clash.
    #[default]
    Representative,
    /// Always `label.member` using the least member.
    Qualified,
}

/// One summand of a [`glue`] colimit.
#[derive(Debug, Clone)]
pub struct Part<'a> {
    pub label: &'a str,
    pub set: &'a FinSet,
}

/// Two `(part, element)` positions to be identified.
pub type Identification = ((usize, usize), (usize, usize));

/// Colimit of a family of sets under a list of identifications: the
/// coproduct of the parts quotiented by the equivalence generated by the
/// given `((part, element), (part, element))` pairs. Returns the quotient and
/// one injection per part.
pub fn glue(
    parts: &[Part<'_>],
    identify: &[Identification],
    naming: ClassNaming,
) -> Result<(FinSet, Vec<FinFunction>)> {
    let offsets: Vec<usize> = parts
        .iter()
        .scan(0, |acc, p| {
            let start = *acc;
            *acc += p.set.len();
            Some(start)
        })
        .collect();
    let total: usize = parts.iter().map(|p| p.set.len()).sum();
    let mut uf = UnionFind::<usize>::new(total);
    for &((p, x), (q, y)) in identify {
        if p >= parts.len() || q >= parts.len() || x >= parts[p].set.len() || y >= parts[q].set.len() {
            return Err(Error::BoundaryMismatch("identification out of range".into()));
        }
        uf.union(offsets[p] + x, offsets[q] + y);
    }
    let locate = |g: usize| -> (usize, usize) {
        let p = offsets.partition_point(|&o| o <= g) - 1;
        (p, g - offsets[p])
    };
    // least (raw name, label) member per class root
    let mut best: BTreeMap<usize, (String, String)> = BTreeMap::new();
    for g in 0..total {
        let (p, x) = locate(g);
        let cand = (parts[p].set.get(x).to_string(), parts[p].label.to_string());
        best.entry(uf.find(g))
            .and_modify(|cur| {
                if cand < *cur {
                    *cur = cand.clone();
                }
            })
            .or_insert(cand);
    }
    let mut raw_count: BTreeMap<&str, usize> = BTreeMap::new();
    for (raw, _) in best.values() {
        *raw_count.entry(raw.as_str()).or_default() += 1;
    }
    let names: BTreeMap<usize, String> = best
        .iter()
        .map(|(&root, (raw, label))| {
            let qualify = naming == ClassNaming::Qualified || raw_count[raw.as_str()] > 1;
            let name = if qualify && !label.is_empty() {
                format!("{label}.{raw}")
            } else {
                raw.clone()
            };
            (root, name)
        })
        .collect();
    let apex = FinSet::new(names.values().cloned());
    if apex.len() != names.len() {
        return Err(Error::NameClash("class names collide after qualification".into()));
    }
    let injections = parts
        .iter()
        .enumerate()
        .map(|(p, part)| {
            let images = (0..part.set.len())
                .map(|x| apex.index_of(&names[&uf.find(offsets[p] + x)]).expect("class name"))
                .collect();
            FinFunction {
                source: part.set.clone(),
                target: apex.clone(),
                images,
            }
        })
        .collect();
    Ok((apex, injections))
}

/// Pushout of `f: C → A` and `g: C → B`: `(A ⊔ B)/~` with `f(c) ~ g(c)`.
pub fn pushout_set(f: &FinFunction, g: &FinFunction) -> Result<Cospan> {
    pushout_set_named(f, g, ("1", "2"), ClassNaming::Representative)
}

/// [`pushout_set`] with explicit part labels and naming policy.
pub fn pushout_set_named(
    f: &FinFunction,
    g: &FinFunction,
    labels: (&str, &str),
    naming: ClassNaming,
) -> Result<Cospan> {
    if f.source != g.source {
        return Err(Error::BoundaryMismatch("pushout legs have different sources".into()));
    }
    let parts = [
        Part {
            label: labels.0,
            set: &f.target,
        },
        Part {
            label: labels.1,
            set: &g.target,
        },
    ];
    let identify: Vec<_> = f
        .images
        .iter()
        .zip(&g.images)
        .map(|(&a, &b)| ((0, a), (1, b)))
        .collect();
    let (apex, mut inj) = glue(&parts, &identify, naming)?;
    let right = inj.pop().expect("two injections");
    let left = inj.pop().expect("two injections");
    Ok(Cospan { apex, left, right })
}

/// Quotient of the common target of a parallel pair by `f(c) ~ g(c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub set: FinSet,
    pub projection: FinFunction,
}

pub fn coequalize_set(f: &FinFunction, g: &FinFunction) -> Result<Quotient> {
    if f.source != g.source || f.target != g.target {
        return Err(Error::BoundaryMismatch("coequalizer needs a parallel pair".into()));
    }
    let parts = [Part {
        label: "",
        set: &f.target,
    }];
    let identify: Vec<_> = f
        .images
        .iter()
        .zip(&g.images)
        .map(|(&a, &b)| ((0, a), (0, b)))
        .collect();
    let (set, mut inj) = glue(&parts, &identify, ClassNaming::Representative)?;
    Ok(Quotient {
        set,
        projection: inj.pop().expect("one injection"),
    })
}

/// Epi-mono factorization `f = e then m` through the image of `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub image: FinSet,
    pub epi: FinFunction,
    pub mono: FinFunction,
}

pub fn image_factorize(f: &FinFunction) -> Factorization {
    let image = FinSet::new(f.images.iter().map(|&j| f.target.get(j).to_string()));
    let epi = FinFunction {
        source: f.source.clone(),
        target: image.clone(),
        images: f
            .images
            .iter()
            .map(|&j| image.index_of(f.target.get(j)).expect("image element"))
            .collect(),
    };
    let mono = FinFunction::inclusion(&image, &f.target).expect("image is a subset");
    Factorization { image, epi, mono }
}

/// All functions `source → target`, in lexicographic order of image indices.
pub fn all_functions<'a>(source: &'a FinSet, target: &'a FinSet) -> impl Iterator<Item = FinFunction> + 'a {
    let n = source.len();
    let m = target.len();
    let total: u128 = if n == 0 {
        1
    } else if m == 0 {
        0
    } else {
        (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
    };
    let mut counter = vec![0usize; n];
    let mut emitted: u128 = 0;
    std::iter::from_fn(move || {
        if emitted >= total {
            return None;
        }
        let f = FinFunction {
            source: source.clone(),
            target: target.clone(),
            images: counter.clone(),
        };
        emitted += 1;
        for slot in counter.iter_mut().rev() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
        Some(f)
    })
}
