//! Seeded random instances for law checks and tests.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sets::{FinFunction, FinSet};
use crate::signatures::{Signature, SignatureMorphism};
use crate::tables::{Table, TableMorphism};
use crate::tuples::{SignedDomain, SignedDomainMorphism, Tuple};
use crate::typedomains::{Infomorphism, TypeDomain};

/// Deterministic instance generator.
#[derive(Debug, Clone)]
pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n.max(1))
    }

    pub fn upto(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..=n)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn names(prefix: &str, n: usize) -> FinSet {
        FinSet::new((1..=n).map(|k| format!("{prefix}{k}")))
    }

    /// Values `v1..vn` over `sorts`, each pair classified with probability `density`.
    pub fn domain(&mut self, sorts: &FinSet, values: usize, density: f64) -> TypeDomain {
        let ys = Gen::names("v", values);
        let mut pairs = Vec::new();
        for x in sorts.iter() {
            for y in ys.iter() {
                if self.chance(density) {
                    pairs.push((x.to_string(), y.to_string()));
                }
            }
        }
        TypeDomain::new(sorts.clone(), ys, pairs).expect("generated pairs are members")
    }

    /// A signature with between `min` and `max` attributes named `prefix1…`.
    pub fn signature(&mut self, sorts: &FinSet, min: usize, max: usize, prefix: &str) -> Signature {
        if sorts.is_empty() {
            return Signature::empty(sorts.clone());
        }
        let n = self.rng.gen_range(min..=max.max(min));
        let attrs: Vec<(String, String)> = (1..=n)
            .map(|k| (format!("{prefix}{k}"), sorts.get(self.below(sorts.len())).to_string()))
            .collect();
        Signature::new(sorts.clone(), attrs).expect("sorts are members")
    }

    /// A uniformly random function, or `None` if none exists.
    pub fn function(&mut self, source: &FinSet, target: &FinSet) -> Option<FinFunction> {
        if target.is_empty() && !source.is_empty() {
            return None;
        }
        let images = (0..source.len()).map(|_| self.below(target.len())).collect();
        FinFunction::from_indices(source.clone(), target.clone(), images).ok()
    }

    /// An infomorphism `A₂ ⇄ a1` with `sorts2` fresh sorts. The value map
    /// merges only values that the sort map cannot tell apart; `extra`
    /// further values of `A₂` are classified at random.
    pub fn infomorphism_into(&mut self, a1: &TypeDomain, sorts2: usize, extra: usize) -> Infomorphism {
        let x2 = if a1.sorts().is_empty() {
            FinSet::empty()
        } else {
            Gen::names("z", sorts2)
        };
        let f = self.function(&x2, a1.sorts()).expect("nonempty target");
        let profile = |y: &str| -> Vec<String> {
            f.iter()
                .filter(|(_, x1)| a1.classifies(y, x1))
                .map(|(x2, _)| x2.to_string())
                .collect()
        };
        let mut groups: BTreeMap<Vec<String>, Vec<String>> = BTreeMap::new();
        for y in a1.values().iter() {
            groups.entry(profile(y)).or_default().push(y.to_string());
        }
        let mut value_map: Vec<(String, String)> = Vec::new();
        let mut pairs: Vec<(String, String)> = Vec::new();
        let mut fresh = 0usize;
        for (prof, members) in &groups {
            let blocks = self.rng.gen_range(1..=members.len());
            let names: Vec<String> = (0..blocks)
                .map(|_| {
                    fresh += 1;
                    format!("w{fresh}")
                })
                .collect();
            for name in &names {
                pairs.extend(prof.iter().map(|x2| (x2.clone(), name.clone())));
            }
            for y in members {
                let b = self.below(blocks);
                value_map.push((y.clone(), names[b].clone()));
            }
        }
        for _ in 0..extra {
            fresh += 1;
            let name = format!("w{fresh}");
            for x in x2.iter() {
                if self.chance(0.5) {
                    pairs.push((x.to_string(), name.clone()));
                }
            }
        }
        let y2 = Gen::names("w", fresh);
        let a2 = TypeDomain::new(x2.clone(), y2.clone(), pairs).expect("generated pairs are members");
        let g = FinFunction::from_pairs(a1.values().clone(), y2, value_map).expect("total");
        Infomorphism::new(a2, a1.clone(), f, g).expect("value map respects profiles")
    }

    /// A signature morphism `S₂ → s1` with sort map `f`: each new attribute
    /// picks a target attribute and a sort over that attribute's sort.
    pub fn signature_morphism_into(
        &mut self,
        s1: &Signature,
        f: &FinFunction,
        max_arity: usize,
        prefix: &str,
    ) -> SignatureMorphism {
        let mut attrs = Vec::new();
        let mut h = Vec::new();
        if !s1.arity().is_empty() {
            let n = self.rng.gen_range(1..=max_arity.max(1));
            for k in 1..=n {
                let target = s1.arity().get(self.below(s1.arity().len())).to_string();
                let over = f.preimage(s1.sort_of(&target).expect("typed"));
                if let Some(x2) = over.choose(&mut self.rng) {
                    let name = format!("{prefix}{k}");
                    attrs.push((name.clone(), x2.to_string()));
                    h.push((name, target));
                }
            }
        }
        let s2 = Signature::new(f.source().clone(), attrs).expect("sorts are members");
        let hmap = FinFunction::from_pairs(s2.arity().clone(), s1.arity().clone(), h).expect("total");
        SignatureMorphism::new(s2, s1.clone(), hmap, f.clone()).expect("natural by construction")
    }

    /// A signed-domain morphism into `d1`.
    pub fn signed_domain_morphism_into(
        &mut self,
        d1: &SignedDomain,
        sorts2: usize,
        extra: usize,
        max_arity: usize,
        prefix: &str,
    ) -> SignedDomainMorphism {
        let im = self.infomorphism_into(d1.domain(), sorts2, extra);
        let sm = self.signature_morphism_into(d1.signature(), im.sort_map(), max_arity, prefix);
        SignedDomainMorphism::new(sm, im).expect("shared sort map")
    }

    pub fn tuple(&mut self, d: &SignedDomain) -> Option<Tuple> {
        let mut values = BTreeMap::new();
        for (i, x) in d.signature().attributes() {
            let extent = d.domain().extent(x).expect("sorts agree");
            if extent.is_empty() {
                return None;
            }
            values.insert(i.to_string(), extent.get(self.below(extent.len())).to_string());
        }
        Some(Tuple::new(values))
    }

    /// A table with up to `max_keys` random rows keyed `prefix1…`.
    pub fn table(&mut self, d: &SignedDomain, min_keys: usize, max_keys: usize, prefix: &str) -> Table {
        let n = self.rng.gen_range(min_keys..=max_keys.max(min_keys));
        let mut rows = Vec::new();
        for k in 1..=n {
            match self.tuple(d) {
                Some(t) => rows.push((format!("{prefix}{k}"), t)),
                None => break,
            }
        }
        Table::new(d.clone(), rows).expect("generated rows are legal")
    }

    /// A table `T₁` over `t`'s signature plus `extra` attributes, with a
    /// fiber morphism `T₁ → t` sending each key to a random key of `t`.
    pub fn extension(&mut self, t: &Table, extra: &[(String, String)], max_keys: usize, prefix: &str) -> TableMorphism {
        let sorts = t.signature().sorts().clone();
        let mut attrs: Vec<(String, String)> = t
            .signature()
            .attributes()
            .map(|(a, s)| (a.to_string(), s.to_string()))
            .collect();
        attrs.extend(extra.iter().cloned());
        let sig = Signature::new(sorts, attrs).expect("sorts are members");
        let d = SignedDomain::new(sig, t.type_domain().clone()).expect("same sorts");
        let mut rows = Vec::new();
        let mut keys = Vec::new();
        if !t.is_empty() {
            for k in 1..=self.upto(max_keys) {
                let y = t.keys().get(self.below(t.len())).to_string();
                let mut row: BTreeMap<String, String> = t.row(&y).expect("row").as_map().clone();
                let mut ok = true;
                for (a, s) in extra {
                    let extent = t.type_domain().extent(s).expect("sort");
                    if extent.is_empty() {
                        ok = false;
                        break;
                    }
                    row.insert(a.clone(), extent.get(self.below(extent.len())).to_string());
                }
                if ok {
                    let key = format!("{prefix}{k}");
                    rows.push((key.clone(), Tuple::new(row)));
                    keys.push((key, y));
                }
            }
        }
        let source = Table::new(d, rows).expect("legal rows");
        let h = FinFunction::inclusion(t.signature().arity(), source.signature().arity()).expect("subset");
        let k = FinFunction::from_pairs(source.keys().clone(), t.keys().clone(), keys).expect("total");
        TableMorphism::in_fiber(source, t.clone(), h, k).expect("natural by construction")
    }

    /// A random subset of `items`.
    pub fn subset<T: Clone>(&mut self, items: &[T]) -> Vec<T> {
        items.iter().filter(|_| self.chance(0.5)).cloned().collect()
    }
}
