use proptest::prelude::*;

use reltab::error::Verdict;
use reltab::gen::Gen;
use reltab::laws;
use reltab::sets::ClassNaming;
use reltab::sets::{
    coequalize_set, compose, decode, encode, image_factorize, pullback_set, pushout_set, FinFunction, FinSet,
};
use reltab::signatures::{colimit_signatures, SignatureDiagram};

fn set(prefix: &str, n: usize) -> FinSet {
    Gen::names(prefix, n)
}

fn function(source: FinSet, target: FinSet, images: &[usize]) -> FinFunction {
    let m = target.len();
    let images = (0..source.len()).map(|i| images[i % images.len()] % m).collect();
    FinFunction::from_indices(source, target, images).unwrap()
}

/// Classes of `0..n` under the pairs, by repeated relabelling to the least member.
fn naive_classes(n: usize, pairs: &[(usize, usize)]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for &(a, b) in pairs {
            let low = label[a].min(label[b]);
            for l in [a, b] {
                if label[l] != low {
                    let old = label[l];
                    label.iter_mut().filter(|x| **x == old).for_each(|x| *x = low);
                    changed = true;
                }
            }
        }
        if !changed {
            return label;
        }
    }
}

proptest! {
    #[test]
    fn composition_is_pointwise(a in 1usize..6, b in 1usize..6, c in 1usize..6,
                                fi in prop::collection::vec(0usize..6, 1..6),
                                gi in prop::collection::vec(0usize..6, 1..6)) {
        let f = function(set("a", a), set("b", b), &fi);
        let g = function(set("b", b), set("c", c), &gi);
        let fg = compose(&f, &g).unwrap();
        for x in set("a", a).iter() {
            prop_assert_eq!(fg.apply(x), g.apply(f.apply(x).unwrap()));
        }
    }

    #[test]
    fn pullback_is_the_filtered_product(a in 0usize..5, b in 0usize..5, c in 1usize..4,
                                        fi in prop::collection::vec(0usize..4, 1..6),
                                        gi in prop::collection::vec(0usize..4, 1..6)) {
        let f = function(set("a", a), set("c", c), &fi);
        let g = function(set("b", b), set("c", c), &gi);
        let span = pullback_set(&f, &g).unwrap();
        let mut expected = Vec::new();
        for x in set("a", a).iter() {
            for y in set("b", b).iter() {
                if f.apply(x) == g.apply(y) {
                    expected.push((x.to_string(), y.to_string()));
                }
            }
        }
        let mut found: Vec<(String, String)> = span.apex.iter()
            .map(|p| (span.left.apply(p).unwrap().to_string(), span.right.apply(p).unwrap().to_string()))
            .collect();
        found.sort();
        expected.sort();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn coequalizer_matches_closure(n in 1usize..7, k in 0usize..5,
                                   fi in prop::collection::vec(0usize..7, 1..6),
                                   gi in prop::collection::vec(0usize..7, 1..6)) {
        let f = function(set("s", k), set("t", n), &fi);
        let g = function(set("s", k), set("t", n), &gi);
        let q = coequalize_set(&f, &g).unwrap();
        let pairs: Vec<(usize, usize)> = f.indices().iter().copied().zip(g.indices().iter().copied()).collect();
        let classes = naive_classes(n, &pairs);
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(q.projection.image_index(x) == q.projection.image_index(y), classes[x] == classes[y]);
            }
        }
        prop_assert!(q.projection.is_surjective());
        prop_assert_eq!(compose(&f, &q.projection).unwrap(), compose(&g, &q.projection).unwrap());
    }

    #[test]
    fn pushout_matches_closure(k in 0usize..4, b in 1usize..5, c in 1usize..5,
                               fi in prop::collection::vec(0usize..5, 1..6),
                               gi in prop::collection::vec(0usize..5, 1..6)) {
        let f = function(set("s", k), set("b", b), &fi);
        let g = function(set("s", k), set("c", c), &gi);
        let po = pushout_set(&f, &g).unwrap();
        prop_assert_eq!(compose(&f, &po.left).unwrap(), compose(&g, &po.right).unwrap());
        let pairs: Vec<(usize, usize)> = (0..k).map(|i| (f.image_index(i), b + g.image_index(i))).collect();
        let classes = naive_classes(b + c, &pairs);
        let distinct: std::collections::BTreeSet<usize> = classes.iter().copied().collect();
        prop_assert_eq!(po.apex.len(), distinct.len());
        let where_is = |i: usize| if i < b { po.left.image_index(i) } else { po.right.image_index(i - b) };
        for x in 0..b + c {
            for y in 0..b + c {
                prop_assert_eq!(where_is(x) == where_is(y), classes[x] == classes[y]);
            }
        }
    }

    #[test]
    fn image_factorization_recomposes(a in 0usize..6, b in 1usize..6, fi in prop::collection::vec(0usize..6, 1..6)) {
        let f = function(set("a", a), set("b", b), &fi);
        let fac = image_factorize(&f);
        prop_assert!(fac.epi.is_surjective());
        prop_assert!(fac.mono.is_injective());
        prop_assert_eq!(compose(&fac.epi, &fac.mono).unwrap(), f);
    }

    #[test]
    fn encoding_round_trips(parts in prop::collection::vec("[a-z⟨⟩,\\\\]{0,4}", 0..4)) {
        prop_assert_eq!(decode(&encode(&parts)), Some(parts));
    }

    #[test]
    fn signature_colimit_cocone_commutes(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let sorts = set("x", 2);
        let shared = g.signature(&sorts, 0, 2, "c");
        let s1 = g.signature(&sorts, 1, 3, "p");
        let s2 = g.signature(&sorts, 1, 3, "q");
        let maps1 = reltab::signatures::fiber_arity_maps(&shared, &s1);
        let maps2 = reltab::signatures::fiber_arity_maps(&shared, &s2);
        prop_assume!(!maps1.is_empty() && !maps2.is_empty());
        let d = SignatureDiagram {
            sorts: sorts.clone(),
            nodes: vec![("0".into(), shared), ("1".into(), s1), ("2".into(), s2)],
            edges: vec![(0, 1, maps1[0].clone()), (0, 2, maps2[0].clone())],
        };
        let colimit = colimit_signatures(&d, ClassNaming::Representative).unwrap();
        for (from, to, h) in &d.edges {
            prop_assert_eq!(
                compose(h, colimit.legs[*to].arity_map()).unwrap(),
                colimit.legs[*from].arity_map().clone()
            );
        }
    }

    #[test]
    fn laws_hold_for_arbitrary_seeds(seed in any::<u64>()) {
        for report in laws::run_all(seed, 1).unwrap() {
            prop_assert!(report.verdict.is_accept(), "{}: {:?}", report.name, report.verdict);
        }
    }
}

#[test]
fn law_reports_are_not_vacuous() {
    let reports = laws::run_all(0, 2).unwrap();
    assert_eq!(reports.len(), 10);
    assert!(reports.iter().all(|r| r.verdict == Verdict::Accept && r.instances == 2));
}
