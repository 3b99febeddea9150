//! One test per acceptance criterion; each prints a single pass/fail line.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use reltab::error::Verdict;
use reltab::gen::Gen;
use reltab::laws::{self, Outcome};
use reltab::queries::{natural_join, JoinOptions, UniversalBound};
use reltab::relations::{image_of_table, include_relation, Relation};
use reltab::signatures::Signature;
use reltab::tables::Table;
use reltab::tuples::SignedDomain;

fn report(id: u32, name: &str, instances: usize, start: Instant, verdict: &Verdict<String>) {
    let secs = start.elapsed().as_secs_f64();
    match verdict {
        Verdict::Accept => println!("criterion {id:>2} {name}: pass ({instances} instances, {secs:.2}s)"),
        Verdict::Reject(w) => println!("criterion {id:>2} {name}: FAIL ({w})"),
    }
}

/// Runs a suite; `min_controls` is how many broken inputs it must reject.
fn run(
    id: u32,
    name: &str,
    instances: usize,
    seed: u64,
    min_controls: usize,
    law: impl FnOnce(&mut Gen, usize) -> reltab::error::Result<Outcome>,
) {
    let start = Instant::now();
    let Outcome { mut verdict, controls } = law(&mut Gen::new(seed), instances).expect("law suite runs");
    if verdict.is_accept() && controls < min_controls {
        verdict = Verdict::Reject(format!("only {controls} mutation controls ran"));
    }
    report(id, name, instances, start, &verdict);
    assert!(verdict.is_accept(), "{verdict:?}");
}

#[test]
fn criterion_01_signature_adjunction() {
    run(1, "signature adjunction", 200, 101, 0, laws::signature_adjunction);
}

#[test]
fn criterion_02_tuple_functoriality() {
    run(2, "tuple functoriality", 100, 102, 0, laws::tuple_functoriality);
}

#[test]
fn criterion_03_factorizations() {
    run(3, "tuple factorizations", 100, 103, 0, laws::factorizations);
}

#[test]
fn criterion_04_levo_dextro() {
    run(4, "levo/dextro isomorphism", 50, 104, 0, laws::levo_dextro);
}

#[test]
fn criterion_05_table_fiber_adjunction() {
    run(
        5,
        "table fiber adjunction with mutation controls",
        50,
        105,
        10,
        laws::table_fiber_adjunction,
    );
}

type Row = BTreeMap<String, String>;

fn nested_loop_join(left: &[Row], right: &[Row]) -> Vec<Row> {
    let mut out = Vec::new();
    for l in left {
        for r in right {
            if l.iter().all(|(a, v)| r.get(a).is_none_or(|w| w == v)) {
                let mut row = l.clone();
                row.extend(r.iter().map(|(a, v)| (a.clone(), v.clone())));
                out.push(row);
            }
        }
    }
    out.sort();
    out
}

fn plain_rows(t: &Table) -> Vec<Row> {
    let mut rows: Vec<Row> = t.rows().map(|(_, r)| r.as_map().clone()).collect();
    rows.sort();
    rows
}

#[test]
fn criterion_06_join_matches_nested_loop() {
    let start = Instant::now();
    let mut g = Gen::new(106);
    let pool = ["a", "b", "c", "d", "e"];
    let mut verdict = Verdict::Accept;
    for n in 0..500 {
        let sorts = Gen::names("x", 1 + g.below(3));
        let a = g.domain(&sorts, 4, 0.8);
        // each attribute name has one sort so shared names never clash
        let sort_of: Vec<String> = pool
            .iter()
            .map(|_| sorts.get(g.below(sorts.len())).to_string())
            .collect();
        let table = |g: &mut Gen| {
            let attrs: Vec<(String, String)> = (0..pool.len())
                .filter(|_| g.chance(0.5))
                .map(|k| (pool[k].to_string(), sort_of[k].clone()))
                .collect();
            let s = Signature::new(sorts.clone(), attrs).unwrap();
            let d = SignedDomain::new(s, a.clone()).unwrap();
            g.table(&d, 0, 50, "k")
        };
        let (t1, t2) = (table(&mut g), table(&mut g));
        let join = natural_join(&t1, &t2, &JoinOptions::default()).unwrap();
        if plain_rows(&join.table) != nested_loop_join(&plain_rows(&t1), &plain_rows(&t2)) {
            verdict = Verdict::Reject(format!("pair {n} differs from the nested-loop join"));
            break;
        }
    }
    report(6, "natural join against nested-loop oracle", 500, start, &verdict);
    assert!(verdict.is_accept(), "{verdict:?}");
}

#[test]
fn criterion_07_universal_properties() {
    let bound = UniversalBound::default();
    assert_eq!(bound.max_keys, 3);
    run(7, "universal properties with perturbed cones", 50, 107, 10, |g, n| {
        laws::universal(g, n, &bound)
    });
}

#[test]
fn criterion_08_reflection() {
    let start = Instant::now();
    let mut g = Gen::new(108);
    let mut verdict = Verdict::Accept;
    let mut relations = 0usize;
    // image after inclusion on every relation over small signed domains
    'outer: for _ in 0..20 {
        let sorts = Gen::names("x", 1 + g.below(2));
        let values = 1 + g.below(3);
        let a = g.domain(&sorts, values, 0.7);
        let s = g.signature(&sorts, 0, 2, "a");
        let d = SignedDomain::new(s, a).unwrap();
        let all = d.tuple_set().enumerate(12).unwrap();
        for mask in 0u32..(1 << all.len()) {
            let members = all
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, t)| t.clone());
            let r = Relation::new(d.clone(), members).unwrap();
            relations += 1;
            if image_of_table(&include_relation(&r)) != r {
                verdict = Verdict::Reject(format!("image of inclusion moved {} tuples", r.len()));
                break 'outer;
            }
        }
    }
    if verdict.is_accept() {
        let outcome = laws::reflection(&mut g, 50).unwrap();
        verdict = outcome.verdict;
        if verdict.is_accept() && outcome.controls < 10 {
            verdict = Verdict::Reject(format!("only {} mutation controls ran", outcome.controls));
        }
    }
    report(8, "image reflection", relations + 50, start, &verdict);
    assert!(verdict.is_accept(), "{verdict:?}");
}

#[test]
fn criterion_09_continuity() {
    run(9, "continuity on spans", 50, 109, 0, laws::continuity);
}

#[test]
fn criterion_10_galois() {
    run(10, "galois connections", 50, 110, 0, laws::galois);
}

#[test]
fn criterion_11_cli_determinism() {
    let start = Instant::now();
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let bin = env!("CARGO_BIN_EXE_reltab");
    let join = Command::new(bin)
        .args([
            "join",
            &root.join("fixtures/workspace.json").display().to_string(),
            "lives",
            "located",
        ])
        .output()
        .unwrap();
    let golden = std::fs::read(root.join("tests/golden/join.json")).unwrap();
    let laws = Command::new(bin)
        .args(["check-laws", "--seed", "0"])
        .output()
        .unwrap()
        .status;
    let verdict = if join.stdout != golden {
        Verdict::Reject("join output differs from the golden file".to_string())
    } else if !laws.success() {
        Verdict::Reject(format!("check-laws exited with {laws}"))
    } else {
        Verdict::Accept
    };
    report(11, "cli golden join and check-laws", 2, start, &verdict);
    assert!(verdict.is_accept(), "{verdict:?}");
}
