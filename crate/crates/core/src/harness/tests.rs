use std::path::PathBuf;

use super::*;
use crate::error::Error;
use crate::machine::{CspdaSpec, Machine, StateKind};

pub fn group_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../groups").join(file)
}

fn load(file: &str) -> Group {
    load_group_spec(group_path(file)).unwrap()
}

fn equiv(g: &Group, n: usize, bound: usize, jobs: usize) -> EquivReport {
    let (_, source) = g.init_bound(n);
    let p = EquivParams { group: &g.name, n, init_bound: bound, bound_source: source, jobs };
    equiv_check(&g.machine, g.oracle.as_ref(), &p).unwrap()
}

#[test]
fn every_group_file_loads() {
    let dir = group_path("");
    let mut names = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let g = load_group_spec(&path).unwrap();
        names.push(g.name);
    }
    names.sort();
    assert_eq!(names.len(), 9);
}

#[test]
fn schema_errors_name_the_field() {
    let text = r#"{"name": "x", "group": {"kind": "fre", "alphabet": [["a", "A"]]}}"#;
    match GroupFile::parse(text) {
        Err(Error::Schema(msg)) => assert!(msg.contains("group") && msg.contains("fre"), "{msg}"),
        other => panic!("expected schema error, got {:?}", other.map(|f| f.name)),
    }
    let text = r#"{"name": "x", "group": {"kind": "direct_product", "left": {"kind": "free", "alphabet": [["a", "A"]]},
        "right": {"kind": "free", "alphabet": [["b", "B"]], "extra": 1}}}"#;
    match GroupFile::parse(text) {
        Err(Error::Schema(msg)) => assert!(msg.contains("group.right"), "{msg}"),
        other => panic!("expected schema error, got {:?}", other.map(|f| f.name)),
    }
}

#[test]
fn schema_round_trip() {
    let text = std::fs::read_to_string(group_path("grigorchuk.json")).unwrap();
    let file = GroupFile::parse(&text).unwrap();
    let again = GroupFile::parse(&serde_json::to_string(&file).unwrap()).unwrap();
    assert_eq!(serde_json::to_value(&file).unwrap(), serde_json::to_value(&again).unwrap());
}

#[test]
fn bound_rules() {
    let f2 = load("free_rank2.json");
    assert_eq!(f2.init_bound(8), (10, "rule"));
    let g = load("grigorchuk.json");
    assert_eq!(g.init_bound(2).1, "calibrated");
    let text = r#"{"name": "x", "init_bound": {"rule": "fixed", "value": 3},
        "group": {"kind": "free", "alphabet": [["a", "A"]]}}"#;
    let g = GroupFile::parse(text).unwrap().load().unwrap();
    assert_eq!(g.init_bound(7), (3, "file"));
}

#[test]
fn ht_cost_of_leaf_swap() {
    let g = load("higman_thompson.json");
    let w = g.oracle.alphabet().parse_word("s").unwrap();
    let BoundRule::Higman(o) = &g.rule else { panic!("not calibrated") };
    assert_eq!(ht_witness_cost(o, &w), Some(3));
    assert_eq!(ht_witness_cost(o, &[]), None);
}

#[test]
fn calibrated_ht_bound_covers_every_witness() {
    let g = load("higman_thompson.json");
    let BoundRule::Higman(o) = &g.rule else { panic!("not calibrated") };
    let (bound, _) = g.init_bound(4);
    let report = equiv(&g, 4, bound, 1);
    assert!(report.agrees(), "{:?}", report.mismatches);
    let a = g.oracle.alphabet();
    for (w, row) in a.words_up_to(4).zip(&report.rows) {
        if let Some(cost) = ht_witness_cost(o, &w) {
            assert!(row.witness.split(' ').count() <= cost, "{} {}", row.word, row.witness);
        }
    }
}

#[test]
fn free_group_equiv_and_zero_bound() {
    let g = load("free_rank2.json");
    let r = equiv(&g, 4, 6, 2);
    assert!(r.agrees());
    assert_eq!(r.words, 1 + 4 + 16 + 64 + 256);
    let r = equiv(&g, 4, 0, 2);
    assert!(r.counts.oracle_only > 0);
    assert_eq!(r.counts.machine_only, 0);
    assert!(r.mismatches.iter().all(|m| m.note.as_deref() == Some(INSUFFICIENT_BOUND)));
}

#[test]
fn reports_are_deterministic_across_jobs() {
    let g = load("dihedral_free_product.json");
    let (bound, _) = g.init_bound(5);
    let a = equiv(&g, 5, bound, 1);
    let b = equiv(&g, 5, bound, 4);
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.rows, b.rows);
}

#[test]
fn csv_tallies_match_json() {
    let g = load("grigorchuk.json");
    let r = equiv(&g, 2, 0, 1);
    assert!(r.counts.oracle_only > 0);
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    let rows: Vec<WordRow> = reader.deserialize().map(|r| r.unwrap()).collect();
    let count = |m: bool, o: bool| rows.iter().filter(|r| r.machine == m && r.oracle == o).count();
    assert_eq!(rows.len(), r.words);
    assert_eq!(count(true, true) + count(false, false), r.counts.agree);
    assert_eq!(count(true, false), r.counts.machine_only);
    assert_eq!(count(false, true), r.counts.oracle_only);
}

fn trace(g: &Group, init: &str, w: &str) -> Vec<TraceEvent> {
    let m = &g.machine;
    let init = m.init_word(&m.spec().parse_symbols(init).unwrap()).unwrap();
    trace_run(m, &init, &m.spec().parse_symbols(w).unwrap())
}

#[test]
fn traces() {
    let g = load("free_rank2.json");
    let t = trace(&g, "⍟ ⍟", "a b");
    let last = t.last().unwrap();
    assert_eq!(last.outcome.as_deref(), Some("reached AcceptingReading"));
    assert_eq!(last.height, 2);
    for (i, e) in t.iter().enumerate() {
        assert_eq!(e.step, i);
    }

    let t = trace(&g, "⍟", "a b");
    assert_eq!(t.last().unwrap().outcome.as_deref(), Some("failed"));

    let t = trace(&g, "⍟ ⍟", "");
    assert_eq!(t.len(), 1);
    assert_eq!(t[0].action, "enter");
    assert_eq!(t[0].outcome.as_deref(), Some("reached Entry"));
}

#[test]
fn audit_certifies_free_group() {
    let g = load("free_rank2.json");
    let cfg = AuditConfig { samples: 300, ..AuditConfig::new(g.init_bound(6).0) };
    let a = audit_all(&g.name, &g.machine, g.oracle.as_ref(), cfg).unwrap();
    assert!(a.certified, "{}", serde_json::to_string_pretty(&a).unwrap());
    assert!(a.robust.words > 0);
}

#[test]
fn audit_rejects_accepting_entry() {
    let g = load("free_rank2.json");
    let mut spec: CspdaSpec = g.machine.spec().clone();
    let entry = spec.entry_states()[0];
    spec.states[entry.index()].kind = StateKind::AcceptingReading;
    assert!(Machine::new(spec.clone()).is_err());
    let report = crate::machine::validate_spec(&spec);
    assert!(!report.is_valid());
}

#[test]
fn robust_sweep_on_free_product() {
    let g = load("dihedral_free_product.json");
    let cfg = AuditConfig { samples: 200, max_len: 4, ..AuditConfig::new(g.init_bound(4).0) };
    let a = audit_all(&g.name, &g.machine, g.oracle.as_ref(), cfg).unwrap();
    assert!(a.robust.missing.is_empty(), "{:?}", a.robust.missing);
    assert!(a.certified);
}
