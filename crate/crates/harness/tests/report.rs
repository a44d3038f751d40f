use liouville_harness::report::{read_csv, ExperimentReport, MetricRow, Verdict, CSV_HEADER};
use liouville_harness::snapshot::{read_snapshot, write_snapshot, SnapshotMeta};
use liouville_core::random::{sample_gff, RngStream};
use liouville_core::Grid;
use serde_json::json;

fn sample_report() -> ExperimentReport {
    let mut r = ExperimentReport::new("demo", json!({"N": 8}), 3);
    r.push(MetricRow::check("demo", "mean", 1.01, 0.02, 1.0, 0.06, true).n(8).beta2(3.0).lambda(1.0).seed(3));
    r.push(MetricRow::info("demo", "width", 0.4, 0.0));
    r
}

#[test]
fn csv_header_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let r = sample_report();
    let (csv, json) = r.write(dir.path()).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let rows = read_csv(&csv).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], r.rows[0]);
    assert_eq!(rows[1].verdict, Verdict::Info);
    assert!(rows[1].n.is_none() && rows[1].target.is_nan());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(doc["experiment_id"], "demo");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn verdict_aggregation() {
    let mut r = sample_report();
    assert!(r.passed());
    r.push(MetricRow::check("demo", "bad", 2.0, 0.0, 0.0, 1.0, false));
    assert!(r.failed() && !r.passed());
    let only_info = {
        let mut r = ExperimentReport::new("x", json!({}), 0);
        r.push(MetricRow::info("x", "v", 1.0, 0.0));
        r
    };
    assert!(!only_info.passed() && !only_info.failed());
}

#[test]
fn snapshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid::new(16).unwrap();
    let f = sample_gff(&grid, None, &mut RngStream::new(1, 2).rng());
    let meta = SnapshotMeta {
        m: 16,
        t: 0.25,
        step: 4,
        label: "v".into(),
        seed: 1,
    };
    let path = dir.path().join("s.bin");
    write_snapshot(&path, &f, &meta).unwrap();
    assert_eq!(std::fs::metadata(&path).unwrap().len(), (15 * 15 * 24) as u64);
    let (g, m) = read_snapshot(&path).unwrap();
    assert_eq!(m, meta);
    assert_eq!(g.coeffs(), f.coeffs());
}

#[test]
fn truncated_snapshot_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid::new(8).unwrap();
    let f = sample_gff(&grid, None, &mut RngStream::new(1, 2).rng());
    let meta = SnapshotMeta {
        m: 8,
        t: 0.0,
        step: 0,
        label: "u".into(),
        seed: 1,
    };
    let path = dir.path().join("s.bin");
    write_snapshot(&path, &f, &meta).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
    assert!(read_snapshot(&path).is_err());
}
