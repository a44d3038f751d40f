use liouville_harness::acceptance::{run_criterion, CRITERIA};
use liouville_harness::config::Profile;

const SEED: u64 = 20241016;

#[test]
fn acceptance_suite() {
    let mut failed = Vec::new();
    for (id, _, _) in CRITERIA {
        let out = run_criterion(id, Profile::Test, SEED).unwrap_or_else(|e| panic!("{id} aborted: {e}"));
        println!("{}", out.line());
        for row in out.report.rows.iter().filter(|r| r.verdict == liouville_harness::report::Verdict::Fail) {
            println!("       failing row {} = {:.6e} (se {:.2e}, target {:.4e}, tol {:.2e})", row.metric, row.estimate, row.stderr, row.target, row.tol);
        }
        if !out.pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
