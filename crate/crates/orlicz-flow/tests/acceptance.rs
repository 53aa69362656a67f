//! Full acceptance sweep: runs every criterion in the built-in check suite
//! and requires each one to pass at its stated tolerance.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion PASS/FAIL lines.

use orlicz_flow::check;

#[test]
fn all_acceptance_criteria_pass() {
    let results = check::run_all();
    assert_eq!(results.len(), 14, "criterion count changed unexpectedly");

    let mut failures = Vec::new();
    for r in &results {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", r.name, r.detail);
        if !r.pass {
            failures.push(r.name);
        }
    }
    assert!(
        failures.is_empty(),
        "{} criteria failed: {}",
        failures.len(),
        failures.join(", ")
    );
}
