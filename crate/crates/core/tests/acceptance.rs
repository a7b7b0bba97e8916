//! Runs the acceptance suite, one PASS/FAIL line per criterion.

use solvable_walks::acceptance::CRITERIA;

#[test]
fn acceptance_criteria() {
    let outcomes: Vec<_> = CRITERIA.iter().map(|c| c.run()).collect();
    for outcome in &outcomes {
        println!("{outcome}");
    }
    let failed: Vec<u8> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
