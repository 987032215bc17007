mod common;

use common::validity_run;

#[test]
fn bounds_hold_on_random_pairs() {
    let tally = validity_run(200, 7_000);
    assert!(tally.instances >= 190, "only {} instances analysed", tally.instances);
    assert!(tally.checks > 1000);
    assert!(tally.violations.is_empty(), "{:#?}", &tally.violations[..tally.violations.len().min(10)]);
}
