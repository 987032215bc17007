mod common;

#[test]
fn measure_inequalities_hold() {
    let tally = common::measure_inequality_run(200, 11_000);
    assert_eq!(tally.instances, 200);
    assert!(tally.violations.is_empty(), "{:#?}", &tally.violations[..tally.violations.len().min(10)]);
}
