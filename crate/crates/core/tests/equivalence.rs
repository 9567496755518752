#[path = "support/enumerate.rs"]
mod enumerate;

#[test]
fn validator_and_rows_agree_on_micro_instances() {
    let cov = enumerate::compare(30);
    assert!(cov.mismatches.is_empty(), "{:?}", cov.mismatches);
    assert!(cov.three_orders > 0 && cov.eight_weeks > 0, "{cov:?}");
}

#[test]
fn micro_instances_are_valid() {
    for seed in 0..50 {
        enumerate::micro(seed).check().unwrap();
    }
}
