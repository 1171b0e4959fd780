//! One test per acceptance criterion. Each prints a single PASS/FAIL line
//! and asserts both the verdict and the time budget.

use ncswitch::verify::{self, CriterionResult, Status};

fn check(res: CriterionResult) {
    println!("{}", res.line());
    assert!(res.passed(), "{}", res.line());
    assert!(res.within_budget(), "over budget: {}", res.line());
}

#[test]
fn ac01_speedup_constant() {
    check(verify::criterion_1());
}

#[test]
fn ac02_fanout_splitting_scaling() {
    check(verify::criterion_2());
}

#[test]
fn ac03_no_splitting_speedup() {
    check(verify::criterion_3());
}

#[test]
fn ac04_perfection() {
    check(verify::criterion_4());
}

#[test]
fn ac05_cover_bounds() {
    check(verify::criterion_5());
}

#[test]
fn ac06_speedup_chain() {
    check(verify::criterion_6());
}

#[test]
fn ac07_corner_points() {
    check(verify::criterion_7());
}

#[test]
fn ac08_frame_schedules() {
    check(verify::criterion_8());
}

#[test]
fn ac09_coding() {
    check(verify::criterion_9());
}

#[test]
fn ac10_simulation_knees() {
    check(verify::criterion_10());
}

#[test]
fn ac11_volume_columns_not_reproduced() {
    let res = verify::criterion_11();
    println!("{}", res.line());
    assert_eq!(res.status, Status::Skip);
}
