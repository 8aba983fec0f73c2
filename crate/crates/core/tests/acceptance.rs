//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line with the key numbers.

use itodilate_core::selftest;

const SEED: u64 = 0xA11CE;

fn run(criterion: fn(u64) -> selftest::CriterionResult) {
    let result = criterion(SEED);
    println!(
        "criterion {:>2} [{}] {} — {}",
        result.id,
        if result.passed { "PASS" } else { "FAIL" },
        result.name,
        result.detail
    );
    assert!(result.passed, "{}: {}", result.name, result.detail);
}

#[test]
fn criterion_1_quadruple_algebra_laws() {
    run(selftest::criterion_1);
}

#[test]
fn criterion_2_worked_example() {
    run(selftest::criterion_2);
}

#[test]
fn criterion_3_positivity_equivalence() {
    run(selftest::criterion_3);
}

#[test]
fn criterion_4_exponent_kernels() {
    run(selftest::criterion_4);
}

#[test]
fn criterion_5_small_time_limit() {
    run(selftest::criterion_5);
}

#[test]
fn criterion_6_poisson_monte_carlo() {
    run(selftest::criterion_6);
}

#[test]
fn criterion_7_solution_cross_oracle() {
    run(selftest::criterion_7);
}

#[test]
fn criterion_8_norm_bounds() {
    run(selftest::criterion_8);
}

#[test]
fn criterion_9_determinism() {
    run(selftest::criterion_9);
}
