//! The release gate as a test target: one test per criterion, each printing
//! its pass/fail summary line. See `swdo::accept` for what every criterion
//! measures and the known data inconsistency behind criterion 1.

use swdo::accept::{self, CriterionReport};

fn assert_criterion(report: CriterionReport) {
    println!("{}", report.summary_line());
    assert!(report.passed, "{}", report.summary_line());
}

#[test]
fn criterion_1_reference_t_test_matrix() {
    assert_criterion(accept::criterion_1());
}

#[test]
fn criterion_2_headline_accuracies_out_of_scope() {
    assert_criterion(accept::criterion_2());
}

#[test]
fn criterion_3_wavelet_reconstruction_and_energy() {
    assert_criterion(accept::criterion_3());
}

#[test]
fn criterion_4_optimizer_convergence_and_determinism() {
    assert_criterion(accept::criterion_4());
}

#[test]
fn criterion_5_closed_form_micro_checks() {
    assert_criterion(accept::criterion_5());
}

#[test]
fn criterion_6_gradient_correctness() {
    assert_criterion(accept::criterion_6());
}

#[test]
fn criterion_7_end_to_end_desk_tuning() {
    assert_criterion(accept::criterion_7());
}

#[test]
fn criterion_8_metrics_and_splits() {
    assert_criterion(accept::criterion_8());
}
