//! The nine acceptance criteria at their stated tolerances. Each test prints
//! one PASS/FAIL line; run with `--nocapture` to see them.

use bgls::config::DEFAULT_SEED;
use bgls::verify::run;

fn criterion(id: usize) {
    let r = run(id, DEFAULT_SEED);
    println!("{}", r.line());
    for f in &r.failures {
        println!("    {f}");
    }
    assert!(r.passed(), "{}", r.line());
}

#[test]
fn criterion_1_dilation_norm_equality() {
    criterion(1);
}

#[test]
fn criterion_2_dilation_norm_upper_bound() {
    criterion(2);
}

#[test]
fn criterion_3_fundamental_function_slopes() {
    criterion(3);
}

#[test]
fn criterion_4_boyd_indices() {
    criterion(4);
}

#[test]
fn criterion_5_shimogaki_indices_and_sandwich() {
    criterion(5);
}

#[test]
fn criterion_6_matrix_dilations() {
    criterion(6);
}

#[test]
fn criterion_7_operator_verdicts() {
    criterion(7);
}

#[test]
fn criterion_8_structural_norm_properties() {
    criterion(8);
}

#[test]
fn criterion_9_analytic_vs_quadrature_norms() {
    criterion(9);
}
