//! Acceptance suite: every test runs one check from the verify harness and
//! prints its one-line result, so `cargo test --test acceptance -- --nocapture`
//! shows the same table as `slp verify`.

use slp_cli::verify::{run_check, VerifyCtx};

fn run(name: &str) {
    let outcome = run_check(name, &VerifyCtx::default());
    let tag = if outcome.passed { "PASS" } else { "FAIL" };
    println!("acceptance {:<24} {tag} — {}", outcome.name, outcome.details);
    assert!(outcome.passed, "{} failed: {}", outcome.name, outcome.details);
}

#[test]
fn threshold_population_at_kappa_two() {
    run("pair-threshold");
}

#[test]
fn model_spectra_match_closed_eigenvalues() {
    run("pair-spectra");
}

#[test]
fn closed_form_matches_oracle_on_grid() {
    run("closed-vs-oracle-grid");
}

#[test]
fn mixtures_above_threshold_stay_passive() {
    run("theorem-neighborhood");
}

#[test]
fn critical_temperature_landmarks() {
    run("critical-temperatures");
}

#[test]
fn exchange_model_never_activates() {
    run("xxx-unbounded");
}

#[test]
fn chain_fit_and_convergence() {
    run("chain-structure");
}

#[test]
fn coherence_breaks_population_guarantee() {
    run("coherence-fragility");
}

#[test]
fn per_level_energies_compose_linearly() {
    run("eigenstate-identity");
}

#[test]
fn charging_threshold_blocks_injection() {
    run("charging-threshold");
}

#[test]
fn harness_fails_under_corrupted_tolerances() {
    let ctx = VerifyCtx { seed: 2024, tol_scale: 1e-30 };
    let outcome = run_check("pair-spectra", &ctx);
    assert!(!outcome.passed, "a vanishing tolerance scale must fail the check");
}
