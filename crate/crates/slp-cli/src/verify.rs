//! One-shot acceptance harness behind `slp verify`.
//!
//! Each check recomputes its quantities from scratch through the public
//! library API and judges them against frozen expectations. The integration
//! test target runs exactly these functions, so the CLI and the test suite
//! cannot drift apart.

use crate::commands::oracle_compare_points;
use crate::{CmdFail, CmdResult, EXIT_VERIFY_FAILED};
use clap::Args;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use slp_core::localenergy::{
    chain_critical_curve, charging_threshold, coherence_delta_e, critical_temperature,
    delta_e, delta_e_k, delta_e_mixture, fit_pair_form, oracle_maximize, threshold_pair,
    BilinearEnergyForm, CriticalMethod, CriticalOptions, OracleOptions, ThresholdOptions,
};
use slp_core::models::{Eigenmixture, SpinModel, Temperature};
use std::time::Instant;

pub struct VerifyCtx {
    pub seed: u64,
    /// Multiplies every tolerance in the suite; the self-test sets it tiny
    /// to confirm the harness can fail.
    pub tol_scale: f64,
}

impl Default for VerifyCtx {
    fn default() -> Self {
        VerifyCtx { seed: 2024, tol_scale: 1.0 }
    }
}

pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

type CheckFn = fn(&VerifyCtx) -> CmdResult<(bool, String)>;

pub const CHECKS: &[(&str, CheckFn)] = &[
    ("pair-threshold", check_pair_threshold),
    ("pair-spectra", check_pair_spectra),
    ("closed-vs-oracle-grid", check_closed_vs_oracle_grid),
    ("theorem-neighborhood", check_theorem_neighborhood),
    ("critical-temperatures", check_critical_temperatures),
    ("xxx-unbounded", check_xxx_unbounded),
    ("chain-structure", check_chain_structure),
    ("coherence-fragility", check_coherence_fragility),
    ("eigenstate-identity", check_eigenstate_identity),
    ("charging-threshold", check_charging_threshold),
];

pub fn run_check(name: &str, ctx: &VerifyCtx) -> CheckOutcome {
    for (check_name, f) in CHECKS {
        if *check_name == name {
            return match f(ctx) {
                Ok((passed, details)) => CheckOutcome { name: check_name, passed, details },
                Err(e) => CheckOutcome {
                    name: check_name,
                    passed: false,
                    details: format!("errored: {e}"),
                },
            };
        }
    }
    CheckOutcome { name: "unknown", passed: false, details: format!("no check named '{name}'") }
}

fn rng_for(ctx: &VerifyCtx, salt: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(ctx.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt))
}

/// Exponential split of `total` over `k` slots, a uniform draw from the
/// scaled simplex.
fn simplex_tail(rng: &mut ChaCha12Rng, total: f64, k: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| -(rng.gen::<f64>().max(1e-300)).ln()).collect();
    let s: f64 = draws.iter().sum();
    draws.iter().map(|d| total * d / s).collect()
}

fn fast_oracle(restarts: usize, seed: u64) -> OracleOptions {
    OracleOptions { restarts, seed, grad_tol: 1e-6, ..OracleOptions::default() }
}

// ------------------------------------------------------------------ checks

fn check_pair_threshold(ctx: &VerifyCtx) -> CmdResult<(bool, String)> {
    let start = Instant::now();
    let th = threshold_pair(2.0)?;
    let elapsed = start.elapsed().as_secs_f64();
    let tol = 5e-5 * ctx.tol_scale;
    let p_variant = (1.0 + th.delta_star_compact) / 2.0;
    let on_target = (th.p_star - 0.9383).abs() <= tol;
    let discrepancy = (p_variant - th.p_star).abs();
    let variant_visibly_off = discrepancy > 0.1;
    let fast = elapsed < 1.0;
    let passed = on_target && variant_visibly_off && fast;
    Ok((
        passed,
        format!(
            "p* = {:.10} (target 0.9383 ± {:.1e}); printed-variant root gives p ≈ {:.4}, \
             off by {:.4} and reported as a discrepancy; {:.4} s",
            th.p_star, tol, p_variant, discrepancy, elapsed
        ),
    ))
}

fn check_pair_spectra(ctx: &VerifyCtx) -> CmdResult<(bool, String)> {
    let mut rng = rng_for(ctx, 2);
    let tol_pair = 1e-10 * ctx.tol_scale;
    let tol_xxx = 1e-12 * ctx.tol_scale;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let kappa = 0.2 + 4.8 * rng.gen::<f64>();
        let gamma = rng.gen::<f64>();
        let model = SpinModel::pair(kappa, gamma)?;
        let m = (gamma * gamma * kappa * kappa + 4.0).sqrt();
        let mut expected = [-m, -kappa, kappa, m];
        expected.sort_by(f64::total_cmp);
        for (got, want) in model.energies().iter().zip(expected.iter()) {
            worst = worst.max((got - want).abs());
        }
    }
    let xxx = SpinModel::exchange();
    let mut worst_xxx: f64 = 0.0;
    for (got, want) in xxx.energies().iter().zip([-3.0, 1.0, 1.0, 1.0].iter()) {
        worst_xxx = worst_xxx.max((got - want).abs());
    }
    let passed = worst <= tol_pair && worst_xxx <= tol_xxx;
    Ok((
        passed,
        format!(
            "20 random pairs vs (−m, ±κ, m): worst dev {worst:.3e} (tol {tol_pair:.1e}); \
             exchange vs (−3, 1, 1, 1): worst dev {worst_xxx:.3e} (tol {tol_xxx:.1e})"
        ),
    ))
}

fn check_closed_vs_oracle_grid(ctx: &VerifyCtx) -> CmdResult<(bool, String)> {
    let start = Instant::now();
    let points = oracle_compare_points(2.0, 41, 64, ctx.seed)?;
    let elapsed = start.elapsed().as_secs_f64();
    let tol = 1e-6 * ctx.tol_scale;
    let mut worst = 0.0f64;
    let mut unmasked = 0usize;
    for p in &points {
        if !p.masked {
            unmasked += 1;
            worst = worst.max((p.closed - p.oracle).abs());
        }
    }
    let passed = worst <= tol && elapsed < 600.0;
    Ok((
        passed,
        format!(
            "41×41 diamond at κ=2, 64 restarts: {unmasked} live points, worst \
             |closed − oracle| = {worst:.3e} (tol {tol:.1e}); {elapsed:.1} s (budget 600 s)"
        ),
    ))
}

fn check_theorem_neighborhood(ctx: &VerifyCtx) -> CmdResult<(bool, String)> {
    let model = SpinModel::pair(2.0, 1.0)?;
    let p_star = threshold_pair(2.0)?.p_star;
    let tol = 1e-8 * ctx.tol_scale;
    let mut rng = rng_for(ctx, 4);
    let mut worst = 0.0f64;
    let mut over = 0usize;
    // The guarantee is tested from 0.9383 up. The binding vertex puts all
    // its residual mass on the top level and turns passive already at
    // (1+√(2/3))/2 ≈ 0.9082, so the band carries a wide safety margin.
    let p_lo = 0.9383;
    for i in 0..1000 {
        let p0 = p_lo + (1.0 - p_lo) * rng.gen::<f64>();
        let mut pops = vec![p0];
        pops.extend(simplex_tail(&mut rng, 1.0 - p0, 3));
        let rho = Eigenmixture::new(&pops)?.density(&model)?;
        let out = oracle_maximize(&model, &rho, &fast_oracle(3, ctx.seed.wrapping_add(i)))?;
        worst = worst.max(out.omega);
        if out.omega > tol {
            over += 1;
        }
    }
    let passed = over == 0;
    Ok((
        passed,
        format!(
            "1000 seeded mixtures with p₀ ≥ 0.9383 (closed threshold p* = {p_star:.6}): \
             worst oracle ΔE = {worst:.3e} (tol {tol:.1e}), {over} over"
        ),
    ))
}

fn check_critical_temperatures(ctx: &VerifyCtx) -> CmdResult<(bool, String)> {
    let opts = CriticalOptions::default();
    let mut notes = Vec::new();
    let mut passed = true;

    let full = SpinModel::pair(2.0, 1.0)?;
    let r = critical_temperature(&full, CriticalMethod::ClosedCondition, &opts)?;
    let t_star = match r.t_star {
        Temperature::Finite(v) => v,
        Temperature::Infinite => f64::INFINITY,
    };
    let in_bracket = t_star > 0.98 && t_star < 1.01;
    passed &= in_bracket;
    notes.push(format!("γ=1 κ=2: T* = {t_star:.6} ∈ (0.98, 1.01): {in_bracket}"));

    // Oracle confirmation on both sides of the bracket.
    let below = oracle_maximize(
        &full,
        &full.gibbs(Temperature::Finite(0.98)).density(&full)?,
        &fast_oracle(48, ctx.seed.wrapping_add(50)),
    )?;
    let above = oracle_maximize(
        &full,
        &full.gibbs(Temperature::Finite(1.01)).density(&full)?,
        &fast_oracle(48, ctx.seed.wrapping_add(51)),
    )?;
    let sides_ok = below.omega <= 1e-6 * ctx.tol_scale && above.omega > 1e-6;
    passed &= sides_ok;
    notes.push(format!(
        "oracle ΔE at T=0.98: {:.2e}, at T=1.01: {:.2e}: {sides_ok}",
        below.omega, above.omega
    ));

    let kappa_c = 2.0 / (1.0 - 0.25f64).sqrt();
    let step = 0.05;
    let mut half_ok = true;
    for (kappa, expect_zero) in
        [(kappa_c - step, false), (kappa_c, true), (kappa_c + step, false)]
    {
        let model = SpinModel::pair(kappa, 0.5)?;
        let r = critical_temperature(&model, CriticalMethod::OmegaMaximizer, &opts)?;
        let t = match r.t_star {
            Temperature::Finite(v) => v,
            Temperature::Infinite => f64::INFINITY,
        };
        let ok = if expect_zero { t <= 1e-4 } else { t > 1e-4 };
        half_ok &= ok;
        notes.push(format!("γ=0.5 κ={kappa:.4}: T* = {t:.3e}"));
    }
    passed &= half_ok;

    let planar_low =
        critical_temperature(&SpinModel::pair(1.5, 0.0)?, CriticalMethod::OmegaMaximizer, &opts)?;
    let planar_high =
        critical_temperature(&SpinModel::pair(3.0, 0.0)?, CriticalMethod::OmegaMaximizer, &opts)?;
    let low_zero = matches!(planar_low.t_star, Temperature::Finite(v) if v == 0.0);
    let high_pos = matches!(planar_high.t_star, Temperature::Finite(v) if v > 0.1);
    passed &= low_zero && high_pos;
    notes.push(format!(
        "γ=0: T*(κ=1.5) = {:?} (product ground), T*(κ=3) = {:?}",
        planar_low.t_star, planar_high.t_star
    ));

    Ok((passed, notes.join("; ")))
}

fn check_xxx_unbounded(ctx: &VerifyCtx) -> CmdResult<(bool, String)> {
    let model = SpinModel::exchange();
    let tol = 1e-8 * ctx.tol_scale;
    let mut worst = 0.0f64;
    for (i, t) in [0.1, 1.0, 10.0, 100.0, 1e4].iter().enumerate() {
        let rho = model.gibbs(Temperature::Finite(*t)).density(&model)?;
        let out =
            oracle_maximize(&model, &rho, &fast_oracle(8, ctx.seed.wrapping_add(60 + i as u64)))?;
        worst = worst.max(out.omega);
    }
    let opts = CriticalOptions {
        oracle: fast_oracle(4, ctx.seed.wrapping_add(66)),
        ..CriticalOptions::default()
    };
    let r = critical_temperature(&model, CriticalMethod::Oracle, &opts)?;
    let unbounded = matches!(r.t_star, Temperature::Infinite);
    let passed = worst <= tol && unbounded && r.certified;
    Ok((
        passed,
        format!(
            "exchange Gibbs at T ∈ {{0.1, 1, 10, 100, 1e4}}: worst oracle ΔE = {worst:.3e} \
             (tol {tol:.1e}); T* = {:?}, sign-argument certified: {}",
            r.t_star, r.certified
        ),
    ))
}

fn check_chain_structure(ctx: &VerifyCtx) -> CmdResult<(bool, String)> {
    let start = Instant::now();
    let fit_tol = 1e-9 * ctx.tol_scale;
    let mut worst_residual = 0.0f64;
    for &kappa in &[1.0, 2.0, 4.0] {
        for n in 2..=6 {
            for &t in &[0.5, 1.0, 2.0] {
                let model = SpinModel::chain(n, kappa)?;
                let rho = model.gibbs(Temperature::Finite(t)).density(&model)?;
                let form = BilinearEnergyForm::new(&model, &rho)?;
                let fit = fit_pair_form(&form, true)?;
                worst_residual = worst_residual.max(fit.residual);
            }
        }
    }
    let fits_ok = worst_residual <= fit_tol;

    let curve = chain_critical_curve(&[2, 3, 4, 5, 6], &[1.0, 2.0, 4.0], 1e-6)?;
    let mut nondecreasing = true;
    let mut shrinking = true;
    let mut tables = Vec::new();
    for &kappa in &[1.0, 2.0, 4.0] {
        let ts: Vec<f64> = curve
            .iter()
            .filter(|p| (p.kappa - kappa).abs() < 1e-12)
            .map(|p| match p.t_star {
                Temperature::Finite(v) => v,
                Temperature::Infinite => f64::INFINITY,
            })
            .collect();
        for w in ts.windows(2) {
            if w[1] < w[0] - 1e-9 {
                nondecreasing = false;
            }
        }
        if (ts[4] - ts[3]).abs() >= (ts[1] - ts[0]).abs() {
            shrinking = false;
        }
        tables.push(format!(
            "κ={kappa}: T*(2..6) = [{}]",
            ts.iter().map(|t| format!("{t:.6}")).collect::<Vec<_>>().join(", ")
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let passed = fits_ok && nondecreasing && shrinking && elapsed < 300.0;
    Ok((
        passed,
        format!(
            "fit residual ≤ {fit_tol:.1e}: {fits_ok} (worst {worst_residual:.2e}); \
             T*(N) nondecreasing: {nondecreasing}; |T*(6)−T*(5)| < |T*(3)−T*(2)|: {shrinking}; \
             {}; {elapsed:.1} s",
            tables.join("; ")
        ),
    ))
}

fn check_coherence_fragility(ctx: &VerifyCtx) -> CmdResult<(bool, String)> {
    let base = Eigenmixture::new(&[0.95, 0.0, 0.05, 0.0])?;
    let resp = coherence_delta_e(2.0, &base, 0.1, 0.1)?;
    let tol = 1e-9 * ctx.tol_scale;
    let agree = (resp.value - resp.direct).abs() <= tol;
    let positive = resp.value > 0.0;
    let p_star = threshold_pair(2.0)?.p_star;
    let above_threshold = 0.95 > p_star;
    let passed = agree && positive && above_threshold;
    Ok((
        passed,
        format!(
            "ΔE(φ=0.1) = {:+.10} vs direct channel {:+.10} (agree ≤ {tol:.1e}: {agree}); \
             positive with p₀ = 0.95 > p* = {p_star:.5}, so coherence breaks the population \
             guarantee; circulated variant gives {:+.6} and is reported as a discrepancy",
            resp.value, resp.direct, resp.variant
        ),
    ))
}

fn check_eigenstate_identity(ctx: &VerifyCtx) -> CmdResult<(bool, String)> {
    use slp_core::channels::KrausSet;
    let mut rng = rng_for(ctx, 9);
    let tol = 1e-10 * ctx.tol_scale;
    let mut worst_projector = 0.0f64;
    let mut worst_linearity = 0.0f64;
    for i in 0..1000u64 {
        let model = match i % 3 {
            0 => SpinModel::pair(0.3 + 3.7 * rng.gen::<f64>(), rng.gen::<f64>())?,
            1 => SpinModel::chain(3, 0.3 + 2.7 * rng.gen::<f64>())?,
            _ => SpinModel::exchange(),
        };
        let channel = KrausSet::random(2, 1 + (i as usize % 4), ctx.seed.wrapping_add(i * 131));
        let dim = model.dim();
        let k = (rng.gen::<f64>() * dim as f64) as usize % dim;
        let per_level = delta_e_k(&model, &channel, k)?;
        let mut projector = vec![0.0; dim];
        projector[k] = 1.0;
        let direct = delta_e(&model, &Eigenmixture::new(&projector)?.density(&model)?, &channel)?;
        worst_projector = worst_projector.max((per_level - direct).abs());

        let pops = simplex_tail(&mut rng, 1.0, dim);
        let mixture = Eigenmixture::new(&pops)?;
        let by_sum = delta_e_mixture(&model, &mixture, &channel)?;
        let by_density = delta_e(&model, &mixture.density(&model)?, &channel)?;
        worst_linearity = worst_linearity.max((by_sum - by_density).abs());
    }
    let passed = worst_projector <= tol && worst_linearity <= tol;
    Ok((
        passed,
        format!(
            "1000 random (model, channel) pairs: per-level ΔE vs eigenprojector dev \
             {worst_projector:.3e}, mixture linearity dev {worst_linearity:.3e} (tol {tol:.1e})"
        ),
    ))
}

fn check_charging_threshold(ctx: &VerifyCtx) -> CmdResult<(bool, String)> {
    let model = SpinModel::pair(2.0, 1.0)?;
    let opts = ThresholdOptions {
        oracle: fast_oracle(6, ctx.seed.wrapping_add(77)),
        ..ThresholdOptions::default()
    };
    let q_star = charging_threshold(&model, &opts)?;
    let expected = (1.0 + (2.0f64 / 3.0).sqrt()) / 2.0;
    let finite_below_one = q_star.is_finite() && q_star < 1.0;
    let near_expected = (q_star - expected).abs() <= 1e-3 * ctx.tol_scale.max(1.0);

    let negated = model.negated()?;
    let tol = 1e-8 * ctx.tol_scale;
    let mut rng = rng_for(ctx, 10);
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let p3 = q_star + (1.0 - q_star) * rng.gen::<f64>();
        let mut pops = simplex_tail(&mut rng, 1.0 - p3, 3);
        pops.push(p3);
        let rho = Eigenmixture::new(&pops)?.density(&model)?;
        // Extraction from the negated model is injection into the original.
        let out =
            oracle_maximize(&negated, &rho, &fast_oracle(3, ctx.seed.wrapping_add(200 + i)))?;
        worst = worst.max(out.omega);
    }
    let passed = finite_below_one && near_expected && worst <= tol;
    Ok((
        passed,
        format!(
            "q* = {q_star:.8} (finite, < 1: {finite_below_one}; analytic (1+√(2/3))/2 = \
             {expected:.8}); 100 mixtures with p₃ ≥ q*: worst oracle injection = {worst:.3e} \
             (tol {tol:.1e})"
        ),
    ))
}

// --------------------------------------------------------------- subcommand

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// List the checks without running them
    #[arg(long)]
    pub list: bool,
    /// Run only the named check
    #[arg(long)]
    pub only: Option<String>,
    /// Scale every tolerance in the suite (self-test hook: a tiny scale
    /// must make the suite fail)
    #[arg(long, default_value_t = 1.0)]
    pub tolerance_scale: f64,
    /// Base seed for the randomized checks
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}

pub fn cmd_verify(args: &VerifyArgs) -> CmdResult<()> {
    if args.list {
        for (name, _) in CHECKS {
            println!("{name}");
        }
        return Ok(());
    }
    let ctx = VerifyCtx { seed: args.seed, tol_scale: args.tolerance_scale };
    let names: Vec<&str> = match &args.only {
        Some(name) => vec![name.as_str()],
        None => CHECKS.iter().map(|(n, _)| *n).collect(),
    };
    let mut failures = 0;
    for name in names {
        let outcome = run_check(name, &ctx);
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} {} — {}", outcome.name, outcome.details);
        if !outcome.passed {
            failures += 1;
        }
    }
    if failures > 0 {
        Err(CmdFail {
            code: EXIT_VERIFY_FAILED,
            message: format!("{failures} check(s) failed"),
        })
    } else {
        Ok(())
    }
}
