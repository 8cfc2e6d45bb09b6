//! Critical Gibbs temperature: the largest T below which the thermal state
//! stays strongly locally passive.
//!
//! Cold thermal states concentrate on an entangled ground state, which
//! protects the local energy from any channel on the control side; heating
//! dilutes that protection until extraction becomes possible. `T*` marks
//! the crossover. Three probes of "passive at T" are available, ordered by
//! cost and by how much structure they assume:
//!
//! * [`CriticalMethod::ClosedCondition`]: sign of `g(T) = ηξ − (1−η²)`
//!   from the thermal couplings. Valid where the two-coupling reduction is
//!   exact (fully anisotropic pairs, chains via the pattern fit).
//! * [`CriticalMethod::OmegaMaximizer`]: the two-angle channel family,
//!   maximized on a grid with Newton polish. Valid for any pair.
//! * [`CriticalMethod::Oracle`]: full channel-space ascent. Valid for any
//!   model, and the arbiter when the reductions are in doubt.
//!
//! Degenerate or separable ground states admit extraction at arbitrarily
//! low temperature, so their `T*` is zero. When no crossing exists up to
//! the scan ceiling the result is reported infinite, and for spectra with
//! a single excited level and a maximally entangled ground state that
//! report is upgraded to a certificate: a population-ordering argument
//! shows every thermal state is passive at every temperature.

use alloc::string::ToString;
use alloc::vec::Vec;

// Resolves float math (sqrt, exp, trig) when building without std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::localenergy::bilinear::{fit_pair_form, pair_coefficients, BilinearEnergyForm};
use crate::localenergy::omega::{omega_aniso, OMEGA_GRID_N};
use crate::localenergy::oracle::{oracle_maximize, OracleOptions};
use crate::models::{ModelKind, SpinModel, Temperature};
use crate::qcore::max_abs;
use crate::{tol, Result, SlpError};

/// Largest pattern-fit residual accepted before the closed condition is
/// considered inapplicable to the model at hand.
const FIT_RESIDUAL: f64 = 1e-9;

/// Grid-maximizer values above this count as extraction; sits well above
/// the polished optimizer's noise floor and well below physical signals.
const ANISO_CUT: f64 = 1e-9;

/// Oracle values above this count as extraction; looser than the grid
/// cutoff because the ascent stops on a gradient test, not on machine
/// precision.
const ORACLE_CUT: f64 = 1e-6;

/// Scan ceiling: no crossing found below this temperature is reported as
/// an infinite critical temperature.
const T_CEILING: f64 = 1e6;

/// Scan floor: non-passivity persisting down to this temperature is
/// reported as a zero critical temperature.
const T_FLOOR: f64 = 1e-12;

/// How "is the thermal state passive at T" gets decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalMethod {
    ClosedCondition,
    OmegaMaximizer,
    Oracle,
}

/// Search configuration for [`critical_temperature`].
#[derive(Debug, Clone, Copy)]
pub struct CriticalOptions {
    /// Relative width at which the temperature bisection stops.
    pub rel_tol: f64,
    /// Grid resolution for the two-angle maximizer probe.
    pub grid_n: usize,
    /// Ascent configuration for the oracle probe.
    pub oracle: OracleOptions,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        CriticalOptions {
            rel_tol: tol::BISECT_REL,
            grid_n: OMEGA_GRID_N,
            oracle: OracleOptions::default(),
        }
    }
}

/// Critical temperature with the provenance of the decision.
#[derive(Debug, Clone, Copy)]
pub struct CriticalTemperature {
    pub t_star: Temperature,
    pub method: CriticalMethod,
    /// For infinite results: true when the population-ordering argument
    /// proves passivity at every temperature, so the value does not rest
    /// on the finite scan ceiling.
    pub certified: bool,
}

/// Thermal couplings (η, ξ) by the cheapest exact route available.
///
/// Fully anisotropic pairs read them off the populations; longer chains go
/// through the pattern fit, which must close with residual below
/// [`FIT_RESIDUAL`] for the result to count.
pub fn closed_couplings(model: &SpinModel, t: f64) -> Result<(f64, f64)> {
    let temp = Temperature::new(t)?;
    match *model.kind() {
        ModelKind::Pair { gamma, .. } if gamma == 1.0 => {
            let c = pair_coefficients(model, &model.gibbs(temp))?;
            Ok((c.eta, c.xi))
        }
        ModelKind::Chain { n: 2, .. } => {
            let c = pair_coefficients(model, &model.gibbs(temp))?;
            Ok((c.eta, c.xi))
        }
        ModelKind::Chain { .. } => fitted_couplings(model, t),
        _ => Err(SlpError::NotApplicable {
            reason: "closed passivity condition needs a fully anisotropic pair or a chain"
                .to_string(),
        }),
    }
}

/// Thermal couplings (η, ξ) extracted by fitting the pair pattern to the
/// full bilinear response of the thermal state.
pub fn fitted_couplings(model: &SpinModel, t: f64) -> Result<(f64, f64)> {
    let temp = Temperature::new(t)?;
    let rho = model.gibbs(temp).density(model)?;
    let form = BilinearEnergyForm::new(model, &rho)?;
    let fit = fit_pair_form(&form, true)?;
    if fit.residual > FIT_RESIDUAL {
        return Err(SlpError::NotApplicable {
            reason: "thermal response does not reduce to the two-coupling pattern".to_string(),
        });
    }
    Ok((fit.coeffs.eta, fit.coeffs.xi))
}

fn passive_probe(
    model: &SpinModel,
    method: CriticalMethod,
    opts: &CriticalOptions,
    t: f64,
) -> Result<bool> {
    match method {
        CriticalMethod::ClosedCondition => {
            let (eta, xi) = closed_couplings(model, t)?;
            Ok(eta * xi - (1.0 - eta * eta) >= 0.0)
        }
        CriticalMethod::OmegaMaximizer => {
            let c = pair_coefficients(model, &model.gibbs(Temperature::new(t)?))?;
            Ok(omega_aniso(c.eta, c.xi, c.mu, opts.grid_n).value <= ANISO_CUT)
        }
        CriticalMethod::Oracle => {
            let rho = model.gibbs(Temperature::new(t)?).density(model)?;
            Ok(oracle_maximize(model, &rho, &opts.oracle)?.omega <= ORACLE_CUT)
        }
    }
}

fn solve_crossing(
    mut passive: impl FnMut(f64) -> Result<bool>,
    rel_tol: f64,
) -> Result<Temperature> {
    let mut lo = 1e-3;
    loop {
        if passive(lo)? {
            break;
        }
        if lo <= T_FLOOR {
            return Ok(Temperature::Finite(0.0));
        }
        lo /= 10.0;
    }
    let mut hi = 1e3;
    loop {
        if !passive(hi)? {
            break;
        }
        if hi >= T_CEILING {
            return Ok(Temperature::Infinite);
        }
        hi *= 10.0;
    }
    // Geometric bisection; the bracket spans decades, so the midpoint in
    // log space keeps both endpoints informative.
    for _ in 0..200 {
        if hi - lo <= rel_tol * lo {
            break;
        }
        let mid = (lo * hi).sqrt();
        if passive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Temperature::Finite(0.5 * (lo + hi)))
}

/// Critical temperature of the thermal family of `model`.
pub fn critical_temperature(
    model: &SpinModel,
    method: CriticalMethod,
    opts: &CriticalOptions,
) -> Result<CriticalTemperature> {
    if model.ground_class().blocks_search() {
        return Ok(CriticalTemperature {
            t_star: Temperature::Finite(0.0),
            method,
            certified: false,
        });
    }
    let t_star = solve_crossing(|t| passive_probe(model, method, opts, t), opts.rel_tol)?;
    let certified = match t_star {
        Temperature::Infinite => always_passive_certificate(model),
        Temperature::Finite(_) => false,
    };
    Ok(CriticalTemperature { t_star, method, certified })
}

/// Analytic certificate that every thermal state of `model` is strongly
/// locally passive, at every temperature.
///
/// Hypotheses: the spectrum takes exactly two distinct values, the ground
/// level is nondegenerate, and the ground state is maximally entangled.
/// Then for any channel the energy change decomposes into ground-to-excited
/// and excited-to-ground transition weights which a maximally entangled
/// ground state forces to be equal, so
///
/// ```text
///     ΔE(Gibbs) = (E₁ − E₀)(p₁ − p₀) · S,    S ≥ 0,
/// ```
///
/// and thermal ordering `p₀ ≥ p₁` makes this nonpositive.
pub fn always_passive_certificate(model: &SpinModel) -> bool {
    let e = model.energies();
    let d = e.len();
    if d < 2 {
        return false;
    }
    let scale = f64::max(1.0, max_abs_energy(e));
    let gap = tol::DEGENERACY_GAP * scale;
    // Exactly two distinct values: a nondegenerate ground, then one shared
    // excited level.
    if e[1] - e[0] <= gap {
        return false;
    }
    if e[d - 1] - e[1] > gap {
        return false;
    }
    // Maximally entangled ground: its reduced state on the control side is
    // the fully mixed state.
    let dc = model.d_control();
    if model.d_rest() < dc {
        return false;
    }
    let ground = model.spectrum().vector(0);
    let projector = crate::qcore::outer(&ground, &ground);
    let reduced = match crate::qcore::trace_out_rest(&projector, dc, model.d_rest()) {
        Ok(r) => r,
        Err(_) => return false,
    };
    let uniform = crate::qcore::eye(dc) / crate::qcore::cplx(dc as f64, 0.0);
    max_abs(&(reduced - uniform)) <= 1e-9
}

fn max_abs_energy(e: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for &x in e {
        m = m.max(x.abs());
    }
    m
}

/// One point of the chain critical-temperature curve.
#[derive(Debug, Clone, Copy)]
pub struct ChainCurvePoint {
    pub n: usize,
    pub kappa: f64,
    pub t_star: Temperature,
}

/// Critical temperature across chain lengths, always through the pattern
/// fit so every length is treated by the same reduction (including N = 2,
/// where the fit route cross-checks the direct population route).
pub fn chain_critical_curve(
    lengths: &[usize],
    kappas: &[f64],
    rel_tol: f64,
) -> Result<Vec<ChainCurvePoint>> {
    let mut out = Vec::with_capacity(lengths.len() * kappas.len());
    for &n in lengths {
        for &kappa in kappas {
            let model = SpinModel::chain(n, kappa)?;
            let t_star = if model.ground_class().blocks_search() {
                Temperature::Finite(0.0)
            } else {
                solve_crossing(
                    |t| {
                        let (eta, xi) = fitted_couplings(&model, t)?;
                        Ok(eta * xi - (1.0 - eta * eta) >= 0.0)
                    },
                    rel_tol,
                )?
            };
            out.push(ChainCurvePoint { n, kappa, t_star });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::KrausSet;
    use crate::localenergy::delta_e;
    use crate::localenergy::omega::omega_closed;
    use crate::models::Eigenmixture;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn anisotropic_pair_crossing_is_near_unit_temperature() {
        let model = SpinModel::pair(2.0, 1.0).unwrap();
        let r = critical_temperature(&model, CriticalMethod::ClosedCondition, &CriticalOptions::default())
            .unwrap();
        let t = match r.t_star {
            Temperature::Finite(t) => t,
            Temperature::Infinite => panic!("expected a finite crossing"),
        };
        assert!((t - 0.9956444006696348).abs() < 1e-5, "got {t}");
        assert!(t > 0.98 && t < 1.01);
        // The thermal state is genuinely passive below and active above.
        let below = model.gibbs(Temperature::new(t - 0.05).unwrap());
        let above = model.gibbs(Temperature::new(t + 0.05).unwrap());
        let cb = pair_coefficients(&model, &below).unwrap();
        let ca = pair_coefficients(&model, &above).unwrap();
        assert!(omega_closed(cb.eta, cb.xi) <= 1e-12);
        assert!(omega_closed(ca.eta, ca.xi) > 1e-6);
    }

    #[test]
    fn grid_maximizer_and_closed_condition_agree_at_full_anisotropy() {
        // The closed condition switches at the exact sign change of g(T);
        // the maximizer must additionally land a grid point inside the gain
        // basin, which just past the crossing is narrow, so its detected
        // T* runs a few parts in 1e3 late. The order and the gap are pinned.
        let model = SpinModel::pair(2.0, 1.0).unwrap();
        let opts = CriticalOptions::default();
        let a = critical_temperature(&model, CriticalMethod::ClosedCondition, &opts).unwrap();
        let b = critical_temperature(&model, CriticalMethod::OmegaMaximizer, &opts).unwrap();
        let (ta, tb) = (a.t_star.value(), b.t_star.value());
        assert!(tb >= ta - 1e-5, "maximizer crossed before the sign change: {tb} < {ta}");
        assert!((tb - ta).abs() < 5e-3 * ta, "closed {ta} vs maximizer {tb}");
    }

    #[test]
    fn partial_anisotropy_crossings_match_reference_values() {
        // Above the degeneracy curve κ_c(γ) = 2/√(1−γ²) the ground state
        // is entangled and the crossing is set by the two-angle maximizer.
        // Just past the crossing the gain sits in a narrow angular basin,
        // so the detected T* shifts with grid resolution; the reference
        // value at each probe temperature is resolution-converged (doubling
        // the grid moves it below 1e-12) and is frozen tightly, while T*
        // itself only gets a window around the fine-grid bisection.
        let opts = CriticalOptions::default();
        for (kappa, gamma, t_probe, omega_ref, t_lo, t_hi) in [
            (2.4, 0.5, 1.05, 6.154156734040e-5, 0.92, 1.03),
            (3.0, 0.5, 2.05, 2.493518154634e-4, 1.92, 2.03),
            (2.5, 0.0, 1.75, 4.509028690118e-4, 1.62, 1.73),
            (3.0, 0.0, 2.58, 3.921509509375e-4, 2.45, 2.56),
        ] {
            let model = SpinModel::pair(kappa, gamma).unwrap();
            let mix = model.gibbs(Temperature::new(t_probe).unwrap());
            let c = pair_coefficients(&model, &mix).unwrap();
            let got = omega_aniso(c.eta, c.xi, c.mu, opts.grid_n).value;
            assert!(
                (got - omega_ref).abs() < 1e-10,
                "κ={kappa} γ={gamma} T={t_probe}: omega {got} vs reference {omega_ref}"
            );
            let r = critical_temperature(&model, CriticalMethod::OmegaMaximizer, &opts).unwrap();
            let t = r.t_star.value();
            assert!(
                t > t_lo && t < t_hi,
                "κ={kappa} γ={gamma}: T* {t} outside ({t_lo}, {t_hi})"
            );
        }
    }

    #[test]
    fn degenerate_and_separable_grounds_pin_t_star_to_zero() {
        // Exactly on the degeneracy curve for γ = 0.5.
        let at_curve = SpinModel::pair(2.3094010767585034, 0.5).unwrap();
        let r = critical_temperature(&at_curve, CriticalMethod::OmegaMaximizer, &CriticalOptions::default())
            .unwrap();
        assert_eq!(r.t_star, Temperature::Finite(0.0));
        // Below the curve the isotropic ground is a product state.
        let below = SpinModel::pair(1.5, 0.0).unwrap();
        let r = critical_temperature(&below, CriticalMethod::OmegaMaximizer, &CriticalOptions::default())
            .unwrap();
        assert_eq!(r.t_star, Temperature::Finite(0.0));
    }

    #[test]
    fn exchange_thermal_states_never_yield_energy() {
        // Closed response form for the isotropic exchange pair: with Kraus
        // entries K = [[s, t], [u, v]] summed over operators,
        //   ΔE = −a Σ|u|² − b Σ|t|² − c (2 − Σ 2Re(s̄v)),
        // a = p₀+p₁−2p₂, b = p₀+p₁−2p₃, c = p₀−p₁ in the canonical basis.
        let model = SpinModel::exchange();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for trial in 0..40usize {
            let raw: [f64; 4] = core::array::from_fn(|_| rng.gen::<f64>() + 1e-3);
            let total: f64 = raw.iter().sum();
            let pops: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let mix = Eigenmixture::new(&pops).unwrap();
            let rho = mix.density(&model).unwrap();
            let ch = KrausSet::random(2, 1 + trial % 3, 900 + trial as u64);
            let direct = delta_e(&model, &rho, &ch).unwrap();
            let (mut u2, mut t2, mut sv) = (0.0, 0.0, 0.0);
            for k in ch.ops() {
                u2 += k[(1, 0)].norm_sqr();
                t2 += k[(0, 1)].norm_sqr();
                sv += 2.0 * (k[(0, 0)].conj() * k[(1, 1)]).re;
            }
            let a = pops[0] + pops[1] - 2.0 * pops[2];
            let b = pops[0] + pops[1] - 2.0 * pops[3];
            let c = pops[0] - pops[1];
            let closed = -a * u2 - b * t2 - c * (2.0 - sv);
            assert!((direct - closed).abs() < 1e-12, "trial {trial}");
        }
        // Thermal ordering makes every term nonpositive, so the search
        // reports an infinite critical temperature with the certificate.
        let r = critical_temperature(&model, CriticalMethod::Oracle, &fast_oracle_opts()).unwrap();
        assert_eq!(r.t_star, Temperature::Infinite);
        assert!(r.certified);
    }

    fn fast_oracle_opts() -> CriticalOptions {
        CriticalOptions {
            oracle: OracleOptions { restarts: 3, seed: 23, ..OracleOptions::default() },
            ..CriticalOptions::default()
        }
    }

    #[test]
    fn certificate_scope_is_narrow() {
        assert!(always_passive_certificate(&SpinModel::exchange()));
        // Four distinct levels: no certificate.
        assert!(!always_passive_certificate(&SpinModel::pair(2.0, 1.0).unwrap()));
        // Two-valued spectrum but a product ground state: no certificate.
        let h = crate::qcore::kron(&crate::qcore::pauli_z(), &crate::qcore::eye(2));
        let custom = SpinModel::custom(h, 2, 2).unwrap();
        assert!(!always_passive_certificate(&custom));
    }

    #[test]
    fn chain_curve_fit_route_matches_the_population_route_at_two_sites() {
        let curve = chain_critical_curve(&[2], &[2.0], 1e-6).unwrap();
        let pair = critical_temperature(
            &SpinModel::pair(2.0, 1.0).unwrap(),
            CriticalMethod::ClosedCondition,
            &CriticalOptions::default(),
        )
        .unwrap();
        let (tc, tp) = (curve[0].t_star.value(), pair.t_star.value());
        assert!((tc - tp).abs() < 1e-6 * tp, "fit {tc} vs populations {tp}");
    }

    #[test]
    fn three_site_chain_crossing_matches_reference_value() {
        let curve = chain_critical_curve(&[3], &[2.0], 1e-6).unwrap();
        let t = curve[0].t_star.value();
        assert!((t - 1.157134).abs() < 5e-4, "got {t}");
    }
}
