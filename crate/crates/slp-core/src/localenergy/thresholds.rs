//! Population thresholds guaranteeing strong local passivity.
//!
//! Two complementary routes:
//!
//! * [`threshold_pair`]: closed-form corner analysis for the γ = 1 pair. The
//!   worst eigenmixture at a given ground population concentrates the rest
//!   on the level that drags `ξ` down fastest, which is the bottom edge
//!   `δ₁ = δ₀ − 1` of the admissible diamond; intersecting the passivity
//!   boundary `ηξ = 1−η²` with that edge gives a quadratic in `δ₀` whose
//!   positive root is `δ*`, and `p* = (1+δ*)/2`.
//! * [`threshold_general`]: model-free bisection. Because ΔE is linear in
//!   the populations, the extremal mixtures at fixed ground population are
//!   the two-level vertices `p₀|E₀⟩⟨E₀| + (1−p₀)|E_k⟩⟨E_k|`; the channel
//!   maximization over each vertex is delegated to the ascent oracle and the
//!   worst level taken. This bounds the true least threshold from both
//!   sides, which is how the conservative corner bound above gets audited.

use alloc::string::ToString;

// Resolves float math (sqrt, exp, trig) when building without std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::localenergy::oracle::{vertex_inner_maximum, OracleOptions};
use crate::models::SpinModel;
use crate::{tol, Result, SlpError};

/// Corner-bound threshold data for the γ = 1 pair at coupling κ.
#[derive(Debug, Clone, Copy)]
pub struct PairThreshold {
    /// Positive root of `(κ²+κm+2)δ² − κmδ − m²/2 = 0`, the population gap
    /// `δ₀ = p₀ − p₃` at the corner where passivity starts.
    pub delta_star: f64,
    /// Ground population guaranteeing passivity for every eigenmixture:
    /// `p* = (1+δ*)/2`.
    pub p_star: f64,
    /// The compact expression `(κ + √(3m²+2κm−8)) / (2(m²+κm−2))`, which is
    /// exactly `δ*/m`. This rescaled variant circulates as a closed form for
    /// the threshold itself but does not reproduce it (at κ = 2 it would put
    /// `p*` near 0.655 instead of 0.938); it is computed and reported so the
    /// discrepancy stays visible instead of being silently resolved.
    pub delta_star_compact: f64,
}

/// Corner-bound passivity threshold for the fully anisotropic pair.
pub fn threshold_pair(kappa: f64) -> Result<PairThreshold> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(SlpError::BadParameter {
            name: "kappa",
            reason: "threshold analysis needs κ > 0".to_string(),
        });
    }
    let m = (kappa * kappa + 4.0).sqrt();
    let a = kappa * kappa + kappa * m + 2.0;
    let b = kappa * m;
    let c = -m * m / 2.0;
    let delta_star = (b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
    let p_star = (1.0 + delta_star) / 2.0;
    let delta_star_compact = (kappa + (3.0 * m * m + 2.0 * kappa * m - 8.0).sqrt())
        / (2.0 * (m * m + kappa * m - 2.0));
    Ok(PairThreshold { delta_star, p_star, delta_star_compact })
}

/// Search configuration for [`threshold_general`] and
/// [`charging_threshold`].
#[derive(Debug, Clone, Copy)]
pub struct ThresholdOptions {
    pub oracle: OracleOptions,
    /// Inner optimum below this counts as passive.
    pub passive_tol: f64,
    /// Relative bisection width on the population.
    pub rel_tol: f64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions {
            oracle: OracleOptions::default(),
            passive_tol: tol::PASSIVE,
            rel_tol: tol::BISECT_REL,
        }
    }
}

/// Least ground population `p*` such that every eigenmixture with
/// `p₀ ≥ p*` is strongly locally passive, found by vertex bisection.
///
/// Requires a nondegenerate, fully entangled ground state; otherwise the
/// guarantee hypotheses fail and `NotApplicable` is returned.
pub fn threshold_general(model: &SpinModel, opts: &ThresholdOptions) -> Result<f64> {
    let class = model.ground_class();
    if class.degenerate {
        return Err(SlpError::NotApplicable {
            reason: "ground level is degenerate".to_string(),
        });
    }
    if !class.full_rank {
        return Err(SlpError::NotApplicable {
            reason: "ground state is not fully entangled".to_string(),
        });
    }
    let d = model.dim();
    let worst = |p0: f64, seed_shift: u64| -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for k in 1..d {
            let o = OracleOptions {
                seed: opts.oracle.seed.wrapping_add(seed_shift.wrapping_mul(1000) + k as u64 * 100),
                ..opts.oracle
            };
            worst = worst.max(vertex_inner_maximum(model, k, p0, &o)?);
        }
        Ok(worst)
    };

    if worst(1.0, 0)? > opts.passive_tol {
        return Err(SlpError::NumericsFailed {
            reason: "pure ground state failed the passivity check".to_string(),
        });
    }
    let mut lo = 1.0 / d as f64;
    if worst(lo, 1)? <= opts.passive_tol {
        return Ok(lo);
    }
    let mut hi = 1.0;
    let mut shift = 2u64;
    while (hi - lo) > opts.rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if worst(mid, shift)? <= opts.passive_tol {
            hi = mid;
        } else {
            lo = mid;
        }
        shift += 1;
    }
    Ok(hi)
}

/// Least top population `q*` such that no local channel can add energy to
/// any eigenmixture with `p_{d−1} ≥ q*`.
///
/// Energy injection into `H` is extraction from `−H`, so this runs the
/// vertex bisection on the negated model; the hypotheses transfer to the
/// top eigenstate (nondegenerate, fully entangled).
pub fn charging_threshold(model: &SpinModel, opts: &ThresholdOptions) -> Result<f64> {
    let top = model.level_class(model.dim() - 1);
    if top.degenerate {
        return Err(SlpError::NotApplicable {
            reason: "top level is degenerate".to_string(),
        });
    }
    if !top.full_rank {
        return Err(SlpError::NotApplicable {
            reason: "top eigenstate is not fully entangled".to_string(),
        });
    }
    let negated = model.negated()?;
    threshold_general(&negated, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localenergy::{omega_closed, pair_coefficients, delta_e};
    use crate::channels::KrausSet;
    use crate::models::Eigenmixture;
    use crate::qcore::{cplx, CMatrix};

    #[test]
    fn corner_threshold_reproduces_the_reference_coupling() {
        let t = threshold_pair(2.0).unwrap();
        assert!((t.delta_star - 0.8766913582437141).abs() < 1e-12);
        assert!((t.p_star - 0.9383456791218571).abs() < 1e-12);
        assert!((t.delta_star_compact - 0.30995720221088746).abs() < 1e-12);
        // The compact variant is exactly the root over m, and the p* it
        // would imply is far from the real threshold.
        let m = 8.0f64.sqrt();
        assert!((t.delta_star_compact - t.delta_star / m).abs() < 1e-14);
        let wrong_p = (1.0 + t.delta_star_compact) / 2.0;
        assert!((wrong_p - 0.655).abs() < 5e-3);
        assert!((wrong_p - t.p_star).abs() > 0.2);
    }

    #[test]
    fn corner_threshold_decreases_with_coupling() {
        let frozen = [
            (1.0, 0.9683739491507981),
            (2.0, 0.9383456791218571),
            (4.0, 0.9164819956629093),
            (8.0, 0.9078609380048696),
            (16.0, 0.9053728229315721),
        ];
        let mut prev = 1.0;
        for (kappa, want) in frozen {
            let p = threshold_pair(kappa).unwrap().p_star;
            assert!((p - want).abs() < 1e-12, "κ={kappa}: {p}");
            assert!(p < prev);
            prev = p;
        }
    }

    #[test]
    fn no_work_is_available_beyond_the_corner() {
        // Bottom edge of the diamond, δ₁ = δ₀ − 1, from the corner onward.
        let model = SpinModel::pair(2.0, 1.0).unwrap();
        let t = threshold_pair(2.0).unwrap();
        for i in 0..201 {
            let d0 = t.delta_star + (1.0 - t.delta_star) * i as f64 / 200.0;
            let p0 = d0;
            let p2 = 1.0 - d0;
            let mix = Eigenmixture::new(&[p0, 0.0, p2, 0.0]).unwrap();
            let c = pair_coefficients(&model, &mix).unwrap();
            assert!(omega_closed(c.eta, c.xi) <= 1e-12, "δ₀ = {d0}");
        }
        // And the four simplex vertices at p₀ = p* itself.
        for k in 1..4 {
            let mix = Eigenmixture::two_level(4, 0, k, t.p_star).unwrap();
            let c = pair_coefficients(&model, &mix).unwrap();
            assert!(omega_closed(c.eta, c.xi) <= 1e-12, "vertex {k}");
        }
    }

    #[test]
    fn threshold_rejects_nonpositive_coupling() {
        assert!(threshold_pair(0.0).is_err());
        assert!(threshold_pair(-2.0).is_err());
    }

    fn fast_threshold_opts() -> ThresholdOptions {
        ThresholdOptions {
            oracle: OracleOptions { restarts: 3, seed: 61, ..OracleOptions::default() },
            ..ThresholdOptions::default()
        }
    }

    #[test]
    fn vertex_bisection_finds_the_true_pair_threshold() {
        // The binding vertex for κ = 2, γ = 1 is the top level, where the
        // passivity boundary sits at p₀ = (1 + √(2/3))/2. The corner bound
        // p* = 0.93835 is strictly conservative against this.
        let model = SpinModel::pair(2.0, 1.0).unwrap();
        let p = threshold_general(&model, &fast_threshold_opts()).unwrap();
        let exact = (1.0 + (2.0f64 / 3.0).sqrt()) / 2.0;
        assert!((p - exact).abs() < 5e-5, "got {p}, expected {exact}");
        assert!(p < threshold_pair(2.0).unwrap().p_star);
    }

    #[test]
    fn theorem_hypotheses_gate_the_search() {
        // Separable ground state (weak isotropic coupling).
        let weak = SpinModel::pair(1.0, 0.0).unwrap();
        assert!(matches!(
            threshold_general(&weak, &fast_threshold_opts()),
            Err(SlpError::NotApplicable { .. })
        ));
        // Degenerate ground state (on the level-crossing curve).
        let crossing = SpinModel::pair(2.0, 0.0).unwrap();
        assert!(matches!(
            threshold_general(&crossing, &fast_threshold_opts()),
            Err(SlpError::NotApplicable { .. })
        ));
    }

    #[test]
    fn exchange_vertices_flip_at_one_half() {
        // For the isotropic exchange model an explicit damping family
        // K₁ = diag(q, 1), K₂ = √(1−q²)|1⟩⟨0| extracts from the vertex
        // mixtures with the excess on |00⟩ whenever p₀ < 1/2; the optimal
        // strength traces the envelope ΔE*(p₀) = 16(p₀−1/2)²/(2−3p₀).
        let model = SpinModel::exchange();
        let zero = cplx(0.0, 0.0);
        let grid = 2001;
        for (p0, expect_positive) in
            [(0.3, true), (0.4, true), (0.45, true), (0.49, true), (0.5, false), (0.55, false)]
        {
            let mix = Eigenmixture::two_level(4, 0, 2, p0).unwrap();
            let rho = mix.density(&model).unwrap();
            let mut best = f64::NEG_INFINITY;
            for i in 0..grid {
                let q = i as f64 / (grid - 1) as f64;
                let k1 = CMatrix::from_row_slice(
                    2,
                    2,
                    &[cplx(q, 0.0), zero, zero, cplx(1.0, 0.0)],
                );
                let k2 = CMatrix::from_row_slice(
                    2,
                    2,
                    &[zero, zero, cplx((1.0 - q * q).sqrt(), 0.0), zero],
                );
                let ch = KrausSet::new(alloc::vec![k1, k2]).unwrap();
                best = best.max(delta_e(&model, &rho, &ch).unwrap());
            }
            if expect_positive {
                let envelope = 16.0 * (p0 - 0.5) * (p0 - 0.5) / (2.0 - 3.0 * p0);
                assert!((best - envelope).abs() < 1e-6, "p₀={p0}: {best} vs {envelope}");
                assert!(best > 0.0);
            } else {
                assert!(best <= 1e-12, "p₀={p0}: {best}");
            }
        }
    }

    #[test]
    fn exchange_threshold_sits_at_one_half() {
        let model = SpinModel::exchange();
        let p = threshold_general(&model, &fast_threshold_opts()).unwrap();
        assert!((p - 0.5).abs() < 5e-4, "got {p}");
    }

    #[test]
    fn charging_mirrors_extraction_for_the_symmetric_pair() {
        // The pair spectrum is symmetric, so the negated problem has the
        // same vertex geometry and q* lands on the same boundary value.
        let model = SpinModel::pair(2.0, 1.0).unwrap();
        let q = charging_threshold(&model, &fast_threshold_opts()).unwrap();
        let exact = (1.0 + (2.0f64 / 3.0).sqrt()) / 2.0;
        assert!(q < 1.0);
        assert!((q - exact).abs() < 1e-4, "got {q}");
    }

    #[test]
    fn charging_is_undefined_for_degenerate_tops() {
        let model = SpinModel::exchange();
        assert!(matches!(
            charging_threshold(&model, &fast_threshold_opts()),
            Err(SlpError::NotApplicable { .. })
        ));
    }
}
