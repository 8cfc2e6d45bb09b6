//! Closed forms for the extractable work of pair-family mixtures.
//!
//! For eigenbasis mixtures of the two-qubit pair model the channel
//! optimization collapses to two angles. Writing the optimal Kraus pair as
//! rotations parametrized by `(α, β)`, the extractable energy becomes
//!
//! ```text
//!     ω(α, β) = (1−η)sin²α − (1+η)sin²β + |ξ|cos α cos β + |μ|sin α sin β − ξ
//! ```
//!
//! with the couplings `(η, ξ, μ)` of the state. At full anisotropy (μ = ξ)
//! the stationary conditions solve in closed form, giving [`omega_closed`];
//! in general [`omega_aniso`] maximizes ω on a dense grid and polishes the
//! best point with Newton steps.

// Resolves float math (sqrt, exp, trig) when building without std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::tol;

/// Ω∘ for μ = ξ from the stationary-point analysis.
///
/// When `|ηξ| < 1−η²` the maximum sits at an interior stationary point and
///
/// ```text
///     Ω∘ = √((1−η²+ξ²)/(1−η²)) − ξ − η,
/// ```
///
/// otherwise the optimum degenerates to the corner value `|ξ|+|η|−ξ−η`.
/// Both branches agree on the dividing curve and the result is clamped at
/// zero (the identity channel is always admissible).
pub fn omega_closed(eta: f64, xi: f64) -> f64 {
    let one_m = 1.0 - eta * eta;
    let value = if (eta * xi).abs() < one_m {
        ((one_m + xi * xi) / one_m).sqrt() - xi - eta
    } else {
        // Grouped per coupling so the passive quadrant gives exactly zero.
        (xi.abs() - xi) + (eta.abs() - eta)
    };
    value.max(0.0)
}

/// Location and value of a two-angle maximum.
#[derive(Debug, Clone, Copy)]
pub struct OmegaPoint {
    pub value: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Gradient norm at the returned point; below [`tol::POLISH_GRAD`] when
    /// the Newton polish converged to an interior stationary point.
    pub grad_norm: f64,
}

fn omega_fn(eta: f64, xi: f64, mu: f64, a: f64, b: f64) -> f64 {
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    (1.0 - eta) * sa * sa - (1.0 + eta) * sb * sb + xi.abs() * ca * cb + mu.abs() * sa * sb - xi
}

/// Ω∘ for arbitrary couplings via grid search plus Newton polish.
///
/// The grid covers `[0, π]²` with `n` points per axis (the objective is
/// invariant under the diagonal shift `(α, β) → (α+π, β+π)`, so this range
/// contains a global maximum). Newton iterations then drive the gradient
/// norm toward [`tol::POLISH_GRAD`]; if they wander off or the curvature
/// degenerates, the grid optimum is kept.
pub fn omega_aniso(eta: f64, xi: f64, mu: f64, n: usize) -> OmegaPoint {
    let n = n.max(3);
    let step = core::f64::consts::PI / (n - 1) as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..n {
        let a = i as f64 * step;
        for j in 0..n {
            let b = j as f64 * step;
            let v = omega_fn(eta, xi, mu, a, b);
            if v > best.0 {
                best = (v, a, b);
            }
        }
    }

    let (mut a, mut b) = (best.1, best.2);
    let xa = xi.abs();
    let ma = mu.abs();
    let grad = |a: f64, b: f64| -> (f64, f64) {
        let (sa, ca) = a.sin_cos();
        let (sb, cb) = b.sin_cos();
        (
            (1.0 - eta) * (2.0 * a).sin() - xa * sa * cb + ma * ca * sb,
            -(1.0 + eta) * (2.0 * b).sin() - xa * ca * sb + ma * sa * cb,
        )
    };
    let mut polished = best;
    for _ in 0..60 {
        let (ga, gb) = grad(a, b);
        let gn = ga.hypot(gb);
        if gn <= tol::POLISH_GRAD {
            break;
        }
        let (sa, ca) = a.sin_cos();
        let (sb, cb) = b.sin_cos();
        let haa = 2.0 * (1.0 - eta) * (2.0 * a).cos() - xa * ca * cb + ma * -sa * sb;
        let hbb = -2.0 * (1.0 + eta) * (2.0 * b).cos() - xa * ca * cb - ma * sa * sb;
        let hab = xa * sa * sb + ma * ca * cb;
        let det = haa * hbb - hab * hab;
        if det.abs() < 1e-300 {
            break;
        }
        let da = -(hbb * ga - hab * gb) / det;
        let db = -(haa * gb - hab * ga) / det;
        a += da;
        b += db;
        if !a.is_finite() || !b.is_finite() {
            break;
        }
        let v = omega_fn(eta, xi, mu, a, b);
        let (ga2, gb2) = grad(a, b);
        if v >= polished.0 || ga2.hypot(gb2) < gn {
            polished = (v, a, b);
        }
    }
    // Never report less than the raw grid optimum.
    let (value, alpha, beta) = if polished.0 >= best.0 { polished } else { best };
    let (ga, gb) = grad(alpha, beta);
    OmegaPoint { value, alpha, beta, grad_norm: ga.hypot(gb) }
}

/// Default grid density for [`omega_aniso`]; fine enough to land the Newton
/// polish in the right basin for every regime exercised by the tests,
/// including the near-degenerate lobes of the anisotropic family.
pub const OMEGA_GRID_N: usize = 513;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localenergy::pair_coefficients;
    use crate::models::{Eigenmixture, SpinModel, Temperature};

    #[test]
    fn zero_couplings_give_unit_work() {
        assert!((omega_closed(0.0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pair_ground_states_are_locally_passive() {
        let model = SpinModel::pair(2.0, 1.0).unwrap();
        let ground = Eigenmixture::pure(4, 0).unwrap();
        let c = pair_coefficients(&model, &ground).unwrap();
        assert!((c.eta - 0.7071067811865475).abs() < 1e-14);
        assert!((c.xi - 1.414213562373095).abs() < 1e-13);
        assert_eq!(omega_closed(c.eta, c.xi), 0.0);

        let mix = Eigenmixture::new(&[0.96, 0.0, 0.04, 0.0]).unwrap();
        let c = pair_coefficients(&model, &mix).unwrap();
        assert!((c.eta - 0.6788225099390855).abs() < 1e-13);
        assert!((c.xi - 1.277645019878171).abs() < 1e-13);
        assert_eq!(omega_closed(c.eta, c.xi), 0.0);
    }

    #[test]
    fn thermal_state_just_above_threshold_leaks_microscopic_work() {
        let model = SpinModel::pair(2.0, 1.0).unwrap();
        let mix = model.gibbs(Temperature::new(1.0).unwrap());
        let c = pair_coefficients(&model, &mix).unwrap();
        let w = omega_closed(c.eta, c.xi);
        assert!((w - 9.513147192219407e-07).abs() < 1e-12, "got {w:e}");
        assert!(w < 1e-6);

        // Slightly hotter extracts visibly more; slightly colder, nothing.
        let hot = model.gibbs(Temperature::new(1.01).unwrap());
        let ch = pair_coefficients(&model, &hot).unwrap();
        assert!((omega_closed(ch.eta, ch.xi) - 1.0288533744295947e-05).abs() < 1e-11);
        let cold = model.gibbs(Temperature::new(0.98).unwrap());
        let cc = pair_coefficients(&model, &cold).unwrap();
        assert_eq!(omega_closed(cc.eta, cc.xi), 0.0);
    }

    #[test]
    fn branches_agree_on_the_dividing_curve() {
        for eta in [0.2, 0.5, 0.8] {
            let xi = (1.0 - eta * eta) / eta;
            let below = omega_closed(eta, xi - 1e-9);
            let above = omega_closed(eta, xi + 1e-9);
            assert!((below - above).abs() < 1e-8, "eta {eta}: {below} vs {above}");
        }
    }

    #[test]
    fn grid_maximizer_reduces_to_the_closed_form_at_full_anisotropy() {
        let model = SpinModel::pair(2.0, 1.0).unwrap();
        for i in 0..8 {
            let t = 0.6 + 0.2 * i as f64;
            let mix = model.gibbs(Temperature::new(t).unwrap());
            let c = pair_coefficients(&model, &mix).unwrap();
            assert!((c.mu - c.xi).abs() < 1e-13);
            let closed = omega_closed(c.eta, c.xi);
            let grid = omega_aniso(c.eta, c.xi, c.mu, OMEGA_GRID_N);
            assert!(
                (closed - grid.value.max(0.0)).abs() < 1e-12,
                "T = {t}: closed {closed:e} vs grid {:e}",
                grid.value
            );
        }
    }

    #[test]
    fn polish_reaches_stationary_points() {
        let p = omega_aniso(0.3, 0.2, 0.15, OMEGA_GRID_N);
        assert!(p.grad_norm <= 1e-10);
        assert!(p.value > 0.0);
    }
}
