//! Energy response of states carrying coherence between the ground state
//! and the upper single-flip level of the fully anisotropic pair.
//!
//! Eigenbasis mixtures never reward a local channel once the ground
//! population clears the threshold, but an off-diagonal term changes the
//! game: ΔE picks up a contribution linear in the coherence amplitude,
//! and for small rotation angles that linear term dominates the
//! quadratic cost, so some extraction is always available. The closed
//! expressions here quantify that for the perturbed state
//!
//! ```text
//!     ρ′ = ρ + r (|E₂⟩⟨E₀| + |E₀⟩⟨E₂|),    |r| ≤ √(p₀p₂),
//! ```
//!
//! probed by the local rotation exp(−iφσʸ).

use alloc::string::ToString;

// Resolves float math (sqrt, exp, trig) when building without std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::channels::KrausSet;
use crate::localenergy::bilinear::pair_coefficients;
use crate::localenergy::energy::delta_e;
use crate::models::{Eigenmixture, SpinModel};
use crate::qcore::outer;
use crate::{tol, Result, SlpError};

/// Energy change of the coherently perturbed state under the rotation
/// channel, in every form worth comparing.
#[derive(Debug, Clone, Copy)]
pub struct CoherentResponse {
    /// Closed-form ΔE, `rA sinφ cosφ − 2sin²φ (η + ξ)`; cross-checked
    /// against [`CoherentResponse::direct`] to 1e−9 before being returned.
    pub value: f64,
    /// ΔE from explicitly building ρ′ and applying the channel.
    pub direct: f64,
    /// The variant `(2sin²φ/(mκ))[rA cotφ − η − 2ξ]` that circulates as
    /// the closed form for this response. It does not reproduce the direct
    /// value (wrong prefactor and wrong population weight); it is computed
    /// and reported so the discrepancy stays visible.
    pub variant: f64,
    /// Coherence amplitude `A = 2(2 + (m+κ)(κ+1))/√(m(m+2))`.
    pub amplitude: f64,
}

/// Coherence amplitude of the ground-to-upper-flip matrix element.
pub fn coherence_amplitude(kappa: f64) -> f64 {
    let m = (kappa * kappa + 4.0).sqrt();
    2.0 * (2.0 + (m + kappa) * (kappa + 1.0)) / (m * (m + 2.0)).sqrt()
}

fn pair_gamma_one(kappa: f64) -> Result<SpinModel> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(SlpError::BadParameter {
            name: "kappa",
            reason: "coherent response needs κ > 0".to_string(),
        });
    }
    SpinModel::pair(kappa, 1.0)
}

/// The perturbed state ρ′ for a mixture of the model's eigenstates plus
/// real coherence `r` between levels 0 and 2.
pub fn coherent_state(model: &SpinModel, base: &Eigenmixture, r: f64) -> Result<crate::qcore::CMatrix> {
    let p = base.populations();
    let bound = (p[0] * p[2]).sqrt();
    if !(r.is_finite() && r.abs() <= bound + 1e-12) {
        return Err(SlpError::BadParameter {
            name: "r",
            reason: "coherence exceeds the positivity bound √(p₀p₂)".to_string(),
        });
    }
    let v0 = model.spectrum().vector(0);
    let v2 = model.spectrum().vector(2);
    let rho = base.density(model)?;
    Ok(rho + (outer(&v2, &v0) + outer(&v0, &v2)) * crate::qcore::cplx(r, 0.0))
}

/// Closed-form ΔE of the perturbed state under the rotation exp(−iφσʸ),
/// verified against direct channel application.
pub fn coherence_delta_e(
    kappa: f64,
    base: &Eigenmixture,
    r: f64,
    phi: f64,
) -> Result<CoherentResponse> {
    let model = pair_gamma_one(kappa)?;
    if base.populations().len() != 4 {
        return Err(SlpError::DimensionMismatch { expected: 4, got: base.populations().len() });
    }
    let c = pair_coefficients(&model, base)?;
    let a = coherence_amplitude(kappa);
    let m = (kappa * kappa + 4.0).sqrt();
    let (s, co) = (phi.sin(), phi.cos());
    let value = r * a * s * co - 2.0 * s * s * (c.eta + c.xi);
    let variant = (2.0 / (m * kappa)) * (r * a * s * co - s * s * (c.eta + 2.0 * c.xi));

    let rho_p = coherent_state(&model, base, r)?;
    let channel = KrausSet::unitary_y(phi);
    let direct = delta_e(&model, &rho_p, &channel)?;
    if (value - direct).abs() > tol::CROSS_CHECK {
        return Err(SlpError::NumericsFailed {
            reason: "closed coherent response disagrees with direct evaluation".to_string(),
        });
    }
    Ok(CoherentResponse { value, direct, variant, amplitude: a })
}

/// Rotation angle below which the coherence term wins: the closed response
/// is positive exactly on `(0, φ*)` (for `r > 0`), with
/// `φ* = atan(rA / (2(η+ξ)))`.
pub fn coherence_witness_angle(kappa: f64, base: &Eigenmixture, r: f64) -> Result<f64> {
    let model = pair_gamma_one(kappa)?;
    let c = pair_coefficients(&model, base)?;
    Ok((r * coherence_amplitude(kappa) / (2.0 * (c.eta + c.xi))).atan())
}

/// Linear-in-`r` contribution of the coherence to ΔE for an arbitrary
/// channel: with Kraus entries `K = [[s, t], [u, v]]` summed over
/// operators,
///
/// ```text
///     ΔE(ρ′) − ΔE(ρ) = (r/√(m(m+2))) Σ [ 2κ Re(t̄s) + 2κ² Re(ūs)
///                        + 2(m+2) Re(ūv) − 2κ(m+2) Re(t̄v) ].
/// ```
pub fn coherence_term(kappa: f64, r: f64, channel: &KrausSet) -> Result<f64> {
    if channel.dim() != 2 {
        return Err(SlpError::DimensionMismatch { expected: 2, got: channel.dim() });
    }
    let m = (kappa * kappa + 4.0).sqrt();
    let mut acc = 0.0;
    for k in channel.ops() {
        let (s, t) = (k[(0, 0)], k[(0, 1)]);
        let (u, v) = (k[(1, 0)], k[(1, 1)]);
        acc += kappa * 2.0 * (t.conj() * s).re
            + kappa * kappa * 2.0 * (u.conj() * s).re
            + (m + 2.0) * 2.0 * (u.conj() * v).re
            - kappa * (m + 2.0) * 2.0 * (t.conj() * v).re;
    }
    Ok(r / (m * (m + 2.0)).sqrt() * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Temperature;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn base_state() -> Eigenmixture {
        Eigenmixture::new(&[0.95, 0.0, 0.05, 0.0]).unwrap()
    }

    #[test]
    fn closed_response_reproduces_reference_point() {
        let r = coherence_delta_e(2.0, &base_state(), 0.1, 0.1).unwrap();
        assert!((r.amplitude - 8.921769989550652).abs() < 1e-12);
        assert!((r.value - 0.05044653063742041).abs() < 1e-12);
        assert!((r.value - r.direct).abs() < 1e-12);
        assert!(r.value > 0.0);
        // The circulating variant lands elsewhere; the gap is the point.
        assert!((r.variant - 0.020202635831880002).abs() < 1e-12);
        assert!((r.variant - r.direct).abs() > 0.01);
    }

    #[test]
    fn closed_response_holds_at_a_second_parameter_point() {
        let base = Eigenmixture::new(&[0.9, 0.02, 0.08, 0.0]).unwrap();
        let r = coherence_delta_e(3.0, &base, 0.12, 0.15).unwrap();
        assert!((r.amplitude - 12.644240912622355).abs() < 1e-12);
        assert!((r.value - 0.10960160489346303).abs() < 1e-12);
        let w = coherence_witness_angle(3.0, &base, 0.12).unwrap();
        assert!((w - 0.2874919387299022).abs() < 1e-12);
    }

    #[test]
    fn no_coherence_means_no_extraction_from_threshold_states() {
        // r = 0 reduces to the quadratic cost term, negative for any angle.
        let r = coherence_delta_e(2.0, &base_state(), 0.0, 0.1).unwrap();
        assert!((r.value - (-0.03817757302915402)).abs() < 1e-12);
        assert!(r.value < 0.0);
        for phi in [0.02, 0.3, 1.0, 2.5] {
            assert!(coherence_delta_e(2.0, &base_state(), 0.0, phi).unwrap().value <= 0.0);
        }
    }

    #[test]
    fn witness_angle_separates_gain_from_loss() {
        let base = base_state();
        let w = coherence_witness_angle(2.0, &base, 0.1).unwrap();
        assert!((w - 0.22883369623845717).abs() < 1e-12);
        assert!(w > 0.0 && w < 0.2756);
        let just_below = coherence_delta_e(2.0, &base, 0.1, w - 0.01).unwrap();
        let just_above = coherence_delta_e(2.0, &base, 0.1, w + 0.01).unwrap();
        assert!(just_below.value > 0.0);
        assert!(just_above.value < 0.0);
    }

    #[test]
    fn coherence_bound_is_enforced() {
        let base = base_state();
        let rmax = (0.95f64 * 0.05).sqrt();
        assert!((rmax - 0.21794494717703367).abs() < 1e-12);
        assert!(coherence_delta_e(2.0, &base, rmax, 0.1).is_ok());
        assert!(matches!(
            coherence_delta_e(2.0, &base, rmax + 1e-6, 0.1),
            Err(SlpError::BadParameter { .. })
        ));
    }

    #[test]
    fn linear_term_accounts_for_arbitrary_channels() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for (i, kappa) in [2.0, 3.7, 1.2].iter().copied().enumerate() {
            let model = SpinModel::pair(kappa, 1.0).unwrap();
            for trial in 0..20u64 {
                let raw: [f64; 4] = core::array::from_fn(|_| rng.gen::<f64>() + 1e-3);
                let total: f64 = raw.iter().sum();
                let pops: alloc::vec::Vec<f64> = raw.iter().map(|x| x / total).collect();
                let mix = Eigenmixture::new(&pops).unwrap();
                let r = (2.0 * rng.gen::<f64>() - 1.0) * (pops[0] * pops[2]).sqrt();
                let ch = KrausSet::random(2, 1 + (trial as usize) % 3, 700 + 40 * i as u64 + trial);
                let with = delta_e(&model, &coherent_state(&model, &mix, r).unwrap(), &ch).unwrap();
                let without = delta_e(&model, &mix.density(&model).unwrap(), &ch).unwrap();
                let term = coherence_term(kappa, r, &ch).unwrap();
                assert!((with - (without + term)).abs() < 1e-12, "κ={kappa} trial {trial}");
            }
        }
    }

    #[test]
    fn thermal_states_gain_extraction_from_added_coherence() {
        // A Gibbs state below T* is passive as a mixture, but the witness
        // angle hands back a channel that extracts once r > 0.
        let model = SpinModel::pair(2.0, 1.0).unwrap();
        let gibbs = model.gibbs(Temperature::new(0.9).unwrap());
        let r = 0.5 * (gibbs.populations()[0] * gibbs.populations()[2]).sqrt();
        let w = coherence_witness_angle(2.0, &gibbs, r).unwrap();
        let resp = coherence_delta_e(2.0, &gibbs, r, 0.5 * w).unwrap();
        assert!(resp.value > 0.0);
        let unperturbed = coherence_delta_e(2.0, &gibbs, 0.0, 0.5 * w).unwrap();
        assert!(unperturbed.value <= 0.0);
    }
}
