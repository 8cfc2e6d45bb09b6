//! Direct evaluation of the energy change under a local channel.

use alloc::vec::Vec;

use num_complex::Complex;

use crate::channels::KrausSet;
use crate::models::{Eigenmixture, SpinModel};
use crate::qcore::{expect, eye, kron, CMatrix};
use crate::Result;

/// `ΔE = Tr[Hρ] − Tr[H (𝒢⊗𝟙)(ρ)]`, the energy extracted from `ρ` by the
/// channel; negative values mean the channel injects energy.
pub fn delta_e(model: &SpinModel, rho: &CMatrix, channel: &KrausSet) -> Result<f64> {
    let h = model.hamiltonian();
    let after = channel.apply_local(rho, model.d_rest())?;
    Ok(expect(h, rho) - expect(h, &after))
}

/// Energy extracted from the single eigenstate `|E_k⟩⟨E_k|`.
///
/// Expanding the channel output in the energy eigenbasis leaves only
/// transition weights:
///
/// ```text
///     ΔE_k = Σ_{k′≠k} (E_k − E_{k′}) Σ_μ |⟨E_{k′}| K_μ⊗𝟙 |E_k⟩|²
/// ```
///
/// so each eigenstate contributes independently and ΔE of an eigenbasis
/// mixture is the population-weighted sum of these terms.
pub fn delta_e_k(model: &SpinModel, channel: &KrausSet, k: usize) -> Result<f64> {
    let spectrum = model.spectrum();
    let n = model.dim();
    if k >= n {
        return Err(crate::SlpError::DimensionMismatch { expected: n, got: k });
    }
    let psi = spectrum.vector(k);
    let id = eye(model.d_rest());
    let e_k = spectrum.energies[k];
    let mut total = 0.0;
    for kraus in channel.ops() {
        let moved = kron(kraus, &id) * &psi;
        // Overlaps with every eigenvector at once.
        let coeffs = spectrum.vectors.adjoint() * &moved;
        for (kp, c) in coeffs.iter().enumerate() {
            if kp != k {
                total += (e_k - spectrum.energies[kp]) * c.norm_sqr();
            }
        }
    }
    Ok(total)
}

/// ΔE for an eigenbasis mixture, assembled from the per-eigenstate terms.
pub fn delta_e_mixture(model: &SpinModel, mixture: &Eigenmixture, channel: &KrausSet) -> Result<f64> {
    let pops = mixture.populations();
    if pops.len() != model.dim() {
        return Err(crate::SlpError::DimensionMismatch { expected: model.dim(), got: pops.len() });
    }
    let mut total = 0.0;
    for (k, &p) in pops.iter().enumerate() {
        if p > 0.0 {
            total += p * delta_e_k(model, channel, k)?;
        }
    }
    Ok(total)
}

/// Transition-weight rows `|⟨E_{k′}|K_μ⊗𝟙|E_k⟩|²` summed over μ, exposed for
/// diagnostics and for the coherence expansion.
pub fn transition_weights(model: &SpinModel, channel: &KrausSet, k: usize) -> Result<Vec<f64>> {
    let spectrum = model.spectrum();
    let psi = spectrum.vector(k);
    let id = eye(model.d_rest());
    let mut weights = alloc::vec![0.0; model.dim()];
    for kraus in channel.ops() {
        let moved = kron(kraus, &id) * &psi;
        let coeffs = spectrum.vectors.adjoint() * &moved;
        for (kp, c) in coeffs.iter().enumerate() {
            weights[kp] += Complex::norm_sqr(c);
        }
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::random_density;
    use crate::models::Temperature;
    use crate::qcore::cplx;

    #[test]
    fn identity_channel_extracts_nothing() {
        let model = SpinModel::pair(2.0, 1.0).unwrap();
        let rho = random_density(4, 19);
        let de = delta_e(&model, &rho, &KrausSet::identity(2)).unwrap();
        assert!(de.abs() < 1e-14);
        for k in 0..4 {
            assert!(delta_e_k(&model, &KrausSet::identity(2), k).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn resetting_the_control_injects_the_full_gap_into_the_exchange_ground() {
        // Reset-to-|0⟩ on the control: K₁ = |0⟩⟨0|, K₂ = |0⟩⟨1|. The singlet
        // ground state (energy −3) has a maximally mixed rest factor, so the
        // reset leaves |0⟩⟨0|⊗𝟙/2 at energy 0 and the channel must inject
        // the full binding energy: ΔE = −3.
        let model = SpinModel::exchange();
        let zero = cplx(0.0, 0.0);
        let one = cplx(1.0, 0.0);
        let k1 = CMatrix::from_row_slice(2, 2, &[one, zero, zero, zero]);
        let k2 = CMatrix::from_row_slice(2, 2, &[zero, one, zero, zero]);
        let reset = KrausSet::new(alloc::vec![k1, k2]).unwrap();
        let de = delta_e_k(&model, &reset, 0).unwrap();
        assert!((de - (-3.0)).abs() < 1e-13, "got {de}");
    }

    #[test]
    fn mixture_energy_change_is_population_linear() {
        let model = SpinModel::pair(1.7, 0.6).unwrap();
        let mix = model.gibbs(Temperature::new(0.8).unwrap());
        let channel = KrausSet::random(2, 4, 23);
        let rho = mix.density(&model).unwrap();
        let direct = delta_e(&model, &rho, &channel).unwrap();
        let assembled = delta_e_mixture(&model, &mix, &channel).unwrap();
        assert!(
            (direct - assembled).abs() < 1e-12,
            "direct {direct} vs per-eigenstate {assembled}"
        );
    }

    #[test]
    fn eigenstate_terms_match_projector_inputs() {
        let model = SpinModel::pair(2.0, 1.0).unwrap();
        for seed in [1u64, 2, 3] {
            let channel = KrausSet::random(2, 4, seed);
            for k in 0..4 {
                let psi = model.spectrum().vector(k);
                let rho = crate::qcore::projector(&psi);
                let direct = delta_e(&model, &rho, &channel).unwrap();
                let formula = delta_e_k(&model, &channel, k).unwrap();
                assert!((direct - formula).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ground_state_of_the_symmetric_pair_resists_extraction() {
        let model = SpinModel::pair(2.0, 1.0).unwrap();
        for seed in 0..10u64 {
            let channel = KrausSet::random(2, 4, seed);
            let de = delta_e_k(&model, &channel, 0).unwrap();
            assert!(de <= 1e-12, "seed {seed} extracted {de}");
        }
        for theta in [0.1, 0.5, 1.0, 2.0] {
            let de = delta_e_k(&model, &KrausSet::unitary_y(theta), 0).unwrap();
            assert!(de <= 1e-12);
        }
    }

    #[test]
    fn transition_weights_sum_to_one() {
        let model = SpinModel::pair(1.3, 0.4).unwrap();
        let channel = KrausSet::random(2, 4, 77);
        for k in 0..4 {
            let w = transition_weights(&model, &channel, k).unwrap();
            let total: f64 = w.iter().sum();
            assert!((total - 1.0).abs() < 1e-13);
        }
    }
}
