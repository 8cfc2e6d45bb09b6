//! Local energy extraction: how much energy a channel on the control
//! subsystem can pull out of a state, and everything derived from that.
//!
//! The central quantity is the energy decrease under a local channel 𝒢,
//!
//! ```text
//!     ΔE(ρ, 𝒢) = Tr[Hρ] − Tr[H (𝒢⊗𝟙)(ρ)],
//! ```
//!
//! positive when the channel extracts energy. For mixtures diagonal in the
//! energy eigenbasis ΔE is linear in the populations, with per-eigenstate
//! contributions that depend only on transition overlaps; [`delta_e_k`]
//! computes those directly from the spectrum. The supremum of ΔE over all
//! channels defines the extractable work Ω∘, computed by the closed forms in
//! [`omega_closed`]/[`omega_aniso`] where the two-angle reduction applies and
//! by the Riemannian [`oracle_maximize`] in general.

mod bilinear;
mod coherence;
mod energy;
mod omega;
mod oracle;
mod tempcrit;
mod thresholds;

pub use omega::{omega_aniso, omega_closed, OmegaPoint, OMEGA_GRID_N};
pub use bilinear::{
    fit_pair_form, pair_coefficients, pair_coefficients_from_deltas, pair_mixture_from_deltas,
    BilinearEnergyForm, FittedPairForm, PairCoefficients,
};
pub use coherence::{
    coherence_amplitude, coherence_delta_e, coherence_term, coherence_witness_angle,
    coherent_state, CoherentResponse,
};
pub use energy::{delta_e, delta_e_k, delta_e_mixture, transition_weights};
pub use oracle::{
    oracle_maximize, oracle_maximize_form, restart_seeds, vertex_inner_maximum, OracleOptions,
    OracleOutcome,
};
pub use tempcrit::{
    always_passive_certificate, chain_critical_curve, closed_couplings, critical_temperature,
    fitted_couplings, ChainCurvePoint, CriticalMethod, CriticalOptions, CriticalTemperature,
};
pub use thresholds::{
    charging_threshold, threshold_general, threshold_pair, PairThreshold, ThresholdOptions,
};
