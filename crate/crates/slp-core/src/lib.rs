//! Strong local passivity for few-qubit systems.
//!
//! A bipartite system with Hamiltonian `H` is *strongly locally passive* in a
//! state `ρ` when no quantum operation applied to a chosen control subsystem
//! alone can lower the global energy, i.e. when the extractable work
//!
//! ```text
//!     Ω∘(ρ) = max over channels 𝒢 of  Tr[Hρ] − Tr[H (𝒢⊗𝟙)(ρ)]
//! ```
//!
//! is zero. This crate computes `Ω∘` three ways and cross-checks them:
//!
//! * a closed form for two-qubit models whose energy change reduces to a
//!   two-angle trigonometric expression ([`localenergy::omega_closed`],
//!   [`localenergy::omega_aniso`]),
//! * a dense grid maximizer over that angle parametrization,
//! * a direct Riemannian ascent over Kraus representations of arbitrary
//!   channels ([`localenergy::oracle_maximize`]), which assumes nothing about
//!   the model and serves as the independent reference route.
//!
//! On top of `Ω∘` sit the derived quantities: population thresholds beyond
//! which extraction becomes possible ([`localenergy::threshold_pair`],
//! [`localenergy::threshold_general`]), the critical Gibbs temperature `T*`
//! below which a thermal state is strongly locally passive
//! ([`localenergy::critical_temperature`]), and the response to coherences
//! seeded between energy eigenstates ([`localenergy::coherence_delta_e`]).
//!
//! Units: ħ = k_B = 1 throughout; energies and temperatures share one scale.
//!
//! The crate is `no_std`-compatible (with `alloc`); the companion `slp-cli`
//! crate carries file formats, parallel sweeps, and the command-line tool.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channels;
pub mod localenergy;
pub mod models;
pub mod qcore;
pub mod tol;

mod error;

pub use error::SlpError;

/// Crate result alias; every fallible operation reports a [`SlpError`].
pub type Result<T> = core::result::Result<T, SlpError>;
