//! Numerical tolerances used across the crate.
//!
//! Each constant records why its magnitude is appropriate, so a failing
//! comparison points at a real defect rather than a guessed epsilon.

/// Acceptable Hermiticity defect `max|H − H†|` for operator input, and
/// acceptable reconstruction defect `max|HV − VD|` for supplied spectral
/// decompositions. Matrix elements here are O(1)..O(10); a few hundred ulps
/// covers accumulation over the ≤ 4096-element products we form.
pub const HERMITICITY: f64 = 1e-12;

/// Acceptable deviation of `Σ K†K` from the identity for a Kraus set, and of
/// `V†V` from the identity for a Stiefel point. QR-based constructions land
/// around 1e-15; anything past 1e-12 means the set was not built correctly.
pub const COMPLETENESS: f64 = 1e-12;

/// Worst accepted eigenpair residual `max_k max_i |(H v_k - E_k v_k)_i|`,
/// relative to `max(1, max|H|)`. Healthy decompositions land near 1e-15; the
/// dense solver's known failure mode returns orthonormal columns that miss
/// `H v = E v` by 1e-2 or more, so the gate has six orders of margin on both
/// sides.
pub const EIG_RESIDUAL: f64 = 1e-9;

/// Probability vectors must be nonnegative and sum to one within this bound.
/// Gibbs populations are produced by exp/normalize and are accurate to a few
/// ulps; user-supplied populations get the same slack.
pub const PROBABILITY: f64 = 1e-9;

/// Two independent routes to the same energy difference (closed form, grid
/// maximizer, channel ascent) must agree this tightly before a result is
/// trusted. The closed forms are exact and the ascent converges to gradient
/// norms below `ORACLE_GRAD`, so observed gaps sit near 1e-12; 1e-9 leaves
/// headroom for unlucky conditioning without masking a wrong branch.
pub const CROSS_CHECK: f64 = 1e-9;

/// Gradient norm at which the channel ascent declares convergence.
pub const ORACLE_GRAD: f64 = 1e-9;

/// Gradient norm target for Newton polish of the two-angle grid maximizer.
pub const POLISH_GRAD: f64 = 1e-10;

/// Extractable work below this is treated as zero when locating thresholds
/// and critical temperatures. The maximizers resolve genuine extraction down
/// to ~1e-10; the margin keeps bisection off numerical noise.
pub const PASSIVE: f64 = 1e-8;

/// Relative width at which temperature and population bisections stop.
pub const BISECT_REL: f64 = 1e-6;

/// Relative spectral gap below which a ground state counts as degenerate for
/// the purposes of the critical-temperature gate. Scaled by `max(1, |E₀|)`.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// Squared Schmidt coefficient below which a ground-state component is
/// treated as absent when testing for a product ground state.
pub const SCHMIDT_RANK: f64 = 1e-9;
