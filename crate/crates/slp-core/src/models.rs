//! Spin models, thermal states, and eigenbasis mixtures.
//!
//! All built-in models put the control qubit first in the tensor order. The
//! energy unit is the single-site field strength, ħ = k_B = 1.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

// Resolves float math (sqrt, exp, trig) when building without std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::qcore::{
    self, cplx, eig_hermitian, eye, kron, pauli_x, pauli_y, pauli_z, schmidt, CMatrix, Spectrum,
};
use crate::{tol, Result, SlpError};

/// Largest chain length accepted by [`SpinModel::chain`]; the dense
/// Hamiltonian grows as 4ⁿ and past this point memory, not physics, rules.
pub const MAX_CHAIN_SITES: usize = 12;

/// Which Hamiltonian family a model instance belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    /// Two qubits with anisotropic in-plane coupling:
    /// `H = κ[(1+γ)/2 σˣσˣ + (1−γ)/2 σʸσʸ] + σᶻ⊗𝟙 + 𝟙⊗σᶻ`.
    Pair { kappa: f64, gamma: f64 },
    /// `n` qubits on a ring, `H = κ Σᵢ σˣᵢσˣᵢ₊₁ + Σᵢ σᶻᵢ`; `n = 2` keeps the
    /// single bond instead of counting it twice.
    Chain { n: usize, kappa: f64 },
    /// Isotropic exchange pair, `H = σˣσˣ + σʸσʸ + σᶻσᶻ`.
    Exchange,
    /// User-supplied Hamiltonian on an explicit bipartition.
    Custom,
}

/// A Hamiltonian together with its spectral data and the control/rest split.
#[derive(Debug, Clone)]
pub struct SpinModel {
    kind: ModelKind,
    d_control: usize,
    d_rest: usize,
    h: CMatrix,
    spectrum: Spectrum,
}

fn op_on_site(n: usize, site: usize, op: &CMatrix) -> CMatrix {
    let mut out = if site == 0 { op.clone() } else { eye(2) };
    for k in 1..n {
        let factor = if k == site { op.clone() } else { eye(2) };
        out = kron(&out, &factor);
    }
    out
}

impl SpinModel {
    /// Anisotropic two-qubit model. `gamma` interpolates between the
    /// isotropic in-plane coupling (`0`) and a pure σˣσˣ bond (`1`).
    pub fn pair(kappa: f64, gamma: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(SlpError::BadParameter { name: "kappa", reason: "must be finite".to_string() });
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(SlpError::BadParameter {
                name: "gamma",
                reason: "anisotropy must lie in [0, 1]".to_string(),
            });
        }
        let h = pair_hamiltonian(kappa, gamma);
        let spectrum = eig_hermitian(&h)?;
        Ok(SpinModel { kind: ModelKind::Pair { kappa, gamma }, d_control: 2, d_rest: 2, h, spectrum })
    }

    /// σˣσˣ ring of `n` qubits in a transverse-free field Σσᶻ. The first site
    /// is the control.
    pub fn chain(n: usize, kappa: f64) -> Result<Self> {
        if !(2..=MAX_CHAIN_SITES).contains(&n) {
            return Err(SlpError::BadParameter {
                name: "n",
                reason: "chain length must lie in 2..=12".to_string(),
            });
        }
        if !kappa.is_finite() {
            return Err(SlpError::BadParameter { name: "kappa", reason: "must be finite".to_string() });
        }
        if n == 2 {
            // One bond, not a doubled one: the two-site ring is the γ = 1 pair.
            let h = pair_hamiltonian(kappa, 1.0);
            let spectrum = eig_hermitian(&h)?;
            return Ok(SpinModel { kind: ModelKind::Chain { n, kappa }, d_control: 2, d_rest: 2, h, spectrum });
        }
        let dim = 1usize << n;
        let mut h = CMatrix::zeros(dim, dim);
        let sx = pauli_x();
        let sz = pauli_z();
        for i in 0..n {
            let j = (i + 1) % n;
            h += (op_on_site(n, i, &sx) * op_on_site(n, j, &sx)) * cplx(kappa, 0.0);
            h += op_on_site(n, i, &sz);
        }
        let spectrum = eig_hermitian(&h)?;
        Ok(SpinModel { kind: ModelKind::Chain { n, kappa }, d_control: 2, d_rest: dim / 2, h, spectrum })
    }

    /// Isotropic exchange pair `σˣσˣ + σʸσʸ + σᶻσᶻ`.
    ///
    /// The spectrum is `{−3, 1, 1, 1}`. Because the triplet level is
    /// degenerate, the eigenbasis is fixed by hand to the canonical one
    /// (singlet, symmetric combination, |00⟩, |11⟩) rather than left to the
    /// solver, so eigenbasis mixtures mean the same thing on every platform.
    pub fn exchange() -> Self {
        let h = kron(&pauli_x(), &pauli_x())
            + kron(&pauli_y(), &pauli_y())
            + kron(&pauli_z(), &pauli_z());
        let r = 1.0 / 2.0f64.sqrt();
        let mut vectors = CMatrix::zeros(4, 4);
        // Singlet ground state (|01⟩ − |10⟩)/√2, then the triplet:
        // (|01⟩ + |10⟩)/√2, |00⟩, |11⟩.
        vectors[(1, 0)] = cplx(r, 0.0);
        vectors[(2, 0)] = cplx(-r, 0.0);
        vectors[(1, 1)] = cplx(r, 0.0);
        vectors[(2, 1)] = cplx(r, 0.0);
        vectors[(0, 2)] = cplx(1.0, 0.0);
        vectors[(3, 3)] = cplx(1.0, 0.0);
        let energies = vec![-3.0, 1.0, 1.0, 1.0];
        let spectrum = Spectrum { energies, vectors };
        let model = SpinModel { kind: ModelKind::Exchange, d_control: 2, d_rest: 2, h, spectrum };
        debug_assert!(model.decomposition_defect() < tol::HERMITICITY);
        model
    }

    /// Arbitrary Hermitian `h` on a `d_control · d_rest` space.
    pub fn custom(h: CMatrix, d_control: usize, d_rest: usize) -> Result<Self> {
        let dim = d_control * d_rest;
        if d_control < 2 || d_rest < 1 || h.nrows() != dim || h.ncols() != dim {
            return Err(SlpError::DimensionMismatch { expected: dim, got: h.nrows() });
        }
        let spectrum = eig_hermitian(&h)?;
        Ok(SpinModel { kind: ModelKind::Custom, d_control, d_rest, h, spectrum })
    }

    /// A copy of this model with the Hamiltonian negated. Extraction problems
    /// on the negated model are injection problems on the original.
    pub fn negated(&self) -> Result<Self> {
        let mut m = Self::custom(-self.h.clone(), self.d_control, self.d_rest)?;
        m.kind = ModelKind::Custom;
        Ok(m)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.h
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.d_control * self.d_rest
    }

    pub fn d_control(&self) -> usize {
        self.d_control
    }

    pub fn d_rest(&self) -> usize {
        self.d_rest
    }

    pub fn energies(&self) -> &[f64] {
        &self.spectrum.energies
    }

    /// `max|HV − VD|` for the stored decomposition; used to validate the
    /// hand-fixed exchange basis and available to tests for the rest.
    pub fn decomposition_defect(&self) -> f64 {
        let n = self.dim();
        let hv = &self.h * &self.spectrum.vectors;
        let vd = CMatrix::from_fn(n, n, |i, j| {
            self.spectrum.vectors[(i, j)] * self.spectrum.energies[j]
        });
        qcore::max_abs_diff(&hv, &vd)
    }

    /// Thermal populations over this model's eigenbasis.
    pub fn gibbs(&self, t: Temperature) -> Eigenmixture {
        let pops = gibbs_populations(self.energies(), t);
        Eigenmixture { pops }
    }

    /// Structure of the ground level, used to gate critical-temperature
    /// searches: a degenerate or product ground state admits extraction at
    /// arbitrarily low temperature or none at all, and either way the search
    /// below is meaningless.
    pub fn ground_class(&self) -> GroundClass {
        self.level_class(0)
    }

    /// Same classification for an arbitrary level; `level_class(d−1)` feeds
    /// the charging analysis, where the roles of top and bottom swap.
    pub fn level_class(&self, k: usize) -> GroundClass {
        let e = self.spectrum.energies[k];
        let neighbor_gap = if k == 0 {
            self.spectrum.ground_gap()
        } else if k + 1 == self.dim() {
            e - self.spectrum.energies[k - 1]
        } else {
            f64::min(e - self.spectrum.energies[k - 1], self.spectrum.energies[k + 1] - e)
        };
        let degenerate = neighbor_gap <= tol::DEGENERACY_GAP * f64::max(1.0, e.abs());
        let state = self.spectrum.vector(k);
        let rank = schmidt(&state, self.d_control, self.d_rest)
            .map(|s| s.rank(tol::SCHMIDT_RANK))
            .unwrap_or(0);
        let product = rank <= 1;
        let full_rank = rank == usize::min(self.d_control, self.d_rest);
        GroundClass { gap: neighbor_gap, degenerate, product, full_rank }
    }
}

fn pair_hamiltonian(kappa: f64, gamma: f64) -> CMatrix {
    let xx = kron(&pauli_x(), &pauli_x());
    let yy = kron(&pauli_y(), &pauli_y());
    let zf = kron(&pauli_z(), &eye(2)) + kron(&eye(2), &pauli_z());
    xx * cplx(kappa * (1.0 + gamma) / 2.0, 0.0) + yy * cplx(kappa * (1.0 - gamma) / 2.0, 0.0) + zf
}

/// Level structure report from [`SpinModel::ground_class`] /
/// [`SpinModel::level_class`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundClass {
    /// Gap to the nearest neighboring level.
    pub gap: f64,
    /// Level is degenerate (gap below the relative tolerance).
    pub degenerate: bool,
    /// Eigenstate is a product state across the control/rest split.
    pub product: bool,
    /// Eigenstate has full Schmidt rank (fully entangled), the hypothesis
    /// under which the threshold guarantees hold.
    pub full_rank: bool,
}

impl GroundClass {
    /// True when the low-temperature limit is already decided and no
    /// finite critical temperature exists to search for.
    pub fn blocks_search(&self) -> bool {
        self.degenerate || self.product
    }
}

/// Temperature of a thermal state; infinity is an explicit, valid value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Finite(f64),
    Infinite,
}

impl Temperature {
    /// Classify a raw value: positive finite values are finite temperatures,
    /// `+∞` is the maximally mixed limit, everything else is rejected.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_infinite() && value > 0.0 {
            Ok(Temperature::Infinite)
        } else if value.is_finite() && value > 0.0 {
            Ok(Temperature::Finite(value))
        } else {
            Err(SlpError::BadParameter {
                name: "temperature",
                reason: "must be positive (finite or +inf)".to_string(),
            })
        }
    }

    /// The raw value, with `+∞` for the infinite case.
    pub fn value(&self) -> f64 {
        match self {
            Temperature::Finite(t) => *t,
            Temperature::Infinite => f64::INFINITY,
        }
    }
}

/// Boltzmann weights `p_k ∝ exp(−(E_k − E₀)/T)`, normalized. `T = ∞` gives
/// the uniform distribution.
pub fn gibbs_populations(energies: &[f64], t: Temperature) -> Vec<f64> {
    match t {
        Temperature::Infinite => {
            let n = energies.len() as f64;
            vec![1.0 / n; energies.len()]
        }
        Temperature::Finite(t) => {
            let e0 = energies[0];
            let weights: Vec<f64> = energies.iter().map(|e| (-(e - e0) / t).exp()).collect();
            let z: f64 = weights.iter().sum();
            weights.iter().map(|w| w / z).collect()
        }
    }
}

/// A statistical mixture diagonal in a model's energy eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenmixture {
    pops: Vec<f64>,
}

impl Eigenmixture {
    /// Validate and normalize a population vector. Entries may undershoot
    /// zero by at most [`tol::PROBABILITY`] (they are clamped); the total
    /// must match one to the same tolerance before renormalization.
    pub fn new(pops: &[f64]) -> Result<Self> {
        if pops.is_empty() {
            return Err(SlpError::BadPopulations { reason: "empty" });
        }
        let mut cleaned = Vec::with_capacity(pops.len());
        for &p in pops {
            if !p.is_finite() || p < -tol::PROBABILITY {
                return Err(SlpError::BadPopulations { reason: "negative or non-finite entry" });
            }
            cleaned.push(p.max(0.0));
        }
        let total: f64 = cleaned.iter().sum();
        if (total - 1.0).abs() > tol::PROBABILITY {
            return Err(SlpError::BadPopulations { reason: "entries do not sum to 1" });
        }
        for p in &mut cleaned {
            *p /= total;
        }
        Ok(Eigenmixture { pops: cleaned })
    }

    /// Mixture concentrated on eigenstate `k`.
    pub fn pure(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(SlpError::DimensionMismatch { expected: dim, got: k });
        }
        let mut pops = vec![0.0; dim];
        pops[k] = 1.0;
        Ok(Eigenmixture { pops })
    }

    /// Two-level mixture `p|E_a⟩⟨E_a| + (1−p)|E_b⟩⟨E_b|`.
    pub fn two_level(dim: usize, a: usize, b: usize, p: f64) -> Result<Self> {
        if a >= dim || b >= dim || a == b {
            return Err(SlpError::DimensionMismatch { expected: dim, got: a.max(b) });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(SlpError::BadPopulations { reason: "weight outside [0, 1]" });
        }
        let mut pops = vec![0.0; dim];
        pops[a] = p;
        pops[b] = 1.0 - p;
        Ok(Eigenmixture { pops })
    }

    pub fn populations(&self) -> &[f64] {
        &self.pops
    }

    /// Density matrix `Σ_k p_k |E_k⟩⟨E_k|` in the model's eigenbasis.
    pub fn density(&self, model: &SpinModel) -> Result<CMatrix> {
        let n = model.dim();
        if self.pops.len() != n {
            return Err(SlpError::DimensionMismatch { expected: n, got: self.pops.len() });
        }
        let v = &model.spectrum().vectors;
        let weighted = CMatrix::from_fn(n, n, |i, j| v[(i, j)] * self.pops[j]);
        Ok(&weighted * v.adjoint())
    }

    /// Mean energy `Σ_k p_k E_k`.
    pub fn energy(&self, model: &SpinModel) -> f64 {
        self.pops.iter().zip(model.energies()).map(|(p, e)| p * e).sum()
    }
}

/// Complex amplitudes are never needed for Gibbs weights, but several tests
/// want the matrix exponential route as an independent check; keep the
/// straightforward `V f(D) V†` helper public.
pub fn function_of(model: &SpinModel, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = model.dim();
    let v = &model.spectrum().vectors;
    let weighted = CMatrix::from_fn(n, n, |i, j| v[(i, j)] * f(model.energies()[j]));
    &weighted * v.adjoint()
}
