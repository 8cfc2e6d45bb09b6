//! Kraus representations of quantum operations on the control subsystem.
//!
//! A channel acting on the `d`-dimensional control factor is a set of Kraus
//! operators `{K_μ}` with `Σ_μ K_μ†K_μ = 𝟙`. Applied locally it sends
//! `ρ ↦ Σ_μ (K_μ⊗𝟙) ρ (K_μ⊗𝟙)†`. Stacking the operators vertically gives an
//! isometry `V = [K_0; K_1; …]` with `V†V = 𝟙`, i.e. a point on a Stiefel
//! manifold; the ascent oracle optimizes over that manifold and converts back
//! here.

use alloc::vec;
use alloc::vec::Vec;

// Resolves float math (sqrt, exp, trig) when building without std.
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::qcore::{cplx, eye, kron, max_abs_diff, CMatrix};
use crate::{tol, Result, SlpError};

/// A validated Kraus set on the control subsystem.
#[derive(Debug, Clone)]
pub struct KrausSet {
    ops: Vec<CMatrix>,
}

impl KrausSet {
    /// Validate operator shapes and the completeness identity `Σ K†K = 𝟙`.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let dim = match ops.first() {
            Some(k) => k.nrows(),
            None => return Err(SlpError::NotCompletenessPreserving { max_dev: 1.0 }),
        };
        for k in &ops {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(SlpError::DimensionMismatch { expected: dim, got: k.nrows() });
            }
        }
        let set = KrausSet { ops };
        let dev = set.completeness_defect();
        if dev > tol::COMPLETENESS {
            return Err(SlpError::NotCompletenessPreserving { max_dev: dev });
        }
        Ok(set)
    }

    /// The do-nothing channel.
    pub fn identity(dim: usize) -> Self {
        KrausSet { ops: vec![eye(dim)] }
    }

    /// Single-qubit rotation about σʸ by angle `theta`:
    /// `K = [[cos θ, −sin θ], [sin θ, cos θ]]`.
    pub fn unitary_y(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let k = CMatrix::from_row_slice(2, 2, &[cplx(c, 0.0), cplx(-s, 0.0), cplx(s, 0.0), cplx(c, 0.0)]);
        KrausSet { ops: vec![k] }
    }

    /// Draw a Haar-like random channel with `n_kraus` operators on a
    /// `d_control`-dimensional control space: a complex Gaussian matrix is
    /// orthonormalized into an isometry and cut into blocks. The same seed
    /// always produces the same channel.
    pub fn random(d_control: usize, n_kraus: usize, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(d_control * n_kraus, d_control, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            cplx(re, im)
        });
        let v = qf(&g);
        Self::from_stiefel(&v, d_control, n_kraus).expect("orthonormalized matrix is an isometry")
    }

    /// Cut an isometry `V = [K_0; K_1; …]` back into Kraus blocks.
    pub fn from_stiefel(v: &CMatrix, d_control: usize, n_kraus: usize) -> Result<Self> {
        if v.nrows() != d_control * n_kraus || v.ncols() != d_control {
            return Err(SlpError::DimensionMismatch {
                expected: d_control * n_kraus,
                got: v.nrows(),
            });
        }
        let dev = max_abs_diff(&(v.adjoint() * v), &eye(d_control));
        if dev > tol::COMPLETENESS {
            return Err(SlpError::NotCompletenessPreserving { max_dev: dev });
        }
        let ops = (0..n_kraus)
            .map(|mu| v.view((mu * d_control, 0), (d_control, d_control)).into_owned())
            .collect();
        Ok(KrausSet { ops })
    }

    /// Stack the Kraus operators into the equivalent Stiefel isometry.
    pub fn to_stiefel(&self) -> CMatrix {
        let d = self.dim();
        let mut v = CMatrix::zeros(d * self.ops.len(), d);
        for (mu, k) in self.ops.iter().enumerate() {
            v.view_mut((mu * d, 0), (d, d)).copy_from(k);
        }
        v
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    pub fn num_ops(&self) -> usize {
        self.ops.len()
    }

    /// `max|Σ K†K − 𝟙|`.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.dim();
        let mut acc = CMatrix::zeros(d, d);
        for k in &self.ops {
            acc += k.adjoint() * k;
        }
        max_abs_diff(&acc, &eye(d))
    }

    /// True when every Kraus operator is proportional to the identity, so
    /// the channel acts as the identity map and cannot move any energy.
    pub fn is_trivial(&self, tolerance: f64) -> bool {
        let d = self.dim();
        self.ops.iter().all(|k| {
            let scale = k[(0, 0)];
            let scaled = eye(d) * scale;
            max_abs_diff(k, &scaled) <= tolerance
        })
    }

    /// Apply the channel to the control factor of `rho`:
    /// `ρ ↦ Σ_μ (K_μ⊗𝟙_rest) ρ (K_μ⊗𝟙_rest)†`.
    pub fn apply_local(&self, rho: &CMatrix, d_rest: usize) -> Result<CMatrix> {
        let dim = self.dim() * d_rest;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(SlpError::DimensionMismatch { expected: dim, got: rho.nrows() });
        }
        let id = eye(d_rest);
        let mut out = CMatrix::zeros(dim, dim);
        for k in &self.ops {
            let big = kron(k, &id);
            out += &big * rho * big.adjoint();
        }
        Ok(out)
    }
}

/// Thin QR orthonormalization with a fixed gauge: the `R` factor's diagonal
/// is rotated to the positive real axis, which makes the map idempotent on
/// isometries and keeps the ascent retraction continuous.
pub fn qf(a: &CMatrix) -> CMatrix {
    let qr = a.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q.clone();
    for j in 0..out.ncols() {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n > 0.0 { d / n } else { cplx(1.0, 0.0) };
        for i in 0..out.nrows() {
            out[(i, j)] = q[(i, j)] * phase;
        }
    }
    out
}

/// Deterministic random density matrix, `ρ = GG†/Tr[GG†]` with `G` complex
/// Gaussian. Shared by tests and self-checks.
pub fn random_density(dim: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cplx(re, im)
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    m * cplx(1.0 / tr, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{basis_state, herm_defect, projector};
    use num_complex::Complex;

    #[test]
    fn rotation_is_complete_and_moves_basis_states() {
        let ch = KrausSet::unitary_y(core::f64::consts::FRAC_PI_2);
        assert!(ch.completeness_defect() < 1e-15);
        let rho = kron(
            &projector(&basis_state(2, 0).unwrap()),
            &projector(&basis_state(2, 1).unwrap()),
        );
        let out = ch.apply_local(&rho, 2).unwrap();
        // Control |0⟩ rotates to |1⟩; the rest factor is untouched.
        assert!((out[(3, 3)].re - 1.0).abs() < 1e-14);
        assert!(out[(1, 1)].norm() < 1e-14);
    }

    #[test]
    fn incomplete_sets_are_rejected() {
        let half = eye(2) * cplx(0.9, 0.0);
        match KrausSet::new(vec![half]) {
            Err(SlpError::NotCompletenessPreserving { max_dev }) => assert!(max_dev > 0.1),
            other => panic!("expected completeness failure, got {other:?}"),
        }
    }

    #[test]
    fn two_operator_damping_set_validates() {
        // Partial decay |0⟩ → |1⟩ with retention amplitude q.
        let q = 0.5f64;
        let k1 = CMatrix::from_row_slice(
            2,
            2,
            &[cplx(q, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0)],
        );
        let k2 = CMatrix::from_row_slice(
            2,
            2,
            &[cplx(0.0, 0.0), cplx(0.0, 0.0), cplx((1.0 - q * q).sqrt(), 0.0), cplx(0.0, 0.0)],
        );
        let ch = KrausSet::new(vec![k1, k2]).unwrap();
        assert!(ch.completeness_defect() < 1e-15);
        assert!(!ch.is_trivial(1e-12));
    }

    #[test]
    fn random_channels_are_deterministic_and_complete() {
        let a = KrausSet::random(2, 4, 7);
        let b = KrausSet::random(2, 4, 7);
        let c = KrausSet::random(2, 4, 8);
        assert!(a.completeness_defect() < 1e-13);
        for (x, y) in a.ops().iter().zip(b.ops()) {
            assert!(max_abs_diff(x, y) == 0.0);
        }
        let mut differs = 0.0f64;
        for (x, y) in a.ops().iter().zip(c.ops()) {
            differs = differs.max(max_abs_diff(x, y));
        }
        assert!(differs > 1e-3);
    }

    #[test]
    fn stiefel_round_trip_preserves_operators() {
        let ch = KrausSet::random(2, 3, 42);
        let v = ch.to_stiefel();
        let back = KrausSet::from_stiefel(&v, 2, 3).unwrap();
        for (x, y) in ch.ops().iter().zip(back.ops()) {
            assert!(max_abs_diff(x, y) == 0.0);
        }
        // A non-isometry must be refused.
        let bad = v * cplx(1.1, 0.0);
        assert!(KrausSet::from_stiefel(&bad, 2, 3).is_err());
    }

    #[test]
    fn qf_fixes_isometries() {
        let ch = KrausSet::random(2, 4, 3);
        let v = ch.to_stiefel();
        let w = qf(&v);
        assert!(max_abs_diff(&v, &w) < 1e-12);
    }

    #[test]
    fn triviality_detects_global_phases_only() {
        assert!(KrausSet::identity(2).is_trivial(1e-12));
        let phase = KrausSet::new(vec![eye(2) * Complex::from_polar(1.0, 0.7)]).unwrap();
        assert!(phase.is_trivial(1e-12));
        assert!(!KrausSet::unitary_y(0.3).is_trivial(1e-12));
        assert!(!KrausSet::random(2, 4, 1).is_trivial(1e-12));
    }

    #[test]
    fn local_application_preserves_trace_and_hermiticity() {
        let rho = random_density(8, 11);
        let ch = KrausSet::random(2, 4, 5);
        let out = ch.apply_local(&rho, 4).unwrap();
        assert!((out.trace().re - 1.0).abs() < 1e-13);
        assert!(out.trace().im.abs() < 1e-14);
        assert!(herm_defect(&out) < 1e-13);

        let id = KrausSet::identity(2);
        let same = id.apply_local(&rho, 4).unwrap();
        assert!(max_abs_diff(&same, &rho) < 1e-15);
    }
}
