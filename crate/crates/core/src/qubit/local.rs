use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::state::{make_state_unchecked, PureState};
use crate::error::{Error, Result};

const DET_TOL: f64 = 1e-10;

/// Default squeezing bound for [`sample_local_group`].
pub const DEFAULT_S_MAX: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    SL2C,
    SU2,
}

/// A single-qubit element of SL(2,ℂ) or SU(2).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalInvertible {
    matrix: Matrix2<Complex64>,
    kind: GroupKind,
}

impl LocalInvertible {
    pub fn new(matrix: Matrix2<Complex64>, kind: GroupKind) -> Result<Self> {
        let det = matrix.determinant();
        if (det - Complex64::new(1.0, 0.0)).norm() > DET_TOL {
            return Err(Error::Parameter(format!("determinant {det} is not 1")));
        }
        if kind == GroupKind::SU2 {
            let dev = (matrix.adjoint() * matrix - Matrix2::identity()).camax();
            if dev > DET_TOL {
                return Err(Error::Parameter(format!("matrix not unitary (deviation {dev:e})")));
            }
        }
        Ok(Self { matrix, kind })
    }

    pub fn identity() -> Self {
        Self {
            matrix: Matrix2::identity(),
            kind: GroupKind::SU2,
        }
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.matrix
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }
}

fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<Complex64> {
    let mut g = [0.0f64; 4];
    for x in g.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
    let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = Complex64::new(g[0] / n, g[1] / n);
    let b = Complex64::new(g[2] / n, g[3] / n);
    Matrix2::new(a, -b.conj(), b, a.conj())
}

/// [`sample_local_group_with`] at the default squeezing bound.
pub fn sample_local_group(kind: GroupKind, seed: u64) -> LocalInvertible {
    sample_local_group_with(kind, seed, DEFAULT_S_MAX)
}

/// SU2: Haar unitary. SL2C: `U₁ · diag(e^s, e^{−s}) · U₂` with Haar `U₁, U₂`
/// and `s` uniform in `[−s_max, s_max]`. Deterministic in `seed`.
pub fn sample_local_group_with(kind: GroupKind, seed: u64, s_max: f64) -> LocalInvertible {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u1 = haar_su2(&mut rng);
    let matrix = match kind {
        GroupKind::SU2 => u1,
        GroupKind::SL2C => {
            let u2 = haar_su2(&mut rng);
            let s = if s_max > 0.0 { rng.random_range(-s_max..=s_max) } else { 0.0 };
            let d = Matrix2::new(
                Complex64::new(s.exp(), 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new((-s).exp(), 0.0),
            );
            u1 * d * u2
        }
    };
    LocalInvertible { matrix, kind }
}

/// `(A₁ ⊗ … ⊗ Aₙ)|ψ⟩`, not re-normalized.
pub fn apply_local(state: &PureState, ops: &[LocalInvertible]) -> Result<PureState> {
    let n = state.n_qubits();
    if ops.len() != n {
        return Err(Error::Dimension(format!("{} local operators for {n} qubits", ops.len())));
    }
    let mut v = state.amplitudes().to_vec();
    for (j, op) in ops.iter().enumerate() {
        let bit = 1 << (n - 1 - j);
        let m = op.matrix();
        for k in 0..v.len() {
            if k & bit == 0 {
                let (a0, a1) = (v[k], v[k | bit]);
                v[k] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
                v[k | bit] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
            }
        }
    }
    Ok(make_state_unchecked(n, v, false))
}
