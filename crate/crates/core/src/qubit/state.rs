use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::pauli::PauliString;
use crate::error::{Error, Result};

/// Default ceiling on the number of qubits accepted by [`make_state`].
pub const DEFAULT_MAX_QUBITS: usize = 6;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const IMAG_TOL: f64 = 1e-10;

/// A pure state vector over `n` qubits.
///
/// Basis index `k` encodes `|b₁…bₙ⟩` with `b_j` the bit of weight `2^{n−j}`:
/// qubit 1 is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
    normalized: bool,
}

/// Builds a state from `2^n` amplitudes, rescaling to unit norm when asked.
pub fn make_state(n: usize, amplitudes: Vec<Complex64>, normalize: bool) -> Result<PureState> {
    PureState::with_limit(n, amplitudes, normalize, DEFAULT_MAX_QUBITS)
}

impl PureState {
    pub fn with_limit(
        n: usize,
        mut amplitudes: Vec<Complex64>,
        normalize: bool,
        max_qubits: usize,
    ) -> Result<Self> {
        if n == 0 || n > max_qubits {
            return Err(Error::Dimension(format!("n_qubits = {n} outside 1..={max_qubits}")));
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "expected {} amplitudes for {n} qubits, got {}",
                1 << n,
                amplitudes.len()
            )));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() {
            return Err(Error::Degenerate("non-finite amplitudes".into()));
        }
        if norm_sqr == 0.0 {
            return Err(Error::Degenerate("all amplitudes are zero".into()));
        }
        let normalized = if normalize {
            let s = norm_sqr.sqrt();
            amplitudes.iter_mut().for_each(|a| *a /= s);
            true
        } else {
            (norm_sqr - 1.0).abs() <= NORM_TOL
        };
        Ok(Self {
            n_qubits: n,
            amplitudes,
            normalized,
        })
    }

    /// Real amplitudes, normalized.
    pub fn from_real(n: usize, amplitudes: &[f64]) -> Result<Self> {
        make_state(n, amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(), true)
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[k] = Complex64::new(1.0, 0.0);
        Self {
            n_qubits: n,
            amplitudes: amps,
            normalized: true,
        }
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(n: usize) -> Self {
        let mut amps = vec![0.0; 1 << n];
        amps[0] = 1.0;
        amps[(1 << n) - 1] = 1.0;
        Self::from_real(n, &amps).expect("valid ghz")
    }

    /// Equal superposition of the single-excitation basis states.
    pub fn w(n: usize) -> Self {
        let mut amps = vec![0.0; 1 << n];
        for j in 0..n {
            amps[1 << j] = 1.0;
        }
        Self::from_real(n, &amps).expect("valid w")
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        Self::ghz(2)
    }

    /// Haar-random pure state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let amps = (0..1 << n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        make_state(n, amps, true).expect("gaussian vector is nonzero")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Unit-norm copy.
    pub fn normalized(&self) -> Self {
        make_state_unchecked(self.n_qubits, self.amplitudes.clone(), true)
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Result<Self> {
        let amps = self.amplitudes.iter().map(|a| a * factor).collect();
        Self::with_limit(self.n_qubits, amps, false, usize::MAX)
    }

    /// Relabels qubits: qubit `j` of the result is qubit `perm[j]` of `self`
    /// (both 0-based).
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_qubits;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Parameter(format!("{perm:?} is not a permutation of {n} qubits")));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (k, &a) in self.amplitudes.iter().enumerate() {
            let mut t = 0;
            for (j, &p) in perm.iter().enumerate() {
                let bit = (k >> (n - 1 - p)) & 1;
                t |= bit << (n - 1 - j);
            }
            out[t] = a;
        }
        Ok(make_state_unchecked(n, out, false))
    }

    /// `⟨ψ|P|ψ⟩` without any normalization check.
    pub fn bilinear(&self, s: &PauliString) -> Complex64 {
        let masks = s.masks();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(k, &a)| {
                let (t, ph) = PauliString::act(masks, k);
                self.amplitudes[t].conj() * ph * a
            })
            .sum()
    }

    pub fn to_dvector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.amplitudes)
    }

    pub fn projector(&self) -> DMatrix<Complex64> {
        let v = self.to_dvector();
        &v * v.adjoint()
    }
}

/// Skips validation except for the normalization flag.
pub(crate) fn make_state_unchecked(n: usize, mut amplitudes: Vec<Complex64>, normalize: bool) -> PureState {
    let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if normalize && norm_sqr > 0.0 {
        let s = norm_sqr.sqrt();
        amplitudes.iter_mut().for_each(|a| *a /= s);
    }
    let normalized = normalize || (norm_sqr - 1.0).abs() <= NORM_TOL;
    PureState {
        n_qubits: n,
        amplitudes,
        normalized,
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix over the same basis
/// as [`PureState`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = 1usize << n_qubits;
        if n_qubits == 0 || matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension(format!(
                "density matrix for {n_qubits} qubits must be {d}x{d}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = (&matrix - matrix.adjoint()).camax();
        if herm > HERMITIAN_TOL {
            return Err(Error::Parameter(format!("matrix not Hermitian (deviation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > HERMITIAN_TOL {
            return Err(Error::Parameter(format!("trace {tr} differs from 1")));
        }
        let rho = Self { n_qubits, matrix };
        let min_eig = rho.eigen().0.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::Parameter(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(rho)
    }

    pub(crate) fn new_unchecked(n_qubits: usize, matrix: DMatrix<Complex64>) -> Self {
        Self { n_qubits, matrix }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let p = psi.normalized();
        Self {
            n_qubits: p.n_qubits,
            matrix: p.projector(),
        }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1 << n;
        Self {
            n_qubits: n,
            matrix: DMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
        }
    }

    /// `Σ w_i |ψ_i⟩⟨ψ_i|`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &PureState)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Degenerate("empty mixture".into()))?;
        let n = first.1.n_qubits();
        let d = 1 << n;
        let mut m = DMatrix::zeros(d, d);
        for (w, psi) in parts {
            if psi.n_qubits() != n {
                return Err(Error::Dimension("mixture components differ in qubit count".into()));
            }
            if *w < 0.0 {
                return Err(Error::Parameter(format!("negative weight {w}")));
            }
            m += psi.normalized().projector() * Complex64::new(*w, 0.0);
        }
        Self::new(n, m)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Eigenvalues (ascending) and matching orthonormal eigenvectors as columns.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let eig = self.matrix.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(self.dim(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
        (values, vectors)
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigen().0.iter().filter(|&&l| l > tol).count()
    }
}

/// Anything that assigns a real expectation value to a Pauli string.
pub trait Expectation {
    fn n_qubits(&self) -> usize;

    /// `⟨P⟩` for a normalized pure state or `tr(ρP)` for a density matrix.
    fn expectation(&self, s: &PauliString) -> Result<f64>;

    fn is_pure(&self) -> bool;
}

fn check_real(z: Complex64, what: &str) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::Consistency(format!("{what} has imaginary part {:e}", z.im)));
    }
    Ok(z.re)
}

impl Expectation for PureState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn expectation(&self, s: &PauliString) -> Result<f64> {
        if s.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "string {s} has {} qubits, state has {}",
                s.n_qubits(),
                self.n_qubits
            )));
        }
        if !self.normalized {
            return Err(Error::Parameter("expectation requires a normalized state".into()));
        }
        check_real(self.bilinear(s), "pure-state expectation")
    }

    fn is_pure(&self) -> bool {
        true
    }
}

impl Expectation for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn expectation(&self, s: &PauliString) -> Result<f64> {
        if s.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "string {s} has {} qubits, density matrix has {}",
                s.n_qubits(),
                self.n_qubits
            )));
        }
        // tr(ρP) = Σ_k ρ[k, t(k)] · phase(k) with P|k⟩ = phase(k)|t(k)⟩
        let masks = s.masks();
        let z: Complex64 = (0..self.dim())
            .map(|k| {
                let (t, ph) = PauliString::act(masks, k);
                self.matrix[(k, t)] * ph
            })
            .sum();
        check_real(z, "mixed-state expectation")
    }

    fn is_pure(&self) -> bool {
        false
    }
}

/// `(1−ε)|ψ⟩⟨ψ| + (ε/d)·1` with `d = 2^n`.
pub fn white_noise_mix(state: &PureState, eps: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Parameter(format!("eps = {eps} outside [0, 1]")));
    }
    if !state.is_normalized() {
        return Err(Error::Parameter("white_noise_mix requires a normalized state".into()));
    }
    Ok(white_noise_affine(state, eps))
}

/// Same affine combination without the range check; negative `eps` gives a
/// unit-trace Hermitian matrix that is not positive, used for centred
/// finite differences at `eps = 0`.
pub(crate) fn white_noise_affine(state: &PureState, eps: f64) -> DensityMatrix {
    let d = state.dim();
    let m = state.projector() * Complex64::new(1.0 - eps, 0.0)
        + DMatrix::identity(d, d) * Complex64::new(eps / d as f64, 0.0);
    DensityMatrix::new_unchecked(state.n_qubits(), m)
}
