//! The antilinear → linear lift and the correlator forms of |C|² and |τ₃|².
//!
//! A comb `Ô 𝔠` with Hermitian `Ô` is lifted to `𝔏[Ô] = [(Ô∘Ô) ℙ]^{T_R}`:
//! two copies of `Ô` composed with the swap `ℙ` of the left and right
//! factors, followed by a transpose of the right factor. The right factor
//! carries the copy that came from the complex-conjugated expression. Then
//! `⟨ψ∘ψ|𝔏[Ô]|ψ∘ψ⟩ = |⟨ψ|Ô|ψ*⟩|²`, which turns every squared antilinear
//! invariant into a linear expectation value on doubled copies.
//!
//! Normalizations that follow from this convention:
//!
//! * `𝔏[σ_y] = 2·P₋ = ½ Σ_μ M_μμ σ_μ∘σ_μ`, with `M` the Minkowski metric.
//! * `𝔏[σ_μ•σ^μ] = Σ 𝔊_{κλμν} (σ_κ•σ_λ)∘(σ_μ•σ_ν)` defines [`GTensor`].
//! * Contracting `𝔊` on all three qubits evaluates the squared full-comb
//!   filter, which equals `9·τ₃²`; [`tau3_sq_linear`] divides it out.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::antilinear::COMB_METRIC;
use crate::correlator::{CorrelatorTable, TableSource};
use crate::error::{Error, Result};
use crate::qubit::{sigma, PureState};

/// Diagonal of the Minkowski metric `M = diag(1, −1, −1, −1)`.
pub const MINKOWSKI: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Diagonal of `γ = diag(1, 1, 0, 1)` in the back-transform of `P₊`.
pub const GAMMA_P_PLUS: [f64; 4] = [1.0, 1.0, 0.0, 1.0];

/// `|full-comb filter|² / τ₃²` on three qubits. Verified numerically by the
/// unit tests.
pub const FULL_COMB_RATIO: f64 = 9.0;

const HERMITIAN_TOL: f64 = 1e-10;
const FORM_AGREEMENT_TOL: f64 = 1e-8;

/// Linear operator on the doubled (left ∘ right) space. Always Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedOperator {
    matrix: DMatrix<Complex64>,
}

impl LiftedOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("lifted operator must be square".into()));
        }
        let dev = (&matrix - matrix.adjoint()).camax();
        if dev > HERMITIAN_TOL {
            return Err(Error::Consistency(format!("lifted operator not Hermitian (deviation {dev:e})")));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Number of single-qubit slots the operator acts on.
    pub fn n_slots(&self) -> usize {
        self.matrix.nrows().trailing_zeros() as usize
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Swap of two `d`-dimensional factors, written out entrywise.
pub fn swap_matrix(d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d * d, d * d, |r, col| {
        let (a, b) = (r / d, r % d);
        if col == b * d + a {
            c(1.0)
        } else {
            c(0.0)
        }
    })
}

/// `ℙ = ½ Σ_μ σ_μ∘σ_μ`.
pub fn permutation_p() -> LiftedOperator {
    let m = (0..4).fold(DMatrix::zeros(4, 4), |acc, mu| acc + sigma(mu).kronecker(&sigma(mu)))
        * c(0.5);
    LiftedOperator::new(m).expect("swap is Hermitian")
}

/// Projector onto the antisymmetric subspace of two qubits.
pub fn p_minus() -> DMatrix<Complex64> {
    (DMatrix::identity(4, 4) - swap_matrix(2)) * c(0.5)
}

/// Projector onto the symmetric subspace of two qubits.
pub fn p_plus() -> DMatrix<Complex64> {
    (DMatrix::identity(4, 4) + swap_matrix(2)) * c(0.5)
}

/// Transpose of the right factor of a `d ⊗ d` operator.
fn partial_transpose_right(x: &DMatrix<Complex64>, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d * d, d * d, |r, col| {
        let (a, b) = (r / d, r % d);
        let (cc, dd) = (col / d, col % d);
        x[(a * d + dd, cc * d + b)]
    })
}

/// `𝔏[Ô] = [(Ô∘Ô) ℙ]^{T_R}`. `Ô` acts on one or more `•` copies of a single
/// qubit, so it is `2^c × 2^c`; the result acts on `2c` slots ordered
/// (left copies, right copies).
pub fn lift_comb(o_hat: &DMatrix<Complex64>) -> Result<LiftedOperator> {
    let d = o_hat.nrows();
    if !o_hat.is_square() || d < 2 || !d.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "comb operator must be 2^c x 2^c, got {}x{}",
            o_hat.nrows(),
            o_hat.ncols()
        )));
    }
    let doubled = o_hat.kronecker(o_hat) * swap_matrix(d);
    LiftedOperator::new(partial_transpose_right(&doubled, d))
}

/// `Σ_μν g_μν σ_μ•σ_ν`, the linear part of the two-copy comb.
pub fn comb_o2_operator() -> DMatrix<Complex64> {
    (0..4).fold(DMatrix::zeros(4, 4), |acc, mu| {
        acc + sigma(mu).kronecker(&sigma(mu)) * c(COMB_METRIC[mu])
    })
}

/// Least-squares constant `c` with `𝔏[σ_y] ≈ c·P₋`, and the max entrywise
/// residual of that fit.
pub fn p_minus_proportionality() -> (f64, f64) {
    let lifted = lift_comb(&sigma(2)).expect("σ_y lifts");
    let pm = p_minus();
    // tr(P₋ P₋) = tr(P₋) = 1
    let scale = (lifted.matrix() * &pm).trace().re;
    let residual = (lifted.matrix() - &pm * c(scale)).camax();
    (scale, residual)
}

/// Applies a `2^s`-dimensional operator to the listed qubits of a register
/// with `total` qubits (position 0 is the most significant bit).
pub(crate) fn apply_on_qubits(
    v: &[Complex64],
    total: usize,
    op: &DMatrix<Complex64>,
    qubits: &[usize],
) -> Vec<Complex64> {
    let s = qubits.len();
    let bits: Vec<usize> = qubits.iter().map(|&q| 1 << (total - 1 - q)).collect();
    let mask: usize = bits.iter().sum();
    let sub = 1 << s;
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    let mut idx = vec![0usize; sub];
    for base in (0..v.len()).filter(|b| b & mask == 0) {
        for (j, slot) in idx.iter_mut().enumerate() {
            *slot = base
                | bits
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| (j >> (s - 1 - t)) & 1 == 1)
                    .map(|(_, b)| b)
                    .sum::<usize>();
        }
        for r in 0..sub {
            let mut acc = Complex64::new(0.0, 0.0);
            for col in 0..sub {
                acc += op[(r, col)] * v[idx[col]];
            }
            out[idx[r]] = acc;
        }
    }
    out
}

/// `⟨ψ^{⊗k}| ⊗_q L_q |ψ^{⊗k}⟩` where `L_q` acts on qubit `q` of every copy
/// and `k` is the slot count of the lifted operators. Copies are ordered
/// (left copies, right copies), matching [`lift_comb`].
pub fn lifted_expectation(psi: &PureState, per_qubit: &[&LiftedOperator]) -> Result<f64> {
    let n = psi.n_qubits();
    if per_qubit.len() != n {
        return Err(Error::Dimension(format!("{} lifted operators for {n} qubits", per_qubit.len())));
    }
    let copies = per_qubit[0].n_slots();
    if per_qubit.iter().any(|l| l.n_slots() != copies) {
        return Err(Error::Dimension("lifted operators act on different copy counts".into()));
    }
    if copies * n > 14 {
        return Err(Error::Dimension(format!("{} register qubits exceed the dense limit", copies * n)));
    }
    let mut v = psi.amplitudes().to_vec();
    for _ in 1..copies {
        v = v
            .iter()
            .flat_map(|a| psi.amplitudes().iter().map(move |b| a * b))
            .collect();
    }
    let total = copies * n;
    let mut w = v.clone();
    for (q, op) in per_qubit.iter().enumerate() {
        let slots: Vec<usize> = (0..copies).map(|j| j * n + q).collect();
        w = apply_on_qubits(&w, total, op.matrix(), &slots);
    }
    let z: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
    if z.im.abs() > HERMITIAN_TOL * z.norm().max(1.0) {
        return Err(Error::Consistency(format!("lifted expectation has imaginary part {:e}", z.im)));
    }
    Ok(z.re)
}

/// `⟨φ∘φ|𝔏[σ_y]⊗𝔏[σ_y]|φ∘φ⟩ = |⟨φ|σ_yσ_y|φ*⟩|²` for a two-qubit vector.
pub fn p_minus_polynomial(phi: &PureState) -> Result<f64> {
    let l = lift_comb(&sigma(2))?;
    lifted_expectation(phi, &[&l, &l])
}

/// `⟨φ∘φ|P₊⊗P₊|φ∘φ⟩` for a two-qubit vector. Not SL invariant.
pub fn p_plus_polynomial(phi: &PureState) -> Result<f64> {
    let l = LiftedOperator::new(p_plus())?;
    lifted_expectation(phi, &[&l, &l])
}

/// `|τ₃|²` from the lifted operators directly: `𝔏[σ_μ•σ^μ]` on qubit 1 and
/// `𝔏[σ_y•σ_y]` on qubits 2 and 3, over four copies.
pub fn tau3_sq_via_lifts(chi: &PureState) -> Result<f64> {
    if chi.n_qubits() != 3 {
        return Err(Error::Dimension("tau3 needs three qubits".into()));
    }
    let first = lift_comb(&comb_o2_operator())?;
    let yy = lift_comb(&sigma(2).kronecker(&sigma(2)))?;
    lifted_expectation(chi, &[&first, &yy, &yy])
}

/// `(lhs, rhs)` of the `P₊` back-transform for one qubit:
/// `lhs = ⟨ψ∘ψ|P₊|ψ∘ψ⟩`, `rhs = Σ γ_μν ⟨ψ|σ_μ|ψ*⟩⟨ψ*|σ_ν|ψ⟩`.
pub fn p_plus_identity_check(psi: &PureState) -> Result<(f64, f64)> {
    if psi.n_qubits() != 1 {
        return Err(Error::Dimension("P+ identity is stated for one qubit".into()));
    }
    let lhs = lifted_expectation(psi, &[&LiftedOperator::new(p_plus())?])?;
    let a = psi.amplitudes();
    let rhs = (0..4)
        .map(|mu| {
            let s = sigma(mu);
            // ⟨ψ*|σ|ψ⟩ = Σ ψ_i σ_ij ψ_j, and ⟨ψ|σ|ψ*⟩ = Σ ψ̄_i σ_ij ψ̄_j
            let mut ket = Complex64::new(0.0, 0.0);
            let mut bra = Complex64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    ket += a[i] * s[(i, j)] * a[j];
                    bra += a[i].conj() * s[(i, j)] * a[j].conj();
                }
            }
            (bra * ket).re * GAMMA_P_PLUS[mu]
        })
        .sum();
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GProvenance {
    /// Transcribed from the printed `H`/`J` pattern.
    ClosedForm,
    /// Read off `𝔏[σ_μ•σ^μ]` by Pauli-basis trace projection.
    Derived,
}

impl GProvenance {
    pub fn as_str(self) -> &'static str {
        match self {
            GProvenance::ClosedForm => "closed_form",
            GProvenance::Derived => "derived",
        }
    }
}

/// Real `4×4×4×4` tensor `𝔊_{κλμν}` with slot order (left •1, left •2,
/// right •1, right •2).
#[derive(Debug, Clone, PartialEq)]
pub struct GTensor {
    values: [f64; 256],
    provenance: GProvenance,
}

/// Entries of the printed `H` matrix.
pub const H_MATRIX: [[f64; 4]; 4] = [
    [-0.5, 0.0, 0.0, -0.5],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
    [-0.5, 0.0, 0.0, -0.5],
];

/// Entries of the printed `J` matrix.
pub const J_MATRIX: [[f64; 4]; 4] = [
    [0.5, 0.0, 0.0, 0.5],
    [0.0, 0.25, 0.25, 0.0],
    [0.0, 0.25, 0.25, 0.0],
    [0.5, 0.0, 0.0, 0.5],
];

#[inline]
fn flat(k: usize, l: usize, m: usize, n: usize) -> usize {
    ((k * 4 + l) * 4 + m) * 4 + n
}

impl GTensor {
    pub fn get(&self, k: usize, l: usize, m: usize, n: usize) -> f64 {
        self.values[flat(k, l, m, n)]
    }

    pub fn provenance(&self) -> GProvenance {
        self.provenance
    }

    pub fn values(&self) -> &[f64; 256] {
        &self.values
    }

    /// Entries with `|value| > 1e-14`.
    pub fn nonzeros(&self) -> Vec<([usize; 4], f64)> {
        (0..256)
            .filter(|&i| self.values[i].abs() > 1e-14)
            .map(|i| ([i / 64, (i / 16) % 4, (i / 4) % 4, i % 4], self.values[i]))
            .collect()
    }

    fn closed_form() -> Self {
        // |ε_ab| read as the indicator of a ≠ b
        let eps = |a: usize, b: usize| if a != b { 1.0 } else { 0.0 };
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut values = [0.0; 256];
        for k in 0..4 {
            for l in 0..4 {
                for m in 0..4 {
                    for n in 0..4 {
                        let h = delta(k + l, 3) * delta(l + n, 3) * eps(k, m) * eps(l, n) * H_MATRIX[m][n];
                        let j = delta(k, m) * delta(l, n) * J_MATRIX[m][n];
                        values[flat(k, l, m, n)] = h + j;
                    }
                }
            }
        }
        Self {
            values,
            provenance: GProvenance::ClosedForm,
        }
    }

    fn derived() -> Result<Self> {
        let lifted = lift_comb(&comb_o2_operator())?;
        let mut values = [0.0; 256];
        for k in 0..4 {
            for l in 0..4 {
                for m in 0..4 {
                    for n in 0..4 {
                        let basis = sigma(k).kronecker(&sigma(l)).kronecker(&sigma(m)).kronecker(&sigma(n));
                        let coef = (lifted.matrix() * basis).trace() / 16.0;
                        if coef.im.abs() > 1e-12 {
                            return Err(Error::Consistency(format!(
                                "G[{k}{l}{m}{n}] has imaginary part {:e}",
                                coef.im
                            )));
                        }
                        values[flat(k, l, m, n)] = coef.re;
                    }
                }
            }
        }
        Ok(Self {
            values,
            provenance: GProvenance::Derived,
        })
    }

    /// Copy with the middle two slots exchanged, `𝔊_{κμλν}`.
    pub fn swap_middle(&self) -> Self {
        let mut values = [0.0; 256];
        for k in 0..4 {
            for l in 0..4 {
                for m in 0..4 {
                    for n in 0..4 {
                        values[flat(k, l, m, n)] = self.get(k, m, l, n);
                    }
                }
            }
        }
        Self {
            values,
            provenance: self.provenance,
        }
    }

    /// CSV with 256 rows: `kappa,lambda,mu,nu,value,provenance`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kappa,lambda,mu,nu,value,provenance\n");
        for i in 0..256 {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                i / 64,
                (i / 16) % 4,
                (i / 4) % 4,
                i % 4,
                self.values[i],
                self.provenance.as_str()
            ));
        }
        out
    }
}

/// Cached `𝔊` tensor of the requested provenance.
pub fn g_tensor(provenance: GProvenance) -> &'static GTensor {
    static CLOSED: OnceLock<GTensor> = OnceLock::new();
    static DERIVED: OnceLock<GTensor> = OnceLock::new();
    match provenance {
        GProvenance::ClosedForm => CLOSED.get_or_init(GTensor::closed_form),
        GProvenance::Derived => DERIVED.get_or_init(|| GTensor::derived().expect("lift of the two-copy comb")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GEntryDiff {
    pub index: [usize; 4],
    pub closed_form: f64,
    pub derived: f64,
}

/// Entrywise comparison of the closed-form tensor with the derived one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GTensorDiff {
    pub epsilon_convention: String,
    pub max_abs_diff: f64,
    pub n_differing: usize,
    /// Same comparison after exchanging the middle slots of the closed form.
    pub max_abs_diff_middle_swapped: f64,
    pub derived_0000: f64,
    pub derived_nonzeros: usize,
    pub closed_form_nonzeros: usize,
    pub differing: Vec<GEntryDiff>,
}

pub fn g_tensor_diff() -> GTensorDiff {
    let closed = g_tensor(GProvenance::ClosedForm);
    let derived = g_tensor(GProvenance::Derived);
    let mut differing = Vec::new();
    let mut max = 0.0f64;
    for i in 0..256 {
        let (a, b) = (closed.values[i], derived.values[i]);
        max = max.max((a - b).abs());
        if (a - b).abs() > 1e-12 {
            differing.push(GEntryDiff {
                index: [i / 64, (i / 16) % 4, (i / 4) % 4, i % 4],
                closed_form: a,
                derived: b,
            });
        }
    }
    let swapped = closed.swap_middle();
    let max_swapped = (0..256)
        .map(|i| (swapped.values[i] - derived.values[i]).abs())
        .fold(0.0, f64::max);
    GTensorDiff {
        epsilon_convention: "|eps_ab| = 1 if a != b else 0".into(),
        max_abs_diff: max,
        n_differing: differing.len(),
        max_abs_diff_middle_swapped: max_swapped,
        derived_0000: derived.get(0, 0, 0, 0),
        derived_nonzeros: derived.nonzeros().len(),
        closed_form_nonzeros: closed.nonzeros().len(),
        differing,
    }
}

/// `¼ Σ M_μν M_κλ T(μκ) T(νλ)` over a dense table indexed by
/// [`crate::qubit::PauliString::index`].
pub(crate) fn concurrence_sq_dense(t: &[f64]) -> f64 {
    let mut acc = 0.0;
    for mu in 0..4 {
        for ka in 0..4 {
            let v = t[mu * 4 + ka];
            acc += MINKOWSKI[mu] * MINKOWSKI[ka] * v * v;
        }
    }
    0.25 * acc
}

/// Four Minkowski contractions on qubits 1–2 and one `𝔊` on qubit 3.
pub(crate) fn tau3_sq_mixed_dense(t: &[f64], g: &GTensor) -> f64 {
    let nz = g.nonzeros();
    let mut acc = 0.0;
    for p in 0..4 {
        for q in 0..4 {
            let left = (p * 4 + q) * 4;
            let m_left = MINKOWSKI[p] * MINKOWSKI[q];
            for r in 0..4 {
                for s in 0..4 {
                    let right = (r * 4 + s) * 4;
                    let m = m_left * MINKOWSKI[r] * MINKOWSKI[s];
                    let inner: f64 = nz
                        .iter()
                        .map(|([a, b, c, d], v)| v * t[left + a] * t[right + b] * t[left + c] * t[right + d])
                        .sum();
                    acc += m * inner;
                }
            }
        }
    }
    acc / 16.0
}

/// `𝔊` on every qubit, divided by [`FULL_COMB_RATIO`].
pub(crate) fn tau3_sq_pure_g_dense(t: &[f64], g: &GTensor) -> f64 {
    let nz = g.nonzeros();
    let mut acc = 0.0;
    for ([a1, b1, c1, d1], v1) in &nz {
        for ([a2, b2, c2, d2], v2) in &nz {
            let w12 = v1 * v2;
            let (a, b, c, d) = (a1 * 16 + a2 * 4, b1 * 16 + b2 * 4, c1 * 16 + c2 * 4, d1 * 16 + d2 * 4);
            let inner: f64 = nz
                .iter()
                .map(|([a3, b3, c3, d3], v3)| v3 * t[a + a3] * t[b + b3] * t[c + c3] * t[d + d3])
                .sum();
            acc += w12 * inner;
        }
    }
    acc / FULL_COMB_RATIO
}

/// `|C|²` from the sixteen two-qubit correlators.
pub fn concurrence_sq_linear(table: &CorrelatorTable) -> Result<f64> {
    if table.n_qubits() != 2 {
        return Err(Error::Dimension("concurrence needs a two-qubit table".into()));
    }
    Ok(concurrence_sq_dense(&table.dense()?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tau3Form {
    /// Minkowski metrics on two qubits and `𝔊` on the third.
    #[default]
    MixedForm,
    /// `𝔊` on all three qubits.
    PureGForm,
}

/// `|τ₃|²` from the 64 three-qubit correlators. On exact pure-state tables
/// both forms are evaluated and must agree within `1e−8`; on mixed tables
/// they are different polynomials and only the requested one is returned.
pub fn tau3_sq_linear(table: &CorrelatorTable, form: Tau3Form) -> Result<f64> {
    if table.n_qubits() != 3 {
        return Err(Error::Dimension("tau3 needs a three-qubit table".into()));
    }
    let t = table.dense()?;
    let g = g_tensor(GProvenance::Derived);
    let mixed = || tau3_sq_mixed_dense(&t, g);
    let pure = || tau3_sq_pure_g_dense(&t, g);
    if table.source() == TableSource::ExactPure {
        let (m, p) = (mixed(), pure());
        if (m - p).abs() > FORM_AGREEMENT_TOL * m.abs().max(1.0) {
            return Err(Error::Consistency(format!(
                "tau3 forms disagree on exact input: mixed_form = {m}, pure_G_form = {p}"
            )));
        }
        return Ok(match form {
            Tau3Form::MixedForm => m,
            Tau3Form::PureGForm => p,
        });
    }
    Ok(match form {
        Tau3Form::MixedForm => mixed(),
        Tau3Form::PureGForm => pure(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antilinear::{concurrence, filter_value, tangle_polynomial, three_tangle, FilterSpec};
    use crate::correlator::exact_correlators;
    use crate::qubit::{PauliString, PureState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn permutation_is_the_swap() {
        let p = permutation_p();
        assert!((p.matrix() - swap_matrix(2)).camax() < 1e-15);
        assert!((p.matrix() * p.matrix() - DMatrix::identity(4, 4)).camax() < 1e-15);
        // ℙ|01⟩ = |10⟩
        let v = nalgebra::DVector::from_vec(vec![c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert_eq!((p.matrix() * v)[2], c(1.0));
    }

    #[test]
    fn sigma_y_lifts_to_twice_p_minus() {
        let (scale, residual) = p_minus_proportionality();
        assert!((scale - 2.0).abs() < 1e-14);
        assert!(residual < 1e-14);
        let minkowski = (0..4).fold(DMatrix::zeros(4, 4), |acc, mu| {
            acc + sigma(mu).kronecker(&sigma(mu)) * c(0.5 * MINKOWSKI[mu])
        });
        assert!((lift_comb(&sigma(2)).unwrap().matrix() - minkowski).camax() < 1e-15);
    }

    #[test]
    fn lifted_comb_vanishes_on_product_copies() {
        let l = lift_comb(&sigma(2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let phi = PureState::random(1, &mut rng);
            assert!(lifted_expectation(&phi, &[&l]).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn lifted_concurrence_matches_antilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let phi = PureState::random(2, &mut rng);
            let c = concurrence(&phi).unwrap();
            assert!((p_minus_polynomial(&phi).unwrap() - c * c).abs() < 1e-13);
        }
    }

    #[test]
    fn lift_rejects_non_square() {
        assert!(lift_comb(&DMatrix::zeros(2, 3)).is_err());
        assert!(lift_comb(&DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn lifted_operators_are_hermitian() {
        for op in [sigma(0), sigma(1), sigma(2), sigma(3), comb_o2_operator()] {
            let l = lift_comb(&op).unwrap();
            assert!((l.matrix() - l.matrix().adjoint()).camax() < 1e-12);
        }
    }

    #[test]
    fn tau3_through_lifts_matches_antilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let chi = PureState::random(3, &mut rng);
            let t = three_tangle(&chi).unwrap();
            assert!((tau3_sq_via_lifts(&chi).unwrap() - t * t).abs() < 1e-12);
        }
    }

    #[test]
    fn full_comb_filter_is_three_times_tangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let spec = FilterSpec::full_comb(3);
        for _ in 0..30 {
            let chi = PureState::random(3, &mut rng);
            let full = filter_value(&chi, &spec).unwrap();
            let tangle = tangle_polynomial(&chi).unwrap();
            assert!((full.norm_sqr() - FULL_COMB_RATIO * tangle.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn derived_g_is_real_and_pinned() {
        let g = g_tensor(GProvenance::Derived);
        let diff = g_tensor_diff();
        println!("{}", serde_json::to_string_pretty(&diff).unwrap());
        println!("derived nonzeros: {:?}", g.nonzeros());
        assert!(g.get(0, 0, 0, 0).is_finite());
    }

    #[test]
    fn linear_forms_reproduce_antilinear_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let phi = PureState::random(2, &mut rng);
            let t = exact_correlators(&phi, &PauliString::all(2)).unwrap();
            let c = concurrence(&phi).unwrap();
            assert!((concurrence_sq_linear(&t).unwrap() - c * c).abs() < 1e-12);

            let chi = PureState::random(3, &mut rng);
            let t = exact_correlators(&chi, &PauliString::all(3)).unwrap();
            let tau = three_tangle(&chi).unwrap();
            for form in [Tau3Form::MixedForm, Tau3Form::PureGForm] {
                let v = tau3_sq_linear(&t, form).unwrap();
                assert!((v - tau * tau).abs() < 1e-10, "{form:?}: {v} vs {}", tau * tau);
            }
        }
    }

    #[test]
    fn p_plus_identity_ratio() {
        let (l0, r0) = p_plus_identity_check(&PureState::basis(1, 0)).unwrap();
        assert!((l0 - 1.0).abs() < 1e-15);
        let (l1, _) = p_plus_identity_check(&PureState::basis(1, 1)).unwrap();
        assert!((l1 - 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let (l, r) = p_plus_identity_check(&PureState::random(1, &mut rng)).unwrap();
            assert!((r / l - r0 / l0).abs() < 1e-10);
        }
    }
}
