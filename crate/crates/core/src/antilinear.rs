//! Combs and antilinear filters.
//!
//! Complex conjugation acts component-wise in the fixed computational basis,
//! so the antilinear expectation value of a Pauli string is
//! `⟨ψ|P|ψ*⟩ = Σ_k ψ̄_{t(k)} · phase(k) · ψ̄_k` with `P|k⟩ = phase(k)|t(k)⟩`.
//! Every quantity here is a holomorphic polynomial in the conjugated
//! amplitudes, which is what makes it invariant under local SL(2,ℂ) maps.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::{PauliString, PureState};

/// Diagonal of the comb metric `g = diag(1, −1, 0, −1)`.
pub const COMB_METRIC: [f64; 4] = [1.0, -1.0, 0.0, -1.0];

const NORM_TOL: f64 = 1e-10;
const MAX_FILTER_LABELS: usize = 10;

/// `⟨ψ|P|ψ*⟩`, no normalization required.
pub fn antilinear_expectation(psi: &PureState, s: &PauliString) -> Result<Complex64> {
    if s.n_qubits() != psi.n_qubits() {
        return Err(Error::Dimension(format!(
            "string {s} has {} qubits, state has {}",
            s.n_qubits(),
            psi.n_qubits()
        )));
    }
    Ok(antilinear_unchecked(psi.amplitudes(), s))
}

pub(crate) fn antilinear_unchecked(amps: &[Complex64], s: &PauliString) -> Complex64 {
    let masks = s.masks();
    amps.iter()
        .enumerate()
        .map(|(k, a)| {
            let (t, ph) = PauliString::act(masks, k);
            amps[t].conj() * ph * a.conj()
        })
        .sum()
}

fn require_qubits(psi: &PureState, n: usize) -> Result<()> {
    if psi.n_qubits() != n {
        return Err(Error::Dimension(format!("expected {n} qubit(s), got {}", psi.n_qubits())));
    }
    Ok(())
}

fn require_normalized(psi: &PureState) -> Result<()> {
    if (psi.norm_sqr() - 1.0).abs() > NORM_TOL {
        return Err(Error::Parameter(format!(
            "state must be normalized (norm² = {})",
            psi.norm_sqr()
        )));
    }
    Ok(())
}

/// `⟨φ|σ_y|φ*⟩` for one qubit. Vanishes identically.
pub fn comb_value_o1(phi: &PureState) -> Result<Complex64> {
    require_qubits(phi, 1)?;
    antilinear_expectation(phi, &PauliString::single(1, 0, 2))
}

/// `Σ_μν g_μν ⟨φ|σ_μ|φ*⟩⟨φ|σ_ν|φ*⟩` for one qubit. Vanishes identically.
pub fn comb_value_o2(phi: &PureState) -> Result<Complex64> {
    require_qubits(phi, 1)?;
    Ok((0..4u8)
        .map(|mu| {
            let e = antilinear_unchecked(phi.amplitudes(), &PauliString::single(1, 0, mu));
            e * e * COMB_METRIC[mu as usize]
        })
        .sum())
}

/// `⟨φ|σ_y⊗σ_y|φ*⟩` on an arbitrary (unnormalized) two-qubit vector.
pub fn concurrence_polynomial(phi: &PureState) -> Result<Complex64> {
    require_qubits(phi, 2)?;
    antilinear_expectation(phi, &PauliString::new(vec![2, 2])?)
}

/// `C(φ) = |⟨φ|σ_y⊗σ_y|φ*⟩|`.
pub fn concurrence(phi: &PureState) -> Result<f64> {
    require_qubits(phi, 2)?;
    require_normalized(phi)?;
    Ok(concurrence_polynomial(phi)?.norm())
}

/// `Σ_μ g_μμ ⟨χ|σ_μ⊗σ_y⊗σ_y|χ*⟩²`, the degree-4 polynomial whose modulus is
/// the 3-tangle. No normalization required.
pub fn tangle_polynomial(chi: &PureState) -> Result<Complex64> {
    require_qubits(chi, 3)?;
    Ok(tangle_polynomial_raw(chi.amplitudes()))
}

/// Fast path over the three non-zero metric components, used by the roof
/// optimizer on 8-element slices.
#[inline]
pub(crate) fn tangle_polynomial_raw(a: &[Complex64]) -> Complex64 {
    // σ_μ⊗σ_y⊗σ_y maps |b₁b₂b₃⟩ to ±|b₁' b̄₂ b̄₃⟩; with ⟨χ|P|χ*⟩ = Σ_k ā_{t(k)} ph(k) ā_k
    // and σ_y⊗σ_y phases (−1)^{b₂+b₃}·(−1): sign s(k) = −(−1)^{b₂⊕b₃}.
    let mut e0 = Complex64::new(0.0, 0.0);
    let mut e1 = Complex64::new(0.0, 0.0);
    let mut e3 = Complex64::new(0.0, 0.0);
    for k in 0..8 {
        let b23 = ((k >> 1) ^ k) & 1;
        let s = if b23 == 0 { -1.0 } else { 1.0 };
        let ck = a[k].conj();
        let flip23 = k ^ 0b011;
        e0 += a[flip23].conj() * ck * s;
        e1 += a[flip23 ^ 0b100].conj() * ck * s;
        let z = if k & 0b100 == 0 { s } else { -s };
        e3 += a[flip23].conj() * ck * z;
    }
    e0 * e0 - e1 * e1 - e3 * e3
}

/// `τ₃(χ) = |Σ_μ g_μμ ⟨χ|σ_μσ_yσ_y|χ*⟩²|` for a normalized three-qubit state.
pub fn three_tangle(chi: &PureState) -> Result<f64> {
    require_qubits(chi, 3)?;
    require_normalized(chi)?;
    Ok(tangle_polynomial_raw(chi.amplitudes()).norm())
}

/// `|⟨ψ|σ_y^{⊗n}|ψ*⟩|²` for even `n`.
pub fn n_tangle(psi: &PureState) -> Result<f64> {
    let n = psi.n_qubits();
    if n % 2 != 0 {
        return Err(Error::Parameter(format!("n-tangle needs an even qubit count, got {n}")));
    }
    require_normalized(psi)?;
    Ok(antilinear_expectation(psi, &PauliString::new(vec![2; n])?)?.norm_sqr())
}

/// One Pauli slot of a filter: a fixed matrix or a named index that is summed
/// over through a [`COMB_METRIC`] contraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Slot {
    Fixed(u8),
    Index(String),
}

/// Multi-copy antilinear filter: `slots[c][q]` is the Pauli slot for qubit
/// `q` of copy `c`, and each contraction pairs a lower with an upper index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub n_qubits: usize,
    pub n_copies: usize,
    pub slots: Vec<Vec<Slot>>,
    pub contractions: Vec<(String, String)>,
}

impl FilterSpec {
    /// `⟨χ|σ_μσ_yσ_y|χ*⟩ ⟨χ|σ^μσ_yσ_y|χ*⟩`.
    pub fn three_tangle() -> Self {
        Self {
            n_qubits: 3,
            n_copies: 2,
            slots: vec![
                vec![Slot::Index("mu".into()), Slot::Fixed(2), Slot::Fixed(2)],
                vec![Slot::Index("nu".into()), Slot::Fixed(2), Slot::Fixed(2)],
            ],
            contractions: vec![("mu".into(), "nu".into())],
        }
    }

    /// `⟨φ|σ_yσ_y|φ*⟩`.
    pub fn concurrence() -> Self {
        Self {
            n_qubits: 2,
            n_copies: 1,
            slots: vec![vec![Slot::Fixed(2), Slot::Fixed(2)]],
            contractions: vec![],
        }
    }

    /// σ_μ • σ^μ on every qubit across two copies.
    pub fn full_comb(n_qubits: usize) -> Self {
        let lower = (0..n_qubits).map(|q| Slot::Index(format!("a{q}"))).collect();
        let upper = (0..n_qubits).map(|q| Slot::Index(format!("b{q}"))).collect();
        Self {
            n_qubits,
            n_copies: 2,
            slots: vec![lower, upper],
            contractions: (0..n_qubits).map(|q| (format!("a{q}"), format!("b{q}"))).collect(),
        }
    }

    /// Checks slot shapes and that every label sits in exactly one slot and
    /// one contraction pair. Returns the labels in first-appearance order.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.n_copies == 0 || self.n_qubits == 0 {
            return Err(Error::Spec("n_copies and n_qubits must be positive".into()));
        }
        if self.slots.len() != self.n_copies {
            return Err(Error::Spec(format!("{} slot rows for {} copies", self.slots.len(), self.n_copies)));
        }
        let mut labels = Vec::new();
        let mut seen = BTreeSet::new();
        for (c, row) in self.slots.iter().enumerate() {
            if row.len() != self.n_qubits {
                return Err(Error::Spec(format!("copy {c} has {} slots, expected {}", row.len(), self.n_qubits)));
            }
            for slot in row {
                match slot {
                    Slot::Fixed(mu) if *mu > 3 => {
                        return Err(Error::Spec(format!("Pauli index {mu} out of range")))
                    }
                    Slot::Fixed(_) => {}
                    Slot::Index(l) => {
                        if !seen.insert(l.clone()) {
                            return Err(Error::Spec(format!("index {l:?} appears in more than one slot")));
                        }
                        labels.push(l.clone());
                    }
                }
            }
        }
        let mut paired = BTreeSet::new();
        for (a, b) in &self.contractions {
            for l in [a, b] {
                if !seen.contains(l) {
                    return Err(Error::Spec(format!("contraction references unknown index {l:?}")));
                }
                if !paired.insert(l.clone()) {
                    return Err(Error::Spec(format!("index {l:?} appears in more than one contraction")));
                }
            }
        }
        if let Some(free) = labels.iter().find(|l| !paired.contains(*l)) {
            return Err(Error::Spec(format!("index {free:?} is not contracted")));
        }
        if labels.len() > MAX_FILTER_LABELS {
            return Err(Error::Spec(format!("{} indices exceed the limit of {MAX_FILTER_LABELS}", labels.len())));
        }
        Ok(labels)
    }
}

/// Multi-copy antilinear expectation value by brute-force summation over all
/// index assignments, each contraction weighted by `g_μν`.
pub fn filter_value(psi: &PureState, spec: &FilterSpec) -> Result<Complex64> {
    let labels = spec.validate()?;
    if psi.n_qubits() != spec.n_qubits {
        return Err(Error::Dimension(format!(
            "filter is for {} qubits, state has {}",
            spec.n_qubits,
            psi.n_qubits()
        )));
    }
    let n = spec.n_qubits;
    let position: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let pairs: Vec<(usize, usize)> = spec
        .contractions
        .iter()
        .map(|(a, b)| (position[a.as_str()], position[b.as_str()]))
        .collect();
    let table: Vec<Complex64> = PauliString::all(n)
        .iter()
        .map(|s| antilinear_unchecked(psi.amplitudes(), s))
        .collect();

    let mut assignment = vec![0usize; labels.len()];
    let mut total = Complex64::new(0.0, 0.0);
    for code in 0..4usize.pow(labels.len() as u32) {
        let mut rest = code;
        for a in assignment.iter_mut() {
            *a = rest % 4;
            rest /= 4;
        }
        let weight: f64 = pairs
            .iter()
            .map(|&(a, b)| {
                if assignment[a] == assignment[b] {
                    COMB_METRIC[assignment[a]]
                } else {
                    0.0
                }
            })
            .product();
        if weight == 0.0 {
            continue;
        }
        let product: Complex64 = spec
            .slots
            .iter()
            .map(|row| {
                let idx = row.iter().fold(0, |acc, slot| {
                    let mu = match slot {
                        Slot::Fixed(mu) => *mu as usize,
                        Slot::Index(l) => assignment[position[l.as_str()]],
                    };
                    acc * 4 + mu
                });
                table[idx]
            })
            .product();
        total += product * weight;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Cayley hyperdeterminant; `τ₃ = 4|Det|`.
    fn hyperdet(a: &[Complex64]) -> Complex64 {
        let d1 = a[0] * a[0] * a[7] * a[7] + a[1] * a[1] * a[6] * a[6] + a[2] * a[2] * a[5] * a[5]
            + a[4] * a[4] * a[3] * a[3];
        let d2 = a[0] * a[7] * a[3] * a[4]
            + a[0] * a[7] * a[5] * a[2]
            + a[0] * a[7] * a[6] * a[1]
            + a[3] * a[4] * a[5] * a[2]
            + a[3] * a[4] * a[6] * a[1]
            + a[5] * a[2] * a[6] * a[1];
        let d3 = a[0] * a[6] * a[5] * a[3] + a[7] * a[1] * a[2] * a[4];
        d1 - 2.0 * d2 + 4.0 * d3
    }

    #[test]
    fn combs_vanish_on_examples() {
        let plus = PureState::from_real(1, &[1.0, 1.0]).unwrap();
        for phi in [PureState::basis(1, 0), PureState::basis(1, 1), plus] {
            assert!(comb_value_o1(&phi).unwrap().norm() < 1e-15);
            assert!(comb_value_o2(&phi).unwrap().norm() < 1e-15);
        }
        assert!(comb_value_o1(&PureState::bell()).is_err());
    }

    #[test]
    fn concurrence_examples() {
        assert!(concurrence(&PureState::basis(2, 0)).unwrap() < 1e-15);
        assert!((concurrence(&PureState::bell()).unwrap() - 1.0).abs() < 1e-14);
        let s = PureState::from_real(2, &[0.8f64.sqrt(), 0.0, 0.0, 0.2f64.sqrt()]).unwrap();
        assert!((concurrence(&s).unwrap() - 0.8).abs() < 1e-14);
        assert!(concurrence(&PureState::ghz(3)).is_err());
    }

    #[test]
    fn three_tangle_examples() {
        assert!((three_tangle(&PureState::ghz(3)).unwrap() - 1.0).abs() < 1e-14);
        assert!(three_tangle(&PureState::w(3)).unwrap() < 1e-15);
        // |0⟩ ⊗ Bell: amplitudes on |000⟩ and |011⟩
        let bisep = PureState::from_real(3, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(three_tangle(&bisep).unwrap() < 1e-15);
        assert!(three_tangle(&PureState::bell()).is_err());
    }

    #[test]
    fn tangle_matches_hyperdeterminant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let psi = PureState::random(3, &mut rng);
            let conj: Vec<Complex64> = psi.amplitudes().iter().map(|a| a.conj()).collect();
            let want = 4.0 * hyperdet(&conj);
            let got = tangle_polynomial(&psi).unwrap();
            // Same polynomial up to sign.
            assert!((got + want).norm() < 1e-13 || (got - want).norm() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn n_tangle_examples() {
        assert!((n_tangle(&PureState::bell()).unwrap() - 1.0).abs() < 1e-14);
        assert!((n_tangle(&PureState::ghz(4)).unwrap() - 1.0).abs() < 1e-14);
        assert!(n_tangle(&PureState::basis(4, 0)).unwrap() < 1e-15);
        assert!(matches!(n_tangle(&PureState::ghz(3)), Err(Error::Parameter(_))));
    }

    #[test]
    fn filter_reproduces_named_invariants() {
        let spec = FilterSpec::three_tangle();
        assert!((filter_value(&PureState::ghz(3), &spec).unwrap().norm() - 1.0).abs() < 1e-14);
        assert!(filter_value(&PureState::w(3), &spec).unwrap().norm() < 1e-12);
        let c = filter_value(&PureState::bell(), &FilterSpec::concurrence()).unwrap();
        assert!((c.norm() - 1.0).abs() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let psi = PureState::random(3, &mut rng);
            let f = filter_value(&psi, &spec).unwrap();
            assert!((f - tangle_polynomial(&psi).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn malformed_filters_are_rejected() {
        let mut spec = FilterSpec::three_tangle();
        spec.contractions.clear();
        assert!(matches!(spec.validate(), Err(Error::Spec(_))));

        let mut spec = FilterSpec::three_tangle();
        spec.slots[1][0] = Slot::Index("mu".into());
        assert!(spec.validate().is_err());

        let mut spec = FilterSpec::three_tangle();
        spec.slots.pop();
        assert!(spec.validate().is_err());

        let mut spec = FilterSpec::three_tangle();
        spec.contractions = vec![("mu".into(), "zz".into())];
        assert!(spec.validate().is_err());

        assert!(filter_value(&PureState::bell(), &FilterSpec::three_tangle()).is_err());
    }

    #[test]
    fn filter_spec_json_shape() {
        let json = serde_json::to_string(&FilterSpec::three_tangle()).unwrap();
        assert_eq!(
            json,
            r#"{"n_qubits":3,"n_copies":2,"slots":[["mu",2,2],["nu",2,2]],"contractions":[["mu","nu"]]}"#
        );
        let back: FilterSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, FilterSpec::three_tangle());
    }
}
