use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ALPHABET: [char; 4] = ['0', 'X', 'Y', 'Z'];

/// Single-qubit Pauli matrix σ_μ, μ ∈ {0, 1, 2, 3} with σ₀ the identity.
pub fn sigma(mu: usize) -> DMatrix<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let m = match mu {
        0 => [l, o, o, l],
        1 => [o, l, l, o],
        2 => [o, -i, i, o],
        3 => [l, o, o, -l],
        _ => panic!("pauli index {mu} out of range"),
    };
    DMatrix::from_row_slice(2, 2, &m)
}

/// A tensor product of single-qubit Pauli matrices, qubit 1 first.
///
/// The derived ordering is lexicographic in the indices, which is the same as
/// ordering by [`PauliString::index`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    indices: Vec<u8>,
}

impl PauliString {
    pub fn new(indices: Vec<u8>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Dimension("empty Pauli string".into()));
        }
        if let Some(bad) = indices.iter().find(|&&i| i > 3) {
            return Err(Error::Parameter(format!("Pauli index {bad} not in 0..=3")));
        }
        Ok(Self { indices })
    }

    pub fn identity(n: usize) -> Self {
        Self { indices: vec![0; n] }
    }

    /// Single σ_μ on `qubit` (0-based), identity elsewhere.
    pub fn single(n: usize, qubit: usize, mu: u8) -> Self {
        let mut indices = vec![0; n];
        indices[qubit] = mu;
        Self { indices }
    }

    /// All 4^n strings, ordered by [`PauliString::index`].
    pub fn all(n: usize) -> Vec<Self> {
        (0..4usize.pow(n as u32)).map(|k| Self::from_index(n, k)).collect()
    }

    /// Inverse of [`PauliString::index`].
    pub fn from_index(n: usize, mut k: usize) -> Self {
        let mut indices = vec![0u8; n];
        for slot in indices.iter_mut().rev() {
            *slot = (k % 4) as u8;
            k /= 4;
        }
        Self { indices }
    }

    /// Base-4 number with qubit 1 as the most significant digit.
    pub fn index(&self) -> usize {
        self.indices.iter().fold(0, |acc, &i| acc * 4 + i as usize)
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    pub fn n_qubits(&self) -> usize {
        self.indices.len()
    }

    pub fn is_identity(&self) -> bool {
        self.indices.iter().all(|&i| i == 0)
    }

    /// Bit-flip mask, phase mask and number of σ_y factors. Acting on a basis
    /// state, `P|k⟩ = i^{n_y} (−1)^{popcount(k & zmask)} |k ⊕ xmask⟩`.
    pub(crate) fn masks(&self) -> (usize, usize, u32) {
        let n = self.indices.len();
        let mut x = 0;
        let mut z = 0;
        let mut ny = 0;
        for (j, &mu) in self.indices.iter().enumerate() {
            let bit = 1 << (n - 1 - j);
            match mu {
                1 => x |= bit,
                2 => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
                3 => z |= bit,
                _ => {}
            }
        }
        (x, z, ny)
    }

    /// `P|k⟩ = phase · |target⟩`.
    #[inline]
    pub(crate) fn act(masks: (usize, usize, u32), k: usize) -> (usize, Complex64) {
        let (x, z, ny) = masks;
        let sign = if (k & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let phase = match ny % 4 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        };
        (k ^ x, phase)
    }

    /// Applies the string to a vector of length 2^n.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let masks = self.masks();
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (k, &a) in v.iter().enumerate() {
            let (t, ph) = Self::act(masks, k);
            out[t] += ph * a;
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &i in &self.indices {
            write!(f, "{}", ALPHABET[i as usize])?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses the `0XYZ` alphabet; `I` and digits `1..3` are also accepted.
    fn from_str(s: &str) -> Result<Self> {
        let indices = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' | 'I' | 'i' => Ok(0),
                'X' | 'x' | '1' => Ok(1),
                'Y' | 'y' | '2' => Ok(2),
                'Z' | 'z' | '3' => Ok(3),
                other => Err(Error::Parameter(format!("bad Pauli symbol {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(indices)
    }
}

/// Dense 2^n × 2^n matrix of the string, built as a Kronecker chain with
/// qubit 1 leftmost.
pub fn pauli_operator(s: &PauliString) -> DMatrix<Complex64> {
    s.indices
        .iter()
        .map(|&mu| sigma(mu as usize))
        .reduce(|acc, m| acc.kronecker(&m))
        .expect("pauli string is non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_string_is_identity_matrix() {
        let p = pauli_operator(&PauliString::new(vec![0]).unwrap());
        assert_eq!(p, DMatrix::identity(2, 2));
    }

    #[test]
    fn yy_is_antidiagonal() {
        let p = pauli_operator(&"YY".parse().unwrap());
        let expect = [c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)];
        for r in 0..4 {
            for col in 0..4 {
                let want = if r + col == 3 { expect[r] } else { c(0.0, 0.0) };
                assert_eq!(p[(r, col)], want, "entry ({r},{col})");
            }
        }
    }

    #[test]
    fn three_qubit_string_is_traceless_hermitian() {
        let p = pauli_operator(&"0YY".parse().unwrap());
        assert_eq!(p.nrows(), 8);
        assert!(p.trace().norm() < 1e-15);
        assert_eq!(p.adjoint(), p);
    }

    #[test]
    fn fast_apply_matches_dense_operator() {
        let v: Vec<Complex64> = (0..8).map(|k| c(k as f64 * 0.3 - 1.0, 0.1 * k as f64)).collect();
        for s in PauliString::all(3) {
            let dense = pauli_operator(&s) * nalgebra::DVector::from_vec(v.clone());
            let fast = s.apply(&v);
            for k in 0..8 {
                assert!((dense[k] - fast[k]).norm() < 1e-14, "{s}");
            }
        }
    }

    #[test]
    fn index_roundtrip_and_display() {
        for s in PauliString::all(3) {
            assert_eq!(PauliString::from_index(3, s.index()), s);
            assert_eq!(s.to_string().parse::<PauliString>().unwrap(), s);
        }
        assert_eq!("ZZ0".parse::<PauliString>().unwrap().indices(), &[3, 3, 0]);
        assert!("ZQ".parse::<PauliString>().is_err());
        assert!(PauliString::new(vec![4]).is_err());
    }

    #[test]
    fn every_string_squares_to_identity() {
        for s in PauliString::all(2) {
            let p = pauli_operator(&s);
            assert!((&p * &p - DMatrix::identity(4, 4)).norm() < 1e-14);
        }
    }
}
