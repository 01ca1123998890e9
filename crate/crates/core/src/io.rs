//! JSON file formats for states, density matrices and filter specs.
//!
//! Complex numbers are `[re, im]` pairs and the basis order is the crate's
//! fixed one (qubit 1 most significant).

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::antilinear::FilterSpec;
use crate::error::{Error, Result};
use crate::qubit::{make_state, DensityMatrix, PureState};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StateFile {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
    #[serde(default)]
    normalized: bool,
}

fn read(path: &Path) -> Result<(String, String)> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::parse(&name, "<file>", e))?;
    Ok((name, text))
}

fn json_error(name: &str, e: serde_json::Error) -> Error {
    let msg = e.to_string();
    let field = msg
        .split('`')
        .nth(1)
        .filter(|_| msg.contains("field"))
        .unwrap_or("<document>")
        .to_string();
    Error::parse(name, field, msg)
}

/// Parses a state document. `normalized: true` requires unit norm within
/// `1e−12`; otherwise the amplitudes are kept as given.
pub fn parse_state(text: &str, name: &str) -> Result<PureState> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| json_error(name, e))?;
    if file.n_qubits == 0 {
        return Err(Error::parse(name, "n_qubits", "must be positive"));
    }
    let dim = 1usize.checked_shl(file.n_qubits as u32).unwrap_or(0);
    if file.amplitudes.len() != dim {
        return Err(Error::parse(
            name,
            "amplitudes",
            format!("expected {dim} entries for {} qubits, got {}", file.n_qubits, file.amplitudes.len()),
        ));
    }
    let amps: Vec<Complex64> = file.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if file.normalized && (norm - 1.0).abs() > 1e-12 {
        return Err(Error::parse(name, "normalized", format!("flag set but the norm squared is {norm}")));
    }
    make_state(file.n_qubits, amps, false).map_err(|e| Error::parse(name, "amplitudes", e))
}

pub fn read_state(path: &Path) -> Result<PureState> {
    let (name, text) = read(path)?;
    parse_state(&text, &name)
}

pub fn state_to_json(psi: &PureState) -> String {
    let file = StateFile {
        n_qubits: psi.n_qubits(),
        amplitudes: psi.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        normalized: psi.is_normalized(),
    };
    serde_json::to_string_pretty(&file).expect("state serializes")
}

fn complex(v: &Value, name: &str, field: &str) -> Result<Complex64> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::parse(name, field, "expected a [re, im] pair"))?;
    let num = |x: &Value| x.as_f64().ok_or_else(|| Error::parse(name, field, "expected a number"));
    Ok(Complex64::new(num(&pair[0])?, num(&pair[1])?))
}

/// Parses `{"n_qubits": n, "matrix": …}` where the matrix is row-major,
/// either as `d` rows of `d` pairs or as one flat list of `d²` pairs.
pub fn parse_rho(text: &str, name: &str) -> Result<DensityMatrix> {
    let doc: Value = serde_json::from_str(text).map_err(|e| json_error(name, e))?;
    let n = doc
        .get("n_qubits")
        .and_then(Value::as_u64)
        .filter(|&n| n > 0 && n <= 12)
        .ok_or_else(|| Error::parse(name, "n_qubits", "missing or not a positive integer"))? as usize;
    let d = 1usize << n;
    let rows = doc
        .get("matrix")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(name, "matrix", "missing or not an array"))?;
    let nested = rows.first().and_then(Value::as_array).is_some_and(|r| r.first().is_some_and(Value::is_array));
    let mut entries = Vec::with_capacity(d * d);
    if nested {
        if rows.len() != d {
            return Err(Error::parse(name, "matrix", format!("expected {d} rows, got {}", rows.len())));
        }
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .filter(|r| r.len() == d)
                .ok_or_else(|| Error::parse(name, format!("matrix[{i}]"), format!("expected {d} entries")))?;
            for (j, v) in row.iter().enumerate() {
                entries.push(complex(v, name, &format!("matrix[{i}][{j}]"))?);
            }
        }
    } else {
        if rows.len() != d * d {
            return Err(Error::parse(name, "matrix", format!("expected {} entries, got {}", d * d, rows.len())));
        }
        for (k, v) in rows.iter().enumerate() {
            entries.push(complex(v, name, &format!("matrix[{k}]"))?);
        }
    }
    let m = DMatrix::from_row_slice(d, d, &entries);
    DensityMatrix::new(n, m).map_err(|e| Error::parse(name, "matrix", e))
}

pub fn read_rho(path: &Path) -> Result<DensityMatrix> {
    let (name, text) = read(path)?;
    parse_rho(&text, &name)
}

/// Nested row-major form accepted by [`parse_rho`].
pub fn rho_to_json(rho: &DensityMatrix) -> String {
    let d = rho.dim();
    let rows: Vec<Vec<[f64; 2]>> = (0..d)
        .map(|i| (0..d).map(|j| [rho.matrix()[(i, j)].re, rho.matrix()[(i, j)].im]).collect())
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({"n_qubits": rho.n_qubits(), "matrix": rows}))
        .expect("matrix serializes")
}

pub fn parse_filter(text: &str, name: &str) -> Result<FilterSpec> {
    let spec: FilterSpec = serde_json::from_str(text).map_err(|e| json_error(name, e))?;
    spec.validate().map_err(|e| Error::parse(name, "slots", e))?;
    Ok(spec)
}

pub fn read_filter(path: &Path) -> Result<FilterSpec> {
    let (name, text) = read(path)?;
    parse_filter(&text, &name)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
