//! Correlator tables: exact evaluation, finite-shot sampling and invariant
//! estimates with first-order error propagation.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lift::{concurrence_sq_dense, g_tensor, tau3_sq_mixed_dense, tau3_sq_pure_g_dense, GProvenance, Tau3Form};
use crate::qubit::{DensityMatrix, Expectation, PauliString, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableSource {
    ExactPure,
    ExactMixed,
    Sampled,
    /// `⟨ψ|P|ψ⟩` of an unnormalized vector; the identity entry is `‖ψ‖²`.
    Unnormalized,
    /// Read from a file with no provenance attached.
    Imported,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub value: f64,
    pub stderr: Option<f64>,
    pub shots: Option<u64>,
}

impl Entry {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            stderr: None,
            shots: None,
        }
    }
}

/// Pauli-string expectation values for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorTable {
    n_qubits: usize,
    entries: BTreeMap<PauliString, Entry>,
    source: TableSource,
}

impl CorrelatorTable {
    pub fn new(n_qubits: usize, source: TableSource) -> Self {
        Self {
            n_qubits,
            entries: BTreeMap::new(),
            source,
        }
    }

    pub fn insert(&mut self, s: PauliString, entry: Entry) -> Result<()> {
        if s.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!("string {s} does not fit a {}-qubit table", self.n_qubits)));
        }
        self.entries.insert(s, entry);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn source(&self) -> TableSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, s: &PauliString) -> Option<&Entry> {
        self.entries.get(s)
    }

    pub fn value(&self, s: &PauliString) -> Option<f64> {
        self.entries.get(s).map(|e| e.value)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Entry)> {
        self.entries.iter()
    }

    /// All `4^n` values indexed by [`PauliString::index`].
    pub fn dense(&self) -> Result<Vec<f64>> {
        let all = PauliString::all(self.n_qubits);
        let missing: Vec<String> = all
            .iter()
            .filter(|s| !self.entries.contains_key(s))
            .map(|s| s.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::IncompleteTable { missing });
        }
        Ok(all.iter().map(|s| self.entries[s].value).collect())
    }

    /// CSV with columns `string,value,stderr,shots`; empty cells for absent
    /// fields. Floats use the shortest representation that parses back to
    /// the same bits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        out.write_record(["string", "value", "stderr", "shots"]).map_err(io)?;
        for (s, e) in &self.entries {
            out.write_record([
                s.to_string(),
                e.value.to_string(),
                e.stderr.map(|x| x.to_string()).unwrap_or_default(),
                e.shots.map(|x| x.to_string()).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Reads the CSV written by [`CorrelatorTable::write_csv`]. `name` is
    /// used in error messages.
    pub fn read_csv<R: Read>(r: R, name: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut entries = BTreeMap::new();
        let mut n_qubits = None;
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::parse(name, format!("row {}", line + 1), e))?;
            let field = |i: usize| rec.get(i).unwrap_or("").trim();
            let s: PauliString = field(0)
                .parse()
                .map_err(|e| Error::parse(name, format!("row {} string", line + 1), e))?;
            match n_qubits {
                None => n_qubits = Some(s.n_qubits()),
                Some(n) if n != s.n_qubits() => {
                    return Err(Error::parse(name, format!("row {} string", line + 1), "inconsistent qubit count"))
                }
                _ => {}
            }
            let value: f64 = field(1)
                .parse()
                .map_err(|e| Error::parse(name, format!("row {} value", line + 1), e))?;
            let stderr = match field(2) {
                "" => None,
                x => Some(x.parse().map_err(|e| Error::parse(name, format!("row {} stderr", line + 1), e))?),
            };
            let shots = match field(3) {
                "" => None,
                x => Some(x.parse().map_err(|e| Error::parse(name, format!("row {} shots", line + 1), e))?),
            };
            entries.insert(s, Entry { value, stderr, shots });
        }
        let n_qubits = n_qubits.ok_or_else(|| Error::parse(name, "string", "table is empty"))?;
        Ok(Self {
            n_qubits,
            entries,
            source: TableSource::Imported,
        })
    }
}

/// Exact expectation values of `strings` for a pure state or density matrix.
pub fn exact_correlators<S: Expectation + ?Sized>(state: &S, strings: &[PauliString]) -> Result<CorrelatorTable> {
    let source = if state.is_pure() {
        TableSource::ExactPure
    } else {
        TableSource::ExactMixed
    };
    let mut table = CorrelatorTable::new(state.n_qubits(), source);
    for s in strings {
        let value = if s.is_identity() && s.n_qubits() == state.n_qubits() {
            1.0
        } else {
            state.expectation(s)?
        };
        table.insert(s.clone(), Entry::exact(value))?;
    }
    Ok(table)
}

/// `⟨ψ|P|ψ⟩` for every string, without normalizing `ψ`.
pub fn bilinear_table(psi: &PureState) -> CorrelatorTable {
    let mut table = CorrelatorTable::new(psi.n_qubits(), TableSource::Unnormalized);
    for s in PauliString::all(psi.n_qubits()) {
        let v = psi.bilinear(&s).re;
        table.entries.insert(s, Entry::exact(v));
    }
    table
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Simulates `shots` projective measurements of the ±1 observable `s` on
/// `ρ`; returns the sample mean and its standard error. Identity factors
/// contribute eigenvalue 1. The random stream is derived from
/// `(seed, s.index())`.
pub fn sample_correlator(rho: &DensityMatrix, s: &PauliString, shots: u64, seed: u64) -> Result<(f64, f64)> {
    if shots < 1 {
        return Err(Error::Parameter("shots must be at least 1".into()));
    }
    if s.is_identity() {
        return Ok((1.0, 0.0));
    }
    let p_plus = ((1.0 + rho.expectation(s)?) / 2.0).clamp(0.0, 1.0);
    let mut rng = stream_rng(seed, s.index() as u64);
    let plus = Binomial::new(shots, p_plus)
        .map_err(|e| Error::Numerical(format!("binomial({shots}, {p_plus}): {e}")))?
        .sample(&mut rng);
    let n = shots as f64;
    let mean = (2.0 * plus as f64 - n) / n;
    let stderr = if shots > 1 {
        ((1.0 - mean * mean).max(0.0) / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok((mean, stderr))
}

/// Samples every string with its own shot budget.
pub fn sample_table(rho: &DensityMatrix, strings: &[PauliString], shots: u64, seed: u64) -> Result<CorrelatorTable> {
    let results: Vec<Result<(f64, f64)>> = strings
        .par_iter()
        .map(|s| sample_correlator(rho, s, shots, seed))
        .collect();
    let mut table = CorrelatorTable::new(rho.n_qubits(), TableSource::Sampled);
    for (s, r) in strings.iter().zip(results) {
        let (value, stderr) = r?;
        table.insert(
            s.clone(),
            Entry {
                value,
                stderr: Some(stderr),
                shots: Some(shots),
            },
        )?;
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantKind {
    /// Squared concurrence of two qubits.
    C2,
    /// Squared 3-tangle of three qubits.
    Tau3Sq,
}

impl InvariantKind {
    pub fn n_qubits(self) -> usize {
        match self {
            InvariantKind::C2 => 2,
            InvariantKind::Tau3Sq => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InvariantKind::C2 => "c2",
            InvariantKind::Tau3Sq => "tau3_sq",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantEstimate {
    pub name: InvariantKind,
    pub value: f64,
    pub stderr: Option<f64>,
    pub shots_per_setting: Option<u64>,
}

fn contraction(which: InvariantKind, form: Tau3Form) -> impl Fn(&[f64]) -> f64 {
    let g = g_tensor(GProvenance::Derived);
    move |t: &[f64]| match (which, form) {
        (InvariantKind::C2, _) => concurrence_sq_dense(t),
        (InvariantKind::Tau3Sq, Tau3Form::MixedForm) => tau3_sq_mixed_dense(t, g),
        (InvariantKind::Tau3Sq, Tau3Form::PureGForm) => tau3_sq_pure_g_dense(t, g),
    }
}

/// [`invariant_from_table_with`] using the mixed form for `τ₃²`.
pub fn invariant_from_table(table: &CorrelatorTable, which: InvariantKind) -> Result<InvariantEstimate> {
    invariant_from_table_with(table, which, Tau3Form::MixedForm)
}

/// Evaluates the linear form of `which`. When entries carry standard errors,
/// they are propagated to first order, treating entries as independent.
pub fn invariant_from_table_with(
    table: &CorrelatorTable,
    which: InvariantKind,
    form: Tau3Form,
) -> Result<InvariantEstimate> {
    if table.n_qubits() != which.n_qubits() {
        return Err(Error::Dimension(format!(
            "{} needs a {}-qubit table, got {}",
            which.as_str(),
            which.n_qubits(),
            table.n_qubits()
        )));
    }
    let t = table.dense()?;
    let value = match which {
        InvariantKind::C2 => crate::lift::concurrence_sq_linear(table)?,
        InvariantKind::Tau3Sq => crate::lift::tau3_sq_linear(table, form)?,
    };
    let errors: Vec<(usize, f64)> = PauliString::all(table.n_qubits())
        .iter()
        .filter_map(|s| table.get(s).and_then(|e| e.stderr).map(|se| (s.index(), se)))
        .filter(|&(_, se)| se > 0.0)
        .collect();
    let stderr = if table.entries.values().any(|e| e.stderr.is_some()) {
        let f = contraction(which, form);
        let h = 1e-6;
        let mut work = t.clone();
        let var: f64 = errors
            .iter()
            .map(|&(i, se)| {
                let x = work[i];
                work[i] = x + h;
                let up = f(&work);
                work[i] = x - h;
                let down = f(&work);
                work[i] = x;
                let grad = (up - down) / (2.0 * h);
                grad * grad * se * se
            })
            .sum();
        Some(var.sqrt())
    } else {
        None
    };
    let shots_per_setting = table.entries.values().filter_map(|e| e.shots).max();
    Ok(InvariantEstimate {
        name: which,
        value,
        stderr,
        shots_per_setting,
    })
}
