//! Upper bounds on the convex roof of `τ₃` by searching over decompositions
//! `Φ = U W`, where the rows of `W` are the eigenvectors of `ρ` weighted by
//! `√λ` and `U` is an `m × r` matrix with orthonormal columns.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antilinear::tangle_polynomial_raw;
use crate::error::{Error, Result};
use crate::qubit::{white_noise_mix, DensityMatrix, PureState};

type C64 = Complex64;

const DIM: usize = 8;
type Row = [C64; DIM];

/// Eigenvalues at or below this are dropped from the weighted eigenbasis.
pub const RANK_TOL: f64 = 1e-12;
/// A bound below this counts as vanished.
pub const VANISH_TOL: f64 = 1e-3;

/// A set of unnormalized vectors `Φᵢ` with `Σ |Φᵢ⟩⟨Φᵢ| = ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    vectors: Vec<Vec<C64>>,
    generator: DMatrix<C64>,
}

impl Decomposition {
    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn generator(&self) -> &DMatrix<C64> {
        &self.generator
    }

    /// `⟨Φᵢ|Φᵢ⟩` for every vector.
    pub fn weights(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| norm_sqr(v)).collect()
    }

    /// The non-zero vectors as normalized states with their weights.
    pub fn states(&self) -> Vec<(f64, PureState)> {
        self.vectors
            .iter()
            .filter(|v| norm_sqr(v) > 0.0)
            .map(|v| {
                let p = norm_sqr(v);
                let amps = v.iter().map(|a| a / p.sqrt()).collect();
                (p, crate::qubit::make_state_unchecked(3, amps, false))
            })
            .collect()
    }

    /// `Σᵢ ⟨Φᵢ|Φᵢ⟩ τ₃(Φᵢ/‖Φᵢ‖)`.
    pub fn average_tangle(&self) -> f64 {
        self.vectors.iter().map(|v| row_value(v)).sum()
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(DIM, DIM);
        for v in &self.vectors {
            for a in 0..DIM {
                for b in 0..DIM {
                    out[(a, b)] += v[a] * v[b].conj();
                }
            }
        }
        out
    }

    /// Frobenius distance between the reconstruction and `ρ`.
    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        (self.reconstruct() - rho.matrix()).norm()
    }

    /// `max |U†U − 1|` over entries.
    pub fn orthonormality_error(&self) -> f64 {
        let u = &self.generator;
        let r = u.ncols();
        (u.adjoint() * u - DMatrix::<C64>::identity(r, r)).camax()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofResult {
    pub upper_bound: f64,
    pub best_decomposition: Decomposition,
    pub restarts_used: usize,
    /// Whether the local search that produced the bound ended on the step
    /// tolerance rather than the sweep cap.
    pub converged: bool,
    /// Average tangle of the plain eigendecomposition.
    pub eigen_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoofOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_sweeps: usize,
    /// Remaining restarts are skipped once a bound below this is found.
    pub stop_below: f64,
    /// Restarts are run in batches of this size; the early stop is checked
    /// between batches so the result does not depend on the thread count.
    pub batch: usize,
    /// The search first minimizes `Σ √(|P(Φᵢ)|² + δ²‖Φᵢ‖⁸)/‖Φᵢ‖²` for
    /// `δ = smoothing_start, smoothing_start/10, …` (`smoothing_levels`
    /// values), then the exact objective.
    pub smoothing_start: f64,
    pub smoothing_levels: usize,
    /// Step tolerance of the smoothed stages.
    pub smoothing_min_step: f64,
    /// Initial step of the final polish on `Σ pᵢτᵢ²`.
    pub polish_initial_step: f64,
    /// Sweep cap of the polish on `Σ pᵢτᵢ²`.
    pub polish_max_sweeps: usize,
    /// Only local searches ending below this value are polished.
    pub polish_below: f64,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.5,
            min_step: 1e-7,
            max_sweeps: 20_000,
            stop_below: 1e-10,
            batch: 16,
            smoothing_start: 1e-2,
            smoothing_levels: 3,
            smoothing_min_step: 1e-4,
            polish_initial_step: 1e-2,
            polish_max_sweeps: 1000,
            polish_below: 1e-2,
        }
    }
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn row_value(v: &[C64]) -> f64 {
    smoothed_row_value(v, 0.0)
}

/// `p τ²`, smooth where the tangle vanishes.
fn squared_row_value(v: &[C64]) -> f64 {
    let p = norm_sqr(v);
    if p <= 1e-300 {
        0.0
    } else {
        tangle_polynomial_raw(v).norm_sqr() / (p * p * p)
    }
}

fn smoothed_row_value(v: &[C64], delta: f64) -> f64 {
    let p = norm_sqr(v);
    if p <= 1e-300 {
        0.0
    } else {
        let t = tangle_polynomial_raw(v).norm();
        if delta == 0.0 {
            t / p
        } else {
            t.hypot(delta * p * p) / p
        }
    }
}

/// Weighted eigenvectors `√λₖ vₖ` for `λₖ > RANK_TOL`.
fn weighted_eigenvectors(rho: &DensityMatrix) -> Vec<Row> {
    let (vals, vecs) = rho.eigen();
    let mut rows = Vec::new();
    for (k, &lam) in vals.iter().enumerate().rev() {
        if lam > RANK_TOL {
            let mut row = [C64::new(0.0, 0.0); DIM];
            for (a, x) in row.iter_mut().enumerate() {
                *x = vecs[(a, k)] * lam.sqrt();
            }
            rows.push(row);
        }
    }
    rows
}

/// First `r` columns of a Haar-random `m × m` unitary.
fn haar_columns(m: usize, r: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let g = DMatrix::<C64>::from_fn(m, m, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let qr = g.qr();
    let (mut q, rr) = (qr.q(), qr.r());
    for j in 0..m {
        let d = rr[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q.columns(0, r).into_owned()
}

fn padded_identity(m: usize, r: usize) -> DMatrix<C64> {
    DMatrix::from_fn(m, r, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

fn rows_from(u: &DMatrix<C64>, w: &[Row]) -> Vec<Row> {
    (0..u.nrows())
        .map(|i| {
            let mut row = [C64::new(0.0, 0.0); DIM];
            for (k, wk) in w.iter().enumerate() {
                let c = u[(i, k)];
                for a in 0..DIM {
                    row[a] += c * wk[a];
                }
            }
            row
        })
        .collect()
}

struct LocalOutcome {
    value: f64,
    generator: DMatrix<C64>,
    converged: bool,
}

/// Coordinate pattern search over pair rotations of the rows of `U`,
/// first on smoothed objectives and then on the exact one. Small results
/// are then passed to [`polish`].
fn local_search(mut u: DMatrix<C64>, w: &[Row], opts: &RoofOptions) -> LocalOutcome {
    let mut phi = rows_from(&u, w);
    let mut converged = true;
    let mut deltas: Vec<f64> = (0..opts.smoothing_levels)
        .map(|k| opts.smoothing_start / 10f64.powi(k as i32))
        .collect();
    deltas.push(0.0);
    for delta in deltas {
        let min_step = if delta > 0.0 { opts.smoothing_min_step } else { opts.min_step };
        converged &= pattern_search(&mut u, &mut phi, |v| smoothed_row_value(v, delta), min_step, opts);
    }
    let value = rows_from(&u, w).iter().map(|v| row_value(v)).sum();
    if value < opts.polish_below {
        let polished = polish(u.clone(), w, opts);
        if polished.value < value {
            return polished;
        }
    }
    LocalOutcome {
        value,
        generator: u,
        converged,
    }
}

/// Descends on `p τ²` and then on the exact objective. Near decompositions
/// with vanishing tangle this gets much closer to zero than the exact
/// objective alone, whose kinks stall coordinate moves.
fn polish(mut u: DMatrix<C64>, w: &[Row], opts: &RoofOptions) -> LocalOutcome {
    let mut phi = rows_from(&u, w);
    let squared = RoofOptions {
        initial_step: opts.polish_initial_step,
        max_sweeps: opts.polish_max_sweeps,
        ..*opts
    };
    // the capped squared stage only moves the start of the exact stage
    pattern_search(&mut u, &mut phi, squared_row_value, opts.min_step, &squared);
    let exact = RoofOptions {
        initial_step: opts.polish_initial_step,
        ..*opts
    };
    let converged = pattern_search(&mut u, &mut phi, row_value, opts.min_step, &exact);
    let value = rows_from(&u, w).iter().map(|v| row_value(v)).sum();
    LocalOutcome {
        value,
        generator: u,
        converged,
    }
}

/// Returns false if the sweep cap was hit.
fn pattern_search(
    u: &mut DMatrix<C64>,
    phi: &mut [Row],
    f: impl Fn(&[C64]) -> f64,
    min_step: f64,
    opts: &RoofOptions,
) -> bool {
    let m = u.nrows();
    let mut contrib: Vec<f64> = phi.iter().map(|v| f(v)).collect();
    let phases = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
    let mut h = opts.initial_step;
    let mut sweeps = 0;
    while h >= min_step {
        if sweeps >= opts.max_sweeps {
            return false;
        }
        sweeps += 1;
        let mut improved = false;
        let (c, s) = (h.cos(), h.sin());
        for i in 0..m {
            for j in i + 1..m {
                for e in phases {
                    for sign in [1.0, -1.0] {
                        let se = e * (sign * s);
                        loop {
                            let mut a = [C64::new(0.0, 0.0); DIM];
                            let mut b = [C64::new(0.0, 0.0); DIM];
                            for k in 0..DIM {
                                a[k] = phi[i][k] * c - se.conj() * phi[j][k];
                                b[k] = se * phi[i][k] + phi[j][k] * c;
                            }
                            let (fa, fb) = (f(&a), f(&b));
                            if fa + fb < contrib[i] + contrib[j] - 1e-15 {
                                phi[i] = a;
                                phi[j] = b;
                                contrib[i] = fa;
                                contrib[j] = fb;
                                for k in 0..u.ncols() {
                                    let (ui, uj) = (u[(i, k)], u[(j, k)]);
                                    u[(i, k)] = ui * c - se.conj() * uj;
                                    u[(j, k)] = se * ui + uj * c;
                                }
                                improved = true;
                            } else {
                                break;
                            }
                        }
                    }
                }
            }
        }
        if !improved {
            h /= 2.0;
        }
    }
    true
}

fn restart_start(k: usize, m: usize, r: usize, seed: u64) -> DMatrix<C64> {
    if k == 0 {
        return padded_identity(m, r);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    haar_columns(m, r, &mut rng)
}

/// [`roof_upper_bound_with`] using [`RoofOptions::default`].
pub fn roof_upper_bound(rho: &DensityMatrix, m: usize, restarts: usize, seed: u64) -> Result<RoofResult> {
    roof_upper_bound_with(rho, m, restarts, seed, &RoofOptions::default())
}

/// Best average tangle found over `restarts` local searches with `m`
/// decomposition vectors. Restart 0 starts from the eigendecomposition, so
/// the bound never exceeds the eigendecomposition's average.
pub fn roof_upper_bound_with(
    rho: &DensityMatrix,
    m: usize,
    restarts: usize,
    seed: u64,
    opts: &RoofOptions,
) -> Result<RoofResult> {
    if rho.n_qubits() != 3 {
        return Err(Error::Dimension(format!("roof needs 3 qubits, got {}", rho.n_qubits())));
    }
    let w = weighted_eigenvectors(rho);
    let r = w.len();
    if r == 0 {
        return Err(Error::Degenerate("density matrix has no positive eigenvalue".into()));
    }
    if m < r {
        return Err(Error::Parameter(format!("m = {m} is below the rank {r}")));
    }
    let restarts = restarts.max(1);
    let eigen_bound = w.iter().map(|v| row_value(v)).sum();
    let batch = opts.batch.max(1);

    let mut best: Option<(usize, LocalOutcome)> = None;
    let mut used = 0;
    while used < restarts {
        let end = (used + batch).min(restarts);
        let outcomes: Vec<LocalOutcome> = (used..end)
            .into_par_iter()
            .map(|k| local_search(restart_start(k, m, r, seed), &w, opts))
            .collect();
        for (k, out) in (used..end).zip(outcomes) {
            if !out.value.is_finite() {
                return Err(Error::Numerical(format!("restart {k} produced a non-finite bound")));
            }
            if best.as_ref().is_none_or(|(_, b)| out.value < b.value) {
                best = Some((k, out));
            }
        }
        used = end;
        if best.as_ref().is_some_and(|(_, b)| b.value < opts.stop_below) {
            break;
        }
    }
    let (_, out) = best.expect("at least one restart");
    let vectors = rows_from(&out.generator, &w).into_iter().map(|r| r.to_vec()).collect();
    Ok(RoofResult {
        upper_bound: out.value.max(0.0),
        best_decomposition: Decomposition {
            vectors,
            generator: out.generator,
        },
        restarts_used: used,
        converged: out.converged,
        eigen_bound,
    })
}

/// `(1 − ε)|GHZ⟩⟨GHZ| + ε|W⟩⟨W|`.
pub fn ghzw_mixture(eps: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Parameter(format!("eps = {eps} is outside [0, 1]")));
    }
    DensityMatrix::mixture(&[(1.0 - eps, &PureState::ghz(3)), (eps, &PureState::w(3))])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// [`ghzw_mixture`].
    Ghzw,
    /// GHZ with white noise.
    WhiteNoise,
}

impl Family {
    pub fn state(self, eps: f64) -> Result<DensityMatrix> {
        match self {
            Family::Ghzw => ghzw_mixture(eps),
            Family::WhiteNoise => white_noise_mix(&PureState::ghz(3), eps),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Ghzw => "ghzw",
            Family::WhiteNoise => "white_noise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub eps: f64,
    pub upper_bound: f64,
    pub restarts: usize,
    pub m: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub family: Family,
    pub points: Vec<ScanPoint>,
    /// Smallest grid value whose bound is below [`VANISH_TOL`].
    pub threshold: Option<f64>,
}

impl ScanResult {
    /// CSV with columns `eps,upper_bound,restarts,m,converged`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["eps", "upper_bound", "restarts", "m", "converged"])
            .expect("writing to memory");
        for p in &self.points {
            w.write_record([
                p.eps.to_string(),
                p.upper_bound.to_string(),
                p.restarts.to_string(),
                p.m.to_string(),
                p.converged.to_string(),
            ])
            .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }
}

/// Inclusive grid `a, a + step, …, b` with values rounded to 12 decimals.
pub fn eps_grid(a: f64, b: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || b < a {
        return Err(Error::Parameter(format!("bad grid {a}:{b}:{step}")));
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| ((a + k as f64 * step) * 1e12).round() / 1e12).collect())
}

pub fn vanish_threshold_scan(family: Family, grid: &[f64], m: usize, restarts: usize, seed: u64) -> Result<ScanResult> {
    vanish_threshold_scan_with(family, grid, m, restarts, seed, &RoofOptions::default())
}

/// Roof bounds over an ascending grid in `[0, 1]`. Every grid point uses the
/// same seed.
pub fn vanish_threshold_scan_with(
    family: Family,
    grid: &[f64],
    m: usize,
    restarts: usize,
    seed: u64,
    opts: &RoofOptions,
) -> Result<ScanResult> {
    if grid.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::Parameter("grid must be sorted ascending".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &eps in grid {
        let res = roof_upper_bound_with(&family.state(eps)?, m, restarts, seed, opts)?;
        points.push(ScanPoint {
            eps,
            upper_bound: res.upper_bound,
            restarts: res.restarts_used,
            m,
            converged: res.converged,
        });
    }
    let threshold = points.iter().find(|p| p.upper_bound < VANISH_TOL).map(|p| p.eps);
    Ok(ScanResult {
        family,
        points,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_roof_is_its_tangle() {
        let rho = DensityMatrix::from_pure(&PureState::ghz(3));
        for m in [1, 3] {
            let r = roof_upper_bound(&rho, m, 4, 1).unwrap();
            assert!((r.upper_bound - 1.0).abs() < 1e-6, "m={m}: {}", r.upper_bound);
            assert!(r.best_decomposition.reconstruction_error(&rho) < 1e-8);
        }
    }

    #[test]
    fn rejects_small_m() {
        let rho = ghzw_mixture(0.3).unwrap();
        assert!(matches!(roof_upper_bound(&rho, 1, 2, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn mixture_vanishes_at_half() {
        let rho = ghzw_mixture(0.5).unwrap();
        let r = roof_upper_bound(&rho, 4, 50, 3).unwrap();
        assert!(r.upper_bound < 1e-3, "{}", r.upper_bound);
        assert!(r.upper_bound <= r.eigen_bound + 1e-10);
        assert!(r.best_decomposition.reconstruction_error(&rho) < 1e-8);
        assert!(r.best_decomposition.orthonormality_error() < 1e-10);
    }

    #[test]
    fn mixture_far_below_threshold_keeps_tangle() {
        let r = roof_upper_bound(&ghzw_mixture(0.1).unwrap(), 4, 50, 3).unwrap();
        println!("ghzw 0.1: {}", r.upper_bound);
        assert!(r.upper_bound >= 0.3);
    }

    #[test]
    fn deterministic_and_monotone_in_restarts() {
        let rho = ghzw_mixture(0.3).unwrap();
        let a = roof_upper_bound(&rho, 4, 20, 11).unwrap();
        let b = roof_upper_bound(&rho, 4, 20, 11).unwrap();
        assert_eq!(a.upper_bound.to_bits(), b.upper_bound.to_bits());
        let c = roof_upper_bound(&rho, 4, 40, 11).unwrap();
        assert!(c.upper_bound <= a.upper_bound);
    }

    #[test]
    fn mixture_endpoints() {
        let g = ghzw_mixture(0.0).unwrap();
        assert!((g.matrix() - PureState::ghz(3).projector()).camax() < 1e-15);
        assert_eq!(ghzw_mixture(0.4).unwrap().rank(1e-10), 2);
        assert!(ghzw_mixture(1.2).is_err());
    }

    #[test]
    fn grid_helper() {
        let g = eps_grid(0.0, 1.0, 0.01).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[37], 0.37);
        assert!(eps_grid(0.0, 1.0, 0.0).is_err());
    }
}
