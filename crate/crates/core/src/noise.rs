//! White-noise error model: first-order formulas for `C²` and `τ₃`, the
//! `M` statistics they depend on, a finite-difference oracle that checks
//! the formulas against direct evaluation, thresholds and simple bounds.

use serde::{Deserialize, Serialize};

use crate::correlator::exact_correlators;
use crate::error::{Error, Result};
use crate::lift::{concurrence_sq_linear, tau3_sq_linear, Tau3Form};
use crate::qubit::{white_noise_affine, Expectation, PauliString, PureState};

/// How the primed pair sum in `M_zz` runs over qubit pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairConvention {
    /// Both `(i, j)` and `(j, i)`: six terms.
    OrderedPairs,
    /// `i < j` only: three terms.
    #[default]
    UnorderedPairs,
}

impl PairConvention {
    pub const ALL: [PairConvention; 2] = [PairConvention::OrderedPairs, PairConvention::UnorderedPairs];

    pub fn as_str(self) -> &'static str {
        match self {
            PairConvention::OrderedPairs => "ordered_pairs",
            PairConvention::UnorderedPairs => "unordered_pairs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MStats {
    pub m_z: f64,
    pub m_zz: f64,
    pub m_zzz: f64,
    pub m_combined: f64,
    pub pair_convention: PairConvention,
}

impl MStats {
    /// Builds the record, computing `m_combined = 3 m_z² − 3 m_zz² + m_zzz²`.
    pub fn new(m_z: f64, m_zz: f64, m_zzz: f64, pair_convention: PairConvention) -> Self {
        Self {
            m_z,
            m_zz,
            m_zzz,
            m_combined: 3.0 * m_z * m_z - 3.0 * m_zz * m_zz + m_zzz * m_zzz,
            pair_convention,
        }
    }
}

/// `σ_z` averages of a normalized three-qubit state.
pub fn m_statistics(psi: &PureState, convention: PairConvention) -> Result<MStats> {
    if psi.n_qubits() != 3 {
        return Err(Error::Dimension(format!("M statistics need 3 qubits, got {}", psi.n_qubits())));
    }
    let z = |q: &[usize]| -> Result<f64> {
        let mut idx = [0u8; 3];
        for &i in q {
            idx[i] = 3;
        }
        psi.expectation(&PauliString::new(idx.to_vec())?)
    };
    let m_z = (z(&[0])? + z(&[1])? + z(&[2])?) / 3.0;
    let unordered = z(&[0, 1])? + z(&[0, 2])? + z(&[1, 2])?;
    let pair_sum = match convention {
        PairConvention::OrderedPairs => 2.0 * unordered,
        PairConvention::UnorderedPairs => unordered,
    };
    Ok(MStats::new(m_z, pair_sum / 3.0, z(&[0, 1, 2])?, convention))
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {x} is outside [0, 1]")))
    }
}

/// `C² − (ε/2)(5C² − 1)`.
pub fn c2_exp_formula(c2: f64, eps: f64) -> Result<f64> {
    check_unit("c2", c2)?;
    check_unit("eps", eps)?;
    Ok(c2 - eps / 2.0 * (5.0 * c2 - 1.0))
}

/// `τ₃ − (ε/2)(9τ₃ − 1 + 3 M)` with `M = m.m_combined`.
pub fn tau3_exp_formula(tau3: f64, m: &MStats, eps: f64) -> Result<f64> {
    check_unit("tau3", tau3)?;
    check_unit("eps", eps)?;
    Ok(tau3 - eps / 2.0 * (9.0 * tau3 - 1.0 + 3.0 * m.m_combined))
}

fn c2_formula_slope(c2: f64) -> f64 {
    -(5.0 * c2 - 1.0) / 2.0
}

fn tau3_formula_slope(tau3: f64, m_combined: f64) -> f64 {
    -(9.0 * tau3 - 1.0 + 3.0 * m_combined) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleTarget {
    C2,
    Tau3,
}

impl OracleTarget {
    fn n_qubits(self) -> usize {
        match self {
            OracleTarget::C2 => 2,
            OracleTarget::Tau3 => 3,
        }
    }
}

/// What the left-hand side of the `τ₃` formula is taken to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tau3Reading {
    /// The tangle itself; the numeric side is `√` of the linear form.
    Tau3,
    /// The squared tangle computed by the linear form.
    Tau3Sq,
}

impl Tau3Reading {
    pub fn as_str(self) -> &'static str {
        match self {
            Tau3Reading::Tau3 => "tau3",
            Tau3Reading::Tau3Sq => "tau3_sq",
        }
    }
}

/// Linear-form value (`C²` or `τ₃²`) on the exact correlators of
/// `(1 − ε)|ψ⟩⟨ψ| + ε/d`, for any real `ε`.
fn noisy_linear_unchecked(psi: &PureState, which: OracleTarget, eps: f64, form: Tau3Form) -> Result<f64> {
    let rho = white_noise_affine(psi, eps);
    let table = exact_correlators(&rho, &PauliString::all(psi.n_qubits()))?;
    match which {
        OracleTarget::C2 => concurrence_sq_linear(&table),
        OracleTarget::Tau3 => tau3_sq_linear(&table, form),
    }
}

/// Linear-form value of `C²` or `τ₃²` on the white-noise mixture. The two
/// `τ₃²` forms coincide on pure states but not on mixtures.
pub fn noisy_linear_value(psi: &PureState, which: OracleTarget, eps: f64, form: Tau3Form) -> Result<f64> {
    check_unit("eps", eps)?;
    check_target(psi, which)?;
    noisy_linear_unchecked(psi, which, eps, form)
}

fn check_target(psi: &PureState, which: OracleTarget) -> Result<()> {
    if psi.n_qubits() != which.n_qubits() {
        return Err(Error::Dimension(format!(
            "{which:?} oracle needs {} qubits, got {}",
            which.n_qubits(),
            psi.n_qubits()
        )));
    }
    if !psi.is_normalized() {
        return Err(Error::Parameter("oracle input must be normalized".into()));
    }
    Ok(())
}

pub const ORACLE_INITIAL_STEP: f64 = 1e-4;
pub const ORACLE_STABILITY: f64 = 1e-6;
pub const ORACLE_MATCH_TOL: f64 = 1e-6;
const ORACLE_MAX_HALVINGS: usize = 20;

fn stable(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-9
}

/// Slope at `ε = 0` from central differences with one Richardson step,
/// halving the step until consecutive estimates agree to
/// [`ORACLE_STABILITY`] (relative, with a `1e−9` absolute floor for slopes
/// that vanish).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub previous: f64,
    pub step: f64,
    pub value_at_zero: f64,
}

pub fn numeric_slope<F: Fn(f64) -> Result<f64>>(f: F) -> Result<SlopeEstimate> {
    let diff = |h: f64| -> Result<f64> { Ok((f(h)? - f(-h)?) / (2.0 * h)) };
    let richardson = |h: f64| -> Result<f64> { Ok((4.0 * diff(h / 2.0)? - diff(h)?) / 3.0) };
    let mut h = ORACLE_INITIAL_STEP;
    let mut prev = richardson(h)?;
    for _ in 0..ORACLE_MAX_HALVINGS {
        h /= 2.0;
        let cur = richardson(h)?;
        if !cur.is_finite() {
            break;
        }
        if stable(cur, prev, ORACLE_STABILITY) {
            return Ok(SlopeEstimate {
                slope: cur,
                previous: prev,
                step: h,
                value_at_zero: f(0.0)?,
            });
        }
        prev = cur;
    }
    Err(Error::Numerical("finite-difference slope did not stabilize".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantVerdict {
    pub id: String,
    pub reading: Option<Tau3Reading>,
    pub convention: Option<PairConvention>,
    pub formula_slope: f64,
    /// Numeric slope of the quantity the variant reads as its left-hand side;
    /// `None` when that slope is undefined (square root at zero).
    pub numeric_slope: Option<f64>,
    pub matches: bool,
    /// The same comparison against the pure-`𝔊` form of `τ₃²`.
    pub numeric_slope_pure_g: Option<f64>,
    pub matches_pure_g: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub target: OracleTarget,
    /// `C²` or `τ₃²` of the pure state.
    pub value_at_zero: f64,
    /// Slope of `C²` or of the mixed-form `τ₃²` in `ε`.
    pub slope_numeric: f64,
    /// Slope of the pure-`𝔊` form of `τ₃²`.
    pub slope_numeric_pure_g: Option<f64>,
    pub slope_previous_step: f64,
    pub step: f64,
    pub slope_c2_formula: Option<f64>,
    pub variants: Vec<VariantVerdict>,
    /// Ids of the variants whose slope matches within [`ORACLE_MATCH_TOL`];
    /// matches against the pure-`𝔊` form carry the suffix `@pure_g`.
    pub matched: Vec<String>,
}

impl OracleReport {
    /// First-order value `v(0) + ε v'(0)` of the linear form, clamped at 0.
    pub fn first_order_value(&self, eps: f64) -> f64 {
        (self.value_at_zero + eps * self.slope_numeric).max(0.0)
    }
}

fn slope_matches(formula: f64, numeric: Option<f64>) -> bool {
    numeric
        .map(|n| (formula - n).abs() <= ORACLE_MATCH_TOL * n.abs().max(1.0))
        .unwrap_or(false)
}

fn verdict(
    id: String,
    reading: Option<Tau3Reading>,
    convention: Option<PairConvention>,
    formula_slope: f64,
    numeric: (Option<f64>, Option<f64>),
) -> VariantVerdict {
    VariantVerdict {
        id,
        reading,
        convention,
        formula_slope,
        numeric_slope: numeric.0,
        matches: slope_matches(formula_slope, numeric.0),
        numeric_slope_pure_g: numeric.1,
        matches_pure_g: slope_matches(formula_slope, numeric.1),
    }
}

pub fn variant_id(reading: Tau3Reading, convention: PairConvention) -> String {
    format!("{}/{}", reading.as_str(), convention.as_str())
}

/// Compares the slope at `ε = 0` of the linear form on noisy correlators with
/// the slopes of the first-order formulas. For `τ₃` all four combinations of
/// [`Tau3Reading`] and [`PairConvention`] are checked.
pub fn first_order_oracle(psi: &PureState, which: OracleTarget) -> Result<OracleReport> {
    check_target(psi, which)?;
    let est = numeric_slope(|e| noisy_linear_unchecked(psi, which, e, Tau3Form::MixedForm))?;
    let est_g = match which {
        OracleTarget::C2 => None,
        OracleTarget::Tau3 => Some(numeric_slope(|e| noisy_linear_unchecked(psi, which, e, Tau3Form::PureGForm))?),
    };
    let v0 = est.value_at_zero;
    let mut variants = Vec::new();
    let mut slope_c2_formula = None;
    match which {
        OracleTarget::C2 => {
            let s = c2_formula_slope(v0);
            slope_c2_formula = Some(s);
            variants.push(verdict("c2".into(), None, None, s, (Some(est.slope), None)));
        }
        OracleTarget::Tau3 => {
            let tau = v0.max(0.0).sqrt();
            let g_slope = est_g.map(|e| e.slope);
            let root = |s: Option<f64>| s.filter(|_| tau > 1e-6).map(|s| s / (2.0 * tau));
            for reading in [Tau3Reading::Tau3, Tau3Reading::Tau3Sq] {
                for conv in PairConvention::ALL {
                    let m = m_statistics(psi, conv)?;
                    let (lhs, numeric) = match reading {
                        Tau3Reading::Tau3 => (tau, (root(Some(est.slope)), root(g_slope))),
                        Tau3Reading::Tau3Sq => (v0, (Some(est.slope), g_slope)),
                    };
                    variants.push(verdict(
                        variant_id(reading, conv),
                        Some(reading),
                        Some(conv),
                        tau3_formula_slope(lhs, m.m_combined),
                        numeric,
                    ));
                }
            }
        }
    }
    let mut matched: Vec<String> = variants.iter().filter(|v| v.matches).map(|v| v.id.clone()).collect();
    matched.extend(variants.iter().filter(|v| v.matches_pure_g).map(|v| format!("{}@pure_g", v.id)));
    Ok(OracleReport {
        target: which,
        value_at_zero: v0,
        slope_numeric: est.slope,
        slope_numeric_pure_g: est_g.map(|e| e.slope),
        slope_previous_step: est.previous,
        step: est.step,
        slope_c2_formula,
        variants,
        matched,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseScenario {
    pub rank_r: u32,
    pub p_max: f64,
    pub p_min: f64,
    pub delta_cap: f64,
}

impl NoiseScenario {
    pub fn new(rank_r: u32, p_max: f64, p_min: f64, delta_cap: f64) -> Result<Self> {
        if rank_r < 2 {
            return Err(Error::Parameter(format!("rank must be at least 2, got {rank_r}")));
        }
        for (name, p) in [("p_max", p_max), ("p_min", p_min)] {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Parameter(format!("{name} = {p} is outside (0, 1]")));
            }
        }
        if p_min > p_max {
            return Err(Error::Parameter(format!("p_min = {p_min} exceeds p_max = {p_max}")));
        }
        Ok(Self {
            rank_r,
            p_max,
            p_min,
            delta_cap,
        })
    }

    /// A scenario whose only relevant parameters are `r` and `p_max`.
    pub fn simple(rank_r: u32, p_max: f64) -> Result<Self> {
        Self::new(rank_r, p_max, p_max, 1.0)
    }

    fn interference(&self) -> f64 {
        (self.rank_r - 1) as f64 * self.p_max
    }
}

/// The `ε` at which `1 − ε = ε p_max (r − 1)`.
pub fn threshold_epsilon(s: &NoiseScenario) -> f64 {
    1.0 / (1.0 + s.interference())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Dominant,
    Crossover,
}

/// `−ε (τ₃ + 24 (r − 1) p_max)`, halved in the crossover regime.
pub fn deviation_bound(tau3: f64, s: &NoiseScenario, eps: f64, regime: Regime) -> f64 {
    let dominant = -eps * (tau3 + 24.0 * s.interference());
    match regime {
        Regime::Dominant => dominant,
        Regime::Crossover => dominant / 2.0,
    }
}

/// `τ₃ (1 − 2Δε)`, clamped below at 0. Expects `ε ≥ 0` and `Δ > 0`.
pub fn affine_lower_bound(tau3: f64, delta: f64, eps: f64) -> f64 {
    (tau3 * (1.0 - 2.0 * delta * eps)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzwConstants {
    pub p1: f64,
    pub delta: f64,
}

/// `p₁ = ½ + (3/310)√465` and `Δ = p₁ / (2(1 − p₁))`.
pub fn ghzw_constants() -> GhzwConstants {
    let p1 = 0.5 + 3.0 / 310.0 * 465f64.sqrt();
    GhzwConstants {
        p1,
        delta: p1 / (2.0 * (1.0 - p1)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseCurveRow {
    pub eps: f64,
    pub formula_value: f64,
    /// Direct evaluation of the linear form on the noisy correlators, in the
    /// variant's reading (`√` for `tau3/…`).
    pub oracle_value: f64,
    pub variant_id: String,
}

/// Formula and direct values over `grid` for every variant of `which`.
pub fn noise_curve(psi: &PureState, which: OracleTarget, grid: &[f64]) -> Result<Vec<NoiseCurveRow>> {
    check_target(psi, which)?;
    for &e in grid {
        check_unit("eps", e)?;
    }
    let v0 = noisy_linear_unchecked(psi, which, 0.0, Tau3Form::MixedForm)?.max(0.0);
    let mut rows = Vec::new();
    for &eps in grid {
        let v = noisy_linear_unchecked(psi, which, eps, Tau3Form::MixedForm)?;
        match which {
            OracleTarget::C2 => rows.push(NoiseCurveRow {
                eps,
                formula_value: c2_exp_formula(v0.min(1.0), eps)?,
                oracle_value: v,
                variant_id: "c2".into(),
            }),
            OracleTarget::Tau3 => {
                for reading in [Tau3Reading::Tau3, Tau3Reading::Tau3Sq] {
                    for conv in PairConvention::ALL {
                        let m = m_statistics(psi, conv)?;
                        let (lhs, direct) = match reading {
                            Tau3Reading::Tau3 => (v0.sqrt(), v.max(0.0).sqrt()),
                            Tau3Reading::Tau3Sq => (v0, v),
                        };
                        rows.push(NoiseCurveRow {
                            eps,
                            formula_value: tau3_exp_formula(lhs.min(1.0), &m, eps)?,
                            oracle_value: direct,
                            variant_id: variant_id(reading, conv),
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub fn noise_curve_csv(rows: &[NoiseCurveRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["eps", "formula_value", "oracle_value", "variant_id"])
        .expect("writing to memory");
    for r in rows {
        w.write_record([
            r.eps.to_string(),
            r.formula_value.to_string(),
            r.oracle_value.to_string(),
            r.variant_id.clone(),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antilinear::three_tangle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn m_statistics_ghz() {
        let ghz = PureState::ghz(3);
        let u = m_statistics(&ghz, PairConvention::UnorderedPairs).unwrap();
        assert!(u.m_z.abs() < 1e-15 && u.m_zzz.abs() < 1e-15);
        assert!((u.m_zz - 1.0).abs() < 1e-15);
        assert!((u.m_combined + 3.0).abs() < 1e-14);
        let o = m_statistics(&ghz, PairConvention::OrderedPairs).unwrap();
        assert!((o.m_zz - 2.0).abs() < 1e-15);
        assert!((o.m_combined + 12.0).abs() < 1e-14);
        assert!(m_statistics(&PureState::bell(), PairConvention::OrderedPairs).is_err());
    }

    #[test]
    fn m_statistics_product() {
        for conv in PairConvention::ALL {
            let m = m_statistics(&PureState::basis(3, 0), conv).unwrap();
            assert_eq!((m.m_z, m.m_zzz), (1.0, 1.0));
            assert_eq!(m.m_combined, 3.0 - 3.0 * m.m_zz * m.m_zz + 1.0);
        }
    }

    #[test]
    fn formula_arithmetic() {
        assert_eq!(c2_exp_formula(1.0, 0.0).unwrap(), 1.0);
        assert!((c2_exp_formula(1.0, 0.1).unwrap() - 0.8).abs() < 1e-15);
        assert!((c2_exp_formula(0.2, 0.1).unwrap() - 0.2).abs() < 1e-15);
        assert!(c2_exp_formula(1.2, 0.1).is_err());
        assert!(c2_exp_formula(0.5, -0.1).is_err());
        let m = MStats::new(0.0, 0.0, (1.0f64 / 3.0).sqrt(), PairConvention::UnorderedPairs);
        assert!((m.m_combined - 1.0 / 3.0).abs() < 1e-15);
        assert!(tau3_exp_formula(0.0, &m, 0.3).unwrap().abs() < 1e-15);
        assert_eq!(tau3_exp_formula(0.7, &m, 0.0).unwrap(), 0.7);
    }

    #[test]
    fn thresholds_and_deviation_anchors() {
        assert_eq!(threshold_epsilon(&NoiseScenario::simple(2, 1.0).unwrap()), 0.5);
        assert_eq!(threshold_epsilon(&NoiseScenario::simple(8, 1.0 / 7.0).unwrap()), 0.5);
        let s = NoiseScenario::simple(2, 1.0).unwrap();
        assert!((deviation_bound(1.0, &s, 0.04, Regime::Dominant) + 1.0).abs() < 1e-15);
        assert!((deviation_bound(1.0, &s, 0.08, Regime::Crossover) + 1.0).abs() < 1e-15);
        assert!(NoiseScenario::simple(1, 0.5).is_err());
        assert!(NoiseScenario::new(3, 0.2, 0.5, 1.0).is_err());
    }

    #[test]
    fn affine_bound_and_constants() {
        assert_eq!(affine_lower_bound(1.0, 1.17, 0.0), 1.0);
        assert!((affine_lower_bound(1.0, 1.17, 0.1) - 0.766).abs() < 1e-15);
        assert_eq!(affine_lower_bound(1.0, 1.17, 1.0), 0.0);
        let c = ghzw_constants();
        assert!(c.p1 > 0.5 && c.p1 < 1.0);
        assert!((c.p1 - 0.70868).abs() < 1e-5);
        assert!((c.delta - 1.2163).abs() < 1e-4);
    }

    #[test]
    fn tau3_forms_split_under_noise() {
        let chi = PureState::random(3, &mut ChaCha8Rng::seed_from_u64(2));
        let tau = three_tangle(&chi).unwrap();
        for form in [Tau3Form::MixedForm, Tau3Form::PureGForm] {
            let v0 = noisy_linear_value(&chi, OracleTarget::Tau3, 0.0, form).unwrap();
            assert!((v0 - tau * tau).abs() < 1e-12);
        }
        let mixed = noisy_linear_value(&chi, OracleTarget::Tau3, 0.3, Tau3Form::MixedForm).unwrap();
        let pure_g = noisy_linear_value(&chi, OracleTarget::Tau3, 0.3, Tau3Form::PureGForm).unwrap();
        assert!((mixed - pure_g).abs() > 1e-6);
    }

    #[test]
    fn oracle_bell() {
        let r = first_order_oracle(&PureState::bell(), OracleTarget::C2).unwrap();
        assert!((r.value_at_zero - 1.0).abs() < 1e-14);
        assert!((r.slope_c2_formula.unwrap() + 2.0).abs() < 1e-12);
        assert!(stable(r.slope_numeric, r.slope_previous_step, ORACLE_STABILITY));
        println!("{}", serde_json::to_string_pretty(&r).unwrap());
    }

    #[test]
    fn oracle_product_has_zero_slope() {
        let r = first_order_oracle(&PureState::basis(3, 0), OracleTarget::Tau3).unwrap();
        assert!(r.slope_numeric.abs() <= 1e-8);
        assert!(r.variants.iter().filter(|v| v.reading == Some(Tau3Reading::Tau3)).all(|v| v.numeric_slope.is_none()));
    }

    #[test]
    fn oracle_ghz_reports_all_variants() {
        let r = first_order_oracle(&PureState::ghz(3), OracleTarget::Tau3).unwrap();
        assert_eq!(r.variants.len(), 4);
        println!("{}", serde_json::to_string_pretty(&r).unwrap());
    }

    #[test]
    fn curve_rows() {
        let rows = noise_curve(&PureState::ghz(3), OracleTarget::Tau3, &[0.0, 0.1]).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().filter(|r| r.eps == 0.0).all(|r| (r.formula_value - r.oracle_value).abs() < 1e-12));
        let csv = noise_curve_csv(&rows);
        assert!(csv.starts_with("eps,formula_value,oracle_value,variant_id\n"));
    }
}
