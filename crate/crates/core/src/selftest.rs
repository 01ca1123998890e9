//! Quick property checks across all modules, plus the regression artifacts
//! pinned under `tests/data`.

use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::antilinear::{comb_value_o1, comb_value_o2, concurrence, concurrence_polynomial, n_tangle, tangle_polynomial, three_tangle};
use crate::correlator::{exact_correlators, sample_table, CorrelatorTable};
use crate::error::Result;
use crate::lift::{
    concurrence_sq_linear, g_tensor, g_tensor_diff, p_minus_proportionality, p_plus_identity_check, tau3_sq_linear,
    GProvenance, Tau3Form,
};
use crate::noise::{
    deviation_bound, first_order_oracle, ghzw_constants, threshold_epsilon, NoiseScenario, OracleReport, OracleTarget,
    PairConvention, Regime,
};
use crate::qubit::{
    apply_local, pauli_operator, sample_local_group, DensityMatrix, GroupKind, LocalInvertible, PauliString, PureState,
};
use crate::roof::{ghzw_mixture, roof_upper_bound};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestResult {
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
}

impl SelftestResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, worst: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        passed: worst <= tol,
        detail: format!("worst {worst:e}, tolerance {tol:e}"),
    }
}

fn random_local_sl(n: usize, seed: u64) -> Vec<LocalInvertible> {
    (0..n)
        .map(|q| sample_local_group(GroupKind::SL2C, seed * 16 + q as u64))
        .collect()
}

/// Runs every check and, when `out` is given, writes [`artifacts`] there.
pub fn run_selftest(out: Option<&Path>) -> Result<SelftestResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut checks = Vec::new();

    let worst = PauliString::all(3)
        .iter()
        .map(|s| {
            let p = pauli_operator(s);
            (&p * &p - nalgebra::DMatrix::<Complex64>::identity(8, 8)).camax()
        })
        .fold(0.0, f64::max);
    checks.push(check("pauli_squares_to_identity", worst, 1e-12));

    let mut worst = 0.0f64;
    for _ in 0..200 {
        let phi = PureState::random(1, &mut rng);
        worst = worst.max(comb_value_o1(&phi)?.norm()).max(comb_value_o2(&phi)?.norm());
    }
    checks.push(check("comb_nullity", worst, 1e-12));

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let phi = PureState::random(2, &mut rng);
        let c = concurrence(&phi)?;
        worst = worst.max((concurrence_sq_linear(&exact_correlators(&phi, &PauliString::all(2))?)? - c * c).abs());
        let chi = PureState::random(3, &mut rng);
        let tau = three_tangle(&chi)?;
        let table = exact_correlators(&chi, &PauliString::all(3))?;
        for form in [Tau3Form::MixedForm, Tau3Form::PureGForm] {
            worst = worst.max((tau3_sq_linear(&table, form)? - tau * tau).abs());
        }
    }
    checks.push(check("linear_equivalence", worst, 1e-8));

    let mut worst = 0.0f64;
    for trial in 0..10 {
        let chi = PureState::random(3, &mut rng);
        let moved = apply_local(&chi, &random_local_sl(3, trial))?;
        let (a, b) = (tangle_polynomial(&chi)?, tangle_polynomial(&moved)?);
        worst = worst.max((a - b).norm() / a.norm().max(1e-300));
        let phi = PureState::random(2, &mut rng);
        let moved = apply_local(&phi, &random_local_sl(2, 100 + trial))?;
        let (a, b) = (concurrence_polynomial(&phi)?, concurrence_polynomial(&moved)?);
        worst = worst.max((a - b).norm() / a.norm().max(1e-300));
    }
    checks.push(check("sl_invariance", worst, 1e-8));

    let (scale, residual) = p_minus_proportionality();
    checks.push(check("lift_sigma_y_is_twice_p_minus", (scale - 2.0).abs() + residual, 1e-12));

    let refs = [
        (three_tangle(&PureState::ghz(3))? - 1.0).abs(),
        three_tangle(&PureState::w(3))?.abs(),
        (concurrence(&PureState::bell())? - 1.0).abs(),
    ];
    checks.push(check("reference_values", refs.iter().cloned().fold(0.0, f64::max), 1e-10));
    let c = concurrence(&PureState::bell())?;
    checks.push(check("n_tangle_bell", (n_tangle(&PureState::bell())? - c * c).abs(), 1e-12));

    let rho = DensityMatrix::from_pure(&PureState::ghz(3));
    let a = sample_table(&rho, &PauliString::all(3), 1000, 5)?;
    let b = sample_table(&rho, &PauliString::all(3), 1000, 5)?;
    let back = CorrelatorTable::read_csv(a.to_csv_string().as_bytes(), "selftest")?;
    checks.push(Check {
        name: "sampling_determinism_and_csv".into(),
        passed: a == b && back.to_csv_string() == a.to_csv_string(),
        detail: "same seed, same table; CSV round trip".into(),
    });

    let s = NoiseScenario::simple(2, 1.0)?;
    let anchors = [
        (threshold_epsilon(&s) - 0.5).abs(),
        (threshold_epsilon(&NoiseScenario::simple(8, 1.0 / 7.0)?) - 0.5).abs(),
        (deviation_bound(1.0, &s, 0.04, Regime::Dominant) + 1.0).abs(),
        (deviation_bound(1.0, &s, 0.08, Regime::Crossover) + 1.0).abs(),
    ];
    checks.push(check("noise_formula_anchors", anchors.iter().cloned().fold(0.0, f64::max), 1e-15));

    let pure = roof_upper_bound(&rho, 4, 4, 1)?;
    let half = roof_upper_bound(&ghzw_mixture(0.5)?, 4, 20, 1)?;
    checks.push(Check {
        name: "roof_pure_and_vanishing".into(),
        passed: (pure.upper_bound - 1.0).abs() < 1e-6 && half.upper_bound < 1e-3,
        detail: format!("GHZ bound {}, GHZ-W(0.5) bound {}", pure.upper_bound, half.upper_bound),
    });

    let mut written = Vec::new();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        for (name, text) in artifacts()? {
            std::fs::write(dir.join(&name), text)?;
            written.push(name);
        }
    }
    Ok(SelftestResult {
        checks,
        artifacts: written,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelledOracle {
    pub label: String,
    pub report: OracleReport,
}

/// Oracle verdicts for Bell, GHZ, W and 20 seeded random states of two and
/// of three qubits.
pub fn noise_oracle_reports() -> Result<Vec<LabelledOracle>> {
    let mut states = vec![
        ("bell".to_string(), PureState::bell(), OracleTarget::C2),
        ("ghz".to_string(), PureState::ghz(3), OracleTarget::Tau3),
        ("w".to_string(), PureState::w(3), OracleTarget::Tau3),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..20 {
        states.push((format!("random2_{k:02}"), PureState::random(2, &mut rng), OracleTarget::C2));
    }
    for k in 0..20 {
        states.push((format!("random3_{k:02}"), PureState::random(3, &mut rng), OracleTarget::Tau3));
    }
    states
        .into_iter()
        .map(|(label, psi, target)| Ok(LabelledOracle { label, report: first_order_oracle(&psi, target)? }))
        .collect()
}

/// File name and contents of every regression artifact.
pub fn artifacts() -> Result<Vec<(String, String)>> {
    let pretty = |v: &serde_json::Value| serde_json::to_string_pretty(v).expect("json") + "\n";
    let reports = noise_oracle_reports()?;
    let n_matched = reports.iter().filter(|r| !r.report.matched.is_empty()).count();
    let oracle = json!({
        "default_pair_convention": PairConvention::default().as_str(),
        "states": reports.len(),
        "states_with_a_matching_variant": n_matched,
        "reports": reports,
    });

    let (scale, residual) = p_minus_proportionality();
    let (l0, r0) = p_plus_identity_check(&PureState::basis(1, 0))?;
    let ghzw = ghzw_constants();
    let constants = json!({
        "lift_sigma_y_over_p_minus": scale,
        "lift_sigma_y_residual": residual,
        "p_plus_rhs_over_lhs": r0 / l0,
        "ghzw_p1": ghzw.p1,
        "ghzw_delta": ghzw.delta,
        "derived_g_0000": g_tensor(GProvenance::Derived).get(0, 0, 0, 0),
    });

    Ok(vec![
        ("g_tensor_derived.csv".into(), g_tensor(GProvenance::Derived).to_csv()),
        ("g_tensor_closed_form.csv".into(), g_tensor(GProvenance::ClosedForm).to_csv()),
        ("g_tensor_diff.json".into(), pretty(&serde_json::to_value(g_tensor_diff()).expect("json"))),
        ("noise_oracle_report.json".into(), pretty(&oracle)),
        ("constants.json".into(), pretty(&constants)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        let r = run_selftest(None).unwrap();
        for c in &r.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
