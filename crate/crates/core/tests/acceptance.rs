//! One test per acceptance criterion. Run with `--nocapture` to see the
//! pass/fail lines.

mod common;

use std::time::Instant;

use common::{json_close, read_data, report, verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slocc::antilinear::{
    comb_value_o1, comb_value_o2, concurrence, concurrence_polynomial, n_tangle, tangle_polynomial, three_tangle,
};
use slocc::correlator::{exact_correlators, invariant_from_table, sample_table, InvariantKind};
use slocc::lift::{concurrence_sq_linear, g_tensor, p_minus_polynomial, p_plus_polynomial, tau3_sq_linear, GProvenance, Tau3Form};
use slocc::noise::{deviation_bound, threshold_epsilon, NoiseScenario, Regime, ORACLE_STABILITY};
use slocc::qubit::{apply_local, sample_local_group, DensityMatrix, GroupKind, PauliString, PureState};
use slocc::roof::{eps_grid, roof_upper_bound, vanish_threshold_scan, Family};
use slocc::selftest::{artifacts, noise_oracle_reports};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn criterion_01_linear_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_c, mut worst_t) = (0.0f64, 0.0f64);
    let n = 250;
    for _ in 0..n {
        let phi = PureState::random(2, &mut rng);
        let c = concurrence(&phi).unwrap();
        let lin = concurrence_sq_linear(&exact_correlators(&phi, &PauliString::all(2)).unwrap()).unwrap();
        worst_c = worst_c.max((lin - c * c).abs());

        let chi = PureState::random(3, &mut rng);
        let tau = three_tangle(&chi).unwrap();
        let table = exact_correlators(&chi, &PauliString::all(3)).unwrap();
        for form in [Tau3Form::MixedForm, Tau3Form::PureGForm] {
            worst_t = worst_t.max((tau3_sq_linear(&table, form).unwrap() - tau * tau).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "1",
        "linear forms equal antilinear invariants",
        worst_c <= 1e-8 && worst_t <= 1e-8 && secs <= 10.0,
        &format!("{n} states, max |ΔC²| {worst_c:.1e}, max |Δτ₃²| {worst_t:.1e} (both forms), {secs:.2} s"),
    );
}

#[test]
fn criterion_02_comb_nullity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let worst = (0..1000)
        .map(|_| {
            let phi = PureState::random(1, &mut rng);
            comb_value_o1(&phi).unwrap().norm().max(comb_value_o2(&phi).unwrap().norm())
        })
        .fold(0.0, f64::max);
    verdict("2", "comb nullity", worst <= 1e-12, &format!("1000 states, max |comb| {worst:.1e}"));
}

#[test]
fn criterion_03_sl_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for trial in 0..50u64 {
        let ops3: Vec<_> = (0..3).map(|q| sample_local_group(GroupKind::SL2C, 1000 + 3 * trial + q)).collect();
        let chi = PureState::random(3, &mut rng);
        let moved = apply_local(&chi, &ops3).unwrap();
        let (a, b) = (tangle_polynomial(&chi).unwrap(), tangle_polynomial(&moved).unwrap());
        worst = worst.max((a - b).norm() / a.norm());

        let ops2 = &ops3[..2];
        let phi = PureState::random(2, &mut rng);
        let moved = apply_local(&phi, ops2).unwrap();
        let (a, b) = (concurrence_polynomial(&phi).unwrap(), concurrence_polynomial(&moved).unwrap());
        worst = worst.max((a - b).norm() / a.norm());
        worst = worst.max(rel(p_minus_polynomial(&phi).unwrap(), p_minus_polynomial(&moved).unwrap()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let max_change = (0..20u64)
        .map(|trial| {
            let ops: Vec<_> = (0..2).map(|q| sample_local_group(GroupKind::SL2C, 5000 + 2 * trial + q)).collect();
            let phi = PureState::random(2, &mut rng);
            let moved = apply_local(&phi, &ops).unwrap();
            rel(p_plus_polynomial(&phi).unwrap(), p_plus_polynomial(&moved).unwrap())
        })
        .fold(0.0, f64::max);
    verdict(
        "3",
        "local SL invariance",
        worst <= 1e-8 && max_change > 1e-3,
        &format!("50 transforms, max relative drift {worst:.1e}; P₊ quantity max relative change {max_change:.2} over 20 trials"),
    );
}

#[test]
fn criterion_04_g_tensor() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = g_tensor(GProvenance::Derived);
    let worst = (0..200)
        .map(|_| {
            let chi = PureState::random(3, &mut rng);
            let tau = three_tangle(&chi).unwrap();
            let t = exact_correlators(&chi, &PauliString::all(3)).unwrap();
            (tau3_sq_linear(&t, Tau3Form::PureGForm).unwrap() - tau * tau).abs()
        })
        .fold(0.0, f64::max);
    let mut pinned = true;
    let mut diff_summary = String::new();
    for (name, text) in artifacts().unwrap() {
        if !name.starts_with("g_tensor") {
            continue;
        }
        let stored = read_data(&name);
        let same = if name.ends_with(".json") {
            let (a, b) = (serde_json::from_str(&text).unwrap(), serde_json::from_str(&stored).unwrap());
            json_close(&a, &b, 1e-12, &name).is_ok()
        } else {
            text == stored
        };
        pinned &= same;
        if name == "g_tensor_diff.json" {
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            diff_summary = format!(
                "closed form differs in {} of 256 entries (max {})",
                v["n_differing"], v["max_abs_diff"]
            );
        }
    }
    verdict(
        "4",
        "derived 𝔊 tensor and pinned diff report",
        worst <= 1e-8 && pinned && g.provenance() == GProvenance::Derived,
        &format!("pure-𝔊 form max |Δτ₃²| {worst:.1e}; artifacts match pinned files: {pinned}; {diff_summary}"),
    );
}

#[test]
fn criterion_05_reference_values() {
    let ghz = three_tangle(&PureState::ghz(3)).unwrap();
    let w = three_tangle(&PureState::w(3)).unwrap();
    let c = concurrence(&PureState::bell()).unwrap();
    let nt = n_tangle(&PureState::bell()).unwrap();
    let ok = (ghz - 1.0).abs() <= 1e-10 && w.abs() <= 1e-10 && (c - 1.0).abs() <= 1e-10 && (nt - c * c).abs() <= 1e-12;
    verdict(
        "5",
        "reference values",
        ok,
        &format!("τ₃(GHZ) = {ghz}, τ₃(W) = {w:e}, C(Bell) = {c}, n_tangle(Bell) − C² = {:e}", nt - c * c),
    );
}

#[test]
fn criterion_06_ghzw_roof_threshold() {
    let start = Instant::now();
    let grid = eps_grid(0.0, 1.0, 0.01).unwrap();
    let scan = vanish_threshold_scan(Family::Ghzw, &grid, 4, 200, 6).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let threshold = scan.threshold;
    let ok = threshold.is_some_and(|t| (0.35..=0.41).contains(&t)) && secs <= 300.0;
    verdict(
        "6",
        "GHZ–W roof threshold",
        ok,
        &format!("threshold {threshold:?} (window [0.35, 0.41]), 101 grid points × 200 restarts, {secs:.1} s"),
    );
}

#[test]
fn criterion_07_white_noise_roof_probe() {
    let start = Instant::now();
    let rho = Family::WhiteNoise.state(0.30).unwrap();
    let res = roof_upper_bound(&rho, 12, 500, 7).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ok = res.upper_bound < 1e-2 && secs <= 900.0;
    let detail = format!(
        "bound {:.3e} at ε = 0.30 with m = 12, {} restarts, {secs:.1} s",
        res.upper_bound, res.restarts_used
    );
    if ok {
        verdict("7", "white-noise roof probe", true, &detail);
    } else {
        report(&format!("criterion 7 [WARN] white-noise roof probe (best effort): {detail}"));
    }
}

#[test]
fn criterion_08_noise_oracle() {
    let reports = noise_oracle_reports().unwrap();
    let stable = reports.iter().all(|r| {
        let (a, b) = (r.report.slope_numeric, r.report.slope_previous_step);
        (a - b).abs() <= ORACLE_STABILITY * a.abs().max(b.abs()) + 1e-9
    });
    let stored: serde_json::Value = serde_json::from_str(&read_data("noise_oracle_report.json")).unwrap();
    let fresh = serde_json::to_value(&reports).unwrap();
    let pinned = json_close(&fresh, &stored["reports"], 1e-9, "reports");
    let matched = reports.iter().filter(|r| !r.report.matched.is_empty()).count();

    let s = NoiseScenario::simple(2, 1.0).unwrap();
    let s8 = NoiseScenario::simple(8, 1.0 / 7.0).unwrap();
    let s_r = NoiseScenario::simple(5, 0.25).unwrap();
    let anchors = threshold_epsilon(&s) == 0.5
        && threshold_epsilon(&s8) == 0.5
        && threshold_epsilon(&s_r) == 0.5
        && deviation_bound(1.0, &s, 0.04, Regime::Dominant) == -1.0
        && deviation_bound(1.0, &s, 0.08, Regime::Crossover) == -1.0
        && deviation_bound(1.0, &s8, 0.5, Regime::Dominant) + 0.5 == -0.5 * 24.0;
    verdict(
        "8",
        "noise-formula oracle",
        stable && pinned.is_ok() && anchors && reports.len() == 43,
        &format!(
            "{} states, slopes stable: {stable}, pinned: {}, states with a matching printed variant: {matched}, anchors exact: {anchors}",
            reports.len(),
            pinned.err().unwrap_or_else(|| "yes".into())
        ),
    );
}

fn rms_ratios(rho: &DensityMatrix, exact: f64, seeds: u64) -> Vec<f64> {
    [100u64, 1_000, 10_000, 100_000]
        .iter()
        .map(|&shots| {
            let ms: f64 = (0..seeds)
                .map(|seed| {
                    let t = sample_table(rho, &PauliString::all(3), shots, seed).unwrap();
                    (invariant_from_table(&t, InvariantKind::Tau3Sq).unwrap().value - exact).powi(2)
                })
                .sum::<f64>()
                / seeds as f64;
            ms.sqrt() * (shots as f64).sqrt()
        })
        .collect()
}

#[test]
fn criterion_09_shot_simulation() {
    let ghz = DensityMatrix::from_pure(&PureState::ghz(3));
    let within = (0..100)
        .filter(|&seed| {
            let t = sample_table(&ghz, &PauliString::all(3), 100_000, seed).unwrap();
            (invariant_from_table(&t, InvariantKind::Tau3Sq).unwrap().value - 1.0).abs() < 0.05
        })
        .count();

    let chi = PureState::random(3, &mut ChaCha8Rng::seed_from_u64(3));
    let tau = three_tangle(&chi).unwrap();
    let generic = rms_ratios(&DensityMatrix::from_pure(&chi), tau * tau, 50);
    let spread = |r: &[f64]| r.iter().cloned().fold(0.0, f64::max) / r.iter().cloned().fold(f64::INFINITY, f64::min);
    let generic_ok = spread(&generic) <= 4.0;

    let ghz_ratios = rms_ratios(&ghz, 1.0, 50);
    let ghz_below = ghz_ratios.iter().all(|&r| r <= 2.0);
    report(&format!(
        "criterion 9 [INFO] GHZ rms·√shots {:?}: below 2/√shots everywhere ({ghz_below}); the error falls as 1/shots because \
         the first-order term vanishes at GHZ",
        ghz_ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()
    ));
    verdict(
        "9",
        "shot simulation",
        within >= 95 && generic_ok && ghz_below,
        &format!(
            "GHZ within 0.05 in {within}/100 seeds; generic-state rms·√shots {:?} (spread {:.2} ≤ 4 ⇔ within 2× of c/√shots)",
            generic.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>(),
            spread(&generic)
        ),
    );
}

#[test]
fn criterion_10_determinism() {
    let ghz = common::data("ghz.json").display().to_string();
    let commands: Vec<Vec<String>> = vec![
        vec!["simulate", "--state", &ghz, "--invariant", "tau3", "--shots", "1000", "--seed", "7"],
        vec!["correlators", "--state", &ghz, "--shots", "500", "--seed", "3"],
        vec!["roof", "--family", "ghzw", "--eps", "0.2", "--restarts", "16", "--seed", "5"],
        vec!["noise-curve", "--state", &ghz, "--eps-grid", "0:0.2:0.1"],
    ]
    .into_iter()
    .map(|c| c.into_iter().map(String::from).collect())
    .collect();
    let mut identical = true;
    for c in &commands {
        let argv: Vec<String> = ["slocc", "--json", "--deterministic"].iter().map(|s| s.to_string()).chain(c.clone()).collect();
        let a = slocc::cli::run(argv.clone());
        let b = slocc::cli::run(argv);
        identical &= a.code == 0 && a.stdout == b.stdout && !a.stdout.contains("duration");
    }
    verdict(
        "10",
        "deterministic reports",
        identical,
        &format!("{} subcommands run twice with --json --deterministic: byte-identical {identical}", commands.len()),
    );
}
