mod common;

use common::{json_close, read_data};
use slocc::roof::{ghzw_mixture, roof_upper_bound};
use slocc::selftest::artifacts;

#[test]
fn artifacts_match_pinned_files() {
    for (name, contents) in artifacts().unwrap() {
        let pinned = read_data(&name);
        if name.ends_with(".json") {
            let a: serde_json::Value = serde_json::from_str(&contents).unwrap();
            let b: serde_json::Value = serde_json::from_str(&pinned).unwrap();
            json_close(&a, &b, 1e-9, &name).unwrap();
        } else {
            assert_eq!(contents, pinned, "{name}");
        }
    }
}

#[test]
fn pinned_oracle_slopes() {
    let report: serde_json::Value = serde_json::from_str(&read_data("noise_oracle_report.json")).unwrap();
    assert_eq!(report["states"], 43);
    assert_eq!(report["states_with_a_matching_variant"], 0);
    assert_eq!(report["default_pair_convention"], "unordered_pairs");
    let slope = |label: &str| {
        report["reports"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["label"] == label)
            .unwrap()["report"]["slope_numeric"]
            .as_f64()
            .unwrap()
    };
    assert!((slope("bell") + 1.5).abs() < 1e-8);
    assert!((slope("ghz") + 3.5).abs() < 1e-8);
    assert!((slope("w") - 0.2962962962962963).abs() < 1e-6);
}

#[test]
fn pinned_constants() {
    let c: serde_json::Value = serde_json::from_str(&read_data("constants.json")).unwrap();
    let text = c.to_string();
    assert!(text.contains("0.70868250309"), "{text}");
    assert!(text.contains("1.21634043717"), "{text}");
}

#[test]
fn pinned_ghzw_roof_at_one_tenth() {
    let r = roof_upper_bound(&ghzw_mixture(0.1).unwrap(), 4, 16, 2).unwrap();
    assert!((r.upper_bound - 0.7302007852620043).abs() < 1e-6, "{}", r.upper_bound);
    assert!((r.eigen_bound - 0.9).abs() < 1e-12);
}
