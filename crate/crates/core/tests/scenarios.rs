use padic_kinetics::oracle::DENSE_STATE_CAP;
use padic_kinetics::scenario::{run_oracle_compare, run_protein_scenario, RateLabeling, ScenarioConfig};
use padic_kinetics::spectral::EigenlevelConvention;
use padic_kinetics::Error;

fn quick_oracle_config() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::protein_default();
    cfg.oracle.paths = 100_000;
    cfg.grid = padic_kinetics::scenario::GridSpec::Linear { points: 51 };
    cfg
}

#[test]
fn oracle_compare_passes_on_protein_model() {
    let report = run_oracle_compare(&quick_oracle_config()).unwrap();
    assert!(report.passed(), "{:?}", report.failures());
    assert_eq!(report.checks.len(), 4);
    assert_eq!(report.bundle.summary["eigen"]["detected_convention"], serde_json::json!("support_scale"));
}

#[test]
fn corrupted_convention_is_a_breach() {
    let mut cfg = quick_oracle_config();
    cfg.oracle.paths = 0;
    cfg.oracle.eigenlevel_convention = EigenlevelConvention::Shifted;
    let report = run_oracle_compare(&cfg).unwrap();
    assert!(!report.passed());
    assert!(report.failures().iter().any(|c| c.name.contains("eigenvalues")));
}

#[test]
fn dense_cap_is_enforced() {
    let mut cfg = quick_oracle_config();
    cfg.oracle.depth = 7;
    assert!(2 * 3usize.pow(7) > DENSE_STATE_CAP);
    assert!(matches!(run_oracle_compare(&cfg), Err(Error::Usage(_))));
}

#[test]
fn verbatim_labeling_loses_the_whiplash() {
    let mut cfg = ScenarioConfig::protein_default();
    cfg.rate_labeling = RateLabeling::Verbatim;
    let report = run_protein_scenario(&cfg).unwrap();
    let p1 = report.bundle.table("protein_p1.csv").unwrap();
    let closed = p1.column("p1_closed").unwrap();
    let trotter = p1.column("p1_trotter").unwrap();
    // The literal symbol placement tracks the other basin.
    assert!(closed.iter().zip(&trotter).skip(1).any(|(c, t)| (c - t).abs() > 0.1));
    assert!(report.checks.iter().any(|c| c.name.contains("interior minimum") && !c.passed));
}

#[test]
fn bundles_are_reproducible_on_disk() {
    let cfg = ScenarioConfig::protein_default();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let fa = run_protein_scenario(&cfg).unwrap().bundle.write(a.path()).unwrap();
    let fb = run_protein_scenario(&cfg).unwrap().bundle.write(b.path()).unwrap();
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{}", x.display());
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.path().join("protein.json")).unwrap()).unwrap();
    let embedded: ScenarioConfig = serde_json::from_value(manifest["config"].clone()).unwrap();
    assert_eq!(embedded, cfg);
    assert!(manifest["version"].as_str().unwrap().starts_with("padic-kinetics "));
}

#[test]
fn glass_csv_contract() {
    let mut cfg = ScenarioConfig::glass_default();
    cfg.glass_sweep.as_mut().unwrap().targets_k = vec![250.0];
    cfg.control_temperatures_k.clear();
    let report = padic_kinetics::scenario::run_glass_scenario(&cfg).unwrap();
    let (name, table) = &report.bundle.tables[0];
    assert_eq!(name, "glass_T250K.csv");
    assert_eq!(table.columns, ["t_s", "T_K", "p1_closed", "p1_trotter", "S"]);
    let t = table.column("T_K").unwrap();
    assert_eq!(t[0], 300.0);
    assert_eq!(*t.last().unwrap(), 250.0);
}
