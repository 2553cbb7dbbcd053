use mpflow::cases::{builtin, CASES};
use mpflow::config::CaseConfig;

#[test]
fn every_builtin_round_trips_through_toml() {
    for (name, _) in CASES {
        let cfg = builtin(name).unwrap();
        let text = cfg.to_toml().unwrap();
        let back = CaseConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, cfg, "{name}");
    }
}

#[test]
fn load_from_file() {
    let cfg = builtin("shock_tube").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("case.toml");
    std::fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    assert_eq!(CaseConfig::load(&path).unwrap(), cfg);
}

#[test]
fn unknown_case_is_a_config_error() {
    let err = builtin("no_such_case").unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn validation_rejects_bad_settings() {
    let mut cfg = builtin("shock_tube").unwrap();
    cfg.solver.cfl = 0.0;
    assert!(cfg.validate().is_err());

    let mut cfg = builtin("shock_tube").unwrap();
    cfg.epsilon = 0.6;
    assert!(cfg.validate().is_err());

    let mut cfg = builtin("shock_tube").unwrap();
    cfg.solver.max_temperature_change = -1.0;
    assert!(cfg.validate().is_err());

    let mut cfg = builtin("shock_tube").unwrap();
    cfg.domain.cells = vec![0];
    assert!(cfg.validate().is_err());
}

#[test]
fn malformed_toml_is_reported() {
    let err = CaseConfig::from_toml_str("name = ").unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn with_cells_keeps_aspect_ratio() {
    let cfg = builtin("triple_point").unwrap().with_cells(140);
    assert_eq!(cfg.domain.cells, vec![140, 60]);
}
