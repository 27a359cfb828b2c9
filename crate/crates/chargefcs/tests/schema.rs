//! Golden files for the CSV layout. Regenerate deliberately and bump
//! `SCHEMA_VERSION` when a change is intended.

use std::process::Command;

use chargefcs::config::{ExperimentSpec, Mu, ParamsSpec};
use chargefcs::engines::execute;
use chargefcs::{EngineKind, Pool};

fn schema_text() -> String {
    let mut all = String::new();
    for e in EngineKind::ALL {
        let out = Command::new(env!("CARGO_BIN_EXE_chargefcs"))
            .args(["schema", e.name()])
            .output()
            .unwrap();
        assert!(out.status.success());
        all.push_str(&String::from_utf8(out.stdout).unwrap());
    }
    all
}

#[test]
fn schema_matches_golden() {
    assert_eq!(schema_text(), include_str!("golden/schema.txt"));
}

#[test]
fn analytic_csv_matches_golden() {
    let mut spec = ExperimentSpec::new(
        EngineKind::Analytic,
        ParamsSpec {
            mu: Mu(chargefcs_core::ChemicalPotential::Finite(0.1)),
            ..Default::default()
        },
    );
    spec.options.t_list = vec![25];
    spec.options.lambda_grid = vec![-1.0, 0.5];
    spec.options.d_list = vec![2.0];
    let bytes = execute(&spec.resolve().unwrap(), &Pool::new(1).unwrap())
        .unwrap()
        .to_csv_bytes()
        .unwrap();
    assert_eq!(String::from_utf8(bytes).unwrap(), include_str!("golden/analytic_small.csv"));
}
