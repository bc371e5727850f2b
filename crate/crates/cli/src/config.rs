//! JSON configuration files.
//!
//! Every key of [`UniverseConfig`] is optional and falls back to its default;
//! unknown keys are rejected. A distribution is written as
//! `{"kind": "uniform", "low": 0.0, "high": 1.0}`, `{"kind": "constant", "value": 1.0}`
//! or `{"kind": "bernoulli", "p": 0.5}`.

use std::fs;
use std::path::Path;

use regsel_core::UniverseConfig;

use crate::error::CliError;

pub fn parse_config(path: &Path) -> Result<UniverseConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_str(&text).map_err(|e| match e {
        CliError::Parse { source, .. } => CliError::Parse {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

pub fn parse_config_str(text: &str) -> Result<UniverseConfig, CliError> {
    let config: UniverseConfig = serde_json::from_str(text).map_err(|source| CliError::Parse {
        path: "<config>".into(),
        source,
    })?;
    config.validate()?;
    Ok(config)
}

/// Pretty JSON of the effective configuration, defaults included.
pub fn echo_config(config: &UniverseConfig) -> String {
    let mut text = serde_json::to_string_pretty(config).expect("config serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use regsel_core::{DistributionSpec, EnergyMode};

    #[test]
    fn empty_document_is_all_defaults() {
        let cfg = parse_config_str("{}").unwrap();
        assert_eq!(cfg, UniverseConfig::default());
        assert_eq!(cfg.n_systems, 100);
        assert_eq!(cfg.steps, 500);
    }

    #[test]
    fn zero_systems_is_a_validation_error() {
        match parse_config_str(r#"{"n_systems": 0}"#) {
            Err(CliError::Core(regsel_core::Error::Config { field, .. })) => {
                assert_eq!(field, "n_systems")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = parse_config_str(r#"{"n_sytems": 5}"#).unwrap_err();
        assert!(err.to_string().contains("n_sytems"), "{err}");
        let err = parse_config_str(
            r#"{"dist_tau": {"kind": "uniform", "low": 0, "high": 1, "mid": 0.5}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("mid"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_config_str("{\n  \"steps\": 10,\n  oops\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn explicit_fields_override_defaults() {
        let cfg = parse_config_str(
            r#"{"energy_mode": "budget", "energy_quantum": 0.5,
                "dist_delta": {"kind": "constant", "value": 0.9}, "seed": 17}"#,
        )
        .unwrap();
        assert_eq!(cfg.energy_mode, EnergyMode::Budget);
        assert_eq!(cfg.energy_quantum, 0.5);
        assert_eq!(cfg.dist_delta, DistributionSpec::Constant { value: 0.9 });
        assert_eq!(cfg.seed, 17);
        assert_eq!(cfg.steps, 500);
    }

    fn arb_spec() -> impl Strategy<Value = DistributionSpec> {
        prop_oneof![
            (-10.0f64..10.0).prop_map(|value| DistributionSpec::Constant { value }),
            (-10.0f64..10.0, 0.0f64..5.0)
                .prop_map(|(low, w)| DistributionSpec::Uniform { low, high: low + w }),
            (0.0f64..=1.0).prop_map(|p| DistributionSpec::Bernoulli { p }),
        ]
    }

    proptest! {
        #[test]
        fn echo_round_trips(
            n in 1usize..1000,
            steps in 0u64..5000,
            dt in 0.01f64..10.0,
            seed in any::<u64>(),
            budget in any::<bool>(),
            quantum in 0.01f64..5.0,
            delta in arb_spec(),
            drift in arb_spec(),
            snaps in prop::collection::vec(0u64..1000, 0..5),
        ) {
            let cfg = UniverseConfig {
                n_systems: n,
                steps,
                dt,
                seed,
                energy_mode: if budget { EnergyMode::Budget } else { EnergyMode::Unbounded },
                energy_quantum: quantum,
                dist_delta: delta,
                dist_drift: drift,
                snapshot_steps: snaps,
                ..Default::default()
            };
            let echoed = echo_config(&cfg);
            let back = parse_config_str(&echoed).unwrap();
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(echo_config(&back), echoed);
        }
    }
}
