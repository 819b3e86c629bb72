use std::fs;
use std::path::{Path, PathBuf};

use rcia_core::channel::{BcConfig, IcConfig, Network, NoiseMode};
use rcia_core::regions::unequal_class_violation;
use rcia_core::schemes::{
    build_point_to_point, build_rcia_bc, build_rcia_equal_n, build_rcia_unequal, build_silent, Schedule,
};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_BLOCKS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Ic,
    Bc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    NoiseFree,
    Noisy,
}

/// Simulation scenario as read from a JSON config file; every field can be
/// overridden on the command line.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: Option<Model>,
    pub antennas: Option<Vec<usize>>,
    pub scheme: Option<String>,
    pub blocks: Option<usize>,
    pub mode: Option<ModeName>,
    pub power_db: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

pub fn network_from(model: Model, antennas: &[usize]) -> Result<Network, CliError> {
    let bad = |e: rcia_core::channel::ChannelError| CliError::Config(e.to_string());
    match (model, antennas) {
        (Model::Ic, &[m1, m2, n1, n2]) => Ok(Network::Ic(IcConfig::new(m1, m2, n1, n2).map_err(bad)?)),
        (Model::Bc, &[m, n1, n2]) => Ok(Network::Bc(BcConfig::new(m, n1, n2).map_err(bad)?)),
        (Model::Ic, a) => Err(CliError::Config(format!("IC needs 4 antenna counts, got {}", a.len()))),
        (Model::Bc, a) => Err(CliError::Config(format!("BC needs 3 antenna counts, got {}", a.len()))),
    }
}

/// Picks the schedule for `network`: a named builder, a schedule file
/// (`*.json`), or `rcia` for the cooperative scheme matching the antennas.
pub fn select_schedule(network: Option<Network>, scheme: &str, blocks: Option<usize>) -> Result<Schedule, CliError> {
    let cfg = |e: rcia_core::schemes::SchemeError| CliError::Config(e.to_string());
    if scheme.ends_with(".json") {
        let text = fs::read_to_string(scheme).map_err(|e| CliError::Io(format!("{scheme}: {e}")))?;
        let s = Schedule::from_json(&text).map_err(cfg)?;
        if let Some(n) = network {
            if n != s.network {
                return Err(CliError::Config(format!("{scheme} is written for a different network")));
            }
        }
        return Ok(s);
    }
    if scheme == "point-to-point" {
        return Ok(build_point_to_point());
    }
    let network = network.ok_or_else(|| CliError::Config("an antenna configuration (--ic or --bc) is required".into()))?;
    match (scheme, network) {
        ("silent", n) => build_silent(n, blocks.unwrap_or(1)).map_err(cfg),
        ("equal-n", Network::Ic(c)) => {
            if c.n1 != c.n2 {
                return Err(CliError::Config(format!("equal-n needs N1 = N2, got N1={} N2={}", c.n1, c.n2)));
            }
            build_rcia_equal_n(c.m1, c.m2, c.n1).map_err(cfg)
        }
        ("unequal", Network::Ic(c)) => build_rcia_unequal(c.m1, c.m2, c.n1, c.n2, blocks.unwrap_or(DEFAULT_BLOCKS)).map_err(cfg),
        ("bc", Network::Bc(c)) => {
            if c.n1 != c.n2 {
                return Err(CliError::Config(format!("bc scheme needs N1 = N2, got N1={} N2={}", c.n1, c.n2)));
            }
            build_rcia_bc(c.m, c.n1).map_err(cfg)
        }
        ("rcia", Network::Ic(c)) => {
            if c.n1 == c.n2 && c.m1 > c.n1 && c.m2 > c.n1 {
                build_rcia_equal_n(c.m1, c.m2, c.n1).map_err(cfg)
            } else if unequal_class_violation(c.m1, c.m2, c.n1, c.n2).is_none() {
                build_rcia_unequal(c.m1, c.m2, c.n1, c.n2, blocks.unwrap_or(DEFAULT_BLOCKS)).map_err(cfg)
            } else {
                Err(CliError::Config(format!(
                    "no cooperative scheme for IC ({},{},{},{}): needs N1 = N2 < min(M1, M2), or M1 > N1 > N2 >= 2 M2 with M1+M2 = N1+N2",
                    c.m1, c.m2, c.n1, c.n2
                )))
            }
        }
        ("rcia", Network::Bc(c)) => {
            if c.n1 == c.n2 && c.m > c.n1 {
                build_rcia_bc(c.m, c.n1).map_err(cfg)
            } else {
                Err(CliError::Config(format!(
                    "no cooperative scheme for BC ({},{},{}): needs N1 = N2 < M",
                    c.m, c.n1, c.n2
                )))
            }
        }
        (name @ ("equal-n" | "unequal" | "bc"), n) => Err(CliError::Config(format!("scheme {name} does not apply to {n:?}"))),
        (other, _) => Err(CliError::Config(format!(
            "unknown scheme {other:?}; expected rcia, equal-n, unequal, bc, point-to-point, silent or a .json schedule"
        ))),
    }
}

pub fn modes(mode: ModeName, power_db: &[f64]) -> Result<Vec<NoiseMode>, CliError> {
    match mode {
        ModeName::NoiseFree => Ok(vec![NoiseMode::NoiseFree]),
        ModeName::Noisy if power_db.is_empty() => Err(CliError::Config("noisy mode needs at least one --power-db".into())),
        ModeName::Noisy => power_db
            .iter()
            .map(|&db| NoiseMode::noisy_db(db).map_err(|e| CliError::Config(e.to_string())))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_scheme_selection() {
        let ic = |a: &[usize]| network_from(Model::Ic, a).unwrap();
        assert_eq!(select_schedule(Some(ic(&[2, 2, 1, 1])), "rcia", None).unwrap().total_slots(), 3);
        assert_eq!(select_schedule(Some(ic(&[4, 1, 3, 2])), "rcia", None).unwrap().total_slots(), 5);
        assert_eq!(select_schedule(Some(ic(&[4, 1, 3, 2])), "rcia", Some(4)).unwrap().total_slots(), 9);
        assert!(matches!(select_schedule(Some(ic(&[1, 1, 1, 1])), "rcia", None), Err(CliError::Config(_))));
        let bc = network_from(Model::Bc, &[2, 1, 1]).unwrap();
        assert_eq!(select_schedule(Some(bc), "rcia", None).unwrap().descriptor.name, "rcia-bc(2,1)");
        assert!(select_schedule(Some(bc), "unequal", None).is_err());
        assert!(select_schedule(None, "rcia", None).is_err());
        assert!(select_schedule(None, "point-to-point", None).is_ok());
    }

    #[test]
    fn antenna_counts_checked() {
        assert!(network_from(Model::Ic, &[1, 2, 3]).is_err());
        assert!(network_from(Model::Bc, &[0, 1, 1]).is_err());
    }

    #[test]
    fn scenario_rejects_unknown_keys() {
        let s: Result<Scenario, _> = serde_json::from_str(r#"{"model":"ic","antenas":[1,1,1,1]}"#);
        assert!(s.is_err());
        let s: Scenario = serde_json::from_str(r#"{"model":"bc","antennas":[2,1,1],"mode":"noisy","power_db":[40]}"#).unwrap();
        assert_eq!(s.model, Some(Model::Bc));
        assert_eq!(modes(s.mode.unwrap(), &s.power_db.unwrap()).unwrap().len(), 1);
        assert!(modes(ModeName::Noisy, &[]).is_err());
    }
}
