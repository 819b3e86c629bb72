use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rcia_core::analysis::{
    consistency_report, outer_bound_containment, run_trials, sample_configs,
    write_reports_csv, ConsistencyReport, ContainmentCheck, DecodabilityReport, Family,
};
use rcia_core::channel::{Network, NoiseMode};
use rcia_core::engine::{run, write_results_csv};
use rcia_core::regions::{self, write_constraints_csv, write_vertices_csv, Region2D};
use rcia_core::Rational;
use serde::Deserialize;

use crate::error::CliError;
use crate::scenario::{self, Model, ModeName, Scenario};
use crate::{Antennas, RegionArgs, SimulateArgs, VerifyArgs};

pub const DEFAULT_OUT: &str = "rcia-out";
pub const DEFAULT_SIM_TRIALS: usize = 100;
pub const DEFAULT_VERIFY_TRIALS: usize = 20;
pub const DEFAULT_VERIFY_SEED: u64 = 2026;
pub const DEFAULT_MAX_ANTENNAS: usize = 6;

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn antenna_network(a: &Antennas) -> Result<Option<Network>, CliError> {
    match (&a.ic, &a.bc) {
        (Some(ic), _) => scenario::network_from(Model::Ic, ic).map(Some),
        (None, Some(bc)) => scenario::network_from(Model::Bc, bc).map(Some),
        (None, None) => Ok(None),
    }
}

/// Builds the region named by `thm` for the given antennas.
pub fn build_region(thm: &str, network: Option<Network>) -> Result<Region2D, CliError> {
    let name = thm.trim().to_ascii_lowercase();
    let name = name.strip_prefix("thm").unwrap_or(&name);
    let network = network.ok_or_else(|| CliError::Config("an antenna configuration (--ic or --bc) is required".into()))?;
    let need_ic = || CliError::Config(format!("region {thm} is defined for the IC; pass --ic M1 M2 N1 N2"));
    let need_bc = || CliError::Config(format!("region {thm} is defined for the BC; pass --bc M N1 N2"));
    let region = match (name, network) {
        ("1", Network::Ic(c)) => regions::outer_bc_type_ic(c.n1, c.n2)?,
        ("2", Network::Ic(c)) => regions::outer_ic_type_ic(c.m1, c.m2, c.n1, c.n2)?,
        ("5", Network::Ic(c)) => {
            if c.n1 != c.n2 {
                return Err(CliError::Config(format!("thm5 needs N1 = N2, got N1={} N2={}", c.n1, c.n2)));
            }
            regions::region_ic_rx_coop_equal_n(c.m1, c.m2, c.n1)?
        }
        ("6", Network::Ic(c)) => regions::region_ic_rx_coop_unequal(c.m1, c.m2, c.n1, c.n2)?,
        ("perfect-csit", Network::Ic(c)) => regions::region_ic_perfect_csit(c.m1, c.m2, c.n1, c.n2)?,
        ("3", Network::Bc(c)) => regions::outer_bc_type_bc(c.m, c.n1, c.n2)?,
        ("4", Network::Bc(c)) => regions::outer_crc_type_bc(c.m, c.n1, c.n2)?,
        ("7", Network::Bc(c)) => {
            if c.n1 != c.n2 {
                return Err(CliError::Config(format!("thm7 needs N1 = N2, got N1={} N2={}", c.n1, c.n2)));
            }
            regions::region_bc_rx_coop_equal_n(c.m, c.n1)?
        }
        ("1" | "2" | "5" | "6" | "perfect-csit", Network::Bc(_)) => return Err(need_ic()),
        ("3" | "4" | "7", Network::Ic(_)) => return Err(need_bc()),
        _ => {
            return Err(CliError::Config(format!(
                "unknown region {thm:?}; expected 1..7, thm1..thm7 or perfect-csit"
            )))
        }
    };
    Ok(region)
}

pub fn region(args: &RegionArgs) -> Result<(), CliError> {
    let region = build_region(&args.thm, antenna_network(&args.antennas)?)?;
    print!("{}", region.to_text()?);
    if let Some(dir) = &args.out {
        ensure_dir(dir)?;
        let c = dir.join("region_constraints.csv");
        let v = dir.join("region_vertices.csv");
        write_constraints_csv(&[&region], create(&c)?)?;
        write_vertices_csv(&[&region], create(&v)?)?;
        println!("wrote {} and {}", c.display(), v.display());
    }
    Ok(())
}

fn mode_tag(mode: &NoiseMode, db: Option<f64>) -> String {
    match (mode, db) {
        (NoiseMode::NoiseFree, _) => "noise-free".into(),
        (NoiseMode::Noisy { .. }, Some(db)) => format!("noisy {db} dB"),
        (NoiseMode::Noisy { power }, None) => format!("noisy P={power}"),
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(p) => Scenario::load(p)?,
        None => Scenario::default(),
    };
    let network = match antenna_network(&args.antennas)? {
        Some(n) => Some(n),
        None => match (file.model, &file.antennas) {
            (Some(m), Some(a)) => Some(scenario::network_from(m, a)?),
            (None, None) => None,
            _ => return Err(CliError::Config("config needs both model and antennas".into())),
        },
    };
    let scheme = args.scheme.clone().or(file.scheme).unwrap_or_else(|| "rcia".into());
    let blocks = args.blocks.or(file.blocks);
    if blocks == Some(0) {
        return Err(CliError::Config("blocks must be >= 1".into()));
    }
    let schedule = scenario::select_schedule(network, &scheme, blocks)?;
    schedule.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let mode = args.mode.or(file.mode).unwrap_or(ModeName::NoiseFree);
    let power_db = if args.power_db.is_empty() { file.power_db.unwrap_or_default() } else { args.power_db.clone() };
    let modes = scenario::modes(mode, &power_db)?;
    let trials = args.trials.or(file.trials).unwrap_or(DEFAULT_SIM_TRIALS);
    if trials == 0 {
        return Err(CliError::Config("trials must be >= 1".into()));
    }
    let seed = args.seed.or(file.seed).unwrap_or(scenario::DEFAULT_SEED);
    let out = args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    ensure_dir(&out)?;

    let mut failed = Vec::new();
    for (k, m) in modes.iter().enumerate() {
        let db = (mode == ModeName::Noisy).then(|| power_db[k]);
        let results = run_trials(&schedule, trials, seed, *m)?;
        let report = DecodabilityReport::from_results(&schedule, seed, &results);
        println!("mode {}", mode_tag(m, db));
        print!("{}", report.to_text());
        println!("success fraction {}/{}", report.successes, report.trials);
        for p in report.achieved.iter().filter(|p| **p != schedule.descriptor.claimed) {
            println!("note: achieved {p} differs from claimed {}", schedule.descriptor.claimed);
        }
        let mses: Vec<f64> = results.iter().filter_map(|r| r.symbol_mse).collect();
        if !mses.is_empty() {
            println!("mean symbol mse {:e}", mses.iter().sum::<f64>() / mses.len() as f64);
        }
        let csv_path = match db {
            Some(db) if modes.len() > 1 => out.join(format!("simulation_{db}dB.csv")),
            _ => out.join("simulation.csv"),
        };
        write_results_csv(&results, create(&csv_path)?)?;
        println!("wrote {}", csv_path.display());
        if report.successes < report.trials {
            failed.push(format!("{} under {}: {}/{} trials decoded", schedule.descriptor.name, mode_tag(m, db), report.successes, report.trials));
        }
    }
    let (transcript, _) = run(&schedule, seed, modes[0])?;
    let json = transcript.export().to_json()?;
    let tpath = out.join("transcript.json");
    fs::write(&tpath, json).map_err(|e| CliError::Io(format!("{}: {e}", tpath.display())))?;
    println!("wrote {}", tpath.display());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Decode(failed.join("; ")))
    }
}

/// Suite file accepted by `verify --config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default)]
    pub configs: Option<Vec<Family>>,
    pub sampled: Option<usize>,
    pub sample_family: Option<String>,
    pub max_antennas: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

/// Configurations checked by `verify` when no list is given.
pub fn pinned_configs() -> Vec<Family> {
    let mut v: Vec<Family> = [(2, 2, 1), (3, 3, 2), (4, 3, 2), (4, 4, 2), (5, 3, 2), (6, 4, 2)]
        .into_iter()
        .map(|(m1, m2, n)| Family::EqualN { m1, m2, n })
        .collect();
    v.push(Family::Unequal { m1: 4, m2: 1, n1: 3, n2: 2 });
    v.extend([(2, 1), (3, 2), (4, 2), (5, 2)].into_iter().map(|(m, n)| Family::Bc { m, n }));
    v
}

/// `count` sampled configurations, optionally restricted to one family.
pub fn sampled_configs(count: usize, max: usize, seed: u64, family: &str) -> Result<Vec<Family>, CliError> {
    let keep: fn(&Family) -> bool = match family {
        "all" => |_| true,
        "equal-n" => |f| matches!(f, Family::EqualN { .. }),
        "unequal" => |f| matches!(f, Family::Unequal { .. }),
        "bc" => |f| matches!(f, Family::Bc { .. }),
        other => {
            return Err(CliError::Config(format!(
                "unknown sample family {other:?}; expected all, equal-n, unequal or bc"
            )))
        }
    };
    // Draws are round-robin over the three families, so 3 * count suffices.
    Ok(sample_configs(3 * count, max, seed).into_iter().filter(keep).take(count).collect())
}

fn corrupt(report: &mut ConsistencyReport) -> Result<(), CliError> {
    report.region = report.region.scaled(Rational::from_integer(2));
    let (a, b, c, d) = report.evaluate()?;
    report.achieved_in_region = a;
    report.achieved_on_boundary = b;
    report.hull_equals_region = c;
    report.region_within_bounds = d;
    Ok(())
}

fn containment_line(c: &ContainmentCheck) -> String {
    let status = if c.contained { "PASS" } else { "FAIL" };
    let mut s = format!("{status} {} within {}", c.region, c.bound);
    if !c.violations.is_empty() {
        let pts: Vec<String> = c.violations.iter().map(|p| p.to_string()).collect();
        s.push_str(&format!(" (outside: {})", pts.join(" ")));
    }
    s
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let suite = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<Suite>(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => Suite::default(),
    };
    let configs = suite.configs.unwrap_or_else(pinned_configs);
    let trials = args.trials.or(suite.trials).unwrap_or(DEFAULT_VERIFY_TRIALS);
    if trials == 0 {
        return Err(CliError::Config("trials must be >= 1".into()));
    }
    let seed = args.seed.or(suite.seed).unwrap_or(DEFAULT_VERIFY_SEED);
    let sampled = args.sampled.or(suite.sampled).unwrap_or(0);
    let family = args.sample_family.clone().or(suite.sample_family).unwrap_or_else(|| "all".into());
    let max = args.max_antennas.or(suite.max_antennas).unwrap_or(DEFAULT_MAX_ANTENNAS);
    if max == 0 {
        return Err(CliError::Config("max-antennas must be >= 1".into()));
    }

    let mut text = String::new();
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    for family in &configs {
        let mut report = consistency_report(*family, trials, seed)?;
        if args.corrupt_region {
            corrupt(&mut report)?;
        }
        let ok = report.all_flags();
        let line = format!("{} {} via {}", if ok { "PASS" } else { "FAIL" }, report.family, report.scheme);
        println!("{line}");
        for d in &report.discrepancies {
            println!("  {d}");
        }
        if !ok {
            failures.push(report.family.to_string());
        }
        text.push_str(&report.to_text()?);
        reports.push(report);
    }
    let sample = sampled_configs(sampled, max, seed, &family)?;
    for f in &sample {
        for c in outer_bound_containment(*f)? {
            let line = containment_line(&c);
            println!("{line}");
            text.push_str(&line);
            text.push('\n');
            if !c.contained {
                failures.push(format!("{} within {}", c.region, c.bound));
            }
        }
    }
    println!(
        "{} configs, {} sampled, {} failing checks",
        configs.len(),
        sample.len(),
        failures.len()
    );
    if let Some(dir) = &args.out {
        ensure_dir(dir)?;
        let csv_path = dir.join("verify.csv");
        write_reports_csv(&reports, "noise-free", create(&csv_path)?)?;
        let txt = dir.join("verify.txt");
        fs::write(&txt, &text).map_err(|e| CliError::Io(format!("{}: {e}", txt.display())))?;
        println!("wrote {} and {}", csv_path.display(), txt.display());
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failures.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rcia_core::DofPoint;

    fn p(a: i64, b: i64, c: i64, d: i64) -> DofPoint {
        DofPoint::new(Rational::new(a, b), Rational::new(c, d))
    }

    #[test]
    fn region_names_and_models() {
        let ic = scenario::network_from(Model::Ic, &[2, 2, 1, 1]).ok();
        let r = build_region("5", ic).unwrap();
        assert_eq!(r.vertices().unwrap(), vec![p(0, 1, 0, 1), p(1, 1, 0, 1), p(2, 3, 2, 3), p(0, 1, 1, 1)]);
        assert_eq!(build_region("thm5", ic).unwrap(), r);
        assert!(matches!(build_region("6", ic), Err(CliError::Config(_))));
        assert!(matches!(build_region("7", ic), Err(CliError::Config(_))));
        assert!(matches!(build_region("9", ic), Err(CliError::Config(_))));
        let bc = scenario::network_from(Model::Bc, &[4, 2, 2]).ok();
        assert!(build_region("7", bc).unwrap().vertices().unwrap().contains(&p(4, 3, 4, 3)));
    }

    #[test]
    fn sampling_respects_family_filter() {
        let s = sampled_configs(20, 6, 7, "equal-n").unwrap();
        assert_eq!(s.len(), 20);
        assert!(s.iter().all(|f| matches!(f, Family::EqualN { .. })));
        assert!(sampled_configs(1, 6, 7, "nope").is_err());
    }

    #[test]
    fn corruption_breaks_flags() {
        let mut r = consistency_report(Family::EqualN { m1: 2, m2: 2, n: 1 }, 3, 1).unwrap();
        assert!(r.all_flags());
        corrupt(&mut r).unwrap();
        assert!(!r.all_flags());
    }
}
