//! Multi-trial verdicts: generic decodability, high-SNR rate slopes and
//! consistency of measured points with the regions and outer bounds.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{NoiseMode, Receiver};
use crate::engine::{run, DecodeDiagnostics, EngineError, SimulationResult, Transcript};
use crate::numerics::{
    cholesky, log2_det_identity_plus_gram, orthogonal_complement, rational, solve_lower_triangular, NumericsError,
    Rational, SeededRng, DEFAULT_REL_TOL,
};
use crate::regions::{
    self, corner_equal_n, is_subset, printed_pair_equal_n, unequal_class_violation, DofPoint, Region2D, RegionError,
};
use crate::schemes::{build_rcia_bc, build_rcia_equal_n, build_rcia_unequal, time_share, Schedule, SchemeDescriptor, SchemeError};

/// Tag attached to every mismatch between a published value and a measurement.
pub const DISCREPANCY_TAG: &str = "paper-discrepancy";

/// Block counts evaluated for the asymptotic claim of the unequal scheme.
pub const BLOCK_SEQUENCE: [usize; 5] = [1, 2, 4, 8, 16];

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("export failed: {0}")]
    Export(String),
}

/// Runs `trials` independent seeds `seed, seed + 1, …` in parallel; the
/// output order is the seed order.
pub fn run_trials(
    schedule: &Schedule,
    trials: usize,
    seed: u64,
    mode: NoiseMode,
) -> Result<Vec<SimulationResult>, AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::Unsupported("at least one trial is required".into()));
    }
    (0..trials as u64)
        .into_par_iter()
        .map(|i| run(schedule, seed.wrapping_add(i), mode).map(|(_, r)| r).map_err(AnalysisError::from))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    GenericallyDecodable,
    RankDeficient,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::GenericallyDecodable => "generically-decodable",
            Verdict::RankDeficient => "rank-deficient",
        })
    }
}

/// Range of the final-slot `(equations, unknowns, rank)` over trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReceiverStats {
    pub receiver: Receiver,
    pub successes: usize,
    pub min: (usize, usize, usize),
    pub max: (usize, usize, usize),
    /// Final diagnostics of the first failing trial, if any.
    pub first_failure: Option<DecodeDiagnostics>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecodabilityReport {
    pub descriptor: SchemeDescriptor,
    pub trials: usize,
    pub seed: u64,
    pub successes: usize,
    pub success_fraction: f64,
    pub receivers: Vec<ReceiverStats>,
    /// Distinct achieved points, in first-seen order.
    pub achieved: Vec<DofPoint>,
    pub max_residual: f64,
    pub verdict: Verdict,
}

impl DecodabilityReport {
    pub fn from_results(schedule: &Schedule, seed: u64, results: &[SimulationResult]) -> Self {
        let receivers = Receiver::BOTH
            .iter()
            .map(|&r| {
                let finals: Vec<&DecodeDiagnostics> = results
                    .iter()
                    .filter_map(|res| res.diagnostics.iter().rev().find(|d| d.receiver == r))
                    .collect();
                let fold = |pick: fn(usize, usize) -> usize, init: usize| {
                    finals.iter().fold((init, init, init), |acc, d| {
                        (pick(acc.0, d.equations), pick(acc.1, d.unknowns), pick(acc.2, d.rank))
                    })
                };
                ReceiverStats {
                    receiver: r,
                    successes: results.iter().filter(|res| res.success[r.index()]).count(),
                    min: fold(usize::min, usize::MAX),
                    max: fold(usize::max, 0),
                    first_failure: results
                        .iter()
                        .find(|res| !res.success[r.index()])
                        .and_then(|res| res.diagnostics.iter().rev().find(|d| d.receiver == r).cloned()),
                }
            })
            .collect();
        let mut achieved: Vec<DofPoint> = Vec::new();
        for r in results {
            if !achieved.contains(&r.achieved) {
                achieved.push(r.achieved);
            }
        }
        let successes = results.iter().filter(|r| r.all_decoded()).count();
        DecodabilityReport {
            descriptor: schedule.descriptor.clone(),
            trials: results.len(),
            seed,
            successes,
            success_fraction: successes as f64 / results.len().max(1) as f64,
            receivers,
            achieved,
            max_residual: results.iter().map(|r| r.max_residual).fold(0.0, f64::max),
            verdict: if successes == results.len() {
                Verdict::GenericallyDecodable
            } else {
                Verdict::RankDeficient
            },
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "scheme {} | trials {} from seed {} | success {}/{} | verdict {}\n",
            self.descriptor.name, self.trials, self.seed, self.successes, self.trials, self.verdict
        );
        s.push_str(&format!("claimed {}\n", self.descriptor.claimed));
        for p in &self.achieved {
            s.push_str(&format!("achieved {p}\n"));
        }
        for r in &self.receivers {
            s.push_str(&format!(
                "{}: decoded in {}/{} trials; final (equations, unknowns, rank) min {:?} max {:?}\n",
                r.receiver, r.successes, self.trials, r.min, r.max
            ));
            if let Some(d) = &r.first_failure {
                s.push_str(&format!(
                    "  first failure: slot {} rows {} equations {} unknowns {} rank {}\n",
                    d.slot, d.rows, d.equations, d.unknowns, d.rank
                ));
            }
        }
        s
    }
}

/// Noise-free Monte Carlo over `trials` seeds.
pub fn check_generic_decodability(schedule: &Schedule, trials: usize, seed: u64) -> Result<DecodabilityReport, AnalysisError> {
    let results = run_trials(schedule, trials, seed, NoiseMode::NoiseFree)?;
    Ok(DecodabilityReport::from_results(schedule, seed, &results))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeEstimate {
    pub scheme: String,
    /// Fitted DoF per user (rate slope over `log2 P`, divided by `T`).
    pub slope: [f64; 2],
    /// RMS deviation of the mean rates from the fitted line, in bits per slot.
    pub residual: [f64; 2],
    pub powers_db: Vec<f64>,
    /// Mean rate per user in bits per slot at each power.
    pub rates: Vec<[f64; 2]>,
    pub trials: usize,
}

/// Zero-forcing rate of `r`'s own symbols after whitening the noise:
/// `log2 det(I + GᴴG)`, `G` the whitened own columns projected away from all
/// other symbols.
pub fn own_rate(transcript: &Transcript, r: Receiver) -> Result<f64, AnalysisError> {
    let eff = transcript.effective_channel(r);
    if eff.own.cols() == 0 {
        return Ok(0.0);
    }
    if eff.noise.cols() == 0 {
        return Err(AnalysisError::Unsupported("rates need a noisy transcript".into()));
    }
    let kw = eff.noise.mul(&eff.noise.adjoint())?;
    let l = cholesky(&kw)?;
    let own = solve_lower_triangular(&l, &eff.own)?;
    let other = solve_lower_triangular(&l, &eff.other)?;
    let q = orthogonal_complement(&other, DEFAULT_REL_TOL);
    let g = q.adjoint().mul(&own)?;
    Ok(log2_det_identity_plus_gram(&g))
}

fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum::<f64>() / n).sqrt();
    (slope, rms)
}

/// Fits the per-user rate against `log2 P` over `powers_db`.
pub fn estimate_dof_slope(
    schedule: &Schedule,
    powers_db: &[f64],
    trials: usize,
    seed: u64,
) -> Result<SlopeEstimate, AnalysisError> {
    if powers_db.len() < 2 || powers_db.iter().any(|p| p.is_nan() || *p < 30.0) {
        return Err(AnalysisError::Unsupported(format!(
            "slope needs at least two powers, each >= 30 dB; got {powers_db:?}"
        )));
    }
    let report = check_generic_decodability(schedule, trials, seed)?;
    if report.verdict != Verdict::GenericallyDecodable {
        return Err(AnalysisError::Unsupported(format!(
            "{} is not generically decodable ({} of {} trials)",
            schedule.descriptor.name, report.successes, report.trials
        )));
    }
    let t = schedule.total_slots() as f64;
    let mut rates = Vec::new();
    for &db in powers_db {
        let mode = NoiseMode::noisy_db(db).map_err(EngineError::from)?;
        let per_trial: Vec<[f64; 2]> = (0..trials as u64)
            .into_par_iter()
            .map(|i| {
                let (tr, _) = run(schedule, seed.wrapping_add(i), mode)?;
                Ok([own_rate(&tr, Receiver::R1)?, own_rate(&tr, Receiver::R2)?])
            })
            .collect::<Result<_, AnalysisError>>()?;
        let mean = |u: usize| per_trial.iter().map(|r| r[u]).sum::<f64>() / (trials as f64 * t);
        rates.push([mean(0), mean(1)]);
    }
    let x: Vec<f64> = powers_db.iter().map(|db| db / 10.0 * std::f64::consts::LOG2_10).collect();
    let mut slope = [0.0; 2];
    let mut residual = [0.0; 2];
    for u in 0..2 {
        let y: Vec<f64> = rates.iter().map(|r| r[u]).collect();
        let (s, res) = fit_line(&x, &y);
        slope[u] = s.max(0.0);
        residual[u] = res;
    }
    Ok(SlopeEstimate {
        scheme: schedule.descriptor.name.clone(),
        slope,
        residual,
        powers_db: powers_db.to_vec(),
        rates,
        trials,
    })
}

/// Scheme family and antenna configuration of a consistency check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// `(M1, M2, N, N)` IC.
    EqualN { m1: usize, m2: usize, n: usize },
    /// `(M1, M2, N1, N2)` IC in the unequal-antenna class.
    Unequal { m1: usize, m2: usize, n1: usize, n2: usize },
    /// `(M, N, N)` BC.
    Bc { m: usize, n: usize },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::EqualN { m1, m2, n } => write!(f, "ic({m1},{m2},{n},{n})"),
            Family::Unequal { m1, m2, n1, n2 } => write!(f, "ic({m1},{m2},{n1},{n2})"),
            Family::Bc { m, n } => write!(f, "bc({m},{n},{n})"),
        }
    }
}

impl Family {
    /// The region this family's scheme targets.
    pub fn region(&self) -> Result<Region2D, RegionError> {
        match *self {
            Family::EqualN { m1, m2, n } => regions::region_ic_rx_coop_equal_n(m1, m2, n),
            Family::Unequal { m1, m2, n1, n2 } => regions::region_ic_rx_coop_unequal(m1, m2, n1, n2),
            Family::Bc { m, n } => regions::region_bc_rx_coop_equal_n(m, n),
        }
    }

    /// Outer bounds that apply to the configuration.
    pub fn outer_bounds(&self) -> Result<Vec<Region2D>, RegionError> {
        Ok(match *self {
            Family::EqualN { m1, m2, n } => vec![regions::outer_bc_type_ic(n, n)?, regions::outer_ic_type_ic(m1, m2, n, n)?],
            Family::Unequal { m1, m2, n1, n2 } => {
                vec![regions::outer_bc_type_ic(n1, n2)?, regions::outer_ic_type_ic(m1, m2, n1, n2)?]
            }
            Family::Bc { m, n } => vec![regions::outer_bc_type_bc(m, n, n)?, regions::outer_crc_type_bc(m, n, n)?],
        })
    }
}

/// One region-versus-bound containment check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContainmentCheck {
    pub family: Family,
    pub region: String,
    pub bound: String,
    pub contained: bool,
    /// Region vertices outside the bound.
    pub violations: Vec<DofPoint>,
}

pub fn outer_bound_containment(family: Family) -> Result<Vec<ContainmentCheck>, AnalysisError> {
    let region = family.region()?;
    let vertices = region.vertices()?;
    family
        .outer_bounds()?
        .into_iter()
        .map(|b| {
            let violations: Vec<DofPoint> = vertices.iter().filter(|v| !b.contains(v)).copied().collect();
            Ok(ContainmentCheck {
                family,
                region: region.label.clone(),
                bound: b.label.clone(),
                contained: is_subset(&region, &b)?,
                violations,
            })
        })
        .collect()
}

/// Members of the unequal-antenna class with every antenna count `<= max`.
pub fn unequal_class_members(max: usize) -> Vec<Family> {
    let mut out = Vec::new();
    for m1 in 1..=max {
        for m2 in 1..=max {
            for n1 in 1..=max {
                for n2 in 1..=max {
                    if unequal_class_violation(m1, m2, n1, n2).is_none() {
                        out.push(Family::Unequal { m1, m2, n1, n2 });
                    }
                }
            }
        }
    }
    out
}

/// `count` configurations with antenna counts in `1..=max`, drawn round-robin
/// from the three region families (equal-N IC, unequal-class IC, BC).
pub fn sample_configs(count: usize, max: usize, seed: u64) -> Vec<Family> {
    let mut rng = SeededRng::new(seed, 0);
    let mut pick = |hi: usize| 1 + (rng.next_u64() % hi as u64) as usize;
    let class = unequal_class_members(max);
    (0..count)
        .map(|k| match k % 3 {
            0 => Family::EqualN { m1: pick(max), m2: pick(max), n: pick(max) },
            1 if !class.is_empty() => class[pick(class.len()) - 1],
            _ => Family::Bc { m: pick(max), n: pick(max) },
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub family: Family,
    pub scheme: String,
    /// Measured points (for the unequal family: the `B → ∞` limit of the
    /// measured sequence).
    pub achieved: Vec<DofPoint>,
    pub claimed: DofPoint,
    pub region: Region2D,
    pub outer_bounds: Vec<Region2D>,
    /// Single-user points taken from the region's axis intercepts.
    pub single_user: Vec<DofPoint>,
    pub achieved_in_region: bool,
    pub achieved_on_boundary: bool,
    pub hull_equals_region: bool,
    pub region_within_bounds: bool,
    pub notes: Vec<String>,
    pub discrepancies: Vec<String>,
}

impl ConsistencyReport {
    fn assemble(
        family: Family,
        scheme: String,
        achieved: Vec<DofPoint>,
        claimed: DofPoint,
        mut notes: Vec<String>,
        mut discrepancies: Vec<String>,
    ) -> Result<Self, AnalysisError> {
        let region = family.region()?;
        let outer_bounds = family.outer_bounds()?;
        let (x, y) = region.axis_intercepts()?;
        let single_user = vec![x, y];
        let mut flags = Self {
            family,
            scheme,
            achieved,
            claimed,
            region,
            outer_bounds,
            single_user,
            achieved_in_region: false,
            achieved_on_boundary: false,
            hull_equals_region: false,
            region_within_bounds: false,
            notes: Vec::new(),
            discrepancies: Vec::new(),
        };
        let (a, b, c, d) = flags.evaluate()?;
        flags.achieved_in_region = a;
        flags.achieved_on_boundary = b;
        flags.hull_equals_region = c;
        flags.region_within_bounds = d;
        for check in outer_bound_containment(family)? {
            if !check.contained {
                let pts: Vec<String> = check.violations.iter().map(|p| p.to_string()).collect();
                discrepancies.push(format!(
                    "{DISCREPANCY_TAG}: {} is not inside {}; vertices outside: {}",
                    check.region,
                    check.bound,
                    pts.join(" ")
                ));
            }
        }
        if !flags.hull_equals_region {
            notes.push("time sharing of the achieved and single-user points does not fill the region".into());
        }
        flags.notes = notes;
        flags.discrepancies = discrepancies;
        Ok(flags)
    }

    /// Recomputes the four flags from the stored regions and points.
    pub fn evaluate(&self) -> Result<(bool, bool, bool, bool), AnalysisError> {
        let in_region = self.achieved.iter().all(|p| self.region.contains(p));
        let on_boundary = self.achieved.iter().all(|p| self.region.on_boundary(p));
        let mut pts = self.achieved.clone();
        pts.extend(self.single_user.iter().copied());
        let hull = regions::equals(&time_share(&pts), &self.region)?;
        let mut within = true;
        for b in &self.outer_bounds {
            within &= is_subset(&self.region, b)?;
        }
        Ok((in_region, on_boundary, hull, within))
    }

    pub fn all_flags(&self) -> bool {
        self.achieved_in_region && self.achieved_on_boundary && self.hull_equals_region && self.region_within_bounds
    }

    pub fn has_discrepancy(&self) -> bool {
        !self.discrepancies.is_empty()
    }

    pub fn to_text(&self) -> Result<String, AnalysisError> {
        let mut s = format!("== {} via {} ==\n", self.family, self.scheme);
        s.push_str(&format!("claimed {}\n", self.claimed));
        for p in &self.achieved {
            s.push_str(&format!("achieved {p}\n"));
        }
        s.push_str(&self.region.to_text()?);
        for b in &self.outer_bounds {
            s.push_str(&format!("outer bound {b}\n"));
        }
        s.push_str(&format!(
            "achieved-in-region {} | achieved-on-boundary {} | hull-equals-region {} | region-within-bounds {}\n",
            self.achieved_in_region, self.achieved_on_boundary, self.hull_equals_region, self.region_within_bounds
        ));
        for n in &self.notes {
            s.push_str(&format!("note: {n}\n"));
        }
        for d in &self.discrepancies {
            s.push_str(&format!("{d}\n"));
        }
        Ok(s)
    }
}

fn frac(r: &Rational) -> String {
    r.to_string()
}

/// Measures the family's scheme noise-free over `trials` seeds and compares
/// the outcome with the region, its outer bounds and the published claims.
pub fn consistency_report(family: Family, trials: usize, seed: u64) -> Result<ConsistencyReport, AnalysisError> {
    let measure = |s: &Schedule| -> Result<DofPoint, AnalysisError> {
        let rep = check_generic_decodability(s, trials, seed)?;
        // The smallest point over trials: a single failing trial shows up.
        Ok(rep
            .achieved
            .iter()
            .copied()
            .min_by(|a, b| a.sum().cmp(&b.sum()))
            .expect("at least one trial"))
    };
    match family {
        Family::EqualN { m1, m2, n } => {
            let s = build_rcia_equal_n(m1, m2, n)?;
            let achieved = measure(&s)?;
            let corner = corner_equal_n(m1, m2, n)?;
            let printed = printed_pair_equal_n(m1, m2, n)?;
            let mut notes = vec![format!("corner of the region {corner}")];
            let mut disc = Vec::new();
            if printed != corner {
                disc.push(format!(
                    "{DISCREPANCY_TAG}: printed symmetric pair {printed} differs from the corner {corner}"
                ));
            }
            if achieved != s.descriptor.claimed {
                disc.push(format!("{DISCREPANCY_TAG}: measured {achieved} below claimed {}", s.descriptor.claimed));
            }
            notes.push(format!("T = {}", s.total_slots()));
            ConsistencyReport::assemble(family, s.descriptor.name.clone(), vec![achieved], s.descriptor.claimed, notes, disc)
        }
        Family::Unequal { m1, m2, n1, n2 } => {
            let mut notes = Vec::new();
            let mut disc = Vec::new();
            for &b in &BLOCK_SEQUENCE {
                let s = build_rcia_unequal(m1, m2, n1, n2, b)?;
                let achieved = measure(&s)?;
                let bi = b as i64;
                let closed = DofPoint::new(rational(m1 as i64 * bi, 2 * bi + 1), rational(2 * m2 as i64 * bi, 2 * bi + 1));
                notes.push(format!(
                    "B={b}: measured {achieved}, symbol count {closed}, claimed {}",
                    s.descriptor.claimed
                ));
                if achieved != closed {
                    disc.push(format!("B={b}: measured {achieved} differs from the symbol count {closed}"));
                }
                if achieved != s.descriptor.claimed {
                    disc.push(format!(
                        "{DISCREPANCY_TAG}: B={b} measured {achieved}, printed {}",
                        s.descriptor.claimed
                    ));
                }
            }
            let limit = DofPoint::new(rational(m1 as i64, 2), Rational::from_integer(m2 as i64));
            let printed_limit = DofPoint::new(
                Rational::from_integer(n1 as i64 - m2 as i64),
                Rational::from_integer(m2 as i64),
            );
            notes.push(format!(
                "B -> infinity: measured sequence tends to {limit}; printed pair tends to {printed_limit}"
            ));
            if limit != printed_limit {
                disc.push(format!(
                    "{DISCREPANCY_TAG}: limit {limit} differs from printed limit {printed_limit}"
                ));
            }
            ConsistencyReport::assemble(
                family,
                format!("rcia-unequal({m1},{m2},{n1},{n2};B->inf)"),
                vec![limit],
                printed_limit,
                notes,
                disc,
            )
        }
        Family::Bc { m, n } => {
            let s = build_rcia_bc(m, n)?;
            let achieved = measure(&s)?;
            let mut notes = Vec::new();
            let mut disc = Vec::new();
            if m > 2 * n {
                let uncapped = rational((m * n) as i64, (m + n) as i64);
                notes.push(format!(
                    "uncapped form MN/(M+N) = {} exceeds the capped corner {}",
                    frac(&uncapped),
                    s.descriptor.claimed.d1
                ));
                disc.push(format!(
                    "{DISCREPANCY_TAG}: printed corner ({0}, {0}) lies outside the region; capped ({1}, {1}) used",
                    frac(&uncapped),
                    s.descriptor.claimed.d1
                ));
            }
            if achieved != s.descriptor.claimed {
                disc.push(format!("measured {achieved} below claimed {}", s.descriptor.claimed));
            }
            notes.push(format!("sum DoF {}", achieved.sum()));
            ConsistencyReport::assemble(family, s.descriptor.name.clone(), vec![achieved], s.descriptor.claimed, notes, disc)
        }
    }
}

/// CSV summary, one row per report.
pub fn write_reports_csv<W: Write>(reports: &[ConsistencyReport], mode: &str, w: W) -> Result<(), AnalysisError> {
    let err = |e: csv::Error| AnalysisError::Export(e.to_string());
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "config",
        "scheme",
        "mode",
        "achieved_d1",
        "achieved_d2",
        "claimed_d1",
        "claimed_d2",
        "in_region",
        "on_boundary",
        "hull_equals_region",
        "region_within_bounds",
        "discrepancies",
    ])
    .map_err(err)?;
    for r in reports {
        let a = r.achieved.first().copied().unwrap_or_else(DofPoint::origin);
        out.write_record([
            r.family.to_string(),
            r.scheme.clone(),
            mode.to_string(),
            frac(&a.d1),
            frac(&a.d2),
            frac(&r.claimed.d1),
            frac(&r.claimed.d2),
            r.achieved_in_region.to_string(),
            r.achieved_on_boundary.to_string(),
            r.hull_equals_region.to_string(),
            r.region_within_bounds.to_string(),
            r.discrepancies.len().to_string(),
        ])
        .map_err(err)?;
    }
    out.flush().map_err(|e| AnalysisError::Export(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::build_point_to_point;

    fn q(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    #[test]
    fn decodability_report_for_basic_scheme() {
        let s = build_rcia_equal_n(2, 2, 1).unwrap();
        let rep = check_generic_decodability(&s, 50, 1).unwrap();
        assert_eq!(rep.verdict, Verdict::GenericallyDecodable);
        assert_eq!(rep.success_fraction, 1.0);
        assert_eq!(rep.achieved, vec![DofPoint::new(q(2, 3), q(2, 3))]);
        assert_eq!(rep.receivers[0].min, (2, 2, 2));
        assert!(rep.to_text().contains("generically-decodable"));
        assert!(check_generic_decodability(&s, 0, 1).is_err());
    }

    #[test]
    fn parallel_trials_keep_seed_order() {
        let s = build_rcia_unequal(4, 1, 3, 2, 1).unwrap();
        let par = run_trials(&s, 8, 100, NoiseMode::NoiseFree).unwrap();
        for (i, r) in par.iter().enumerate() {
            assert_eq!(r.seed, 100 + i as u64);
            assert_eq!(r, &run(&s, 100 + i as u64, NoiseMode::NoiseFree).unwrap().1);
        }
    }

    #[test]
    fn line_fit() {
        let (s, r) = fit_line(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]);
        assert!((s - 2.0).abs() < 1e-12 && r < 1e-12);
    }

    #[test]
    fn point_to_point_slope() {
        let est = estimate_dof_slope(&build_point_to_point(), &[40.0, 50.0, 60.0], 20, 3).unwrap();
        assert!((est.slope[0] - 1.0).abs() < 0.1, "{est:?}");
        assert_eq!(est.slope[1], 0.0);
        assert!(estimate_dof_slope(&build_point_to_point(), &[40.0], 2, 3).is_err());
        assert!(estimate_dof_slope(&build_point_to_point(), &[20.0, 40.0], 2, 3).is_err());
    }

    #[test]
    fn consistency_basic_config() {
        let rep = consistency_report(Family::EqualN { m1: 2, m2: 2, n: 1 }, 5, 1).unwrap();
        assert!(rep.all_flags(), "{}", rep.to_text().unwrap());
        assert!(!rep.has_discrepancy());
        assert_eq!(rep.evaluate().unwrap(), (true, true, true, true));
    }

    #[test]
    fn consistency_flags_printed_pair() {
        let rep = consistency_report(Family::EqualN { m1: 4, m2: 3, n: 2 }, 3, 1).unwrap();
        assert_eq!(rep.achieved, vec![DofPoint::new(q(1, 1), q(3, 2))]);
        assert!(rep.achieved_on_boundary);
        assert!(rep.discrepancies.iter().any(|d| d.starts_with(DISCREPANCY_TAG)));
    }

    #[test]
    fn consistency_unequal_limit() {
        let rep = consistency_report(Family::Unequal { m1: 4, m2: 1, n1: 3, n2: 2 }, 2, 1).unwrap();
        assert_eq!(rep.achieved, vec![DofPoint::new(q(2, 1), q(1, 1))]);
        assert!(rep.all_flags(), "{}", rep.to_text().unwrap());
        assert!(!rep.has_discrepancy(), "{:?}", rep.discrepancies);
    }

    #[test]
    fn bc_cap_discrepancy_noted() {
        let rep = consistency_report(Family::Bc { m: 5, n: 2 }, 2, 1).unwrap();
        assert!(rep.all_flags());
        assert!(rep.has_discrepancy());
        let rep = consistency_report(Family::Bc { m: 2, n: 1 }, 2, 1).unwrap();
        assert_eq!(rep.achieved[0].sum(), q(4, 3));
        assert!(!rep.has_discrepancy());
    }

    #[test]
    fn class_members_up_to_six() {
        let members = unequal_class_members(6);
        assert_eq!(
            members,
            vec![
                Family::Unequal { m1: 4, m2: 1, n1: 3, n2: 2 },
                Family::Unequal { m1: 5, m2: 1, n1: 4, n2: 2 },
                Family::Unequal { m1: 6, m2: 1, n1: 4, n2: 3 },
                Family::Unequal { m1: 6, m2: 1, n1: 5, n2: 2 },
            ]
        );
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_configs(20, 6, 9), sample_configs(20, 6, 9));
        let s = sample_configs(20, 6, 9);
        assert_eq!(s.iter().filter(|f| matches!(f, Family::Unequal { .. })).count(), 7);
    }

    #[test]
    fn reports_csv() {
        let rep = consistency_report(Family::Bc { m: 2, n: 1 }, 1, 1).unwrap();
        let mut buf = Vec::new();
        write_reports_csv(&[rep], "noise-free", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"bc(2,1,1)\",\"rcia-bc(2,1)\",noise-free,2/3,2/3,2/3,2/3,true,true,true,true,0"), "{text}");
    }
}
