//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;

use rcia_core::analysis::{
    check_generic_decodability, consistency_report, estimate_dof_slope, outer_bound_containment, run_trials,
    sample_configs, Family, Verdict, DISCREPANCY_TAG,
};
use rcia_core::channel::NoiseMode;
use rcia_core::engine::write_results_csv;
use rcia_core::numerics::{rational, Rational};
use rcia_core::regions::{
    corner_equal_n, outer_ic_type_ic, region_bc_rx_coop_equal_n, region_ic_rx_coop_equal_n, DofPoint, HalfPlane,
    Region2D,
};
use rcia_core::schemes::{build_rcia_bc, build_rcia_equal_n, build_rcia_unequal, time_share, Schedule};

const MONTE_CARLO_TRIALS: usize = 1000;
const BASE_SEED: u64 = 1;
/// Fixed before any containment result was inspected.
const CONTAINMENT_SEED: u64 = 2026;
const SLOPE_TOL: f64 = 0.10;

type Outcome = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    rational(n, d)
}

fn pt(d1: Rational, d2: Rational) -> DofPoint {
    DofPoint::new(d1, d2)
}

/// Independent feasible-point oracle: every pairwise intersection of the
/// boundary lines (including the axes) that satisfies all constraints. A
/// superset of the vertices, so `r1 ⊆ r2` iff all of them lie in `r2`.
fn corner_points(r: &Region2D) -> Vec<DofPoint> {
    let zero = q(0, 1);
    let one = q(1, 1);
    let mut lines: Vec<HalfPlane> = r.constraints.clone();
    lines.push(HalfPlane { a: one, b: zero, c: zero });
    lines.push(HalfPlane { a: zero, b: one, c: zero });
    let feasible = |p: &DofPoint| p.d1 >= zero && p.d2 >= zero && r.constraints.iter().all(|h| h.a * p.d1 + h.b * p.d2 <= h.c);
    let mut out = Vec::new();
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            let det = a.a * b.b - a.b * b.a;
            if det == zero {
                continue;
            }
            let p = pt((a.c * b.b - a.b * b.c) / det, (a.a * b.c - a.c * b.a) / det);
            if feasible(&p) {
                out.push(p);
            }
        }
    }
    out
}

fn subset_oracle(r1: &Region2D, r2: &Region2D) -> bool {
    corner_points(r1)
        .iter()
        .all(|p| r2.constraints.iter().all(|h| h.a * p.d1 + h.b * p.d2 <= h.c))
}

fn tight_somewhere(r: &Region2D, p: &DofPoint) -> bool {
    r.constraints.iter().any(|h| h.a * p.d1 + h.b * p.d2 == h.c)
}

/// Every trial decodes and every trial hits `expected` exactly.
fn all_trials_hit(s: &Schedule, trials: usize, expected: DofPoint) -> Outcome {
    let rep = check_generic_decodability(s, trials, BASE_SEED).map_err(|e| e.to_string())?;
    if rep.verdict != Verdict::GenericallyDecodable {
        return Err(format!("{}: {}/{} trials decoded", s.descriptor.name, rep.successes, rep.trials));
    }
    if rep.achieved != vec![expected] {
        let got: Vec<String> = rep.achieved.iter().map(|p| p.to_string()).collect();
        return Err(format!("{}: achieved {} expected {expected}", s.descriptor.name, got.join(" ")));
    }
    Ok(format!("{} {}/{} -> {expected}", s.descriptor.name, rep.successes, rep.trials))
}

fn criterion_1() -> Outcome {
    let s = build_rcia_equal_n(2, 2, 1).map_err(|e| e.to_string())?;
    all_trials_hit(&s, MONTE_CARLO_TRIALS, pt(q(2, 3), q(2, 3)))
}

fn criterion_2() -> Outcome {
    let mut lines = Vec::new();
    for b in [1i64, 2, 4, 8] {
        let s = build_rcia_unequal(4, 1, 3, 2, b as usize).map_err(|e| e.to_string())?;
        let expected = pt(q(4 * b, 2 * b + 1), q(2 * b, 2 * b + 1));
        if b == 2 && expected != pt(q(8, 5), q(4, 5)) {
            return Err("closed form at B=2 is not (8/5, 4/5)".into());
        }
        lines.push(all_trials_hit(&s, MONTE_CARLO_TRIALS, expected)?);
    }
    Ok(lines.join("; "))
}

fn criterion_3() -> Outcome {
    let mut notes = Vec::new();
    for (m1, m2, n) in [(2, 2, 1), (3, 3, 2), (4, 3, 2), (4, 4, 2), (5, 3, 2), (6, 4, 2)] {
        // oracle: intersect the two boundary lines of the region by Cramer's rule
        let (m1p, m2p, ni) = (m1.min(2 * n) as i64, m2.min(2 * n) as i64, n as i64);
        let (a1, b1) = (q(1, m1p), q(1, ni));
        let (a2, b2) = (q(1, ni), q(1, m2p));
        let det = a1 * b2 - b1 * a2;
        let corner = pt((b2 - b1) / det, (a1 - a2) / det);
        if corner_equal_n(m1, m2, n).map_err(|e| e.to_string())? != corner {
            return Err(format!("({m1},{m2},{n}) corner mismatch"));
        }
        let s = build_rcia_equal_n(m1, m2, n).map_err(|e| e.to_string())?;
        all_trials_hit(&s, 100, corner)?;
        let thm5 = region_ic_rx_coop_equal_n(m1, m2, n).map_err(|e| e.to_string())?;
        let thm2 = outer_ic_type_ic(m1, m2, n, n).map_err(|e| e.to_string())?;
        if !(thm5.contains(&corner) && tight_somewhere(&thm5, &corner)) {
            return Err(format!("({m1},{m2},{n}) corner {corner} not on the region boundary"));
        }
        if !subset_oracle(&thm5, &thm2) {
            return Err(format!("({m1},{m2},{n}) region not inside the IC-type bound"));
        }
        notes.push(format!("({m1},{m2},{n})->{corner}"));
    }
    Ok(notes.join(" "))
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    for (m, n) in [(2usize, 1usize), (3, 2), (4, 2), (5, 2)] {
        let mp = m.min(2 * n) as i64;
        let d = q(mp * n as i64, mp + n as i64);
        let s = build_rcia_bc(m, n).map_err(|e| e.to_string())?;
        all_trials_hit(&s, 100, pt(d, d))?;
        if (m, n) == (2, 1) && d + d != q(4, 3) {
            return Err(format!("(2,1) sum DoF {} is not 4/3", d + d));
        }
        let region = region_bc_rx_coop_equal_n(m, n).map_err(|e| e.to_string())?;
        // single-user points: largest d1 with d2 = 0 (and vice versa) among the feasible corners
        let zero = q(0, 1);
        let corners = corner_points(&region);
        let x = corners.iter().filter(|p| p.d2 == zero).map(|p| p.d1).max().unwrap();
        let y = corners.iter().filter(|p| p.d1 == zero).map(|p| p.d2).max().unwrap();
        let hull = time_share(&[pt(d, d), pt(x, zero), pt(zero, y)]);
        if !(subset_oracle(&hull, &region) && subset_oracle(&region, &hull)) {
            return Err(format!("({m},{n}) hull of ({d},{d}) and single-user points differs from the region"));
        }
        notes.push(format!("({m},{n})->({d},{d})"));
    }
    Ok(notes.join(" "))
}

fn criterion_5() -> Outcome {
    let configs = sample_configs(20, 6, CONTAINMENT_SEED);
    let mut failures = Vec::new();
    let mut checked = 0;
    for family in &configs {
        let region = family.region().map_err(|e| e.to_string())?;
        for (bound, check) in family
            .outer_bounds()
            .map_err(|e| e.to_string())?
            .iter()
            .zip(outer_bound_containment(*family).map_err(|e| e.to_string())?)
        {
            checked += 1;
            let oracle = subset_oracle(&region, bound);
            if oracle != check.contained {
                return Err(format!("{family}: library and oracle disagree on {}", bound.label));
            }
            if !oracle {
                failures.push(format!("{} not inside {}", region.label, bound.label));
            }
        }
    }
    let listed: Vec<String> = configs.iter().map(|f| f.to_string()).collect();
    if failures.is_empty() {
        Ok(format!("{checked} containments over {}", listed.join(" ")))
    } else {
        Err(format!("{} of {checked} containments fail: {}", failures.len(), failures.join("; ")))
    }
}

fn criterion_6() -> Outcome {
    let grid = [40.0, 50.0, 60.0];
    let mut notes = Vec::new();
    for s in [
        build_rcia_equal_n(2, 2, 1).map_err(|e| e.to_string())?,
        build_rcia_unequal(4, 1, 3, 2, 5).map_err(|e| e.to_string())?,
    ] {
        let counted = s.scheduled_dof();
        let est = estimate_dof_slope(&s, &grid, 50, BASE_SEED).map_err(|e| e.to_string())?;
        for (u, target) in [counted.d1, counted.d2].iter().enumerate() {
            let t = *target.numer() as f64 / *target.denom() as f64;
            let rel = (est.slope[u] - t).abs() / t;
            if rel > SLOPE_TOL {
                return Err(format!("{} user {}: slope {:.4} vs {target}", s.descriptor.name, u + 1, est.slope[u]));
            }
            notes.push(format!("{} d{}={:.4}~{target}", s.descriptor.name, u + 1, est.slope[u]));
        }
    }
    Ok(notes.join(" "))
}

fn criterion_7a() -> Outcome {
    let corner = corner_equal_n(4, 3, 2).map_err(|e| e.to_string())?;
    if corner != pt(q(1, 1), q(3, 2)) {
        return Err(format!("corner {corner}"));
    }
    let rep = consistency_report(Family::EqualN { m1: 4, m2: 3, n: 2 }, 10, BASE_SEED).map_err(|e| e.to_string())?;
    match rep.discrepancies.iter().find(|d| d.starts_with(DISCREPANCY_TAG) && d.contains("printed symmetric pair")) {
        Some(d) => Ok(format!("corner {corner}; {d}")),
        None => Err(format!("no printed-pair flag in {:?}", rep.discrepancies)),
    }
}

fn criterion_7b() -> Outcome {
    let s = build_rcia_unequal(5, 1, 4, 2, 3).map_err(|e| e.to_string())?;
    let rep = check_generic_decodability(&s, 100, BASE_SEED).map_err(|e| format!("run crashed: {e}"))?;
    let deficient = rep
        .receivers
        .iter()
        .filter_map(|r| r.first_failure.as_ref())
        .find(|d| d.equations < d.unknowns);
    match (rep.verdict, deficient) {
        (Verdict::RankDeficient, Some(d)) => Ok(format!(
            "{} at {}: equations {} < unknowns {}",
            rep.verdict, d.receiver, d.equations, d.unknowns
        )),
        _ => {
            let r1 = &rep.receivers[0];
            Err(format!(
                "verdict {} ({}/{} decoded), R1 final (equations, unknowns, rank) {:?}, achieved {}",
                rep.verdict,
                rep.successes,
                rep.trials,
                r1.min,
                rep.achieved.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
            ))
        }
    }
}

fn criterion_8() -> Outcome {
    let s = build_rcia_equal_n(2, 2, 1).map_err(|e| e.to_string())?;
    let csv = || -> Result<Vec<u8>, String> {
        let results = run_trials(&s, MONTE_CARLO_TRIALS, BASE_SEED, NoiseMode::NoiseFree).map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        write_results_csv(&results, &mut buf).map_err(|e| e.to_string())?;
        Ok(buf)
    };
    let (a, b) = (csv()?, csv()?);
    if a == b {
        Ok(format!("{} bytes identical", a.len()))
    } else {
        Err("CSV outputs differ".into())
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 (2,2,1,1) 1000 trials at exactly (2/3, 2/3)", criterion_1),
        ("2 (4,1,3,2) B in {1,2,4,8} at (4B/(2B+1), 2B/(2B+1))", criterion_2),
        ("3 equal-N sweep on the region corner", criterion_3),
        ("4 BC sweep and hull equality", criterion_4),
        ("5 outer-bound containment on 20 sampled configs", criterion_5),
        ("6 high-SNR slope within 10%", criterion_6),
        ("7a corner (4,3,2) and printed-pair flag", criterion_7a),
        ("7b (5,1,4,2) rank deficiency reported", criterion_7b),
        ("8 byte-identical CSV", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = std::time::Instant::now();
        match f() {
            Ok(msg) => println!("PASS criterion {name} [{:.1}s] {msg}", start.elapsed().as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} [{:.1}s] {msg}", start.elapsed().as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
