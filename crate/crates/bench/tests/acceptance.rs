//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per
//! criterion and exits non-zero if any fails.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use amra_bench::fixtures::{
    cul_de_sac, cul_de_sac_trial, fixture_61, narrow_passage, random_grid, CUL_DE_SAC_FACTORS, FIXTURE_61_FACTORS,
    NARROW_FACTORS, NARROW_GOAL, NARROW_START,
};
use amra_bench::oracle::reachable;
use amra_bench::results::{read_csv, read_curves, write_csv, write_curves};
use amra_bench::scenario::{run_grid, BenchPreset, GridScenario, Level, Scenario, UavScenario};
use amra_bench::verify::{audit, devolution_ara, devolution_trace, random_case, Audit, GridCase, OPTIMAL, T1, T2, T3};
use amra_bench::{monotonicity_violations, run_matrix, MapEntry, MatrixSpec, TrialResult};
use amra_core::grid2d::{Connectivity, CostMap, Grid2D, GridState, HeuristicKind};
use amra_core::uav4d::dubins::dubins_length;
use amra_core::uav4d::heuristics::BackwardDijkstra;
use amra_core::uav4d::{PrimitiveSet, Uav4D, UavHeuristic};
use amra_core::{PlanStatus, PlannerConfig, ProblemInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

const KINDS: [HeuristicKind; 2] = [HeuristicKind::Euclidean, HeuristicKind::Manhattan];

/// Twenty solvable 64x64 instances with audits of AMRA* and of a
/// single-resolution ARA*, shared by criteria 1 to 3.
struct Suite {
    amra: Vec<(GridCase, Audit)>,
    single: Vec<Audit>,
}

fn suite() -> Result<Suite, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = PlannerConfig::default();
    let mut amra = Vec::new();
    let mut single = Vec::new();
    while amra.len() < 20 {
        let Some(case) = random_case(&mut rng, 64, 0.2, (1, 20), &[1, 3, 9], Connectivity::Eight, false) else { continue };
        let a = audit(&case, &KINDS, &BenchPreset::Amra, &cfg)?;
        if a.optimum.is_none() {
            continue;
        }
        single.push(audit(&case, &KINDS[..1], &BenchPreset::Ara(Level::High), &cfg)?);
        amra.push((case, a));
    }
    Ok(Suite { amra, single })
}

fn violations<'a>(audits: impl Iterator<Item = &'a Audit>, name: &str) -> Vec<String> {
    audits.flat_map(|a| a.violations.iter().filter(|(n, _)| *n == name).map(|(_, d)| d.clone())).collect()
}

fn summarise(v: Vec<String>, ok: String) -> Verdict {
    match v.first() {
        None => Ok(ok),
        Some(first) => Err(format!("{} violations, first: {first}", v.len())),
    }
}

fn criterion_1(s: &Suite) -> Verdict {
    let mut v = violations(s.amra.iter().map(|(_, a)| a), OPTIMAL);
    for (i, (_, a)) in s.amra.iter().enumerate() {
        if a.outcome.status != PlanStatus::Finished {
            v.push(format!("instance {i}: status {:?}", a.outcome.status));
        }
    }
    summarise(v, "final cost equals the oracle optimum on 20 instances".into())
}

fn criterion_2(s: &Suite) -> Verdict {
    let mut v = violations(s.amra.iter().map(|(_, a)| a), T3);
    let mut count = 0;
    for (_, a) in &s.amra {
        for r in &a.outcome.published {
            count += 1;
            if ![6.0, 1.5, 1.0].contains(&r.bound) {
                v.push(format!("unexpected bound {}", r.bound));
            }
        }
    }
    summarise(v, format!("{count} published solutions within w1*w2 of the optimum"))
}

fn criterion_3(s: &Suite) -> Verdict {
    let mut v = violations(s.amra.iter().map(|(_, a)| a), T1);
    v.extend(violations(s.single.iter(), T1));
    let worst = |a: &Audit| a.outcome.iterations.iter().map(|i| i.max_expansions_of_any_state).max().unwrap_or(0);
    let n3 = s.amra.iter().map(|(_, a)| worst(a)).max().unwrap_or(0);
    let n1 = s.single.iter().map(worst).max().unwrap_or(0);
    summarise(v, format!("max per-state expansions {n3} with N=3 (limit 4), {n1} with N=1 (limit 2)"))
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let cfg = PlannerConfig::default();
    let mut disagreements = Vec::new();
    let (mut walled, mut open) = (0, 0);
    while walled < 10 || open < 10 {
        let want_wall = walled < 10;
        let Some(case) = random_case(&mut rng, 64, 0.2, (1, 20), &[1, 3, 9], Connectivity::Eight, want_wall) else { continue };
        let grid = case.grid();
        let referee = reachable(&ProblemInstance::new(&grid, case.start, [case.goal])).map_err(|e| e.to_string())?;
        if want_wall {
            walled += 1;
        } else if referee {
            open += 1;
        } else {
            continue;
        }
        let a = audit(&case, &KINDS, &BenchPreset::Amra, &cfg)?;
        let failed = a.outcome.status == PlanStatus::NoPath;
        if failed == referee {
            disagreements.push(format!("{} -> {}: planner failure {failed}, oracle reachable {referee}", case.start, case.goal));
        }
        disagreements.extend(a.violations.into_iter().filter(|(n, _)| *n == T2).map(|(_, d)| d));
    }
    summarise(disagreements, "10 walled goals fail, 10 solvable instances succeed".into())
}

fn criterion_5() -> Verdict {
    let sc = GridScenario {
        grid: Grid2D::new(narrow_passage(), Connectivity::Four, &NARROW_FACTORS).map_err(|e| e.to_string())?,
        heuristics: vec![HeuristicKind::Manhattan],
    };
    let cfg = PlannerConfig::default();
    let low = run_grid(&sc, &BenchPreset::Ara(Level::Low), NARROW_START, NARROW_GOAL, &cfg).map_err(|e| e.to_string())?;
    if low.status != PlanStatus::NoPath {
        return Err(format!("coarse-only ARA* returned {:?}", low.status));
    }
    let out = run_grid(&sc, &BenchPreset::Amra, NARROW_START, NARROW_GOAL, &cfg).map_err(|e| e.to_string())?;
    let best = out.best.as_ref().ok_or(format!("AMRA* returned {:?}", out.status))?;
    let fine_only = best.states().filter(|s| s.x % 7 != 0 || s.y % 7 != 0).count();
    if fine_only == 0 {
        return Err("AMRA* path has no fine-only state".into());
    }
    Ok(format!("coarse ARA* fails, AMRA* cost {} with {fine_only} fine-only states", best.cost))
}

fn criterion_6() -> Verdict {
    let sc = GridScenario {
        grid: Grid2D::new(cul_de_sac(), Connectivity::Four, &CUL_DE_SAC_FACTORS).map_err(|e| e.to_string())?,
        heuristics: vec![HeuristicKind::Manhattan],
    };
    let cfg = PlannerConfig { anytime: false, ..PlannerConfig::default() };
    let first = |preset: &BenchPreset, s: GridState, g: GridState| -> Result<f64, String> {
        let out = run_grid(&sc, preset, s, g, &cfg).map_err(|e| e.to_string())?;
        let r = out.published.first().ok_or(format!("{preset} found no solution for {s} -> {g}"))?;
        Ok(r.stats.expansions_total as f64)
    };
    let (mut amra, mut ara) = (0.0, 0.0);
    for seed in 0..20 {
        let (s, g) = cul_de_sac_trial(seed);
        amra += first(&BenchPreset::Amra, s, g)?;
        ara += first(&BenchPreset::Ara(Level::High), s, g)?;
    }
    let ratio = amra / ara;
    let msg = format!("mean first-solution expansions AMRA* {:.0}, ARA*(fine) {:.0}, ratio {ratio:.3}", amra / 20.0, ara / 20.0);
    if ratio <= 0.5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut v = Vec::new();
    let mut n = 0;
    while n < 50 {
        let conn = if n % 2 == 0 { Connectivity::Eight } else { Connectivity::Four };
        let Some(case) = random_case(&mut rng, 16, 0.2, (1, 9), &[1], conn, false) else { continue };
        n += 1;
        for check in [devolution_trace(&case), devolution_ara(&case)] {
            if let Err(e) = check {
                v.push(format!("{} -> {}: {e}", case.start, case.goal));
            }
        }
    }
    summarise(v, "wA* pops match the reference on 50 grids, AMRA* (N=1, M=1) publishes as ARA*".into())
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut v = Vec::new();
    let mut edges = 0usize;
    for _ in 0..10 {
        let map = random_grid(&mut rng, 40, 40, 0.25, (1, 1));
        let free: Vec<(u32, u32)> = map.free_cells().collect();
        let goal = free[rng.gen_range(0..free.len())];
        let t = BackwardDijkstra::build(&map, goal);
        for &(x, y) in &free {
            for dx in -1i64..=1 {
                for dy in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if (dx, dy) == (0, 0) || !map.is_free(nx, ny) {
                        continue;
                    }
                    edges += 1;
                    let step = if dx != 0 && dy != 0 { 3.0 * SQRT_2 } else { 3.0 };
                    let (a, b) = (t.distance(x as i64, y as i64), t.distance(nx, ny));
                    if a.is_finite() != b.is_finite() || (a.is_finite() && a > b + step + 1e-9) {
                        v.push(format!("({x},{y}) -> ({nx},{ny}): {a} vs {b} + {step}"));
                    }
                }
            }
        }
    }
    let pose = |rng: &mut ChaCha8Rng| -> (f64, f64, f64) {
        (rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0), rng.gen_range(-PI..PI))
    };
    for _ in 0..1000 {
        let (a, b) = (pose(&mut rng), pose(&mut rng));
        let rho = rng.gen_range(1.0..20.0);
        let (d, e) = (dubins_length(a, b, rho), (b.0 - a.0).hypot(b.1 - a.1));
        if d < e {
            v.push(format!("Dubins {d} < Euclidean {e}"));
        }
    }
    for _ in 0..100 {
        let (x, y, th) = pose(&mut rng);
        let sep = rng.gen_range(0.5..100.0);
        let l = dubins_length((x, y, th), (x + sep * th.cos(), y + sep * th.sin(), th), rng.gen_range(1.0..20.0));
        if (l - sep).abs() > 1e-9 * sep {
            v.push(format!("aligned Dubins {l} vs separation {sep}"));
        }
    }
    summarise(v, format!("Dijkstra table consistent on {edges} free pairs, Dubins checks hold"))
}

fn matrix() -> Result<Vec<TrialResult>, String> {
    let grid = |map: CostMap, conn| Grid2D::new(map, conn, &FIXTURE_61_FACTORS).map_err(|e| e.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let maps = vec![
        MapEntry {
            id: "fixture-61".into(),
            scenario: Scenario::Grid(GridScenario {
                grid: grid(fixture_61(61), Connectivity::Eight)?,
                heuristics: KINDS.to_vec(),
            }),
        },
        MapEntry {
            id: "random-64".into(),
            scenario: Scenario::Grid(GridScenario {
                grid: grid(random_grid(&mut rng, 64, 64, 0.15, (1, 20)), Connectivity::Four)?,
                heuristics: KINDS.to_vec(),
            }),
        },
        MapEntry {
            id: "uav-48".into(),
            scenario: Scenario::Uav(UavScenario {
                uav: Uav4D::new(random_grid(&mut rng, 48, 48, 0.05, (1, 1)), PrimitiveSet::shipped(), 1.0),
                heuristics: vec![UavHeuristic::Euclidean, UavHeuristic::Dubins, UavHeuristic::Dijkstra],
                rho: 8.0,
            }),
        },
    ];
    let spec = MatrixSpec { trials: 4, seed: 5, config: PlannerConfig::default(), jobs: 0, timing: true };
    let mut out = Vec::new();
    for m in &maps {
        let presets = match m.scenario {
            Scenario::Grid(_) => BenchPreset::grid_defaults(),
            Scenario::Uav(_) => BenchPreset::uav_defaults(),
        };
        out.extend(run_matrix(std::slice::from_ref(m), &presets, &spec).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn criterion_9(results: &[TrialResult]) -> Verdict {
    let solved = results.iter().filter(|r| r.row.success).count();
    let errors: Vec<&String> = results.iter().filter_map(|r| r.error.as_ref()).collect();
    if let Some(e) = errors.first() {
        return Err(format!("{} trials errored, first: {e}", errors.len()));
    }
    summarise(
        monotonicity_violations(results),
        format!("{} trials ({solved} solved), costs and bounds never rise", results.len()),
    )
}

fn criterion_10(results: &[TrialResult]) -> Verdict {
    let header = "type octile\nheight 4\nwidth 5\nmap\n.....\n.@@..\n..T..\nG...S\n";
    let m = CostMap::parse(header.as_bytes()).map_err(|e| format!("standard header rejected: {e}"))?;
    if (m.width(), m.height(), m.free_cells().count()) != (5, 4, 16) {
        return Err("standard header parsed wrongly".into());
    }
    let malformed: [(&str, usize, usize); 5] = [
        ("type octile\nheight 3\nwidth 2\nmap\n..\n..\n", 6, 0),
        ("type octile\nheight 2\nwidth 2\nmap\n..\n.?\n", 6, 2),
        ("type octile\nheight 2\nwidth 2\nmap\n...\n..\n", 5, 3),
        ("type octile\nheight x\nwidth 2\nmap\n..\n..\n", 2, 8),
        ("type octile\nheight 2\nwidth 2\nmop\n..\n..\n", 4, 1),
    ];
    for (text, line, column) in malformed {
        match CostMap::parse(text.as_bytes()) {
            Ok(_) => return Err(format!("accepted malformed input {text:?}")),
            Err(e) if (e.line, e.column) != (line, column) => {
                return Err(format!("{text:?}: error at {}:{}, expected {line}:{column}", e.line, e.column))
            }
            Err(_) => {}
        }
    }
    let mut csv = Vec::new();
    write_csv(&mut csv, &["effective config".into()], results).map_err(|e| e.to_string())?;
    let rows = read_csv(csv.as_slice()).map_err(|e| e.to_string())?;
    if rows.len() != results.len() || rows.iter().zip(results).any(|(a, b)| *a != b.row) {
        return Err("CSV re-parse differs from the written rows".into());
    }
    let mut jsonl = Vec::new();
    write_curves(&mut jsonl, results).map_err(|e| e.to_string())?;
    let curves = read_curves(jsonl.as_slice()).map_err(|e| e.to_string())?;
    for r in results {
        if curves.get(&(r.row.map.clone(), r.row.preset.clone(), r.row.trial)) != Some(&r.curve) {
            return Err(format!("curve for {}/{}/{} not preserved", r.row.map, r.row.preset, r.row.trial));
        }
    }
    Ok(format!("header accepted, 5 malformed inputs rejected at their positions, {} CSV rows lossless", rows.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let suite = suite();
    let results = matrix();
    let shared = |f: fn(&Suite) -> Verdict| suite.as_ref().map_err(|e| e.clone()).and_then(f);
    let with_results = |f: fn(&[TrialResult]) -> Verdict| results.as_ref().map_err(|e| e.clone()).and_then(|r| f(r));
    let verdicts = [
        shared(criterion_1),
        shared(criterion_2),
        shared(criterion_3),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        with_results(criterion_9),
        with_results(criterion_10),
    ];
    let mut failed = 0;
    for (i, v) in verdicts.iter().enumerate() {
        match v {
            Ok(msg) => println!("criterion {}: PASS {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {}/10 passed in {:.1}s", 10 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
