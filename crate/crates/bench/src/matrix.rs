//! The baseline matrix: every preset on every sampled task of every map.

use std::panic::{catch_unwind, AssertUnwindSafe};

use amra_core::{PlanStatus, PlannerConfig};
use rayon::prelude::*;

use crate::results::{CurvePoint, TrialResult, TrialRow};
use crate::scenario::{run_task, sample_tasks, BenchError, BenchPreset, RunSummary, Scenario, Task};

/// A named scenario.
#[derive(Clone, Debug)]
pub struct MapEntry {
    pub id: String,
    pub scenario: Scenario,
}

#[derive(Clone, Debug)]
pub struct MatrixSpec {
    pub trials: usize,
    pub seed: u64,
    pub config: PlannerConfig,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    /// Record wall-clock columns. Off makes the output byte-reproducible.
    pub timing: bool,
}

/// Seed for the task list of the `index`-th map.
pub fn map_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(index as u64)
}

/// Converts a run into a result row.
pub fn trial_result(map: &str, preset: &BenchPreset, trial: usize, run: &RunSummary, timing: bool) -> TrialResult {
    let ms = |t: f64| if timing { Some(t * 1e3) } else { None };
    let first = run.published.first();
    let last = run.published.last();
    TrialResult {
        row: TrialRow {
            map: map.to_string(),
            preset: preset.to_string(),
            trial,
            success: first.is_some(),
            timeout: run.status == PlanStatus::BudgetExhausted,
            t_i_ms: first.and_then(|p| ms(p.2)),
            t_f_ms: last.and_then(|p| ms(p.2)),
            c_i: first.map(|p| p.1),
            c_f: last.map(|p| p.1),
            expansions: run.expansions,
            iterations: run.iterations,
        },
        curve: run
            .published
            .iter()
            .map(|&(bound, cost, t, expansions)| CurvePoint { bound, cost, time_ms: ms(t), expansions })
            .collect(),
        error: None,
    }
}

fn failed(map: &str, preset: &BenchPreset, trial: usize, why: String) -> TrialResult {
    TrialResult {
        row: TrialRow {
            map: map.to_string(),
            preset: preset.to_string(),
            trial,
            success: false,
            timeout: false,
            t_i_ms: None,
            t_f_ms: None,
            c_i: None,
            c_f: None,
            expansions: 0,
            iterations: 0,
        },
        curve: Vec::new(),
        error: Some(why),
    }
}

/// One trial with panics and planner errors turned into failure rows.
pub fn run_trial(entry: &MapEntry, preset: &BenchPreset, trial: usize, task: Task, spec: &MatrixSpec) -> TrialResult {
    let outcome = catch_unwind(AssertUnwindSafe(|| run_task(&entry.scenario, preset, task, &spec.config)));
    match outcome {
        Ok(Ok(run)) => trial_result(&entry.id, preset, trial, &run, spec.timing),
        Ok(Err(e)) => failed(&entry.id, preset, trial, e.to_string()),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            failed(&entry.id, preset, trial, format!("panicked: {msg}"))
        }
    }
}

/// Runs the matrix. Rows come back ordered by `(map, preset, trial)` as
/// given, whatever the thread count.
pub fn run_matrix(maps: &[MapEntry], presets: &[BenchPreset], spec: &MatrixSpec) -> Result<Vec<TrialResult>, BenchError> {
    let mut jobs = Vec::new();
    for (mi, entry) in maps.iter().enumerate() {
        let tasks = sample_tasks(&entry.scenario, spec.trials, map_seed(spec.seed, mi))?;
        for preset in presets {
            for (t, &task) in tasks.iter().enumerate() {
                jobs.push((entry, preset, t, task));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(spec.jobs).build().map_err(|e| BenchError::Io(e.to_string()))?;
    Ok(pool.install(|| jobs.par_iter().map(|&(entry, preset, t, task)| run_trial(entry, preset, t, task, spec)).collect()))
}

/// Anytime monotonicity violations across results: a published cost or bound
/// that rises within one run.
pub fn monotonicity_violations(results: &[TrialResult]) -> Vec<String> {
    let mut out = Vec::new();
    for r in results {
        for w in r.curve.windows(2) {
            if w[1].cost > w[0].cost || w[1].bound > w[0].bound {
                out.push(format!(
                    "{}/{}/{}: ({}, {}) -> ({}, {})",
                    r.row.map, r.row.preset, r.row.trial, w[0].bound, w[0].cost, w[1].bound, w[1].cost
                ));
            }
        }
    }
    out
}
