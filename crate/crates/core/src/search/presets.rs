//! Configurations under which the planner reduces to known algorithms.
//!
//! | preset | resolutions | heuristics per resolution | anytime |
//! |--------|-------------|---------------------------|---------|
//! | wA*    | 1           | 1                         | no      |
//! | ARA*   | 1           | 1                         | yes     |
//! | MHA*   | 1           | many                      | no      |
//! | A-MHA* | 1           | many                      | yes     |
//! | MRA*   | many        | 1                         | no      |
//! | AMRA*  | many        | many                      | yes     |
//!
//! Single-resolution presets on a multi-resolution domain are obtained by
//! wrapping the domain in [`SingleResolution`](super::SingleResolution).

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use super::config::PlannerConfig;
use super::domain::Domain;
use super::planner::{PlanOutcome, PlanStatus, Planner};
use super::problem::{Heuristics, ProblemInstance};
use super::solution::SolutionRecord;
use super::PlanError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PresetKind {
    WeightedAStar,
    Ara,
    Mha,
    AMha,
    Mra,
    Amra,
}

impl PresetKind {
    pub const ALL: [PresetKind; 6] =
        [PresetKind::WeightedAStar, PresetKind::Ara, PresetKind::Mha, PresetKind::AMha, PresetKind::Mra, PresetKind::Amra];

    pub fn anytime(self) -> bool {
        matches!(self, PresetKind::Ara | PresetKind::AMha | PresetKind::Amra)
    }

    pub fn multi_resolution(self) -> bool {
        matches!(self, PresetKind::Mra | PresetKind::Amra)
    }

    pub fn multi_heuristic(self) -> bool {
        matches!(self, PresetKind::Mha | PresetKind::AMha | PresetKind::Amra)
    }

    /// `base` with the iteration behaviour of this preset. A base with
    /// `anytime` off keeps anytime presets to their first iteration.
    pub fn config(self, base: &PlannerConfig) -> PlannerConfig {
        PlannerConfig { anytime: self.anytime() && base.anytime, ..base.clone() }
    }

    /// Rejects domain/heuristic shapes the preset does not allow.
    pub fn check_shape<S>(self, num_resolutions: usize, heuristics: &Heuristics<'_, S>) -> Result<(), PlanError> {
        if !self.multi_resolution() && num_resolutions != 1 {
            return Err(PlanError::InvalidConfig(format!(
                "{self} searches one resolution; wrap the domain in SingleResolution (it has {num_resolutions})"
            )));
        }
        if !self.multi_heuristic() {
            for r in 1..=num_resolutions {
                let n = heuristics.queues.iter().filter(|q| q.res == r).count();
                if n != 1 {
                    return Err(PlanError::InvalidConfig(format!(
                        "{self} takes exactly one heuristic per resolution; resolution {r} has {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Queue layout `(heuristic index, resolution)` for `num_heuristics`
    /// candidate heuristics over `num_resolutions` resolutions. Single-heuristic
    /// presets use heuristic 0 everywhere.
    pub fn layout(self, num_resolutions: usize, num_heuristics: usize) -> Vec<(usize, usize)> {
        let per_res = if self.multi_heuristic() { num_heuristics.max(1) } else { 1 };
        (1..=num_resolutions).flat_map(|r| (0..per_res).map(move |h| (h, r))).collect()
    }

    /// Runs the preset. MRA* and MHA* run a single iteration.
    pub fn run<D: Domain>(
        self,
        problem: &ProblemInstance<'_, D>,
        heuristics: &Heuristics<'_, D::State>,
        base: &PlannerConfig,
        on_solution: impl FnMut(&SolutionRecord<D::State>),
    ) -> Result<PlanOutcome<D::State>, PlanError> {
        self.check_shape(problem.domain.num_resolutions(), heuristics)?;
        Planner::new(problem, heuristics, self.config(base))?.plan(on_solution)
    }
}

impl fmt::Display for PresetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PresetKind::WeightedAStar => "wA*",
            PresetKind::Ara => "ARA*",
            PresetKind::Mha => "MHA*",
            PresetKind::AMha => "A-MHA*",
            PresetKind::Mra => "MRA*",
            PresetKind::Amra => "AMRA*",
        })
    }
}

impl FromStr for PresetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Ok(match norm.as_str() {
            "wa" | "wastar" | "weighteda" | "weightedastar" => PresetKind::WeightedAStar,
            "ara" | "arastar" => PresetKind::Ara,
            "mha" | "mhastar" => PresetKind::Mha,
            "amha" | "amhastar" => PresetKind::AMha,
            "mra" | "mrastar" => PresetKind::Mra,
            "amra" | "amrastar" => PresetKind::Amra,
            _ => return Err(format!("unknown preset {s:?}")),
        })
    }
}

/// A fresh single-iteration search for every `(w1, w2)` of the anytime
/// schedule, the way a non-anytime planner is made to produce a convergence
/// curve. Expansion counts and times accumulate across the searches; the
/// budget covers the whole succession. A search that does worse than the
/// incumbent republishes the incumbent under the new bound.
pub fn plan_succession<D: Domain>(
    problem: &ProblemInstance<'_, D>,
    heuristics: &Heuristics<'_, D::State>,
    config: &PlannerConfig,
    mut on_solution: impl FnMut(&SolutionRecord<D::State>),
) -> Result<PlanOutcome<D::State>, PlanError> {
    let started = Instant::now();
    let anytime = PlannerConfig { anytime: true, ..config.clone() };
    let mut best: Option<SolutionRecord<D::State>> = None;
    let mut published = Vec::new();
    let mut iterations = Vec::new();
    let mut expansions_total = 0;
    let mut status = PlanStatus::Finished;

    for (k, (w1, w2)) in anytime.weight_sequence().into_iter().enumerate() {
        let mut sub = PlannerConfig { anytime: false, w1_init: w1, w2_init: w2, ..config.clone() };
        if let Some(limit) = config.time_budget {
            match limit.checked_sub(started.elapsed()) {
                Some(rest) if !rest.is_zero() => sub.time_budget = Some(rest),
                _ => {
                    status = PlanStatus::BudgetExhausted;
                    break;
                }
            }
        }
        if let Some(cap) = config.expansion_budget {
            if expansions_total >= cap {
                status = PlanStatus::BudgetExhausted;
                break;
            }
            sub.expansion_budget = Some(cap - expansions_total);
        }

        let run = Planner::new(problem, heuristics, sub)?.plan(|_| {})?;
        let offset = started.elapsed().saturating_sub(run.elapsed);
        for mut stats in run.iterations {
            stats.iteration = k as u32 + 1;
            stats.expansions_total += expansions_total;
            stats.elapsed += offset;
            iterations.push(stats);
        }
        expansions_total += run.expansions_total;

        match (run.status, run.best) {
            (PlanStatus::NoPath, _) => {
                status = PlanStatus::NoPath;
                break;
            }
            (PlanStatus::BudgetExhausted, _) => {
                status = PlanStatus::BudgetExhausted;
                break;
            }
            (_, Some(mut record)) => {
                record.iteration = k as u32 + 1;
                record.stats = iterations.last().cloned().unwrap_or_default();
                if let Some(b) = &best {
                    if b.cost < record.cost {
                        record.path = b.path.clone();
                        record.cost = b.cost;
                    }
                }
                on_solution(&record);
                published.push(record.clone());
                best = Some(record);
            }
            (PlanStatus::Finished, None) => {}
        }
    }

    Ok(PlanOutcome { status, best, published, iterations, expansions_total, elapsed: started.elapsed() })
}
