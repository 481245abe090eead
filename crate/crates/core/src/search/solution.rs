use std::fmt::{self, Display, Write as _};
use std::time::Duration;

use super::domain::{ActionId, Domain};
use super::problem::ProblemInstance;

/// Counters for one anytime iteration.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterationStats {
    pub iteration: u32,
    pub w1: f64,
    pub w2: f64,
    /// Expansions in this iteration.
    pub expansions: u64,
    /// Expansions accumulated over the whole run up to the end of this iteration.
    pub expansions_total: u64,
    /// Indexed by queue (`0` = anchor).
    pub expansions_per_queue: Vec<u64>,
    /// Indexed by resolution (`0` = anchor).
    pub expansions_per_resolution: Vec<u64>,
    pub max_expansions_of_any_state: u32,
    /// Time since the start of the run when the iteration ended.
    pub elapsed: Duration,
    /// Queue sizes when the iteration ended.
    pub open_sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Waypoint<S> {
    pub state: S,
    /// Action that led into `state`; `None` for the start.
    pub action: Option<ActionId>,
    /// Cost accumulated along the path up to `state`.
    pub g: f64,
}

/// A published solution.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionRecord<S> {
    pub path: Vec<Waypoint<S>>,
    pub cost: f64,
    /// `w1 * w2` at publication.
    pub bound: f64,
    pub iteration: u32,
    pub stats: IterationStats,
}

impl<S> SolutionRecord<S> {
    pub fn states(&self) -> impl Iterator<Item = &S> {
        self.path.iter().map(|w| &w.state)
    }
}

impl<S: Display> SolutionRecord<S> {
    /// Line-oriented text form: a header line
    /// `cost=<v> bound=<v> iter=<n> expansions=<n>` followed by one
    /// `state<TAB>g` line per waypoint.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "cost={} bound={} iter={} expansions={}",
            self.cost, self.bound, self.iteration, self.stats.expansions_total
        )
        .unwrap();
        for w in &self.path {
            writeln!(out, "{}\t{}", w.state, w.g).unwrap();
        }
        out
    }
}

/// Header fields of the text form.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionHeader {
    pub cost: f64,
    pub bound: f64,
    pub iteration: u32,
    pub expansions: u64,
}

impl SolutionHeader {
    /// Parses the header of [`SolutionRecord::to_text`] output, skipping
    /// leading `#` comment lines.
    pub fn parse(text: &str) -> Option<SolutionHeader> {
        let line = text.lines().find(|l| !l.starts_with('#'))?;
        let mut cost = None;
        let mut bound = None;
        let mut iteration = None;
        let mut expansions = None;
        for field in line.split_whitespace() {
            let (k, v) = field.split_once('=')?;
            match k {
                "cost" => cost = v.parse().ok(),
                "bound" => bound = v.parse().ok(),
                "iter" => iteration = v.parse().ok(),
                "expansions" => expansions = v.parse().ok(),
                _ => return None,
            }
        }
        Some(SolutionHeader { cost: cost?, bound: bound?, iteration: iteration?, expansions: expansions? })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathDefect {
    Empty,
    WrongStart,
    NotAGoal,
    /// Waypoint `index` is not reachable from its predecessor by the recorded action.
    BrokenEdge {
        index: usize,
    },
    CostMismatch {
        recorded: f64,
        recomputed: f64,
    },
}

impl fmt::Display for PathDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathDefect::Empty => write!(f, "empty path"),
            PathDefect::WrongStart => write!(f, "path does not begin at the start state"),
            PathDefect::NotAGoal => write!(f, "path does not end in a goal state"),
            PathDefect::BrokenEdge { index } => write!(f, "waypoint {index} is not a successor of its predecessor"),
            PathDefect::CostMismatch { recorded, recomputed } => {
                write!(f, "recorded cost {recorded} differs from recomputed {recomputed}")
            }
        }
    }
}

/// Replays `record` against the domain: checks endpoints, that every step is
/// an anchor action with the recorded id, and returns the recomputed cost.
pub fn validate_path<D: Domain>(problem: &ProblemInstance<'_, D>, record: &SolutionRecord<D::State>) -> Result<f64, PathDefect> {
    let first = record.path.first().ok_or(PathDefect::Empty)?;
    if first.state != problem.start {
        return Err(PathDefect::WrongStart);
    }
    if !problem.is_goal(&record.path.last().unwrap().state) {
        return Err(PathDefect::NotAGoal);
    }
    let mut total = 0.0;
    let mut succs = Vec::new();
    for (i, pair) in record.path.windows(2).enumerate() {
        succs.clear();
        problem.domain.anchor_successors(&pair[0].state, &mut succs);
        let edge = succs
            .iter()
            .filter(|s| s.state == pair[1].state && Some(s.action) == pair[1].action)
            .map(|s| s.cost)
            .reduce(f64::min)
            .ok_or(PathDefect::BrokenEdge { index: i + 1 })?;
        total += edge;
    }
    let tol = 1e-9 * total.abs().max(1.0);
    if (total - record.cost).abs() > tol {
        return Err(PathDefect::CostMismatch { recorded: record.cost, recomputed: total });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_and_header_parse() {
        let rec = SolutionRecord {
            path: vec![Waypoint { state: 1u32, action: None, g: 0.0 }, Waypoint { state: 2u32, action: Some(7), g: 2.5 }],
            cost: 2.5,
            bound: 1.5,
            iteration: 2,
            stats: IterationStats { expansions_total: 42, ..Default::default() },
        };
        let text = rec.to_text();
        assert_eq!(text, "cost=2.5 bound=1.5 iter=2 expansions=42\n1\t0\n2\t2.5\n");
        let header = SolutionHeader::parse(&format!("# echo\n{text}")).unwrap();
        assert_eq!(header, SolutionHeader { cost: 2.5, bound: 1.5, iteration: 2, expansions: 42 });
        assert!(SolutionHeader::parse("cost=1 bogus=2").is_none());
    }
}
