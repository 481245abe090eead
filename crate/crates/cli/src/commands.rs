use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use amra_bench::results::{render_summary, summarize};
use amra_bench::verify::{audit, devolution_ara, devolution_trace, run_all, Counterexample, VerifyOptions, DEVOLUTION};
use amra_bench::{run_grid_with, run_matrix, run_uav_with, write_csv, write_curves, BenchPreset, MatrixSpec, Scenario, Task};
use amra_core::grid2d::HeuristicKind;
use amra_core::uav4d::generate_primitive_file;
use amra_core::{PlanOutcome, PlanStatus, SolutionRecord};
use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, ValueEnum};
use serde::Serialize;

use crate::settings::{parse_task, CommonArgs, DomainKind, FileConfig, Settings};
use crate::Exit;

#[derive(Args, Debug)]
pub struct PlanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `x,y` on grids, `x,y[,heading[,speed]]` on uav4d. Defaults to the
    /// builtin's endpoints, else a seeded sample.
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<String>,
    /// Same format as `--start`.
    #[arg(long, allow_hyphen_values = true)]
    pub goal: Option<String>,
    /// amra, mra[-HEURISTIC], ara-{high,mid,low}, wastar, amha-{high,mid,low}.
    #[arg(long)]
    pub preset: Option<String>,
    /// Stop after the first iteration instead of refining.
    #[arg(long)]
    pub single_iteration: bool,
    /// Where to write the final path, one state per line.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct PlanEcho<'a> {
    command: &'static str,
    #[serde(flatten)]
    settings: &'a Settings,
    map: &'a str,
    preset: String,
    start: String,
    goal: String,
    single_iteration: bool,
}

fn echo(out: &mut impl Write, value: &impl Serialize) -> Result<()> {
    writeln!(out, "# config: {}", serde_json::to_string(value)?)?;
    Ok(())
}

pub fn plan(args: PlanArgs) -> Result<Exit> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let settings = Settings::resolve(&args.common, &file, None)?;
    let single = args.single_iteration || file.single_iteration.unwrap_or(false);
    let cfg = settings.planner_config(!single)?;
    let preset: BenchPreset =
        args.preset.clone().or(file.preset.clone()).unwrap_or_else(|| "amra".into()).parse().map_err(anyhow::Error::msg)?;
    let map = match settings.maps.as_slice() {
        [m] => m.clone(),
        [] => bail!("--map is required"),
        _ => bail!("plan takes a single --map"),
    };
    let (entry, builtin_task) = settings.scenario(&map)?;
    let task = match (args.start.clone().or(file.start.clone()), args.goal.clone().or(file.goal.clone())) {
        (Some(s), Some(g)) => parse_task(&entry.scenario, &s, &g)?,
        (None, None) => match builtin_task {
            Some(t) => t,
            None => *amra_bench::scenario::sample_tasks(&entry.scenario, 1, settings.seed)?.first().context("no task sampled")?,
        },
        _ => bail!("--start and --goal must be given together"),
    };
    let (start, goal) = match task {
        Task::Grid(s, g) => (s.to_string(), g.to_string()),
        Task::Uav(s, g) => (s.to_string(), g.to_string()),
    };

    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "# amra plan")?;
    echo(
        &mut out,
        &PlanEcho {
            command: "plan",
            settings: &settings,
            map: &entry.id,
            preset: preset.to_string(),
            start,
            goal,
            single_iteration: single,
        },
    )?;
    writeln!(out, "iteration bound cost time_ms expansions")?;
    out.flush()?;
    drop(out);

    fn line<S>(r: &SolutionRecord<S>) {
        let mut out = io::stdout().lock();
        let _ = writeln!(
            out,
            "{} {} {} {:.3} {}",
            r.iteration,
            r.bound,
            r.cost,
            r.stats.elapsed.as_secs_f64() * 1e3,
            r.stats.expansions_total
        );
        let _ = out.flush();
    }

    match (&entry.scenario, task) {
        (Scenario::Grid(sc), Task::Grid(s, g)) => {
            let outcome = run_grid_with(sc, &preset, s, g, &cfg, &mut |r| line(r))?;
            finish(&outcome, args.out.as_deref())
        }
        (Scenario::Uav(sc), Task::Uav(s, g)) => {
            let outcome = run_uav_with(sc, &preset, s, g, &cfg, &mut |r| line(r))?;
            finish(&outcome, args.out.as_deref())
        }
        _ => unreachable!("task parsed for its own scenario"),
    }
}

fn finish<S: std::fmt::Display>(outcome: &PlanOutcome<S>, path_file: Option<&Path>) -> Result<Exit> {
    let summary = format!(
        "expansions {} iterations {} elapsed_ms {:.3}",
        outcome.expansions_total,
        outcome.iterations.len(),
        outcome.elapsed.as_secs_f64() * 1e3
    );
    if let (Some(best), Some(path)) = (&outcome.best, path_file) {
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        writeln!(w, "# cost {} bound {} states {}", best.cost, best.bound, best.path.len())?;
        for s in best.states() {
            writeln!(w, "{s}")?;
        }
        w.flush()?;
    }
    match (&outcome.best, outcome.status) {
        (Some(best), PlanStatus::BudgetExhausted) => {
            println!("budget exhausted; best cost {} bound {}; {summary}", best.cost, best.bound);
            Ok(Exit::Success)
        }
        (Some(best), _) => {
            println!("solved cost {} bound {}; {summary}", best.cost, best.bound);
            Ok(Exit::Success)
        }
        (None, PlanStatus::NoPath) => {
            println!("no path exists; {summary}");
            Ok(Exit::NoPath)
        }
        (None, _) => {
            println!("timeout without solution; {summary}");
            Ok(Exit::Timeout)
        }
    }
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated presets; the domain's default list otherwise.
    #[arg(long)]
    pub presets: Option<String>,
    /// Tasks sampled per map.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Results CSV; curves go next to it as `<stem>.curves.jsonl`. Without
    /// it the CSV goes to standard output and the summary to standard error.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave the time columns empty so equal flags give byte-identical files.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Serialize)]
struct BenchEcho<'a> {
    command: &'static str,
    #[serde(flatten)]
    settings: &'a Settings,
    presets: Vec<String>,
    trials: usize,
    timing: bool,
}

pub const DEFAULT_BENCH_TIMEOUT_MS: u64 = 5000;
pub const DEFAULT_TRIALS: usize = 10;

pub fn bench(args: BenchArgs) -> Result<Exit> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let mut settings = Settings::resolve(&args.common, &file, Some(DEFAULT_BENCH_TIMEOUT_MS))?;
    if settings.maps.is_empty() {
        settings.maps.push("builtin:fixture-61".into());
    }
    let presets = match args.presets.clone().or_else(|| {
        file.presets.clone().map(|p| match p {
            crate::settings::OneOrMany::One(s) => s,
            crate::settings::OneOrMany::Many(v) => v.join(","),
        })
    }) {
        Some(list) => BenchPreset::parse_list(&list)?,
        None => match settings.domain {
            DomainKind::Grid2d => BenchPreset::grid_defaults(),
            DomainKind::Uav4d => BenchPreset::uav_defaults(),
        },
    };
    let timing = !args.no_timing && file.timing.unwrap_or(true);
    let spec = MatrixSpec {
        trials: args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
        seed: settings.seed,
        config: settings.planner_config(true)?,
        jobs: args.jobs.or(file.jobs).unwrap_or(0),
        timing,
    };
    let maps = settings.maps.iter().map(|m| settings.scenario(m).map(|(e, _)| e)).collect::<Result<Vec<_>>>()?;
    let header = vec![
        "amra bench".to_string(),
        format!(
            "config: {}",
            serde_json::to_string(&BenchEcho {
                command: "bench",
                settings: &settings,
                presets: presets.iter().map(|p| p.to_string()).collect(),
                trials: spec.trials,
                timing,
            })?
        ),
        "failed trials are excluded from the time and cost averages".to_string(),
    ];
    let results = run_matrix(&maps, &presets, &spec)?;

    let summary = render_summary(&summarize(&results.iter().map(|r| r.row.clone()).collect::<Vec<_>>()));
    match args.out.clone().or(file.out.clone()) {
        Some(path) => {
            let csv = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(BufWriter::new(csv), &header, &results)?;
            let curves_path = curves_path(&path);
            let mut w =
                BufWriter::new(File::create(&curves_path).with_context(|| format!("creating {}", curves_path.display()))?);
            for line in &header {
                writeln!(w, "# {line}")?;
            }
            write_curves(&mut w, &results)?;
            w.flush()?;
            print!("{summary}");
        }
        None => {
            write_csv(io::stdout().lock(), &header, &results)?;
            eprint!("{summary}");
        }
    }
    for r in results.iter().filter_map(|r| r.error.as_ref().map(|e| (r, e))) {
        eprintln!("warning: {}/{}/{} failed: {}", r.0.row.map, r.0.row.preset, r.0.row.trial, r.1);
    }
    Ok(Exit::Success)
}

/// `results.csv` -> `results.curves.jsonl`.
pub fn curves_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "results".into());
    csv.with_file_name(format!("{stem}.curves.jsonl"))
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Seed for the random instances.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random instances per suite.
    #[arg(long)]
    pub instances: Option<usize>,
    /// Side of the random maps.
    #[arg(long)]
    pub size: Option<u32>,
    /// Counterexample file (JSON lines); standard error otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Re-run the counterexamples in a file instead of sampling new ones.
    #[arg(long, conflicts_with_all = ["seed", "instances", "size"])]
    pub replay: Option<PathBuf>,
    /// TOML file with `seed`, `instances` and `size` defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn verify(args: VerifyArgs) -> Result<Exit> {
    if let Some(path) = &args.replay {
        return replay(path);
    }
    let file = FileConfig::load(args.config.as_deref())?;
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        instances: args.instances.or(file.instances).unwrap_or(defaults.instances),
        size: args.size.or(file.size).unwrap_or(defaults.size),
    };
    if opts.size < 10 {
        bail!("--size must be at least 10");
    }
    println!("# amra verify");
    println!(
        "# config: {}",
        serde_json::json!({"command": "verify", "seed": opts.seed, "instances": opts.instances, "size": opts.size})
    );
    let reports = run_all(&opts);
    let mut failures = Vec::new();
    for r in &reports {
        if r.passed() {
            println!("PASS {} ({} checked)", r.name, r.checked);
        } else {
            println!("FAIL {} ({} counterexamples over {} checked)", r.name, r.failures.len(), r.checked);
            failures.extend(r.failures.iter().cloned());
        }
    }
    if failures.is_empty() {
        return Ok(Exit::Success);
    }
    let mut sink: Box<dyn Write> = match args.out.clone().or(file.out.clone()) {
        Some(p) => Box::new(BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stderr()),
    };
    for c in &failures {
        writeln!(sink, "{}", serde_json::to_string(c)?)?;
    }
    sink.flush()?;
    Ok(Exit::Failure)
}

fn replay(path: &Path) -> Result<Exit> {
    let f = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    let mut still_failing = 0;
    let mut total = 0;
    for (i, line) in f.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        total += 1;
        let cx: Counterexample = serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
        let case = cx.case().map_err(anyhow::Error::msg)?;
        let problems: Vec<String> = if cx.property == DEVOLUTION {
            [devolution_trace(&case), devolution_ara(&case)].into_iter().filter_map(|r| r.err()).collect()
        } else {
            let cfg = amra_core::PlannerConfig::default().with_weights(cx.w1, cx.w2);
            let kinds = [HeuristicKind::Euclidean, HeuristicKind::Manhattan];
            match audit(&case, &kinds, &BenchPreset::Amra, &cfg) {
                Ok(a) => a.violations.into_iter().filter(|(n, _)| *n == cx.property).map(|(_, d)| d).collect(),
                Err(e) => vec![e],
            }
        };
        if problems.is_empty() {
            println!("line {}: {} no longer fails", i + 1, cx.property);
        } else {
            still_failing += 1;
            println!("line {}: {} still fails: {}", i + 1, cx.property, problems.join("; "));
        }
    }
    println!("{still_failing} of {total} counterexamples still fail");
    Ok(if still_failing == 0 { Exit::Success } else { Exit::Failure })
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MapFormat {
    /// `type cost` with per-cell costs.
    Cost,
    /// MovingAI glyphs; costs are dropped.
    Movingai,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("what").required(true).args(["fixture_61", "primitives"])))]
pub struct GenArgs {
    /// The seeded noise-cost fixture map.
    #[arg(long)]
    pub fixture_61: bool,
    /// The UAV motion primitive file.
    #[arg(long)]
    pub primitives: bool,
    /// Fixture seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "cost")]
    pub format: MapFormat,
    /// Output file; standard output otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn gen(args: GenArgs) -> Result<Exit> {
    let text = if args.fixture_61 {
        let map = amra_bench::fixtures::fixture_61(args.seed.unwrap_or(amra_bench::fixtures::FIXTURE_61_SEED));
        match args.format {
            MapFormat::Cost => map.to_cost_text(),
            MapFormat::Movingai => map.to_movingai(),
        }
    } else {
        if args.seed.is_some() {
            bail!("the primitive generator is deterministic and takes no --seed");
        }
        generate_primitive_file()?
    };
    match args.out {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(Exit::Success)
}
