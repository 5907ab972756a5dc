//! `lab`: command-line driver for the two-round triangle game library.
//!
//! Graphs are read and written in the `n m` / `u v` edge-list format and
//! colourings as `u v r|b` lines. Structured results go to stdout as JSON.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use tworound::census::{count_copies, enumerate_copies, pattern_library, Pattern};
use tworound::collage::{
    extract_core, is_well_behaved, maximal_collages, CoreOptions, EdgeOrder, WellBehavedOptions,
};
use tworound::colouring::{is_t_good, obstruction_report, TwoColouring};
use tworound::density::{completion_threshold, janson_params, ThresholdOptions, DEFAULT_FAMILY_CAP};
use tworound::discharge::very_good_colouring;
use tworound::game::{
    first_round_colouring, online_game, replay_transcript, two_round_game, ArrivalMode, FirstRound, GameParams,
    GameTranscript, StrategySpec, StrategyVariant, TrialSeeds, DEFAULT_SEARCH_BUDGET,
};
use tworound::graph::sample_gnp;
use tworound::lab::{estimate_crossing, run_sweep, write_csv, CurvePoint, OutputFormat, SweepConfig};
use tworound::{Graph, RngSpec};

#[derive(Parser)]
#[command(name = "lab", version, about = "Experiments on two-round triangle games in random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample G(n, p) and print its edge list.
    Gnp {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        p: Density,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count or list copies of library patterns.
    Census {
        #[arg(long)]
        graph: PathBuf,
        /// Pattern names; all library patterns when omitted.
        #[arg(long = "pattern")]
        patterns: Vec<String>,
        /// List the edge sets of copies as well as counting them.
        #[arg(long)]
        list: bool,
    },
    /// Colour a graph for round one and print the colouring.
    Colour {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Obstruction counts and goodness of a coloured graph.
    Analyze {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        colouring: PathBuf,
    },
    /// Maximal collages of a graph with their well-behavedness checks.
    Collage {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Core extraction log for each collage.
    Core {
        #[arg(long)]
        graph: PathBuf,
        /// Only this collage id.
        #[arg(long)]
        collage: Option<usize>,
        /// Do not stop at the size limits taken from the host order.
        #[arg(long)]
        unbounded: bool,
    },
    /// Very good colourings of collages by discharging.
    Vgc {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        collage: Option<usize>,
    },
    /// Janson parameters of the 4-cycle completions of a graph.
    Density {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_FAMILY_CAP)]
        cap: usize,
    },
    /// Completion threshold at (n, p).
    Threshold {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        p: Density,
        #[arg(long, default_value_t = 2.0)]
        window_factor: f64,
    },
    /// Play one two-round game.
    Play {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        p: Density,
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long, default_value = "random")]
        arrival: ArrivalMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Where to store the full transcript.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Re-run and re-check a stored transcript.
    Replay {
        #[arg(long)]
        transcript: PathBuf,
    },
    /// Monte Carlo sweep over (n, p, q).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the output path of the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Estimate where success crosses 1/2 from JSON sweep output.
    Crossing {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value_t = 1000)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Online greedy game on random edges of K_n.
    Online {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Density {
    /// Edge probability.
    #[arg(long)]
    p: Option<f64>,
    /// Use p = n^-gamma.
    #[arg(long)]
    gamma: Option<f64>,
}

impl Density {
    fn at(&self, n: usize) -> f64 {
        match (self.p, self.gamma) {
            (Some(p), _) => p,
            (None, Some(g)) => (n as f64).powf(-g),
            (None, None) => unreachable!("clap requires one of p and gamma"),
        }
    }
}

#[derive(Args)]
struct StrategyArgs {
    /// good, naive or greedy.
    #[arg(long, default_value = "good")]
    strategy: StrategyVariant,
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    budget: u64,
}

impl StrategyArgs {
    fn spec(&self) -> Result<StrategySpec> {
        Ok(StrategySpec::new(self.strategy, self.budget)?)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Graph::parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn print_json(v: &impl Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn patterns(names: &[String]) -> Result<Vec<Pattern>> {
    if names.is_empty() {
        return Ok(pattern_library().into_values().collect());
    }
    names
        .iter()
        .map(|n| Pattern::named(n).with_context(|| format!("pattern {n:?}")))
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gnp { n, p, seed, stream, out } => {
            let g = sample_gnp(n, p.at(n), &RngSpec::new(seed, stream))?;
            emit_text(out.as_deref(), &g.to_edge_list())?;
        }
        Command::Census { graph, patterns: names, list } => {
            let g = read_graph(&graph)?;
            let mut rows = Vec::new();
            for p in patterns(&names)? {
                let row = if list {
                    let copies = enumerate_copies(&g, &p)?;
                    json!({"pattern": p.name, "count": copies.len(), "copies": copies.edge_images().collect::<Vec<_>>()})
                } else {
                    json!({"pattern": p.name, "count": count_copies(&g, &p)?.to_string()})
                };
                rows.push(row);
            }
            print_json(&rows)?;
        }
        Command::Colour { graph, strategy, seed, out } => {
            let g = read_graph(&graph)?;
            match first_round_colouring(&g, &strategy.spec()?, &RngSpec::new(seed, 0))? {
                FirstRound::Coloured { colouring, routing } => {
                    eprintln!("{}", serde_json::to_string(&routing)?);
                    emit_text(out.as_deref(), &colouring.to_text())?;
                }
                FirstRound::Failed(f) => {
                    print_json(&f)?;
                    return Ok(ExitCode::FAILURE);
                }
            }
        }
        Command::Analyze { graph, colouring } => {
            let g = read_graph(&graph)?;
            let text = fs::read_to_string(&colouring).with_context(|| format!("reading {}", colouring.display()))?;
            let phi = TwoColouring::parse(&g, &text)?;
            print_json(&json!({
                "obstructions": obstruction_report(&phi)?,
                "very_good": is_t_good(&phi, 1)?,
            }))?;
        }
        Command::Collage { graph } => {
            let g = read_graph(&graph)?;
            let opts = WellBehavedOptions::default();
            let mut rows = Vec::new();
            for c in maximal_collages(&g) {
                let report = is_well_behaved(&c, g.n(), &opts)?;
                rows.push(json!({
                    "id": c.id,
                    "vertices": c.labels(),
                    "edges": c.host_edges().edges(),
                    "density": c.density().to_string(),
                    "blocks": c.blocks().len(),
                    "well_behaved": report.well_behaved(),
                    "report": report,
                }));
            }
            print_json(&rows)?;
        }
        Command::Core { graph, collage, unbounded } => {
            let g = read_graph(&graph)?;
            let opts = if unbounded { CoreOptions::unbounded() } else { CoreOptions::for_host(g.n()) };
            let mut rows = Vec::new();
            for c in maximal_collages(&g).into_iter().filter(|c| collage.is_none_or(|id| id == c.id)) {
                let out = extract_core(&c, &EdgeOrder::lexicographic(), &opts)?;
                rows.push(json!({"id": c.id, "core": out.core.edges(), "log": out.log}));
            }
            print_json(&rows)?;
        }
        Command::Vgc { graph, collage } => {
            let g = read_graph(&graph)?;
            let mut rows = Vec::new();
            for c in maximal_collages(&g).into_iter().filter(|c| collage.is_none_or(|id| id == c.id)) {
                if collage.is_none() && c.edge_count() < 3 {
                    continue;
                }
                let row = match very_good_colouring(&c) {
                    Ok(v) => json!({
                        "id": c.id,
                        "colouring": v.colouring.coloured_edges().collect::<Vec<_>>(),
                        "steps": v.steps,
                    }),
                    Err(e) => json!({"id": c.id, "error": e}),
                };
                rows.push(row);
            }
            print_json(&rows)?;
        }
        Command::Density { graph, p, cap } => {
            let g = read_graph(&graph)?;
            print_json(&janson_params(&g.to_edge_subset(), p, cap)?)?;
        }
        Command::Threshold { n, p, window_factor } => {
            let opts = ThresholdOptions { window_factor, ..ThresholdOptions::default() };
            print_json(&completion_threshold(n, p.at(n), &opts)?)?;
        }
        Command::Play { n, p, q, strategy, arrival, seed, trial, transcript } => {
            let params = GameParams { n, p: p.at(n), q, arrival };
            let t = two_round_game(&params, &strategy.spec()?, &TrialSeeds::new(seed, trial))?;
            if let Some(path) = transcript {
                fs::write(&path, serde_json::to_string(&t)?).with_context(|| format!("writing {}", path.display()))?;
            }
            print_json(&json!({
                "outcome": t.outcome,
                "g1_edges": t.g1.edge_count(),
                "g2_edges": t.g2.edge_count(),
                "new_edges": t.arrival_order.len(),
                "coloured": t.decisions.len(),
                "round_one": t.round_one,
                "routing": t.routing,
            }))?;
        }
        Command::Replay { transcript } => {
            let text = fs::read_to_string(&transcript).with_context(|| format!("reading {}", transcript.display()))?;
            let t: GameTranscript = serde_json::from_str(&text).context("parsing transcript")?;
            let report = replay_transcript(&t)?;
            print_json(&report)?;
            if !report.ok() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Sweep { config, out, workers } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = SweepConfig::from_json(&text)?;
            if out.is_some() {
                cfg.output = out;
            }
            if workers.is_some() {
                cfg.workers = workers;
            }
            let results = run_sweep(&cfg)?;
            let mut buf = Vec::new();
            match cfg.format {
                OutputFormat::Csv => write_csv(&results, &mut buf)?,
                OutputFormat::Json => {
                    serde_json::to_writer_pretty(&mut buf, &results)?;
                    buf.push(b'\n');
                }
            }
            emit_text(cfg.output.as_deref(), std::str::from_utf8(&buf)?)?;
            for r in results.iter().filter(|r| r.flagged) {
                eprintln!("warning: n = {}, p = {}, q = {}: {} first-round failures", r.n, r.p, r.q, r.first_round_failures);
            }
        }
        Command::Crossing { results, bootstrap, seed } => {
            let text = fs::read_to_string(&results).with_context(|| format!("reading {}", results.display()))?;
            print_json(&crossings(&text, bootstrap, seed)?)?;
        }
        Command::Online { n, budget, seed } => {
            print_json(&online_game(n, budget, &RngSpec::new(seed, 0))?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct SweepRow {
    n: usize,
    p: f64,
    q: f64,
    trials: usize,
    successes: usize,
}

/// One crossing estimate per `(n, p)` curve, in order of first appearance.
fn crossings(text: &str, bootstrap: usize, seed: u64) -> Result<Vec<Value>> {
    let rows: Vec<SweepRow> = serde_json::from_str(text).context("expected JSON sweep output")?;
    if rows.is_empty() {
        bail!("no sweep rows");
    }
    let mut curves: Vec<((usize, f64), Vec<CurvePoint>)> = Vec::new();
    for r in rows {
        let point = CurvePoint { q: r.q, successes: r.successes, trials: r.trials };
        match curves.iter_mut().find(|(k, _)| *k == (r.n, r.p)) {
            Some((_, pts)) => pts.push(point),
            None => curves.push(((r.n, r.p), vec![point])),
        }
    }
    Ok(curves
        .into_iter()
        .enumerate()
        .map(|(i, ((n, p), pts))| match estimate_crossing(&pts, bootstrap, &RngSpec::new(seed, i as u64)) {
            Ok(c) => json!({"n": n, "p": p, "crossing": c}),
            Err(e) => json!({"n": n, "p": p, "error": e.to_string()}),
        })
        .collect())
}
