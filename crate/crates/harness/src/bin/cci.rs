use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use cci_core::coloring::dependent_edge_coloring;
use cci_core::model::{validate, Network};
use cci_core::optimizer::{optimize_allowed_interference, RatioObjective, RatioSearchConfig};
use cci_core::planner::{plan_frequencies, PlannerConfig};
use cci_core::power::baseline_capacity;
use cci_core::radio::watts_to_dbm;
use cci_harness::derive::{derive_interference_edges, DEFAULT_SIR_THRESHOLD};
use cci_harness::experiment::{run_experiment, ExperimentConfig};
use cci_harness::gen::{generate_random_network, GenConfig};
use cci_harness::io::{network_from_json, network_to_json, report_to_json, write_report_csv};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "cci",
    version,
    about = "Co-channel interference scheduling and frequency planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Network JSON; `-` reads stdin.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Defaults to stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct Search {
    #[arg(long, default_value_t = 9)]
    k: usize,
    #[arg(long, default_value_t = 1e-3)]
    x0: f64,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    #[arg(long, default_value_t = 1e-3)]
    rel_tol: f64,
}

impl From<Search> for RatioSearchConfig {
    fn from(s: Search) -> Self {
        Self {
            k: s.k,
            x0: s.x0,
            max_depth: s.depth,
            rel_tol: s.rel_tol,
        }
    }
}

#[derive(Args, Clone, Copy)]
struct Shape {
    #[arg(long, short = 'v', default_value_t = 20)]
    nodes: usize,
    #[arg(long, short = 'e', default_value_t = 30)]
    links: usize,
    #[arg(long, short = 'd', default_value_t = 10)]
    degree: usize,
    /// Square side in meters; scales with the node count by default.
    #[arg(long)]
    area: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SIR_THRESHOLD)]
    sir_threshold: f64,
}

impl Shape {
    fn gen(&self, seed: u64) -> GenConfig {
        let mut cfg = GenConfig::new(self.nodes, self.links, self.degree, seed);
        if let Some(a) = self.area {
            cfg.area_m = a;
        }
        cfg
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check a network document; exits 2 when it has problems.
    Validate(Io),
    /// Slot label of every link.
    Color(Io),
    /// Power table at a given ratio, or at the optimised one.
    Schedule {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        ratio: Option<f64>,
        #[command(flatten)]
        search: Search,
    },
    /// Search for the capacity-maximising allowed-interference ratio.
    OptimizeX {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        search: Search,
    },
    /// Split links across extra frequencies while it pays.
    PlanFreqs {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 100.0)]
        ratio: f64,
        /// Minimum capacity gain per added frequency, bits/s.
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        #[arg(long, default_value_t = 4)]
        max_freqs: usize,
    },
    /// Random network with red edges derived from geometry.
    Gen {
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        shape: Shape,
    },
    /// Dynamic power against the full-power baseline over random trials.
    Bench {
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        search: Search,
    },
}

enum Outcome {
    Ok,
    Invalid,
}

fn read_network(path: Option<&PathBuf>) -> Result<Network> {
    let text = match path {
        None => anyhow::bail!("--input is required"),
        Some(p) if p.as_os_str() == "-" => std::io::read_to_string(std::io::stdin())?,
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
    };
    Ok(network_from_json(&text)?)
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

/// Loads the input and reports validation problems on stderr.
fn load_valid(io: &Io) -> Result<Option<Network>> {
    let net = read_network(io.input.as_ref())?;
    let problems = validate(&net);
    if problems.is_empty() {
        return Ok(Some(net));
    }
    for p in &problems {
        eprintln!("{p}");
    }
    Ok(None)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Validate(io) => {
            let net = read_network(io.input.as_ref())?;
            let problems = validate(&net);
            let lines: Vec<String> = problems.iter().map(|p| p.to_string()).collect();
            let text = if lines.is_empty() {
                "ok".to_string()
            } else {
                lines.join("\n")
            };
            emit(io.output.as_ref(), &text)?;
            return Ok(if problems.is_empty() {
                Outcome::Ok
            } else {
                Outcome::Invalid
            });
        }
        Command::Color(io) => {
            let Some(net) = load_valid(&io)? else {
                return Ok(Outcome::Invalid);
            };
            let q = dependent_edge_coloring(&net);
            let doc = json!({ "num_slots": q.num_slots(), "labels": q.labels() });
            emit(io.output.as_ref(), &serde_json::to_string_pretty(&doc)?)?;
        }
        Command::Schedule { io, ratio, search } => {
            let Some(net) = load_valid(&io)? else {
                return Ok(Outcome::Invalid);
            };
            let objective = RatioObjective::new(&net)?;
            let x = match ratio {
                Some(x) => x,
                None => optimize_allowed_interference(&net, &search.into())?.x_m,
            };
            let table = objective.table(x)?;
            let rows: Vec<Vec<f64>> = net
                .link_ids()
                .map(|l| table.row(l).iter().map(|&w| watts_to_dbm(w)).collect())
                .collect();
            let doc = json!({
                "ratio": x,
                "num_slots": table.num_slots(),
                "labels": objective.schedule().labels(),
                "power_dbm": rows,
                "capacity_bps": objective.capacity(x)?,
                "baseline_bps": baseline_capacity(&net, objective.propagation())?,
            });
            emit(io.output.as_ref(), &serde_json::to_string_pretty(&doc)?)?;
        }
        Command::OptimizeX { io, search } => {
            let Some(net) = load_valid(&io)? else {
                return Ok(Outcome::Invalid);
            };
            let r = optimize_allowed_interference(&net, &search.into())?;
            let doc = json!({
                "x_m": r.x_m,
                "y_m": r.y_m,
                "depth_used": r.depth_used,
                "evaluations": r.evaluations,
                "brackets": r.brackets,
                "samples": r.samples,
            });
            emit(io.output.as_ref(), &serde_json::to_string_pretty(&doc)?)?;
        }
        Command::PlanFreqs {
            io,
            ratio,
            threshold,
            max_freqs,
        } => {
            let Some(net) = load_valid(&io)? else {
                return Ok(Outcome::Invalid);
            };
            let cfg = PlannerConfig {
                ratio,
                profit_threshold: threshold,
                max_freqs,
            };
            let plan = plan_frequencies(&net, &cfg)?;
            let groups: Vec<_> = plan
                .groups
                .iter()
                .map(|g| {
                    json!({
                        "links": g.links.iter().map(|l| l.index()).collect::<Vec<_>>(),
                        "num_slots": g.schedule.num_slots(),
                        "capacity_bps": g.capacity,
                    })
                })
                .collect();
            let doc = json!({
                "assignments": plan.assignments,
                "groups": groups,
                "profit_trace": plan.profit_trace,
                "total_capacity_bps": plan.total_capacity(),
            });
            emit(io.output.as_ref(), &serde_json::to_string_pretty(&doc)?)?;
        }
        Command::Gen { output, seed, shape } => {
            let net = generate_random_network(&shape.gen(seed))?;
            let net = derive_interference_edges(&net, shape.sir_threshold)?;
            emit(output.as_ref(), &network_to_json(&net))?;
        }
        Command::Bench {
            output,
            seed,
            trials,
            format,
            shape,
            search,
        } => {
            let cfg = ExperimentConfig {
                sir_threshold: shape.sir_threshold,
                search: search.into(),
                ..ExperimentConfig::new(shape.gen(seed), trials)
            };
            let report = run_experiment(&cfg)?;
            let text = match format {
                Format::Json => report_to_json(&report),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_report_csv(&report, &mut buf)?;
                    String::from_utf8(buf)?
                }
            };
            emit(output.as_ref(), &text)?;
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Invalid) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
