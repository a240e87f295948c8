//! `pfgr`: generate, reduce, solve and bound OV and diameter instances.

mod record;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pfgr_core::bench::{engine_slope, ov_scaling, to_csv, OvEngine};
use pfgr_core::calculus::{compose_closure, parse_claim, parse_ledger, FpiClaim, ReductionDescriptor, DIAMETER_CLAIM, LEDGER};
use pfgr_core::generate::gen_ov;
use pfgr_core::twdiam::{diameter_td_with, solve_ov_via_diameter, EngineConfig, SolveOptions, DEFAULT_MAX_D};
use pfgr_core::{
    diameter_brute, ov_brute, ov_graph_decomposition, ov_to_diameter, parse_dimacs, parse_graph, parse_ov, parse_td, sat_to_ov,
    validate_td, write_graph, write_ov, write_td,
};

use record::{InputSummary, ResultRecord, Timings};

#[derive(Parser, Debug)]
#[command(name = "pfgr", version, about = "Orthogonal Vectors, diameter by treewidth, and running-time closure arithmetic")]
struct Cli {
    #[command(flatten)]
    output: Output,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Print the structured record as JSON instead of the human-readable line
    #[arg(long, global = true)]
    json: bool,

    /// Append the structured record as a JSON line to FILE
    #[arg(long, global = true, value_name = "FILE")]
    record: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random OV instance with n vectors per side
    GenOv {
        n: usize,
        d: usize,
        /// Force one orthogonal pair
        #[arg(long)]
        plant: bool,
        #[arg(long)]
        seed: u64,
        /// Write to FILE instead of stdout
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Decide whether an OV instance has an orthogonal pair
    SolveOv {
        #[arg(long, value_enum)]
        engine: EngineArg,
        /// Largest dimension the diam engine accepts
        #[arg(long, default_value_t = DEFAULT_MAX_D)]
        max_d: usize,
        file: PathBuf,
    },
    /// Run a reduction and write its output next to PREFIX
    Reduce {
        #[arg(value_enum)]
        reduction: ReductionArg,
        file: PathBuf,
        /// Output path prefix; defaults to the input path without extension
        #[arg(long, value_name = "PREFIX")]
        out: Option<PathBuf>,
    },
    /// Compute the exact diameter of a graph
    Diam {
        #[arg(long, value_enum)]
        algo: AlgoArg,
        graph: PathBuf,
        /// Tree decomposition, required by `--algo td`
        td: Option<PathBuf>,
    },
    /// Check a tree decomposition against a graph
    ValidateTd { graph: PathBuf, td: PathBuf },
    /// Time solvers and print CSV
    Bench {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "brute,diam")]
        engines: Vec<EngineArg>,
        #[arg(long, default_value_t = DEFAULT_MAX_D)]
        max_d: usize,
    },
    /// Derive a running-time claim through one or more ledger reductions
    Calc {
        /// Ledger TOML; defaults to the shipped ledger
        #[arg(long)]
        ledger: Option<PathBuf>,
        /// Claim TOML for the target problem; defaults to the diameter claim
        #[arg(long)]
        claim: Option<PathBuf>,
        /// Reductions to apply, nearest the claim first; defaults to the
        /// only ledger row targeting the claim's problem
        #[arg(long, value_name = "NAME")]
        via: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Brute,
    Diam,
}

impl From<EngineArg> for OvEngine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Brute => OvEngine::Brute,
            EngineArg::Diam => OvEngine::Diam,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReductionArg {
    Sat2ov,
    Ov2diam,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    Brute,
    Td,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    OvScaling,
}

/// A run's outcome: the record and its human-readable form.
struct Outcome {
    record: ResultRecord,
    human: String,
    success: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command).and_then(|o| emit(&cli.output, o)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("pfgr: error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(output: &Output, outcome: Option<Outcome>) -> Result<bool> {
    let Some(o) = outcome else {
        return Ok(true);
    };
    if output.json {
        println!("{}", o.record.to_json());
    } else {
        println!("{}", o.human);
    }
    if let Some(path) = &output.record {
        o.record.append_to(path)?;
    }
    Ok(o.success)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

fn run(command: Command) -> Result<Option<Outcome>> {
    match command {
        Command::GenOv { n, d, plant, seed, out } => {
            let text = write_ov(&gen_ov(n, d, plant, seed)?);
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(None)
        }
        Command::SolveOv { engine, max_d, file } => solve_ov(engine, max_d, &file).map(Some),
        Command::Reduce { reduction, file, out } => reduce(reduction, &file, out).map(Some),
        Command::Diam { algo, graph, td } => diam(algo, &graph, td.as_deref()).map(Some),
        Command::ValidateTd { graph, td } => {
            let g = parse_graph(&read(&graph)?)?;
            let t = parse_td(&read(&td)?)?;
            let report = validate_td(&g, &t);
            let mut record = ResultRecord::new("validate-td", report.is_valid());
            record.input = InputSummary {
                vertices: Some(g.vertex_count()),
                edges: Some(g.edge_count()),
                width: Some(report.width),
                ..InputSummary::default()
            };
            let human = if report.is_valid() {
                format!("valid decomposition, width {}", report.width)
            } else {
                format!("invalid decomposition: {report}")
            };
            Ok(Some(Outcome {
                record,
                human,
                success: report.is_valid(),
            }))
        }
        Command::Bench {
            suite: SuiteArg::OvScaling,
            d,
            n_list,
            reps,
            seed,
            engines,
            max_d,
        } => {
            let engines: Vec<OvEngine> = engines.into_iter().map(OvEngine::from).collect();
            let options = SolveOptions {
                max_d,
                ..SolveOptions::default()
            };
            let rows = ov_scaling(d, &n_list, reps, seed, &engines, &options)?;
            print!("{}", to_csv(&rows));
            for &e in &engines {
                if let Some(slope) = engine_slope(&rows, e) {
                    eprintln!("{e}: log-log slope {slope:.3}");
                }
            }
            Ok(None)
        }
        Command::Calc { ledger, claim, via } => calc(ledger.as_deref(), claim.as_deref(), &via).map(Some),
    }
}

fn solve_ov(engine: EngineArg, max_d: usize, file: &Path) -> Result<Outcome> {
    let instance = parse_ov(&read(file)?)?;
    let mut record;
    let human;
    match engine {
        EngineArg::Brute => {
            let start = Instant::now();
            let pair = ov_brute(&instance);
            let solve_ms = ms(start);
            record = ResultRecord::new("solve-ov", pair.is_some());
            record.timings = Timings {
                reduce_ms: 0.0,
                solve_ms,
                total_ms: solve_ms,
            };
            human = match pair {
                Some((i, j)) => format!("orthogonal pair: yes (a{} . b{} = 0)", i + 1, j + 1),
                None => "orthogonal pair: no".to_string(),
            };
        }
        EngineArg::Diam => {
            let options = SolveOptions {
                max_d,
                ..SolveOptions::default()
            };
            let report = solve_ov_via_diameter(&instance, &options)?;
            record = ResultRecord::new("solve-ov", report.orthogonal).with_stats(&report.stats);
            record.input.width = Some(report.width);
            record.timings = Timings {
                reduce_ms: report.reduce_ms,
                solve_ms: report.solve_ms,
                total_ms: report.total_ms,
            };
            human = format!(
                "orthogonal pair: {} (diameter {})",
                if report.orthogonal { "yes" } else { "no" },
                report.diameter
            );
        }
    }
    record.engine = Some(OvEngine::from(engine).to_string());
    record.input.n = Some(instance.n_a());
    record.input.n_b = Some(instance.n_b());
    record.input.d = Some(instance.dim());
    Ok(Outcome {
        record,
        human,
        success: true,
    })
}

fn reduce(reduction: ReductionArg, file: &Path, out: Option<PathBuf>) -> Result<Outcome> {
    let prefix = out.unwrap_or_else(|| file.with_extension(""));
    let with_ext = |ext: &str| -> PathBuf {
        let mut p = prefix.clone().into_os_string();
        p.push(ext);
        PathBuf::from(p)
    };
    let start = Instant::now();
    let mut input = InputSummary::default();
    let (mapping, written) = match reduction {
        ReductionArg::Ov2diam => {
            let instance = parse_ov(&read(file)?)?;
            let (graph, mapping) = ov_to_diameter(&instance);
            let td = ov_graph_decomposition(&instance);
            let (gpath, tpath) = (with_ext(".graph"), with_ext(".td"));
            write(&gpath, &write_graph(&graph))?;
            write(&tpath, &write_td(&td, graph.vertex_count()))?;
            input.n = Some(instance.n_a());
            input.n_b = Some(instance.n_b());
            input.d = Some(instance.dim());
            input.width = Some(td.width());
            (mapping, vec![gpath, tpath])
        }
        ReductionArg::Sat2ov => {
            let cnf = parse_dimacs(&read(file)?)?;
            let (instance, mapping) = sat_to_ov(&cnf)?;
            let path = with_ext(".ov");
            write(&path, &write_ov(&instance))?;
            input.n = Some(cnf.num_vars());
            input.m = Some(cnf.num_clauses());
            (mapping, vec![path])
        }
    };
    let reduce_ms = ms(start);
    let mut record = ResultRecord::new("reduce", serde_json::to_value(&mapping)?);
    record.engine = Some(mapping.reduction_id.clone());
    record.input = input;
    record.timings = Timings {
        reduce_ms,
        solve_ms: 0.0,
        total_ms: reduce_ms,
    };
    let files: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    let human = format!("{} [{}] -> {}", mapping.reduction_id, mapping.formula, files.join(", "));
    Ok(Outcome {
        record,
        human,
        success: true,
    })
}

fn diam(algo: AlgoArg, graph_path: &Path, td_path: Option<&Path>) -> Result<Outcome> {
    let graph = parse_graph(&read(graph_path)?)?;
    let mut record;
    let start = Instant::now();
    match algo {
        AlgoArg::Brute => {
            let d = diameter_brute(&graph)?;
            record = ResultRecord::new("diam", d);
        }
        AlgoArg::Td => {
            let td_path = td_path.ok_or_else(|| anyhow!("--algo td needs a decomposition file"))?;
            let td = parse_td(&read(td_path)?)?;
            let (d, stats) = diameter_td_with(&graph, &td, &EngineConfig::default())?;
            record = ResultRecord::new("diam", d).with_stats(&stats);
            record.input.width = Some(td.width());
        }
    }
    let solve_ms = ms(start);
    record.engine = Some(match algo {
        AlgoArg::Brute => "brute".into(),
        AlgoArg::Td => "td".into(),
    });
    record.input.vertices = Some(graph.vertex_count());
    record.input.edges = Some(graph.edge_count());
    record.timings = Timings {
        reduce_ms: 0.0,
        solve_ms,
        total_ms: solve_ms,
    };
    let human = format!("diameter {}", record.answer);
    Ok(Outcome {
        record,
        human,
        success: true,
    })
}

fn calc(ledger: Option<&Path>, claim: Option<&Path>, via: &[String]) -> Result<Outcome> {
    let ledger = match ledger {
        Some(p) => parse_ledger(&read(p)?)?,
        None => parse_ledger(LEDGER)?,
    };
    let mut current: FpiClaim = match claim {
        Some(p) => parse_claim(&read(p)?)?,
        None => parse_claim(DIAMETER_CLAIM)?,
    };
    let chain: Vec<&ReductionDescriptor> = if via.is_empty() {
        let targeting: Vec<&ReductionDescriptor> = ledger.iter().filter(|r| r.target == current.problem).collect();
        match targeting.as_slice() {
            [only] => vec![*only],
            [] => bail!("no ledger reduction targets `{}`", current.problem),
            many => bail!(
                "several reductions target `{}` ({}); choose one with --via",
                current.problem,
                many.iter().map(|r| r.name.as_str()).collect::<Vec<_>>().join(", ")
            ),
        }
    } else {
        via.iter()
            .map(|name| ledger.iter().find(|r| &r.name == name).ok_or_else(|| anyhow!("no ledger reduction named `{name}`")))
            .collect::<Result<_>>()?
    };
    let start = Instant::now();
    for red in chain {
        current = compose_closure(red, &current).with_context(|| format!("composing through `{}`", red.name))?;
    }
    let solve_ms = ms(start);
    let mut record = ResultRecord::new(
        "calc",
        serde_json::json!({
            "problem": current.problem,
            "parameters": current.parameters,
            "bound": current.bound.to_string(),
            "param_factor": current.param_factor().to_string(),
            "base_bound": current.base_bound.as_ref().map(ToString::to_string),
            "improvement": current.improvement.to_string(),
        }),
    );
    record.timings = Timings {
        reduce_ms: 0.0,
        solve_ms,
        total_ms: solve_ms,
    };
    Ok(Outcome {
        record,
        human: current.bound.to_string(),
        success: true,
    })
}
