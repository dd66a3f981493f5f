//! Command-line front end: builds reduction instances, converts between covers
//! and clusterings, runs solvers and writes verification reports.
//!
//! Exit codes: 0 on success, 1 when a verification fails or an input is
//! rejected by a check, 2 on usage and I/O errors.

mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anonhard::abp::{self, AbpInstance};
use anonhard::ap8::{self, ApInstance};
use anonhard::graphs::{
    exact_vertex_cover, greedy_vertex_cover, parse_graph, random_cubic, write_graph,
};
use anonhard::io::{self, Layout3, Layout4};
use anonhard::{Builtin, Clustering, CubicGraph, Instance, VertexCover};
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "anonhard",
    version,
    about = "Vertex cover to k-anonymity reductions"
)]
struct Cli {
    /// Worker threads for parallel scans (defaults to all cores).
    #[arg(long, global = true, env = "ANONHARD_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reduction {
    /// Binary rows, k = 3.
    #[value(name = "3abp")]
    Abp,
    /// Eight columns, k = 4.
    #[value(name = "4ap8")]
    Ap8,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
pub struct GraphSource {
    /// Graph file (`p <n> <m>` header, `e <u> <v>` lines, 1-based).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Built-in graph: k4, k33, petersen, q3.
    #[arg(long)]
    builtin: Option<Builtin>,
}

impl GraphSource {
    pub fn load(&self) -> anyhow::Result<CubicGraph> {
        match (&self.graph, self.builtin) {
            (Some(path), _) => Ok(parse_graph(&read(path)?)?),
            (None, Some(b)) => Ok(b.graph()),
            (None, None) => bail!("give --graph or --builtin"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in or random cubic graph.
    GenGraph {
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        builtin: Option<Builtin>,
        /// Vertex count of a random cubic graph.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a reduction instance into a directory.
    Build {
        #[arg(long)]
        reduction: Reduction,
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve vertex cover on a cubic graph.
    SolveVc {
        #[command(flatten)]
        source: GraphSource,
        /// Greedy cover instead of the exact search.
        #[arg(long)]
        greedy: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn a vertex cover into a canonical clustering.
    VcToSolution {
        #[arg(long)]
        reduction: Reduction,
        #[command(flatten)]
        source: GraphSource,
        /// JSON array of 1-based vertices.
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Read the vertex cover out of a canonical clustering.
    SolutionToVc {
        #[arg(long)]
        reduction: Reduction,
        #[command(flatten)]
        source: GraphSource,
        /// JSON array of arrays of 0-based row indices.
        #[arg(long)]
        clustering: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite a feasible clustering as a canonical one of no greater cost.
    Canonicalize {
        #[arg(long)]
        reduction: Reduction,
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        clustering: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification and write report.txt and report.csv.
    Verify {
        #[arg(value_enum)]
        what: verify::Target,
        /// Reduction to check; both where applicable when omitted.
        #[arg(long)]
        reduction: Option<Reduction>,
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Directory for report.txt and report.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a k-anonymity instance given as a rows CSV.
    Solve {
        #[arg(long, conflicts_with = "greedy", required_unless_present = "greedy")]
        exact: bool,
        #[arg(long)]
        greedy: bool,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        rows: PathBuf,
        /// Row cap for the exact search.
        #[arg(long, default_value_t = anonhard::solver::DEFAULT_EXACT_LIMIT)]
        limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// An instance of either reduction.
pub enum Built {
    Abp(AbpInstance),
    Ap8(ApInstance),
}

impl Built {
    pub fn new(reduction: Reduction, g: &CubicGraph) -> Self {
        match reduction {
            Reduction::Abp => Built::Abp(abp::build_3abp_instance(g)),
            Reduction::Ap8 => Built::Ap8(ap8::build_4ap8_instance(g)),
        }
    }

    pub fn instance(&self) -> &Instance {
        match self {
            Built::Abp(a) => a.instance(),
            Built::Ap8(a) => a.instance(),
        }
    }

    pub fn rows_csv(&self) -> String {
        io::write_rows_csv(self.instance().rows())
    }

    pub fn fingerprint(&self) -> String {
        io::fingerprint(self.rows_csv().as_bytes())
    }

    pub fn vc_to_solution(&self, cover: &VertexCover) -> anonhard::Result<Clustering> {
        match self {
            Built::Abp(a) => abp::vc_to_solution_3abp(a, cover),
            Built::Ap8(a) => ap8::vc_to_solution_4ap8(a, cover),
        }
    }

    pub fn solution_to_vc(&self, p: &Clustering) -> anonhard::Result<VertexCover> {
        match self {
            Built::Abp(a) => abp::solution_to_vc_3abp(a, p),
            Built::Ap8(a) => ap8::solution_to_vc_4ap8(a, p),
        }
    }

    pub fn canonicalize(&self, p: &Clustering) -> anonhard::Result<Clustering> {
        match self {
            Built::Abp(a) => abp::canonicalize_3abp(a, p),
            Built::Ap8(a) => ap8::canonicalize_4ap8(a, p),
        }
    }

    pub fn is_canonical(&self, p: &Clustering) -> bool {
        match self {
            Built::Abp(a) => abp::is_canonical_3abp(a, p),
            Built::Ap8(a) => ap8::is_canonical_4ap8(a, p),
        }
    }

    /// Cost of the canonical solution for a cover of size `p`.
    pub fn formula(&self, g: &CubicGraph, p: usize) -> u64 {
        match self {
            Built::Abp(_) => abp::canonical_cost_3abp(g.n(), g.m(), p),
            Built::Ap8(_) => ap8::canonical_cost_4ap8(g.n(), g.m(), p),
        }
    }
}

/// Errors whose cause is an input failing a check rather than misuse.
#[derive(Debug)]
struct Rejected(String);

impl std::fmt::Display for Rejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Rejected {}

fn rejected(e: anonhard::Error) -> anyhow::Error {
    use anonhard::Error::*;
    match e {
        NotACover(u, v) => Rejected(format!(
            "not a vertex cover: edge ({}, {}) is uncovered",
            u + 1,
            v + 1
        ))
        .into(),
        NotCanonical(_)
        | Infeasible { .. }
        | EdgeRowConflict { .. }
        | NoEdgeGadgetAssigned { .. } => Rejected(e.to_string()).into(),
        other => other.into(),
    }
}

pub fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build(reduction: Reduction, g: &CubicGraph, dir: &Path) -> anyhow::Result<Built> {
    let built = Built::new(reduction, g);
    let csv = built.rows_csv();
    write(&dir.join("rows.csv"), &csv)?;
    write(&dir.join("graph.txt"), &write_graph(g))?;
    match &built {
        Built::Abp(a) => {
            write(
                &dir.join("provenance.json"),
                &io::to_pretty_json(&a.provenance()),
            )?;
            write(
                &dir.join("layout.json"),
                &io::to_pretty_json(&Layout3::of(a)),
            )?;
        }
        Built::Ap8(a) => {
            write(
                &dir.join("provenance.json"),
                &io::to_pretty_json(&a.provenance()),
            )?;
            write(
                &dir.join("layout.json"),
                &io::to_pretty_json(&Layout4::of(a)),
            )?;
        }
    }
    Ok(built)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::GenGraph {
            builtin,
            random,
            seed,
            out,
        } => {
            let g = match (builtin, random) {
                (Some(b), _) => b.graph(),
                (None, Some(n)) => random_cubic(n, &mut ChaCha8Rng::seed_from_u64(seed))?,
                (None, None) => bail!("give --builtin or --random"),
            };
            emit(out.as_deref(), &write_graph(&g))?;
        }
        Command::Build {
            reduction,
            source,
            out,
        } => {
            let g = source.load()?;
            let built = build(reduction, &g, &out)?;
            let inst = built.instance();
            println!(
                "{} rows x {} columns, k = {}, rows sha256 {}",
                inst.len(),
                inst.width(),
                inst.k(),
                built.fingerprint()
            );
        }
        Command::SolveVc {
            source,
            greedy,
            out,
        } => {
            let g = source.load()?;
            let cover = if greedy {
                greedy_vertex_cover(&g)
            } else {
                exact_vertex_cover(&g)
            };
            eprintln!("cover size {}", cover.len());
            emit(
                out.as_deref(),
                &format!("{}\n", io::write_cover_json(&cover)),
            )?;
        }
        Command::VcToSolution {
            reduction,
            source,
            cover,
            out,
        } => {
            let g = source.load()?;
            let cover = io::read_cover_json(&read(&cover)?)?;
            let built = Built::new(reduction, &g);
            let p = built.vc_to_solution(&cover).map_err(rejected)?;
            write(&out, &format!("{}\n", io::write_clustering_json(&p)))?;
            println!("cost {}", built.instance().clustering_cost(&p)?);
        }
        Command::SolutionToVc {
            reduction,
            source,
            clustering,
            out,
        } => {
            let g = source.load()?;
            let p = io::read_clustering_json(&read(&clustering)?)?;
            let cover = Built::new(reduction, &g)
                .solution_to_vc(&p)
                .map_err(rejected)?;
            eprintln!("cover size {}", cover.len());
            emit(
                out.as_deref(),
                &format!("{}\n", io::write_cover_json(&cover)),
            )?;
        }
        Command::Canonicalize {
            reduction,
            source,
            clustering,
            out,
        } => {
            let g = source.load()?;
            let p = io::read_clustering_json(&read(&clustering)?)?;
            let built = Built::new(reduction, &g);
            let q = built.canonicalize(&p).map_err(rejected)?;
            write(&out, &format!("{}\n", io::write_clustering_json(&q)))?;
            let inst = built.instance();
            println!(
                "cost {} -> {}",
                inst.clustering_cost(&p)?,
                inst.clustering_cost(&q)?
            );
        }
        Command::Verify {
            what,
            reduction,
            source,
            seed,
            trials,
            out,
        } => {
            let g = source.load()?;
            let report = verify::run(what, reduction, &g, seed, trials)?;
            if let Some(dir) = &out {
                write(&dir.join("report.txt"), &report.to_text())?;
                write(&dir.join("report.csv"), &report.to_csv())?;
            }
            print!("{}", report.to_text());
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Solve {
            exact: _,
            greedy,
            k,
            rows,
            limit,
            out,
        } => {
            let inst = Instance::new(io::read_rows_csv(&read(&rows)?)?, k)?;
            let res = if greedy {
                anonhard::greedy_kap(&inst)
            } else {
                anonhard::exact_kap(&inst, limit)?
            };
            println!("cost {}", res.cost);
            println!("optimal {}", res.optimal);
            let json = format!("{}\n", io::write_clustering_json(&res.clustering));
            emit(out.as_deref(), &json)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Rejected>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
