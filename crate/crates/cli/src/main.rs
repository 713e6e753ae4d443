use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use confluent_cli::commands;
use confluent_cli::config::{EvalConfig, Flavor, GraphConfig, GraphMode, PipelineConfig, RootSelector, Tangents};
use log::LevelFilter;

#[derive(Parser)]
#[command(name = "confluent", version, about = "Confluent vessel tree reconstruction from oriented centerline samples")]
struct Cli {
    /// TOML configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a corpus of ground-truth trees and sampled clouds.
    Synth(SynthArgs),
    /// Reconstruct a tree from a point file, or every cloud of a corpus.
    Reconstruct(ReconstructArgs),
    /// Score reconstructions against ground truth and write CSV reports.
    Evaluate(EvaluateArgs),
    /// Write the neighbour system and tubular graph arcs for inspection.
    GraphDump(GraphDumpArgs),
    /// Put the pooled summaries of two evaluation runs side by side.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Output corpus directory.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    trees: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    leaves: Option<usize>,
    #[arg(long)]
    domain_size: Option<f64>,
    /// Keep every bifurcation where the new branch joins its host.
    #[arg(long)]
    no_relocate: bool,
    #[arg(long)]
    spacing: Option<f64>,
    #[arg(long)]
    position_noise: Option<f64>,
    /// Standard deviation of the tangent tilt, radians.
    #[arg(long)]
    tangent_noise: Option<f64>,
    #[arg(long)]
    flip_prob: Option<f64>,
    #[arg(long)]
    dropout: Option<f64>,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long, value_enum)]
    mode: Option<GraphMode>,
    #[arg(long, value_enum)]
    flavor: Option<Flavor>,
    /// Neighbours per node; candidate count of the anisotropic flavour.
    #[arg(short, long)]
    k: Option<usize>,
    #[arg(long)]
    k_final: Option<usize>,
    #[arg(long)]
    aspect_ratio_sq: Option<f64>,
    /// Confluence tolerance, radians.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    elastic_lambda: Option<f64>,
    /// Tangent handling of the geodesic baseline.
    #[arg(long, value_enum)]
    tangents: Option<Tangents>,
    /// Root at this sample index.
    #[arg(long, conflicts_with = "root_near")]
    root_index: Option<usize>,
    /// Root at the sample nearest to `x,y,z`.
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_point)]
    root_near: Option<[f64; 3]>,
}

impl GraphArgs {
    fn apply(&self, g: &mut GraphConfig) {
        set(&mut g.mode, self.mode);
        set(&mut g.flavor, self.flavor);
        set(&mut g.k, self.k);
        set(&mut g.k_final, self.k_final);
        set(&mut g.aspect_ratio_sq, self.aspect_ratio_sq);
        set(&mut g.epsilon, self.epsilon);
        set(&mut g.elastic_lambda, self.elastic_lambda);
        set(&mut g.tangents, self.tangents);
        if let Some(i) = self.root_index {
            g.root = Some(RootSelector::Index(i));
        }
        if let Some(p) = self.root_near {
            g.root = Some(RootSelector::Nearest(p));
        }
    }
}

#[derive(Args)]
struct ReconstructArgs {
    /// Point file, or a ground-truth corpus directory.
    input: PathBuf,
    /// Tree file, or output directory for a corpus.
    #[arg(short, long)]
    out: PathBuf,
    /// Leave wall time out of the stats sidecar so reruns are byte-identical.
    #[arg(long)]
    omit_timing: bool,
    #[command(flatten)]
    graph: GraphArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Ground-truth tree file or corpus directory.
    #[arg(long)]
    truth: PathBuf,
    /// Reconstructed tree file or corpus directory.
    #[arg(long)]
    recon: PathBuf,
    /// Neighbour dump (file or corpus directory) for the connectivity columns.
    #[arg(long)]
    neighbors: Option<PathBuf>,
    /// Point file the neighbour dump was built from (single-file mode).
    #[arg(long)]
    points: Option<PathBuf>,
    /// Directory receiving summary.csv and roc.csv.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    zeta: Option<f64>,
    /// Match against ζ alone instead of max(radius, ζ).
    #[arg(long)]
    no_radius: bool,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    probe_start: Option<f64>,
    #[arg(long)]
    probe_end: Option<f64>,
}

#[derive(Args)]
struct GraphDumpArgs {
    /// Point file, or a ground-truth corpus directory.
    input: PathBuf,
    /// Neighbour file, or output directory for a corpus.
    #[arg(short, long)]
    out: PathBuf,
    /// Also write the graph's arcs (next to the neighbours for a corpus).
    #[arg(long)]
    arcs: Option<Option<PathBuf>>,
    #[command(flatten)]
    graph: GraphArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Evaluation directory of the first method.
    a: PathBuf,
    /// Evaluation directory of the second method.
    b: PathBuf,
    /// Output CSV file.
    #[arg(short, long)]
    out: PathBuf,
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s.split(',').map(|c| c.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    <[f64; 3]>::try_from(v).map_err(|v| format!("expected three coordinates, got {}", v.len()))
}

fn set<V>(slot: &mut V, value: Option<V>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = PipelineConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Synth(a) => {
            set(&mut cfg.corpus.trees, a.trees);
            set(&mut cfg.corpus.seed, a.seed);
            set(&mut cfg.generator.n_leaves, a.leaves);
            set(&mut cfg.generator.domain_size, a.domain_size);
            if a.no_relocate {
                cfg.generator.relocate_bifurcations = false;
            }
            set(&mut cfg.sampler.spacing, a.spacing);
            set(&mut cfg.sampler.position_noise_std, a.position_noise);
            set(&mut cfg.sampler.tangent_noise_std_rad, a.tangent_noise);
            set(&mut cfg.sampler.orientation_flip_prob, a.flip_prob);
            set(&mut cfg.sampler.dropout_prob, a.dropout);
            commands::synth(&cfg, &a.out)?;
        }
        Command::Reconstruct(a) => {
            a.graph.apply(&mut cfg.graph);
            if a.input.is_dir() {
                commands::reconstruct_corpus(&a.input, &a.out, &cfg.graph, a.omit_timing)?;
            } else {
                commands::reconstruct_file(&a.input, &a.out, &cfg.graph, a.omit_timing)?;
            }
        }
        Command::Evaluate(a) => {
            let ev: &mut EvalConfig = &mut cfg.evaluation;
            set(&mut ev.zeta, a.zeta);
            set(&mut ev.step, a.step);
            set(&mut ev.probe_start, a.probe_start);
            set(&mut ev.probe_end, a.probe_end);
            if a.no_radius {
                ev.uses_radius = false;
            }
            match (a.truth.is_dir(), a.recon.is_dir()) {
                (true, true) => {
                    commands::evaluate_corpus(&a.truth, &a.recon, a.neighbors.as_deref(), &a.out, ev)?;
                }
                (false, false) => {
                    let conn = match (&a.points, &a.neighbors) {
                        (Some(p), Some(n)) => Some((p.as_path(), n.as_path())),
                        (None, None) => None,
                        _ => bail!("connectivity needs both --points and --neighbors"),
                    };
                    commands::evaluate_files(&a.truth, &a.recon, conn, &a.out, ev)?;
                }
                _ => bail!("--truth and --recon must both be files or both be corpus directories"),
            }
        }
        Command::GraphDump(a) => {
            a.graph.apply(&mut cfg.graph);
            if a.input.is_dir() {
                commands::graph_dump_corpus(&a.input, &a.out, &cfg.graph, a.arcs.is_some())?;
            } else {
                let arcs = a.arcs.map(|p| p.unwrap_or_else(|| a.out.with_extension("arcs")));
                commands::graph_dump_file(&a.input, &a.out, arcs.as_deref(), &cfg.graph)?;
            }
        }
        Command::Compare(a) => {
            commands::compare(&a.a, &a.b, &a.out)?;
        }
    }
    Ok(())
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.render().to_string();
            eprintln!("{}", text.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(2);
        }
    };
    init_logging(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
