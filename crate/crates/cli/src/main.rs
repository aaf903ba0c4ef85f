//! `treedom`: exact tree domination queries, growth regularization,
//! explosion classification and first-passage simulation from the shell.
//!
//! Every command validates all inputs before computing and writes nothing on
//! failure. With `--out DIR`, outputs and a `manifest.json` recording the
//! arguments, configuration, seed, version, timestamps and SHA-256 hashes of
//! inputs and outputs are written to `DIR`; `treedom replay DIR/manifest.json`
//! re-runs the recorded arguments and compares hashes.
//!
//! Exit codes: 0 success; `dominates` returns 1 for "does not dominate" and
//! 2 for "undecidable by the implemented criteria"; `scan-conjecture` and
//! `replay` return 1 on a violation or mismatch; 64 for usage and input
//! errors; 65 for contract violations and exceeded caps; 74 for I/O errors.

mod commands;
mod inputs;
mod manifest;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use manifest::{sha256_hex, RunManifest, STDOUT_KEY};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(treedom::Error),
    Io(String),
}

impl From<treedom::Error> for CliError {
    fn from(e: treedom::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e @ treedom::Error::Input { .. }) => write!(f, "usage error: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(treedom::Error::Input { .. }) => 64,
            CliError::Core(_) => 65,
            CliError::Io(_) => 74,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "treedom", version, about = "Tree domination and first-passage percolation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Directory for output files and manifest.json.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Output format; plain text when omitted for eval and dominates, JSON otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exact all-paths probability φ(T; D), some-path probability P(B; T), or Ψ(b; D).
    Eval(EvalArgs),
    /// Decide whether one tree dominates another.
    Dominates(DominatesArgs),
    /// The nondecreasing regularization f̃ on a window, with stability flags.
    Tilde(TildeArgs),
    /// Explosion classification through Σ f̃(n)^{-1/α}.
    Classify(ClassifyArgs),
    /// Simulate passage times on the spherically symmetric tree of a growth function.
    Simulate(SimulateArgs),
    /// Check the graded-graph inequality on random small instances.
    ScanConjecture(ScanArgs),
    /// Re-run a manifest and compare output hashes.
    Replay(ReplayArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eval(_) => "eval",
            Command::Dominates(_) => "dominates",
            Command::Tilde(_) => "tilde",
            Command::Classify(_) => "classify",
            Command::Simulate(_) => "simulate",
            Command::ScanConjecture(_) => "scan-conjecture",
            Command::Replay(_) => "replay",
        }
    }

    fn output(&self) -> Option<&OutputArgs> {
        match self {
            Command::Eval(a) => Some(&a.output),
            Command::Dominates(a) => Some(&a.output),
            Command::Tilde(a) => Some(&a.output),
            Command::Classify(a) => Some(&a.output),
            Command::Simulate(a) => Some(&a.output),
            Command::ScanConjecture(a) => Some(&a.output),
            Command::Replay(_) => None,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    /// Tree specification.
    #[arg(long, conflicts_with = "sizes", required_unless_present = "sizes")]
    pub tree: Option<String>,
    /// Generation sizes b_1,…,b_n for Ψ(b; D) instead of a tree.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Set specification D (or B with --some-path).
    #[arg(long)]
    pub set: String,
    /// Probability that some path lies in the set, instead of all paths.
    #[arg(long, conflicts_with = "sizes")]
    pub some_path: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DominatesArgs {
    /// The candidate dominating tree.
    #[arg(long)]
    pub tree: String,
    /// The tree it is compared against.
    #[arg(long)]
    pub other: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TildeMethod {
    Hull,
    Recursive,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TildeArgs {
    #[arg(long)]
    pub growth: String,
    /// Window length N; defaults to 20, or the table length if shorter.
    #[arg(long = "depth", short = 'N', visible_alias = "N")]
    pub depth: Option<usize>,
    /// Look-ahead H past the window; defaults to N, clipped to a table's length.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, value_enum, default_value_t = TildeMethod::Hull)]
    pub method: TildeMethod,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub growth: String,
    /// Exponent α of the transit-time law near zero.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Window length N for partial sums; defaults to 1000, or the table length if shorter.
    #[arg(long = "depth", short = 'N', visible_alias = "N")]
    pub depth: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    Greedy,
    Beam,
    BeamWeighted,
    Exact,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub growth: String,
    #[arg(long = "depth", short = 'N', visible_alias = "N", default_value_t = 100)]
    pub depth: usize,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Beam width W.
    #[arg(long, default_value_t = 200)]
    pub beam: usize,
    /// Children kept per vertex.
    #[arg(long, default_value_t = 3)]
    pub prune_k: usize,
    /// Power-law transit times G(t) = c·t^α; exponential when neither --alpha nor --c is given.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, value_enum, default_value_t = SimMode::Beam)]
    pub mode: SimMode,
    /// Relative half-width of the band around the limit constant.
    #[arg(long, default_value_t = 0.25)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Levels are drawn uniformly from 1..=max-levels.
    #[arg(long, default_value_t = 3)]
    pub max_levels: usize,
    #[arg(long, default_value_t = 8)]
    pub max_vertices: usize,
    /// Probability of each edge between consecutive levels.
    #[arg(long, default_value_t = 0.5)]
    pub edge_p: f64,
    #[arg(long, default_value_t = 3)]
    pub max_boxes: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    /// Path to a manifest.json written by an earlier run.
    pub manifest: PathBuf,
    /// Write the regenerated outputs here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Result of a command, before anything is written.
pub struct RunOutput {
    pub stdout: String,
    /// Output files by name; written only with `--out`.
    pub files: Vec<(String, Vec<u8>)>,
    pub exit: u8,
    pub inputs: BTreeMap<String, String>,
    pub seed: Option<u64>,
}

impl RunOutput {
    fn hashes(&self) -> BTreeMap<String, String> {
        let mut out: BTreeMap<String, String> = self
            .files
            .iter()
            .map(|(name, bytes)| (name.clone(), sha256_hex(bytes)))
            .collect();
        out.insert(STDOUT_KEY.to_string(), sha256_hex(self.stdout.as_bytes()));
        out
    }
}

fn write_outputs(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    for (name, bytes) in files {
        fs::write(dir.join(name), bytes).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
    }
    Ok(())
}

fn run(args: Vec<String>) -> Result<u8, CliError> {
    let cli = Cli::try_parse_from(std::iter::once("treedom".to_string()).chain(args.iter().cloned()))
        .map_err(|e| match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                print!("{e}");
                std::process::exit(0);
            }
            _ => CliError::Usage(e.to_string().trim_end().to_string()),
        })?;
    if let Command::Replay(r) = &cli.command {
        return replay(r);
    }
    let started_at = chrono::Utc::now().to_rfc3339();
    let out = commands::execute(&cli.command)?;
    print!("{}", out.stdout);
    if let Some(dir) = cli.command.output().and_then(|o| o.out.as_ref()) {
        write_outputs(dir, &out.files)?;
        let manifest = RunManifest {
            command: cli.command.name().to_string(),
            args,
            config: serde_json::to_value(&cli.command).expect("arguments serialize"),
            seed: out.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_at,
            finished_at: chrono::Utc::now().to_rfc3339(),
            inputs: out.inputs.clone(),
            outputs: out.hashes(),
            exit_code: out.exit as i32,
        };
        manifest.write(dir)?;
    }
    Ok(out.exit)
}

fn replay(r: &ReplayArgs) -> Result<u8, CliError> {
    let manifest = RunManifest::read(&r.manifest)?;
    let cli = Cli::try_parse_from(std::iter::once("treedom".to_string()).chain(manifest.args.iter().cloned()))
        .map_err(|e| CliError::Usage(format!("manifest arguments do not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Usage("a manifest cannot record a replay".into()));
    }
    let out = commands::execute(&cli.command)?;
    if let Some(dir) = &r.out {
        write_outputs(dir, &out.files)?;
    }
    let mut ok = true;
    let mut report = |kind: &str, name: &str, want: Option<&String>, got: Option<&String>| {
        let same = want.is_some() && want == got;
        ok &= same;
        println!("{kind} {name}: {}", if same { "match" } else { "MISMATCH" });
    };
    for (name, want) in &manifest.inputs {
        report("input", name, Some(want), out.inputs.get(name));
    }
    let got = out.hashes();
    for name in manifest.outputs.keys().chain(got.keys().filter(|k| !manifest.outputs.contains_key(*k))) {
        report("output", name, manifest.outputs.get(name), got.get(name));
    }
    let same_exit = manifest.exit_code == out.exit as i32;
    ok &= same_exit;
    println!(
        "exit code: {}",
        if same_exit { "match".to_string() } else { format!("MISMATCH ({} vs {})", manifest.exit_code, out.exit) }
    );
    println!("replay: {}", if ok { "identical" } else { "differs" });
    Ok(if ok { 0 } else { 1 })
}

fn main() -> ExitCode {
    match run(std::env::args().skip(1).collect()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
