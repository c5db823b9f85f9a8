//! `vial`: build networks, attack users, evaluate attacks, verify the engine
//! against its dense oracles and generate planted datasets.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "vial", version, about = "Attribute inference over social-behavior-attribute networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the TSV inputs and write a binary snapshot.
    Build(BuildArgs),
    /// Infer the attributes of one user.
    Attack(AttackArgs),
    /// Run the multi-trial evaluation protocol.
    Eval(EvalArgs),
    /// Check the engine against the dense oracles.
    Verify(VerifyArgs),
    /// Generate a planted-attribute dataset.
    Synth(SynthArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Directory holding social.tsv, behavior.tsv, attribute.tsv and vocab.tsv.
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long)]
    social: Option<PathBuf>,
    #[arg(long)]
    behavior: Option<PathBuf>,
    #[arg(long)]
    attribute: Option<PathBuf>,
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Snapshot to write.
    #[arg(long, default_value = "network.snap")]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct EngineArgs {
    /// Restart probability.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Convergence threshold on the per-capacity L1 change.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Iteration cap; defaults to floor(log2 of the user count).
    #[arg(long)]
    max_iters: Option<usize>,
    /// Channel shares as "social,behavior,attribute" or "per-node:TAU".
    #[arg(long, default_value = "1,1,1")]
    shares: String,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    snapshot: PathBuf,
    /// User id to attack.
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// vial, vial-b, random, cn-san, aa-san or rwwr-san.
    #[arg(long, default_value = "vial")]
    attack: String,
    #[command(flatten)]
    engine: EngineArgs,
    /// Also write the full score vector as TSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    snapshot: PathBuf,
    /// Attack to evaluate; repeat for several. Defaults to all.
    #[arg(long = "attack")]
    attacks: Vec<String>,
    /// Cutoffs, comma-separated or repeated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    k: Vec<usize>,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, default_value_t = 5)]
    per_value: usize,
    #[arg(long, default_value_t = 5)]
    min_behaviors: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draw this many targets uniformly instead of per attribute value.
    #[arg(long)]
    uniform: Option<usize>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for report.tsv and gains.tsv.
    #[arg(long, default_value = "eval-out")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Number of random fixture networks.
    #[arg(long, default_value_t = 50)]
    networks: usize,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value = "synth")]
    out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    users: usize,
    #[arg(long, default_value_t = 2)]
    communities: usize,
    /// Expected within-community social degree.
    #[arg(long, default_value_t = 3.0)]
    degree_in: f64,
    /// Expected between-community social degree.
    #[arg(long, default_value_t = 0.3)]
    degree_out: f64,
    #[arg(long, default_value_t = 10_000)]
    items: usize,
    /// Attribute type names, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "major,city")]
    types: Vec<String>,
    /// Values per attribute type.
    #[arg(long, default_value_t = 20)]
    values: usize,
    #[arg(long, default_value_t = 0.9)]
    rho_a: f64,
    #[arg(long, default_value_t = 0.9)]
    rho_b: f64,
    #[arg(long, default_value_t = 6)]
    behaviors: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => commands::build(a),
        Command::Attack(a) => commands::attack(a),
        Command::Eval(a) => commands::eval(a),
        Command::Verify(a) => commands::verify(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
