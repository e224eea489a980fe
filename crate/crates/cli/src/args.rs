use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "symcanon",
    version,
    about = "Symplectic canonical forms, invariants and Gaussian-channel tools",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symplectic-equivalence invariants of X.
    Invariants(Common),
    /// Symplectic factors S1, S2 with S1 X S2 = 1 ⊕ J.
    Decompose(Common),
    /// Normal-mode decomposition of a positive definite X.
    Williamson(Common),
    /// Local symplectics condensing the correlation block of a bipartite state.
    Condense(Common),
    /// Encode and decode a Gaussian channel so that X becomes canonical.
    ChannelNormalize(Common),
    /// Check Y + i(XᵀσX - σ) ⪰ 0.
    ValidateChannel(Common),
    /// Check Γ + iσ ⪰ 0.
    ValidateState(Common),
    /// Squeezing witness from the invariants of a channel's X.
    Witness(Common),
    /// Write a test document.
    Gen(GenArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Invariants(_) => "invariants",
            Command::Decompose(_) => "decompose",
            Command::Williamson(_) => "williamson",
            Command::Condense(_) => "condense",
            Command::ChannelNormalize(_) => "channel-normalize",
            Command::ValidateChannel(_) => "validate-channel",
            Command::ValidateState(_) => "validate-state",
            Command::Witness(_) => "witness",
            Command::Gen(_) => "gen",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Input document (`-` reads standard input).
    #[arg(long)]
    pub input: PathBuf,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Relative gap below which eigenvalues are treated as equal.
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// Identity matrix 1_{2n}.
    Identity,
    /// Two-mode squeezed vacuum, one mode pair per `--r` value.
    Tmss,
    /// Pure-loss channel of transmissivity `--eta`.
    Attenuator,
    /// Channel from a random number-preserving dilation.
    Passive,
    /// Gaussian random 2n x 2n matrix.
    RandomX,
    /// Random symplectic matrix.
    RandomSymplectic,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    /// Mode count.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Squeezing parameters (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<f64>,
    /// Transmissivity.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Environment modes of the dilation.
    #[arg(long, default_value_t = 1)]
    pub env_modes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
