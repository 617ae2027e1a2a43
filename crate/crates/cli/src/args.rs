use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rsd", version, about = "Exact rising-sun decompositions of piecewise-constant densities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the rectangle division process and write an RSDEC 1 file.
    Decompose(DecomposeArgs),
    /// Recheck a decomposition against its density and print the report.
    Verify(VerifyArgs),
    /// Run the dyadic cube decomposition and compare it with the rising sun.
    Cz(DecomposeArgs),
    /// Write a fixture density as an RSD 1 file.
    Gen(GenArgs),
    /// Draw a 1-D or 2-D decomposition as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColorBy {
    Kind,
    Depth,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Stop dividing once half the longest side drops below this.
    #[arg(long, value_name = "p/q", allow_hyphen_values = true)]
    pub min_side: Option<String>,
    /// Stop dividing at this depth. Defaults to 40 when no bound is given.
    #[arg(long, value_name = "N")]
    pub max_depth: Option<usize>,
    /// Stop dividing once this many rectangles are selected.
    #[arg(long = "max-select", value_name = "N")]
    pub max_select: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Density file (RSD 1).
    #[arg(long)]
    pub input: PathBuf,
    /// Level A, as p/q, an integer, or a decimal.
    #[arg(long, value_name = "p/q", allow_hyphen_values = true)]
    pub level: String,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Relative tolerance for float mode.
    #[arg(long, value_name = "x")]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Append the division tree to the output.
    #[arg(long)]
    pub dump_tree: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Decomposition file (RSDEC 1).
    #[arg(long)]
    pub input: PathBuf,
    /// Density file (RSD 1) the decomposition was computed from.
    #[arg(long)]
    pub density: PathBuf,
    /// Exact mode checks with zero tolerance unless overridden.
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, value_name = "x")]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// paper-counterexample, riesz-1d-step, or random.
    #[arg(long, value_name = "NAME")]
    pub preset: String,
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Decomposition file (RSDEC 1).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_name = "N", default_value_t = 640)]
    pub svg_width: u32,
    #[arg(long, value_name = "N", default_value_t = 480)]
    pub svg_height: u32,
    #[arg(long, value_enum, default_value_t = ColorBy::Kind)]
    pub color_by: ColorBy,
}
