use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "rumin",
    version,
    about = "Rumin complex on Heisenberg groups: exact construction, certification, symbols and grid probes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Heisenberg dimension n (ℍⁿ has dimension 2n + 1).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Form degree h.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Directory that receives a copy of every artifact.
    #[arg(long, global = true, env = "RUMIN_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// Nodes per horizontal axis on the coarsest grid.
    #[arg(long, global = true)]
    pub grid_nodes: Option<usize>,
    /// Grid refinements after the coarsest level.
    #[arg(long, global = true)]
    pub refinements: Option<usize>,
    /// Dilation factors, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub lambda: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Latex,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Latex => "tex",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    /// `(1 − r²)⁴` in every component.
    Bump,
    /// Component k carries the prefactor `1 + ½ z_{k mod (2n+1)}`.
    Standard,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimensions of E₀ʰ for h = 0..2n+1.
    Dims,
    /// Orthogonal bases of E₀ʰ with their Gram weights.
    Basis,
    /// Operator matrices of d_c and δ_c with inline certification.
    Dc {
        /// Also emit the Rumin Laplacian on degree h.
        #[arg(long)]
        laplacian: bool,
    },
    /// Full certification suite; exits nonzero iff a check fails.
    Verify {
        /// Replace the stored d_c by the matrix in this file before certifying.
        #[arg(long)]
        check_file: Option<PathBuf>,
        /// Random symplectic maps per degree for the equivariance check.
        #[arg(long, default_value_t = 20)]
        maps: usize,
    },
    /// Principal symbols, injectivity and exact left inverses.
    Symbol,
    /// Divergence-free decomposition of a closed form (polynomial file) or
    /// grid refinement study of f = d_c u (test-form file).
    Decompose {
        #[arg(long)]
        input: PathBuf,
    },
    /// Gagliardo–Nirenberg ratios across refinements and a dilation sweep.
    Gn {
        #[arg(long, value_enum, default_value_t = FormKind::Bump)]
        form: FormKind,
        /// Test form file; overrides --form.
        #[arg(long)]
        form_file: Option<PathBuf>,
        /// Largest accepted relative change of the ratio between levels.
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
}
