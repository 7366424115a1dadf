use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heisenberg_green::GroupPoint;

use crate::parse::{parse_data, parse_grid, parse_point, DataSpec, GridSpec};

#[derive(Debug, Parser)]
#[command(
    name = "hgreen",
    version,
    about = "Green's functions of the Heisenberg-group annulus and strip"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate G(η, ξ) at one pair of points.
    Eval(EvalArgs),
    /// Tabulate G(η, ·) on a (|z|, t) grid.
    Table(TableArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Solve the Dirichlet problem on the annulus at probe points.
    Solve(SolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainKind {
    Annulus,
    Strip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Core,
    Kelvin,
    Annulus,
    Strip,
    Bvp,
    All,
}

/// Dimension, inner radius and numerical knobs shared by every command.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Complex dimension n of H_n.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Inner gauge radius of the annulus.
    #[arg(long = "R", default_value_t = 0.5)]
    pub r: f64,
    /// Target bound on the omitted series tail.
    #[arg(long, default_value_t = 1e-10)]
    pub eps: f64,
    /// Finite-difference step (normal derivatives and L_0 residuals).
    #[arg(long = "fd-step")]
    pub fd_step: Option<f64>,
    /// Trapezoid nodes for circular averages.
    #[arg(long = "theta-nodes")]
    pub theta_nodes: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum, default_value_t = DomainKind::Annulus)]
    pub domain: DomainKind,
    #[command(flatten)]
    pub common: Common,
    /// Pole, as zx,zy,...,t.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub eta: GroupPoint,
    /// Field point, as zx,zy,...,t.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub xi: GroupPoint,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long, value_enum, default_value_t = DomainKind::Annulus)]
    pub domain: DomainKind,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub eta: GroupPoint,
    /// rmin:rmax:steps,tmin:tmax:steps with r = |z|.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: GridSpec,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Source term f: a number, gauge4, l0-gauge4 or gbar:<point>.
    #[arg(long, value_parser = parse_data, default_value = "0", allow_hyphen_values = true)]
    pub f: DataSpec,
    /// Boundary values on the outer sphere N = 1.
    #[arg(long = "h-outer", value_parser = parse_data, allow_hyphen_values = true)]
    pub h_outer: DataSpec,
    /// Boundary values on the inner sphere N = R.
    #[arg(long = "h-inner", value_parser = parse_data, allow_hyphen_values = true)]
    pub h_inner: DataSpec,
    /// Evaluation point (repeatable).
    #[arg(long = "probe", value_parser = parse_point, required = true, allow_hyphen_values = true)]
    pub probes: Vec<GroupPoint>,
    #[arg(long = "radial-nodes")]
    pub radial_nodes: Option<usize>,
    #[arg(long = "angular-nodes")]
    pub angular_nodes: Option<usize>,
    #[arg(long = "boundary-nodes")]
    pub boundary_nodes: Option<usize>,
    #[arg(long = "boundary-panels")]
    pub boundary_panels: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}
