mod commands;
mod config;
mod corpus;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::commands::Outcome;
use crate::config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "hcontent", version, about = "Hausdorff content, fillings and width bounds on voxel models")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, env = "HCONTENT_CONFIG")]
    config: Option<PathBuf>,
    /// Overrides the configured random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Write plot data as CSV.
    #[arg(long = "emit-plot", global = true)]
    emit_plot: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// Grid balls at every half-cell centre and diameter.
    AllGrid,
    /// Grid-sized balls centred at cell centres of the space.
    Centers,
    /// An explicit ball list given by --balls.
    Fixed,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Standard,
    Improved,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    ClosedCells,
    CellCenters,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Content brackets, witnesses, volume bound and the Loomis–Whitney chain.
    Invariants,
    /// Width bounds at m = 1, 2 with independent nerve rechecks.
    Width,
    /// Ball decomposition at m = 2 with the five inequalities.
    Decompose,
    /// Skeleton pushout of the cell centres at m = 2.
    Pushout,
    All,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hausdorff content HC_m of a space.
    Content {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        m: String,
        #[arg(long, value_enum, default_value = "all-grid")]
        family: FamilyArg,
        /// Ball list for --family fixed.
        #[arg(long)]
        balls: Option<PathBuf>,
        /// Branch-and-bound search instead of greedy.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Coarea slicing of a covering along a 1-Lipschitz function.
    Coarea {
        #[arg(long)]
        space: PathBuf,
        /// `dist:x,y,..` (distance to a point), `set:i,j;k,l` (distance to cells) or `file:path.json`.
        #[arg(long)]
        f: String,
        /// Ball list; defaults to a greedy cover of the space.
        #[arg(long)]
        cover: Option<PathBuf>,
        #[arg(long)]
        m: String,
        /// `lo:hi`; defaults to the range of f over the space.
        #[arg(long)]
        range: Option<String>,
    },
    /// Cone covering over a ball list.
    Cone {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        apex: String,
        #[arg(long = "R")]
        big_r: String,
        #[arg(long)]
        m: String,
        #[arg(long, value_enum, default_value = "improved")]
        variant: VariantArg,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Disjoint-ball decomposition with its inequality report.
    Decompose {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        m: String,
        /// Absolute slack; defaults to schedule.eps_rel times the content.
        #[arg(long)]
        eps: Option<f64>,
        /// Replaces the density threshold constant A.
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Improvement sequence plus skeleton pushout: a filling certificate.
    Fill {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        m: String,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Federer–Fleming pushout of weighted points onto a grid skeleton.
    Pushout {
        #[arg(long)]
        points: PathBuf,
        /// Grid size; searched by doubling when omitted.
        #[arg(long = "grid-R")]
        grid_r: Option<String>,
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: Option<usize>,
        /// Resolution added to the grid size and trace bound; defaults to twice the largest radius.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Loomis–Whitney and isoperimetric chain for a voxel body.
    LwCheck {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Cube content against its boundary shell.
    CubeEq {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        side: String,
        /// Cells per side.
        #[arg(long, default_value_t = 4)]
        k: i64,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Urysohn width bound from a low-multiplicity cover.
    Width {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        m: u32,
        /// Covers to evaluate.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value = "closed-cells")]
        mode: ModeArg,
    },
    /// Ball-content ratio at radius R next to the width bound.
    LocalWidth {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long = "R")]
        r: String,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value = "closed-cells")]
        mode: ModeArg,
    },
    /// Runs a suite over every fixture in a directory.
    Corpus {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "invariants")]
        suite: Suite,
    },
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Content { .. } => "content",
        Command::Coarea { .. } => "coarea",
        Command::Cone { .. } => "cone",
        Command::Decompose { .. } => "decompose",
        Command::Fill { .. } => "fill",
        Command::Pushout { .. } => "pushout",
        Command::LwCheck { .. } => "lw-check",
        Command::CubeEq { .. } => "cube-eq",
        Command::Width { .. } => "width",
        Command::LocalWidth { .. } => "local-width",
        Command::Corpus { .. } => "corpus",
    }
}

fn write(path: &PathBuf, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn envelope(name: &str, seed: u64, o: &Outcome) -> String {
    let v = json!({
        "schema": hcontent::io::SCHEMA,
        "command": name,
        "seed": seed,
        "ok": o.ok,
        "failed": o.failed,
        "result": o.result,
    });
    serde_json::to_string_pretty(&v).expect("report serialises") + "\n"
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    hcontent::num::set_tau(cfg.tolerance)?;
    let name = command_name(&cli.cmd);
    let outcome = match commands::dispatch(&cli.cmd, &cfg) {
        Ok(o) => o,
        Err(e) => match e.payload() {
            Some(p) => Outcome::failed(vec![e.to_string()], p.clone()),
            None => return Err(e.to_string()),
        },
    };
    let report = envelope(name, cfg.seed, &outcome);
    let report_path = cli.report.or(cfg.output.report.clone());
    let plot_path = cli.emit_plot.or(cfg.output.plot.clone());
    if let Some(table) = &outcome.table {
        print!("{table}");
    }
    match &report_path {
        Some(p) => write(p, &report)?,
        None if outcome.table.is_none() => print!("{report}"),
        None => {}
    }
    if let Some(p) = &plot_path {
        match &outcome.plot {
            Some(csv) => write(p, csv)?,
            None => return Err(format!("{name} has no plot data")),
        }
    }
    if outcome.ok {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("verification failed: {}", outcome.failed.join(", "));
        Ok(ExitCode::from(2))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
