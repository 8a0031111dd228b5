use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use specloc::{Projection, Shape, SphereMapChoice};
use specloc_cli::{parse_flatten, parse_grid, parse_projection, parse_resolution, parse_shape, parse_sphere_map, run, ConfigFile, ExperimentConfig, ModelSpec};

#[derive(Parser)]
#[command(name = "localizer", version, about = "Spectral localizer index pairings for 2D lattice models")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML file with defaults for any of the flags below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// qwz, qwz-scaled, inline (config only), or a TOML/JSON hopping file.
    #[arg(long, global = true)]
    model: Option<String>,
    /// QWZ mass.
    #[arg(long, global = true, allow_negative_numbers = true)]
    m: Option<f64>,
    /// Hopping scale for qwz-scaled.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Value, comma list, or start:stop:count.
    #[arg(long, global = true)]
    kappa: Option<String>,
    /// Value, comma list, or start:stop:count.
    #[arg(long, global = true, alias = "rho-list")]
    rho: Option<String>,
    /// disc or square.
    #[arg(long, global = true)]
    shape: Option<String>,
    /// bloch, dense, or none.
    #[arg(long, global = true)]
    flatten: Option<String>,
    /// Brillouin-zone grid for the Chern oracle.
    #[arg(long, global = true)]
    nk: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<String>,
    /// Write the localizer as a Matrix Market file.
    #[arg(long, global = true)]
    dump_matrix: Option<String>,
    /// Allow matrix dumps above the size cap.
    #[arg(long, global = true)]
    force: bool,
    /// Run outside the admissible (κ, ρ) window.
    #[arg(long, global = true)]
    allow_invalid: bool,
    /// Require factorization and eigenvalue inertia to agree.
    #[arg(long, global = true)]
    crosscheck: bool,
    /// Write wall_ms as 0 so that output is byte-reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Fredholm box radius.
    #[arg(long = "box", global = true)]
    box_radius: Option<f64>,
    /// fermi or positive.
    #[arg(long, global = true)]
    projection: Option<String>,
    /// special or smoothed.
    #[arg(long, global = true)]
    sphere_map: Option<String>,
    /// Degree grid, e.g. 400x200.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Homotopy grid points.
    #[arg(long, global = true)]
    steps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Half-signature of one localizer.
    Compute,
    /// Half-signatures over a κ × ρ grid, as CSV.
    Sweep,
    #[command(subcommand)]
    Fuzzy(Fuzzy),
    #[command(subcommand)]
    Oracle(Oracle),
    /// Chern number, Fredholm index and half-signature on one model; exit 0 iff they agree.
    Crosscheck,
}

#[derive(Subcommand)]
enum Fuzzy {
    /// Width of the localizer fuzzy sphere for each ρ.
    Width,
    /// Widths before and after the sphere map.
    Map,
    /// Degrees of identity, antipode and the sphere map.
    Degree,
    /// Localizer-to-sphere homotopy at one (κ, ρ).
    Homotopy,
}

#[derive(Subcommand)]
enum Oracle {
    Chern,
    Fredholm,
    /// Deviation of the mapped sphere from the index-map sphere for each ρ.
    Compare,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Compute => "compute",
        Command::Sweep => "sweep",
        Command::Fuzzy(Fuzzy::Width) => "fuzzy width",
        Command::Fuzzy(Fuzzy::Map) => "fuzzy map",
        Command::Fuzzy(Fuzzy::Degree) => "fuzzy degree",
        Command::Fuzzy(Fuzzy::Homotopy) => "fuzzy homotopy",
        Command::Oracle(Oracle::Chern) => "oracle chern",
        Command::Oracle(Oracle::Fredholm) => "oracle fredholm",
        Command::Oracle(Oracle::Compare) => "oracle compare",
        Command::Crosscheck => "crosscheck",
    }
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig> {
    let c = &cli.common;
    let file = match &c.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let name = command_name(&cli.command);
    let (default_kappa, default_rho) = match name {
        "sweep" => ("0.05:0.5:10", "8:16:5"),
        "fuzzy width" | "fuzzy map" | "oracle compare" => ("0.1", "8,12,16"),
        "fuzzy homotopy" => ("0.1", "16"),
        "oracle fredholm" => ("0.1", "24"),
        "crosscheck" => ("0.1", "8"),
        _ => ("0.1", "12"),
    };
    // The special choice resolves the index-map comparison at desk-scale ρ.
    let default_map = if name == "oracle compare" { "special" } else { "smoothed" };
    let model = ModelSpec::resolve(
        c.model.as_deref().or(file.model.as_deref()).unwrap_or("qwz"),
        c.m.or(file.m).unwrap_or(1.0),
        c.eps.or(file.eps).unwrap_or(0.1),
        file.hoppings.as_ref(),
    )?;
    let pick = |flag: &Option<String>, from_file: &Option<String>, default: &str| flag.clone().or_else(|| from_file.clone()).unwrap_or_else(|| default.to_string());
    let shape: Shape = parse_shape(&pick(&c.shape, &file.shape, "disc"))?;
    let projection: Projection = parse_projection(&pick(&c.projection, &file.projection, "positive"))?;
    let sphere_map: SphereMapChoice = parse_sphere_map(&pick(&c.sphere_map, &file.sphere_map, default_map))?;
    let cfg = ExperimentConfig {
        command: name.to_string(),
        model,
        kappa: parse_grid(&pick(&c.kappa, &file.kappa, default_kappa)).context("--kappa")?,
        rho: parse_grid(&pick(&c.rho, &file.rho, default_rho)).context("--rho")?,
        shape,
        flatten: parse_flatten(&pick(&c.flatten, &file.flatten, "bloch"))?,
        nk: c.nk.or(file.nk).unwrap_or(40),
        seed: c.seed.or(file.seed).unwrap_or(0),
        allow_invalid: c.allow_invalid || file.allow_invalid.unwrap_or(false),
        crosscheck: c.crosscheck || file.crosscheck.unwrap_or(false),
        box_radius: c.box_radius.or(file.box_radius),
        projection,
        sphere_map,
        grid: parse_resolution(&pick(&c.grid, &file.grid, "400x200"))?,
        steps: c.steps.or(file.steps).unwrap_or(11),
        out: c.out.clone().or(file.out),
        dump_matrix: c.dump_matrix.clone(),
        force: c.force,
        timing: !c.no_timing,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn threads() -> Result<()> {
    if let Ok(v) = std::env::var("LOCALIZER_THREADS") {
        let n: usize = v.parse().with_context(|| format!("LOCALIZER_THREADS = '{v}'"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads().and_then(|_| resolve(&cli)).and_then(|cfg| match &cli.command {
        Command::Compute => run::compute(&cfg),
        Command::Sweep => run::sweep_grid(&cfg),
        Command::Fuzzy(Fuzzy::Width) => run::fuzzy_width(&cfg),
        Command::Fuzzy(Fuzzy::Map) => run::fuzzy_map(&cfg),
        Command::Fuzzy(Fuzzy::Degree) => run::fuzzy_degree(&cfg),
        Command::Fuzzy(Fuzzy::Homotopy) => run::fuzzy_homotopy(&cfg),
        Command::Oracle(Oracle::Chern) => run::oracle_chern(&cfg),
        Command::Oracle(Oracle::Fredholm) => run::oracle_fredholm(&cfg),
        Command::Oracle(Oracle::Compare) => run::oracle_compare(&cfg),
        Command::Crosscheck => run::crosscheck(&cfg),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("assertion failed (see output)");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
