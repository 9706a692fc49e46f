use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use unfold::commands;
use unfold::output::{to_json, OutDir};
use unfold::{CliError, ProblemFile, Ray, Settings};

#[derive(Parser)]
#[command(
    name = "unfold",
    version,
    about = "Splittings, Fatou coordinates and horn maps of parabolic unfoldings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Command tolerance (orbit sums, homoclinic matching, conjugacy residuals).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Grid size: points per axis, sweep directions, or ray radii.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Parameter ray "r0,q,angle": radii r0·q^m along arg x = angle.
    #[arg(long, global = true)]
    ray: Option<Ray>,
    /// Petal index.
    #[arg(long, global = true)]
    petal: Option<usize>,
    /// Candidate summability levels, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    levels: Option<Vec<f64>>,
    /// Step budget for orbits and trajectories.
    #[arg(long, global = true)]
    budget: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Dynamical splitting tree as JSON.
    Split { problem: PathBuf },
    /// Summability levels, singular directions and unstable offsets.
    Directions { problem: PathBuf },
    /// Separatrices and trajectories of the compact-like polynomial fields.
    Portrait { problem: PathBuf },
    /// Homoclinic detection over rotations μ of each compact-like field.
    StabilitySweep { problem: PathBuf },
    /// Fatou coordinate on a grid in one petal.
    Fatou { problem: PathBuf },
    /// Lavaurs field on a grid in one petal; with --ray, its x-asymptotics.
    Lavaurs { problem: PathBuf },
    /// Horn-map coefficients and ζ at one parameter value.
    Horn { problem: PathBuf },
    /// Flatness of the difference of two Fatou realizations along a ray.
    Flatness { problem: PathBuf },
    /// Conjugacy witness between the map and its conjugate by the given σ.
    Conjugacy { problem: PathBuf },
    /// Run the acceptance criteria.
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Split { .. } => "split",
            Command::Directions { .. } => "directions",
            Command::Portrait { .. } => "portrait",
            Command::StabilitySweep { .. } => "stability-sweep",
            Command::Fatou { .. } => "fatou",
            Command::Lavaurs { .. } => "lavaurs",
            Command::Horn { .. } => "horn",
            Command::Flatness { .. } => "flatness",
            Command::Conjugacy { .. } => "conjugacy",
            Command::Selftest => "selftest",
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("UNFOLD_THREADS") else {
        return Ok(());
    };
    let schema = |message: String| CliError::Schema {
        location: "UNFOLD_THREADS".into(),
        message,
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|e| schema(format!("\"{value}\": {e}")))?;
    if n == 0 {
        return Err(schema("must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| schema(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let f = cli.flags;
    let settings = Settings {
        out: f.out,
        seed: f.seed,
        tol: f.tol,
        grid: f.grid,
        ray: f.ray,
        petal: f.petal,
        levels: f.levels,
        budget: f.budget,
    };
    if let Some(t) = settings.tol {
        if t.is_nan() || t <= 0.0 {
            return Err(CliError::flag("tol", "must be positive"));
        }
    }
    let load = |path: &PathBuf| ProblemFile::load(path);
    let written = match &cli.command {
        Command::Split { problem } => commands::split(&load(problem)?, &settings)?,
        Command::Directions { problem } => commands::directions(&load(problem)?, &settings)?,
        Command::Portrait { problem } => commands::portrait(&load(problem)?, &settings)?,
        Command::StabilitySweep { problem } => {
            commands::stability_sweep(&load(problem)?, &settings)?
        }
        Command::Fatou { problem } => commands::fatou(&load(problem)?, &settings)?,
        Command::Lavaurs { problem } => commands::lavaurs(&load(problem)?, &settings)?,
        Command::Horn { problem } => commands::horn(&load(problem)?, &settings)?,
        Command::Flatness { problem } => commands::flatness(&load(problem)?, &settings)?,
        Command::Conjugacy { problem } => commands::conjugacy(&load(problem)?, &settings)?,
        Command::Selftest => commands::selftest(&settings)?,
    };
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let out = cli.flags.out.clone();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("unfold {name}: {e}");
            if let Some(diag) = e.diagnostic() {
                let bytes = to_json(&diag);
                eprint!("{}", String::from_utf8_lossy(&bytes));
                if let Ok(dir) = OutDir::create(&out) {
                    let _ = dir.write("diagnostic.json", &bytes);
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
