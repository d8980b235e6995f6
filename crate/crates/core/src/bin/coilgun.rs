use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coilgun::config::RunConfig;
use coilgun::dynamics::launch;
use coilgun::magnetostatics::{field_csv, sample_field};
use coilgun::measured::{analyze, MeasuredLog, DEFAULT_DEAD_ZONE_A};
use coilgun::pulse::{PulseSchedule, PulseTemplate};
use coilgun::sweep::{displacement_grid_mm, search_pulses, sweep_displacement, Objective, PulseSearch, Strategy};
use coilgun::winding::{catalog, digitize, preset, preset_info, TubeSpec, WireSpec};
use coilgun::{Error, Result};

#[derive(Parser)]
#[command(name = "coilgun", version, about = "Single-stage coilgun simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// On-axis field and gradient of a coil as CSV.
    Field(FieldArgs),
    /// One launch from a run configuration.
    Simulate(SimulateArgs),
    /// Exit velocity against initial displacement.
    Sweep(SweepArgs),
    /// Grid search over pulse durations.
    Optimize(OptimizeArgs),
    /// Energy report for a measured current log.
    Ingest(IngestArgs),
    /// List the built-in coils.
    Presets(PresetsArgs),
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coil current in amperes.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    current: f64,
    #[arg(long, default_value_t = 0.1)]
    grid_mm: f64,
    /// Start of the grid; defaults to 20 mm before the tube.
    #[arg(long, allow_negative_numbers = true)]
    from_mm: Option<f64>,
    /// End of the grid; defaults to 20 mm past the tube.
    #[arg(long, allow_negative_numbers = true)]
    to_mm: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Replaces the configured schedule.
    #[arg(long)]
    pulse: Option<String>,
    /// Replaces the configured initial displacement.
    #[arg(long, allow_negative_numbers = true)]
    x0_mm: Option<f64>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut config = RunConfig::load(&self.config)?;
        if let Some(p) = &self.pulse {
            config.schedule = PulseSchedule::parse(p)?;
        }
        if let Some(x) = self.x0_mm {
            config.x0 = x * 1e-3;
        }
        Ok(config)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Writes `t_ms,i_A,vcap_V,polarity`.
    #[arg(long)]
    trace_csv: Option<PathBuf>,
    /// Writes `t_ms,x_mm,v_mps,F_N`.
    #[arg(long)]
    kinematics_csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, allow_negative_numbers = true)]
    from_mm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    to_mm: Option<f64>,
    #[arg(long)]
    step_mm: Option<f64>,
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Schedule shape such as `F? B? R?`.
    #[arg(long)]
    template: Option<String>,
    /// Comma-separated durations for one open slot; repeat once per slot.
    #[arg(long = "grid")]
    grids: Vec<String>,
    #[arg(long)]
    objective: Option<String>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    log: PathBuf,
    /// Coil resistance for the energy integral.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    resistance_ohm: Option<f64>,
    /// Takes the resistance from a built-in coil.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value_t = DEFAULT_DEAD_ZONE_A)]
    dead_zone_a: f64,
}

#[derive(Args)]
struct PresetsArgs {
    /// Prints one coil's winding profile.
    #[arg(long)]
    show: Option<String>,
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn field(args: FieldArgs) -> Result<()> {
    let (stack, tube) = match (&args.preset, &args.config) {
        (Some(name), _) => {
            let tube = TubeSpec::default();
            (digitize(&preset(name)?, &WireSpec::default(), &tube)?, tube)
        }
        (None, Some(path)) => {
            let config = RunConfig::load(path)?;
            (config.stack()?, config.tube)
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    let from = args.from_mm.unwrap_or(-20.0) * 1e-3;
    let to = args.to_mm.map_or(tube.length + 0.02, |v| v * 1e-3);
    let samples = sample_field(&stack, args.current, from, to, args.grid_mm * 1e-3)?;
    write_or_print(args.out.as_deref(), &field_csv(&samples))?;
    let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.b.abs()));
    eprintln!("{} loops, {} samples, peak |B| = {:.6e} T", stack.len(), samples.len(), peak);
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let config = args.run.load()?;
    let result = launch(&config.launch_setup()?)?;
    if let Some(path) = &args.trace_csv {
        std::fs::write(path, result.trace.to_csv())?;
    }
    if let Some(path) = &args.kinematics_csv {
        std::fs::write(path, result.kinematics_csv())?;
    }
    print!("schedule = \"{}\"\nx0_mm = {}\n{}", config.schedule, config.x0 * 1e3, result.summary());
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let config = args.run.load()?;
    let configured = config.sweep.as_ref().and_then(|s| s.displacement_grid().ok());
    let grid = match (args.from_mm, args.to_mm, args.step_mm, configured) {
        (Some(a), Some(b), Some(s), _) => displacement_grid_mm(a, b, s)?,
        (None, None, None, Some(g)) => g,
        (None, None, None, None) => displacement_grid_mm(0.0, 60.0, 2.0)?,
        _ => return Err(Error::Config { field: "sweep".into(), message: "give all of --from-mm, --to-mm and --step-mm".into() }),
    };
    let parallel = args.parallel || config.sweep.as_ref().is_some_and(|s| s.parallel);
    let result = sweep_displacement(&config.launch_setup()?, &grid, parallel)?;
    write_or_print(args.out.as_deref(), &result.to_csv())?;
    eprint!("{}", result.summary());
    Ok(())
}

fn optimize(args: OptimizeArgs) -> Result<()> {
    let config = args.run.load()?;
    let configured = config.sweep.as_ref().and_then(|s| s.pulse_search().ok());
    let mut search = match (&args.template, configured) {
        (Some(t), _) => {
            let template = PulseTemplate::parse(t)?;
            let grids = args
                .grids
                .iter()
                .map(|g| {
                    g.split(',')
                        .filter(|s| !s.is_empty())
                        .map(|v| v.trim().parse::<u32>().map_err(|_| Error::Config { field: "grid".into(), message: format!("{v:?} is not a duration") }))
                        .collect::<Result<Vec<u32>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            PulseSearch::new(template, grids)?
        }
        (None, Some(s)) => s,
        (None, None) => return Err(Error::Config { field: "template".into(), message: "give --template and --grid, or a pulse_grid sweep block".into() }),
    };
    if let Some(s) = &args.strategy {
        search = search.with_strategy(s.parse::<Strategy>()?);
    }
    if let Some(b) = args.budget {
        search = search.with_budget(b);
    }
    let objective = match (&args.objective, &config.sweep) {
        (Some(o), _) => o.parse::<Objective>()?,
        (None, Some(s)) => s.objective,
        (None, None) => Objective::Velocity,
    };
    let parallel = args.parallel || config.sweep.as_ref().is_some_and(|s| s.parallel);
    let result = search_pulses(&config.launch_setup()?, &search, objective, parallel)?;
    write_or_print(args.out.as_deref(), &result.to_csv())?;
    eprint!("{}", result.summary());
    Ok(())
}

fn ingest(args: IngestArgs) -> Result<()> {
    let resistance = match (&args.resistance_ohm, &args.preset) {
        (Some(r), _) => *r,
        (None, Some(name)) => preset_info(name)?.measured.resistance,
        (None, None) => unreachable!("clap requires one source"),
    };
    let log = MeasuredLog::load(&args.log)?;
    let report = analyze(&log, resistance, args.dead_zone_a)?;
    print!("resistance_ohm = {resistance}\n{}", report.summary());
    Ok(())
}

fn presets(args: PresetsArgs) -> Result<()> {
    if let Some(name) = args.show {
        print!("{}", preset_info(&name)?.profile.to_toml_string());
        return Ok(());
    }
    println!("name,title,sections,measured_uH,measured_ohm,assumption");
    for info in catalog() {
        println!(
            "{},{},{},{:.1},{:.1},\"{}\"",
            info.name,
            info.title,
            info.profile.sections.len(),
            info.measured.inductance * 1e6,
            info.measured.resistance,
            info.assumption
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Field(a) => field(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Optimize(a) => optimize(a),
        Command::Ingest(a) => ingest(a),
        Command::Presets(a) => presets(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("coilgun: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
