//! `nsdarcy`: run coupled free-flow / porous-media simulations, convergence
//! studies, energy diagnostics and solver cross-comparisons.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nsdarcy::scenario::{convergence_study, global_velocity, reference_implicit_solve, Coupling};
use nsdarcy::stepper::{Scheme, Stepper};
use nsdarcy_cli::config::{parse_config, RunConfig, SchemeChoice};
use nsdarcy_cli::{csvio, profiles, report::RunReport, vtk};
use rand::{Rng, SeedableRng};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "nsdarcy", about = "2D Navier-Stokes-Darcy SAV solver", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and write snapshots plus a JSON report.
    Run(RunArgs),
    /// Run the manufactured convergence study and write a CSV table.
    Converge(ConvergeArgs),
    /// Zero-forcing run from random initial data; writes per-step energy
    /// identity residuals.
    Energy(EnergyArgs),
    /// Run the SAV scheme and the implicit Picard reference on one scenario
    /// and write centerline velocity profiles.
    Compare(CompareArgs),
}

#[derive(Args)]
struct ConfigOverrides {
    /// JSON config file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    /// be-sav | bdf2-sav | implicit-ref
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "steps")]
    n_steps: Option<u64>,
    #[arg(long)]
    final_time: Option<f64>,
    /// Mesh cell size h.
    #[arg(long)]
    resolution: Option<f64>,
    /// Mesh file (Y-shape scenario).
    #[arg(long)]
    mesh: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    stride: Option<u64>,
    #[arg(long)]
    omega1: Option<f64>,
    #[arg(long)]
    omega2: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    picard_tol: Option<f64>,
    #[arg(long)]
    picard_max: Option<u64>,
}

impl ConfigOverrides {
    fn resolve(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?,
            None => "{}".to_string(),
        };
        let mut value: serde_json::Value =
            serde_json::from_str(&base).context("config is not valid JSON")?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| anyhow!("config root must be a JSON object"))?;
        let mut set = |key: &str, v: Option<serde_json::Value>| {
            if let Some(v) = v {
                obj.insert(key.to_string(), v);
            }
        };
        set("scenario", self.scenario.clone().map(Into::into));
        set("scheme", self.scheme.clone().map(Into::into));
        set("dt", self.dt.map(Into::into));
        set("n_steps", self.n_steps.map(Into::into));
        set("final_time", self.final_time.map(Into::into));
        set("resolution", self.resolution.map(Into::into));
        set("mesh", self.mesh.clone().map(Into::into));
        set("out_dir", self.out.clone().map(Into::into));
        set("stride", self.stride.map(Into::into));
        set("omega1", self.omega1.map(Into::into));
        set("omega2", self.omega2.map(Into::into));
        set("k", self.k.map(Into::into));
        set("seed", self.seed.map(Into::into));
        set("picard_tol", self.picard_tol.map(Into::into));
        set("picard_max", self.picard_max.map(Into::into));
        Ok(parse_config(&serde_json::to_string(&value)?)?)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
    /// Number of table rows.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Coarsest time step.
    #[arg(long, default_value_t = 0.25)]
    dt0: f64,
    /// h2-eq-dt | h-eq-dt (defaults to the scheme's coupling rule)
    #[arg(long)]
    coupling: Option<String>,
}

#[derive(Args)]
struct EnergyArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
    /// Profile sample count per line.
    #[arg(long, default_value_t = 128)]
    samples: usize,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Converge(args) => cmd_converge(args),
        Command::Energy(args) => cmd_energy(args),
        Command::Compare(args) => cmd_compare(args),
    };
    if let Err(err) = result {
        // Machine-readable error on stderr.
        eprintln!("{}", serde_json::json!({ "error": format!("{err:#}") }));
        std::process::exit(1);
    }
}

fn prepare_out(config: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("cannot create {}", config.out_dir.display()))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let config = args.overrides.resolve()?;
    prepare_out(&config)?;
    let scenario = config.scenario()?;
    let mesh = scenario.build_mesh(config.resolution)?;

    if config.scheme == SchemeChoice::ImplicitRef {
        return run_reference(&config, scenario, mesh);
    }
    let scheme = config.scheme.sav_scheme().expect("SAV scheme");
    let stepper = Stepper::new(scenario, mesh, config.dt, config.n_steps, scheme)?;
    let result = stepper.run(config.stride)?;

    let report = RunReport::build(&config, &stepper, &result);
    report.write(&config.out_dir.join("report.json"))?;
    for (i, state) in result.snapshots.iter().enumerate() {
        let fields = vtk::VtkFields::from_state(state, &stepper.mesh, &stepper.spaces);
        vtk::write_vtk(
            &config.out_dir.join(format!("fields_{i:04}.vtk")),
            &stepper.mesh,
            &stepper.params,
            &fields,
            &format!("{} t={}", stepper.scenario.name, state.t),
        )?;
    }
    let final_state = result.final_state();
    let gv = global_velocity(final_state, &stepper.mesh, &stepper.spaces, &stepper.params);
    let fields =
        vtk::VtkFields::with_global_velocity(final_state, &stepper.mesh, &stepper.spaces, &gv);
    vtk::write_vtk(
        &config.out_dir.join("global_velocity.vtk"),
        &stepper.mesh,
        &stepper.params,
        &fields,
        &format!(
            "{} global velocity t={}",
            stepper.scenario.name, final_state.t
        ),
    )?;

    println!(
        "{} [{}] dt={} steps={} h={} -> {} (max energy residual {:.3e}, factorizations {})",
        stepper.scenario.name,
        config.scheme.as_str(),
        config.dt,
        config.n_steps,
        config.resolution,
        config.out_dir.display(),
        result.stability.max_energy_residual,
        stepper.factorization_count,
    );
    Ok(())
}

fn run_reference(
    config: &RunConfig,
    scenario: nsdarcy::scenario::Scenario,
    mesh: nsdarcy::mesh::Mesh,
) -> Result<()> {
    let spaces = nsdarcy::fem::Spaces::build(&mesh);
    let params = scenario.physical_params(&mesh)?;
    let run = reference_implicit_solve(
        &scenario,
        &mesh,
        config.dt,
        config.n_steps,
        config.picard_tol,
        config.picard_max,
    )?;
    let final_state = run.states.last().expect("at least the initial state");
    let fields = vtk::VtkFields::from_state(final_state, &mesh, &spaces);
    vtk::write_vtk(
        &config.out_dir.join("fields_final.vtk"),
        &mesh,
        &params,
        &fields,
        &format!("{} implicit reference t={}", scenario.name, final_state.t),
    )?;
    std::fs::write(
        config.out_dir.join("report.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "scenario": scenario.name,
            "scheme": "implicit-ref",
            "dt": config.dt,
            "n_steps": config.n_steps,
            "picard_tol": config.picard_tol,
            "picard_iterations": run.iterations,
        }))?,
    )?;
    println!(
        "{} [implicit-ref] dt={} steps={} -> {} (max picard iterations {})",
        scenario.name,
        config.dt,
        config.n_steps,
        config.out_dir.display(),
        run.iterations.iter().max().copied().unwrap_or(0),
    );
    Ok(())
}

fn cmd_converge(args: ConvergeArgs) -> Result<()> {
    let config = args.overrides.resolve()?;
    prepare_out(&config)?;
    if args.levels == 0 {
        bail!("need at least one level");
    }
    let scheme = match config.scheme {
        SchemeChoice::BeSav => Scheme::BeSav,
        SchemeChoice::Bdf2Sav => Scheme::Bdf2Sav,
        SchemeChoice::ImplicitRef => bail!("converge requires be-sav or bdf2-sav"),
    };
    let coupling = match args.coupling.as_deref() {
        Some("h2-eq-dt") => Coupling::H2EqDt,
        Some("h-eq-dt") => Coupling::HEqDt,
        None => match scheme {
            Scheme::BeSav => Coupling::H2EqDt,
            Scheme::Bdf2Sav => Coupling::HEqDt,
        },
        Some(other) => bail!("unknown coupling {other:?}"),
    };
    // Δt-refinement factor whose pairing with the coupling halves h per level.
    let factor: f64 = match coupling {
        Coupling::H2EqDt => 4.0,
        Coupling::HEqDt => 2.0,
    };
    let dt_list: Vec<f64> = (0..args.levels)
        .map(|i| args.dt0 / factor.powi(i as i32))
        .collect();
    let t_final = if args.overrides.final_time.is_none() && args.overrides.config.is_none() {
        1.0
    } else {
        config.final_time
    };
    let scenario = nsdarcy::scenario::manufactured(
        config.c,
        config.nu,
        config.k,
        config.alpha,
        config.s0,
        config.g,
        t_final,
    );
    let table = convergence_study(&scenario, scheme, coupling, &dt_list, t_final)?;
    let path = config.out_dir.join("convergence.csv");
    csvio::write_convergence_csv(&path, &table)?;
    print!("{}", csvio::convergence_csv(&table));
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_energy(args: EnergyArgs) -> Result<()> {
    let mut config = args.overrides.resolve()?;
    if args.overrides.scenario.is_none() && args.overrides.config.is_none() {
        // The identity presumes homogeneous boundary data: default to the
        // decay scenario at a moderate resolution.
        config.scenario_name = "decay".to_string();
        if args.overrides.resolution.is_none() {
            config.resolution = 0.125;
        }
        if args.overrides.dt.is_none() {
            config.dt = 0.01;
            config.final_time = config.dt * config.n_steps as f64;
        }
    }
    prepare_out(&config)?;
    let scheme = config
        .scheme
        .sav_scheme()
        .ok_or_else(|| anyhow!("energy requires be-sav or bdf2-sav"))?;
    let scenario = config.scenario()?;
    let mesh = scenario.build_mesh(config.resolution)?;
    let stepper = Stepper::new(scenario, mesh, config.dt, config.n_steps, scheme)?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(config.seed);
    let u: Vec<f64> = (0..stepper.spaces.velocity.n_dofs)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let phi: Vec<f64> = (0..stepper.spaces.head.n_dofs)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let result = stepper.run_from(stepper.init_with(u, phi), 0)?;

    let path = config.out_dir.join("energy.csv");
    let mut text = String::from("n,t,energy,identity_residual\n");
    for (i, rep) in result.reports.iter().enumerate() {
        text.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            (i + 1) as f64 * config.dt,
            result.stability.energy_history[i + 1],
            rep.energy.residual,
        ));
    }
    std::fs::write(&path, text)?;
    let max_residual = result.stability.max_energy_residual;
    println!(
        "{} steps, dt={}, max |energy identity residual| = {max_residual:.3e}, wrote {}",
        config.n_steps,
        config.dt,
        path.display()
    );
    if max_residual > 1e-9 {
        bail!("energy identity violated: max residual {max_residual:e} > 1e-9");
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let mut config = args.overrides.resolve()?;
    if args.overrides.scenario.is_none() && args.overrides.config.is_none() {
        config.scenario_name = "cavity".to_string();
    }
    prepare_out(&config)?;
    let scenario = config.scenario()?;
    let mesh = scenario.build_mesh(config.resolution)?;
    let stepper = Stepper::new(scenario, mesh, config.dt, config.n_steps, Scheme::BeSav)?;
    let sav = stepper.run(0)?;
    let reference = reference_implicit_solve(
        &stepper.scenario,
        &stepper.mesh,
        config.dt,
        config.n_steps,
        config.picard_tol,
        config.picard_max,
    )?;
    let sav_final = sav.final_state();
    let ref_final = reference.states.last().expect("states");

    // Cross-section lines: vertical at the fluid box mid-x spanning both
    // subdomains, horizontal at the fluid box mid-y.
    let (fluid, porous) = match &stepper.scenario.geometry {
        nsdarcy::scenario::Geometry::RectPair { fluid, porous } => (*fluid, *porous),
        _ => bail!("compare requires a rectangle-pair scenario"),
    };
    let x_mid = 0.5 * (fluid.x0 + fluid.x1);
    let y_mid = 0.5 * (fluid.y0 + fluid.y1);
    let vertical = profiles::vertical_profile(
        sav_final,
        ref_final,
        &stepper.mesh,
        &stepper.spaces,
        &stepper.params,
        x_mid,
        (porous.y0, fluid.y1),
        args.samples,
    );
    let horizontal = profiles::horizontal_profile(
        sav_final,
        ref_final,
        &stepper.mesh,
        &stepper.spaces,
        &stepper.params,
        y_mid,
        (fluid.x0, fluid.x1),
        args.samples,
    );
    let p1 = config.out_dir.join(format!("profile_u1_x{x_mid}.csv"));
    let p2 = config.out_dir.join(format!("profile_u2_y{y_mid}.csv"));
    profiles::write_profile_csv(&p1, "y", "U1", &vertical)?;
    profiles::write_profile_csv(&p2, "x", "U2", &horizontal)?;

    let scale = vertical.max_magnitude().max(horizontal.max_magnitude());
    let dev = vertical.max_deviation().max(horizontal.max_deviation());
    println!(
        "max |U_sav - U_ref| = {:.3e} ({:.2}% of max |U| = {:.3e}); wrote {} and {}",
        dev,
        100.0 * dev / scale.max(1e-300),
        scale,
        p1.display(),
        p2.display()
    );
    Ok(())
}
