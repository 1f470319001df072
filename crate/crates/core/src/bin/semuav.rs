use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use semuav_core::baselines::{run_scheme_with, Scheme};
use semuav_core::experiment::{
    emit_csv, emit_plot_data, load_config, run_sweep, ScenarioConfig, SweepSpec,
};
use semuav_core::power_search::{GridSpec, Solution};
use semuav_core::verify::{run_all, VerifyPlan};
use semuav_core::Error;

/// Energy-optimal UAV placement, compression and power allocation.
#[derive(Parser)]
#[command(name = "semuav", version)]
struct Cli {
    /// Scenario file (TOML). Built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Points per power axis, overriding the scenario's grid.
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and print the solution.
    Solve {
        #[arg(long, default_value = "proposed")]
        scheme: Scheme,
        /// Print JSON instead of a summary.
        #[arg(long)]
        json: bool,
    },
    /// Sweep one parameter across schemes and write CSV.
    Sweep {
        /// Parameter to vary, e.g. B_B, D or T_th.
        #[arg(long)]
        axis: String,
        /// Comma-separated values in SI units (default range for B_B, D, T_th).
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Comma-separated scheme tags (default: the scenario's list).
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<Scheme>>,
        /// Per-record CSV.
        #[arg(long)]
        out: PathBuf,
        /// Optional table with one energy column per scheme.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Check the solvers against brute-force references.
    Verify {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Run the full case counts instead of the quick set.
        #[arg(long)]
        full: bool,
    },
    /// Print the built-in scenario as TOML.
    Config,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config { .. } | Error::InvalidParameter { .. } | Error::Io { .. } => 2,
                e if e.is_infeasible() => 3,
                _ => 1,
            })
        }
    }
}

fn run(cli: Cli) -> semuav_core::Result<ExitCode> {
    let mut config = match &cli.config {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(n) = cli.grid_n {
        config.grid = GridSpec {
            n_pu: n,
            n_pb: n,
            ..config.grid
        };
        config.validate()?;
    }

    match cli.command {
        Command::Config => {
            print!("{}", config.to_toml());
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { scheme, json } => {
            let params = config.system_params()?;
            let sol = run_scheme_with(&params, scheme, &config.grid, &config.bcd)?;
            if json {
                let text = serde_json::to_string_pretty(&sol)
                    .map_err(|e| Error::Internal(format!("json: {e}")))?;
                println!("{text}");
            } else {
                print_summary(&sol);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            axis,
            values,
            schemes,
            out,
            plot,
        } => {
            let schemes = schemes.unwrap_or_else(|| config.schemes.clone());
            let sweep = match values {
                Some(values) => SweepSpec {
                    axis,
                    values,
                    schemes,
                },
                None => SweepSpec::default_for(&axis, schemes)?,
            };
            let records = run_sweep(&config, &sweep)?;
            emit_csv(&records, &out)?;
            if let Some(plot) = plot {
                emit_plot_data(&records, &plot)?;
            }
            let feasible = records.iter().filter(|r| r.feasible()).count();
            eprintln!(
                "{} records ({} feasible) written to {}",
                records.len(),
                feasible,
                out.display()
            );
            Ok(if feasible == 0 {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Verify { seed, full } => {
            let plan = if full {
                VerifyPlan::full()
            } else {
                VerifyPlan::quick()
            };
            let reports = run_all(&plan, seed, &config.grid)?;
            let mut ok = true;
            for r in &reports {
                ok &= r.passed();
                println!(
                    "{:<18} {:>6} cases  {:>4} failures  worst {:.3}  {}",
                    r.name,
                    r.cases,
                    r.failures,
                    r.worst,
                    if r.passed() { "PASS" } else { "FAIL" }
                );
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn print_summary(sol: &Solution) {
    let d = &sol.decision;
    let m = &sol.metrics;
    println!("scheme      {}", sol.scheme);
    println!("energy      {:.6e} J", m.e_total);
    println!("latency     {:.6e} s", m.t_total);
    println!("offload     a = {} ({:?})", d.offload.bit(), d.offload);
    println!("rho         {:.6}", d.rho);
    println!("p_U         {:.6e} W", d.p_uav);
    println!("p_B         {:.6e} W", d.p_bs);
    println!(
        "location    ({:.3}, {:.3}, {:.3}) m",
        d.loc.x, d.loc.y, d.loc.h
    );
    println!("qos         {:.6}", m.q);
    println!("v0 / v1     {:.6e} / {:.6e} J", sol.v0, sol.v1);
    println!(
        "stages      e_U {:.3e}  e_UB {:.3e}  e_B {:.3e}  e_BI {:.3e}  e_BS {:.3e}",
        m.e_u, m.e_ub, m.e_b, m.e_bi, m.e_bs
    );
}
