mod config_file;
mod svg;

use std::fs;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use gsdo::bench::{
    data_profile, default_alpha_grid, default_beta_grid, performance_profile, read_results_csv,
    run_experiment, w_from_result_rows, SolverRuns,
};
use gsdo::stages::solve_with_archive;
use gsdo::testbed::{find_entry, get_problem, list_problems};
use gsdo::{Scenario, SolverConfig};

#[derive(Parser)]
#[command(
    name = "gsdo",
    about = "Global optimization with RBF surrogates for constrained derivative-free problems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Run one solver trial on a registered test problem.
    Solve {
        /// Problem name from the registry (see `gsdo problems`).
        #[arg(long)]
        problem: String,
        /// Constraint scenario 1..4.
        #[arg(long, default_value_t = 1)]
        set: u8,
        /// Evaluation budget; defaults to 15(d+1) for set 1, 30(d+1) otherwise.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// key=value config file; command-line flags win on conflict.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the per-evaluation log as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the final archive as CSV.
        #[arg(long)]
        archive: Option<PathBuf>,
    },
    /// Run a multi-trial experiment over registry problems.
    Bench {
        #[arg(long, default_value_t = 1)]
        set: u8,
        #[arg(long, default_value_t = 30)]
        trials: u64,
        /// Comma-separated problem names; defaults to every problem in the set.
        #[arg(long, value_delimiter = ',')]
        problems: Option<Vec<String>>,
        /// Evaluation budget override applied to every problem.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Results CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute data or performance profiles from results CSVs.
    Profiles {
        /// Results CSV; repeat to compare runs (one labeled column each).
        #[arg(long = "in", required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        tau: f64,
        #[arg(long, value_enum)]
        kind: ProfileKind,
        /// Profile CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG rendering.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// List registered problems (name, dimension, constraints, optimum).
    Problems {
        #[arg(long)]
        set: Option<u8>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileKind {
    Data,
    Perf,
}

fn scenario_from(set: u8) -> Result<Scenario> {
    Scenario::from_index(set).with_context(|| format!("set must be 1..4, got {set}"))
}

fn build_config(
    dimension: usize,
    scenario: Scenario,
    config_path: Option<&PathBuf>,
    budget: Option<usize>,
    seed: Option<u64>,
) -> Result<SolverConfig<f64>> {
    let mut config = SolverConfig::defaults(dimension, scenario);
    if let Some(path) = config_path {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        config_file::apply(&mut config, &text)?;
    }
    if let Some(b) = budget {
        config.t_max = b;
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        CliCommand::Solve {
            problem,
            set,
            budget,
            seed,
            config,
            trace,
            archive,
        } => {
            let scenario = scenario_from(set)?;
            let spec = get_problem(&problem, scenario)?;
            let cfg = build_config(spec.dimension(), scenario, config.as_ref(), budget, Some(seed))?;
            let (record, final_archive) = solve_with_archive(&spec, &cfg)?;
            println!("{}", record.summary());
            if let Some(path) = trace {
                let mut file = fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                record.write_csv(&mut file)?;
            }
            if let Some(path) = archive {
                let mut file = fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                final_archive.write_csv(&mut file)?;
            }
        }
        CliCommand::Bench {
            set,
            trials,
            problems,
            budget,
            config,
            out,
        } => {
            let scenario = scenario_from(set)?;
            let names: Vec<String> = match problems {
                Some(list) => list,
                None => list_problems(scenario).iter().map(|s| s.to_string()).collect(),
            };
            let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
            for name in &name_refs {
                find_entry(name)?;
            }
            let config_path = config.clone();
            let result = run_experiment(&name_refs, scenario, trials, |spec| {
                build_config(spec.dimension(), scenario, config_path.as_ref(), budget, None)
                    .expect("config validated before the run")
            })?;
            for problem in &result.problems {
                let median = problem
                    .median_best()
                    .map_or("-".to_string(), |f| format!("{f:.4e}"));
                println!(
                    "{:8} N_s = {:2}/{trials}  median = {median}",
                    problem.name,
                    problem.n_s()
                );
            }
            let mut file =
                fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            result.write_results_csv(&mut file)?;
            println!("wrote {}", out.display());
        }
        CliCommand::Profiles {
            inputs,
            tau,
            kind,
            out,
            svg,
        } => {
            if !(0.0 < tau && tau < 1.0) {
                bail!("tau must lie in (0, 1)");
            }
            let mut runs: Vec<SolverRuns> = Vec::new();
            let mut dims: Option<Vec<usize>> = None;
            for path in &inputs {
                let file = fs::File::open(path)
                    .with_context(|| format!("opening {}", path.display()))?;
                let rows = read_results_csv(BufReader::new(file))?;
                let table = w_from_result_rows(&rows, tau);
                let label = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                let these_dims: Vec<usize> = table.iter().map(|(_, d, _)| *d).collect();
                match &dims {
                    None => dims = Some(these_dims),
                    Some(existing) if *existing == these_dims => {}
                    _ => bail!("input files cover different problem lists"),
                }
                runs.push(SolverRuns {
                    label,
                    w: table.into_iter().map(|(_, _, w)| w).collect(),
                });
            }
            let dims = dims.unwrap_or_default();
            let (table, title, x_label) = match kind {
                ProfileKind::Perf => (
                    performance_profile(&runs, &default_alpha_grid()),
                    format!("Performance profile (tau = {tau})"),
                    "performance ratio".to_string(),
                ),
                ProfileKind::Data => {
                    let beta_max = runs
                        .iter()
                        .flat_map(|r| r.w.iter().zip(&dims))
                        .filter_map(|(w, &d)| w.map(|w| w as f64 / (d + 1) as f64))
                        .fold(1.0f64, f64::max);
                    (
                        data_profile(&runs, &dims, &default_beta_grid(beta_max)),
                        format!("Data profile (tau = {tau})"),
                        "simplex gradients".to_string(),
                    )
                }
            };
            let mut file =
                fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            table.write_csv(&mut file)?;
            println!("wrote {}", out.display());
            if let Some(path) = svg {
                fs::write(&path, svg::render_profile(&table, &title, &x_label))
                    .with_context(|| format!("writing {}", path.display()))?;
                println!("wrote {}", path.display());
            }
        }
        CliCommand::Problems { set } => {
            let scenario = scenario_from(set.unwrap_or(1))?;
            println!("{:8} {:>4} {:>4} {:>14}", "name", "dim", "m", "optimum");
            for name in list_problems(scenario) {
                let entry = find_entry(name)?;
                println!(
                    "{:8} {:>4} {:>4} {:>14.6}",
                    entry.name, entry.dimension, entry.constraint_count, entry.f_star
                );
            }
        }
    }
    Ok(())
}
