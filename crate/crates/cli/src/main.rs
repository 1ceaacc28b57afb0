mod config;
mod plots;
mod report;
mod runner;

use clap::{Parser, Subcommand};
use config::ConfigFile;
use curvlab_core::Immersion;
use runner::Outcome;
use std::path::{Path, PathBuf};
use std::process::exit;

#[derive(Parser)]
#[command(name = "curvlab", version, about = "numerical checks for curvature integrals on hypersurfaces of space forms")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every check in a config and write the report artifacts.
    Run {
        config: PathBuf,
        /// Worker thread count (overrides CURVLAB_WORKERS and the config).
        #[arg(long)]
        workers: Option<usize>,
        /// JSON report path (overrides CURVLAB_JSON and the config).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Rerun checks on doubled grids and report observed convergence orders.
    Refine {
        config: PathBuf,
        /// Number of doublings on top of the configured grid.
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// Restrict to the check with this name.
        #[arg(long)]
        check: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// List built-in surface fixtures.
    ListFixtures,
    /// Run one check and write its radial profile as CSV.
    ExportProfile {
        config: PathBuf,
        /// Name of the check whose profile to export.
        #[arg(long)]
        check: String,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn env_path(key: &str) -> Option<PathBuf> {
    std::env::var_os(key).map(PathBuf::from)
}

fn load_or_exit(path: &Path) -> (ConfigFile, Immersion) {
    let cfg = match config::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("curvlab: {e}");
            exit(2);
        }
    };
    let im = match config::build_surface(&cfg.surface) {
        Ok(im) => im,
        Err(e) => {
            eprintln!("curvlab: surface: {e}");
            exit(2);
        }
    };
    (cfg, im)
}

fn resolve_workers(flag: Option<usize>, cfg: &ConfigFile) -> usize {
    flag.or_else(|| std::env::var("CURVLAB_WORKERS").ok().and_then(|s| s.parse().ok()))
        .or(cfg.workers)
        .unwrap_or(1)
        .max(1)
}

fn write_file(path: &Path, text: &str) {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            if let Err(e) = std::fs::create_dir_all(dir) {
                eprintln!("curvlab: cannot create {}: {e}", dir.display());
                exit(2);
            }
        }
    }
    if let Err(e) = std::fs::write(path, text) {
        eprintln!("curvlab: cannot write {}: {e}", path.display());
        exit(2);
    }
}

fn cmd_run(config_path: &Path, workers: Option<usize>, json: Option<PathBuf>) -> i32 {
    let (cfg, im) = load_or_exit(config_path);
    let workers = resolve_workers(workers, &cfg);
    let outcomes = runner::run_all(&im, &cfg, workers, 1, None);

    for (name, res) in &outcomes {
        match res {
            Ok(cr) => println!("{}", report::table_line(&cr.report)),
            Err(e) => eprintln!("curvlab: check {name}: {e}"),
        }
    }

    let json_path = json.or_else(|| env_path("CURVLAB_JSON")).or(cfg.output.json.clone());
    if let Some(path) = json_path {
        let reports: Vec<_> =
            outcomes.iter().filter_map(|(_, r)| r.as_ref().ok()).map(|cr| &cr.report).collect();
        write_file(&path, &report::to_json(&reports));
    }

    let profiles_dir =
        env_path("CURVLAB_PROFILES_DIR").or(cfg.output.profiles_dir.clone());
    let svg_dir = env_path("CURVLAB_SVG_DIR").or(cfg.output.svg_dir.clone());
    for (name, res) in &outcomes {
        let Ok(cr) = res else { continue };
        let Some(profile) = &cr.profile else { continue };
        if let Some(dir) = &profiles_dir {
            write_file(&dir.join(format!("{}.csv", report::sanitize(name))), &report::profile_csv(profile));
        }
        if let Some(dir) = &svg_dir {
            let svg = plots::line_plot(name, "r", &profile.integrand, &profile.radii, &profile.values);
            write_file(&dir.join(format!("{}.svg", report::sanitize(name))), &svg);
        }
    }

    runner::exit_code(&outcomes)
}

fn cmd_refine(
    config_path: &Path,
    levels: usize,
    check: Option<String>,
    workers: Option<usize>,
) -> i32 {
    let (cfg, im) = load_or_exit(config_path);
    if levels == 0 {
        eprintln!("curvlab: refine needs at least one level");
        return 2;
    }
    let workers = resolve_workers(workers, &cfg);
    let filter = check.as_deref();
    let mut per_level: Vec<Vec<Outcome>> = Vec::new();
    for pow in 0..=levels {
        per_level.push(runner::run_all(&im, &cfg, workers, 1 << pow, filter));
    }
    if per_level[0].is_empty() {
        eprintln!("curvlab: no check matches the requested name");
        return 2;
    }

    let svg_dir = env_path("CURVLAB_SVG_DIR").or(cfg.output.svg_dir.clone());
    let n_checks = per_level[0].len();
    for ci in 0..n_checks {
        let name = &per_level[0][ci].0;
        println!("check {name}");
        let mut slacks: Vec<Option<f64>> = Vec::new();
        for level in per_level.iter() {
            match &level[ci].1 {
                Ok(cr) => {
                    let r = &cr.report;
                    let grid: Vec<String> = r.grid.iter().map(|g| g.to_string()).collect();
                    println!(
                        "  grid {:<12} lhs={:<16.9e} rhs={:<16.9e} slack={:+.6e} refinement={:.3e}",
                        grid.join("x"),
                        r.lhs,
                        r.rhs,
                        r.slack,
                        r.refinement_estimate
                    );
                    slacks.push(Some(r.slack));
                }
                Err(e) => {
                    eprintln!("curvlab: check {name}: {e}");
                    slacks.push(None);
                }
            }
        }
        if slacks.iter().all(|s| s.is_some()) {
            let vals: Vec<f64> = slacks.iter().map(|s| s.unwrap()).collect();
            let finest = *vals.last().expect("levels >= 1");
            let errs: Vec<f64> = vals[..vals.len() - 1].iter().map(|v| (v - finest).abs()).collect();
            let mut orders = Vec::new();
            for k in 0..errs.len().saturating_sub(1) {
                let order = if errs[k + 1] > 0.0 && errs[k] > 0.0 {
                    (errs[k] / errs[k + 1]).log2()
                } else {
                    f64::INFINITY
                };
                orders.push(format!("{order:.3}"));
            }
            if !orders.is_empty() {
                println!("  orders: {}", orders.join(" "));
            }
            if let Some(dir) = &svg_dir {
                let xs: Vec<f64> =
                    (0..vals.len()).map(|k| (1usize << k) as f64).collect();
                let svg = plots::line_plot(
                    &format!("{name} slack vs resolution"),
                    "grid scale",
                    "slack",
                    &xs,
                    &vals,
                );
                write_file(&dir.join(format!("{}-slack.svg", report::sanitize(name))), &svg);
            }
        }
    }
    let all: Vec<Outcome> = per_level.into_iter().flatten().collect();
    runner::exit_code(&all)
}

fn cmd_export_profile(config_path: &Path, check: &str, out: Option<PathBuf>) -> i32 {
    let (cfg, im) = load_or_exit(config_path);
    let outcomes = runner::run_all(&im, &cfg, 1, 1, Some(check));
    let Some((name, res)) = outcomes.into_iter().next() else {
        eprintln!("curvlab: no check named {check:?} in the config");
        return 2;
    };
    match res {
        Ok(cr) => match cr.profile {
            Some(profile) => {
                let csv = report::profile_csv(&profile);
                match out {
                    Some(path) => write_file(&path, &csv),
                    None => print!("{csv}"),
                }
                0
            }
            None => {
                eprintln!("curvlab: check {name} produces no radial profile");
                2
            }
        },
        Err(e) => {
            eprintln!("curvlab: check {name}: {e}");
            2
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run { config, workers, json } => cmd_run(&config, workers, json),
        Cmd::Refine { config, levels, check, workers } => {
            cmd_refine(&config, levels, check, workers)
        }
        Cmd::ListFixtures => {
            for (name, what) in config::FIXTURES {
                println!("{name:<16} {what}");
            }
            0
        }
        Cmd::ExportProfile { config, check, out } => cmd_export_profile(&config, &check, out),
    };
    exit(code);
}
