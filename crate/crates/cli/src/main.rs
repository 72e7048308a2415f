//! `lee` — batch front-end for the Lee-model dissipation toolkit.
//!
//! Exit codes: 0 success, 1 verification/computation failure,
//! 2 configuration error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lee_cli::artifacts::ArtifactMeta;
use lee_cli::commands;
use lee_cli::config::RunConfig;
use lee_cli::verify::{self, Status};

#[derive(Parser)]
#[command(name = "lee", version, about = "Unstable Lee model at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file (key = value sections; see configs/benchmark.conf)
    #[arg(long)]
    config: PathBuf,
    /// Output directory for artifacts
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the configured random seed
    #[arg(long)]
    seed: Option<u64>,
    /// Thread count for parallel inner loops (0 = library default)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the physical mass, width, and renormalization constants
    Pole(Common),
    /// Tabulate the kernels D, B, A on the configured energy grid
    Kernels(Common),
    /// Evolve the exact single-excitation survival amplitude
    Sector(Common),
    /// Integrate the dissipative master equation
    Master(Common),
    /// Run the Langevin ensemble
    Langevin(Common),
    /// Run every acceptance criterion and write report.json
    Verify(Common),
}

fn load(common: &Common) -> Result<(RunConfig, String, ArtifactMeta), String> {
    let text = fs::read_to_string(&common.config)
        .map_err(|e| format!("cannot read config {}: {e}", common.config.display()))?;
    let mut cfg = RunConfig::parse(&text).map_err(|e| e.to_string())?;
    if let Some(seed) = common.seed {
        cfg.langevin.seed = seed;
    }
    let meta = ArtifactMeta::new(&text, cfg.langevin.seed);
    Ok((cfg, text, meta))
}

fn prepare_out(common: &Common) -> Result<(), String> {
    fs::create_dir_all(&common.out)
        .map_err(|e| format!("cannot create output directory {}: {e}", common.out.display()))
}

fn init_threads(n: usize) {
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run() -> Result<ExitCode, (u8, String)> {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Pole(c)
        | Command::Kernels(c)
        | Command::Sector(c)
        | Command::Master(c)
        | Command::Langevin(c)
        | Command::Verify(c) => c,
    };
    init_threads(common.threads);
    let (cfg, text, meta) = load(common).map_err(|m| (2u8, m))?;
    prepare_out(common).map_err(|m| (1u8, m))?;
    let out = common.out.as_path();

    let compute = |m: String| (1u8, m);
    match &cli.command {
        Command::Pole(_) => {
            let pole = commands::cmd_pole(&cfg, &meta, out).map_err(|e| compute(e.to_string()))?;
            println!(
                "pole: m_V = {:.9}, Gamma = {:.6e}, Z_V = {:.9} -> {}",
                pole.m_v,
                pole.gamma,
                pole.z_v,
                out.join("pole.json").display()
            );
        }
        Command::Kernels(_) => {
            let table =
                commands::cmd_kernels(&cfg, &meta, out).map_err(|e| compute(e.to_string()))?;
            println!(
                "kernels: {} rows -> {}",
                table.energies.len(),
                out.join("kernels.csv").display()
            );
        }
        Command::Sector(_) => {
            let run =
                commands::cmd_sector(&cfg, &meta, out).map_err(|e| compute(e.to_string()))?;
            match run.summary.gamma_fit {
                Some(g) => println!(
                    "sector: Gamma_fit = {:.6e} vs pole {:.6e} -> {}",
                    g,
                    run.summary.gamma_pole,
                    out.join("survival.csv").display()
                ),
                None => println!(
                    "sector: stable regime, no decay fit -> {}",
                    out.join("survival.csv").display()
                ),
            }
        }
        Command::Master(_) => {
            let run =
                commands::cmd_master(&cfg, &meta, out).map_err(|e| compute(e.to_string()))?;
            println!(
                "master: final S = {:.6}, max trace defect = {:.2e} -> {}",
                run.summary.final_entropy,
                run.summary.max_trace_defect,
                out.join("master.csv").display()
            );
        }
        Command::Langevin(_) => {
            let run =
                commands::cmd_langevin(&cfg, &meta, out).map_err(|e| compute(e.to_string()))?;
            println!(
                "langevin: <|phi|^2>_tail = {:.4} +- {:.4} -> {}",
                run.summary.tail_mean_sq,
                run.summary.tail_mean_sq_se,
                out.join("langevin.csv").display()
            );
        }
        Command::Verify(_) => {
            let output =
                verify::run_verify(&cfg, &text, out).map_err(|e| compute(e.to_string()))?;
            for c in &output.report.criteria {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skip => "SKIP",
                };
                println!("{tag} {:>2} {}: {}", c.id, c.name, c.details);
            }
            for (id, secs) in &output.timings {
                if *id == 0 {
                    eprintln!("timing: artifact pipeline {secs:.2}s");
                } else {
                    eprintln!("timing: criterion {id} {secs:.2}s");
                }
            }
            println!("report -> {}", out.join("report.json").display());
            if !output.report.all_pass {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
