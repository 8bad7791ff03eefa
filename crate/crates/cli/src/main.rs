//! `masscheck`: runs scenario files through the mass pipelines.
//!
//! Exit codes: 0 every verdict PASS, 1 a FAIL or a pipeline error,
//! 2 usage or scenario parse error, 3 HYPOTHESIS-VIOLATED or INCONCLUSIVE.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use masscheck_core::geometry::presets::PRESETS;
use masscheck_core::pipeline;
use masscheck_core::report::{emit_report, exit_code, render_text};
use masscheck_core::scenario::Scenario;
use masscheck_core::tolerances::ToleranceProfile;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "masscheck", version, about = "Numerical checks of positive mass and Brown-York positivity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV tables and text summary.
    Run {
        scenario: PathBuf,
        /// Output directory; overrides the scenario's [output] dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the smoothing sweep.
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: Option<u16>,
        #[arg(long, value_enum)]
        tolerance_profile: Option<ProfileArg>,
    },
    /// List the analytic profile presets.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Default,
    Strict,
}

impl From<ProfileArg> for ToleranceProfile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Default => ToleranceProfile::Default,
            ProfileArg::Strict => ToleranceProfile::Strict,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            for p in PRESETS {
                println!("{:<14} {:<34} {}", p.name, p.parameters, p.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            scenario,
            out,
            jobs,
            tolerance_profile,
        } => run(scenario, out, jobs, tolerance_profile.map(Into::into)),
    }
}

fn configure_jobs(jobs: Option<u16>) {
    let Some(n) = jobs else { return };
    #[cfg(feature = "parallel")]
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
        eprintln!("warning: thread pool already configured: {e}");
    }
    #[cfg(not(feature = "parallel"))]
    if n > 1 {
        eprintln!("warning: built without the parallel feature; --jobs {n} runs sequentially");
    }
}

fn run(path: PathBuf, out: Option<PathBuf>, jobs: Option<u16>, profile: Option<ToleranceProfile>) -> ExitCode {
    configure_jobs(jobs);
    let scenario = match Scenario::load(&path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let tol = match scenario.tolerances(profile) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let report = match pipeline::run(&scenario, &tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", scenario.name);
            return ExitCode::from(EXIT_FAIL);
        }
    };
    let dir = out.unwrap_or_else(|| match &scenario.output.dir {
        Some(d) => scenario.base_dir().join(d),
        None => PathBuf::from("out"),
    });
    print!("{}", render_text(&report));
    match emit_report(&report, &dir, &scenario.stem()) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    }
    ExitCode::from(exit_code([report.verdict]) as u8)
}
