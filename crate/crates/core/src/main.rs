use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lamina::config::RunConfig;
use lamina::{runner, Error};

#[derive(Parser)]
#[command(name = "lamina", version, about = "Island counting and laminated currents for discretized curves in C²")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the configured curve and write it as a mesh file.
    Generate(Common),
    /// Run the full pipeline at every k.
    Run(Common),
    /// Run a doubling sweep over k and check nesting of the islands.
    Sweep(Common),
    /// Calibrate the Ahlfors constant h on the generator suite.
    Calibrate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated grid parameters.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
}

impl Common {
    fn config(&self) -> lamina::Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(o) = &self.out {
            c.output_dir = o.clone();
        }
        if let Some(k) = &self.k {
            c.k_list = k.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn execute(cmd: &Command) -> lamina::Result<bool> {
    match cmd {
        Command::Generate(a) => {
            let c = a.config()?;
            let s = runner::generate_to(&c, &c.output_dir)?;
            println!(
                "area {:.6} genus {} boundaries {} residual {:.3e}",
                s.area, s.genus, s.boundary_count, s.holomorphy_residual
            );
            Ok(true)
        }
        Command::Run(a) | Command::Sweep(a) => {
            let c = a.config()?;
            if matches!(cmd, Command::Sweep(_)) && !c.is_doubling() {
                return Err(Error::Config("sweep needs a doubling k list".into()));
            }
            let (report, outcomes) = runner::run(&c)?;
            runner::write_outputs(&c.output_dir, &report, &outcomes)?;
            for r in &report.per_k {
                println!(
                    "k={} s={} a={} islands={} good={} defect={:.4e}",
                    r.k, r.vertex_count, r.edge_count, r.bound.islands, r.good_islands, r.defect
                );
            }
            for ch in report.theorem_checks.iter().filter(|c| !c.passed) {
                eprintln!("theorem check failed: {} {}", ch.name, ch.detail);
            }
            for ch in report.hypothesis_checks.iter().filter(|c| !c.passed) {
                eprintln!("hypothesis flag: {} {}", ch.name, ch.detail);
            }
            Ok(report.theorem_ok)
        }
        Command::Calibrate(a) => {
            let c = a.config()?;
            let cal = runner::calibrate(&c)?;
            runner::write_calibration(&c.output_dir, &cal)?;
            println!("h = {}", cal.h);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
