use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use reflexcr::{run_file, Overrides};

#[derive(Parser)]
#[command(name = "reflexcr", version, about = "Reflection, edge-of-the-wedge and CR-extension experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reflect a holomorphic function with analytic imaginary trace across the real axis.
    Reflect(Common),
    /// Reflect a harmonic function across the real axis.
    Harmonic(Common),
    /// Reflect across a real-analytic curve.
    Curve(Common),
    /// Edge-of-the-wedge extension by Möbius averaging.
    Eow(Common),
    /// Extend a CR function from a wedge to a neighborhood of the edge.
    Crextend(Common),
    /// Uniqueness check for two functions on a manifold.
    Verify(Common),
    /// Run a scenario of any kind.
    Run(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("REFLEXCR_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().map_err(|_| format!("REFLEXCR_THREADS: expected a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("REFLEXCR_THREADS: must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("REFLEXCR_THREADS: {e}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (kind, args) = match cli.command {
        Command::Reflect(a) => (Some("reflect"), a),
        Command::Harmonic(a) => (Some("harmonic"), a),
        Command::Curve(a) => (Some("curve"), a),
        Command::Eow(a) => (Some("eow"), a),
        Command::Crextend(a) => (Some("crextend"), a),
        Command::Verify(a) => (Some("verify"), a),
        Command::Run(a) => (None, a),
    };
    let ov = Overrides {
        nodes: args.nodes,
        seed: args.seed,
        tol: args.tol,
    };
    match run_file(&args.scenario, &args.out, kind, ov) {
        Err(e) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Ok(report) => {
            for c in &report.checks {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                println!("{verdict} {} = {:.3e} (limit {:.3e})", c.name, c.value, c.limit);
            }
            if let Some(err) = &report.error {
                println!("ERROR in stage {}: {}", err.stage, err.message);
            }
            println!("{} -> {}", if report.pass { "PASS" } else { "FAIL" }, args.out.display());
            ExitCode::from(report.exit_code() as u8)
        }
    }
}
