use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use physiosel::commands::{self, Context, FitOutcome};
use physiosel::config::PipelineConfig;
use physiosel::error::{CliError, Result, EXIT_DATA, EXIT_OK};
use physiosel_core::trex::Variant;

#[derive(Parser)]
#[command(name = "physiosel", version, about = "Physiological correlates of self-reported arousal")]
struct Cli {
    /// JSON configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Selector and benchmark seed (overrides the configuration).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to every available core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plain,
    DaNn,
}

#[derive(Args)]
struct SelectorArgs {
    /// Target FDR.
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated target FDR grid.
    #[arg(long, value_delimiter = ',')]
    alpha_grid: Option<Vec<f64>>,
    /// Number of random experiments.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the feature table from the recordings.
    Extract,
    /// Run the FDR-controlled selection on the feature table.
    Select(SelectorArgs),
    /// Fit classical and robust mixed models to the selected features.
    Fit,
    /// Summarize the selection and model stages.
    Report,
    /// Empirical FDR and TPR of the selector on synthetic designs.
    SynthBench {
        /// Repetitions per design.
        #[arg(long)]
        reps: Option<usize>,
        /// Comma-separated target FDR grid.
        #[arg(long, value_delimiter = ',')]
        alpha_grid: Option<Vec<f64>>,
        /// Number of random experiments.
        #[arg(long)]
        k: Option<usize>,
    },
}

fn effective_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.selector.trex.seed = s;
        cfg.bench.seed = s;
    }
    match &cli.command {
        Command::Select(a) => {
            if let Some(x) = a.alpha {
                cfg.selector.alpha = x;
            }
            if let Some(g) = &a.alpha_grid {
                cfg.selector.trex.alpha_grid = g.clone();
            }
            if let Some(k) = a.k {
                cfg.selector.trex.k = k;
            }
            if let Some(v) = a.variant {
                cfg.selector.trex.variant = match v {
                    VariantArg::Plain => Variant::Plain,
                    VariantArg::DaNn => Variant::DaNn,
                };
            }
        }
        Command::SynthBench { reps, alpha_grid, k } => {
            if let Some(r) = reps {
                cfg.bench.reps = *r;
            }
            if let Some(g) = alpha_grid {
                cfg.bench.alphas = g.clone();
            }
            if let Some(k) = k {
                cfg.selector.trex.k = *k;
            }
        }
        _ => {}
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<i32> {
    let ctx = Context::new(effective_config(cli)?, cli.threads)?;
    match &cli.command {
        Command::Extract => {
            let s = commands::extract(&ctx)?;
            println!("wrote {} rows to {}", s.rows, s.path.display());
            if !s.skipped.is_empty() {
                for (k, why) in &s.skipped {
                    eprintln!("skipped participant {}, video {}: {why}", k.participant, k.video);
                }
                return Err(CliError::Data(format!("{} window(s) skipped", s.skipped.len())));
            }
        }
        Command::Select(_) => {
            let s = commands::select(&ctx)?;
            let list = if s.selected.is_empty() { "none".to_string() } else { s.selected.join(", ") };
            println!("selected {} of {} features at target FDR {}: {list}", s.selected.len(), s.n_features, s.alpha);
        }
        Command::Fit => match commands::fit(&ctx)? {
            FitOutcome::NothingToFit => println!("nothing to fit: the selection is empty"),
            FitOutcome::Fitted(m) => {
                println!("{}", m.formula);
                for (a, b) in m.classical.coefficients.iter().zip(&m.robust.coefficients) {
                    println!(
                        "  {:<24} classical {:>8.4} (p_adj {:.3e})  robust {:>8.4} (p_adj {:.3e})",
                        a.name, a.estimate, a.p_adj, b.estimate, b.p_adj
                    );
                }
            }
        },
        Command::Report => {
            let r = commands::report(&ctx)?;
            print!("{}", r.text);
        }
        Command::SynthBench { .. } => {
            let lines = commands::synth_bench(&ctx)?;
            print!("{}", commands::bench_table(&lines));
            println!("wrote {}", ctx.out(commands::FDR_REPORT).display());
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(u8::try_from(code).unwrap_or(EXIT_DATA as u8))
}
