use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use unitri::commands::{self, error_code, parse_range, Command, DensityKind, RunConfig};
use unitri::io::Format;
use unitri::ModelKind;

#[derive(Parser)]
#[command(
    name = "unitri",
    version,
    about = "Random triangles of unit area from lognormal models"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Draw triangles (or areas) from a model.
    Sample {
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Required: sampling is never seeded from the clock.
        #[arg(long)]
        seed: u64,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate an analytic density on a grid.
    Density {
        #[arg(long, value_enum)]
        which: DensityKind,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        /// Window as LO:HI.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Compare quadrature, Monte Carlo and known closed forms.
    Moments {
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// n = 10^4 unless --n is given.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Points of the unit-area surface and the curve ab = 2.
    Surface {
        /// Window for a and b as LO:HI.
        #[arg(long)]
        range: Option<String>,
        /// Grid nodes per axis.
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run every acceptance check.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        /// 10^4 draws per check with wider bands.
        #[arg(long)]
        quick: bool,
        #[arg(long, hide = true)]
        inject_fault: Option<u8>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Output file; a `<out>.meta.json` sidecar is written beside it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for sampling; 1 runs sequentially.
    #[arg(long)]
    workers: Option<usize>,
    /// Replace an existing output file.
    #[arg(long)]
    force: bool,
}

fn config(sub: Sub) -> unitri::Result<RunConfig> {
    let (mut cfg, common) = match sub {
        Sub::Sample {
            model,
            n,
            seed,
            mu,
            sigma,
            common,
        } => {
            let mut c = RunConfig::new(Command::Sample);
            c.model = Some(model);
            c.n = Some(n as usize);
            c.seed = Some(seed);
            c.mu = mu;
            c.sigma = sigma;
            (c, common)
        }
        Sub::Density {
            which,
            kappa,
            mu,
            sigma,
            range,
            points,
            common,
        } => {
            let mut c = RunConfig::new(Command::Density);
            c.which = Some(which);
            c.kappa = kappa;
            c.mu = mu;
            c.sigma = sigma;
            c.range = range.as_deref().map(parse_range).transpose()?;
            c.points = Some(points);
            (c, common)
        }
        Sub::Moments {
            model,
            n,
            seed,
            quick,
            common,
        } => {
            let mut c = RunConfig::new(Command::Moments);
            c.model = Some(model);
            c.n = n.map(|n| n as usize);
            c.seed = seed;
            c.quick = quick;
            (c, common)
        }
        Sub::Surface { range, points, common } => {
            let mut c = RunConfig::new(Command::Surface);
            c.range = range.as_deref().map(parse_range).transpose()?;
            c.points = Some(points);
            (c, common)
        }
        Sub::Verify {
            seed,
            quick,
            inject_fault,
            common,
        } => {
            let mut c = RunConfig::new(Command::Verify);
            c.seed = seed;
            c.quick = quick;
            c.fault = inject_fault;
            (c, common)
        }
    };
    cfg.out = common.out;
    cfg.format = common.format;
    cfg.workers = common.workers;
    cfg.force = common.force;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(cli.command).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(out) => {
            for line in &out.stderr {
                eprintln!("{line}");
            }
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(&out.stdout).and_then(|()| stdout.flush()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(out.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e) as u8)
        }
    }
}
