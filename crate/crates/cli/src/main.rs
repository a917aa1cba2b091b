use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use conjugate_cli::acceptance::{self, Budgets};
use conjugate_cli::commands::{self, Common};
use conjugate_cli::exit::{CliError, CliResult};
use conjugate_cli::record::{Table, WALL_COLUMN};

#[derive(Parser, Debug)]
#[command(name = "conjugate", version, about = "Experiments on algebraic conjugate points near manifolds")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: the config value, else ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Wall-clock budget; exceeding it exits with code 3.
    #[arg(long, global = true)]
    budget_ms: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the Schur polynomial s_lambda in tau variables, or its value at a point.
    Schur {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        tau: usize,
        /// Comma-separated rationals.
        #[arg(long)]
        point: Option<String>,
    },
    /// Order of symmetric independence of a polynomial map.
    Symord {
        /// Veronese curve (x, x^2, ..., x^tau).
        #[arg(long, conflicts_with = "map")]
        veronese: Option<usize>,
        /// Comma-separated components, e.g. "x, x^2".
        #[arg(long)]
        map: Option<String>,
        #[arg(long, default_value = "x")]
        vars: String,
    },
    /// Tailored polynomial construction at sample points.
    Tailor {
        /// Rerun a single sample index.
        #[arg(long)]
        index: Option<u64>,
    },
    /// Count algebraic points near the manifold over the Q schedule.
    Count {
        #[arg(long)]
        q: Option<i64>,
        #[arg(long)]
        c: Option<String>,
    },
    /// Scaling parameters delta and t_k of the profile.
    Scaling {
        #[arg(long)]
        q: Option<f64>,
    },
    /// Monte-Carlo bad-set fraction.
    Measure {
        #[arg(long)]
        eps: Option<String>,
    },
    /// Sublevel-set bound check on random polynomial maps.
    Goodness {
        #[arg(long)]
        index: Option<u64>,
    },
    /// Run the acceptance suite.
    Accept {
        /// Run only these criteria (comma-separated ids).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

fn accept(only: &[u8], common: &Common) -> CliResult<Vec<String>> {
    let ids: Vec<u8> = if only.is_empty() { (1..=9).collect() } else { only.to_vec() };
    let budgets = Budgets::default();
    let mut table = Table::new(&["criterion", "name", "passed", WALL_COLUMN]);
    let mut lines = Vec::new();
    let mut all = true;
    for id in ids {
        let o = acceptance::run(id, &budgets);
        println!("{}", o.render());
        all &= o.passed;
        table.push(vec![o.id.to_string(), o.name.to_string(), o.passed.to_string(), o.wall_ms.to_string()]);
    }
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let entry = table.write(&dir.join("acceptance.csv"))?;
    lines.push(format!("wrote {}", entry.path.display()));
    if !all {
        return Err(CliError::Internal("acceptance criteria failed".into()));
    }
    Ok(lines)
}

fn dispatch(command: Command, common: Common) -> CliResult<Vec<String>> {
    match command {
        Command::Schur { lambda, tau, point } => commands::cmd_schur(&lambda, tau, point.as_deref()),
        Command::Symord { veronese, map, vars } => {
            let p = match (veronese, map) {
                (Some(tau), _) => conjugate_core::symord::PolynomialMap::veronese(tau),
                (None, Some(m)) => commands::parse_map(&m, &vars)?,
                (None, None) => return Err(CliError::Validation("give --veronese or --map".into())),
            };
            commands::cmd_symord(&p, &common)
        }
        Command::Tailor { index } => commands::cmd_tailor(&common, index),
        Command::Count { q, c } => commands::cmd_count(&common, q, c.as_deref()),
        Command::Scaling { q } => commands::cmd_scaling(&common, q),
        Command::Measure { eps } => commands::cmd_measure(&common, eps.as_deref()),
        Command::Goodness { index } => commands::cmd_goodness(&common, index),
        Command::Accept { only } => accept(&only, &common),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    let budget = cli.global.budget_ms.map(Duration::from_millis);
    let common = Common {
        config: cli.global.config,
        seed: cli.global.seed,
        out: cli.global.out,
        deadline: budget.map(|b| Instant::now() + b),
    };
    // the work runs on a worker thread so the budget can be enforced from here
    let (tx, rx) = mpsc::channel();
    let command = cli.command;
    std::thread::spawn(move || {
        let _ = tx.send(dispatch(command, common));
    });
    let result = match budget {
        Some(b) => rx.recv_timeout(b).unwrap_or_else(|e| match e {
            mpsc::RecvTimeoutError::Timeout => Err(CliError::Budget(format!("{} ms elapsed", b.as_millis()))),
            mpsc::RecvTimeoutError::Disconnected => Err(CliError::Internal("worker panicked".into())),
        }),
        None => rx.recv().unwrap_or_else(|_| Err(CliError::Internal("worker panicked".into()))),
    };
    match result {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
