use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use qwalk::spectral::SweepStrategy;
use qwalk_cli::config::{
    coin_from_shorthand, graph_from_shorthand, raw_from_toml, Analysis, ConfigError, RawConfig, RawSimulate, RawSweep,
    RawTolerances, Tolerances, VertexLabel, DEFAULT_SEED,
};
use qwalk_cli::report::Format;
use qwalk_cli::{emit, reproduce, run, RunError};

#[derive(Parser, Debug)]
#[command(name = "qwalk", version, about = "Coined quantum walks on Cayley graphs: IHT subspaces, symmetries, sweeps")]
struct Cli {
    /// TOML experiment configuration; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write one file per artifact here instead of printing to stdout.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Seed for random coins, random initial states and random sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol_cluster: Option<f64>,
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Target {
    /// Catalog name (cube3, cube4, cube5, s3-2, s3-3, s4-h1, s4-h2, s4-4), hypercube:D or symmetric:N:(1,2),(1,3)
    #[arg(long)]
    graph: Option<String>,
    /// grover, dft, hadamard, identity, random or random:SEED
    #[arg(long)]
    coin: Option<String>,
    /// Final vertex: an index, 0b<bits> for hypercubes, or a one-line tuple such as (1,2,3); repeatable
    #[arg(long = "final")]
    final_set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenphase clusters of the walk operator
    Decompose(Target),
    /// IHT subspace table with the dark-subspace cross-check
    Iht(Target),
    /// Coin-permutation symmetries of the coin
    Cps(Target),
    /// Shift automorphisms and walk symmetries
    Symmetries(Target),
    /// IHT dimension against final-set size
    Sweep {
        #[command(flatten)]
        target: Target,
        /// nested or random
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
    },
    /// Measured (absorbing-wall) walk
    Simulate {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        horizon: Option<usize>,
        /// uniform-coin, uniform, basis, random or iht
        #[arg(long)]
        initial: Option<String>,
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long)]
        coin_state: Option<usize>,
        #[arg(long)]
        measure_at_start: bool,
    },
    /// Regenerate the reference tables
    Reproduce {
        /// Table number 1..=8 (8 is the summary grid)
        #[arg(long, conflicts_with_all = ["summary", "sweep"])]
        table: Option<usize>,
        #[arg(long, conflicts_with = "sweep")]
        summary: bool,
        /// IHT dimension vs final-set size for every catalog graph with the Grover coin
        #[arg(long)]
        sweep: bool,
        /// Sweep strategy for --sweep: nested or random
        #[arg(long, default_value = "nested")]
        strategy: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Run every analysis listed in --config
    Run,
}

fn vertex_label(s: &str) -> VertexLabel {
    if let Some(bits) = s.strip_prefix("0b") {
        VertexLabel::Text(bits.to_string())
    } else if let Ok(i) = s.parse() {
        VertexLabel::Index(i)
    } else {
        VertexLabel::Text(s.to_string())
    }
}

fn load_raw(cli: &Cli) -> anyhow::Result<RawConfig> {
    let mut raw = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new("--config", format!("{}: {e}", path.display())))?;
            raw_from_toml(&text)?
        }
        None => RawConfig::default(),
    };
    if cli.seed.is_some() {
        raw.seed = cli.seed;
    }
    if cli.tol_cluster.is_some() || cli.tol_rank.is_some() {
        let t = raw.tolerances.get_or_insert_with(RawTolerances::default);
        t.cluster = cli.tol_cluster.or(t.cluster);
        t.rank = cli.tol_rank.or(t.rank);
    }
    Ok(raw)
}

fn apply_target(raw: &mut RawConfig, target: &Target) -> Result<(), ConfigError> {
    if let Some(g) = &target.graph {
        raw.graph = Some(graph_from_shorthand(g)?);
    }
    if let Some(c) = &target.coin {
        raw.coin = Some(coin_from_shorthand(c)?);
    }
    if !target.final_set.is_empty() {
        raw.final_set = Some(target.final_set.iter().map(|s| vertex_label(s)).collect());
    }
    Ok(())
}

fn tolerances(raw: &RawConfig) -> Result<Tolerances, ConfigError> {
    let mut tol = Tolerances::default();
    if let Some(t) = &raw.tolerances {
        for (v, slot, path) in [(t.cluster, &mut tol.cluster, "--tol-cluster"), (t.rank, &mut tol.rank, "--tol-rank")] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(ConfigError::new(path, format!("tolerance must be positive, got {v}")));
                }
                *slot = v;
            }
        }
    }
    Ok(tol)
}

fn execute(cli: &Cli) -> anyhow::Result<String> {
    let mut raw = load_raw(cli)?;
    let analysis = match &cli.command {
        Command::Reproduce { table, summary, sweep, strategy, trials } => {
            let seed = raw.seed.unwrap_or(DEFAULT_SEED);
            let tol = tolerances(&raw)?;
            let artifact = if *sweep {
                let strategy = match strategy.as_str() {
                    "nested" => SweepStrategy::NestedDescending,
                    "random" => SweepStrategy::Random { seed, trials: *trials },
                    other => return Err(ConfigError::new("--strategy", format!("unknown strategy '{other}'")).into()),
                };
                reproduce::sweep_figure(strategy, seed, tol)?
            } else if *summary {
                reproduce::summary(seed, tol)?
            } else if let Some(n) = table {
                reproduce::table(*n, seed, tol)?
            } else {
                return Err(ConfigError::new("reproduce", "pass --table N, --summary or --sweep").into());
            };
            return Ok(emit(&[artifact], cli.format, cli.out_dir.as_deref())?);
        }
        Command::Run => {
            if cli.config.is_none() {
                return Err(ConfigError::new("--config", "required by 'run'").into());
            }
            None
        }
        Command::Decompose(t) => {
            apply_target(&mut raw, t)?;
            Some(Analysis::Decompose)
        }
        Command::Iht(t) => {
            apply_target(&mut raw, t)?;
            Some(Analysis::Iht)
        }
        Command::Cps(t) => {
            apply_target(&mut raw, t)?;
            Some(Analysis::Cps)
        }
        Command::Symmetries(t) => {
            apply_target(&mut raw, t)?;
            Some(Analysis::Symmetries)
        }
        Command::Sweep { target, strategy, trials, sizes } => {
            apply_target(&mut raw, target)?;
            let s = raw.sweep.get_or_insert_with(RawSweep::default);
            s.strategy = strategy.clone().or(s.strategy.take());
            s.trials = trials.or(s.trials);
            s.sizes = sizes.clone().or(s.sizes.take());
            Some(Analysis::Sweep)
        }
        Command::Simulate { target, horizon, initial, vertex, coin_state, measure_at_start } => {
            apply_target(&mut raw, target)?;
            let s = raw.simulate.get_or_insert_with(RawSimulate::default);
            s.horizon = horizon.or(s.horizon);
            s.initial = initial.clone().or(s.initial.take());
            if let Some(v) = vertex {
                s.vertex = Some(vertex_label(v));
            }
            s.coin_state = coin_state.or(s.coin_state);
            if *measure_at_start {
                s.measure_at_start = Some(true);
            }
            Some(Analysis::Simulate)
        }
    };
    let mut config = raw.validate()?;
    if let Some(a) = analysis {
        config.analyses = vec![a];
    }
    let artifacts = run(&config)?;
    Ok(emit(&artifacts, cli.format, cli.out_dir.as_deref())?)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(r) = e.downcast_ref::<RunError>() {
        r.exit_code() as u8
    } else if e.downcast_ref::<ConfigError>().is_some() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli).context("qwalk failed") {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
