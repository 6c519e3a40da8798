//! One-command regeneration of the reference decomposition tables, the
//! summary grid and the final-set sweep data.

use qwalk::catalog::CatalogGraph;
use qwalk::spectral::SweepStrategy;

use crate::config::{graph_from_shorthand, CoinChoice, ExperimentConfig, RawCoin, RawConfig, Tolerances};
use crate::report::{Artifact, Body, Meta, SummaryArtifact};
use crate::run::{Experiment, RunError};

/// Graphs of the per-graph tables, in table order (1-based).
pub const TABLE_GRAPHS: [CatalogGraph; 7] = [
    CatalogGraph::Cube3,
    CatalogGraph::Cube4,
    CatalogGraph::Cube5,
    CatalogGraph::S3Three,
    CatalogGraph::S4H1,
    CatalogGraph::S4H2,
    CatalogGraph::S4Four,
];

/// Number of the summary grid.
pub const SUMMARY_TABLE: usize = 8;

pub const COINS: [CoinChoice; 3] = [CoinChoice::Grover, CoinChoice::Dft, CoinChoice::Random];

pub fn catalog_config(graph: CatalogGraph, coin: CoinChoice, seed: u64, tol: Tolerances) -> Result<ExperimentConfig, RunError> {
    let raw = RawConfig {
        seed: Some(seed),
        graph: Some(graph_from_shorthand(graph.name())?),
        coin: Some(RawCoin { kind: format!("{coin:?}").to_lowercase(), dim: None, seed: None }),
        ..Default::default()
    };
    let mut cfg = raw.validate()?;
    cfg.tolerances = tol;
    cfg.name = format!("{}_{}", graph.name(), cfg.coin.slug());
    Ok(cfg)
}

fn meta(command: String, graph: &str, coin: &str, seed: u64, tol: Tolerances) -> Meta {
    Meta {
        command,
        graph: graph.to_string(),
        coin: coin.to_string(),
        seed,
        cluster_tol: tol.cluster,
        rank_tol: tol.rank,
        final_set: Vec::new(),
        generators: Vec::new(),
    }
}

/// Decomposition table `number` (1..=7): Grover, DFT and random coin sections.
pub fn table(number: usize, seed: u64, tol: Tolerances) -> Result<Artifact, RunError> {
    if number == SUMMARY_TABLE {
        return summary(seed, tol);
    }
    let graph = *number
        .checked_sub(1)
        .and_then(|i| TABLE_GRAPHS.get(i))
        .ok_or_else(|| crate::config::ConfigError::new("--table", format!("no table {number} (expected 1..=8)")))?;
    let mut tables = Vec::new();
    for coin in COINS {
        let mut exp = Experiment::new(catalog_config(graph, coin, seed, tol)?)?;
        tables.push(exp.table()?);
    }
    let coins = tables.iter().map(|t| t.coin.clone()).collect::<Vec<_>>().join("+");
    Ok(Artifact {
        stem: format!("table{number}"),
        meta: meta(format!("reproduce --table {number}"), graph.name(), &coins, seed, tol),
        body: Body::Tables(tables),
    })
}

/// |V| for every (graph, coin) pair with one final vertex, plus |H| per graph.
pub fn summary(seed: u64, tol: Tolerances) -> Result<Artifact, RunError> {
    let mut graphs = Vec::new();
    let mut rows: Vec<(String, Vec<usize>)> = Vec::new();
    for coin in COINS {
        let mut values = Vec::new();
        let mut label = String::new();
        for g in CatalogGraph::ALL {
            let mut exp = Experiment::new(catalog_config(g, coin, seed, tol)?)?;
            label = exp.config.coin.label();
            let t = exp.table()?;
            if rows.is_empty() {
                graphs.push((g.name().to_string(), g.title().to_string(), t.hilbert_dim));
            }
            values.push(t.iht_dim);
        }
        rows.push((label, values));
    }
    Ok(Artifact {
        stem: "summary".into(),
        meta: meta("reproduce --summary".into(), "all", "grover+dft+random", seed, tol),
        body: Body::Summary(SummaryArtifact { graphs, rows }),
    })
}

/// |V| against final-set size for every catalog graph with the Grover coin.
pub fn sweep_figure(strategy: SweepStrategy, seed: u64, tol: Tolerances) -> Result<Artifact, RunError> {
    let mut sweeps = Vec::new();
    for g in CatalogGraph::ALL {
        let mut cfg = catalog_config(g, CoinChoice::Grover, seed, tol)?;
        cfg.sweep.strategy = strategy.clone();
        let mut exp = Experiment::new(cfg)?;
        match exp.run(crate::config::Analysis::Sweep)?.body {
            Body::Sweep(s) => sweeps.extend(s),
            _ => unreachable!("sweep analysis yields a sweep body"),
        }
    }
    Ok(Artifact {
        stem: "sweep".into(),
        meta: meta("reproduce --sweep".into(), "all", "grover", seed, tol),
        body: Body::Sweep(sweeps),
    })
}
