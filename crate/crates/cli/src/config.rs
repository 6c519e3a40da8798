//! Experiment configuration: TOML schema, validation and CLI shorthands.
//!
//! ```toml
//! name = "s4-h1"            # optional; used for output file names
//! seed = 1                  # default seed for random coins / states / sweeps
//! analyses = ["decompose", "iht"]
//! final_set = ["(1,2,3,4)"] # optional; vertex indices, bitstrings or one-line tuples
//!
//! [graph]
//! kind = "symmetric"        # "hypercube" | "symmetric" | "table"
//! n = 4
//! generators = "(1,2),(1,3),(2,4)"
//!
//! [coin]
//! kind = "dft"              # grover | dft | hadamard | identity | random
//! dim = 3                   # optional, defaults to the graph degree
//! ```
//!
//! Generators given as strings are cycle notation; adjacent cycles multiply
//! (right to left) and commas between cycles separate generators. Generators
//! given as integer arrays are one-line tuples.

use std::fmt;
use std::str::FromStr;

use qwalk::catalog::CatalogGraph;
use qwalk::cayley::{build_cayley, build_hypercube, CayleyGraph, GeneratingSet};
use qwalk::coins::{self, CoinOperator};
use qwalk::group::{Canonical, CompositionTable, FiniteGroup};
use qwalk::scalar::Real;
use qwalk::spectral::SweepStrategy;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_CPS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { path: path.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub name: Option<String>,
    pub seed: Option<u64>,
    pub analyses: Option<Vec<String>>,
    pub final_set: Option<Vec<VertexLabel>>,
    pub graph: Option<RawGraph>,
    pub coin: Option<RawCoin>,
    pub tolerances: Option<RawTolerances>,
    pub simulate: Option<RawSimulate>,
    pub sweep: Option<RawSweep>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawGraph {
    pub kind: String,
    pub dim: Option<u32>,
    pub n: Option<usize>,
    pub generators: Option<Generators>,
    pub table: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Generators {
    Cycles(String),
    List(Vec<GeneratorItem>),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum GeneratorItem {
    /// Element index (table groups).
    Index(usize),
    Cycles(String),
    OneLine(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum VertexLabel {
    Index(usize),
    /// Bitstring (hypercube) or one-line tuple such as "(1,2,3)".
    Text(String),
    OneLine(Vec<usize>),
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawCoin {
    pub kind: String,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawTolerances {
    pub cluster: Option<f64>,
    pub rank: Option<f64>,
    pub cps: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawSimulate {
    pub horizon: Option<usize>,
    pub initial: Option<String>,
    pub vertex: Option<VertexLabel>,
    pub coin_state: Option<usize>,
    pub seed: Option<u64>,
    pub measure_at_start: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub strategy: Option<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub sizes: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Decompose,
    Iht,
    Cps,
    Symmetries,
    Sweep,
    Simulate,
}

impl Analysis {
    pub const ALL: [Analysis; 6] =
        [Analysis::Decompose, Analysis::Iht, Analysis::Cps, Analysis::Symmetries, Analysis::Sweep, Analysis::Simulate];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Decompose => "decompose",
            Analysis::Iht => "iht",
            Analysis::Cps => "cps",
            Analysis::Symmetries => "symmetries",
            Analysis::Sweep => "sweep",
            Analysis::Simulate => "simulate",
        }
    }
}

impl FromStr for Analysis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Analysis::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            format!("unknown analysis '{s}' (expected one of decompose, iht, cps, symmetries, sweep, simulate)")
        })
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphSpec {
    Hypercube { dim: u32 },
    Symmetric { n: usize, generators: Vec<Vec<usize>> },
    Table { rows: Vec<Vec<usize>>, generators: Vec<usize> },
}

impl GraphSpec {
    pub fn build(&self) -> Result<CayleyGraph, ConfigError> {
        let graph_err = |e: &dyn fmt::Display| ConfigError::new("graph", e.to_string());
        match self {
            GraphSpec::Hypercube { dim } => build_hypercube(*dim).map_err(|e| graph_err(&e)),
            GraphSpec::Symmetric { n, generators } => {
                let group = FiniteGroup::symmetric(*n).map_err(|e| ConfigError::new("graph.n", e.to_string()))?;
                let els = generators
                    .iter()
                    .enumerate()
                    .map(|(i, g)| {
                        group.from_one_line(g).map_err(|e| ConfigError::new(format!("graph.generators[{i}]"), e.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let set = GeneratingSet::new(&group, els).map_err(|e| ConfigError::new("graph.generators", e.to_string()))?;
                build_cayley(group, set).map_err(|e| ConfigError::new("graph.generators", e.to_string()))
            }
            GraphSpec::Table { rows, generators } => {
                let table =
                    CompositionTable::new(rows.clone()).map_err(|e| ConfigError::new("graph.table", e.to_string()))?;
                let group = FiniteGroup::from_table(table);
                let els = generators
                    .iter()
                    .enumerate()
                    .map(|(i, &g)| group.element(g).map_err(|e| ConfigError::new(format!("graph.generators[{i}]"), e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                let set = GeneratingSet::new(&group, els).map_err(|e| ConfigError::new("graph.generators", e.to_string()))?;
                build_cayley(group, set).map_err(|e| ConfigError::new("graph.generators", e.to_string()))
            }
        }
    }

    /// Short slug for file names and table headers.
    pub fn slug(&self) -> String {
        match self {
            GraphSpec::Hypercube { dim } => format!("hypercube{dim}"),
            GraphSpec::Symmetric { n, generators } => format!("s{n}-{}", generators.len()),
            GraphSpec::Table { rows, generators } => format!("table{}-{}", rows.len(), generators.len()),
        }
    }

    pub fn from_catalog(g: CatalogGraph) -> GraphSpec {
        match g {
            CatalogGraph::Cube3 => GraphSpec::Hypercube { dim: 3 },
            CatalogGraph::Cube4 => GraphSpec::Hypercube { dim: 4 },
            CatalogGraph::Cube5 => GraphSpec::Hypercube { dim: 5 },
            _ => GraphSpec::Symmetric {
                n: g.one_line_generators()[0].len(),
                generators: g.one_line_generators().iter().map(|x| x.to_vec()).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoinChoice {
    Grover,
    Dft,
    Hadamard,
    Identity,
    Random,
}

impl FromStr for CoinChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grover" => Ok(CoinChoice::Grover),
            "dft" => Ok(CoinChoice::Dft),
            "hadamard" => Ok(CoinChoice::Hadamard),
            "identity" => Ok(CoinChoice::Identity),
            "random" | "asymmetric" => Ok(CoinChoice::Random),
            other => Err(format!("unknown coin kind '{other}' (expected grover, dft, hadamard, identity or random)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoinSpec {
    pub kind: CoinChoice,
    pub dim: usize,
    pub seed: u64,
}

impl CoinSpec {
    pub fn build<R: Real>(&self) -> Result<CoinOperator<R>, ConfigError> {
        let r = match self.kind {
            CoinChoice::Grover => coins::grover(self.dim),
            CoinChoice::Dft => coins::dft(self.dim),
            CoinChoice::Hadamard => coins::hadamard(self.dim),
            CoinChoice::Identity => coins::identity(self.dim),
            CoinChoice::Random => coins::random_unitary(self.dim, self.seed),
        };
        r.map_err(|e| ConfigError::new("coin", e.to_string()))
    }

    pub fn label(&self) -> String {
        match self.kind {
            CoinChoice::Grover => "grover".into(),
            CoinChoice::Dft => "dft".into(),
            CoinChoice::Hadamard => "hadamard".into(),
            CoinChoice::Identity => "identity".into(),
            CoinChoice::Random => format!("random(seed={})", self.seed),
        }
    }

    pub fn slug(&self) -> String {
        match self.kind {
            CoinChoice::Random => format!("random{}", self.seed),
            _ => self.label(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub cluster: f64,
    pub rank: f64,
    pub cps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { cluster: f64::CLUSTER_TOL, rank: f64::RANK_TOL, cps: DEFAULT_CPS_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialState {
    /// Uniform superposition of the coin states at one vertex.
    UniformCoin { vertex: usize },
    /// Uniform over the whole space.
    Uniform,
    Basis { vertex: usize, coin_state: usize },
    Random { seed: u64 },
    /// First basis vector of the IHT subspace.
    Iht,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateOptions {
    pub horizon: usize,
    pub initial: InitialState,
    pub measure_at_start: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOptions {
    #[serde(serialize_with = "ser_strategy")]
    pub strategy: SweepStrategy,
    pub sizes: Vec<usize>,
}

fn ser_strategy<S: serde::Serializer>(s: &SweepStrategy, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&strategy_label(s))
}

pub fn strategy_label(s: &SweepStrategy) -> String {
    match s {
        SweepStrategy::NestedDescending => "nested".into(),
        SweepStrategy::Random { seed, trials } => format!("random(seed={seed},trials={trials})"),
    }
}

/// A cycle-notation generator and its one-line expansion, echoed in outputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorExpansion {
    pub written: String,
    pub one_line: Vec<usize>,
}

impl fmt::Display for GeneratorExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.written, one_line_string(&self.one_line))
    }
}

pub fn one_line_string(p: &[usize]) -> String {
    let inner: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", inner.join(","))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub graph: GraphSpec,
    pub coin: CoinSpec,
    pub final_set: Vec<usize>,
    pub final_labels: Vec<String>,
    pub tolerances: Tolerances,
    pub analyses: Vec<Analysis>,
    pub simulate: SimulateOptions,
    pub sweep: SweepOptions,
    pub expansions: Vec<GeneratorExpansion>,
}

/// Parses and validates a TOML configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    raw_from_toml(text)?.validate()
}

pub fn raw_from_toml(text: &str) -> Result<RawConfig, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::new("<document>", e.to_string().trim_end()))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "<document>".to_string() } else { path };
        ConfigError::new(path, e.into_inner().message().trim_end())
    })
}

/// A generator as written, with the cycles multiplied together to form it.
type CycleGroup = (String, Vec<Vec<usize>>);

/// Parses `"(1,2),(1,3)(2,4)"` into cycle groups: outer list over generators,
/// inner list over the cycles multiplied together.
fn split_cycle_list(s: &str, path: &str) -> Result<Vec<CycleGroup>, ConfigError> {
    let err = |m: String| ConfigError::new(path, m);
    let mut out: Vec<CycleGroup> = Vec::new();
    let mut current: Vec<Vec<usize>> = Vec::new();
    let mut written = String::new();
    let mut chars = s.chars().filter(|c| !c.is_whitespace()).peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' => {
                let mut body = String::new();
                loop {
                    match chars.next() {
                        Some(')') => break,
                        Some(ch) => body.push(ch),
                        None => return Err(err(format!("unclosed '(' in '{s}'"))),
                    }
                }
                let cycle = if body.is_empty() {
                    Vec::new()
                } else {
                    body.split(',')
                        .map(|t| t.parse::<usize>().map_err(|_| err(format!("'{t}' is not a positive integer in '{s}'"))))
                        .collect::<Result<Vec<_>, _>>()?
                };
                written.push_str(&format!("({body})"));
                current.push(cycle);
            }
            ',' => {
                if current.is_empty() {
                    return Err(err(format!("empty generator in '{s}'")));
                }
                out.push((std::mem::take(&mut written), std::mem::take(&mut current)));
            }
            other => return Err(err(format!("unexpected '{other}' in cycle notation '{s}'"))),
        }
    }
    if current.is_empty() {
        return Err(err(format!("empty generator in '{s}'")));
    }
    out.push((written, current));
    Ok(out)
}

/// One-line form of a product of cycles on `1..=n`, applied right to left.
pub fn cycles_to_one_line(cycles: &[Vec<usize>], n: usize) -> Result<Vec<usize>, String> {
    let mut perm: Vec<usize> = (1..=n).collect();
    for cycle in cycles.iter().rev() {
        let mut seen = std::collections::BTreeSet::new();
        for &x in cycle {
            if x == 0 || x > n {
                return Err(format!("point {x} is outside 1..={n}"));
            }
            if !seen.insert(x) {
                return Err(format!("point {x} repeats within a cycle"));
            }
        }
        let mut c: Vec<usize> = (1..=n).collect();
        for (i, &x) in cycle.iter().enumerate() {
            c[x - 1] = cycle[(i + 1) % cycle.len()];
        }
        // perm <- c ∘ perm
        perm = perm.iter().map(|&p| c[p - 1]).collect();
    }
    Ok(perm)
}

impl RawConfig {
    pub fn validate(&self) -> Result<ExperimentConfig, ConfigError> {
        let seed = self.seed.unwrap_or(DEFAULT_SEED);
        let raw_graph = self.graph.as_ref().ok_or_else(|| ConfigError::new("graph", "missing section"))?;
        let (graph_spec, expansions) = validate_graph(raw_graph)?;
        let graph = graph_spec.build()?;

        let raw_coin = self.coin.as_ref().ok_or_else(|| ConfigError::new("coin", "missing section"))?;
        let kind: CoinChoice = raw_coin.kind.parse().map_err(|m| ConfigError::new("coin.kind", m))?;
        let dim = raw_coin.dim.unwrap_or(graph.degree());
        if dim != graph.degree() {
            return Err(ConfigError::new(
                "coin.dim",
                format!("coin dimension {dim} does not match the graph degree {} (graph.generators)", graph.degree()),
            ));
        }
        let coin = CoinSpec { kind, dim, seed: raw_coin.seed.unwrap_or(seed) };
        coin.build::<f64>()?;

        let (final_set, final_labels) = match &self.final_set {
            None => {
                let v = graph.default_final_vertex();
                (vec![v], vec![vertex_label(&graph, v)])
            }
            Some(labels) if labels.is_empty() => return Err(ConfigError::new("final_set", "must not be empty")),
            Some(labels) => {
                let mut set = labels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| resolve_vertex(&graph, l, &format!("final_set[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                set.sort_unstable();
                set.dedup();
                let labels = set.iter().map(|&v| vertex_label(&graph, v)).collect();
                (set, labels)
            }
        };

        let mut tolerances = Tolerances::default();
        if let Some(t) = &self.tolerances {
            for (value, slot, path) in [
                (t.cluster, &mut tolerances.cluster, "tolerances.cluster"),
                (t.rank, &mut tolerances.rank, "tolerances.rank"),
                (t.cps, &mut tolerances.cps, "tolerances.cps"),
            ] {
                if let Some(v) = value {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(ConfigError::new(path, format!("tolerance must be positive, got {v}")));
                    }
                    *slot = v;
                }
            }
        }

        let mut analyses = match &self.analyses {
            None => vec![Analysis::Decompose, Analysis::Iht],
            Some(list) => list
                .iter()
                .enumerate()
                .map(|(i, a)| a.parse().map_err(|m| ConfigError::new(format!("analyses[{i}]"), m)))
                .collect::<Result<Vec<_>, _>>()?,
        };
        analyses.sort_unstable();
        analyses.dedup();

        let simulate = validate_simulate(self.simulate.as_ref(), &graph, seed)?;
        let sweep = validate_sweep(self.sweep.as_ref(), graph.n_vertices(), seed)?;
        let name = self.name.clone().unwrap_or_else(|| format!("{}_{}", graph_spec.slug(), coin.slug()));
        Ok(ExperimentConfig {
            name,
            seed,
            graph: graph_spec,
            coin,
            final_set,
            final_labels,
            tolerances,
            analyses,
            simulate,
            sweep,
            expansions,
        })
    }
}

fn validate_graph(raw: &RawGraph) -> Result<(GraphSpec, Vec<GeneratorExpansion>), ConfigError> {
    let forbid = |present: bool, field: &str, kind: &str| {
        if present {
            Err(ConfigError::new(format!("graph.{field}"), format!("not allowed for kind '{kind}'")))
        } else {
            Ok(())
        }
    };
    match raw.kind.as_str() {
        "hypercube" => {
            forbid(raw.n.is_some(), "n", "hypercube")?;
            forbid(raw.generators.is_some(), "generators", "hypercube")?;
            forbid(raw.table.is_some(), "table", "hypercube")?;
            let dim = raw.dim.ok_or_else(|| ConfigError::new("graph.dim", "required for kind 'hypercube'"))?;
            Ok((GraphSpec::Hypercube { dim }, Vec::new()))
        }
        "symmetric" => {
            forbid(raw.dim.is_some(), "dim", "symmetric")?;
            forbid(raw.table.is_some(), "table", "symmetric")?;
            let n = raw.n.ok_or_else(|| ConfigError::new("graph.n", "required for kind 'symmetric'"))?;
            let gens = raw
                .generators
                .as_ref()
                .ok_or_else(|| ConfigError::new("graph.generators", "required for kind 'symmetric'"))?;
            let mut expansions = Vec::new();
            let mut one_line = Vec::new();
            let expand = |text: &str, path: String, expansions: &mut Vec<GeneratorExpansion>| {
                let mut out = Vec::new();
                for (written, cycles) in split_cycle_list(text, &path)? {
                    let p = cycles_to_one_line(&cycles, n).map_err(|m| ConfigError::new(path.clone(), m))?;
                    expansions.push(GeneratorExpansion { written, one_line: p.clone() });
                    out.push(p);
                }
                Ok::<_, ConfigError>(out)
            };
            match gens {
                Generators::Cycles(s) => one_line.extend(expand(s, "graph.generators".into(), &mut expansions)?),
                Generators::List(items) => {
                    for (i, item) in items.iter().enumerate() {
                        let path = format!("graph.generators[{i}]");
                        match item {
                            GeneratorItem::Cycles(s) => one_line.extend(expand(s, path, &mut expansions)?),
                            GeneratorItem::OneLine(p) => one_line.push(p.clone()),
                            GeneratorItem::Index(_) => {
                                return Err(ConfigError::new(
                                    path,
                                    "element indices are only accepted for kind 'table'; use a one-line array or cycle string",
                                ))
                            }
                        }
                    }
                }
            }
            Ok((GraphSpec::Symmetric { n, generators: one_line }, expansions))
        }
        "table" => {
            forbid(raw.dim.is_some(), "dim", "table")?;
            forbid(raw.n.is_some(), "n", "table")?;
            let rows = raw.table.clone().ok_or_else(|| ConfigError::new("graph.table", "required for kind 'table'"))?;
            let gens = match &raw.generators {
                Some(Generators::List(items)) => items
                    .iter()
                    .enumerate()
                    .map(|(i, it)| match it {
                        GeneratorItem::Index(x) => Ok(*x),
                        _ => Err(ConfigError::new(format!("graph.generators[{i}]"), "expected an element index")),
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                Some(Generators::Cycles(_)) => {
                    return Err(ConfigError::new("graph.generators", "expected a list of element indices"))
                }
                None => return Err(ConfigError::new("graph.generators", "required for kind 'table'")),
            };
            Ok((GraphSpec::Table { rows, generators: gens }, Vec::new()))
        }
        other => Err(ConfigError::new(
            "graph.kind",
            format!("unknown graph kind '{other}' (expected hypercube, symmetric or table)"),
        )),
    }
}

fn validate_simulate(raw: Option<&RawSimulate>, graph: &CayleyGraph, seed: u64) -> Result<SimulateOptions, ConfigError> {
    let default = RawSimulate::default();
    let raw = raw.unwrap_or(&default);
    let horizon = raw.horizon.unwrap_or(qwalk::measured::DEFAULT_HORIZON);
    if horizon == 0 {
        return Err(ConfigError::new("simulate.horizon", "must be at least 1"));
    }
    let vertex = match &raw.vertex {
        Some(l) => resolve_vertex(graph, l, "simulate.vertex")?,
        None => graph.identity_vertex(),
    };
    let initial = match raw.initial.as_deref().unwrap_or("uniform-coin") {
        "uniform-coin" => InitialState::UniformCoin { vertex },
        "uniform" => InitialState::Uniform,
        "basis" => {
            let coin_state = raw.coin_state.unwrap_or(0);
            if coin_state >= graph.degree() {
                return Err(ConfigError::new(
                    "simulate.coin_state",
                    format!("coin state {coin_state} out of range for degree {}", graph.degree()),
                ));
            }
            InitialState::Basis { vertex, coin_state }
        }
        "random" => InitialState::Random { seed: raw.seed.unwrap_or(seed) },
        "iht" => InitialState::Iht,
        other => {
            return Err(ConfigError::new(
                "simulate.initial",
                format!("unknown initial state '{other}' (expected uniform-coin, uniform, basis, random or iht)"),
            ))
        }
    };
    Ok(SimulateOptions { horizon, initial, measure_at_start: raw.measure_at_start.unwrap_or(false) })
}

fn validate_sweep(raw: Option<&RawSweep>, n_vertices: usize, seed: u64) -> Result<SweepOptions, ConfigError> {
    let default = RawSweep::default();
    let raw = raw.unwrap_or(&default);
    let strategy = match raw.strategy.as_deref().unwrap_or("nested") {
        "nested" | "nested-descending" => SweepStrategy::NestedDescending,
        "random" => {
            let trials = raw.trials.unwrap_or(200);
            if trials == 0 {
                return Err(ConfigError::new("sweep.trials", "must be at least 1"));
            }
            SweepStrategy::Random { seed: raw.seed.unwrap_or(seed), trials }
        }
        other => return Err(ConfigError::new("sweep.strategy", format!("unknown strategy '{other}' (expected nested or random)"))),
    };
    let sizes = raw.sizes.clone().unwrap_or_else(|| (1..=n_vertices).collect());
    if let Some(&s) = sizes.iter().find(|&&s| s == 0 || s > n_vertices) {
        return Err(ConfigError::new("sweep.sizes", format!("size {s} outside 1..={n_vertices}")));
    }
    Ok(SweepOptions { strategy, sizes })
}

/// Human-readable label of a vertex: bitstring, one-line tuple or table index.
pub fn vertex_label(graph: &CayleyGraph, v: usize) -> String {
    match graph.element(v).canonical() {
        c @ Canonical::Bits { .. } => c.to_string(),
        Canonical::OneLine(p) => one_line_string(p),
        Canonical::Table { index, .. } => index.to_string(),
    }
}

pub fn resolve_vertex(graph: &CayleyGraph, label: &VertexLabel, path: &str) -> Result<usize, ConfigError> {
    let n = graph.n_vertices();
    let group = graph.group();
    let err = |m: String| ConfigError::new(path, m);
    match label {
        VertexLabel::Index(i) if *i < n => Ok(*i),
        VertexLabel::Index(i) => Err(err(format!("vertex {i} does not exist (graph has {n} vertices)"))),
        VertexLabel::OneLine(p) => group.from_one_line(p).map(|e| e.index()).map_err(|e| err(e.to_string())),
        VertexLabel::Text(s) => {
            let s = s.trim();
            if s.starts_with('(') {
                let inner = s.trim_start_matches('(').trim_end_matches(')');
                let p = inner
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| err(format!("'{s}' is not a one-line tuple"))))
                    .collect::<Result<Vec<_>, _>>()?;
                group.from_one_line(&p).map(|e| e.index()).map_err(|e| err(e.to_string()))
            } else if !s.is_empty() && s.chars().all(|c| c == '0' || c == '1') {
                let value = u64::from_str_radix(s, 2).map_err(|e| err(e.to_string()))?;
                match graph.group().kind() {
                    qwalk::group::GroupKind::Z2Pow(d) if s.len() == *d as usize => {
                        group.from_bits(value).map(|e| e.index()).map_err(|e| err(e.to_string()))
                    }
                    _ => Err(err(format!("bitstring '{s}' does not name a vertex of this graph"))),
                }
            } else {
                Err(err(format!("cannot interpret vertex label '{s}'")))
            }
        }
    }
}

/// `--graph` shorthand: a catalog name (`cube3`, `s4-h1`, …), `hypercube:D`
/// or `symmetric:N:<cycles>`.
pub fn graph_from_shorthand(s: &str) -> Result<RawGraph, ConfigError> {
    let err = |m: String| ConfigError::new("--graph", m);
    if let Ok(c) = s.parse::<CatalogGraph>() {
        return Ok(match GraphSpec::from_catalog(c) {
            GraphSpec::Hypercube { dim } => RawGraph { kind: "hypercube".into(), dim: Some(dim), ..Default::default() },
            GraphSpec::Symmetric { n, generators } => RawGraph {
                kind: "symmetric".into(),
                n: Some(n),
                generators: Some(Generators::List(generators.into_iter().map(GeneratorItem::OneLine).collect())),
                ..Default::default()
            },
            GraphSpec::Table { .. } => unreachable!("catalog graphs are hypercubes or symmetric groups"),
        });
    }
    let mut parts = s.splitn(3, ':');
    match (parts.next(), parts.next(), parts.next()) {
        (Some("hypercube"), Some(d), None) => Ok(RawGraph {
            kind: "hypercube".into(),
            dim: Some(d.parse().map_err(|_| err(format!("bad dimension '{d}'")))?),
            ..Default::default()
        }),
        (Some("symmetric"), Some(n), Some(gens)) => Ok(RawGraph {
            kind: "symmetric".into(),
            n: Some(n.parse().map_err(|_| err(format!("bad degree '{n}'")))?),
            generators: Some(Generators::Cycles(gens.to_string())),
            ..Default::default()
        }),
        _ => Err(err(format!(
            "cannot parse '{s}' (expected a catalog name such as cube3 or s4-h1, hypercube:D, or symmetric:N:(1,2),(1,3))"
        ))),
    }
}

/// `--coin` shorthand: `grover`, `dft`, `random`, `random:SEED`, …
pub fn coin_from_shorthand(s: &str) -> Result<RawCoin, ConfigError> {
    let (kind, seed) = match s.split_once(':') {
        Some((k, seed)) => {
            (k, Some(seed.parse::<u64>().map_err(|_| ConfigError::new("--coin", format!("bad seed '{seed}'")))?))
        }
        None => (s, None),
    };
    kind.parse::<CoinChoice>().map_err(|m| ConfigError::new("--coin", m))?;
    Ok(RawCoin { kind: kind.into(), dim: None, seed })
}
