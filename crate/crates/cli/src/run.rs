//! Executes configured analyses and turns results into artifacts.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use qwalk::catalog::CatalogGraph;
use qwalk::cayley::CayleyGraph;
use qwalk::coins::{cps_enumerate, dft_reversal};
use qwalk::linalg::max_principal_angle;
use qwalk::measured::{classify_hitting_time, simulate_with, HittingTimeVerdict, SimulationOptions};
use qwalk::scalar::unitarity_residual;
use qwalk::spectral::{
    dark_subspace_oracle, decompose, iht_subspace, overlap, sweep_final_sets, SpectralError, SweepStrategy,
};
use qwalk::symmetry::{classify, generate_candidates};
use qwalk::walk::{build_unitary, FinalProjector};
use qwalk::{EigenspaceDecomposition, IhtReport, WalkState, WalkUnitary};

use crate::config::{
    one_line_string, strategy_label, vertex_label, Analysis, ConfigError, ExperimentConfig, GraphSpec, InitialState,
};
use crate::report::{
    Artifact, Body, ClusterLine, CpsArtifact, DecompositionArtifact, Format, Meta, Row, SimulationArtifact,
    SweepArtifact, SweepLine, SymmetryArtifact, TableArtifact,
};

/// Largest acceptable `‖U b - λ b‖` over the eigenbasis.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;
/// Largest acceptable `‖U^dagger U - I‖_max`.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Probability bookkeeping tolerance for measured walks.
pub const CONSERVATION_TOL: f64 = 1e-9;
/// Principal-angle bound between the spectral and dark-subspace bases.
pub const ORACLE_ANGLE_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error at {0}")]
    Config(#[from] ConfigError),
    #[error("numerical tolerance dead band: {0}")]
    DeadBand(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{0}")]
    Failed(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::DeadBand(_) => 3,
            RunError::Invariant(_) => 4,
            RunError::Failed(_) | RunError::Io { .. } => 1,
        }
    }
}

impl From<SpectralError> for RunError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::RankIndeterminate(_) | SpectralError::ClusterAmbiguity { .. } => {
                RunError::DeadBand(e.to_string())
            }
            other => RunError::Failed(other.to_string()),
        }
    }
}

fn failed(e: impl std::fmt::Display) -> RunError {
    RunError::Failed(e.to_string())
}

/// Catalog entry equal to `spec`, if any.
pub fn catalog_match(spec: &GraphSpec) -> Option<CatalogGraph> {
    CatalogGraph::ALL.into_iter().find(|c| GraphSpec::from_catalog(*c) == *spec)
}

pub fn graph_name(spec: &GraphSpec) -> String {
    catalog_match(spec).map_or_else(|| spec.slug(), |c| c.name().to_string())
}

pub fn graph_title(spec: &GraphSpec) -> String {
    if let Some(c) = catalog_match(spec) {
        return c.title().to_string();
    }
    match spec {
        GraphSpec::Hypercube { dim } => format!("{dim}D hypercube"),
        GraphSpec::Symmetric { n, generators } => {
            let gens: Vec<String> = generators.iter().map(|g| one_line_string(g)).collect();
            format!("S{n}, H = {{{}}}", gens.join(", "))
        }
        GraphSpec::Table { rows, generators } => format!("table group of order {}, generators {generators:?}", rows.len()),
    }
}

/// One (graph, coin, final set) configuration with cached spectral results.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub graph: CayleyGraph,
    pub unitary: WalkUnitary,
    pub projector: FinalProjector,
    decomposition: Option<EigenspaceDecomposition>,
    iht: Option<IhtReport>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self, RunError> {
        let graph = config.graph.build()?;
        let coin = config.coin.build::<f64>()?;
        let unitary = build_unitary(&graph, coin).map_err(|e| ConfigError::new("coin", e.to_string()))?;
        let projector = FinalProjector::new(graph.n_vertices(), graph.degree(), &config.final_set)
            .map_err(|e| ConfigError::new("final_set", e.to_string()))?;
        Ok(Experiment { config, graph, unitary, projector, decomposition: None, iht: None })
    }

    pub fn graph_name(&self) -> String {
        graph_name(&self.config.graph)
    }

    pub fn meta(&self, command: &str) -> Meta {
        Meta {
            command: command.to_string(),
            graph: self.graph_name(),
            coin: self.config.coin.label(),
            seed: self.config.seed,
            cluster_tol: self.config.tolerances.cluster,
            rank_tol: self.config.tolerances.rank,
            final_set: self.config.final_labels.clone(),
            generators: self.config.expansions.iter().map(|e| e.to_string()).collect(),
        }
    }

    fn stem(&self, analysis: Analysis) -> String {
        format!("{}_{}", self.config.name, analysis.name())
    }

    pub fn decomposition(&mut self) -> Result<&EigenspaceDecomposition, RunError> {
        if self.decomposition.is_none() {
            let unit = unitarity_residual(&self.unitary.dense());
            if unit > UNITARITY_TOL {
                return Err(RunError::Invariant(format!("walk operator unitarity residual {unit:e}")));
            }
            let d = decompose(&self.unitary, self.config.tolerances.cluster)?;
            let res = d.max_residual(&self.unitary);
            if res > EIGEN_RESIDUAL_TOL {
                return Err(RunError::Invariant(format!("eigenpair residual {res:e} exceeds {EIGEN_RESIDUAL_TOL:e}")));
            }
            self.decomposition = Some(d);
        }
        Ok(self.decomposition.as_ref().expect("just computed"))
    }

    pub fn iht_report(&mut self) -> Result<&IhtReport, RunError> {
        if self.iht.is_none() {
            let rank_tol = self.config.tolerances.rank;
            self.decomposition()?;
            let d = self.decomposition.as_ref().expect("computed above");
            self.iht = Some(iht_subspace(d, &self.projector, rank_tol)?);
        }
        Ok(self.iht.as_ref().expect("just computed"))
    }

    pub fn table(&mut self) -> Result<TableArtifact, RunError> {
        let name = self.graph_name();
        let title = graph_title(&self.config.graph);
        let coin = self.config.coin.label();
        let labels = self.config.final_labels.clone();
        let hilbert = self.unitary.dim();
        let report = self.iht_report()?;
        let rows = report.table_rows().into_iter().map(|r| Row { m_k: r.count, k: r.dim, v_k: r.iht_dim }).collect();
        TableArtifact::new(name, title, coin, rows, hilbert, report.total, labels)
            .map_err(|e| RunError::Invariant(e.to_string()))
    }

    /// Cross-checks the spectral IHT subspace against the dark-subspace iteration.
    pub fn oracle_check(&mut self) -> Result<usize, RunError> {
        let rank_tol = self.config.tolerances.rank;
        let oracle = dark_subspace_oracle(&self.unitary, &self.projector, rank_tol)?;
        let report = self.iht_report()?;
        if oracle.ncols() != report.total {
            return Err(RunError::Invariant(format!(
                "dark-subspace dimension {} differs from spectral |V| = {}",
                oracle.ncols(),
                report.total
            )));
        }
        let basis = qwalk::linalg::orthonormalize(&report.iht_basis);
        let angle = max_principal_angle(&basis, &oracle).expect("equal dimensions");
        if angle > ORACLE_ANGLE_TOL {
            return Err(RunError::Invariant(format!("principal angle {angle:e} between IHT bases")));
        }
        Ok(oracle.ncols())
    }

    pub fn run(&mut self, analysis: Analysis) -> Result<Artifact, RunError> {
        let body = match analysis {
            Analysis::Decompose => {
                let unitarity = unitarity_residual(&self.unitary.dense());
                let graph = self.graph_name();
                let coin = self.config.coin.label();
                let hilbert_dim = self.unitary.dim();
                self.decomposition()?;
                let d = self.decomposition.as_ref().expect("computed above");
                Body::Decomposition(DecompositionArtifact {
                    graph,
                    coin,
                    hilbert_dim,
                    clusters: d.clusters().iter().map(|c| ClusterLine { phase: c.phase, k: c.multiplicity() }).collect(),
                    max_residual: d.max_residual(&self.unitary),
                    unitarity_residual: unitarity,
                })
            }
            Analysis::Iht => {
                let mut t = self.table()?;
                t.oracle_dim = Some(self.oracle_check()?);
                Body::Tables(vec![t])
            }
            Analysis::Cps => {
                let coin = self.unitary.coin();
                let set = cps_enumerate(coin, self.config.tolerances.cps).map_err(failed)?;
                let reversal = dft_reversal(coin.dim());
                Body::Cps(CpsArtifact {
                    coin: self.config.coin.label(),
                    dim: coin.dim(),
                    permutations: set.perms().iter().map(|p| p.images().iter().map(|x| x + 1).collect()).collect(),
                    is_group: set.is_group(),
                    contains_reversal: set.contains(&reversal),
                })
            }
            Analysis::Symmetries => {
                let candidates = generate_candidates(&self.graph).map_err(failed)?;
                let rep = classify(&self.graph, self.unitary.coin(), self.config.tolerances.cps).map_err(failed)?;
                fn coin_perms<'a>(it: impl Iterator<Item = &'a qwalk::symmetry::JointPermutation>) -> Vec<Vec<usize>> {
                    let mut ps: Vec<Vec<usize>> =
                        it.map(|p| p.coin_perm.images().iter().map(|x| x + 1).collect()).collect();
                    ps.sort();
                    ps.dedup();
                    ps
                }
                Body::Symmetries(SymmetryArtifact {
                    graph: self.graph_name(),
                    coin: self.config.coin.label(),
                    candidates: candidates.len(),
                    a1: rep.a1_count(),
                    a2: rep.a2_count(),
                    w2: rep.w2_count(),
                    a2_coin_perms: coin_perms(rep.a2()),
                    w2_coin_perms: coin_perms(rep.w2.iter()),
                })
            }
            Analysis::Sweep => {
                let opts = self.config.sweep.clone();
                let rank_tol = self.config.tolerances.rank;
                self.decomposition()?;
                let d = self.decomposition.as_ref().expect("computed above");
                let points = sweep_final_sets(d, &self.graph, &opts.strategy, &opts.sizes, rank_tol)?;
                if opts.strategy == SweepStrategy::NestedDescending {
                    let mut sorted = points.clone();
                    sorted.sort_by_key(|p| p.size);
                    if let Some(w) = sorted.windows(2).find(|w| w[1].iht_dim > w[0].iht_dim) {
                        return Err(RunError::Invariant(format!(
                            "nested sweep increased |V| from {} to {} at |F| = {}",
                            w[0].iht_dim, w[1].iht_dim, w[1].size
                        )));
                    }
                }
                Body::Sweep(vec![SweepArtifact {
                    graph: self.graph_name(),
                    coin: self.config.coin.label(),
                    strategy: strategy_label(&opts.strategy),
                    points: points
                        .into_iter()
                        .map(|p| SweepLine { size: p.size, iht_dim: p.iht_dim, final_set: p.final_set })
                        .collect(),
                }])
            }
            Analysis::Simulate => Body::Simulation(self.simulate()?),
        };
        Ok(Artifact { stem: self.stem(analysis), meta: self.meta(analysis.name()), body })
    }

    fn simulate(&mut self) -> Result<SimulationArtifact, RunError> {
        let opts = self.config.simulate.clone();
        let n = self.unitary.dim();
        let d = self.graph.degree();
        let (psi, initial) = match &opts.initial {
            InitialState::UniformCoin { vertex } => (
                WalkState::uniform_coin_at(n, d, *vertex),
                format!("uniform-coin at {}", vertex_label(&self.graph, *vertex)),
            ),
            InitialState::Uniform => (WalkState::uniform(n), "uniform".to_string()),
            InitialState::Basis { vertex, coin_state } => (
                WalkState::basis(n, vertex * d + coin_state),
                format!("basis {} coin {coin_state}", vertex_label(&self.graph, *vertex)),
            ),
            InitialState::Random { seed } => (WalkState::random(n, *seed), format!("random(seed={seed})")),
            InitialState::Iht => {
                let rep = self.iht_report()?;
                if rep.total == 0 {
                    return Err(ConfigError::new("simulate.initial", "the IHT subspace is empty").into());
                }
                (WalkState::new(rep.iht_basis.column(0).into_owned()), "iht basis vector 0".to_string())
            }
        };
        let options = SimulationOptions { measure_at_start: opts.measure_at_start };
        let result = simulate_with(&self.unitary, &self.projector, &psi, opts.horizon, options).map_err(failed)?;
        let conservation = result.conservation_error();
        if conservation > CONSERVATION_TOL {
            return Err(RunError::Invariant(format!("probability conservation error {conservation:e}")));
        }
        let rep = self.iht_report()?;
        let ov = overlap(&psi, rep)?;
        if let Some((t, s)) = result.survival_trace.iter().enumerate().find(|(_, &s)| s < ov - CONSERVATION_TOL) {
            return Err(RunError::Invariant(format!(
                "survival {s:e} at t = {} fell below the never-arrival probability {ov:e}",
                t + 1
            )));
        }
        let verdict = match classify_hitting_time(&result, ov, CONSERVATION_TOL) {
            HittingTimeVerdict::Finite(_) => "finite".to_string(),
            HittingTimeVerdict::Infinite { never_arrives, .. } => {
                format!("infinite (never-arrival probability {})", crate::report::fmt_real(never_arrives))
            }
            HittingTimeVerdict::Undetermined { .. } => "undetermined at this horizon".to_string(),
        };
        Ok(SimulationArtifact {
            graph: self.graph_name(),
            coin: self.config.coin.label(),
            initial,
            horizon: result.horizon,
            measure_at_start: opts.measure_at_start,
            arrived: result.q0 + result.q.iter().sum::<f64>(),
            survival: result.survival,
            hitting_time_truncated: result.hitting_time_truncated,
            overlap: Some(ov),
            conservation_error: conservation,
            verdict,
            checkpoints: result.checkpoints(),
        })
    }
}

/// Runs every analysis listed in the configuration, in dependency order.
pub fn run(config: &ExperimentConfig) -> Result<Vec<Artifact>, RunError> {
    let mut exp = Experiment::new(config.clone())?;
    config.analyses.iter().map(|&a| exp.run(a)).collect()
}

/// Writes artifacts to `out_dir` (one file each, replaced atomically) or returns
/// the stdout text when `out_dir` is `None`.
pub fn emit(artifacts: &[Artifact], format: Format, out_dir: Option<&Path>) -> Result<String, RunError> {
    match out_dir {
        None => Ok(match format {
            Format::Json if artifacts.len() != 1 => {
                let all: Vec<_> = artifacts.iter().map(Artifact::json).collect();
                let mut s = serde_json::to_string_pretty(&all).expect("serializable");
                s.push('\n');
                s
            }
            _ => artifacts.iter().map(|a| a.render(format)).collect::<Vec<_>>().join("\n"),
        }),
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.to_path_buf(), source })?;
            let mut listing = String::new();
            for a in artifacts {
                let path = dir.join(format!("{}.{}", a.stem, format.extension()));
                write_atomic(&path, a.render(format).as_bytes())?;
                listing.push_str(&format!("wrote {}\n", path.display()));
            }
            Ok(listing)
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let io = |source| RunError::Io { path: path.to_path_buf(), source };
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or_default()
    ));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn exit_codes() {
        assert_eq!(RunError::Config(ConfigError::new("x", "y")).exit_code(), 2);
        assert_eq!(RunError::DeadBand(String::new()).exit_code(), 3);
        assert_eq!(RunError::Invariant(String::new()).exit_code(), 4);
        assert_eq!(RunError::Failed(String::new()).exit_code(), 1);
    }

    #[test]
    fn cube3_grover_runs_every_analysis() {
        let cfg = parse_config(
            r#"
            analyses = ["decompose", "iht", "cps", "symmetries", "sweep", "simulate"]
            [graph]
            kind = "hypercube"
            dim = 3
            [coin]
            kind = "grover"
            [simulate]
            horizon = 200
            "#,
        )
        .unwrap();
        let artifacts = run(&cfg).unwrap();
        assert_eq!(artifacts.len(), 6);
        let Body::Tables(t) = &artifacts[1].body else { panic!("iht artifact is not a table") };
        let t = &t[0];
        assert_eq!(t.iht_dim, 6);
        assert_eq!(t.oracle_dim, Some(6));
    }
}
