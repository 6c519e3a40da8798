//! Eigenspace analysis of walk unitaries and the infinite-hitting-time (IHT)
//! subspace.
//!
//! The IHT subspace for a final set `F` is the span of eigenvectors of `U`
//! with no amplitude on `F`. It is computed eigenspace by eigenspace: each
//! cluster basis `B` is restricted to the rows of `F` and the null space of
//! that restriction lifts back to IHT vectors. [`dark_subspace_oracle`]
//! computes the same subspace without an eigendecomposition.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cayley::CayleyGraph;
use crate::linalg::{kernel, orthonormalize, RankIndeterminate};
use crate::scalar::{Cx, Real};
use crate::walk::{FinalProjector, WalkState, WalkUnitary};

pub const DEFAULT_DIM_CAP: usize = 4096;
/// Gaps within this factor of the clustering threshold are ambiguous.
pub const CLUSTER_AMBIGUITY_FACTOR: f64 = 10.0;
const CAYLEY_ATTEMPTS: usize = 8;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("dimension {dim} exceeds cap {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("eigensolver failed to reach the residual bound")]
    EigensolverFailed,
    #[error("eigenphase gap {gap:e} is within a factor {CLUSTER_AMBIGUITY_FACTOR} of the clustering threshold {tol:e}; pass an explicit tolerance")]
    ClusterAmbiguity { gap: f64, tol: f64 },
    #[error(transparent)]
    RankIndeterminate(#[from] RankIndeterminate),
    #[error("state norm deviates from 1 by {0:e}")]
    NotNormalized(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invariant-subspace iteration did not stabilise within {0} steps")]
    NoConvergence(usize),
    #[error("sweep size {size} outside 1..={max}")]
    InvalidSweepSize { size: usize, max: usize },
}

/// One degenerate eigenspace: eigenvalue `e^{iθ}` with an orthonormal basis.
#[derive(Clone, Debug)]
pub struct EigenCluster<R: Real> {
    pub phase: f64,
    pub basis: DMatrix<Cx<R>>,
}

impl<R: Real> EigenCluster<R> {
    pub fn multiplicity(&self) -> usize {
        self.basis.ncols()
    }

    pub fn eigenvalue(&self) -> Cx<R> {
        Cx::new(R::lit(self.phase.cos()), R::lit(self.phase.sin()))
    }
}

#[derive(Clone, Debug)]
pub struct EigenspaceDecomposition<R: Real> {
    clusters: Vec<EigenCluster<R>>,
    dim: usize,
}

impl<R: Real> EigenspaceDecomposition<R> {
    /// Clusters sorted by representative phase in `[0, 2π)`.
    pub fn clusters(&self) -> &[EigenCluster<R>] {
        &self.clusters
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Multiset of cluster dimensions as `dimension -> count`.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for c in &self.clusters {
            *out.entry(c.multiplicity()).or_insert(0) += 1;
        }
        out
    }

    /// `Σ e^{iθ} B B^dagger`.
    pub fn reconstruct(&self) -> DMatrix<Cx<R>> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for c in &self.clusters {
            m += (&c.basis * c.basis.adjoint()) * c.eigenvalue();
        }
        m
    }

    /// All cluster bases side by side (`N × N`).
    pub fn full_basis(&self) -> DMatrix<Cx<R>> {
        let cols: Vec<_> = self.clusters.iter().flat_map(|c| c.basis.column_iter().map(|x| x.into_owned())).collect();
        DMatrix::from_columns(&cols)
    }

    /// Largest `‖U b − e^{iθ} b‖₂` over all basis vectors.
    pub fn max_residual(&self, u: &WalkUnitary<R>) -> f64 {
        let mut worst = 0.0f64;
        for c in &self.clusters {
            let lambda = c.eigenvalue();
            for col in c.basis.column_iter() {
                let b = WalkState::new(col.into_owned());
                let ub = u.apply(&b).expect("dimension matches");
                let r = ub.amplitudes() - b.amplitudes() * lambda;
                worst = worst.max(r.norm().as_f64());
            }
        }
        worst
    }
}

fn wrap_phase(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let t = theta.rem_euclid(tau);
    if t >= tau {
        0.0
    } else {
        t
    }
}

/// Orthonormal eigenvectors and eigenphases of a unitary matrix.
///
/// The unitary is mapped to the Hermitian matrix `K = i (I - zU)^{-1} (I + zU)`
/// with `z = e^{-iα}`, which sends `e^{iθ}` to `-cot((θ - α)/2)` and keeps
/// the eigenvectors. `K` is diagonalized by a Hermitian solver and each phase
/// is read back from the Rayleigh quotient `b^dagger U b`. A different `α`
/// is tried whenever some eigenvalue sits too close to the pole `e^{iα}` for
/// the residual bound to hold.
pub fn unitary_eigenvectors<R: Real>(dense: &DMatrix<Cx<R>>) -> Result<(DMatrix<Cx<R>>, Vec<f64>), SpectralError> {
    let n = dense.nrows();
    let id = DMatrix::<Cx<R>>::identity(n, n);
    let residual_tol = 1e3 * R::UNITARY_TOL;
    for attempt in 0..CAYLEY_ATTEMPTS {
        let alpha = std::f64::consts::TAU * (0.1234 + attempt as f64 * 0.618_033_988_749_895).fract();
        let z = Cx::new(R::lit(alpha.cos()), R::lit(-alpha.sin()));
        let zu = dense * z;
        let Some(x) = (&id - &zu).lu().solve(&(&id + &zu)) else { continue };
        let k = x * Cx::new(R::zero(), R::one());
        let hermitian = (&k + k.adjoint()) * Cx::new(R::lit(0.5), R::zero());
        let q = hermitian.symmetric_eigen().eigenvectors;
        let uq = dense * &q;
        let mut phases = Vec::with_capacity(n);
        let mut worst = 0.0f64;
        for c in 0..n {
            let lambda = q.column(c).dotc(&uq.column(c));
            worst = worst.max((uq.column(c) - q.column(c) * lambda).norm().as_f64());
            phases.push(wrap_phase(lambda.im.as_f64().atan2(lambda.re.as_f64())));
        }
        if worst < residual_tol {
            return Ok((q, phases));
        }
        log::debug!("eigen residual {worst:e} at pole angle {alpha}; retrying");
    }
    Err(SpectralError::EigensolverFailed)
}

pub fn decompose<R: Real>(u: &WalkUnitary<R>, cluster_tol: f64) -> Result<EigenspaceDecomposition<R>, SpectralError> {
    decompose_with_cap(u, cluster_tol, DEFAULT_DIM_CAP)
}

/// Full eigendecomposition of the dense walk unitary with phases clustered
/// by absolute gap `cluster_tol` (circularly, so phases near 0 and 2π join).
pub fn decompose_with_cap<R: Real>(
    u: &WalkUnitary<R>,
    cluster_tol: f64,
    cap: usize,
) -> Result<EigenspaceDecomposition<R>, SpectralError> {
    let n = u.dim();
    if n > cap {
        return Err(SpectralError::TooLarge { dim: n, cap });
    }
    let (q, raw_phases) = unitary_eigenvectors(&u.dense())?;
    let mut phases: Vec<(f64, usize)> = raw_phases.into_iter().zip(0..).collect();
    phases.sort_by(|a, b| a.0.total_cmp(&b.0));

    let lo = cluster_tol / CLUSTER_AMBIGUITY_FACTOR;
    let hi = cluster_tol * CLUSTER_AMBIGUITY_FACTOR;
    let mut gaps: Vec<f64> = phases.windows(2).map(|w| w[1].0 - w[0].0).collect();
    if n > 1 {
        gaps.push(phases[0].0 + std::f64::consts::TAU - phases[n - 1].0);
    }
    if let Some(&gap) = gaps.iter().find(|&&g| g >= lo && g <= hi) {
        return Err(SpectralError::ClusterAmbiguity { gap, tol: cluster_tol });
    }

    let mut runs: Vec<Vec<(f64, usize)>> = Vec::new();
    for (i, &p) in phases.iter().enumerate() {
        if i > 0 && gaps[i - 1] < cluster_tol {
            runs.last_mut().unwrap().push(p);
        } else {
            runs.push(vec![p]);
        }
    }
    if runs.len() > 1 && gaps[n - 1] < cluster_tol {
        let last = runs.pop().unwrap();
        let first = runs.remove(0);
        let mut merged: Vec<(f64, usize)> = last.into_iter().map(|(t, i)| (t - std::f64::consts::TAU, i)).collect();
        merged.extend(first);
        runs.insert(0, merged);
    }

    let mut clusters: Vec<EigenCluster<R>> = runs
        .into_iter()
        .map(|run| {
            let phase = wrap_phase(run.iter().map(|p| p.0).sum::<f64>() / run.len() as f64);
            let cols: Vec<DVector<Cx<R>>> = run.iter().map(|&(_, i)| q.column(i).into_owned()).collect();
            let basis = orthonormalize(&DMatrix::from_columns(&cols));
            EigenCluster { phase, basis }
        })
        .collect();
    clusters.sort_by(|a, b| a.phase.total_cmp(&b.phase));
    Ok(EigenspaceDecomposition { clusters, dim: n })
}

/// IHT contribution of one eigenspace.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterIht {
    pub phase: f64,
    pub dim: usize,
    pub iht_dim: usize,
}

/// One aggregated table row: `count` eigenspaces of dimension `dim`, each
/// contributing `iht_dim` IHT vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableRow {
    pub count: usize,
    pub dim: usize,
    pub iht_dim: usize,
}

#[derive(Clone, Debug)]
pub struct IhtReport<R: Real> {
    pub per_cluster: Vec<ClusterIht>,
    pub total: usize,
    /// Orthonormal `N × total` basis of the IHT subspace.
    pub iht_basis: DMatrix<Cx<R>>,
    /// Eigenphase of each `iht_basis` column.
    pub basis_phases: Vec<f64>,
    pub final_set: Vec<usize>,
    pub dim: usize,
}

impl<R: Real> IhtReport<R> {
    /// Rows grouped by `(dimension, IHT dimension)`, largest dimension first.
    pub fn table_rows(&self) -> Vec<TableRow> {
        let mut groups: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for c in &self.per_cluster {
            *groups.entry((c.dim, c.iht_dim)).or_insert(0) += 1;
        }
        let mut rows: Vec<TableRow> =
            groups.into_iter().map(|((dim, iht_dim), count)| TableRow { count, dim, iht_dim }).collect();
        rows.sort_by(|a, b| b.dim.cmp(&a.dim).then(b.iht_dim.cmp(&a.iht_dim)).then(b.count.cmp(&a.count)));
        rows
    }

    pub fn has_infinite_hitting_time(&self) -> bool {
        self.total > 0
    }
}

pub fn iht_subspace<R: Real>(
    decomp: &EigenspaceDecomposition<R>,
    proj: &FinalProjector,
    rank_tol: f64,
) -> Result<IhtReport<R>, SpectralError> {
    let n = decomp.dim();
    if proj.dim() != n {
        return Err(SpectralError::DimensionMismatch { expected: n, got: proj.dim() });
    }
    let rows = proj.rows();
    let mut per_cluster = Vec::with_capacity(decomp.clusters.len());
    let mut cols: Vec<DVector<Cx<R>>> = Vec::new();
    let mut basis_phases = Vec::new();
    for c in &decomp.clusters {
        let k = c.multiplicity();
        let restricted = DMatrix::from_fn(rows.len(), k, |r, col| c.basis[(rows[r], col)]);
        let ker = kernel(&restricted, rank_tol)?;
        let lifted = &c.basis * &ker.basis;
        for col in lifted.column_iter() {
            cols.push(col.into_owned());
            basis_phases.push(c.phase);
        }
        per_cluster.push(ClusterIht { phase: c.phase, dim: k, iht_dim: k - ker.rank });
    }
    let total = cols.len();
    let iht_basis = if cols.is_empty() { DMatrix::zeros(n, 0) } else { DMatrix::from_columns(&cols) };
    Ok(IhtReport { per_cluster, total, iht_basis, basis_phases, final_set: proj.final_set().to_vec(), dim: n })
}

pub const NORMALIZATION_TOL: f64 = 1e-9;

/// `Σ_i |⟨V_i|ψ⟩|²` over the IHT basis: the probability of never reaching the final set.
pub fn overlap<R: Real>(psi: &WalkState<R>, report: &IhtReport<R>) -> Result<f64, SpectralError> {
    if psi.dim() != report.dim {
        return Err(SpectralError::DimensionMismatch { expected: report.dim, got: psi.dim() });
    }
    let dev = (psi.norm() - 1.0).abs();
    if dev > NORMALIZATION_TOL {
        return Err(SpectralError::NotNormalized(dev));
    }
    let coeffs = report.iht_basis.adjoint() * psi.amplitudes();
    Ok(coeffs.iter().map(|c| c.norm_sqr().as_f64()).sum::<f64>().min(1.0))
}

/// Largest `U`-invariant subspace inside `ker Π`, by the refinement
/// `D₀ = ker Π`, `D_{t+1} = {x ∈ D_t : U x ∈ D_t}`.
pub fn dark_subspace_oracle<R: Real>(
    u: &WalkUnitary<R>,
    proj: &FinalProjector,
    rank_tol: f64,
) -> Result<DMatrix<Cx<R>>, SpectralError> {
    let n = u.dim();
    if n > DEFAULT_DIM_CAP {
        return Err(SpectralError::TooLarge { dim: n, cap: DEFAULT_DIM_CAP });
    }
    if proj.dim() != n {
        return Err(SpectralError::DimensionMismatch { expected: n, got: proj.dim() });
    }
    let dense = u.dense();
    let free: Vec<usize> = (0..n).filter(|&i| !proj.contains_row(i)).collect();
    let mut basis = DMatrix::from_fn(n, free.len(), |r, c| {
        if r == free[c] {
            Cx::new(R::one(), R::zero())
        } else {
            Cx::new(R::zero(), R::zero())
        }
    });
    for _ in 0..=n {
        if basis.ncols() == 0 {
            return Ok(basis);
        }
        let ub = &dense * &basis;
        let leak = &ub - &basis * (basis.adjoint() * &ub);
        let ker = kernel(&leak, rank_tol)?;
        if ker.rank == 0 {
            return Ok(basis);
        }
        basis = orthonormalize(&(&basis * &ker.basis));
    }
    Err(SpectralError::NoConvergence(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SweepStrategy {
    /// Start from the canonical final vertex, then add vertices by descending index.
    NestedDescending,
    /// Best of `trials` uniformly random sets per size; trial `t` uses seed `seed + t`.
    Random { seed: u64, trials: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepPoint {
    pub size: usize,
    pub iht_dim: usize,
    /// The final set that achieved `iht_dim`.
    pub final_set: Vec<usize>,
}

/// Vertex order used by the nested sweep.
pub fn nested_order(graph: &CayleyGraph) -> Vec<usize> {
    let first = graph.default_final_vertex();
    std::iter::once(first).chain((0..graph.n_vertices()).rev().filter(|&v| v != first)).collect()
}

pub fn sweep_final_sets<R: Real>(
    decomp: &EigenspaceDecomposition<R>,
    graph: &CayleyGraph,
    strategy: &SweepStrategy,
    sizes: &[usize],
    rank_tol: f64,
) -> Result<Vec<SweepPoint>, SpectralError> {
    let nv = graph.n_vertices();
    let d = graph.degree();
    if let Some(&size) = sizes.iter().find(|&&s| s == 0 || s > nv) {
        return Err(SpectralError::InvalidSweepSize { size, max: nv });
    }
    let evaluate = |set: &[usize]| -> Result<usize, SpectralError> {
        let proj = FinalProjector::new(nv, d, set).expect("validated vertex set");
        Ok(iht_subspace(decomp, &proj, rank_tol)?.total)
    };
    let mut out = Vec::with_capacity(sizes.len());
    match strategy {
        SweepStrategy::NestedDescending => {
            let order = nested_order(graph);
            for &size in sizes {
                let set = order[..size].to_vec();
                out.push(SweepPoint { size, iht_dim: evaluate(&set)?, final_set: set });
            }
        }
        SweepStrategy::Random { seed, trials } => {
            for &size in sizes {
                let mut best: Option<SweepPoint> = None;
                for t in 0..*trials {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
                    let mut set = sample(&mut rng, nv, size).into_vec();
                    set.sort_unstable();
                    let v = evaluate(&set)?;
                    if best.as_ref().is_none_or(|b| v > b.iht_dim) {
                        best = Some(SweepPoint { size, iht_dim: v, final_set: set });
                    }
                }
                if let Some(b) = best {
                    out.push(b);
                }
            }
        }
    }
    Ok(out)
}
