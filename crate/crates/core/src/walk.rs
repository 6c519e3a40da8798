//! The evolution operator `U = S (I_v ⊗ C)` and the final-vertex projector.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cayley::{CayleyGraph, ShiftMap};
use crate::coins::CoinOperator;
use crate::scalar::{cx, real, Cx, Real};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coin dimension {coin} does not match graph degree {degree}")]
    CoinDegreeMismatch { coin: usize, degree: usize },
    #[error("final vertex set is empty")]
    EmptyFinalSet,
    #[error("final vertex {vertex} out of range (graph has {n_vertices} vertices)")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },
}

/// Amplitudes over composite indices `v * d + j`. May be subnormalized.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState<R: Real> {
    amplitudes: DVector<Cx<R>>,
}

impl<R: Real> WalkState<R> {
    pub fn new(amplitudes: DVector<Cx<R>>) -> Self {
        WalkState { amplitudes }
    }

    pub fn basis(dim: usize, idx: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[idx] = cx(1.0, 0.0);
        WalkState { amplitudes: v }
    }

    /// Equal amplitude `1/√N` on every composite basis state.
    pub fn uniform(dim: usize) -> Self {
        let a = 1.0 / (dim as f64).sqrt();
        WalkState { amplitudes: DVector::from_element(dim, cx(a, 0.0)) }
    }

    /// `|v⟩ ⊗ (1/√d) Σ_j |j⟩`.
    pub fn uniform_coin_at(dim: usize, degree: usize, vertex: usize) -> Self {
        let a = 1.0 / (degree as f64).sqrt();
        let mut v = DVector::zeros(dim);
        for j in 0..degree {
            v[vertex * degree + j] = cx(a, 0.0);
        }
        WalkState { amplitudes: v }
    }

    /// Normalized state with i.i.d. complex Gaussian amplitudes from a seeded ChaCha8 stream.
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<(f64, f64)> = (0..dim)
            .map(|_| (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let norm = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        WalkState { amplitudes: DVector::from_iterator(dim, raw.into_iter().map(|(a, b)| cx(a / norm, b / norm))) }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Cx<R>> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Cx<R>> {
        self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr().as_f64()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

/// Structured walk operator: a `d × d` coin applied blockwise, then the shift permutation.
#[derive(Clone, Debug)]
pub struct WalkUnitary<R: Real> {
    shift: ShiftMap,
    coin: CoinOperator<R>,
    coin_adjoint: DMatrix<Cx<R>>,
}

pub fn build_unitary<R: Real>(graph: &CayleyGraph, coin: CoinOperator<R>) -> Result<WalkUnitary<R>, WalkError> {
    if coin.dim() != graph.degree() {
        return Err(WalkError::CoinDegreeMismatch { coin: coin.dim(), degree: graph.degree() });
    }
    let shift = graph.shift_map();
    let coin_adjoint = coin.matrix().adjoint();
    Ok(WalkUnitary { shift, coin, coin_adjoint })
}

impl<R: Real> WalkUnitary<R> {
    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn degree(&self) -> usize {
        self.coin.dim()
    }

    pub fn coin(&self) -> &CoinOperator<R> {
        &self.coin
    }

    pub fn shift(&self) -> &ShiftMap {
        &self.shift
    }

    fn check(&self, psi: &WalkState<R>) -> Result<(), WalkError> {
        if psi.dim() != self.dim() {
            Err(WalkError::DimensionMismatch { expected: self.dim(), got: psi.dim() })
        } else {
            Ok(())
        }
    }

    /// One step `U ψ`.
    pub fn apply(&self, psi: &WalkState<R>) -> Result<WalkState<R>, WalkError> {
        self.check(psi)?;
        let mut out = DVector::zeros(self.dim());
        self.step(psi.amplitudes.as_slice(), out.as_mut_slice());
        Ok(WalkState::new(out))
    }

    /// `U^dagger ψ = (I ⊗ C^dagger) S^{-1} ψ`.
    pub fn apply_inverse(&self, psi: &WalkState<R>) -> Result<WalkState<R>, WalkError> {
        self.check(psi)?;
        let d = self.degree();
        let src = psi.amplitudes.as_slice();
        let shifted: Vec<Cx<R>> = (0..self.dim()).map(|i| src[self.shift.apply(i)]).collect();
        let mut out = DVector::zeros(self.dim());
        for (block_in, block_out) in shifted.chunks_exact(d).zip(out.as_mut_slice().chunks_exact_mut(d)) {
            mix(&self.coin_adjoint, block_in, block_out);
        }
        Ok(WalkState::new(out))
    }

    /// Writes `U · src` into `dst`; both have length `dim()`.
    pub(crate) fn step(&self, src: &[Cx<R>], dst: &mut [Cx<R>]) {
        let d = self.degree();
        let mut block = vec![Cx::new(real(0.0), real(0.0)); d];
        for (v, block_in) in src.chunks_exact(d).enumerate() {
            mix(self.coin.matrix(), block_in, &mut block);
            for (j, a) in block.iter().enumerate() {
                dst[self.shift.apply(v * d + j)] = *a;
            }
        }
    }

    /// Dense `N × N` matrix of `U`.
    pub fn dense(&self) -> DMatrix<Cx<R>> {
        let n = self.dim();
        let d = self.degree();
        let c = self.coin.matrix();
        let mut m = DMatrix::zeros(n, n);
        // column (v, j) of U is Σ_j' C[j', j] |shift(v, j')⟩
        for col in 0..n {
            let (v, j) = (col / d, col % d);
            for jp in 0..d {
                m[(self.shift.apply(v * d + jp), col)] = c[(jp, j)];
            }
        }
        m
    }
}

fn mix<R: Real>(m: &DMatrix<Cx<R>>, input: &[Cx<R>], output: &mut [Cx<R>]) {
    let d = input.len();
    for (r, o) in output.iter_mut().enumerate() {
        let mut acc = Cx::new(real(0.0), real(0.0));
        for c in 0..d {
            acc += m[(r, c)] * input[c];
        }
        *o = acc;
    }
}

/// Projector `Σ_{f ∈ F} |f⟩⟨f| ⊗ I_c` onto all coin states of the final vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalProjector {
    final_set: Vec<usize>,
    rows: Vec<usize>,
    is_final_row: Vec<bool>,
}

pub fn final_projector(graph: &CayleyGraph, final_set: &[usize]) -> Result<FinalProjector, WalkError> {
    FinalProjector::new(graph.n_vertices(), graph.degree(), final_set)
}

impl FinalProjector {
    pub fn new(n_vertices: usize, degree: usize, final_set: &[usize]) -> Result<Self, WalkError> {
        if final_set.is_empty() {
            return Err(WalkError::EmptyFinalSet);
        }
        if let Some(&v) = final_set.iter().find(|&&v| v >= n_vertices) {
            return Err(WalkError::VertexOutOfRange { vertex: v, n_vertices });
        }
        let mut set = final_set.to_vec();
        set.sort_unstable();
        set.dedup();
        let rows: Vec<usize> = set.iter().flat_map(|&v| (0..degree).map(move |j| v * degree + j)).collect();
        let mut is_final_row = vec![false; n_vertices * degree];
        for &r in &rows {
            is_final_row[r] = true;
        }
        Ok(FinalProjector { final_set: set, rows, is_final_row })
    }

    /// Final vertices, sorted ascending.
    pub fn final_set(&self) -> &[usize] {
        &self.final_set
    }

    /// Composite indices spanned by the projector, ascending.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.is_final_row.len()
    }

    #[inline]
    pub fn contains_row(&self, idx: usize) -> bool {
        self.is_final_row[idx]
    }

    /// `Π ψ`.
    pub fn project<R: Real>(&self, psi: &WalkState<R>) -> WalkState<R> {
        let a = psi.amplitudes();
        let out = DVector::from_fn(a.len(), |i, _| if self.is_final_row[i] { a[i] } else { Cx::new(real(0.0), real(0.0)) });
        WalkState::new(out)
    }

    pub fn dense<R: Real>(&self) -> DMatrix<Cx<R>> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |r, c| if r == c && self.is_final_row[r] { cx(1.0, 0.0) } else { cx(0.0, 0.0) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::build_hypercube;
    use crate::coins::{dft, grover, identity};
    use crate::scalar::{max_abs_diff, unitarity_residual};

    #[test]
    fn identity_coin_is_pure_shift() {
        let g = build_hypercube(3).unwrap();
        let u = build_unitary(&g, identity::<f64>(3).unwrap()).unwrap();
        for v in 0..8 {
            for j in 0..3 {
                let out = u.apply(&WalkState::basis(24, v * 3 + j)).unwrap();
                let target = (v ^ (1 << j)) * 3 + j;
                assert_eq!(out, WalkState::basis(24, target));
            }
        }
    }

    #[test]
    fn dense_matches_structured_and_is_unitary() {
        let g = build_hypercube(3).unwrap();
        let u = build_unitary(&g, grover::<f64>(3).unwrap()).unwrap();
        assert_eq!(u.dim(), 24);
        let m = u.dense();
        assert!(unitarity_residual(&m) < 1e-12);
        for seed in 0..5 {
            let psi = WalkState::<f64>::random(24, seed);
            let a = u.apply(&psi).unwrap();
            let b = &m * psi.amplitudes();
            assert!((a.amplitudes() - b).camax() < 1e-12);
            assert!((a.norm() - 1.0).abs() < 1e-12);
            let back = u.apply_inverse(&a).unwrap();
            assert!((back.amplitudes() - psi.amplitudes()).camax() < 1e-12);
        }
    }

    #[test]
    fn coin_degree_mismatch() {
        let g = build_hypercube(3).unwrap();
        assert_eq!(
            build_unitary(&g, dft::<f64>(4).unwrap()).unwrap_err(),
            WalkError::CoinDegreeMismatch { coin: 4, degree: 3 }
        );
        let u = build_unitary(&g, dft::<f64>(3).unwrap()).unwrap();
        assert!(matches!(u.apply(&WalkState::basis(10, 0)), Err(WalkError::DimensionMismatch { .. })));
    }

    #[test]
    fn projector_basics() {
        let g = build_hypercube(3).unwrap();
        let p = final_projector(&g, &[7]).unwrap();
        assert_eq!(p.rank(), 3);
        assert_eq!(p.rows(), &[21, 22, 23]);
        let m = p.dense::<f64>();
        assert!(max_abs_diff(&(&m * &m), &m) < 1e-15);
        assert!(max_abs_diff(&m.adjoint(), &m) < 1e-15);
        let all: Vec<usize> = (0..8).collect();
        let full = final_projector(&g, &all).unwrap();
        assert_eq!(full.rank(), 24);
        assert_eq!(full.dense::<f64>(), DMatrix::identity(24, 24));
        assert_eq!(final_projector(&g, &[]).unwrap_err(), WalkError::EmptyFinalSet);
        assert!(matches!(final_projector(&g, &[8]), Err(WalkError::VertexOutOfRange { vertex: 8, .. })));
    }

    #[test]
    fn generic_over_single_precision() {
        let g = build_hypercube(3).unwrap();
        let u = build_unitary(&g, grover::<f32>(3).unwrap()).unwrap();
        assert!(unitarity_residual(&u.dense()) < 1e-5);
        let psi = WalkState::<f32>::random(24, 3);
        let out = u.apply(&psi).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-5);
    }
}
