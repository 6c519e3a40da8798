//! Coin operators and their coin-permutation symmetries.

use std::fmt;

use nalgebra::{ComplexField, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::perm::Perm;
use crate::scalar::{cx, real, unitarity_residual, Cx, Real};

/// Largest coin dimension accepted by [`cps_enumerate`] (8! candidates).
pub const MAX_CPS_DIM: usize = 8;

/// Default tolerance for `P C P^dagger = C`.
pub const DEFAULT_CPS_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CoinError {
    #[error("coin dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("the Hadamard coin is 2-dimensional, got {0}")]
    HadamardDimension(usize),
    #[error("coin matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("coin is not unitary: max |C^dagger C - I| = {0:e}")]
    NotUnitary(f64),
    #[error("exhaustive permutation search needs d <= {MAX_CPS_DIM}, got {0}")]
    TooLargeForEnumeration(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoinKind {
    Grover,
    Dft,
    Hadamard,
    Identity,
    Random { seed: u64 },
    Custom,
}

impl fmt::Display for CoinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoinKind::Grover => write!(f, "grover"),
            CoinKind::Dft => write!(f, "dft"),
            CoinKind::Hadamard => write!(f, "hadamard"),
            CoinKind::Identity => write!(f, "identity"),
            CoinKind::Random { seed } => write!(f, "random(seed={seed})"),
            CoinKind::Custom => write!(f, "custom"),
        }
    }
}

/// A `d × d` unitary acting on the edge-direction space at every vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinOperator<R: Real> {
    kind: CoinKind,
    matrix: DMatrix<Cx<R>>,
}

impl<R: Real> CoinOperator<R> {
    pub fn kind(&self) -> CoinKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Cx<R>> {
        &self.matrix
    }

    /// Wraps an arbitrary unitary matrix.
    pub fn custom(matrix: DMatrix<Cx<R>>) -> Result<Self, CoinError> {
        Self::checked(CoinKind::Custom, matrix)
    }

    fn checked(kind: CoinKind, matrix: DMatrix<Cx<R>>) -> Result<Self, CoinError> {
        if !matrix.is_square() {
            return Err(CoinError::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        let residual = unitarity_residual(&matrix);
        if residual >= R::UNITARY_TOL {
            return Err(CoinError::NotUnitary(residual));
        }
        Ok(CoinOperator { kind, matrix })
    }

    /// True if `P_π C P_π^dagger = C` within `tol` (max-norm), where `P_π |j⟩ = |π(j)⟩`.
    pub fn is_fixed_by(&self, pi: &Perm, tol: f64) -> bool {
        let d = self.dim();
        assert_eq!(pi.len(), d, "permutation size must match coin dimension");
        (0..d).all(|r| {
            (0..d).all(|c| (self.matrix[(pi.apply(r), pi.apply(c))] - self.matrix[(r, c)]).modulus().as_f64() < tol)
        })
    }
}

fn check_dim(d: usize) -> Result<(), CoinError> {
    if d < 2 {
        Err(CoinError::DimensionTooSmall(d))
    } else {
        Ok(())
    }
}

/// Grover diffusion coin: diagonal `2/d - 1`, off-diagonal `2/d`.
pub fn grover<R: Real>(d: usize) -> Result<CoinOperator<R>, CoinError> {
    check_dim(d)?;
    let b = 2.0 / d as f64;
    let m = DMatrix::from_fn(d, d, |r, c| if r == c { cx(b - 1.0, 0.0) } else { cx(b, 0.0) });
    CoinOperator::checked(CoinKind::Grover, m)
}

fn dft_matrix<R: Real>(d: usize) -> DMatrix<Cx<R>> {
    let norm = 1.0 / (d as f64).sqrt();
    DMatrix::from_fn(d, d, |r, c| {
        // reduce the exponent mod d before forming the angle
        let angle = 2.0 * std::f64::consts::PI * ((r * c) % d) as f64 / d as f64;
        cx(norm * angle.cos(), norm * angle.sin())
    })
}

/// Discrete Fourier transform coin: entry `(r, c) = ω^{rc} / √d`, `ω = e^{2πi/d}`.
pub fn dft<R: Real>(d: usize) -> Result<CoinOperator<R>, CoinError> {
    check_dim(d)?;
    CoinOperator::checked(CoinKind::Dft, dft_matrix(d))
}

/// The 2×2 Hadamard coin (the `d = 2` DFT).
pub fn hadamard<R: Real>(d: usize) -> Result<CoinOperator<R>, CoinError> {
    if d != 2 {
        return Err(CoinError::HadamardDimension(d));
    }
    CoinOperator::checked(CoinKind::Hadamard, dft_matrix(2))
}

pub fn identity<R: Real>(d: usize) -> Result<CoinOperator<R>, CoinError> {
    if d == 0 {
        return Err(CoinError::DimensionTooSmall(d));
    }
    CoinOperator::checked(CoinKind::Identity, DMatrix::identity(d, d))
}

/// Haar-distributed random unitary from a seeded ChaCha8 stream.
///
/// Entries of a complex Gaussian matrix are drawn row-major (real part, then
/// imaginary part); the matrix is QR-factored and each column of `Q` is
/// multiplied by the phase of the matching diagonal entry of `R`.
pub fn random_unitary<R: Real>(d: usize, seed: u64) -> Result<CoinOperator<R>, CoinError> {
    check_dim(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(2 * d * d);
    for _ in 0..2 * d * d {
        let x: f64 = StandardNormal.sample(&mut rng);
        draws.push(x);
    }
    let z = DMatrix::from_fn(d, d, |r, c| {
        let k = 2 * (r * d + c);
        cx::<R>(draws[k], draws[k + 1])
    });
    let qr = z.qr();
    let mut q = qr.q();
    let rdiag = qr.r().diagonal();
    for c in 0..d {
        let rc = rdiag[c];
        let modulus = rc.modulus();
        let phase = if modulus > real::<R>(0.0) { rc / Cx::new(modulus, real(0.0)) } else { cx(1.0, 0.0) };
        for r in 0..d {
            q[(r, c)] *= phase;
        }
    }
    CoinOperator::checked(CoinKind::Random { seed }, q)
}

/// The coin-permutation symmetries of a coin: all `π` with `P_π C P_π^dagger = C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoinPermutationSet {
    perms: Vec<Perm>,
}

impl CoinPermutationSet {
    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    pub fn size(&self) -> usize {
        self.perms.len()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.perms.binary_search(p).is_ok()
    }

    /// Exhaustive closure and inverse check.
    pub fn is_group(&self) -> bool {
        let Some(first) = self.perms.first() else { return false };
        if !self.contains(&Perm::identity(first.len())) {
            return false;
        }
        self.perms.iter().all(|a| {
            self.contains(&a.inverse()) && self.perms.iter().all(|b| self.contains(&a.compose(b)))
        })
    }
}

pub fn cps_enumerate<R: Real>(coin: &CoinOperator<R>, tol: f64) -> Result<CoinPermutationSet, CoinError> {
    let d = coin.dim();
    if d > MAX_CPS_DIM {
        return Err(CoinError::TooLargeForEnumeration(d));
    }
    // Perm::all is lexicographic, so the result is sorted for binary search.
    let perms = Perm::all(d).into_iter().filter(|p| coin.is_fixed_by(p, tol)).collect();
    Ok(CoinPermutationSet { perms })
}

/// The index reversal `π(0) = 0, π(c) = d - c`, which fixes every DFT coin.
pub fn dft_reversal(d: usize) -> Perm {
    Perm::from_images((0..d).map(|c| if c == 0 { 0 } else { d - c }).collect()).expect("valid permutation")
}
