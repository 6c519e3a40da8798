//! Small dense helpers: orthonormalization, tolerance-checked null spaces and
//! principal angles.

use nalgebra::DMatrix;

use crate::scalar::{Cx, Real};

/// Singular values closer than this factor to the rank threshold are ambiguous.
pub const DEAD_BAND_FACTOR: f64 = 100.0;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("numerical rank is indeterminate: singular value {sigma:e} lies within a factor {DEAD_BAND_FACTOR} of the threshold {threshold:e}")]
pub struct RankIndeterminate {
    pub sigma: f64,
    pub threshold: f64,
}

/// Result of a null-space computation on an `m × k` matrix.
#[derive(Clone, Debug)]
pub struct Kernel<R: Real> {
    pub rank: usize,
    /// Orthonormal `k × (k - rank)` basis of the null space.
    pub basis: DMatrix<Cx<R>>,
    /// Singular values in descending order (length `k`, zero-padded when `m < k`).
    pub singular_values: Vec<f64>,
}

/// Orthonormal basis for the column span of `m` (assumed full column rank).
pub fn orthonormalize<R: Real>(m: &DMatrix<Cx<R>>) -> DMatrix<Cx<R>> {
    if m.ncols() == 0 {
        return m.clone();
    }
    m.clone().qr().q()
}

/// Numerical null space using singular values with threshold
/// `rank_tol * max(σ_max, 1)`; refuses to decide when a singular value falls
/// within the dead band around the threshold.
pub fn kernel<R: Real>(m: &DMatrix<Cx<R>>, rank_tol: f64) -> Result<Kernel<R>, RankIndeterminate> {
    let k = m.ncols();
    if k == 0 {
        return Ok(Kernel { rank: 0, basis: DMatrix::zeros(0, 0), singular_values: vec![] });
    }
    // pad with zero rows so the SVD yields a full k × k right factor
    let rows = m.nrows().max(k);
    let mut padded = DMatrix::zeros(rows, k);
    padded.view_mut((0, 0), (m.nrows(), k)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<(f64, usize)> = svd.singular_values.iter().map(|s| s.as_f64()).zip(0..).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));

    let sigma_max = order.first().map_or(0.0, |x| x.0);
    let threshold = rank_tol * sigma_max.max(1.0);
    if let Some(&(sigma, _)) = order
        .iter()
        .find(|(s, _)| *s >= threshold / DEAD_BAND_FACTOR && *s <= threshold * DEAD_BAND_FACTOR)
    {
        return Err(RankIndeterminate { sigma, threshold });
    }
    let rank = order.iter().filter(|(s, _)| *s > threshold).count();
    let null: Vec<usize> = order[rank..].iter().map(|&(_, i)| i).collect();
    let mut basis = DMatrix::zeros(k, null.len());
    for (c, &i) in null.iter().enumerate() {
        basis.set_column(c, &v_t.row(i).adjoint());
    }
    Ok(Kernel { rank, basis, singular_values: order.into_iter().map(|x| x.0).collect() })
}

/// Largest principal angle (radians) between the column spans of two
/// orthonormal bases of equal dimension; `None` when the dimensions differ.
pub fn max_principal_angle<R: Real>(a: &DMatrix<Cx<R>>, b: &DMatrix<Cx<R>>) -> Option<f64> {
    if a.ncols() != b.ncols() || a.nrows() != b.nrows() {
        return None;
    }
    if a.ncols() == 0 {
        return Some(0.0);
    }
    // sines of the principal angles are the singular values of (I - A A^dagger) B
    let residual = b - a * (a.adjoint() * b);
    let sines = residual.singular_values();
    let s = sines.iter().map(|x| x.as_f64()).fold(0.0, f64::max);
    Some(s.min(1.0).asin())
}

/// Max-norm of `B^dagger B - I`.
pub fn gram_residual<R: Real>(b: &DMatrix<Cx<R>>) -> f64 {
    crate::scalar::unitarity_residual(b)
}
