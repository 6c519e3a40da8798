//! Scalar abstraction shared by the numeric modules.

use nalgebra as na;
use nalgebra::ComplexField;
use num_traits as nt;

/// Complex amplitude over a real scalar.
pub type Cx<R> = na::Complex<R>;

/// Real floating-point scalar the walk machinery is generic over (`f32` or `f64`).
///
/// The associated tolerances are the defaults used by invariant checks; they
/// scale with the precision of the type.
pub trait Real:
    na::RealField + Copy + nt::FloatConst + nt::FromPrimitive + nt::ToPrimitive
{
    /// Max-norm bound on `C^dagger C - I` for a coin or walk unitary.
    const UNITARY_TOL: f64;
    /// Default absolute eigenphase clustering threshold.
    const CLUSTER_TOL: f64;
    /// Default relative numerical-rank threshold.
    const RANK_TOL: f64;

    fn lit(x: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        nt::ToPrimitive::to_f64(&self).expect("finite scalar")
    }
}

impl Real for f64 {
    const UNITARY_TOL: f64 = 1e-12;
    const CLUSTER_TOL: f64 = 1e-7;
    const RANK_TOL: f64 = 1e-8;
}

impl Real for f32 {
    const UNITARY_TOL: f64 = 1e-5;
    const CLUSTER_TOL: f64 = 1e-3;
    const RANK_TOL: f64 = 1e-4;
}

pub(crate) fn real<R: Real>(x: f64) -> R {
    R::lit(x)
}

pub(crate) fn cx<R: Real>(re: f64, im: f64) -> Cx<R> {
    Cx::new(real(re), real(im))
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff<R: Real>(a: &na::DMatrix<Cx<R>>, b: &na::DMatrix<Cx<R>>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).modulus().as_f64())
        .fold(0.0, f64::max)
}

/// Max-norm of `M^dagger M - I`.
pub fn unitarity_residual<R: Real>(m: &na::DMatrix<Cx<R>>) -> f64 {
    let n = m.ncols();
    let gram = m.adjoint() * m;
    max_abs_diff(&gram, &na::DMatrix::identity(n, n))
}
