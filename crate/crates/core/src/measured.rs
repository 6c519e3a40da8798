//! Absorbing-wall simulation: step with `U`, then measure whether the walker
//! sits on a final vertex. Residual states stay unnormalized so every `q_t`
//! is an absolute probability.

use nalgebra::DVector;

use crate::scalar::{Cx, Real};
use crate::walk::{FinalProjector, WalkError, WalkState, WalkUnitary};

pub const DEFAULT_HORIZON: usize = 5000;
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MeasuredWalkError {
    #[error("initial state has norm deviation {0:e}")]
    NotNormalized(f64),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error(transparent)]
    Walk(#[from] WalkError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SimulationOptions {
    /// Measure the initial state once before the first step; the result goes to `q0`.
    pub measure_at_start: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasuredWalkResult {
    /// Arrival probability at t = 0; zero unless `measure_at_start` was set.
    pub q0: f64,
    /// `q[t - 1]` is the first-arrival probability at step `t`, for t = 1..=horizon.
    pub q: Vec<f64>,
    /// `survival_trace[t - 1]` is the surviving mass after step `t`.
    pub survival_trace: Vec<f64>,
    pub survival: f64,
    pub hitting_time_truncated: f64,
    pub horizon: usize,
}

impl MeasuredWalkResult {
    /// Surviving mass after `t` steps (`t = 0` gives the mass after the optional initial check).
    pub fn survival_at(&self, t: usize) -> Option<f64> {
        match t {
            0 => Some(1.0 - self.q0),
            t => self.survival_trace.get(t - 1).copied(),
        }
    }

    /// `|q0 + Σ q_t + survival - 1|`.
    pub fn conservation_error(&self) -> f64 {
        (self.q0 + self.q.iter().sum::<f64>() + self.survival - 1.0).abs()
    }

    /// Logarithmically spaced `(t, survival)` pairs, always including the horizon.
    pub fn checkpoints(&self) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        let mut t = 1usize;
        while t < self.horizon {
            for m in [1, 2, 5] {
                let s = t * m;
                if s < self.horizon {
                    out.push((s, self.survival_trace[s - 1]));
                }
            }
            t *= 10;
        }
        out.push((self.horizon, self.survival));
        out
    }
}

pub fn simulate<R: Real>(
    u: &WalkUnitary<R>,
    proj: &FinalProjector,
    psi0: &WalkState<R>,
    horizon: usize,
) -> Result<MeasuredWalkResult, MeasuredWalkError> {
    simulate_with(u, proj, psi0, horizon, SimulationOptions::default())
}

pub fn simulate_with<R: Real>(
    u: &WalkUnitary<R>,
    proj: &FinalProjector,
    psi0: &WalkState<R>,
    horizon: usize,
    options: SimulationOptions,
) -> Result<MeasuredWalkResult, MeasuredWalkError> {
    if horizon == 0 {
        return Err(MeasuredWalkError::ZeroHorizon);
    }
    let n = u.dim();
    for got in [psi0.dim(), proj.dim()] {
        if got != n {
            return Err(WalkError::DimensionMismatch { expected: n, got }.into());
        }
    }
    let dev = (psi0.norm() - 1.0).abs();
    if dev > NORMALIZATION_TOL {
        return Err(MeasuredWalkError::NotNormalized(dev));
    }

    let zero = Cx::new(R::zero(), R::zero());
    let mut psi: DVector<Cx<R>> = psi0.amplitudes().clone();
    let mut next = DVector::from_element(n, zero);
    // absorbs the final-set amplitudes in place and returns their mass
    let absorb = |v: &mut DVector<Cx<R>>| -> f64 {
        let mut mass = 0.0;
        for &r in proj.rows() {
            mass += v[r].norm_sqr().as_f64();
            v[r] = zero;
        }
        mass
    };

    let q0 = if options.measure_at_start { absorb(&mut psi) } else { 0.0 };
    let mut q = Vec::with_capacity(horizon);
    let mut survival_trace = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        u.step(psi.as_slice(), next.as_mut_slice());
        std::mem::swap(&mut psi, &mut next);
        q.push(absorb(&mut psi).min(1.0));
        survival_trace.push(psi.norm_squared().as_f64());
    }
    let survival = *survival_trace.last().expect("horizon >= 1");
    let hitting_time_truncated = q.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum();
    Ok(MeasuredWalkResult { q0, q, survival_trace, survival, hitting_time_truncated, horizon })
}

/// `Σ_{t=1}^{T} t · q_t`. Only a lower estimate: it diverges with `T` whenever
/// the survival does not vanish.
pub fn hitting_time(result: &MeasuredWalkResult) -> f64 {
    result.hitting_time_truncated
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HittingTimeVerdict {
    /// Survival has (numerically) vanished; the truncated sum is the estimate.
    Finite(f64),
    /// The initial state has a component that is never absorbed.
    Infinite { never_arrives: f64, truncated: f64 },
    /// Survival is still non-negligible at the horizon with no spectral certificate.
    Undetermined { survival: f64, truncated: f64 },
}

/// Combines a simulation with the spectral never-arrival probability `overlap`.
pub fn classify_hitting_time(result: &MeasuredWalkResult, overlap: f64, tol: f64) -> HittingTimeVerdict {
    let truncated = result.hitting_time_truncated;
    if overlap > tol {
        HittingTimeVerdict::Infinite { never_arrives: overlap, truncated }
    } else if result.survival <= tol {
        HittingTimeVerdict::Finite(truncated)
    } else {
        HittingTimeVerdict::Undetermined { survival: result.survival, truncated }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::build_hypercube;
    use crate::catalog::CatalogGraph;
    use crate::coins::{grover, identity};
    use crate::spectral::{decompose, iht_subspace, overlap};
    use crate::walk::{build_unitary, final_projector};

    #[test]
    fn two_vertex_cycle_arrives_in_one_step() {
        let g = build_hypercube(1).unwrap();
        let u = build_unitary(&g, identity::<f64>(1).unwrap()).unwrap();
        let proj = final_projector(&g, &[1]).unwrap();
        let r = simulate(&u, &proj, &WalkState::basis(2, 0), 10).unwrap();
        assert_eq!(r.q[0], 1.0);
        assert!(r.q[1..].iter().all(|&p| p == 0.0));
        assert_eq!(hitting_time(&r), 1.0);
        assert_eq!(r.survival, 0.0);
    }

    #[test]
    fn measure_at_start_flag() {
        let g = build_hypercube(1).unwrap();
        let u = build_unitary(&g, identity::<f64>(1).unwrap()).unwrap();
        let proj = final_projector(&g, &[1]).unwrap();
        let psi = WalkState::basis(2, 1);
        let r = simulate_with(&u, &proj, &psi, 3, SimulationOptions { measure_at_start: true }).unwrap();
        assert_eq!(r.q0, 1.0);
        assert_eq!(r.survival, 0.0);
        // default: the walker first leaves the final vertex
        let r = simulate(&u, &proj, &psi, 3).unwrap();
        assert_eq!(r.q, vec![0.0, 1.0, 0.0]);
        assert!(r.conservation_error() < 1e-15);
    }

    #[test]
    fn iht_vector_is_never_absorbed() {
        let g = build_hypercube(3).unwrap();
        let u = build_unitary(&g, grover::<f64>(3).unwrap()).unwrap();
        let proj = final_projector(&g, &[7]).unwrap();
        let rep = iht_subspace(&decompose(&u, 1e-7).unwrap(), &proj, 1e-8).unwrap();
        let psi = WalkState::new(rep.iht_basis.column(0).into_owned());
        let r = simulate(&u, &proj, &psi, 1000).unwrap();
        assert!(r.q.iter().all(|&p| p < 1e-18), "max q = {:e}", r.q.iter().cloned().fold(0.0, f64::max));
        assert!((r.survival - 1.0).abs() < 1e-12);
        assert_eq!(classify_hitting_time(&r, overlap(&psi, &rep).unwrap(), 1e-9), HittingTimeVerdict::Infinite {
            never_arrives: overlap(&psi, &rep).unwrap(),
            truncated: r.hitting_time_truncated
        });
    }

    #[test]
    fn identity_coin_on_hexagon_keeps_mass() {
        let g = CatalogGraph::S3Two.build().unwrap();
        let u = build_unitary(&g, identity::<f64>(2).unwrap()).unwrap();
        let proj = final_projector(&g, &[0]).unwrap();
        let rep = iht_subspace(&decompose(&u, 1e-7).unwrap(), &proj, 1e-8).unwrap();
        assert!(rep.total > 0);
        let psi = WalkState::new(rep.iht_basis.column(0).into_owned());
        let r = simulate(&u, &proj, &psi, 500).unwrap();
        assert!(r.survival > 0.5);
    }

    #[test]
    fn rejects_bad_input() {
        let g = build_hypercube(2).unwrap();
        let u = build_unitary(&g, grover::<f64>(2).unwrap()).unwrap();
        let proj = final_projector(&g, &[3]).unwrap();
        let half = WalkState::new(DVector::from_element(8, Cx::new(0.25, 0.0)));
        assert!(matches!(simulate(&u, &proj, &half, 5), Err(MeasuredWalkError::NotNormalized(_))));
        assert_eq!(simulate(&u, &proj, &WalkState::basis(8, 0), 0), Err(MeasuredWalkError::ZeroHorizon));
    }

    #[test]
    fn checkpoints_are_log_spaced() {
        let g = build_hypercube(2).unwrap();
        let u = build_unitary(&g, grover::<f64>(2).unwrap()).unwrap();
        let proj = final_projector(&g, &[3]).unwrap();
        let r = simulate(&u, &proj, &WalkState::basis(8, 0), 100).unwrap();
        let ts: Vec<usize> = r.checkpoints().iter().map(|c| c.0).collect();
        assert_eq!(ts, vec![1, 2, 5, 10, 20, 50, 100]);
    }
}
