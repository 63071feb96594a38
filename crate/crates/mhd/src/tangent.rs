//! Linearized dynamics along a base trajectory, and the finite-difference
//! and Lipschitz experiments built on it.
//!
//! The tangent tendencies are the exact derivative of the discrete explicit
//! terms, and the tangent is advanced by the same linear scheme as the base,
//! so the tangent map is the Jacobian of the discrete step.

use bipolar_mhd_core::{stress_derivative, PhysicalParams};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{
    magnetic_symbol, steps_to, strain_at, tensor_buffers, velocity_symbol, Collocated, History,
    Scheme, State, StepError, Stepper,
};
use crate::spectral::{Grid, SpectralVectorField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TangentError {
    #[error("base and tangent disagree on {0}")]
    Mismatch(&'static str),
    #[error("perturbation direction is zero")]
    ZeroDirection,
    #[error("direction must satisfy |xi| + |eta| = 1, got {0}")]
    NotNormalized(f64),
    #[error("step sizes must be positive and strictly decreasing")]
    BadSteps,
    #[error("end time {0} must be nonnegative")]
    BadHorizon(f64),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Perturbation pair (ξ, η) and its time; `history` holds the previous
/// explicit tendencies for the two-step scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentState {
    pub xi: SpectralVectorField,
    pub eta: SpectralVectorField,
    pub t: f64,
    pub history: Option<History>,
}

impl TangentState {
    pub fn new(xi: SpectralVectorField, eta: SpectralVectorField, t: f64) -> Self {
        TangentState {
            xi,
            eta,
            t,
            history: None,
        }
    }

    pub fn zero(grid: &Grid, t: f64) -> Self {
        TangentState::new(grid.zeros(), grid.zeros(), t)
    }

    pub fn scaled(&self, s: f64) -> Self {
        TangentState {
            xi: self.xi.scaled(s),
            eta: self.eta.scaled(s),
            t: self.t,
            history: self.history.as_ref().map(|h| History {
                u: h.u.scaled(s),
                b: h.b.scaled(s),
            }),
        }
    }

    /// |ξ| + |η| in L².
    pub fn sum_norm(&self, grid: &Grid) -> f64 {
        grid.inner(&self.xi, &self.xi).sqrt() + grid.inner(&self.eta, &self.eta).sqrt()
    }

    /// (|ξ|² + |η|²)^{1/2}.
    pub fn rss_norm(&self, grid: &Grid) -> f64 {
        pair_inner(grid, self, self).sqrt()
    }
}

/// (ξ₁, ξ₂) + (η₁, η₂), the L² inner product of pairs.
pub fn pair_inner(grid: &Grid, a: &TangentState, b: &TangentState) -> f64 {
    grid.inner(&a.xi, &b.xi) + grid.inner(&a.eta, &b.eta)
}

/// Scales `dir` so that |ξ| + |η| = 1.
pub fn normalize_direction(grid: &Grid, dir: &TangentState) -> Result<TangentState, TangentError> {
    let n = dir.sum_norm(grid);
    if n == 0.0 {
        return Err(TangentError::ZeroDirection);
    }
    Ok(dir.scaled(1.0 / n))
}

/// Explicit part of the tangent tendency at the base values `col`.
pub(crate) fn tangent_explicit(
    grid: &Grid,
    col: &Collocated,
    tan: &TangentState,
    params: &PhysicalParams,
) -> (SpectralVectorField, SpectralVectorField) {
    let tc = Collocated::new(grid, &tan.xi, &tan.eta);
    let dim = grid.dim();

    let mut sigma = tensor_buffers(dim, grid.len());
    for x in 0..grid.len() {
        let e = strain_at(dim, &col.gu, x);
        let d = strain_at(dim, &tc.gu, x);
        let s = stress_derivative(&e, &d, params);
        for i in 0..dim {
            for j in i..dim {
                sigma[i][j][x] = s.m[i][j];
            }
        }
    }

    let adv =
        |a: &crate::spectral::RealVectorField, g: &[Vec<Vec<f64>>]| grid.advect_with_gradient(a, g);
    let mut du = grid.tensor_divergence(&sigma);
    du.axpy(-1.0, &adv(&col.up, &tc.gu));
    du.axpy(-1.0, &adv(&tc.up, &col.gu));
    du.axpy(params.mu, &adv(&tc.bp, &col.gb));
    du.axpy(params.mu, &adv(&col.bp, &tc.gb));
    grid.leray_project_in_place(&mut du);
    grid.truncate(&mut du);

    let mut db = adv(&col.up, &tc.gb);
    db.axpy(1.0, &adv(&tc.up, &col.gb));
    db.axpy(-1.0, &adv(&tc.bp, &col.gu));
    db.axpy(-1.0, &adv(&col.bp, &tc.gu));
    db.scale_in_place(-params.mu);
    grid.leray_project_in_place(&mut db);
    grid.truncate(&mut db);
    (du, db)
}

fn check_pair(grid: &Grid, base: &State, tan: &TangentState) -> Result<(), TangentError> {
    for v in [&base.u, &base.b, &tan.xi, &tan.eta] {
        grid.check(v).map_err(|_| TangentError::Mismatch("grid"))?;
    }
    if (base.t - tan.t).abs() > 1e-12 * base.t.abs().max(1.0) {
        return Err(TangentError::Mismatch("time"));
    }
    Ok(())
}

/// Full projected tangent tendencies (ξ_t, η_t) including the stiff symbols.
pub fn tangent_rhs(
    grid: &Grid,
    base: &State,
    tan: &TangentState,
    params: &PhysicalParams,
) -> Result<(SpectralVectorField, SpectralVectorField), TangentError> {
    check_pair(grid, base, tan)?;
    let col = Collocated::new(grid, &base.u, &base.b);
    let (mut du, mut db) = tangent_explicit(grid, &col, tan, params);
    du.axpy(
        1.0,
        &grid.apply_symbol(&tan.xi, |k2| velocity_symbol(k2, params)),
    );
    db.axpy(
        1.0,
        &grid.apply_symbol(&tan.eta, |k2| magnetic_symbol(k2, params)),
    );
    Ok((du, db))
}

fn advance_tangent(
    stepper: &Stepper,
    tan: &mut TangentState,
    du: SpectralVectorField,
    db: SpectralVectorField,
) {
    let prev = tan.history.take();
    stepper.advance_pair(&mut tan.xi, &mut tan.eta, &du, &db, prev.as_ref());
    tan.t += stepper.config().dt;
    if stepper.config().scheme == Scheme::ImexCnab2 {
        tan.history = Some(History { u: du, b: db });
    }
}

/// Advances base and tangent together by one step. The base update is the
/// same computation as [`Stepper::step`].
pub fn step_pair(
    stepper: &mut Stepper,
    base: &mut State,
    tan: &mut TangentState,
) -> Result<(), TangentError> {
    step_ensemble(stepper, base, std::slice::from_mut(tan))
}

/// Advances the base and every tangent in `tans` by one step; tangents are
/// processed in parallel.
pub fn step_ensemble(
    stepper: &mut Stepper,
    base: &mut State,
    tans: &mut [TangentState],
) -> Result<(), TangentError> {
    let grid = stepper.grid().clone();
    for tan in tans.iter() {
        check_pair(&grid, base, tan)?;
    }
    let col = stepper.prepare(base)?;
    let (nu, nb) = stepper.explicit(&col);
    let params = *stepper.params();
    let shared: &Stepper = stepper;
    tans.par_iter_mut().for_each(|tan| {
        let (du, db) = tangent_explicit(&grid, &col, tan, &params);
        advance_tangent(shared, tan, du, db);
    });
    stepper.finish(base, nu, nb)?;
    Ok(())
}

/// One row of [`fd_consistency`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdEntry {
    pub h: f64,
    /// |S(T)(x₀ + h·dir) − S(T)x₀ − h·𝔏dir| with the root-sum-square pair norm.
    pub remainder_rss: Option<f64>,
    /// Same remainder with the additive norm |Δu| + |Δb|.
    pub remainder_sum: Option<f64>,
    /// remainder_rss / (h·|dir|_rss).
    pub quotient_rss: Option<f64>,
    /// remainder_sum / (h·(|ξ| + |η|)) = remainder_sum / h.
    pub quotient_sum: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub t_end: f64,
    pub steps: u64,
    pub entries: Vec<FdEntry>,
    /// Least-squares slope of log remainder_rss against log h; `None` with
    /// fewer than two successful entries.
    pub slope: Option<f64>,
    /// True when quotient_rss strictly decreases along the h list.
    pub quotient_monotone: bool,
}

/// Least-squares slope of y against x.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Compares the nonlinear response to an initial perturbation h·dir with
/// the tangent prediction at time `t_end` for each h in `h_list`.
pub fn fd_consistency(
    stepper: &Stepper,
    base0: &State,
    dir: &TangentState,
    h_list: &[f64],
    t_end: f64,
) -> Result<ConsistencyReport, TangentError> {
    let grid = stepper.grid().clone();
    if h_list.is_empty()
        || h_list.iter().any(|&h| !(h > 0.0))
        || h_list.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(TangentError::BadSteps);
    }
    if !(t_end >= base0.t) {
        return Err(TangentError::BadHorizon(t_end));
    }
    let norm = dir.sum_norm(&grid);
    if norm == 0.0 {
        return Err(TangentError::ZeroDirection);
    }
    if (norm - 1.0).abs() > 1e-9 {
        return Err(TangentError::NotNormalized(norm));
    }
    check_pair(&grid, base0, dir)?;

    let steps = steps_to(base0.t, t_end, stepper.config().dt);
    let mut base_stepper = stepper.clone();
    base_stepper.set_history(None);
    let mut base = base0.clone();
    let mut tan = dir.clone();
    tan.history = None;
    for _ in 0..steps {
        step_pair(&mut base_stepper, &mut base, &mut tan)?;
    }
    let dir_rss = dir.rss_norm(&grid);

    let entries: Vec<FdEntry> = h_list
        .par_iter()
        .map(|&h| {
            let mut st = stepper.clone();
            st.set_history(None);
            let mut s = base0.clone();
            s.u.axpy(h, &dir.xi);
            s.b.axpy(h, &dir.eta);
            let mut failure = None;
            for index in 1..=steps {
                if let Err(e) = st.step(&mut s) {
                    failure = Some(format!("step {index}: {e}"));
                    break;
                }
            }
            if failure.is_some() {
                return FdEntry {
                    h,
                    remainder_rss: None,
                    remainder_sum: None,
                    quotient_rss: None,
                    quotient_sum: None,
                    failure,
                };
            }
            let mut du = s.u.sub(&base.u);
            du.axpy(-h, &tan.xi);
            let mut db = s.b.sub(&base.b);
            db.axpy(-h, &tan.eta);
            let nu = grid.inner(&du, &du);
            let nb = grid.inner(&db, &db);
            let rss = (nu + nb).sqrt();
            let sum = nu.sqrt() + nb.sqrt();
            FdEntry {
                h,
                remainder_rss: Some(rss),
                remainder_sum: Some(sum),
                quotient_rss: Some(rss / (h * dir_rss)),
                quotient_sum: Some(sum / h),
                failure: None,
            }
        })
        .collect();

    let points: Vec<(f64, f64)> = entries
        .iter()
        .filter_map(|e| {
            e.remainder_rss
                .filter(|r| *r > 0.0)
                .map(|r| (e.h.ln(), r.ln()))
        })
        .collect();
    let quotients: Vec<Option<f64>> = entries.iter().map(|e| e.quotient_rss).collect();
    let quotient_monotone = quotients.iter().all(|q| q.is_some())
        && quotients.windows(2).all(|w| w[1].unwrap() < w[0].unwrap());

    Ok(ConsistencyReport {
        t_end: base.t,
        steps,
        entries,
        slope: fit_slope(&points),
        quotient_monotone,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub times: Vec<f64>,
    /// Φ(t)/Φ(0) with Φ = |w|² + |m|² the squared distance of the pair.
    pub phi_ratio: Vec<f64>,
    /// max over recorded t > 0 of ln(Φ(t)/Φ(0))/t.
    pub eta_hat: f64,
}

/// Evolves `base0` and `base0 + pert0` to `t_end` and records the growth of
/// their squared distance every `stride` steps.
pub fn lipschitz_envelope(
    stepper: &Stepper,
    base0: &State,
    pert0: &TangentState,
    t_end: f64,
    stride: u64,
) -> Result<EnvelopeReport, TangentError> {
    let grid = stepper.grid().clone();
    if pert0.rss_norm(&grid) == 0.0 {
        return Err(TangentError::ZeroDirection);
    }
    if !(t_end >= base0.t) {
        return Err(TangentError::BadHorizon(t_end));
    }
    check_pair(&grid, base0, pert0)?;
    let mut sa = stepper.clone();
    sa.set_history(None);
    let mut sb = sa.clone();
    let mut a = base0.clone();
    let mut b = base0.clone();
    b.u.axpy(1.0, &pert0.xi);
    b.b.axpy(1.0, &pert0.eta);

    let phi = |a: &State, b: &State| {
        let du = b.u.sub(&a.u);
        let db = b.b.sub(&a.b);
        grid.inner(&du, &du) + grid.inner(&db, &db)
    };
    let phi0 = phi(&a, &b);
    let mut times = vec![0.0];
    let mut phi_ratio = vec![1.0];
    let mut eta_hat = f64::NEG_INFINITY;
    let steps = steps_to(base0.t, t_end, stepper.config().dt);
    let stride = stride.max(1);
    for index in 1..=steps {
        sa.step(&mut a)?;
        sb.step(&mut b)?;
        if index % stride == 0 || index == steps {
            let t = a.t - base0.t;
            let ratio = phi(&a, &b) / phi0;
            times.push(t);
            phi_ratio.push(ratio);
            eta_hat = eta_hat.max(ratio.ln() / t);
        }
    }
    if steps == 0 {
        eta_hat = 0.0;
    }
    Ok(EnvelopeReport {
        times,
        phi_ratio,
        eta_hat,
    })
}
