//! Energy budget records, the absorbing-ball check, the trace functional
//! q_m over an orthonormalized tangent frame, and long-run time averages.

use bipolar_mhd_core::{
    absorbing_radius_sq, gamma, gronwall_envelope, DomainConstants, PhysicalParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{strain_at, Observer, State, Stepper};
use crate::spectral::{Grid, SpectralVectorField};
use crate::tangent::{pair_inner, step_ensemble, tangent_rhs, TangentError, TangentState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("ensemble larger than space: m = {m} but the discrete space has dimension {space}")]
    EnsembleTooLarge { m: usize, space: usize },
    #[error("ensemble size must be at least 1")]
    EmptyEnsemble,
    #[error("tangent frame lost rank at step {step} (member {member})")]
    RankDeficient { step: u64, member: usize },
    #[error("energy series is empty")]
    EmptySeries,
    #[error(transparent)]
    Tangent(#[from] TangentError),
}

/// One row of the energy budget: y = |u|² + |b|² and the terms of
/// d(½y)/dt = work − diss_bipolar − diss_gamma − diss_mag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub t: f64,
    pub y: f64,
    /// Full H² norm of u, squared.
    pub h2_u: f64,
    /// |curl b|².
    pub v2_b: f64,
    /// μ₁(∂𝓔/∂x_k, ∂𝓔/∂x_k).
    pub diss_bipolar: f64,
    /// (Γ(|𝓔|²)𝓔, 𝓔) by collocation quadrature.
    pub diss_gamma: f64,
    /// S|curl b|².
    pub diss_mag: f64,
    /// (f, u).
    pub work: f64,
}

impl EnergyRecord {
    /// work − diss_bipolar − diss_gamma − diss_mag.
    pub fn balance(&self) -> f64 {
        self.work - self.diss_bipolar - self.diss_gamma - self.diss_mag
    }
}

/// (Γ(|𝓔u|²)𝓔u, 𝓔u) by collocation quadrature.
pub fn gamma_dissipation(grid: &Grid, u: &SpectralVectorField, params: &PhysicalParams) -> f64 {
    let gu = grid.gradient_physical(u);
    let dim = grid.dim();
    let mut s = 0.0;
    for x in 0..grid.len() {
        let e = strain_at(dim, &gu, x);
        let e2 = e.norm_sq();
        s += gamma(e2, params) * e2;
    }
    s * grid.cell_volume()
}

pub fn record_energy(
    grid: &Grid,
    state: &State,
    f: &SpectralVectorField,
    params: &PhysicalParams,
) -> EnergyRecord {
    let u2 = grid.weighted_sum(&state.u, |_| 1.0);
    let b2 = grid.weighted_sum(&state.b, |_| 1.0);
    let v2_b = grid.weighted_sum(&state.b, |k2| k2);
    EnergyRecord {
        t: state.t,
        y: u2 + b2,
        h2_u: grid.weighted_sum(&state.u, |k2| 1.0 + k2 + k2 * k2),
        v2_b,
        diss_bipolar: params.mu1 * grid.weighted_sum(&state.u, |k2| 0.5 * k2 * k2),
        diss_gamma: gamma_dissipation(grid, &state.u, params),
        diss_mag: params.s_diff * v2_b,
        work: grid.inner(f, &state.u),
    }
}

/// Observer collecting an [`EnergyRecord`] every `stride` steps.
#[derive(Debug, Clone)]
pub struct EnergyRecorder {
    pub stride: u64,
    pub records: Vec<EnergyRecord>,
}

impl EnergyRecorder {
    pub fn new(stride: u64) -> Self {
        EnergyRecorder {
            stride: stride.max(1),
            records: Vec::new(),
        }
    }
}

impl Observer for EnergyRecorder {
    fn stride(&self) -> u64 {
        self.stride
    }

    fn observe(&mut self, _step: u64, state: &State, stepper: &Stepper) -> Result<(), String> {
        self.records.push(record_energy(
            stepper.grid(),
            state,
            stepper.forcing(),
            stepper.params(),
        ));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingReport {
    pub rho1_sq: f64,
    /// First recorded time after which y stays within ρ₁² (+ tolerance).
    pub absorbed_at: Option<f64>,
    /// Records with y above the Gronwall envelope started from the first record.
    pub envelope_violations: usize,
    /// max of y/envelope over the series.
    pub max_envelope_ratio: f64,
    pub samples: usize,
}

/// Checks a recorded series against the absorbing ball and the Gronwall
/// envelope. `tol` is added to ρ₁² when testing membership in the ball.
pub fn absorbing_check(
    records: &[EnergyRecord],
    params: &PhysicalParams,
    constants: &DomainConstants,
    tol: f64,
) -> Result<AbsorbingReport, AnalysisError> {
    let first = records.first().ok_or(AnalysisError::EmptySeries)?;
    let rho1_sq = absorbing_radius_sq(params, constants);
    let mut absorbed_at = None;
    for r in records.iter().rev() {
        if r.y <= rho1_sq + tol {
            absorbed_at = Some(r.t);
        } else {
            break;
        }
    }
    let mut envelope_violations = 0;
    let mut max_envelope_ratio: f64 = 0.0;
    for r in records {
        let env = gronwall_envelope(first.y, params, constants, r.t - first.t);
        if r.y > env * (1.0 + 1e-12) {
            envelope_violations += 1;
        }
        if env > 0.0 {
            max_envelope_ratio = max_envelope_ratio.max(r.y / env);
        }
    }
    Ok(AbsorbingReport {
        rho1_sq,
        absorbed_at,
        envelope_violations,
        max_envelope_ratio,
        samples: records.len(),
    })
}

/// Trapezoidal time averages of h2_u and v2_b over the series; a single
/// record returns its own values.
pub fn time_average_norms(records: &[EnergyRecord]) -> Result<(f64, f64), AnalysisError> {
    running_averages(records)?
        .last()
        .map(|&(_, a, b)| (a, b))
        .ok_or(AnalysisError::EmptySeries)
}

/// (t, average of h2_u, average of v2_b) over [t₀, t] for every record.
pub fn running_averages(records: &[EnergyRecord]) -> Result<Vec<(f64, f64, f64)>, AnalysisError> {
    let first = records.first().ok_or(AnalysisError::EmptySeries)?;
    let mut out = vec![(first.t, first.h2_u, first.v2_b)];
    let (mut ih, mut iv) = (0.0, 0.0);
    for w in records.windows(2) {
        let dt = w[1].t - w[0].t;
        ih += 0.5 * dt * (w[0].h2_u + w[1].h2_u);
        iv += 0.5 * dt * (w[0].v2_b + w[1].v2_b);
        let span = w[1].t - first.t;
        if span > 0.0 {
            out.push((w[1].t, ih / span, iv / span));
        } else {
            out.push((w[1].t, w[1].h2_u, w[1].v2_b));
        }
    }
    Ok(out)
}

/// Sorted dissipation rates of the tangent generator at the zero state, one
/// entry per real dimension: ½μ₁|k|⁴ + ½Γ(0)|k|² for velocity modes and S|k|²
/// for magnetic modes.
pub fn zero_state_symbols(grid: &Grid, params: &PhysicalParams) -> Vec<f64> {
    let g0 = gamma(0.0, params);
    let reps = grid.dim() - 1;
    let mut out = Vec::new();
    for idx in grid.band() {
        let k2 = grid.ksq(idx);
        for _ in 0..reps {
            out.push(0.5 * params.mu1 * k2 * k2 + 0.5 * g0 * k2);
            out.push(params.s_diff * k2);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Sum of the m smallest zero-state dissipation rates.
pub fn zero_state_qm(grid: &Grid, params: &PhysicalParams, m: usize) -> Result<f64, AnalysisError> {
    let sym = zero_state_symbols(grid, params);
    if m > sym.len() {
        return Err(AnalysisError::EnsembleTooLarge {
            m,
            space: sym.len(),
        });
    }
    Ok(sym[..m].iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub m: usize,
    /// Steps between re-orthonormalizations (and trace samples).
    pub reortho_stride: u64,
    /// Steps taken before accumulation starts.
    pub warmup_steps: u64,
    /// Steps over which the trace is averaged.
    pub steps: u64,
    pub seed: u64,
}

/// Finite-time, single-trajectory estimate of q_m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEstimate {
    pub m: usize,
    /// Time average of Σᵢ −(𝔏Φᵢ, Φᵢ) over the orthonormalized frames.
    pub q_m: f64,
    pub samples: u64,
    pub t_span: f64,
    /// (1/t)Σ ln|R_ii|, the growth rate of m-volumes (Lyapunov-sum proxy).
    pub lyapunov_sum: f64,
    /// The individual trace samples.
    pub series: Vec<f64>,
}

fn tan_axpy(a: &mut TangentState, s: f64, b: &TangentState) {
    a.xi.axpy(s, &b.xi);
    a.eta.axpy(s, &b.eta);
    if let (Some(ha), Some(hb)) = (a.history.as_mut(), b.history.as_ref()) {
        ha.u.axpy(s, &hb.u);
        ha.b.axpy(s, &hb.b);
    }
}

fn tan_scale(a: &mut TangentState, s: f64) {
    *a = a.scaled(s);
}

/// Modified Gram–Schmidt in the pair inner product; returns the diagonal of
/// R. Stored two-step histories are transformed along with the frame.
pub fn orthonormalize(
    grid: &Grid,
    frame: &mut [TangentState],
    step: u64,
) -> Result<Vec<f64>, AnalysisError> {
    let mut diag = Vec::with_capacity(frame.len());
    for i in 0..frame.len() {
        let (done, rest) = frame.split_at_mut(i);
        let v = &mut rest[0];
        let before = pair_inner(grid, v, v).sqrt();
        for q in done.iter() {
            let r = pair_inner(grid, q, v);
            tan_axpy(v, -r, q);
        }
        let norm = pair_inner(grid, v, v).sqrt();
        if !(norm > 1e-12 * before) || norm == 0.0 {
            return Err(AnalysisError::RankDeficient { step, member: i });
        }
        tan_scale(v, 1.0 / norm);
        diag.push(norm);
    }
    Ok(diag)
}

/// Σᵢ −(𝔏Φᵢ, Φᵢ) for the frame at the current base state.
pub fn frame_trace(
    grid: &Grid,
    base: &State,
    frame: &[TangentState],
    params: &PhysicalParams,
) -> Result<f64, AnalysisError> {
    let parts: Vec<Result<f64, TangentError>> = frame
        .par_iter()
        .map(|phi| {
            let (du, db) = tangent_rhs(grid, base, phi, params)?;
            Ok(-(grid.inner(&du, &phi.xi) + grid.inner(&db, &phi.eta)))
        })
        .collect();
    let mut s = 0.0;
    for p in parts {
        s += p?;
    }
    Ok(s)
}

/// Random initial frame of `m` tangent pairs drawn from `seed`.
pub fn random_frame(grid: &Grid, m: usize, t: f64, seed: u64) -> Vec<TangentState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = grid.band().map(|i| grid.ksq(i)).fold(0.0, f64::max).sqrt();
    (0..m)
        .map(|_| {
            let xi = grid.random_solenoidal(&mut rng, kmax);
            let eta = grid.random_solenoidal(&mut rng, kmax);
            TangentState::new(xi, eta, t)
        })
        .collect()
}

/// Estimates q_m along the trajectory of `base`, which is advanced in place.
pub fn trace_qm(
    stepper: &mut Stepper,
    base: &mut State,
    cfg: &TraceConfig,
) -> Result<TraceEstimate, AnalysisError> {
    let grid = stepper.grid().clone();
    if cfg.m == 0 {
        return Err(AnalysisError::EmptyEnsemble);
    }
    let space = grid.pair_space_dim();
    if cfg.m > space {
        return Err(AnalysisError::EnsembleTooLarge { m: cfg.m, space });
    }
    let stride = cfg.reortho_stride.max(1);
    let params = *stepper.params();
    let mut frame = random_frame(&grid, cfg.m, base.t, cfg.seed);
    orthonormalize(&grid, &mut frame, 0)?;

    let mut series = Vec::new();
    let mut log_sum = 0.0;
    let mut t_start = base.t;
    if cfg.warmup_steps == 0 {
        series.push(frame_trace(&grid, base, &frame, &params)?);
    }
    let total = cfg.warmup_steps + cfg.steps;
    for step in 1..=total {
        step_ensemble(stepper, base, &mut frame)?;
        let accumulating = step > cfg.warmup_steps;
        if step % stride == 0 || step == cfg.warmup_steps || step == total {
            let diag = orthonormalize(&grid, &mut frame, step)?;
            if accumulating {
                log_sum += diag.iter().map(|r| r.ln()).sum::<f64>();
            }
            if step == cfg.warmup_steps {
                t_start = base.t;
            }
            if step >= cfg.warmup_steps {
                series.push(frame_trace(&grid, base, &frame, &params)?);
            }
        }
    }
    let t_span = base.t - t_start;
    let q_m = series.iter().sum::<f64>() / series.len() as f64;
    Ok(TraceEstimate {
        m: cfg.m,
        q_m,
        samples: series.len() as u64,
        t_span,
        lyapunov_sum: if t_span > 0.0 { log_sum / t_span } else { 0.0 },
        series,
    })
}
