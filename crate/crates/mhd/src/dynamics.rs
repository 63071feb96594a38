//! Right-hand side of the projected (u, b) system and the IMEX time stepper.
//!
//! The tendencies are
//!
//! u_t = P[f − u·∇u + μ b·∇b + Div(Γ(|𝓔u|²)𝓔u)] − ½μ₁|k|⁴û
//! b_t = −S|k|²b̂ − μP[u·∇b − b·∇u]
//!
//! The factor ½ in the biharmonic symbol makes (−½μ₁|k|⁴û, û) equal to
//! −μ₁(∂𝓔/∂x_k, ∂𝓔/∂x_k) for divergence-free u. Only the two constant
//! coefficient symbols are treated implicitly.

use std::sync::Arc;

use bipolar_mhd_core::{gamma, strain_rate, PhysicalParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{Grid, RealVectorField, SpectralVectorField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error("time step must be positive, got {0}")]
    BadStep(f64),
    #[error("CFL ratio {ratio:.4} exceeds the limit {limit}")]
    Cfl { ratio: f64, limit: f64 },
    #[error("non-finite values after the step ending at t = {t}")]
    NonFinite { t: f64 },
    #[error("state does not match the stepper grid")]
    GridMismatch,
}

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("step {index}: {source}")]
    Step {
        index: u64,
        #[source]
        source: StepError,
    },
    #[error("observer failed at step {index}: {message}")]
    Observer { index: u64, message: String },
    #[error("end time {t_end} lies before the current time {t}")]
    Backwards { t: f64, t_end: f64 },
}

/// Velocity, magnetic field and time.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: SpectralVectorField,
    pub b: SpectralVectorField,
    pub t: f64,
}

impl State {
    pub fn zero(grid: &Grid) -> Self {
        State {
            u: grid.zeros(),
            b: grid.zeros(),
            t: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.b.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Integrating-factor Euler: v ← e^{L dt}(v + dt N(v)).
    ImexEuler,
    /// Crank–Nicolson on L, Adams–Bashforth 2 on N (Euler on the first step).
    ImexCnab2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub cfl_limit: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            dt: 1e-3,
            scheme: Scheme::ImexEuler,
            cfl_limit: 0.5,
        }
    }
}

/// Time step for which max(μ₁k⁴, Sk²)·dt ≤ 10, the explicit viscous term
/// satisfies Γ_max k²·dt ≤ 1 and a unit velocity has CFL ratio ≤ 0.5.
pub fn default_dt(grid: &Grid, params: &PhysicalParams) -> f64 {
    let k2 = grid.band().map(|i| grid.ksq(i)).fold(0.0, f64::max);
    let stiff = (params.mu1 * k2 * k2).max(params.s_diff * k2);
    let dx = grid.dom().length / grid.resolution() as f64;
    (10.0 / stiff)
        .min(1.0 / (params.gamma_max() * k2))
        .min(0.5 * dx)
}

/// Collocation values shared by all nonlinear terms of one evaluation.
pub(crate) struct Collocated {
    pub up: RealVectorField,
    pub bp: RealVectorField,
    pub gu: Vec<Vec<Vec<f64>>>,
    pub gb: Vec<Vec<Vec<f64>>>,
}

impl Collocated {
    pub fn new(grid: &Grid, u: &SpectralVectorField, b: &SpectralVectorField) -> Self {
        Collocated {
            up: grid.to_physical(u),
            bp: grid.to_physical(b),
            gu: grid.gradient_physical(u),
            gb: grid.gradient_physical(b),
        }
    }
}

/// Strain rate at collocation point `x` from the gradient arrays.
pub(crate) fn strain_at(
    dim: usize,
    grad: &[Vec<Vec<f64>>],
    x: usize,
) -> bipolar_mhd_core::SymTensor {
    let mut g = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..dim {
            g[i][j] = grad[i][j][x];
        }
    }
    strain_rate(dim, &g)
}

/// Upper triangle of a symmetric tensor field, `out[i][j]` for j ≥ i.
pub(crate) fn tensor_buffers(dim: usize, len: usize) -> Vec<Vec<Vec<f64>>> {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if j >= i { vec![0.0; len] } else { Vec::new() })
                .collect()
        })
        .collect()
}

/// Div(Γ(|𝓔u|²)𝓔u), dealiased.
pub(crate) fn stress_divergence(
    grid: &Grid,
    gu: &[Vec<Vec<f64>>],
    params: &PhysicalParams,
) -> SpectralVectorField {
    let dim = grid.dim();
    let mut sigma = tensor_buffers(dim, grid.len());
    for x in 0..grid.len() {
        let e = strain_at(dim, gu, x);
        let g = gamma(e.norm_sq(), params);
        for i in 0..dim {
            for j in i..dim {
                sigma[i][j][x] = g * e.m[i][j];
            }
        }
    }
    grid.tensor_divergence(&sigma)
}

pub(crate) fn velocity_terms(
    grid: &Grid,
    col: &Collocated,
    f: &SpectralVectorField,
    params: &PhysicalParams,
) -> SpectralVectorField {
    let mut out = f.clone();
    out.axpy(-1.0, &grid.advect_with_gradient(&col.up, &col.gu));
    out.axpy(params.mu, &grid.advect_with_gradient(&col.bp, &col.gb));
    out.axpy(1.0, &stress_divergence(grid, &col.gu, params));
    grid.leray_project_in_place(&mut out);
    grid.truncate(&mut out);
    out
}

pub(crate) fn magnetic_terms(
    grid: &Grid,
    col: &Collocated,
    params: &PhysicalParams,
) -> SpectralVectorField {
    let mut out = grid.advect_with_gradient(&col.up, &col.gb);
    out.axpy(-1.0, &grid.advect_with_gradient(&col.bp, &col.gu));
    out.scale_in_place(-params.mu);
    grid.leray_project_in_place(&mut out);
    grid.truncate(&mut out);
    out
}

/// Stiff symbol of the velocity equation, −½μ₁|k|⁴.
pub fn velocity_symbol(k2: f64, params: &PhysicalParams) -> f64 {
    -0.5 * params.mu1 * k2 * k2
}

/// Stiff symbol of the induction equation, −S|k|².
pub fn magnetic_symbol(k2: f64, params: &PhysicalParams) -> f64 {
    -params.s_diff * k2
}

/// Projected velocity tendency; `stiff` adds the −½μ₁|k|⁴ term.
pub fn rhs_velocity(
    grid: &Grid,
    state: &State,
    f: &SpectralVectorField,
    params: &PhysicalParams,
    stiff: bool,
) -> SpectralVectorField {
    let col = Collocated::new(grid, &state.u, &state.b);
    let mut out = velocity_terms(grid, &col, f, params);
    if stiff {
        out.axpy(
            1.0,
            &grid.apply_symbol(&state.u, |k2| velocity_symbol(k2, params)),
        );
    }
    out
}

/// Projected magnetic tendency; `stiff` adds the −S|k|² term.
pub fn rhs_magnetic(
    grid: &Grid,
    state: &State,
    params: &PhysicalParams,
    stiff: bool,
) -> SpectralVectorField {
    let col = Collocated::new(grid, &state.u, &state.b);
    let mut out = magnetic_terms(grid, &col, params);
    if stiff {
        out.axpy(
            1.0,
            &grid.apply_symbol(&state.b, |k2| magnetic_symbol(k2, params)),
        );
    }
    out
}

/// Per-mode multipliers of the linear part of the scheme.
#[derive(Debug, Clone)]
pub(crate) struct LinearFactors {
    /// e^{L dt} for Euler, (1 + L dt/2)/(1 − L dt/2) for Crank–Nicolson.
    pub carry: Vec<f64>,
    /// e^{L dt} for Euler, 1/(1 − L dt/2) for Crank–Nicolson.
    pub forcing: Vec<f64>,
}

impl LinearFactors {
    fn new(grid: &Grid, scheme: Scheme, dt: f64, symbol: impl Fn(f64) -> f64) -> Self {
        let mut carry = Vec::with_capacity(grid.len());
        let mut forcing = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let l = symbol(grid.ksq(idx));
            match scheme {
                Scheme::ImexEuler => {
                    let e = (l * dt).exp();
                    carry.push(e);
                    forcing.push(e);
                }
                Scheme::ImexCnab2 => {
                    let m = 1.0 / (1.0 - 0.5 * l * dt);
                    carry.push((1.0 + 0.5 * l * dt) * m);
                    forcing.push(m);
                }
            }
        }
        LinearFactors { carry, forcing }
    }

    /// v ← carry·v + forcing·dt·(w₀N + w₁N_prev).
    fn apply(
        &self,
        v: &mut SpectralVectorField,
        dt: f64,
        n: &SpectralVectorField,
        prev: Option<&SpectralVectorField>,
    ) {
        for (c, comp) in v.comps.iter_mut().enumerate() {
            let nc = &n.comps[c];
            for (idx, x) in comp.iter_mut().enumerate() {
                let drive: Complex64 = match prev {
                    Some(p) => 1.5 * nc[idx] - 0.5 * p.comps[c][idx],
                    None => nc[idx],
                };
                *x = self.carry[idx] * *x + self.forcing[idx] * dt * drive;
            }
        }
    }
}

/// Explicit tendencies kept from the previous step by the two-step scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    pub u: SpectralVectorField,
    pub b: SpectralVectorField,
}

/// Advances states with a fixed scheme, step size and forcing.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Arc<Grid>,
    params: PhysicalParams,
    forcing: SpectralVectorField,
    cfg: StepperConfig,
    lin_u: LinearFactors,
    lin_b: LinearFactors,
    history: Option<History>,
}

impl Stepper {
    pub fn new(
        grid: Arc<Grid>,
        params: PhysicalParams,
        forcing: SpectralVectorField,
        cfg: StepperConfig,
    ) -> Result<Self, StepError> {
        if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
            return Err(StepError::BadStep(cfg.dt));
        }
        if grid.check(&forcing).is_err() {
            return Err(StepError::GridMismatch);
        }
        let lin_u =
            LinearFactors::new(&grid, cfg.scheme, cfg.dt, |k2| velocity_symbol(k2, &params));
        let lin_b =
            LinearFactors::new(&grid, cfg.scheme, cfg.dt, |k2| magnetic_symbol(k2, &params));
        Ok(Stepper {
            grid,
            params,
            forcing,
            cfg,
            lin_u,
            lin_b,
            history: None,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn forcing(&self) -> &SpectralVectorField {
        &self.forcing
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    pub fn history(&self) -> Option<&History> {
        self.history.as_ref()
    }

    pub fn set_history(&mut self, history: Option<History>) {
        self.history = history;
    }

    /// max|u|·dt/dx.
    pub fn cfl_ratio(&self, up: &RealVectorField) -> f64 {
        let dx = self.grid.dom().length / self.grid.resolution() as f64;
        up.max_magnitude() * self.cfg.dt / dx
    }

    pub(crate) fn explicit(&self, col: &Collocated) -> (SpectralVectorField, SpectralVectorField) {
        (
            velocity_terms(&self.grid, col, &self.forcing, &self.params),
            magnetic_terms(&self.grid, col, &self.params),
        )
    }

    /// Applies the linear part of the scheme to a pair given its explicit
    /// tendencies now and (for the two-step scheme) one step earlier.
    pub(crate) fn advance_pair(
        &self,
        u: &mut SpectralVectorField,
        b: &mut SpectralVectorField,
        nu: &SpectralVectorField,
        nb: &SpectralVectorField,
        prev: Option<&History>,
    ) {
        let dt = self.cfg.dt;
        let prev = match self.cfg.scheme {
            Scheme::ImexEuler => None,
            Scheme::ImexCnab2 => prev,
        };
        self.lin_u.apply(u, dt, nu, prev.map(|h| &h.u));
        self.lin_b.apply(b, dt, nb, prev.map(|h| &h.b));
        for v in [u, b] {
            self.grid.leray_project_in_place(v);
            self.grid.truncate(v);
        }
    }

    /// Checks the CFL condition and returns the collocated values of `state`.
    pub(crate) fn prepare(&self, state: &State) -> Result<Collocated, StepError> {
        if self.grid.check(&state.u).is_err() || self.grid.check(&state.b).is_err() {
            return Err(StepError::GridMismatch);
        }
        let col = Collocated::new(&self.grid, &state.u, &state.b);
        let ratio = self.cfl_ratio(&col.up);
        if !(ratio <= self.cfg.cfl_limit) {
            return Err(StepError::Cfl {
                ratio,
                limit: self.cfg.cfl_limit,
            });
        }
        Ok(col)
    }

    pub(crate) fn finish(
        &mut self,
        state: &mut State,
        nu: SpectralVectorField,
        nb: SpectralVectorField,
    ) -> Result<(), StepError> {
        let prev = self.history.take();
        self.advance_pair(&mut state.u, &mut state.b, &nu, &nb, prev.as_ref());
        state.t += self.cfg.dt;
        if self.cfg.scheme == Scheme::ImexCnab2 {
            self.history = Some(History { u: nu, b: nb });
        }
        if !state.is_finite() {
            return Err(StepError::NonFinite { t: state.t });
        }
        Ok(())
    }

    /// Advances `state` by one step of size dt.
    pub fn step(&mut self, state: &mut State) -> Result<(), StepError> {
        let col = self.prepare(state)?;
        let (nu, nb) = self.explicit(&col);
        self.finish(state, nu, nb)
    }
}

/// Callback invoked by [`integrate`] every `stride` steps (and on the
/// initial state).
pub trait Observer {
    fn stride(&self) -> u64;
    fn observe(&mut self, step: u64, state: &State, stepper: &Stepper) -> Result<(), String>;
}

/// Number of steps of size dt needed to reach `t_end` from `t`.
pub fn steps_to(t: f64, t_end: f64, dt: f64) -> u64 {
    let n = (t_end - t) / dt;
    // tolerate the rounding of t_end/dt when t_end is a multiple of dt
    (n - 1e-9).ceil().max(0.0) as u64
}

/// Steps `state` until `t_end`, calling each observer at step 0 and every
/// multiple of its stride. Returns the number of steps taken.
pub fn integrate(
    stepper: &mut Stepper,
    state: &mut State,
    t_end: f64,
    observers: &mut [&mut dyn Observer],
) -> Result<u64, IntegrateError> {
    if t_end < state.t {
        return Err(IntegrateError::Backwards { t: state.t, t_end });
    }
    let total = steps_to(state.t, t_end, stepper.config().dt);
    run_steps(stepper, state, total, observers)
}

/// Takes exactly `total` steps with the same observer contract as [`integrate`].
pub fn run_steps(
    stepper: &mut Stepper,
    state: &mut State,
    total: u64,
    observers: &mut [&mut dyn Observer],
) -> Result<u64, IntegrateError> {
    let notify = |obs: &mut [&mut dyn Observer], index: u64, state: &State, stepper: &Stepper| {
        for o in obs.iter_mut() {
            let stride = o.stride().max(1);
            if index.is_multiple_of(stride) {
                o.observe(index, state, stepper)
                    .map_err(|message| IntegrateError::Observer { index, message })?;
            }
        }
        Ok::<(), IntegrateError>(())
    };
    notify(observers, 0, state, stepper)?;
    for index in 1..=total {
        stepper
            .step(state)
            .map_err(|source| IntegrateError::Step { index, source })?;
        notify(observers, index, state, stepper)?;
    }
    Ok(total)
}
