//! Subcommand bodies. Machine-readable output goes to `out` as NDJSON;
//! tables, warnings and summaries go to stderr.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use bipolar_mhd::analysis::{
    absorbing_check, trace_qm, EnergyRecorder, TraceConfig, TraceEstimate,
};
use bipolar_mhd::checkpoint::write_checkpoint;
use bipolar_mhd::config::RunConfig;
use bipolar_mhd::dynamics::{integrate, Observer, State, Stepper};
use bipolar_mhd::output::{write_energy_csv, write_ndjson};
use bipolar_mhd::spectral::Grid;
use bipolar_mhd::tangent::{fd_consistency, normalize_direction, TangentState};
use bipolar_mhd_core::{
    dimension_bound, gamma_prime, kappa_chain, DimensionBoundReport, GammaPrimeBranch, KappaReport,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Output record of `bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    #[serde(flatten)]
    pub bound: DimensionBoundReport,
    pub kappa: Option<KappaReport>,
    pub kappa_error: Option<String>,
}

#[derive(Debug, Serialize)]
struct TangentSummary {
    t_end: f64,
    steps: u64,
    slope: Option<f64>,
    quotient_monotone: bool,
}

#[derive(Debug, Serialize)]
struct Comparison {
    m: usize,
    q_m: f64,
    lyapunov_sum: f64,
    gamma_prime: f64,
    gamma_prime_branch: GammaPrimeBranch,
    lambda_big: f64,
    m_bound: u64,
}

fn write_checkpoint_file(path: &Path, state: &State, stepper: &Stepper) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        write_checkpoint(&mut w, state, stepper.params(), stepper.history())?;
        w.flush()?;
    }
    fs::rename(tmp, path)
}

struct CheckpointWriter<'a> {
    stride: u64,
    path: &'a Path,
}

impl Observer for CheckpointWriter<'_> {
    fn stride(&self) -> u64 {
        self.stride
    }

    fn observe(&mut self, step: u64, state: &State, stepper: &Stepper) -> Result<(), String> {
        if step == 0 {
            return Ok(());
        }
        write_checkpoint_file(self.path, state, stepper).map_err(|e| e.to_string())
    }
}

/// Builds the stepper and the initial state, restoring any stored history.
fn setup(cfg: &RunConfig) -> Result<(Stepper, State)> {
    let grid = Arc::new(Grid::new(cfg.domain));
    let forcing = cfg.forcing_field(&grid);
    let step_cfg = cfg.stepper_config(&grid);
    let mut stepper = Stepper::new(grid.clone(), cfg.physics, forcing, step_cfg)?;
    let (state, ck) = cfg.initial_state(&grid)?;
    if let Some(ck) = ck {
        if ck.params != cfg.physics {
            eprintln!("warning: checkpoint parameters differ from the configured ones");
        }
        stepper.set_history(ck.history);
    }
    Ok((stepper, state))
}

/// Advances the base alone by `duration`.
fn transient(stepper: &mut Stepper, state: &mut State, duration: f64) -> Result<()> {
    if duration > 0.0 {
        integrate(stepper, state, state.t + duration, &mut [])?;
    }
    Ok(())
}

pub fn simulate(cfg: &RunConfig, out: &mut impl Write) -> Result<()> {
    let (mut stepper, mut state) = setup(cfg)?;
    let dir = &cfg.output.dir;
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let ck_path = dir.join("checkpoint.bin");
    let mut recorder = EnergyRecorder::new(cfg.output.energy_stride);
    let mut ck_writer = CheckpointWriter {
        stride: cfg.output.checkpoint_stride,
        path: &ck_path,
    };
    let t_end = state.t + cfg.simulate.t_end;
    let steps = if cfg.output.checkpoint_stride > 0 {
        integrate(
            &mut stepper,
            &mut state,
            t_end,
            &mut [&mut recorder, &mut ck_writer],
        )?
    } else {
        integrate(&mut stepper, &mut state, t_end, &mut [&mut recorder])?
    };
    let mut records = recorder.records;
    if !steps.is_multiple_of(cfg.output.energy_stride) {
        records.push(bipolar_mhd::analysis::record_energy(
            stepper.grid(),
            &state,
            stepper.forcing(),
            stepper.params(),
        ));
    }
    write_checkpoint_file(&ck_path, &state, &stepper)
        .with_context(|| format!("cannot write {}", ck_path.display()))?;

    let csv_path = dir.join("energy.csv");
    let mut w = BufWriter::new(
        File::create(&csv_path).with_context(|| format!("cannot create {}", csv_path.display()))?,
    );
    write_energy_csv(&mut w, &records)?;
    w.flush()?;

    let report = absorbing_check(
        &records,
        &cfg.physics,
        &cfg.domain_constants(),
        cfg.simulate.absorbing_tol,
    )?;
    let mut w = BufWriter::new(File::create(dir.join("absorbing.ndjson"))?);
    write_ndjson(&mut w, &report)?;
    w.flush()?;
    write_ndjson(out, &report)?;

    eprintln!(
        "simulated {steps} steps of dt = {:.4e} to t = {:.6}",
        stepper.config().dt,
        state.t
    );
    eprintln!("rho1^2 = {:.6e}", report.rho1_sq);
    match report.absorbed_at {
        Some(t) => eprintln!("absorbed at t = {t:.6}"),
        None => eprintln!("final energy outside the absorbing ball"),
    }
    eprintln!("outputs in {}", dir.display());
    Ok(())
}

pub fn bound_summary(cfg: &RunConfig) -> Result<BoundSummary> {
    let constants = cfg.domain_constants();
    let bound = dimension_bound(&cfg.physics, &constants, cfg.domain.dim)?;
    let (kappa, kappa_error) = match kappa_chain(
        &cfg.physics,
        &constants,
        &cfg.kappa.constants(),
        cfg.kappa.r,
    ) {
        Ok(k) => (Some(k), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(BoundSummary {
        bound,
        kappa,
        kappa_error,
    })
}

pub fn bound(cfg: &RunConfig, out: &mut impl Write) -> Result<()> {
    let s = bound_summary(cfg)?;
    write_ndjson(out, &s)?;
    let b = &s.bound;
    let branch = match b.gamma_prime_branch {
        GammaPrimeBranch::AlphaZero => "alpha-zero",
        GammaPrimeBranch::ShearThinning => "shear-thinning",
    };
    eprintln!("{:<20} {}", "dimension", b.dim);
    eprintln!("{:<20} {:.6e}", "delta'", b.delta_prime);
    eprintln!("{:<20} {:.6e}", "K~", b.k_tilde);
    eprintln!("{:<20} {:.6e} ({branch})", "gamma'", b.gamma_prime);
    eprintln!("{:<20} {:.6e}", "Lambda", b.lambda_big);
    eprintln!("{:<20} {:.6e}", "nu0", b.nu0);
    eprintln!("{:<20} {:.6e}", "rho1^2", b.rho1_sq);
    eprintln!("{:<20} {:.6e}", "bracket", b.bracket);
    eprintln!("{:<20} {:.6e}", "B", b.b_value);
    eprintln!("{:<20} {}", "m", b.m_bound);
    match (&s.kappa, &s.kappa_error) {
        (Some(k), _) => {
            eprintln!("{:<20} {:.6e}", "r", k.r);
            for (name, v) in [
                ("kappa0", k.kappa0),
                ("kappa1", k.kappa1),
                ("kappa2", k.kappa2),
                ("kappa3", k.kappa3),
                ("rho2", k.rho2),
            ] {
                eprintln!("{name:<20} {v:.6e}");
            }
        }
        (None, Some(e)) => eprintln!("{:<20} {e}", "kappa chain"),
        (None, None) => {}
    }
    Ok(())
}

pub fn kappa(cfg: &RunConfig, out: &mut impl Write) -> Result<()> {
    let k = kappa_chain(
        &cfg.physics,
        &cfg.domain_constants(),
        &cfg.kappa.constants(),
        cfg.kappa.r,
    )?;
    write_ndjson(out, &k)?;
    eprintln!("rho2 = {:.6e} for r = {}", k.rho2, k.r);
    Ok(())
}

pub fn tangent(cfg: &RunConfig, out: &mut impl Write) -> Result<()> {
    let tc = &cfg.tangent;
    let (mut stepper, mut base) = setup(cfg)?;
    transient(&mut stepper, &mut base, tc.transient)?;
    let grid = stepper.grid().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(tc.seed);
    let xi = grid
        .random_solenoidal(&mut rng, cfg.initial.kmax)
        .scaled(tc.xi_weight);
    let eta = grid
        .random_solenoidal(&mut rng, cfg.initial.kmax)
        .scaled(tc.eta_weight);
    let dir = normalize_direction(&grid, &TangentState::new(xi, eta, base.t))?;
    if tc.h_list.len() == 1 {
        eprintln!("warning: a single step size gives no slope estimate");
    }
    // The finite-difference runs start from the current history-free base.
    stepper.set_history(None);
    let report = fd_consistency(&stepper, &base, &dir, &tc.h_list, base.t + tc.horizon)?;
    for e in &report.entries {
        write_ndjson(out, e)?;
    }
    write_ndjson(
        out,
        &TangentSummary {
            t_end: report.t_end,
            steps: report.steps,
            slope: report.slope,
            quotient_monotone: report.quotient_monotone,
        },
    )?;
    for e in &report.entries {
        match (e.remainder_rss, e.quotient_rss, &e.failure) {
            (Some(r), Some(q), _) => eprintln!("h = {:.3e}  r(h) = {r:.6e}  r(h)/h = {q:.6e}", e.h),
            (_, _, Some(f)) => eprintln!("h = {:.3e}  failed: {f}", e.h),
            _ => {}
        }
    }
    match report.slope {
        Some(s) => eprintln!(
            "log-log slope {s:.4}, quotients monotone: {}",
            report.quotient_monotone
        ),
        None => eprintln!("no slope fitted"),
    }
    Ok(())
}

pub fn lyapunov_estimate(cfg: &RunConfig) -> Result<TraceEstimate> {
    let lc = &cfg.lyapunov;
    let (mut stepper, mut base) = setup(cfg)?;
    let space = stepper.grid().pair_space_dim();
    if lc.m > space {
        bail!(
            "ensemble larger than space: m = {} but the retained pair space has dimension {space}",
            lc.m
        );
    }
    transient(&mut stepper, &mut base, lc.transient)?;
    let tcfg = TraceConfig {
        m: lc.m,
        reortho_stride: lc.reortho_stride,
        warmup_steps: lc.warmup_steps,
        steps: lc.steps,
        seed: lc.seed,
    };
    Ok(trace_qm(&mut stepper, &mut base, &tcfg)?)
}

pub fn lyapunov(cfg: &RunConfig, out: &mut impl Write) -> Result<()> {
    let est = lyapunov_estimate(cfg)?;
    write_ndjson(out, &est)?;
    let constants = cfg.domain_constants();
    let gp = gamma_prime(&cfg.physics, &constants);
    let bound = dimension_bound(&cfg.physics, &constants, cfg.domain.dim)?;
    let cmp = Comparison {
        m: est.m,
        q_m: est.q_m,
        lyapunov_sum: est.lyapunov_sum,
        gamma_prime: gp.value,
        gamma_prime_branch: gp.branch,
        lambda_big: bound.lambda_big,
        m_bound: bound.m_bound,
    };
    write_ndjson(out, &cmp)?;
    eprintln!(
        "numeric q_m vs analytic bound components: q_{} = {:.6e} (lyapunov sum {:.6e}), gamma' = {:.6e}, Lambda = {:.6e}, m_bound = {}",
        cmp.m, cmp.q_m, cmp.lyapunov_sum, cmp.gamma_prime, cmp.lambda_big, cmp.m_bound
    );
    Ok(())
}
