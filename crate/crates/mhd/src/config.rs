//! Run configuration: one TOML file plus `--set section.key=value` overrides.
//!
//! ```toml
//! [physics]    # eps, mu0, mu1, alpha, mu, s_diff, f_amp
//! [domain]     # dim, length, resolution
//! [constants]  # korn, embed, d_const, stokes_c, lambda1, c_tilde
//! [stepper]    # dt, scheme = "imex_euler" | "imex_cnab2", cfl_limit
//! [forcing]    # kind = "zero" | "random" | "modes", seed, kmax, modes
//! [initial]    # kind = "zero" | "random" | "checkpoint", seed, kmax, u_norm, b_norm, path
//! [output]     # dir, energy_stride, checkpoint_stride
//! [simulate]   # t_end, absorbing_tol
//! [kappa]      # r, c2, c4, c8, c9
//! [tangent]    # h_list, horizon, transient, seed, xi_weight, eta_weight, envelope_stride
//! [lyapunov]   # m, transient, reortho_stride, warmup_steps, steps, seed
//! ```
//!
//! `korn` and `lambda1` default to the values derived from the domain; the
//! other constants default to 1. A missing `stepper.dt` is replaced by
//! [`default_dt`]. The forcing shape is rescaled so that its L² norm equals
//! `physics.f_amp`.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use bipolar_mhd_core::{validate, DomainConstants, DomainSpec, KappaConstants, PhysicalParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checkpoint::{read_checkpoint, Checkpoint, CheckpointError};
use crate::dynamics::{default_dt, Scheme, State, StepperConfig};
use crate::spectral::{Grid, SpectralVectorField};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config not found: {0}")]
    NotFound(PathBuf),
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("override `{0}` must look like section.key=value")]
    BadOverride(String),
    #[error("override `{0}` addresses a value that is not a table")]
    NotATable(String),
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("initial checkpoint {path}: {source}")]
    Checkpoint {
        path: PathBuf,
        #[source]
        source: CheckpointError,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    pub korn: Option<f64>,
    pub embed: Option<f64>,
    pub d_const: Option<f64>,
    pub stokes_c: Option<f64>,
    pub lambda1: Option<f64>,
    pub c_tilde: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepperSection {
    pub dt: Option<f64>,
    pub scheme: Scheme,
    pub cfl_limit: f64,
}

impl Default for StepperSection {
    fn default() -> Self {
        StepperSection {
            dt: None,
            scheme: Scheme::ImexEuler,
            cfl_limit: 0.5,
        }
    }
}

/// One real Fourier mode a·cos(k·x) + c·sin(k·x); `k` in units of 2π/L.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k: Vec<i64>,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingKind {
    Zero,
    Random,
    Modes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForcingConfig {
    pub kind: ForcingKind,
    pub seed: u64,
    pub kmax: f64,
    pub modes: Vec<ModeSpec>,
}

impl Default for ForcingConfig {
    fn default() -> Self {
        ForcingConfig {
            kind: ForcingKind::Random,
            seed: 1,
            kmax: 4.0,
            modes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Zero,
    Random,
    Checkpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: InitialKind,
    pub seed: u64,
    pub kmax: f64,
    /// L² norm of the initial velocity.
    pub u_norm: f64,
    /// L² norm of the initial magnetic field.
    pub b_norm: f64,
    pub path: Option<PathBuf>,
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig {
            kind: InitialKind::Random,
            seed: 2,
            kmax: 10.0,
            u_norm: 1.0,
            b_norm: 1.0,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub energy_stride: u64,
    /// 0 disables periodic checkpoints; the final state is always written.
    pub checkpoint_stride: u64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            energy_stride: 10,
            checkpoint_stride: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub t_end: f64,
    pub absorbing_tol: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            t_end: 1.0,
            absorbing_tol: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KappaConfig {
    pub r: f64,
    pub c2: f64,
    pub c4: f64,
    pub c8: f64,
    pub c9: f64,
}

impl Default for KappaConfig {
    fn default() -> Self {
        let k = KappaConstants::default();
        KappaConfig {
            r: 1.0,
            c2: k.c2,
            c4: k.c4,
            c8: k.c8,
            c9: k.c9,
        }
    }
}

impl KappaConfig {
    pub fn constants(&self) -> KappaConstants {
        KappaConstants {
            c2: self.c2,
            c4: self.c4,
            c8: self.c8,
            c9: self.c9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TangentConfig {
    pub h_list: Vec<f64>,
    /// Length T of the comparison window.
    pub horizon: f64,
    /// Time the base is advanced alone before the experiment starts.
    pub transient: f64,
    pub seed: u64,
    pub xi_weight: f64,
    pub eta_weight: f64,
    pub envelope_stride: u64,
}

impl Default for TangentConfig {
    fn default() -> Self {
        TangentConfig {
            h_list: vec![1e-2, 1e-3, 1e-4, 1e-5],
            horizon: 0.5,
            transient: 0.0,
            seed: 3,
            xi_weight: 1.0,
            eta_weight: 1.0,
            envelope_stride: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LyapunovConfig {
    pub m: usize,
    /// Time the base is advanced alone before the frame is created.
    pub transient: f64,
    pub reortho_stride: u64,
    pub warmup_steps: u64,
    pub steps: u64,
    pub seed: u64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        LyapunovConfig {
            m: 4,
            transient: 0.0,
            reortho_stride: 10,
            warmup_steps: 1000,
            steps: 1000,
            seed: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub physics: PhysicalParams,
    pub domain: DomainSpec,
    pub constants: ConstantsConfig,
    pub stepper: StepperSection,
    pub forcing: ForcingConfig,
    pub initial: InitialConfig,
    pub output: OutputConfig,
    pub simulate: SimulateConfig,
    pub kappa: KappaConfig,
    pub tangent: TangentConfig,
    pub lyapunov: LyapunovConfig,
}

/// Sets `path` (dot-separated) in `table` to `raw`, parsed as a TOML value
/// when possible and as a bare string otherwise.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::BadOverride(assignment.to_string()))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(ConfigError::BadOverride(assignment.to_string()));
    }
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let (last, parents) = keys.split_last().expect("nonempty path");
    let mut cur = table;
    for key in parents {
        cur = cur
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| ConfigError::NotATable(assignment.to_string()))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl RunConfig {
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut table: toml::Table = toml::from_str(text)?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig = toml::Value::Table(table).try_into()?;
        Ok(cfg)
    }

    /// Reads `path` (defaults when `None`) and applies the overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = match path {
            None => String::new(),
            Some(p) => {
                if !p.exists() {
                    return Err(ConfigError::NotFound(p.to_path_buf()));
                }
                std::fs::read_to_string(p).map_err(|source| ConfigError::Read {
                    path: p.to_path_buf(),
                    source,
                })?
            }
        };
        RunConfig::from_toml_str(&text, overrides)
    }

    /// Checks the physical and domain invariants.
    pub fn validated(self) -> Result<Self, ConfigError> {
        let report = validate(&self.physics, &self.domain);
        if !report.is_ok() {
            let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            return Err(ConfigError::Invalid(msgs.join("; ")));
        }
        if self.output.energy_stride == 0 {
            return Err(ConfigError::Invalid(
                "output.energy_stride must be >= 1".into(),
            ));
        }
        if self.lyapunov.reortho_stride == 0 {
            return Err(ConfigError::Invalid(
                "lyapunov.reortho_stride must be >= 1".into(),
            ));
        }
        if self.lyapunov.m == 0 {
            return Err(ConfigError::Invalid("lyapunov.m must be >= 1".into()));
        }
        Ok(self)
    }

    pub fn domain_constants(&self) -> DomainConstants {
        let auto = DomainConstants::for_domain(&self.domain);
        let c = &self.constants;
        DomainConstants {
            korn: c.korn.unwrap_or(auto.korn),
            embed: c.embed.unwrap_or(1.0),
            d_const: c.d_const.unwrap_or(1.0),
            stokes_c: c.stokes_c.unwrap_or(1.0),
            lambda1: c.lambda1.unwrap_or(auto.lambda1),
            c_tilde: c.c_tilde.unwrap_or(1.0),
        }
    }

    pub fn stepper_config(&self, grid: &Grid) -> StepperConfig {
        StepperConfig {
            dt: self
                .stepper
                .dt
                .unwrap_or_else(|| default_dt(grid, &self.physics)),
            scheme: self.stepper.scheme,
            cfl_limit: self.stepper.cfl_limit,
        }
    }

    /// The steady forcing, normalized to L² norm `physics.f_amp`.
    pub fn forcing_field(&self, grid: &Grid) -> SpectralVectorField {
        let shape = match self.forcing.kind {
            ForcingKind::Zero => grid.zeros(),
            ForcingKind::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.forcing.seed);
                grid.random_solenoidal(&mut rng, self.forcing.kmax)
            }
            ForcingKind::Modes => {
                let mut f = grid.zeros();
                for mode in &self.forcing.modes {
                    let pad = |v: &[f64]| {
                        let mut out = [0.0; 3];
                        for (o, x) in out.iter_mut().zip(v) {
                            *o = *x;
                        }
                        out
                    };
                    let mut k = [0i64; 3];
                    for (o, x) in k.iter_mut().zip(&mode.k) {
                        *o = *x;
                    }
                    f.axpy(1.0, &grid.single_mode(k, pad(&mode.cos), pad(&mode.sin)));
                }
                grid.truncate(&mut f);
                f
            }
        };
        let norm = grid.inner(&shape, &shape).sqrt();
        if norm == 0.0 {
            shape
        } else {
            shape.scaled(self.physics.f_amp / norm)
        }
    }

    /// Initial state, plus the checkpoint it came from when applicable.
    pub fn initial_state(&self, grid: &Grid) -> Result<(State, Option<Checkpoint>), ConfigError> {
        let init = &self.initial;
        match init.kind {
            InitialKind::Zero => Ok((State::zero(grid), None)),
            InitialKind::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(init.seed);
                let u = grid
                    .random_solenoidal(&mut rng, init.kmax)
                    .scaled(init.u_norm);
                let b = grid
                    .random_solenoidal(&mut rng, init.kmax)
                    .scaled(init.b_norm);
                Ok((State { u, b, t: 0.0 }, None))
            }
            InitialKind::Checkpoint => {
                let path = init
                    .path
                    .clone()
                    .unwrap_or_else(|| PathBuf::from("checkpoint.bin"));
                let err = |source| ConfigError::Checkpoint {
                    path: path.clone(),
                    source,
                };
                let file = File::open(&path).map_err(|e| err(e.into()))?;
                let ck = read_checkpoint(&mut BufReader::new(file)).map_err(err)?;
                if ck.dom != *grid.dom() {
                    return Err(err(CheckpointError::Header(format!(
                        "domain {:?} differs from the configured {:?}",
                        ck.dom,
                        grid.dom()
                    ))));
                }
                Ok((ck.state.clone(), Some(ck)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_defaults() {
        let cfg = RunConfig::from_toml_str("", &[]).unwrap();
        assert_eq!(cfg, RunConfig::default());
        let c = cfg.domain_constants();
        assert!((c.korn - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(c.lambda1, 1.0);
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let text = "[physics]\nalpha = 0.5\n";
        let sets = [
            "physics.alpha=0.25".to_string(),
            "stepper.scheme=imex_cnab2".to_string(),
            "tangent.h_list=[1e-3, 1e-4]".to_string(),
            "output.dir=/tmp/x".to_string(),
        ];
        let cfg = RunConfig::from_toml_str(text, &sets).unwrap();
        assert_eq!(cfg.physics.alpha, 0.25);
        assert_eq!(cfg.stepper.scheme, Scheme::ImexCnab2);
        assert_eq!(cfg.tangent.h_list, vec![1e-3, 1e-4]);
        assert_eq!(cfg.output.dir, PathBuf::from("/tmp/x"));
    }

    #[test]
    fn bad_overrides_and_keys_rejected() {
        assert!(matches!(
            RunConfig::from_toml_str("", &["physics.alpha".into()]),
            Err(ConfigError::BadOverride(_))
        ));
        assert!(RunConfig::from_toml_str("[physics]\nalpah = 0.1\n", &[]).is_err());
    }

    #[test]
    fn missing_file_is_reported() {
        let err = RunConfig::load(Some(Path::new("/nonexistent/run.toml")), &[]).unwrap_err();
        assert!(err.to_string().starts_with("config not found"));
    }

    #[test]
    fn validation_names_violation() {
        let cfg = RunConfig::from_toml_str("[physics]\nalpha = 1.0\n", &[]).unwrap();
        let err = cfg.validated().unwrap_err();
        assert!(err.to_string().contains("alpha must be < 1"));
    }

    #[test]
    fn forcing_is_normalized() {
        let text = "[physics]\nf_amp = 0.7\n[domain]\nresolution = 16\n[forcing]\nkind = \"modes\"\nmodes = [{ k = [1, 2], cos = [2.0, -1.0] }, { k = [3, 0], sin = [0.0, 1.0] }]\n";
        let cfg = RunConfig::from_toml_str(text, &[]).unwrap();
        let grid = Grid::new(cfg.domain);
        let f = cfg.forcing_field(&grid);
        assert!((grid.inner(&f, &f).sqrt() - 0.7).abs() < 1e-14);
        assert!(grid.divergence_defect(&f) < 1e-12);
    }
}
