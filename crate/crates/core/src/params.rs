//! Model constants, their validation, and the absorbing-ball estimate chain.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

/// Physical constants of the bipolar MHD system.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PhysicalParams {
    /// Stress regularizer ε.
    pub eps: f64,
    /// Consistency coefficient μ₀.
    pub mu0: f64,
    /// Bipolar (higher-gradient) viscosity μ₁.
    pub mu1: f64,
    /// Shear-thinning exponent α in `[0, 1)`.
    pub alpha: f64,
    /// Lorentz / induction coupling μ.
    pub mu: f64,
    /// Magnetic diffusivity S.
    pub s_diff: f64,
    /// L² norm of the steady body force.
    pub f_amp: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            eps: 1.0,
            mu0: 0.05,
            mu1: 1.0e-3,
            alpha: 0.5,
            mu: 1.0,
            s_diff: 0.05,
            f_amp: 0.0,
        }
    }
}

impl PhysicalParams {
    /// Exponent p = 2 − α of the W^{1,p} chain.
    pub fn p(&self) -> f64 {
        2.0 - self.alpha
    }

    /// Upper bound μ₀ε^{−α/2} of the effective viscosity.
    pub fn gamma_max(&self) -> f64 {
        self.mu0 * libm::pow(self.eps, -0.5 * self.alpha)
    }
}

/// Periodic box standing in for the bounded domain.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct DomainSpec {
    /// Spatial dimension, 2 or 3.
    pub dim: usize,
    /// Period of the box along every axis.
    pub length: f64,
    /// Modes per axis.
    pub resolution: usize,
}

impl Default for DomainSpec {
    fn default() -> Self {
        DomainSpec {
            dim: 2,
            length: 2.0 * PI,
            resolution: 64,
        }
    }
}

impl DomainSpec {
    pub fn new(dim: usize, length: f64, resolution: usize) -> Self {
        DomainSpec {
            dim,
            length,
            resolution,
        }
    }

    /// Smallest nonzero wavenumber 2π/L.
    pub fn k_min(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Grid points (and Fourier modes) per component.
    pub fn points(&self) -> usize {
        self.resolution.pow(self.dim as u32)
    }

    /// Volume Lⁿ of the box.
    pub fn volume(&self) -> f64 {
        libm::pow(self.length, self.dim as f64)
    }

    /// Largest retained integer wavenumber after 2/3 truncation.
    pub fn dealias_cutoff(&self) -> usize {
        (self.resolution - 1) / 3
    }
}

/// Domain-dependent constants of the functional inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DomainConstants {
    /// Korn constant K(Ω).
    pub korn: f64,
    /// Embedding / interpolation constant C(Ω).
    pub embed: f64,
    /// Constant d(Ω) of the W^{1,p} lower bound.
    pub d_const: f64,
    /// Growth constant c̃ of the Stokes eigenvalues, λ_j ≥ c̃λ₁jⁿ.
    pub stokes_c: f64,
    /// Smallest eigenvalue λ₁.
    pub lambda1: f64,
    /// C̃(Ω, α, ε), the bound on ∫(ε + |𝓔(u)|²)^{p/2} on the attractor.
    pub c_tilde: f64,
}

impl Default for DomainConstants {
    fn default() -> Self {
        DomainConstants {
            korn: 1.0,
            embed: 1.0,
            d_const: 1.0,
            stokes_c: 1.0,
            lambda1: 1.0,
            c_tilde: 1.0,
        }
    }
}

impl DomainConstants {
    /// Placeholder constants with λ₁ and K taken from the periodic lattice.
    pub fn for_domain(dom: &DomainSpec) -> Self {
        DomainConstants {
            korn: discrete_korn(dom),
            lambda1: lambda1(dom),
            ..Default::default()
        }
    }

    /// Returns the name of the first constant that is not strictly positive.
    pub fn first_nonpositive(&self) -> Option<&'static str> {
        [
            ("korn", self.korn),
            ("embed", self.embed),
            ("d_const", self.d_const),
            ("stokes_c", self.stokes_c),
            ("lambda1", self.lambda1),
            ("c_tilde", self.c_tilde),
        ]
        .into_iter()
        .find(|(_, v)| !(*v > 0.0 && v.is_finite()))
        .map(|(name, _)| name)
    }
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.message.contains(needle))
    }

    fn push(&mut self, field: &'static str, message: &str) {
        self.violations.push(Violation {
            field,
            message: String::from(message),
        });
    }
}

/// Checks every type invariant of the physical and domain parameters.
pub fn validate(params: &PhysicalParams, dom: &DomainSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let positive = [
        ("eps", params.eps, "eps must be > 0"),
        ("mu0", params.mu0, "mu0 must be > 0"),
        ("mu1", params.mu1, "mu1 must be > 0"),
        ("mu", params.mu, "mu must be > 0"),
        ("s_diff", params.s_diff, "s_diff must be > 0"),
    ];
    for (field, value, msg) in positive {
        if !(value > 0.0 && value.is_finite()) {
            report.push(field, msg);
        }
    }
    if !(params.alpha >= 0.0) {
        report.push("alpha", "alpha must be >= 0");
    }
    if !(params.alpha < 1.0) {
        report.push("alpha", "alpha must be < 1");
    }
    if !(params.f_amp >= 0.0 && params.f_amp.is_finite()) {
        report.push("f_amp", "f_amp must be >= 0");
    }
    if dom.dim != 2 && dom.dim != 3 {
        report.push("dim", "dim must be 2 or 3");
    }
    if !(dom.length > 0.0 && dom.length.is_finite()) {
        report.push("length", "length must be > 0");
    }
    if !dom.resolution.is_multiple_of(2) {
        report.push("resolution", "resolution must be even");
    }
    if dom.resolution < 8 {
        report.push("resolution", "resolution must be >= 8");
    }
    report
}

/// Smallest eigenvalue of −Δ on mean-zero periodic fields, (2π/L)².
pub fn lambda1(dom: &DomainSpec) -> f64 {
    let k = dom.k_min();
    k * k
}

/// Discrete Korn constant: the minimum over the lattice of the ratio between
/// the bipolar dissipation symbol ½|k|⁴ and the H² symbol 1 + |k|² + |k|⁴.
/// The ratio increases with |k|, so the minimum sits on the first shell.
pub fn discrete_korn(dom: &DomainSpec) -> f64 {
    let k2 = lambda1(dom);
    0.5 * k2 * k2 / (1.0 + k2 + k2 * k2)
}

/// ν₀ = min(μ₁K, S).
pub fn nu0(params: &PhysicalParams, constants: &DomainConstants) -> f64 {
    let bipolar = params.mu1 * constants.korn;
    if bipolar < params.s_diff {
        bipolar
    } else {
        params.s_diff
    }
}

/// ν₁ = 4/ν₀, the forcing gain of the L² energy inequality.
pub fn forcing_gain(params: &PhysicalParams, constants: &DomainConstants) -> f64 {
    4.0 / nu0(params, constants)
}

/// ρ₁² = 2ν₁|f|²/ν₀, the squared radius of the absorbing ball in L².
pub fn absorbing_radius_sq(params: &PhysicalParams, constants: &DomainConstants) -> f64 {
    let nu0 = nu0(params, constants);
    let nu1 = 4.0 / nu0;
    2.0 * nu1 * params.f_amp * params.f_amp / nu0
}

/// Proof-internal constants that the absorbing-ball chain in the stronger
/// norm depends on. They are not determined by the model, so they are inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KappaConstants {
    /// Interpolation constant bounding μ(u·∇b, Δb).
    pub c2: f64,
    /// Interpolation constant bounding μ(b·∇u, Δb).
    pub c4: f64,
    /// Constant of |I₂| ≤ δ⁻¹c₈|Δb|²‖b‖₁² + δ|u_t|².
    pub c8: f64,
    /// Constant of |∇u|² ≤ c₉‖u‖₂².
    pub c9: f64,
}

impl Default for KappaConstants {
    fn default() -> Self {
        KappaConstants {
            c2: 1.0,
            c4: 1.0,
            c8: 1.0,
            c9: 1.0,
        }
    }
}

/// Every constant of the chain leading to the radius ρ₂ of the ball in
/// 𝕍 = 𝕍₁ × 𝕍₂ that attracts bounded sets.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KappaReport {
    pub r: f64,
    pub nu0: f64,
    /// ν₁ = 4/ν₀.
    pub forcing_gain: f64,
    pub rho1_sq: f64,
    /// Growth rate 2δ⁻¹μ·min(c₂, c₄) of ‖b‖₁² with δ = S/4.
    pub gronwall_rate_b: f64,
    pub kappa0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub kappa3: f64,
    pub rho2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KappaError {
    NonPositiveWindow(f64),
    Diverges { stage: &'static str },
}

impl fmt::Display for KappaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KappaError::NonPositiveWindow(r) => write!(f, "window length r must be > 0, got {r}"),
            KappaError::Diverges { stage } => write!(
                f,
                "estimate chain diverges for these parameters (overflow at {stage})"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for KappaError {}

/// κ₀(r) = (ρ₁² + 2|f|ρ₁r)/(2ν₀).
pub fn kappa0(rho1_sq: f64, f_amp: f64, nu0: f64, r: f64) -> f64 {
    (rho1_sq + 2.0 * f_amp * libm::sqrt(rho1_sq) * r) / (2.0 * nu0)
}

fn finite(value: f64, stage: &'static str) -> Result<f64, KappaError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(KappaError::Diverges { stage })
    }
}

/// Evaluates κ₀(r) … κ₃(r) and ρ₂ = √κ₃(r) for a window length `r`.
///
/// κ₀ bounds ∫ₜ^{t+r}(‖u‖₂² + ‖b‖₁²), κ₁ bounds ‖b‖₁² after the uniform
/// Gronwall step, κ₂ bounds ∫|Δb|², and κ₃ bounds ‖u‖₂² + ‖b‖₁².
pub fn kappa_chain(
    params: &PhysicalParams,
    constants: &DomainConstants,
    kc: &KappaConstants,
    r: f64,
) -> Result<KappaReport, KappaError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(KappaError::NonPositiveWindow(r));
    }
    let f = params.f_amp;
    let nu0 = nu0(params, constants);
    let nu1 = 4.0 / nu0;
    let rho1_sq = absorbing_radius_sq(params, constants);
    let rho1 = libm::sqrt(rho1_sq);
    let kappa0 = finite(kappa0(rho1_sq, f, nu0, r), "kappa0")?;

    let delta = params.s_diff / 4.0;
    let c_min = if kc.c2 < kc.c4 { kc.c2 } else { kc.c4 };
    let rate_b = 2.0 * params.mu * c_min / delta;

    let growth = finite(libm::exp(rate_b * kappa0), "kappa1")?;
    let kappa1 = finite(rate_b * kappa0 / r * growth, "kappa1")?;
    let kappa2 = finite(kappa1 * (rate_b * kappa0 + 1.0) / params.s_diff, "kappa2")?;

    let korn = constants.korn;
    let a1 = finite(8.0 * kc.c9 * kappa0 / params.mu1, "a1")?;
    let a2 = finite(8.0 * kc.c8 * kappa1 * kappa2, "a2")?;
    let a3 = finite(
        rho1 * (f + rho1) + params.gamma_max() * korn * kappa0 * r,
        "a3",
    )?;
    let kappa3 = finite(
        kappa1 + (a3 / r + a2) * libm::exp(a1) / (params.mu1 * korn),
        "kappa3",
    )?;

    Ok(KappaReport {
        r,
        nu0,
        forcing_gain: nu1,
        rho1_sq,
        gronwall_rate_b: rate_b,
        kappa0,
        kappa1,
        kappa2,
        a1,
        a2,
        a3,
        kappa3,
        rho2: libm::sqrt(kappa3),
    })
}
