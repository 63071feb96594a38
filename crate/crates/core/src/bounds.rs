//! Energy envelope and the explicit bound on the fractal dimension of the
//! global attractor.

use crate::params::{absorbing_radius_sq, forcing_gain, nu0, DomainConstants, PhysicalParams};
use core::fmt;

/// Upper envelope for y(t) = |u|² + |b|² from dy/dt + ν₀λ₁y ≤ ν₁|f|².
pub fn gronwall_envelope(
    y0: f64,
    params: &PhysicalParams,
    constants: &DomainConstants,
    t: f64,
) -> f64 {
    let rate = nu0(params, constants) * constants.lambda1;
    let gain = forcing_gain(params, constants);
    let decay = libm::exp(-rate * t);
    // 1 − e^{−rate·t} via expm1 so the envelope is exact near t = 0
    y0 * decay + gain * params.f_amp * params.f_amp / rate * -libm::expm1(-rate * t)
}

/// δ′ = 2(2 − α)/(4 + α).
pub fn delta_prime(alpha: f64) -> f64 {
    2.0 * (2.0 - alpha) / (4.0 + alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum GammaPrimeBranch {
    /// α = 0: the W^{1,p} bound is the plain H¹ bound, γ′ = K̃/d.
    AlphaZero,
    /// α ∈ (0, 1): the interpolated bound with exponent 1/(1 − δ′).
    ShearThinning,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPrime {
    pub value: f64,
    pub k_tilde: f64,
    pub branch: GammaPrimeBranch,
}

/// γ′, the coercivity constant of the trace estimate in H¹.
///
/// K̃ = 2(1 − α)C̃^{(p−2)/p}. For α > 0,
/// γ′ = (K̃/(δ′d))·(μ₁Kδ′/(K̃(1 − δ′)))^{1/(1−δ′)}; α = 0 gives δ′ = 1 and
/// uses γ′ = K̃/d instead of the singular exponent.
pub fn gamma_prime(params: &PhysicalParams, constants: &DomainConstants) -> GammaPrime {
    let a = params.alpha;
    let p = 2.0 - a;
    let k_tilde = 2.0 * (1.0 - a) * libm::pow(constants.c_tilde, (p - 2.0) / p);
    if a == 0.0 {
        return GammaPrime {
            value: k_tilde / constants.d_const,
            k_tilde,
            branch: GammaPrimeBranch::AlphaZero,
        };
    }
    let dp = delta_prime(a);
    let base = params.mu1 * constants.korn * dp / (k_tilde * (1.0 - dp));
    GammaPrime {
        value: k_tilde / (dp * constants.d_const) * libm::pow(base, 1.0 / (1.0 - dp)),
        k_tilde,
        branch: GammaPrimeBranch::ShearThinning,
    }
}

/// Λ = 4λ₁|f|²/(μ₁K), bounding the time averages of μ₁K‖u‖₂² and S‖b‖₁².
pub fn lambda_big(params: &PhysicalParams, constants: &DomainConstants) -> f64 {
    4.0 * constants.lambda1 * params.f_amp * params.f_amp / (params.mu1 * constants.korn)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DimensionBoundReport {
    pub dim: usize,
    pub delta_prime: f64,
    pub k_tilde: f64,
    pub gamma_prime: f64,
    pub gamma_prime_branch: GammaPrimeBranch,
    pub lambda_big: f64,
    pub nu0: f64,
    pub rho1_sq: f64,
    /// The bracket before raising to n/(n+2).
    pub bracket: f64,
    /// B = bracket^{n/(n+2)}; the bound m is the smallest integer above B.
    pub b_value: f64,
    pub m_bound: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundError {
    NonPositive(&'static str),
    Dimension(usize),
    Overflow,
}

impl fmt::Display for BoundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundError::NonPositive(name) => {
                write!(f, "constant `{name}` must be strictly positive")
            }
            BoundError::Dimension(n) => write!(f, "dimension must be 2 or 3, got {n}"),
            BoundError::Overflow => write!(f, "dimension bound is not finite"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BoundError {}

fn check_positive(name: &'static str, v: f64) -> Result<(), BoundError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(BoundError::NonPositive(name))
    }
}

/// Dimension bound m = ⌊B⌋ + 1 (the smallest integer strictly above B), where
/// B = [(2Λ/(γ′c̃λ₁μ₁K))(C²(1/S + 2μ²/γ′) + 8μ²/S)]^{n/(n+2)}.
pub fn dimension_bound(
    params: &PhysicalParams,
    constants: &DomainConstants,
    dim: usize,
) -> Result<DimensionBoundReport, BoundError> {
    if dim != 2 && dim != 3 {
        return Err(BoundError::Dimension(dim));
    }
    check_positive("eps", params.eps)?;
    check_positive("mu0", params.mu0)?;
    check_positive("mu1", params.mu1)?;
    check_positive("mu", params.mu)?;
    check_positive("s_diff", params.s_diff)?;
    if let Some(name) = constants.first_nonpositive() {
        return Err(BoundError::NonPositive(name));
    }
    if !(params.alpha >= 0.0 && params.alpha < 1.0) {
        return Err(BoundError::NonPositive("1 - alpha"));
    }
    if !(params.f_amp >= 0.0) {
        return Err(BoundError::NonPositive("f_amp"));
    }

    let gp = gamma_prime(params, constants);
    let lam = lambda_big(params, constants);
    let s = params.s_diff;
    let mu2 = params.mu * params.mu;
    let c2 = constants.embed * constants.embed;
    let g = gp.value;
    let prefactor =
        2.0 * lam / (g * constants.stokes_c * constants.lambda1 * params.mu1 * constants.korn);
    let bracket = prefactor * (c2 * (1.0 / s + 2.0 * mu2 / g) + 8.0 * mu2 / s);
    let n = dim as f64;
    let b_value = libm::pow(bracket, n / (n + 2.0));
    if !b_value.is_finite() || b_value >= 9.0e15 {
        return Err(BoundError::Overflow);
    }
    let m_bound = libm::floor(b_value) as u64 + 1;

    Ok(DimensionBoundReport {
        dim,
        delta_prime: delta_prime(params.alpha),
        k_tilde: gp.k_tilde,
        gamma_prime: g,
        gamma_prime_branch: gp.branch,
        lambda_big: lam,
        nu0: nu0(params, constants),
        rho1_sq: absorbing_radius_sq(params, constants),
        bracket,
        b_value,
        m_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> PhysicalParams {
        PhysicalParams {
            eps: 1.0,
            mu0: 1.0,
            mu1: 1.0,
            alpha: 0.5,
            mu: 1.0,
            s_diff: 1.0,
            f_amp: 1.0,
        }
    }

    #[test]
    fn delta_prime_values() {
        assert_eq!(delta_prime(0.0), 1.0);
        assert!((delta_prime(0.5) - 2.0 / 3.0).abs() < 1e-15);
        assert!((delta_prime(1.0 - 1e-12) - 0.4).abs() < 1e-11);
    }

    #[test]
    fn lambda_big_values() {
        let c = DomainConstants {
            korn: 2.0,
            lambda1: 1.0,
            ..Default::default()
        };
        assert_eq!(lambda_big(&params(), &c), 2.0);
        let zero = PhysicalParams {
            f_amp: 0.0,
            ..params()
        };
        assert_eq!(lambda_big(&zero, &c), 0.0);
        let double = PhysicalParams {
            f_amp: 2.0,
            ..params()
        };
        assert_eq!(lambda_big(&double, &c), 4.0 * lambda_big(&params(), &c));
    }

    #[test]
    fn gamma_prime_alpha_zero_branch() {
        let c = DomainConstants {
            d_const: 4.0,
            c_tilde: 7.0,
            ..Default::default()
        };
        let p = PhysicalParams {
            alpha: 0.0,
            ..params()
        };
        let gp = gamma_prime(&p, &c);
        assert_eq!(gp.branch, GammaPrimeBranch::AlphaZero);
        assert_eq!(gp.k_tilde, 2.0);
        assert_eq!(gp.value, 0.5);
    }

    #[test]
    fn zero_forcing_gives_unit_bound() {
        let p = PhysicalParams {
            f_amp: 0.0,
            ..params()
        };
        let rep = dimension_bound(&p, &DomainConstants::default(), 2).unwrap();
        assert_eq!(rep.lambda_big, 0.0);
        assert_eq!(rep.b_value, 0.0);
        assert_eq!(rep.m_bound, 1);
    }

    #[test]
    fn nonpositive_constant_is_named() {
        let c = DomainConstants {
            stokes_c: 0.0,
            ..Default::default()
        };
        assert_eq!(
            dimension_bound(&params(), &c, 2).unwrap_err(),
            BoundError::NonPositive("stokes_c")
        );
        let p = PhysicalParams {
            s_diff: -1.0,
            ..params()
        };
        assert_eq!(
            dimension_bound(&p, &DomainConstants::default(), 3).unwrap_err(),
            BoundError::NonPositive("s_diff")
        );
    }

    #[test]
    fn envelope_limits() {
        let c = DomainConstants::default();
        let p = params();
        assert_eq!(gronwall_envelope(3.0, &p, &c, 0.0), 3.0);
        let rate = nu0(&p, &c) * c.lambda1;
        let asymptote = forcing_gain(&p, &c) * p.f_amp * p.f_amp / rate;
        assert!((gronwall_envelope(3.0, &p, &c, 1e4) - asymptote).abs() < 1e-12);

        let unforced = PhysicalParams { f_amp: 0.0, ..p };
        for i in 0..10 {
            let t = 0.3 * i as f64;
            let expect = 3.0 * libm::exp(-rate * t);
            assert!((gronwall_envelope(3.0, &unforced, &c, t) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn integer_bracket_takes_next_integer() {
        // B lands on an exact integer: choose Λ so that the bracket is 4 in 2D (B = 2).
        let c = DomainConstants::default();
        let p = PhysicalParams {
            alpha: 0.0,
            mu: 1.0,
            s_diff: 1.0,
            mu1: 1.0,
            ..params()
        };
        // γ′ = 2, bracket = (2Λ/2)(1 + 1 + 8) = 10Λ, Λ = 4|f|².
        let p = PhysicalParams {
            f_amp: libm::sqrt(0.1),
            ..p
        };
        let rep = dimension_bound(&p, &c, 2).unwrap();
        assert!((rep.bracket - 4.0).abs() < 1e-12);
        assert!((rep.b_value - 2.0).abs() < 1e-12);
        if rep.b_value == 2.0 {
            assert_eq!(rep.m_bound, 3);
        }
    }
}
