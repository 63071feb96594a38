//! Pointwise bipolar rheology: strain rate, effective viscosity Γ, the
//! potential Σ, and the linearization of the algebraic stress Γ(𝓔)𝓔.
//!
//! Tensors are stored in a fixed 3×3 array; only the leading `dim × dim`
//! block is meaningful and the remaining entries stay zero.

use crate::params::PhysicalParams;

pub type Mat3 = [[f64; 3]; 3];

/// Symmetric rank-2 tensor in 2 or 3 dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor {
    pub dim: usize,
    pub m: Mat3,
}

impl SymTensor {
    pub fn zero(dim: usize) -> Self {
        SymTensor {
            dim,
            m: [[0.0; 3]; 3],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut t = SymTensor::zero(dim);
        for i in 0..dim {
            t.m[i][i] = 1.0;
        }
        t
    }

    /// Builds a tensor from the upper triangle of `m`, mirroring it.
    pub fn from_upper(dim: usize, m: &Mat3) -> Self {
        let mut t = SymTensor::zero(dim);
        for i in 0..dim {
            for j in i..dim {
                t.m[i][j] = m[i][j];
                t.m[j][i] = m[i][j];
            }
        }
        t
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    /// Frobenius inner product Σᵢⱼ AᵢⱼBᵢⱼ.
    pub fn dot(&self, other: &SymTensor) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.m[i][j] * other.m[i][j];
            }
        }
        s
    }

    /// |𝓔|², the squared Frobenius norm.
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.m[i][i]).sum()
    }

    pub fn scale(&self, s: f64) -> SymTensor {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    /// self + s·other
    pub fn axpy(&self, s: f64, other: &SymTensor) -> SymTensor {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] += s * other.m[i][j];
            }
        }
        out
    }
}

/// 𝓔 = ½(∇u + ∇uᵀ) for a velocity gradient with entries `grad[i][j] = ∂ⱼuᵢ`.
pub fn strain_rate(dim: usize, grad: &Mat3) -> SymTensor {
    let mut e = SymTensor::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            e.m[i][j] = 0.5 * (grad[i][j] + grad[j][i]);
        }
    }
    e
}

/// Effective viscosity Γ = μ₀(ε + |𝓔|²)^{−α/2} as a function of `strain_sq = |𝓔|²`.
#[inline]
pub fn gamma(strain_sq: f64, params: &PhysicalParams) -> f64 {
    if params.alpha == 0.0 {
        return params.mu0;
    }
    params.mu0 * libm::pow(params.eps + strain_sq, -0.5 * params.alpha)
}

/// Σ(s) = ∫₀ˢ μ₀(ε + σ)^{−α/2} dσ in closed form.
pub fn sigma_potential(s: f64, params: &PhysicalParams) -> f64 {
    let a = params.alpha;
    if a == 0.0 {
        return params.mu0 * s;
    }
    let q = 1.0 - 0.5 * a;
    let scale = 2.0 * params.mu0 / (2.0 - a);
    // (ε+s)^q − ε^q written through expm1 so small s keeps full precision
    let eq = libm::pow(params.eps, q);
    let ratio = libm::log1p(s / params.eps);
    scale * eq * libm::expm1(q * ratio)
}

/// Algebraic part 2Γ(|𝓔|²)𝓔 of the stress.
pub fn newtonian_stress(e: &SymTensor, params: &PhysicalParams) -> SymTensor {
    e.scale(2.0 * gamma(e.norm_sq(), params))
}

/// Linearization tensor A_ijkl = μ₀(ε + |𝓔|²)^{−(1+α/2)}𝓔ᵢⱼ𝓔ₖₗ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moduli {
    pub coef: f64,
    pub e: SymTensor,
}

impl Moduli {
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.coef * (self.e.m[i][j] * self.e.m[k][l])
    }

    /// (A:D)ᵢⱼ = A_ijkl Dₖₗ.
    pub fn contract(&self, d: &SymTensor) -> SymTensor {
        self.e.scale(self.coef * self.e.dot(d))
    }

    /// D:A:D = A_ijkl Dᵢⱼ Dₖₗ.
    pub fn quadratic(&self, d: &SymTensor) -> f64 {
        let ed = self.e.dot(d);
        self.coef * ed * ed
    }
}

pub fn linearized_moduli(e: &SymTensor, params: &PhysicalParams) -> Moduli {
    let w = params.eps + e.norm_sq();
    Moduli {
        coef: params.mu0 * libm::pow(w, -(1.0 + 0.5 * params.alpha)),
        e: *e,
    }
}

/// Directional derivative of Γ(𝓔)𝓔 at `e` along `d`: Γ(𝓔)D − αA(𝓔):D.
#[inline]
pub fn stress_derivative(e: &SymTensor, d: &SymTensor, params: &PhysicalParams) -> SymTensor {
    let s = e.norm_sq();
    let g = gamma(s, params);
    if params.alpha == 0.0 {
        return d.scale(g);
    }
    let w = params.eps + s;
    let coef = params.mu0 * libm::pow(w, -(1.0 + 0.5 * params.alpha));
    d.scale(g).axpy(-params.alpha * coef * e.dot(d), e)
}

/// Pointwise coercivity margin of the linearized stress.
///
/// Left side: D:(δ(2Γ𝓔))[D] = 2(Γ|D|² − α D:A:D). Right side:
/// 2εαμ₀|D|²/w^{1+α/2} + 2(1−α)μ₀|D|²/w^{α/2} with w = ε + |𝓔|². The margin
/// equals 2αμ₀w^{−1−α/2}(|𝓔|²|D|² − (𝓔:D)²), which is nonnegative.
pub fn coercivity_gap_density(e: &SymTensor, d: &SymTensor, params: &PhysicalParams) -> f64 {
    let a = params.alpha;
    let s = e.norm_sq();
    let dd = d.norm_sq();
    let w = params.eps + s;
    let moduli = linearized_moduli(e, params);
    let lhs = 2.0 * (gamma(s, params) * dd - a * moduli.quadratic(d));
    let first = 2.0 * params.eps * a * params.mu0 * dd * libm::pow(w, -(1.0 + 0.5 * a));
    let second = 2.0 * (1.0 - a) * params.mu0 * dd * libm::pow(w, -0.5 * a);
    lhs - first - second
}

/// Integrated coercivity margin over collocation points with cell volume `dv`.
pub fn coercivity_gap(
    base: &[SymTensor],
    dir: &[SymTensor],
    params: &PhysicalParams,
    dv: f64,
) -> f64 {
    base.iter()
        .zip(dir)
        .map(|(e, d)| coercivity_gap_density(e, d, params))
        .sum::<f64>()
        * dv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64) -> PhysicalParams {
        PhysicalParams {
            eps: 0.5,
            mu0: 1.3,
            mu1: 1.0,
            alpha,
            mu: 1.0,
            s_diff: 1.0,
            f_amp: 0.0,
        }
    }

    #[test]
    fn strain_of_identity_and_shear() {
        let mut g = [[0.0; 3]; 3];
        g[0][0] = 1.0;
        g[1][1] = 1.0;
        assert_eq!(strain_rate(2, &g), SymTensor::identity(2));

        let mut g = [[0.0; 3]; 3];
        g[0][1] = 1.0;
        let e = strain_rate(2, &g);
        assert_eq!(e.m[0][1], 0.5);
        assert_eq!(e.m[1][0], 0.5);
        assert_eq!(e.m[0][0], 0.0);
    }

    #[test]
    fn gamma_examples() {
        let p = params(0.0);
        assert_eq!(gamma(0.0, &p), p.mu0);
        assert_eq!(gamma(17.0, &p), p.mu0);
        let p = PhysicalParams {
            mu0: 2.0,
            eps: 1.0,
            alpha: 1.0,
            ..params(0.0)
        };
        assert!((gamma(3.0, &p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sigma_examples() {
        let p = params(0.0);
        assert_eq!(sigma_potential(0.0, &p), 0.0);
        assert!((sigma_potential(2.5, &p) - p.mu0 * 2.5).abs() < 1e-15);
        assert_eq!(sigma_potential(0.0, &params(0.6)), 0.0);
    }

    #[test]
    fn stress_limits() {
        let e = SymTensor::from_upper(2, &[[0.3, -0.2, 0.0], [0.0, -0.3, 0.0], [0.0; 3]]);
        assert_eq!(
            newtonian_stress(&SymTensor::zero(2), &params(0.4)),
            SymTensor::zero(2)
        );
        let p = params(0.0);
        let s = newtonian_stress(&e, &p);
        assert_eq!(s, e.scale(2.0 * p.mu0));
    }

    #[test]
    fn moduli_vanish_at_zero_strain() {
        let a = linearized_moduli(&SymTensor::zero(3), &params(0.5));
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        assert_eq!(a.get(i, j, k, l), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn stress_derivative_alpha_zero_is_linear() {
        let e = SymTensor::from_upper(3, &[[0.1, 0.4, -0.2], [0.0, 0.3, 0.7], [0.0, 0.0, -0.4]]);
        let d = SymTensor::from_upper(3, &[[1.0, 0.2, 0.0], [0.0, -0.5, 0.1], [0.0, 0.0, -0.5]]);
        let p = params(0.0);
        assert_eq!(stress_derivative(&e, &d, &p), d.scale(p.mu0));
    }

    #[test]
    fn coercivity_gap_vanishes_for_parallel_directions() {
        let e = SymTensor::from_upper(2, &[[0.8, 0.3, 0.0], [0.0, -0.8, 0.0], [0.0; 3]]);
        let p = params(0.7);
        let gap = coercivity_gap_density(&e, &e.scale(2.0), &p);
        assert!(gap.abs() < 1e-13, "{gap}");
        assert_eq!(coercivity_gap_density(&e, &SymTensor::zero(2), &p), 0.0);
    }
}
