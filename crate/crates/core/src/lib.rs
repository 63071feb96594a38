//! Closed-form pieces of the bipolar shear-thinning MHD model.
//!
//! This crate holds everything that does not need a spectral grid: the
//! physical and domain constants with their derived quantities, the pointwise
//! rheology (viscosity law, potential, linearization tensor, coercivity), and
//! the calculators for the absorbing-ball radii and the attractor dimension
//! bound. It is `no_std` (with `alloc`) so the constant calculators can be
//! embedded anywhere; the solver lives in the `bipolar-mhd` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bounds;
pub mod params;
pub mod rheology;

pub use bounds::{
    delta_prime, dimension_bound, gamma_prime, gronwall_envelope, lambda_big, BoundError,
    DimensionBoundReport, GammaPrime, GammaPrimeBranch,
};
pub use params::{
    absorbing_radius_sq, discrete_korn, forcing_gain, kappa0, kappa_chain, lambda1, nu0, validate,
    DomainConstants, DomainSpec, KappaConstants, KappaError, KappaReport, PhysicalParams,
    ValidationReport, Violation,
};
pub use rheology::{
    coercivity_gap, coercivity_gap_density, gamma, linearized_moduli, newtonian_stress,
    sigma_potential, strain_rate, stress_derivative, Moduli, SymTensor,
};
