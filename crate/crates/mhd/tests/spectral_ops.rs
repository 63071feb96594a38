use bipolar_mhd::spectral::{Curl, Grid, Norm, RealVectorField, SpectralVectorField};
use bipolar_mhd_core::{discrete_korn, DomainSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(dim: usize, n: usize) -> Grid {
    Grid::new(DomainSpec::new(dim, std::f64::consts::TAU, n))
}

/// A random field that is not divergence-free.
fn random_field(g: &Grid, rng: &mut impl Rng) -> SpectralVectorField {
    let comps = (0..g.dim())
        .map(|_| (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let mut v = g.from_physical(&RealVectorField { comps });
    g.truncate(&mut v);
    v
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn projection_is_self_adjoint_and_idempotent() {
    let g = grid(2, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let v = random_field(&g, &mut rng);
        let w = random_field(&g, &mut rng);
        let pv = g.leray_project(&v);
        let lhs = g.inner(&pv, &w);
        let rhs = g.inner(&v, &g.leray_project(&w));
        assert!((lhs - rhs).abs() <= 1e-12 * (g.inner(&v, &v) * g.inner(&w, &w)).sqrt());
        let ppv = g.leray_project(&pv);
        assert!(ppv
            .sub(&pv)
            .comps
            .iter()
            .flatten()
            .all(|c| c.norm() <= 1e-15));
        assert!(g.divergence_defect(&pv) < 1e-12);
    }
}

#[test]
fn curl_curl_is_minus_laplacian_on_solenoidal_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for dim in [2, 3] {
        let g = grid(dim, if dim == 2 { 32 } else { 12 });
        let b = g.random_solenoidal(&mut rng, 20.0);
        let cc = match g.curl(&b) {
            Curl::Scalar(w) => {
                // In the plane, curl of the scalar ω is (∂₂ω, −∂₁ω).
                let d1 = g.derivative(&w, 1);
                let d0 = g.derivative(&w, 0);
                SpectralVectorField {
                    dom: *g.dom(),
                    comps: vec![d1, d0.iter().map(|c| -c).collect()],
                }
            }
            Curl::Vector(w) => match g.curl(&w) {
                Curl::Vector(cc) => cc,
                Curl::Scalar(_) => unreachable!(),
            },
        };
        let mut sum = cc.clone();
        sum.axpy(1.0, &g.laplacian(&b));
        let lap = g.laplacian(&b);
        assert!(
            g.inner(&sum, &sum).sqrt() <= 1e-12 * g.inner(&lap, &lap).sqrt(),
            "dim {dim}"
        );
    }
}

#[test]
fn advection_is_skew() {
    let g = grid(2, 32);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let u = g.random_solenoidal(&mut rng, 30.0);
        let v = g.random_solenoidal(&mut rng, 30.0);
        let a = g.inner(&g.advect(&u, &v), &v);
        let scale = g.inner(&u, &u).sqrt() * g.inner(&v, &v);
        assert!(a.abs() <= 1e-10 * scale, "{a}");
    }
}

#[test]
fn lorentz_terms_cancel() {
    let g = grid(3, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let u = g.random_solenoidal(&mut rng, 10.0);
    let b = g.random_solenoidal(&mut rng, 10.0);
    let s = g.inner(&g.advect(&b, &b), &u) + g.inner(&g.advect(&b, &u), &b);
    assert!(s.abs() <= 1e-10 * g.inner(&u, &u).sqrt() * g.inner(&b, &b));
}

#[test]
fn parseval_matches_collocation() {
    let g = grid(2, 24);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10 {
        let v = random_field(&g, &mut rng);
        let spectral = g.sobolev_norm_sq(&v, Norm::L2).unwrap();
        let physical = g.l2_collocation(&g.to_physical(&v));
        assert!(rel(spectral, physical) < 1e-12);
    }
}

#[test]
fn dissipation_norm_two_ways() {
    let g = grid(2, 32);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..10 {
        let u = g.random_solenoidal(&mut rng, 12.0);
        let symbol = g.sobolev_norm_sq(&u, Norm::V1diss).unwrap();
        let quad = g.v1diss_collocation(&u);
        assert!(rel(symbol, quad) < 1e-10, "{symbol} vs {quad}");
    }
}

#[test]
fn korn_constant_is_a_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for length in [std::f64::consts::TAU, 3.0] {
        let dom = DomainSpec::new(2, length, 8);
        let g = Grid::new(dom);
        let k = discrete_korn(&dom);
        let mut best = f64::INFINITY;
        for _ in 0..10_000 {
            let u = g.random_solenoidal(&mut rng, 100.0);
            let ratio = g.sobolev_norm_sq(&u, Norm::V1diss).unwrap()
                / g.sobolev_norm_sq(&u, Norm::H2).unwrap();
            best = best.min(ratio);
        }
        assert!(best >= k * (1.0 - 1e-12), "{best} < {k}");
        let u = g.single_mode([1, 0, 0], [0.0, 1.0, 0.0], [0.0; 3]);
        let ratio =
            g.sobolev_norm_sq(&u, Norm::V1diss).unwrap() / g.sobolev_norm_sq(&u, Norm::H2).unwrap();
        assert!(rel(ratio, k) < 1e-12);
    }
}

#[test]
fn w1p_requires_a_valid_exponent() {
    let g = grid(2, 8);
    let v = g.zeros();
    assert_eq!(g.sobolev_norm_sq(&v, Norm::W1p(1.5)).unwrap(), 0.0);
    assert!(g.sobolev_norm_sq(&v, Norm::W1p(0.5)).is_err());
    assert!("w1p:abc".parse::<Norm>().is_err());
}
