//! Fourier representation of periodic vector fields and the spatial operators
//! acting on them.
//!
//! A field is stored as one complex coefficient array per component, indexed
//! on the N^n lattice in FFT order with the last axis fastest. Coefficients
//! follow v(x) = Σ v̂(k)e^{ik·x}, so the forward transform is divided by N^n
//! and the L² inner product is Lⁿ Σ Re(v̂·conj ŵ).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use bipolar_mhd_core::{strain_rate, DomainSpec};
use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("unsupported norm `{0}`")]
    UnsupportedNorm(String),
    #[error("field does not live on this grid ({0})")]
    GridMismatch(&'static str),
}

/// Precomputed lattice data and FFT plans for one `DomainSpec`.
pub struct Grid {
    dom: DomainSpec,
    n: usize,
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    kvec: Vec<[f64; 3]>,
    ksq: Vec<f64>,
    keep: Vec<bool>,
    neg: Vec<usize>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("dom", &self.dom).finish()
    }
}

/// Integer wavenumber of FFT bin `i` on an axis of `n` points.
fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl Grid {
    pub fn new(dom: DomainSpec) -> Self {
        let n = dom.resolution;
        let dim = dom.dim;
        let len = n.pow(dim as u32);
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let k0 = dom.k_min();

        let mut kvec = Vec::with_capacity(len);
        let mut ksq = Vec::with_capacity(len);
        let mut keep = Vec::with_capacity(len);
        let mut neg = Vec::with_capacity(len);
        for idx in 0..len {
            let mut rest = idx;
            let mut m = [0i64; 3];
            let mut mirror = 0usize;
            for axis in (0..dim).rev() {
                let i = rest % n;
                rest /= n;
                m[axis] = signed_index(i, n);
                let j = (n - i) % n;
                mirror += j * n.pow((dim - 1 - axis) as u32);
            }
            let k = [k0 * m[0] as f64, k0 * m[1] as f64, k0 * m[2] as f64];
            kvec.push(k);
            ksq.push(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
            // 2/3 rule: a retained mode must satisfy 3|m_i| < N on every axis
            keep.push(m.iter().all(|&mi| 3 * mi.unsigned_abs() < n as u64));
            neg.push(mirror);
        }
        Grid {
            dom,
            n,
            len,
            fwd,
            inv,
            kvec,
            ksq,
            keep,
            neg,
        }
    }

    pub fn dom(&self) -> &DomainSpec {
        &self.dom
    }

    pub fn dim(&self) -> usize {
        self.dom.dim
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    /// Number of lattice points N^n.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn k(&self, idx: usize) -> [f64; 3] {
        self.kvec[idx]
    }

    pub fn ksq(&self, idx: usize) -> f64 {
        self.ksq[idx]
    }

    /// Flat index of the wavevector −k.
    pub fn mirror(&self, idx: usize) -> usize {
        self.neg[idx]
    }

    /// True when the mode survives dealiasing.
    pub fn retained(&self, idx: usize) -> bool {
        self.keep[idx]
    }

    /// Quadrature weight of one collocation point, Lⁿ/Nⁿ.
    pub fn cell_volume(&self) -> f64 {
        self.dom.volume() / self.len as f64
    }

    /// Flat indices of the retained nonzero modes.
    pub fn band(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.keep[i] && self.ksq[i] > 0.0)
    }

    /// Real dimension of the space of dealiased mean-zero divergence-free
    /// (u, b) pairs.
    pub fn pair_space_dim(&self) -> usize {
        2 * self.band().count() * (self.dim() - 1)
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let dim = self.dim();
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let mut lines = vec![Complex64::default(); self.len];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                fft.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = n * stride;
            let mut line = 0;
            for outer in (0..self.len).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for j in 0..n {
                        lines[line * n + j] = data[base + j * stride];
                    }
                    line += 1;
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            line = 0;
            for outer in (0..self.len).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for j in 0..n {
                        data[base + j * stride] = lines[line * n + j];
                    }
                    line += 1;
                }
            }
        }
    }

    /// Collocation values of one scalar coefficient array.
    pub fn scalar_to_physical(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.transform(&mut buf, &self.inv);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Coefficients of real collocation values, with reality symmetry enforced.
    pub fn scalar_from_physical(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, &self.fwd);
        let scale = 1.0 / self.len as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
        self.symmetrize(&mut buf);
        buf
    }

    /// ½(v̂(k) + conj v̂(−k)) on every mode.
    pub fn symmetrize(&self, c: &mut [Complex64]) {
        for idx in 0..self.len {
            let j = self.neg[idx];
            if j == idx {
                c[idx].im = 0.0;
            } else if idx < j {
                let s = 0.5 * (c[idx] + c[j].conj());
                c[idx] = s;
                c[j] = s.conj();
            }
        }
    }

    /// Coefficients of ∂ₗ applied to a scalar array.
    pub fn derivative(&self, c: &[Complex64], axis: usize) -> Vec<Complex64> {
        c.iter()
            .enumerate()
            .map(|(idx, &v)| Complex64::new(0.0, self.kvec[idx][axis]) * v)
            .collect()
    }

    pub fn zeros(&self) -> SpectralVectorField {
        SpectralVectorField {
            dom: self.dom,
            comps: vec![vec![Complex64::default(); self.len]; self.dim()],
        }
    }

    pub fn check(&self, v: &SpectralVectorField) -> Result<(), SpectralError> {
        if v.dom != self.dom {
            return Err(SpectralError::GridMismatch("domain"));
        }
        if v.comps.len() != self.dim() || v.comps.iter().any(|c| c.len() != self.len) {
            return Err(SpectralError::GridMismatch("shape"));
        }
        Ok(())
    }

    pub fn to_physical(&self, v: &SpectralVectorField) -> RealVectorField {
        RealVectorField {
            comps: v.comps.iter().map(|c| self.scalar_to_physical(c)).collect(),
        }
    }

    pub fn from_physical(&self, v: &RealVectorField) -> SpectralVectorField {
        SpectralVectorField {
            dom: self.dom,
            comps: v
                .comps
                .iter()
                .map(|c| self.scalar_from_physical(c))
                .collect(),
        }
    }

    /// Collocation values of the velocity gradient, `grad[i][j] = ∂ⱼvᵢ`.
    pub fn gradient_physical(&self, v: &SpectralVectorField) -> Vec<Vec<Vec<f64>>> {
        let dim = self.dim();
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| self.scalar_to_physical(&self.derivative(&v.comps[i], j)))
                    .collect()
            })
            .collect()
    }

    /// L² inner product (v, w) = Lⁿ Σ Re(v̂·conj ŵ).
    pub fn inner(&self, v: &SpectralVectorField, w: &SpectralVectorField) -> f64 {
        let mut s = 0.0;
        for (a, b) in v.comps.iter().zip(&w.comps) {
            for (x, y) in a.iter().zip(b) {
                s += x.re * y.re + x.im * y.im;
            }
        }
        s * self.dom.volume()
    }

    /// Lⁿ Σ w(|k|²)|v̂(k)|² for a real symbol weight.
    pub fn weighted_sum(&self, v: &SpectralVectorField, w: impl Fn(f64) -> f64) -> f64 {
        let mut s = 0.0;
        for c in &v.comps {
            for (idx, x) in c.iter().enumerate() {
                s += w(self.ksq[idx]) * x.norm_sqr();
            }
        }
        s * self.dom.volume()
    }

    pub fn leray_project(&self, v: &SpectralVectorField) -> SpectralVectorField {
        let mut out = v.clone();
        self.leray_project_in_place(&mut out);
        out
    }

    /// v̂ ← v̂ − k(k·v̂)/|k|²; the k = 0 mode is left alone.
    pub fn leray_project_in_place(&self, v: &mut SpectralVectorField) {
        let dim = self.dim();
        for idx in 0..self.len {
            let k2 = self.ksq[idx];
            if k2 == 0.0 {
                continue;
            }
            let k = self.kvec[idx];
            let mut kv = Complex64::default();
            for (a, c) in v.comps.iter().enumerate() {
                kv += k[a] * c[idx];
            }
            let kv = kv / k2;
            for (a, c) in v.comps.iter_mut().enumerate().take(dim) {
                c[idx] -= k[a] * kv;
            }
        }
    }

    /// Zeroes every mode with some 3|k_i| ≥ N (in units of k_min).
    pub fn dealias(&self, v: &SpectralVectorField) -> SpectralVectorField {
        let mut out = v.clone();
        self.dealias_in_place(&mut out);
        out
    }

    pub fn dealias_in_place(&self, v: &mut SpectralVectorField) {
        for c in v.comps.iter_mut() {
            for (idx, x) in c.iter_mut().enumerate() {
                if !self.keep[idx] {
                    *x = Complex64::default();
                }
            }
        }
    }

    pub fn enforce_reality(&self, v: &mut SpectralVectorField) {
        for c in v.comps.iter_mut() {
            self.symmetrize(c);
        }
    }

    /// Dealias, zero the mean and enforce reality: the canonical form of a
    /// state component.
    pub fn truncate(&self, v: &mut SpectralVectorField) {
        self.dealias_in_place(v);
        for c in v.comps.iter_mut() {
            c[0] = Complex64::default();
        }
        self.enforce_reality(v);
    }

    pub fn curl(&self, v: &SpectralVectorField) -> Curl {
        let d = |c: usize, axis: usize| self.derivative(&v.comps[c], axis);
        if self.dim() == 2 {
            let (a, b) = (d(1, 0), d(0, 1));
            Curl::Scalar(a.iter().zip(&b).map(|(x, y)| x - y).collect())
        } else {
            let comp = |i: usize, j: usize| {
                let (a, b) = (d(j, i), d(i, j));
                a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>()
            };
            // (∇×v)_x = ∂_y v_z − ∂_z v_y, cyclic
            Curl::Vector(SpectralVectorField {
                dom: self.dom,
                comps: vec![comp(1, 2), comp(2, 0), comp(0, 1)],
            })
        }
    }

    /// Δv as the symbol −|k|².
    pub fn laplacian(&self, v: &SpectralVectorField) -> SpectralVectorField {
        self.apply_symbol(v, |k2| -k2)
    }

    pub fn apply_symbol(
        &self,
        v: &SpectralVectorField,
        s: impl Fn(f64) -> f64,
    ) -> SpectralVectorField {
        let mut out = v.clone();
        for c in out.comps.iter_mut() {
            for (idx, x) in c.iter_mut().enumerate() {
                *x *= s(self.ksq[idx]);
            }
        }
        out
    }

    /// Dealiased pseudo-spectral (u·∇)v with reality enforced; not projected.
    pub fn advect(&self, u: &SpectralVectorField, v: &SpectralVectorField) -> SpectralVectorField {
        let up = self.to_physical(u);
        self.advect_physical(&up, v)
    }

    /// `advect` with the collocation values of u already available.
    pub fn advect_physical(
        &self,
        up: &RealVectorField,
        v: &SpectralVectorField,
    ) -> SpectralVectorField {
        let grad = self.gradient_physical(v);
        self.advect_with_gradient(up, &grad)
    }

    /// (u·∇)v from collocation values of u and of ∇v (`grad[i][j] = ∂ⱼvᵢ`).
    pub fn advect_with_gradient(
        &self,
        up: &RealVectorField,
        grad: &[Vec<Vec<f64>>],
    ) -> SpectralVectorField {
        let dim = self.dim();
        let comps = (0..dim)
            .map(|i| {
                let mut prod = vec![0.0; self.len];
                for (j, uj) in up.comps.iter().enumerate() {
                    for (p, (a, b)) in prod.iter_mut().zip(uj.iter().zip(&grad[i][j])) {
                        *p += a * b;
                    }
                }
                self.scalar_from_physical(&prod)
            })
            .collect();
        let mut out = SpectralVectorField {
            dom: self.dom,
            comps,
        };
        self.dealias_in_place(&mut out);
        out
    }

    /// Divergence of a symmetric tensor given by collocation values of its
    /// upper triangle (`sigma[i][j]` for j ≥ i), dealiased.
    pub fn tensor_divergence(&self, sigma: &[Vec<Vec<f64>>]) -> SpectralVectorField {
        let dim = self.dim();
        let mut hat = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            for j in i..dim {
                hat[i][j] = self.scalar_from_physical(&sigma[i][j]);
            }
        }
        let mut out = self.zeros();
        for i in 0..dim {
            for j in 0..dim {
                let s = if j >= i { &hat[i][j] } else { &hat[j][i] };
                for (idx, o) in out.comps[i].iter_mut().enumerate() {
                    *o += Complex64::new(0.0, self.kvec[idx][j]) * s[idx];
                }
            }
        }
        self.dealias_in_place(&mut out);
        out
    }

    /// Discrete Sobolev norm, squared.
    pub fn sobolev_norm_sq(
        &self,
        v: &SpectralVectorField,
        norm: Norm,
    ) -> Result<f64, SpectralError> {
        self.check(v)?;
        Ok(match norm {
            Norm::L2 => self.weighted_sum(v, |_| 1.0),
            Norm::H1 => self.weighted_sum(v, |k2| 1.0 + k2),
            Norm::H2 => self.weighted_sum(v, |k2| 1.0 + k2 + k2 * k2),
            Norm::V1diss => self.weighted_sum(v, |k2| 0.5 * k2 * k2),
            Norm::V2curl => self.weighted_sum(v, |k2| k2),
            Norm::W1p(p) => {
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(SpectralError::UnsupportedNorm(format!("w1p:{p}")));
                }
                self.w1p_norm_sq(v, p)
            }
        })
    }

    fn w1p_norm_sq(&self, v: &SpectralVectorField, p: f64) -> f64 {
        let vals = self.to_physical(v);
        let grad = self.gradient_physical(v);
        let dim = self.dim();
        let mut total = 0.0;
        for x in 0..self.len {
            let mut a = 0.0;
            let mut g = 0.0;
            for i in 0..dim {
                a += vals.comps[i][x] * vals.comps[i][x];
                for row in &grad[i] {
                    g += row[x] * row[x];
                }
            }
            total += a.powf(0.5 * p) + g.powf(0.5 * p);
        }
        (total * self.cell_volume()).powf(2.0 / p)
    }

    /// Σₖ (∂𝓔/∂x_k, ∂𝓔/∂x_k) by collocation quadrature.
    pub fn v1diss_collocation(&self, v: &SpectralVectorField) -> f64 {
        let dim = self.dim();
        let mut total = 0.0;
        for l in 0..dim {
            let dv = SpectralVectorField {
                dom: self.dom,
                comps: v.comps.iter().map(|c| self.derivative(c, l)).collect(),
            };
            let grad = self.gradient_physical(&dv);
            for x in 0..self.len {
                let mut g = [[0.0; 3]; 3];
                for i in 0..dim {
                    for j in 0..dim {
                        g[i][j] = grad[i][j][x];
                    }
                }
                total += strain_rate(dim, &g).norm_sq();
            }
        }
        total * self.cell_volume()
    }

    /// Collocation quadrature of ∫|v|².
    pub fn l2_collocation(&self, v: &RealVectorField) -> f64 {
        let s: f64 = v.comps.iter().flat_map(|c| c.iter()).map(|x| x * x).sum();
        s * self.cell_volume()
    }

    /// Random band-limited divergence-free field with spectrum decaying like
    /// |k|^{-2}, restricted to |k| ≤ `kmax`, normalized to unit L² norm.
    pub fn random_solenoidal(&self, rng: &mut impl Rng, kmax: f64) -> SpectralVectorField {
        let mut v = self.zeros();
        for idx in 0..self.len {
            let k2 = self.ksq[idx];
            if !self.keep[idx] || k2 == 0.0 || k2 > kmax * kmax {
                continue;
            }
            let amp = 1.0 / (1.0 + k2);
            for c in v.comps.iter_mut() {
                let re: f64 = rng.random_range(-1.0..1.0);
                let im: f64 = rng.random_range(-1.0..1.0);
                c[idx] = amp * Complex64::new(re, im);
            }
        }
        self.leray_project_in_place(&mut v);
        self.truncate(&mut v);
        let norm = self.inner(&v, &v).sqrt();
        if norm > 0.0 {
            v.scale_in_place(1.0 / norm);
        }
        v
    }

    /// Real field a·cos(k·x) + c·sin(k·x) for a lattice wavevector given in
    /// units of k_min, projected onto divergence-free fields. The amplitude
    /// vectors are in physical space.
    pub fn single_mode(
        &self,
        m: [i64; 3],
        cos_amp: [f64; 3],
        sin_amp: [f64; 3],
    ) -> SpectralVectorField {
        let n = self.n as i64;
        let mut flat = 0usize;
        for &mi in m.iter().take(self.dim()) {
            flat = flat * self.n + mi.rem_euclid(n) as usize;
        }
        let mirror = self.neg[flat];
        let mut v = self.zeros();
        for (i, c) in v.comps.iter_mut().enumerate() {
            // a cos θ + c sin θ = ½(a − ic)e^{iθ} + ½(a + ic)e^{−iθ}
            let z = 0.5 * Complex64::new(cos_amp[i], -sin_amp[i]);
            c[flat] += z;
            c[mirror] += z.conj();
        }
        self.leray_project_in_place(&mut v);
        v
    }

    /// max |k·v̂(k)|/|v̂(k)| over modes with nonzero coefficients.
    pub fn divergence_defect(&self, v: &SpectralVectorField) -> f64 {
        let mut worst: f64 = 0.0;
        for idx in 0..self.len {
            let k = self.kvec[idx];
            let mut kv = Complex64::default();
            let mut mag = 0.0;
            for (a, c) in v.comps.iter().enumerate() {
                kv += k[a] * c[idx];
                mag += c[idx].norm_sqr();
            }
            if mag > 0.0 {
                worst = worst.max(kv.norm() / mag.sqrt());
            }
        }
        worst
    }

    /// max |v̂(k) − conj v̂(−k)|.
    pub fn reality_defect(&self, v: &SpectralVectorField) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &v.comps {
            for idx in 0..self.len {
                worst = worst.max((c[idx] - c[self.neg[idx]].conj()).norm());
            }
        }
        worst
    }
}

/// Curl of a field: a scalar in two dimensions, a vector in three.
#[derive(Debug, Clone, PartialEq)]
pub enum Curl {
    Scalar(Vec<Complex64>),
    Vector(SpectralVectorField),
}

/// Fourier coefficients of a periodic vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVectorField {
    pub dom: DomainSpec,
    pub comps: Vec<Vec<Complex64>>,
}

impl SpectralVectorField {
    pub fn scale_in_place(&mut self, s: f64) {
        for c in self.comps.iter_mut() {
            for x in c.iter_mut() {
                *x *= s;
            }
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale_in_place(s);
        out
    }

    /// self += s·other
    pub fn axpy(&mut self, s: f64, other: &SpectralVectorField) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += s * y;
            }
        }
    }

    pub fn sub(&self, other: &SpectralVectorField) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|x| x.re == 0.0 && x.im == 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|x| x.re.is_finite() && x.im.is_finite()))
    }
}

/// Collocation values of a vector field, one array per component.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVectorField {
    pub comps: Vec<Vec<f64>>,
}

impl RealVectorField {
    /// max over points of the Euclidean magnitude.
    pub fn max_magnitude(&self) -> f64 {
        let len = self.comps.first().map_or(0, |c| c.len());
        let mut worst: f64 = 0.0;
        for x in 0..len {
            let s: f64 = self.comps.iter().map(|c| c[x] * c[x]).sum();
            worst = worst.max(s);
        }
        worst.sqrt()
    }
}

/// Discrete norms; see [`Grid::sobolev_norm_sq`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    L2,
    H1,
    H2,
    /// Σ ½|k|⁴|v̂|²Lⁿ, equal to (∂𝓔/∂x_k, ∂𝓔/∂x_k) for divergence-free fields.
    V1diss,
    /// Σ |k|²|v̂|²Lⁿ, the curl norm of divergence-free fields.
    V2curl,
    W1p(f64),
}

impl FromStr for Norm {
    type Err = SpectralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Ok(match lower.as_str() {
            "l2" => Norm::L2,
            "h1" => Norm::H1,
            "h2" => Norm::H2,
            "v1diss" => Norm::V1diss,
            "v2curl" => Norm::V2curl,
            other => {
                let p = other
                    .strip_prefix("w1p:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| SpectralError::UnsupportedNorm(s.to_string()))?;
                Norm::W1p(p)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        Grid::new(DomainSpec::new(2, 2.0 * PI, n))
    }

    #[test]
    fn physical_round_trip() {
        let g = grid(16);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = g.random_solenoidal(&mut rng, 5.0);
        let back = g.from_physical(&g.to_physical(&v));
        assert!(back
            .sub(&v)
            .comps
            .iter()
            .flatten()
            .all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn gradient_is_annihilated() {
        let g = grid(16);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut v = g.zeros();
        for idx in g.band() {
            let phi = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let k = g.k(idx);
            for (a, c) in v.comps.iter_mut().enumerate() {
                c[idx] = Complex64::new(0.0, k[a]) * phi;
            }
        }
        let p = g.leray_project(&v);
        assert!(p.comps.iter().flatten().all(|x| x.norm() < 1e-14));
    }

    #[test]
    fn projection_fixes_solenoidal_fields() {
        let g = grid(16);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = g.random_solenoidal(&mut rng, 6.0);
        let p = g.leray_project(&v);
        assert!(p.sub(&v).comps.iter().flatten().all(|x| x.norm() < 1e-15));
        assert!(g.divergence_defect(&v) < 1e-12);
    }

    #[test]
    fn curl_of_sine_shear() {
        let g = grid(16);
        // u = sin(x) ê₂
        let u = g.single_mode([1, 0, 0], [0.0; 3], [0.0, 1.0, 0.0]);
        let Curl::Scalar(w) = g.curl(&u) else {
            panic!("2D curl is scalar")
        };
        let vals = g.scalar_to_physical(&w);
        for (x, v) in vals.iter().enumerate() {
            let xi = (x / 16) as f64 * 2.0 * PI / 16.0;
            assert!((v - xi.cos()).abs() < 1e-14);
        }
        let Curl::Scalar(w) = g.curl(&g.zeros()) else {
            panic!()
        };
        assert!(w.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn curl_curl_is_minus_laplacian_in_3d() {
        let g = Grid::new(DomainSpec::new(3, 2.0 * PI, 8));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = g.random_solenoidal(&mut rng, 3.0);
        let Curl::Vector(c) = g.curl(&b) else {
            panic!("3D curl is a vector")
        };
        let Curl::Vector(cc) = g.curl(&c) else {
            panic!()
        };
        let mut sum = cc.clone();
        sum.axpy(1.0, &g.laplacian(&b));
        let rel = g.inner(&sum, &sum).sqrt() / g.inner(&cc, &cc).sqrt();
        assert!(rel < 1e-12, "{rel}");
    }

    #[test]
    fn dealias_examples() {
        let g = grid(16);
        let low = g.single_mode([2, 1, 0], [1.0, -2.0, 0.0], [0.0; 3]);
        assert_eq!(g.dealias(&low), low);
        let high = g.single_mode([6, 0, 0], [0.0, 1.0, 0.0], [0.0; 3]);
        assert!(g.dealias(&high).is_zero());
        let once = g.dealias(&g.single_mode([4, 5, 0], [1.0, 1.0, 0.0], [0.0; 3]));
        assert_eq!(g.dealias(&once), once);
    }

    #[test]
    fn advect_trivial_cases() {
        let g = grid(16);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = g.random_solenoidal(&mut rng, 4.0);
        assert!(g.advect(&g.zeros(), &v).is_zero());
        assert!(g.advect(&v, &g.zeros()).is_zero());
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let g = grid(8);
        for norm in [
            Norm::L2,
            Norm::H1,
            Norm::H2,
            Norm::V1diss,
            Norm::V2curl,
            Norm::W1p(1.5),
        ] {
            assert_eq!(g.sobolev_norm_sq(&g.zeros(), norm).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_mode_curl_norm() {
        let g = grid(16);
        // û(±k₀) = a/2 per component for a cos profile of amplitude a
        let u = g.single_mode([2, 0, 0], [0.0, 3.0, 0.0], [0.0; 3]);
        let v2 = g.sobolev_norm_sq(&u, Norm::V2curl).unwrap();
        let expect = 4.0 * 1.5 * 1.5 * (2.0 * PI).powi(2) * 2.0;
        assert!((v2 - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn norm_tags_parse() {
        assert_eq!("L2".parse::<Norm>().unwrap(), Norm::L2);
        assert_eq!("w1p:1.5".parse::<Norm>().unwrap(), Norm::W1p(1.5));
        assert!("h7".parse::<Norm>().is_err());
        let g = grid(8);
        assert!(g.sobolev_norm_sq(&g.zeros(), Norm::W1p(0.5)).is_err());
    }

    #[test]
    fn pair_space_counts_real_dimensions() {
        // N = 8: |m_i| ≤ 2 on each axis gives 25 modes, 24 nonzero
        let g = grid(8);
        assert_eq!(g.band().count(), 24);
        assert_eq!(g.pair_space_dim(), 48);
    }
}
