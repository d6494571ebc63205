//! Dense truncated Fock-basis matrices for one or two modes.
//!
//! This is a brute-force cross-check of the closed forms in [`crate::states`], not
//! a production path. Matrix elements of `D(α)` are computed exactly (no truncated
//! exponentials), so the top-left block of `ν^N D†(γ) ν^N` is exact and the only
//! error is the discarded photon-number tail.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{min_eigenvalue, Cn, CMatrix};
use crate::states::PeakState;

/// Largest total dimension the oracle will allocate.
pub const MAX_DIM: usize = 4096;

#[derive(Clone, Debug)]
pub struct FockMatrix {
    pub n: usize,
    pub cutoff: usize,
    pub data: CMatrix,
}

impl FockMatrix {
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        crate::numerics::is_hermitian(&self.data, tol)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.data)
    }

    /// `Tr[ρ D(α)]`.
    pub fn char_fn(&self, alpha: &Cn) -> Result<Complex64> {
        let d = displacement_matrix(alpha, self.cutoff)?;
        Ok(trace_product(&self.data, &d.data))
    }

    /// `Tr[ρ N]`.
    pub fn mean_photon(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.data[(i, i)].re * photons(i, self.cutoff, self.n) as f64)
            .sum()
    }

    /// `⟨ζ|ρ|ζ⟩/πⁿ`.
    pub fn husimi(&self, zeta: &Cn) -> Result<f64> {
        self.check_point(zeta)?;
        let per_mode: Vec<Vec<Complex64>> = zeta.iter().map(|&z| coherent_amplitudes(z, self.cutoff)).collect();
        let v = kron_vectors(&per_mode);
        let rv = &self.data * nalgebra::DVector::from_vec(v.clone());
        let value: Complex64 = v.iter().zip(rv.iter()).map(|(a, b)| a.conj() * b).sum();
        Ok(value.re / std::f64::consts::PI.powi(self.n as i32))
    }

    /// Wigner function from the displaced parity: `(2/π)ⁿ Tr[ρ D(β) Π D(β)†]`.
    pub fn wigner(&self, beta: &Cn) -> Result<f64> {
        self.check_point(beta)?;
        let k = self.cutoff;
        let mut factors = Vec::with_capacity(self.n);
        for &b in beta.iter() {
            let wide = k + 40 + (8.0 * b.norm_sqr()).ceil() as usize;
            let d = single_mode_displacement(b, k, wide);
            let parity_d = CMatrix::from_fn(k, wide, |i, j| if j % 2 == 0 { d[(i, j)] } else { -d[(i, j)] });
            factors.push(parity_d * d.adjoint());
        }
        let m = kron_all(&factors);
        let t = trace_product(&self.data, &m);
        Ok(t.re * (2.0 / std::f64::consts::PI).powi(self.n as i32))
    }

    fn check_point(&self, z: &Cn) -> Result<()> {
        if z.len() != self.n {
            return Err(Error::Domain(format!("point has {} modes, matrix has {}", z.len(), self.n)));
        }
        Ok(())
    }
}

/// Per-mode cutoff `ceil((ν²/(1−ν²) + max|γₖ|²)·8 + 20)`.
pub fn recommended_cutoff(state: &PeakState) -> usize {
    let nu2 = state.nu() * state.nu();
    let g2 = state.peaks().iter().map(|p| p.center.norm_sqr()).fold(0.0, f64::max);
    ((nu2 / (1.0 - nu2) + g2) * 8.0 + 20.0).ceil() as usize
}

fn check_size(n: usize, cutoff: usize) -> Result<()> {
    if n == 0 || n > 2 {
        return Err(Error::Domain(format!("the Fock oracle supports 1 or 2 modes, got {n}")));
    }
    if cutoff == 0 || cutoff.pow(n as u32) > MAX_DIM {
        return Err(Error::Domain(format!(
            "cutoff {cutoff} gives dimension {} (limit {MAX_DIM})",
            cutoff.pow(n as u32)
        )));
    }
    Ok(())
}

/// Dense `ρ` for a peak state.
pub fn build_state(state: &PeakState, cutoff: usize) -> Result<FockMatrix> {
    let n = state.n();
    check_size(n, cutoff)?;
    let nu = state.nu();
    let dim = cutoff.pow(n as u32);
    let mut sum = CMatrix::zeros(dim, dim);
    for p in state.peaks() {
        let factors: Vec<CMatrix> = p.center.iter().map(|&g| single_mode_displacement(-g, cutoff, cutoff)).collect();
        sum += kron_all(&factors) * p.weight;
    }
    let norm = (1.0 - nu * nu).powi(n as i32);
    let filter: Vec<f64> = (0..dim).map(|i| nu.powi(photons(i, cutoff, n) as i32)).collect();
    let data = CMatrix::from_fn(dim, dim, |i, j| sum[(i, j)] * (norm * filter[i] * filter[j]));
    let rho = FockMatrix { n, cutoff, data };
    let tr = rho.trace();
    if (tr - 1.0).norm() > 1e-8 {
        return Err(Error::Numeric(format!(
            "cutoff {cutoff} too small: truncated trace is {tr}; try cutoff {}",
            recommended_cutoff(state).max(2 * cutoff)
        )));
    }
    Ok(rho)
}

/// Builds `ρ` with [`recommended_cutoff`].
pub fn build_state_auto(state: &PeakState) -> Result<FockMatrix> {
    build_state(state, recommended_cutoff(state))
}

/// `D(α)` restricted to the first `cutoff` levels of each mode.
pub fn displacement_matrix(alpha: &Cn, cutoff: usize) -> Result<FockMatrix> {
    let n = alpha.len();
    check_size(n, cutoff)?;
    let factors: Vec<CMatrix> = alpha.iter().map(|&a| single_mode_displacement(a, cutoff, cutoff)).collect();
    Ok(FockMatrix { n, cutoff, data: kron_all(&factors) })
}

/// `⟨m|D(α)|k⟩` for `m < rows`, `k < cols`.
///
/// Column recurrence from `D a† = (a† − α*) D`:
/// `D[m][k+1] = (√m D[m−1][k] − α* D[m][k]) / √(k+1)`.
pub fn single_mode_displacement(alpha: Complex64, rows: usize, cols: usize) -> CMatrix {
    let mut d = CMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return d;
    }
    d[(0, 0)] = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for m in 1..rows {
        d[(m, 0)] = d[(m - 1, 0)] * alpha / (m as f64).sqrt();
    }
    let ac = alpha.conj();
    for k in 0..cols - 1 {
        let s = ((k + 1) as f64).sqrt();
        for m in 0..rows {
            let up = if m > 0 { d[(m - 1, k)] * (m as f64).sqrt() } else { Complex64::new(0.0, 0.0) };
            d[(m, k + 1)] = (up - ac * d[(m, k)]) / s;
        }
    }
    d
}

/// `e^{−|z|²/2} zᵏ/√k!` for `k < cutoff`.
pub fn coherent_amplitudes(z: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(cutoff);
    let mut c = Complex64::new((-z.norm_sqr() / 2.0).exp(), 0.0);
    for k in 0..cutoff {
        if k > 0 {
            c = c * z / (k as f64).sqrt();
        }
        v.push(c);
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PetzReport {
    /// `log₂ Tr[ρ_γ ρ₀⁻¹ ρ_γ]` from the Fock matrices.
    pub numeric: f64,
    /// `log₂(1 + 8ε₀²(1 − e^{−4a|γ|²}))`.
    pub closed_form: f64,
}

/// Collision (order-2 Petz) divergence of a three-peak state from its thermal reference.
pub fn petz_d2(state_gamma: &PeakState, state_thermal: &PeakState) -> Result<PetzReport> {
    if !state_thermal.is_thermal() {
        return Err(Error::Domain("reference must be the thermal member of the family".into()));
    }
    if state_gamma.n() != state_thermal.n() || state_gamma.nu() != state_thermal.nu() {
        return Err(Error::Domain("states must share mode count and nu".into()));
    }
    let (eps0, gamma) = match state_gamma.three_peak_params() {
        Some(p) => p,
        None if state_gamma.is_thermal() => (0.0, Cn::zeros(state_gamma.n())),
        None => return Err(Error::Domain("first state must have the three-peak layout".into())),
    };
    let cutoff = recommended_cutoff(state_gamma);
    let rho = build_state(state_gamma, cutoff)?;
    let rho0 = build_state(state_thermal, cutoff)?;
    let dim = rho.dim();
    let mut total = 0.0;
    for j in 0..dim {
        let inv = 1.0 / rho0.data[(j, j)].re;
        for i in 0..dim {
            total += (rho.data[(i, j)] * rho.data[(j, i)]).re * inv;
        }
    }
    let closed = 1.0 + 8.0 * eps0 * eps0 * (1.0 - (-4.0 * state_gamma.a() * gamma.norm_sqr()).exp());
    let report = PetzReport { numeric: total.log2(), closed_form: closed.log2() };
    if (report.numeric - report.closed_form).abs() > 1e-5 {
        return Err(Error::Numeric(format!(
            "Petz divergence mismatch (numeric {}, closed form {}); cutoff {cutoff} insufficient",
            report.numeric, report.closed_form
        )));
    }
    Ok(report)
}

/// Total photon number of flat index `i` with `n` modes of `cutoff` levels (mode 0 most significant).
fn photons(mut i: usize, cutoff: usize, n: usize) -> usize {
    let mut total = 0;
    for _ in 0..n {
        total += i % cutoff;
        i /= cutoff;
    }
    total
}

fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let dim = a.nrows();
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t
}

fn kron_all(factors: &[CMatrix]) -> CMatrix {
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = out.kronecker(f);
    }
    out
}

fn kron_vectors(factors: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = out.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
    }
    out
}

/// Real-valued diagonal photon-number operator, handy for spectra in tests.
pub fn number_diagonal(n: usize, cutoff: usize) -> DMatrix<f64> {
    let dim = cutoff.pow(n as u32);
    DMatrix::from_fn(dim, dim, |i, j| if i == j { photons(i, cutoff, n) as f64 } else { 0.0 })
}
