//! Random-displacement channels whose Bell-measured Choi states reproduce the
//! statistics of Bell-measured state pairs, and the single-photon witness that
//! this reduction fails for nonclassical states.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gaussian_point, min_eigenvalue, psd_check, CMatrix, Cn, PsdReport};
use crate::states::{fock1_char, PeakState};

/// Source of the channel characteristic function `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSource {
    /// `λ(α) = e^{e^{−2r}|α|²} χ_ρ(α)²`.
    FromState(PeakState),
    /// `λ(α) = e^{−c|α|²}(1 − |α|²)²` with `c = 1 − e^{−2r}`, single mode.
    Fock1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub r: f64,
    pub lambda: LambdaSource,
}

impl ChannelSpec {
    pub fn new(r: f64, lambda: LambdaSource) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("squeezing must be finite and >= 0, got {r}")));
        }
        Ok(ChannelSpec { r, lambda })
    }

    pub fn from_state(state: PeakState, r: f64) -> Result<Self> {
        Self::new(r, LambdaSource::FromState(state))
    }

    pub fn fock1(r: f64) -> Result<Self> {
        Self::new(r, LambdaSource::Fock1)
    }

    pub fn n(&self) -> usize {
        match &self.lambda {
            LambdaSource::FromState(s) => s.n(),
            LambdaSource::Fock1 => 1,
        }
    }

    /// `1 − e^{−2r}`, the damping of the single-photon family.
    pub fn c_channel(&self) -> f64 {
        -(-2.0 * self.r).exp_m1()
    }

    pub fn lambda(&self, beta: &Cn) -> Result<Complex64> {
        if beta.len() != self.n() {
            return Err(Error::Domain(format!("point has {} modes, channel has {}", beta.len(), self.n())));
        }
        let x = beta.norm_sqr();
        match &self.lambda {
            LambdaSource::FromState(s) => {
                let chi = s.char_fn(beta);
                Ok(chi * chi * ((-2.0 * self.r).exp() * x).exp())
            }
            LambdaSource::Fock1 => {
                fock1_char(beta)?;
                Ok(Complex64::new((-self.c_channel() * x).exp() * (1.0 - x).powi(2), 0.0))
            }
        }
    }
}

/// Choi envelope written as two squeezed quadratures.
pub fn envelope_form1(alpha: &Cn, beta: &Cn, r: f64) -> f64 {
    let bc = beta.conj();
    let minus = (alpha - &bc).norm_sqr();
    let plus = (alpha + &bc).norm_sqr();
    (-(2.0 * r).exp() / 4.0 * minus - (-2.0 * r).exp() / 4.0 * plus).exp()
}

/// Choi envelope written with the `sinh 2r` correlation term.
pub fn envelope_form2(alpha: &Cn, beta: &Cn, r: f64) -> f64 {
    let ch = (2.0 * r).cosh();
    let sh = (2.0 * r).sinh();
    (-ch / 2.0 * (alpha.norm_sqr() + beta.norm_sqr()) + sh * alpha.dot(beta).re).exp()
}

/// Characteristic function of the Choi state, `g(α,β,r) λ(β)`.
pub fn choi_char(spec: &ChannelSpec, alpha: &Cn, beta: &Cn) -> Result<Complex64> {
    if alpha.len() != spec.n() {
        return Err(Error::Domain("alpha has the wrong number of modes".into()));
    }
    Ok(spec.lambda(beta)? * envelope_form1(alpha, beta, spec.r))
}

/// `½ ln(1/s_max)`, the least squeezing at which the smoothing construction applies.
pub fn r_star(s_max: f64) -> Result<f64> {
    if !(s_max > 0.0) {
        return Err(Error::Domain(format!("no finite r exists for s_max = {s_max} <= 0")));
    }
    if s_max > 1.0 {
        return Err(Error::Domain(format!("s_max cannot exceed 1, got {s_max}")));
    }
    Ok(0.5 * (1.0 / s_max).ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    /// Covered by the smoothing construction (`r ≥ r*`).
    Guaranteed,
    /// A Gram matrix with a negative eigenvalue was found.
    Violated,
    /// Outside the guarantee and no violation found; the random checks are evidence only.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub r: f64,
    pub s_max: Option<f64>,
    pub r_star: Option<f64>,
    pub validity: Validity,
    pub lambda_at_zero: f64,
    pub point_sets: usize,
    pub set_size: usize,
    pub worst_min_eigenvalue: f64,
    pub psd_failures: usize,
}

/// Gram matrix `[λ(αⱼ − αₖ)]`.
pub fn bochner_matrix(lambda: &dyn Fn(&Cn) -> Result<Complex64>, points: &[Cn]) -> Result<CMatrix> {
    let k = points.len();
    let mut m = CMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = lambda(&(&points[i] - &points[j]))?;
        }
    }
    Ok(m)
}

/// Random Bochner checks of `λ`, combined with the classicality guarantee when available.
pub fn check_validity<R: Rng + ?Sized>(
    spec: &ChannelSpec,
    point_sets: usize,
    set_size: usize,
    spread: f64,
    tol: f64,
    rng: &mut R,
) -> Result<ValidityReport> {
    if set_size == 0 || set_size > 8 {
        return Err(Error::Domain("Bochner point sets must have between 1 and 8 points".into()));
    }
    let s_max = match &spec.lambda {
        LambdaSource::FromState(s) => s.classicality().map(|c| c.s_max),
        LambdaSource::Fock1 => None,
    };
    let threshold = s_max.filter(|s| *s > 0.0).map(r_star).transpose()?;
    let lam = |b: &Cn| spec.lambda(b);
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..point_sets {
        let pts: Vec<Cn> = (0..set_size).map(|_| gaussian_point(spec.n(), spread, rng)).collect();
        let m = bochner_matrix(&lam, &pts)?;
        let e = min_eigenvalue(&m);
        worst = worst.min(e);
        if e < -tol {
            failures += 1;
        }
    }
    let validity = if failures > 0 {
        Validity::Violated
    } else if threshold.is_some_and(|t| spec.r >= t - 1e-12) {
        Validity::Guaranteed
    } else {
        Validity::Unknown
    };
    Ok(ValidityReport {
        r: spec.r,
        s_max,
        r_star: threshold,
        validity,
        lambda_at_zero: spec.lambda(&Cn::zeros(spec.n()))?.re,
        point_sets,
        set_size,
        worst_min_eigenvalue: worst,
        psd_failures: failures,
    })
}

/// Displacement density of the would-be single-photon channel, `|β|²` only.
pub fn fock1_channel_density_radial(c: f64, t: f64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("channel damping must lie in (0,1), got {c}")));
    }
    let poly = t * t - (4.0 * c - 2.0 * c * c) * t + (c.powi(4) - 2.0 * c.powi(3) + 2.0 * c * c);
    Ok((-t / c).exp() * poly / (std::f64::consts::PI * c.powi(5)))
}

pub fn fock1_channel_density(c: f64, beta: &Cn) -> Result<f64> {
    if beta.len() != 1 {
        return Err(Error::Domain("the single-photon channel is single-mode".into()));
    }
    fock1_channel_density_radial(c, beta.norm_sqr())
}

/// Range of `|β|²` where the single-photon density is negative.
pub fn negativity_annulus(c: f64) -> Result<(f64, f64)> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("channel damping must lie in (0,1), got {c}")));
    }
    let w = (2.0 * (1.0 - c)).sqrt();
    Ok((c * (2.0 - c - w), c * (2.0 - c + w)))
}

/// Gram matrix of `λ(α) = (1 − |α|²)²` on `{0, α}` with `|α|² = 4`.
pub fn bochner_witness_c0() -> Result<(CMatrix, PsdReport)> {
    let points = [Cn::scalar(Complex64::new(0.0, 0.0)), Cn::scalar(Complex64::new(2.0, 0.0))];
    let spec = ChannelSpec::fock1(0.0)?;
    let m = bochner_matrix(&|b| spec.lambda(b), &points)?;
    let report = psd_check(&m, 1e-12)?;
    Ok((m, report))
}
