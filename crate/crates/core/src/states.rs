//! Peak states `(1-ν²)ⁿ ν^N (Σₖ wₖ D†(γₖ)) ν^N` and their phase-space descriptors.
//!
//! Every peak contributes a Gaussian in α to the characteristic function, so the
//! Wigner function, every s-ordered quasiprobability and the heterodyne density
//! are finite sums of oscillating Gaussians and are evaluated in closed form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurements::SignedGaussianMixture;
use crate::numerics::{clamped_exp, Cn, SymmetricUnitary};

/// Centers closer than this are treated as the same peak.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Peak {
    pub weight: Complex64,
    pub center: Cn,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeakState {
    n: usize,
    nu: f64,
    eps0: Option<f64>,
    peaks: Vec<Peak>,
}

impl PeakState {
    /// Thermal state `(1-ν²)ⁿ ν^{2N}`.
    pub fn thermal(n: usize, nu: f64) -> Result<Self> {
        let peaks = vec![Peak { weight: Complex64::new(1.0, 0.0), center: Cn::zeros(n) }];
        Self::from_peaks(n, nu, None, peaks)
    }

    /// Builds a state from an explicit peak list, merging coincident centers and
    /// validating normalization, Hermiticity and the sufficient positivity condition.
    pub fn from_peaks(n: usize, nu: f64, eps0: Option<f64>, peaks: Vec<Peak>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("mode count must be >= 1".into()));
        }
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::Domain(format!("nu must lie in (0,1), got {nu}")));
        }
        if peaks.iter().any(|p| p.center.len() != n || !p.center.is_finite()) {
            return Err(Error::Domain(format!("every peak center must be a finite {n}-vector")));
        }
        let peaks = merge_peaks(peaks);
        let state = PeakState { n, nu, eps0, peaks };
        state.validate()?;
        Ok(state)
    }

    fn validate(&self) -> Result<()> {
        let scale = 1e-9;
        let anchor = self.peaks.iter().find(|p| p.center.norm_sqr().sqrt() <= MERGE_TOL);
        match anchor {
            Some(p) if (p.weight - 1.0).norm() <= scale => {}
            _ => return Err(Error::Domain("peak state needs the anchor peak (1, 0)".into())),
        }
        for p in &self.peaks {
            let mirrored = -&p.center;
            let partner = self
                .peaks
                .iter()
                .find(|q| q.center.max_abs_diff(&mirrored) <= 1e-9 * (1.0 + p.center.norm_sqr().sqrt()));
            match partner {
                Some(q) if (q.weight - p.weight.conj()).norm() <= scale => {}
                _ => {
                    return Err(Error::Domain(format!(
                        "peak at {} has no Hermitian partner (conj weight at the mirrored center)",
                        p.center
                    )))
                }
            }
        }
        let off: f64 = self
            .peaks
            .iter()
            .filter(|p| p.center.norm_sqr().sqrt() > MERGE_TOL)
            .map(|p| p.weight.norm())
            .sum();
        if off > 1.0 + 1e-12 {
            return Err(Error::Domain(format!(
                "sum of off-center peak weights is {off}; positivity is only guaranteed up to 1"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn eps0(&self) -> Option<f64> {
        self.eps0
    }

    pub fn peaks(&self) -> &[Peak] {
        &self.peaks
    }

    /// `σ² = (1/ν − ν)/2`.
    pub fn sigma2(&self) -> f64 {
        sigma2(self.nu)
    }

    /// `Σ² = (1+ν)/(1−ν)`.
    pub fn big_sigma2(&self) -> f64 {
        big_sigma2(self.nu)
    }

    /// Thermal decay rate `a = 1/(2σ²) + 1/(2Σ²)`; the thermal state has χ = e^{−a|α|²}.
    pub fn a(&self) -> f64 {
        thermal_rate(self.nu)
    }

    /// `1/(2σ²)`, the weight of the `|γ−α|²` term in the per-peak kernel.
    pub fn coupling(&self) -> f64 {
        self.nu / (1.0 - self.nu * self.nu)
    }

    pub fn is_thermal(&self) -> bool {
        self.peaks.len() == 1
    }

    /// `Some((ε₀, γ))` when the peaks have the three-peak layout `{(1,0), (2iε₀,γ), (−2iε₀,−γ)}`.
    pub fn three_peak_params(&self) -> Option<(f64, Cn)> {
        if self.peaks.len() != 3 {
            return None;
        }
        let p = self.peaks.iter().find(|p| {
            p.center.norm_sqr() > 0.0 && p.weight.re.abs() <= 1e-14 && p.weight.im > 0.0
        })?;
        Some((p.weight.im / 2.0, p.center.clone()))
    }

    /// Characteristic function `Tr[ρ D(α)]`.
    pub fn char_fn(&self, alpha: &Cn) -> Complex64 {
        let inv_big = 1.0 / (2.0 * self.big_sigma2());
        let coupling = self.coupling();
        let a2 = alpha.norm_sqr();
        self.peaks
            .iter()
            .map(|p| {
                let g2 = p.center.norm_sqr();
                let d2: f64 = p.center.iter().zip(alpha.iter()).map(|(g, a)| (g - a).norm_sqr()).sum();
                p.weight * clamped_exp(-inv_big * (a2 + g2) - coupling * d2)
            })
            .sum()
    }

    /// `e^{s|α|²/2} χ(α)`.
    pub fn s_char_fn(&self, s: f64, alpha: &Cn) -> Result<Complex64> {
        check_order(s)?;
        Ok(self.char_fn(alpha) * (s * alpha.norm_sqr() / 2.0).exp())
    }

    /// Wigner function, normalized to unit phase-space integral.
    pub fn wigner(&self, beta: &Cn) -> f64 {
        SignedGaussianMixture::s_ordered(self, 0.0).eval(beta)
    }

    /// s-ordered quasiprobability; `s = 0` is Wigner, `s = −1` is Husimi Q.
    pub fn s_qpd(&self, s: f64, beta: &Cn) -> Result<f64> {
        check_order(s)?;
        Ok(SignedGaussianMixture::s_ordered(self, s).eval(beta))
    }

    /// Mean photon number `n(a − 1/2)`, the same for every peak configuration.
    pub fn mean_photon(&self) -> f64 {
        self.n as f64 * (self.a() - 0.5)
    }

    /// Reflection about the axes `U`: each peak `(w, γ)` goes to `(w, Uγ*)`, so the
    /// characteristic function becomes `α ↦ χ(Uα*)`.
    pub fn reflect(&self, u: &SymmetricUnitary) -> Result<PeakState> {
        self.check_dim(u)?;
        let peaks = self
            .peaks
            .iter()
            .map(|p| Peak { weight: p.weight, center: u.reflect_point(&p.center) })
            .collect();
        Self::from_peaks(self.n, self.nu, self.eps0, peaks)
    }

    /// Passive linear-optics map `χ(α) ↦ χ(Uᵀα)`; centers move to `U*γ`.
    pub fn apply_circuit(&self, u: &SymmetricUnitary) -> Result<PeakState> {
        self.check_dim(u)?;
        let uc = u.matrix().map(|z| z.conj());
        let peaks = self
            .peaks
            .iter()
            .map(|p| Peak { weight: p.weight, center: p.center.mul_by(&uc) })
            .collect();
        Self::from_peaks(self.n, self.nu, self.eps0, peaks)
    }

    /// The state fed to the second Bell port: the reflection about `U` followed by the
    /// circuit for `U`. Its characteristic function at `α*` equals `χ(α)` of `self`.
    pub fn bell_partner(&self, u: &SymmetricUnitary) -> Result<PeakState> {
        self.reflect(u)?.apply_circuit(u)
    }

    /// Same peak multiset up to merge tolerance.
    pub fn same_peaks(&self, other: &PeakState, tol: f64) -> bool {
        self.n == other.n
            && (self.nu - other.nu).abs() <= tol
            && self.peaks.len() == other.peaks.len()
            && self.peaks.iter().all(|p| {
                other
                    .peaks
                    .iter()
                    .any(|q| q.center.max_abs_diff(&p.center) <= tol && (q.weight - p.weight).norm() <= tol)
            })
    }

    /// Classicality of a three-peak state; thermal states report `s_max = 1`.
    pub fn classicality(&self) -> Option<ClassicalityReport> {
        if self.is_thermal() {
            return Some(ClassicalityReport { s_max: 1.0, c: None, s_prime: s_prime(self.nu) });
        }
        let (eps0, gamma) = self.three_peak_params()?;
        classicality_smax(self.nu, eps0, &gamma).ok()
    }

    fn check_dim(&self, u: &SymmetricUnitary) -> Result<()> {
        if u.dim() != self.n {
            return Err(Error::Domain(format!("unitary is {}x{}, state has {} modes", u.dim(), u.dim(), self.n)));
        }
        Ok(())
    }
}

fn merge_peaks(peaks: Vec<Peak>) -> Vec<Peak> {
    let mut out: Vec<Peak> = Vec::with_capacity(peaks.len());
    for p in peaks {
        match out.iter_mut().find(|q| q.center.max_abs_diff(&p.center) <= MERGE_TOL) {
            Some(q) => q.weight += p.weight,
            None => out.push(p),
        }
    }
    out.retain(|p| p.weight.norm() > 1e-15);
    out
}

fn check_order(s: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("ordering parameter s must lie in [-1,1], got {s}")));
    }
    Ok(())
}

fn check_common(n: usize, nu: f64, eps0: f64, gamma: &Cn) -> Result<()> {
    if !(eps0 > 0.0 && eps0 <= 0.25) {
        return Err(Error::Domain(format!("eps0 must lie in (0, 1/4] for guaranteed positivity, got {eps0}")));
    }
    if gamma.len() != n {
        return Err(Error::Domain(format!("gamma has {} entries, expected {n}", gamma.len())));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::Domain(format!("nu must lie in (0,1), got {nu}")));
    }
    Ok(())
}

/// Peaks `{(1,0), (2iε₀,γ), (−2iε₀,−γ)}`.
pub fn make_three_peak(n: usize, nu: f64, eps0: f64, gamma: &Cn) -> Result<PeakState> {
    check_common(n, nu, eps0, gamma)?;
    let w = Complex64::new(0.0, 2.0 * eps0);
    let peaks = vec![
        Peak { weight: Complex64::new(1.0, 0.0), center: Cn::zeros(n) },
        Peak { weight: w, center: gamma.clone() },
        Peak { weight: -w, center: -gamma },
    ];
    PeakState::from_peaks(n, nu, Some(eps0), peaks)
}

/// Peaks `{(1,0), (iε₀,γ), (−iε₀,−γ), (iε₀,Uᵀγ*), (−iε₀,−Uᵀγ*)}`; invariant under reflection about `U`.
pub fn make_five_peak(n: usize, nu: f64, eps0: f64, gamma: &Cn, u: &SymmetricUnitary) -> Result<PeakState> {
    check_common(n, nu, eps0, gamma)?;
    if u.dim() != n {
        return Err(Error::Domain("unitary dimension does not match mode count".into()));
    }
    let w = Complex64::new(0.0, eps0);
    let mirrored = gamma.conj().mul_by(&u.matrix().transpose());
    let peaks = vec![
        Peak { weight: Complex64::new(1.0, 0.0), center: Cn::zeros(n) },
        Peak { weight: w, center: gamma.clone() },
        Peak { weight: -w, center: -gamma },
        Peak { weight: w, center: mirrored.clone() },
        Peak { weight: -w, center: -&mirrored },
    ];
    PeakState::from_peaks(n, nu, Some(eps0), peaks)
}

pub fn sigma2(nu: f64) -> f64 {
    (1.0 / nu - nu) / 2.0
}

pub fn big_sigma2(nu: f64) -> f64 {
    (1.0 + nu) / (1.0 - nu)
}

pub fn thermal_rate(nu: f64) -> f64 {
    1.0 / (2.0 * sigma2(nu)) + 1.0 / (2.0 * big_sigma2(nu))
}

/// `(1−ν²)/(1+ν²) = 1/(2a)`, a floor on the classicality of any three-peak state.
pub fn s_prime(nu: f64) -> f64 {
    (1.0 - nu * nu) / (1.0 + nu * nu)
}

/// Exponent of the oscillation envelope in the three-peak s-ordered QPD.
pub fn qpd_envelope_exponent(nu: f64, s: f64) -> f64 {
    0.5 - (1.0 - s) / ((1.0 - s) + nu * nu * (1.0 + s))
}

/// Frequency of the sine term in the three-peak s-ordered QPD.
pub fn qpd_frequency(nu: f64, s: f64) -> f64 {
    4.0 * nu / ((1.0 - s) + nu * nu * (1.0 + s))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalityReport {
    pub s_max: f64,
    /// `log(1/(4ε₀))/|γ|²`; absent for the thermal state.
    pub c: Option<f64>,
    pub s_prime: f64,
}

/// Largest ordering parameter with a nonnegative quasiprobability, for the three-peak family.
pub fn classicality_smax(nu: f64, eps0: f64, gamma: &Cn) -> Result<ClassicalityReport> {
    if !(nu > 0.0 && nu < 1.0) || !(eps0 > 0.0 && eps0 <= 0.25) {
        return Err(Error::Domain("classicality needs nu in (0,1) and eps0 in (0,1/4]".into()));
    }
    let g2 = gamma.norm_sqr();
    let sp = s_prime(nu);
    if g2 == 0.0 {
        return Ok(ClassicalityReport { s_max: 1.0, c: None, s_prime: sp });
    }
    let c = (1.0 / (4.0 * eps0)).ln() / g2;
    let nu2 = nu * nu;
    let s_max = ((1.0 - nu2 + 2.0 * c * (1.0 + nu2)) / (1.0 + nu2 + 2.0 * c * (1.0 - nu2))).min(1.0);
    Ok(ClassicalityReport { s_max, c: Some(c), s_prime: sp })
}

/// `|γ|²` must exceed this for a three-peak state to have classicality below `s_max`.
pub fn gamma_norm2_floor(s_max: f64, eps0: f64) -> f64 {
    2.0 / s_max * (1.0 / (4.0 * eps0)).ln()
}

/// Characteristic function of the single-photon Fock state.
pub fn fock1_char(alpha: &Cn) -> Result<Complex64> {
    if alpha.len() != 1 {
        return Err(Error::Domain("single-photon characteristic function is single-mode".into()));
    }
    let x = alpha.norm_sqr();
    Ok(Complex64::new((1.0 - x) * (-x / 2.0).exp(), 0.0))
}

#[derive(Serialize, Deserialize)]
struct PeakJson {
    w_re: f64,
    w_im: f64,
    center: Cn,
}

#[derive(Serialize, Deserialize)]
struct PeakStateJson {
    n: usize,
    nu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps0: Option<f64>,
    peaks: Vec<PeakJson>,
}

impl Serialize for PeakState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PeakStateJson {
            n: self.n,
            nu: self.nu,
            eps0: self.eps0,
            peaks: self
                .peaks
                .iter()
                .map(|p| PeakJson { w_re: p.weight.re, w_im: p.weight.im, center: p.center.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PeakState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PeakStateJson::deserialize(d)?;
        let peaks = raw
            .peaks
            .into_iter()
            .map(|p| Peak { weight: Complex64::new(p.w_re, p.w_im), center: p.center })
            .collect();
        PeakState::from_peaks(raw.n, raw.nu, raw.eps0, peaks).map_err(serde::de::Error::custom)
    }
}
