//! Characteristic-function estimators and Hoeffding sample-size planning.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurements::{MeasurementRecord, Scheme};
use crate::numerics::{sin_cos_fast, sin_cos_reduced, Cn, SIN_COS_RANGE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorScheme {
    /// Bell samples, estimate of `χ²`.
    #[serde(rename = "bell-chi2")]
    BellChiSquared,
    /// Bell samples, estimate of `χ` up to a per-query sign.
    BellChi,
    Heterodyne,
    /// Heterodyne with outputs forced to 0 beyond the effective radius `L_ε(S)`.
    ClassicalityAware,
}

impl std::str::FromStr for EstimatorScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bell-chi2" => Ok(Self::BellChiSquared),
            "bell-chi" => Ok(Self::BellChi),
            "heterodyne" => Ok(Self::Heterodyne),
            "classicality-aware" => Ok(Self::ClassicalityAware),
            _ => Err(Error::Domain(format!(
                "unknown scheme '{s}' (expected bell-chi2, bell-chi, heterodyne, classicality-aware)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub point: Cn,
    pub estimate: ComplexValue,
    pub scheme: EstimatorScheme,
    pub samples_used: usize,
    pub epsilon: f64,
    /// Failure probability the sample size was planned for, when known.
    pub delta: Option<f64>,
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for Complex64 {
    fn from(z: ComplexValue) -> Self {
        Complex64::new(z.re, z.im)
    }
}

fn check_record(record: &MeasurementRecord, scheme: Scheme, points: &[Cn]) -> Result<()> {
    if record.scheme() != scheme {
        return Err(Error::Domain(format!("record holds {:?} outcomes, estimator needs {scheme:?}", record.scheme())));
    }
    if record.is_empty() {
        return Err(Error::Domain("empty measurement record".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != record.n()) {
        return Err(Error::Domain(format!("query point {p} does not have {} modes", record.n())));
    }
    Ok(())
}

/// Empirical mean of `exp(sign · 2i Im(z·α))` over the outcomes, for every query
/// in one pass. `conjugate` switches to the Hermitian pairing `Im(z†α)`.
fn phase_means(record: &MeasurementRecord, points: &[Cn], sign: f64, conjugate: bool) -> Vec<Complex64> {
    let n = record.n();
    let m = points.len();
    // Phase of outcome z at point k is Σᵢ (Re zᵢ · wₖᵢ₀ + Im zᵢ · wₖᵢ₁).
    let mut weights = Vec::with_capacity(2 * n * m);
    for alpha in points {
        for a in alpha.iter() {
            let (wr, wi) = if conjugate { (a.im, -a.re) } else { (a.im, a.re) };
            weights.push(2.0 * sign * wr);
            weights.push(2.0 * sign * wi);
        }
    }
    const BLOCK: usize = 256;
    let mut phases = vec![0.0; BLOCK * m];
    let mut re = vec![0.0; m];
    let mut im = vec![0.0; m];
    for block in record.data().chunks(BLOCK * n) {
        let rows = block.len() / n;
        for (j, z) in block.chunks_exact(n).enumerate() {
            for (k, w) in weights.chunks_exact(2 * n).enumerate() {
                let mut t = 0.0;
                for (zi, wi) in z.iter().zip(w.chunks_exact(2)) {
                    t += zi.re * wi[0] + zi.im * wi[1];
                }
                phases[k * BLOCK + j] = t;
            }
        }
        for k in 0..m {
            let row = &phases[k * BLOCK..k * BLOCK + rows];
            let (sr, si) = if row.iter().all(|t| t.abs() <= SIN_COS_RANGE) {
                sum_cis(row)
            } else {
                row.iter().fold((0.0, 0.0), |(a, b), &t| {
                    let (s, c) = sin_cos_fast(t);
                    (a + c, b + s)
                })
            };
            re[k] += sr;
            im[k] += si;
        }
    }
    let inv = 1.0 / record.len() as f64;
    re.into_iter().zip(im).map(|(r, i)| Complex64::new(r * inv, i * inv)).collect()
}

/// `(Σ cos t, Σ sin t)` over in-range phases, with independent lanes so the loop vectorizes.
fn sum_cis(phases: &[f64]) -> (f64, f64) {
    let mut re = [0.0; 4];
    let mut im = [0.0; 4];
    let chunks = phases.chunks_exact(4);
    let tail = chunks.remainder();
    for c in chunks {
        for l in 0..4 {
            let (s, co) = sin_cos_reduced(c[l]);
            re[l] += co;
            im[l] += s;
        }
    }
    for &t in tail {
        let (s, c) = sin_cos_reduced(t);
        re[0] += c;
        im[0] += s;
    }
    (re.iter().sum(), im.iter().sum())
}

/// `(1/N) Σⱼ exp(−(ζⱼ·α − ζⱼ*·α*))`, unbiased for `χ²(α)`.
pub fn estimate_chi_squared(record: &MeasurementRecord, alpha: &Cn) -> Result<Complex64> {
    Ok(estimate_chi_squared_many(record, std::slice::from_ref(alpha))?[0])
}

pub fn estimate_chi_squared_many(record: &MeasurementRecord, points: &[Cn]) -> Result<Vec<Complex64>> {
    check_record(record, Scheme::Bell, points)?;
    Ok(phase_means(record, points, -1.0, false))
}

/// Square root with the sign ambiguity left open: 0 when `|v̂| ≤ (2/3)ε²`, otherwise the
/// principal root (nonnegative real part; nonnegative imaginary part on the imaginary axis).
pub fn resolve_sign(v_hat: Complex64, epsilon: f64) -> Complex64 {
    if v_hat.norm() <= 2.0 / 3.0 * epsilon * epsilon {
        return Complex64::new(0.0, 0.0);
    }
    let r = v_hat.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    }
}

/// `e^{|α|²/2} (1/N) Σⱼ exp(ζⱼ†α − α†ζⱼ)`, unbiased for `χ(α)`.
pub fn estimate_chi_heterodyne(record: &MeasurementRecord, alpha: &Cn) -> Result<Complex64> {
    Ok(estimate_chi_heterodyne_many(record, std::slice::from_ref(alpha))?[0])
}

pub fn estimate_chi_heterodyne_many(record: &MeasurementRecord, points: &[Cn]) -> Result<Vec<Complex64>> {
    check_record(record, Scheme::Heterodyne, points)?;
    // ζ†α − α†ζ = 2i Im(ζ†α)
    let means = phase_means(record, points, 1.0, true);
    Ok(means
        .into_iter()
        .zip(points)
        .map(|(m, a)| m * (a.norm_sqr() / 2.0).exp())
        .collect())
}

/// Effective radius `L_ε(S) = (2/S) log(1/ε)` beyond which `|χ| ≤ ε` for states of classicality ≥ S.
pub fn effective_radius(s_floor: f64, epsilon: f64) -> f64 {
    2.0 / s_floor * (1.0 / epsilon).ln()
}

pub fn estimate_chi_classicality_aware(
    record: &MeasurementRecord,
    alpha: &Cn,
    s_floor: f64,
    epsilon: f64,
) -> Result<EstimateReport> {
    if !(s_floor > 0.0 && s_floor <= 1.0) {
        return Err(Error::Domain(format!(
            "classicality floor must lie in (0,1], got {s_floor}; use the plain heterodyne estimator"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    let truncated = alpha.norm_sqr() >= effective_radius(s_floor, epsilon);
    let estimate = if truncated {
        check_record(record, Scheme::Heterodyne, std::slice::from_ref(alpha))?;
        Complex64::new(0.0, 0.0)
    } else {
        estimate_chi_heterodyne(record, alpha)?
    };
    Ok(EstimateReport {
        point: alpha.clone(),
        estimate: estimate.into(),
        scheme: EstimatorScheme::ClassicalityAware,
        samples_used: record.len(),
        epsilon,
        delta: None,
        truncated,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerInputs {
    pub epsilon: f64,
    pub delta: f64,
    /// Number of query points covered by the union bound.
    pub m: u64,
    /// Largest queried `|α|²` (κn in the bounds); needed by the heterodyne schemes.
    #[serde(default)]
    pub radius2: Option<f64>,
    /// Classicality floor S; needed by the classicality-aware scheme.
    #[serde(default)]
    pub s_floor: Option<f64>,
}

impl PlannerInputs {
    pub fn new(epsilon: f64, delta: f64, m: u64) -> Self {
        PlannerInputs { epsilon, delta, m, radius2: None, s_floor: None }
    }

    pub fn with_radius2(mut self, r2: f64) -> Self {
        self.radius2 = Some(r2);
        self
    }

    pub fn with_s_floor(mut self, s: f64) -> Self {
        self.s_floor = Some(s);
        self
    }
}

/// `ln N` for a summand bound with `ln B² = log_b2` and target accuracy `eps_target`:
/// `N = 2B² ln(4M/δ) / (ε_target/√2)²`, before rounding up.
fn log_hoeffding(log_b2: f64, eps_target: f64, m: u64, delta: f64) -> f64 {
    (4.0 * (4.0 * m as f64 / delta).ln()).ln() + log_b2 - 2.0 * eps_target.ln()
}

/// Natural log of the planned sample count (unrounded). Used where counts overflow `f64`.
pub fn plan_samples_ln(scheme: EstimatorScheme, inputs: &PlannerInputs) -> Result<f64> {
    let PlannerInputs { epsilon, delta, m, .. } = *inputs;
    if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) || m == 0 {
        return Err(Error::Domain("planner needs epsilon, delta in (0,1) and M >= 1".into()));
    }
    let radius = || {
        inputs
            .radius2
            .filter(|r| *r >= 0.0)
            .ok_or_else(|| Error::Domain("heterodyne planning needs the query radius |α|²_max >= 0".into()))
    };
    match scheme {
        EstimatorScheme::BellChiSquared | EstimatorScheme::BellChi => {
            Ok(log_hoeffding(0.0, epsilon * epsilon / 3.0, m, delta))
        }
        EstimatorScheme::Heterodyne => Ok(log_hoeffding(radius()?, epsilon, m, delta)),
        EstimatorScheme::ClassicalityAware => {
            let s = inputs
                .s_floor
                .filter(|s| *s > 0.0 && *s <= 1.0)
                .ok_or_else(|| Error::Domain("classicality-aware planning needs S in (0,1]".into()))?;
            let cap = effective_radius(s, epsilon);
            let log_b2 = match inputs.radius2 {
                Some(r2) if r2 <= cap => r2,
                _ => cap,
            };
            Ok(log_hoeffding(log_b2, epsilon, m, delta))
        }
    }
}

/// Planned sample count `ceil(2B² ln(4M/δ)/(ε_target/√2)²)`; may be astronomically large.
pub fn plan_samples(scheme: EstimatorScheme, inputs: &PlannerInputs) -> Result<f64> {
    Ok(plan_samples_ln(scheme, inputs)?.exp().ceil())
}

/// [`plan_samples`] as a count that can actually be drawn.
pub fn plan_sample_count(scheme: EstimatorScheme, inputs: &PlannerInputs) -> Result<usize> {
    let n = plan_samples(scheme, inputs)?;
    if n > 1e12 {
        return Err(Error::Domain(format!("planned sample count {n:e} is beyond simulation scale")));
    }
    Ok(n as usize)
}
