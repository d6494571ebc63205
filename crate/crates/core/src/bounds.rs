//! Sample-complexity bounds, classicality thresholds and curve tables.
//!
//! Lower bounds carry their explicit constants. Upper bounds reuse the planner in
//! [`crate::estimators`], so every table built here is consistent with the sample
//! counts the estimators actually use. Values are handled as natural logs
//! internally because `(1+0.99κ)ⁿ` overflows quickly.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{effective_radius, plan_samples_ln, EstimatorScheme, PlannerInputs};
use crate::numerics::regularized_upper_gamma;

/// Largest accuracy for which the three-peak constructions apply.
pub const EPS_MAX: f64 = 0.245;
/// Largest accuracy for the reflection-symmetric (five-peak) construction.
pub const EPS_MAX_SYMMETRIC: f64 = 0.1225;

fn default_eta3() -> f64 {
    1e-6
}

fn default_one() -> f64 {
    1.0
}

fn default_m() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub epsilon: f64,
    pub delta: f64,
    pub kappa: f64,
    pub n: u32,
    /// Batch size of entangled measurements.
    #[serde(default = "default_one")]
    pub k: f64,
    /// Classicality floor.
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default = "default_eta3")]
    pub eta3: f64,
    /// Number of query points.
    #[serde(default = "default_m")]
    pub m: u64,
}

impl BoundInputs {
    pub fn new(epsilon: f64, delta: f64, kappa: f64, n: u32) -> Self {
        BoundInputs { epsilon, delta, kappa, n, k: 1.0, s: None, eta3: 1e-6, m: 1 }
    }

    fn planner(&self) -> PlannerInputs {
        PlannerInputs {
            epsilon: self.epsilon,
            delta: self.delta,
            m: self.m,
            radius2: Some(self.kappa * self.n as f64),
            s_floor: self.s,
        }
    }
}

fn fail(bound: &'static str, detail: impl Into<String>) -> Error {
    Error::Precondition { bound, detail: detail.into() }
}

fn require(cond: bool, bound: &'static str, detail: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(fail(bound, detail()))
    }
}

fn check_eta3(b: &BoundInputs, bound: &'static str, eps_cap: f64, width: f64) -> Result<()> {
    let n = b.n as f64;
    require(b.eta3 > 0.0 && b.eta3 <= eps_cap / b.epsilon - 1.0, bound, || {
        format!("eta3 = {} must lie in (0, {eps_cap}/epsilon - 1]", b.eta3)
    })?;
    let limit = n * (-width + (width * width + b.kappa * b.kappa).sqrt());
    require((1.0 + b.eta3).ln() <= limit, bound, || {
        format!("log(1+eta3) = {} exceeds n(-{width:.4} + sqrt({width:.4}² + κ²)) = {limit}", (1.0 + b.eta3).ln())
    })
}

fn check_common(b: &BoundInputs, bound: &'static str, eps_cap: f64) -> Result<()> {
    require(b.n >= 8, bound, || format!("n = {} must be >= 8", b.n))?;
    require(b.epsilon > 0.0 && b.epsilon < eps_cap, bound, || format!("epsilon = {} must lie in (0, {eps_cap})", b.epsilon))?;
    require(b.kappa > 0.0 && b.kappa.is_finite(), bound, || format!("kappa = {} must be > 0", b.kappa))
}

/// Entanglement-free lower bound, natural log.
pub fn lb_ef_ln(b: &BoundInputs) -> Result<f64> {
    const NAME: &str = "lb_ef";
    check_common(b, NAME, EPS_MAX)?;
    check_eta3(b, NAME, EPS_MAX, 2.0 / 0.99)?;
    Ok((0.98f64 * 0.98 / 96.0).ln() - 2.0 * (1.0 + b.eta3).ln() - 2.0 * b.epsilon.ln()
        + b.n as f64 * (0.99 * b.kappa).ln_1p())
}

/// `0.98²/(96(1+η₃)²) · ε⁻² · (1+0.99κ)ⁿ`.
pub fn lb_ef(b: &BoundInputs) -> Result<f64> {
    lb_ef_ln(b).map(f64::exp)
}

/// Lower bound for reflection-symmetric targets, natural log.
pub fn lb_ef_symmetric_ln(b: &BoundInputs) -> Result<f64> {
    const NAME: &str = "lb_ef_symmetric";
    check_common(b, NAME, EPS_MAX_SYMMETRIC)?;
    check_eta3(b, NAME, EPS_MAX_SYMMETRIC, 3.0 / 0.99)?;
    Ok((0.49f64 * 0.49 / 96.0).ln() - 2.0 * (1.0 + b.eta3).ln() - 2.0 * b.epsilon.ln()
        + b.n as f64 * (0.66 * b.kappa).ln_1p())
}

/// `0.49²/(96(1+η₃)²) · ε⁻² · (1+0.66κ)ⁿ`.
pub fn lb_ef_symmetric(b: &BoundInputs) -> Result<f64> {
    lb_ef_symmetric_ln(b).map(f64::exp)
}

/// Lower bound for K-copy entangled schemes without reflected copies, natural log.
pub fn lb_ea_no_reflected_ln(b: &BoundInputs) -> Result<f64> {
    const NAME: &str = "lb_ea_no_reflected";
    check_common(b, NAME, EPS_MAX)?;
    require(b.kappa >= 1.0 / 0.99, NAME, || format!("kappa = {} must be >= 1/0.99", b.kappa))?;
    require(b.k >= 1.0 && b.k <= 0.22 / b.epsilon, NAME, || {
        format!("K = {} must lie in [1, 0.22/epsilon = {}]", b.k, 0.22 / b.epsilon)
    })?;
    require(b.eta3 > 0.0, NAME, || "eta3 must be > 0".into())?;
    Ok((8.4e-5f64).ln() - b.k.ln() - 2.0 * (1.0 + b.eta3).ln() - 2.0 * b.epsilon.ln()
        + b.n as f64 / 2.0 * (0.99 * b.kappa).ln_1p())
}

/// `8.4·10⁻⁵/(K(1+η₃)²) · ε⁻² · (1+0.99κ)^{n/2}`.
pub fn lb_ea_no_reflected(b: &BoundInputs) -> Result<f64> {
    lb_ea_no_reflected_ln(b).map(f64::exp)
}

/// Scheme-independent lower bound, natural log.
pub fn lb_unrestricted_ln(b: &BoundInputs) -> Result<f64> {
    const NAME: &str = "lb_unrestricted";
    require(b.epsilon > 0.0 && b.epsilon < EPS_MAX, NAME, || format!("epsilon = {} must lie in (0, {EPS_MAX})", b.epsilon))?;
    require(b.eta3 > 0.0, NAME, || "eta3 must be > 0".into())?;
    Ok((0.98f64 * 0.98 / 288.0).ln() - 2.0 * (1.0 + b.eta3).ln() - 2.0 * b.epsilon.ln())
}

/// `0.98²/(288(1+η₃)²) · ε⁻²`.
pub fn lb_unrestricted(b: &BoundInputs) -> Result<f64> {
    lb_unrestricted_ln(b).map(f64::exp)
}

pub fn ub_hd_ln(b: &BoundInputs) -> Result<f64> {
    plan_samples_ln(EstimatorScheme::Heterodyne, &b.planner())
}

/// Heterodyne sample count for queries with `|α|² ≤ κn`.
pub fn ub_hd(b: &BoundInputs) -> Result<f64> {
    ub_hd_ln(b).map(|l| l.exp().ceil())
}

pub fn ub_bm_ln(b: &BoundInputs) -> Result<f64> {
    plan_samples_ln(EstimatorScheme::BellChi, &b.planner())
}

/// Bell-measurement sample count (χ up to sign); independent of n and κ.
pub fn ub_bm(b: &BoundInputs) -> Result<f64> {
    ub_bm_ln(b).map(|l| l.exp().ceil())
}

pub fn ub_hd_classical_ln(b: &BoundInputs) -> Result<f64> {
    plan_samples_ln(EstimatorScheme::ClassicalityAware, &b.planner())
}

/// Classicality-aware heterodyne count: `e^{κn}` growth while `κn ≤ L_ε(S)`, flat beyond.
pub fn ub_hd_classical(b: &BoundInputs) -> Result<f64> {
    ub_hd_classical_ln(b).map(|l| l.exp().ceil())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub f: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub kappa_star: f64,
    pub s_cap: f64,
    pub l_eps: f64,
    /// Whether `[κ_min, κ_max]` is nonempty.
    pub domain_nonempty: bool,
}

/// `f(S) = S/(1+√(1−S²))`.
pub fn classicality_f(s: f64) -> f64 {
    s / (1.0 + (1.0 - s * s).max(0.0).sqrt())
}

/// Inverse of [`classicality_f`] on `[0, 1]`.
pub fn classicality_from_f(f: f64) -> f64 {
    2.0 * f / (1.0 + f * f)
}

/// Largest classicality for which the κ domain of the classical lower bound is nonempty.
pub fn s_cap(n: u32, epsilon: f64) -> f64 {
    let r = 0.99 / (2.0 * n as f64) * (EPS_MAX / epsilon).ln();
    (r * r + 2.0 * r).sqrt() / (r + 1.0)
}

pub fn classicality_thresholds(s: f64, n: u32, epsilon: f64) -> Result<Thresholds> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("classicality S must lie in (0,1), got {s}")));
    }
    if !(epsilon > 0.0 && epsilon < EPS_MAX) || n == 0 {
        return Err(Error::Domain(format!("need epsilon in (0, {EPS_MAX}) and n >= 1")));
    }
    let f = classicality_f(s);
    let kappa_min = 2.0 / 0.99 * s / (1.0 - s * s).sqrt();
    let kappa_max = (EPS_MAX / epsilon).ln() / (n as f64 * f);
    Ok(Thresholds {
        f,
        kappa_min,
        kappa_max,
        kappa_star: 1.0 / (2.0 * f) - 1.0 / 0.99,
        s_cap: s_cap(n, epsilon),
        l_eps: effective_radius(s, epsilon),
        domain_nonempty: kappa_min <= kappa_max,
    })
}

/// `κ' = min(κ, max(κ*, κ_min))`, the effective κ of the classical lower bound.
pub fn kappa_prime(kappa: f64, t: &Thresholds) -> f64 {
    kappa.min(t.kappa_star.max(t.kappa_min))
}

/// Per-mode growth base `(1+0.99κ')e^{−2κ'f(S)}` of the classical lower bound.
pub fn classical_base(kappa_prime: f64, f: f64) -> f64 {
    (1.0 + 0.99 * kappa_prime) * (-2.0 * kappa_prime * f).exp()
}

pub fn lb_ef_classical_ln(b: &BoundInputs) -> Result<f64> {
    const NAME: &str = "lb_ef_classical";
    check_common(b, NAME, EPS_MAX)?;
    let s = b.s.ok_or_else(|| fail(NAME, "classicality S is required"))?;
    let t = classicality_thresholds(s, b.n, b.epsilon).map_err(|e| fail(NAME, e.to_string()))?;
    require(s <= t.s_cap, NAME, || format!("S = {s} exceeds s_cap = {}", t.s_cap))?;
    require(b.kappa >= t.kappa_min && b.kappa <= t.kappa_max, NAME, || {
        format!("kappa = {} outside the admissible domain [{}, {}]", b.kappa, t.kappa_min, t.kappa_max)
    })?;
    let kp = kappa_prime(b.kappa, &t);
    Ok((0.98f64 * 0.98 / 96.0).ln() - 2.0 * b.epsilon.ln() - 2.0 * kp * b.n as f64 * t.f
        + b.n as f64 * (0.99 * kp).ln_1p())
}

/// `(0.98²/96) ε⁻² e^{−2κ'n f(S)} (1+0.99κ')ⁿ`.
pub fn lb_ef_classical(b: &BoundInputs) -> Result<f64> {
    lb_ef_classical_ln(b).map(f64::exp)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFamily {
    LbEf,
    LbEfSymmetric,
    LbEaNoReflected,
    LbUnrestricted,
    UbHd,
    UbBm,
    UbHdClassical,
    LbEfClassical,
}

impl BoundFamily {
    pub const ALL: [BoundFamily; 8] = [
        BoundFamily::LbEf,
        BoundFamily::LbEfSymmetric,
        BoundFamily::LbEaNoReflected,
        BoundFamily::LbUnrestricted,
        BoundFamily::UbHd,
        BoundFamily::UbBm,
        BoundFamily::UbHdClassical,
        BoundFamily::LbEfClassical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundFamily::LbEf => "lb_ef",
            BoundFamily::LbEfSymmetric => "lb_ef_symmetric",
            BoundFamily::LbEaNoReflected => "lb_ea_no_reflected",
            BoundFamily::LbUnrestricted => "lb_unrestricted",
            BoundFamily::UbHd => "ub_hd",
            BoundFamily::UbBm => "ub_bm",
            BoundFamily::UbHdClassical => "ub_hd_classical",
            BoundFamily::LbEfClassical => "lb_ef_classical",
        }
    }

    pub fn ln_value(self, b: &BoundInputs) -> Result<f64> {
        match self {
            BoundFamily::LbEf => lb_ef_ln(b),
            BoundFamily::LbEfSymmetric => lb_ef_symmetric_ln(b),
            BoundFamily::LbEaNoReflected => lb_ea_no_reflected_ln(b),
            BoundFamily::LbUnrestricted => lb_unrestricted_ln(b),
            BoundFamily::UbHd => ub_hd_ln(b),
            BoundFamily::UbBm => ub_bm_ln(b),
            BoundFamily::UbHdClassical => ub_hd_classical_ln(b),
            BoundFamily::LbEfClassical => lb_ef_classical_ln(b),
        }
    }
}

impl std::str::FromStr for BoundFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown bound family '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Kappa,
    N,
    S,
    Epsilon,
}

impl std::str::FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa" => Ok(Axis::Kappa),
            "n" => Ok(Axis::N),
            "S" | "s" => Ok(Axis::S),
            "epsilon" => Ok(Axis::Epsilon),
            _ => Err(Error::Domain(format!("unknown axis '{s}' (kappa, n, S, epsilon)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub axis: Axis,
    pub xs: Vec<f64>,
    pub families: Vec<BoundFamily>,
    pub base: BoundInputs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub x: f64,
    /// `log10 N` per family, `None` where the family's hypotheses fail at this x.
    pub log10: Vec<Option<f64>>,
    pub gaps: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub spec: CurveSpec,
    pub constants_version: String,
    pub rows: Vec<CurveRow>,
}

impl CurveTable {
    pub fn column(&self, family: BoundFamily) -> Option<Vec<Option<f64>>> {
        let j = self.spec.families.iter().position(|&f| f == family)?;
        Some(self.rows.iter().map(|r| r.log10[j]).collect())
    }

    /// CSV with columns `x, log10_<family>...`; failed points are left empty.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["x".to_string()];
        header.extend(self.spec.families.iter().map(|f| format!("log10_{}", f.name())));
        out.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![format!("{}", row.x)];
            rec.extend(row.log10.iter().map(|v| v.map(|x| format!("{x}")).unwrap_or_default()));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes `path` (CSV) and `path.json` (inputs, constants, gap notes).
    pub fn write_files(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)?;
        let mut sidecar = path.as_os_str().to_owned();
        sidecar.push(".json");
        let meta = serde_json::json!({
            "axis": self.spec.axis,
            "families": self.spec.families,
            "base_inputs": self.spec.base,
            "constants_version": self.constants_version,
            "value": "log10 of the sample count",
            "gaps": self.rows.iter().filter(|r| !r.gaps.is_empty()).map(|r| serde_json::json!({"x": r.x, "notes": r.gaps})).collect::<Vec<_>>(),
        });
        std::fs::write(sidecar, serde_json::to_string_pretty(&meta)?)?;
        Ok(())
    }
}

fn with_axis(base: &BoundInputs, axis: Axis, x: f64) -> Result<BoundInputs> {
    let mut b = base.clone();
    match axis {
        Axis::Kappa => b.kappa = x,
        Axis::S => b.s = Some(x),
        Axis::Epsilon => b.epsilon = x,
        Axis::N => {
            if x < 1.0 || x.fract() != 0.0 {
                return Err(Error::Domain(format!("n axis needs positive integers, got {x}")));
            }
            b.n = x as u32;
        }
    }
    Ok(b)
}

/// Evaluates the requested families on the grid; precondition failures become gaps.
pub fn emit_curves(spec: &CurveSpec) -> Result<CurveTable> {
    if spec.xs.is_empty() || spec.families.is_empty() {
        return Err(Error::Domain("curve needs at least one x value and one family".into()));
    }
    if spec.xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("curve x values must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(spec.xs.len());
    for &x in &spec.xs {
        let b = with_axis(&spec.base, spec.axis, x)?;
        let mut log10 = Vec::with_capacity(spec.families.len());
        let mut gaps = Vec::new();
        for &f in &spec.families {
            match f.ln_value(&b) {
                Ok(v) if v.is_finite() => log10.push(Some(v / std::f64::consts::LN_10)),
                Ok(v) => {
                    gaps.push(format!("{}: non-finite value {v}", f.name()));
                    log10.push(None);
                }
                Err(e) => {
                    gaps.push(e.to_string());
                    log10.push(None);
                }
            }
        }
        rows.push(CurveRow { x, log10, gaps });
    }
    Ok(CurveTable { spec: spec.clone(), constants_version: crate::CONSTANTS_VERSION.into(), rows })
}

/// Maxima over `n_lo ≤ n ≤ n_hi` of `Q(n/2, n/0.99)` and `Q(n/2, n/1.98)`.
pub fn gamma_ratio_maxima(n_lo: u32, n_hi: u32) -> Result<(f64, f64)> {
    let mut m1 = 0.0f64;
    let mut m2 = 0.0f64;
    for n in n_lo..=n_hi {
        let h = n as f64 / 2.0;
        m1 = m1.max(regularized_upper_gamma(h, n as f64 / 0.99)?);
        m2 = m2.max(regularized_upper_gamma(h, n as f64 / 1.98)?);
    }
    Ok((m1, m2))
}

/// `(k e^{1−k})ⁿ`, an upper bound on `Q(n, kn)` for `k > 1`.
pub fn gamma_tail_bound(n: f64, k: f64) -> f64 {
    (n * (k.ln() + 1.0 - k)).exp()
}
