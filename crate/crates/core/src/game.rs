//! The two-hypothesis game behind the lower bounds.
//!
//! Each trial Alice draws a sign `s` and a Gaussian displacement `γ`, then flips a
//! coin between the thermal state and the peak state centered at `sγ`. Bob
//! measures his copies, learns `γ` (and the reflection axes `U`), and guesses the
//! coin. Success above 1/2 needs total-variation distance between the two outcome
//! distributions, which is what the bounds here control.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate_chi_heterodyne_many, estimate_chi_squared};
use crate::measurements::{sample_bell, sample_heterodyne, MeasurementRecord, SignedGaussianMixture};
use crate::numerics::{
    gaussian_point, regularized_upper_gamma, stream, takagi_decompose, CMatrix, Cn, Stream, SymmetricUnitary,
    TakagiFactor,
};
use crate::states::{big_sigma2, make_five_peak, make_three_peak, sigma2, PeakState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    ThreePeak,
    FivePeak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Heterodyne every copy, estimate χ at γ after the reveal.
    EfHeterodyne,
    /// Bell-measure each copy with its reflected partner, estimate χ² at γ.
    EaBell,
    /// Ignore the copies and flip a coin.
    RandomGuess,
}

/// Position of the reflected copies in the sequence Bob receives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CopyOrder {
    #[default]
    Alternating,
    OriginalsFirst,
    ReflectedFirst,
}

fn default_trials() -> usize {
    2000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub family: Family,
    pub n: usize,
    pub nu: f64,
    pub eps0: f64,
    pub kappa: f64,
    /// Variance per real coordinate of γ; defaults to `0.99κ/2` (three-peak) or `0.99κ/3` (five-peak).
    #[serde(default)]
    pub sigma_gamma2: Option<f64>,
    /// Reflection axes as rows of `[re, im]` pairs; identity when absent.
    #[serde(default)]
    pub u: Option<Vec<Vec<Complex64>>>,
    /// Whether Alice also hands out reflected copies (for three-peak targets).
    #[serde(default)]
    pub reflected_copies: bool,
    #[serde(default)]
    pub order: CopyOrder,
    /// Copies of the target per trial (Bell pairs for the Bell strategy).
    pub copies: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub strategy: Strategy,
    pub seed: u64,
    /// Monte Carlo draws for the empirical TVD; skipped when absent.
    #[serde(default)]
    pub tvd_draws: Option<usize>,
    #[serde(default)]
    pub keep_log: bool,
}

impl GameConfig {
    pub fn sigma_gamma2(&self) -> f64 {
        self.sigma_gamma2.unwrap_or(match self.family {
            Family::ThreePeak => 0.99 * self.kappa / 2.0,
            Family::FivePeak => 0.99 * self.kappa / 3.0,
        })
    }

    pub fn unitary(&self) -> Result<SymmetricUnitary> {
        match &self.u {
            None => Ok(SymmetricUnitary::identity(self.n)),
            Some(rows) => {
                if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
                    return Err(Error::Domain(format!("u must be {}x{}", self.n, self.n)));
                }
                SymmetricUnitary::with_tol(CMatrix::from_fn(self.n, self.n, |i, j| rows[i][j]), 1e-9)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.copies == 0 || self.trials == 0 {
            return Err(Error::Domain("n, copies and trials must be >= 1".into()));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) || !(self.eps0 > 0.0 && self.eps0 <= 0.25) || !(self.kappa > 0.0) {
            return Err(Error::Domain("need nu in (0,1), eps0 in (0,1/4], kappa > 0".into()));
        }
        if !(self.sigma_gamma2() > 0.0) {
            return Err(Error::Domain("sigma_gamma2 must be positive".into()));
        }
        if self.family == Family::ThreePeak && 0.99 * self.kappa < 2.0 * sigma2(self.nu) {
            return Err(Error::Domain(format!(
                "three-peak game needs 0.99κ >= 2σ² = 1/ν − ν = {}",
                2.0 * sigma2(self.nu)
            )));
        }
        if self.strategy == Strategy::EaBell && self.family == Family::ThreePeak && !self.reflected_copies {
            return Err(Error::Domain(
                "the Bell strategy needs reflected copies, but this configuration provides none".into(),
            ));
        }
        self.unitary().map(|_| ())
    }

    fn target(&self, center: &Cn, u: &SymmetricUnitary) -> Result<PeakState> {
        match self.family {
            Family::ThreePeak => make_three_peak(self.n, self.nu, self.eps0, center),
            Family::FivePeak => make_five_peak(self.n, self.nu, self.eps0, center, u),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub trial: usize,
    pub sign: i8,
    pub displaced: bool,
    pub gamma_norm2: f64,
    pub in_window: bool,
    pub guessed_displaced: bool,
    pub correct: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvdEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub draws: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub config: GameConfig,
    pub successes: usize,
    pub success_rate: f64,
    pub window_hit_rate: f64,
    pub empirical_tvd: Option<TvdEstimate>,
    pub trials: Vec<TrialLog>,
}

/// `2ε₀ e^{−|γ|²/Σ²}(1 − e^{−2|γ|²/σ²})`: the three-peak characteristic-function gap at `α = γ`.
pub fn three_peak_gap(nu: f64, eps0: f64, gamma_norm2: f64) -> f64 {
    2.0 * eps0 * (-gamma_norm2 / big_sigma2(nu)).exp() * (1.0 - (-2.0 * gamma_norm2 / sigma2(nu)).exp())
}

/// Whether γ falls in the region where the characteristic-function gap is guaranteed.
pub fn in_window(config: &GameConfig, gamma: &Cn, v: &TakagiFactor) -> bool {
    let s2 = sigma2(config.nu);
    let kn = config.kappa * config.n as f64;
    match config.family {
        Family::ThreePeak => {
            let g2 = gamma.norm_sqr();
            g2 > 2.0 * s2 && g2 <= kn
        }
        Family::FivePeak => {
            let (r2, i2) = rotated_parts(gamma, v);
            r2 > 2.0 * s2 && r2 <= 2.0 / 3.0 * kn && i2 <= kn / 3.0
        }
    }
}

/// `(|Re(V†γ)|², |Im(V†γ)|²)`.
pub fn rotated_parts(gamma: &Cn, v: &TakagiFactor) -> (f64, f64) {
    let g = gamma.mul_by(&v.v.adjoint());
    (g.iter().map(|z| z.re * z.re).sum(), g.iter().map(|z| z.im * z.im).sum())
}

pub fn run_game(config: &GameConfig) -> Result<GameResult> {
    config.validate()?;
    let u = config.unitary()?;
    let v = takagi_decompose(&u)?;
    let thermal = PeakState::thermal(config.n, config.nu)?;
    let sd = config.sigma_gamma2().sqrt();
    let mut logs = Vec::with_capacity(config.trials);
    let mut successes = 0;
    let mut hits = 0;
    for t in 0..config.trials {
        let mut rng = stream(config.seed, 2 * t as u64);
        let sign: i8 = if rng.random::<bool>() { 1 } else { -1 };
        let gamma = gaussian_point(config.n, sd, &mut rng);
        let displaced = rng.random::<bool>();
        let state = if displaced { config.target(&gamma.scale_re(sign as f64), &u)? } else { thermal.clone() };
        let window = in_window(config, &gamma, &v);
        hits += window as usize;
        let data_seed = config.seed ^ 0x5eed_da7a;
        let guess = match config.strategy {
            Strategy::RandomGuess => rng.random::<bool>(),
            // Outside the window Bob has no guaranteed gap and guesses.
            _ if !window => rng.random::<bool>(),
            Strategy::EfHeterodyne => {
                let (orig, refl) = heterodyne_copies(config, &state, &u, data_seed, 2 * t as u64 + 1)?;
                let chi0 = thermal.char_fn(&gamma);
                let mut est = Complex64::new(0.0, 0.0);
                let mut used = 0usize;
                if let Some(r) = &orig {
                    est += estimate_chi_heterodyne_many(r, std::slice::from_ref(&gamma))?[0] * r.len() as f64;
                    used += r.len();
                }
                if let Some(r) = &refl {
                    let point = u.reflect_point(&gamma);
                    est += estimate_chi_heterodyne_many(r, std::slice::from_ref(&point))?[0] * r.len() as f64;
                    used += r.len();
                }
                est /= used as f64;
                (est - chi0).norm() > chi_gap(config, &gamma, &u, &thermal)? / 2.0
            }
            Strategy::EaBell => {
                let partner = state.bell_partner_for(config.family, &u)?;
                let rec = sample_bell(&state, &partner, config.copies, data_seed, 2 * t as u64 + 1)?;
                let v_hat = estimate_chi_squared(&rec, &gamma)?;
                let chi0 = thermal.char_fn(&gamma);
                (v_hat - chi0 * chi0).norm() > chi2_gap(config, &gamma, &u, &thermal)? / 2.0
            }
        };
        let correct = guess == displaced;
        successes += correct as usize;
        if config.keep_log {
            logs.push(TrialLog {
                trial: t,
                sign,
                displaced,
                gamma_norm2: gamma.norm_sqr(),
                in_window: window,
                guessed_displaced: guess,
                correct,
            });
        }
    }
    let empirical_tvd = match (config.tvd_draws, config.strategy) {
        (Some(_), Strategy::RandomGuess) => Some(TvdEstimate { mean: 0.0, std_error: 0.0, draws: 0 }),
        (Some(draws), strategy) => Some(game_tvd(config, strategy, &u, draws)?),
        (None, _) => None,
    };
    Ok(GameResult {
        config: config.clone(),
        successes,
        success_rate: successes as f64 / config.trials as f64,
        window_hit_rate: hits as f64 / config.trials as f64,
        empirical_tvd,
        trials: logs,
    })
}

impl PeakState {
    /// Second Bell port: five-peak targets are their own reflection and need only the circuit.
    fn bell_partner_for(&self, family: Family, u: &SymmetricUnitary) -> Result<PeakState> {
        match family {
            Family::ThreePeak => self.bell_partner(u),
            Family::FivePeak => self.apply_circuit(u),
        }
    }
}

fn heterodyne_copies(
    config: &GameConfig,
    state: &PeakState,
    u: &SymmetricUnitary,
    seed: u64,
    stream_id: u64,
) -> Result<(Option<MeasurementRecord>, Option<MeasurementRecord>)> {
    if !config.reflected_copies || config.family == Family::FivePeak {
        return Ok((Some(sample_heterodyne(state, config.copies, seed, stream_id)?), None));
    }
    let n_refl = config.copies / 2;
    let n_orig = config.copies - n_refl;
    let reflected = state.reflect(u)?;
    // Distinct stream ids per block; the order only decides which block is drawn first.
    let (first, second) = match config.order {
        CopyOrder::ReflectedFirst => (1, 0),
        _ => (0, 1),
    };
    let orig = (n_orig > 0)
        .then(|| sample_heterodyne(state, n_orig, seed, (stream_id << 2) | first))
        .transpose()?;
    let refl = (n_refl > 0)
        .then(|| sample_heterodyne(&reflected, n_refl, seed, (stream_id << 2) | second))
        .transpose()?;
    Ok((orig, refl))
}

fn chi_gap(config: &GameConfig, gamma: &Cn, u: &SymmetricUnitary, thermal: &PeakState) -> Result<f64> {
    match config.family {
        Family::ThreePeak => Ok(three_peak_gap(config.nu, config.eps0, gamma.norm_sqr())),
        Family::FivePeak => Ok((config.target(gamma, u)?.char_fn(gamma) - thermal.char_fn(gamma)).norm()),
    }
}

fn chi2_gap(config: &GameConfig, gamma: &Cn, u: &SymmetricUnitary, thermal: &PeakState) -> Result<f64> {
    let chi0 = thermal.char_fn(gamma).re;
    match config.family {
        Family::ThreePeak => {
            let g = three_peak_gap(config.nu, config.eps0, gamma.norm_sqr());
            Ok(g * (4.0 * chi0 * chi0 + g * g).sqrt())
        }
        Family::FivePeak => {
            let chi = config.target(gamma, u)?.char_fn(gamma);
            Ok((chi * chi - chi0 * chi0).norm())
        }
    }
}

fn game_tvd(config: &GameConfig, strategy: Strategy, u: &SymmetricUnitary, draws: usize) -> Result<TvdEstimate> {
    let thermal = PeakState::thermal(config.n, config.nu)?;
    let sd = config.sigma_gamma2().sqrt();
    let mut rng = stream(config.seed, u64::MAX);
    let bell = strategy == Strategy::EaBell;
    let null = if bell {
        SignedGaussianMixture::bell(&thermal, &thermal)?
    } else {
        SignedGaussianMixture::s_ordered(&thermal, -1.0)
    };
    let alternatives = |gamma: &Cn| -> Result<(SignedGaussianMixture, SignedGaussianMixture)> {
        let mk = |c: &Cn| -> Result<SignedGaussianMixture> {
            let st = config.target(c, u)?;
            if bell {
                SignedGaussianMixture::bell(&st, &st.bell_partner_for(config.family, u)?)
            } else {
                Ok(SignedGaussianMixture::s_ordered(&st, -1.0))
            }
        };
        Ok((mk(gamma)?, mk(&-gamma)?))
    };
    let mut sampler = |r: &mut Stream| gaussian_point(config.n, sd, r);
    tvd_pair(&null, &alternatives, &mut sampler, config.copies, draws, 1, &mut rng)
}

/// Monte Carlo estimate of `E_γ TVD(p₀^{⊗N}, ½(p_{+γ}^{⊗N} + p_{−γ}^{⊗N}))`.
///
/// Uses `TVD = E_{o∼p₀}[max(0, 1 − q(o)/p₀(o))]` with the product likelihood ratio
/// accumulated in log space. `alternatives(γ)` returns the densities for `±γ`.
pub fn tvd_pair(
    null: &SignedGaussianMixture,
    alternatives: &dyn Fn(&Cn) -> Result<(SignedGaussianMixture, SignedGaussianMixture)>,
    gamma_sampler: &mut dyn FnMut(&mut Stream) -> Cn,
    n_copies: usize,
    gamma_draws: usize,
    mc_samples: usize,
    rng: &mut Stream,
) -> Result<TvdEstimate> {
    if n_copies == 0 || gamma_draws == 0 || mc_samples == 0 {
        return Err(Error::Domain("tvd_pair needs positive copy and draw counts".into()));
    }
    let mut values = Vec::with_capacity(gamma_draws * mc_samples);
    let mut outcomes = Vec::new();
    for _ in 0..gamma_draws {
        let gamma = gamma_sampler(rng);
        let (plus, minus) = alternatives(&gamma)?;
        for _ in 0..mc_samples {
            outcomes.clear();
            null.sample_into(n_copies, rng, &mut outcomes)?;
            let (mut lp, mut lm) = (0.0, 0.0);
            for o in outcomes.chunks(null.n()) {
                let z = Cn(o.to_vec());
                let p0 = null.eval(&z);
                lp += (plus.eval(&z).max(f64::MIN_POSITIVE) / p0).ln();
                lm += (minus.eval(&z).max(f64::MIN_POSITIVE) / p0).ln();
            }
            let hi = lp.max(lm);
            let log_ratio = hi + (0.5 * ((lp - hi).exp() + (lm - hi).exp())).ln();
            values.push((1.0 - log_ratio.exp()).max(0.0));
        }
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
    Ok(TvdEstimate { mean, std_error: (var / k).sqrt(), draws: values.len() })
}

/// Heterodyne TVD for the three-peak game.
pub fn heterodyne_tvd(
    n: usize,
    nu: f64,
    eps0: f64,
    sigma_gamma2: f64,
    n_copies: usize,
    draws: usize,
    seed: u64,
) -> Result<TvdEstimate> {
    let thermal = PeakState::thermal(n, nu)?;
    let null = SignedGaussianMixture::s_ordered(&thermal, -1.0);
    let alternatives = |g: &Cn| -> Result<(SignedGaussianMixture, SignedGaussianMixture)> {
        Ok((
            SignedGaussianMixture::s_ordered(&make_three_peak(n, nu, eps0, g)?, -1.0),
            SignedGaussianMixture::s_ordered(&make_three_peak(n, nu, eps0, &-g)?, -1.0),
        ))
    };
    let sd = sigma_gamma2.sqrt();
    let mut sampler = |r: &mut Stream| gaussian_point(n, sd, r);
    let mut rng = stream(seed, 0);
    tvd_pair(&null, &alternatives, &mut sampler, n_copies, draws, 1, &mut rng)
}

/// `Pr(2σ² < |γ|² ≤ κn) = Q(n, σ²/σ_γ²) − Q(n, κn/(2σ_γ²))`.
pub fn window_probability(n: usize, sigma2: f64, sigma_gamma2: f64, kappa: f64) -> Result<f64> {
    if n == 0 || !(sigma2 > 0.0) || !(sigma_gamma2 > 0.0) || !(kappa > 0.0) {
        return Err(Error::Domain("window probability needs positive parameters".into()));
    }
    let nf = n as f64;
    Ok(regularized_upper_gamma(nf, sigma2 / sigma_gamma2)? - regularized_upper_gamma(nf, kappa * nf / (2.0 * sigma_gamma2))?)
}

/// `P_R · P_I` for the rotated real/imaginary windows of the five-peak game.
pub fn five_peak_window_probability(
    n: usize,
    sigma2: f64,
    sigma_gamma2: f64,
    kappa: f64,
    u: &SymmetricUnitary,
    v: &TakagiFactor,
) -> Result<f64> {
    if n == 0 || !(sigma2 > 0.0) || !(sigma_gamma2 > 0.0) || !(kappa > 0.0) {
        return Err(Error::Domain("window probability needs positive parameters".into()));
    }
    if u.dim() != n || crate::numerics::max_abs(&(v.reconstruct() - u.matrix())) > 1e-9 {
        return Err(Error::Domain("v is not a Takagi factor of u".into()));
    }
    // V†γ is again i.i.d. Gaussian, so the real and imaginary parts are independent
    // χ² variables with n degrees of freedom each, whatever V is.
    let h = n as f64 / 2.0;
    let kn = kappa * n as f64;
    let p_r = regularized_upper_gamma(h, sigma2 / sigma_gamma2)? - regularized_upper_gamma(h, kn / (3.0 * sigma_gamma2))?;
    let p_i = 1.0 - regularized_upper_gamma(h, kn / (6.0 * sigma_gamma2))?;
    Ok(p_r * p_i)
}

/// Monte Carlo frequency of the five-peak window using the factor `v`.
pub fn five_peak_window_frequency<R: Rng + ?Sized>(
    n: usize,
    sigma2: f64,
    sigma_gamma2: f64,
    kappa: f64,
    v: &TakagiFactor,
    draws: usize,
    rng: &mut R,
) -> f64 {
    let kn = kappa * n as f64;
    let sd = sigma_gamma2.sqrt();
    let hits = (0..draws)
        .filter(|_| {
            let g = gaussian_point(n, sd, rng);
            let (r2, i2) = rotated_parts(&g, v);
            r2 > 2.0 * sigma2 && r2 <= 2.0 / 3.0 * kn && i2 <= kn / 3.0
        })
        .count();
    hits as f64 / draws as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopyBound {
    /// `16Nε₀²(1+2σ_γ²)^{−n}`.
    pub tvd_bound: f64,
    /// `(1/96)ε₀⁻²(1+2σ_γ²)ⁿ`, the copies needed before the bound allows TVD ≥ 1/6.
    pub n_min: f64,
}

pub fn per_copy_tvd_bound(sigma_gamma2: f64, n: usize, eps0: f64, copies: f64) -> CopyBound {
    let growth = (n as f64 * (2.0 * sigma_gamma2).ln_1p()).exp();
    CopyBound { tvd_bound: 16.0 * copies * eps0 * eps0 / growth, n_min: growth / (96.0 * eps0 * eps0) }
}
