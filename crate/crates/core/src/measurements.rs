//! Outcome densities and exact samplers for the Bell measurement and heterodyne
//! detection on peak states.
//!
//! Both densities are a single centered Gaussian times a finite trigonometric sum,
//! which [`SignedGaussianMixture`] stores symbolically. Sampling draws from the
//! Gaussian and accepts with probability `sum / Σ|coefficients|`.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{clamped_exp, gaussian_point, stream, Cn};
use crate::states::PeakState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Bell,
    Heterodyne,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixtureTerm {
    pub amplitude: Complex64,
    pub frequency: Cn,
}

/// `(p/π)ⁿ e^{−p|ζ|²} · Re Σₖ cₖ e^{2i Im(fₖ·ζ)}`.
#[derive(Clone, Debug)]
pub struct SignedGaussianMixture {
    n: usize,
    precision: f64,
    terms: Vec<MixtureTerm>,
    constant: f64,
    oscillating: Vec<(Cn, f64, f64)>,
    /// How the sampler obtains each oscillating term's phase from earlier ones.
    recipes: Vec<Recipe>,
    envelope: f64,
}

/// Phase of an oscillating term: evaluated directly, or as `φᵢ ± φⱼ` of two earlier terms.
#[derive(Clone, Copy, Debug)]
enum Recipe {
    Direct,
    Sum(usize, usize),
    Difference(usize, usize),
}

fn recipes_for(freqs: &[&Cn]) -> Vec<Recipe> {
    let mut out: Vec<Recipe> = Vec::with_capacity(freqs.len());
    for (k, f) in freqs.iter().enumerate() {
        let tol = 1e-12 * (1.0 + f.norm_sqr().sqrt());
        let mut recipe = Recipe::Direct;
        'search: for i in 0..k {
            for j in 0..k {
                if (&(freqs[i] + freqs[j]) - *f).norm_sqr().sqrt() <= tol {
                    recipe = Recipe::Sum(i, j);
                    break 'search;
                }
                if i != j && (&(freqs[i] - freqs[j]) - *f).norm_sqr().sqrt() <= tol {
                    recipe = Recipe::Difference(i, j);
                    break 'search;
                }
            }
        }
        out.push(recipe);
    }
    out
}

impl SignedGaussianMixture {
    pub fn new(n: usize, precision: f64, raw: Vec<MixtureTerm>) -> Self {
        let mut terms: Vec<MixtureTerm> = Vec::new();
        for t in raw {
            match terms.iter_mut().find(|q| q.frequency.max_abs_diff(&t.frequency) <= 1e-12) {
                Some(q) => q.amplitude += t.amplitude,
                None => terms.push(t),
            }
        }
        terms.retain(|t| t.amplitude.norm() > 1e-300);

        // Fold each ±f pair into cos/sin coefficients of a single real oscillation.
        let mut constant = 0.0;
        let mut oscillating: Vec<(Cn, f64, f64)> = Vec::new();
        let mut used = vec![false; terms.len()];
        for i in 0..terms.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let t = &terms[i];
            if t.frequency.norm_sqr().sqrt() <= 1e-12 {
                constant += t.amplitude.re;
                continue;
            }
            let (mut cc, mut sc) = (t.amplitude.re, -t.amplitude.im);
            let neg = -&t.frequency;
            if let Some(j) = (i + 1..terms.len()).find(|&j| !used[j] && terms[j].frequency.max_abs_diff(&neg) <= 1e-12) {
                used[j] = true;
                cc += terms[j].amplitude.re;
                sc += terms[j].amplitude.im;
            }
            oscillating.push((t.frequency.clone(), cc, sc));
        }
        let envelope = constant.abs() + oscillating.iter().map(|(_, c, s)| c.hypot(*s)).sum::<f64>();
        // Direct terms first so every combination refers to terms already evaluated.
        let mut recipes = recipes_for(&oscillating.iter().map(|o| &o.0).collect::<Vec<_>>());
        let order: Vec<usize> = (0..oscillating.len())
            .filter(|&k| matches!(recipes[k], Recipe::Direct))
            .chain((0..oscillating.len()).filter(|&k| !matches!(recipes[k], Recipe::Direct)))
            .collect();
        if order.iter().enumerate().any(|(pos, &k)| pos != k) {
            oscillating = order.iter().map(|&k| oscillating[k].clone()).collect();
            recipes = recipes_for(&oscillating.iter().map(|o| &o.0).collect::<Vec<_>>());
        }
        SignedGaussianMixture { n, precision, terms, constant, oscillating, recipes, envelope }
    }

    /// s-ordered quasiprobability of a peak state; `s = −1` is the heterodyne density.
    pub fn s_ordered(state: &PeakState, s: f64) -> Self {
        let width = state.a() - s / 2.0;
        let b = state.coupling();
        let a = state.a();
        let terms = state
            .peaks()
            .iter()
            .map(|p| {
                let g2 = p.center.norm_sqr();
                MixtureTerm {
                    amplitude: p.weight * clamped_exp(-(a - b * b / width) * g2),
                    frequency: p.center.conj().scale_re(b / width),
                }
            })
            .collect();
        Self::new(state.n(), 1.0 / width, terms)
    }

    /// Bell outcome density for input ports `(first, second)`: the symplectic Fourier
    /// transform of `χ_first(α) χ_second(α*)`.
    pub fn bell(first: &PeakState, second: &PeakState) -> Result<Self> {
        if first.n() != second.n() || (first.nu() - second.nu()).abs() > 1e-15 {
            return Err(Error::Domain("Bell ports must share mode count and nu".into()));
        }
        let a = first.a();
        let b = first.coupling();
        let mut terms = Vec::with_capacity(first.peaks().len() * second.peaks().len());
        for p in first.peaks() {
            for q in second.peaks() {
                let g = &p.center + &q.center.conj();
                let log_amp = -a * (p.center.norm_sqr() + q.center.norm_sqr()) + b * b * g.norm_sqr() / (2.0 * a);
                terms.push(MixtureTerm {
                    amplitude: p.weight * q.weight * clamped_exp(log_amp),
                    frequency: g.scale_re(b / (2.0 * a)),
                });
            }
        }
        Ok(Self::new(first.n(), 1.0 / (2.0 * a), terms))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }

    pub fn terms(&self) -> &[MixtureTerm] {
        &self.terms
    }

    /// Upper bound on `density / gaussian`; the rejection envelope.
    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    /// Closed-form integral of the density over phase space; 1 for a normalized state.
    pub fn normalization(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| (t.amplitude * (-t.frequency.norm_sqr() / self.precision).exp()).re)
            .sum()
    }

    /// `Re Σ cₖ e^{2i Im(fₖ·ζ)}`.
    #[inline]
    pub fn oscillation(&self, zeta: &[Complex64]) -> f64 {
        let mut acc = self.constant;
        for (f, cc, sc) in &self.oscillating {
            let mut im = 0.0;
            for (fi, zi) in f.0.iter().zip(zeta) {
                im += fi.re * zi.im + fi.im * zi.re;
            }
            let (s, c) = crate::numerics::sin_cos_fast(2.0 * im);
            acc += cc * c + sc * s;
        }
        acc
    }

    pub fn gaussian(&self, zeta: &Cn) -> f64 {
        (self.precision / std::f64::consts::PI).powi(self.n as i32) * (-self.precision * zeta.norm_sqr()).exp()
    }

    pub fn eval(&self, zeta: &Cn) -> f64 {
        self.gaussian(zeta) * self.oscillation(&zeta.0)
    }

    /// Rejection sampler; pushes `count` outcomes (flattened, `n` entries each) into `out`.
    ///
    /// Proposals are drawn in blocks but each consumes the stream exactly as a one-at-a-time
    /// loop would (its normals, then its uniform), so shorter runs are prefixes of longer ones.
    pub fn sample_into<R: Rng + ?Sized>(&self, count: usize, rng: &mut R, out: &mut Vec<Complex64>) -> Result<()> {
        const MAX_BLOCK: usize = 256;
        let sd = (0.5 / self.precision).sqrt();
        let n = self.n;
        out.reserve(count * n);
        let mut props = vec![Complex64::new(0.0, 0.0); MAX_BLOCK * n];
        let mut uniforms = [0.0; MAX_BLOCK];
        let mut osc = [0.0; MAX_BLOCK];
        let mut phases = vec![(0.0, 0.0); MAX_BLOCK * self.oscillating.len()];
        let mut accepted = 0;
        while accepted < count {
            let wanted = ((count - accepted) as f64 * self.envelope * 1.1).ceil() as usize + 2;
            let block = wanted.min(MAX_BLOCK);
            for (z, u) in props.chunks_exact_mut(n).zip(uniforms.iter_mut()).take(block) {
                for zi in z.iter_mut() {
                    let x: f64 = rng.sample(rand_distr::StandardNormal);
                    let y: f64 = rng.sample(rand_distr::StandardNormal);
                    *zi = Complex64::new(sd * x, sd * y);
                }
                *u = rng.random::<f64>();
            }
            osc[..block].fill(self.constant);
            for (k, ((f, cc, sc), recipe)) in self.oscillating.iter().zip(&self.recipes).enumerate() {
                let (done, rest) = phases.split_at_mut(k * MAX_BLOCK);
                let row = &mut rest[..block];
                match *recipe {
                    Recipe::Direct => {
                        for (p, z) in row.iter_mut().zip(props.chunks_exact(n)) {
                            let mut im = 0.0;
                            for (fi, zi) in f.0.iter().zip(z) {
                                im += fi.re * zi.im + fi.im * zi.re;
                            }
                            *p = crate::numerics::sin_cos_fast(2.0 * im);
                        }
                    }
                    Recipe::Sum(i, j) | Recipe::Difference(i, j) => {
                        let sign = if matches!(recipe, Recipe::Sum(..)) { 1.0 } else { -1.0 };
                        let (a, b) = (&done[i * MAX_BLOCK..], &done[j * MAX_BLOCK..]);
                        for ((p, &(sa, ca)), &(sb, cb)) in row.iter_mut().zip(a).zip(b) {
                            *p = (sa * cb + sign * ca * sb, ca * cb - sign * sa * sb);
                        }
                    }
                }
                for (o, &(s, c)) in osc.iter_mut().zip(row.iter()) {
                    *o += cc * c + sc * s;
                }
            }
            for j in 0..block {
                let ratio = osc[j] / self.envelope;
                if !(-1e-9..=1.0 + 1e-9).contains(&ratio) {
                    return Err(Error::Numeric(format!("rejection ratio {ratio} outside [0,1]; envelope is invalid")));
                }
                if uniforms[j] < ratio {
                    out.extend_from_slice(&props[j * n..(j + 1) * n]);
                    accepted += 1;
                    if accepted == count {
                        break;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<Cn>> {
        let mut flat = Vec::new();
        self.sample_into(count, rng, &mut flat)?;
        Ok(flat.chunks(self.n).map(|c| Cn(c.to_vec())).collect())
    }
}

/// Checks that `partner` is the reflected-then-circuit copy of `state`, i.e.
/// `χ_partner(α*) = χ_state(α)`, at a fixed set of probe points.
pub fn check_bell_pair(state: &PeakState, partner: &PeakState) -> Result<()> {
    if state.n() != partner.n() {
        return Err(Error::Domain("Bell ports have different mode counts".into()));
    }
    let mut rng = stream(0x6265_6c6c, 0);
    for _ in 0..16 {
        let alpha = gaussian_point(state.n(), 0.8, &mut rng);
        let d = (partner.char_fn(&alpha.conj()) - state.char_fn(&alpha)).norm();
        if d > 1e-10 {
            return Err(Error::Domain(format!(
                "second Bell port is not the reflected-then-circuit copy of the first \
                 (|χ₂(α*) − χ₁(α)| = {d:e} at α = {alpha})"
            )));
        }
    }
    Ok(())
}

/// Bell outcome density `p(ζ)` for the pair `(ρ, Û ρ^(U) Û†)`; equals the Fourier transform of `χ²`.
pub fn bell_density(state: &PeakState, partner: &PeakState, zeta: &Cn) -> Result<f64> {
    check_bell_pair(state, partner)?;
    Ok(SignedGaussianMixture::bell(state, partner)?.eval(zeta))
}

/// Heterodyne density `⟨ζ|ρ|ζ⟩/πⁿ`, the Husimi Q-function.
pub fn heterodyne_density(state: &PeakState, zeta: &Cn) -> f64 {
    SignedGaussianMixture::s_ordered(state, -1.0).eval(zeta)
}

/// A batch of measurement outcomes with enough provenance to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordHeader {
    pub scheme: Scheme,
    pub n: usize,
    pub seed: u64,
    pub stream: u64,
    pub count: usize,
    pub states: Vec<PeakState>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub header: RecordHeader,
    data: Vec<Complex64>,
}

impl MeasurementRecord {
    pub fn new(header: RecordHeader, data: Vec<Complex64>) -> Result<Self> {
        if header.n == 0 || data.is_empty() || data.len() % header.n != 0 {
            return Err(Error::Domain("record must hold a nonempty list of n-mode outcomes".into()));
        }
        let mut header = header;
        header.count = data.len() / header.n;
        Ok(MeasurementRecord { header, data })
    }

    pub fn scheme(&self) -> Scheme {
        self.header.scheme
    }

    pub fn n(&self) -> usize {
        self.header.n
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.header.n
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Outcomes as slices of length `n`.
    pub fn outcomes(&self) -> std::slice::Chunks<'_, Complex64> {
        self.data.chunks(self.header.n)
    }

    /// All outcomes back to back.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn outcome(&self, i: usize) -> Cn {
        Cn(self.data[i * self.header.n..(i + 1) * self.header.n].to_vec())
    }

    /// JSON-lines: a header object, then one `[re, im, re, im, ...]` array per outcome.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        writeln!(w)?;
        for o in self.outcomes() {
            let flat: Vec<f64> = o.iter().flat_map(|z| [z.re, z.im]).collect();
            serde_json::to_writer(&mut w, &flat)?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let head = lines.next().ok_or_else(|| Error::Domain("empty record file".into()))??;
        let header: RecordHeader = serde_json::from_str(&head)?;
        let mut data = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let flat: Vec<f64> = serde_json::from_str(&line)?;
            if flat.len() != 2 * header.n {
                return Err(Error::Domain(format!("outcome line has {} numbers, expected {}", flat.len(), 2 * header.n)));
            }
            data.extend(flat.chunks(2).map(|p| Complex64::new(p[0], p[1])));
        }
        Self::new(header, data)
    }
}

/// `count` Bell outcomes on `count` copies of `state ⊗ partner`.
pub fn sample_bell(state: &PeakState, partner: &PeakState, count: usize, seed: u64, stream_id: u64) -> Result<MeasurementRecord> {
    check_bell_pair(state, partner)?;
    if count == 0 {
        return Err(Error::Domain("count must be >= 1".into()));
    }
    let mix = SignedGaussianMixture::bell(state, partner)?;
    let mut rng = stream(seed, stream_id);
    let mut data = Vec::new();
    mix.sample_into(count, &mut rng, &mut data)?;
    let header = RecordHeader {
        scheme: Scheme::Bell,
        n: state.n(),
        seed,
        stream: stream_id,
        count,
        states: vec![state.clone(), partner.clone()],
    };
    MeasurementRecord::new(header, data)
}

/// `count` heterodyne outcomes on `count` copies of `state`.
pub fn sample_heterodyne(state: &PeakState, count: usize, seed: u64, stream_id: u64) -> Result<MeasurementRecord> {
    if count == 0 {
        return Err(Error::Domain("count must be >= 1".into()));
    }
    let mix = SignedGaussianMixture::s_ordered(state, -1.0);
    let mut rng = stream(seed, stream_id);
    let mut data = Vec::new();
    mix.sample_into(count, &mut rng, &mut data)?;
    let header = RecordHeader {
        scheme: Scheme::Heterodyne,
        n: state.n(),
        seed,
        stream: stream_id,
        count,
        states: vec![state.clone()],
    };
    MeasurementRecord::new(header, data)
}
