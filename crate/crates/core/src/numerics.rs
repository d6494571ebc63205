//! Special functions, sampling primitives and small dense linear algebra
//! shared by the rest of the crate.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default absolute tolerance for matrix invariants.
pub const MATRIX_TOL: f64 = 1e-10;

pub type CMatrix = DMatrix<Complex64>;

/// Seeded random stream. Every stochastic routine takes one of these.
pub type Stream = ChaCha8Rng;

/// Independent stream `id` derived from a master seed.
pub fn stream(seed: u64, id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// A point of n-mode phase space.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Cn(pub Vec<Complex64>);

impl Cn {
    pub fn zeros(n: usize) -> Self {
        Cn(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_parts(parts: &[(f64, f64)]) -> Self {
        Cn(parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    /// Single-mode point.
    pub fn scalar(z: Complex64) -> Self {
        Cn(vec![z])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Unconjugated product `Σ aᵢbᵢ`.
    pub fn dot(&self, other: &Cn) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Hermitian product `a†b = Σ conj(aᵢ)bᵢ`.
    pub fn inner(&self, other: &Cn) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn conj(&self) -> Cn {
        Cn(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, s: Complex64) -> Cn {
        Cn(self.0.iter().map(|z| z * s).collect())
    }

    pub fn scale_re(&self, s: f64) -> Cn {
        Cn(self.0.iter().map(|z| z * s).collect())
    }

    /// Matrix-vector product `M·self`.
    pub fn mul_by(&self, m: &CMatrix) -> Cn {
        let n = self.len();
        Cn((0..n).map(|i| (0..n).map(|j| m[(i, j)] * self.0[j]).sum()).collect())
    }

    pub fn max_abs_diff(&self, other: &Cn) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }
}

impl Index<usize> for Cn {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Cn {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl Add for &Cn {
    type Output = Cn;
    fn add(self, rhs: &Cn) -> Cn {
        Cn(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Cn {
    type Output = Cn;
    fn sub(self, rhs: &Cn) -> Cn {
        Cn(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Cn {
    type Output = Cn;
    fn neg(self) -> Cn {
        Cn(self.0.iter().map(|z| -z).collect())
    }
}

impl fmt::Display for Cn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, z) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_complex(*z))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct ReIm {
    re: f64,
    im: f64,
}

/// Accepted spellings of one entry: `{re, im}`, `[re, im]` or an `a+bi` literal.
#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Object(ReIm),
    Pair([f64; 2]),
    Literal(String),
}

impl Serialize for Cn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<ReIm> = self.0.iter().map(|z| ReIm { re: z.re, im: z.im }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<Entry> = Vec::deserialize(d)?;
        v.into_iter()
            .map(|e| match e {
                Entry::Object(p) => Ok(Complex64::new(p.re, p.im)),
                Entry::Pair([re, im]) => Ok(Complex64::new(re, im)),
                Entry::Literal(t) => parse_complex(&t).map_err(serde::de::Error::custom),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Cn)
    }
}

/// Formats as `a+bi`, the literal syntax accepted by [`parse_complex`].
pub fn format_complex(z: Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (whitespace ignored, `j` accepted for `i`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Domain(format!("cannot parse complex literal '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not the leading sign and not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let parse_im = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, parse_im(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, parse_im(body)?)),
    }
}

/// Regularized upper incomplete gamma `Q(shape, x) = Γ(shape, x)/Γ(shape)`.
pub fn regularized_upper_gamma(shape: f64, x: f64) -> Result<f64> {
    if !shape.is_finite() || shape <= 0.0 {
        return Err(Error::Domain(format!("gamma shape must be finite and > 0, got {shape}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("gamma argument must be >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    statrs::function::gamma::checked_gamma_ur(shape, x)
        .map(|q| q.clamp(0.0, 1.0))
        .map_err(|e| Error::Numeric(format!("incomplete gamma failed: {e}")))
}

/// Draws `count` points with density `(2πσ²)^{-n} exp(-|γ|²/(2σ²))`, i.e. each real
/// coordinate is N(0, σ²).
pub fn sample_complex_gaussian<R: Rng + ?Sized>(
    n: usize,
    variance: f64,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Cn>> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::Domain(format!("variance must be positive, got {variance}")));
    }
    if count == 0 || n == 0 {
        return Err(Error::Domain("need n >= 1 and count >= 1".into()));
    }
    Ok((0..count).map(|_| gaussian_point(n, variance.sqrt(), rng)).collect())
}

/// One draw with standard deviation `sd` on each real coordinate.
pub fn gaussian_point<R: Rng + ?Sized>(n: usize, sd: f64, rng: &mut R) -> Cn {
    Cn((0..n)
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            Complex64::new(sd * x, sd * y)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsdReport {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).iter().all(|z| z.norm() <= tol)
}

/// Smallest eigenvalue test for a Hermitian matrix.
pub fn psd_check(m: &CMatrix, tol: f64) -> Result<PsdReport> {
    if !is_hermitian(m, tol.max(1e-12)) {
        return Err(Error::Domain("psd_check: matrix is not Hermitian".into()));
    }
    let min = min_eigenvalue(m);
    Ok(PsdReport { psd: min >= -tol, min_eigenvalue: min })
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()).scale(0.5);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Symmetric unitary `U = Uᵀ`, `UU* = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricUnitary {
    matrix: CMatrix,
}

impl SymmetricUnitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tol(matrix, MATRIX_TOL)
    }

    pub fn with_tol(matrix: CMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Domain("symmetric unitary must be square".into()));
        }
        let asym = max_abs(&(&matrix - matrix.transpose()));
        if asym > tol {
            return Err(Error::Domain(format!("matrix is not symmetric (max |U-Uᵀ| = {asym:e})")));
        }
        let n = matrix.nrows();
        let defect = max_abs(&(&matrix * matrix.map(|z| z.conj()) - CMatrix::identity(n, n)));
        if defect > tol {
            return Err(Error::Domain(format!("matrix is not unitary (max |UU*-I| = {defect:e})")));
        }
        Ok(SymmetricUnitary { matrix })
    }

    pub fn identity(n: usize) -> Self {
        SymmetricUnitary { matrix: CMatrix::identity(n, n) }
    }

    /// `U = -I`, the axes that produce the complex-conjugate state.
    pub fn minus_identity(n: usize) -> Self {
        SymmetricUnitary { matrix: -CMatrix::identity(n, n) }
    }

    /// `V Vᵀ` for a random Haar-like unitary `V`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let v = random_unitary(n, rng);
        let u = &v * v.transpose();
        // Symmetrize away rounding so the invariant holds to machine precision.
        let u = (&u + u.transpose()).scale(0.5);
        SymmetricUnitary { matrix: u }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `U z*`, the reflection of a phase-space point.
    pub fn reflect_point(&self, z: &Cn) -> Cn {
        z.conj().mul_by(&self.matrix)
    }
}

/// Unitary `V` with `V Vᵀ = U`.
#[derive(Clone, Debug, PartialEq)]
pub struct TakagiFactor {
    pub v: CMatrix,
}

impl TakagiFactor {
    pub fn reconstruct(&self) -> CMatrix {
        &self.v * self.v.transpose()
    }

    /// Right-multiplies by a real orthogonal matrix; the result is again a valid factor.
    pub fn rotated(&self, o: &DMatrix<f64>) -> TakagiFactor {
        TakagiFactor { v: &self.v * o.map(|x| Complex64::new(x, 0.0)) }
    }
}

/// Takagi factorization of a symmetric unitary.
///
/// `Re U` and `Im U` are commuting real symmetric matrices, so one real orthogonal
/// `O` diagonalizes both; then `U = O diag(e^{iθ}) Oᵀ` and `V = O diag(e^{iθ/2})`.
/// `O` comes from the eigenvectors of `Re U + t Im U` for a generic `t`, retried
/// with another `t` on accidental degeneracies.
pub fn takagi_decompose(u: &SymmetricUnitary) -> Result<TakagiFactor> {
    let n = u.dim();
    let m = u.matrix();
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    for t in [0.618_033_988_749_895, 1.324_717_957_244_746, -0.754_877_666_246_693, 2.718_281_828_459_045, -1.414_213_562_373_095] {
        let mix = &re + &im * t;
        let eig = SymmetricEigen::new(mix);
        let o = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let d = o.transpose() * m * &o;
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| d[(i, j)].norm())
            .fold(0.0, f64::max);
        if off > 1e-9 {
            continue;
        }
        let half = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            (0..n).map(|i| Complex64::from_polar(1.0, d[(i, i)].arg() / 2.0)),
        ));
        let factor = TakagiFactor { v: o * half };
        let err = max_abs(&(factor.reconstruct() - m));
        if err <= 1e-9 {
            return Ok(factor);
        }
    }
    Err(Error::Numeric("Takagi factorization did not converge".into()))
}

/// Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        Complex64::new(x, y)
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix the phases of R's diagonal so the distribution is Haar.
    let phases = nalgebra::DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) }
        }),
    );
    q * CMatrix::from_diagonal(&phases)
}

/// Haar-random real orthogonal matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let signs = nalgebra::DVector::from_iterator(n, (0..n).map(|i| r[(i, i)].signum()));
    q * DMatrix::from_diagonal(&signs)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `exp(x)` with arguments below the double-precision underflow limit mapped to zero.
#[inline]
pub fn clamped_exp(x: f64) -> f64 {
    if x < -745.0 { 0.0 } else { x.exp() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_shape_one_is_exponential() {
        for &x in &[0.1, 1.0, 3.5, 20.0] {
            let q = regularized_upper_gamma(1.0, x).unwrap();
            assert!((q - (-x as f64).exp()).abs() < 1e-14);
        }
        assert_eq!(regularized_upper_gamma(3.0, 0.0).unwrap(), 1.0);
        assert!(regularized_upper_gamma(0.0, 1.0).is_err());
        assert!(regularized_upper_gamma(1.0, -1.0).is_err());
        assert!(regularized_upper_gamma(1.0, f64::NAN).is_err());
    }

    #[test]
    fn gamma_fact_at_eight() {
        assert!(regularized_upper_gamma(8.0, 8.0 / 0.99).unwrap() <= 0.492);
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1+0.5i").unwrap(), Complex64::new(1.0, 0.5));
        assert_eq!(parse_complex("-2.5").unwrap(), Complex64::new(-2.5, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3-2e+1i").unwrap(), Complex64::new(1e-3, -20.0));
        assert_eq!(parse_complex("0.3j").unwrap(), Complex64::new(0.0, 0.3));
        assert!(parse_complex("abc").is_err());
        let z = Complex64::new(0.25, -1.5);
        assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }

    #[test]
    fn takagi_trivial_cases() {
        let id = takagi_decompose(&SymmetricUnitary::identity(3)).unwrap();
        assert!(max_abs(&(id.reconstruct() - CMatrix::identity(3, 3))) < 1e-12);
        let m = takagi_decompose(&SymmetricUnitary::minus_identity(2)).unwrap();
        assert!(max_abs(&(m.reconstruct() + CMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn rejects_non_symmetric() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(SymmetricUnitary::new(m).is_err());
        let m = CMatrix::identity(2, 2).scale(2.0);
        assert!(SymmetricUnitary::new(m).is_err());
    }

    #[test]
    fn psd_examples() {
        let r = psd_check(&CMatrix::identity(3, 3), 1e-12).unwrap();
        assert!(r.psd && (r.min_eigenvalue - 1.0).abs() < 1e-12);
        let m = CMatrix::from_row_slice(2, 2, &[1.0, 9.0, 9.0, 1.0].map(|x| Complex64::new(x, 0.0)));
        let r = psd_check(&m, 1e-12).unwrap();
        assert!(!r.psd && (r.min_eigenvalue + 8.0).abs() < 1e-12);
        let r = psd_check(&CMatrix::zeros(2, 2), 1e-12).unwrap();
        assert!(r.psd);
        let mut nh = CMatrix::identity(2, 2);
        nh[(0, 1)] = Complex64::new(0.0, 1.0);
        assert!(psd_check(&nh, 1e-12).is_err());
    }
}

const PIO2_HI: f64 = 1.570_796_326_734_125_614_17e+00;
const PIO2_LO: f64 = 6.077_100_506_506_192_249_32e-11;

/// `(sin x, cos x)` for the Monte Carlo hot loops.
///
/// Two-constant reduction modulo π/2 followed by the fdlibm minimax kernels; agrees
/// with the libm result to a few ulp for `|x| ≤ 1e6` and defers to it beyond.
#[inline]
pub fn sin_cos_fast(x: f64) -> (f64, f64) {
    if !(x.abs() <= SIN_COS_RANGE) {
        return x.sin_cos();
    }
    sin_cos_reduced(x)
}

/// Largest `|x|` handled by [`sin_cos_reduced`].
pub const SIN_COS_RANGE: f64 = 1e6;

/// [`sin_cos_fast`] without the range check; branch-free so loops over it vectorize.
/// Callers must ensure `|x| ≤ SIN_COS_RANGE`.
#[inline(always)]
pub fn sin_cos_reduced(x: f64) -> (f64, f64) {
    // Round to nearest via the 1.5·2⁵² trick; `f64::round` is a libm call on baseline x86-64.
    // The low mantissa bits of the shifted value hold the quadrant.
    const SHIFTER: f64 = 6_755_399_441_055_744.0;
    let shifted = x * std::f64::consts::FRAC_2_PI + SHIFTER;
    let q = shifted.to_bits() & 3;
    let k = shifted - SHIFTER;
    let r = (x - k * PIO2_HI) - k * PIO2_LO;
    let z = r * r;
    let s = r + r * z * (-1.666_666_666_666_663_243_48e-01
        + z * (8.333_333_333_322_489_461_24e-03
            + z * (-1.984_126_982_985_794_931_34e-04
                + z * (2.755_731_370_707_006_767_89e-06
                    + z * (-2.505_076_025_340_686_341_95e-08 + z * 1.589_690_995_211_550_102_21e-10)))));
    let c = 1.0 - 0.5 * z
        + z * z
            * (4.166_666_666_666_660_190_37e-02
                + z * (-1.388_888_888_887_410_957_49e-03
                    + z * (2.480_158_728_947_672_941_78e-05
                        + z * (-2.755_731_435_139_066_330_35e-07
                            + z * (2.087_572_321_298_174_827_90e-09 + z * -1.135_964_755_778_819_482_65e-11)))));
    // Branchless quadrant fix-up: the quadrant is effectively random in the sampling loops.
    let swap = (q & 1).wrapping_neg();
    let (sb, cb) = (s.to_bits(), c.to_bits());
    let first = (sb & !swap) | (cb & swap);
    let second = (cb & !swap) | (sb & swap);
    let sin = f64::from_bits(first ^ ((q >> 1) << 63));
    let cos = f64::from_bits(second ^ ((((q + 1) >> 1) & 1) << 63));
    (sin, cos)
}
