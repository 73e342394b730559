//! Coefficient-level arithmetic for truncated Hardy and Lebesgue spaces.
//!
//! An [`AnalyticSeries`] of truncation `N` stores the Taylor coefficients of
//! `z⁰..z^(N-1)`; a [`LaurentSeries`] of truncation `N` stores the Fourier
//! coefficients of `z^(-N)..z^N`. Products are coefficient convolutions, the
//! Riesz projection keeps the nonnegative modes, and conjugation on the circle
//! maps the mode `zⁿ` to `z^(-n)` with conjugated coefficient.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::TAIL_WARN;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Truncated element of `H²`: coefficients of `z⁰..z^(N-1)`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "AnalyticWire", try_from = "AnalyticWire")]
pub struct AnalyticSeries {
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for AnalyticSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown = self.degree().map_or(1, |d| d + 1).min(12);
        write!(f, "AnalyticSeries(N={}; ", self.truncation())?;
        for (n, c) in self.coeffs.iter().take(shown).enumerate() {
            write!(f, "{n}:{:.4}{:+.4}i ", c.re, c.im)?;
        }
        if shown < self.coeffs.len() {
            write!(f, "...")?;
        }
        write!(f, ")")
    }
}

impl AnalyticSeries {
    /// Wraps a coefficient vector; its length becomes the truncation.
    ///
    /// # Panics
    /// Panics on an empty vector: truncation must be positive.
    pub fn from_vec(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "truncation must be positive");
        Self { coeffs }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_vec(vec![ZERO; n])
    }

    pub fn constant(c: Complex64, n: usize) -> Self {
        let mut s = Self::zeros(n);
        s.coeffs[0] = c;
        s
    }

    /// `zᵏ` at truncation `n` (zero when `k ≥ n`).
    pub fn monomial(k: usize, n: usize) -> Self {
        let mut s = Self::zeros(n);
        if k < n {
            s.coeffs[k] = ONE;
        }
        s
    }

    /// Polynomial with the given low-order coefficients, zero-padded to `n`.
    pub fn from_poly(coeffs: &[Complex64], n: usize) -> Result<Self> {
        let mut s = Self::zeros(n);
        for (k, &c) in coeffs.iter().enumerate() {
            if k < n {
                s.coeffs[k] = c;
            } else if c != ZERO {
                return Err(Error::NotPolynomial(n));
            }
        }
        Ok(s)
    }

    pub fn from_real(coeffs: &[f64], n: usize) -> Result<Self> {
        let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_poly(&c, n)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self::from_vec((0..n).map(f).collect())
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `zᵏ`, zero beyond the truncation.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// `⟨self, other⟩ = Σ aₙ·conj(bₙ)`, conjugate-linear in `other`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_same(self.truncation(), other.truncation())?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_vec(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: Complex64, other: &Self) -> Result<Self> {
        check_same(self.truncation(), other.truncation())?;
        Ok(Self::from_vec(
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + c * b).collect(),
        ))
    }

    /// Multiplication by `z`; the top coefficient falls off.
    pub fn shift(&self) -> Self {
        self.shift_by(1)
    }

    pub fn shift_by(&self, k: usize) -> Self {
        let n = self.truncation();
        Self::from_fn(n, |i| if i >= k { self.coeffs[i - k] } else { ZERO })
    }

    /// Backward shift `S*f = (f - f(0))/z`.
    pub fn backshift(&self) -> Self {
        self.backshift_by(1)
    }

    pub fn backshift_by(&self, k: usize) -> Self {
        let n = self.truncation();
        Self::from_fn(n, |i| self.coeff(i + k))
    }

    /// Point evaluation inside the open disk.
    pub fn eval_at(&self, alpha: Complex64) -> Result<Complex64> {
        if alpha.norm() >= 1.0 {
            return Err(Error::OutsideDisk(alpha));
        }
        Ok(self.horner(alpha))
    }

    /// Value of the truncated series on the unit circle at angle `t`.
    pub fn boundary_value(&self, t: f64) -> Complex64 {
        self.horner(Complex64::from_polar(1.0, t))
    }

    fn horner(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    /// Pads with zeros or drops the top coefficients.
    pub fn resized(&self, n: usize) -> Self {
        Self::from_fn(n, |i| self.coeff(i))
    }

    /// Index of the last nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != ZERO)
    }

    /// Smallest `d` such that the coefficients beyond `d` carry at most
    /// `rel_tol` of the total absolute mass.
    pub fn effective_degree(&self, rel_tol: f64) -> Option<usize> {
        let total: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
        if total == 0.0 {
            return None;
        }
        let mut tail = 0.0;
        for d in (0..self.coeffs.len()).rev() {
            tail += self.coeffs[d].norm();
            if tail > rel_tol * total {
                return Some(d);
            }
        }
        Some(0)
    }

    /// Product of two analytic series; the first `N` coefficients are exact.
    pub fn mul_analytic(&self, other: &Self) -> Result<Self> {
        check_same(self.truncation(), other.truncation())?;
        let n = self.truncation();
        let mut out = vec![ZERO; n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self::from_vec(out))
    }

    pub fn to_laurent(&self) -> LaurentSeries {
        let n = self.truncation();
        let mut l = LaurentSeries::zeros(n);
        for (k, c) in self.coeffs.iter().enumerate() {
            l.set(k as i64, *c);
        }
        l
    }

    /// Boundary conjugate: the mode `zⁿ` goes to `z^(-n)`, coefficient conjugated.
    pub fn conj_on_circle(&self) -> LaurentSeries {
        let n = self.truncation();
        let mut l = LaurentSeries::zeros(n);
        for (k, c) in self.coeffs.iter().enumerate() {
            l.set(-(k as i64), c.conj());
        }
        l
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.truncation().max(other.truncation());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &AnalyticSeries {
    type Output = AnalyticSeries;
    fn add(self, rhs: Self) -> AnalyticSeries {
        self.axpy(ONE, rhs).expect("truncation mismatch in series addition")
    }
}

impl Sub for &AnalyticSeries {
    type Output = AnalyticSeries;
    fn sub(self, rhs: Self) -> AnalyticSeries {
        self.axpy(-ONE, rhs).expect("truncation mismatch in series subtraction")
    }
}

impl Mul<Complex64> for &AnalyticSeries {
    type Output = AnalyticSeries;
    fn mul(self, rhs: Complex64) -> AnalyticSeries {
        self.scale(rhs)
    }
}

impl Neg for &AnalyticSeries {
    type Output = AnalyticSeries;
    fn neg(self) -> AnalyticSeries {
        self.scale(-ONE)
    }
}

/// Result of a truncated convolution together with the mass it discarded.
#[derive(Clone, Debug)]
pub struct Product {
    pub series: LaurentSeries,
    /// `‖discarded‖ / (‖f‖·‖g‖)`.
    pub tail_ratio: f64,
}

impl Product {
    pub fn headroom_ok(&self) -> bool {
        self.tail_ratio <= TAIL_WARN
    }
}

/// Truncated element of `L²(𝕋)`: coefficients of `z^(-N)..z^N`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "LaurentWire", try_from = "LaurentWire")]
pub struct LaurentSeries {
    truncation: usize,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentSeries(N={}; ", self.truncation)?;
        for k in self.support() {
            let c = self.get(k);
            write!(f, "{k}:{:.4}{:+.4}i ", c.re, c.im)?;
        }
        write!(f, ")")
    }
}

impl LaurentSeries {
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "truncation must be positive");
        Self {
            truncation: n,
            coeffs: vec![ZERO; 2 * n + 1],
        }
    }

    /// `zᵏ` for any integer `k` with `|k| ≤ n`.
    pub fn monomial(k: i64, n: usize) -> Self {
        let mut l = Self::zeros(n);
        l.set(k, ONE);
        l
    }

    /// Builds a series from explicit `(index, coefficient)` pairs.
    pub fn from_modes(modes: &[(i64, Complex64)], n: usize) -> Result<Self> {
        let mut l = Self::zeros(n);
        for &(k, c) in modes {
            if k.unsigned_abs() as usize > n {
                if c != ZERO {
                    return Err(Error::Headroom(format!("mode {k} exceeds truncation {n}")));
                }
                continue;
            }
            l.set(k, l.get(k) + c);
        }
        Ok(l)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Coefficients in index order `-N..=N`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `zᵏ`; zero outside `-N..=N`.
    pub fn get(&self, k: i64) -> Complex64 {
        let n = self.truncation as i64;
        if k < -n || k > n {
            ZERO
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    /// # Panics
    /// Panics when `|k| > N`.
    pub fn set(&mut self, k: i64, c: Complex64) {
        let n = self.truncation as i64;
        assert!(k >= -n && k <= n, "mode {k} outside truncation {n}");
        self.coeffs[(k + n) as usize] = c;
    }

    /// Indices of the nonzero coefficients.
    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        let n = self.truncation as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(move |(i, _)| i as i64 - n)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_same(self.truncation, other.truncation)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            truncation: self.truncation,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn axpy(&self, c: Complex64, other: &Self) -> Result<Self> {
        check_same(self.truncation, other.truncation)?;
        Ok(Self {
            truncation: self.truncation,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + c * b).collect(),
        })
    }

    /// Coefficient convolution truncated to `-N..=N`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        Ok(self.multiply_tracked(other)?.series)
    }

    /// Like [`multiply`](Self::multiply), also reporting the discarded tail.
    pub fn multiply_tracked(&self, other: &Self) -> Result<Product> {
        check_same(self.truncation, other.truncation)?;
        let n = self.truncation as i64;
        let width = 4 * self.truncation + 1;
        let mut full = vec![ZERO; width];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                full[i + j] += a * b;
            }
        }
        // full[i + j] is the coefficient of z^(i + j - 2n)
        let mut out = Self::zeros(self.truncation);
        let mut discarded = 0.0;
        for (idx, c) in full.into_iter().enumerate() {
            let k = idx as i64 - 2 * n;
            if k.abs() <= n {
                out.set(k, c);
            } else {
                discarded += c.norm_sqr();
            }
        }
        let scale = self.norm() * other.norm();
        let tail_ratio = if scale > 0.0 { discarded.sqrt() / scale } else { 0.0 };
        Ok(Product {
            series: out,
            tail_ratio,
        })
    }

    /// Riesz projection: keeps the modes `0..N-1`.
    pub fn riesz_project(&self) -> AnalyticSeries {
        AnalyticSeries::from_fn(self.truncation, |k| self.get(k as i64))
    }

    /// Pointwise conjugation on the circle.
    pub fn conj(&self) -> Self {
        let mut l = Self::zeros(self.truncation);
        let n = self.truncation as i64;
        for k in -n..=n {
            l.set(-k, self.get(k).conj());
        }
        l
    }

    /// Negative-frequency part (the component in the conjugate of `H²₀`).
    pub fn negative_part(&self) -> Self {
        let mut l = self.clone();
        for k in 0..=self.truncation as i64 {
            l.set(k, ZERO);
        }
        l
    }

    pub fn resized(&self, n: usize) -> Self {
        let mut l = Self::zeros(n);
        let m = n.min(self.truncation) as i64;
        for k in -m..=m {
            l.set(k, self.get(k));
        }
        l
    }

    /// Negative and positive bandwidth: the extreme indices outside of which
    /// the absolute coefficient mass is at most `rel_tol` of the total.
    pub fn bandwidth(&self, rel_tol: f64) -> (usize, usize) {
        let n = self.truncation as i64;
        let total: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
        if total == 0.0 {
            return (0, 0);
        }
        let mut pos = 0;
        let mut tail = 0.0;
        for k in (1..=n).rev() {
            tail += self.get(k).norm();
            if tail > rel_tol * total {
                pos = k as usize;
                break;
            }
        }
        let mut neg = 0;
        tail = 0.0;
        for k in (1..=n).rev() {
            tail += self.get(-k).norm();
            if tail > rel_tol * total {
                neg = k as usize;
                break;
            }
        }
        (neg, pos)
    }

    /// True when every coefficient at a negative index vanishes up to `tol`
    /// relative to the largest coefficient.
    pub fn is_analytic(&self, tol: f64) -> bool {
        let scale = self.max_abs();
        (1..=self.truncation as i64).all(|k| self.get(-k).norm() <= tol * scale)
    }

    /// True when every coefficient at a positive index vanishes up to `tol`.
    pub fn is_coanalytic(&self, tol: f64) -> bool {
        let scale = self.max_abs();
        (1..=self.truncation as i64).all(|k| self.get(k).norm() <= tol * scale)
    }

    fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Value of the truncated series at `e^{it}`.
    pub fn boundary_value(&self, t: f64) -> Complex64 {
        let n = self.truncation as i64;
        (-n..=n)
            .map(|k| self.get(k) * Complex64::from_polar(1.0, k as f64 * t))
            .sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.truncation.max(other.truncation) as i64;
        (-n..=n)
            .map(|k| (self.get(k) - other.get(k)).norm())
            .fold(0.0, f64::max)
    }
}

/// Finite Blaschke product `c · z^m · Π ((α - z)/(1 - ᾱz))^{mult}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "BlaschkeWire", try_from = "BlaschkeWire")]
pub struct BlaschkeProduct {
    zeros: Vec<(Complex64, usize)>,
    z_power: usize,
    unimodular_const: Complex64,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<(Complex64, usize)>, z_power: usize, unimodular_const: Complex64) -> Result<Self> {
        if (unimodular_const.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidBlaschke(format!(
                "|c| = {} is not 1",
                unimodular_const.norm()
            )));
        }
        for &(a, mult) in &zeros {
            if a.norm() >= 1.0 {
                return Err(Error::InvalidBlaschke(format!("zero {a} outside the open disk")));
            }
            if mult == 0 {
                return Err(Error::InvalidBlaschke("zero multiplicity".into()));
            }
        }
        // zeros at the origin are folded into the z-power
        let mut z_power = z_power;
        let mut kept = Vec::with_capacity(zeros.len());
        for (a, mult) in zeros {
            if a == ZERO {
                z_power += mult;
            } else {
                kept.push((a, mult));
            }
        }
        Ok(Self {
            zeros: kept,
            z_power,
            unimodular_const,
        })
    }

    /// `z^m`.
    pub fn monomial(m: usize) -> Self {
        Self {
            zeros: Vec::new(),
            z_power: m,
            unimodular_const: ONE,
        }
    }

    /// Product of simple factors at the given points.
    pub fn from_zeros(points: &[Complex64]) -> Result<Self> {
        Self::new(points.iter().map(|&a| (a, 1)).collect(), 0, ONE)
    }

    pub fn zeros(&self) -> &[(Complex64, usize)] {
        &self.zeros
    }

    pub fn z_power(&self) -> usize {
        self.z_power
    }

    pub fn unimodular_const(&self) -> Complex64 {
        self.unimodular_const
    }

    pub fn degree(&self) -> usize {
        self.z_power + self.zeros.iter().map(|(_, m)| m).sum::<usize>()
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    /// Taylor expansion truncated to `n` terms.
    pub fn expand(&self, n: usize) -> AnalyticSeries {
        let mut out = AnalyticSeries::monomial(self.z_power, n).scale(self.unimodular_const);
        for &(a, mult) in &self.zeros {
            let factor = single_factor(a, n);
            for _ in 0..mult {
                out = out.mul_analytic(&factor).expect("same truncation");
            }
        }
        out
    }

    /// Closed-form value at a point of the closed disk.
    pub fn value_at(&self, z: Complex64) -> Complex64 {
        let mut v = self.unimodular_const * z.powu(self.z_power as u32);
        for &(a, mult) in &self.zeros {
            let f = (a - z) / (ONE - a.conj() * z);
            v *= f.powu(mult as u32);
        }
        v
    }

    /// `θ(0)`.
    pub fn at_zero(&self) -> Complex64 {
        self.value_at(ZERO)
    }

    /// Coefficients of the numerator `c·z^m·Π(α - z)^k` and the outer
    /// denominator `Π(1 - ᾱz)^k` as polynomials.
    pub fn numerator_denominator(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut num = vec![ZERO; self.z_power + 1];
        num[self.z_power] = self.unimodular_const;
        let mut den = vec![ONE];
        for &(a, mult) in &self.zeros {
            for _ in 0..mult {
                num = crate::poly::mul(&num, &[a, -ONE]);
                den = crate::poly::mul(&den, &[ONE, -a.conj()]);
            }
        }
        (num, den)
    }
}

/// Taylor coefficients of `(α - z)/(1 - ᾱz)`: `α`, then `-(1-|α|²)ᾱ^(n-1)`.
fn single_factor(a: Complex64, n: usize) -> AnalyticSeries {
    let w = 1.0 - a.norm_sqr();
    let ac = a.conj();
    let mut p = ONE;
    AnalyticSeries::from_fn(n, |k| {
        if k == 0 {
            a
        } else {
            let c = -w * p;
            p *= ac;
            c
        }
    })
}

/// Szegő kernel at `α`: coefficients `ᾱⁿ`.
pub fn reproducing_kernel(alpha: Complex64, n: usize) -> Result<AnalyticSeries> {
    if alpha.norm() >= 1.0 {
        return Err(Error::OutsideDisk(alpha));
    }
    let ac = alpha.conj();
    let mut p = ONE;
    Ok(AnalyticSeries::from_fn(n, |_| {
        let c = p;
        p *= ac;
        c
    }))
}

/// Reproducing kernel scaled to unit norm at the given truncation.
pub fn normalized_reproducing_kernel(alpha: Complex64, n: usize) -> Result<AnalyticSeries> {
    let k = reproducing_kernel(alpha, n)?;
    let nrm = k.norm();
    Ok(k.scale(Complex64::new(1.0 / nrm, 0.0)))
}

fn check_same(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::TruncationMismatch(a, b))
    }
}

// ---- wire formats ----

#[derive(Serialize, Deserialize)]
struct AnalyticWire {
    truncation: usize,
    coeffs: Vec<[f64; 2]>,
}

impl From<AnalyticSeries> for AnalyticWire {
    fn from(s: AnalyticSeries) -> Self {
        Self {
            truncation: s.truncation(),
            coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TryFrom<AnalyticWire> for AnalyticSeries {
    type Error = Error;
    fn try_from(w: AnalyticWire) -> Result<Self> {
        if w.truncation == 0 {
            return Err(Error::Schema("analytic series with zero truncation".into()));
        }
        let c: Vec<Complex64> = w.coeffs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        AnalyticSeries::from_poly(&c, w.truncation)
            .map_err(|_| Error::Schema("more coefficients than the truncation allows".into()))
    }
}

#[derive(Serialize, Deserialize)]
struct LaurentWire {
    truncation: usize,
    coeffs_from: i64,
    coeffs: Vec<[f64; 2]>,
}

impl From<LaurentSeries> for LaurentWire {
    fn from(s: LaurentSeries) -> Self {
        Self {
            truncation: s.truncation,
            coeffs_from: -(s.truncation as i64),
            coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TryFrom<LaurentWire> for LaurentSeries {
    type Error = Error;
    fn try_from(w: LaurentWire) -> Result<Self> {
        if w.truncation == 0 {
            return Err(Error::Schema("Laurent series with zero truncation".into()));
        }
        let modes: Vec<(i64, Complex64)> = w
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, p)| (w.coeffs_from + i as i64, Complex64::new(p[0], p[1])))
            .collect();
        LaurentSeries::from_modes(&modes, w.truncation).map_err(|e| Error::Schema(format!("Laurent series: {e}")))
    }
}

#[derive(Serialize, Deserialize)]
struct BlaschkeWire {
    #[serde(default)]
    zeros: Vec<([f64; 2], usize)>,
    #[serde(default)]
    z_power: usize,
    #[serde(default = "unit")]
    unimodular_const: [f64; 2],
}

fn unit() -> [f64; 2] {
    [1.0, 0.0]
}

impl From<BlaschkeProduct> for BlaschkeWire {
    fn from(b: BlaschkeProduct) -> Self {
        Self {
            zeros: b.zeros.iter().map(|(a, m)| ([a.re, a.im], *m)).collect(),
            z_power: b.z_power,
            unimodular_const: [b.unimodular_const.re, b.unimodular_const.im],
        }
    }
}

impl TryFrom<BlaschkeWire> for BlaschkeProduct {
    type Error = Error;
    fn try_from(w: BlaschkeWire) -> Result<Self> {
        BlaschkeProduct::new(
            w.zeros
                .into_iter()
                .map(|(p, m)| (Complex64::new(p[0], p[1]), m))
                .collect(),
            w.z_power,
            Complex64::new(w.unimodular_const[0], w.unimodular_const[1]),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn riesz_projection_drops_negative_modes() {
        let f = LaurentSeries::from_modes(&[(-1, c(1., 0.)), (0, c(2., 0.)), (1, c(3., 0.))], 4).unwrap();
        let p = f.riesz_project();
        assert_eq!(p.coeffs(), &[c(2., 0.), c(3., 0.), ZERO, ZERO]);
        assert_eq!(p.to_laurent().riesz_project(), p);
    }

    #[test]
    fn product_of_linear_factors() {
        let a = LaurentSeries::from_modes(&[(0, ONE), (1, ONE)], 4).unwrap();
        let b = LaurentSeries::from_modes(&[(0, ONE), (1, -ONE)], 4).unwrap();
        let p = a.multiply(&b).unwrap();
        let want = LaurentSeries::from_modes(&[(0, ONE), (2, -ONE)], 4).unwrap();
        assert_eq!(p, want);
    }

    #[test]
    fn monomial_times_its_conjugate_is_one() {
        let n = 8;
        for m in 0..5 {
            let z = AnalyticSeries::monomial(m, n);
            let p = z.to_laurent().multiply(&z.conj_on_circle()).unwrap();
            assert_eq!(p, LaurentSeries::monomial(0, n));
        }
    }

    #[test]
    fn blaschke_times_conjugate_is_unimodular_up_to_tail() {
        let n = 128;
        for &a in &[c(0.5, 0.0), c(0.3, -0.6), c(-0.8, 0.0)] {
            let b = BlaschkeProduct::from_zeros(&[a]).unwrap().expand(n);
            let prod = b.to_laurent().multiply_tracked(&b.conj_on_circle()).unwrap();
            let one = LaurentSeries::monomial(0, n);
            // missing tail mass of the truncated expansion is |α|^(2N)
            let tail = a.norm().powi(n as i32) * 4.0;
            assert!(prod.series.max_abs_diff(&one) <= tail.max(1e-14), "{a}");
        }
    }

    #[test]
    fn conjugation_examples() {
        let f = AnalyticSeries::from_poly(&[ONE, c(0., 2.)], 3).unwrap();
        let g = f.conj_on_circle();
        assert_eq!(g.get(0), ONE);
        assert_eq!(g.get(-1), c(0., -2.));
        let iz = AnalyticSeries::from_poly(&[ZERO, c(0., 1.)], 3).unwrap();
        assert_eq!(iz.conj_on_circle().get(-1), c(0., -1.));
        // twice is the identity on the Laurent embedding
        assert_eq!(g.conj(), f.to_laurent());
        assert!((g.norm() - f.norm()).abs() < 1e-15);
    }

    #[test]
    fn backshift_examples() {
        let f = AnalyticSeries::from_real(&[1., 2., 3.], 5).unwrap();
        assert_eq!(f.backshift(), AnalyticSeries::from_real(&[2., 3.], 5).unwrap());
        assert!(AnalyticSeries::constant(c(4., 1.), 5).backshift().is_zero());
        // S S* f = f - f(0)
        let g = f.backshift().shift();
        assert_eq!(g, AnalyticSeries::from_real(&[0., 2., 3.], 5).unwrap());
    }

    #[test]
    fn inner_products() {
        let n = 6;
        let z = AnalyticSeries::monomial(1, n);
        assert_eq!(z.inner(&z).unwrap(), ONE);
        let err = z.inner(&AnalyticSeries::monomial(1, n + 1));
        assert!(matches!(err, Err(Error::TruncationMismatch(6, 7))));
        // projection is self-adjoint against analytic g
        let f = LaurentSeries::from_modes(&[(-2, c(1., 1.)), (0, c(0.5, 0.)), (3, c(0., 2.))], n).unwrap();
        let g = AnalyticSeries::from_real(&[1., -1., 0., 2.], n).unwrap();
        let lhs = f.riesz_project().inner(&g).unwrap();
        let rhs = f.inner(&g.to_laurent()).unwrap();
        assert!(close(lhs, rhs, 1e-15));
    }

    #[test]
    fn eval_at_points() {
        let f = AnalyticSeries::from_real(&[1., 1.], 4).unwrap();
        assert_eq!(f.eval_at(ZERO).unwrap(), ONE);
        assert!(matches!(f.eval_at(c(1.0, 0.0)), Err(Error::OutsideDisk(_))));
        let a = c(0.6, 0.4);
        let b = BlaschkeProduct::from_zeros(&[a]).unwrap().expand(256);
        assert!(b.eval_at(a).unwrap().norm() < 1e-10);
    }

    #[test]
    fn reproducing_kernel_evaluates_geometric_series() {
        let a = c(0.4, -0.3);
        let beta = c(-0.2, 0.5);
        let k = reproducing_kernel(a, 128).unwrap();
        let want = ONE / (ONE - a.conj() * beta);
        assert!(close(k.eval_at(beta).unwrap(), want, 1e-14));
        assert_eq!(reproducing_kernel(ZERO, 5).unwrap(), AnalyticSeries::constant(ONE, 5));
        let nk = normalized_reproducing_kernel(a, 40).unwrap();
        assert!((nk.norm() - 1.0).abs() < 1e-12);
        assert!(reproducing_kernel(c(0.0, 1.0), 4).is_err());
        // reproducing property, exact at truncation for low-degree f
        let f = AnalyticSeries::from_real(&[2., -1., 0.5, 3.], 16).unwrap();
        let k16 = reproducing_kernel(a, 16).unwrap();
        assert!(close(f.inner(&k16).unwrap(), f.eval_at(a).unwrap(), 1e-14));
    }

    #[test]
    fn blaschke_single_zero_coefficients() {
        // series-division oracle: (1/2 - z) / (1 - z/2)
        let b = BlaschkeProduct::from_zeros(&[c(0.5, 0.)]).unwrap().expand(5);
        let want = [0.5, -0.75, -0.375, -0.1875, -0.09375];
        for (k, w) in want.iter().enumerate() {
            assert!((b.coeff(k) - c(*w, 0.)).norm() < 1e-15);
        }
        assert_eq!(BlaschkeProduct::monomial(3).expand(6), AnalyticSeries::monomial(3, 6));
    }

    #[test]
    fn blaschke_rejects_bad_data() {
        assert!(BlaschkeProduct::new(vec![(c(1.0, 0.0), 1)], 0, ONE).is_err());
        assert!(BlaschkeProduct::new(vec![], 0, c(2.0, 0.0)).is_err());
        let b = BlaschkeProduct::new(vec![(ZERO, 2), (c(0.5, 0.), 1)], 1, ONE).unwrap();
        assert_eq!(b.z_power(), 3);
        assert_eq!(b.degree(), 4);
    }

    #[test]
    fn series_json_layout() {
        let f = AnalyticSeries::from_poly(&[ONE, c(0., 2.)], 3).unwrap();
        let j = serde_json::to_value(&f).unwrap();
        assert_eq!(j["truncation"], 3);
        assert_eq!(j["coeffs"][1][1], 2.0);
        let back: AnalyticSeries = serde_json::from_value(j).unwrap();
        assert_eq!(back, f);

        let l = LaurentSeries::from_modes(&[(-1, ONE)], 2).unwrap();
        let j = serde_json::to_value(&l).unwrap();
        assert_eq!(j["coeffs_from"], -2);
        assert_eq!(j["coeffs"].as_array().unwrap().len(), 5);
        let back: LaurentSeries = serde_json::from_value(j).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn tail_is_reported() {
        let n = 4;
        let a = AnalyticSeries::monomial(3, n).to_laurent();
        let p = a.multiply_tracked(&a).unwrap();
        assert!(!p.headroom_ok());
        assert!((p.tail_ratio - 1.0).abs() < 1e-15);
    }
}
