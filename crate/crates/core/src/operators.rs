//! Finite sections of Toeplitz operators and their finite-rank perturbations.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::poly;
use crate::series::{AnalyticSeries, BlaschkeProduct, LaurentSeries};
use crate::SCALAR_TOL;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative tail mass below which symbol coefficients count as absent when
/// measuring bandwidth.
pub const BANDWIDTH_TOL: f64 = 1e-12;

/// The symbol classes a Toeplitz operator can be built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SymbolSpec {
    Zero,
    TrigPoly {
        series: LaurentSeries,
    },
    Inner {
        theta: BlaschkeProduct,
    },
    ConjInner {
        theta: BlaschkeProduct,
    },
    /// `g = f1 · conj(f2)` with both polynomials zero-free on the closed disk.
    InvertibleProduct {
        f1: AnalyticSeries,
        f2: AnalyticSeries,
    },
}

impl SymbolSpec {
    pub fn validate(&self) -> Result<()> {
        if let SymbolSpec::InvertibleProduct { f1, f2 } = self {
            for f in [f1, f2] {
                poly::taylor_invert(f, 1)?;
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            SymbolSpec::Zero => "zero",
            SymbolSpec::TrigPoly { .. } => "trig_poly",
            SymbolSpec::Inner { .. } => "inner",
            SymbolSpec::ConjInner { .. } => "conj_inner",
            SymbolSpec::InvertibleProduct { .. } => "invertible_product",
        }
    }

    /// Largest polynomial degree carried by the symbol data (Blaschke
    /// products count their degree).
    pub fn max_degree(&self) -> usize {
        match self {
            SymbolSpec::Zero => 0,
            SymbolSpec::TrigPoly { series } => series.support().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0),
            SymbolSpec::Inner { theta } | SymbolSpec::ConjInner { theta } => theta.degree(),
            SymbolSpec::InvertibleProduct { f1, f2 } => f1.degree().unwrap_or(0).max(f2.degree().unwrap_or(0)),
        }
    }

    /// Fourier coefficients of the symbol on `-n..=n`.
    pub fn fourier(&self, n: usize) -> Result<LaurentSeries> {
        match self {
            SymbolSpec::Zero => Ok(LaurentSeries::zeros(n)),
            SymbolSpec::TrigPoly { series } => {
                let modes: Vec<(i64, Complex64)> = series.support().map(|k| (k, series.get(k))).collect();
                LaurentSeries::from_modes(&modes, n)
            }
            SymbolSpec::Inner { theta } => Ok(theta.expand(n).to_laurent()),
            SymbolSpec::ConjInner { theta } => Ok(theta.expand(n).conj_on_circle()),
            SymbolSpec::InvertibleProduct { f1, f2 } => {
                let a = fit(f1, n)?.to_laurent();
                let b = fit(f2, n)?.conj_on_circle();
                a.multiply(&b)
            }
        }
    }
}

/// Resizes a polynomial to truncation `n`, refusing to drop coefficients.
fn fit(f: &AnalyticSeries, n: usize) -> Result<AnalyticSeries> {
    AnalyticSeries::from_poly(f.coeffs(), n)
}

/// Fourier coefficients of `s` on `-n..=n`.
pub fn symbol_fourier(s: &SymbolSpec, n: usize) -> Result<LaurentSeries> {
    s.fourier(n)
}

/// One rank-one term `h ↦ ⟨h, u⟩ v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub u: AnalyticSeries,
    pub v: AnalyticSeries,
}

/// Finite-rank part `h ↦ Σ ⟨h, u_i⟩ v_i` of the perturbed operator.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub terms: Vec<Term>,
}

impl PerturbationSpec {
    pub fn new(terms: Vec<(AnalyticSeries, AnalyticSeries)>) -> Self {
        Self {
            terms: terms.into_iter().map(|(u, v)| Term { u, v }).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn us(&self) -> impl Iterator<Item = &AnalyticSeries> {
        self.terms.iter().map(|t| &t.u)
    }

    pub fn vs(&self) -> impl Iterator<Item = &AnalyticSeries> {
        self.terms.iter().map(|t| &t.v)
    }

    pub fn max_degree(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| [t.u.degree(), t.v.degree()])
            .map(|d| d.unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Zero-pads or truncates every vector to truncation `n`.
    pub fn resized(&self, n: usize) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    u: t.u.resized(n),
                    v: t.v.resized(n),
                })
                .collect(),
        }
    }

    /// Checks truncations, orthonormality of the `u_i` and orthogonality of
    /// the `v_i`.
    pub fn validate(&self, n: usize) -> Result<()> {
        for (i, t) in self.terms.iter().enumerate() {
            if t.u.truncation() != n || t.v.truncation() != n {
                return Err(Error::TruncationMismatch(n, t.u.truncation().max(t.v.truncation())));
            }
            if t.v.norm() == 0.0 {
                return Err(Error::PerturbationInvariant(format!("v_{} is zero", i + 1)));
            }
        }
        for (i, a) in self.terms.iter().enumerate() {
            for (j, b) in self.terms.iter().enumerate() {
                let g = a.u.inner(&b.u)?;
                let want = if i == j { 1.0 } else { 0.0 };
                if (g - Complex64::new(want, 0.0)).norm() > SCALAR_TOL {
                    return Err(Error::PerturbationInvariant(format!(
                        "u vectors are not orthonormal: <u_{}, u_{}> = {g}",
                        i + 1,
                        j + 1
                    )));
                }
                if i < j {
                    let h = a.v.inner(&b.v)?;
                    if h.norm() > SCALAR_TOL * a.v.norm() * b.v.norm() {
                        return Err(Error::PerturbationInvariant(format!(
                            "v_{} and v_{} are not orthogonal",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Dense finite section of an operator on `H²`.
///
/// `spill` is the positive bandwidth of the underlying symbol: columns
/// `N - spill..N` are affected by the truncation of `g·f` and are excluded
/// when a kernel is computed.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    entries: CMat,
    truncation: usize,
    label: String,
    spill: usize,
}

impl OperatorMatrix {
    pub fn from_entries(entries: CMat, label: impl Into<String>) -> Self {
        assert_eq!(entries.nrows(), entries.ncols(), "operator matrix must be square");
        let truncation = entries.nrows();
        Self {
            entries,
            truncation,
            label: label.into(),
            spill: 0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_entries(CMat::identity(n, n), "identity")
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spill(&self) -> usize {
        self.spill
    }

    pub fn with_spill(mut self, spill: usize) -> Self {
        self.spill = spill.min(self.truncation);
        self
    }

    pub fn apply(&self, f: &AnalyticSeries) -> Result<AnalyticSeries> {
        if f.truncation() != self.truncation {
            return Err(Error::TruncationMismatch(self.truncation, f.truncation()));
        }
        let x = CVec::from_column_slice(f.coeffs());
        let y = &self.entries * x;
        Ok(AnalyticSeries::from_vec(y.iter().copied().collect()))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            truncation: self.truncation,
            label: format!("({})*", self.label),
            spill: 0,
        }
    }

    /// Columns whose image is not affected by the truncation.
    pub fn exact_columns(&self) -> CMat {
        let keep = self.truncation - self.spill;
        self.entries.columns(0, keep).into_owned()
    }
}

/// Finite section with entry `(j, k) = ĝ(j - k)`.
pub fn toeplitz_matrix(g: &LaurentSeries, n: usize) -> OperatorMatrix {
    let entries = CMat::from_fn(n, n, |j, k| g.get(j as i64 - k as i64));
    let (_, pos) = g.bandwidth(BANDWIDTH_TOL);
    let label = format!("T_g[{}x{}]", n, n);
    OperatorMatrix::from_entries(entries, label).with_spill(pos)
}

/// Toeplitz matrix of a symbol spec at truncation `n`.
pub fn toeplitz_of(s: &SymbolSpec, n: usize) -> Result<OperatorMatrix> {
    let g = s.fourier(n)?;
    let mut t = toeplitz_matrix(&g, n);
    t.label = format!("T[{}]", s.name());
    Ok(t)
}

/// `T + Σ v_i u_iᴴ`.
pub fn perturbed_matrix(t: &OperatorMatrix, p: &PerturbationSpec) -> Result<OperatorMatrix> {
    let n = t.truncation;
    let mut entries = t.entries.clone();
    for term in &p.terms {
        if term.u.truncation() != n {
            return Err(Error::TruncationMismatch(n, term.u.truncation()));
        }
        if term.v.truncation() != n {
            return Err(Error::TruncationMismatch(n, term.v.truncation()));
        }
        let u = CVec::from_column_slice(term.u.coeffs());
        let v = CVec::from_column_slice(term.v.coeffs());
        entries += v * u.adjoint();
    }
    Ok(OperatorMatrix {
        entries,
        truncation: n,
        label: format!("{} + rank {}", t.label, p.rank()),
        spill: t.spill,
    })
}

/// Matrix of the backward shift at truncation `n`.
pub fn backshift_matrix(n: usize) -> OperatorMatrix {
    toeplitz_matrix(&LaurentSeries::monomial(-1, n), n)
}

/// Probe vectors for operator identities: the monomials below `n/2` and
/// eight seeded random vectors supported there.
pub fn probe_vectors(n: usize, seed: u64) -> Vec<AnalyticSeries> {
    let half = n / 2;
    let mut out: Vec<AnalyticSeries> = (0..half).map(|j| AnalyticSeries::monomial(j, n)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..8 {
        out.push(AnalyticSeries::from_fn(n, |k| {
            if k < half {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                ZERO
            }
        }));
    }
    out
}

/// Largest relative residual `‖(T_ψT_φ − T_ψφ)f‖/‖f‖` over the probe set,
/// measured on the rows below `n/2`.
///
/// Refuses unless `ψ` is co-analytic or `φ` is analytic.
pub fn toeplitz_product_residual(psi: &SymbolSpec, phi: &SymbolSpec, n: usize, seed: u64) -> Result<f64> {
    let gpsi = psi.fourier(n)?;
    let gphi = phi.fourier(n)?;
    let co_analytic = gpsi.is_coanalytic(1e-14);
    let analytic = gphi.is_analytic(1e-14);
    if !co_analytic && !analytic {
        return Err(Error::HypothesisViolated(format!(
            "{} is not co-analytic and {} is not analytic",
            psi.name(),
            phi.name()
        )));
    }
    let tpsi = toeplitz_matrix(&gpsi, n);
    let tphi = toeplitz_matrix(&gphi, n);
    let tprod = toeplitz_matrix(&gpsi.multiply(&gphi)?, n);
    let half = n / 2;
    let mut worst: f64 = 0.0;
    for f in probe_vectors(n, seed) {
        let lhs = tpsi.apply(&tphi.apply(&f)?)?;
        let rhs = tprod.apply(&f)?;
        let diff: f64 = (0..half)
            .map(|j| (lhs.coeff(j) - rhs.coeff(j)).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(diff / f.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn trig(modes: &[(i64, Complex64)], n: usize) -> SymbolSpec {
        SymbolSpec::TrigPoly {
            series: LaurentSeries::from_modes(modes, n).unwrap(),
        }
    }

    #[test]
    fn symbol_fourier_examples() {
        let n = 8;
        let zm = SymbolSpec::Inner {
            theta: BlaschkeProduct::monomial(3),
        };
        assert_eq!(zm.fourier(n).unwrap(), LaurentSeries::monomial(3, n));
        let czm = SymbolSpec::ConjInner {
            theta: BlaschkeProduct::monomial(3),
        };
        assert_eq!(czm.fourier(n).unwrap(), LaurentSeries::monomial(-3, n));
        let f1 = AnalyticSeries::from_real(&[1., -0.5], 4).unwrap();
        let one = AnalyticSeries::from_real(&[1.], 4).unwrap();
        let ip = SymbolSpec::InvertibleProduct {
            f1: f1.clone(),
            f2: one,
        };
        assert_eq!(ip.fourier(n).unwrap(), f1.resized(n).to_laurent());
    }

    #[test]
    fn toeplitz_examples() {
        let n = 6;
        let id = toeplitz_matrix(&LaurentSeries::monomial(0, n), n);
        assert_eq!(id.entries(), &CMat::identity(n, n));
        let s = toeplitz_matrix(&LaurentSeries::monomial(1, n), n);
        for j in 0..n {
            for k in 0..n {
                let want = if j == k + 1 { 1.0 } else { 0.0 };
                assert_eq!(s.entries()[(j, k)], c(want, 0.));
            }
        }
        assert_eq!(s.spill(), 1);
        let sb = backshift_matrix(n);
        assert_eq!(sb.entries(), &s.entries().adjoint());
        let f = AnalyticSeries::from_real(&[1., 2., 3.], n).unwrap();
        assert_eq!(sb.apply(&f).unwrap(), f.backshift());
        let zbar3 = toeplitz_matrix(&LaurentSeries::monomial(-3, n), n);
        assert_eq!(
            zbar3.apply(&AnalyticSeries::monomial(3, n)).unwrap(),
            AnalyticSeries::constant(c(1., 0.), n)
        );
    }

    #[test]
    fn perturbation_examples() {
        let n = 16;
        let zero = OperatorMatrix::from_entries(CMat::zeros(n, n), "0");
        let p = PerturbationSpec::new(vec![(
            AnalyticSeries::constant(c(1., 0.), n),
            AnalyticSeries::monomial(1, n),
        )]);
        let r = perturbed_matrix(&zero, &p).unwrap();
        let h = AnalyticSeries::from_real(&[2., 5., 7.], n).unwrap();
        assert_eq!(r.apply(&h).unwrap(), AnalyticSeries::monomial(1, n).scale(c(2., 0.)));

        // g = z, u = 1, v = -z kills constants
        let t = toeplitz_matrix(&LaurentSeries::monomial(1, n), n);
        let p = PerturbationSpec::new(vec![(
            AnalyticSeries::constant(c(1., 0.), n),
            AnalyticSeries::monomial(1, n).scale(c(-1., 0.)),
        )]);
        let r = perturbed_matrix(&t, &p).unwrap();
        let k = AnalyticSeries::constant(c(3., -1.), n);
        assert!(r.apply(&k).unwrap().is_zero());
        // apply matches the defining formula
        let h = AnalyticSeries::from_real(&[1., 2., -1.], n).unwrap();
        let direct = &h.shift() + &p.terms[0].v.scale(h.inner(&p.terms[0].u).unwrap());
        assert_eq!(r.apply(&h).unwrap(), direct);

        let r0 = perturbed_matrix(&t, &PerturbationSpec::default()).unwrap();
        assert_eq!(r0.entries(), t.entries());
        assert!(perturbed_matrix(&t, &p.resized(n + 1)).is_err());
    }

    #[test]
    fn perturbation_validation() {
        let n = 8;
        let u = AnalyticSeries::from_real(&[1., 1.], n).unwrap();
        let v = AnalyticSeries::monomial(2, n);
        let p = PerturbationSpec::new(vec![(u, v.clone())]);
        assert!(matches!(p.validate(n), Err(Error::PerturbationInvariant(_))));
        let s = 0.5f64.sqrt();
        let u1 = AnalyticSeries::from_real(&[s, s], n).unwrap();
        let u2 = AnalyticSeries::from_real(&[s, -s], n).unwrap();
        let ok = PerturbationSpec::new(vec![
            (u1.clone(), v.clone()),
            (u2.clone(), AnalyticSeries::monomial(3, n)),
        ]);
        ok.validate(n).unwrap();
        let bad = PerturbationSpec::new(vec![(u1, v.clone()), (u2, v)]);
        assert!(bad.validate(n).is_err());
    }

    #[test]
    fn product_residual_examples() {
        let n = 64;
        let zbar = trig(&[(-1, c(1., 0.))], n);
        let g = trig(&[(-2, c(0.3, 0.1)), (0, c(1., 0.)), (3, c(-0.5, 0.2))], n);
        assert!(toeplitz_product_residual(&zbar, &g, n, 1).unwrap() <= 1e-12);
        let z = trig(&[(1, c(1., 0.))], n);
        assert!(toeplitz_product_residual(&z, &z, n, 1).unwrap() <= 1e-12);
        assert!(matches!(
            toeplitz_product_residual(&z, &zbar, n, 1),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn adjoint_symmetry_is_exact() {
        let n = 32;
        let f = AnalyticSeries::from_poly(&[c(0.2, 1.), c(-1., 0.5), c(0., 3.)], n).unwrap();
        let a = toeplitz_matrix(&f.to_laurent(), n);
        let b = toeplitz_matrix(&f.conj_on_circle(), n);
        assert_eq!(b.entries(), &a.entries().adjoint());
    }

    #[test]
    fn norm_bound_against_circle_maximum() {
        let n = 48;
        let g = LaurentSeries::from_modes(&[(-2, c(0.5, 0.)), (0, c(1., 0.)), (1, c(0., -0.7))], n).unwrap();
        let t = toeplitz_matrix(&g, n);
        let smax = t.entries().clone().singular_values().max();
        let sup = (0..512)
            .map(|i| g.boundary_value(std::f64::consts::TAU * i as f64 / 512.0).norm())
            .fold(0.0, f64::max);
        assert!(smax <= sup + 1e-3, "{smax} vs {sup}");
    }

    #[test]
    fn perturbation_rank_from_singular_values() {
        let n = 24;
        let t = toeplitz_matrix(&LaurentSeries::monomial(2, n), n);
        let s = 0.5f64.sqrt();
        let p = PerturbationSpec::new(vec![
            (
                AnalyticSeries::from_real(&[s, s], n).unwrap(),
                AnalyticSeries::monomial(0, n),
            ),
            (
                AnalyticSeries::from_real(&[s, -s], n).unwrap(),
                AnalyticSeries::monomial(4, n),
            ),
        ]);
        let r = perturbed_matrix(&t, &p).unwrap();
        let diff = r.entries() - t.entries();
        let sv = diff.singular_values();
        let rank = sv.iter().filter(|&&x| x > 1e-12).count();
        assert_eq!(rank, 2);
    }
}
