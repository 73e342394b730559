//! Polynomial helpers: root finding, inner–outer factorization and Taylor
//! inversion of polynomials with no zeros in the closed disk.
//!
//! Polynomials are plain coefficient slices, lowest degree first.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{AnalyticSeries, BlaschkeProduct};
use crate::BOUNDARY_EPS;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Product of two coefficient vectors.
pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn eval(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

fn derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

/// Strips trailing (highest-degree) coefficients that are exactly zero.
pub fn trim(p: &[Complex64]) -> &[Complex64] {
    let end = p.iter().rposition(|c| *c != ZERO).map_or(0, |d| d + 1);
    &p[..end]
}

/// All complex roots, with multiplicity, from the eigenvalues of the
/// companion matrix followed by a few Newton steps on the original
/// polynomial.
pub fn roots(p: &[Complex64]) -> Result<Vec<Complex64>> {
    let p = trim(p);
    if p.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let deg = p.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = p[deg];
    let mut comp = DMatrix::<Complex64>::zeros(deg, deg);
    for k in 0..deg {
        comp[(0, k)] = -p[deg - 1 - k] / lead;
    }
    for k in 1..deg {
        comp[(k, k - 1)] = ONE;
    }
    let eig = comp
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Degenerate("companion eigenvalues did not converge".into()))?;
    let dp = derivative(p);
    let mut out: Vec<Complex64> = eig.iter().copied().collect();
    for r in &mut out {
        for _ in 0..4 {
            let d = eval(&dp, *r);
            if d.norm() == 0.0 {
                break;
            }
            let step = eval(p, *r) / d;
            let next = *r - step;
            // keep the step only if it improves the residual
            if eval(p, next).norm() < eval(p, *r).norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
    out.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap()
            .then(a.arg().partial_cmp(&b.arg()).unwrap())
    });
    Ok(out)
}

/// Splits a polynomial into a finite Blaschke product (zeros in the open
/// disk, including the origin) and an outer polynomial (zeros outside the
/// closed disk), so that `p = η · outer`.
pub fn inner_outer_factor(p: &AnalyticSeries) -> Result<(BlaschkeProduct, AnalyticSeries)> {
    let n = p.truncation();
    let coeffs = trim(p.coeffs());
    if coeffs.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let z_power = coeffs.iter().position(|c| *c != ZERO).unwrap_or(0);
    let q = &coeffs[z_power..];
    let lead = q[q.len() - 1];
    let mut inner_zeros = Vec::new();
    let mut outer = vec![lead];
    for r in roots(q)? {
        let margin = (r.norm() - 1.0).abs();
        if margin <= BOUNDARY_EPS {
            return Err(Error::BoundaryAmbiguous { root: r, margin });
        }
        if r.norm() < 1.0 {
            // z - α = b_α(z)·(ᾱz - 1)
            inner_zeros.push((r, 1));
            outer = mul(&outer, &[-ONE, r.conj()]);
        } else {
            outer = mul(&outer, &[-r, ONE]);
        }
    }
    let eta = BlaschkeProduct::new(inner_zeros, z_power, ONE)?;
    Ok((eta, AnalyticSeries::from_poly(&outer, n)?))
}

/// First `n` Taylor coefficients of `1/p` for a polynomial `p` with no zeros
/// in the closed disk (up to the boundary margin).
pub fn taylor_invert(p: &AnalyticSeries, n: usize) -> Result<AnalyticSeries> {
    let coeffs = trim(p.coeffs());
    if coeffs.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    for r in roots(coeffs)? {
        if r.norm() <= 1.0 + BOUNDARY_EPS {
            return Err(Error::NotInvertible(r));
        }
    }
    let p0 = coeffs[0];
    let mut q = vec![ZERO; n];
    if n > 0 {
        q[0] = ONE / p0;
    }
    for k in 1..n {
        let mut s = ZERO;
        for j in 1..coeffs.len().min(k + 1) {
            s += coeffs[j] * q[k - j];
        }
        q[k] = -s / p0;
    }
    Ok(AnalyticSeries::from_vec(q))
}

/// Monic polynomial with the given roots.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    roots.iter().fold(vec![ONE], |acc, r| mul(&acc, &[-r, ONE]))
}
