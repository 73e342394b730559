//! Seeded random instances for each symbol class, built so that the kernel of
//! the perturbed operator is nontrivial.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operators::PerturbationSpec;
use crate::poly;
use crate::series::{AnalyticSeries, BlaschkeProduct};
use crate::theorems::{coanalytic_apply, inverse_chain, DefectCase};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest polynomial degree used for `u_i` and `v_i`.
pub const MAX_DEGREE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseKind {
    Zero,
    Inner,
    InvertibleProduct,
    ConjInner,
}

impl CaseKind {
    pub const ALL: [CaseKind; 4] = [
        CaseKind::Zero,
        CaseKind::Inner,
        CaseKind::InvertibleProduct,
        CaseKind::ConjInner,
    ];
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub case: DefectCase,
    pub perturbation: PerturbationSpec,
    pub truncation: usize,
    pub seed: u64,
}

fn cplx(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> Vec<Complex64> {
    (0..=deg).map(|_| cplx(rng)).collect()
}

fn in_disk(rng: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> Complex64 {
    let r = rng.gen_range(rmin..rmax);
    let t = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, t)
}

/// Modified Gram–Schmidt; `normalize` picks orthonormal versus orthogonal
/// output (orthogonal vectors keep a random scale).
fn gram_schmidt(vs: Vec<AnalyticSeries>, normalize: bool, rng: &mut ChaCha8Rng) -> Result<Vec<AnalyticSeries>> {
    let mut out: Vec<AnalyticSeries> = Vec::with_capacity(vs.len());
    for mut v in vs {
        for q in &out {
            let c = v.inner(q)? / q.norm_sqr();
            v = v.axpy(-c, q)?;
        }
        let nv = v.norm();
        if nv < 1e-8 {
            return Err(Error::Degenerate("random vectors are dependent".into()));
        }
        let scale = if normalize {
            1.0 / nv
        } else {
            rng.gen_range(0.5..2.0) / nv
        };
        out.push(v.scale(Complex64::new(scale, 0.0)));
    }
    Ok(out)
}

fn random_blaschke(rng: &mut ChaCha8Rng, rmax: f64) -> Result<BlaschkeProduct> {
    let deg = rng.gen_range(1..=3usize);
    if rng.gen_bool(0.4) {
        return Ok(BlaschkeProduct::monomial(deg));
    }
    let zeros: Vec<Complex64> = (0..deg).map(|_| in_disk(rng, 0.1, rmax)).collect();
    let c = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    BlaschkeProduct::new(zeros.into_iter().map(|a| (a, 1)).collect(), 0, c)
}

/// Polynomials of degree ≤ `MAX_DEGREE` divisible by `θ` (or `zθ`) in `H²`:
/// the numerator of `θ` times random cofactors.
fn divisible_polys(
    rng: &mut ChaCha8Rng,
    theta: &BlaschkeProduct,
    extra_z: bool,
    count: usize,
    n: usize,
) -> Result<Vec<AnalyticSeries>> {
    let (mut num, _) = theta.numerator_denominator();
    if extra_z {
        num.insert(0, Complex64::new(0.0, 0.0));
    }
    let room = MAX_DEGREE.saturating_sub(num.len() - 1);
    (0..count)
        .map(|_| {
            let d = rng.gen_range(0..=room);
            AnalyticSeries::from_poly(&poly::mul(&num, &random_poly(rng, d)), n)
        })
        .collect()
}

fn free_polys(rng: &mut ChaCha8Rng, count: usize, n: usize) -> Result<Vec<AnalyticSeries>> {
    (0..count)
        .map(|_| {
            let d = rng.gen_range(count.min(MAX_DEGREE)..=MAX_DEGREE);
            AnalyticSeries::from_poly(&random_poly(rng, d), n)
        })
        .collect()
}

/// Rescales `v_1` by the complex factor making `det(I + G) = 0`, where
/// `G_ij = ⟨X v_j, u_i⟩` for the solution operator `X` of the case, so that
/// `ker R_n` contains `Σ c_j X v_j` for a null vector `c` of `I + G`.
fn force_kernel(
    us: &[AnalyticSeries],
    vs: &mut [AnalyticSeries],
    solve: impl Fn(&AnalyticSeries) -> Result<AnalyticSeries>,
) -> Result<()> {
    let n = us.len();
    let xs: Vec<AnalyticSeries> = vs.iter().map(&solve).collect::<Result<_>>()?;
    let g = DMatrix::from_fn(n, n, |i, j| xs[j].inner(&us[i]).unwrap());
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut g0 = g.clone();
    g0.column_mut(0).fill(Complex64::new(0.0, 0.0));
    let a = (&id + &g0).determinant();
    let b = (&id + &g).determinant() - a;
    if b.norm() < 1e-8 {
        return Err(Error::Degenerate("cannot tune the kernel".into()));
    }
    let s = -a / b;
    if !(1e-3..1e3).contains(&s.norm()) {
        return Err(Error::Degenerate("badly scaled kernel tuning".into()));
    }
    vs[0] = vs[0].scale(s);
    Ok(())
}

/// One random instance of the given class with `rank` perturbation terms.
/// Draws are retried deterministically until the construction is well posed.
pub fn random_instance(kind: CaseKind, rank: usize, seed: u64, n: usize) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        if let Ok(inst) = try_instance(kind, rank, &mut rng, n) {
            return Ok(Instance { seed, ..inst });
        }
    }
    Err(Error::Degenerate(format!(
        "no well-posed {kind:?} instance for seed {seed}"
    )))
}

fn try_instance(kind: CaseKind, rank: usize, rng: &mut ChaCha8Rng, n: usize) -> Result<Instance> {
    let (case, us, vs) = match kind {
        CaseKind::Zero => {
            let us = gram_schmidt(free_polys(rng, rank, n)?, true, rng)?;
            let vs = gram_schmidt(free_polys(rng, rank, n)?, false, rng)?;
            (DefectCase::ZeroSymbol, us, vs)
        }
        CaseKind::Inner => {
            let theta = random_blaschke(rng, 0.5)?;
            let us = gram_schmidt(free_polys(rng, rank, n)?, true, rng)?;
            // half of the draws make every kernel vector vanish at the origin
            let extra_z = rng.gen_bool(0.5);
            let mut vs = gram_schmidt(divisible_polys(rng, &theta, extra_z, rank, n)?, false, rng)?;
            let th = theta.expand(n);
            force_kernel(&us, &mut vs, |v| coanalytic_apply(&th, v))?;
            (DefectCase::InnerSymbol { theta }, us, vs)
        }
        CaseKind::InvertibleProduct => {
            let factor = |rng: &mut ChaCha8Rng| -> Result<AnalyticSeries> {
                let deg = rng.gen_range(1..=3usize);
                let roots: Vec<Complex64> = (0..deg).map(|_| in_disk(rng, 1.5, 3.0)).collect();
                let c = cplx(rng) + ONE * 0.5;
                let p: Vec<Complex64> = poly::from_roots(&roots).iter().map(|x| x * c).collect();
                AnalyticSeries::from_poly(&p, n)
            };
            let f1 = factor(rng)?;
            let f2 = factor(rng)?;
            let us = gram_schmidt(free_polys(rng, rank, n)?, true, rng)?;
            let mut raw = free_polys(rng, rank, n)?;
            if rng.gen_bool(0.5) {
                // (T_g⁻¹ v)(0) = f1⁻¹(0)·⟨v, f2⁻¹⟩, so v ⊥ f2⁻¹ puts the kernel in zH²
                let q = poly::taylor_invert(&f2, MAX_DEGREE + 1)?.resized(n);
                raw = raw
                    .into_iter()
                    .map(|v| {
                        let c = v.inner(&q)? / q.norm_sqr();
                        v.axpy(-c, &q)
                    })
                    .collect::<Result<_>>()?;
            }
            let mut vs = gram_schmidt(raw, false, rng)?;
            force_kernel(&us, &mut vs, |v| inverse_chain(&f1, &f2, v))?;
            (DefectCase::InvertibleProduct { f1, f2 }, us, vs)
        }
        CaseKind::ConjInner => {
            let theta = random_blaschke(rng, 0.6)?;
            let us = if rng.gen_bool(1.0 / 3.0) {
                gram_schmidt(divisible_polys(rng, &theta, false, rank, n)?, true, rng)?
            } else {
                gram_schmidt(free_polys(rng, rank, n)?, true, rng)?
            };
            let vs = gram_schmidt(free_polys(rng, rank, n)?, false, rng)?;
            (DefectCase::ConjInnerSymbol { theta }, us, vs)
        }
    };
    let perturbation = PerturbationSpec::new(us.into_iter().zip(vs).collect());
    perturbation.validate(n)?;
    Ok(Instance {
        case,
        perturbation,
        truncation: n,
        seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::kernel_subspace;
    use crate::theorems::perturbed_operator;

    #[test]
    fn instances_have_nontrivial_kernels() {
        for kind in CaseKind::ALL {
            for seed in 0..6u64 {
                let rank = 1 + (seed as usize % 3);
                let inst = random_instance(kind, rank, seed, 128).unwrap();
                assert!(inst.perturbation.max_degree() <= MAX_DEGREE);
                let r = perturbed_operator(&inst.case.symbol(), &inst.perturbation, 128).unwrap();
                let k = kernel_subspace(&r, 1e-9).unwrap();
                assert!(k.dim() >= 1, "{kind:?} seed {seed}");
            }
        }
    }

    #[test]
    fn instances_are_reproducible() {
        let a = random_instance(CaseKind::ConjInner, 2, 11, 64).unwrap();
        let b = random_instance(CaseKind::ConjInner, 2, 11, 64).unwrap();
        assert_eq!(a.perturbation, b.perturbation);
        assert_eq!(a.case, b.case);
    }
}
