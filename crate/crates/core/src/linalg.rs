//! Dense complex linear algebra used by the subspace layer: numerical
//! nullspaces and column spaces from the SVD, minimum-norm least squares and
//! deterministic phase normalization of frames.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `(U, singular values in descending order, V)`.
pub type Svd = (CMat, Vec<f64>, CMat);

/// Thin SVD `a = U diag(s) Vᴴ` with `s` descending.
///
/// The factorization is checked by recomposition. nalgebra's complex SVD can
/// return an inaccurate result without reporting failure, so on a bad check
/// the adjoint and the QR-reduced problem are tried before giving up and
/// returning the most accurate attempt.
pub fn thin_svd(a: &CMat) -> Svd {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return (CMat::zeros(m, 0), Vec::new(), CMat::zeros(n, 0));
    }
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let mut best: Option<(f64, Svd)> = None;
    for attempt in 0..3 {
        let Some(f) = svd_attempt(a, attempt) else { continue };
        let err = recompose_error(a, &f) / scale;
        if err <= 1e-12 {
            return f;
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, f));
        }
    }
    best.expect("at least one SVD attempt").1
}

fn svd_attempt(a: &CMat, attempt: usize) -> Option<Svd> {
    let (m, n) = a.shape();
    let (u, s, v) = match attempt {
        0 => {
            let svd = a.clone().try_svd(true, true, f64::EPSILON, 0)?;
            (svd.u?, svd.singular_values, svd.v_t?.adjoint())
        }
        1 => {
            let svd = a.adjoint().try_svd(true, true, f64::EPSILON, 0)?;
            (svd.v_t?.adjoint(), svd.singular_values, svd.u?)
        }
        _ => {
            // reduce the long dimension by QR first
            if m >= n {
                let qr = a.clone().qr();
                let svd = qr.r().try_svd(true, true, f64::EPSILON, 0)?;
                (qr.q() * svd.u?, svd.singular_values, svd.v_t?.adjoint())
            } else {
                let qr = a.adjoint().qr();
                let svd = qr.r().try_svd(true, true, f64::EPSILON, 0)?;
                (svd.v_t?.adjoint(), svd.singular_values, qr.q() * svd.u?)
            }
        }
    };
    let k = s.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap());
    let mut us = CMat::zeros(m, k);
    let mut vs = CMat::zeros(n, k);
    for (col, &i) in order.iter().enumerate() {
        us.set_column(col, &u.column(i));
        vs.set_column(col, &v.column(i));
    }
    Some((us, order.iter().map(|&i| s[i]).collect(), vs))
}

fn recompose_error(a: &CMat, (u, s, v): &Svd) -> f64 {
    let mut us = u.clone();
    for (j, sj) in s.iter().enumerate() {
        us.column_mut(j).scale_mut(*sj);
    }
    (us * v.adjoint() - a).norm()
}

/// Singular values (descending) and the full right singular basis of `a`.
///
/// Wide matrices are padded with zero rows and tall ones are first reduced
/// to their square `R` factor, so `V` always has `ncols(a)` columns.
pub fn svd_right(a: &CMat) -> (Vec<f64>, CMat) {
    let (m, n) = a.shape();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let square = if m > n {
        a.clone().qr().r()
    } else if m < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let (_, sv, v) = thin_svd(&square);
    (sv, v)
}

/// Orthonormal basis of the numerical nullspace: right singular vectors with
/// singular value below `rel_tol·σ_max`. Returns the frame, the full singular
/// profile, and whether every singular value was below the threshold.
pub fn nullspace(a: &CMat, rel_tol: f64) -> (CMat, Vec<f64>, bool) {
    let n = a.ncols();
    let (sv, v) = svd_right(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return (CMat::identity(n, n), sv, true);
    }
    let thr = rel_tol * smax;
    let rank = sv.iter().filter(|&&s| s >= thr).count();
    let frame = v.columns(rank, n - rank).into_owned();
    (frame, sv, rank == 0)
}

/// Left singular vectors sorted by descending singular value.
fn sorted_left(a: &CMat) -> (Vec<f64>, CMat) {
    let (u, sv, _) = thin_svd(a);
    (sv, u)
}

/// Orthonormal basis of the numerical column space, singular values with it.
pub fn column_space(a: &CMat, rel_tol: f64) -> (CMat, Vec<f64>) {
    let (m, n) = a.shape();
    if n == 0 || m == 0 {
        return (CMat::zeros(m, 0), Vec::new());
    }
    let (sv, u) = sorted_left(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return (CMat::zeros(m, 0), sv);
    }
    let rank = sv.iter().filter(|&&s| s >= rel_tol * smax).count();
    (u.columns(0, rank).into_owned(), sv)
}

/// Column space with an absolute singular-value threshold.
pub fn column_space_abs(a: &CMat, abs_tol: f64) -> (CMat, Vec<f64>) {
    let (m, n) = a.shape();
    if n == 0 || m == 0 {
        return (CMat::zeros(m, 0), Vec::new());
    }
    let (sv, u) = sorted_left(a);
    let rank = sv.iter().filter(|&&s| s > abs_tol).count();
    (u.columns(0, rank).into_owned(), sv)
}

/// Minimum-norm least-squares solution of `a x ≈ b` and the residual norm.
pub fn lstsq(a: &CMat, b: &CVec, rel_tol: f64) -> (CVec, f64) {
    let n = a.ncols();
    if n == 0 {
        return (CVec::zeros(0), b.norm());
    }
    let (u, sv, v) = thin_svd(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let mut y = u.adjoint() * b;
    for (yi, si) in y.iter_mut().zip(&sv) {
        *yi = if smax > 0.0 && *si > rel_tol * smax {
            *yi / *si
        } else {
            ZERO
        };
    }
    let x = v * y;
    let r = (a * &x - b).norm();
    (x, r)
}

/// Multiplies each column by a unimodular constant so that its
/// largest-modulus entry (the first one, among near-ties) is real positive.
pub fn phase_fix_columns(m: &mut CMat) {
    for mut col in m.column_iter_mut() {
        let max = col.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            continue;
        }
        let pivot = col
            .iter()
            .find(|c| c.norm() >= max * (1.0 - 1e-9))
            .copied()
            .unwrap_or(ZERO);
        let phase = pivot.conj() / pivot.norm();
        for c in col.iter_mut() {
            *c *= phase;
        }
    }
}

/// Gram–Schmidt-free orthonormalization of a frame via the SVD, with the
/// deterministic phase rule applied.
pub fn orthonormalize(a: &CMat, rel_tol: f64) -> CMat {
    let (mut f, _) = column_space(a, rel_tol);
    phase_fix_columns(&mut f);
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn nullspace_of_wide_and_tall() {
        let a = CMat::from_row_slice(1, 3, &[c(1., 0.), c(1., 0.), c(0., 0.)]);
        let (ns, sv, deg) = nullspace(&a, 1e-9);
        assert_eq!(ns.ncols(), 2);
        assert!(!deg);
        assert_eq!(sv.len(), 3);
        assert!((&a * &ns).norm() < 1e-14);
        let t = CMat::from_row_slice(
            3,
            2,
            &[c(1., 0.), c(2., 0.), c(2., 0.), c(4., 0.), c(3., 0.), c(6., 0.)],
        );
        let (ns, _, _) = nullspace(&t, 1e-9);
        assert_eq!(ns.ncols(), 1);
        assert!((&t * &ns).norm() < 1e-13);
        let (full, _, deg) = nullspace(&CMat::zeros(2, 2), 1e-9);
        assert!(deg);
        assert_eq!(full.ncols(), 2);
    }

    #[test]
    fn least_squares_min_norm() {
        let a = CMat::from_row_slice(1, 2, &[c(1., 0.), c(1., 0.)]);
        let b = CVec::from_vec(vec![c(2., 0.)]);
        let (x, r) = lstsq(&a, &b, 1e-12);
        assert!(r < 1e-14);
        assert!((x[0] - c(1., 0.)).norm() < 1e-14 && (x[1] - c(1., 0.)).norm() < 1e-14);
    }

    proptest::proptest! {
        #[test]
        fn thin_svd_recomposes(m in 1usize..12, n in 1usize..12, seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = CMat::from_fn(m, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let f = thin_svd(&a);
            proptest::prop_assert!(recompose_error(&a, &f) <= 1e-12 * a.norm());
            proptest::prop_assert!(f.1.windows(2).all(|w| w[0] >= w[1]));
            let k = m.min(n);
            proptest::prop_assert!((f.0.adjoint() * &f.0 - CMat::identity(k, k)).norm() < 1e-12);
        }
    }

    #[test]
    fn phase_rule() {
        let mut m = CMat::from_column_slice(2, 1, &[c(0., 0.5), c(0., -1.0)]);
        phase_fix_columns(&mut m);
        assert!((m[(1, 0)] - c(1., 0.)).norm() < 1e-15);
        assert!((m[(0, 0)] - c(-0.5, 0.)).norm() < 1e-15);
    }
}
