//! Fixed catalogue of verifications: the defect theorems for each symbol
//! class, the representation statements with their worked examples, the
//! closed form of `P_M 1`, and truncation stability. Every row is computed
//! from seeded or explicit data, so the report is reproducible bit for bit.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cgp::{
    build_cgp_frame, closed_form_projection_of_one, direct_projection_of_one, verify_representation,
    z_power_example_frame, z_power_example_kernel, Clause, ConstraintSystem, RepresentationReport, SystemOrigin,
};
use crate::error::{Error, Result};
use crate::operators::PerturbationSpec;
use crate::poly;
use crate::sampling::{random_instance, CaseKind, Instance};
use crate::scenario::{kernel_signature, run_scenario, Check, Scenario};
use crate::series::{normalized_reproducing_kernel, AnalyticSeries, BlaschkeProduct};
use crate::subspace::{kernel_subspace, max_angle, Subspace};
use crate::theorems::{
    coanalytic_apply, inverse_chain, lambda_set, model_space, perturbed_operator, verify_defect_theorem, DefectCase,
    DIVISIBILITY_TOL, RESIDUAL_IN_F_TOL,
};
use crate::Tolerances;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn c(a: f64, b: f64) -> Complex64 {
    Complex64::new(a, b)
}

// ---- instance builders ----

fn unit(x: AnalyticSeries) -> AnalyticSeries {
    let nx = x.norm();
    x.scale(re(1.0 / nx))
}

fn random_poly(rng: &mut ChaCha8Rng, deg: usize, n: usize) -> AnalyticSeries {
    AnalyticSeries::from_fn(n, |k| {
        if k <= deg {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Polynomial multiple of the numerator of `θ` (so divisible by `θ` in `H²`).
fn theta_multiple(theta: &BlaschkeProduct, q: &AnalyticSeries, n: usize) -> Result<AnalyticSeries> {
    let (num, _) = theta.numerator_denominator();
    AnalyticSeries::from_poly(&num, n)?.mul_analytic(q)
}

/// The `u` of the zero-symbol examples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZeroExample {
    /// `u = 1`.
    Constant,
    /// `u = z^k`.
    InnerMonomial(usize),
    /// `u` a single Blaschke factor with zero `α`.
    InnerBlaschke(Complex64),
    /// `u` the normalized reproducing kernel at `α`.
    Kernel(Complex64),
    /// `u = (1 + z^k)/√2`.
    TwoTerm(usize),
}

impl ZeroExample {
    pub fn u(&self, n: usize) -> Result<AnalyticSeries> {
        Ok(match *self {
            ZeroExample::Constant => AnalyticSeries::monomial(0, n),
            ZeroExample::InnerMonomial(k) => AnalyticSeries::monomial(k, n),
            ZeroExample::InnerBlaschke(a) => BlaschkeProduct::from_zeros(&[a])?.expand(n),
            ZeroExample::Kernel(a) => normalized_reproducing_kernel(a, n)?,
            ZeroExample::TwoTerm(k) => {
                let s = 0.5f64.sqrt();
                AnalyticSeries::monomial(0, n)
                    .scale(re(s))
                    .axpy(re(s), &AnalyticSeries::monomial(k, n))?
            }
        })
    }

    /// Rank-one perturbation `u ⊗ z` of the zero operator.
    pub fn perturbation(&self, n: usize) -> Result<PerturbationSpec> {
        Ok(PerturbationSpec::new(vec![(
            self.u(n)?,
            AnalyticSeries::monomial(1, n),
        )]))
    }

    /// Closed-form description of `K` stated for the example.
    pub fn system(&self, n: usize, tols: &Tolerances) -> Result<ConstraintSystem> {
        let named = |arity, clauses| ConstraintSystem::new("example", SystemOrigin::Displayed, arity, clauses);
        Ok(match *self {
            // K = H²
            ZeroExample::Constant => named(1, Vec::new()),
            // K = K_η × H², η the inner factor of u − u(0)
            ZeroExample::InnerMonomial(_) | ZeroExample::InnerBlaschke(_) => {
                let eta = match *self {
                    ZeroExample::InnerMonomial(k) => BlaschkeProduct::monomial(k),
                    ZeroExample::InnerBlaschke(a) => {
                        let b = BlaschkeProduct::from_zeros(&[a])?;
                        let (num, den) = b.numerator_denominator();
                        let u0 = b.at_zero();
                        let diff: Vec<Complex64> = (0..num.len().max(den.len()))
                            .map(|i| {
                                num.get(i).copied().unwrap_or_default() - u0 * den.get(i).copied().unwrap_or_default()
                            })
                            .collect();
                        poly::inner_outer_factor(&AnalyticSeries::from_poly(&diff, n)?)?.0
                    }
                    _ => unreachable!(),
                };
                named(
                    2,
                    vec![Clause::InSubspace {
                        label: "k0_model_space".into(),
                        multipliers: vec![Some(AnalyticSeries::monomial(0, n)), None],
                        space: model_space(&eta, n, tols.rank)?,
                    }],
                )
            }
            // K = H² × {0}
            ZeroExample::Kernel(_) => named(2, vec![Clause::Vanishes { component: 1 }]),
            // √2 (S*)^(k-1) k₁ = −(S*)^k k₀
            ZeroExample::TwoTerm(k) => named(
                2,
                vec![Clause::ShiftRelation {
                    terms: vec![(1, k - 1, re(2f64.sqrt())), (0, k, ONE)],
                }],
            ),
        })
    }
}

/// Rank-one perturbation of `T_θ` with `θ | v`. `scaled` tunes `v` so the
/// kernel is nontrivial; `vanishing` makes `θ̄v` vanish at the origin.
pub fn inner_branch_perturbation(
    theta: &BlaschkeProduct,
    scaled: bool,
    vanishing: bool,
    seed: u64,
    n: usize,
) -> Result<PerturbationSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = unit(random_poly(&mut rng, 3, n));
    let mut q = random_poly(&mut rng, 2, n);
    if vanishing {
        q = q.shift();
    }
    let v = theta_multiple(theta, &q, n)?;
    let v = if scaled {
        let x = coanalytic_apply(&theta.expand(n), &v)?;
        v.scale(-ONE / x.inner(&u)?)
    } else {
        v
    };
    Ok(PerturbationSpec::new(vec![(u, v)]))
}

/// The invertible-product symbol used by the catalogue.
pub fn invertible_factors(n: usize) -> Result<(AnalyticSeries, AnalyticSeries)> {
    let f1 = AnalyticSeries::from_poly(&poly::from_roots(&[c(2.0, 0.5), c(-1.2, 1.4)]), n)?;
    let f2 = AnalyticSeries::from_poly(&poly::mul(&poly::from_roots(&[c(0.4, -1.7)]), &[c(0.5, 0.2)]), n)?;
    Ok((f1, f2))
}

/// Rank-one perturbation of `T_{f₁ conj f₂}` with a nontrivial kernel when
/// `scaled`; `vanishing` makes `v ⊥ f₂⁻¹` so the kernel sits in `zH²`.
pub fn invertible_branch_perturbation(scaled: bool, vanishing: bool, seed: u64, n: usize) -> Result<PerturbationSpec> {
    let (f1, f2) = invertible_factors(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = unit(random_poly(&mut rng, 3, n));
    let mut v = random_poly(&mut rng, 4, n);
    if vanishing {
        let q = poly::taylor_invert(&f2, 6)?.resized(n);
        v = v.axpy(-v.inner(&q)? / q.norm_sqr(), &q)?;
    }
    if scaled {
        let x = inverse_chain(&f1, &f2, &v)?;
        v = v.scale(-ONE / x.inner(&u)?);
    }
    Ok(PerturbationSpec::new(vec![(u, v)]))
}

/// The conjugate-inner symbol used by the catalogue.
pub fn catalogue_theta() -> Result<BlaschkeProduct> {
    BlaschkeProduct::from_zeros(&[c(0.3, 0.2), c(-0.1, -0.4)])
}

/// Branches of the conjugate-inner representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjBranch {
    ModelSpace,
    Augmented,
    WNonzero,
    WZero,
}

/// Rank-one perturbation of `T_θ̄` landing in the requested branch.
pub fn conj_branch_perturbation(
    theta: &BlaschkeProduct,
    branch: ConjBranch,
    seed: u64,
    n: usize,
) -> Result<PerturbationSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let th = theta.expand(n);
    let divides = matches!(branch, ConjBranch::ModelSpace | ConjBranch::Augmented);
    let u = if divides {
        unit(theta_multiple(theta, &random_poly(&mut rng, 2, n), n)?)
    } else {
        unit(random_poly(&mut rng, 4, n))
    };
    let v = random_poly(&mut rng, 3, n);
    let thv = th.mul_analytic(&v)?;
    let v = match branch {
        ConjBranch::ModelSpace | ConjBranch::WNonzero => v,
        ConjBranch::Augmented => v.scale(-ONE / thv.inner(&u)?),
        ConjBranch::WZero => {
            let k = model_space(theta, n, crate::RANK_TOL)?;
            let ut = &u - &k.project(&u)?;
            v.scale(-ONE / thv.inner(&ut)?)
        }
    };
    Ok(PerturbationSpec::new(vec![(u, v)]))
}

/// `u = z^(m-1)/4 + u₂` with `u₂ ∈ z^m H²` seeded and `‖u‖ = 1`, and a unit `v`.
pub fn z_power_example_data(m: usize, seed: u64, n: usize) -> (AnalyticSeries, AnalyticSeries) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u2 = random_poly(&mut rng, 3, n).shift_by(m);
    let u2 = u2.scale(re((15.0f64 / 16.0).sqrt() / u2.norm()));
    let u = &AnalyticSeries::monomial(m - 1, n).scale(re(0.25)) + &u2;
    let v = unit(random_poly(&mut rng, 4, n));
    (u, v)
}

/// First instance from `seed` on that satisfies `keep`.
fn sampled(kind: CaseKind, rank: usize, seed: u64, n: usize, keep: impl Fn(&Instance) -> bool) -> Result<Instance> {
    for s in seed..seed + 500 {
        let inst = random_instance(kind, rank, s, n)?;
        if keep(&inst) {
            return Ok(inst);
        }
    }
    Err(Error::Degenerate(format!(
        "no {kind:?} instance found near seed {seed}"
    )))
}

fn theta_of(case: &DefectCase) -> Option<&BlaschkeProduct> {
    match case {
        DefectCase::InnerSymbol { theta } | DefectCase::ConjInnerSymbol { theta } => Some(theta),
        _ => None,
    }
}

// ---- report ----

#[derive(Clone, Debug, Serialize)]
pub struct SuiteRow {
    pub id: String,
    /// What the row checks, in a few words.
    pub anchor: String,
    pub truncation: usize,
    pub metric: String,
    pub value: f64,
    pub tolerance: f64,
    /// Kernel and defect dimensions agree between `N` and `2N`.
    pub stable_at_2n: Option<bool>,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRow>,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
}

impl SuiteReport {
    fn new(rows: Vec<SuiteRow>) -> Self {
        let passed = rows.iter().filter(|r| r.pass).count();
        let failed = rows.len() - passed;
        Self {
            rows,
            passed,
            failed,
            pass: failed == 0,
        }
    }

    /// Fixed-width table followed by a one-line verdict.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<34} {:<40} {:>4} {:<22} {:>10} {:>8}  result",
            "id", "check", "N", "metric", "value", "tol"
        );
        let _ = writeln!(out, "{}", "-".repeat(132));
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<34} {:<40} {:>4} {:<22} {:>10.2e} {:>8.0e}  {}",
                r.id,
                r.anchor,
                r.truncation,
                r.metric,
                r.value,
                r.tolerance,
                if r.pass { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(out, "{}", self.verdict());
        out
    }

    pub fn verdict(&self) -> String {
        format!(
            "verdict: {} ({} of {} checks passed)",
            if self.pass { "PASS" } else { "FAIL" },
            self.passed,
            self.rows.len()
        )
    }

    pub fn failures(&self) -> impl Iterator<Item = &SuiteRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Kernel signature and minimal defect dimension at truncation `n`.
pub fn structure(case: &DefectCase, p: &PerturbationSpec, n: usize, tols: &Tolerances) -> Result<(String, usize)> {
    let p = p.resized(n);
    let r = perturbed_operator(&case.symbol(), &p, n)?;
    let m = kernel_subspace(&r, tols.rank)?;
    let d = verify_defect_theorem(case, &p, n, tols)?.defect.defect_dim;
    Ok((kernel_signature(n, r.spill(), m.dim()), d))
}

/// Whether [`structure`] is the same at `n` and `2n`.
pub fn stable_at_double(case: &DefectCase, p: &PerturbationSpec, n: usize, tols: &Tolerances) -> Result<bool> {
    Ok(structure(case, p, n, tols)? == structure(case, p, 2 * n, tols)?)
}

fn defect_row(id: &str, anchor: &str, case: &DefectCase, p: &PerturbationSpec, n: usize) -> Result<SuiteRow> {
    let tols = Tolerances::default();
    let rep = verify_defect_theorem(case, p, n, &tols)?;
    let stable = stable_at_double(case, p, n, &tols)?;
    let bound = rep.defect.bound_from_theorem.unwrap_or(0);
    Ok(SuiteRow {
        id: id.into(),
        anchor: anchor.into(),
        truncation: n,
        metric: "residual outside F".into(),
        value: rep.defect.max_residual_outside_f,
        tolerance: RESIDUAL_IN_F_TOL,
        stable_at_2n: Some(stable),
        pass: rep.pass && stable,
        detail: format!(
            "dim M {}, defect {} <= {}, {} witnesses, witness residual {:.2e}",
            rep.kernel_dim,
            rep.defect.defect_dim,
            bound,
            rep.witness.entries.len(),
            rep.witness.max_membership().max(rep.witness.max_w_in_f())
        ),
    })
}

fn representation_row(
    id: &str,
    anchor: &str,
    n: usize,
    rep: &RepresentationReport,
    tols: &Tolerances,
    stable: bool,
) -> SuiteRow {
    let mut detail = format!("branch {:?}, dim M {}", rep.branch, rep.kernel_dim);
    for s in rep.systems.iter().filter(|s| !s.pass) {
        let _ = write!(
            detail,
            ", {} system fails (reverse {:.1e}, forward {:.1e}, closure {:.1e})",
            s.name, s.reverse_max_residual, s.forward_max_residual, s.closure_max_violation
        );
    }
    if let Some(e) = rep.norm_identity_max_error {
        let _ = write!(detail, ", norm identity {e:.1e}");
    }
    SuiteRow {
        id: id.into(),
        anchor: anchor.into(),
        truncation: n,
        metric: "reverse/forward resid".into(),
        value: rep.reverse_max_residual.max(rep.forward_max_residual),
        tolerance: tols.membership,
        stable_at_2n: Some(stable),
        pass: rep.pass && stable,
        detail,
    }
}

fn kernel_of(case: &DefectCase, p: &PerturbationSpec, n: usize, tols: &Tolerances) -> Result<Subspace> {
    kernel_subspace(&perturbed_operator(&case.symbol(), p, n)?, tols.rank)
}

fn cgp_row(
    id: &str,
    anchor: &str,
    case: &DefectCase,
    p: &PerturbationSpec,
    n: usize,
    t: usize,
    extra: Option<ConstraintSystem>,
) -> Result<SuiteRow> {
    let tols = Tolerances::default();
    let m = kernel_of(case, p, n, &tols)?;
    let mut frame = build_cgp_frame(case, p, &m, n, &tols)?;
    frame.displayed.extend(extra);
    let rep = verify_representation(&frame, &m, t, &tols)?;
    let stable = stable_at_double(case, p, n, &tols)?;
    Ok(representation_row(id, anchor, n, &rep, &tols, stable))
}

/// Maximum deviation of the `P_M 1` closed form from the direct projection
/// over `draws` seeded instances.
pub fn projection_formula_error(draws: usize, seed: u64, n: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let deg = rng.gen_range(1..=3usize);
        let zeros: Vec<Complex64> = (0..deg)
            .map(|_| Complex64::from_polar(rng.gen_range(0.05..0.6), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let theta = BlaschkeProduct::from_zeros(&zeros)?;
        let v = random_poly(&mut rng, 4, n);
        let k = model_space(&theta, n, crate::RANK_TOL)?;
        let g = k.project(&random_poly(&mut rng, 4, n))?;
        let mu = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let a = closed_form_projection_of_one(&theta, &v, &g, mu, n)?;
        let b = direct_projection_of_one(&theta, &v, &g, mu, n, crate::RANK_TOL)?;
        worst = worst.max(a.max_abs_diff(&b));
    }
    Ok(worst)
}

/// Closed-form checks for the `u = (1 + z^k)/√2` example: `f₀`, `v₀`, `v₁`.
pub fn two_term_closed_form_error(k: usize, n: usize) -> Result<f64> {
    let tols = Tolerances::default();
    let ex = ZeroExample::TwoTerm(k);
    let p = ex.perturbation(n)?;
    let m = kernel_of(&DefectCase::ZeroSymbol, &p, n, &tols)?;
    let frame = build_cgp_frame(&DefectCase::ZeroSymbol, &p, &m, n, &tols)?;
    let f0 = AnalyticSeries::monomial(0, n)
        .scale(re(0.5))
        .axpy(re(-0.5), &AnalyticSeries::monomial(k, n))?;
    let v0 = AnalyticSeries::monomial(k, n).scale(re(1.0 / (2.0 * 2f64.sqrt())));
    let v1 = AnalyticSeries::monomial(k - 1, n).scale(re(0.5));
    let direct = crate::cgp::projection_of_one(&m)?;
    Ok([
        frame.f0.max_abs_diff(&f0),
        direct.max_abs_diff(&f0),
        frame.constraint_vectors["v0"].max_abs_diff(&v0),
        frame.constraint_vectors["v1"].max_abs_diff(&v1),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

/// Rows for the `θ = z^m` example: the kernel against the stated
/// `(K_θ ⊕ span{θv}) ⊖ span{G}`, and the stated description of `K`.
pub fn z_power_rows(m: usize, seed: u64, n: usize, t: usize) -> Result<(SuiteRow, SuiteRow)> {
    let tols = Tolerances::default();
    let (u, v) = z_power_example_data(m, seed, n);
    let p = PerturbationSpec::new(vec![(u.clone(), v.clone())]);
    let case = DefectCase::ConjInnerSymbol {
        theta: BlaschkeProduct::monomial(m),
    };
    let ker = kernel_of(&case, &p, n, &tols)?;
    let stated = z_power_example_kernel(m, &u, &v, n, tols.rank)?;
    let angle = max_angle(&ker, &stated)?;
    let stable = stable_at_double(&case, &p, n, &tols)?;
    let span = SuiteRow {
        id: format!("zpow/m{m}/kernel"),
        anchor: "kernel equals stated orthocomplement".into(),
        truncation: n,
        metric: "max principal angle".into(),
        value: angle,
        tolerance: 1e-7,
        stable_at_2n: Some(stable),
        pass: angle < 1e-7 && ker.dim() == stated.dim() && stable,
        detail: format!("dim {} vs {}", ker.dim(), stated.dim()),
    };
    let frame = z_power_example_frame(m, &u, &v, n, &tols)?;
    let rep = verify_representation(&frame, &ker, t, &tols)?;
    let rows = representation_row(
        &format!("zpow/m{m}/k-description"),
        "stated K, both directions",
        n,
        &rep,
        &tols,
        stable,
    );
    Ok((span, rows))
}

fn stabilization_row(id: &str, s: &Scenario) -> Result<SuiteRow> {
    let rep = run_scenario(s, true)?;
    let st = rep.stabilization.as_ref().expect("requested");
    Ok(SuiteRow {
        id: id.into(),
        anchor: "structure unchanged from N to 2N".into(),
        truncation: s.truncation,
        metric: "signature mismatch".into(),
        value: if st.stable { 0.0 } else { 1.0 },
        tolerance: 0.0,
        stable_at_2n: Some(st.stable),
        pass: rep.pass,
        detail: format!("kernel {} / {}", st.at_n.kernel, st.at_2n.kernel),
    })
}

/// Runs the whole catalogue.
pub fn verify_catalogue() -> Result<SuiteReport> {
    let mut rows = Vec::new();
    let n = 128;
    let t = 48;

    // defect theorems
    for (i, rank) in [1usize, 2, 3].into_iter().enumerate() {
        let inst = random_instance(CaseKind::Zero, rank, 101 + i as u64, n)?;
        rows.push(defect_row(
            &format!("defect/zero/rank{rank}"),
            "zero symbol: F = span u_i",
            &inst.case,
            &inst.perturbation,
            n,
        )?);
    }
    let zm = sampled(CaseKind::Inner, 2, 200, n, |x| {
        theta_of(&x.case).is_some_and(|t| t.zeros().is_empty())
    })?;
    rows.push(defect_row(
        "defect/inner/monomial",
        "inner symbol z^m",
        &zm.case,
        &zm.perturbation,
        n,
    )?);
    let bl = sampled(CaseKind::Inner, 2, 200, n, |x| {
        theta_of(&x.case).is_some_and(|t| !t.zeros().is_empty())
    })?;
    rows.push(defect_row(
        "defect/inner/blaschke",
        "inner symbol, Blaschke product",
        &bl.case,
        &bl.perturbation,
        n,
    )?);
    for m in 1..=3usize {
        let u = AnalyticSeries::monomial(0, n);
        let v = AnalyticSeries::from_real(&[-1.0, 0.5, 0.0, 0.25], n)?.shift_by(m);
        let p = PerturbationSpec::new(vec![(u, v)]);
        let case = DefectCase::InnerSymbol {
            theta: BlaschkeProduct::monomial(m),
        };
        rows.push(defect_row(
            &format!("defect/inner/zpow-m{m}"),
            "T_{z^m} + 1 (x) v",
            &case,
            &p,
            n,
        )?);
    }
    for (i, rank) in [1usize, 2].into_iter().enumerate() {
        let inst = random_instance(CaseKind::InvertibleProduct, rank, 301 + i as u64, n)?;
        rows.push(defect_row(
            &format!("defect/invertible/rank{rank}"),
            "invertible product symbol",
            &inst.case,
            &inst.perturbation,
            n,
        )?);
    }
    let lambda_of = |x: &Instance| -> usize {
        let us: Vec<AnalyticSeries> = x.perturbation.us().cloned().collect();
        theta_of(&x.case).map_or(0, |t| lambda_set(t, &us, DIVISIBILITY_TOL, n).map_or(0, |l| l.len()))
    };
    let empty = sampled(CaseKind::ConjInner, 2, 400, n, |x| lambda_of(x) == 0)?;
    rows.push(defect_row(
        "defect/conj-inner/lambda-empty",
        "conjugate inner, theta | u_i",
        &empty.case,
        &empty.perturbation,
        n,
    )?);
    let full = sampled(CaseKind::ConjInner, 2, 400, n, |x| lambda_of(x) > 0)?;
    rows.push(defect_row(
        "defect/conj-inner/lambda-nonempty",
        "conjugate inner, theta !| u_i",
        &full.case,
        &full.perturbation,
        n,
    )?);

    // zero-symbol representation examples
    let ne = 64;
    let te = 24;
    let examples = [
        ("rep/zero/example-i", "u = 1: M = zH^2, K = H^2", ZeroExample::Constant),
        (
            "rep/zero/example-ii-monomial",
            "u = z^2 inner",
            ZeroExample::InnerMonomial(2),
        ),
        (
            "rep/zero/example-ii-blaschke",
            "u Blaschke factor",
            ZeroExample::InnerBlaschke(c(0.3, 0.4)),
        ),
        (
            "rep/zero/example-iii",
            "u normalized kernel",
            ZeroExample::Kernel(c(0.4, 0.3)),
        ),
        ("rep/zero/example-iv", "u = (1 + z^2)/sqrt 2", ZeroExample::TwoTerm(2)),
    ];
    for (id, anchor, ex) in examples {
        let tols = Tolerances::default();
        rows.push(cgp_row(
            id,
            anchor,
            &DefectCase::ZeroSymbol,
            &ex.perturbation(ne)?,
            ne,
            te,
            Some(ex.system(ne, &tols)?),
        )?);
    }
    let err = two_term_closed_form_error(2, ne)?;
    rows.push(SuiteRow {
        id: "rep/zero/example-iv-closed-forms".into(),
        anchor: "f0, v0, v1 closed forms".into(),
        truncation: ne,
        metric: "max coefficient error".into(),
        value: err,
        tolerance: 1e-12,
        stable_at_2n: None,
        pass: err <= 1e-12,
        detail: "f0 = (1 - z^2)/2, v0 = z^2/(2 sqrt 2), v1 = z/2".into(),
    });

    // branches of the rank-one representation
    let theta = BlaschkeProduct::from_zeros(&[c(0.35, -0.2), c(-0.25, 0.3)])?;
    let inner = DefectCase::InnerSymbol { theta: theta.clone() };
    for (id, scaled, vanishing) in [
        ("rep/inner/trivial", false, false),
        ("rep/inner/a0-nonzero", true, false),
        ("rep/inner/a0-zero", true, true),
    ] {
        let p = inner_branch_perturbation(&theta, scaled, vanishing, 7, n)?;
        rows.push(cgp_row(id, "inner symbol, rank one", &inner, &p, n, t, None)?);
    }
    let (f1, f2) = invertible_factors(n)?;
    let inv = DefectCase::InvertibleProduct { f1, f2 };
    for (id, vanishing) in [
        ("rep/invertible/a0b0-nonzero", false),
        ("rep/invertible/a0b0-zero", true),
    ] {
        let p = invertible_branch_perturbation(true, vanishing, 11, n)?;
        rows.push(cgp_row(id, "invertible product, rank one", &inv, &p, n, t, None)?);
    }
    let ct = catalogue_theta()?;
    let conj = DefectCase::ConjInnerSymbol { theta: ct.clone() };
    for (id, anchor, branch) in [
        (
            "rep/conj-inner/model-space",
            "theta | u, M = K_theta",
            ConjBranch::ModelSpace,
        ),
        (
            "rep/conj-inner/augmented",
            "theta | u, M = K_theta + theta v",
            ConjBranch::Augmented,
        ),
        ("rep/conj-inner/w-nonzero", "theta !| u, w != 0", ConjBranch::WNonzero),
        ("rep/conj-inner/w-zero", "theta !| u, w = 0", ConjBranch::WZero),
    ] {
        let p = conj_branch_perturbation(&ct, branch, 13, n)?;
        rows.push(cgp_row(id, anchor, &conj, &p, n, t, None)?);
    }

    let err = projection_formula_error(20, 17, n)?;
    rows.push(SuiteRow {
        id: "rep/projection-of-one".into(),
        anchor: "closed form of P_M 1, 20 draws".into(),
        truncation: n,
        metric: "max coefficient error".into(),
        value: err,
        tolerance: 1e-10,
        stable_at_2n: None,
        pass: err <= 1e-10,
        detail: "M = (K_theta + span theta v) - span(g + mu theta v)".into(),
    });

    for m in 1..=3usize {
        let (a, b) = z_power_rows(m, 19, n, t)?;
        rows.push(a);
        rows.push(b);
    }

    // truncation stability
    let ex3 = ZeroExample::TwoTerm(2);
    let base = Scenario {
        id: "stability".into(),
        truncation: 64,
        inner_truncation: None,
        tolerances: Tolerances::default(),
        symbol: DefectCase::ZeroSymbol.symbol(),
        perturbation: ex3.perturbation(64)?,
        checks: vec![Check::Kernel, Check::Defect, Check::Witness],
        seed: 0,
    };
    rows.push(stabilization_row("stability/zero/example-iv", &base)?);
    let s2 = Scenario {
        symbol: DefectCase::InnerSymbol {
            theta: BlaschkeProduct::monomial(2),
        }
        .symbol(),
        perturbation: PerturbationSpec::new(vec![(
            AnalyticSeries::monomial(0, 16),
            AnalyticSeries::from_real(&[-1.0, 0.5, 0.0, 0.25], 16)?.shift_by(2),
        )]),
        truncation: 32,
        ..base
    };
    rows.push(stabilization_row("stability/inner/zpow-m2", &s2)?);
    Ok(SuiteReport::new(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders_land_in_their_branches() {
        let n = 96;
        let tols = Tolerances::default();
        let ct = catalogue_theta().unwrap();
        let conj = DefectCase::ConjInnerSymbol { theta: ct.clone() };
        for (b, want) in [
            (ConjBranch::ModelSpace, crate::cgp::Branch::ModelSpace),
            (ConjBranch::Augmented, crate::cgp::Branch::Augmented),
            (ConjBranch::WNonzero, crate::cgp::Branch::WNonzero),
            (ConjBranch::WZero, crate::cgp::Branch::WZero),
        ] {
            let p = conj_branch_perturbation(&ct, b, 3, n).unwrap();
            let m = kernel_of(&conj, &p, n, &tols).unwrap();
            assert_eq!(build_cgp_frame(&conj, &p, &m, n, &tols).unwrap().branch, want);
        }
    }

    #[test]
    fn table_has_verdict_line() {
        let rows = vec![SuiteRow {
            id: "x".into(),
            anchor: "y".into(),
            truncation: 8,
            metric: "m".into(),
            value: 0.0,
            tolerance: 1e-8,
            stable_at_2n: None,
            pass: true,
            detail: String::new(),
        }];
        let r = SuiteReport::new(rows);
        assert!(r.table().trim_end().ends_with("verdict: PASS (1 of 1 checks passed)"));
    }
}
