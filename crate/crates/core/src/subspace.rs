//! Finite-dimensional subspaces of truncated `H²` held as orthonormal frames,
//! and the near backward-shift-invariance defect of a subspace.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::operators::OperatorMatrix;
use crate::series::AnalyticSeries;

/// Smallest principal angle tolerated between the summands of a direct sum.
pub const DIRECT_SUM_MIN_ANGLE: f64 = 1e-8;

/// Orthonormal frame of analytic series in a fixed ambient truncation.
#[derive(Clone, Debug)]
pub struct Subspace {
    frame: CMat,
    rank_tol: f64,
    degenerate: bool,
    singular_values: Vec<f64>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Self::from_orthonormal(CMat::zeros(n, 0), 0.0)
    }

    pub fn full(n: usize) -> Self {
        Self::from_orthonormal(CMat::identity(n, n), 0.0)
    }

    /// Wraps a frame whose columns are already orthonormal.
    pub fn from_orthonormal(frame: CMat, rank_tol: f64) -> Self {
        Self {
            frame,
            rank_tol,
            degenerate: false,
            singular_values: Vec::new(),
        }
    }

    /// Numerical column space of an arbitrary matrix.
    pub fn from_columns(columns: &CMat, rank_tol: f64) -> Self {
        let (mut frame, sv) = linalg::column_space(columns, rank_tol);
        linalg::phase_fix_columns(&mut frame);
        Self {
            frame,
            rank_tol,
            degenerate: false,
            singular_values: sv,
        }
    }

    /// Span of a list of series sharing the truncation `n`.
    pub fn span(n: usize, vectors: &[AnalyticSeries], rank_tol: f64) -> Result<Self> {
        for v in vectors {
            if v.truncation() != n {
                return Err(Error::TruncationMismatch(n, v.truncation()));
            }
        }
        Ok(Self::from_columns(&columns_of(n, vectors), rank_tol))
    }

    pub fn truncation(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &CMat {
        &self.frame
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    /// Set when the producing computation found no nonzero singular value.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Singular-value profile of the computation that produced the frame.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn basis(&self) -> Vec<AnalyticSeries> {
        (0..self.dim()).map(|j| self.column(j)).collect()
    }

    pub fn column(&self, j: usize) -> AnalyticSeries {
        AnalyticSeries::from_vec(self.frame.column(j).iter().copied().collect())
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, f: &AnalyticSeries) -> Result<AnalyticSeries> {
        self.check(f.truncation())?;
        let x = CVec::from_column_slice(f.coeffs());
        let p = &self.frame * (self.frame.adjoint() * x);
        Ok(AnalyticSeries::from_vec(p.iter().copied().collect()))
    }

    /// Relative distance `‖f − P f‖/‖f‖` (zero for `f = 0`) and whether it is
    /// within `tol`.
    pub fn contains(&self, f: &AnalyticSeries, tol: f64) -> Result<(bool, f64)> {
        let nf = f.norm();
        if nf == 0.0 {
            return Ok((true, 0.0));
        }
        let r = (f - &self.project(f)?).norm() / nf;
        Ok((r <= tol, r))
    }

    /// Largest relative distance of the columns of `other` from this space.
    pub fn max_distance(&self, other: &Subspace) -> Result<f64> {
        self.check(other.truncation())?;
        if other.dim() == 0 {
            return Ok(0.0);
        }
        let r = &other.frame - &self.frame * (self.frame.adjoint() * &other.frame);
        Ok(r.column_iter().map(|c| c.norm()).fold(0.0, f64::max))
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let n = self.truncation();
        if self.dim() == 0 {
            return Subspace::full(n);
        }
        let (mut ns, _, _) = linalg::nullspace(&self.frame.adjoint(), 0.5);
        linalg::phase_fix_columns(&mut ns);
        Subspace::from_orthonormal(ns, self.rank_tol)
    }

    /// `A ⊕ B`, refusing nearly dependent summands.
    pub fn direct_sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other.truncation())?;
        if self.dim() > 0 && other.dim() > 0 {
            let min = principal_angles(self, other)?.into_iter().fold(f64::INFINITY, f64::min);
            if min < DIRECT_SUM_MIN_ANGLE {
                return Err(Error::IllConditioned(min));
            }
        }
        Ok(self.sum(other))
    }

    /// `A + B` without a conditioning check (overlap collapses by rank).
    pub fn sum(&self, other: &Subspace) -> Subspace {
        let n = self.truncation();
        let mut cols = CMat::zeros(n, self.dim() + other.dim());
        cols.columns_mut(0, self.dim()).copy_from(&self.frame);
        cols.columns_mut(self.dim(), other.dim()).copy_from(&other.frame);
        let tol = if self.rank_tol > 0.0 {
            self.rank_tol
        } else {
            other.rank_tol.max(1e-12)
        };
        Subspace::from_columns(&cols, tol)
    }

    /// `self ⊖ other` for `other ⊂ self` (projects `other` out first).
    pub fn ominus(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other.truncation())?;
        let n = self.truncation();
        let mut p = CMat::identity(n, n);
        if other.dim() > 0 {
            p -= &other.frame * other.frame.adjoint();
        }
        let cols = p * &self.frame;
        let tol = self.rank_tol.max(1e-12);
        Ok(Subspace::from_columns(&cols, tol))
    }

    /// `{f ∈ M : f(0) = 0}`, from the null space of the evaluation row.
    pub fn vanish_at_zero(&self) -> Subspace {
        let d = self.dim();
        if d == 0 {
            return self.clone();
        }
        let row = self.frame.rows(0, 1).into_owned();
        if row.norm() <= self.rank_tol.max(1e-14) {
            return self.clone();
        }
        let (coeffs, _, _) = linalg::nullspace(&row, 1e-12);
        let mut frame = &self.frame * coeffs;
        for j in 0..frame.ncols() {
            frame[(0, j)] = Complex64::new(0.0, 0.0);
        }
        let frame = linalg::orthonormalize(&frame, 1e-12);
        Subspace::from_orthonormal(frame, self.rank_tol)
    }

    /// Applies the backward shift to every frame column (not orthonormal).
    pub fn backshift_columns(&self) -> CMat {
        let n = self.truncation();
        let d = self.dim();
        CMat::from_fn(n, d, |i, j| {
            if i + 1 < n {
                self.frame[(i + 1, j)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == self.truncation() {
            Ok(())
        } else {
            Err(Error::TruncationMismatch(self.truncation(), n))
        }
    }
}

/// Stacks series as matrix columns.
pub fn columns_of(n: usize, vectors: &[AnalyticSeries]) -> CMat {
    let mut m = CMat::zeros(n, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        for (i, c) in v.coeffs().iter().enumerate().take(n) {
            m[(i, j)] = *c;
        }
    }
    m
}

/// Orthonormal basis of the numerical kernel of a finite section.
///
/// Only the columns unaffected by truncation spill take part, so the kernel
/// lives in polynomials of degree below `N − spill`; frames are returned in
/// the ambient truncation `N`.
pub fn kernel_subspace(t: &OperatorMatrix, rank_tol: f64) -> Result<Subspace> {
    if rank_tol <= 0.0 {
        return Err(Error::Precondition("rank tolerance must be positive".into()));
    }
    let n = t.truncation();
    let a = t.exact_columns();
    let (ns, sv, degenerate) = linalg::nullspace(&a, rank_tol);
    let mut frame = CMat::zeros(n, ns.ncols());
    frame.rows_mut(0, ns.nrows()).copy_from(&ns);
    linalg::phase_fix_columns(&mut frame);
    Ok(Subspace {
        frame,
        rank_tol,
        degenerate,
        singular_values: sv,
    })
}

/// Principal angles (radians, ascending), `min(dim A, dim B)` of them.
///
/// Small angles come from the sines and large ones from the cosines so both
/// ends of the range are accurate.
pub fn principal_angles(a: &Subspace, b: &Subspace) -> Result<Vec<f64>> {
    a.check(b.truncation())?;
    let (a, b) = if a.dim() >= b.dim() { (a, b) } else { (b, a) };
    let q = b.dim();
    if q == 0 {
        return Ok(Vec::new());
    }
    let m = a.frame.adjoint() * &b.frame;
    let mut cos: Vec<f64> = m.singular_values().iter().map(|s| s.clamp(0.0, 1.0)).collect();
    cos.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let r = &b.frame - &a.frame * &m;
    let mut sin: Vec<f64> = r.singular_values().iter().map(|s| s.clamp(0.0, 1.0)).collect();
    sin.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok((0..q)
        .map(|i| {
            if cos[i] * cos[i] < 0.5 {
                cos[i].acos()
            } else {
                sin[i].asin()
            }
        })
        .collect())
}

/// Largest principal angle, or `π/2` when the dimensions differ.
pub fn max_angle(a: &Subspace, b: &Subspace) -> Result<f64> {
    if a.dim() != b.dim() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    Ok(principal_angles(a, b)?.into_iter().fold(0.0, f64::max))
}

/// Outcome of the defect computation, later annotated against a theorem.
#[derive(Clone, Debug, Serialize)]
pub struct DefectReport {
    pub defect_dim: usize,
    #[serde(serialize_with = "serialize_frame")]
    pub residual_frame: Subspace,
    pub bound_from_theorem: Option<usize>,
    /// Whether the residual directions lie in `M + F` for the theorem's `F`.
    pub contained_in_theorem_f: Option<bool>,
    /// Largest distance of a residual direction from `M + F`.
    pub max_residual_outside_f: f64,
    /// Largest distance of a residual direction from `F` itself.
    pub max_residual_outside_f_literal: Option<f64>,
    pub singular_values: Vec<f64>,
}

/// Minimal defect of `M`: the numerical rank of the part of `S*(M ∩ zH²)`
/// orthogonal to `M`. The rank threshold is relative to the largest singular
/// value of the unprojected family.
pub fn minimal_defect(m: &Subspace, rank_tol: f64) -> DefectReport {
    let n = m.truncation();
    let w = m.vanish_at_zero().backshift_columns();
    let empty = DefectReport {
        defect_dim: 0,
        residual_frame: Subspace::zero(n),
        bound_from_theorem: None,
        contained_in_theorem_f: None,
        max_residual_outside_f: 0.0,
        max_residual_outside_f_literal: None,
        singular_values: Vec::new(),
    };
    if w.ncols() == 0 {
        return empty;
    }
    let scale = w.clone().singular_values().max();
    if scale == 0.0 {
        return empty;
    }
    let resid = &w - &m.frame * (m.frame.adjoint() * &w);
    let (mut frame, sv) = linalg::column_space_abs(&resid, rank_tol * scale);
    linalg::phase_fix_columns(&mut frame);
    let dim = frame.ncols();
    DefectReport {
        defect_dim: dim,
        residual_frame: Subspace::from_orthonormal(frame, rank_tol),
        singular_values: sv,
        ..empty
    }
}

impl DefectReport {
    /// Annotates the report against a theorem's defect space `f` and bound.
    pub fn compare_with(&mut self, m: &Subspace, f: &Subspace, bound: usize, tol: f64) -> Result<()> {
        self.bound_from_theorem = Some(bound);
        let sum = m.sum(f);
        let outside = sum.max_distance(&self.residual_frame)?;
        self.max_residual_outside_f = outside;
        self.max_residual_outside_f_literal = Some(f.max_distance(&self.residual_frame)?);
        self.contained_in_theorem_f = Some(outside < tol);
        Ok(())
    }

    pub fn within_bound(&self) -> bool {
        self.bound_from_theorem.is_none_or(|b| self.defect_dim <= b)
    }
}

#[derive(Serialize, Deserialize)]
struct FrameWire {
    truncation: usize,
    dim: usize,
    rank_tol: f64,
    degenerate: bool,
    frame: Vec<AnalyticSeries>,
    singular_values: Vec<f64>,
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FrameWire {
            truncation: self.truncation(),
            dim: self.dim(),
            rank_tol: self.rank_tol,
            degenerate: self.degenerate,
            frame: self.basis(),
            singular_values: self.singular_values.clone(),
        }
        .serialize(s)
    }
}

fn serialize_frame<S: serde::Serializer>(m: &Subspace, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.basis().serialize(s)
}
