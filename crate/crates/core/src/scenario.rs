//! JSON scenarios: one symbol, one perturbation and the checks to run on the
//! kernel of the perturbed operator, with an optional re-run at twice the
//! truncation to confirm that the reported structure has stabilized.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cgp::{build_cgp_frame, verify_representation, Branch, RepresentationReport};
use crate::error::{Error, Result};
use crate::operators::{OperatorMatrix, PerturbationSpec, SymbolSpec};
use crate::subspace::{kernel_subspace, Subspace};
use crate::theorems::{perturbed_operator, verify_defect_theorem, DefectCase, TheoremReport};
use crate::Tolerances;

/// Extra coefficients required beyond twice the largest input degree.
pub const HEADROOM_MARGIN: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Kernel,
    Defect,
    Witness,
    Cgp,
}

fn default_checks() -> Vec<Check> {
    vec![Check::Kernel, Check::Defect, Check::Witness]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub truncation: usize,
    #[serde(default)]
    pub inner_truncation: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub symbol: SymbolSpec,
    pub perturbation: PerturbationSpec,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub seed: u64,
}

/// Inner truncation used when a scenario does not set one.
pub fn default_inner_truncation(n: usize) -> usize {
    (3 * n / 8).max(1)
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn max_degree(&self) -> usize {
        self.symbol.max_degree().max(self.perturbation.max_degree())
    }

    pub fn inner_truncation(&self) -> usize {
        self.inner_truncation
            .unwrap_or_else(|| default_inner_truncation(self.truncation))
    }

    /// Headroom, symbol and perturbation checks. The perturbation is resized
    /// to the scenario truncation first.
    pub fn validate(&self) -> Result<()> {
        let n = self.truncation;
        let need = 2 * self.max_degree() + HEADROOM_MARGIN;
        if n < need {
            return Err(Error::Headroom(format!(
                "truncation {n} is below 2*degree + {HEADROOM_MARGIN} = {need}"
            )));
        }
        let t = self.inner_truncation();
        if t == 0 || t + self.max_degree() > n {
            return Err(Error::Headroom(format!(
                "inner truncation {t} does not fit in truncation {n}"
            )));
        }
        for (name, tol) in [
            ("rank", self.tolerances.rank),
            ("membership", self.tolerances.membership),
            ("constraint", self.tolerances.constraint),
        ] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::Schema(format!("{name} tolerance must lie in (0, 1)")));
            }
        }
        self.symbol.validate()?;
        self.perturbation.resized(n).validate(n)
    }

    pub fn with_truncation(&self, n: usize) -> Self {
        Self {
            truncation: n,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelSummary {
    pub truncation: usize,
    /// Columns excluded because the symbol spills past the truncation.
    pub spill: usize,
    pub dim: usize,
    pub codim: usize,
    pub degenerate: bool,
    /// `max ‖R f‖` over the orthonormal kernel frame, accepted up to
    /// `rank_tol · ‖R‖_F`.
    pub max_residual: f64,
    pub pass: bool,
}

/// Structural data compared between `N` and `2N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Signature {
    /// `dim M`, or `N_eff − dim M` (prefixed by `co`) for kernels filling
    /// at least half of the effective columns.
    pub kernel: String,
    pub defect_dim: Option<usize>,
    pub branch: Option<Branch>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stabilization {
    pub truncation: usize,
    pub doubled: usize,
    pub at_n: Signature,
    pub at_2n: Signature,
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub id: String,
    pub truncation: usize,
    pub inner_truncation: usize,
    pub seed: u64,
    pub symbol: &'static str,
    pub rank: usize,
    pub checks: Vec<Check>,
    pub kernel: KernelSummary,
    pub defect: Option<TheoremReport>,
    pub representation: Option<RepresentationReport>,
    pub stabilization: Option<Stabilization>,
    pub failures: Vec<String>,
    pub pass: bool,
}

fn kernel_summary(r: &OperatorMatrix, m: &Subspace, tols: &Tolerances) -> Result<KernelSummary> {
    let n = r.truncation();
    let mut worst: f64 = 0.0;
    for f in m.basis() {
        worst = worst.max(r.apply(&f)?.norm());
    }
    let neff = n - r.spill();
    Ok(KernelSummary {
        truncation: n,
        spill: r.spill(),
        dim: m.dim(),
        codim: neff.saturating_sub(m.dim()),
        degenerate: m.is_degenerate(),
        max_residual: worst,
        pass: worst <= tols.rank * r.entries().norm().max(1.0),
    })
}

struct Outcome {
    kernel: KernelSummary,
    defect: Option<TheoremReport>,
    representation: Option<RepresentationReport>,
}

/// `dim M`, or `co{N_eff − dim M}` once the kernel fills half of the
/// effective columns, so that co-finite kernels compare equal across `N`.
pub fn kernel_signature(truncation: usize, spill: usize, dim: usize) -> String {
    let neff = truncation - spill;
    if 2 * dim >= neff {
        format!("co{}", neff.saturating_sub(dim))
    } else {
        dim.to_string()
    }
}

impl Outcome {
    fn signature(&self) -> Signature {
        let k = &self.kernel;
        Signature {
            kernel: kernel_signature(k.truncation, k.spill, k.dim),
            defect_dim: self.defect.as_ref().map(|d| d.defect.defect_dim),
            branch: self.representation.as_ref().map(|r| r.branch),
        }
    }
}

fn evaluate(s: &Scenario) -> Result<Outcome> {
    let n = s.truncation;
    let tols = s.tolerances;
    let p = s.perturbation.resized(n);
    let wants = |c: Check| s.checks.contains(&c);
    let case = if wants(Check::Defect) || wants(Check::Witness) || wants(Check::Cgp) {
        Some(DefectCase::from_symbol(&s.symbol)?)
    } else {
        None
    };
    let r = perturbed_operator(&s.symbol, &p, n)?;
    let m = kernel_subspace(&r, tols.rank)?;
    let kernel = kernel_summary(&r, &m, &tols)?;
    let defect = match &case {
        Some(c) if wants(Check::Defect) || wants(Check::Witness) => Some(verify_defect_theorem(c, &p, n, &tols)?),
        _ => None,
    };
    let representation = match &case {
        Some(c) if wants(Check::Cgp) => {
            let frame = build_cgp_frame(c, &p, &m, n, &tols)?;
            Some(verify_representation(&frame, &m, s.inner_truncation(), &tols)?)
        }
        _ => None,
    };
    Ok(Outcome {
        kernel,
        defect,
        representation,
    })
}

/// Validates and runs a scenario; `stabilize` repeats the run at `2N`.
pub fn run_scenario(s: &Scenario, stabilize: bool) -> Result<ScenarioReport> {
    s.validate()?;
    let out = evaluate(s)?;
    let mut failures = Vec::new();
    let wants = |c: Check| s.checks.contains(&c);
    if wants(Check::Kernel) && !out.kernel.pass {
        failures.push(format!("kernel residual {:.3e}", out.kernel.max_residual));
    }
    if let Some(d) = &out.defect {
        if wants(Check::Defect) && !(d.bound_ok && d.residual_in_f_ok) {
            failures.push(format!(
                "defect {} against bound, residual outside F {:.3e}",
                d.defect.defect_dim, d.defect.max_residual_outside_f
            ));
        }
        if wants(Check::Witness) && !d.witness_ok {
            failures.push(format!(
                "witness residual {:.3e}, w outside F {:.3e}",
                d.witness.max_membership(),
                d.witness.max_w_in_f()
            ));
        }
    }
    if let Some(rep) = &out.representation {
        if !rep.pass {
            for sys in rep.systems.iter().filter(|x| !x.pass) {
                failures.push(format!(
                    "{} system: reverse {:.3e}, forward {:.3e}, closure {:.3e}",
                    sys.name, sys.reverse_max_residual, sys.forward_max_residual, sys.closure_max_violation
                ));
            }
            if rep.systems.iter().all(|x| x.pass) {
                failures.push("representation checks failed".into());
            }
        }
    }
    let stabilization = if stabilize {
        let doubled = s.with_truncation(2 * s.truncation);
        let at_n = out.signature();
        let at_2n = evaluate(&doubled)?.signature();
        let stable = at_n == at_2n;
        if !stable {
            failures.push(format!("structure changed from N to 2N: {at_n:?} vs {at_2n:?}"));
        }
        Some(Stabilization {
            truncation: s.truncation,
            doubled: 2 * s.truncation,
            at_n,
            at_2n,
            stable,
        })
    } else {
        None
    };
    let mut checks = s.checks.clone();
    checks.sort();
    checks.dedup();
    Ok(ScenarioReport {
        id: s.id.clone(),
        truncation: s.truncation,
        inner_truncation: s.inner_truncation(),
        seed: s.seed,
        symbol: s.symbol.name(),
        rank: s.perturbation.rank(),
        checks,
        kernel: out.kernel,
        defect: out.defect,
        representation: out.representation,
        stabilization,
        pass: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{AnalyticSeries, BlaschkeProduct};

    fn scenario(n: usize) -> Scenario {
        let u = AnalyticSeries::monomial(0, 8);
        let v = AnalyticSeries::from_real(&[0., 0., -1., 0.5], 8).unwrap();
        Scenario {
            id: "inner-z2".into(),
            truncation: n,
            inner_truncation: None,
            tolerances: Tolerances::default(),
            symbol: SymbolSpec::Inner {
                theta: BlaschkeProduct::monomial(2),
            },
            perturbation: PerturbationSpec::new(vec![(u, v)]),
            checks: vec![Check::Kernel, Check::Defect, Check::Witness, Check::Cgp],
            seed: 0,
        }
    }

    #[test]
    fn headroom_rule() {
        let s = scenario(13);
        assert!(matches!(s.validate(), Err(Error::Headroom(_))));
        assert!(scenario(14).validate().is_ok());
    }

    #[test]
    fn runs_and_stabilizes() {
        let rep = run_scenario(&scenario(32), true).unwrap();
        assert!(rep.pass, "{:?}", rep.failures);
        assert_eq!(rep.kernel.dim, 1);
        let st = rep.stabilization.unwrap();
        assert!(st.stable);
        assert_eq!(st.at_n.kernel, "1");
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let s = scenario(32);
        let text = serde_json::to_string(&s).unwrap();
        let back = Scenario::from_json(&text).unwrap();
        assert_eq!(back.truncation, 32);
        let bad = text.replacen("\"seed\"", "\"sneed\"", 1);
        assert!(matches!(Scenario::from_json(&bad), Err(Error::Schema(_))));
    }

    #[test]
    fn non_orthonormal_u_is_rejected() {
        let mut s = scenario(32);
        s.perturbation.terms[0].u = AnalyticSeries::from_real(&[2.0], 8).unwrap();
        let e = run_scenario(&s, false).unwrap_err();
        assert!(e.to_string().starts_with("perturbation invariant"));
    }
}
