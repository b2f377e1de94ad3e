//! Verification suites: each runs one family of first-order current
//! equations over seeded random sample points and produces a deterministic
//! [`ResidualReport`] naming every equation, degree, and worst sample.

mod dirac;
mod killing;
mod structure;
mod twistor;

pub use dirac::run_dirac_suite;
pub use killing::run_killing_suite;
pub use structure::run_structure_suite;
pub use twistor::run_twistor_suite;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Multivector, Signature};
use crate::chart::Chart;
use crate::classify::ScalarField;
use crate::error::{Error, Result};
use crate::fierz::bilinear;
use crate::geometry::{FormField, SpinorField};
use crate::metric::{AdjointClass, SpinorMetric};
use crate::rep::GammaRep;
use crate::scalar::AdScalar;

/// Everything one suite run needs: where, which algebraic data, how many
/// samples, and how strictly.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub chart: Chart,
    pub field: ScalarField,
    pub class: AdjointClass,
    pub lambda: Complex64,
    pub mass: Complex64,
    /// Restrict checks to these degrees (None = all of 0..=n).
    pub degrees: Option<Vec<usize>>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl SuiteConfig {
    /// Defaults for a chart: complex backend, conjugate-ξ pairing, the
    /// chart's admissible Killing number, massless, 50 samples.
    pub fn new(chart: Chart) -> SuiteConfig {
        let lambda = if chart.is_flat() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, 0.5)
        };
        SuiteConfig {
            chart,
            field: ScalarField::Complex,
            class: AdjointClass::XiStar,
            lambda,
            mass: Complex64::new(0.0, 0.0),
            degrees: None,
            samples: 50,
            seed: 7,
            tol: 1e-8,
        }
    }

    pub(crate) fn degree_list(&self) -> Vec<usize> {
        let n = self.chart.dim();
        match &self.degrees {
            Some(ds) => ds.iter().copied().filter(|&p| p <= n).collect(),
            None => (0..=n).collect(),
        }
    }

    pub(crate) fn validate_mass(&self) -> Result<()> {
        if self.mass.re != 0.0 && self.mass.im != 0.0 {
            return Err(Error::Config(format!(
                "mass must be real or pure imaginary, got {}",
                self.mass
            )));
        }
        Ok(())
    }
}

/// The convention choices a reader needs to reproduce any number in a
/// report; constant across suites.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Conventions {
    pub clifford: String,
    pub curvature: String,
    pub killing_constraint: String,
    pub reality_half_assignment: String,
    pub fierz_normalization: String,
}

pub fn conventions() -> Conventions {
    Conventions {
        clifford: "e^a e^b + e^b e^a = +2 g^{ab}; first `plus` axes square to +1".into(),
        curvature: "Omega = d omega + omega wedge omega; unit S2 scalar = +2, unit S3 scalar = +6"
            .into(),
        killing_constraint: "lambda^2 = -R/(4 n (n-1)); unit spheres admit lambda = ±i/2".into(),
        reality_half_assignment:
            "imaginary coefficients iff floor(p/2) odd (xi family) or floor(p/2)+p odd (xi-eta \
             family); equivalently eps * s_J(p) = -1"
                .into(),
        fierz_normalization: "(psi phibar)_p = (d/2^n) sum_I (phi, e^xi_I psi) e^I".into(),
    }
}

/// The worst-offending sample of one check, with both sides of the equation
/// rendered for inspection.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WorstSample {
    pub x: Vec<f64>,
    pub lhs: String,
    pub rhs: String,
}

/// One verified equation (optionally at one degree) with its residual
/// statistics over the sample set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub equation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    pub samples: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<WorstSample>,
}

/// A configured combination the suite refused to run, with the reason.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExclusionRecord {
    pub what: String,
    pub reason: String,
}

/// Deterministic result of one suite run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualReport {
    pub schema: u32,
    pub suite: String,
    pub passed: bool,
    pub chart: String,
    pub signature: (usize, usize),
    pub scalar_field: String,
    pub class: String,
    pub j_c: String,
    pub epsilon: i32,
    pub lambda: (f64, f64),
    pub mass: (f64, f64),
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub conventions: Conventions,
    pub exclusions: Vec<ExclusionRecord>,
    pub checks: Vec<CheckRecord>,
    /// Expectation-value table row matching this run's (j_c, 𝒥) pair, when a
    /// suite verifies a closure pattern against it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_row: Option<crate::currents::ExpectationRow>,
}

impl ResidualReport {
    pub(crate) fn skeleton(suite: &str, cfg: &SuiteConfig, epsilon: i32) -> ResidualReport {
        let sig = cfg.chart.sig();
        ResidualReport {
            schema: 1,
            suite: suite.into(),
            passed: true,
            chart: cfg.chart.label(),
            signature: (sig.plus(), sig.minus()),
            scalar_field: match cfg.field {
                ScalarField::Real => "real".into(),
                ScalarField::Complex => "complex".into(),
            },
            class: cfg.class.label().into(),
            j_c: cfg.class.scalar_involution().label().into(),
            epsilon,
            lambda: (cfg.lambda.re, cfg.lambda.im),
            mass: (cfg.mass.re, cfg.mass.im),
            samples: cfg.samples,
            seed: cfg.seed,
            tolerance: cfg.tol,
            conventions: conventions(),
            exclusions: Vec::new(),
            checks: Vec::new(),
            table_row: None,
        }
    }

    pub(crate) fn push(&mut self, record: CheckRecord) {
        self.passed &= record.passed;
        self.checks.push(record);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Residual accumulator: tracks max/mean and renders both sides of the worst
/// sample lazily.
pub(crate) struct Accum {
    equation: String,
    degree: Option<usize>,
    tol: f64,
    count: usize,
    max: f64,
    sum: f64,
    worst: Option<WorstSample>,
}

impl Accum {
    pub(crate) fn new(equation: &str, degree: Option<usize>, tol: f64) -> Accum {
        Accum {
            equation: equation.into(),
            degree,
            tol,
            count: 0,
            max: 0.0,
            sum: 0.0,
            worst: None,
        }
    }

    /// Record one sample's residual; `sides` renders (lhs, rhs) and is only
    /// called when this sample becomes the worst so far.
    pub(crate) fn push<F: FnOnce() -> (String, String)>(
        &mut self,
        x: &[f64],
        residual: f64,
        sides: F,
    ) {
        self.count += 1;
        self.sum += residual;
        if residual > self.max || self.worst.is_none() {
            self.max = self.max.max(residual);
            let (lhs, rhs) = sides();
            self.worst = Some(WorstSample {
                x: x.to_vec(),
                lhs,
                rhs,
            });
        }
    }

    pub(crate) fn finish(self) -> CheckRecord {
        CheckRecord {
            equation: self.equation,
            degree: self.degree,
            samples: self.count,
            max_residual: self.max,
            mean_residual: if self.count == 0 {
                0.0
            } else {
                self.sum / self.count as f64
            },
            tolerance: self.tol,
            passed: self.max <= self.tol,
            worst: self.worst,
        }
    }
}

/// One equation's residual at one sample, produced inside the parallel
/// per-sample pass and merged into [`Accum`]s afterwards.
pub(crate) struct Entry {
    pub equation: String,
    pub degree: Option<usize>,
    pub tol: f64,
    pub residual: f64,
    pub lhs: String,
    pub rhs: String,
}

/// Merge per-sample entry lists (sample order) into one [`CheckRecord`] per
/// distinct (equation, degree) key, in first-seen order.
pub(crate) fn collect_entries(
    report: &mut ResidualReport,
    rows: Vec<(Vec<f64>, Result<Vec<Entry>>)>,
) -> Result<()> {
    let mut accums: Vec<Accum> = Vec::new();
    let mut keys: Vec<(String, Option<usize>)> = Vec::new();
    for (x, entries) in rows {
        for e in entries? {
            let key = (e.equation.clone(), e.degree);
            let idx = match keys.iter().position(|k| *k == key) {
                Some(i) => i,
                None => {
                    keys.push(key);
                    accums.push(Accum::new(&e.equation, e.degree, e.tol));
                    accums.len() - 1
                }
            };
            accums[idx].push(&x, e.residual, || (e.lhs, e.rhs));
        }
    }
    for a in accums {
        report.push(a.finish());
    }
    Ok(())
}

/// Compact rendering of a multivector for worst-sample records: nonzero
/// coefficients keyed by basis mask bits.
pub(crate) fn mv_string(mv: &Multivector<Complex64>) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (mask, c) in mv.iter_nz() {
        parts.push(format!("e[{mask:b}]: {:.3e}{:+.3e}i", c.re, c.im));
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(", ")
    }
}

pub(crate) fn spinor_string(v: &[Complex64]) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|c| format!("{:.3e}{:+.3e}i", c.re, c.im))
        .collect();
    format!("({})", parts.join(", "))
}

/// The inhomogeneous bilinear ψψ̄ of a spinor field, as a differentiable
/// form field.
pub(crate) struct BilinearField<'a, F: SpinorField> {
    pub rep: &'a GammaRep,
    pub metric: &'a SpinorMetric,
    pub field: &'a F,
}

impl<F: SpinorField> FormField for BilinearField<'_, F> {
    fn sig(&self) -> Signature {
        self.rep.sig()
    }
    fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Multivector<T>> {
        let psi = self.field.eval(x)?;
        bilinear(self.rep, self.metric, &psi, &psi)
    }
}

/// Everything the current equations consume at one sample point, computed
/// from a single AD pass over the bilinear plus one over the spinor.
pub(crate) struct CurrentData {
    /// (ψψ̄) value.
    pub phi: Multivector<Complex64>,
    /// d(ψψ̄) (all source grades at once; grade q+1 holds d of grade q).
    pub d: Multivector<Complex64>,
    /// δ(ψψ̄).
    pub delta: Multivector<Complex64>,
    /// Per-leg ∇_{X_a}(ψψ̄).
    pub grads: Vec<Multivector<Complex64>>,
    /// ψ value.
    pub psi: Vec<Complex64>,
    /// Per-leg ∇_{X_a}ψ.
    pub psi_grads: Vec<Vec<Complex64>>,
    /// Coupled currents B_a = ψ(∇_{X_a}ψ)^bar.
    pub coupled: Vec<Multivector<Complex64>>,
}

impl CurrentData {
    pub(crate) fn at<F: SpinorField>(
        chart: Chart,
        rep: &GammaRep,
        metric: &SpinorMetric,
        field: &F,
        x: &[Complex64],
    ) -> Result<CurrentData> {
        let sig = rep.sig();
        let bf = BilinearField { rep, metric, field };
        let grads = crate::geometry::form_covariant_generic(chart, &bf, x)?;
        let phi = bf.eval(x)?;
        let mut d = Multivector::zero(sig);
        let mut delta = Multivector::zero(sig);
        for (a, grad) in grads.iter().enumerate() {
            let ea = Multivector::<Complex64>::coframe(sig, a)?;
            d = d.try_add(&grad.wedge_from_vector(&ea)?)?;
            delta = delta.try_add(&grad.interior_from(&ea)?)?;
        }
        let delta = delta.neg();
        let psi_grads = crate::geometry::spinor_covariant_generic(chart, rep, field, x)?;
        let psi = field.eval(x)?;
        let coupled = psi_grads
            .iter()
            .map(|g| bilinear(rep, metric, &psi, g))
            .collect::<Result<Vec<_>>>()?;
        Ok(CurrentData {
            phi,
            d,
            delta,
            grads,
            psi,
            psi_grads,
            coupled,
        })
    }

    /// d of the grade-p current (a grade-(p+1) multivector; zero when the
    /// source or target grade is out of range).
    pub(crate) fn d_of(&self, p: isize) -> Result<Multivector<Complex64>> {
        let n = self.phi.sig().dim() as isize;
        if p < 0 || p + 1 > n {
            return Ok(Multivector::zero(self.phi.sig()));
        }
        self.d.grade((p + 1) as usize)
    }

    /// δ of the grade-p current (a grade-(p−1) multivector; zero when the
    /// source or target grade is out of range).
    pub(crate) fn delta_of(&self, p: isize) -> Result<Multivector<Complex64>> {
        let n = self.phi.sig().dim() as isize;
        if p < 1 || p > n {
            return Ok(Multivector::zero(self.phi.sig()));
        }
        self.delta.grade((p - 1) as usize)
    }

    /// Grade-q component of d̸(ψψ̄) = (d − δ)(ψψ̄) (zero outside 0..=n).
    pub(crate) fn hodge_component(&self, q: isize) -> Result<Multivector<Complex64>> {
        let sig = self.phi.sig();
        let n = sig.dim() as isize;
        if q < 0 || q > n {
            return Ok(Multivector::zero(sig));
        }
        let q = q as usize;
        Ok(self.d.grade(q)?.try_sub(&self.delta.grade(q)?)?)
    }

    /// Grade-p part of the bilinear (zero outside 0..=n).
    pub(crate) fn phi_part(&self, p: isize) -> Result<Multivector<Complex64>> {
        let sig = self.phi.sig();
        let n = sig.dim() as isize;
        if p < 0 || p > n {
            return Ok(Multivector::zero(sig));
        }
        self.phi.grade(p as usize)
    }

    /// Grade-q part of the coupled current B_a (zero outside 0..=n).
    pub(crate) fn coupled_part(&self, a: usize, q: isize) -> Result<Multivector<Complex64>> {
        let sig = self.phi.sig();
        let n = sig.dim() as isize;
        if q < 0 || q > n {
            return Ok(Multivector::zero(sig));
        }
        self.coupled[a].grade(q as usize)
    }
}

pub(crate) fn complexify(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|v| Complex64::new(*v, 0.0)).collect()
}
