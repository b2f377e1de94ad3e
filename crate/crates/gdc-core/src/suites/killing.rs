//! Killing-spinor suite: the defining derivative law, the Dirac eigenvalue,
//! the graded derivative of the bilinear with its ladder split, and the
//! principal closed/co-closed equations matched against the expectation
//! table row for the configured pairing.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::Multivector;
use crate::currents::{build_expectation_table, killing_ratio, LambdaHat, LambdaKind, Pm};
use crate::error::{Error, Result};
use crate::fierz::mv_max_abs;
use crate::fields::{make_killing, KillingField};
use crate::matrix::vec_max_abs;
use crate::metric::{build_spinor_metric, SpinorMetric};
use crate::rep::GammaRep;

use super::{
    collect_entries, complexify, mv_string as fierz_mv_string, spinor_string, CheckRecord,
    CurrentData, Entry, ExclusionRecord, ResidualReport, SuiteConfig,
};

/// Run every Killing-spinor check for the configured chart and pairing.
///
/// Data sets whose Killing-number kind is incompatible with the pairing's
/// scalar involution refuse to run: the report carries the exclusion record
/// and an empty check list, and counts as passed.
pub fn run_killing_suite(cfg: &SuiteConfig) -> Result<ResidualReport> {
    let sig = cfg.chart.sig();
    let rep = GammaRep::build(sig, cfg.field)?;
    let metric = build_spinor_metric(&rep, cfg.class)?;
    let kind = LambdaKind::of(cfg.lambda)?;
    let mut report = ResidualReport::skeleton("killing", cfg, metric.epsilon());

    let table = build_expectation_table(kind);
    let row = table
        .rows
        .iter()
        .find(|r| r.j_c == metric.scalar_involution().label() && r.class == cfg.class.label())
        .cloned();
    report.table_row = row;

    let ratio = match killing_ratio(kind, metric.scalar_involution()) {
        Ok(r) => r,
        Err(Error::ExcludedDataSet { reason }) => {
            report.exclusions.push(ExclusionRecord {
                what: format!(
                    "{} Killing number with j_c = {} on {}",
                    kind.label(),
                    metric.scalar_involution().label(),
                    cfg.chart.label()
                ),
                reason,
            });
            return Ok(report);
        }
        Err(e) => return Err(e),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let base = cfg.chart.sample(&mut rng);
    let d = rep.dim();
    let seed_spinor: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let field = make_killing(cfg.chart, &rep, cfg.lambda, &base, &seed_spinor)?;

    let inputs: Vec<(Vec<f64>, Vec<Complex64>)> = (0..cfg.samples)
        .map(|_| {
            let x = cfg.chart.sample(&mut rng);
            let probe: Vec<Complex64> = (0..d)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            (x, probe)
        })
        .collect();

    let degrees = cfg.degree_list();
    let rows: Vec<(Vec<f64>, Result<Vec<Entry>>)> = inputs
        .par_iter()
        .map(|(x, probe)| {
            let entries = sample_entries(cfg, &rep, &metric, &field, ratio, &degrees, x, probe);
            (x.clone(), entries)
        })
        .collect();
    collect_entries(&mut report, rows)?;

    report.push(witness_record(&field));
    let pattern = pattern_record(&report.checks, &degrees, cfg);
    report.push(pattern);
    Ok(report)
}

/// Path-independence witness recorded at construction time.
fn witness_record(field: &KillingField<'_>) -> CheckRecord {
    CheckRecord {
        equation: "transport is path-independent (leg-order witness)".into(),
        degree: None,
        samples: 1,
        max_residual: field.witness_deviation(),
        mean_residual: field.witness_deviation(),
        tolerance: 1e-10,
        passed: field.witness_deviation() <= 1e-10,
        worst: None,
    }
}

/// Compare the observed vanishing ladder at each degree with the table row's
/// prediction; the residual is the number of mismatched degrees.
fn pattern_record(checks: &[CheckRecord], degrees: &[usize], cfg: &SuiteConfig) -> CheckRecord {
    let mut mismatches = 0usize;
    let mut detail: Vec<String> = Vec::new();
    for &p in degrees {
        let find = |name: &str| {
            checks
                .iter()
                .find(|c| c.degree == Some(p) && c.equation.starts_with(name))
                .map(|c| c.max_residual)
        };
        let closed = find("principal closure");
        if let Some(r) = closed {
            let ok = r <= cfg.tol;
            if !ok {
                mismatches += 1;
            }
            detail.push(format!("p={p}: {}", if ok { "matches" } else { "MISMATCH" }));
        }
    }
    CheckRecord {
        equation: "closed/co-closed parity pattern matches the table row".into(),
        degree: None,
        samples: degrees.len(),
        max_residual: mismatches as f64,
        mean_residual: mismatches as f64,
        tolerance: 0.5,
        passed: mismatches == 0,
        worst: Some(super::WorstSample {
            x: Vec::new(),
            lhs: detail.join("; "),
            rhs: "every degree matches its table cell".into(),
        }),
    }
}

#[allow(clippy::too_many_arguments)]
fn sample_entries(
    cfg: &SuiteConfig,
    rep: &GammaRep,
    metric: &SpinorMetric,
    field: &KillingField<'_>,
    ratio: i32,
    degrees: &[usize],
    x: &[f64],
    probe: &[Complex64],
) -> Result<Vec<Entry>> {
    let sig = rep.sig();
    let n = sig.dim();
    let lam = cfg.lambda;
    let tol = cfg.tol;
    let xc = complexify(x);
    let data = CurrentData::at(cfg.chart, rep, metric, field, &xc)?;
    let mut out = Vec::new();

    // Defining law: ∇_{X_a}ψ = λ e_a·ψ with e_a = g_{aa} e^a (worst leg kept).
    let mut worst = (f64::NEG_INFINITY, String::new(), String::new());
    for a in 0..n {
        let g = sig.metric_sign(a) as f64;
        let rhs: Vec<Complex64> = rep
            .apply_blade(1 << a, &data.psi)
            .iter()
            .map(|v| v * lam * g)
            .collect();
        let diff: Vec<Complex64> = data.psi_grads[a]
            .iter()
            .zip(rhs.iter())
            .map(|(l, r)| l - r)
            .collect();
        let resid = vec_max_abs(&diff);
        if resid > worst.0 {
            worst = (resid, spinor_string(&data.psi_grads[a]), spinor_string(&rhs));
        }
    }
    out.push(Entry {
        equation: "derivative law: grad_a psi = lambda e_a psi".into(),
        degree: None,
        tol,
        residual: worst.0,
        lhs: worst.1,
        rhs: worst.2,
    });

    // Dirac eigenvalue D̸ψ = nλψ.
    let mut dslash = vec![Complex64::new(0.0, 0.0); data.psi.len()];
    for (a, grad) in data.psi_grads.iter().enumerate() {
        for (o, v) in dslash.iter_mut().zip(rep.apply_blade(1 << a, grad)) {
            *o += v;
        }
    }
    let n_lam = lam * n as f64;
    let rhs_dirac: Vec<Complex64> = data.psi.iter().map(|v| v * n_lam).collect();
    let diff: Vec<Complex64> = dslash
        .iter()
        .zip(rhs_dirac.iter())
        .map(|(l, r)| l - r)
        .collect();
    out.push(Entry {
        equation: "dirac eigenvalue: D psi = n lambda psi".into(),
        degree: None,
        tol,
        residual: vec_max_abs(&diff),
        lhs: spinor_string(&dslash),
        rhs: spinor_string(&rhs_dirac),
    });

    // Twistor containment: the Penrose part of ∇ψ vanishes.
    let mut worst_p = (f64::NEG_INFINITY, String::new());
    for (a, grad) in data.psi_grads.iter().enumerate() {
        let g = sig.metric_sign(a) as f64;
        let low = rep.apply_blade(1 << a, &dslash);
        let pen: Vec<Complex64> = grad
            .iter()
            .zip(low.iter())
            .map(|(gr, l)| gr - l * (g / n as f64))
            .collect();
        let resid = vec_max_abs(&pen);
        if resid > worst_p.0 {
            worst_p = (resid, spinor_string(&pen));
        }
    }
    out.push(Entry {
        equation: "twistor containment: penrose part of grad psi vanishes".into(),
        degree: None,
        tol,
        residual: worst_p.0,
        lhs: worst_p.1,
        rhs: "0".into(),
    });

    // Dual-field law against a random probe:
    // (∇_aψ, φ) = λ^{j_c} (ψ, (e_a)^J · φ).
    let j_c = metric.scalar_involution();
    let lam_c = j_c.apply(lam);
    let alg = cfg.class.algebra_involution();
    let mut worst_d = (f64::NEG_INFINITY, String::new(), String::new());
    for a in 0..n {
        let leg = Multivector::<Complex64>::frame_lowered(sig, a)?.involution(alg)?;
        let acted = rep.apply_mv(&leg, probe)?;
        let lhs = metric.inner(&data.psi_grads[a], probe);
        let rhs = lam_c * metric.inner(&data.psi, &acted);
        let resid = (lhs - rhs).norm();
        if resid > worst_d.0 {
            worst_d = (resid, format!("{lhs}"), format!("{rhs}"));
        }
    }
    out.push(Entry {
        equation: "dual derivative law: (grad_a psi, probe) = lambda^{j_c} (psi, e_a^J probe)"
            .into(),
        degree: None,
        tol,
        residual: worst_d.0,
        lhs: worst_d.1,
        rhs: worst_d.2,
    });

    // Graded derivative, ladder, and principal equations per degree.
    let kind = LambdaKind::of(lam)?;
    for &p in degrees {
        let phi_lo = data.phi_part(p as isize - 1)?;
        let phi_hi = data.phi_part(p as isize + 1)?;
        let hat_minus = LambdaHat {
            lambda: lam,
            j_c,
            class: cfg.class,
            p,
            sign: Pm::Minus,
        };
        let hat_plus = LambdaHat {
            lambda: lam,
            j_c,
            class: cfg.class,
            p,
            sign: Pm::Plus,
        };

        // ∇_{X_a}Φ_p = (λ̂⁻ e_a) ∧ Φ_{p−1} + i_{(λ̂⁺ e_a)~} Φ_{p+1}, worst leg.
        let mut worst_g = (f64::NEG_INFINITY, String::new(), String::new());
        for a in 0..n {
            let leg = Multivector::<Complex64>::frame_lowered(sig, a)?;
            let minus_leg = hat_minus.apply(&leg)?;
            let plus_leg = hat_plus.apply(&leg)?;
            let rhs = phi_lo
                .wedge_from_vector(&minus_leg)?
                .try_add(&phi_hi.interior_from(&plus_leg)?)?;
            let lhs = data.grads[a].grade(p)?;
            let resid = mv_max_abs(&lhs.try_sub(&rhs)?);
            if resid > worst_g.0 {
                worst_g = (resid, fierz_mv_string(&lhs), fierz_mv_string(&rhs));
            }
        }
        out.push(Entry {
            equation: "graded derivative: grad_a C_p = (lambda_minus e_a) wedge C_{p-1} \
                       + i((lambda_plus e_a)~) C_{p+1}"
                .into(),
            degree: Some(p),
            tol,
            residual: worst_g.0,
            lhs: worst_g.1,
            rhs: worst_g.2,
        });

        // Ascending ladder: d C_p = (p+1) <λ̂⁺> C_{p+1}.
        let d_p = data.d_of(p as isize)?;
        let up = hat_plus.expectation(kind)?;
        let rhs_up = phi_hi.scale(&(up * (p as f64 + 1.0)));
        out.push(Entry {
            equation: "ascending ladder: d C_p = (p+1) <lambda_plus> C_{p+1}".into(),
            degree: Some(p),
            tol,
            residual: mv_max_abs(&d_p.try_sub(&rhs_up)?),
            lhs: fierz_mv_string(&d_p),
            rhs: fierz_mv_string(&rhs_up),
        });

        // Descending ladder: δ C_p = −(n−p+1) <λ̂⁻> C_{p−1}.
        let del_p = data.delta_of(p as isize)?;
        let down = hat_minus.expectation(kind)?;
        let rhs_down = phi_lo.scale(&(-down * (n as f64 - p as f64 + 1.0)));
        out.push(Entry {
            equation: "descending ladder: delta C_p = -(n-p+1) <lambda_minus> C_{p-1}".into(),
            degree: Some(p),
            tol,
            residual: mv_max_abs(&del_p.try_sub(&rhs_down)?),
            lhs: fierz_mv_string(&del_p),
            rhs: fierz_mv_string(&rhs_down),
        });

        // Principal equations, selected by the table cell for this parity.
        // plus-expectation zero ⇒ closed (d C_p = 0) with a descending
        // companion; minus-expectation zero ⇒ co-closed with an ascending
        // companion. The cell values are λ-multiples {0, 2}.
        let parity = if p % 2 == 0 { 1 } else { -1 };
        let delta_j = cfg.class.delta();
        let plus_mult = 1 + parity * ratio * delta_j;
        let (closure, companion, closure_label, companion_label) = if plus_mult == 0 {
            let comp_rhs = phi_lo.scale(&(-lam * 2.0 * (n as f64 - p as f64 + 1.0)));
            (
                mv_max_abs(&d_p),
                (del_p.clone(), comp_rhs),
                "closed: d C_p = 0",
                "co-exact companion: delta C_p = -2 lambda (n-p+1) C_{p-1}",
            )
        } else {
            let comp_rhs = phi_hi.scale(&(lam * 2.0 * (p as f64 + 1.0)));
            (
                mv_max_abs(&del_p),
                (d_p.clone(), comp_rhs),
                "co-closed: delta C_p = 0",
                "exact companion: d C_p = 2 lambda (p+1) C_{p+1}",
            )
        };
        out.push(Entry {
            equation: format!("principal closure [{closure_label}]"),
            degree: Some(p),
            tol,
            residual: closure,
            lhs: if plus_mult == 0 {
                fierz_mv_string(&d_p)
            } else {
                fierz_mv_string(&del_p)
            },
            rhs: "0".into(),
        });
        out.push(Entry {
            equation: format!("principal ladder [{companion_label}]"),
            degree: Some(p),
            tol,
            residual: mv_max_abs(&companion.0.try_sub(&companion.1)?),
            lhs: fierz_mv_string(&companion.0),
            rhs: fierz_mv_string(&companion.1),
        });
    }

    // Parallel limit: with λ = 0 every current is closed and co-closed.
    if lam.norm() == 0.0 {
        let resid = mv_max_abs(&data.d).max(mv_max_abs(&data.delta));
        out.push(Entry {
            equation: "parallel limit: d C_p = 0 and delta C_p = 0 for every degree".into(),
            degree: None,
            tol,
            residual: resid,
            lhs: format!(
                "d: {}; delta: {}",
                fierz_mv_string(&data.d),
                fierz_mv_string(&data.delta)
            ),
            rhs: "0".into(),
        });
    }

    Ok(out)
}
