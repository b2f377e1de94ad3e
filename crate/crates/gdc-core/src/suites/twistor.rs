//! Twistor-spinor suite: the Penrose equation, the first-order current
//! identities that close d and δ of every bilinear degree over the spinor
//! alone, and the second-order integrability conditions (Schouten form and
//! the scalar-curvature eigenvalue identity).
//!
//! Flat charts use the affine seed family ψ₀ + x̃·ψ₁; round spheres use the
//! sum of two Killing spinors with opposite Killing numbers, which is the
//! general construction of a twistor spinor that is not itself Killing.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::Multivector;
use crate::error::Result;
use crate::fierz::mv_max_abs;
use crate::fields::{make_flat_twistor, make_killing, twistor_from_killing_pair};
use crate::geometry::{covariant_of_dirac_generic, curvature_at, SpinorField};
use crate::matrix::vec_max_abs;
use crate::metric::{build_spinor_metric, SpinorMetric};
use crate::rep::GammaRep;

use super::{
    collect_entries, complexify, mv_string, spinor_string, CheckRecord, CurrentData, Entry,
    ResidualReport, SuiteConfig,
};

/// Run every twistor-spinor check for the configured chart.
pub fn run_twistor_suite(cfg: &SuiteConfig) -> Result<ResidualReport> {
    let sig = cfg.chart.sig();
    let rep = GammaRep::build(sig, cfg.field)?;
    let metric = build_spinor_metric(&rep, cfg.class)?;
    let mut report = ResidualReport::skeleton("twistor", cfg, metric.epsilon());

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = rep.dim();
    let random_spinor = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..d)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    };

    // Second-order checks need nested jets; on spheres each nested-jet
    // evaluation re-runs the transport integrator, so cap their sample count.
    let heavy_count = if cfg.chart.is_flat() {
        cfg.samples
    } else {
        cfg.samples.min(5)
    };

    if cfg.chart.is_flat() {
        let psi0 = random_spinor(&mut rng);
        let psi1 = random_spinor(&mut rng);
        let field = make_flat_twistor(cfg.chart, &rep, &psi0, &psi1)?;
        let n = sig.dim() as f64;
        let dirac_rhs = move |_x: &[Complex64]| -> Result<Vec<Complex64>> {
            Ok(psi1.iter().map(|v| v * n).collect())
        };
        run_checks(cfg, &rep, &metric, &field, &dirac_rhs, heavy_count, &mut report)?;
    } else {
        let base = cfg.chart.sample(&mut rng);
        let seed_plus = random_spinor(&mut rng);
        let seed_minus = random_spinor(&mut rng);
        let lam = cfg.lambda;
        let plus = make_killing(cfg.chart, &rep, lam, &base, &seed_plus)?;
        let minus = make_killing(cfg.chart, &rep, -lam, &base, &seed_minus)?;
        let witness = plus.witness_deviation().max(minus.witness_deviation());
        let field = twistor_from_killing_pair(plus, minus)?;
        let n = sig.dim() as f64;
        let dirac_rhs = |x: &[Complex64]| -> Result<Vec<Complex64>> {
            let (p, m) = field.parts();
            let vp = p.eval(x)?;
            let vm = m.eval(x)?;
            Ok(vp
                .iter()
                .zip(vm.iter())
                .map(|(a, b)| (a - b) * (lam * n))
                .collect())
        };
        run_checks(cfg, &rep, &metric, &field, &dirac_rhs, heavy_count, &mut report)?;
        report.push(CheckRecord {
            equation: "transport is path-independent (leg-order witness, both parts)".into(),
            degree: None,
            samples: 2,
            max_residual: witness,
            mean_residual: witness,
            tolerance: 1e-10,
            passed: witness <= 1e-10,
            worst: None,
        });
    }
    Ok(report)
}

fn run_checks<F, R>(
    cfg: &SuiteConfig,
    rep: &GammaRep,
    metric: &SpinorMetric,
    field: &F,
    dirac_rhs: &R,
    heavy_count: usize,
    report: &mut ResidualReport,
) -> Result<()>
where
    F: SpinorField + Sync,
    R: Fn(&[Complex64]) -> Result<Vec<Complex64>> + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let points: Vec<Vec<f64>> = (0..cfg.samples).map(|_| cfg.chart.sample(&mut rng)).collect();
    let degrees = cfg.degree_list();
    let rows: Vec<(Vec<f64>, Result<Vec<Entry>>)> = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let entries = sample_entries(
                cfg,
                rep,
                metric,
                field,
                dirac_rhs,
                &degrees,
                x,
                i < heavy_count,
            );
            (x.clone(), entries)
        })
        .collect();
    collect_entries(report, rows)
}

#[allow(clippy::too_many_arguments)]
fn sample_entries<F, R>(
    cfg: &SuiteConfig,
    rep: &GammaRep,
    metric: &SpinorMetric,
    field: &F,
    dirac_rhs: &R,
    degrees: &[usize],
    x: &[f64],
    heavy: bool,
) -> Result<Vec<Entry>>
where
    F: SpinorField + Sync,
    R: Fn(&[Complex64]) -> Result<Vec<Complex64>> + Sync,
{
    let sig = rep.sig();
    let n = sig.dim();
    let nf = n as f64;
    let tol = cfg.tol;
    let xc = complexify(x);
    let data = CurrentData::at(cfg.chart, rep, metric, field, &xc)?;
    let mut out = Vec::new();

    // Penrose equation: ∇_{X_a}ψ − (1/n) e_a·D̸ψ = 0 for every leg.
    let mut dslash = vec![Complex64::new(0.0, 0.0); data.psi.len()];
    for (a, grad) in data.psi_grads.iter().enumerate() {
        for (o, v) in dslash.iter_mut().zip(rep.apply_blade(1 << a, grad)) {
            *o += v;
        }
    }
    let mut worst = (f64::NEG_INFINITY, String::new());
    for (a, grad) in data.psi_grads.iter().enumerate() {
        let g = sig.metric_sign(a) as f64;
        let low = rep.apply_blade(1 << a, &dslash);
        let pen: Vec<Complex64> = grad
            .iter()
            .zip(low.iter())
            .map(|(gr, l)| gr - l * (g / nf))
            .collect();
        let resid = vec_max_abs(&pen);
        if resid > worst.0 {
            worst = (resid, spinor_string(&pen));
        }
    }
    out.push(Entry {
        equation: "penrose equation: grad_a psi = (1/n) e_a D psi".into(),
        degree: None,
        tol,
        residual: worst.0,
        lhs: worst.1,
        rhs: "0".into(),
    });

    // The Dirac image the construction promises (n ψ₁, or n λ (φ₊ − φ₋)).
    let expected = dirac_rhs(&xc)?;
    let diff: Vec<Complex64> = dslash
        .iter()
        .zip(expected.iter())
        .map(|(l, r)| l - r)
        .collect();
    out.push(Entry {
        equation: "dirac image of the seed family".into(),
        degree: None,
        tol,
        residual: vec_max_abs(&diff),
        lhs: spinor_string(&dslash),
        rhs: spinor_string(&expected),
    });

    // First-order current identities, one pair per degree.
    for &p in degrees {
        let pi = p as isize;
        let pf = p as f64;

        // n·d(C_p) = (p+1)[(dδ̸ C)_{p+1} − 2 Σ_a i_{X^a}(B_a)_{p+2}].
        let mut inner = data.hodge_component(pi + 1)?;
        for a in 0..n {
            let ea = Multivector::<Complex64>::coframe(sig, a)?;
            let term = data.coupled_part(a, pi + 2)?.interior_from(&ea)?;
            inner = inner.try_sub(&term.scale(&Complex64::new(2.0, 0.0)))?;
        }
        let rhs = inner.scale(&Complex64::new(pf + 1.0, 0.0));
        let lhs = data.d_of(pi)?.scale(&Complex64::new(nf, 0.0));
        out.push(Entry {
            equation: "ascending current identity: n d C_p = (p+1)[(dH C)_{p+1} \
                       - 2 sum_a i(X^a)(B_a)_{p+2}]"
                .into(),
            degree: Some(p),
            tol,
            residual: mv_max_abs(&lhs.try_sub(&rhs)?),
            lhs: mv_string(&lhs),
            rhs: mv_string(&rhs),
        });

        // n·δ(C_p) = (p−n−1)[(dH C)_{p−1} − 2 Σ_a e^a ∧ (B_a)_{p−2}].
        let mut inner = data.hodge_component(pi - 1)?;
        for a in 0..n {
            let ea = Multivector::<Complex64>::coframe(sig, a)?;
            let term = data.coupled_part(a, pi - 2)?.wedge_from_vector(&ea)?;
            inner = inner.try_sub(&term.scale(&Complex64::new(2.0, 0.0)))?;
        }
        let rhs = inner.scale(&Complex64::new(pf - nf - 1.0, 0.0));
        let lhs = data.delta_of(pi)?.scale(&Complex64::new(nf, 0.0));
        out.push(Entry {
            equation: "descending current identity: n delta C_p = (p-n-1)[(dH C)_{p-1} \
                       - 2 sum_a e^a wedge (B_a)_{p-2}]"
                .into(),
            degree: Some(p),
            tol,
            residual: mv_max_abs(&lhs.try_sub(&rhs)?),
            lhs: mv_string(&lhs),
            rhs: mv_string(&rhs),
        });
    }

    // Second-order integrability (nested jets), on a capped subset.
    if heavy && n >= 2 {
        let grad_dirac = covariant_of_dirac_generic(cfg.chart, rep, field, &xc)?;
        let curv = curvature_at(cfg.chart, x)?;
        let scal = curv.scalar();
        let coef = scal / (4.0 * (nf - 1.0));

        // ∇_{X_b}(D̸ψ) + R/(4(n−1)) e_b·ψ = 0.
        let mut worst = (f64::NEG_INFINITY, String::new(), String::new());
        for (b, gd) in grad_dirac.iter().enumerate() {
            let g = sig.metric_sign(b) as f64;
            let low = rep.apply_blade(1 << b, &data.psi);
            let resid_vec: Vec<Complex64> = gd
                .iter()
                .zip(low.iter())
                .map(|(l, r)| l + r * (coef * g))
                .collect();
            let resid = vec_max_abs(&resid_vec);
            if resid > worst.0 {
                worst = (
                    resid,
                    spinor_string(gd),
                    format!("-{coef:.6} * e_{b} psi"),
                );
            }
        }
        out.push(Entry {
            equation: "curvature eigenvalue identity: grad_b(D psi) + R/(4(n-1)) e_b psi = 0"
                .into(),
            degree: None,
            tol,
            residual: worst.0,
            lhs: worst.1,
            rhs: worst.2,
        });

        // Schouten form (needs n ≥ 3): ∇_{X_b}(D̸ψ) = (n/2) Σ_a K_a(X_b) e^a·ψ.
        if n >= 3 {
            let schouten = curv.schouten()?;
            let mut worst = (f64::NEG_INFINITY, String::new(), String::new());
            for (b, gd) in grad_dirac.iter().enumerate() {
                let mut rhs = vec![Complex64::new(0.0, 0.0); data.psi.len()];
                for (a, ka) in schouten.iter().enumerate() {
                    let kab = *ka.coeff(1 << b);
                    if kab == 0.0 {
                        continue;
                    }
                    let acted = rep.apply_blade(1 << a, &data.psi);
                    for (o, v) in rhs.iter_mut().zip(acted.iter()) {
                        *o += v * (kab * nf / 2.0);
                    }
                }
                let diff: Vec<Complex64> =
                    gd.iter().zip(rhs.iter()).map(|(l, r)| l - r).collect();
                let resid = vec_max_abs(&diff);
                if resid > worst.0 {
                    worst = (resid, spinor_string(gd), spinor_string(&rhs));
                }
            }
            out.push(Entry {
                equation: "schouten integrability: grad_b(D psi) = (n/2) sum_a K_a(X_b) e^a psi"
                    .into(),
                degree: None,
                tol,
                residual: worst.0,
                lhs: worst.1,
                rhs: worst.2,
            });
        }
    }

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;
    use crate::chart::Chart;

    fn flat_cfg(plus: usize, minus: usize, samples: usize) -> SuiteConfig {
        let sig = Signature::new(plus, minus).unwrap();
        let mut cfg = SuiteConfig::new(Chart::flat(sig));
        cfg.samples = samples;
        cfg.seed = 23;
        cfg
    }

    #[test]
    fn flat_seed_family_passes_in_euclidean_three_space() {
        let cfg = flat_cfg(3, 0, 6);
        let report = run_twistor_suite(&cfg).expect("suite runs");
        assert!(report.passed, "{}", report.to_json());
        let names: Vec<&str> = report.checks.iter().map(|c| c.equation.as_str()).collect();
        for needle in [
            "penrose equation",
            "dirac image",
            "ascending current identity",
            "descending current identity",
            "curvature eigenvalue",
            "schouten integrability",
        ] {
            assert!(
                names.iter().any(|n| n.contains(needle)),
                "missing {needle}: {names:?}"
            );
        }
    }

    #[test]
    fn flat_seed_family_passes_in_minkowski_space() {
        let cfg = flat_cfg(1, 3, 5);
        let report = run_twistor_suite(&cfg).expect("suite runs");
        assert!(report.passed, "{}", report.to_json());
    }

    #[test]
    fn killing_pair_on_the_sphere_is_a_twistor_spinor() {
        let mut cfg = SuiteConfig::new(Chart::Sphere2);
        cfg.samples = 4;
        cfg.seed = 31;
        let report = run_twistor_suite(&cfg).expect("suite runs");
        assert!(report.passed, "{}", report.to_json());
        assert!(report
            .checks
            .iter()
            .any(|c| c.equation.contains("curvature eigenvalue")));
        // n = 2: no Schouten tensor.
        assert!(!report
            .checks
            .iter()
            .any(|c| c.equation.contains("schouten")));
    }

    #[test]
    fn inadmissible_pairing_class_is_a_hard_error() {
        // The starred ξ pairing has no intertwiner on Cl(2,1) over ℂ.
        let cfg = flat_cfg(2, 1, 3);
        assert!(matches!(
            run_twistor_suite(&cfg),
            Err(crate::error::Error::InadmissibleClass { .. })
        ));
    }

    #[test]
    fn reports_are_bit_identical_across_runs() {
        let cfg = flat_cfg(3, 0, 3);
        let a = run_twistor_suite(&cfg).unwrap().to_json();
        let b = run_twistor_suite(&cfg).unwrap().to_json();
        assert_eq!(a, b);
    }
}
