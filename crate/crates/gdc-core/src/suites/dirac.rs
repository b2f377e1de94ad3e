//! Dirac-spinor suite on flat charts: plane-wave solutions of D̸ψ = mψ, the
//! key identity closing Σ_a e^a·B_a over the bilinear, and the paired
//! mass-ladder equations relating d and δ of each current degree to its
//! neighbours through the involution split Δ±. With m = 0 the same
//! equations specialize to the Weyl system, and the suite additionally
//! verifies that at each degree either d or δ of the current vanishes.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{Multivector, Signature};
use crate::currents::{delta_pm, mass_d_coefficient, mass_delta_coefficient, Pm};
use crate::error::{Error, Result};
use crate::fierz::mv_max_abs;
use crate::fields::{make_dirac_plane_wave, PlaneWaveField};
use crate::geometry::SpinorField;
use crate::matrix::vec_max_abs;
use crate::metric::{build_spinor_metric, SpinorMetric};
use crate::rep::GammaRep;
use crate::scalar::AdScalar;

use super::{
    collect_entries, complexify, mv_string, spinor_string, CheckRecord, CurrentData, Entry,
    ResidualReport, SuiteConfig, WorstSample,
};

/// A fixed complex combination of plane waves sharing one wave covector:
/// the general on-shell solution for that covector.
struct SumField<'a> {
    terms: Vec<(Complex64, PlaneWaveField<'a>)>,
}

impl SpinorField for SumField<'_> {
    fn sig(&self) -> Signature {
        self.terms[0].1.sig()
    }
    fn spinor_dim(&self) -> usize {
        self.terms[0].1.spinor_dim()
    }
    fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Vec<T>> {
        let mut acc: Option<Vec<T>> = None;
        for (c, f) in &self.terms {
            let cc = T::from_c(*c);
            let v = f.eval(x)?;
            let scaled: Vec<T> = v.iter().map(|vi| vi.mul(&cc)).collect();
            acc = Some(match acc {
                None => scaled,
                Some(a) => a.iter().zip(scaled.iter()).map(|(p, q)| p.add(q)).collect(),
            });
        }
        acc.ok_or_else(|| Error::Internal("plane-wave sum has no terms".into()))
    }
}

/// Draw a real wave covector with k² = −m² (the on-shell condition for
/// D̸ e^{ik·x}u = m e^{ik·x}u), or explain why none exists.
fn sample_wave_covector(
    sig: Signature,
    mass: Complex64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let n = sig.dim();
    let target = -(mass * mass).re;
    if target == 0.0 {
        // Null covector. A definite signature admits only k = 0 (constant
        // solutions); a mixed one solves the first plus-axis component
        // against the rest.
        if sig.plus() == 0 || sig.minus() == 0 {
            return Ok(vec![0.0; n]);
        }
        loop {
            let mut k: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let rest: f64 = (1..n)
                .map(|a| sig.metric_sign(a) as f64 * k[a] * k[a])
                .sum();
            if -rest >= 0.0 {
                k[0] = (-rest).sqrt();
                return Ok(k);
            }
        }
    }
    for _ in 0..1000 {
        let k: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let k2: f64 = (0..n)
            .map(|a| sig.metric_sign(a) as f64 * k[a] * k[a])
            .sum();
        if k2 * target > 0.0 {
            let scale = (target / k2).sqrt();
            return Ok(k.iter().map(|v| v * scale).collect());
        }
    }
    Err(Error::Config(format!(
        "no real wave covector with k^2 = {target} exists on signature ({},{})",
        sig.plus(),
        sig.minus()
    )))
}

/// Run every Dirac plane-wave check for the configured flat chart and mass.
pub fn run_dirac_suite(cfg: &SuiteConfig) -> Result<ResidualReport> {
    cfg.validate_mass()?;
    let sig = cfg.chart.sig();
    let rep = GammaRep::build(sig, cfg.field)?;
    let metric = build_spinor_metric(&rep, cfg.class)?;
    let mut report = ResidualReport::skeleton("dirac", cfg, metric.epsilon());

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let k = sample_wave_covector(sig, cfg.mass, &mut rng)?;
    let waves = make_dirac_plane_wave(cfg.chart, &rep, &k, cfg.mass)?;
    let terms: Vec<(Complex64, PlaneWaveField)> = waves
        .into_iter()
        .map(|w| {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (c, w)
        })
        .collect();
    let field = SumField { terms };

    let shell = {
        let k2: f64 = (0..sig.dim())
            .map(|a| sig.metric_sign(a) as f64 * k[a] * k[a])
            .sum();
        ((cfg.mass * cfg.mass) + k2).norm()
    };
    report.push(CheckRecord {
        equation: "wave covector is on shell: k^2 + m^2 = 0".into(),
        degree: None,
        samples: 1,
        max_residual: shell,
        mean_residual: shell,
        tolerance: 1e-12,
        passed: shell <= 1e-12,
        worst: Some(WorstSample {
            x: k.clone(),
            lhs: format!("k = {k:?}"),
            rhs: format!("m = {}", cfg.mass),
        }),
    });

    let blades = 1usize << sig.dim();
    let inputs: Vec<(Vec<f64>, Vec<Complex64>)> = (0..cfg.samples)
        .map(|_| {
            let x = cfg.chart.sample(&mut rng);
            let probe: Vec<Complex64> = (0..blades)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            (x, probe)
        })
        .collect();
    let degrees = cfg.degree_list();

    let rows: Vec<(Vec<f64>, Result<Vec<Entry>>)> = inputs
        .par_iter()
        .map(|(x, probe)| {
            let entries = sample_entries(cfg, &rep, &metric, &field, &degrees, x, probe);
            (x.clone(), entries)
        })
        .collect();
    collect_entries(&mut report, rows)?;

    if cfg.mass.norm() == 0.0 {
        weyl_alternative(cfg, &rep, &metric, &field, &inputs, &degrees, &mut report)?;
    }
    Ok(report)
}

/// At m = 0 each current degree is closed or co-closed; verify
/// min(max‖d C_p‖, max‖δ C_p‖) over the samples stays below tolerance.
fn weyl_alternative(
    cfg: &SuiteConfig,
    rep: &GammaRep,
    metric: &SpinorMetric,
    field: &SumField<'_>,
    inputs: &[(Vec<f64>, Vec<Complex64>)],
    degrees: &[usize],
    report: &mut ResidualReport,
) -> Result<()> {
    let norms: Vec<Result<Vec<(f64, f64)>>> = inputs
        .par_iter()
        .map(|(x, _)| {
            let xc = complexify(x);
            let data = CurrentData::at(cfg.chart, rep, metric, field, &xc)?;
            degrees
                .iter()
                .map(|&p| {
                    Ok((
                        mv_max_abs(&data.d_of(p as isize)?),
                        mv_max_abs(&data.delta_of(p as isize)?),
                    ))
                })
                .collect()
        })
        .collect();
    let mut max_d = vec![0.0f64; degrees.len()];
    let mut max_del = vec![0.0f64; degrees.len()];
    for row in norms {
        for (i, (dn, deln)) in row?.into_iter().enumerate() {
            max_d[i] = max_d[i].max(dn);
            max_del[i] = max_del[i].max(deln);
        }
    }
    for (i, &p) in degrees.iter().enumerate() {
        let resid = max_d[i].min(max_del[i]);
        report.push(CheckRecord {
            equation: "weyl alternative: d C_p or delta C_p vanishes identically".into(),
            degree: Some(p),
            samples: cfg.samples,
            max_residual: resid,
            mean_residual: resid,
            tolerance: cfg.tol,
            passed: resid <= cfg.tol,
            worst: Some(WorstSample {
                x: Vec::new(),
                lhs: format!("max |d C_{p}| = {:.3e}", max_d[i]),
                rhs: format!("max |delta C_{p}| = {:.3e}", max_del[i]),
            }),
        });
    }
    Ok(())
}

fn sample_entries(
    cfg: &SuiteConfig,
    rep: &GammaRep,
    metric: &SpinorMetric,
    field: &SumField<'_>,
    degrees: &[usize],
    x: &[f64],
    probe: &[Complex64],
) -> Result<Vec<Entry>> {
    let sig = rep.sig();
    let n = sig.dim();
    let tol = cfg.tol;
    let m = cfg.mass;
    let class = cfg.class;
    let eps = metric.epsilon();
    let xc = complexify(x);
    let data = CurrentData::at(cfg.chart, rep, metric, field, &xc)?;
    let mut out = Vec::new();

    // Field equation D̸ψ = mψ from the AD leg derivatives.
    let mut dslash = vec![Complex64::new(0.0, 0.0); data.psi.len()];
    for (a, grad) in data.psi_grads.iter().enumerate() {
        for (o, v) in dslash.iter_mut().zip(rep.apply_blade(1 << a, grad)) {
            *o += v;
        }
    }
    let rhs: Vec<Complex64> = data.psi.iter().map(|v| v * m).collect();
    let diff: Vec<Complex64> = dslash.iter().zip(rhs.iter()).map(|(l, r)| l - r).collect();
    out.push(Entry {
        equation: "field equation: D psi = m psi".into(),
        degree: None,
        tol,
        residual: vec_max_abs(&diff),
        lhs: spinor_string(&dslash),
        rhs: spinor_string(&rhs),
    });

    // Key identity per grade: Σ_a (e^a·B_a)_q = (dH C)_q − m C_q, and the
    // conditional eigenform statement it implies wherever the left side
    // vanishes.
    let mut clifford_sum = Multivector::<Complex64>::zero(sig);
    for (a, b) in data.coupled.iter().enumerate() {
        let ea = Multivector::<Complex64>::coframe(sig, a)?;
        clifford_sum = clifford_sum.try_add(&ea.try_mul(b)?)?;
    }
    for &q in degrees {
        let lhs = clifford_sum.grade(q)?;
        let rhs = data
            .hodge_component(q as isize)?
            .try_sub(&data.phi.grade(q)?.scale(&m))?;
        out.push(Entry {
            equation: "key identity: sum_a (e^a B_a)_q = (dH C)_q - m C_q".into(),
            degree: Some(q),
            tol,
            residual: mv_max_abs(&lhs.try_sub(&rhs)?),
            lhs: mv_string(&lhs),
            rhs: mv_string(&rhs),
        });
        if mv_max_abs(&lhs) <= tol {
            out.push(Entry {
                equation: "eigenform when the key constraint vanishes: (dH C)_q = m C_q".into(),
                degree: Some(q),
                tol,
                residual: mv_max_abs(&rhs),
                lhs: mv_string(&data.hodge_component(q as isize)?),
                rhs: mv_string(&data.phi.grade(q)?.scale(&m)),
            });
        }
    }

    // Mass-ladder pair per degree.
    for &p in degrees {
        let pi = p as isize;
        let two = Complex64::new(2.0, 0.0);

        // Ascending: (2−Δ₋)d C_p = m_d C_{p+1} − Δ₋[m C_{p+1}] − Δ₋[δ C_{p+2}].
        let d_p = data.d_of(pi)?;
        let lhs = d_p
            .scale(&two)
            .try_sub(&delta_pm(&d_p, p, class, eps, Pm::Minus)?)?;
        let phi_up = data.phi_part(pi + 1)?;
        let m_d = mass_d_coefficient(m, p, class);
        let rhs = phi_up
            .scale(&m_d)
            .try_sub(&delta_pm(&phi_up.scale(&m), p, class, eps, Pm::Minus)?)?
            .try_sub(&delta_pm(&data.delta_of(pi + 2)?, p, class, eps, Pm::Minus)?)?;
        out.push(Entry {
            equation: "ascending mass ladder: (2 - Delta_minus) d C_p = m_d C_{p+1} \
                       - Delta_minus[m C_{p+1}] - Delta_minus[delta C_{p+2}]"
                .into(),
            degree: Some(p),
            tol,
            residual: mv_max_abs(&lhs.try_sub(&rhs)?),
            lhs: mv_string(&lhs),
            rhs: mv_string(&rhs),
        });

        // Descending: −(2−Δ₊)δ C_p = m_δ C_{p−1} − Δ₊[m C_{p−1}] + Δ₊[d C_{p−2}].
        let del_p = data.delta_of(pi)?;
        let lhs = del_p
            .scale(&two)
            .try_sub(&delta_pm(&del_p, p, class, eps, Pm::Plus)?)?
            .neg();
        let phi_dn = data.phi_part(pi - 1)?;
        let m_del = mass_delta_coefficient(m, p, class);
        let rhs = phi_dn
            .scale(&m_del)
            .try_sub(&delta_pm(&phi_dn.scale(&m), p, class, eps, Pm::Plus)?)?
            .try_add(&delta_pm(&data.d_of(pi - 2)?, p, class, eps, Pm::Plus)?)?;
        out.push(Entry {
            equation: "descending mass ladder: -(2 - Delta_plus) delta C_p = m_del C_{p-1} \
                       - Delta_plus[m C_{p-1}] + Delta_plus[d C_{p-2}]"
                .into(),
            degree: Some(p),
            tol,
            residual: mv_max_abs(&lhs.try_sub(&rhs)?),
            lhs: mv_string(&lhs),
            rhs: mv_string(&rhs),
        });
    }

    // Operator identity on a random multivector: Δ₊ + Δ₋ = 2·Id at both
    // degree parities.
    let mut probe_mv = Multivector::<Complex64>::zero(sig);
    for (mask, c) in probe.iter().enumerate() {
        probe_mv.set_coeff(mask, *c);
    }
    let mut worst = (f64::NEG_INFINITY, String::new());
    for p in [0usize, 1] {
        let sum = delta_pm(&probe_mv, p, class, eps, Pm::Plus)?
            .try_add(&delta_pm(&probe_mv, p, class, eps, Pm::Minus)?)?;
        let resid = mv_max_abs(&sum.try_sub(&probe_mv.scale(&Complex64::new(2.0, 0.0)))?);
        if resid > worst.0 {
            worst = (resid, mv_string(&sum));
        }
    }
    out.push(Entry {
        equation: "involution split: Delta_plus + Delta_minus = 2 Id".into(),
        degree: None,
        tol: 1e-12,
        residual: worst.0,
        lhs: worst.1,
        rhs: "2 x probe".into(),
    });

    let _ = n;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;

    fn minkowski_cfg(mass: Complex64, samples: usize) -> SuiteConfig {
        let sig = Signature::new(1, 3).unwrap();
        let mut cfg = SuiteConfig::new(Chart::flat(sig));
        cfg.mass = mass;
        cfg.samples = samples;
        cfg.seed = 41;
        cfg
    }

    #[test]
    fn massive_plane_wave_passes_in_minkowski_space() {
        let cfg = minkowski_cfg(Complex64::new(0.8, 0.0), 6);
        let report = run_dirac_suite(&cfg).expect("suite runs");
        assert!(report.passed, "{}", report.to_json());
        let names: Vec<&str> = report.checks.iter().map(|c| c.equation.as_str()).collect();
        for needle in [
            "on shell",
            "field equation",
            "key identity",
            "ascending mass ladder",
            "descending mass ladder",
            "involution split",
        ] {
            assert!(
                names.iter().any(|n| n.contains(needle)),
                "missing {needle}: {names:?}"
            );
        }
        for p in 0..=4 {
            assert!(report
                .checks
                .iter()
                .any(|c| c.degree == Some(p) && c.equation.contains("mass ladder")));
        }
    }

    #[test]
    fn imaginary_mass_conjugates_through_the_starred_pairing() {
        let cfg = minkowski_cfg(Complex64::new(0.0, 0.6), 5);
        let report = run_dirac_suite(&cfg).expect("suite runs");
        assert!(report.passed, "{}", report.to_json());
    }

    #[test]
    fn massless_wave_satisfies_the_weyl_alternative() {
        let cfg = minkowski_cfg(Complex64::new(0.0, 0.0), 6);
        let report = run_dirac_suite(&cfg).expect("suite runs");
        assert!(report.passed, "{}", report.to_json());
        let weyl: Vec<_> = report
            .checks
            .iter()
            .filter(|c| c.equation.contains("weyl alternative"))
            .collect();
        assert_eq!(weyl.len(), 5);
        assert!(weyl.iter().all(|c| c.passed));
    }

    #[test]
    fn mixed_mass_is_rejected() {
        let cfg = minkowski_cfg(Complex64::new(0.5, 0.5), 3);
        assert!(matches!(
            run_dirac_suite(&cfg),
            Err(Error::Config(msg)) if msg.contains("mass")
        ));
    }

    #[test]
    fn real_mass_needs_a_negative_axis() {
        let sig = Signature::new(3, 0).unwrap();
        let mut cfg = SuiteConfig::new(Chart::flat(sig));
        cfg.mass = Complex64::new(0.5, 0.0);
        cfg.seed = 2;
        assert!(matches!(
            run_dirac_suite(&cfg),
            Err(Error::Config(msg)) if msg.contains("wave covector")
        ));
    }

    #[test]
    fn reports_are_bit_identical_across_runs() {
        let cfg = minkowski_cfg(Complex64::new(0.8, 0.0), 3);
        let a = run_dirac_suite(&cfg).unwrap().to_json();
        let b = run_dirac_suite(&cfg).unwrap().to_json();
        assert_eq!(a, b);
    }
}
