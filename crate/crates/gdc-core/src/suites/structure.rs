//! Structural suite: exact rational frame identities, the classification
//! dimension count against the idempotent-splitting oracle, regeneration of
//! both expectation-value tables from the operator oracle, Fierz
//! completeness and frame independence, and the bundle-projection operator
//! identities.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{grade_masks, Involution, Multivector, Signature};
use crate::classify::{classify, DivisionAlgebra, ScalarField, Simplicity};
use crate::currents::{build_expectation_table, table_from_operator_oracle, LambdaKind};
use crate::error::Result;
use crate::fierz::{
    fierz_parts, fierz_parts_in_coframe, mv_grade_distance, reconstruction_defect,
};
use crate::fields::{
    clifford_contraction, make_flat_twistor, make_killing, project_dirac_part,
    project_penrose_part, twistor_component,
};
use crate::geometry::{
    dirac_generic, penrose_generic, spinor_covariant_generic, SpinorField,
};
use crate::matrix::vec_max_abs;
use crate::metric::{build_spinor_metric, SpinorMetric};
use crate::oracle::count_primitive_idempotents;
use crate::rep::GammaRep;

use super::{
    collect_entries, complexify, mv_string, spinor_string, CheckRecord, Entry, ResidualReport,
    SuiteConfig, WorstSample,
};

type Rat = BigRational;
type RatMv = Multivector<Rat>;

fn rat(v: i64) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

fn random_rat_mv(sig: Signature, p: usize, rng: &mut ChaCha8Rng) -> RatMv {
    let mut mv = RatMv::zero(sig);
    for mask in grade_masks(sig, p) {
        mv.set_coeff(mask, rat(rng.gen_range(-9..=9)));
    }
    mv
}

fn exact_record(equation: &str, degree: Option<usize>, holds: bool, detail: String) -> CheckRecord {
    let residual = if holds { 0.0 } else { 1.0 };
    CheckRecord {
        equation: equation.into(),
        degree,
        samples: 1,
        max_residual: residual,
        mean_residual: residual,
        tolerance: 0.0,
        passed: holds,
        worst: Some(WorstSample {
            x: Vec::new(),
            lhs: detail,
            rhs: "exact equality".into(),
        }),
    }
}

/// Run every structural check for the configured algebra and chart.
pub fn run_structure_suite(cfg: &SuiteConfig) -> Result<ResidualReport> {
    let sig = cfg.chart.sig();
    let rep = GammaRep::build(sig, cfg.field)?;
    let metric = build_spinor_metric(&rep, cfg.class)?;
    let mut report = ResidualReport::skeleton("structure", cfg, metric.epsilon());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    exact_identities(sig, cfg, &mut rng, &mut report)?;
    dimension_count_records(&mut report);
    table_records(sig, &mut report)?;
    oracle_record(sig, cfg, &mut report)?;
    numeric_identities(cfg, &rep, &metric, &mut rng, &mut report)?;
    factorization_records(cfg, &rep, &mut rng, &mut report)?;
    Ok(report)
}

/// Exact rational identities of the frame: contraction to the dimension,
/// the sandwich identity per degree, and blade completeness.
fn exact_identities(
    sig: Signature,
    cfg: &SuiteConfig,
    rng: &mut ChaCha8Rng,
    report: &mut ResidualReport,
) -> Result<()> {
    let n = sig.dim();

    // Σ_a e^a e_a = n.
    let mut sum = RatMv::zero(sig);
    for a in 0..n {
        let up = RatMv::coframe(sig, a)?;
        let low = RatMv::frame_lowered(sig, a)?;
        sum = sum.try_add(&up.try_mul(&low)?)?;
    }
    let mut expect = RatMv::zero(sig);
    expect.set_coeff(0, rat(n as i64));
    let holds = sum.try_sub(&expect)?.is_zero();
    report.push(exact_record(
        "frame contraction: sum_a e^a e_a = n",
        None,
        holds,
        format!("scalar part {}", sum.scalar_part()),
    ));

    // Σ_a e^a α_p e_a = (n−2p) α_p^η for a random rational α_p per degree.
    for &p in &cfg.degree_list() {
        let alpha = random_rat_mv(sig, p, rng);
        let mut sandwich = RatMv::zero(sig);
        for a in 0..n {
            let up = RatMv::coframe(sig, a)?;
            let low = RatMv::frame_lowered(sig, a)?;
            sandwich = sandwich.try_add(&up.try_mul(&alpha)?.try_mul(&low)?)?;
        }
        let coef = rat(n as i64 - 2 * p as i64);
        let expect = alpha.involution(Involution::Eta)?.scale(&coef);
        let holds = sandwich.try_sub(&expect)?.is_zero();
        report.push(exact_record(
            "frame sandwich: sum_a e^a y_p e_a = (n-2p) y_p^eta",
            Some(p),
            holds,
            format!("checked on a random rational degree-{p} element"),
        ));
    }

    // Σ_I e^I e^ξ_I = 2ⁿ over all 2ⁿ basis blades, with
    // e^ξ_I = (−1)^{p(p−1)/2} (Π_i g_ii) e^I.
    let mut total = RatMv::zero(sig);
    for mask in 0..sig.blade_count() {
        let blade = RatMv::basis(sig, mask)?;
        let p = mask.count_ones() as usize;
        let mut sign = if (p * (p.saturating_sub(1)) / 2) % 2 == 0 {
            1i64
        } else {
            -1i64
        };
        for a in 0..n {
            if mask & (1 << a) != 0 {
                sign *= sig.metric_sign(a) as i64;
            }
        }
        let dual = blade.scale(&rat(sign));
        total = total.try_add(&blade.try_mul(&dual)?)?;
    }
    let mut expect = RatMv::zero(sig);
    expect.set_coeff(0, rat(sig.blade_count() as i64));
    let holds = total.try_sub(&expect)?.is_zero();
    report.push(exact_record(
        "blade completeness: sum_I e^I e^xi_I = 2^n",
        None,
        holds,
        format!("scalar part {}", total.scalar_part()),
    ));
    Ok(())
}

/// The quaternionic semisimple dimension count 2·4·N² = 2ⁿ, checked on the
/// two signatures with plus-minus difference ≡ 5 (mod 8) within dimension 5.
fn dimension_count_records(report: &mut ResidualReport) {
    for (plus, minus) in [(0usize, 3usize), (1, 4)] {
        let sig = Signature::new(plus, minus).expect("small signature");
        let class = classify(sig, ScalarField::Real);
        let n = sig.dim();
        let count_holds = class.division == DivisionAlgebra::H
            && class.simplicity == Simplicity::Semisimple
            && 2 * 4 * class.spinor_dim_over_d * class.spinor_dim_over_d == 1usize << n
            && class.algebra_dim == 1usize << n;
        report.push(exact_record(
            "dimension count: 2 x dim_R(H) x N^2 = 2^n for difference 5 (mod 8)",
            None,
            count_holds,
            format!(
                "Cl({plus},{minus}): division {}, {} , N = {}",
                class.division.label(),
                if class.is_simple() {
                    "simple"
                } else {
                    "semisimple"
                },
                class.spinor_dim_over_d
            ),
        ));
    }
}

/// Regenerate both expectation-value tables from the operator oracle and
/// compare cell-for-cell, exclusions included.
fn table_records(sig: Signature, report: &mut ResidualReport) -> Result<()> {
    for (kind, lambda) in [
        (LambdaKind::Real, Complex64::new(0.5, 0.0)),
        (LambdaKind::Imaginary, Complex64::new(0.0, 0.5)),
    ] {
        let closed_form = build_expectation_table(kind);
        let from_oracle = table_from_operator_oracle(kind, lambda, sig)?;
        let mut diffs = 0usize;
        for (a, b) in closed_form.rows.iter().zip(from_oracle.rows.iter()) {
            if a != b {
                diffs += 1;
            }
        }
        let excluded = closed_form.rows.iter().filter(|r| r.excluded).count();
        let holds = diffs == 0 && closed_form.rows.len() == from_oracle.rows.len();
        report.push(exact_record(
            match kind {
                LambdaKind::Real => {
                    "expectation table (real Killing number) regenerated from the operator oracle"
                }
                LambdaKind::Imaginary => {
                    "expectation table (imaginary Killing number) regenerated from the operator \
                     oracle"
                }
            },
            None,
            holds,
            format!("8 rows compared, {excluded} excluded, {diffs} differ"),
        ));
    }
    Ok(())
}

/// Compare the closed-form classification against the idempotent-splitting
/// oracle for this signature's real algebra (oracle cost caps it at n ≤ 5).
fn oracle_record(sig: Signature, cfg: &SuiteConfig, report: &mut ResidualReport) -> Result<()> {
    if sig.dim() > 5 {
        return Ok(());
    }
    let class = classify(sig, ScalarField::Real);
    let outcome = count_primitive_idempotents(sig, cfg.seed)?;
    let count_ok = outcome.idempotent_count == class.primitive_idempotent_count();
    let corners_ok = outcome
        .corner_dims
        .iter()
        .all(|&d| d == class.division.real_dim());
    report.push(exact_record(
        "classification matches the idempotent-splitting oracle (real algebra)",
        None,
        count_ok && corners_ok,
        format!(
            "oracle: {} idempotents, corners {:?}; classification: {} over {}",
            outcome.idempotent_count,
            outcome.corner_dims,
            class.primitive_idempotent_count(),
            class.division.label()
        ),
    ));
    Ok(())
}

/// Per-sample numeric identities: Fierz completeness, coframe independence,
/// and the bundle projection identities on random data.
fn numeric_identities(
    cfg: &SuiteConfig,
    rep: &GammaRep,
    metric: &SpinorMetric,
    rng: &mut ChaCha8Rng,
    report: &mut ResidualReport,
) -> Result<()> {
    let sig = rep.sig();
    let n = sig.dim();
    let d = rep.dim();

    struct Input {
        psi: Vec<Complex64>,
        phi: Vec<Complex64>,
        coframe: Vec<Multivector<f64>>,
        xt: Multivector<Complex64>,
        section: Vec<Vec<Complex64>>,
    }

    let random_spinor = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..d)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    };
    let mut inputs: Vec<Input> = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        let psi = random_spinor(rng);
        let phi = random_spinor(rng);
        // Random invertible coframe: resample until the leg matrix is
        // comfortably nonsingular.
        let coframe = loop {
            let legs: Vec<Multivector<f64>> = (0..n)
                .map(|_| {
                    let mut leg = Multivector::<f64>::zero(sig);
                    for a in 0..n {
                        leg.set_coeff(1 << a, rng.gen_range(-1.0..1.0));
                    }
                    leg
                })
                .collect();
            let mat: Vec<Vec<f64>> = legs
                .iter()
                .map(|l| (0..n).map(|a| *l.coeff(1 << a)).collect())
                .collect();
            if det_abs(&mat) > 0.1 {
                break legs;
            }
        };
        let mut xt = Multivector::<Complex64>::zero(sig);
        for a in 0..n {
            xt.set_coeff(
                1 << a,
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
        }
        let section: Vec<Vec<Complex64>> = (0..n).map(|_| random_spinor(rng)).collect();
        inputs.push(Input {
            psi,
            phi,
            coframe,
            xt,
            section,
        });
    }

    let rows: Vec<(Vec<f64>, Result<Vec<Entry>>)> = inputs
        .par_iter()
        .map(|input| {
            let entries = (|| -> Result<Vec<Entry>> {
                let mut out = Vec::new();

                // Fierz completeness: the inhomogeneous bilinear reproduces
                // the rank-one operator ψ·φ̄.
                let defect = reconstruction_defect(rep, metric, &input.psi, &input.phi)?;
                out.push(Entry {
                    equation: "fierz completeness: matrix of (psi phibar) equals the rank-one \
                               operator"
                        .into(),
                    degree: None,
                    tol: 1e-11,
                    residual: defect,
                    lhs: "assembled from graded parts".into(),
                    rhs: "psi (dual phi)^T".into(),
                });

                // Coframe independence of every graded part.
                let ortho = fierz_parts(rep, metric, &input.psi, &input.phi)?;
                let skew = fierz_parts_in_coframe(
                    rep,
                    metric,
                    &input.psi,
                    &input.phi,
                    &input.coframe,
                )?;
                let mut worst = (f64::NEG_INFINITY, 0usize);
                for p in 0..=n {
                    let dist = mv_grade_distance(&ortho[p], &skew[p], p);
                    if dist > worst.0 {
                        worst = (dist, p);
                    }
                }
                out.push(Entry {
                    equation: "frame independence: graded parts agree between the orthonormal \
                               and a random coframe"
                        .into(),
                    degree: None,
                    tol: 1e-10,
                    residual: worst.0,
                    lhs: format!("worst grade {}", worst.1),
                    rhs: mv_string(&ortho[worst.1]),
                })
                ;

                // μ̂(X̃ ⊗ ψ) = X̃·ψ on a rank-one section.
                let rank_one: Vec<Vec<Complex64>> = (0..n)
                    .map(|a| {
                        let c = *input.xt.coeff(1 << a);
                        input.psi.iter().map(|v| v * c).collect()
                    })
                    .collect();
                let mu = clifford_contraction(rep, &rank_one);
                let direct = rep.apply_mv(&input.xt, &input.psi)?;
                let diff: Vec<Complex64> =
                    mu.iter().zip(direct.iter()).map(|(l, r)| l - r).collect();
                out.push(Entry {
                    equation: "contraction on rank-one sections: mu(x tensor psi) = x psi".into(),
                    degree: None,
                    tol: 1e-11,
                    residual: vec_max_abs(&diff),
                    lhs: spinor_string(&mu),
                    rhs: spinor_string(&direct),
                });

                // Projection split on a random section: pr₁ + pr₂ = Id,
                // μ̂∘pr₂ = 0, μ̂∘pr₁ = μ̂.
                let pr1 = project_dirac_part(rep, &input.section);
                let pr2 = project_penrose_part(rep, &input.section);
                let mut split = f64::NEG_INFINITY;
                for a in 0..n {
                    let sum: Vec<Complex64> = pr1[a]
                        .iter()
                        .zip(pr2[a].iter())
                        .zip(input.section[a].iter())
                        .map(|((x, y), s)| x + y - s)
                        .collect();
                    split = split.max(vec_max_abs(&sum));
                }
                out.push(Entry {
                    equation: "projection split: pr1 + pr2 = Id on sections".into(),
                    degree: None,
                    tol: 1e-11,
                    residual: split,
                    lhs: "pr1(s) + pr2(s)".into(),
                    rhs: "s".into(),
                });
                let mu_pr2 = clifford_contraction(rep, &pr2);
                out.push(Entry {
                    equation: "contraction annihilates the complement: mu(pr2(s)) = 0".into(),
                    degree: None,
                    tol: 1e-11,
                    residual: vec_max_abs(&mu_pr2),
                    lhs: spinor_string(&mu_pr2),
                    rhs: "0".into(),
                });
                let mu_pr1 = clifford_contraction(rep, &pr1);
                let mu_all = clifford_contraction(rep, &input.section);
                let diff: Vec<Complex64> = mu_pr1
                    .iter()
                    .zip(mu_all.iter())
                    .map(|(l, r)| l - r)
                    .collect();
                out.push(Entry {
                    equation: "contraction factors through pr1: mu(pr1(s)) = mu(s)".into(),
                    degree: None,
                    tol: 1e-11,
                    residual: vec_max_abs(&diff),
                    lhs: spinor_string(&mu_pr1),
                    rhs: spinor_string(&mu_all),
                });

                // Trace-free twistor components: Σ_a e^a·ψ̂_a = 0.
                let mut traced = vec![Complex64::new(0.0, 0.0); d];
                for a in 0..n {
                    let hat = twistor_component(rep, &input.xt, &input.psi, a)?;
                    for (o, v) in traced.iter_mut().zip(rep.apply_blade(1 << a, &hat)) {
                        *o += v;
                    }
                }
                out.push(Entry {
                    equation: "twistor components are trace-free: sum_a e^a psi_hat_a = 0".into(),
                    degree: None,
                    tol: 1e-11,
                    residual: vec_max_abs(&traced),
                    lhs: spinor_string(&traced),
                    rhs: "0".into(),
                });

                Ok(out)
            })();
            (Vec::new(), entries)
        })
        .collect();
    collect_entries(report, rows)
}

fn det_abs(mat: &[Vec<f64>]) -> f64 {
    let n = mat.len();
    let mut m: Vec<Vec<f64>> = mat.to_vec();
    let mut det = 1.0f64;
    for col in 0..n {
        let (pivot, _) = m
            .iter()
            .enumerate()
            .skip(col)
            .map(|(i, row)| (i, row[col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if m[pivot][col].abs() < 1e-12 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det.abs()
}

/// The operator factorizations through the projections, on an actual field
/// over the configured chart: μ̂∘pr₁∘∇ = D̸ and pr₂∘∇ is the Penrose part.
fn factorization_records(
    cfg: &SuiteConfig,
    rep: &GammaRep,
    rng: &mut ChaCha8Rng,
    report: &mut ResidualReport,
) -> Result<()> {
    let d = rep.dim();
    let random_spinor = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..d)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    };

    // Transport-backed fields are expensive; cap the point count on spheres.
    let count = if cfg.chart.is_flat() {
        cfg.samples.min(10)
    } else {
        cfg.samples.min(4)
    };

    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        points.push(cfg.chart.sample(rng));
    }
    let (worst_dirac, worst_penrose) = if cfg.chart.is_flat() {
        let psi0 = random_spinor(rng);
        let psi1 = random_spinor(rng);
        let field = make_flat_twistor(cfg.chart, rep, &psi0, &psi1)?;
        factorization_worst(cfg, rep, &field, &points)?
    } else {
        let base = cfg.chart.sample(rng);
        let seed = random_spinor(rng);
        let field = make_killing(cfg.chart, rep, cfg.lambda, &base, &seed)?;
        factorization_worst(cfg, rep, &field, &points)?
    };

    for (equation, residual) in [
        (
            "operator factorization: mu(pr1(grad psi)) equals the dirac operator",
            worst_dirac,
        ),
        (
            "operator factorization: pr2(grad psi) equals the penrose operator",
            worst_penrose,
        ),
    ] {
        report.push(CheckRecord {
            equation: equation.into(),
            degree: None,
            samples: count,
            max_residual: residual,
            mean_residual: residual,
            tolerance: 1e-11,
            passed: residual <= 1e-11,
            worst: None,
        });
    }
    Ok(())
}

fn factorization_worst<F: SpinorField>(
    cfg: &SuiteConfig,
    rep: &GammaRep,
    field: &F,
    points: &[Vec<f64>],
) -> Result<(f64, f64)> {
    let mut worst_dirac = 0.0f64;
    let mut worst_penrose = 0.0f64;
    for x in points {
        let xc = complexify(x);
        let grads = spinor_covariant_generic(cfg.chart, rep, field, &xc)?;

        let pr1 = project_dirac_part(rep, &grads);
        let mu_pr1 = clifford_contraction(rep, &pr1);
        let dirac = dirac_generic(cfg.chart, rep, field, &xc)?;
        let diff: Vec<Complex64> = mu_pr1
            .iter()
            .zip(dirac.iter())
            .map(|(l, r)| l - r)
            .collect();
        worst_dirac = worst_dirac.max(vec_max_abs(&diff));

        let pr2 = project_penrose_part(rep, &grads);
        let penrose = penrose_generic(cfg.chart, rep, field, &xc)?;
        for (own, reference) in pr2.iter().zip(penrose.iter()) {
            let diff: Vec<Complex64> = own
                .iter()
                .zip(reference.iter())
                .map(|(l, r)| l - r)
                .collect();
            worst_penrose = worst_penrose.max(vec_max_abs(&diff));
        }
    }
    Ok((worst_dirac, worst_penrose))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;

    #[test]
    fn structure_suite_passes_on_the_sphere_algebra() {
        let mut cfg = SuiteConfig::new(Chart::Sphere2);
        cfg.samples = 8;
        cfg.seed = 3;
        let report = run_structure_suite(&cfg).expect("suite runs");
        assert!(report.passed, "{}", report.to_json());
        let names: Vec<&str> = report.checks.iter().map(|c| c.equation.as_str()).collect();
        for needle in [
            "frame contraction",
            "frame sandwich",
            "blade completeness",
            "dimension count",
            "expectation table (real",
            "expectation table (imaginary",
            "idempotent-splitting oracle",
            "fierz completeness",
            "frame independence",
            "rank-one",
            "projection split",
            "annihilates",
            "factors through",
            "trace-free",
            "operator factorization",
        ] {
            assert!(
                names.iter().any(|n| n.contains(needle)),
                "missing {needle}: {names:?}"
            );
        }
    }

    #[test]
    fn structure_suite_passes_on_minkowski_space() {
        let sig = Signature::new(1, 3).unwrap();
        let mut cfg = SuiteConfig::new(Chart::flat(sig));
        cfg.samples = 8;
        cfg.seed = 9;
        let report = run_structure_suite(&cfg).expect("suite runs");
        assert!(report.passed, "{}", report.to_json());
    }

    #[test]
    fn reports_are_bit_identical_across_runs() {
        let mut cfg = SuiteConfig::new(Chart::Sphere2);
        cfg.samples = 4;
        cfg.seed = 3;
        let a = run_structure_suite(&cfg).unwrap().to_json();
        let b = run_structure_suite(&cfg).unwrap().to_json();
        assert_eq!(a, b);
    }
}
