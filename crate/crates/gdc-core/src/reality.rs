//! Reality conditions on bilinear coefficients and the i-prefix repair.
//!
//! For a pairing whose scalar involution is conjugation, the singled-bilinear
//! coefficients obey conj(s) = ε·s_𝒥(p)·s, where s_𝒥(p) is the sign of the
//! algebra involution on grade p: every grade-p coefficient is forced real
//! (sign +1) or purely imaginary (sign −1). With the canonical hermitian
//! normalization of conjugating intertwiners (ε = +1) this reduces to the two
//! floor-parity rules: the ξ-family constrains grade p to be imaginary when
//! ⌊p/2⌋ is odd, the ξη-family when ⌊p/2⌋ + p is odd. Products whose scalar
//! involution is the identity give no constraint: over ℝ the coefficients are
//! tautologically real; over ℂ they are unconstrained.

use crate::algebra::Multivector;
use crate::classify::ScalarField;
use crate::metric::{AdjointClass, SpinorMetric};
use crate::scalar::AdScalar;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// What the reality condition says about the grade-p coefficients of ψψ̄.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealityVerdict {
    Real,
    Imaginary,
    Unconstrained,
}

impl RealityVerdict {
    pub fn label(self) -> &'static str {
        match self {
            RealityVerdict::Real => "real",
            RealityVerdict::Imaginary => "imaginary",
            RealityVerdict::Unconstrained => "unconstrained",
        }
    }
}

/// Reality classification of one degree: the verdict and the prefix that
/// makes the current's coefficients real (i exactly when imaginary).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealityClass {
    pub p: usize,
    pub verdict: RealityVerdict,
    pub factor_is_i: bool,
}

impl RealityClass {
    pub fn factor(&self) -> Complex64 {
        if self.factor_is_i {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    }
}

/// Classify degree p for the pairing `metric` over `field`.
pub fn reality_classify(p: usize, metric: &SpinorMetric, field: ScalarField) -> RealityClass {
    if metric.class().conjugates() {
        // Derivation (symmetry + adjoint law, j_k = conj):
        //   conj(s_I) = ε (e^ξ_I ψ, ψ) = ε (ψ, (e^ξ_I)^𝒥 ψ) = ε s_𝒥(p) s_I.
        // This holds whenever the intertwiner conjugates scalars, for either
        // declared base field (real-algebra backends with complex entries
        // carry the conjugation as an ℝ-linear involution).
        let sign = metric.epsilon() * metric.class().grade_sign(p);
        if sign >= 0 {
            RealityClass {
                p,
                verdict: RealityVerdict::Real,
                factor_is_i: false,
            }
        } else {
            RealityClass {
                p,
                verdict: RealityVerdict::Imaginary,
                factor_is_i: true,
            }
        }
    } else if field == ScalarField::Real {
        RealityClass {
            p,
            verdict: RealityVerdict::Real,
            factor_is_i: false,
        }
    } else {
        RealityClass {
            p,
            verdict: RealityVerdict::Unconstrained,
            factor_is_i: false,
        }
    }
}

/// Classify every degree 0..=n at once.
pub fn reality_classes(metric: &SpinorMetric, field: ScalarField, n: usize) -> Vec<RealityClass> {
    (0..=n).map(|p| reality_classify(p, metric, field)).collect()
}

/// The floor-parity form of the constraint for ε = +1 pairings: does grade p
/// carry the i-prefix in the stated family? Lower rule for the ξ-family,
/// upper rule for the ξη-family.
pub fn parity_rule_says_imaginary(class: AdjointClass, p: usize) -> bool {
    match class.delta() {
        1 => (p / 2) % 2 == 1,
        _ => (p / 2 + p) % 2 == 1,
    }
}

/// Apply the classification's prefix to a homogeneous part, producing the
/// current: multiplication by i exactly when the verdict is imaginary, so the
/// result has all-real coefficients whenever a constraint applied.
pub fn apply_reality<T: AdScalar>(part: &Multivector<T>, rc: &RealityClass) -> Multivector<T> {
    if rc.factor_is_i {
        part.scale(&T::from_c(Complex64::new(0.0, 1.0)))
    } else {
        part.clone()
    }
}

/// Largest imaginary residue over the coefficients of a prefixed current;
/// zero (to tolerance) whenever the verdict constrained the degree.
pub fn realness_defect(current: &Multivector<Complex64>) -> f64 {
    current
        .coeffs()
        .iter()
        .map(|c| c.im.abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;
    use crate::fierz::fierz_parts;
    use crate::metric::{survey_classes, ClassOutcome};
    use crate::rep::GammaRep;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_spinor(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
        (0..d)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn parity_rules_match_the_sign_derivation() {
        // (−1)^{p(p−1)/2} = (−1)^{⌊p/2⌋} and the ξη analogue, for all p ≤ 8.
        for p in 0..=8 {
            let xi_sign = AdjointClass::XiStar.grade_sign(p);
            assert_eq!(xi_sign == -1, parity_rule_says_imaginary(AdjointClass::XiStar, p));
            let xieta_sign = AdjointClass::XiEtaStar.grade_sign(p);
            assert_eq!(
                xieta_sign == -1,
                parity_rule_says_imaginary(AdjointClass::XiEtaStar, p)
            );
        }
    }

    #[test]
    fn frozen_factor_sequences() {
        // ξ-family prefixes by degree: 1 1 i i 1 1 i i …
        let xi: Vec<bool> = (0..8)
            .map(|p| parity_rule_says_imaginary(AdjointClass::XiStar, p))
            .collect();
        assert_eq!(
            xi,
            [false, false, true, true, false, false, true, true]
        );
        // ξη-family: 1 i i 1 1 i i 1 …
        let xieta: Vec<bool> = (0..8)
            .map(|p| parity_rule_says_imaginary(AdjointClass::XiEtaStar, p))
            .collect();
        assert_eq!(
            xieta,
            [false, true, true, false, false, true, true, false]
        );
    }

    #[test]
    fn conjugation_oracle_on_complex_representations() {
        // Empirical check of the verdicts: singled-bilinear coefficients of
        // random spinors are genuinely all-real or all-imaginary per degree.
        for (pl, mi) in [(4usize, 1usize), (2, 0), (3, 1), (1, 2)] {
            let sig = Signature::new(pl, mi).unwrap();
            let rep = GammaRep::build(sig, ScalarField::Complex).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for (class, outcome) in survey_classes(&rep) {
                let ClassOutcome::Admissible(metric) = outcome else {
                    continue;
                };
                if !class.conjugates() {
                    continue;
                }
                for _ in 0..20 {
                    let psi = rand_spinor(&mut rng, rep.dim());
                    let parts = fierz_parts(&rep, &metric, &psi, &psi).unwrap();
                    for (p, part) in parts.iter().enumerate() {
                        let rc = reality_classify(p, &metric, ScalarField::Complex);
                        let scale = part
                            .coeffs()
                            .iter()
                            .map(|c| c.norm())
                            .fold(1.0f64, f64::max);
                        let (bad, want) = match rc.verdict {
                            RealityVerdict::Real => (
                                part.coeffs().iter().map(|c| c.im.abs()).fold(0.0, f64::max),
                                "real",
                            ),
                            RealityVerdict::Imaginary => (
                                part.coeffs().iter().map(|c| c.re.abs()).fold(0.0, f64::max),
                                "imaginary",
                            ),
                            RealityVerdict::Unconstrained => unreachable!("conj class"),
                        };
                        assert!(
                            bad / scale < 1e-12,
                            "Cl({pl},{mi}) {} grade {p} should be {want}, defect {bad:.3e}",
                            class.label()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn real_entry_backends_are_real_without_prefix() {
        let sig = Signature::new(3, 1).unwrap();
        let rep = GammaRep::build(sig, ScalarField::Real).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for (_, outcome) in survey_classes(&rep) {
            let ClassOutcome::Admissible(metric) = outcome else {
                continue;
            };
            let psi: Vec<Complex64> = (0..rep.dim())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
                .collect();
            let parts = fierz_parts(&rep, &metric, &psi, &psi).unwrap();
            for (p, part) in parts.iter().enumerate() {
                let rc = reality_classify(p, &metric, ScalarField::Real);
                assert_eq!(rc.verdict, RealityVerdict::Real);
                assert!(!rc.factor_is_i);
                let current = apply_reality(part, &rc);
                assert!(realness_defect(&current) < 1e-12);
            }
        }
    }

    #[test]
    fn prefix_repairs_imaginarity() {
        let sig = Signature::new(4, 1).unwrap();
        let rep = GammaRep::build(sig, ScalarField::Complex).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (class, outcome) in survey_classes(&rep) {
            let ClassOutcome::Admissible(metric) = outcome else {
                continue;
            };
            if !class.conjugates() {
                continue;
            }
            let psi = rand_spinor(&mut rng, rep.dim());
            let parts = fierz_parts(&rep, &metric, &psi, &psi).unwrap();
            for (p, part) in parts.iter().enumerate() {
                let rc = reality_classify(p, &metric, ScalarField::Complex);
                let current = apply_reality(part, &rc);
                let scale = current
                    .coeffs()
                    .iter()
                    .map(|c| c.norm())
                    .fold(1.0f64, f64::max);
                assert!(
                    realness_defect(&current) / scale < 1e-12,
                    "grade {p} of {} not repaired",
                    class.label()
                );
            }
        }
    }

    #[test]
    fn complex_plain_classes_are_unconstrained() {
        let sig = Signature::new(2, 1).unwrap();
        let rep = GammaRep::build(sig, ScalarField::Complex).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut saw_mixed_coefficient = false;
        for (class, outcome) in survey_classes(&rep) {
            let ClassOutcome::Admissible(metric) = outcome else {
                continue;
            };
            if class.conjugates() {
                continue;
            }
            let rc = reality_classify(1, &metric, ScalarField::Complex);
            assert_eq!(rc.verdict, RealityVerdict::Unconstrained);
            assert!(!rc.factor_is_i);
            let psi = rand_spinor(&mut rng, rep.dim());
            let parts = fierz_parts(&rep, &metric, &psi, &psi).unwrap();
            for part in &parts {
                for c in part.coeffs() {
                    if c.re.abs() > 1e-6 && c.im.abs() > 1e-6 {
                        saw_mixed_coefficient = true;
                    }
                }
            }
        }
        assert!(
            saw_mixed_coefficient,
            "expected some genuinely complex coefficient without a constraint"
        );
    }
}
