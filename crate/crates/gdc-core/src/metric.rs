//! Spinor inner products (admissible pairings) attached to an algebra
//! involution.
//!
//! For each adjoint class 𝒥 the intertwiner C satisfies C a^𝒥 C⁻¹ = M(a)^{j_k T}
//! on generators, concretely C A_a = δ(𝒥) γᵃ C with A_a = (γᵃ)ᵀ for the plain
//! classes and (γᵃ)† for the conjugating ones, where δ(𝒥) = +1 when 𝒥 fixes
//! vectors (ξ-family) and −1 when it negates them (ξη-family). The induced
//! pairing (ψ, φ) = ψ^{j_k T} C⁻¹ φ is j_k-linear in the first slot, linear in
//! the second, and satisfies (ψ, φ) = ε (φ, ψ)^{j_k} with ε read off from
//! Cᵀ = ε C (or its conjugate analogue).

use crate::algebra::{Involution, Multivector, Signature};
use crate::classify::ScalarField;
use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::rep::GammaRep;
use crate::scalar::{AdScalar, Scalar};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Scalar involution induced on coefficients: identity or conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalarInvolution {
    Id,
    Conj,
}

impl ScalarInvolution {
    pub fn apply(self, v: Complex64) -> Complex64 {
        match self {
            ScalarInvolution::Id => v,
            ScalarInvolution::Conj => v.conj(),
        }
    }

    pub fn apply_generic<T: Scalar>(self, v: &T) -> T {
        match self {
            ScalarInvolution::Id => v.clone(),
            ScalarInvolution::Conj => v.conj(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ScalarInvolution::Id => "id",
            ScalarInvolution::Conj => "conj",
        }
    }
}

/// The four adjoint involution classes that admit spinor pairings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdjointClass {
    Xi,
    XiEta,
    XiStar,
    XiEtaStar,
}

impl AdjointClass {
    pub const ALL: [AdjointClass; 4] = [
        AdjointClass::Xi,
        AdjointClass::XiEta,
        AdjointClass::XiStar,
        AdjointClass::XiEtaStar,
    ];

    /// δ(𝒥): the sign with which 𝒥 acts on the coframe, (e^a)^𝒥 = δ e^a.
    pub fn delta(self) -> i32 {
        match self {
            AdjointClass::Xi | AdjointClass::XiStar => 1,
            AdjointClass::XiEta | AdjointClass::XiEtaStar => -1,
        }
    }

    /// Scalar involution j_k induced on the base field.
    pub fn scalar_involution(self) -> ScalarInvolution {
        match self {
            AdjointClass::Xi | AdjointClass::XiEta => ScalarInvolution::Id,
            AdjointClass::XiStar | AdjointClass::XiEtaStar => ScalarInvolution::Conj,
        }
    }

    /// The algebra involution realizing this class.
    pub fn algebra_involution(self) -> Involution {
        match self {
            AdjointClass::Xi => Involution::Xi,
            AdjointClass::XiEta => Involution::XiEta,
            AdjointClass::XiStar => Involution::XiConj,
            AdjointClass::XiEtaStar => Involution::XiEtaConj,
        }
    }

    pub fn conjugates(self) -> bool {
        matches!(self, AdjointClass::XiStar | AdjointClass::XiEtaStar)
    }

    /// Sign of 𝒥 on a grade-q blade (excluding any scalar conjugation).
    pub fn grade_sign(self, q: usize) -> i32 {
        self.algebra_involution().grade_sign(q)
    }

    pub fn label(self) -> &'static str {
        match self {
            AdjointClass::Xi => "xi",
            AdjointClass::XiEta => "xieta",
            AdjointClass::XiStar => "xistar",
            AdjointClass::XiEtaStar => "xietastar",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "xi" => Some(AdjointClass::Xi),
            "xieta" | "xi_eta" => Some(AdjointClass::XiEta),
            "xistar" | "xi_star" | "xiconj" => Some(AdjointClass::XiStar),
            "xietastar" | "xi_eta_star" | "xietaconj" => Some(AdjointClass::XiEtaStar),
            _ => None,
        }
    }
}

/// An admissible spinor pairing for one adjoint class on one representation.
///
/// The Gram matrix of the pairing on the standard basis is exactly C⁻¹:
/// (b_i, b_j) = C⁻¹_{ij}.
pub struct SpinorMetric {
    class: AdjointClass,
    epsilon: i32,
    c: CMat,
    g: CMat,
    d: usize,
}

impl SpinorMetric {
    pub fn class(&self) -> AdjointClass {
        self.class
    }

    /// Symmetry sign: (ψ, φ) = ε (φ, ψ)^{j_k}.
    pub fn epsilon(&self) -> i32 {
        self.epsilon
    }

    pub fn intertwiner(&self) -> &CMat {
        &self.c
    }

    /// Gram matrix of the pairing, G = C⁻¹.
    pub fn gram(&self) -> &CMat {
        &self.g
    }

    pub fn scalar_involution(&self) -> ScalarInvolution {
        self.class.scalar_involution()
    }

    /// (φ, ψ) = φ^{j_k T} G ψ: j_k-linear in the first slot, linear in the second.
    pub fn inner<T: AdScalar>(&self, phi: &[T], psi: &[T]) -> T {
        let jk = self.class.scalar_involution();
        let mut acc = T::zero();
        for i in 0..self.d {
            let fi = jk.apply_generic(&phi[i]);
            for j in 0..self.d {
                let gij = self.g.get(i, j);
                if gij == Complex64::ZERO {
                    continue;
                }
                acc = acc.add(&fi.mul(&T::from_c(gij)).mul(&psi[j]));
            }
        }
        acc
    }

    /// Dual (row) spinor ψ̄ = ψ^{j_k T} G, so that (φ, ψ) = φ̄ ψ ... with the
    /// first slot dualized: ψ̄ φ = (ψ, φ).
    pub fn dual<T: AdScalar>(&self, psi: &[T]) -> Vec<T> {
        let jk = self.class.scalar_involution();
        (0..self.d)
            .map(|j| {
                let mut acc = T::zero();
                for i in 0..self.d {
                    let gij = self.g.get(i, j);
                    if gij == Complex64::ZERO {
                        continue;
                    }
                    acc = acc.add(&jk.apply_generic(&psi[i]).mul(&T::from_c(gij)));
                }
                acc
            })
            .collect()
    }
}

/// Solve for the intertwiner of `class` on `rep`; classified errors for
/// structurally inadmissible combinations.
pub fn build_spinor_metric(rep: &GammaRep, class: AdjointClass) -> Result<SpinorMetric> {
    if class.conjugates() && rep.field() == ScalarField::Real && rep.real_entries() {
        // On a real-entry backend conjugation is invisible: the starred
        // classes coincide with the plain ones and are not separate data.
        return Err(Error::ConjClassOnRealAlgebra {
            class: class.label().into(),
            plus: rep.sig().plus(),
            minus: rep.sig().minus(),
        });
    }
    let d = rep.dim();
    let delta = Complex64::new(class.delta() as f64, 0.0);
    // Stack the equations C A_a - δ γᵃ C = 0 over all generators, where
    // A_a = (γᵃ)ᵀ for plain classes and (γᵃ)† for conjugating ones.
    let n = rep.sig().dim();
    let mut system = CMat::zeros(n * d * d, d * d);
    for a in 0..n {
        let g = rep.gamma(a);
        let rhs = match class.scalar_involution() {
            ScalarInvolution::Id => g.transpose(),
            ScalarInvolution::Conj => g.adjoint(),
        };
        for i in 0..d {
            for j in 0..d {
                let row = a * d * d + i * d + j;
                for k in 0..d {
                    // (C A)_{ij} = Σ_k C_{ik} A_{kj}
                    let cur = system.get(row, i * d + k);
                    system.set(row, i * d + k, cur + rhs.get(k, j));
                    // (γ C)_{ij} = Σ_k γ_{ik} C_{kj}
                    let cur = system.get(row, k * d + j);
                    system.set(row, k * d + j, cur - delta * g.get(i, k));
                }
            }
        }
    }
    let ns = system.nullspace(1e-10);
    match ns.len() {
        0 => Err(Error::InadmissibleClass {
            class: class.label().into(),
            plus: rep.sig().plus(),
            minus: rep.sig().minus(),
            field: rep.field().label().into(),
        }),
        1 => {
            let mut c = CMat::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    c.set(i, j, ns[0][i * d + j]);
                }
            }
            let c = normalize_intertwiner(c, class)?;
            let epsilon = read_epsilon(&c, class)?;
            let g = c.inverse()?;
            Ok(SpinorMetric {
                class,
                epsilon,
                c,
                g,
                d,
            })
        }
        dim => Err(Error::IntertwinerDegenerate {
            class: class.label().into(),
            dim,
        }),
    }
}

/// Normalization policy: conjugating classes are rescaled by a phase so that
/// C is hermitian with a positive leading entry (always possible because
/// C† = μ C with |μ| = 1), making ε = +1 canonical; plain classes are scaled
/// so the first nonzero entry is 1.
fn normalize_intertwiner(c: CMat, class: AdjointClass) -> Result<CMat> {
    let d = c.rows();
    let lead = (0..d * d)
        .map(|k| (k / d, k % d))
        .find(|&(i, j)| c.get(i, j).norm() > 1e-10 * c.max_abs())
        .ok_or_else(|| Error::Internal("intertwiner is numerically zero".into()))?;
    match class.scalar_involution() {
        ScalarInvolution::Id => {
            let pivot = c.get(lead.0, lead.1);
            Ok(c.scale(Complex64::ONE / pivot))
        }
        ScalarInvolution::Conj => {
            // C† = μ C with |μ| = 1; multiplying C by e^{iθ} maps μ → μ e^{2iθ},
            // so θ = arg(μ)/2 makes the result hermitian.
            let ct = c.adjoint();
            let mu = ct.get(lead.0, lead.1) / c.get(lead.0, lead.1);
            if (mu.norm() - 1.0).abs() > 1e-8 {
                return Err(Error::Internal(format!(
                    "conjugate-symmetry defect |mu| = {:.6}, expected 1",
                    mu.norm()
                )));
            }
            let theta = mu.arg() / 2.0;
            let mut h = c.scale(Complex64::from_polar(1.0, theta));
            // Flip overall sign so the leading diagonal-ish entry is positive
            // when real, for determinism.
            let pivot = h.get(lead.0, lead.1);
            if pivot.re < 0.0 {
                h = h.neg();
            }
            // Scale by a positive real so the pivot has unit magnitude.
            let mag = h.get(lead.0, lead.1).norm();
            Ok(h.scale(Complex64::new(1.0 / mag, 0.0)))
        }
    }
}

fn read_epsilon(c: &CMat, class: AdjointClass) -> Result<i32> {
    let probe = match class.scalar_involution() {
        ScalarInvolution::Id => c.transpose(),
        ScalarInvolution::Conj => c.adjoint(),
    };
    let plus = crate::matrix::frobenius_distance(&probe, c);
    let minus = crate::matrix::frobenius_distance(&probe, &c.neg());
    let scale = c.max_abs().max(1.0);
    if plus < 1e-8 * scale && minus > 1e-4 * scale {
        Ok(1)
    } else if minus < 1e-8 * scale && plus > 1e-4 * scale {
        Ok(-1)
    } else {
        Err(Error::Internal(format!(
            "intertwiner symmetry is ambiguous (sym defect {plus:.3e}, antisym defect {minus:.3e})"
        )))
    }
}

/// Verify the adjoint law C M(a^𝒥) C⁻¹ = M(a)^{j_k T} on a multivector.
pub fn adjoint_law_defect(
    rep: &GammaRep,
    metric: &SpinorMetric,
    a: &Multivector<Complex64>,
) -> Result<f64> {
    let inv = metric.class.algebra_involution();
    let a_j = a.involution(inv)?;
    let lhs = metric
        .c
        .matmul(&rep.matrix_of(&a_j)?)
        .matmul(&metric.g);
    let m = rep.matrix_of(a)?;
    let rhs = match metric.class.scalar_involution() {
        ScalarInvolution::Id => m.transpose(),
        ScalarInvolution::Conj => m.adjoint(),
    };
    Ok(crate::matrix::frobenius_distance(&lhs, &rhs))
}

/// Admissible-pairing survey entry: either a metric or the classified reason
/// there is none.
pub enum ClassOutcome {
    Admissible(SpinorMetric),
    Inadmissible(Error),
}

/// Survey all four adjoint classes on a representation.
pub fn survey_classes(rep: &GammaRep) -> Vec<(AdjointClass, ClassOutcome)> {
    AdjointClass::ALL
        .iter()
        .map(|&class| {
            let outcome = match build_spinor_metric(rep, class) {
                Ok(m) => ClassOutcome::Admissible(m),
                Err(e) => ClassOutcome::Inadmissible(e),
            };
            (class, outcome)
        })
        .collect()
}

/// The data selecting one generalized current construction: a Killing number,
/// a form degree, a scalar involution j_c, and an adjoint class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DataSet {
    pub sig: (usize, usize),
    pub lambda: (f64, f64),
    pub degree: usize,
    pub j_c: ScalarInvolution,
    pub class: AdjointClass,
}

impl DataSet {
    pub fn new(
        sig: Signature,
        lambda: Complex64,
        degree: usize,
        j_c: ScalarInvolution,
        class: AdjointClass,
    ) -> Result<Self> {
        if lambda.re != 0.0 && lambda.im != 0.0 {
            return Err(Error::MixedKillingNumber {
                lambda: format!("{lambda}"),
            });
        }
        if degree > sig.dim() {
            return Err(Error::GradeOutOfRange {
                grade: degree,
                dim: sig.dim(),
            });
        }
        Ok(DataSet {
            sig: (sig.plus(), sig.minus()),
            lambda: (lambda.re, lambda.im),
            degree,
            j_c,
            class,
        })
    }

    pub fn lambda_c(&self) -> Complex64 {
        Complex64::new(self.lambda.0, self.lambda.1)
    }

    /// λ^{j_c}/λ ∈ {+1, −1}: +1 for real λ or j_c = id, −1 for imaginary λ
    /// under conjugation.
    pub fn lambda_ratio(&self) -> i32 {
        match self.j_c {
            ScalarInvolution::Id => 1,
            ScalarInvolution::Conj => {
                if self.lambda.1 == 0.0 {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::frobenius_distance;

    fn rep(p: usize, m: usize, field: ScalarField) -> GammaRep {
        GammaRep::build(Signature::new(p, m).unwrap(), field).unwrap()
    }

    #[test]
    fn frozen_euclidean_plane_intertwiners() {
        // Cl(2,0) with σ₃, σ₁: ξ fixes generators, so C intertwines γᵀ with γ;
        // both are symmetric, hence C = 1 works: ε = +1. For ξη the
        // intertwiner anticommutes with both generators: C ∝ iσ₂, ε = −1.
        let r = rep(2, 0, ScalarField::Real);
        let xi = build_spinor_metric(&r, AdjointClass::Xi).unwrap();
        assert_eq!(xi.epsilon(), 1);
        assert!(frobenius_distance(xi.intertwiner(), &CMat::identity(2)) < 1e-10);
        let xieta = build_spinor_metric(&r, AdjointClass::XiEta).unwrap();
        assert_eq!(xieta.epsilon(), -1);
        let expect = CMat::from_rows_re(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        assert!(frobenius_distance(xieta.intertwiner(), &expect) < 1e-10);
    }

    #[test]
    fn starred_classes_require_complex_backend() {
        let r = rep(2, 0, ScalarField::Real);
        assert!(matches!(
            build_spinor_metric(&r, AdjointClass::XiStar),
            Err(Error::ConjClassOnRealAlgebra { .. })
        ));
        let rc = rep(2, 0, ScalarField::Complex);
        let m = build_spinor_metric(&rc, AdjointClass::XiStar).unwrap();
        assert_eq!(m.epsilon(), 1, "hermitian normalization fixes epsilon = +1");
    }

    #[test]
    fn adjoint_law_holds_on_all_blades() {
        for (p, q, field) in [
            (3usize, 0usize, ScalarField::Complex),
            (1, 3, ScalarField::Complex),
            (2, 0, ScalarField::Real),
            (1, 1, ScalarField::Real),
        ] {
            let r = rep(p, q, field);
            for (class, outcome) in survey_classes(&r) {
                let ClassOutcome::Admissible(m) = outcome else {
                    continue;
                };
                let sig = r.sig();
                for mask in 0..sig.blade_count() {
                    let blade = Multivector::<Complex64>::basis(sig, mask).unwrap();
                    let defect = adjoint_law_defect(&r, &m, &blade).unwrap();
                    assert!(
                        defect < 1e-10,
                        "{} {} blade {mask}: defect {defect:.3e}",
                        sig.label(),
                        class.label()
                    );
                }
            }
        }
    }

    #[test]
    fn pairing_symmetry_matches_epsilon() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for field in [ScalarField::Real, ScalarField::Complex] {
            let r = rep(1, 3, field);
            for (_, outcome) in survey_classes(&r) {
                let ClassOutcome::Admissible(m) = outcome else {
                    continue;
                };
                let d = r.dim();
                let rand_spinor = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Complex64> {
                    (0..d)
                        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect()
                };
                for _ in 0..20 {
                    let phi = rand_spinor(&mut rng);
                    let psi = rand_spinor(&mut rng);
                    let fwd = m.inner(&phi, &psi);
                    let rev = m.inner(&psi, &phi);
                    let expect = m
                        .scalar_involution()
                        .apply(rev)
                        * Complex64::new(m.epsilon() as f64, 0.0);
                    assert!((fwd - expect).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn dual_row_reproduces_inner() {
        let r = rep(1, 3, ScalarField::Complex);
        let m = build_spinor_metric(&r, AdjointClass::XiStar).unwrap();
        let psi: Vec<Complex64> = (0..4).map(|k| Complex64::new(k as f64 + 0.5, -0.25 * k as f64)).collect();
        let phi: Vec<Complex64> = (0..4).map(|k| Complex64::new(1.0 - k as f64, 0.5)).collect();
        let via_dual: Complex64 = m
            .dual(&psi)
            .iter()
            .zip(&phi)
            .map(|(a, b)| a * b)
            .sum();
        assert!((via_dual - m.inner(&psi, &phi)).norm() < 1e-12);
    }

    #[test]
    fn semisimple_plain_class_inadmissibility() {
        // On Cl(3,0) (≅ Mat(2,ℂ) as a real algebra, d = 2 backend) the ξ class
        // requires a symmetric intertwiner with δ = +1 for all three
        // generators; the third generator obstructs it.
        let r = rep(0, 3, ScalarField::Real);
        // Cl(0,3): xi needs C γᵀ = γ C... probe all four classes; at least one
        // of the plain classes must be inadmissible on this double algebra.
        let outcomes = survey_classes(&r);
        let inadmissible = outcomes
            .iter()
            .filter(|(_, o)| matches!(o, ClassOutcome::Inadmissible(Error::InadmissibleClass { .. })))
            .count();
        assert!(inadmissible >= 1, "expected at least one inadmissible class on Cl(0,3)");
    }

    #[test]
    fn data_set_validation() {
        let sig = Signature::new(2, 0).unwrap();
        assert!(DataSet::new(
            sig,
            Complex64::new(0.5, 0.5),
            1,
            ScalarInvolution::Id,
            AdjointClass::Xi
        )
        .is_err());
        let ds = DataSet::new(
            sig,
            Complex64::new(0.0, 0.5),
            1,
            ScalarInvolution::Conj,
            AdjointClass::Xi,
        )
        .unwrap();
        assert_eq!(ds.lambda_ratio(), -1);
        let ds2 = DataSet::new(
            sig,
            Complex64::new(0.5, 0.0),
            1,
            ScalarInvolution::Conj,
            AdjointClass::Xi,
        )
        .unwrap();
        assert_eq!(ds2.lambda_ratio(), 1);
    }
}
