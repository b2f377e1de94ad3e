//! Clifford-algebraic operators entering the first-order current systems:
//! the λ̂± family with its expectation-value tables (Killing currents), and
//! the Δ±/mass-coefficient machinery (Dirac currents).
//!
//! Conventions. λ̂±_{(p)} = λ·1 ± (−1)^p λ^{j_c} 𝒥 acts ℂ-linearly on grade-1
//! elements (𝒥 is the plain family involution there, (e^a)^𝒥 = δ(𝒥)e^a); this
//! is the unique reading under which (λ̂±)² = 2λ·λ̂± also holds for imaginary
//! λ. Δ±_{(p)} = 1 ± (−1)^{p+1} ε δ(𝒥) 𝒥 acts with the full adjoint-class
//! involution including scalar conjugation for the starred classes, so a mass
//! factor passes through as Δ(mY) = m^{j_k}·(𝒥-term) and must be kept inside
//! the argument.

use crate::algebra::{Involution, Multivector, Signature};
use crate::error::{Error, Result};
use crate::metric::{AdjointClass, ScalarInvolution};
use crate::scalar::AdScalar;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Whether the Killing number is real or purely imaginary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaKind {
    Real,
    Imaginary,
}

impl LambdaKind {
    /// Validate a complex Killing number; zero counts as real (parallel
    /// limit).
    pub fn of(lambda: Complex64) -> Result<LambdaKind> {
        match (lambda.re != 0.0, lambda.im != 0.0) {
            (true, true) => Err(Error::MixedKillingNumber {
                lambda: format!("{lambda}"),
            }),
            (_, true) => Ok(LambdaKind::Imaginary),
            _ => Ok(LambdaKind::Real),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LambdaKind::Real => "real",
            LambdaKind::Imaginary => "imaginary",
        }
    }
}

/// r = λ^{j_c}/λ ∈ {+1, −1}, with the data-level exclusion: an imaginary
/// Killing number over an identity-type scalar involution admits no Killing
/// spinors (a real-structured pairing cannot absorb the factor i in
/// ∇ψ = λ X̃·ψ), which is what voids those table rows.
pub fn killing_ratio(kind: LambdaKind, j_c: ScalarInvolution) -> Result<i32> {
    match (kind, j_c) {
        (LambdaKind::Real, _) => Ok(1),
        (LambdaKind::Imaginary, ScalarInvolution::Conj) => Ok(-1),
        (LambdaKind::Imaginary, ScalarInvolution::Id) => Err(Error::ExcludedDataSet {
            reason: "imaginary Killing number requires a conjugating scalar involution \
                     (no Killing spinors exist over an identity-type pairing)"
                .into(),
        }),
    }
}

/// Which member of the λ̂ pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pm {
    Plus,
    Minus,
}

impl Pm {
    fn sign(self) -> f64 {
        match self {
            Pm::Plus => 1.0,
            Pm::Minus => -1.0,
        }
    }
}

/// λ̂±_{(p)} for one adjoint family, parameterized by the degree p of the
/// current it multiplies.
#[derive(Clone, Copy, Debug)]
pub struct LambdaHat {
    pub lambda: Complex64,
    pub j_c: ScalarInvolution,
    pub class: AdjointClass,
    pub p: usize,
    pub sign: Pm,
}

impl LambdaHat {
    /// The scalar multiplying the 𝒥 term: ±(−1)^p λ^{j_c}.
    fn involution_coefficient(&self) -> Complex64 {
        let parity = if self.p % 2 == 0 { 1.0 } else { -1.0 };
        self.j_c.apply(self.lambda) * (self.sign.sign() * parity)
    }

    /// Apply to a grade-1 element, ℂ-linearly in its coefficients.
    pub fn apply<T: AdScalar>(&self, y: &Multivector<T>) -> Result<Multivector<T>> {
        let grades = y.present_grades();
        if grades.iter().any(|&g| g != 1) {
            return Err(Error::NotGradeOne { grades });
        }
        // Plain family involution: no scalar conjugation.
        let family = match self.class {
            AdjointClass::Xi | AdjointClass::XiStar => Involution::Xi,
            AdjointClass::XiEta | AdjointClass::XiEtaStar => Involution::XiEta,
        };
        let jy = y.involution(family)?;
        let lam = T::from_c(self.lambda);
        let co = T::from_c(self.involution_coefficient());
        Ok(y.scale(&lam).try_add(&jy.scale(&co))?)
    }

    /// Closed-form expectation value ⟨λ̂±_{(p)}⟩ = λ(1 ± (−1)^p r δ(𝒥)).
    pub fn expectation(&self, kind: LambdaKind) -> Result<Complex64> {
        let r = killing_ratio(kind, self.j_c)? as f64;
        let parity = if self.p % 2 == 0 { 1.0 } else { -1.0 };
        let delta = self.class.delta() as f64;
        Ok(self.lambda * (1.0 + self.sign.sign() * parity * r * delta))
    }

    /// Expectation extracted from the operator itself: e^b·λ̂(e_b) / e^b·e_b,
    /// summed over a g-orthonormal frame of `sig`. Independent of the closed
    /// form: uses only the involution's action on basis legs.
    pub fn expectation_by_contraction(&self, sig: Signature) -> Result<Complex64> {
        let n = sig.dim();
        let mut acc = Multivector::<Complex64>::zero(sig);
        for b in 0..n {
            let leg = Multivector::<Complex64>::frame_lowered(sig, b)?;
            let hat = self.apply(&leg)?;
            let co = Multivector::<Complex64>::coframe(sig, b)?;
            acc = acc.try_add(&co.try_mul(&hat)?)?;
        }
        Ok(acc.scalar_part() / n as f64)
    }
}

/// One table cell: both expectation values as exact multiples of λ, plus the
/// closure pattern they imply for that parity (plus-value 0 closes the
/// ascending equation: "red"; minus-value 0 closes the descending one:
/// "blue").
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectationCell {
    pub plus_over_lambda: u8,
    pub minus_over_lambda: u8,
    pub pattern: String,
}

impl ExpectationCell {
    fn from_ratio(r: i32, delta: i32, p_odd: bool) -> ExpectationCell {
        let parity = if p_odd { -1 } else { 1 };
        let plus = (1 + parity * r * delta) as u8;
        let minus = (1 - parity * r * delta) as u8;
        ExpectationCell {
            plus_over_lambda: plus,
            minus_over_lambda: minus,
            pattern: if plus == 0 { "red".into() } else { "blue".into() },
        }
    }
}

/// One table row: a (j_c, 𝒥) pair with its odd- and even-degree cells, or an
/// exclusion marker.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectationRow {
    pub j_c: String,
    pub class: String,
    pub excluded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exclusion_reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub odd: Option<ExpectationCell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub even: Option<ExpectationCell>,
}

/// The full 8-row expectation-value table for one Killing-number kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectationTable {
    pub lambda_kind: String,
    pub rows: Vec<ExpectationRow>,
}

/// Row order: ξ-family block then ξη-family block; within each block j_c = id
/// rows before conjugation rows, plain class before starred.
pub const ROW_ORDER: [(ScalarInvolution, AdjointClass); 8] = [
    (ScalarInvolution::Id, AdjointClass::Xi),
    (ScalarInvolution::Id, AdjointClass::XiStar),
    (ScalarInvolution::Conj, AdjointClass::Xi),
    (ScalarInvolution::Conj, AdjointClass::XiStar),
    (ScalarInvolution::Id, AdjointClass::XiEta),
    (ScalarInvolution::Id, AdjointClass::XiEtaStar),
    (ScalarInvolution::Conj, AdjointClass::XiEta),
    (ScalarInvolution::Conj, AdjointClass::XiEtaStar),
];

/// Build the table for one Killing-number kind from the closed-form
/// expectation values, marking excluded (j_c, kind) combinations.
pub fn build_expectation_table(kind: LambdaKind) -> ExpectationTable {
    let rows = ROW_ORDER
        .iter()
        .map(|&(j_c, class)| match killing_ratio(kind, j_c) {
            Ok(r) => ExpectationRow {
                j_c: j_c.label().into(),
                class: class.label().into(),
                excluded: false,
                exclusion_reason: None,
                odd: Some(ExpectationCell::from_ratio(r, class.delta(), true)),
                even: Some(ExpectationCell::from_ratio(r, class.delta(), false)),
            },
            Err(e) => ExpectationRow {
                j_c: j_c.label().into(),
                class: class.label().into(),
                excluded: true,
                exclusion_reason: Some(e.to_string()),
                odd: None,
                even: None,
            },
        })
        .collect();
    ExpectationTable {
        lambda_kind: kind.label().into(),
        rows,
    }
}

/// Rebuild the table from the operator oracle: every non-excluded cell's
/// values extracted by contraction against a concrete algebra's frame, for a
/// concrete λ of the given kind.
pub fn table_from_operator_oracle(
    kind: LambdaKind,
    lambda: Complex64,
    sig: Signature,
) -> Result<ExpectationTable> {
    let found = LambdaKind::of(lambda)?;
    if found != kind && lambda != Complex64::new(0.0, 0.0) {
        return Err(Error::Config(format!(
            "lambda {lambda} is {} but the table asks for {}",
            found.label(),
            kind.label()
        )));
    }
    let rows = ROW_ORDER
        .iter()
        .map(|&(j_c, class)| {
            if killing_ratio(kind, j_c).is_err() {
                return Ok(ExpectationRow {
                    j_c: j_c.label().into(),
                    class: class.label().into(),
                    excluded: true,
                    exclusion_reason: killing_ratio(kind, j_c).err().map(|e| e.to_string()),
                    odd: None,
                    even: None,
                });
            }
            let mut cells = Vec::new();
            for p_odd in [true, false] {
                let p = if p_odd { 1 } else { 2 };
                let mut over_lambda = Vec::new();
                for sign in [Pm::Plus, Pm::Minus] {
                    let hat = LambdaHat {
                        lambda,
                        j_c,
                        class,
                        p,
                        sign,
                    };
                    let value = hat.expectation_by_contraction(sig)?;
                    let ratio = value / lambda;
                    let rounded = ratio.re.round();
                    if (ratio - Complex64::new(rounded, 0.0)).norm() > 1e-12 {
                        return Err(Error::Internal(format!(
                            "operator expectation {value} is not an integer multiple of λ"
                        )));
                    }
                    over_lambda.push(rounded as u8);
                }
                cells.push(ExpectationCell {
                    plus_over_lambda: over_lambda[0],
                    minus_over_lambda: over_lambda[1],
                    pattern: if over_lambda[0] == 0 {
                        "red".into()
                    } else {
                        "blue".into()
                    },
                });
            }
            Ok(ExpectationRow {
                j_c: j_c.label().into(),
                class: class.label().into(),
                excluded: false,
                exclusion_reason: None,
                odd: Some(cells.remove(0)),
                even: Some(cells.remove(0)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpectationTable {
        lambda_kind: kind.label().into(),
        rows,
    })
}

/// Δ±_{(p)}[Y] = Y ± (−1)^{p+1} ε δ(𝒥) Y^𝒥 with the full class involution
/// (scalar conjugation included for starred classes).
pub fn delta_pm<T: AdScalar>(
    y: &Multivector<T>,
    p: usize,
    class: AdjointClass,
    epsilon: i32,
    sign: Pm,
) -> Result<Multivector<T>> {
    let jy = y.involution(class.algebra_involution())?;
    let parity = if (p + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let co = T::from_f64(sign.sign() * parity * epsilon as f64 * class.delta() as f64);
    Ok(y.try_add(&jy.scale(&co))?)
}

/// 𝐦_d(p) = m + (−1)^p δ(𝒥) m^{j_k}: the mass coefficient of the ascending
/// (exterior-derivative) Dirac current equation at degree p.
pub fn mass_d_coefficient(m: Complex64, p: usize, class: AdjointClass) -> Complex64 {
    let parity = if p % 2 == 0 { 1.0 } else { -1.0 };
    m + class.scalar_involution().apply(m) * (parity * class.delta() as f64)
}

/// 𝐦_δ(p) = m + (−1)^{p−1} δ(𝒥) m^{j_k}: the descending (codifferential)
/// analogue. Opposite degree parity from 𝐦_d.
pub fn mass_delta_coefficient(m: Complex64, p: usize, class: AdjointClass) -> Complex64 {
    let parity = if p % 2 == 1 { 1.0 } else { -1.0 };
    m + class.scalar_involution().apply(m) * (parity * class.delta() as f64)
}
