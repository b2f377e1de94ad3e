//! Morita classification of real and complexified Clifford algebras.
//!
//! Real algebras are matrix algebras (or a double of one) over ℝ, ℂ, or ℍ
//! according to (plus − minus) mod 8; complexified algebras depend only on
//! the parity of n.

use crate::algebra::Signature;
use serde::{Deserialize, Serialize};

/// Base field an algebra is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalarField {
    Real,
    Complex,
}

impl ScalarField {
    pub fn label(self) -> &'static str {
        match self {
            ScalarField::Real => "real",
            ScalarField::Complex => "complex",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "real" | "r" | "R" => Some(ScalarField::Real),
            "complex" | "c" | "C" => Some(ScalarField::Complex),
            _ => None,
        }
    }
}

/// Division algebra commutant of the irreducible representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DivisionAlgebra {
    R,
    C,
    H,
}

impl DivisionAlgebra {
    pub fn real_dim(self) -> usize {
        match self {
            DivisionAlgebra::R => 1,
            DivisionAlgebra::C => 2,
            DivisionAlgebra::H => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DivisionAlgebra::R => "R",
            DivisionAlgebra::C => "C",
            DivisionAlgebra::H => "H",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Simplicity {
    Simple,
    Semisimple,
}

/// Structure of Cl(p,q) over its base field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraClass {
    pub sig: SignatureInfo,
    pub field: ScalarField,
    pub division: DivisionAlgebra,
    pub simplicity: Simplicity,
    /// N in Cl ≅ Mat(N, D) or Mat(N, D) ⊕ Mat(N, D): the spinor dimension
    /// over the division algebra.
    pub spinor_dim_over_d: usize,
    /// Dimension of the algebra over its base field, always 2^n.
    pub algebra_dim: usize,
}

/// Signature echo carried inside classification results for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureInfo {
    pub plus: usize,
    pub minus: usize,
}

impl AlgebraClass {
    pub fn is_simple(&self) -> bool {
        self.simplicity == Simplicity::Simple
    }

    /// Number of primitive idempotents in a decomposition of 1: N for a
    /// simple algebra, 2N for a double.
    pub fn primitive_idempotent_count(&self) -> usize {
        match self.simplicity {
            Simplicity::Simple => self.spinor_dim_over_d,
            Simplicity::Semisimple => 2 * self.spinor_dim_over_d,
        }
    }

    /// Real dimension of a minimal left ideal (a semispinor module),
    /// N · dim_ℝ(D) for real algebras.
    pub fn spinor_real_dim(&self) -> usize {
        self.spinor_dim_over_d
            * match self.field {
                ScalarField::Real => self.division.real_dim(),
                ScalarField::Complex => 2,
            }
    }

    /// Size of the concrete matrix backend used for this algebra: N for
    /// D ∈ {ℝ, ℂ} and 2N for D = ℍ (standard complex 2×2 embedding).
    pub fn backend_dim(&self) -> usize {
        match (self.field, self.division) {
            (ScalarField::Real, DivisionAlgebra::H) => 2 * self.spinor_dim_over_d,
            _ => self.spinor_dim_over_d,
        }
    }

    /// Whether the backend can use purely real matrix entries (D = ℝ).
    pub fn backend_real_entries(&self) -> bool {
        self.field == ScalarField::Real && self.division == DivisionAlgebra::R
    }

    /// Bilinear reconstruction factor: a half representation of a double
    /// algebra sees each completeness sum at half weight.
    pub fn reconstruction_factor(&self) -> usize {
        match self.simplicity {
            Simplicity::Simple => 1,
            Simplicity::Semisimple => 2,
        }
    }

    pub fn summary(&self) -> String {
        let simple = match self.simplicity {
            Simplicity::Simple => "simple",
            Simplicity::Semisimple => "semisimple",
        };
        format!(
            "{} over {}: {} matrix algebra over {}, spinor dimension {} (algebra dimension {})",
            format!("Cl({},{})", self.sig.plus, self.sig.minus),
            self.field.label(),
            simple,
            self.division.label(),
            self.spinor_dim_over_d,
            self.algebra_dim
        )
    }
}

/// Classify Cl(p,q) over the requested base field.
pub fn classify(sig: Signature, field: ScalarField) -> AlgebraClass {
    let n = sig.dim();
    let info = SignatureInfo {
        plus: sig.plus(),
        minus: sig.minus(),
    };
    match field {
        ScalarField::Complex => {
            let (simplicity, nn) = if n % 2 == 0 {
                (Simplicity::Simple, 1usize << (n / 2))
            } else {
                (Simplicity::Semisimple, 1usize << (n / 2))
            };
            AlgebraClass {
                sig: info,
                field,
                division: DivisionAlgebra::C,
                simplicity,
                spinor_dim_over_d: nn,
                algebra_dim: 1 << n,
            }
        }
        ScalarField::Real => {
            let (division, simplicity, nn) = match sig.delta_mod8() {
                0 => (DivisionAlgebra::R, Simplicity::Simple, 1usize << (n / 2)),
                1 => (DivisionAlgebra::R, Simplicity::Semisimple, 1usize << ((n - 1) / 2)),
                2 => (DivisionAlgebra::R, Simplicity::Simple, 1usize << (n / 2)),
                3 => (DivisionAlgebra::C, Simplicity::Simple, 1usize << ((n - 1) / 2)),
                4 => (DivisionAlgebra::H, Simplicity::Simple, 1usize << ((n - 2) / 2)),
                5 => (DivisionAlgebra::H, Simplicity::Semisimple, 1usize << ((n - 3) / 2)),
                6 => (DivisionAlgebra::H, Simplicity::Simple, 1usize << ((n - 2) / 2)),
                7 => (DivisionAlgebra::C, Simplicity::Simple, 1usize << ((n - 1) / 2)),
                _ => unreachable!(),
            };
            AlgebraClass {
                sig: info,
                field,
                division,
                simplicity,
                spinor_dim_over_d: nn,
                algebra_dim: 1 << n,
            }
        }
    }
}

/// All signatures with dimension at most `max_dim`, including the trivial one.
pub fn signatures_up_to(max_dim: usize) -> Vec<Signature> {
    let mut out = Vec::new();
    for n in 0..=max_dim {
        for p in (0..=n).rev() {
            out.push(Signature::new(p, n - p).expect("bounded signature"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(p: usize, m: usize) -> AlgebraClass {
        classify(Signature::new(p, m).unwrap(), ScalarField::Real)
    }

    #[test]
    fn frozen_small_real_classifications() {
        // Cl(1,0) = R ⊕ R, Cl(2,0) = Mat(2,R), Cl(3,0) = Mat(2,C),
        // Cl(0,1) = C, Cl(0,2) = H, Cl(0,3) = H ⊕ H, Cl(1,3) = Mat(4,R)... check:
        // delta(1,3) = -2 mod 8 = 6 → H: Mat(2,H) has real dim 16 ✓.
        let c10 = class(1, 0);
        assert_eq!(
            (c10.division, c10.simplicity, c10.spinor_dim_over_d),
            (DivisionAlgebra::R, Simplicity::Semisimple, 1)
        );
        let c20 = class(2, 0);
        assert_eq!(
            (c20.division, c20.simplicity, c20.spinor_dim_over_d),
            (DivisionAlgebra::R, Simplicity::Simple, 2)
        );
        let c30 = class(3, 0);
        assert_eq!(
            (c30.division, c30.simplicity, c30.spinor_dim_over_d),
            (DivisionAlgebra::C, Simplicity::Simple, 2)
        );
        let c01 = class(0, 1);
        assert_eq!(
            (c01.division, c01.simplicity, c01.spinor_dim_over_d),
            (DivisionAlgebra::C, Simplicity::Simple, 1)
        );
        let c02 = class(0, 2);
        assert_eq!(
            (c02.division, c02.simplicity, c02.spinor_dim_over_d),
            (DivisionAlgebra::H, Simplicity::Simple, 1)
        );
        let c03 = class(0, 3);
        assert_eq!(
            (c03.division, c03.simplicity, c03.spinor_dim_over_d),
            (DivisionAlgebra::H, Simplicity::Semisimple, 1)
        );
        let c13 = class(1, 3);
        assert_eq!(
            (c13.division, c13.simplicity, c13.spinor_dim_over_d),
            (DivisionAlgebra::H, Simplicity::Simple, 2)
        );
        let c31 = class(3, 1);
        assert_eq!(
            (c31.division, c31.simplicity, c31.spinor_dim_over_d),
            (DivisionAlgebra::R, Simplicity::Simple, 4)
        );
    }

    #[test]
    fn real_dimension_bookkeeping() {
        // N^2 dim(D) (× 2 if double) must equal 2^n.
        for sig in signatures_up_to(8) {
            let c = classify(sig, ScalarField::Real);
            let factor = match c.simplicity {
                Simplicity::Simple => 1,
                Simplicity::Semisimple => 2,
            };
            let total = factor * c.spinor_dim_over_d * c.spinor_dim_over_d * c.division.real_dim();
            assert_eq!(total, 1 << sig.dim(), "{}", sig.label());
        }
    }

    #[test]
    fn complex_classification_by_parity() {
        for sig in signatures_up_to(8) {
            let c = classify(sig, ScalarField::Complex);
            assert_eq!(c.division, DivisionAlgebra::C);
            let factor = if sig.dim() % 2 == 0 { 1 } else { 2 };
            assert_eq!(
                factor * c.spinor_dim_over_d * c.spinor_dim_over_d,
                1 << sig.dim(),
                "{}",
                sig.label()
            );
            assert_eq!(c.is_simple(), sig.dim() % 2 == 0);
        }
    }

    #[test]
    fn double_quaternionic_dimension_count() {
        // For (plus - minus) ≡ 5 mod 8 the double quaternionic form gives
        // 8 · (2^{(n-1)/2 - 1})^2 = 2^n real dimensions.
        let mut seen = 0;
        for sig in signatures_up_to(8) {
            if sig.delta_mod8() != 5 {
                continue;
            }
            seen += 1;
            let n = sig.dim();
            let half_spinor = 1usize << ((n - 1) / 2 - 1);
            assert_eq!(8 * half_spinor * half_spinor, 1 << n, "{}", sig.label());
            let c = classify(sig, ScalarField::Real);
            assert_eq!(c.division, DivisionAlgebra::H);
            assert_eq!(c.simplicity, Simplicity::Semisimple);
            assert_eq!(c.spinor_dim_over_d, half_spinor);
        }
        assert!(seen >= 5, "expected several delta=5 signatures up to n=8");
    }

    #[test]
    fn signature_sweep_counts_trivial_algebra() {
        assert_eq!(signatures_up_to(5).len(), 21);
        let trivial = classify(Signature::new(0, 0).unwrap(), ScalarField::Real);
        assert_eq!(trivial.division, DivisionAlgebra::R);
        assert_eq!(trivial.primitive_idempotent_count(), 1);
    }
}
