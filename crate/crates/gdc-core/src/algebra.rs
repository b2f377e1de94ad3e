//! Dense Clifford-algebra arithmetic over a generic scalar.
//!
//! Basis blades are bitmasks over the coframe generators `e^0 … e^{n-1}`,
//! which satisfy `e^a e^b + e^b e^a = 2 g^{ab} 1` with `g` diagonal: the first
//! `plus` axes square to `+1`, the remaining `minus` axes to `-1`. Lowered
//! frame duals are `e_a = g_aa e^a`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Metric signature (p, q) of a diagonal quadratic form; n = p + q ≤ 8.
///
/// The trivial algebra (0, 0) ≅ ℝ is admitted so classification can sweep
/// every signature of dimension at most five; layers that need an actual
/// generator (representations, charts) reject it separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    plus: usize,
    minus: usize,
}

impl Signature {
    pub fn new(plus: usize, minus: usize) -> Result<Self> {
        if plus + minus > 8 {
            return Err(Error::UnsupportedSignature { plus, minus });
        }
        Ok(Signature { plus, minus })
    }

    pub fn plus(&self) -> usize {
        self.plus
    }

    pub fn minus(&self) -> usize {
        self.minus
    }

    pub fn dim(&self) -> usize {
        self.plus + self.minus
    }

    /// Number of basis blades, 2^n.
    pub fn blade_count(&self) -> usize {
        1 << self.dim()
    }

    /// Metric coefficient g_aa = g^aa ∈ {+1, -1} of axis `a`.
    pub fn metric_sign(&self, axis: usize) -> i32 {
        if axis < self.plus {
            1
        } else {
            -1
        }
    }

    /// Sign of det g = (-1)^minus.
    pub fn det_sign(&self) -> i32 {
        if self.minus % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// (plus - minus) mod 8, the Morita period index.
    pub fn delta_mod8(&self) -> usize {
        ((self.plus as isize - self.minus as isize).rem_euclid(8)) as usize
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dim() {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!("Cl({},{})", self.plus, self.minus)
    }
}

/// Sign from anticommuting the generators of blade `a` past those of blade `b`
/// when forming their concatenation, ignoring metric contractions.
fn reorder_sign(a: usize, mut b: usize) -> i32 {
    // Count, for each generator of b, how many generators of a with a larger
    // index must be hopped over; the parity gives the sign.
    let mut swaps = 0usize;
    while b != 0 {
        let i = b.trailing_zeros() as usize;
        swaps += (a >> (i + 1)).count_ones() as usize;
        b &= b - 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Geometric product of two basis blades: returns (result mask, sign).
pub fn blade_geometric(sig: Signature, a: usize, b: usize) -> (usize, i32) {
    let mut sign = reorder_sign(a, b);
    let common = a & b;
    let mut m = common;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        sign *= sig.metric_sign(i);
        m &= m - 1;
    }
    (a ^ b, sign)
}

/// Wedge product of two basis blades; `None` when they share a generator.
pub fn blade_wedge(a: usize, b: usize) -> Option<(usize, i32)> {
    if a & b != 0 {
        None
    } else {
        Some((a | b, reorder_sign(a, b)))
    }
}

/// Grade (number of generators) of a blade mask.
pub fn blade_grade(mask: usize) -> usize {
    mask.count_ones() as usize
}

/// The six algebra involutions: the main anti-automorphism ξ, the grade
/// automorphism η, their composite, and each composed with scalar conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Involution {
    Xi,
    Eta,
    XiEta,
    Conj,
    XiConj,
    XiEtaConj,
}

impl Involution {
    pub fn conjugates(self) -> bool {
        matches!(self, Involution::Conj | Involution::XiConj | Involution::XiEtaConj)
    }

    /// Sign on a grade-p blade (the scalar-conjugation part acts separately).
    pub fn grade_sign(self, p: usize) -> i32 {
        match self {
            Involution::Xi | Involution::XiConj => xi_sign(p),
            Involution::Eta | Involution::Conj => eta_sign_or_one(self, p),
            Involution::XiEta | Involution::XiEtaConj => xi_sign(p) * eta_sign(p),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "xi" => Some(Involution::Xi),
            "eta" => Some(Involution::Eta),
            "xi_eta" | "xieta" => Some(Involution::XiEta),
            "conj" => Some(Involution::Conj),
            "xi_conj" | "xiconj" | "xistar" => Some(Involution::XiConj),
            "xi_eta_conj" | "xietaconj" | "xietastar" => Some(Involution::XiEtaConj),
            _ => None,
        }
    }
}

fn eta_sign_or_one(inv: Involution, p: usize) -> i32 {
    match inv {
        Involution::Eta => eta_sign(p),
        Involution::Conj => 1,
        _ => unreachable!(),
    }
}

/// ξ reverses generator order: sign (-1)^{p(p-1)/2}.
pub fn xi_sign(p: usize) -> i32 {
    if (p * (p.saturating_sub(1)) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// η negates odd grades: sign (-1)^p.
pub fn eta_sign(p: usize) -> i32 {
    if p % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Dense multivector: one coefficient per basis blade, indexed by bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector<S: Scalar> {
    sig: Signature,
    coeffs: Vec<S>,
}

impl<S: Scalar> Multivector<S> {
    pub fn zero(sig: Signature) -> Self {
        Multivector {
            sig,
            coeffs: vec![S::zero(); sig.blade_count()],
        }
    }

    pub fn scalar(sig: Signature, value: S) -> Self {
        let mut mv = Self::zero(sig);
        mv.coeffs[0] = value;
        mv
    }

    pub fn one(sig: Signature) -> Self {
        Self::scalar(sig, S::one())
    }

    /// Unit basis blade with the given mask.
    pub fn basis(sig: Signature, mask: usize) -> Result<Self> {
        if mask >= sig.blade_count() {
            return Err(Error::BladeOutOfRange {
                index: mask,
                count: sig.blade_count(),
            });
        }
        let mut mv = Self::zero(sig);
        mv.coeffs[mask] = S::one();
        Ok(mv)
    }

    /// Coframe 1-form e^a.
    pub fn coframe(sig: Signature, axis: usize) -> Result<Self> {
        sig.check_axis(axis)?;
        Self::basis(sig, 1 << axis)
    }

    /// Lowered frame dual e_a = g_aa e^a.
    pub fn frame_lowered(sig: Signature, axis: usize) -> Result<Self> {
        sig.check_axis(axis)?;
        let mut mv = Self::zero(sig);
        mv.coeffs[1 << axis] = S::from_i64(sig.metric_sign(axis) as i64);
        Ok(mv)
    }

    /// Volume blade e^{0…n-1}.
    pub fn volume(sig: Signature) -> Self {
        let mut mv = Self::zero(sig);
        let n = sig.blade_count();
        mv.coeffs[n - 1] = S::one();
        mv
    }

    pub fn from_coeffs(sig: Signature, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != sig.blade_count() {
            return Err(Error::Internal(format!(
                "coefficient vector has length {}, expected {}",
                coeffs.len(),
                sig.blade_count()
            )));
        }
        Ok(Multivector { sig, coeffs })
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn coeff(&self, mask: usize) -> &S {
        &self.coeffs[mask]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, mask: usize, value: S) {
        self.coeffs[mask] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Iterator over (mask, coefficient) pairs with nonzero coefficient.
    pub fn iter_nz(&self) -> impl Iterator<Item = (usize, &S)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn check_same_algebra(&self, other: &Self) -> Result<()> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch {
                lp: self.sig.plus,
                lm: self.sig.minus,
                rp: other.sig.plus,
                rm: other.sig.minus,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_algebra(other)?;
        Ok(Multivector {
            sig: self.sig,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_algebra(other)?;
        Ok(Multivector {
            sig: self.sig,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        })
    }

    /// Geometric (Clifford) product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_algebra(other)?;
        let mut out = vec![S::zero(); self.sig.blade_count()];
        for (ma, ca) in self.iter_nz() {
            for (mb, cb) in other.iter_nz() {
                let (mask, sign) = blade_geometric(self.sig, ma, mb);
                let term = ca.mul(cb);
                let term = if sign < 0 { term.neg() } else { term };
                out[mask] = out[mask].add(&term);
            }
        }
        Ok(Multivector {
            sig: self.sig,
            coeffs: out,
        })
    }

    /// Exterior (wedge) product.
    pub fn try_wedge(&self, other: &Self) -> Result<Self> {
        self.check_same_algebra(other)?;
        let mut out = vec![S::zero(); self.sig.blade_count()];
        for (ma, ca) in self.iter_nz() {
            for (mb, cb) in other.iter_nz() {
                if let Some((mask, sign)) = blade_wedge(ma, mb) {
                    let term = ca.mul(cb);
                    let term = if sign < 0 { term.neg() } else { term };
                    out[mask] = out[mask].add(&term);
                }
            }
        }
        Ok(Multivector {
            sig: self.sig,
            coeffs: out,
        })
    }

    /// Interior product i_Ã Φ = ½(A Φ − Φ^η A) for a grade-1 form A, which
    /// contracts Φ with the metric dual vector Ã of A.
    pub fn interior_from(&self, a: &Self) -> Result<Self> {
        self.check_same_algebra(a)?;
        let grades: Vec<usize> = a
            .iter_nz()
            .map(|(m, _)| blade_grade(m))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        if !a.is_zero() && grades != vec![1] {
            return Err(Error::NotGradeOne { grades });
        }
        let left = a.try_mul(self)?;
        let right = self.involution(Involution::Eta)?.try_mul(a)?;
        Ok(left.try_sub(&right)?.scale(&S::half()))
    }

    /// Wedge with a grade-1 form via the Clifford split A∧Φ = ½(AΦ + Φ^η A).
    /// Agrees with `try_wedge`; kept for use in split identities and tests.
    pub fn wedge_from_vector(&self, a: &Self) -> Result<Self> {
        self.check_same_algebra(a)?;
        let left = a.try_mul(self)?;
        let right = self.involution(Involution::Eta)?.try_mul(a)?;
        Ok(left.try_add(&right)?.scale(&S::half()))
    }

    /// Apply one of the six involutions. Conjugating kinds require a scalar
    /// type on which conjugation acts (the complex backends).
    pub fn involution(&self, kind: Involution) -> Result<Self> {
        if kind.conjugates() && !S::supports_conj() {
            return Err(Error::ConjOverRealField);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(mask, c)| {
                let p = blade_grade(mask);
                let c = if kind.conjugates() { c.conj() } else { c.clone() };
                if kind.grade_sign(p) < 0 {
                    c.neg()
                } else {
                    c
                }
            })
            .collect();
        Ok(Multivector {
            sig: self.sig,
            coeffs,
        })
    }

    /// Grade-p projection ℘_p.
    pub fn grade(&self, p: usize) -> Result<Self> {
        if p > self.sig.dim() {
            return Err(Error::GradeOutOfRange {
                grade: p,
                dim: self.sig.dim(),
            });
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(mask, c)| {
                if blade_grade(mask) == p {
                    c.clone()
                } else {
                    S::zero()
                }
            })
            .collect();
        Ok(Multivector {
            sig: self.sig,
            coeffs,
        })
    }

    /// Grades with a nonzero coefficient, ascending.
    pub fn present_grades(&self) -> Vec<usize> {
        let mut set = std::collections::BTreeSet::new();
        for (mask, _) in self.iter_nz() {
            set.insert(blade_grade(mask));
        }
        set.into_iter().collect()
    }

    pub fn scalar_part(&self) -> S {
        self.coeffs[0].clone()
    }

    pub fn scale(&self, s: &S) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    /// Hodge dual ⋆Φ = Φ^ξ z with z the volume blade.
    pub fn hodge(&self) -> Result<Self> {
        let xi = self.involution(Involution::Xi)?;
        xi.try_mul(&Self::volume(self.sig))
    }

    pub fn map_scalars<T: Scalar, F: Fn(&S) -> T>(&self, f: F) -> Multivector<T> {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}


/// ξ-twisted cobasis blade e^ξ_{I}: the single signed blade that pairs the
/// basis blade e^{I} to 1 under the scalar part of the geometric product,
/// i.e. e^{I} e^ξ_{I} = 1 for each multi-index I.
pub fn cobasis_xi<S: Scalar>(sig: Signature, mask: usize) -> Result<Multivector<S>> {
    if mask >= sig.blade_count() {
        return Err(Error::BladeOutOfRange {
            index: mask,
            count: sig.blade_count(),
        });
    }
    let p = blade_grade(mask);
    let mut sign = xi_sign(p);
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        sign *= sig.metric_sign(i);
        m &= m - 1;
    }
    let mut mv = Multivector::zero(sig);
    mv.set_coeff(mask, S::from_i64(sign as i64));
    Ok(mv)
}

/// Cobasis inverse for an explicit multi-index given as axis list; rejects
/// repeated indices.
pub fn multi_cobasis_inverse<S: Scalar>(sig: Signature, indices: &[usize]) -> Result<Multivector<S>> {
    let mut mask = 0usize;
    for &i in indices {
        sig.check_axis(i)?;
        if mask & (1 << i) != 0 {
            return Err(Error::RepeatedIndex {
                index: i,
                indices: indices.to_vec(),
            });
        }
        mask |= 1 << i;
    }
    // The cobasis inverse of an ordered multi-index (i1 < … < ip) is e^ξ_I;
    // a permuted index list contributes the permutation sign.
    let mut perm_sign = 1i32;
    let mut seen: Vec<usize> = Vec::with_capacity(indices.len());
    for &i in indices {
        let above = seen.iter().filter(|&&j| j > i).count();
        if above % 2 == 1 {
            perm_sign = -perm_sign;
        }
        seen.push(i);
    }
    let base = cobasis_xi::<S>(sig, mask)?;
    Ok(if perm_sign < 0 { base.neg() } else { base })
}

/// All blade masks of grade p, ascending.
pub fn grade_masks(sig: Signature, p: usize) -> Vec<usize> {
    (0..sig.blade_count())
        .filter(|&m| blade_grade(m) == p)
        .collect()
}

/// Convenience operators for same-algebra values; they panic on signature
/// mismatch (use the try_ methods where mismatches are reachable inputs).
impl<S: Scalar> std::ops::Add for &Multivector<S> {
    type Output = Multivector<S>;
    fn add(self, rhs: Self) -> Multivector<S> {
        self.try_add(rhs).expect("multivector addition: same algebra required")
    }
}

impl<S: Scalar> std::ops::Sub for &Multivector<S> {
    type Output = Multivector<S>;
    fn sub(self, rhs: Self) -> Multivector<S> {
        self.try_sub(rhs).expect("multivector subtraction: same algebra required")
    }
}

impl<S: Scalar> std::ops::Mul for &Multivector<S> {
    type Output = Multivector<S>;
    fn mul(self, rhs: Self) -> Multivector<S> {
        self.try_mul(rhs).expect("multivector product: same algebra required")
    }
}
