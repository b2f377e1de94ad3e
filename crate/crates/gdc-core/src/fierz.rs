//! Fierz decomposition of spinor bilinears into homogeneous forms.
//!
//! The bilinear of a pair (ψ, φ) is the inhomogeneous form
//! ψφ̄ = (d/2ⁿ) Σ_{p,I} (φ, e^ξ_{I(p)} ψ) e^{I(p)}; its grade-p parts are
//! the building blocks of every current equation. The constant d/2ⁿ makes
//! the expansion the exact inverse of the representation map on rank-one
//! operators: Σ_I e^I e^ξ_I = 2ⁿ while the identity has trace d, so the raw
//! coefficient sum overshoots ψ·ψ̄ by 2ⁿ/d on every backend (central
//! redundancies of non-faithful backends contribute equal repeated terms,
//! preserving the constant). With it, matrix(Σ_p parts[p]) = ψ·dual(φ)
//! exactly, which is the property every downstream current equation needs;
//! since those equations are linear in the bilinear, the constant cancels
//! from all of them.

use crate::algebra::{blade_grade, cobasis_xi, grade_masks, Multivector};
use crate::error::Result;
use crate::matrix::CMat;
use crate::metric::SpinorMetric;
use crate::rep::GammaRep;
use crate::scalar::AdScalar;
use num_complex::Complex64;

/// All homogeneous parts (ψφ̄)_p for p = 0..=n.
///
/// Slot convention: `psi` is the ket (acted on by blades), `phi` is the
/// dualized slot; the grade-p coefficient on e^I is (d/2ⁿ)(φ, e^ξ_I ψ).
pub fn fierz_parts<T: AdScalar>(
    rep: &GammaRep,
    metric: &SpinorMetric,
    psi: &[T],
    phi: &[T],
) -> Result<Vec<Multivector<T>>> {
    let sig = rep.sig();
    let n = sig.dim();
    let kappa = T::from_f64(rep.dim() as f64 / sig.blade_count() as f64);
    let mut parts = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let mut part = Multivector::<T>::zero(sig);
        for mask in grade_masks(sig, p) {
            // e^ξ_I is a single signed blade: pull the sign out and apply the
            // plain blade matrix.
            let co = cobasis_xi::<f64>(sig, mask)?;
            let sign = *co.coeff(mask);
            let acted = rep.apply_blade(mask, psi);
            let coeff = metric.inner(phi, &acted).mul(&kappa);
            let coeff = if sign < 0.0 { coeff.neg() } else { coeff };
            part.set_coeff(mask, coeff);
        }
        parts.push(part);
    }
    Ok(parts)
}

/// The full inhomogeneous bilinear Σ_p (ψφ̄)_p.
pub fn bilinear<T: AdScalar>(
    rep: &GammaRep,
    metric: &SpinorMetric,
    psi: &[T],
    phi: &[T],
) -> Result<Multivector<T>> {
    let parts = fierz_parts(rep, metric, psi, phi)?;
    let mut total = Multivector::<T>::zero(rep.sig());
    for p in parts {
        total = total.try_add(&p)?;
    }
    Ok(total)
}

/// Rank-one matrix ψ · φ̄ (column times dual row).
pub fn rank_one_operator(metric: &SpinorMetric, psi: &[Complex64], phi: &[Complex64]) -> CMat {
    let dual = metric.dual(phi);
    let d = psi.len();
    let mut out = CMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out.set(i, j, psi[i] * dual[j]);
        }
    }
    out
}

/// Reconstruction defect ‖matrix(Σ_p parts) − ψ·φ̄‖ / max(1, ‖ψ·φ̄‖).
pub fn reconstruction_defect(
    rep: &GammaRep,
    metric: &SpinorMetric,
    psi: &[Complex64],
    phi: &[Complex64],
) -> Result<f64> {
    let total = bilinear(rep, metric, psi, phi)?;
    let lhs = rep.matrix_of(&total)?;
    let rhs = rank_one_operator(metric, psi, phi);
    let scale = rhs.max_abs().max(1.0);
    Ok(crate::matrix::frobenius_distance(&lhs, &rhs) / scale)
}

/// Fierz parts computed in an arbitrary invertible real coframe {E^j}.
///
/// The reciprocal frame R_j = Σ_k (G⁻¹)_{jk} E^k (with G^{jk} the coframe
/// Gram matrix read off the Clifford symmetric product) replaces the lowered
/// orthonormal duals; coefficients use the ξ-involution of reciprocal wedge
/// blades, and the parts are assembled on wedge products of the E^j. The
/// result is coframe-independent and must coincide with [`fierz_parts`].
pub fn fierz_parts_in_coframe<T: AdScalar>(
    rep: &GammaRep,
    metric: &SpinorMetric,
    psi: &[T],
    phi: &[T],
    coframe: &[Multivector<f64>],
) -> Result<Vec<Multivector<T>>> {
    let sig = rep.sig();
    let n = sig.dim();
    let kappa = T::from_f64(rep.dim() as f64 / sig.blade_count() as f64);
    assert_eq!(coframe.len(), n, "coframe must have n legs");
    // Gram matrix g(E^j, E^k) from the symmetric Clifford product.
    let mut gram = vec![vec![0.0f64; n]; n];
    for j in 0..n {
        for k in 0..n {
            let sym = coframe[j]
                .try_mul(&coframe[k])?
                .try_add(&coframe[k].try_mul(&coframe[j])?)?;
            gram[j][k] = 0.5 * sym.scalar_part();
        }
    }
    let ginv = invert_real(&gram)?;
    let reciprocal: Vec<Multivector<f64>> = (0..n)
        .map(|j| {
            let mut r = Multivector::<f64>::zero(sig);
            for k in 0..n {
                r = r.try_add(&coframe[k].scale(&ginv[j][k])).expect("same algebra");
            }
            r
        })
        .collect();
    let mut parts = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let mut part = Multivector::<T>::zero(sig);
        // Ordered multi-indices j1 < … < jp over the coframe legs.
        for mask in grade_masks(sig, p) {
            let legs: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
            let mut rec_blade = Multivector::<f64>::one(sig);
            let mut frame_blade = Multivector::<f64>::one(sig);
            for &j in &legs {
                rec_blade = rec_blade.try_wedge(&reciprocal[j])?;
                frame_blade = frame_blade.try_wedge(&coframe[j])?;
            }
            let extractor = rec_blade.involution(crate::algebra::Involution::Xi)?;
            let extractor_t = extractor.map_scalars(|&v| T::from_f64(v));
            let acted = rep.apply_mv(&extractor_t, psi)?;
            let coeff = metric.inner(phi, &acted).mul(&kappa);
            let contribution = frame_blade
                .map_scalars(|&v| T::from_f64(v))
                .scale(&coeff);
            part = part.try_add(&contribution)?;
        }
        parts.push(part);
    }
    Ok(parts)
}

fn invert_real(m: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty");
        if mag < 1e-12 {
            return Err(crate::error::Error::SingularMatrix { pivot: mag });
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                let upd_a = a[col][j];
                let upd_i = inv[col][j];
                a[r][j] -= f * upd_a;
                inv[r][j] -= f * upd_i;
            }
        }
    }
    Ok(inv)
}

/// Max coefficient magnitude of a multivector with lifted scalars.
pub fn mv_max_abs<T: AdScalar>(mv: &Multivector<T>) -> f64 {
    mv.coeffs().iter().map(|c| c.abs_val()).fold(0.0, f64::max)
}

/// Max coefficient distance between two multivectors.
pub fn mv_distance<T: AdScalar>(a: &Multivector<T>, b: &Multivector<T>) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| x.sub(y).abs_val())
        .fold(0.0, f64::max)
}

/// Grade-resolved distance, useful for naming the failing degree.
pub fn mv_grade_distance<T: AdScalar>(a: &Multivector<T>, b: &Multivector<T>, p: usize) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .enumerate()
        .filter(|(mask, _)| blade_grade(*mask) == p)
        .map(|(_, (x, y))| x.sub(y).abs_val())
        .fold(0.0, f64::max)
}
