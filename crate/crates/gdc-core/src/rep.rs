//! Concrete gamma-matrix representations of Cl(p,q).
//!
//! Real-field backends are built by the classical periodicity recursion
//! (tensoring with 2×2 blocks), then reduced to purely real entries whenever
//! the commutant is ℝ; quaternionic commutants stay in their standard complex
//! embedding of twice the quaternionic dimension. Complex-field backends use
//! the Jordan-Wigner construction of dimension 2^⌊n/2⌋. In every case the
//! generators satisfy γᵃγᵇ + γᵇγᵃ = 2 g^{ab} 1, and the map extends to blades
//! by ordered products, giving an algebra homomorphism.

use crate::algebra::{blade_geometric, Multivector, Signature};
use crate::classify::{classify, AlgebraClass, ScalarField};
use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::scalar::AdScalar;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sigma1() -> CMat {
    CMat::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
}

fn sigma2() -> CMat {
    CMat::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
}

fn sigma3() -> CMat {
    CMat::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]])
}

fn i_sigma2() -> CMat {
    sigma2().scale(c(0.0, 1.0))
}

/// Generators of a backend, kept as (plus block, minus block).
struct RawRep {
    plus: Vec<CMat>,
    minus: Vec<CMat>,
    d: usize,
}

impl RawRep {
    fn trivial() -> Self {
        RawRep {
            plus: Vec::new(),
            minus: Vec::new(),
            d: 1,
        }
    }

    /// Periodicity step Cl(p,q) → Cl(p+1,q+1).
    fn extend_balanced(self) -> Self {
        let id = CMat::identity(self.d);
        let lift = |g: &CMat| sigma1().kron(g);
        RawRep {
            plus: self
                .plus
                .iter()
                .map(lift)
                .chain(std::iter::once(sigma3().kron(&id)))
                .collect(),
            minus: self
                .minus
                .iter()
                .map(lift)
                .chain(std::iter::once(i_sigma2().kron(&id)))
                .collect(),
            d: 2 * self.d,
        }
    }
}

/// Cl(k, 0) backend.
fn positive_definite(k: usize) -> RawRep {
    match k {
        0 => RawRep::trivial(),
        1 => RawRep {
            plus: vec![CMat::from_rows(&[vec![c(1.0, 0.0)]])],
            minus: Vec::new(),
            d: 1,
        },
        2 => RawRep {
            plus: vec![sigma3(), sigma1()],
            minus: Vec::new(),
            d: 2,
        },
        _ => {
            // Cl(k,0) from Cl(0,k-2): plus generators σ₃⊗1, σ₁⊗1, iσ₂⊗β_j.
            let inner = negative_definite(k - 2);
            let id = CMat::identity(inner.d);
            let mut plus = vec![sigma3().kron(&id), sigma1().kron(&id)];
            plus.extend(inner.minus.iter().map(|b| i_sigma2().kron(b)));
            RawRep {
                plus,
                minus: Vec::new(),
                d: 2 * inner.d,
            }
        }
    }
}

/// Cl(0, k) backend.
fn negative_definite(k: usize) -> RawRep {
    match k {
        0 => RawRep::trivial(),
        1 => RawRep {
            plus: Vec::new(),
            minus: vec![CMat::from_rows(&[vec![c(0.0, 1.0)]])],
            d: 1,
        },
        2 => RawRep {
            plus: Vec::new(),
            minus: vec![sigma1().scale(c(0.0, 1.0)), sigma2().scale(c(0.0, 1.0))],
            d: 2,
        },
        _ => {
            // Cl(0,k) from Cl(k-2,0): minus generators iσ₁⊗1, iσ₂⊗1, -iσ₃⊗α_j.
            let inner = positive_definite(k - 2);
            let id = CMat::identity(inner.d);
            let mut minus = vec![
                sigma1().kron(&id).scale(c(0.0, 1.0)),
                sigma2().kron(&id).scale(c(0.0, 1.0)),
            ];
            minus.extend(
                inner
                    .plus
                    .iter()
                    .map(|a| sigma3().kron(a).scale(c(0.0, -1.0))),
            );
            RawRep {
                plus: Vec::new(),
                minus,
                d: 2 * inner.d,
            }
        }
    }
}

fn real_backend(sig: Signature) -> RawRep {
    let (p, q) = (sig.plus(), sig.minus());
    let steps = p.min(q);
    let mut raw = if p >= q {
        positive_definite(p - q)
    } else {
        negative_definite(q - p)
    };
    for _ in 0..steps {
        raw = raw.extend_balanced();
    }
    raw
}

/// Jordan-Wigner chain: n mutually anticommuting square-roots of +1 of size
/// 2^⌊n/2⌋; minus axes are then scaled by i.
fn jordan_wigner(sig: Signature) -> Vec<CMat> {
    let n = sig.dim();
    let m = n / 2;
    let build = |slot: usize, mid: CMat| -> CMat {
        let mut acc = CMat::identity(1);
        for _ in 0..slot {
            acc = acc.kron(&sigma3());
        }
        acc = acc.kron(&mid);
        for _ in (slot + 1)..m {
            acc = acc.kron(&CMat::identity(2));
        }
        acc
    };
    let mut gammas = Vec::with_capacity(n);
    for j in 0..m {
        gammas.push(build(j, sigma1()));
        gammas.push(build(j, sigma2()));
    }
    if n % 2 == 1 {
        let mut acc = CMat::identity(1);
        for _ in 0..m {
            acc = acc.kron(&sigma3());
        }
        gammas.push(acc);
    }
    gammas
        .into_iter()
        .enumerate()
        .map(|(a, g)| {
            if sig.metric_sign(a) < 0 {
                g.scale(c(0.0, 1.0))
            } else {
                g
            }
        })
        .collect()
}

/// A concrete representation: the generator images, the full blade table,
/// and the structural classification it realizes.
pub struct GammaRep {
    sig: Signature,
    field: ScalarField,
    class: AlgebraClass,
    d: usize,
    real_entries: bool,
    gammas: Vec<CMat>,
    blades: Vec<CMat>,
}

impl GammaRep {
    pub fn build(sig: Signature, field: ScalarField) -> Result<Self> {
        if sig.dim() == 0 {
            return Err(Error::TrivialAlgebraRepresentation {
                plus: sig.plus(),
                minus: sig.minus(),
            });
        }
        let class = classify(sig, field);
        let gammas = match field {
            ScalarField::Complex => jordan_wigner(sig),
            ScalarField::Real => {
                let raw = real_backend(sig);
                let mut gs: Vec<CMat> = raw.plus;
                gs.extend(raw.minus);
                if class.backend_real_entries() && gs.iter().any(|g| g.max_imag_abs() > 1e-12) {
                    realify(&gs)?
                } else {
                    gs
                }
            }
        };
        let d = gammas.first().map_or(1, CMat::rows);
        if d != class.backend_dim() {
            return Err(Error::Internal(format!(
                "backend dimension {} disagrees with classification {} for {}",
                d,
                class.backend_dim(),
                sig.label()
            )));
        }
        let real_entries = gammas.iter().all(|g| g.max_imag_abs() < 1e-12);
        let blades = blade_table(sig, d, &gammas);
        Ok(GammaRep {
            sig,
            field,
            class,
            d,
            real_entries,
            gammas,
            blades,
        })
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn class(&self) -> &AlgebraClass {
        &self.class
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn real_entries(&self) -> bool {
        self.real_entries
    }

    pub fn gamma(&self, axis: usize) -> &CMat {
        &self.gammas[axis]
    }

    /// Image of the basis blade with the given mask.
    pub fn blade(&self, mask: usize) -> &CMat {
        &self.blades[mask]
    }

    pub fn volume(&self) -> &CMat {
        &self.blades[self.sig.blade_count() - 1]
    }

    /// Matrix image of a complex-coefficient multivector.
    pub fn matrix_of(&self, mv: &Multivector<Complex64>) -> Result<CMat> {
        self.check_sig(mv.sig())?;
        let mut out = CMat::zeros(self.d, self.d);
        for (mask, coeff) in mv.iter_nz() {
            out = out.add(&self.blades[mask].scale(*coeff));
        }
        Ok(out)
    }

    /// Apply a multivector with lifted scalar coefficients to a spinor of the
    /// same scalar type; blade matrices enter as constants.
    pub fn apply_mv<T: AdScalar>(&self, mv: &Multivector<T>, psi: &[T]) -> Result<Vec<T>> {
        self.check_sig(mv.sig())?;
        let mut out = vec![T::zero(); self.d];
        for (mask, coeff) in mv.iter_nz() {
            let img = self.blades[mask].apply_generic(psi);
            for (o, v) in out.iter_mut().zip(img) {
                *o = o.add(&coeff.mul(&v));
            }
        }
        Ok(out)
    }

    /// Apply a single basis blade.
    pub fn apply_blade<T: AdScalar>(&self, mask: usize, psi: &[T]) -> Vec<T> {
        self.blades[mask].apply_generic(psi)
    }

    fn check_sig(&self, other: Signature) -> Result<()> {
        if self.sig != other {
            return Err(Error::SignatureMismatch {
                lp: self.sig.plus(),
                lm: self.sig.minus(),
                rp: other.plus(),
                rm: other.minus(),
            });
        }
        Ok(())
    }
}

fn blade_table(sig: Signature, d: usize, gammas: &[CMat]) -> Vec<CMat> {
    let count = sig.blade_count();
    let mut blades = vec![CMat::identity(d); count];
    for mask in 1..count {
        let low = mask & mask.wrapping_neg();
        let axis = low.trailing_zeros() as usize;
        let rest = mask & !low;
        // mask = low | rest with `low` the smallest axis: γ_mask = γ_axis γ_rest,
        // and the reordering sign is +1 because axis precedes every axis of rest.
        let (check_mask, sign) = blade_geometric(sig, low, rest);
        debug_assert_eq!(check_mask, mask);
        debug_assert_eq!(sign, 1);
        blades[mask] = gammas[axis].matmul(&blades[rest]);
    }
    blades
}

/// Reduce a complex-entry irreducible backend with real commutant to real
/// entries: find the antilinear structure B with γ̄ᵃB = Bγᵃ and BB̄ = +1,
/// then change basis to a B-fixed real form.
fn realify(gammas: &[CMat]) -> Result<Vec<CMat>> {
    let d = gammas[0].rows();
    // Solve the stacked linear system γ̄ᵃ B - B γᵃ = 0 for B ∈ ℂ^{d×d}.
    let mut system = CMat::zeros(gammas.len() * d * d, d * d);
    for (a, g) in gammas.iter().enumerate() {
        let gc = g.conj();
        for i in 0..d {
            for j in 0..d {
                let row = a * d * d + i * d + j;
                // (γ̄ B)_{ij} = Σ_k γ̄_{ik} B_{kj}; (B γ)_{ij} = Σ_k B_{ik} γ_{kj}.
                for k in 0..d {
                    let cur = system.get(row, k * d + j);
                    system.set(row, k * d + j, cur + gc.get(i, k));
                    let cur = system.get(row, i * d + k);
                    system.set(row, i * d + k, cur - g.get(k, j));
                }
            }
        }
    }
    let ns = system.nullspace(1e-10);
    if ns.len() != 1 {
        return Err(Error::IntertwinerDegenerate {
            class: "real structure".into(),
            dim: ns.len(),
        });
    }
    let mut b = CMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            b.set(i, j, ns[0][i * d + j]);
        }
    }
    // Normalize BB̄ = +1 (c must be real and positive for a real commutant).
    let bb = b.matmul(&b.conj());
    let c0 = bb.get(0, 0);
    if c0.im.abs() > 1e-9 * c0.norm().max(1.0) || c0.re <= 0.0 {
        return Err(Error::Internal(format!(
            "antilinear structure squared to {c0}, expected a positive real"
        )));
    }
    let b = b.scale(c(1.0 / c0.re.sqrt(), 0.0));
    // Fixed vectors of v ↦ B v̄ span a real form; select d independent ones.
    let mut selected: Vec<Vec<Complex64>> = Vec::new();
    let mut real_rows: Vec<Vec<f64>> = Vec::new();
    'outer: for k in 0..d {
        let e_k: Vec<Complex64> = (0..d)
            .map(|i| if i == k { Complex64::ONE } else { Complex64::ZERO })
            .collect();
        let j_ek = b.apply(&e_k.iter().map(|v| v.conj()).collect::<Vec<_>>());
        let cand1: Vec<Complex64> = e_k.iter().zip(&j_ek).map(|(x, y)| x + y).collect();
        let cand2: Vec<Complex64> = e_k
            .iter()
            .zip(&j_ek)
            .map(|(x, y)| (x - y) * c(0.0, 1.0))
            .collect();
        for cand in [cand1, cand2] {
            let coords: Vec<f64> = cand
                .iter()
                .map(|v| v.re)
                .chain(cand.iter().map(|v| v.im))
                .collect();
            let mut trial = real_rows.clone();
            trial.push(coords.clone());
            if rank_f64(&trial, 1e-8) > real_rows.len() {
                real_rows.push(coords);
                selected.push(cand);
                if selected.len() == d {
                    break 'outer;
                }
            }
        }
    }
    if selected.len() != d {
        return Err(Error::Internal(
            "real form of the spinor module has deficient rank".into(),
        ));
    }
    let mut t = CMat::zeros(d, d);
    for (col, v) in selected.iter().enumerate() {
        for (row, &entry) in v.iter().enumerate() {
            t.set(row, col, entry);
        }
    }
    let t_inv = t.inverse()?;
    let mut out = Vec::with_capacity(gammas.len());
    for g in gammas {
        let gr = t_inv.matmul(&g.matmul(&t));
        if gr.max_imag_abs() > 1e-9 {
            return Err(Error::Internal(format!(
                "generator retained imaginary part {:.3e} after real reduction",
                gr.max_imag_abs()
            )));
        }
        // Snap to exactly real entries.
        let mut clean = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                clean.set(i, j, c(gr.get(i, j).re, 0.0));
            }
        }
        out.push(clean);
    }
    Ok(out)
}

fn rank_f64(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let cols = m[0].len();
    let scale = m
        .iter()
        .flat_map(|r| r.iter().map(|v| v.abs()))
        .fold(1.0f64, f64::max);
    let tol = tol * scale;
    let mut rank = 0usize;
    for col in 0..cols {
        let Some((best, mag)) = (rank..m.len())
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if mag <= tol {
            continue;
        }
        m.swap(best, rank);
        let p = m[rank][col];
        for v in m[rank].iter_mut() {
            *v /= p;
        }
        for r in 0..m.len() {
            if r == rank {
                continue;
            }
            let f = m[r][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..cols {
                let upd = m[rank][j];
                m[r][j] -= f * upd;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}
