//! Independent structural oracle: counts primitive idempotents of a real
//! Clifford algebra by explicit splitting inside the algebra itself.
//!
//! Starting from the unit, each idempotent f is tested on its corner algebra
//! fAf: one-dimensional corners are primitive with commutant ℝ; quadratic
//! corners are ℂ or split by root extraction; four-dimensional corners are
//! separated into ℍ versus a split matrix algebra by the signature of the
//! left-multiplication trace form; anything larger is split with spectral
//! projectors of a random corner element. The resulting leaf count and corner
//! dimensions are compared against the closed-form classification — no part
//! of that classification enters here.

use crate::algebra::{Multivector, Signature};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Mv = Multivector<f64>;

/// Outcome of the splitting run.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleOutcome {
    /// Number of primitive idempotents summing to 1.
    pub idempotent_count: usize,
    /// Real dimension of each leaf corner algebra fAf (1, 2, or 4), sorted.
    pub corner_dims: Vec<usize>,
}

/// Count primitive idempotents of Cl(p,q) over ℝ by explicit decomposition.
pub fn count_primitive_idempotents(sig: Signature, seed: u64) -> Result<OracleOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let unit = Mv::one(sig);
    let mut leaves: Vec<usize> = Vec::new();
    split_recursive(sig, &unit, &mut rng, &mut leaves, 0)?;
    leaves.sort_unstable();
    Ok(OracleOutcome {
        idempotent_count: leaves.len(),
        corner_dims: leaves,
    })
}

fn split_recursive(
    sig: Signature,
    f: &Mv,
    rng: &mut ChaCha8Rng,
    leaves: &mut Vec<usize>,
    depth: usize,
) -> Result<()> {
    if depth > 12 {
        return Err(Error::Internal(
            "idempotent splitting exceeded recursion bound".into(),
        ));
    }
    let corner = corner_basis(sig, f);
    match corner.len() {
        0 => Err(Error::Internal("idempotent with empty corner".into())),
        1 => {
            leaves.push(1);
            Ok(())
        }
        2 => split_dim2(sig, f, &corner, rng, leaves, depth),
        4 => split_dim4(sig, f, &corner, rng, leaves, depth),
        _ => {
            let (p, q) = random_split(sig, f, &corner, rng)?;
            split_recursive(sig, &p, rng, leaves, depth + 1)?;
            split_recursive(sig, &q, rng, leaves, depth + 1)
        }
    }
}

/// Basis of fAf in reduced row-echelon form over the blade coordinates.
fn corner_basis(sig: Signature, f: &Mv) -> Vec<Mv> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for mask in 0..sig.blade_count() {
        let blade = Mv::basis(sig, mask).expect("mask in range");
        let v = f.try_mul(&blade).and_then(|x| x.try_mul(f)).expect("same algebra");
        rows.push(v.coeffs().to_vec());
    }
    let rref = row_reduce(rows, 1e-9);
    rref.into_iter()
        .map(|r| Mv::from_coeffs(sig, r).expect("row length matches"))
        .collect()
}

/// Plain RREF returning only the nonzero rows.
fn row_reduce(mut rows: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return rows;
    }
    let cols = rows[0].len();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter().map(|v| v.abs()))
        .fold(1.0f64, f64::max);
    let tol = tol * scale;
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let Some((best, mag)) = (pivot_row..rows.len())
            .map(|r| (r, rows[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if mag <= tol {
            continue;
        }
        rows.swap(best, pivot_row);
        let p = rows[pivot_row][col];
        for v in rows[pivot_row].iter_mut() {
            *v /= p;
        }
        for r in 0..rows.len() {
            if r == pivot_row {
                continue;
            }
            let fac = rows[r][col];
            if fac == 0.0 {
                continue;
            }
            for j in 0..cols {
                let upd = rows[pivot_row][j];
                rows[r][j] -= fac * upd;
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    rows
}

/// Coordinates of v in the RREF corner basis (exact read-off at pivot columns).
fn coords_in(basis: &[Mv], v: &Mv) -> Vec<f64> {
    let pivots: Vec<usize> = basis
        .iter()
        .map(|b| {
            b.coeffs()
                .iter()
                .position(|&c| (c - 1.0).abs() < 1e-6)
                .expect("RREF row has unit pivot")
        })
        .collect();
    pivots.iter().map(|&p| v.coeffs()[p]).collect()
}

fn random_corner_element(basis: &[Mv], rng: &mut ChaCha8Rng) -> Mv {
    let sig = basis[0].sig();
    let mut y = Mv::zero(sig);
    for b in basis {
        let c: f64 = rng.gen_range(-1.0..1.0);
        y = y.try_add(&b.scale(&c)).expect("same algebra");
    }
    y
}

/// Quadratic corner: either ℂ (primitive) or ℝ ⊕ ℝ (split via real roots).
fn split_dim2(
    sig: Signature,
    f: &Mv,
    basis: &[Mv],
    rng: &mut ChaCha8Rng,
    leaves: &mut Vec<usize>,
    depth: usize,
) -> Result<()> {
    // Pick y in fAf independent of f, then solve y² = α f + β y.
    for _ in 0..64 {
        let y = random_corner_element(basis, rng);
        let cf = coords_in(basis, f);
        let cy = coords_in(basis, &y);
        // Independence check: 2x2 determinant of coordinate pairs.
        let det = cf[0] * cy[1] - cf[1] * cy[0];
        if det.abs() < 1e-6 {
            continue;
        }
        let y2 = y.try_mul(&y)?;
        let cy2 = coords_in(basis, &y2);
        // Solve [cf cy] [α β]^T = cy2.
        let alpha = (cy2[0] * cy[1] - cy2[1] * cy[0]) / det;
        let beta = (cf[0] * cy2[1] - cf[1] * cy2[0]) / det;
        let disc = beta * beta + 4.0 * alpha;
        if disc < -1e-9 {
            leaves.push(2);
            return Ok(());
        }
        if disc > 1e-9 {
            let r1 = (beta + disc.sqrt()) / 2.0;
            let r2 = (beta - disc.sqrt()) / 2.0;
            let p = y
                .try_sub(&f.scale(&r2))?
                .scale(&(1.0 / (r1 - r2)));
            let p = polish_idempotent(p, f)?;
            let q = f.try_sub(&p)?;
            split_recursive(sig, &p, rng, leaves, depth + 1)?;
            return split_recursive(sig, &q, rng, leaves, depth + 1);
        }
        // disc ≈ 0 would mean a nilpotent direction; retry with another y.
    }
    Err(Error::Internal(
        "quadratic corner resisted classification".into(),
    ))
}

/// Four-dimensional corner: ℍ versus Mat(2, ℝ), separated by the signature
/// of the trace form tr(L_x L_y) — (1,3) for ℍ, (3,1) for the split algebra.
fn split_dim4(
    sig: Signature,
    f: &Mv,
    basis: &[Mv],
    rng: &mut ChaCha8Rng,
    leaves: &mut Vec<usize>,
    depth: usize,
) -> Result<()> {
    let dim = basis.len();
    let mut form = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let prod = basis[i].try_mul(&basis[j])?;
            let lm = left_mult_matrix(basis, &prod);
            form[(i, j)] = lm.trace();
        }
    }
    let eigs = form
        .symmetric_part()
        .symmetric_eigenvalues();
    let negatives = eigs.iter().filter(|&&e| e < -1e-8).count();
    let positives = eigs.iter().filter(|&&e| e > 1e-8).count();
    match (positives, negatives) {
        (1, 3) => {
            leaves.push(4);
            Ok(())
        }
        (3, 1) => {
            let (p, q) = random_split(sig, f, basis, rng)?;
            split_recursive(sig, &p, rng, leaves, depth + 1)?;
            split_recursive(sig, &q, rng, leaves, depth + 1)
        }
        other => Err(Error::Internal(format!(
            "trace form of a 4-dimensional corner has signature {other:?}"
        ))),
    }
}

/// Matrix of left-multiplication by y on the corner basis.
fn left_mult_matrix(basis: &[Mv], y: &Mv) -> DMatrix<f64> {
    let dim = basis.len();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for (j, b) in basis.iter().enumerate() {
        let prod = y.try_mul(b).expect("same algebra");
        for (i, c) in coords_in(basis, &prod).into_iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    m
}

/// Split a corner with a spectral projector of a random element.
fn random_split(
    sig: Signature,
    f: &Mv,
    basis: &[Mv],
    rng: &mut ChaCha8Rng,
) -> Result<(Mv, Mv)> {
    for _attempt in 0..200 {
        let y = random_corner_element(basis, rng);
        let lm = left_mult_matrix(basis, &y);
        let eigs = lm.complex_eigenvalues();
        // Cluster eigenvalues, then group clusters into conjugation-closed sets.
        let mut reps: Vec<Complex64> = Vec::new();
        for e in eigs.iter() {
            let e = Complex64::new(e.re, e.im);
            if !reps.iter().any(|r| (r - e).norm() < 1e-6) {
                reps.push(e);
            }
        }
        if reps.len() < 2 {
            continue;
        }
        reps.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut groups: Vec<Vec<Complex64>> = Vec::new();
        let mut used = vec![false; reps.len()];
        for i in 0..reps.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let mut group = vec![reps[i]];
            if reps[i].im.abs() > 1e-8 {
                if let Some(j) = (0..reps.len())
                    .find(|&j| !used[j] && (reps[j] - reps[i].conj()).norm() < 1e-6)
                {
                    used[j] = true;
                    group.push(reps[j]);
                }
            }
            groups.push(group);
        }
        if groups.len() < 2 {
            continue;
        }
        // Lagrange projector onto the first group, evaluated in the algebra
        // (f is the corner unit), then polished to a sharp idempotent.
        let selected = groups[0].clone();
        let others: Vec<Complex64> = groups[1..].iter().flatten().copied().collect();
        let fz = f.map_scalars(|&v| Complex64::new(v, 0.0));
        let yz = y.map_scalars(|&v| Complex64::new(v, 0.0));
        let mut proj = Multivector::<Complex64>::zero(sig);
        for &lam in &selected {
            let mut term = fz.clone();
            for &mu in selected.iter().chain(others.iter()) {
                if (mu - lam).norm() < 1e-12 {
                    continue;
                }
                let num = yz.try_sub(&fz.scale(&mu))?;
                term = term.try_mul(&num)?.scale(&(Complex64::ONE / (lam - mu)));
            }
            proj = proj.try_add(&term)?;
        }
        let candidate = proj.map_scalars(|c| c.re);
        let Ok(p) = polish_idempotent(candidate, f) else {
            continue;
        };
        let norm_p = p.coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max);
        let q = f.try_sub(&p)?;
        let norm_q = q.coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max);
        if norm_p < 1e-6 || norm_q < 1e-6 {
            continue;
        }
        return Ok((p, q));
    }
    Err(Error::Internal(
        "no splitting idempotent found after 200 attempts".into(),
    ))
}

/// Newton polish P ← 3P² − 2P³ toward an exact idempotent; verifies P stays
/// in the corner of `f` and is sharply idempotent.
fn polish_idempotent(mut p: Mv, f: &Mv) -> Result<Mv> {
    for _ in 0..60 {
        let p2 = p.try_mul(&p)?;
        let residual = p2
            .try_sub(&p)?
            .coeffs()
            .iter()
            .map(|c| c.abs())
            .fold(0.0, f64::max);
        if residual < 1e-12 {
            // Confirm containment in the corner: f p = p f = p.
            let fp = f.try_mul(&p)?;
            let pf = p.try_mul(f)?;
            let drift = fp
                .try_sub(&p)?
                .coeffs()
                .iter()
                .chain(pf.try_sub(&p)?.coeffs().iter())
                .map(|c| c.abs())
                .fold(0.0, f64::max);
            if drift > 1e-9 {
                return Err(Error::Internal("projector escaped its corner".into()));
            }
            return Ok(p);
        }
        let p3 = p2.try_mul(&p)?;
        p = p2.scale(&3.0).try_sub(&p3.scale(&2.0))?;
    }
    Err(Error::Internal("idempotent polish did not converge".into()))
}
