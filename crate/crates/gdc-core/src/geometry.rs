//! Differential operators on chart fields: covariant derivatives of spinor
//! and form fields through forward-mode jets, the Dirac and Penrose
//! operators, the exterior derivative / codifferential / Hodge–de Rham
//! operator on forms, and the curvature data of the spin connection.
//!
//! Derivatives are exact to machine precision: coordinates are lifted to
//! [`Jet`] variables and every field is evaluated generically, so first and
//! (by nesting jets) second derivatives come from the chain rule rather than
//! finite differences. Finite differences appear only in tests, as an
//! independent cross-check.

use num_complex::Complex64;

use crate::algebra::{Multivector, Signature};
use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::rep::GammaRep;
use crate::scalar::{AdScalar, Jet, Scalar};

/// A spinor-valued field on a chart, evaluated through any scalar type so
/// that derivative-carrying coordinates flow through unchanged.
///
/// `eval` must return exactly `spinor_dim` components and must be smooth in
/// the coordinates on the chart's sampling region.
pub trait SpinorField {
    /// Signature of the Clifford algebra acting on the values.
    fn sig(&self) -> Signature;
    /// Number of spinor components returned by `eval`.
    fn spinor_dim(&self) -> usize;
    /// Value at chart coordinates `x` (length = chart dimension).
    fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Vec<T>>;
}

/// A multivector-valued field on a chart (differential forms of mixed
/// degree), evaluated through any scalar type.
pub trait FormField {
    fn sig(&self) -> Signature;
    fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Multivector<T>>;
}

/// Lift coordinates into derivative-carrying jets, one slot per coordinate.
fn lift<T: AdScalar>(x: &[T]) -> Vec<Jet<T>> {
    let n = x.len();
    x.iter()
        .enumerate()
        .map(|(mu, v)| Jet::variable(v.clone(), mu, n))
        .collect()
}

fn complexify(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|v| Complex64::new(*v, 0.0)).collect()
}

/// Combine jet-valued spinor components with the frame and spin connection:
/// ∇_{X_a}ψ = X_a(ψ) + ¼ ω_{bc}(X_a) γ^b γ^c ψ, returned for every leg a.
///
/// `values` holds the spinor components evaluated at `lift(x)`, so slot μ of
/// each jet is the coordinate partial ∂_μ. The quarter-sum over ordered pairs
/// (b, c) collapses to ½ Σ_{b<c} ω_{bc} γ(e^{bc}) by antisymmetry.
fn combine_spinor_covariant<T: AdScalar>(
    chart: Chart,
    rep: &GammaRep,
    x: &[T],
    values: &[Jet<T>],
) -> Result<Vec<Vec<T>>> {
    let n = chart.dim();
    let d = rep.dim();
    if values.len() != d {
        return Err(Error::Internal(format!(
            "spinor field produced {} components for a dimension-{d} representation",
            values.len()
        )));
    }
    let value_now: Vec<T> = values.iter().map(|j| j.val.clone()).collect();
    let frame = chart.frame(x);
    let conn = chart.connection(x);
    let half = T::half();
    let mut out = Vec::with_capacity(n);
    for a in 0..n {
        let mut row: Vec<T> = (0..d)
            .map(|i| {
                let mut acc = T::zero();
                for mu in 0..n {
                    if frame[a][mu].is_zero() {
                        continue;
                    }
                    acc = acc.add(&frame[a][mu].mul(&values[i].partial(mu)));
                }
                acc
            })
            .collect();
        for b in 0..n {
            for c in (b + 1)..n {
                if conn[a][b][c].is_zero() {
                    continue;
                }
                let acted = rep.apply_blade((1 << b) | (1 << c), &value_now);
                let coef = conn[a][b][c].mul(&half);
                for (ri, ai) in row.iter_mut().zip(acted.iter()) {
                    *ri = ri.add(&coef.mul(ai));
                }
            }
        }
        out.push(row);
    }
    Ok(out)
}

/// ∇_{X_a}ψ(x) for every frame leg, with scalars `T` (lift `T` to a jet type
/// to push the whole computation one derivative order higher).
pub fn spinor_covariant_generic<T: AdScalar, F: SpinorField>(
    chart: Chart,
    rep: &GammaRep,
    field: &F,
    x: &[T],
) -> Result<Vec<Vec<T>>> {
    let values = field.eval(&lift(x))?;
    combine_spinor_covariant(chart, rep, x, &values)
}

/// Assemble D̸ψ = Σ_a γ(e^a) ∇_{X_a}ψ from precomputed leg derivatives.
fn dirac_from_covariant<T: AdScalar>(rep: &GammaRep, grads: &[Vec<T>]) -> Vec<T> {
    let d = rep.dim();
    let mut out = vec![T::zero(); d];
    for (a, grad) in grads.iter().enumerate() {
        let acted = rep.apply_blade(1 << a, grad);
        for (oi, ai) in out.iter_mut().zip(acted.iter()) {
            *oi = oi.add(ai);
        }
    }
    out
}

/// The Dirac operator D̸ψ = Σ_a e^a · ∇_{X_a}ψ at `x`.
pub fn dirac_generic<T: AdScalar, F: SpinorField>(
    chart: Chart,
    rep: &GammaRep,
    field: &F,
    x: &[T],
) -> Result<Vec<T>> {
    let grads = spinor_covariant_generic(chart, rep, field, x)?;
    Ok(dirac_from_covariant(rep, &grads))
}

/// The Penrose (twistor) operator P_{X_a}ψ = ∇_{X_a}ψ − (1/n) e_a · D̸ψ for
/// every leg a, where e_a = g_{aa} e^a is the metric-lowered coframe.
pub fn penrose_generic<T: AdScalar, F: SpinorField>(
    chart: Chart,
    rep: &GammaRep,
    field: &F,
    x: &[T],
) -> Result<Vec<Vec<T>>> {
    let n = chart.dim();
    let sig = chart.sig();
    let grads = spinor_covariant_generic(chart, rep, field, x)?;
    let dslash = dirac_from_covariant(rep, &grads);
    let inv_n = T::from_f64(1.0 / n as f64);
    let mut out = Vec::with_capacity(n);
    for (a, grad) in grads.iter().enumerate() {
        let lowered = rep.apply_blade(1 << a, &dslash);
        let coef = inv_n.mul(&T::from_i64(sig.metric_sign(a) as i64));
        let row = grad
            .iter()
            .zip(lowered.iter())
            .map(|(g, l)| g.sub(&coef.mul(l)))
            .collect();
        out.push(row);
    }
    Ok(out)
}

/// ∇_{X_a}(D̸ψ) for every leg, via nested jets (second derivatives of ψ).
pub fn covariant_of_dirac_generic<T: AdScalar, F: SpinorField>(
    chart: Chart,
    rep: &GammaRep,
    field: &F,
    x: &[T],
) -> Result<Vec<Vec<T>>> {
    let values = dirac_generic(chart, rep, field, &lift(x))?;
    combine_spinor_covariant(chart, rep, x, &values)
}

/// Combine jet-valued form coefficients with the frame and spin connection:
/// ∇_{X_a}Φ = X_a(Φ) + ¼ ω_{bc}(X_a) [e^{bc}, Φ], returned for every leg a.
fn combine_form_covariant<T: AdScalar>(
    chart: Chart,
    x: &[T],
    values: &Multivector<Jet<T>>,
) -> Result<Vec<Multivector<T>>> {
    let sig = values.sig();
    let n = chart.dim();
    let frame = chart.frame(x);
    let conn = chart.connection(x);
    let half = T::half();
    let value_now: Multivector<T> = values.map_scalars(|j| j.val.clone());
    let mut out = Vec::with_capacity(n);
    for a in 0..n {
        let mut deriv = Multivector::zero(sig);
        for mask in 0..sig.blade_count() {
            let mut acc = T::zero();
            for mu in 0..n {
                if frame[a][mu].is_zero() {
                    continue;
                }
                acc = acc.add(&frame[a][mu].mul(&values.coeff(mask).partial(mu)));
            }
            deriv.set_coeff(mask, acc);
        }
        for b in 0..n {
            for c in (b + 1)..n {
                if conn[a][b][c].is_zero() {
                    continue;
                }
                let blade = Multivector::<T>::basis(sig, (1 << b) | (1 << c))?;
                let comm = blade
                    .try_mul(&value_now)?
                    .try_sub(&value_now.try_mul(&blade)?)?;
                deriv = deriv.try_add(&comm.scale(&conn[a][b][c].mul(&half)))?;
            }
        }
        out.push(deriv);
    }
    Ok(out)
}

/// ∇_{X_a}Φ(x) for every frame leg.
pub fn form_covariant_generic<T: AdScalar, F: FormField>(
    chart: Chart,
    field: &F,
    x: &[T],
) -> Result<Vec<Multivector<T>>> {
    let values = field.eval(&lift(x))?;
    combine_form_covariant(chart, x, &values)
}

/// Exterior derivative dΦ = Σ_a e^a ∧ ∇_{X_a}Φ.
pub fn exterior_generic<T: AdScalar, F: FormField>(
    chart: Chart,
    field: &F,
    x: &[T],
) -> Result<Multivector<T>> {
    let sig = chart.sig();
    let grads = form_covariant_generic(chart, field, x)?;
    let mut out = Multivector::zero(sig);
    for (a, grad) in grads.iter().enumerate() {
        let ea = Multivector::<T>::coframe(sig, a)?;
        out = out.try_add(&grad.wedge_from_vector(&ea)?)?;
    }
    Ok(out)
}

/// Codifferential δΦ = −Σ_a i_{(e^a)~} ∇_{X_a}Φ.
pub fn codifferential_generic<T: AdScalar, F: FormField>(
    chart: Chart,
    field: &F,
    x: &[T],
) -> Result<Multivector<T>> {
    let sig = chart.sig();
    let grads = form_covariant_generic(chart, field, x)?;
    let mut out = Multivector::zero(sig);
    for (a, grad) in grads.iter().enumerate() {
        let ea = Multivector::<T>::coframe(sig, a)?;
        out = out.try_add(&grad.interior_from(&ea)?)?;
    }
    Ok(out.neg())
}

/// Hodge–de Rham operator d̸Φ = Σ_a e^a · ∇_{X_a}Φ = (d − δ)Φ.
pub fn hodge_de_rham_generic<T: AdScalar, F: FormField>(
    chart: Chart,
    field: &F,
    x: &[T],
) -> Result<Multivector<T>> {
    let sig = chart.sig();
    let grads = form_covariant_generic(chart, field, x)?;
    let mut out = Multivector::zero(sig);
    for (a, grad) in grads.iter().enumerate() {
        let ea = Multivector::<T>::coframe(sig, a)?;
        out = out.try_add(&ea.try_mul(grad)?)?;
    }
    Ok(out)
}

/// The exterior derivative of another form field, itself usable as a form
/// field (so d², δd, … compose through nested jets).
pub struct ExteriorOf<'a, F: FormField> {
    chart: Chart,
    inner: &'a F,
}

impl<'a, F: FormField> ExteriorOf<'a, F> {
    pub fn new(chart: Chart, inner: &'a F) -> Self {
        ExteriorOf { chart, inner }
    }
}

impl<F: FormField> FormField for ExteriorOf<'_, F> {
    fn sig(&self) -> Signature {
        self.inner.sig()
    }
    fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Multivector<T>> {
        exterior_generic(self.chart, self.inner, x)
    }
}

/// The codifferential of another form field, as a form field.
pub struct CodifferentialOf<'a, F: FormField> {
    chart: Chart,
    inner: &'a F,
}

impl<'a, F: FormField> CodifferentialOf<'a, F> {
    pub fn new(chart: Chart, inner: &'a F) -> Self {
        CodifferentialOf { chart, inner }
    }
}

impl<F: FormField> FormField for CodifferentialOf<'_, F> {
    fn sig(&self) -> Signature {
        self.inner.sig()
    }
    fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Multivector<T>> {
        codifferential_generic(self.chart, self.inner, x)
    }
}

/// Value-level differential operators for a fixed chart and representation.
pub struct SpinGeometry<'a> {
    chart: Chart,
    rep: &'a GammaRep,
}

impl<'a> SpinGeometry<'a> {
    /// The chart and representation must share one signature.
    pub fn new(chart: Chart, rep: &'a GammaRep) -> Result<Self> {
        if chart.sig() != rep.sig() {
            return Err(Error::Config(format!(
                "chart {} has signature {} but the representation acts on {}",
                chart.label(),
                chart.sig().label(),
                rep.sig().label()
            )));
        }
        Ok(SpinGeometry { chart, rep })
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn rep(&self) -> &GammaRep {
        self.rep
    }

    /// ψ(x).
    pub fn value<F: SpinorField>(&self, field: &F, x: &[f64]) -> Result<Vec<Complex64>> {
        self.chart.check_point(x)?;
        field.eval(&complexify(x))
    }

    /// ∇_{X_a}ψ(x) for every frame leg a.
    pub fn covariant<F: SpinorField>(&self, field: &F, x: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        self.chart.check_point(x)?;
        spinor_covariant_generic(self.chart, self.rep, field, &complexify(x))
    }

    /// D̸ψ(x).
    pub fn dirac<F: SpinorField>(&self, field: &F, x: &[f64]) -> Result<Vec<Complex64>> {
        self.chart.check_point(x)?;
        dirac_generic(self.chart, self.rep, field, &complexify(x))
    }

    /// P_{X_a}ψ(x) for every frame leg a.
    pub fn penrose<F: SpinorField>(&self, field: &F, x: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        self.chart.check_point(x)?;
        penrose_generic(self.chart, self.rep, field, &complexify(x))
    }

    /// ∇_{X_a}(D̸ψ)(x) for every frame leg a.
    pub fn covariant_of_dirac<F: SpinorField>(
        &self,
        field: &F,
        x: &[f64],
    ) -> Result<Vec<Vec<Complex64>>> {
        self.chart.check_point(x)?;
        covariant_of_dirac_generic(self.chart, self.rep, field, &complexify(x))
    }

    /// ∇_{X_a}Φ(x) for every frame leg a.
    pub fn form_covariant<F: FormField>(
        &self,
        field: &F,
        x: &[f64],
    ) -> Result<Vec<Multivector<Complex64>>> {
        self.chart.check_point(x)?;
        form_covariant_generic(self.chart, field, &complexify(x))
    }

    /// dΦ(x).
    pub fn exterior<F: FormField>(&self, field: &F, x: &[f64]) -> Result<Multivector<Complex64>> {
        self.chart.check_point(x)?;
        exterior_generic(self.chart, field, &complexify(x))
    }

    /// δΦ(x).
    pub fn codifferential<F: FormField>(
        &self,
        field: &F,
        x: &[f64],
    ) -> Result<Multivector<Complex64>> {
        self.chart.check_point(x)?;
        codifferential_generic(self.chart, field, &complexify(x))
    }

    /// d̸Φ(x).
    pub fn hodge_de_rham<F: FormField>(
        &self,
        field: &F,
        x: &[f64],
    ) -> Result<Multivector<Complex64>> {
        self.chart.check_point(x)?;
        hodge_de_rham_generic(self.chart, field, &complexify(x))
    }
}

/// Gauss–Jordan inverse with partial pivoting, generic over derivative-
/// carrying scalars (pivot selection uses the value magnitude).
pub(crate) fn invert_square<T: AdScalar>(m: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let (piv, best) = (col..n)
            .map(|r| (r, a[r][col].abs_val()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty pivot range");
        if best < 1e-12 {
            return Err(Error::SingularMatrix { pivot: best });
        }
        a.swap(col, piv);
        let inv = a[col][col].inv();
        for j in 0..2 * n {
            a[col][j] = a[col][j].mul(&inv);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..2 * n {
                a[r][j] = a[r][j].sub(&f.mul(&a[col][j]));
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Curvature of the spin connection at one point, in frame components.
///
/// All derived quantities use the single convention Ω = dω + ω∧ω with the
/// contractions written below: round unit spheres come out with positive
/// scalar curvature (+2 on S², +6 on S³). This is the sign under which the
/// Killing integrability constraint reads λ² = −ℛ/(4n(n−1)), making the
/// admissible Killing numbers on unit spheres purely imaginary (±i/2); it
/// is recorded in every report.
pub struct Curvature {
    sig: Signature,
    /// omega[a][d][b][c] = Ω_{bc}(X_a, X_d), engine normalization.
    omega: Vec<Vec<Vec<Vec<f64>>>>,
}

/// Evaluate Ω = dω + ω ∧ ω at `x` by differentiating the coordinate
/// components of the connection with first-order jets.
pub fn curvature_at(chart: Chart, x: &[f64]) -> Result<Curvature> {
    chart.check_point(x)?;
    let sig = chart.sig();
    let n = chart.dim();
    let xj: Vec<Jet<f64>> = lift(x);
    let frame_j = chart.frame(&xj);
    let conn_j = chart.connection(&xj);
    // Vielbein rows: v[a][μ] with Σ_μ v[a][μ] frame[b][μ] = δ_ab.
    let frame_t: Vec<Vec<Jet<f64>>> = (0..n)
        .map(|mu| (0..n).map(|a| frame_j[a][mu].clone()).collect())
        .collect();
    let v = invert_square(&frame_t)?;
    // Coordinate components ω_{bcμ} = Σ_a v[a][μ] ω_{bc}(X_a), jet-valued.
    let mut w_co = vec![vec![vec![Jet::<f64>::zero(); n]; n]; n];
    for mu in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut acc = Jet::<f64>::zero();
                for a in 0..n {
                    acc = acc.add(&v[a][mu].mul(&conn_j[a][b][c]));
                }
                w_co[mu][b][c] = acc;
            }
        }
    }
    // R_{bcμν} = ∂_μ ω_{bcν} − ∂_ν ω_{bcμ} + Σ_e g^{ee}(ω_{beμ}ω_{ecν} − ω_{beν}ω_{ecμ}).
    let frame_val: Vec<Vec<f64>> = frame_j
        .iter()
        .map(|row| row.iter().map(|j| j.val).collect())
        .collect();
    let mut omega = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for b in 0..n {
        for c in 0..n {
            for mu in 0..n {
                for nu in 0..n {
                    let mut r = w_co[nu][b][c].partial(mu) - w_co[mu][b][c].partial(nu);
                    for e in 0..n {
                        let ge = sig.metric_sign(e) as f64;
                        r += ge
                            * (w_co[mu][b][e].val * w_co[nu][e][c].val
                                - w_co[nu][b][e].val * w_co[mu][e][c].val);
                    }
                    // Frame components: Ω_{bc}(X_a, X_d) = E_a^μ E_d^ν R_{bcμν}.
                    for a in 0..n {
                        for dd in 0..n {
                            omega[a][dd][b][c] += frame_val[a][mu] * frame_val[dd][nu] * r;
                        }
                    }
                }
            }
        }
    }
    Ok(Curvature { sig, omega })
}

impl Curvature {
    pub fn sig(&self) -> Signature {
        self.sig
    }

    /// Ω_{bc}(X_a, X_d), engine normalization.
    pub fn frame_component(&self, b: usize, c: usize, a: usize, d: usize) -> f64 {
        self.omega[a][d][b][c]
    }

    /// Ricci tensor Ric(X_b, X_d) = Σ_a g^{aa} Ω_{ba}(X_d, X_a).
    pub fn ricci(&self, b: usize, d: usize) -> f64 {
        let n = self.sig.dim();
        (0..n)
            .map(|a| self.sig.metric_sign(a) as f64 * self.omega[d][a][b][a])
            .sum()
    }

    /// Scalar curvature Σ_b g^{bb} Ric(X_b, X_b): +2 on the unit 2-sphere,
    /// +6 on the unit 3-sphere.
    pub fn scalar(&self) -> f64 {
        let n = self.sig.dim();
        (0..n)
            .map(|b| self.sig.metric_sign(b) as f64 * self.ricci(b, b))
            .sum()
    }

    /// Schouten one-forms K_a = (1/(n−2)) (ℛ/(2(n−1)) e_a − P_a), with
    /// P_a = Σ_b Ric(X_a, X_b) e^b. Defined for n ≥ 3 only.
    pub fn schouten(&self) -> Result<Vec<Multivector<f64>>> {
        let n = self.sig.dim();
        if n < 3 {
            return Err(Error::SchoutenDimension { dim: n });
        }
        let scalar = self.scalar();
        let lead = scalar / (2.0 * (n as f64 - 1.0));
        let inv = 1.0 / (n as f64 - 2.0);
        let mut out = Vec::with_capacity(n);
        for a in 0..n {
            let mut k = Multivector::<f64>::zero(self.sig);
            for b in 0..n {
                let mut coeff = -self.ricci(a, b);
                if a == b {
                    coeff += lead * self.sig.metric_sign(a) as f64;
                }
                k.set_coeff(1 << b, inv * coeff);
            }
            out.push(k);
        }
        Ok(out)
    }
}

/// Max frame component of the torsion two-form T^a = de^a + ω^a_b ∧ e^b at
/// `x`; the connection is Levi-Civita exactly when this vanishes.
pub fn cartan_torsion_residual(chart: Chart, x: &[f64]) -> Result<f64> {
    chart.check_point(x)?;
    let sig = chart.sig();
    let n = chart.dim();
    let xj: Vec<Jet<f64>> = lift(x);
    let frame_j = chart.frame(&xj);
    let conn_j = chart.connection(&xj);
    let frame_t: Vec<Vec<Jet<f64>>> = (0..n)
        .map(|mu| (0..n).map(|a| frame_j[a][mu].clone()).collect())
        .collect();
    let v = invert_square(&frame_t)?;
    let mut w_co = vec![vec![vec![Jet::<f64>::zero(); n]; n]; n];
    for mu in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut acc = Jet::<f64>::zero();
                for a in 0..n {
                    acc = acc.add(&v[a][mu].mul(&conn_j[a][b][c]));
                }
                w_co[mu][b][c] = acc;
            }
        }
    }
    let mut worst = 0.0f64;
    for a in 0..n {
        let ga = sig.metric_sign(a) as f64;
        for mu in 0..n {
            for nu in (mu + 1)..n {
                // T^a(∂_μ, ∂_ν) = ∂_μ V^a_ν − ∂_ν V^a_μ
                //               + g^{aa} Σ_b (ω_{abμ} V^b_ν − ω_{abν} V^b_μ).
                let mut t = v[a][nu].partial(mu) - v[a][mu].partial(nu);
                for b in 0..n {
                    t += ga * (w_co[mu][a][b].val * v[b][nu].val
                        - w_co[nu][a][b].val * v[b][mu].val);
                }
                worst = worst.max(t.abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Smooth test field with complex mixing of all coordinates.
    struct TrigField {
        sig: Signature,
        dim: usize,
        phase: f64,
    }

    impl TrigField {
        fn new(sig: Signature, dim: usize) -> Self {
            TrigField { sig, dim, phase: 0.0 }
        }
    }

    impl SpinorField for TrigField {
        fn sig(&self) -> Signature {
            self.sig
        }
        fn spinor_dim(&self) -> usize {
            self.dim
        }
        fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Vec<T>> {
            Ok((0..self.dim)
                .map(|i| {
                    let mut acc = T::from_f64(0.1 * (i as f64 + 1.0) + self.phase);
                    for (mu, xv) in x.iter().enumerate() {
                        let k =
                            T::from_f64(0.7 + 0.3 * i as f64 + 0.2 * mu as f64 + self.phase);
                        let weight =
                            T::from_c(Complex64::new(0.4, 0.1 * (mu as f64 + 1.0)));
                        acc = acc.add(&xv.mul(&k).sin().mul(&weight));
                        acc = acc.add(&xv.cos().mul(&T::from_f64(0.05 * (i as f64 + 1.0))));
                    }
                    acc
                })
                .collect())
        }
    }

    /// ψ(x) = ψ₀ + x̃·ψ₁ on a flat chart, with x̃ = Σ_a g_{aa} x^a e^a.
    struct LinearField<'a> {
        rep: &'a GammaRep,
        psi0: Vec<Complex64>,
        psi1: Vec<Complex64>,
    }

    impl SpinorField for LinearField<'_> {
        fn sig(&self) -> Signature {
            self.rep.sig()
        }
        fn spinor_dim(&self) -> usize {
            self.rep.dim()
        }
        fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Vec<T>> {
            let sig = self.rep.sig();
            let mut xt = Multivector::<T>::zero(sig);
            for (a, xv) in x.iter().enumerate() {
                let g = T::from_i64(sig.metric_sign(a) as i64);
                xt.set_coeff(1 << a, xv.mul(&g));
            }
            let psi1: Vec<T> = self.psi1.iter().map(|v| T::from_c(*v)).collect();
            let moved = self.rep.apply_mv(&xt, &psi1)?;
            Ok(self
                .psi0
                .iter()
                .zip(moved.iter())
                .map(|(p0, m)| T::from_c(*p0).add(m))
                .collect())
        }
    }

    /// Mixed-degree form field with a smooth coefficient on every blade.
    struct TrigForm {
        sig: Signature,
    }

    impl FormField for TrigForm {
        fn sig(&self) -> Signature {
            self.sig
        }
        fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Multivector<T>> {
            let mut out = Multivector::zero(self.sig);
            for mask in 0..self.sig.blade_count() {
                let mut acc = T::from_f64(0.2 + 0.1 * mask as f64);
                for (mu, xv) in x.iter().enumerate() {
                    let k = T::from_f64(0.5 + 0.17 * mask as f64 + 0.23 * mu as f64);
                    acc = acc.add(&xv.mul(&k).sin().mul(&T::from_f64(0.6)));
                    acc = acc.add(&xv.mul(&T::from_f64(0.31 + 0.07 * mu as f64)).cos());
                }
                out.set_coeff(mask, acc);
            }
            Ok(out)
        }
    }

    fn max_abs(v: &[Complex64]) -> f64 {
        v.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn rows_distance(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
        a.iter()
            .zip(b.iter())
            .flat_map(|(ra, rb)| ra.iter().zip(rb.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    /// Central-difference leg derivatives: coordinate partials by finite
    /// differences, then the same frame/connection combination as the jets.
    fn fd_covariant<F: SpinorField>(
        chart: Chart,
        rep: &GammaRep,
        field: &F,
        x: &[f64],
        h: f64,
    ) -> Result<Vec<Vec<Complex64>>> {
        let n = chart.dim();
        let xc = complexify(x);
        let base = field.eval(&xc)?;
        let mut fake: Vec<Jet<Complex64>> = base
            .iter()
            .map(|v| Jet {
                val: *v,
                d: vec![Complex64::new(0.0, 0.0); n],
            })
            .collect();
        for mu in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[mu] += h;
            xm[mu] -= h;
            let fp = field.eval(&complexify(&xp))?;
            let fm = field.eval(&complexify(&xm))?;
            for (i, slot) in fake.iter_mut().enumerate() {
                slot.d[mu] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        combine_spinor_covariant(chart, rep, &xc, &fake)
    }

    #[test]
    fn flat_covariant_matches_coordinate_partials() {
        let sig = Signature::new(1, 2).unwrap();
        let rep = GammaRep::build(sig, crate::classify::ScalarField::Complex).unwrap();
        let geo = SpinGeometry::new(Chart::flat(sig), &rep).unwrap();
        let field = TrigField::new(sig, rep.dim());
        let x = [0.37, -0.81, 0.52];
        let grads = geo.covariant(&field, &x).unwrap();
        // On a flat chart ∇_{X_a} is the plain coordinate partial ∂_a.
        let h = 1e-5;
        let fd = fd_covariant(Chart::flat(sig), &rep, &field, &x, h).unwrap();
        assert!(rows_distance(&grads, &fd) < 1e-8);
        // And the jet partials match an analytically differentiated component:
        // ∂_μ of x·k·sin weight-term is k·cos(kx)·weight, checked through slot 0.
        let k = 0.7;
        let expect =
            Complex64::new(0.4, 0.1) * k * (k * x[0]).cos() - 0.05 * x[0].sin();
        assert!((grads[0][0] - expect).norm() < 1e-12);
    }

    #[test]
    fn dirac_and_penrose_on_linear_coordinate_field() {
        for (p, q) in [(3usize, 0usize), (1, 3)] {
            let sig = Signature::new(p, q).unwrap();
            let rep = GammaRep::build(sig, crate::classify::ScalarField::Complex).unwrap();
            let d = rep.dim();
            let psi0: Vec<Complex64> = (0..d)
                .map(|i| Complex64::new(0.3 + 0.1 * i as f64, -0.2 * i as f64))
                .collect();
            let psi1: Vec<Complex64> = (0..d)
                .map(|i| Complex64::new(0.1 * i as f64 - 0.4, 0.25 + 0.05 * i as f64))
                .collect();
            let field = LinearField { rep: &rep, psi0, psi1: psi1.clone() };
            let geo = SpinGeometry::new(Chart::flat(sig), &rep).unwrap();
            let x = [0.21, -0.64, 0.43, 0.77][..sig.dim()].to_vec();
            // D̸(ψ₀ + x̃ψ₁) = n ψ₁ because Σ_a e^a e_a = n.
            let dslash = geo.dirac(&field, &x).unwrap();
            let n = sig.dim() as f64;
            for (ds, p1) in dslash.iter().zip(psi1.iter()) {
                assert!((ds - n * p1).norm() < 1e-12);
            }
            // The same field is annihilated by every Penrose leg.
            let pen = geo.penrose(&field, &x).unwrap();
            for row in &pen {
                assert!(max_abs(row) < 1e-12, "Penrose residual {}", max_abs(row));
            }
        }
    }

    #[test]
    fn sphere_covariant_matches_central_differences() {
        for chart in [Chart::Sphere2, Chart::Sphere3] {
            let rep = GammaRep::build(chart.sig(), crate::classify::ScalarField::Complex).unwrap();
            let field = TrigField::new(chart.sig(), rep.dim());
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..10 {
                let x = chart.sample(&mut rng);
                let ad = spinor_covariant_generic(chart, &rep, &field, &complexify(&x)).unwrap();
                let fd = fd_covariant(chart, &rep, &field, &x, 1e-5).unwrap();
                assert!(
                    rows_distance(&ad, &fd) < 1e-6,
                    "chart {} point {:?} distance {}",
                    chart.label(),
                    x,
                    rows_distance(&ad, &fd)
                );
            }
        }
    }

    #[test]
    fn second_order_dirac_gradient_matches_central_differences() {
        let chart = Chart::Sphere2;
        let rep = GammaRep::build(chart.sig(), crate::classify::ScalarField::Complex).unwrap();
        let field = TrigField::new(chart.sig(), rep.dim());
        let geo = SpinGeometry::new(chart, &rep).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let x = chart.sample(&mut rng);
            let nested = geo.covariant_of_dirac(&field, &x).unwrap();
            // Finite differences of the Dirac values, then the same
            // frame/connection combination.
            let n = chart.dim();
            let h = 1e-5;
            let base = dirac_generic(chart, &rep, &field, &complexify(&x)).unwrap();
            let mut fake: Vec<Jet<Complex64>> = base
                .iter()
                .map(|v| Jet { val: *v, d: vec![Complex64::new(0.0, 0.0); n] })
                .collect();
            for mu in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[mu] += h;
                xm[mu] -= h;
                let fp = dirac_generic(chart, &rep, &field, &complexify(&xp)).unwrap();
                let fm = dirac_generic(chart, &rep, &field, &complexify(&xm)).unwrap();
                for (i, slot) in fake.iter_mut().enumerate() {
                    slot.d[mu] = (fp[i] - fm[i]) / (2.0 * h);
                }
            }
            let fd = combine_spinor_covariant(chart, &rep, &complexify(&x), &fake).unwrap();
            assert!(rows_distance(&nested, &fd) < 1e-5);
        }
    }

    #[test]
    fn curvature_frozen_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // Unit 2-sphere: scalar +2.
        for _ in 0..5 {
            let x = Chart::Sphere2.sample(&mut rng);
            let c = curvature_at(Chart::Sphere2, &x).unwrap();
            assert!((c.scalar() - 2.0).abs() < 1e-10);
        }
        // Unit 3-sphere: scalar +6, Ricci 2δ_{bd}, symmetric.
        for _ in 0..5 {
            let x = Chart::Sphere3.sample(&mut rng);
            let c = curvature_at(Chart::Sphere3, &x).unwrap();
            assert!((c.scalar() - 6.0).abs() < 1e-9);
            for b in 0..3 {
                for d in 0..3 {
                    let expect = if b == d { 2.0 } else { 0.0 };
                    assert!((c.ricci(b, d) - expect).abs() < 1e-9);
                    assert!((c.ricci(b, d) - c.ricci(d, b)).abs() < 1e-9);
                }
            }
        }
        // Flat charts are curvature-free, whatever the signature.
        for sig in [Signature::new(2, 0).unwrap(), Signature::new(1, 3).unwrap()] {
            let chart = Chart::flat(sig);
            let x = chart.sample(&mut rng);
            let c = curvature_at(chart, &x).unwrap();
            assert!(c.scalar().abs() < 1e-12);
        }
    }

    #[test]
    fn torsion_residual_vanishes_on_all_charts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for chart in [
            Chart::Sphere2,
            Chart::Sphere3,
            Chart::flat(Signature::new(1, 2).unwrap()),
        ] {
            for _ in 0..5 {
                let x = chart.sample(&mut rng);
                let t = cartan_torsion_residual(chart, &x).unwrap();
                assert!(t < 1e-12, "chart {} torsion {}", chart.label(), t);
            }
        }
        // The stored connection coefficients are antisymmetric in (b, c),
        // which together with zero torsion pins Levi-Civita.
        let x = Chart::Sphere3.sample(&mut rng);
        let conn = Chart::Sphere3.connection(&x);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    assert!((conn[a][b][c] + conn[a][c][b]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn schouten_matches_frozen_sphere_value_and_rejects_surfaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // Unit 3-sphere: ℛ = 6, Ric = 2δ give K_a = (6/4 − 2) e_a = −½ e_a;
        // this matches the twistor integrability of its Killing fields
        // (λ = ±i/2): ∇_X D̸ψ = nλ²X̃·ψ = (n/2)·(−½)·X̃·ψ.
        let x = Chart::Sphere3.sample(&mut rng);
        let c = curvature_at(Chart::Sphere3, &x).unwrap();
        let ks = c.schouten().unwrap();
        for (a, k) in ks.iter().enumerate() {
            for mask in 0..c.sig().blade_count() {
                let expect = if mask == 1 << a { -0.5 } else { 0.0 };
                assert!((k.coeff(mask) - expect).abs() < 1e-10);
            }
        }
        // Flat three-space: zero.
        let chart = Chart::flat(Signature::new(3, 0).unwrap());
        let x = chart.sample(&mut rng);
        let ks = curvature_at(chart, &x).unwrap().schouten().unwrap();
        for k in &ks {
            assert!(k.coeffs().iter().all(|v| v.abs() < 1e-12));
        }
        // Two dimensions have no Schouten tensor.
        let x = Chart::Sphere2.sample(&mut rng);
        let err = curvature_at(Chart::Sphere2, &x).unwrap().schouten();
        assert!(matches!(err, Err(Error::SchoutenDimension { dim: 2 })));
    }

    #[test]
    fn exterior_and_codifferential_on_flat_forms() {
        // Φ = f(x) e¹ on flat ℝ^{1,2} (axis 0 is the plus axis):
        // dΦ = Σ_a ∂_a f e^a ∧ e¹ and δΦ = −g^{11} ∂₁ f = +∂₁ f.
        struct OneForm {
            sig: Signature,
        }
        impl FormField for OneForm {
            fn sig(&self) -> Signature {
                self.sig
            }
            fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Multivector<T>> {
                let mut out = Multivector::zero(self.sig);
                // f = sin(x₀) · x₂ + cos(x₁)
                let f = x[0].sin().mul(&x[2]).add(&x[1].cos());
                out.set_coeff(1 << 1, f);
                Ok(out)
            }
        }
        let sig = Signature::new(1, 2).unwrap();
        let chart = Chart::flat(sig);
        let field = OneForm { sig };
        let x = [0.31, -0.42, 0.57];
        let cx = complexify(&x);
        let d = exterior_generic(chart, &field, &cx).unwrap();
        let d0 = x[0].cos() * x[2];
        let d1 = -x[1].sin();
        let d2 = x[0].sin();
        // e⁰∧e¹ carries ∂₀f, e¹∧e² carries −∂₂f (reordered from e²∧e¹).
        assert!((d.coeff(0b011) - Complex64::new(d0, 0.0)).norm() < 1e-13);
        assert!((d.coeff(0b110) - Complex64::new(-d2, 0.0)).norm() < 1e-13);
        assert!(d.coeff(0b101).norm() < 1e-13);
        let del = codifferential_generic(chart, &field, &cx).unwrap();
        assert!((del.coeff(0) - Complex64::new(d1, 0.0)).norm() < 1e-13);
        for mask in 1..sig.blade_count() {
            assert!(del.coeff(mask).norm() < 1e-13);
        }
    }

    #[test]
    fn hodge_de_rham_is_exterior_minus_codifferential() {
        for chart in [
            Chart::Sphere2,
            Chart::Sphere3,
            Chart::flat(Signature::new(1, 2).unwrap()),
        ] {
            let field = TrigForm { sig: chart.sig() };
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            for _ in 0..5 {
                let x = chart.sample(&mut rng);
                let cx = complexify(&x);
                let slash = hodge_de_rham_generic(chart, &field, &cx).unwrap();
                let d = exterior_generic(chart, &field, &cx).unwrap();
                let del = codifferential_generic(chart, &field, &cx).unwrap();
                let combo = d.try_sub(&del).unwrap();
                for mask in 0..chart.sig().blade_count() {
                    assert!((slash.coeff(mask) - combo.coeff(mask)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn exterior_derivative_and_codifferential_square_to_zero() {
        for chart in [Chart::Sphere2, Chart::Sphere3] {
            let field = TrigForm { sig: chart.sig() };
            let d_of = ExteriorOf::new(chart, &field);
            let del_of = CodifferentialOf::new(chart, &field);
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            for _ in 0..3 {
                let x = chart.sample(&mut rng);
                let cx = complexify(&x);
                let dd = exterior_generic(chart, &d_of, &cx).unwrap();
                let deldel = codifferential_generic(chart, &del_of, &cx).unwrap();
                for mask in 0..chart.sig().blade_count() {
                    assert!(
                        dd.coeff(mask).norm() < 1e-10,
                        "d² residual {} on {}",
                        dd.coeff(mask).norm(),
                        chart.label()
                    );
                    assert!(deldel.coeff(mask).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn covariant_derivative_is_metric_compatible() {
        // X_a(ψ, φ) = (∇_{X_a}ψ, φ) + (ψ, ∇_{X_a}φ) for every admissible
        // pairing, on a curved chart.
        let chart = Chart::Sphere2;
        let rep = GammaRep::build(chart.sig(), crate::classify::ScalarField::Complex).unwrap();
        let psi = TrigField::new(chart.sig(), rep.dim());
        let phi = TrigField {
            sig: chart.sig(),
            dim: rep.dim(),
            phase: 0.37,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (class, outcome) in crate::metric::survey_classes(&rep) {
            let metric = match outcome {
                crate::metric::ClassOutcome::Admissible(m) => m,
                crate::metric::ClassOutcome::Inadmissible(_) => continue,
            };
            for _ in 0..10 {
                let x = chart.sample(&mut rng);
                let cx = complexify(&x);
                let xj = lift(&cx);
                let psi_j = psi.eval(&xj).unwrap();
                let phi_j = phi.eval(&xj).unwrap();
                let pairing = metric.inner(&psi_j, &phi_j);
                let frame = chart.frame(&cx);
                let grads_psi =
                    spinor_covariant_generic(chart, &rep, &psi, &cx).unwrap();
                let grads_phi =
                    spinor_covariant_generic(chart, &rep, &phi, &cx).unwrap();
                let psi_now: Vec<Complex64> = psi_j.iter().map(|j| j.val).collect();
                let phi_now: Vec<Complex64> = phi_j.iter().map(|j| j.val).collect();
                for a in 0..chart.dim() {
                    let mut lhs = Complex64::new(0.0, 0.0);
                    for mu in 0..chart.dim() {
                        lhs += frame[a][mu] * pairing.partial(mu);
                    }
                    let rhs = metric.inner(&grads_psi[a], &phi_now)
                        + metric.inner(&psi_now, &grads_phi[a]);
                    assert!(
                        (lhs - rhs).norm() < 1e-11,
                        "class {} leg {a}: {} vs {}",
                        class.label(),
                        lhs,
                        rhs
                    );
                }
            }
        }
    }

    #[test]
    fn geometry_rejects_mismatched_chart_and_representation() {
        let rep = GammaRep::build(
            Signature::new(3, 0).unwrap(),
            crate::classify::ScalarField::Complex,
        )
        .unwrap();
        assert!(SpinGeometry::new(Chart::Sphere2, &rep).is_err());
        assert!(SpinGeometry::new(Chart::Sphere3, &rep).is_ok());
        // Points outside the chart are rejected before evaluation.
        let geo = SpinGeometry::new(Chart::Sphere3, &rep).unwrap();
        let field = TrigField::new(rep.sig(), rep.dim());
        assert!(geo.dirac(&field, &[0.01, 1.0, 1.0]).is_err());
    }
}
