//! Constructors for the distinguished spinor fields on the built-in charts —
//! parallel (constant), flat twistor, Dirac plane wave, Killing fields on
//! round spheres, and the twistor built from a Killing pair — together with
//! the bundle decomposition of spinor-valued one-forms (μ̂, pr₁, pr₂, ψ̂_a).
//!
//! Killing fields are built by transporting a seed spinor along coordinate
//! curves with an 8th-order explicit Runge–Kutta scheme at a fixed step; the
//! construction verifies the curvature constraint on the Killing number and
//! uses path independence of the transport as its correctness witness.

use num_complex::Complex64;
use std::sync::OnceLock;

use crate::algebra::{Multivector, Signature};
use crate::chart::Chart;
use crate::currents::LambdaKind;
use crate::error::{Error, Result};
use crate::geometry::{curvature_at, invert_square, SpinorField};
use crate::matrix::{vec_add, vec_scale, CMat};
use crate::rep::GammaRep;
use crate::scalar::AdScalar;

/// A constant spinor field: the parallel fields of flat charts.
#[derive(Clone)]
pub struct ConstantField {
    sig: Signature,
    values: Vec<Complex64>,
}

impl ConstantField {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

impl SpinorField for ConstantField {
    fn sig(&self) -> Signature {
        self.sig
    }
    fn spinor_dim(&self) -> usize {
        self.values.len()
    }
    fn eval<T: AdScalar>(&self, _x: &[T]) -> Result<Vec<T>> {
        Ok(self.values.iter().map(|v| T::from_c(*v)).collect())
    }
}

/// Build the parallel field ∇ψ = 0 with constant value `psi0`. Only flat
/// charts carry these here; the curved-chart parallels are out of scope.
pub fn make_parallel(chart: Chart, rep: &GammaRep, psi0: &[Complex64]) -> Result<ConstantField> {
    if !chart.is_flat() {
        return Err(Error::UnsupportedOnChart {
            kind: "parallel spinor".into(),
            chart: chart.label(),
        });
    }
    check_field_inputs(chart, rep, psi0)?;
    Ok(ConstantField {
        sig: rep.sig(),
        values: psi0.to_vec(),
    })
}

/// ψ(x) = ψ₀ + x̃·ψ₁ with x̃ = Σ_a g_{aa} x^a e^a: the flat twistor family.
pub struct FlatTwistorField<'a> {
    rep: &'a GammaRep,
    psi0: Vec<Complex64>,
    psi1: Vec<Complex64>,
}

impl FlatTwistorField<'_> {
    pub fn seed_pair(&self) -> (&[Complex64], &[Complex64]) {
        (&self.psi0, &self.psi1)
    }
}

impl SpinorField for FlatTwistorField<'_> {
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

/// Build the flat twistor field ψ₀ + x̃·ψ₁, which satisfies the twistor
/// equation ∇_Xψ = (1/n) X̃·D̸ψ identically.
pub fn make_flat_twistor<'a>(
    chart: Chart,
    rep: &'a GammaRep,
    psi0: &[Complex64],
    psi1: &[Complex64],
) -> Result<FlatTwistorField<'a>> {
    if !chart.is_flat() {
        return Err(Error::UnsupportedOnChart {
            kind: "flat twistor".into(),
            chart: chart.label(),
        });
    }
    check_field_inputs(chart, rep, psi0)?;
    check_field_inputs(chart, rep, psi1)?;
    Ok(FlatTwistorField {
        rep,
        psi0: psi0.to_vec(),
        psi1: psi1.to_vec(),
    })
}

/// ψ(x) = exp(i k·x)·u on a flat chart, solving D̸ψ = mψ.
pub struct PlaneWaveField<'a> {
    rep: &'a GammaRep,
    k: Vec<f64>,
    mass: Complex64,
    u: Vec<Complex64>,
}

impl PlaneWaveField<'_> {
    pub fn mass(&self) -> Complex64 {
        self.mass
    }
    pub fn wave_covector(&self) -> &[f64] {
        &self.k
    }
    pub fn amplitude(&self) -> &[Complex64] {
        &self.u
    }
}

impl SpinorField for PlaneWaveField<'_> {
    fn sig(&self) -> Signature {
        self.rep.sig()
    }
    fn spinor_dim(&self) -> usize {
        self.rep.dim()
    }
    fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Vec<T>> {
        let mut exponent = T::zero();
        for (xv, kv) in x.iter().zip(self.k.iter()) {
            exponent = exponent.add(&xv.mul(&T::from_c(Complex64::new(0.0, *kv))));
        }
        let phase = exponent.exp();
        Ok(self.u.iter().map(|u| phase.mul(&T::from_c(*u))).collect())
    }
}

/// Build every plane-wave solution of D̸ψ = mψ with wave covector `k`:
/// the kernel of the symbol i·γ(K) − m, one field per basis vector of the
/// smallest-singular-value space. An empty kernel reports the smallest
/// singular value and the mass-shell residual |m² + ⟨k, k⟩|.
pub fn make_dirac_plane_wave<'a>(
    chart: Chart,
    rep: &'a GammaRep,
    k: &[f64],
    mass: Complex64,
) -> Result<Vec<PlaneWaveField<'a>>> {
    if !chart.is_flat() {
        return Err(Error::UnsupportedOnChart {
            kind: "dirac plane wave".into(),
            chart: chart.label(),
        });
    }
    let sig = rep.sig();
    if chart.sig() != sig || k.len() != sig.dim() {
        return Err(Error::ChartDimensionMismatch {
            chart: chart.label(),
            chart_dim: chart.dim(),
            sig_dim: sig.dim(),
        });
    }
    let d = rep.dim();
    let mut symbol = CMat::zeros(d, d);
    for (a, kv) in k.iter().enumerate() {
        symbol = symbol.add(&rep.blade(1 << a).scale(Complex64::new(0.0, *kv)));
    }
    symbol = symbol.add(&CMat::identity(d).scale(-mass));
    let triples = symbol.singular_triples()?;
    let sigma_max = triples.last().map(|(s, _)| *s).unwrap_or(0.0);
    // Singular values come from the eigenvalues of the Gram matrix, whose
    // noise floor is ~ε·σ_max²; after the square root a true kernel value
    // shows up as ~√ε·σ_max, so the cut sits well above that.
    let tol = 1e-7 * sigma_max.max(1.0);
    let kernel: Vec<Vec<Complex64>> = triples
        .iter()
        .take_while(|(s, _)| *s <= tol)
        .map(|(_, v)| v.clone())
        .collect();
    if kernel.is_empty() {
        let k_sq: f64 = k
            .iter()
            .enumerate()
            .map(|(a, kv)| sig.metric_sign(a) as f64 * kv * kv)
            .sum();
        return Err(Error::EmptyWaveKernel {
            k: k.to_vec(),
            m: format!("{mass}"),
            sigma_min: triples.first().map(|(s, _)| *s).unwrap_or(0.0),
            shell: (mass * mass + k_sq).norm(),
        });
    }
    Ok(kernel
        .into_iter()
        .map(|u| PlaneWaveField {
            rep,
            k: k.to_vec(),
            mass,
            u,
        })
        .collect())
}

/// 11-stage 8th-order explicit Runge–Kutta tableau (coefficients in ℚ(√21)).
struct Rk8 {
    c: [f64; 11],
    b: [f64; 11],
    a: [[f64; 10]; 11],
}

fn rk8() -> &'static Rk8 {
    static TABLEAU: OnceLock<Rk8> = OnceLock::new();
    TABLEAU.get_or_init(|| {
        let s = 21f64.sqrt();
        let mut a = [[0.0; 10]; 11];
        a[1][..1].copy_from_slice(&[1.0 / 2.0]);
        a[2][..2].copy_from_slice(&[1.0 / 4.0, 1.0 / 4.0]);
        a[3][..3].copy_from_slice(&[
            1.0 / 7.0,
            -(7.0 + 3.0 * s) / 98.0,
            (21.0 + 5.0 * s) / 49.0,
        ]);
        a[4][..4].copy_from_slice(&[
            (11.0 + s) / 84.0,
            0.0,
            (18.0 + 4.0 * s) / 63.0,
            (21.0 - s) / 252.0,
        ]);
        a[5][..5].copy_from_slice(&[
            (5.0 + s) / 48.0,
            0.0,
            (9.0 + s) / 36.0,
            (-231.0 + 14.0 * s) / 360.0,
            (63.0 - 7.0 * s) / 80.0,
        ]);
        a[6][..6].copy_from_slice(&[
            (10.0 - s) / 42.0,
            0.0,
            (-432.0 + 92.0 * s) / 315.0,
            (633.0 - 145.0 * s) / 90.0,
            (-504.0 + 115.0 * s) / 70.0,
            (63.0 - 13.0 * s) / 35.0,
        ]);
        a[7][..7].copy_from_slice(&[
            1.0 / 14.0,
            0.0,
            0.0,
            0.0,
            (14.0 - 3.0 * s) / 126.0,
            (13.0 - 3.0 * s) / 63.0,
            1.0 / 9.0,
        ]);
        a[8][..8].copy_from_slice(&[
            1.0 / 32.0,
            0.0,
            0.0,
            0.0,
            (91.0 - 21.0 * s) / 576.0,
            11.0 / 72.0,
            -(385.0 + 75.0 * s) / 1152.0,
            (63.0 + 13.0 * s) / 128.0,
        ]);
        a[9][..9].copy_from_slice(&[
            1.0 / 14.0,
            0.0,
            0.0,
            0.0,
            1.0 / 9.0,
            -(733.0 + 147.0 * s) / 2205.0,
            (515.0 + 111.0 * s) / 504.0,
            -(51.0 + 11.0 * s) / 56.0,
            (132.0 + 28.0 * s) / 245.0,
        ]);
        a[10].copy_from_slice(&[
            0.0,
            0.0,
            0.0,
            0.0,
            (-42.0 + 7.0 * s) / 18.0,
            (-18.0 + 28.0 * s) / 45.0,
            -(273.0 + 53.0 * s) / 72.0,
            (301.0 + 53.0 * s) / 72.0,
            (28.0 - 28.0 * s) / 45.0,
            (49.0 - 7.0 * s) / 18.0,
        ]);
        Rk8 {
            c: [
                0.0,
                1.0 / 2.0,
                1.0 / 2.0,
                (7.0 + s) / 14.0,
                (7.0 + s) / 14.0,
                1.0 / 2.0,
                (7.0 - s) / 14.0,
                (7.0 - s) / 14.0,
                1.0 / 2.0,
                (7.0 + s) / 14.0,
                1.0,
            ],
            b: [
                1.0 / 20.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                49.0 / 180.0,
                16.0 / 45.0,
                49.0 / 180.0,
                1.0 / 20.0,
            ],
            a,
        }
    })
}

/// Integrate y' = f(t, y) over `steps` equal steps of width `h` starting at
/// (t0, y0), through any derivative-carrying scalar type.
fn rk8_integrate<T: AdScalar, F>(f: &F, t0: &T, y0: Vec<T>, h: &T, steps: usize) -> Result<Vec<T>>
where
    F: Fn(&T, &[T]) -> Result<Vec<T>>,
{
    let tab = rk8();
    let mut t = t0.clone();
    let mut y = y0;
    for _ in 0..steps {
        let mut stages: Vec<Vec<T>> = Vec::with_capacity(11);
        for i in 0..11 {
            let mut yi = y.clone();
            for (j, stage) in stages.iter().enumerate() {
                let w = tab.a[i][j];
                if w == 0.0 {
                    continue;
                }
                yi = vec_add(&yi, &vec_scale(stage, &h.mul(&T::from_f64(w))));
            }
            let ti = t.add(&h.mul(&T::from_f64(tab.c[i])));
            stages.push(f(&ti, &yi)?);
        }
        for (i, stage) in stages.iter().enumerate() {
            if tab.b[i] == 0.0 {
                continue;
            }
            y = vec_add(&y, &vec_scale(stage, &h.mul(&T::from_f64(tab.b[i]))));
        }
        t = t.add(h);
    }
    Ok(y)
}

/// A Killing spinor field ∇_{X}ψ = λ X̃·ψ on a chart whose curvature admits
/// λ, realized by coordinate-curve transport of a seed value.
pub struct KillingField<'a> {
    rep: &'a GammaRep,
    chart: Chart,
    lambda: Complex64,
    base: Vec<f64>,
    seed: Vec<Complex64>,
    step: f64,
    witness_deviation: f64,
}

impl KillingField<'_> {
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    /// Endpoint disagreement between the two leg orderings measured at
    /// construction time (the integrability witness).
    pub fn witness_deviation(&self) -> f64 {
        self.witness_deviation
    }

    /// ∂_μψ from the defining equation at coordinates `coords`:
    /// ∂_μ = Σ_a V^a_μ X_a and X_a(ψ) = λ e_a·ψ − ¼ ω_{bc}(X_a) e^{bc}·ψ.
    fn coordinate_rhs<T: AdScalar>(&self, coords: &[T], mu: usize, psi: &[T]) -> Result<Vec<T>> {
        let sig = self.rep.sig();
        let n = sig.dim();
        let frame = self.chart.frame(coords);
        let frame_t: Vec<Vec<T>> = (0..n)
            .map(|m| (0..n).map(|a| frame[a][m].clone()).collect())
            .collect();
        let vielbein = invert_square(&frame_t)?;
        let conn = self.chart.connection(coords);
        let lam = T::from_c(self.lambda);
        let half = T::half();
        let mut out = vec![T::zero(); psi.len()];
        for a in 0..n {
            if vielbein[a][mu].is_zero() {
                continue;
            }
            let lowered = T::from_i64(sig.metric_sign(a) as i64);
            let mut leg = vec_scale(
                &self.rep.apply_blade(1 << a, psi),
                &lam.mul(&lowered),
            );
            for b in 0..n {
                for c in (b + 1)..n {
                    if conn[a][b][c].is_zero() {
                        continue;
                    }
                    let acted = self.rep.apply_blade((1 << b) | (1 << c), psi);
                    let w = conn[a][b][c].mul(&half).neg();
                    leg = vec_add(&leg, &vec_scale(&acted, &w));
                }
            }
            out = vec_add(&out, &vec_scale(&leg, &vielbein[a][mu]));
        }
        Ok(out)
    }

    /// Transport the seed from the base point to `x`, moving one coordinate
    /// at a time in the order given by `legs`.
    fn transport<T: AdScalar>(&self, x: &[T], legs: &[usize]) -> Result<Vec<T>> {
        let mut cur: Vec<T> = self.base.iter().map(|v| T::from_f64(*v)).collect();
        let mut psi: Vec<T> = self.seed.iter().map(|v| T::from_c(*v)).collect();
        for &mu in legs {
            let target = x[mu].clone();
            let start = cur[mu].clone();
            let delta = target.sub(&start);
            // A zero-length leg still integrates one step so that derivative
            // seeds riding on the endpoint coordinate propagate.
            let steps = ((delta.abs_val() / self.step).ceil() as usize).max(1);
            let h = delta.mul(&T::from_f64(1.0 / steps as f64));
            // Along the leg the moving coordinate is the integration time.
            let rhs = |t: &T, y: &[T]| -> Result<Vec<T>> {
                let mut coords = cur.clone();
                coords[mu] = t.clone();
                self.coordinate_rhs(&coords, mu, y)
            };
            psi = rk8_integrate(&rhs, &start, psi, &h, steps)?;
            cur[mu] = target;
        }
        Ok(psi)
    }
}

impl SpinorField for KillingField<'_> {
    fn sig(&self) -> Signature {
        self.rep.sig()
    }
    fn spinor_dim(&self) -> usize {
        self.rep.dim()
    }
    fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Vec<T>> {
        let legs: Vec<usize> = (0..self.chart.dim()).collect();
        self.transport(x, &legs)
    }
}

/// The fixed interior point where construction compares leg orderings.
fn witness_point(chart: Chart) -> Vec<f64> {
    use std::f64::consts::PI;
    match chart {
        Chart::Sphere2 => vec![PI - 0.4, 2.0 * PI - 0.5],
        Chart::Sphere3 => vec![PI - 0.4, PI - 0.5, 2.0 * PI - 0.6],
        Chart::Flat { .. } => (0..chart.dim())
            .map(|i| if i % 2 == 0 { 0.8 } else { -0.6 })
            .collect(),
    }
}

/// Build a Killing field by transporting `seed` from `base`.
///
/// The Killing number must be real or purely imaginary, and the chart's
/// scalar curvature must equal −4λ²n(n−1) (so the round unit spheres take
/// λ = ±i/2, and flat charts take λ = 0); the transport is then checked for
/// path independence between two leg orderings before the field is returned.
pub fn make_killing<'a>(
    chart: Chart,
    rep: &'a GammaRep,
    lambda: Complex64,
    base: &[f64],
    seed: &[Complex64],
) -> Result<KillingField<'a>> {
    check_field_inputs(chart, rep, seed)?;
    chart.check_point(base)?;
    LambdaKind::of(lambda)?;
    let n = chart.dim() as f64;
    let required = -4.0 * (lambda * lambda).re * n * (n - 1.0);
    let actual = curvature_at(chart, base)?.scalar();
    if (required - actual).abs() > 1e-8 {
        return Err(Error::KillingConstraint {
            lambda: format!("{lambda}"),
            required,
            actual,
        });
    }
    let mut field = KillingField {
        rep,
        chart,
        lambda,
        base: base.to_vec(),
        seed: seed.to_vec(),
        step: 1e-3,
        witness_deviation: 0.0,
    };
    let w: Vec<Complex64> = witness_point(chart)
        .iter()
        .map(|v| Complex64::new(*v, 0.0))
        .collect();
    let forward: Vec<usize> = (0..chart.dim()).collect();
    let reverse: Vec<usize> = forward.iter().rev().copied().collect();
    let end_fwd = field.transport(&w, &forward)?;
    let end_rev = field.transport(&w, &reverse)?;
    let deviation = end_fwd
        .iter()
        .zip(end_rev.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if deviation > 1e-10 {
        return Err(Error::KillingPathDependence {
            x: witness_point(chart),
            deviation,
        });
    }
    field.witness_deviation = deviation;
    Ok(field)
}

/// ψ = φ₊ + φ₋ for Killing fields of opposite Killing number: a twistor.
pub struct KillingPairField<'a> {
    plus: KillingField<'a>,
    minus: KillingField<'a>,
}

impl<'a> KillingPairField<'a> {
    pub fn lambda(&self) -> Complex64 {
        self.plus.lambda()
    }
    pub fn parts(&self) -> (&KillingField<'a>, &KillingField<'a>) {
        (&self.plus, &self.minus)
    }
}

impl SpinorField for KillingPairField<'_> {
    fn sig(&self) -> Signature {
        self.plus.sig()
    }
    fn spinor_dim(&self) -> usize {
        self.plus.spinor_dim()
    }
    fn eval<T: AdScalar>(&self, x: &[T]) -> Result<Vec<T>> {
        let p = self.plus.eval(x)?;
        let m = self.minus.eval(x)?;
        Ok(p.iter().zip(m.iter()).map(|(a, b)| a.add(b)).collect())
    }
}

/// Combine two Killing fields with opposite Killing numbers on one chart
/// into the twistor field φ₊ + φ₋.
pub fn twistor_from_killing_pair<'a>(
    plus: KillingField<'a>,
    minus: KillingField<'a>,
) -> Result<KillingPairField<'a>> {
    if plus.chart() != minus.chart() {
        return Err(Error::Config(format!(
            "Killing pair lives on different charts: {} vs {}",
            plus.chart().label(),
            minus.chart().label()
        )));
    }
    if (plus.lambda() + minus.lambda()).norm() > 1e-14 {
        return Err(Error::Config(format!(
            "Killing pair needs opposite Killing numbers, got {} and {}",
            plus.lambda(),
            minus.lambda()
        )));
    }
    Ok(KillingPairField { plus, minus })
}

fn check_field_inputs(chart: Chart, rep: &GammaRep, values: &[Complex64]) -> Result<()> {
    if chart.sig() != rep.sig() {
        return Err(Error::ChartDimensionMismatch {
            chart: chart.label(),
            chart_dim: chart.dim(),
            sig_dim: rep.sig().dim(),
        });
    }
    if values.len() != rep.dim() {
        return Err(Error::Internal(format!(
            "spinor value has {} components, representation needs {}",
            values.len(),
            rep.dim()
        )));
    }
    Ok(())
}

/// μ̂: the Clifford contraction of a spinor-valued one-form,
/// Σ_a e^a ⊗ s_a ↦ Σ_a e^a·s_a.
pub fn clifford_contraction<T: AdScalar>(rep: &GammaRep, section: &[Vec<T>]) -> Vec<T> {
    let mut out = vec![T::zero(); rep.dim()];
    for (a, s) in section.iter().enumerate() {
        let acted = rep.apply_blade(1 << a, s);
        for (oi, ai) in out.iter_mut().zip(acted.iter()) {
            *oi = oi.add(ai);
        }
    }
    out
}

/// pr₁: the rank-one projection of a spinor-valued one-form onto the image
/// of Clifford multiplication, component a = (1/n) e_a·μ̂(s).
pub fn project_dirac_part<T: AdScalar>(rep: &GammaRep, section: &[Vec<T>]) -> Vec<Vec<T>> {
    let sig = rep.sig();
    let n = sig.dim();
    let mu = clifford_contraction(rep, section);
    let inv_n = T::from_f64(1.0 / n as f64);
    (0..n)
        .map(|a| {
            let coef = inv_n.mul(&T::from_i64(sig.metric_sign(a) as i64));
            vec_scale(&rep.apply_blade(1 << a, &mu), &coef)
        })
        .collect()
}

/// pr₂ = Id − pr₁: the projection onto the kernel of μ̂ (the twistor bundle).
pub fn project_penrose_part<T: AdScalar>(rep: &GammaRep, section: &[Vec<T>]) -> Vec<Vec<T>> {
    let pr1 = project_dirac_part(rep, section);
    section
        .iter()
        .zip(pr1.iter())
        .map(|(s, p)| s.iter().zip(p.iter()).map(|(si, pi)| si.sub(pi)).collect())
        .collect()
}

/// ψ̂_a = (1/2n)((n−2) e_a·X̃ + n X̃·e_a)·ψ: the pr₂ component of the
/// rank-one section X̃ ⊗ ψ, for grade-1 X̃.
pub fn twistor_component<T: AdScalar>(
    rep: &GammaRep,
    xt: &Multivector<T>,
    psi: &[T],
    a: usize,
) -> Result<Vec<T>> {
    let grades = xt.present_grades();
    if !xt.is_zero() && grades != vec![1] {
        return Err(Error::NotGradeOne { grades });
    }
    let sig = rep.sig();
    let n = sig.dim() as i64;
    let lowered = T::from_i64(sig.metric_sign(a) as i64);
    let xt_psi = rep.apply_mv(xt, psi)?;
    let ea_xt_psi = vec_scale(&rep.apply_blade(1 << a, &xt_psi), &lowered);
    let ea_psi = vec_scale(&rep.apply_blade(1 << a, psi), &lowered);
    let xt_ea_psi = rep.apply_mv(xt, &ea_psi)?;
    let w1 = T::from_i64(n - 2);
    let w2 = T::from_i64(n);
    let scale = T::from_f64(1.0 / (2 * n) as f64);
    Ok(ea_xt_psi
        .iter()
        .zip(xt_ea_psi.iter())
        .map(|(u, v)| w1.mul(u).add(&w2.mul(v)).mul(&scale))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ScalarField;
    use crate::geometry::{
        dirac_generic, penrose_generic, spinor_covariant_generic, SpinGeometry,
    };
    use crate::matrix::vec_max_abs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn complexify(x: &[f64]) -> Vec<Complex64> {
        x.iter().map(|v| cx(*v, 0.0)).collect()
    }

    fn random_spinor(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
        (0..d)
            .map(|_| cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn tableau_rows_sum_to_nodes_and_weights_to_one() {
        let tab = rk8();
        for i in 0..11 {
            let sum: f64 = tab.a[i].iter().sum();
            assert!(
                (sum - tab.c[i]).abs() < 1e-14,
                "row {i} sums to {sum}, node is {}",
                tab.c[i]
            );
        }
        let bsum: f64 = tab.b.iter().sum();
        assert!((bsum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn integrator_converges_at_eighth_order() {
        // y' = cos(t)·y has exact solution exp(sin t); halving the step must
        // shrink the endpoint error by about 2⁸ = 256.
        let f = |t: &Complex64, y: &[Complex64]| -> Result<Vec<Complex64>> {
            Ok(vec![t.cos() * y[0]])
        };
        let t_end = 1.6f64;
        let exact = cx(t_end.sin().exp(), 0.0);
        let mut errs = Vec::new();
        for steps in [8usize, 16] {
            let h = cx(t_end / steps as f64, 0.0);
            let y = rk8_integrate(&f, &cx(0.0, 0.0), vec![cx(1.0, 0.0)], &h, steps).unwrap();
            errs.push((y[0] - exact).norm());
        }
        let ratio = errs[0] / errs[1].max(1e-300);
        assert!(
            errs[1] < 1e-9 && ratio > 128.0 && ratio < 1024.0,
            "errors {errs:?}, ratio {ratio}"
        );
    }

    #[test]
    fn parallel_field_has_zero_derivatives_and_flat_only() {
        let sig = Signature::new(1, 3).unwrap();
        let rep = GammaRep::build(sig, ScalarField::Complex).unwrap();
        let chart = Chart::flat(sig);
        let psi0: Vec<Complex64> = (0..rep.dim()).map(|i| cx(0.3 * i as f64 + 0.1, -0.2)).collect();
        let field = make_parallel(chart, &rep, &psi0).unwrap();
        let geo = SpinGeometry::new(chart, &rep).unwrap();
        let grads = geo.covariant(&field, &[0.3, -0.4, 0.5, 0.9]).unwrap();
        for row in &grads {
            assert!(vec_max_abs(row) < 1e-15);
        }
        let dirac = geo.dirac(&field, &[0.3, -0.4, 0.5, 0.9]).unwrap();
        assert!(vec_max_abs(&dirac) < 1e-15);
        let err = make_parallel(Chart::Sphere2, &GammaRep::build(
            Signature::new(2, 0).unwrap(),
            ScalarField::Complex,
        ).unwrap(), &[cx(1.0, 0.0); 2]);
        assert!(matches!(err, Err(Error::UnsupportedOnChart { .. })));
    }

    #[test]
    fn flat_twistor_satisfies_the_twistor_equation() {
        let sig = Signature::new(1, 3).unwrap();
        let rep = GammaRep::build(sig, ScalarField::Complex).unwrap();
        let chart = Chart::flat(sig);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi0 = random_spinor(&mut rng, rep.dim());
        let psi1 = random_spinor(&mut rng, rep.dim());
        let field = make_flat_twistor(chart, &rep, &psi0, &psi1).unwrap();
        let geo = SpinGeometry::new(chart, &rep).unwrap();
        for _ in 0..10 {
            let x = chart.sample(&mut rng);
            // Twistor equation ⇔ the Penrose operator annihilates the field.
            let pen = geo.penrose(&field, &x).unwrap();
            for row in &pen {
                assert!(vec_max_abs(row) < 1e-12);
            }
            // D̸ψ = n·ψ₁.
            let dirac = geo.dirac(&field, &x).unwrap();
            for (d, p1) in dirac.iter().zip(psi1.iter()) {
                assert!((d - 4.0 * p1).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn plane_wave_solves_the_dirac_equation() {
        let sig = Signature::new(1, 3).unwrap();
        let rep = GammaRep::build(sig, ScalarField::Complex).unwrap();
        let chart = Chart::flat(sig);
        let geo = SpinGeometry::new(chart, &rep).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // Real mass pairs with a spacelike covector: m² = −⟨k, k⟩.
        let k = [0.3, 0.7, -0.4, 0.5];
        let k_sq: f64 = k
            .iter()
            .enumerate()
            .map(|(a, kv)| sig.metric_sign(a) as f64 * kv * kv)
            .sum();
        assert!(k_sq < 0.0);
        let m = cx((-k_sq).sqrt(), 0.0);
        let waves = make_dirac_plane_wave(chart, &rep, &k, m).unwrap();
        assert_eq!(waves.len(), 2, "half the spinor space solves each shell");
        for wave in &waves {
            for _ in 0..5 {
                let x = chart.sample(&mut rng);
                let dirac = geo.dirac(wave, &x).unwrap();
                let value = geo.value(wave, &x).unwrap();
                for (d, v) in dirac.iter().zip(value.iter()) {
                    assert!((d - m * v).norm() < 1e-10, "D̸ψ − mψ = {}", (d - m * v).norm());
                }
            }
        }
        // A timelike covector takes an imaginary mass on the same shell.
        let kt = [0.9, 0.2, 0.1, -0.3];
        let kt_sq: f64 = kt
            .iter()
            .enumerate()
            .map(|(a, kv)| sig.metric_sign(a) as f64 * kv * kv)
            .sum();
        assert!(kt_sq > 0.0);
        let mt = cx(0.0, kt_sq.sqrt());
        let waves = make_dirac_plane_wave(chart, &rep, &kt, mt).unwrap();
        assert!(!waves.is_empty());
        let x = chart.sample(&mut rng);
        let dirac = geo.dirac(&waves[0], &x).unwrap();
        let value = geo.value(&waves[0], &x).unwrap();
        for (d, v) in dirac.iter().zip(value.iter()) {
            assert!((d - mt * v).norm() < 1e-10);
        }
        // Off-shell masses leave an empty kernel with diagnostics.
        let err = make_dirac_plane_wave(chart, &rep, &k, m + cx(0.4, 0.0));
        match err {
            Err(Error::EmptyWaveKernel { sigma_min, shell, .. }) => {
                assert!(sigma_min > 1e-6);
                assert!(shell > 1e-6);
            }
            Err(other) => panic!("expected empty kernel, got {other:?}"),
            Ok(_) => panic!("expected empty kernel, got solutions"),
        }
        // Zero mass with a null covector reproduces a Weyl-type wave.
        let kn = [0.5, 0.5, 0.0, 0.0];
        let waves = make_dirac_plane_wave(chart, &rep, &kn, cx(0.0, 0.0)).unwrap();
        assert!(!waves.is_empty());
    }

    #[test]
    fn killing_constraint_gates_construction() {
        let rep2 = GammaRep::build(Signature::new(2, 0).unwrap(), ScalarField::Complex).unwrap();
        let seed = [cx(0.8, 0.1), cx(-0.3, 0.4)];
        // λ = i/2 is admissible on the unit 2-sphere: λ² = −ℛ/(4n(n−1)) = −¼.
        assert!(make_killing(Chart::Sphere2, &rep2, cx(0.0, 0.5), &[0.9, 0.8], &seed).is_ok());
        // Wrong magnitude fails the curvature constraint.
        let err = make_killing(Chart::Sphere2, &rep2, cx(0.0, 0.7), &[0.9, 0.8], &seed);
        assert!(matches!(err, Err(Error::KillingConstraint { .. })));
        // Real λ needs negatively curved charts, which are out of scope.
        let err = make_killing(Chart::Sphere2, &rep2, cx(0.5, 0.0), &[0.9, 0.8], &seed);
        assert!(matches!(err, Err(Error::KillingConstraint { .. })));
        // Mixed λ is rejected before any curvature comparison.
        let err = make_killing(Chart::Sphere2, &rep2, cx(0.5, 0.5), &[0.9, 0.8], &seed);
        assert!(matches!(err, Err(Error::MixedKillingNumber { .. })));
        // λ = 0 on a flat chart is the parallel limit.
        let sig = Signature::new(2, 0).unwrap();
        let flat = Chart::flat(sig);
        let field = make_killing(flat, &rep2, cx(0.0, 0.0), &[0.2, -0.3], &seed).unwrap();
        let geo = SpinGeometry::new(flat, &rep2).unwrap();
        let grads = geo.covariant(&field, &[0.7, 0.4]).unwrap();
        for row in &grads {
            assert!(vec_max_abs(row) < 1e-12);
        }
    }

    #[test]
    fn killing_transport_satisfies_the_defining_equation() {
        let chart = Chart::Sphere2;
        let rep = GammaRep::build(chart.sig(), ScalarField::Complex).unwrap();
        let lambda = cx(0.0, 0.5);
        let seed = [cx(0.6, -0.2), cx(0.1, 0.7)];
        let field = make_killing(chart, &rep, lambda, &[0.9, 0.8], &seed).unwrap();
        assert!(field.witness_deviation() < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let x = chart.sample(&mut rng);
            let cxs = complexify(&x);
            let grads = spinor_covariant_generic(chart, &rep, &field, &cxs).unwrap();
            let value: Vec<Complex64> = field.eval(&cxs).unwrap();
            for a in 0..chart.dim() {
                // ∇_{X_a}ψ = λ e_a·ψ with e_a = g_{aa} e^a.
                let expected = vec_scale(
                    &rep.apply_blade(1 << a, &value),
                    &(lambda * chart.sig().metric_sign(a) as f64),
                );
                let worst = grads[a]
                    .iter()
                    .zip(expected.iter())
                    .map(|(g, e)| (g - e).norm())
                    .fold(0.0, f64::max);
                assert!(worst < 1e-8, "leg {a} residual {worst}");
            }
            // D̸ψ = nλψ follows by contraction.
            let dirac = dirac_generic(chart, &rep, &field, &cxs).unwrap();
            for (d, v) in dirac.iter().zip(value.iter()) {
                assert!((d - 2.0 * lambda * v).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn killing_pair_is_a_twistor() {
        let chart = Chart::Sphere2;
        let rep = GammaRep::build(chart.sig(), ScalarField::Complex).unwrap();
        let seed_p = [cx(0.7, 0.0), cx(0.2, -0.4)];
        let seed_m = [cx(-0.1, 0.3), cx(0.5, 0.2)];
        let plus = make_killing(chart, &rep, cx(0.0, 0.5), &[0.9, 0.8], &seed_p).unwrap();
        let minus = make_killing(chart, &rep, cx(0.0, -0.5), &[0.9, 0.8], &seed_m).unwrap();
        let pair = twistor_from_killing_pair(plus, minus).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let x = chart.sample(&mut rng);
            let cxs = complexify(&x);
            let pen = penrose_generic(chart, &rep, &pair, &cxs).unwrap();
            for row in &pen {
                assert!(vec_max_abs(row) < 1e-8, "Penrose residual {}", vec_max_abs(row));
            }
            // D̸(φ₊ + φ₋) = nλ(φ₊ − φ₋).
            let dirac = dirac_generic(chart, &rep, &pair, &cxs).unwrap();
            let (p, m) = pair.parts();
            let vp = p.eval(&cxs).unwrap();
            let vm = m.eval(&cxs).unwrap();
            for i in 0..vp.len() {
                let rhs = 2.0 * pair.lambda() * (vp[i] - vm[i]);
                assert!((dirac[i] - rhs).norm() < 1e-8);
            }
        }
        // Mismatched Killing numbers are refused.
        let rep2 = GammaRep::build(chart.sig(), ScalarField::Complex).unwrap();
        let a = make_killing(chart, &rep2, cx(0.0, 0.5), &[0.9, 0.8], &seed_p).unwrap();
        let b = make_killing(chart, &rep2, cx(0.0, 0.5), &[0.9, 0.8], &seed_m).unwrap();
        assert!(matches!(
            twistor_from_killing_pair(a, b),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn bundle_projections_and_twistor_component_identities() {
        let sig = Signature::new(3, 1).unwrap();
        let rep = GammaRep::build(sig, ScalarField::Complex).unwrap();
        let n = sig.dim();
        let d = rep.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            // A general spinor-valued one-form section.
            let section: Vec<Vec<Complex64>> =
                (0..n).map(|_| random_spinor(&mut rng, d)).collect();
            let pr1 = project_dirac_part(&rep, &section);
            let pr2 = project_penrose_part(&rep, &section);
            // pr₁ + pr₂ = Id.
            for a in 0..n {
                for i in 0..d {
                    assert!((pr1[a][i] + pr2[a][i] - section[a][i]).norm() < 1e-13);
                }
            }
            // μ̂∘pr₂ = 0 and μ̂∘pr₁ = μ̂.
            let mu = clifford_contraction(&rep, &section);
            let mu_pr2 = clifford_contraction(&rep, &pr2);
            let mu_pr1 = clifford_contraction(&rep, &pr1);
            assert!(vec_max_abs(&mu_pr2) < 1e-12);
            for i in 0..d {
                assert!((mu_pr1[i] - mu[i]).norm() < 1e-12);
            }
            // Rank-one sections: ψ̂_a equals the pr₂ component of X̃⊗ψ and
            // contracts to zero against the coframe.
            let psi = random_spinor(&mut rng, d);
            let mut xt = Multivector::<Complex64>::zero(sig);
            for a in 0..n {
                xt.set_coeff(1 << a, cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
            let rank_one: Vec<Vec<Complex64>> = (0..n)
                .map(|a| vec_scale(&psi, xt.coeff(1 << a)))
                .collect();
            let pr2_rank_one = project_penrose_part(&rep, &rank_one);
            let hats: Vec<Vec<Complex64>> = (0..n)
                .map(|a| twistor_component(&rep, &xt, &psi, a).unwrap())
                .collect();
            for a in 0..n {
                for i in 0..d {
                    assert!((hats[a][i] - pr2_rank_one[a][i]).norm() < 1e-12);
                }
            }
            let contracted = clifford_contraction(&rep, &hats);
            assert!(vec_max_abs(&contracted) < 1e-12);
            // μ̂(X̃⊗ψ) = X̃·ψ.
            let mu_rank_one = clifford_contraction(&rep, &rank_one);
            let direct = rep.apply_mv(&xt, &psi).unwrap();
            for i in 0..d {
                assert!((mu_rank_one[i] - direct[i]).norm() < 1e-12);
            }
        }
        // Non-grade-1 input is rejected.
        let bad = Multivector::<Complex64>::basis(sig, 0b11).unwrap();
        let psi = random_spinor(&mut rng, d);
        assert!(matches!(
            twistor_component(&rep, &bad, &psi, 0),
            Err(Error::NotGradeOne { .. })
        ));
    }

    #[test]
    fn operator_factorizations_through_the_projections() {
        // μ̂∘pr₁∘∇ = D̸ and pr₂∘∇ = P, on a curved chart with a transported
        // Killing field (the most general in-scope section source).
        let chart = Chart::Sphere2;
        let rep = GammaRep::build(chart.sig(), ScalarField::Complex).unwrap();
        let field = make_killing(
            chart,
            &rep,
            cx(0.0, 0.5),
            &[0.9, 0.8],
            &[cx(0.4, 0.2), cx(-0.6, 0.1)],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..3 {
            let x = chart.sample(&mut rng);
            let cxs = complexify(&x);
            let nabla = spinor_covariant_generic(chart, &rep, &field, &cxs).unwrap();
            let dirac = dirac_generic(chart, &rep, &field, &cxs).unwrap();
            let pen = penrose_generic(chart, &rep, &field, &cxs).unwrap();
            let mu_pr1 = clifford_contraction(&rep, &project_dirac_part(&rep, &nabla));
            for (lhs, rhs) in mu_pr1.iter().zip(dirac.iter()) {
                assert!((lhs - rhs).norm() < 1e-11);
            }
            let pr2 = project_penrose_part(&rep, &nabla);
            for a in 0..chart.dim() {
                for i in 0..rep.dim() {
                    assert!((pr2[a][i] - pen[a][i]).norm() < 1e-11);
                }
            }
        }
    }
}
