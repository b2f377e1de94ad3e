//! Concrete pseudo-Riemannian charts: flat space in any admitted signature
//! and polar charts of the unit round 2- and 3-spheres.
//!
//! Each chart supplies a g-orthonormal frame {X_a} as coordinate-vector
//! coefficients (X_a = Σ_μ E_a^μ ∂_μ) and the Levi-Civita spin-connection
//! coefficients ω_{bc}(X_a) in that frame, both evaluated generically so the
//! coordinates may carry forward-mode derivative slots.
//!
//! Polar charts exclude a 0.1-radian margin around the coordinate
//! singularities (poles and the azimuth seam) when sampling.

use crate::algebra::Signature;
use crate::error::{Error, Result};
use crate::scalar::AdScalar;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Margin kept away from polar-chart singularities, in radians.
pub const CHART_MARGIN: f64 = 0.1;

/// The chart catalogue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Flat { plus: usize, minus: usize },
    Sphere2,
    Sphere3,
}

impl Chart {
    pub fn flat(sig: Signature) -> Chart {
        Chart::Flat {
            plus: sig.plus(),
            minus: sig.minus(),
        }
    }

    pub fn parse(s: &str, flat_sig: Option<Signature>) -> Result<Chart> {
        match s {
            "s2" | "sphere2" => Ok(Chart::Sphere2),
            "s3" | "sphere3" => Ok(Chart::Sphere3),
            "flat" => {
                let sig = flat_sig.ok_or_else(|| {
                    Error::Config("flat chart needs a signature (--signature P,Q)".into())
                })?;
                Ok(Chart::flat(sig))
            }
            other => Err(Error::Config(format!(
                "unknown chart '{other}' (expected flat, s2, or s3)"
            ))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Chart::Flat { plus, minus } => format!("flat({plus},{minus})"),
            Chart::Sphere2 => "s2".into(),
            Chart::Sphere3 => "s3".into(),
        }
    }

    pub fn sig(&self) -> Signature {
        match self {
            Chart::Flat { plus, minus } => {
                Signature::new(*plus, *minus).expect("validated at construction")
            }
            Chart::Sphere2 => Signature::new(2, 0).expect("static"),
            Chart::Sphere3 => Signature::new(3, 0).expect("static"),
        }
    }

    pub fn dim(&self) -> usize {
        self.sig().dim()
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Chart::Flat { .. })
    }

    /// Draw a coordinate point in the chart's valid region.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            Chart::Flat { .. } => (0..self.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            Chart::Sphere2 => vec![
                rng.gen_range(CHART_MARGIN..PI - CHART_MARGIN),
                rng.gen_range(CHART_MARGIN..2.0 * PI - CHART_MARGIN),
            ],
            Chart::Sphere3 => vec![
                rng.gen_range(CHART_MARGIN..PI - CHART_MARGIN),
                rng.gen_range(CHART_MARGIN..PI - CHART_MARGIN),
                rng.gen_range(CHART_MARGIN..2.0 * PI - CHART_MARGIN),
            ],
        }
    }

    /// Validate that a coordinate point lies in the chart's valid region.
    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::ChartDimensionMismatch {
                chart: self.label(),
                chart_dim: self.dim(),
                sig_dim: x.len(),
            });
        }
        let polar_ok = |v: f64| v >= CHART_MARGIN && v <= PI - CHART_MARGIN;
        let azimuth_ok = |v: f64| v >= CHART_MARGIN && v <= 2.0 * PI - CHART_MARGIN;
        let ok = match self {
            Chart::Flat { .. } => true,
            Chart::Sphere2 => polar_ok(x[0]) && azimuth_ok(x[1]),
            Chart::Sphere3 => polar_ok(x[0]) && polar_ok(x[1]) && azimuth_ok(x[2]),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::PointOutsideChart {
                chart: self.label(),
                x: x.to_vec(),
            })
        }
    }

    /// Inverse-vielbein coefficients: frame()[a][μ] is the ∂_μ coefficient of
    /// the orthonormal frame leg X_a.
    pub fn frame<T: AdScalar>(&self, x: &[T]) -> Vec<Vec<T>> {
        let n = self.dim();
        let mut e = vec![vec![T::zero(); n]; n];
        match self {
            Chart::Flat { .. } => {
                for (a, row) in e.iter_mut().enumerate() {
                    row[a] = T::one();
                }
            }
            Chart::Sphere2 => {
                // X₁ = ∂_θ, X₂ = (1/sin θ) ∂_φ.
                e[0][0] = T::one();
                e[1][1] = x[0].sin().inv();
            }
            Chart::Sphere3 => {
                // X₁ = ∂_χ, X₂ = (1/sin χ) ∂_θ, X₃ = (1/(sin χ sin θ)) ∂_φ.
                e[0][0] = T::one();
                e[1][1] = x[0].sin().inv();
                e[2][2] = x[0].sin().mul(&x[1].sin()).inv();
            }
        }
        e
    }

    /// Spin-connection coefficients in the orthonormal frame:
    /// connection()[a][b][c] = ω_{bc}(X_a), antisymmetric in (b, c).
    pub fn connection<T: AdScalar>(&self, x: &[T]) -> Vec<Vec<Vec<T>>> {
        let n = self.dim();
        let mut w = vec![vec![vec![T::zero(); n]; n]; n];
        let set = |w: &mut Vec<Vec<Vec<T>>>, a: usize, b: usize, c: usize, v: T| {
            w[a][c][b] = v.neg();
            w[a][b][c] = v;
        };
        match self {
            Chart::Flat { .. } => {}
            Chart::Sphere2 => {
                // ω_{21}(X₂) = cot θ.
                let cot_theta = x[0].cos().mul(&x[0].sin().inv());
                set(&mut w, 1, 1, 0, cot_theta);
            }
            Chart::Sphere3 => {
                // ω_{21}(X₂) = cot χ, ω_{31}(X₃) = cot χ,
                // ω_{32}(X₃) = cot θ / sin χ.
                let cot_chi = x[0].cos().mul(&x[0].sin().inv());
                let cot_theta_csc_chi = x[1]
                    .cos()
                    .mul(&x[1].sin().inv())
                    .mul(&x[0].sin().inv());
                set(&mut w, 1, 1, 0, cot_chi.clone());
                set(&mut w, 2, 2, 0, cot_chi);
                set(&mut w, 2, 2, 1, cot_theta_csc_chi);
            }
        }
        w
    }
}
