//! Weight functions `φ` entering the measure `e^{−φ} dA`.

use alloc::format;
use alloc::vec::Vec;

use crate::convexity::{check_convex, ConvexityReport, ProbeSettings};
use crate::geometry::ConvexDomain;
use crate::{Error, Result, C64};

/// One affine piece `⟨gradient, (x, y)⟩ + offset` of a [`Weight::MaxAffine`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AffinePiece {
    pub gradient: (f64, f64),
    pub offset: f64,
}

impl AffinePiece {
    pub fn eval(&self, z: C64) -> f64 {
        self.gradient.0 * z.re + self.gradient.1 * z.im + self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Weight {
    Zero,
    /// `a x² + b y² + c xy + ⟨linear, (x, y)⟩ + constant`.
    Quadratic {
        a: f64,
        b: f64,
        c: f64,
        linear: (f64, f64),
        constant: f64,
    },
    /// `alpha |z − center|²`.
    ModulusSquared { alpha: f64, center: C64 },
    /// Pointwise maximum of affine pieces.
    MaxAffine { pieces: Vec<AffinePiece> },
}

/// Second Wirtinger derivatives `∂²φ/∂t∂t̄` and `∂²φ/∂t²` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComplexHessian {
    pub phi_ttbar: f64,
    pub phi_tt: C64,
}

impl ComplexHessian {
    pub fn new(phi_ttbar: f64, phi_tt: C64) -> Self {
        Self { phi_ttbar, phi_tt }
    }

    /// From the real Hessian entries `φ_xx`, `φ_yy`, `φ_xy`.
    pub fn from_real(phi_xx: f64, phi_yy: f64, phi_xy: f64) -> Self {
        Self {
            phi_ttbar: 0.25 * (phi_xx + phi_yy),
            phi_tt: C64::new(0.25 * (phi_xx - phi_yy), -0.5 * phi_xy),
        }
    }

    /// `φ_tt̄ − |φ_tt|`; nonnegative exactly when the real Hessian is PSD.
    pub fn convexity_margin(&self) -> f64 {
        self.phi_ttbar - self.phi_tt.norm()
    }
}

impl Weight {
    pub fn quadratic(a: f64, b: f64, c: f64) -> Self {
        Weight::Quadratic {
            a,
            b,
            c,
            linear: (0.0, 0.0),
            constant: 0.0,
        }
    }

    /// `φ = x²`, the weight of the Gaussian-strip model kernel.
    pub fn x_squared() -> Self {
        Self::quadratic(1.0, 0.0, 0.0)
    }

    pub fn modulus_squared(alpha: f64, center: C64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidWeight(format!("alpha {alpha} must be nonnegative")));
        }
        Ok(Weight::ModulusSquared { alpha, center })
    }

    pub fn max_affine(pieces: Vec<AffinePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidWeight("max_affine needs at least one piece".into()));
        }
        Ok(Weight::MaxAffine { pieces })
    }

    pub fn eval(&self, z: C64) -> f64 {
        match self {
            Weight::Zero => 0.0,
            Weight::Quadratic {
                a,
                b,
                c,
                linear,
                constant,
            } => {
                let (x, y) = (z.re, z.im);
                a * x * x + b * y * y + c * x * y + linear.0 * x + linear.1 * y + constant
            }
            Weight::ModulusSquared { alpha, center } => alpha * (z - center).norm_sqr(),
            Weight::MaxAffine { pieces } => pieces
                .iter()
                .map(|p| p.eval(z))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, Weight::MaxAffine { .. })
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Weight::Quadratic { a, b, c, .. } => *a >= 0.0 && *b >= 0.0 && 4.0 * a * b >= c * c,
            _ => true,
        }
    }

    /// Non-convex weights are accepted by the kernel pipeline but mark runs as negative controls.
    pub fn is_control(&self) -> bool {
        !self.is_convex()
    }

    pub fn complex_hessian(&self, _z: C64) -> Result<ComplexHessian> {
        match self {
            Weight::Zero => Ok(ComplexHessian::new(0.0, C64::new(0.0, 0.0))),
            Weight::Quadratic { a, b, c, .. } => Ok(ComplexHessian::from_real(2.0 * a, 2.0 * b, *c)),
            Weight::ModulusSquared { alpha, .. } => Ok(ComplexHessian::new(*alpha, C64::new(0.0, 0.0))),
            Weight::MaxAffine { .. } => Err(Error::NoPointwiseHessian),
        }
    }

    /// The weight `z ↦ φ(z + shift)`, in closed form.
    pub fn shifted(&self, shift: C64) -> Weight {
        let (p, q) = (shift.re, shift.im);
        match self {
            Weight::Zero => Weight::Zero,
            Weight::Quadratic {
                a,
                b,
                c,
                linear,
                constant,
            } => Weight::Quadratic {
                a: *a,
                b: *b,
                c: *c,
                linear: (2.0 * a * p + c * q + linear.0, 2.0 * b * q + c * p + linear.1),
                constant: a * p * p + b * q * q + c * p * q + linear.0 * p + linear.1 * q + constant,
            },
            Weight::ModulusSquared { alpha, center } => Weight::ModulusSquared {
                alpha: *alpha,
                center: center - shift,
            },
            Weight::MaxAffine { pieces } => Weight::MaxAffine {
                pieces: pieces
                    .iter()
                    .map(|piece| AffinePiece {
                        gradient: piece.gradient,
                        offset: piece.offset + piece.gradient.0 * p + piece.gradient.1 * q,
                    })
                    .collect(),
            },
        }
    }

    /// Random-segment second-difference probe of `φ` itself.
    pub fn verify_convexity(&self, dom: &ConvexDomain, n_segments: usize, seed: u64) -> Result<ConvexityReport> {
        let settings = ProbeSettings {
            n_segments,
            samples_per_segment: 17,
            boundary_offset: 0.0,
            seed,
        };
        let max_abs = probe_max_abs(self, dom);
        let tol = 1e-10 * (1.0 + max_abs);
        check_convex(|z| Some(self.eval(z)), dom, &settings, tol)
    }
}

fn probe_max_abs(w: &Weight, dom: &ConvexDomain) -> f64 {
    use crate::geometry::Region;
    let (lo, hi) = dom.bounding_box();
    let mut m: f64 = 0.0;
    for i in 0..=8 {
        for j in 0..=8 {
            let z = C64::new(
                lo.re + (hi.re - lo.re) * i as f64 / 8.0,
                lo.im + (hi.im - lo.im) * j as f64 / 8.0,
            );
            m = m.max(w.eval(z).abs());
        }
    }
    m
}
