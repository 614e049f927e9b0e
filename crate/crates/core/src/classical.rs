//! One-variable checks: the hyperbolic metric identity `K = λ²/4π` and the
//! convexity criterion `Re(z f″/f′) ≥ −1` for conformal maps of the disk.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use crate::float::Float;
use crate::geometry::ConvexDomain;
use crate::kernel::{BuildOptions, KernelApprox};
use crate::weights::Weight;
use crate::{Error, Result, C64};

/// Truncated power series `f(z) = Σ a_k z^k`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaylorMap {
    coefficients: Vec<C64>,
}

impl TaylorMap {
    /// Requires `a₁ ≠ 0`.
    pub fn new(coefficients: Vec<C64>) -> Result<Self> {
        if coefficients.len() < 2 || coefficients[1].norm() == 0.0 {
            return Err(Error::InvalidArgument("TaylorMap needs a nonzero a_1".into()));
        }
        if coefficients.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self { coefficients })
    }

    pub fn identity() -> Self {
        Self {
            coefficients: alloc::vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        }
    }

    /// `z/(1 − z)` truncated at `z^truncation`.
    pub fn half_plane(truncation: usize) -> Self {
        let mut c = alloc::vec![C64::new(1.0, 0.0); truncation + 1];
        c[0] = C64::new(0.0, 0.0);
        Self { coefficients: c }
    }

    /// Koebe `z/(1 − z)²` truncated at `z^truncation`.
    pub fn koebe(truncation: usize) -> Self {
        Self {
            coefficients: (0..=truncation).map(|k| C64::new(k as f64, 0.0)).collect(),
        }
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn truncation(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `(f, f′, f″)` at `z` by a single Horner pass.
    pub fn eval_with_derivatives(&self, z: C64) -> (C64, C64, C64) {
        let zero = C64::new(0.0, 0.0);
        let (mut f, mut d1, mut d2) = (zero, zero, zero);
        for a in self.coefficients.iter().rev() {
            d2 = d2 * z + d1 * 2.0;
            d1 = d1 * z + f;
            f = f * z + a;
        }
        (f, d1, d2)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.eval_with_derivatives(z).0
    }

    pub fn derivative(&self, z: C64) -> C64 {
        self.eval_with_derivatives(z).1
    }

    pub fn second_derivative(&self, z: C64) -> C64 {
        self.eval_with_derivatives(z).2
    }

    /// `f(r e^{iθ_k})` for `count` equally spaced angles.
    pub fn image_curve(&self, r: f64, count: usize) -> Vec<C64> {
        (0..count)
            .map(|k| self.eval(C64::from_polar(r, 2.0 * PI * k as f64 / count as f64)))
            .collect()
    }
}

/// `λ_𝔻(z) = 2/(1 − |z|²)`.
pub fn disk_density(z: C64) -> Result<f64> {
    let s = 1.0 - z.norm_sqr();
    if !(s > 0.0) {
        return Err(Error::OutsideDomain);
    }
    Ok(2.0 / s)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HyperbolicDensity {
    Disk,
    /// Density of `f(r𝔻)` where `f` is the map and `r` the radius.
    Pushforward { map: TaylorMap, radius: f64 },
}

impl HyperbolicDensity {
    /// Density at the image point `f(rζ)`, parametrised by `ζ ∈ 𝔻`:
    /// `λ(f(rζ)) = λ_𝔻(ζ) / (r |f′(rζ)|)`.
    pub fn at_preimage(&self, zeta: C64) -> Result<f64> {
        match self {
            HyperbolicDensity::Disk => disk_density(zeta),
            HyperbolicDensity::Pushforward { map, radius } => {
                let d = map.derivative(zeta * *radius).norm() * radius;
                if d < 1e-12 {
                    return Err(Error::DerivativeVanishes);
                }
                Ok(disk_density(zeta)? / d)
            }
        }
    }
}

/// `max |4π K_N(z) − λ(z)²| / λ(z)²` over `probes` in the unit disk.
pub fn verify_metric_identity(probes: &[C64], degree: usize, opts: BuildOptions) -> Result<f64> {
    let k = KernelApprox::build_with(ConvexDomain::unit_disk(), &Weight::Zero, degree, opts)?;
    let mut worst: f64 = 0.0;
    for &z in probes {
        let lam2 = disk_density(z)?.powi(2);
        worst = worst.max((4.0 * PI * k.eval_k(z)? - lam2).abs() / lam2);
    }
    Ok(worst)
}

/// Identity check on `Ω = f(r𝔻)`, approximated by the polygon through
/// `vertices` image points of `|ζ| = r`. Probes are preimages `ζ ∈ 𝔻`.
pub fn verify_pushforward_identity(
    map: &TaylorMap,
    radius: f64,
    vertices: usize,
    probes: &[C64],
    degree: usize,
    opts: BuildOptions,
) -> Result<f64> {
    let dom = ConvexDomain::polygon(map.image_curve(radius, vertices))?;
    let k = KernelApprox::build_with(dom, &Weight::Zero, degree, opts)?;
    let density = HyperbolicDensity::Pushforward {
        map: map.clone(),
        radius,
    };
    let mut worst: f64 = 0.0;
    for &zeta in probes {
        let lam2 = density.at_preimage(zeta)?.powi(2);
        let z = map.eval(zeta * radius);
        worst = worst.max((4.0 * PI * k.eval_k(z)? - lam2).abs() / lam2);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct UnivalenceScan {
    /// `min Re(z f″(z)/f′(z))` over the grid.
    pub min_value: f64,
    pub witness: C64,
    pub grid_points: usize,
}

impl UnivalenceScan {
    pub fn satisfies(&self, tol: f64) -> bool {
        self.min_value >= -1.0 - tol
    }
}

/// Scans `Re(z f″/f′)` on circles `|z| = r` for each `r` in `r_grid`.
pub fn univalence_criterion_scan(f: &TaylorMap, r_grid: &[f64], theta_count: usize) -> Result<UnivalenceScan> {
    if r_grid.is_empty() || theta_count == 0 {
        return Err(Error::EmptyGrid);
    }
    let mut best = UnivalenceScan {
        min_value: f64::INFINITY,
        witness: C64::new(0.0, 0.0),
        grid_points: 0,
    };
    for &r in r_grid {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::InvalidArgument(format!("radius {r} outside [0, 1)")));
        }
        for k in 0..theta_count {
            let z = C64::from_polar(r, 2.0 * PI * k as f64 / theta_count as f64);
            let (_, d1, d2) = f.eval_with_derivatives(z);
            if d1.norm() < 1e-12 {
                return Err(Error::DerivativeVanishes);
            }
            let v = (z * d2 / d1).re;
            best.grid_points += 1;
            if v < best.min_value {
                best.min_value = v;
                best.witness = z;
            }
        }
    }
    Ok(best)
}

/// Whether the closed polygonal curve turns consistently left, allowing
/// cross products down to `−tol · |e₁||e₂|`.
pub fn curve_is_convex(points: &[C64], tol: f64) -> bool {
    let n = points.len();
    if n < 3 {
        return false;
    }
    (0..n).all(|i| {
        let e1 = points[(i + 1) % n] - points[i];
        let e2 = points[(i + 2) % n] - points[(i + 1) % n];
        e1.re * e2.im - e1.im * e2.re >= -tol * e1.norm() * e2.norm()
    })
}
