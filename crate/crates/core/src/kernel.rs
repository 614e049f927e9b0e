//! Finite-rank approximations of the weighted Bergman kernel.
//!
//! `K_N` is the reproducing kernel of the span of `((z − c)/s)^j`,
//! `j = 0..=N`, in `L²(Ω, e^{−φ} dA)`, where `c` is the domain centroid and
//! `s` its half-diameter. The inner product is realised by a quadrature rule
//! refined until the diagonal Gram integrands are stable, and the basis is
//! orthonormalised through a Householder QR of the weighted Vandermonde
//!
//! ```text
//! V_ij = sqrt(w_i e^{−φ(x_i)}) · b_j(x_i)
//! ```
//!
//! so that `V = QR` and `e(z) = R^{−T} b(z)` are orthonormal functions.
//! The Gram matrix is never formed.
//!
//! Since `K_N(z) = sup{|f(z)|² : f ∈ span, ‖f‖ ≤ 1}`, it increases with `N`
//! and, for exact integration, decreases as the domain or the weight grows.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use crate::float::Float;
use crate::geometry::{Domain, Region};
use crate::linalg::{householder_r, ColMatrix, UpperTriangular};
use crate::quadrature::{refine_until_stable, QuadratureRule};
use crate::weights::Weight;
use crate::{Error, Result, C64};

/// Default probe offset from the boundary, as a fraction of the diameter.
pub const DEFAULT_BOUNDARY_OFFSET: f64 = 0.05;
/// Default stability target for the Gram integrands.
pub const DEFAULT_REL_TOL: f64 = 1e-11;
/// Relative threshold on the diagonal of `R` below which the basis is rejected.
pub const RANK_TOL: f64 = 1e-13;

/// Default truncation degree for a domain: 30 for disks and ellipses, 40 for polygons.
pub fn default_degree(dom: &Domain) -> usize {
    match dom {
        Domain::Convex(d) if !matches!(d.shape(), crate::geometry::Shape::Polygon { .. }) => 30,
        _ => 40,
    }
}

/// Knobs for [`KernelApprox::build_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BuildOptions {
    pub rel_tol: f64,
    /// Probe offset as a fraction of the diameter.
    pub boundary_offset: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            boundary_offset: DEFAULT_BOUNDARY_OFFSET,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KernelApprox {
    domain: Domain,
    weight: Weight,
    degree: usize,
    center: C64,
    scale: f64,
    r: UpperTriangular,
    rule: QuadratureRule,
    gram_stability: f64,
    boundary_offset: f64,
}

/// Build diagnostics suitable for reports.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KernelDiagnostics {
    pub degree: usize,
    pub gram_stability: f64,
    pub rule_size: usize,
    pub rule_degree: usize,
    /// `max R_jj / min R_jj`.
    pub diagonal_spread: f64,
    pub boundary_offset: f64,
}

impl KernelApprox {
    pub fn build(dom: impl Into<Domain>, weight: &Weight, degree: usize, rel_tol: f64) -> Result<Self> {
        Self::build_with(
            dom,
            weight,
            degree,
            BuildOptions {
                rel_tol,
                ..BuildOptions::default()
            },
        )
    }

    pub fn build_with(dom: impl Into<Domain>, weight: &Weight, degree: usize, opts: BuildOptions) -> Result<Self> {
        let domain: Domain = dom.into();
        let center = domain.centroid();
        let scale = 0.5 * domain.diameter();
        let n = degree + 1;
        let basis = |z: C64, out: &mut [C64]| {
            let w = (z - center) / scale;
            let mut p = C64::new(1.0, 0.0);
            for o in out.iter_mut() {
                *o = p;
                p *= w;
            }
        };

        let probes = |z: C64, out: &mut [f64]| {
            let w2 = ((z - center) / scale).norm_sqr();
            let mut p = (-weight.eval(z)).exp();
            for o in out.iter_mut() {
                *o = p;
                p *= w2;
            }
        };
        let stable = refine_until_stable(&domain, Some(weight), 2 * degree, n, probes, opts.rel_tol)?;
        let rule = stable.rule;

        let m = rule.len();
        let mut v = ColMatrix::zeros(m, n);
        let mut b = vec![C64::new(0.0, 0.0); n];
        for (i, (z, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            let sw = (w * (-weight.eval(*z)).exp()).sqrt();
            basis(*z, &mut b);
            for (j, bj) in b.iter().enumerate() {
                v.set(i, j, bj * sw);
            }
        }
        let r = householder_r(v, RANK_TOL)?;
        Ok(Self {
            boundary_offset: opts.boundary_offset * domain.diameter(),
            domain,
            weight: weight.clone(),
            degree,
            center,
            scale,
            r,
            rule,
            gram_stability: stable.stability,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn center(&self) -> C64 {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn orthonormalizer(&self) -> &UpperTriangular {
        &self.r
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn gram_stability(&self) -> f64 {
        self.gram_stability
    }

    /// Absolute boundary offset `δ` enforced by the checked evaluators.
    pub fn boundary_offset(&self) -> f64 {
        self.boundary_offset
    }

    pub fn diagnostics(&self) -> KernelDiagnostics {
        let d = self.r.diagonal();
        let max = d.iter().map(|v| v.re).fold(0.0, f64::max);
        let min = d.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        KernelDiagnostics {
            degree: self.degree,
            gram_stability: self.gram_stability,
            rule_size: self.rule.len(),
            rule_degree: self.rule.exact_degree,
            diagonal_spread: max / min,
            boundary_offset: self.boundary_offset,
        }
    }

    /// Orthonormal basis values `e_0(z), …, e_N(z)`, no boundary check.
    pub fn orthonormal_values(&self, z: C64) -> Vec<C64> {
        let w = (z - self.center) / self.scale;
        let mut p = C64::new(1.0, 0.0);
        let mut b: Vec<C64> = (0..=self.degree)
            .map(|_| {
                let v = p;
                p *= w;
                v
            })
            .collect();
        self.r.solve_transpose_in_place(&mut b);
        b
    }

    pub fn check_probe(&self, z: C64) -> Result<()> {
        let distance = self.domain.boundary_distance(z);
        if distance < self.boundary_offset {
            return Err(Error::ProbeTooCloseToBoundary {
                distance,
                offset: self.boundary_offset,
            });
        }
        Ok(())
    }

    /// Diagonal kernel `K_N(z)`.
    pub fn eval_k(&self, z: C64) -> Result<f64> {
        self.check_probe(z)?;
        Ok(self.eval_k_unchecked(z))
    }

    pub fn eval_k_unchecked(&self, z: C64) -> f64 {
        self.orthonormal_values(z).iter().map(|e| e.norm_sqr()).sum()
    }

    /// Off-diagonal kernel `K_N(ζ, z) = Σ e_j(ζ) conj(e_j(z))`.
    pub fn eval_k2(&self, zeta: C64, z: C64) -> Result<C64> {
        self.check_probe(zeta)?;
        self.check_probe(z)?;
        Ok(self.eval_k2_unchecked(zeta, z))
    }

    pub fn eval_k2_unchecked(&self, zeta: C64, z: C64) -> C64 {
        let a = self.orthonormal_values(zeta);
        let b = self.orthonormal_values(z);
        a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum()
    }

    /// `|⟨f, K(·, z)⟩ − f(z)| / (1 + |f(z)|)` with the build's own rule.
    pub fn reproducing_check(&self, f: impl Fn(C64) -> C64, z: C64) -> Result<f64> {
        let ez = self.orthonormal_values(z);
        let integral = self.rule.integrate(|x| {
            let ex = self.orthonormal_values(x);
            let k: C64 = ex.iter().zip(&ez).map(|(a, b)| a.conj() * b).sum();
            f(x) * k * (-self.weight.eval(x)).exp()
        })?;
        let fz = f(z);
        Ok((integral - fz).norm() / (1.0 + fz.norm()))
    }
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConvergeRow {
    pub degree: usize,
    pub k: f64,
    /// Relative change from the previous row.
    pub delta: Option<f64>,
    pub gram_stability: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConvergeTable {
    pub rows: Vec<ConvergeRow>,
    pub threshold: f64,
    pub converged: bool,
}

/// `K_N(z)` over an increasing list of degrees.
pub fn converge_table(
    dom: &Domain,
    weight: &Weight,
    z: C64,
    degrees: &[usize],
    opts: BuildOptions,
    threshold: f64,
) -> Result<ConvergeTable> {
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("degree list must be increasing".into()));
    }
    let mut rows: Vec<ConvergeRow> = Vec::with_capacity(degrees.len());
    for &n in degrees {
        let k = KernelApprox::build_with(dom.clone(), weight, n, opts)?;
        let value = k.eval_k(z)?;
        let delta = rows.last().map(|prev| (value - prev.k).abs() / value);
        rows.push(ConvergeRow {
            degree: n,
            k: value,
            delta,
            gram_stability: k.gram_stability(),
        });
    }
    let converged = matches!(rows.last().and_then(|r| r.delta), Some(d) if d < threshold);
    Ok(ConvergeTable {
        rows,
        threshold,
        converged,
    })
}

/// The constant in `K_{ℂ, x²}(z) = e^{x²} / (2π)`.
///
/// Functions in the Bergman space of `ℂ` with weight `x²` are Fourier–Laplace
/// transforms `f(z) = ∫ g(ξ) e^{zξ} dξ`; Plancherel in `y` and the Gaussian
/// integral in `x` give `‖f‖² = 2π^{3/2} ∫ |g|² e^{ξ²} dξ`, so
/// `K(z) = ∫ e^{2xξ − ξ²} dξ / (2π^{3/2}) = e^{x²}/(2π)`.
pub const GAUSSIAN_X_CONSTANT: f64 = 1.0 / (2.0 * PI);

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ClosedFormKernel {
    /// `1/(π(1−|z|²)²)`.
    UnitDiskUnweighted,
    /// Disk of the given radius centred at 0 with weight `α|z|²`.
    DiskFock { radius: f64, alpha: f64 },
    /// `normalization · e^{x²}` on `ℂ` with weight `x²`; `None` evaluates the shape only.
    GaussianX { normalization: Option<f64> },
    /// Kernel of a product domain: the product of the factor kernels.
    Product(Box<ClosedFormKernel>, Box<ClosedFormKernel>),
}

impl ClosedFormKernel {
    /// Number of complex variables.
    pub fn dim(&self) -> usize {
        match self {
            ClosedFormKernel::Product(a, b) => a.dim() + b.dim(),
            _ => 1,
        }
    }

    pub fn eval(&self, z: C64) -> Result<f64> {
        match self {
            ClosedFormKernel::UnitDiskUnweighted => {
                let s = z.norm_sqr();
                if s >= 1.0 {
                    return Err(Error::OutsideDomain);
                }
                Ok(1.0 / (PI * (1.0 - s) * (1.0 - s)))
            }
            ClosedFormKernel::DiskFock { radius, alpha } => disk_fock(*radius, *alpha, z),
            ClosedFormKernel::GaussianX { normalization } => Ok(normalization.unwrap_or(1.0) * (z.re * z.re).exp()),
            ClosedFormKernel::Product(..) => Err(Error::InvalidArgument(
                "product kernels take one point per factor; use eval_point".into(),
            )),
        }
    }

    /// Evaluation at a point of `ℂ^dim`.
    pub fn eval_point(&self, point: &[C64]) -> Result<f64> {
        if point.len() != self.dim() {
            return Err(Error::InvalidArgument("point dimension mismatch".into()));
        }
        match self {
            ClosedFormKernel::Product(a, b) => {
                let (pa, pb) = point.split_at(a.dim());
                Ok(a.eval_point(pa)? * b.eval_point(pb)?)
            }
            _ => self.eval(point[0]),
        }
    }
}

/// `Σ_j |z|^{2j} / c_j` with `c_j = 2π ∫_0^R r^{2j+1} e^{−αr²} dr`.
fn disk_fock(radius: f64, alpha: f64, z: C64) -> Result<f64> {
    let rho = z.norm_sqr() / (radius * radius);
    if rho >= 1.0 {
        return Err(Error::OutsideDomain);
    }
    let x = alpha * radius * radius;
    // c_j = π R^{2j+2} e^{−x} S_j with S_j = Σ_k x^k / ((j+1)(j+2)…(j+1+k)).
    let s = |j: usize| -> f64 {
        let mut term = 1.0 / (j + 1) as f64;
        let mut sum = term;
        let mut k = 0usize;
        while term > 1e-18 * sum {
            term *= x / (j + 2 + k) as f64;
            sum += term;
            k += 1;
        }
        sum
    };
    let prefactor = x.exp() / (PI * radius * radius);
    let mut total = 0.0;
    let mut pow = 1.0;
    let mut s_j = s(0);
    for j in 0..100_000usize {
        let term = pow / s_j;
        total += term;
        let s_next = s(j + 1);
        let q = rho * s_j / s_next;
        if q < 1.0 && term * q / (1.0 - q) < 1e-16 * total {
            break;
        }
        pow *= rho;
        s_j = s_next;
    }
    Ok(prefactor * total)
}
