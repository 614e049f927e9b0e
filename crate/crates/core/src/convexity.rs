//! Numerical convexity and subharmonicity probes.
//!
//! Convexity of a function `f` on a convex region is probed along random
//! segments by second differences. The slice criterion goes through the
//! real-linear maps `t_λ(s) = s + λ²s̄`, `|λ| < 1`: if every pullback
//! `s ↦ f(t_λ(s))` is subharmonic then `f` is convex, and for `C²` inputs
//!
//! ```text
//! ∂²(f∘t_λ)/∂s∂s̄ = (1 + |λ|⁴) f_tt̄ + 2 Re(λ² f_tt),
//! ```
//!
//! which tends to twice the real Hessian form in the direction `λ/|λ|` as
//! `|λ| → 1`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)]
use crate::float::Float;
use crate::geometry::{Region, Segment};
use crate::weights::ComplexHessian;
use crate::{Error, Result, C64};

/// Segment probe parameters. Randomness is ChaCha8 seeded with `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbeSettings {
    pub n_segments: usize,
    pub samples_per_segment: usize,
    /// Absolute distance every sample keeps from the boundary.
    pub boundary_offset: f64,
    pub seed: u64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self {
            n_segments: 200,
            samples_per_segment: 33,
            boundary_offset: 0.0,
            seed: 0,
        }
    }
}

/// How the pass/fail threshold is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Tolerance {
    Absolute(f64),
    /// `max(floor, 3·source_error) · (1 + max|f|)` over the evaluated probes.
    Relative { floor: f64, source_error: f64 },
}

impl Tolerance {
    /// The default relative rule for functions derived from a kernel build.
    pub fn for_kernel(gram_stability: f64) -> Self {
        Tolerance::Relative {
            floor: 1e-7,
            source_error: gram_stability,
        }
    }

    pub fn resolve(&self, max_abs: f64) -> f64 {
        match *self {
            Tolerance::Absolute(t) => t,
            Tolerance::Relative { floor, source_error } => floor.max(3.0 * source_error) * (1.0 + max_abs),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Verdict {
    ConvexWithinTol,
    Violation,
    /// A slice violation for an input not known to be `C²`: evidence, not refutation.
    ViolationEvidence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    SecondDifferences,
    PairwiseMidpoints,
    /// Subharmonicity of the pullbacks through `t_λ` over a λ grid.
    SliceSubharmonicity { lambda_count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Witness {
    /// Sample `index` (the centre of the offending stencil) on `segment`.
    Segment { segment: Segment, index: usize },
    /// Grid point `point` (in `s` coordinates) of the pullback through `t_λ`.
    Slice { lambda: C64, point: C64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConvexityReport {
    pub method: Method,
    pub probed_segments: usize,
    pub skipped_segments: usize,
    pub samples_per_segment: usize,
    pub min_slack: f64,
    pub witness: Option<Witness>,
    pub tol: f64,
    pub verdict: Verdict,
    /// Largest `|f|` over evaluated probes.
    pub max_abs: f64,
    /// Minimum slack per probed segment (or per λ for slice reports), in probe order.
    pub per_segment: Vec<f64>,
}

impl ConvexityReport {
    pub fn is_convex(&self) -> bool {
        self.verdict == Verdict::ConvexWithinTol
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SubharmonicityReport {
    pub grid_spacing: f64,
    pub grid_points: usize,
    pub min_laplacian: f64,
    pub witness: Option<C64>,
    pub tol: f64,
    pub verdict: Verdict,
    pub max_abs: f64,
}

impl SubharmonicityReport {
    pub fn is_subharmonic(&self) -> bool {
        self.verdict == Verdict::ConvexWithinTol
    }
}

/// `min_i v_{i−1} + v_{i+1} − 2v_i` and the centre index attaining it.
pub fn second_difference_scan(values: &[f64]) -> Result<(f64, usize)> {
    if values.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "second differences need at least 3 values, got {}",
            values.len()
        )));
    }
    let mut best = (f64::INFINITY, 1);
    for i in 1..values.len() - 1 {
        let s = values[i - 1] + values[i + 1] - 2.0 * values[i];
        if s < best.0 {
            best = (s, i);
        }
    }
    Ok(best)
}

/// Every midpoint inequality `v_i + v_j − 2 v_{(i+j)/2} ≥ 0` on the samples.
pub fn pairwise_midpoint_scan(values: &[f64]) -> Result<(f64, usize)> {
    if values.len() < 3 {
        return Err(Error::InvalidArgument("pairwise scan needs at least 3 values".into()));
    }
    let mut best = (f64::INFINITY, 1);
    for i in 0..values.len() {
        for j in (i + 2..values.len()).step_by(2) {
            let k = (i + j) / 2;
            let s = values[i] + values[j] - 2.0 * values[k];
            if s < best.0 {
                best = (s, k);
            }
        }
    }
    Ok(best)
}

/// Uniform point of `region` at distance `≥ offset` from the boundary, by rejection.
pub fn sample_interior(rng: &mut ChaCha8Rng, region: &impl Region, offset: f64) -> Option<C64> {
    let (lo, hi) = region.bounding_box();
    for _ in 0..100_000 {
        let z = C64::new(rng.gen_range(lo.re..=hi.re), rng.gen_range(lo.im..=hi.im));
        if region.boundary_distance(z) >= offset {
            return Some(z);
        }
    }
    None
}

/// Random segments whose samples all keep `offset` from the boundary.
pub fn random_segments(region: &impl Region, settings: &ProbeSettings) -> Result<Vec<Segment>> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut out = Vec::with_capacity(settings.n_segments);
    let mut attempts = 0usize;
    while out.len() < settings.n_segments {
        attempts += 1;
        if attempts > 1000 * (settings.n_segments + 1) {
            return Err(Error::InvalidArgument(
                "could not place probe segments; boundary offset too large".into(),
            ));
        }
        let (Some(p), Some(q)) = (
            sample_interior(&mut rng, region, settings.boundary_offset),
            sample_interior(&mut rng, region, settings.boundary_offset),
        ) else {
            continue;
        };
        let seg = Segment::new(p, q, settings.samples_per_segment)?;
        if seg
            .samples()
            .iter()
            .all(|z| region.boundary_distance(*z) >= settings.boundary_offset)
        {
            out.push(seg);
        }
    }
    Ok(out)
}

/// Second-difference scan of `f` along given segments.
///
/// `f` returning `None` skips the segment; more than half skipped is an error.
pub fn check_convex_on_segments(
    f: impl Fn(C64) -> Option<f64>,
    segments: &[Segment],
    tol: Tolerance,
    pairwise: bool,
) -> Result<ConvexityReport> {
    let mut per_segment = Vec::with_capacity(segments.len());
    let mut min_slack = f64::INFINITY;
    let mut witness = None;
    let mut skipped = 0usize;
    let mut max_abs: f64 = 0.0;
    let mut samples_per_segment = 0;
    for seg in segments {
        samples_per_segment = seg.sample_count;
        let values: Option<Vec<f64>> = seg.samples().into_iter().map(&f).collect();
        let Some(values) = values.filter(|v| v.iter().all(|x| x.is_finite())) else {
            skipped += 1;
            continue;
        };
        max_abs = values.iter().fold(max_abs, |m, v| m.max(v.abs()));
        let (slack, index) = if pairwise {
            pairwise_midpoint_scan(&values)?
        } else {
            second_difference_scan(&values)?
        };
        per_segment.push(slack);
        if slack < min_slack {
            min_slack = slack;
            witness = Some(Witness::Segment { segment: *seg, index });
        }
    }
    let total = segments.len();
    if total == 0 || 2 * skipped > total {
        return Err(Error::InsufficientProbes { skipped, total });
    }
    let tol = tol.resolve(max_abs);
    let verdict = if min_slack < -tol {
        Verdict::Violation
    } else {
        Verdict::ConvexWithinTol
    };
    Ok(ConvexityReport {
        method: if pairwise {
            Method::PairwiseMidpoints
        } else {
            Method::SecondDifferences
        },
        probed_segments: total - skipped,
        skipped_segments: skipped,
        samples_per_segment,
        min_slack,
        witness,
        tol,
        verdict,
        max_abs,
        per_segment,
    })
}

/// Random-segment convexity probe; deterministic for a fixed seed.
pub fn check_convex(
    f: impl Fn(C64) -> Option<f64>,
    region: &impl Region,
    settings: &ProbeSettings,
    tol: impl Into<ToleranceArg>,
) -> Result<ConvexityReport> {
    let segments = random_segments(region, settings)?;
    check_convex_on_segments(f, &segments, tol.into().0, false)
}

/// Accepts either a bare absolute tolerance or a [`Tolerance`].
#[derive(Debug, Clone, Copy)]
pub struct ToleranceArg(pub Tolerance);

impl From<f64> for ToleranceArg {
    fn from(t: f64) -> Self {
        ToleranceArg(Tolerance::Absolute(t))
    }
}

impl From<Tolerance> for ToleranceArg {
    fn from(t: Tolerance) -> Self {
        ToleranceArg(t)
    }
}

/// The real-linear map `s ↦ s + λ² s̄`, `|λ| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SliceMap {
    lambda: C64,
    lambda_sq: C64,
}

impl SliceMap {
    pub fn new(lambda: C64) -> Result<Self> {
        if !(lambda.norm() < 1.0) {
            return Err(Error::InvalidArgument(format!("|λ| = {} must be < 1", lambda.norm())));
        }
        Ok(Self {
            lambda,
            lambda_sq: lambda * lambda,
        })
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn forward(&self, s: C64) -> C64 {
        s + self.lambda_sq * s.conj()
    }

    pub fn inverse(&self, t: C64) -> C64 {
        (t - self.lambda_sq * t.conj()) / self.determinant()
    }

    /// Determinant of the map as a real 2×2 matrix: `1 − |λ|⁴`.
    pub fn determinant(&self) -> f64 {
        1.0 - self.lambda_sq.norm_sqr()
    }

    /// Operator norm `1 + |λ|²` and smallest singular value `1 − |λ|²`.
    pub fn singular_values(&self) -> (f64, f64) {
        let l2 = self.lambda_sq.norm();
        (1.0 + l2, 1.0 - l2)
    }
}

/// `(1 + |λ|⁴) φ_tt̄ + 2 Re(λ² φ_tt)`, the `s s̄` derivative of `φ ∘ t_λ`.
pub fn hessian_form_lemma(h: &ComplexHessian, lambda: C64) -> f64 {
    let l2 = lambda * lambda;
    (1.0 + l2.norm_sqr()) * h.phi_ttbar + 2.0 * (l2 * h.phi_tt).re
}

/// `φ_tt̄ |η|² + Re(φ_tt η²)`: half the second derivative of `φ` in direction `η`.
pub fn real_hessian_form(h: &ComplexHessian, eta: C64) -> f64 {
    h.phi_ttbar * eta.norm_sqr() + (h.phi_tt * eta * eta).re
}

/// Minimum of [`real_hessian_form`] over `n` unit directions in `[0, π)`.
pub fn min_real_hessian_form(h: &ComplexHessian, n: usize) -> f64 {
    (0..n)
        .map(|k| real_hessian_form(h, C64::from_polar(1.0, PI * k as f64 / n as f64)))
        .fold(f64::INFINITY, f64::min)
}

/// Radii `{0.3, 0.6, 0.9, 0.99}` × 16 angles, plus `λ = 0`.
pub fn default_lambda_grid() -> Vec<C64> {
    let mut grid = vec![C64::new(0.0, 0.0)];
    for r in [0.3, 0.6, 0.9, 0.99] {
        for k in 0..16 {
            grid.push(C64::from_polar(r, 2.0 * PI * k as f64 / 16.0));
        }
    }
    grid
}

/// Grid centres `lo + (i h, j h)` for `0 < i < nx`, `0 < j < ny` over the bounding box.
fn centre_grid(region: &impl Region, h: f64) -> Vec<C64> {
    let (lo, hi) = region.bounding_box();
    let nx = ((hi.re - lo.re) / h).floor() as usize;
    let ny = ((hi.im - lo.im) / h).floor() as usize;
    let mut out = Vec::new();
    for j in 1..ny {
        for i in 1..nx {
            out.push(lo + C64::new(i as f64 * h, j as f64 * h));
        }
    }
    out
}

struct StencilScan {
    min_lap: f64,
    witness: Option<C64>,
    count: usize,
    max_abs: f64,
}

/// `(Σ f(c ± step_k) − 4 f(c)) / h²` at every centre whose stencil keeps `offset`
/// from the boundary. `centre_values[i]` caches `f(centres[i])`.
fn stencil_scan(
    f: &impl Fn(C64) -> Option<f64>,
    region: &impl Region,
    centres: &[C64],
    centre_values: &[Option<f64>],
    steps: [C64; 2],
    h: f64,
    offset: f64,
) -> StencilScan {
    let stencil = [steps[0], -steps[0], steps[1], -steps[1]];
    let mut out = StencilScan {
        min_lap: f64::INFINITY,
        witness: None,
        count: 0,
        max_abs: 0.0,
    };
    'centres: for (zc, fc) in centres.iter().zip(centre_values) {
        let Some(fc) = *fc else { continue };
        if region.boundary_distance(*zc) < offset || stencil.iter().any(|d| region.boundary_distance(zc + d) < offset) {
            continue;
        }
        let mut sum = -4.0 * fc;
        let mut local_max = fc.abs();
        for d in &stencil {
            match f(zc + d) {
                Some(v) if v.is_finite() => {
                    sum += v;
                    local_max = local_max.max(v.abs());
                }
                _ => continue 'centres,
            }
        }
        out.count += 1;
        out.max_abs = out.max_abs.max(local_max);
        let lap = sum / (h * h);
        if lap < out.min_lap {
            out.min_lap = lap;
            out.witness = Some(*zc);
        }
    }
    out
}

fn centre_values(f: &impl Fn(C64) -> Option<f64>, region: &impl Region, centres: &[C64], offset: f64) -> Vec<Option<f64>> {
    centres
        .iter()
        .map(|z| {
            if region.boundary_distance(*z) < offset {
                None
            } else {
                f(*z).filter(|v| v.is_finite())
            }
        })
        .collect()
}

/// Five-point Laplacian `(f_E + f_W + f_N + f_S − 4 f_C)/h²` over a grid
/// aligned with the region's bounding box. Only points whose whole stencil
/// keeps `offset` from the boundary are used; `f` returning `None` skips a point.
pub fn check_subharmonic(
    f: impl Fn(C64) -> Option<f64>,
    region: &impl Region,
    spacing: f64,
    offset: f64,
    tol: impl Into<ToleranceArg>,
) -> Result<SubharmonicityReport> {
    if !(spacing > 0.0) {
        return Err(Error::InvalidArgument("grid spacing must be positive".into()));
    }
    let h = spacing;
    let centres = centre_grid(region, h);
    let values = centre_values(&f, region, &centres, offset);
    let scan = stencil_scan(&f, region, &centres, &values, [C64::new(h, 0.0), C64::new(0.0, h)], h, offset);
    if scan.count == 0 {
        return Err(Error::EmptyGrid);
    }
    let tol = tol.into().0.resolve(scan.max_abs);
    Ok(SubharmonicityReport {
        grid_spacing: h,
        grid_points: scan.count,
        min_laplacian: scan.min_lap,
        witness: scan.witness,
        tol,
        verdict: if scan.min_lap < -tol {
            Verdict::Violation
        } else {
            Verdict::ConvexWithinTol
        },
        max_abs: scan.max_abs,
    })
}

/// Convexity via subharmonicity of every pullback `s ↦ f(t_λ(s))`.
///
/// The `s` lattice for each `λ` is the preimage of one shared grid of
/// spacing `spacing` over the region, so the unit `s` steps land on the
/// `t`-plane steps `t_λ(h) = h(1 + λ²)` and `t_λ(ih) = ih(1 − λ²)` and
/// every `λ` costs the same. Witness points are reported in `s`.
/// With `smooth = false` a violation is reported as
/// [`Verdict::ViolationEvidence`], since the contrapositive needs `C²`.
#[allow(clippy::too_many_arguments)]
pub fn certify_convex_via_slices(
    f: impl Fn(C64) -> Option<f64>,
    region: &impl Region,
    lambda_grid: &[C64],
    spacing: f64,
    offset: f64,
    tol: impl Into<ToleranceArg>,
    smooth: bool,
) -> Result<ConvexityReport> {
    if !(spacing > 0.0) {
        return Err(Error::InvalidArgument("grid spacing must be positive".into()));
    }
    let tol = tol.into().0;
    let h = spacing;
    let centres = centre_grid(region, h);
    let values = centre_values(&f, region, &centres, offset);
    let mut min_slack = f64::INFINITY;
    let mut witness = None;
    let mut per_lambda = Vec::with_capacity(lambda_grid.len());
    let mut max_abs: f64 = 0.0;
    let mut points = 0usize;
    for &lambda in lambda_grid {
        let map = SliceMap::new(lambda)?;
        let steps = [map.forward(C64::new(h, 0.0)), map.forward(C64::new(0.0, h))];
        let scan = stencil_scan(&f, region, &centres, &values, steps, h, offset);
        if scan.count == 0 {
            return Err(Error::EmptyGrid);
        }
        points = points.max(scan.count);
        max_abs = max_abs.max(scan.max_abs);
        per_lambda.push(scan.min_lap);
        if scan.min_lap < min_slack {
            min_slack = scan.min_lap;
            witness = scan.witness.map(|t| Witness::Slice {
                lambda,
                point: map.inverse(t),
            });
        }
    }
    let resolved_tol = tol.resolve(max_abs);
    let verdict = if min_slack >= -resolved_tol {
        Verdict::ConvexWithinTol
    } else if smooth {
        Verdict::Violation
    } else {
        Verdict::ViolationEvidence
    };
    Ok(ConvexityReport {
        method: Method::SliceSubharmonicity {
            lambda_count: lambda_grid.len(),
        },
        probed_segments: lambda_grid.len(),
        skipped_segments: 0,
        samples_per_segment: points,
        min_slack,
        witness,
        tol: resolved_tol,
        verdict,
        max_abs,
        per_segment: per_lambda,
    })
}

/// Row-major grid of samples, `values[j * nx + i]` at `origin + (i h, j h)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub origin: C64,
    pub spacing: f64,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn sample(f: impl Fn(C64) -> f64, origin: C64, spacing: f64, nx: usize, ny: usize) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(origin + C64::new(i as f64 * spacing, j as f64 * spacing)));
            }
        }
        Self {
            nx,
            ny,
            origin,
            spacing,
            values,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn point(&self, i: usize, j: usize) -> C64 {
        self.origin + C64::new(i as f64 * self.spacing, j as f64 * self.spacing)
    }
}

/// Discrete convolution with the bump `(1 − (r/ρ)²)³`, normalised to unit
/// mass on the grid. The output loses `⌊ρ/h⌋` points on every side.
pub fn mollify(grid: &Grid, radius: f64) -> Result<Grid> {
    let h = grid.spacing;
    if !(radius >= h) {
        return Err(Error::InvalidArgument("mollifier radius must be at least the spacing".into()));
    }
    let m = (radius / h).floor() as usize;
    if grid.nx <= 2 * m || grid.ny <= 2 * m {
        return Err(Error::GridTooSmall);
    }
    let mut taps = Vec::new();
    let mut mass = 0.0;
    let mi = m as i64;
    for dj in -mi..=mi {
        for di in -mi..=mi {
            let r2 = ((di * di + dj * dj) as f64) * h * h / (radius * radius);
            if r2 < 1.0 {
                let w = (1.0 - r2).powi(3);
                mass += w;
                taps.push((di, dj, w));
            }
        }
    }
    let (nx, ny) = (grid.nx - 2 * m, grid.ny - 2 * m);
    let mut values = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (ci, cj) = ((i + m) as i64, (j + m) as i64);
            let v: f64 = taps
                .iter()
                .map(|&(di, dj, w)| w * grid.get((ci + di) as usize, (cj + dj) as usize))
                .sum();
            values.push(v / mass);
        }
    }
    Ok(Grid {
        nx,
        ny,
        origin: grid.point(m, m),
        spacing: h,
        values,
    })
}

/// Second-difference convexity check of a grid along rows, columns and both diagonals.
pub fn grid_min_second_difference(grid: &Grid) -> f64 {
    let mut min = f64::INFINITY;
    for j in 1..grid.ny.saturating_sub(1) {
        for i in 1..grid.nx.saturating_sub(1) {
            let c = 2.0 * grid.get(i, j);
            for (a, b) in [
                (grid.get(i - 1, j), grid.get(i + 1, j)),
                (grid.get(i, j - 1), grid.get(i, j + 1)),
                (grid.get(i - 1, j - 1), grid.get(i + 1, j + 1)),
                (grid.get(i - 1, j + 1), grid.get(i + 1, j - 1)),
            ] {
                min = min.min(a + b - c);
            }
        }
    }
    min
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexDomain;
    use crate::kernel::ClosedFormKernel;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn square() -> ConvexDomain {
        ConvexDomain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap()
    }

    #[test]
    fn second_difference_examples() {
        assert_eq!(second_difference_scan(&[1.0, 0.0, 1.0]).unwrap(), (2.0, 1));
        let (s, _) = second_difference_scan(&[0.5, 1.5, 2.5, 3.5]).unwrap();
        assert_eq!(s, 0.0);
        let g = |x: f64| -(-x * x / 2.0).exp();
        let (s, i) = second_difference_scan(&[g(2.0), g(3.0), g(4.0)]).unwrap();
        assert_eq!(i, 1);
        assert!((s + 0.11346).abs() < 1e-5, "{s}");
        assert!(second_difference_scan(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn pairwise_scan_sees_what_neighbours_see() {
        let v: Vec<f64> = (0..9).map(|i| -((i as f64) - 4.0).powi(2)).collect();
        let (pw, _) = pairwise_midpoint_scan(&v).unwrap();
        let (sd, _) = second_difference_scan(&v).unwrap();
        assert!(pw < 0.0 && sd < 0.0 && pw <= sd);
    }

    #[test]
    fn check_convex_examples() {
        let settings = ProbeSettings {
            n_segments: 100,
            samples_per_segment: 33,
            boundary_offset: 0.05,
            seed: 11,
        };
        let r = check_convex(|z| Some(z.re), &square(), &settings, 1e-12).unwrap();
        assert!(r.is_convex() && r.min_slack.abs() <= 1e-12);

        let disk = ConvexDomain::unit_disk();
        let logk = |z: C64| ClosedFormKernel::UnitDiskUnweighted.eval(z).ok().map(|k| k.ln());
        let settings = ProbeSettings {
            boundary_offset: 0.1,
            ..settings
        };
        let r = check_convex(logk, &disk, &settings, Tolerance::for_kernel(0.0)).unwrap();
        assert!(r.is_convex(), "{r:?}");

        let r = check_convex(|z| Some(-z.norm_sqr()), &disk, &settings, 1e-12).unwrap();
        assert_eq!(r.verdict, Verdict::Violation);
        assert!(matches!(r.witness, Some(Witness::Segment { .. })));
    }

    #[test]
    fn determinism_and_skips() {
        let settings = ProbeSettings {
            n_segments: 20,
            samples_per_segment: 9,
            boundary_offset: 0.0,
            seed: 5,
        };
        let f = |z: C64| Some((z.re * 3.0).sin() + z.im * z.im);
        let a = check_convex(f, &square(), &settings, 1e-9).unwrap();
        let b = check_convex(f, &square(), &settings, 1e-9).unwrap();
        assert_eq!(a, b);
        let none = check_convex(|_| None, &square(), &settings, 1e-9);
        assert_eq!(none, Err(Error::InsufficientProbes { skipped: 20, total: 20 }));
    }

    #[test]
    fn slice_map_examples() {
        let id = SliceMap::new(c(0.0, 0.0)).unwrap();
        assert_eq!(id.forward(c(3.0, 4.0)), c(3.0, 4.0));
        assert_eq!(id.inverse(c(3.0, 4.0)), c(3.0, 4.0));
        let m = SliceMap::new(c(0.5, 0.0)).unwrap();
        assert!((m.forward(c(0.0, 1.0)) - c(0.0, 0.75)).norm() < 1e-15);
        assert!((m.forward(c(1.0, 0.0)) - c(1.25, 0.0)).norm() < 1e-15);
        assert!((m.inverse(c(0.0, 0.75)) - c(0.0, 1.0)).norm() < 1e-15);
        assert!(SliceMap::new(c(0.0, 1.0)).is_err());
    }

    #[test]
    fn slice_round_trip_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let lambda = C64::from_polar(rng.gen_range(0.0..0.999), rng.gen_range(0.0..2.0 * PI));
            let t = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let m = SliceMap::new(lambda).unwrap();
            assert!((m.forward(m.inverse(t)) - t).norm() <= 1e-13 * (1.0 + t.norm()));
            assert!((m.inverse(m.forward(t)) - t).norm() <= 1e-13 * (1.0 + t.norm()) / m.determinant());
            // The map is linear, so difference quotients are exact up to round-off.
            let h = 1e-3;
            let dx = (m.forward(t + c(h, 0.0)) - m.forward(t)) / h;
            let dy = (m.forward(t + c(0.0, h)) - m.forward(t)) / h;
            let det = dx.re * dy.im - dx.im * dy.re;
            assert!((det - m.determinant()).abs() < 1e-9);
        }
    }

    #[test]
    fn hessian_form_examples() {
        let modsq = ComplexHessian::new(1.0, c(0.0, 0.0));
        let lam = c(0.3, 0.5);
        assert!((hessian_form_lemma(&modsq, lam) - (1.0 + lam.norm_sqr().powi(2))).abs() < 1e-15);
        let control = ComplexHessian::new(1.0, c(2.0, 0.0));
        assert!((hessian_form_lemma(&control, c(0.0, 0.8)) + 1.1504).abs() < 1e-12);
        assert_eq!(hessian_form_lemma(&control, c(0.0, 0.0)), 1.0);

        let xsq = ComplexHessian::new(0.5, c(0.5, 0.0));
        assert!(real_hessian_form(&xsq, c(0.0, 1.0)).abs() < 1e-15);
        assert!((real_hessian_form(&xsq, c(1.0, 0.0)) - 1.0).abs() < 1e-15);
        for k in 0..8 {
            let eta = C64::from_polar(1.0, k as f64);
            assert!((real_hessian_form(&modsq, eta) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn real_hessian_form_is_half_the_directional_second_derivative() {
        // φ = 0.7x² + 1.3y² − 0.4xy, compare with a 1-D second difference along η.
        let phi = |z: C64| 0.7 * z.re * z.re + 1.3 * z.im * z.im - 0.4 * z.re * z.im;
        let h = ComplexHessian::from_real(1.4, 2.6, -0.4);
        for k in 0..12 {
            let eta = C64::from_polar(1.0, 0.3 * k as f64);
            let step = 1e-3;
            let z0 = c(0.2, -0.1);
            let d2 = (phi(z0 + eta * step) + phi(z0 - eta * step) - 2.0 * phi(z0)) / (step * step);
            assert!((real_hessian_form(&h, eta) - 0.5 * d2).abs() < 1e-6);
        }
    }

    #[test]
    fn lemma_form_tends_to_twice_the_real_form() {
        for h in [
            ComplexHessian::new(1.0, c(2.0, 0.0)),
            ComplexHessian::new(0.5, c(0.5, 0.0)),
            ComplexHessian::new(1.0, c(0.2, -0.4)),
        ] {
            for k in 0..16 {
                let theta = 2.0 * PI * k as f64 / 16.0;
                let lemma = hessian_form_lemma(&h, C64::from_polar(0.999, theta));
                let real = 2.0 * real_hessian_form(&h, C64::from_polar(1.0, theta));
                assert!((lemma - real).abs() <= 1e-2 * real.abs().max(1e-2) + 1e-2, "{lemma} vs {real}");
            }
        }
    }

    #[test]
    fn subharmonic_examples() {
        let disk = ConvexDomain::unit_disk();
        // The five-point stencil is exact on cubics.
        let r = check_subharmonic(|z| Some((z * z * z).re), &disk, 0.05, 0.0, 1e-9).unwrap();
        assert!(r.is_subharmonic() && r.min_laplacian.abs() < 1e-9);
        let r = check_subharmonic(|z| Some((z - c(2.0, 0.0)).norm().ln()), &disk, 0.05, 0.0, 1e-2).unwrap();
        // Truncation error h²/12 (∂⁴ₓ + ∂⁴ᵧ) is at most 6h²/12 at |z − 2| = 1.
        assert!(r.is_subharmonic() && r.min_laplacian.abs() < 2e-3);
        let r = check_subharmonic(|z| Some(z.norm_sqr()), &disk, 0.05, 0.0, 1e-9).unwrap();
        assert!((r.min_laplacian - 4.0).abs() < 1e-8);
        let r = check_subharmonic(|z| Some(-z.norm_sqr()), &disk, 0.05, 0.0, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Violation);
        assert!((r.min_laplacian + 4.0).abs() < 1e-8);
        let tiny = ConvexDomain::disk(c(0.0, 0.0), 0.01).unwrap();
        assert_eq!(check_subharmonic(|_| Some(0.0), &tiny, 0.05, 0.0, 1e-9), Err(Error::EmptyGrid));
    }

    #[test]
    fn slice_certification_examples() {
        let disk = ConvexDomain::unit_disk();
        let grid = default_lambda_grid();
        assert_eq!(grid.len(), 65);
        let r = certify_convex_via_slices(|z| Some(z.norm_sqr()), &disk, &grid, 0.1, 0.0, 1e-9, true).unwrap();
        assert!(r.is_convex(), "{r:?}");

        let control = |z: C64| Some(3.0 * z.re * z.re - z.im * z.im);
        let r = certify_convex_via_slices(control, &disk, &grid, 0.1, 0.0, 1e-9, true).unwrap();
        assert_eq!(r.verdict, Verdict::Violation);
        let Some(Witness::Slice { lambda, point }) = r.witness else { panic!() };
        assert!(lambda.norm() > 0.52 && lambda.norm() < 1.0);
        assert!(disk.contains(SliceMap::new(lambda).unwrap().forward(point), 0.0));
        // Each slice Laplacian is exactly 4× the lemma form for a quadratic.
        let h = ComplexHessian::from_real(6.0, -2.0, 0.0);
        for (lam, lap) in grid.iter().zip(&r.per_segment) {
            assert!((lap - 4.0 * hessian_form_lemma(&h, *lam)).abs() < 1e-6);
        }

        let r0 = certify_convex_via_slices(|z| Some(z.norm_sqr()), &disk, &[c(0.0, 0.0)], 0.1, 0.0, 1e-9, true).unwrap();
        let direct = check_subharmonic(|z| Some(z.norm_sqr()), &disk, 0.1, 0.0, 1e-9).unwrap();
        assert_eq!(r0.min_slack, direct.min_laplacian);

        let kink = |z: C64| Some(-z.im.abs());
        let r = certify_convex_via_slices(kink, &disk, &grid, 0.1, 0.0, 1e-9, false).unwrap();
        assert_eq!(r.verdict, Verdict::ViolationEvidence);
    }

    #[test]
    fn mollify_examples() {
        let constant = Grid::sample(|_| 2.5, c(0.0, 0.0), 0.1, 20, 20);
        let m = mollify(&constant, 0.35).unwrap();
        assert_eq!((m.nx, m.ny), (14, 14));
        assert!(m.values.iter().all(|v| (v - 2.5).abs() < 1e-14));

        let affine = |z: C64| 1.0 + 2.0 * z.re - 0.5 * z.im;
        let g = Grid::sample(affine, c(-1.0, -1.0), 0.1, 21, 21);
        let m = mollify(&g, 0.3).unwrap();
        for j in 0..m.ny {
            for i in 0..m.nx {
                assert!((m.get(i, j) - affine(m.point(i, j))).abs() < 1e-12);
            }
        }

        let xsq = Grid::sample(|z| z.re * z.re, c(-1.0, -1.0), 0.1, 21, 21);
        let m = mollify(&xsq, 0.3).unwrap();
        for j in 0..m.ny {
            for i in 0..m.nx {
                assert!(m.get(i, j) >= m.point(i, j).re.powi(2) - 1e-12);
            }
        }
        assert!(grid_min_second_difference(&m) >= -1e-12);
        assert_eq!(mollify(&xsq, 1.5), Err(Error::GridTooSmall));
        assert!(mollify(&xsq, 0.05).is_err());
    }
}
