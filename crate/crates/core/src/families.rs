//! Fibred domains `Ω̃ ⊂ ℂ × ℂ` and their slice kernels.
//!
//! Two families are supported:
//!
//! * the Oka construction `Ω̃ = {(z, t) : z + z_t ∈ Ω, t ∈ U}` with
//!   `z_t = (1 − t) z₀ + t z₁`, whose slices are `Ω − z_t` with the shifted
//!   weight `φ(· + z_t)`, so that `K_{Ω̃_t}(0) = K_Ω(z_t)`;
//! * the norm ball `{|z| + |t| < ρ}`, whose slices are disks of radius `ρ − |t|`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::RefCell;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convexity::{
    check_convex_on_segments, random_segments, sample_interior, ConvexityReport, ProbeSettings, Tolerance,
};
#[allow(unused_imports)]
use crate::float::Float;
use crate::geometry::{ConvexDomain, Region, Segment};
use crate::kernel::{BuildOptions, KernelApprox};
use crate::weights::Weight;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FiberedFamily {
    Oka {
        base: ConvexDomain,
        weight: Weight,
        z0: C64,
        z1: C64,
    },
    NormBall { radius: f64 },
}

/// The fibre over `t` with its weight.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SliceData {
    pub t: C64,
    pub domain: ConvexDomain,
    pub weight: Weight,
}

impl FiberedFamily {
    /// `z0` and `z1` must lie in `base`, so the base locus contains `[0, 1]`.
    pub fn oka(base: ConvexDomain, weight: Weight, z0: C64, z1: C64) -> Result<Self> {
        if base.boundary_distance(z0) <= 0.0 || base.boundary_distance(z1) <= 0.0 {
            return Err(Error::InvalidArgument("z0 and z1 must be interior points of the base".into()));
        }
        Ok(FiberedFamily::Oka { base, weight, z0, z1 })
    }

    pub fn norm_ball(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
        }
        Ok(FiberedFamily::NormBall { radius })
    }

    /// `z_t = (1 − t) z₀ + t z₁`; zero for the norm ball.
    pub fn path_point(&self, t: C64) -> C64 {
        match self {
            FiberedFamily::Oka { z0, z1, .. } => (1.0 - t) * z0 + t * z1,
            FiberedFamily::NormBall { .. } => C64::new(0.0, 0.0),
        }
    }

    pub fn base_locus_contains(&self, t: C64) -> bool {
        match self {
            FiberedFamily::Oka { base, .. } => base.boundary_distance(self.path_point(t)) > 0.0,
            FiberedFamily::NormBall { radius } => t.norm() < *radius,
        }
    }

    /// The base locus `U` as a domain in the `t` plane; `None` when `z₀ = z₁` (then `U = ℂ`).
    pub fn base_locus(&self) -> Option<ConvexDomain> {
        match self {
            FiberedFamily::Oka { base, z0, z1, .. } => {
                let d = z1 - z0;
                if d.norm() == 0.0 {
                    return None;
                }
                // z_t = z0 + t d  ⇔  t = (z − z0)/d
                base.affine_image(d.inv(), -z0 / d).ok()
            }
            FiberedFamily::NormBall { radius } => ConvexDomain::disk(C64::new(0.0, 0.0), *radius).ok(),
        }
    }

    pub fn slice(&self, t: C64) -> Result<SliceData> {
        if !self.base_locus_contains(t) {
            return Err(Error::OutsideBaseLocus { re: t.re, im: t.im });
        }
        Ok(match self {
            FiberedFamily::Oka { base, weight, .. } => {
                let zt = self.path_point(t);
                SliceData {
                    t,
                    domain: base.translate(-zt),
                    weight: weight.shifted(zt),
                }
            }
            FiberedFamily::NormBall { radius } => SliceData {
                t,
                domain: ConvexDomain::disk(C64::new(0.0, 0.0), radius - t.norm())?,
                weight: Weight::Zero,
            },
        })
    }

    pub fn slice_kernel(&self, t: C64, degree: usize, opts: BuildOptions) -> Result<KernelApprox> {
        let s = self.slice(t)?;
        KernelApprox::build_with(s.domain, &s.weight, degree, opts)
    }

    /// `log K_{Ω̃_t}(z)` for the norm ball, in closed form.
    pub fn norm_ball_log_kernel(radius: f64, z: C64, t: C64) -> Result<f64> {
        let r = radius - t.norm();
        if !(r > z.norm()) {
            return Err(Error::OutsideDomain);
        }
        Ok(-PI.ln() - 2.0 * (r * r - z.norm_sqr()).ln() + 2.0 * r.ln())
    }
}

/// One entry of a [`kernel_sweep`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepPoint {
    pub t: C64,
    pub k: Option<f64>,
    pub gram_stability: Option<f64>,
    pub error: Option<String>,
}

impl SweepPoint {
    pub fn log_k(&self) -> Option<f64> {
        self.k.map(|k| k.ln())
    }
}

/// `K_{Ω̃_t}(0)` for each `t`, each slice built independently; failures are recorded per sample.
pub fn kernel_sweep(fam: &FiberedFamily, t_samples: &[C64], degree: usize, opts: BuildOptions) -> Vec<SweepPoint> {
    t_samples
        .iter()
        .map(|&t| {
            match fam
                .slice_kernel(t, degree, opts)
                .and_then(|k| Ok((k.eval_k(C64::new(0.0, 0.0))?, k.gram_stability())))
            {
                Ok((k, g)) => SweepPoint {
                    t,
                    k: Some(k),
                    gram_stability: Some(g),
                    error: None,
                },
                Err(e) => SweepPoint {
                    t,
                    k: None,
                    gram_stability: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SliceIdentity {
    pub t: C64,
    /// `K_{Ω̃_t, φ̃_t}(0)`.
    pub slice_value: f64,
    /// `K_{Ω, φ}(z_t)`.
    pub base_value: f64,
    pub rel_error: f64,
    /// Largest gram stability of the two builds.
    pub stability: f64,
}

/// Compares the slice kernel at the origin with the base kernel at `z_t`.
pub fn verify_slice_identity(fam: &FiberedFamily, t: C64, degree: usize, opts: BuildOptions) -> Result<SliceIdentity> {
    let FiberedFamily::Oka { base, weight, .. } = fam else {
        return Err(Error::InvalidArgument("slice identity applies to Oka families".into()));
    };
    let slice = fam.slice_kernel(t, degree, opts)?;
    let base_k = KernelApprox::build_with(base.clone(), weight, degree, opts)?;
    let slice_value = slice.eval_k(C64::new(0.0, 0.0))?;
    let base_value = base_k.eval_k(fam.path_point(t))?;
    Ok(SliceIdentity {
        t,
        slice_value,
        base_value,
        rel_error: (slice_value - base_value).abs() / base_value,
        stability: slice.gram_stability().max(base_k.gram_stability()),
    })
}

fn key(z: C64) -> (u64, u64) {
    (z.re.to_bits(), z.im.to_bits())
}

/// Convexity of `t ↦ log K_{Ω̃_t}(0)` over random segments in `t_region`.
///
/// Every distinct `t` gets its own slice build. The tolerance is
/// `max(floor, 3·max gram_stability)·(1 + max|log K|)`.
pub fn verify_theorem31(
    fam: &FiberedFamily,
    t_region: &ConvexDomain,
    degree: usize,
    opts: BuildOptions,
    probes: &ProbeSettings,
    tol_floor: f64,
) -> Result<ConvexityReport> {
    check_region_in_locus(fam, t_region)?;
    let segments = random_segments(t_region, probes)?;
    let memo: RefCell<BTreeMap<(u64, u64), Option<(f64, f64)>>> = RefCell::new(BTreeMap::new());
    let eval = |t: C64| -> Option<(f64, f64)> {
        if let Some(v) = memo.borrow().get(&key(t)) {
            return *v;
        }
        let v = fam
            .slice_kernel(t, degree, opts)
            .and_then(|k| Ok((k.eval_k(C64::new(0.0, 0.0))?.ln(), k.gram_stability())))
            .ok();
        memo.borrow_mut().insert(key(t), v);
        v
    };
    for seg in &segments {
        for t in seg.samples() {
            eval(t);
        }
    }
    let source_error = memo
        .borrow()
        .values()
        .flatten()
        .map(|v| v.1)
        .fold(0.0, f64::max);
    check_convex_on_segments(
        |t| eval(t).map(|v| v.0),
        &segments,
        Tolerance::Relative {
            floor: tol_floor,
            source_error,
        },
        false,
    )
}

fn check_region_in_locus(fam: &FiberedFamily, t_region: &ConvexDomain) -> Result<()> {
    for k in 0..256 {
        let t = t_region.boundary_point(2.0 * PI * k as f64 / 256.0);
        if !fam.base_locus_contains(t) {
            return Err(Error::OutsideBaseLocus { re: t.re, im: t.im });
        }
    }
    Ok(())
}

/// Which coordinates the joint probe moves.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum JointMode {
    Free,
    /// `z` held at the given point.
    FixedZ(C64),
    /// `t` held at one grid node per segment.
    FixedT,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointSettings {
    pub n_segments: usize,
    pub samples_per_segment: usize,
    /// Nodes per axis of the `t` quantisation grid over the bounding box of `t_region`.
    pub t_grid: usize,
    /// Margin from each fibre's boundary, as a fraction of the fibre diameter.
    pub z_offset: f64,
    /// Margin of `t` inside `t_region` (absolute).
    pub t_offset: f64,
    pub seed: u64,
    pub tol_floor: f64,
    pub mode: JointMode,
}

impl Default for JointSettings {
    fn default() -> Self {
        Self {
            n_segments: 40,
            samples_per_segment: 9,
            t_grid: 64,
            z_offset: 0.15,
            t_offset: 0.0,
            seed: 0,
            tol_floor: 1e-5,
            mode: JointMode::Free,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct JointReport {
    pub report: ConvexityReport,
    /// `(z, t)` endpoints of each probed segment.
    pub segments: Vec<((C64, C64), (C64, C64))>,
    pub slice_builds: usize,
    /// Largest relative error of `K` against the closed form (norm ball only).
    pub oracle_max_rel_error: Option<f64>,
}

/// Slice kernels cached by `t`-grid node.
#[derive(Debug)]
pub struct SliceCache<'a> {
    fam: &'a FiberedFamily,
    degree: usize,
    opts: BuildOptions,
    builds: BTreeMap<(i64, i64), Option<KernelApprox>>,
}

impl<'a> SliceCache<'a> {
    pub fn new(fam: &'a FiberedFamily, degree: usize, opts: BuildOptions) -> Self {
        Self {
            fam,
            degree,
            opts,
            builds: BTreeMap::new(),
        }
    }

    pub fn get(&mut self, node: (i64, i64), t: C64) -> Option<&KernelApprox> {
        let (fam, degree, opts) = (self.fam, self.degree, self.opts);
        self.builds
            .entry(node)
            .or_insert_with(|| fam.slice_kernel(t, degree, opts).ok())
            .as_ref()
    }

    pub fn len(&self) -> usize {
        self.builds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.builds.is_empty()
    }
}

/// Second-difference probe of `(z, t) ↦ log K_{Ω̃_t}(z)` along segments in
/// `ℂ²`. The `t` components of every segment are snapped so all samples
/// land on nodes of a `t_grid × t_grid` lattice, and slice builds are shared
/// through a [`SliceCache`].
pub fn verify_joint_convexity(
    fam: &FiberedFamily,
    t_region: &ConvexDomain,
    degree: usize,
    opts: BuildOptions,
    settings: &JointSettings,
) -> Result<JointReport> {
    check_region_in_locus(fam, t_region)?;
    let m = settings.samples_per_segment;
    if m < 3 || settings.t_grid < 2 {
        return Err(Error::InvalidArgument("joint probe needs ≥ 3 samples and a grid of ≥ 2 nodes".into()));
    }
    let (lo, hi) = t_region.bounding_box();
    let g = settings.t_grid - 1;
    let step = C64::new((hi.re - lo.re) / g as f64, (hi.im - lo.im) / g as f64);
    let node_t = |i: i64, j: i64| lo + C64::new(i as f64 * step.re, j as f64 * step.im);
    let max_stride = match settings.mode {
        JointMode::FixedT => 0,
        _ => (g / (m - 1)) as i64,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut cache = SliceCache::new(fam, degree, opts);
    let mut plans: Vec<((i64, i64), (i64, i64), C64, C64)> = Vec::with_capacity(settings.n_segments);
    let mut attempts = 0usize;
    while plans.len() < settings.n_segments {
        attempts += 1;
        if attempts > 2000 * (settings.n_segments + 1) {
            return Err(Error::InvalidArgument("could not place joint probe segments".into()));
        }
        let start = (rng.gen_range(0..=g as i64), rng.gen_range(0..=g as i64));
        let stride = if max_stride == 0 {
            (0, 0)
        } else {
            (
                rng.gen_range(-max_stride..=max_stride),
                rng.gen_range(-max_stride..=max_stride),
            )
        };
        let end = (
            start.0 + stride.0 * (m as i64 - 1),
            start.1 + stride.1 * (m as i64 - 1),
        );
        let (t0, t1) = (node_t(start.0, start.1), node_t(end.0, end.1));
        if t_region.boundary_distance(t0) < settings.t_offset || t_region.boundary_distance(t1) < settings.t_offset {
            continue;
        }
        let slice0 = fam.slice(t0)?.domain;
        let slice1 = fam.slice(t1)?.domain;
        let (z0, z1) = match settings.mode {
            JointMode::FixedZ(z) => (z, z),
            _ => {
                let (Some(a), Some(b)) = (
                    sample_interior(&mut rng, &slice0, settings.z_offset * slice0.diameter()),
                    sample_interior(&mut rng, &slice1, settings.z_offset * slice1.diameter()),
                ) else {
                    continue;
                };
                (a, b)
            }
        };
        let zs = Segment::new(z0, z1, m)?.samples();
        let ok = (0..m).all(|k| {
            let t = node_t(start.0 + stride.0 * k as i64, start.1 + stride.1 * k as i64);
            fam.slice(t)
                .map(|s| s.domain.boundary_distance(zs[k]) >= settings.z_offset * s.domain.diameter())
                .unwrap_or(false)
        });
        if ok {
            plans.push((start, stride, z0, z1));
        }
    }

    // Evaluate along each plan; segments are parametrised by the sample index.
    let mut values: Vec<Option<Vec<f64>>> = Vec::with_capacity(plans.len());
    let mut source_error: f64 = 0.0;
    let mut oracle_err: f64 = 0.0;
    for (start, stride, z0, z1) in &plans {
        let zs = Segment::new(*z0, *z1, m)?.samples();
        let mut vals = Vec::with_capacity(m);
        for (k, z) in zs.iter().enumerate() {
            let node = (start.0 + stride.0 * k as i64, start.1 + stride.1 * k as i64);
            let t = node_t(node.0, node.1);
            let Some(kernel) = cache.get(node, t) else { break };
            source_error = source_error.max(kernel.gram_stability());
            let Ok(kv) = kernel.eval_k(*z) else { break };
            if let FiberedFamily::NormBall { radius } = fam {
                if let Ok(lk) = FiberedFamily::norm_ball_log_kernel(*radius, *z, t) {
                    oracle_err = oracle_err.max((kv / lk.exp() - 1.0).abs());
                }
            }
            vals.push(kv.ln());
        }
        values.push((vals.len() == m).then_some(vals));
    }

    // Feed the precomputed values through the shared scan by indexing on a unit segment.
    let index_segments: Vec<Segment> = (0..plans.len())
        .map(|i| Segment::new(C64::new(i as f64, 0.0), C64::new(i as f64, 1.0), m))
        .collect::<Result<_>>()?;
    let lookup = |z: C64| -> Option<f64> {
        let i = z.re as usize;
        let k = (z.im * (m - 1) as f64).round() as usize;
        values[i].as_ref().map(|v| v[k])
    };
    let mut report = check_convex_on_segments(
        lookup,
        &index_segments,
        Tolerance::Relative {
            floor: settings.tol_floor,
            source_error,
        },
        false,
    )?;
    // Report witnesses in the t variable rather than the index parametrisation.
    if let Some(crate::convexity::Witness::Segment { segment, index }) = report.witness {
        let (start, stride, z0, z1) = plans[segment.p.re as usize];
        let t_end = node_t(start.0 + stride.0 * (m as i64 - 1), start.1 + stride.1 * (m as i64 - 1));
        let _ = (z0, z1);
        report.witness = Some(crate::convexity::Witness::Segment {
            segment: Segment::new(node_t(start.0, start.1), t_end, m)?,
            index,
        });
    }
    Ok(JointReport {
        report,
        segments: plans
            .iter()
            .map(|(start, stride, z0, z1)| {
                let t_end = node_t(start.0 + stride.0 * (m as i64 - 1), start.1 + stride.1 * (m as i64 - 1));
                ((*z0, node_t(start.0, start.1)), (*z1, t_end))
            })
            .collect(),
        slice_builds: cache.len(),
        oracle_max_rel_error: matches!(fam, FiberedFamily::NormBall { .. }).then_some(oracle_err),
    })
}
