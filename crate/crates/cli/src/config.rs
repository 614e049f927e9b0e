//! JSON experiment configs.

use anyhow::{bail, Context, Result};
use bergman_core::classical::TaylorMap;
use bergman_core::convexity::ProbeSettings;
use bergman_core::families::{FiberedFamily, JointMode, JointSettings};
use bergman_core::geometry::{ConvexDomain, Domain, SimplePolygon};
use bergman_core::kernel::{BuildOptions, ClosedFormKernel, DEFAULT_BOUNDARY_OFFSET, DEFAULT_REL_TOL};
use bergman_core::weights::{AffinePiece, Weight};
use bergman_core::C64;
use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

pub fn to_c(p: Point) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disk {
        center: Point,
        radius: f64,
    },
    Ellipse {
        center: Point,
        semi_axes: [f64; 2],
        #[serde(default)]
        rotation: f64,
    },
    Rectangle {
        x: [f64; 2],
        y: [f64; 2],
    },
    RegularPolygon {
        center: Point,
        radius: f64,
        sides: usize,
        #[serde(default)]
        phase: f64,
    },
    Polygon {
        vertices: Vec<Point>,
    },
    /// Counterclockwise simple polygon, convex or not.
    SimplePolygon {
        vertices: Vec<Point>,
    },
    LShape {},
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        Ok(match self {
            DomainSpec::SimplePolygon { vertices } => {
                Domain::NonConvex(SimplePolygon::new(vertices.iter().copied().map(to_c).collect())?)
            }
            DomainSpec::LShape {} => Domain::NonConvex(SimplePolygon::l_shape()),
            _ => Domain::Convex(self.convex()?),
        })
    }

    pub fn convex(&self) -> Result<ConvexDomain> {
        Ok(match self {
            DomainSpec::Disk { center, radius } => ConvexDomain::disk(to_c(*center), *radius)?,
            DomainSpec::Ellipse {
                center,
                semi_axes,
                rotation,
            } => ConvexDomain::ellipse(to_c(*center), (semi_axes[0], semi_axes[1]), *rotation)?,
            DomainSpec::Rectangle { x, y } => ConvexDomain::rectangle(x[0], x[1], y[0], y[1])?,
            DomainSpec::RegularPolygon {
                center,
                radius,
                sides,
                phase,
            } => ConvexDomain::regular_polygon(to_c(*center), *radius, *sides, *phase)?,
            DomainSpec::Polygon { vertices } => ConvexDomain::polygon(vertices.iter().copied().map(to_c).collect())?,
            DomainSpec::SimplePolygon { .. } | DomainSpec::LShape {} => {
                bail!("this experiment needs a convex domain")
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub gradient: [f64; 2],
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Zero {},
    /// `a x² + b y² + c x y`.
    Quadratic {
        a: f64,
        b: f64,
        c: f64,
    },
    XSquared {},
    /// `α |z − center|²`.
    Modsq {
        alpha: f64,
        #[serde(default)]
        center: Point,
    },
    MaxAffine {
        pieces: Vec<PieceSpec>,
    },
}

impl WeightSpec {
    pub fn build(&self) -> Result<Weight> {
        Ok(match self {
            WeightSpec::Zero {} => Weight::Zero,
            WeightSpec::Quadratic { a, b, c } => Weight::quadratic(*a, *b, *c),
            WeightSpec::XSquared {} => Weight::x_squared(),
            WeightSpec::Modsq { alpha, center } => Weight::modulus_squared(*alpha, to_c(*center))?,
            WeightSpec::MaxAffine { pieces } => Weight::max_affine(
                pieces
                    .iter()
                    .map(|p| AffinePiece {
                        gradient: (p.gradient[0], p.gradient[1]),
                        offset: p.offset,
                    })
                    .collect(),
            )?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleSpec {
    UnitDiskUnweighted {},
    DiskFock { radius: f64, alpha: f64 },
    GaussianX { normalization: f64 },
}

impl OracleSpec {
    pub fn build(&self) -> ClosedFormKernel {
        match self {
            OracleSpec::UnitDiskUnweighted {} => ClosedFormKernel::UnitDiskUnweighted,
            OracleSpec::DiskFock { radius, alpha } => ClosedFormKernel::DiskFock {
                radius: *radius,
                alpha: *alpha,
            },
            OracleSpec::GaussianX { normalization } => ClosedFormKernel::GaussianX {
                normalization: Some(*normalization),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PointSet {
    List {
        points: Vec<Point>,
    },
    /// `radii × angles` points `center + r e^{iθ}` with `r = max_radius·k/(radii−1)`.
    Polar {
        center: Point,
        max_radius: f64,
        radii: usize,
        angles: usize,
    },
}

impl PointSet {
    pub fn points(&self) -> Vec<C64> {
        match self {
            PointSet::List { points } => points.iter().copied().map(to_c).collect(),
            PointSet::Polar {
                center,
                max_radius,
                radii,
                angles,
            } => {
                let mut out = Vec::with_capacity(radii * angles);
                for i in 0..*radii {
                    let r = if *radii > 1 {
                        max_radius * i as f64 / (*radii - 1) as f64
                    } else {
                        *max_radius
                    };
                    for k in 0..*angles {
                        let theta = std::f64::consts::TAU * k as f64 / *angles as f64;
                        out.push(to_c(*center) + C64::from_polar(r, theta));
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Oka {
        domain: DomainSpec,
        weight: WeightSpec,
        z0: Point,
        z1: Point,
    },
    NormBall {
        radius: f64,
    },
}

impl FamilySpec {
    pub fn build(&self) -> Result<FiberedFamily> {
        Ok(match self {
            FamilySpec::Oka { domain, weight, z0, z1 } => {
                FiberedFamily::oka(domain.convex()?, weight.build()?, to_c(*z0), to_c(*z1))?
            }
            FamilySpec::NormBall { radius } => FiberedFamily::norm_ball(*radius)?,
        })
    }
}

/// Which way a control is expected to go.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Violation,
    NoViolation,
    /// Recorded only.
    Unasserted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum JointModeSpec {
    Free,
    FixedZ { z: Point },
    FixedT,
}

impl From<JointModeSpec> for JointMode {
    fn from(m: JointModeSpec) -> Self {
        match m {
            JointModeSpec::Free => JointMode::Free,
            JointModeSpec::FixedZ { z } => JointMode::FixedZ(to_c(z)),
            JointModeSpec::FixedT => JointMode::FixedT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct PushforwardSpec {
    pub coeffs: Vec<Point>,
    pub radius: f64,
    pub vertices: usize,
    pub probes: Vec<Point>,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    KernelEval {
        domain: DomainSpec,
        weight: WeightSpec,
        points: PointSet,
        #[serde(default)]
        oracle: Option<OracleSpec>,
        /// Asserted bound on the relative error against `oracle`.
        #[serde(default)]
        max_rel_error: Option<f64>,
        /// Emit the quadrature rule as a table.
        #[serde(default)]
        dump_rule: bool,
    },
    KernelConverge {
        domain: DomainSpec,
        weight: WeightSpec,
        point: Point,
        degrees: Vec<usize>,
        threshold: f64,
    },
    Theorem1 {
        domain: DomainSpec,
        weight: WeightSpec,
        /// Grid step for the slice certification; `None` skips it.
        slice_spacing: Option<f64>,
    },
    NegativeControl {
        domain: DomainSpec,
        weight: WeightSpec,
        expect: Expectation,
        /// Smallest `|slack|` asserted for an expected violation.
        #[serde(default)]
        min_violation: Option<f64>,
    },
    RemarkCounterexample {
        /// Analytic scan points for `−e^{−x²/2}`.
        analytic_points: Vec<f64>,
        analytic_expected: f64,
        analytic_tol: f64,
        rectangle: DomainSpec,
        /// Segment on which `−1/√K_N` must violate convexity.
        segment: [Point; 2],
        /// Further axis-parallel segments on which `log K_N` is checked too.
        extra_segments: Vec<[Point; 2]>,
        /// A violation must exceed this multiple of the tolerance.
        violation_factor: f64,
    },
    QuestionExplorer {
        domain: DomainSpec,
        /// Use `−√π(1 − |z|²)` instead of a kernel build (unit disk only).
        #[serde(default)]
        closed_form: bool,
    },
    FamilySweep {
        family: FamilySpec,
        ts: Vec<Point>,
        /// Asserted bound against `1/(π(ρ − |t|)²)` (norm ball) or `K_Ω(z_t)` (Oka).
        max_rel_error: f64,
    },
    FamilyIdentity {
        family: FamilySpec,
        ts: Vec<Point>,
        /// Relative error must be at most `max(floor, 3·gram_stability)`.
        floor: f64,
    },
    FamilyTheorem31 {
        family: FamilySpec,
        t_region: DomainSpec,
        /// Asserted lower bound on the minimum slack.
        min_slack: f64,
    },
    FamilyJoint {
        family: FamilySpec,
        t_region: DomainSpec,
        segments: usize,
        samples: usize,
        t_grid: usize,
        z_offset: f64,
        mode: JointModeSpec,
    },
    ClassicHyperbolic {
        points: PointSet,
        max_rel_error: f64,
        #[serde(default)]
        pushforward: Option<PushforwardSpec>,
    },
    ClassicUnivalent {
        /// `a_k` as `[re, im]`, starting at `a_0`.
        coeffs: Vec<Point>,
        r_grid: Vec<f64>,
        theta_count: usize,
        expect: Expectation,
        /// Witness must lie within `witness_radius` of this point when given.
        #[serde(default)]
        witness_near: Option<Point>,
        #[serde(default)]
        witness_radius: Option<f64>,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::KernelEval { .. } => "kernel_eval",
            Experiment::KernelConverge { .. } => "kernel_converge",
            Experiment::Theorem1 { .. } => "theorem1",
            Experiment::NegativeControl { .. } => "negative_control",
            Experiment::RemarkCounterexample { .. } => "remark_counterexample",
            Experiment::QuestionExplorer { .. } => "question_explorer",
            Experiment::FamilySweep { .. } => "family_sweep",
            Experiment::FamilyIdentity { .. } => "family_identity",
            Experiment::FamilyTheorem31 { .. } => "family_theorem31",
            Experiment::FamilyJoint { .. } => "family_joint",
            Experiment::ClassicHyperbolic { .. } => "classic_hyperbolic",
            Experiment::ClassicUnivalent { .. } => "classic_univalent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub segments: usize,
    pub samples: usize,
    /// Absolute margin from the boundary; `None` uses the kernel's probe offset.
    pub boundary_offset: Option<f64>,
    /// Floor of the relative convexity tolerance.
    pub tol_floor: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            segments: 200,
            samples: 33,
            boundary_offset: None,
            tol_floor: 1e-7,
        }
    }
}

impl ProbeConfig {
    pub fn settings(&self, kernel_offset: f64, seed: u64) -> ProbeSettings {
        ProbeSettings {
            n_segments: self.segments,
            samples_per_segment: self.samples,
            boundary_offset: self.boundary_offset.unwrap_or(kernel_offset),
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildConfig {
    pub rel_tol: f64,
    /// Probe offset as a fraction of the domain diameter.
    pub boundary_offset: f64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            boundary_offset: DEFAULT_BOUNDARY_OFFSET,
        }
    }
}

impl From<BuildConfig> for BuildOptions {
    fn from(b: BuildConfig) -> Self {
        BuildOptions {
            rel_tol: b.rel_tol,
            boundary_offset: b.boundary_offset,
        }
    }
}

/// One experiment with every knob explicit; the report echoes it verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    /// Kernel degree `N`.
    pub degree: usize,
    #[serde(default)]
    pub probes: ProbeConfig,
    #[serde(default)]
    pub build: BuildConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("parsing experiment config")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn joint_settings(&self) -> Option<JointSettings> {
        match &self.experiment {
            Experiment::FamilyJoint {
                segments,
                samples,
                t_grid,
                z_offset,
                mode,
                ..
            } => Some(JointSettings {
                n_segments: *segments,
                samples_per_segment: *samples,
                t_grid: *t_grid,
                z_offset: *z_offset,
                t_offset: 0.0,
                seed: self.seed,
                tol_floor: self.probes.tol_floor,
                mode: (*mode).into(),
            }),
            _ => None,
        }
    }
}

pub fn taylor_map(coeffs: &[Point]) -> Result<TaylorMap> {
    Ok(TaylorMap::new(coeffs.iter().copied().map(to_c).collect())?)
}

/// Configs shipped with the binary; `suite` runs them in this order.
pub const SHIPPED: &[(&str, &str)] = &[
    ("disk-oracle", include_str!("../configs/disk-oracle.json")),
    ("fock-oracle", include_str!("../configs/fock-oracle.json")),
    ("disk-converge", include_str!("../configs/disk-converge.json")),
    ("thm1-square-zero", include_str!("../configs/thm1-square-zero.json")),
    ("thm1-ellipse-modsq", include_str!("../configs/thm1-ellipse-modsq.json")),
    ("thm1-pentagon-maxaffine", include_str!("../configs/thm1-pentagon-maxaffine.json")),
    ("control-l-shape", include_str!("../configs/control-l-shape.json")),
    ("control-saddle-weight", include_str!("../configs/control-saddle-weight.json")),
    ("control-convex-rerun", include_str!("../configs/control-convex-rerun.json")),
    ("remark", include_str!("../configs/remark.json")),
    ("question-disk", include_str!("../configs/question-disk.json")),
    ("question-square", include_str!("../configs/question-square.json")),
    ("family-ball-sweep", include_str!("../configs/family-ball-sweep.json")),
    ("family-oka-identity", include_str!("../configs/family-oka-identity.json")),
    ("family-ball-theorem31", include_str!("../configs/family-ball-theorem31.json")),
    ("family-ball-joint", include_str!("../configs/family-ball-joint.json")),
    ("classic-hyperbolic", include_str!("../configs/classic-hyperbolic.json")),
    ("classic-identity", include_str!("../configs/classic-identity.json")),
    ("classic-half-plane", include_str!("../configs/classic-half-plane.json")),
    ("classic-koebe", include_str!("../configs/classic-koebe.json")),
];

pub fn shipped(name: &str) -> Result<ExperimentConfig> {
    let (_, text) = SHIPPED
        .iter()
        .find(|(n, _)| *n == name)
        .with_context(|| format!("no shipped config named {name}"))?;
    ExperimentConfig::from_json(text).with_context(|| format!("shipped config {name}"))
}

pub fn shipped_all() -> Result<Vec<ExperimentConfig>> {
    SHIPPED.iter().map(|(n, _)| shipped(n)).collect()
}
