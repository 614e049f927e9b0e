//! Bounded planar regions: disks, ellipses, convex polygons, and simple
//! (possibly non-convex) polygons used as negative controls.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use crate::float::Float;
use crate::{Error, Result, C64};

/// Common queries shared by every region the kernel pipeline accepts.
pub trait Region {
    /// Membership with a boundary band of width `tol` counted as inside.
    fn contains(&self, z: C64, tol: f64) -> bool;
    /// Signed distance to the boundary, positive inside.
    fn boundary_distance(&self, z: C64) -> f64;
    /// Axis-aligned bounding box as `(lower-left, upper-right)`.
    fn bounding_box(&self) -> (C64, C64);
    fn diameter(&self) -> f64;
    fn area(&self) -> f64;
    fn centroid(&self) -> C64;
}

#[inline]
fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn shoelace(vertices: &[C64]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| cross(vertices[i], vertices[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

fn polygon_centroid(vertices: &[C64]) -> C64 {
    let n = vertices.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        acc += (a + b) * cross(a, b);
    }
    acc / (6.0 * shoelace(vertices))
}

fn vertex_diameter(vertices: &[C64]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

fn vertex_bbox(vertices: &[C64]) -> (C64, C64) {
    let mut lo = C64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in vertices {
        lo.re = lo.re.min(v.re);
        lo.im = lo.im.min(v.im);
        hi.re = hi.re.max(v.re);
        hi.im = hi.im.max(v.im);
    }
    (lo, hi)
}

fn point_segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    let u = if len2 > 0.0 {
        ((z - a).re * d.re + (z - a).im * d.im) / len2
    } else {
        0.0
    };
    (z - (a + d * u.clamp(0.0, 1.0))).norm()
}

fn check_vertices(vertices: &[C64]) -> Result<()> {
    if vertices.len() < 3 {
        return Err(Error::InvalidDomain(format!(
            "polygon needs at least 3 vertices, got {}",
            vertices.len()
        )));
    }
    if vertices.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidDomain("non-finite vertex".into()));
    }
    Ok(())
}

/// A triangle with counterclockwise vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Triangle {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl Triangle {
    pub fn new(a: C64, b: C64, c: C64) -> Self {
        Self { a, b, c }
    }

    pub fn area(&self) -> f64 {
        0.5 * cross(self.b - self.a, self.c - self.a)
    }

    /// Splits into `k²` congruent sub-triangles (all counterclockwise).
    pub fn subdivide(&self, k: usize) -> Vec<Triangle> {
        let k = k.max(1);
        let e1 = (self.b - self.a) / k as f64;
        let e2 = (self.c - self.a) / k as f64;
        let p = |i: usize, j: usize| self.a + e1 * i as f64 + e2 * j as f64;
        let mut out = Vec::with_capacity(k * k);
        for j in 0..k {
            for i in 0..k - j {
                out.push(Triangle::new(p(i, j), p(i + 1, j), p(i, j + 1)));
                if i + j + 1 < k {
                    out.push(Triangle::new(p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)));
                }
            }
        }
        out
    }
}

/// Shape of a [`ConvexDomain`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Shape {
    Disk {
        center: C64,
        radius: f64,
    },
    Ellipse {
        center: C64,
        semi_axes: (f64, f64),
        rotation: f64,
    },
    /// Strictly convex, counterclockwise vertices.
    Polygon { vertices: Vec<C64> },
}

/// A bounded convex planar domain.
///
/// Only constructible through the validating constructors, so every value
/// satisfies the convexity and positivity invariants.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ConvexDomain(Shape);

impl ConvexDomain {
    pub fn disk(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!("disk radius {radius} must be positive")));
        }
        Ok(Self(Shape::Disk { center, radius }))
    }

    pub fn unit_disk() -> Self {
        Self(Shape::Disk {
            center: C64::new(0.0, 0.0),
            radius: 1.0,
        })
    }

    pub fn ellipse(center: C64, semi_axes: (f64, f64), rotation: f64) -> Result<Self> {
        let (a, b) = semi_axes;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() && rotation.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "ellipse semi-axes ({a}, {b}) must be positive"
            )));
        }
        Ok(Self(Shape::Ellipse {
            center,
            semi_axes,
            rotation,
        }))
    }

    /// Rejects anything that is not strictly convex in counterclockwise order.
    pub fn polygon(vertices: Vec<C64>) -> Result<Self> {
        check_vertices(&vertices)?;
        let n = vertices.len();
        for i in 0..n {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if cross(b - a, c - b) <= 0.0 {
                return Err(Error::InvalidDomain(format!(
                    "polygon is not strictly convex counterclockwise at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        // A star polygon can turn left at every vertex; total turning must be one revolution.
        let turning: f64 = (0..n)
            .map(|i| {
                let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
                ((c - b) / (b - a)).arg()
            })
            .sum();
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::InvalidDomain("polygon winds more than once".into()));
        }
        Ok(Self(Shape::Polygon { vertices }))
    }

    /// Axis-parallel rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Self::polygon(alloc::vec![
            C64::new(x0, y0),
            C64::new(x1, y0),
            C64::new(x1, y1),
            C64::new(x0, y1),
        ])
    }

    /// Regular `n`-gon inscribed in the circle of the given radius, first vertex at angle `phase`.
    pub fn regular_polygon(center: C64, radius: f64, n: usize, phase: f64) -> Result<Self> {
        let vertices = (0..n)
            .map(|k| center + C64::from_polar(radius, phase + 2.0 * PI * k as f64 / n as f64))
            .collect();
        Self::polygon(vertices)
    }

    pub fn shape(&self) -> &Shape {
        &self.0
    }

    /// Image under `z ↦ scale·z + translate`.
    pub fn affine_image(&self, scale: C64, translate: C64) -> Result<Self> {
        if scale.norm() == 0.0 {
            return Err(Error::InvalidArgument("affine scale must be nonzero".into()));
        }
        Ok(match &self.0 {
            Shape::Disk { center, radius } => Self(Shape::Disk {
                center: scale * center + translate,
                radius: scale.norm() * radius,
            }),
            Shape::Ellipse {
                center,
                semi_axes,
                rotation,
            } => Self(Shape::Ellipse {
                center: scale * center + translate,
                semi_axes: (semi_axes.0 * scale.norm(), semi_axes.1 * scale.norm()),
                rotation: rotation + scale.arg(),
            }),
            Shape::Polygon { vertices } => Self(Shape::Polygon {
                vertices: vertices.iter().map(|v| scale * v + translate).collect(),
            }),
        })
    }

    pub fn translate(&self, by: C64) -> Self {
        self.affine_image(C64::new(1.0, 0.0), by)
            .expect("unit scale is nonzero")
    }

    /// Fan triangulation.
    ///
    /// Polygons are tiled exactly by their centroid fan, each fan triangle
    /// split into `refinement²` pieces. Disks and ellipses are replaced by
    /// an inscribed `2^(refinement+2)`-gon, so the tiling under-covers the
    /// curved region; quadrature on curved domains uses polar rules instead.
    pub fn triangulate(&self, refinement: usize) -> Vec<Triangle> {
        let refinement = refinement.max(1);
        match &self.0 {
            Shape::Polygon { vertices } => {
                let c = polygon_centroid(vertices);
                let n = vertices.len();
                (0..n)
                    .flat_map(|i| {
                        Triangle::new(c, vertices[i], vertices[(i + 1) % n]).subdivide(refinement)
                    })
                    .collect()
            }
            Shape::Disk { .. } | Shape::Ellipse { .. } => {
                let n = 4usize << refinement.min(20);
                let c = self.centroid();
                let pts: Vec<C64> = (0..n)
                    .map(|k| self.boundary_point(2.0 * PI * k as f64 / n as f64))
                    .collect();
                (0..n)
                    .map(|k| Triangle::new(c, pts[k], pts[(k + 1) % n]))
                    .collect()
            }
        }
    }

    /// Boundary point at parameter angle `theta` (disk/ellipse) or vertex
    /// interpolation for polygons (`theta` scaled onto the perimeter index).
    pub fn boundary_point(&self, theta: f64) -> C64 {
        match &self.0 {
            Shape::Disk { center, radius } => center + C64::from_polar(*radius, theta),
            Shape::Ellipse {
                center,
                semi_axes,
                rotation,
            } => {
                let local = C64::new(semi_axes.0 * theta.cos(), semi_axes.1 * theta.sin());
                center + local * C64::from_polar(1.0, *rotation)
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let x = theta / (2.0 * PI);
                let u = (x - x.floor()) * n as f64;
                let i = (u.floor() as usize).min(n - 1);
                let f = u - i as f64;
                vertices[i] * (1.0 - f) + vertices[(i + 1) % n] * f
            }
        }
    }
}

/// Distance from `(y0, y1)` (first quadrant) to the ellipse with semi-axes
/// `e0 ≥ e1`, by bisection on the Lagrange multiplier.
fn ellipse_distance(e0: f64, e1: f64, y0: f64, y1: f64) -> f64 {
    fn root(r0: f64, z0: f64, z1: f64, mut g: f64) -> f64 {
        let n0 = r0 * z0;
        let mut s0 = z1 - 1.0;
        let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
        let mut s = 0.0;
        for _ in 0..1100 {
            s = 0.5 * (s0 + s1);
            if s == s0 || s == s1 {
                break;
            }
            let (a, b) = (n0 / (s + r0), z1 / (s + 1.0));
            g = a * a + b * b - 1.0;
            if g > 0.0 {
                s0 = s;
            } else if g < 0.0 {
                s1 = s;
            } else {
                break;
            }
        }
        s
    }

    if y1 > 0.0 {
        if y0 > 0.0 {
            let (z0, z1) = (y0 / e0, y1 / e1);
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g != 0.0 {
                let r0 = (e0 / e1) * (e0 / e1);
                let sbar = root(r0, z0, z1, g);
                let x0 = r0 * y0 / (sbar + r0);
                let x1 = y1 / (sbar + 1.0);
                (x0 - y0).hypot(x1 - y1)
            } else {
                0.0
            }
        } else {
            (y1 - e1).abs()
        }
    } else {
        let numer0 = e0 * y0;
        let denom0 = e0 * e0 - e1 * e1;
        if numer0 < denom0 {
            let xde0 = numer0 / denom0;
            let x0 = e0 * xde0;
            let x1 = e1 * (1.0 - xde0 * xde0).max(0.0).sqrt();
            (x0 - y0).hypot(x1)
        } else {
            (y0 - e0).abs()
        }
    }
}

impl Region for ConvexDomain {
    fn contains(&self, z: C64, tol: f64) -> bool {
        match &self.0 {
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    cross(b - a, z - a) >= -tol * (b - a).norm()
                })
            }
            _ => self.boundary_distance(z) >= -tol,
        }
    }

    fn boundary_distance(&self, z: C64) -> f64 {
        match &self.0 {
            Shape::Disk { center, radius } => radius - (z - center).norm(),
            Shape::Ellipse {
                center,
                semi_axes,
                rotation,
            } => {
                let p = (z - center) * C64::from_polar(1.0, -rotation);
                let (mut e0, mut e1) = *semi_axes;
                let (mut y0, mut y1) = (p.re.abs(), p.im.abs());
                if e0 < e1 {
                    core::mem::swap(&mut e0, &mut e1);
                    core::mem::swap(&mut y0, &mut y1);
                }
                let d = ellipse_distance(e0, e1, y0, y1);
                if (y0 / e0).powi(2) + (y1 / e1).powi(2) <= 1.0 {
                    d
                } else {
                    -d
                }
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let inside_min = (0..n)
                    .map(|i| {
                        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                        cross(b - a, z - a) / (b - a).norm()
                    })
                    .fold(f64::INFINITY, f64::min);
                if inside_min >= 0.0 {
                    inside_min
                } else {
                    -(0..n)
                        .map(|i| point_segment_distance(z, vertices[i], vertices[(i + 1) % n]))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    fn bounding_box(&self) -> (C64, C64) {
        match &self.0 {
            Shape::Disk { center, radius } => (
                center - C64::new(*radius, *radius),
                center + C64::new(*radius, *radius),
            ),
            Shape::Ellipse {
                center,
                semi_axes: (a, b),
                rotation,
            } => {
                let (s, c) = rotation.sin_cos();
                let hx = (a * a * c * c + b * b * s * s).sqrt();
                let hy = (a * a * s * s + b * b * c * c).sqrt();
                (center - C64::new(hx, hy), center + C64::new(hx, hy))
            }
            Shape::Polygon { vertices } => vertex_bbox(vertices),
        }
    }

    fn diameter(&self) -> f64 {
        match &self.0 {
            Shape::Disk { radius, .. } => 2.0 * radius,
            Shape::Ellipse { semi_axes, .. } => 2.0 * semi_axes.0.max(semi_axes.1),
            Shape::Polygon { vertices } => vertex_diameter(vertices),
        }
    }

    fn area(&self) -> f64 {
        match &self.0 {
            Shape::Disk { radius, .. } => PI * radius * radius,
            Shape::Ellipse { semi_axes, .. } => PI * semi_axes.0 * semi_axes.1,
            Shape::Polygon { vertices } => shoelace(vertices),
        }
    }

    fn centroid(&self) -> C64 {
        match &self.0 {
            Shape::Disk { center, .. } | Shape::Ellipse { center, .. } => *center,
            Shape::Polygon { vertices } => polygon_centroid(vertices),
        }
    }
}

/// Simple counterclockwise polygon, possibly non-convex.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SimplePolygon {
    vertices: Vec<C64>,
}

fn segments_intersect(p1: C64, p2: C64, q1: C64, q2: C64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: C64, b: C64, p: C64, d: f64| {
        d == 0.0
            && p.re >= a.re.min(b.re)
            && p.re <= a.re.max(b.re)
            && p.im >= a.im.min(b.im)
            && p.im <= a.im.max(b.im)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

impl SimplePolygon {
    pub fn new(vertices: Vec<C64>) -> Result<Self> {
        check_vertices(&vertices)?;
        let n = vertices.len();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                if segments_intersect(
                    vertices[i],
                    vertices[(i + 1) % n],
                    vertices[j],
                    vertices[(j + 1) % n],
                ) {
                    return Err(Error::InvalidDomain(format!(
                        "edges {i} and {j} intersect; polygon is not simple"
                    )));
                }
            }
        }
        if shoelace(&vertices) <= 0.0 {
            return Err(Error::InvalidDomain("polygon must be counterclockwise".into()));
        }
        Ok(Self { vertices })
    }

    /// L-shaped hexagon: the square `[-1,1]²` minus its upper-right quadrant.
    pub fn l_shape() -> Self {
        Self::new(alloc::vec![
            C64::new(-1.0, -1.0),
            C64::new(1.0, -1.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(-1.0, 1.0),
        ])
        .expect("L-shape is simple")
    }

    pub fn vertices(&self) -> &[C64] {
        &self.vertices
    }

    pub fn is_convex(&self) -> bool {
        ConvexDomain::polygon(self.vertices.clone()).is_ok()
    }

    fn winding_inside(&self, z: C64) -> bool {
        let v = &self.vertices;
        let n = v.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (v[i], v[j]);
            if (a.im > z.im) != (b.im > z.im)
                && z.re < (b.re - a.re) * (z.im - a.im) / (b.im - a.im) + a.re
            {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    /// Ear-clipping triangulation; the triangles tile the polygon exactly.
    pub fn triangulate(&self) -> Vec<Triangle> {
        let mut idx: Vec<usize> = (0..self.vertices.len()).collect();
        let v = &self.vertices;
        let mut out = Vec::with_capacity(v.len() - 2);
        while idx.len() > 3 {
            let m = idx.len();
            let mut clipped = false;
            for k in 0..m {
                let (ia, ib, ic) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
                let (a, b, c) = (v[ia], v[ib], v[ic]);
                if cross(b - a, c - b) <= 0.0 {
                    continue;
                }
                let blocked = idx.iter().any(|&j| {
                    if j == ia || j == ib || j == ic {
                        return false;
                    }
                    let p = v[j];
                    cross(b - a, p - a) >= 0.0 && cross(c - b, p - b) >= 0.0 && cross(a - c, p - c) >= 0.0
                });
                if !blocked {
                    out.push(Triangle::new(a, b, c));
                    idx.remove(k);
                    clipped = true;
                    break;
                }
            }
            if !clipped {
                // Only reachable through round-off on nearly collinear input.
                break;
            }
        }
        if idx.len() == 3 {
            out.push(Triangle::new(v[idx[0]], v[idx[1]], v[idx[2]]));
        }
        out
    }
}

impl Region for SimplePolygon {
    fn contains(&self, z: C64, tol: f64) -> bool {
        self.boundary_distance(z) >= -tol
    }

    fn boundary_distance(&self, z: C64) -> f64 {
        let n = self.vertices.len();
        let d = (0..n)
            .map(|i| point_segment_distance(z, self.vertices[i], self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min);
        if self.winding_inside(z) {
            d
        } else {
            -d
        }
    }

    fn bounding_box(&self) -> (C64, C64) {
        vertex_bbox(&self.vertices)
    }

    fn diameter(&self) -> f64 {
        vertex_diameter(&self.vertices)
    }

    fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    fn centroid(&self) -> C64 {
        polygon_centroid(&self.vertices)
    }
}

/// Either a convex domain or a non-convex control polygon.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Domain {
    Convex(ConvexDomain),
    NonConvex(SimplePolygon),
}

impl Domain {
    pub fn is_convex(&self) -> bool {
        matches!(self, Domain::Convex(_))
    }

    pub fn as_convex(&self) -> Option<&ConvexDomain> {
        match self {
            Domain::Convex(d) => Some(d),
            Domain::NonConvex(_) => None,
        }
    }
}

impl From<ConvexDomain> for Domain {
    fn from(d: ConvexDomain) -> Self {
        Domain::Convex(d)
    }
}

impl From<SimplePolygon> for Domain {
    fn from(p: SimplePolygon) -> Self {
        Domain::NonConvex(p)
    }
}

macro_rules! delegate {
    ($self:ident, $d:ident => $e:expr) => {
        match $self {
            Domain::Convex($d) => $e,
            Domain::NonConvex($d) => $e,
        }
    };
}

impl Region for Domain {
    fn contains(&self, z: C64, tol: f64) -> bool {
        delegate!(self, d => d.contains(z, tol))
    }
    fn boundary_distance(&self, z: C64) -> f64 {
        delegate!(self, d => d.boundary_distance(z))
    }
    fn bounding_box(&self) -> (C64, C64) {
        delegate!(self, d => d.bounding_box())
    }
    fn diameter(&self) -> f64 {
        delegate!(self, d => d.diameter())
    }
    fn area(&self) -> f64 {
        delegate!(self, d => d.area())
    }
    fn centroid(&self) -> C64 {
        delegate!(self, d => d.centroid())
    }
}

/// Segment `[p, q]` sampled at `sample_count` equispaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Segment {
    pub p: C64,
    pub q: C64,
    pub sample_count: usize,
}

impl Segment {
    pub fn new(p: C64, q: C64, sample_count: usize) -> Result<Self> {
        if sample_count < 2 {
            return Err(Error::InvalidArgument(format!(
                "segment needs at least 2 samples, got {sample_count}"
            )));
        }
        Ok(Self { p, q, sample_count })
    }

    /// `(1−u)p + u q` at `u_i = i/(m−1)`; endpoints are reproduced exactly.
    pub fn samples(&self) -> Vec<C64> {
        let m = self.sample_count;
        (0..m)
            .map(|i| {
                let u = i as f64 / (m - 1) as f64;
                self.p * (1.0 - u) + self.q * u
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn square() -> ConvexDomain {
        ConvexDomain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap()
    }

    #[test]
    fn membership_examples() {
        let disk = ConvexDomain::unit_disk();
        assert!(disk.contains(c(0.0, 0.0), 0.0));
        assert!(!disk.contains(c(1.001, 0.0), 0.0));
        assert!(square().contains(c(0.5, 0.5), 0.0));
        assert!(square().contains(c(1.0 + 1e-9, 0.0), 1e-8));
        assert!(!square().contains(c(1.0 + 1e-7, 0.0), 1e-8));
    }

    #[test]
    fn square_fan_has_four_unit_triangles() {
        let tris = square().triangulate(1);
        assert_eq!(tris.len(), 4);
        for t in &tris {
            assert!((t.area() - 1.0).abs() < 1e-14);
        }
        let refined: f64 = square().triangulate(3).iter().map(Triangle::area).sum();
        assert!((refined - 4.0).abs() < 1e-13);
    }

    #[test]
    fn triangle_fan_areas_sum_to_area() {
        let tri = ConvexDomain::polygon(vec![c(0.0, 0.0), c(3.0, 0.0), c(0.5, 2.0)]).unwrap();
        let tris = tri.triangulate(1);
        assert_eq!(tris.len(), 3);
        let sum: f64 = tris.iter().map(Triangle::area).sum();
        assert!((sum - tri.area()).abs() < 1e-12 * tri.area());
    }

    #[test]
    fn inscribed_polygon_area_tends_to_pi() {
        let disk = ConvexDomain::unit_disk();
        let mut prev_err = f64::INFINITY;
        for k in 1..8 {
            let n = 4usize << k;
            let area: f64 = disk.triangulate(k).iter().map(Triangle::area).sum();
            let expected = n as f64 * (2.0 * PI / n as f64).sin() / 2.0;
            assert!((area - expected).abs() < 1e-12);
            let err = PI - area;
            assert!(err > 0.0 && err < prev_err);
            prev_err = err;
        }
        assert!(prev_err < 1e-3);
    }

    #[test]
    fn segment_sample_examples() {
        let s = Segment::new(c(0.0, 0.0), c(1.0, 0.0), 3).unwrap().samples();
        assert_eq!(s, vec![c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)]);
        let s = Segment::new(c(0.0, 0.3), c(0.0, 0.3), 5).unwrap().samples();
        assert!(s.iter().all(|z| *z == c(0.0, 0.3)));
        assert_eq!(s.len(), 5);
        let s = Segment::new(c(-1.0, 0.0), c(0.0, 1.0), 2).unwrap().samples();
        assert_eq!(s, vec![c(-1.0, 0.0), c(0.0, 1.0)]);
        assert!(Segment::new(c(0.0, 0.0), c(1.0, 0.0), 1).is_err());
    }

    #[test]
    fn affine_image_examples() {
        let d = ConvexDomain::unit_disk().affine_image(c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        assert_eq!(d, ConvexDomain::disk(c(2.0, 0.0), 1.0).unwrap());
        let d = ConvexDomain::unit_disk().affine_image(c(0.0, 2.0), c(0.0, 0.0)).unwrap();
        assert_eq!(d, ConvexDomain::disk(c(0.0, 0.0), 2.0).unwrap());
        let zt = c(0.3, -0.2);
        let sq = square().translate(-zt);
        let Shape::Polygon { vertices } = sq.shape() else { panic!() };
        let Shape::Polygon { vertices: orig } = square().shape().clone() else { panic!() };
        for (v, o) in vertices.iter().zip(orig) {
            assert_eq!(*v, o - zt);
        }
        assert!(square().affine_image(c(0.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn ellipse_affine_image_matches_pointwise_map() {
        let e = ConvexDomain::ellipse(c(0.5, -0.2), (2.0, 1.0), 0.3).unwrap();
        let scale = c(0.7, 1.1);
        let tr = c(-1.0, 0.4);
        let img = e.affine_image(scale, tr).unwrap();
        for k in 0..32 {
            let b = e.boundary_point(k as f64 * 0.2);
            assert!(img.boundary_distance(scale * b + tr).abs() < 1e-9);
        }
        assert!((img.area() - e.area() * scale.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn ellipse_distance_matches_brute_force() {
        let e = ConvexDomain::ellipse(c(0.2, 0.1), (2.0, 1.0), 0.7).unwrap();
        let boundary: Vec<C64> = (0..200_000)
            .map(|k| e.boundary_point(2.0 * PI * k as f64 / 200_000.0))
            .collect();
        for z in [c(0.0, 0.0), c(1.0, 0.5), c(0.2, 0.1), c(3.0, -2.0), c(-1.5, -0.9)] {
            let brute = boundary.iter().map(|b| (b - z).norm()).fold(f64::INFINITY, f64::min);
            let d = e.boundary_distance(z);
            assert!((d.abs() - brute).abs() < 1e-4, "z={z} d={d} brute={brute}");
            assert_eq!(d > 0.0, (z - c(0.2, 0.1)).norm() < 1.0 || e.contains(z, 0.0));
        }
    }

    #[test]
    fn non_convex_vertices_rejected_but_simple_accepted() {
        let l = SimplePolygon::l_shape();
        assert!(ConvexDomain::polygon(l.vertices().to_vec()).is_err());
        assert!(!l.is_convex());
        assert!((l.area() - 3.0).abs() < 1e-14);
        let cw: Vec<C64> = square_vertices().into_iter().rev().collect();
        assert!(ConvexDomain::polygon(cw.clone()).is_err());
        assert!(SimplePolygon::new(cw).is_err());
        let bowtie = vec![c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)];
        assert!(SimplePolygon::new(bowtie).is_err());
        let pentagram = (0..5)
            .map(|k| C64::from_polar(1.0, 4.0 * PI * k as f64 / 5.0))
            .collect();
        assert!(ConvexDomain::polygon(pentagram).is_err());
    }

    fn square_vertices() -> Vec<C64> {
        vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)]
    }

    #[test]
    fn l_shape_membership_and_ear_clipping() {
        let l = SimplePolygon::l_shape();
        assert!(l.contains(c(-0.5, 0.5), 0.0));
        assert!(l.contains(c(0.5, -0.5), 0.0));
        assert!(!l.contains(c(0.5, 0.5), 0.0));
        let tris = l.triangulate();
        assert_eq!(tris.len(), 4);
        assert!(tris.iter().all(|t| t.area() > 0.0));
        let sum: f64 = tris.iter().map(Triangle::area).sum();
        assert!((sum - 3.0).abs() < 1e-14);
        assert!((l.boundary_distance(c(0.5, 0.5)) + 0.5).abs() < 1e-14);
    }
}
