//! Positive quadrature rules over planar regions.
//!
//! Polygons are cut into triangles and integrated with collapsed
//! Gauss–Legendre product rules; disks and ellipses use a polar tensor rule
//! (Gauss–Legendre in the radius, trapezoid in the angle). Every rule has
//! strictly positive weights summing to the region's area and integrates all
//! real polynomials of total degree `≤ exact_degree` exactly.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use crate::float::{Float, KahanSum};
use crate::geometry::{ConvexDomain, Domain, Shape, Triangle};
use crate::weights::{AffinePiece, Weight};
use crate::{Error, Result, C64};

/// Largest total degree any rule is built for.
pub const MAX_DEGREE: usize = 200;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QuadratureRule {
    pub nodes: Vec<C64>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Points needed per direction for degree-`d` exactness of the collapsed and polar rules.
fn points_for_degree(d: usize) -> usize {
    (d + 3) / 2
}

fn push_triangle(tri: &Triangle, gl: &(Vec<f64>, Vec<f64>), nodes: &mut Vec<C64>, weights: &mut Vec<f64>) {
    let (x, w) = gl;
    let area = tri.area();
    for (xu, wu) in x.iter().zip(w) {
        let u = 0.5 * (xu + 1.0);
        for (xv, wv) in x.iter().zip(w) {
            let v = 0.5 * (xv + 1.0);
            nodes.push(tri.a + ((tri.b - tri.a) + (tri.c - tri.b) * v) * u);
            // Jacobian 2·area·u, GL weights rescaled from [-1,1] to [0,1].
            weights.push(2.0 * area * u * 0.25 * wu * wv);
        }
    }
}

fn triangles_rule(tris: &[Triangle], degree: usize) -> QuadratureRule {
    let gl = gauss_legendre(points_for_degree(degree));
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for t in tris {
        push_triangle(t, &gl, &mut nodes, &mut weights);
    }
    QuadratureRule {
        nodes,
        weights,
        exact_degree: degree,
    }
}

fn polar_rule(center: C64, semi_axes: (f64, f64), rotation: f64, degree: usize) -> QuadratureRule {
    let (x, w) = gauss_legendre(points_for_degree(degree));
    let m = degree + 2;
    let rot = C64::from_polar(1.0, rotation);
    let (a, b) = semi_axes;
    let dtheta = 2.0 * PI / m as f64;
    let mut nodes = Vec::with_capacity(x.len() * m);
    let mut weights = Vec::with_capacity(x.len() * m);
    for (xr, wr) in x.iter().zip(&w) {
        let r = 0.5 * (xr + 1.0);
        for k in 0..m {
            let (s, c) = (k as f64 * dtheta).sin_cos();
            nodes.push(center + rot * C64::new(a * r * c, b * r * s));
            weights.push(a * b * r * 0.5 * wr * dtheta);
        }
    }
    QuadratureRule {
        nodes,
        weights,
        exact_degree: degree,
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            requested: degree,
            cap: MAX_DEGREE,
        });
    }
    Ok(())
}

fn base_triangles(dom: &Domain) -> Vec<Triangle> {
    match dom {
        Domain::Convex(d) => d.triangulate(1),
        Domain::NonConvex(p) => p.triangulate(),
    }
}

/// Rule of total-degree exactness `≥ target_degree` on `dom`.
pub fn rule_for(dom: &Domain, target_degree: usize) -> Result<QuadratureRule> {
    let degree = target_degree.max(1);
    check_degree(degree)?;
    Ok(match dom {
        Domain::Convex(d) => match d.shape() {
            Shape::Disk { center, radius } => polar_rule(*center, (*radius, *radius), 0.0, degree),
            Shape::Ellipse {
                center,
                semi_axes,
                rotation,
            } => polar_rule(*center, *semi_axes, *rotation, degree),
            Shape::Polygon { .. } => triangles_rule(&base_triangles(dom), degree),
        },
        Domain::NonConvex(_) => triangles_rule(&base_triangles(dom), degree),
    })
}

/// Like [`rule_for`], but the region is first cut along the kink lines of a
/// max-affine weight so each cell sees one smooth piece.
///
/// Disk and ellipse cells are fanned into curved triangles from an interior
/// point. Those rules are exact on the straight sides only and converge
/// spectrally along arcs, so `exact_degree` is nominal for them.
pub fn rule_for_weight(dom: &Domain, weight: &Weight, target_degree: usize) -> Result<QuadratureRule> {
    let pieces = match weight {
        Weight::MaxAffine { pieces } if pieces.len() > 1 => pieces,
        _ => return rule_for(dom, target_degree),
    };
    let degree = target_degree.max(1);
    check_degree(degree)?;
    if let Domain::Convex(d) = dom {
        match d.shape() {
            Shape::Disk { center, radius } => {
                return Ok(curved_kink_rule(*center, (*radius, *radius), 0.0, pieces, degree))
            }
            Shape::Ellipse {
                center,
                semi_axes,
                rotation,
            } => return Ok(curved_kink_rule(*center, *semi_axes, *rotation, pieces, degree)),
            Shape::Polygon { .. } => {}
        }
    }
    let mut tris = Vec::new();
    for t in base_triangles(dom) {
        for (k, pk) in pieces.iter().enumerate() {
            let mut cell = vec![t.a, t.b, t.c];
            for (j, pj) in pieces.iter().enumerate() {
                if j == k {
                    continue;
                }
                // pk − pj ≥ 0
                let g = (pk.gradient.0 - pj.gradient.0, pk.gradient.1 - pj.gradient.1);
                let o = pk.offset - pj.offset;
                cell = clip_half_plane(&cell, |z| g.0 * z.re + g.1 * z.im + o);
                if cell.len() < 3 {
                    break;
                }
            }
            fan_cell(&cell, &mut tris);
        }
    }
    Ok(triangles_rule(&tris, degree))
}

/// Affine function `c + p.re·u + p.im·v` of reference-disk coordinates.
#[derive(Clone, Copy)]
struct RefLine {
    c: f64,
    p: C64,
}

impl RefLine {
    fn at(&self, w: C64) -> f64 {
        self.c + self.p.re * w.re + self.p.im * w.im
    }
}

/// Kink-split rule on the ellipse `center + rot·(a u, b v)`, `|u + iv| ≤ 1`.
fn curved_kink_rule(
    center: C64,
    semi_axes: (f64, f64),
    rotation: f64,
    pieces: &[AffinePiece],
    degree: usize,
) -> QuadratureRule {
    let rot = C64::from_polar(1.0, rotation);
    let (a, b) = semi_axes;
    let map = |w: C64| center + rot * C64::new(a * w.re, b * w.im);
    let dot = |g: (f64, f64), d: C64| g.0 * d.re + g.1 * d.im;
    let (eu, ev) = (rot * a, rot * C64::new(0.0, b));
    let gl = gauss_legendre(points_for_degree(degree));
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (k, pk) in pieces.iter().enumerate() {
        let lines: Vec<RefLine> = pieces
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, pj)| {
                let g = (pk.gradient.0 - pj.gradient.0, pk.gradient.1 - pj.gradient.1);
                RefLine {
                    c: dot(g, center) + pk.offset - pj.offset,
                    p: C64::new(dot(g, eu), dot(g, ev)),
                }
            })
            .collect();
        let mut cell = Vec::new();
        for sector in disk_cell_sectors(&lines) {
            push_sector(&sector, &gl, &mut cell, &mut weights);
        }
        nodes.extend(cell.into_iter().map(map));
    }
    let jac = a * b;
    for w in &mut weights {
        *w *= jac;
    }
    QuadratureRule {
        nodes,
        weights,
        exact_degree: degree,
    }
}

/// Boundary piece of a cell, traversed counterclockwise about `apex`.
enum Sector {
    Straight { apex: C64, from: C64, to: C64 },
    Arc { apex: C64, from: f64, sweep: f64 },
}

/// Fan of `{|w| ≤ 1} ∩ {ℓ ≥ 0 for every ℓ}` about an interior point.
fn disk_cell_sectors(lines: &[RefLine]) -> Vec<Sector> {
    let whole = || {
        (0..4)
            .map(|q| Sector::Arc {
                apex: C64::new(0.0, 0.0),
                from: q as f64 * PI / 2.0,
                sweep: PI / 2.0,
            })
            .collect()
    };
    let mut poly = vec![C64::new(-2.0, -2.0), C64::new(2.0, -2.0), C64::new(2.0, 2.0), C64::new(-2.0, 2.0)];
    for l in lines {
        poly = clip_half_plane(&poly, |w| l.at(w));
        if poly.len() < 3 {
            return Vec::new();
        }
    }
    let mut verts: Vec<C64> = Vec::new();
    let add = |v: C64, verts: &mut Vec<C64>| {
        if verts.iter().all(|u| (u - v).norm() > 1e-13) {
            verts.push(v);
        }
    };
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        if p.norm_sqr() <= 1.0 {
            add(p, &mut verts);
        }
        // |p + s d|² = 1 on the open edge.
        let d = q - p;
        let (qa, qb, qc) = (d.norm_sqr(), p.re * d.re + p.im * d.im, p.norm_sqr() - 1.0);
        let disc = qb * qb - qa * qc;
        if qa > 0.0 && disc > 0.0 {
            for s in [(-qb - disc.sqrt()) / qa, (-qb + disc.sqrt()) / qa] {
                if s > 0.0 && s < 1.0 {
                    add(p + d * s, &mut verts);
                }
            }
        }
    }
    let inside_origin = lines.iter().all(|l| l.c >= 0.0);
    if verts.len() < 2 {
        return if inside_origin { whole() } else { Vec::new() };
    }
    let on_line = |l: &RefLine, v: C64| l.at(v).abs() <= 1e-12 * (1.0 + l.p.norm());
    let mean = verts.iter().sum::<C64>() / verts.len() as f64;
    let apex = if verts.len() == 2 {
        // A circular segment: pull the chord midpoint towards the arc.
        let l = lines.iter().find(|l| on_line(l, verts[0]) && on_line(l, verts[1]));
        match l {
            Some(l) => 0.5 * (mean + l.p / l.p.norm()),
            None => return Vec::new(),
        }
    } else {
        mean
    };
    verts.sort_by(|u, v| (u - apex).arg().total_cmp(&(v - apex).arg()));
    let n = verts.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (from, to) = (verts[i], verts[(i + 1) % n]);
        let chord = to - from;
        let left = chord.re * (apex - from).im - chord.im * (apex - from).re > 0.0;
        let straight = left && lines.iter().any(|l| on_line(l, from) && on_line(l, to));
        if straight {
            out.push(Sector::Straight { apex, from, to });
        } else {
            let (t0, t1) = (from.arg(), to.arg());
            let mut sweep = t1 - t0;
            if sweep <= 0.0 {
                sweep += 2.0 * PI;
            }
            out.push(Sector::Arc { apex, from: t0, sweep });
        }
    }
    out
}

/// Curved-triangle rule `apex + u (γ(s) − apex)` on one sector.
fn push_sector(sector: &Sector, gl: &(Vec<f64>, Vec<f64>), nodes: &mut Vec<C64>, weights: &mut Vec<f64>) {
    let (x, w) = gl;
    let (apex, curve): (C64, &dyn Fn(f64) -> (C64, C64)) = match sector {
        Sector::Straight { apex, from, to } => (*apex, &move |s: f64| (*from + (*to - *from) * s, *to - *from)),
        Sector::Arc { apex, from, sweep } => (*apex, &move |s: f64| {
            let g = C64::from_polar(1.0, from + sweep * s);
            (g, g * C64::new(0.0, *sweep))
        }),
    };
    for (xs, ws) in x.iter().zip(w) {
        let s = 0.5 * (xs + 1.0);
        let (g, dg) = curve(s);
        let r = g - apex;
        let cross = r.re * dg.im - r.im * dg.re;
        if cross <= 0.0 {
            continue;
        }
        for (xu, wu) in x.iter().zip(w) {
            let u = 0.5 * (xu + 1.0);
            nodes.push(apex + r * u);
            weights.push(0.25 * ws * wu * u * cross);
        }
    }
}

fn clip_half_plane(poly: &[C64], f: impl Fn(C64) -> f64) -> Vec<C64> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let (fa, fb) = (f(a), f(b));
        if fa >= 0.0 {
            out.push(a);
        }
        if (fa >= 0.0) != (fb >= 0.0) {
            let s = fa / (fa - fb);
            out.push(a + (b - a) * s);
        }
    }
    out
}

fn fan_cell(cell: &[C64], tris: &mut Vec<Triangle>) {
    if cell.len() < 3 {
        return;
    }
    let n = cell.len() as f64;
    let c = cell.iter().sum::<C64>() / n;
    for i in 0..cell.len() {
        let t = Triangle::new(c, cell[i], cell[(i + 1) % cell.len()]);
        if t.area() > 1e-15 {
            tris.push(t);
        }
    }
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        let mut s = KahanSum::default();
        for w in &self.weights {
            s.add(*w);
        }
        s.value()
    }

    /// `Σ w_i f(node_i)` with compensated summation in node order.
    pub fn integrate(&self, f: impl Fn(C64) -> C64) -> Result<C64> {
        let mut re = KahanSum::default();
        let mut im = KahanSum::default();
        for (index, (z, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let v = f(*z);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteIntegrand { index });
            }
            re.add(w * v.re);
            im.add(w * v.im);
        }
        Ok(C64::new(re.value(), im.value()))
    }

    pub fn integrate_real(&self, f: impl Fn(C64) -> f64) -> Result<f64> {
        self.integrate(|z| C64::new(f(z), 0.0)).map(|v| v.re)
    }
}

/// Result of [`refine_until_stable`].
#[derive(Debug, Clone)]
pub struct StableRule {
    pub rule: QuadratureRule,
    /// Largest relative change of any probe integral between the last two degrees.
    pub stability: f64,
    pub degree: usize,
}

fn next_degree(d: usize) -> usize {
    d + (d / 4).max(4)
}

/// Raises the degree until every probe integral changes by at most `rel_tol`
/// between consecutive rules.
///
/// `probes(z, out)` writes the `n_probes` probe values at node `z`. Passing a
/// max-affine `weight` enables kink-aligned splitting.
pub fn refine_until_stable(
    dom: &Domain,
    weight: Option<&Weight>,
    start_degree: usize,
    n_probes: usize,
    probes: impl Fn(C64, &mut [f64]),
    rel_tol: f64,
) -> Result<StableRule> {
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidArgument("rel_tol must be positive".into()));
    }
    let build = |d: usize| match weight {
        Some(w) => rule_for_weight(dom, w, d),
        None => rule_for(dom, d),
    };
    let integrals = |rule: &QuadratureRule| -> Result<Vec<f64>> {
        let mut acc = vec![KahanSum::default(); n_probes];
        let mut buf = vec![0.0; n_probes];
        for (index, (z, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            probes(*z, &mut buf);
            for (a, v) in acc.iter_mut().zip(&buf) {
                if !v.is_finite() {
                    return Err(Error::NonFiniteIntegrand { index });
                }
                a.add(w * v);
            }
        }
        Ok(acc.iter().map(KahanSum::value).collect())
    };

    let mut degree = start_degree.max(1).min(MAX_DEGREE);
    let mut rule = build(degree)?;
    let mut prev = integrals(&rule)?;
    let mut last_delta = f64::INFINITY;
    loop {
        let next = next_degree(degree);
        if next > MAX_DEGREE {
            return Err(Error::QuadratureNotConverged { last_delta, degree });
        }
        let next_rule = build(next)?;
        let cur = integrals(&next_rule)?;
        let delta = prev
            .iter()
            .zip(&cur)
            .map(|(a, b)| {
                let scale = a.abs().max(b.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / scale
                }
            })
            .fold(0.0, f64::max);
        degree = next;
        rule = next_rule;
        prev = cur;
        last_delta = delta;
        if delta <= rel_tol {
            return Ok(StableRule {
                rule,
                stability: delta,
                degree,
            });
        }
    }
}

/// Convenience for convex domains.
pub fn rule_for_convex(dom: &ConvexDomain, target_degree: usize) -> Result<QuadratureRule> {
    rule_for(&Domain::Convex(dom.clone()), target_degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SimplePolygon;
    use crate::weights::AffinePiece;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn unit_disk() -> Domain {
        ConvexDomain::unit_disk().into()
    }

    fn square() -> Domain {
        ConvexDomain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap().into()
    }

    #[test]
    fn gauss_legendre_small_orders() {
        let (x, w) = gauss_legendre(1);
        assert_eq!(x, vec![0.0]);
        assert!((w[0] - 2.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3.0f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!((x[2] - 0.6f64.sqrt()).abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
        for n in [5, 20, 64, 101] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // ∫ x^{2n-2} = 2/(2n-1)
            let k = 2 * n - 2;
            let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
            assert!((v - 2.0 / (k + 1) as f64).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn disk_examples() {
        let rule = rule_for(&unit_disk(), 12).unwrap();
        assert!((rule.integrate_real(|_| 1.0).unwrap() - PI).abs() < 1e-12);
        for j in 0..=6 {
            let v = rule.integrate_real(|z| z.norm_sqr().powi(j)).unwrap();
            assert!((v - PI / (j + 1) as f64).abs() < 1e-12);
        }
        assert!(rule.integrate(|z| z).unwrap().norm() < 1e-12);
        assert!(rule.weights.iter().all(|w| *w > 0.0));
    }

    #[test]
    fn square_separable_moment() {
        let rule = rule_for(&square(), 4).unwrap();
        let v = rule.integrate_real(|z| z.re * z.re * z.im * z.im).unwrap();
        assert!((v - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_radial_moment_on_disk_of_radius_three() {
        let dom: Domain = ConvexDomain::disk(c(0.0, 0.0), 3.0).unwrap().into();
        let rule = rule_for(&dom, 80).unwrap();
        let v = rule.integrate_real(|z| z.norm_sqr() * (-z.norm_sqr()).exp()).unwrap();
        let expected = PI * (1.0 - 10.0 * (-9.0f64).exp());
        assert!((v - expected).abs() < 1e-8);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let rule = rule_for(&unit_disk(), 2).unwrap();
        let err = rule.integrate_real(|z| if z.re > 0.3 { f64::NAN } else { 1.0 });
        assert!(matches!(err, Err(Error::NonFiniteIntegrand { .. })));
    }

    #[test]
    fn degree_cap() {
        assert!(matches!(
            rule_for(&unit_disk(), MAX_DEGREE + 1),
            Err(Error::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn refine_gaussian_probe_on_disk() {
        let s = refine_until_stable(&unit_disk(), None, 4, 1, |z, out| out[0] = (-z.norm_sqr()).exp(), 1e-10)
            .unwrap();
        assert!(s.stability <= 1e-10);
        let v = s.rule.integrate_real(|z| (-z.norm_sqr()).exp()).unwrap();
        assert!((v - PI * (1.0 - (-1.0f64).exp())).abs() < 1e-11);
    }

    #[test]
    fn refine_polynomial_probe_stops_after_one_step() {
        let s = refine_until_stable(&square(), None, 6, 1, |z, out| out[0] = z.re.powi(3) * z.im.powi(3) + z.re.powi(6), 1e-12)
            .unwrap();
        assert_eq!(s.degree, next_degree(6));
        assert!(s.stability < 1e-14);
    }

    #[test]
    fn kink_split_rule_integrates_max_affine_exactly() {
        // max(2x − 1, 0) on the square: ∫ = ∫_{1/2}^{1} (2x−1)·2 dx = 1/2.
        let w = Weight::max_affine(vec![
            AffinePiece { gradient: (2.0, 0.0), offset: -1.0 },
            AffinePiece { gradient: (0.0, 0.0), offset: 0.0 },
        ])
        .unwrap();
        let rule = rule_for_weight(&square(), &w, 2).unwrap();
        assert!((rule.total_weight() - 4.0).abs() < 1e-13);
        let v = rule.integrate_real(|z| w.eval(z)).unwrap();
        assert!((v - 0.5).abs() < 1e-13);
        // Without splitting the same degree is visibly inexact.
        let plain = rule_for(&square(), 2).unwrap();
        assert!((plain.integrate_real(|z| w.eval(z)).unwrap() - 0.5).abs() > 1e-6);
    }

    #[test]
    fn curved_kink_split_converges() {
        let piece = |gx, gy, offset| AffinePiece { gradient: (gx, gy), offset };
        // Circular segment: ∫_{x>1/2} (x − 1/2) over the unit disk.
        let w = Weight::max_affine(vec![piece(1.0, 0.0, -0.5), piece(0.0, 0.0, 0.0)]).unwrap();
        let exact = (2.0 / 3.0) * 0.75f64.powf(1.5) - (PI / 6.0 - 3f64.sqrt() / 8.0);
        let rule = rule_for_weight(&unit_disk(), &w, 30).unwrap();
        assert!((rule.total_weight() - PI).abs() < 1e-12);
        assert!((rule.integrate_real(|z| w.eval(z)).unwrap() - exact).abs() < 1e-12);
        // |x| on the ellipse with semi-axes (2, 1): 16/3; three cells meeting inside.
        let ell: Domain = ConvexDomain::ellipse(c(0.0, 0.0), (2.0, 1.0), 0.0).unwrap().into();
        let abs_x = Weight::max_affine(vec![piece(1.0, 0.0, 0.0), piece(-1.0, 0.0, 0.0)]).unwrap();
        let rule = rule_for_weight(&ell, &abs_x, 30).unwrap();
        assert!((rule.total_weight() - 2.0 * PI).abs() < 1e-12);
        assert!((rule.integrate_real(|z| abs_x.eval(z)).unwrap() - 16.0 / 3.0).abs() < 1e-12);
        let three = Weight::max_affine(vec![piece(0.0, 0.0, 0.0), piece(1.0, 0.5, -0.3), piece(-0.7, 0.2, -0.2)]).unwrap();
        let rule = rule_for_weight(&ell, &three, 30).unwrap();
        assert!((rule.total_weight() - 2.0 * PI).abs() < 1e-12);
        assert!(rule.weights.iter().all(|w| *w > 0.0));
        let fine = rule_for_weight(&ell, &three, 60).unwrap();
        let f = |z: C64| (-three.eval(z)).exp() * (1.0 + z.re * z.im);
        let (a, b) = (rule.integrate_real(f).unwrap(), fine.integrate_real(f).unwrap());
        assert!((a - b).abs() < 1e-12 * b.abs(), "{a} vs {b}");
    }

    #[test]
    fn l_shape_rule_area() {
        let l: Domain = SimplePolygon::l_shape().into();
        let rule = rule_for(&l, 10).unwrap();
        assert!((rule.total_weight() - 3.0).abs() < 1e-13);
        // ∫ x over L = -1/2 (centroid x = -1/6, area 3)
        assert!((rule.integrate_real(|z| z.re).unwrap() + 0.5).abs() < 1e-13);
    }
}
