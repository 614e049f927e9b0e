mod common;

use bergman_core::geometry::{ConvexDomain, Domain, Region, Shape};
use bergman_core::quadrature::rule_for;
use bergman_core::C64;
use common::{c, convex_domain, convex_polygon, point};
use proptest::prelude::*;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients in `u` of `(p + u q)^n`.
fn linear_power(p: f64, q: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| binomial(n, k) * p.powi((n - k) as i32) * q.powi(k as i32)).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `∫∫ x^a y^b` over a counterclockwise polygon by Green's theorem:
/// `∮ x^{a+1} y^b / (a+1) dy`, each edge expanded exactly in its parameter.
fn polygon_moment(vertices: &[C64], a: usize, b: usize) -> f64 {
    let n = vertices.len();
    let mut total = 0.0;
    for i in 0..n {
        let (p, q) = (vertices[i], vertices[(i + 1) % n]);
        let d = q - p;
        let poly = poly_mul(&linear_power(p.re, d.re, a + 1), &linear_power(p.im, d.im, b));
        let edge: f64 = poly.iter().enumerate().map(|(k, v)| v / (k + 1) as f64).sum();
        total += edge * d.im / (a + 1) as f64;
    }
    total
}

/// `∫₀^{2π} cos^i θ sin^j θ dθ` by the reduction recurrences.
fn trig_moment(i: usize, j: usize) -> f64 {
    if i % 2 == 1 || j % 2 == 1 {
        0.0
    } else if i >= 2 {
        (i - 1) as f64 / (i + j) as f64 * trig_moment(i - 2, j)
    } else if j >= 2 {
        (j - 1) as f64 / j as f64 * trig_moment(0, j - 2)
    } else {
        2.0 * std::f64::consts::PI
    }
}

fn disk_moment(center: C64, radius: f64, a: usize, b: usize) -> f64 {
    let mut total = 0.0;
    for i in 0..=a {
        for j in 0..=b {
            let radial = radius.powi((i + j + 2) as i32) / (i + j + 2) as f64;
            total += binomial(a, i)
                * binomial(b, j)
                * center.re.powi((a - i) as i32)
                * center.im.powi((b - j) as i32)
                * radial
                * trig_moment(i, j);
        }
    }
    total
}

fn monomial(z: C64, a: usize, b: usize) -> f64 {
    z.re.powi(a as i32) * z.im.powi(b as i32)
}

/// Scale for relative comparison: the integral of `|x|^a |y|^b` bounded via the bounding box.
fn moment_scale(dom: &ConvexDomain, a: usize, b: usize) -> f64 {
    let (lo, hi) = dom.bounding_box();
    let mx = lo.re.abs().max(hi.re.abs());
    let my = lo.im.abs().max(hi.im.abs());
    dom.area() * mx.powi(a as i32) * my.powi(b as i32)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polygon_rules_integrate_monomials_exactly(dom in convex_polygon(), degree in 0usize..14) {
        let Shape::Polygon { vertices } = dom.shape() else { unreachable!() };
        let rule = rule_for(&Domain::from(dom.clone()), degree).unwrap();
        prop_assert!(rule.exact_degree >= degree);
        prop_assert!(rule.weights.iter().all(|w| *w > 0.0));
        prop_assert!((rule.total_weight() - dom.area()).abs() <= 1e-12 * dom.area());
        for a in 0..=degree {
            for b in 0..=degree - a {
                let got = rule.integrate_real(|z| monomial(z, a, b)).unwrap();
                let want = polygon_moment(vertices, a, b);
                prop_assert!((got - want).abs() <= 1e-11 * moment_scale(&dom, a, b).max(want.abs()),
                    "x^{a} y^{b}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn disk_rules_integrate_monomials_exactly(center in point(1.5), radius in 0.2f64..2.5, degree in 0usize..14) {
        let dom = ConvexDomain::disk(center, radius).unwrap();
        let rule = rule_for(&Domain::from(dom.clone()), degree).unwrap();
        prop_assert!(rule.weights.iter().all(|w| *w > 0.0));
        for a in 0..=degree {
            for b in 0..=degree - a {
                let got = rule.integrate_real(|z| monomial(z, a, b)).unwrap();
                let want = disk_moment(center, radius, a, b);
                prop_assert!((got - want).abs() <= 1e-11 * moment_scale(&dom, a, b).max(want.abs()),
                    "x^{a} y^{b}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn affine_covariance(dom in convex_domain(), scale in point(2.0), shift in point(2.0), degree in 1usize..10) {
        prop_assume!(scale.norm() > 0.2);
        let img = dom.affine_image(scale, shift).unwrap();
        let base = rule_for(&Domain::from(dom), degree).unwrap();
        let mapped = rule_for(&Domain::from(img), degree).unwrap();
        let f = |z: C64| (z * z.conj() + c(1.0, 0.5) * z).powu((degree / 2) as u32);
        let lhs = mapped.integrate(f).unwrap();
        let rhs = base.integrate(|z| f(scale * z + shift)).unwrap() * scale.norm_sqr();
        let size = mapped.integrate_real(|z| f(z).norm()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * size.max(1.0), "{lhs} vs {rhs}");
    }
}

#[test]
fn oracles_agree_on_known_values() {
    let sq = ConvexDomain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
    let Shape::Polygon { vertices } = sq.shape() else { unreachable!() };
    assert!((polygon_moment(vertices, 0, 0) - 4.0).abs() < 1e-15);
    assert!((polygon_moment(vertices, 2, 2) - 4.0 / 9.0).abs() < 1e-15);
    assert!((disk_moment(c(0.0, 0.0), 1.0, 2, 0) - std::f64::consts::PI / 4.0).abs() < 1e-15);
    assert!((disk_moment(c(1.0, 0.0), 1.0, 1, 0) - std::f64::consts::PI).abs() < 1e-14);
}
