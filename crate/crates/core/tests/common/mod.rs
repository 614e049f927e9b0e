#![allow(dead_code)]

use std::f64::consts::PI;

use bergman_core::geometry::ConvexDomain;
use bergman_core::C64;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn point(range: f64) -> impl Strategy<Value = C64> {
    (-range..range, -range..range).prop_map(|(x, y)| c(x, y))
}

/// Polygon with vertices on an ellipse at sorted, well-separated angles.
pub fn convex_polygon() -> impl Strategy<Value = ConvexDomain> {
    (
        prop::collection::vec(0.2f64..1.0, 3..9),
        0.3f64..2.0,
        0.3f64..2.0,
        point(2.0),
        0.0..PI,
    )
        .prop_map(|(gaps, a, b, center, rot)| {
            let total: f64 = gaps.iter().sum();
            let mut theta: f64 = 0.0;
            let vertices = gaps
                .iter()
                .map(|g| {
                    let v = C64::new(a * theta.cos(), b * theta.sin()) * C64::from_polar(1.0, rot) + center;
                    theta += 2.0 * PI * g / total;
                    v
                })
                .collect();
            ConvexDomain::polygon(vertices).unwrap()
        })
}

pub fn convex_domain() -> impl Strategy<Value = ConvexDomain> {
    prop_oneof![
        (point(2.0), 0.2f64..3.0).prop_map(|(z, r)| ConvexDomain::disk(z, r).unwrap()),
        (point(2.0), 0.2f64..3.0, 0.2f64..3.0, 0.0..PI)
            .prop_map(|(z, a, b, t)| ConvexDomain::ellipse(z, (a, b), t).unwrap()),
        (point(2.0), 0.2f64..3.0, 3usize..10, 0.0..PI)
            .prop_map(|(z, r, n, p)| ConvexDomain::regular_polygon(z, r, n, p).unwrap()),
        convex_polygon(),
    ]
}
