mod common;

use bergman_core::families::{kernel_sweep, verify_slice_identity, FiberedFamily};
use bergman_core::geometry::ConvexDomain;
use bergman_core::kernel::{BuildOptions, KernelApprox};
use bergman_core::weights::Weight;
use bergman_core::C64;
use common::c;
use proptest::prelude::*;

fn square() -> ConvexDomain {
    ConvexDomain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sweep_positive_and_symmetric(x in 0.1f64..0.6, y in -0.5f64..0.5) {
        let z0 = c(x, y);
        let fam = FiberedFamily::oka(square(), Weight::x_squared(), z0, -z0).unwrap();
        let ts: Vec<C64> = (0..=6).map(|k| c(k as f64 / 6.0, 0.0)).collect();
        let sweep = kernel_sweep(&fam, &ts, 24, BuildOptions::default());
        for k in 0..=6 {
            let (a, b) = (sweep[k].k.unwrap(), sweep[6 - k].k.unwrap());
            prop_assert!(a > 0.0);
            prop_assert!((a - b).abs() <= 1e-8 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn slice_identity_within_stability(x in -0.5f64..0.5, y in -0.5f64..0.5, t in 0.0f64..1.0) {
        let fam = FiberedFamily::oka(square(), Weight::modulus_squared(1.0, c(0.0, 0.0)).unwrap(), c(x, y), c(-0.3, 0.4)).unwrap();
        let id = verify_slice_identity(&fam, c(t, 0.0), 24, BuildOptions::default()).unwrap();
        prop_assert!(id.rel_error <= (3.0 * id.stability).max(1e-9), "{id:?}");
    }

    #[test]
    fn midpoint_inequality(x0 in -0.6f64..0.6, y0 in -0.6f64..0.6, x1 in -0.6f64..0.6, y1 in -0.6f64..0.6) {
        let k = KernelApprox::build_with(square(), &Weight::x_squared(), 30, BuildOptions::default()).unwrap();
        let (z0, z1) = (c(x0, y0), c(x1, y1));
        let l = |z: C64| k.eval_k(z).unwrap().ln();
        let mid = l((z0 + z1) / 2.0);
        prop_assert!(mid <= (l(z0) + l(z1)) / 2.0 + 1e-7 * (1.0 + mid.abs()));
    }
}
