//! Weighted Bergman kernels on bounded convex planar domains.
//!
//! The crate builds finite-rank approximations of the weighted Bergman kernel
//! `K_{Ω,φ}` from centred and scaled monomials orthonormalised against a
//! positive quadrature rule, and carries the numerical machinery used to probe
//! convexity and subharmonicity of the resulting functions:
//!
//! * [`geometry`]: disks, ellipses, convex polygons and non-convex control polygons.
//! * [`weights`]: convex (and control) weight functions with exact complex Hessians.
//! * [`quadrature`]: positive rules with a known degree of exactness.
//! * [`kernel`]: kernel construction, evaluation and closed-form oracles.
//! * [`convexity`]: second-difference scans, Laplacian stencils, slice maps
//!   `t = s + λ²s̄` and mollification.
//! * [`families`]: fibred domains whose slices carry their own kernels.
//! * [`classical`]: the hyperbolic density of the disk and the convex-univalence
//!   criterion for Taylor maps.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod classical;
pub mod convexity;
mod error;
pub mod families;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod quadrature;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Floating point helpers usable without `std`.
pub(crate) mod float {
    #[allow(unused_imports)]
    pub(crate) use num_traits::Float;

    /// Neumaier-compensated accumulator.
    #[derive(Debug, Clone, Copy, Default)]
    pub(crate) struct KahanSum {
        sum: f64,
        comp: f64,
    }

    impl KahanSum {
        pub(crate) fn add(&mut self, x: f64) {
            let t = self.sum + x;
            if num_traits::Float::abs(self.sum) >= num_traits::Float::abs(x) {
                self.comp += (self.sum - t) + x;
            } else {
                self.comp += (x - t) + self.sum;
            }
            self.sum = t;
        }

        pub(crate) fn value(&self) -> f64 {
            self.sum + self.comp
        }
    }
}
