//! Sharp Young convolution inequality and its reverse.
//!
//! The crate evaluates the sharp constants, both sides of the rotated
//! two-variable form of the inequality, the monotone transport maps behind
//! it, and the Gaussian extremizers, on uniform grids with trapezoid
//! quadrature.
//!
//! ```
//! use young_core::{constants, exponents::make_triple};
//!
//! let t = make_triple(4.0 / 3.0, 4.0 / 3.0).unwrap();
//! assert!((t.r() - 2.0).abs() < 1e-12);
//! let c = constants::young_constant(&t, 1).unwrap();
//! assert!(c < 1.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod convolution;
pub mod error;
pub mod exponents;
pub mod extremizer;
pub mod format;
pub mod function;
pub mod inequality;
pub mod quadrature;
pub mod transport;

pub use constants::{c_t, k_constant, young_constant, SharpConstants};
pub use convolution::{convolve_direct, convolve_fast, convolve_gaussian, young_ratio, ConvolutionResult};
pub use error::{Error, Result};
pub use exponents::{conjugate, dual_triple, make_triple, rotation_params, Regime, RotationPair, YoungTriple};
pub use extremizer::{
    bl_functional, convolve_tuple, fit_gaussian, stationarity_scan, supermodularity_check, BLInstance, GaussianFit,
    Perturbation, ScanConfig, ScanPoint,
};
pub use function::{random_density, sample_gaussian, GaussianFn, Grid, GridFunction};
pub use inequality::{
    bilinear_form, dual_witness, gaussian_closed_form, mass_matched_gaussian, transport_bound, verify_sharp_form,
    verify_transport_bound, CheckConfig, Status, VerificationReport,
};
pub use quadrature::Window2d;
pub use transport::{monotone_map, RotatedTransport, TransportMap};
