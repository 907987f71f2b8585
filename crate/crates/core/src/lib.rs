//! Adaptive spectral computation with smooth functions on the unit ball.
//!
//! Functions are doubled onto `[-1, 1] × [-π, π] × [-π, π]` and stored as
//! Chebyshev (radial) × Fourier (azimuthal) × Fourier (polar) coefficient
//! tensors. The numerical core is generic over the working precision through
//! [`Real`]; `f64` aliases are exported for everyday use.

mod ball;
mod calculus;
pub mod chop;
pub mod coeffops;
mod error;
pub mod grid;
pub mod helmholtz;
pub mod linalg;
mod real;
mod rotate;
mod tensor;
mod transform;
pub mod demos;
pub mod io;
pub mod vector;

pub use ball::{cart_to_sph, is_bmc, sph_to_cart, BallScalar, ConstructOptions, Coords};
pub use calculus::{sum2_boundary, Axis, BoundaryTrace};
pub use chop::{resolution_report, trim, ResolutionReport};
pub use error::{BallError, Result};
pub use grid::{double_samples, make_grid, GridValues, HalfSamples, SampleGrid};
pub use helmholtz::{helmholtz_solve, BcKind, BoundaryData};
pub use real::{Real, C};
pub use rotate::{nonuniform_eval, EulerAngles};
pub use tensor::CffTensor;
pub use transform::{coeffs2vals, vals2coeffs};
pub use vector::{helmholtz_hodge, pt_decompose, pt_to_vector, BallVector, HodgeDecomposition, PtScalars, SphericalComponents};

/// Double-precision ball function.
pub type Ball = BallScalar<f64>;
/// Single-precision ball function.
pub type Ball32 = BallScalar<f32>;
/// Double-precision vector field.
pub type BallV = BallVector<f64>;
/// Double-precision coefficient tensor.
pub type Tensor = CffTensor<f64>;
