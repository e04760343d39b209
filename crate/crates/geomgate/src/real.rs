use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Scalar type the whole toolkit is generic over.
///
/// Everything numerical (matrices, integrators, path synthesis) works for any
/// `Real`; `f64` is the instantiation used by the CLI and the test suites,
/// `f32` compiles but cannot reach the tight tolerances quoted in the docs.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for embedding an `f64` constant (tolerances, literature values)
/// into the working scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must be representable in the scalar type")
}
