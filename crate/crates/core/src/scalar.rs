use nalgebra::RealField;
use num_traits::FromPrimitive;

/// Scalar type the whole crate is generic over.
///
/// `RealField` supplies every analytic operation we need (powf, sqrt, abs,
/// min/max, pi); `FromPrimitive` lets tolerances and literals written as f64
/// flow into the generic code. Implemented for `f32` and `f64`.
pub trait Real: Copy + RealField + FromPrimitive {
    /// Converts an f64 constant into the scalar type.
    ///
    /// Panics on NaN, which never arises from the finite literals this is
    /// used with.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// Lossy view of the scalar as f64, for reporting only.
    fn to_f64_lossy(self) -> f64;
}

impl Real for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Real for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}
