//! Scalar abstraction used throughout the crate.
//!
//! All numerical code is generic over [`Real`], which is satisfied by `f32`
//! and `f64`. Concrete aliases for the `f64` instantiations of the main
//! types live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + Sum<Self> + Debug + Display + Send + Sync + 'static
{
    /// Conversion from an `f64` constant or parameter.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 constant representable in scalar type")
    }

    /// Conversion to `f64` for reporting and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

impl<T> Real for T where
    T: num_traits::Float
        + num_traits::FromPrimitive
        + Sum<T>
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Squared Euclidean distance between two points of equal dimension.
pub fn dist_sq<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&ai, &bi)| {
            let d = ai - bi;
            d * d
        })
        .sum()
}

/// Euclidean distance between two points of equal dimension.
pub fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    dist_sq(a, b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_basics() {
        let a = [0.0f64, 0.0];
        let b = [3.0, 4.0];
        assert_eq!(dist_sq(&a, &b), 25.0);
        assert_eq!(dist(&a, &b), 5.0);
    }

    #[test]
    fn generic_over_f32() {
        let a = [0.0f32, 1.0];
        let b = [0.0f32, 3.0];
        assert_eq!(dist(&a, &b), 2.0f32);
        assert_eq!(<f32 as Real>::of(0.5), 0.5f32);
    }
}
