use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::ScalarOperand;
use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating point scalar used by the numeric routines: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + NumAssign + ScalarOperand + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossless-enough conversion from `f64` constants.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}
