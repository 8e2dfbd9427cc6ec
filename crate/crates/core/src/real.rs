//! The floating-point scalar used by spectra, eta formulas and bound
//! calculators.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;
use serde::Serialize;

pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Serialize + Debug + Display + Send + Sync + 'static
{
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("finite conversion")
    }

    fn of_u64(value: u64) -> Self {
        Self::from_u64(value).expect("finite conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}
