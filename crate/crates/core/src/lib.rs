//! Exact computation in groups of piecewise-linear homeomorphisms of the
//! line built from labellings of the half-integers.

pub mod atoms;
pub mod dyadic;
pub mod error;
pub mod grho;
pub mod labelling;
pub mod markedspace;
pub mod plmap;
pub mod sample;
pub mod thompson;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use plmap::{Interval, PLMap};
