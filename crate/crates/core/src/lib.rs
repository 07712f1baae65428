//! Strapdown inertial navigation with trident quaternions.
//!
//! Attitude, velocity and position are carried together as one unit
//! trident quaternion and integrated window by window with a Chebyshev
//! Picard solver ([`tqfilter`]). A classical two-sample algorithm
//! ([`baseline`]), an analytic coning scenario ([`trajectory`]) and a run
//! harness ([`harness`]) complete the toolkit.

// `!(x > 0.0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod baseline;
pub mod chebyshev;
pub mod earth;
pub mod error;
pub mod harness;
pub mod kinematics;
pub mod tqfilter;
pub mod trajectory;

pub use error::{Error, Result};
