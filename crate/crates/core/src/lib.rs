//! Poincaré–Hopf indices of vector fields on compact domains with boundary
//! and on closed hypersurfaces in ℝⁿ, n ≤ 3.
//!
//! Interior zeros contribute the Brouwer degree of the normalized field on a
//! small sphere. Zeros of the tangential component on the boundary
//! contribute ±½ of their tangential index, `+` where the field points
//! inwards and `−` where it points outwards. The total equals χ(M) in even
//! dimension and 0 in odd dimension; the [`verify`] module checks this and
//! its corollaries numerically, against independent Euler-characteristic and
//! degree oracles.

pub mod complexfield;
pub mod degree;
pub mod error;
pub mod euler;
pub mod expr;
pub mod field;
pub mod half;
pub mod index;
pub mod linalg;
pub mod manifold;
pub mod par;
pub mod plot;
pub mod random;
pub mod report;
pub mod scene;
pub mod verify;
pub mod zerofind;

pub use error::{Error, Result};
pub use half::HalfInteger;
