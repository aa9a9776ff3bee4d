//! Generalized tight p-frames and spectral bounds for linearly transformed
//! symmetric domains.
//!
//! The crate is organised bottom-up:
//!
//! * [`symfunc`]: exact partitions and symmetric functions in the power-sum
//!   basis, the cycle index of the symmetric group, and χ²-moments.
//! * [`linalg`]: dense real matrices, a cyclic Jacobi eigensolver and
//!   Schatten norms (spectral and trace-power routes).
//! * [`groups`]: finite orthogonal groups from generators, Molien series and
//!   the maximal admissible frame order.
//! * [`frames`]: the frame constant `F_p(s²(T))` by exact, quadrature,
//!   Monte-Carlo and orbit-averaging routes.
//! * [`moments`]: polar moments of mass for ellipsoids, balls and polygons.
//! * [`bounds`]: eigenvalue upper bounds for plate, buckling, fractional and
//!   subordinated operators on transformed domains.

pub mod bounds;
pub mod error;
pub mod frames;
pub mod groups;
pub mod linalg;
pub mod moments;
pub mod numeric;
pub mod special;
pub mod symfunc;

pub use error::{Error, Result};
pub use frames::{FrameConstant, FrameMethod, FrameVerification, Verdict};
pub use groups::{FiniteGroup, GroupKind, MolienSeries};
pub use linalg::{Matrix, SchattenMethod, SchattenProfile};
pub use moments::{MomentReport, Shape};
pub use symfunc::{Partition, SymFuncExpansion};
