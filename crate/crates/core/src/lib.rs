//! Reproducing-kernel tools for composition operators on the Hardy space
//! of the bidisk.
//!
//! - [`bipoly`] and [`trig`]: exact-structure polynomial arithmetic on the
//!   bidisk and the torus, backward shifts and coordinate projections.
//! - [`kernel`]: kernel expressions (Szegő, de Branges–Rovnyak type, the
//!   `R` kernel of a self-map), Gram matrices, positivity screens and the
//!   membership / multiplier / dominance pencils.
//! - [`ops`]: truncated Toeplitz, Hankel and composition matrices, norm
//!   sequences and the origin-based norm bound.
//! - [`subhardy`]: Pythagorean mates, the three `M(ā)` decompositions and
//!   multiplier constants for sub-Hardy spaces.

pub mod bipoly;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod ops;
pub mod sampling;
pub mod subhardy;
pub mod trig;

pub use bipoly::{BiPoly, Point2, Var};
pub use error::{Error, Result};
pub use kernel::{
    dominance_delta, gram, kernel_eval, membership_norm, multiplier_norm_lb, negativity_search,
    positivity_test, psd_check, Certificate, HermMatrix, KernelExpr, PointSet, PositivityReport,
    PsdStatus, PsdVerdict, ScreenVerdict, SearchOptions,
};
pub use num_complex::Complex64;
pub use trig::TrigPoly;
