//! Exact computations in finite presheaf toposes: finite categories and
//! tabulated presheaves, finite (co)limits, exponentials and the subobject
//! classifier, uniform lifting structures, canonical universes for
//! definability checks, tininess certificates via right Kan extensions, and
//! curated counterexample scenarios.
//!
//! All values are immutable after construction and every operation is a pure
//! function of its inputs; enumerations return canonically ordered lists so
//! results are reproducible across runs.

pub mod error;
pub mod fincat;
pub mod presheaf;
pub mod guard;

pub use error::{Error, Result};
pub use guard::{GuardKind, SizeGuards};
