//! Double-form calculus on Euclidean space and the Weitzenböck curvature
//! operators built from it.
//!
//! The crate provides
//! - the combinatorics of the standard basis of `ΛV` ([`exterior`]),
//! - double forms with the Kulkarni–Nomizu product, contraction, Hodge star
//!   and first Bianchi identity ([`double_form`]),
//! - the Clifford algebra of `V` and its `ad` operators ([`clifford`]),
//! - the Weitzenböck operators `N_p`, by their Clifford definition and by the
//!   closed formula, with the identities relating them ([`weitzenboeck`]),
//! - random generators, tensor files and a verification harness
//!   ([`toolkit`]).

pub mod clifford;
pub mod double_form;
pub mod error;
pub mod exterior;
pub mod linalg;
pub mod toolkit;
pub mod weitzenboeck;

pub use clifford::CliffordElement;
pub use double_form::{CurvatureTensor, DoubleForm};
pub use error::{Error, Result};
pub use exterior::{AlgebraContext, MultiIndex};
