//! Finite 2-nilpotent groups of exponent `p > 2` with distinguished central
//! generators `c_1..c_n`, studied through their alternating bilinear
//! systems `(V, P, β)`.
//!
//! * [`fp_linalg`]: exact linear algebra over `F_p`.
//! * [`alt_system`]: alternating systems, embeddings, embedding search,
//!   amalgamation, relatively free exterior-square systems.
//! * [`baer_group`]: the group realised by a system, classifiers, lifts.
//! * [`fraisse`]: catalogues of small systems, finite approximations of the
//!   Fraïssé limit, the extension-property checker and quantifier-free type
//!   codes.
//! * [`model_theory`]: the independence relation, its axiom suite and
//!   constructions, independence-property and TP₂ witnesses, extraction of
//!   extraspecial chains.
//! * [`format`]: the line-oriented `ALT v1` text format.

pub mod alt_system;
pub mod baer_group;
pub mod error;
pub mod exec;
pub mod format;
pub mod fp_linalg;
pub mod fraisse;
pub mod model_theory;

pub use error::{Error, Result};
pub use exec::Exec;
