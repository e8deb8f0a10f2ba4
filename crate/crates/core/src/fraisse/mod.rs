//! Finite approximations of the Fraïssé limit of `K(n)`.
//!
//! The catalog lists small members of the class up to isomorphism together
//! with their substructure pairs. Generic stages are grown from the trivial
//! system by amalgamating catalog members over every embedded copy of
//! their substructures, and the extension property Σ3 is checked up to a
//! dimension bound `t`.

mod catalog;
mod extension;
mod generic;
mod types;

pub use catalog::{
    enumerate_catalog, enumerate_catalog_with, table_count, Catalog, CatalogPair,
    DEFAULT_TABLE_BUDGET, MAX_CATALOG_DIM,
};
pub use extension::{
    check_extension_property, check_extension_property_with, CheckBudget, ExtensionFailure,
    ExtensionReport,
};
pub use generic::{
    build_from_catalog, build_generic, build_generic_with, AmalgamationStep, BuildOptions, Filler,
    GenericApprox, DEFAULT_EMBEDDING_BUDGET, DEFAULT_SAMPLED_BASES, DEFAULT_STAGE_CAP,
};
pub use types::{partial_iso_from_types, qf_type_code, PartialIso, TypeCode};
