//! Independence, the Kim–Pillay laws, and the witnesses for IP and TP₂.
//!
//! Substructures of a group in `K(n)` are `P` together with a subspace of
//! `V`, so independence is decided by linear algebra on `V`. Constructions
//! that need new elements grow the system and return the inclusion of the
//! old one.

mod constructions;
mod d1_chain;
mod indep;
mod ip;
mod kp_suite;
mod tp2;

pub use constructions::{
    existence_extend, independence_amalgam, pad_elements, relocate, Extension,
};
pub use d1_chain::{
    centralizer_data, extract_d1_chain, projective_points, CentralizerData, D1Chain,
};
pub use indep::{
    indep0, indep0_raw, local_base, su_rank_exhaustive, su_rank_law_holds, IndepQuery,
    SuDiscrepancy, SuReport,
};
pub use ip::{central_product_of_planes, ip_witness, subset_from_mask, IpWitness};
pub use kp_suite::{
    kp_random_suite, kp_random_suite_with, IndepFn, KpLaw, KpReport, KpViolation, LawCount,
};
pub use tp2::{
    all_paths, path_extension, tp2_build_and_check, tp2_build_and_check_with, Tp2Array, Tp2Report,
    MAX_TP2_PATHS, MAX_TP2_RANK,
};
