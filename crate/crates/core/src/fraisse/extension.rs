use crate::alt_system::{search_embedding_with, AltSystem};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fp_linalg::FVector;

use super::catalog::Catalog;
use super::generic::base_embeddings;

/// An embedded copy of `B` with no extension to `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionFailure {
    pub pair: usize,
    pub base: Vec<FVector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionReport {
    pub t: usize,
    pub pairs_checked: usize,
    pub embeddings_checked: u64,
    /// False when some pair was checked on a sample only.
    pub complete: bool,
    /// Ordered by pair id, then by enumeration order of the base.
    pub failures: Vec<ExtensionFailure>,
}

impl ExtensionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Budget above which bases are sampled rather than enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckBudget {
    pub embeddings: u64,
    /// Seeded samples per pair once `embeddings` overflows.
    pub samples: u64,
    pub seed: u64,
}

impl Default for CheckBudget {
    fn default() -> Self {
        CheckBudget {
            embeddings: 1_000_000,
            samples: super::generic::DEFAULT_SAMPLED_BASES,
            seed: 0,
        }
    }
}

pub fn check_extension_property(
    d: &AltSystem,
    t: usize,
    catalog: &Catalog,
) -> Result<ExtensionReport> {
    check_extension_property_with(Exec::default(), d, t, catalog, CheckBudget::default())
}

/// Σ3 at bound `t`: every embedding of `B` into `d` extends to `A`, for
/// every catalog pair with `dimV_A ≤ t`.
pub fn check_extension_property_with(
    exec: Exec,
    d: &AltSystem,
    t: usize,
    catalog: &Catalog,
    budget: CheckBudget,
) -> Result<ExtensionReport> {
    if catalog.dmax < t {
        return Err(Error::InvalidArgument(format!(
            "catalog covers dimV <= {} but t = {t}",
            catalog.dmax
        )));
    }
    if catalog.p != d.prime() || catalog.n != d.n() {
        return Err(crate::error::dim_mismatch(
            "catalog and system over different P",
        ));
    }
    let mut report = ExtensionReport {
        t,
        pairs_checked: 0,
        embeddings_checked: 0,
        complete: true,
        failures: Vec::new(),
    };
    for (pid, pair) in catalog.pairs_up_to(t) {
        let b = &catalog.classes[pair.b];
        let (bases, full) = base_embeddings(
            b,
            d,
            budget.embeddings,
            budget.samples,
            budget.seed,
            pid as u64,
        )?;
        report.complete &= full;
        report.pairs_checked += 1;
        report.embeddings_checked += bases.len() as u64;
        let extends = exec.map(&bases, |base| {
            let partial: Vec<(usize, FVector)> = base.iter().cloned().enumerate().collect();
            search_embedding_with(Exec::Sequential, &pair.a_rebased, d, &partial)
                .map(|e| e.is_some())
        });
        for (base, ok) in bases.into_iter().zip(extends) {
            if !ok? {
                report.failures.push(ExtensionFailure { pair: pid, base });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp_linalg::Prime;
    use crate::fraisse::enumerate_catalog;

    #[test]
    fn trivial_is_vacuous_at_zero() {
        let cat = enumerate_catalog(3, 1, 0).unwrap();
        let d = AltSystem::trivial(Prime::new(3).unwrap(), 1).unwrap();
        let rep = check_extension_property(&d, 0, &cat).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.pairs_checked, 0);
    }

    #[test]
    fn single_plane_fails() {
        let cat = enumerate_catalog(3, 1, 2).unwrap();
        let p = Prime::new(3).unwrap();
        let d = AltSystem::plane(p, &FVector::from_ints(p, &[1])).unwrap();
        let rep = check_extension_property(&d, 2, &cat).unwrap();
        assert!(!rep.passed());
        assert!(rep.complete);
    }

    #[test]
    fn orthogonal_planes_pass() {
        let cat = enumerate_catalog(3, 1, 2).unwrap();
        let p = Prime::new(3).unwrap();
        let plane = AltSystem::plane(p, &FVector::from_ints(p, &[1])).unwrap();
        let mut d = plane.clone();
        for _ in 0..3 {
            d = d.orthogonal_sum(&plane).unwrap();
        }
        let seq =
            check_extension_property_with(Exec::Sequential, &d, 2, &cat, CheckBudget::default())
                .unwrap();
        let par =
            check_extension_property_with(Exec::Parallel, &d, 2, &cat, CheckBudget::default())
                .unwrap();
        assert!(seq.passed());
        assert_eq!(seq, par);
    }

    #[test]
    fn catalog_must_cover_t() {
        let cat = enumerate_catalog(3, 1, 1).unwrap();
        let d = AltSystem::zero(Prime::new(3).unwrap(), 1, 2).unwrap();
        assert!(check_extension_property(&d, 2, &cat).is_err());
    }
}
