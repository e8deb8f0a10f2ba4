use std::collections::BTreeMap;

use crate::alt_system::{
    is_isomorphic, search_embedding_with, search_with_domains, AltSystem, Embedding,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fp_linalg::{
    all_subspaces, extend_to_complement, pow_count, vector_from_index, FVector, Prime,
};

/// Largest `dimV` the catalog will enumerate.
pub const MAX_CATALOG_DIM: usize = 4;

/// Default cap on the number of Gram tables examined per catalog.
pub const DEFAULT_TABLE_BUDGET: u64 = 100_000;

/// A substructure pair `B ⊆ A` up to isomorphism of pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogPair {
    pub b: usize,
    pub a: usize,
    /// Canonical embedding of the `B` representative into the `A`
    /// representative.
    pub embedding: Embedding,
    /// `A` rewritten in a basis whose first `dimV_B` vectors are the images
    /// of `B`, so the prefix of length `dimV_B` equals the `B`
    /// representative.
    pub a_rebased: AltSystem,
}

/// Representatives of `K(n)` up to isomorphism for `dimV ≤ dmax`, closed
/// under substructures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub p: Prime,
    pub n: usize,
    pub dmax: usize,
    pub classes: Vec<AltSystem>,
    pub pairs: Vec<CatalogPair>,
}

impl Catalog {
    pub fn counts_by_dim(&self) -> BTreeMap<usize, usize> {
        let mut out: BTreeMap<usize, usize> = (0..=self.dmax).map(|d| (d, 0)).collect();
        for c in &self.classes {
            *out.entry(c.dim_v()).or_default() += 1;
        }
        out
    }

    /// Index of the representative isomorphic to `sys`.
    pub fn class_of(&self, sys: &AltSystem) -> Option<usize> {
        self.classes.iter().position(|c| is_isomorphic(c, sys))
    }

    pub fn pairs_up_to(&self, t: usize) -> impl Iterator<Item = (usize, &CatalogPair)> {
        self.pairs
            .iter()
            .enumerate()
            .filter(move |(_, pr)| self.classes[pr.a].dim_v() <= t)
    }
}

pub fn enumerate_catalog(p: u64, n: usize, dmax: usize) -> Result<Catalog> {
    enumerate_catalog_with(Exec::default(), p, n, dmax, DEFAULT_TABLE_BUDGET)
}

/// Number of Gram tables with `dimV ≤ dmax`.
pub fn table_count(p: Prime, n: usize, dmax: usize) -> u64 {
    (0..=dmax).fold(0u64, |acc, d| {
        acc.saturating_add(pow_count(p, n * d * d.saturating_sub(1) / 2))
    })
}

pub fn enumerate_catalog_with(
    exec: Exec,
    p: u64,
    n: usize,
    dmax: usize,
    budget: u64,
) -> Result<Catalog> {
    let p = Prime::new(p)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "P must have dimension at least 1".into(),
        ));
    }
    if dmax > MAX_CATALOG_DIM {
        return Err(Error::TooLarge(format!(
            "catalog dimension {dmax} exceeds {MAX_CATALOG_DIM}"
        )));
    }
    let tables = table_count(p, n, dmax);
    if tables > budget {
        return Err(Error::TooLarge(format!(
            "{tables} Gram tables exceed the budget of {budget}"
        )));
    }
    let mut classes = Vec::new();
    for d in 0..=dmax {
        classes.extend(classes_of_dim(exec, p, n, d)?);
    }
    let mut pairs = Vec::new();
    for a in 0..classes.len() {
        pairs.extend(pairs_into(&classes, a)?);
    }
    Ok(Catalog {
        p,
        n,
        dmax,
        classes,
        pairs,
    })
}

fn table(p: Prime, n: usize, d: usize, idx: u64) -> Result<AltSystem> {
    let m = d * d.saturating_sub(1) / 2;
    let digits = vector_from_index(p, m * n, idx);
    let mut sys = AltSystem::zero(p, n, d)?;
    let mut q = 0;
    for i in 0..d {
        for j in i + 1..d {
            sys.set_entry(i, j, &digits.coords()[q * n..(q + 1) * n]);
            q += 1;
        }
    }
    Ok(sys)
}

/// Isomorphism classes of dimension `d`, each represented by the first
/// Gram table (in index order) of the class.
fn classes_of_dim(exec: Exec, p: Prime, n: usize, d: usize) -> Result<Vec<AltSystem>> {
    let count = pow_count(p, n * d * d.saturating_sub(1) / 2);
    let systems = exec.map_range(count as usize, |idx| {
        let s = table(p, n, d, idx as u64)?;
        let key = (s.radical().len(), s.derived_span());
        Ok::<_, Error>((key, s))
    });
    let mut reps: Vec<((usize, Vec<FVector>), AltSystem)> = Vec::new();
    for item in systems {
        let (key, s) = item?;
        let known = reps.iter().any(|(k, r)| {
            *k == key
                && search_embedding_with(Exec::Sequential, r, &s, &[])
                    .ok()
                    .flatten()
                    .is_some()
        });
        if !known {
            reps.push((key, s));
        }
    }
    Ok(reps.into_iter().map(|(_, s)| s).collect())
}

/// Pairs `(B, A)` for a fixed `A`: one per `Aut(A)`-orbit of proper
/// subspaces.
fn pairs_into(classes: &[AltSystem], ai: usize) -> Result<Vec<CatalogPair>> {
    let a = &classes[ai];
    let p = a.prime();
    let d = a.dim_v();
    let mut out: Vec<CatalogPair> = Vec::new();
    for k in 0..d {
        for u in all_subspaces(p, d, k) {
            let restricted = a.restrict(&u)?;
            let (bi, sigma) = classes
                .iter()
                .enumerate()
                .filter(|(_, c)| c.dim_v() == k)
                .find_map(|(i, c)| {
                    search_embedding_with(Exec::Sequential, c, &restricted, &[])
                        .ok()
                        .flatten()
                        .map(|e| (i, e))
                })
                .ok_or_else(|| {
                    Error::InvalidArgument("catalog is not closed under substructures".into())
                })?;
            let mut same_orbit = false;
            for prev in out.iter().filter(|pr| pr.b == bi) {
                let mut domains: Vec<Option<Vec<FVector>>> = vec![None; d];
                for dom in domains.iter_mut().take(k) {
                    *dom = Some(u.clone());
                }
                if search_with_domains(&prev.a_rebased, a, &domains)?.is_some() {
                    same_orbit = true;
                    break;
                }
            }
            if same_orbit {
                continue;
            }
            // σ maps B into A|U; push its images through the basis U.
            let images: Vec<FVector> = sigma
                .images
                .iter()
                .map(|coef| {
                    u.iter()
                        .zip(coef.coords())
                        .fold(FVector::zeros(p, d), |acc, (ul, &c)| {
                            acc.add(&ul.scale(c)).expect("same length")
                        })
                })
                .collect();
            let mut basis = images.clone();
            basis.extend(extend_to_complement(p, &images, d)?);
            let a_rebased = a.restrict(&basis)?;
            out.push(CatalogPair {
                b: bi,
                a: ai,
                embedding: Embedding::new(classes[bi].clone(), a.clone(), images),
                a_rebased,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alt_system::check_embedding;

    #[test]
    fn small_counts() {
        let c = enumerate_catalog(3, 1, 2).unwrap();
        assert_eq!(c.counts_by_dim(), BTreeMap::from([(0, 1), (1, 1), (2, 2)]));
        let c = enumerate_catalog(3, 2, 2).unwrap();
        assert_eq!(c.counts_by_dim(), BTreeMap::from([(0, 1), (1, 1), (2, 5)]));
        let c = enumerate_catalog(3, 1, 0).unwrap();
        assert_eq!(c.classes.len(), 1);
        assert!(c.pairs.is_empty());
    }

    #[test]
    fn pairs_for_planes() {
        // ∅ ⊆ line; ∅, line ⊆ zero plane; ∅, line ⊆ symplectic plane
        let c = enumerate_catalog(3, 1, 2).unwrap();
        assert_eq!(c.pairs.len(), 5);
        for pr in &c.pairs {
            assert!(check_embedding(&pr.embedding).unwrap());
            let k = c.classes[pr.b].dim_v();
            assert_eq!(pr.a_rebased.prefix(k), c.classes[pr.b]);
            assert!(is_isomorphic(&pr.a_rebased, &c.classes[pr.a]));
        }
    }

    #[test]
    fn budget_guards() {
        assert!(matches!(
            enumerate_catalog(3, 1, 5),
            Err(Error::TooLarge(_))
        ));
        assert!(matches!(
            enumerate_catalog(3, 2, 4),
            Err(Error::TooLarge(_))
        ));
        assert!(matches!(
            enumerate_catalog(4, 1, 2),
            Err(Error::BadPrime(4))
        ));
    }

    #[test]
    fn parallel_matches_sequential() {
        let a = enumerate_catalog_with(Exec::Sequential, 3, 1, 3, DEFAULT_TABLE_BUDGET).unwrap();
        let b = enumerate_catalog_with(Exec::Parallel, 3, 1, 3, DEFAULT_TABLE_BUDGET).unwrap();
        assert_eq!(a, b);
    }
}
