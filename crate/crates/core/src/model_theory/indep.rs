use crate::alt_system::AltSystem;
use crate::baer_group::GroupElement;
use crate::error::{dim_mismatch, Result};
use crate::fp_linalg::{all_subspaces, in_span, rank_of, subspace_intersect, FVector};

/// `A ⫝⁰_B C` asked in `host`. Substructures always contain `P`, so only
/// the `V`-parts of the elements matter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndepQuery {
    pub host: AltSystem,
    pub a: Vec<GroupElement>,
    pub b: Vec<GroupElement>,
    pub c: Vec<GroupElement>,
}

impl IndepQuery {
    pub fn new(
        host: AltSystem,
        a: Vec<GroupElement>,
        b: Vec<GroupElement>,
        c: Vec<GroupElement>,
    ) -> Result<Self> {
        for x in a.iter().chain(&b).chain(&c) {
            check_element(&host, x)?;
        }
        Ok(IndepQuery { host, a, b, c })
    }
}

pub(crate) fn check_element(host: &AltSystem, x: &GroupElement) -> Result<()> {
    if x.v.len() != host.dim_v()
        || x.w.len() != host.n()
        || x.v.prime() != host.prime()
        || x.w.prime() != host.prime()
    {
        return Err(dim_mismatch(format!(
            "element of shape {}|{} in a system of shape {}|{}",
            x.v.len(),
            x.w.len(),
            host.dim_v(),
            host.n()
        )));
    }
    Ok(())
}

pub(crate) fn vparts<'a>(sets: impl IntoIterator<Item = &'a [GroupElement]>) -> Vec<FVector> {
    sets.into_iter().flatten().map(|x| x.v.clone()).collect()
}

/// `⟨A⟩ ∩ ⟨C⟩ = ⟨B⟩` for `⟨A⟩ = ⟨A ∪ B⟩`, `⟨C⟩ = ⟨C ∪ B⟩`.
pub fn indep0(q: &IndepQuery) -> bool {
    indep0_raw(&q.a, &q.b, &q.c)
}

/// [`indep0`] on element lists assumed to live in a common host.
pub fn indep0_raw(a: &[GroupElement], b: &[GroupElement], c: &[GroupElement]) -> bool {
    let sa = vparts([a, b]);
    let sc = vparts([c, b]);
    let sb = vparts([b]);
    let inter = subspace_intersect(&sa, &sc).expect("elements share one host");
    // span π(B) ⊆ intersection always, so equal dimensions suffice
    inter.len() == rank_of(&sb).expect("elements share one host")
}

/// A greedily minimal `B₀ ⊆ A` with `span π(B₀) ⊇ span π(ā) ∩ span π(A)`,
/// dropping elements of `A` in order whenever the containment survives.
pub fn local_base(
    d: &AltSystem,
    abar: &[GroupElement],
    a: &[GroupElement],
) -> Result<Vec<GroupElement>> {
    for x in abar.iter().chain(a) {
        check_element(d, x)?;
    }
    let target = subspace_intersect(&vparts([abar]), &vparts([a]))?;
    let covers = |keep: &[bool]| -> bool {
        let vs: Vec<FVector> = a
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(x, _)| x.v.clone())
            .collect();
        target
            .iter()
            .all(|t| !vs.is_empty() && in_span(&vs, t).expect("same host"))
    };
    let mut keep = vec![true; a.len()];
    for i in 0..a.len() {
        keep[i] = false;
        if !covers(&keep) {
            keep[i] = true;
        }
    }
    Ok(a.iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(x, _)| x.clone())
        .collect())
}

/// A discrepancy of the SU-rank-1 law for a singleton `a` over `B ⊆ C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuDiscrepancy {
    pub a: FVector,
    pub b: Vec<FVector>,
    pub c: Vec<FVector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuReport {
    pub checked: u64,
    pub discrepancies: Vec<SuDiscrepancy>,
}

/// `¬ a ⫝⁰_B C ⟺ a ∈ ⟨C⟩ ∧ a ∉ ⟨B⟩` for a singleton `a` and `B ⊆ C`.
pub fn su_rank_law_holds(a: &GroupElement, b: &[GroupElement], c: &[GroupElement]) -> bool {
    let forks = !indep0_raw(std::slice::from_ref(a), b, c);
    let in_c = in_span(&vparts([c]), &a.v).expect("same host");
    let in_b = in_span(&vparts([b]), &a.v).expect("same host");
    forks == (in_c && !in_b)
}

/// The SU-rank-1 law over every vector `a` and every pair of subspaces
/// `B ⊆ C` of `V`. Substructures are `P` plus a subspace, so this covers
/// all substructure pairs.
pub fn su_rank_exhaustive(d: &AltSystem, max_dim: usize) -> Result<SuReport> {
    if d.dim_v() > max_dim {
        return Err(crate::error::Error::TooLarge(format!(
            "exhaustive check limited to dimV <= {max_dim}"
        )));
    }
    let p = d.prime();
    let dim = d.dim_v();
    let n = d.n();
    let lift = |v: &FVector| GroupElement::lift(v.clone(), n);
    let subspaces: Vec<Vec<FVector>> = (0..=dim).flat_map(|k| all_subspaces(p, dim, k)).collect();
    let mut report = SuReport {
        checked: 0,
        discrepancies: Vec::new(),
    };
    for c in &subspaces {
        let c_el: Vec<GroupElement> = c.iter().map(lift).collect();
        for b in subspaces.iter().filter(|b| b.len() <= c.len()) {
            if !b.iter().all(|x| in_span(c, x).expect("same host")) {
                continue;
            }
            let b_el: Vec<GroupElement> = b.iter().map(lift).collect();
            for a in crate::fp_linalg::all_vectors(p, dim) {
                report.checked += 1;
                if !su_rank_law_holds(&lift(&a), &b_el, &c_el) {
                    report.discrepancies.push(SuDiscrepancy {
                        a,
                        b: b.clone(),
                        c: c.clone(),
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp_linalg::Prime;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn el(v: &[i64]) -> GroupElement {
        GroupElement::lift(FVector::from_ints(p3(), v), 1)
    }

    #[test]
    fn axes_are_independent() {
        assert!(indep0_raw(&[el(&[1, 0])], &[], &[el(&[0, 1])]));
        assert!(!indep0_raw(
            &[el(&[1, 0])],
            &[],
            &[el(&[1, 1]), el(&[0, 1])]
        ));
        // C inside the base
        assert!(indep0_raw(&[el(&[1, 0])], &[el(&[0, 1])], &[el(&[0, 2])]));
        let q = IndepQuery::new(
            AltSystem::zero(p3(), 1, 2).unwrap(),
            vec![el(&[1, 0])],
            vec![],
            vec![el(&[0, 1])],
        );
        assert!(indep0(&q.unwrap()));
    }

    #[test]
    fn local_base_examples() {
        let d = AltSystem::zero(p3(), 1, 3).unwrap();
        let b0 = local_base(&d, &[el(&[0, 0, 1])], &[el(&[1, 0, 0]), el(&[0, 1, 0])]).unwrap();
        assert!(b0.is_empty());
        let a = [el(&[1, 1, 0]), el(&[0, 1, 0])];
        let b0 = local_base(&d, &[el(&[1, 0, 0])], &a).unwrap();
        assert_eq!(b0, a.to_vec());
        let a = [el(&[1, 0, 0]), el(&[0, 1, 0]), el(&[0, 0, 1])];
        let b0 = local_base(&d, &[el(&[0, 1, 0])], &a).unwrap();
        assert_eq!(b0, vec![el(&[0, 1, 0])]);
        assert!(indep0_raw(&[el(&[0, 1, 0])], &b0, &a));
    }

    #[test]
    fn su_rank_small() {
        let d = AltSystem::plane(p3(), &FVector::from_ints(p3(), &[1])).unwrap();
        let rep = su_rank_exhaustive(&d, 4).unwrap();
        assert!(rep.discrepancies.is_empty());
        // subspace pairs B ⊆ C of F_3^2: 1+4+1 (C = ⟨0⟩, lines, plane) chains
        // give 1 + 4·2 + (1+4+1) = 15 pairs, times 9 vectors
        assert_eq!(rep.checked, 15 * 9);
    }
}
