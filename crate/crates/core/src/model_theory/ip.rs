use crate::alt_system::AltSystem;
use crate::baer_group::{group_from_system, GroupElement, NilGroup};
use crate::error::{Error, Result};
use crate::fp_linalg::{FVector, Prime};

/// The central product `M_m` of `m` symplectic planes `⟨c, a_i, b_i⟩` with
/// `[b_i, a_i] = c`, and an element `x` with `[b_j, x] = 1 ⟺ j ∈ S`.
#[derive(Debug, Clone)]
pub struct IpWitness {
    pub group: NilGroup,
    pub a: Vec<GroupElement>,
    pub b: Vec<GroupElement>,
    pub x: GroupElement,
    /// `commutes[j]` is `[b_j, x] = 1`, computed in the group.
    pub commutes: Vec<bool>,
    pub subset: Vec<usize>,
}

impl IpWitness {
    /// The pattern matches `S` exactly.
    pub fn verified(&self) -> bool {
        self.commutes
            .iter()
            .enumerate()
            .all(|(j, &c)| c == self.subset.contains(&j))
    }
}

/// `V` has basis `a_0, b_0, a_1, b_1, …` with `β(b_i, a_i) = c` and all other
/// basis pairs orthogonal.
pub fn central_product_of_planes(p: Prime, m: usize) -> Result<AltSystem> {
    let mut sys = AltSystem::zero(p, 1, 2 * m)?;
    for i in 0..m {
        // β(a_i, b_i) = -c
        sys.set_entry(2 * i, 2 * i + 1, &[p.get() - 1]);
    }
    Ok(sys)
}

pub fn ip_witness(p: u64, m: usize, subset: &[usize]) -> Result<IpWitness> {
    let p = Prime::new(p)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if let Some(j) = subset.iter().find(|&&j| j >= m) {
        return Err(Error::InvalidArgument(format!("index {j} outside 0..{m}")));
    }
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();
    let group = group_from_system(&central_product_of_planes(p, m)?);
    let a: Vec<GroupElement> = (0..m).map(|i| group.basis_element(2 * i)).collect();
    let b: Vec<GroupElement> = (0..m).map(|i| group.basis_element(2 * i + 1)).collect();
    let mut v = FVector::zeros(p, 2 * m);
    for (j, aj) in a.iter().enumerate() {
        if !subset.contains(&j) {
            v = v.add(&aj.v)?;
        }
    }
    let x = GroupElement::lift(v, 1);
    let commutes = b
        .iter()
        .map(|bj| Ok(group.comm(bj, &x)?.is_identity()))
        .collect::<Result<Vec<_>>>()?;
    Ok(IpWitness {
        group,
        a,
        b,
        x,
        commutes,
        subset,
    })
}

/// Decodes a bitmask over `0..m` into a subset.
pub fn subset_from_mask(mask: u64, m: usize) -> Vec<usize> {
    (0..m.min(64)).filter(|&j| mask >> j & 1 == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_planes_subset_zero() {
        let w = ip_witness(3, 2, &[0]).unwrap();
        assert_eq!(w.x.v, w.a[1].v);
        assert_eq!(w.commutes, vec![true, false]);
        let c = w.group.comm(&w.b[1], &w.x).unwrap();
        assert_eq!(c, w.group.c(0));
        assert!(w.verified());
    }

    #[test]
    fn full_and_empty_subsets() {
        let w = ip_witness(3, 4, &[0, 1, 2, 3]).unwrap();
        assert!(w.x.is_identity());
        assert!(w.commutes.iter().all(|&c| c));
        let w = ip_witness(3, 4, &[]).unwrap();
        assert!(w.commutes.iter().all(|&c| !c));
    }

    #[test]
    fn errors() {
        assert!(matches!(ip_witness(9, 2, &[]), Err(Error::BadPrime(9))));
        assert!(ip_witness(3, 2, &[2]).is_err());
        assert_eq!(subset_from_mask(0b101, 3), vec![0, 2]);
    }
}
