use crate::error::{dim_mismatch, Error, Result};
use crate::fp_linalg::{FVector, Prime};

use super::AltSystem;

/// The relatively free system `(F_p^r, Λ²F_p^r, ∧)`.
///
/// `Λ²V` has the ordered-pair basis `e_i ∧ e_j`, `i < j`, listed
/// lexicographically: `(0,1), (0,2), …, (0,r-1), (1,2), …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FreeSystem {
    p: Prime,
    r: usize,
}

pub fn free_exterior_system(r: usize, p: u64) -> Result<FreeSystem> {
    let p = Prime::new(p)?;
    if r == 0 {
        return Err(Error::InvalidArgument(
            "free rank must be at least 1".into(),
        ));
    }
    Ok(FreeSystem { p, r })
}

impl FreeSystem {
    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    /// `dim Λ²V = r(r-1)/2`.
    pub fn wedge_dim(&self) -> usize {
        self.r * (self.r - 1) / 2
    }

    /// Coordinate index of `e_i ∧ e_j`, `i < j`.
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        assert!(i < j && j < self.r, "pair ({i}, {j}) out of range");
        i * (2 * self.r - i - 1) / 2 + (j - i - 1)
    }

    /// `e_i ∧ e_j` as a vector of `Λ²V`; antisymmetric in `(i, j)`.
    pub fn basis_wedge(&self, i: usize, j: usize) -> FVector {
        let mut c = vec![0u32; self.wedge_dim()];
        if i < j {
            c[self.pair_index(i, j)] = 1;
        } else if j < i {
            c[self.pair_index(j, i)] = self.p.get() - 1;
        }
        FVector::from_raw(self.p, c)
    }

    /// `u ∧ v`, whose `(i, j)` coordinate is `u_i v_j - u_j v_i`.
    pub fn wedge(&self, u: &FVector, v: &FVector) -> Result<FVector> {
        if u.len() != self.r || v.len() != self.r {
            return Err(dim_mismatch(format!(
                "wedge of vectors of length {} and {} in rank {}",
                u.len(),
                v.len(),
                self.r
            )));
        }
        let p = self.p;
        let mut w = Vec::with_capacity(self.wedge_dim());
        for i in 0..self.r {
            for j in i + 1..self.r {
                w.push(p.sub(p.mul(u.get(i), v.get(j)), p.mul(u.get(j), v.get(i))));
            }
        }
        Ok(FVector::from_raw(p, w))
    }

    /// The free system viewed as an alternating system with `P = Λ²V`.
    pub fn to_alt_system(&self) -> Result<AltSystem> {
        if self.r < 2 {
            return Err(Error::InvalidArgument(
                "rank 1 has a zero exterior square".into(),
            ));
        }
        let mut s = AltSystem::zero(self.p, self.wedge_dim(), self.r)?;
        for i in 0..self.r {
            for j in i + 1..self.r {
                s.set_entry(i, j, self.basis_wedge(i, j).coords());
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp_linalg::{all_vectors, rank_of};

    #[test]
    fn dimensions() {
        let f = free_exterior_system(2, 3).unwrap();
        assert_eq!(f.wedge_dim(), 1);
        let e0 = FVector::unit(f.prime(), 2, 0);
        let e1 = FVector::unit(f.prime(), 2, 1);
        assert_eq!(f.wedge(&e0, &e1).unwrap(), f.basis_wedge(0, 1));
        assert_eq!(free_exterior_system(3, 3).unwrap().wedge_dim(), 3);
        assert_eq!(free_exterior_system(3, 4), Err(Error::BadPrime(4)));
    }

    #[test]
    fn wedge_with_multiple_vanishes() {
        let f = free_exterior_system(4, 5).unwrap();
        for u in all_vectors(f.prime(), 4).step_by(7) {
            for lam in 0..5 {
                assert!(f.wedge(&u, &u.scale(lam)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn wedge_zero_iff_dependent() {
        let f = free_exterior_system(3, 3).unwrap();
        let all: Vec<_> = all_vectors(f.prime(), 3).collect();
        for u in &all {
            for v in &all {
                let dependent = rank_of(&[u.clone(), v.clone()]).unwrap() < 2;
                assert_eq!(f.wedge(u, v).unwrap().is_zero(), dependent);
            }
        }
    }

    #[test]
    fn alt_view_agrees_with_wedge() {
        let f = free_exterior_system(4, 3).unwrap();
        let s = f.to_alt_system().unwrap();
        let u = FVector::from_ints(f.prime(), &[1, 2, 0, 1]);
        let v = FVector::from_ints(f.prime(), &[0, 1, 1, 2]);
        assert_eq!(s.eval_beta(&u, &v).unwrap(), f.wedge(&u, &v).unwrap());
    }
}
