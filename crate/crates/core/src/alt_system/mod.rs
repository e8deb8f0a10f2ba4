//! Alternating bilinear systems `(V, P, β)` over `F_p` with `P = F_p^n`
//! fixed, their embeddings, amalgamation, and the relatively free
//! exterior-square systems.

mod amalgam;
mod embedding;
mod free;
mod search;

pub use amalgam::{amalgamate, amalgamate_with, Amalgam};
pub use embedding::{check_embedding, Embedding};
pub use free::{free_exterior_system, FreeSystem};
pub use search::{
    count_embeddings, for_each_embedding, is_isomorphic, sample_embedding, search_embedding,
    search_embedding_with, search_with_domains,
};

use std::fmt;

use rand::Rng;

use crate::error::{dim_mismatch, Error, Result};
use crate::fp_linalg::{kernel_from_rref, rref_raw, span_basis, Echelon, FVector, Prime};

/// An alternating bilinear map `β: V × V → P` with `V = F_p^dim_v` and
/// `P = F_p^n`. The distinguished central generators `c_1..c_n` are the
/// standard basis of `P`.
///
/// Only the strict upper triangle of the Gram table is stored, so
/// `β(e_i, e_i) = 0` and `β(e_j, e_i) = -β(e_i, e_j)` hold by
/// construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AltSystem {
    p: Prime,
    n: usize,
    dim_v: usize,
    upper: Vec<u32>,
}

impl fmt::Debug for AltSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AltSystem(p={}, n={}, dimV={}",
            self.p, self.n, self.dim_v
        )?;
        for (i, j, w) in self.nonzero_entries() {
            write!(f, ", ({i},{j})={w:?}")?;
        }
        write!(f, ")")
    }
}

#[inline]
fn tri_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < dim);
    i * (2 * dim - i - 1) / 2 + (j - i - 1)
}

/// Builds a system from explicit Gram entries `β(e_i, e_j)`, `i < j`.
/// Unlisted pairs are zero; an entry with `i > j` is stored negated.
pub fn make_system(
    p: u64,
    n: usize,
    dim_v: usize,
    entries: &[(usize, usize, FVector)],
) -> Result<AltSystem> {
    let p = Prime::new(p)?;
    let mut sys = AltSystem::zero(p, n, dim_v)?;
    for (i, j, w) in entries {
        let (i, j) = (*i, *j);
        if i >= dim_v || j >= dim_v {
            return Err(dim_mismatch(format!(
                "entry ({i}, {j}) outside dimV = {dim_v}"
            )));
        }
        if w.len() != n || w.prime() != p {
            return Err(dim_mismatch(format!(
                "entry ({i}, {j}) has length {} but n = {n}",
                w.len()
            )));
        }
        if i == j {
            if !w.is_zero() {
                return Err(Error::NotAlternating(i));
            }
            continue;
        }
        if i < j {
            sys.set_entry(i, j, w.coords());
        } else {
            sys.set_entry(j, i, w.neg().coords());
        }
    }
    Ok(sys)
}

impl AltSystem {
    /// The zero form on `F_p^dim_v`.
    pub fn zero(p: Prime, n: usize, dim_v: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "P must have dimension at least 1".into(),
            ));
        }
        Ok(AltSystem {
            p,
            n,
            dim_v,
            upper: vec![0; dim_v * dim_v.saturating_sub(1) / 2 * n],
        })
    }

    /// The trivial system (`V = 0`).
    pub fn trivial(p: Prime, n: usize) -> Result<Self> {
        AltSystem::zero(p, n, 0)
    }

    /// A hyperbolic plane with `β(e_0, e_1) = c`.
    pub fn plane(p: Prime, c: &FVector) -> Result<Self> {
        let mut s = AltSystem::zero(p, c.len(), 2)?;
        s.set_entry(0, 1, c.coords());
        Ok(s)
    }

    /// Uniformly random Gram table.
    pub fn random<R: Rng + ?Sized>(p: Prime, n: usize, dim_v: usize, rng: &mut R) -> Result<Self> {
        let mut s = AltSystem::zero(p, n, dim_v)?;
        for x in s.upper.iter_mut() {
            *x = rng.gen_range(0..p.get());
        }
        Ok(s)
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    /// `dim P`.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub(crate) fn set_entry(&mut self, i: usize, j: usize, w: &[u32]) {
        let k = tri_index(self.dim_v, i, j) * self.n;
        self.upper[k..k + self.n].copy_from_slice(w);
    }

    #[inline]
    pub(crate) fn upper_raw(&self, i: usize, j: usize) -> &[u32] {
        let k = tri_index(self.dim_v, i, j) * self.n;
        &self.upper[k..k + self.n]
    }

    /// `β(e_i, e_j)` as raw residues.
    pub(crate) fn entry_raw(&self, i: usize, j: usize) -> Vec<u32> {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.upper_raw(i, j).to_vec(),
            Equal => vec![0; self.n],
            Greater => self
                .upper_raw(j, i)
                .iter()
                .map(|&x| self.p.neg(x))
                .collect(),
        }
    }

    /// `β(e_i, e_j)`.
    pub fn gram(&self, i: usize, j: usize) -> FVector {
        FVector::from_raw(self.p, self.entry_raw(i, j))
    }

    /// Nonzero upper-triangle entries, sorted by `(i, j)`.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, FVector)> + '_ {
        let d = self.dim_v;
        (0..d)
            .flat_map(move |i| (i + 1..d).map(move |j| (i, j)))
            .filter_map(move |(i, j)| {
                let w = self.upper_raw(i, j);
                w.iter()
                    .any(|&x| x != 0)
                    .then(|| (i, j, FVector::from_raw(self.p, w.to_vec())))
            })
    }

    pub(crate) fn beta_raw(&self, u: &[u32], v: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut acc = vec![0u32; self.n];
        for i in 0..self.dim_v {
            if u[i] == 0 && v[i] == 0 {
                continue;
            }
            for j in i + 1..self.dim_v {
                // u_i v_j - u_j v_i
                let coef = p.sub(p.mul(u[i], v[j]), p.mul(u[j], v[i]));
                if coef != 0 {
                    let w = self.upper_raw(i, j);
                    for (a, &x) in acc.iter_mut().zip(w) {
                        *a = p.mul_add(*a, coef, x);
                    }
                }
            }
        }
        acc
    }

    /// Rows `β(e_k, u)` for every basis index `k`; `β(x, u) = Σ x_k row_k`.
    pub(crate) fn against_raw(&self, u: &[u32]) -> Vec<Vec<u32>> {
        let p = self.p;
        (0..self.dim_v)
            .map(|k| {
                let mut acc = vec![0u32; self.n];
                for (j, &uj) in u.iter().enumerate() {
                    if uj == 0 || j == k {
                        continue;
                    }
                    let w = self.entry_raw(k, j);
                    for (a, &x) in acc.iter_mut().zip(&w) {
                        *a = p.mul_add(*a, uj, x);
                    }
                }
                acc
            })
            .collect()
    }

    fn check_v(&self, u: &FVector) -> Result<()> {
        if u.len() != self.dim_v || u.prime() != self.p {
            return Err(dim_mismatch(format!(
                "vector of length {} in V of dimension {}",
                u.len(),
                self.dim_v
            )));
        }
        Ok(())
    }

    /// `β(u, v) = Σ u_i v_j β(e_i, e_j)`.
    pub fn eval_beta(&self, u: &FVector, v: &FVector) -> Result<FVector> {
        self.check_v(u)?;
        self.check_v(v)?;
        Ok(FVector::from_raw(
            self.p,
            self.beta_raw(u.coords(), v.coords()),
        ))
    }

    /// The system induced on `span(basis)` with respect to the given
    /// (independent) basis: `β'(e_i, e_j) = β(basis_i, basis_j)`.
    pub fn restrict(&self, basis: &[FVector]) -> Result<AltSystem> {
        for b in basis {
            self.check_v(b)?;
        }
        let mut out = AltSystem::zero(self.p, self.n, basis.len())?;
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let w = self.beta_raw(basis[i].coords(), basis[j].coords());
                out.set_entry(i, j, &w);
            }
        }
        Ok(out)
    }

    /// Restriction to the first `k` coordinates.
    pub fn prefix(&self, k: usize) -> AltSystem {
        let mut out = AltSystem::zero(self.p, self.n, k).expect("n >= 1");
        for i in 0..k {
            for j in i + 1..k {
                out.set_entry(i, j, self.upper_raw(i, j));
            }
        }
        out
    }

    /// Orthogonal sum over the common `P` (the central product of the
    /// corresponding groups).
    pub fn orthogonal_sum(&self, other: &AltSystem) -> Result<AltSystem> {
        if self.p != other.p || self.n != other.n {
            return Err(dim_mismatch("orthogonal sum of systems over different P"));
        }
        let d = self.dim_v;
        let mut out = AltSystem::zero(self.p, self.n, d + other.dim_v)?;
        for (i, j, w) in self.nonzero_entries() {
            out.set_entry(i, j, w.coords());
        }
        for (i, j, w) in other.nonzero_entries() {
            out.set_entry(d + i, d + j, w.coords());
        }
        Ok(out)
    }

    /// Basis of the radical `{v : β(v, ·) = 0}` (the `V`-part of the centre).
    pub fn radical(&self) -> Vec<FVector> {
        let d = self.dim_v;
        // One equation per (basis index j, coordinate l of P):
        // Σ_k v_k β(e_k, e_j)_l = 0.
        let mut rows: Vec<Vec<u32>> = Vec::with_capacity(d * self.n);
        for j in 0..d {
            let cols: Vec<Vec<u32>> = (0..d).map(|k| self.entry_raw(k, j)).collect();
            for l in 0..self.n {
                rows.push(cols.iter().map(|c| c[l]).collect());
            }
        }
        let pivots = rref_raw(self.p, &mut rows, d);
        kernel_from_rref(self.p, &rows, &pivots, d)
            .into_iter()
            .map(|v| FVector::from_raw(self.p, v))
            .collect()
    }

    /// Echelon basis of the span of all Gram values inside `P`.
    pub fn derived_span(&self) -> Vec<FVector> {
        let mut ech = Echelon::new(self.p, self.n);
        let mut out = Vec::new();
        for (_, _, w) in self.nonzero_entries() {
            if ech.insert(w.coords()) {
                out.push(w);
            }
            if ech.rank() == self.n {
                break;
            }
        }
        span_basis(&out).expect("uniform lengths")
    }
}

/// `⟨X⟩`: all of `P` together with the preimage of `span(π X)`.
#[derive(Debug, Clone)]
pub struct SubStructure<'a> {
    pub host: &'a AltSystem,
    pub vspan: Vec<FVector>,
}

impl SubStructure<'_> {
    pub fn dim(&self) -> usize {
        self.vspan.len()
    }

    pub fn contains(&self, v: &FVector) -> bool {
        let mut ech = Echelon::new(self.host.prime(), self.host.dim_v());
        for b in &self.vspan {
            ech.insert(b.coords());
        }
        ech.contains(v.coords())
    }

    /// The induced system on the echelon basis of the span.
    pub fn as_system(&self) -> AltSystem {
        self.host.restrict(&self.vspan).expect("basis lies in host")
    }
}

/// The substructure generated by `gens` (commutators land in `P`, so the
/// `V`-part is just the linear span).
pub fn generated_substructure<'a>(
    sys: &'a AltSystem,
    gens: &[FVector],
) -> Result<SubStructure<'a>> {
    for g in gens {
        sys.check_v(g)?;
    }
    Ok(SubStructure {
        host: sys,
        vspan: span_basis(gens)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn plane3() -> AltSystem {
        make_system(3, 1, 2, &[(0, 1, FVector::from_ints(p3(), &[1]))]).unwrap()
    }

    #[test]
    fn make_system_examples() {
        let s = plane3();
        assert_eq!(s.gram(0, 1), FVector::from_ints(p3(), &[1]));
        assert_eq!(s.gram(1, 0), FVector::from_ints(p3(), &[2]));
        assert_eq!(s.gram(1, 1), FVector::from_ints(p3(), &[0]));

        assert_eq!(
            make_system(3, 1, 2, &[(0, 0, FVector::from_ints(p3(), &[1]))]),
            Err(Error::NotAlternating(0))
        );
        assert!(matches!(
            make_system(3, 1, 2, &[(0, 1, FVector::from_ints(p3(), &[1, 0]))]),
            Err(Error::DimensionMismatch(_))
        ));
        assert_eq!(make_system(4, 1, 2, &[]), Err(Error::BadPrime(4)));
        assert_eq!(make_system(15, 1, 2, &[]), Err(Error::BadPrime(15)));
    }

    #[test]
    fn eval_beta_examples() {
        let s = plane3();
        let p = p3();
        let e0 = FVector::unit(p, 2, 0);
        let e1 = FVector::unit(p, 2, 1);
        assert_eq!(s.eval_beta(&e0, &e1).unwrap(), FVector::from_ints(p, &[1]));
        assert_eq!(s.eval_beta(&e1, &e0).unwrap(), FVector::from_ints(p, &[2]));
        let u = FVector::from_ints(p, &[2, 2]);
        let v = FVector::from_ints(p, &[1, 1]);
        assert!(s.eval_beta(&u, &v).unwrap().is_zero());
        assert!(matches!(
            s.eval_beta(&FVector::unit(p, 3, 0), &e0),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn generated_substructure_examples() {
        let p = p3();
        let s = AltSystem::zero(p, 1, 2).unwrap();
        assert_eq!(generated_substructure(&s, &[]).unwrap().dim(), 0);
        let sub = generated_substructure(
            &s,
            &[
                FVector::from_ints(p, &[1, 0]),
                FVector::from_ints(p, &[1, 1]),
            ],
        )
        .unwrap();
        assert_eq!(
            sub.vspan,
            vec![
                FVector::from_ints(p, &[1, 0]),
                FVector::from_ints(p, &[0, 1])
            ]
        );
        let sub = generated_substructure(&s, &[FVector::from_ints(p, &[2, 0])]).unwrap();
        assert_eq!(sub.vspan, vec![FVector::from_ints(p, &[1, 0])]);
    }

    #[test]
    fn radical_and_derived() {
        let p = p3();
        let s = plane3();
        assert!(s.radical().is_empty());
        assert_eq!(s.derived_span().len(), 1);
        let z = AltSystem::zero(p, 1, 3).unwrap();
        assert_eq!(z.radical().len(), 3);
        assert!(z.derived_span().is_empty());
        let sum = s
            .orthogonal_sum(&AltSystem::zero(p, 1, 1).unwrap())
            .unwrap();
        assert_eq!(sum.radical(), vec![FVector::unit(p, 3, 2)]);
    }

    #[test]
    fn restrict_and_prefix() {
        let p = p3();
        let s = plane3().orthogonal_sum(&plane3()).unwrap();
        assert_eq!(s.prefix(2), plane3());
        let r = s
            .restrict(&[FVector::unit(p, 4, 2), FVector::unit(p, 4, 3)])
            .unwrap();
        assert_eq!(r, plane3());
    }
}
