//! Class-2 exponent-`p` groups realised from alternating systems.
//!
//! Elements are pairs `(v, w) ∈ V × P` with the 2⁻¹-twisted product
//! `(v₁, w₁)(v₂, w₂) = (v₁ + v₂, w₁ + w₂ + ½β(v₁, v₂))`. For odd `p` this is
//! a group of nilpotency class at most two and exponent `p`, whose
//! commutator is `[x, y] = (0, β(v_x, v_y))` and whose `P`-part is central.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alt_system::{check_embedding, AltSystem, Embedding};
use crate::error::{dim_mismatch, Error, Result};
use crate::exec::Exec;
use crate::fp_linalg::{axpy_raw, pow_count, vector_from_index, FVector, Prime};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub v: FVector,
    pub w: FVector,
}

impl GroupElement {
    pub fn new(v: FVector, w: FVector) -> Self {
        GroupElement { v, w }
    }

    /// `(v, 0)`.
    pub fn lift(v: FVector, n: usize) -> Self {
        let p = v.prime();
        GroupElement {
            v,
            w: FVector::zeros(p, n),
        }
    }

    /// `(0, w)`.
    pub fn central(w: FVector, dim_v: usize) -> Self {
        let p = w.prime();
        GroupElement {
            v: FVector::zeros(p, dim_v),
            w,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.v.is_zero() && self.w.is_zero()
    }
}

/// A group in `𝔾(n)` in normal form, built from its alternating system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilGroup {
    sys: AltSystem,
    half: u32,
}

pub fn group_from_system(sys: &AltSystem) -> NilGroup {
    NilGroup {
        sys: sys.clone(),
        half: sys.prime().half(),
    }
}

/// `F(G) = (G/P(G), P(G), β)`.
pub fn system_from_group(g: &NilGroup) -> AltSystem {
    g.sys.clone()
}

impl NilGroup {
    pub fn system(&self) -> &AltSystem {
        &self.sys
    }

    pub fn prime(&self) -> Prime {
        self.sys.prime()
    }

    pub fn half(&self) -> u32 {
        self.half
    }

    pub fn identity(&self) -> GroupElement {
        let p = self.prime();
        GroupElement::new(
            FVector::zeros(p, self.sys.dim_v()),
            FVector::zeros(p, self.sys.n()),
        )
    }

    /// The distinguished central generator `c_i = (0, e_i)`.
    pub fn c(&self, i: usize) -> GroupElement {
        GroupElement::central(
            FVector::unit(self.prime(), self.sys.n(), i),
            self.sys.dim_v(),
        )
    }

    /// `(e_i, 0)`.
    pub fn basis_element(&self, i: usize) -> GroupElement {
        GroupElement::lift(
            FVector::unit(self.prime(), self.sys.dim_v(), i),
            self.sys.n(),
        )
    }

    fn check(&self, x: &GroupElement) -> Result<()> {
        if x.v.len() != self.sys.dim_v()
            || x.w.len() != self.sys.n()
            || x.v.prime() != self.prime()
            || x.w.prime() != self.prime()
        {
            return Err(dim_mismatch(format!(
                "element with parts of length ({}, {}) in a group with dimV = {}, n = {}",
                x.v.len(),
                x.w.len(),
                self.sys.dim_v(),
                self.sys.n()
            )));
        }
        Ok(())
    }

    pub fn mul(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        let p = self.prime();
        let b = self.sys.beta_raw(x.v.coords(), y.v.coords());
        let mut w: Vec<u32> =
            x.w.coords()
                .iter()
                .zip(y.w.coords())
                .map(|(&a, &c)| p.add(a, c))
                .collect();
        axpy_raw(p, &mut w, self.half, &b);
        Ok(GroupElement::new(x.v.add(&y.v)?, FVector::from_raw(p, w)))
    }

    pub fn inv(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        Ok(GroupElement::new(x.v.neg(), x.w.neg()))
    }

    /// `x⁻¹ y⁻¹ x y`, computed through the product.
    pub fn comm(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        let xi = self.inv(x)?;
        let yi = self.inv(y)?;
        let left = self.mul(&xi, &yi)?;
        let right = self.mul(x, y)?;
        self.mul(&left, &right)
    }

    /// `x^k`; since `β(v, v) = 0` this is `(k v, k w)`.
    pub fn pow(&self, x: &GroupElement, k: i64) -> Result<GroupElement> {
        self.check(x)?;
        let s = self.prime().reduce(k);
        Ok(GroupElement::new(x.v.scale(s), x.w.scale(s)))
    }

    /// Number of elements, `p^(dimV + n)`.
    pub fn order(&self) -> u64 {
        pow_count(self.prime(), self.sys.dim_v() + self.sys.n())
    }

    /// The `idx`th element in lexicographic order of `(v | w)`.
    pub fn element(&self, idx: u64) -> GroupElement {
        let d = self.sys.dim_v();
        let all = vector_from_index(self.prime(), d + self.sys.n(), idx).into_coords();
        GroupElement::new(
            FVector::from_raw(self.prime(), all[..d].to_vec()),
            FVector::from_raw(self.prime(), all[d..].to_vec()),
        )
    }

    pub fn element_index(&self, x: &GroupElement) -> u64 {
        crate::fp_linalg::vector_index(&x.v.concat(&x.w))
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let p = self.prime();
        let mut draw = |len: usize| {
            FVector::from_raw(p, (0..len).map(|_| rng.gen_range(0..p.get())).collect())
        };
        let v = draw(self.sys.dim_v());
        let w = draw(self.sys.n());
        GroupElement::new(v, w)
    }
}

pub fn g_mul(g: &NilGroup, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
    g.mul(x, y)
}

pub fn g_comm(g: &NilGroup, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
    g.comm(x, y)
}

pub fn g_pow(g: &NilGroup, x: &GroupElement, k: i64) -> Result<GroupElement> {
    g.pow(x, k)
}

/// Centre, derived subgroup and axiom flags of a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupReport {
    /// Basis of the radical of `β`; `Z(G) = radical × P`.
    pub center_vspan: Vec<FVector>,
    /// Basis of `G′` inside `P`.
    pub derived_pspan: Vec<FVector>,
    /// Class two and exponent `p` (sampled law check).
    pub sigma1: bool,
    /// `G′ = Z(G) = P`: trivial radical and derived subgroup all of `P`.
    pub sigma2: bool,
    /// `G′ ⊆ P ⊆ Z(G)` with `c_1..c_n` independent: membership of `K(n)`.
    pub in_k_n: bool,
    /// `n = 1` and Σ2.
    pub extraspecial: bool,
}

const SIGMA1_SAMPLES: usize = 256;

pub fn structural_subgroups(g: &NilGroup) -> SubgroupReport {
    let sys = g.system();
    let center_vspan = sys.radical();
    let derived_pspan = sys.derived_span();
    let laws = check_group_laws(g, Exec::Sequential, SIGMA1_SAMPLES, 0);
    let sigma1 = laws.failures.is_empty();
    let sigma2 = center_vspan.is_empty() && derived_pspan.len() == sys.n();
    let in_k_n = c_generators_central_and_independent(g);
    SubgroupReport {
        sigma1,
        sigma2,
        in_k_n,
        extraspecial: sys.n() == 1 && sigma2,
        center_vspan,
        derived_pspan,
    }
}

fn c_generators_central_and_independent(g: &NilGroup) -> bool {
    let sys = g.system();
    let ws: Vec<FVector> = (0..sys.n()).map(|i| g.c(i).w).collect();
    let independent = crate::fp_linalg::rank_of(&ws).is_ok_and(|r| r == sys.n());
    let central = (0..sys.n()).all(|i| {
        let c = g.c(i);
        (0..sys.dim_v()).all(|k| {
            let x = g.basis_element(k);
            g.mul(&c, &x).ok() == g.mul(&x, &c).ok()
        })
    });
    independent && central
}

/// A violated group law together with the offending elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawFailure {
    pub law: &'static str,
    pub elements: Vec<GroupElement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport {
    /// Whether every triple of elements was checked.
    pub exhaustive: bool,
    pub triples: u64,
    pub failures: Vec<LawFailure>,
}

/// Largest group for which [`check_group_laws`] tabulates the product and
/// checks all triples.
pub const EXHAUSTIVE_ORDER_LIMIT: u64 = 1024;

/// Associativity, identity, inverses, the class-two law `[[x, y], z] = 1`,
/// the exponent law `x^p = 1` (by repeated multiplication) and the
/// commutator formula `[x, y] = (0, β(v_x, v_y))`.
///
/// Groups of order at most [`EXHAUSTIVE_ORDER_LIMIT`] are checked on all
/// triples through a Cayley table; larger ones on `samples` seeded random
/// triples.
pub fn check_group_laws(g: &NilGroup, exec: Exec, samples: usize, seed: u64) -> LawReport {
    if g.order() <= EXHAUSTIVE_ORDER_LIMIT {
        exhaustive_laws(g, exec)
    } else {
        sampled_laws(g, exec, samples, seed)
    }
}

fn exhaustive_laws(g: &NilGroup, exec: Exec) -> LawReport {
    let size = g.order() as usize;
    let elems: Vec<GroupElement> = g.elements().collect();
    let id = g.element_index(&g.identity()) as usize;
    let idx = |x: &GroupElement| g.element_index(x) as usize;
    let table: Vec<Vec<u32>> = exec.map(&elems, |x| {
        elems
            .iter()
            .map(|y| idx(&g.mul(x, y).expect("shapes")) as u32)
            .collect()
    });
    let inv: Vec<usize> = elems
        .iter()
        .map(|x| idx(&g.inv(x).expect("shapes")))
        .collect();
    let comm: Vec<Vec<u32>> = exec.map_range(size, |x| {
        (0..size)
            .map(|y| {
                let a = table[inv[x]][inv[y]] as usize;
                let b = table[x][y] as usize;
                table[a][b]
            })
            .collect()
    });
    let p = g.prime().get() as usize;

    let per_x: Vec<Vec<LawFailure>> = exec.map_range(size, |x| {
        let mut fails = Vec::new();
        let mut record = |law, ids: &[usize]| {
            if fails.len() < 8 {
                fails.push(LawFailure {
                    law,
                    elements: ids.iter().map(|&i| elems[i].clone()).collect(),
                });
            }
        };
        if table[x][id] as usize != x || table[id][x] as usize != x {
            record("identity", &[x]);
        }
        if table[x][inv[x]] as usize != id {
            record("inverse", &[x]);
        }
        let mut acc = id;
        for _ in 0..p {
            acc = table[acc][x] as usize;
        }
        if acc != id {
            record("exponent", &[x]);
        }
        for y in 0..size {
            let xy = table[x][y] as usize;
            let cxy = comm[x][y] as usize;
            let expected = GroupElement::central(
                g.system()
                    .eval_beta(&elems[x].v, &elems[y].v)
                    .expect("shapes"),
                g.system().dim_v(),
            );
            if elems[cxy] != expected {
                record("commutator", &[x, y]);
            }
            for z in 0..size {
                if table[xy][z] != table[x][table[y][z] as usize] {
                    record("associativity", &[x, y, z]);
                }
                if comm[cxy][z] as usize != id {
                    record("class-2", &[x, y, z]);
                }
            }
        }
        fails
    });
    LawReport {
        exhaustive: true,
        triples: (size as u64).pow(3),
        failures: per_x.into_iter().flatten().collect(),
    }
}

fn sampled_laws(g: &NilGroup, exec: Exec, samples: usize, seed: u64) -> LawReport {
    let per_trial: Vec<Vec<LawFailure>> = exec.map_range(samples, |t| {
        let mut rng = trial_rng(seed, t as u64);
        let x = g.random_element(&mut rng);
        let y = g.random_element(&mut rng);
        let z = g.random_element(&mut rng);
        let mut fails = Vec::new();
        let mut check = |ok: bool, law: &'static str, es: &[&GroupElement]| {
            if !ok {
                fails.push(LawFailure {
                    law,
                    elements: es.iter().map(|&e| e.clone()).collect(),
                });
            }
        };
        let id = g.identity();
        let m = |a: &GroupElement, b: &GroupElement| g.mul(a, b).expect("shapes");
        check(
            m(&m(&x, &y), &z) == m(&x, &m(&y, &z)),
            "associativity",
            &[&x, &y, &z],
        );
        check(m(&x, &id) == x && m(&id, &x) == x, "identity", &[&x]);
        check(m(&x, &g.inv(&x).expect("shapes")) == id, "inverse", &[&x]);
        let cxy = g.comm(&x, &y).expect("shapes");
        check(
            g.comm(&cxy, &z).expect("shapes") == id,
            "class-2",
            &[&x, &y, &z],
        );
        let expected = GroupElement::central(
            g.system().eval_beta(&x.v, &y.v).expect("shapes"),
            g.system().dim_v(),
        );
        check(cxy == expected, "commutator", &[&x, &y]);
        let mut acc = id.clone();
        for _ in 0..g.prime().get() {
            acc = m(&acc, &x);
        }
        check(acc == id, "exponent", &[&x]);
        fails
    });
    LawReport {
        exhaustive: false,
        triples: samples as u64,
        failures: per_trial.into_iter().flatten().collect(),
    }
}

/// Re-evaluates one named law of [`check_group_laws`] on the elements of a
/// recorded failure.
pub fn group_law_holds(g: &NilGroup, law: &str, elements: &[GroupElement]) -> Result<bool> {
    let arity = match law {
        "identity" | "inverse" | "exponent" => 1,
        "commutator" => 2,
        "associativity" | "class-2" => 3,
        _ => return Err(Error::InvalidArgument(format!("unknown group law {law:?}"))),
    };
    if elements.len() != arity {
        return Err(Error::InvalidArgument(format!(
            "{law} takes {arity} elements"
        )));
    }
    let id = g.identity();
    let x = &elements[0];
    Ok(match law {
        "identity" => g.mul(x, &id)? == *x && g.mul(&id, x)? == *x,
        "inverse" => g.mul(x, &g.inv(x)?)? == id,
        "exponent" => {
            let mut acc = id.clone();
            for _ in 0..g.prime().get() {
                acc = g.mul(&acc, x)?;
            }
            acc == id
        }
        "commutator" => {
            let y = &elements[1];
            g.comm(x, y)?
                == GroupElement::central(g.system().eval_beta(&x.v, &y.v)?, g.system().dim_v())
        }
        "associativity" => {
            let (y, z) = (&elements[1], &elements[2]);
            g.mul(&g.mul(x, y)?, z)? == g.mul(x, &g.mul(y, z)?)?
        }
        _ => g.comm(&g.comm(x, &elements[1])?, &elements[2])? == id,
    })
}

/// Per-trial generator derived from `(seed, trial)`, independent of
/// scheduling.
pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// An injective homomorphism `(v, w) ↦ (g v, w)` lifting an embedding of
/// the underlying systems.
#[derive(Debug, Clone)]
pub struct GroupHom {
    pub src: NilGroup,
    pub dst: NilGroup,
    pub vmap: Embedding,
}

impl GroupHom {
    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        Ok(GroupElement::new(self.vmap.apply(&x.v)?, x.w.clone()))
    }

    /// Identity, `(e_i, 0)` for every basis index and every `c_j`.
    pub fn generators(&self) -> Vec<GroupElement> {
        let g = &self.src;
        std::iter::once(g.identity())
            .chain((0..g.system().dim_v()).map(|i| g.basis_element(i)))
            .chain((0..g.system().n()).map(|j| g.c(j)))
            .collect()
    }

    /// Number of generator pairs on which the homomorphism law failed.
    pub fn verify_on_generators(&self) -> Result<usize> {
        let gens = self.generators();
        let mut bad = 0;
        for x in &gens {
            for y in &gens {
                let lhs = self.apply(&self.src.mul(x, y)?)?;
                let rhs = self.dst.mul(&self.apply(x)?, &self.apply(y)?)?;
                if lhs != rhs {
                    bad += 1;
                }
            }
        }
        Ok(bad)
    }
}

/// Lifts `gmap: F(G) → F(H)` to the group embedding `(v, w) ↦ (gmap v, w)`,
/// verified on all pairs of generators.
pub fn lift_embedding(gmap: &Embedding, g: &NilGroup, h: &NilGroup) -> Result<GroupHom> {
    if gmap.src != *g.system() || gmap.dst != *h.system() {
        return Err(Error::BadEmbedding(
            "map does not go between the systems of the given groups".into(),
        ));
    }
    if !check_embedding(gmap)? {
        return Err(Error::BadEmbedding(
            "map is not injective or does not preserve beta".into(),
        ));
    }
    let hom = GroupHom {
        src: g.clone(),
        dst: h.clone(),
        vmap: gmap.clone(),
    };
    let bad = hom.verify_on_generators()?;
    if bad > 0 {
        return Err(Error::BadEmbedding(format!(
            "homomorphism law fails on {bad} generator pairs"
        )));
    }
    Ok(hom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alt_system::make_system;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn plane() -> AltSystem {
        make_system(3, 1, 2, &[(0, 1, FVector::from_ints(p3(), &[1]))]).unwrap()
    }

    fn el(v: &[i64], w: &[i64]) -> GroupElement {
        GroupElement::new(FVector::from_ints(p3(), v), FVector::from_ints(p3(), w))
    }

    #[test]
    fn twisted_product() {
        let g = group_from_system(&plane());
        let x = el(&[1, 0], &[0]);
        let y = el(&[0, 1], &[0]);
        // 2⁻¹ = 2 mod 3
        assert_eq!(g.mul(&x, &y).unwrap(), el(&[1, 1], &[2]));
        assert_eq!(g.mul(&x, &g.inv(&x).unwrap()).unwrap(), g.identity());
        assert_eq!(g.mul(&x, &g.identity()).unwrap(), x);
    }

    #[test]
    fn commutator_examples() {
        let g = group_from_system(&plane());
        let x = el(&[1, 0], &[0]);
        let y = el(&[0, 1], &[0]);
        assert_eq!(g.comm(&x, &y).unwrap(), el(&[0, 0], &[1]));
        assert!(g.comm(&x, &x).unwrap().is_identity());
        let prod = g
            .mul(&g.comm(&x, &y).unwrap(), &g.comm(&y, &x).unwrap())
            .unwrap();
        assert!(prod.is_identity());
        // xy and yx differ by exactly (0, β(v_x, v_y))
        let xy = g.mul(&x, &y).unwrap();
        let yx = g.mul(&y, &x).unwrap();
        assert_eq!(xy.v, yx.v);
        assert_eq!(xy.w.sub(&yx.w).unwrap(), FVector::from_ints(p3(), &[1]));
    }

    #[test]
    fn powers() {
        let g = group_from_system(&plane());
        let x = el(&[1, 0], &[1]);
        assert_eq!(g.pow(&x, 2).unwrap(), el(&[2, 0], &[2]));
        assert!(g.pow(&x, 3).unwrap().is_identity());
        assert!(g.pow(&x, 0).unwrap().is_identity());
        assert_eq!(g.pow(&x, -1).unwrap(), g.inv(&x).unwrap());
    }

    #[test]
    fn round_trip() {
        let s = plane();
        let back = system_from_group(&group_from_system(&s));
        assert_eq!(back, s);
    }

    #[test]
    fn shape_errors() {
        let g = group_from_system(&plane());
        let bad = el(&[1, 0, 0], &[0]);
        assert!(matches!(
            g.mul(&bad, &bad),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            g.comm(&bad, &bad),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn classifier_examples() {
        let r = structural_subgroups(&group_from_system(&plane()));
        assert!(r.center_vspan.is_empty());
        assert_eq!(r.derived_pspan.len(), 1);
        assert!(r.sigma1 && r.sigma2 && r.extraspecial && r.in_k_n);

        let z = structural_subgroups(&group_from_system(&AltSystem::zero(p3(), 1, 2).unwrap()));
        assert_eq!(z.center_vspan.len(), 2);
        assert!(z.derived_pspan.is_empty());
        assert!(!z.sigma2 && z.in_k_n);

        let s2 = make_system(3, 2, 2, &[(0, 1, FVector::from_ints(p3(), &[1, 0]))]).unwrap();
        let r2 = structural_subgroups(&group_from_system(&s2));
        assert_eq!(r2.derived_pspan.len(), 1);
        assert!(!r2.sigma2 && !r2.extraspecial);
    }

    #[test]
    fn exhaustive_laws_on_plane() {
        let g = group_from_system(&plane());
        let seq = check_group_laws(&g, Exec::Sequential, 0, 0);
        assert!(seq.exhaustive);
        assert_eq!(seq.triples, 27u64.pow(3));
        assert!(seq.failures.is_empty());
        assert_eq!(check_group_laws(&g, Exec::Parallel, 0, 0), seq);
    }

    #[test]
    fn lift_plane_into_two_planes() {
        let s = plane();
        let t = s.orthogonal_sum(&s).unwrap();
        let gmap = Embedding::prefix_inclusion(&s, &t);
        let hom = lift_embedding(&gmap, &group_from_system(&s), &group_from_system(&t)).unwrap();
        assert_eq!(hom.generators().len().pow(2), 16);
        assert_eq!(hom.verify_on_generators().unwrap(), 0);
        // exhaustively a homomorphism
        for x in hom.src.elements() {
            for y in hom.src.elements() {
                let lhs = hom.apply(&hom.src.mul(&x, &y).unwrap()).unwrap();
                let rhs = hom
                    .dst
                    .mul(&hom.apply(&x).unwrap(), &hom.apply(&y).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn lift_rejects_non_embedding() {
        let s = plane();
        let z = AltSystem::zero(p3(), 1, 2).unwrap();
        let gmap = Embedding::new(z.clone(), s.clone(), Embedding::identity(&s).images);
        assert!(matches!(
            lift_embedding(&gmap, &group_from_system(&z), &group_from_system(&s)),
            Err(Error::BadEmbedding(_))
        ));
    }

    #[test]
    fn identity_lift() {
        let s = plane();
        let g = group_from_system(&s);
        let hom = lift_embedding(&Embedding::identity(&s), &g, &g).unwrap();
        for x in g.elements() {
            assert_eq!(hom.apply(&x).unwrap(), x);
        }
    }

    #[test]
    fn single_law_recheck() {
        let g = group_from_system(&plane());
        let (x, y) = (g.basis_element(0), g.basis_element(1));
        for law in ["identity", "inverse", "exponent"] {
            assert!(group_law_holds(&g, law, std::slice::from_ref(&x)).unwrap());
        }
        assert!(group_law_holds(&g, "commutator", &[x.clone(), y.clone()]).unwrap());
        assert!(group_law_holds(&g, "class-2", &[x.clone(), y.clone(), x.clone()]).unwrap());
        assert!(group_law_holds(&g, "associativity", &[x.clone(), y, x.clone()]).unwrap());
        assert!(group_law_holds(&g, "commutator", std::slice::from_ref(&x)).is_err());
        assert!(group_law_holds(&g, "nope", &[x]).is_err());
    }
}
