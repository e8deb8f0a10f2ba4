use crate::alt_system::{AltSystem, Embedding};
use crate::baer_group::{GroupElement, NilGroup};
use crate::error::{Error, Result};
use crate::fp_linalg::{coordinates_in, pow_count, rref, span_basis, FMatrix, FVector, Prime};

/// `X_a`, `E_a` and the centraliser of `a` inside a subspace `W` of `V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralizerData {
    pub a: GroupElement,
    /// Maximal independent subset of `{β(π(a), w) : w ∈ W}`.
    pub x_a: Vec<FVector>,
    /// `[a, e_a[i]] = x_a[i]`.
    pub e_a: Vec<GroupElement>,
    /// Basis of `{w ∈ W : β(π(a), w) = 0}`.
    pub centralizer_vspan: Vec<FVector>,
}

impl CentralizerData {
    /// `|W : C_W(a)| = p^{|X_a|}`.
    pub fn index(&self) -> u64 {
        pow_count(self.a.v.prime(), self.x_a.len())
    }
}

/// Centraliser data of `a` in the whole group.
pub fn centralizer_data(g: &NilGroup, a: &GroupElement) -> Result<CentralizerData> {
    let dim = g.system().dim_v();
    let all: Vec<FVector> = (0..dim).map(|i| FVector::unit(g.prime(), dim, i)).collect();
    centralizer_within(g.system(), a, &all)
}

/// Basis of `{w ∈ span(within) : β(u, w) = 0 for every u in us}`.
fn common_kernel(sys: &AltSystem, us: &[&FVector], within: &[FVector]) -> Result<Vec<FVector>> {
    let p = sys.prime();
    if within.is_empty() {
        return Ok(Vec::new());
    }
    let mut cols: Vec<FVector> = Vec::with_capacity(within.len());
    for w in within {
        let mut col = FVector::zeros(p, 0);
        for u in us {
            col = col.concat(&sys.eval_beta(u, w)?);
        }
        cols.push(col);
    }
    let m = FMatrix::from_columns(p, us.len() * sys.n(), &cols)?;
    let combos: Vec<FVector> = rref(&m)
        .kernel_basis
        .iter()
        .map(|mu| {
            within
                .iter()
                .zip(mu.coords())
                .fold(FVector::zeros(p, sys.dim_v()), |acc, (w, &c)| {
                    acc.add(&w.scale(c)).expect("same length")
                })
        })
        .collect();
    span_basis(&combos)
}

fn centralizer_within(
    sys: &AltSystem,
    a: &GroupElement,
    within: &[FVector],
) -> Result<CentralizerData> {
    let mut x_a: Vec<FVector> = Vec::new();
    let mut e_a = Vec::new();
    for w in within {
        let img = sys.eval_beta(&a.v, w)?;
        let mut cand = x_a.clone();
        cand.push(img.clone());
        if crate::fp_linalg::rank_of(&cand)? == cand.len() {
            x_a.push(img);
            e_a.push(GroupElement::lift(w.clone(), sys.n()));
        }
    }
    Ok(CentralizerData {
        a: a.clone(),
        x_a,
        e_a,
        centralizer_vspan: common_kernel(sys, &[&a.v], within)?,
    })
}

/// Pairs `(d_i, e_i)` with `[d_i, e_i] = c` for one `c`, and trivial
/// commutators across pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct D1Chain {
    pub pairs: Vec<(GroupElement, GroupElement)>,
    pub c: FVector,
    /// Centraliser data of every pair's first element in the subspace it
    /// was chosen from, in selection order (including pairs later dropped
    /// by the direction selection).
    pub steps: Vec<CentralizerData>,
}

impl D1Chain {
    /// The central product of `k` planes with `β(x_{2i}, x_{2i+1}) = c`.
    pub fn standard_system(&self) -> Result<AltSystem> {
        let p = self.c.prime();
        let k = self.pairs.len();
        let mut s = AltSystem::zero(p, self.c.len(), 2 * k)?;
        for i in 0..k {
            s.set_entry(2 * i, 2 * i + 1, self.c.coords());
        }
        Ok(s)
    }

    /// The map from [`D1Chain::standard_system`] into `g` sending the
    /// standard pairs to the chain.
    pub fn comparison_embedding(&self, g: &NilGroup) -> Result<Embedding> {
        let images = self
            .pairs
            .iter()
            .flat_map(|(d, e)| [d.v.clone(), e.v.clone()])
            .collect();
        Ok(Embedding::new(
            self.standard_system()?,
            g.system().clone(),
            images,
        ))
    }
}

/// `c` scaled so that its first nonzero coordinate is 1, and that scalar's
/// inverse.
fn canonical(p: Prime, c: &FVector) -> (FVector, u32) {
    let lead = c
        .coords()
        .iter()
        .copied()
        .find(|&x| x != 0)
        .expect("nonzero commutator");
    let s = p.inv(lead);
    (c.scale(s), s)
}

/// Number of projective points of `P = F_p^n`.
pub fn projective_points(p: Prime, n: usize) -> u64 {
    (pow_count(p, n) - 1) / (p.get() as u64 - 1)
}

/// A copy of `D(1)`'s first `k` planes inside `g`: pairs are chosen one at
/// a time, each inside the common centraliser of everything chosen before,
/// then a direction of `P` shared by `k` of them is kept.
pub fn extract_d1_chain(g: &NilGroup, k: usize) -> Result<D1Chain> {
    let sys = g.system();
    let p = sys.prime();
    let dim = sys.dim_v();
    let rank = dim - sys.radical().len();
    if rank == 0 {
        return Err(Error::NotApplicable("the group is abelian modulo P".into()));
    }
    let guard = 2 * k as u64 * projective_points(p, sys.n());
    if (rank as u64) < guard {
        return Err(Error::TooSmall(format!(
            "rank of beta is {rank}, at least {guard} is needed for a chain of length {k}"
        )));
    }
    let mut w: Vec<FVector> = (0..dim).map(|i| FVector::unit(p, dim, i)).collect();
    let mut found: Vec<(GroupElement, GroupElement, FVector)> = Vec::new();
    let mut steps = Vec::new();
    let mut c_first: Option<FVector> = None;
    let best = |found: &[(GroupElement, GroupElement, FVector)]| -> (usize, Option<FVector>) {
        let mut best = (0, None);
        for (_, _, c) in found {
            let cnt = found.iter().filter(|(_, _, x)| x == c).count();
            if cnt > best.0 {
                best = (cnt, Some(c.clone()));
            }
        }
        best
    };
    while best(&found).0 < k {
        let mut pick = None;
        for x in &w {
            let data = centralizer_within(sys, &GroupElement::lift(x.clone(), sys.n()), &w)?;
            if !data.x_a.is_empty() {
                pick = Some(data);
                break;
            }
        }
        let Some(data) = pick else { break };
        let e = match c_first
            .as_ref()
            .map(|c| coordinates_in(&data.x_a, c))
            .transpose()?
            .flatten()
        {
            // a partner whose commutator is exactly the first direction
            Some(coef) => {
                let v = data
                    .e_a
                    .iter()
                    .zip(coef.coords())
                    .fold(FVector::zeros(p, dim), |acc, (e, &s)| {
                        acc.add(&e.v.scale(s)).expect("same length")
                    });
                GroupElement::lift(v, sys.n())
            }
            None => {
                let (_, s) = canonical(p, &data.x_a[0]);
                GroupElement::lift(data.e_a[0].v.scale(s), sys.n())
            }
        };
        let a = data.a.clone();
        let comm = g.comm(&a, &e)?.w;
        c_first.get_or_insert_with(|| comm.clone());
        w = common_kernel(sys, &[&a.v, &e.v], &w)?;
        steps.push(data);
        found.push((a, e, comm));
    }
    let (count, c) = best(&found);
    let Some(c) = c.filter(|_| count >= k) else {
        return Err(Error::TooSmall(format!(
            "only {count} pairs share a commutator direction, {k} requested"
        )));
    };
    let pairs = found
        .into_iter()
        .filter(|(_, _, x)| *x == c)
        .map(|(a, e, _)| (a, e))
        .collect();
    Ok(D1Chain { pairs, c, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alt_system::check_embedding;
    use crate::baer_group::group_from_system;
    use crate::model_theory::ip::central_product_of_planes;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn check_chain(g: &NilGroup, ch: &D1Chain) {
        for (i, (d, e)) in ch.pairs.iter().enumerate() {
            assert_eq!(g.comm(d, e).unwrap().w, ch.c);
            for (j, (d2, e2)) in ch.pairs.iter().enumerate() {
                if i != j {
                    for (x, y) in [(d, d2), (d, e2), (e, e2)] {
                        assert!(g.comm(x, y).unwrap().is_identity());
                    }
                }
            }
        }
        assert!(check_embedding(&ch.comparison_embedding(g).unwrap()).unwrap());
    }

    #[test]
    fn central_product_of_planes_yields_chain() {
        // guard for n = 1 is 2k, met exactly by two planes
        let g = group_from_system(&central_product_of_planes(p3(), 2).unwrap());
        let ch = extract_d1_chain(&g, 2).unwrap();
        assert_eq!(ch.pairs.len(), 2);
        check_chain(&g, &ch);
        for s in &ch.steps {
            assert_eq!(s.index(), 3);
        }
    }

    #[test]
    fn abelian_and_small() {
        let g = group_from_system(&AltSystem::zero(p3(), 1, 4).unwrap());
        assert!(matches!(
            extract_d1_chain(&g, 2),
            Err(Error::NotApplicable(_))
        ));
        let g = group_from_system(&central_product_of_planes(p3(), 1).unwrap());
        assert!(matches!(extract_d1_chain(&g, 2), Err(Error::TooSmall(_))));
    }

    #[test]
    fn pigeonhole_over_directions() {
        // planes with values c1, c1, c2 and padding to meet the guard
        let p = p3();
        let dirs = [
            [1, 0],
            [1, 0],
            [0, 1],
            [1, 1],
            [1, 2],
            [0, 1],
            [1, 1],
            [1, 2],
        ];
        let mut s = AltSystem::zero(p, 2, 16).unwrap();
        for (i, c) in dirs.iter().enumerate() {
            s.set_entry(2 * i, 2 * i + 1, &[c[0], c[1]]);
        }
        let g = group_from_system(&s);
        let ch = extract_d1_chain(&g, 2).unwrap();
        assert_eq!(ch.c, FVector::from_ints(p, &[1, 0]));
        check_chain(&g, &ch);
    }

    #[test]
    fn centralizer_index_bound() {
        let p = p3();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(4);
        let g = group_from_system(&AltSystem::random(p, 2, 6, &mut rng).unwrap());
        for i in 0..6 {
            let data = centralizer_data(&g, &g.basis_element(i)).unwrap();
            assert!(data.x_a.len() <= 2);
            assert_eq!(data.centralizer_vspan.len(), 6 - data.x_a.len());
            for (x, e) in data.x_a.iter().zip(&data.e_a) {
                assert_eq!(g.comm(&data.a, e).unwrap().w, *x);
            }
        }
    }
}
