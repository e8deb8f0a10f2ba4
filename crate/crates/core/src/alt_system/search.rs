//! Backtracking search for embeddings `(g, id)` between alternating systems.
//!
//! Source basis vectors are assigned in ascending index order. For the next
//! index `s`, the compatibility conditions `β_dst(x, g e_t) = β_src(e_s, e_t)`
//! against every already assigned `t` are linear in `x`, so the candidate
//! images form an affine subspace. It is parametrised by a particular
//! solution plus a kernel basis and enumerated in lexicographic order of the
//! parameters; candidates dependent on earlier images are skipped.

use std::ops::ControlFlow;

use rand::Rng;

use crate::error::{dim_mismatch, Error, Result};
use crate::exec::Exec;
use crate::fp_linalg::{axpy_raw, kernel_from_rref, pow_count, rref_raw, Echelon, FVector, Prime};

use super::{AltSystem, Embedding};

struct Search<'a> {
    src: &'a AltSystem,
    dst: &'a AltSystem,
    /// Allowed span for each source index; `None` means all of `V_dst`.
    domains: Vec<Option<Vec<Vec<u32>>>>,
    /// Unassigned source indices, ascending.
    order: Vec<usize>,
}

#[derive(Clone)]
struct State {
    images: Vec<Option<Vec<u32>>>,
    against: Vec<Option<Vec<Vec<u32>>>>,
    ech: Echelon,
}

impl State {
    fn assign(&mut self, dst: &AltSystem, s: usize, x: Vec<u32>) {
        self.ech.insert(&x);
        self.against[s] = Some(dst.against_raw(&x));
        self.images[s] = Some(x);
    }
}

/// `base + Σ μ_i dirs_i` over `μ ∈ F_p^k`, in lexicographic order of `μ`.
struct CandidateSpace {
    p: Prime,
    base: Vec<u32>,
    dirs: Vec<Vec<u32>>,
}

impl CandidateSpace {
    fn count(&self) -> u64 {
        pow_count(self.p, self.dirs.len())
    }

    fn nth(&self, mut idx: u64) -> Vec<u32> {
        let q = self.p.get() as u64;
        let mut x = self.base.clone();
        for d in self.dirs.iter().rev() {
            let mu = (idx % q) as u32;
            idx /= q;
            axpy_raw(self.p, &mut x, mu, d);
        }
        x
    }
}

impl<'a> Search<'a> {
    fn new(
        src: &'a AltSystem,
        dst: &'a AltSystem,
        partial: &[(usize, FVector)],
        domains: Vec<Option<Vec<Vec<u32>>>>,
    ) -> Result<(Self, State)> {
        if src.prime() != dst.prime() || src.n() != dst.n() {
            return Err(dim_mismatch("search between systems over different P"));
        }
        let mut state = State {
            images: vec![None; src.dim_v()],
            against: vec![None; src.dim_v()],
            ech: Echelon::new(dst.prime(), dst.dim_v()),
        };
        for (s, x) in partial {
            if *s >= src.dim_v() {
                return Err(Error::BadPartial(format!("source index {s} out of range")));
            }
            if x.len() != dst.dim_v() || x.prime() != dst.prime() {
                return Err(dim_mismatch(format!(
                    "partial image of length {} in a target of dimension {}",
                    x.len(),
                    dst.dim_v()
                )));
            }
            if state.images[*s].is_some() {
                return Err(Error::BadPartial(format!("index {s} assigned twice")));
            }
            if state.ech.contains(x.coords()) {
                return Err(Error::BadPartial(format!(
                    "image of index {s} is linearly dependent on earlier images"
                )));
            }
            for (t, img) in state.images.iter().enumerate() {
                if let Some(img) = img {
                    if dst.beta_raw(x.coords(), img) != src.entry_raw(*s, t) {
                        return Err(Error::BadPartial(format!(
                            "images of {s} and {t} do not preserve beta"
                        )));
                    }
                }
            }
            state.assign(dst, *s, x.coords().to_vec());
        }
        let order = (0..src.dim_v())
            .filter(|&s| state.images[s].is_none())
            .collect();
        Ok((
            Search {
                src,
                dst,
                domains,
                order,
            },
            state,
        ))
    }

    fn candidates(&self, s: usize, state: &State) -> Option<CandidateSpace> {
        let p = self.dst.prime();
        let n = self.dst.n();
        let d = self.dst.dim_v();
        let std_domain;
        let domain: &[Vec<u32>] = match &self.domains[s] {
            Some(dom) => dom,
            None => {
                std_domain = (0..d)
                    .map(|i| {
                        let mut e = vec![0; d];
                        e[i] = 1;
                        e
                    })
                    .collect::<Vec<_>>();
                &std_domain
            }
        };
        let m = domain.len();
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for (t, against) in state.against.iter().enumerate() {
            let Some(against) = against else { continue };
            let target = self.src.entry_raw(s, t);
            // coefficient of c_j in β(x, img_t) where x = Σ c_j dom_j
            let coefs: Vec<Vec<u32>> = domain
                .iter()
                .map(|dom| {
                    let mut acc = vec![0u32; n];
                    for (k, &dk) in dom.iter().enumerate() {
                        axpy_raw(p, &mut acc, dk, &against[k]);
                    }
                    acc
                })
                .collect();
            for l in 0..n {
                let mut row: Vec<u32> = coefs.iter().map(|c| c[l]).collect();
                row.push(target[l]);
                rows.push(row);
            }
        }
        let pivots = rref_raw(p, &mut rows, m + 1);
        if pivots.last() == Some(&m) {
            return None;
        }
        let mut c0 = vec![0u32; m];
        for (r, &col) in pivots.iter().enumerate() {
            c0[col] = rows[r][m];
        }
        let kernel = kernel_from_rref(p, &rows, &pivots, m);
        let combine = |c: &[u32]| {
            let mut x = vec![0u32; d];
            for (cj, dom) in c.iter().zip(domain) {
                axpy_raw(p, &mut x, *cj, dom);
            }
            x
        };
        Some(CandidateSpace {
            p,
            base: combine(&c0),
            dirs: kernel.iter().map(|k| combine(k)).collect(),
        })
    }

    fn dfs(
        &self,
        state: &mut State,
        level: usize,
        visit: &mut dyn FnMut(&State) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if level == self.order.len() {
            return visit(state);
        }
        let s = self.order[level];
        let Some(space) = self.candidates(s, state) else {
            return ControlFlow::Continue(());
        };
        for idx in 0..space.count() {
            let x = space.nth(idx);
            if state.ech.contains(&x) {
                continue;
            }
            let saved = state.clone();
            state.assign(self.dst, s, x);
            let flow = self.dfs(state, level + 1, visit);
            *state = saved;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn first_from(&self, state: &mut State, level: usize) -> Option<Vec<Vec<u32>>> {
        let mut found = None;
        let _ = self.dfs(state, level, &mut |st| {
            found = Some(collect_images(st));
            ControlFlow::Break(())
        });
        found
    }

    fn first(&self, exec: Exec, state: State) -> Option<Vec<Vec<u32>>> {
        if !exec.is_parallel() || self.order.is_empty() {
            let mut st = state;
            return self.first_from(&mut st, 0);
        }
        let s = self.order[0];
        let space = self.candidates(s, &state)?;
        let count = usize::try_from(space.count()).unwrap_or(usize::MAX);
        exec.find_first(count, |idx| {
            let x = space.nth(idx as u64);
            if state.ech.contains(&x) {
                return None;
            }
            let mut st = state.clone();
            st.assign(self.dst, s, x);
            self.first_from(&mut st, 1)
        })
    }

    fn sample<R: Rng + ?Sized>(&self, state: &State, rng: &mut R) -> Option<Vec<Vec<u32>>> {
        const TRIES_PER_LEVEL: usize = 16;
        let mut st = state.clone();
        for &s in &self.order {
            let space = self.candidates(s, &st)?;
            let count = space.count();
            let pick = (0..TRIES_PER_LEVEL)
                .map(|_| space.nth(rng.gen_range(0..count)))
                .find(|x| !st.ech.contains(x))?;
            st.assign(self.dst, s, pick);
        }
        Some(collect_images(&st))
    }
}

fn collect_images(st: &State) -> Vec<Vec<u32>> {
    st.images
        .iter()
        .map(|x| x.clone().expect("complete assignment"))
        .collect()
}

fn to_vectors(p: Prime, raw: Vec<Vec<u32>>) -> Vec<FVector> {
    raw.into_iter().map(|x| FVector::from_raw(p, x)).collect()
}

/// First embedding (in the deterministic search order) of `src` into `dst`
/// extending `partial`, or `None` if there is none.
pub fn search_embedding(
    src: &AltSystem,
    dst: &AltSystem,
    partial: &[(usize, FVector)],
) -> Result<Option<Embedding>> {
    search_embedding_with(Exec::default(), src, dst, partial)
}

/// As [`search_embedding`]; with [`Exec::Parallel`] the top-level
/// candidates are explored concurrently and the same embedding is returned.
pub fn search_embedding_with(
    exec: Exec,
    src: &AltSystem,
    dst: &AltSystem,
    partial: &[(usize, FVector)],
) -> Result<Option<Embedding>> {
    let (search, state) = Search::new(src, dst, partial, vec![None; src.dim_v()])?;
    Ok(search
        .first(exec, state)
        .map(|imgs| Embedding::new(src.clone(), dst.clone(), to_vectors(dst.prime(), imgs))))
}

/// Visits every embedding extending `partial`, in search order, until the
/// visitor breaks.
pub fn for_each_embedding<F>(
    src: &AltSystem,
    dst: &AltSystem,
    partial: &[(usize, FVector)],
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[FVector]) -> ControlFlow<()>,
{
    let (search, mut state) = Search::new(src, dst, partial, vec![None; src.dim_v()])?;
    let p = dst.prime();
    let _ = search.dfs(&mut state, 0, &mut |st| {
        let imgs = to_vectors(p, collect_images(st));
        visit(&imgs)
    });
    Ok(())
}

/// Number of embeddings extending `partial`, counting stops at `limit`.
pub fn count_embeddings(
    src: &AltSystem,
    dst: &AltSystem,
    partial: &[(usize, FVector)],
    limit: u64,
) -> Result<u64> {
    let (search, mut state) = Search::new(src, dst, partial, vec![None; src.dim_v()])?;
    let mut count = 0u64;
    let _ = search.dfs(&mut state, 0, &mut |_| {
        count += 1;
        if count >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(count)
}

/// A random embedding extending `partial`, built by picking a random
/// admissible image level by level. Gives up after `attempts` dead ends.
pub fn sample_embedding<R: Rng + ?Sized>(
    src: &AltSystem,
    dst: &AltSystem,
    partial: &[(usize, FVector)],
    rng: &mut R,
    attempts: usize,
) -> Result<Option<Vec<FVector>>> {
    let (search, state) = Search::new(src, dst, partial, vec![None; src.dim_v()])?;
    Ok((0..attempts)
        .find_map(|_| search.sample(&state, rng))
        .map(|imgs| to_vectors(dst.prime(), imgs)))
}

/// Embedding search in which source index `i` must map into
/// `span(domains[i])` whenever that entry is `Some`.
pub fn search_with_domains(
    src: &AltSystem,
    dst: &AltSystem,
    domains: &[Option<Vec<FVector>>],
) -> Result<Option<Vec<FVector>>> {
    if domains.len() != src.dim_v() {
        return Err(dim_mismatch("one domain per source index is required"));
    }
    let raw = domains
        .iter()
        .map(|d| {
            d.as_ref()
                .map(|vs| vs.iter().map(|v| v.coords().to_vec()).collect())
        })
        .collect();
    let (search, state) = Search::new(src, dst, &[], raw)?;
    Ok(search
        .first(Exec::Sequential, state)
        .map(|imgs| to_vectors(dst.prime(), imgs)))
}

/// Isomorphism in `𝔹(n)`: an embedding between systems of equal dimension.
pub fn is_isomorphic(a: &AltSystem, b: &AltSystem) -> bool {
    a.prime() == b.prime()
        && a.n() == b.n()
        && a.dim_v() == b.dim_v()
        && a.radical().len() == b.radical().len()
        && a.derived_span() == b.derived_span()
        && matches!(
            search_embedding_with(Exec::Sequential, a, b, &[]),
            Ok(Some(_))
        )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alt_system::{check_embedding, make_system};
    use crate::fp_linalg::all_vectors;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn plane() -> AltSystem {
        make_system(3, 1, 2, &[(0, 1, FVector::from_ints(p3(), &[1]))]).unwrap()
    }

    #[test]
    fn trivial_source() {
        let src = AltSystem::trivial(p3(), 1).unwrap();
        let f = search_embedding(&src, &plane(), &[]).unwrap().unwrap();
        assert!(f.images.is_empty());
    }

    #[test]
    fn plane_into_two_planes() {
        let dst = plane().orthogonal_sum(&plane()).unwrap();
        let f = search_embedding(&plane(), &dst, &[]).unwrap().unwrap();
        assert!(check_embedding(&f).unwrap());
        let par = search_embedding_with(Exec::Parallel, &plane(), &dst, &[]).unwrap();
        let seq = search_embedding_with(Exec::Sequential, &plane(), &dst, &[]).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn plane_into_zero_plane_absent() {
        let dst = AltSystem::zero(p3(), 1, 2).unwrap();
        assert!(search_embedding(&plane(), &dst, &[]).unwrap().is_none());
    }

    #[test]
    fn bad_partial_rejected() {
        let dst = plane().orthogonal_sum(&plane()).unwrap();
        let e0 = FVector::unit(p3(), 4, 0);
        let e2 = FVector::unit(p3(), 4, 2);
        // β(e0, e2) = 0 in dst but the source pair has β = c.
        assert!(matches!(
            search_embedding(&plane(), &dst, &[(0, e0.clone()), (1, e2)]),
            Err(Error::BadPartial(_))
        ));
        assert!(matches!(
            search_embedding(&plane(), &dst, &[(0, e0.clone()), (0, e0)]),
            Err(Error::BadPartial(_))
        ));
    }

    #[test]
    fn partial_is_respected() {
        let dst = plane().orthogonal_sum(&plane()).unwrap();
        let e2 = FVector::unit(p3(), 4, 2);
        let f = search_embedding(&plane(), &dst, &[(0, e2.clone())])
            .unwrap()
            .unwrap();
        assert_eq!(f.images[0], e2);
        assert!(check_embedding(&f).unwrap());
    }

    #[test]
    fn counting_matches_enumeration() {
        // Embeddings of a line into the plane: every nonzero vector.
        let line = AltSystem::zero(p3(), 1, 1).unwrap();
        assert_eq!(count_embeddings(&line, &plane(), &[], u64::MAX).unwrap(), 8);
        // Automorphisms of the symplectic plane over fixed P: SL(2, 3).
        assert_eq!(
            count_embeddings(&plane(), &plane(), &[], u64::MAX).unwrap(),
            24
        );
        let mut seen = 0;
        for_each_embedding(&plane(), &plane(), &[], |imgs| {
            let f = Embedding::new(plane(), plane(), imgs.to_vec());
            assert!(check_embedding(&f).unwrap());
            seen += 1;
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(seen, 24);
    }

    #[test]
    fn first_line_image_is_lexicographically_smallest() {
        let line = AltSystem::zero(p3(), 1, 1).unwrap();
        let f = search_embedding(&line, &plane(), &[]).unwrap().unwrap();
        let smallest = all_vectors(p3(), 2).find(|v| !v.is_zero()).unwrap();
        assert_eq!(f.images[0], smallest);
    }

    #[test]
    fn domains_restrict_images() {
        let dst = plane().orthogonal_sum(&plane()).unwrap();
        let dom = Some(vec![FVector::unit(p3(), 4, 2), FVector::unit(p3(), 4, 3)]);
        let imgs = search_with_domains(&plane(), &dst, &[dom.clone(), dom])
            .unwrap()
            .unwrap();
        for v in &imgs {
            assert_eq!(v.get(0), 0);
            assert_eq!(v.get(1), 0);
        }
    }

    #[test]
    fn sampling_yields_embeddings() {
        let dst = plane().orthogonal_sum(&plane()).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        for _ in 0..20 {
            let imgs = sample_embedding(&plane(), &dst, &[], &mut rng, 50)
                .unwrap()
                .unwrap();
            assert!(check_embedding(&Embedding::new(plane(), dst.clone(), imgs)).unwrap());
        }
    }
}
