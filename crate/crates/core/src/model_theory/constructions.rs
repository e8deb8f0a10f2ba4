use crate::alt_system::{search_embedding_with, AltSystem, Embedding};
use crate::baer_group::GroupElement;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fp_linalg::{coordinates_in, extend_to_complement, rank_of, span_basis, FVector};
use crate::fraisse::qf_type_code;

use super::indep::{check_element, indep0_raw, vparts};

/// A system grown by fresh generators, the witnesses living in it, and the
/// inclusion of the old system as a prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub sys: AltSystem,
    pub witnesses: Vec<GroupElement>,
    pub emb: Embedding,
}

/// Indices `J` of `xs` whose `V`-parts are independent over `span(base)`,
/// chosen greedily in order.
fn pivots_over(xs: &[GroupElement], base: &[FVector]) -> Result<Vec<usize>> {
    let mut acc: Vec<FVector> = base.to_vec();
    let mut out = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        acc.push(x.v.clone());
        if rank_of(&acc)? == acc.len() {
            out.push(i);
        } else {
            acc.pop();
        }
    }
    Ok(out)
}

/// Adjoins one fresh vector `f_j` per entry of `functionals`. Each entry
/// prescribes `β(f_j, frame_l)` for an independent `frame`; `β(f_j, ·)`
/// vanishes on the standard complement of the frame. `inner[j][j']` is
/// `β(f_j, f_j')`.
fn adjoin(
    d: &AltSystem,
    frame: &[FVector],
    functionals: &[Vec<FVector>],
    inner: &[Vec<FVector>],
) -> Result<AltSystem> {
    let p = d.prime();
    let n = d.n();
    let dim = d.dim_v();
    let k = functionals.len();
    let mut basis = frame.to_vec();
    basis.extend(extend_to_complement(p, frame, dim)?);
    let zero = FVector::zeros(p, n);
    let mut out = AltSystem::zero(p, n, dim + k)?;
    for i in 0..dim {
        for j in i + 1..dim {
            out.set_entry(i, j, d.upper_raw(i, j));
        }
    }
    for i in 0..dim {
        let coef = coordinates_in(&basis, &FVector::unit(p, dim, i))?.expect("basis of V");
        for (j, vals) in functionals.iter().enumerate() {
            // β(e_i, f_j) = -β(f_j, e_i)
            let w = vals
                .iter()
                .zip(coef.coords())
                .fold(zero.clone(), |acc, (v, &c)| {
                    acc.add(&v.scale(c)).expect("uniform P")
                });
            out.set_entry(i, dim + j, w.neg().coords());
        }
    }
    for (j, row) in inner.iter().enumerate() {
        for (l, w) in row.iter().enumerate().skip(j + 1) {
            out.set_entry(dim + j, dim + l, w.coords());
        }
    }
    Ok(out)
}

/// Witnesses `d_i` in the enlarged system: pivots become the fresh vectors,
/// the others keep their expression over the pivots and `base`.
fn place(
    d: &AltSystem,
    big: &AltSystem,
    xs: &[GroupElement],
    pivots: &[usize],
    base: &[FVector],
) -> Result<Vec<GroupElement>> {
    let p = d.prime();
    let dim = d.dim_v();
    let mut frame: Vec<FVector> = pivots.iter().map(|&j| xs[j].v.clone()).collect();
    frame.extend(base.iter().cloned());
    xs.iter()
        .map(|x| {
            let coef = if frame.is_empty() {
                FVector::zeros(p, 0)
            } else {
                coordinates_in(&frame, &x.v)?
                    .ok_or_else(|| Error::InvalidArgument("tuple not spanned".into()))?
            };
            let mut v = vec![0i64; big.dim_v()];
            for (l, &c) in coef.coords().iter().enumerate() {
                if l < pivots.len() {
                    v[dim + l] += c as i64;
                } else {
                    for (t, &b) in base[l - pivots.len()].coords().iter().enumerate() {
                        v[t] += c as i64 * b as i64;
                    }
                }
            }
            Ok(GroupElement::new(FVector::from_ints(p, &v), x.w.clone()))
        })
        .collect()
}

fn gram_block(d: &AltSystem, xs: &[&FVector], ys: &[FVector]) -> Result<Vec<Vec<FVector>>> {
    xs.iter()
        .map(|x| ys.iter().map(|y| d.eval_beta(x, y)).collect())
        .collect()
}

fn lift_all(sys: &AltSystem, xs: &[GroupElement], dim: usize) -> Vec<GroupElement> {
    let p = sys.prime();
    xs.iter()
        .map(|x| GroupElement::new(x.v.concat(&FVector::zeros(p, dim - x.v.len())), x.w.clone()))
        .collect()
}

/// A realisation `d̄` of `tp(ā/B)` with `d̄ ⫝⁰_B A`, adjoined to `D` as
/// fresh vectors.
pub fn existence_extend(
    d: &AltSystem,
    abar: &[GroupElement],
    b: &[GroupElement],
    a: &[GroupElement],
) -> Result<Extension> {
    for x in abar.iter().chain(b).chain(a) {
        check_element(d, x)?;
    }
    let xb = span_basis(&vparts([b]))?;
    let va = vparts([a]);
    if xb
        .iter()
        .any(|x| !crate::fp_linalg::in_span(&va, x).unwrap_or(false))
    {
        return Err(Error::BadBase(
            "span of B is not contained in span of A".into(),
        ));
    }
    // basis of span π(A) over X_B
    let mut xa = Vec::new();
    let mut acc = xb.clone();
    for v in &va {
        acc.push(v.clone());
        if rank_of(&acc)? == acc.len() {
            xa.push(v.clone());
        } else {
            acc.pop();
        }
    }
    let pivots = pivots_over(abar, &xb)?;
    let pv: Vec<&FVector> = pivots.iter().map(|&j| &abar[j].v).collect();
    let mut frame = xb.clone();
    frame.extend(xa.iter().cloned());
    let zero = FVector::zeros(d.prime(), d.n());
    let functionals: Vec<Vec<FVector>> = gram_block(d, &pv, &xb)?
        .into_iter()
        .map(|mut row| {
            row.extend(std::iter::repeat_n(zero.clone(), xa.len()));
            row
        })
        .collect();
    let pvv: Vec<FVector> = pv.iter().map(|v| (*v).clone()).collect();
    let inner = gram_block(d, &pv, &pvv)?;
    let big = adjoin(d, &frame, &functionals, &inner)?;
    let witnesses = place(d, &big, abar, &pivots, &xb)?;
    Ok(Extension {
        emb: Embedding::prefix_inclusion(d, &big),
        sys: big,
        witnesses,
    })
}

/// Independence over a model: a tuple `ē` realising `tp(ā⁰/M b̄⁰)` and
/// `tp(ā¹/M b̄¹)` at once, with `ē ⫝⁰_M b̄⁰ b̄¹`.
pub fn independence_amalgam(
    d: &AltSystem,
    m: &[GroupElement],
    a0: &[GroupElement],
    a1: &[GroupElement],
    b0: &[GroupElement],
    b1: &[GroupElement],
) -> Result<Extension> {
    for x in m.iter().chain(a0).chain(a1).chain(b0).chain(b1) {
        check_element(d, x)?;
    }
    let over_m = |xs: &[GroupElement]| {
        let mut t = xs.to_vec();
        t.extend_from_slice(m);
        qf_type_code(d, &t)
    };
    if a0.len() != a1.len() || over_m(a0)? != over_m(a1)? {
        return Err(Error::PreconditionFailed(
            "a0 and a1 have different quantifier-free types over M".into(),
        ));
    }
    if !indep0_raw(b0, m, b1) {
        return Err(Error::PreconditionFailed(
            "b0 is not independent from b1 over M".into(),
        ));
    }
    if !indep0_raw(a0, m, b0) {
        return Err(Error::PreconditionFailed(
            "a0 is not independent from b0 over M".into(),
        ));
    }
    if !indep0_raw(a1, m, b1) {
        return Err(Error::PreconditionFailed(
            "a1 is not independent from b1 over M".into(),
        ));
    }
    let xm = span_basis(&vparts([m]))?;
    // b̄⁰ b̄¹ made linearly independent over M: keep a basis of each side
    let sel0: Vec<FVector> = pivots_over(b0, &xm)?
        .into_iter()
        .map(|j| b0[j].v.clone())
        .collect();
    let mut base01 = xm.clone();
    base01.extend(sel0.iter().cloned());
    let sel1: Vec<FVector> = pivots_over(b1, &base01)?
        .into_iter()
        .map(|j| b1[j].v.clone())
        .collect();

    let pivots = pivots_over(a0, &xm)?;
    let p0: Vec<&FVector> = pivots.iter().map(|&j| &a0[j].v).collect();
    let p1: Vec<&FVector> = pivots.iter().map(|&j| &a1[j].v).collect();
    let on_m = gram_block(d, &p0, &xm)?;
    let on_b0 = gram_block(d, &p0, &sel0)?;
    let on_b1 = gram_block(d, &p1, &sel1)?;
    let functionals: Vec<Vec<FVector>> = (0..pivots.len())
        .map(|j| {
            let mut row = on_m[j].clone();
            row.extend(on_b0[j].iter().cloned());
            row.extend(on_b1[j].iter().cloned());
            row
        })
        .collect();
    let mut frame = xm.clone();
    frame.extend(sel0);
    frame.extend(sel1);
    let p0v: Vec<FVector> = p0.iter().map(|v| (*v).clone()).collect();
    let inner = gram_block(d, &p0, &p0v)?;
    let big = adjoin(d, &frame, &functionals, &inner)?;
    let witnesses = place(d, &big, a0, &pivots, &xm)?;
    Ok(Extension {
        emb: Embedding::prefix_inclusion(d, &big),
        sys: big,
        witnesses,
    })
}

/// Relocates witnesses of an extension of `host.prefix(k)` into `host`
/// itself, by an embedding of the extension fixing the first `k`
/// coordinates.
pub fn relocate(ext: &Extension, host: &AltSystem) -> Result<Option<Vec<GroupElement>>> {
    let k = ext.emb.src.dim_v();
    if host.dim_v() < k || host.prefix(k) != ext.emb.src {
        return Err(Error::InvalidArgument(
            "the extended system is not a prefix of the host".into(),
        ));
    }
    let p = host.prime();
    let partial: Vec<(usize, FVector)> = (0..k)
        .map(|i| (i, FVector::unit(p, host.dim_v(), i)))
        .collect();
    let Some(f) = search_embedding_with(Exec::default(), &ext.sys, host, &partial)? else {
        return Ok(None);
    };
    ext.witnesses
        .iter()
        .map(|x| Ok(GroupElement::new(f.apply(&x.v)?, x.w.clone())))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// Elements of `xs` padded with zeros to live in a larger system.
pub fn pad_elements(big: &AltSystem, xs: &[GroupElement]) -> Vec<GroupElement> {
    lift_all(big, xs, big.dim_v())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alt_system::check_embedding;
    use crate::fp_linalg::Prime;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn el(v: &[i64], w: &[i64]) -> GroupElement {
        GroupElement::new(FVector::from_ints(p3(), v), FVector::from_ints(p3(), w))
    }

    fn two_planes() -> AltSystem {
        let plane = AltSystem::plane(p3(), &FVector::from_ints(p3(), &[1])).unwrap();
        plane.orthogonal_sum(&plane).unwrap()
    }

    fn same_type_over(
        d: &AltSystem,
        x: &[GroupElement],
        big: &AltSystem,
        y: &[GroupElement],
        base: &[GroupElement],
    ) -> bool {
        let mut tx = x.to_vec();
        tx.extend_from_slice(base);
        let mut ty = y.to_vec();
        ty.extend(pad_elements(big, base));
        qf_type_code(d, &tx).unwrap() == qf_type_code(big, &ty).unwrap()
    }

    #[test]
    fn singleton_over_empty_base() {
        let d = two_planes();
        let abar = [el(&[1, 0, 0, 0], &[1])];
        let a = [el(&[0, 1, 0, 0], &[0]), el(&[0, 0, 1, 0], &[0])];
        let ext = existence_extend(&d, &abar, &[], &a).unwrap();
        assert_eq!(ext.sys.dim_v(), 5);
        assert!(check_embedding(&ext.emb).unwrap());
        let dbar = &ext.witnesses;
        for x in pad_elements(&ext.sys, &a) {
            assert!(ext.sys.eval_beta(&dbar[0].v, &x.v).unwrap().is_zero());
        }
        assert!(same_type_over(&d, &abar, &ext.sys, dbar, &[]));
        assert!(indep0_raw(dbar, &[], &pad_elements(&ext.sys, &a)));
    }

    #[test]
    fn hyperbolic_partner_keeps_its_value() {
        let d = two_planes();
        let b = [el(&[0, 1, 0, 0], &[0])];
        let abar = [el(&[1, 0, 0, 0], &[0])];
        let a = [b[0].clone(), el(&[0, 0, 1, 0], &[0])];
        let ext = existence_extend(&d, &abar, &b, &a).unwrap();
        let bb = pad_elements(&ext.sys, &b);
        let c = ext.sys.eval_beta(&ext.witnesses[0].v, &bb[0].v).unwrap();
        assert_eq!(c, d.eval_beta(&abar[0].v, &b[0].v).unwrap());
        assert!(same_type_over(&d, &abar, &ext.sys, &ext.witnesses, &b));
        assert!(indep0_raw(&ext.witnesses, &bb, &pad_elements(&ext.sys, &a)));
    }

    #[test]
    fn tuple_inside_base() {
        let d = two_planes();
        let b = [el(&[1, 0, 0, 0], &[0]), el(&[0, 1, 0, 0], &[0])];
        let abar = [el(&[1, 1, 0, 0], &[2]), el(&[2, 0, 0, 0], &[1])];
        let ext = existence_extend(&d, &abar, &b, &b).unwrap();
        assert_eq!(ext.sys.dim_v(), 4);
        assert!(same_type_over(&d, &abar, &ext.sys, &ext.witnesses, &b));
    }

    #[test]
    fn base_must_lie_in_a() {
        let d = two_planes();
        let err = existence_extend(
            &d,
            &[],
            &[el(&[1, 0, 0, 0], &[0])],
            &[el(&[0, 1, 0, 0], &[0])],
        );
        assert!(matches!(err, Err(Error::BadBase(_))));
    }

    #[test]
    fn amalgam_over_p_only() {
        let d = two_planes();
        let a0 = [el(&[1, 0, 0, 0], &[0])];
        let a1 = [el(&[0, 0, 1, 0], &[0])];
        let b0 = [el(&[0, 1, 0, 0], &[0])];
        let b1 = [el(&[0, 0, 1, 1], &[0])];
        let ext = independence_amalgam(&d, &[], &a0, &a1, &b0, &b1).unwrap();
        let e = &ext.witnesses;
        let (bb0, bb1) = (pad_elements(&ext.sys, &b0), pad_elements(&ext.sys, &b1));
        assert_eq!(
            ext.sys.eval_beta(&e[0].v, &bb0[0].v).unwrap(),
            d.eval_beta(&a0[0].v, &b0[0].v).unwrap()
        );
        assert_eq!(
            ext.sys.eval_beta(&e[0].v, &bb1[0].v).unwrap(),
            d.eval_beta(&a1[0].v, &b1[0].v).unwrap()
        );
        assert!(same_type_over(&d, &a0, &ext.sys, e, &b0));
        assert!(same_type_over(&d, &a1, &ext.sys, e, &b1));
        let both: Vec<GroupElement> = bb0.iter().chain(&bb1).cloned().collect();
        assert!(indep0_raw(e, &[], &both));
    }

    #[test]
    fn amalgam_degenerates_to_existence() {
        let d = two_planes();
        let m = [el(&[0, 1, 0, 0], &[0])];
        let a = [el(&[1, 0, 0, 0], &[1])];
        let ext = independence_amalgam(&d, &m, &a, &a, &[], &[]).unwrap();
        assert!(same_type_over(&d, &a, &ext.sys, &ext.witnesses, &m));
    }

    #[test]
    fn amalgam_preconditions() {
        let d = two_planes();
        let a0 = [el(&[1, 0, 0, 0], &[0])];
        let a1 = [el(&[0, 0, 1, 0], &[0])];
        // a0 and a1 differ over M = {e_1}: β(a0, e_1) = c but β(a1, e_1) = 0
        let m = [el(&[0, 1, 0, 0], &[0])];
        let err = independence_amalgam(&d, &m, &a0, &a1, &[], &[]).unwrap_err();
        assert!(matches!(err, Error::PreconditionFailed(ref s) if s.contains("types")));
        let b = [el(&[1, 0, 0, 0], &[0])];
        let err = independence_amalgam(&d, &[], &a0, &a0, &b, &b).unwrap_err();
        assert!(matches!(err, Error::PreconditionFailed(ref s) if s.contains("b0 is not")));
    }

    #[test]
    fn relocation_into_a_larger_stage() {
        let plane = AltSystem::plane(p3(), &FVector::from_ints(p3(), &[1])).unwrap();
        let host = two_planes().orthogonal_sum(&plane).unwrap();
        let d = host.prefix(4);
        let abar = [el(&[1, 0, 0, 0], &[0])];
        let ext = existence_extend(&d, &abar, &[], &[]).unwrap();
        let placed = relocate(&ext, &host).unwrap().unwrap();
        assert_eq!(placed.len(), 1);
        assert!(placed[0].v.coords()[..4].iter().all(|&c| c == 0));
    }
}
