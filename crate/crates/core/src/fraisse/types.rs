use crate::alt_system::{check_embedding, AltSystem, Embedding};
use crate::baer_group::GroupElement;
use crate::error::{dim_mismatch, Error, Result};
use crate::fp_linalg::{coordinates_in, span_basis, FMatrix, FVector};

/// Quantifier-free type of a tuple `a_0 … a_{k-1}` in a group of `K(n)`.
///
/// `relations` is the reduced echelon basis of
/// `{(λ, Σ λ_i w_i) : Σ λ_i v_i = 0} ⊆ F_p^k × P`. The ordered product
/// `a_0^{λ_0} ⋯ a_{k-1}^{λ_{k-1}}` of a relation equals `(0, w + q(λ))`
/// where `q(λ) = ½ Σ_{i<j} λ_i λ_j gram[i][j]` is fixed by the Gram table
/// (see [`TypeCode::ordered_correction`]), so the code determines the
/// product relations as well.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeCode {
    pub k: usize,
    pub relations: Vec<FVector>,
    /// `gram[i][j] = β(v_i, v_j)`.
    pub gram: Vec<Vec<FVector>>,
}

impl TypeCode {
    /// `½ Σ_{i<j} λ_i λ_j β(v_i, v_j)`.
    pub fn ordered_correction(&self, lambda: &FVector) -> FVector {
        let p = lambda.prime();
        let n = self.relations.first().map_or_else(
            || {
                self.gram
                    .first()
                    .and_then(|r| r.first())
                    .map_or(0, |w| w.len())
            },
            |r| r.len() - self.k,
        );
        let mut acc = FVector::zeros(p, n);
        for i in 0..self.k {
            for j in i + 1..self.k {
                let s = p.mul(p.half(), p.mul(lambda.get(i), lambda.get(j)));
                acc = acc.add(&self.gram[i][j].scale(s)).expect("uniform P");
            }
        }
        acc
    }
}

fn check_elements(d: &AltSystem, tuple: &[GroupElement]) -> Result<()> {
    for x in tuple {
        if x.v.len() != d.dim_v()
            || x.w.len() != d.n()
            || x.v.prime() != d.prime()
            || x.w.prime() != d.prime()
        {
            return Err(dim_mismatch(format!(
                "element of shape {}|{} in a system of shape {}|{}",
                x.v.len(),
                x.w.len(),
                d.dim_v(),
                d.n()
            )));
        }
    }
    Ok(())
}

pub fn qf_type_code(d: &AltSystem, tuple: &[GroupElement]) -> Result<TypeCode> {
    check_elements(d, tuple)?;
    let p = d.prime();
    let k = tuple.len();
    let gram = tuple
        .iter()
        .map(|x| {
            tuple
                .iter()
                .map(|y| d.eval_beta(&x.v, &y.v))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if k == 0 {
        return Ok(TypeCode {
            k,
            relations: Vec::new(),
            gram,
        });
    }
    let vs: Vec<FVector> = tuple.iter().map(|x| x.v.clone()).collect();
    let m = FMatrix::from_columns(p, d.dim_v(), &vs)?;
    let kernel = crate::fp_linalg::rref(&m).kernel_basis;
    let rows: Vec<FVector> = kernel
        .iter()
        .map(|lam| {
            let w = tuple
                .iter()
                .zip(lam.coords())
                .fold(FVector::zeros(p, d.n()), |acc, (x, &l)| {
                    acc.add(&x.w.scale(l)).expect("uniform P")
                });
            lam.concat(&w)
        })
        .collect();
    Ok(TypeCode {
        k,
        relations: span_basis(&rows)?,
        gram,
    })
}

/// The isomorphism `⟨ā⟩ → ⟨b̄⟩` with `a_i ↦ b_i` fixing `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialIso {
    /// Indices of `ā` whose `V`-parts form a basis of `span π(ā)`.
    pub pivots: Vec<usize>,
    pub src_basis: Vec<FVector>,
    pub dst_basis: Vec<FVector>,
    /// `w(b_j) - w(a_j)` for each pivot `j`; the map is
    /// `(Σ μ_j v(a_j), w) ↦ (Σ μ_j v(b_j), w + Σ μ_j shift_j)`.
    pub shift: Vec<FVector>,
}

impl PartialIso {
    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        let p = x.v.prime();
        let mu = if self.src_basis.is_empty() {
            if !x.v.is_zero() {
                return Err(Error::InvalidArgument("element outside the domain".into()));
            }
            FVector::zeros(p, 0)
        } else {
            coordinates_in(&self.src_basis, &x.v)?
                .ok_or_else(|| Error::InvalidArgument("element outside the domain".into()))?
        };
        let mut v = FVector::zeros(p, x.v.len());
        let mut w = x.w.clone();
        for (j, &m) in mu.coords().iter().enumerate() {
            v = v.add(&self.dst_basis[j].scale(m))?;
            w = w.add(&self.shift[j].scale(m))?;
        }
        Ok(GroupElement::new(v, w))
    }
}

/// `a_i ↦ b_i` as an isomorphism of generated substructures, when one
/// exists (equivalently, when the type codes agree).
pub fn partial_iso_from_types(
    d: &AltSystem,
    a: &[GroupElement],
    b: &[GroupElement],
) -> Result<Option<PartialIso>> {
    check_elements(d, a)?;
    check_elements(d, b)?;
    if a.len() != b.len() {
        return Ok(None);
    }
    let p = d.prime();
    let mut pivots = Vec::new();
    let mut src_basis: Vec<FVector> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        let mut cand = src_basis.clone();
        cand.push(x.v.clone());
        if crate::fp_linalg::rank_of(&cand)? == cand.len() {
            src_basis = cand;
            pivots.push(i);
        }
    }
    let dst_basis: Vec<FVector> = pivots.iter().map(|&j| b[j].v.clone()).collect();
    if crate::fp_linalg::rank_of(&dst_basis)? != dst_basis.len() {
        return Ok(None);
    }
    let shift: Vec<FVector> = pivots
        .iter()
        .map(|&j| b[j].w.sub(&a[j].w))
        .collect::<Result<_>>()?;
    let iso = PartialIso {
        pivots,
        src_basis,
        dst_basis,
        shift,
    };
    for (x, y) in a.iter().zip(b) {
        if iso.apply(x)? != *y {
            return Ok(None);
        }
    }
    let src = d.restrict(&iso.src_basis)?;
    let dst = d.restrict(&iso.dst_basis)?;
    let k = iso.src_basis.len();
    let identity = (0..k).map(|i| FVector::unit(p, k, i)).collect();
    if !check_embedding(&Embedding::new(src, dst, identity))? {
        return Ok(None);
    }
    Ok(Some(iso))
}
