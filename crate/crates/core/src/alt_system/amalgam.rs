use crate::error::{dim_mismatch, Error, Result};
use crate::fp_linalg::{coordinates_in, extend_to_complement, FVector};

use super::{check_embedding, AltSystem, Embedding};

/// Output of [`amalgamate`].
///
/// `V_D` is laid out as the coordinates of `V_A` followed by one new
/// coordinate per element of `y_basis`, so `g_a` is the inclusion of the
/// leading coordinates.
#[derive(Debug, Clone)]
pub struct Amalgam {
    pub d: AltSystem,
    pub g_a: Embedding,
    pub g_c: Embedding,
    /// Basis of `V_A` over `f_a(V_B)` (standard vectors of `V_A`).
    pub x_basis: Vec<FVector>,
    /// Basis of `V_C` over `f_c(V_B)` (standard vectors of `V_C`).
    pub y_basis: Vec<FVector>,
}

/// Amalgam of `A` and `C` over `B` with the free filler `β_D(x, y) = 0`.
pub fn amalgamate(
    a: &AltSystem,
    c: &AltSystem,
    b: &AltSystem,
    f_a: &Embedding,
    f_c: &Embedding,
) -> Result<Amalgam> {
    let zero = FVector::zeros(a.prime(), a.n());
    amalgamate_with(a, c, b, f_a, f_c, &|_, _| zero.clone())
}

/// Vector-space amalgam `V_D = V_A ⊕_{V_B} V_C` with `β_D = β_A` on `V_A`,
/// `β_D = β_C` on `V_C`, and `β_D(x, y) = filler(x, y)` for `x` in the
/// basis of `V_A` over `V_B` and `y` in the basis of `V_C` over `V_B`.
pub fn amalgamate_with(
    a: &AltSystem,
    c: &AltSystem,
    b: &AltSystem,
    f_a: &Embedding,
    f_c: &Embedding,
    filler: &dyn Fn(&FVector, &FVector) -> FVector,
) -> Result<Amalgam> {
    if f_a.src != *b || f_a.dst != *a {
        return Err(Error::BadEmbedding("f_a is not a map B -> A".into()));
    }
    if f_c.src != *b || f_c.dst != *c {
        return Err(Error::BadEmbedding("f_c is not a map B -> C".into()));
    }
    if !check_embedding(f_a)? {
        return Err(Error::BadEmbedding(
            "f_a fails injectivity or beta-compatibility".into(),
        ));
    }
    if !check_embedding(f_c)? {
        return Err(Error::BadEmbedding(
            "f_c fails injectivity or beta-compatibility".into(),
        ));
    }
    let p = a.prime();
    let n = a.n();
    let (da, dc, db) = (a.dim_v(), c.dim_v(), b.dim_v());

    let x_basis = extend_to_complement(p, &f_a.images, da)?;
    let y_basis = extend_to_complement(p, &f_c.images, dc)?;
    let dd = da + y_basis.len();
    debug_assert_eq!(dd, da + dc - db);

    let fill: Vec<Vec<FVector>> = x_basis
        .iter()
        .map(|x| {
            y_basis
                .iter()
                .map(|y| {
                    let w = filler(x, y);
                    if w.len() != n || w.prime() != p {
                        Err(dim_mismatch(format!("filler value of length {}", w.len())))
                    } else {
                        Ok(w)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    // Coordinates of each standard vector of A in the basis f_a(B) ∪ X, and
    // of C in f_c(B) ∪ Y.
    let a_basis: Vec<FVector> = f_a.images.iter().chain(&x_basis).cloned().collect();
    let c_basis: Vec<FVector> = f_c.images.iter().chain(&y_basis).cloned().collect();
    let coords_a: Vec<FVector> = (0..da)
        .map(|i| coordinates_in(&a_basis, &FVector::unit(p, da, i)).map(|x| x.expect("basis")))
        .collect::<Result<_>>()?;
    let coords_c: Vec<FVector> = (0..dc)
        .map(|j| coordinates_in(&c_basis, &FVector::unit(p, dc, j)).map(|x| x.expect("basis")))
        .collect::<Result<_>>()?;

    let mut d = AltSystem::zero(p, n, dd)?;
    for i in 0..da {
        for j in i + 1..da {
            d.set_entry(i, j, a.upper_raw(i, j));
        }
    }
    for (l, yl) in y_basis.iter().enumerate() {
        for (m, ym) in y_basis.iter().enumerate().skip(l + 1) {
            d.set_entry(da + l, da + m, &c.beta_raw(yl.coords(), ym.coords()));
        }
    }
    // β_D(e_i, y_l) for e_i a standard vector of A: split e_i along f_a(B)
    // (transported to C through f_c) and along X (filler values).
    for (i, ci) in coords_a.iter().enumerate() {
        for (l, yl) in y_basis.iter().enumerate() {
            let mut acc = vec![0u32; n];
            for (k, bimg) in f_c.images.iter().enumerate() {
                let coef = ci.get(k);
                if coef != 0 {
                    let w = c.beta_raw(bimg.coords(), yl.coords());
                    crate::fp_linalg::axpy_raw(p, &mut acc, coef, &w);
                }
            }
            for (xi, row) in fill.iter().enumerate() {
                let coef = ci.get(db + xi);
                if coef != 0 {
                    crate::fp_linalg::axpy_raw(p, &mut acc, coef, row[l].coords());
                }
            }
            d.set_entry(i, da + l, &acc);
        }
    }

    let g_a = Embedding::prefix_inclusion(a, &d);
    let g_c_images = coords_c
        .iter()
        .map(|cj| {
            let mut v = vec![0u32; dd];
            for (k, bimg) in f_a.images.iter().enumerate() {
                crate::fp_linalg::axpy_raw(p, &mut v[..da], cj.get(k), bimg.coords());
            }
            for l in 0..y_basis.len() {
                v[da + l] = cj.get(db + l);
            }
            FVector::from_raw(p, v)
        })
        .collect();
    let g_c = Embedding::new(c.clone(), d.clone(), g_c_images);
    Ok(Amalgam {
        d,
        g_a,
        g_c,
        x_basis,
        y_basis,
    })
}
