use crate::error::{dim_mismatch, Result};
use crate::fp_linalg::{Echelon, FMatrix, FVector};

use super::AltSystem;

/// A morphism `(g, id)`: a linear map on the `V`-parts, identity on `P`.
/// `images[i]` is the image of the `i`th source basis vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub src: AltSystem,
    pub dst: AltSystem,
    pub images: Vec<FVector>,
}

impl Embedding {
    pub fn new(src: AltSystem, dst: AltSystem, images: Vec<FVector>) -> Self {
        Embedding { src, dst, images }
    }

    pub fn identity(sys: &AltSystem) -> Self {
        let p = sys.prime();
        let d = sys.dim_v();
        Embedding {
            src: sys.clone(),
            dst: sys.clone(),
            images: (0..d).map(|i| FVector::unit(p, d, i)).collect(),
        }
    }

    /// Inclusion of the first `src.dim_v()` coordinates of `dst`.
    pub fn prefix_inclusion(src: &AltSystem, dst: &AltSystem) -> Self {
        let p = dst.prime();
        Embedding {
            src: src.clone(),
            dst: dst.clone(),
            images: (0..src.dim_v())
                .map(|i| FVector::unit(p, dst.dim_v(), i))
                .collect(),
        }
    }

    /// The `dimV_dst × dimV_src` matrix whose columns are the images.
    pub fn vmap(&self) -> FMatrix {
        FMatrix::from_columns(self.dst.prime(), self.dst.dim_v(), &self.images)
            .expect("image lengths match dst")
    }

    /// Image of a source vector.
    pub fn apply(&self, v: &FVector) -> Result<FVector> {
        self.vmap().mul_vec(v)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Embedding) -> Result<Embedding> {
        if self.dst.dim_v() != other.src.dim_v() {
            return Err(dim_mismatch("composition of non-matching embeddings"));
        }
        let images = self
            .images
            .iter()
            .map(|v| other.apply(v))
            .collect::<Result<_>>()?;
        Ok(Embedding {
            src: self.src.clone(),
            dst: other.dst.clone(),
            images,
        })
    }
}

/// Whether `f` is injective and `β_dst(f u, f v) = β_src(u, v)` on every
/// pair of source basis vectors.
pub fn check_embedding(f: &Embedding) -> Result<bool> {
    let (src, dst) = (&f.src, &f.dst);
    if src.prime() != dst.prime() || src.n() != dst.n() {
        return Err(dim_mismatch("embedding between systems over different P"));
    }
    if f.images.len() != src.dim_v() {
        return Err(dim_mismatch(format!(
            "{} images for a source of dimension {}",
            f.images.len(),
            src.dim_v()
        )));
    }
    if let Some(v) = f
        .images
        .iter()
        .find(|v| v.len() != dst.dim_v() || v.prime() != dst.prime())
    {
        return Err(dim_mismatch(format!(
            "image of length {} in a target of dimension {}",
            v.len(),
            dst.dim_v()
        )));
    }
    let mut ech = Echelon::new(dst.prime(), dst.dim_v());
    for v in &f.images {
        if !ech.insert(v.coords()) {
            return Ok(false);
        }
    }
    for i in 0..src.dim_v() {
        for j in i + 1..src.dim_v() {
            let lhs = dst.beta_raw(f.images[i].coords(), f.images[j].coords());
            if lhs != src.upper_raw(i, j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alt_system::make_system;
    use crate::error::Error;
    use crate::fp_linalg::Prime;

    #[test]
    fn identity_is_embedding() {
        let p = Prime::new(5).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let s = AltSystem::random(p, 2, 4, &mut rng).unwrap();
        assert!(check_embedding(&Embedding::identity(&s)).unwrap());
    }

    #[test]
    fn rank_deficient_rejected() {
        let p = Prime::new(3).unwrap();
        let s = AltSystem::zero(p, 1, 2).unwrap();
        let f = Embedding::new(
            s.clone(),
            s.clone(),
            vec![FVector::unit(p, 2, 0), FVector::unit(p, 2, 0)],
        );
        assert!(!check_embedding(&f).unwrap());
    }

    #[test]
    fn zero_plane_into_symplectic_plane_rejected() {
        let p = Prime::new(3).unwrap();
        let zero = AltSystem::zero(p, 1, 2).unwrap();
        let plane = make_system(3, 1, 2, &[(0, 1, FVector::from_ints(p, &[1]))]).unwrap();
        let f = Embedding::new(
            zero,
            plane,
            vec![FVector::unit(p, 2, 0), FVector::unit(p, 2, 1)],
        );
        assert!(!check_embedding(&f).unwrap());
    }

    #[test]
    fn shape_errors() {
        let p = Prime::new(3).unwrap();
        let s = AltSystem::zero(p, 1, 2).unwrap();
        let f = Embedding::new(s.clone(), s.clone(), vec![FVector::unit(p, 2, 0)]);
        assert!(matches!(
            check_embedding(&f),
            Err(Error::DimensionMismatch(_))
        ));
        let t = AltSystem::zero(p, 2, 2).unwrap();
        let f = Embedding::identity(&s);
        let g = Embedding::new(s, t, f.images);
        assert!(matches!(
            check_embedding(&g),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
