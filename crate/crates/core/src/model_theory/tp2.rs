use crate::alt_system::{check_embedding, free_exterior_system, AltSystem, Embedding, FreeSystem};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fp_linalg::FVector;

/// Largest free rank `R + 2RI` accepted.
pub const MAX_TP2_RANK: usize = 64;

/// Largest number of paths checked in one call.
pub const MAX_TP2_PATHS: usize = 1 << 16;

/// Named generators of `V = F_p^{R + 2RI}`: `b_α = e_α`,
/// `c_{α,i} = e_{R + 2(αI + i)}`, `d_{α,i} = e_{R + 2(αI + i) + 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tp2Array {
    pub free: FreeSystem,
    pub rows: usize,
    pub cols: usize,
}

impl Tp2Array {
    pub fn new(rows: usize, cols: usize, p: u64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(
                "rows and cols must be at least 1".into(),
            ));
        }
        let rank = rows + 2 * rows * cols;
        if rank > MAX_TP2_RANK {
            return Err(Error::TooLarge(format!(
                "free rank {rank} exceeds {MAX_TP2_RANK}"
            )));
        }
        Ok(Tp2Array {
            free: free_exterior_system(rank, p)?,
            rows,
            cols,
        })
    }

    pub fn b(&self, alpha: usize) -> usize {
        alpha
    }

    pub fn c(&self, alpha: usize, i: usize) -> usize {
        self.rows + 2 * (alpha * self.cols + i)
    }

    pub fn d(&self, alpha: usize, i: usize) -> usize {
        self.c(alpha, i) + 1
    }

    /// `c_{α,i} ∧ d_{α,i}`, the value `[c_{α,i}, d_{α,i}]`.
    pub fn target(&self, alpha: usize, i: usize) -> FVector {
        self.free.basis_wedge(self.c(alpha, i), self.d(alpha, i))
    }
}

/// Outcome of [`tp2_build_and_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tp2Report {
    pub rows: usize,
    pub cols: usize,
    pub row_pairs: usize,
    /// Row pairs `(α, i, j)` whose wedge values were certified distinct.
    pub row_pairs_inconsistent: usize,
    pub paths: usize,
    pub paths_consistent: usize,
    /// Row pairs without a certificate.
    pub row_failures: Vec<(usize, usize, usize)>,
    /// Indices of paths whose extension failed validation.
    pub path_failures: Vec<usize>,
}

impl Tp2Report {
    pub fn passed(&self) -> bool {
        self.row_failures.is_empty() && self.path_failures.is_empty()
    }
}

/// Every function `rows → cols`, the last row varying fastest.
pub fn all_paths(rows: usize, cols: usize) -> Result<Vec<Vec<usize>>> {
    let count = (cols as u64)
        .checked_pow(rows as u32)
        .filter(|&c| c <= MAX_TP2_PATHS as u64);
    let Some(count) = count else {
        return Err(Error::TooLarge(format!(
            "{cols}^{rows} paths exceed {MAX_TP2_PATHS}"
        )));
    };
    Ok((0..count)
        .map(|mut idx| {
            let mut f = vec![0; rows];
            for slot in f.iter_mut().rev() {
                *slot = (idx % cols as u64) as usize;
                idx /= cols as u64;
            }
            f
        })
        .collect())
}

/// The free system extended by one generator `x` with
/// `β(x, b_α) = c_{α,f(α)} ∧ d_{α,f(α)}` and `β(x, ·) = 0` on every other
/// generator.
pub fn path_extension(arr: &Tp2Array, base: &AltSystem, f: &[usize]) -> Result<AltSystem> {
    let r = base.dim_v();
    let p = base.prime();
    let mut ext = AltSystem::zero(p, base.n(), r + 1)?;
    for i in 0..r {
        for j in i + 1..r {
            ext.set_entry(i, j, base.upper_raw(i, j));
        }
    }
    for (alpha, &i) in f.iter().enumerate() {
        // β(b_α, x) = -β(x, b_α)
        ext.set_entry(arr.b(alpha), r, arr.target(alpha, i).neg().coords());
    }
    Ok(ext)
}

/// Whether the extension for `f` is a valid alternating system containing
/// the free system as a prefix and satisfying `[x, b_α] = [c_{α,f(α)}, d_{α,f(α)}]`.
fn check_path(arr: &Tp2Array, base: &AltSystem, f: &[usize]) -> Result<bool> {
    let ext = path_extension(arr, base, f)?;
    let r = base.dim_v();
    let p = base.prime();
    if !check_embedding(&Embedding::prefix_inclusion(base, &ext))? {
        return Ok(false);
    }
    let x = FVector::unit(p, r + 1, r);
    let gen = |i: usize| FVector::unit(p, r + 1, i);
    for (alpha, &i) in f.iter().enumerate() {
        let lhs = ext.eval_beta(&x, &gen(arr.b(alpha)))?;
        let rhs = ext.eval_beta(&gen(arr.c(alpha, i)), &gen(arr.d(alpha, i)))?;
        if lhs != rhs || lhs.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn tp2_build_and_check(
    rows: usize,
    cols: usize,
    p: u64,
    paths: &[Vec<usize>],
) -> Result<Tp2Report> {
    tp2_build_and_check_with(Exec::default(), rows, cols, p, paths)
}

pub fn tp2_build_and_check_with(
    exec: Exec,
    rows: usize,
    cols: usize,
    p: u64,
    paths: &[Vec<usize>],
) -> Result<Tp2Report> {
    let arr = Tp2Array::new(rows, cols, p)?;
    if paths.len() > MAX_TP2_PATHS {
        return Err(Error::TooLarge(format!(
            "{} paths exceed {MAX_TP2_PATHS}",
            paths.len()
        )));
    }
    for f in paths {
        if f.len() != rows || f.iter().any(|&i| i >= cols) {
            return Err(Error::InvalidArgument(format!(
                "{f:?} is not a function rows -> cols"
            )));
        }
    }
    let mut report = Tp2Report {
        rows,
        cols,
        row_pairs: 0,
        row_pairs_inconsistent: 0,
        paths: paths.len(),
        paths_consistent: 0,
        row_failures: Vec::new(),
        path_failures: Vec::new(),
    };
    for alpha in 0..rows {
        for i in 0..cols {
            for j in i + 1..cols {
                report.row_pairs += 1;
                if arr.target(alpha, i) != arr.target(alpha, j) {
                    report.row_pairs_inconsistent += 1;
                } else {
                    report.row_failures.push((alpha, i, j));
                }
            }
        }
    }
    let base = arr.free.to_alt_system()?;
    let results = exec.map(paths, |f| check_path(&arr, &base, f));
    for (idx, ok) in results.into_iter().enumerate() {
        if ok? {
            report.paths_consistent += 1;
        } else {
            report.path_failures.push(idx);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let paths = all_paths(2, 2).unwrap();
        let rep = tp2_build_and_check(2, 2, 3, &paths).unwrap();
        assert_eq!(rep.row_pairs, 2);
        assert_eq!(rep.row_pairs_inconsistent, 2);
        assert_eq!(rep.paths_consistent, 4);
        assert!(rep.passed());
    }

    #[test]
    fn single_column() {
        let paths = all_paths(3, 1).unwrap();
        let rep = tp2_build_and_check(3, 1, 5, &paths).unwrap();
        assert_eq!(rep.row_pairs, 0);
        assert_eq!(rep.paths_consistent, 1);
    }

    #[test]
    fn generators_are_distinct() {
        let arr = Tp2Array::new(3, 2, 3).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for a in 0..3 {
            assert!(seen.insert(arr.b(a)));
            for i in 0..2 {
                assert!(seen.insert(arr.c(a, i)));
                assert!(seen.insert(arr.d(a, i)));
            }
        }
        assert_eq!(seen.len(), arr.free.rank());
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(Tp2Array::new(5, 7, 3), Err(Error::TooLarge(_))));
        assert!(tp2_build_and_check(2, 2, 3, &[vec![0, 2]]).is_err());
        assert!(Tp2Array::new(0, 2, 3).is_err());
    }
}
