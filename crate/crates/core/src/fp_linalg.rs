//! Exact linear algebra over a prime field `F_p`, `p` odd.
//!
//! Vectors are row vectors; matrices act on column vectors from the left
//! (`M x`). Every reduction is deterministic: pivots are chosen at the
//! lowest available column, free variables are set to zero, and
//! complements are picked greedily from the standard basis.

use std::fmt;

use crate::error::{dim_mismatch, Error, Result};

/// Largest modulus accepted. Products of two residues must fit in `u64`
/// with room for accumulation.
const MAX_PRIME: u64 = 1 << 16;

/// A validated odd prime together with the residue of `2⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime {
    p: u32,
    half: u32,
}

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) || p > MAX_PRIME || !is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        let p = p as u32;
        Ok(Prime {
            p,
            half: p.div_ceil(2),
        })
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.p
    }

    /// The residue `2⁻¹ mod p`.
    #[inline]
    pub fn half(self) -> u32 {
        self.half
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// `a + b * c`
    #[inline]
    pub fn mul_add(self, a: u32, b: u32, c: u32) -> u32 {
        ((a as u64 + b as u64 * c as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    ///
    /// Panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero mod {}", self.p);
        let (mut r0, mut r1) = (self.p as i64, (a % self.p) as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        self.reduce(t0)
    }

    /// `a^e mod p`.
    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A vector over `F_p` with canonical residues.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FVector {
    p: Prime,
    coords: Vec<u32>,
}

impl fmt::Debug for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

impl FVector {
    pub fn zeros(p: Prime, len: usize) -> Self {
        FVector {
            p,
            coords: vec![0; len],
        }
    }

    /// The standard basis vector `e_i` of `F_p^len`.
    pub fn unit(p: Prime, len: usize, i: usize) -> Self {
        let mut coords = vec![0; len];
        coords[i] = 1;
        FVector { p, coords }
    }

    /// Validates that every coordinate is a canonical residue.
    pub fn new(p: Prime, coords: Vec<u32>) -> Result<Self> {
        if let Some(c) = coords.iter().find(|&&c| c >= p.get()) {
            return Err(Error::InvalidArgument(format!(
                "coordinate {c} is not reduced mod {p}"
            )));
        }
        Ok(FVector { p, coords })
    }

    /// Reduces arbitrary integers mod `p`.
    pub fn from_ints(p: Prime, ints: &[i64]) -> Self {
        FVector {
            p,
            coords: ints.iter().map(|&x| p.reduce(x)).collect(),
        }
    }

    pub(crate) fn from_raw(p: Prime, coords: Vec<u32>) -> Self {
        debug_assert!(coords.iter().all(|&c| c < p.get()));
        FVector { p, coords }
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        self.coords[i]
    }

    pub fn into_coords(self) -> Vec<u32> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check_same(&self, other: &FVector) -> Result<()> {
        if self.p != other.p || self.len() != other.len() {
            return Err(dim_mismatch(format!(
                "vectors of length {} and {} (mod {} and {})",
                self.len(),
                other.len(),
                self.p,
                other.p
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &FVector) -> Result<FVector> {
        self.check_same(other)?;
        let p = self.p;
        Ok(FVector {
            p,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| p.add(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &FVector) -> Result<FVector> {
        self.check_same(other)?;
        let p = self.p;
        Ok(FVector {
            p,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| p.sub(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: u32) -> FVector {
        let p = self.p;
        let s = s % p.get();
        FVector {
            p,
            coords: self.coords.iter().map(|&a| p.mul(a, s)).collect(),
        }
    }

    pub fn neg(&self) -> FVector {
        let p = self.p;
        FVector {
            p,
            coords: self.coords.iter().map(|&a| p.neg(a)).collect(),
        }
    }

    pub fn dot(&self, other: &FVector) -> Result<u32> {
        self.check_same(other)?;
        Ok(dot_raw(self.p, &self.coords, &other.coords))
    }

    /// Concatenation `(self | other)`.
    pub fn concat(&self, other: &FVector) -> FVector {
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        FVector { p: self.p, coords }
    }

    /// Index of the first nonzero coordinate.
    pub fn leading_index(&self) -> Option<usize> {
        self.coords.iter().position(|&c| c != 0)
    }
}

/// A rectangular matrix over `F_p`, stored by rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FMatrix {
    p: Prime,
    ncols: usize,
    rows: Vec<FVector>,
}

impl FMatrix {
    pub fn zeros(p: Prime, nrows: usize, ncols: usize) -> Self {
        FMatrix {
            p,
            ncols,
            rows: (0..nrows).map(|_| FVector::zeros(p, ncols)).collect(),
        }
    }

    pub fn identity(p: Prime, dim: usize) -> Self {
        FMatrix {
            p,
            ncols: dim,
            rows: (0..dim).map(|i| FVector::unit(p, dim, i)).collect(),
        }
    }

    /// Builds a matrix from its rows. `ncols` is needed to describe matrices
    /// with zero rows.
    pub fn from_rows(p: Prime, ncols: usize, rows: Vec<FVector>) -> Result<Self> {
        for r in &rows {
            if r.len() != ncols || r.prime() != p {
                return Err(dim_mismatch(format!(
                    "row of length {} in a matrix with {} columns",
                    r.len(),
                    ncols
                )));
            }
        }
        Ok(FMatrix { p, ncols, rows })
    }

    /// Convenience constructor from integer rows, reduced mod `p`.
    pub fn from_ints(p: Prime, rows: &[&[i64]]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        FMatrix::from_rows(
            p,
            ncols,
            rows.iter().map(|r| FVector::from_ints(p, r)).collect(),
        )
    }

    /// Builds an `nrows × cols.len()` matrix whose `j`th column is `cols[j]`.
    pub fn from_columns(p: Prime, nrows: usize, cols: &[FVector]) -> Result<Self> {
        let mut m = vec![vec![0u32; cols.len()]; nrows];
        for (j, c) in cols.iter().enumerate() {
            if c.len() != nrows || c.prime() != p {
                return Err(dim_mismatch(format!(
                    "column of length {} in a matrix with {} rows",
                    c.len(),
                    nrows
                )));
            }
            for (i, &x) in c.coords().iter().enumerate() {
                m[i][j] = x;
            }
        }
        Ok(FMatrix {
            p,
            ncols: cols.len(),
            rows: m.into_iter().map(|r| FVector::from_raw(p, r)).collect(),
        })
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[FVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &FVector {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i].get(j)
    }

    pub fn column(&self, j: usize) -> FVector {
        FVector::from_raw(self.p, self.rows.iter().map(|r| r.get(j)).collect())
    }

    pub fn columns(&self) -> Vec<FVector> {
        (0..self.ncols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> FMatrix {
        FMatrix {
            p: self.p,
            ncols: self.nrows(),
            rows: self.columns(),
        }
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &FVector) -> Result<FVector> {
        if x.len() != self.ncols || x.prime() != self.p {
            return Err(dim_mismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.ncols
            )));
        }
        Ok(FVector::from_raw(
            self.p,
            self.rows
                .iter()
                .map(|r| dot_raw(self.p, r.coords(), x.coords()))
                .collect(),
        ))
    }

    /// `self · other`.
    pub fn mul(&self, other: &FMatrix) -> Result<FMatrix> {
        if self.ncols != other.nrows() {
            return Err(dim_mismatch(format!(
                "product of {}x{} and {}x{}",
                self.nrows(),
                self.ncols,
                other.nrows(),
                other.ncols
            )));
        }
        let cols: Vec<FVector> = other
            .columns()
            .iter()
            .map(|c| self.mul_vec(c))
            .collect::<Result<_>>()?;
        FMatrix::from_columns(self.p, self.nrows(), &cols)
    }

    fn raw_rows(&self) -> Vec<Vec<u32>> {
        self.rows.iter().map(|r| r.coords().to_vec()).collect()
    }
}

/// Result of [`rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: FMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub kernel_basis: Vec<FVector>,
}

#[inline]
pub(crate) fn dot_raw(p: Prime, a: &[u32], b: &[u32]) -> u32 {
    let m = p.get() as u64;
    let mut acc = 0u64;
    for (&x, &y) in a.iter().zip(b) {
        acc += x as u64 * y as u64;
        if acc >= 1 << 62 {
            acc %= m;
        }
    }
    (acc % m) as u32
}

/// `dst += s * src`
#[inline]
pub(crate) fn axpy_raw(p: Prime, dst: &mut [u32], s: u32, src: &[u32]) {
    if s == 0 {
        return;
    }
    for (d, &x) in dst.iter_mut().zip(src) {
        *d = p.mul_add(*d, s, x);
    }
}

/// In-place reduced row echelon form on raw rows; returns the pivot columns.
/// Zero rows are moved to the bottom.
pub(crate) fn rref_raw(p: Prime, rows: &mut [Vec<u32>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = p.inv(rows[r][col]);
        if inv != 1 {
            for x in rows[r].iter_mut() {
                *x = p.mul(*x, inv);
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let f = p.neg(row[col]);
                axpy_raw(p, row, f, &pivot_row);
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Kernel basis of a matrix already in reduced row echelon form.
pub(crate) fn kernel_from_rref(
    p: Prime,
    rows: &[Vec<u32>],
    pivots: &[usize],
    ncols: usize,
) -> Vec<Vec<u32>> {
    let mut is_pivot = vec![false; ncols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = vec![0u32; ncols];
            x[f] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                x[c] = p.neg(rows[r][f]);
            }
            x
        })
        .collect()
}

/// Reduced row echelon form, rank, pivot columns and a kernel basis
/// (one vector per free column, ascending).
pub fn rref(m: &FMatrix) -> Rref {
    let p = m.prime();
    let ncols = m.ncols();
    let mut rows = m.raw_rows();
    let pivots = rref_raw(p, &mut rows, ncols);
    let kernel_basis = kernel_from_rref(p, &rows, &pivots, ncols)
        .into_iter()
        .map(|v| FVector::from_raw(p, v))
        .collect();
    Rref {
        reduced: FMatrix {
            p,
            ncols,
            rows: rows.into_iter().map(|r| FVector::from_raw(p, r)).collect(),
        },
        rank: pivots.len(),
        pivots,
        kernel_basis,
    }
}

/// Solves `M x = b`, returning `None` when the system is inconsistent.
/// Free variables are set to zero.
pub fn solve_linear(m: &FMatrix, b: &FVector) -> Result<Option<FVector>> {
    if b.len() != m.nrows() || b.prime() != m.prime() {
        return Err(dim_mismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m.nrows()
        )));
    }
    let p = m.prime();
    let ncols = m.ncols();
    let mut rows: Vec<Vec<u32>> = m
        .rows()
        .iter()
        .zip(b.coords())
        .map(|(r, &bi)| {
            let mut row = r.coords().to_vec();
            row.push(bi);
            row
        })
        .collect();
    Ok(solve_augmented_raw(p, &mut rows, ncols).map(|x| FVector::from_raw(p, x)))
}

/// Solves an augmented system `[M | b]` given as raw rows with `ncols + 1`
/// entries each.
pub(crate) fn solve_augmented_raw(
    p: Prime,
    rows: &mut [Vec<u32>],
    ncols: usize,
) -> Option<Vec<u32>> {
    let pivots = rref_raw(p, rows, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![0u32; ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rows[r][ncols];
    }
    Some(x)
}

fn check_family(vs: &[FVector]) -> Result<Option<(Prime, usize)>> {
    let Some(first) = vs.first() else {
        return Ok(None);
    };
    for v in vs {
        if v.len() != first.len() || v.prime() != first.prime() {
            return Err(dim_mismatch("vectors of differing length or modulus"));
        }
    }
    Ok(Some((first.prime(), first.len())))
}

/// Reduced echelon basis of `span(vs)`. The result is canonical: two
/// families spanning the same subspace yield identical output.
pub fn span_basis(vs: &[FVector]) -> Result<Vec<FVector>> {
    let Some((p, len)) = check_family(vs)? else {
        return Ok(Vec::new());
    };
    let mut rows: Vec<Vec<u32>> = vs.iter().map(|v| v.coords().to_vec()).collect();
    let rank = rref_raw(p, &mut rows, len).len();
    rows.truncate(rank);
    Ok(rows.into_iter().map(|r| FVector::from_raw(p, r)).collect())
}

pub fn rank_of(vs: &[FVector]) -> Result<usize> {
    Ok(span_basis(vs)?.len())
}

/// Basis of `span(U) ∩ span(W)` via the Zassenhaus construction, in reduced
/// echelon form.
pub fn subspace_intersect(u: &[FVector], w: &[FVector]) -> Result<Vec<FVector>> {
    let all: Vec<FVector> = u.iter().chain(w).cloned().collect();
    let Some((p, len)) = check_family(&all)? else {
        return Ok(Vec::new());
    };
    if u.is_empty() || w.is_empty() {
        return Ok(Vec::new());
    }
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(u.len() + w.len());
    for x in u {
        let mut r = x.coords().to_vec();
        r.extend_from_slice(x.coords());
        rows.push(r);
    }
    for x in w {
        let mut r = x.coords().to_vec();
        r.extend(std::iter::repeat_n(0, len));
        rows.push(r);
    }
    rref_raw(p, &mut rows, 2 * len);
    let inter: Vec<FVector> = rows
        .into_iter()
        .filter(|r| r[..len].iter().all(|&c| c == 0) && r[len..].iter().any(|&c| c != 0))
        .map(|r| FVector::from_raw(p, r[len..].to_vec()))
        .collect();
    span_basis(&inter)
}

/// Standard basis vectors, picked greedily by ascending index, completing
/// `span(S)` to the whole of `F_p^ambient_dim`.
pub fn extend_to_complement(p: Prime, s: &[FVector], ambient_dim: usize) -> Result<Vec<FVector>> {
    let mut ech = Echelon::new(p, ambient_dim);
    for v in s {
        if v.len() != ambient_dim || v.prime() != p {
            return Err(dim_mismatch(format!(
                "vector of length {} in ambient dimension {ambient_dim}",
                v.len()
            )));
        }
        ech.insert(v.coords());
    }
    let mut out = Vec::new();
    for i in 0..ambient_dim {
        if ech.rank() == ambient_dim {
            break;
        }
        let e = FVector::unit(p, ambient_dim, i);
        if ech.insert(e.coords()) {
            out.push(e);
        }
    }
    Ok(out)
}

/// Whether `v ∈ span(vs)`.
pub fn in_span(vs: &[FVector], v: &FVector) -> Result<bool> {
    let mut ech = Echelon::new(v.prime(), v.len());
    for x in vs {
        if x.len() != v.len() {
            return Err(dim_mismatch("membership test with mismatched lengths"));
        }
        ech.insert(x.coords());
    }
    Ok(ech.contains(v.coords()))
}

/// Coordinates of `v` in the (linearly independent) family `basis`, if
/// `v` lies in its span.
pub fn coordinates_in(basis: &[FVector], v: &FVector) -> Result<Option<FVector>> {
    let m = FMatrix::from_columns(v.prime(), v.len(), basis)?;
    solve_linear(&m, v)
}

/// Incrementally maintained semi-echelon basis: every stored row has a
/// distinct pivot normalised to one, and rows are kept sorted by pivot.
#[derive(Debug, Clone)]
pub(crate) struct Echelon {
    p: Prime,
    len: usize,
    rows: Vec<(usize, Vec<u32>)>,
}

impl Echelon {
    pub(crate) fn new(p: Prime, len: usize) -> Self {
        Echelon {
            p,
            len,
            rows: Vec::new(),
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residue of `v` after elimination against the stored rows.
    pub(crate) fn reduce(&self, v: &[u32]) -> Vec<u32> {
        debug_assert_eq!(v.len(), self.len);
        let mut r = v.to_vec();
        for (piv, row) in &self.rows {
            let c = r[*piv];
            if c != 0 {
                axpy_raw(self.p, &mut r, self.p.neg(c), row);
            }
        }
        r
    }

    pub(crate) fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&c| c == 0)
    }

    /// Adds `v`; returns whether the span grew.
    pub(crate) fn insert(&mut self, v: &[u32]) -> bool {
        let mut r = self.reduce(v);
        let Some(piv) = r.iter().position(|&c| c != 0) else {
            return false;
        };
        let inv = self.p.inv(r[piv]);
        for x in r.iter_mut() {
            *x = self.p.mul(*x, inv);
        }
        let at = self.rows.partition_point(|(q, _)| *q < piv);
        self.rows.insert(at, (piv, r));
        true
    }
}

/// All vectors of `F_p^dim` in lexicographic order (coordinate 0 most
/// significant).
pub fn all_vectors(p: Prime, dim: usize) -> impl Iterator<Item = FVector> {
    let total = (p.get() as u64).checked_pow(dim as u32).unwrap_or(u64::MAX);
    (0..total).map(move |idx| vector_from_index(p, dim, idx))
}

/// The `idx`th vector of [`all_vectors`].
pub fn vector_from_index(p: Prime, dim: usize, mut idx: u64) -> FVector {
    let q = p.get() as u64;
    let mut coords = vec![0u32; dim];
    for c in coords.iter_mut().rev() {
        *c = (idx % q) as u32;
        idx /= q;
    }
    FVector::from_raw(p, coords)
}

/// Inverse of [`vector_from_index`].
pub fn vector_index(v: &FVector) -> u64 {
    let q = v.prime().get() as u64;
    v.coords().iter().fold(0u64, |acc, &c| acc * q + c as u64)
}

/// `p^e` with overflow saturating to `u64::MAX`.
pub fn pow_count(p: Prime, e: usize) -> u64 {
    (p.get() as u64).checked_pow(e as u32).unwrap_or(u64::MAX)
}

/// Every `k`-dimensional subspace of `F_p^dim`, each given by its reduced
/// echelon basis. Ordered by pivot set, then by the free entries in
/// lexicographic order.
pub fn all_subspaces(p: Prime, dim: usize, k: usize) -> Vec<Vec<FVector>> {
    let mut out = Vec::new();
    if k > dim {
        return out;
    }
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // free positions: (row r, column c) with c > pivot_r and c not a pivot
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                let pv = &pivots;
                (pv[r] + 1..dim)
                    .filter(move |c| !pv.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        for idx in 0..pow_count(p, free.len()) {
            let vals = vector_from_index(p, free.len(), idx);
            let mut rows = vec![vec![0u32; dim]; k];
            for (r, &c) in pivots.iter().enumerate() {
                rows[r][c] = 1;
            }
            for (&(r, c), &x) in free.iter().zip(vals.coords()) {
                rows[r][c] = x;
            }
            out.push(rows.into_iter().map(|r| FVector::from_raw(p, r)).collect());
        }
        // next k-combination of 0..dim
        let Some(i) = (0..k).rev().find(|&i| pivots[i] < dim - k + i) else {
            break;
        };
        pivots[i] += 1;
        for j in i + 1..k {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn v(p: Prime, xs: &[i64]) -> FVector {
        FVector::from_ints(p, xs)
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(3).is_ok());
        assert!(Prime::new(7).is_ok());
        assert_eq!(Prime::new(2), Err(Error::BadPrime(2)));
        assert_eq!(Prime::new(9), Err(Error::BadPrime(9)));
        assert_eq!(Prime::new(1), Err(Error::BadPrime(1)));
        assert_eq!(Prime::new(5).unwrap().half(), 3);
        assert_eq!(p3().half(), 2);
    }

    #[test]
    fn inverses() {
        for q in [3u64, 5, 7, 11, 101] {
            let p = Prime::new(q).unwrap();
            for a in 1..p.get() {
                assert_eq!(p.mul(a, p.inv(a)), 1);
            }
        }
    }

    #[test]
    fn rref_rank_one() {
        let p = p3();
        let m = FMatrix::from_ints(p, &[&[1, 2], &[2, 1]]).unwrap();
        let r = rref(&m);
        assert_eq!(r.rank, 1);
        assert_eq!(
            r.reduced,
            FMatrix::from_ints(p, &[&[1, 2], &[0, 0]]).unwrap()
        );
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(r.kernel_basis, vec![v(p, &[1, 1])]);
    }

    #[test]
    fn rref_identity_and_zero() {
        let p = Prime::new(5).unwrap();
        let id = FMatrix::identity(p, 4);
        let r = rref(&id);
        assert_eq!(r.reduced, id);
        assert_eq!(r.rank, 4);
        assert!(r.kernel_basis.is_empty());

        let z = FMatrix::zeros(p, 3, 4);
        let r = rref(&z);
        assert_eq!(r.reduced, z);
        assert_eq!(r.rank, 0);
        assert_eq!(r.kernel_basis.len(), 4);
        assert_eq!(rank_of(&r.kernel_basis).unwrap(), 4);
    }

    #[test]
    fn solve_examples() {
        let p = p3();
        let m = FMatrix::from_ints(p, &[&[1, 2], &[0, 0]]).unwrap();
        assert_eq!(solve_linear(&m, &v(p, &[0, 1])).unwrap(), None);
        assert_eq!(
            solve_linear(&m, &v(p, &[0, 0])).unwrap(),
            Some(v(p, &[0, 0]))
        );
        let id = FMatrix::identity(p, 2);
        assert_eq!(
            solve_linear(&id, &v(p, &[2, 1])).unwrap(),
            Some(v(p, &[2, 1]))
        );
        assert!(matches!(
            solve_linear(&id, &v(p, &[1])),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn intersect_examples() {
        let p = p3();
        let e0 = v(p, &[1, 0]);
        let e1 = v(p, &[0, 1]);
        assert!(
            subspace_intersect(std::slice::from_ref(&e0), std::slice::from_ref(&e1))
                .unwrap()
                .is_empty()
        );
        assert_eq!(
            subspace_intersect(&[v(p, &[1, 1]), e1.clone()], std::slice::from_ref(&e0)).unwrap(),
            vec![e0.clone()]
        );
        let u = vec![v(p, &[1, 2, 0]), v(p, &[0, 1, 1])];
        assert_eq!(subspace_intersect(&u, &u).unwrap(), span_basis(&u).unwrap());
        assert!(matches!(
            subspace_intersect(&[e0], &[v(p, &[1, 0, 0])]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn complement_examples() {
        let p = p3();
        assert_eq!(
            extend_to_complement(p, &[v(p, &[1, 0])], 2).unwrap(),
            vec![v(p, &[0, 1])]
        );
        assert!(extend_to_complement(p, &[v(p, &[1, 0]), v(p, &[1, 1])], 2)
            .unwrap()
            .is_empty());
        assert_eq!(
            extend_to_complement(p, &[v(p, &[1, 1])], 2).unwrap(),
            vec![v(p, &[1, 0])]
        );
        assert_eq!(extend_to_complement(p, &[], 2).unwrap().len(), 2);
    }

    #[test]
    fn echelon_membership() {
        let p = p3();
        let mut e = Echelon::new(p, 3);
        assert!(e.insert(&[0, 1, 2]));
        assert!(e.insert(&[1, 1, 0]));
        assert!(!e.insert(&[1, 2, 2]));
        assert!(e.contains(&[2, 0, 2]));
        assert!(!e.contains(&[0, 0, 1]));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn subspace_counts() {
        // Gaussian binomials [4 choose k]_3 = 1, 40, 130, 40, 1
        let p = p3();
        let counts: Vec<usize> = (0..=4).map(|k| all_subspaces(p, 4, k).len()).collect();
        assert_eq!(counts, vec![1, 40, 130, 40, 1]);
        for s in all_subspaces(p, 3, 2) {
            assert_eq!(span_basis(&s).unwrap(), s);
        }
    }

    #[test]
    fn vector_indexing_round_trip() {
        let p = p3();
        let all: Vec<_> = all_vectors(p, 3).collect();
        assert_eq!(all.len(), 27);
        assert_eq!(all[1], v(p, &[0, 0, 1]));
        for (i, x) in all.iter().enumerate() {
            assert_eq!(vector_index(x), i as u64);
        }
    }
}
