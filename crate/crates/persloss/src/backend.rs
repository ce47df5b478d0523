//! The two concrete target categories: finite sets with functions, and
//! finite-dimensional vector spaces over a prime field GF(p) with exact
//! matrix arithmetic.
//!
//! Composition is written in diagrammatic order throughout: `compose(f, g)`
//! is "f then g", i.e. g ∘ f.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("cannot mix finite-set and vector-space morphisms")]
    MixedBackends,
    #[error("morphism is not invertible")]
    NotInvertible,
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// An object of the target category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Object {
    /// A finite set with distinct element labels.
    Set { labels: Vec<String> },
    /// A GF(p) vector space of the given dimension.
    Space { dim: usize, prime: u64 },
}

impl Object {
    pub fn set(labels: Vec<String>) -> Self {
        Object::Set { labels }
    }

    pub fn space(dim: usize, prime: u64) -> Self {
        Object::Space { dim, prime }
    }

    /// Number of set elements, or the dimension.
    pub fn size(&self) -> usize {
        match self {
            Object::Set { labels } => labels.len(),
            Object::Space { dim, .. } => *dim,
        }
    }
}

/// A morphism of the target category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Morphism {
    Map(SetMap),
    Linear(Matrix),
}

/// A total function between finite sets, stored as target indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetMap {
    pub source: usize,
    pub target: usize,
    pub table: Vec<usize>,
}

impl SetMap {
    pub fn new(source: usize, target: usize, table: Vec<usize>) -> Result<Self, BackendError> {
        if table.len() != source {
            return Err(BackendError::ShapeMismatch(format!(
                "table has {} entries for a source of size {source}",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&t| t >= target) {
            return Err(BackendError::ShapeMismatch(format!(
                "table entry {bad} out of range for target of size {target}"
            )));
        }
        Ok(SetMap { source, target, table })
    }

    pub fn identity(n: usize) -> Self {
        SetMap { source: n, target: n, table: (0..n).collect() }
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target];
        self.table.iter().all(|&t| !std::mem::replace(&mut seen[t], true))
    }

    pub fn is_bijective(&self) -> bool {
        self.source == self.target && self.is_injective()
    }

    pub fn inverse(&self) -> Result<SetMap, BackendError> {
        if !self.is_bijective() {
            return Err(BackendError::NotInvertible);
        }
        let mut table = vec![0usize; self.target];
        for (i, &t) in self.table.iter().enumerate() {
            table[t] = i;
        }
        Ok(SetMap { source: self.target, target: self.source, table })
    }
}

/// A dense matrix over GF(p), row-major. As a linear map it has
/// `cols`-dimensional source and `rows`-dimensional target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub prime: u64,
    data: Vec<u64>,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize, prime: u64) -> Self {
        Matrix { rows, cols, prime, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, prime: u64) -> Self {
        let mut m = Matrix::zero(n, n, prime);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u64>>, cols: usize, prime: u64) -> Result<Self, BackendError> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(BackendError::ShapeMismatch(format!(
                "row of length {} in a matrix with {cols} columns",
                r.len()
            )));
        }
        let n = rows.len();
        let data = rows.into_iter().flatten().map(|v| v % prime).collect();
        Ok(Matrix { rows: n, cols, prime, data })
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.prime;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, BackendError> {
        if self.cols != rhs.rows || self.prime != rhs.prime {
            return Err(BackendError::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let p = self.prime;
        let mut out = Matrix::zero(self.rows, rhs.cols, p);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = (out.get(i, j) + a * rhs.get(k, j)) % p;
                    out.data[i * out.cols + j] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix, BackendError> {
        if self.rows != rhs.rows || self.cols != rhs.cols || self.prime != rhs.prime {
            return Err(BackendError::ShapeMismatch("matrix difference".into()));
        }
        let p = self.prime;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a + p - b) % p)
            .collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, prime: p, data })
    }

    pub fn apply(&self, v: &[u64]) -> Result<Vec<u64>, BackendError> {
        if v.len() != self.cols {
            return Err(BackendError::ShapeMismatch(format!(
                "vector of length {} under a {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let p = self.prime;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (a, b)| (acc + a * b) % p)
            })
            .collect())
    }

    /// In-place reduction to row-reduced echelon form; returns the rank.
    pub fn rref(&mut self) -> usize {
        let p = self.prime;
        let mut pivot_row = 0;
        for col in 0..self.cols {
            let Some(src) = (pivot_row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(pivot_row, src);
            let inv = mod_inverse(self.get(pivot_row, col), p);
            for c in 0..self.cols {
                let v = (self.get(pivot_row, c) * inv) % p;
                self.set(pivot_row, c, v);
            }
            for r in 0..self.rows {
                if r != pivot_row && self.get(r, col) != 0 {
                    let factor = self.get(r, col);
                    for c in 0..self.cols {
                        let v = (self.get(r, c) + (p - factor) * self.get(pivot_row, c)) % p;
                        self.set(r, c, v);
                    }
                }
            }
            pivot_row += 1;
            if pivot_row == self.rows {
                break;
            }
        }
        pivot_row
    }

    pub fn rank(&self) -> usize {
        self.clone().rref()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_bijective(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Matrix, BackendError> {
        if self.rows != self.cols {
            return Err(BackendError::NotInvertible);
        }
        let n = self.rows;
        let p = self.prime;
        // eliminate on [self | I]
        let mut aug = Matrix::zero(n, 2 * n, p);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let rank = aug.rref();
        if rank < n || (0..n).any(|i| aug.get(i, i) != 1) {
            return Err(BackendError::NotInvertible);
        }
        let mut inv = Matrix::zero(n, n, p);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, aug.get(r, n + c));
            }
        }
        Ok(inv)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// A subspace of GF(p)^dim, stored as a row-reduced echelon basis so that
/// equal subspaces compare equal. An empty basis denotes {0}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub ambient: usize,
    pub prime: u64,
    /// rank x ambient matrix in RREF, one basis vector per row
    pub basis: Matrix,
}

impl Subspace {
    pub fn is_zero(&self) -> bool {
        self.basis.rows == 0
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn from_spanning_rows(rows: Vec<Vec<u64>>, ambient: usize, prime: u64) -> Result<Self, BackendError> {
        let mut m = Matrix::from_rows(rows, ambient, prime)?;
        let rank = m.rref();
        let basis = Matrix::from_rows(
            (0..rank).map(|r| m.row(r).to_vec()).collect(),
            ambient,
            prime,
        )?;
        Ok(Subspace { ambient, prime, basis })
    }
}

/// Canonical basis of the image (column space) of a linear map.
pub fn image_basis(f: &Matrix) -> Subspace {
    let cols: Vec<Vec<u64>> = (0..f.cols)
        .map(|c| (0..f.rows).map(|r| f.get(r, c)).collect())
        .collect();
    Subspace::from_spanning_rows(cols, f.rows, f.prime).expect("columns have ambient length")
}

/// Canonical basis of f(V) for a subspace V of the source of f.
pub fn restrict_image(f: &Matrix, v: &Subspace) -> Result<Subspace, BackendError> {
    if v.ambient != f.cols || v.prime != f.prime {
        return Err(BackendError::ShapeMismatch(format!(
            "subspace of GF({})^{} under a {}x{} map over GF({})",
            v.prime, v.ambient, f.rows, f.cols, f.prime
        )));
    }
    let images: Vec<Vec<u64>> = (0..v.basis.rows)
        .map(|r| f.apply(v.basis.row(r)))
        .collect::<Result<_, _>>()?;
    Subspace::from_spanning_rows(images, f.rows, f.prime)
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is prime, a != 0 mod p
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

impl Morphism {
    pub fn identity_of(obj: &Object) -> Morphism {
        match obj {
            Object::Set { labels } => Morphism::Map(SetMap::identity(labels.len())),
            Object::Space { dim, prime } => Morphism::Linear(Matrix::identity(*dim, *prime)),
        }
    }

    pub fn source_size(&self) -> usize {
        match self {
            Morphism::Map(m) => m.source,
            Morphism::Linear(m) => m.cols,
        }
    }

    pub fn target_size(&self) -> usize {
        match self {
            Morphism::Map(m) => m.target,
            Morphism::Linear(m) => m.rows,
        }
    }

    pub fn is_mono(&self) -> bool {
        match self {
            Morphism::Map(m) => m.is_injective(),
            Morphism::Linear(m) => m.is_injective(),
        }
    }

    pub fn is_iso(&self) -> bool {
        match self {
            Morphism::Map(m) => m.is_bijective(),
            Morphism::Linear(m) => m.is_bijective(),
        }
    }

    pub fn inverse(&self) -> Result<Morphism, BackendError> {
        match self {
            Morphism::Map(m) => Ok(Morphism::Map(m.inverse()?)),
            Morphism::Linear(m) => Ok(Morphism::Linear(m.inverse()?)),
        }
    }
}

/// Diagrammatic composition: `f` then `g`.
pub fn compose(f: &Morphism, g: &Morphism) -> Result<Morphism, BackendError> {
    match (f, g) {
        (Morphism::Map(f), Morphism::Map(g)) => {
            if f.target != g.source {
                return Err(BackendError::ShapeMismatch(format!(
                    "composing map into {} with map from {}",
                    f.target, g.source
                )));
            }
            let table = f.table.iter().map(|&i| g.table[i]).collect();
            Ok(Morphism::Map(SetMap { source: f.source, target: g.target, table }))
        }
        (Morphism::Linear(f), Morphism::Linear(g)) => Ok(Morphism::Linear(g.mul(f)?)),
        _ => Err(BackendError::MixedBackends),
    }
}
