//! Exact linear algebra over prime fields GF(p).
//!
//! Vectors are plain `u8` slices with entries in `[0, p)`. A [`RowSpace`]
//! stores a subspace by its reduced row-echelon basis, so two row spaces are
//! equal as subspaces exactly when their row lists are equal.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime modulus below 256.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u8);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..256).contains(&p) || !(2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(Prime(p as u8))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u8 {
        x.rem_euclid(self.0 as i64) as u8
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.0 as u16) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.0 as u16 - b as u16) % self.0 as u16) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.0 as u16) as u8
    }

    pub fn pow(self, a: u8, mut e: u32) -> u8 {
        let mut base = a % self.0;
        let mut acc = 1u8;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self, a: u8) -> u8 {
        assert!(!a.is_multiple_of(self.0), "zero has no inverse");
        if self.0 == 2 {
            return 1;
        }
        self.pow(a, self.get() - 2)
    }

    pub fn is_square(self, a: u8) -> bool {
        a == 0 || self.0 == 2 || self.pow(a, (self.get() - 1) / 2) == 1
    }

    pub fn dot(self, a: &[u8], b: &[u8]) -> u8 {
        let s: u32 = a.iter().zip(b).map(|(&x, &y)| x as u32 * y as u32).sum();
        (s % self.get()) as u8
    }

    /// `a += c * b`
    pub fn axpy(self, a: &mut [u8], c: u8, b: &[u8]) {
        if c == 0 {
            return;
        }
        for (x, &y) in a.iter_mut().zip(b) {
            *x = self.add(*x, self.mul(c, y));
        }
    }

    pub fn scale(self, a: &mut [u8], c: u8) {
        for x in a.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.get()
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Scales `v` so that its first nonzero entry is 1. Returns false for the
/// zero vector.
pub fn normalize(p: Prime, v: &mut [u8]) -> bool {
    match v.iter().position(|&x| x != 0) {
        Some(i) => {
            let c = p.inv(v[i]);
            if c != 1 {
                p.scale(v, c);
            }
            true
        }
        None => false,
    }
}

/// Row-reduces in place, drops zero rows, returns the pivot columns.
pub(crate) fn rref_rows(p: Prime, rows: &mut Vec<Vec<u8>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = p.inv(rows[r][c]);
        if inv != 1 {
            p.scale(&mut rows[r], inv);
        }
        let pivot_row = std::mem::take(&mut rows[r]);
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = p.neg(row[c]);
                p.axpy(&mut row[c..], f, &pivot_row[c..]);
            }
        }
        rows[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// A subspace of GF(p)^d in canonical reduced row-echelon form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowSpace {
    p: Prime,
    ambient: usize,
    rows: Vec<Vec<u8>>,
}

impl fmt::Debug for RowSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RowSpace(GF({})^{}: [", self.p, self.ambient)?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            for x in r {
                write!(f, "{x}")?;
            }
        }
        write!(f, "])")
    }
}

/// Canonical row space of `matrix`. Entries are reduced mod `p`.
pub fn rref_canonical(p: Prime, ambient: usize, matrix: &[Vec<u8>]) -> Result<RowSpace> {
    let mut rows = Vec::with_capacity(matrix.len());
    for row in matrix {
        if row.len() != ambient {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                found: row.len(),
            });
        }
        rows.push(row.iter().map(|&x| x % p.0).collect());
    }
    Ok(RowSpace::from_rows_unchecked(p, ambient, rows))
}

fn check_compatible(a: &RowSpace, b: &RowSpace) -> Result<()> {
    if a.p != b.p {
        return Err(Error::ModulusMismatch(a.p.get(), b.p.get()));
    }
    if a.ambient != b.ambient {
        return Err(Error::DimensionMismatch {
            expected: a.ambient,
            found: b.ambient,
        });
    }
    Ok(())
}

/// Intersection and sum of two subspaces.
pub fn meet_join(a: &RowSpace, b: &RowSpace) -> Result<(RowSpace, RowSpace)> {
    check_compatible(a, b)?;
    Ok((a.meet(b), a.join(b)))
}

/// True iff `b` is a subspace of `a`.
pub fn contains(a: &RowSpace, b: &RowSpace) -> Result<bool> {
    check_compatible(a, b)?;
    Ok(a.includes(b))
}

impl RowSpace {
    pub(crate) fn from_rows_unchecked(p: Prime, ambient: usize, mut rows: Vec<Vec<u8>>) -> Self {
        rref_rows(p, &mut rows);
        RowSpace { p, ambient, rows }
    }

    pub fn zero(p: Prime, ambient: usize) -> Self {
        RowSpace {
            p,
            ambient,
            rows: Vec::new(),
        }
    }

    pub fn full(p: Prime, ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| {
                let mut r = vec![0; ambient];
                r[i] = 1;
                r
            })
            .collect();
        RowSpace { p, ambient, rows }
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Vector-space dimension.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Projective dimension; -1 for the zero subspace.
    pub fn proj_dim(&self) -> i32 {
        self.rows.len() as i32 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    fn pivot(row: &[u8]) -> usize {
        row.iter().position(|&x| x != 0).expect("rref rows are nonzero")
    }

    /// Reduces `v` modulo this subspace; the result is zero iff `v` lies in it.
    pub fn reduce(&self, v: &mut [u8]) {
        for row in &self.rows {
            let c = Self::pivot(row);
            if v[c] != 0 {
                let f = self.p.neg(v[c]);
                self.p.axpy(&mut v[c..], f, &row[c..]);
            }
        }
    }

    pub fn contains_vector(&self, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Subspace inclusion `other ⊆ self`. Assumes compatible spaces.
    pub fn includes(&self, other: &RowSpace) -> bool {
        debug_assert_eq!(self.ambient, other.ambient);
        other.rank() <= self.rank() && other.rows.iter().all(|r| self.contains_vector(r))
    }

    pub fn join(&self, other: &RowSpace) -> RowSpace {
        debug_assert_eq!(self.ambient, other.ambient);
        if self.includes(other) {
            return self.clone();
        }
        let rows = self.rows.iter().chain(&other.rows).cloned().collect();
        RowSpace::from_rows_unchecked(self.p, self.ambient, rows)
    }

    pub fn join_vector(&self, v: &[u8]) -> RowSpace {
        let mut rows = self.rows.clone();
        rows.push(v.to_vec());
        RowSpace::from_rows_unchecked(self.p, self.ambient, rows)
    }

    /// Dimension of `self + other` without building its canonical form.
    pub fn join_rank(&self, other: &RowSpace) -> usize {
        let mut extra = 0;
        let mut acc = self.clone();
        for r in &other.rows {
            let mut w = r.clone();
            acc.reduce(&mut w);
            if w.iter().any(|&x| x != 0) {
                acc = acc.join_vector(&w);
                extra += 1;
            }
        }
        self.rank() + extra
    }

    /// Intersection by the Zassenhaus sum–intersection algorithm.
    pub fn meet(&self, other: &RowSpace) -> RowSpace {
        debug_assert_eq!(self.ambient, other.ambient);
        if self.includes(other) {
            return other.clone();
        }
        if other.includes(self) {
            return self.clone();
        }
        let d = self.ambient;
        let mut m: Vec<Vec<u8>> = Vec::with_capacity(self.rank() + other.rank());
        for r in &self.rows {
            let mut row = r.clone();
            row.extend_from_slice(r);
            m.push(row);
        }
        for r in &other.rows {
            let mut row = r.clone();
            row.extend(std::iter::repeat_n(0, d));
            m.push(row);
        }
        rref_rows(self.p, &mut m);
        let rows = m
            .into_iter()
            .filter(|row| row[..d].iter().all(|&x| x == 0))
            .map(|row| row[d..].to_vec())
            .collect();
        RowSpace::from_rows_unchecked(self.p, d, rows)
    }

    /// Null space `{x : f·x = 0 for every functional f}`.
    pub fn kernel(p: Prime, ambient: usize, functionals: &[Vec<u8>]) -> RowSpace {
        let mut m: Vec<Vec<u8>> = functionals.to_vec();
        let pivots = rref_rows(p, &mut m);
        let mut basis = Vec::with_capacity(ambient - pivots.len());
        for free in (0..ambient).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u8; ambient];
            v[free] = 1;
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = p.neg(row[free]);
            }
            basis.push(v);
        }
        RowSpace::from_rows_unchecked(p, ambient, basis)
    }

    /// Rows extending a basis of `sub` to a basis of `self`.
    pub fn complement_of(&self, sub: &RowSpace) -> Vec<Vec<u8>> {
        let mut acc = sub.clone();
        let mut out = Vec::new();
        for r in &self.rows {
            if !acc.contains_vector(r) {
                acc = acc.join_vector(r);
                out.push(r.clone());
            }
        }
        out
    }

    /// All vectors `Σ c_i row_i` for `c` ranging over GF(p)^rank, in
    /// lexicographic order of the coefficient vectors.
    pub fn combination(&self, coeffs: &[u8]) -> Vec<u8> {
        let mut v = vec![0u8; self.ambient];
        for (c, row) in coeffs.iter().zip(&self.rows) {
            self.p.axpy(&mut v, *c, row);
        }
        v
    }

    /// Normalized representatives of the 1-dimensional subspaces, sorted.
    pub fn projective_points(&self) -> Vec<Vec<u8>> {
        let r = self.rank();
        let mut out = Vec::new();
        for_each_vector(self.p, r, |c| {
            if c.iter().find(|&&x| x != 0) == Some(&1) {
                out.push(self.combination(c));
            }
        });
        out.sort();
        out
    }

    /// Every subspace `X` with `self ⊆ X ⊆ upper` and `rank(X) = rank`.
    pub fn subspaces_between(&self, upper: &RowSpace, rank: usize) -> Vec<RowSpace> {
        if !upper.includes(self) || rank < self.rank() || rank > upper.rank() {
            return Vec::new();
        }
        let comp = upper.complement_of(self);
        let mut out = Vec::new();
        for_each_subspace(self.p, comp.len(), rank - self.rank(), |coeffs| {
            let mut rows = self.rows.clone();
            for c in coeffs {
                let mut v = vec![0u8; self.ambient];
                for (x, b) in c.iter().zip(&comp) {
                    self.p.axpy(&mut v, *x, b);
                }
                rows.push(v);
            }
            out.push(RowSpace::from_rows_unchecked(self.p, self.ambient, rows));
        });
        out.sort();
        out
    }
}

/// Calls `f` on every vector of GF(p)^len in lexicographic order.
pub fn for_each_vector(p: Prime, len: usize, mut f: impl FnMut(&[u8])) {
    let mut v = vec![0u8; len];
    loop {
        f(&v);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            v[i] += 1;
            if v[i] as u32 == p.get() {
                v[i] = 0;
            } else {
                break;
            }
        }
    }
}

/// Calls `f` with the RREF basis of every `rank`-dimensional subspace of
/// GF(p)^dim, each exactly once.
pub fn for_each_subspace(p: Prime, dim: usize, rank: usize, mut f: impl FnMut(&[Vec<u8>])) {
    if rank > dim {
        return;
    }
    for pivots in combinations(dim, rank) {
        // free slots: (row, column) with column > pivot[row] and not a pivot
        let slots: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &pc)| {
                let pivots = &pivots;
                (pc + 1..dim)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let mut rows: Vec<Vec<u8>> = pivots
            .iter()
            .map(|&pc| {
                let mut r = vec![0u8; dim];
                r[pc] = 1;
                r
            })
            .collect();
        for_each_vector(p, slots.len(), |vals| {
            for (&(r, c), &x) in slots.iter().zip(vals) {
                rows[r][c] = x;
            }
            f(&rows);
        });
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    if k <= n {
        go(0, n, k, &mut cur, &mut out);
    }
    out
}

/// Expresses vectors in a fixed independent basis.
#[derive(Clone, Debug)]
pub struct LinearSolver {
    p: Prime,
    reduced: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    transform: Vec<Vec<u8>>,
}

impl LinearSolver {
    pub fn new(p: Prime, basis: &[Vec<u8>]) -> Result<Self> {
        let r = basis.len();
        let d = basis.first().map_or(0, Vec::len);
        let mut m: Vec<Vec<u8>> = basis
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let mut row = b.clone();
                row.extend((0..r).map(|j| u8::from(i == j)));
                row
            })
            .collect();
        let pivots = rref_rows(p, &mut m);
        if m.len() != r || pivots.iter().any(|&c| c >= d) {
            return Err(Error::pre("solver basis is linearly dependent"));
        }
        let (reduced, transform) = m.into_iter().map(|row| (row[..d].to_vec(), row[d..].to_vec())).unzip();
        Ok(LinearSolver {
            p,
            reduced,
            pivots,
            transform,
        })
    }

    /// Coefficients `c` with `v = Σ c_i basis_i`, or `None` if `v` is outside the span.
    pub fn solve(&self, v: &[u8]) -> Option<Vec<u8>> {
        let p = self.p;
        let mut w = v.to_vec();
        let mut c = vec![0u8; self.transform.len()];
        for ((row, &pc), t) in self.reduced.iter().zip(&self.pivots).zip(&self.transform) {
            let a = w[pc];
            if a != 0 {
                p.axpy(&mut w, p.neg(a), row);
                p.axpy(&mut c, a, t);
            }
        }
        w.iter().all(|&x| x == 0).then_some(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(p: u32, rows: &[&[u8]]) -> RowSpace {
        let p = Prime::new(p).unwrap();
        let rows: Vec<Vec<u8>> = rows.iter().map(|r| r.to_vec()).collect();
        rref_canonical(p, rows[0].len(), &rows).unwrap()
    }

    #[test]
    fn primes() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(251).is_ok());
        assert_eq!(Prime::new(1), Err(Error::InvalidModulus(1)));
        assert_eq!(Prime::new(9), Err(Error::InvalidModulus(9)));
        assert_eq!(Prime::new(257), Err(Error::InvalidModulus(257)));
        let p = Prime::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(p.mul(a, p.inv(a)), 1);
        }
    }

    #[test]
    fn rref_examples() {
        assert_eq!(rs(2, &[&[0, 1], &[1, 0]]).rows(), &[vec![1, 0], vec![0, 1]]);
        assert_eq!(rs(2, &[&[1, 1], &[1, 1]]).rows(), &[vec![1, 1]]);
        assert_eq!(rs(5, &[&[2, 4], &[1, 2]]).rows(), &[vec![1, 2]]);
    }

    #[test]
    fn rref_rejects_ragged_rows() {
        let p = Prime::new(2).unwrap();
        let err = rref_canonical(p, 2, &[vec![1, 0], vec![1]]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 1 });
    }

    #[test]
    fn meet_join_examples() {
        let a = rs(2, &[&[1, 0, 0]]);
        let b = rs(2, &[&[0, 1, 0]]);
        let (m, j) = meet_join(&a, &b).unwrap();
        assert_eq!(m.rank(), 0);
        assert_eq!(j.rank(), 2);

        let (m, j) = meet_join(&a, &a).unwrap();
        assert_eq!((m, j), (a.clone(), a));

        let a = rs(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let b = rs(3, &[&[0, 1, 0], &[0, 0, 1]]);
        let (m, j) = meet_join(&a, &b).unwrap();
        assert_eq!(m, rs(3, &[&[0, 1, 0]]));
        assert_eq!(j.rank(), 3);
    }

    #[test]
    fn mismatches_are_errors() {
        let a = rs(2, &[&[1, 0, 0]]);
        let b = rs(3, &[&[1, 0, 0]]);
        assert_eq!(meet_join(&a, &b).unwrap_err(), Error::ModulusMismatch(2, 3));
        let c = rs(2, &[&[1, 0]]);
        assert!(matches!(contains(&a, &c), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn contains_examples() {
        let p = Prime::new(2).unwrap();
        let full = RowSpace::full(p, 3);
        assert!(contains(&full, &rs(2, &[&[1, 1, 0]])).unwrap());
        assert!(!contains(&rs(2, &[&[1, 0]]), &rs(2, &[&[0, 1]])).unwrap());
        assert!(contains(&rs(2, &[&[1, 1, 0], &[0, 0, 1]]), &rs(2, &[&[1, 1, 1]])).unwrap());
    }

    #[test]
    fn kernel_is_annihilator() {
        let p = Prime::new(3).unwrap();
        let f = vec![vec![1, 2, 0, 1], vec![0, 1, 1, 1]];
        let k = RowSpace::kernel(p, 4, &f);
        assert_eq!(k.rank(), 2);
        for r in k.rows() {
            for g in &f {
                assert_eq!(p.dot(r, g), 0);
            }
        }
    }

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        let p = Prime::new(2).unwrap();
        let mut n = 0;
        for_each_subspace(p, 4, 2, |_| n += 1);
        assert_eq!(n, 35);
        let p3 = Prime::new(3).unwrap();
        let mut n = 0;
        for_each_subspace(p3, 3, 1, |_| n += 1);
        assert_eq!(n, 13);
    }

    #[test]
    fn solver_recovers_coefficients() {
        let p = Prime::new(3).unwrap();
        let basis = vec![vec![1, 1, 0, 2], vec![0, 2, 1, 1]];
        let s = LinearSolver::new(p, &basis).unwrap();
        let mut v = vec![0u8; 4];
        p.axpy(&mut v, 2, &basis[0]);
        p.axpy(&mut v, 1, &basis[1]);
        assert_eq!(s.solve(&v), Some(vec![2, 1]));
        assert_eq!(s.solve(&[1, 0, 0, 0]), None);
        assert!(LinearSolver::new(p, &[vec![1, 1], vec![2, 2]]).is_err());
    }
}
