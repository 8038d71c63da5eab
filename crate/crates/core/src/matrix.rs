//! Dense matrices over any [`Scalar`] ring.
//!
//! Determinants are computed division-free (subset dynamic programming over
//! columns), so `det`, `adjugate` and `inverse` work over local rings and
//! polynomial rings alike. Sizes in this crate stay small (m <= 6).

use std::fmt;

use crate::scalar::Scalar;
use crate::witt::WittError;

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        assert!(r > 0, "matrix needs at least one row");
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize, proto: &S) -> Self {
        let z = proto.zero_like();
        Self::from_fn(rows, cols, |_, _| z.clone())
    }

    pub fn identity(m: usize, proto: &S) -> Self {
        let z = proto.zero_like();
        let o = proto.one_like();
        Self::from_fn(m, m, |i, j| if i == j { o.clone() } else { z.clone() })
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let z = entries[0].zero_like();
        Self::from_fn(entries.len(), entries.len(), |i, j| {
            if i == j {
                entries[i].clone()
            } else {
                z.clone()
            }
        })
    }

    /// Integer matrix mapped into the ring of `proto`.
    pub fn from_ints(rows: &[Vec<i64>], proto: &S) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| proto.int_like(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn row_vecs(&self) -> Vec<Vec<S>> {
        self.data.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    pub fn proto(&self) -> &S {
        &self.data[0]
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<T: Scalar, E>(&self, f: impl Fn(&S) -> Result<T, E>) -> Result<Matrix<T>, E> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let zero = self.proto().zero_like().truncate(
            self.proto().precision().min(rhs.proto().precision()),
        );
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = zero.clone();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(rhs.get(k, j)));
            }
            acc
        })
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|a| a.mul(s))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    pub fn col(&self, j: usize) -> Self {
        self.select_cols(&[j])
    }

    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "row count mismatch");
        Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn frobenius(&self) -> Self {
        self.map(|a| a.frobenius())
    }

    pub fn reduce_mod_p(&self) -> Self {
        self.map(|a| a.reduce_mod_p())
    }

    pub fn truncate(&self, prec: u32) -> Self {
        self.map(|a| a.truncate(prec))
    }

    pub fn div_p_exact(&self) -> Result<Self, WittError> {
        self.try_map(|a| a.div_p_exact())
    }

    pub fn times_p(&self) -> Self {
        self.map(|a| a.times_p())
    }

    /// Smallest precision among the entries.
    pub fn precision(&self) -> u32 {
        self.data.iter().map(|a| a.precision()).min().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let a = self.get(i, j);
                    if i == j {
                        a.is_one()
                    } else {
                        a.is_zero()
                    }
                })
            })
    }

    /// Equality after truncating both sides to the smaller precision.
    pub fn congruent(&self, rhs: &Self) -> bool {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return false;
        }
        let prec = self.precision().min(rhs.precision());
        self.truncate(prec) == rhs.truncate(prec)
    }

    /// Determinant of the submatrix on `rows` x `cols` (equal lengths).
    fn minor(&self, rows: &[usize], cols: &[usize]) -> S {
        let k = rows.len();
        debug_assert_eq!(k, cols.len());
        let one = self.proto().one_like();
        if k == 0 {
            return one;
        }
        // dp[mask]: signed sum over injections of the first popcount(mask)
        // rows into the column set `mask`.
        let mut dp: Vec<Option<S>> = vec![None; 1 << k];
        dp[0] = Some(one);
        for mask in 0..(1usize << k) {
            let Some(val) = dp[mask].clone() else { continue };
            if val.is_zero() {
                continue;
            }
            let r = mask.count_ones() as usize;
            if r == k {
                continue;
            }
            for c in 0..k {
                if mask & (1 << c) != 0 {
                    continue;
                }
                let a = self.get(rows[r], cols[c]);
                if a.is_zero() {
                    continue;
                }
                let mut term = val.mul(a);
                if (mask >> (c + 1)).count_ones() % 2 == 1 {
                    term = term.neg();
                }
                let next = mask | (1 << c);
                dp[next] = Some(match dp[next].take() {
                    Some(acc) => acc.add(&term),
                    None => term,
                });
            }
        }
        dp[(1 << k) - 1]
            .clone()
            .unwrap_or_else(|| self.proto().zero_like())
    }

    pub fn det(&self) -> S {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let idx: Vec<usize> = (0..self.rows).collect();
        self.minor(&idx, &idx)
    }

    pub fn adjugate(&self) -> Self {
        assert!(self.is_square(), "adjugate of a non-square matrix");
        let m = self.rows;
        if m == 1 {
            return Self::identity(1, self.proto());
        }
        Self::from_fn(m, m, |i, j| {
            // (i, j) entry is the (j, i) cofactor
            let rows: Vec<usize> = (0..m).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..m).filter(|&c| c != i).collect();
            let c = self.minor(&rows, &cols);
            if (i + j) % 2 == 1 {
                c.neg()
            } else {
                c
            }
        })
    }

    /// Inverse over the ring; `None` unless the determinant is a unit.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        let d_inv = d.inverse()?;
        Some(self.adjugate().scale(&d_inv))
    }

    /// Rank over the fraction field of the (domain) ring, by minors.
    pub fn rank(&self) -> usize {
        let max = self.rows.min(self.cols);
        let mut rank = 0;
        for k in 1..=max {
            let found = subsets(self.rows, k).into_iter().any(|rs| {
                subsets(self.cols, k)
                    .into_iter()
                    .any(|cs| !self.minor(&rs, &cs).is_zero())
            });
            if !found {
                break;
            }
            rank = k;
        }
        rank
    }
}

/// Linear algebra over a field: every nonzero entry must be invertible.
/// Used on residue-field matrices.
impl<S: Scalar> Matrix<S> {
    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(pr) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..a.cols {
                    a.data.swap(pr * a.cols + j, r * a.cols + j);
                }
            }
            let inv = a.get(r, c).inverse().expect("nonzero entries of a field are units");
            for j in 0..a.cols {
                let v = a.get(r, j).mul(&inv);
                a.set(r, j, v);
            }
            for i in 0..a.rows {
                if i == r || a.get(i, c).is_zero() {
                    continue;
                }
                let factor = a.get(i, c).clone();
                for j in 0..a.cols {
                    let v = a.get(i, j).sub(&factor.mul(a.get(r, j)));
                    a.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank_field(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel as columns (possibly with zero columns).
    pub fn kernel_field(&self) -> Option<Self> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        if free.is_empty() {
            return None;
        }
        let mut k = Matrix::zeros(self.cols, free.len(), self.proto());
        for (col, &fc) in free.iter().enumerate() {
            k.set(fc, col, self.proto().one_like());
            for (row, &pc) in pivots.iter().enumerate() {
                k.set(pc, col, r.get(row, fc).neg());
            }
        }
        Some(k)
    }

    /// Some `x` with `self * x = b`, column by column.
    pub fn solve_field(&self, b: &Self) -> Option<Self> {
        assert_eq!(self.rows, b.rows, "row count mismatch");
        let (r, pivots) = self.hstack(b).rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.cols, b.cols, self.proto());
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(row, self.cols + j).clone());
            }
        }
        Some(x)
    }

    pub fn same_column_space(&self, other: &Self) -> bool {
        let r = self.rank_field();
        r == other.rank_field() && r == self.hstack(other).rank_field()
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.cols)).finish()
    }
}

impl<S: fmt::Display> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.data.chunks(self.cols).enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, a) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{a}")?;
            }
        }
        write!(f, "]")
    }
}
