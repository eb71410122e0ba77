//! Exact integer matrices: rank over the rationals, Smith normal form with
//! unimodular transforms, and linear Diophantine solving.
//!
//! Everything here runs on arbitrary-precision integers. The matrices that
//! show up in this crate are small, but Smith reduction can blow intermediate
//! entries up well past `i64` even on a handful of rows.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
  #[error("dimension mismatch: expected {expected}, got {got}")]
  DimensionMismatch { expected: usize, got: usize },
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
  rows:    usize,
  cols:    usize,
  entries: Vec<BigInt>,
}

impl IntegerMatrix {
  pub fn zeros(rows: usize, cols: usize) -> Self {
    Self { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
  }

  pub fn identity(n: usize) -> Self {
    let mut m = Self::zeros(n, n);
    for i in 0..n {
      m[(i, i)] = BigInt::one();
    }
    m
  }

  /// Builds a matrix from rows of machine integers. Panics on ragged input.
  pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
    let cols = rows.first().map_or(0, |r| r.as_ref().len());
    Self::from_rows_with_cols(rows, cols)
  }

  /// Like [`from_rows`](Self::from_rows) but keeps the column count when there are no rows.
  pub fn from_rows_with_cols<R: AsRef<[i64]>>(rows: &[R], cols: usize) -> Self {
    let mut entries = Vec::with_capacity(rows.len() * cols);
    for r in rows {
      let r = r.as_ref();
      assert_eq!(r.len(), cols, "ragged rows");
      entries.extend(r.iter().map(|&x| BigInt::from(x)));
    }
    Self { rows: rows.len(), cols, entries }
  }

  pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LinalgError> {
    if entries.len() != rows * cols {
      return Err(LinalgError::DimensionMismatch { expected: rows * cols, got: entries.len() });
    }
    Ok(Self { rows, cols, entries })
  }

  pub fn rows(&self) -> usize { self.rows }

  pub fn cols(&self) -> usize { self.cols }

  pub fn row(&self, i: usize) -> &[BigInt] { &self.entries[i * self.cols..(i + 1) * self.cols] }

  pub fn transpose(&self) -> Self {
    let mut t = Self::zeros(self.cols, self.rows);
    for i in 0..self.rows {
      for j in 0..self.cols {
        t[(j, i)] = self[(i, j)].clone();
      }
    }
    t
  }

  pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
    if self.cols != other.rows {
      return Err(LinalgError::DimensionMismatch { expected: self.cols, got: other.rows });
    }
    let mut out = Self::zeros(self.rows, other.cols);
    for i in 0..self.rows {
      for k in 0..self.cols {
        let a = &self[(i, k)];
        if a.is_zero() {
          continue;
        }
        for j in 0..other.cols {
          let prod = a * &other[(k, j)];
          out[(i, j)] += prod;
        }
      }
    }
    Ok(out)
  }

  pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
    if v.len() != self.cols {
      return Err(LinalgError::DimensionMismatch { expected: self.cols, got: v.len() });
    }
    Ok(
      (0..self.rows)
        .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
        .collect(),
    )
  }

  /// Converts every entry to `i64`, or `None` if any entry does not fit.
  pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
    (0..self.rows)
      .map(|i| self.row(i).iter().map(|x| i64::try_from(x).ok()).collect())
      .collect()
  }

  fn swap_rows(&mut self, a: usize, b: usize) {
    if a == b {
      return;
    }
    for j in 0..self.cols {
      self.entries.swap(a * self.cols + j, b * self.cols + j);
    }
  }

  fn swap_cols(&mut self, a: usize, b: usize) {
    if a == b {
      return;
    }
    for i in 0..self.rows {
      self.entries.swap(i * self.cols + a, i * self.cols + b);
    }
  }

  /// row[dst] += factor * row[src]
  fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
    if factor.is_zero() {
      return;
    }
    for j in 0..self.cols {
      let v = &self.entries[src * self.cols + j] * factor;
      self.entries[dst * self.cols + j] += v;
    }
  }

  /// col[dst] += factor * col[src]
  fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
    if factor.is_zero() {
      return;
    }
    for i in 0..self.rows {
      let v = &self.entries[i * self.cols + src] * factor;
      self.entries[i * self.cols + dst] += v;
    }
  }

  fn negate_row(&mut self, i: usize) {
    for j in 0..self.cols {
      let e = &mut self.entries[i * self.cols + j];
      *e = -std::mem::take(e);
    }
  }

  fn negate_col(&mut self, j: usize) {
    for i in 0..self.rows {
      let e = &mut self.entries[i * self.cols + j];
      *e = -std::mem::take(e);
    }
  }

  /// Determinant by Bareiss elimination. Requires a square matrix.
  pub fn determinant(&self) -> Result<BigInt, LinalgError> {
    if self.rows != self.cols {
      return Err(LinalgError::DimensionMismatch { expected: self.rows, got: self.cols });
    }
    let n = self.rows;
    if n == 0 {
      return Ok(BigInt::one());
    }
    let mut m = self.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
      if m[(k, k)].is_zero() {
        match (k + 1..n).find(|&r| !m[(r, k)].is_zero()) {
          Some(r) => {
            m.swap_rows(k, r);
            sign = -sign;
          },
          None => return Ok(BigInt::zero()),
        }
      }
      for i in k + 1..n {
        for j in k + 1..n {
          let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
          m[(i, j)] = v;
        }
      }
      prev = m[(k, k)].clone();
    }
    Ok(sign * &m[(n - 1, n - 1)])
  }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
  type Output = BigInt;

  fn index(&self, (i, j): (usize, usize)) -> &BigInt { &self.entries[i * self.cols + j] }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
  fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
    &mut self.entries[i * self.cols + j]
  }
}

impl fmt::Debug for IntegerMatrix {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "IntegerMatrix {}x{} [", self.rows, self.cols)?;
    for i in 0..self.rows {
      let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
      write!(f, "[{}]", row.join(", "))?;
    }
    write!(f, "]")
  }
}

/// Rank over the rationals by fraction-free elimination. Each reduced row is
/// divided by the gcd of its entries so that entries stay small.
pub fn rank(a: &IntegerMatrix) -> usize {
  let mut rows: Vec<Vec<BigInt>> =
    (0..a.rows()).map(|i| a.row(i).to_vec()).filter(|r| r.iter().any(|x| !x.is_zero())).collect();
  let mut rank = 0;
  for col in 0..a.cols() {
    let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
      continue;
    };
    rows.swap(rank, p);
    let pivot_row = std::mem::take(&mut rows[rank]);
    for row in rows.iter_mut().skip(rank + 1) {
      if row[col].is_zero() {
        continue;
      }
      let g = pivot_row[col].gcd(&row[col]);
      let f_pivot = &row[col] / &g;
      let f_row = &pivot_row[col] / &g;
      let mut content = BigInt::zero();
      for j in col..row.len() {
        let v = &row[j] * &f_row - &pivot_row[j] * &f_pivot;
        content = content.gcd(&v);
        row[j] = v;
      }
      if content > BigInt::one() {
        for x in row.iter_mut().skip(col) {
          *x /= &content;
        }
      }
    }
    rows[rank] = pivot_row;
    rank += 1;
    if rank == rows.len() {
      break;
    }
  }
  rank
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal with
/// nonnegative entries forming a divisibility chain. The inverses of the
/// transforms are tracked alongside so no inversion is needed afterwards.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
  pub u:     IntegerMatrix,
  pub u_inv: IntegerMatrix,
  pub d:     IntegerMatrix,
  pub v:     IntegerMatrix,
  pub v_inv: IntegerMatrix,
}

impl SmithDecomposition {
  /// Diagonal entries `d_1 | d_2 | ...`, including trailing zeros, of length `min(rows, cols)`.
  pub fn diagonal(&self) -> Vec<BigInt> {
    (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
  }

  pub fn rank(&self) -> usize { self.diagonal().iter().filter(|x| !x.is_zero()).count() }
}

struct SmithState {
  a:     IntegerMatrix,
  u:     IntegerMatrix,
  u_inv: IntegerMatrix,
  v:     IntegerMatrix,
  v_inv: IntegerMatrix,
}

impl SmithState {
  // Row operations act on A and U from the left; U^{-1} gets the inverse
  // operation as a column operation from the right.
  fn swap_rows(&mut self, i: usize, j: usize) {
    self.a.swap_rows(i, j);
    self.u.swap_rows(i, j);
    self.u_inv.swap_cols(i, j);
  }

  fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
    self.a.add_row_multiple(dst, src, f);
    self.u.add_row_multiple(dst, src, f);
    self.u_inv.add_col_multiple(src, dst, &-f);
  }

  fn negate_row(&mut self, i: usize) {
    self.a.negate_row(i);
    self.u.negate_row(i);
    self.u_inv.negate_col(i);
  }

  fn swap_cols(&mut self, i: usize, j: usize) {
    self.a.swap_cols(i, j);
    self.v.swap_cols(i, j);
    self.v_inv.swap_rows(i, j);
  }

  fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
    self.a.add_col_multiple(dst, src, f);
    self.v.add_col_multiple(dst, src, f);
    self.v_inv.add_row_multiple(src, dst, &-f);
  }

  fn smallest_nonzero(&self, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in t..self.a.rows() {
      for j in t..self.a.cols() {
        let x = self.a[(i, j)].abs();
        if x.is_zero() {
          continue;
        }
        if best.as_ref().is_none_or(|(_, b)| x < *b) {
          best = Some(((i, j), x));
        }
      }
    }
    best.map(|(pos, _)| pos)
  }
}

/// Smith normal form by row/column reduction pivoting on the smallest
/// nonzero entry.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithDecomposition {
  let (rows, cols) = (a.rows(), a.cols());
  let mut s = SmithState {
    a:     a.clone(),
    u:     IntegerMatrix::identity(rows),
    u_inv: IntegerMatrix::identity(rows),
    v:     IntegerMatrix::identity(cols),
    v_inv: IntegerMatrix::identity(cols),
  };

  for t in 0..rows.min(cols) {
    while let Some((pi, pj)) = s.smallest_nonzero(t) {
      s.swap_rows(t, pi);
      s.swap_cols(t, pj);

      let mut dirty = false;
      for i in t + 1..rows {
        if s.a[(i, t)].is_zero() {
          continue;
        }
        let q = s.a[(i, t)].div_floor(&s.a[(t, t)]);
        s.add_row(i, t, &-q);
        dirty |= !s.a[(i, t)].is_zero();
      }
      for j in t + 1..cols {
        if s.a[(t, j)].is_zero() {
          continue;
        }
        let q = s.a[(t, j)].div_floor(&s.a[(t, t)]);
        s.add_col(j, t, &-q);
        dirty |= !s.a[(t, j)].is_zero();
      }
      if dirty {
        continue;
      }

      // Pivot row and column are clear; enforce divisibility on the rest.
      let pivot = s.a[(t, t)].clone();
      let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s.a[(i, j)].is_multiple_of(&pivot)));
      match offender {
        Some(i) => s.add_row(t, i, &BigInt::one()),
        None => break,
      }
    }
    if s.a[(t, t)].is_negative() {
      s.negate_row(t);
    }
  }

  let out = SmithDecomposition { u: s.u, u_inv: s.u_inv, d: s.a, v: s.v, v_inv: s.v_inv };
  debug_assert_eq!(out.u.mul(a).and_then(|ua| ua.mul(&out.v)).as_ref(), Ok(&out.d));
  out
}

/// Some integer solution of `A x = b`, or `Ok(None)` when none exists.
pub fn solve_diophantine(a: &IntegerMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>, LinalgError> {
  if b.len() != a.rows() {
    return Err(LinalgError::DimensionMismatch { expected: a.rows(), got: b.len() });
  }
  let snf = smith_normal_form(a);
  // D y = U b, x = V y
  let c = snf.u.mul_vec(b)?;
  let diag = snf.diagonal();
  let mut y = vec![BigInt::zero(); a.cols()];
  for (i, ci) in c.iter().enumerate() {
    let di = diag.get(i).cloned().unwrap_or_default();
    if di.is_zero() {
      if !ci.is_zero() {
        return Ok(None);
      }
    } else {
      let (q, r) = ci.div_rem(&di);
      if !r.is_zero() {
        return Ok(None);
      }
      y[i] = q;
    }
  }
  Ok(Some(snf.v.mul_vec(&y)?))
}
