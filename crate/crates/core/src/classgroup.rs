//! The class group `Cl(X)` as the cokernel of the ray matrix `M -> Z^n`, and
//! the degree map sending a torus-invariant divisor to its class.
//!
//! One Smith decomposition `U R V = D` of the `n x d` ray matrix `R` is
//! computed up front. The class of `a` is read off from `y = U a`: the first
//! `d` coordinates are reduced modulo the invariant factors (those equal to 1
//! drop out, the rest are torsion) and the last `n - d` are the free part.

use std::fmt;

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactlinalg::smith_normal_form;
use crate::fan::Fan;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassGroupError {
  #[error("rays do not span: the ray matrix has rank {rank} < {dim}")]
  NotSpanning { rank: usize, dim: usize },
  #[error("divisor has {got} coefficients, expected {expected}")]
  LengthMismatch { expected: usize, got: usize },
  #[error("class element shape does not match this class group")]
  ShapeMismatch,
  #[error("integer overflow while evaluating the degree map")]
  Overflow,
}

/// Canonical coordinates of a divisor class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassElement {
  pub free:    Vec<i64>,
  pub torsion: Vec<i64>,
}

impl fmt::Display for ClassElement {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{:?}", self.free)?;
    if !self.torsion.is_empty() {
      write!(f, " + torsion {:?}", self.torsion)?;
    }
    Ok(())
  }
}

#[derive(Clone, Debug)]
pub struct ClassGroup {
  n:                  usize,
  dim:                usize,
  free_rank:          usize,
  torsion_invariants: Vec<i64>,
  /// Row indices of `U` that carry torsion coordinates.
  torsion_rows:       Vec<usize>,
  u:                  Vec<Vec<i64>>,
  u_inv:              Vec<Vec<i64>>,
}

fn dot(row: &[i64], v: &[i64]) -> Result<i64, ClassGroupError> {
  let s: i128 = row.iter().zip(v).map(|(&a, &b)| a as i128 * b as i128).sum();
  i64::try_from(s).map_err(|_| ClassGroupError::Overflow)
}

impl ClassGroup {
  pub fn new(fan: &Fan) -> Result<Self, ClassGroupError> {
    let n = fan.n_rays();
    let dim = fan.dim;
    let snf = smith_normal_form(&fan.ray_matrix());
    let diag = snf.diagonal();
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    if rank < dim {
      return Err(ClassGroupError::NotSpanning { rank, dim });
    }
    let mut torsion_invariants = Vec::new();
    let mut torsion_rows = Vec::new();
    for (i, x) in diag.iter().enumerate() {
      let x = x.to_i64().ok_or(ClassGroupError::Overflow)?;
      if x > 1 {
        torsion_invariants.push(x);
        torsion_rows.push(i);
      }
    }
    let u = snf.u.to_i64_rows().ok_or(ClassGroupError::Overflow)?;
    let u_inv = snf.u_inv.to_i64_rows().ok_or(ClassGroupError::Overflow)?;
    Ok(Self { n, dim, free_rank: n - dim, torsion_invariants, torsion_rows, u, u_inv })
  }

  pub fn n_rays(&self) -> usize { self.n }

  pub fn free_rank(&self) -> usize { self.free_rank }

  pub fn torsion_invariants(&self) -> &[i64] { &self.torsion_invariants }

  pub fn zero(&self) -> ClassElement {
    ClassElement { free: vec![0; self.free_rank], torsion: vec![0; self.torsion_invariants.len()] }
  }

  /// `[Σ a_ρ D_ρ]`.
  pub fn divisor_class(&self, a: &[i64]) -> Result<ClassElement, ClassGroupError> {
    if a.len() != self.n {
      return Err(ClassGroupError::LengthMismatch { expected: self.n, got: a.len() });
    }
    let free = self.u[self.dim..].iter().map(|row| dot(row, a)).collect::<Result<_, _>>()?;
    let torsion = self
      .torsion_rows
      .iter()
      .zip(&self.torsion_invariants)
      .map(|(&r, &m)| dot(&self.u[r], a).map(|y| y.rem_euclid(m)))
      .collect::<Result<_, _>>()?;
    Ok(ClassElement { free, torsion })
  }

  /// Some divisor whose class is `c`.
  pub fn particular_preimage(&self, c: &ClassElement) -> Result<Vec<i64>, ClassGroupError> {
    self.check_shape(c)?;
    let mut y = vec![0i64; self.n];
    for (&r, &t) in self.torsion_rows.iter().zip(&c.torsion) {
      y[r] = t;
    }
    y[self.dim..].copy_from_slice(&c.free);
    self.u_inv.iter().map(|row| dot(row, &y)).collect()
  }

  pub fn add(&self, a: &ClassElement, b: &ClassElement) -> Result<ClassElement, ClassGroupError> {
    self.check_shape(a)?;
    self.check_shape(b)?;
    Ok(ClassElement {
      free:    a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
      torsion: a
        .torsion
        .iter()
        .zip(&b.torsion)
        .zip(&self.torsion_invariants)
        .map(|((x, y), m)| (x + y).rem_euclid(*m))
        .collect(),
    })
  }

  fn check_shape(&self, c: &ClassElement) -> Result<(), ClassGroupError> {
    if c.free.len() != self.free_rank || c.torsion.len() != self.torsion_invariants.len() {
      return Err(ClassGroupError::ShapeMismatch);
    }
    Ok(())
  }
}

impl fmt::Display for ClassGroup {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut parts = Vec::new();
    match self.free_rank {
      0 => {},
      1 => parts.push("Z".to_string()),
      r => parts.push(format!("Z^{r}")),
    }
    parts.extend(self.torsion_invariants.iter().map(|t| format!("Z/{t}")));
    if parts.is_empty() {
      parts.push("0".to_string());
    }
    write!(f, "{}", parts.join(" + "))
  }
}

pub fn class_group(fan: &Fan) -> Result<ClassGroup, ClassGroupError> { ClassGroup::new(fan) }

/// The `d` columns of the ray matrix: the divisors of characters, which
/// generate every degree-zero exponent shift.
pub fn kernel_basis(fan: &Fan) -> Vec<Vec<i64>> {
  (0..fan.dim).map(|j| fan.rays.iter().map(|r| r[j]).collect()).collect()
}
