//! Integer points of rational polytopes `{x ∈ Z^k | A x ≤ b}`.
//!
//! Fourier–Motzkin elimination is run once, eliminating the last variable
//! first, which yields for every prefix `x_0..x_j` a system whose integer
//! solutions contain the projection of the polytope's integer points.
//! Enumeration then walks the prefixes, bounding one coordinate at a time.
//! Projected rows are divided by the gcd of their coefficients with the
//! right-hand side rounded down, which is valid for integer points and keeps
//! the entries small.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
  #[error("polytope is unbounded in coordinate {0}")]
  Unbounded(usize),
  #[error("integer overflow in polytope bounds")]
  Overflow,
  #[error("inequality has {got} coefficients, expected {expected}")]
  DimensionMismatch { expected: usize, got: usize },
}

/// `coeffs · x ≤ rhs`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
  pub coeffs: Vec<i64>,
  pub rhs:    i64,
}

impl Inequality {
  pub fn new(coeffs: Vec<i64>, rhs: i64) -> Self { Self { coeffs, rhs } }
}

#[derive(Clone, Debug)]
struct Row {
  coeffs: Vec<i128>,
  rhs:    i128,
}

/// A polytope prepared for integer-point enumeration.
#[derive(Clone, Debug)]
pub struct LatticePolytope {
  dim:    usize,
  /// `stages[j]` constrains `x_0..x_j` only; the last stage is the input system.
  stages: Vec<Vec<Row>>,
  empty:  bool,
}

type System = BTreeMap<Vec<BigInt>, BigInt>;

fn insert_row(sys: &mut System, empty: &mut bool, coeffs: Vec<BigInt>, rhs: BigInt) {
  let g = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
  if g.is_zero() {
    if rhs.is_negative() {
      *empty = true;
    }
    return;
  }
  let coeffs: Vec<BigInt> = coeffs.into_iter().map(|c| c / &g).collect();
  let rhs = rhs.div_floor(&g);
  sys.entry(coeffs).and_modify(|r| *r = r.clone().min(rhs.clone())).or_insert(rhs);
}

/// Eliminates the last variable of `sys`.
fn eliminate_last(sys: &System, empty: &mut bool) -> System {
  let mut out = System::new();
  let (mut pos, mut neg) = (Vec::new(), Vec::new());
  for (coeffs, rhs) in sys {
    let (last, rest) = coeffs.split_last().expect("at least one variable");
    if last.is_positive() {
      pos.push((last, rest, rhs));
    } else if last.is_negative() {
      neg.push((last, rest, rhs));
    } else {
      insert_row(&mut out, empty, rest.to_vec(), rhs.clone());
    }
  }
  for (pc, prest, prhs) in &pos {
    for (nc, nrest, nrhs) in &neg {
      let (fp, fn_) = (-*nc, *pc);
      let coeffs = prest.iter().zip(nrest.iter()).map(|(a, b)| a * &fp + b * fn_).collect();
      insert_row(&mut out, empty, coeffs, *prhs * &fp + *nrhs * fn_);
    }
  }
  out
}

fn to_rows(sys: &System) -> Result<Vec<Row>, LatticeError> {
  sys
    .iter()
    .map(|(c, r)| {
      Ok(Row {
        coeffs: c.iter().map(|x| x.to_i128().ok_or(LatticeError::Overflow)).collect::<Result<_, _>>()?,
        rhs:    r.to_i128().ok_or(LatticeError::Overflow)?,
      })
    })
    .collect()
}

impl LatticePolytope {
  pub fn new(dim: usize, ineqs: &[Inequality]) -> Result<Self, LatticeError> {
    let mut empty = false;
    let mut sys = System::new();
    for ineq in ineqs {
      if ineq.coeffs.len() != dim {
        return Err(LatticeError::DimensionMismatch { expected: dim, got: ineq.coeffs.len() });
      }
      insert_row(&mut sys, &mut empty, ineq.coeffs.iter().map(|&c| BigInt::from(c)).collect(), ineq.rhs.into());
    }
    let mut systems = vec![sys];
    for _ in 0..dim {
      let next = eliminate_last(systems.last().unwrap(), &mut empty);
      systems.push(next);
    }
    // systems[k] has dim - k variables; stages[j] needs j + 1 variables
    let mut stages = Vec::with_capacity(dim);
    for j in 0..dim {
      stages.push(to_rows(&systems[dim - 1 - j])?);
    }
    Ok(Self { dim, stages, empty })
  }

  pub fn dim(&self) -> usize { self.dim }

  /// `true` when the elimination found a contradiction, so no integer point exists.
  pub fn is_empty(&self) -> bool { self.empty }

  /// Fails when some coordinate lacks an upper or lower bound.
  pub fn check_bounded(&self) -> Result<(), LatticeError> {
    if self.empty {
      return Ok(());
    }
    for (j, stage) in self.stages.iter().enumerate() {
      let has = |f: fn(&i128) -> bool| stage.iter().any(|r| f(&r.coeffs[j]));
      if !has(|c| *c > 0) || !has(|c| *c < 0) {
        return Err(LatticeError::Unbounded(j));
      }
    }
    Ok(())
  }

  /// Calls `visit` on every integer point in lexicographic order.
  pub fn for_each_point(&self, mut visit: impl FnMut(&[i64])) -> Result<(), LatticeError> {
    self.check_bounded()?;
    if self.empty {
      return Ok(());
    }
    let mut x = vec![0i64; self.dim];
    self.walk(0, &mut x, &mut visit)
  }

  pub fn count_points(&self) -> Result<u64, LatticeError> {
    let mut n = 0u64;
    self.for_each_point(|_| n += 1)?;
    Ok(n)
  }

  pub fn points(&self) -> Result<Vec<Vec<i64>>, LatticeError> {
    let mut out = Vec::new();
    self.for_each_point(|p| out.push(p.to_vec()))?;
    Ok(out)
  }

  fn walk(&self, j: usize, x: &mut [i64], visit: &mut impl FnMut(&[i64])) -> Result<(), LatticeError> {
    if j == self.dim {
      visit(x);
      return Ok(());
    }
    let (mut lo, mut hi) = (i128::MIN, i128::MAX);
    for row in &self.stages[j] {
      let fixed: i128 = row.coeffs[..j].iter().zip(x.iter()).map(|(&c, &v)| c * v as i128).sum();
      let r = row.rhs - fixed;
      let c = row.coeffs[j];
      if c > 0 {
        hi = hi.min(Integer::div_floor(&r, &c));
      } else if c < 0 {
        lo = lo.max(Integer::div_ceil(&r, &c));
      } else if r < 0 {
        return Ok(());
      }
    }
    if lo > hi {
      return Ok(());
    }
    let lo = i64::try_from(lo).map_err(|_| LatticeError::Overflow)?;
    let hi = i64::try_from(hi).map_err(|_| LatticeError::Overflow)?;
    for v in lo..=hi {
      x[j] = v;
      self.walk(j + 1, x, visit)?;
    }
    Ok(())
  }
}

#[cfg(test)]
mod tests {
  use proptest::prelude::*;

  use super::*;

  fn poly(dim: usize, rows: &[(&[i64], i64)]) -> LatticePolytope {
    let ineqs: Vec<Inequality> = rows.iter().map(|(c, r)| Inequality::new(c.to_vec(), *r)).collect();
    LatticePolytope::new(dim, &ineqs).unwrap()
  }

  #[test]
  fn triangle_count() {
    // x, y ≥ 0, x + y ≤ 4: 15 points
    let p = poly(2, &[(&[-1, 0], 0), (&[0, -1], 0), (&[1, 1], 4)]);
    assert_eq!(p.count_points().unwrap(), 15);
  }

  #[test]
  fn thin_rational_strip_is_empty() {
    // 1 ≤ 3x ≤ 2 has no integer solutions
    let p = poly(2, &[(&[3, 0], 2), (&[-3, 0], -1), (&[0, 1], 5), (&[0, -1], 5)]);
    assert!(p.is_empty());
    assert_eq!(p.count_points().unwrap(), 0);
  }

  #[test]
  fn unbounded_reported() {
    let p = poly(2, &[(&[-1, 0], 0), (&[1, 0], 3), (&[0, -1], 0)]);
    assert_eq!(p.count_points(), Err(LatticeError::Unbounded(1)));
    let p = poly(1, &[(&[1], 3)]);
    assert_eq!(p.count_points(), Err(LatticeError::Unbounded(0)));
  }

  #[test]
  fn zero_dimensional_polytope() {
    assert_eq!(poly(0, &[]).count_points().unwrap(), 1);
    assert_eq!(poly(0, &[(&[], -1)]).count_points().unwrap(), 0);
  }

  #[test]
  fn dimension_mismatch() {
    let err = LatticePolytope::new(2, &[Inequality::new(vec![1], 0)]).unwrap_err();
    assert_eq!(err, LatticeError::DimensionMismatch { expected: 2, got: 1 });
  }

  proptest! {
    /// Every system bounded by a box: compare against brute force over the box.
    #[test]
    fn matches_box_scan(
      extra in prop::collection::vec((prop::collection::vec(-3i64..4, 3), -6i64..7), 0..5),
      b in 0i64..4,
    ) {
      let mut rows: Vec<Inequality> = Vec::new();
      for j in 0..3 {
        let mut e = vec![0; 3];
        e[j] = 1;
        rows.push(Inequality::new(e.clone(), b));
        e[j] = -1;
        rows.push(Inequality::new(e, b));
      }
      rows.extend(extra.iter().map(|(c, r)| Inequality::new(c.clone(), *r)));
      let p = LatticePolytope::new(3, &rows).unwrap();
      let got = p.points().unwrap();
      let mut want = Vec::new();
      for x in -b..=b {
        for y in -b..=b {
          for z in -b..=b {
            let v = [x, y, z];
            if rows.iter().all(|r| r.coeffs.iter().zip(&v).map(|(c, x)| c * x).sum::<i64>() <= r.rhs) {
              want.push(v.to_vec());
            }
          }
        }
      }
      prop_assert_eq!(got, want);
    }
  }
}
