//! A validated fan bundled with its face complex and class group, plus the
//! lattice-point sets `{p ∈ Z^n | Neg(p) = I, [Σ p_ρ D_ρ] = c}` that both the
//! algorithm and the oracle count.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::classgroup::{ClassElement, ClassGroup, ClassGroupError};
use crate::fan::Fan;
use crate::lattice::{Inequality, LatticeError, LatticePolytope};
use crate::simplicial::{self, SimplicialComplex, VertexSet};

#[derive(Debug, Error)]
pub enum ToricError {
  #[error("invalid fan: {}", .0.join("; "))]
  InvalidFan(Vec<String>),
  #[error(transparent)]
  ClassGroup(#[from] ClassGroupError),
  #[error(transparent)]
  Lattice(#[from] LatticeError),
}

/// A subset `I` of the rays, identifying the sign pattern `Neg(p) = I`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SupportSet(pub VertexSet);

impl SupportSet {
  pub fn from_indices(indices: &[usize]) -> Self { Self(simplicial::mask_of(indices)) }

  /// `Neg(p)`: the coordinates where `p` is negative.
  pub fn neg(p: &[i64]) -> Self {
    Self(p.iter().enumerate().filter(|(_, &x)| x < 0).fold(0, |m, (i, _)| m | (1u64 << i)))
  }

  pub fn mask(self) -> VertexSet { self.0 }

  pub fn len(self) -> usize { self.0.count_ones() as usize }

  pub fn is_empty(self) -> bool { self.0 == 0 }

  pub fn contains(self, i: usize) -> bool { self.0 >> i & 1 == 1 }

  pub fn complement(self, n: usize) -> Self { Self(simplicial::full_mask(n) & !self.0) }

  pub fn indices(self) -> Vec<usize> { simplicial::indices_of(self.0) }
}

impl fmt::Debug for SupportSet {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result { write!(f, "{:?}", self.indices()) }
}

impl fmt::Display for SupportSet {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let parts: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
    write!(f, "{{{}}}", parts.join(","))
  }
}

impl Serialize for SupportSet {
  fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> { self.indices().serialize(s) }
}

#[derive(Clone, Debug)]
pub struct ToricContext {
  fan:         Fan,
  complex:     SimplicialComplex,
  class_group: ClassGroup,
}

impl ToricContext {
  /// Validates the fan and computes its face complex and class group.
  pub fn new(fan: Fan) -> Result<Self, ToricError> {
    let diag = fan.validate();
    if !diag.ok() {
      return Err(ToricError::InvalidFan(diag.messages));
    }
    Self::new_unchecked(fan)
  }

  /// Skips the completeness and simpliciality checks; the rays must still span.
  pub fn new_unchecked(fan: Fan) -> Result<Self, ToricError> {
    let class_group = ClassGroup::new(&fan)?;
    let complex = fan.complex();
    Ok(Self { fan, complex, class_group })
  }

  pub fn fan(&self) -> &Fan { &self.fan }

  pub fn dim(&self) -> usize { self.fan.dim }

  pub fn n_rays(&self) -> usize { self.fan.n_rays() }

  /// The face complex `P`.
  pub fn complex(&self) -> &SimplicialComplex { &self.complex }

  pub fn class_group(&self) -> &ClassGroup { &self.class_group }

  /// `K_X = -Σ D_ρ`.
  pub fn canonical_divisor(&self) -> Vec<i64> { vec![-1; self.n_rays()] }

  /// The polytope of `m ∈ Z^d` such that `p = p* + R m` has `Neg(p) = I`,
  /// where `R` is the ray matrix and `p*` a fixed divisor of class `c`.
  /// Returns `p*` alongside.
  pub fn support_polytope(
    &self,
    support: SupportSet,
    class: &ClassElement,
  ) -> Result<(Vec<i64>, LatticePolytope), ToricError> {
    self.build_polytope(support, class, None)
  }

  fn build_polytope(
    &self,
    support: SupportSet,
    class: &ClassElement,
    bounds: Option<(&[i64], &[i64])>,
  ) -> Result<(Vec<i64>, LatticePolytope), ToricError> {
    let anchor = self.class_group.particular_preimage(class)?;
    let neg = |u: &[i64]| u.iter().map(|x| -x).collect::<Vec<_>>();
    let mut ineqs = Vec::with_capacity(3 * self.n_rays());
    for (rho, (u, &a)) in self.fan.rays.iter().zip(&anchor).enumerate() {
      if support.contains(rho) {
        // a + <u, m> ≤ -1
        ineqs.push(Inequality::new(u.clone(), -1 - a));
      } else {
        // a + <u, m> ≥ 0
        ineqs.push(Inequality::new(neg(u), a));
      }
      if let Some((lo, hi)) = bounds {
        ineqs.push(Inequality::new(u.clone(), hi[rho] - a));
        ineqs.push(Inequality::new(neg(u), a - lo[rho]));
      }
    }
    Ok((anchor, LatticePolytope::new(self.dim(), &ineqs)?))
  }

  /// Like [`count_support_points`](Self::count_support_points) but only
  /// counting points with `lo ≤ p ≤ hi` coordinatewise; always finite.
  pub fn count_support_points_in_box(
    &self,
    support: SupportSet,
    class: &ClassElement,
    lo: &[i64],
    hi: &[i64],
  ) -> Result<u64, ToricError> {
    Ok(self.build_polytope(support, class, Some((lo, hi)))?.1.count_points()?)
  }

  /// `#{p | Neg(p) = I, [p] = c}`.
  pub fn count_support_points(&self, support: SupportSet, class: &ClassElement) -> Result<u64, ToricError> {
    Ok(self.support_polytope(support, class)?.1.count_points()?)
  }

  /// The points themselves, as exponent vectors, in lexicographic order of `m`.
  pub fn support_points(&self, support: SupportSet, class: &ClassElement) -> Result<Vec<Vec<i64>>, ToricError> {
    let (anchor, poly) = self.support_polytope(support, class)?;
    let mut out = Vec::new();
    poly.for_each_point(|m| {
      out.push(
        self.fan.rays.iter().zip(&anchor).map(|(u, a)| a + u.iter().zip(m).map(|(x, y)| x * y).sum::<i64>()).collect(),
      )
    })?;
    Ok(out)
  }
}

#[cfg(test)]
mod tests {
  use super::*;

  fn p2() -> ToricContext {
    ToricContext::new(
      Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap(),
    )
    .unwrap()
  }

  #[test]
  fn neg_pattern() {
    assert_eq!(SupportSet::neg(&[-1, 0, 3, -7]), SupportSet::from_indices(&[0, 3]));
    assert_eq!(SupportSet::from_indices(&[0, 3]).complement(4), SupportSet::from_indices(&[1, 2]));
    assert_eq!(SupportSet::from_indices(&[2, 0]).to_string(), "{0,2}");
  }

  #[test]
  fn p2_support_points() {
    let ctx = p2();
    let g = ctx.class_group();
    let o2 = g.divisor_class(&[2, 0, 0]).unwrap();
    let pts = ctx.support_points(SupportSet(0), &o2).unwrap();
    assert_eq!(pts.len(), 6);
    for p in &pts {
      assert!(p.iter().all(|&x| x >= 0));
      assert_eq!(p.iter().sum::<i64>(), 2);
    }
    let o_minus3 = g.divisor_class(&[-3, 0, 0]).unwrap();
    assert_eq!(ctx.support_points(SupportSet(0b111), &o_minus3).unwrap(), vec![vec![-1, -1, -1]]);
  }

  #[test]
  fn invalid_fan_rejected() {
    let partial = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1]]).unwrap();
    assert!(matches!(ToricContext::new(partial), Err(ToricError::InvalidFan(_))));
  }

  #[test]
  fn unbounded_support_reported() {
    // On P^2, Neg(p) = {0} with a fixed degree has infinitely many points.
    let ctx = p2();
    let c = ctx.class_group().divisor_class(&[1, 0, 0]).unwrap();
    let err = ctx.count_support_points(SupportSet::from_indices(&[0]), &c).unwrap_err();
    assert!(matches!(err, ToricError::Lattice(LatticeError::Unbounded(_))));
  }
}
