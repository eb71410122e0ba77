//! Ground truth from the face complex alone.
//!
//! The sheaf-level graded piece in multidegree `p` is
//! `dim H̃_{d-1-i}(P_{≤Î})` with `I = Neg(p)`: the reduced homology of the
//! face complex restricted to the rays where `p` is nonnegative. Nothing
//! here touches Stanley–Reisner generators, their unions, or `Λ_I`, so
//! agreement with [`crate::algorithm`] is evidence rather than a tautology.

mod verify;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classgroup::{ClassElement, ClassGroupError};
use crate::fan::Fan;
use crate::simplicial::{HomologyDims, SimplicialComplex};
use crate::toric::{SupportSet, ToricContext, ToricError};

pub use verify::{verify, verify_engine, Mismatch, MismatchKind, OracleReport, VerifyError};

/// Above this many rays the `2^n` restricted complexes get too expensive.
pub const MAX_ORACLE_RAYS: usize = 20;

#[derive(Debug, Error)]
pub enum OracleError {
  #[error("oracle supports at most {MAX_ORACLE_RAYS} rays, got {0}")]
  TooManyRays(usize),
  #[error("scan box has {got} coordinates, expected {expected}")]
  BoxShape { expected: usize, got: usize },
  #[error("scan box too small: support {support} has {inside} of {total} points inside")]
  BoxTooSmall { support: SupportSet, inside: u64, total: u64 },
  #[error(transparent)]
  Toric(#[from] ToricError),
}

impl From<ClassGroupError> for OracleError {
  fn from(e: ClassGroupError) -> Self { Self::Toric(e.into()) }
}

/// Per-coordinate inclusive bounds on exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanBox {
  pub lo: Vec<i64>,
  pub hi: Vec<i64>,
}

impl ScanBox {
  pub fn uniform(n: usize, lo: i64, hi: i64) -> Self { Self { lo: vec![lo; n], hi: vec![hi; n] } }

  /// `[-(d+2), d+1]` in every coordinate.
  pub fn default_for(fan: &Fan) -> Self {
    let d = fan.dim as i64;
    Self::uniform(fan.n_rays(), -(d + 2), d + 1)
  }

  pub fn n(&self) -> usize { self.lo.len() }

  pub fn is_empty(&self) -> bool { self.lo.iter().zip(&self.hi).any(|(l, h)| l > h) }

  pub fn len(&self) -> u64 {
    if self.is_empty() {
      return 0;
    }
    self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l + 1) as u64).product()
  }

  pub fn contains(&self, p: &[i64]) -> bool {
    p.len() == self.n() && p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| l <= x && x <= h)
  }

  /// Visits every point in lexicographic order.
  pub fn for_each(&self, mut visit: impl FnMut(&[i64])) {
    if self.is_empty() {
      return;
    }
    let mut p = self.lo.clone();
    loop {
      visit(&p);
      let mut k = p.len();
      loop {
        if k == 0 {
          return;
        }
        k -= 1;
        if p[k] < self.hi[k] {
          p[k] += 1;
          break;
        }
        p[k] = self.lo[k];
      }
    }
  }

  fn check(&self, n: usize) -> Result<(), OracleError> {
    if self.lo.len() != n || self.hi.len() != n {
      return Err(OracleError::BoxShape { expected: n, got: self.lo.len().min(self.hi.len()) });
    }
    Ok(())
  }
}

/// `dim H̃_{d-1-i}(P_{≤Î})`.
pub fn oracle_graded_dim(support: SupportSet, degree: usize, p: &SimplicialComplex, dim: usize) -> usize {
  let rest = p.ground() & !support.0;
  p.restriction(rest).reduced_homology_dims().get(dim as i64 - 1 - degree as i64)
}

/// The restricted-complex homology for every support set of one fan.
#[derive(Clone, Debug)]
pub struct Oracle {
  ctx:        ToricContext,
  restricted: Vec<HomologyDims>,
  relevant:   Vec<SupportSet>,
}

impl Oracle {
  pub fn new(ctx: ToricContext) -> Result<Self, OracleError> {
    let n = ctx.n_rays();
    if n > MAX_ORACLE_RAYS {
      return Err(OracleError::TooManyRays(n));
    }
    let p = ctx.complex();
    let restricted =
      (0..1u64 << n).into_par_iter().map(|i| p.restriction(p.ground() & !i).reduced_homology_dims()).collect();
    let mut oracle = Self { ctx, restricted, relevant: Vec::new() };
    let d = oracle.ctx.dim();
    oracle.relevant = (0..oracle.restricted.len() as u64)
      .map(SupportSet)
      .filter(|&s| s.is_empty() || (1..=d).any(|i| oracle.graded_dim(s, i) != 0))
      .collect();
    Ok(oracle)
  }

  pub fn context(&self) -> &ToricContext { &self.ctx }

  /// Same value as [`oracle_graded_dim`], from the precomputed table.
  pub fn graded_dim(&self, support: SupportSet, degree: usize) -> usize {
    self.restricted[support.0 as usize].get(self.ctx.dim() as i64 - 1 - degree as i64)
  }

  /// Homology of `P_{≤Î}` for `I = support`.
  pub fn restricted_homology(&self, support: SupportSet) -> &HomologyDims { &self.restricted[support.0 as usize] }

  /// `∅` together with every support set that carries some `H^i`, `i ≥ 1`.
  pub fn relevant_supports(&self) -> &[SupportSet] { &self.relevant }

  /// `h^0..h^d` of the divisor class `L`, summing graded dimensions over the
  /// points of `scan` in that class. Errors if some contributing support set
  /// has points of class `L` outside the box.
  pub fn cohomology(&self, divisor: &[i64], scan: &ScanBox) -> Result<Vec<u64>, OracleError> {
    let n = self.ctx.n_rays();
    scan.check(n)?;
    let g = self.ctx.class_group();
    let target = g.divisor_class(divisor)?;
    let mut counts: HashMap<SupportSet, u64> = HashMap::new();
    let mut err = None;
    scan.for_each(|p| match g.divisor_class(p) {
      Ok(c) if c == target => *counts.entry(SupportSet::neg(p)).or_default() += 1,
      Ok(_) => {},
      Err(e) => err = Some(e),
    });
    if let Some(e) = err {
      return Err(e.into());
    }
    self.cohomology_from_counts(&target, &counts)
  }

  /// The summation step of [`cohomology`](Self::cohomology), given the
  /// in-box point counts of one class per support set.
  pub fn cohomology_from_counts(
    &self,
    class: &ClassElement,
    counts: &HashMap<SupportSet, u64>,
  ) -> Result<Vec<u64>, OracleError> {
    let d = self.ctx.dim();
    let mut h = vec![0u64; d + 1];
    for &support in self.relevant_supports() {
      let inside = counts.get(&support).copied().unwrap_or(0);
      let total = self.ctx.count_support_points(support, class)?;
      if inside != total {
        return Err(OracleError::BoxTooSmall { support, inside, total });
      }
      if support.is_empty() {
        h[0] += inside;
      }
      for (i, hi) in h.iter_mut().enumerate().skip(1) {
        *hi += inside * self.graded_dim(support, i) as u64;
      }
    }
    Ok(h)
  }
}

pub fn oracle_cohomology(fan: &Fan, divisor: &[i64], scan: &ScanBox) -> Result<Vec<u64>, OracleError> {
  Oracle::new(ToricContext::new(fan.clone())?)?.cohomology(divisor, scan)
}
