//! Line bundle cohomology from Stanley–Reisner combinatorics.
//!
//! For a support set `I ⊆ Δ(1)` and `i ≥ 1` the graded piece
//! `H^i_*(O_X)_I` vanishes unless `I` is a union of Stanley–Reisner
//! generators, and for `i ≠ d` also unless the complement `Î` is one. When it
//! survives its dimension is `dim H̃_{|I|-i-2}(Λ_I)`, where `Λ_I` records which
//! collections of generators inside `I` fail to cover `I`. Summing those
//! dimensions against lattice-point counts gives `h^i(X, L)`.
//!
//! The `Λ_I` homology does not depend on `L`, so [`SupportTable`] computes it
//! once per fan and [`CohomologyEngine`] reuses it for every divisor.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::classgroup::ClassElement;
use crate::fan::Fan;
use crate::simplicial::{HomologyDims, SimplicialComplex, VertexSet};
use crate::toric::{SupportSet, ToricContext, ToricError};

pub const DEFAULT_USR_CAP: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum AlgorithmError {
  #[error("union closure exceeded {0} sets")]
  UsrCapExceeded(usize),
  #[error("{0} is not a union of Stanley-Reisner generators")]
  NotInUsr(SupportSet),
  #[error("{0} generators inside one support set, at most 64 supported")]
  TooManyGenerators(usize),
  #[error("cohomological degree {degree} outside 1..={dim}")]
  DegreeOutOfRange { degree: usize, dim: usize },
  #[error("divisor has {got} coefficients, expected {expected}")]
  DivisorLength { expected: usize, got: usize },
  #[error(transparent)]
  Toric(#[from] ToricError),
}

/// Minimal non-faces of the face complex, sorted by `(cardinality, mask)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SRSet {
  generators: Vec<VertexSet>,
}

impl SRSet {
  /// Sorts and deduplicates; does not check minimality.
  pub fn from_generators(mut generators: Vec<VertexSet>) -> Self {
    generators.sort_unstable_by_key(|&g| (g.count_ones(), g));
    generators.dedup();
    Self { generators }
  }

  pub fn generators(&self) -> &[VertexSet] { &self.generators }

  pub fn len(&self) -> usize { self.generators.len() }

  pub fn is_empty(&self) -> bool { self.generators.is_empty() }

  /// Indices of the generators contained in `support`.
  pub fn contained_in(&self, support: SupportSet) -> Vec<usize> {
    (0..self.generators.len()).filter(|&k| self.generators[k] & !support.0 == 0).collect()
  }

  /// A copy with generator `k` removed (for negative controls).
  pub fn without(&self, k: usize) -> Self {
    let mut generators = self.generators.clone();
    generators.remove(k);
    Self { generators }
  }

  pub fn as_lists(&self) -> Vec<Vec<usize>> {
    self.generators.iter().map(|&g| SupportSet(g).indices()).collect()
  }
}

/// The Stanley–Reisner generators: subsets of rays that span no cone while
/// every proper subset does.
pub fn stanley_reisner(p: &SimplicialComplex) -> SRSet {
  SRSet::from_generators(p.minimal_non_faces().into_iter().filter(|&g| g != 0).collect())
}

/// All unions of nonempty collections of generators. The empty union is not included.
pub fn enumerate_usr(sr: &SRSet, cap: usize) -> Result<BTreeSet<SupportSet>, AlgorithmError> {
  let gens = sr.generators();
  let mut all: BTreeSet<VertexSet> = gens.iter().copied().collect();
  let mut frontier: Vec<VertexSet> = all.iter().copied().collect();
  while !frontier.is_empty() {
    let mut next = Vec::new();
    for &a in &frontier {
      for &g in gens {
        let u = a | g;
        if all.insert(u) {
          if all.len() > cap {
            return Err(AlgorithmError::UsrCapExceeded(cap));
          }
          next.push(u);
        }
      }
    }
    frontier = next;
  }
  if all.len() > cap {
    return Err(AlgorithmError::UsrCapExceeded(cap));
  }
  Ok(all.into_iter().map(SupportSet).collect())
}

/// `Λ_I` on the generators contained in `I` (numbered in generator order):
/// `K` is a face iff the generators indexed by `K` do not cover `I`.
pub fn lambda_complex(support: SupportSet, sr: &SRSet) -> Result<SimplicialComplex, AlgorithmError> {
  let inside: Vec<VertexSet> = sr.contained_in(support).into_iter().map(|k| sr.generators()[k]).collect();
  if inside.iter().fold(0, |a, &g| a | g) != support.0 || support.is_empty() {
    return Err(AlgorithmError::NotInUsr(support));
  }
  if inside.len() > crate::simplicial::MAX_VERTICES {
    return Err(AlgorithmError::TooManyGenerators(inside.len()));
  }

  struct Search<'a> {
    gens:    &'a [VertexSet],
    target:  VertexSet,
    maximal: Vec<VertexSet>,
  }

  impl Search<'_> {
    fn extend(&mut self, face: VertexSet, union: VertexSet, start: usize) {
      let mut is_maximal = true;
      for k in 0..self.gens.len() {
        if face >> k & 1 == 1 || union | self.gens[k] == self.target {
          continue;
        }
        is_maximal = false;
        if k >= start {
          self.extend(face | (1 << k), union | self.gens[k], k + 1);
        }
      }
      if is_maximal {
        self.maximal.push(face);
      }
    }
  }

  let mut search = Search { gens: &inside, target: support.0, maximal: Vec::new() };
  search.extend(0, 0, 0);
  let ground = crate::simplicial::full_mask(inside.len());
  Ok(SimplicialComplex::new(ground, search.maximal).expect("faces index the generators"))
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportEntry {
  /// Indices into the generator list.
  pub generators:  Vec<usize>,
  pub lambda:      SimplicialComplex,
  pub homology:    HomologyDims,
  pub dual_in_usr: bool,
}

/// `Λ_I` and its homology for every `I ∈ U_SR`, computed once per fan.
#[derive(Clone, Debug)]
pub struct SupportTable {
  n:       usize,
  dim:     usize,
  sr:      SRSet,
  entries: BTreeMap<SupportSet, SupportEntry>,
}

impl SupportTable {
  pub fn new(p: &SimplicialComplex, dim: usize) -> Result<Self, AlgorithmError> {
    Self::from_sr(stanley_reisner(p), p.n_vertices(), dim, DEFAULT_USR_CAP)
  }

  pub fn from_sr(sr: SRSet, n: usize, dim: usize, cap: usize) -> Result<Self, AlgorithmError> {
    let usr = enumerate_usr(&sr, cap)?;
    let entries = usr
      .iter()
      .map(|&support| {
        let lambda = lambda_complex(support, &sr)?;
        let homology = lambda.reduced_homology_dims();
        let entry = SupportEntry {
          generators: sr.contained_in(support),
          lambda,
          homology,
          dual_in_usr: usr.contains(&support.complement(n)),
        };
        Ok((support, entry))
      })
      .collect::<Result<_, AlgorithmError>>()?;
    Ok(Self { n, dim, sr, entries })
  }

  pub fn sr(&self) -> &SRSet { &self.sr }

  pub fn dim(&self) -> usize { self.dim }

  pub fn n_rays(&self) -> usize { self.n }

  pub fn usr_len(&self) -> usize { self.entries.len() }

  pub fn entries(&self) -> impl Iterator<Item = (SupportSet, &SupportEntry)> {
    self.entries.iter().map(|(&k, v)| (k, v))
  }

  pub fn get(&self, support: SupportSet) -> Option<&SupportEntry> { self.entries.get(&support) }

  pub fn in_usr(&self, support: SupportSet) -> bool { self.entries.contains_key(&support) }

  /// `dim H^i_*(O_X)_I` for `1 ≤ i ≤ d`.
  pub fn graded_dim(&self, support: SupportSet, degree: usize) -> Result<usize, AlgorithmError> {
    if degree == 0 || degree > self.dim {
      return Err(AlgorithmError::DegreeOutOfRange { degree, dim: self.dim });
    }
    let Some(entry) = self.entries.get(&support) else {
      return Ok(0);
    };
    if degree != self.dim && !entry.dual_in_usr {
      return Ok(0);
    }
    Ok(entry.homology.get(support.len() as i64 - degree as i64 - 2))
  }
}

pub fn graded_dim(support: SupportSet, degree: usize, table: &SupportTable) -> Result<usize, AlgorithmError> {
  table.graded_dim(support, degree)
}

/// `#{p ∈ Z^n | Neg(p) = I, [Σ p_ρ D_ρ] = [L]}`.
pub fn multiplicity(ctx: &ToricContext, support: SupportSet, divisor: &[i64]) -> Result<u64, AlgorithmError> {
  let class = ctx.class_group().divisor_class(divisor).map_err(ToricError::from)?;
  Ok(ctx.count_support_points(support, &class)?)
}

/// One summand of `h^i`: the lattice-point count for `I` times the homology dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
  pub support:      SupportSet,
  pub degree:       usize,
  pub multiplicity: u64,
  pub homology_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyVector {
  pub divisor:   Vec<i64>,
  pub class:     ClassElement,
  /// `h^0, ..., h^d`
  pub dims:      Vec<u64>,
  pub breakdown: Vec<Term>,
}

/// A fan with its support table, answering cohomology queries for any divisor.
#[derive(Clone, Debug)]
pub struct CohomologyEngine {
  ctx:           ToricContext,
  table:         SupportTable,
  /// `(I, i, dim)` with nonzero graded dimension, sorted by `(i, I)`.
  contributions: Vec<(SupportSet, usize, usize)>,
}

impl CohomologyEngine {
  pub fn new(ctx: ToricContext) -> Result<Self, AlgorithmError> {
    let table = SupportTable::new(ctx.complex(), ctx.dim())?;
    Ok(Self::with_table(ctx, table))
  }

  pub fn from_fan(fan: Fan) -> Result<Self, AlgorithmError> { Self::new(ToricContext::new(fan)?) }

  /// Uses a prebuilt table, which need not come from this fan's complex.
  pub fn with_table(ctx: ToricContext, table: SupportTable) -> Self {
    let mut contributions = Vec::new();
    for degree in 1..=table.dim() {
      for (support, _) in table.entries() {
        let dim = table.graded_dim(support, degree).expect("degree in range");
        if dim > 0 {
          contributions.push((support, degree, dim));
        }
      }
    }
    Self { ctx, table, contributions }
  }

  pub fn context(&self) -> &ToricContext { &self.ctx }

  pub fn table(&self) -> &SupportTable { &self.table }

  pub fn contributions(&self) -> &[(SupportSet, usize, usize)] { &self.contributions }

  /// `h^0` counts effective divisors of class `L`; for `0 < i < d` the sum
  /// runs over `I` with both `I` and `Î` in `U_SR`; for `i = d` over all of
  /// `U_SR`.
  pub fn cohomology(&self, divisor: &[i64]) -> Result<CohomologyVector, AlgorithmError> {
    let n = self.ctx.n_rays();
    if divisor.len() != n {
      return Err(AlgorithmError::DivisorLength { expected: n, got: divisor.len() });
    }
    let class = self.ctx.class_group().divisor_class(divisor).map_err(ToricError::from)?;
    let mut dims = vec![0u64; self.ctx.dim() + 1];
    let mut breakdown = Vec::new();

    let h0 = self.ctx.count_support_points(SupportSet(0), &class)?;
    dims[0] = h0;
    if h0 > 0 {
      breakdown.push(Term { support: SupportSet(0), degree: 0, multiplicity: h0, homology_dim: 1 });
    }
    for &(support, degree, dim) in &self.contributions {
      let m = self.ctx.count_support_points(support, &class)?;
      if m > 0 {
        dims[degree] += m * dim as u64;
        breakdown.push(Term { support, degree, multiplicity: m, homology_dim: dim });
      }
    }
    Ok(CohomologyVector { divisor: divisor.to_vec(), class, dims, breakdown })
  }
}

pub fn cohomology(fan: &Fan, divisor: &[i64]) -> Result<CohomologyVector, AlgorithmError> {
  CohomologyEngine::from_fan(fan.clone())?.cohomology(divisor)
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::simplicial::{full_mask, mask_of};

  fn fan(dim: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
    Fan::new(dim, rays.iter().map(|r| r.to_vec()).collect(), cones.iter().map(|c| c.to_vec()).collect())
      .unwrap()
  }

  fn p2() -> Fan { fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]]) }

  fn p1p1() -> Fan {
    fan(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]])
  }

  fn hirzebruch(a: i64) -> Fan {
    fan(2, &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]])
  }

  fn sets(lists: &[&[usize]]) -> Vec<VertexSet> { lists.iter().map(|l| mask_of(l)).collect() }

  /// Minimal non-faces by checking every subset against the definition.
  fn sr_brute_force(p: &SimplicialComplex) -> Vec<VertexSet> {
    let n = p.n_vertices();
    let mut out: Vec<VertexSet> = (1..1u64 << n)
      .filter(|&s| !p.contains(s) && crate::simplicial::indices_of(s).iter().all(|&v| p.contains(s & !(1 << v))))
      .collect();
    out.sort_unstable_by_key(|&g| (g.count_ones(), g));
    out
  }

  /// `Λ_I` by testing every subcollection of the generators inside `I`.
  fn lambda_brute_force(support: VertexSet, sr: &SRSet) -> SimplicialComplex {
    let inside: Vec<VertexSet> =
      sr.generators().iter().copied().filter(|&g| g & !support == 0).collect();
    let faces: Vec<VertexSet> = (0..1u64 << inside.len())
      .filter(|&k| crate::simplicial::indices_of(k).iter().fold(0, |u, &j| u | inside[j]) != support)
      .collect();
    SimplicialComplex::new(full_mask(inside.len()), faces).unwrap()
  }

  #[test]
  fn stanley_reisner_examples() {
    for (f, want) in [
      (p2(), sets(&[&[0, 1, 2]])),
      (p1p1(), sets(&[&[0, 2], &[1, 3]])),
      (hirzebruch(1), sets(&[&[0, 2], &[1, 3]])),
      (hirzebruch(2), sets(&[&[0, 2], &[1, 3]])),
    ] {
      let p = f.complex();
      assert_eq!(sr_brute_force(&p), want);
      assert_eq!(stanley_reisner(&p).generators(), &want[..]);
    }
  }

  #[test]
  fn usr_examples() {
    let usr = |gens: &[&[usize]]| -> Vec<VertexSet> {
      enumerate_usr(&SRSet::from_generators(sets(gens)), DEFAULT_USR_CAP).unwrap().into_iter().map(|s| s.0).collect()
    };
    assert_eq!(usr(&[&[0, 1, 2]]), sets(&[&[0, 1, 2]]));
    let mut want = sets(&[&[0, 2], &[1, 3], &[0, 1, 2, 3]]);
    want.sort_unstable();
    assert_eq!(usr(&[&[0, 2], &[1, 3]]), want);
    let mut want = sets(&[&[0, 1], &[1, 2], &[0, 2], &[0, 1, 2]]);
    want.sort_unstable();
    assert_eq!(usr(&[&[0, 1], &[1, 2], &[0, 2]]), want);
  }

  #[test]
  fn usr_cap() {
    let sr = SRSet::from_generators((0..8).map(|i| 1u64 << i).collect());
    assert!(matches!(enumerate_usr(&sr, 100), Err(AlgorithmError::UsrCapExceeded(100))));
    assert_eq!(enumerate_usr(&sr, 255).unwrap().len(), 255);
  }

  #[test]
  fn lambda_examples() {
    let sr = stanley_reisner(&p2().complex());
    let l = lambda_complex(SupportSet(0b111), &sr).unwrap();
    assert!(l.is_irrelevant());

    let sr = stanley_reisner(&p1p1().complex());
    let l = lambda_complex(SupportSet(0b1111), &sr).unwrap();
    assert_eq!(l.maximal_face_lists(), vec![vec![0], vec![1]]);

    // Any two of {0,1},{1,2},{0,2} already cover {0,1,2}, so only vertices survive.
    let sr = SRSet::from_generators(sets(&[&[0, 1], &[1, 2], &[0, 2]]));
    let l = lambda_complex(SupportSet(0b111), &sr).unwrap();
    assert_eq!(l, lambda_brute_force(0b111, &sr));
    assert_eq!(l.maximal_face_lists(), vec![vec![0], vec![1], vec![2]]);
    assert_eq!(l.reduced_homology_dims().get(0), 2);

    assert!(lambda_complex(SupportSet(0b011), &sr).is_ok());
    assert!(matches!(lambda_complex(SupportSet(0b100), &sr), Err(AlgorithmError::NotInUsr(_))));
    assert!(matches!(lambda_complex(SupportSet(0), &sr), Err(AlgorithmError::NotInUsr(_))));
  }

  #[test]
  fn lambda_matches_brute_force_on_random_sr_sets() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
      let n = rng.gen_range(2..7);
      let gens: Vec<VertexSet> = (0..rng.gen_range(1..6)).map(|_| rng.gen_range(1..1u64 << n)).collect();
      let sr = SRSet::from_generators(gens);
      for support in enumerate_usr(&sr, DEFAULT_USR_CAP).unwrap() {
        assert_eq!(lambda_complex(support, &sr).unwrap(), lambda_brute_force(support.0, &sr));
      }
    }
  }

  #[test]
  fn graded_dim_examples() {
    let p2 = p2();
    let t = SupportTable::new(&p2.complex(), 2).unwrap();
    assert_eq!(graded_dim(SupportSet(0b111), 2, &t).unwrap(), 1);
    assert_eq!(graded_dim(SupportSet(0b111), 1, &t).unwrap(), 0);
    assert_eq!(graded_dim(SupportSet(0b001), 1, &t).unwrap(), 0);
    assert!(graded_dim(SupportSet(0b111), 0, &t).is_err());
    assert!(graded_dim(SupportSet(0b111), 3, &t).is_err());

    let t = SupportTable::new(&p1p1().complex(), 2).unwrap();
    assert_eq!(graded_dim(SupportSet::from_indices(&[0, 2]), 1, &t).unwrap(), 1);
    assert_eq!(graded_dim(SupportSet::from_indices(&[0, 1, 2, 3]), 2, &t).unwrap(), 1);
  }

  #[test]
  fn multiplicity_examples() {
    let ctx = ToricContext::new(p2()).unwrap();
    assert_eq!(multiplicity(&ctx, SupportSet(0), &[2, 0, 0]).unwrap(), 6);
    assert_eq!(multiplicity(&ctx, SupportSet(0b111), &[-3, 0, 0]).unwrap(), 1);
    // Neg(p) = {0} at fixed degree is an infinite set.
    assert!(matches!(
      multiplicity(&ctx, SupportSet(0b001), &[1, 0, 0]),
      Err(AlgorithmError::Toric(ToricError::Lattice(_)))
    ));
  }

  #[test]
  fn multiplicity_neg0_grows_with_box() {
    let ctx = ToricContext::new(p2()).unwrap();
    let c = ctx.class_group().divisor_class(&[1, 0, 0]).unwrap();
    let counts: Vec<u64> = (2..6)
      .map(|r| {
        let (lo, hi) = (vec![-r; 3], vec![r; 3]);
        let got = ctx.count_support_points_in_box(SupportSet(0b001), &c, &lo, &hi).unwrap();
        let mut want = 0;
        for a in -r..=r {
          for b in -r..=r {
            for d in -r..=r {
              if a < 0 && b >= 0 && d >= 0 && a + b + d == 1 {
                want += 1;
              }
            }
          }
        }
        assert_eq!(got, want);
        got
      })
      .collect();
    assert!(counts.windows(2).all(|w| w[0] < w[1]));
  }

  #[test]
  fn cohomology_examples() {
    assert_eq!(cohomology(&p2(), &[2, 0, 0]).unwrap().dims, vec![6, 0, 0]);
    assert_eq!(cohomology(&p2(), &[-3, 0, 0]).unwrap().dims, vec![0, 0, 1]);
    assert_eq!(cohomology(&p1p1(), &[-2, 0, 0, 0]).unwrap().dims, vec![0, 1, 0]);
    assert!(matches!(cohomology(&p2(), &[1, 0]), Err(AlgorithmError::DivisorLength { expected: 3, got: 2 })));
  }

  #[test]
  fn breakdown_sums_to_dims() {
    let engine = CohomologyEngine::from_fan(hirzebruch(2)).unwrap();
    for a in -4..=2 {
      for b in -4..=2 {
        let v = engine.cohomology(&[a, 0, b, 0]).unwrap();
        let mut sums = vec![0u64; 3];
        for t in &v.breakdown {
          sums[t.degree] += t.multiplicity * t.homology_dim as u64;
        }
        assert_eq!(sums, v.dims);
      }
    }
  }
}
