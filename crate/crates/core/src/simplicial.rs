//! Finite abstract simplicial complexes on at most 64 vertices.
//!
//! Vertex subsets are bit masks (`u64`). A complex carries its ground set
//! explicitly because Alexander duality and links depend on it, not only on
//! the faces. Two degenerate complexes are kept apart:
//!
//! * the *void* complex has no faces at all and its reduced homology vanishes;
//! * the *irrelevant* complex `{∅}` has only the empty face and carries one
//!   class in reduced degree `-1`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactlinalg::{self, IntegerMatrix};

/// A subset of `{0, ..., 63}`.
pub type VertexSet = u64;

pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
  #[error("face {face:#b} is not contained in the ground set {ground:#b}")]
  OutsideGround { face: VertexSet, ground: VertexSet },
  #[error("{0:?} is not a face of the complex")]
  NotAFace(Vec<usize>),
  #[error("at most {MAX_VERTICES} vertices are supported, got {0}")]
  TooManyVertices(usize),
}

pub fn mask_of(indices: &[usize]) -> VertexSet { indices.iter().fold(0, |m, &i| m | (1u64 << i)) }

pub fn indices_of(mut mask: VertexSet) -> Vec<usize> {
  let mut out = Vec::with_capacity(mask.count_ones() as usize);
  while mask != 0 {
    out.push(mask.trailing_zeros() as usize);
    mask &= mask - 1;
  }
  out
}

/// Mask of `{0, ..., n-1}`.
pub fn full_mask(n: usize) -> VertexSet {
  if n >= 64 {
    u64::MAX
  } else {
    (1u64 << n) - 1
  }
}

fn submasks(mask: VertexSet) -> impl Iterator<Item = VertexSet> {
  let mut next = Some(mask);
  std::iter::from_fn(move || {
    let cur = next?;
    next = if cur == 0 { None } else { Some((cur - 1) & mask) };
    Some(cur)
  })
}

/// Keeps the inclusion-maximal sets, sorted ascending by mask.
fn maximal_only(mut sets: Vec<VertexSet>) -> Vec<VertexSet> {
  sets.sort_unstable_by_key(|s| std::cmp::Reverse(s.count_ones()));
  sets.dedup();
  let mut kept: Vec<VertexSet> = Vec::new();
  for s in sets {
    if !kept.iter().any(|&k| s & k == s) {
      kept.push(s);
    }
  }
  kept.sort_unstable();
  kept
}

/// A simplicial complex given by its maximal faces.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
  ground:  VertexSet,
  maximal: Vec<VertexSet>,
}

impl SimplicialComplex {
  /// The downward closure of `faces` on the given ground set.
  pub fn new(ground: VertexSet, faces: impl IntoIterator<Item = VertexSet>) -> Result<Self, ComplexError> {
    let faces: Vec<VertexSet> = faces.into_iter().collect();
    if let Some(&face) = faces.iter().find(|&&f| f & !ground != 0) {
      return Err(ComplexError::OutsideGround { face, ground });
    }
    Ok(Self { ground, maximal: maximal_only(faces) })
  }

  /// Convenience constructor on `{0, ..., n-1}` from index lists.
  pub fn from_faces(n: usize, faces: &[Vec<usize>]) -> Result<Self, ComplexError> {
    if n > MAX_VERTICES {
      return Err(ComplexError::TooManyVertices(n));
    }
    Self::new(full_mask(n), faces.iter().map(|f| mask_of(f)))
  }

  pub fn void(ground: VertexSet) -> Self { Self { ground, maximal: Vec::new() } }

  pub fn irrelevant(ground: VertexSet) -> Self { Self { ground, maximal: vec![0] } }

  pub fn full_simplex(ground: VertexSet) -> Self { Self { ground, maximal: vec![ground] } }

  pub fn ground(&self) -> VertexSet { self.ground }

  pub fn n_vertices(&self) -> usize { self.ground.count_ones() as usize }

  pub fn maximal_faces(&self) -> &[VertexSet] { &self.maximal }

  /// Maximal faces as sorted index lists, sorted lexicographically.
  pub fn maximal_face_lists(&self) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = self.maximal.iter().map(|&f| indices_of(f)).collect();
    out.sort();
    out
  }

  pub fn is_void(&self) -> bool { self.maximal.is_empty() }

  pub fn is_irrelevant(&self) -> bool { self.maximal == [0] }

  pub fn contains(&self, face: VertexSet) -> bool { self.maximal.iter().any(|&m| face & m == face) }

  /// Dimension of the largest face; `None` for the void complex, `Some(-1)` for `{∅}`.
  pub fn dimension(&self) -> Option<i64> {
    self.maximal.iter().map(|m| m.count_ones() as i64 - 1).max()
  }

  /// Same faces viewed on a different ground set.
  pub fn with_ground(&self, ground: VertexSet) -> Result<Self, ComplexError> {
    Self::new(ground, self.maximal.iter().copied())
  }

  /// All faces grouped by cardinality: entry `k` holds the faces with `k`
  /// vertices (dimension `k - 1`), each list sorted by mask.
  pub fn faces_by_size(&self) -> Vec<Vec<VertexSet>> {
    let Some(dim) = self.dimension() else {
      return Vec::new();
    };
    let mut seen: HashSet<VertexSet> = HashSet::new();
    for &m in &self.maximal {
      seen.extend(submasks(m));
    }
    let mut out = vec![Vec::new(); (dim + 2) as usize];
    for f in seen {
      out[f.count_ones() as usize].push(f);
    }
    for level in &mut out {
      level.sort_unstable();
    }
    out
  }

  pub fn face_count(&self) -> usize { self.faces_by_size().iter().map(Vec::len).sum() }

  /// `Γ_{≤σ}`: faces contained in `sigma`, on the same ground set.
  pub fn restriction(&self, sigma: VertexSet) -> Self {
    if self.is_void() {
      return self.clone();
    }
    Self { ground: self.ground, maximal: maximal_only(self.maximal.iter().map(|&m| m & sigma).collect()) }
  }

  /// `link_Γ σ = {τ | τ ∪ σ ∈ Γ, τ ∩ σ = ∅}` on the ground set `V \ σ`.
  pub fn link(&self, sigma: VertexSet) -> Result<Self, ComplexError> {
    if !self.contains(sigma) {
      return Err(ComplexError::NotAFace(indices_of(sigma)));
    }
    // Cofaces of σ are already an antichain after removing σ.
    let maximal = self.maximal.iter().filter(|&&m| m & sigma == sigma).map(|&m| m & !sigma).collect();
    Ok(Self { ground: self.ground & !sigma, maximal: maximal_only(maximal) })
  }

  /// Inclusion-minimal subsets of the ground set that are not faces, sorted by
  /// `(cardinality, mask)`. The void complex has the single minimal non-face `∅`.
  pub fn minimal_non_faces(&self) -> Vec<VertexSet> {
    if self.is_void() {
      return vec![0];
    }
    let faces = self.faces_by_size();
    let face_set: HashSet<VertexSet> = faces.iter().flatten().copied().collect();
    let vertices = indices_of(self.ground);
    let mut out = Vec::new();
    for k in 1..=vertices.len() {
      let Some(smaller) = faces.get(k - 1) else {
        break;
      };
      let mut level = Vec::new();
      for &f in smaller {
        let top = if f == 0 { 0 } else { 64 - f.leading_zeros() as usize };
        for &v in vertices.iter().filter(|&&v| v >= top) {
          let cand = f | (1u64 << v);
          if face_set.contains(&cand) {
            continue;
          }
          if indices_of(cand).iter().all(|&u| face_set.contains(&(cand & !(1u64 << u)))) {
            level.push(cand);
          }
        }
      }
      level.sort_unstable();
      out.extend(level);
    }
    out
  }

  /// `Γ* = {σ ⊆ V | V \ σ ∉ Γ}`. Its maximal faces are the complements of the
  /// minimal non-faces of `Γ`.
  pub fn alexander_dual(&self) -> Self {
    let maximal = if self.maximal == [self.ground] {
      Vec::new()
    } else {
      self.minimal_non_faces().into_iter().map(|n| self.ground & !n).collect()
    };
    Self { ground: self.ground, maximal: maximal_only(maximal) }
  }

  /// Reduced simplicial homology dimensions over the rationals, from the
  /// augmented chain complex.
  pub fn reduced_homology_dims(&self) -> HomologyDims {
    let faces = self.faces_by_size();
    if faces.is_empty() {
      return HomologyDims::zero();
    }
    let index: Vec<HashMap<VertexSet, usize>> =
      faces.iter().map(|level| level.iter().enumerate().map(|(i, &f)| (f, i)).collect()).collect();
    // ranks[k] = rank of the boundary from faces of size k to faces of size k-1
    let mut ranks = vec![0usize; faces.len() + 1];
    for k in 1..faces.len() {
      ranks[k] = exactlinalg::rank(&boundary_matrix(&faces[k], &index[k - 1], faces[k - 1].len()));
    }
    let dims: Vec<usize> = (0..faces.len()).map(|k| faces[k].len() - ranks[k] - ranks[k + 1]).collect();
    let h = HomologyDims::from_vec(dims);
    debug_assert_eq!(h.euler_characteristic(), self.reduced_euler_characteristic());
    h
  }

  /// `Σ_k (-1)^(k-1) f_k` over faces of size `k`, including the empty face.
  pub fn reduced_euler_characteristic(&self) -> i64 {
    self
      .faces_by_size()
      .iter()
      .enumerate()
      .map(|(k, level)| if k % 2 == 1 { level.len() as i64 } else { -(level.len() as i64) })
      .sum()
  }
}

/// Boundary of size-`k` faces into size-`(k-1)` faces. Removing the vertex at
/// sorted position `j` contributes sign `(-1)^j`.
fn boundary_matrix(faces: &[VertexSet], lower: &HashMap<VertexSet, usize>, n_lower: usize) -> IntegerMatrix {
  let mut rows = vec![vec![0i64; faces.len()]; n_lower];
  for (col, &f) in faces.iter().enumerate() {
    for (j, v) in indices_of(f).into_iter().enumerate() {
      let row = lower[&(f & !(1u64 << v))];
      rows[row][col] = if j % 2 == 0 { 1 } else { -1 };
    }
  }
  IntegerMatrix::from_rows_with_cols(&rows, faces.len())
}

/// The nerve of a cover: vertices index the sets, and `K` is a face iff the
/// sets indexed by `K` share a point. `∅` is always a face.
pub fn nerve(cover: &[VertexSet]) -> Result<SimplicialComplex, ComplexError> {
  if cover.len() > MAX_VERTICES {
    return Err(ComplexError::TooManyVertices(cover.len()));
  }
  let union = cover.iter().fold(0, |a, &b| a | b);
  let stars: Vec<VertexSet> = indices_of(union)
    .into_iter()
    .map(|x| cover.iter().enumerate().filter(|(_, &s)| s >> x & 1 == 1).fold(0, |m, (k, _)| m | (1u64 << k)))
    .collect();
  let ground = full_mask(cover.len());
  if stars.is_empty() {
    return Ok(SimplicialComplex::irrelevant(ground));
  }
  SimplicialComplex::new(ground, stars)
}

impl fmt::Debug for SimplicialComplex {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.debug_struct("SimplicialComplex")
      .field("ground", &indices_of(self.ground))
      .field("maximal", &self.maximal_face_lists())
      .finish()
  }
}

impl Serialize for SimplicialComplex {
  fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> { self.maximal_face_lists().serialize(s) }
}

/// Reduced Betti numbers indexed by degree `j ≥ -1`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct HomologyDims {
  // dims[0] is degree -1; no trailing zeros
  dims: Vec<usize>,
}

impl HomologyDims {
  pub fn zero() -> Self { Self::default() }

  /// `dims[k]` is the dimension in degree `k - 1`.
  pub fn from_vec(mut dims: Vec<usize>) -> Self {
    while dims.last() == Some(&0) {
      dims.pop();
    }
    Self { dims }
  }

  pub fn get(&self, degree: i64) -> usize {
    if degree < -1 {
      return 0;
    }
    self.dims.get((degree + 1) as usize).copied().unwrap_or(0)
  }

  pub fn is_zero(&self) -> bool { self.dims.is_empty() }

  /// Nonzero `(degree, dim)` pairs in ascending degree.
  pub fn nonzero(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
    self.dims.iter().enumerate().filter(|(_, &d)| d != 0).map(|(k, &d)| (k as i64 - 1, d))
  }

  pub fn euler_characteristic(&self) -> i64 {
    self.nonzero().map(|(j, d)| if j.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) }).sum()
  }

  pub fn to_map(&self) -> BTreeMap<i64, usize> { self.nonzero().collect() }
}

impl fmt::Debug for HomologyDims {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result { write!(f, "{:?}", self.to_map()) }
}

impl fmt::Display for HomologyDims {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if self.is_zero() {
      return write!(f, "0");
    }
    let parts: Vec<String> = self.nonzero().map(|(j, d)| format!("H~{j}={d}")).collect();
    write!(f, "{}", parts.join(" "))
  }
}

impl Serialize for HomologyDims {
  fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(None)?;
    for (j, d) in self.nonzero() {
      map.serialize_entry(&j.to_string(), &d)?;
    }
    map.end()
  }
}
