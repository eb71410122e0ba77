//! Simplicial complete fans: the JSON document format, validation, and the
//! face complex on the rays.

use std::collections::HashMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlinalg::{self, IntegerMatrix};
use crate::simplicial::{self, SimplicialComplex, VertexSet, MAX_VERTICES};

#[derive(Debug, Error)]
pub enum FanError {
  #[error("malformed fan document: {0}")]
  Malformed(#[from] serde_json::Error),
  #[error("dimension must be positive")]
  ZeroDimension,
  #[error("ray {index} has length {len}, expected {dim}")]
  RayLength { index: usize, len: usize, dim: usize },
  #[error("ray {0} is zero")]
  ZeroRay(usize),
  #[error("non-primitive ray {index}: {ray:?} (entries share the factor {gcd})")]
  NonPrimitiveRay { index: usize, ray: Vec<i64>, gcd: i64 },
  #[error("duplicate rays {0} and {1}")]
  DuplicateRay(usize, usize),
  #[error("cone {cone} uses ray index {index} out of range (only {n} rays)")]
  IndexOutOfRange { cone: usize, index: usize, n: usize },
  #[error("cone {cone} lists ray {index} more than once")]
  RepeatedIndex { cone: usize, index: usize },
  #[error("at most {MAX_VERTICES} rays are supported, got {0}")]
  TooManyRays(usize),
}

/// Rays (rows of the ray matrix) and maximal cones (sets of ray indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
  pub dim:       usize,
  pub rays:      Vec<Vec<i64>>,
  pub max_cones: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FanDiagnostics {
  pub is_simplicial:   bool,
  pub spans:           bool,
  pub ridge_counts_ok: bool,
  pub messages:        Vec<String>,
}

impl FanDiagnostics {
  pub fn ok(&self) -> bool { self.is_simplicial && self.spans && self.ridge_counts_ok }
}

impl Fan {
  /// Checks the structural invariants that [`parse_fan`] enforces.
  pub fn new(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
    if dim == 0 {
      return Err(FanError::ZeroDimension);
    }
    if rays.len() > MAX_VERTICES {
      return Err(FanError::TooManyRays(rays.len()));
    }
    let mut seen: HashMap<&[i64], usize> = HashMap::new();
    for (index, ray) in rays.iter().enumerate() {
      if ray.len() != dim {
        return Err(FanError::RayLength { index, len: ray.len(), dim });
      }
      let gcd = ray.iter().fold(0i64, |g, &x| g.gcd(&x));
      if gcd == 0 {
        return Err(FanError::ZeroRay(index));
      }
      if gcd != 1 {
        return Err(FanError::NonPrimitiveRay { index, ray: ray.clone(), gcd });
      }
      if let Some(&prev) = seen.get(ray.as_slice()) {
        return Err(FanError::DuplicateRay(prev, index));
      }
      seen.insert(ray, index);
    }
    for (cone, indices) in max_cones.iter().enumerate() {
      let mut used = 0u64;
      for &index in indices {
        if index >= rays.len() {
          return Err(FanError::IndexOutOfRange { cone, index, n: rays.len() });
        }
        if used >> index & 1 == 1 {
          return Err(FanError::RepeatedIndex { cone, index });
        }
        used |= 1 << index;
      }
    }
    Ok(Self { dim, rays, max_cones })
  }

  pub fn n_rays(&self) -> usize { self.rays.len() }

  /// The `n x d` matrix whose row `ρ` is the ray `u_ρ`.
  pub fn ray_matrix(&self) -> IntegerMatrix { IntegerMatrix::from_rows_with_cols(&self.rays, self.dim) }

  pub fn cone_mask(&self, cone: usize) -> VertexSet { simplicial::mask_of(&self.max_cones[cone]) }

  pub fn to_json(&self) -> String { serde_json::to_string(self).expect("fan serializes") }

  pub fn validate(&self) -> FanDiagnostics { validate(self) }

  pub fn complex(&self) -> SimplicialComplex { fan_complex(self) }
}

pub fn parse_fan(text: &str) -> Result<Fan, FanError> {
  let raw: Fan = serde_json::from_str(text)?;
  Fan::new(raw.dim, raw.rays, raw.max_cones)
}

pub fn validate(fan: &Fan) -> FanDiagnostics {
  let mut messages = Vec::new();
  let d = fan.dim;

  let rank = exactlinalg::rank(&fan.ray_matrix());
  let spans = rank == d;
  if !spans {
    messages.push(format!("rays span a rank {rank} sublattice, expected {d}"));
  }

  let mut is_simplicial = true;
  for (c, cone) in fan.max_cones.iter().enumerate() {
    if cone.len() != d {
      is_simplicial = false;
      messages.push(format!("cone {c} has {} rays, expected {d}", cone.len()));
      continue;
    }
    let rows: Vec<&[i64]> = cone.iter().map(|&r| fan.rays[r].as_slice()).collect();
    if exactlinalg::rank(&IntegerMatrix::from_rows_with_cols(&rows, d)) != d {
      is_simplicial = false;
      messages.push(format!("cone {c} has linearly dependent rays"));
    }
  }

  let mut ridge_counts_ok = true;
  if fan.max_cones.is_empty() {
    ridge_counts_ok = false;
    messages.push("fan has no maximal cones".to_string());
  }
  let masks: Vec<VertexSet> = (0..fan.max_cones.len()).map(|c| fan.cone_mask(c)).collect();
  let mut ridge_seen: HashMap<VertexSet, usize> = HashMap::new();
  for (c, &mask) in masks.iter().enumerate() {
    if fan.max_cones[c].len() != d {
      continue;
    }
    for &r in &fan.max_cones[c] {
      let ridge = mask & !(1u64 << r);
      ridge_seen.entry(ridge).or_insert_with(|| masks.iter().filter(|&&m| m & ridge == ridge).count());
    }
  }
  let mut ridges: Vec<_> = ridge_seen.into_iter().filter(|&(_, count)| count != 2).collect();
  ridges.sort_unstable();
  for (ridge, count) in ridges {
    ridge_counts_ok = false;
    messages.push(format!("ridge {:?} lies in {count} maximal cones, expected 2", simplicial::indices_of(ridge)));
  }
  let covered = masks.iter().fold(0u64, |a, &m| a | m);
  for r in 0..fan.n_rays() {
    if covered >> r & 1 == 0 {
      ridge_counts_ok = false;
      messages.push(format!("ray {r} lies in no maximal cone"));
    }
  }

  FanDiagnostics { is_simplicial, spans, ridge_counts_ok, messages }
}

/// The complex `P = {σ(1) | σ ∈ Δ}` on the ray indices.
pub fn fan_complex(fan: &Fan) -> SimplicialComplex {
  let ground = simplicial::full_mask(fan.n_rays());
  SimplicialComplex::new(ground, (0..fan.max_cones.len()).map(|c| fan.cone_mask(c)))
    .expect("cone indices are checked at construction")
}

#[cfg(test)]
mod tests {
  use proptest::prelude::*;

  use super::*;

  const P2: &str = r#"{"dim": 2, "rays": [[1,0],[0,1],[-1,-1]], "max_cones": [[0,1],[1,2],[0,2]]}"#;

  #[test]
  fn parse_p2() {
    let fan = parse_fan(P2).unwrap();
    assert_eq!(fan.n_rays(), 3);
    assert_eq!(fan.dim, 2);
    assert_eq!(fan.max_cones, vec![vec![0, 1], vec![1, 2], vec![0, 2]]);
    assert!(fan.validate().ok());
  }

  #[test]
  fn parse_errors() {
    let err = parse_fan(r#"{"dim": 2, "rays": [[2,0],[0,1]], "max_cones": [[0,1]]}"#).unwrap_err();
    assert!(matches!(err, FanError::NonPrimitiveRay { index: 0, gcd: 2, .. }), "{err}");
    assert!(err.to_string().contains("non-primitive ray"));

    let err = parse_fan(r#"{"dim": 2, "rays": [[1,0],[0,1],[-1,-1]], "max_cones": [[0,3]]}"#).unwrap_err();
    assert!(matches!(err, FanError::IndexOutOfRange { index: 3, n: 3, .. }));
    assert!(err.to_string().contains("out of range"));

    let err = parse_fan(r#"{"dim": 2, "rays": [[1,0,0]], "max_cones": []}"#).unwrap_err();
    assert!(matches!(err, FanError::RayLength { index: 0, len: 3, dim: 2 }));

    let err = parse_fan(r#"{"dim": 2, "rays": [[1,0],[1,0]], "max_cones": []}"#).unwrap_err();
    assert!(matches!(err, FanError::DuplicateRay(0, 1)));

    assert!(matches!(parse_fan("{\"dim\": 2"), Err(FanError::Malformed(_))));
    assert!(matches!(parse_fan(r#"{"dim": 1, "rays": [[0]], "max_cones": []}"#), Err(FanError::ZeroRay(0))));
    assert!(matches!(parse_fan(r#"{"dim": 0, "rays": [], "max_cones": []}"#), Err(FanError::ZeroDimension)));
  }

  #[test]
  fn validate_findings() {
    let partial = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1]]).unwrap();
    let diag = partial.validate();
    assert!(diag.is_simplicial && diag.spans);
    assert!(!diag.ridge_counts_ok);
    assert!(!diag.ok());

    let line = Fan::new(2, vec![vec![1, 0], vec![-1, 0]], vec![vec![0], vec![1]]).unwrap();
    let diag = line.validate();
    assert!(!diag.spans);
    assert!(!diag.is_simplicial);

    let dependent = Fan::new(2, vec![vec![1, 0], vec![-1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
    assert!(!dependent.validate().is_simplicial);

    let p1 = Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
    assert!(p1.validate().ok());
  }

  #[test]
  fn face_complexes() {
    let p2 = parse_fan(P2).unwrap();
    assert_eq!(p2.complex().maximal_face_lists(), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    assert_eq!(p2.complex().reduced_homology_dims().get(1), 1);

    let p1p1 = Fan::new(
      2,
      vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
      vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
    .unwrap();
    assert_eq!(p1p1.complex().maximal_face_lists(), vec![vec![0, 1], vec![0, 3], vec![1, 2], vec![2, 3]]);

    let cone = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
    assert_eq!(cone.complex(), SimplicialComplex::full_simplex(0b11));
  }

  fn primitive_ray() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..5, 3).prop_filter("primitive", |r| r.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1)
  }

  proptest! {
    #[test]
    fn json_round_trip(rays in prop::collection::hash_set(primitive_ray(), 1..6), cones in prop::collection::vec(prop::collection::btree_set(0usize..6, 0..4), 0..4)) {
      let rays: Vec<Vec<i64>> = rays.into_iter().collect();
      let cones: Vec<Vec<usize>> = cones.into_iter().map(|c| c.into_iter().filter(|&i| i < rays.len()).collect()).collect();
      let fan = Fan::new(3, rays, cones).unwrap();
      prop_assert_eq!(parse_fan(&fan.to_json()).unwrap(), fan);
    }
  }
}
