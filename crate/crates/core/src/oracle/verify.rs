use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{Oracle, OracleError, ScanBox};
use crate::algorithm::{AlgorithmError, CohomologyEngine};
use crate::classgroup::ClassElement;
use crate::fan::Fan;
use crate::toric::{SupportSet, ToricContext};

/// Only this many mismatches are kept verbatim; all are counted.
const RECORDED_MISMATCHES: usize = 64;

#[derive(Debug, Error)]
pub enum VerifyError {
  #[error(transparent)]
  Algorithm(#[from] AlgorithmError),
  #[error(transparent)]
  Oracle(#[from] OracleError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchKind {
  /// Graded piece in multidegree `p`.
  Graded,
  /// Full `h^i` of the line bundle with divisor `p`.
  Bundle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
  pub kind:      MismatchKind,
  pub p:         Vec<i64>,
  pub degree:    usize,
  pub algorithm: u64,
  pub oracle:    u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
  pub fan:              String,
  pub scan_box:         ScanBox,
  pub match_count:      u64,
  pub mismatch_count:   u64,
  pub graded_checks:    u64,
  pub bundle_checks:    u64,
  pub classes_compared: u64,
  /// Classes seen in the box whose contributing points are not all inside it.
  pub classes_skipped:  u64,
  pub mismatches:       Vec<Mismatch>,
}

impl OracleReport {
  pub fn passed(&self) -> bool { self.mismatch_count == 0 }

  fn record(&mut self, m: Mismatch) {
    self.mismatch_count += 1;
    if self.mismatches.len() < RECORDED_MISMATCHES {
      self.mismatches.push(m);
    }
  }
}

type Compared = Option<(Vec<i64>, Vec<u64>, Vec<u64>)>;

struct ClassScan {
  representative: Vec<i64>,
  counts:         HashMap<SupportSet, u64>,
}

pub fn verify(fan: &Fan, name: &str, scan: &ScanBox) -> Result<OracleReport, VerifyError> {
  let ctx = ToricContext::new(fan.clone()).map_err(AlgorithmError::from)?;
  let engine = CohomologyEngine::new(ctx.clone())?;
  let oracle = Oracle::new(ctx)?;
  verify_engine(&engine, &oracle, name, scan)
}

/// Compares `engine` against `oracle` on every point of the box: graded
/// dimensions for each `1 ≤ i ≤ d`, then whole cohomology vectors for every
/// class met in the box whose contributing points the box fully contains.
pub fn verify_engine(
  engine: &CohomologyEngine,
  oracle: &Oracle,
  name: &str,
  scan: &ScanBox,
) -> Result<OracleReport, VerifyError> {
  let ctx = oracle.context();
  let (n, d) = (ctx.n_rays(), ctx.dim());
  scan.check(n)?;
  let g = ctx.class_group();

  let mut pairs: HashMap<SupportSet, Vec<(u64, u64)>> = HashMap::new();
  let mut classes: BTreeMap<ClassElement, ClassScan> = BTreeMap::new();
  let mut report = OracleReport {
    fan:              name.to_string(),
    scan_box:         scan.clone(),
    match_count:      0,
    mismatch_count:   0,
    graded_checks:    0,
    bundle_checks:    0,
    classes_compared: 0,
    classes_skipped:  0,
    mismatches:       Vec::new(),
  };

  let mut failure = None;
  scan.for_each(|p| {
    if failure.is_some() {
      return;
    }
    let support = SupportSet::neg(p);
    let values = match pairs.get(&support) {
      Some(v) => v,
      None => {
        let computed: Result<Vec<(u64, u64)>, AlgorithmError> = (1..=d)
          .map(|i| Ok((engine.table().graded_dim(support, i)? as u64, oracle.graded_dim(support, i) as u64)))
          .collect();
        match computed {
          Ok(v) => pairs.entry(support).or_insert(v),
          Err(e) => {
            failure = Some(VerifyError::from(e));
            return;
          },
        }
      },
    };
    for (k, &(alg, ora)) in values.iter().enumerate() {
      report.graded_checks += 1;
      if alg == ora {
        report.match_count += 1;
      } else {
        report.record(Mismatch { kind: MismatchKind::Graded, p: p.to_vec(), degree: k + 1, algorithm: alg, oracle: ora });
      }
    }
    match g.divisor_class(p) {
      Ok(c) => {
        let entry = classes.entry(c).or_insert_with(|| ClassScan { representative: p.to_vec(), counts: HashMap::new() });
        *entry.counts.entry(support).or_default() += 1;
      },
      Err(e) => failure = Some(OracleError::from(e).into()),
    }
  });
  if let Some(e) = failure {
    return Err(e);
  }

  let outcomes: Vec<Result<Compared, VerifyError>> = classes
    .into_par_iter()
    .map(|(class, scan)| {
      let expected = match oracle.cohomology_from_counts(&class, &scan.counts) {
        Ok(h) => h,
        Err(OracleError::BoxTooSmall { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
      };
      let got = engine.cohomology(&scan.representative)?.dims;
      Ok(Some((scan.representative, got, expected)))
    })
    .collect();

  for outcome in outcomes {
    let Some((p, got, expected)) = outcome? else {
      report.classes_skipped += 1;
      continue;
    };
    report.classes_compared += 1;
    for (degree, (&alg, &ora)) in got.iter().zip(&expected).enumerate() {
      report.bundle_checks += 1;
      if alg == ora {
        report.match_count += 1;
      } else {
        report.record(Mismatch { kind: MismatchKind::Bundle, p: p.clone(), degree, algorithm: alg, oracle: ora });
      }
    }
  }
  Ok(report)
}
