//! Dimensions of line bundle cohomology `h^i(X, O(D))` on simplicial complete
//! toric varieties, computed from the Stanley–Reisner generators of the fan
//! and checked against an independent local-cohomology oracle.
//!
//! The usual entry point is [`algorithm::CohomologyEngine`]:
//!
//! ```
//! use toric_cohom::{algorithm::CohomologyEngine, fan::parse_fan};
//!
//! let fan = parse_fan(r#"{"dim": 2, "rays": [[1,0],[0,1],[-1,-1]], "max_cones": [[0,1],[1,2],[0,2]]}"#)?;
//! let engine = CohomologyEngine::from_fan(fan)?;
//! assert_eq!(engine.cohomology(&[-3, 0, 0])?.dims, vec![0, 0, 1]);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod algorithm;
pub mod classgroup;
pub mod cli;
pub mod exactlinalg;
pub mod fan;
pub mod lattice;
pub mod oracle;
pub mod simplicial;
pub mod toric;

pub use algorithm::{cohomology, CohomologyEngine, CohomologyVector};
pub use fan::{parse_fan, Fan};
pub use toric::{SupportSet, ToricContext};
