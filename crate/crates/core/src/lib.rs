//! Exact and Monte Carlo computations for finite subgroups of U(d).
//!
//! The crate covers character distributions of the signed permutation group,
//! metric entropy of group images, subgaussian (ψ₂) norms of characters,
//! and suprema of randomized traces `sup_g |tr(u π(g))|`, together with an
//! engine that checks the resulting inequalities numerically.
//!
//! ```
//! use unitrace::exactcomb::char_tail_hyperoct;
//! use num_rational::BigRational;
//!
//! // Only the identity of the 8-element group {±1}² ⋊ S(2) has trace 2.
//! let p = char_tail_hyperoct(2, 1).unwrap();
//! assert_eq!(p, BigRational::new(1.into(), 8.into()));
//! ```

pub mod error;
pub mod boundsver;
pub mod exactcomb;
pub mod groups;
pub mod io;
pub mod matcore;
pub mod orlicz;
pub mod randmat;
pub mod entropy;
pub mod stats;
pub mod supopt;

pub use error::{Error, Result};
pub use exactcomb::ExactDist;
pub use groups::{EnumeratedGroup, GroupElement, GroupSpec, Permutation, SignedPermElement};
pub use matcore::{CMatrix, UnitaryMatrix};
pub use randmat::SeededRng;
pub use stats::McEstimate;
