//! Upper bounds on the interleaving distance between generalized
//! persistence modules over finite posets.
//!
//! A persistence module here is a functor from a finite poset into either
//! finite sets or GF(p) vector spaces. Given two modules, a step flow on
//! the poset and an *assignment* (a pair of per-point morphism families
//! shaped like an interleaving but with no commutativity promise), the
//! crate computes the assignment's loss — the supremum of merging-distance
//! gaps over all naturality parallelograms and triangle identities — and
//! the induced bound `d_I(F,G) <= eps + loss`. Translating the assignment
//! past its loss produces a genuine interleaving, which is re-verified
//! exactly to certify the bound.
//!
//! Losses can be evaluated naively, by binary search over reducing-constant
//! sets, or through the linear/grid diagram reductions that only touch
//! representative points.
//!
//! # Example
//!
//! Two branches merging at different heights on the chain `{0..4}` under
//! the clamped unit-shift flow, compared through the branch-preserving
//! assignment at epsilon = 0:
//!
//! ```
//! use persloss::{ProblemFile, Strategy, DiagramAlgorithm, ExtDistance};
//! use persloss::rational::rint;
//!
//! let problem = ProblemFile::from_str(r#"{
//!   "poset": { "type": "grid", "axes": [5] },
//!   "flow": { "breakpoints": ["0/1","1/1","2/1","3/1","4/1","5/1"],
//!             "translations": { "type": "floor_shift" } },
//!   "modules": {
//!     "F": { "backend": "finset",
//!            "objects": { "0": ["u","v"], "1": ["u","v"], "2": ["u"], "3": ["u"], "4": ["u"] },
//!            "maps": { "0->1": { "u": "u", "v": "v" },
//!                      "1->2": { "u": "u", "v": "u" },
//!                      "2->3": { "u": "u" }, "3->4": { "u": "u" } } },
//!     "G": { "backend": "finset",
//!            "objects": { "0": ["u","v"], "1": ["u"], "2": ["u"], "3": ["u"], "4": ["u"] },
//!            "maps": { "0->1": { "u": "u", "v": "u" },
//!                      "1->2": { "u": "u" },
//!                      "2->3": { "u": "u" }, "3->4": { "u": "u" } } }
//!   },
//!   "assignment": {
//!     "epsilon": "0/1",
//!     "phi": { "0": { "u": "u", "v": "v" }, "1": { "u": "u", "v": "u" },
//!              "2": { "u": "u" }, "3": { "u": "u" }, "4": { "u": "u" } },
//!     "psi": { "0": { "u": "u", "v": "v" }, "1": { "u": "u" },
//!              "2": { "u": "u" }, "3": { "u": "u" }, "4": { "u": "u" } }
//!   }
//! }"#).unwrap().build(None).unwrap();
//!
//! let asgn = problem.assignment.as_ref().unwrap();
//! let report = asgn
//!     .total_loss(&problem.flow, Strategy::Naive, DiagramAlgorithm::Naive)
//!     .unwrap();
//! // G merges the branches one step earlier than F, so the assignment is
//! // one flow step away from a true interleaving
//! assert_eq!(report.total, ExtDistance::Finite(rint(1)));
//! assert_eq!(report.bound, Some(ExtDistance::Finite(rint(1))));
//! let (interleaving, delta) = asgn.deinterleave(&problem.flow).unwrap();
//! assert_eq!(delta, rint(2));
//! assert!(interleaving.verify_interleaving().unwrap().ok);
//! ```

pub mod backend;
pub mod flow;
pub mod loss;
pub mod metric;
pub mod pmodule;
pub mod poset;
pub mod problem;
pub mod rational;
pub mod reduce;
pub mod report;

pub use backend::{compose, image_basis, restrict_image, Matrix, Morphism, Object, SetMap, Subspace};
pub use flow::{compose_translations, is_line_preserving, GridFlow, StepFlow, Translation};
pub use loss::{Assignment, DiagramAlgorithm, LossReport, Strategy};
pub use metric::{merging_distance, morphism_distance, reducing_constants, Elem, ExtDistance};
pub use pmodule::{CriticalData, PersModule};
pub use poset::{FinitePoset, Interval};
pub use problem::{Problem, ProblemFile};
pub use rational::Rat;
