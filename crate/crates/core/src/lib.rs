//! Union-closed families generated by the translates of a set `R` in a
//! finite Abelian group `G`, and exhaustive verification that their average
//! member size is at least `|G| / 2`.
//!
//! ```
//! use ucc::{verify_theorem, GSubset, GroupSpec};
//!
//! let z3: GroupSpec = "Z3".parse().unwrap();
//! let r = GSubset::from_indices(&z3, [0, 1]).unwrap();
//! let report = verify_theorem(&z3, &r).unwrap();
//! assert_eq!(report.family_size, 5);
//! assert!(report.theorem_ok);
//! ```

pub mod cli;
pub mod error;
pub mod family;
pub mod group;
pub mod subset;
pub mod verify;

pub use error::{Error, Result};
pub use family::{
    naive_translate_family, translate_family, union_closure, union_closure_bounded, SetFamily,
};
pub use group::{Element, GroupSpec};
pub use subset::{f_map, f_map_alt, parse_set, GSubset};
pub use verify::{
    element_frequencies, majority_element, reimer_check, sweep, sweep_with, verify_theorem,
    Majority, SweepConfig, SweepSummary, VerificationReport,
};
