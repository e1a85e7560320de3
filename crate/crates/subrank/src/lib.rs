//! Rank structure of set functions built from elementary imset inequalities:
//! membership and facets of reordered supermodular cones and their Minkowski
//! sums, exact supermodular and elementary submodular rank with witnesses,
//! least-squares projection onto the cones, curvature/submodularity-ratio
//! metrics with certified guarantee formulas, and rank-aware greedy
//! optimization with brute-force verification oracles at desk scale.
//!
//! Set functions live on `{1, ..., n}` and are stored densely: a table of
//! `2^n` values indexed by subset bitmask (element `k` ↔ bit `k−1`). Larger
//! ground sets are handled lazily through the [`SetFunction`] trait by the
//! optimization routines.
//!
//! ```
//! use subrank::{cones, SetFunctionTable, Subset};
//!
//! // f(S) = |S|² is strictly supermodular: every imset row is positive.
//! let f = SetFunctionTable::from_fn(3, |s| (s.len() * s.len()) as f64)?;
//! assert!(cones::cone_membership(&f, &cones::XiPattern::supermodular(3), 1e-9)?);
//!
//! // Its negative needs two reordered supermodular summands.
//! let (rank, witness) = cones::supermodular_rank(&f.negated(), 1e-9)?;
//! assert_eq!(rank, 2);
//! assert_eq!(witness.len(), 2);
//! # Ok::<(), subrank::Error>(())
//! ```

pub mod cones;
mod error;
pub mod experiments;
pub mod lattice;
pub mod metrics;
pub mod objectives;
pub mod optimize;
pub mod project;

pub use error::{Error, Result};
pub use lattice::{Element, GroundSet, Restriction, SetFunction, SetFunctionTable, Subset};

/// Book chapters double as doctests; `cargo test --doc` runs every code
/// fence in them against the current API.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            #[allow(dead_code)]
            struct $name;
        };
    }

    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(SetFunctions, "../../../book/src/set-functions.md");
    chapter!(ImsetCones, "../../../book/src/imset-cones.md");
    chapter!(Rank, "../../../book/src/rank.md");
    chapter!(Projections, "../../../book/src/projections.md");
    chapter!(Curvature, "../../../book/src/curvature.md");
    chapter!(Optimization, "../../../book/src/optimization.md");
    chapter!(Generators, "../../../book/src/generators.md");
    chapter!(Experiments, "../../../book/src/experiments.md");
    chapter!(CommandLine, "../../../book/src/cli.md");
}
