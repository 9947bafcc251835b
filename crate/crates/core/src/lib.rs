//! Exact search, closed-form bounds, and counting oracles for Ramsey-type
//! numbers on the integers.
//!
//! Three progression families are covered, all 2-colored:
//!
//! * arithmetic progressions, giving the van der Waerden numbers `w(k;2)`,
//! * semi-progressions of scope `m` (jumps in `{d, 2d, .., md}`), giving `SP_m(k)`,
//! * quasi-progressions of diameter `n` (jumps in `{d, d+1, .., d+n}`), giving `Q_n(k)`.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is pure
//! computation; parallel drivers, timing, file formats, and the command line
//! live in the companion `ramsey-lab` crate, which plugs into the hooks
//! exposed by [`search::SearchMonitor`] and [`concentration::ChunkRunner`].
//!
//! Modules:
//!
//! * [`progressions`]: progression families, verification, and enumeration.
//! * [`search`]: backtracking computation of the Ramsey-type numbers with
//!   witness certificates.
//! * [`bounds`]: every closed-form bound and exact formula, as evaluators.
//! * [`counting`]: brute-force counting oracles behind the union-bound
//!   arguments, the `λ_k` transfer matrix, and the closed-form sums.
//! * [`concentration`]: seeded Monte-Carlo experiments on random graphs and
//!   sequences, compared with their tail bounds.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bounds;
pub mod concentration;
pub mod counting;
pub mod error;
pub mod progressions;
pub mod search;

pub use error::{Error, Result};
pub use progressions::{Coloring, Progression, ProgressionKind};
