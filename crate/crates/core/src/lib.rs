//! Semigroups of order-preserving and order-reversing partial contractions
//! on a finite chain: enumeration, generated subsemigroups, ranks,
//! factorization into higher-height maps, and starred Green's classes.

pub mod chain;
pub mod closure;
pub mod enumeration;
pub mod error;
pub mod factorization;
pub mod generators;
pub mod green_star;
pub mod rank;
pub mod verify;

pub use chain::{compose, is_convex, KernelPartition, PartialMap, PointSet};
pub use closure::{closure, generates, is_minimal_generating, ClosureResult};
pub use enumeration::{count, enumerate, Family, FamilySpec, Level};
pub use error::{Error, Result};
pub use factorization::{factor_full, factor_step, factor_to_top, Branch, FactorPair};
pub use rank::{exact_rank, RankCertificate, RankMode};
pub use verify::{run_suite, SuiteOptions, VerificationReport};
