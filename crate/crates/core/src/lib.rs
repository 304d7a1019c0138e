//! Exact computation of inner and outer bounds on the capacity region of
//! index coding problems.
//!
//! Everything is exact rational arithmetic: regions are polytopes held as
//! facet/vertex pairs, and achievability claims come with certificates that
//! can be checked by substitution.

pub mod error;
pub mod geometry;
pub mod inner_bounds;
pub mod outer_bound;
pub mod problem;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{GeometryError, LinearSystem, Rational, Region, Row};
pub use problem::{
    canonical_key, enumerate_problems, interfering_sets, parse_problem, CanonicalKey, MsgSet,
    Problem, ProblemError, ProblemRecord,
};
pub use outer_bound::{build_lifted_outer, mais_region, outer_region, LiftedOuterSystem};
pub use inner_bounds::{
    composite_member, composite_region_fixed, dual_region, flat_region, flat_timeshare_region,
    symmetric_capacity, AchievabilityCertificate, CompositeRates, DecodingConfig, Membership,
    SearchBudget, SymmetricCapacity,
};
pub use verify::{
    sweep, verify_capacity, SweepOptions, SweepSummary, Verdict, VerificationRecord, VerifyOptions,
};
