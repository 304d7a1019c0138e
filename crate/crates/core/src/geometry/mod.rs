//! Exact polyhedral computation over the rationals.

pub mod dd;
pub mod fm;
pub mod lp;
pub mod rational;
pub mod region;
pub mod system;

pub use dd::{cone_generators, hull_inequalities, vertex_enumerate, ConeGenerators};
pub use fm::{fm_eliminate, fm_project, remove_redundant};
pub use lp::{find_feasible, lp_solve, lp_solve_rows, LpOutcome, Sense};
pub use rational::Rational;
pub use region::{project_by_oracle, region_contains, region_equal, Region, RegionRecord};
pub use system::{LinearSystem, Row};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("polyhedron is unbounded along ({})", direction.join(", "))]
    Unbounded { direction: Vec<String> },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}
