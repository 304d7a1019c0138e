use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::dd::{hull_inequalities, vertex_enumerate};
use super::lp::{find_feasible, lp_solve, LpOutcome, Sense};
use super::rational::Rational;
use super::system::{LinearSystem, Row};
use super::GeometryError;

/// A polytope held in both descriptions: irredundant facets and the exact
/// list of extreme points. Facets are sorted deterministically and vertices
/// lexicographically.
#[derive(Clone, Debug)]
pub struct Region {
    facets: LinearSystem,
    vertices: Vec<Vec<Rational>>,
}

/// Exchange form of a [`Region`]: rendered facet rows and `p/q` vertex
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub vars: Vec<String>,
    pub facets: Vec<String>,
    pub vertices: Vec<Vec<Rational>>,
}

impl Region {
    /// Builds the region of a bounded system: vertices first, then the
    /// canonical facets of their hull.
    pub fn from_system(sys: &LinearSystem) -> Result<Self, GeometryError> {
        let vertices = vertex_enumerate(sys)?;
        Self::from_vertices(sys.vars().to_vec(), &vertices)
    }

    /// Convex hull of `points`.
    pub fn from_vertices(names: Vec<String>, points: &[Vec<Rational>]) -> Result<Self, GeometryError> {
        let facets = hull_inequalities(names, points);
        let vertices = vertex_enumerate(&facets)?;
        Ok(Region { facets, vertices })
    }

    pub fn dim(&self) -> usize {
        self.facets.dim()
    }

    pub fn facets(&self) -> &LinearSystem {
        &self.facets
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn check_dim(&self, found: usize) -> Result<(), GeometryError> {
        if found != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    pub fn contains(&self, point: &[Rational]) -> Result<bool, GeometryError> {
        self.check_dim(point.len())?;
        Ok(!self.is_empty() && self.facets.is_satisfied(point))
    }

    /// `self ⊆ other`, decided on the vertices of `self`.
    pub fn is_subset_of(&self, other: &Region) -> Result<bool, GeometryError> {
        other.check_dim(self.dim())?;
        for v in &self.vertices {
            if !other.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equals(&self, other: &Region) -> Result<bool, GeometryError> {
        Ok(self.is_subset_of(other)? && other.is_subset_of(self)?)
    }

    /// A vertex of `self` lying outside `other`, if any.
    pub fn vertex_outside(&self, other: &Region) -> Result<Option<Vec<Rational>>, GeometryError> {
        other.check_dim(self.dim())?;
        for v in &self.vertices {
            if !other.contains(v)? {
                return Ok(Some(v.clone()));
            }
        }
        Ok(None)
    }

    /// Whether `row` (in this region's variables) is one of its facets.
    pub fn has_facet(&self, row: &Row) -> bool {
        self.facets.contains_row(row)
    }

    /// The region with coordinates relabeled: old coordinate `i` becomes
    /// new coordinate `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Region, GeometryError> {
        self.check_dim(perm.len())?;
        let pts: Vec<Vec<Rational>> = self
            .vertices
            .iter()
            .map(|v| {
                let mut w = vec![Rational::zero(); v.len()];
                for (i, x) in v.iter().enumerate() {
                    w[perm[i]] = x.clone();
                }
                w
            })
            .collect();
        Region::from_vertices(self.facets.vars().to_vec(), &pts)
    }

    pub fn to_record(&self) -> RegionRecord {
        RegionRecord {
            vars: self.facets.vars().to_vec(),
            facets: self.facets.render_rows(),
            vertices: self.vertices.clone(),
        }
    }

    /// Maximum of `objective` over the region (attained at a vertex).
    pub fn max_over_vertices(&self, objective: &[Rational]) -> Option<Rational> {
        self.vertices
            .iter()
            .map(|v| super::system::dot(objective, v))
            .max()
    }
}

/// `outer ∋ point`.
pub fn region_contains(outer: &Region, point: &[Rational]) -> Result<bool, GeometryError> {
    outer.contains(point)
}

/// Mutual containment of vertex sets.
pub fn region_equal(a: &Region, b: &Region) -> Result<bool, GeometryError> {
    a.equals(b)
}

/// Projects the bounded polyhedron `sys` onto the coordinates in `keep`,
/// using exact LPs as a support oracle.
///
/// Starting from a few support points, the hull of the known points is
/// computed; every facet of that hull is then pushed outward by an LP in its
/// normal direction. A facet whose LP optimum equals its right-hand side is
/// a facet of the projection; otherwise the optimizer's projection is a new
/// point. The loop ends when every hull facet is confirmed.
pub fn project_by_oracle(
    sys: &LinearSystem,
    keep: &[usize],
    names: Vec<String>,
) -> Result<Region, GeometryError> {
    assert_eq!(keep.len(), names.len(), "one name per kept coordinate");
    let d = keep.len();
    if find_feasible(sys).is_none() {
        return Region::from_vertices(names, &[]);
    }
    let lift = |c: &[Rational]| -> Vec<Rational> {
        let mut full = vec![Rational::zero(); sys.dim()];
        for (k, &i) in keep.iter().enumerate() {
            full[i] = c[k].clone();
        }
        full
    };
    let support = |c: &[Rational]| -> Result<(Rational, Vec<Rational>), GeometryError> {
        match lp_solve(sys, &lift(c), Sense::Max) {
            LpOutcome::Optimal { value, point } => {
                Ok((value, keep.iter().map(|&i| point[i].clone()).collect()))
            }
            LpOutcome::Unbounded => Err(GeometryError::Unbounded {
                direction: c.iter().map(ToString::to_string).collect(),
            }),
            LpOutcome::Infeasible => unreachable!("feasibility checked above"),
        }
    };

    let mut points: Vec<Vec<Rational>> = Vec::new();
    let mut seeds: Vec<Vec<Rational>> = Vec::new();
    for i in 0..d {
        for s in [1, -1] {
            let mut c = vec![Rational::zero(); d];
            c[i] = Rational::from_integer(s);
            seeds.push(c);
        }
    }
    seeds.push(vec![Rational::one(); d]);
    seeds.push(vec![-Rational::one(); d]);
    for c in &seeds {
        points.push(support(c)?.1);
    }

    let mut confirmed: HashSet<Row> = HashSet::new();
    loop {
        points.sort();
        points.dedup();
        let hull = hull_inequalities(names.clone(), &points);
        let mut grew = false;
        for row in hull.rows() {
            if confirmed.contains(row) {
                continue;
            }
            let (value, p) = support(&row.coeffs)?;
            if value > row.rhs {
                points.push(p);
                grew = true;
            } else {
                confirmed.insert(row.clone());
            }
        }
        if !grew {
            let vertices = vertex_enumerate(&hull)?;
            return Ok(Region {
                facets: hull,
                vertices,
            });
        }
    }
}
