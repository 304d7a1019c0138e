//! Double description: converts `{y : h_k · y >= 0}` into a lineality basis
//! and a list of extreme rays by inserting one halfspace at a time.
//!
//! Adjacency of two rays is decided combinatorially: they are adjacent iff no
//! third ray is tight on every constraint both are tight on.

use fixedbitset::FixedBitSet;

use super::rational::{primitive_integer, Rational};
use super::system::{dot, LinearSystem, Row};
use super::GeometryError;

#[derive(Clone, Debug)]
struct Ray {
    v: Vec<Rational>,
    zero: FixedBitSet,
}

/// Generators of a polyhedral cone.
#[derive(Clone, Debug, Default)]
pub struct ConeGenerators {
    pub lineality: Vec<Vec<Rational>>,
    pub rays: Vec<Vec<Rational>>,
}

fn scale_add(a: &[Rational], fa: &Rational, b: &[Rational], fb: &Rational) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| fa * x + fb * y).collect()
}

/// Extreme rays and lineality of `{y in Q^dim : h · y >= 0 for h in halfspaces}`.
pub fn cone_generators(dim: usize, halfspaces: &[Vec<Rational>]) -> ConeGenerators {
    let m = halfspaces.len();
    let mut lineality: Vec<Vec<Rational>> = (0..dim)
        .map(|i| {
            let mut e = vec![Rational::zero(); dim];
            e[i] = Rational::one();
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, h) in halfspaces.iter().enumerate() {
        debug_assert_eq!(h.len(), dim);
        if let Some(idx) = lineality.iter().position(|l| !dot(h, l).is_zero()) {
            let mut l0 = lineality.swap_remove(idx);
            let mut hl0 = dot(h, &l0);
            if hl0.is_negative() {
                l0 = l0.iter().map(|x| -x).collect();
                hl0 = -hl0;
            }
            for l in lineality.iter_mut() {
                let f = dot(h, l);
                if !f.is_zero() {
                    *l = primitive_integer(&scale_add(l, &Rational::one(), &l0, &(-(&f / &hl0))));
                }
            }
            for r in rays.iter_mut() {
                let f = dot(h, &r.v);
                if !f.is_zero() {
                    r.v = primitive_integer(&scale_add(&r.v, &Rational::one(), &l0, &(-(&f / &hl0))));
                }
                r.zero.insert(k);
            }
            let mut zero = FixedBitSet::with_capacity(m);
            zero.insert_range(..k);
            rays.push(Ray {
                v: primitive_integer(&l0),
                zero,
            });
            continue;
        }

        let values: Vec<Rational> = rays.iter().map(|r| dot(h, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.zero.insert(k);
                }
            }
            continue;
        }

        let min_common = dim.saturating_sub(lineality.len()).saturating_sub(2);
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let mut common = rays[p].zero.clone();
                common.intersect_with(&rays[n].zero);
                if common.count_ones(..) < min_common {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(i, r)| {
                    i == p || i == n || !common.is_subset(&r.zero)
                });
                if !adjacent {
                    continue;
                }
                // (h·p) n - (h·n) p lies on h·y = 0.
                let v = scale_add(&rays[n].v, &values[p], &rays[p].v, &(-&values[n]));
                common.insert(k);
                fresh.push(Ray {
                    v: primitive_integer(&v),
                    zero: common,
                });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (mut r, v) in rays.into_iter().zip(values) {
            if v.is_negative() {
                continue;
            }
            if v.is_zero() {
                r.zero.insert(k);
            }
            next.push(r);
        }
        next.extend(fresh);
        rays = next;
    }

    ConeGenerators {
        lineality,
        rays: rays.into_iter().map(|r| r.v).collect(),
    }
}

/// All extreme points of the polyhedron `sys`, deduplicated and sorted.
///
/// An empty polyhedron yields an empty list. A nonempty polyhedron that is
/// not bounded is reported with one of its unbounded directions.
pub fn vertex_enumerate(sys: &LinearSystem) -> Result<Vec<Vec<Rational>>, GeometryError> {
    let d = sys.dim();
    if sys.is_trivially_infeasible() {
        return Ok(Vec::new());
    }
    let mut halfspaces: Vec<Vec<Rational>> = Vec::with_capacity(sys.len() + 1);
    let mut x0 = vec![Rational::zero(); d + 1];
    x0[0] = Rational::one();
    halfspaces.push(x0);
    for r in sys.rows() {
        let mut h = Vec::with_capacity(d + 1);
        h.push(r.rhs.clone());
        h.extend(r.coeffs.iter().map(|c| -c));
        halfspaces.push(h);
    }
    let gens = cone_generators(d + 1, &halfspaces);

    let mut vertices: Vec<Vec<Rational>> = Vec::new();
    let mut directions: Vec<Vec<Rational>> = gens.lineality.iter().map(|l| l[1..].to_vec()).collect();
    for ray in &gens.rays {
        if ray[0].is_positive() {
            vertices.push(ray[1..].iter().map(|x| x / &ray[0]).collect());
        } else {
            directions.push(ray[1..].to_vec());
        }
    }
    if vertices.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(dir) = directions.into_iter().next() {
        return Err(GeometryError::Unbounded {
            direction: dir.iter().map(ToString::to_string).collect(),
        });
    }
    vertices.sort();
    vertices.dedup();
    Ok(vertices)
}

/// Irredundant inequality description of the convex hull of `points`.
///
/// Each facet is one row; if the hull is not full-dimensional its affine
/// hull appears as pairs of opposite rows. No points gives `0 <= -1`.
pub fn hull_inequalities(names: Vec<String>, points: &[Vec<Rational>]) -> LinearSystem {
    let d = names.len();
    let mut out = LinearSystem::new(names);
    if points.is_empty() {
        out.push(Row::infeasible(d));
        return out;
    }
    let mut pts: Vec<Vec<Rational>> = points.to_vec();
    pts.sort();
    pts.dedup();
    // y = (b, c) encodes b + c·x >= 0, i.e. (-c)·x <= b.
    let halfspaces: Vec<Vec<Rational>> = pts
        .iter()
        .map(|p| {
            assert_eq!(p.len(), d, "point dimension mismatch");
            let mut h = Vec::with_capacity(d + 1);
            h.push(Rational::one());
            h.extend(p.iter().cloned());
            h
        })
        .collect();
    let gens = cone_generators(d + 1, &halfspaces);
    let as_row = |y: &[Rational]| Row::new(y[1..].iter().map(|c| -c).collect(), y[0].clone());
    for y in &gens.lineality {
        out.push(as_row(y));
        let neg: Vec<Rational> = y.iter().map(|x| -x).collect();
        out.push(as_row(&neg));
    }
    for y in &gens.rays {
        out.push(as_row(y));
    }
    out.sort_rows();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn pt(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn unit_square_vertices() {
        let mut s = LinearSystem::with_indexed_vars("x", 2);
        s.add_unit_box();
        let v = vertex_enumerate(&s).unwrap();
        assert_eq!(v, vec![pt(&[0, 0]), pt(&[0, 1]), pt(&[1, 0]), pt(&[1, 1])]);
    }

    #[test]
    fn unbounded_is_an_error() {
        let mut s = LinearSystem::with_indexed_vars("x", 2);
        s.add_ge(vec![q(1), q(0)], q(0));
        s.add_ge(vec![q(0), q(1)], q(0));
        match vertex_enumerate(&s) {
            Err(GeometryError::Unbounded { direction }) => assert_eq!(direction.len(), 2),
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn empty_polyhedron() {
        let mut s = LinearSystem::with_indexed_vars("x", 1);
        s.add_le(vec![q(1)], q(-1));
        s.add_ge(vec![q(1)], q(1));
        assert!(vertex_enumerate(&s).unwrap().is_empty());
    }

    #[test]
    fn hull_of_square_with_interior_points() {
        let pts = vec![pt(&[0, 0]), pt(&[2, 0]), pt(&[0, 2]), pt(&[2, 2]), pt(&[1, 1]), pt(&[1, 0])];
        let h = hull_inequalities(vec!["x".into(), "y".into()], &pts);
        assert_eq!(h.len(), 4);
        assert_eq!(h.render_rows(), vec!["x <= 2", "y <= 2", "-y <= 0", "-x <= 0"]);
    }

    #[test]
    fn hull_of_segment_has_equality() {
        let pts = vec![pt(&[0, 0]), pt(&[1, 1])];
        let h = hull_inequalities(vec!["x".into(), "y".into()], &pts);
        // affine hull x = y plus two endpoints
        assert_eq!(h.len(), 4);
        assert!(h.is_satisfied(&pt(&[1, 1])));
        assert!(!h.is_satisfied(&pt(&[1, 0])));
        assert!(!h.is_satisfied(&pt(&[2, 2])));
    }

    #[test]
    fn hull_of_single_point() {
        let h = hull_inequalities(vec!["x".into()], &[pt(&[3])]);
        assert!(h.is_satisfied(&pt(&[3])));
        assert!(!h.is_satisfied(&pt(&[2])));
    }
}
