//! Outer bounds: the polymatroidal bound over `(R, T)` and its acyclic-subset
//! relaxation.

use crate::error::{Error, Result};
use crate::geometry::{project_by_oracle, LinearSystem, Rational, Region};
use crate::problem::{MsgSet, Problem};

/// Largest message count accepted by the lifted builders by default.
pub const DEFAULT_OUTER_LIMIT: usize = 7;

/// `R_1 .. R_n`.
pub fn rate_names(n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("R_{j}")).collect()
}

/// The polymatroid system over rates `R_1..R_n` and set values `T_J` for
/// every nonempty `J`, with `T_∅` substituted by zero.
///
/// Variable layout: `R_j` at index `j - 1`, `T_J` at index `n + bits(J) - 1`.
#[derive(Clone, Debug)]
pub struct LiftedOuterSystem {
    n: usize,
    system: LinearSystem,
}

impl LiftedOuterSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn system(&self) -> &LinearSystem {
        &self.system
    }

    pub fn into_system(self) -> LinearSystem {
        self.system
    }

    pub fn rate_var(&self, j: usize) -> usize {
        j - 1
    }

    /// Index of `T_J`; `None` for the empty set.
    pub fn set_var(&self, set: MsgSet) -> Option<usize> {
        set_var(self.n, set)
    }

    pub fn rate_vars(&self) -> Vec<usize> {
        (0..self.n).collect()
    }
}

fn set_var(n: usize, set: MsgSet) -> Option<usize> {
    (!set.is_empty()).then(|| n + set.bits() as usize - 1)
}

fn one() -> Rational {
    Rational::one()
}

fn lifted_skeleton(p: &Problem, limit: usize) -> Result<(LinearSystem, usize)> {
    let n = p.n();
    if n > limit {
        return Err(Error::TooLarge {
            what: "outer bound",
            n,
            limit,
        });
    }
    let mut vars = rate_names(n);
    for bits in 1..(1u32 << n) {
        vars.push(format!("T_{}", MsgSet(bits)));
    }
    let mut sys = LinearSystem::new(vars);
    let full = p.all();
    // R_j <= T_{{j} ∪ B_j} - T_{B_j}
    for j in 1..=n {
        let b = p.interfering(j);
        let mut terms = vec![(j - 1, one())];
        if let Some(v) = set_var(n, b.with(j)) {
            terms.push((v, -one()));
        }
        if let Some(v) = set_var(n, b) {
            terms.push((v, one()));
        }
        sys.add_le_sparse(&terms, Rational::zero());
    }
    sys.add_eq_sparse(&[(set_var(n, full).expect("n >= 1"), one())], one());
    for j in 0..n {
        sys.add_ge_sparse(&[(j, one())], Rational::zero());
    }
    // Nonnegativity of T is implied by the rows below; stating it lets the
    // simplex treat every T as a sign-constrained column.
    for bits in 1..(1u32 << n) {
        sys.add_ge_sparse(&[(set_var(n, MsgSet(bits)).unwrap(), one())], Rational::zero());
    }
    Ok((sys, n))
}

/// `T_{J ∪ {i}} + T_{J ∪ {k}} >= T_J + T_{J ∪ {i,k}}` for `i < k`, `i, k ∉ J`.
fn add_elemental_submodularity(sys: &mut LinearSystem, n: usize) {
    let full = MsgSet::full(n);
    for i in 1..=n {
        for k in i + 1..=n {
            let rest = full.without(i).without(k);
            for j in rest.subsets() {
                let mut terms = vec![
                    (set_var(n, j.with(i)).unwrap(), one()),
                    (set_var(n, j.with(k)).unwrap(), one()),
                    (set_var(n, j.with(i).with(k)).unwrap(), -one()),
                ];
                if let Some(v) = set_var(n, j) {
                    terms.push((v, -one()));
                }
                sys.add_ge_sparse(&terms, Rational::zero());
            }
        }
    }
}

/// Builds the lifted system with the default size limit.
pub fn build_lifted_outer(p: &Problem) -> Result<LiftedOuterSystem> {
    build_lifted_outer_with_limit(p, DEFAULT_OUTER_LIMIT)
}

/// Elemental form: submodularity on one-element extensions plus
/// `T_[n] >= T_{[n] \ {i}}`. Together with `T_∅ = 0` these imply
/// monotonicity and submodularity for every pair of sets.
pub fn build_lifted_outer_with_limit(p: &Problem, limit: usize) -> Result<LiftedOuterSystem> {
    let (mut sys, n) = lifted_skeleton(p, limit)?;
    let full = p.all();
    for i in 1..=n {
        let mut terms = vec![(set_var(n, full).unwrap(), one())];
        if let Some(v) = set_var(n, full.without(i)) {
            terms.push((v, -one()));
        }
        sys.add_ge_sparse(&terms, Rational::zero());
    }
    add_elemental_submodularity(&mut sys, n);
    Ok(LiftedOuterSystem { n, system: sys })
}

/// Every instance of monotonicity (`J ⊆ K`) and submodularity (all pairs).
/// Grows as `4^n`; meant for cross-checking the elemental form.
pub fn build_lifted_outer_full(p: &Problem) -> Result<LiftedOuterSystem> {
    let (mut sys, n) = lifted_skeleton(p, 4)?;
    let full = p.all();
    for k in full.subsets() {
        for j in k.subsets() {
            if j == k {
                continue;
            }
            let mut terms = vec![(set_var(n, k).unwrap(), one())];
            if let Some(v) = set_var(n, j) {
                terms.push((v, -one()));
            }
            sys.add_ge_sparse(&terms, Rational::zero());
        }
    }
    for a in full.subsets() {
        for b in full.subsets() {
            let mut terms = Vec::new();
            for (s, c) in [(a, one()), (b, one()), (a.intersect(b), -one()), (a.union(b), -one())] {
                if let Some(v) = set_var(n, s) {
                    terms.push((v, c));
                }
            }
            sys.add_ge_sparse(&terms, Rational::zero());
        }
    }
    Ok(LiftedOuterSystem { n, system: sys })
}

/// Rate-space projection of the lifted system.
pub fn outer_region(p: &Problem) -> Result<Region> {
    let lifted = build_lifted_outer(p)?;
    Ok(project_by_oracle(
        lifted.system(),
        &lifted.rate_vars(),
        rate_names(p.n()),
    )?)
}

/// Projection computed by enumerating every vertex of the lifted polytope
/// and taking the hull of their rate coordinates. Exponentially slower than
/// [`outer_region`]; kept as an independent route for small `n`.
pub fn outer_region_by_lifted_vertices(lifted: &LiftedOuterSystem) -> Result<Region> {
    let n = lifted.n();
    let vertices = crate::geometry::vertex_enumerate(lifted.system())?;
    let rates: Vec<Vec<Rational>> = vertices.into_iter().map(|v| v[..n].to_vec()).collect();
    Ok(Region::from_vertices(rate_names(n), &rates)?)
}

/// Inclusion-maximal subsets inducing an acyclic subgraph, in increasing
/// bit order.
pub fn maximal_acyclic_sets(p: &Problem) -> Vec<MsgSet> {
    let full = p.all();
    let acyclic: Vec<bool> = (0..=full.bits()).map(|b| p.is_acyclic(MsgSet(b))).collect();
    full.nonempty_subsets()
        .filter(|s| acyclic[s.bits() as usize])
        .filter(|s| {
            full.minus(*s)
                .iter()
                .all(|k| !acyclic[s.with(k).bits() as usize])
        })
        .collect()
}

/// The acyclic-subset bound: `Σ_{j∈J} R_j <= 1` for every maximal acyclic
/// `J`, intersected with the unit box.
pub fn mais_region(p: &Problem) -> Result<Region> {
    let n = p.n();
    let mut sys = LinearSystem::new(rate_names(n));
    for s in maximal_acyclic_sets(p) {
        let terms: Vec<(usize, Rational)> = s.iter().map(|j| (j - 1, one())).collect();
        sys.add_le_sparse(&terms, one());
    }
    sys.add_unit_box();
    Ok(Region::from_system(&sys)?)
}
