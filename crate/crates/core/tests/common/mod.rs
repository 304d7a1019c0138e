//! Checks shared by the property tests and the acceptance harness. Each
//! returns the list of violations it found (empty on success).

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use icap::geometry::{fm_project, lp_solve, project_by_oracle, vertex_enumerate, LpOutcome, Sense};
use icap::outer_bound::rate_names;
use icap::{
    composite_member, enumerate_problems, flat_region, flat_timeshare_region, mais_region,
    outer_region, verify_capacity, LinearSystem, MsgSet, Problem, Rational, Region,
};

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Region over `R_1..R_n` cut out by `Σ_{j ∈ set} R_j <= rhs` rows and `R >= 0`.
pub fn rate_region(n: usize, rows: &[(&[usize], i64)]) -> Region {
    let mut sys = LinearSystem::new(rate_names(n));
    for (set, rhs) in rows {
        let terms: Vec<(usize, Rational)> = set.iter().map(|&j| (j - 1, q(1))).collect();
        sys.add_le_sparse(&terms, q(*rhs));
    }
    for j in 0..n {
        sys.add_ge_sparse(&[(j, q(1))], q(0));
    }
    Region::from_system(&sys).expect("bounded")
}

/// The facet rows of a region that are not sign constraints.
pub fn upper_facets(region: &Region) -> Vec<String> {
    let mut rows: Vec<String> = region
        .facets()
        .render_rows()
        .into_iter()
        .filter(|r| !r.starts_with('-'))
        .collect();
    rows.sort();
    rows
}

/// A bounded system in `dim` variables: a box `[-b, b]^dim` plus a few
/// random rows with small integer coefficients.
pub fn random_bounded_system(r: &mut ChaCha8Rng, dim: usize) -> LinearSystem {
    let mut sys = LinearSystem::with_indexed_vars("x", dim);
    let bound = q(r.gen_range(1..=3));
    for i in 0..dim {
        let mut e = vec![q(0); dim];
        e[i] = q(1);
        sys.add_le(e.clone(), bound.clone());
        sys.add_ge(e, -bound.clone());
    }
    for _ in 0..r.gen_range(1..=dim + 3) {
        let coeffs: Vec<Rational> = (0..dim).map(|_| q(r.gen_range(-3..=3))).collect();
        sys.add_le(coeffs, q(r.gen_range(-1..=4)));
    }
    sys
}

/// Fourier–Motzkin projection against the LP-oracle projection.
pub fn fm_matches_oracle(count: usize, seed: u64) -> Vec<String> {
    let mut r = rng(seed);
    let mut bad = Vec::new();
    for case in 0..count {
        let dim = r.gen_range(2..=4);
        let sys = random_bounded_system(&mut r, dim);
        let keep_n = r.gen_range(1..dim);
        let mut order: Vec<usize> = (0..dim).collect();
        order.shuffle(&mut r);
        let mut keep: Vec<usize> = order[..keep_n].to_vec();
        keep.sort();
        let drop: Vec<&str> = (0..dim)
            .filter(|i| !keep.contains(i))
            .map(|i| sys.vars()[i].as_str())
            .collect();
        let names: Vec<String> = keep.iter().map(|&i| sys.vars()[i].clone()).collect();
        let fm = Region::from_system(&fm_project(&sys, &drop).unwrap()).unwrap();
        let oracle = project_by_oracle(&sys, &keep, names).unwrap();
        if !fm.equals(&oracle).unwrap() || fm.is_empty() != oracle.is_empty() {
            bad.push(format!("case {case}: projections differ for\n{sys}"));
        }
    }
    bad
}

/// LP optimum against the best vertex.
pub fn lp_matches_vertices(count: usize, seed: u64) -> Vec<String> {
    let mut r = rng(seed);
    let mut bad = Vec::new();
    for case in 0..count {
        let dim = r.gen_range(2..=4);
        let sys = random_bounded_system(&mut r, dim);
        let obj: Vec<Rational> = (0..dim).map(|_| q(r.gen_range(-5..=5))).collect();
        let vertices = vertex_enumerate(&sys).unwrap();
        let best = vertices.iter().map(|v| icap::geometry::system::dot(&obj, v)).max();
        match (lp_solve(&sys, &obj, Sense::Max), best) {
            (LpOutcome::Infeasible, None) => {}
            (LpOutcome::Optimal { value, point }, Some(b)) if value == b && sys.is_satisfied(&point) => {}
            (lp, b) => bad.push(format!("case {case}: lp {lp:?} vs vertices {b:?}")),
        }
    }
    bad
}

/// Eliminating the same variables in two different orders.
pub fn fm_order_independent(count: usize, seed: u64) -> Vec<String> {
    let mut r = rng(seed);
    let mut bad = Vec::new();
    for case in 0..count {
        let dim = r.gen_range(3..=4);
        let sys = random_bounded_system(&mut r, dim);
        let mut drop: Vec<String> = sys.vars()[1..].to_vec();
        drop.shuffle(&mut r);
        let mut sequential = sys.clone();
        for v in &drop {
            sequential = fm_project(&sequential, &[v.as_str()]).unwrap();
        }
        let names: Vec<&str> = drop.iter().map(String::as_str).collect();
        let at_once = fm_project(&sys, &names).unwrap();
        let a = Region::from_system(&sequential).unwrap();
        let b = Region::from_system(&at_once).unwrap();
        if !a.equals(&b).unwrap() {
            bad.push(format!("case {case}: order changes the projection of\n{sys}"));
        }
    }
    bad
}

/// flat ⊆ time sharing ⊆ composite ⊆ outer for every problem with at most
/// `max_n` messages; every certificate must validate.
pub fn nesting(max_n: usize) -> Vec<String> {
    let mut bad = Vec::new();
    for n in 1..=max_n {
        for p in enumerate_problems(n).unwrap() {
            let flat = flat_region(&p).unwrap();
            let ts = flat_timeshare_region(&p).unwrap();
            let outer = outer_region(&p).unwrap();
            if !flat.is_subset_of(&ts).unwrap() {
                bad.push(format!("{p}: flat not inside time sharing"));
            }
            for v in ts.vertices() {
                match composite_member(&p, v).unwrap() {
                    Some(cert) => {
                        if let Err(e) = cert.validate(&p) {
                            bad.push(format!("{p}: certificate at {v:?} invalid: {e}"));
                        }
                        if !outer.contains(&cert.point).unwrap() {
                            bad.push(format!("{p}: certified point {v:?} outside outer bound"));
                        }
                    }
                    None => bad.push(format!("{p}: time-sharing vertex {v:?} not composite-achievable")),
                }
            }
            let rec = verify_capacity(&p).unwrap();
            for cert in &rec.certificates {
                if let Err(e) = cert.validate(&p) {
                    bad.push(format!("{p}: record certificate invalid: {e}"));
                }
            }
        }
    }
    bad
}

/// A uniformly random problem with `n` messages.
pub fn random_problem(r: &mut ChaCha8Rng, n: usize) -> Problem {
    let sets = (1..=n)
        .map(|j| MsgSet::from_indices((1..=n).filter(|&k| k != j && r.gen_bool(0.5))))
        .collect();
    Problem::new(sets).unwrap()
}

/// Relabeling a problem relabels every region and keeps every verdict.
pub fn equivariance(count: usize, seed: u64) -> Vec<String> {
    let mut r = rng(seed);
    let mut bad = Vec::new();
    for case in 0..count {
        let n = r.gen_range(2..=4);
        let p = random_problem(&mut r, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let pp = p.permuted(&perm);
        type Builder = fn(&Problem) -> icap::Result<Region>;
        let builders: [(&str, Builder); 4] = [
            ("outer", outer_region),
            ("mais", mais_region),
            ("flat", flat_region),
            ("timeshare", flat_timeshare_region),
        ];
        for (name, build) in builders {
            let moved = build(&p).unwrap().permuted(&perm).unwrap();
            if !moved.equals(&build(&pp).unwrap()).unwrap() {
                bad.push(format!("case {case}: {name} region of {p} not equivariant under {perm:?}"));
            }
        }
        let a = verify_capacity(&p).unwrap();
        let b = verify_capacity(&pp).unwrap();
        if a.key != b.key || a.verdict != b.verdict || a.symmetric != b.symmetric {
            bad.push(format!("case {case}: verification of {p} changes under {perm:?}"));
        }
    }
    bad
}

/// On the grid `{0, 1/step, .., 1}^n`, composite membership agrees with
/// membership in the outer bound (every problem here is matched), so the
/// inner bound is exactly the hull of its achievable outer vertices.
pub fn grid_convexity(max_n: usize, step: i64) -> Vec<String> {
    let mut bad = Vec::new();
    for n in 1..=max_n {
        for p in enumerate_problems(n).unwrap() {
            let outer = outer_region(&p).unwrap();
            let mut idx = vec![0i64; n];
            loop {
                let point: Vec<Rational> = idx.iter().map(|&i| Rational::new(i, step)).collect();
                let inner = composite_member(&p, &point).unwrap().is_some();
                if inner != outer.contains(&point).unwrap() {
                    bad.push(format!("{p}: grid point {point:?} inner={inner}"));
                }
                let mut k = 0;
                while k < n && idx[k] == step {
                    idx[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
                idx[k] += 1;
            }
        }
    }
    bad
}
