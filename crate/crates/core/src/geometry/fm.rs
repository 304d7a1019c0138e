//! Fourier–Motzkin projection.
//!
//! Each step pairs every row with a positive coefficient on the eliminated
//! variable with every row with a negative one. Combinations are normalized
//! and deduplicated, and the step's output is made irredundant with exact
//! LPs before the next variable is chosen.
//!
//! Chernikov's history rule (drop a row built from more than `k + 1`
//! original rows after `k` eliminations) is deliberately not used: it is
//! only sound on the unpruned elimination sequence, and once redundant rows
//! have been removed by LP it can discard genuine facets.

use std::collections::HashSet;

use super::lp::{find_feasible, lp_solve_rows, LpOutcome, Sense};
use super::rational::Rational;
use super::system::{LinearSystem, Normalized, Row};
use super::GeometryError;

/// Projects out a single variable.
pub fn fm_eliminate(sys: &LinearSystem, var: &str) -> Result<LinearSystem, GeometryError> {
    fm_project(sys, &[var])
}

/// Projects out every variable in `vars`, returning a system over the
/// remaining variables (in their original order).
///
/// Elimination order is chosen greedily: the next variable is the one whose
/// elimination creates the fewest new rows.
pub fn fm_project(sys: &LinearSystem, vars: &[&str]) -> Result<LinearSystem, GeometryError> {
    let mut names: Vec<String> = sys.vars().to_vec();
    let mut pending: Vec<usize> = Vec::with_capacity(vars.len());
    for v in vars {
        let i = sys
            .var_index(v)
            .ok_or_else(|| GeometryError::UnknownVariable(v.to_string()))?;
        if !pending.contains(&i) {
            pending.push(i);
        }
    }
    let final_names: Vec<String> = names
        .iter()
        .enumerate()
        .filter(|(i, _)| !pending.contains(i))
        .map(|(_, n)| n.clone())
        .collect();
    let mut rows: Vec<Row> = sys.rows().to_vec();

    while !pending.is_empty() {
        if rows.iter().any(Row::is_infeasible_marker) {
            break;
        }
        // Pick the cheapest column among the pending ones.
        let (slot, col) = pending
            .iter()
            .map(|&col| {
                let pos = rows.iter().filter(|r| r.coeffs[col].is_positive()).count();
                let neg = rows.iter().filter(|r| r.coeffs[col].is_negative()).count();
                (pos * neg) as isize - (pos + neg) as isize
            })
            .enumerate()
            .min_by_key(|&(slot, cost)| (cost, slot))
            .map(|(slot, _)| (slot, pending[slot]))
            .expect("pending is non-empty");
        pending.remove(slot);
        rows = eliminate_column(rows, col);
        for p in &mut pending {
            if *p > col {
                *p -= 1;
            }
        }
        names.remove(col);
        rows = prune_redundant(rows, names.len());
    }

    let mut out = LinearSystem::new(final_names);
    if rows.iter().any(Row::is_infeasible_marker) {
        out.push(Row::infeasible(out.dim()));
        return Ok(out);
    }
    debug_assert_eq!(names, out.vars());
    out.extend(rows);
    out.sort_rows();
    Ok(out)
}

fn eliminate_column(rows: Vec<Row>, col: usize) -> Vec<Row> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out: Vec<Row> = Vec::new();
    for r in rows {
        let c = &r.coeffs[col];
        if c.is_positive() {
            pos.push(r);
        } else if c.is_negative() {
            neg.push(r);
        } else {
            out.push(r);
        }
    }
    for p in &pos {
        for n in &neg {
            let a = p.coeffs[col].clone();
            let b = -&n.coeffs[col];
            let coeffs: Vec<Rational> = p
                .coeffs
                .iter()
                .zip(&n.coeffs)
                .map(|(x, y)| &b * x + &a * y)
                .collect();
            let rhs = &b * &p.rhs + &a * &n.rhs;
            out.push(Row::new(coeffs, rhs));
        }
    }
    // Drop the eliminated column, normalize and dedup.
    let mut seen: HashSet<Row> = HashSet::new();
    let mut result: Vec<Row> = Vec::new();
    for mut r in out {
        r.coeffs.remove(col);
        let dim = r.coeffs.len();
        match r.normalize() {
            Normalized::Trivial => {}
            Normalized::Infeasible => return vec![Row::infeasible(dim)],
            Normalized::Row(r) => {
                if seen.insert(r.clone()) {
                    result.push(r);
                }
            }
        }
    }
    result
}

fn prune_redundant(rows: Vec<Row>, dim: usize) -> Vec<Row> {
    if rows.iter().any(Row::is_infeasible_marker) {
        return rows;
    }
    match irredundant_mask(dim, &rows) {
        None => vec![Row::infeasible(dim)],
        Some(mask) => rows
            .into_iter()
            .zip(mask)
            .filter_map(|(r, k)| k.then_some(r))
            .collect(),
    }
}

/// For each row, whether it survives sequential LP redundancy removal.
/// `None` when the rows are infeasible.
pub(crate) fn irredundant_mask(dim: usize, rows: &[Row]) -> Option<Vec<bool>> {
    super::lp::find_feasible_rows(dim, rows)?;
    let mut keep = vec![true; rows.len()];
    for i in 0..rows.len() {
        let others: Vec<Row> = rows
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i && keep[k])
            .map(|(_, r)| r.clone())
            .collect();
        match lp_solve_rows(dim, &others, &rows[i].coeffs, Sense::Max) {
            LpOutcome::Optimal { value, .. } if value <= rows[i].rhs => keep[i] = false,
            LpOutcome::Infeasible => unreachable!("subset of a feasible system"),
            _ => {}
        }
    }
    Some(keep)
}

/// Removes every row implied by the remaining ones. An infeasible system
/// collapses to the single `0 <= -1` marker.
pub fn remove_redundant(sys: &LinearSystem) -> LinearSystem {
    let mut out = LinearSystem::new(sys.vars().to_vec());
    if find_feasible(sys).is_none() {
        out.push(Row::infeasible(sys.dim()));
        return out;
    }
    let mask = irredundant_mask(sys.dim(), sys.rows()).expect("feasible");
    for (r, k) in sys.rows().iter().zip(mask) {
        if k {
            out.push(r.clone());
        }
    }
    out
}
