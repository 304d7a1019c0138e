//! Exact rational simplex over dictionaries.
//!
//! The solver works on `a·x <= b` rows with free variables. Rows of the form
//! `-x_i <= 0` are absorbed as sign constraints on `x_i`; every other free
//! variable is split into a positive and a negative part. Feasibility uses the
//! single-auxiliary-variable first phase. Entering variables follow Dantzig's
//! largest-coefficient rule until a run of degenerate pivots is seen, after
//! which the solver switches permanently to the lowest-index rule, which
//! cannot cycle. Ties are always broken by the lowest variable label, so
//! witnesses are reproducible.

use super::rational::Rational;
use super::system::{LinearSystem, Row};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

const DEGENERATE_STREAK: usize = 50;

/// Optimizes `objective · x` over `sys`.
pub fn lp_solve(sys: &LinearSystem, objective: &[Rational], sense: Sense) -> LpOutcome {
    lp_solve_rows(sys.dim(), sys.rows(), objective, sense)
}

/// Returns a feasible point of `sys`, if one exists.
pub fn find_feasible(sys: &LinearSystem) -> Option<Vec<Rational>> {
    find_feasible_rows(sys.dim(), sys.rows())
}

pub fn find_feasible_rows(dim: usize, rows: &[Row]) -> Option<Vec<Rational>> {
    let zero = vec![Rational::zero(); dim];
    match lp_solve_rows(dim, rows, &zero, Sense::Max) {
        LpOutcome::Optimal { point, .. } => Some(point),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

/// Same as [`lp_solve`] on a bare row slice.
pub fn lp_solve_rows(dim: usize, rows: &[Row], objective: &[Rational], sense: Sense) -> LpOutcome {
    assert_eq!(objective.len(), dim, "objective dimension mismatch");
    let mut nonneg = vec![false; dim];
    let mut kept: Vec<&Row> = Vec::with_capacity(rows.len());
    for row in rows {
        assert_eq!(row.coeffs.len(), dim, "row dimension mismatch");
        let mut nz = row.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero());
        match (nz.next(), nz.next()) {
            (Some((i, c)), None) if c.is_negative() && row.rhs.is_zero() => nonneg[i] = true,
            (None, _) => {
                if row.rhs.is_negative() {
                    return LpOutcome::Infeasible;
                }
            }
            _ => kept.push(row),
        }
    }

    // Structural columns: (original variable, sign).
    let mut columns: Vec<(usize, bool)> = Vec::with_capacity(2 * dim);
    for (i, &nn) in nonneg.iter().enumerate() {
        columns.push((i, true));
        if !nn {
            columns.push((i, false));
        }
    }
    let cost: Vec<Rational> = columns
        .iter()
        .map(|&(i, pos)| {
            let c = match sense {
                Sense::Max => objective[i].clone(),
                Sense::Min => -&objective[i],
            };
            if pos {
                c
            } else {
                -c
            }
        })
        .collect();

    let mut dict = Dictionary::new(&kept, &columns);
    if !dict.phase_one() {
        return LpOutcome::Infeasible;
    }
    if !dict.phase_two(&cost) {
        return LpOutcome::Unbounded;
    }

    let mut col_values = vec![Rational::zero(); columns.len()];
    for (i, &b) in dict.basic.iter().enumerate() {
        if b < columns.len() {
            col_values[b] = dict.beta[i].clone();
        }
    }
    let mut point = vec![Rational::zero(); dim];
    for (c, &(i, pos)) in columns.iter().enumerate() {
        if pos {
            point[i] += &col_values[c];
        } else {
            point[i] -= &col_values[c];
        }
    }
    let value = super::system::dot(objective, &point);
    LpOutcome::Optimal { value, point }
}

/// `x_B[i] = beta[i] - Σ_j t[i][j] · x_N[j]`, objective
/// `z = z0 - Σ_j obj[j] · x_N[j]`.
struct Dictionary {
    t: Vec<Vec<Rational>>,
    beta: Vec<Rational>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    obj: Vec<Rational>,
    z0: Rational,
    /// Label of the auxiliary variable, if present.
    aux: Option<usize>,
    bland: bool,
}

impl Dictionary {
    fn new(rows: &[&Row], columns: &[(usize, bool)]) -> Self {
        let k = columns.len();
        let m = rows.len();
        let mut t = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        for row in rows {
            let line: Vec<Rational> = columns
                .iter()
                .map(|&(i, pos)| if pos { row.coeffs[i].clone() } else { -&row.coeffs[i] })
                .collect();
            t.push(line);
            beta.push(row.rhs.clone());
        }
        Dictionary {
            t,
            beta,
            basic: (k..k + m).collect(),
            nonbasic: (0..k).collect(),
            obj: vec![Rational::zero(); k],
            z0: Rational::zero(),
            aux: None,
            bland: false,
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let piv = self.t[r][j].clone();
        let inv = piv.recip();
        let ncols = self.nonbasic.len();
        // New pivot row.
        for l in 0..ncols {
            if l == j {
                self.t[r][l] = inv.clone();
            } else if !self.t[r][l].is_zero() {
                self.t[r][l] = &self.t[r][l] * &inv;
            }
        }
        self.beta[r] = &self.beta[r] * &inv;
        let nz: Vec<usize> = (0..ncols)
            .filter(|&l| l != j && !self.t[r][l].is_zero())
            .collect();
        let (pivot_row, pivot_beta) = {
            let row = std::mem::take(&mut self.t[r]);
            (row, self.beta[r].clone())
        };
        for i in 0..self.t.len() {
            if i == r {
                continue;
            }
            let f = self.t[i][j].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.t[i];
            for &l in &nz {
                row[l] = row[l].sub_mul(&f, &pivot_row[l]);
            }
            row[j] = -(&f * &pivot_row[j]);
            if !pivot_beta.is_zero() {
                self.beta[i] = self.beta[i].sub_mul(&f, &pivot_beta);
            }
        }
        let f = self.obj[j].clone();
        if !f.is_zero() {
            for &l in &nz {
                self.obj[l] = self.obj[l].sub_mul(&f, &pivot_row[l]);
            }
            self.obj[j] = -(&f * &pivot_row[j]);
            self.z0 = self.z0.sub_mul(&f, &pivot_beta);
        }
        self.t[r] = pivot_row;
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[j]);
    }

    fn choose_entering(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (j, c) in self.obj.iter().enumerate() {
            if !c.is_negative() {
                continue;
            }
            best = match best {
                None => Some(j),
                Some(b) => {
                    let better = if self.bland {
                        self.nonbasic[j] < self.nonbasic[b]
                    } else {
                        match c.cmp(&self.obj[b]) {
                            std::cmp::Ordering::Less => true,
                            std::cmp::Ordering::Equal => self.nonbasic[j] < self.nonbasic[b],
                            std::cmp::Ordering::Greater => false,
                        }
                    };
                    if better {
                        Some(j)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best
    }

    fn choose_leaving(&self, j: usize) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for i in 0..self.t.len() {
            let a = &self.t[i][j];
            if !a.is_positive() {
                continue;
            }
            let ratio = &self.beta[i] / a;
            best = match best {
                None => Some((i, ratio)),
                Some((b, br)) => match ratio.cmp(&br) {
                    std::cmp::Ordering::Less => Some((i, ratio)),
                    std::cmp::Ordering::Equal if self.basic[i] < self.basic[b] => Some((i, ratio)),
                    _ => Some((b, br)),
                },
            };
        }
        best.map(|(i, _)| i)
    }

    /// Runs simplex iterations; `false` means unbounded.
    fn optimize(&mut self) -> bool {
        let mut degenerate = 0usize;
        while let Some(j) = self.choose_entering() {
            let Some(r) = self.choose_leaving(j) else {
                return false;
            };
            if self.beta[r].is_zero() {
                degenerate += 1;
                if degenerate >= DEGENERATE_STREAK {
                    self.bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(r, j);
        }
        true
    }

    /// Finds a feasible dictionary; `false` means infeasible.
    fn phase_one(&mut self) -> bool {
        let Some(worst) = (0..self.beta.len())
            .filter(|&i| self.beta[i].is_negative())
            .min_by(|&a, &b| self.beta[a].cmp(&self.beta[b]).then(a.cmp(&b)))
        else {
            return true;
        };
        let label = self.nonbasic.len() + self.basic.len();
        self.aux = Some(label);
        for row in &mut self.t {
            row.push(-Rational::one());
        }
        self.nonbasic.push(label);
        self.obj = vec![Rational::zero(); self.nonbasic.len()];
        *self.obj.last_mut().unwrap() = Rational::one();
        self.z0 = Rational::zero();
        let j = self.nonbasic.len() - 1;
        self.pivot(worst, j);
        let bounded = self.optimize();
        debug_assert!(bounded, "phase one is bounded by construction");
        if self.z0.is_negative() {
            return false;
        }
        // Drive the auxiliary variable out of the basis if it is still there.
        if let Some(r) = self.basic.iter().position(|&b| b == label) {
            let col = (0..self.nonbasic.len())
                .filter(|&l| !self.t[r][l].is_zero())
                .min_by_key(|&l| self.nonbasic[l]);
            match col {
                Some(l) => self.pivot(r, l),
                None => {
                    self.t.remove(r);
                    self.beta.remove(r);
                    self.basic.remove(r);
                }
            }
        }
        if let Some(j) = self.nonbasic.iter().position(|&n| n == label) {
            for row in &mut self.t {
                row.remove(j);
            }
            self.nonbasic.remove(j);
        }
        self.aux = None;
        self.bland = false;
        true
    }

    /// Maximizes `cost · x_struct`; `false` means unbounded.
    fn phase_two(&mut self, cost: &[Rational]) -> bool {
        let k = cost.len();
        self.obj = self
            .nonbasic
            .iter()
            .map(|&n| if n < k { -&cost[n] } else { Rational::zero() })
            .collect();
        self.z0 = Rational::zero();
        for (i, &b) in self.basic.iter().enumerate() {
            if b >= k || cost[b].is_zero() {
                continue;
            }
            let c = &cost[b];
            self.z0 += c * &self.beta[i];
            for (l, a) in self.t[i].iter().enumerate() {
                if !a.is_zero() {
                    self.obj[l] += c * a;
                }
            }
        }
        debug_assert!(self.aux.is_none());
        self.optimize()
    }
}
