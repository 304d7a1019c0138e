use std::collections::HashSet;
use std::fmt;

use super::rational::{primitive_integer, Rational};

/// One closed inequality `coeffs · x <= rhs`, stored with coprime integer
/// entries so that syntactic equality coincides with geometric equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

/// Outcome of normalizing a row.
pub(crate) enum Normalized {
    Row(Row),
    /// `0 <= b` with `b >= 0`.
    Trivial,
    /// `0 <= b` with `b < 0`.
    Infeasible,
}

impl Row {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Row { coeffs, rhs }
    }

    pub(crate) fn normalize(self) -> Normalized {
        if self.coeffs.iter().all(Rational::is_zero) {
            return if self.rhs.is_negative() {
                Normalized::Infeasible
            } else {
                Normalized::Trivial
            };
        }
        let mut all = self.coeffs;
        all.push(self.rhs);
        let mut prim = primitive_integer(&all);
        let rhs = prim.pop().expect("non-empty");
        Normalized::Row(Row { coeffs: prim, rhs })
    }

    pub fn dot(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x)
    }

    /// Slack `rhs - coeffs·x`; nonnegative iff `x` satisfies the row.
    pub fn slack(&self, x: &[Rational]) -> Rational {
        &self.rhs - self.dot(x)
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        !self.slack(x).is_negative()
    }

    /// The canonical `0 <= -1` row used to represent an empty system.
    pub fn infeasible(dim: usize) -> Self {
        Row {
            coeffs: vec![Rational::zero(); dim],
            rhs: -Rational::one(),
        }
    }

    pub fn is_infeasible_marker(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero) && self.rhs.is_negative()
    }

    /// Renders the row with the given variable names, e.g. `R_1 + R_3 <= 1`.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (c, name) in self.coeffs.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            if mag != Rational::one() {
                out.push_str(&format!("{mag} "));
            }
            out.push_str(name);
        }
        if out.is_empty() {
            out.push('0');
        }
        format!("{out} <= {}", self.rhs)
    }
}

pub fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (c, v) in a.iter().zip(x) {
        if !c.is_zero() && !v.is_zero() {
            acc += c * v;
        }
    }
    acc
}

/// A finite set of closed linear inequalities over named variables.
///
/// Rows are normalized on insertion and duplicates are dropped, so no two
/// stored rows are syntactically equal. Equalities are stored as a pair of
/// opposite inequalities. An infeasible trivial row (`0 <= -1`) is kept as
/// the single marker row of an empty system.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    vars: Vec<String>,
    rows: Vec<Row>,
    seen: HashSet<Row>,
}

impl PartialEq for LinearSystem {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.seen == other.seen
    }
}

impl LinearSystem {
    pub fn new(vars: Vec<String>) -> Self {
        LinearSystem {
            vars,
            rows: Vec::new(),
            seen: HashSet::new(),
        }
    }

    /// Variables named `prefix_1 .. prefix_n`.
    pub fn with_indexed_vars(prefix: &str, n: usize) -> Self {
        Self::new((1..=n).map(|i| format!("{prefix}_{i}")).collect())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Whether the system carries the explicit infeasibility marker.
    pub fn is_trivially_infeasible(&self) -> bool {
        self.rows.iter().any(Row::is_infeasible_marker)
    }

    /// Inserts `coeffs · x <= rhs`. Returns `false` when the row was a
    /// duplicate or trivially true.
    pub fn push(&mut self, row: Row) -> bool {
        assert_eq!(row.coeffs.len(), self.dim(), "row dimension mismatch");
        match row.normalize() {
            Normalized::Trivial => false,
            Normalized::Infeasible => self.insert(Row::infeasible(self.dim())),
            Normalized::Row(r) => self.insert(r),
        }
    }

    fn insert(&mut self, r: Row) -> bool {
        if self.seen.contains(&r) {
            return false;
        }
        self.seen.insert(r.clone());
        self.rows.push(r);
        true
    }

    pub fn add_le(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> bool {
        self.push(Row::new(coeffs, rhs))
    }

    pub fn add_ge(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> bool {
        self.push(Row::new(coeffs.iter().map(|c| -c).collect(), -rhs))
    }

    pub fn add_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        self.add_ge(coeffs.clone(), rhs.clone());
        self.add_le(coeffs, rhs);
    }

    /// Sparse form of [`add_le`](Self::add_le).
    pub fn add_le_sparse(&mut self, terms: &[(usize, Rational)], rhs: Rational) -> bool {
        let mut coeffs = vec![Rational::zero(); self.dim()];
        for (i, c) in terms {
            coeffs[*i] += c;
        }
        self.add_le(coeffs, rhs)
    }

    pub fn add_ge_sparse(&mut self, terms: &[(usize, Rational)], rhs: Rational) -> bool {
        let neg: Vec<(usize, Rational)> = terms.iter().map(|(i, c)| (*i, -c)).collect();
        self.add_le_sparse(&neg, -rhs)
    }

    pub fn add_eq_sparse(&mut self, terms: &[(usize, Rational)], rhs: Rational) {
        self.add_ge_sparse(terms, rhs.clone());
        self.add_le_sparse(terms, rhs);
    }

    /// Adds `0 <= x_i <= 1` for every variable.
    pub fn add_unit_box(&mut self) {
        for i in 0..self.dim() {
            self.add_ge_sparse(&[(i, Rational::one())], Rational::zero());
            self.add_le_sparse(&[(i, Rational::one())], Rational::one());
        }
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = Row>) {
        for r in rows {
            self.push(r);
        }
    }

    pub fn contains_row(&self, row: &Row) -> bool {
        match row.clone().normalize() {
            Normalized::Row(r) => self.seen.contains(&r),
            Normalized::Trivial => true,
            Normalized::Infeasible => self.seen.contains(&Row::infeasible(self.dim())),
        }
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        self.rows.iter().all(|r| r.is_satisfied(x))
    }

    /// A copy keeping only the rows accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&Row) -> bool) -> Self {
        let mut out = LinearSystem::new(self.vars.clone());
        for r in &self.rows {
            if keep(r) {
                out.insert(r.clone());
            }
        }
        out
    }

    /// Rows sorted deterministically: fewer nonzeros first, then by
    /// coefficient vector in descending order, then right-hand side.
    pub fn sort_rows(&mut self) {
        self.rows.sort_by(|a, b| {
            let nz = |r: &Row| r.coeffs.iter().filter(|c| !c.is_zero()).count();
            nz(a)
                .cmp(&nz(b))
                .then_with(|| b.coeffs.cmp(&a.coeffs))
                .then_with(|| a.rhs.cmp(&b.rhs))
        });
    }

    /// Set equality of the row sets, ignoring order.
    pub fn same_rows(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.seen == other.seen
    }

    pub fn render_rows(&self) -> Vec<String> {
        self.rows.iter().map(|r| r.render(&self.vars)).collect()
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.render_rows() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}
