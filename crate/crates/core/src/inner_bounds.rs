//! Inner bounds: flat coding, time sharing of flat coding over subsets, the
//! dual index coding polymatroid, and composite coding with certificates.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    fm_project, lp_solve, lp_solve_rows, LinearSystem, LpOutcome, Rational, Region, Row, Sense,
};
use crate::outer_bound::{build_lifted_outer, rate_names};
use crate::problem::{MsgSet, Problem};

/// Largest message count accepted by the inner-bound searches by default.
pub const DEFAULT_INNER_LIMIT: usize = 7;

/// Largest support accepted by [`composite_region_fixed`].
pub const MAX_FIXED_SUPPORT: usize = 12;

fn one() -> Rational {
    Rational::one()
}

fn check_limit(what: &'static str, n: usize) -> Result<()> {
    if n > DEFAULT_INNER_LIMIT {
        return Err(Error::TooLarge {
            what,
            n,
            limit: DEFAULT_INNER_LIMIT,
        });
    }
    Ok(())
}

fn rate_sum(point: &[Rational], set: MsgSet) -> Rational {
    set.iter().map(|i| point[i - 1].clone()).sum()
}

// ---------------------------------------------------------------------------
// Composite rates, decoding configurations, certificates
// ---------------------------------------------------------------------------

/// Rates `S_J` of the composite indices `W_J`. Only nonzero entries are
/// stored; every other subset has rate zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompositeRates {
    rates: BTreeMap<MsgSet, Rational>,
}

impl CompositeRates {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (MsgSet, Rational)>) -> Self {
        let mut s = Self::new();
        for (set, rate) in pairs {
            s.set(set, rate);
        }
        s
    }

    /// `S_J`.
    pub fn get(&self, set: MsgSet) -> Rational {
        self.rates.get(&set).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, set: MsgSet, rate: Rational) {
        if rate.is_zero() {
            self.rates.remove(&set);
        } else {
            self.rates.insert(set, rate);
        }
    }

    /// Nonzero entries in increasing subset order.
    pub fn iter(&self) -> impl Iterator<Item = (MsgSet, &Rational)> {
        self.rates.iter().map(|(s, r)| (*s, r))
    }

    pub fn support(&self) -> Vec<MsgSet> {
        self.rates.keys().copied().collect()
    }

    /// `Σ_{J ⊄ known} S_J`: the load on the channel seen by a receiver that
    /// already knows the messages in `known`.
    pub fn load_outside(&self, known: MsgSet) -> Rational {
        self.iter()
            .filter(|(s, _)| !s.is_subset_of(known))
            .map(|(_, r)| r.clone())
            .sum()
    }

    /// `Σ_{J' ⊆ within, J' ∩ hit ≠ ∅} S_J'`.
    pub fn reaching(&self, within: MsgSet, hit: MsgSet) -> Rational {
        self.iter()
            .filter(|(s, _)| s.is_subset_of(within) && s.intersects(hit))
            .map(|(_, r)| r.clone())
            .sum()
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        Self::from_pairs(self.iter().map(|(s, r)| (s, r * factor)))
    }
}

impl Serialize for CompositeRates {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.rates.len()))?;
        for (set, rate) in &self.rates {
            map.serialize_entry(&set.to_string(), rate)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for CompositeRates {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct RatesVisitor;
        impl<'de> Visitor<'de> for RatesVisitor {
            type Value = CompositeRates;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from subsets like \"{1,4}\" to rates")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out = CompositeRates::new();
                while let Some((key, rate)) = access.next_entry::<String, Rational>()? {
                    let set: MsgSet = key.parse().map_err(de::Error::custom)?;
                    if set.is_empty() {
                        return Err(de::Error::custom("composite index over the empty set"));
                    }
                    out.set(set, rate);
                }
                Ok(out)
            }
        }
        deserializer.deserialize_map(RatesVisitor)
    }
}

/// One decoding set `K_j ∋ j` per receiver.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecodingConfig {
    sets: Vec<MsgSet>,
}

impl DecodingConfig {
    pub fn new(sets: Vec<MsgSet>) -> Result<Self> {
        for (i, s) in sets.iter().enumerate() {
            if !s.contains(i + 1) {
                return Err(Error::InvalidDecodingSet { receiver: i + 1 });
            }
        }
        Ok(DecodingConfig { sets })
    }

    /// Every receiver decodes only its own message.
    pub fn own_only(n: usize) -> Self {
        DecodingConfig {
            sets: (1..=n).map(MsgSet::singleton).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    /// `K_j`.
    pub fn get(&self, j: usize) -> MsgSet {
        self.sets[j - 1]
    }

    pub fn sets(&self) -> &[MsgSet] {
        &self.sets
    }
}

impl Serialize for DecodingConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let lists: Vec<Vec<usize>> = self.sets.iter().map(|s| s.iter().collect()).collect();
        lists.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DecodingConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let lists = Vec::<Vec<usize>>::deserialize(deserializer)?;
        let mut sets = Vec::with_capacity(lists.len());
        for list in lists {
            if list.iter().any(|&i| i == 0 || i > crate::problem::MAX_MESSAGES) {
                return Err(de::Error::custom("message index out of range"));
            }
            sets.push(MsgSet::from_indices(list));
        }
        DecodingConfig::new(sets).map_err(de::Error::custom)
    }
}

/// Why a certificate fails to certify its point.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CertificateViolation {
    #[error("certificate covers {found} messages, problem has {expected}")]
    Size { expected: usize, found: usize },
    #[error("decoding set of receiver {receiver} does not contain it")]
    DecodingSet { receiver: usize },
    #[error("composite index {set} has negative rate or lies outside the message set")]
    Rate { set: MsgSet },
    #[error("rate {rate} of message {message} is outside [0, 1]")]
    Point { message: usize, rate: Rational },
    #[error("receiver {receiver}: composite load {load} exceeds 1")]
    Load { receiver: usize, load: Rational },
    #[error("receiver {receiver}: sum of rates over {set} is {lhs}, above the available {rhs}")]
    Decoding {
        receiver: usize,
        set: MsgSet,
        lhs: Rational,
        rhs: Rational,
    },
}

/// A decoding configuration and composite rates under which every receiver
/// recovers its message at the given rate point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AchievabilityCertificate {
    pub config: DecodingConfig,
    #[serde(rename = "S")]
    pub rates: CompositeRates,
    pub point: Vec<Rational>,
}

impl AchievabilityCertificate {
    /// Checks every constraint by direct substitution.
    pub fn validate(&self, p: &Problem) -> std::result::Result<(), CertificateViolation> {
        let n = p.n();
        for found in [self.config.n(), self.point.len()] {
            if found != n {
                return Err(CertificateViolation::Size { expected: n, found });
            }
        }
        for (i, r) in self.point.iter().enumerate() {
            if r.is_negative() || *r > one() {
                return Err(CertificateViolation::Point {
                    message: i + 1,
                    rate: r.clone(),
                });
            }
        }
        for (set, rate) in self.rates.iter() {
            if rate.is_negative() || !set.is_subset_of(p.all()) {
                return Err(CertificateViolation::Rate { set });
            }
        }
        for j in 1..=n {
            let k = self.config.get(j);
            if !k.contains(j) || !k.is_subset_of(p.all()) {
                return Err(CertificateViolation::DecodingSet { receiver: j });
            }
            let a = p.side_info(j);
            let load = self.rates.load_outside(a);
            if load > one() {
                return Err(CertificateViolation::Load { receiver: j, load });
            }
            let within = k.union(a);
            for set in k.minus(a).nonempty_subsets() {
                let lhs = rate_sum(&self.point, set);
                let rhs = self.rates.reaching(within, set);
                if lhs > rhs {
                    return Err(CertificateViolation::Decoding {
                        receiver: j,
                        set,
                        lhs,
                        rhs,
                    });
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Flat coding and time sharing
// ---------------------------------------------------------------------------

fn flat_system(p: &Problem, active: MsgSet) -> LinearSystem {
    let n = p.n();
    let mut sys = LinearSystem::new(rate_names(n));
    for j in active.iter() {
        let terms: Vec<(usize, Rational)> = p
            .interfering(j)
            .intersect(active)
            .with(j)
            .iter()
            .map(|k| (k - 1, one()))
            .collect();
        sys.add_le_sparse(&terms, one());
    }
    for j in 1..=n {
        sys.add_ge_sparse(&[(j - 1, one())], Rational::zero());
        if !active.contains(j) {
            sys.add_le_sparse(&[(j - 1, one())], Rational::zero());
        }
    }
    sys
}

/// Flat coding: `R_j + Σ_{k ∈ B_j} R_k <= 1` for every receiver.
pub fn flat_region(p: &Problem) -> Result<Region> {
    Ok(Region::from_system(&flat_system(p, p.all()))?)
}

/// Convex hull of the flat-coding regions of every sub-problem, with the
/// rates of the messages left out fixed to zero.
pub fn flat_timeshare_region(p: &Problem) -> Result<Region> {
    check_limit("time-sharing region", p.n())?;
    let mut points: Vec<Vec<Rational>> = Vec::new();
    for active in p.all().nonempty_subsets() {
        let sub = Region::from_system(&flat_system(p, active))?;
        points.extend(sub.vertices().iter().cloned());
    }
    Ok(Region::from_vertices(rate_names(p.n()), &points)?)
}

// ---------------------------------------------------------------------------
// Dual index coding
// ---------------------------------------------------------------------------

/// Capacity region of the dual index coding problem with message set
/// `messages`, side information `side_info` and sender rates `s`, over the
/// rates `R_j` of `messages \ side_info` (in increasing order):
/// `Σ_{j∈J} R_j <= Σ_{J' ⊆ K ∪ A, J' ∩ J ≠ ∅} S_J'` for every nonempty
/// `J ⊆ K \ A`, together with `R >= 0`. Redundant rows are kept.
pub fn dual_region(messages: MsgSet, side_info: MsgSet, s: &CompositeRates) -> LinearSystem {
    let wanted = messages.minus(side_info);
    let within = messages.union(side_info);
    let order: Vec<usize> = wanted.iter().collect();
    let mut sys = LinearSystem::new(order.iter().map(|j| format!("R_{j}")).collect());
    let slot = |j: usize| order.iter().position(|&k| k == j).expect("member");
    for set in wanted.nonempty_subsets() {
        let terms: Vec<(usize, Rational)> = set.iter().map(|j| (slot(j), one())).collect();
        sys.add_le_sparse(&terms, s.reaching(within, set));
    }
    for i in 0..order.len() {
        sys.add_ge_sparse(&[(i, one())], Rational::zero());
    }
    sys
}

// ---------------------------------------------------------------------------
// Composite coding: membership search
// ---------------------------------------------------------------------------

/// Limits for the configuration search.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchBudget {
    /// Give up (and report [`Membership::Undecided`]) once this instant has
    /// passed.
    pub deadline: Option<Instant>,
    /// Split the search over worker threads at the first receiver.
    pub parallel: bool,
}

impl SearchBudget {
    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Outcome of a budgeted membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Member(Box<AchievabilityCertificate>),
    NotMember,
    Undecided,
}

/// LP over the composite rates `S_J`, one column per nonempty subset
/// (column `bits(J) - 1`), plus optionally a trailing scale column `t`.
struct CompositeLp<'a> {
    p: &'a Problem,
    columns: usize,
    with_scale: bool,
}

impl<'a> CompositeLp<'a> {
    fn new(p: &'a Problem, with_scale: bool) -> Self {
        let subsets = (1usize << p.n()) - 1;
        CompositeLp {
            p,
            columns: subsets + usize::from(with_scale),
            with_scale,
        }
    }

    fn subsets(&self) -> usize {
        self.columns - usize::from(self.with_scale)
    }

    /// Per-receiver load rows and `S >= 0` (and `t >= 0`).
    fn base_rows(&self) -> Vec<Row> {
        let mut rows = Vec::new();
        for j in 1..=self.p.n() {
            let a = self.p.side_info(j);
            let mut coeffs = vec![Rational::zero(); self.columns];
            for bits in 1..=self.subsets() as u32 {
                if !MsgSet(bits).is_subset_of(a) {
                    coeffs[bits as usize - 1] = one();
                }
            }
            rows.push(Row::new(coeffs, one()));
        }
        for c in 0..self.columns {
            let mut coeffs = vec![Rational::zero(); self.columns];
            coeffs[c] = -one();
            rows.push(Row::new(coeffs, Rational::zero()));
        }
        rows
    }

    /// Decoding rows of receiver `j` decoding `wanted = K_j \ A_j`.
    ///
    /// With a fixed point the rows read `Σ S >= Σ_J R`; rows whose left side
    /// vanishes are dropped. With the scale column they read
    /// `|J| t - Σ S <= 0` for the point `t·1`.
    fn receiver_rows(&self, j: usize, wanted: MsgSet, point: Option<&[Rational]>, out: &mut Vec<Row>) {
        let within = wanted.union(self.p.side_info(j));
        for set in wanted.nonempty_subsets() {
            let mut coeffs = vec![Rational::zero(); self.columns];
            for s in within.nonempty_subsets() {
                if s.intersects(set) {
                    coeffs[s.bits() as usize - 1] = -one();
                }
            }
            let rhs = match point {
                Some(pt) => {
                    let need = rate_sum(pt, set);
                    if need.is_zero() {
                        continue;
                    }
                    -need
                }
                None => {
                    coeffs[self.columns - 1] = Rational::from_integer(set.len() as i64);
                    Rational::zero()
                }
            };
            out.push(Row::new(coeffs, rhs));
        }
    }

    fn rates_from(&self, s: &[Rational]) -> CompositeRates {
        CompositeRates::from_pairs(
            (1..=self.subsets() as u32).map(|bits| (MsgSet(bits), s[bits as usize - 1].clone())),
        )
    }
}

/// Candidate sets `K_j \ A_j` for receiver `j` at `point`, in search order.
///
/// Messages of rate zero are always decoded: adding such a message only adds
/// rows implied by existing ones while enlarging every right-hand side. A
/// receiver whose own rate is zero needs no rows at all.
fn candidates(p: &Problem, j: usize, point: Option<&[Rational]>) -> Vec<MsgSet> {
    let b = p.interfering(j);
    let (zero, free) = match point {
        Some(pt) => {
            let zero = MsgSet::from_indices(b.iter().filter(|&k| pt[k - 1].is_zero()));
            if pt[j - 1].is_zero() {
                return vec![zero.with(j)];
            }
            (zero, b.minus(zero))
        }
        None => (MsgSet::EMPTY, b),
    };
    let mut out: Vec<MsgSet> = free.subsets().map(|e| e.union(zero).with(j)).collect();
    out.sort_by_key(|s| (s.len(), s.bits()));
    out
}

enum Search {
    Found(Vec<MsgSet>, Vec<Rational>),
    Exhausted,
    OutOfTime,
}

/// A candidate decoding set for one receiver with its decoding constraints.
type ReceiverOption = (MsgSet, Vec<Row>);

struct MemberSearch<'a> {
    lp: CompositeLp<'a>,
    order: Vec<usize>,
    options: Vec<Vec<ReceiverOption>>,
    budget: SearchBudget,
}

impl MemberSearch<'_> {
    fn feasible(&self, rows: &[Row]) -> Option<Vec<Rational>> {
        let zero = vec![Rational::zero(); self.lp.columns];
        lp_solve_rows(self.lp.columns, rows, &zero, Sense::Max)
            .point()
            .map(<[Rational]>::to_vec)
    }

    fn descend(&self, depth: usize, rows: &mut Vec<Row>, chosen: &mut Vec<MsgSet>) -> Search {
        if depth == self.order.len() {
            return match self.feasible(rows) {
                Some(s) => Search::Found(chosen.clone(), s),
                None => Search::Exhausted,
            };
        }
        for (set, extra) in &self.options[depth] {
            if let Some(found) = self.try_option(depth, set, extra, rows, chosen) {
                return found;
            }
        }
        Search::Exhausted
    }

    fn try_option(
        &self,
        depth: usize,
        set: &MsgSet,
        extra: &[Row],
        rows: &mut Vec<Row>,
        chosen: &mut Vec<MsgSet>,
    ) -> Option<Search> {
        if self.budget.expired() {
            return Some(Search::OutOfTime);
        }
        let mark = rows.len();
        rows.extend_from_slice(extra);
        chosen.push(*set);
        let outcome = if depth + 1 == self.order.len() || self.feasible(rows).is_some() {
            self.descend(depth + 1, rows, chosen)
        } else {
            Search::Exhausted
        };
        rows.truncate(mark);
        chosen.pop();
        match outcome {
            Search::Exhausted => None,
            other => Some(other),
        }
    }
}

fn check_point(p: &Problem, point: &[Rational]) -> Result<()> {
    if point.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: point.len(),
        });
    }
    if point.iter().any(|r| r.is_negative() || *r > one()) {
        return Err(Error::OutsideUnitBox);
    }
    Ok(())
}

/// Decides whether `point` lies in the composite-coding inner bound and, if
/// so, returns a certificate.
pub fn composite_member(p: &Problem, point: &[Rational]) -> Result<Option<AchievabilityCertificate>> {
    match composite_member_with_budget(p, point, SearchBudget::default())? {
        Membership::Member(cert) => Ok(Some(*cert)),
        Membership::NotMember => Ok(None),
        Membership::Undecided => unreachable!("no deadline was set"),
    }
}

/// [`composite_member`] with a time budget and optional parallelism. The
/// result does not depend on `budget.parallel`.
///
/// Receivers are assigned decoding sets one at a time; after each choice the
/// composite-rate LP restricted to the receivers assigned so far must stay
/// feasible, otherwise the branch is abandoned. The first full assignment
/// with a feasible LP is returned, with composite rates chosen to minimize
/// their total.
pub fn composite_member_with_budget(
    p: &Problem,
    point: &[Rational],
    budget: SearchBudget,
) -> Result<Membership> {
    check_limit("composite coding", p.n())?;
    check_point(p, point)?;
    let lp = CompositeLp::new(p, false);
    let base = lp.base_rows();

    let mut per_receiver: Vec<(usize, Vec<ReceiverOption>)> = Vec::new();
    for j in 1..=p.n() {
        let mut opts = Vec::new();
        for set in candidates(p, j, Some(point)) {
            let mut rows = Vec::new();
            lp.receiver_rows(j, set, Some(point), &mut rows);
            opts.push((set, rows));
        }
        per_receiver.push((j, opts));
    }
    let mut search = MemberSearch {
        lp,
        order: Vec::new(),
        options: Vec::new(),
        budget,
    };
    // Drop options infeasible on their own, then branch on the receivers
    // with the fewest remaining options first.
    for (_, opts) in per_receiver.iter_mut() {
        let mut kept = Vec::with_capacity(opts.len());
        for (set, rows) in opts.drain(..) {
            if search.budget.expired() {
                return Ok(Membership::Undecided);
            }
            let mut all = base.clone();
            all.extend_from_slice(&rows);
            if search.feasible(&all).is_some() {
                kept.push((set, rows));
            }
        }
        *opts = kept;
    }
    if per_receiver.iter().any(|(_, o)| o.is_empty()) {
        return Ok(Membership::NotMember);
    }
    per_receiver.sort_by_key(|(j, o)| (o.len(), *j));
    search.order = per_receiver.iter().map(|(j, _)| *j).collect();
    search.options = per_receiver.into_iter().map(|(_, o)| o).collect();

    let outcome = if budget.parallel {
        let branches: Vec<Search> = search.options[0]
            .par_iter()
            .map(|(set, extra)| {
                let mut rows = base.clone();
                let mut chosen = Vec::new();
                search
                    .try_option(0, set, extra, &mut rows, &mut chosen)
                    .unwrap_or(Search::Exhausted)
            })
            .collect();
        let mut result = Search::Exhausted;
        for b in branches {
            match b {
                Search::Found(..) => {
                    result = b;
                    break;
                }
                Search::OutOfTime => result = Search::OutOfTime,
                Search::Exhausted => {}
            }
        }
        result
    } else {
        let mut rows = base.clone();
        search.descend(0, &mut rows, &mut Vec::new())
    };

    match outcome {
        Search::Exhausted => Ok(Membership::NotMember),
        Search::OutOfTime => Ok(Membership::Undecided),
        Search::Found(chosen, feasible) => {
            let mut sets = vec![MsgSet::EMPTY; p.n()];
            let mut rows = base;
            for (&j, &set) in search.order.iter().zip(&chosen) {
                sets[j - 1] = set;
                search.lp.receiver_rows(j, set, Some(point), &mut rows);
            }
            let total = vec![one(); search.lp.columns];
            let s = match lp_solve_rows(search.lp.columns, &rows, &total, Sense::Min) {
                LpOutcome::Optimal { point, .. } => point,
                _ => feasible,
            };
            let cert = AchievabilityCertificate {
                config: DecodingConfig::new(sets)?,
                rates: search.lp.rates_from(&s),
                point: point.to_vec(),
            };
            debug_assert_eq!(cert.validate(p), Ok(()));
            Ok(Membership::Member(Box::new(cert)))
        }
    }
}

// ---------------------------------------------------------------------------
// Composite coding: region for a fixed configuration
// ---------------------------------------------------------------------------

/// The rate region of composite coding with a fixed decoding configuration
/// and composite indices restricted to `support`, obtained by eliminating
/// the composite rates with Fourier–Motzkin.
pub fn composite_region_fixed(p: &Problem, config: &DecodingConfig, support: &[MsgSet]) -> Result<Region> {
    let n = p.n();
    if config.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: config.n(),
        });
    }
    let mut support: Vec<MsgSet> = support.to_vec();
    support.sort();
    support.dedup();
    if support.len() > MAX_FIXED_SUPPORT {
        return Err(Error::SupportTooLarge {
            size: support.len(),
            limit: MAX_FIXED_SUPPORT,
        });
    }
    if let Some(&bad) = support.iter().find(|s| s.is_empty() || !s.is_subset_of(p.all())) {
        return Err(Error::InvalidSupport { set: bad });
    }
    for j in 1..=n {
        let k = config.get(j);
        if !k.contains(j) || !k.is_subset_of(p.all()) {
            return Err(Error::InvalidDecodingSet { receiver: j });
        }
    }

    let mut names = rate_names(n);
    let s_names: Vec<String> = support.iter().map(|s| format!("S_{s}")).collect();
    names.extend(s_names.iter().cloned());
    let mut sys = LinearSystem::new(names);
    let s_col = |i: usize| n + i;
    for j in 1..=n {
        let a = p.side_info(j);
        let k = config.get(j);
        let within = k.union(a);
        for set in k.minus(a).nonempty_subsets() {
            let mut terms: Vec<(usize, Rational)> = set.iter().map(|i| (i - 1, one())).collect();
            for (i, s) in support.iter().enumerate() {
                if s.is_subset_of(within) && s.intersects(set) {
                    terms.push((s_col(i), -one()));
                }
            }
            sys.add_le_sparse(&terms, Rational::zero());
        }
        let load: Vec<(usize, Rational)> = support
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_subset_of(a))
            .map(|(i, _)| (s_col(i), one()))
            .collect();
        sys.add_le_sparse(&load, one());
    }
    for c in 0..n + support.len() {
        sys.add_ge_sparse(&[(c, one())], Rational::zero());
    }
    let drop: Vec<&str> = s_names.iter().map(String::as_str).collect();
    let projected = fm_project(&sys, &drop)?;
    Ok(Region::from_system(&projected)?)
}

// ---------------------------------------------------------------------------
// Symmetric rate
// ---------------------------------------------------------------------------

/// Largest common rate `t` with `(t, .., t)` inside each bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricCapacity {
    pub inner: Rational,
    pub outer: Rational,
}

/// Largest `t` with `(t, .., t)` in the outer bound: one LP over the lifted
/// system.
pub fn symmetric_outer(p: &Problem) -> Result<Rational> {
    let lifted = build_lifted_outer(p)?;
    let mut sys = lifted.system().clone();
    for j in 2..=p.n() {
        sys.add_eq_sparse(&[(0, one()), (j - 1, -one())], Rational::zero());
    }
    let mut obj = vec![Rational::zero(); sys.dim()];
    obj[0] = one();
    match lp_solve(&sys, &obj, Sense::Max) {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => unreachable!("the lifted system is a nonempty polytope: {other:?}"),
    }
}

/// Largest `t` with `(t, .., t)` in the composite-coding inner bound, given
/// the outer value as an upper bound. `None` if the budget ran out.
pub fn symmetric_inner(p: &Problem, outer: &Rational, budget: SearchBudget) -> Result<Option<Rational>> {
    let n = p.n();
    check_limit("composite coding", n)?;
    if outer.is_zero() {
        return Ok(Some(Rational::zero()));
    }
    let at_outer = vec![outer.clone(); n];
    match composite_member_with_budget(p, &at_outer, budget)? {
        Membership::Member(_) => return Ok(Some(outer.clone())),
        Membership::Undecided => return Ok(None),
        Membership::NotMember => {}
    }

    // Branch and bound over configurations: the LP maximum of t with only
    // some receivers constrained bounds every completion from above.
    let lp = CompositeLp::new(p, true);
    let mut objective = vec![Rational::zero(); lp.columns];
    objective[lp.columns - 1] = one();
    let options: Vec<Vec<Vec<Row>>> = (1..=n)
        .map(|j| {
            candidates(p, j, None)
                .into_iter()
                .map(|set| {
                    let mut rows = Vec::new();
                    lp.receiver_rows(j, set, None, &mut rows);
                    rows
                })
                .collect()
        })
        .collect();
    // t <= 1 keeps every partial LP bounded.
    let mut rows = lp.base_rows();
    let mut cap = vec![Rational::zero(); lp.columns];
    cap[lp.columns - 1] = one();
    rows.push(Row::new(cap, one()));

    struct Bnb<'a> {
        columns: usize,
        objective: Vec<Rational>,
        options: Vec<Vec<Vec<Row>>>,
        best: Rational,
        target: &'a Rational,
        budget: SearchBudget,
        timed_out: bool,
    }
    impl Bnb<'_> {
        fn bound(&self, rows: &[Row]) -> Rational {
            match lp_solve_rows(self.columns, rows, &self.objective, Sense::Max) {
                LpOutcome::Optimal { value, .. } => value,
                other => unreachable!("t = 0, S = 0 is feasible and t <= 1: {other:?}"),
            }
        }
        fn run(&mut self, depth: usize, rows: &mut Vec<Row>) {
            for i in 0..self.options[depth].len() {
                if self.best == *self.target || self.timed_out {
                    return;
                }
                if self.budget.expired() {
                    self.timed_out = true;
                    return;
                }
                let mark = rows.len();
                rows.extend_from_slice(&self.options[depth][i]);
                let ub = self.bound(rows);
                if ub > self.best {
                    if depth + 1 == self.options.len() {
                        self.best = ub;
                    } else {
                        self.run(depth + 1, rows);
                    }
                }
                rows.truncate(mark);
            }
        }
    }
    let mut bnb = Bnb {
        columns: lp.columns,
        objective,
        options,
        best: Rational::zero(),
        target: outer,
        budget,
        timed_out: false,
    };
    bnb.run(0, &mut rows);
    Ok((!bnb.timed_out).then_some(bnb.best))
}

/// Symmetric rates of both bounds.
pub fn symmetric_capacity(p: &Problem) -> Result<SymmetricCapacity> {
    let outer = symmetric_outer(p)?;
    let inner = symmetric_inner(p, &outer, SearchBudget::default())?.expect("no deadline was set");
    Ok(SymmetricCapacity { inner, outer })
}
