//! Index coding problems as side-information digraphs.
//!
//! Messages and receivers are numbered from 1. A problem on `n` messages is
//! the list of side-information sets `A_1..A_n`; the edge `i -> k` is present
//! iff `i ∈ A_k`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Largest `n` accepted by [`canonical_key`] by default.
pub const DEFAULT_CANONICAL_LIMIT: usize = 7;
/// Largest `n` accepted by [`enumerate_problems`] by default.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 6;
/// Hard ceiling from the subset representation.
pub const MAX_MESSAGES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("malformed problem text at `{token}`: {reason}")]
    Malformed { token: String, reason: String },
    #[error("receiver {0} is listed more than once")]
    DuplicateReceiver(usize),
    #[error("receiver {0} lists itself as side information")]
    SelfInSideInfo(usize),
    #[error("receiver {receiver} lists side information {index} twice")]
    DuplicateSideInfo { receiver: usize, index: usize },
    #[error("index {index} is out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("{n} messages exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("problem must have at least one message")]
    Empty,
}

/// A subset of `[1..n]`, bit `j - 1` standing for message `j`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MsgSet(pub u32);

impl MsgSet {
    pub const EMPTY: MsgSet = MsgSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 32 {
            MsgSet(u32::MAX)
        } else {
            MsgSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(j: usize) -> Self {
        debug_assert!(j >= 1);
        MsgSet(1 << (j - 1))
    }

    pub fn from_indices(items: impl IntoIterator<Item = usize>) -> Self {
        items.into_iter().fold(MsgSet::EMPTY, |s, j| s.with(j))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, j: usize) -> bool {
        (1..=32).contains(&j) && self.0 & (1 << (j - 1)) != 0
    }

    pub fn with(self, j: usize) -> Self {
        MsgSet(self.0 | (1 << (j - 1)))
    }

    pub fn without(self, j: usize) -> Self {
        MsgSet(self.0 & !(1 << (j - 1)))
    }

    pub fn union(self, o: Self) -> Self {
        MsgSet(self.0 | o.0)
    }

    pub fn intersect(self, o: Self) -> Self {
        MsgSet(self.0 & o.0)
    }

    pub fn minus(self, o: Self) -> Self {
        MsgSet(self.0 & !o.0)
    }

    pub fn is_subset_of(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn intersects(self, o: Self) -> bool {
        self.0 & o.0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let j = bits.trailing_zeros() as usize + 1;
            bits &= bits - 1;
            Some(j)
        })
    }

    /// All subsets of `self`, including the empty set and `self`, in
    /// increasing bit order.
    pub fn subsets(self) -> impl Iterator<Item = MsgSet> {
        let full = self.0;
        let mut cur: Option<u32> = Some(0);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == full { None } else { Some(((c | !full).wrapping_add(1)) & full) };
            Some(MsgSet(c))
        })
    }

    pub fn nonempty_subsets(self) -> impl Iterator<Item = MsgSet> {
        self.subsets().filter(|s| !s.is_empty())
    }
}

impl fmt::Display for MsgSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|j| j.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl fmt::Debug for MsgSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for MsgSet {
    type Err = ProblemError;

    /// Accepts `{1,4}`, `1,4`, `{}` and the empty string.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let inner = t
            .strip_prefix('{')
            .and_then(|x| x.strip_suffix('}'))
            .unwrap_or(t);
        let mut set = MsgSet::EMPTY;
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let j: usize = part.parse().map_err(|_| ProblemError::Malformed {
                token: part.to_string(),
                reason: "expected a message index".into(),
            })?;
            if j == 0 || j > MAX_MESSAGES {
                return Err(ProblemError::IndexOutOfRange { index: j, n: MAX_MESSAGES });
            }
            set = set.with(j);
        }
        Ok(set)
    }
}

/// An index coding instance.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Problem {
    side_info: Vec<MsgSet>,
}

/// Structured form `{"n": 3, "side_info": [[2], [1, 3], [1]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemRecord {
    pub n: usize,
    pub side_info: Vec<Vec<usize>>,
}

impl Problem {
    /// Validates and wraps side-information sets, `side_info[j - 1] = A_j`.
    pub fn new(side_info: Vec<MsgSet>) -> Result<Self, ProblemError> {
        let n = side_info.len();
        if n == 0 {
            return Err(ProblemError::Empty);
        }
        if n > MAX_MESSAGES {
            return Err(ProblemError::TooLarge { n, limit: MAX_MESSAGES });
        }
        for (idx, a) in side_info.iter().enumerate() {
            let j = idx + 1;
            if a.contains(j) {
                return Err(ProblemError::SelfInSideInfo(j));
            }
            if let Some(k) = a.iter().find(|&k| k > n) {
                return Err(ProblemError::IndexOutOfRange { index: k, n });
            }
        }
        Ok(Problem { side_info })
    }

    /// Every receiver knows every other message.
    pub fn complete(n: usize) -> Self {
        let full = MsgSet::full(n);
        Problem::new((1..=n).map(|j| full.without(j)).collect()).expect("valid")
    }

    /// No side information anywhere.
    pub fn no_side_info(n: usize) -> Self {
        Problem::new(vec![MsgSet::EMPTY; n]).expect("valid")
    }

    /// `(j | j-U, .., j-1, j+1, .., j+D)` with indices mod `n`.
    pub fn symmetric(n: usize, up: usize, down: usize) -> Result<Self, ProblemError> {
        if up + down + 1 > n {
            return Err(ProblemError::Malformed {
                token: format!("U={up}, D={down}"),
                reason: format!("requires U + D + 1 <= N = {n}"),
            });
        }
        let wrap = |j: isize| -> usize { (j.rem_euclid(n as isize)) as usize + 1 };
        let sets = (0..n as isize)
            .map(|j| {
                let before = (1..=up as isize).map(|d| wrap(j - d));
                let after = (1..=down as isize).map(|d| wrap(j + d));
                MsgSet::from_indices(before.chain(after))
            })
            .collect();
        Problem::new(sets)
    }

    pub fn n(&self) -> usize {
        self.side_info.len()
    }

    pub fn all(&self) -> MsgSet {
        MsgSet::full(self.n())
    }

    /// `A_j`.
    pub fn side_info(&self, j: usize) -> MsgSet {
        self.side_info[j - 1]
    }

    pub fn side_info_sets(&self) -> &[MsgSet] {
        &self.side_info
    }

    /// `B_j = [1..n] \ ({j} ∪ A_j)`.
    pub fn interfering(&self, j: usize) -> MsgSet {
        self.all().minus(self.side_info(j)).without(j)
    }

    /// Edge `i -> k` iff `i ∈ A_k`.
    pub fn has_edge(&self, i: usize, k: usize) -> bool {
        self.side_info(k).contains(i)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 1..=n {
            for k in 1..=n {
                if i != k && self.has_edge(i, k) {
                    out.push((i, k));
                }
            }
        }
        out
    }

    /// Whether the subgraph induced on `subset` has no directed cycle.
    pub fn is_acyclic(&self, subset: MsgSet) -> bool {
        let mut remaining = subset;
        loop {
            if remaining.is_empty() {
                return true;
            }
            // A vertex with no incoming edge from the remaining set.
            let source = remaining
                .iter()
                .find(|&k| !self.side_info(k).intersects(remaining));
            match source {
                Some(k) => remaining = remaining.without(k),
                None => return false,
            }
        }
    }

    /// The problem restricted to `subset`, keeping original labels: messages
    /// outside `subset` disappear from every side-information set, and their
    /// receivers keep empty side information.
    pub fn restricted_side_info(&self, subset: MsgSet) -> Vec<MsgSet> {
        (1..=self.n())
            .map(|j| {
                if subset.contains(j) {
                    self.side_info(j).intersect(subset)
                } else {
                    MsgSet::EMPTY
                }
            })
            .collect()
    }

    /// Relabels message `i` (1-based) as `perm[i - 1] + 1`; `perm` is a
    /// permutation of `0..n`.
    pub fn permuted(&self, perm: &[usize]) -> Problem {
        assert_eq!(perm.len(), self.n());
        let mut sets = vec![MsgSet::EMPTY; self.n()];
        for (k, a) in self.side_info.iter().enumerate() {
            sets[perm[k]] = MsgSet::from_indices(a.iter().map(|i| perm[i - 1] + 1));
        }
        Problem { side_info: sets }
    }

    /// Canonical text form, e.g. `(1|2),(2|1,3),(3|1)`.
    pub fn render(&self) -> String {
        self.side_info
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                let items: Vec<String> = a.iter().map(|k| k.to_string()).collect();
                format!("({}|{})", idx + 1, items.join(","))
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn to_record(&self) -> ProblemRecord {
        ProblemRecord {
            n: self.n(),
            side_info: self.side_info.iter().map(|a| a.iter().collect()).collect(),
        }
    }

    pub fn from_record(rec: &ProblemRecord) -> Result<Self, ProblemError> {
        if rec.side_info.len() != rec.n {
            return Err(ProblemError::Malformed {
                token: format!("n={}", rec.n),
                reason: format!("{} side-information lists given", rec.side_info.len()),
            });
        }
        let mut sets = Vec::with_capacity(rec.n);
        for (idx, list) in rec.side_info.iter().enumerate() {
            let j = idx + 1;
            let mut a = MsgSet::EMPTY;
            for &k in list {
                if k == 0 || k > rec.n {
                    return Err(ProblemError::IndexOutOfRange { index: k, n: rec.n });
                }
                if a.contains(k) {
                    return Err(ProblemError::DuplicateSideInfo { receiver: j, index: k });
                }
                a = a.with(k);
            }
            sets.push(a);
        }
        Problem::new(sets)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for Problem {
    type Err = ProblemError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_problem(s)
    }
}

/// `B_j` for every receiver, indexed by `j - 1`.
pub fn interfering_sets(p: &Problem) -> Vec<MsgSet> {
    (1..=p.n()).map(|j| p.interfering(j)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Bar,
    Comma,
    Dash,
    Num(usize, String),
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Open => "(".into(),
            Tok::Close => ")".into(),
            Tok::Bar => "|".into(),
            Tok::Comma => ",".into(),
            Tok::Dash => "-".into(),
            Tok::Num(_, s) => s.clone(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Tok>, ProblemError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            c if c.is_whitespace() => {}
            '(' => out.push(Tok::Open),
            ')' => out.push(Tok::Close),
            '|' => out.push(Tok::Bar),
            ',' => out.push(Tok::Comma),
            '-' => out.push(Tok::Dash),
            '0'..='9' => {
                let mut end = i + 1;
                while let Some(&(k, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        end = k + 1;
                        chars.next();
                    } else {
                        break;
                    }
                }
                let s = &text[i..end];
                let v = s.parse().map_err(|_| ProblemError::Malformed {
                    token: s.to_string(),
                    reason: "index too large".into(),
                })?;
                out.push(Tok::Num(v, s.to_string()));
            }
            other => {
                return Err(ProblemError::Malformed {
                    token: other.to_string(),
                    reason: "unexpected character".into(),
                })
            }
        }
    }
    Ok(out)
}

/// Parses `(j|k1,..,km),...`. Empty side information is `(j|)` or `(j|-)`.
pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    let toks = tokenize(text)?;
    let mut pos = 0usize;
    let malformed = |pos: usize, reason: &str| ProblemError::Malformed {
        token: toks.get(pos).map(Tok::text).unwrap_or_else(|| "<end>".into()),
        reason: reason.into(),
    };
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    loop {
        if toks.get(pos) != Some(&Tok::Open) {
            return Err(malformed(pos, "expected `(`"));
        }
        pos += 1;
        let j = match toks.get(pos) {
            Some(Tok::Num(v, _)) => *v,
            _ => return Err(malformed(pos, "expected receiver index")),
        };
        pos += 1;
        if toks.get(pos) != Some(&Tok::Bar) {
            return Err(malformed(pos, "expected `|`"));
        }
        pos += 1;
        let mut items = Vec::new();
        match toks.get(pos) {
            Some(Tok::Close) => {}
            Some(Tok::Dash) => pos += 1,
            _ => loop {
                match toks.get(pos) {
                    Some(Tok::Num(v, _)) => items.push(*v),
                    _ => return Err(malformed(pos, "expected side-information index")),
                }
                pos += 1;
                match toks.get(pos) {
                    Some(Tok::Comma) => pos += 1,
                    _ => break,
                }
            },
        }
        if toks.get(pos) != Some(&Tok::Close) {
            return Err(malformed(pos, "expected `)`"));
        }
        pos += 1;
        groups.push((j, items));
        match toks.get(pos) {
            None => break,
            Some(Tok::Comma) => pos += 1,
            _ => return Err(malformed(pos, "expected `,` between groups")),
        }
    }

    let n = groups.len();
    if n > MAX_MESSAGES {
        return Err(ProblemError::TooLarge { n, limit: MAX_MESSAGES });
    }
    let mut sets: Vec<Option<MsgSet>> = vec![None; n];
    for (j, items) in groups {
        if j == 0 || j > n {
            return Err(ProblemError::IndexOutOfRange { index: j, n });
        }
        if sets[j - 1].is_some() {
            return Err(ProblemError::DuplicateReceiver(j));
        }
        let mut a = MsgSet::EMPTY;
        for k in items {
            if k == j {
                return Err(ProblemError::SelfInSideInfo(j));
            }
            if k == 0 || k > n {
                return Err(ProblemError::IndexOutOfRange { index: k, n });
            }
            if a.contains(k) {
                return Err(ProblemError::DuplicateSideInfo { receiver: j, index: k });
            }
            a = a.with(k);
        }
        sets[j - 1] = Some(a);
    }
    Problem::new(sets.into_iter().map(|s| s.expect("n distinct receivers in 1..=n")).collect())
}

/// Permutation-minimal adjacency string of a problem's digraph.
///
/// Bits are the off-diagonal adjacency entries `(i, k)` in row-major order,
/// the first entry being the most significant bit, so numeric order on
/// `bits` is lexicographic order on the string.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalKey {
    pub n: usize,
    pub bits: u64,
}

impl CanonicalKey {
    pub fn width(n: usize) -> usize {
        n * n.saturating_sub(1)
    }

    /// The problem whose adjacency string is exactly this key.
    pub fn to_problem(&self) -> Problem {
        problem_from_bits(self.n, self.bits)
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = CanonicalKey::width(self.n);
        write!(f, "{}:", self.n)?;
        for b in (0..w).rev() {
            f.write_str(if self.bits >> b & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for CanonicalKey {
    type Err = ProblemError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ProblemError::Malformed {
            token: s.to_string(),
            reason: "expected `n:bits`".into(),
        };
        let (n, bits) = s.split_once(':').ok_or_else(bad)?;
        let n: usize = n.parse().map_err(|_| bad())?;
        if bits.len() != CanonicalKey::width(n) || bits.len() > 64 {
            return Err(bad());
        }
        let bits = if bits.is_empty() { 0 } else { u64::from_str_radix(bits, 2).map_err(|_| bad())? };
        Ok(CanonicalKey { n, bits })
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CanonicalKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Bit offset (from the least significant end) of entry `(i, k)`, 0-based.
fn bit_position(n: usize, i: usize, k: usize) -> usize {
    let idx = i * (n - 1) + if k > i { k - 1 } else { k };
    CanonicalKey::width(n) - 1 - idx
}

fn adjacency_bits(p: &Problem) -> u64 {
    let n = p.n();
    let mut bits = 0u64;
    for i in 0..n {
        for k in 0..n {
            if i != k && p.has_edge(i + 1, k + 1) {
                bits |= 1 << bit_position(n, i, k);
            }
        }
    }
    bits
}

fn problem_from_bits(n: usize, bits: u64) -> Problem {
    let mut sets = vec![MsgSet::EMPTY; n];
    for i in 0..n {
        for (k, set) in sets.iter_mut().enumerate() {
            if i != k && bits >> bit_position(n, i, k) & 1 == 1 {
                *set = set.with(i + 1);
            }
        }
    }
    Problem::new(sets).expect("adjacency bits form a valid problem")
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let k = (i + 1..n).rev().find(|&k| cur[k] > cur[i]).expect("exists");
        cur.swap(i, k);
        cur[i + 1..].reverse();
    }
}

/// For each relabeling `σ` (new vertex `a` is old vertex `σ(a)`), the old bit
/// positions read in the order of the new string.
struct RelabelTable {
    width: usize,
    sources: Vec<Vec<u8>>,
}

impl RelabelTable {
    fn new(n: usize) -> Self {
        let width = CanonicalKey::width(n);
        let sources = permutations(n)
            .into_iter()
            .map(|sigma| {
                let mut seq = Vec::with_capacity(width);
                for a in 0..n {
                    for b in 0..n {
                        if a != b {
                            seq.push(bit_position(n, sigma[a], sigma[b]) as u8);
                        }
                    }
                }
                seq
            })
            .collect();
        RelabelTable { width, sources }
    }

    fn relabeled(&self, bits: u64, seq: &[u8]) -> u64 {
        let mut out = 0u64;
        for (idx, &src) in seq.iter().enumerate() {
            out |= (bits >> src & 1) << (self.width - 1 - idx);
        }
        out
    }

    fn min_key(&self, bits: u64) -> u64 {
        self.sources
            .iter()
            .map(|seq| self.relabeled(bits, seq))
            .min()
            .unwrap_or(bits)
    }

    /// Whether no relabeling produces a smaller string; stops at the first
    /// differing bit of every candidate.
    fn is_minimal(&self, bits: u64) -> bool {
        for seq in &self.sources {
            for (idx, &src) in seq.iter().enumerate() {
                let shift = self.width - 1 - idx;
                let mine = bits >> shift & 1;
                let theirs = bits >> src & 1;
                if theirs != mine {
                    if theirs < mine {
                        return false;
                    }
                    break;
                }
            }
        }
        true
    }
}

/// Canonical key with the default size limit.
pub fn canonical_key(p: &Problem) -> Result<CanonicalKey, ProblemError> {
    canonical_key_with_limit(p, DEFAULT_CANONICAL_LIMIT)
}

pub fn canonical_key_with_limit(p: &Problem, limit: usize) -> Result<CanonicalKey, ProblemError> {
    let n = p.n();
    if n > limit.min(8) {
        return Err(ProblemError::TooLarge { n, limit: limit.min(8) });
    }
    let table = RelabelTable::new(n);
    Ok(CanonicalKey {
        n,
        bits: table.min_key(adjacency_bits(p)),
    })
}

/// Streams one representative per isomorphism class of digraphs on `n`
/// vertices, in ascending key order. Each representative's adjacency string
/// equals its canonical key.
pub struct ProblemEnumerator {
    n: usize,
    next: u64,
    end: u64,
    table: RelabelTable,
}

impl Iterator for ProblemEnumerator {
    type Item = Problem;

    fn next(&mut self) -> Option<Problem> {
        while self.next < self.end {
            let bits = self.next;
            self.next += 1;
            if self.table.is_minimal(bits) {
                return Some(problem_from_bits(self.n, bits));
            }
        }
        None
    }
}

pub fn enumerate_problems(n: usize) -> Result<ProblemEnumerator, ProblemError> {
    enumerate_problems_with_limit(n, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_problems_with_limit(n: usize, limit: usize) -> Result<ProblemEnumerator, ProblemError> {
    if n == 0 {
        return Err(ProblemError::Empty);
    }
    let ceiling = limit.min(7);
    if n > ceiling {
        return Err(ProblemError::TooLarge { n, limit: ceiling });
    }
    Ok(ProblemEnumerator {
        n,
        next: 0,
        end: 1u64 << CanonicalKey::width(n),
        table: RelabelTable::new(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn set(items: &[usize]) -> MsgSet {
        MsgSet::from_indices(items.iter().copied())
    }

    #[test]
    fn parse_three_message_example() {
        let p = parse_problem("(1|2),(2|1,3),(3|1)").unwrap();
        assert_eq!(p.n(), 3);
        assert_eq!(p.side_info_sets(), &[set(&[2]), set(&[1, 3]), set(&[1])]);
        assert_eq!(p.render(), "(1|2),(2|1,3),(3|1)");
    }

    #[test]
    fn parse_single_and_cycle() {
        let p = parse_problem("(1|)").unwrap();
        assert_eq!(p.n(), 1);
        assert!(p.side_info(1).is_empty());
        assert_eq!(parse_problem(" ( 1 | - ) ").unwrap(), p);

        let c = parse_problem("(1|5,2),(2|1,3),(3|2,4),(4|3,5),(5|4,1)").unwrap();
        assert_eq!(c, Problem::symmetric(5, 1, 1).unwrap());
        assert_eq!(c.render(), "(1|2,5),(2|1,3),(3|2,4),(4|3,5),(5|1,4)");
    }

    #[test]
    fn parse_accepts_groups_in_any_order() {
        let p = parse_problem("(2|1),(1|)").unwrap();
        assert_eq!(p.render(), "(1|),(2|1)");
    }

    #[test]
    fn parse_errors_name_the_token() {
        assert_eq!(
            parse_problem("(1|2),(1|)"),
            Err(ProblemError::DuplicateReceiver(1))
        );
        assert_eq!(parse_problem("(1|1),(2|)"), Err(ProblemError::SelfInSideInfo(1)));
        assert_eq!(
            parse_problem("(1|3),(2|)"),
            Err(ProblemError::IndexOutOfRange { index: 3, n: 2 })
        );
        assert_eq!(
            parse_problem("(1|2,2),(2|)"),
            Err(ProblemError::DuplicateSideInfo { receiver: 1, index: 2 })
        );
        match parse_problem("(1|2;(2|)") {
            Err(ProblemError::Malformed { token, .. }) => assert_eq!(token, ";"),
            other => panic!("{other:?}"),
        }
        match parse_problem("(1|2") {
            Err(ProblemError::Malformed { token, .. }) => assert_eq!(token, "<end>"),
            other => panic!("{other:?}"),
        }
        match parse_problem("(1|2)(2|)") {
            Err(ProblemError::Malformed { token, .. }) => assert_eq!(token, "("),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_problem(""), Err(ProblemError::Malformed { .. })));
    }

    #[test]
    fn interfering_sets_examples() {
        let p = parse_problem("(1|2),(2|1,3),(3|1)").unwrap();
        assert_eq!(interfering_sets(&p), vec![set(&[3]), MsgSet::EMPTY, set(&[2])]);
        for n in 1..=5 {
            assert!(interfering_sets(&Problem::complete(n)).iter().all(|b| b.is_empty()));
            let e = Problem::no_side_info(n);
            for (idx, b) in interfering_sets(&e).into_iter().enumerate() {
                assert_eq!(b, MsgSet::full(n).without(idx + 1));
            }
        }
    }

    #[test]
    fn symmetric_six_message_problem() {
        let p = Problem::symmetric(6, 1, 2).unwrap();
        assert_eq!(
            p,
            parse_problem("(1|2,3,6),(2|1,3,4),(3|2,4,5),(4|3,5,6),(5|4,6,1),(6|5,1,2)").unwrap()
        );
    }

    #[test]
    fn structured_round_trip() {
        let p = parse_problem("(1|2),(2|1,3),(3|1)").unwrap();
        let json = serde_json::to_string(&p.to_record()).unwrap();
        assert_eq!(json, r#"{"n":3,"side_info":[[2],[1,3],[1]]}"#);
        let back: ProblemRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(Problem::from_record(&back).unwrap(), p);
        let bad = ProblemRecord { n: 2, side_info: vec![vec![2], vec![2]] };
        assert_eq!(Problem::from_record(&bad), Err(ProblemError::SelfInSideInfo(2)));
    }

    #[test]
    fn acyclicity() {
        let c = Problem::symmetric(5, 1, 1).unwrap();
        assert!(c.is_acyclic(set(&[1, 3])));
        assert!(!c.is_acyclic(set(&[1, 2])));
        assert!(Problem::no_side_info(4).is_acyclic(MsgSet::full(4)));
    }

    #[test]
    fn keys_of_isomorphic_problems_agree() {
        let a = parse_problem("(1|2),(2|1)").unwrap();
        assert_eq!(canonical_key(&a).unwrap(), canonical_key(&a.permuted(&[1, 0])).unwrap());

        let b = parse_problem("(1|2),(2|),(3|)").unwrap();
        let c = parse_problem("(1|),(2|3),(3|)").unwrap();
        assert_eq!(canonical_key(&b).unwrap(), canonical_key(&c).unwrap());

        let cyc = Problem::symmetric(5, 1, 1).unwrap();
        let rotated = cyc.permuted(&[1, 2, 3, 4, 0]);
        assert_eq!(canonical_key(&cyc).unwrap(), canonical_key(&rotated).unwrap());

        let d = parse_problem("(1|2),(2|),(3|)").unwrap();
        let e = parse_problem("(1|2),(2|1),(3|)").unwrap();
        assert_ne!(canonical_key(&d).unwrap(), canonical_key(&e).unwrap());
    }

    #[test]
    fn key_limit() {
        assert_eq!(
            canonical_key(&Problem::no_side_info(8)),
            Err(ProblemError::TooLarge { n: 8, limit: 7 })
        );
        assert!(enumerate_problems(9).is_err());
    }

    #[test]
    fn key_text_round_trip() {
        let k = canonical_key(&parse_problem("(1|2),(2|),(3|)").unwrap()).unwrap();
        let s = k.to_string();
        assert_eq!(s.len(), 2 + 6);
        assert_eq!(s.parse::<CanonicalKey>().unwrap(), k);
        assert_eq!(canonical_key(&k.to_problem()).unwrap(), k);
    }

    #[test]
    fn small_enumeration_counts() {
        let counts: Vec<usize> = (1..=4).map(|n| enumerate_problems(n).unwrap().count()).collect();
        assert_eq!(counts, vec![1, 3, 16, 218]);
    }

    #[test]
    fn enumeration_keys_are_distinct_and_ascending() {
        let keys: Vec<CanonicalKey> = enumerate_problems(4)
            .unwrap()
            .map(|p| canonical_key(&p).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        // Brute-force: the set of all keys over all labeled digraphs.
        let mut all: Vec<u64> = (0..1u64 << 12)
            .map(|b| canonical_key(&problem_from_bits(4, b)).unwrap().bits)
            .collect();
        all.sort();
        all.dedup();
        assert_eq!(all, keys.iter().map(|k| k.bits).collect::<Vec<_>>());
    }

    #[test]
    fn subsets_iterate_everything() {
        let s = set(&[1, 3, 4]);
        let subs: Vec<MsgSet> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|x| x.is_subset_of(s)));
        assert_eq!(MsgSet::EMPTY.subsets().count(), 1);
        assert_eq!(s.to_string(), "{1,3,4}");
        assert_eq!("{1,3,4}".parse::<MsgSet>().unwrap(), s);
    }

    fn arb_problem(max_n: usize) -> impl Strategy<Value = Problem> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<u32>(), n).prop_map(move |raw| {
                let sets = raw
                    .into_iter()
                    .enumerate()
                    .map(|(k, b)| MsgSet(b & MsgSet::full(n).bits()).without(k + 1))
                    .collect();
                Problem::new(sets).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(p in arb_problem(7)) {
            prop_assert_eq!(parse_problem(&p.render()).unwrap(), p);
        }

        #[test]
        fn receiver_sets_partition(p in arb_problem(7)) {
            for j in 1..=p.n() {
                let a = p.side_info(j);
                let b = p.interfering(j);
                prop_assert!(!a.intersects(b));
                prop_assert!(!a.contains(j) && !b.contains(j));
                prop_assert_eq!(a.union(b).with(j), p.all());
            }
        }

        #[test]
        fn key_is_permutation_invariant(p in arb_problem(5), seed in any::<u64>()) {
            let key = canonical_key(&p).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..100 {
                let mut perm: Vec<usize> = (0..p.n()).collect();
                perm.shuffle(&mut rng);
                prop_assert_eq!(canonical_key(&p.permuted(&perm)).unwrap(), key);
            }
        }
    }
}
