//! Vertex-colored interval instances, sorted views, solution sets and the
//! solution verifier.
//!
//! Intervals are closed with integer endpoints, so two intervals that share
//! an endpoint intersect. Colors are 1-based (`1..=k`); interval ids are
//! dense (`0..n`), and an [`Instance`] always stores its intervals indexed by
//! id.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Coord = i64;

/// One vertex of the interval graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub id: usize,
    pub left: Coord,
    pub right: Coord,
    pub color: usize,
}

impl Interval {
    pub fn new(id: usize, left: Coord, right: Coord, color: usize) -> Self {
        Interval {
            id,
            left,
            right,
            color,
        }
    }

    /// Closed-interval intersection test; touching endpoints intersect.
    #[inline]
    pub fn intersects(&self, other: &Interval) -> bool {
        intersects(self, other)
    }

    /// `true` if `self` strictly contains `other` (same coordinates do not count).
    pub fn strictly_contains(&self, other: &Interval) -> bool {
        self.left <= other.left
            && other.right <= self.right
            && (self.left, self.right) != (other.left, other.right)
    }
}

#[inline]
pub fn intersects(a: &Interval, b: &Interval) -> bool {
    a.left.max(b.left) <= a.right.min(b.right)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("color count k must be at least 1")]
    NoColors,
    #[error("duplicate interval id {0}")]
    DuplicateId(usize),
    #[error("interval id {id} out of range (n = {n})")]
    IdOutOfRange { id: usize, n: usize },
    #[error("interval {id}: color {color} outside 1..={k}")]
    ColorOutOfRange { id: usize, color: usize, k: usize },
    #[error("interval {id}: left endpoint {left} exceeds right endpoint {right}")]
    Reversed {
        id: usize,
        left: Coord,
        right: Coord,
    },
    #[error(
        "instance claims to be proper but interval {outer} strictly contains interval {inner}"
    )]
    NotProper { outer: usize, inner: usize },
}

impl InstanceError {
    /// The interval the error is attributed to, if any.
    pub fn culprit(&self) -> Option<usize> {
        match *self {
            InstanceError::NoColors => None,
            InstanceError::DuplicateId(id)
            | InstanceError::IdOutOfRange { id, .. }
            | InstanceError::ColorOutOfRange { id, .. }
            | InstanceError::Reversed { id, .. } => Some(id),
            InstanceError::NotProper { inner, .. } => Some(inner),
        }
    }
}

/// A vertex-colored interval graph given by its interval representation.
///
/// Immutable once built; the constructor validates every invariant,
/// including the properness claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    k: usize,
    intervals: Vec<Interval>,
    proper: bool,
}

impl Instance {
    pub fn new(
        k: usize,
        mut intervals: Vec<Interval>,
        proper: bool,
    ) -> Result<Self, InstanceError> {
        if k == 0 {
            return Err(InstanceError::NoColors);
        }
        let n = intervals.len();
        let mut seen = vec![false; n];
        for iv in &intervals {
            if iv.id >= n {
                return Err(InstanceError::IdOutOfRange { id: iv.id, n });
            }
            if std::mem::replace(&mut seen[iv.id], true) {
                return Err(InstanceError::DuplicateId(iv.id));
            }
            if iv.color == 0 || iv.color > k {
                return Err(InstanceError::ColorOutOfRange {
                    id: iv.id,
                    color: iv.color,
                    k,
                });
            }
            if iv.left > iv.right {
                return Err(InstanceError::Reversed {
                    id: iv.id,
                    left: iv.left,
                    right: iv.right,
                });
            }
        }
        intervals.sort_unstable_by_key(|iv| iv.id);
        if proper {
            if let Some((outer, inner)) = find_nesting(&intervals) {
                return Err(InstanceError::NotProper { outer, inner });
            }
        }
        Ok(Instance {
            k,
            intervals,
            proper,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_proper_claimed(&self) -> bool {
        self.proper
    }

    /// Intervals indexed by id.
    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn interval(&self, id: usize) -> &Interval {
        &self.intervals[id]
    }

    pub fn color(&self, id: usize) -> usize {
        self.intervals[id].color
    }

    /// Number of intervals per color, indexed `0..k` (color `c` at `c - 1`).
    pub fn color_class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for iv in &self.intervals {
            sizes[iv.color - 1] += 1;
        }
        sizes
    }

    /// Some color in `1..=k` is never used, so no balanced set with `f >= 1` exists.
    pub fn is_color_deficient(&self) -> bool {
        self.color_class_sizes().contains(&0)
    }

    /// Recomputes properness from the geometry, independent of the claim.
    pub fn is_geometrically_proper(&self) -> bool {
        find_nesting(&self.intervals).is_none()
    }

    pub fn sorted_view(&self) -> SortedView {
        SortedView::new(self)
    }

    /// Number of intersecting pairs, by sweep.
    pub fn edge_count(&self) -> usize {
        let mut by_left: Vec<&Interval> = self.intervals.iter().collect();
        by_left.sort_by_key(|iv| (iv.left, iv.right, iv.id));
        let lefts: Vec<Coord> = by_left.iter().map(|iv| iv.left).collect();
        by_left
            .iter()
            .enumerate()
            .map(|(i, iv)| lefts.partition_point(|&l| l <= iv.right) - i - 1)
            .sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n={} k={}", self.n(), self.k);
        if self.proper {
            out.push_str(" proper");
        }
        out.push('\n');
        for iv in &self.intervals {
            out.push_str(&format!(
                "{} {} {} {}\n",
                iv.id, iv.left, iv.right, iv.color
            ));
        }
        out
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Finds a strictly nested pair `(outer, inner)` in O(n log n).
fn find_nesting(intervals: &[Interval]) -> Option<(usize, usize)> {
    let mut order: Vec<&Interval> = intervals.iter().collect();
    // Left ascending, right descending: every earlier interval with a
    // different coordinate pair and right >= b.right strictly contains b.
    order.sort_by(|a, b| {
        a.left
            .cmp(&b.left)
            .then(b.right.cmp(&a.right))
            .then(a.id.cmp(&b.id))
    });
    let mut best: Option<&Interval> = None; // max right over earlier coordinate groups
    let mut group_start = 0;
    while group_start < order.len() {
        let head = order[group_start];
        let mut group_end = group_start;
        while group_end < order.len()
            && (order[group_end].left, order[group_end].right) == (head.left, head.right)
        {
            group_end += 1;
        }
        if let Some(outer) = best {
            if outer.right >= head.right {
                return Some((outer.id, head.id));
            }
        }
        if best.is_none_or(|b| head.right > b.right) {
            best = Some(head);
        }
        group_start = group_end;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed header: {0}")]
    Header(String),
    #[error("malformed line: {0}")]
    Syntax(String),
    #[error("expected {expected} intervals, found {found}")]
    Count { expected: usize, found: usize },
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn is_skippable(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

fn parse_kv<'a>(token: &'a str, key: &str) -> Option<&'a str> {
    token.strip_prefix(key)?.strip_prefix('=')
}

/// Parses the instance text format: a header `n=<n> k=<k>[ proper]`
/// followed by `n` lines `<id> <left> <right> <color>`. Lines starting with
/// `#` are comments.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !is_skippable(l));

    let (header_line, header) = lines.next().ok_or(ParseError {
        line: 1,
        kind: ParseErrorKind::Header("missing header".into()),
    })?;
    let header_err = |msg: &str| ParseError {
        line: header_line,
        kind: ParseErrorKind::Header(msg.to_string()),
    };
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let (n, k, proper) = match tokens.as_slice() {
        [n, k, rest @ ..] => {
            let n: usize = parse_kv(n, "n")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| header_err("expected n=<count>"))?;
            let k: usize = parse_kv(k, "k")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| header_err("expected k=<colors>"))?;
            let proper = match rest {
                [] => false,
                ["proper"] => true,
                _ => return Err(header_err("unexpected trailing tokens")),
            };
            (n, k, proper)
        }
        _ => return Err(header_err("expected `n=<n> k=<k>[ proper]`")),
    };

    let mut intervals = Vec::with_capacity(n);
    let mut line_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut last_line = header_line;
    for (line, content) in lines {
        last_line = line;
        let syntax = |msg: String| ParseError {
            line,
            kind: ParseErrorKind::Syntax(msg),
        };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(syntax(format!("expected 4 fields, found {}", fields.len())));
        }
        let id: usize = fields[0]
            .parse()
            .map_err(|_| syntax(format!("bad id `{}`", fields[0])))?;
        let left: Coord = fields[1]
            .parse()
            .map_err(|_| syntax(format!("bad left endpoint `{}`", fields[1])))?;
        let right: Coord = fields[2]
            .parse()
            .map_err(|_| syntax(format!("bad right endpoint `{}`", fields[2])))?;
        let color: usize = fields[3]
            .parse()
            .map_err(|_| syntax(format!("bad color `{}`", fields[3])))?;
        // Duplicate ids are reported at the second occurrence.
        if line_of.insert(id, line).is_some() {
            return Err(ParseError {
                line,
                kind: InstanceError::DuplicateId(id).into(),
            });
        }
        intervals.push(Interval::new(id, left, right, color));
    }
    if intervals.len() != n {
        return Err(ParseError {
            line: last_line,
            kind: ParseErrorKind::Count {
                expected: n,
                found: intervals.len(),
            },
        });
    }
    Instance::new(k, intervals, proper).map_err(|e| ParseError {
        line: e
            .culprit()
            .and_then(|id| line_of.get(&id).copied())
            .unwrap_or(header_line),
        kind: e.into(),
    })
}

impl FromStr for Instance {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_instance(s)
    }
}

/// Intervals ordered by right endpoint (ties: left, then id) together with
/// the predecessor index of each position.
///
/// Positions are 1-based; position 0 stands for "no interval".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedView {
    order: Vec<usize>,
    prev: Vec<usize>,
}

impl SortedView {
    pub fn new(inst: &Instance) -> Self {
        let ivs = inst.intervals();
        let mut order: Vec<usize> = (0..ivs.len()).collect();
        order.sort_unstable_by_key(|&id| (ivs[id].right, ivs[id].left, id));
        let rights: Vec<Coord> = order.iter().map(|&id| ivs[id].right).collect();
        // Rights are sorted, so the count of rights strictly below `left` is
        // exactly the 1-based position of the rightmost such interval.
        let prev = order
            .iter()
            .map(|&id| rights.partition_point(|&r| r < ivs[id].left))
            .collect();
        SortedView { order, prev }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Interval ids in sorted order (index 0 is position 1).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `prev()[i - 1]` is the predecessor position of position `i`.
    pub fn prev(&self) -> &[usize] {
        &self.prev
    }

    /// Id of the interval at 1-based position `pos`.
    pub fn id_at(&self, pos: usize) -> usize {
        self.order[pos - 1]
    }

    pub fn prev_of(&self, pos: usize) -> usize {
        self.prev[pos - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ProblemKind {
    Bis,
    Mcis,
    Bds,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Bis => "BIS",
            ProblemKind::Mcis => "MCIS",
            ProblemKind::Bds => "BDS",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "BIS" => Ok(ProblemKind::Bis),
            "MCIS" => Ok(ProblemKind::Mcis),
            "BDS" => Ok(ProblemKind::Bds),
            other => Err(format!("unknown problem kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("unknown interval id {id} (instance has {n} intervals)")]
    UnknownId { id: usize, n: usize },
    #[error("color histogram has {found} entries, instance has k = {k}")]
    ColorCountMismatch { found: usize, k: usize },
}

/// A set of interval ids plus its color histogram.
///
/// Whether the set is actually independent / dominating / balanced is not an
/// invariant of this type; see [`verify_solution`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolutionSet {
    kind: ProblemKind,
    ids: BTreeSet<usize>,
    per_color_counts: Vec<usize>,
}

impl SolutionSet {
    pub fn new(
        kind: ProblemKind,
        ids: impl IntoIterator<Item = usize>,
        inst: &Instance,
    ) -> Result<Self, SolutionError> {
        let ids: BTreeSet<usize> = ids.into_iter().collect();
        let mut per_color_counts = vec![0; inst.k()];
        for &id in &ids {
            if id >= inst.n() {
                return Err(SolutionError::UnknownId { id, n: inst.n() });
            }
            per_color_counts[inst.color(id) - 1] += 1;
        }
        Ok(SolutionSet {
            kind,
            ids,
            per_color_counts,
        })
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn ids(&self) -> &BTreeSet<usize> {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.ids.contains(&id)
    }

    /// Histogram indexed `0..k`.
    pub fn per_color_counts(&self) -> &[usize] {
        &self.per_color_counts
    }

    pub fn distinct_colors(&self) -> usize {
        self.per_color_counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn with_kind(mut self, kind: ProblemKind) -> Self {
        self.kind = kind;
        self
    }

    /// Solution file text: `kind=<KIND> f=<f>` and one id per line.
    pub fn to_text(&self, f: usize) -> String {
        let mut out = format!("kind={} f={}\n", self.kind, f);
        for id in &self.ids {
            out.push_str(&format!("{id}\n"));
        }
        out
    }
}

/// A parsed solution file before it is bound to an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFile {
    pub kind: ProblemKind,
    pub f: usize,
    pub ids: Vec<usize>,
}

impl SolutionFile {
    pub fn bind(&self, inst: &Instance) -> Result<SolutionSet, SolutionError> {
        SolutionSet::new(self.kind, self.ids.iter().copied(), inst)
    }
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !is_skippable(l));
    let (header_line, header) = lines.next().ok_or(ParseError {
        line: 1,
        kind: ParseErrorKind::Header("missing header".into()),
    })?;
    let header_err = |msg: String| ParseError {
        line: header_line,
        kind: ParseErrorKind::Header(msg),
    };
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let [kind, f] = tokens.as_slice() else {
        return Err(header_err("expected `kind=<BIS|MCIS|BDS> f=<f>`".into()));
    };
    let kind: ProblemKind = parse_kv(kind, "kind")
        .ok_or_else(|| header_err("expected kind=<BIS|MCIS|BDS>".into()))?
        .parse()
        .map_err(header_err)?;
    let f: usize = parse_kv(f, "f")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| header_err("expected f=<f>".into()))?;
    let ids = lines
        .map(|(line, content)| {
            content.trim().parse::<usize>().map_err(|_| ParseError {
                line,
                kind: ParseErrorKind::Syntax(format!("bad id `{}`", content.trim())),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SolutionFile { kind, f, ids })
}

/// Why a candidate solution was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    Intersecting {
        a: usize,
        b: usize,
    },
    ColorCount {
        color: usize,
        count: usize,
        expected: usize,
    },
    DuplicateColor {
        color: usize,
        count: usize,
    },
    Undominated {
        id: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Intersecting { a, b } => write!(f, "intervals {a} and {b} intersect"),
            Violation::ColorCount {
                color,
                count,
                expected,
            } => write!(f, "color {color} has {count} members, expected {expected}"),
            Violation::DuplicateColor { color, count } => {
                write!(f, "color {color} used {count} times")
            }
            Violation::Undominated { id } => write!(f, "interval {id} is not dominated"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub kind: ProblemKind,
    pub valid: bool,
    pub distinct_colors: usize,
    pub violations: Vec<Violation>,
}

/// Checks a solution against its problem definition.
///
/// * BIS: pairwise non-intersecting and exactly `f` per color.
/// * MCIS: pairwise non-intersecting and at most one per color (`f` ignored).
/// * BDS: every vertex outside the set meets a member, and exactly `f` per color.
pub fn verify_solution(
    inst: &Instance,
    sol: &SolutionSet,
    f: usize,
) -> Result<Verdict, SolutionError> {
    if let Some(&id) = sol.ids().iter().find(|&&id| id >= inst.n()) {
        return Err(SolutionError::UnknownId { id, n: inst.n() });
    }
    if sol.per_color_counts().len() != inst.k() {
        return Err(SolutionError::ColorCountMismatch {
            found: sol.per_color_counts().len(),
            k: inst.k(),
        });
    }
    let mut violations = Vec::new();
    match sol.kind() {
        ProblemKind::Bis => {
            violations.extend(first_intersection(inst, sol.ids()));
            violations.extend(balance_violations(sol, f));
        }
        ProblemKind::Mcis => {
            violations.extend(first_intersection(inst, sol.ids()));
            for (c, &count) in sol.per_color_counts().iter().enumerate() {
                if count > 1 {
                    violations.push(Violation::DuplicateColor {
                        color: c + 1,
                        count,
                    });
                }
            }
        }
        ProblemKind::Bds => {
            let index = crate::bds::DominationIndex::new(inst, sol.ids().iter().copied());
            violations.extend(
                inst.intervals()
                    .iter()
                    .filter(|iv| !sol.contains(iv.id) && !index.dominates(iv))
                    .map(|iv| Violation::Undominated { id: iv.id }),
            );
            violations.extend(balance_violations(sol, f));
        }
    }
    Ok(Verdict {
        kind: sol.kind(),
        valid: violations.is_empty(),
        distinct_colors: sol.distinct_colors(),
        violations,
    })
}

fn balance_violations(sol: &SolutionSet, f: usize) -> impl Iterator<Item = Violation> + '_ {
    sol.per_color_counts()
        .iter()
        .enumerate()
        .filter(move |(_, &count)| count != f)
        .map(move |(c, &count)| Violation::ColorCount {
            color: c + 1,
            count,
            expected: f,
        })
}

/// Reports one intersecting pair if the set is not independent.
fn first_intersection(inst: &Instance, ids: &BTreeSet<usize>) -> Option<Violation> {
    let mut members: Vec<&Interval> = ids.iter().map(|&id| inst.interval(id)).collect();
    members.sort_by_key(|iv| (iv.left, iv.right, iv.id));
    let mut reach: Option<&Interval> = None;
    for iv in members {
        if let Some(r) = reach {
            if r.right >= iv.left {
                return Some(Violation::Intersecting {
                    a: r.id.min(iv.id),
                    b: r.id.max(iv.id),
                });
            }
        }
        if reach.is_none_or(|r| iv.right > r.right) {
            reach = Some(iv);
        }
    }
    None
}

/// Whether `ids` is pairwise non-intersecting.
pub fn is_independent(inst: &Instance, ids: impl IntoIterator<Item = usize>) -> bool {
    let set: BTreeSet<usize> = ids.into_iter().collect();
    first_intersection(inst, &set).is_none()
}
