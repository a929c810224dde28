//! CNF formulas and the two hardness reductions onto colored proper interval
//! graphs, with the solution/assignment translations in both directions.
//!
//! * [`reduce_indset`]: 3-bounded 3SAT → 1-BIS. One interval per literal
//!   occurrence, colored by its clause; positive and negative occurrences of
//!   the same variable intersect.
//! * [`reduce_domset`]: 2P2N-3SAT → 1-BDS. Per variable two paths
//!   `t1 - h_t - t2` and `f1 - h_f - f2`, per clause a clique on its literal
//!   vertices, and five colors per variable.
//!
//! Each reduction returns [`GadgetMetadata`] naming the role of every
//! interval; decoding and canonicalization read roles from it rather than
//! recovering them from the graph.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{verify_solution, Coord, Instance, Interval, ProblemKind, SolutionSet};

/// Horizontal distance between consecutive gadget components.
pub const COMPONENT_SPACING: Coord = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    General,
    /// Every variable occurs at most three times; clauses have 2 or 3 literals.
    ThreeBounded,
    /// Every variable occurs exactly twice positively and twice negatively;
    /// clauses have 1 to 3 literals.
    Tptn,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::General => "general",
            Flavor::ThreeBounded => "three_bounded",
            Flavor::Tptn => "tptn",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: malformed literal `{token}`")]
    Token { line: usize, token: String },
    #[error("literal {literal} out of range for {num_vars} variables")]
    LiteralOutOfRange { literal: i64, num_vars: usize },
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("clause {clause} mentions variable {var} more than once")]
    RepeatedVariable { clause: usize, var: usize },
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    Unterminated,
}

/// A CNF formula over variables `1..=num_vars`; literals are signed indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
    flavor: Flavor,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self, CnfError> {
        for (j, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(CnfError::EmptyClause { clause: j + 1 });
            }
            let mut seen = BTreeSet::new();
            for &lit in clause {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > num_vars {
                    return Err(CnfError::LiteralOutOfRange {
                        literal: lit as i64,
                        num_vars,
                    });
                }
                if !seen.insert(var) {
                    return Err(CnfError::RepeatedVariable { clause: j + 1, var });
                }
            }
        }
        let mut formula = CnfFormula {
            num_vars,
            clauses,
            flavor: Flavor::General,
        };
        formula.flavor = if formula.satisfies(Flavor::Tptn) {
            Flavor::Tptn
        } else if formula.satisfies(Flavor::ThreeBounded) {
            Flavor::ThreeBounded
        } else {
            Flavor::General
        };
        Ok(formula)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// The most restrictive flavor detected at construction.
    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// `(positive, negative)` occurrence counts, indexed by variable - 1.
    pub fn occurrence_counts(&self) -> Vec<(usize, usize)> {
        let mut counts = vec![(0, 0); self.num_vars];
        for &lit in self.clauses.iter().flatten() {
            let entry = &mut counts[lit.unsigned_abs() as usize - 1];
            if lit > 0 {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
        counts
    }

    pub fn satisfies(&self, flavor: Flavor) -> bool {
        match flavor {
            Flavor::General => true,
            Flavor::ThreeBounded => {
                self.clauses.iter().all(|c| (2..=3).contains(&c.len()))
                    && self.occurrence_counts().iter().all(|&(p, q)| p + q <= 3)
            }
            Flavor::Tptn => {
                self.clauses.iter().all(|c| (1..=3).contains(&c.len()))
                    && self.occurrence_counts().iter().all(|&c| c == (2, 2))
            }
        }
    }

    pub fn evaluate(&self, assignment: &Assignment) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&lit| assignment.literal(lit)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                out.push_str(&format!("{lit} "));
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Parses DIMACS CNF (`c` comment lines, a `p cnf <vars> <clauses>` header,
/// 0-terminated clauses that may span lines).
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if t.starts_with('%') {
            break;
        }
        if t.starts_with('p') {
            if header.is_some() {
                return Err(CnfError::Header {
                    line: line_no,
                    msg: "duplicate header".into(),
                });
            }
            let parts: Vec<&str> = t.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| CnfError::Header {
                line: line_no,
                msg: "expected `p cnf <vars> <clauses>`".into(),
            })?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(CnfError::Header {
                line: line_no,
                msg: "clause before header".into(),
            });
        };
        for token in t.split_whitespace() {
            let lit: i64 = token.parse().map_err(|_| CnfError::Token {
                line: line_no,
                token: token.to_string(),
            })?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(CnfError::EmptyClause {
                        clause: clauses.len() + 1,
                    });
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(CnfError::LiteralOutOfRange {
                        literal: lit,
                        num_vars,
                    });
                }
                current.push(lit as i32);
            }
        }
    }
    let (num_vars, declared) = header.ok_or(CnfError::Header {
        line: 1,
        msg: "missing `p cnf` header".into(),
    })?;
    if !current.is_empty() {
        return Err(CnfError::Unterminated);
    }
    if clauses.len() != declared {
        return Err(CnfError::ClauseCount {
            declared,
            found: clauses.len(),
        });
    }
    CnfFormula::new(num_vars, clauses)
}

impl FromStr for CnfFormula {
    type Err = CnfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_dimacs(s)
    }
}

/// Truth values for variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn all_false(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    /// Variable `var` is 1-based.
    pub fn value(&self, var: usize) -> bool {
        self.0[var - 1]
    }

    pub fn literal(&self, lit: i32) -> bool {
        let v = self.value(lit.unsigned_abs() as usize);
        if lit > 0 {
            v
        } else {
            !v
        }
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    /// One `x<i>=0|1` line per variable.
    pub fn to_text(&self) -> String {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("x{}={}\n", i + 1, u8::from(v)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct AssignmentParseError {
    pub line: usize,
    pub msg: String,
}

pub fn parse_assignment(text: &str, num_vars: usize) -> Result<Assignment, AssignmentParseError> {
    let mut values: Vec<Option<bool>> = vec![None; num_vars];
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let err = |msg: String| AssignmentParseError { line: idx + 1, msg };
        let (name, value) = t
            .split_once('=')
            .ok_or_else(|| err(format!("expected x<i>=0|1, got `{t}`")))?;
        let var: usize = name
            .trim()
            .strip_prefix('x')
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| err(format!("bad variable `{name}`")))?;
        if var == 0 || var > num_vars {
            return Err(err(format!("variable x{var} out of range 1..={num_vars}")));
        }
        let value = match value.trim() {
            "0" => false,
            "1" => true,
            other => return Err(err(format!("bad value `{other}`"))),
        };
        if values[var - 1].replace(value).is_some() {
            return Err(err(format!("x{var} assigned twice")));
        }
    }
    // Unlisted variables default to false.
    Ok(Assignment(
        values.into_iter().map(|v| v.unwrap_or(false)).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    Indset,
    Domset,
}

/// What an interval stands for in a reduced instance. Variables and clauses
/// are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Role {
    /// Occurrence of `var` in `clause` (independent-set reduction).
    Occurrence {
        var: usize,
        clause: usize,
        positive: bool,
    },
    T1 {
        var: usize,
    },
    T2 {
        var: usize,
    },
    F1 {
        var: usize,
    },
    F2 {
        var: usize,
    },
    #[serde(rename = "h_t")]
    HTrue {
        var: usize,
    },
    #[serde(rename = "h_f")]
    HFalse {
        var: usize,
    },
    /// Clause vertex for the occurrence of `var` in `clause` (dominating-set reduction).
    ClauseLiteral {
        clause: usize,
        var: usize,
        positive: bool,
    },
}

impl Role {
    pub fn var(&self) -> usize {
        match *self {
            Role::Occurrence { var, .. }
            | Role::T1 { var }
            | Role::T2 { var }
            | Role::F1 { var }
            | Role::F2 { var }
            | Role::HTrue { var }
            | Role::HFalse { var }
            | Role::ClauseLiteral { var, .. } => var,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleRecord {
    pub id: usize,
    #[serde(flatten)]
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("formula flavor is {found}, reduction requires {expected}")]
    FlavorMismatch { expected: Flavor, found: Flavor },
    #[error("metadata inconsistent with instance: {0}")]
    MetaMismatch(String),
    #[error("invalid solution: {0}")]
    InvalidSolution(String),
    #[error("assignment does not satisfy the formula")]
    NotSatisfying,
    #[error("assignment has {found} variables, formula has {expected}")]
    AssignmentLength { expected: usize, found: usize },
}

/// Five-color, six-vertex gadget of one variable plus its four clause
/// occurrence vertices (earlier clause first).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableGadget {
    pub var: usize,
    pub t1: usize,
    pub t2: usize,
    pub f1: usize,
    pub f2: usize,
    pub h_t: usize,
    pub h_f: usize,
    /// `c_t^1`, `c_t^2`.
    pub c_t: [usize; 2],
    /// `c_f^1`, `c_f^2`.
    pub c_f: [usize; 2],
}

impl VariableGadget {
    /// `{h_t, f1, f2, c_t^1, c_t^2}`, the canonical set when the variable is true.
    pub fn true_set(&self) -> [usize; 5] {
        [self.h_t, self.f1, self.f2, self.c_t[0], self.c_t[1]]
    }

    /// `{h_f, t1, t2, c_f^1, c_f^2}`, the canonical set when the variable is false.
    pub fn false_set(&self) -> [usize; 5] {
        [self.h_f, self.t1, self.t2, self.c_f[0], self.c_f[1]]
    }
}

/// Domset color of one role: five colors per variable, in the order
/// `z_t^1, z_t^2, z_f^1, z_f^2, z_h`.
fn domset_color(var: usize, slot: usize) -> usize {
    5 * (var - 1) + slot
}

/// Per-interval role annotations produced alongside a reduced instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetMetadata {
    pub reduction: ReductionKind,
    pub num_vars: usize,
    pub num_clauses: usize,
    /// Indexed by interval id.
    pub roles: Vec<RoleRecord>,
}

impl GadgetMetadata {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metadata serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ReductionError> {
        let meta: GadgetMetadata =
            serde_json::from_str(text).map_err(|e| ReductionError::MetaMismatch(e.to_string()))?;
        for (i, rec) in meta.roles.iter().enumerate() {
            if rec.id != i {
                return Err(ReductionError::MetaMismatch(format!(
                    "role records must be listed by id; position {i} has id {}",
                    rec.id
                )));
            }
            let var = rec.role.var();
            if var == 0 || var > meta.num_vars {
                return Err(ReductionError::MetaMismatch(format!(
                    "interval {i} names variable {var} outside 1..={}",
                    meta.num_vars
                )));
            }
        }
        Ok(meta)
    }

    pub fn role(&self, id: usize) -> Role {
        self.roles[id].role
    }

    /// Recovers the formula the metadata was generated from.
    pub fn formula(&self) -> Result<CnfFormula, ReductionError> {
        let mut clauses: Vec<Vec<i32>> = vec![Vec::new(); self.num_clauses];
        for rec in &self.roles {
            if let Role::Occurrence {
                var,
                clause,
                positive,
            }
            | Role::ClauseLiteral {
                clause,
                var,
                positive,
            } = rec.role
            {
                let slot = clauses.get_mut(clause.wrapping_sub(1)).ok_or_else(|| {
                    ReductionError::MetaMismatch(format!("clause {clause} out of range"))
                })?;
                slot.push(if positive { var as i32 } else { -(var as i32) });
            }
        }
        CnfFormula::new(self.num_vars, clauses)
            .map_err(|e| ReductionError::MetaMismatch(e.to_string()))
    }

    /// Resolves the per-variable gadgets of a dominating-set reduction.
    pub fn variable_gadgets(&self) -> Result<Vec<VariableGadget>, ReductionError> {
        if self.reduction != ReductionKind::Domset {
            return Err(ReductionError::MetaMismatch(
                "not a domset reduction".into(),
            ));
        }
        #[derive(Default, Clone)]
        struct Partial {
            t1: Option<usize>,
            t2: Option<usize>,
            f1: Option<usize>,
            f2: Option<usize>,
            h_t: Option<usize>,
            h_f: Option<usize>,
            c_t: Vec<(usize, usize)>,
            c_f: Vec<(usize, usize)>,
        }
        let mut parts = vec![Partial::default(); self.num_vars];
        for rec in &self.roles {
            let p = &mut parts[rec.role.var() - 1];
            let dup = |slot: &mut Option<usize>| {
                slot.replace(rec.id).map_or(Ok(()), |_| {
                    Err(ReductionError::MetaMismatch(format!(
                        "variable {} has a repeated role",
                        rec.role.var()
                    )))
                })
            };
            match rec.role {
                Role::T1 { .. } => dup(&mut p.t1)?,
                Role::T2 { .. } => dup(&mut p.t2)?,
                Role::F1 { .. } => dup(&mut p.f1)?,
                Role::F2 { .. } => dup(&mut p.f2)?,
                Role::HTrue { .. } => dup(&mut p.h_t)?,
                Role::HFalse { .. } => dup(&mut p.h_f)?,
                Role::ClauseLiteral {
                    clause,
                    positive: true,
                    ..
                } => p.c_t.push((clause, rec.id)),
                Role::ClauseLiteral {
                    clause,
                    positive: false,
                    ..
                } => p.c_f.push((clause, rec.id)),
                Role::Occurrence { .. } => {
                    return Err(ReductionError::MetaMismatch(
                        "occurrence role in a domset reduction".into(),
                    ))
                }
            }
        }
        parts
            .into_iter()
            .enumerate()
            .map(|(i, mut p)| {
                let var = i + 1;
                let missing =
                    || ReductionError::MetaMismatch(format!("variable {var} gadget incomplete"));
                p.c_t.sort_unstable();
                p.c_f.sort_unstable();
                if p.c_t.len() != 2 || p.c_f.len() != 2 {
                    return Err(ReductionError::MetaMismatch(format!(
                        "variable {var} needs two positive and two negative clause vertices"
                    )));
                }
                Ok(VariableGadget {
                    var,
                    t1: p.t1.ok_or_else(missing)?,
                    t2: p.t2.ok_or_else(missing)?,
                    f1: p.f1.ok_or_else(missing)?,
                    f2: p.f2.ok_or_else(missing)?,
                    h_t: p.h_t.ok_or_else(missing)?,
                    h_f: p.h_f.ok_or_else(missing)?,
                    c_t: [p.c_t[0].1, p.c_t[1].1],
                    c_f: [p.c_f[0].1, p.c_f[1].1],
                })
            })
            .collect()
    }

    /// Color each interval must carry under the construction.
    pub fn expected_colors(&self) -> Result<Vec<usize>, ReductionError> {
        match self.reduction {
            ReductionKind::Indset => self
                .roles
                .iter()
                .map(|rec| match rec.role {
                    Role::Occurrence { clause, .. } => Ok(clause),
                    _ => Err(ReductionError::MetaMismatch(
                        "non-occurrence role in an indset reduction".into(),
                    )),
                })
                .collect(),
            ReductionKind::Domset => {
                let mut colors = vec![0; self.roles.len()];
                for g in self.variable_gadgets()? {
                    let c = |slot| domset_color(g.var, slot);
                    colors[g.t1] = c(1);
                    colors[g.c_t[0]] = c(1);
                    colors[g.t2] = c(2);
                    colors[g.c_t[1]] = c(2);
                    colors[g.f1] = c(3);
                    colors[g.c_f[0]] = c(3);
                    colors[g.f2] = c(4);
                    colors[g.c_f[1]] = c(4);
                    colors[g.h_t] = c(5);
                    colors[g.h_f] = c(5);
                }
                Ok(colors)
            }
        }
    }

    /// Fails unless `inst` has one interval per role, each with the color
    /// the construction assigns.
    pub fn check_instance(&self, inst: &Instance) -> Result<(), ReductionError> {
        if inst.n() != self.roles.len() {
            return Err(ReductionError::MetaMismatch(format!(
                "instance has {} intervals, metadata has {} roles",
                inst.n(),
                self.roles.len()
            )));
        }
        let expected_k = match self.reduction {
            ReductionKind::Indset => self.num_clauses.max(1),
            ReductionKind::Domset => 5 * self.num_vars,
        };
        if inst.k() != expected_k {
            return Err(ReductionError::MetaMismatch(format!(
                "instance has k = {}, construction gives {expected_k}",
                inst.k()
            )));
        }
        for (id, color) in self.expected_colors()?.into_iter().enumerate() {
            if inst.color(id) != color {
                return Err(ReductionError::MetaMismatch(format!(
                    "interval {id} has color {}, role requires {color}",
                    inst.color(id)
                )));
            }
        }
        Ok(())
    }

    /// Edge set of the abstract gadget graph, derived from roles alone.
    pub fn gadget_edges(&self) -> Result<BTreeSet<(usize, usize)>, ReductionError> {
        let mut edges = BTreeSet::new();
        let mut add = |a: usize, b: usize| {
            edges.insert((a.min(b), a.max(b)));
        };
        match self.reduction {
            ReductionKind::Indset => {
                for a in &self.roles {
                    for b in &self.roles {
                        if let (
                            Role::Occurrence {
                                var: va,
                                positive: true,
                                ..
                            },
                            Role::Occurrence {
                                var: vb,
                                positive: false,
                                ..
                            },
                        ) = (a.role, b.role)
                        {
                            if va == vb {
                                add(a.id, b.id);
                            }
                        }
                    }
                }
            }
            ReductionKind::Domset => {
                for g in self.variable_gadgets()? {
                    add(g.h_t, g.t1);
                    add(g.h_t, g.t2);
                    add(g.h_f, g.f1);
                    add(g.h_f, g.f2);
                }
                let mut by_clause: Vec<Vec<usize>> = vec![Vec::new(); self.num_clauses];
                for rec in &self.roles {
                    if let Role::ClauseLiteral { clause, .. } = rec.role {
                        by_clause[clause - 1].push(rec.id);
                    }
                }
                for members in by_clause {
                    for (i, &a) in members.iter().enumerate() {
                        for &b in &members[i + 1..] {
                            add(a, b);
                        }
                    }
                }
            }
        }
        Ok(edges)
    }
}

fn require_flavor(phi: &CnfFormula, flavor: Flavor) -> Result<(), ReductionError> {
    if phi.satisfies(flavor) {
        Ok(())
    } else {
        Err(ReductionError::FlavorMismatch {
            expected: flavor,
            found: phi.flavor(),
        })
    }
}

/// 3-bounded 3SAT → 1-BIS on a proper interval graph with one color per clause.
///
/// Interval ids follow occurrence order (clause by clause). Each variable's
/// occurrences form one component at offset `100 * (var - 1)`:
/// a mixed-polarity pair is `[0,4],[2,6]`; a mixed triple is
/// `[0,4],[2,6],[5,9]` with the lone-polarity vertex in the middle;
/// occurrences of a single polarity are isolated at `[10j, 10j+4]`.
pub fn reduce_indset(phi: &CnfFormula) -> Result<(Instance, GadgetMetadata), ReductionError> {
    require_flavor(phi, Flavor::ThreeBounded)?;
    let mut roles = Vec::new();
    let mut per_var: Vec<Vec<(usize, bool)>> = vec![Vec::new(); phi.num_vars()];
    for (j, clause) in phi.clauses().iter().enumerate() {
        for &lit in clause {
            let var = lit.unsigned_abs() as usize;
            let id = roles.len();
            roles.push(RoleRecord {
                id,
                role: Role::Occurrence {
                    var,
                    clause: j + 1,
                    positive: lit > 0,
                },
            });
            per_var[var - 1].push((id, lit > 0));
        }
    }

    let mut intervals = Vec::with_capacity(roles.len());
    for (v, occ) in per_var.iter().enumerate() {
        let offset = COMPONENT_SPACING * v as Coord;
        let positives = occ.iter().filter(|o| o.1).count();
        let negatives = occ.len() - positives;
        let mut place = |id: usize, l: Coord, r: Coord, clause_color: usize| {
            intervals.push(Interval::new(id, offset + l, offset + r, clause_color));
        };
        let color_of = |id: usize| match roles[id].role {
            Role::Occurrence { clause, .. } => clause,
            _ => unreachable!(),
        };
        if positives > 0 && negatives > 0 {
            let minority = positives < negatives;
            let (lone, many): (Vec<_>, Vec<_>) = occ
                .iter()
                .copied()
                .partition(|o: &(usize, bool)| o.1 == minority);
            match (lone.as_slice(), many.as_slice()) {
                ([a], [b]) => {
                    place(a.0, 0, 4, color_of(a.0));
                    place(b.0, 2, 6, color_of(b.0));
                }
                ([mid], [a, b]) => {
                    place(a.0, 0, 4, color_of(a.0));
                    place(mid.0, 2, 6, color_of(mid.0));
                    place(b.0, 5, 9, color_of(b.0));
                }
                _ => unreachable!("3-bounded variables have at most three occurrences"),
            }
        } else {
            for (slot, &(id, _)) in occ.iter().enumerate() {
                let l = 10 * slot as Coord;
                place(id, l, l + 4, color_of(id));
            }
        }
    }

    // k >= 1 is required even for the empty formula.
    let k = phi.num_clauses().max(1);
    let inst = Instance::new(k, intervals, true).expect("layout is a valid proper instance");
    let meta = GadgetMetadata {
        reduction: ReductionKind::Indset,
        num_vars: phi.num_vars(),
        num_clauses: phi.num_clauses(),
        roles,
    };
    Ok((inst, meta))
}

/// 2P2N-3SAT → 1-BDS on a proper interval graph with five colors per variable.
///
/// Variable `i` owns ids `6(i-1)..6i` as `t1, h_t, t2, f1, h_f, f2`, laid out
/// as the paths `[0,4],[2,6],[5,9]` and `[10,14],[12,16],[15,19]` at offset
/// `100 * (i - 1)`. Clause vertices follow in clause order, each clause a
/// clique at its own offset: `[0,4]`, `[0,4],[2,6]` or `[0,4],[1,5],[2,6]`.
pub fn reduce_domset(phi: &CnfFormula) -> Result<(Instance, GadgetMetadata), ReductionError> {
    require_flavor(phi, Flavor::Tptn)?;
    let n = phi.num_vars();
    let mut roles = Vec::new();
    let mut intervals = Vec::new();
    for var in 1..=n {
        let offset = COMPONENT_SPACING * (var as Coord - 1);
        let gadget = [
            (Role::T1 { var }, 0, 4),
            (Role::HTrue { var }, 2, 6),
            (Role::T2 { var }, 5, 9),
            (Role::F1 { var }, 10, 14),
            (Role::HFalse { var }, 12, 16),
            (Role::F2 { var }, 15, 19),
        ];
        for (role, l, r) in gadget {
            let id = roles.len();
            roles.push(RoleRecord { id, role });
            // Colors are filled in once clause incidence is known.
            intervals.push(Interval::new(id, offset + l, offset + r, 1));
        }
    }
    const CLIQUES: [&[(Coord, Coord)]; 3] =
        [&[(0, 4)], &[(0, 4), (2, 6)], &[(0, 4), (1, 5), (2, 6)]];
    for (j, clause) in phi.clauses().iter().enumerate() {
        let offset = COMPONENT_SPACING * (n + j) as Coord;
        for (&lit, &(l, r)) in clause.iter().zip(CLIQUES[clause.len() - 1]) {
            let id = roles.len();
            roles.push(RoleRecord {
                id,
                role: Role::ClauseLiteral {
                    clause: j + 1,
                    var: lit.unsigned_abs() as usize,
                    positive: lit > 0,
                },
            });
            intervals.push(Interval::new(id, offset + l, offset + r, 1));
        }
    }
    let meta = GadgetMetadata {
        reduction: ReductionKind::Domset,
        num_vars: n,
        num_clauses: phi.num_clauses(),
        roles,
    };
    for (iv, color) in intervals.iter_mut().zip(meta.expected_colors()?) {
        iv.color = color;
    }
    let k = (5 * n).max(1);
    let inst = Instance::new(k, intervals, true).expect("layout is a valid proper instance");
    Ok((inst, meta))
}

fn require_kind(meta: &GadgetMetadata, kind: ReductionKind) -> Result<(), ReductionError> {
    if meta.reduction != kind {
        return Err(ReductionError::MetaMismatch(format!(
            "expected {kind:?} metadata, found {:?}",
            meta.reduction
        )));
    }
    Ok(())
}

pub(crate) fn require_valid(
    inst: &Instance,
    sol: &SolutionSet,
    kind: ProblemKind,
) -> Result<(), ReductionError> {
    let sol = sol.clone().with_kind(kind);
    let verdict = verify_solution(inst, &sol, 1)
        .map_err(|e| ReductionError::InvalidSolution(e.to_string()))?;
    match verdict.violations.first() {
        None => Ok(()),
        Some(v) => Err(ReductionError::InvalidSolution(v.to_string())),
    }
}

/// Reads an assignment off a 1-BIS of the indset instance: a variable is
/// true iff one of its positive occurrences is selected.
pub fn decode_indset(
    inst: &Instance,
    meta: &GadgetMetadata,
    sol: &SolutionSet,
) -> Result<Assignment, ReductionError> {
    require_kind(meta, ReductionKind::Indset)?;
    meta.check_instance(inst)?;
    // Without clauses there is nothing to balance (the single color is padding).
    if meta.num_clauses == 0 {
        return if sol.is_empty() {
            Ok(Assignment::all_false(meta.num_vars))
        } else {
            Err(ReductionError::InvalidSolution(
                "formula has no clauses".into(),
            ))
        };
    }
    require_valid(inst, sol, ProblemKind::Bis)?;
    let mut assignment = Assignment::all_false(meta.num_vars);
    for &id in sol.ids() {
        if let Role::Occurrence {
            var,
            positive: true,
            ..
        } = meta.role(id)
        {
            assignment.0[var - 1] = true;
        }
    }
    Ok(assignment)
}

/// Builds the 1-BIS that picks, per clause, the true literal with the
/// lowest variable index.
pub fn encode_indset_solution(
    inst: &Instance,
    meta: &GadgetMetadata,
    assignment: &Assignment,
) -> Result<SolutionSet, ReductionError> {
    require_kind(meta, ReductionKind::Indset)?;
    meta.check_instance(inst)?;
    check_assignment(meta, assignment)?;
    let mut pick: Vec<Option<(usize, usize)>> = vec![None; meta.num_clauses];
    for rec in &meta.roles {
        if let Role::Occurrence {
            var,
            clause,
            positive,
        } = rec.role
        {
            if assignment.value(var) == positive {
                let slot = &mut pick[clause - 1];
                if slot.is_none_or(|(v, _)| var < v) {
                    *slot = Some((var, rec.id));
                }
            }
        }
    }
    let ids = pick
        .into_iter()
        .map(|p| p.map(|(_, id)| id))
        .collect::<Option<Vec<_>>>()
        .ok_or(ReductionError::NotSatisfying)?;
    SolutionSet::new(ProblemKind::Bis, ids, inst)
        .map_err(|e| ReductionError::MetaMismatch(e.to_string()))
}

fn check_assignment(meta: &GadgetMetadata, assignment: &Assignment) -> Result<(), ReductionError> {
    if assignment.num_vars() != meta.num_vars {
        return Err(ReductionError::AssignmentLength {
            expected: meta.num_vars,
            found: assignment.num_vars(),
        });
    }
    if !meta.formula()?.evaluate(assignment) {
        return Err(ReductionError::NotSatisfying);
    }
    Ok(())
}

/// Canonicalizes a 1-BDS of the domset instance, then sets each variable
/// true iff its `h_t` is selected.
pub fn decode_domset(
    inst: &Instance,
    meta: &GadgetMetadata,
    sol: &SolutionSet,
) -> Result<Assignment, ReductionError> {
    let canonical = crate::bds::canonicalize_bds(inst, meta, sol)?;
    let mut assignment = Assignment::all_false(meta.num_vars);
    for g in meta.variable_gadgets()? {
        assignment.0[g.var - 1] = canonical.contains(g.h_t);
    }
    Ok(assignment)
}

/// The canonical 1-BDS of a satisfying assignment: `{h_t, f1, f2, c_t^1, c_t^2}`
/// for true variables and `{h_f, t1, t2, c_f^1, c_f^2}` for false ones.
pub fn encode_domset_solution(
    inst: &Instance,
    meta: &GadgetMetadata,
    assignment: &Assignment,
) -> Result<SolutionSet, ReductionError> {
    require_kind(meta, ReductionKind::Domset)?;
    meta.check_instance(inst)?;
    check_assignment(meta, assignment)?;
    let ids = meta.variable_gadgets()?.into_iter().flat_map(|g| {
        if assignment.value(g.var) {
            g.true_set()
        } else {
            g.false_set()
        }
    });
    SolutionSet::new(ProblemKind::Bds, ids, inst)
        .map_err(|e| ReductionError::MetaMismatch(e.to_string()))
}

/// Edges of the intersection graph, by pairwise comparison.
pub fn implied_edges(inst: &Instance) -> BTreeSet<(usize, usize)> {
    let ivs = inst.intervals();
    let mut edges = BTreeSet::new();
    for a in 0..ivs.len() {
        for b in a + 1..ivs.len() {
            if ivs[a].intersects(&ivs[b]) {
                edges.insert((a, b));
            }
        }
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::solve_fbis_dp;

    fn two_clause() -> CnfFormula {
        parse_dimacs("p cnf 2 2\n1 2 0\n-1 2 0\n").unwrap()
    }

    #[test]
    fn dimacs_examples() {
        let f = parse_dimacs("p cnf 1 1\n1 0\n").unwrap();
        assert_eq!(f.clauses(), &[vec![1]]);
        assert_eq!(f.flavor(), Flavor::General);
        assert_eq!(two_clause().flavor(), Flavor::ThreeBounded);

        let tptn = parse_dimacs("c two vars\np cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n").unwrap();
        assert_eq!(tptn.flavor(), Flavor::Tptn);
    }

    #[test]
    fn dimacs_errors() {
        assert!(matches!(
            parse_dimacs("p cnf x 1\n1 0\n"),
            Err(CnfError::Header { .. })
        ));
        assert!(matches!(
            parse_dimacs("1 0\n"),
            Err(CnfError::Header { .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 1 1\n2 0\n"),
            Err(CnfError::LiteralOutOfRange { literal: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 1 1\n0\n"),
            Err(CnfError::EmptyClause { clause: 1 })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 1 1\n1 -1 0\n"),
            Err(CnfError::RepeatedVariable { clause: 1, var: 1 })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 1 2\n1 0\n"),
            Err(CnfError::ClauseCount { .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 1 1\n1\n"),
            Err(CnfError::Unterminated)
        ));
        // Clauses may span lines.
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1\n2 0\n").unwrap().clauses(),
            &[vec![1, 2]]
        );
    }

    #[test]
    fn indset_example() {
        let (inst, meta) = reduce_indset(&two_clause()).unwrap();
        assert_eq!(inst.n(), 4);
        assert_eq!(inst.k(), 2);
        assert_eq!(
            meta.role(0),
            Role::Occurrence {
                var: 1,
                clause: 1,
                positive: true
            }
        );
        assert_eq!(
            meta.role(3),
            Role::Occurrence {
                var: 2,
                clause: 2,
                positive: true
            }
        );
        assert_eq!(implied_edges(&inst), BTreeSet::from([(0, 2)]));
        assert_eq!(implied_edges(&inst), meta.gadget_edges().unwrap());
        assert!(inst.is_geometrically_proper());
        let sol = solve_fbis_dp(&inst, 1).unwrap().unwrap();
        let a = decode_indset(&inst, &meta, &sol).unwrap();
        assert!(two_clause().evaluate(&a));
    }

    #[test]
    fn indset_decode_and_encode() {
        let phi = two_clause();
        let (inst, meta) = reduce_indset(&phi).unwrap();
        let sol = SolutionSet::new(ProblemKind::Bis, [1, 3], &inst).unwrap();
        let a = decode_indset(&inst, &meta, &sol).unwrap();
        assert_eq!(a, Assignment(vec![false, true]));
        assert!(phi.evaluate(&a));

        // Lowest variable index per clause: clause 2 prefers ¬x1.
        let enc = encode_indset_solution(&inst, &meta, &Assignment(vec![false, true])).unwrap();
        assert_eq!(enc.ids().iter().copied().collect::<Vec<_>>(), vec![1, 2]);
        let enc = encode_indset_solution(&inst, &meta, &Assignment(vec![true, true])).unwrap();
        assert_eq!(enc.ids().iter().copied().collect::<Vec<_>>(), vec![0, 3]);

        assert_eq!(
            encode_indset_solution(&inst, &meta, &Assignment(vec![true, false])).unwrap_err(),
            ReductionError::NotSatisfying
        );
        let bad = SolutionSet::new(ProblemKind::Bis, [0, 2], &inst).unwrap();
        assert!(matches!(
            decode_indset(&inst, &meta, &bad),
            Err(ReductionError::InvalidSolution(_))
        ));
    }

    #[test]
    fn unused_variable_contributes_nothing() {
        let phi = CnfFormula::new(3, vec![vec![1, 2], vec![-1, 2]]).unwrap();
        let (inst, meta) = reduce_indset(&phi).unwrap();
        assert_eq!(inst.n(), 4);
        assert!(meta.roles.iter().all(|r| r.role.var() != 3));
    }

    #[test]
    fn empty_formula() {
        let phi = CnfFormula::new(2, vec![]).unwrap();
        let (inst, meta) = reduce_indset(&phi).unwrap();
        assert_eq!(inst.n(), 0);
        let sol = SolutionSet::new(ProblemKind::Bis, [], &inst).unwrap();
        let a = decode_indset(&inst, &meta, &sol).unwrap();
        assert_eq!(a, Assignment::all_false(2));
        assert!(phi.evaluate(&a));
    }

    #[test]
    fn indset_layouts() {
        // x1 positive twice and negative once; x2 positive three times.
        let phi = CnfFormula::new(2, vec![vec![1, 2], vec![1, 2], vec![-1, 2]]).unwrap();
        let (inst, meta) = reduce_indset(&phi).unwrap();
        assert_eq!(implied_edges(&inst), meta.gadget_edges().unwrap());
        assert_eq!(implied_edges(&inst).len(), 2);
        // The lone negative occurrence of x1 sits in the middle.
        assert_eq!((inst.interval(4).left, inst.interval(4).right), (2, 6));
    }

    #[test]
    fn flavor_mismatch() {
        let phi = parse_dimacs("p cnf 1 1\n1 0\n").unwrap();
        assert!(matches!(
            reduce_indset(&phi),
            Err(ReductionError::FlavorMismatch { .. })
        ));
        assert!(matches!(
            reduce_domset(&two_clause()),
            Err(ReductionError::FlavorMismatch { .. })
        ));
    }

    #[test]
    fn domset_unit_clause_fixture() {
        let phi = CnfFormula::new(1, vec![vec![1], vec![1], vec![-1], vec![-1]]).unwrap();
        assert_eq!(phi.flavor(), Flavor::Tptn);
        let (inst, meta) = reduce_domset(&phi).unwrap();
        assert_eq!(inst.n(), 6 + 4);
        assert_eq!(inst.k(), 5);
        assert_eq!(implied_edges(&inst), meta.gadget_edges().unwrap());
        assert_eq!(implied_edges(&inst).len(), 4);
        let g = meta.variable_gadgets().unwrap()[0];
        assert_eq!(g.c_t, [6, 7]);
        assert_eq!(g.c_f, [8, 9]);
        assert_eq!(inst.color(g.t1), inst.color(g.c_t[0]));
        assert_eq!(inst.color(g.h_t), inst.color(g.h_f));
        // (x)(x)(¬x)(¬x) is unsatisfiable.
        assert!(encode_domset_solution(&inst, &meta, &Assignment(vec![true])).is_err());
    }

    #[test]
    fn domset_counts_with_full_clauses() {
        // 3 variables, 4 clauses of three literals: 6n + 3m vertices, 4n + 3m edges.
        let phi = CnfFormula::new(
            3,
            vec![
                vec![1, 2, 3],
                vec![1, -2, -3],
                vec![-1, 2, 3],
                vec![-1, -2, -3],
            ],
        )
        .unwrap();
        let (inst, meta) = reduce_domset(&phi).unwrap();
        assert_eq!(inst.n(), 6 * 3 + 3 * 4);
        assert_eq!(implied_edges(&inst).len(), 4 * 3 + 3 * 4);
        assert_eq!(inst.edge_count(), 4 * 3 + 3 * 4);
        assert_eq!(implied_edges(&inst), meta.gadget_edges().unwrap());
        let a = Assignment(vec![true, true, false]);
        let enc = encode_domset_solution(&inst, &meta, &a).unwrap();
        assert_eq!(enc.len(), 15);
        assert!(verify_solution(&inst, &enc, 1).unwrap().valid);
        assert_eq!(decode_domset(&inst, &meta, &enc).unwrap(), a);
    }

    #[test]
    fn metadata_json_round_trip() {
        let phi = CnfFormula::new(1, vec![vec![1], vec![1], vec![-1], vec![-1]]).unwrap();
        let (inst, meta) = reduce_domset(&phi).unwrap();
        let json = meta.to_json();
        assert!(json.contains("\"role\": \"h_t\""));
        let back = GadgetMetadata::from_json(&json).unwrap();
        assert_eq!(back, meta);
        back.check_instance(&inst).unwrap();
        assert_eq!(back.formula().unwrap(), phi);
    }

    #[test]
    fn assignment_files() {
        let a = Assignment(vec![true, false, true]);
        assert_eq!(a.to_text(), "x1=1\nx2=0\nx3=1\n");
        assert_eq!(parse_assignment(&a.to_text(), 3).unwrap(), a);
        assert_eq!(
            parse_assignment("x2=1\n", 2).unwrap(),
            Assignment(vec![false, true])
        );
        assert!(parse_assignment("x3=1\n", 2).is_err());
        assert!(parse_assignment("x1=2\n", 2).is_err());
        assert!(parse_assignment("x1=1\nx1=0\n", 2).is_err());
    }
}
