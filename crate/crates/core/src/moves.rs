//! Blow-ups, blow-downs and the composite contractions, with reduction to
//! standard form.
//!
//! Parity bookkeeping: blowing up a point of a curve flips that curve's
//! parity and creates an odd curve; blowing down an odd curve flips every
//! curve through the contracted point. The composite moves below are the net
//! effect of those two rules (checked against step-by-step composition in the
//! tests).

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::gf2;
use crate::graph::{DualGraph, GraphError, Parity};
use crate::invariants;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    /// Blow up the intersection point of two exceptional curves.
    BlowUpEdge(String, String),
    /// Blow up a generic point of one exceptional curve.
    BlowUpFree(String),
    /// Blow up where a branch meets its exceptional curve.
    BlowUpBranch(String),
    C1(String),
    C2(String),
    C3(String, String),
    /// `M1(q, v)`: a Q vertex `q` on an odd vertex `v`.
    M1(String, String),
}

impl Move {
    pub fn is_blow_up(&self) -> bool {
        matches!(self, Move::BlowUpEdge(..) | Move::BlowUpFree(_) | Move::BlowUpBranch(_))
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::BlowUpEdge(a, b) => write!(f, "blowup-edge {a} {b}"),
            Move::BlowUpFree(v) => write!(f, "blowup-free {v}"),
            Move::BlowUpBranch(b) => write!(f, "blowup-branch {b}"),
            Move::C1(v) => write!(f, "C1 {v}"),
            Move::C2(v) => write!(f, "C2 {v}"),
            Move::C3(v, w) => write!(f, "C3 {v} {w}"),
            Move::M1(q, v) => write!(f, "M1 {q} {v}"),
        }
    }
}

impl FromStr for Move {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let w: Vec<&str> = s.split_whitespace().collect();
        let own = |x: &str| x.to_string();
        Ok(match w.as_slice() {
            ["blowup-edge", a, b] => Move::BlowUpEdge(own(a), own(b)),
            ["blowup-free", v] => Move::BlowUpFree(own(v)),
            ["blowup-branch", b] => Move::BlowUpBranch(own(b)),
            ["C1", v] => Move::C1(own(v)),
            ["C2", v] => Move::C2(own(v)),
            ["C3", v, u] => Move::C3(own(v), own(u)),
            ["M1", q, v] => Move::M1(own(q), own(v)),
            _ => return Err(format!("unrecognized move `{s}`")),
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("{mv} not applicable: {reason}")]
    NotApplicable { mv: Move, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph is not smoothly contractible")]
    NotContractible,
    #[error("internal error: {0}")]
    Internal(String),
}

/// A Γ* neighbor of a vertex: another exceptional curve or a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Neighbor {
    Vertex(usize),
    Branch(usize),
}

fn star_neighbors(g: &DualGraph, v: usize) -> Vec<Neighbor> {
    let mut out: Vec<Neighbor> = g.neighbors(v).into_iter().map(Neighbor::Vertex).collect();
    out.extend(g.branches_at(v).into_iter().map(Neighbor::Branch));
    out
}

fn not_applicable(mv: &Move, reason: impl Into<String>) -> MoveError {
    MoveError::NotApplicable { mv: mv.clone(), reason: reason.into() }
}

/// Joins two former neighbors of deleted curves: an edge between two
/// vertices, re-attachment of a branch, or two branches set free.
fn join(g: &mut DualGraph, a: Neighbor, b: Neighbor) {
    match (a, b) {
        (Neighbor::Vertex(x), Neighbor::Vertex(y)) => g.edges.push((x, y)),
        (Neighbor::Vertex(x), Neighbor::Branch(br)) | (Neighbor::Branch(br), Neighbor::Vertex(x)) => {
            g.branches[br].attach = Some(x)
        }
        (Neighbor::Branch(p), Neighbor::Branch(q)) => {
            g.branches[p].attach = None;
            g.branches[q].attach = None;
        }
    }
}

/// Applies one move, checking its applicability predicate.
pub fn apply(g: &DualGraph, mv: &Move) -> Result<DualGraph, MoveError> {
    let mut h = g.clone();
    match mv {
        Move::BlowUpEdge(a, b) => {
            let (ia, ib) = (h.require_vertex(a)?, h.require_vertex(b)?);
            if ia == ib || !h.has_edge(ia, ib) {
                return Err(not_applicable(mv, format!("no edge {a}-{b}")));
            }
            let id = h.fresh_vertex_id();
            let x = h.add_vertex(&id, Parity::Odd)?;
            h.remove_edge(ia, ib);
            h.edges.push((ia, x));
            h.edges.push((x, ib));
            h.flip(ia);
            h.flip(ib);
        }
        Move::BlowUpFree(v) => {
            let iv = h.require_vertex(v)?;
            let id = h.fresh_vertex_id();
            let x = h.add_vertex(&id, Parity::Odd)?;
            h.edges.push((iv, x));
            h.flip(iv);
        }
        Move::BlowUpBranch(b) => {
            let ib = h.require_branch(b)?;
            let Some(iv) = h.branches[ib].attach else {
                return Err(not_applicable(mv, format!("branch {b} is free")));
            };
            let id = h.fresh_vertex_id();
            let w = h.add_vertex(&id, Parity::Odd)?;
            h.edges.push((iv, w));
            h.branches[ib].attach = Some(w);
            h.flip(iv);
        }
        Move::C1(v) => {
            let iv = h.require_vertex(v)?;
            if !h.parity(iv).is_odd() {
                return Err(not_applicable(mv, format!("{v} is even")));
            }
            let nbrs = star_neighbors(&h, iv);
            // Valency 0 only happens for a lone odd curve with no branches
            // (the final contraction down to the empty graph).
            match nbrs.as_slice() {
                [] | [Neighbor::Branch(_)] => {}
                [Neighbor::Vertex(u)] => h.flip(*u),
                _ => return Err(not_applicable(mv, format!("{v} has valency {} in the extended graph", nbrs.len()))),
            }
            h.remove_vertices(&[iv]);
        }
        Move::C2(v) => {
            let iv = h.require_vertex(v)?;
            if !h.parity(iv).is_odd() {
                return Err(not_applicable(mv, format!("{v} is even")));
            }
            let nbrs = star_neighbors(&h, iv);
            let [a, b] = nbrs[..] else {
                return Err(not_applicable(mv, format!("{v} has valency {} in the extended graph", nbrs.len())));
            };
            for n in [a, b] {
                if let Neighbor::Vertex(u) = n {
                    h.flip(u);
                }
            }
            join(&mut h, a, b);
            h.remove_vertices(&[iv]);
        }
        Move::C3(v, w) => {
            let (iv, iw) = (h.require_vertex(v)?, h.require_vertex(w)?);
            if iv == iw || !h.has_edge(iv, iw) {
                return Err(not_applicable(mv, format!("{v} and {w} are not adjacent")));
            }
            let mut outer = Vec::new();
            for (x, other) in [(iv, iw), (iw, iv)] {
                if !h.parity(x).is_even() {
                    return Err(not_applicable(mv, format!("{} is odd", h.vertex_id(x))));
                }
                let nbrs = star_neighbors(&h, x);
                if nbrs.len() > 2 {
                    return Err(not_applicable(mv, format!("{} has valency {} in the extended graph", h.vertex_id(x), nbrs.len())));
                }
                outer.push(nbrs.into_iter().find(|n| *n != Neighbor::Vertex(other)));
            }
            if let [Some(a), Some(b)] = outer[..] {
                join(&mut h, a, b);
            }
            h.remove_vertices(&[iv, iw]);
        }
        Move::M1(q, v) => {
            let (iq, iv) = (h.require_vertex(q)?, h.require_vertex(v)?);
            if !h.is_q(iq) {
                return Err(not_applicable(mv, format!("{q} is not a Q vertex")));
            }
            if !h.has_edge(iq, iv) {
                return Err(not_applicable(mv, format!("{q} is not attached to {v}")));
            }
            if !h.parity(iv).is_odd() {
                return Err(not_applicable(mv, format!("{v} is even")));
            }
            h.flip(iv);
        }
    }
    if !h.is_valid() {
        return Err(MoveError::Internal(format!("{mv} produced an invalid graph")));
    }
    Ok(h)
}

/// Every blow-up that can be applied to `g`, in a fixed order.
pub fn blow_ups(g: &DualGraph) -> Vec<Move> {
    let mut out = Vec::new();
    for &(a, b) in g.edges() {
        out.push(Move::BlowUpEdge(g.vertex_id(a).to_string(), g.vertex_id(b).to_string()));
    }
    for v in g.vertices() {
        out.push(Move::BlowUpFree(v.id.clone()));
    }
    for b in g.branches() {
        if b.attach.is_some() {
            out.push(Move::BlowUpBranch(b.id.clone()));
        }
    }
    out
}

/// Applicable C1/C2/C3 moves, visiting vertices in `order`.
fn contractions_in(g: &DualGraph, order: &[usize]) -> Vec<Move> {
    let mut pos = vec![0; g.vertex_count()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let val: Vec<usize> = (0..g.vertex_count()).map(|v| g.valency_of(v, true)).collect();
    let mut out = Vec::new();
    for &v in order {
        let id = g.vertex_id(v).to_string();
        if g.parity(v).is_odd() {
            match val[v] {
                0 | 1 => out.push(Move::C1(id)),
                2 => out.push(Move::C2(id)),
                _ => {}
            }
        } else if val[v] <= 2 {
            let mut nbrs = g.neighbors(v);
            nbrs.sort_by_key(|&w| pos[w]);
            for w in nbrs {
                if g.parity(w).is_even() && val[w] <= 2 && pos[v] < pos[w] {
                    out.push(Move::C3(id.clone(), g.vertex_id(w).to_string()));
                }
            }
        }
    }
    out
}

fn m1_moves_in(g: &DualGraph, order: &[usize]) -> Vec<Move> {
    let mut out = Vec::new();
    for &q in order {
        if g.is_q(q) {
            if let [v] = g.neighbors(q)[..] {
                if g.parity(v).is_odd() {
                    out.push(Move::M1(g.vertex_id(q).to_string(), g.vertex_id(v).to_string()));
                }
            }
        }
    }
    out
}

/// Every applicable C1, C2, C3 and M1 move.
pub fn contractions(g: &DualGraph) -> Vec<Move> {
    let order: Vec<usize> = (0..g.vertex_count()).collect();
    let mut out = contractions_in(g, &order);
    out.extend(m1_moves_in(g, &order));
    out
}

/// True when none of C1, C2, C3, M1 applies.
pub fn is_reduced(g: &DualGraph) -> bool {
    contractions(g).is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub mv: Move,
    /// Labelled canonical code of the graph after the move.
    pub code: String,
}

/// A replayable sequence of moves.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MoveTrace {
    pub steps: Vec<TraceStep>,
}

impl MoveTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub(crate) fn push(&mut self, mv: Move, after: &DualGraph) {
        self.steps.push(TraceStep { mv, code: after.canonical_code(true) });
    }

    pub fn parse(text: &str) -> Result<MoveTrace, String> {
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (mv_text, code) = match line.split_once(" code=") {
                Some((m, c)) => (m, c.trim().to_string()),
                None => (line, String::new()),
            };
            let mv = mv_text.parse::<Move>().map_err(|e| format!("line {}: {e}", i + 1))?;
            steps.push(TraceStep { mv, code });
        }
        Ok(MoveTrace { steps })
    }
}

impl fmt::Display for MoveTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{} code={}", s.mv, s.code)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("step {step}: {source}")]
    Move { step: usize, source: MoveError },
    #[error("step {step}: code mismatch (expected {expected}, got {actual})")]
    CodeMismatch { step: usize, expected: String, actual: String },
}

/// Replays a trace, checking each recorded code (steps are numbered from 1;
/// an empty recorded code is not checked).
pub fn replay(g: &DualGraph, trace: &MoveTrace) -> Result<DualGraph, ReplayError> {
    let mut cur = g.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        cur = apply(&cur, &step.mv).map_err(|source| ReplayError::Move { step: i + 1, source })?;
        if !step.code.is_empty() {
            let actual = cur.canonical_code(true);
            if actual != step.code {
                return Err(ReplayError::CodeMismatch { step: i + 1, expected: step.code.clone(), actual });
            }
        }
    }
    Ok(cur)
}

fn step_budget(g: &DualGraph) -> usize {
    4 * (g.vertex_count() + 1) * (g.vertex_count() + 1) + 16
}

fn check_reducible(g: &DualGraph) -> Result<(), MoveError> {
    g.ensure_valid()?;
    if !gf2::intersection_matrix(g).det() {
        return Err(MoveError::NotContractible);
    }
    Ok(())
}

/// Contracts with C1/C2/C3 until none applies, then applies M1, repeating
/// until nothing applies. At each step the move at the smallest canonical
/// vertex position is taken.
pub fn reduce(g: &DualGraph) -> Result<(DualGraph, MoveTrace), MoveError> {
    check_reducible(g)?;
    reduce_by(g, |h| {
        let order = h.canonical_order(true);
        contractions_in(h, &order)
            .into_iter()
            .next()
            .or_else(|| m1_moves_in(h, &order).into_iter().next())
    })
}

/// As [`reduce`], but each step picks a uniformly random applicable move
/// (contractions before M1).
pub fn reduce_random<R: Rng>(g: &DualGraph, rng: &mut R) -> Result<(DualGraph, MoveTrace), MoveError> {
    check_reducible(g)?;
    reduce_by(g, |h| {
        let order: Vec<usize> = (0..h.vertex_count()).collect();
        let c = contractions_in(h, &order);
        let pool = if c.is_empty() { m1_moves_in(h, &order) } else { c };
        pool.choose(rng).cloned()
    })
}

fn reduce_by(
    g: &DualGraph,
    mut pick: impl FnMut(&DualGraph) -> Option<Move>,
) -> Result<(DualGraph, MoveTrace), MoveError> {
    let budget = step_budget(g);
    let mut cur = g.clone();
    let mut trace = MoveTrace::default();
    while let Some(mv) = pick(&cur) {
        if trace.len() >= budget {
            return Err(MoveError::Internal(format!("reduction exceeded {budget} steps")));
        }
        cur = apply(&cur, &mv)?;
        trace.push(mv, &cur);
    }
    Ok((cur, trace))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StandardProperty {
    P1,
    P2,
    P3,
    P4,
}

impl fmt::Display for StandardProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Checks the four standard-form properties; returns the violated ones.
pub fn is_standard(g: &DualGraph) -> Result<(bool, Vec<StandardProperty>), MoveError> {
    check_reducible(g)?;
    if g.branch_count() == 0 {
        return Err(GraphError::Invalid(vec!["standard forms need at least one branch".into()]).into());
    }
    let mut violated = Vec::new();
    let n = g.vertex_count();
    let special: Vec<bool> = (0..n).map(|v| g.is_special(v)).collect();
    let adj = g.adjacency();

    if (0..n).any(|v| !special[v] && g.parity(v).is_odd()) {
        violated.push(StandardProperty::P1);
    }
    let p2 = (0..n).any(|v| special[v] && g.parity(v).is_odd() && adj[v].iter().any(|&w| g.is_q(w)));
    if p2 {
        violated.push(StandardProperty::P2);
    }
    // Walk every segment leaving a special vertex through non-special ones.
    let mut p3 = false;
    for s in (0..n).filter(|&v| special[v]) {
        for &first in &adj[s] {
            let (mut prev, mut cur, mut inner) = (s, first, 0usize);
            while !special[cur] {
                inner += 1;
                let Some(&next) = adj[cur].iter().find(|&&w| w != prev) else { break };
                prev = cur;
                cur = next;
            }
            if special[cur] && inner > 1 {
                p3 = true;
            }
        }
    }
    if p3 {
        violated.push(StandardProperty::P3);
    }
    let mu_prime = invariants::mu_prime(g).map_err(MoveError::Graph)?;
    if g.q_count() != mu_prime {
        violated.push(StandardProperty::P4);
    }
    Ok((violated.is_empty(), violated))
}
