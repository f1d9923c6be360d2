//! Bounded search for equivalences between dual graphs.
//!
//! From each graph we explore every state reachable by contractions (C1, C2,
//! C3, M1, free) and at most `depth` blow-ups, deduplicating states by their
//! branch-unlabelled canonical code. Two graphs are certified equivalent when
//! their explored sets meet; the certificate is a pair of replayable traces
//! ending in isomorphic graphs. A failed search proves nothing.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::gf2;
use crate::graph::DualGraph;
use crate::moves::{self, Move, MoveError, MoveTrace};

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Blow-ups allowed along each side's path.
    pub depth: usize,
    /// Cap on explored states per side.
    pub node_budget: usize,
}

impl SearchConfig {
    pub fn new(depth: usize) -> Self {
        SearchConfig { depth, node_budget: DEFAULT_NODE_BUDGET }
    }
}

#[derive(Debug, Clone)]
struct Node {
    parent: usize,
    mv: Option<Move>,
    cost: usize,
    steps: usize,
}

/// The states reachable from one graph, grown one blow-up layer at a time.
#[derive(Debug, Clone)]
pub struct Reachable {
    root: DualGraph,
    index: HashMap<String, usize>,
    nodes: Vec<Node>,
    /// Graphs of the most recent layer, which seed the next blow-ups.
    layer: Vec<(usize, DualGraph)>,
    depth: usize,
    budget: usize,
    truncated: bool,
}

type Expansion = Vec<(Move, DualGraph, String)>;

fn expand(g: &DualGraph, with: fn(&DualGraph) -> Vec<Move>) -> Expansion {
    with(g)
        .into_iter()
        .filter_map(|mv| {
            let h = moves::apply(g, &mv).ok()?;
            let code = h.canonical_code(false);
            Some((mv, h, code))
        })
        .collect()
}

impl Reachable {
    pub fn new(root: &DualGraph, budget: usize) -> Self {
        let mut r = Reachable {
            root: root.clone(),
            index: HashMap::new(),
            nodes: Vec::new(),
            layer: Vec::new(),
            depth: 0,
            budget,
            truncated: false,
        };
        r.index.insert(root.canonical_code(false), 0);
        r.nodes.push(Node { parent: usize::MAX, mv: None, cost: 0, steps: 0 });
        let seed = vec![(0, root.clone())];
        r.layer = r.close(seed);
        r
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Whether the node budget cut the exploration short.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn contains(&self, code: &str) -> bool {
        self.index.contains_key(code)
    }

    pub fn codes(&self) -> impl Iterator<Item = &String> {
        self.index.keys()
    }

    fn insert(&mut self, parent: usize, mv: Move, code: String, cost: usize) -> Option<usize> {
        if self.index.contains_key(&code) {
            return None;
        }
        if self.nodes.len() >= self.budget {
            self.truncated = true;
            return None;
        }
        let id = self.nodes.len();
        let steps = self.nodes[parent].steps + 1;
        self.nodes.push(Node { parent, mv: Some(mv), cost, steps });
        self.index.insert(code, id);
        Some(id)
    }

    /// Closes a set of same-cost states under contractions; returns the
    /// whole layer.
    fn close(&mut self, seed: Vec<(usize, DualGraph)>) -> Vec<(usize, DualGraph)> {
        let mut layer = seed.clone();
        let mut frontier = seed;
        while !frontier.is_empty() {
            let children: Vec<Expansion> =
                frontier.par_iter().map(|(_, g)| expand(g, moves::contractions)).collect();
            let mut next = Vec::new();
            for ((parent, _), kids) in frontier.iter().zip(children) {
                for (mv, h, code) in kids {
                    let cost = self.nodes[*parent].cost;
                    if let Some(id) = self.insert(*parent, mv, code, cost) {
                        next.push((id, h));
                    }
                }
            }
            layer.extend(next.iter().cloned());
            frontier = next;
        }
        layer
    }

    /// Explores one more blow-up layer.
    pub fn grow(&mut self) {
        let cost = self.depth + 1;
        let children: Vec<Expansion> =
            self.layer.par_iter().map(|(_, g)| expand(g, moves::blow_ups)).collect();
        let mut seed = Vec::new();
        let layer = std::mem::take(&mut self.layer);
        for ((parent, _), kids) in layer.iter().zip(children) {
            for (mv, h, code) in kids {
                if let Some(id) = self.insert(*parent, mv, code, cost) {
                    seed.push((id, h));
                }
            }
        }
        self.layer = self.close(seed);
        self.depth = cost;
    }

    pub fn grow_to(&mut self, depth: usize) {
        while self.depth < depth {
            self.grow();
        }
    }

    /// Blow-ups used on the cheapest known path to `code`.
    pub fn cost_of(&self, code: &str) -> Option<usize> {
        self.index.get(code).map(|&i| self.nodes[i].cost)
    }

    fn steps_to(&self, code: &str) -> usize {
        self.index.get(code).map_or(0, |&i| self.nodes[i].steps)
    }

    /// Replayable trace from the root to the state with this code.
    pub fn trace_to(&self, code: &str) -> Option<(MoveTrace, DualGraph)> {
        let mut id = *self.index.get(code)?;
        let mut path = Vec::new();
        while let Some(mv) = &self.nodes[id].mv {
            path.push(mv.clone());
            id = self.nodes[id].parent;
        }
        path.reverse();
        let mut cur = self.root.clone();
        let mut trace = MoveTrace::default();
        for mv in path {
            cur = moves::apply(&cur, &mv).expect("recorded moves replay");
            trace.push(mv, &cur);
        }
        Some((trace, cur))
    }

    /// The best common state: least total cost, then fewest moves, then
    /// smallest code.
    pub fn meet<'a>(&'a self, other: &'a Reachable) -> Option<&'a str> {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small
            .index
            .keys()
            .filter(|c| large.contains(c))
            .min_by_key(|c| {
                let cost = self.cost_of(c).unwrap_or(0) + other.cost_of(c).unwrap_or(0);
                (cost, self.steps_to(c) + other.steps_to(c), c.as_str())
            })
            .map(String::as_str)
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub left: MoveTrace,
    pub right: MoveTrace,
    /// The common graph, as reached from the left.
    pub meeting: DualGraph,
    /// Search depth at which the meeting was found.
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Equivalent(Witness),
    Unknown,
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent(_))
    }
}

fn check_input(g: &DualGraph) -> Result<(), MoveError> {
    g.ensure_valid()?;
    if !gf2::intersection_matrix(g).det() {
        return Err(MoveError::NotContractible);
    }
    Ok(())
}

/// Searches with increasing depth up to `config.depth`.
pub fn equivalent(g1: &DualGraph, g2: &DualGraph, config: SearchConfig) -> Result<Verdict, MoveError> {
    check_input(g1)?;
    check_input(g2)?;
    if g1.branch_count() != g2.branch_count() {
        return Ok(Verdict::Unknown);
    }
    let mut left = Reachable::new(g1, config.node_budget);
    let mut right = Reachable::new(g2, config.node_budget);
    loop {
        if let Some(code) = left.meet(&right) {
            let (lt, meeting) = left.trace_to(code).expect("code is in left");
            let (rt, _) = right.trace_to(code).expect("code is in right");
            return Ok(Verdict::Equivalent(Witness { left: lt, right: rt, meeting, depth: left.depth() }));
        }
        if left.depth() >= config.depth {
            return Ok(Verdict::Unknown);
        }
        left.grow();
        right.grow();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_graph;

    fn g(text: &str) -> DualGraph {
        parse_graph(text).unwrap()
    }

    const CUSP: &str = "vertex E1 odd\nvertex E2 even\nvertex E3 odd\nedge E1 E3\nedge E2 E3\nbranch C1 E3\n";

    #[test]
    fn identical_graphs() {
        let a = g(CUSP);
        match equivalent(&a, &a, SearchConfig::new(2)).unwrap() {
            Verdict::Equivalent(w) => {
                assert!(w.left.is_empty() && w.right.is_empty());
                assert_eq!(w.depth, 0);
            }
            Verdict::Unknown => panic!("g ~ g"),
        }
    }

    #[test]
    fn cusp_meets_line_at_depth_zero() {
        let line = g("freebranch C1\n");
        let Verdict::Equivalent(w) = equivalent(&g(CUSP), &line, SearchConfig::new(0)).unwrap() else {
            panic!("reduction alone suffices");
        };
        assert_eq!(w.depth, 0);
        let end = moves::replay(&g(CUSP), &w.left).unwrap();
        assert!(end.is_isomorphic(&moves::replay(&line, &w.right).unwrap(), false));
    }

    #[test]
    fn different_mu_prime_stays_unknown() {
        let a = g("vertex c odd\nbranch b1 c\nbranch b2 c\nbranch b3 c\n");
        let b = g("vertex c even\nvertex q even\nedge c q\nbranch b1 c\nbranch b2 c\nbranch b3 c\n");
        assert!(!equivalent(&a, &b, SearchConfig::new(2)).unwrap().is_equivalent());
    }

    #[test]
    fn parity_variant_of_two_vertex_trunk() {
        let odd = g("vertex a odd\nvertex b even\nedge a b\nbranch b1 a\nbranch b2 a\nbranch b3 b\n");
        let even = g("vertex a even\nvertex b even\nedge a b\nbranch b1 a\nbranch b2 a\nbranch b3 b\n");
        let Verdict::Equivalent(w) = equivalent(&odd, &even, SearchConfig::new(1)).unwrap() else {
            panic!("one blow-up joins them");
        };
        let l = moves::replay(&odd, &w.left).unwrap();
        let r = moves::replay(&even, &w.right).unwrap();
        assert!(l.is_isomorphic(&r, false));
    }

    #[test]
    fn exploration_is_deterministic() {
        let a = g(CUSP);
        let mut r1 = Reachable::new(&a, 10_000);
        let mut r2 = Reachable::new(&a, 10_000);
        r1.grow_to(2);
        r2.grow_to(2);
        assert_eq!(r1.len(), r2.len());
        let mut c1: Vec<_> = r1.codes().cloned().collect();
        let mut c2: Vec<_> = r2.codes().cloned().collect();
        c1.sort();
        c2.sort();
        assert_eq!(c1, c2);
    }

    #[test]
    fn budget_truncates() {
        let mut r = Reachable::new(&g(CUSP), 5);
        r.grow_to(3);
        assert!(r.truncated());
        assert!(r.len() <= 5);
    }
}
