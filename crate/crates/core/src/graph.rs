//! Dual graphs of good resolutions: the compact tree of exceptional curves
//! with mod-2 self-intersections, plus the strict-transform branches hanging
//! off it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Self-intersection number of an exceptional curve, modulo 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn is_even(self) -> bool {
        self == Parity::Even
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }

    fn code_char(self) -> char {
        match self {
            Parity::Even => 'e',
            Parity::Odd => 'o',
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Parity {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(GraphError::BadParity(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown branch `{0}`")]
    UnknownBranch(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate branch `{0}`")]
    DuplicateBranch(String),
    #[error("invalid identifier `{0}` (letters, digits and underscore only)")]
    BadIdentifier(String),
    #[error("parity must be `even` or `odd`, got `{0}`")]
    BadParity(String),
    #[error("invalid graph: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

pub(crate) fn check_identifier(id: &str) -> Result<(), GraphError> {
    if !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        Ok(())
    } else {
        Err(GraphError::BadIdentifier(id.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub parity: Parity,
}

/// A strict-transform component. `attach == None` marks a free branch: one
/// that no longer meets any exceptional curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub id: String,
    pub attach: Option<usize>,
}

/// Weighted dual graph Γ together with its branch attachments (Γ*).
///
/// Vertices, edges and branches are stored by index; ids are opaque tokens
/// used for I/O and for naming move targets. Structural invariants (tree,
/// no loops, ...) are not enforced on construction, see [`DualGraph::validate`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DualGraph {
    pub(crate) vertices: Vec<Vertex>,
    pub(crate) edges: Vec<(usize, usize)>,
    pub(crate) branches: Vec<Branch>,
}

/// One failed structural invariant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexClass {
    Q,
    Extremal,
    Special,
    Ordinary,
}

impl fmt::Display for VertexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VertexClass::Q => "Q",
            VertexClass::Extremal => "extremal",
            VertexClass::Special => "special",
            VertexClass::Ordinary => "ordinary",
        })
    }
}

impl DualGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: &str, parity: Parity) -> Result<usize, GraphError> {
        check_identifier(id)?;
        if self.vertex_index(id).is_some() {
            return Err(GraphError::DuplicateVertex(id.to_string()));
        }
        self.vertices.push(Vertex { id: id.to_string(), parity });
        Ok(self.vertices.len() - 1)
    }

    /// Adds an edge between two existing vertices. Loops and repeated edges
    /// are accepted here and reported by `validate`.
    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<(), GraphError> {
        let ia = self.require_vertex(a)?;
        let ib = self.require_vertex(b)?;
        self.edges.push((ia, ib));
        Ok(())
    }

    pub fn add_branch(&mut self, id: &str, vertex: &str) -> Result<(), GraphError> {
        check_identifier(id)?;
        let v = self.require_vertex(vertex)?;
        if self.branch_index(id).is_some() {
            return Err(GraphError::DuplicateBranch(id.to_string()));
        }
        self.branches.push(Branch { id: id.to_string(), attach: Some(v) });
        Ok(())
    }

    pub fn add_free_branch(&mut self, id: &str) -> Result<(), GraphError> {
        check_identifier(id)?;
        if self.branch_index(id).is_some() {
            return Err(GraphError::DuplicateBranch(id.to_string()));
        }
        self.branches.push(Branch { id: id.to_string(), attach: None });
        Ok(())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Total number of branches, attached or free.
    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn free_branches(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| b.attach.is_none())
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn branch_index(&self, id: &str) -> Option<usize> {
        self.branches.iter().position(|b| b.id == id)
    }

    pub(crate) fn require_vertex(&self, id: &str) -> Result<usize, GraphError> {
        self.vertex_index(id).ok_or_else(|| GraphError::UnknownVertex(id.to_string()))
    }

    pub(crate) fn require_branch(&self, id: &str) -> Result<usize, GraphError> {
        self.branch_index(id).ok_or_else(|| GraphError::UnknownBranch(id.to_string()))
    }

    pub fn parity(&self, v: usize) -> Parity {
        self.vertices[v].parity
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v].id
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            if a != b {
                adj[b].push(a);
            }
        }
        adj
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.iter().any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    /// Branches attached at `v`, as branch indices.
    pub fn branches_at(&self, v: usize) -> Vec<usize> {
        self.branches
            .iter()
            .enumerate()
            .filter(|(_, b)| b.attach == Some(v))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn branch_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.vertices.len()];
        for b in &self.branches {
            if let Some(v) = b.attach {
                counts[v] += 1;
            }
        }
        counts
    }

    fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum()
    }

    /// Valency of vertex index `v` in Γ, or in Γ* when `extended`.
    pub fn valency_of(&self, v: usize, extended: bool) -> usize {
        let mut val = self.degree(v);
        if extended {
            val += self.branches.iter().filter(|b| b.attach == Some(v)).count();
        }
        val
    }

    pub fn valency(&self, id: &str, extended: bool) -> Result<usize, GraphError> {
        Ok(self.valency_of(self.require_vertex(id)?, extended))
    }

    pub fn class_of(&self, v: usize) -> VertexClass {
        let ext = self.valency_of(v, true);
        if ext >= 3 {
            VertexClass::Special
        } else if ext == 1 && self.parity(v).is_even() {
            VertexClass::Q
        } else if self.valency_of(v, false) == 1 {
            VertexClass::Extremal
        } else {
            VertexClass::Ordinary
        }
    }

    pub fn classify_vertex(&self, id: &str) -> Result<VertexClass, GraphError> {
        Ok(self.class_of(self.require_vertex(id)?))
    }

    pub fn is_q(&self, v: usize) -> bool {
        self.parity(v).is_even() && self.valency_of(v, true) == 1
    }

    pub fn is_special(&self, v: usize) -> bool {
        self.valency_of(v, true) >= 3
    }

    pub fn q_count(&self) -> usize {
        (0..self.vertices.len()).filter(|&v| self.is_q(v)).count()
    }

    /// Connected components of the compact part, each as a sorted list of
    /// vertex indices, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut out = Vec::new();
        for start in 0..self.vertices.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Structural violations that do not depend on connectedness.
    fn local_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut ids = BTreeSet::new();
        for v in &self.vertices {
            if !ids.insert(v.id.as_str()) {
                out.push(Violation(format!("duplicate vertex {}", v.id)));
            }
        }
        let mut bids = BTreeSet::new();
        for b in &self.branches {
            if !bids.insert(b.id.as_str()) {
                out.push(Violation(format!("duplicate branch {}", b.id)));
            }
            if let Some(v) = b.attach {
                if v >= self.vertices.len() {
                    out.push(Violation(format!("branch {} attached to missing vertex", b.id)));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a >= self.vertices.len() || b >= self.vertices.len() {
                out.push(Violation("edge endpoint names a missing vertex".to_string()));
                continue;
            }
            if a == b {
                out.push(Violation(format!("self-loop at {}", self.vertices[a].id)));
                continue;
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                out.push(Violation(format!(
                    "repeated edge {}-{}",
                    self.vertices[key.0].id, self.vertices[key.1].id
                )));
            }
        }
        out
    }

    /// Every failed `DualGraph` invariant, one record each. Empty iff the
    /// graph is a valid dual graph of a good resolution.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.local_violations();
        if !out.is_empty() {
            return out;
        }
        let comps = self.components();
        if comps.len() > 1 {
            out.push(Violation("compact graph disconnected".to_string()));
        }
        let n = self.vertices.len();
        if n > 0 && self.edges.len() + comps.len() != n {
            out.push(Violation("compact graph contains a cycle".to_string()));
        }
        let free = self.free_branches().count();
        if free > 0 && n > 0 {
            for b in self.free_branches() {
                out.push(Violation(format!("free branch {} in a nonempty graph", b.id)));
            }
        }
        if n == 0 && free > 2 {
            out.push(Violation(format!(
                "{free} free branches through one point are not normal crossing"
            )));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub(crate) fn ensure_valid(&self) -> Result<(), GraphError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(GraphError::Invalid(v.into_iter().map(|x| x.0).collect()))
        }
    }

    /// Smallest `e<k>` not already used as a vertex id.
    pub(crate) fn fresh_vertex_id(&self) -> String {
        let used: BTreeSet<&str> = self.vertices.iter().map(|v| v.id.as_str()).collect();
        (1..)
            .map(|k| format!("e{k}"))
            .find(|id| !used.contains(id.as_str()))
            .expect("unbounded id supply")
    }

    /// Removes the given vertices and their incident edges. Branches that were
    /// attached to a removed vertex become free.
    pub(crate) fn remove_vertices(&mut self, doomed: &[usize]) {
        let n = self.vertices.len();
        let mut keep = vec![true; n];
        for &d in doomed {
            keep[d] = false;
        }
        let mut remap = vec![usize::MAX; n];
        let mut next = 0;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                remap[i] = next;
                next += 1;
            }
        }
        let mut idx = 0;
        self.vertices.retain(|_| {
            let k = keep[idx];
            idx += 1;
            k
        });
        self.edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| keep[a] && keep[b])
            .map(|&(a, b)| (remap[a], remap[b]))
            .collect();
        for b in &mut self.branches {
            b.attach = b.attach.and_then(|v| if keep[v] { Some(remap[v]) } else { None });
        }
    }

    pub(crate) fn remove_edge(&mut self, a: usize, b: usize) {
        if let Some(pos) = self
            .edges
            .iter()
            .position(|&(x, y)| (x == a && y == b) || (x == b && y == a))
        {
            self.edges.swap_remove(pos);
        }
    }

    pub(crate) fn flip(&mut self, v: usize) {
        self.vertices[v].parity = self.vertices[v].parity.flip();
    }

    /// The canonical isomorphism code. With `branch_labels` the branch ids are
    /// part of the code; without, branches are interchangeable.
    pub fn canonical_code(&self, branch_labels: bool) -> String {
        Canonizer::new(self, branch_labels).code()
    }

    pub fn is_isomorphic(&self, other: &DualGraph, branch_labels: bool) -> bool {
        self.canonical_code(branch_labels) == other.canonical_code(branch_labels)
    }

    /// Vertex indices in canonical order (for the labelled or unlabelled code).
    pub fn canonical_order(&self, branch_labels: bool) -> Vec<usize> {
        Canonizer::new(self, branch_labels).order().0
    }

    /// An isomorphic copy with vertices renamed `v1..vn` and branches
    /// `b1..bm` in canonical order. Two isomorphic graphs (branches
    /// interchangeable) yield identical copies.
    pub fn canonical_form(&self) -> DualGraph {
        let canon = Canonizer::new(self, false);
        let (order, branch_order) = canon.order();
        let mut pos = vec![0; self.vertices.len()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut out = DualGraph::new();
        for (i, &v) in order.iter().enumerate() {
            out.vertices.push(Vertex { id: format!("v{}", i + 1), parity: self.parity(v) });
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| (pos[a].min(pos[b]), pos[a].max(pos[b])))
            .collect();
        edges.sort_unstable();
        out.edges = edges;
        for (i, &b) in branch_order.iter().enumerate() {
            out.branches.push(Branch {
                id: format!("b{}", i + 1),
                attach: self.branches[b].attach.map(|v| pos[v]),
            });
        }
        out
    }
}

/// AHU-style encoder for forests of parity-labelled trees with branch marks.
///
/// A rooted subtree encodes as `(` parity branch-marks child-codes `)` with
/// children sorted; an unrooted tree is encoded from its center (the smaller
/// code when there are two centers). Components and free branches are sorted
/// and joined with `;`.
struct Canonizer<'a> {
    g: &'a DualGraph,
    adj: Vec<Vec<usize>>,
    marks: Vec<String>,
    labeled: bool,
}

impl<'a> Canonizer<'a> {
    fn new(g: &'a DualGraph, labeled: bool) -> Self {
        let mut per_vertex: Vec<Vec<&str>> = vec![Vec::new(); g.vertices.len()];
        for b in &g.branches {
            if let Some(v) = b.attach {
                per_vertex[v].push(&b.id);
            }
        }
        let marks = per_vertex
            .into_iter()
            .map(|mut ids| {
                if labeled {
                    ids.sort_unstable();
                    ids.iter().map(|id| format!("[{id}]")).collect()
                } else {
                    "*".repeat(ids.len())
                }
            })
            .collect();
        Canonizer { g, adj: g.adjacency(), marks, labeled }
    }

    fn rooted(&self, v: usize, parent: usize) -> String {
        let mut kids: Vec<String> = self.adj[v]
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| self.rooted(w, v))
            .collect();
        kids.sort_unstable();
        let mut s = String::with_capacity(4 + kids.iter().map(String::len).sum::<usize>());
        s.push('(');
        s.push(self.g.vertices[v].parity.code_char());
        s.push_str(&self.marks[v]);
        for k in &kids {
            s.push_str(k);
        }
        s.push(')');
        s
    }

    fn centers(&self, comp: &[usize]) -> Vec<usize> {
        if comp.len() <= 2 {
            return comp.to_vec();
        }
        let mut deg: BTreeMap<usize, usize> = comp.iter().map(|&v| (v, self.adj[v].len())).collect();
        let mut leaves: Vec<usize> = comp.iter().copied().filter(|v| deg[v] <= 1).collect();
        let mut remaining = comp.len();
        while remaining > 2 {
            remaining -= leaves.len();
            let mut next = Vec::new();
            for &l in &leaves {
                deg.insert(l, 0);
                for &w in &self.adj[l] {
                    if let Some(d) = deg.get_mut(&w) {
                        if *d > 0 {
                            *d -= 1;
                            if *d == 1 {
                                next.push(w);
                            }
                        }
                    }
                }
            }
            leaves = next;
        }
        leaves.sort_unstable();
        leaves
    }

    /// Best root of a component and its code.
    fn component_code(&self, comp: &[usize]) -> (String, usize) {
        self.centers(comp)
            .into_iter()
            .map(|c| (self.rooted(c, usize::MAX), c))
            .min()
            .expect("component is nonempty")
    }

    fn free_mark(&self, b: &Branch) -> String {
        if self.labeled {
            format!("[{}]", b.id)
        } else {
            "*".to_string()
        }
    }

    fn code(&self) -> String {
        let mut parts: Vec<String> =
            self.g.components().iter().map(|c| self.component_code(c).0).collect();
        parts.extend(self.g.free_branches().map(|b| self.free_mark(b)));
        parts.sort_unstable();
        parts.join(";")
    }

    /// Canonical vertex order and branch order.
    fn order(&self) -> (Vec<usize>, Vec<usize>) {
        let mut comps: Vec<(String, usize)> =
            self.g.components().iter().map(|c| self.component_code(c)).collect();
        comps.sort();
        let mut order = Vec::with_capacity(self.g.vertices.len());
        for (_, root) in comps {
            self.walk(root, usize::MAX, &mut order);
        }
        let mut branch_order = Vec::with_capacity(self.g.branches.len());
        let mut free: Vec<usize> = Vec::new();
        for (i, b) in self.g.branches.iter().enumerate() {
            if b.attach.is_none() {
                free.push(i);
            }
        }
        free.sort_by(|&a, &b| self.g.branches[a].id.cmp(&self.g.branches[b].id));
        for &v in &order {
            let mut here = self.g.branches_at(v);
            here.sort_by(|&a, &b| self.g.branches[a].id.cmp(&self.g.branches[b].id));
            branch_order.extend(here);
        }
        branch_order.extend(free);
        (order, branch_order)
    }

    fn walk(&self, v: usize, parent: usize, out: &mut Vec<usize>) {
        out.push(v);
        let mut kids: Vec<(String, usize)> = self.adj[v]
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| (self.rooted(w, v), w))
            .collect();
        kids.sort();
        for (_, w) in kids {
            self.walk(w, v, out);
        }
    }
}

/// Γ_I: what remains of Γ* after deleting the vertices of some paths. May be
/// disconnected; branches whose vertex was deleted are kept as lone
/// (free) branches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphForest {
    pub(crate) graph: DualGraph,
}

impl SubgraphForest {
    pub fn graph(&self) -> &DualGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Per-component subforests; each lone branch is its own component.
    pub fn split(&self) -> Vec<SubgraphForest> {
        let g = &self.graph;
        let mut out = Vec::new();
        for comp in g.components() {
            let mut sub = DualGraph::new();
            let mut pos = BTreeMap::new();
            for &v in &comp {
                pos.insert(v, sub.vertices.len());
                sub.vertices.push(g.vertices[v].clone());
            }
            for &(a, b) in &g.edges {
                if let (Some(&x), Some(&y)) = (pos.get(&a), pos.get(&b)) {
                    sub.edges.push((x, y));
                }
            }
            for b in &g.branches {
                if let Some(v) = b.attach {
                    if let Some(&x) = pos.get(&v) {
                        sub.branches.push(Branch { id: b.id.clone(), attach: Some(x) });
                    }
                }
            }
            out.push(SubgraphForest { graph: sub });
        }
        for b in g.free_branches() {
            let mut sub = DualGraph::new();
            sub.branches.push(b.clone());
            out.push(SubgraphForest { graph: sub });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(center: Parity, leaves: &[Parity], branches_on_center: usize) -> DualGraph {
        let mut g = DualGraph::new();
        g.add_vertex("c", center).unwrap();
        for (i, &p) in leaves.iter().enumerate() {
            let id = format!("l{i}");
            g.add_vertex(&id, p).unwrap();
            g.add_edge("c", &id).unwrap();
        }
        for i in 0..branches_on_center {
            g.add_branch(&format!("b{i}"), "c").unwrap();
        }
        g
    }

    #[test]
    fn validate_examples() {
        let mut g = DualGraph::new();
        g.add_vertex("v1", Parity::Odd).unwrap();
        g.add_branch("b1", "v1").unwrap();
        assert!(g.validate().is_empty());

        let mut g = DualGraph::new();
        g.add_vertex("v1", Parity::Odd).unwrap();
        g.add_vertex("v2", Parity::Odd).unwrap();
        assert_eq!(g.validate(), vec![Violation("compact graph disconnected".into())]);

        let mut g = DualGraph::new();
        g.add_vertex("v1", Parity::Odd).unwrap();
        g.add_edge("v1", "v1").unwrap();
        assert_eq!(g.validate(), vec![Violation("self-loop at v1".into())]);
    }

    #[test]
    fn cycle_and_repeated_edge_are_reported() {
        let mut g = DualGraph::new();
        for id in ["a", "b", "c"] {
            g.add_vertex(id, Parity::Even).unwrap();
        }
        g.add_edge("a", "b").unwrap();
        g.add_edge("b", "c").unwrap();
        g.add_edge("c", "a").unwrap();
        assert_eq!(g.validate(), vec![Violation("compact graph contains a cycle".into())]);

        let mut g = DualGraph::new();
        g.add_vertex("a", Parity::Even).unwrap();
        g.add_vertex("b", Parity::Even).unwrap();
        g.add_edge("a", "b").unwrap();
        g.add_edge("b", "a").unwrap();
        assert_eq!(g.validate(), vec![Violation("repeated edge a-b".into())]);
    }

    #[test]
    fn free_branch_rules() {
        let mut g = DualGraph::new();
        g.add_free_branch("b1").unwrap();
        g.add_free_branch("b2").unwrap();
        assert!(g.is_valid());
        g.add_free_branch("b3").unwrap();
        assert!(!g.is_valid());

        let mut g = DualGraph::new();
        g.add_vertex("v", Parity::Odd).unwrap();
        g.add_free_branch("b1").unwrap();
        assert!(!g.is_valid());
    }

    #[test]
    fn bad_identifiers_rejected() {
        let mut g = DualGraph::new();
        assert!(matches!(g.add_vertex("a-b", Parity::Odd), Err(GraphError::BadIdentifier(_))));
        assert!(matches!(g.add_vertex("", Parity::Odd), Err(GraphError::BadIdentifier(_))));
        g.add_vertex("ok_1", Parity::Odd).unwrap();
        assert!(matches!(g.add_vertex("ok_1", Parity::Odd), Err(GraphError::DuplicateVertex(_))));
        assert!(matches!(g.add_edge("ok_1", "zz"), Err(GraphError::UnknownVertex(_))));
    }

    #[test]
    fn valency_examples() {
        let g = star(Parity::Odd, &[Parity::Even; 3], 0);
        assert_eq!(g.valency("c", true).unwrap(), 3);

        let mut g = DualGraph::new();
        g.add_vertex("c", Parity::Odd).unwrap();
        g.add_vertex("l", Parity::Odd).unwrap();
        g.add_edge("c", "l").unwrap();
        g.add_branch("b1", "l").unwrap();
        g.add_branch("b2", "l").unwrap();
        assert_eq!(g.valency("l", true).unwrap(), 3);
        assert_eq!(g.valency("l", false).unwrap(), 1);
        assert!(g.valency("nope", true).is_err());
    }

    #[test]
    fn classify_examples() {
        let g = star(Parity::Odd, &[Parity::Even], 0);
        assert_eq!(g.classify_vertex("l0").unwrap(), VertexClass::Q);

        let mut g = DualGraph::new();
        g.add_vertex("c", Parity::Even).unwrap();
        g.add_vertex("l", Parity::Odd).unwrap();
        g.add_edge("c", "l").unwrap();
        g.add_branch("b1", "l").unwrap();
        g.add_branch("b2", "l").unwrap();
        assert_eq!(g.classify_vertex("l").unwrap(), VertexClass::Special);

        let g = star(Parity::Even, &[Parity::Odd, Parity::Odd], 0);
        assert_eq!(g.classify_vertex("c").unwrap(), VertexClass::Ordinary);
        assert_eq!(g.classify_vertex("l0").unwrap(), VertexClass::Extremal);
    }

    #[test]
    fn canonical_code_examples() {
        let mut a = DualGraph::new();
        a.add_vertex("x", Parity::Odd).unwrap();
        let mut b = DualGraph::new();
        b.add_vertex("y", Parity::Odd).unwrap();
        assert_eq!(a.canonical_code(true), b.canonical_code(true));

        let mut c = DualGraph::new();
        c.add_vertex("x", Parity::Even).unwrap();
        assert_ne!(a.canonical_code(false), c.canonical_code(false));
    }

    fn path3(p: [Parity; 3]) -> DualGraph {
        let mut g = DualGraph::new();
        for (i, &q) in p.iter().enumerate() {
            g.add_vertex(&format!("p{i}"), q).unwrap();
        }
        g.add_edge("p0", "p1").unwrap();
        g.add_edge("p1", "p2").unwrap();
        g
    }

    #[test]
    fn three_path_parities_give_six_classes() {
        use Parity::*;
        let all: Vec<[Parity; 3]> = (0..8)
            .map(|m| {
                let p = |bit: u32| if m >> bit & 1 == 1 { Odd } else { Even };
                [p(0), p(1), p(2)]
            })
            .collect();
        // Independent oracle: two labelings are the same tree iff equal or reversed.
        let mut classes: Vec<[Parity; 3]> = Vec::new();
        for p in &all {
            let rev = [p[2], p[1], p[0]];
            if !classes.iter().any(|c| c == p || *c == rev) {
                classes.push(*p);
            }
        }
        let codes: BTreeSet<String> =
            classes.iter().map(|p| path3(*p).canonical_code(false)).collect();
        assert_eq!(codes.len(), classes.len());
        for p in &all {
            let rev = [p[2], p[1], p[0]];
            assert_eq!(path3(*p).canonical_code(false), path3(rev).canonical_code(false));
        }
        assert_ne!(
            path3([Even, Odd, Even]).canonical_code(false),
            path3([Even, Even, Odd]).canonical_code(false)
        );
    }

    #[test]
    fn isomorphism_examples() {
        let mut g1 = DualGraph::new();
        g1.add_vertex("a", Parity::Odd).unwrap();
        g1.add_vertex("b", Parity::Even).unwrap();
        g1.add_edge("a", "b").unwrap();
        g1.add_branch("b1", "a").unwrap();
        g1.add_branch("b2", "b").unwrap();

        let mut g2 = DualGraph::new();
        g2.add_vertex("q", Parity::Even).unwrap();
        g2.add_vertex("p", Parity::Odd).unwrap();
        g2.add_edge("p", "q").unwrap();
        g2.add_branch("b1", "p").unwrap();
        g2.add_branch("b2", "q").unwrap();
        assert!(g1.is_isomorphic(&g2, true));

        let mut g3 = DualGraph::new();
        g3.add_vertex("q", Parity::Even).unwrap();
        g3.add_vertex("p", Parity::Odd).unwrap();
        g3.add_edge("p", "q").unwrap();
        g3.add_branch("b2", "p").unwrap();
        g3.add_branch("b1", "q").unwrap();
        assert!(g1.is_isomorphic(&g3, false));
        assert!(!g1.is_isomorphic(&g3, true));

        let mut single = DualGraph::new();
        single.add_vertex("a", Parity::Odd).unwrap();
        assert!(!single.is_isomorphic(&g1, false));
    }

    #[test]
    fn canonical_form_is_stable_under_renaming() {
        let mut g1 = DualGraph::new();
        for (id, p) in [("a", Parity::Odd), ("b", Parity::Even), ("c", Parity::Even)] {
            g1.add_vertex(id, p).unwrap();
        }
        g1.add_edge("a", "b").unwrap();
        g1.add_edge("a", "c").unwrap();
        g1.add_branch("x", "b").unwrap();

        let mut g2 = DualGraph::new();
        for (id, p) in [("c", Parity::Even), ("z", Parity::Even), ("m", Parity::Odd)] {
            g2.add_vertex(id, p).unwrap();
        }
        g2.add_edge("m", "z").unwrap();
        g2.add_edge("c", "m").unwrap();
        g2.add_branch("y", "z").unwrap();
        assert_eq!(g1.canonical_form(), g2.canonical_form());
        assert!(g1.canonical_form().is_isomorphic(&g1, false));
    }

    #[test]
    fn tree_edge_count_matches_components() {
        let g = star(Parity::Even, &[Parity::Odd, Parity::Even, Parity::Odd], 2);
        assert!(g.is_valid());
        assert_eq!(g.edges().len(), g.vertex_count() - g.components().len());
    }
}
