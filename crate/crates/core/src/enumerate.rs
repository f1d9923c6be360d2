//! Enumeration of standard forms and their classification.
//!
//! Candidates are produced without templates: unlabelled trees are grown by
//! leaf augmentation, branches are placed on them in every way, and parities
//! are fixed by the standard-form rules wherever they are forced. Everything
//! is then filtered by the actual predicates (contractibility, P1 to P4,
//! irreducibility, the extremal-vertex rule) and deduplicated by canonical
//! code.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::gf2;
use crate::graph::{DualGraph, GraphError, Parity};
use crate::invariants::{self, InvariantKey, InvariantReport};
use crate::moves::{self, MoveError};
use crate::search::{Reachable, DEFAULT_NODE_BUDGET};

/// Largest vertex bound `stable_vmax` will try.
pub const VMAX_LIMIT: usize = 18;

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error("no stable vertex bound found up to {0}")]
    BudgetExceeded(usize),
    #[error("graphs have mixed branch counts")]
    MixedBranchCounts,
    #[error("trunk types are defined only for three branches, got {0}")]
    NotTribranched(usize),
    #[error("{0}")]
    Move(#[from] MoveError),
    #[error("{0}")]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TrunkType {
    A,
    B,
    C,
    D,
}

impl fmt::Display for TrunkType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Unlabelled trees on exactly `size` vertices, as adjacency lists.
fn trees(size: usize) -> Vec<Vec<Vec<usize>>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut level: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new()]];
    for _ in 1..size {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for t in &level {
            for v in 0..t.len() {
                let mut u = t.clone();
                let w = u.len();
                u.push(vec![v]);
                u[v].push(w);
                if seen.insert(tree_code(&u)) {
                    next.push(u);
                }
            }
        }
        level = next;
    }
    level
}

fn tree_code(adj: &[Vec<usize>]) -> String {
    bare_graph(adj).canonical_code(false)
}

fn bare_graph(adj: &[Vec<usize>]) -> DualGraph {
    let mut g = DualGraph::new();
    for v in 0..adj.len() {
        g.add_vertex(&format!("v{}", v + 1), Parity::Even).expect("fresh id");
    }
    for (v, ns) in adj.iter().enumerate() {
        for &w in ns.iter().filter(|&&w| w > v) {
            g.add_edge(&format!("v{}", v + 1), &format!("v{}", w + 1)).expect("known ids");
        }
    }
    g
}

/// Multisets of size `n` drawn from `0..v`, as nondecreasing sequences.
fn multisets(v: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(v: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in start..v {
            cur.push(x);
            go(v, n, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(v, n, 0, &mut Vec::new(), &mut out);
    out
}

/// The extremal-vertex rule: every extremal vertex is a Q, carries at
/// least two branches, or is even with one branch and a neighbour that
/// carries a branch or has valency at least 3 in the compact graph.
pub fn extremal_rule_holds(g: &DualGraph) -> bool {
    let counts = g.branch_counts();
    (0..g.vertex_count()).filter(|&v| g.valency_of(v, false) == 1).all(|v| {
        if g.is_q(v) || counts[v] >= 2 {
            return true;
        }
        if counts[v] != 1 || g.parity(v).is_odd() {
            return false;
        }
        let u = g.neighbors(v)[0];
        counts[u] >= 1 || g.valency_of(u, false) >= 3
    })
}

/// Whether `g` is a standard form with `μ′ = k` that no contraction or
/// modification can simplify further.
pub fn is_standard_form(g: &DualGraph, k: usize) -> bool {
    if !g.is_valid() || !gf2::intersection_matrix(g).det() {
        return false;
    }
    if g.branch_count() == 0 || !moves::is_reduced(g) || !extremal_rule_holds(g) {
        return false;
    }
    matches!(moves::is_standard(g), Ok((true, _))) && invariants::mu_prime(g).ok() == Some(k)
}

fn decorate(adj: &[Vec<usize>], n: usize, k: usize) -> Vec<DualGraph> {
    let size = adj.len();
    let mut out = Vec::new();
    for placement in multisets(size, n) {
        let mut counts = vec![0usize; size];
        for &v in &placement {
            counts[v] += 1;
        }
        let ext: Vec<usize> = (0..size).map(|v| adj[v].len() + counts[v]).collect();
        if ext.iter().filter(|&&d| d == 1).count() != k {
            continue;
        }
        let special: Vec<usize> = (0..size).filter(|&v| ext[v] >= 3).collect();
        let free: Vec<usize> = special
            .iter()
            .copied()
            .filter(|&v| !adj[v].iter().any(|&w| ext[w] == 1))
            .collect();
        for mask in 0u32..(1 << free.len()) {
            let mut g = bare_graph(adj);
            for (i, &v) in free.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    g.flip(v);
                }
            }
            for (i, &v) in placement.iter().enumerate() {
                g.add_branch(&format!("b{}", i + 1), &format!("v{}", v + 1)).expect("fresh branch");
            }
            if is_standard_form(&g, k) {
                out.push(g);
            }
        }
    }
    out
}

/// Standard forms with exactly `size` vertices, keyed by unlabelled code.
fn forms_of_size(n: usize, k: usize, size: usize) -> BTreeMap<String, DualGraph> {
    if size == 0 {
        let mut out = BTreeMap::new();
        if n <= 2 && k == 0 {
            let mut g = DualGraph::new();
            for i in 1..=n {
                g.add_free_branch(&format!("b{i}")).expect("fresh branch");
            }
            if n >= 1 {
                out.insert(g.canonical_code(false), g);
            }
        }
        return out;
    }
    let found: Vec<Vec<DualGraph>> = trees(size).par_iter().map(|t| decorate(t, n, k)).collect();
    let mut out = BTreeMap::new();
    for g in found.into_iter().flatten() {
        out.entry(g.canonical_code(false)).or_insert_with(|| g.canonical_form());
    }
    out
}

/// All standard forms with `n` branches, `μ′ = k` and at most `v_max`
/// vertices, up to isomorphism with branch labels erased. Ordered by size,
/// then by canonical code.
pub fn enumerate_standard(n: usize, k: usize, v_max: usize) -> Vec<DualGraph> {
    if n == 0 {
        return Vec::new();
    }
    (0..=v_max).flat_map(|size| forms_of_size(n, k, size).into_values()).collect()
}

/// Smallest `V`, at or above the size of the smallest form, such that no
/// standard form has `V + 1` or `V + 2` vertices; the enumeration up to `V`
/// then equals the one up to `V + 2`. Anchoring at the first form keeps the
/// empty small sizes of larger `k` from stabilizing vacuously.
pub fn stable_vmax(n: usize, k: usize) -> Result<usize, EnumerateError> {
    let mut sizes = Vec::new();
    let mut first = None;
    for size in 0..=VMAX_LIMIT + 2 {
        sizes.push(forms_of_size(n, k, size).len());
        if first.is_none() && sizes[size] > 0 {
            first = Some(size);
        }
        if let Some(f) = first {
            if size >= f + 2 && sizes[size] == 0 && sizes[size - 1] == 0 {
                return Ok(size - 2);
            }
        }
    }
    Err(EnumerateError::BudgetExceeded(VMAX_LIMIT))
}

/// Shape of the minimal subtree joining the three branch attachments.
pub fn trunk_type(g: &DualGraph) -> Result<TrunkType, EnumerateError> {
    if g.branch_count() != 3 {
        return Err(EnumerateError::NotTribranched(g.branch_count()));
    }
    let attach: BTreeSet<usize> = g.branches().iter().filter_map(|b| b.attach).collect();
    let a: Vec<usize> = attach.into_iter().collect();
    Ok(match a.len() {
        0 | 1 => TrunkType::A,
        2 => TrunkType::B,
        _ => {
            let between = |m: usize, x: usize, y: usize| invariants::tree_path(g, a[x], a[y]).contains(&a[m]);
            if between(0, 1, 2) || between(1, 0, 2) || between(2, 0, 1) {
                TrunkType::C
            } else {
                TrunkType::D
            }
        }
    })
}

#[derive(Debug, Clone)]
pub struct Class {
    pub representative: DualGraph,
    /// Indices into the classified input.
    pub members: Vec<usize>,
    pub mu_prime: usize,
    /// Sorted pair values.
    pub signature: Vec<usize>,
    /// Invariants of the representative, with its own branch labels.
    pub report: InvariantReport,
    pub trunk: Option<TrunkType>,
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub classes: Vec<Class>,
    /// Pairs of class indices with equal invariants that the search did not
    /// join.
    pub unresolved: Vec<(usize, usize)>,
    /// Largest search depth actually explored.
    pub depth: usize,
}

impl ClassificationReport {
    /// Signatures in the stable textual form `{a,b,c}`, sorted.
    pub fn signatures(&self) -> Vec<String> {
        let mut s: Vec<String> = self.classes.iter().map(|c| format_signature(&c.signature)).collect();
        s.sort();
        s
    }

    pub fn summary(&self) -> String {
        format!("classes={} signatures={}", self.classes.len(), self.signatures().join(","))
    }
}

pub fn format_signature(values: &[usize]) -> String {
    let parts: Vec<String> = values.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn groups(&mut self, n: usize) -> usize {
        (0..n).filter(|&i| self.find(i) == i).count()
    }
}

/// Merges one invariant cell by bounded search; returns the depth used.
fn merge_cell(graphs: &[&DualGraph], depth: usize, budget: usize, uf: &mut UnionFind) -> usize {
    let mut reach: Vec<Reachable> = graphs.par_iter().map(|g| Reachable::new(g, budget)).collect();
    let mut d = 0;
    loop {
        let mut owner: HashMap<&str, usize> = HashMap::new();
        for (i, r) in reach.iter().enumerate() {
            for code in r.codes() {
                match owner.get(code.as_str()) {
                    Some(&j) => uf.union(i, j),
                    None => {
                        owner.insert(code, i);
                    }
                }
            }
        }
        if uf.groups(graphs.len()) == 1 || d >= depth {
            return d;
        }
        d += 1;
        reach.par_iter_mut().for_each(|r| r.grow());
    }
}

/// Partitions graphs by their invariants, then merges within each cell by
/// the bounded equivalence search up to `depth`.
pub fn classify(graphs: &[DualGraph], depth: usize) -> Result<ClassificationReport, EnumerateError> {
    classify_with_budget(graphs, depth, DEFAULT_NODE_BUDGET)
}

pub fn classify_with_budget(
    graphs: &[DualGraph],
    depth: usize,
    budget: usize,
) -> Result<ClassificationReport, EnumerateError> {
    if let Some(first) = graphs.first() {
        if graphs.iter().any(|g| g.branch_count() != first.branch_count()) {
            return Err(EnumerateError::MixedBranchCounts);
        }
    }
    for g in graphs {
        if !gf2::is_contractible(g)? {
            return Err(MoveError::NotContractible.into());
        }
    }
    let keys: Vec<InvariantKey> =
        graphs.par_iter().map(invariants::invariant_key).collect::<Result<_, _>>()?;
    let mut cells: BTreeMap<&InvariantKey, Vec<usize>> = BTreeMap::new();
    for (i, key) in keys.iter().enumerate() {
        cells.entry(key).or_default().push(i);
    }

    let mut classes = Vec::new();
    let mut unresolved = Vec::new();
    let mut used = 0;
    for (key, members) in cells {
        let cell: Vec<&DualGraph> = members.iter().map(|&i| &graphs[i]).collect();
        let mut uf = UnionFind((0..cell.len()).collect());
        used = used.max(merge_cell(&cell, depth, budget, &mut uf));
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (local, &global) in members.iter().enumerate() {
            groups.entry(uf.find(local)).or_default().push(global);
        }
        let mut cell_classes = Vec::new();
        for group in groups.into_values() {
            let rep = group
                .iter()
                .map(|&i| &graphs[i])
                .min_by_key(|g| (g.vertex_count(), g.canonical_code(false)))
                .expect("groups are nonempty")
                .canonical_form();
            let report = invariants::report(&rep)?;
            let trunk = if rep.branch_count() == 3 { trunk_type(&rep).ok() } else { None };
            cell_classes.push(Class {
                representative: rep,
                members: group,
                mu_prime: key.mu_prime,
                signature: key.signature.clone(),
                report,
                trunk,
            });
        }
        cell_classes.sort_by_key(|c| c.representative.canonical_code(false));
        let base = classes.len();
        for i in 0..cell_classes.len() {
            for j in i + 1..cell_classes.len() {
                unresolved.push((base + i, base + j));
            }
        }
        classes.extend(cell_classes);
    }
    Ok(ClassificationReport { classes, unresolved, depth: used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_graph;

    fn g(text: &str) -> DualGraph {
        parse_graph(text).unwrap()
    }

    #[test]
    fn tree_counts() {
        let counts: Vec<usize> = (0..=9).map(|s| trees(s).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 1, 2, 3, 6, 11, 23, 47]);
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets(4, 3).len(), 20);
        assert_eq!(multisets(1, 3), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn unibranched_has_only_the_line() {
        let forms = enumerate_standard(1, 0, 6);
        assert_eq!(forms.len(), 1);
        assert!(forms[0].is_empty());
        assert_eq!(forms[0].branch_count(), 1);
    }

    #[test]
    fn trunk_shapes() {
        let a = g("vertex c odd\nbranch b1 c\nbranch b2 c\nbranch b3 c\n");
        assert_eq!(trunk_type(&a).unwrap(), TrunkType::A);
        let b = g("vertex x odd\nvertex y even\nedge x y\nbranch b1 x\nbranch b2 x\nbranch b3 y\n");
        assert_eq!(trunk_type(&b).unwrap(), TrunkType::B);
        let c = g("vertex x even\nvertex y odd\nvertex z even\nedge x y\nedge y z\nbranch b1 x\nbranch b2 y\nbranch b3 z\n");
        assert_eq!(trunk_type(&c).unwrap(), TrunkType::C);
        let d = g("vertex d odd\nvertex x even\nvertex y even\nvertex z even\nedge d x\nedge d y\nedge d z\n\
                   branch b1 x\nbranch b2 y\nbranch b3 z\n");
        assert_eq!(trunk_type(&d).unwrap(), TrunkType::D);
        assert!(trunk_type(&g("vertex c odd\nbranch b1 c\n")).is_err());
    }

    #[test]
    fn single_graph_is_one_class() {
        let a = g("vertex c odd\nbranch b1 c\nbranch b2 c\nbranch b3 c\n");
        let r = classify(&[a], 2).unwrap();
        assert_eq!(r.classes.len(), 1);
        assert!(r.unresolved.is_empty());
    }

    #[test]
    fn mixed_branch_counts_rejected() {
        let a = g("vertex c odd\nbranch b1 c\n");
        let b = g("vertex c odd\nbranch b1 c\nbranch b2 c\n");
        assert!(matches!(classify(&[a, b], 1), Err(EnumerateError::MixedBranchCounts)));
    }

    #[test]
    fn extremal_rule_cases() {
        // Even leaf with one branch whose neighbour is a plain chain vertex.
        let bad = g("vertex s odd\nvertex m even\nvertex e even\nedge s m\nedge m e\n\
                     branch b1 e\nbranch b2 s\nbranch b3 s\n");
        assert!(!extremal_rule_holds(&bad));
        let ok = g("vertex s odd\nvertex e even\nedge s e\nbranch b1 e\nbranch b2 s\nbranch b3 s\n");
        assert!(extremal_rule_holds(&ok));
    }
}
