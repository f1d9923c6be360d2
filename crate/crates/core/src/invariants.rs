//! Corank invariants of the graphs left after deleting the tree paths that
//! join branches: μ_I for a partition I of the branches, μ′ for the one-block
//! partition, per-pair values and the surviving components Δ*_ij.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::gf2;
use crate::graph::{DualGraph, GraphError, SubgraphForest};

/// A partition of the branch ids into disjoint nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<String>>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<String>>) -> Self {
        Partition { blocks }
    }

    pub fn singletons(g: &DualGraph) -> Self {
        Partition { blocks: g.branches().iter().map(|b| vec![b.id.clone()]).collect() }
    }

    pub fn one_block(g: &DualGraph) -> Self {
        Partition { blocks: vec![g.branches().iter().map(|b| b.id.clone()).collect()] }
    }

    /// `{{i, j}}` plus singletons for everything else.
    pub fn pair(g: &DualGraph, i: &str, j: &str) -> Self {
        let mut blocks = vec![vec![i.to_string(), j.to_string()]];
        blocks.extend(g.branches().iter().filter(|b| b.id != i && b.id != j).map(|b| vec![b.id.clone()]));
        Partition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<String>] {
        &self.blocks
    }

    fn check(&self, g: &DualGraph) -> Result<(), GraphError> {
        let mut seen = BTreeSet::new();
        for block in &self.blocks {
            if block.is_empty() {
                return Err(GraphError::Invalid(vec!["empty partition block".into()]));
            }
            for id in block {
                g.require_branch(id)?;
                if !seen.insert(id.as_str()) {
                    return Err(GraphError::Invalid(vec![format!("branch {id} appears in two blocks")]));
                }
            }
        }
        if seen.len() != g.branch_count() {
            return Err(GraphError::Invalid(vec!["partition does not cover every branch".into()]));
        }
        Ok(())
    }
}

fn attachment(g: &DualGraph, id: &str) -> Result<Option<usize>, GraphError> {
    let b = g.require_branch(id)?;
    Ok(g.branches()[b].attach)
}

pub(crate) fn tree_path(g: &DualGraph, from: usize, to: usize) -> Vec<usize> {
    let adj = g.adjacency();
    let mut prev = vec![usize::MAX; g.vertex_count()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in &adj[v] {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Vertex indices of the unique path joining the attachment vertices of two
/// branches, endpoints included. Free branches meet directly, so their path
/// is empty.
pub fn path_between(g: &DualGraph, b1: &str, b2: &str) -> Result<Vec<usize>, GraphError> {
    g.ensure_valid()?;
    if b1 == b2 {
        return Err(GraphError::Invalid(vec![format!("path needs two distinct branches, got {b1} twice")]));
    }
    let (x, y) = (attachment(g, b1)?, attachment(g, b2)?);
    match (x, y) {
        (Some(x), Some(y)) => Ok(tree_path(g, x, y)),
        _ => Ok(Vec::new()),
    }
}

/// Γ_I: Γ* with every vertex on a path joining two branches of the same
/// block removed.
pub fn remove_partition_paths(g: &DualGraph, partition: &Partition) -> Result<SubgraphForest, GraphError> {
    g.ensure_valid()?;
    partition.check(g)?;
    let mut doomed = BTreeSet::new();
    for block in partition.blocks() {
        for (i, a) in block.iter().enumerate() {
            for b in &block[i + 1..] {
                doomed.extend(path_between(g, a, b)?);
            }
        }
    }
    let mut graph = g.clone();
    graph.remove_vertices(&doomed.into_iter().collect::<Vec<_>>());
    Ok(SubgraphForest { graph })
}

pub fn mu_partition(g: &DualGraph, partition: &Partition) -> Result<usize, GraphError> {
    Ok(gf2::mu(remove_partition_paths(g, partition)?.graph()))
}

pub fn mu_prime(g: &DualGraph) -> Result<usize, GraphError> {
    if g.branch_count() == 0 {
        return Err(GraphError::Invalid(vec!["mu_prime needs at least one branch".into()]));
    }
    if g.is_empty() {
        g.ensure_valid()?;
        return Ok(0);
    }
    mu_partition(g, &Partition::one_block(g))
}

/// One surviving component of Γ*_ij.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DeltaComponent {
    /// Corank of the compact part.
    pub mu: usize,
    /// Ids of the branches in the component, sorted.
    pub branches: Vec<String>,
    /// Canonical code with branch identities erased (`*` marks a branch).
    pub code: String,
}

impl DeltaComponent {
    pub fn tag(&self) -> (usize, usize) {
        (self.mu, self.branches.len())
    }
}

/// Δ*_ij: components of Γ*_ij that carry a branch or have nonzero corank.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DeltaStarSet {
    pub components: Vec<DeltaComponent>,
}

impl DeltaStarSet {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Sorted (μ, branch count) tags: the data a bijection must preserve.
    pub fn tags(&self) -> Vec<(usize, usize)> {
        let mut t: Vec<_> = self.components.iter().map(DeltaComponent::tag).collect();
        t.sort_unstable();
        t
    }

    pub fn codes(&self) -> Vec<&str> {
        self.components.iter().map(|c| c.code.as_str()).collect()
    }
}

impl fmt::Display for DeltaStarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.codes().join(","))
    }
}

pub fn delta_star(g: &DualGraph, b1: &str, b2: &str) -> Result<DeltaStarSet, GraphError> {
    let path = path_between(g, b1, b2)?;
    let mut rest = g.clone();
    // The path in Γ* runs from branch to branch, so both ends go too.
    rest.branches.retain(|b| b.id != b1 && b.id != b2);
    rest.remove_vertices(&path);
    let forest = SubgraphForest { graph: rest };
    let mut components: Vec<DeltaComponent> = forest
        .split()
        .into_iter()
        .filter_map(|part| {
            let h = part.graph();
            let mu = gf2::mu(h);
            let mut branches: Vec<String> = h.branches().iter().map(|b| b.id.clone()).collect();
            if mu == 0 && branches.is_empty() {
                return None;
            }
            branches.sort();
            Some(DeltaComponent { mu, branches, code: h.canonical_code(false) })
        })
        .collect();
    components.sort_by(|a, b| (a.mu, a.branches.len(), &a.code).cmp(&(b.mu, b.branches.len(), &b.code)));
    Ok(DeltaStarSet { components })
}

/// True iff a bijection between the two sets preserves corank and branch
/// count of each component.
pub fn compare_delta_star(d1: &DeltaStarSet, d2: &DeltaStarSet) -> bool {
    d1.tags() == d2.tags()
}

/// μ(Γ_ij) for every unordered pair of branches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSignature {
    pub entries: Vec<((String, String), usize)>,
}

impl PairSignature {
    /// The sorted multiset of values.
    pub fn values(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.entries.iter().map(|e| e.1).collect();
        v.sort_unstable();
        v
    }
}

fn branch_pairs(g: &DualGraph) -> Vec<(String, String)> {
    let mut ids: Vec<&str> = g.branches().iter().map(|b| b.id.as_str()).collect();
    ids.sort_by(|a, b| crate::text::natural_cmp(a, b));
    let mut out = Vec::new();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            out.push((a.to_string(), b.to_string()));
        }
    }
    out
}

pub fn pair_signature(g: &DualGraph) -> Result<PairSignature, GraphError> {
    if g.branch_count() < 2 {
        return Err(GraphError::Invalid(vec!["pair signature needs at least two branches".into()]));
    }
    let entries = branch_pairs(g)
        .into_iter()
        .map(|(a, b)| {
            let mu = mu_partition(g, &Partition::pair(g, &a, &b))?;
            Ok(((a, b), mu))
        })
        .collect::<Result<_, GraphError>>()?;
    Ok(PairSignature { entries })
}

pub type DeltaTable = Vec<((String, String), DeltaStarSet)>;

/// Δ*_ij for every unordered pair, pairs in natural id order.
pub fn delta_table(g: &DualGraph) -> Result<DeltaTable, GraphError> {
    branch_pairs(g)
        .into_iter()
        .map(|(a, b)| {
            let d = delta_star(g, &a, &b)?;
            Ok(((a, b), d))
        })
        .collect()
}

/// Full invariant report used by the CLI and by classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    pub mu_prime: usize,
    pub pairs: Vec<PairReport>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    pub pair: (String, String),
    pub mu: usize,
    pub delta: DeltaStarSet,
}

impl InvariantReport {
    pub fn signature_values(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pairs.iter().map(|p| p.mu).collect();
        v.sort_unstable();
        v
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mu_prime={}", self.mu_prime)?;
        for p in &self.pairs {
            writeln!(f, "pair {} {} mu={} delta={}", p.pair.0, p.pair.1, p.mu, p.delta)?;
        }
        Ok(())
    }
}

pub fn report(g: &DualGraph) -> Result<InvariantReport, GraphError> {
    let mu_prime = mu_prime(g)?;
    let mut pairs = Vec::new();
    if g.branch_count() >= 2 {
        let sig = pair_signature(g)?;
        for ((pair, mu), (_, delta)) in sig.entries.into_iter().zip(delta_table(g)?) {
            pairs.push(PairReport { pair, mu, delta });
        }
    }
    Ok(InvariantReport { mu_prime, pairs })
}

/// Label-free form of the per-pair data: for each pair (by branch position)
/// the μ value and the Δ* components as (μ, branch positions).
type PositionalRow = (usize, Vec<(usize, Vec<usize>)>);
type PositionalTable = Vec<PositionalRow>;

fn positional_table(report: &InvariantReport, ids: &[String], perm: &[usize]) -> PositionalTable {
    let pos = |id: &str| perm[ids.iter().position(|x| x == id).expect("known branch")];
    let mut rows: Vec<((usize, usize), PositionalRow)> = report
        .pairs
        .iter()
        .map(|p| {
            let (a, b) = (pos(&p.pair.0), pos(&p.pair.1));
            let mut comps: Vec<(usize, Vec<usize>)> = p
                .delta
                .components
                .iter()
                .map(|c| {
                    let mut bs: Vec<usize> = c.branches.iter().map(|id| pos(id)).collect();
                    bs.sort_unstable();
                    (c.mu, bs)
                })
                .collect();
            comps.sort();
            ((a.min(b), a.max(b)), (p.mu, comps))
        })
        .collect();
    rows.sort();
    rows.into_iter().map(|r| r.1).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn sorted_branch_ids(g: &DualGraph) -> Vec<String> {
    let mut ids: Vec<String> = g.branches().iter().map(|b| b.id.clone()).collect();
    ids.sort_by(|a, b| crate::text::natural_cmp(a, b));
    ids
}

/// A key that is equal for two graphs iff their μ′, pair values and Δ*
/// tables agree under some relabeling of branches.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InvariantKey {
    pub mu_prime: usize,
    pub signature: Vec<usize>,
    table: PositionalTable,
}

pub fn invariant_key(g: &DualGraph) -> Result<InvariantKey, GraphError> {
    let rep = report(g)?;
    let ids = sorted_branch_ids(g);
    let table = permutations(ids.len())
        .iter()
        .map(|p| positional_table(&rep, &ids, p))
        .min()
        .unwrap_or_default();
    Ok(InvariantKey { mu_prime: rep.mu_prime, signature: rep.signature_values(), table })
}

/// Whether the two graphs carry the same invariants under the branch
/// relabeling that maps equal ids to each other.
pub fn same_labeled_invariants(a: &DualGraph, b: &DualGraph) -> Result<bool, GraphError> {
    let (ra, rb) = (report(a)?, report(b)?);
    let ids = sorted_branch_ids(a);
    if ids != sorted_branch_ids(b) {
        return Ok(false);
    }
    let id: Vec<usize> = (0..ids.len()).collect();
    Ok(ra.mu_prime == rb.mu_prime && positional_table(&ra, &ids, &id) == positional_table(&rb, &ids, &id))
}
